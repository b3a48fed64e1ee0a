//! Randomized and exhaustive consistency suites.
//!
//! The CLI and the acceptance tests run the same code, so a report printed
//! by `uwoi` is exactly what the tests assert on. Every suite takes an
//! explicit seed and is deterministic.

use crate::error::{Error, Result};
use crate::gmfam::{
    alternating_sum, gm_value, hull_indicator, hull_volume, random_direction, random_point, random_positive_family,
    splitting_identity, GMFamily,
};
use crate::linalg::{Q, QMatrix};
use crate::localfield::{
    iwasawa, line_coefficient, r_family, random_centralizer, random_rational_matrix, random_unipotent, solve_in_n,
    u13_logdet_with, LogValue, LogVec, Place,
};
use crate::orbital::{default_direction, weight_exact, weight_family};
use crate::orbits::{NilpotentOrbit, Partition};
use crate::richardson::{
    adjacency, adjacent_pairs, bruteforce_richardson, epsilon_count_formula, perm_one_based, richardson_map, OrbitData,
};
use crate::roots::{perm_matrix, weyl_group_of_levi_order, Levi, Parabolic};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

fn parts_of(o: &NilpotentOrbit) -> Vec<usize> {
    o.partition.parts().to_vec()
}

/// `|ℰ(X)|` against the closed count and a brute-force enumeration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BijectionReport {
    pub partition: Vec<usize>,
    pub epsilon_count: usize,
    pub formula: u128,
    pub bruteforce: usize,
    /// The parabolics from ε and from brute force coincide as sets.
    pub same_set: bool,
    pub ok: bool,
}

pub fn richardson_bijection(o: &NilpotentOrbit) -> Result<BijectionReport> {
    let data = OrbitData::new(o)?;
    let mut from_eps = data.richardson.clone();
    from_eps.sort();
    let brute = bruteforce_richardson(o);
    let same_set = from_eps == brute;
    let formula = epsilon_count_formula(o);
    let ok = same_set && from_eps.len() as u128 == formula;
    Ok(BijectionReport { partition: parts_of(o), epsilon_count: from_eps.len(), formula, bruteforce: brute.len(), same_set, ok })
}

/// Fibers of `𝒫(M) → ℛ(X)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiberReport {
    pub partition: Vec<usize>,
    pub fibers: Vec<usize>,
    /// `|Norm_W(M)/W^M|`.
    pub expected: u128,
    pub surjective: bool,
    pub bijective: bool,
    pub simple: bool,
    pub ok: bool,
}

pub fn fiber_law(o: &NilpotentOrbit) -> Result<FiberReport> {
    let data = OrbitData::new(o)?;
    let mut fibers = vec![0usize; data.richardson.len()];
    for p in &data.pm {
        let (t, _) = richardson_map(&data, p)?;
        let i = data
            .richardson
            .iter()
            .position(|r| *r == t)
            .ok_or_else(|| Error::Internal("Richardson image outside ℛ(X)".into()))?;
        fibers[i] += 1;
    }
    let expected = weyl_group_of_levi_order(&data.m);
    let surjective = fibers.iter().all(|&f| f > 0);
    let bijective = fibers.iter().all(|&f| f == 1);
    let simple = o.is_simple();
    let ok = surjective && fibers.iter().all(|&f| f as u128 == expected) && bijective == simple;
    Ok(FiberReport { partition: parts_of(o), fibers, expected, surjective, bijective, simple, ok })
}

/// Exact identities satisfied by `(−R_P(g))_P` at one p-adic place.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightIdentityReport {
    pub partition: Vec<usize>,
    pub prime: u64,
    pub orthogonal: bool,
    /// `R_{P₂} − R_{P₁} = log|det U₁₃|·α^∨` on every adjacent pair.
    pub adjacent_jump: bool,
    /// Left multiplication by `G_X(ℚ)` moves the family by a common
    /// translation and leaves the weight unchanged.
    pub centralizer: bool,
    /// `H_{wPw⁻¹}(w g) = w·H_P(g)` for a random `w`.
    pub weyl: bool,
    pub ok: bool,
}

fn differences(f: &[LogVec]) -> Result<Vec<LogVec>> {
    f.iter().map(|x| x.sub(&f[0])).collect()
}

pub fn weight_identities<R: Rng>(data: &OrbitData, g: &QMatrix, prime: u64, rng: &mut R) -> Result<WeightIdentityReport> {
    let v = Place::Padic(prime);
    let orthogonal = weight_family(data, g, v)?.check().orthogonal;
    let fam = r_family(data, g, v)?;
    let mut adjacent_jump = true;
    for (p1, p2) in adjacent_pairs(data) {
        let adj = adjacency(data, &p1, &p2)?;
        let i1 = data.pm_index(&p1).expect("P₁ ∈ 𝒫(M)");
        let i2 = data.pm_index(&p2).expect("P₂ ∈ 𝒫(M)");
        // The family stores −R_P.
        let diff = fam[i1].sub(&fam[i2])?;
        let coef = diff.exact().and_then(|d| line_coefficient(d, &adj.coroot));
        let u13 = match u13_logdet_with(data, g, &p1, &p2, v)? {
            LogValue::Exact { coef, .. } => Some(coef),
            LogValue::Float(_) => None,
        };
        adjacent_jump &= coef.is_some() && coef == u13;
    }
    let h = random_centralizer(data, rng);
    let hg = h.mul(g);
    let moved = r_family(data, &hg, v)?;
    let g_all = Parabolic::whole(data.n());
    let centralizer = differences(&fam)? == differences(&moved)?
        && weight_exact(data, g, &data.m, &g_all, prime)? == weight_exact(data, &hg, &data.m, &g_all, prime)?;
    let mut w: Vec<usize> = (0..data.n()).collect();
    w.shuffle(rng);
    let wg = perm_matrix(&w).mul(g);
    let mut weyl = true;
    for p in &data.pm {
        let lhs = iwasawa(&wg, &p.act(&w), v)?.h;
        let rhs = iwasawa(g, p, v)?.h.permute(&w);
        weyl &= lhs == rhs;
    }
    let ok = orthogonal && adjacent_jump && centralizer && weyl;
    Ok(WeightIdentityReport { partition: parts_of(&data.orbit), prime, orthogonal, adjacent_jump, centralizer, weyl, ok })
}

/// Aggregate of a randomized suite.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteSummary<T> {
    pub trials: usize,
    pub failures: usize,
    /// The failing cases, for diagnosis.
    pub failed: Vec<T>,
}

impl<T> SuiteSummary<T> {
    pub fn ok(&self) -> bool {
        self.failures == 0 && self.trials > 0
    }
}

/// Weight identities on `trials` random `g`, cycling through the nonzero
/// orbits of `GL(n)` for the given `n` and primes.
pub fn weight_suite(ns: &[usize], primes: &[u64], trials: usize, seed: u64) -> Result<SuiteSummary<WeightIdentityReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut orbits: Vec<OrbitData> = Vec::new();
    for &n in ns {
        for p in Partition::all(n) {
            let o = NilpotentOrbit::new(p);
            if o.r >= 2 {
                orbits.push(OrbitData::new(&o)?);
            }
        }
    }
    if orbits.is_empty() || primes.is_empty() {
        return Err(Error::InvalidInput("no orbit or no prime to test".into()));
    }
    let mut failed = Vec::new();
    for t in 0..trials {
        let data = &orbits[t % orbits.len()];
        let p = primes[(t / orbits.len()) % primes.len()];
        let g = random_rational_matrix(data.n(), p, &mut rng);
        let rep = weight_identities(data, &g, p, &mut rng)?;
        if !rep.ok {
            failed.push(rep);
        }
    }
    Ok(SuiteSummary { trials, failures: failed.len(), failed })
}

/// One random positive family checked against the polytope oracles.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GmTrial {
    pub levi: Vec<Vec<usize>>,
    pub gm_value: f64,
    pub hull_volume: f64,
    pub volume_rel_err: f64,
    /// Random points where indicator and alternating sum were compared.
    pub indicator_points: usize,
    /// Points skipped because they fell on a wall.
    pub boundary_points: usize,
    pub indicator_ok: bool,
    pub splitting_rel_err: f64,
    pub ok: bool,
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// A random Levi of `GL(n)` with at least two blocks.
fn random_levi<R: Rng>(n: usize, rng: &mut R) -> Levi {
    loop {
        let k = rng.gen_range(2..=n.max(2));
        let mut labels: Vec<usize> = (0..n).map(|i| if i < k { i } else { rng.gen_range(0..k) }).collect();
        labels.shuffle(rng);
        let blocks: Vec<Vec<usize>> = (0..k).map(|b| (0..n).filter(|&a| labels[a] == b).collect()).collect();
        if let Ok(l) = Levi::new(blocks) {
            return l;
        }
    }
}

pub fn gm_trial<R: Rng>(m: &Levi, rng: &mut R) -> Result<GmTrial> {
    const TOL: f64 = 1e-8;
    let n = m.n();
    let g = Parabolic::whole(n);
    let fam = random_positive_family(m, rng);
    let lam = random_direction(m, &g, rng);
    let value = gm_value(&GMFamily::exponential(fam.clone()), m, &g, &lam)?;
    let hull = hull_volume(&fam).volume;
    let volume_rel_err = rel_err(value, hull);
    let mut indicator_points = 0;
    let mut boundary_points = 0;
    let mut indicator_ok = true;
    for _ in 0..6 {
        let h = random_point(&fam, rng);
        match (hull_indicator(&fam, &h), alternating_sum(&fam, &h)) {
            (Ok(inside), Ok(sum)) => {
                indicator_points += 1;
                indicator_ok &= sum == i64::from(inside);
            }
            (Err(Error::Boundary(_)), _) | (_, Err(Error::Boundary(_))) => boundary_points += 1,
            (Err(e), _) | (_, Err(e)) => return Err(e),
        }
    }
    let other = GMFamily::exponential(random_positive_family(m, rng));
    let xi = default_direction(m, &g)?;
    let (lhs, rhs) = splitting_identity(&GMFamily::exponential(fam), &other, &g, &xi, &lam)?;
    let splitting_rel_err = rel_err(lhs, rhs);
    let ok = volume_rel_err <= TOL && indicator_ok && splitting_rel_err <= TOL;
    let levi = m.blocks().iter().map(|b| b.iter().map(|a| a + 1).collect()).collect();
    Ok(GmTrial { levi, gm_value: value, hull_volume: hull, volume_rel_err, indicator_points, boundary_points, indicator_ok, splitting_rel_err, ok })
}

/// Polytope suite on random Levis of `GL(n)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GmSummary {
    pub n: usize,
    pub trials: usize,
    pub failures: usize,
    pub max_volume_rel_err: f64,
    pub max_splitting_rel_err: f64,
    pub indicator_points: usize,
    pub boundary_points: usize,
    pub failed: Vec<GmTrial>,
}

impl GmSummary {
    pub fn ok(&self) -> bool {
        self.failures == 0 && self.trials > 0
    }
}

pub fn gm_suite(n: usize, trials: usize, seed: u64) -> Result<GmSummary> {
    if n < 2 {
        return Err(Error::InvalidInput("gm-check needs n ≥ 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = GmSummary {
        n,
        trials,
        failures: 0,
        max_volume_rel_err: 0.0,
        max_splitting_rel_err: 0.0,
        indicator_points: 0,
        boundary_points: 0,
        failed: Vec::new(),
    };
    for _ in 0..trials {
        let m = random_levi(n, &mut rng);
        let t = gm_trial(&m, &mut rng)?;
        s.max_volume_rel_err = s.max_volume_rel_err.max(t.volume_rel_err);
        s.max_splitting_rel_err = s.max_splitting_rel_err.max(t.splitting_rel_err);
        s.indicator_points += t.indicator_points;
        s.boundary_points += t.boundary_points;
        if !t.ok {
            s.failures += 1;
            s.failed.push(t);
        }
    }
    Ok(s)
}

/// `solve_in_n` on conjugates `n₀⁻¹Xn₀` by random `n₀ ∈ N(ℚ)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolveReport {
    pub partition: Vec<usize>,
    pub trials: usize,
    pub successes: usize,
    pub ok: bool,
}

pub fn solve_suite(o: &NilpotentOrbit, trials: usize, seed: u64) -> Result<SolveReport> {
    let data = OrbitData::new(o)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut successes = 0;
    for _ in 0..trials {
        let n0 = random_unipotent(&data, &mut rng);
        let y = n0.inverse()?.mul(&data.x).mul(&n0);
        if let Ok(n) = solve_in_n(&data, &y) {
            let unipotent = (0..data.n()).all(|a| n[(a, a)] == Q::from_integer(1.into()));
            if unipotent && n.inverse()?.mul(&data.x).mul(&n) == y {
                successes += 1;
            }
        }
    }
    Ok(SolveReport { partition: parts_of(o), trials, successes, ok: successes == trials })
}

/// `(P, its image, w_P)` with one-based indices.
pub type RichardsonRow = (Vec<Vec<usize>>, Vec<Vec<usize>>, Vec<usize>);

/// `w_P` of every `P ∈ 𝒫(M)`, for reports.
pub fn richardson_table(data: &OrbitData) -> Result<Vec<RichardsonRow>> {
    data.pm
        .iter()
        .map(|p| {
            let (t, w) = richardson_map(data, p)?;
            Ok((p.to_one_based(), t.to_one_based(), perm_one_based(&w)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_orbits() {
        for p in Partition::all(4) {
            let o = NilpotentOrbit::new(p);
            assert!(richardson_bijection(&o).unwrap().ok);
            assert!(fiber_law(&o).unwrap().ok);
        }
    }

    #[test]
    fn suites_pass_briefly() {
        assert!(weight_suite(&[2, 3], &[2, 3], 12, 7).unwrap().ok());
        assert!(gm_suite(3, 10, 7).unwrap().ok());
        assert!(solve_suite(&NilpotentOrbit::parse("2,1").unwrap(), 10, 7).unwrap().ok);
    }

    #[test]
    fn suites_are_deterministic() {
        let a = gm_suite(4, 5, 99).unwrap();
        let b = gm_suite(4, 5, 99).unwrap();
        assert_eq!(a, b);
    }
}
