//! Weighted orbital integrals of unit functions.
//!
//! The weight attached to `g` is the value of the (G,M)-family
//! `P ↦ exp⟨λ, −R_P(g)⟩`. Its integral over `𝔫_{P₀}(ℤ_q)`, with `P₀` the
//! kernel-flag parabolic and `g` any element with `g^{-1}Xg = U`, is the
//! normalized local integral `c_X^{-1}·J_{L,X}^Q(𝟏_q)`.

use crate::error::{Error, Result};
use crate::gmfam::{gm_value, gm_value_exact, GMFamily, JetFn, OrthogonalFamily};
use crate::jet::Jet;
use crate::linalg::{q, qf, qpow, to_f64, Q, QMatrix};
use crate::localfield::{conjugator_from_x, r_family, LogVec, Place};
use crate::orbits::{NilpotentOrbit, Partition};
use crate::richardson::{matching_permutation, OrbitData};
use crate::roots::{dot, dot_f, parabolics_in, to_f64_vec, weyl_vector, Levi, Parabolic};
use crate::zeta::{z_jet, z_value, ZetaBackend};
use num_traits::{FromPrimitive, Zero};
use serde::Serialize;
use std::sync::Arc;

/// The orthogonal family `(−R_P(g))_P` as exact points (p-adic place, scale
/// `log p`) or as rounded floats (archimedean places, scale 1).
pub fn weight_family(data: &OrbitData, g: &QMatrix, v: Place) -> Result<OrthogonalFamily> {
    let vals = r_family(data, g, v)?;
    let (points, scale) = match v {
        Place::Padic(p) => {
            let pts = vals.iter().map(|x| x.exact().map(<[Q]>::to_vec)).collect::<Option<Vec<_>>>();
            (pts.ok_or_else(|| Error::Internal("p-adic values should be exact".into()))?, (p as f64).ln())
        }
        _ => {
            let pts = vals
                .iter()
                .map(|x| x.to_f64().iter().map(|&f| Q::from_f64(f).unwrap_or_else(Q::zero)).collect())
                .collect();
            (pts, 1.0)
        }
    };
    OrthogonalFamily::new(data.m.clone(), points, scale)
}

/// A fixed rational direction in `a_L^Q` off every root hyperplane of
/// `𝒫^Q(L)`. The values do not depend on it; fixing it keeps outputs
/// reproducible.
pub fn default_direction(l: &Levi, qp: &Parabolic) -> Result<Vec<Q>> {
    let n = l.n();
    let ps = parabolics_in(l, qp);
    for shift in 0..64i64 {
        let raw: Vec<Q> = (0..n).map(|i| q(((i as i64 + 3) * (i as i64 + 7 + shift)) % 101 + i as i64 * 211)).collect();
        let mut lam = l.project(&raw);
        for b in qp.blocks() {
            let avg: Q = b.iter().map(|&a| lam[a].clone()).sum::<Q>() / q(b.len() as i64);
            for &a in b {
                lam[a] -= &avg;
            }
        }
        let ok = ps.iter().all(|p| {
            p.root_data(qp)
                .map(|rd| rd.coroots.iter().all(|c| !dot(&lam, c).is_zero()))
                .unwrap_or(false)
        });
        if ok {
            return Ok(lam);
        }
    }
    Err(Error::SingularDirection)
}

/// Exact weight at a p-adic place: `v = ratio·√covolume_sq·(log p)^degree`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactWeight {
    pub ratio: Q,
    pub covolume_sq: Q,
    pub degree: usize,
    pub prime: u64,
}

impl ExactWeight {
    pub fn to_f64(&self) -> f64 {
        to_f64(&self.ratio) * to_f64(&self.covolume_sq).sqrt() * (self.prime as f64).ln().powi(self.degree as i32)
    }
}

/// `v_{L,X}^Q(g)` at a p-adic place, exactly.
pub fn weight_exact(data: &OrbitData, g: &QMatrix, l: &Levi, qp: &Parabolic, p: u64) -> Result<ExactWeight> {
    let fam = weight_family(data, g, Place::Padic(p))?;
    let lam = default_direction(l, qp)?;
    let (ratio, covolume_sq) = gm_value_exact(&fam, l, qp, &lam)?;
    Ok(ExactWeight { ratio, covolume_sq, degree: l.rank() - qp.num_blocks(), prime: p })
}

/// `v_{L,X}^Q(g)` at any place.
pub fn weight_at_g(data: &OrbitData, g: &QMatrix, l: &Levi, qp: &Parabolic, v: Place) -> Result<f64> {
    if let Place::Padic(p) = v {
        return Ok(weight_exact(data, g, l, qp, p)?.to_f64());
    }
    let fam = weight_family(data, g, v)?;
    let lam: Vec<f64> = default_direction(l, qp)?.iter().map(to_f64).collect();
    gm_value(&GMFamily::exponential(fam), l, qp, &lam)
}

/// `v_{L,X}^Q` at a conjugator of `Y`. Several places combine through the
/// sum of their `R_P` vectors, as for a semi-local group.
pub fn weight_at_point(data: &OrbitData, y: &QMatrix, l: &Levi, qp: &Parabolic, places: &[Place]) -> Result<f64> {
    let g = conjugator_from_x(data, y)?;
    match places {
        [] => Err(Error::InvalidInput("no place given".into())),
        [v] => weight_at_g(data, &g, l, qp, *v),
        _ => {
            let mut total: Option<Vec<LogVec>> = None;
            for &v in places {
                let f = r_family(data, &g, v)?;
                total = Some(match total {
                    None => f,
                    Some(t) => t.iter().zip(&f).map(|(a, b)| a.add(b)).collect::<Result<_>>()?,
                });
            }
            let pts = total
                .unwrap_or_default()
                .iter()
                .map(|x| x.to_f64().iter().map(|&f| Q::from_f64(f).unwrap_or_else(Q::zero)).collect())
                .collect();
            let fam = OrthogonalFamily::new(data.m.clone(), pts, 1.0)?;
            let lam: Vec<f64> = default_direction(l, qp)?.iter().map(to_f64).collect();
            gm_value(&GMFamily::exponential(fam), l, qp, &lam)
        }
    }
}

/// The rectangular orbit `(d^r)` with its orbit data.
fn rectangular_data(r: usize, d: usize) -> Result<OrbitData> {
    if r == 0 || d == 0 {
        return Err(Error::InvalidInput("r and d must be positive".into()));
    }
    OrbitData::new(&NilpotentOrbit::new(Partition::new(vec![r; d])))
}

/// The zeta-ratio family `P₀^w ↦ ∏_ϖ Z_d(d + ⟨w·λ, ϖ^∨⟩)/Z_d(d)` of a
/// rectangular orbit, the product running over the fundamental coweights
/// of `P₀` in `a_M^G`.
///
/// The coweights are taken dual to the determinant characters
/// `det_i − det_{i+1}` of `M = GL(d)^r`, which are `d` times the restricted
/// roots. With this normalization `exp⟨λ, −R_{P₀}(g)⟩ = ∏_i |det B_i|^{⟨λ,ϖ_i^∨⟩}`
/// for the superdiagonal blocks `B_i` of `Ad(g^{-1})X`.
pub fn rectangular_family(data: &OrbitData, backend: &ZetaBackend) -> Result<GMFamily> {
    if !data.orbit.is_rectangular() {
        return Err(Error::InvalidInput("orbit is not rectangular".into()));
    }
    let d = data.orbit.dj(data.orbit.r);
    let n = data.n();
    let coweights: Vec<Vec<f64>> = data
        .p0
        .root_data(&Parabolic::whole(n))?
        .copoids
        .iter()
        .map(|c| to_f64_vec(c).iter().map(|x| x / d as f64).collect())
        .collect();
    let norm = z_value(backend, d, d as f64)?;
    let p0 = data.p0.clone();
    let backend = backend.clone();
    let f: JetFn = Arc::new(move |p: &Parabolic, lambda: &[f64], order: usize| {
        let w = matching_permutation(&p0, p)?;
        let wl = weyl_vector(&w, lambda);
        let mut jet = Jet::constant(1.0, order);
        for c in &coweights {
            jet = jet * z_jet(&backend, d, d as f64, dot_f(&wl, c), order)?.scale(&(1.0 / norm));
        }
        Ok(jet)
    });
    Ok(GMFamily::custom(data.m.clone(), f))
}

/// `𝒥_L` for the rectangular orbit `(d^r)`: the value at `L` of the
/// zeta-ratio family. Equals 1 for `L = G`.
pub fn j_rectangular(r: usize, d: usize, l: &Levi, backend: &ZetaBackend) -> Result<f64> {
    let data = rectangular_data(r, d)?;
    let fam = rectangular_family(&data, backend)?;
    let g = Parabolic::whole(data.n());
    let lam: Vec<f64> = default_direction(l, &g)?.iter().map(to_f64).collect();
    gm_value(&fam, l, &g, &lam)
}

/// The sum `Σ_{m ≥ 1} m·q^{−m}(1 − q^{−1})·√2·log q` in closed form.
pub fn gl2_closed_form(q: u64) -> f64 {
    let x = 1.0 / q as f64;
    2f64.sqrt() * (q as f64).ln() * x / (1.0 - x)
}

/// A stratified evaluation of `∫_{𝔫_{P₀}(ℤ_q)} v_{L,X}^Q(U) dU`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NumericIntegral {
    /// Truncated sum plus the renewal tail.
    pub estimate: f64,
    /// Exact sum over the strata of total valuation at most `depth`.
    pub truncated: f64,
    /// Contribution of deeper strata, summed through the weight polynomial.
    pub tail: f64,
    /// Geometric bound on the mass the truncated sum leaves out.
    pub tail_bound: f64,
    pub depth: usize,
    pub strata: usize,
    /// The weight is a polynomial of the block determinant valuations on
    /// every stratum computed.
    pub polynomial_verified: bool,
    /// Perturbed representatives (other Smith bases, nonzero higher blocks)
    /// give the same weight as the block-diagonal ones.
    pub representatives_agree: bool,
}

impl NumericIntegral {
    pub fn relative_tail_bound(&self) -> f64 {
        if self.estimate == 0.0 {
            self.tail_bound
        } else {
            self.tail_bound / self.estimate.abs()
        }
    }
}

/// Smith types `(a ≤ b ≤ …)` of `d × d` integral matrices with
/// `v(det) = s`, with their exact Haar volumes for `x = 1/q`.
pub fn smith_strata(d: usize, s: usize, x: &Q) -> Result<Vec<(Vec<usize>, Q)>> {
    let one = q(1);
    match d {
        1 => Ok(vec![(vec![s], (&one - x) * pow_q(x, s))]),
        2 => {
            let mut out = Vec::new();
            for a in 0..=s / 2 {
                let b = s - a;
                let scale = pow_q(x, 4 * a);
                let x2 = x * x;
                let prim = if a == b {
                    (&one - x) * (&one - &x2)
                } else {
                    (&one - &x2) * (&one - &x2) * pow_q(x, b - a)
                };
                out.push((vec![a, b], scale * prim));
            }
            Ok(out)
        }
        _ => Err(Error::InvalidInput("the numeric oracle handles block size d ≤ 2".into())),
    }
}

fn pow_q(x: &Q, e: usize) -> Q {
    let mut out = q(1);
    for _ in 0..e {
        out *= x;
    }
    out
}

/// `P(v(det A) = s)` for Haar-random `A ∈ M_d(ℤ_q)`.
fn det_valuation_mass(d: usize, s: usize, x: &Q) -> Result<Q> {
    Ok(smith_strata(d, s, x)?.into_iter().map(|(_, v)| v).sum())
}

/// Monomials of total degree at most `k` in `m` variables.
fn monomials(m: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        let used: usize = cur.iter().sum();
        for e in 0..=k - used {
            cur.push(e);
            rec(m, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, k, &mut Vec::new(), &mut out);
    out
}

/// All `s ∈ ℕ^m` with `Σ s_i ≤ depth`.
fn profiles(m: usize, depth: usize) -> Vec<Vec<usize>> {
    monomials(m, depth)
}

fn eval_monomial(e: &[usize], s: &[usize]) -> Q {
    let mut out = q(1);
    for (&ei, &si) in e.iter().zip(s) {
        for _ in 0..ei {
            out *= q(si as i64);
        }
    }
    out
}

/// The element of `𝔫_{P₀}` whose superdiagonal blocks are `X_{i,i+1}·B_i`
/// and whose higher blocks are `h`.
fn assemble(data: &OrbitData, b: &[QMatrix], higher: Option<&QMatrix>) -> QMatrix {
    let n = data.n();
    let r = data.orbit.r;
    let mut u = QMatrix::zeros(n, n);
    for i in 1..r {
        let rows = data.layout.layer(i);
        let cols = data.layout.layer(i + 1);
        let xb = data.x.submatrix(&rows, &cols);
        let blk = xb.mul(&b[i - 1]);
        for (a, &ra) in rows.iter().enumerate() {
            for (c, &cc) in cols.iter().enumerate() {
                u[(ra, cc)] = blk[(a, c)].clone();
            }
        }
    }
    if let Some(h) = higher {
        let layer_of: Vec<usize> = (0..n).map(|p| data.layout.label(p).0).collect();
        for a in 0..n {
            for c in 0..n {
                if layer_of[c] >= layer_of[a] + 2 {
                    u[(a, c)] = h[(a, c)].clone();
                }
            }
        }
    }
    u
}

/// Fixed unimodular integral matrices used to move a Smith representative
/// inside its double coset.
fn unimodular(d: usize, seed: i64) -> QMatrix {
    let mut m = QMatrix::identity(d);
    for a in 0..d {
        for c in (a + 1)..d {
            m[(a, c)] = q((seed + 2 * a as i64 + 3 * c as i64) % 5 + 1);
        }
    }
    if d >= 2 {
        // A lower unipotent factor keeps the determinant equal to 1.
        let mut low = QMatrix::identity(d);
        low[(d - 1, 0)] = q(seed % 3 + 1);
        m = low.mul(&m);
    }
    m
}

/// `c_X^{-1}·J_{L,X}^Q(𝟏_q)` for a rectangular orbit by stratification.
///
/// The strata are the Smith types of the superdiagonal blocks `B_i` of
/// `U ∈ 𝔫_{P₀}(ℤ_q)`; the higher blocks range over integral matrices and
/// contribute volume 1. Profiles with `Σ v(det B_i) ≤ depth` are summed
/// exactly, one weight per stratum. Scaling the blocks by powers of `q`
/// amounts to conjugating by a block-diagonal element of `M(F)`, which
/// shifts every `R_P` by a linear function of the determinant valuations,
/// so the weight is a polynomial of degree `dim a_L^Q` in those valuations.
/// That polynomial is recovered from the computed strata, checked on all
/// of them, and carries the tail.
pub fn j_numeric_padic(o: &NilpotentOrbit, l: &Levi, qp: &Parabolic, prime: u64, depth: usize) -> Result<NumericIntegral> {
    if !o.is_rectangular() {
        return Err(Error::InvalidInput("the numeric oracle handles rectangular orbits".into()));
    }
    if !crate::localfield::is_prime(prime) {
        return Err(Error::InvalidInput(format!("{prime} is not prime")));
    }
    let data = OrbitData::new(o)?;
    if !data.m.is_contained_in(l) || !l.is_contained_in(&qp.levi()) {
        return Err(Error::InvalidInput("need M ⊆ L ⊆ M_Q".into()));
    }
    let d = o.dj(o.r);
    let r = o.r;
    let nb = r - 1;
    let k = l.rank() - qp.num_blocks();
    let x = qf(1, prime as i64);
    let lam = default_direction(l, qp)?;
    let mut truncated = Q::zero();
    let mut covolume_sq = q(1);
    let mut samples: Vec<(Vec<usize>, Q)> = Vec::new();
    let mut agree = true;
    let mut strata = 0usize;
    let weight_of = |u: &QMatrix| -> Result<(Q, Q)> {
        let g = conjugator_from_x(&data, u)?;
        let fam = weight_family(&data, &g, Place::Padic(prime))?;
        gm_value_exact(&fam, l, qp, &lam)
    };
    for s in profiles(nb, depth) {
        let per_block: Vec<Vec<(Vec<usize>, Q)>> = s.iter().map(|&si| smith_strata(d, si, &x)).collect::<Result<_>>()?;
        let mut idx = vec![0usize; nb];
        let mut level: Option<Q> = None;
        loop {
            let mut vol = q(1);
            let mut diag = Vec::with_capacity(nb);
            for (bi, &ii) in idx.iter().enumerate() {
                let (ty, v) = &per_block[bi][ii];
                vol *= v;
                let mut dm = QMatrix::zeros(d, d);
                for (a, &e) in ty.iter().enumerate() {
                    dm[(a, a)] = qpow(prime, e as i64);
                }
                diag.push(dm);
            }
            let u = assemble(&data, &diag, None);
            let (w, cov) = weight_of(&u)?;
            covolume_sq = cov;
            // A second representative of the same stratum.
            let moved: Vec<QMatrix> =
                diag.iter().enumerate().map(|(i, dm)| unimodular(d, i as i64 + 1).mul(dm).mul(&unimodular(d, i as i64 + 4))).collect();
            let mut h = QMatrix::zeros(data.n(), data.n());
            for a in 0..data.n() {
                for c in 0..data.n() {
                    h[(a, c)] = q(((a * 7 + c * 3) % 4) as i64) * q(prime as i64 + 1);
                }
            }
            let u2 = assemble(&data, &moved, Some(&h));
            let (w2, _) = weight_of(&u2)?;
            agree &= w2 == w;
            if let Some(prev) = &level {
                agree &= *prev == w;
            }
            level = Some(w.clone());
            truncated += &w * &vol;
            strata += 1;
            let mut b = 0;
            loop {
                if b == nb {
                    break;
                }
                idx[b] += 1;
                if idx[b] < per_block[b].len() {
                    break;
                }
                idx[b] = 0;
                b += 1;
            }
            if b == nb {
                break;
            }
        }
        samples.push((s, level.unwrap_or_else(Q::zero)));
    }
    // Recover the weight polynomial in the determinant valuations.
    let mons = monomials(nb, k);
    let rows: Vec<Vec<Q>> = samples.iter().map(|(s, _)| mons.iter().map(|e| eval_monomial(e, s)).collect()).collect();
    let a = QMatrix::from_rows(rows)?;
    let rhs: Vec<Q> = samples.iter().map(|(_, w)| w.clone()).collect();
    let at = a.transpose();
    let ata = at.mul(&a);
    let atb: Vec<Q> = (0..mons.len()).map(|i| (0..rhs.len()).map(|j| &at[(i, j)] * &rhs[j]).sum()).collect();
    let coef = ata.solve(&atb).ok_or_else(|| Error::InvalidInput("depth too small to determine the weight polynomial".into()))?;
    let polynomial_verified = samples.iter().all(|(s, w)| {
        let v: Q = mons.iter().zip(&coef).map(|(e, c)| c * eval_monomial(e, s)).sum();
        v == *w
    });
    // Moments Σ_s s^j·P(v(det) = s), summed until the terms vanish in f64.
    let xf = 1.0 / prime as f64;
    let s_max = ((60.0 + 10.0 * k as f64) / -xf.log10()).ceil() as usize + 40;
    let masses: Vec<f64> = (0..=s_max).map(|s| det_valuation_mass(d, s, &x).map(|m| to_f64(&m))).collect::<Result<_>>()?;
    let moment = |j: usize| -> f64 { masses.iter().enumerate().map(|(s, m)| (s as f64).powi(j as i32) * m).sum() };
    let moments: Vec<f64> = (0..=k).map(moment).collect();
    let full = |abs: bool| -> f64 {
        mons.iter()
            .zip(&coef)
            .map(|(e, c)| {
                let c = if abs { to_f64(c).abs() } else { to_f64(c) };
                c * e.iter().map(|&ei| moments[ei]).product::<f64>()
            })
            .sum()
    };
    let within = |abs: bool| -> Result<f64> {
        let mut t = 0.0;
        for (s, _) in &samples {
            let mut mass = 1.0;
            for &si in s {
                mass *= to_f64(&det_valuation_mass(d, si, &x)?);
            }
            let v: f64 = mons
                .iter()
                .zip(&coef)
                .map(|(e, c)| {
                    let c = if abs { to_f64(c).abs() } else { to_f64(c) };
                    c * to_f64(&eval_monomial(e, s))
                })
                .sum();
            t += v * mass;
        }
        Ok(t)
    };
    let tail_ratio = full(false) - within(false)?;
    let bound_ratio = (full(true) - within(true)?).max(0.0);
    let unit = to_f64(&covolume_sq).sqrt() * (prime as f64).ln().powi(k as i32);
    let truncated = to_f64(&truncated) * unit;
    let tail = tail_ratio * unit;
    Ok(NumericIntegral {
        estimate: truncated + tail,
        truncated,
        tail,
        tail_bound: bound_ratio * unit.abs(),
        depth,
        strata,
        polynomial_verified,
        representatives_agree: agree,
    })
}

fn one_based(l: &Levi) -> Vec<Vec<usize>> {
    l.blocks().iter().map(|b| b.iter().map(|&a| a + 1).collect()).collect()
}

fn is_global(backend: &ZetaBackend) -> bool {
    matches!(backend, ZetaBackend::Global | ZetaBackend::Partial { .. })
}

/// Poles of global zeta values surface as divergence of the integral.
fn as_divergence(e: Error) -> Error {
    match e {
        Error::Pole(m) => Error::Divergence(m),
        other => other,
    }
}

/// Sizes of the blocks of `m` inside each block of `l`, in the order of the
/// blocks of `l`.
pub fn sizes_inside(m: &Levi, l: &Levi) -> Result<Vec<Vec<usize>>> {
    if !m.is_contained_in(l) {
        return Err(Error::InvalidInput("need M ⊆ L".into()));
    }
    Ok(l.blocks()
        .iter()
        .map(|lb| m.blocks().iter().filter(|b| lb.contains(&b[0])).map(|b| b.len()).collect())
        .collect())
}

/// Rank-one data of the orbit induced from `GL(a) × GL(b)`, oriented so
/// that the first parabolic has its block of size `a` first.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankOne {
    pub r1: usize,
    pub r2: usize,
    /// `‖α^∨‖` for the coroot separating the two blocks.
    pub coroot_norm: f64,
}

pub fn rank_one(a: usize, b: usize) -> Result<RankOne> {
    let o = NilpotentOrbit::new(crate::orbits::richardson_orbit(&[a, b])?);
    let data = OrbitData::new(&o)?;
    let (p, p2) = crate::richardson::adjacent_pairs(&data)
        .into_iter()
        .next()
        .ok_or_else(|| Error::Internal("a rank-one Levi has one adjacent pair".into()))?;
    let (p1, p2) = if p.blocks()[0].len() == a { (p, p2) } else { (p2, p) };
    let adj = crate::richardson::adjacency(&data, &p1, &p2)?;
    Ok(RankOne { r1: adj.r1, r2: adj.r2, coroot_norm: to_f64(&dot(&adj.coroot, &adj.coroot)).sqrt() })
}

/// `J_{M'}^{L'}((0), 𝟏)` for `L' = GL(Σ sizes)` and `M'` the Levi with the
/// given ordered block sizes.
///
/// Equal sizes are the rectangular case. Two distinct sizes use the
/// rank-one formula `‖α^∨‖·(log Z_{r₁})′(r₁ + r₂)`. Three or more blocks of
/// mixed size have no closed form here.
pub fn block_factor(sizes: &[usize], backend: &ZetaBackend) -> Result<f64> {
    match sizes {
        [] | [_] => Ok(1.0),
        _ if sizes.iter().all(|&s| s == sizes[0]) => {
            let data = rectangular_data(sizes.len(), sizes[0])?;
            j_rectangular(sizes.len(), sizes[0], &data.m, backend).map_err(as_divergence)
        }
        [a, b] => {
            let ro = rank_one(*a, *b)?;
            if ro.r2 == 0 && is_global(backend) {
                return Err(Error::Divergence("Z_{r₁} at its pole".into()));
            }
            let ld = crate::zeta::z_log_derivative(backend, ro.r1, (ro.r1 + ro.r2) as f64).map_err(as_divergence)?;
            Ok(ro.coroot_norm * ld)
        }
        _ => Err(Error::Unsupported(format!("closed form for M-block sizes {sizes:?} inside one L-block"))),
    }
}

/// `J_M^L((0), 𝟏_L)`: the product of the block factors over the blocks of
/// `L`.
pub fn j_levi(m: &Levi, l: &Levi, backend: &ZetaBackend) -> Result<f64> {
    sizes_inside(m, l)?.iter().try_fold(1.0, |acc, s| Ok(acc * block_factor(s, backend)?))
}

/// Every reordering of the `M`-blocks inside each block of `L`, that is,
/// the size data of the `L`-conjugates of `M`.
fn reorderings(sizes: &[Vec<usize>]) -> Vec<Vec<Vec<usize>>> {
    let mut out: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
    for s in sizes {
        let mut perms: Vec<Vec<usize>> =
            crate::roots::permutations(s.len()).into_iter().map(|w| w.iter().map(|&i| s[i]).collect()).collect();
        perms.sort();
        perms.dedup();
        out = out
            .into_iter()
            .flat_map(|pre| {
                perms.iter().map(move |p| {
                    let mut v = pre.clone();
                    v.push(p.clone());
                    v
                })
            })
            .collect();
    }
    out
}

/// `J_L^G(𝔬_L, 𝟏)` with its variants over the admissible `w`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ArthurJ {
    pub levi: Vec<Vec<usize>>,
    pub value: f64,
    /// `(L^w, value)` for every `L^w ∈ ℒ(M)` conjugate to `L`, or for the
    /// two orientations of the rank-one pair when `L = M`.
    pub variants: Vec<(Vec<Vec<usize>>, f64)>,
    pub spread: f64,
    /// `c_X` at the same backend, when finite.
    pub c_x: Option<f64>,
}

fn spread(vals: &[f64]) -> f64 {
    let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if vals.is_empty() {
        0.0
    } else {
        hi - lo
    }
}

/// `J_L^G(𝔬_L, 𝟏) = c_X^{-1}·J_{L^w,X}^G(𝟏)` for `L ∈ ℒ(M)` and
/// `𝔬_L = I_M^L(0)`.
pub fn arthur_j(o: &NilpotentOrbit, l: &Levi, backend: &ZetaBackend) -> Result<ArthurJ> {
    let data = OrbitData::new(o)?;
    let m = &data.m;
    if !m.is_contained_in(l) {
        return Err(Error::InvalidInput("L must contain M".into()));
    }
    let n = o.n();
    let c_x = crate::zeta::c_constant(o, backend).ok().map(|c| c.value);
    let eval = |lw: &Levi| -> Result<f64> {
        if lw.rank() == 1 {
            Ok(1.0)
        } else if o.is_rectangular() {
            j_rectangular(o.r, o.dj(o.r), lw, backend).map_err(as_divergence)
        } else if lw == m {
            j_levi(m, &Levi::whole(n), backend)
        } else {
            Err(Error::Unsupported("J_L^G for a non-rectangular orbit and M ⊊ L ⊊ G".into()))
        }
    };
    let value = eval(l)?;
    let mut variants = Vec::new();
    if l == m && !o.is_rectangular() && m.rank() == 2 {
        let s = m.block_sizes();
        for sizes in [[s[0], s[1]], [s[1], s[0]]] {
            variants.push((one_based(m), block_factor(&sizes, backend)?));
        }
    } else {
        let key = |x: &Levi| -> Result<Vec<Vec<usize>>> {
            let mut k: Vec<Vec<usize>> = sizes_inside(m, x)?.into_iter().map(|mut s| {
                s.sort_unstable();
                s
            }).collect();
            k.sort();
            Ok(k)
        };
        let target = key(l)?;
        for lw in crate::roots::levis_containing(m) {
            if key(&lw)? == target {
                variants.push((one_based(&lw), eval(&lw)?));
            }
        }
    }
    let vals: Vec<f64> = variants.iter().map(|v| v.1).collect();
    Ok(ArthurJ { levi: one_based(l), value, spread: spread(&vals), variants, c_x })
}

/// Both sides of the descent identity `c_X^{-1}·J_{M,X}^Q(𝟏_q) = J_M^L((0), 𝟏_{q,L})`
/// for `Q ∈ 𝒫(L)` at one p-adic place.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DescentCheck {
    pub levi: Vec<Vec<usize>>,
    pub parabolic: Vec<Vec<usize>>,
    /// Full-group integral with the `Q`-cut weight.
    pub lhs: NumericIntegral,
    /// Product over the blocks of `L` of the block integrals, numerically.
    pub rhs_numeric: f64,
    pub rhs_bound: f64,
    /// The same product from the closed form.
    pub rhs_closed: f64,
    pub residual: f64,
    pub tolerance: f64,
    pub passes: bool,
}

pub fn descent_check(o: &NilpotentOrbit, l: &Levi, qp: &Parabolic, prime: u64, depth: usize) -> Result<DescentCheck> {
    if qp.levi() != *l {
        return Err(Error::InvalidInput("Q must lie in 𝒫(L)".into()));
    }
    let data = OrbitData::new(o)?;
    let lhs = j_numeric_padic(o, &data.m, qp, prime, depth)?;
    let mut rhs_numeric: f64 = 1.0;
    let mut rhs_bound: f64 = 0.0;
    let mut rhs_closed = 1.0;
    for sizes in sizes_inside(&data.m, l)? {
        if sizes.len() <= 1 {
            continue;
        }
        let sub = rectangular_data(sizes.len(), sizes[0])?;
        let part = j_numeric_padic(&sub.orbit, &sub.m, &Parabolic::whole(sub.n()), prime, depth)?;
        // |ab − a′b′| ≤ |a−a′|(|b|+δ_b) + |a|·δ_b, accumulated factor by factor.
        rhs_bound = rhs_bound * (part.estimate.abs() + part.tail_bound) + rhs_numeric.abs() * part.tail_bound;
        rhs_numeric *= part.estimate;
        rhs_closed *= j_rectangular(sizes.len(), sizes[0], &sub.m, &ZetaBackend::Padic(prime))?;
    }
    let residual = (lhs.estimate - rhs_numeric).abs().max((lhs.estimate - rhs_closed).abs());
    let tolerance = lhs.tail_bound + rhs_bound + 1e-9 * (1.0 + rhs_closed.abs());
    let passes = residual <= tolerance && lhs.polynomial_verified && lhs.representatives_agree;
    Ok(DescentCheck {
        levi: one_based(l),
        parabolic: qp.to_one_based(),
        lhs,
        rhs_numeric,
        rhs_bound,
        rhs_closed,
        residual,
        tolerance,
        passes,
    })
}

/// The hors-S value recomputed from a truncated Euler product.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EulerCheck {
    pub value: f64,
    pub tail_bound: f64,
    pub cutoff: u64,
}

/// `a^L(S, 𝔬_L) = vol(L₁(ℚ)\L₁(𝔸)^1)·J_{L₁}^L((0), 𝟏^S_L)` with `L₁ = M`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Coefficient {
    pub levi: Vec<Vec<usize>>,
    pub value: f64,
    pub vol: f64,
    /// `J_M^L((0), 𝟏^S_L)` from the partial zeta closed form.
    pub j: f64,
    /// Values over the `L`-conjugates `L₁` of `M`.
    pub l1_variants: Vec<f64>,
    pub l1_spread: f64,
    /// Present when some block of `L` carries a rank-one factor.
    pub euler: Option<EulerCheck>,
    /// Right-hand side of the majorization `|a^L| ≤ C·vol·sup_k (−1)^k Z^{(k)}/Z`.
    pub bound: f64,
    pub backend: ZetaBackend,
}

fn partial_backend(s: &[Place]) -> Result<ZetaBackend> {
    if !s.contains(&Place::Real) {
        return Err(Error::InvalidInput("S must contain the archimedean place".into()));
    }
    if s.contains(&Place::Complex) {
        return Err(Error::InvalidInput("ℚ has no complex place".into()));
    }
    let mut finite: Vec<u64> = s.iter().filter_map(Place::prime).collect();
    finite.sort_unstable();
    finite.dedup();
    Ok(ZetaBackend::Partial { finite })
}

/// The majorant of one block of `L`: `C·sup_{0≤k≤rank} (−1)^k Z^{(k)}/Z` at
/// `r₁ + r₂`, with `C = 1` in rank zero and `C = ‖α^∨‖` in rank one.
pub fn cor_maj_bound(sizes: &[usize], backend: &ZetaBackend) -> Result<f64> {
    match sizes {
        [] | [_] => Ok(1.0),
        [a, b] if a != b => {
            let ro = rank_one(*a, *b)?;
            let jet = z_jet(backend, ro.r1, (ro.r1 + ro.r2) as f64, 1.0, 1).map_err(as_divergence)?;
            Ok(ro.coroot_norm * 1f64.max(-jet.coef[1] / jet.coef[0]))
        }
        _ => Err(Error::Unsupported(format!("majorant for M-block sizes {sizes:?}"))),
    }
}

pub fn coefficient_a(o: &NilpotentOrbit, l: &Levi, s: &[Place], cutoff: u64) -> Result<Coefficient> {
    let backend = partial_backend(s)?;
    if !o.is_simple() {
        return Err(Error::Divergence(format!("orbit {:?} is not simple", o.partition.parts())));
    }
    let data = OrbitData::new(o)?;
    let m = &data.m;
    let sizes = sizes_inside(m, l)?;
    let vol = crate::zeta::vol_levi(&m.block_sizes())?;
    let j = j_levi(m, l, &backend)?;
    let mut l1_variants = Vec::new();
    for re in reorderings(&sizes) {
        l1_variants.push(vol * re.iter().try_fold(1.0, |acc, b| Ok::<f64, Error>(acc * block_factor(b, &backend)?))?);
    }
    let finite = match &backend {
        ZetaBackend::Partial { finite } => finite.clone(),
        _ => unreachable!(),
    };
    let mut euler: Option<EulerCheck> = None;
    let mut bound = vol;
    for b in &sizes {
        bound *= cor_maj_bound(b, &backend)?;
        if let [x, y] = b.as_slice() {
            let ro = rank_one(*x, *y)?;
            let s0 = (ro.r1 + ro.r2) as f64;
            let mut ld = 0.0;
            let mut tb = 0.0;
            for i in 0..ro.r1 {
                let e = crate::zeta::euler_log_jet(&finite, cutoff, s0 - i as f64, 1.0, 1)?;
                ld += e.log_jet.coef[1];
                tb += e.tail_bounds[1];
            }
            let prev = euler.take().unwrap_or(EulerCheck { value: vol, tail_bound: 0.0, cutoff });
            let f = ro.coroot_norm * ld;
            let fb = ro.coroot_norm * tb;
            euler = Some(EulerCheck {
                value: prev.value * f,
                tail_bound: prev.tail_bound * (f.abs() + fb) + prev.value.abs() * fb,
                cutoff,
            });
        }
    }
    Ok(Coefficient {
        levi: one_based(l),
        value: vol * j,
        vol,
        j,
        l1_spread: spread(&l1_variants),
        l1_variants,
        euler,
        bound,
        backend,
    })
}

/// One term `(|W^L|/|W|)·a^L(S, 𝔬_L)·J_L^G(𝔬_L, ·)` of the development.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DevelopmentTerm {
    pub levi: Vec<Vec<usize>>,
    /// `𝔬_L` as one partition per block of `L`.
    pub orbit: Vec<Vec<usize>>,
    pub weyl_factor: f64,
    pub coefficient: Option<Coefficient>,
    /// Why the coefficient is missing, if it is.
    pub note: Option<String>,
    /// The Levi `L₁` with `I_{L₁}^L(0) = 𝔬_L`.
    pub reference_levi: Vec<Vec<usize>>,
    /// The semi-local factor that multiplies the coefficient.
    pub slot: String,
}

pub fn development(o: &NilpotentOrbit, s: &[Place], cutoff: u64) -> Result<Vec<DevelopmentTerm>> {
    if !o.is_simple() {
        return Err(Error::Divergence(format!("orbit {:?} is not simple", o.partition.parts())));
    }
    partial_backend(s)?;
    let data = OrbitData::new(o)?;
    let m = &data.m;
    let n = o.n();
    let w: f64 = (1..=n).map(|i| i as f64).product();
    let mut out = Vec::new();
    for l in crate::roots::levis_containing(m) {
        let sizes = sizes_inside(m, &l)?;
        let orbit: Vec<Partition> = sizes.iter().map(|b| crate::orbits::richardson_orbit(b)).collect::<Result<_>>()?;
        let induced = crate::orbits::induce_orbit(&l.block_sizes(), &orbit)?;
        if induced != o.partition {
            return Err(Error::Internal("𝔬_L does not induce to the ambient orbit".into()));
        }
        let (coefficient, note) = match coefficient_a(o, &l, s, cutoff) {
            Ok(c) => (Some(c), None),
            Err(e) => (None, Some(e.to_string())),
        };
        let orbit: Vec<Vec<usize>> = orbit.iter().map(|p| p.parts().to_vec()).collect();
        let slot = format!("arthur_j(L={:?}, o_L={:?})", one_based(&l), orbit);
        out.push(DevelopmentTerm {
            levi: one_based(&l),
            orbit,
            weyl_factor: l.weyl_order() as f64 / w,
            coefficient,
            note,
            reference_levi: one_based(m),
            slot,
        });
    }
    Ok(out)
}

/// One summand `d_M^{M_Q}(L₁,L₂)·v_M^{Q₁}(T)·J_M^{L₂}((0), 𝟏)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TTerm {
    pub l1: Vec<Vec<usize>>,
    pub l2: Vec<Vec<usize>>,
    pub q1: Vec<Vec<usize>>,
    pub q2: Vec<Vec<usize>>,
    pub splitting: f64,
    pub j: f64,
    pub weight_degree: usize,
}

/// `J_𝔬^{Q,T}(𝟏)` as a polynomial in `T`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GlobalWeighted {
    pub vol: f64,
    pub terms: Vec<TTerm>,
    /// Monomial exponents in `T_1, …, T_n` and their coefficients.
    pub polynomial: Vec<(Vec<u32>, f64)>,
    pub degree: usize,
    pub value: f64,
}

/// `vol(G_X(ℚ)\G_X(𝔸)^1)·J_{M,X}^{Q,T}(𝟏)` for a simple orbit.
///
/// The weight `v_M^Q(g, T)` is the value of the product of the families
/// `e^{⟨λ,T_P⟩}` and `e^{⟨λ,−R_P(g)⟩}`; the splitting formula separates the
/// two, and descent turns each `J_{M,X}^{Q₂}` into `c_X·J_M^{L₂}((0), 𝟏)`.
/// The volume of `G_X` times `c_X` is `vol_levi(M)`.
pub fn global_weighted_t(o: &NilpotentOrbit, l: &Levi, qp: &Parabolic, t: &[Q]) -> Result<GlobalWeighted> {
    if !o.is_simple() {
        return Err(Error::Divergence(format!("orbit {:?} is not simple", o.partition.parts())));
    }
    let data = OrbitData::new(o)?;
    let m = &data.m;
    if l != m {
        return Err(Error::Unsupported("global weighted integrals with L ≠ M".into()));
    }
    if t.len() != o.n() {
        return Err(Error::SizeMismatch("T must have n coordinates".into()));
    }
    let lq = qp.levi();
    if !m.is_contained_in(&lq) {
        return Err(Error::InvalidInput("need M ⊆ M_Q".into()));
    }
    let vol = crate::zeta::vol_levi(&m.block_sizes())?;
    let xi = default_direction(m, qp)?;
    let levis: Vec<Levi> = crate::roots::levis_containing(m).into_iter().filter(|x| x.is_contained_in(&lq)).collect();
    let mut terms = Vec::new();
    let mut poly: std::collections::BTreeMap<Vec<u32>, f64> = std::collections::BTreeMap::new();
    let tf: Vec<f64> = t.iter().map(to_f64).collect();
    let mut value = 0.0;
    for l1 in &levis {
        for l2 in &levis {
            let d = crate::gmfam::splitting(m, &lq, l1, l2)?;
            if d == 0.0 {
                continue;
            }
            let (q1, q2) = crate::gmfam::split_parabolics(qp, l1, l2, &xi)?;
            let j = j_levi(m, l2, &ZetaBackend::Global)?;
            let wp = crate::gmfam::weight_t_polynomial(m, &q1, &default_direction(m, &q1)?)?;
            for (c, p) in &wp.terms {
                let f = d * j * vol * to_f64(c).sqrt();
                for (e, coef) in &p.terms {
                    *poly.entry(e.clone()).or_insert(0.0) += f * to_f64(coef);
                }
            }
            value += d * j * vol * wp.eval(&tf);
            terms.push(TTerm {
                l1: one_based(l1),
                l2: one_based(l2),
                q1: q1.to_one_based(),
                q2: q2.to_one_based(),
                splitting: d,
                j,
                weight_degree: wp.degree,
            });
        }
    }
    let polynomial: Vec<(Vec<u32>, f64)> = poly.into_iter().filter(|(_, c)| *c != 0.0).collect();
    let degree = polynomial.iter().map(|(e, _)| e.iter().sum::<u32>() as usize).max().unwrap_or(0);
    Ok(GlobalWeighted { vol, terms, polynomial, degree, value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roots::parabolics_of;

    fn orbit(s: &str) -> NilpotentOrbit {
        NilpotentOrbit::parse(s).unwrap()
    }

    #[test]
    fn gl2_matches_geometric_series() {
        for p in [2u64, 3, 5, 7] {
            let v = j_rectangular(2, 1, &Levi::torus(2), &ZetaBackend::Padic(p)).unwrap();
            assert!((v.abs() - gl2_closed_form(p)).abs() < 1e-12, "p = {p}");
            assert!(v < 0.0);
        }
    }

    #[test]
    fn whole_group_is_trivial() {
        for (r, d) in [(2, 1), (3, 1), (2, 2)] {
            let g = Levi::whole(r * d);
            assert!((j_rectangular(r, d, &g, &ZetaBackend::Padic(3)).unwrap() - 1.0).abs() < 1e-12);
            let data = rectangular_data(r, d).unwrap();
            let num = j_numeric_padic(&data.orbit, &g, &Parabolic::whole(r * d), 3, 3).unwrap();
            assert!((num.estimate - 1.0).abs() < 1e-12);
            assert!(num.truncated < 1.0 && num.polynomial_verified);
        }
    }

    #[test]
    fn smith_volumes_match_counts_mod_16() {
        // Count 2×2 matrices over ℤ/16 by (min valuation, v(det)).
        let n = 16i64;
        let v2 = |x: i64| -> usize {
            if x % n == 0 {
                4
            } else {
                (x.rem_euclid(n)).trailing_zeros() as usize
            }
        };
        let mut counts = std::collections::BTreeMap::new();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let lo = v2(a).min(v2(b)).min(v2(c)).min(v2(d));
                        let det = v2(a * d - b * c);
                        *counts.entry((lo, det)).or_insert(0i64) += 1;
                    }
                }
            }
        }
        let x = qf(1, 2);
        for s in 0..4 {
            for (ty, vol) in smith_strata(2, s, &x).unwrap() {
                let got = counts.get(&(ty[0], s)).copied().unwrap_or(0);
                assert_eq!(qf(got, n.pow(4)), vol, "type {ty:?}");
            }
        }
        // Masses of v(det) sum to one.
        let total: Q = (0..200).map(|s| det_valuation_mass(2, s, &qf(1, 3)).unwrap()).sum();
        assert!((to_f64(&total) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn weight_at_standard_point() {
        let o = orbit("3,1");
        let data = OrbitData::new(&o).unwrap();
        for qp in parabolics_of(&data.m) {
            let w = weight_at_point(&data, &data.x, &data.m, &qp, &[Place::Padic(2)]).unwrap();
            assert!((w - 1.0).abs() < 1e-12);
        }
        // GL(2): |v_M(u)| = √2·|log|u|_p|.
        let g2 = OrbitData::new(&orbit("2")).unwrap();
        let mut y = g2.x.clone();
        y[(0, 1)] = q(8);
        let g = Parabolic::whole(2);
        let w = weight_at_point(&g2, &y, &g2.m, &g, &[Place::Padic(2)]).unwrap();
        assert!((w.abs() - 2f64.sqrt() * 3.0 * 2f64.ln()).abs() < 1e-12);
        let at_x = weight_at_point(&g2, &g2.x, &g2.m, &g, &[Place::Padic(2)]).unwrap();
        assert!(at_x.abs() < 1e-12);
    }

    #[test]
    fn rank_one_agrees_with_rectangular() {
        for d in 1..=2 {
            for p in [2u64, 5] {
                let data = rectangular_data(2, d).unwrap();
                let rect = j_rectangular(2, d, &data.m, &ZetaBackend::Padic(p)).unwrap();
                let ro = rank_one(d, d).unwrap();
                let direct = ro.coroot_norm * crate::zeta::z_log_derivative(&ZetaBackend::Padic(p), ro.r1, ro.r1 as f64).unwrap();
                assert!((rect - direct).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn descent_on_gl3() {
        let o = orbit("3");
        let data = OrbitData::new(&o).unwrap();
        for l in crate::roots::levis_containing(&data.m) {
            for qp in parabolics_of(&l) {
                let c = descent_check(&o, &l, &qp, 3, 5).unwrap();
                assert!(c.passes, "L = {:?}, Q = {:?}", l, qp);
            }
        }
    }

    #[test]
    fn development_of_2_1() {
        let o = orbit("2,1");
        let s = [Place::Real, Place::Padic(2)];
        let dev = development(&o, &s, 1000).unwrap();
        assert_eq!(dev.len(), 2);
        let m_term = dev.iter().find(|t| t.levi.len() == 2).unwrap();
        let vol = crate::zeta::vol_levi(&[2, 1]).unwrap();
        assert_eq!(m_term.coefficient.as_ref().unwrap().value, vol);
        let g_term = dev.iter().find(|t| t.levi.len() == 1).unwrap();
        assert_eq!(g_term.weyl_factor, 1.0);
        let a = g_term.coefficient.as_ref().unwrap();
        assert!(a.l1_spread < 1e-8);
        assert!(a.value.abs() <= a.bound);
        let e = a.euler.as_ref().unwrap();
        assert!((e.value - a.value).abs() <= e.tail_bound);
    }

    #[test]
    fn coefficient_preconditions() {
        let m = OrbitData::new(&orbit("2,1")).unwrap().m;
        let err = coefficient_a(&orbit("2,1"), &m, &[Place::Padic(2)], 100).unwrap_err();
        assert_eq!(err.code(), "invalid_input");
        let t = Levi::torus(2);
        let err = coefficient_a(&orbit("2"), &t, &[Place::Real], 100).unwrap_err();
        assert_eq!(err.code(), "divergence");
        assert!(development(&orbit("2"), &[Place::Real], 100).is_err());
    }

    #[test]
    fn global_t_polynomial() {
        let o = orbit("2,1");
        let data = OrbitData::new(&o).unwrap();
        let g = Parabolic::whole(3);
        let zero = global_weighted_t(&o, &data.m, &g, &[q(0), q(0), q(0)]).unwrap();
        let direct = crate::zeta::vol_levi(&[2, 1]).unwrap() * j_levi(&data.m, &Levi::whole(3), &ZetaBackend::Global).unwrap();
        assert!((zero.value - direct).abs() < 1e-12);
        let t = [q(1), q(-2), q(5)];
        let v = global_weighted_t(&o, &data.m, &g, &t).unwrap();
        assert!(v.degree <= data.m.dim_a_g());
        let tf: Vec<f64> = t.iter().map(to_f64).collect();
        let from_poly: f64 = v
            .polynomial
            .iter()
            .map(|(e, c)| c * e.iter().zip(&tf).map(|(&k, x)| x.powi(k as i32)).product::<f64>())
            .sum();
        assert!((from_poly - v.value).abs() < 1e-12);
        assert!(global_weighted_t(&orbit("2"), &Levi::torus(2), &Parabolic::whole(2), &[q(0), q(0)]).is_err());
    }

    #[test]
    fn arthur_j_is_w_independent() {
        let o = orbit("4");
        let m = Levi::torus(4);
        for l in crate::roots::levis_containing(&m) {
            let a = arthur_j(&o, &l, &ZetaBackend::Padic(2)).unwrap();
            assert!(a.spread <= 1e-9 * (1.0 + a.value.abs()), "{:?}", a.variants);
        }
    }
}
