//! Orthogonal families, (G,M)-families and their values.
//!
//! Vectors of `a_0 = ℝ^n` are written in the standard coordinates; `a_M` is
//! the subspace of vectors constant on the blocks of `M`. A dual vector `Λ`
//! is a vector of the same space through the standard pairing.

use crate::error::{Error, Result};
use crate::hull::Hull;
use crate::jet::Jet;
use crate::linalg::{q, to_f64, Q, QMatrix};
use crate::roots::{coroot_vector, dot, dot_f, gram, parabolics_in, parabolics_of, semistandard_of, Levi, Parabolic};
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

/// Pairs `(i, j, s)` of indices into `pm` with `pm[j]` obtained from `pm[i]`
/// by swapping blocks `s` and `s+1`. Each unordered pair appears twice.
pub fn adjacent_in(pm: &[Parabolic]) -> Vec<(usize, usize, usize)> {
    let index: HashMap<&Parabolic, usize> = pm.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let mut out = Vec::new();
    for (i, p) in pm.iter().enumerate() {
        for s in 0..p.num_blocks().saturating_sub(1) {
            let mut blocks = p.blocks().to_vec();
            blocks.swap(s, s + 1);
            let swapped = Parabolic::new(blocks).expect("valid");
            if let Some(&j) = index.get(&swapped) {
                out.push((i, j, s));
            }
        }
    }
    out
}

/// Points `Y_P ∈ a_M`, one per `P ∈ 𝒫(M)`, in exact coordinates. The
/// geometric points are `scale·Y_P` (for instance `scale = log p`).
#[derive(Clone, Debug, PartialEq)]
pub struct OrthogonalFamily {
    pub m: Levi,
    pub pm: Vec<Parabolic>,
    pub points: Vec<Vec<Q>>,
    pub scale: f64,
}

/// Result of the adjacency check on an orthogonal family.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthogonalityReport {
    pub orthogonal: bool,
    pub positive: bool,
    /// Coefficients `r` in `Y_P − Y_{P'} = r·α^∨`, one per ordered adjacent pair.
    pub coefficients: Vec<Option<Q>>,
}

impl OrthogonalFamily {
    pub fn new(m: Levi, points: Vec<Vec<Q>>, scale: f64) -> Result<Self> {
        let pm = parabolics_of(&m);
        if points.len() != pm.len() || points.iter().any(|p| p.len() != m.n()) {
            return Err(Error::SizeMismatch("one point of length n per P ∈ 𝒫(M)".into()));
        }
        let points = points.iter().map(|p| m.project(p)).collect();
        Ok(OrthogonalFamily { m, pm, points, scale })
    }

    /// Constant family at the origin.
    pub fn zero(m: Levi) -> Self {
        let k = parabolics_of(&m).len();
        let n = m.n();
        Self::new(m, vec![vec![Q::zero(); n]; k], 1.0).expect("sizes")
    }

    pub fn index_of(&self, p: &Parabolic) -> Option<usize> {
        self.pm.iter().position(|x| x == p)
    }

    pub fn point_f64(&self, i: usize) -> Vec<f64> {
        self.points[i].iter().map(|x| to_f64(x) * self.scale).collect()
    }

    /// Adjacent differences lie on coroot lines; signs give positivity.
    pub fn check(&self) -> OrthogonalityReport {
        let mut coefficients = Vec::new();
        for (i, j, s) in adjacent_in(&self.pm) {
            let b = self.pm[i].blocks();
            let line = coroot_vector(self.m.n(), &b[s], &b[s + 1]);
            let d: Vec<Q> = self.points[i].iter().zip(&self.points[j]).map(|(x, y)| x - y).collect();
            coefficients.push(crate::localfield::line_coefficient(&d, &line).or_else(|| d.iter().all(Q::is_zero).then(Q::zero)));
        }
        let orthogonal = coefficients.iter().all(Option::is_some);
        let positive = orthogonal && coefficients.iter().all(|c| !c.as_ref().unwrap().is_negative()) && self.scale >= 0.0;
        OrthogonalityReport { orthogonal, positive, coefficients }
    }

    pub fn is_positive(&self) -> bool {
        self.check().positive
    }

    /// `Y_Q` for `Q ∈ ℱ(M)`: projection to `a_Q` of any `Y_P` with `P ⊆ Q`.
    pub fn y_of(&self, qp: &Parabolic) -> Result<Vec<Q>> {
        let i = self
            .pm
            .iter()
            .position(|p| p.is_contained_in(qp))
            .ok_or_else(|| Error::InvalidInput("Q does not contain M".into()))?;
        Ok(qp.project(&self.points[i]))
    }

    /// The family `T_P = w·T` attached to `T ∈ a_0`: for `P` take the Borel
    /// ordering its blocks (indices ascending inside a block) and place `T_i`
    /// at the `i`-th index of that ordering; then project to `a_P`.
    pub fn from_t(m: Levi, t: &[Q]) -> Result<Self> {
        let pm = parabolics_of(&m);
        let points = pm.iter().map(|p| t_point(p, t)).collect::<Vec<_>>();
        Self::new(m, points, 1.0)
    }
}

/// `T_P` of [`OrthogonalFamily::from_t`] for a single parabolic.
pub fn t_point(p: &Parabolic, t: &[Q]) -> Vec<Q> {
    let order: Vec<usize> = p.blocks().iter().flat_map(|b| b.iter().copied()).collect();
    let mut v = vec![Q::zero(); t.len()];
    for (i, &a) in order.iter().enumerate() {
        v[a] = t[i].clone();
    }
    p.project(&v)
}

/// Generator of the jets `t ↦ c_P(tΛ)`.
pub type JetFn = Arc<dyn Fn(&Parabolic, &[f64], usize) -> Result<Jet<f64>> + Send + Sync>;

#[derive(Clone)]
pub enum FamilyKind {
    /// `c_P(Λ) = exp⟨Λ, Y_P⟩`.
    Exponential(OrthogonalFamily),
    Product(Box<GMFamily>, Box<GMFamily>),
    Custom(JetFn),
}

/// A (G,M)-family given by its jets along lines through the origin.
#[derive(Clone)]
pub struct GMFamily {
    pub m: Levi,
    pub pm: Vec<Parabolic>,
    pub kind: FamilyKind,
}

impl fmt::Debug for GMFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.kind {
            FamilyKind::Exponential(_) => "exponential",
            FamilyKind::Product(..) => "product",
            FamilyKind::Custom(_) => "custom",
        };
        f.debug_struct("GMFamily").field("m", &self.m).field("kind", &kind).finish()
    }
}

impl GMFamily {
    pub fn exponential(fam: OrthogonalFamily) -> Self {
        GMFamily { m: fam.m.clone(), pm: fam.pm.clone(), kind: FamilyKind::Exponential(fam) }
    }

    pub fn product(a: GMFamily, b: GMFamily) -> Result<Self> {
        if a.m != b.m {
            return Err(Error::InvalidInput("product of families over different Levis".into()));
        }
        Ok(GMFamily { m: a.m.clone(), pm: a.pm.clone(), kind: FamilyKind::Product(Box::new(a), Box::new(b)) })
    }

    pub fn custom(m: Levi, f: JetFn) -> Self {
        GMFamily { pm: parabolics_of(&m), m, kind: FamilyKind::Custom(f) }
    }

    /// Jet of `t ↦ c_P(tΛ)` for `P ∈ 𝒫(M)`.
    pub fn jet(&self, p: &Parabolic, lambda: &[f64], order: usize) -> Result<Jet<f64>> {
        match &self.kind {
            FamilyKind::Exponential(fam) => {
                let i = fam.index_of(p).ok_or_else(|| Error::InvalidInput("P ∉ 𝒫(M)".into()))?;
                let s = dot_f(lambda, &fam.point_f64(i));
                Ok(Jet::affine(0.0, s, order).exp())
            }
            FamilyKind::Product(a, b) => Ok(a.jet(p, lambda, order)? * b.jet(p, lambda, order)?),
            FamilyKind::Custom(f) => f(p, lambda, order),
        }
    }

    /// Jet of `c_R` for `R ∈ 𝒫(L)`, `L ⊇ M`, through any `P ⊆ R` in `𝒫(M)`.
    pub fn jet_induced(&self, r: &Parabolic, lambda: &[f64], order: usize) -> Result<Jet<f64>> {
        let p = self
            .pm
            .iter()
            .find(|p| p.is_contained_in(r))
            .ok_or_else(|| Error::InvalidInput("R does not contain M".into()))?;
        self.jet(p, lambda, order)
    }
}

/// Orthogonal projection of `λ` onto `a_L^Q`.
pub fn project_to(l: &Levi, qp: &Parabolic, lambda: &[f64]) -> Vec<f64> {
    let n = lambda.len();
    let mut v = vec![0.0; n];
    for b in l.blocks() {
        let avg = b.iter().map(|&a| lambda[a]).sum::<f64>() / b.len() as f64;
        for &a in b {
            v[a] = avg;
        }
    }
    for b in qp.blocks() {
        let avg = b.iter().map(|&a| v[a]).sum::<f64>() / b.len() as f64;
        for &a in b {
            v[a] -= avg;
        }
    }
    v
}

/// A random direction in `a_L^Q` whose pairings with every root of the
/// parabolics in `𝒫^Q(L)` are bounded away from zero.
pub fn random_direction<R: Rng>(l: &Levi, qp: &Parabolic, rng: &mut R) -> Vec<f64> {
    let ps = parabolics_in(l, qp);
    loop {
        let raw: Vec<f64> = (0..l.n()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let lam = project_to(l, qp, &raw);
        let ok = ps.iter().all(|p| {
            p.root_data(qp)
                .map(|rd| rd.coroots.iter().all(|c| dot_f(&lam, &crate::roots::to_f64_vec(c)).abs() > 0.05))
                .unwrap_or(false)
        });
        if ok {
            return lam;
        }
    }
}

/// `v_L^Q = Σ_{P∈𝒫^Q(L)} a_k(P)·θ_P^Q(Λ)` with `a_k` the degree-`k` jet
/// coefficient of `c_P(tΛ)` and `k = dim a_L^Q`.
pub fn gm_value(fam: &GMFamily, l: &Levi, qp: &Parabolic, lambda: &[f64]) -> Result<f64> {
    if !fam.m.is_contained_in(l) || !l.is_contained_in(&qp.levi()) {
        return Err(Error::InvalidInput("need M ⊆ L ⊆ M_Q".into()));
    }
    let k = l.rank() - qp.num_blocks();
    let lam = project_to(l, qp, lambda);
    let mut total = 0.0;
    for p in parabolics_in(l, qp) {
        let jet = fam.jet_induced(&p, &lam, k)?;
        total += jet.get(k) * p.theta(qp, &lam)?;
    }
    Ok(total)
}

/// Exact value of the exponential family of `fam` at a rational direction.
/// Returns `(R, c)` with `v_L^Q = R·√c·scale^k`: the sum
/// `(1/k!)·Σ ⟨Λ,Y_P⟩^k / ∏⟨Λ,α^∨⟩` is rational and every `P ∈ 𝒫^Q(L)` shares
/// the same coroot lattice, of squared covolume `c`.
pub fn gm_value_exact(fam: &OrthogonalFamily, l: &Levi, qp: &Parabolic, lambda: &[Q]) -> Result<(Q, Q)> {
    if !fam.m.is_contained_in(l) || !l.is_contained_in(&qp.levi()) {
        return Err(Error::InvalidInput("need M ⊆ L ⊆ M_Q".into()));
    }
    let k = l.rank() - qp.num_blocks();
    let lam = project_out(qp, &l.project(lambda));
    let fact: Q = (1..=k as i64).map(q).product();
    let mut total = Q::zero();
    let mut cov = q(1);
    for p in parabolics_in(l, qp) {
        let rd = p.root_data(qp)?;
        cov = rd.covolume_sq.clone();
        let mut den = q(1);
        for c in &rd.coroots {
            let v = dot(&lam, c);
            if v.is_zero() {
                return Err(Error::SingularDirection);
            }
            den *= v;
        }
        let y = fam.y_of(&p)?;
        let mut num = q(1);
        let s = dot(&lam, &y);
        for _ in 0..k {
            num *= &s;
        }
        total += num / den;
    }
    Ok((total / fact, cov))
}

/// Remove the `a_Q` component of a vector.
fn project_out(qp: &Parabolic, v: &[Q]) -> Vec<Q> {
    let mut out = v.to_vec();
    for b in qp.blocks() {
        let avg: Q = b.iter().map(|&a| v[a].clone()).sum::<Q>() / q(b.len() as i64);
        for &a in b {
            out[a] -= &avg;
        }
    }
    out
}

/// Coordinates of `a_M^G` in the basis of simple coroots of the first
/// parabolic of `𝒫(M)`, with the squared covolume of that basis.
fn coordinates(m: &Levi) -> (Vec<Vec<Q>>, QMatrix, Q) {
    let basis = m.a_basis_in(&Levi::whole(m.n()));
    let g = gram(&basis);
    let gsq = if basis.is_empty() { q(1) } else { g.det() };
    (basis, g, gsq)
}

fn coords_of(basis: &[Vec<Q>], g: &QMatrix, y: &[Q]) -> Vec<Q> {
    if basis.is_empty() {
        return Vec::new();
    }
    let rhs: Vec<Q> = basis.iter().map(|b| dot(b, y)).collect();
    g.solve(&rhs).expect("independent basis")
}

/// Exact hull data of a family.
#[derive(Clone, Debug, PartialEq)]
pub struct HullVolume {
    /// Euclidean volume in `a_M^G`.
    pub volume: f64,
    /// Volume in coroot coordinates, exact.
    pub coordinate_volume: Q,
    /// Squared covolume converting coordinate volume to Euclidean volume.
    pub covolume_sq: Q,
    pub positive: bool,
}

fn hull_of(fam: &OrthogonalFamily) -> Hull {
    let (basis, g, _) = coordinates(&fam.m);
    let pts = fam
        .points
        .iter()
        .map(|y| {
            let y0 = project_g(y);
            coords_of(&basis, &g, &y0)
        })
        .collect();
    Hull::new(pts)
}

fn project_g(y: &[Q]) -> Vec<Q> {
    let avg: Q = y.iter().cloned().sum::<Q>() / q(y.len() as i64);
    y.iter().map(|x| x - &avg).collect()
}

/// Euclidean volume of the convex hull of `{scale·Y_P}` projected to `a_M^G`.
/// Non-positive families are accepted; the flag reports positivity.
pub fn hull_volume(fam: &OrthogonalFamily) -> HullVolume {
    let d = fam.m.rank() - 1;
    let coordinate_volume = hull_of(fam).volume();
    let (_, _, gsq) = coordinates(&fam.m);
    let volume = to_f64(&coordinate_volume) * to_f64(&gsq).sqrt() * fam.scale.powi(d as i32);
    HullVolume { volume, coordinate_volume, covolume_sq: gsq, positive: fam.is_positive() }
}

/// Strict geometric membership of `H` in the hull. `H` is in exact units of
/// the family (divide by `scale` first).
pub fn hull_indicator(fam: &OrthogonalFamily, h: &[Q]) -> Result<bool> {
    let (basis, g, _) = coordinates(&fam.m);
    hull_of(fam).contains(&coords_of(&basis, &g, &project_g(&fam.m.project(h))))
}

/// `Σ_{Q ∈ ℱ(M)} (−1)^{dim a_Q^G} τ̂_Q(H − Y_Q)`.
pub fn alternating_sum(fam: &OrthogonalFamily, h: &[Q]) -> Result<i64> {
    let mut total = 0i64;
    for qp in semistandard_of(&fam.m) {
        let y = fam.y_of(&qp)?;
        let d: Vec<Q> = h.iter().zip(&y).map(|(a, b)| a - b).collect();
        let rd = qp.root_data(&Parabolic::whole(fam.m.n()))?;
        let mut inside = true;
        for w in &rd.weights {
            let v = dot(w, &d);
            if v.is_zero() {
                return Err(Error::Boundary(format!("H − Y_Q on a wall of τ̂ for Q = {:?}", qp.to_one_based())));
            }
            inside &= v.is_positive();
        }
        if inside {
            total += if (qp.num_blocks() - 1) % 2 == 0 { 1 } else { -1 };
        }
    }
    Ok(total)
}

/// The splitting coefficient `d_M^L(L₁, L₂)`: absolute Jacobian of
/// `a_M^{L₁} ⊕ a_M^{L₂} → a_M^L`, zero if the sum is not direct.
pub fn splitting(m: &Levi, l: &Levi, l1: &Levi, l2: &Levi) -> Result<f64> {
    for x in [l1, l2] {
        if !m.is_contained_in(x) || !x.is_contained_in(l) {
            return Err(Error::InvalidInput("need M ⊆ Lᵢ ⊆ L".into()));
        }
    }
    let b1 = m.a_basis_in(l1);
    let b2 = m.a_basis_in(l2);
    let target = m.rank() - l.rank();
    if b1.len() + b2.len() != target {
        return Ok(0.0);
    }
    let mut all = b1.clone();
    all.extend(b2.clone());
    let g = if all.is_empty() { q(1) } else { gram(&all).det() };
    if g.is_zero() {
        return Ok(0.0);
    }
    let g1 = if b1.is_empty() { q(1) } else { gram(&b1).det() };
    let g2 = if b2.is_empty() { q(1) } else { gram(&b2).det() };
    Ok((to_f64(&g) / (to_f64(&g1) * to_f64(&g2))).sqrt())
}

/// Parabolics `(Q₁, Q₂) ∈ 𝒫^R(L₁) × 𝒫^R(L₂)` selected by a generic
/// `ξ ∈ a_M^L`: write `ξ = ξ₁ + ξ₂` with `ξᵢ ∈ a_{Lᵢ}^L`, then `Q₁` is the
/// chamber of `ξ₁` and `Q₂` the chamber of `−ξ₂`. `R ∈ 𝒫(L)` fixes the
/// ambient ordering.
pub fn split_parabolics(r: &Parabolic, l1: &Levi, l2: &Levi, xi: &[Q]) -> Result<(Parabolic, Parabolic)> {
    let l = r.levi();
    let b1 = l1.a_basis_in(&l);
    let b2 = l2.a_basis_in(&l);
    let mut all = b1.clone();
    all.extend(b2.clone());
    let n = xi.len();
    let coef = if all.is_empty() {
        Vec::new()
    } else {
        let a = QMatrix::from_rows(all.clone())?.transpose();
        a.solve(xi).ok_or_else(|| Error::InvalidInput("ξ outside a_{L₁}^L ⊕ a_{L₂}^L".into()))?
    };
    let comb = |bs: &[Vec<Q>], cs: &[Q], sign: i64| -> Vec<Q> {
        let mut v = vec![Q::zero(); n];
        for (b, c) in bs.iter().zip(cs) {
            for i in 0..n {
                v[i] += c * &b[i] * q(sign);
            }
        }
        v
    };
    let xi1 = comb(&b1, &coef[..b1.len()], 1);
    let xi2 = comb(&b2, &coef[b1.len()..], -1);
    let pick = |li: &Levi, v: &[Q]| -> Result<Parabolic> {
        parabolics_in(li, r)
            .into_iter()
            .find(|p| p.tau(r, v).unwrap_or(false))
            .ok_or(Error::SingularDirection)
    };
    Ok((pick(l1, &xi1)?, pick(l2, &xi2)?))
}

/// Both sides of `v_M^L(c·c′) = Σ d_M^L(L₁,L₂)·v_M^{Q₁}(c)·v_M^{Q₂}(c′)`.
pub fn splitting_identity(c1: &GMFamily, c2: &GMFamily, r: &Parabolic, xi: &[Q], lambda: &[f64]) -> Result<(f64, f64)> {
    let m = c1.m.clone();
    let l = r.levi();
    let prod = GMFamily::product(c1.clone(), c2.clone())?;
    let lhs = gm_value(&prod, &m, r, lambda)?;
    let levis: Vec<Levi> = crate::roots::levis_containing(&m).into_iter().filter(|x| x.is_contained_in(&l)).collect();
    let mut rhs = 0.0;
    for l1 in &levis {
        for l2 in &levis {
            let d = splitting(&m, &l, l1, l2)?;
            if d == 0.0 {
                continue;
            }
            let (q1, q2) = split_parabolics(r, l1, l2, xi)?;
            let lam1 = project_to(&m, &q1, lambda);
            let lam2 = project_to(&m, &q2, lambda);
            rhs += d * gm_value(c1, &m, &q1, &lam1)? * gm_value(c2, &m, &q2, &lam2)?;
        }
    }
    Ok((lhs, rhs))
}

/// A polynomial in `T_0, …, T_{n−1}` with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct MPoly {
    pub terms: BTreeMap<Vec<u32>, Q>,
    pub nvars: usize,
}

impl MPoly {
    pub fn constant(c: Q, nvars: usize) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(vec![0; nvars], c);
        }
        MPoly { terms, nvars }
    }

    pub fn linear(coef: &[Q]) -> Self {
        let nvars = coef.len();
        let mut terms = BTreeMap::new();
        for (i, c) in coef.iter().enumerate() {
            if !c.is_zero() {
                let mut e = vec![0; nvars];
                e[i] = 1;
                terms.insert(e, c.clone());
            }
        }
        MPoly { terms, nvars }
    }

    pub fn add(&self, o: &MPoly) -> MPoly {
        let mut terms = self.terms.clone();
        for (e, c) in &o.terms {
            let v = terms.entry(e.clone()).or_insert_with(Q::zero);
            *v += c;
            if v.is_zero() {
                terms.remove(e);
            }
        }
        MPoly { terms, nvars: self.nvars.max(o.nvars) }
    }

    pub fn mul(&self, o: &MPoly) -> MPoly {
        let mut out = MPoly::constant(Q::zero(), self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out = out.add(&MPoly { terms: BTreeMap::from([(e, c1 * c2)]), nvars: self.nvars });
            }
        }
        out
    }

    pub fn scale(&self, s: &Q) -> MPoly {
        if s.is_zero() {
            return MPoly::constant(Q::zero(), self.nvars);
        }
        MPoly { terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect(), nvars: self.nvars }
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn is_homogeneous_of(&self, d: u32) -> bool {
        self.terms.keys().all(|e| e.iter().sum::<u32>() == d)
    }

    pub fn eval(&self, t: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| to_f64(c) * e.iter().zip(t).map(|(&k, x)| x.powi(k as i32)).product::<f64>())
            .sum()
    }

    pub fn eval_q(&self, t: &[Q]) -> Q {
        let mut total = Q::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (&k, x) in e.iter().zip(t) {
                for _ in 0..k {
                    term *= x;
                }
            }
            total += term;
        }
        total
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})", crate::linalg::fmt_q(c))?;
            for (i, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "·T{i}")?,
                    _ => write!(f, "·T{i}^{k}")?,
                }
            }
        }
        Ok(())
    }
}

/// `v_L^Q(1,T) = Σ_c √c · poly_c(T)`, grouped by squared covolume `c`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightPolynomial {
    pub degree: usize,
    pub terms: BTreeMap<Q, MPoly>,
}

impl WeightPolynomial {
    pub fn eval(&self, t: &[f64]) -> f64 {
        self.terms.iter().map(|(c, p)| to_f64(c).sqrt() * p.eval(t)).sum()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.values().filter_map(MPoly::degree).max()
    }
}

/// The weight `v_L^Q(1,T)` of the family `(T_P)` as an exact polynomial in
/// the coordinates of `T`, computed along the rational direction `Λ`.
pub fn weight_t_polynomial(l: &Levi, qp: &Parabolic, lambda: &[Q]) -> Result<WeightPolynomial> {
    if !l.is_contained_in(&qp.levi()) {
        return Err(Error::InvalidInput("need L ⊆ M_Q".into()));
    }
    let k = l.rank() - qp.num_blocks();
    let n = l.n();
    let lam = {
        let lp = l.project(lambda);
        let mut v = lp.clone();
        for b in qp.blocks() {
            let avg: Q = b.iter().map(|&a| lp[a].clone()).sum::<Q>() / q(b.len() as i64);
            for &a in b {
                v[a] = &lp[a] - &avg;
            }
        }
        v
    };
    let kfact = q((1..=k as i64).product());
    let mut terms: BTreeMap<Q, MPoly> = BTreeMap::new();
    for p in parabolics_in(l, qp) {
        let rd = p.root_data(qp)?;
        let mut denom = Q::one();
        for c in &rd.coroots {
            let v = dot(&lam, c);
            if v.is_zero() {
                return Err(Error::SingularDirection);
            }
            denom *= v;
        }
        let order: Vec<usize> = p.blocks().iter().flat_map(|b| b.iter().copied()).collect();
        let lin: Vec<Q> = order.iter().map(|&a| lam[a].clone()).collect();
        let linear = MPoly::linear(&lin);
        let mut pow = MPoly::constant(Q::one(), n);
        for _ in 0..k {
            pow = pow.mul(&linear);
        }
        let term = pow.scale(&(Q::one() / (&denom * &kfact)));
        let e = terms.entry(rd.covolume_sq.clone()).or_insert_with(|| MPoly::constant(Q::zero(), n));
        *e = e.add(&term);
    }
    terms.retain(|_, p| !p.terms.is_empty());
    Ok(WeightPolynomial { degree: k, terms })
}

/// A positive orthogonal family built from a random submodular function on
/// sets of blocks: `Y_P` on the `i`-th block of `P` is the marginal gain of
/// that block over the blocks before it, divided by its size.
pub fn random_positive_family<R: Rng>(m: &Levi, rng: &mut R) -> OrthogonalFamily {
    let blocks = m.blocks().to_vec();
    let k = blocks.len();
    let n = m.n() as i64;
    let c0 = Q::new(rng.gen_range(1i64..=6).into(), rng.gen_range(1i64..=3).into());
    let caps: Vec<(Vec<bool>, i64, Q)> = (0..rng.gen_range(0..=3))
        .map(|_| {
            let a: Vec<bool> = (0..k).map(|_| rng.gen_bool(0.5)).collect();
            (a, rng.gen_range(1..=n), Q::new(rng.gen_range(0i64..=5).into(), rng.gen_range(1i64..=4).into()))
        })
        .collect();
    let modular: Vec<Q> = (0..k).map(|_| Q::new(rng.gen_range(-5i64..=5).into(), rng.gen_range(1i64..=3).into())).collect();
    let g = |set: &[bool]| -> Q {
        let size: i64 = (0..k).filter(|&i| set[i]).map(|i| blocks[i].len() as i64).sum();
        let mut v = &c0 * q(size * (n - size));
        for (a, cap, c) in &caps {
            let s: i64 = (0..k).filter(|&i| set[i] && a[i]).map(|i| blocks[i].len() as i64).sum();
            v += c * q(s.min(*cap));
        }
        for i in 0..k {
            if set[i] {
                v += &modular[i];
            }
        }
        v
    };
    let pm = parabolics_of(m);
    let points = pm
        .iter()
        .map(|p| {
            let mut set = vec![false; k];
            let mut y = vec![Q::zero(); m.n()];
            let mut before = g(&set);
            for b in p.blocks() {
                let bi = blocks.iter().position(|x| x == b).expect("block of M");
                set[bi] = true;
                let after = g(&set);
                let val = (&after - &before) / q(b.len() as i64);
                for &a in b {
                    y[a] = val.clone();
                }
                before = after;
            }
            project_g(&y)
        })
        .collect();
    OrthogonalFamily::new(m.clone(), points, 1.0).expect("sizes")
}

/// A random rational point of `a_M^G` around the family's bounding box.
pub fn random_point<R: Rng>(fam: &OrthogonalFamily, rng: &mut R) -> Vec<Q> {
    let span = fam
        .points
        .iter()
        .flat_map(|p| p.iter().map(|x| to_f64(x).abs()))
        .fold(1.0f64, f64::max)
        .ceil()
        .to_i64()
        .unwrap_or(1);
    let raw: Vec<Q> = (0..fam.m.n())
        .map(|_| Q::new(rng.gen_range(-1000 * span..=1000 * span).into(), 997.into()))
        .collect();
    project_g(&fam.m.project(&raw))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn gl2_segment() {
        let m = Levi::torus(2);
        let t = q(3);
        let fam = OrthogonalFamily::new(m.clone(), vec![vec![t.clone(), -t.clone()], vec![-t.clone(), t.clone()]], 1.0).unwrap();
        assert!(fam.is_positive());
        let v = gm_value(&GMFamily::exponential(fam.clone()), &m, &Parabolic::whole(2), &[0.3, -0.3]).unwrap();
        assert!((v - 6.0 * 2f64.sqrt()).abs() < 1e-12);
        assert!((hull_volume(&fam).volume - 6.0 * 2f64.sqrt()).abs() < 1e-12);
        let wp = weight_t_polynomial(&m, &Parabolic::whole(2), &[q(1), q(-1)]).unwrap();
        assert!((wp.eval(&[3.0, -3.0]) - 6.0 * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn constant_family_values() {
        let m = Levi::torus(3);
        let fam = GMFamily::exponential(OrthogonalFamily::zero(m.clone()));
        let g = Parabolic::whole(3);
        assert!(gm_value(&fam, &m, &g, &[0.7, 0.1, -0.8]).unwrap().abs() < 1e-12);
        let b = Parabolic::borel(3);
        assert_eq!(gm_value(&fam, &m, &b, &[0.7, 0.1, -0.8]).unwrap(), 1.0);
        assert_eq!(hull_volume(&OrthogonalFamily::zero(m)).volume, 0.0);
    }

    #[test]
    fn hexagon() {
        let m = Levi::torus(3);
        let fam = OrthogonalFamily::from_t(m.clone(), &[q(1), q(0), q(-1)]).unwrap();
        assert!(fam.is_positive());
        let hv = hull_volume(&fam);
        let v = gm_value(&GMFamily::exponential(fam.clone()), &m, &Parabolic::whole(3), &[0.9, 0.2, -1.1]).unwrap();
        assert!((hv.volume - v).abs() < 1e-10, "{} {}", hv.volume, v);
        let wp = weight_t_polynomial(&m, &Parabolic::whole(3), &[q(5), q(1), q(-3)]).unwrap();
        assert!((wp.eval(&[1.0, 0.0, -1.0]) - v).abs() < 1e-10);
        let bary = vec![q(0), q(0), q(0)];
        assert_eq!(hull_indicator(&fam, &bary), Ok(true));
        assert_eq!(alternating_sum(&fam, &bary), Ok(1));
        assert_eq!(alternating_sum(&fam, &[q(53), q(11), q(-64)]), Ok(0));
    }

    #[test]
    fn splitting_basics() {
        let t = Levi::torus(2);
        let g = Levi::whole(2);
        assert_eq!(splitting(&t, &g, &t, &g).unwrap(), 1.0);
        assert_eq!(splitting(&t, &g, &t, &t).unwrap(), 0.0);
        let t3 = Levi::torus(3);
        let l1 = Levi::new(vec![vec![0, 1], vec![2]]).unwrap();
        let l2 = Levi::new(vec![vec![0], vec![1, 2]]).unwrap();
        assert!(splitting(&t3, &Levi::whole(3), &l1, &l2).unwrap() > 0.0);
    }

    #[test]
    fn splitting_identity_small() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let m = Levi::torus(3);
        let r = Parabolic::whole(3);
        let xi = vec![q(3), q(-1), q(-2)];
        for _ in 0..5 {
            let a = GMFamily::exponential(random_positive_family(&m, &mut rng));
            let b = GMFamily::exponential(random_positive_family(&m, &mut rng));
            let lam = random_direction(&m, &r, &mut rng);
            let (lhs, rhs) = splitting_identity(&a, &b, &r, &xi, &lam).unwrap();
            assert!((lhs - rhs).abs() <= 1e-8 * lhs.abs().max(1.0), "{lhs} {rhs}");
        }
    }
}
