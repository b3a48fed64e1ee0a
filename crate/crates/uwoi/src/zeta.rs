//! Zeta factors `Z(s)`, `Z_d(s) = Z(s)Z(s−1)⋯Z(s−d+1)` and the constants
//! built from them.
//!
//! Every backend evaluates jets `t ↦ Z_d(s₀ + a·t)`. Global and partial
//! zeta values use Euler–Maclaurin summation carried out in jet arithmetic,
//! so derivatives come out of the same code path as values.

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::linalg::{q, Q};
use crate::localfield::primes_up_to;
use crate::orbits::NilpotentOrbit;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::{digamma, ln_gamma};
use std::f64::consts::PI;

/// Where a zeta factor lives.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ZetaBackend {
    Padic(u64),
    Real,
    Complex,
    /// Completed zeta `Λ(s) = π^{−s/2}Γ(s/2)ζ(s)` of ℚ.
    Global,
    /// `Λ(s)` divided by the local factors at the places of `S`.
    /// `finite` lists the finite primes of `S`; the archimedean place is
    /// always removed.
    Partial { finite: Vec<u64> },
}

/// Bernoulli numbers `B_2, B_4, …, B_30`.
const BERNOULLI: [f64; 15] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
];

/// Hurwitz zeta `ζ(s, x) = Σ_{n≥0} (n+x)^{−s}` as a jet in `s`, for
/// `x > 0` and `Re s > 1` near the base point.
pub fn hurwitz_jet(s: &Jet<f64>, x: f64) -> Result<Jet<f64>> {
    let s0 = *s.value();
    if (s0 - 1.0).abs() < 1e-12 {
        return Err(Error::Pole("s = 1".into()));
    }
    let k = s.order();
    let big_n = 24usize;
    let mut total = Jet::constant(0.0, k);
    for n in 0..big_n {
        total = total + Jet::base_pow_neg(n as f64 + x, s);
    }
    let nx = big_n as f64 + x;
    let n_s = Jet::base_pow_neg(nx, s);
    // N^{1−s}/(s−1)
    let tail = (n_s.clone().scale(&nx)).div(&s.add_scalar(&-1.0)).ok_or_else(|| Error::Pole("s = 1".into()))?;
    total = total + tail + n_s.scale(&0.5);
    // Σ B_{2j}/(2j)! · s(s+1)…(s+2j−2) · N^{−s−2j+1}
    let mut rising = s.clone();
    let mut fact = 2.0;
    for (j, b) in BERNOULLI.iter().enumerate() {
        let two_j = 2 * (j + 1);
        let term = rising.clone() * Jet::base_pow_neg(nx, &s.add_scalar(&(two_j as f64 - 1.0)));
        total = total + term.scale(&(b / fact));
        rising = rising * s.add_scalar(&(two_j as f64 - 1.0)) * s.add_scalar(&(two_j as f64));
        fact *= ((two_j + 1) * (two_j + 2)) as f64;
    }
    Ok(total)
}

/// Riemann zeta as a jet.
pub fn riemann_jet(s: &Jet<f64>) -> Result<Jet<f64>> {
    hurwitz_jet(s, 1.0)
}

/// Polygamma `ψ^{(m)}(x)`, `x > 0`.
pub fn polygamma(m: usize, x: f64) -> f64 {
    if m == 0 {
        return digamma(x);
    }
    let s = Jet::constant(m as f64 + 1.0, 0);
    let z = hurwitz_jet(&s, x).expect("m ≥ 1 keeps s away from 1").coef[0];
    let fact: f64 = (1..=m).map(|i| i as f64).product();
    let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
    sign * fact * z
}

/// Jet of `ln Γ(x₀ + b·t)`.
pub fn ln_gamma_jet(x0: f64, b: f64, order: usize) -> Result<Jet<f64>> {
    if x0 <= 0.0 && x0.fract() == 0.0 {
        return Err(Error::Pole(format!("Γ at {x0}")));
    }
    if x0 <= 0.0 {
        return Err(Error::InvalidInput("ln Γ jets need a positive base point".into()));
    }
    let mut coef = vec![ln_gamma(x0)];
    let mut fact = 1.0;
    let mut bp = 1.0;
    for m in 1..=order {
        fact *= m as f64;
        bp *= b;
        coef.push(polygamma(m - 1, x0) * bp / fact);
    }
    Ok(Jet { coef })
}

/// Jet of the one-variable factor `Z(s₀ + a·t)` at a backend.
pub fn z1_jet(backend: &ZetaBackend, s0: f64, a: f64, order: usize) -> Result<Jet<f64>> {
    let s = Jet::affine(s0, a, order);
    match backend {
        ZetaBackend::Padic(p) => {
            if s0 == 0.0 {
                return Err(Error::Pole("p-adic Z at 0".into()));
            }
            let x = Jet::base_pow_neg(*p as f64, &s);
            (Jet::constant(1.0, order) - x).recip().ok_or_else(|| Error::Pole("p-adic Z".into()))
        }
        ZetaBackend::Real => real_factor(s0, a, order),
        ZetaBackend::Complex => {
            // (2π)^{1−s}Γ(s)
            let lg = ln_gamma_jet(s0, a, order)?;
            Ok((lg + Jet::affine(1.0 - s0, -a, order).scale(&(2.0 * PI).ln())).exp())
        }
        ZetaBackend::Global => {
            if (s0 - 1.0).abs() < 1e-12 || s0.abs() < 1e-12 {
                return Err(Error::Pole(format!("Λ at {s0}")));
            }
            Ok(real_factor(s0, a, order)? * riemann_jet(&s)?)
        }
        ZetaBackend::Partial { finite } => {
            if (s0 - 1.0).abs() < 1e-12 {
                return Err(Error::Pole("partial ζ at 1".into()));
            }
            let mut z = riemann_jet(&s)?;
            for &p in finite {
                z = z * (Jet::constant(1.0, order) - Jet::base_pow_neg(p as f64, &s));
            }
            Ok(z)
        }
    }
}

fn real_factor(s0: f64, a: f64, order: usize) -> Result<Jet<f64>> {
    // π^{−s/2}Γ(s/2)
    let lg = ln_gamma_jet(s0 / 2.0, a / 2.0, order)?;
    Ok((lg + Jet::affine(-s0 / 2.0, -a / 2.0, order).scale(&PI.ln())).exp())
}

/// Jet of `Z_d(s₀ + a·t)`; `Z_0 ≡ 1`.
pub fn z_jet(backend: &ZetaBackend, d: usize, s0: f64, a: f64, order: usize) -> Result<Jet<f64>> {
    let mut out = Jet::constant(1.0, order);
    for i in 0..d {
        out = out * z1_jet(backend, s0 - i as f64, a, order)?;
    }
    Ok(out)
}

/// `Z_d(s)` at a point.
pub fn z_value(backend: &ZetaBackend, d: usize, s: f64) -> Result<f64> {
    Ok(z_jet(backend, d, s, 0.0, 0)?.coef[0])
}

/// `(d/ds) log Z_d(s)`.
pub fn z_log_derivative(backend: &ZetaBackend, d: usize, s: f64) -> Result<f64> {
    let j = z_jet(backend, d, s, 1.0, 1)?;
    Ok(j.coef[1] / j.coef[0])
}

/// Exact p-adic `Z(s) = 1/(1 − q^{−s})` at an integer `s ≠ 0`.
pub fn padic_z_exact(p: u64, s: i64) -> Result<Q> {
    if s == 0 {
        return Err(Error::Pole("p-adic Z at 0".into()));
    }
    Ok(q(1) / (q(1) - crate::linalg::qpow(p, -s)))
}

/// Truncated Euler product for the partial zeta outside `S`, as a jet of
/// `log ζ^S(s₀ + a·t)` with a bound on each coefficient of the omitted tail.
#[derive(Clone, Debug, PartialEq)]
pub struct EulerProduct {
    pub log_jet: Jet<f64>,
    pub tail_bounds: Vec<f64>,
    pub cutoff: u64,
}

pub fn euler_log_jet(finite: &[u64], cutoff: u64, s0: f64, a: f64, order: usize) -> Result<EulerProduct> {
    if s0 <= 1.0 {
        return Err(Error::Divergence("Euler product needs s > 1".into()));
    }
    let s = Jet::affine(s0, a, order);
    let mut total = Jet::constant(0.0, order);
    for p in primes_up_to(cutoff) {
        if finite.contains(&p) {
            continue;
        }
        let x = Jet::base_pow_neg(p as f64, &s);
        let l = (Jet::constant(1.0, order) - x).ln().ok_or_else(|| Error::Internal("log of Euler factor".into()))?;
        total = total - l;
    }
    // Coefficient m of −log(1 − p^{−s}) is bounded by
    // |a|^m/m!·(log p)^m·p^{−σ}·Σ_k k^{m−1}C^{−(k−1)σ}; sum over n > C by an integral.
    let c = cutoff.max(2) as f64;
    let lc = c.ln();
    let sig = s0;
    let mut tail_bounds = Vec::with_capacity(order + 1);
    let mut fact = 1.0;
    for m in 0..=order {
        if m > 0 {
            fact *= m as f64;
        }
        let series: f64 = (1..60).map(|k: i32| (k as f64).powi(m as i32 - 1) * c.powf(-(k as f64 - 1.0) * sig)).sum();
        // ∫_C^∞ (ln x)^m x^{−σ} dx = C^{1−σ} Σ_{j=0}^m m!/j! (ln C)^j/(σ−1)^{m−j+1}
        let mut integral = 0.0;
        let mut jf = 1.0;
        for j in 0..=m {
            if j > 0 {
                jf *= j as f64;
            }
            integral += fact / jf * lc.powi(j as i32) / (sig - 1.0).powi((m - j + 1) as i32);
        }
        integral *= c.powf(1.0 - sig);
        tail_bounds.push(a.abs().powi(m as i32) / fact * series * integral);
    }
    Ok(EulerProduct { log_jet: total, tail_bounds, cutoff })
}

/// A formal product of atoms `Z(k)` and `Z*(k) = k·Z(k)`, the factor left
/// over from `Z*_d(s) = (s−d+1)·Z_d(s)`. Globally `Z*(1)` is read as the
/// residue of the completed zeta at `1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZetaExpr {
    /// Sorted list of atoms.
    pub atoms: Vec<Atom>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Atom {
    Z { s: i64 },
    Zstar { s: i64 },
}

impl ZetaExpr {
    pub fn one() -> Self {
        ZetaExpr { atoms: Vec::new() }
    }

    /// `Z_d(s) = Z(s)⋯Z(s−d+1)`.
    pub fn z_d(d: usize, s: i64) -> Self {
        let mut atoms: Vec<Atom> = (0..d as i64).map(|i| Atom::Z { s: s - i }).collect();
        atoms.sort();
        ZetaExpr { atoms }
    }

    /// `Z*_d(s)`: the last factor `Z(s−d+1)` replaced by `Z*(s−d+1)`.
    pub fn z_star_d(d: usize, s: i64) -> Self {
        if d == 0 {
            return Self::one();
        }
        let mut atoms: Vec<Atom> = (0..d as i64 - 1).map(|i| Atom::Z { s: s - i }).collect();
        atoms.push(Atom::Zstar { s: s - d as i64 + 1 });
        atoms.sort();
        ZetaExpr { atoms }
    }

    pub fn mul(&self, o: &ZetaExpr) -> ZetaExpr {
        let mut atoms = self.atoms.clone();
        atoms.extend(o.atoms.iter().cloned());
        atoms.sort();
        ZetaExpr { atoms }
    }

    /// Remove the atoms of `o` (which must all be present).
    pub fn div(&self, o: &ZetaExpr) -> Result<ZetaExpr> {
        let mut atoms = self.atoms.clone();
        for a in &o.atoms {
            let i = atoms.iter().position(|x| x == a).ok_or_else(|| Error::Internal(format!("atom {a:?} missing")))?;
            atoms.remove(i);
        }
        Ok(ZetaExpr { atoms })
    }

    /// Literal expansion `Z*(k) ↦ k·Z(k)`: a scalar and the sorted arguments
    /// of the remaining `Z` atoms.
    pub fn expanded(&self) -> (Q, Vec<i64>) {
        let mut scalar = q(1);
        let mut args = Vec::new();
        for a in &self.atoms {
            match a {
                Atom::Z { s } => args.push(*s),
                Atom::Zstar { s } => {
                    scalar *= q(*s);
                    args.push(*s);
                }
            }
        }
        args.sort_unstable();
        (scalar, args)
    }

    /// Atoms `Z(1)`, which make global values diverge.
    pub fn poles(&self) -> usize {
        self.atoms.iter().filter(|a| **a == Atom::Z { s: 1 }).count()
    }

    pub fn value(&self, backend: &ZetaBackend) -> Result<f64> {
        let global = matches!(backend, ZetaBackend::Global | ZetaBackend::Partial { .. });
        if global && self.poles() > 0 {
            return Err(Error::Divergence("factor Z(1)".into()));
        }
        let mut v = 1.0;
        for a in &self.atoms {
            v *= match a {
                Atom::Z { s } => z_value(backend, 1, *s as f64)?,
                Atom::Zstar { s } if *s == 1 && global => {
                    // Residue of the completed (or partial) zeta at 1.
                    match backend {
                        ZetaBackend::Partial { finite } => finite.iter().map(|&p| 1.0 - 1.0 / p as f64).product(),
                        _ => 1.0,
                    }
                }
                Atom::Zstar { s } => *s as f64 * z_value(backend, 1, *s as f64)?,
            };
        }
        Ok(v)
    }

    /// Exact p-adic value.
    pub fn value_padic_exact(&self, p: u64) -> Result<Q> {
        let mut v = q(1);
        for a in &self.atoms {
            v *= match a {
                Atom::Z { s } => padic_z_exact(p, *s)?,
                Atom::Zstar { s } => q(*s) * padic_z_exact(p, *s)?,
            };
        }
        Ok(v)
    }

    pub fn display(&self) -> String {
        if self.atoms.is_empty() {
            return "1".into();
        }
        self.atoms
            .iter()
            .map(|a| match a {
                Atom::Z { s } => format!("Z({s})"),
                Atom::Zstar { s } => format!("Z*({s})"),
            })
            .collect::<Vec<_>>()
            .join("·")
    }
}

/// `c_X = ∏_{j} ∏_{i<j} Z_{d_j}(d_i + … + d_j)` as a formal product.
pub fn c_expr(o: &NilpotentOrbit) -> ZetaExpr {
    let mut e = ZetaExpr::one();
    for j in 1..=o.r {
        let dj = o.dj(j);
        for i in 1..j {
            let s: usize = (i..=j).map(|t| o.dj(t)).sum();
            e = e.mul(&ZetaExpr::z_d(dj, s as i64));
        }
    }
    e
}

/// `c_X` with its numeric value at a backend. Global and partial backends
/// diverge exactly when the orbit is not simple.
#[derive(Clone, Debug, PartialEq)]
pub struct Constant {
    pub expr: ZetaExpr,
    pub value: f64,
}

pub fn c_constant(o: &NilpotentOrbit, backend: &ZetaBackend) -> Result<Constant> {
    let expr = c_expr(o);
    let value = expr.value(backend)?;
    Ok(Constant { expr, value })
}

/// `c_{P₁,P₂}(X) = c_X / Z_{r₁}(r₁ + r₂)`.
pub fn c_adjacent_expr(o: &NilpotentOrbit, r1: usize, r2: usize) -> Result<ZetaExpr> {
    c_expr(o).div(&ZetaExpr::z_d(r1, (r1 + r2) as i64))
}

pub fn c_adjacent(o: &NilpotentOrbit, r1: usize, r2: usize, backend: &ZetaBackend) -> Result<f64> {
    let full = c_expr(o);
    if matches!(backend, ZetaBackend::Global | ZetaBackend::Partial { .. }) && full.poles() > 0 {
        return Err(Error::Divergence("c_X has a factor Z(1)".into()));
    }
    c_adjacent_expr(o, r1, r2)?.value(backend)
}

/// `vol(M(ℚ)\M(𝔸)^1) = ∏ Z*_{n_i}(n_i)` as a formal product.
pub fn vol_levi_expr(sizes: &[usize]) -> ZetaExpr {
    sizes.iter().fold(ZetaExpr::one(), |e, &n| e.mul(&ZetaExpr::z_star_d(n, n as i64)))
}

pub fn vol_levi(sizes: &[usize]) -> Result<f64> {
    vol_levi_expr(sizes).value(&ZetaBackend::Global)
}

/// Both sides of `c_X · ∏ Z*_{d_j}(d_j) = ∏ Z*_{n_i}(n_i)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolumeIdentity {
    pub lhs: ZetaExpr,
    pub rhs: ZetaExpr,
    /// Equality after the literal expansion of the `Z*` factors.
    pub holds: bool,
    /// Equality of the atom multisets themselves, keeping `Z*(1)` apart from
    /// `Z(1)`. This is what the regularized global values need and it holds
    /// exactly for simple orbits.
    pub holds_strict: bool,
}

pub fn verify_volume_identity(o: &NilpotentOrbit) -> VolumeIdentity {
    let centralizer = (1..=o.r).fold(ZetaExpr::one(), |e, j| e.mul(&ZetaExpr::z_star_d(o.dj(j), o.dj(j) as i64)));
    let lhs = c_expr(o).mul(&centralizer);
    let rhs = vol_levi_expr(&o.levi_sizes());
    let holds = lhs.expanded() == rhs.expanded();
    let holds_strict = lhs == rhs;
    VolumeIdentity { lhs, rhs, holds, holds_strict }
}

/// `vol(G_X(ℚ)\G_X(𝔸)^1) = vol_levi(M) / c_X` (simple orbits).
pub fn vol_centralizer(o: &NilpotentOrbit) -> Result<f64> {
    let c = c_constant(o, &ZetaBackend::Global)?;
    Ok(vol_levi(&o.levi_sizes())? / c.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbits::Partition;

    fn orbit(p: &[usize]) -> NilpotentOrbit {
        NilpotentOrbit::new(Partition::new(p.to_vec()))
    }

    #[test]
    fn riemann_values() {
        let z2 = riemann_jet(&Jet::affine(2.0, 1.0, 2)).unwrap();
        assert!((z2.coef[0] - PI * PI / 6.0).abs() < 1e-13);
        // ζ'(2) = −0.93754825431584375370…
        assert!((z2.coef[1] + 0.937_548_254_315_843_8).abs() < 1e-12);
        let z3 = riemann_jet(&Jet::constant(3.0, 0)).unwrap();
        assert!((z3.coef[0] - 1.202_056_903_159_594_2).abs() < 1e-13);
        let half = riemann_jet(&Jet::constant(0.5, 0)).unwrap();
        assert!((half.coef[0] + 1.460_354_508_809_586_8).abs() < 1e-10);
    }

    #[test]
    fn backend_examples() {
        let qp = 3.0f64;
        let z = z_value(&ZetaBackend::Padic(3), 1, 2.0).unwrap();
        assert!((z - 1.0 / (1.0 - 1.0 / (qp * qp))).abs() < 1e-15);
        let ld = z_log_derivative(&ZetaBackend::Padic(3), 1, 1.0).unwrap();
        assert!((ld + qp.ln() / qp / (1.0 - 1.0 / qp)).abs() < 1e-14);
        assert!((z_value(&ZetaBackend::Global, 1, 2.0).unwrap() - PI / 6.0).abs() < 1e-14);
        assert!((z_value(&ZetaBackend::Real, 1, 1.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((z_value(&ZetaBackend::Complex, 1, 1.0).unwrap() - 1.0).abs() < 1e-14);
        assert!(matches!(z_value(&ZetaBackend::Global, 1, 1.0), Err(Error::Pole(_))));
    }

    #[test]
    fn polygamma_values() {
        assert!((polygamma(1, 1.0) - PI * PI / 6.0).abs() < 1e-13);
        assert!((polygamma(2, 1.0) + 2.0 * 1.202_056_903_159_594_2).abs() < 1e-12);
    }

    #[test]
    fn constants() {
        let c = c_constant(&orbit(&[2, 1]), &ZetaBackend::Padic(5)).unwrap();
        assert_eq!(c.expr, ZetaExpr::z_d(1, 2));
        assert!((c.value - 1.0 / (1.0 - 1.0 / 25.0)).abs() < 1e-15);
        let g = c_constant(&orbit(&[2, 1]), &ZetaBackend::Global).unwrap();
        assert!((g.value - PI / 6.0).abs() < 1e-14);
        assert!(matches!(c_constant(&orbit(&[2]), &ZetaBackend::Global), Err(Error::Divergence(_))));
        assert_eq!(c_adjacent(&orbit(&[2, 1]), 1, 1, &ZetaBackend::Padic(7)).unwrap(), 1.0);
        assert!((vol_levi(&[2, 1]).unwrap() - PI / 6.0).abs() < 1e-14);
        assert_eq!(vol_levi(&[1]).unwrap(), 1.0);
    }

    #[test]
    fn volume_identity_small() {
        let v = verify_volume_identity(&orbit(&[2, 1]));
        assert!(v.holds && v.holds_strict);
        assert_eq!(v.lhs.display(), "Z(2)·Z*(1)·Z*(1)");
        let v = verify_volume_identity(&orbit(&[2]));
        assert!(v.holds && !v.holds_strict);
    }

    #[test]
    fn euler_product_converges() {
        let ep = euler_log_jet(&[], 1000, 2.0, 1.0, 1).unwrap();
        let exact = riemann_jet(&Jet::affine(2.0, 1.0, 1)).unwrap().ln().unwrap();
        for m in 0..=1 {
            assert!((ep.log_jet.coef[m] - exact.coef[m]).abs() <= ep.tail_bounds[m], "order {m}");
        }
    }
}
