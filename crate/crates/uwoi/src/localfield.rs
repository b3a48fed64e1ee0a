//! Iwasawa decompositions, the functions `H_P` and `R_P`, the determinant
//! extraction for adjacent pairs, and the two conjugator solvers.
//!
//! At a p-adic place everything is exact: values are rational multiples of
//! `log p`. At the real place `H_P` is computed from exact Gram determinants
//! and only the final logarithm is a float.

use crate::error::{Error, Result};
use crate::linalg::{jordan_type, q, qpow, to_f64, valuation, Q, QMatrix};
use crate::orbits::{block_entries, filtration_n, filtration_o, HomBlock};
use crate::richardson::{adjacency, richardson_map, AdjacencyData, OrbitData};
use crate::roots::{dot, perm_matrix, Parabolic};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

/// A place of ℚ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Place {
    Real,
    Complex,
    Padic(u64),
}

impl Place {
    /// Parses `inf`, `real`, `complex`, `p5`, `5`.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "inf" | "real" | "r" | "oo" => return Ok(Place::Real),
            "complex" | "c" => return Ok(Place::Complex),
            _ => {}
        }
        let digits = t.trim_start_matches('p');
        let p: u64 = digits.parse().map_err(|_| Error::InvalidInput(format!("unknown place {s:?}")))?;
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        Ok(Place::Padic(p))
    }

    pub fn prime(&self) -> Option<u64> {
        match self {
            Place::Padic(p) => Some(*p),
            _ => None,
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Real => write!(f, "real"),
            Place::Complex => write!(f, "complex"),
            Place::Padic(p) => write!(f, "p{p}"),
        }
    }
}

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// Primes up to `bound`, by a sieve.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    let b = bound as usize;
    if b < 2 {
        return Vec::new();
    }
    let mut sieve = vec![true; b + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= b {
        if sieve[i] {
            let mut j = i * i;
            while j <= b {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    (0..=b).filter(|&i| sieve[i]).map(|i| i as u64).collect()
}

/// A logarithm of an absolute value: exact `c·log p` or a float.
#[derive(Clone, Debug, PartialEq)]
pub enum LogValue {
    Exact { coef: Q, prime: u64 },
    Float(f64),
}

impl LogValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            LogValue::Exact { coef, prime } => to_f64(coef) * (*prime as f64).ln(),
            LogValue::Float(x) => *x,
        }
    }

    pub fn exact_coef(&self) -> Option<&Q> {
        match self {
            LogValue::Exact { coef, .. } => Some(coef),
            LogValue::Float(_) => None,
        }
    }
}

/// A vector of logarithms at one place: exact coefficients of `log p`, or floats.
#[derive(Clone, Debug, PartialEq)]
pub enum LogVec {
    Padic { prime: u64, coef: Vec<Q> },
    Float(Vec<f64>),
}

impl LogVec {
    pub fn to_f64(&self) -> Vec<f64> {
        match self {
            LogVec::Padic { prime, coef } => {
                let l = (*prime as f64).ln();
                coef.iter().map(|c| to_f64(c) * l).collect()
            }
            LogVec::Float(v) => v.clone(),
        }
    }

    pub fn exact(&self) -> Option<&[Q]> {
        match self {
            LogVec::Padic { coef, .. } => Some(coef),
            LogVec::Float(_) => None,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            LogVec::Padic { coef, .. } => coef.len(),
            LogVec::Float(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn neg(&self) -> LogVec {
        match self {
            LogVec::Padic { prime, coef } => LogVec::Padic { prime: *prime, coef: coef.iter().map(|c| -c.clone()).collect() },
            LogVec::Float(v) => LogVec::Float(v.iter().map(|x| -x).collect()),
        }
    }

    pub fn add(&self, other: &LogVec) -> Result<LogVec> {
        match (self, other) {
            (LogVec::Padic { prime: a, coef: x }, LogVec::Padic { prime: b, coef: y }) if a == b => {
                Ok(LogVec::Padic { prime: *a, coef: x.iter().zip(y).map(|(u, v)| u + v).collect() })
            }
            _ => Ok(LogVec::Float(self.to_f64().iter().zip(other.to_f64()).map(|(u, v)| u + v).collect())),
        }
    }

    pub fn sub(&self, other: &LogVec) -> Result<LogVec> {
        self.add(&other.neg())
    }

    /// Apply a coordinate permutation `(w·x)_{w(a)} = x_a`.
    pub fn permute(&self, w: &[usize]) -> LogVec {
        match self {
            LogVec::Padic { prime, coef } => LogVec::Padic { prime: *prime, coef: crate::roots::weyl_vector(w, coef) },
            LogVec::Float(v) => LogVec::Float(crate::roots::weyl_vector(w, v)),
        }
    }
}

/// Residue of an Iwasawa decomposition `g = p·k`.
#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    /// `k ∈ GL_n(ℤ_(p))`, exact.
    Padic(QMatrix),
    /// `k` with orthonormal rows.
    Orthogonal(Vec<Vec<f64>>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Iwasawa {
    pub h: LogVec,
    pub k: Witness,
}

/// Basis of `span(rows) ∩ ℤ_(p)^n` extending a basis `old` of a saturated
/// sublattice. `old_piv[i]` is the unit pivot column of `old[i]`; the rows of
/// `old` vanish on the pivots of earlier rows. Returns new rows and pivots.
fn saturate(rows: &[Vec<Q>], old: &[Vec<Q>], old_piv: &[usize], p: u64) -> (Vec<Vec<Q>>, Vec<usize>) {
    let n = rows.first().map_or(0, |r| r.len());
    let mut work: Vec<Vec<Q>> = rows.to_vec();
    // Clear the old pivot columns, in order.
    for y in work.iter_mut() {
        for (b, &c) in old.iter().zip(old_piv) {
            if !y[c].is_zero() {
                let f = y[c].clone();
                for a in 0..n {
                    let v = &f * &b[a];
                    y[a] -= v;
                }
            }
        }
    }
    let mut out = Vec::new();
    let mut piv = Vec::new();
    let mut remaining: Vec<Vec<Q>> = work.into_iter().filter(|r| r.iter().any(|x| !x.is_zero())).collect();
    while !remaining.is_empty() {
        // Entry of minimal valuation among remaining rows.
        let mut best: Option<(i64, usize, usize)> = None;
        for (i, r) in remaining.iter().enumerate() {
            for (c, x) in r.iter().enumerate() {
                if let Some(v) = valuation(x, p) {
                    if best.is_none_or(|(bv, _, _)| v < bv) {
                        best = Some((v, i, c));
                    }
                }
            }
        }
        let Some((_, i, c)) = best else { break };
        let mut row = remaining.swap_remove(i);
        let inv = row[c].recip();
        for x in row.iter_mut() {
            *x = &*x * &inv;
        }
        for r in remaining.iter_mut() {
            if !r[c].is_zero() {
                let f = r[c].clone();
                for a in 0..n {
                    let v = &f * &row[a];
                    r[a] -= v;
                }
            }
        }
        remaining.retain(|r| r.iter().any(|x| !x.is_zero()));
        out.push(row);
        piv.push(c);
    }
    (out, piv)
}

fn exact_block_log(g: &QMatrix, pb: &Parabolic, k: &QMatrix, p: u64) -> Vec<Q> {
    let pm = g.mul(&k.inverse().expect("unit determinant"));
    let mut coef = vec![Q::zero(); g.rows()];
    for b in pb.blocks() {
        let d = pm.submatrix(b, b).det();
        let v = valuation(&d, p).expect("nonzero block determinant");
        let c = Q::new(BigInt::from(-v), BigInt::from(b.len() as i64));
        for &a in b {
            coef[a] = c.clone();
        }
    }
    coef
}

fn padic_iwasawa(g: &QMatrix, pb: &Parabolic, p: u64) -> Result<Iwasawa> {
    let n = g.rows();
    let mut k = QMatrix::zeros(n, n);
    let mut basis: Vec<Vec<Q>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for b in pb.blocks().iter().rev() {
        let rows: Vec<Vec<Q>> = b.iter().map(|&a| g.row(a)).collect();
        let (new, piv) = saturate(&rows, &basis, &pivots, p);
        if new.len() != b.len() {
            return Err(Error::Singular);
        }
        for (&a, v) in b.iter().zip(&new) {
            for c in 0..n {
                k[(a, c)] = v[c].clone();
            }
        }
        basis.extend(new);
        pivots.extend(piv);
    }
    let coef = exact_block_log(g, pb, &k, p);
    Ok(Iwasawa { h: LogVec::Padic { prime: p, coef }, k: Witness::Padic(k) })
}

fn gram_det_rows(g: &QMatrix, rows: &[usize]) -> Q {
    let sub = g.submatrix(rows, &(0..g.cols()).collect::<Vec<_>>());
    sub.mul(&sub.transpose()).det()
}

fn real_iwasawa(g: &QMatrix, pb: &Parabolic, scale: f64) -> Result<Iwasawa> {
    let n = g.rows();
    let blocks = pb.blocks();
    let mut h = vec![0.0; n];
    let mut below: Vec<usize> = Vec::new();
    let mut prev = Q::one();
    for b in blocks.iter().rev() {
        let mut rows = b.clone();
        rows.extend(&below);
        let gd = gram_det_rows(g, &rows);
        if gd.is_zero() {
            return Err(Error::Singular);
        }
        // ∏_{l' ≥ l} |det p_{l'}|² is the Gram determinant of the rows below.
        let val = scale * 0.5 * (to_f64(&gd).ln() - to_f64(&prev).ln()) / b.len() as f64;
        for &a in b {
            h[a] = val;
        }
        prev = gd;
        below = rows;
    }
    // Gram–Schmidt from the bottom block up gives the orthogonal factor.
    let gf = g.to_f64();
    let mut kf = vec![vec![0.0; n]; n];
    let mut done: Vec<Vec<f64>> = Vec::new();
    for b in blocks.iter().rev() {
        for &a in b {
            let mut v = gf[a].clone();
            for u in &done {
                let d: f64 = v.iter().zip(u).map(|(x, y)| x * y).sum();
                for c in 0..n {
                    v[c] -= d * u[c];
                }
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            for x in v.iter_mut() {
                *x /= norm;
            }
            kf[a] = v.clone();
            done.push(v);
        }
    }
    Ok(Iwasawa { h: LogVec::Float(h), k: Witness::Orthogonal(kf) })
}

/// `H_P(g)` with `g = p·k`, `p ∈ P(F)`, `k ∈ K_v`.
pub fn iwasawa(g: &QMatrix, pb: &Parabolic, v: Place) -> Result<Iwasawa> {
    if !g.is_square() || g.rows() != pb.n() {
        return Err(Error::SizeMismatch("matrix and parabolic sizes differ".into()));
    }
    if g.det().is_zero() {
        return Err(Error::Singular);
    }
    match v {
        Place::Padic(p) => padic_iwasawa(g, pb, p),
        Place::Real => real_iwasawa(g, pb, 1.0),
        // Rational g: the unitary factorization is the orthogonal one, and the
        // normalized complex absolute value squares the real one.
        Place::Complex => real_iwasawa(g, pb, 2.0),
    }
}

/// Brute-force oracle: `Σ_{l' ≥ l} |B_{l'}|·H_{l'}` from the largest `s×s`
/// minor valuation of the rows in blocks `≥ l` (p-adic only, small n).
pub fn iwasawa_minor_oracle(g: &QMatrix, pb: &Parabolic, p: u64) -> Vec<Q> {
    let n = g.rows();
    let mut out = Vec::new();
    let mut rows: Vec<usize> = Vec::new();
    for b in pb.blocks().iter().rev() {
        rows.extend(b);
        let s = rows.len();
        let mut best: Option<i64> = None;
        for cols in subsets(n, s) {
            if let Some(v) = valuation(&g.submatrix(&rows, &cols).det(), p) {
                best = Some(best.map_or(v, |b: i64| b.min(v)));
            }
        }
        out.push(q(-best.expect("full rank")));
    }
    out.reverse();
    out
}

fn subsets(n: usize, s: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    fn rec(start: usize, n: usize, s: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == s {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, s, cur, out);
            cur.pop();
        }
    }
    rec(0, n, s, &mut Vec::new(), &mut out);
    out
}

/// `R_P(g) = H_P(w_P g)` for `P ∈ 𝒫(M)` or `ℱ(M)`.
pub fn r_value(data: &OrbitData, pb: &Parabolic, g: &QMatrix, v: Place) -> Result<LogVec> {
    let (_, w) = richardson_map(data, pb)?;
    r_value_with(pb, &w, g, v)
}

/// `H_P(w g)` for an explicitly chosen representative `w`.
pub fn r_value_with(pb: &Parabolic, w: &[usize], g: &QMatrix, v: Place) -> Result<LogVec> {
    Ok(iwasawa(&perm_matrix(w).mul(g), pb, v)?.h)
}

/// The family `(−R_P(g))_{P ∈ 𝒫(M)}`, aligned with `data.pm`.
pub fn r_family(data: &OrbitData, g: &QMatrix, v: Place) -> Result<Vec<LogVec>> {
    data.pm.iter().map(|p| Ok(r_value(data, p, g, v)?.neg())).collect()
}

/// Primes at which `g` is not in `K_p`.
pub fn bad_primes(g: &QMatrix) -> Result<Vec<u64>> {
    let inv = g.inverse()?;
    let mut ps = BTreeSet::new();
    for m in [g, &inv] {
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                for p in factor(m[(r, c)].denom()) {
                    ps.insert(p);
                }
            }
        }
    }
    Ok(ps.into_iter().collect())
}

fn factor(n: &BigInt) -> Vec<u64> {
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut d = 2u64;
    while BigInt::from(d) * BigInt::from(d) <= n {
        let bd = BigInt::from(d);
        if n.is_multiple_of(&bd) {
            out.push(d);
            while n.is_multiple_of(&bd) {
                n /= &bd;
            }
        }
        d += 1;
    }
    if n > BigInt::one() {
        out.push(n.to_u64().expect("prime factor fits in u64"));
    }
    out
}

/// Adelic `R_P(g)` as a list of nonzero place contributions (finite places
/// plus the real place).
pub fn r_value_adelic(data: &OrbitData, pb: &Parabolic, g: &QMatrix) -> Result<Vec<(Place, LogVec)>> {
    let mut out = Vec::new();
    for p in bad_primes(g)? {
        out.push((Place::Padic(p), r_value(data, pb, g, Place::Padic(p))?));
    }
    out.push((Place::Real, r_value(data, pb, g, Place::Real)?));
    Ok(out)
}

/// Any rational `g` with `g^{-1} X g = Y`.
pub fn conjugator_from_x(data: &OrbitData, y: &QMatrix) -> Result<QMatrix> {
    let n = data.n();
    if y.rows() != n || !y.is_square() {
        return Err(Error::SizeMismatch("Y has the wrong size".into()));
    }
    let jt = jordan_type(y).ok_or_else(|| Error::NotInOrbit("Y is not nilpotent".into()))?;
    if jt != data.orbit.partition.parts() {
        return Err(Error::NotInOrbit(format!("Jordan type {jt:?}")));
    }
    // Solutions of Xg − gY = 0 form a vector space of dimension dim G_X.
    let x = &data.x;
    let mut sys = QMatrix::zeros(n * n, n * n);
    for a in 0..n {
        for b in 0..n {
            let mut e = QMatrix::zeros(n, n);
            e[(a, b)] = q(1);
            let c = x.mul(&e).sub(&e.mul(y));
            for r in 0..n {
                for s in 0..n {
                    sys[(r * n + s, a * n + b)] = c[(r, s)].clone();
                }
            }
        }
    }
    let basis: Vec<QMatrix> = sys
        .nullspace()
        .into_iter()
        .map(|v| QMatrix::from_rows(v.chunks(n).map(|c| c.to_vec()).collect()).expect("square"))
        .collect();
    // Deterministic search through small integer combinations.
    for attempt in 0..64i64 {
        let mut g = QMatrix::zeros(n, n);
        for (i, b) in basis.iter().enumerate() {
            let c = 1 + ((attempt + 1) * (i as i64 + 3) * 7919 + i as i64 * i as i64) % 11;
            g = g.add(&b.scale(&q(c)));
        }
        if !g.det().is_zero() {
            debug_assert_eq!(g.inverse().unwrap().mul(x).mul(&g), *y);
            return Ok(g);
        }
    }
    Err(Error::NotInOrbit("no invertible solution found".into()))
}

fn refined_intersection(adj: &AdjacencyData) -> Result<Parabolic> {
    // P̃ = P̃_ε ∩ P̃_{τε}: the ε-parabolic with block k+1 split into W₂ then W₃.
    let eps_parabolic = if adj.p1_tilde.blocks()[adj.k - 1] == adj.w1 { &adj.p1_tilde } else { &adj.p2_tilde };
    let mut blocks = Vec::new();
    for (idx, b) in eps_parabolic.blocks().iter().enumerate() {
        if idx == adj.k {
            if !adj.w2.is_empty() {
                blocks.push(adj.w2.clone());
            }
            blocks.push(adj.w3.clone());
        } else {
            blocks.push(b.clone());
        }
    }
    Parabolic::new(blocks)
}

/// `log|det U_{1,3}|` where `U = kYk^{-1} ∈ 𝔫_{P̃₁} ∩ 𝔫_{P̃₂}`.
pub fn u13_logdet(data: &OrbitData, y: &QMatrix, p1: &Parabolic, p2: &Parabolic, v: Place) -> Result<LogValue> {
    let g = conjugator_from_x(data, y)?;
    u13_logdet_with(data, &g, p1, p2, v)
}

/// Same as [`u13_logdet`] with a given conjugator `g` (`g^{-1}Xg = Y`).
pub fn u13_logdet_with(data: &OrbitData, g: &QMatrix, p1: &Parabolic, p2: &Parabolic, v: Place) -> Result<LogValue> {
    let adj = adjacency(data, p1, p2)?;
    let pt = refined_intersection(&adj)?;
    let iw = iwasawa(g, &pt, v)?;
    match (&iw.k, v) {
        (Witness::Padic(k), Place::Padic(p)) => {
            let pm = g.mul(&k.inverse()?);
            let u = pm.inverse()?.mul(&data.x).mul(&pm);
            if !adj.p1_tilde.nilradical_contains(&u) || !adj.p2_tilde.nilradical_contains(&u) {
                return Err(Error::Internal("U left the common nilradical".into()));
            }
            let d = u.submatrix(&adj.w1, &adj.w3).det();
            let val = valuation(&d, p).ok_or_else(|| Error::Internal("singular U13".into()))?;
            Ok(LogValue::Exact { coef: q(-val), prime: p })
        }
        (Witness::Orthogonal(k), _) => {
            // p = g·kᵀ in floating point, then U = p^{-1} X p.
            let gf = g.to_f64();
            let n = gf.len();
            let pm: Vec<Vec<f64>> = (0..n).map(|r| (0..n).map(|c| (0..n).map(|a| gf[r][a] * k[c][a]).sum()).collect()).collect();
            let pinv = f64_inverse(&pm).ok_or(Error::Singular)?;
            let xf = data.x.to_f64();
            let u = f64_mul(&f64_mul(&pinv, &xf), &pm);
            let sub: Vec<Vec<f64>> = adj.w1.iter().map(|&r| adj.w3.iter().map(|&c| u[r][c]).collect()).collect();
            let d = f64_det(&sub).abs();
            let scale = if v == Place::Complex { 2.0 } else { 1.0 };
            Ok(LogValue::Float(scale * d.ln()))
        }
        _ => Err(Error::Internal("witness/place mismatch".into())),
    }
}

fn f64_mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let (n, m, l) = (a.len(), b.len(), b.first().map_or(0, |r| r.len()));
    (0..n).map(|r| (0..l).map(|c| (0..m).map(|i| a[r][i] * b[i][c]).sum()).collect()).collect()
}

/// Determinant by partial pivoting.
pub(crate) fn f64_det(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    let mut m = a.to_vec();
    let mut det = 1.0;
    for c in 0..n {
        let piv = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs())).unwrap();
        if m[piv][c] == 0.0 {
            return 0.0;
        }
        if piv != c {
            m.swap(piv, c);
            det = -det;
        }
        det *= m[c][c];
        for r in c + 1..n {
            let f = m[r][c] / m[c][c];
            for x in c..n {
                m[r][x] -= f * m[c][x];
            }
        }
    }
    det
}

fn f64_inverse(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.iter().enumerate().map(|(i, r)| {
        let mut row = r.clone();
        row.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
        row
    }).collect();
    for c in 0..n {
        let piv = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs()))?;
        if m[piv][c].abs() < 1e-300 {
            return None;
        }
        m.swap(piv, c);
        let d = m[c][c];
        for x in m[c].iter_mut() {
            *x /= d;
        }
        for r in 0..n {
            if r != c {
                let f = m[r][c];
                if f != 0.0 {
                    for x in 0..2 * n {
                        m[r][x] -= f * m[c][x];
                    }
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Residual check: is `Y − X` supported on the coordinates of `𝔬`?
pub fn in_affine_o(data: &OrbitData, y: &QMatrix) -> bool {
    let allowed: BTreeSet<(usize, usize)> = block_entries(&data.layout, &filtration_o(&data.layout, 1)).into_iter().collect();
    let d = y.sub(&data.x);
    (0..d.rows()).all(|r| (0..d.cols()).all(|c| d[(r, c)].is_zero() || allowed.contains(&(r, c))))
}

fn o_degree(data: &OrbitData, h: &HomBlock) -> i64 {
    let l = &data.layout;
    l.grading(crate::orbits::Summand { i: h.src.i - 1, j: h.src.j }) - l.grading(h.tgt)
}

fn n_degree(data: &OrbitData, h: &HomBlock) -> i64 {
    data.layout.grading(h.src) - data.layout.grading(h.tgt)
}

/// Entries of `𝔬` of exact degree `t`.
fn o_entries_of_degree(data: &OrbitData, t: i64) -> Vec<(usize, usize)> {
    let blocks: Vec<HomBlock> = filtration_o(&data.layout, t).into_iter().filter(|h| o_degree(data, h) == t).collect();
    block_entries(&data.layout, &blocks)
}

/// Entries of `𝔫` of exact degree `t`.
fn n_entries_of_degree(data: &OrbitData, t: i64) -> Vec<(usize, usize)> {
    let blocks: Vec<HomBlock> = filtration_n(&data.layout, t).into_iter().filter(|h| n_degree(data, h) == t).collect();
    block_entries(&data.layout, &blocks)
}

/// Largest degree of `𝔬`.
fn o_max_degree(data: &OrbitData) -> i64 {
    filtration_o(&data.layout, 1).iter().map(|h| o_degree(data, h)).max().unwrap_or(0)
}

/// `n ∈ N` with `n^{-1} X n = Y`, built degree by degree: at step `t` the
/// residual `n Y n^{-1} − X` lies in `𝔬^{≥t}` and a correction `1 + U_t`,
/// `U_t` of degree `t`, pushes it into `𝔬^{≥t+1}`.
pub fn solve_in_n(data: &OrbitData, y: &QMatrix) -> Result<QMatrix> {
    if !in_affine_o(data, y) {
        return Err(Error::InvalidInput("Y − X has entries outside 𝔬".into()));
    }
    let n = data.n();
    let x = &data.x;
    let mut acc = QMatrix::identity(n);
    let mut yc = y.clone();
    let tmax = o_max_degree(data);
    for t in 1..=tmax {
        let unknowns = n_entries_of_degree(data, t);
        let targets = o_entries_of_degree(data, t);
        let resid = yc.sub(x);
        if targets.iter().all(|&rc| resid[rc].is_zero()) {
            continue;
        }
        // Linear system: ([U, X] + D) vanishes on the degree-t coordinates.
        let mut sys = QMatrix::zeros(targets.len(), unknowns.len());
        for (col, &(a, b)) in unknowns.iter().enumerate() {
            let mut e = QMatrix::zeros(n, n);
            e[(a, b)] = q(1);
            let br = e.bracket(x);
            for (row, &rc) in targets.iter().enumerate() {
                sys[(row, col)] = br[rc].clone();
            }
        }
        let rhs: Vec<Q> = targets.iter().map(|&rc| -resid[rc].clone()).collect();
        let sol = sys.solve(&rhs).ok_or_else(|| Error::NotInOrbit(format!("degree {t} step has no solution")))?;
        let mut n1 = QMatrix::identity(n);
        for (&(a, b), v) in unknowns.iter().zip(&sol) {
            n1[(a, b)] = v.clone();
        }
        yc = n1.mul(&yc).mul(&n1.inverse()?);
        acc = n1.mul(&acc);
        let r2 = yc.sub(x);
        let higher: BTreeSet<(usize, usize)> = block_entries(&data.layout, &filtration_o(&data.layout, t + 1)).into_iter().collect();
        if (0..n).any(|a| (0..n).any(|b| !r2[(a, b)].is_zero() && !higher.contains(&(a, b)))) {
            return Err(Error::Internal(format!("residual not in 𝔬^≥{}", t + 1)));
        }
    }
    if yc != *x {
        return Err(Error::Internal("recursion did not reach X".into()));
    }
    Ok(acc)
}

/// Entries of the nilradical `𝔫` of `R` (degree ≥ 1).
pub fn n_entries(data: &OrbitData) -> Vec<(usize, usize)> {
    block_entries(&data.layout, &filtration_n(&data.layout, 1))
}

/// Orbit-membership oracle: does `XU − UY = Y − X` have a solution `U ∈ 𝔫`?
pub fn n_orbit_member_bruteforce(data: &OrbitData, y: &QMatrix) -> bool {
    let n = data.n();
    let unknowns = n_entries(data);
    let mut sys = QMatrix::zeros(n * n, unknowns.len());
    for (col, &(a, b)) in unknowns.iter().enumerate() {
        let mut e = QMatrix::zeros(n, n);
        e[(a, b)] = q(1);
        let c = data.x.mul(&e).sub(&e.mul(y));
        for r in 0..n {
            for s in 0..n {
                sys[(r * n + s, col)] = c[(r, s)].clone();
            }
        }
    }
    let d = y.sub(&data.x);
    let rhs: Vec<Q> = (0..n * n).map(|i| d[(i / n, i % n)].clone()).collect();
    sys.solve(&rhs).is_some()
}

/// Random element of `N(ℚ)` with small entries.
pub fn random_unipotent<R: Rng>(data: &OrbitData, rng: &mut R) -> QMatrix {
    let mut m = QMatrix::identity(data.n());
    for (a, b) in n_entries(data) {
        let num: i64 = rng.gen_range(-4..=4);
        let den: i64 = rng.gen_range(1..=3);
        m[(a, b)] = Q::new(num.into(), den.into());
    }
    m
}

/// Random invertible rational matrix whose entries have numerators drawn
/// from small multiples of powers of the given prime.
pub fn random_rational_matrix<R: Rng>(n: usize, p: u64, rng: &mut R) -> QMatrix {
    loop {
        let mut m = QMatrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                let num: i64 = rng.gen_range(-6..=6);
                let e: i64 = rng.gen_range(-2..=2);
                let den: i64 = [1, 1, 2, 3, 5][rng.gen_range(0..5)];
                m[(r, c)] = Q::new(num.into(), den.into()) * qpow(p, e);
            }
        }
        if !m.det().is_zero() {
            return m;
        }
    }
}

/// Random invertible element of `G_X(ℚ)`.
pub fn random_centralizer<R: Rng>(data: &OrbitData, rng: &mut R) -> QMatrix {
    let n = data.n();
    let mut sys = QMatrix::zeros(n * n, n * n);
    for a in 0..n {
        for b in 0..n {
            let mut e = QMatrix::zeros(n, n);
            e[(a, b)] = q(1);
            let c = e.bracket(&data.x);
            for r in 0..n {
                for s in 0..n {
                    sys[(r * n + s, a * n + b)] = c[(r, s)].clone();
                }
            }
        }
    }
    let basis = sys.nullspace();
    loop {
        let mut h = QMatrix::zeros(n, n);
        for v in &basis {
            let c = Q::new(rng.gen_range(-5i64..=5).into(), rng.gen_range(1i64..=4).into());
            for i in 0..n * n {
                let add = &c * &v[i];
                h[(i / n, i % n)] += add;
            }
        }
        if !h.det().is_zero() {
            return h;
        }
    }
}

/// Coefficient `c` with `diff = c·line`, if `diff` lies on the line.
pub fn line_coefficient(diff: &[Q], line: &[Q]) -> Option<Q> {
    let ll = dot(line, line);
    if ll.is_zero() {
        return None;
    }
    let c = dot(diff, line) / ll;
    let ok = diff.iter().zip(line).all(|(d, l)| *d == &c * l);
    ok.then_some(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::qf;
    use crate::orbits::NilpotentOrbit;
    use rand::SeedableRng;

    fn data(parts: &[usize]) -> OrbitData {
        OrbitData::new(&NilpotentOrbit::new(crate::orbits::Partition::new(parts.to_vec()))).unwrap()
    }

    #[test]
    fn iwasawa_examples() {
        let g = QMatrix::diag(&[qf(1, 2), q(3)]);
        let h = iwasawa(&g, &Parabolic::borel(2), Place::Padic(2)).unwrap().h;
        assert_eq!(h, LogVec::Padic { prime: 2, coef: vec![q(1), q(0)] });
        let low = QMatrix::from_i64(&[vec![1, 0], vec![5, 1]]);
        let h = iwasawa(&low, &Parabolic::borel(2), Place::Padic(5)).unwrap().h;
        assert_eq!(h.exact().unwrap(), &[q(0), q(0)]);
        for m in 1..4 {
            let g = QMatrix::from_rows(vec![vec![q(1), qpow(3, -m)], vec![q(0), q(1)]]).unwrap();
            let h = iwasawa(&g, &Parabolic::opposite_borel(2), Place::Padic(3)).unwrap();
            assert_eq!(h.h.exact().unwrap(), &[q(m), q(-m)]);
            let Witness::Padic(k) = h.k else { panic!() };
            assert_eq!(valuation(&k.det(), 3), Some(0));
        }
    }

    #[test]
    fn iwasawa_matches_minor_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let g = random_rational_matrix(3, 2, &mut rng);
            let pb = Parabolic::new(vec![vec![1], vec![0, 2]]).unwrap();
            let h = iwasawa(&g, &pb, Place::Padic(2)).unwrap().h;
            let coef = h.exact().unwrap();
            let oracle = iwasawa_minor_oracle(&g, &pb, 2);
            let mut acc = Q::zero();
            let mut partial = Vec::new();
            for b in pb.blocks().iter().rev() {
                acc += &coef[b[0]] * q(b.len() as i64);
                partial.push(acc.clone());
            }
            partial.reverse();
            assert_eq!(partial, oracle);
        }
    }

    #[test]
    fn real_iwasawa_determinant() {
        let g = QMatrix::from_i64(&[vec![2, 1], vec![1, 3]]);
        let h = iwasawa(&g, &Parabolic::borel(2), Place::Real).unwrap().h.to_f64();
        assert!((h[0] + h[1] - 5f64.ln()).abs() < 1e-12);
        let Witness::Orthogonal(k) = iwasawa(&g, &Parabolic::borel(2), Place::Real).unwrap().k else { panic!() };
        let d: f64 = k[0][0] * k[1][0] + k[0][1] * k[1][1];
        assert!(d.abs() < 1e-12);
    }

    #[test]
    fn conjugator_examples() {
        let d = data(&[2, 1]);
        let g = conjugator_from_x(&d, &d.x).unwrap();
        assert_eq!(g.inverse().unwrap().mul(&d.x).mul(&g), d.x);
        let zero = QMatrix::zeros(3, 3);
        assert!(matches!(conjugator_from_x(&d, &zero), Err(Error::NotInOrbit(_))));
    }

    #[test]
    fn gl2_adjacent_jump() {
        let d = data(&[2]);
        let u = qf(4, 3);
        let g = QMatrix::diag(&[q(1), u.clone()]);
        let y = g.inverse().unwrap().mul(&d.x).mul(&g);
        let (b, bb) = (d.pm[0].clone(), d.pm[1].clone());
        let val = u13_logdet(&d, &y, &b, &bb, Place::Padic(2)).unwrap();
        assert_eq!(val, LogValue::Exact { coef: q(-2), prime: 2 });
        let rb = r_value(&d, &b, &g, Place::Padic(2)).unwrap();
        let rbb = r_value(&d, &bb, &g, Place::Padic(2)).unwrap();
        let diff = rbb.sub(&rb).unwrap();
        let adj = adjacency(&d, &b, &bb).unwrap();
        assert_eq!(line_coefficient(diff.exact().unwrap(), &adj.coroot), Some(q(-2)));
    }

    #[test]
    fn solve_in_n_roundtrip() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for parts in [vec![2, 1], vec![3, 2, 1], vec![2, 2, 1], vec![3, 1]] {
            let d = data(&parts);
            assert_eq!(solve_in_n(&d, &d.x).unwrap().inverse().unwrap().mul(&d.x).mul(&solve_in_n(&d, &d.x).unwrap()), d.x);
            for _ in 0..5 {
                let n0 = random_unipotent(&d, &mut rng);
                let y = n0.inverse().unwrap().mul(&d.x).mul(&n0);
                assert!(in_affine_o(&d, &y), "{parts:?}");
                let n = solve_in_n(&d, &y).unwrap();
                assert_eq!(n.inverse().unwrap().mul(&d.x).mul(&n), y);
            }
        }
    }
}
