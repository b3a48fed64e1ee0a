//! Truncated Taylor expansions in one real parameter.
//!
//! A [`Jet`] of order `k` stores `a_0, …, a_k` for `f(t) = Σ a_i t^i + O(t^{k+1})`.
//! Ring operations are available for any numeric scalar, transcendental
//! ones for `f64`.

use num_traits::Num;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Debug, PartialEq)]
pub struct Jet<T> {
    pub coef: Vec<T>,
}

impl<T: Num + Clone> Jet<T> {
    pub fn constant(c: T, order: usize) -> Self {
        let mut coef = vec![T::zero(); order + 1];
        coef[0] = c;
        Jet { coef }
    }

    /// `a + b·t`.
    pub fn affine(a: T, b: T, order: usize) -> Self {
        let mut j = Self::constant(a, order);
        if order >= 1 {
            j.coef[1] = b;
        }
        j
    }

    pub fn order(&self) -> usize {
        self.coef.len() - 1
    }

    pub fn value(&self) -> &T {
        &self.coef[0]
    }

    /// Coefficient of `t^i` (zero beyond the order).
    pub fn get(&self, i: usize) -> T {
        self.coef.get(i).cloned().unwrap_or_else(T::zero)
    }

    pub fn scale(&self, s: &T) -> Self {
        Jet { coef: self.coef.iter().map(|c| c.clone() * s.clone()).collect() }
    }

    pub fn add_scalar(&self, s: &T) -> Self {
        let mut j = self.clone();
        j.coef[0] = j.coef[0].clone() + s.clone();
        j
    }

    /// `1/f`, requires `a_0 ≠ 0`.
    pub fn recip(&self) -> Option<Self> {
        let a0 = self.coef[0].clone();
        if a0.is_zero() {
            return None;
        }
        let k = self.order();
        let mut out = vec![T::zero(); k + 1];
        out[0] = T::one() / a0.clone();
        for i in 1..=k {
            let mut s = T::zero();
            for j in 1..=i {
                s = s + self.coef[j].clone() * out[i - j].clone();
            }
            out[i] = T::zero() - s / a0.clone();
        }
        Some(Jet { coef: out })
    }

    pub fn div(&self, other: &Self) -> Option<Self> {
        Some(self.clone() * other.recip()?)
    }

    pub fn powi(&self, e: u32) -> Self {
        let mut out = Self::constant(T::one(), self.order());
        for _ in 0..e {
            out = out * self.clone();
        }
        out
    }

    /// `f(c·t)`.
    pub fn rescale(&self, c: &T) -> Self {
        let mut f = T::one();
        let mut coef = Vec::with_capacity(self.coef.len());
        for a in &self.coef {
            coef.push(a.clone() * f.clone());
            f = f * c.clone();
        }
        Jet { coef }
    }
}

impl Jet<f64> {
    pub fn exp(&self) -> Self {
        // f' = f·g' solved coefficientwise.
        let k = self.order();
        let mut out = vec![0.0; k + 1];
        out[0] = self.coef[0].exp();
        for i in 1..=k {
            let mut s = 0.0;
            for j in 1..=i {
                s += j as f64 * self.coef[j] * out[i - j];
            }
            out[i] = s / i as f64;
        }
        Jet { coef: out }
    }

    /// Natural logarithm, requires `a_0 > 0`.
    pub fn ln(&self) -> Option<Self> {
        let a0 = self.coef[0];
        if a0 <= 0.0 {
            return None;
        }
        let k = self.order();
        let mut out = vec![0.0; k + 1];
        out[0] = a0.ln();
        for i in 1..=k {
            let mut s = 0.0;
            for j in 1..i {
                s += j as f64 * out[j] * self.coef[i - j];
            }
            out[i] = (self.coef[i] - s / i as f64) / a0;
        }
        Some(Jet { coef: out })
    }

    /// `x^{−f}` for a positive base `x`.
    pub fn base_pow_neg(x: f64, f: &Self) -> Self {
        f.scale(&(-x.ln())).exp()
    }

    /// `k!·a_k`, the k-th derivative at 0.
    pub fn derivative(&self, k: usize) -> f64 {
        self.get(k) * (1..=k).map(|i| i as f64).product::<f64>()
    }
}

impl<T: Num + Clone> Add for Jet<T> {
    type Output = Jet<T>;
    fn add(self, o: Jet<T>) -> Jet<T> {
        let k = self.order().min(o.order());
        Jet { coef: (0..=k).map(|i| self.coef[i].clone() + o.coef[i].clone()).collect() }
    }
}

impl<T: Num + Clone> Sub for Jet<T> {
    type Output = Jet<T>;
    fn sub(self, o: Jet<T>) -> Jet<T> {
        let k = self.order().min(o.order());
        Jet { coef: (0..=k).map(|i| self.coef[i].clone() - o.coef[i].clone()).collect() }
    }
}

impl<T: Num + Clone> Mul for Jet<T> {
    type Output = Jet<T>;
    fn mul(self, o: Jet<T>) -> Jet<T> {
        let k = self.order().min(o.order());
        let mut coef = vec![T::zero(); k + 1];
        for i in 0..=k {
            for j in 0..=k - i {
                coef[i + j] = coef[i + j].clone() + self.coef[i].clone() * o.coef[j].clone();
            }
        }
        Jet { coef }
    }
}

impl<T: Num + Clone> Neg for Jet<T> {
    type Output = Jet<T>;
    fn neg(self) -> Jet<T> {
        Jet { coef: self.coef.into_iter().map(|c| T::zero() - c).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{q, Q};

    #[test]
    fn exp_log_roundtrip() {
        let f = Jet::affine(0.3, 1.7, 5);
        let e = f.exp();
        for i in 0..=5 {
            let expect = 0.3f64.exp() * 1.7f64.powi(i as i32) / (1..=i).map(|x| x as f64).product::<f64>();
            assert!((e.coef[i] - expect).abs() < 1e-12);
        }
        let back = e.ln().unwrap();
        assert!((back.coef[0] - 0.3).abs() < 1e-12 && (back.coef[1] - 1.7).abs() < 1e-12);
        assert!(back.coef[2..].iter().all(|c| c.abs() < 1e-12));
    }

    #[test]
    fn exact_reciprocal() {
        // 1/(1 − t) = Σ t^i.
        let f: Jet<Q> = Jet::affine(q(1), q(-1), 4);
        assert_eq!(f.recip().unwrap().coef, vec![q(1); 5]);
        assert!(Jet::affine(q(0), q(1), 2).recip().is_none());
    }
}
