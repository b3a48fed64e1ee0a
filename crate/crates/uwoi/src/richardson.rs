//! Richardson parabolics of the standard nilpotent and their ε-parametrization.
//!
//! An ε-map is an `r × |J|` 0/1 matrix whose column `j` has exactly `j` ones
//! and whose rows are nondecreasing along `J`. Row `k` picks which summands
//! `V_j^i` enter the `k`-th step of a flag stable under `X`.

use crate::error::{Error, Result};
use crate::linalg::QMatrix;
use crate::orbits::{richardson_orbit, standard_nilpotent, BasisLayout, NilpotentOrbit, Summand};
use crate::roots::{invert_perm, parabolics_of, Levi, Parabolic};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// `ε_{k,j}` for `1 ≤ k ≤ r`, `j ∈ J`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EpsilonMap {
    pub support: Vec<usize>,
    /// `rows[k-1][t]` is `ε_{k, support[t]}`.
    pub rows: Vec<Vec<u8>>,
}

impl EpsilonMap {
    pub fn r(&self) -> usize {
        self.rows.len()
    }

    fn col(&self, j: usize) -> Option<usize> {
        self.support.iter().position(|&x| x == j)
    }

    /// `ε_{k,j}` (1-based `k`); zero for `j ∉ J`.
    pub fn get(&self, k: usize, j: usize) -> u8 {
        match self.col(j) {
            Some(t) if k >= 1 && k <= self.r() => self.rows[k - 1][t],
            _ => 0,
        }
    }

    /// `c_{k,j} = Σ_{l ≤ k} ε_{l,j}`.
    pub fn c(&self, k: usize, j: usize) -> usize {
        (1..=k).map(|l| self.get(l, j) as usize).sum()
    }

    /// Column sums and row monotonicity.
    pub fn validate(&self, o: &NilpotentOrbit) -> Result<()> {
        if self.support != o.support || self.r() != o.r {
            return Err(Error::InvalidInput("ε has the wrong shape for this orbit".into()));
        }
        for (t, &j) in self.support.iter().enumerate() {
            let s: usize = self.rows.iter().map(|row| row[t] as usize).sum();
            if s != j {
                return Err(Error::InvalidInput(format!("column {j} of ε sums to {s}")));
            }
        }
        for row in &self.rows {
            if row.iter().any(|&e| e > 1) || row.windows(2).any(|w| w[0] > w[1]) {
                return Err(Error::InvalidInput("ε row not monotone 0/1".into()));
            }
        }
        Ok(())
    }

    /// Kernel flag: `ξ_{k,j} = 1` iff `k ≤ j`.
    pub fn kernel_flag(o: &NilpotentOrbit) -> Self {
        let rows = (1..=o.r).map(|k| o.support.iter().map(|&j| u8::from(k <= j)).collect()).collect();
        EpsilonMap { support: o.support.clone(), rows }
    }

    /// Image flag: `ξ̃_{k,j} = 1` iff `k > r − j`.
    pub fn image_flag(o: &NilpotentOrbit) -> Self {
        let rows = (1..=o.r).map(|k| o.support.iter().map(|&j| u8::from(k + j > o.r)).collect()).collect();
        EpsilonMap { support: o.support.clone(), rows }
    }

    /// Swap rows `k` and `k+1` (1-based).
    pub fn swap_rows(&self, k: usize) -> Self {
        let mut e = self.clone();
        e.rows.swap(k - 1, k);
        e
    }
}

/// All ε-maps of the orbit, as nested chains of row sets `S_j = {k : ε_{k,j} = 1}`.
pub fn epsilon_set(o: &NilpotentOrbit) -> Vec<EpsilonMap> {
    let r = o.r;
    let mut out = Vec::new();
    if r == 0 {
        return out;
    }
    // Choose S_{j_1} ⊂ S_{j_2} ⊂ … ⊂ S_{j_m} = {1..r} with |S_j| = j.
    fn rec(o: &NilpotentOrbit, t: usize, prev: &[bool], chain: &mut Vec<Vec<bool>>, out: &mut Vec<EpsilonMap>) {
        if t == o.support.len() {
            let rows = (0..o.r).map(|k| chain.iter().map(|s| u8::from(s[k])).collect()).collect();
            out.push(EpsilonMap { support: o.support.clone(), rows });
            return;
        }
        let need = o.support[t] - prev.iter().filter(|&&b| b).count();
        let free: Vec<usize> = (0..o.r).filter(|&k| !prev[k]).collect();
        for extra in combinations(&free, need) {
            let mut s = prev.to_vec();
            for k in extra {
                s[k] = true;
            }
            chain.push(s.clone());
            rec(o, t + 1, &s, chain, out);
            chain.pop();
        }
    }
    rec(o, 0, &vec![false; r], &mut Vec::new(), &mut out);
    out.sort();
    out
}

fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if items.len() < k {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (i, &first) in items.iter().enumerate() {
        for mut rest in combinations(&items[i + 1..], k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// `r!/∏ gap!` where the gaps are cut out of `{1..r}` by `J`.
pub fn epsilon_count_formula(o: &NilpotentOrbit) -> u128 {
    let mut denom = 1u128;
    let mut prev = 0;
    for &j in &o.support {
        denom *= crate::roots::factorial(j - prev);
        prev = j;
    }
    crate::roots::factorial(o.r) / denom
}

/// The parabolic stabilizing the flag `E_•(ε)`: block `k` is the sum of
/// `V_j^{c_{k,j}}` over `j` with `ε_{k,j} = 1`.
pub fn epsilon_to_parabolic(eps: &EpsilonMap, layout: &BasisLayout) -> Result<Parabolic> {
    let mut blocks = Vec::new();
    for k in 1..=eps.r() {
        let mut b = Vec::new();
        for &j in &eps.support {
            if eps.get(k, j) == 1 {
                b.extend(layout.positions(Summand { i: eps.c(k, j), j }));
            }
        }
        blocks.push(b);
    }
    Parabolic::new(blocks)
}

/// Shared per-orbit data: `X`, its layout, the Levi `M`, `P_0`, ℛ(X), 𝒫(M).
#[derive(Clone, Debug)]
pub struct OrbitData {
    pub orbit: NilpotentOrbit,
    pub x: QMatrix,
    pub layout: BasisLayout,
    /// Kernel-flag Levi: block `i` is the height-`i` layer.
    pub m: Levi,
    /// Kernel-flag parabolic.
    pub p0: Parabolic,
    pub epsilons: Vec<EpsilonMap>,
    /// `ℛ(X)`, aligned with `epsilons`.
    pub richardson: Vec<Parabolic>,
    /// `𝒫(M)`.
    pub pm: Vec<Parabolic>,
}

impl OrbitData {
    pub fn new(orbit: &NilpotentOrbit) -> Result<Self> {
        let (x, layout) = standard_nilpotent(orbit);
        let layers: Vec<Vec<usize>> = (1..=orbit.r).map(|i| layout.layer(i)).collect();
        let p0 = Parabolic::new(layers)?;
        let m = p0.levi();
        let epsilons = epsilon_set(orbit);
        let richardson = epsilons.iter().map(|e| epsilon_to_parabolic(e, &layout)).collect::<Result<Vec<_>>>()?;
        let pm = parabolics_of(&m);
        Ok(OrbitData { orbit: orbit.clone(), x, layout, m, p0, epsilons, richardson, pm })
    }

    pub fn n(&self) -> usize {
        self.orbit.n()
    }

    /// Index in `𝒫(M)`.
    pub fn pm_index(&self, p: &Parabolic) -> Option<usize> {
        self.pm.iter().position(|x| x == p)
    }

    /// `ℒ𝒮(X)`: coarsenings of members of `ℛ(X)`.
    pub fn ls(&self) -> BTreeSet<Parabolic> {
        let mut out = BTreeSet::new();
        for p in &self.richardson {
            for runs in compositions(p.num_blocks()) {
                out.insert(p.merge(&runs));
            }
        }
        out
    }

    /// The ε of a Richardson parabolic.
    pub fn epsilon_of(&self, p: &Parabolic) -> Option<&EpsilonMap> {
        self.richardson.iter().position(|x| x == p).map(|i| &self.epsilons[i])
    }
}

/// Compositions of `k` (lists of positive run lengths).
pub fn compositions(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 1..=k {
        for mut rest in compositions(k - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// The minimal-length `w` with `w^{-1} P w = target`: it maps each block of
/// `target` onto the matching block of `P` in increasing order.
pub fn matching_permutation(p: &Parabolic, target: &Parabolic) -> Result<Vec<usize>> {
    if p.sizes() != target.sizes() {
        return Err(Error::InvalidInput("parabolics are not conjugate".into()));
    }
    let mut w = vec![0; p.n()];
    for (b, tb) in p.blocks().iter().zip(target.blocks()) {
        for (&dst, &src) in b.iter().zip(tb) {
            w[src] = dst;
        }
    }
    Ok(w)
}

/// `P ↦ (P̃, w_P)` on `𝒫(M)` and on `ℱ(M)`.
pub fn richardson_map(data: &OrbitData, p: &Parabolic) -> Result<(Parabolic, Vec<usize>)> {
    if !data.m.is_contained_in(&p.levi()) {
        return Err(Error::InvalidInput("parabolic does not contain M".into()));
    }
    let in_pm = p.num_blocks() == data.m.rank();
    if in_pm {
        let target = data
            .richardson
            .iter()
            .find(|r| r.sizes() == p.sizes())
            .ok_or_else(|| Error::Internal("no Richardson parabolic with this composition".into()))?;
        let w = matching_permutation(p, target)?;
        return Ok((target.clone(), w));
    }
    // Refine each block of P by its M-blocks in increasing order of height.
    let mut blocks = Vec::new();
    let mut runs = Vec::new();
    for qb in p.blocks() {
        let inside: Vec<Vec<usize>> = data.p0.blocks().iter().filter(|b| qb.contains(&b[0])).cloned().collect();
        runs.push(inside.len());
        blocks.extend(inside);
    }
    let fine = Parabolic::new(blocks)?;
    let (fine_tilde, w_fine) = richardson_map(data, &fine)?;
    let q_tilde = fine_tilde.merge(&runs);
    debug_assert_eq!(p.conj(&w_fine), q_tilde);
    let w = matching_permutation(p, &q_tilde)?;
    Ok((q_tilde, w))
}

/// Data attached to a pair of adjacent parabolics in `𝒫(M)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjacencyData {
    pub p1: Parabolic,
    pub p2: Parabolic,
    /// Smallest common parabolic.
    pub q: Parabolic,
    /// Position `s` (0-based) of the swapped pair of blocks.
    pub s: usize,
    /// 1-based flag index `k` of the transposition `(k, k+1)`.
    pub k: usize,
    /// Oriented ε: row `k` is dominated by row `k+1`.
    pub eps: EpsilonMap,
    /// Richardson images of `P₁` and `P₂`.
    pub p1_tilde: Parabolic,
    pub p2_tilde: Parabolic,
    pub j1: Vec<usize>,
    pub j2: Vec<usize>,
    pub r1: usize,
    pub r2: usize,
    pub w1: Vec<usize>,
    pub w2: Vec<usize>,
    pub w3: Vec<usize>,
    /// Coroot of `P₁` separating the swapped blocks.
    pub coroot: Vec<crate::linalg::Q>,
}

/// Adjacency data of `(P₁, P₂)`.
pub fn adjacency(data: &OrbitData, p1: &Parabolic, p2: &Parabolic) -> Result<AdjacencyData> {
    let (b1, b2) = (p1.blocks(), p2.blocks());
    if data.pm_index(p1).is_none() || data.pm_index(p2).is_none() || b1.len() != b2.len() {
        return Err(Error::NotAdjacent);
    }
    let diff: Vec<usize> = (0..b1.len()).filter(|&i| b1[i] != b2[i]).collect();
    if diff.len() != 2 || diff[1] != diff[0] + 1 || b1[diff[0]] != b2[diff[1]] || b1[diff[1]] != b2[diff[0]] {
        return Err(Error::NotAdjacent);
    }
    let s = diff[0];
    let k = s + 1;
    let mut runs = vec![1; b1.len() - 1];
    runs[s] = 2;
    let q = p1.merge(&runs);
    let (p1_tilde, _) = richardson_map(data, p1)?;
    let (p2_tilde, _) = richardson_map(data, p2)?;
    let e1 = data.epsilon_of(&p1_tilde).ok_or_else(|| Error::Internal("ε of P̃₁".into()))?.clone();
    let downward = e1.support.iter().any(|&j| e1.get(k, j) == 1 && e1.get(k + 1, j) == 0);
    let eps = if downward { e1.swap_rows(k) } else { e1 };
    let j1: Vec<usize> = eps.support.iter().copied().filter(|&j| eps.get(k, j) == 1 && eps.get(k + 1, j) == 1).collect();
    let j2: Vec<usize> = eps.support.iter().copied().filter(|&j| eps.get(k, j) == 0 && eps.get(k + 1, j) == 1).collect();
    let layout = &data.layout;
    let collect = |js: &[usize], shift: usize| -> Vec<usize> {
        js.iter().flat_map(|&j| layout.positions(Summand { i: eps.c(k - 1, j) + shift, j })).collect()
    };
    let w1 = collect(&j1, 1);
    let w2 = collect(&j2, 1);
    let w3 = collect(&j1, 2);
    let r1 = j1.iter().map(|&j| data.orbit.dj(j)).sum();
    let r2 = j2.iter().map(|&j| data.orbit.dj(j)).sum();
    let coroot = crate::roots::coroot_vector(data.n(), &b1[s], &b1[s + 1]);
    Ok(AdjacencyData { p1: p1.clone(), p2: p2.clone(), q, s, k, eps, p1_tilde, p2_tilde, j1, j2, r1, r2, w1, w2, w3, coroot })
}

/// All adjacent pairs `(P₁, P₂)` of `𝒫(M)`, each unordered pair once.
pub fn adjacent_pairs(data: &OrbitData) -> Vec<(Parabolic, Parabolic)> {
    let mut out = Vec::new();
    for p in &data.pm {
        for s in 0..p.num_blocks().saturating_sub(1) {
            let mut b = p.blocks().to_vec();
            b.swap(s, s + 1);
            let p2 = Parabolic::new(b).expect("swap");
            if p < &p2 {
                out.push((p.clone(), p2));
            }
        }
    }
    out
}

/// Brute force: every ordered set partition `P` of `0..n` with `X ∈ 𝔫_P` and
/// Richardson orbit equal to the orbit of `X`.
pub fn bruteforce_richardson(o: &NilpotentOrbit) -> Vec<Parabolic> {
    let (x, _) = standard_nilpotent(o);
    let n = o.n();
    let nonzero: Vec<(usize, usize)> =
        (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).filter(|&ab| !x[ab].is_zero()).collect();
    let mut out = Vec::new();
    let mut assign = vec![0usize; n];
    // Enumerate surjections 0..n → 0..m for every m.
    for m in 1..=n {
        let total = (m as u64).pow(n as u32);
        for code in 0..total {
            let mut c = code;
            for slot in assign.iter_mut() {
                *slot = (c % m as u64) as usize;
                c /= m as u64;
            }
            if nonzero.iter().any(|&(a, b)| assign[a] >= assign[b]) {
                continue;
            }
            let mut sizes = vec![0; m];
            for &a in &assign {
                sizes[a] += 1;
            }
            if sizes.contains(&0) {
                continue;
            }
            if richardson_orbit(&sizes).ok().as_ref() != Some(&o.partition) {
                continue;
            }
            let mut blocks = vec![Vec::new(); m];
            for (a, &b) in assign.iter().enumerate() {
                blocks[b].push(a);
            }
            out.push(Parabolic::new(blocks).expect("surjection"));
        }
    }
    out.sort();
    out
}

/// `w_P` in one-line notation, 1-based.
pub fn perm_one_based(w: &[usize]) -> Vec<usize> {
    w.iter().map(|a| a + 1).collect()
}

/// Checks `w^{-1}Pw = target`.
pub fn conjugates_to(p: &Parabolic, w: &[usize], target: &Parabolic) -> bool {
    &p.conj(w) == target && p.act(&invert_perm(w)) == *target
}

#[cfg(test)]
mod tests {
    use super::*;

    fn orbit(parts: &[usize]) -> NilpotentOrbit {
        NilpotentOrbit::new(crate::orbits::Partition::new(parts.to_vec()))
    }

    #[test]
    fn epsilon_counts() {
        assert_eq!(epsilon_set(&orbit(&[2, 1])).len(), 2);
        assert_eq!(epsilon_set(&orbit(&[2, 2])).len(), 1);
        assert_eq!(epsilon_set(&orbit(&[4])).len(), 1);
        for part in crate::orbits::Partition::all(6) {
            let o = NilpotentOrbit::new(part);
            assert_eq!(epsilon_set(&o).len() as u128, epsilon_count_formula(&o));
        }
    }

    #[test]
    fn kernel_and_image_flags() {
        let o = orbit(&[2, 1]);
        let d = OrbitData::new(&o).unwrap();
        let p0 = epsilon_to_parabolic(&EpsilonMap::kernel_flag(&o), &d.layout).unwrap();
        assert_eq!(p0, Parabolic::standard(&[2, 1]));
        let pt = epsilon_to_parabolic(&EpsilonMap::image_flag(&o), &d.layout).unwrap();
        assert_eq!(pt.sizes(), vec![1, 2]);
        assert!(pt.nilradical_contains(&d.x));
        // Image flag: first step is Im X = span(e^1_{1,2}).
        assert_eq!(pt.blocks()[0], d.layout.positions(Summand { i: 1, j: 2 }));
        let z = orbit(&[1, 1, 1]);
        let dz = OrbitData::new(&z).unwrap();
        assert_eq!(dz.richardson, vec![Parabolic::whole(3)]);
    }

    #[test]
    fn richardson_map_examples() {
        let o = orbit(&[2, 1]);
        let d = OrbitData::new(&o).unwrap();
        let (t, w) = richardson_map(&d, &d.p0).unwrap();
        assert_eq!(t, d.p0);
        assert_eq!(w, vec![0, 1, 2]);
        let other = d.pm.iter().find(|p| **p != d.p0).unwrap();
        let (t, w) = richardson_map(&d, other).unwrap();
        assert!(t.nilradical_contains(&d.x));
        assert_eq!(richardson_orbit(&t.sizes()).unwrap(), o.partition);
        assert!(conjugates_to(other, &w, &t));
        let o22 = orbit(&[2, 2]);
        let d22 = OrbitData::new(&o22).unwrap();
        let images: BTreeSet<_> = d22.pm.iter().map(|p| richardson_map(&d22, p).unwrap().0).collect();
        assert_eq!(images.len(), 1);
    }

    #[test]
    fn adjacency_examples() {
        let d = OrbitData::new(&orbit(&[2, 1])).unwrap();
        let pairs = adjacent_pairs(&d);
        assert_eq!(pairs.len(), 1);
        let a = adjacency(&d, &pairs[0].0, &pairs[0].1).unwrap();
        assert_eq!((a.r1, a.r2), (1, 1));
        assert_eq!((a.j1.clone(), a.j2.clone()), (vec![2], vec![1]));
        let d22 = OrbitData::new(&orbit(&[2, 2])).unwrap();
        let pr = &adjacent_pairs(&d22)[0];
        let a = adjacency(&d22, &pr.0, &pr.1).unwrap();
        assert_eq!(a.r2, 0);
        assert!(a.j2.is_empty());
        assert_eq!(adjacency(&d22, &pr.0, &pr.0), Err(Error::NotAdjacent));
    }
}
