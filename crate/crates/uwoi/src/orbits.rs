//! Partitions, nilpotent orbits of gl(n), the standard nilpotent matrix and
//! the decomposition of its centralizer.

use crate::error::{Error, Result};
use crate::linalg::{q, QMatrix};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A partition stored with parts in weakly decreasing order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    /// Builds a partition from parts in any order; zero parts are dropped.
    pub fn new(mut parts: Vec<usize>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition { parts }
    }

    /// Rejects input that is not already weakly decreasing and positive.
    pub fn from_sorted(parts: Vec<usize>) -> Result<Self> {
        if parts.contains(&0) || parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidInput(format!("not a partition: {parts:?}")));
        }
        Ok(Partition { parts })
    }

    /// Parses `"3,2,1"`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: std::result::Result<Vec<usize>, _> =
            s.split(',').filter(|t| !t.trim().is_empty()).map(|t| t.trim().parse::<usize>()).collect();
        let parts = parts.map_err(|_| Error::InvalidInput(format!("bad partition {s:?}")))?;
        if parts.contains(&0) {
            return Err(Error::InvalidInput(format!("zero part in {s:?}")));
        }
        Ok(Partition::new(parts))
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn n(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// The zero orbit `(1^n)`.
    pub fn zero_orbit(n: usize) -> Self {
        Partition { parts: vec![1; n] }
    }

    /// Conjugate partition.
    pub fn transpose(&self) -> Self {
        let Some(&largest) = self.parts.first() else { return self.clone() };
        let parts = (1..=largest).map(|k| self.parts.iter().filter(|&&p| p >= k).count()).collect();
        Partition { parts }
    }

    /// All partitions of `n`, in reverse lexicographic order.
    pub fn all(n: usize) -> Vec<Partition> {
        fn rec(rem: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
            if rem == 0 {
                out.push(Partition { parts: cur.clone() });
                return;
            }
            for p in (1..=rem.min(max)).rev() {
                cur.push(p);
                rec(rem - p, p, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(n, n, &mut Vec::new(), &mut out);
        out
    }
}

pub fn transpose(p: &Partition) -> Partition {
    p.transpose()
}

/// Type-A Lusztig–Spaltenstein induction: pad the block orbits with zeros
/// and add them componentwise.
pub fn induce_orbit(levi_blocks: &[usize], block_orbits: &[Partition]) -> Result<Partition> {
    if levi_blocks.len() != block_orbits.len() {
        return Err(Error::SizeMismatch("one orbit per Levi block is required".into()));
    }
    let mut sum: Vec<usize> = Vec::new();
    for (&size, orbit) in levi_blocks.iter().zip(block_orbits) {
        if orbit.n() != size {
            return Err(Error::SizeMismatch(format!("orbit {:?} is not a partition of {size}", orbit.parts())));
        }
        if sum.len() < orbit.len() {
            sum.resize(orbit.len(), 0);
        }
        for (s, &p) in sum.iter_mut().zip(orbit.parts()) {
            *s += p;
        }
    }
    Ok(Partition::new(sum))
}

/// Orbit induced from the zero orbit of the Levi with the given block sizes.
pub fn richardson_orbit(composition: &[usize]) -> Result<Partition> {
    if composition.contains(&0) {
        return Err(Error::InvalidInput("composition with a zero block".into()));
    }
    let zeros: Vec<Partition> = composition.iter().map(|&c| Partition::zero_orbit(c)).collect();
    induce_orbit(composition, &zeros)
}

/// Jordan data of a nilpotent orbit.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NilpotentOrbit {
    pub partition: Partition,
    /// `d[j-1]` is the number of parts equal to `j`, for `1 ≤ j ≤ r`.
    pub d: Vec<usize>,
    pub r: usize,
    /// Sizes `j` that occur, ascending.
    pub support: Vec<usize>,
}

impl NilpotentOrbit {
    pub fn new(partition: Partition) -> Self {
        let r = partition.parts().first().copied().unwrap_or(0);
        let mut d = vec![0; r];
        for &p in partition.parts() {
            d[p - 1] += 1;
        }
        let support = (1..=r).filter(|&j| d[j - 1] > 0).collect();
        NilpotentOrbit { partition, d, r, support }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(Self::new(Partition::parse(s)?))
    }

    pub fn n(&self) -> usize {
        self.partition.n()
    }

    /// `d_j` with the 1-based convention, zero outside `1..=r`.
    pub fn dj(&self, j: usize) -> usize {
        if j >= 1 && j <= self.r {
            self.d[j - 1]
        } else {
            0
        }
    }

    /// Number of distinct part sizes.
    pub fn inv(&self) -> usize {
        self.support.len()
    }

    /// Every size `1..=r` occurs.
    pub fn is_simple(&self) -> bool {
        self.inv() == self.r
    }

    /// Block sizes `n_i = d_i + … + d_r` of the kernel-flag Levi, `i = 1..r`.
    pub fn levi_sizes(&self) -> Vec<usize> {
        (1..=self.r).map(|i| (i..=self.r).map(|j| self.dj(j)).sum()).collect()
    }

    /// Rectangular orbits have a single part size.
    pub fn is_rectangular(&self) -> bool {
        self.inv() == 1
    }
}

pub fn is_simple(o: &NilpotentOrbit) -> bool {
    o.is_simple()
}

/// The summand `V_j^i`: chains of length `j` at height `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Summand {
    pub i: usize,
    pub j: usize,
}

/// Basis `e^i_{k,j}` of the standard nilpotent, ordered by `i` ascending,
/// then `j` descending, then `k` ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisLayout {
    pub r: usize,
    pub d: Vec<usize>,
    index: BTreeMap<(usize, usize, usize), usize>,
    labels: Vec<(usize, usize, usize)>,
}

impl BasisLayout {
    pub fn new(o: &NilpotentOrbit) -> Self {
        let mut labels = Vec::new();
        for i in 1..=o.r {
            for j in (i..=o.r).rev() {
                for k in 1..=o.dj(j) {
                    labels.push((i, k, j));
                }
            }
        }
        let index = labels.iter().enumerate().map(|(p, &l)| (l, p)).collect();
        BasisLayout { r: o.r, d: o.d.clone(), index, labels }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    fn dj(&self, j: usize) -> usize {
        if j >= 1 && j <= self.r {
            self.d[j - 1]
        } else {
            0
        }
    }

    /// Position of `e^i_{k,j}` (0-based).
    pub fn pos(&self, i: usize, k: usize, j: usize) -> Option<usize> {
        self.index.get(&(i, k, j)).copied()
    }

    /// Label `(i,k,j)` of a position.
    pub fn label(&self, pos: usize) -> (usize, usize, usize) {
        self.labels[pos]
    }

    /// Grading `p(V_j^i) = (i−1)(2r−i+2)/2 + r−j+1`.
    pub fn grading(&self, s: Summand) -> i64 {
        let (i, j, r) = (s.i as i64, s.j as i64, self.r as i64);
        (i - 1) * (2 * r - i + 2) / 2 + r - j + 1
    }

    /// Nonzero summands in basis order.
    pub fn summands(&self) -> Vec<Summand> {
        let mut out = Vec::new();
        for i in 1..=self.r {
            for j in (i..=self.r).rev() {
                if self.dj(j) > 0 {
                    out.push(Summand { i, j });
                }
            }
        }
        out
    }

    /// Basis positions of a summand, by increasing `k`.
    pub fn positions(&self, s: Summand) -> Vec<usize> {
        (1..=self.dj(s.j)).filter_map(|k| self.pos(s.i, k, s.j)).collect()
    }

    pub fn summand_of(&self, pos: usize) -> Summand {
        let (i, _, j) = self.labels[pos];
        Summand { i, j }
    }

    /// Positions of height `i` (the `i`-th block of the kernel-flag Levi).
    pub fn layer(&self, i: usize) -> Vec<usize> {
        (0..self.n()).filter(|&p| self.labels[p].0 == i).collect()
    }
}

/// The 0/1 matrix sending `e^i_{k,j}` to `e^{i−1}_{k,j}` and the bottom of each
/// chain to zero, together with its basis layout.
pub fn standard_nilpotent(o: &NilpotentOrbit) -> (QMatrix, BasisLayout) {
    let layout = BasisLayout::new(o);
    let n = layout.n();
    let mut x = QMatrix::zeros(n, n);
    for p in 0..n {
        let (i, k, j) = layout.label(p);
        if i > 1 {
            let t = layout.pos(i - 1, k, j).expect("chain below exists");
            x[(t, p)] = q(1);
        }
    }
    (x, layout)
}

/// A block `Hom(V_src → V_tgt)` of matrix coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HomBlock {
    pub src: Summand,
    pub tgt: Summand,
}

impl HomBlock {
    /// Matrix entries `(row, col)` = (target position, source position).
    pub fn entries(&self, layout: &BasisLayout) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for &r in &layout.positions(self.tgt) {
            for &c in &layout.positions(self.src) {
                out.push((r, c));
            }
        }
        out
    }
}

/// Levi factor, dimensions and graded pieces of the centralizer of `X`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CentralizerDecomposition {
    /// `d_j` for `j ∈ J`: the Levi factor `∏ GL(d_j)`.
    pub levi_factor: Vec<usize>,
    pub dim_levi: usize,
    pub dim_unipotent: usize,
    pub dim: usize,
    /// Largest filtration index with a nonzero piece.
    pub t_max: i64,
}

impl CentralizerDecomposition {
    pub fn new(o: &NilpotentOrbit) -> Self {
        let levi_factor: Vec<usize> = o.support.iter().map(|&j| o.dj(j)).collect();
        let dim_levi = levi_factor.iter().map(|d| d * d).sum();
        let dim = o.levi_sizes().iter().map(|m| m * m).sum();
        let layout = BasisLayout::new(o);
        let t_max = all_homs(&layout).iter().map(|h| layout.grading(h.src) - layout.grading(h.tgt)).max().unwrap_or(0);
        CentralizerDecomposition { levi_factor, dim_levi, dim_unipotent: dim - dim_levi, dim, t_max }
    }
}

pub fn centralizer(o: &NilpotentOrbit) -> CentralizerDecomposition {
    CentralizerDecomposition::new(o)
}

fn all_homs(layout: &BasisLayout) -> Vec<HomBlock> {
    let s = layout.summands();
    let mut out = Vec::new();
    for &src in &s {
        for &tgt in &s {
            out.push(HomBlock { src, tgt });
        }
    }
    out
}

/// `𝔫^{≥t}`: blocks whose grading drops by at least `t`.
pub fn filtration_n(layout: &BasisLayout, t: i64) -> Vec<HomBlock> {
    all_homs(layout)
        .into_iter()
        .filter(|h| layout.grading(h.src) - layout.grading(h.tgt) >= t)
        .collect()
}

/// `𝔬^{≥t}`: blocks from `V_j^i` with `i > 1` into `V_{j'}^{i'}` with
/// `p(V_j^{i−1}) − p(V_{j'}^{i'}) ≥ t`.
pub fn filtration_o(layout: &BasisLayout, t: i64) -> Vec<HomBlock> {
    all_homs(layout)
        .into_iter()
        .filter(|h| {
            h.src.i > 1 && layout.grading(Summand { i: h.src.i - 1, j: h.src.j }) - layout.grading(h.tgt) >= t
        })
        .collect()
}

/// Matrix coordinates `(row, col)` covered by a list of blocks.
pub fn block_entries(layout: &BasisLayout, blocks: &[HomBlock]) -> Vec<(usize, usize)> {
    let mut v: Vec<(usize, usize)> = blocks.iter().flat_map(|b| b.entries(layout)).collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// Kernel dimension of `A ↦ AX − XA`, the brute-force centralizer dimension.
pub fn centralizer_dim_bruteforce(x: &QMatrix) -> usize {
    let n = x.rows();
    let mut sys = QMatrix::zeros(n * n, n * n);
    for a in 0..n {
        for b in 0..n {
            let mut e = QMatrix::zeros(n, n);
            e[(a, b)] = q(1);
            let c = e.bracket(x);
            for r in 0..n {
                for s in 0..n {
                    sys[(r * n + s, a * n + b)] = c[(r, s)].clone();
                }
            }
        }
    }
    n * n - sys.rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::jordan_type;

    fn p(v: &[usize]) -> Partition {
        Partition::new(v.to_vec())
    }

    #[test]
    fn transposes() {
        assert_eq!(p(&[3, 1]).transpose(), p(&[2, 1, 1]));
        assert_eq!(p(&[4]).transpose(), p(&[1, 1, 1, 1]));
        assert_eq!(p(&[2, 2, 1]).transpose(), p(&[3, 2]));
    }

    #[test]
    fn induction_examples() {
        let ones = vec![p(&[1]), p(&[1]), p(&[1])];
        assert_eq!(induce_orbit(&[1, 1, 1], &ones).unwrap(), p(&[3]));
        assert_eq!(induce_orbit(&[2, 1], &[p(&[1, 1]), p(&[1])]).unwrap(), p(&[2, 1]));
        assert!(induce_orbit(&[2, 1], &[p(&[1]), p(&[1])]).is_err());
        let stage = induce_orbit(&[1, 1], &[p(&[1]), p(&[1])]).unwrap();
        assert_eq!(induce_orbit(&[2, 1], &[stage, p(&[1])]).unwrap(), p(&[3]));
    }

    #[test]
    fn richardson_examples() {
        assert_eq!(richardson_orbit(&[2, 1]).unwrap(), p(&[2, 1]));
        assert_eq!(richardson_orbit(&[1, 1, 1, 1]).unwrap(), p(&[4]));
        assert_eq!(richardson_orbit(&[3, 2, 1]).unwrap(), p(&[3, 2, 1]));
    }

    #[test]
    fn standard_nilpotent_examples() {
        let (x, _) = standard_nilpotent(&NilpotentOrbit::new(p(&[2])));
        assert_eq!(x, QMatrix::from_i64(&[vec![0, 1], vec![0, 0]]));
        let (x, l) = standard_nilpotent(&NilpotentOrbit::new(p(&[2, 1])));
        let nz: Vec<_> = (0..3).flat_map(|r| (0..3).map(move |c| (r, c))).filter(|&rc| x[rc] != q(0)).collect();
        assert_eq!(nz, vec![(l.pos(1, 1, 2).unwrap(), l.pos(2, 1, 2).unwrap())]);
        assert_eq!(jordan_type(&x).unwrap(), vec![2, 1]);
        let (x, _) = standard_nilpotent(&NilpotentOrbit::new(p(&[1, 1])));
        assert!(x.is_zero());
    }

    #[test]
    fn simplicity() {
        assert!(NilpotentOrbit::new(p(&[2, 1])).is_simple());
        assert!(!NilpotentOrbit::new(p(&[3])).is_simple());
        assert!(NilpotentOrbit::new(p(&[1])).is_simple());
    }

    #[test]
    fn centralizer_examples() {
        let c = centralizer(&NilpotentOrbit::new(p(&[2, 1])));
        assert_eq!(c.levi_factor, vec![1, 1]);
        assert_eq!(c.dim, 5);
        assert_eq!(centralizer(&NilpotentOrbit::new(p(&[4]))).dim, 4);
        assert_eq!(centralizer(&NilpotentOrbit::new(p(&[1, 1, 1]))).dim, 9);
    }

    #[test]
    fn grading_increases_along_basis() {
        for part in Partition::all(6) {
            let l = BasisLayout::new(&NilpotentOrbit::new(part));
            let g: Vec<i64> = l.summands().iter().map(|&s| l.grading(s)).collect();
            assert!(g.windows(2).all(|w| w[0] < w[1]), "{g:?}");
        }
    }
}
