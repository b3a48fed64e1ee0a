//! Type-A root data on semi-standard Levis and parabolics.
//!
//! Indices are 0-based internally. A parabolic is an ordered list of blocks;
//! it is the stabilizer of the flag `span(B_1) ⊂ span(B_1 ∪ B_2) ⊂ …`, so a
//! matrix entry `(a, b)` is allowed iff `block(a) ≤ block(b)`.

use crate::error::{Error, Result};
use crate::linalg::{q, to_f64, Q, QMatrix};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

/// Unordered set partition of `{0..n}`, normalized: blocks sorted internally
/// and by their smallest element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Levi {
    blocks: Vec<Vec<usize>>,
}

/// Ordered set partition of `{0..n}`; each block sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Parabolic {
    blocks: Vec<Vec<usize>>,
}

fn check_cover(blocks: &[Vec<usize>]) -> Result<usize> {
    let n: usize = blocks.iter().map(|b| b.len()).sum();
    let mut seen = vec![false; n];
    for b in blocks {
        if b.is_empty() {
            return Err(Error::InvalidInput("empty block".into()));
        }
        for &a in b {
            if a >= n || seen[a] {
                return Err(Error::InvalidInput(format!("blocks {blocks:?} do not partition 0..{n}")));
            }
            seen[a] = true;
        }
    }
    Ok(n)
}

impl Levi {
    pub fn new(mut blocks: Vec<Vec<usize>>) -> Result<Self> {
        check_cover(&blocks)?;
        for b in blocks.iter_mut() {
            b.sort_unstable();
        }
        blocks.sort();
        Ok(Levi { blocks })
    }

    /// Consecutive intervals with the given sizes.
    pub fn standard(sizes: &[usize]) -> Self {
        Parabolic::standard(sizes).levi()
    }

    pub fn torus(n: usize) -> Self {
        Levi { blocks: (0..n).map(|a| vec![a]).collect() }
    }

    pub fn whole(n: usize) -> Self {
        Levi { blocks: vec![(0..n).collect()] }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn n(&self) -> usize {
        self.blocks.iter().map(|b| b.len()).sum()
    }

    pub fn rank(&self) -> usize {
        self.blocks.len()
    }

    /// `dim a_M^G`.
    pub fn dim_a_g(&self) -> usize {
        self.blocks.len() - 1
    }

    /// Whether every block of `self` lies inside a block of `other`.
    pub fn is_contained_in(&self, other: &Levi) -> bool {
        self.blocks.iter().all(|b| other.blocks.iter().any(|c| b.iter().all(|x| c.contains(x))))
    }

    /// Order of the Weyl group `W^L = ∏ |block|!`.
    pub fn weyl_order(&self) -> u128 {
        self.blocks.iter().map(|b| factorial(b.len())).product()
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.len()).collect()
    }

    /// Orthogonal projection onto block-constant vectors.
    pub fn project(&self, h: &[Q]) -> Vec<Q> {
        project_blocks(&self.blocks, h)
    }

    /// Basis of `a_M^L` where `self = M` and `l` contains it: coroots between
    /// consecutive `M`-blocks inside each `L`-block.
    pub fn a_basis_in(&self, l: &Levi) -> Vec<Vec<Q>> {
        let mut out = Vec::new();
        for lb in l.blocks() {
            let inside: Vec<&Vec<usize>> = self.blocks.iter().filter(|b| lb.contains(&b[0])).collect();
            for w in inside.windows(2) {
                out.push(coroot_vector(self.n(), w[0], w[1]));
            }
        }
        out
    }
}

pub(crate) fn factorial(k: usize) -> u128 {
    (1..=k as u128).product()
}

fn project_blocks(blocks: &[Vec<usize>], h: &[Q]) -> Vec<Q> {
    let mut out = vec![Q::zero(); h.len()];
    for b in blocks {
        let s: Q = b.iter().map(|&a| h[a].clone()).sum();
        let avg = s / q(b.len() as i64);
        for &a in b {
            out[a] = avg.clone();
        }
    }
    out
}

/// `1/|B|` on `B`, `−1/|C|` on `C`.
pub fn coroot_vector(n: usize, b: &[usize], c: &[usize]) -> Vec<Q> {
    let mut v = vec![Q::zero(); n];
    for &a in b {
        v[a] = Q::new(1.into(), (b.len() as i64).into());
    }
    for &a in c {
        v[a] = Q::new((-1).into(), (c.len() as i64).into());
    }
    v
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot_f(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn to_f64_vec(v: &[Q]) -> Vec<f64> {
    v.iter().map(to_f64).collect()
}

/// Gram matrix of a list of vectors.
pub fn gram(vs: &[Vec<Q>]) -> QMatrix {
    let k = vs.len();
    let mut g = QMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            g[(i, j)] = dot(&vs[i], &vs[j]);
        }
    }
    g
}

/// Dual basis of `vs` inside their span.
pub fn dual_basis(vs: &[Vec<Q>]) -> Vec<Vec<Q>> {
    if vs.is_empty() {
        return Vec::new();
    }
    let n = vs[0].len();
    let ginv = gram(vs).inverse().expect("independent vectors");
    (0..vs.len())
        .map(|s| {
            let mut w = vec![Q::zero(); n];
            for (t, v) in vs.iter().enumerate() {
                let c = &ginv[(s, t)];
                for a in 0..n {
                    w[a] += c * &v[a];
                }
            }
            w
        })
        .collect()
}

/// Simple roots, coroots, weights and copoids for a pair `P ⊆ Q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootData {
    /// Index `s` of each simple root: it separates blocks `s` and `s+1` of `P`.
    pub simple: Vec<usize>,
    pub coroots: Vec<Vec<Q>>,
    /// As vectors in `a_P` the roots coincide with the coroots.
    pub roots: Vec<Vec<Q>>,
    pub weights: Vec<Vec<Q>>,
    pub copoids: Vec<Vec<Q>>,
    /// Squared covolume of the coroot lattice.
    pub covolume_sq: Q,
}

impl RootData {
    pub fn covolume(&self) -> f64 {
        to_f64(&self.covolume_sq).sqrt()
    }
}

impl Parabolic {
    pub fn new(mut blocks: Vec<Vec<usize>>) -> Result<Self> {
        check_cover(&blocks)?;
        for b in blocks.iter_mut() {
            b.sort_unstable();
        }
        Ok(Parabolic { blocks })
    }

    /// The standard parabolic with interval blocks of the given sizes.
    pub fn standard(sizes: &[usize]) -> Self {
        let mut blocks = Vec::new();
        let mut start = 0;
        for &s in sizes {
            blocks.push((start..start + s).collect());
            start += s;
        }
        Parabolic { blocks }
    }

    pub fn borel(n: usize) -> Self {
        Parabolic::standard(&vec![1; n])
    }

    pub fn opposite_borel(n: usize) -> Self {
        Parabolic { blocks: (0..n).rev().map(|a| vec![a]).collect() }
    }

    pub fn whole(n: usize) -> Self {
        Parabolic { blocks: vec![(0..n).collect()] }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn n(&self) -> usize {
        self.blocks.iter().map(|b| b.len()).sum()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.len()).collect()
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn levi(&self) -> Levi {
        Levi::new(self.blocks.clone()).expect("valid blocks")
    }

    /// Block index of each basis position.
    pub fn block_index(&self) -> Vec<usize> {
        let mut idx = vec![0; self.n()];
        for (k, b) in self.blocks.iter().enumerate() {
            for &a in b {
                idx[a] = k;
            }
        }
        idx
    }

    pub fn is_standard(&self) -> bool {
        let flat: Vec<usize> = self.blocks.iter().flatten().copied().collect();
        flat.iter().enumerate().all(|(i, &a)| i == a)
    }

    /// `P ⊆ Q`: each block of `Q` is a union of consecutive blocks of `P`.
    pub fn is_contained_in(&self, q: &Parabolic) -> bool {
        let mut k = 0;
        for qb in &q.blocks {
            let mut acc: Vec<usize> = Vec::new();
            while acc.len() < qb.len() {
                let Some(b) = self.blocks.get(k) else { return false };
                acc.extend(b);
                k += 1;
            }
            acc.sort_unstable();
            if &acc != qb {
                return false;
            }
        }
        k == self.blocks.len()
    }

    /// Matrix lies in the Lie algebra of the parabolic.
    pub fn contains_matrix(&self, x: &QMatrix) -> bool {
        let idx = self.block_index();
        (0..x.rows()).all(|a| (0..x.cols()).all(|b| x[(a, b)].is_zero() || idx[a] <= idx[b]))
    }

    /// Matrix lies in the nilradical `𝔫_P`.
    pub fn nilradical_contains(&self, x: &QMatrix) -> bool {
        let idx = self.block_index();
        (0..x.rows()).all(|a| (0..x.cols()).all(|b| x[(a, b)].is_zero() || idx[a] < idx[b]))
    }

    /// Coordinates `(row, col)` of `𝔫_P`, in row-major order.
    pub fn nilradical_entries(&self) -> Vec<(usize, usize)> {
        let idx = self.block_index();
        let n = self.n();
        let mut v = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if idx[a] < idx[b] {
                    v.push((a, b));
                }
            }
        }
        v
    }

    /// Orthogonal projection onto `a_P`.
    pub fn project(&self, h: &[Q]) -> Vec<Q> {
        project_blocks(&self.blocks, h)
    }

    /// Root data for `self ⊆ q`.
    pub fn root_data(&self, qp: &Parabolic) -> Result<RootData> {
        if !self.is_contained_in(qp) {
            return Err(Error::InvalidInput("root data needs P ⊆ Q".into()));
        }
        let qidx = qp.block_index();
        let n = self.n();
        let mut simple = Vec::new();
        let mut coroots = Vec::new();
        for s in 0..self.blocks.len().saturating_sub(1) {
            let (b, c) = (&self.blocks[s], &self.blocks[s + 1]);
            if qidx[b[0]] == qidx[c[0]] {
                simple.push(s);
                coroots.push(coroot_vector(n, b, c));
            }
        }
        let weights = dual_basis(&coroots);
        let covolume_sq = if coroots.is_empty() { q(1) } else { gram(&coroots).det() };
        Ok(RootData { simple, roots: coroots.clone(), copoids: weights.clone(), coroots, weights, covolume_sq })
    }

    /// `θ_P^Q(λ)`: covolume divided by the pairings with the simple coroots.
    pub fn theta(&self, q: &Parabolic, lambda: &[f64]) -> Result<f64> {
        let rd = self.root_data(q)?;
        let mut prod = 1.0;
        for c in &rd.coroots {
            let v = dot_f(lambda, &to_f64_vec(c));
            if v.abs() < 1e-300 {
                return Err(Error::SingularDirection);
            }
            prod *= v;
        }
        Ok(rd.covolume() / prod)
    }

    /// `τ_P^Q(H)`.
    pub fn tau(&self, q: &Parabolic, h: &[Q]) -> Result<bool> {
        let rd = self.root_data(q)?;
        Ok(rd.roots.iter().all(|a| dot(a, h).is_positive()))
    }

    /// `τ̂_P^Q(H)`.
    pub fn tau_hat(&self, q: &Parabolic, h: &[Q]) -> Result<bool> {
        let rd = self.root_data(q)?;
        Ok(rd.weights.iter().all(|w| dot(w, h).is_positive()))
    }

    /// `wPw^{-1}`: blocks `w(B_k)`.
    pub fn act(&self, w: &[usize]) -> Parabolic {
        Parabolic::new(self.blocks.iter().map(|b| b.iter().map(|&a| w[a]).collect()).collect())
            .expect("permuted blocks")
    }

    /// `P^w = w^{-1}Pw`: blocks `w^{-1}(B_k)`.
    pub fn conj(&self, w: &[usize]) -> Parabolic {
        self.act(&invert_perm(w))
    }

    /// 1-based blocks for JSON.
    pub fn to_one_based(&self) -> Vec<Vec<usize>> {
        self.blocks.iter().map(|b| b.iter().map(|a| a + 1).collect()).collect()
    }

    /// Coarsening obtained by merging the given runs of consecutive blocks.
    pub fn merge(&self, runs: &[usize]) -> Parabolic {
        let mut blocks = Vec::new();
        let mut k = 0;
        for &len in runs {
            let merged: Vec<usize> = self.blocks[k..k + len].iter().flatten().copied().collect();
            blocks.push(merged);
            k += len;
        }
        Parabolic::new(blocks).expect("merged blocks")
    }
}

/// Inverse permutation.
pub fn invert_perm(w: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; w.len()];
    for (a, &b) in w.iter().enumerate() {
        inv[b] = a;
    }
    inv
}

pub fn compose_perm(a: &[usize], b: &[usize]) -> Vec<usize> {
    b.iter().map(|&x| a[x]).collect()
}

/// `(w·x)_{w(a)} = x_a`.
pub fn weyl_vector<T: Clone>(w: &[usize], x: &[T]) -> Vec<T> {
    let mut out = x.to_vec();
    for (a, v) in x.iter().enumerate() {
        out[w[a]] = v.clone();
    }
    out
}

/// Permutation matrix `e_a ↦ e_{w(a)}`.
pub fn perm_matrix(w: &[usize]) -> QMatrix {
    let mut m = QMatrix::zeros(w.len(), w.len());
    for (a, &b) in w.iter().enumerate() {
        m[(b, a)] = q(1);
    }
    m
}

/// Every permutation of `0..k`, lexicographic.
pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; k], &mut out);
    out
}

/// Set partitions of `0..k` as lists of sorted parts, in a fixed order.
pub fn set_partitions(k: usize) -> Vec<Vec<Vec<usize>>> {
    fn rec(i: usize, k: usize, cur: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == k {
            out.push(cur.clone());
            return;
        }
        for p in 0..cur.len() {
            cur[p].push(i);
            rec(i + 1, k, cur, out);
            cur[p].pop();
        }
        cur.push(vec![i]);
        rec(i + 1, k, cur, out);
        cur.pop();
    }
    let mut out = Vec::new();
    rec(0, k, &mut Vec::new(), &mut out);
    out
}

/// Which list of Levi-theoretic objects to enumerate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scope {
    /// `𝒫(M)`: orderings of the blocks.
    Parabolics,
    /// `ℱ(M)`: ordered coarsenings.
    SemiStandard,
    /// `ℒ(M)`: unordered coarsenings.
    Levis,
}

/// `𝒫(M)` in lexicographic order of block orderings.
pub fn parabolics_of(m: &Levi) -> Vec<Parabolic> {
    permutations(m.rank())
        .into_iter()
        .map(|perm| Parabolic { blocks: perm.iter().map(|&i| m.blocks[i].clone()).collect() })
        .collect()
}

/// `ℱ(M)`: every ordered set partition of the blocks of `M`, merged.
pub fn semistandard_of(m: &Levi) -> Vec<Parabolic> {
    let mut out = Vec::new();
    for sp in set_partitions(m.rank()) {
        for perm in permutations(sp.len()) {
            let blocks = perm
                .iter()
                .map(|&p| {
                    let mut b: Vec<usize> = sp[p].iter().flat_map(|&i| m.blocks[i].clone()).collect();
                    b.sort_unstable();
                    b
                })
                .collect();
            out.push(Parabolic { blocks });
        }
    }
    out.sort();
    out
}

/// `ℒ(M)`: every unordered coarsening of `M`.
pub fn levis_containing(m: &Levi) -> Vec<Levi> {
    let mut out: Vec<Levi> = set_partitions(m.rank())
        .into_iter()
        .map(|sp| {
            Levi::new(sp.iter().map(|part| part.iter().flat_map(|&i| m.blocks[i].clone()).collect()).collect())
                .expect("coarsening")
        })
        .collect();
    out.sort();
    out
}

/// Enumeration dispatcher.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Enumerated {
    Parabolics(Vec<Parabolic>),
    Levis(Vec<Levi>),
}

pub fn enumerate(m: &Levi, scope: Scope) -> Enumerated {
    match scope {
        Scope::Parabolics => Enumerated::Parabolics(parabolics_of(m)),
        Scope::SemiStandard => Enumerated::Parabolics(semistandard_of(m)),
        Scope::Levis => Enumerated::Levis(levis_containing(m)),
    }
}

/// `𝒫^Q(L)`: parabolics in `𝒫(L)` contained in `Q`. Requires `L ⊆ M_Q`.
pub fn parabolics_in(l: &Levi, qp: &Parabolic) -> Vec<Parabolic> {
    parabolics_of(l).into_iter().filter(|p| p.is_contained_in(qp)).collect()
}

/// Permutations normalizing `M` (mapping its set of blocks to itself).
pub fn normalizer(m: &Levi) -> Vec<Vec<usize>> {
    // Build them block-by-block rather than over all of S_n.
    let k = m.rank();
    let mut out = Vec::new();
    for perm in permutations(k) {
        if (0..k).any(|i| m.blocks[i].len() != m.blocks[perm[i]].len()) {
            continue;
        }
        // Inside each block use all bijections onto the target block.
        let mut partial: Vec<Vec<usize>> = vec![vec![usize::MAX; m.n()]];
        for i in 0..k {
            let (src, dst) = (&m.blocks[i], &m.blocks[perm[i]]);
            let mut next = Vec::new();
            for w in &partial {
                for inner in permutations(src.len()) {
                    let mut w2 = w.clone();
                    for (t, &s) in src.iter().enumerate() {
                        w2[s] = dst[inner[t]];
                    }
                    next.push(w2);
                }
            }
            partial = next;
        }
        out.extend(partial);
    }
    out
}

/// `|Norm_W(M)/W^M|`.
pub fn weyl_group_of_levi_order(m: &Levi) -> u128 {
    normalizer(m).len() as u128 / m.weyl_order()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::qf;

    #[test]
    fn enumeration_counts() {
        let t2 = Levi::torus(2);
        assert_eq!(parabolics_of(&t2).len(), 2);
        assert_eq!(semistandard_of(&t2).len(), 3);
        assert_eq!(levis_containing(&t2).len(), 2);
        assert_eq!(parabolics_of(&Levi::torus(3)).len(), 6);
        assert_eq!(parabolics_of(&Levi::standard(&[2, 1])).len(), 2);
    }

    #[test]
    fn theta_examples() {
        let b = Parabolic::borel(2);
        let g = Parabolic::whole(2);
        assert!((b.theta(&g, &[1.0, -1.0]).unwrap() - 2f64.sqrt() / 2.0).abs() < 1e-15);
        assert_eq!(b.theta(&b, &[1.0, -1.0]).unwrap(), 1.0);
        let b3 = Parabolic::borel(3);
        let th = b3.theta(&Parabolic::whole(3), &[2.0, 0.0, -2.0]).unwrap();
        assert!((th - 3f64.sqrt() / 4.0).abs() < 1e-15);
        assert_eq!(b.theta(&g, &[1.0, 1.0]), Err(Error::SingularDirection));
    }

    #[test]
    fn cone_examples() {
        let b = Parabolic::borel(2);
        let g = Parabolic::whole(2);
        assert!(b.tau(&g, &[q(1), q(-1)]).unwrap());
        assert!(b.tau_hat(&g, &[q(1), q(-1)]).unwrap());
        assert!(!b.tau(&g, &[q(0), q(0)]).unwrap());
        assert!(!b.tau_hat(&g, &[q(0), q(0)]).unwrap());
        let b3 = Parabolic::borel(3);
        let h = [q(1), q(1), q(-2)];
        assert!(!b3.tau(&Parabolic::whole(3), &h).unwrap());
        assert!(b3.tau_hat(&Parabolic::whole(3), &h).unwrap());
    }

    #[test]
    fn weyl_examples() {
        let b = Parabolic::borel(2);
        assert_eq!(b.act(&[0, 1]), b);
        assert_eq!(b.act(&[1, 0]), Parabolic::opposite_borel(2));
        assert_eq!(weyl_group_of_levi_order(&Levi::standard(&[2, 2])), 2);
        assert_eq!(weyl_group_of_levi_order(&Levi::standard(&[2, 1])), 1);
    }

    #[test]
    fn duality_and_projection() {
        let p = Parabolic::new(vec![vec![2], vec![0, 3], vec![1]]).unwrap();
        let rd = p.root_data(&Parabolic::whole(4)).unwrap();
        for (i, w) in rd.weights.iter().enumerate() {
            for (j, c) in rd.coroots.iter().enumerate() {
                assert_eq!(dot(w, c), if i == j { q(1) } else { q(0) });
            }
        }
        let h = vec![q(1), qf(1, 2), q(3), q(-7)];
        let ph = p.project(&h);
        assert_eq!(p.project(&ph), ph);
        assert_eq!(ph[0], ph[3]);
    }

    #[test]
    fn containment() {
        let b = Parabolic::borel(3);
        assert!(b.is_contained_in(&Parabolic::standard(&[2, 1])));
        assert!(!b.is_contained_in(&Parabolic::new(vec![vec![0, 2], vec![1]]).unwrap()));
        assert!(b.is_contained_in(&Parabolic::whole(3)));
    }
}
