//! Exact convex hulls in `ℚ^d` by the beneath-beyond method.
//!
//! The boundary is kept as a list of simplicial facets. Points lying on the
//! hyperplane of an existing facet count as beneath it, so coplanar faces end
//! up triangulated rather than merged. That is all the volume and membership
//! queries need.

use crate::error::{Error, Result};
use crate::linalg::{q, Q, QMatrix};
use crate::roots::dot;
use num_traits::{Signed, Zero};
use std::collections::HashMap;

#[derive(Clone, Debug)]
struct Facet {
    verts: Vec<usize>,
    normal: Vec<Q>,
    offset: Q,
}

/// A hull together with its triangulated boundary.
#[derive(Clone, Debug)]
pub struct Hull {
    pub dim: usize,
    points: Vec<Vec<Q>>,
    facets: Vec<Facet>,
    /// Affinely independent starting simplex, empty if the points span less
    /// than the full dimension.
    simplex: Vec<usize>,
}

fn diff(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn affine_rank(points: &[Vec<Q>], idx: &[usize]) -> usize {
    if idx.len() <= 1 {
        return 0;
    }
    let base = &points[idx[0]];
    let rows: Vec<Vec<Q>> = idx[1..].iter().map(|&i| diff(&points[i], base)).collect();
    QMatrix::from_rows(rows).map(|m| m.rank()).unwrap_or(0)
}

fn facet_through(points: &[Vec<Q>], verts: Vec<usize>, interior: &[Q]) -> Facet {
    let d = interior.len();
    let base = &points[verts[0]];
    let normal = if d == 1 {
        vec![q(1)]
    } else {
        let rows: Vec<Vec<Q>> = verts[1..].iter().map(|&i| diff(&points[i], base)).collect();
        let ns = QMatrix::from_rows(rows).expect("rectangular").nullspace();
        ns.into_iter().next().expect("facet spans a hyperplane")
    };
    let offset = dot(&normal, base);
    if dot(&normal, interior) > offset {
        Facet { verts, normal: normal.iter().map(|x| -x.clone()).collect(), offset: -offset }
    } else {
        Facet { verts, normal, offset }
    }
}

impl Hull {
    pub fn new(points: Vec<Vec<Q>>) -> Self {
        let dim = points.first().map_or(0, |p| p.len());
        let mut simplex: Vec<usize> = Vec::new();
        for i in 0..points.len() {
            if simplex.len() == dim + 1 {
                break;
            }
            let mut trial = simplex.clone();
            trial.push(i);
            if simplex.is_empty() || affine_rank(&points, &trial) == trial.len() - 1 {
                simplex = trial;
            }
        }
        if dim == 0 || simplex.len() < dim + 1 {
            let simplex = if dim == 0 && !points.is_empty() { vec![0] } else { Vec::new() };
            return Hull { dim, points, facets: Vec::new(), simplex };
        }
        let mut interior = vec![Q::zero(); dim];
        for &i in &simplex {
            for a in 0..dim {
                interior[a] += &points[i][a];
            }
        }
        for x in interior.iter_mut() {
            *x = &*x / q(dim as i64 + 1);
        }
        let mut facets: Vec<Facet> = (0..=dim)
            .map(|skip| {
                let verts: Vec<usize> = simplex.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect();
                facet_through(&points, verts, &interior)
            })
            .collect();
        for p in 0..points.len() {
            if simplex.contains(&p) {
                continue;
            }
            let visible: Vec<bool> = facets.iter().map(|f| dot(&f.normal, &points[p]) > f.offset).collect();
            if !visible.iter().any(|&v| v) {
                continue;
            }
            // Ridges bordering exactly one visible facet form the horizon.
            let mut ridges: HashMap<Vec<usize>, (usize, usize)> = HashMap::new();
            for (f, &vis) in facets.iter().zip(&visible) {
                for skip in 0..f.verts.len() {
                    let mut r = f.verts.clone();
                    r.remove(skip);
                    let e = ridges.entry(r).or_insert((0, 0));
                    if vis {
                        e.0 += 1;
                    } else {
                        e.1 += 1;
                    }
                }
            }
            let mut next: Vec<Facet> = facets.into_iter().zip(&visible).filter(|(_, &v)| !v).map(|(f, _)| f).collect();
            for (ridge, (vis, hidden)) in ridges {
                if vis == 1 && hidden >= 1 {
                    let mut verts = ridge;
                    verts.push(p);
                    verts.sort_unstable();
                    next.push(facet_through(&points, verts, &interior));
                }
            }
            facets = next;
        }
        Hull { dim, points, facets, simplex }
    }

    /// Whether the points span the full dimension.
    pub fn is_full_dimensional(&self) -> bool {
        self.dim == 0 || !self.facets.is_empty()
    }

    pub fn num_facets(&self) -> usize {
        self.facets.len()
    }

    /// Exact volume in coordinates: a fan from the lowest-indexed vertex over
    /// the boundary simplices. Degenerate cones contribute zero.
    pub fn volume(&self) -> Q {
        if self.dim == 0 {
            return if self.points.is_empty() { q(0) } else { q(1) };
        }
        let Some(apex) = self.facets.iter().flat_map(|f| f.verts.iter().copied()).min() else {
            return q(0);
        };
        let a = &self.points[apex];
        let mut total = Q::zero();
        for f in &self.facets {
            if f.verts.contains(&apex) {
                continue;
            }
            let rows: Vec<Vec<Q>> = f.verts.iter().map(|&v| diff(&self.points[v], a)).collect();
            total += QMatrix::from_rows(rows).expect("square").det().abs();
        }
        let fact: i64 = (1..=self.dim as i64).product();
        total / q(fact)
    }

    /// Strict membership. Points on the boundary are reported as errors.
    pub fn contains(&self, h: &[Q]) -> Result<bool> {
        if self.dim == 0 {
            return Ok(!self.points.is_empty());
        }
        if self.facets.is_empty() {
            // Lower-dimensional hull: never strictly inside.
            let in_span = !self.simplex.is_empty() && {
                let mut pts = self.points.clone();
                pts.push(h.to_vec());
                let mut idx = self.simplex.clone();
                let r0 = affine_rank(&pts, &idx);
                idx.push(pts.len() - 1);
                affine_rank(&pts, &idx) == r0
            };
            return if in_span { Err(Error::Boundary("degenerate hull".into())) } else { Ok(false) };
        }
        let mut on = false;
        for f in &self.facets {
            let v = dot(&f.normal, h);
            if v > f.offset {
                return Ok(false);
            }
            if v == f.offset {
                on = true;
            }
        }
        if on {
            Err(Error::Boundary("point on a facet hyperplane".into()))
        } else {
            Ok(true)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::qf;

    fn pts(v: &[&[i64]]) -> Vec<Vec<Q>> {
        v.iter().map(|p| p.iter().map(|&x| q(x)).collect()).collect()
    }

    #[test]
    fn square_and_cube() {
        let sq = Hull::new(pts(&[&[0, 0], &[2, 0], &[0, 2], &[2, 2], &[1, 1], &[1, 0]]));
        assert_eq!(sq.volume(), q(4));
        assert_eq!(sq.contains(&[qf(1, 2), qf(1, 3)]), Ok(true));
        assert_eq!(sq.contains(&[q(3), q(1)]), Ok(false));
        assert!(sq.contains(&[q(2), q(1)]).is_err());
        let mut cube = Vec::new();
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    cube.push(vec![q(a * 3), q(b * 3), q(c * 3)]);
                }
            }
        }
        assert_eq!(Hull::new(cube).volume(), q(27));
    }

    #[test]
    fn degenerate() {
        let h = Hull::new(pts(&[&[0, 0], &[1, 1], &[2, 2]]));
        assert_eq!(h.volume(), q(0));
        assert_eq!(h.contains(&[q(0), q(1)]), Ok(false));
        let seg = Hull::new(pts(&[&[3], &[-1], &[0]]));
        assert_eq!(seg.volume(), q(4));
    }
}
