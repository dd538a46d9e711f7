//! Functions of the interparticle distances and their Cartesian derivatives.
//!
//! Distances are ordered `r_1 … r_n, r_12, r_13, …, r_{n-1,n}`; for three
//! electrons this is `(r1, r2, r3, r12, r13, r23)`.

use std::fmt::Debug;

use crate::configuration::{ElectronConfiguration, Vec3};

use super::Derivatives;

pub fn distance_count(n: usize) -> usize {
    n + n * (n - 1) / 2
}

/// Index arithmetic on the distance list of `n` electrons.
#[derive(Clone, Copy, Debug)]
pub struct DistanceIndex {
    n: usize,
}

impl DistanceIndex {
    pub fn new(n: usize) -> Self {
        Self { n }
    }

    pub fn len(&self) -> usize {
        distance_count(self.n)
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn radius(&self, i: usize) -> usize {
        i
    }

    pub fn pair(&self, i: usize, j: usize) -> usize {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        // pairs (0,1),(0,2),…,(0,n-1),(1,2),…
        self.n + a * (2 * self.n - a - 1) / 2 + (b - a - 1)
    }

    /// Distance list of `config` with electron `k` relabelled as `relabel[k]`,
    /// i.e. entry for `r_k` is `|r_{relabel[k]}|`.
    pub fn distances(&self, config: &ElectronConfiguration, relabel: &[usize]) -> Vec<f64> {
        let p = config.positions();
        let mut d = vec![0.0; self.len()];
        for k in 0..self.n {
            d[k] = p[relabel[k]].norm();
        }
        for a in 0..self.n {
            for b in a + 1..self.n {
                d[self.pair(a, b)] = (p[relabel[a]] - p[relabel[b]]).norm();
            }
        }
        d
    }

    /// Index in the original list of the distance that lands at position `k`
    /// after relabelling.
    pub fn relabelled_index(&self, relabel: &[usize]) -> Vec<usize> {
        let mut out = vec![0; self.len()];
        out[..self.n].copy_from_slice(&relabel[..self.n]);
        for a in 0..self.n {
            for b in a + 1..self.n {
                out[self.pair(a, b)] = self.pair(relabel[a], relabel[b]);
            }
        }
        out
    }
}

/// A scalar function of the distance list.
pub trait DistanceFunction: Send + Sync + Debug {
    fn n_electrons(&self) -> usize;

    fn value(&self, d: &[f64]) -> f64;

    /// Returns the value and *adds* the gradient and row-major Hessian
    /// (with respect to the distances) into `grad` and `hess`, scaled by `scale`.
    fn accumulate_derivatives(&self, d: &[f64], scale: f64, grad: &mut [f64], hess: &mut [f64]) -> f64;
}

/// Chain rule from distance derivatives to ∇ᵢF and Σᵢ∇ᵢ²F.
pub fn cartesian_derivatives(config: &ElectronConfiguration, value: f64, grad: &[f64], hess: &[f64]) -> Derivatives {
    let n = config.len();
    let idx = DistanceIndex::new(n);
    let m = idx.len();
    let p = config.positions();
    let mut out = Derivatives::zero(n);
    out.value = value;
    let mut local: Vec<(usize, Vec3, f64)> = Vec::with_capacity(n);
    for i in 0..n {
        local.clear();
        let r = p[i].norm();
        local.push((idx.radius(i), p[i] / r, 2.0 / r));
        for j in 0..n {
            if j != i {
                let v = p[i] - p[j];
                let rij = v.norm();
                local.push((idx.pair(i, j), v / rij, 2.0 / rij));
            }
        }
        let mut g = Vec3::zeros();
        let mut lap = 0.0;
        for (a, va, ca) in &local {
            g += va * grad[*a];
            lap += grad[*a] * ca;
            for (b, vb, _) in &local {
                lap += hess[a * m + b] * va.dot(vb);
            }
        }
        out.gradient[i] = g;
        out.laplacian += lap;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_electron_ordering() {
        let idx = DistanceIndex::new(3);
        assert_eq!(idx.len(), 6);
        assert_eq!(idx.pair(0, 1), 3);
        assert_eq!(idx.pair(0, 2), 4);
        assert_eq!(idx.pair(1, 2), 5);
        assert_eq!(idx.pair(2, 1), 5);
        let idx = DistanceIndex::new(4);
        let pairs: Vec<_> = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
            .iter()
            .map(|&(a, b)| idx.pair(a, b))
            .collect();
        assert_eq!(pairs, vec![4, 5, 6, 7, 8, 9]);
    }

    #[test]
    fn relabelling_matches_argument_permutation() {
        // f(r2, r1, r3, r12, r23, r13) is f evaluated on relabel (1, 0, 2)
        let idx = DistanceIndex::new(3);
        assert_eq!(idx.relabelled_index(&[1, 0, 2]), vec![1, 0, 2, 3, 5, 4]);
        assert_eq!(idx.relabelled_index(&[2, 1, 0]), vec![2, 1, 0, 5, 4, 3]);
        assert_eq!(idx.relabelled_index(&[1, 2, 0]), vec![1, 2, 0, 5, 3, 4]);
    }
}
