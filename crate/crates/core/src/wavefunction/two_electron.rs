//! Deterministic Rayleigh-Ritz for two-electron atoms in a Hylleraas basis.
//!
//! Matrix elements are assembled from closed-form integrals
//! `∫ r1^A r2^B r12^C e^{-a r1 - b r2} d³r1 d³r2`; the kinetic energy uses the
//! symmetric form `½ ∫ ∇Φᵢ·∇Φⱼ` written in `(r1, r2, r12)`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

use super::hylleraas::{he_triplet_basis, HylleraasWaveFunction};
use super::orbital::factorial;

/// `r1^i r2^j r12^k e^{-a r1 - b r2}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Primitive {
    pub i: u32,
    pub j: u32,
    pub k: u32,
    pub a: f64,
    pub b: f64,
}

impl Primitive {
    /// The same function with electrons 1 and 2 exchanged.
    pub fn swapped(self) -> Self {
        Self {
            i: self.j,
            j: self.i,
            k: self.k,
            a: self.b,
            b: self.a,
        }
    }
}

/// A basis function `Σ c p` over primitives.
pub type BasisFunction = Vec<(f64, Primitive)>;

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, t| acc * f64::from(n - t) / f64::from(t + 1))
}

/// `∫ r1^A r2^B r12^C e^{-a r1 - b r2} d³r1 d³r2` for `A, B, C >= -1`.
///
/// The region `r1 >= r2` is integrated with `r1 = r2 + s`; every expanded
/// term is then positive, so the sum has no cancellation.
pub fn hylleraas_integral(big_a: i32, big_b: i32, big_c: i32, a: f64, b: f64) -> f64 {
    assert!(
        big_a >= -1 && big_b >= -1 && big_c >= -1,
        "integral ({big_a},{big_b},{big_c}) diverges"
    );
    let half = |pa: i32, pb: i32, alpha: f64, beta: f64| {
        // region r_first >= r_second, r_first = r_second + s
        let n = (big_c + 2) as u32;
        let la = (pa + 1) as u32;
        let mut sum = 0.0;
        for l in 0..=la {
            for m in 0..n {
                let p = (la - l) + (pb + 1) as u32 + (n - m);
                let q = l + m;
                sum += binomial(la, l) * binomial(n, m) * 2f64.powi((n - m) as i32) * factorial(p) * factorial(q)
                    / ((alpha + beta).powi(p as i32 + 1) * alpha.powi(q as i32 + 1));
            }
        }
        sum / f64::from(n)
    };
    8.0 * PI * PI * (half(big_a, big_b, a, b) + half(big_b, big_a, b, a))
}

/// Monomial `c r1^da r2^db r12^dc` relative to a product of primitives.
type Mono = (f64, i32, i32, i32);

fn mul(x: &[Mono], y: &[Mono]) -> Vec<Mono> {
    let mut out = Vec::with_capacity(x.len() * y.len());
    for &(c1, a1, b1, d1) in x {
        for &(c2, a2, b2, d2) in y {
            let c = c1 * c2;
            if c != 0.0 {
                out.push((c, a1 + a2, b1 + b2, d1 + d2));
            }
        }
    }
    out
}

fn derivative_r1(p: &Primitive) -> Vec<Mono> {
    vec![(f64::from(p.i), -1, 0, 0), (-p.a, 0, 0, 0)]
}

fn derivative_r2(p: &Primitive) -> Vec<Mono> {
    vec![(f64::from(p.j), 0, -1, 0), (-p.b, 0, 0, 0)]
}

fn derivative_r12(p: &Primitive) -> Vec<Mono> {
    vec![(f64::from(p.k), 0, 0, -1)]
}

/// Overlap, kinetic and potential matrix elements between two primitives.
fn primitive_elements(p: &Primitive, q: &Primitive, z: f64) -> (f64, f64, f64) {
    let a0 = (p.i + q.i) as i32;
    let b0 = (p.j + q.j) as i32;
    let c0 = (p.k + q.k) as i32;
    let (ea, eb) = (p.a + q.a, p.b + q.b);
    let integrate = |monos: &[Mono]| -> f64 {
        monos
            .iter()
            .map(|&(c, da, db, dc)| c * hylleraas_integral(a0 + da, b0 + db, c0 + dc, ea, eb))
            .sum()
    };
    let overlap = hylleraas_integral(a0, b0, c0, ea, eb);
    let potential = integrate(&[(-z, -1, 0, 0), (-z, 0, -1, 0), (1.0, 0, 0, -1)]);

    // ∇₁·∇₁ cross term (r1² − r2² + r12²)/(2 r1 r12), and its electron-2 mirror
    let x1: [Mono; 3] = [(0.5, 1, 0, -1), (-0.5, -1, 2, -1), (0.5, -1, 0, 1)];
    let x2: [Mono; 3] = [(0.5, 0, 1, -1), (-0.5, 2, -1, -1), (0.5, 0, -1, 1)];
    let (p1, p2, p12) = (derivative_r1(p), derivative_r2(p), derivative_r12(p));
    let (q1, q2, q12) = (derivative_r1(q), derivative_r2(q), derivative_r12(q));
    let mut grad_dot = Vec::new();
    grad_dot.extend(mul(&p1, &q1));
    grad_dot.extend(mul(&p2, &q2));
    grad_dot.extend(mul(&p12, &q12).into_iter().map(|(c, a, b, d)| (2.0 * c, a, b, d)));
    let mut cross1 = mul(&p1, &q12);
    cross1.extend(mul(&p12, &q1));
    grad_dot.extend(mul(&x1, &cross1));
    let mut cross2 = mul(&p2, &q12);
    cross2.extend(mul(&p12, &q2));
    grad_dot.extend(mul(&x2, &cross2));
    let kinetic = 0.5 * integrate(&grad_dot);
    (overlap, kinetic, potential)
}

/// Overlap and Hamiltonian matrices of a basis for nuclear charge `z`.
pub fn matrices(basis: &[BasisFunction], z: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = basis.len();
    let mut s = DMatrix::zeros(n, n);
    let mut h = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let (mut sv, mut hv) = (0.0, 0.0);
            for (ci, pi) in &basis[i] {
                for (cj, pj) in &basis[j] {
                    let (o, t, v) = primitive_elements(pi, pj, z);
                    sv += ci * cj * o;
                    hv += ci * cj * (t + v);
                }
            }
            s[(i, j)] = sv;
            s[(j, i)] = sv;
            h[(i, j)] = hv;
            h[(j, i)] = hv;
        }
    }
    (s, h)
}

/// Lowest root of `H c = E S c` by canonical orthogonalization, dropping
/// overlap eigenvalues below `1e-13 × max`.
pub fn lowest_eigenpair(s: &DMatrix<f64>, h: &DMatrix<f64>) -> Result<(f64, DVector<f64>)> {
    let eig = SymmetricEigen::new(s.clone());
    let max = eig.eigenvalues.max();
    if !(max > 0.0) {
        return Err(Error::InvalidParameter("overlap matrix is not positive".into()));
    }
    let keep: Vec<usize> = (0..eig.eigenvalues.len())
        .filter(|&k| eig.eigenvalues[k] > 1e-13 * max)
        .collect();
    let mut x = DMatrix::zeros(s.nrows(), keep.len());
    for (c, &k) in keep.iter().enumerate() {
        let scale = 1.0 / eig.eigenvalues[k].sqrt();
        x.set_column(c, &(eig.eigenvectors.column(k) * scale));
    }
    let hp = x.transpose() * h * &x;
    let hp = (&hp + hp.transpose()) * 0.5;
    let e = SymmetricEigen::new(hp);
    let (imin, emin) = e
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, v)| (i, *v))
        .ok_or_else(|| Error::InvalidParameter("empty basis".into()))?;
    let c = &x * e.eigenvectors.column(imin);
    Ok((emin, c))
}

/// Result of a triplet Rayleigh-Ritz solve.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TripletSolution {
    pub energy: f64,
    pub alpha: f64,
    pub beta: f64,
    /// `(i, j, k, c)` rows, signed so that Ψ/(r1 − r2) > 0.
    pub rows: Vec<(u32, u32, u32, f64)>,
}

impl TripletSolution {
    pub fn wave_function(&self) -> Result<HylleraasWaveFunction> {
        HylleraasWaveFunction::he_triplet(&self.rows, self.alpha, self.beta)
    }
}

/// Antisymmetrized triplet basis `g(r1,r2) − g(r2,r1)` for the given powers.
pub fn triplet_basis(powers: &[(u32, u32, u32)], alpha: f64, beta: f64) -> Vec<BasisFunction> {
    powers
        .iter()
        .map(|&(i, j, k)| {
            let p = Primitive {
                i,
                j,
                k,
                a: alpha,
                b: beta,
            };
            vec![(1.0, p), (-1.0, p.swapped())]
        })
        .collect()
}

/// Variational triplet energy for fixed exponents over all `(i, j, k)` with
/// total order `<= max_order`.
pub fn solve_triplet(max_order: u32, alpha: f64, beta: f64, z: f64) -> Result<TripletSolution> {
    let powers = he_triplet_basis(max_order, alpha == beta);
    solve_triplet_powers(&powers, alpha, beta, z)
}

pub fn solve_triplet_powers(powers: &[(u32, u32, u32)], alpha: f64, beta: f64, z: f64) -> Result<TripletSolution> {
    if !(alpha > 0.0 && beta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "exponents must be positive: {alpha}, {beta}"
        )));
    }
    let basis = triplet_basis(powers, alpha, beta);
    let (s, h) = matrices(&basis, z);
    let (energy, c) = lowest_eigenpair(&s, &h)?;
    let mut rows: Vec<_> = powers
        .iter()
        .zip(c.iter())
        .map(|(&(i, j, k), &c)| (i, j, k, c))
        .collect();
    // sign convention: positive for r1 > r2 (probe r1 = 2, r2 = 0.5, r12 = 2)
    let probe: f64 = rows
        .iter()
        .map(|&(i, j, k, c)| {
            let g = |x: f64, y: f64| x.powi(i as i32) * y.powi(j as i32) * (-alpha * x - beta * y).exp();
            c * (g(2.0, 0.5) - g(0.5, 2.0)) * 2f64.powi(k as i32)
        })
        .sum();
    if probe < 0.0 {
        rows.iter_mut().for_each(|r| r.3 = -r.3);
    }
    Ok(TripletSolution {
        energy,
        alpha,
        beta,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Brute-force midpoint quadrature in (r1, r2, r12).
    fn quadrature(a: i32, b: i32, c: i32, ea: f64, eb: f64) -> f64 {
        let n = 400;
        let rmax = 30.0 / ea.min(eb);
        let h = rmax / n as f64;
        let mut sum = 0.0;
        for i1 in 0..n {
            let r1 = (i1 as f64 + 0.5) * h;
            for i2 in 0..n {
                let r2 = (i2 as f64 + 0.5) * h;
                let lo = (r1 - r2).abs();
                let hi = r1 + r2;
                let m = 40;
                let dh = (hi - lo) / m as f64;
                let inner: f64 = (0..m)
                    .map(|k| {
                        let r12 = lo + (k as f64 + 0.5) * dh;
                        r12.powi(c + 1)
                    })
                    .sum::<f64>()
                    * dh;
                sum += r1.powi(a + 1) * r2.powi(b + 1) * (-ea * r1 - eb * r2).exp() * inner;
            }
        }
        8.0 * PI * PI * sum * h * h
    }

    #[test]
    fn integral_matches_quadrature() {
        for &(a, b, c, ea, eb) in &[
            (0, 0, 0, 2.0, 2.0),
            (1, 2, 1, 3.1, 1.2),
            (-1, 0, 2, 1.5, 2.5),
            (2, -1, -1, 2.2, 1.7),
        ] {
            let exact = hylleraas_integral(a, b, c, ea, eb);
            let q = quadrature(a, b, c, ea, eb);
            assert_relative_eq!(exact, q, max_relative = 2e-3);
        }
    }

    #[test]
    fn integral_of_product_of_hydrogenic_densities() {
        // C = 0: the integral factorizes into two one-electron integrals
        let one = |n: i32, a: f64| 4.0 * PI * factorial((n + 2) as u32) / a.powi(n + 3);
        assert_relative_eq!(
            hylleraas_integral(1, 2, 0, 2.0, 1.5),
            one(1, 2.0) * one(2, 1.5),
            max_relative = 1e-13
        );
    }

    #[test]
    fn helium_singlet_screening_estimate() {
        // e^{-ζ(r1+r2)} with optimal ζ = 27/16 gives E = −(27/16)²
        let zeta = 27.0 / 16.0;
        let basis = vec![vec![(
            1.0,
            Primitive {
                i: 0,
                j: 0,
                k: 0,
                a: zeta,
                b: zeta,
            },
        )]];
        let (s, h) = matrices(&basis, 2.0);
        assert_relative_eq!(h[(0, 0)] / s[(0, 0)], -(zeta * zeta), max_relative = 1e-13);
    }

    #[test]
    fn triplet_energy_decreases_with_basis() {
        let e: Vec<f64> = (0..4)
            .map(|w| solve_triplet(w, 2.0, 0.55, 2.0).unwrap().energy)
            .collect();
        for pair in e.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-12, "{e:?}");
        }
        assert!(e[3] < -2.17, "{e:?}");
    }
}
