//! Explicitly correlated (Hylleraas-type) expansions in the interparticle
//! distances, antisymmetrized over like-spin relabellings.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::configuration::{ElectronConfiguration, Spin};
use crate::error::{Error, Result};

use super::distance::{cartesian_derivatives, distance_count, DistanceFunction, DistanceIndex};
use super::{Derivatives, TrialWaveFunction};

/// `c Π d^{p_d} e^{-a_d d}` over the distance list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HylleraasTerm {
    pub powers: Vec<u32>,
    pub exponents: Vec<f64>,
    pub coefficient: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HylleraasSeries {
    n_electrons: usize,
    terms: Vec<HylleraasTerm>,
}

impl HylleraasSeries {
    pub fn new(n_electrons: usize, terms: Vec<HylleraasTerm>) -> Result<Self> {
        let m = distance_count(n_electrons);
        if terms.is_empty() {
            return Err(Error::InvalidParameter(
                "Hylleraas series needs at least one term".into(),
            ));
        }
        for (k, t) in terms.iter().enumerate() {
            if t.powers.len() != m || t.exponents.len() != m {
                return Err(Error::InvalidParameter(format!(
                    "term {k}: expected {m} powers and exponents for {n_electrons} electrons"
                )));
            }
            if t.exponents.iter().any(|a| !a.is_finite() || *a < 0.0) || !t.coefficient.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "term {k}: exponents must be finite and >= 0"
                )));
            }
        }
        Ok(Self { n_electrons, terms })
    }

    /// A single monomial with unit coefficient and no exponential.
    pub fn monomial(n_electrons: usize, powers: Vec<u32>) -> Result<Self> {
        let m = distance_count(n_electrons);
        Self::new(
            n_electrons,
            vec![HylleraasTerm {
                powers,
                exponents: vec![0.0; m],
                coefficient: 1.0,
            }],
        )
    }

    pub fn terms(&self) -> &[HylleraasTerm] {
        &self.terms
    }

    pub fn with_coefficients(&self, coefficients: &[f64]) -> Result<Self> {
        if coefficients.len() != self.terms.len() {
            return Err(Error::InvalidParameter(format!(
                "{} coefficients for {} terms",
                coefficients.len(),
                self.terms.len()
            )));
        }
        let terms = self
            .terms
            .iter()
            .zip(coefficients)
            .map(|(t, &c)| HylleraasTerm {
                coefficient: c,
                ..t.clone()
            })
            .collect();
        Self::new(self.n_electrons, terms)
    }

    /// The series restricted to the single term `k` with unit coefficient.
    pub fn basis_function(&self, k: usize) -> Self {
        Self {
            n_electrons: self.n_electrons,
            terms: vec![HylleraasTerm {
                coefficient: 1.0,
                ..self.terms[k].clone()
            }],
        }
    }
}

fn term_value(t: &HylleraasTerm, d: &[f64]) -> f64 {
    let mut v = t.coefficient;
    let mut arg = 0.0;
    for ((&p, &a), &x) in t.powers.iter().zip(&t.exponents).zip(d) {
        if p > 0 {
            v *= x.powi(p as i32);
        }
        arg += a * x;
    }
    v * (-arg).exp()
}

impl DistanceFunction for HylleraasSeries {
    fn n_electrons(&self) -> usize {
        self.n_electrons
    }

    fn value(&self, d: &[f64]) -> f64 {
        self.terms.iter().map(|t| term_value(t, d)).sum()
    }

    fn accumulate_derivatives(&self, d: &[f64], scale: f64, grad: &mut [f64], hess: &mut [f64]) -> f64 {
        let m = d.len();
        let mut total = 0.0;
        let mut log_d = vec![0.0; m];
        let mut curv = vec![0.0; m];
        for t in &self.terms {
            let v = term_value(t, d);
            total += v;
            if v == 0.0 {
                continue;
            }
            // ∂_d T = L_d T, ∂_d∂_e T = (L_d L_e − δ_de p_d/d²) T
            for k in 0..m {
                let p = f64::from(t.powers[k]);
                if p > 0.0 {
                    log_d[k] = p / d[k] - t.exponents[k];
                    curv[k] = p / (d[k] * d[k]);
                } else {
                    log_d[k] = -t.exponents[k];
                    curv[k] = 0.0;
                }
            }
            let sv = scale * v;
            for a in 0..m {
                let la = log_d[a];
                grad[a] += sv * la;
                if la == 0.0 && curv[a] == 0.0 {
                    continue;
                }
                for b in 0..m {
                    hess[a * m + b] += sv * la * log_d[b];
                }
                hess[a * m + a] -= sv * curv[a];
            }
        }
        total
    }
}

/// `Ψ(R) = Σ_k s_k f(distances of R relabelled by π_k)`.
#[derive(Clone, Debug)]
pub struct AntisymmetrizedDistanceFunction {
    f: Arc<dyn DistanceFunction>,
    images: Vec<(f64, Vec<usize>)>,
    spins: Vec<Spin>,
    label: String,
}

impl AntisymmetrizedDistanceFunction {
    pub fn new(
        f: Arc<dyn DistanceFunction>,
        images: Vec<(f64, Vec<usize>)>,
        spins: Vec<Spin>,
        label: impl Into<String>,
    ) -> Result<Self> {
        let n = f.n_electrons();
        if spins.len() != n {
            return Err(Error::InvalidParameter(format!(
                "{} spins for a {n}-electron function",
                spins.len()
            )));
        }
        // relabellings may mix spins (spin projection), so only bijectivity is checked
        for (_, relabel) in &images {
            if relabel.len() != n {
                return Err(Error::InvalidParameter(format!(
                    "relabelling {relabel:?} for {n} electrons"
                )));
            }
            crate::configuration::SpinPermutation::new(relabel.clone())?;
        }
        Ok(Self {
            f,
            images,
            spins,
            label: label.into(),
        })
    }

    pub fn inner(&self) -> &Arc<dyn DistanceFunction> {
        &self.f
    }
}

impl TrialWaveFunction for AntisymmetrizedDistanceFunction {
    fn spins(&self) -> &[Spin] {
        &self.spins
    }

    fn value_unchecked(&self, config: &ElectronConfiguration) -> f64 {
        let idx = DistanceIndex::new(self.spins.len());
        self.images
            .iter()
            .map(|(s, relabel)| s * self.f.value(&idx.distances(config, relabel)))
            .sum()
    }

    fn derivatives_unchecked(&self, config: &ElectronConfiguration) -> Derivatives {
        let idx = DistanceIndex::new(self.spins.len());
        let m = idx.len();
        let base = idx.distances(config, &(0..self.spins.len()).collect::<Vec<_>>());
        let mut grad = vec![0.0; m];
        let mut hess = vec![0.0; m * m];
        let mut g = vec![0.0; m];
        let mut h = vec![0.0; m * m];
        let mut value = 0.0;
        for (s, relabel) in &self.images {
            let map = idx.relabelled_index(relabel);
            let d: Vec<f64> = map.iter().map(|&k| base[k]).collect();
            g.iter_mut().for_each(|x| *x = 0.0);
            h.iter_mut().for_each(|x| *x = 0.0);
            value += s * self.f.accumulate_derivatives(&d, *s, &mut g, &mut h);
            for a in 0..m {
                grad[map[a]] += g[a];
                for b in 0..m {
                    hess[map[a] * m + map[b]] += h[a * m + b];
                }
            }
        }
        cartesian_derivatives(config, value, &grad, &hess)
    }

    fn label(&self) -> String {
        self.label.clone()
    }
}

/// Which relabellings antisymmetrize the series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Antisymmetrization {
    /// Two like-spin electrons: `f(r1, r2, r12) − f(r2, r1, r12)`.
    TripletPair,
    /// Three electrons (up, down, up), pure ²S four-term combination.
    Lithium2S,
}

impl Antisymmetrization {
    fn images(self) -> Vec<(f64, Vec<usize>)> {
        match self {
            Antisymmetrization::TripletPair => vec![(1.0, vec![0, 1]), (-1.0, vec![1, 0])],
            Antisymmetrization::Lithium2S => vec![
                (1.0, vec![0, 1, 2]),
                (1.0, vec![1, 0, 2]),
                (-1.0, vec![2, 1, 0]),
                (-1.0, vec![1, 2, 0]),
            ],
        }
    }

    fn spins(self) -> Vec<Spin> {
        match self {
            Antisymmetrization::TripletPair => vec![Spin::Up, Spin::Up],
            Antisymmetrization::Lithium2S => vec![Spin::Up, Spin::Down, Spin::Up],
        }
    }

    pub fn n_electrons(self) -> usize {
        self.spins().len()
    }
}

/// The ²S projection
/// `f(r1,r2,r3,r12,r13,r23) + f(r2,r1,r3,r12,r23,r13) − f(r3,r2,r1,r23,r13,r12) − f(r2,r3,r1,r23,r12,r13)`,
/// antisymmetric under exchange of the like-spin electrons 1 and 3.
pub fn project_2s(f: Arc<dyn DistanceFunction>) -> Result<AntisymmetrizedDistanceFunction> {
    if f.n_electrons() != 3 {
        return Err(Error::InvalidParameter(
            "2S projection needs a three-electron function".into(),
        ));
    }
    let scheme = Antisymmetrization::Lithium2S;
    AntisymmetrizedDistanceFunction::new(f, scheme.images(), scheme.spins(), "2S projection")
}

/// A Hylleraas series together with its antisymmetrization.
#[derive(Clone, Debug)]
pub struct HylleraasWaveFunction {
    series: HylleraasSeries,
    scheme: Antisymmetrization,
    inner: AntisymmetrizedDistanceFunction,
}

impl HylleraasWaveFunction {
    pub fn new(series: HylleraasSeries, scheme: Antisymmetrization, label: impl Into<String>) -> Result<Self> {
        if series.n_electrons != scheme.n_electrons() {
            return Err(Error::InvalidParameter(format!(
                "{:?} needs {} electrons, series has {}",
                scheme,
                scheme.n_electrons(),
                series.n_electrons
            )));
        }
        let inner =
            AntisymmetrizedDistanceFunction::new(Arc::new(series.clone()), scheme.images(), scheme.spins(), label)?;
        Ok(Self { series, scheme, inner })
    }

    /// He-like triplet from `(i, j, k, c)` rows:
    /// `Σ c (r1^i r2^j e^{-α r1 - β r2} − r2^i r1^j e^{-α r2 - β r1}) r12^k`.
    pub fn he_triplet(rows: &[(u32, u32, u32, f64)], alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && beta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "exponents must be positive: {alpha}, {beta}"
            )));
        }
        let terms = rows
            .iter()
            .map(|&(i, j, k, c)| HylleraasTerm {
                powers: vec![i, j, k],
                exponents: vec![alpha, beta, 0.0],
                coefficient: c,
            })
            .collect();
        Self::new(
            HylleraasSeries::new(2, terms)?,
            Antisymmetrization::TripletPair,
            format!("He triplet Hylleraas ({} terms)", rows.len()),
        )
    }

    /// Li ²S function from a three-electron series.
    pub fn lithium(series: HylleraasSeries) -> Result<Self> {
        let n = series.terms.len();
        Self::new(
            series,
            Antisymmetrization::Lithium2S,
            format!("Li Hylleraas ({n} terms)"),
        )
    }

    pub fn series(&self) -> &HylleraasSeries {
        &self.series
    }

    pub fn scheme(&self) -> Antisymmetrization {
        self.scheme
    }

    pub fn with_coefficients(&self, coefficients: &[f64]) -> Result<Self> {
        Self::new(
            self.series.with_coefficients(coefficients)?,
            self.scheme,
            self.inner.label.clone(),
        )
    }
}

impl TrialWaveFunction for HylleraasWaveFunction {
    fn spins(&self) -> &[Spin] {
        self.inner.spins()
    }

    fn value_unchecked(&self, config: &ElectronConfiguration) -> f64 {
        self.inner.value_unchecked(config)
    }

    fn derivatives_unchecked(&self, config: &ElectronConfiguration) -> Derivatives {
        self.inner.derivatives_unchecked(config)
    }

    fn label(&self) -> String {
        self.inner.label()
    }
}

/// Powers `(i, j, k)` with `i + j + k <= max_order`, ordered by total order.
///
/// With `equal_exponents` only `i < j` is kept, since `i = j` terms vanish
/// and `(j, i)` duplicates `(i, j)` up to sign.
pub fn he_triplet_basis(max_order: u32, equal_exponents: bool) -> Vec<(u32, u32, u32)> {
    let mut out = Vec::new();
    for order in 0..=max_order {
        for k in 0..=order {
            for i in 0..=(order - k) {
                let j = order - k - i;
                if equal_exponents && i >= j {
                    continue;
                }
                out.push((i, j, k));
            }
        }
    }
    out
}

/// The first `n_terms` single-exponent triplet terms
/// `(r1^i r2^j − r2^i r1^j) r12^k e^{−α(r1+r2)}`, leading coefficient 1 and
/// the rest 0 (to be set by optimization).
pub fn build_he_triplet_hylleraas(n_terms: usize, alpha: f64) -> Result<HylleraasWaveFunction> {
    if n_terms == 0 {
        return Err(Error::InvalidParameter("n_terms must be >= 1".into()));
    }
    let mut order = 1;
    let powers = loop {
        let b = he_triplet_basis(order, true);
        if b.len() >= n_terms {
            break b;
        }
        order += 1;
    };
    let rows: Vec<_> = powers
        .iter()
        .take(n_terms)
        .enumerate()
        .map(|(n, &(i, j, k))| (i, j, k, if n == 0 { 1.0 } else { 0.0 }))
        .collect();
    HylleraasWaveFunction::he_triplet(&rows, alpha, alpha)
}
