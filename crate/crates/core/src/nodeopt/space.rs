use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_DIMENSION: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Parameter {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub initial: f64,
    /// Initial simplex edge; a tenth of the range when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
}

impl Parameter {
    pub fn new(name: impl Into<String>, lower: f64, upper: f64, initial: f64) -> Self {
        Self {
            name: name.into(),
            lower,
            upper,
            initial,
            step: None,
        }
    }
}

/// Named parameters with finite box bounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParameterSpace {
    pub parameters: Vec<Parameter>,
}

impl ParameterSpace {
    pub fn new(parameters: Vec<Parameter>) -> Result<Self> {
        let s = Self { parameters };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.parameters.is_empty() || self.parameters.len() > MAX_DIMENSION {
            return Err(Error::InvalidParameter(format!(
                "parameter space dimension must be in 1..={MAX_DIMENSION}, got {}",
                self.parameters.len()
            )));
        }
        for p in &self.parameters {
            if !(p.lower.is_finite() && p.upper.is_finite() && p.lower < p.upper) {
                return Err(Error::InvalidParameter(format!(
                    "{}: bounds must be finite with lower < upper",
                    p.name
                )));
            }
            if !(p.lower..=p.upper).contains(&p.initial) {
                return Err(Error::InvalidParameter(format!(
                    "{}: initial value outside bounds",
                    p.name
                )));
            }
            if let Some(step) = p.step {
                if !(step > 0.0 && step.is_finite()) {
                    return Err(Error::InvalidParameter(format!("{}: step must be positive", p.name)));
                }
            }
        }
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        self.parameters.len()
    }

    pub fn names(&self) -> Vec<String> {
        self.parameters.iter().map(|p| p.name.clone()).collect()
    }

    pub fn initial(&self) -> Vec<f64> {
        self.parameters.iter().map(|p| p.initial).collect()
    }

    pub fn steps(&self) -> Vec<f64> {
        self.parameters
            .iter()
            .map(|p| p.step.unwrap_or(0.1 * (p.upper - p.lower)))
            .collect()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.parameters.len()
            && self
                .parameters
                .iter()
                .zip(x)
                .all(|(p, v)| (p.lower..=p.upper).contains(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(ParameterSpace::new(vec![Parameter::new("zeta", 0.5, 2.0, 1.0)]).is_ok());
        assert!(ParameterSpace::new(vec![Parameter::new("zeta", 0.5, f64::INFINITY, 1.0)]).is_err());
        assert!(ParameterSpace::new(vec![Parameter::new("zeta", 0.5, 2.0, 3.0)]).is_err());
        assert!(ParameterSpace::new(vec![]).is_err());
        let many = (0..65)
            .map(|k| Parameter::new(format!("c{k}"), -1.0, 1.0, 0.0))
            .collect();
        assert!(ParameterSpace::new(many).is_err());
    }

    #[test]
    fn containment_and_steps() {
        let s = ParameterSpace::new(vec![Parameter::new("a", 0.0, 1.0, 0.5)]).unwrap();
        assert!(s.contains(&[1.0]));
        assert!(!s.contains(&[1.01]));
        assert_eq!(s.steps(), vec![0.1]);
    }
}
