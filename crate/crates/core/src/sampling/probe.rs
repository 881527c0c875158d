//! Logistic-regression probe trained by deterministic full-batch gradient
//! descent from a zero initialization.

use serde::{Deserialize, Serialize};

use super::{EmbeddedExample, SamplingError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    /// L2 penalty on the weights (not the bias).
    pub l2: f64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            epochs: 100,
            l2: 1e-3,
        }
    }
}

impl ProbeConfig {
    pub fn validate(&self) -> Result<(), SamplingError> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(SamplingError::Config("learning_rate must be positive".into()));
        }
        if self.epochs == 0 {
            return Err(SamplingError::Config("epochs must be positive".into()));
        }
        if !(self.l2 >= 0.0 && self.l2.is_finite()) {
            return Err(SamplingError::Config("l2 must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProbe {
    pub weights: Vec<f64>,
    pub bias: f64,
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

impl LinearProbe {
    pub fn logit(&self, x: &[f64]) -> f64 {
        self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.bias
    }

    pub fn predict(&self, x: &[f64]) -> bool {
        self.logit(x) > 0.0
    }

    pub fn accuracy<'a>(&self, examples: impl IntoIterator<Item = &'a EmbeddedExample>) -> f64 {
        let (mut n, mut ok) = (0usize, 0usize);
        for e in examples {
            n += 1;
            ok += usize::from(self.predict(&e.vector) == e.label);
        }
        ok as f64 / n as f64
    }
}

pub fn train_probe(train: &[EmbeddedExample], cfg: &ProbeConfig) -> Result<LinearProbe, SamplingError> {
    let refs: Vec<&EmbeddedExample> = train.iter().collect();
    fit(&refs, cfg)
}

pub(crate) fn fit(train: &[&EmbeddedExample], cfg: &ProbeConfig) -> Result<LinearProbe, SamplingError> {
    cfg.validate()?;
    let first = train.first().ok_or(SamplingError::EmptyTrainingSet)?;
    let dim = first.vector.len();
    if train.iter().all(|e| e.label == first.label) {
        return Err(SamplingError::SingleClass);
    }
    if let Some(bad) = train.iter().find(|e| e.vector.iter().any(|x| !x.is_finite())) {
        return Err(SamplingError::NonFinite(bad.example_id.clone()));
    }

    let m = train.len() as f64;
    let mut probe = LinearProbe {
        weights: vec![0.0; dim],
        bias: 0.0,
    };
    let mut grad = vec![0.0; dim];
    for _ in 0..cfg.epochs {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut grad_b = 0.0;
        for e in train {
            let residual = sigmoid(probe.logit(&e.vector)) - f64::from(u8::from(e.label));
            for (g, x) in grad.iter_mut().zip(&e.vector) {
                *g += residual * x;
            }
            grad_b += residual;
        }
        for (w, g) in probe.weights.iter_mut().zip(&grad) {
            *w -= cfg.learning_rate * (g / m + cfg.l2 * *w);
        }
        probe.bias -= cfg.learning_rate * grad_b / m;
    }
    Ok(probe)
}
