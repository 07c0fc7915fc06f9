//! AdamW with bias-corrected moments and decoupled weight decay.

use alloc::format;
use alloc::vec::Vec;

use super::tensor::Tensor;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AdamWConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub weight_decay: f64,
}

impl Default for AdamWConfig {
    fn default() -> Self {
        Self { lr: 1e-3, beta1: 0.9, beta2: 0.999, eps: 1e-8, weight_decay: 0.01 }
    }
}

impl AdamWConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.lr >= 0.0
            && (0.0..1.0).contains(&self.beta1)
            && (0.0..1.0).contains(&self.beta2)
            && self.eps > 0.0
            && self.weight_decay >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid AdamW settings {:?}", self)))
        }
    }
}

/// Moment accumulators for a fixed, ordered list of parameter tensors.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerState {
    pub config: AdamWConfig,
    step: u64,
    first: Vec<Tensor>,
    second: Vec<Tensor>,
}

/// Convenience alias; the state is the optimizer.
pub type AdamW = OptimizerState;

impl OptimizerState {
    pub fn new(config: AdamWConfig, params: &[Tensor]) -> Result<Self> {
        config.validate()?;
        let zeros = |p: &Tensor| Tensor::zeros(p.shape());
        Ok(Self {
            config,
            step: 0,
            first: params.iter().map(zeros).collect(),
            second: params.iter().map(zeros).collect(),
        })
    }

    /// Rebuilds a state from saved parts (checkpoint loading).
    pub fn from_parts(config: AdamWConfig, step: u64, first: Vec<Tensor>, second: Vec<Tensor>) -> Result<Self> {
        config.validate()?;
        if first.len() != second.len()
            || first.iter().zip(&second).any(|(a, b)| a.shape() != b.shape())
        {
            return Err(Error::Shape { op: "optimizer state", detail: "moment tensors disagree".into() });
        }
        Ok(Self { config, step, first, second })
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    pub fn first_moments(&self) -> &[Tensor] {
        &self.first
    }

    pub fn second_moments(&self) -> &[Tensor] {
        &self.second
    }

    /// Applies one update with the configured learning rate.
    pub fn step(&mut self, params: &mut [Tensor], grads: &[Tensor]) -> Result<()> {
        let lr = self.config.lr;
        self.step_with_lr(params, grads, lr)
    }

    /// Applies one update with an explicit learning rate (for schedules).
    pub fn step_with_lr(&mut self, params: &mut [Tensor], grads: &[Tensor], lr: f64) -> Result<()> {
        if params.len() != self.first.len() || grads.len() != params.len() {
            return Err(Error::Shape {
                op: "adamw",
                detail: format!(
                    "{} params, {} grads, state for {}",
                    params.len(),
                    grads.len(),
                    self.first.len()
                ),
            });
        }
        for (i, (p, g)) in params.iter().zip(grads).enumerate() {
            if p.shape() != self.first[i].shape() || g.shape() != p.shape() {
                return Err(Error::Shape {
                    op: "adamw",
                    detail: format!("param {} {:?}, grad {:?}", i, p.shape(), g.shape()),
                });
            }
            if g.data().iter().any(|v| v.is_nan()) {
                return Err(Error::NonFinite(format!("gradient of parameter {} contains NaN", i)));
            }
        }

        self.step += 1;
        let AdamWConfig { beta1, beta2, eps, weight_decay, .. } = self.config;
        let t = self.step as f64;
        let bc1 = 1.0 - libm::pow(beta1, t);
        let bc2 = 1.0 - libm::pow(beta2, t);
        let decay = 1.0 - lr * weight_decay;

        for ((p, g), (m, v)) in params
            .iter_mut()
            .zip(grads)
            .zip(self.first.iter_mut().zip(self.second.iter_mut()))
        {
            let pd = p.data_mut();
            for (j, &gj) in g.data().iter().enumerate() {
                let mj = &mut m.data_mut()[j];
                *mj = beta1 * *mj + (1.0 - beta1) * gj;
                let mh = *mj / bc1;
                let vj = &mut v.data_mut()[j];
                *vj = beta2 * *vj + (1.0 - beta2) * gj * gj;
                let vh = *vj / bc2;
                pd[j] = pd[j] * decay - lr * mh / (libm::sqrt(vh) + eps);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn zero_gradient_only_decays() {
        let cfg = AdamWConfig { lr: 0.1, weight_decay: 0.01, ..Default::default() };
        let mut params = vec![Tensor::vector(vec![1.0, -2.0, 0.5])];
        let mut st = OptimizerState::new(cfg, &params).unwrap();
        st.step(&mut params, &[Tensor::zeros(&[3])]).unwrap();
        let f = 1.0 - 0.1 * 0.01;
        assert_eq!(params[0].data(), &[f, -2.0 * f, 0.5 * f]);
        assert_eq!(st.step_count(), 1);
    }

    #[test]
    fn first_step_is_bias_corrected() {
        let cfg = AdamWConfig { lr: 0.01, weight_decay: 0.0, ..Default::default() };
        let mut params = vec![Tensor::vector(vec![0.0, 0.0])];
        let mut st = OptimizerState::new(cfg, &params).unwrap();
        let g = [3.0, -0.5];
        st.step(&mut params, &[Tensor::vector(g.to_vec())]).unwrap();
        for (p, g) in params[0].data().iter().zip(g) {
            let expected = -0.01 * g / (libm::fabs(g) + 1e-8);
            assert!((p - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn repeated_gradient_does_not_grow_step() {
        // direct simulation of two steps with the same gradient
        let cfg = AdamWConfig { lr: 0.05, weight_decay: 0.0, ..Default::default() };
        let mut params = vec![Tensor::vector(vec![1.0, 1.0, 1.0])];
        let mut st = OptimizerState::new(cfg, &params).unwrap();
        let g = Tensor::vector(vec![0.2, -4.0, 1e-3]);
        let p0 = params[0].clone();
        st.step(&mut params, std::slice::from_ref(&g)).unwrap();
        let p1 = params[0].clone();
        st.step(&mut params, &[g]).unwrap();
        for j in 0..3 {
            let s1 = (p1.data()[j] - p0.data()[j]).abs();
            let s2 = (params[0].data()[j] - p1.data()[j]).abs();
            assert!(s2 <= s1 + 1e-12, "coordinate {j}: {s2} > {s1}");
        }
    }

    #[test]
    fn nan_gradient_fails_fast() {
        let mut params = vec![Tensor::vector(vec![1.0])];
        let mut st = OptimizerState::new(AdamWConfig::default(), &params).unwrap();
        let r = st.step(&mut params, &[Tensor::vector(vec![f64::NAN])]);
        assert!(matches!(r, Err(Error::NonFinite(_))));
        assert_eq!(st.step_count(), 0);
        assert_eq!(params[0].data(), &[1.0]);
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let mut params = vec![Tensor::vector(vec![1.0, 2.0])];
        let mut st = OptimizerState::new(AdamWConfig::default(), &params).unwrap();
        assert!(st.step(&mut params, &[Tensor::vector(vec![1.0])]).is_err());
    }
}
