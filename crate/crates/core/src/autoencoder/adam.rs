use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

impl AdamConfig {
    pub fn validate(&self) -> Result<()> {
        let AdamConfig {
            learning_rate,
            beta1,
            beta2,
            epsilon,
        } = *self;
        if !(learning_rate > 0.0)
            || !(0.0..1.0).contains(&beta1)
            || !(0.0..1.0).contains(&beta2)
            || !(epsilon > 0.0)
        {
            return Err(Error::arg(format!("invalid Adam hyperparameters {self:?}")));
        }
        Ok(())
    }
}

/// First and second moment accumulators, one buffer per parameter slice.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
    pub t: u64,
}

impl AdamState {
    pub fn new(shapes: &[&[f64]]) -> Self {
        AdamState {
            m: shapes.iter().map(|s| vec![0.0; s.len()]).collect(),
            v: shapes.iter().map(|s| vec![0.0; s.len()]).collect(),
            t: 0,
        }
    }
}

/// One bias-corrected Adam update of `params` in place.
pub fn adam_step(
    params: &mut [&mut [f64]],
    grads: &[&[f64]],
    state: &mut AdamState,
    config: &AdamConfig,
) -> Result<()> {
    let shapes_match = params.len() == grads.len()
        && params.len() == state.m.len()
        && params
            .iter()
            .zip(grads)
            .zip(&state.m)
            .all(|((p, g), m)| p.len() == g.len() && p.len() == m.len());
    if !shapes_match {
        return Err(Error::dim(
            "parameter, gradient and Adam state shapes differ",
        ));
    }
    state.t += 1;
    let t = state.t as i32;
    let AdamConfig {
        learning_rate: lr,
        beta1: b1,
        beta2: b2,
        epsilon: eps,
    } = *config;
    let c1 = 1.0 - b1.powi(t);
    let c2 = 1.0 - b2.powi(t);
    for (((p, g), m), v) in params
        .iter_mut()
        .zip(grads)
        .zip(state.m.iter_mut())
        .zip(state.v.iter_mut())
    {
        for i in 0..p.len() {
            let gi = g[i];
            m[i] = b1 * m[i] + (1.0 - b1) * gi;
            v[i] = b2 * v[i] + (1.0 - b2) * gi * gi;
            let m_hat = m[i] / c1;
            let v_hat = v[i] / c2;
            p[i] -= lr * m_hat / (v_hat.sqrt() + eps);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_step_moves_by_learning_rate() {
        let cfg = AdamConfig::default();
        for g in [3.0, -0.02, 1e-3] {
            let mut p = vec![1.0];
            let mut state = AdamState::new(&[&p]);
            adam_step(&mut [&mut p], &[&[g]], &mut state, &cfg).unwrap();
            // m̂ = g, v̂ = g², so Δ = −lr·g/(|g| + ε).
            let expected = -cfg.learning_rate * g / (g.abs() + cfg.epsilon);
            assert!((p[0] - 1.0 - expected).abs() < 1e-15);
            assert!((p[0] - 1.0 + cfg.learning_rate * g.signum()).abs() < 1e-8);
            assert_eq!(state.t, 1);
        }
    }

    #[test]
    fn zero_gradient_leaves_parameters() {
        let mut p = vec![0.5, -2.0];
        let mut state = AdamState::new(&[&p]);
        for _ in 0..100 {
            adam_step(
                &mut [&mut p],
                &[&[0.0, 0.0]],
                &mut state,
                &AdamConfig::default(),
            )
            .unwrap();
        }
        assert_eq!(p, vec![0.5, -2.0]);
    }

    #[test]
    fn deterministic_and_shape_checked() {
        let run = || {
            let mut p = vec![0.1, 0.2, 0.3];
            let mut state = AdamState::new(&[&p]);
            for i in 0..5 {
                let g = [i as f64, -1.0, 0.5];
                adam_step(&mut [&mut p], &[&g], &mut state, &AdamConfig::default()).unwrap();
            }
            (p, state)
        };
        assert_eq!(run(), run());
        let mut p = vec![0.0; 2];
        let mut state = AdamState::new(&[&p]);
        assert!(adam_step(&mut [&mut p], &[&[1.0]], &mut state, &AdamConfig::default()).is_err());
    }
}
