//! ADADELTA (Zeiler 2012), per-dimension step sizes from decayed means of
//! squared gradients and squared updates.

use crate::error::{Error, Result};

use super::genotype::Genotype;

pub const DEFAULT_RHO: f64 = 0.95;
pub const DEFAULT_EPSILON: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct AdadeltaState {
    avg_sq_grad: Vec<f64>,
    avg_sq_update: Vec<f64>,
    rho: f64,
    epsilon: f64,
}

impl AdadeltaState {
    pub fn new(dims: usize, rho: f64, epsilon: f64) -> Result<AdadeltaState> {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::Config(format!("ADADELTA rho must be in (0, 1), got {rho}")));
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::Config(format!("ADADELTA epsilon must be > 0, got {epsilon}")));
        }
        Ok(AdadeltaState {
            avg_sq_grad: vec![0.0; dims],
            avg_sq_update: vec![0.0; dims],
            rho,
            epsilon,
        })
    }

    pub fn avg_sq_grad(&self) -> &[f64] {
        &self.avg_sq_grad
    }

    pub fn avg_sq_update(&self) -> &[f64] {
        &self.avg_sq_update
    }

    /// Advances the accumulators and returns the update for `grad`.
    fn update(&mut self, grad: &[f64]) -> Vec<f64> {
        let (rho, eps) = (self.rho, self.epsilon);
        grad.iter()
            .zip(self.avg_sq_grad.iter_mut().zip(self.avg_sq_update.iter_mut()))
            .map(|(&g, (eg, ex))| {
                *eg = rho * *eg + (1.0 - rho) * g * g;
                let delta = -((*ex + eps).sqrt() / (*eg + eps).sqrt()) * g;
                *ex = rho * *ex + (1.0 - rho) * delta * delta;
                delta
            })
            .collect()
    }
}

/// One ADADELTA step. Returns the advanced state and the moved genotype.
pub fn adadelta_step(mut state: AdadeltaState, genotype: &Genotype, grad: &[f64]) -> Result<(AdadeltaState, Genotype)> {
    if grad.len() != genotype.dims() || state.avg_sq_grad.len() != genotype.dims() {
        return Err(Error::size("gradient", genotype.dims().to_string(), grad.len()));
    }
    if let Some(i) = grad.iter().position(|g| !g.is_finite()) {
        return Err(Error::NumericDomain(format!(
            "gradient component {i} is not finite ({})",
            grad[i]
        )));
    }
    let delta = state.update(grad);
    let moved = genotype.displaced(&delta)?;
    Ok((state, moved))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fresh(dims: usize) -> AdadeltaState {
        AdadeltaState::new(dims, DEFAULT_RHO, DEFAULT_EPSILON).unwrap()
    }

    #[test]
    fn zero_gradient_keeps_pose_and_decays_state() {
        let g = Genotype::new([1.0, 2.0, 3.0], [0.1, 0.2, 0.3], vec![0.5]);
        let mut state = fresh(7);
        state.avg_sq_grad = vec![1.0; 7];
        state.avg_sq_update = vec![0.5; 7];
        let (next, moved) = adadelta_step(state, &g, &[0.0; 7]).unwrap();
        assert_eq!(moved, g);
        assert!(next.avg_sq_grad().iter().all(|&v| (v - 0.95).abs() < 1e-15));
        assert!(next.avg_sq_update().iter().all(|&v| (v - 0.475).abs() < 1e-15));
    }

    #[test]
    fn first_step_magnitude() {
        let g = Genotype::origin(0);
        let mut grad = [0.0; 6];
        grad[0] = 1.0;
        let (state, moved) = adadelta_step(fresh(6), &g, &grad).unwrap();
        // -sqrt(1e-6) / sqrt(0.05 + 1e-6)
        let expected = -(1e-6f64).sqrt() / (0.05f64 + 1e-6).sqrt();
        assert!((moved.translation()[0] - expected).abs() < 1e-12 * expected.abs());
        assert!((expected + 4.47e-3).abs() < 1e-5);
        assert!((state.avg_sq_grad()[0] - 0.05).abs() < 1e-15);
        assert!((state.avg_sq_update()[0] - 0.05 * expected * expected).abs() < 1e-12 * expected * expected);
    }

    #[test]
    fn antisymmetric_gradients_give_opposite_updates() {
        let g = Genotype::origin(0);
        let (_, moved) = adadelta_step(fresh(6), &g, &[0.3, -0.3, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let t = moved.translation();
        assert_eq!(t[0], -t[1]);
        assert!(t[0] < 0.0);
    }

    #[test]
    fn rejects_bad_input() {
        let g = Genotype::origin(0);
        assert!(matches!(
            adadelta_step(fresh(6), &g, &[f64::NAN, 0.0, 0.0, 0.0, 0.0, 0.0]),
            Err(Error::NumericDomain(_))
        ));
        assert!(adadelta_step(fresh(6), &g, &[0.0; 5]).is_err());
        assert!(AdadeltaState::new(6, 1.0, 1e-6).is_err());
        assert!(AdadeltaState::new(6, 0.9, 0.0).is_err());
    }
}
