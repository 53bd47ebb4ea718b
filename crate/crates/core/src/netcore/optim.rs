use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::Tensor;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum OptimizerState {
    Adam {
        lr: f64,
        beta1: f64,
        beta2: f64,
        eps: f64,
        m: Vec<Tensor>,
        v: Vec<Tensor>,
        step: u64,
    },
    SgdMomentum {
        lr: f64,
        momentum: f64,
        velocity: Vec<Tensor>,
        step: u64,
    },
}

fn zeros_like(params: &[Tensor]) -> Vec<Tensor> {
    params.iter().map(|p| Tensor::zeros(p.shape())).collect()
}

fn check_shapes(what: &str, state: &[Tensor], params: &[Tensor], grads: &[Tensor]) -> Result<()> {
    if state.len() != params.len() || grads.len() != params.len() {
        return Err(Error::Shape(format!(
            "{what}: {} state tensors, {} params, {} grads",
            state.len(),
            params.len(),
            grads.len()
        )));
    }
    for (i, ((s, p), g)) in state.iter().zip(params).zip(grads).enumerate() {
        if s.shape() != p.shape() || g.shape() != p.shape() {
            return Err(Error::Shape(format!(
                "{what}: tensor {i} has param {:?}, grad {:?}, state {:?}",
                p.shape(),
                g.shape(),
                s.shape()
            )));
        }
    }
    Ok(())
}

impl OptimizerState {
    /// Adam with beta1 = 0.9, beta2 = 0.999, eps = 1e-8.
    pub fn adam(lr: f64, params: &[Tensor]) -> Self {
        OptimizerState::Adam {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            m: zeros_like(params),
            v: zeros_like(params),
            step: 0,
        }
    }

    pub fn sgd_momentum(lr: f64, momentum: f64, params: &[Tensor]) -> Self {
        OptimizerState::SgdMomentum {
            lr,
            momentum,
            velocity: zeros_like(params),
            step: 0,
        }
    }

    pub fn lr(&self) -> f64 {
        match self {
            OptimizerState::Adam { lr, .. } | OptimizerState::SgdMomentum { lr, .. } => *lr,
        }
    }

    pub fn set_lr(&mut self, new_lr: f64) {
        match self {
            OptimizerState::Adam { lr, .. } | OptimizerState::SgdMomentum { lr, .. } => *lr = new_lr,
        }
    }

    pub fn step_count(&self) -> u64 {
        match self {
            OptimizerState::Adam { step, .. } | OptimizerState::SgdMomentum { step, .. } => *step,
        }
    }

    /// Applies one update in place.
    pub fn step(&mut self, params: &mut [Tensor], grads: &[Tensor]) -> Result<()> {
        match self {
            OptimizerState::Adam {
                lr,
                beta1,
                beta2,
                eps,
                m,
                v,
                step,
            } => {
                check_shapes("adam", m, params, grads)?;
                *step += 1;
                let t = *step as i32;
                let c1 = 1.0 - beta1.powi(t);
                let c2 = 1.0 - beta2.powi(t);
                for (((p, g), m), v) in params.iter_mut().zip(grads).zip(m.iter_mut()).zip(v.iter_mut()) {
                    let it = p
                        .data_mut()
                        .iter_mut()
                        .zip(g.data())
                        .zip(m.data_mut().iter_mut().zip(v.data_mut().iter_mut()));
                    for ((p, &g), (m, v)) in it {
                        *m = *beta1 * *m + (1.0 - *beta1) * g;
                        *v = *beta2 * *v + (1.0 - *beta2) * g * g;
                        let m_hat = *m / c1;
                        let v_hat = *v / c2;
                        *p -= *lr * m_hat / (v_hat.sqrt() + *eps);
                    }
                }
            }
            OptimizerState::SgdMomentum {
                lr,
                momentum,
                velocity,
                step,
            } => {
                check_shapes("sgd", velocity, params, grads)?;
                *step += 1;
                for ((p, g), vel) in params.iter_mut().zip(grads).zip(velocity.iter_mut()) {
                    for ((p, &g), v) in p.data_mut().iter_mut().zip(g.data()).zip(vel.data_mut().iter_mut()) {
                        *v = *momentum * *v - *lr * g;
                        *p += *v;
                    }
                }
            }
        }
        Ok(())
    }
}
