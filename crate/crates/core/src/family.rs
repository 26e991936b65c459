//! Differentiable one-parameter families of states.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::hermitize;
use crate::state::DensityMatrix;
use crate::{CMatrix, C64, DEFAULT_FD_STEP};

type EvalFn = dyn Fn(f64) -> Result<DensityMatrix> + Send + Sync;
type DerivFn = dyn Fn(f64) -> Result<CMatrix> + Send + Sync;

/// A map `x -> rho(x)` with an optional analytic derivative.
///
/// When no analytic derivative is supplied, [`ParamFamily::derivative_at`]
/// falls back to a central finite difference with step [`DEFAULT_FD_STEP`].
/// Either way the returned derivative is Hermitian-symmetrized; for
/// trace-preserving families it is traceless.
#[derive(Clone)]
pub struct ParamFamily {
    evaluate: Arc<EvalFn>,
    derivative: Option<Arc<DerivFn>>,
    fd_step: f64,
}

impl ParamFamily {
    pub fn new(evaluate: impl Fn(f64) -> Result<DensityMatrix> + Send + Sync + 'static) -> Self {
        Self {
            evaluate: Arc::new(evaluate),
            derivative: None,
            fd_step: DEFAULT_FD_STEP,
        }
    }

    pub fn with_derivative(
        mut self,
        derivative: impl Fn(f64) -> Result<CMatrix> + Send + Sync + 'static,
    ) -> Self {
        self.derivative = Some(Arc::new(derivative));
        self
    }

    pub fn with_fd_step(mut self, fd_step: f64) -> Self {
        assert!(fd_step > 0.0, "finite-difference step must be positive");
        self.fd_step = fd_step;
        self
    }

    pub fn fd_step(&self) -> f64 {
        self.fd_step
    }

    pub fn eval(&self, x: f64) -> Result<DensityMatrix> {
        (self.evaluate)(x)
    }

    /// `d rho / dx` at `x`: the analytic derivative when present, otherwise
    /// the central difference `(rho(x+h) - rho(x-h)) / 2h`.
    pub fn derivative_at(&self, x: f64) -> Result<CMatrix> {
        let raw = match &self.derivative {
            Some(f) => f(x)?,
            None => {
                let h = self.fd_step;
                let plus = self.eval(x + h)?;
                let minus = self.eval(x - h)?;
                (plus.matrix() - minus.matrix()) / C64::new(2.0 * h, 0.0)
            }
        };
        let sym = hermitize(&raw);
        let tr = sym.trace();
        if tr.norm() > 1e-8 {
            return Err(Error::BadArgument(format!(
                "family derivative has trace {:.3e}; expected 0 for a trace-preserving family",
                tr.norm()
            )));
        }
        Ok(sym)
    }
}

impl std::fmt::Debug for ParamFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ParamFamily")
            .field("analytic_derivative", &self.derivative.is_some())
            .field("fd_step", &self.fd_step)
            .finish()
    }
}
