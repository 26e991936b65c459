//! Parameter-dependent quantum channels in Kraus form.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{self, hermitize, identity, max_abs};
use crate::state::DensityMatrix;
use crate::{CMatrix, C64, DEFAULT_FD_STEP};

/// Completeness residual above which a Kraus set is rejected.
pub const COMPLETENESS_TOL: f64 = 1e-8;

type KrausFn = dyn Fn(f64) -> Vec<CMatrix> + Send + Sync;

/// An `x`-dependent Kraus set `{A_a(x)}` with `sum_a A_a†(x) A_a(x) = 1`.
///
/// Derivatives are analytic when supplied, otherwise central finite
/// differences per operator with step [`DEFAULT_FD_STEP`].
#[derive(Clone)]
pub struct KrausChannel {
    kraus: Arc<KrausFn>,
    kraus_derivative: Option<Arc<KrausFn>>,
    count: usize,
    fd_step: f64,
}

impl KrausChannel {
    pub fn new(count: usize, kraus: impl Fn(f64) -> Vec<CMatrix> + Send + Sync + 'static) -> Self {
        Self {
            kraus: Arc::new(kraus),
            kraus_derivative: None,
            count,
            fd_step: DEFAULT_FD_STEP,
        }
    }

    pub fn with_derivative(
        mut self,
        derivative: impl Fn(f64) -> Vec<CMatrix> + Send + Sync + 'static,
    ) -> Self {
        self.kraus_derivative = Some(Arc::new(derivative));
        self
    }

    pub fn with_fd_step(mut self, fd_step: f64) -> Self {
        assert!(fd_step > 0.0, "finite-difference step must be positive");
        self.fd_step = fd_step;
        self
    }

    /// Number of Kraus operators.
    pub fn count(&self) -> usize {
        self.count
    }

    /// An x-independent channel from a fixed Kraus set.
    pub fn constant(ops: Vec<CMatrix>) -> Self {
        let count = ops.len();
        let dim = ops.first().map(|m| m.nrows()).unwrap_or(0);
        let zeros: Vec<CMatrix> = ops.iter().map(|_| CMatrix::zeros(dim, dim)).collect();
        Self::new(count, move |_| ops.clone()).with_derivative(move |_| zeros.clone())
    }

    /// Kraus operators at `x`, validated against completeness.
    pub fn operators_at(&self, x: f64) -> Result<Vec<CMatrix>> {
        let ops = (self.kraus)(x);
        if ops.is_empty() {
            return Err(Error::EmptyList);
        }
        let dim = ops[0].nrows();
        let mut sum = CMatrix::zeros(dim, dim);
        for a in &ops {
            if a.nrows() != dim || a.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: a.nrows(),
                });
            }
            if !linalg::is_finite(a) {
                return Err(Error::NonFinite);
            }
            sum += a.adjoint() * a;
        }
        let residual = max_abs(&(sum - identity(dim)));
        if residual > COMPLETENESS_TOL {
            return Err(Error::InvalidChannel { residual });
        }
        Ok(ops)
    }

    /// Derivatives `dA_a/dx` at `x`: analytic when supplied, else central
    /// differences operator by operator.
    pub fn derivatives_at(&self, x: f64) -> Result<Vec<CMatrix>> {
        match &self.kraus_derivative {
            Some(f) => Ok(f(x)),
            None => {
                let h = self.fd_step;
                let plus = (self.kraus)(x + h);
                let minus = (self.kraus)(x - h);
                if plus.len() != minus.len() {
                    return Err(Error::BadArgument(
                        "Kraus operator count changed across the stencil".into(),
                    ));
                }
                Ok(plus
                    .iter()
                    .zip(&minus)
                    .map(|(p, m)| (p - m) / C64::new(2.0 * h, 0.0))
                    .collect())
            }
        }
    }

    /// `rho0 -> sum_a A_a(x) rho0 A_a†(x)`.
    pub fn apply(&self, rho0: &DensityMatrix, x: f64) -> Result<DensityMatrix> {
        let ops = self.operators_at(x)?;
        let dim = rho0.dim();
        if ops[0].nrows() != dim {
            return Err(Error::DimensionMismatch {
                expected: ops[0].nrows(),
                got: dim,
            });
        }
        let mut out = CMatrix::zeros(dim, dim);
        for a in &ops {
            out += a * rho0.matrix() * a.adjoint();
        }
        DensityMatrix::new(hermitize(&out))
    }

    /// Channel acting factor-wise on a bipartite system: Kraus operators are
    /// all pairwise tensor products, derivatives follow the product rule.
    pub fn tensor(&self, other: &KrausChannel) -> KrausChannel {
        let (ka, kb) = (self.kraus.clone(), other.kraus.clone());
        let count = self.count * other.count;
        let ops = {
            let (ka, kb) = (ka.clone(), kb.clone());
            move |x: f64| {
                let a = ka(x);
                let b = kb(x);
                let mut out = Vec::with_capacity(a.len() * b.len());
                for ai in &a {
                    for bj in &b {
                        out.push(ai.kronecker(bj));
                    }
                }
                out
            }
        };
        let mut combined = KrausChannel::new(count, ops).with_fd_step(self.fd_step);
        if let (Some(da), Some(db)) = (
            self.kraus_derivative.clone(),
            other.kraus_derivative.clone(),
        ) {
            combined = combined.with_derivative(move |x| {
                let a = ka(x);
                let b = kb(x);
                let dda = da(x);
                let ddb = db(x);
                let mut out = Vec::with_capacity(a.len() * b.len());
                for (ai, dai) in a.iter().zip(&dda) {
                    for (bj, dbj) in b.iter().zip(&ddb) {
                        out.push(dai.kronecker(bj) + ai.kronecker(dbj));
                    }
                }
                out
            });
        }
        combined
    }

    /// N-fold tensor power of the channel (independent copies of the map on
    /// each factor).
    pub fn tensor_power(&self, n: usize) -> Result<KrausChannel> {
        if n == 0 {
            return Err(Error::BadArgument("tensor power requires n >= 1".into()));
        }
        let mut out = self.clone();
        for _ in 1..n {
            out = out.tensor(self);
        }
        Ok(out)
    }
}

impl std::fmt::Debug for KrausChannel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("KrausChannel")
            .field("count", &self.count)
            .field("analytic_derivative", &self.kraus_derivative.is_some())
            .finish()
    }
}
