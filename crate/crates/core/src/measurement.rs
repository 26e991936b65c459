//! Discrete POVM measurements.

use crate::error::{Error, Result};
use crate::linalg::{self, identity, max_abs};
use crate::state::{hermitian_eigen, HermitianOperator};
use crate::CMatrix;

/// PSD slack and completeness tolerance for POVM validation.
const POVM_TOL: f64 = 1e-10;

/// A discrete POVM: positive elements resolving the identity.
#[derive(Debug, Clone)]
pub struct Measurement {
    elements: Vec<HermitianOperator>,
}

impl Measurement {
    /// Validates Hermiticity, positivity (within 1e-10) and completeness of
    /// the elements.
    pub fn new(elements: Vec<CMatrix>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::EmptyList);
        }
        let dim = elements[0].nrows();
        let mut sum = CMatrix::zeros(dim, dim);
        let mut validated = Vec::with_capacity(elements.len());
        for e in elements {
            if e.nrows() != dim || e.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: e.nrows(),
                });
            }
            let op = HermitianOperator::new(e)?;
            let spec = hermitian_eigen(op.matrix());
            let min = spec.eigenvalues.last().copied().unwrap_or(0.0);
            if min < -POVM_TOL {
                return Err(Error::NotPositive {
                    min_eigenvalue: min,
                });
            }
            sum += op.matrix();
            validated.push(op);
        }
        let residual = max_abs(&(sum - identity(dim)));
        if residual > POVM_TOL {
            return Err(Error::IncompleteMeasurement { residual });
        }
        Ok(Self {
            elements: validated,
        })
    }

    /// Projective measurement in the eigenbasis of a Hermitian operator.
    pub fn from_eigenbasis(op: &HermitianOperator) -> Result<Self> {
        let spec = hermitian_eigen(op.matrix());
        let elements = (0..op.dim())
            .map(|k| {
                let v = spec.eigenvectors.column(k).into_owned();
                linalg::projector(&v)
            })
            .collect();
        Self::new(elements)
    }

    pub fn elements(&self) -> &[HermitianOperator] {
        &self.elements
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    pub fn outcomes(&self) -> usize {
        self.elements.len()
    }
}
