//! Validated domain types: density matrices, Hermitian and general operators,
//! spectral decompositions and support projections.

use crate::error::{Error, Result};
use crate::linalg::{self, hermitize};
use crate::{CMatrix, CVector, C64};

/// Relative Hermiticity tolerance for validated types.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Absolute tolerance on `Tr[rho] = 1`.
pub const TRACE_TOL: f64 = 1e-10;
/// Eigenvalues of a state may undershoot zero by at most this much.
pub const EIGENVALUE_TOL: f64 = 1e-10;

fn check_square_finite(data: &CMatrix) -> Result<()> {
    if data.nrows() != data.ncols() {
        return Err(Error::NonSquare {
            rows: data.nrows(),
            cols: data.ncols(),
        });
    }
    if data.nrows() == 0 {
        return Err(Error::EmptyList);
    }
    if !linalg::is_finite(data) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

fn check_hermitian(data: &CMatrix) -> Result<()> {
    let scale = linalg::max_abs(data).max(1.0);
    let residual = linalg::hermiticity_residual(data);
    if residual > HERMITICITY_TOL * scale {
        return Err(Error::NonHermitian { residual });
    }
    Ok(())
}

/// A positive-semidefinite, unit-trace complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    data: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity (up to numerical
    /// slack) before wrapping the matrix.
    pub fn new(data: CMatrix) -> Result<Self> {
        check_square_finite(&data)?;
        check_hermitian(&data)?;
        let tr = data.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::TraceViolation { trace: tr.re });
        }
        let (eigenvalues, _) = linalg::jacobi_eigen(&data);
        let min = eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        if min < -EIGENVALUE_TOL {
            return Err(Error::NotPositive {
                min_eigenvalue: min,
            });
        }
        Ok(Self { data })
    }

    /// Pure state `|psi><psi|` from a (not necessarily normalized) vector.
    pub fn from_pure(psi: &CVector) -> Result<Self> {
        let n2 = psi.norm_squared();
        if n2 <= 0.0 || !n2.is_finite() {
            return Err(Error::NonFinite);
        }
        Self::new(linalg::projector(psi) / C64::new(n2, 0.0))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            data: linalg::identity(dim) / C64::new(dim as f64, 0.0),
        }
    }

    /// Rebuilds a state from the (possibly slightly off) output of a
    /// numerical integrator: hermitize, renormalize the trace, and clip
    /// eigenvalues in `[-1e-6, 0)` to zero. Dips below `-1e-6` signal an
    /// unstable integration and are rejected.
    pub fn from_evolution(data: CMatrix) -> Result<Self> {
        check_square_finite(&data)?;
        let mut m = hermitize(&data);
        let tr = m.trace().re;
        if (tr - 1.0).abs() > 1e-6 {
            return Err(Error::TraceViolation { trace: tr });
        }
        m /= C64::new(tr, 0.0);
        let (eigenvalues, vectors) = linalg::jacobi_eigen(&m);
        let min = eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        if min < -1e-6 {
            return Err(Error::Instability {
                min_eigenvalue: min,
            });
        }
        if min < -EIGENVALUE_TOL {
            let d = m.nrows();
            let clipped: Vec<f64> = eigenvalues.iter().map(|&l| l.max(0.0)).collect();
            let total: f64 = clipped.iter().sum();
            let diag = CMatrix::from_fn(d, d, |i, j| {
                if i == j {
                    C64::new(clipped[i] / total, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            });
            m = &vectors * diag * vectors.adjoint();
        }
        Ok(Self { data: m })
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.data
    }

    pub fn into_matrix(self) -> CMatrix {
        self.data
    }

    /// `Tr[rho op]`.
    pub fn expectation(&self, op: &CMatrix) -> C64 {
        linalg::expectation(op, &self.data)
    }
}

/// A Hermitian operator (observable, POVM element, SLD, ...).
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    data: CMatrix,
}

impl HermitianOperator {
    pub fn new(data: CMatrix) -> Result<Self> {
        check_square_finite(&data)?;
        check_hermitian(&data)?;
        Ok(Self { data })
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.data
    }

    pub fn into_matrix(self) -> CMatrix {
        self.data
    }
}

/// A square complex matrix with finite entries and no symmetry requirement
/// (Kraus operators, jump operators, nSLDs).
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralOperator {
    data: CMatrix,
}

impl GeneralOperator {
    pub fn new(data: CMatrix) -> Result<Self> {
        check_square_finite(&data)?;
        Ok(Self { data })
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.data
    }

    pub fn into_matrix(self) -> CMatrix {
        self.data
    }
}

/// Eigendecomposition of a state: eigenvalues sorted descending, eigenvectors
/// as unitary columns in matching order.
#[derive(Debug, Clone)]
pub struct Spectral {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl Spectral {
    /// `V diag(lambda) V†`.
    pub fn reconstruct(&self) -> CMatrix {
        let d = self.eigenvalues.len();
        let diag = CMatrix::from_fn(d, d, |i, j| {
            if i == j {
                C64::new(self.eigenvalues[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        &self.eigenvectors * diag * self.eigenvectors.adjoint()
    }

    /// Applies `f` to each eigenvalue and reassembles `V diag(f(lambda)) V†`.
    pub fn map_eigenvalues(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let d = self.eigenvalues.len();
        let diag = CMatrix::from_fn(d, d, |i, j| {
            if i == j {
                C64::new(f(self.eigenvalues[i]), 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        &self.eigenvectors * diag * self.eigenvectors.adjoint()
    }
}

/// Sorted Hermitian eigendecomposition of a general Hermitian matrix.
/// Eigenvalues descending; no clipping applied.
pub fn hermitian_eigen(m: &CMatrix) -> Spectral {
    let (values, vectors) = linalg::jacobi_eigen(m);
    let d = m.nrows();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let eigenvectors = CMatrix::from_fn(d, d, |r, c| vectors[(r, order[c])]);
    Spectral {
        eigenvalues,
        eigenvectors,
    }
}

/// Eigendecomposition of a density matrix, eigenvalues sorted descending and
/// clipped into `[0, 1]` when they stray within numerical slack of the
/// boundary. Keeps downstream `1/lambda` terms stable.
pub fn spectral_decompose(rho: &DensityMatrix) -> Spectral {
    let mut spec = hermitian_eigen(rho.matrix());
    for l in &mut spec.eigenvalues {
        if *l < 0.0 && *l >= -EIGENVALUE_TOL {
            *l = 0.0;
        } else if *l > 1.0 && *l <= 1.0 + EIGENVALUE_TOL {
            *l = 1.0;
        }
    }
    spec
}

/// Positive square root of a state, with `result^2 = rho` up to 1e-9.
pub fn matrix_sqrt(rho: &DensityMatrix) -> HermitianOperator {
    let spec = spectral_decompose(rho);
    let m = spec.map_eigenvalues(|l| l.max(0.0).sqrt());
    HermitianOperator {
        data: hermitize(&m),
    }
}

/// Result of projecting a state onto its numerical support.
#[derive(Debug, Clone)]
pub struct SupportProjection {
    /// The state restricted to its support (renormalized).
    pub projected: DensityMatrix,
    /// Number of retained eigenvalues.
    pub rank: usize,
    /// Moore-Penrose inverse on the retained support.
    pub pinv: HermitianOperator,
    /// Orthogonal projector onto the retained support.
    pub projector: CMatrix,
}

/// Default rank-revealing threshold: `d * eps * lambda_max`.
pub fn default_support_tol(spec: &Spectral) -> f64 {
    let lmax = spec.eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
    spec.eigenvalues.len() as f64 * f64::EPSILON * lmax
}

/// Drops eigenvalues below `tol` (default `d * eps * lambda_max`) and returns
/// the renormalized projected state, its rank, the pseudo-inverse built from
/// the retained eigenvalues, and the support projector.
pub fn support_project(rho: &DensityMatrix, tol: Option<f64>) -> Result<SupportProjection> {
    let spec = spectral_decompose(rho);
    let tol = tol.unwrap_or_else(|| default_support_tol(&spec));
    if tol < 0.0 {
        return Err(Error::BadArgument("support tolerance must be >= 0".into()));
    }
    let kept: Vec<bool> = spec.eigenvalues.iter().map(|&l| l > tol).collect();
    let rank = kept.iter().filter(|&&k| k).count();
    if rank == 0 {
        return Err(Error::ZeroRank);
    }
    let weight: f64 = spec
        .eigenvalues
        .iter()
        .zip(&kept)
        .filter(|(_, &k)| k)
        .map(|(&l, _)| l)
        .sum();
    let d = spec.eigenvalues.len();
    let build = |f: &dyn Fn(usize) -> f64| -> CMatrix {
        let diag = CMatrix::from_fn(d, d, |i, j| {
            if i == j {
                C64::new(f(i), 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        &spec.eigenvectors * diag * spec.eigenvectors.adjoint()
    };
    let projected = build(&|i| {
        if kept[i] {
            spec.eigenvalues[i] / weight
        } else {
            0.0
        }
    });
    let pinv = build(&|i| {
        if kept[i] {
            1.0 / spec.eigenvalues[i]
        } else {
            0.0
        }
    });
    let projector = build(&|i| if kept[i] { 1.0 } else { 0.0 });
    Ok(SupportProjection {
        projected: DensityMatrix::new(hermitize(&projected))?,
        rank,
        pinv: HermitianOperator {
            data: hermitize(&pinv),
        },
        projector,
    })
}
