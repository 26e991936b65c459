//! The Fisher-information family: classical Fisher information, the symmetric
//! logarithmic derivative (SLD) and exact QFI, measurement-specific Fisher
//! information, the non-Hermitian-SLD extended QFI, and the purification /
//! skew-information / inverse-quadratic upper bounds.

use crate::error::{Error, Result};
use crate::linalg::{self, commutator, hermitize, max_abs};
use crate::measurement::Measurement;
use crate::state::{
    default_support_tol, matrix_sqrt, spectral_decompose, DensityMatrix, HermitianOperator,
};
use crate::{CMatrix, C64};

/// Outcomes with probability below this are treated as absent.
pub const PROB_FLOOR: f64 = 1e-14;
/// Probability-derivative magnitude above which a vanishing outcome makes the
/// Fisher information divergent.
pub const DPROB_FLOOR: f64 = 1e-12;
/// Residual allowed in the nSLD defining relation before an operator is
/// rejected as incompatible with the supplied derivative.
pub const NSLD_RESIDUAL_TOL: f64 = 1e-6;

/// A discrete probability distribution together with its parameter
/// derivative.
#[derive(Debug, Clone)]
pub struct ProbabilityVector {
    probs: Vec<f64>,
    dprobs: Vec<f64>,
}

impl ProbabilityVector {
    /// Requires matching lengths, `sum p = 1` and `sum dp = 0` within 1e-10.
    /// Probabilities may undershoot zero by at most 1e-12 (clamped).
    pub fn new(probs: Vec<f64>, dprobs: Vec<f64>) -> Result<Self> {
        if probs.len() != dprobs.len() {
            return Err(Error::DimensionMismatch {
                expected: probs.len(),
                got: dprobs.len(),
            });
        }
        if probs.is_empty() {
            return Err(Error::EmptyList);
        }
        let mut clamped = probs;
        for p in &mut clamped {
            if !p.is_finite() {
                return Err(Error::NonFinite);
            }
            if *p < 0.0 {
                if *p < -1e-12 {
                    return Err(Error::NotPositive { min_eigenvalue: *p });
                }
                *p = 0.0;
            }
        }
        let total: f64 = clamped.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::TraceViolation { trace: total });
        }
        let dtotal: f64 = dprobs.iter().sum();
        if dtotal.abs() > 1e-10 {
            return Err(Error::BadArgument(format!(
                "probability derivatives sum to {dtotal:.3e}, expected 0"
            )));
        }
        Ok(Self {
            probs: clamped,
            dprobs,
        })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn dprobs(&self) -> &[f64] {
        &self.dprobs
    }
}

/// Classical Fisher information `sum_i (dp_i)^2 / p_i` over a discrete
/// outcome set.
///
/// Outcomes with `p < 1e-14` and `|dp| < 1e-12` carry no information and are
/// skipped; a vanishing outcome with a non-vanishing derivative makes the sum
/// divergent and is reported as an error rather than as infinity.
pub fn classical_fisher(pv: &ProbabilityVector) -> Result<f64> {
    let mut total = 0.0;
    for (i, (&p, &dp)) in pv.probs.iter().zip(&pv.dprobs).enumerate() {
        if p < PROB_FLOOR {
            if dp.abs() >= DPROB_FLOOR {
                return Err(Error::SingularDistribution { index: i });
            }
            continue;
        }
        total += dp * dp / p;
    }
    Ok(total)
}

fn require_hermitian(drho: &CMatrix, tol: f64) -> Result<()> {
    let residual = linalg::hermiticity_residual(drho);
    if residual > tol * max_abs(drho).max(1.0) {
        return Err(Error::NonHermitian { residual });
    }
    Ok(())
}

/// Solves `(L rho + rho L)/2 = drho` for the Hermitian SLD `L`.
///
/// Working in the eigenbasis of `rho`, `L_mn = 2 (drho)_mn / (l_m + l_n)`
/// whenever `l_m + l_n > tol`; blocks outside the support are set to zero
/// (the minimal-norm solution). Default `tol` is the rank-revealing
/// threshold `d * eps * l_max`.
pub fn solve_sld(
    rho: &DensityMatrix,
    drho: &CMatrix,
    tol: Option<f64>,
) -> Result<HermitianOperator> {
    require_hermitian(drho, 1e-8)?;
    if drho.nrows() != rho.dim() || drho.ncols() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: drho.nrows(),
        });
    }
    let spec = spectral_decompose(rho);
    let tol = tol.unwrap_or_else(|| default_support_tol(&spec));
    let v = &spec.eigenvectors;
    let d_eig = v.adjoint() * hermitize(drho) * v;
    let dim = rho.dim();
    let l_eig = CMatrix::from_fn(dim, dim, |m, n| {
        let s = spec.eigenvalues[m] + spec.eigenvalues[n];
        if s > tol {
            d_eig[(m, n)] * C64::new(2.0 / s, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    HermitianOperator::new(hermitize(&(v * l_eig * v.adjoint())))
}

/// Quantum Fisher information `Tr[rho L^2]` with `L` the SLD.
pub fn qfi(rho: &DensityMatrix, drho: &CMatrix) -> Result<f64> {
    let l = solve_sld(rho, drho, None)?;
    let m = l.matrix();
    Ok((rho.matrix() * m * m).trace().re.max(0.0))
}

/// Classical Fisher information of the outcome statistics of a POVM:
/// `p_i = Tr[Pi_i rho]`, `dp_i = Tr[Pi_i drho]`.
pub fn cfi_of_measurement(
    rho: &DensityMatrix,
    drho: &CMatrix,
    measurement: &Measurement,
) -> Result<f64> {
    require_hermitian(drho, 1e-8)?;
    if measurement.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: measurement.dim(),
        });
    }
    let probs = measurement
        .elements()
        .iter()
        .map(|e| rho.expectation(e.matrix()).re)
        .collect();
    let dprobs = measurement
        .elements()
        .iter()
        .map(|e| linalg::expectation(e.matrix(), drho).re)
        .collect();
    classical_fisher(&ProbabilityVector::new(probs, dprobs)?)
}

/// Residual of the nSLD defining relation `(L rho + rho L†)/2 = drho`.
pub fn nsld_residual(rho: &DensityMatrix, drho: &CMatrix, nsld: &CMatrix) -> f64 {
    let lhs = (nsld * rho.matrix() + rho.matrix() * nsld.adjoint()) * C64::new(0.5, 0.0);
    max_abs(&(lhs - drho))
}

/// Extended QFI `Tr[L rho L†]` for a non-Hermitian symmetric logarithmic
/// derivative `L`.
///
/// The operator is validated against the caller-supplied `drho`: if the
/// defining relation `(L rho + rho L†)/2 = drho` fails beyond 1e-6 the
/// operator is rejected. Equals [`qfi`] when `L` is Hermitian, and upper
/// bounds it otherwise.
pub fn extended_qfi(rho: &DensityMatrix, drho: &CMatrix, nsld: &CMatrix) -> Result<f64> {
    require_hermitian(drho, 1e-8)?;
    let residual = nsld_residual(rho, drho, nsld);
    if residual > NSLD_RESIDUAL_TOL {
        return Err(Error::IncompatibleNsld { residual });
    }
    Ok((nsld * rho.matrix() * nsld.adjoint()).trace().re.max(0.0))
}

/// A purification `w = sqrt(rho) U` of a state, with `w w† = rho`.
#[derive(Debug, Clone)]
pub struct Purification {
    pub w: CMatrix,
    pub gauge: CMatrix,
}

impl Purification {
    /// Purifies with an explicit unitary gauge.
    pub fn new(rho: &DensityMatrix, gauge: CMatrix) -> Result<Self> {
        if gauge.nrows() != rho.dim() || gauge.ncols() != rho.dim() {
            return Err(Error::DimensionMismatch {
                expected: rho.dim(),
                got: gauge.nrows(),
            });
        }
        let unit_res = max_abs(&(gauge.adjoint() * &gauge - linalg::identity(rho.dim())));
        if unit_res > 1e-10 {
            return Err(Error::BadArgument(format!(
                "gauge is not unitary (residual {unit_res:.3e})"
            )));
        }
        let w = matrix_sqrt(rho).into_matrix() * &gauge;
        Ok(Self { w, gauge })
    }

    /// The trivial gauge `U = 1`, i.e. `w = sqrt(rho)`.
    pub fn standard(rho: &DensityMatrix) -> Self {
        Self {
            w: matrix_sqrt(rho).into_matrix(),
            gauge: linalg::identity(rho.dim()),
        }
    }
}

/// Derivative of `sqrt(rho)` along `drho`: the Hermitian solution `S` of the
/// Sylvester relation `sqrt(rho) S + S sqrt(rho) = drho`, solved in the
/// eigenbasis of `rho`. Blocks where both indices fall outside the support
/// are set to zero.
pub fn sqrt_derivative(rho: &DensityMatrix, drho: &CMatrix) -> Result<CMatrix> {
    require_hermitian(drho, 1e-8)?;
    let spec = spectral_decompose(rho);
    let tol = default_support_tol(&spec);
    let v = &spec.eigenvectors;
    let d_eig = v.adjoint() * hermitize(drho) * v;
    let dim = rho.dim();
    // Eigenvalues below the support tolerance are numerical zeros; clamping
    // them keeps sqrt-noise (~1e-7 for a 1e-14 eigenvalue) out of the
    // denominators.
    let roots: Vec<f64> = spec
        .eigenvalues
        .iter()
        .map(|&l| if l > tol { l.sqrt() } else { 0.0 })
        .collect();
    let s_eig = CMatrix::from_fn(dim, dim, |m, n| {
        let denom = roots[m] + roots[n];
        if denom == 0.0 {
            C64::new(0.0, 0.0)
        } else {
            d_eig[(m, n)] / C64::new(denom, 0.0)
        }
    });
    Ok(hermitize(&(v * s_eig * v.adjoint())))
}

/// The purification-based upper bound `4 Tr[(d sqrt(rho))^2]` obtained from
/// an x-independent gauge. Equals twice the QFI on pure-state families.
pub fn uhlmann_ext_qfi(rho: &DensityMatrix, drho: &CMatrix) -> Result<f64> {
    let s = sqrt_derivative(rho, drho)?;
    Ok(4.0 * (&s * &s).trace().re.max(0.0))
}

/// `-4 tau^2 Tr[[H, sqrt(rho)]^2]`, i.e. `8 tau^2` times the skew
/// information. Upper-bounds the QFI of the unitary family generated by `H`.
pub fn skew_info_bound(rho: &DensityMatrix, h: &HermitianOperator, tau: f64) -> f64 {
    let root = matrix_sqrt(rho);
    let c = commutator(h.matrix(), root.matrix());
    (-4.0 * tau * tau * (&c * &c).trace().re).max(0.0)
}

/// `Tr[rho^{-1} (drho)^2]` with the inverse taken on the support of `rho`.
///
/// If `drho` carries weight outside the support the exact quantity diverges;
/// this is reported as an error rather than as infinity.
pub fn inverse_quadratic_bound(rho: &DensityMatrix, drho: &CMatrix) -> Result<f64> {
    require_hermitian(drho, 1e-8)?;
    let spec = spectral_decompose(rho);
    let tol = default_support_tol(&spec);
    let v = &spec.eigenvectors;
    let d_eig = v.adjoint() * hermitize(drho) * v;
    let dim = rho.dim();
    // Any row of drho on a zero eigenvector makes the trace divergent.
    let mut outside_weight: f64 = 0.0;
    for m in 0..dim {
        if spec.eigenvalues[m] <= tol {
            for n in 0..dim {
                outside_weight = outside_weight.max(d_eig[(m, n)].norm());
            }
        }
    }
    let scale = max_abs(drho).max(1.0);
    if outside_weight > 1e-10 * scale {
        return Err(Error::Unbounded {
            weight: outside_weight,
        });
    }
    let mut total = 0.0;
    for m in 0..dim {
        if spec.eigenvalues[m] <= tol {
            continue;
        }
        let row: f64 = (0..dim).map(|n| d_eig[(m, n)].norm_sqr()).sum();
        total += row / spec.eigenvalues[m];
    }
    Ok(total)
}
