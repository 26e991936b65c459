//! Dynamical-semigroup (GKLS) models: evolution, commuting-case derivative
//! formulas, closed-form nSLDs and the extended-QFI closed forms for
//! Hamiltonian-rate and jump-rate estimation.

use crate::error::{Error, Result};
use crate::linalg::{anticommutator, commutator, frobenius_norm, hermitize, identity, max_abs};
use crate::state::{support_project, DensityMatrix, GeneralOperator, HermitianOperator};
use crate::{CMatrix, C64};

/// Pairwise commutator norms at or below this qualify a model as commuting.
pub const COMMUTING_TOL: f64 = 1e-10;

/// A jump operator together with its non-negative rate.
#[derive(Debug, Clone)]
pub struct Jump {
    pub operator: GeneralOperator,
    pub rate: f64,
}

impl Jump {
    pub fn new(operator: GeneralOperator, rate: f64) -> Result<Self> {
        if !(rate >= 0.0 && rate.is_finite()) {
            return Err(Error::BadArgument(format!(
                "jump rate must be >= 0, got {rate}"
            )));
        }
        Ok(Self { operator, rate })
    }
}

/// Hamiltonian `H` with rate `x0`, jump operators with rates `{x_a}`, and an
/// evolution time `tau`.
#[derive(Debug, Clone)]
pub struct LindbladModel {
    pub hamiltonian: HermitianOperator,
    pub x0: f64,
    pub jumps: Vec<Jump>,
    pub tau: f64,
}

impl LindbladModel {
    pub fn new(
        hamiltonian: HermitianOperator,
        x0: f64,
        jumps: Vec<Jump>,
        tau: f64,
    ) -> Result<Self> {
        if !(tau >= 0.0 && tau.is_finite()) {
            return Err(Error::BadArgument(format!(
                "evolution time must be >= 0, got {tau}"
            )));
        }
        if !x0.is_finite() {
            return Err(Error::NonFinite);
        }
        let dim = hamiltonian.dim();
        for j in &jumps {
            if j.operator.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: j.operator.dim(),
                });
            }
        }
        Ok(Self {
            hamiltonian,
            x0,
            jumps,
            tau,
        })
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }
}

/// Pairwise commutator norms of `{H, Gamma_1, ..., Gamma_k}`.
#[derive(Debug, Clone)]
pub struct CommutationReport {
    /// Frobenius norms of `[O_i, O_j]`, indices ordered `H` first then jumps.
    pub pairwise_norms: Vec<Vec<f64>>,
}

impl CommutationReport {
    /// All pairwise norms at or below [`COMMUTING_TOL`].
    pub fn is_commuting(&self) -> bool {
        self.max_norm() <= COMMUTING_TOL
    }

    pub fn max_norm(&self) -> f64 {
        self.pairwise_norms
            .iter()
            .flat_map(|row| row.iter().copied())
            .fold(0.0, f64::max)
    }

    /// Largest commutator norm between operator `i` and every other operator
    /// in the set.
    pub fn max_norm_against_rest(&self, i: usize) -> f64 {
        self.pairwise_norms[i]
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, &n)| n)
            .fold(0.0, f64::max)
    }
}

/// Frobenius norms of all pairwise commutators of `{H, Gamma_a}`.
pub fn commutation_report(model: &LindbladModel) -> CommutationReport {
    let mut ops: Vec<&CMatrix> = vec![model.hamiltonian.matrix()];
    ops.extend(model.jumps.iter().map(|j| j.operator.matrix()));
    let n = ops.len();
    let mut norms = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let norm = frobenius_norm(&commutator(ops[i], ops[j]));
            norms[i][j] = norm;
            norms[j][i] = norm;
        }
    }
    CommutationReport {
        pairwise_norms: norms,
    }
}

/// The GKLS right-hand side
/// `-i x0 [H, rho] + sum_a x_a (G rho G† - {G†G, rho}/2)`.
///
/// Output is Hermitian and traceless.
pub fn lindblad_generate(model: &LindbladModel, rho: &DensityMatrix) -> CMatrix {
    let h = model.hamiltonian.matrix();
    let mut out = commutator(h, rho.matrix()) * C64::new(0.0, -model.x0);
    for jump in &model.jumps {
        let g = jump.operator.matrix();
        let gdg = g.adjoint() * g;
        let dissipator = g * rho.matrix() * g.adjoint()
            - anticommutator(&gdg, rho.matrix()) * C64::new(0.5, 0.0);
        out += dissipator * C64::new(jump.rate, 0.0);
    }
    hermitize(&out)
}

/// Common eigenbasis of a fully commuting normal family, or `None` when the
/// operators cannot be simultaneously diagonalized numerically.
///
/// A Hermitian combination with fixed irrational weights is diagonalized and
/// the resulting basis is verified against every operator. Deterministic:
/// the weights do not depend on the inputs.
fn common_eigenbasis(ops: &[&CMatrix]) -> Option<CMatrix> {
    let dim = ops.first()?.nrows();
    let mut combo = CMatrix::zeros(dim, dim);
    // distinct irrational weights split degeneracies of generic commuting
    // families
    for (k, op) in ops.iter().enumerate() {
        let re = hermitize(op);
        let im = (*op - op.adjoint()) * C64::new(0.0, -0.5);
        let w_re = (2.0 + 3.0 * k as f64).sqrt();
        let w_im = (3.0 + 3.0 * k as f64).sqrt() * std::f64::consts::FRAC_1_SQRT_2;
        combo += re * C64::new(w_re, 0.0) + im * C64::new(w_im, 0.0);
    }
    let (_, v) = crate::linalg::jacobi_eigen(&combo);
    for op in ops {
        let d = v.adjoint() * *op * &v;
        let mut off = 0.0f64;
        for i in 0..dim {
            for j in 0..dim {
                if i != j {
                    off = off.max(d[(i, j)].norm());
                }
            }
        }
        if off > 1e-9 * max_abs(op).max(1.0) {
            return None;
        }
    }
    Some(v)
}

/// Steps per unit time for the RK4 integrator.
const RK4_STEPS_PER_UNIT_TAU: f64 = 1000.0;

/// Evolves `rho0` for time `model.tau`.
///
/// Fully commuting models use the exact closed-form map in the common
/// eigenbasis; everything else integrates the GKLS equation with fixed-step
/// RK4 (at least 1000 steps and step `<= tau/1000`). Trace and positivity
/// are preserved within integrator slack; an eigenvalue dipping below `-1e-6`
/// is reported as an instability.
pub fn evolve(model: &LindbladModel, rho0: &DensityMatrix) -> Result<DensityMatrix> {
    if rho0.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            got: rho0.dim(),
        });
    }
    if model.tau == 0.0 {
        return Ok(rho0.clone());
    }

    if commutation_report(model).is_commuting() {
        let mut ops: Vec<&CMatrix> = vec![model.hamiltonian.matrix()];
        ops.extend(model.jumps.iter().map(|j| j.operator.matrix()));
        if let Some(v) = common_eigenbasis(&ops) {
            return evolve_commuting(model, rho0, &v);
        }
    }

    let steps = (RK4_STEPS_PER_UNIT_TAU * model.tau)
        .ceil()
        .max(RK4_STEPS_PER_UNIT_TAU) as usize;
    let h = model.tau / steps as f64;
    let mut rho = rho0.matrix().clone();
    let rhs = |m: &CMatrix| -> CMatrix {
        // Same generator as lindblad_generate, on a raw matrix.
        let ham = model.hamiltonian.matrix();
        let mut out = commutator(ham, m) * C64::new(0.0, -model.x0);
        for jump in &model.jumps {
            let g = jump.operator.matrix();
            let gdg = g.adjoint() * g;
            out += (g * m * g.adjoint() - anticommutator(&gdg, m) * C64::new(0.5, 0.0))
                * C64::new(jump.rate, 0.0);
        }
        out
    };
    for _ in 0..steps {
        let k1 = rhs(&rho);
        let k2 = rhs(&(&rho + &k1 * C64::new(h / 2.0, 0.0)));
        let k3 = rhs(&(&rho + &k2 * C64::new(h / 2.0, 0.0)));
        let k4 = rhs(&(&rho + &k3 * C64::new(h, 0.0)));
        rho +=
            (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4) * C64::new(h / 6.0, 0.0);
    }
    DensityMatrix::from_evolution(rho)
}

fn evolve_commuting(
    model: &LindbladModel,
    rho0: &DensityMatrix,
    v: &CMatrix,
) -> Result<DensityMatrix> {
    let dim = model.dim();
    let h_diag: Vec<f64> = {
        let d = v.adjoint() * model.hamiltonian.matrix() * v;
        (0..dim).map(|i| d[(i, i)].re).collect()
    };
    let jump_diags: Vec<(Vec<C64>, f64)> = model
        .jumps
        .iter()
        .map(|j| {
            let d = v.adjoint() * j.operator.matrix() * v;
            ((0..dim).map(|i| d[(i, i)]).collect(), j.rate)
        })
        .collect();
    let mut rho_eig = v.adjoint() * rho0.matrix() * v;
    for m in 0..dim {
        for n in 0..dim {
            let mut g = C64::new(0.0, -model.x0 * (h_diag[m] - h_diag[n]));
            for (diag, rate) in &jump_diags {
                let gm = diag[m];
                let gn = diag[n];
                g += (gm * gn.conj() - C64::new(0.5 * (gm.norm_sqr() + gn.norm_sqr()), 0.0))
                    * C64::new(*rate, 0.0);
            }
            rho_eig[(m, n)] *= (g * C64::new(model.tau, 0.0)).exp();
        }
    }
    DensityMatrix::from_evolution(v * rho_eig * v.adjoint())
}

fn require_commuting(model: &LindbladModel) -> Result<()> {
    let report = commutation_report(model);
    if !report.is_commuting() {
        return Err(Error::NonCommuting {
            norm: report.max_norm(),
        });
    }
    Ok(())
}

/// `d rho / d x0 = -i tau [H - <H>, rho]` for commuting models.
pub fn drho_x0(model: &LindbladModel, rho: &DensityMatrix) -> Result<CMatrix> {
    require_commuting(model)?;
    let shifted = shifted_hamiltonian(model, rho);
    Ok(hermitize(
        &(commutator(&shifted, rho.matrix()) * C64::new(0.0, -model.tau)),
    ))
}

fn shifted_hamiltonian(model: &LindbladModel, rho: &DensityMatrix) -> CMatrix {
    let h = model.hamiltonian.matrix();
    let mean = rho.expectation(h).re;
    h - identity(model.dim()) * C64::new(mean, 0.0)
}

/// Closed-form nSLD for Hamiltonian-rate estimation:
/// `L0 = -2 i tau (H - <H>)`. Anti-Hermitian.
pub fn nsld_x0(model: &LindbladModel, rho: &DensityMatrix) -> Result<GeneralOperator> {
    require_commuting(model)?;
    GeneralOperator::new(shifted_hamiltonian(model, rho) * C64::new(0.0, -2.0 * model.tau))
}

/// Extended QFI for Hamiltonian-rate estimation: `4 tau^2 Var_rho(H)`.
pub fn ext_qfi_x0(model: &LindbladModel, rho: &DensityMatrix) -> Result<f64> {
    require_commuting(model)?;
    let h = model.hamiltonian.matrix();
    let mean = rho.expectation(h).re;
    let second = rho.expectation(&(h * h)).re;
    Ok((4.0 * model.tau * model.tau * (second - mean * mean)).max(0.0))
}

fn require_jump_commuting(model: &LindbladModel, a: usize) -> Result<()> {
    if a >= model.jumps.len() {
        return Err(Error::BadArgument(format!(
            "jump index {a} out of range ({} jumps)",
            model.jumps.len()
        )));
    }
    let report = commutation_report(model);
    let norm = report.max_norm_against_rest(a + 1);
    if norm > COMMUTING_TOL {
        return Err(Error::NonCommuting { norm });
    }
    Ok(())
}

/// Jump-rate derivative `d rho / d x_a = tau (G rho G† - {G†G, rho}/2)`,
/// valid when `Gamma_a` commutes with `H` and the other jumps.
pub fn drho_xa(model: &LindbladModel, rho: &DensityMatrix, a: usize) -> Result<CMatrix> {
    require_jump_commuting(model, a)?;
    let g = model.jumps[a].operator.matrix();
    let gdg = g.adjoint() * g;
    let out =
        g * rho.matrix() * g.adjoint() - anticommutator(&gdg, rho.matrix()) * C64::new(0.5, 0.0);
    Ok(hermitize(&(out * C64::new(model.tau, 0.0))))
}

/// Closed-form nSLD for jump-rate estimation:
/// `L_a = tau (G rho G† rho^{-1} - G†G)`, with the inverse taken on the
/// support of `rho`.
///
/// Requires `G rho G†` (and hence the jump-rate derivative) to stay on the
/// support of `rho`; leakage is reported as a singular-state error.
pub fn nsld_xa(model: &LindbladModel, rho: &DensityMatrix, a: usize) -> Result<GeneralOperator> {
    require_jump_commuting(model, a)?;
    let g = model.jumps[a].operator.matrix();
    let support = support_project(rho, None)?;
    let sandwich = g * rho.matrix() * g.adjoint();
    let projected = &support.projector * &sandwich * &support.projector;
    let leak = max_abs(&(&sandwich - projected));
    if leak > 1e-8 * max_abs(&sandwich).max(1.0) {
        return Err(Error::SingularState { residual: leak });
    }
    let gdg = g.adjoint() * g;
    GeneralOperator::new((sandwich * support.pinv.matrix() - gdg) * C64::new(model.tau, 0.0))
}

/// Extended QFI for jump-rate estimation:
/// `tau^2 ( <(G†G)^2> - 2 <G†² G²> + Tr[rho^{-1} (G rho G†)^2] )`.
///
/// Equals `Tr[L_a rho L_a†]` for the closed-form nSLD of [`nsld_xa`].
pub fn ext_qfi_xa(model: &LindbladModel, rho: &DensityMatrix, a: usize) -> Result<f64> {
    require_jump_commuting(model, a)?;
    let g = model.jumps[a].operator.matrix();
    let support = support_project(rho, None)?;
    let sandwich = g * rho.matrix() * g.adjoint();
    let projected = &support.projector * &sandwich * &support.projector;
    let leak = max_abs(&(&sandwich - projected));
    if leak > 1e-8 * max_abs(&sandwich).max(1.0) {
        return Err(Error::SingularState { residual: leak });
    }
    let gdg = g.adjoint() * g;
    let first = rho.expectation(&(&gdg * &gdg)).re;
    let second = rho.expectation(&(g.adjoint() * g.adjoint() * g * g)).re;
    let third = (support.pinv.matrix() * &sandwich * &sandwich).trace().re;
    let tau2 = model.tau * model.tau;
    Ok((tau2 * (first - 2.0 * second + third)).max(0.0))
}

/// Dephasing jump `sigma_z / sqrt(2)`, the normalization for which the
/// master equation reads `d rho/d tau = x (sz rho sz - rho)/2`.
pub fn dephasing_jump() -> GeneralOperator {
    GeneralOperator::new(crate::linalg::pauli::z() * C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0))
        .expect("static operator")
}
