//! Extended convexity of the quantum Fisher information.
//!
//! For any convex decomposition `rho = sum_a p_a(x) rho_a(x)` the QFI of the
//! mixture is bounded by a classical part (Fisher information of the weights)
//! plus a quantum part (the weighted average of branch QFIs). A Kraus
//! decomposition of a channel induces such an ensemble, and minimizing the
//! resulting bound over the free real constant eta yields the closed-form
//! channel bound `4(<H1> - <H2>^2)`.

use std::sync::Arc;

use crate::channel::KrausChannel;
use crate::error::{Error, Result};
use crate::fisher::{self, ProbabilityVector, PROB_FLOOR};
use crate::linalg::{hermitize, max_abs};
use crate::state::{DensityMatrix, HermitianOperator, Spectral};
use crate::{CMatrix, C64, DEFAULT_FD_STEP};

type WeightsFn = dyn Fn(f64) -> Vec<f64> + Send + Sync;
type BranchData = (Vec<f64>, Vec<DensityMatrix>, Vec<f64>, Vec<CMatrix>);
type StatesFn = dyn Fn(f64) -> Result<Vec<DensityMatrix>> + Send + Sync;
type WeightDerivFn = dyn Fn(f64) -> Vec<f64> + Send + Sync;
type StateDerivFn = dyn Fn(f64) -> Result<Vec<CMatrix>> + Send + Sync;

/// A parameter-dependent convex decomposition: weights `p_a(x)` and states
/// `rho_a(x)`, with optional analytic derivatives.
///
/// Branch indexing must be stable in `x`. Branches whose weight falls below
/// `1e-14` at the evaluation point are skipped by the bound computations;
/// their state entries are never inspected, so providers may fill them with
/// any valid placeholder.
#[derive(Clone)]
pub struct Ensemble {
    weights: Arc<WeightsFn>,
    states: Arc<StatesFn>,
    weight_derivative: Option<Arc<WeightDerivFn>>,
    state_derivative: Option<Arc<StateDerivFn>>,
    fd_step: f64,
}

impl Ensemble {
    pub fn new(
        weights: impl Fn(f64) -> Vec<f64> + Send + Sync + 'static,
        states: impl Fn(f64) -> Result<Vec<DensityMatrix>> + Send + Sync + 'static,
    ) -> Self {
        Self {
            weights: Arc::new(weights),
            states: Arc::new(states),
            weight_derivative: None,
            state_derivative: None,
            fd_step: DEFAULT_FD_STEP,
        }
    }

    pub fn with_weight_derivative(
        mut self,
        dw: impl Fn(f64) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        self.weight_derivative = Some(Arc::new(dw));
        self
    }

    pub fn with_state_derivative(
        mut self,
        ds: impl Fn(f64) -> Result<Vec<CMatrix>> + Send + Sync + 'static,
    ) -> Self {
        self.state_derivative = Some(Arc::new(ds));
        self
    }

    pub fn with_fd_step(mut self, fd_step: f64) -> Self {
        assert!(fd_step > 0.0, "finite-difference step must be positive");
        self.fd_step = fd_step;
        self
    }

    pub fn weights_at(&self, x: f64) -> Vec<f64> {
        (self.weights)(x)
    }

    pub fn states_at(&self, x: f64) -> Result<Vec<DensityMatrix>> {
        (self.states)(x)
    }

    pub fn weight_derivatives_at(&self, x: f64) -> Vec<f64> {
        match &self.weight_derivative {
            Some(f) => f(x),
            None => {
                let h = self.fd_step;
                let plus = (self.weights)(x + h);
                let minus = (self.weights)(x - h);
                plus.iter()
                    .zip(&minus)
                    .map(|(p, m)| (p - m) / (2.0 * h))
                    .collect()
            }
        }
    }

    pub fn state_derivatives_at(&self, x: f64) -> Result<Vec<CMatrix>> {
        match &self.state_derivative {
            Some(f) => f(x),
            None => {
                let h = self.fd_step;
                let plus = (self.states)(x + h)?;
                let minus = (self.states)(x - h)?;
                Ok(plus
                    .iter()
                    .zip(&minus)
                    .map(|(p, m)| hermitize(&((p.matrix() - m.matrix()) / C64::new(2.0 * h, 0.0))))
                    .collect())
            }
        }
    }

    /// The mixture `sum_a p_a rho_a` at `x`.
    pub fn mixture_at(&self, x: f64) -> Result<DensityMatrix> {
        let w = self.weights_at(x);
        let states = self.states_at(x)?;
        if w.len() != states.len() {
            return Err(Error::DimensionMismatch {
                expected: w.len(),
                got: states.len(),
            });
        }
        let dim = states.first().map(|s| s.dim()).ok_or(Error::EmptyList)?;
        let mut out = CMatrix::zeros(dim, dim);
        for (p, s) in w.iter().zip(&states) {
            out += s.matrix() * C64::new(*p, 0.0);
        }
        DensityMatrix::new(hermitize(&out))
    }
}

impl std::fmt::Debug for Ensemble {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Ensemble")
            .field(
                "analytic_weight_derivative",
                &self.weight_derivative.is_some(),
            )
            .field(
                "analytic_state_derivative",
                &self.state_derivative.is_some(),
            )
            .field("fd_step", &self.fd_step)
            .finish()
    }
}

/// The classical/quantum split of the extended-convexity bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FconvSplit {
    /// Fisher information of the mixing probabilities.
    pub classical: f64,
    /// Weighted average of the branch QFIs.
    pub quantum: f64,
}

impl FconvSplit {
    pub fn total(&self) -> f64 {
        self.classical + self.quantum
    }
}

/// Extended-convexity bound split into its classical and quantum parts.
///
/// `classical = F_C({p_a})`, `quantum = sum_a p_a F_Q(rho_a)`. Both parts are
/// non-negative and their sum upper-bounds the QFI of the mixture.
pub fn split_f_conv(ens: &Ensemble, x: f64) -> Result<FconvSplit> {
    let weights = ens.weights_at(x);
    let dweights = ens.weight_derivatives_at(x);
    if weights.len() != dweights.len() {
        return Err(Error::DimensionMismatch {
            expected: weights.len(),
            got: dweights.len(),
        });
    }
    let classical =
        fisher::classical_fisher(&ProbabilityVector::new(weights.clone(), dweights.clone())?)?;

    let states = ens.states_at(x)?;
    let dstates = ens.state_derivatives_at(x)?;
    if states.len() != weights.len() || dstates.len() != weights.len() {
        return Err(Error::DimensionMismatch {
            expected: weights.len(),
            got: states.len(),
        });
    }
    let mut quantum = 0.0;
    for ((p, rho), drho) in weights.iter().zip(&states).zip(&dstates) {
        if *p < PROB_FLOOR {
            continue;
        }
        quantum += p * fisher::qfi(rho, drho)?;
    }
    Ok(FconvSplit { classical, quantum })
}

/// The extended-convexity bound `sum_a p_a F_Q(rho_a) + F_C({p_a})`.
pub fn f_conv(ens: &Ensemble, x: f64) -> Result<f64> {
    split_f_conv(ens, x).map(|s| s.total())
}

/// The ensemble induced by a Kraus decomposition:
/// `p_a = Tr[A_a rho0 A_a†]`, `rho_a = A_a rho0 A_a† / p_a`.
///
/// Branch weight and state derivatives are assembled from the channel's
/// Kraus derivatives, so no ensemble-level finite differencing is needed.
/// Dead branches (`p_a < 1e-14`) keep their index and carry a maximally
/// mixed placeholder state.
pub fn channel_ensemble(ch: &KrausChannel, rho0: &DensityMatrix, x: f64) -> Result<Ensemble> {
    // Validate eagerly so construction fails fast.
    ch.operators_at(x)?;
    let dim = rho0.dim();

    let compute = {
        let ch = ch.clone();
        let rho0 = rho0.clone();
        move |x: f64| -> Result<BranchData> {
            let ops = ch.operators_at(x)?;
            let dops = ch.derivatives_at(x)?;
            let mut weights = Vec::with_capacity(ops.len());
            let mut states = Vec::with_capacity(ops.len());
            let mut dweights = Vec::with_capacity(ops.len());
            let mut dstates = Vec::with_capacity(ops.len());
            for (a, da) in ops.iter().zip(&dops) {
                let m = a * rho0.matrix() * a.adjoint();
                let dm = da * rho0.matrix() * a.adjoint() + a * rho0.matrix() * da.adjoint();
                let p = m.trace().re;
                let dp = dm.trace().re;
                if p < PROB_FLOOR {
                    weights.push(p.max(0.0));
                    dweights.push(dp);
                    states.push(DensityMatrix::maximally_mixed(dim));
                    dstates.push(CMatrix::zeros(dim, dim));
                    continue;
                }
                let rho_a = DensityMatrix::new(hermitize(&(&m / C64::new(p, 0.0))))?;
                let drho_a =
                    hermitize(&((dm - rho_a.matrix() * C64::new(dp, 0.0)) / C64::new(p, 0.0)));
                weights.push(p);
                dweights.push(dp);
                states.push(rho_a);
                dstates.push(drho_a);
            }
            Ok((weights, states, dweights, dstates))
        }
    };

    // The four accessors are usually evaluated at the same x back to back;
    // caching the last evaluation avoids recomputing the branch sandwiches.
    let memo: Arc<std::sync::Mutex<Option<(f64, BranchData)>>> =
        Arc::new(std::sync::Mutex::new(None));
    let compute = Arc::new(compute);
    let branch_data = move |x: f64| -> Result<BranchData> {
        let mut cached = memo.lock().expect("branch cache lock");
        if let Some((cx, data)) = cached.as_ref() {
            if *cx == x {
                return Ok(data.clone());
            }
        }
        let data = compute(x)?;
        *cached = Some((x, data.clone()));
        Ok(data)
    };

    let b1 = Arc::new(branch_data);
    let b2 = b1.clone();
    let b3 = b1.clone();
    let b4 = b1.clone();
    Ok(Ensemble::new(
        move |x| b1(x).map(|(w, ..)| w).unwrap_or_default(),
        move |x| b2(x).map(|(_, s, ..)| s),
    )
    .with_weight_derivative(move |x| b3(x).map(|(_, _, dw, _)| dw).unwrap_or_default())
    .with_state_derivative(move |x| b4(x).map(|(.., ds)| ds)))
}

/// Expectation values entering the channel bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelBoundTerms {
    /// `<H1> = <sum_a dA_a† dA_a>` on the input state.
    pub h1: f64,
    /// `<H2> = <i sum_a A_a† dA_a>` on the input state.
    pub h2: f64,
    /// Minimizing constant `eta* = 2 <H2>`.
    pub eta_star: f64,
}

/// Channel bound together with its expectation terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelBound {
    pub terms: ChannelBoundTerms,
    /// `4 (<H1> - <H2>^2)`.
    pub bound: f64,
}

fn channel_terms(ch: &KrausChannel, rho0: &DensityMatrix, x: f64) -> Result<ChannelBoundTerms> {
    let ops = ch.operators_at(x)?;
    let dops = ch.derivatives_at(x)?;
    if ops.len() != dops.len() {
        return Err(Error::DimensionMismatch {
            expected: ops.len(),
            got: dops.len(),
        });
    }
    let dim = ops[0].nrows();
    if rho0.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: rho0.dim(),
        });
    }
    // Trace preservation forces sum_a (dA† A + A† dA) = 0; check it so the
    // eta-linear term is guaranteed real.
    let mut completeness_dot = CMatrix::zeros(dim, dim);
    let mut h1 = CMatrix::zeros(dim, dim);
    let mut h2 = CMatrix::zeros(dim, dim);
    for (a, da) in ops.iter().zip(&dops) {
        completeness_dot += da.adjoint() * a + a.adjoint() * da;
        h1 += da.adjoint() * da;
        h2 += (a.adjoint() * da) * C64::new(0.0, 1.0);
    }
    let residual = max_abs(&completeness_dot);
    if residual > 1e-6 {
        return Err(Error::InconsistentDerivative { residual });
    }
    let h1v = rho0.expectation(&h1).re;
    let h2v = rho0.expectation(&h2).re;
    Ok(ChannelBoundTerms {
        h1: h1v,
        h2: h2v,
        eta_star: 2.0 * h2v,
    })
}

/// The eta-parameterized channel bound
/// `sum_a 4(<dA_a† dA_a> - i eta <A_a† dA_a>) + eta^2 = 4<H1> - 4 eta <H2> + eta^2`.
///
/// Quadratic in `eta` with minimum at `eta* = 2<H2>`.
pub fn channel_bound_eta(ch: &KrausChannel, rho0: &DensityMatrix, x: f64, eta: f64) -> Result<f64> {
    let t = channel_terms(ch, rho0, x)?;
    Ok(4.0 * t.h1 - 4.0 * eta * t.h2 + eta * eta)
}

/// The eta-minimized channel bound `4(<H1> - <H2>^2)`, attained at
/// `eta* = 2<H2>`. Upper-bounds the QFI of the channel output for any Kraus
/// decomposition, with equality for unitary channels on pure states.
pub fn channel_bound_min(ch: &KrausChannel, rho0: &DensityMatrix, x: f64) -> Result<ChannelBound> {
    let terms = channel_terms(ch, rho0, x)?;
    let bound = 4.0 * (terms.h1 - terms.h2 * terms.h2);
    if bound < -1e-10 {
        return Err(Error::NotPositive {
            min_eigenvalue: bound,
        });
    }
    Ok(ChannelBound {
        terms,
        bound: bound.max(0.0),
    })
}

/// The unitary-evolution special case of the convexity bound:
/// `4 tau^2 sum_a lambda_a Var_a(H)` over the spectral decomposition of the
/// initial state.
///
/// Within degenerate eigenspaces the eigenbasis is rotated to diagonalize
/// `H`, which minimizes the per-branch variances and makes the value a
/// deterministic function of the state.
pub fn unitary_fconv(spec: &Spectral, h: &HermitianOperator, tau: f64) -> f64 {
    let d = spec.eigenvalues.len();
    let mut vectors = spec.eigenvectors.clone();

    // Group indices of (numerically) equal eigenvalues.
    let mut groups: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for i in 1..=d {
        if i == d || (spec.eigenvalues[i] - spec.eigenvalues[start]).abs() > 1e-10 {
            groups.push((start, i));
            start = i;
        }
    }
    for &(lo, hi) in &groups {
        let k = hi - lo;
        if k < 2 {
            continue;
        }
        let block = vectors.columns(lo, k).into_owned();
        let h_block = block.adjoint() * h.matrix() * &block;
        let (_, block_vectors) = crate::linalg::jacobi_eigen(&h_block);
        let rotated = &block * &block_vectors;
        vectors.columns_mut(lo, k).copy_from(&rotated);
    }

    let h2 = h.matrix() * h.matrix();
    let mut total = 0.0;
    for (i, &lambda) in spec.eigenvalues.iter().enumerate() {
        if lambda <= PROB_FLOOR {
            continue;
        }
        let v = vectors.column(i);
        let mean = (v.adjoint() * h.matrix() * v)[(0, 0)].re;
        let second = (v.adjoint() * &h2 * v)[(0, 0)].re;
        total += lambda * (second - mean * mean);
    }
    4.0 * tau * tau * total.max(0.0)
}

/// Convenience: a single-Kraus unitary channel `rho -> U(x) rho U(x)†` with
/// `U(x) = exp(-i x tau H)`.
pub fn unitary_channel(h: CMatrix, tau: f64) -> KrausChannel {
    let h2 = h.clone();
    KrausChannel::new(1, move |x| {
        vec![crate::linalg::unitary_from_hermitian(&h, tau * x)]
    })
    .with_derivative(move |x| {
        let u = crate::linalg::unitary_from_hermitian(&h2, tau * x);
        vec![&h2 * u * C64::new(0.0, -tau)]
    })
}

/// Identity-check helper used in tests and the CLI: the mixture reassembled
/// from a channel ensemble must equal the channel output.
pub fn ensemble_consistency_residual(
    ch: &KrausChannel,
    rho0: &DensityMatrix,
    x: f64,
) -> Result<f64> {
    let ens = channel_ensemble(ch, rho0, x)?;
    let mix = ens.mixture_at(x)?;
    let out = ch.apply(rho0, x)?;
    Ok(max_abs(&(mix.matrix() - out.matrix())))
}
