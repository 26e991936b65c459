//! GHZ dephasing estimation and dephasing-rate estimation: channels, closed
//! forms, exact references, and the quantum-to-classical transition sweep.
//!
//! The N-probe setting applies the single-qubit Kraus pair
//! `A1 = (sqrt(q) cos(ax) + i sqrt(1-q) sin(ax) sz) e^{i x tau sz/2}`,
//! `A2 = (i sqrt(q) sin(ax) + sqrt(1-q) cos(ax) sz) e^{i x tau sz/2}`
//! independently to every qubit of a GHZ state. Because every Kraus operator
//! is diagonal up to phases with `A_a† A_a` proportional to the identity, the
//! 2^N-branch ensemble collapses to a binomial sum over the number of `A2`
//! applications, and the exact output state lives in the two-dimensional
//! span of `|0...0>` and `|1...1>`. Both reductions are validated against
//! dense tensor computations in the test suite.

use crate::channel::KrausChannel;
use crate::error::{Error, Result};
use crate::fisher;
use crate::linalg::{identity, pauli, unitary_from_hermitian};
use crate::state::DensityMatrix;
use crate::{CMatrix, CVector, C64};

/// The single-qubit estimation channel with loss `q`, decomposition
/// parameter `alpha` and interrogation time `tau`, with analytic Kraus
/// derivatives.
pub fn example1_channel(q: f64, alpha: f64, tau: f64) -> KrausChannel {
    let ops = move |x: f64| {
        let u = unitary_from_hermitian(&pauli::z(), -x * tau / 2.0);
        let (c, s) = ((alpha * x).cos(), (alpha * x).sin());
        let m1 = identity(2) * C64::new(q.sqrt() * c, 0.0)
            + pauli::z() * C64::new(0.0, (1.0 - q).sqrt() * s);
        let m2 = identity(2) * C64::new(0.0, q.sqrt() * s)
            + pauli::z() * C64::new((1.0 - q).sqrt() * c, 0.0);
        vec![m1 * &u, m2 * u]
    };
    let derivs = move |x: f64| {
        let u = unitary_from_hermitian(&pauli::z(), -x * tau / 2.0);
        let du = pauli::z() * &u * C64::new(0.0, tau / 2.0);
        let (c, s) = ((alpha * x).cos(), (alpha * x).sin());
        let m1 = identity(2) * C64::new(q.sqrt() * c, 0.0)
            + pauli::z() * C64::new(0.0, (1.0 - q).sqrt() * s);
        let dm1 = identity(2) * C64::new(-alpha * q.sqrt() * s, 0.0)
            + pauli::z() * C64::new(0.0, alpha * (1.0 - q).sqrt() * c);
        let m2 = identity(2) * C64::new(0.0, q.sqrt() * s)
            + pauli::z() * C64::new((1.0 - q).sqrt() * c, 0.0);
        let dm2 = identity(2) * C64::new(0.0, alpha * q.sqrt() * c)
            + pauli::z() * C64::new(-alpha * (1.0 - q).sqrt() * s, 0.0);
        vec![dm1 * &u + m1 * &du, dm2 * &u + m2 * du]
    };
    KrausChannel::new(2, ops).with_derivative(derivs)
}

/// The integrated single-qubit dephasing channel with coherence decay
/// `e^{-tau x}` in the estimated rate `x`:
/// `K1 = sqrt((1+g)/2) 1`, `K2 = sqrt((1-g)/2) sz`, `g = e^{-tau x}`.
///
/// The analytic Kraus derivative diverges at `x = 0`, where the channel is
/// the identity; rate estimation is posed at `x > 0`.
pub fn dephasing_channel(tau: f64) -> KrausChannel {
    let ops = move |x: f64| {
        let g = (-tau * x).exp();
        vec![
            identity(2) * C64::new(((1.0 + g) / 2.0).sqrt(), 0.0),
            pauli::z() * C64::new(((1.0 - g) / 2.0).sqrt(), 0.0),
        ]
    };
    let derivs = move |x: f64| {
        let g = (-tau * x).exp();
        let dg = -tau * g;
        vec![
            identity(2) * C64::new(dg / (4.0 * ((1.0 + g) / 2.0).sqrt()), 0.0),
            pauli::z() * C64::new(-dg / (4.0 * ((1.0 - g) / 2.0).sqrt()), 0.0),
        ]
    };
    KrausChannel::new(2, ops).with_derivative(derivs)
}

/// `(|0...0> + |1...1>)/sqrt(2)` on `n` qubits.
pub fn ghz_state(n: usize) -> Result<DensityMatrix> {
    if n == 0 {
        return Err(Error::BadArgument("probe count must be >= 1".into()));
    }
    let dim = 1usize << n;
    let mut v = CVector::zeros(dim);
    v[0] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    v[dim - 1] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    DensityMatrix::from_pure(&v)
}

/// `|+>^{(x) n}` on `n` qubits.
pub fn product_plus_state(n: usize) -> Result<DensityMatrix> {
    if n == 0 {
        return Err(Error::BadArgument("probe count must be >= 1".into()));
    }
    let dim = 1usize << n;
    let amp = 1.0 / (dim as f64).sqrt();
    let v = CVector::from_element(dim, C64::new(amp, 0.0));
    DensityMatrix::from_pure(&v)
}

/// Dense `n`-qubit dephasing model: one jump `sz^{(a)}/sqrt(2)` per qubit,
/// all with the common rate `x`, no Hamiltonian, evolution time `tau`.
pub fn dephasing_jump_model(n: usize, x: f64, tau: f64) -> Result<crate::LindbladModel> {
    if n == 0 {
        return Err(Error::BadArgument("probe count must be >= 1".into()));
    }
    let dim = 1usize << n;
    let jumps = (0..n)
        .map(|a| {
            let mut factors: Vec<CMatrix> = vec![identity(2); n];
            factors[a] = pauli::z() * C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            let op = crate::linalg::tensor_product(&factors)?;
            crate::Jump::new(crate::GeneralOperator::new(op)?, x)
        })
        .collect::<Result<Vec<_>>>()?;
    crate::LindbladModel::new(
        crate::HermitianOperator::new(CMatrix::zeros(dim, dim))?,
        0.0,
        jumps,
        tau,
    )
}

/// `sum_i sz^{(i)} / 2` on `n` qubits (the collective phase generator).
pub fn collective_sz_half(n: usize) -> CMatrix {
    let dim = 1usize << n;
    CMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            let up = (n as i64) - 2 * (i.count_ones() as i64);
            C64::new(up as f64 / 2.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Closed-form coefficients of the probe-count expansion
/// `f_conv = c1 N + c2 N^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Example1Coeffs {
    /// `4 alpha^2 (1 - 4q(1-q))`; always non-negative.
    pub c1: f64,
    /// `(tau + 4 alpha sqrt(q(1-q)))^2`; may vanish but never goes negative
    /// in this squared form (the expanded form
    /// `tau^2 + 8 tau alpha sqrt(q(1-q)) + 16 alpha^2 q(1-q)` is identical).
    pub c2: f64,
}

pub fn example1_coeffs(alpha: f64, q: f64, tau: f64) -> Example1Coeffs {
    let qq = q * (1.0 - q);
    Example1Coeffs {
        c1: 4.0 * alpha * alpha * (1.0 - 4.0 * qq),
        c2: {
            let root = tau + 4.0 * alpha * qq.sqrt();
            root * root
        },
    }
}

/// The per-N optimal decomposition parameter
/// `alpha_opt = -(N sqrt(q(1-q)) tau) / (1 + 4 q (N-1)(1-q))`.
pub fn example1_alpha_opt(n: usize, q: f64, tau: f64) -> f64 {
    let qq = q * (1.0 - q);
    -((n as f64) * qq.sqrt() * tau) / (1.0 + 4.0 * qq * (n as f64 - 1.0))
}

/// The probe-count threshold `N* = (1-2q)^2 / (4 q (1-q))` separating the
/// Heisenberg-like window from the shot-noise regime.
pub fn example1_threshold(q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::BadArgument(format!("q must lie in [0,1], got {q}")));
    }
    if q == 0.0 || q == 1.0 {
        return Err(Error::DivergentThreshold { q });
    }
    let num = (1.0 - 2.0 * q) * (1.0 - 2.0 * q);
    Ok(num / (4.0 * q * (1.0 - q)))
}

/// Decomposition parameter: fixed, or re-optimized per probe count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaChoice {
    Fixed(f64),
    Optimal,
}

/// Configuration of the N-probe GHZ dephasing estimation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Example1Config {
    pub q: f64,
    pub tau: f64,
    pub x: f64,
    pub alpha: AlphaChoice,
    pub n: usize,
}

impl Example1Config {
    pub fn new(q: f64, tau: f64, x: f64, alpha: AlphaChoice, n: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::BadArgument(format!("q must lie in [0,1], got {q}")));
        }
        if !(tau >= 0.0 && tau.is_finite()) {
            return Err(Error::BadArgument(format!("tau must be >= 0, got {tau}")));
        }
        if !x.is_finite() {
            return Err(Error::NonFinite);
        }
        if n == 0 {
            return Err(Error::BadArgument("probe count must be >= 1".into()));
        }
        if let AlphaChoice::Fixed(a) = alpha {
            if !a.is_finite() {
                return Err(Error::NonFinite);
            }
        }
        Ok(Self {
            q,
            tau,
            x,
            alpha,
            n,
        })
    }

    pub fn resolved_alpha(&self) -> f64 {
        match self.alpha {
            AlphaChoice::Fixed(a) => a,
            AlphaChoice::Optimal => example1_alpha_opt(self.n, self.q, self.tau),
        }
    }
}

/// Convexity bound split into its classical and quantum parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FconvParts {
    pub f_conv: f64,
    pub f_classical: f64,
    pub f_quantum: f64,
}

/// Branch probabilities of the single-qubit channel; state-independent since
/// `A_a† A_a` is proportional to the identity.
fn branch_probabilities(q: f64, alpha: f64, x: f64) -> (f64, f64, f64) {
    let (c2, s2) = ((alpha * x).cos().powi(2), (alpha * x).sin().powi(2));
    let p1 = q * c2 + (1.0 - q) * s2;
    let p2 = 1.0 - p1;
    let dp1 = alpha * (1.0 - 2.0 * q) * (2.0 * alpha * x).sin();
    (p1, p2, dp1)
}

/// Convexity bound of the N-probe GHZ ensemble.
///
/// The 2^N branches are collapsed by symmetry to a binomial sum over the
/// number `k` of `A2` applications: branch probabilities are products of the
/// state-independent single-qubit probabilities, and every branch state is a
/// GHZ state with relative phase `theta_k(x)`, so its QFI is `(dtheta_k)^2`.
/// `f_conv` is the exact sum of the classical and quantum parts.
pub fn example1_fconv(cfg: &Example1Config) -> FconvParts {
    let alpha = cfg.resolved_alpha();
    let n = cfg.n;
    let (p1, p2, dp1) = branch_probabilities(cfg.q, alpha, cfg.x);
    let phase_rate = alpha * (cfg.q * (1.0 - cfg.q)).sqrt();

    // ln k! table for a stable binomial pmf at any N.
    let mut ln_fact = vec![0.0f64; n + 1];
    for k in 1..=n {
        ln_fact[k] = ln_fact[k - 1] + (k as f64).ln();
    }
    let pmf = |k: usize| -> f64 {
        if p1 <= 0.0 {
            return if k == n { 1.0 } else { 0.0 };
        }
        if p2 <= 0.0 {
            return if k == 0 { 1.0 } else { 0.0 };
        }
        let ln = ln_fact[n] - ln_fact[k] - ln_fact[n - k]
            + (n - k) as f64 * p1.ln()
            + k as f64 * p2.ln();
        ln.exp()
    };

    let mut classical = 0.0;
    let mut quantum = 0.0;
    for k in 0..=n {
        let w = pmf(k);
        if w < fisher::PROB_FLOOR {
            continue;
        }
        let inv1 = if k < n { (n - k) as f64 / p1 } else { 0.0 };
        let inv2 = if k > 0 { k as f64 / p2 } else { 0.0 };
        let dlogp = dp1 * (inv1 - inv2);
        classical += w * dlogp * dlogp;
        let dtheta = (n as f64) * cfg.tau + 2.0 * phase_rate * (inv1 + inv2);
        quantum += w * dtheta * dtheta;
    }
    FconvParts {
        f_conv: classical + quantum,
        f_classical: classical,
        f_quantum: quantum,
    }
}

/// Exact QFI of the N-probe GHZ output.
///
/// Every Kraus operator is diagonal in the computational basis, so the
/// output state is supported on `span{|0...0>, |1...1>}` for all x: summing
/// the per-qubit branch factors gives the effective qubit
/// `rho(x) = [[1, g e^{i N tau x}], [g e^{-i N tau x}, 1]]/2` with constant
/// coherence `g = (2q-1)^N`. The QFI of that two-level family is evaluated
/// through the generic SLD machinery.
pub fn example1_exact_qfi(cfg: &Example1Config) -> f64 {
    let g = (2.0 * cfg.q - 1.0).powi(cfg.n as i32);
    let phase = (cfg.n as f64) * cfg.tau * cfg.x;
    let off = C64::new(phase.cos(), phase.sin()) * C64::new(g / 2.0, 0.0);
    let rho = CMatrix::from_row_slice(
        2,
        2,
        &[C64::new(0.5, 0.0), off, off.conj(), C64::new(0.5, 0.0)],
    );
    let doff = off * C64::new(0.0, (cfg.n as f64) * cfg.tau);
    let drho = CMatrix::from_row_slice(
        2,
        2,
        &[C64::new(0.0, 0.0), doff, doff.conj(), C64::new(0.0, 0.0)],
    );
    let rho = DensityMatrix::new(rho).expect("reduced state is valid");
    fisher::qfi(&rho, &drho).expect("reduced family is regular")
}

/// Probe preparation for dephasing-rate estimation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeState {
    Product,
    Ghz,
}

/// Closed-form bound and exact reference for dephasing-rate estimation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Example2Values {
    /// Extended-QFI bound from the closed-form jump-rate nSLD.
    pub bound: f64,
    /// Exact reference `N tau^2 e^{-2 tau x}` (product) or
    /// `N^2 tau^2 e^{-2 N tau x}` (GHZ).
    pub exact: f64,
}

/// Closed forms for estimating the dephasing rate `x` after time `tau` with
/// `n` probes:
///
/// - product probes: bound `N tau^2 e^{-2 tau x} / (1 - e^{-2 tau x})`,
///   exact `N tau^2 e^{-2 tau x}`;
/// - GHZ probes: the same expressions with `N tau x` in the exponents and an
///   `N^2` prefactor.
///
/// The bound-to-exact ratio is `1/(1 - e^{-2 tau x (N or 1)})`, which
/// diverges as `x -> 0`.
pub fn example2_ext_qfi(n: usize, tau: f64, x: f64, state: ProbeState) -> Result<Example2Values> {
    if n == 0 {
        return Err(Error::BadArgument("probe count must be >= 1".into()));
    }
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::BadArgument(format!("tau must be > 0, got {tau}")));
    }
    if x == 0.0 {
        return Err(Error::DivergentBound);
    }
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::BadArgument(format!("x must be > 0, got {x}")));
    }
    let nf = n as f64;
    let (prefactor, exponent) = match state {
        ProbeState::Product => (nf, 2.0 * tau * x),
        ProbeState::Ghz => (nf * nf, 2.0 * nf * tau * x),
    };
    let e = (-exponent).exp();
    Ok(Example2Values {
        bound: prefactor * tau * tau * e / (1.0 - e),
        exact: prefactor * tau * tau * e,
    })
}

/// One row of the quantum-to-classical transition sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub f_conv: f64,
    pub f_classical: f64,
    pub f_quantum: f64,
    pub f_exact: f64,
    /// `1/sqrt(f_conv)`.
    pub err_bound: f64,
    /// `1/sqrt(f_exact)`.
    pub err_exact: f64,
    /// Small-N approximation `c2^{-1/2} / N`.
    pub asymp_small_n: f64,
    /// Large-N approximation `c1^{-1/2} / sqrt(N)`.
    pub asymp_large_n: f64,
}

/// Sweeps the probe count. With `AlphaChoice::Optimal` (the reproduction
/// setting) `alpha` is re-optimized per N; a fixed alpha is carried through
/// unchanged. The asymptote columns are evaluated at each row's alpha.
pub fn sweep_example1(
    template: &Example1Config,
    n_min: usize,
    n_max: usize,
) -> Result<Vec<SweepRow>> {
    if n_min == 0 || n_min > n_max {
        return Err(Error::BadArgument(format!(
            "invalid sweep range [{n_min}, {n_max}]"
        )));
    }
    let mut rows = Vec::with_capacity(n_max - n_min + 1);
    for n in n_min..=n_max {
        let cfg = Example1Config { n, ..*template };
        let alpha = cfg.resolved_alpha();
        let parts = example1_fconv(&cfg);
        let f_exact = example1_exact_qfi(&cfg);
        let coeffs = example1_coeffs(alpha, cfg.q, cfg.tau);
        let nf = n as f64;
        rows.push(SweepRow {
            n,
            f_conv: parts.f_conv,
            f_classical: parts.f_classical,
            f_quantum: parts.f_quantum,
            f_exact,
            err_bound: 1.0 / parts.f_conv.sqrt(),
            err_exact: 1.0 / f_exact.sqrt(),
            asymp_small_n: 1.0 / (coeffs.c2.sqrt() * nf),
            asymp_large_n: 1.0 / (coeffs.c1 * nf).sqrt(),
        });
    }
    Ok(rows)
}

/// CSV rendering of sweep rows: fixed header, 12 significant digits.
pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(
        "n,f_conv,f_classical,f_quantum,f_exact,err_bound,err_exact,asymp_small_n,asymp_large_n\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{:.11e},{:.11e},{:.11e},{:.11e},{:.11e},{:.11e},{:.11e},{:.11e}\n",
            r.n,
            r.f_conv,
            r.f_classical,
            r.f_quantum,
            r.f_exact,
            r.err_bound,
            r.err_exact,
            r.asymp_small_n,
            r.asymp_large_n
        ));
    }
    out
}
