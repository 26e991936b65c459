//! Randomized invariant suites for the matrix foundation, the Fisher family,
//! the convexity bounds and the Lindblad closed forms.

mod common;

use rand::Rng;

use common::*;

use qfi_core::convexity::{self, Ensemble};
use qfi_core::experiments;
use qfi_core::fisher;
use qfi_core::linalg::{commutator, hermitize, identity, max_abs};
use qfi_core::lindblad::{self, Jump, LindbladModel};
use qfi_core::state::{matrix_sqrt, spectral_decompose, support_project};
use qfi_core::{
    CMatrix, DensityMatrix, GeneralOperator, HermitianOperator, KrausChannel, Measurement,
    ParamFamily, C64,
};

#[test]
fn spectral_reconstruction_is_identity() {
    let mut rng = rng(11);
    for trial in 0..200 {
        let dim = 2 + trial % 7;
        let rho = random_density(&mut rng, dim);
        let spec = spectral_decompose(&rho);
        assert!(
            max_abs(&(spec.reconstruct() - rho.matrix())) < 1e-10,
            "reconstruction failed at dim {dim}"
        );
        let unitarity =
            max_abs(&(spec.eigenvectors.adjoint() * &spec.eigenvectors - identity(dim)));
        assert!(unitarity < 1e-10);
    }
}

#[test]
fn matrix_sqrt_squares_back() {
    let mut rng = rng(12);
    for trial in 0..100 {
        let dim = 2 + trial % 7;
        let rho = random_density(&mut rng, dim);
        let s = matrix_sqrt(&rho);
        assert!(max_abs(&(s.matrix() * s.matrix() - rho.matrix())) < 1e-9);
    }
}

#[test]
fn support_pinv_satisfies_penrose_condition() {
    let mut rng = rng(13);
    for trial in 0..100 {
        let dim = 2 + trial % 4;
        let rho = random_density(&mut rng, dim);
        let sp = support_project(&rho, None).unwrap();
        let pinv = sp.pinv.matrix();
        assert!(max_abs(&(pinv * rho.matrix() * pinv - pinv)) < 1e-8);
    }
}

#[test]
fn channels_preserve_trace_and_positivity() {
    let mut rng = rng(14);
    for trial in 0..1000 {
        let dim = 2 + trial % 3;
        let k = 2 + trial % 3;
        let ops = random_kraus_set(&mut rng, dim, k);
        let ch = KrausChannel::constant(ops);
        let rho = random_density(&mut rng, dim);
        // DensityMatrix validation inside apply checks trace, Hermiticity
        // and positivity; a failure here would surface as an error.
        let out = ch
            .apply(&rho, 0.0)
            .unwrap_or_else(|e| panic!("trial {trial}: {e}"));
        assert!((out.matrix().trace().re - 1.0).abs() < 1e-10);
    }
}

#[test]
fn family_derivatives_are_traceless() {
    let mut rng = rng(15);
    for _ in 0..50 {
        let dim = 2 + rng.gen_range(0..3usize);
        let h = random_hermitian(&mut rng, dim);
        let rho0 = random_density(&mut rng, dim);
        let fam = ParamFamily::new(move |x| {
            let u = qfi_core::linalg::unitary_from_hermitian(&h, x);
            DensityMatrix::new(hermitize(&(&u * rho0.matrix() * u.adjoint())))
        });
        let d = fam.derivative_at(0.2).unwrap();
        assert!(d.trace().norm() <= 1e-8);
    }
}

#[test]
fn monotone_chain_cfi_qfi_inverse_quadratic() {
    let mut rng = rng(16);
    for trial in 0..1000 {
        let dim = 2 + trial % 3;
        let rho = random_density(&mut rng, dim);
        let drho = random_traceless_hermitian(&mut rng, dim);
        let f = fisher::qfi(&rho, &drho).unwrap();
        let basis = random_unitary(&mut rng, dim);
        let povm = Measurement::new(
            (0..dim)
                .map(|k| {
                    let v = basis.column(k).into_owned();
                    qfi_core::linalg::projector(&v)
                })
                .collect(),
        )
        .unwrap();
        let cfi = fisher::cfi_of_measurement(&rho, &drho, &povm).unwrap();
        let inv_quad = fisher::inverse_quadratic_bound(&rho, &drho).unwrap();
        assert!(cfi <= f + 1e-9, "trial {trial}: cfi {cfi} > qfi {f}");
        assert!(
            f <= inv_quad + 1e-9,
            "trial {trial}: qfi {f} > invquad {inv_quad}"
        );
        // zero-mean SLD
        let l = fisher::solve_sld(&rho, &drho, None).unwrap();
        assert!(rho.expectation(l.matrix()).re.abs() <= 1e-8);
    }
}

#[test]
fn nsld_gauge_freedom_only_loosens_the_bound() {
    let mut rng = rng(17);
    for trial in 0..100 {
        let dim = 2 + trial % 3;
        let rho = random_density(&mut rng, dim);
        let drho = random_traceless_hermitian(&mut rng, dim);
        let f = fisher::qfi(&rho, &drho).unwrap();
        let l = fisher::solve_sld(&rho, &drho, None).unwrap();
        let pinv = support_project(&rho, None).unwrap().pinv;
        let s = random_hermitian(&mut rng, dim);
        let gauge = s * pinv.matrix() * C64::new(0.0, 1.0);
        let shifted = l.matrix() + gauge;
        let ext = fisher::extended_qfi(&rho, &drho, &shifted).unwrap();
        assert!(ext >= f - 1e-9, "trial {trial}: ext {ext} < qfi {f}");
    }
}

#[test]
fn ensemble_finite_differences_respect_convexity() {
    // Exercises the finite-difference fallback of Ensemble (no analytic
    // derivatives supplied).
    let mut rng = rng(18);
    for trial in 0..100 {
        let dim = 2 + trial % 3;
        let branches = 2 + trial % 3;
        let bases: Vec<DensityMatrix> = (0..branches)
            .map(|_| random_density(&mut rng, dim))
            .collect();
        let gens: Vec<CMatrix> = (0..branches)
            .map(|_| random_hermitian(&mut rng, dim))
            .collect();
        let logits: Vec<(f64, f64)> = (0..branches)
            .map(|_| (rng.gen_range(-0.5..0.5), rng.gen_range(-0.8..0.8)))
            .collect();
        let weights = {
            let logits = logits.clone();
            move |x: f64| {
                let raw: Vec<f64> = logits.iter().map(|(t, p)| (t + p * x).exp()).collect();
                let total: f64 = raw.iter().sum();
                raw.into_iter().map(|w| w / total).collect::<Vec<f64>>()
            }
        };
        let states = {
            let bases = bases.clone();
            let gens = gens.clone();
            move |x: f64| {
                bases
                    .iter()
                    .zip(&gens)
                    .map(|(b, g)| {
                        let u = qfi_core::linalg::unitary_from_hermitian(g, x);
                        DensityMatrix::new(hermitize(&(&u * b.matrix() * u.adjoint())))
                    })
                    .collect()
            }
        };
        let ens = Ensemble::new(weights, states);
        let x = rng.gen_range(0.0..0.4);
        let bound = convexity::f_conv(&ens, x).unwrap();
        // mixture derivative assembled from the same finite differences
        let mix = ens.mixture_at(x).unwrap();
        let w = ens.weights_at(x);
        let dw = ens.weight_derivatives_at(x);
        let st = ens.states_at(x).unwrap();
        let ds = ens.state_derivatives_at(x).unwrap();
        let mut dmix = CMatrix::zeros(dim, dim);
        for a in 0..branches {
            dmix += st[a].matrix() * C64::new(dw[a], 0.0) + &ds[a] * C64::new(w[a], 0.0);
        }
        let f = fisher::qfi(&mix, &hermitize(&dmix)).unwrap();
        // finite-difference noise budget on top of the exact inequality
        assert!(f <= bound + 1e-6, "trial {trial}: qfi {f} > f_conv {bound}");
    }
}

#[test]
fn evolve_preserves_trace_and_positivity() {
    let mut rng = rng(19);
    for trial in 0..40 {
        let dim = 2 + trial % 2;
        let h = HermitianOperator::new(random_hermitian(&mut rng, dim)).unwrap();
        let jumps = (0..1 + trial % 2)
            .map(|_| {
                Jump::new(
                    GeneralOperator::new(random_matrix(&mut rng, dim, dim) * C64::new(0.5, 0.0))
                        .unwrap(),
                    rng.gen_range(0.0..1.0),
                )
                .unwrap()
            })
            .collect();
        let tau = rng.gen_range(0.1..5.0);
        let model = LindbladModel::new(h, rng.gen_range(-1.0..1.0), jumps, tau).unwrap();
        let rho0 = random_density(&mut rng, dim);
        let out = lindblad::evolve(&model, &rho0).unwrap_or_else(|e| panic!("trial {trial}: {e}"));
        assert!((out.matrix().trace().re - 1.0).abs() < 1e-10);
        let spec = spectral_decompose(&out);
        assert!(*spec.eigenvalues.last().unwrap() >= -1e-8);
    }
}

/// Random fully commuting model: all operators share a random eigenbasis.
fn random_commuting_model(
    rng: &mut ChaChaRng,
    dim: usize,
    jumps: usize,
    tau: f64,
) -> (LindbladModel, CMatrix) {
    let v = random_unitary(rng, dim);
    let diag = |rng: &mut ChaChaRng, complex: bool| -> CMatrix {
        CMatrix::from_fn(dim, dim, |i, j| {
            if i == j {
                if complex {
                    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                } else {
                    C64::new(rng.gen_range(-1.0..1.0), 0.0)
                }
            } else {
                C64::new(0.0, 0.0)
            }
        })
    };
    let h = &v * diag(rng, false) * v.adjoint();
    let jump_ops: Vec<Jump> = (0..jumps)
        .map(|_| {
            Jump::new(
                GeneralOperator::new(&v * diag(rng, true) * v.adjoint()).unwrap(),
                rng.gen_range(0.1..1.0),
            )
            .unwrap()
        })
        .collect();
    let model = LindbladModel::new(
        HermitianOperator::new(hermitize(&h)).unwrap(),
        rng.gen_range(0.2..1.5),
        jump_ops,
        tau,
    )
    .unwrap();
    (model, v)
}

type ChaChaRng = rand_chacha::ChaCha8Rng;

#[test]
fn commuting_model_derivatives_match_finite_differences() {
    let mut rng = rng(20);
    for trial in 0..20 {
        let dim = 2 + trial % 2;
        let tau = rng.gen_range(0.3..1.5);
        let (model, _) = random_commuting_model(&mut rng, dim, 1, tau);
        let rho0 = random_density(&mut rng, dim);

        // x0-family
        let m0 = model.clone();
        let r0 = rho0.clone();
        let fam0 = ParamFamily::new(move |x0| {
            let mut m = m0.clone();
            m.x0 = x0;
            lindblad::evolve(&m, &r0)
        });
        let numeric = fam0.derivative_at(model.x0).unwrap();
        let rho_tau = lindblad::evolve(&model, &rho0).unwrap();
        let analytic = lindblad::drho_x0(&model, &rho_tau).unwrap();
        assert!(
            max_abs(&(&numeric - &analytic)) < 1e-6,
            "trial {trial}: x0 derivative mismatch {}",
            max_abs(&(numeric - analytic))
        );

        // jump-rate family
        let m1 = model.clone();
        let r1 = rho0.clone();
        let fam1 = ParamFamily::new(move |xa| {
            let mut m = m1.clone();
            m.jumps[0].rate = xa;
            lindblad::evolve(&m, &r1)
        });
        let numeric = fam1.derivative_at(model.jumps[0].rate).unwrap();
        let analytic = lindblad::drho_xa(&model, &rho_tau, 0).unwrap();
        assert!(
            max_abs(&(&numeric - &analytic)) < 1e-6,
            "trial {trial}: jump derivative mismatch {}",
            max_abs(&(numeric - analytic))
        );
    }
}

#[test]
fn hamiltonian_rate_bound_dominates_and_saturates_when_pure() {
    let mut rng = rng(21);
    for trial in 0..50 {
        let dim = 2 + trial % 3;
        let tau = rng.gen_range(0.3..1.5);
        let (model, _) = random_commuting_model(&mut rng, dim, 1, tau);
        let rho_tau = lindblad::evolve(&model, &random_density(&mut rng, dim)).unwrap();
        let drho = lindblad::drho_x0(&model, &rho_tau).unwrap();
        let f = fisher::qfi(&rho_tau, &drho).unwrap();
        let ext = lindblad::ext_qfi_x0(&model, &rho_tau).unwrap();
        assert!(ext >= f - 1e-8, "trial {trial}: ext {ext} < qfi {f}");
        let l0 = lindblad::nsld_x0(&model, &rho_tau).unwrap();
        let residual = fisher::nsld_residual(&rho_tau, &drho, l0.matrix());
        assert!(
            residual <= 1e-10,
            "trial {trial}: x0 nSLD residual {residual:.3e}"
        );
    }
    // purity saturates the bound: unitary commuting model on a pure state
    for trial in 0..20 {
        let dim = 2 + trial % 3;
        let tau = rng.gen_range(0.3..1.5);
        let (mut model, _) = random_commuting_model(&mut rng, dim, 0, tau);
        model.jumps.clear();
        let psi = random_pure(&mut rng, dim);
        let rho_tau = lindblad::evolve(&model, &psi).unwrap();
        let drho = lindblad::drho_x0(&model, &rho_tau).unwrap();
        let f = fisher::qfi(&rho_tau, &drho).unwrap();
        let ext = lindblad::ext_qfi_x0(&model, &rho_tau).unwrap();
        assert!(
            (ext - f).abs() <= 1e-8 * ext.max(1.0),
            "trial {trial}: pure saturation violated: ext {ext}, qfi {f}"
        );
    }
}

#[test]
fn jump_rate_bound_dominates_qfi_and_matches_its_nsld() {
    let mut rng = rng(22);
    for trial in 0..50 {
        let dim = 2 + trial % 3;
        let tau = rng.gen_range(0.3..1.2);
        let (model, _) = random_commuting_model(&mut rng, dim, 2, tau);
        let rho_tau = lindblad::evolve(&model, &random_density(&mut rng, dim)).unwrap();
        for a in 0..model.jumps.len() {
            let drho = lindblad::drho_xa(&model, &rho_tau, a).unwrap();
            let f = fisher::qfi(&rho_tau, &drho).unwrap();
            let ext = lindblad::ext_qfi_xa(&model, &rho_tau, a).unwrap();
            assert!(
                ext >= f - 1e-9,
                "trial {trial} jump {a}: ext {ext} < qfi {f}"
            );
            let l = lindblad::nsld_xa(&model, &rho_tau, a).unwrap();
            let residual = fisher::nsld_residual(&rho_tau, &drho, l.matrix());
            assert!(
                residual <= 1e-7,
                "trial {trial} jump {a}: nSLD residual {residual:.3e}"
            );
            let via_operator = fisher::extended_qfi(&rho_tau, &drho, l.matrix()).unwrap();
            assert!(
                (via_operator - ext).abs() <= 1e-8 * ext.max(1.0),
                "trial {trial} jump {a}: formula {ext} vs operator {via_operator}"
            );
        }
    }
}

#[test]
fn channel_consistency_both_bounds_dominate_output_qfi() {
    // The ensemble bound and the eta-minimized bound use different
    // logarithmic-derivative choices; each must dominate the QFI of the
    // output state (their mutual order is not fixed).
    let mut rng = rng(23);
    for trial in 0..50 {
        let dim = 2;
        let k = 2 + trial % 2;
        let base = random_kraus_set(&mut rng, dim, k);
        let gen = random_hermitian(&mut rng, dim * k);
        let base2 = base.clone();
        let ch = KrausChannel::new(k, move |x| {
            let u = qfi_core::linalg::unitary_from_hermitian(&gen, x);
            let mut tall = CMatrix::zeros(dim * k, dim);
            for (a, op) in base2.iter().enumerate() {
                tall.rows_mut(a * dim, dim).copy_from(op);
            }
            let rotated = u * tall;
            (0..k)
                .map(|a| rotated.rows(a * dim, dim).into_owned())
                .collect()
        });
        let rho0 = random_density(&mut rng, dim);
        let x = rng.gen_range(0.1..0.6);

        let out = ch.apply(&rho0, x).unwrap();
        let ops = ch.operators_at(x).unwrap();
        let dops = ch.derivatives_at(x).unwrap();
        let mut dout = CMatrix::zeros(dim, dim);
        for (a, da) in ops.iter().zip(&dops) {
            dout += da * rho0.matrix() * a.adjoint() + a * rho0.matrix() * da.adjoint();
        }
        let f = fisher::qfi(&out, &hermitize(&dout)).unwrap();

        let ens = convexity::channel_ensemble(&ch, &rho0, x).unwrap();
        let conv = convexity::f_conv(&ens, x).unwrap();
        let min = convexity::channel_bound_min(&ch, &rho0, x).unwrap();
        // finite-difference Kraus derivatives inside the ensemble leave a
        // small slack on top of the exact inequality
        assert!(conv >= f - 1e-5, "trial {trial}: f_conv {conv} < qfi {f}");
        assert!(
            min.bound >= f - 1e-5,
            "trial {trial}: channel bound {} < qfi {f}",
            min.bound
        );
    }
}

#[test]
fn example1_reduction_matches_channel_ensemble_at_n1() {
    // The binomial reduction at N = 1 against the generic ensemble bound,
    // over a parameter grid.
    for &(q, alpha, x) in &[(0.8, 1.0, 0.3), (0.3, -0.6, 0.9), (0.995, 0.4, 1.0)] {
        let ch = experiments::example1_channel(q, alpha, 1.0);
        let rho0 = experiments::ghz_state(1).unwrap();
        let ens = convexity::channel_ensemble(&ch, &rho0, x).unwrap();
        let generic = convexity::split_f_conv(&ens, x).unwrap();
        let cfg =
            experiments::Example1Config::new(q, 1.0, x, experiments::AlphaChoice::Fixed(alpha), 1)
                .unwrap();
        let reduced = experiments::example1_fconv(&cfg);
        assert!((generic.classical - reduced.f_classical).abs() < 1e-8);
        assert!((generic.quantum - reduced.f_quantum).abs() < 1e-8);
    }
}

#[test]
fn unitary_commutator_derivative_matches_channel_derivative() {
    // d/dx of e^{-ix tau H} rho e^{ix tau H} computed two ways.
    let mut rng = rng(24);
    let dim = 3;
    let h = random_hermitian(&mut rng, dim);
    let rho0 = random_density(&mut rng, dim);
    let tau = 1.3;
    let ch = convexity::unitary_channel(h.clone(), tau);
    let x = 0.4;
    let ops = ch.operators_at(x).unwrap();
    let dops = ch.derivatives_at(x).unwrap();
    let direct =
        &dops[0] * rho0.matrix() * ops[0].adjoint() + &ops[0] * rho0.matrix() * dops[0].adjoint();
    let evolved = &ops[0] * rho0.matrix() * ops[0].adjoint();
    let expected = commutator(&h, &evolved) * C64::new(0.0, -tau);
    assert!(max_abs(&(direct - expected)) < 1e-9);
}
