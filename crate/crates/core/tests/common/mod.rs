//! Shared random-instance generators for the integration suites.
//!
//! All randomness is seeded, so every suite is deterministic.

#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qfi_core::linalg::hermitize;
use qfi_core::{CMatrix, CVector, DensityMatrix, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| random_complex(rng))
}

/// Full-rank random state `G G† / Tr[G G†]`.
pub fn random_density(rng: &mut ChaCha8Rng, dim: usize) -> DensityMatrix {
    let g = random_matrix(rng, dim, dim) + CMatrix::identity(dim, dim) * C64::new(0.3, 0.0);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new(hermitize(&(m / C64::new(tr, 0.0)))).expect("Gram matrix is a valid state")
}

pub fn random_pure(rng: &mut ChaCha8Rng, dim: usize) -> DensityMatrix {
    let v = CVector::from_fn(dim, |_, _| random_complex(rng));
    DensityMatrix::from_pure(&v).expect("random vector is nonzero")
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize) -> CMatrix {
    hermitize(&random_matrix(rng, dim, dim))
}

/// Traceless Hermitian matrix, a valid family tangent at any full-rank state.
pub fn random_traceless_hermitian(rng: &mut ChaCha8Rng, dim: usize) -> CMatrix {
    let mut h = random_hermitian(rng, dim);
    let shift = h.trace().re / dim as f64;
    for i in 0..dim {
        h[(i, i)] -= C64::new(shift, 0.0);
    }
    h
}

pub fn random_unitary(rng: &mut ChaCha8Rng, dim: usize) -> CMatrix {
    random_matrix(rng, dim, dim).qr().q()
}

/// Kraus set sliced from a random isometry: `k` operators of dimension `dim`
/// with exact completeness (up to QR roundoff).
pub fn random_kraus_set(rng: &mut ChaCha8Rng, dim: usize, k: usize) -> Vec<CMatrix> {
    let tall = random_matrix(rng, k * dim, dim);
    let q = tall.qr().q();
    (0..k).map(|a| q.rows(a * dim, dim).into_owned()).collect()
}
