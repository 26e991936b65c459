//! Dense complex-matrix helpers: adjoints, commutators, tensor products and
//! the small constructions (Pauli matrices, projectors) the rest of the crate
//! leans on.

use crate::error::{Error, Result};
use crate::{CMatrix, CVector, C64};

/// Conjugate transpose.
pub fn dagger(m: &CMatrix) -> CMatrix {
    m.adjoint()
}

/// `[a, b] = ab - ba`.
pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// `{a, b} = ab + ba`.
pub fn anticommutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b + b * a
}

/// Frobenius norm.
pub fn frobenius_norm(m: &CMatrix) -> f64 {
    m.norm()
}

/// Largest entry modulus; zero for empty matrices.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Hermitian part `(m + m†)/2`.
pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// Residual `max |m - m†|`, the distance from Hermiticity in entry norm.
pub fn hermiticity_residual(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// True when `max |m - m†| <= tol * max(1, max|m|)`.
pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    hermiticity_residual(m) <= tol * max_abs(m).max(1.0)
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// `Tr[rho op]`.
pub fn expectation(op: &CMatrix, rho: &CMatrix) -> C64 {
    (rho * op).trace()
}

/// Tensor (Kronecker) product of a non-empty list of matrices, left to right.
pub fn tensor_product(ops: &[CMatrix]) -> Result<CMatrix> {
    let (first, rest) = ops.split_first().ok_or(Error::EmptyList)?;
    Ok(rest.iter().fold(first.clone(), |acc, m| acc.kronecker(m)))
}

/// `|v><v|`.
pub fn projector(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

/// Real matrix entries promoted to complex.
pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> CMatrix {
    CMatrix::from_iterator(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)))
}

pub mod pauli {
    use crate::{CMatrix, C64};

    pub fn x() -> CMatrix {
        CMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(0.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
            ],
        )
    }

    pub fn y() -> CMatrix {
        CMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(0.0, 0.0),
                C64::new(0.0, -1.0),
                C64::new(0.0, 1.0),
                C64::new(0.0, 0.0),
            ],
        )
    }

    pub fn z() -> CMatrix {
        CMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(-1.0, 0.0),
            ],
        )
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns unsorted eigenvalues and the matching unitary eigenvector
/// columns. Jacobi handles sparse and exactly-degenerate inputs without the
/// breakdowns tridiagonalization-based solvers can hit, and delivers high
/// relative accuracy on the small dense matrices this crate works with.
pub fn jacobi_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let d = m.nrows();
    let mut a = hermitize(m);
    let mut v = identity(d);
    if d < 2 {
        return ((0..d).map(|i| a[(i, i)].re).collect(), v);
    }
    let scale = max_abs(&a).max(f64::MIN_POSITIVE);
    let stop = f64::EPSILON * scale;
    for _sweep in 0..60 {
        let mut off: f64 = 0.0;
        for p in 0..d {
            for q in (p + 1)..d {
                off = off.max(a[(p, q)].norm());
            }
        }
        if off <= stop {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let b = a[(p, q)];
                let babs = b.norm();
                if babs <= stop * 1e-2 {
                    continue;
                }
                // phase that makes the off-diagonal real, then a classic
                // real Jacobi rotation
                let phase = b / C64::new(babs, 0.0);
                let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * babs);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // column rotation: col_p' = c col_p - s conj(phase) col_q,
                //                  col_q' = s phase col_p + c col_q
                let s_left = phase.conj() * C64::new(s, 0.0);
                let s_right = phase * C64::new(s, 0.0);
                for k in 0..d {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * C64::new(c, 0.0) - akq * s_left;
                    a[(k, q)] = akp * s_right + akq * C64::new(c, 0.0);
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * C64::new(c, 0.0) - vkq * s_left;
                    v[(k, q)] = vkp * s_right + vkq * C64::new(c, 0.0);
                }
                for k in 0..d {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * C64::new(c, 0.0) - aqk * s_left.conj();
                    a[(q, k)] = apk * s_right.conj() + aqk * C64::new(c, 0.0);
                }
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
            }
        }
    }
    ((0..d).map(|i| a[(i, i)].re).collect(), v)
}

/// Unitary `exp(-i t H)` of a Hermitian generator, via spectral decomposition.
pub fn unitary_from_hermitian(h: &CMatrix, t: f64) -> CMatrix {
    let (eigenvalues, vectors) = jacobi_eigen(h);
    let d = h.nrows();
    let phases = CMatrix::from_fn(d, d, |i, j| {
        if i == j {
            let th = -t * eigenvalues[i];
            C64::new(th.cos(), th.sin())
        } else {
            C64::new(0.0, 0.0)
        }
    });
    &vectors * phases * vectors.adjoint()
}
