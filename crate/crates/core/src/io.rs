//! JSON file formats shared with the CLI.
//!
//! Matrices are stored as `{"dim": d, "data": [[[re, im], ...], ...]}` with
//! row-major entries; Lindblad models as
//! `{"hamiltonian": <matrix>, "x0": r, "jumps": [{"gamma": <matrix>,
//! "rate": r}], "tau": r}`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lindblad::{Jump, LindbladModel};
use crate::state::{DensityMatrix, GeneralOperator, HermitianOperator};
use crate::{CMatrix, C64};

#[derive(Debug, Serialize, Deserialize)]
struct MatrixFile {
    dim: usize,
    data: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct JumpFile {
    gamma: MatrixFile,
    rate: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct LindbladFile {
    hamiltonian: MatrixFile,
    x0: f64,
    jumps: Vec<JumpFile>,
    tau: f64,
}

fn matrix_from_file(file: MatrixFile) -> Result<CMatrix> {
    let d = file.dim;
    if d == 0 || file.data.len() != d {
        return Err(Error::NonSquare {
            rows: file.data.len(),
            cols: d,
        });
    }
    for row in &file.data {
        if row.len() != d {
            return Err(Error::NonSquare {
                rows: d,
                cols: row.len(),
            });
        }
    }
    let m = CMatrix::from_fn(d, d, |i, j| {
        let [re, im] = file.data[i][j];
        C64::new(re, im)
    });
    if !crate::linalg::is_finite(&m) {
        return Err(Error::NonFinite);
    }
    Ok(m)
}

fn matrix_to_file(m: &CMatrix) -> MatrixFile {
    let d = m.nrows();
    MatrixFile {
        dim: d,
        data: (0..d)
            .map(|i| (0..d).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
            .collect(),
    }
}

/// Parses a matrix from JSON text, rejecting non-square or non-finite input.
pub fn matrix_from_json(text: &str) -> Result<CMatrix> {
    matrix_from_file(serde_json::from_str(text)?)
}

pub fn matrix_to_json(m: &CMatrix) -> String {
    serde_json::to_string(&matrix_to_file(m)).expect("matrix serialization cannot fail")
}

pub fn load_matrix(path: &Path) -> Result<CMatrix> {
    matrix_from_json(&std::fs::read_to_string(path)?)
}

pub fn save_matrix(path: &Path, m: &CMatrix) -> Result<()> {
    std::fs::write(path, matrix_to_json(m))?;
    Ok(())
}

/// Loads a matrix and validates the density-matrix invariants.
pub fn load_state(path: &Path) -> Result<DensityMatrix> {
    DensityMatrix::new(load_matrix(path)?)
}

/// Parses a Lindblad model from JSON text.
pub fn model_from_json(text: &str) -> Result<LindbladModel> {
    let file: LindbladFile = serde_json::from_str(text)?;
    let hamiltonian = HermitianOperator::new(matrix_from_file(file.hamiltonian)?)?;
    let jumps = file
        .jumps
        .into_iter()
        .map(|j| Jump::new(GeneralOperator::new(matrix_from_file(j.gamma)?)?, j.rate))
        .collect::<Result<Vec<_>>>()?;
    LindbladModel::new(hamiltonian, file.x0, jumps, file.tau)
}

pub fn model_to_json(model: &LindbladModel) -> String {
    let file = LindbladFile {
        hamiltonian: matrix_to_file(model.hamiltonian.matrix()),
        x0: model.x0,
        jumps: model
            .jumps
            .iter()
            .map(|j| JumpFile {
                gamma: matrix_to_file(j.operator.matrix()),
                rate: j.rate,
            })
            .collect(),
        tau: model.tau,
    };
    serde_json::to_string(&file).expect("model serialization cannot fail")
}

pub fn load_model(path: &Path) -> Result<LindbladModel> {
    model_from_json(&std::fs::read_to_string(path)?)
}
