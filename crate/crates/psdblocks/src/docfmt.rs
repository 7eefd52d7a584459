//! JSON document format for matrices and block matrices.
//!
//! A matrix is `{"rows": r, "cols": c, "re": [...], "im": [...]}` with
//! row-major entries; `"im"` is omitted when the matrix is real. A block
//! matrix is `{"n": n, "m11": M, "m12": M, "m22": M}` — only the upper
//! triangle of the block structure is stored since `m21 = m12*`.
//!
//! Numbers pass through `serde_json`'s shortest round-trip encoding of
//! binary64, so construct → file → classify reproduces the in-memory
//! classification bit for bit. Documents are strict: unknown fields and
//! shape mismatches are rejected rather than ignored, because the format
//! is meant to be hand-edited.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::blocks::{make_block, BlockPsdMatrix};
use crate::numerics::{ComplexMatrix, HermitianMatrix, ToleranceConfig};
use crate::{Error, Result};

/// One dense matrix with row-major real (and optionally imaginary) parts.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDoc {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<f64>>,
}

impl MatrixDoc {
    pub fn from_matrix(m: &ComplexMatrix) -> MatrixDoc {
        let mut re = Vec::with_capacity(m.rows() * m.cols());
        let mut im = Vec::with_capacity(m.rows() * m.cols());
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let z = m.get(i, j);
                re.push(z.re);
                im.push(z.im);
            }
        }
        let im = if im.iter().all(|&v| v == 0.0) {
            None
        } else {
            Some(im)
        };
        MatrixDoc {
            rows: m.rows(),
            cols: m.cols(),
            re,
            im,
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let len = self.rows * self.cols;
        if self.re.len() != len {
            return Err(Error::InvalidDocument(format!(
                "re has {} entries, expected {} for a {}x{} matrix",
                self.re.len(),
                len,
                self.rows,
                self.cols
            )));
        }
        let entries: Vec<Complex64> = match &self.im {
            Some(im) => {
                if im.len() != len {
                    return Err(Error::InvalidDocument(format!(
                        "im has {} entries, expected {} for a {}x{} matrix",
                        im.len(),
                        len,
                        self.rows,
                        self.cols
                    )));
                }
                self.re
                    .iter()
                    .zip(im)
                    .map(|(&r, &i)| Complex64::new(r, i))
                    .collect()
            }
            None => self.re.iter().map(|&r| Complex64::new(r, 0.0)).collect(),
        };
        ComplexMatrix::from_row_major(self.rows, self.cols, &entries)
    }
}

/// A 2x2-block matrix document; `m21` is implied by `m12`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockDoc {
    pub n: usize,
    pub m11: MatrixDoc,
    pub m12: MatrixDoc,
    pub m22: MatrixDoc,
}

impl BlockDoc {
    pub fn from_block(b: &BlockPsdMatrix) -> BlockDoc {
        BlockDoc {
            n: b.n(),
            m11: MatrixDoc::from_matrix(b.m11().matrix()),
            m12: MatrixDoc::from_matrix(b.m12()),
            m22: MatrixDoc::from_matrix(b.m22().matrix()),
        }
    }

    /// Rebuilds and fully revalidates the block matrix (shape, Hermitian
    /// diagonal blocks, PSD assembly).
    pub fn to_block(&self, tol: &ToleranceConfig) -> Result<BlockPsdMatrix> {
        for (name, doc) in [("m11", &self.m11), ("m12", &self.m12), ("m22", &self.m22)] {
            if doc.rows != self.n || doc.cols != self.n {
                return Err(Error::InvalidDocument(format!(
                    "{name} is {}x{}, expected {}x{}",
                    doc.rows, doc.cols, self.n, self.n
                )));
            }
        }
        let m11 = HermitianMatrix::new(&self.m11.to_matrix()?, tol)?;
        let m22 = HermitianMatrix::new(&self.m22.to_matrix()?, tol)?;
        make_block(&m11, &self.m12.to_matrix()?, &m22, tol)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("block documents always serialize")
    }

    pub fn from_json(text: &str) -> Result<BlockDoc> {
        serde_json::from_str(text).map_err(|e| {
            Error::InvalidDocument(format!("line {}, column {}: {e}", e.line(), e.column()))
        })
    }
}
