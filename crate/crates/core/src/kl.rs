//! Knill-Laflamme tensor and cost functions.

use num_complex::Complex64;

use crate::channels::KrausSet;
use crate::error::{Error, Result};
use crate::hilbert::{annihilation, number, CMatrix, CVector};
use crate::states::CodePair;

/// One elementary error operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ElementaryError {
    Identity,
    /// `a^k`
    Loss(u32),
    /// `n^k`
    Dephasing(u32),
}

impl ElementaryError {
    pub fn matrix(self, dim: usize) -> Result<CMatrix> {
        match self {
            ElementaryError::Identity => Ok(CMatrix::identity(dim, dim)),
            ElementaryError::Loss(k) => Ok(power(&annihilation(dim)?, k)),
            ElementaryError::Dephasing(k) => Ok(power(&number(dim)?, k)),
        }
    }
}

fn power(m: &CMatrix, k: u32) -> CMatrix {
    (0..k).fold(CMatrix::identity(m.nrows(), m.ncols()), |acc, _| acc * m)
}

/// Canonical ordering: identity, `a^1..a^max_loss`, `n^1..n^max_deph`.
pub fn elementary_error_list(max_loss: u32, max_deph: u32) -> Vec<ElementaryError> {
    std::iter::once(ElementaryError::Identity)
        .chain((1..=max_loss).map(ElementaryError::Loss))
        .chain((1..=max_deph).map(ElementaryError::Dephasing))
        .collect()
}

/// Matrices of [`elementary_error_list`].
pub fn elementary_error_set(max_loss: u32, max_deph: u32, dim: usize) -> Result<Vec<CMatrix>> {
    elementary_error_list(max_loss, max_deph)
        .into_iter()
        .map(|e| e.matrix(dim))
        .collect()
}

/// `f_{ijab} = <i_L| E_a^dag E_b |j_L>` for `i, j` in `{0, 1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct KlTensor {
    n_errors: usize,
    f: Vec<Complex64>,
}

impl KlTensor {
    /// Builds the tensor from `E_a |mu_L>`, indexed `[mu][a]`.
    pub fn from_images(images: &[Vec<CVector>; 2]) -> Self {
        let n_errors = images[0].len();
        let mut f = vec![Complex64::ZERO; 4 * n_errors * n_errors];
        for i in 0..2 {
            for j in 0..2 {
                for a in 0..n_errors {
                    for b in 0..n_errors {
                        f[((i * 2 + j) * n_errors + a) * n_errors + b] = images[i][a].dotc(&images[j][b]);
                    }
                }
            }
        }
        Self { n_errors, f }
    }

    pub fn n_errors(&self) -> usize {
        self.n_errors
    }

    pub fn get(&self, i: usize, j: usize, a: usize, b: usize) -> Complex64 {
        self.f[((i * 2 + j) * self.n_errors + a) * self.n_errors + b]
    }

    /// `sum_ab |f_00ab - f_11ab|^2 + |f_01ab|^2`.
    pub fn cost(&self) -> f64 {
        let mut total = 0.0;
        for a in 0..self.n_errors {
            for b in 0..self.n_errors {
                total += (self.get(0, 0, a, b) - self.get(1, 1, a, b)).norm_sqr() + self.get(0, 1, a, b).norm_sqr();
            }
        }
        total
    }
}

fn images(code: &CodePair, ops: &[CMatrix]) -> Result<[Vec<CVector>; 2]> {
    for op in ops {
        if op.nrows() != code.dim() || op.ncols() != code.dim() {
            return Err(Error::DimensionMismatch {
                expected: code.dim(),
                found: op.nrows(),
            });
        }
    }
    let act = |mu: usize| ops.iter().map(|e| e * code.codeword(mu).amplitudes()).collect();
    Ok([act(0), act(1)])
}

pub fn kl_tensor(code: &CodePair, errors: &[CMatrix]) -> Result<KlTensor> {
    Ok(KlTensor::from_images(&images(code, errors)?))
}

pub fn kl_cost_elementary(code: &CodePair, errors: &[CMatrix]) -> Result<f64> {
    Ok(kl_tensor(code, errors)?.cost())
}

/// The same cost with the error list replaced by the Kraus operators.
pub fn kl_cost_kraus(code: &CodePair, k: &KrausSet) -> Result<f64> {
    kl_cost_elementary(code, k.ops())
}
