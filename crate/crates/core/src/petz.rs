//! Petz recovery: fidelity from the codeword Gram structure and the explicit
//! recovery Kraus operators.

use crate::channels::KrausSet;
use crate::error::{Error, Result};
use crate::hilbert::{
    hermitian_asymmetry, hermitian_part, hermitian_pinv_sqrt, hermitian_sqrt, kron, partial_trace_outer, BlockedMatrix,
    CMatrix,
};
use crate::states::CodePair;

const SINGULAR_GRAM: f64 = 1e-12;

/// Outcome of [`petz_fidelity`].
#[derive(Debug, Clone)]
pub struct PetzResult {
    /// Raw value, not clipped: first-order Kraus sets are not trace
    /// preserving and can push it slightly above 1.
    pub fidelity: f64,
    /// Codeword Gram matrix `m`.
    pub m_matrix: CMatrix,
    pub m: BlockedMatrix,
    pub kraus: Option<Vec<CMatrix>>,
    /// `(F, (1 + F) / 2)`: the range allowed for the optimal fidelity.
    pub bounds: (f64, f64),
    /// `||A - A^dag||_F` of `(m^-1 (x) I) M` before symmetrization.
    pub asymmetry: f64,
}

impl PetzResult {
    pub fn infidelity(&self) -> f64 {
        1.0 - self.fidelity
    }
}

/// `M_{[mu,l],[nu,n]} = <mu_L| K_l^dag K_n |nu_L>`, `mu` outer.
pub fn petz_m_matrix(code: &CodePair, k: &KrausSet) -> Result<BlockedMatrix> {
    if k.dim() != code.dim() {
        return Err(Error::DimensionMismatch {
            expected: code.dim(),
            found: k.dim(),
        });
    }
    let r = k.len();
    let images: Vec<_> = (0..2)
        .flat_map(|mu| k.ops().iter().map(move |op| op * code.codeword(mu).amplitudes()))
        .collect();
    let m = CMatrix::from_fn(2 * r, 2 * r, |row, col| images[row].dotc(&images[col]));
    BlockedMatrix::new(2, r, m)
}

fn inverse_2x2(m: &CMatrix) -> Result<CMatrix> {
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    if det.norm() < SINGULAR_GRAM {
        return Err(Error::IllConditionedCode {
            determinant: det.norm(),
        });
    }
    let inv = CMatrix::from_row_slice(2, 2, &[m[(1, 1)], -m[(0, 1)], -m[(1, 0)], m[(0, 0)]]);
    Ok(inv / det)
}

/// `F = 1/4 || Tr_L sqrt((m^-1 (x) I) M) ||_F^2`.
pub fn petz_fidelity(code: &CodePair, k: &KrausSet) -> Result<PetzResult> {
    let m = petz_m_matrix(code, k)?;
    let gram = code.gram();
    let m_inv = inverse_2x2(&gram)?;
    let scaled = kron(&m_inv, &CMatrix::identity(k.len(), k.len())) * m.matrix();
    let asymmetry = hermitian_asymmetry(&scaled);
    let root = BlockedMatrix::new(2, k.len(), hermitian_sqrt(&hermitian_part(&scaled))?)?;
    let fidelity = 0.25 * partial_trace_outer(&root).norm_squared();
    Ok(PetzResult {
        fidelity,
        m_matrix: gram,
        m,
        kraus: None,
        bounds: (fidelity, 0.5 * (1.0 + fidelity)),
        asymmetry,
    })
}

/// `R_r = P_L K_r^dag N(P_L)^{-1/2}`, one per noise operator.
pub fn petz_kraus(code: &CodePair, k: &KrausSet, rel_tol: f64) -> Result<Vec<CMatrix>> {
    if k.dim() != code.dim() {
        return Err(Error::DimensionMismatch {
            expected: code.dim(),
            found: k.dim(),
        });
    }
    let p = code.projector();
    let noisy_p = k
        .ops()
        .iter()
        .fold(CMatrix::zeros(k.dim(), k.dim()), |acc, op| acc + op * &p * op.adjoint());
    let inv_root = hermitian_pinv_sqrt(&hermitian_part(&noisy_p), rel_tol)?;
    Ok(k.ops().iter().map(|op| &p * op.adjoint() * &inv_root).collect())
}

/// [`petz_fidelity`] with the recovery operators attached.
pub fn petz_recovery(code: &CodePair, k: &KrausSet, rel_tol: f64) -> Result<PetzResult> {
    let mut out = petz_fidelity(code, k)?;
    out.kraus = Some(petz_kraus(code, k, rel_tol)?);
    Ok(out)
}
