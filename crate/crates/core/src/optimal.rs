//! Optimal recovery by semidefinite programming over the recovery basis
//! built from the orthonormalized error subspaces.
//!
//! Every recovery operator considered maps the span of `K_j |mu_L>` back to
//! the code space, so it is stored as a `2 x ds` matrix `b = V^dag B E`,
//! where `V` is the encoder and `E` the orthonormal span basis.

use nalgebra::SymmetricEigen;
use num_complex::Complex64;

use crate::channels::KrausSet;
use crate::error::{Error, Result};
use crate::hilbert::{c64, gram_schmidt, hermitian_part, CMatrix, CVector};
use crate::sdp::{self, Constraints, PartialTraceIdentity, SdpOptions, SdpStart};
use crate::states::CodePair;

/// Absolute norm below which an orthogonalized error vector is dropped.
pub const DEFAULT_DROP_TOL: f64 = 1e-10;
/// Duality gap accepted from the solver.
pub const DEFAULT_SDP_TOL: f64 = 1e-7;
/// Eigenvalues of the Choi matrix below this fraction of the largest are
/// discarded when extracting Kraus operators.
pub const KRAUS_EIGEN_CUT: f64 = 1e-10;

/// Orthonormalized `K_j |0_L>`, `K_j |1_L>` for every `j`.
#[derive(Debug, Clone)]
pub struct ErrorSubspaces {
    /// Column index into `span` of each retained vector, `[j][mu]`.
    slots: Vec<[Option<usize>; 2]>,
    /// `(j, mu)` pairs removed by Gram-Schmidt.
    pub dropped: Vec<(usize, usize)>,
    span: CMatrix,
}

impl ErrorSubspaces {
    /// `dim x ds` matrix with the retained vectors as columns.
    pub fn span(&self) -> &CMatrix {
        &self.span
    }

    pub fn span_dim(&self) -> usize {
        self.span.ncols()
    }

    pub fn n_kraus(&self) -> usize {
        self.slots.len()
    }

    /// Retained vector for Kraus index `j` and codeword `mu`.
    pub fn vector(&self, j: usize, mu: usize) -> Option<CVector> {
        self.slots[j][mu].map(|c| self.span.column(c).into_owned())
    }

    /// `P_span`.
    pub fn projector(&self) -> CMatrix {
        &self.span * self.span.adjoint()
    }
}

pub fn error_subspaces(code: &CodePair, k: &KrausSet, drop_tol: f64) -> Result<ErrorSubspaces> {
    if k.dim() != code.dim() {
        return Err(Error::DimensionMismatch {
            expected: code.dim(),
            found: k.dim(),
        });
    }
    let vectors: Vec<CVector> = k
        .ops()
        .iter()
        .flat_map(|op| (0..2).map(move |mu| op * code.codeword(mu).amplitudes()))
        .collect();
    let ortho = gram_schmidt(&vectors, drop_tol)?;
    if ortho.basis.is_empty() {
        return Err(Error::DegenerateChannel);
    }
    let mut slots = vec![[None, None]; k.len()];
    for (col, &idx) in ortho.kept.iter().enumerate() {
        slots[idx / 2][idx % 2] = Some(col);
    }
    let dropped = ortho.dropped.iter().map(|&idx| (idx / 2, idx % 2)).collect();
    Ok(ErrorSubspaces {
        slots,
        dropped,
        span: CMatrix::from_columns(&ortho.basis),
    })
}

/// Recovery basis `B_I`, composite index `I = (j, m)`, `j` major.
///
/// For a full pair `(p0, p1)` the four members are
/// `|0><p0| + |1><p1|`, `|0><p1| + |1><p0|`, `i|0><p1| - i|1><p0|` and
/// `|0><p0| - |1><p1|`. A pair with one vector `p` dropped keeps only
/// `|0><p|` and `|1><p|`.
#[derive(Debug, Clone)]
pub struct RecoveryBasis {
    labels: Vec<(usize, usize)>,
    logical: Vec<CMatrix>,
    span: CMatrix,
    encoder: CMatrix,
}

impl RecoveryBasis {
    pub fn len(&self) -> usize {
        self.logical.len()
    }

    pub fn is_empty(&self) -> bool {
        self.logical.is_empty()
    }

    /// `(j, m)` with `m` in `1..=4`.
    pub fn labels(&self) -> &[(usize, usize)] {
        &self.labels
    }

    pub fn span_dim(&self) -> usize {
        self.span.ncols()
    }

    /// `V^dag B_I E`, a `2 x ds` matrix.
    pub fn logical(&self, i: usize) -> &CMatrix {
        &self.logical[i]
    }

    /// `B_I` on the full truncated space.
    pub fn operator(&self, i: usize) -> CMatrix {
        &self.encoder * &self.logical[i] * self.span.adjoint()
    }

    pub fn operators(&self) -> Vec<CMatrix> {
        (0..self.len()).map(|i| self.operator(i)).collect()
    }

    /// `E^dag B_I^dag B_J E`.
    fn gram(&self, i: usize, j: usize) -> CMatrix {
        self.logical[i].adjoint() * &self.logical[j]
    }

    /// `sum_IJ X_IJ E^dag B_I^dag B_J E`.
    pub fn completeness(&self, x: &CMatrix) -> CMatrix {
        let ds = self.span_dim();
        let mut acc = CMatrix::zeros(ds, ds);
        for i in 0..self.len() {
            for j in 0..self.len() {
                acc += self.gram(i, j) * x[(i, j)];
            }
        }
        acc
    }

    /// `||sum_IJ X_IJ B_I^dag B_J - P_span||_F`.
    pub fn tp_residual(&self, x: &CMatrix) -> f64 {
        let ds = self.span_dim();
        (self.completeness(x) - CMatrix::identity(ds, ds)).norm()
    }
}

pub fn b_operators(code: &CodePair, subs: &ErrorSubspaces) -> Result<RecoveryBasis> {
    if subs.span.nrows() != code.dim() {
        return Err(Error::DimensionMismatch {
            expected: code.dim(),
            found: subs.span.nrows(),
        });
    }
    let ds = subs.span_dim();
    let one = c64(1.0, 0.0);
    let i = c64(0.0, 1.0);
    let entry = |cells: &[(usize, usize, Complex64)]| {
        let mut b = CMatrix::zeros(2, ds);
        for &(row, col, v) in cells {
            b[(row, col)] = v;
        }
        b
    };
    let mut labels = Vec::new();
    let mut logical = Vec::new();
    for (j, slot) in subs.slots.iter().enumerate() {
        match *slot {
            [Some(a0), Some(a1)] => {
                logical.push(entry(&[(0, a0, one), (1, a1, one)]));
                logical.push(entry(&[(0, a1, one), (1, a0, one)]));
                logical.push(entry(&[(0, a1, i), (1, a0, -i)]));
                logical.push(entry(&[(0, a0, one), (1, a1, -one)]));
                labels.extend((1..=4).map(|m| (j, m)));
            }
            [Some(a), None] | [None, Some(a)] => {
                logical.push(entry(&[(0, a, one)]));
                logical.push(entry(&[(1, a, one)]));
                labels.extend([(j, 1), (j, 2)]);
            }
            [None, None] => {}
        }
    }
    Ok(RecoveryBasis {
        labels,
        logical,
        span: subs.span.clone(),
        encoder: code.encoder(),
    })
}

/// `t_{Il} = tr(V^dag B_I K_l V)`.
fn basis_traces(basis: &RecoveryBasis, k: &KrausSet, code: &CodePair) -> Result<CMatrix> {
    if k.dim() != code.dim() || basis.span.nrows() != code.dim() {
        return Err(Error::DimensionMismatch {
            expected: code.dim(),
            found: k.dim(),
        });
    }
    let v = code.encoder();
    let e_adj = basis.span.adjoint();
    let images: Vec<CMatrix> = k.ops().iter().map(|op| &e_adj * op * &v).collect();
    Ok(CMatrix::from_fn(basis.len(), k.len(), |i, l| {
        (basis.logical(i) * &images[l]).trace()
    }))
}

/// `W_IJ = sum_l t_Il conj(t_Jl)`.
pub fn process_matrix(basis: &RecoveryBasis, k: &KrausSet, code: &CodePair) -> Result<CMatrix> {
    let t = basis_traces(basis, k, code)?;
    Ok(&t * t.adjoint())
}

/// Solution of the recovery program.
#[derive(Debug, Clone)]
pub struct RecoveryChoi {
    /// `X_IJ = sum_r x_rI conj(x_rJ)` over the recovery basis.
    pub x: CMatrix,
    /// `Tr(X W) / 4`.
    pub fidelity: f64,
    pub duality_gap: f64,
    pub tp_residual: f64,
    pub iterations: usize,
}

impl RecoveryChoi {
    pub fn infidelity(&self) -> f64 {
        1.0 - self.fidelity
    }
}

/// Maximizes `Tr(X W) / 4` subject to `sum X_IJ B_I^dag B_J = P_span`,
/// `X >= 0`.
///
/// The program is solved for the Choi matrix `J = Bt conj(X) Bt^dag` of the
/// recovery in logical-by-span coordinates, where column `I` of `Bt` is the
/// flattened `V^dag B_I E`. There the constraint reads `Tr_L J = I`.
pub fn solve_recovery_sdp(w: &CMatrix, basis: &RecoveryBasis, tol: f64) -> Result<RecoveryChoi> {
    let n = basis.len();
    if w.nrows() != n || w.ncols() != n {
        return Err(Error::ShapeMismatch(format!(
            "process matrix is {}x{}, basis has {n} elements",
            w.nrows(),
            w.ncols()
        )));
    }
    let ds = basis.span_dim();
    let big = 2 * ds;
    let bt = CMatrix::from_fn(big, n, |row, i| basis.logical(i)[(row / ds, row % ds)]);
    let d_inv: Vec<f64> = (0..n).map(|i| 1.0 / basis.gram(i, i).trace().re).collect();
    let scaled = |m: &CMatrix| CMatrix::from_fn(n, n, |i, j| m[(i, j)] * (d_inv[i] * d_inv[j]));
    let c = hermitian_part(&(&bt * scaled(&w.map(|v| v.conj())) * bt.adjoint())) * c64(0.25, 0.0);

    let cons = PartialTraceIdentity::new(2, ds);
    let t = 1.0 + c.norm();
    let mut y0 = vec![0.0; cons.rhs().len()];
    y0[..ds].fill(t);
    let start = SdpStart {
        x: CMatrix::identity(big, big) * c64(0.5, 0.0),
        y: y0,
        z: CMatrix::identity(big, big) * c64(t, 0.0) - &c,
    };
    let opts = SdpOptions {
        accept_gap: tol,
        ..SdpOptions::default()
    };
    let sol = sdp::solve(&c, &cons, Some(start), &opts)?;
    let x = hermitian_part(&scaled(&(bt.adjoint() * &sol.x * &bt)).map(|v| v.conj()));
    let tp_residual = basis.tp_residual(&x);
    Ok(RecoveryChoi {
        fidelity: sol.primal_objective,
        duality_gap: sol.gap,
        tp_residual,
        iterations: sol.iterations,
        x,
    })
}

/// Coefficients `c_rI` with `R_r = sum_I c_rI B_I`, one row per retained
/// eigenvalue of `X`.
pub fn recovery_coefficients(choi: &RecoveryChoi) -> Vec<CVector> {
    let eig = SymmetricEigen::new(hermitian_part(&choi.x));
    let lambda_max = eig.eigenvalues.max();
    let mut out = Vec::new();
    for (r, &d) in eig.eigenvalues.iter().enumerate() {
        if d > KRAUS_EIGEN_CUT * lambda_max && d > 0.0 {
            let col = eig.eigenvectors.column(r);
            out.push(CVector::from_iterator(
                col.len(),
                col.iter().map(|v| v.conj() * d.sqrt()),
            ));
        }
    }
    out
}

/// `R_r = sqrt(d_r) sum_I conj(V_Ir) B_I` from `X = V D V^dag`.
pub fn extract_recovery_kraus(choi: &RecoveryChoi, basis: &RecoveryBasis) -> Result<Vec<CMatrix>> {
    if choi.x.nrows() != basis.len() {
        return Err(Error::DimensionMismatch {
            expected: basis.len(),
            found: choi.x.nrows(),
        });
    }
    let ops = basis.operators();
    Ok(recovery_coefficients(choi)
        .into_iter()
        .map(|coef| {
            ops.iter().zip(coef.iter()).fold(
                CMatrix::zeros(basis.encoder.nrows(), basis.encoder.nrows()),
                |acc, (b, c)| acc + b * *c,
            )
        })
        .collect())
}

fn check_recovery_dims(recovery: &[CMatrix], k: &KrausSet, code: &CodePair) -> Result<()> {
    for r in recovery.iter().map(|r| r.nrows()).chain([k.dim()]) {
        if r != code.dim() {
            return Err(Error::DimensionMismatch {
                expected: code.dim(),
                found: r,
            });
        }
    }
    Ok(())
}

/// `1/4 sum_{r,j} |tr(V^dag R_r K_j V)|^2`.
pub fn channel_fidelity(recovery: &[CMatrix], k: &KrausSet, code: &CodePair) -> Result<f64> {
    check_recovery_dims(recovery, k, code)?;
    let images: Vec<[CVector; 2]> = k
        .ops()
        .iter()
        .map(|op| [op * code.zero().amplitudes(), op * code.one().amplitudes()])
        .collect();
    let mut total = 0.0;
    for r in recovery {
        let r_adj_code = [
            r.adjoint() * code.zero().amplitudes(),
            r.adjoint() * code.one().amplitudes(),
        ];
        for img in &images {
            let tr = r_adj_code[0].dotc(&img[0]) + r_adj_code[1].dotc(&img[1]);
            total += tr.norm_sqr();
        }
    }
    Ok(0.25 * total)
}

/// Logical Choi matrix of `R o N`:
/// `[X_Q]_{[mu,a],[nu,b]} = <a_L| Q(|mu_L><nu_L|) |b_L>`.
pub fn logical_choi(recovery: &[CMatrix], k: &KrausSet, code: &CodePair) -> Result<CMatrix> {
    check_recovery_dims(recovery, k, code)?;
    let mut choi = CMatrix::zeros(4, 4);
    for r in recovery {
        let r_adj_code = [
            r.adjoint() * code.zero().amplitudes(),
            r.adjoint() * code.one().amplitudes(),
        ];
        for op in k.ops() {
            // amp[mu][a] = <a_L| R K |mu_L>
            let amp: Vec<[Complex64; 2]> = (0..2)
                .map(|mu| {
                    let img = op * code.codeword(mu).amplitudes();
                    [r_adj_code[0].dotc(&img), r_adj_code[1].dotc(&img)]
                })
                .collect();
            for mu in 0..2 {
                for a in 0..2 {
                    for nu in 0..2 {
                        for b in 0..2 {
                            choi[(2 * mu + a, 2 * nu + b)] += amp[mu][a] * amp[nu][b].conj();
                        }
                    }
                }
            }
        }
    }
    Ok(choi)
}

/// Entanglement fidelity `1/4 sum_{mu,nu} [X_Q]_{[mu,mu],[nu,nu]}` from the
/// logical Choi matrix.
pub fn choi_fidelity(recovery: &[CMatrix], k: &KrausSet, code: &CodePair) -> Result<f64> {
    let choi = logical_choi(recovery, k, code)?;
    let mut total = Complex64::ZERO;
    for mu in 0..2 {
        for nu in 0..2 {
            total += choi[(3 * mu, 3 * nu)];
        }
    }
    Ok(0.25 * total.re)
}

/// Everything produced by one optimal-recovery run.
#[derive(Debug, Clone)]
pub struct OptimalRecovery {
    pub subspaces: ErrorSubspaces,
    pub basis: RecoveryBasis,
    pub w: CMatrix,
    pub choi: RecoveryChoi,
}

impl OptimalRecovery {
    pub fn fidelity(&self) -> f64 {
        self.choi.fidelity
    }

    pub fn kraus(&self) -> Result<Vec<CMatrix>> {
        extract_recovery_kraus(&self.choi, &self.basis)
    }
}

/// Subspaces, basis, process matrix and SDP in one call.
pub fn optimal_recovery(code: &CodePair, k: &KrausSet, drop_tol: f64, tol: f64) -> Result<OptimalRecovery> {
    let subspaces = error_subspaces(code, k, drop_tol)?;
    let basis = b_operators(code, &subspaces)?;
    let w = process_matrix(&basis, k, code)?;
    let choi = solve_recovery_sdp(&w, &basis, tol)?;
    Ok(OptimalRecovery {
        subspaces,
        basis,
        w,
        choi,
    })
}
