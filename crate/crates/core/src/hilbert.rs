//! Dense linear algebra on the truncated Fock space.
//!
//! Every operator is a `dim x dim` complex matrix over Fock levels `0..dim`.
//! The truncation dimension is always passed explicitly; nothing here keeps
//! global state.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix on the truncated space.
pub type CMatrix = DMatrix<Complex64>;
/// Dense complex column vector on the truncated space.
pub type CVector = DVector<Complex64>;
/// Kraus operators, squeeze/displacement operators, density matrices.
pub type OperatorMatrix = CMatrix;

/// Eigenvalues in `[-PSD_CLIP * lambda_max, 0)` are treated as zero.
pub const PSD_CLIP: f64 = 1e-10;
/// Eigenvalues below `-NOT_PSD * lambda_max` are reported as an error.
pub const NOT_PSD: f64 = 1e-8;
/// Default relative cut for the pseudo-inverse square root.
pub const DEFAULT_PINV_REL_TOL: f64 = 1e-12;

const HERMITIAN_TOL: f64 = 1e-10;
const UNITARY_TOL: f64 = 1e-10;

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::InvalidDimension { dim, min: 2 });
    }
    Ok(())
}

fn check_square(m: &CMatrix, what: &str) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::ShapeMismatch(format!(
            "{what} must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// Ladder operator with `a[(n-1, n)] = sqrt(n)`.
pub fn annihilation(dim: usize) -> Result<CMatrix> {
    check_dim(dim)?;
    let mut a = CMatrix::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = c64((n as f64).sqrt(), 0.0);
    }
    Ok(a)
}

pub fn creation(dim: usize) -> Result<CMatrix> {
    Ok(annihilation(dim)?.adjoint())
}

/// `diag(0, 1, ..., dim - 1)`.
pub fn number(dim: usize) -> Result<CMatrix> {
    check_dim(dim)?;
    Ok(CMatrix::from_diagonal(&CVector::from_fn(dim, |n, _| {
        c64(n as f64, 0.0)
    })))
}

pub fn identity(dim: usize) -> Result<CMatrix> {
    check_dim(dim)?;
    Ok(CMatrix::identity(dim, dim))
}

/// Diagonal operator with entries `f(n)` on Fock level `n`.
pub fn fock_diagonal(dim: usize, f: impl Fn(usize) -> f64) -> Result<CMatrix> {
    check_dim(dim)?;
    Ok(CMatrix::from_diagonal(&CVector::from_fn(dim, |n, _| c64(f(n), 0.0))))
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// `||M - M^dag||_F`.
pub fn hermitian_asymmetry(m: &CMatrix) -> f64 {
    (m - m.adjoint()).norm()
}

/// `(M + M^dag) / 2`.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * c64(0.5, 0.0)
}

/// `<u|v>`, conjugate-linear in the first argument.
pub fn inner(u: &CVector, v: &CVector) -> Complex64 {
    u.dotc(v)
}

/// Kronecker product `A (x) B`, with `A` indexing the outer blocks.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = CMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let s = a[(i, j)];
            if s == Complex64::ZERO {
                continue;
            }
            out.view_mut((i * br, j * bc), (br, bc)).copy_from(&(b * s));
        }
    }
    out
}

/// Matrix exponential by scaling and squaring with a Pade approximant.
///
/// Anti-Hermitian input must come back unitary to `1e-10` in Frobenius
/// norm; anything else is reported as a numeric failure.
pub fn matrix_exponential(m: &CMatrix) -> Result<CMatrix> {
    check_square(m, "exponent")?;
    if !is_finite(m) {
        return Err(Error::NumericFailure {
            context: "matrix exponential input",
            residual: f64::NAN,
        });
    }
    let e = m.exp();
    if !is_finite(&e) {
        return Err(Error::NumericFailure {
            context: "matrix exponential",
            residual: f64::INFINITY,
        });
    }
    let scale = m.norm().max(1.0);
    if (m + m.adjoint()).norm() <= 1e-12 * scale {
        let n = m.nrows();
        let residual = (e.adjoint() * &e - CMatrix::identity(n, n)).norm();
        if residual > UNITARY_TOL {
            return Err(Error::NumericFailure {
                context: "matrix exponential (unitarity)",
                residual,
            });
        }
    }
    Ok(e)
}

/// `exp(G) v` for a generator given only through its action.
///
/// `norm_bound` must bound `||G||` on the vectors reached. The exponent is
/// split into `ceil(norm_bound)` steps, each summed as a Taylor series until
/// the terms stop contributing at double precision. Suited to banded
/// generators, where a dense exponential would waste work.
pub fn exp_action<F>(apply: F, norm_bound: f64, v: &CVector) -> Result<CVector>
where
    F: Fn(&CVector) -> CVector,
{
    if !norm_bound.is_finite() || norm_bound < 0.0 {
        return Err(Error::ParameterRange {
            name: "norm_bound",
            value: norm_bound,
            reason: "must be finite and non-negative",
        });
    }
    let steps = norm_bound.ceil().max(1.0) as usize;
    let inv_steps = c64(1.0 / steps as f64, 0.0);
    let mut out = v.clone();
    for _ in 0..steps {
        let mut term = out.clone();
        let mut acc = out.clone();
        let mut converged = false;
        for k in 1..=80 {
            term = apply(&term) * (inv_steps / c64(k as f64, 0.0));
            acc += &term;
            let tn = term.norm();
            if tn <= 1e-17 * acc.norm().max(f64::MIN_POSITIVE) || tn == 0.0 {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NumericFailure {
                context: "exp_action Taylor series",
                residual: term.norm(),
            });
        }
        out = acc;
    }
    if out.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NumericFailure {
            context: "exp_action",
            residual: f64::INFINITY,
        });
    }
    Ok(out)
}

/// Eigen-decomposition of a Hermitian, positive semidefinite matrix with
/// round-off negatives clipped. Returns `(eigenvalues, eigenvectors, lambda_max)`.
fn psd_eigen(m: &CMatrix) -> Result<(Vec<f64>, CMatrix, f64)> {
    check_square(m, "PSD matrix")?;
    let asym = hermitian_asymmetry(m);
    if asym > HERMITIAN_TOL * m.norm().max(1.0) {
        return Err(Error::NotHermitian { asymmetry: asym });
    }
    let eig = SymmetricEigen::new(hermitian_part(m));
    let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let lambda_max = values.iter().copied().fold(0.0_f64, f64::max);
    let lambda_min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let floor = if lambda_max > 0.0 {
        -NOT_PSD * lambda_max
    } else {
        -NOT_PSD
    };
    if lambda_min < floor {
        return Err(Error::NotPsd {
            min_eigenvalue: lambda_min,
            max_eigenvalue: lambda_max,
        });
    }
    Ok((values, eig.eigenvectors, lambda_max))
}

fn rebuild(vectors: &CMatrix, values: impl Iterator<Item = f64>) -> CMatrix {
    let mut scaled = vectors.clone();
    for (j, f) in values.enumerate() {
        scaled.column_mut(j).scale_mut(f);
    }
    scaled * vectors.adjoint()
}

/// Moore-Penrose inverse square root of a Hermitian PSD matrix.
///
/// Eigenvalues at or below `rel_tol * lambda_max` map to zero, the rest to
/// `lambda^(-1/2)`.
pub fn hermitian_pinv_sqrt(m: &CMatrix, rel_tol: f64) -> Result<CMatrix> {
    let (values, vectors, lambda_max) = psd_eigen(m)?;
    let cut = rel_tol * lambda_max;
    Ok(rebuild(
        &vectors,
        values
            .into_iter()
            .map(|l| if l <= cut || l <= 0.0 { 0.0 } else { l.powf(-0.5) }),
    ))
}

/// Principal square root of a Hermitian PSD matrix.
pub fn hermitian_sqrt(m: &CMatrix) -> Result<CMatrix> {
    let (values, vectors, _) = psd_eigen(m)?;
    Ok(rebuild(&vectors, values.into_iter().map(|l| l.max(0.0).sqrt())))
}

/// Square matrix addressed by composite indices `[mu, l]`, `mu` outer.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockedMatrix {
    outer_dim: usize,
    inner_dim: usize,
    data: CMatrix,
}

impl BlockedMatrix {
    pub fn new(outer_dim: usize, inner_dim: usize, data: CMatrix) -> Result<Self> {
        let total = outer_dim * inner_dim;
        if outer_dim == 0 || inner_dim == 0 || data.nrows() != total || data.ncols() != total {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} matrix cannot be blocked as {outer_dim} x {inner_dim}",
                data.nrows(),
                data.ncols()
            )));
        }
        Ok(Self {
            outer_dim,
            inner_dim,
            data,
        })
    }

    pub fn outer_dim(&self) -> usize {
        self.outer_dim
    }

    pub fn inner_dim(&self) -> usize {
        self.inner_dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.data
    }

    pub fn into_matrix(self) -> CMatrix {
        self.data
    }

    #[inline]
    pub fn index(&self, outer: usize, inner: usize) -> usize {
        outer * self.inner_dim + inner
    }

    pub fn get(&self, row: (usize, usize), col: (usize, usize)) -> Complex64 {
        self.data[(self.index(row.0, row.1), self.index(col.0, col.1))]
    }
}

/// `(Tr_L A)_{l,k} = sum_mu A_{[mu,l],[mu,k]}`.
pub fn partial_trace_outer(a: &BlockedMatrix) -> CMatrix {
    let r = a.inner_dim;
    let mut out = CMatrix::zeros(r, r);
    for mu in 0..a.outer_dim {
        out += a.data.view((mu * r, mu * r), (r, r));
    }
    out
}

/// Result of [`gram_schmidt`].
#[derive(Debug, Clone)]
pub struct Orthonormalized {
    /// Orthonormal output vectors, in input order.
    pub basis: Vec<CVector>,
    /// For each basis vector, the index of the input it came from.
    pub kept: Vec<usize>,
    /// Inputs whose residual norm fell below the drop tolerance.
    pub dropped: Vec<usize>,
}

/// Modified Gram-Schmidt with one re-orthogonalization pass.
///
/// Inputs whose norm after projection is below `drop_tol` are skipped and
/// listed in `dropped`.
pub fn gram_schmidt(vectors: &[CVector], drop_tol: f64) -> Result<Orthonormalized> {
    let mut out = Orthonormalized {
        basis: Vec::with_capacity(vectors.len()),
        kept: Vec::new(),
        dropped: Vec::new(),
    };
    let Some(first) = vectors.first() else {
        return Ok(out);
    };
    let dim = first.len();
    for (idx, v) in vectors.iter().enumerate() {
        if v.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: v.len(),
            });
        }
        let mut w = v.clone();
        for _pass in 0..2 {
            for q in &out.basis {
                let c = q.dotc(&w);
                w.axpy(-c, q, c64(1.0, 0.0));
            }
        }
        let norm = w.norm();
        if norm < drop_tol || norm == 0.0 {
            out.dropped.push(idx);
            continue;
        }
        w.unscale_mut(norm);
        out.basis.push(w);
        out.kept.push(idx);
    }
    Ok(out)
}
