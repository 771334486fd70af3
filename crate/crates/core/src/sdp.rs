//! Small dense semidefinite programs over complex Hermitian matrices.
//!
//! Primal: maximize `Re Tr(C X)` subject to `A(X) = b`, `X >= 0`, where
//! `A(X)_k = Re Tr(A_k X)` for Hermitian `A_k`.
//! Dual: minimize `b . y` subject to `Z = A^*(y) - C >= 0`.
//!
//! Primal-dual path following with the HKM search direction and a Mehrotra
//! predictor-corrector step. The constraint operator is abstract so that
//! structured constraints can supply their own Schur complement.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{c64, hermitian_part, CMatrix};

/// Linear constraint operator `A` with right-hand side `b`.
pub trait Constraints {
    /// Side length of the matrix variable.
    fn dim(&self) -> usize;
    fn rhs(&self) -> &[f64];
    /// `Re Tr(A_k G)` for every `k`; `G` need not be Hermitian.
    fn apply(&self, g: &CMatrix) -> Vec<f64>;
    /// `sum_k y_k A_k`.
    fn adjoint(&self, y: &[f64]) -> CMatrix;
    /// `M_kl = Re Tr(A_k X A_l Z^-1)`.
    fn schur(&self, x: &CMatrix, z_inv: &CMatrix) -> DMatrix<f64>;
}

/// Explicit list of constraint matrices.
#[derive(Debug, Clone)]
pub struct DenseConstraints {
    pub matrices: Vec<CMatrix>,
    pub b: Vec<f64>,
}

impl DenseConstraints {
    pub fn new(matrices: Vec<CMatrix>, b: Vec<f64>) -> Result<Self> {
        if matrices.len() != b.len() || matrices.is_empty() {
            return Err(Error::ShapeMismatch(format!(
                "{} constraint matrices for {} right-hand sides",
                matrices.len(),
                b.len()
            )));
        }
        let n = matrices[0].nrows();
        if matrices.iter().any(|a| a.nrows() != n || a.ncols() != n) {
            return Err(Error::ShapeMismatch("constraint matrices differ in size".into()));
        }
        Ok(Self { matrices, b })
    }
}

impl Constraints for DenseConstraints {
    fn dim(&self) -> usize {
        self.matrices[0].nrows()
    }

    fn rhs(&self) -> &[f64] {
        &self.b
    }

    fn apply(&self, g: &CMatrix) -> Vec<f64> {
        self.matrices.iter().map(|a| tr_prod(a, g).re).collect()
    }

    fn adjoint(&self, y: &[f64]) -> CMatrix {
        let n = self.dim();
        self.matrices
            .iter()
            .zip(y)
            .fold(CMatrix::zeros(n, n), |acc, (a, &yk)| acc + a * c64(yk, 0.0))
    }

    fn schur(&self, x: &CMatrix, z_inv: &CMatrix) -> DMatrix<f64> {
        let m = self.matrices.len();
        let mut schur = DMatrix::<f64>::zeros(m, m);
        for l in 0..m {
            let t = x * &self.matrices[l] * z_inv;
            for k in 0..m {
                schur[(k, l)] = tr_prod(&self.matrices[k], &t).re;
            }
        }
        schur
    }
}

/// Real orthonormal basis of `d x d` Hermitian matrices: the diagonal units,
/// then for each `a < b` the pair `(E_ab + E_ba)/sqrt2`, `i(E_ab - E_ba)/sqrt2`.
/// Element `k` is stored as its nonzero entries `(row, col, value)`.
#[derive(Debug, Clone)]
pub struct HermitianBasis {
    d: usize,
    elements: Vec<Vec<(usize, usize, Complex64)>>,
}

impl HermitianBasis {
    pub fn new(d: usize) -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut elements: Vec<_> = (0..d).map(|a| vec![(a, a, c64(1.0, 0.0))]).collect();
        for a in 0..d {
            for b in a + 1..d {
                elements.push(vec![(a, b, c64(h, 0.0)), (b, a, c64(h, 0.0))]);
                elements.push(vec![(a, b, c64(0.0, h)), (b, a, c64(0.0, -h))]);
            }
        }
        Self { d, elements }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// `Tr(H_k g)` for every `k`.
    pub fn coordinates(&self, g: &CMatrix) -> Vec<Complex64> {
        self.elements
            .iter()
            .map(|e| e.iter().map(|&(a, b, h)| h * g[(b, a)]).sum())
            .collect()
    }

    /// `sum_k y_k H_k`.
    pub fn combine(&self, y: &[f64]) -> CMatrix {
        let mut out = CMatrix::zeros(self.d, self.d);
        for (e, &yk) in self.elements.iter().zip(y) {
            for &(a, b, h) in e {
                out[(a, b)] += h * yk;
            }
        }
        out
    }
}

/// `Tr_outer X = I` for a variable with composite index `[mu, a]`, `mu`
/// outer of size `outer`, `a` inner of size `inner`. One real constraint per
/// element of the inner [`HermitianBasis`].
#[derive(Debug, Clone)]
pub struct PartialTraceIdentity {
    outer: usize,
    inner: usize,
    basis: HermitianBasis,
    b: Vec<f64>,
}

impl PartialTraceIdentity {
    pub fn new(outer: usize, inner: usize) -> Self {
        let basis = HermitianBasis::new(inner);
        let b = (0..basis.len()).map(|k| if k < inner { 1.0 } else { 0.0 }).collect();
        Self { outer, inner, basis, b }
    }

    /// `(Tr_outer G)_{ab} = sum_mu G_{[mu,a],[mu,b]}`.
    pub fn partial_trace(&self, g: &CMatrix) -> CMatrix {
        let d = self.inner;
        let mut out = CMatrix::zeros(d, d);
        for mu in 0..self.outer {
            out += g.view((mu * d, mu * d), (d, d));
        }
        out
    }
}

impl Constraints for PartialTraceIdentity {
    fn dim(&self) -> usize {
        self.outer * self.inner
    }

    fn rhs(&self) -> &[f64] {
        &self.b
    }

    fn apply(&self, g: &CMatrix) -> Vec<f64> {
        self.basis
            .coordinates(&self.partial_trace(g))
            .into_iter()
            .map(|c| c.re)
            .collect()
    }

    fn adjoint(&self, y: &[f64]) -> CMatrix {
        crate::hilbert::kron(&CMatrix::identity(self.outer, self.outer), &self.basis.combine(y))
    }

    fn schur(&self, x: &CMatrix, z_inv: &CMatrix) -> DMatrix<f64> {
        // S[(a,b),(c,d)] = Tr((I (x) E_ab) X (I (x) E_cd) Z^-1)
        //               = sum_{mu,nu} X[(mu,b),(nu,c)] Z^-1[(nu,d),(mu,a)]
        let d = self.inner;
        let d2 = d * d;
        let mut s = CMatrix::zeros(d2, d2);
        for mu in 0..self.outer {
            for nu in 0..self.outer {
                let xb = x.view((mu * d, nu * d), (d, d));
                let zb = z_inv.view((nu * d, mu * d), (d, d));
                for a in 0..d {
                    for b in 0..d {
                        for c in 0..d {
                            let xv = xb[(b, c)];
                            for e in 0..d {
                                s[(a * d + b, c * d + e)] += xv * zb[(e, a)];
                            }
                        }
                    }
                }
            }
        }
        let m = self.basis.len();
        let mut schur = DMatrix::<f64>::zeros(m, m);
        for (k, ek) in self.basis.elements.iter().enumerate() {
            for (l, el) in self.basis.elements.iter().enumerate().skip(k) {
                let mut acc = Complex64::ZERO;
                for &(a, b, hk) in ek {
                    for &(c, e, hl) in el {
                        acc += hk * hl * s[(a * d + b, c * d + e)];
                    }
                }
                schur[(k, l)] = acc.re;
                schur[(l, k)] = acc.re;
            }
        }
        schur
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SdpOptions {
    /// Iteration stops once gap and residuals fall below these.
    pub gap_target: f64,
    pub feasibility_target: f64,
    /// A run that stalls returns its best iterate when that iterate's gap and
    /// residuals are below this.
    pub accept_gap: f64,
    pub max_iterations: usize,
    pub step_fraction: f64,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self {
            gap_target: 1e-10,
            feasibility_target: 1e-10,
            accept_gap: 1e-7,
            max_iterations: 120,
            step_fraction: 0.95,
        }
    }
}

/// Initial iterate; `z` should equal `A^*(y) - C` for a dual-feasible start.
#[derive(Debug, Clone)]
pub struct SdpStart {
    pub x: CMatrix,
    pub y: Vec<f64>,
    pub z: CMatrix,
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub x: CMatrix,
    pub y: Vec<f64>,
    pub z: CMatrix,
    pub primal_objective: f64,
    pub dual_objective: f64,
    /// `|dual - primal|`.
    pub gap: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub iterations: usize,
}

/// `Tr(a b)`.
fn tr_prod(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = Complex64::ZERO;
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// Largest `alpha <= 1` keeping `x + alpha d` positive definite, scaled by
/// `fraction` when the boundary is hit.
fn step_length(x: &CMatrix, d: &CMatrix, fraction: f64) -> f64 {
    let Some(chol) = x.clone().cholesky() else {
        return 0.0;
    };
    let l = chol.l();
    let Some(l_inv) = l.clone().try_inverse() else {
        return 0.0;
    };
    let s = hermitian_part(&(&l_inv * d * l_inv.adjoint()));
    let min = s.symmetric_eigenvalues().min();
    if min >= 0.0 {
        1.0
    } else {
        (fraction * (-1.0 / min)).min(1.0)
    }
}

fn solve_real(m: &DMatrix<f64>, rhs: &[f64]) -> Option<Vec<f64>> {
    let v = nalgebra::DVector::from_column_slice(rhs);
    if let Some(ch) = m.clone().cholesky() {
        return Some(ch.solve(&v).iter().copied().collect());
    }
    m.clone().lu().solve(&v).map(|s| s.iter().copied().collect())
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn solve(c: &CMatrix, cons: &dyn Constraints, start: Option<SdpStart>, opts: &SdpOptions) -> Result<SdpSolution> {
    let n = cons.dim();
    if c.nrows() != n || c.ncols() != n {
        return Err(Error::ShapeMismatch(format!(
            "objective is {}x{}, constraints act on {n}x{n}",
            c.nrows(),
            c.ncols()
        )));
    }
    let b = cons.rhs();
    let SdpStart { mut x, mut y, mut z } = start.unwrap_or_else(|| SdpStart {
        x: CMatrix::identity(n, n),
        y: vec![0.0; b.len()],
        z: CMatrix::identity(n, n) * c64(1.0 + c.norm(), 0.0),
    });
    let b_scale = 1.0 + norm(b);
    let c_scale = 1.0 + c.norm();
    let identity = CMatrix::identity(n, n);

    let mut iterations = 0;
    let mut best: Option<(f64, SdpSolution)> = None;
    let mut since_best = 0;
    loop {
        let ax = cons.apply(&x);
        let rp: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let rd = c - cons.adjoint(&y) + &z;
        let pobj = tr_prod(c, &x).re;
        let dobj: f64 = b.iter().zip(&y).map(|(b, y)| b * y).sum();
        let complementarity = tr_prod(&x, &z).re;
        let p_res = norm(&rp) / b_scale;
        let d_res = rd.norm() / c_scale;
        let gap = (dobj - pobj).abs();

        let done = complementarity <= opts.gap_target
            && gap <= opts.gap_target
            && p_res <= opts.feasibility_target
            && d_res <= opts.feasibility_target;
        let current = SdpSolution {
            x: x.clone(),
            y: y.clone(),
            z: z.clone(),
            primal_objective: pobj,
            dual_objective: dobj,
            gap,
            primal_residual: p_res,
            dual_residual: d_res,
            iterations,
        };
        if done {
            return Ok(current);
        }
        let merit = gap.max(complementarity.abs()).max(p_res).max(d_res);
        if best.as_ref().is_none_or(|(m, _)| merit < *m) {
            best = Some((merit, current));
            since_best = 0;
        } else {
            since_best += 1;
        }
        let give_up = |best: Option<(f64, SdpSolution)>| -> Result<SdpSolution> {
            let (_, sol) = best.expect("at least one iterate recorded");
            if sol.gap <= opts.accept_gap
                && sol.primal_residual <= opts.accept_gap
                && sol.dual_residual <= opts.accept_gap
            {
                Ok(sol)
            } else {
                Err(Error::SolverFailure {
                    iterations,
                    primal_residual: sol.primal_residual,
                    dual_residual: sol.dual_residual,
                    gap: sol.gap,
                })
            }
        };
        if iterations >= opts.max_iterations || since_best >= 5 {
            return give_up(best);
        }

        let mu = complementarity / n as f64;
        let Some(z_inv) = z.clone().try_inverse() else {
            return give_up(best);
        };
        let z_inv = hermitian_part(&z_inv);

        let schur = cons.schur(&x, &z_inv);
        let schur = (&schur + schur.transpose()) * 0.5;
        let x_rd = &x * &rd;

        let direction = |rc: &CMatrix| -> Option<(CMatrix, Vec<f64>, CMatrix)> {
            let g = (rc + &x_rd) * &z_inv;
            let rhs: Vec<f64> = cons.apply(&g).iter().zip(&rp).map(|(a, r)| a - r).collect();
            let dy = solve_real(&schur, &rhs)?;
            let dz = cons.adjoint(&dy) - &rd;
            let dx = hermitian_part(&((rc - &x * &dz) * &z_inv));
            Some((dx, dy, dz))
        };

        let xz = &x * &z;
        let Some((dx_a, _, dz_a)) = direction(&(-&xz)) else {
            return give_up(best);
        };
        let ap = step_length(&x, &dx_a, 1.0);
        let ad = step_length(&z, &dz_a, 1.0);
        let mu_aff = tr_prod(&(&x + &dx_a * c64(ap, 0.0)), &(&z + &dz_a * c64(ad, 0.0))).re / n as f64;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        let rc = &identity * c64(sigma * mu, 0.0) - &xz - &dx_a * &dz_a;
        let Some((dx, dy, dz)) = direction(&rc) else {
            return give_up(best);
        };
        let ap = step_length(&x, &dx, opts.step_fraction);
        let ad = step_length(&z, &dz, opts.step_fraction);
        if ap < 1e-12 && ad < 1e-12 {
            return give_up(best);
        }
        x = hermitian_part(&(&x + &dx * c64(ap, 0.0)));
        for (yk, dyk) in y.iter_mut().zip(&dy) {
            *yk += ad * dyk;
        }
        z = hermitian_part(&(&z + &dz * c64(ad, 0.0)));
        iterations += 1;
    }
}
