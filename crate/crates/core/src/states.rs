//! Codeword construction: Fock, squeezed Fock and squeezed cat states, the
//! analytic overlap formulas for squeezed Fock pairs, and the parameter
//! solvers that pin the codewords to a common mean photon number.
//!
//! Conventions:
//! * `S(r) = exp((r/2)(a^2 - a^dag^2))`, so `r > 0` narrows the x quadrature
//!   and `<x|S(r)|n>` is `exp(-e^{2r} x^2 / 2) H_n(e^r x)` up to normalization.
//! * `|alpha, r> = D(alpha) S(r)|0>`: a squeezed vacuum displaced by `alpha`.
//!   With real `alpha` the two cat components sit on the x axis and their
//!   overlap is `exp(-2 alpha^2 e^{2r})`, which fixes the normalization
//!   `N_pm = sqrt(2 (1 pm exp(-2 |alpha|^2 e^{2r})))`.
//!
//! Physical states are generated on a padded working space and then cut to
//! the requested dimension, so the boundary of the truncated generator never
//! feeds back into the retained amplitudes. The cut is rejected when the
//! mass near or beyond the boundary exceeds [`TAIL_LIMIT`].

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{annihilation, c64, exp_action, matrix_exponential, CMatrix, CVector};

/// Default truncation dimension.
pub const DEFAULT_DIM: usize = 200;
/// Mean photon number shared by all reference codewords.
pub const TARGET_MEAN_PHOTON: f64 = 3.83;
/// Largest squeezing accepted by the constructors.
pub const MAX_SQUEEZING: f64 = 3.0;
/// Largest displacement amplitude accepted by the constructors.
pub const MAX_DISPLACEMENT: f64 = 4.0;
/// Allowed mass in the last [`TAIL_WINDOW`] Fock levels (plus anything cut).
pub const TAIL_LIMIT: f64 = 1e-8;
pub const TAIL_WINDOW: usize = 10;
/// Codewords must satisfy `|<0_L|1_L>| < ORTHOGONALITY_TOL`.
pub const ORTHOGONALITY_TOL: f64 = 1e-8;

const ROOT_SCAN_STEP: f64 = 0.05;
const ROOT_XTOL: f64 = 1e-12;
const NORM_TOL: f64 = 1e-10;

/// Normalized amplitude vector over Fock levels `0..dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: CVector,
}

impl StateVector {
    /// Wraps `amps` after normalizing it.
    pub fn from_amplitudes(amps: CVector) -> Result<Self> {
        if amps.len() < 2 {
            return Err(Error::InvalidDimension {
                dim: amps.len(),
                min: 2,
            });
        }
        let norm = amps.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::NumericFailure {
                context: "state normalization",
                residual: norm,
            });
        }
        Ok(Self {
            amps: amps.unscale(norm),
        })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    pub fn into_amplitudes(self) -> CVector {
        self.amps
    }

    /// Probability mass in the top `window` Fock levels.
    pub fn tail_mass(&self, window: usize) -> f64 {
        let start = self.dim().saturating_sub(window);
        self.amps.rows(start, self.dim() - start).norm_squared()
    }

    pub fn is_normalized(&self) -> bool {
        (self.amps.norm() - 1.0).abs() < NORM_TOL
    }
}

/// `<a|b>`.
pub fn overlap(a: &StateVector, b: &StateVector) -> Result<Complex64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(a.amps.dotc(&b.amps))
}

/// `<s|n|s>`.
pub fn mean_photon(s: &StateVector) -> f64 {
    s.amps.iter().enumerate().map(|(n, c)| n as f64 * c.norm_sqr()).sum()
}

pub fn fock(n: usize, dim: usize) -> Result<StateVector> {
    if dim < 2 {
        return Err(Error::InvalidDimension { dim, min: 2 });
    }
    if n >= dim {
        return Err(Error::ParameterRange {
            name: "n",
            value: n as f64,
            reason: "Fock index must be below the truncation dimension",
        });
    }
    let mut amps = CVector::zeros(dim);
    amps[n] = c64(1.0, 0.0);
    Ok(StateVector { amps })
}

fn check_squeezing(r: f64) -> Result<()> {
    if !r.is_finite() || r.abs() > MAX_SQUEEZING {
        return Err(Error::ParameterRange {
            name: "r",
            value: r,
            reason: "|r| must not exceed 3 at the supported cutoffs",
        });
    }
    Ok(())
}

fn check_displacement(alpha: Complex64) -> Result<()> {
    if !alpha.norm().is_finite() || alpha.norm() > MAX_DISPLACEMENT {
        return Err(Error::ParameterRange {
            name: "alpha",
            value: alpha.norm(),
            reason: "|alpha| must not exceed 4 at the supported cutoffs",
        });
    }
    Ok(())
}

/// Dense `S(r)` on the truncated space.
pub fn squeeze_operator(r: f64, dim: usize) -> Result<CMatrix> {
    check_squeezing(r)?;
    let a = annihilation(dim)?;
    let ad = a.adjoint();
    let generator = (&a * &a - &ad * &ad) * c64(0.5 * r, 0.0);
    matrix_exponential(&generator)
}

/// Dense `D(alpha) = exp(alpha a^dag - alpha^* a)` on the truncated space.
pub fn displacement(alpha: Complex64, dim: usize) -> Result<CMatrix> {
    check_displacement(alpha)?;
    let a = annihilation(dim)?;
    let generator = a.adjoint() * alpha - &a * alpha.conj();
    matrix_exponential(&generator)
}

fn working_dim(dim: usize) -> usize {
    dim + dim / 2 + 20
}

/// `S(r) v` through the banded generator `(r/2)(a^2 - a^dag^2)`.
fn squeeze_action(r: f64, v: &CVector) -> Result<CVector> {
    let w = v.len();
    let half = 0.5 * r;
    let apply = |x: &CVector| {
        CVector::from_fn(w, |n, _| {
            let mut acc = Complex64::ZERO;
            if n + 2 < w {
                acc += x[n + 2] * (((n + 1) * (n + 2)) as f64).sqrt();
            }
            if n >= 2 {
                acc -= x[n - 2] * ((n * (n - 1)) as f64).sqrt();
            }
            acc * half
        })
    };
    exp_action(apply, r.abs() * w as f64 / 3.0, v)
}

/// `D(alpha) v` through the banded generator `alpha a^dag - alpha^* a`.
fn displace_action(alpha: Complex64, v: &CVector) -> Result<CVector> {
    let w = v.len();
    let apply = |x: &CVector| {
        CVector::from_fn(w, |n, _| {
            let mut acc = Complex64::ZERO;
            if n >= 1 {
                acc += x[n - 1] * alpha * (n as f64).sqrt();
            }
            if n + 1 < w {
                acc -= x[n + 1] * alpha.conj() * ((n + 1) as f64).sqrt();
            }
            acc
        })
    };
    exp_action(apply, 2.0 * alpha.norm() * (w as f64).sqrt() / 3.0, v)
}

/// Cuts a working-space vector to `dim` levels, checks the tail and
/// normalizes.
fn truncate_physical(v: CVector, dim: usize) -> Result<StateVector> {
    let total = v.norm_squared();
    let kept = v.rows(0, dim).into_owned();
    let cut_mass = ((total - kept.norm_squared()) / total).max(0.0);
    let state = StateVector::from_amplitudes(kept)?;
    let tail = state.tail_mass(TAIL_WINDOW) + cut_mass;
    if tail >= TAIL_LIMIT {
        return Err(Error::Truncation {
            dim,
            tail_mass: tail,
            limit: TAIL_LIMIT,
        });
    }
    Ok(state)
}

fn working_fock(n: usize, w: usize) -> CVector {
    let mut v = CVector::zeros(w);
    v[n] = c64(1.0, 0.0);
    v
}

/// Squeezed Fock state `S(r)|n>`.
pub fn squeezed_fock(r: f64, n: usize, dim: usize) -> Result<StateVector> {
    check_squeezing(r)?;
    if dim < 2 {
        return Err(Error::InvalidDimension { dim, min: 2 });
    }
    if 4 * n >= dim {
        return Err(Error::ParameterRange {
            name: "n",
            value: n as f64,
            reason: "Fock index must stay below dim/4",
        });
    }
    let w = working_dim(dim);
    let v = squeeze_action(r, &working_fock(n, w))?;
    truncate_physical(v, dim)
}

/// Normalized squeezed coherent state `|alpha, r> = D(alpha) S(r)|0>`.
pub fn squeezed_coherent(alpha: Complex64, r: f64, dim: usize) -> Result<StateVector> {
    check_squeezing(r)?;
    check_displacement(alpha)?;
    if dim < 2 {
        return Err(Error::InvalidDimension { dim, min: 2 });
    }
    let w = working_dim(dim);
    let vac = squeeze_action(r, &working_fock(0, w))?;
    truncate_physical(displace_action(alpha, &vac)?, dim)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }
}

/// Relative placement of the cat components and their squeezing.
///
/// With real `alpha`, parallel codes use `r < 0` and perpendicular codes
/// `r > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Orientation {
    Parallel,
    Perpendicular,
}

impl Orientation {
    pub fn of_squeezing(r: f64) -> Self {
        if r < 0.0 {
            Orientation::Parallel
        } else {
            Orientation::Perpendicular
        }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Orientation::Parallel => f.write_str("parallel"),
            Orientation::Perpendicular => f.write_str("perpendicular"),
        }
    }
}

/// Parameters of one squeezed cat state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SscParams {
    pub alpha: f64,
    pub r: f64,
    pub parity: Parity,
    pub orientation: Orientation,
}

impl SscParams {
    pub fn new(alpha: f64, r: f64, parity: Parity) -> Result<Self> {
        let p = Self {
            alpha,
            r,
            parity,
            orientation: Orientation::of_squeezing(r),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha.is_nan() || self.alpha <= 0.0 {
            return Err(Error::ParameterRange {
                name: "alpha",
                value: self.alpha,
                reason: "cat amplitude must be positive",
            });
        }
        check_squeezing(self.r)?;
        check_displacement(c64(self.alpha, 0.0))?;
        let consistent = match self.orientation {
            Orientation::Parallel => self.r <= 0.0,
            Orientation::Perpendicular => self.r >= 0.0,
        };
        if !consistent {
            return Err(Error::ParameterRange {
                name: "r",
                value: self.r,
                reason: "sign of r contradicts the requested orientation",
            });
        }
        Ok(())
    }
}

/// Closed-form `N_pm = sqrt(2 (1 pm exp(-2 alpha^2 e^{2r})))`.
pub fn ssc_normalization(alpha: f64, r: f64, parity: Parity) -> f64 {
    (2.0 * (1.0 + parity.sign() * (-2.0 * alpha * alpha * (2.0 * r).exp()).exp())).sqrt()
}

/// Squeezed cat `(|alpha, r> pm |-alpha, r>) / N_pm`.
pub fn squeezed_cat(p: &SscParams, dim: usize) -> Result<StateVector> {
    p.validate()?;
    if dim < 2 {
        return Err(Error::InvalidDimension { dim, min: 2 });
    }
    let w = working_dim(dim);
    let vac = squeeze_action(p.r, &working_fock(0, w))?;
    let plus = displace_action(c64(p.alpha, 0.0), &vac)?;
    let minus = displace_action(c64(-p.alpha, 0.0), &vac)?;
    let sum = plus + minus * c64(p.parity.sign(), 0.0);
    truncate_physical(sum, dim)
}

/// `<-r, n | r, n>` in closed form for `n` in `{0, 1, 2}`.
pub fn sf_overlap_analytic(n: usize, r: f64) -> Result<f64> {
    let e4 = (4.0 * r).exp();
    match n {
        0 => Ok(2f64.sqrt() * r.exp() / (1.0 + e4).sqrt()),
        1 => Ok((2.0 * r).cosh().powf(-1.5)),
        2 => Ok(-(2f64.sqrt()) * (5.0 * r).exp() * ((4.0 * r).cosh() - 5.0) / (1.0 + e4).powf(2.5)),
        other => Err(Error::UnsupportedOrder(other)),
    }
}

/// Physicists' Hermite polynomial by the three-term recurrence.
pub fn hermite(n: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 2.0 * x);
    if n == 0 {
        return prev;
    }
    for k in 1..n {
        let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Position wavefunction of `S(r)|n>`.
pub fn sf_wavefunction(x: f64, r: f64, n: usize) -> f64 {
    let scale = r.exp();
    let log_fact: f64 = (1..=n).map(|k| (k as f64).ln()).sum();
    let log_norm = 0.5 * (n as f64 * 2f64.ln() + log_fact + 0.5 * PI.ln() - r);
    (-0.5 * scale * scale * x * x).exp() * hermite(n, scale * x) * (-log_norm).exp()
}

/// Scans `[lo, hi]` (either order) in steps of `step` for the first sign
/// change of `f`, then bisects it down to `xtol`.
fn bracket_and_bisect<F>(f: F, lo: f64, hi: f64, step: f64, xtol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let dir = if hi >= lo { 1.0 } else { -1.0 };
    let steps = ((hi - lo).abs() / step).ceil() as usize;
    let mut a = lo;
    let mut fa = f(a)?;
    if fa == 0.0 {
        return Ok(a);
    }
    for k in 1..=steps {
        let b = if k == steps { hi } else { lo + dir * step * k as f64 };
        let fb = f(b)?;
        if fb == 0.0 {
            return Ok(b);
        }
        if fa.signum() != fb.signum() {
            let (mut x0, mut x1, mut f0) = (a, b, fa);
            while (x1 - x0).abs() > xtol {
                let mid = 0.5 * (x0 + x1);
                let fm = f(mid)?;
                if fm == 0.0 {
                    return Ok(mid);
                }
                if fm.signum() == f0.signum() {
                    x0 = mid;
                    f0 = fm;
                } else {
                    x1 = mid;
                }
            }
            return Ok(0.5 * (x0 + x1));
        }
        a = b;
        fa = fb;
    }
    Err(Error::NoSolution { lo, hi })
}

/// Positive squeezing at which `S(r)|2>` and `S(-r)|2>` are orthogonal.
pub fn solve_sf_codeword_r() -> f64 {
    bracket_and_bisect(|r| sf_overlap_analytic(2, r), 1e-3, 1.0, ROOT_SCAN_STEP, ROOT_XTOL)
        .expect("cosh(4r) = 5 has a root in (0, 1)")
}

/// Squeezing `r` for which the even cat of amplitude `alpha` has mean photon
/// number `target_n`. The parallel branch searches `r < 0`, the
/// perpendicular branch `r > 0`.
pub fn solve_ssc_squeezing(alpha: f64, target_n: f64, branch: Orientation, dim: usize) -> Result<f64> {
    let f = |r: f64| -> Result<f64> {
        let p = SscParams {
            alpha,
            r,
            parity: Parity::Even,
            orientation: branch,
        };
        Ok(mean_photon(&squeezed_cat(&p, dim)?) - target_n)
    };
    let (lo, hi) = match branch {
        Orientation::Parallel => (0.0, -MAX_SQUEEZING),
        Orientation::Perpendicular => (0.0, MAX_SQUEEZING),
    };
    bracket_and_bisect(f, lo, hi, ROOT_SCAN_STEP, 1e-10)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CodeFamily {
    SqueezedFock,
    SscParallel,
    SscPerpendicular,
    Custom,
}

/// How to build a [`CodePair`].
#[derive(Debug, Clone)]
pub enum CodeSpec {
    /// `(S(r)|n>, S(-r)|n>)`.
    SqueezedFock {
        r: f64,
        n: usize,
    },
    /// Even and odd squeezed cats sharing `alpha` and `r`.
    SqueezedCat {
        alpha: f64,
        r: f64,
    },
    Custom {
        zero: StateVector,
        one: StateVector,
    },
}

/// Two orthonormal codewords and where they came from.
#[derive(Debug, Clone)]
pub struct CodePair {
    zero: StateVector,
    one: StateVector,
    family: CodeFamily,
    params: BTreeMap<String, f64>,
}

impl CodePair {
    pub fn new(zero: StateVector, one: StateVector, family: CodeFamily, params: BTreeMap<String, f64>) -> Result<Self> {
        let ovl = overlap(&zero, &one)?.norm();
        if ovl >= ORTHOGONALITY_TOL {
            return Err(Error::InvalidCode { overlap: ovl });
        }
        Ok(Self {
            zero,
            one,
            family,
            params,
        })
    }

    pub fn zero(&self) -> &StateVector {
        &self.zero
    }

    pub fn one(&self) -> &StateVector {
        &self.one
    }

    pub fn codeword(&self, mu: usize) -> &StateVector {
        match mu {
            0 => &self.zero,
            _ => &self.one,
        }
    }

    pub fn dim(&self) -> usize {
        self.zero.dim()
    }

    pub fn family(&self) -> CodeFamily {
        self.family
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    /// `dim x 2` isometry whose columns are the codewords.
    pub fn encoder(&self) -> CMatrix {
        CMatrix::from_columns(&[self.zero.amplitudes().clone(), self.one.amplitudes().clone()])
    }

    /// `|0_L><0_L| + |1_L><1_L|`.
    pub fn projector(&self) -> CMatrix {
        let v = self.encoder();
        &v * v.adjoint()
    }

    /// Codeword Gram matrix `m_{mu nu} = <mu_L|nu_L>`.
    pub fn gram(&self) -> CMatrix {
        let v = self.encoder();
        v.adjoint() * v
    }
}

pub fn make_code(spec: CodeSpec, dim: usize) -> Result<CodePair> {
    match spec {
        CodeSpec::SqueezedFock { r, n } => {
            let params = BTreeMap::from([("r".to_string(), r), ("n".to_string(), n as f64)]);
            CodePair::new(
                squeezed_fock(r, n, dim)?,
                squeezed_fock(-r, n, dim)?,
                CodeFamily::SqueezedFock,
                params,
            )
        }
        CodeSpec::SqueezedCat { alpha, r } => {
            let even = SscParams::new(alpha, r, Parity::Even)?;
            let odd = SscParams {
                parity: Parity::Odd,
                ..even
            };
            let family = match even.orientation {
                Orientation::Parallel => CodeFamily::SscParallel,
                Orientation::Perpendicular => CodeFamily::SscPerpendicular,
            };
            let params = BTreeMap::from([("alpha".to_string(), alpha), ("r".to_string(), r)]);
            CodePair::new(squeezed_cat(&even, dim)?, squeezed_cat(&odd, dim)?, family, params)
        }
        CodeSpec::Custom { zero, one } => CodePair::new(zero, one, CodeFamily::Custom, BTreeMap::new()),
    }
}

/// The five codes compared throughout: the second squeezed Fock state and
/// four squeezed cats, all at mean photon number [`TARGET_MEAN_PHOTON`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ReferenceCode {
    SqueezedFock,
    ParallelHalf,
    ParallelOne,
    PerpendicularHalf,
    PerpendicularOne,
}

impl ReferenceCode {
    pub const ALL: [ReferenceCode; 5] = [
        ReferenceCode::SqueezedFock,
        ReferenceCode::ParallelHalf,
        ReferenceCode::ParallelOne,
        ReferenceCode::PerpendicularHalf,
        ReferenceCode::PerpendicularOne,
    ];

    pub const CATS: [ReferenceCode; 4] = [
        ReferenceCode::ParallelHalf,
        ReferenceCode::ParallelOne,
        ReferenceCode::PerpendicularHalf,
        ReferenceCode::PerpendicularOne,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ReferenceCode::SqueezedFock => "sf",
            ReferenceCode::ParallelHalf => "ssc_par_0.5",
            ReferenceCode::ParallelOne => "ssc_par_1.0",
            ReferenceCode::PerpendicularHalf => "ssc_perp_0.5",
            ReferenceCode::PerpendicularOne => "ssc_perp_1.0",
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.label() == label)
    }

    /// Cat amplitude and branch, `None` for the squeezed Fock code.
    pub fn cat_parameters(self) -> Option<(f64, Orientation)> {
        match self {
            ReferenceCode::SqueezedFock => None,
            ReferenceCode::ParallelHalf => Some((0.5, Orientation::Parallel)),
            ReferenceCode::ParallelOne => Some((1.0, Orientation::Parallel)),
            ReferenceCode::PerpendicularHalf => Some((0.5, Orientation::Perpendicular)),
            ReferenceCode::PerpendicularOne => Some((1.0, Orientation::Perpendicular)),
        }
    }

    /// Tabulated squeezing value for this code (two decimals).
    pub fn tabulated_squeezing(self) -> f64 {
        match self {
            ReferenceCode::SqueezedFock => 0.57,
            ReferenceCode::ParallelHalf => -1.41,
            ReferenceCode::ParallelOne => -1.36,
            ReferenceCode::PerpendicularHalf => 1.39,
            ReferenceCode::PerpendicularOne => 1.29,
        }
    }

    /// Squeezing solved at `dim`: the orthogonality root for the squeezed
    /// Fock code, the energy-matching root for the cats.
    pub fn solve_squeezing(self, dim: usize) -> Result<f64> {
        match self.cat_parameters() {
            None => Ok(solve_sf_codeword_r()),
            Some((alpha, branch)) => solve_ssc_squeezing(alpha, TARGET_MEAN_PHOTON, branch, dim),
        }
    }

    pub fn spec_with_squeezing(self, r: f64) -> CodeSpec {
        match self.cat_parameters() {
            None => CodeSpec::SqueezedFock { r, n: 2 },
            Some((alpha, _)) => CodeSpec::SqueezedCat { alpha, r },
        }
    }

    /// Solves the squeezing at `dim` and builds the code there.
    pub fn build(self, dim: usize) -> Result<CodePair> {
        let r = self.solve_squeezing(dim)?;
        make_code(self.spec_with_squeezing(r), dim)
    }
}

impl fmt::Display for ReferenceCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn fock_basics() {
        let f0 = fock(0, 4).unwrap();
        assert_eq!(f0.amplitudes()[0], c64(1.0, 0.0));
        let f2 = fock(2, 4).unwrap();
        assert_eq!(f2.amplitudes()[2], c64(1.0, 0.0));
        assert_eq!(overlap(&fock(1, 4).unwrap(), &f2).unwrap(), Complex64::ZERO);
        assert!(fock(4, 4).is_err());
        assert_eq!(mean_photon(&f2), 2.0);
    }

    #[test]
    fn squeeze_operator_identities() {
        let s0 = squeeze_operator(0.0, 20).unwrap();
        assert_abs_diff_eq!((s0 - CMatrix::identity(20, 20)).norm(), 0.0, epsilon = 1e-15);
        let r = 0.57;
        let prod = squeeze_operator(r, 120).unwrap() * squeeze_operator(-r, 120).unwrap();
        assert_abs_diff_eq!((prod - CMatrix::identity(120, 120)).norm(), 0.0, epsilon = 1e-8);
        assert!(squeeze_operator(3.5, 20).is_err());
    }

    #[test]
    fn dense_and_banded_squeezing_agree() {
        let dim = 80;
        let dense = squeeze_operator(0.4, dim).unwrap();
        let banded = squeezed_fock(0.4, 2, dim).unwrap();
        let col = dense.column(2).into_owned();
        assert_abs_diff_eq!((col - banded.amplitudes()).norm(), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn squeezed_fock_parity_and_zero_squeezing() {
        let s = squeezed_fock(0.0, 2, 60).unwrap();
        assert_abs_diff_eq!(
            (s.amplitudes() - fock(2, 60).unwrap().amplitudes()).norm(),
            0.0,
            epsilon = 1e-15
        );
        let s = squeezed_fock(0.8, 3, 120).unwrap();
        for n in (0..120).step_by(2) {
            assert!(s.amplitudes()[n].norm() < 1e-12);
        }
        assert!(s.is_normalized());
        assert!(squeezed_fock(0.3, 30, 120).is_err());
    }

    #[test]
    fn truncation_is_detected() {
        assert!(matches!(squeezed_fock(2.0, 2, 40), Err(Error::Truncation { .. })));
    }

    #[test]
    fn displacement_examples() {
        let d0 = displacement(Complex64::ZERO, 10).unwrap();
        assert_abs_diff_eq!((d0 - CMatrix::identity(10, 10)).norm(), 0.0, epsilon = 1e-15);
        let dim = 120;
        let d = displacement(c64(1.0, 0.0), dim).unwrap();
        let dm = displacement(c64(-1.0, 0.0), dim).unwrap();
        assert_abs_diff_eq!((&d * &dm - CMatrix::identity(dim, dim)).norm(), 0.0, epsilon = 1e-9);
        let coh = StateVector::from_amplitudes(d.column(0).into_owned()).unwrap();
        assert_abs_diff_eq!(mean_photon(&coh), 1.0, epsilon = 1e-8);
        assert!(displacement(c64(5.0, 0.0), dim).is_err());
    }

    #[test]
    fn hermite_low_orders() {
        assert_eq!(hermite(0, 0.3), 1.0);
        assert_abs_diff_eq!(hermite(2, 0.5), 4.0 * 0.25 - 2.0);
        assert_abs_diff_eq!(hermite(3, 0.5), 8.0 * 0.125 - 12.0 * 0.5);
    }

    #[test]
    fn wavefunction_points() {
        assert_abs_diff_eq!(sf_wavefunction(0.0, 0.0, 0), PI.powf(-0.25), epsilon = 1e-15);
        assert_abs_diff_eq!(sf_wavefunction(0.0, 0.0, 1), 0.0);
    }

    #[test]
    fn analytic_overlap_values() {
        assert_abs_diff_eq!(sf_overlap_analytic(0, 0.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(sf_overlap_analytic(1, 0.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(sf_overlap_analytic(2, 0.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            sf_overlap_analytic(2, 5f64.acosh() / 4.0).unwrap(),
            0.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(sf_overlap_analytic(0, 0.5).unwrap(), 0.80502, epsilon = 1e-5);
        assert!(matches!(sf_overlap_analytic(3, 0.1), Err(Error::UnsupportedOrder(3))));
    }

    #[test]
    fn sf_root() {
        let r = solve_sf_codeword_r();
        assert_abs_diff_eq!(r, 5f64.acosh() / 4.0, epsilon = 1e-10);
        assert_abs_diff_eq!(sf_overlap_analytic(2, r).unwrap(), 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(r, 0.5731, epsilon = 1e-4);
    }

    #[test]
    fn ssc_params_validation() {
        assert!(SscParams::new(0.0, 1.0, Parity::Even).is_err());
        let mut p = SscParams::new(1.0, 1.0, Parity::Even).unwrap();
        assert_eq!(p.orientation, Orientation::Perpendicular);
        p.orientation = Orientation::Parallel;
        assert!(p.validate().is_err());
    }

    #[test]
    fn code_pair_rejects_overlapping_words() {
        let a = fock(0, 4).unwrap();
        let b = StateVector::from_amplitudes(CVector::from_vec(vec![
            c64(1.0, 0.0),
            c64(1.0, 0.0),
            c64(0.0, 0.0),
            c64(0.0, 0.0),
        ]))
        .unwrap();
        assert!(matches!(
            make_code(
                CodeSpec::Custom {
                    zero: a.clone(),
                    one: b
                },
                4
            ),
            Err(Error::InvalidCode { .. })
        ));
        let code = make_code(
            CodeSpec::Custom {
                zero: a,
                one: fock(1, 4).unwrap(),
            },
            4,
        )
        .unwrap();
        assert_eq!(code.family(), CodeFamily::Custom);
        assert_abs_diff_eq!((code.gram() - CMatrix::identity(2, 2)).norm(), 0.0);
    }

    #[test]
    fn reference_labels_round_trip() {
        for c in ReferenceCode::ALL {
            assert_eq!(ReferenceCode::from_label(c.label()), Some(c));
        }
    }
}
