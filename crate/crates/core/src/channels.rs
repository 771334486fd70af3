//! Kraus representations of particle loss and dephasing, their first-order
//! truncations, and channel application.

use std::fmt;

use crate::error::{Error, Result};
use crate::hilbert::{c64, hermitian_asymmetry, CMatrix, CVector, PSD_CLIP};
use crate::states::StateVector;

/// Default number of terms kept in a full Kraus series is `DEFAULT_J + 1`.
pub const DEFAULT_J: usize = 30;
/// Above these rates the first-order sets are outside their validity regime.
pub const FIRST_ORDER_LOSS_LIMIT: f64 = 1e-2;
pub const FIRST_ORDER_DEPHASING_LIMIT: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NoiseFamily {
    Loss,
    Dephasing,
    Composite,
    Custom,
}

impl fmt::Display for NoiseFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NoiseFamily::Loss => "loss",
            NoiseFamily::Dephasing => "dephasing",
            NoiseFamily::Composite => "composite",
            NoiseFamily::Custom => "custom",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KrausOrder {
    /// Terms `j = 0..=J` of the series.
    Full(usize),
    FirstOrder,
}

/// Ordered Kraus operators sharing one dimension.
#[derive(Debug, Clone)]
pub struct KrausSet {
    ops: Vec<CMatrix>,
    family: NoiseFamily,
    gamma: f64,
    order: KrausOrder,
}

impl KrausSet {
    pub fn new(ops: Vec<CMatrix>, family: NoiseFamily, gamma: f64, order: KrausOrder) -> Result<Self> {
        let first = ops
            .first()
            .ok_or_else(|| Error::ShapeMismatch("empty Kraus set".into()))?;
        let dim = first.nrows();
        for op in &ops {
            if op.nrows() != dim || op.ncols() != dim {
                return Err(Error::ShapeMismatch(format!(
                    "Kraus operator is {}x{}, expected {dim}x{dim}",
                    op.nrows(),
                    op.ncols()
                )));
            }
        }
        Ok(Self {
            ops,
            family,
            gamma,
            order,
        })
    }

    /// Arbitrary operators; reported with `gamma = 0` and `Full(len - 1)`.
    pub fn custom(ops: Vec<CMatrix>) -> Result<Self> {
        let j = ops.len().saturating_sub(1);
        Self::new(ops, NoiseFamily::Custom, 0.0, KrausOrder::Full(j))
    }

    pub fn ops(&self) -> &[CMatrix] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.ops[0].nrows()
    }

    pub fn family(&self) -> NoiseFamily {
        self.family
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn order(&self) -> KrausOrder {
        self.order
    }

    /// `sum_j K_j^dag K_j`.
    pub fn completeness(&self) -> CMatrix {
        self.ops
            .iter()
            .fold(CMatrix::zeros(self.dim(), self.dim()), |acc, k| acc + k.adjoint() * k)
    }

    /// `K_j |s>` for every operator.
    pub fn act_on(&self, s: &CVector) -> Result<Vec<CVector>> {
        if s.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: s.len(),
            });
        }
        Ok(self.ops.iter().map(|k| k * s).collect())
    }

    /// Kraus set of `second` applied after `first`: `{B_j A_i}`.
    pub fn compose(first: &KrausSet, second: &KrausSet) -> Result<KrausSet> {
        if first.dim() != second.dim() {
            return Err(Error::DimensionMismatch {
                expected: first.dim(),
                found: second.dim(),
            });
        }
        let ops = first
            .ops
            .iter()
            .flat_map(|a| second.ops.iter().map(move |b| b * a))
            .collect();
        let j = first.len() * second.len() - 1;
        KrausSet::new(
            ops,
            NoiseFamily::Composite,
            first.gamma.max(second.gamma),
            KrausOrder::Full(j),
        )
    }
}

/// Density matrix over the truncated Fock space.
///
/// Channel outputs are kept as produced, so their trace may fall short of 1
/// when the Kraus series is truncated.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} density matrix",
                m.nrows(),
                m.ncols()
            )));
        }
        let asym = hermitian_asymmetry(&m);
        if asym > 1e-10 {
            return Err(Error::NotHermitian { asymmetry: asym });
        }
        let tr = m.trace().re;
        if (tr - 1.0).abs() > 1e-10 {
            return Err(Error::NumericFailure {
                context: "density matrix trace",
                residual: tr - 1.0,
            });
        }
        let eig = m.clone().symmetric_eigenvalues();
        let min = eig.min();
        if min < -PSD_CLIP {
            return Err(Error::NotPsd {
                min_eigenvalue: min,
                max_eigenvalue: eig.max(),
            });
        }
        Ok(Self { m })
    }

    pub fn from_state(s: &StateVector) -> Self {
        let v = s.amplitudes();
        Self { m: v * v.adjoint() }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn trace(&self) -> f64 {
        self.m.trace().re
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateFamily {
    Loss,
    Dephasing,
}

/// Converts a rate and a time into the dimensionless channel parameter.
pub fn gamma_from_rate(kappa: f64, t: f64, family: RateFamily) -> Result<f64> {
    if kappa.is_nan() || kappa < 0.0 {
        return Err(Error::ParameterRange {
            name: "kappa",
            value: kappa,
            reason: "rate must be nonnegative",
        });
    }
    if t.is_nan() || t < 0.0 {
        return Err(Error::ParameterRange {
            name: "t",
            value: t,
            reason: "time must be nonnegative",
        });
    }
    Ok(match family {
        RateFamily::Loss => -(-kappa * t).exp_m1(),
        RateFamily::Dephasing => kappa * t,
    })
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::InvalidDimension { dim, min: 2 });
    }
    Ok(())
}

fn check_loss_gamma(gamma: f64) -> Result<()> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::ParameterRange {
            name: "gamma1",
            value: gamma,
            reason: "loss parameter must lie in [0, 1)",
        });
    }
    Ok(())
}

fn check_dephasing_gamma(gamma: f64) -> Result<()> {
    if gamma < 0.0 || !gamma.is_finite() {
        return Err(Error::ParameterRange {
            name: "gamma2",
            value: gamma,
            reason: "dephasing parameter must be nonnegative",
        });
    }
    Ok(())
}

/// `sqrt(g^j / j!) (1 - g)^{n/2} a^j`.
pub fn loss_kraus(gamma: f64, j: usize, dim: usize) -> Result<CMatrix> {
    check_loss_gamma(gamma)?;
    check_dim(dim)?;
    let mut k = CMatrix::zeros(dim, dim);
    if j > 0 && gamma == 0.0 {
        return Ok(k);
    }
    let ln_g = if j == 0 { 0.0 } else { j as f64 * gamma.ln() };
    let ln_keep = (-gamma).ln_1p();
    for n in j..dim {
        let m = n - j;
        let ln = 0.5 * (ln_g - ln_factorial(j) + ln_factorial(n) - ln_factorial(m)) + 0.5 * m as f64 * ln_keep;
        k[(m, n)] = c64(ln.exp(), 0.0);
    }
    Ok(k)
}

/// `sqrt(g^j / j!) exp(-g n^2 / 2) n^j`, diagonal in the Fock basis.
pub fn dephasing_kraus(gamma: f64, j: usize, dim: usize) -> Result<CMatrix> {
    check_dephasing_gamma(gamma)?;
    check_dim(dim)?;
    let mut k = CMatrix::zeros(dim, dim);
    for n in 0..dim {
        let value = if j == 0 {
            (-0.5 * gamma * (n * n) as f64).exp()
        } else if gamma == 0.0 || n == 0 {
            0.0
        } else {
            let nf = n as f64;
            (0.5 * (j as f64 * gamma.ln() - ln_factorial(j)) - 0.5 * gamma * nf * nf + j as f64 * nf.ln()).exp()
        };
        k[(n, n)] = c64(value, 0.0);
    }
    Ok(k)
}

/// `{K_0, ..., K_J}` for the given family.
pub fn full_kraus_set(family: RateFamily, gamma: f64, j_max: usize, dim: usize) -> Result<KrausSet> {
    let ops = (0..=j_max)
        .map(|j| match family {
            RateFamily::Loss => loss_kraus(gamma, j, dim),
            RateFamily::Dephasing => dephasing_kraus(gamma, j, dim),
        })
        .collect::<Result<Vec<_>>>()?;
    KrausSet::new(ops, noise_family(family), gamma, KrausOrder::Full(j_max))
}

fn noise_family(family: RateFamily) -> NoiseFamily {
    match family {
        RateFamily::Loss => NoiseFamily::Loss,
        RateFamily::Dephasing => NoiseFamily::Dephasing,
    }
}

/// Smallest full set, up to `j_cap`, whose trace-preservation residual on
/// every state in `states` is below `tol`. Returns the cap set if none is.
pub fn adaptive_kraus_set(
    family: RateFamily,
    gamma: f64,
    states: &[&StateVector],
    tol: f64,
    j_cap: usize,
) -> Result<KrausSet> {
    let dim = states
        .first()
        .map(|s| s.dim())
        .ok_or(Error::InvalidDimension { dim: 0, min: 1 })?;
    let mut j = 1;
    loop {
        let k = full_kraus_set(family, gamma, j, dim)?;
        let mut worst = 0.0f64;
        for s in states {
            worst = worst.max(tp_residual(&k, s)?.abs());
        }
        if worst < tol || j >= j_cap {
            return Ok(k);
        }
        j += 1;
    }
}

/// Loss: `{I - (g/2) n, sqrt(g) a}`. Dephasing: `{I - (g/2) n^2, sqrt(g) n}`.
///
/// Neither set is trace preserving: `sum K^dag K = I + g^2 n^2 / 4` for loss
/// and `I + g^2 n^4 / 4` for dephasing.
pub fn first_order_set(family: RateFamily, gamma: f64, dim: usize) -> Result<KrausSet> {
    check_dim(dim)?;
    let ops = match family {
        RateFamily::Loss => {
            check_loss_gamma(gamma)?;
            if gamma > FIRST_ORDER_LOSS_LIMIT {
                log::warn!("first-order loss set used at gamma = {gamma:e}, beyond its validity range");
            }
            let k0 = CMatrix::from_diagonal(&CVector::from_fn(dim, |n, _| c64(1.0 - 0.5 * gamma * n as f64, 0.0)));
            let mut k1 = CMatrix::zeros(dim, dim);
            for n in 1..dim {
                k1[(n - 1, n)] = c64((gamma * n as f64).sqrt(), 0.0);
            }
            vec![k0, k1]
        }
        RateFamily::Dephasing => {
            check_dephasing_gamma(gamma)?;
            if gamma > FIRST_ORDER_DEPHASING_LIMIT {
                log::warn!("first-order dephasing set used at gamma = {gamma:e}, beyond its validity range");
            }
            let k0 = CMatrix::from_diagonal(&CVector::from_fn(dim, |n, _| {
                c64(1.0 - 0.5 * gamma * (n * n) as f64, 0.0)
            }));
            let k1 = CMatrix::from_diagonal(&CVector::from_fn(dim, |n, _| c64(gamma.sqrt() * n as f64, 0.0)));
            vec![k0, k1]
        }
    };
    KrausSet::new(ops, noise_family(family), gamma, KrausOrder::FirstOrder)
}

/// `sum_j K_j rho K_j^dag` on a bare matrix.
pub fn apply_kraus(k: &KrausSet, rho: &CMatrix) -> Result<CMatrix> {
    if rho.nrows() != k.dim() || rho.ncols() != k.dim() {
        return Err(Error::DimensionMismatch {
            expected: k.dim(),
            found: rho.nrows(),
        });
    }
    Ok(k.ops.iter().fold(CMatrix::zeros(k.dim(), k.dim()), |acc, op| {
        acc + op * rho * op.adjoint()
    }))
}

/// `sum_j K_j rho K_j^dag`, not renormalized.
pub fn apply_channel(k: &KrausSet, rho: &DensityMatrix) -> Result<DensityMatrix> {
    Ok(DensityMatrix {
        m: apply_kraus(k, rho.matrix())?,
    })
}

/// `<s| sum K^dag K |s> - 1`.
pub fn tp_residual(k: &KrausSet, s: &StateVector) -> Result<f64> {
    let outs = k.act_on(s.amplitudes())?;
    Ok(outs.iter().map(|v| v.norm_squared()).sum::<f64>() - 1.0)
}

/// `||N1(N2(rho)) - N2(N1(rho))||_F` with full loss and dephasing series of
/// `j_max + 1` terms each.
pub fn commutation_distance(gamma1: f64, gamma2: f64, rho: &DensityMatrix, j_max: usize, dim: usize) -> Result<f64> {
    if rho.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: rho.dim(),
        });
    }
    let loss = full_kraus_set(RateFamily::Loss, gamma1, j_max, dim)?;
    let deph = full_kraus_set(RateFamily::Dephasing, gamma2, j_max, dim)?;
    let a = apply_kraus(&loss, &apply_kraus(&deph, rho.matrix())?)?;
    let b = apply_kraus(&deph, &apply_kraus(&loss, rho.matrix())?)?;
    Ok((a - b).norm())
}
