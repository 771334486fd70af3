use bqec_core::channels::{apply_kraus, commutation_distance, full_kraus_set, DensityMatrix};
use bqec_core::hilbert::{c64, CMatrix};
use bqec_core::RateFamily;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::CliError;

pub const DEFAULT_GAMMA: f64 = 1e-3;
pub const DEFAULT_J: usize = 20;
pub const DEFAULT_DIM: usize = 40;
pub const PASS_DISTANCE: f64 = 1e-8;
/// Trace lost by either truncated series beyond which the check is not
/// considered converged.
pub const TRACE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommuteReport {
    pub gamma_loss: f64,
    pub gamma_dephasing: f64,
    pub j: usize,
    pub dim: usize,
    pub seed: u64,
    pub distance: f64,
    pub trace_defect: f64,
    pub converged: bool,
    pub passed: bool,
}

impl CommuteReport {
    pub fn render(&self) -> String {
        format!(
            "gamma_loss {:e}, gamma_dephasing {:e}, J {}, dim {}, seed {}\ndistance {:.3e}\ntrace defect {:.3e}{}\n{}\n",
            self.gamma_loss,
            self.gamma_dephasing,
            self.j,
            self.dim,
            self.seed,
            self.distance,
            self.trace_defect,
            if self.converged { "" } else { " (not converged: increase J)" },
            if self.passed { "PASS" } else { "FAIL" }
        )
    }
}

pub fn random_density(dim: usize, seed: u64) -> Result<DensityMatrix, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = CMatrix::from_fn(dim, dim, |_, _| {
        c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let rho = &g * g.adjoint();
    let tr = rho.trace().re;
    Ok(DensityMatrix::new(rho / c64(tr, 0.0))?)
}

pub fn commute_check(
    gamma_loss: f64,
    gamma_dephasing: f64,
    j: usize,
    dim: usize,
    seed: u64,
) -> Result<CommuteReport, CliError> {
    let rho = random_density(dim, seed)?;
    let distance = commutation_distance(gamma_loss, gamma_dephasing, &rho, j, dim)?;
    let mut trace_defect = 0.0f64;
    for (family, g) in [(RateFamily::Loss, gamma_loss), (RateFamily::Dephasing, gamma_dephasing)] {
        let k = full_kraus_set(family, g, j, dim)?;
        trace_defect = trace_defect.max((apply_kraus(&k, rho.matrix())?.trace().re - 1.0).abs());
    }
    let converged = trace_defect <= TRACE_TOL;
    Ok(CommuteReport {
        gamma_loss,
        gamma_dephasing,
        j,
        dim,
        seed,
        distance,
        trace_defect,
        converged,
        passed: converged && distance < PASS_DISTANCE,
    })
}
