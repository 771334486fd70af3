//! Shared fixtures for the benchmarks.

use bqec_core::states::DEFAULT_DIM;
use bqec_core::{CodePair, ReferenceCode};

/// Squeezed Fock code and the perpendicular cat at the default cutoff.
pub fn fixture_codes() -> Vec<(ReferenceCode, CodePair)> {
    [ReferenceCode::SqueezedFock, ReferenceCode::PerpendicularOne]
        .into_iter()
        .map(|c| {
            (
                c,
                c.build(DEFAULT_DIM)
                    .expect("reference code builds at the default cutoff"),
            )
        })
        .collect()
}
