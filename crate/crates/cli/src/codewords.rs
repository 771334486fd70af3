use bqec_core::states::{mean_photon, overlap, solve_sf_codeword_r, squeezed_fock};
use bqec_core::ReferenceCode;
use serde::Serialize;

use crate::error::CliError;

/// Allowed distance from the tabulated two-decimal squeezing values.
pub const TABLE_TOL: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CodewordRow {
    pub state: &'static str,
    pub squeezing: f64,
    pub tabulated: f64,
    pub mean_photon: f64,
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CodewordReport {
    pub dim: usize,
    pub r_star: f64,
    pub r_star_closed_form: f64,
    pub sf_overlap: f64,
    pub rows: Vec<CodewordRow>,
}

impl CodewordReport {
    pub fn all_match(&self) -> bool {
        self.rows.iter().all(|r| r.matches)
    }

    pub fn render(&self) -> String {
        let mut out = format!(
            "dim {}\nr* = {:.6} (arccosh(5)/4 = {:.6}), |<-r*,2|r*,2>| = {:.2e}\n",
            self.dim, self.r_star, self.r_star_closed_form, self.sf_overlap
        );
        out.push_str(&format!(
            "{:<14} {:>10} {:>10} {:>10} {}\n",
            "state", "r", "table", "<n>", "match"
        ));
        for r in &self.rows {
            out.push_str(&format!(
                "{:<14} {:>10.5} {:>10.2} {:>10.5} {}\n",
                r.state,
                r.squeezing,
                r.tabulated,
                r.mean_photon,
                if r.matches { "yes" } else { "NO" }
            ));
        }
        out
    }
}

pub fn codewords(dim: usize) -> Result<CodewordReport, CliError> {
    let r_star = solve_sf_codeword_r();
    let sf_overlap = overlap(&squeezed_fock(-r_star, 2, dim)?, &squeezed_fock(r_star, 2, dim)?)?.norm();
    let rows = ReferenceCode::ALL
        .iter()
        .map(|&c| {
            let r = c.solve_squeezing(dim)?;
            let code = bqec_core::states::make_code(c.spec_with_squeezing(r), dim)?;
            let tabulated = c.tabulated_squeezing();
            Ok(CodewordRow {
                state: c.label(),
                squeezing: r,
                tabulated,
                mean_photon: mean_photon(code.zero()),
                matches: (r - tabulated).abs() <= TABLE_TOL,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(CodewordReport {
        dim,
        r_star,
        r_star_closed_form: 5f64.acosh() / 4.0,
        sf_overlap,
        rows,
    })
}
