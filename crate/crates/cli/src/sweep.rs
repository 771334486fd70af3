use std::collections::BTreeMap;

use bqec_core::channels::{first_order_set, tp_residual};
use bqec_core::kl::kl_cost_kraus;
use bqec_core::optimal::{optimal_recovery, DEFAULT_DROP_TOL, DEFAULT_SDP_TOL};
use bqec_core::petz::petz_fidelity;
use bqec_core::{CodePair, ReferenceCode};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Measure, SweepConfig};
use crate::error::CliError;

/// Largest change of any scalar allowed when the cutoff grows by half.
pub const GATE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub gamma: f64,
    pub state: String,
    pub measure: Measure,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointFailure {
    pub gamma: f64,
    pub state: String,
    pub measure: Measure,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GateReport {
    pub dim: usize,
    pub max_change: Option<f64>,
    pub worst: Option<String>,
    pub passed: bool,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub tool_version: &'static str,
    pub dim: usize,
    pub max_tp_residual: f64,
    pub error: &'static str,
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub points: usize,
    pub grid: &'static str,
    pub kraus_set: &'static str,
    pub measures: Vec<Measure>,
    pub states: Vec<String>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub rows: Vec<Row>,
    pub failures: Vec<PointFailure>,
    pub metadata: Metadata,
    pub gate: GateReport,
}

struct Evaluation {
    rows: Vec<Row>,
    failures: Vec<PointFailure>,
    max_tp_residual: f64,
}

fn build_codes(states: &[ReferenceCode], dim: usize) -> Result<Vec<(ReferenceCode, CodePair)>, CliError> {
    states.par_iter().map(|&c| Ok((c, c.build(dim)?))).collect()
}

fn measure_value(m: Measure, code: &CodePair, k: &bqec_core::KrausSet) -> bqec_core::Result<f64> {
    match m {
        Measure::Kl => kl_cost_kraus(code, k),
        Measure::Petz => Ok(petz_fidelity(code, k)?.fidelity),
        Measure::Opt => Ok(optimal_recovery(code, k, DEFAULT_DROP_TOL, DEFAULT_SDP_TOL)?.fidelity()),
    }
}

fn evaluate(cfg: &SweepConfig, codes: &[(ReferenceCode, CodePair)]) -> Result<Evaluation, CliError> {
    let family = cfg.error.family();
    let grid = cfg.grid();
    let tasks: Vec<(usize, f64)> = (0..codes.len())
        .flat_map(|c| grid.iter().map(move |&g| (c, g)))
        .collect();
    let results = tasks
        .par_iter()
        .map(|&(c, gamma)| -> Result<_, CliError> {
            let (label, code) = &codes[c];
            let k = first_order_set(family, gamma, code.dim())?;
            let tp = tp_residual(&k, code.zero())?
                .abs()
                .max(tp_residual(&k, code.one())?.abs());
            let mut rows = Vec::new();
            let mut failures = Vec::new();
            for &m in &cfg.measures {
                match measure_value(m, code, &k) {
                    Ok(value) if value.is_finite() => rows.push(Row {
                        gamma,
                        state: label.label().into(),
                        measure: m,
                        value,
                    }),
                    Ok(value) => failures.push(PointFailure {
                        gamma,
                        state: label.label().into(),
                        measure: m,
                        message: format!("non-finite value {value}"),
                    }),
                    Err(e) => failures.push(PointFailure {
                        gamma,
                        state: label.label().into(),
                        measure: m,
                        message: e.to_string(),
                    }),
                }
            }
            Ok((rows, failures, tp))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = Evaluation {
        rows: Vec::new(),
        failures: Vec::new(),
        max_tp_residual: 0.0,
    };
    for (rows, failures, tp) in results {
        out.rows.extend(rows);
        out.failures.extend(failures);
        out.max_tp_residual = out.max_tp_residual.max(tp);
    }
    sort_rows(&mut out.rows);
    out.failures.sort_by(|a, b| {
        (a.measure, &a.state)
            .cmp(&(b.measure, &b.state))
            .then(a.gamma.total_cmp(&b.gamma))
    });
    Ok(out)
}

/// Sorts by `(measure, state, gamma)`.
pub fn sort_rows(rows: &mut [Row]) {
    rows.sort_by(|a, b| {
        (a.measure, &a.state)
            .cmp(&(b.measure, &b.state))
            .then(a.gamma.total_cmp(&b.gamma))
    });
}

fn gate_dim(dim: usize) -> usize {
    dim + dim / 2
}

fn convergence_gate(cfg: &SweepConfig, base: &[Row]) -> GateReport {
    let dim = gate_dim(cfg.dim);
    let finer = build_codes(&cfg.states, dim).and_then(|codes| evaluate(cfg, &codes));
    let finer = match finer {
        Ok(f) => f,
        Err(e) => {
            return GateReport {
                dim,
                max_change: None,
                worst: None,
                passed: false,
                note: Some(e.to_string()),
            };
        }
    };
    let lookup: BTreeMap<_, f64> = finer
        .rows
        .iter()
        .map(|r| ((r.measure, r.state.clone(), r.gamma.to_bits()), r.value))
        .collect();
    let mut max_change = 0.0f64;
    let mut worst = None;
    let mut missing = 0;
    for r in base {
        match lookup.get(&(r.measure, r.state.clone(), r.gamma.to_bits())) {
            Some(v) => {
                let change = (v - r.value).abs();
                if worst.is_none() || change > max_change {
                    max_change = change;
                    worst = Some(format!("{} {} gamma={:e}", r.measure, r.state, r.gamma));
                }
            }
            None => missing += 1,
        }
    }
    GateReport {
        dim,
        max_change: Some(max_change),
        worst,
        passed: missing == 0 && max_change < GATE_TOL,
        note: (missing > 0).then(|| format!("{missing} values missing at dim {dim}")),
    }
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult, CliError> {
    let codes = build_codes(&cfg.states, cfg.dim)?;
    let eval = evaluate(cfg, &codes)?;
    let gate = convergence_gate(cfg, &eval.rows);
    Ok(SweepResult {
        metadata: Metadata {
            tool_version: env!("CARGO_PKG_VERSION"),
            dim: cfg.dim,
            max_tp_residual: eval.max_tp_residual,
            error: cfg.error.as_str(),
            gamma_min: cfg.gamma_min,
            gamma_max: cfg.gamma_max,
            points: cfg.points,
            grid: "log-spaced, end points included",
            kraus_set: "first order",
            measures: cfg.measures.clone(),
            states: cfg.states.iter().map(|s| s.label().to_string()).collect(),
            seed: cfg.seed,
        },
        rows: eval.rows,
        failures: eval.failures,
        gate,
    })
}

/// One series of `(gamma, value)` per state for `measure`.
pub fn series(rows: &[Row], measure: Measure) -> BTreeMap<String, Vec<(f64, f64)>> {
    let mut out: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.measure == measure) {
        out.entry(r.state.clone()).or_default().push((r.gamma, r.value));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointRanking {
    pub gamma: f64,
    /// States from best to worst.
    pub ranking: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ordering {
    pub quantity: &'static str,
    /// State ranked first at every grid point, if there is one.
    pub best_everywhere: Option<String>,
    pub points: Vec<PointRanking>,
}

pub fn ordering(rows: &[Row], measure: Measure) -> Ordering {
    let mut by_gamma: BTreeMap<u64, (f64, Vec<(f64, String)>)> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.measure == measure) {
        by_gamma
            .entry(r.gamma.to_bits())
            .or_insert_with(|| (r.gamma, Vec::new()))
            .1
            .push((measure.penalty(r.value), r.state.clone()));
    }
    let mut points: Vec<PointRanking> = by_gamma
        .into_values()
        .map(|(gamma, mut entries)| {
            entries.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
            PointRanking {
                gamma,
                ranking: entries.into_iter().map(|e| e.1).collect(),
            }
        })
        .collect();
    points.sort_by(|a, b| a.gamma.total_cmp(&b.gamma));
    let first = points.first().and_then(|p| p.ranking.first().cloned());
    let best_everywhere = first.filter(|s| points.iter().all(|p| p.ranking.first() == Some(s)));
    Ordering {
        quantity: measure.penalty_label(),
        best_everywhere,
        points,
    }
}

/// Least-squares slope of `log(penalty)` against `log(gamma)` over the
/// points where both are positive.
pub fn log_slope(points: &[(f64, f64)], measure: Measure) -> Option<f64> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .map(|&(g, v)| (g, measure.penalty(v)))
        .filter(|&(g, p)| g > 0.0 && p > 0.0)
        .map(|(g, p)| (g.ln(), p.ln()))
        .collect();
    if logs.len() < 2 {
        return None;
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary<'a> {
    pub metadata: &'a Metadata,
    pub gate: &'a GateReport,
    pub ordering: BTreeMap<Measure, Ordering>,
    pub slopes: BTreeMap<Measure, BTreeMap<String, Option<f64>>>,
    pub failures: &'a [PointFailure],
}

pub fn summary(result: &SweepResult) -> Summary<'_> {
    let mut ordering_map = BTreeMap::new();
    let mut slopes = BTreeMap::new();
    for &m in &result.metadata.measures {
        ordering_map.insert(m, ordering(&result.rows, m));
        slopes.insert(
            m,
            series(&result.rows, m)
                .into_iter()
                .map(|(s, pts)| (s, log_slope(&pts, m)))
                .collect(),
        );
    }
    Summary {
        metadata: &result.metadata,
        gate: &result.gate,
        ordering: ordering_map,
        slopes,
        failures: &result.failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(gamma: f64, state: &str, measure: Measure, value: f64) -> Row {
        Row {
            gamma,
            state: state.into(),
            measure,
            value,
        }
    }

    #[test]
    fn rows_sort_by_measure_state_gamma() {
        let mut rows = vec![
            row(1e-3, "sf", Measure::Petz, 0.9),
            row(1e-4, "ssc_perp_1.0", Measure::Kl, 1.0),
            row(1e-5, "sf", Measure::Kl, 1.0),
            row(1e-6, "sf", Measure::Kl, 1.0),
        ];
        sort_rows(&mut rows);
        let keys: Vec<_> = rows.iter().map(|r| (r.measure, r.state.as_str(), r.gamma)).collect();
        assert_eq!(
            keys,
            vec![
                (Measure::Kl, "sf", 1e-6),
                (Measure::Kl, "sf", 1e-5),
                (Measure::Kl, "ssc_perp_1.0", 1e-4),
                (Measure::Petz, "sf", 1e-3),
            ]
        );
    }

    #[test]
    fn ordering_uses_infidelity_for_fidelities() {
        let rows = vec![
            row(1e-4, "a", Measure::Petz, 0.99),
            row(1e-4, "b", Measure::Petz, 0.999),
            row(1e-3, "a", Measure::Petz, 0.9),
            row(1e-3, "b", Measure::Petz, 0.95),
        ];
        let o = ordering(&rows, Measure::Petz);
        assert_eq!(o.best_everywhere.as_deref(), Some("b"));
        assert_eq!(o.points[0].ranking, vec!["b", "a"]);
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<_> = (1..6).map(|k| (10f64.powi(-k), 3.0 * 10f64.powi(-2 * k))).collect();
        assert!((log_slope(&pts, Measure::Kl).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(log_slope(&pts[..1], Measure::Kl), None);
    }
}
