use std::process::ExitCode;
use std::time::Instant;

use bqec_core::channels::{
    adaptive_kraus_set, commutation_distance, first_order_set, tp_residual, DensityMatrix, KrausSet, RateFamily,
};
use bqec_core::hilbert::{c64, CMatrix, CVector, DEFAULT_PINV_REL_TOL};
use bqec_core::kl::{elementary_error_set, kl_cost_elementary, kl_cost_kraus};
use bqec_core::optimal::{
    channel_fidelity, extract_recovery_kraus, optimal_recovery, DEFAULT_DROP_TOL, DEFAULT_SDP_TOL,
};
use bqec_core::petz::{petz_fidelity, petz_kraus};
use bqec_core::states::{
    fock, make_code, mean_photon, overlap, sf_overlap_analytic, solve_sf_codeword_r, squeezed_fock, CodePair, CodeSpec,
    ReferenceCode, StateVector, DEFAULT_DIM,
};
use bqec_core::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GRID_POINTS: usize = 25;
const LOSS_WINDOW: (f64, f64) = (1e-7, 1e-2);
const DEPHASING_WINDOW: (f64, f64) = (1e-7, 1e-3);
const RHO_SEED: u64 = 20;

type Check<'a> = Box<dyn Fn() -> Result<Outcome> + 'a>;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

struct Codes {
    all: Vec<(ReferenceCode, CodePair)>,
}

impl Codes {
    fn build(dim: usize) -> Result<Self> {
        let all = ReferenceCode::ALL
            .iter()
            .map(|&c| Ok((c, c.build(dim)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { all })
    }

    fn get(&self, which: ReferenceCode) -> &CodePair {
        &self
            .all
            .iter()
            .find(|(c, _)| *c == which)
            .expect("all reference codes built")
            .1
    }
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.log10(), hi.log10());
    (0..n)
        .map(|k| 10f64.powf(a + (b - a) * k as f64 / (n - 1) as f64))
        .collect()
}

fn window(family: RateFamily) -> (f64, f64) {
    match family {
        RateFamily::Loss => LOSS_WINDOW,
        RateFamily::Dephasing => DEPHASING_WINDOW,
    }
}

fn kl_curve(code: &CodePair, family: RateFamily) -> Result<Vec<f64>> {
    let (lo, hi) = window(family);
    log_grid(lo, hi, GRID_POINTS)
        .into_iter()
        .map(|g| kl_cost_kraus(code, &first_order_set(family, g, code.dim())?))
        .collect()
}

fn petz_infidelity_curve(code: &CodePair, family: RateFamily) -> Result<Vec<f64>> {
    let (lo, hi) = window(family);
    log_grid(lo, hi, GRID_POINTS)
        .into_iter()
        .map(|g| Ok(petz_fidelity(code, &first_order_set(family, g, code.dim())?)?.infidelity()))
        .collect()
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn random_density(dim: usize, seed: u64) -> DensityMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = CMatrix::from_fn(dim, dim, |_, _| {
        c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let rho = &g * g.adjoint();
    let tr = rho.trace().re;
    DensityMatrix::new(rho / c64(tr, 0.0)).expect("g g^dag is a valid state")
}

fn codeword_orthogonality() -> Result<Outcome> {
    let start = Instant::now();
    let r = solve_sf_codeword_r();
    let minus = squeezed_fock(-r, 2, 120)?;
    let plus = squeezed_fock(r, 2, 120)?;
    let o = overlap(&minus, &plus)?.norm();
    let elapsed = start.elapsed().as_secs_f64();
    Ok(Outcome::new(
        o <= 1e-9 && elapsed < 1.0,
        format!("r* = {r:.9}, |<-r*,2|r*,2>| = {o:.2e}, {elapsed:.3} s"),
    ))
}

fn analytic_overlap() -> Result<Outcome> {
    let mut worst = 0.0f64;
    for n in 0..3 {
        for k in -10..=10 {
            let r = 0.1 * k as f64;
            let numeric = overlap(&squeezed_fock(-r, n, 120)?, &squeezed_fock(r, n, 120)?)?;
            worst = worst.max((numeric - c64(sf_overlap_analytic(n, r)?, 0.0)).norm());
        }
    }
    Ok(Outcome::new(worst <= 1e-7, format!("max deviation {worst:.2e}")))
}

fn energy_match(codes: &Codes) -> Result<Outcome> {
    let n = mean_photon(codes.get(ReferenceCode::SqueezedFock).zero());
    Ok(Outcome::new((n - 3.83).abs() <= 0.005, format!("<n> = {n:.6}")))
}

fn table_reproduction() -> Result<Outcome> {
    let mut pass = true;
    let mut parts = Vec::new();
    for c in ReferenceCode::CATS {
        let r = c.solve_squeezing(DEFAULT_DIM)?;
        let tabulated = c.tabulated_squeezing();
        pass &= (r - tabulated).abs() <= 0.01;
        parts.push(format!("{c} {r:.5} (table {tabulated})"));
    }
    Ok(Outcome::new(pass, parts.join(", ")))
}

fn loss_kl_ordering(codes: &Codes) -> Result<Outcome> {
    let sf = kl_curve(codes.get(ReferenceCode::SqueezedFock), RateFamily::Loss)?;
    let mut violations = 0;
    let mut min_ratio = f64::INFINITY;
    for c in ReferenceCode::CATS {
        let curve = kl_curve(codes.get(c), RateFamily::Loss)?;
        for (s, o) in sf.iter().zip(&curve) {
            violations += usize::from(s >= o);
            min_ratio = min_ratio.min(o / s);
        }
    }
    Ok(Outcome::new(
        violations == 0,
        format!("{violations} violations, smallest cat/sf ratio {min_ratio:.3e}"),
    ))
}

fn dephasing_kl_ordering(codes: &Codes) -> Result<Outcome> {
    let sf = kl_curve(codes.get(ReferenceCode::SqueezedFock), RateFamily::Dephasing)?;
    let perp = kl_curve(codes.get(ReferenceCode::PerpendicularOne), RateFamily::Dephasing)?;
    let violations = sf.iter().zip(&perp).filter(|(s, p)| p >= s).count();
    let worst = sf.iter().zip(&perp).map(|(s, p)| p / s).fold(0.0, f64::max);
    Ok(Outcome::new(
        violations == 0,
        format!("{violations} violations, largest perp_1.0/sf ratio {worst:.3e}"),
    ))
}

fn parallel_degeneracy(codes: &Codes) -> Result<Outcome> {
    let a = codes.get(ReferenceCode::ParallelHalf);
    let b = codes.get(ReferenceCode::ParallelOne);
    let mut worst = [0.0f64; 2];
    for (slot, family) in [RateFamily::Loss, RateFamily::Dephasing].into_iter().enumerate() {
        let ca = kl_curve(a, family)?;
        let cb = kl_curve(b, family)?;
        for (x, y) in ca.iter().zip(&cb) {
            worst[slot] = worst[slot].max((x - y).abs() / x.abs().max(y.abs()));
        }
    }
    let o0 = overlap(a.zero(), b.zero())?.norm();
    let o1 = overlap(a.one(), b.one())?.norm();
    Ok(Outcome::new(
        worst[0] <= 0.05 && worst[1] <= 0.05 && o0 > 0.99 && o1 > 0.99,
        format!(
            "max relative diff loss {:.3}, dephasing {:.3}; overlaps {o0:.5}, {o1:.5}",
            worst[0], worst[1]
        ),
    ))
}

fn petz_orderings(codes: &Codes) -> Result<Outcome> {
    let sf_deph = petz_infidelity_curve(codes.get(ReferenceCode::SqueezedFock), RateFamily::Dephasing)?;
    let mut deph_violations = 0;
    for c in ReferenceCode::CATS {
        let curve = petz_infidelity_curve(codes.get(c), RateFamily::Dephasing)?;
        deph_violations += sf_deph.iter().zip(&curve).filter(|(s, o)| s >= o).count();
    }
    let sf_loss = petz_infidelity_curve(codes.get(ReferenceCode::SqueezedFock), RateFamily::Loss)?;
    let mut loss_violations = 0;
    let mut ratios = (f64::INFINITY, 0.0f64);
    for c in [ReferenceCode::PerpendicularHalf, ReferenceCode::PerpendicularOne] {
        let curve = petz_infidelity_curve(codes.get(c), RateFamily::Loss)?;
        for (s, o) in sf_loss.iter().zip(&curve) {
            let ratio = s / o;
            ratios = (ratios.0.min(ratio), ratios.1.max(ratio));
            loss_violations += usize::from(!(0.5..=2.0).contains(&ratio));
        }
    }
    Ok(Outcome::new(
        deph_violations == 0 && loss_violations == 0,
        format!(
            "dephasing ordering violations {deph_violations}; loss points outside factor 2: {loss_violations} (sf/perp ratio in [{:.2e}, {:.2e}])",
            ratios.0, ratios.1
        ),
    ))
}

fn sandwich_instances(codes: &Codes) -> Result<Vec<(String, CodePair, KrausSet)>> {
    let mut out = Vec::new();
    let mut push_family = |family: RateFamily, gammas: &[f64], which: &[ReferenceCode]| -> Result<()> {
        for &g in gammas {
            for &c in which {
                let code = codes.get(c);
                let k = adaptive_kraus_set(family, g, &[code.zero(), code.one()], 1e-12, 30)?;
                out.push((format!("{c} {family:?} {g:e} J={}", k.len() - 1), code.clone(), k));
            }
        }
        Ok(())
    };
    push_family(RateFamily::Loss, &[1e-7, 1e-5, 1e-4, 1e-3, 1e-2], &ReferenceCode::ALL)?;
    push_family(RateFamily::Dephasing, &[1e-7, 1e-5, 1e-4], &ReferenceCode::ALL)?;
    push_family(RateFamily::Dephasing, &[1e-3], &[ReferenceCode::SqueezedFock])?;
    let sf = codes.get(ReferenceCode::SqueezedFock);
    out.push((
        "sf Loss first-order 1e-4".to_string(),
        sf.clone(),
        first_order_set(RateFamily::Loss, 1e-4, sf.dim())?,
    ));
    Ok(out)
}

fn petz_sandwich(codes: &Codes) -> Result<Outcome> {
    let mut failures = Vec::new();
    let mut worst_gap = 0.0f64;
    let instances = sandwich_instances(codes)?;
    for (label, code, k) in &instances {
        let fp = petz_fidelity(code, k)?.fidelity;
        let opt = match optimal_recovery(code, k, DEFAULT_DROP_TOL, DEFAULT_SDP_TOL) {
            Ok(o) => o,
            Err(e) => {
                failures.push(format!("{label}: {e}"));
                continue;
            }
        };
        let fo = opt.fidelity();
        worst_gap = worst_gap.max(opt.choi.duality_gap);
        if fo < fp - 1e-6 || fo > 0.5 * (1.0 + fp) + 1e-6 || opt.choi.duality_gap > 1e-7 {
            failures.push(format!(
                "{label}: F_petz {fp:.10} F_opt {fo:.10} gap {:.1e}",
                opt.choi.duality_gap
            ));
        }
    }
    let mut detail = format!("{} instances, worst gap {worst_gap:.1e}", instances.len());
    if !failures.is_empty() {
        detail.push_str(&format!("; failing: {}", failures.join("; ")));
    }
    Ok(Outcome::new(failures.is_empty(), detail))
}

fn tp_scaling(codes: &Codes) -> Result<Outcome> {
    let sf = codes.get(ReferenceCode::SqueezedFock);
    let mut slopes = Vec::new();
    for family in [RateFamily::Loss, RateFamily::Dephasing] {
        let (lo, hi) = window(family);
        let grid = log_grid(lo, hi, GRID_POINTS);
        let res = grid
            .iter()
            .map(|&g| tp_residual(&first_order_set(family, g, sf.dim())?, sf.zero()).map(f64::abs))
            .collect::<Result<Vec<_>>>()?;
        slopes.push(slope(&grid, &res));
    }
    Ok(Outcome::new(
        slopes.iter().all(|s| (s - 2.0).abs() <= 0.1),
        format!("slopes loss {:.4}, dephasing {:.4}", slopes[0], slopes[1]),
    ))
}

fn channel_commutation() -> Result<Outcome> {
    let rho = random_density(40, RHO_SEED);
    let d = commutation_distance(1e-3, 1e-3, &rho, 20, 40)?;
    Ok(Outcome::new(d <= 1e-8, format!("distance {d:.2e} (seed {RHO_SEED})")))
}

fn zero_noise(codes: &Codes) -> Result<Outcome> {
    let mut worst_kl = 0.0f64;
    let mut worst_petz = 0.0f64;
    for (_, code) in &codes.all {
        for family in [RateFamily::Loss, RateFamily::Dephasing] {
            let k = first_order_set(family, 0.0, code.dim())?;
            worst_kl = worst_kl.max(kl_cost_kraus(code, &k)?);
            worst_petz = worst_petz.max((petz_fidelity(code, &k)?.fidelity - 1.0).abs());
        }
    }
    Ok(Outcome::new(
        worst_kl <= 1e-12 && worst_petz <= 1e-12,
        format!("max KL cost {worst_kl:.2e}, max |F_petz - 1| {worst_petz:.2e}"),
    ))
}

fn binomial_oracle() -> Result<Outcome> {
    let dim = 12;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut z = CVector::zeros(dim);
    z[0] = c64(h, 0.0);
    z[4] = c64(h, 0.0);
    let code = make_code(
        CodeSpec::Custom {
            zero: StateVector::from_amplitudes(z)?,
            one: fock(2, dim)?,
        },
        dim,
    )?;
    let cost = kl_cost_elementary(&code, &elementary_error_set(1, 0, dim)?)?;
    Ok(Outcome::new(cost <= 1e-12, format!("C_KL = {cost:.2e}")))
}

fn cross_paths(codes: &Codes) -> Result<Outcome> {
    let mut petz_worst = 0.0f64;
    let mut opt_worst = 0.0f64;
    for (_, code) in &codes.all {
        for family in [RateFamily::Loss, RateFamily::Dephasing] {
            let k = first_order_set(family, 1e-4, code.dim())?;
            let formula = petz_fidelity(code, &k)?.fidelity;
            let traced = channel_fidelity(&petz_kraus(code, &k, DEFAULT_PINV_REL_TOL)?, &k, code)?;
            petz_worst = petz_worst.max((formula - traced).abs());
            let opt = optimal_recovery(code, &k, DEFAULT_DROP_TOL, DEFAULT_SDP_TOL)?;
            let extracted = channel_fidelity(&extract_recovery_kraus(&opt.choi, &opt.basis)?, &k, code)?;
            opt_worst = opt_worst.max((extracted - opt.fidelity()).abs());
        }
    }
    Ok(Outcome::new(
        petz_worst <= 1e-8 && opt_worst <= 1e-6,
        format!("petz formula vs kraus {petz_worst:.2e}, sdp vs extracted {opt_worst:.2e}"),
    ))
}

fn reported_scalars(dim: usize) -> Result<Vec<(String, f64)>> {
    let codes = Codes::build(dim)?;
    let mut out = Vec::new();
    for (c, code) in &codes.all {
        for family in [RateFamily::Loss, RateFamily::Dephasing] {
            let k = first_order_set(family, 1e-4, dim)?;
            out.push((format!("{c} {family:?} kl"), kl_cost_kraus(code, &k)?));
            out.push((format!("{c} {family:?} petz"), petz_fidelity(code, &k)?.fidelity));
            let opt = optimal_recovery(code, &k, DEFAULT_DROP_TOL, DEFAULT_SDP_TOL)?;
            out.push((format!("{c} {family:?} opt"), opt.fidelity()));
        }
    }
    Ok(out)
}

fn gate(lo: usize, hi: usize) -> String {
    let pair = reported_scalars(lo).and_then(|a| Ok((a, reported_scalars(hi)?)));
    match pair {
        Ok((a, b)) => {
            let (name, worst) = a
                .iter()
                .zip(&b)
                .map(|((n, x), (_, y))| (n.clone(), (x - y).abs()))
                .fold((String::new(), 0.0), |acc, it| if it.1 > acc.1 { it } else { acc });
            format!("dim {lo} -> {hi}: max change {worst:.2e} ({name})")
        }
        Err(e) => format!("dim {lo} -> {hi}: {e}"),
    }
}

fn convergence_gate() -> Result<Outcome> {
    let literal = reported_scalars(120).and_then(|a| Ok((a, reported_scalars(180)?)));
    let pass = match &literal {
        Ok((a, b)) => a.iter().zip(b).all(|((_, x), (_, y))| (x - y).abs() < 1e-8),
        Err(_) => false,
    };
    Ok(Outcome::new(
        pass,
        format!("{}; {}", gate(120, 180), gate(DEFAULT_DIM, DEFAULT_DIM * 3 / 2)),
    ))
}

fn main() -> ExitCode {
    let started = Instant::now();
    let codes = match Codes::build(DEFAULT_DIM) {
        Ok(c) => c,
        Err(e) => {
            println!("FAIL setup: reference codes at dim {DEFAULT_DIM}: {e}");
            return ExitCode::FAILURE;
        }
    };
    let checks: Vec<(&str, Check<'_>)> = vec![
        ("01 codeword orthogonality", Box::new(codeword_orthogonality)),
        ("02 analytic overlap oracle", Box::new(analytic_overlap)),
        ("03 energy match", Box::new(|| energy_match(&codes))),
        ("04 squeezing table", Box::new(table_reproduction)),
        ("05 loss KL ordering", Box::new(|| loss_kl_ordering(&codes))),
        ("06 dephasing KL ordering", Box::new(|| dephasing_kl_ordering(&codes))),
        (
            "07 parallel branch degeneracy",
            Box::new(|| parallel_degeneracy(&codes)),
        ),
        ("08 petz infidelity orderings", Box::new(|| petz_orderings(&codes))),
        ("09 petz sandwich", Box::new(|| petz_sandwich(&codes))),
        ("10 TP residual scaling", Box::new(|| tp_scaling(&codes))),
        ("11 channel commutation", Box::new(channel_commutation)),
        ("12 zero-noise identities", Box::new(|| zero_noise(&codes))),
        ("13 perfect code oracle", Box::new(binomial_oracle)),
        ("14 cross-path fidelity", Box::new(|| cross_paths(&codes))),
        ("15 convergence gate", Box::new(convergence_gate)),
    ];
    let mut failed = 0;
    for (name, check) in &checks {
        let t = Instant::now();
        let outcome = check().unwrap_or_else(|e| Outcome::new(false, format!("error: {e}")));
        failed += usize::from(!outcome.pass);
        println!(
            "{} {name}: {} [{:.2} s]",
            if outcome.pass { "PASS" } else { "FAIL" },
            outcome.detail,
            t.elapsed().as_secs_f64()
        );
    }
    println!(
        "{} of {} criteria passed in {:.1} s",
        checks.len() - failed,
        checks.len(),
        started.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
