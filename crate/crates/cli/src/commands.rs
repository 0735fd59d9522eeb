use std::fmt;

use serde_json::Value;
use tsichain::analysis::{
    alpha_grid, concurrence_series, environment_comparison, esd_times, static_concurrence_scan,
    witness_scan, CriticalEstimate, EsdOptions, Pair, ScanSettings, TimeGrid,
};
use tsichain::dynamics::{Evolver, PairCorrelators, QuenchState};
use tsichain::entanglement::{build_density_matrix, concurrence_closed_form, concurrence_wootters};
use tsichain::model::{DispersionConvention, ModelParams};
use tsichain::oracle::{bell_pair, bessel_reference, build_ring, check_light_cone, ReferenceCase};

use crate::cli::{
    AlphaRangeArgs, CaseArg, CommonModelArgs, EnvironmentArgs, ModelArgs, SeriesArgs,
    StaticScanArgs, TimeArgs, VerifyArgs, WitnessScanArgs,
};
use crate::output::{emit, num, nums, opt_num, Format, Table};

/// Failure classes, each with its own exit code.
#[derive(Debug)]
pub enum Failure {
    Params(String),
    Io(String),
    Verification(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Params(_) => 1,
            Failure::Io(_) => 2,
            Failure::Verification(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Params(m) => f.write_str(m),
            Failure::Io(m) => write!(f, "i/o error: {m}"),
            Failure::Verification(m) => write!(f, "verification failed: {m}"),
        }
    }
}

impl From<tsichain::Error> for Failure {
    fn from(e: tsichain::Error) -> Self {
        Failure::Params(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn params(msg: impl Into<String>) -> Failure {
    Failure::Params(format!("invalid parameters: {}", msg.into()))
}

fn model_params(alpha: Option<f64>, common: &CommonModelArgs) -> Result<ModelParams, Failure> {
    let base = match alpha {
        Some(a) => {
            if !a.is_finite() {
                return Err(params(format!("alpha = {a} must be finite")));
            }
            ModelParams::new(a)?
        }
        None => ModelParams::pure_tsi(),
    };
    Ok(base
        .with_n_k(common.n_k)?
        .with_convention(common.convention.into()))
}

fn scan_settings(common: &CommonModelArgs, time: &TimeArgs) -> Result<ScanSettings, Failure> {
    // validates couplings-independent settings up front
    model_params(Some(0.0), common)?;
    TimeGrid::new(time.t0, time.t_max, time.dt)?;
    if !common.phi.is_finite() {
        return Err(params("phi must be finite"));
    }
    Ok(ScanSettings {
        t0: time.t0,
        t_max: time.t_max,
        dt: time.dt,
        phi: common.phi,
        n_k: common.n_k,
        convention: common.convention.into(),
        ..ScanSettings::default()
    })
}

fn alphas(range: &AlphaRangeArgs) -> Result<Vec<f64>, Failure> {
    Ok(alpha_grid(
        range.alpha_min,
        range.alpha_max,
        range.alpha_step,
    )?)
}

fn model_metadata(table: &mut Table, params: &ModelParams, phi: f64) {
    table.meta(
        "alpha",
        if params.pure_tsi {
            Value::from("inf")
        } else {
            num(params.alpha)
        },
    );
    table.meta("pure_tsi", params.pure_tsi);
    table.meta("J", num(params.j_nn));
    table.meta("J_prime", num(params.j_tsi));
    table.meta("phi", num(phi));
    table.meta("n_k", params.n_k);
    table.meta("convention", params.convention.name());
}

fn scan_metadata(table: &mut Table, s: &ScanSettings, range: &AlphaRangeArgs) {
    table.meta("alpha_min", num(range.alpha_min));
    table.meta("alpha_max", num(range.alpha_max));
    table.meta("alpha_step", num(range.alpha_step));
    table.meta("phi", num(s.phi));
    table.meta("n_k", s.n_k);
    table.meta("convention", s.convention.name());
}

fn time_metadata(table: &mut Table, grid: &TimeGrid) {
    table.meta("t0", num(grid.t0));
    table.meta("t_max", num(grid.t_max()));
    table.meta("dt", num(grid.dt));
}

/// Writes the table to its destination and the summary to the terminal.
fn finish(table: &Table, format: Format, out: Option<&std::path::Path>) -> Outcome {
    let rendered = table.render(format);
    emit(&rendered, out).map_err(|e| {
        let target = out.map_or_else(|| "stdout".to_string(), |p| p.display().to_string());
        Failure::Io(format!("{target}: {e}"))
    })?;
    for line in table.summary_lines() {
        if out.is_some() {
            println!("{line}");
        } else {
            eprintln!("{line}");
        }
    }
    Ok(())
}

pub fn series(args: &SeriesArgs) -> Outcome {
    let ModelArgs {
        alpha,
        pure_tsi,
        common,
    } = &args.model;
    let params = model_params((!pure_tsi).then_some(*alpha), common)?;
    let state = QuenchState::new(0, common.phi, params)?;
    let grid = TimeGrid::new(args.time.t0, args.time.t_max, args.time.dt)?;
    let pair: Pair = args.pair.into();

    let series = concurrence_series(pair, args.time.t0, args.time.t_max, args.time.dt, &state)?;
    let events = esd_times(&series, EsdOptions::default())?;

    let mut table = Table::new("series", ["t", "C_raw", "C"]);
    model_metadata(&mut table, &params, common.phi);
    time_metadata(&mut table, &grid);
    table.meta("pair", pair.name());
    table.summarize("death_times", nums(&events.death_times));
    table.summarize("revival_times", nums(&events.revival_times));
    for ((t, raw), c) in series
        .times
        .iter()
        .zip(&series.raw_values)
        .zip(&series.c_values)
    {
        table.push_row(vec![num(*t), num(*raw), num(*c)]);
    }
    finish(&table, args.output.format, args.output.out.as_deref())
}

pub fn witness_scan_cmd(args: &WitnessScanArgs) -> Outcome {
    let mut settings = scan_settings(&args.model, &args.time)?;
    if !(args.threshold.is_finite() && args.threshold >= 0.0) {
        return Err(params(format!(
            "threshold = {} must be finite and non-negative",
            args.threshold
        )));
    }
    settings.onset_threshold = args.threshold;
    let grid = alphas(&args.alphas)?;

    let scan = witness_scan(&grid, &settings)?;
    let statics = static_concurrence_scan(&grid, &[1.0, 2.0, 3.0], &settings)?;
    let estimate = CriticalEstimate::new(&scan, &statics);

    let mut table = Table::new("witness-scan", ["alpha", "I", "delta_c"]);
    scan_metadata(&mut table, &settings, &args.alphas);
    time_metadata(
        &mut table,
        &TimeGrid::new(settings.t0, settings.t_max, settings.dt)?,
    );
    table.meta("threshold", num(settings.onset_threshold));
    table.summarize("alpha_c_hat", opt_num(estimate.onset, "not found"));
    table.summarize(
        "static_peak_alpha",
        opt_num(estimate.static_peak, "not found"),
    );
    table.summarize("estimators_agree", estimate.agree(0.1));
    for w in &scan.results {
        table.push_row(vec![num(w.alpha), num(w.i_value), num(w.delta_c)]);
    }
    if estimate.onset.is_some() && !estimate.agree(0.1) {
        eprintln!("warning: witness onset and static peak differ by more than 0.1");
    }
    finish(&table, args.output.format, args.output.out.as_deref())
}

pub fn static_scan(args: &StaticScanArgs) -> Outcome {
    if args.times.is_empty() {
        return Err(params("no times requested"));
    }
    if !(args.dt.is_finite() && args.dt > 0.0) {
        return Err(params(format!("dt = {} must be positive", args.dt)));
    }
    let settings = ScanSettings {
        dt: args.dt,
        ..scan_settings(
            &args.model,
            &TimeArgs {
                t0: 0.0,
                t_max: 1.0,
                dt: args.dt,
            },
        )?
    };
    let grid = alphas(&args.alphas)?;
    let scan = static_concurrence_scan(&grid, &args.times, &settings)?;

    let mut columns = vec!["alpha".to_string()];
    columns.extend(
        args.times
            .iter()
            .map(|t| format!("C(t={})", crate::output::fmt_g12(*t))),
    );
    columns.push("warning".to_string());
    let mut table = Table::new("static-scan", columns);
    scan_metadata(&mut table, &settings, &args.alphas);
    table.meta("times", nums(&args.times));
    table.meta("dt", num(settings.dt));
    for curve in &scan.curves {
        let label = format!("argmax(t={})", crate::output::fmt_g12(curve.t));
        table.summarize(&label, opt_num(curve.argmax, "flat"));
    }
    for (i, &alpha) in scan.alphas.iter().enumerate() {
        let mut row = vec![num(alpha)];
        row.extend(scan.curves.iter().map(|c| num(c.values[i])));
        let late: Vec<String> = scan
            .curves
            .iter()
            .filter(|c| c.past_first_death[i])
            .map(|c| format!("t={} past first death", crate::output::fmt_g12(c.t)))
            .collect();
        row.push(Value::from(late.join("; ")));
        table.push_row(row);
    }
    let flagged = (0..scan.alphas.len())
        .filter(|&i| scan.curves.iter().any(|c| c.past_first_death[i]))
        .count();
    if flagged > 0 {
        eprintln!("warning: {flagged} couplings evaluated past their first sudden death");
    }
    finish(&table, args.output.format, args.output.out.as_deref())
}

pub fn environment_compare(args: &EnvironmentArgs) -> Outcome {
    let params = model_params(Some(args.alpha), &args.model)?;
    let state = QuenchState::new(0, args.model.phi, params)?;
    let grid = TimeGrid::new(args.time.t0, args.time.t_max, args.time.dt)?;
    let cmp = environment_comparison(
        &state,
        args.time.t0,
        args.time.t_max,
        args.time.dt,
        EsdOptions::default(),
    )?;

    let mut table = Table::new(
        "environment-compare",
        ["t", "C_system", "C_edge", "C_environment"],
    );
    model_metadata(&mut table, &params, args.model.phi);
    time_metadata(&mut table, &grid);
    for pair in Pair::ALL {
        let events = &cmp.pair(pair).events;
        table.summarize(
            &format!("{}_death_times", pair.name()),
            nums(&events.death_times),
        );
        table.summarize(
            &format!("{}_revival_times", pair.name()),
            nums(&events.revival_times),
        );
    }
    table.summarize(
        "system_revival_peak",
        opt_num(cmp.system_revival_peak, "none"),
    );
    table.summarize(
        "environment_first_death",
        opt_num(cmp.environment_first_death, "none"),
    );
    table.summarize(
        "peak_minus_environment_death",
        opt_num(cmp.peak_offset(), "none"),
    );
    for i in 0..grid.len {
        table.push_row(vec![
            num(cmp.system.series.times[i]),
            num(cmp.system.series.c_values[i]),
            num(cmp.edge.series.c_values[i]),
            num(cmp.environment.series.c_values[i]),
        ]);
    }
    finish(&table, args.output.format, args.output.out.as_deref())
}

struct Check {
    name: String,
    deviation: f64,
    tolerance: f64,
}

impl Check {
    fn passed(&self) -> bool {
        self.deviation <= self.tolerance
    }
}

fn bessel_check(
    case: ReferenceCase,
    grid: &TimeGrid,
    n_k: usize,
    convention: DispersionConvention,
) -> Result<Check, Failure> {
    let (base, name) = match case {
        ReferenceCase::AlphaZero => (ModelParams::new(0.0)?, "bessel alpha_zero"),
        ReferenceCase::PureTsi => (ModelParams::pure_tsi(), "bessel pure_tsi"),
    };
    let state = QuenchState::bell(base.with_n_k(n_k)?.with_convention(convention))?;
    let series = concurrence_series(Pair::System, grid.t0, grid.t_max(), grid.dt, &state)?;
    let deviation = series
        .times
        .iter()
        .zip(&series.c_values)
        .map(|(&t, c)| (c - bessel_reference(case, t)).abs())
        .fold(0.0, f64::max);
    Ok(Check {
        name: name.into(),
        deviation,
        tolerance: 1e-6,
    })
}

fn ring_check(alpha: f64, args: &VerifyArgs, grid: &TimeGrid) -> Result<Check, Failure> {
    let params = ModelParams::new(alpha)?
        .with_n_k(args.n_k)?
        .with_convention(args.convention.into());
    let state = QuenchState::bell(params)?;
    let n = args.ring_sites;
    let m = n / 2;
    let ring = build_ring(n, &params)?;
    let spectrum = ring.diagonalize()?;
    let evolution = spectrum.evolution(&bell_pair(n, m, 0.0))?;
    let evolver = Evolver::new(&state);
    let mut deviation = 0.0f64;
    for i in 0..grid.len {
        let t = grid.time(i);
        let ring_c = concurrence_closed_form(&PairCorrelators::from_amplitudes(
            evolution.amplitude(m, t),
            evolution.amplitude(m + 1, t),
        ))?;
        let quad_c = concurrence_closed_form(&evolver.at(t).correlators(0))?;
        deviation = deviation.max((ring_c - quad_c).abs());
    }
    Ok(Check {
        name: format!("ring alpha={}", crate::output::fmt_g12(alpha)),
        deviation,
        tolerance: 1e-8,
    })
}

fn convergence_check(alpha: f64, args: &VerifyArgs, grid: &TimeGrid) -> Result<Check, Failure> {
    let params = ModelParams::new(alpha)?.with_convention(args.convention.into());
    let coarse = Evolver::new(&QuenchState::bell(params.with_n_k(args.n_k)?)?);
    let fine = Evolver::new(&QuenchState::bell(params.with_n_k(2 * args.n_k)?)?);
    let mut deviation = 0.0f64;
    for i in 0..grid.len {
        let t = grid.time(i);
        let (a, b) = (coarse.at(t), fine.at(t));
        for pair in Pair::ALL {
            let (x, y) = (a.correlators(pair.offset()), b.correlators(pair.offset()));
            let d = [
                (x.z - y.z).norm(),
                (x.n_i - y.n_i).abs(),
                (x.n_j - y.n_j).abs(),
                (x.x_plus - y.x_plus).abs(),
            ]
            .into_iter()
            .fold(0.0, f64::max);
            deviation = deviation.max(d);
        }
    }
    Ok(Check {
        name: format!("n_k convergence alpha={}", crate::output::fmt_g12(alpha)),
        deviation,
        tolerance: 1e-10,
    })
}

fn measure_checks(states: &[QuenchState], grid: &TimeGrid) -> Result<[Check; 2], Failure> {
    let mut wootters = 0.0f64;
    let mut x_plus = 0.0f64;
    for state in states {
        let evolver = Evolver::new(state);
        for i in 0..grid.len {
            let snap = evolver.at(grid.time(i));
            for pair in Pair::ALL {
                let corr = snap.correlators(pair.offset());
                let rho = build_density_matrix(&corr)?;
                wootters = wootters
                    .max((concurrence_wootters(&rho) - concurrence_closed_form(&corr)?).abs());
                x_plus = x_plus.max(corr.x_plus.abs());
            }
        }
    }
    Ok([
        Check {
            name: "wootters vs closed form".into(),
            deviation: wootters,
            tolerance: 1e-10,
        },
        Check {
            name: "single-excitation X+".into(),
            deviation: x_plus,
            tolerance: 1e-10,
        },
    ])
}

pub fn verify(args: &VerifyArgs) -> Outcome {
    let convention: DispersionConvention = args.convention.into();
    let grid = TimeGrid::new(args.time.t0, args.time.t_max, args.time.dt)?;
    ModelParams::new(0.0)?.with_n_k(args.n_k)?;
    if args.alphas.is_empty() || args.alphas.iter().any(|a| !a.is_finite()) {
        return Err(params("alphas must be a non-empty list of finite values"));
    }
    let run_rest = args.case == CaseArg::All;
    let ring_grid = if run_rest {
        let t_max = args.ring_tmax.min(grid.t_max());
        let ring_grid = TimeGrid::new(grid.t0, t_max, grid.dt)?;
        build_ring(args.ring_sites, &ModelParams::new(0.0)?)?;
        for &alpha in &args.alphas {
            let v = ModelParams::new(alpha)?.velocity_bound();
            check_light_cone(args.ring_sites, v, ring_grid.t_max())?;
        }
        Some(ring_grid)
    } else {
        None
    };

    let mut checks = Vec::new();
    if matches!(args.case, CaseArg::All | CaseArg::AlphaZero) {
        checks.push(bessel_check(
            ReferenceCase::AlphaZero,
            &grid,
            args.n_k,
            convention,
        )?);
    }
    if matches!(args.case, CaseArg::All | CaseArg::PureTsi) {
        checks.push(bessel_check(
            ReferenceCase::PureTsi,
            &grid,
            args.n_k,
            convention,
        )?);
    }
    if let Some(ring_grid) = ring_grid {
        for &alpha in &args.alphas {
            checks.push(ring_check(alpha, args, &ring_grid)?);
        }
        for &alpha in &args.alphas {
            checks.push(convergence_check(alpha, args, &grid)?);
        }
        let mut states = args
            .alphas
            .iter()
            .map(|&a| {
                QuenchState::bell(
                    ModelParams::new(a)?
                        .with_n_k(args.n_k)?
                        .with_convention(convention),
                )
            })
            .collect::<Result<Vec<_>, _>>()?;
        states.push(QuenchState::bell(
            ModelParams::pure_tsi()
                .with_n_k(args.n_k)?
                .with_convention(convention),
        )?);
        checks.extend(measure_checks(&states, &grid)?);
    }

    let mut table = Table::new("verify", ["check", "max_deviation", "tolerance", "status"]);
    table.meta("alphas", nums(&args.alphas));
    table.meta("n_k", args.n_k);
    table.meta("convention", convention.name());
    table.meta("ring_sites", args.ring_sites);
    time_metadata(&mut table, &grid);
    let failed: Vec<&str> = checks
        .iter()
        .filter(|c| !c.passed())
        .map(|c| c.name.as_str())
        .collect();
    table.summarize("checks", checks.len());
    table.summarize("failed", failed.len());
    for c in &checks {
        let status = if c.passed() { "PASS" } else { "FAIL" };
        table.push_row(vec![
            Value::from(c.name.clone()),
            num(c.deviation),
            num(c.tolerance),
            Value::from(status),
        ]);
    }
    let rendered = table.render(args.format);
    emit(&rendered, None).map_err(|e| Failure::Io(format!("stdout: {e}")))?;
    if let Some(path) = args.out.as_deref() {
        emit(&rendered, Some(path)).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(failed.join(", ")))
    }
}
