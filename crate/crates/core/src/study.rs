//! Studies over an axis (viscosity, strength, resolution), their pass/fail
//! criteria and report files.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::StudyConfig;
use crate::entropy::{ledger_csv, z_coordinate, Ledger, Z_BAND};
use crate::error::{Error, Result};
use crate::fit::{least_squares_slope, LineFit};
use crate::hugoniot::ShockWave;
use crate::profile::{
    solve_profile, tail_half_width, verify_profile, volume_pressure_residual, Profile,
    ProfileOptions, STRUCTURE_TAIL, VOLUME_PRESSURE_BAND,
};
use crate::solver::{run, scaled_profile, InitialData, RunOutput};

/// One summary row; columns that do not apply to a study stay empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub axis: String,
    pub value: f64,
    pub away_error: Option<f64>,
    pub physical_shift: Option<f64>,
    pub max_shift_ratio: Option<f64>,
    pub volume_pressure_residual: Option<f64>,
    pub logistic_residual: Option<f64>,
    pub decay_rate: Option<f64>,
    pub identity_residual: Option<f64>,
    pub conservation_drift: Option<f64>,
    pub dy: Option<f64>,
    pub dtau: Option<f64>,
}

/// Column order of `summary-<hash>.csv`.
pub const SUMMARY_COLUMNS: [&str; 12] = [
    "axis",
    "value",
    "away_error",
    "physical_shift",
    "max_shift_ratio",
    "volume_pressure_residual",
    "logistic_residual",
    "decay_rate",
    "identity_residual",
    "conservation_drift",
    "dy",
    "dtau",
];

impl SummaryRow {
    pub fn new(axis: &str, value: f64) -> Self {
        SummaryRow {
            axis: axis.to_string(),
            value,
            away_error: None,
            physical_shift: None,
            max_shift_ratio: None,
            volume_pressure_residual: None,
            logistic_residual: None,
            decay_rate: None,
            identity_residual: None,
            conservation_drift: None,
            dy: None,
            dtau: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Criterion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Criterion {
    pub fn new(name: &str, passed: bool, detail: String) -> Self {
        Criterion {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeReport {
    pub column: String,
    pub fit: LineFit,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub study: String,
    pub config_hash: String,
    pub rows: Vec<SummaryRow>,
    pub slopes: Vec<SlopeReport>,
    pub criteria: Vec<Criterion>,
    /// Per-run ledgers, labelled.
    #[serde(skip)]
    pub ledgers: Vec<(String, Vec<Ledger>)>,
}

impl StudyReport {
    pub fn new(study: &str, config_hash: &str) -> Self {
        StudyReport {
            study: study.to_string(),
            config_hash: config_hash.to_string(),
            ..Default::default()
        }
    }

    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Domain(format!("thread pool: {e}")))
}

/// Map over axis values on `jobs` workers, keeping axis order.
fn fan_out<T: Send, F>(jobs: usize, values: &[f64], f: F) -> Result<Vec<T>>
where
    F: Fn(f64) -> Result<T> + Sync + Send,
{
    pool(jobs)?.install(|| values.par_iter().map(|&v| f(v)).collect())
}

fn strictly_decreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] < w[0])
}

fn in_band(x: f64, b: (f64, f64)) -> bool {
    x >= b.0 && x <= b.1
}

fn profile_for(shock: &ShockWave, cfg: &StudyConfig) -> Result<Option<Profile>> {
    if shock.delta > 0.0 {
        scaled_profile(shock, &cfg.gas).map(Some)
    } else {
        Ok(None)
    }
}

fn drift_criterion(report: &mut StudyReport, cfg: &StudyConfig, drifts: &[f64]) {
    let worst = drifts.iter().copied().fold(0.0, f64::max);
    report.criteria.push(Criterion::new(
        "conservation",
        worst < cfg.bands.conservation_drift,
        format!(
            "max relative drift {worst:e} < {:e}",
            cfg.bands.conservation_drift
        ),
    ));
}

/// Per-viscosity outcome of the vanishing-dissipation sweep.
#[derive(Debug, Clone)]
pub struct EpsilonRun {
    pub eps: f64,
    /// Sup of the away-from-shock error over output times in `[h/eps, T/eps]`.
    pub away_error: f64,
    /// `|eps X(T/eps)|`.
    pub physical_shift: f64,
    /// `(|Xdot|, ||psi||_inf)` at each output time.
    pub shift_pairs: Vec<(f64, f64)>,
    pub output: RunOutput,
}

/// Riemann-data runs at scaled horizons `T/eps` with exclusion windows `h/eps`.
pub fn epsilon_runs(cfg: &StudyConfig) -> Result<Vec<EpsilonRun>> {
    cfg.validate()?;
    let shock = cfg.shock()?;
    let profile = profile_for(&shock, cfg)?;
    let es = &cfg.epsilon_sweep;
    fan_out(cfg.jobs, &es.values, |eps| {
        let tau_end = es.horizon / eps;
        let window = es.window / eps;
        let mut sc = cfg.solver_config(shock, tau_end);
        sc.initial = InitialData::Riemann;
        sc.output_interval = es.output_interval;
        sc.h_exclusion = window;
        let out = run(&sc, profile.as_ref())?;
        let away_error = out
            .samples
            .iter()
            .filter(|s| s.tau >= window * (1.0 - 1e-12))
            .filter_map(|s| s.away_error)
            .fold(0.0, f64::max);
        let last = out.samples.last().expect("at least one sample");
        let shift_pairs = out
            .samples
            .iter()
            .map(|s| (s.shift_rate.abs(), s.psi_linf))
            .collect();
        Ok(EpsilonRun {
            eps,
            away_error,
            physical_shift: (eps * last.shift).abs(),
            shift_pairs,
            output: out,
        })
    })
}

/// Largest `|Xdot| / ||psi||_inf` over the samples with `psi != 0`.
pub fn shift_ratio(pairs: &[(f64, f64)]) -> f64 {
    pairs
        .iter()
        .filter(|(_, p)| *p > 0.0)
        .map(|(x, p)| x / p)
        .fold(0.0, f64::max)
}

pub fn sweep_epsilon(cfg: &StudyConfig) -> Result<StudyReport> {
    let runs = epsilon_runs(cfg)?;
    let mut rep = StudyReport::new("sweep-eps", &cfg.hash());
    for r in &runs {
        let mut row = SummaryRow::new("epsilon", r.eps);
        row.away_error = Some(r.away_error);
        row.physical_shift = Some(r.physical_shift);
        row.max_shift_ratio = Some(shift_ratio(&r.shift_pairs));
        row.conservation_drift = Some(r.output.conservation_drift);
        row.dy = Some(cfg.solver.dy);
        row.dtau = Some(r.output.dtau);
        rep.rows.push(row);
        rep.ledgers
            .push((format!("eps{}", r.eps), r.output.ledger.clone()));
    }
    // order runs from largest to smallest viscosity
    let mut order: Vec<&EpsilonRun> = runs.iter().collect();
    order.sort_by(|a, b| b.eps.total_cmp(&a.eps));
    let errs: Vec<f64> = order.iter().map(|r| r.away_error).collect();
    let shifts: Vec<f64> = order.iter().map(|r| r.physical_shift).collect();
    let bound = cfg.bands.epsilon_error_ratio;
    if cfg.shock()?.delta > 0.0 {
        rep.criteria.push(Criterion::new(
            "away_error_decreasing",
            strictly_decreasing(&errs),
            format!("errors {errs:?}"),
        ));
        let (first, last) = (errs[0], errs[errs.len() - 1]);
        rep.criteria.push(Criterion::new(
            "away_error_halved",
            last <= bound * first,
            format!("{last:e} <= {bound} * {first:e}"),
        ));
        rep.criteria.push(Criterion::new(
            "shift_decreasing",
            strictly_decreasing(&shifts),
            format!("|eps X| {shifts:?}"),
        ));
        let c = shift_ratio(&order[0].shift_pairs);
        let worst = order[1..]
            .iter()
            .map(|r| shift_ratio(&r.shift_pairs))
            .fold(0.0, f64::max);
        rep.criteria.push(Criterion::new(
            "shift_bound",
            worst <= c,
            format!("|Xdot| <= C ||psi||_inf with C = {c:.6} from the largest viscosity; others reach {worst:.6}"),
        ));
    } else {
        let worst = errs.iter().chain(&shifts).copied().fold(0.0, f64::max);
        rep.criteria.push(Criterion::new(
            "trivial_shock_exact",
            worst < 1e-12,
            format!("max error {worst:e}"),
        ));
    }
    let drifts: Vec<f64> = runs.iter().map(|r| r.output.conservation_drift).collect();
    drift_criterion(&mut rep, cfg, &drifts);
    Ok(rep)
}

/// Profile diagnostics for one strength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaPoint {
    pub delta: f64,
    pub volume_pressure_residual: f64,
    pub logistic_residual: f64,
    pub decay_rate: f64,
}

/// Profile of `shock` on the configured (or tail-derived) half-width.
pub fn structure_profile(shock: &ShockWave, cfg: &StudyConfig) -> Result<Profile> {
    let p = &cfg.profile;
    let kappa = p.kappa.unwrap_or(cfg.gas.nu * p.eps);
    let lw = match p.half_width {
        Some(l) => l,
        None => tail_half_width(shock, p.eps, kappa, &cfg.gas, STRUCTURE_TAIL)
            .ok_or(Error::NoUnstableDirection)?,
    };
    solve_profile(
        shock,
        p.eps,
        kappa,
        lw,
        p.points,
        &cfg.gas,
        &ProfileOptions::default(),
    )
}

pub fn delta_points(cfg: &StudyConfig) -> Result<Vec<DeltaPoint>> {
    cfg.validate()?;
    fan_out(cfg.jobs, &cfg.delta_sweep.values, |d| {
        let shock = cfg.shock_with_strength(Some(d))?;
        let p = structure_profile(&shock, cfg)?;
        let rep = verify_profile(&p);
        Ok(DeltaPoint {
            delta: d,
            volume_pressure_residual: volume_pressure_residual(&p, VOLUME_PRESSURE_BAND),
            logistic_residual: z_coordinate(&p, Z_BAND).rate_residual,
            decay_rate: rep.left_decay_rate.min(rep.right_decay_rate),
        })
    })
}

fn log_fit(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    if xs.len() < 3 {
        return None;
    }
    let pts: Vec<(f64, f64)> = xs.iter().zip(ys).map(|(x, y)| (x.ln(), y.ln())).collect();
    least_squares_slope(&pts)
}

pub fn sweep_delta(cfg: &StudyConfig) -> Result<StudyReport> {
    let pts = delta_points(cfg)?;
    let mut rep = StudyReport::new("sweep-delta", &cfg.hash());
    for p in &pts {
        let mut row = SummaryRow::new("delta", p.delta);
        row.volume_pressure_residual = Some(p.volume_pressure_residual);
        row.logistic_residual = Some(p.logistic_residual);
        row.decay_rate = Some(p.decay_rate);
        rep.rows.push(row);
    }
    let ds: Vec<f64> = pts.iter().map(|p| p.delta).collect();
    let b = &cfg.bands;
    for (column, ys, band) in [
        (
            "volume_pressure_residual",
            pts.iter()
                .map(|p| p.volume_pressure_residual)
                .collect::<Vec<_>>(),
            b.residual_slope,
        ),
        (
            "logistic_residual",
            pts.iter().map(|p| p.logistic_residual).collect(),
            b.residual_slope,
        ),
        (
            "decay_rate",
            pts.iter().map(|p| p.decay_rate).collect(),
            b.decay_slope,
        ),
    ] {
        match log_fit(&ds, &ys) {
            Some(fit) => {
                rep.criteria.push(Criterion::new(
                    &format!("{column}_slope"),
                    in_band(fit.slope, band),
                    format!("slope {:.4} in [{}, {}]", fit.slope, band.0, band.1),
                ));
                rep.slopes.push(SlopeReport {
                    column: column.to_string(),
                    fit,
                });
            }
            None => rep.criteria.push(Criterion::new(
                &format!("{column}_slope"),
                false,
                "fit failed".into(),
            )),
        }
    }
    Ok(rep)
}

/// One resolution level of the refinement study.
#[derive(Debug, Clone)]
pub struct Level {
    pub dy: f64,
    pub dtau: f64,
    pub identity_residual: f64,
    pub output: RunOutput,
}

pub fn refinement_levels(cfg: &StudyConfig) -> Result<Vec<Level>> {
    cfg.validate()?;
    let r = &cfg.refinement;
    let shock = cfg.shock()?;
    let profile = profile_for(&shock, cfg)?;
    if profile.is_none() {
        return Err(Error::validation(
            "delta",
            "the refinement study needs a shock of positive strength",
        ));
    }
    let ks: Vec<f64> = (0..r.levels).map(|k| k as f64).collect();
    fan_out(cfg.jobs, &ks, |k| {
        let f = 0.5f64.powi(k as i32);
        let dy = r.dy * f;
        let dtau = if r.fixed_dtau { r.dtau } else { r.dtau * f };
        let mut sc = cfg.solver_config(shock, r.tau_end);
        sc.dy = dy;
        sc.dtau = Some(dtau);
        sc.output_interval = r.output_interval;
        sc.ledger = true;
        sc.initial = InitialData::PerturbedProfile {
            amplitude: r.amplitude,
            width: r.width,
            center: 0.0,
        };
        let out = run(&sc, profile.as_ref())?;
        let identity_residual = out
            .ledger
            .iter()
            .map(|l| l.identity_residual)
            .fold(0.0, f64::max);
        Ok(Level {
            dy,
            dtau,
            identity_residual,
            output: out,
        })
    })
}

pub fn refinement_study(cfg: &StudyConfig) -> Result<StudyReport> {
    let levels = refinement_levels(cfg)?;
    let mut rep = StudyReport::new("refine", &cfg.hash());
    for l in &levels {
        let mut row = SummaryRow::new("resolution", l.dy);
        row.identity_residual = Some(l.identity_residual);
        row.conservation_drift = Some(l.output.conservation_drift);
        row.dy = Some(l.dy);
        row.dtau = Some(l.dtau);
        rep.rows.push(row);
        rep.ledgers
            .push((format!("dy{}", l.dy), l.output.ledger.clone()));
    }
    let band = cfg.bands.refinement_ratio;
    let ratios: Vec<f64> = levels
        .windows(2)
        .map(|w| w[0].identity_residual / w[1].identity_residual)
        .collect();
    rep.criteria.push(Criterion::new(
        "identity_residual_ratio",
        ratios.iter().all(|&q| in_band(q, band)),
        format!("ratios {ratios:?} in [{}, {}]", band.0, band.1),
    ));
    let drifts: Vec<f64> = levels.iter().map(|l| l.output.conservation_drift).collect();
    drift_criterion(&mut rep, cfg, &drifts);
    Ok(rep)
}

/// Single run of the configured shock and initial data to `tau_end`.
pub fn simulate(cfg: &StudyConfig) -> Result<(StudyReport, RunOutput)> {
    cfg.validate()?;
    let shock = cfg.shock()?;
    let profile = profile_for(&shock, cfg)?;
    let sc = cfg.solver_config(shock, cfg.tau_end);
    let out = run(&sc, profile.as_ref())?;
    let mut rep = StudyReport::new("simulate", &cfg.hash());
    let mut row = SummaryRow::new("tau_end", cfg.tau_end);
    row.away_error = out.samples.last().and_then(|s| s.away_error);
    row.physical_shift = out.samples.last().map(|s| s.shift.abs());
    row.max_shift_ratio = Some(shift_ratio(
        &out.samples
            .iter()
            .map(|s| (s.shift_rate.abs(), s.psi_linf))
            .collect::<Vec<_>>(),
    ));
    row.identity_residual = Some(
        out.ledger
            .iter()
            .map(|l| l.identity_residual)
            .fold(0.0, f64::max),
    );
    row.conservation_drift = Some(out.conservation_drift);
    row.dy = Some(cfg.solver.dy);
    row.dtau = Some(out.dtau);
    rep.rows.push(row);
    rep.ledgers.push(("run".into(), out.ledger.clone()));
    drift_criterion(&mut rep, cfg, &[out.conservation_drift]);
    Ok((rep, out))
}

/// Summary CSV text with the fixed header, also for an empty study.
pub fn summary_csv(rows: &[SummaryRow]) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    let ser = |e: csv::Error| Error::Domain(format!("summary serialization: {e}"));
    w.write_record(SUMMARY_COLUMNS).map_err(ser)?;
    for r in rows {
        w.serialize(r).map_err(ser)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Domain(format!("summary serialization: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Domain(e.to_string()))
}

/// Pass/fail document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub study: String,
    pub config_hash: String,
    /// `"pass"`, `"fail"` or `"no criteria"`.
    pub status: String,
    pub criteria: Vec<Criterion>,
    pub slopes: Vec<SlopeReport>,
}

pub fn verdict(report: &StudyReport) -> Verdict {
    let status = if report.criteria.is_empty() {
        "no criteria"
    } else if report.passed() {
        "pass"
    } else {
        "fail"
    };
    Verdict {
        study: report.study.clone(),
        config_hash: report.config_hash.clone(),
        status: status.into(),
        criteria: report.criteria.clone(),
        slopes: report.slopes.clone(),
    }
}

fn write(path: PathBuf, text: &str) -> Result<PathBuf> {
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Write `summary-<hash>.csv`, `ledger-<hash>-<label>.csv` per run and
/// `verdict-<hash>.json` into `dir`; returns the paths written.
pub fn emit_report(report: &StudyReport, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let h = &report.config_hash;
    let stem = format!("{}-{h}", report.study);
    let mut paths = vec![write(
        dir.join(format!("{stem}-summary.csv")),
        &summary_csv(&report.rows)?,
    )?];
    for (label, rows) in &report.ledgers {
        paths.push(write(
            dir.join(format!("{stem}-ledger-{label}.csv")),
            &ledger_csv(rows)?,
        )?);
    }
    let json =
        serde_json::to_string_pretty(&verdict(report)).map_err(|e| Error::Domain(e.to_string()))?;
    paths.push(write(
        dir.join(format!("{stem}-verdict.json")),
        &(json + "\n"),
    )?);
    Ok(paths)
}
