//! Invariant suite behind the `verify` command, and the profile report.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::StudyConfig;
use crate::entropy::{poincare_gap, term_ledger};
use crate::error::Result;
use crate::field::Grid;
use crate::gas::{GasParams, State};
use crate::hugoniot::{check_lax, solve_left_state, ShockWave};
use crate::profile::{verify_profile, Profile};
use crate::solver::{profile_field, run, scaled_profile, InitialData};
use crate::study::{structure_profile, sweep_delta, Criterion, StudyReport, SummaryRow};

/// Random Hugoniot constructions: `(max RH residual, all Lax, Lax iff u+ < u-)`.
pub fn hugoniot_survey(count: usize, seed: u64) -> Result<(f64, bool, bool)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gammas = [1.4, 5.0 / 3.0, 2.0];
    let mut worst = 0.0f64;
    let mut all_lax = true;
    let mut equivalent = true;
    for k in 0..count {
        let g = GasParams::new(gammas[k % 3], 1.0, 1.0)?;
        let right = State::new(
            rng.gen_range(0.5..2.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(0.5..2.0),
        );
        let ratio: f64 = rng.gen_range(0.8..1.0);
        let sh = solve_left_state(&right, ratio * right.v, &g)?;
        worst = worst.max(sh.rh_error(&g));
        let lax = check_lax(&sh, &g);
        all_lax &= lax;
        equivalent &= lax == (sh.right.u < sh.left.u);
        // the reversed pair is an admissible jump but violates Lax
        let rev = ShockWave::from_states(sh.right, sh.left, &g)?;
        equivalent &= check_lax(&rev, &g) == (rev.right.u < rev.left.u);
    }
    Ok((worst, all_lax, equivalent))
}

/// Piecewise-linear test functions with slopes in `[-1, 1]` sampled on `n` nodes:
/// returns the smallest `rhs - lhs` of the weighted Poincare inequality.
pub fn poincare_survey(count: usize, n: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::INFINITY;
    for _ in 0..count {
        let pieces = rng.gen_range(1..12usize);
        let mut knots: Vec<f64> = (0..pieces - 1).map(|_| rng.gen::<f64>()).collect();
        knots.sort_by(f64::total_cmp);
        let slopes: Vec<f64> = (0..pieces).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let offset: f64 = rng.gen_range(-1.0..1.0);
        let f: Vec<f64> = (0..n)
            .map(|i| {
                let z = i as f64 / (n - 1) as f64;
                let mut val = offset;
                let mut left = 0.0;
                for (j, &s) in slopes.iter().enumerate() {
                    let right = knots.get(j).copied().unwrap_or(1.0);
                    val += s * (z.min(right) - left).max(0.0);
                    left = right;
                }
                val
            })
            .collect();
        let (lhs, rhs) = poincare_gap(&f)?;
        worst = worst.min(rhs - lhs);
    }
    Ok(worst)
}

/// Profile for the configured shock with its structural report.
pub fn profile_report(cfg: &StudyConfig) -> Result<(StudyReport, Profile)> {
    cfg.validate()?;
    let shock = cfg.shock()?;
    let p = structure_profile(&shock, cfg)?;
    let r = verify_profile(&p);
    let mut rep = StudyReport::new("profile", &cfg.hash());
    let mut row = SummaryRow::new("delta", shock.delta);
    row.decay_rate = Some(r.left_decay_rate.min(r.right_decay_rate));
    rep.rows.push(row);
    rep.criteria.push(Criterion::new(
        "monotone",
        r.v_increasing && r.u_decreasing && r.theta_decreasing,
        format!(
            "V up {}, U down {}, Theta down {}",
            r.v_increasing, r.u_decreasing, r.theta_decreasing
        ),
    ));
    let end = r.left_endpoint_error.max(r.right_endpoint_error);
    rep.criteria.push(Criterion::new(
        "endpoints",
        end < 1e-6,
        format!("endpoint error {end:e} < 1e-6"),
    ));
    rep.criteria.push(Criterion::new(
        "first_integral",
        r.first_integral_error < 1e-10,
        format!("|U - u+ + s3 (V - v+)| {:e}", r.first_integral_error),
    ));
    Ok((rep, p))
}

/// Cheap invariants: Hugoniot survey, profile structure, strength sweep,
/// weighted Poincare inequality, zero-perturbation ledger and a short
/// traveling-wave run.
pub fn invariant_suite(cfg: &StudyConfig) -> Result<StudyReport> {
    cfg.validate()?;
    let mut rep = StudyReport::new("verify", &cfg.hash());

    let (res, lax, eqv) = hugoniot_survey(100, 7)?;
    rep.criteria.push(Criterion::new(
        "hugoniot",
        res < 1e-10 && lax && eqv,
        format!("max residual {res:e}, Lax {lax}, Lax iff u+ < u- {eqv}"),
    ));

    let (prof, _) = profile_report(cfg)?;
    rep.rows.extend(prof.rows);
    rep.criteria.extend(prof.criteria);

    let sweep = sweep_delta(cfg)?;
    rep.rows.extend(sweep.rows);
    rep.slopes.extend(sweep.slopes);
    rep.criteria.extend(sweep.criteria);

    let gap = poincare_survey(1000, 1024, 11)?;
    let margin = 10.0 / (1024.0f64 * 1024.0);
    let (l, r) = poincare_gap(&(0..1024).map(|i| i as f64 / 1023.0).collect::<Vec<_>>())?;
    let eq = (l - 1.0 / 12.0).abs().max((r - 1.0 / 12.0).abs());
    rep.criteria.push(Criterion::new(
        "poincare",
        gap >= -margin && eq < 1e-10,
        format!("min rhs - lhs {gap:e} >= -{margin:e}; identity case off by {eq:e}"),
    ));

    let shock = cfg.shock()?;
    if shock.delta > 0.0 {
        let p = scaled_profile(&shock, &cfg.gas)?;
        let grid = Grid::with_origin_node(p.half_width(), p.half_width(), cfg.solver.dy)?;
        let snap = |tau: f64| {
            let mut f = profile_field(grid, &p, None);
            for i in 0..grid.n {
                let pt = p.eval(grid.y(i) - shock.s3 * tau);
                f.v[i] = pt.v;
                f.u[i] = pt.u;
                f.theta[i] = pt.theta;
            }
            f.tau = tau;
            f
        };
        let dt = 0.01;
        let l = term_ledger(&snap(0.0), &snap(dt), &snap(2.0 * dt), &p, 0.0, dt)?;
        rep.criteria.push(Criterion::new(
            "zero_perturbation_ledger",
            l.identity_residual < 1e-10 && l.weighted_entropy.abs() < 1e-10,
            format!(
                "residual {:e}, weighted entropy {:e}",
                l.identity_residual, l.weighted_entropy
            ),
        ));

        let mut sc = cfg.solver_config(shock, 5.0);
        sc.initial = InitialData::Profile;
        sc.output_interval = 0.5;
        let out = run(&sc, Some(&p))?;
        let f = &out.final_field;
        let origin = shock.s3 * f.tau;
        let dev = (0..f.grid.n)
            .map(|i| {
                f.state(i).distance(&{
                    let pt = p.eval(f.grid.y(i) - origin);
                    State::new(pt.v, pt.u, pt.theta)
                })
            })
            .fold(0.0, f64::max);
        let xmax = out
            .samples
            .iter()
            .map(|s| s.shift.abs())
            .fold(0.0, f64::max);
        rep.criteria.push(Criterion::new(
            "traveling_wave",
            dev < 1e-3 && xmax < 1e-3,
            format!("deviation {dev:e}, max |X| {xmax:e}"),
        ));
        rep.criteria.push(Criterion::new(
            "conservation",
            out.conservation_drift < cfg.bands.conservation_drift,
            format!("drift {:e}", out.conservation_drift),
        ));
    }
    Ok(rep)
}
