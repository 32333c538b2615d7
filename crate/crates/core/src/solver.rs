//! Explicit finite-difference solver for the scaled Navier-Stokes system
//! `v_t - u_y = 0`, `u_t + p_y = (u_y/v)_y`, `E_t + (p u)_y = (nu theta_y/v + u u_y/v)_y`
//! in conservative total-energy form, coupled to the shift ODE.

use serde::{Deserialize, Serialize};

use crate::entropy::{shift_rate, term_ledger, Ledger};
use crate::error::{Error, Result};
use crate::field::{init_field, Field, Grid};
use crate::gas::{lambda3, GasParams};
use crate::hugoniot::ShockWave;
use crate::profile::{default_half_width, solve_profile, tail_rates, Profile, ProfileOptions};

/// Initial data for a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    /// Step data with the jump at `y = 0`.
    Riemann,
    /// The viscous profile sampled at `y`.
    Profile,
    /// The profile plus `amplitude * exp(-((y - center)/width)^2)` on `u` and
    /// `theta` (half amplitude on `v`).
    PerturbedProfile {
        amplitude: f64,
        width: f64,
        center: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub gas: GasParams,
    pub shock: ShockWave,
    pub dy: f64,
    pub margin_left: f64,
    /// Room kept to the right of the final shock position `s3 tau_end`.
    pub margin_right: f64,
    pub cfl_advective: f64,
    pub cfl_diffusive: f64,
    /// Fixed step; `None` picks the largest stable step dividing the output interval.
    pub dtau: Option<f64>,
    pub tau_end: f64,
    pub output_interval: f64,
    pub h_exclusion: f64,
    pub initial: InitialData,
    pub ledger: bool,
}

/// Default far-field margin `max(50, 40/delta)`.
pub fn default_margin(delta: f64) -> f64 {
    if delta > 0.0 {
        (40.0 / delta).max(50.0)
    } else {
        50.0
    }
}

impl SolverConfig {
    pub fn new(gas: GasParams, shock: ShockWave, tau_end: f64) -> Self {
        let m = default_margin(shock.delta);
        SolverConfig {
            gas,
            shock,
            dy: 0.1,
            margin_left: m,
            margin_right: m,
            cfl_advective: 0.5,
            cfl_diffusive: 0.4,
            dtau: None,
            tau_end,
            output_interval: tau_end / 20.0,
            h_exclusion: 1.0,
            initial: InitialData::Riemann,
            ledger: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.gas.validate()?;
        let pos = |name: &str, x: f64| -> Result<()> {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(Error::validation(name, format!("{x} must be positive")))
            }
        };
        pos("dy", self.dy)?;
        pos("margin_left", self.margin_left)?;
        pos("margin_right", self.margin_right)?;
        pos("tau_end", self.tau_end)?;
        pos("output_interval", self.output_interval)?;
        pos("h_exclusion", self.h_exclusion)?;
        for (name, c) in [
            ("cfl_advective", self.cfl_advective),
            ("cfl_diffusive", self.cfl_diffusive),
        ] {
            if !(c > 0.0 && c < 1.0) {
                return Err(Error::validation(name, format!("{c} must lie in (0, 1)")));
            }
        }
        if let Some(dt) = self.dtau {
            pos("dtau", dt)?;
        }
        let k = self.tau_end / self.output_interval;
        if (k - k.round()).abs() > 1e-9 * k.max(1.0) {
            return Err(Error::validation("output_interval", "must divide tau_end"));
        }
        if let InitialData::PerturbedProfile { width, .. } = self.initial {
            pos("initial.width", width)?;
        }
        if self.initial != InitialData::Riemann && !(self.shock.delta > 0.0) {
            return Err(Error::validation(
                "initial",
                "profile data needs a shock of positive strength",
            ));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::with_origin_node(
            self.margin_left,
            self.shock.s3 * self.tau_end + self.margin_right,
            self.dy,
        )
    }
}

/// Scaled profile (`eps = 1`, `kappa = nu`) covering a domain of `40/delta * max(1, nu)`
/// at a sampling step of about `0.05`.
pub fn scaled_profile(shock: &ShockWave, g: &GasParams) -> Result<Profile> {
    let lw = default_half_width(shock.delta, 1.0, g.nu);
    let n = ((2.0 * lw / 0.05).ceil() as usize + 1).max(101);
    solve_profile(shock, 1.0, g.nu, lw, n, g, &ProfileOptions::default())
}

/// Time derivatives of `(v, u, E)` at every node.
#[derive(Debug, Clone, PartialEq)]
pub struct Tendency {
    pub v: Vec<f64>,
    pub u: Vec<f64>,
    pub e: Vec<f64>,
    /// Net inflow `F(left face) - F(right face)` of each conserved quantity
    /// through the outermost interior faces.
    pub boundary_inflow: [f64; 3],
}

pub fn rhs_eval(field: &Field, g: &GasParams) -> Result<Tendency> {
    field.check_shape()?;
    field.check_positive()?;
    Ok(tendency(&field.v, &field.u, &field.theta, field.grid.dy, g))
}

fn tendency(v: &[f64], u: &[f64], th: &[f64], dy: f64, g: &GasParams) -> Tendency {
    let n = v.len();
    let (r, nu) = (g.r, g.nu);
    // face fluxes of F in Q_t + F_y = 0
    let mut fv = vec![0.0; n - 1];
    let mut fu = vec![0.0; n - 1];
    let mut fe = vec![0.0; n - 1];
    for j in 0..n - 1 {
        let (pl, pr) = (r * th[j] / v[j], r * th[j + 1] / v[j + 1]);
        let vm = 0.5 * (v[j] + v[j + 1]);
        let um = 0.5 * (u[j] + u[j + 1]);
        let uy = (u[j + 1] - u[j]) / dy;
        let ty = (th[j + 1] - th[j]) / dy;
        fv[j] = -um;
        fu[j] = 0.5 * (pl + pr) - uy / vm;
        fe[j] = 0.5 * (pl * u[j] + pr * u[j + 1]) - nu * ty / vm - um * uy / vm;
    }
    let div = |f: &[f64]| {
        let mut d = vec![0.0; n];
        for i in 1..n - 1 {
            d[i] = -(f[i] - f[i - 1]) / dy;
        }
        d
    };
    Tendency {
        v: div(&fv),
        u: div(&fu),
        e: div(&fe),
        boundary_inflow: [fv[0] - fv[n - 2], fu[0] - fu[n - 2], fe[0] - fe[n - 2]],
    }
}

/// Stability limit `min(cfl_adv dy / max(|u| + lambda3), cfl_diff dy^2 v_min / max(1, nu))`.
pub fn stable_dtau(field: &Field, g: &GasParams, cfl_advective: f64, cfl_diffusive: f64) -> f64 {
    let mut lmax = 0.0f64;
    let mut vmin = f64::INFINITY;
    for i in 0..field.grid.n {
        lmax = lmax.max(field.u[i].abs() + lambda3(&field.state(i), g));
        vmin = vmin.min(field.v[i]);
    }
    let dy = field.grid.dy;
    (cfl_advective * dy / lmax).min(cfl_diffusive * dy * dy * vmin / g.nu.max(1.0))
}

/// Result of one time step.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub field: Field,
    /// Shift velocity at the start of the step.
    pub xdot: f64,
    /// Heun-weighted boundary inflow of `(v, u, E)` over the step.
    pub inflow: [f64; 3],
}

/// One Heun step of `(v, u, E, X)`. `profile` drives the shift; without one
/// (zero strength) the shift stays put.
pub fn step(
    field: &Field,
    profile: Option<&Profile>,
    dtau: f64,
    g: &GasParams,
    cfl: (f64, f64),
) -> Result<StepOutcome> {
    field.check_shape()?;
    field.check_positive()?;
    let limit = stable_dtau(field, g, cfl.0, cfl.1);
    if !(dtau > 0.0) || dtau > limit {
        return Err(Error::CflViolation { dtau, limit });
    }
    let xrate = |f: &Field| -> Result<f64> {
        match profile {
            Some(p) => shift_rate(f, p),
            None => Ok(0.0),
        }
    };
    let cv = g.cv();
    let n = field.grid.n;
    let energy = |f: &Field| -> Vec<f64> {
        (0..n)
            .map(|i| cv * f.theta[i] + 0.5 * f.u[i] * f.u[i])
            .collect()
    };
    let rebuild = |base: &Field,
                   e: &[f64],
                   v: Vec<f64>,
                   u: Vec<f64>,
                   tau: f64,
                   shift: f64|
     -> Result<Field> {
        let theta = (0..n)
            .map(|i| {
                if i == 0 || i + 1 == n {
                    base.theta[i]
                } else {
                    (e[i] - 0.5 * u[i] * u[i]) / cv
                }
            })
            .collect();
        let f = Field {
            grid: base.grid,
            v,
            u,
            theta,
            tau,
            shift,
        };
        f.check_positive()?;
        Ok(f)
    };

    let e0 = energy(field);
    let k1 = tendency(&field.v, &field.u, &field.theta, field.grid.dy, g);
    let x1 = xrate(field)?;
    let lin =
        |a: &[f64], k: &[f64]| -> Vec<f64> { a.iter().zip(k).map(|(a, k)| a + dtau * k).collect() };
    let e1: Vec<f64> = lin(&e0, &k1.e);
    let mid = rebuild(
        field,
        &e1,
        lin(&field.v, &k1.v),
        lin(&field.u, &k1.u),
        field.tau + dtau,
        field.shift + dtau * x1,
    )?;

    let k2 = tendency(&mid.v, &mid.u, &mid.theta, field.grid.dy, g);
    let x2 = xrate(&mid)?;
    let avg = |a: &[f64], ka: &[f64], kb: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|i| a[i] + 0.5 * dtau * (ka[i] + kb[i]))
            .collect()
    };
    let e2 = avg(&e0, &k1.e, &k2.e);
    let out = rebuild(
        field,
        &e2,
        avg(&field.v, &k1.v, &k2.v),
        avg(&field.u, &k1.u, &k2.u),
        field.tau + dtau,
        field.shift + 0.5 * dtau * (x1 + x2),
    )?;
    let inflow = [0, 1, 2].map(|c| 0.5 * dtau * (k1.boundary_inflow[c] + k2.boundary_inflow[c]));
    Ok(StepOutcome {
        field: out,
        xdot: x1,
        inflow,
    })
}

/// Largest componentwise distance to the inviscid shock (jump at `y = s3 tau`)
/// over nodes at least `h_scaled` away from the jump.
pub fn linf_error_away(field: &Field, shock: &ShockWave, tau: f64, h_scaled: f64) -> Result<f64> {
    if !(h_scaled > 0.0) {
        return Err(Error::InvalidParameter {
            name: "h_scaled",
            reason: format!("{h_scaled} must be positive"),
        });
    }
    field.check_shape()?;
    let front = shock.s3 * tau;
    let mut worst: Option<f64> = None;
    for i in 0..field.grid.n {
        let d = field.grid.y(i) - front;
        if d.abs() < h_scaled {
            continue;
        }
        let s = if d < 0.0 { &shock.left } else { &shock.right };
        let e = field.state(i).distance(s);
        worst = Some(worst.map_or(e, |w: f64| w.max(e)));
    }
    worst.ok_or(Error::EmptyRegion { h: h_scaled })
}

/// Diagnostics recorded at each output time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub tau: f64,
    #[serde(rename = "X")]
    pub shift: f64,
    #[serde(rename = "Xdot")]
    pub shift_rate: f64,
    pub psi_linf: f64,
    /// Away-from-shock error, absent when no node qualifies.
    pub away_error: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub samples: Vec<Sample>,
    pub ledger: Vec<Ledger>,
    pub final_field: Field,
    pub dtau: f64,
    pub steps: usize,
    /// Largest relative drift of the conserved integrals net of boundary flux.
    pub conservation_drift: f64,
}

/// Evolve the configured initial data to `tau_end`.
///
/// `profile` must be the scaled profile of `config.shock` when the strength is
/// positive; it is ignored otherwise.
pub fn run(config: &SolverConfig, profile: Option<&Profile>) -> Result<RunOutput> {
    config.validate()?;
    let g = &config.gas;
    let sh = &config.shock;
    let profile = if sh.delta > 0.0 {
        Some(profile.ok_or_else(|| {
            Error::validation(
                "profile",
                "a scaled profile is required for a shock of positive strength",
            )
        })?)
    } else {
        None
    };
    let grid = config.grid()?;
    let mut field = initial_field(config, grid, profile)?;

    let limit = stable_dtau(&field, g, config.cfl_advective, config.cfl_diffusive);
    let per_output = match config.dtau {
        Some(dt) => (config.output_interval / dt).round().max(1.0) as usize,
        None => (config.output_interval / (0.9 * limit)).ceil().max(1.0) as usize,
    };
    let dtau = config.output_interval / per_output as f64;
    let outputs = (config.tau_end / config.output_interval).round() as usize;
    let total = outputs * per_output;
    let cfl = (config.cfl_advective, config.cfl_diffusive);

    // footprint check uses the slow tail of the profile
    let width = profile
        .and_then(|p| tail_rates(&p.shock, 1.0, g.nu, g))
        .map(|(a, b)| 1.0 / a.min(b))
        .unwrap_or(0.0);

    let q0 = field.conserved_integrals(g);
    let scale0 = abs_integrals(&field, g);
    let mut inflow = [0.0; 3];
    let mut samples = Vec::with_capacity(outputs + 1);
    let mut ledger = Vec::new();
    let mut prev: Option<Field> = None;

    let psi_linf = |f: &Field| -> f64 {
        let origin = sh.s3 * f.tau + f.shift;
        match profile {
            Some(p) => (0..f.grid.n)
                .map(|i| (f.u[i] - p.eval(f.grid.y(i) - origin).u).abs())
                .fold(0.0, f64::max),
            None => {
                f.u.iter()
                    .map(|u| (u - sh.right.u).abs())
                    .fold(0.0, f64::max)
            }
        }
    };
    let record = |f: &Field, xdot: f64, samples: &mut Vec<Sample>| -> Result<()> {
        let front = sh.s3 * f.tau + f.shift;
        if front + 5.0 * width > grid.y_right {
            return Err(Error::DomainOutrun {
                front,
                margin: 5.0 * width,
                y_right: grid.y_right,
            });
        }
        let away_error = match linf_error_away(f, sh, f.tau, config.h_exclusion) {
            Ok(e) => Some(e),
            Err(Error::EmptyRegion { .. }) => None,
            Err(e) => return Err(e),
        };
        samples.push(Sample {
            tau: f.tau,
            shift: f.shift,
            shift_rate: xdot,
            psi_linf: psi_linf(f),
            away_error,
        });
        Ok(())
    };

    for k in 0..=total {
        let at_output = k % per_output == 0;
        if k == total {
            let xdot = match profile {
                Some(p) => shift_rate(&field, p)?,
                None => 0.0,
            };
            record(&field, xdot, &mut samples)?;
            break;
        }
        let out = step(&field, profile, dtau, g, cfl)?;
        if at_output {
            record(&field, out.xdot, &mut samples)?;
            if let (true, Some(pv), Some(p)) = (config.ledger, prev.as_ref(), profile) {
                ledger.push(term_ledger(pv, &field, &out.field, p, out.xdot, dtau)?);
            }
        }
        for (acc, q) in inflow.iter_mut().zip(out.inflow) {
            *acc += q;
        }
        let mut next = out.field;
        if (k + 1) % per_output == 0 {
            // keep output times exact instead of a sum of steps
            next.tau = ((k + 1) / per_output) as f64 * config.output_interval;
        }
        prev = Some(std::mem::replace(&mut field, next));
    }

    let q1 = field.conserved_integrals(g);
    let conservation_drift = (0..3)
        .map(|c| (q1[c] - q0[c] - inflow[c]).abs() / scale0[c].max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    Ok(RunOutput {
        samples,
        ledger,
        final_field: field,
        dtau,
        steps: total,
        conservation_drift,
    })
}

fn abs_integrals(f: &Field, g: &GasParams) -> [f64; 3] {
    let n = f.grid.n;
    let mut acc = [0.0; 3];
    for i in 0..n {
        let w = if i == 0 || i + 1 == n { 0.5 } else { 1.0 };
        acc[0] += w * f.v[i].abs();
        acc[1] += w * f.u[i].abs();
        acc[2] += w * (g.cv() * f.theta[i] + 0.5 * f.u[i] * f.u[i]);
    }
    acc.map(|a| a * f.grid.dy)
}

fn initial_field(config: &SolverConfig, grid: Grid, profile: Option<&Profile>) -> Result<Field> {
    match (config.initial, profile) {
        (InitialData::Riemann, _) => Ok(init_field(grid, &config.shock)),
        (InitialData::Profile, Some(p)) => Ok(profile_field(grid, p, None)),
        (
            InitialData::PerturbedProfile {
                amplitude,
                width,
                center,
            },
            Some(p),
        ) => {
            let f = profile_field(grid, p, Some((amplitude, width, center)));
            f.check_positive()?;
            Ok(f)
        }
        _ => Err(Error::validation(
            "initial",
            "profile data needs a shock of positive strength",
        )),
    }
}

/// Profile sampled at `y` (shift zero), optionally with a Gaussian bump.
pub fn profile_field(grid: Grid, p: &Profile, bump: Option<(f64, f64, f64)>) -> Field {
    let mut f = Field::constant(grid, p.shock.right);
    for i in 0..grid.n {
        let y = grid.y(i);
        let pt = p.eval(y);
        let b = bump.map_or(0.0, |(a, w, c)| a * (-((y - c) / w).powi(2)).exp());
        f.v[i] = pt.v + 0.5 * b;
        f.u[i] = pt.u + b;
        f.theta[i] = pt.theta + b;
    }
    f
}
