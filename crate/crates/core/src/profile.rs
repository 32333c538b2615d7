//! Viscous 3-shock traveling waves.
//!
//! The traveling-wave system is reduced by its first integrals to two ODEs in
//! `(V, Theta)`; `U` follows algebraically from `U = u+ - s3 (V - v+)`. The
//! connection is shot out of the left state along the unstable direction and
//! translated so the pressure passes through `(p- + p+)/2` at `xi = 0`.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::least_squares_slope;
use crate::gas::{GasParams, State};
use crate::hugoniot::ShockWave;
use crate::ode::{hermite, integrate, Tolerances};

/// `(dV/dxi, dTheta/dxi)` from the first integrals, written against the left
/// state for `V` and the right state for `Theta`.
pub fn profile_rhs(
    v: f64,
    theta: f64,
    shock: &ShockWave,
    eps: f64,
    kappa: f64,
    g: &GasParams,
) -> (f64, f64) {
    let s = shock.s3;
    let (l, r) = (&shock.left, &shock.right);
    let pm = g.p(l.v, l.theta);
    let pp = g.p(r.v, r.theta);
    let p = g.p(v, theta);
    let dv = -(v / (eps * s)) * (s * s * (v - l.v) + (p - pm));
    let dtheta = (s * v / kappa)
        * (-g.cv() * (theta - r.theta) - pp * (v - r.v) + 0.5 * s * s * (v - r.v).powi(2));
    (dv, dtheta)
}

/// The same right-hand side written against the opposite end states; agrees
/// with [`profile_rhs`] whenever the Rankine-Hugoniot relations hold.
pub fn profile_rhs_mirrored(
    v: f64,
    theta: f64,
    shock: &ShockWave,
    eps: f64,
    kappa: f64,
    g: &GasParams,
) -> (f64, f64) {
    let s = shock.s3;
    let (l, r) = (&shock.left, &shock.right);
    let pm = g.p(l.v, l.theta);
    let pp = g.p(r.v, r.theta);
    let p = g.p(v, theta);
    let dv = -(v / (eps * s)) * (s * s * (v - r.v) + (p - pp));
    let dtheta = (s * v / kappa)
        * (-g.cv() * (theta - l.theta) - pm * (v - l.v) + 0.5 * s * s * (v - l.v).powi(2));
    (dv, dtheta)
}

/// Right-hand side with each component written against the nearer end state,
/// which keeps the tails free of cancellation between O(delta) terms.
pub fn profile_rhs_near(
    v: f64,
    theta: f64,
    shock: &ShockWave,
    eps: f64,
    kappa: f64,
    g: &GasParams,
) -> (f64, f64) {
    let a = profile_rhs(v, theta, shock, eps, kappa, g);
    let b = profile_rhs_mirrored(v, theta, shock, eps, kappa, g);
    let mid = 0.5 * (shock.p_minus(g) + shock.p_plus(g));
    if g.p(v, theta) >= mid {
        (a.0, b.1)
    } else {
        (b.0, a.1)
    }
}

/// Jacobian of [`profile_rhs`] with respect to `(V, Theta)`.
pub fn profile_jacobian(
    v: f64,
    theta: f64,
    shock: &ShockWave,
    eps: f64,
    kappa: f64,
    g: &GasParams,
) -> [[f64; 2]; 2] {
    let s = shock.s3;
    let (l, r) = (&shock.left, &shock.right);
    let pm = g.p(l.v, l.theta);
    let pp = g.p(r.v, r.theta);
    let inner = -g.cv() * (theta - r.theta) - pp * (v - r.v) + 0.5 * s * s * (v - r.v).powi(2);
    [
        [
            -(s * s * (2.0 * v - l.v) - pm) / (eps * s),
            -g.r / (eps * s),
        ],
        [
            (s / kappa) * inner + (s * v / kappa) * (-pp + s * s * (v - r.v)),
            -(s * v / kappa) * g.cv(),
        ],
    ]
}

/// Knobs for [`solve_profile`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileOptions {
    pub rtol: f64,
    pub endpoint_tol: f64,
    /// Initial offset from the left state, as a multiple of `delta`.
    pub eta_factor: f64,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        ProfileOptions {
            rtol: 1e-10,
            endpoint_tol: 1e-6,
            eta_factor: 1e-6,
        }
    }
}

/// Default half-width `40/delta * max(eps, kappa)`.
pub fn default_half_width(delta: f64, eps: f64, kappa: f64) -> f64 {
    40.0 / delta * eps.max(kappa)
}

/// Linearized exponential decay rates `(left, right)` of the profile tails:
/// the unstable eigenvalue at the left state and the slow stable eigenvalue
/// (in magnitude) at the right state.
pub fn tail_rates(shock: &ShockWave, eps: f64, kappa: f64, g: &GasParams) -> Option<(f64, f64)> {
    let (l, r) = (&shock.left, &shock.right);
    let (mu_left, _) = unstable_direction(profile_jacobian(l.v, l.theta, shock, eps, kappa, g))?;
    let j = profile_jacobian(r.v, r.theta, shock, eps, kappa, g);
    let tr = j[0][0] + j[1][1];
    let disc = (0.25 * (j[0][0] - j[1][1]).powi(2) + j[0][1] * j[1][0])
        .max(0.0)
        .sqrt();
    let slow = 0.5 * tr + disc;
    (slow < 0.0).then_some((mu_left, -slow))
}

/// Half-width at which the linearized tails have decayed to `tail` (absolute),
/// keeping the far samples well above double-precision resolution.
pub fn tail_half_width(
    shock: &ShockWave,
    eps: f64,
    kappa: f64,
    g: &GasParams,
    tail: f64,
) -> Option<f64> {
    let (a, b) = tail_rates(shock, eps, kappa, g)?;
    Some((shock.delta / tail).ln().max(1.0) / a.min(b))
}

/// Tail level targeted by [`tail_half_width`] for structural checks.
pub const STRUCTURE_TAIL: f64 = 1e-8;

/// Profile value and derivatives at one abscissa.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfilePoint {
    pub v: f64,
    pub u: f64,
    pub theta: f64,
    pub dv: f64,
    pub du: f64,
    pub dtheta: f64,
    /// Second derivative of `Theta`, from the chain rule on the ODE.
    pub d2theta: f64,
}

/// Sampled viscous shock profile on a uniform grid of `[-L, L]`.
#[derive(Debug, Clone)]
pub struct Profile {
    pub xi: Vec<f64>,
    pub v: Vec<f64>,
    pub u: Vec<f64>,
    pub theta: Vec<f64>,
    pub shock: ShockWave,
    pub eps: f64,
    pub kappa: f64,
    pub gas: GasParams,
    dv: Vec<f64>,
    dtheta: Vec<f64>,
}

impl Profile {
    fn from_samples(
        xi: Vec<f64>,
        v: Vec<f64>,
        theta: Vec<f64>,
        shock: ShockWave,
        eps: f64,
        kappa: f64,
        gas: GasParams,
    ) -> Self {
        let u = v
            .iter()
            .map(|&vv| shock.right.u - shock.s3 * (vv - shock.right.v))
            .collect();
        let (dv, dtheta) = v
            .iter()
            .zip(&theta)
            .map(|(&vv, &tt)| profile_rhs_near(vv, tt, &shock, eps, kappa, &gas))
            .unzip();
        Profile {
            xi,
            v,
            u,
            theta,
            shock,
            eps,
            kappa,
            gas,
            dv,
            dtheta,
        }
    }

    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }

    pub fn half_width(&self) -> f64 {
        self.xi[self.xi.len() - 1]
    }

    pub fn pressure_at(&self, i: usize) -> f64 {
        self.gas.p(self.v[i], self.theta[i])
    }

    /// Evaluate the profile at an arbitrary `xi`: cubic Hermite interpolation
    /// of `(V, Theta)` on the grid, derivatives from the ODE at the interpolated
    /// point, exact end states beyond the grid.
    pub fn eval(&self, x: f64) -> ProfilePoint {
        let n = self.xi.len();
        let (l, r) = (&self.shock.left, &self.shock.right);
        if x <= self.xi[0] {
            return ProfilePoint {
                v: l.v,
                u: l.u,
                theta: l.theta,
                dv: 0.0,
                du: 0.0,
                dtheta: 0.0,
                d2theta: 0.0,
            };
        }
        if x >= self.xi[n - 1] {
            return ProfilePoint {
                v: r.v,
                u: r.u,
                theta: r.theta,
                dv: 0.0,
                du: 0.0,
                dtheta: 0.0,
                d2theta: 0.0,
            };
        }
        let h = self.xi[1] - self.xi[0];
        let j = (((x - self.xi[0]) / h).floor() as usize).min(n - 2);
        let (x0, x1) = (self.xi[j], self.xi[j + 1]);
        let v = hermite(
            x0,
            x1,
            self.v[j],
            self.v[j + 1],
            self.dv[j],
            self.dv[j + 1],
            x,
        )
        .0;
        let theta = hermite(
            x0,
            x1,
            self.theta[j],
            self.theta[j + 1],
            self.dtheta[j],
            self.dtheta[j + 1],
            x,
        )
        .0;
        self.point(v, theta)
    }

    fn point(&self, v: f64, theta: f64) -> ProfilePoint {
        let sh = &self.shock;
        let (dv, dtheta) = profile_rhs_near(v, theta, sh, self.eps, self.kappa, &self.gas);
        let jac = profile_jacobian(v, theta, sh, self.eps, self.kappa, &self.gas);
        let d2theta = jac[1][0] * dv + jac[1][1] * dtheta;
        ProfilePoint {
            v,
            u: sh.right.u - sh.s3 * (v - sh.right.v),
            theta,
            dv,
            du: -sh.s3 * dv,
            dtheta,
            d2theta,
        }
    }

    /// Largest endpoint deviation of `(V, U, Theta)` from the end states.
    pub fn endpoint_errors(&self) -> (f64, f64) {
        let n = self.xi.len();
        let first = State::new(self.v[0], self.u[0], self.theta[0]);
        let last = State::new(self.v[n - 1], self.u[n - 1], self.theta[n - 1]);
        (
            first.distance(&self.shock.left),
            last.distance(&self.shock.right),
        )
    }

    /// Write as CSV: `# key=value` metadata lines, then `xi,V,U,Theta` rows.
    pub fn to_csv(&self) -> String {
        let sh = &self.shock;
        let mut out = String::new();
        let meta: [(&str, f64); 13] = [
            ("gamma", self.gas.gamma),
            ("r", self.gas.r),
            ("nu", self.gas.nu),
            ("eps", self.eps),
            ("kappa", self.kappa),
            ("s3", sh.s3),
            ("delta", sh.delta),
            ("v_minus", sh.left.v),
            ("u_minus", sh.left.u),
            ("theta_minus", sh.left.theta),
            ("v_plus", sh.right.v),
            ("u_plus", sh.right.u),
            ("theta_plus", sh.right.theta),
        ];
        for (k, v) in meta {
            let _ = writeln!(out, "# {k}={v:?}");
        }
        out.push_str("xi,V,U,Theta\n");
        for i in 0..self.xi.len() {
            let _ = writeln!(
                out,
                "{:?},{:?},{:?},{:?}",
                self.xi[i], self.v[i], self.u[i], self.theta[i]
            );
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }

    pub fn from_csv(text: &str, origin: &Path) -> Result<Self> {
        let parse_err = |message: String| Error::Parse {
            path: origin.to_path_buf(),
            message,
        };
        let mut meta = std::collections::BTreeMap::new();
        for line in text.lines().filter_map(|l| l.strip_prefix('#')) {
            if let Some((k, v)) = line.trim().split_once('=') {
                let val: f64 = v
                    .trim()
                    .parse()
                    .map_err(|_| parse_err(format!("bad metadata value `{line}`")))?;
                meta.insert(k.trim().to_string(), val);
            }
        }
        let get = |k: &str| {
            meta.get(k)
                .copied()
                .ok_or_else(|| parse_err(format!("missing metadata `{k}`")))
        };
        let gas = GasParams::new(get("gamma")?, get("r")?, get("nu")?)?;
        let shock = ShockWave {
            left: State::new(get("v_minus")?, get("u_minus")?, get("theta_minus")?),
            right: State::new(get("v_plus")?, get("u_plus")?, get("theta_plus")?),
            s3: get("s3")?,
            delta: get("delta")?,
        };
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let headers = rdr.headers().map_err(|e| parse_err(e.to_string()))?.clone();
        if headers.iter().collect::<Vec<_>>() != ["xi", "V", "U", "Theta"] {
            return Err(parse_err(format!("unexpected header {headers:?}")));
        }
        let (mut xi, mut v, mut theta) = (Vec::new(), Vec::new(), Vec::new());
        for rec in rdr.records() {
            let rec = rec.map_err(|e| parse_err(e.to_string()))?;
            let f = |i: usize| -> Result<f64> {
                rec[i]
                    .trim()
                    .parse()
                    .map_err(|_| parse_err(format!("bad number `{}`", &rec[i])))
            };
            xi.push(f(0)?);
            v.push(f(1)?);
            theta.push(f(3)?);
        }
        if xi.len() < 2 || xi.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(parse_err(
                "xi must be strictly increasing with at least two samples".into(),
            ));
        }
        Ok(Profile::from_samples(
            xi,
            v,
            theta,
            shock,
            get("eps")?,
            get("kappa")?,
            gas,
        ))
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Profile::from_csv(&text, path)
    }
}

/// Solve the connection problem and sample it on `N` uniform points of `[-L, L]`.
pub fn solve_profile(
    shock: &ShockWave,
    eps: f64,
    kappa: f64,
    half_width: f64,
    n: usize,
    g: &GasParams,
    opts: &ProfileOptions,
) -> Result<Profile> {
    if !(shock.delta > 0.0) {
        return Err(Error::InvalidParameter {
            name: "delta",
            reason: "profile needs a shock of positive strength".into(),
        });
    }
    if !(eps > 0.0 && kappa > 0.0) {
        return Err(Error::InvalidParameter {
            name: "eps/kappa",
            reason: "must be positive".into(),
        });
    }
    if n < 2 || !(half_width > 0.0) {
        return Err(Error::InvalidParameter {
            name: "N/L",
            reason: "need N >= 2 and L > 0".into(),
        });
    }

    let (l, r) = (shock.left, shock.right);
    let jac = profile_jacobian(l.v, l.theta, shock, eps, kappa, g);
    let (mu, w) = unstable_direction(jac).ok_or(Error::NoUnstableDirection)?;
    let eta = opts.eta_factor * shock.delta;
    let start = [l.v + eta * w[0], l.theta + eta * w[1]];

    // Integrate the deviation from the right state so the error control stays
    // relative all the way into the right tail.
    let p_mid = 0.5 * (shock.p_minus(g) + shock.p_plus(g));
    let pressure_of = |d: &[f64; 2]| g.p(r.v + d[0], r.theta + d[1]);
    let rhs = |d: &[f64; 2]| deviation_rhs(d, shock, eps, kappa, g);
    let start = [start[0] - r.v, start[1] - r.theta];
    let tol = Tolerances {
        rtol: opts.rtol,
        atol: 1e-300,
        max_steps: 2_000_000,
    };
    let max_len = 1e3 * half_width + 1e3 / mu;
    let mut x_cross: Option<f64> = None;
    let traj = integrate(rhs, 0.0, start, 0.1 / mu, tol, |node| {
        if x_cross.is_none() && pressure_of(&node.y) <= p_mid {
            x_cross = Some(node.x);
        }
        match x_cross {
            Some(xc) => node.x >= xc + half_width + 1.0,
            None => node.x > max_len,
        }
    })?;
    if x_cross.is_none() {
        let last = traj.last().y;
        return Err(Error::EndpointMiss {
            what: "pressure midpoint never reached; V",
            error: last[0].abs(),
            tolerance: opts.endpoint_tol,
        });
    }

    // Locate the midpoint crossing on the dense output by bisection.
    let nodes = &traj.nodes;
    let j = nodes
        .iter()
        .position(|nd| pressure_of(&nd.y) <= p_mid)
        .expect("crossing recorded");
    let x_mid = if j == 0 {
        nodes[0].x
    } else {
        let (mut a, mut b) = (nodes[j - 1].x, nodes[j].x);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if pressure_of(&traj.eval(m)) > p_mid {
                a = m;
            } else {
                b = m;
            }
            if b - a <= 1e-15 * (1.0 + m.abs()) {
                break;
            }
        }
        0.5 * (a + b)
    };

    let x_start = nodes[0].x;
    let h = 2.0 * half_width / (n - 1) as f64;
    let mut xi = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    let mut theta = Vec::with_capacity(n);
    for k in 0..n {
        let x = if k == n - 1 {
            half_width
        } else {
            -half_width + h * k as f64
        };
        let t = x + x_mid;
        let y = if t < x_start {
            // linearized unstable manifold
            let amp = eta * (mu * (t - x_start)).exp();
            [l.v + amp * w[0], l.theta + amp * w[1]]
        } else {
            let d = traj.eval(t);
            [r.v + d[0], r.theta + d[1]]
        };
        xi.push(x);
        v.push(y[0]);
        theta.push(y[1]);
    }

    let profile = Profile::from_samples(xi, v, theta, *shock, eps, kappa, *g);
    let n = profile.len();
    let checks = [
        ("left V", (profile.v[0] - l.v).abs()),
        ("left U", (profile.u[0] - l.u).abs()),
        ("left Theta", (profile.theta[0] - l.theta).abs()),
        ("right V", (profile.v[n - 1] - r.v).abs()),
        ("right U", (profile.u[n - 1] - r.u).abs()),
        ("right Theta", (profile.theta[n - 1] - r.theta).abs()),
    ];
    for (what, error) in checks {
        if !(error < opts.endpoint_tol) {
            return Err(Error::EndpointMiss {
                what,
                error,
                tolerance: opts.endpoint_tol,
            });
        }
    }
    Ok(profile)
}

/// Right-hand side in deviations `(V - v+, Theta - theta+)`, with every
/// bracket written against the right state so it stays O(deviation).
fn deviation_rhs(d: &[f64; 2], shock: &ShockWave, eps: f64, kappa: f64, g: &GasParams) -> [f64; 2] {
    let s = shock.s3;
    let r = &shock.right;
    let v = r.v + d[0];
    // P - p+ = R (v+ dTheta - theta+ dV) / (v+ V)
    let dp = g.r * (r.v * d[1] - r.theta * d[0]) / (r.v * v);
    let pp = g.p(r.v, r.theta);
    let dv = -(v / (eps * s)) * (s * s * d[0] + dp);
    let dtheta = (s * v / kappa) * (-g.cv() * d[1] - pp * d[0] + 0.5 * s * s * d[0] * d[0]);
    [dv, dtheta]
}

/// Largest positive eigenvalue of a real 2x2 matrix and its eigenvector,
/// oriented toward increasing `V` and normalized to unit length.
fn unstable_direction(j: [[f64; 2]; 2]) -> Option<(f64, [f64; 2])> {
    let (a, b, c, d) = (j[0][0], j[0][1], j[1][0], j[1][1]);
    let tr = a + d;
    let disc = 0.25 * (a - d).powi(2) + b * c;
    if disc < 0.0 {
        return None;
    }
    let mu = 0.5 * tr + disc.sqrt();
    if !(mu > 0.0) {
        return None;
    }
    let cand1 = [b, mu - a];
    let cand2 = [mu - d, c];
    let n1 = cand1[0].hypot(cand1[1]);
    let n2 = cand2[0].hypot(cand2[1]);
    let (mut w, nrm) = if n1 >= n2 { (cand1, n1) } else { (cand2, n2) };
    if nrm == 0.0 {
        return None;
    }
    w = [w[0] / nrm, w[1] / nrm];
    if w[0] < 0.0 {
        w = [-w[0], -w[1]];
    }
    Some((mu, w))
}

/// Structural diagnostics of a solved profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileReport {
    pub v_increasing: bool,
    pub u_decreasing: bool,
    pub theta_decreasing: bool,
    pub first_integral_error: f64,
    pub left_endpoint_error: f64,
    pub right_endpoint_error: f64,
    /// Fitted exponential rate of `|V - v-|` over the outer quarter of the left half.
    pub left_decay_rate: f64,
    /// Fitted exponential rate of `|V - v+|` over the outer quarter of the right half.
    pub right_decay_rate: f64,
    /// `max |V_xi| * eps / delta^2`.
    pub derivative_bound: f64,
    /// `|s3^2 - gamma p- / v-| / delta`.
    pub speed_gap_minus: f64,
    /// `|s3^2 - gamma p+ / v+| / delta`.
    pub speed_gap_plus: f64,
    pub midpoint_pressure_error: f64,
}

pub fn verify_profile(p: &Profile) -> ProfileReport {
    let g = &p.gas;
    let sh = &p.shock;
    let (l, r) = (&sh.left, &sh.right);
    let n = p.len();
    let lw = p.half_width();
    let v_increasing = p.v.windows(2).all(|w| w[1] > w[0]);
    let u_decreasing = p.u.windows(2).all(|w| w[1] < w[0]);
    let theta_decreasing = p.theta.windows(2).all(|w| w[1] < w[0]);
    let first_integral_error =
        p.v.iter()
            .zip(&p.u)
            .map(|(&v, &u)| (u - (r.u - sh.s3 * (v - r.v))).abs())
            .fold(0.0, f64::max);
    let (left_endpoint_error, right_endpoint_error) = p.endpoint_errors();

    let tail_rate = |side: f64, end: f64| -> f64 {
        let pts: Vec<(f64, f64)> = (0..n)
            .filter(|&i| side * p.xi[i] >= 0.75 * lw)
            .filter_map(|i| {
                let d = (p.v[i] - end).abs();
                (d > 1e-14 * end.abs().max(1.0)).then(|| (p.xi[i], d.ln()))
            })
            .collect();
        least_squares_slope(&pts)
            .map(|f| -side * f.slope)
            .unwrap_or(f64::NAN)
    };
    let left_decay_rate = tail_rate(-1.0, l.v);
    let right_decay_rate = tail_rate(1.0, r.v);

    let max_dv = p.dv.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let derivative_bound = max_dv * p.eps / (sh.delta * sh.delta);
    let s2 = sh.s3 * sh.s3;
    let speed_gap_minus = (s2 - g.gamma * g.p(l.v, l.theta) / l.v).abs() / sh.delta;
    let speed_gap_plus = (s2 - g.gamma * g.p(r.v, r.theta) / r.v).abs() / sh.delta;
    let mid = p.eval(0.0);
    let midpoint_pressure_error =
        (g.p(mid.v, mid.theta) - 0.5 * (sh.p_minus(g) + sh.p_plus(g))).abs();

    ProfileReport {
        v_increasing,
        u_decreasing,
        theta_decreasing,
        first_integral_error,
        left_endpoint_error,
        right_endpoint_error,
        left_decay_rate,
        right_decay_rate,
        derivative_bound,
        speed_gap_minus,
        speed_gap_plus,
        midpoint_pressure_error,
    }
}

/// Coefficient `(gamma+1)/(2 gamma p+) * R eps gamma / (kappa (gamma-1)^2 + R eps gamma)`.
pub fn volume_pressure_coefficient(shock: &ShockWave, eps: f64, kappa: f64, g: &GasParams) -> f64 {
    let gm = g.gamma;
    let pp = shock.p_plus(g);
    (gm + 1.0) / (2.0 * gm * pp) * (g.r * eps * gm) / (kappa * (gm - 1.0).powi(2) + g.r * eps * gm)
}

/// Maximum deviation of `(V-v-)/(P-p-) - (V-v+)/(P-p+)` from its leading-order
/// value, over samples whose pressure stays `band * delta` away from both ends.
pub fn volume_pressure_residual(p: &Profile, band: f64) -> f64 {
    let g = &p.gas;
    let sh = &p.shock;
    let (pm, pp) = (sh.p_minus(g), sh.p_plus(g));
    let target = volume_pressure_coefficient(sh, p.eps, p.kappa, g) * (sh.right.v - sh.left.v);
    let cut = band * sh.delta;
    (0..p.len())
        .filter_map(|i| {
            let pr = p.pressure_at(i);
            if (pr - pm).abs() <= cut || (pr - pp).abs() <= cut {
                return None;
            }
            let lhs = (p.v[i] - sh.left.v) / (pr - pm) - (p.v[i] - sh.right.v) / (pr - pp);
            Some((lhs - target).abs())
        })
        .fold(0.0, f64::max)
}

/// Default exclusion band for [`volume_pressure_residual`].
pub const VOLUME_PRESSURE_BAND: f64 = 1.0 / 20.0;
