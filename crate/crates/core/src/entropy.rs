//! Weighted relative entropy around a shifted viscous shock: the weight,
//! the shift dynamics and the discrete bookkeeping of the weighted L2
//! identity on solver snapshots.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::gas::{GasParams, State};
use crate::hugoniot::ShockWave;
use crate::profile::{Profile, ProfilePoint};

/// `Phi(z) = z - 1 - ln z`, the convex kernel of the relative entropy.
pub fn phi_kernel(z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Domain(format!("Phi needs z > 0, got {z}")));
    }
    Ok(phi(z))
}

// accurate near z = 1 where the three terms cancel
#[inline]
fn phi(z: f64) -> f64 {
    let x = z - 1.0;
    x - x.ln_1p()
}

/// `R Theta Phi(v/V) + psi^2/2 + R Theta/(gamma-1) Phi(theta/Theta)` for the
/// state `s` against the reference `reference`.
pub fn relative_entropy_density(s: &State, reference: &State, g: &GasParams) -> Result<f64> {
    s.validate()?;
    reference.validate()?;
    Ok(entropy_density(
        s.v,
        s.u,
        s.theta,
        reference.v,
        reference.u,
        reference.theta,
        g,
    ))
}

#[inline]
fn entropy_density(v: f64, u: f64, th: f64, vv: f64, uu: f64, tt: f64, g: &GasParams) -> f64 {
    let psi = u - uu;
    g.r * tt * phi(v / vv) + 0.5 * psi * psi + g.cv() * tt * phi(th / tt)
}

/// Normalized pressure coordinate `z = (p- - P)/delta` of a profile point,
/// evaluated from whichever end state is closer so that `0 <= z <= 1` holds
/// exactly for monotone profiles.
pub fn pressure_fraction(p: &Profile, pt: &ProfilePoint) -> f64 {
    let g = &p.gas;
    let (l, r) = (&p.shock.left, &p.shock.right);
    let delta = p.shock.delta;
    // p- - P and P - p+ written as sums of same-signed terms
    let from_left = g.r * (l.theta * (pt.v - l.v) + l.v * (l.theta - pt.theta)) / (l.v * pt.v);
    let z_left = from_left / delta;
    if z_left <= 0.5 {
        return z_left;
    }
    let from_right = g.r * (r.v * (pt.theta - r.theta) + r.theta * (r.v - pt.v)) / (r.v * pt.v);
    1.0 - from_right / delta
}

/// Derivative of the profile pressure `P = R Theta / V` along `xi`.
#[inline]
pub fn pressure_slope(g: &GasParams, pt: &ProfilePoint) -> f64 {
    g.r * (pt.dtheta * pt.v - pt.theta * pt.dv) / (pt.v * pt.v)
}

/// Weight `a = 1 + (p- - P)/sqrt(delta)` and its derivative at `xi`.
pub fn weight_at(p: &Profile, xi: f64) -> (f64, f64) {
    let pt = p.eval(xi);
    weight_of(p, &pt)
}

fn weight_of(p: &Profile, pt: &ProfilePoint) -> (f64, f64) {
    let sd = p.shock.delta.sqrt();
    let a = 1.0 + sd * pressure_fraction(p, pt);
    let da = -pressure_slope(&p.gas, pt) / sd;
    (a, da)
}

/// Weight samples on the profile grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Weight {
    pub xi: Vec<f64>,
    pub a: Vec<f64>,
    pub da: Vec<f64>,
}

impl Weight {
    pub fn from_profile(p: &Profile) -> Result<Self> {
        if !(p.shock.delta > 0.0) {
            return Err(Error::InvalidParameter {
                name: "delta",
                reason: "weight needs a shock of positive strength".into(),
            });
        }
        let (a, da) = p.xi.iter().map(|&x| weight_at(p, x)).unzip();
        Ok(Weight {
            xi: p.xi.clone(),
            a,
            da,
        })
    }
}

/// `alpha+ = (gamma+1)/(2 gamma) * s3 / p+`.
pub fn alpha_plus(shock: &ShockWave, g: &GasParams) -> f64 {
    (g.gamma + 1.0) / (2.0 * g.gamma) * shock.s3 / shock.p_plus(g)
}

/// Shift constant
/// `M = (gamma+1)^2/(2 alpha+ v+^2) * (2 nu (gamma-1)^2 + R gamma)/(nu (gamma-1)^2 + R gamma)`.
pub fn shift_constant(shock: &ShockWave, g: &GasParams) -> f64 {
    let gm = g.gamma;
    let vp = shock.right.v;
    let k = g.nu * (gm - 1.0).powi(2);
    (gm + 1.0).powi(2) / (2.0 * alpha_plus(shock, g) * vp * vp) * (2.0 * k + g.r * gm)
        / (k + g.r * gm)
}

/// Logistic rate `delta alpha+ v+ R gamma / (nu (gamma-1)^2 + R gamma)` of the
/// pressure coordinate, with `nu = kappa/eps` and `xi` measured in units of `eps`.
pub fn logistic_rate(p: &Profile) -> f64 {
    let g = &p.gas;
    let gm = g.gamma;
    let nu = p.kappa / p.eps;
    p.shock.delta * alpha_plus(&p.shock, g) * p.shock.right.v * g.r * gm
        / (nu * (gm - 1.0).powi(2) + g.r * gm)
        / p.eps
}

/// Pressure coordinate samples with their slope, and the largest deviation of
/// `z_xi / (z (1 - z))` from [`logistic_rate`] over samples with `z` in the band.
#[derive(Debug, Clone, PartialEq)]
pub struct PressureCoordinate {
    pub z: Vec<f64>,
    pub dz: Vec<f64>,
    pub rate_residual: f64,
}

pub fn z_coordinate(p: &Profile, band: (f64, f64)) -> PressureCoordinate {
    let target = logistic_rate(p);
    let delta = p.shock.delta;
    let mut z = Vec::with_capacity(p.len());
    let mut dz = Vec::with_capacity(p.len());
    let mut worst = 0.0f64;
    for &x in &p.xi {
        let pt = p.eval(x);
        let zz = pressure_fraction(p, &pt);
        let d = -pressure_slope(&p.gas, &pt) / delta;
        if zz >= band.0 && zz <= band.1 {
            worst = worst.max((d / (zz * (1.0 - zz)) - target).abs());
        }
        z.push(zz);
        dz.push(d);
    }
    PressureCoordinate {
        z,
        dz,
        rate_residual: worst,
    }
}

/// Band of `z` used for the logistic-rate residual.
pub const Z_BAND: (f64, f64) = (0.05, 0.95);

/// `(lhs, rhs)` of the weighted Poincare inequality on `[0, 1]`,
/// `int |f - mean f|^2 <= 1/2 int z(1-z) |f'|^2`, for the piecewise-linear
/// interpolant of samples on a uniform grid. Both sides are integrated exactly
/// for the interpolant (Simpson per cell for the quadratic, the cell moment of
/// `z(1-z)` for the constant slopes).
pub fn poincare_gap(f: &[f64]) -> Result<(f64, f64)> {
    let n = f.len();
    if n < 3 {
        return Err(Error::InvalidParameter {
            name: "f",
            reason: format!("need at least 3 samples, got {n}"),
        });
    }
    let h = 1.0 / (n - 1) as f64;
    let mean: f64 = f.windows(2).map(|w| 0.5 * (w[0] + w[1]) * h).sum();
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for (i, w) in f.windows(2).enumerate() {
        let (a, b) = (w[0] - mean, w[1] - mean);
        let m = 0.5 * (a + b);
        lhs += h / 6.0 * (a * a + 4.0 * m * m + b * b);
        let (z0, z1) = (i as f64 * h, (i + 1) as f64 * h);
        let moment = (z1 * z1 - z0 * z0) / 2.0 - (z1 * z1 * z1 - z0 * z0 * z0) / 3.0;
        let slope = (w[1] - w[0]) / h;
        rhs += 0.5 * moment * slope * slope;
    }
    Ok((lhs, rhs))
}

fn check_scaled(p: &Profile) -> Result<()> {
    if p.eps != 1.0 || p.kappa != p.gas.nu {
        return Err(Error::InvalidParameter {
            name: "profile",
            reason: format!(
                "expected the scaled profile (eps = 1, kappa = nu = {}), got eps = {}, kappa = {}",
                p.gas.nu, p.eps, p.kappa
            ),
        });
    }
    if !(p.shock.delta > 0.0) {
        return Err(Error::InvalidParameter {
            name: "delta",
            reason: "shift needs a shock of positive strength".into(),
        });
    }
    Ok(())
}

/// Trapezoid weights on a uniform grid of `n` nodes.
#[inline]
fn trap(i: usize, n: usize) -> f64 {
    if i == 0 || i + 1 == n {
        0.5
    } else {
        1.0
    }
}

/// Shift velocity
/// `dX/dtau = -(M/delta) int a (-P V_y/(s3 V) + U_y + p+ Theta_y/(s3 Theta)) (u - U) dy`
/// with the profile translated by `s3 tau + X`.
pub fn shift_rate(field: &Field, p: &Profile) -> Result<f64> {
    check_scaled(p)?;
    field.check_shape()?;
    let g = &p.gas;
    let sh = &p.shock;
    let (s3, pp) = (sh.s3, sh.p_plus(g));
    let origin = s3 * field.tau + field.shift;
    let n = field.grid.n;
    let mut acc = 0.0;
    for i in 0..n {
        let pt = p.eval(field.grid.y(i) - origin);
        if pt.dv == 0.0 && pt.dtheta == 0.0 {
            continue;
        }
        let (a, _) = weight_of(p, &pt);
        let big_p = g.p(pt.v, pt.theta);
        let k = -big_p * pt.dv / (s3 * pt.v) + pt.du + pp * pt.dtheta / (s3 * pt.theta);
        acc += trap(i, n) * a * k * (field.u[i] - pt.u);
    }
    Ok(-shift_constant(sh, g) / sh.delta * acc * field.grid.dy)
}

/// Per-output-time record of the weighted relative entropy bookkeeping.
///
/// The identity checked is the pointwise weighted L2 balance integrated over
/// the computational domain, with the flux terms evaluated at the two ends;
/// `identity_residual` is the absolute mismatch between its two sides.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ledger {
    pub tau: f64,
    #[serde(rename = "X")]
    pub shift: f64,
    #[serde(rename = "Xdot")]
    pub shift_rate: f64,
    pub weighted_entropy: f64,
    #[serde(rename = "dW_dtau")]
    pub entropy_rate: f64,
    #[serde(rename = "G1")]
    pub g1: f64,
    #[serde(rename = "G2")]
    pub g2: f64,
    #[serde(rename = "Gs")]
    pub gs: f64,
    #[serde(rename = "D1")]
    pub d1: f64,
    #[serde(rename = "D2")]
    pub d2: f64,
    pub shift_quadratic: f64,
    pub xdot_coupling: f64,
    #[serde(rename = "Y1")]
    pub y1: f64,
    #[serde(rename = "Y2")]
    pub y2: f64,
    #[serde(rename = "Y3")]
    pub y3: f64,
    pub identity_residual: f64,
    pub perturbation_l2: f64,
    pub psi_linf: f64,
}

/// Weighted entropy `int a E dy` of a snapshot.
pub fn weighted_entropy(field: &Field, p: &Profile) -> Result<f64> {
    check_scaled(p)?;
    field.check_shape()?;
    let g = &p.gas;
    let origin = p.shock.s3 * field.tau + field.shift;
    let n = field.grid.n;
    let mut w = 0.0;
    for i in 0..n {
        let pt = p.eval(field.grid.y(i) - origin);
        let (a, _) = weight_of(p, &pt);
        w += trap(i, n)
            * a
            * entropy_density(
                field.v[i],
                field.u[i],
                field.theta[i],
                pt.v,
                pt.u,
                pt.theta,
                g,
            );
    }
    Ok(w * field.grid.dy)
}

/// Second-order derivative of samples: centered inside, one-sided at the ends.
fn derivative(f: &[f64], dy: f64) -> Vec<f64> {
    let n = f.len();
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        d[i] = (f[i + 1] - f[i - 1]) / (2.0 * dy);
    }
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * dy);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * dy);
    d
}

/// Evaluate every term of the weighted L2 identity at `cur`, using `prev` and
/// `next` (one step `dtau` either side) for the time derivative of the
/// weighted entropy. `xdot` is the shift velocity at `cur`.
pub fn term_ledger(
    prev: &Field,
    cur: &Field,
    next: &Field,
    p: &Profile,
    xdot: f64,
    dtau: f64,
) -> Result<Ledger> {
    check_scaled(p)?;
    for f in [prev, cur, next] {
        f.check_shape()?;
        if f.grid != cur.grid {
            return Err(Error::GridMismatch(
                "ledger snapshots live on different grids".into(),
            ));
        }
    }
    if !(dtau > 0.0) {
        return Err(Error::InvalidParameter {
            name: "dtau",
            reason: format!("{dtau} must be positive"),
        });
    }
    let g = &p.gas;
    let sh = &p.shock;
    let (gm, r, cv, nu) = (g.gamma, g.r, g.cv(), g.nu);
    let (s3, pp) = (sh.s3, sh.p_plus(g));
    let (vp, tp) = (sh.right.v, sh.right.theta);
    let n = cur.grid.n;
    let dy = cur.grid.dy;
    let origin = s3 * cur.tau + cur.shift;

    let pts: Vec<ProfilePoint> = (0..n).map(|i| p.eval(cur.grid.y(i) - origin)).collect();
    let psi: Vec<f64> = (0..n).map(|i| cur.u[i] - pts[i].u).collect();
    let zeta: Vec<f64> = (0..n).map(|i| cur.theta[i] - pts[i].theta).collect();
    let dpsi = derivative(&psi, dy);
    let dzeta = derivative(&zeta, dy);

    let mut t = Terms::default();
    for i in 0..n {
        let w = trap(i, n);
        let pt = &pts[i];
        let (v, th) = (cur.v[i], cur.theta[i]);
        let (a, ay) = weight_of(p, pt);
        let big_p = r * pt.theta / pt.v;
        let pres = r * th / v;
        let phi_ = v - pt.v;
        let (ps, ze, psy, zey) = (psi[i], zeta[i], dpsi[i], dzeta[i]);
        let fv = phi(v / pt.v);
        let ft = phi(th / pt.theta);
        let fti = phi(pt.theta / th);
        let ent = r * pt.theta * fv + 0.5 * ps * ps + cv * pt.theta * ft;
        let (vy, uy, ty) = (pt.dv, pt.du, pt.dtheta);
        let tyy_over_v = pt.d2theta / pt.v - ty * vy / (pt.v * pt.v);

        t.w += w * a * ent;
        t.flux_a += w * ay * (s3 * ent - (pres - big_p) * ps);
        t.ay_ent += w * ay * ent;
        t.c1 += w * a * (big_p / v * phi_ * vy + ps * uy + ze / th * cv * ty);
        t.c2 += w * a * (big_p * phi_ * phi_ / (pt.v * v) * vy - fv * r * ty + fti * cv * ty);
        t.s1 += w * a * uy * big_p * (phi(pt.v * th / (pt.theta * v)) + gm * fv);
        t.s2 += w * a * (nu * tyy_over_v + uy * uy / pt.v) * ((gm - 1.0) * fv - fti);
        t.d1 += w * a * pt.theta * psy * psy / (v * th);
        t.d2 += w * nu * a * pt.theta * zey * zey / (v * th * th);
        t.b4 += w
            * a
            * (uy * phi_ / (pt.v * v) * psy
                + 2.0 * uy * ze / (v * th) * psy
                + nu * ty * ze / (v * th * th) * zey
                + nu * pt.theta / pt.v * ty * phi_ / (v * th * th) * zey);
        t.b5 -= w
            * a
            * (uy * uy / pt.v * phi_ * ze / (v * th)
                + nu * ty * ty / pt.v * phi_ * ze / (v * th * th));
        t.b6 -= w * ay * (ps * psy / v + nu * ze * zey / (v * th));
        t.b7 += w * ay * (uy / pt.v * phi_ * ps / v + nu * ty / pt.v * phi_ * ze / (v * th));

        let q1 = phi_ + ps / s3;
        let q2 = ze - pp * ps / (cv * s3);
        t.g1 += w * ay * s3 * pp / (2.0 * vp) * q1 * q1;
        t.g2 += w * ay * cv * s3 / (2.0 * tp) * q2 * q2;
        t.gs += w * uy.abs() * ps * ps;
        t.y1 += w * a * (big_p / pt.v * q1 * vy + cv * q2 * ty / pt.theta);
        t.y2 -= w * a * ty * (r * fv + cv * ft);
        t.l2 += w * (phi_ * phi_ + ps * ps + ze * ze);
        t.psi_inf = t.psi_inf.max(ps.abs());
    }
    t.scale(dy);

    // end fluxes [.]_{left}^{right}
    let du = derivative(&cur.u, dy);
    let dth = derivative(&cur.theta, dy);
    let end = |i: usize| -> (f64, f64) {
        let pt = &pts[i];
        let (a, _) = weight_of(p, pt);
        let (v, th) = (cur.v[i], cur.theta[i]);
        let hyper = a * (r * th / v - r * pt.theta / pt.v) * psi[i];
        let visc = a * (du[i] / v - pt.du / pt.v) * psi[i]
            + nu * a * (dth[i] / v - pt.dtheta / pt.v) * zeta[i] / th;
        (hyper, visc)
    };
    let (hl, vl) = end(0);
    let (hr, vr) = end(n - 1);

    let w_prev = weighted_entropy(prev, p)?;
    let w_next = weighted_entropy(next, p)?;
    let dwdt = (w_next - w_prev) / (2.0 * dtau);

    let xdot_coupling = xdot * (t.ay_ent - t.c1 - t.c2);
    let lhs = dwdt + t.flux_a + (hr - hl) + xdot_coupling + t.s1 - t.s2;
    let rhs = (vr - vl) - t.d1 - t.d2 + t.b4 + t.b5 + t.b6 + t.b7;

    Ok(Ledger {
        tau: cur.tau,
        shift: cur.shift,
        shift_rate: xdot,
        weighted_entropy: t.w,
        entropy_rate: dwdt,
        g1: t.g1,
        g2: t.g2,
        gs: t.gs,
        d1: t.d1,
        d2: t.d2,
        shift_quadratic: sh.delta / shift_constant(sh, g) * xdot * xdot,
        xdot_coupling,
        y1: t.y1,
        y2: t.y2,
        y3: -t.ay_ent,
        identity_residual: (lhs - rhs).abs(),
        perturbation_l2: t.l2.sqrt(),
        psi_linf: t.psi_inf,
    })
}

#[derive(Default)]
struct Terms {
    w: f64,
    flux_a: f64,
    ay_ent: f64,
    c1: f64,
    c2: f64,
    s1: f64,
    s2: f64,
    d1: f64,
    d2: f64,
    b4: f64,
    b5: f64,
    b6: f64,
    b7: f64,
    g1: f64,
    g2: f64,
    gs: f64,
    y1: f64,
    y2: f64,
    l2: f64,
    psi_inf: f64,
}

impl Terms {
    fn scale(&mut self, dy: f64) {
        for x in [
            &mut self.w,
            &mut self.flux_a,
            &mut self.ay_ent,
            &mut self.c1,
            &mut self.c2,
            &mut self.s1,
            &mut self.s2,
            &mut self.d1,
            &mut self.d2,
            &mut self.b4,
            &mut self.b5,
            &mut self.b6,
            &mut self.b7,
            &mut self.g1,
            &mut self.g2,
            &mut self.gs,
            &mut self.y1,
            &mut self.y2,
            &mut self.l2,
        ] {
            *x *= dy;
        }
    }
}

/// Column order of ledger CSVs.
pub const LEDGER_COLUMNS: [&str; 18] = [
    "tau",
    "X",
    "Xdot",
    "weighted_entropy",
    "dW_dtau",
    "G1",
    "G2",
    "Gs",
    "D1",
    "D2",
    "shift_quadratic",
    "xdot_coupling",
    "Y1",
    "Y2",
    "Y3",
    "identity_residual",
    "perturbation_l2",
    "psi_linf",
];

/// Ledger rows as CSV, one row per output time, header always present.
pub fn ledger_csv(rows: &[Ledger]) -> Result<String> {
    let ser = |e: csv::Error| Error::Domain(format!("ledger serialization: {e}"));
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    w.write_record(LEDGER_COLUMNS).map_err(ser)?;
    for row in rows {
        w.serialize(row).map_err(ser)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Domain(format!("ledger serialization: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Domain(e.to_string()))
}
