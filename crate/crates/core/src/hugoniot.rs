//! Rankine-Hugoniot end states and speeds for admissible 3-shocks.
//!
//! The Hugoniot locus through a right state is parametrized by the left
//! specific volume `v_minus`, which is monotone along the compressive branch.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gas::{lambda3, pressure, total_energy, GasParams, State};

const NEWTON_MAX_ITER: usize = 50;
const NEWTON_TOL: f64 = 1e-13;
const RH_TOL: f64 = 1e-10;

/// An admissible (or degenerate, `delta == 0`) 3-shock.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShockWave {
    pub left: State,
    pub right: State,
    pub s3: f64,
    pub delta: f64,
}

impl ShockWave {
    /// Assemble a shock from two end states, computing speed and strength.
    pub fn from_states(left: State, right: State, g: &GasParams) -> Result<Self> {
        left.validate()?;
        right.validate()?;
        let s3 = shock_speed(&left, &right, g)?;
        Ok(ShockWave {
            left,
            right,
            s3,
            delta: wave_strength(&left, &right, g),
        })
    }

    /// Zero-strength shock sitting on the right state, moving at `lambda3`.
    pub fn trivial(right: State, g: &GasParams) -> Self {
        ShockWave {
            left: right,
            right,
            s3: lambda3(&right, g),
            delta: 0.0,
        }
    }

    pub fn p_minus(&self, g: &GasParams) -> f64 {
        pressure(&self.left, g)
    }

    pub fn p_plus(&self, g: &GasParams) -> f64 {
        pressure(&self.right, g)
    }

    /// Max-norm of the Rankine-Hugoniot residual.
    pub fn rh_error(&self, g: &GasParams) -> f64 {
        let (a, b, c) = rh_residual(&self.left, &self.right, self.s3, g);
        a.abs().max(b.abs()).max(c.abs())
    }
}

/// Positive root of `s^2 = -(p+ - p-)/(v+ - v-)`.
pub fn shock_speed(left: &State, right: &State, g: &GasParams) -> Result<f64> {
    let dp = pressure(right, g) - pressure(left, g);
    let dv = right.v - left.v;
    let product = dp * dv;
    if !(product < 0.0) {
        return Err(Error::NonCompressive { product });
    }
    Ok((-dp / dv).sqrt())
}

/// The three jump relations evaluated at `(left, right, s3)`.
pub fn rh_residual(left: &State, right: &State, s3: f64, g: &GasParams) -> (f64, f64, f64) {
    let (pm, pp) = (pressure(left, g), pressure(right, g));
    let r1 = -s3 * (right.v - left.v) - (right.u - left.u);
    let r2 = -s3 * (right.u - left.u) + (pp - pm);
    let r3 = -s3 * (total_energy(right, g) - total_energy(left, g)) + (pp * right.u - pm * left.u);
    (r1, r2, r3)
}

/// Lax condition `lambda3(right) < s3 < lambda3(left)`.
pub fn check_lax(shock: &ShockWave, g: &GasParams) -> bool {
    lambda3(&shock.right, g) < shock.s3 && shock.s3 < lambda3(&shock.left, g)
}

pub fn wave_strength(left: &State, right: &State, g: &GasParams) -> f64 {
    (pressure(left, g) - pressure(right, g)).abs()
}

/// Solve the jump relations for `(u-, theta-, s3)` given `v_minus`.
///
/// Damped Newton on `(theta-, s3)` with `u- = u+ + s3 (v+ - v-)` eliminated.
pub fn solve_left_state(right: &State, v_minus: f64, g: &GasParams) -> Result<ShockWave> {
    right.validate()?;
    if !(v_minus > 0.0) {
        return Err(Error::InvalidParameter {
            name: "v_minus",
            reason: format!("{v_minus} must be positive"),
        });
    }
    if v_minus > right.v {
        return Err(Error::InvalidOrdering {
            v_minus,
            v_right: right.v,
        });
    }
    if v_minus == right.v {
        return Ok(ShockWave::trivial(*right, g));
    }

    let dv = right.v - v_minus;
    let pp = pressure(right, g);
    let cv = g.cv();
    let e_plus = total_energy(right, g);

    let residual = |theta: f64, s: f64| -> [f64; 2] {
        let um = right.u + s * dv;
        let pm = g.r * theta / v_minus;
        let em = cv * theta + 0.5 * um * um;
        [
            s * s * dv + pp - pm,
            -s * (e_plus - em) + pp * right.u - pm * um,
        ]
    };
    let norm = |r: [f64; 2]| r[0].abs().max(r[1].abs());

    let mut theta = right.theta;
    let mut s = lambda3(right, g);
    let mut res = residual(theta, s);
    let mut iterations = 0;
    while norm(res) > NEWTON_TOL {
        if iterations == NEWTON_MAX_ITER {
            return Err(Error::NewtonDiverged {
                iterations,
                residual: norm(res),
            });
        }
        iterations += 1;

        let um = right.u + s * dv;
        let pm = g.r * theta / v_minus;
        let em = cv * theta + 0.5 * um * um;
        let j11 = -g.r / v_minus;
        let j12 = 2.0 * s * dv;
        let j21 = s * cv - g.r * um / v_minus;
        let j22 = -(e_plus - em) + s * um * dv - pm * dv;
        let det = j11 * j22 - j12 * j21;
        if det == 0.0 || !det.is_finite() {
            return Err(Error::NewtonDiverged {
                iterations,
                residual: norm(res),
            });
        }
        let d_theta = (res[0] * j22 - res[1] * j12) / det;
        let d_s = (j11 * res[1] - j21 * res[0]) / det;

        let mut lambda = 1.0;
        loop {
            let t_new = theta - lambda * d_theta;
            let s_new = s - lambda * d_s;
            if t_new > 0.0 && s_new > 0.0 {
                let r_new = residual(t_new, s_new);
                if norm(r_new) < norm(res) || lambda < 1e-6 {
                    theta = t_new;
                    s = s_new;
                    res = r_new;
                    break;
                }
            }
            lambda *= 0.5;
            if lambda < 1e-12 {
                return Err(Error::NewtonDiverged {
                    iterations,
                    residual: norm(res),
                });
            }
        }
    }

    let left = State::new(v_minus, right.u + s * dv, theta);
    let shock = ShockWave {
        left,
        right: *right,
        s3: s,
        delta: wave_strength(&left, right, g),
    };
    let err = shock.rh_error(g);
    if err >= RH_TOL {
        return Err(Error::NewtonDiverged {
            iterations,
            residual: err,
        });
    }
    Ok(shock)
}

/// Bisect `v_minus` so the constructed shock has strength `delta` to within `1e-8`.
pub fn solve_for_strength(right: &State, delta: f64, g: &GasParams) -> Result<ShockWave> {
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(Error::InvalidParameter {
            name: "delta",
            reason: format!("{delta} must be non-negative"),
        });
    }
    if delta == 0.0 {
        return Ok(ShockWave::trivial(*right, g));
    }
    // Maximal compression on the Hugoniot: v-/v+ -> (gamma-1)/(gamma+1), where p- blows up.
    let v_min = right.v * (g.gamma - 1.0) / (g.gamma + 1.0);
    let mut hi = right.v;
    let mut lo = right.v;
    let mut bracketed = false;
    for k in 1..=40 {
        let trial = v_min + (right.v - v_min) * 0.5f64.powi(k);
        let shock = solve_left_state(right, trial, g)?;
        if shock.delta >= delta {
            lo = trial;
            bracketed = true;
            break;
        }
        hi = trial;
    }
    if !bracketed {
        return Err(Error::StrengthUnreachable {
            target: delta,
            lo: v_min,
            hi: right.v,
        });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let shock = solve_left_state(right, mid, g)?;
        if (shock.delta - delta).abs() < 1e-11 {
            return Ok(shock);
        }
        // delta decreases as v_minus increases
        if shock.delta > delta {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 * right.v {
            break;
        }
    }
    let shock = solve_left_state(right, 0.5 * (lo + hi), g)?;
    if (shock.delta - delta).abs() < 1e-8 {
        Ok(shock)
    } else {
        Err(Error::StrengthUnreachable {
            target: delta,
            lo,
            hi,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gas(gamma: f64) -> GasParams {
        GasParams::new(gamma, 1.0, 1.0).unwrap()
    }

    /// Independent route: the energy jump reduces to a relation linear in
    /// theta-, which is bisected here without touching the Newton path.
    fn bisection_left_state(right: &State, v_minus: f64, g: &GasParams) -> (f64, f64, f64) {
        let pp = pressure(right, g);
        let h = |theta: f64| {
            g.cv() * (theta - right.theta)
                + 0.5 * (g.r * theta / v_minus + pp) * (v_minus - right.v)
        };
        let (mut lo, mut hi) = (right.theta * 1e-3, right.theta * 1e3);
        assert!(h(lo) * h(hi) < 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if h(lo) * h(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let theta = 0.5 * (lo + hi);
        let s = ((g.r * theta / v_minus - pp) / (right.v - v_minus)).sqrt();
        (right.u + s * (right.v - v_minus), theta, s)
    }

    #[test]
    fn speed_of_simple_pair() {
        let g = gas(1.4);
        let s = shock_speed(&State::new(1.0, 0.0, 2.0), &State::new(2.0, 0.0, 2.0), &g).unwrap();
        assert!((s - 1.0).abs() < 1e-15);
        let a = State::new(1.0, 0.0, 1.0);
        assert!(matches!(
            shock_speed(&a, &a, &g),
            Err(Error::NonCompressive { .. })
        ));
    }

    #[test]
    fn strength_examples() {
        let g = gas(1.4);
        assert_eq!(
            wave_strength(&State::new(1.0, 0.0, 2.0), &State::new(2.0, 0.0, 2.0), &g),
            1.0
        );
        let a = State::new(1.3, 0.2, 0.7);
        assert_eq!(wave_strength(&a, &a, &g), 0.0);
    }

    #[test]
    fn residual_vanishes_on_equal_states_and_is_linear_in_u_minus() {
        let g = gas(5.0 / 3.0);
        let a = State::new(1.3, 0.2, 0.7);
        assert_eq!(rh_residual(&a, &a, 0.77, &g), (0.0, 0.0, 0.0));

        let right = State::new(1.0, 0.0, 1.0);
        let sh = solve_left_state(&right, 0.9, &g).unwrap();
        let mut bumped = sh.left;
        bumped.u += 1e-3;
        let (r0, _, _) = rh_residual(&sh.left, &sh.right, sh.s3, &g);
        let (r1, _, _) = rh_residual(&bumped, &sh.right, sh.s3, &g);
        assert!((r1 - r0 - 1e-3).abs() < 1e-15);
    }

    #[test]
    fn newton_matches_bisection_oracle() {
        let g = gas(5.0 / 3.0);
        let right = State::new(1.0, 0.0, 1.0);
        let sh = solve_left_state(&right, 0.9, &g).unwrap();
        assert!(sh.rh_error(&g) < 1e-12);
        let (u, theta, s) = bisection_left_state(&right, 0.9, &g);
        assert!((sh.left.u - u).abs() < 1e-10, "{} vs {}", sh.left.u, u);
        assert!((sh.left.theta - theta).abs() < 1e-10);
        assert!((sh.s3 - s).abs() < 1e-10);
        assert!((shock_speed(&sh.left, &sh.right, &g).unwrap() - sh.s3).abs() < 1e-10);
        assert!(check_lax(&sh, &g));
    }

    #[test]
    fn degenerate_and_invalid_inputs() {
        let g = gas(5.0 / 3.0);
        let right = State::new(1.0, 0.0, 1.0);
        let sh = solve_left_state(&right, 1.0, &g).unwrap();
        assert_eq!(sh.left, right);
        assert_eq!(sh.delta, 0.0);
        assert!((sh.s3 - (g.gamma * pressure(&right, &g) / right.v).sqrt()).abs() < 1e-15);
        assert!(!check_lax(&sh, &g));
        assert!(matches!(
            solve_left_state(&right, 1.1, &g),
            Err(Error::InvalidOrdering { .. })
        ));
    }

    #[test]
    fn swapped_states_fail_lax() {
        let g = gas(1.4);
        let sh = solve_left_state(&State::new(1.0, 0.0, 1.0), 0.85, &g).unwrap();
        let swapped = ShockWave {
            left: sh.right,
            right: sh.left,
            ..sh
        };
        assert!(check_lax(&sh, &g));
        assert!(!check_lax(&swapped, &g));
    }

    #[test]
    fn strength_is_linear_in_volume_jump() {
        // closed-form Hugoniot pressure ratio for a polytropic gas
        let gm = 5.0 / 3.0;
        let g = gas(gm);
        let right = State::new(1.0, 0.0, 1.0);
        let oracle = |vm: f64| {
            let ratio = ((gm + 1.0) - (gm - 1.0) * vm) / ((gm + 1.0) * vm - (gm - 1.0));
            ratio - 1.0
        };
        let jumps = [0.1, 0.05, 0.025, 0.0125, 0.00625];
        let deltas: Vec<f64> = jumps
            .iter()
            .map(|&dv| {
                let d = solve_left_state(&right, 1.0 - dv, &g).unwrap().delta;
                assert!(
                    (d - oracle(1.0 - dv)).abs() < 1e-10 * d,
                    "dv {dv}: {d} vs {}",
                    oracle(1.0 - dv)
                );
                d
            })
            .collect();
        // local slopes approach 1 with an error that halves with the jump
        let local: Vec<f64> = deltas.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
        for w in local.windows(2) {
            let r = (w[0] - 1.0) / (w[1] - 1.0);
            assert!((r - 2.0).abs() < 0.15, "local slopes {local:?}");
        }
        let pts: Vec<(f64, f64)> = jumps
            .iter()
            .zip(&deltas)
            .map(|(a, b)| (a.ln(), b.ln()))
            .collect();
        let coarse = crate::fit::least_squares_slope(&pts[..3]).unwrap().slope;
        assert!((coarse - 1.0788).abs() < 1e-3, "coarse slope {coarse}");
        let fine = crate::fit::least_squares_slope(&pts[2..]).unwrap().slope;
        assert!((fine - 1.0).abs() < 0.05, "fine slope {fine}");
    }

    #[test]
    fn strength_wrapper_hits_target() {
        let g = gas(1.4);
        let right = State::new(1.0, 0.0, 1.0);
        for &d in &[0.4, 0.2, 0.1, 0.025] {
            let sh = solve_for_strength(&right, d, &g).unwrap();
            assert!((sh.delta - d).abs() < 1e-8);
            assert!(sh.rh_error(&g) < 1e-10);
        }
    }

    #[test]
    fn strength_equivalent_to_state_jump() {
        // delta / (|dv| + |du| + |dtheta|) settles to a constant as delta -> 0
        let g = gas(1.4);
        let right = State::new(1.0, 0.0, 1.0);
        let ratio = |d: f64| {
            let sh = solve_for_strength(&right, d, &g).unwrap();
            let jump = (sh.left.v - sh.right.v).abs()
                + (sh.left.u - sh.right.u).abs()
                + (sh.left.theta - sh.right.theta).abs();
            sh.delta / jump
        };
        let (k1, k2, k3) = (ratio(0.2), ratio(0.1), ratio(0.05));
        assert!(
            (k2 / k1 - 1.0).abs() < 0.1 && (k3 / k2 - 1.0).abs() < 0.05,
            "{k1} {k2} {k3}"
        );
    }
}
