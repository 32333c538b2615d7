//! Adaptive Dormand-Prince 5(4) integration for small autonomous systems,
//! with cubic Hermite dense output built from the stored slopes.

use crate::error::{Error, Result};

/// One accepted node of an integrated trajectory.
#[derive(Debug, Clone, Copy)]
pub struct Node<const D: usize> {
    pub x: f64,
    pub y: [f64; D],
    pub dy: [f64; D],
}

#[derive(Debug, Clone)]
pub struct Trajectory<const D: usize> {
    pub nodes: Vec<Node<D>>,
}

#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rtol: 1e-10,
            atol: 1e-14,
            max_steps: 2_000_000,
        }
    }
}

// Dormand-Prince tableau
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy<const D: usize>(y: &[f64; D], terms: &[(f64, &[f64; D])]) -> [f64; D] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..D {
            out[i] += c * k[i];
        }
    }
    out
}

/// Integrate `y' = f(y)` from `(x0, y0)` with initial step `h0` until `stop`
/// returns true for an accepted node (that node is kept).
pub fn integrate<const D: usize, F, S>(
    f: F,
    x0: f64,
    y0: [f64; D],
    h0: f64,
    tol: Tolerances,
    mut stop: S,
) -> Result<Trajectory<D>>
where
    F: Fn(&[f64; D]) -> [f64; D],
    S: FnMut(&Node<D>) -> bool,
{
    let mut x = x0;
    let mut y = y0;
    let mut k1 = f(&y);
    let mut h = h0;
    let mut nodes = vec![Node { x, y, dy: k1 }];
    for _ in 0..tol.max_steps {
        let k2 = f(&axpy(&y, &[(h * A21, &k1)]));
        let k3 = f(&axpy(&y, &[(h * A31, &k1), (h * A32, &k2)]));
        let k4 = f(&axpy(&y, &[(h * A41, &k1), (h * A42, &k2), (h * A43, &k3)]));
        let k5 = f(&axpy(
            &y,
            &[
                (h * A51, &k1),
                (h * A52, &k2),
                (h * A53, &k3),
                (h * A54, &k4),
            ],
        ));
        let k6 = f(&axpy(
            &y,
            &[
                (h * A61, &k1),
                (h * A62, &k2),
                (h * A63, &k3),
                (h * A64, &k4),
                (h * A65, &k5),
            ],
        ));
        let y_new = axpy(
            &y,
            &[
                (h * B1, &k1),
                (h * B3, &k3),
                (h * B4, &k4),
                (h * B5, &k5),
                (h * B6, &k6),
            ],
        );
        let k7 = f(&y_new);
        let mut err = 0.0f64;
        for i in 0..D {
            let e =
                h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = tol.atol + tol.rtol * y[i].abs().max(y_new[i].abs());
            err = err.max((e / sc).abs());
        }
        if !err.is_finite() {
            h *= 0.1;
            continue;
        }
        if err <= 1.0 {
            x += h;
            y = y_new;
            k1 = k7;
            let node = Node { x, y, dy: k1 };
            nodes.push(node);
            if stop(&node) {
                return Ok(Trajectory { nodes });
            }
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
        if h.abs() < 1e-300 {
            return Err(Error::Integrator("step size underflow".into()));
        }
    }
    Err(Error::Integrator(format!(
        "exceeded {} steps",
        tol.max_steps
    )))
}

/// Cubic Hermite interpolant on `[x0, x1]` with end values and slopes.
#[inline]
pub fn hermite(x0: f64, x1: f64, y0: f64, y1: f64, d0: f64, d1: f64, x: f64) -> (f64, f64) {
    let h = x1 - x0;
    let t = (x - x0) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    let val = h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
    let dt00 = 6.0 * t2 - 6.0 * t;
    let dt10 = 3.0 * t2 - 4.0 * t + 1.0;
    let dt01 = -6.0 * t2 + 6.0 * t;
    let dt11 = 3.0 * t2 - 2.0 * t;
    let der = (dt00 * y0 + dt01 * y1) / h + dt10 * d0 + dt11 * d1;
    (val, der)
}

impl<const D: usize> Trajectory<D> {
    pub fn first(&self) -> &Node<D> {
        &self.nodes[0]
    }

    pub fn last(&self) -> &Node<D> {
        self.nodes.last().expect("trajectory has at least one node")
    }

    /// Dense output at `x` (clamped to the trajectory span).
    pub fn eval(&self, x: f64) -> [f64; D] {
        let n = &self.nodes;
        if x <= n[0].x {
            return n[0].y;
        }
        if x >= n[n.len() - 1].x {
            return n[n.len() - 1].y;
        }
        let j = n.partition_point(|node| node.x <= x).max(1);
        let (a, b) = (&n[j - 1], &n[j]);
        std::array::from_fn(|i| hermite(a.x, b.x, a.y[i], b.y[i], a.dy[i], b.dy[i], x).0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_period() {
        let tol = Tolerances {
            rtol: 1e-11,
            atol: 1e-13,
            max_steps: 100_000,
        };
        let two_pi = 2.0 * std::f64::consts::PI;
        let traj = integrate(
            |y: &[f64; 2]| [y[1], -y[0]],
            0.0,
            [1.0, 0.0],
            0.01,
            tol,
            |n| n.x >= two_pi,
        )
        .unwrap();
        let y = traj.eval(two_pi);
        assert!((y[0] - 1.0).abs() < 1e-8 && y[1].abs() < 1e-8, "{y:?}");
        let q = traj.eval(0.25 * two_pi);
        assert!(q[0].abs() < 1e-7 && (q[1] + 1.0).abs() < 1e-7, "{q:?}");
    }

    #[test]
    fn hermite_reproduces_cubics() {
        let p = |x: f64| 2.0 * x * x * x - x * x + 0.5 * x - 3.0;
        let dp = |x: f64| 6.0 * x * x - 2.0 * x + 0.5;
        let (v, d) = hermite(0.3, 1.1, p(0.3), p(1.1), dp(0.3), dp(1.1), 0.77);
        assert!((v - p(0.77)).abs() < 1e-13);
        assert!((d - dp(0.77)).abs() < 1e-12);
    }
}
