//! Uniform grids and solution snapshots in the scaled variables `(y, tau)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gas::{GasParams, State};
use crate::hugoniot::ShockWave;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub y_left: f64,
    pub y_right: f64,
    pub n: usize,
    pub dy: f64,
}

impl Grid {
    pub fn new(y_left: f64, y_right: f64, n: usize) -> Result<Self> {
        if !(y_left < 0.0 && 0.0 < y_right) {
            return Err(Error::validation(
                "grid",
                format!("need y_left < 0 < y_right, got [{y_left}, {y_right}]"),
            ));
        }
        if n < 16 {
            return Err(Error::validation(
                "grid.n",
                format!("need at least 16 nodes, got {n}"),
            ));
        }
        Ok(Grid {
            y_left,
            y_right,
            n,
            dy: (y_right - y_left) / (n - 1) as f64,
        })
    }

    /// Grid with spacing `dy` that has a node at exactly `y = 0` and covers
    /// `[-left, right]`.
    pub fn with_origin_node(left: f64, right: f64, dy: f64) -> Result<Self> {
        if !(dy > 0.0 && left > 0.0 && right > 0.0) {
            return Err(Error::validation("grid", "margins and dy must be positive"));
        }
        let k_left = (left / dy).ceil() as usize;
        let k_right = (right / dy).ceil() as usize;
        let n = k_left + k_right + 1;
        if n < 16 {
            return Err(Error::validation(
                "grid.n",
                format!("need at least 16 nodes, got {n}"),
            ));
        }
        Ok(Grid {
            y_left: -(k_left as f64) * dy,
            y_right: k_right as f64 * dy,
            n,
            dy,
        })
    }

    #[inline]
    pub fn y(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.y_right
        } else {
            self.y_left + self.dy * i as f64
        }
    }
}

/// Solution `(v, u, theta)` at scaled time `tau`, with the current shift `X`.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub grid: Grid,
    pub v: Vec<f64>,
    pub u: Vec<f64>,
    pub theta: Vec<f64>,
    pub tau: f64,
    pub shift: f64,
}

impl Field {
    pub fn constant(grid: Grid, s: State) -> Self {
        Field {
            grid,
            v: vec![s.v; grid.n],
            u: vec![s.u; grid.n],
            theta: vec![s.theta; grid.n],
            tau: 0.0,
            shift: 0.0,
        }
    }

    pub fn state(&self, i: usize) -> State {
        State::new(self.v[i], self.u[i], self.theta[i])
    }

    pub fn check_shape(&self) -> Result<()> {
        let n = self.grid.n;
        if self.v.len() != n || self.u.len() != n || self.theta.len() != n {
            return Err(Error::GridMismatch(format!(
                "field arrays ({}, {}, {}) vs grid size {n}",
                self.v.len(),
                self.u.len(),
                self.theta.len()
            )));
        }
        Ok(())
    }

    pub fn check_positive(&self) -> Result<()> {
        for i in 0..self.grid.n {
            if !(self.v[i] > 0.0) {
                return Err(Error::NonPositiveState {
                    index: i,
                    what: "v",
                    value: self.v[i],
                });
            }
            if !(self.theta[i] > 0.0) {
                return Err(Error::NonPositiveState {
                    index: i,
                    what: "theta",
                    value: self.theta[i],
                });
            }
        }
        Ok(())
    }

    /// Trapezoid integrals of `(v, u, E)` with `E = e + u^2/2`.
    pub fn conserved_integrals(&self, g: &GasParams) -> [f64; 3] {
        let n = self.grid.n;
        let mut acc = [0.0; 3];
        for i in 0..n {
            let w = if i == 0 || i + 1 == n { 0.5 } else { 1.0 };
            acc[0] += w * self.v[i];
            acc[1] += w * self.u[i];
            acc[2] += w * (g.cv() * self.theta[i] + 0.5 * self.u[i] * self.u[i]);
        }
        acc.map(|a| a * self.grid.dy)
    }

    /// CSV snapshot: `# tau=..`, `# X=..`, `# config=..` comments then `y,v,u,theta` rows.
    pub fn to_csv(&self, config_hash: &str) -> String {
        use std::fmt::Write as _;
        let mut out = String::new();
        let _ = writeln!(out, "# tau={:?}", self.tau);
        let _ = writeln!(out, "# X={:?}", self.shift);
        let _ = writeln!(out, "# config={config_hash}");
        out.push_str("y,v,u,theta\n");
        for i in 0..self.grid.n {
            let _ = writeln!(
                out,
                "{:?},{:?},{:?},{:?}",
                self.grid.y(i),
                self.v[i],
                self.u[i],
                self.theta[i]
            );
        }
        out
    }
}

/// Riemann data: left state for `y < 0`, right state for `y > 0`, the average
/// at a node sitting exactly on `y = 0`; `X(0) = 0`.
pub fn init_field(grid: Grid, shock: &ShockWave) -> Field {
    let mut f = Field::constant(grid, shock.right);
    let (l, r) = (&shock.left, &shock.right);
    for i in 0..grid.n {
        let y = grid.y(i);
        let s = if y < 0.0 {
            *l
        } else if y > 0.0 {
            *r
        } else {
            State::new(
                0.5 * (l.v + r.v),
                0.5 * (l.u + r.u),
                0.5 * (l.theta + r.theta),
            )
        };
        f.v[i] = s.v;
        f.u[i] = s.u;
        f.theta[i] = s.theta;
    }
    f
}
