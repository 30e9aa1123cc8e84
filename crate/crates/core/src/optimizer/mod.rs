//! Numerical searches for large triangles on skew edges.
//!
//! Free brick dimensions are handled in normalized log coordinates. With
//! `m` the minimal side, `V` the volume and `L = ln(V / m^3)`, a brick with
//! sides `a, b, c` and `abc = V` maps to `s_i = ln(side_i / m) / L`, which
//! sum to one. The admissible bricks are exactly the points with every
//! `s_i >= 0`, so the two free coordinates `(s_a, s_b)` range over the
//! triangle `s_a, s_b >= 0`, `s_a + s_b <= 1`.

mod equilateral;
mod global;
pub(crate) mod pattern;
mod polish;

pub use equilateral::{max_equilateral_side, solve_equilateral_family, EQ_RESIDUAL_TOL};
pub use global::{global_max_equilateral, global_max_min_side};

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::{Brick, MIN_SIDE};

/// Bricks a search ranges over.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchDomain {
    pub min_side: f64,
    pub volume: f64,
    /// Pins the first two sides; the third follows from the volume.
    pub pinned: Option<[f64; 2]>,
}

impl Default for SearchDomain {
    fn default() -> Self {
        SearchDomain::admissible()
    }
}

impl SearchDomain {
    /// Unit volume, every side at least `1/sqrt(2)`.
    pub fn admissible() -> Self {
        SearchDomain { min_side: MIN_SIDE, volume: 1.0, pinned: None }
    }

    pub fn with_min_side(min_side: f64) -> Self {
        SearchDomain { min_side, ..SearchDomain::admissible() }
    }

    /// Only the brick `(a, b, volume / (a b))`.
    pub fn pinned(self, a: f64, b: f64) -> Self {
        SearchDomain { pinned: Some([a, b]), ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if !ok(self.min_side) || !ok(self.volume) {
            return Err(Error::Domain("minimal side and volume must be positive"));
        }
        if (self.min_side * self.min_side * self.min_side) > self.volume * (1.0 + 1e-12) {
            return Err(Error::Domain("no brick of this volume has every side above the minimum"));
        }
        if let Some([a, b]) = self.pinned {
            if !ok(a) || !ok(b) {
                return Err(Error::Domain("pinned sides must be positive"));
            }
            let brick = Brick::new(a, b, self.volume / (a * b))?;
            if !self.contains(&brick) {
                return Err(Error::Domain("pinned brick lies outside the domain"));
            }
        }
        Ok(())
    }

    /// Range `[min_side, volume / min_side^2]` of each free side.
    pub fn side_bounds(&self) -> (f64, f64) {
        (self.min_side, self.volume / (self.min_side * self.min_side))
    }

    /// Upper bound `volume / min_side` on the product of the two free sides.
    pub fn product_bound(&self) -> f64 {
        self.volume / self.min_side
    }

    pub fn contains(&self, brick: &Brick) -> bool {
        brick.satisfies(self.min_side, self.volume)
    }

    pub(crate) fn log_span(&self) -> f64 {
        libm::log(self.volume / (self.min_side * self.min_side * self.min_side)).max(0.0)
    }

    /// Brick at normalized coordinates `s`.
    pub(crate) fn brick_at(&self, s: [f64; 2]) -> Brick {
        let (a, b) = match self.pinned {
            Some([a, b]) => (a, b),
            None => {
                let span = self.log_span();
                let side = |si: f64| {
                    if si <= 0.0 {
                        self.min_side
                    } else {
                        self.min_side * libm::exp(span * si)
                    }
                };
                (side(s[0]), side(s[1]))
            }
        };
        Brick { a, b, c: self.volume / (a * b) }
    }

    /// Normalized coordinates of a brick's first two sides.
    #[cfg(test)]
    pub(crate) fn coords_of(&self, brick: &Brick) -> [f64; 2] {
        let span = self.log_span();
        if span == 0.0 {
            return [0.0, 0.0];
        }
        let s = |x: f64| libm::log(x / self.min_side) / span;
        [s(brick.a), s(brick.b)]
    }

    pub(crate) fn is_pinned(&self) -> bool {
        self.pinned.is_some()
    }
}

/// Projects `(s[0], s[1], 1 - s[0] - s[1])` onto the probability simplex.
pub(crate) fn project_simplex(s: &mut [f64]) {
    let v = [s[0], s[1], 1.0 - s[0] - s[1]];
    if v.iter().all(|&x| x >= 0.0) {
        return;
    }
    let mut sorted = v;
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (k, &x) in sorted.iter().enumerate() {
        cumsum += x;
        let t = (cumsum - 1.0) / (k as f64 + 1.0);
        if x - t > 0.0 {
            theta = t;
        }
    }
    s[0] = (v[0] - theta).max(0.0);
    s[1] = (v[1] - theta).max(0.0);
    if s[0] + s[1] > 1.0 {
        let excess = s[0] + s[1] - 1.0;
        if s[0] >= s[1] {
            s[0] -= excess;
        } else {
            s[1] -= excess;
        }
    }
}

/// Poll directions for the normalized side coordinates: the three edge
/// directions of the admissible triangle, both ways.
pub(crate) fn simplex_directions() -> Vec<[f64; 2]> {
    let r = core::f64::consts::FRAC_1_SQRT_2;
    alloc::vec![[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0], [r, -r], [-r, r]]
}

/// Search resolution and refinement controls.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchSettings {
    /// Samples per dimension of the coarse grids.
    pub grid_n: usize,
    /// Number of refined multi-starts.
    pub starts: usize,
    /// Convergence tolerance, also the witness window below the optimum.
    pub tol: f64,
    /// Newton iteration cap.
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for SearchSettings {
    fn default() -> Self {
        SearchSettings { grid_n: 33, starts: 16, tol: 1e-8, max_iter: 100, seed: 0 }
    }
}

impl SearchSettings {
    pub fn validate(&self) -> Result<()> {
        if self.grid_n < 2 {
            return Err(Error::Settings("grid_n must be at least 2"));
        }
        if self.starts == 0 {
            return Err(Error::Settings("starts must be at least 1"));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::Settings("tol must be positive"));
        }
        if self.max_iter == 0 {
            return Err(Error::Settings("max_iter must be at least 1"));
        }
        Ok(())
    }
}

#[cfg(feature = "parallel")]
pub(crate) fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(usize, &T) -> R + Sync + Send) -> Vec<R> {
    use rayon::prelude::*;
    items.par_iter().enumerate().map(|(i, x)| f(i, x)).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(usize, &T) -> R + Sync + Send) -> Vec<R> {
    items.iter().enumerate().map(|(i, x)| f(i, x)).collect()
}
