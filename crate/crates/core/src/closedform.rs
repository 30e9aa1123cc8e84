//! Explicit one-parameter families of equilateral triangles on skew edges,
//! their common objective, the rectangle-area functional and the thin-brick
//! construction.
//!
//! Both families are parametrized by `t`, the squared length of one brick
//! side, and realize an equilateral triangle of squared side
//! `f(t) = 2/3 (t + sqrt(t^2 + 3/t))` in a unit-volume brick.

use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::geometry::{Brick, EdgeId, Placement, SkewTriple, Axis};

/// Bracket width at which golden-section search stops.
pub const GOLDEN_TOL: f64 = 1e-10;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Angular slack accepted on the rectangle-angle domain checks.
const ANGLE_SLACK: f64 = 1e-12;

fn check_t(t: f64) -> Result<()> {
    if t.is_finite() && t > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain("parameter t must be finite and positive"))
    }
}

/// `2/3 (t + sqrt(t^2 + 3/t))`.
pub fn f_objective(t: f64) -> Result<f64> {
    check_t(t)?;
    Ok(objective(t))
}

#[inline]
fn objective(t: f64) -> f64 {
    2.0 / 3.0 * (t + libm::sqrt(t * t + 3.0 / t))
}

/// Minimizes `f` on `[lo, hi]` by golden-section search.
///
/// Returns the interior minimizer when there is one, otherwise whichever
/// endpoint is lower.
pub fn f_argmin(lo: f64, hi: f64) -> Result<(f64, f64)> {
    if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo < hi) {
        return Err(Error::Domain("interval must satisfy 0 < lo < hi"));
    }
    let t = golden_section(objective, lo, hi, GOLDEN_TOL);
    let candidates = [(lo, objective(lo)), (t, objective(t)), (hi, objective(hi))];
    let best = candidates
        .into_iter()
        .fold(candidates[1], |best, c| if c.1 < best.1 { c } else { best });
    Ok(best)
}

pub(crate) fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

/// Case 1: one triangle side is the brick edge of length `c`, the third
/// vertex is the midpoint of the opposite parallel edge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Case1Config {
    pub t: f64,
    pub a_sq: f64,
    pub b_sq: f64,
    pub c_sq: f64,
    pub d_sq: f64,
}

impl Case1Config {
    pub fn brick(&self) -> Brick {
        Brick::from_squares(self.a_sq, self.b_sq, self.c_sq).expect("positive squares")
    }

    /// A = (0,0,0), B = (0,0,c), C = (a,b,c/2) on the reference triple.
    pub fn placement(&self) -> Placement {
        Placement::new(SkewTriple::reference(), [0.0, 0.0, 0.5]).expect("valid lambdas")
    }
}

pub fn case1_config(t: f64) -> Result<Case1Config> {
    check_t(t)?;
    // Positive root of a^4 + t a^2 - 3/(4t) = 0, in conjugate form.
    let q = 3.0 / t;
    let a_sq = 0.5 * q / (t + libm::sqrt(t * t + q));
    let c_sq = 1.0 / (a_sq * t);
    Ok(Case1Config { t, a_sq, b_sq: t, c_sq, d_sq: c_sq })
}

/// Case 2: one triangle side is a diagonal of the `(b, c)` face, the third
/// vertex sits at fraction `z` along a `c`-directed edge of the opposite face.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Case2Config {
    pub t: f64,
    pub a_sq: f64,
    pub b_sq: f64,
    pub c_sq: f64,
    pub z: f64,
    pub d_sq: f64,
}

impl Case2Config {
    pub fn brick(&self) -> Brick {
        Brick::from_squares(self.a_sq, self.b_sq, self.c_sq).expect("positive squares")
    }

    /// A = (0,b,c) on X11, B = (0,0,0) on Y00, C = (a,0,z c) on Z10.
    ///
    /// Only realizable on the edge when `z <= 1`.
    pub fn placement(&self) -> Result<Placement> {
        let triple = SkewTriple::new(
            EdgeId::new(Axis::X, true, true),
            EdgeId::new(Axis::Y, false, false),
            EdgeId::new(Axis::Z, true, false),
        )?;
        if self.z > 1.0 {
            return Err(Error::NoSolution("third vertex falls beyond the end of its edge"));
        }
        Placement::new(triple, [0.0, 0.0, self.z])
    }
}

pub fn case2_config(t: f64) -> Result<Case2Config> {
    check_t(t)?;
    // c^2 = (-t + sqrt(4t^2 + 12/t)) / 3, rewritten without the subtraction.
    let root = libm::sqrt(4.0 * t * t + 12.0 / t);
    let c_sq = (t * t + 4.0 / t) / (t + root);
    let a_sq = 1.0 / (t * c_sq);
    let d_sq = t + c_sq;
    let z = d_sq / (2.0 * c_sq);
    Ok(Case2Config { t, a_sq, b_sq: t, c_sq, z, d_sq })
}

/// `|case1(t).d_sq - case2(t).d_sq|`.
pub fn case_consistency(t: f64) -> Result<f64> {
    Ok((case1_config(t)?.d_sq - case2_config(t)?.d_sq).abs())
}

/// Side lengths `|AB|`, `|AC|`, the angle `gamma` at A and the tilt `theta`
/// of the enclosing rectangle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RectParams {
    pub len_ab: f64,
    pub len_ac: f64,
    pub gamma: f64,
    pub theta: f64,
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma.is_finite() && gamma > 0.0 && gamma <= FRAC_PI_2 + ANGLE_SLACK {
        Ok(())
    } else {
        Err(Error::Domain("angle at A must lie in (0, pi/2]"))
    }
}

fn check_lengths(len_ab: f64, len_ac: f64) -> Result<()> {
    if len_ab.is_finite() && len_ac.is_finite() && len_ab > 0.0 && len_ac > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain("side lengths must be positive"))
    }
}

/// Area `|AB| |AC| cos(theta) sin(gamma + theta)`.
pub fn rect_area(p: &RectParams) -> Result<f64> {
    check_lengths(p.len_ab, p.len_ac)?;
    check_gamma(p.gamma)?;
    if !(p.theta >= 0.0 && p.theta <= FRAC_PI_2 - p.gamma + ANGLE_SLACK) {
        return Err(Error::Domain("tilt must lie in [0, pi/2 - gamma]"));
    }
    Ok(p.len_ab * p.len_ac * libm::cos(p.theta) * libm::sin(p.gamma + p.theta))
}

/// Minimal rectangle area over all admissible tilts, with every minimizing
/// tilt. Both ends of the tilt range tie unless the range is a single point.
pub fn min_rect_area(len_ab: f64, len_ac: f64, gamma: f64) -> Result<(Vec<f64>, f64)> {
    check_lengths(len_ab, len_ac)?;
    check_gamma(gamma)?;
    let area = len_ab * len_ac * libm::sin(gamma);
    let upper = FRAC_PI_2 - gamma;
    let minimizers = if upper > ANGLE_SLACK { alloc::vec![0.0, upper] } else { alloc::vec![0.0] };
    Ok((minimizers, area))
}

/// Thin-brick realization of an equilateral triangle of side `side_len`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThinBrick {
    pub brick: Brick,
    pub placement: Placement,
    pub config: Case1Config,
}

/// Solves `f(t) = side_len^2` on the increasing branch `t >= t*` and returns
/// the case-1 brick realizing it.
pub fn thin_brick_for_side(side_len: f64) -> Result<ThinBrick> {
    if !(side_len.is_finite() && side_len > 0.0) {
        return Err(Error::Domain("side length must be finite and positive"));
    }
    let target = side_len * side_len;
    let (t_star, f_star) = f_argmin(0.5, 1.0)?;
    if target < f_star {
        return Err(Error::NoSolution("side is below the smallest case-1 triangle"));
    }
    let mut lo = t_star;
    let mut hi = 2.0 * t_star;
    while objective(hi) < target {
        lo = hi;
        hi *= 2.0;
    }
    // Bisect until the bracket stops shrinking in floating point.
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 1e-15 * hi {
            break;
        }
        if objective(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = if (objective(lo) - target).abs() <= (objective(hi) - target).abs() { lo } else { hi };
    let config = case1_config(t)?;
    Ok(ThinBrick { brick: config.brick(), placement: config.placement(), config })
}
