//! Equilateral placements on a fixed brick and skew triple.
//!
//! Fixing one edge parameter leaves two unknowns and two equations
//! (`|AB|^2 = |BC|^2 = |CA|^2`), solved by damped Newton with a
//! central-difference Jacobian. Sweeping the fixed parameter traces the
//! one-parameter solution family.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::{Brick, Placement, SkewTriple};
use crate::optimizer::SearchSettings;

/// Equilateral residual accepted for a solution, relative to
/// `max(1, mean squared side)`.
pub const EQ_RESIDUAL_TOL: f64 = 1e-10;

const NEWTON_TOL: f64 = 1e-12;
const JACOBIAN_STEP: f64 = 1e-7;
const DEFAULT_NEWTON_ITERS: usize = 100;
const DEDUP_TOL: f64 = 1e-8;
/// Start values for the two free parameters (a 4 x 4 grid).
const START_GRID: [f64; 4] = [0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0];
/// Distinct anchor-scan candidates that get refined.
const REFINE_SEEDS: usize = 3;
const REFINE_INITIAL_STEP: f64 = 0.1;
const REFINE_MAX_POLLS: usize = 20_000;

/// Squared sides `(|AB|^2, |BC|^2, |CA|^2)` for unclamped parameters.
#[inline]
pub(crate) fn squares(brick: &Brick, triple: &SkewTriple, l: &[f64; 3]) -> [f64; 3] {
    let [ex, ey, ez] = triple.edges();
    let p = ex.point_at(brick, l[0]);
    let q = ey.point_at(brick, l[1]);
    let r = ez.point_at(brick, l[2]);
    use crate::geometry::dist_sq;
    [dist_sq(&p, &q), dist_sq(&q, &r), dist_sq(&r, &p)]
}

#[inline]
fn scale_of(sq: &[f64; 3]) -> f64 {
    ((sq[0] + sq[1] + sq[2]) / 3.0).max(1.0)
}

#[inline]
fn residual(sq: &[f64; 3]) -> [f64; 2] {
    [sq[0] - sq[1], sq[0] - sq[2]]
}

#[inline]
fn norm_inf(r: &[f64; 2]) -> f64 {
    r[0].abs().max(r[1].abs())
}

#[inline]
pub(crate) fn eq_residual(sq: &[f64; 3]) -> f64 {
    (sq[0] - sq[1]).abs().max((sq[1] - sq[2]).abs())
}

#[inline]
pub(crate) fn is_equilateral(sq: &[f64; 3]) -> bool {
    eq_residual(sq) <= EQ_RESIDUAL_TOL * scale_of(sq)
}

/// Solves for the two parameters other than `fixed`, starting from `start`,
/// keeping every parameter inside `[0, 1]`.
pub(crate) fn solve_pair(
    brick: &Brick,
    triple: &SkewTriple,
    start: [f64; 3],
    fixed: usize,
    max_iter: usize,
) -> Option<[f64; 3]> {
    let free = match fixed {
        0 => [1, 2],
        1 => [0, 2],
        _ => [0, 1],
    };
    let mut x = start.map(|l| l.clamp(0.0, 1.0));
    let mut sq = squares(brick, triple, &x);
    let mut r = residual(&sq);
    let mut rn = norm_inf(&r);

    for _ in 0..max_iter {
        if rn <= NEWTON_TOL * scale_of(&sq) {
            return Some(x);
        }
        let mut jac = [[0.0; 2]; 2];
        for (col, &idx) in free.iter().enumerate() {
            let mut xp = x;
            let mut xm = x;
            xp[idx] += JACOBIAN_STEP;
            xm[idx] -= JACOBIAN_STEP;
            let rp = residual(&squares(brick, triple, &xp));
            let rm = residual(&squares(brick, triple, &xm));
            for row in 0..2 {
                jac[row][col] = (rp[row] - rm[row]) / (2.0 * JACOBIAN_STEP);
            }
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        let jnorm = jac.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        if !det.is_finite() || det.abs() <= 1e-14 * jnorm * jnorm {
            return None;
        }
        let delta = [
            -(jac[1][1] * r[0] - jac[0][1] * r[1]) / det,
            -(-jac[1][0] * r[0] + jac[0][0] * r[1]) / det,
        ];

        let mut alpha = 1.0;
        loop {
            let mut trial = x;
            for (k, &idx) in free.iter().enumerate() {
                trial[idx] = (x[idx] + alpha * delta[k]).clamp(0.0, 1.0);
            }
            let tsq = squares(brick, triple, &trial);
            let tr = residual(&tsq);
            let trn = norm_inf(&tr);
            if trn < rn {
                x = trial;
                sq = tsq;
                r = tr;
                rn = trn;
                break;
            }
            alpha *= 0.5;
            if alpha < 1e-12 {
                return None;
            }
        }
    }
    (rn <= NEWTON_TOL * scale_of(&sq)).then_some(x)
}

fn family(brick: &Brick, triple: &SkewTriple, anchor: f64, max_iter: usize) -> Vec<[f64; 3]> {
    let mut out: Vec<[f64; 3]> = Vec::new();
    for &lb in &START_GRID {
        for &lc in &START_GRID {
            let Some(sol) = solve_pair(brick, triple, [anchor, lb, lc], 0, max_iter) else {
                continue;
            };
            let sq = squares(brick, triple, &sol);
            if !is_equilateral(&sq) {
                continue;
            }
            let duplicate = out
                .iter()
                .any(|o| (o[1] - sol[1]).abs() <= DEDUP_TOL && (o[2] - sol[2]).abs() <= DEDUP_TOL);
            if !duplicate {
                out.push(sol);
            }
        }
    }
    out
}

/// All equilateral placements with `lambda_A = anchor`, found from a 4 x 4
/// grid of Newton starts. Possibly empty.
pub fn solve_equilateral_family(brick: &Brick, triple: &SkewTriple, anchor: f64) -> Vec<Placement> {
    if !(0.0..=1.0).contains(&anchor) {
        return Vec::new();
    }
    family(brick, triple, anchor, DEFAULT_NEWTON_ITERS)
        .into_iter()
        .map(|l| Placement::clamped(*triple, l))
        .collect()
}

/// Largest equilateral triangle on `triple`: anchor scan followed by
/// pattern-search refinement of the best candidates.
pub fn max_equilateral_side(
    brick: &Brick,
    triple: &SkewTriple,
    settings: &SearchSettings,
) -> Result<(Placement, f64)> {
    settings.validate()?;
    best_equilateral(brick, triple, settings, None)
        .map(|(l, d)| (Placement::clamped(*triple, l), d))
        .ok_or(Error::NoSolution("no equilateral placement on this triple"))
}

/// Same as [`max_equilateral_side`], optionally seeding the refinement with
/// a nearby solution (continuation from a neighbouring brick).
pub(crate) fn best_equilateral(
    brick: &Brick,
    triple: &SkewTriple,
    settings: &SearchSettings,
    hint: Option<[f64; 3]>,
) -> Option<([f64; 3], f64)> {
    let mut candidates = anchor_candidates(brick, triple, settings.grid_n, settings.max_iter);
    if let Some(h) = hint {
        for fixed in 0..3 {
            if let Some(sol) = solve_pair(brick, triple, h, fixed, settings.max_iter) {
                let sq = squares(brick, triple, &sol);
                if is_equilateral(&sq) {
                    candidates.push((sol, min3(&sq)));
                }
            }
        }
    }
    if candidates.is_empty() {
        return None;
    }
    candidates.sort_by(|x, y| y.1.total_cmp(&x.1));

    let mut seeds: Vec<([f64; 3], f64)> = Vec::new();
    for c in &candidates {
        if seeds.len() == REFINE_SEEDS {
            break;
        }
        let far = seeds.iter().all(|s| (0..3).any(|i| (s.0[i] - c.0[i]).abs() > 1e-3));
        if far {
            seeds.push(*c);
        }
    }

    seeds
        .into_iter()
        .map(|(x, v)| refine(brick, triple, x, v, settings))
        .fold(None, |best: Option<([f64; 3], f64)>, r| match best {
            Some(b) if b.1 >= r.1 => Some(b),
            _ => Some(r),
        })
}

/// Every family member over `n` equally spaced anchors, with its side.
fn anchor_candidates(brick: &Brick, triple: &SkewTriple, n: usize, max_iter: usize) -> Vec<([f64; 3], f64)> {
    let mut candidates = Vec::new();
    for k in 0..n {
        let anchor = k as f64 / (n - 1) as f64;
        for sol in family(brick, triple, anchor, max_iter) {
            let sq = squares(brick, triple, &sol);
            candidates.push((sol, min3(&sq)));
        }
    }
    candidates
}

/// Best anchor-scan candidate, without refinement.
pub(crate) fn scan_equilateral(brick: &Brick, triple: &SkewTriple, n: usize, max_iter: usize) -> Option<([f64; 3], f64)> {
    anchor_candidates(brick, triple, n, max_iter)
        .into_iter()
        .fold(None, |best, c| match best {
            Some(b) if b.1 >= c.1 => Some(b),
            _ => Some(c),
        })
}

#[inline]
pub(crate) fn min3(sq: &[f64; 3]) -> f64 {
    sq[0].min(sq[1]).min(sq[2])
}

/// Coordinate pattern search along the equilateral family: move one
/// parameter (clamped to `[0, 1]`), re-solve the other two, keep the move if
/// the side grows.
fn refine(
    brick: &Brick,
    triple: &SkewTriple,
    x0: [f64; 3],
    v0: f64,
    settings: &SearchSettings,
) -> ([f64; 3], f64) {
    let mut x = x0;
    let mut value = v0;
    let mut step = REFINE_INITIAL_STEP;
    let mut polls = 0;
    while step >= settings.tol && polls < REFINE_MAX_POLLS {
        let mut improved = false;
        'poll: for i in 0..3 {
            for sign in [1.0, -1.0] {
                let mut trial = x;
                trial[i] = (x[i] + sign * step).clamp(0.0, 1.0);
                if trial[i] == x[i] {
                    continue;
                }
                polls += 1;
                let Some(sol) = solve_pair(brick, triple, trial, i, settings.max_iter) else {
                    continue;
                };
                let sq = squares(brick, triple, &sol);
                let v = min3(&sq);
                if is_equilateral(&sq) && v > value + 1e-15 * value {
                    x = sol;
                    value = v;
                    improved = true;
                    break 'poll;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (x, value)
}
