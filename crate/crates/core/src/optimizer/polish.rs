//! Active-set Newton polish of pattern-search results.
//!
//! Pattern search stops within about one step of a kink maximum. At such a
//! point the active sides (those at the minimum) are equal and the
//! remaining freedom is spent against bound constraints. When the number of
//! free coordinates equals the number of independent side equalities the
//! maximizer is an isolated root of `sq[i] - sq[j] = 0`, which Newton
//! recovers to machine precision.

use alloc::vec::Vec;

use crate::geometry::SkewTriple;
use crate::optimizer::equilateral::squares;
use crate::optimizer::SearchDomain;

/// Coordinates closer than this to a bound are snapped onto it.
const SNAP_TOL: f64 = 1e-7;
/// Sides within this relative distance of the minimum count as active.
const ACTIVE_TOL: f64 = 1e-6;
const JACOBIAN_STEP: f64 = 1e-7;
const MAX_ITER: usize = 50;
/// The polished point may not move further than this (max norm).
const MAX_SHIFT: f64 = 1e-3;

/// Search point: normalized brick coordinates `s` and edge parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Point {
    pub s: [f64; 2],
    pub lambdas: [f64; 3],
}

impl Point {
    fn to_vec(self) -> [f64; 5] {
        [self.s[0], self.s[1], self.lambdas[0], self.lambdas[1], self.lambdas[2]]
    }

    fn from_vec(x: &[f64; 5]) -> Self {
        Point { s: [x[0], x[1]], lambdas: [x[2], x[3], x[4]] }
    }
}

pub(crate) fn sides_at(domain: &SearchDomain, triple: &SkewTriple, p: &Point) -> [f64; 3] {
    squares(&domain.brick_at(p.s), triple, &p.lambdas)
}

fn snap(domain: &SearchDomain, p: &Point) -> Point {
    let mut q = *p;
    for l in q.lambdas.iter_mut() {
        if *l < SNAP_TOL {
            *l = 0.0;
        } else if *l > 1.0 - SNAP_TOL {
            *l = 1.0;
        }
    }
    if !domain.is_pinned() {
        for s in q.s.iter_mut() {
            if *s < SNAP_TOL {
                *s = 0.0;
            }
        }
        let excess = q.s[0] + q.s[1] - 1.0;
        if excess > -SNAP_TOL {
            if q.s[0] >= q.s[1] {
                q.s[0] -= excess;
            } else {
                q.s[1] -= excess;
            }
            q.s[0] = q.s[0].max(0.0);
            q.s[1] = q.s[1].max(0.0);
        }
    }
    q
}

/// Directions in the 5-dimensional search space along which the point may
/// move without leaving the faces it sits on.
fn free_directions(domain: &SearchDomain, p: &Point) -> Vec<[f64; 5]> {
    let mut dirs = Vec::new();
    if !domain.is_pinned() {
        let on_axis0 = p.s[0] == 0.0;
        let on_axis1 = p.s[1] == 0.0;
        let on_hyp = p.s[0] + p.s[1] >= 1.0;
        match (on_axis0, on_axis1, on_hyp) {
            (false, false, false) => {
                dirs.push([1.0, 0.0, 0.0, 0.0, 0.0]);
                dirs.push([0.0, 1.0, 0.0, 0.0, 0.0]);
            }
            (true, false, false) => dirs.push([0.0, 1.0, 0.0, 0.0, 0.0]),
            (false, true, false) => dirs.push([1.0, 0.0, 0.0, 0.0, 0.0]),
            (false, false, true) => dirs.push([1.0, -1.0, 0.0, 0.0, 0.0]),
            _ => {}
        }
    }
    for (i, l) in p.lambdas.iter().enumerate() {
        if *l > 0.0 && *l < 1.0 {
            let mut d = [0.0; 5];
            d[2 + i] = 1.0;
            dirs.push(d);
        }
    }
    dirs
}

fn in_domain(domain: &SearchDomain, x: &[f64; 5]) -> bool {
    let lam_ok = x[2..].iter().all(|l| (0.0..=1.0).contains(l));
    let s_ok = domain.is_pinned() || (x[0] >= 0.0 && x[1] >= 0.0 && x[0] + x[1] <= 1.0 + 1e-15);
    lam_ok && s_ok
}

/// Solves `A y = b` by Gaussian elimination with partial pivoting.
fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        let pivot = a[piv][col].abs();
        if pivot.is_nan() || pivot <= 1e-12 * scale {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        let (top, rest) = a.split_at_mut(col + 1);
        let pivot_row = &top[col];
        for (i, r) in rest.iter_mut().enumerate() {
            let f = r[col] / pivot_row[col];
            for (x, p) in r[col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= f * p;
            }
            b[col + 1 + i] -= f * b[col];
        }
    }
    let mut y = alloc::vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row][k] * y[k];
        }
        y[row] = acc / a[row][row];
    }
    Some(y)
}

/// Polishes `p`. With `all_active` every side is treated as active (the
/// equilateral objective); otherwise the active set is read off `p`.
/// Returns the polished point and its shortest squared side, or `None` when
/// the active system is not square or Newton fails.
pub(crate) fn polish(
    domain: &SearchDomain,
    triple: &SkewTriple,
    p: &Point,
    all_active: bool,
) -> Option<(Point, f64)> {
    let start = snap(domain, p);
    let sq = sides_at(domain, triple, &start);
    let lo = sq[0].min(sq[1]).min(sq[2]);
    let active: Vec<usize> = if all_active {
        alloc::vec![0, 1, 2]
    } else {
        (0..3).filter(|&i| sq[i] - lo <= ACTIVE_TOL * lo.max(1.0)).collect()
    };
    let dirs = free_directions(domain, &start);
    let k = dirs.len();
    if k == 0 || k + 1 != active.len() {
        return None;
    }

    let x0 = start.to_vec();
    let at = |y: &[f64]| -> [f64; 5] {
        let mut x = x0;
        for (d, yi) in dirs.iter().zip(y) {
            for (xj, dj) in x.iter_mut().zip(d) {
                *xj += yi * dj;
            }
        }
        x
    };
    let eqs = |x: &[f64; 5]| -> Vec<f64> {
        let sq = sides_at(domain, triple, &Point::from_vec(x));
        active[1..].iter().map(|&j| sq[active[0]] - sq[j]).collect()
    };

    let mut y = alloc::vec![0.0; k];
    let mut converged = false;
    for _ in 0..MAX_ITER {
        let x = at(&y);
        if !in_domain(domain, &x) {
            return None;
        }
        let r = eqs(&x);
        let sq = sides_at(domain, triple, &Point::from_vec(&x));
        let scale = sq.iter().fold(1.0f64, |m, v| m.max(*v));
        if r.iter().all(|v| v.abs() <= 4.0 * f64::EPSILON * scale) {
            converged = true;
            break;
        }
        let mut jac = alloc::vec![alloc::vec![0.0; k]; k];
        for col in 0..k {
            let mut yp = y.clone();
            let mut ym = y.clone();
            yp[col] += JACOBIAN_STEP;
            ym[col] -= JACOBIAN_STEP;
            let (rp, rm) = (eqs(&at(&yp)), eqs(&at(&ym)));
            for row in 0..k {
                jac[row][col] = (rp[row] - rm[row]) / (2.0 * JACOBIAN_STEP);
            }
        }
        let delta = solve_linear(jac, r.iter().map(|v| -v).collect())?;
        let before = y.clone();
        for (yi, di) in y.iter_mut().zip(&delta) {
            *yi += di;
        }
        if y == before {
            converged = true;
            break;
        }
    }
    let x = at(&y);
    if !in_domain(domain, &x) {
        return None;
    }
    if !converged {
        let r = eqs(&x);
        let sq = sides_at(domain, triple, &Point::from_vec(&x));
        let scale = sq.iter().fold(1.0f64, |m, v| m.max(*v));
        if r.iter().any(|v| v.abs() > 1e-12 * scale) {
            return None;
        }
    }
    if x.iter().zip(p.to_vec()).any(|(a, b)| (a - b).abs() > MAX_SHIFT) {
        return None;
    }
    let q = Point::from_vec(&x);
    let sq = sides_at(domain, triple, &q);
    Some((q, sq[0].min(sq[1]).min(sq[2])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn recovers_cube_from_nearby_point() {
        let d = SearchDomain::admissible();
        let t = SkewTriple::reference();
        let p = Point { s: [1.0 / 3.0 + 3e-6, 1.0 / 3.0 - 2e-6], lambdas: [2e-8, 1.0, 0.0] };
        let (q, v) = polish(&d, &t, &p, true).unwrap();
        assert_abs_diff_eq!(v, 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(q.s[0], 1.0 / 3.0, epsilon = 1e-13);
        assert_eq!(q.lambdas, [0.0, 1.0, 0.0]);
    }

    #[test]
    fn recovers_case_one_on_boundary_edge() {
        // Sides (1/sqrt 2, 1, sqrt 2) put s on the s_a = 0 edge.
        let d = SearchDomain::admissible();
        let t = SkewTriple::reference();
        let p = Point { s: [1e-9, 1.0 / 3.0 + 1e-6], lambdas: [0.0, 0.0, 0.5 - 1e-6] };
        let (q, v) = polish(&d, &t, &p, true).unwrap();
        assert_abs_diff_eq!(v, 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(q.lambdas[2], 0.5, epsilon = 1e-13);
    }

    #[test]
    fn non_square_systems_are_left_alone() {
        let d = SearchDomain::admissible();
        let t = SkewTriple::reference();
        let p = Point { s: [0.2, 0.3], lambdas: [0.4, 0.5, 0.6] };
        assert!(polish(&d, &t, &p, true).is_none());
    }

    #[test]
    fn linear_solver() {
        let a = alloc::vec![alloc::vec![0.0, 2.0], alloc::vec![1.0, 1.0]];
        let y = solve_linear(a, alloc::vec![4.0, 3.0]).unwrap();
        assert_abs_diff_eq!(y[0], 1.0);
        assert_abs_diff_eq!(y[1], 2.0);
        assert!(solve_linear(alloc::vec![alloc::vec![1.0, 1.0], alloc::vec![1.0, 1.0]], alloc::vec![1.0, 2.0]).is_none());
    }
}
