//! Global maximization over the admissible bricks.
//!
//! Both searches evaluate a coarse grid, pick well separated high starts,
//! refine each by pattern search and finish with the active-set polish.
//! Starts are independent and run through [`par_map`]; the result does not
//! depend on evaluation order.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::geometry::{Placement, SkewTriple};
use crate::optimizer::equilateral::{best_equilateral, is_equilateral, min3, scan_equilateral, squares};
use crate::optimizer::pattern::{compass, maximize, Schedule};
use crate::optimizer::polish::{polish, Point};
use crate::optimizer::{par_map, project_simplex, simplex_directions, SearchDomain, SearchSettings};
use crate::oracle::{assemble_certificate, Certificate, Objective, Witness};

/// Edge-parameter samples per axis in the min-side start grid.
const LAMBDA_GRID: usize = 9;
/// Minimal max-norm distance between min-side starts.
const MIN_SIDE_SEPARATION: f64 = 0.2;
/// Minimal distance between equilateral starts, in grid spacings.
const EQ_SEPARATION_CELLS: f64 = 2.5;
/// Start jitter, in grid spacings.
const JITTER_CELLS: f64 = 0.25;
const EQ_RANDOM_POLLS: usize = 2;
const MIN_SIDE_RANDOM_POLLS: usize = 4;
const MIN_SIDE_INITIAL_STEP: f64 = 0.1;

fn rng_for(settings: &SearchSettings, start: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    rng.set_stream(start as u64);
    rng
}

/// Points `(i, j) / (n - 1)` of the normalized-coordinate triangle.
fn triangle_grid(n: usize) -> Vec<[f64; 2]> {
    let h = 1.0 / (n - 1) as f64;
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n - i {
            out.push([i as f64 * h, j as f64 * h]);
        }
    }
    out
}

/// Greedy pick of up to `count` candidates in descending value order, each
/// further than `sep` (max norm) from those already picked. Ties keep grid
/// order.
fn diverse_starts<T: Copy>(mut cands: Vec<(Vec<f64>, f64, T)>, count: usize, sep: f64) -> Vec<(Vec<f64>, f64, T)> {
    cands.sort_by(|x, y| y.1.total_cmp(&x.1));
    let mut picked: Vec<(Vec<f64>, f64, T)> = Vec::new();
    for c in cands {
        if picked.len() == count {
            break;
        }
        let far = picked
            .iter()
            .all(|p| p.0.iter().zip(&c.0).any(|(a, b)| (a - b).abs() > sep));
        if far {
            picked.push(c);
        }
    }
    picked
}

fn jitter(x: &mut [f64], amount: f64, rng: &mut ChaCha8Rng) {
    for xi in x.iter_mut() {
        *xi += rng.gen_range(-amount..=amount);
    }
}

/// Largest equilateral triangle over every brick of the domain, on the
/// reference skew triple (the reflections of a brick map the eight triples
/// onto each other).
pub fn global_max_equilateral(domain: &SearchDomain, settings: &SearchSettings) -> Result<Certificate> {
    domain.validate()?;
    settings.validate()?;
    let triple = SkewTriple::reference();
    let n = settings.grid_n;

    let mut found: Vec<Witness> = Vec::new();
    if domain.is_pinned() {
        let brick = domain.brick_at([0.0, 0.0]);
        if let Some((l, v)) = best_equilateral(&brick, &triple, settings, None) {
            let p = Point { s: [0.0, 0.0], lambdas: l };
            let l = match polish(domain, &triple, &p, true) {
                Some((q, pv)) if pv >= v - 1e-12 * v.max(1.0) => q.lambdas,
                _ => l,
            };
            found.push(Witness::evaluate(brick, Placement::clamped(triple, l)));
        }
        return Ok(assemble_certificate(Objective::Equilateral, domain, settings, &found));
    }

    let grid = triangle_grid(n);
    let scanned = par_map(&grid, |_, s| {
        scan_equilateral(&domain.brick_at(*s), &triple, n, settings.max_iter)
    });
    let cands: Vec<(Vec<f64>, f64, [f64; 3])> = grid
        .iter()
        .zip(scanned)
        .filter_map(|(s, r)| r.map(|(l, v)| (s.to_vec(), v, l)))
        .collect();
    let h = 1.0 / (n - 1) as f64;
    let starts = diverse_starts(cands, settings.starts, EQ_SEPARATION_CELLS * h);
    let dirs: Vec<Vec<f64>> = simplex_directions().into_iter().map(|d| d.to_vec()).collect();

    let eval = |s: &[f64], hint: &[f64; 3]| {
        let brick = domain.brick_at([s[0], s[1]]);
        best_equilateral(&brick, &triple, settings, Some(*hint)).map(|(l, v)| (v, l))
    };

    let refined = par_map(&starts, |i, (s0, _, l0)| {
        let mut rng = rng_for(settings, i);
        let mut s = s0.clone();
        if i > 0 {
            jitter(&mut s, JITTER_CELLS * h, &mut rng);
            project_simplex(&mut s);
        }
        let (v, l) = eval(&s, l0)?;
        let out = maximize(
            &s,
            v,
            l,
            &dirs,
            Schedule::new(h, settings.tol).with_random_polls(EQ_RANDOM_POLLS),
            &mut rng,
            eval,
            project_simplex,
        );
        let p = Point { s: [out.x[0], out.x[1]], lambdas: out.payload };
        let p = match polish(domain, &triple, &p, true) {
            Some((q, pv))
                if pv >= out.value - 1e-12 * out.value.max(1.0)
                    && is_equilateral(&squares(&domain.brick_at(q.s), &triple, &q.lambdas)) =>
            {
                q
            }
            _ => p,
        };
        Some(Witness::evaluate(domain.brick_at(p.s), Placement::clamped(triple, p.lambdas)))
    });
    found.extend(refined.into_iter().flatten());
    Ok(assemble_certificate(Objective::Equilateral, domain, settings, &found))
}

fn project_point(x: &mut [f64], pinned: bool) {
    if !pinned {
        project_simplex(&mut x[..2]);
    }
    for l in x[2..].iter_mut() {
        *l = l.clamp(0.0, 1.0);
    }
}

/// Largest shortest side over every brick of the domain and every placement
/// on the reference skew triple, without a shape constraint.
pub fn global_max_min_side(domain: &SearchDomain, settings: &SearchSettings) -> Result<Certificate> {
    domain.validate()?;
    settings.validate()?;
    let triple = SkewTriple::reference();
    let pinned = domain.is_pinned();
    let n = settings.grid_n;
    let nl = LAMBDA_GRID.min(n);

    let s_grid = if pinned { alloc::vec![[0.0, 0.0]] } else { triangle_grid(n) };
    let lam: Vec<f64> = (0..nl).map(|k| k as f64 / (nl - 1) as f64).collect();
    let per_brick = par_map(&s_grid, |_, s| {
        let brick = domain.brick_at(*s);
        let mut out = Vec::with_capacity(nl * nl * nl);
        for &u in &lam {
            for &v in &lam {
                for &w in &lam {
                    let sq = squares(&brick, &triple, &[u, v, w]);
                    out.push((alloc::vec![s[0], s[1], u, v, w], min3(&sq), ()));
                }
            }
        }
        out
    });
    let cands: Vec<(Vec<f64>, f64, ())> = per_brick.into_iter().flatten().collect();
    let starts = diverse_starts(cands, settings.starts, MIN_SIDE_SEPARATION);

    let mut dirs = compass(5);
    if pinned {
        dirs.retain(|d| d[0] == 0.0 && d[1] == 0.0);
    } else {
        let r = core::f64::consts::FRAC_1_SQRT_2;
        dirs.push(alloc::vec![r, -r, 0.0, 0.0, 0.0]);
        dirs.push(alloc::vec![-r, r, 0.0, 0.0, 0.0]);
    }
    let eval = |x: &[f64], _: &()| {
        let sq = squares(&domain.brick_at([x[0], x[1]]), &triple, &[x[2], x[3], x[4]]);
        Some((min3(&sq), ()))
    };
    let project = |x: &mut [f64]| project_point(x, pinned);
    let h = 1.0 / (nl - 1) as f64;

    let refined = par_map(&starts, |i, (x0, _, _)| {
        let mut rng = rng_for(settings, i);
        let mut x = x0.clone();
        if i > 0 {
            if pinned {
                jitter(&mut x[2..], JITTER_CELLS * h, &mut rng);
            } else {
                jitter(&mut x, JITTER_CELLS * h, &mut rng);
            }
            project(&mut x);
        }
        let (v, _) = eval(&x, &())?;
        let schedule = Schedule::new(MIN_SIDE_INITIAL_STEP, settings.tol).with_random_polls(MIN_SIDE_RANDOM_POLLS);
        let out = maximize(&x, v, (), &dirs, schedule, &mut rng, eval, project);
        let p = Point { s: [out.x[0], out.x[1]], lambdas: [out.x[2], out.x[3], out.x[4]] };
        let p = match polish(domain, &triple, &p, false) {
            Some((q, pv)) if pv >= out.value - 1e-12 * out.value.max(1.0) => q,
            _ => p,
        };
        Some(Witness::evaluate(domain.brick_at(p.s), Placement::clamped(triple, p.lambdas)))
    });
    let found: Vec<Witness> = refined.into_iter().flatten().collect();
    Ok(assemble_certificate(Objective::MinSide, domain, settings, &found))
}
