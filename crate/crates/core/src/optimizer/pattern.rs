//! Derivative-free maximization by polling a fixed direction set, with
//! optional random polls when the fixed set fails.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Compass-search schedule shared by every refinement in the crate.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Schedule {
    pub initial_step: f64,
    pub shrink: f64,
    pub min_step: f64,
    pub max_evals: usize,
    pub random_polls: usize,
}

impl Schedule {
    pub fn new(initial_step: f64, min_step: f64) -> Self {
        Schedule { initial_step, shrink: 0.5, min_step, max_evals: 200_000, random_polls: 0 }
    }

    pub fn with_random_polls(mut self, n: usize) -> Self {
        self.random_polls = n;
        self
    }
}

/// Result of a pattern search.
#[derive(Clone, Debug)]
pub(crate) struct Outcome<T> {
    pub x: Vec<f64>,
    pub value: f64,
    pub payload: T,
}

/// Maximizes `f` from `x0`. `f` sees the trial point and the payload of the
/// current incumbent, and returns `None` where the objective is undefined.
/// `project` maps any trial point back into the domain.
///
/// Trial points are `project(x + step * d)` for each poll direction `d`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn maximize<T: Clone>(
    x0: &[f64],
    v0: f64,
    p0: T,
    directions: &[Vec<f64>],
    schedule: Schedule,
    rng: &mut ChaCha8Rng,
    mut f: impl FnMut(&[f64], &T) -> Option<(f64, T)>,
    project: impl Fn(&mut [f64]),
) -> Outcome<T> {
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut value = v0;
    let mut payload = p0;
    let mut step = schedule.initial_step;
    let mut evals = 0usize;
    let mut trial = vec![0.0; n];
    let mut random_dirs: Vec<Vec<f64>> = Vec::new();

    while step >= schedule.min_step && evals < schedule.max_evals {
        let mut improved = false;

        random_dirs.clear();
        for _ in 0..schedule.random_polls {
            random_dirs.push(random_unit(n, rng));
        }
        let fixed = directions.iter();
        let random = random_dirs.iter();

        for d in fixed.chain(random) {
            for (t, (xi, di)) in trial.iter_mut().zip(x.iter().zip(d)) {
                *t = xi + step * di;
            }
            project(&mut trial);
            if trial == x {
                continue;
            }
            evals += 1;
            if let Some((v, p)) = f(&trial, &payload) {
                if v > value + 1e-15 * value.abs() {
                    x.copy_from_slice(&trial);
                    value = v;
                    payload = p;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step *= schedule.shrink;
        }
    }
    Outcome { x, value, payload }
}

/// Unit vector drawn uniformly from the sphere.
fn random_unit(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = libm::sqrt(v.iter().map(|x| x * x).sum::<f64>());
        if norm > 1e-3 && norm <= 1.0 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// `±e_i` for every coordinate.
pub(crate) fn compass(n: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(2 * n);
    for i in 0..n {
        for sign in [1.0, -1.0] {
            let mut d = vec![0.0; n];
            d[i] = sign;
            out.push(d);
        }
    }
    out
}
