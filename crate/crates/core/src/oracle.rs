//! Independent verification: exhaustive grid maxima, the catalogue of the
//! three maximal arrangements, canonical forms of witnesses, bound checks and
//! certificate assembly.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::error::{Error, Result};
use crate::geometry::{
    reflection_between, triangle_metrics, Axis, Brick, EdgeId, Placement, SkewTriple, Symmetry,
};
use crate::optimizer::{par_map, SearchDomain, SearchSettings};

pub const CERTIFICATE_VERSION: u32 = 1;

/// The proven bound on the squared side.
pub const BOUND_SQ: f64 = 2.0;

/// Default tolerance on squared lengths when matching the catalogue.
pub const MATCH_TOL: f64 = 1e-4;

/// Witnesses closer than this (dims and parameters, after canonicalization)
/// are merged.
pub const WITNESS_DEDUP_TOL: f64 = 1e-6;

/// Residual allowance per unit of `1 / samples` for the equilateral grid
/// filter.
pub const GRID_RESIDUAL_SCALE: f64 = 10.0;

/// Lexicographic comparisons treat values closer than this as equal.
const CANON_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Objective {
    /// Largest equilateral triangle.
    Equilateral,
    /// Largest shortest side, no shape constraint.
    MinSide,
}

impl Objective {
    pub fn tag(self) -> &'static str {
        match self {
            Objective::Equilateral => "equilateral",
            Objective::MinSide => "min-side",
        }
    }

    pub fn from_tag(tag: &str) -> Result<Self> {
        match tag {
            "equilateral" => Ok(Objective::Equilateral),
            "min-side" => Ok(Objective::MinSide),
            _ => Err(Error::Parse("objective must be equilateral or min-side")),
        }
    }
}

/// A concrete triangle found by a search, with its recorded metrics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Witness {
    pub brick: Brick,
    pub placement: Placement,
    /// Shortest squared side.
    pub side_sq: f64,
    /// Equilateral residual.
    pub residual: f64,
}

impl Witness {
    pub fn evaluate(brick: Brick, placement: Placement) -> Self {
        let m = triangle_metrics(&brick, &placement);
        Witness { brick, placement, side_sq: m.min_sq, residual: m.eq_residual }
    }

    /// Recomputes the metrics and compares them with the recorded values.
    pub fn revalidate(&self, tol: f64) -> bool {
        let m = triangle_metrics(&self.brick, &self.placement);
        (m.min_sq - self.side_sq).abs() <= tol && (m.eq_residual - self.residual).abs() <= tol
    }

    pub fn sorted_dims_sq(&self) -> [f64; 3] {
        let mut d = self.brick.dims().map(|x| x * x);
        d.sort_by(f64::total_cmp);
        d
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OptimumId {
    Case1,
    Case2Brick,
    Case2Cube,
}

impl OptimumId {
    pub fn tag(self) -> &'static str {
        match self {
            OptimumId::Case1 => "CASE1",
            OptimumId::Case2Brick => "CASE2_BRICK",
            OptimumId::Case2Cube => "CASE2_CUBE",
        }
    }

    pub fn from_tag(tag: &str) -> Result<Self> {
        match tag {
            "CASE1" => Ok(OptimumId::Case1),
            "CASE2_BRICK" => Ok(OptimumId::Case2Brick),
            "CASE2_CUBE" => Ok(OptimumId::Case2Cube),
            _ => Err(Error::Parse("unknown optimum id")),
        }
    }
}

impl fmt::Display for OptimumId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// One of the three maximal arrangements, up to symmetry.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CanonicalOptimum {
    pub id: OptimumId,
    /// Squared brick sides, ascending.
    pub brick_sq: [f64; 3],
    pub d_sq: f64,
    pub description: &'static str,
}

impl CanonicalOptimum {
    /// A concrete placement realizing this arrangement.
    pub fn witness(&self) -> Witness {
        let [x, y, z] = self.brick_sq;
        let brick = Brick::from_squares(x, y, z).expect("catalogue bricks are positive");
        let e = |d, o0, o1| EdgeId::new(d, o0, o1);
        let (triple, lambdas) = match self.id {
            // A = (0,0,0), B = (0,b,c), C = (a,b,0).
            OptimumId::Case2Cube => (SkewTriple::reference(), [0.0, 1.0, 0.0]),
            // Triangle side along the long edge, third vertex at the
            // midpoint of the opposite edge.
            OptimumId::Case1 => (SkewTriple::reference(), [0.0, 0.0, 0.5]),
            // A = (0,0,0), B = (a,0,c) span a diagonal of the y = 0 face;
            // C = (0,b,2c/3) on the far face.
            OptimumId::Case2Brick => (
                SkewTriple::new(
                    e(Axis::X, false, false),
                    e(Axis::Y, true, true),
                    e(Axis::Z, false, true),
                )
                .expect("skew"),
                [0.0, 0.0, 2.0 / 3.0],
            ),
        };
        let placement = Placement::new(triple, lambdas).expect("valid lambdas");
        Witness::evaluate(brick, placement)
    }
}

/// The catalogue of maximal arrangements, all with squared side 2.
pub fn catalogue() -> [CanonicalOptimum; 3] {
    [
        CanonicalOptimum {
            id: OptimumId::Case1,
            brick_sq: [0.5, 1.0, 2.0],
            d_sq: 2.0,
            description: "one triangle side is a brick edge of length sqrt 2, \
                          the third vertex the midpoint of the opposite edge",
        },
        CanonicalOptimum {
            id: OptimumId::Case2Brick,
            brick_sq: [0.5, 4.0 / 3.0, 1.5],
            d_sq: 2.0,
            description: "one triangle side is a face diagonal, the third vertex \
                          two thirds along a skew edge of the opposite face",
        },
        CanonicalOptimum {
            id: OptimumId::Case2Cube,
            brick_sq: [1.0, 1.0, 1.0],
            d_sq: 2.0,
            description: "unit cube, vertices at three mutually non-adjacent corners",
        },
    ]
}

fn cmp_tol(x: &[f64], y: &[f64]) -> Ordering {
    for (a, b) in x.iter().zip(y) {
        if (a - b).abs() > CANON_TOL {
            return a.total_cmp(b);
        }
    }
    Ordering::Equal
}

/// Representative of the witness's symmetry class: brick sides ascending,
/// the reference skew triple, and the lexicographically least parameters
/// among the remaining symmetries.
pub fn canonicalize_witness(w: &Witness) -> Witness {
    let target = SkewTriple::reference();
    let mut best: Option<(Brick, Placement)> = None;
    for perm in Symmetry::permutations() {
        let brick = w.brick.permuted(perm);
        if !(brick.a <= brick.b && brick.b <= brick.c) {
            continue;
        }
        let permuted = Symmetry { perm, flips: 0 }.apply_placement(&w.placement);
        let placement = reflection_between(permuted.triple(), target).apply_placement(&permuted);
        let better = match &best {
            None => true,
            Some((_, p)) => cmp_tol(&placement.lambdas(), &p.lambdas()) == Ordering::Less,
        };
        if better {
            best = Some((brick, placement));
        }
    }
    let (brick, placement) = best.expect("some permutation sorts the sides");
    Witness::evaluate(brick, placement)
}

fn same_class(x: &Witness, y: &Witness, tol: f64) -> bool {
    x.placement.triple() == y.placement.triple()
        && x.brick.dims().iter().zip(y.brick.dims()).all(|(p, q)| (p - q).abs() <= tol)
        && x.placement.lambdas().iter().zip(y.placement.lambdas()).all(|(p, q)| (p - q).abs() <= tol)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundReport {
    pub bound_sq: f64,
    pub satisfied: bool,
    /// `bound_sq - optimum`.
    pub margin: f64,
    /// Some witness attains the bound within tolerance.
    pub sharp: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Match {
    pub witness_index: usize,
    pub optimum_id: OptimumId,
}

/// Outcome of matching a certificate's witnesses against the catalogue.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MatchReport {
    pub matched: Vec<Match>,
    pub unmatched: Vec<usize>,
}

impl MatchReport {
    pub fn ids(&self) -> Vec<OptimumId> {
        let mut ids: Vec<OptimumId> = self.matched.iter().map(|m| m.optimum_id).collect();
        ids.sort();
        ids.dedup();
        ids
    }

    pub fn covers_catalogue(&self) -> bool {
        self.ids().len() == catalogue().len()
    }
}

/// Full record of a search.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub version: u32,
    pub objective: Objective,
    pub domain: SearchDomain,
    pub settings: SearchSettings,
    pub optimum_sq: f64,
    pub witnesses: Vec<Witness>,
    pub bound_check: BoundReport,
    pub matched: Vec<Match>,
    pub timing_ms: u64,
}

impl Certificate {
    /// Every witness re-evaluates to its recorded metrics and lies in the
    /// domain.
    pub fn witnesses_valid(&self, tol: f64) -> bool {
        self.witnesses
            .iter()
            .all(|w| w.revalidate(tol) && self.domain.contains(&w.brick))
    }
}

/// Pairs each witness with the catalogue entry whose sorted squared sides
/// and squared triangle side agree within `tol`.
pub fn match_known_optima(cert: &Certificate, tol: f64) -> MatchReport {
    let mut report = MatchReport::default();
    for (i, w) in cert.witnesses.iter().enumerate() {
        let canon = canonicalize_witness(w);
        let dims = canon.sorted_dims_sq();
        let hit = catalogue().into_iter().find(|opt| {
            opt.brick_sq.iter().zip(dims).all(|(p, q)| (p - q).abs() <= tol)
                && (canon.side_sq - opt.d_sq).abs() <= tol
        });
        match hit {
            Some(opt) => report.matched.push(Match { witness_index: i, optimum_id: opt.id }),
            None => report.unmatched.push(i),
        }
    }
    report
}

pub fn check_bound(cert: &Certificate, bound_sq: f64, tol: f64) -> BoundReport {
    BoundReport {
        bound_sq,
        satisfied: cert.optimum_sq <= bound_sq + tol,
        margin: bound_sq - cert.optimum_sq,
        sharp: cert.witnesses.iter().any(|w| w.side_sq >= bound_sq - tol),
    }
}

/// Builds a certificate from the refined results of a search: the optimum,
/// the canonical witnesses within `settings.tol` of it, the bound check and
/// the catalogue matches.
pub fn assemble_certificate(
    objective: Objective,
    domain: &SearchDomain,
    settings: &SearchSettings,
    found: &[Witness],
) -> Certificate {
    let optimum_sq = found.iter().map(|w| w.side_sq).fold(0.0, f64::max);
    let mut witnesses: Vec<Witness> = Vec::new();
    for w in found.iter().filter(|w| w.side_sq >= optimum_sq - settings.tol) {
        let canon = canonicalize_witness(w);
        match witnesses.iter_mut().find(|x| same_class(x, &canon, WITNESS_DEDUP_TOL)) {
            Some(existing) if existing.side_sq >= canon.side_sq => {}
            Some(existing) => *existing = canon,
            None => witnesses.push(canon),
        }
    }
    witnesses.sort_by(|x, y| {
        cmp_tol(&x.brick.dims(), &y.brick.dims())
            .then_with(|| cmp_tol(&x.placement.lambdas(), &y.placement.lambdas()))
    });
    let mut cert = Certificate {
        version: CERTIFICATE_VERSION,
        objective,
        domain: *domain,
        settings: *settings,
        optimum_sq,
        witnesses,
        bound_check: BoundReport { bound_sq: BOUND_SQ, satisfied: true, margin: 0.0, sharp: false },
        matched: Vec::new(),
        timing_ms: 0,
    };
    cert.bound_check = check_bound(&cert, BOUND_SQ, settings.tol);
    cert.matched = match_known_optima(&cert, MATCH_TOL).matched;
    cert
}

/// Samples per axis of an exhaustive grid: the two free brick sides, then
/// the three edge parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Resolution(pub [usize; 5]);

impl Resolution {
    pub fn uniform(n: usize) -> Self {
        Resolution([n; 5])
    }
}

/// Grid point attaining a brute-force maximum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridPoint {
    pub brick: Brick,
    pub lambdas: [f64; 3],
    pub indices: [usize; 5],
}

#[inline]
fn sample(lo: f64, hi: f64, k: usize, n: usize) -> f64 {
    if k + 1 == n {
        hi
    } else {
        lo + (hi - lo) * k as f64 / (n - 1) as f64
    }
}

/// Exhaustive maximum over the grid of free sides `a, b` (equally spaced
/// over the domain's side bounds, endpoints included, inadmissible bricks
/// skipped) and edge parameters `k / (n - 1)` on the reference triple.
///
/// For the equilateral objective only points with residual at most
/// `GRID_RESIDUAL_SCALE / n` count, `n` the smallest parameter resolution;
/// the value is their shortest squared side.
///
/// The min-side objective uses that `|CA|^2` grows and `|BC|^2` shrinks in
/// the last parameter, and that their crossover index is non-increasing in
/// the second, so the innermost maximum is taken at the crossover; the value
/// equals the naive grid maximum.
pub fn brute_force_max(
    domain: &SearchDomain,
    objective: Objective,
    resolution: Resolution,
) -> Result<(f64, GridPoint)> {
    domain.validate()?;
    let [na, nb, nu, nv, nw] = resolution.0;
    if resolution.0.iter().any(|&n| n < 2) {
        return Err(Error::Settings("every resolution must be at least 2"));
    }
    let (lo, hi) = domain.side_bounds();
    let (na, nb) = if domain.pinned.is_some() { (1, 1) } else { (na, nb) };
    let side = |k: usize, n: usize, which: usize| match domain.pinned {
        Some(p) => p[which],
        None => sample(lo, hi, k, n),
    };

    let rows: Vec<usize> = (0..na).collect();
    let per_row = par_map(&rows, |_, &ia| {
        let a = side(ia, na, 0);
        let mut best: Option<(f64, GridPoint)> = None;
        for ib in 0..nb {
            let b = side(ib, nb, 1);
            let brick = Brick { a, b, c: domain.volume / (a * b) };
            if !domain.contains(&brick) {
                continue;
            }
            let floor = best.map_or(f64::NEG_INFINITY, |b| b.0);
            let found = match objective {
                Objective::MinSide => block_min_side(&brick, [nu, nv, nw], floor),
                Objective::Equilateral => block_equilateral(&brick, [nu, nv, nw], floor),
            };
            if let Some((v, idx)) = found {
                let lambdas = [
                    sample(0.0, 1.0, idx[0], nu),
                    sample(0.0, 1.0, idx[1], nv),
                    sample(0.0, 1.0, idx[2], nw),
                ];
                best = Some((
                    v,
                    GridPoint { brick, lambdas, indices: [ia, ib, idx[0], idx[1], idx[2]] },
                ));
            }
        }
        best
    });
    per_row
        .into_iter()
        .flatten()
        .fold(None, |acc: Option<(f64, GridPoint)>, x| match acc {
            Some(a) if a.0 >= x.0 => Some(a),
            _ => Some(x),
        })
        .ok_or(Error::NoSolution("no grid point satisfies the objective's constraints"))
}

/// Squared sides on the reference triple: A = (a u, 0, 0), B = (0, b v, c),
/// C = (a, b, c w).
#[inline]
fn ref_sides(a2: f64, b2: f64, c2: f64, u: f64, v: f64, w: f64) -> (f64, f64, f64) {
    let ab = a2 * u * u + b2 * v * v + c2;
    let bc = a2 + b2 * (1.0 - v) * (1.0 - v) + c2 * (1.0 - w) * (1.0 - w);
    let ca = a2 * (1.0 - u) * (1.0 - u) + b2 + c2 * w * w;
    (ab, bc, ca)
}

/// Best point of one brick's parameter grid strictly above `floor`.
fn block_min_side(brick: &Brick, n: [usize; 3], floor: f64) -> Option<(f64, [usize; 3])> {
    let (a2, b2, c2) = (brick.a * brick.a, brick.b * brick.b, brick.c * brick.c);
    let [nu, nv, nw] = n;
    let ws: Vec<f64> = (0..nw).map(|k| sample(0.0, 1.0, k, nw)).collect();
    let mut best = floor;
    let mut arg = None;
    for iu in 0..nu {
        let u = sample(0.0, 1.0, iu, nu);
        let mut ptr = nw;
        for iv in 0..nv {
            let v = sample(0.0, 1.0, iv, nv);
            // Smallest w index with |CA|^2 >= |BC|^2.
            while ptr > 0 {
                let (_, bc, ca) = ref_sides(a2, b2, c2, u, v, ws[ptr - 1]);
                if ca >= bc {
                    ptr -= 1;
                } else {
                    break;
                }
            }
            let ab = a2 * u * u + b2 * v * v + c2;
            if ab <= best {
                continue;
            }
            for iw in [ptr.wrapping_sub(1), ptr] {
                if iw >= nw {
                    continue;
                }
                let (ab, bc, ca) = ref_sides(a2, b2, c2, u, v, ws[iw]);
                let m = ab.min(bc).min(ca);
                if m > best {
                    best = m;
                    arg = Some([iu, iv, iw]);
                }
            }
        }
    }
    arg.map(|idx| (best, idx))
}

fn block_equilateral(brick: &Brick, n: [usize; 3], floor: f64) -> Option<(f64, [usize; 3])> {
    let (a2, b2, c2) = (brick.a * brick.a, brick.b * brick.b, brick.c * brick.c);
    let [nu, nv, nw] = n;
    let allowed = GRID_RESIDUAL_SCALE / nu.min(nv).min(nw) as f64;
    let mut best = floor;
    let mut arg = None;
    for iu in 0..nu {
        let u = sample(0.0, 1.0, iu, nu);
        for iv in 0..nv {
            let v = sample(0.0, 1.0, iv, nv);
            if a2 * u * u + b2 * v * v + c2 <= best {
                continue;
            }
            for iw in 0..nw {
                let (ab, bc, ca) = ref_sides(a2, b2, c2, u, v, sample(0.0, 1.0, iw, nw));
                let residual = (ab - bc).abs().max((bc - ca).abs());
                let m = ab.min(bc).min(ca);
                if residual <= allowed && m > best {
                    best = m;
                    arg = Some([iu, iv, iw]);
                }
            }
        }
    }
    arg.map(|idx| (best, idx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{enumerate_skew_triples, MIN_SIDE};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn naive_min_side(domain: &SearchDomain, n: usize) -> f64 {
        let (lo, hi) = domain.side_bounds();
        let t = SkewTriple::reference();
        let mut best = f64::NEG_INFINITY;
        for ia in 0..n {
            for ib in 0..n {
                let (a, b) = match domain.pinned {
                    Some([a, b]) => (a, b),
                    None => (sample(lo, hi, ia, n), sample(lo, hi, ib, n)),
                };
                let brick = Brick { a, b, c: domain.volume / (a * b) };
                if !domain.contains(&brick) {
                    continue;
                }
                for iu in 0..n {
                    for iv in 0..n {
                        for iw in 0..n {
                            let l = [iu, iv, iw].map(|k| sample(0.0, 1.0, k, n));
                            let m = triangle_metrics(&brick, &Placement::new(t, l).unwrap());
                            best = best.max(m.min_sq);
                        }
                    }
                }
            }
        }
        best
    }

    #[test]
    fn catalogue_is_admissible_and_equilateral() {
        for opt in catalogue() {
            let w = opt.witness();
            assert!(w.brick.is_admissible(), "{:?}", opt.id);
            let m = triangle_metrics(&w.brick, &w.placement);
            assert!(m.eq_residual <= 1e-12, "{:?}: {m:?}", opt.id);
            assert_abs_diff_eq!(m.min_sq, 2.0, epsilon = 1e-12);
            assert_eq!(w.sorted_dims_sq().map(|x| (x * 1e9).round()), opt.brick_sq.map(|x| (x * 1e9).round()));
        }
    }

    #[test]
    fn case_one_mirrors_share_a_canonical_form() {
        // (a^2, b^2) = (1/2, 1) and (1, 1/2), long side c^2 = 2.
        let t = SkewTriple::reference();
        let p = Placement::new(t, [0.0, 0.0, 0.5]).unwrap();
        let w1 = Witness::evaluate(Brick::from_squares(0.5, 1.0, 2.0).unwrap(), p);
        let w2 = Witness::evaluate(Brick::from_squares(1.0, 0.5, 2.0).unwrap(), p);
        let (c1, c2) = (canonicalize_witness(&w1), canonicalize_witness(&w2));
        assert!(same_class(&c1, &c2, 1e-12), "{c1:?} vs {c2:?}");
    }

    #[test]
    fn cube_corner_orbit_has_one_canonical_form() {
        let w = catalogue()[2].witness();
        let c = canonicalize_witness(&w);
        for s in Symmetry::all() {
            let img = Witness::evaluate(s.apply_brick(&w.brick), s.apply_placement(&w.placement));
            assert!(same_class(&canonicalize_witness(&img), &c, 1e-12), "{s:?}");
        }
    }

    #[test]
    fn short_witness_matches_nothing() {
        let p = Placement::new(SkewTriple::reference(), [0.1, 0.2, 0.3]).unwrap();
        let brick = Brick::cube();
        let w = Witness::evaluate(brick, p);
        let cert = assemble_certificate(
            Objective::MinSide,
            &SearchDomain::admissible(),
            &SearchSettings::default(),
            &[w],
        );
        assert!(cert.optimum_sq < 1.9);
        let report = match_known_optima(&cert, MATCH_TOL);
        assert!(report.matched.is_empty());
        assert_eq!(report.unmatched, alloc::vec![0]);
    }

    #[test]
    fn synthetic_cube_certificate_matches_cube_only() {
        let cert = assemble_certificate(
            Objective::Equilateral,
            &SearchDomain::admissible(),
            &SearchSettings::default(),
            &[catalogue()[2].witness()],
        );
        let report = match_known_optima(&cert, MATCH_TOL);
        assert_eq!(report.ids(), alloc::vec![OptimumId::Case2Cube]);
        assert!(cert.bound_check.satisfied && cert.bound_check.sharp);
    }

    #[test]
    fn empty_certificate() {
        let cert = assemble_certificate(
            Objective::Equilateral,
            &SearchDomain::admissible(),
            &SearchSettings::default(),
            &[],
        );
        assert_eq!(cert.optimum_sq, 0.0);
        assert!(match_known_optima(&cert, MATCH_TOL).matched.is_empty());
        let report = check_bound(&cert, BOUND_SQ, 1e-8);
        assert!(report.satisfied);
        assert!(!report.sharp);
        assert_eq!(report.margin, 2.0);
    }

    #[test]
    fn assembled_catalogue_matches_everything() {
        let found: Vec<Witness> = catalogue().iter().map(|o| o.witness()).collect();
        let cert = assemble_certificate(
            Objective::Equilateral,
            &SearchDomain::admissible(),
            &SearchSettings::default(),
            &found,
        );
        assert_eq!(cert.witnesses.len(), 3);
        assert!(match_known_optima(&cert, MATCH_TOL).covers_catalogue());
        assert!(cert.witnesses_valid(1e-10));
    }

    #[test]
    fn bound_violation_is_reported() {
        let mut cert = assemble_certificate(
            Objective::Equilateral,
            &SearchDomain::admissible(),
            &SearchSettings::default(),
            &[],
        );
        cert.optimum_sq = 2.5;
        let r = check_bound(&cert, BOUND_SQ, 1e-8);
        assert!(!r.satisfied);
        assert_abs_diff_eq!(r.margin, -0.5);
    }

    #[test]
    fn brute_force_cube_hits_corner_triangle() {
        let d = SearchDomain::admissible().pinned(1.0, 1.0);
        for n in [2, 3, 5] {
            let (v, p) = brute_force_max(&d, Objective::MinSide, Resolution::uniform(n)).unwrap();
            assert!(v >= 2.0 - 1e-12, "n = {n}: {v}");
            assert_eq!(p.brick, Brick::cube());
        }
    }

    #[test]
    fn brute_force_matches_naive_enumeration() {
        for (domain, n) in [
            (SearchDomain::admissible(), 7),
            (SearchDomain::admissible(), 8),
            (SearchDomain::with_min_side(0.5), 6),
            (SearchDomain::admissible().pinned(1.1, 0.95), 9),
        ] {
            let (v, p) = brute_force_max(&domain, Objective::MinSide, Resolution::uniform(n)).unwrap();
            let naive = naive_min_side(&domain, n);
            assert_abs_diff_eq!(v, naive, epsilon = 1e-12);
            let m = triangle_metrics(&p.brick, &Placement::new(SkewTriple::reference(), p.lambdas).unwrap());
            assert_abs_diff_eq!(m.min_sq, v, epsilon = 1e-12);
        }
    }

    #[test]
    fn brute_force_nested_grids_never_decrease() {
        let d = SearchDomain::admissible();
        let mut last = f64::NEG_INFINITY;
        for n in [3, 5, 9, 17] {
            let (v, _) = brute_force_max(&d, Objective::MinSide, Resolution::uniform(n)).unwrap();
            assert!(v >= last - 1e-15, "{n}: {v} < {last}");
            last = v;
        }
    }

    #[test]
    fn brute_force_regression_at_twenty() {
        // Frozen value of this oracle at 20 samples per axis.
        let d = SearchDomain::admissible();
        let (v, p) = brute_force_max(&d, Objective::MinSide, Resolution::uniform(20)).unwrap();
        assert!(v <= 2.0 + 1e-9);
        assert_abs_diff_eq!(v, 1.937_596_950_373_811_7, epsilon = 1e-12);
        assert!(p.brick.min_side() >= MIN_SIDE - 1e-12);
    }

    #[test]
    fn brute_force_equilateral_filter() {
        let d = SearchDomain::admissible().pinned(1.0, 1.0);
        let (v, p) = brute_force_max(&d, Objective::Equilateral, Resolution::uniform(5)).unwrap();
        assert_abs_diff_eq!(v, 2.0, epsilon = 1e-12);
        let m = triangle_metrics(&p.brick, &Placement::new(SkewTriple::reference(), p.lambdas).unwrap());
        assert!(m.eq_residual <= GRID_RESIDUAL_SCALE / 5.0);
    }

    #[test]
    fn brute_force_rejects_bad_inputs() {
        let d = SearchDomain::admissible();
        assert!(brute_force_max(&d, Objective::MinSide, Resolution::uniform(1)).is_err());
        assert!(brute_force_max(&SearchDomain::with_min_side(2.0), Objective::MinSide, Resolution::uniform(3)).is_err());
    }

    #[test]
    fn tags_round_trip() {
        for o in [Objective::Equilateral, Objective::MinSide] {
            assert_eq!(Objective::from_tag(o.tag()).unwrap(), o);
        }
        for opt in catalogue() {
            assert_eq!(OptimumId::from_tag(opt.id.tag()).unwrap(), opt.id);
        }
        assert!(OptimumId::from_tag("CASE3").is_err());
    }

    fn arb_witness() -> impl Strategy<Value = Witness> {
        let dims = prop_oneof![
            (0.3f64..3.0, 0.3f64..3.0, 0.3f64..3.0),
            Just((1.0, 1.0, 1.0)),
            (0.3f64..3.0, 0.3f64..3.0).prop_map(|(x, y)| (x, x, y)),
        ];
        let lambdas = prop::array::uniform3(prop_oneof![Just(0.0), Just(0.5), Just(1.0), 0.0f64..=1.0]);
        (dims, lambdas, 0usize..8).prop_map(|((a, b, c), l, t)| {
            let triple = enumerate_skew_triples()[t];
            Witness::evaluate(Brick::new(a, b, c).unwrap(), Placement::new(triple, l).unwrap())
        })
    }

    proptest! {
        #[test]
        fn canonicalization_is_idempotent(w in arb_witness()) {
            let c = canonicalize_witness(&w);
            let cc = canonicalize_witness(&c);
            prop_assert!(same_class(&c, &cc, 1e-12), "{:?} vs {:?}", c, cc);
            prop_assert!(c.brick.a <= c.brick.b && c.brick.b <= c.brick.c);
            prop_assert_eq!(c.placement.triple(), SkewTriple::reference());
        }

        #[test]
        fn canonicalization_is_constant_on_orbits(w in arb_witness(), k in 0usize..48) {
            let s = Symmetry::all()[k];
            let img = Witness::evaluate(s.apply_brick(&w.brick), s.apply_placement(&w.placement));
            let (c1, c2) = (canonicalize_witness(&w), canonicalize_witness(&img));
            prop_assert!(same_class(&c1, &c2, 1e-9), "{:?} vs {:?}", c1, c2);
        }

        #[test]
        fn canonicalization_preserves_metrics(w in arb_witness()) {
            let c = canonicalize_witness(&w);
            prop_assert!((c.side_sq - w.side_sq).abs() <= 1e-12 * w.side_sq.max(1.0));
            let mut x = [0.0; 3];
            let mut y = [0.0; 3];
            for (out, v) in [(&mut x, &w), (&mut y, &c)] {
                let m = triangle_metrics(&v.brick, &v.placement);
                *out = [m.sq_ab, m.sq_bc, m.sq_ca];
                out.sort_by(f64::total_cmp);
            }
            for i in 0..3 {
                prop_assert!((x[i] - y[i]).abs() <= 1e-12 * x[2].max(1.0));
            }
        }
    }
}
