//! Bricks, their edges, pairwise-skew edge triples and triangle placements.
//!
//! The brick occupies `[0, a] x [0, b] x [0, c]` with one corner at the
//! origin. An edge is identified by its direction and by which face (low or
//! high) it sits on along each of the two remaining axes.

use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Tolerance used by the admissibility predicates on [`Brick`].
pub const ADMISSIBILITY_TOL: f64 = 1e-12;

/// Smallest admissible brick side, `1/sqrt(2)`.
pub const MIN_SIDE: f64 = core::f64::consts::FRAC_1_SQRT_2;

pub type Point3 = [f64; 3];

#[inline]
pub fn dist_sq(p: &Point3, q: &Point3) -> f64 {
    let dx = p[0] - q[0];
    let dy = p[1] - q[1];
    let dz = p[2] - q[2];
    dx * dx + dy * dy + dz * dz
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Axis> {
        Axis::ALL.get(i).copied()
    }

    /// The two axes orthogonal to `self`, in ascending order.
    #[inline]
    pub fn others(self) -> [Axis; 2] {
        match self {
            Axis::X => [Axis::Y, Axis::Z],
            Axis::Y => [Axis::X, Axis::Z],
            Axis::Z => [Axis::X, Axis::Y],
        }
    }

    pub fn label(self) -> char {
        match self {
            Axis::X => 'X',
            Axis::Y => 'Y',
            Axis::Z => 'Z',
        }
    }
}

/// Rectangular box with positive side lengths along x, y and z.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Brick {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Brick {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        for s in [a, b, c] {
            if !(s.is_finite() && s > 0.0) {
                return Err(Error::Domain("brick sides must be finite and positive"));
            }
        }
        Ok(Brick { a, b, c })
    }

    /// Unit cube.
    pub fn cube() -> Self {
        Brick { a: 1.0, b: 1.0, c: 1.0 }
    }

    /// Brick with the given squared side lengths.
    pub fn from_squares(a_sq: f64, b_sq: f64, c_sq: f64) -> Result<Self> {
        Brick::new(libm::sqrt(a_sq), libm::sqrt(b_sq), libm::sqrt(c_sq))
    }

    #[inline]
    pub fn dims(&self) -> [f64; 3] {
        [self.a, self.b, self.c]
    }

    #[inline]
    pub fn side(&self, axis: Axis) -> f64 {
        self.dims()[axis.index()]
    }

    pub fn volume(&self) -> f64 {
        self.a * self.b * self.c
    }

    pub fn min_side(&self) -> f64 {
        self.a.min(self.b).min(self.c)
    }

    pub fn is_unit_volume(&self) -> bool {
        (self.volume() - 1.0).abs() <= ADMISSIBILITY_TOL
    }

    /// Unit volume and every side at least `1/sqrt(2)`.
    pub fn is_admissible(&self) -> bool {
        self.satisfies(MIN_SIDE, 1.0)
    }

    /// Generalized admissibility for a search domain with its own bounds.
    pub fn satisfies(&self, min_side: f64, volume: f64) -> bool {
        (self.volume() - volume).abs() <= ADMISSIBILITY_TOL * volume.max(1.0)
            && self.min_side() >= min_side - ADMISSIBILITY_TOL
    }

    pub fn scaled(&self, s: f64) -> Result<Self> {
        Brick::new(self.a * s, self.b * s, self.c * s)
    }

    /// The brick with its sides rearranged so that new axis `i` carries the
    /// old side `perm[i]`.
    pub fn permuted(&self, perm: [Axis; 3]) -> Self {
        let d = self.dims();
        Brick { a: d[perm[0].index()], b: d[perm[1].index()], c: d[perm[2].index()] }
    }
}

/// One of the twelve edges of a brick.
///
/// `offsets[k]` is the face (false = low, true = high) along the k-th axis of
/// `direction.others()`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId {
    pub direction: Axis,
    pub offsets: [bool; 2],
}

impl EdgeId {
    pub const fn new(direction: Axis, first: bool, second: bool) -> Self {
        EdgeId { direction, offsets: [first, second] }
    }

    /// All twelve edges in lexicographic (direction, offsets) order.
    pub fn all() -> [EdgeId; 12] {
        let mut out = [EdgeId::new(Axis::X, false, false); 12];
        let mut i = 0;
        for d in Axis::ALL {
            for o0 in [false, true] {
                for o1 in [false, true] {
                    out[i] = EdgeId::new(d, o0, o1);
                    i += 1;
                }
            }
        }
        out
    }

    /// Offset flag along `axis`, or `None` when `axis` is the edge direction.
    pub fn offset_along(&self, axis: Axis) -> Option<bool> {
        let [o0, o1] = self.direction.others();
        if axis == o0 {
            Some(self.offsets[0])
        } else if axis == o1 {
            Some(self.offsets[1])
        } else {
            None
        }
    }

    /// Origin corner (`lambda = 0`) and direction vector of the edge.
    pub fn origin_and_span(&self, brick: &Brick) -> (Point3, Point3) {
        let dims = brick.dims();
        let mut origin = [0.0; 3];
        let mut span = [0.0; 3];
        for (k, axis) in self.direction.others().into_iter().enumerate() {
            if self.offsets[k] {
                origin[axis.index()] = dims[axis.index()];
            }
        }
        span[self.direction.index()] = dims[self.direction.index()];
        (origin, span)
    }

    #[inline]
    pub(crate) fn point_at(&self, brick: &Brick, lambda: f64) -> Point3 {
        let dims = brick.dims();
        let mut p = [0.0; 3];
        let [o0, o1] = self.direction.others();
        if self.offsets[0] {
            p[o0.index()] = dims[o0.index()];
        }
        if self.offsets[1] {
            p[o1.index()] = dims[o1.index()];
        }
        p[self.direction.index()] = lambda * dims[self.direction.index()];
        p
    }

    /// Two distinct edges are skew exactly when their directions differ and
    /// they sit on opposite faces of the remaining axis.
    pub fn is_skew_to(&self, other: &EdgeId) -> bool {
        if self.direction == other.direction {
            return false;
        }
        let third = Axis::ALL
            .into_iter()
            .find(|&ax| ax != self.direction && ax != other.direction)
            .expect("three axes");
        self.offset_along(third) != other.offset_along(third)
    }
}

impl fmt::Display for EdgeId {
    /// `X01` is the x-directed edge at y = 0 (low), z = b (high).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}{}",
            self.direction.label(),
            self.offsets[0] as u8,
            self.offsets[1] as u8
        )
    }
}

impl core::str::FromStr for EdgeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bytes = s.as_bytes();
        if bytes.len() != 3 {
            return Err(Error::Parse("edge id must look like X01"));
        }
        let direction = match bytes[0] {
            b'X' => Axis::X,
            b'Y' => Axis::Y,
            b'Z' => Axis::Z,
            _ => return Err(Error::Parse("edge direction must be X, Y or Z")),
        };
        let flag = |b: u8| match b {
            b'0' => Ok(false),
            b'1' => Ok(true),
            _ => Err(Error::Parse("edge offsets must be 0 or 1")),
        };
        Ok(EdgeId::new(direction, flag(bytes[1])?, flag(bytes[2])?))
    }
}

/// Point on `edge` at normalized position `lambda`.
pub fn vertex_position(brick: &Brick, edge: EdgeId, lambda: f64) -> Result<Point3> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Domain("edge parameter must lie in [0, 1]"));
    }
    Ok(edge.point_at(brick, lambda))
}

/// Three pairwise-skew edges, one per direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SkewTriple {
    ex: EdgeId,
    ey: EdgeId,
    ez: EdgeId,
}

impl SkewTriple {
    pub fn new(ex: EdgeId, ey: EdgeId, ez: EdgeId) -> Result<Self> {
        if ex.direction != Axis::X || ey.direction != Axis::Y || ez.direction != Axis::Z {
            return Err(Error::Domain("skew triple needs one X, one Y and one Z edge, in order"));
        }
        if !(ex.is_skew_to(&ey) && ex.is_skew_to(&ez) && ey.is_skew_to(&ez)) {
            return Err(Error::Domain("triple edges are not pairwise skew"));
        }
        Ok(SkewTriple { ex, ey, ez })
    }

    /// The first triple in enumeration order: `X00, Y01, Z11`.
    pub fn reference() -> Self {
        enumerate_skew_triples()[0]
    }

    pub fn ex(&self) -> EdgeId {
        self.ex
    }

    pub fn ey(&self) -> EdgeId {
        self.ey
    }

    pub fn ez(&self) -> EdgeId {
        self.ez
    }

    #[inline]
    pub fn edges(&self) -> [EdgeId; 3] {
        [self.ex, self.ey, self.ez]
    }

    /// Position of this triple in [`enumerate_skew_triples`].
    pub fn index(&self) -> usize {
        enumerate_skew_triples()
            .iter()
            .position(|t| t == self)
            .expect("constructed triples are always enumerated")
    }
}

/// Every triple of pairwise-skew edges, ordered lexicographically by
/// `(ex, ey, ez)`.
pub fn enumerate_skew_triples() -> Vec<SkewTriple> {
    let edges = EdgeId::all();
    let mut out = Vec::with_capacity(8);
    for ex in edges.iter().filter(|e| e.direction == Axis::X) {
        for ey in edges.iter().filter(|e| e.direction == Axis::Y) {
            for ez in edges.iter().filter(|e| e.direction == Axis::Z) {
                if let Ok(t) = SkewTriple::new(*ex, *ey, *ez) {
                    out.push(t);
                }
            }
        }
    }
    out
}

/// A triangle with vertex A on `ex`, B on `ey` and C on `ez`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Placement {
    triple: SkewTriple,
    lambdas: [f64; 3],
}

impl Placement {
    pub fn new(triple: SkewTriple, lambdas: [f64; 3]) -> Result<Self> {
        if lambdas.iter().any(|l| !(0.0..=1.0).contains(l)) {
            return Err(Error::Domain("edge parameters must lie in [0, 1]"));
        }
        Ok(Placement { triple, lambdas })
    }

    /// Clamps each parameter into `[0, 1]`. NaN maps to 0.
    pub(crate) fn clamped(triple: SkewTriple, lambdas: [f64; 3]) -> Self {
        let c = |l: f64| if l >= 1.0 { 1.0 } else if l > 0.0 { l } else { 0.0 };
        Placement { triple, lambdas: [c(lambdas[0]), c(lambdas[1]), c(lambdas[2])] }
    }

    pub fn triple(&self) -> SkewTriple {
        self.triple
    }

    pub fn lambdas(&self) -> [f64; 3] {
        self.lambdas
    }

    pub fn vertices(&self, brick: &Brick) -> [Point3; 3] {
        let [ex, ey, ez] = self.triple.edges();
        [
            ex.point_at(brick, self.lambdas[0]),
            ey.point_at(brick, self.lambdas[1]),
            ez.point_at(brick, self.lambdas[2]),
        ]
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TriangleMetrics {
    pub sq_ab: f64,
    pub sq_bc: f64,
    pub sq_ca: f64,
    pub min_sq: f64,
    pub eq_residual: f64,
}

impl TriangleMetrics {
    pub fn from_squares(sq_ab: f64, sq_bc: f64, sq_ca: f64) -> Self {
        TriangleMetrics {
            sq_ab,
            sq_bc,
            sq_ca,
            min_sq: sq_ab.min(sq_bc).min(sq_ca),
            eq_residual: (sq_ab - sq_bc).abs().max((sq_bc - sq_ca).abs()),
        }
    }

    pub fn max_sq(&self) -> f64 {
        self.sq_ab.max(self.sq_bc).max(self.sq_ca)
    }
}

pub fn triangle_metrics(brick: &Brick, placement: &Placement) -> TriangleMetrics {
    let [p, q, r] = placement.vertices(brick);
    TriangleMetrics::from_squares(dist_sq(&p, &q), dist_sq(&q, &r), dist_sq(&r, &p))
}

/// An element of the brick's symmetry group: axis permutation followed by
/// reflections.
///
/// Applying it to a configuration on brick `B` gives the mirrored
/// configuration on `B.permuted(perm)`: new axis `i` is old axis `perm[i]`,
/// and new axis `i` is then reflected when bit `i` of `flips` is set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Symmetry {
    pub perm: [Axis; 3],
    pub flips: u8,
}

impl Symmetry {
    pub const IDENTITY: Symmetry = Symmetry { perm: [Axis::X, Axis::Y, Axis::Z], flips: 0 };

    pub fn reflection(flips: u8) -> Self {
        Symmetry { flips: flips & 0b111, ..Symmetry::IDENTITY }
    }

    /// All six permutations of the axes.
    pub fn permutations() -> [[Axis; 3]; 6] {
        use Axis::*;
        [[X, Y, Z], [X, Z, Y], [Y, X, Z], [Y, Z, X], [Z, X, Y], [Z, Y, X]]
    }

    /// All 48 symmetries, identity first.
    pub fn all() -> Vec<Symmetry> {
        let mut out = Vec::with_capacity(48);
        for perm in Symmetry::permutations() {
            for flips in 0..8u8 {
                out.push(Symmetry { perm, flips });
            }
        }
        out
    }

    #[inline]
    fn flipped(&self, new_axis: Axis) -> bool {
        self.flips & (1 << new_axis.index()) != 0
    }

    /// New axis that old axis `old` is mapped to.
    fn image_of(&self, old: Axis) -> Axis {
        Axis::ALL
            .into_iter()
            .find(|&i| self.perm[i.index()] == old)
            .expect("perm is a bijection")
    }

    pub fn apply_brick(&self, brick: &Brick) -> Brick {
        brick.permuted(self.perm)
    }

    /// Image of an edge. The returned flag tells whether the edge's
    /// parameter runs backwards (`lambda -> 1 - lambda`).
    pub fn apply_edge(&self, edge: EdgeId) -> (EdgeId, bool) {
        let direction = self.image_of(edge.direction);
        let mut offsets = [false; 2];
        for (k, axis) in direction.others().into_iter().enumerate() {
            let old_axis = self.perm[axis.index()];
            let flag = edge.offset_along(old_axis).expect("orthogonal axis");
            offsets[k] = flag ^ self.flipped(axis);
        }
        (EdgeId { direction, offsets }, self.flipped(direction))
    }

    /// Image of a placement. Vertices are relabeled so that A stays on the
    /// x-directed edge of the image.
    pub fn apply_placement(&self, placement: &Placement) -> Placement {
        let mut edges = [EdgeId::new(Axis::X, false, false); 3];
        let mut lambdas = [0.0; 3];
        for (edge, lambda) in placement.triple.edges().into_iter().zip(placement.lambdas) {
            let (img, reversed) = self.apply_edge(edge);
            let slot = img.direction.index();
            edges[slot] = img;
            lambdas[slot] = if reversed { 1.0 - lambda } else { lambda };
        }
        let triple = SkewTriple::new(edges[0], edges[1], edges[2])
            .expect("symmetries map skew triples to skew triples");
        Placement::clamped(triple, lambdas)
    }

    /// Image of a point of brick `brick` (given in the old frame).
    pub fn apply_point(&self, brick: &Brick, p: &Point3) -> Point3 {
        let dims = brick.dims();
        let mut out = [0.0; 3];
        for i in Axis::ALL {
            let old = self.perm[i.index()];
            let v = p[old.index()];
            out[i.index()] = if self.flipped(i) { dims[old.index()] - v } else { v };
        }
        out
    }
}

/// The unique reflection that maps `from` onto `to` (reflections act simply
/// transitively on the eight skew triples).
pub fn reflection_between(from: SkewTriple, to: SkewTriple) -> Symmetry {
    (0..8u8)
        .map(Symmetry::reflection)
        .find(|s| {
            let [ex, ey, ez] = from.edges();
            [s.apply_edge(ex).0, s.apply_edge(ey).0, s.apply_edge(ez).0] == to.edges()
        })
        .expect("reflections act transitively on skew triples")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn triple(ex: &str, ey: &str, ez: &str) -> SkewTriple {
        SkewTriple::new(ex.parse().unwrap(), ey.parse().unwrap(), ez.parse().unwrap()).unwrap()
    }

    #[test]
    fn twelve_distinct_edges() {
        let edges = EdgeId::all();
        for i in 0..12 {
            for j in 0..i {
                assert_ne!(edges[i], edges[j]);
            }
        }
        assert!(edges.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn eight_triples_one_per_direction() {
        let triples = enumerate_skew_triples();
        assert_eq!(triples.len(), 8);
        for t in &triples {
            assert_eq!(t.ex().direction, Axis::X);
            assert_eq!(t.ey().direction, Axis::Y);
            assert_eq!(t.ez().direction, Axis::Z);
        }
        assert!(triples.contains(&triple("X00", "Y01", "Z11")));
        assert_eq!(SkewTriple::reference(), triple("X00", "Y01", "Z11"));
    }

    #[test]
    fn rejects_intersecting_or_misordered_triples() {
        let e = |s: &str| s.parse::<EdgeId>().unwrap();
        // X00 and Y00 share the origin corner.
        assert!(SkewTriple::new(e("X00"), e("Y00"), e("Z11")).is_err());
        assert!(SkewTriple::new(e("Y01"), e("X00"), e("Z11")).is_err());
    }

    #[test]
    fn vertex_positions() {
        let cube = Brick::cube();
        let p = vertex_position(&cube, "X00".parse().unwrap(), 0.5).unwrap();
        assert_eq!(p, [0.5, 0.0, 0.0]);

        let brick = Brick::new(2.0, 1.0, 0.5).unwrap();
        let p = vertex_position(&brick, "Z11".parse().unwrap(), 1.0).unwrap();
        assert_eq!(p, [2.0, 1.0, 0.5]);

        for edge in EdgeId::all() {
            let (origin, _) = edge.origin_and_span(&brick);
            assert_eq!(vertex_position(&brick, edge, 0.0).unwrap(), origin);
        }
    }

    #[test]
    fn vertex_position_rejects_out_of_range() {
        let cube = Brick::cube();
        let e = "X00".parse().unwrap();
        assert!(matches!(vertex_position(&cube, e, -0.1), Err(Error::Domain(_))));
        assert!(matches!(vertex_position(&cube, e, 1.5), Err(Error::Domain(_))));
        assert!(vertex_position(&cube, e, f64::NAN).is_err());
    }

    #[test]
    fn corner_triangle_of_cube() {
        let t = triple("X10", "Y01", "Z10");
        let pl = Placement::new(t, [0.0, 0.0, 0.0]).unwrap();
        let v = pl.vertices(&Brick::cube());
        assert_eq!(v, [[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]]);
        let m = triangle_metrics(&Brick::cube(), &pl);
        assert_eq!((m.sq_ab, m.sq_bc, m.sq_ca), (2.0, 2.0, 2.0));
        assert_eq!(m.eq_residual, 0.0);
    }

    #[test]
    fn reference_triple_at_origin_corners() {
        let pl = Placement::new(SkewTriple::reference(), [0.0; 3]).unwrap();
        let cube = Brick::cube();
        assert_eq!(pl.vertices(&cube), [[0.0, 0.0, 0.0], [0.0, 0.0, 1.0], [1.0, 1.0, 0.0]]);
        let m = triangle_metrics(&cube, &pl);
        assert_eq!((m.sq_ab, m.sq_bc, m.sq_ca), (1.0, 3.0, 2.0));
        assert_eq!(m.min_sq, 1.0);
        assert_eq!(m.eq_residual, 2.0);
    }

    #[test]
    fn case_two_brick_placement_is_equilateral() {
        // A = (0, b, c) on X11, B = (0, 0, 0) on Y00, C = (a, 0, 2c/3) on Z10.
        let brick = Brick::from_squares(4.0 / 3.0, 0.5, 1.5).unwrap();
        let pl = Placement::new(triple("X11", "Y00", "Z10"), [0.0, 0.0, 2.0 / 3.0]).unwrap();
        let m = triangle_metrics(&brick, &pl);
        assert!(m.eq_residual <= 1e-12, "{m:?}");
        for s in [m.sq_ab, m.sq_bc, m.sq_ca] {
            assert_abs_diff_eq!(s, 2.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn admissibility() {
        assert!(Brick::cube().is_admissible());
        let b = Brick::new(2.0, MIN_SIDE, MIN_SIDE).unwrap();
        assert!(b.is_admissible());
        assert!(!Brick::new(2.0, 1.0, 0.5).unwrap().is_admissible());
        assert!(!Brick::new(1.0, 1.0, 1.1).unwrap().is_unit_volume());
        assert!(Brick::new(0.0, 1.0, 1.0).is_err());
        assert!(Brick::new(f64::INFINITY, 1.0, 1.0).is_err());
    }

    #[test]
    fn edge_id_text_round_trip() {
        for e in EdgeId::all() {
            let s = alloc::format!("{e}");
            assert_eq!(s.parse::<EdgeId>().unwrap(), e);
        }
        assert!("W00".parse::<EdgeId>().is_err());
        assert!("X2".parse::<EdgeId>().is_err());
    }

    #[test]
    fn reflections_act_simply_transitively() {
        let triples = enumerate_skew_triples();
        let r = SkewTriple::reference();
        let mut seen = Vec::new();
        for flips in 0..8u8 {
            let s = Symmetry::reflection(flips);
            let pl = s.apply_placement(&Placement::new(r, [0.0; 3]).unwrap());
            assert!(!seen.contains(&pl.triple()));
            seen.push(pl.triple());
        }
        assert_eq!(seen.len(), triples.len());
        for t in &triples {
            let s = reflection_between(*t, r);
            let pl = s.apply_placement(&Placement::new(*t, [0.25, 0.5, 0.75]).unwrap());
            assert_eq!(pl.triple(), r);
        }
    }

    #[test]
    fn symmetry_maps_vertices_consistently() {
        let brick = Brick::new(1.3, 0.8, 0.9).unwrap();
        let pl = Placement::new(triple("X01", "Y10", "Z01"), [0.2, 0.7, 0.4]).unwrap();
        for s in Symmetry::all() {
            let img = s.apply_placement(&pl);
            let img_brick = s.apply_brick(&brick);
            let mut expected: Vec<Point3> =
                pl.vertices(&brick).iter().map(|p| s.apply_point(&brick, p)).collect();
            let mut got: Vec<Point3> = img.vertices(&img_brick).to_vec();
            let key = |p: &Point3, q: &Point3| p.partial_cmp(q).unwrap();
            expected.sort_by(key);
            got.sort_by(key);
            for (p, q) in expected.iter().zip(&got) {
                assert!(dist_sq(p, q) < 1e-24, "{s:?}: {p:?} vs {q:?}");
            }
        }
    }

    /// Distance between two segments: golden search over the first
    /// parameter, exact projection for the second (convex in both).
    fn segment_distance(p0: Point3, p1: Point3, q0: Point3, q1: Point3) -> f64 {
        let lerp = |a: Point3, b: Point3, t: f64| [0, 1, 2].map(|i| a[i] + t * (b[i] - a[i]));
        let inner = |t: f64| {
            let p = lerp(p0, p1, t);
            let d = [0, 1, 2].map(|i| q1[i] - q0[i]);
            let dd: f64 = d.iter().map(|x| x * x).sum();
            let s = if dd == 0.0 {
                0.0
            } else {
                ([0, 1, 2].iter().map(|&i| (p[i] - q0[i]) * d[i]).sum::<f64>() / dd).clamp(0.0, 1.0)
            };
            dist_sq(&p, &lerp(q0, q1, s))
        };
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..200 {
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            if inner(m1) <= inner(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        libm::sqrt(inner(0.5 * (lo + hi)).min(inner(0.0)).min(inner(1.0)))
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_brick() -> impl Strategy<Value = Brick> {
            (0.05f64..20.0, 0.05f64..20.0, 0.05f64..20.0).prop_map(|(a, b, c)| Brick::new(a, b, c).unwrap())
        }

        fn arb_placement() -> impl Strategy<Value = Placement> {
            let lam = prop_oneof![Just(0.0), Just(1.0), 0.0f64..=1.0];
            (0usize..8, prop::array::uniform3(lam))
                .prop_map(|(k, l)| Placement::new(enumerate_skew_triples()[k], l).unwrap())
        }

        proptest! {
            #[test]
            fn skew_edges_keep_positive_distance(brick in arb_brick(), k in 0usize..8) {
                let t = enumerate_skew_triples()[k];
                let segs: Vec<(Point3, Point3)> = t
                    .edges()
                    .iter()
                    .map(|e| (e.point_at(&brick, 0.0), e.point_at(&brick, 1.0)))
                    .collect();
                let floor = brick.min_side() * 0.999;
                for i in 0..3 {
                    for j in i + 1..3 {
                        let d = segment_distance(segs[i].0, segs[i].1, segs[j].0, segs[j].1);
                        prop_assert!(d >= floor, "{:?} {} {}: {}", t, i, j, d);
                    }
                }
            }

            #[test]
            fn scale_equivariance(brick in arb_brick(), pl in arb_placement(), s in 0.1f64..10.0) {
                let m = triangle_metrics(&brick, &pl);
                let ms = triangle_metrics(&brick.scaled(s).unwrap(), &pl);
                let tol = 1e-12 * m.max_sq().max(1.0) * s * s;
                prop_assert!((ms.sq_ab - s * s * m.sq_ab).abs() <= tol);
                prop_assert!((ms.sq_bc - s * s * m.sq_bc).abs() <= tol);
                prop_assert!((ms.sq_ca - s * s * m.sq_ca).abs() <= tol);
            }

            #[test]
            fn reflection_invariance(brick in arb_brick(), pl in arb_placement(), flips in 0u8..8) {
                let m = triangle_metrics(&brick, &pl);
                let img = Symmetry::reflection(flips).apply_placement(&pl);
                let mi = triangle_metrics(&brick, &img);
                let tol = 1e-12 * m.max_sq().max(1.0);
                prop_assert!((m.sq_ab - mi.sq_ab).abs() <= tol);
                prop_assert!((m.sq_bc - mi.sq_bc).abs() <= tol);
                prop_assert!((m.sq_ca - mi.sq_ca).abs() <= tol);
            }

            #[test]
            fn relabeling_permutes_sides(brick in arb_brick(), pl in arb_placement(), k in 0usize..6) {
                let m = triangle_metrics(&brick, &pl);
                let v = pl.vertices(&brick);
                let order = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]][k];
                let [p, q, r] = order.map(|i| v[i]);
                let mr = TriangleMetrics::from_squares(dist_sq(&p, &q), dist_sq(&q, &r), dist_sq(&r, &p));
                let mut x = [m.sq_ab, m.sq_bc, m.sq_ca];
                let mut y = [mr.sq_ab, mr.sq_bc, mr.sq_ca];
                x.sort_by(f64::total_cmp);
                y.sort_by(f64::total_cmp);
                prop_assert_eq!(x, y);
                prop_assert_eq!(m.min_sq, mr.min_sq);
                // The residual compares two of the three pairs, so it is
                // pinned between half the spread and the spread.
                let spread = x[2] - x[0];
                for res in [m.eq_residual, mr.eq_residual] {
                    prop_assert!(res <= spread + 1e-12 && res >= 0.5 * spread - 1e-12);
                }
            }
        }
    }
}
