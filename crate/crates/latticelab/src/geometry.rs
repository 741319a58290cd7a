//! Exact geometry of finite lattice sets.
//!
//! Everything here is integer or rational arithmetic: hulls via cross
//! products, point membership via half-plane signs, distances compared on
//! squared rationals. No floating point enters any membership decision.

use crate::error::{LatticeError, Result};
use num_rational::Ratio;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Neg, Sub};

pub type Rational = Ratio<i64>;

/// Guard for bounding-box enumeration; generous for desk-scale regions.
const SCAN_GUARD: u128 = 16_000_000;

/// Cell count of an inclusive bounding box, widened before arithmetic so
/// extreme corner coordinates cannot overflow. Saturates at u128::MAX,
/// far above every guard.
fn bbox_cells(min: LatticePoint, max: LatticePoint) -> u128 {
    let w = (max.x as i128 - min.x as i128 + 1) as u128;
    let h = (max.y as i128 - min.y as i128 + 1) as u128;
    w.saturating_mul(h)
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct LatticePoint {
    pub x: i64,
    pub y: i64,
}

pub const fn pt(x: i64, y: i64) -> LatticePoint {
    LatticePoint { x, y }
}

impl LatticePoint {
    pub fn cross(self, other: LatticePoint) -> i128 {
        self.x as i128 * other.y as i128 - self.y as i128 * other.x as i128
    }

    pub fn dot(self, other: LatticePoint) -> i128 {
        self.x as i128 * other.x as i128 + self.y as i128 * other.y as i128
    }

    pub fn norm_sq(self) -> i128 {
        self.dot(self)
    }
}

impl Add for LatticePoint {
    type Output = LatticePoint;
    fn add(self, o: LatticePoint) -> LatticePoint {
        pt(self.x + o.x, self.y + o.y)
    }
}

impl Sub for LatticePoint {
    type Output = LatticePoint;
    fn sub(self, o: LatticePoint) -> LatticePoint {
        pt(self.x - o.x, self.y - o.y)
    }
}

impl Neg for LatticePoint {
    type Output = LatticePoint;
    fn neg(self) -> LatticePoint {
        pt(-self.x, -self.y)
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

/// Canonical point order: row-major, bottom row first.
fn point_key(p: &LatticePoint) -> (i64, i64) {
    (p.y, p.x)
}

/// A finite set of lattice points in canonical (y, x) order.
///
/// This is the working currency of the complexity engine; it makes no
/// convexity claim, so restrictions like `S \ {x}` stay representable.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize)]
pub struct PointSet {
    points: Vec<LatticePoint>,
}

impl PointSet {
    pub fn new(points: impl IntoIterator<Item = LatticePoint>) -> PointSet {
        let mut points: Vec<_> = points.into_iter().collect();
        points.sort_unstable_by_key(point_key);
        points.dedup();
        PointSet { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = LatticePoint> + '_ {
        self.points.iter().copied()
    }

    pub fn as_slice(&self) -> &[LatticePoint] {
        &self.points
    }

    pub fn contains(&self, p: LatticePoint) -> bool {
        self.points
            .binary_search_by_key(&point_key(&p), point_key)
            .is_ok()
    }

    /// Index of `p` in canonical order.
    pub fn index_of(&self, p: LatticePoint) -> Option<usize> {
        self.points
            .binary_search_by_key(&point_key(&p), point_key)
            .ok()
    }

    /// Inclusive bounding box; `None` for the empty set.
    pub fn bbox(&self) -> Option<(LatticePoint, LatticePoint)> {
        if self.points.is_empty() {
            return None;
        }
        let mut min = self.points[0];
        let mut max = self.points[0];
        for p in &self.points {
            min.x = min.x.min(p.x);
            min.y = min.y.min(p.y);
            max.x = max.x.max(p.x);
            max.y = max.y.max(p.y);
        }
        Some((min, max))
    }

    pub fn translate(&self, v: LatticePoint) -> PointSet {
        // Translation preserves canonical order, so no re-sort.
        PointSet {
            points: self.points.iter().map(|p| *p + v).collect(),
        }
    }

    /// The set shifted so its bounding-box min corner is the origin,
    /// together with the shift that was removed.
    pub fn anchored(&self) -> (PointSet, LatticePoint) {
        match self.bbox() {
            None => (self.clone(), pt(0, 0)),
            Some((min, _)) => (self.translate(-min), min),
        }
    }

    pub fn minus(&self, remove: &PointSet) -> PointSet {
        PointSet {
            points: self
                .points
                .iter()
                .copied()
                .filter(|p| !remove.contains(*p))
                .collect(),
        }
    }

    pub fn without_point(&self, x: LatticePoint) -> PointSet {
        PointSet {
            points: self.points.iter().copied().filter(|p| *p != x).collect(),
        }
    }

    pub fn union(&self, other: &PointSet) -> PointSet {
        PointSet::new(self.iter().chain(other.iter()))
    }

    pub fn is_subset_of(&self, other: &PointSet) -> bool {
        self.iter().all(|p| other.contains(p))
    }
}

/// Convex hull of already sorted, deduplicated points; CCW, strict turns.
fn hull_of_sorted(points: &[LatticePoint]) -> Vec<LatticePoint> {
    if points.len() <= 2 {
        return points.to_vec();
    }
    let mut pts = points.to_vec();
    pts.sort_unstable_by_key(|p| (p.x, p.y));
    let mut lower: Vec<LatticePoint> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 {
            let a = lower[lower.len() - 2];
            let b = lower[lower.len() - 1];
            if (b - a).cross(p - a) <= 0 {
                lower.pop();
            } else {
                break;
            }
        }
        lower.push(p);
    }
    let mut upper: Vec<LatticePoint> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 {
            let a = upper[upper.len() - 2];
            let b = upper[upper.len() - 1];
            if (b - a).cross(p - a) <= 0 {
                upper.pop();
            } else {
                break;
            }
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.is_empty() {
        // All points collinear: keep the two extremes.
        vec![pts[0], *pts.last().unwrap()]
    } else {
        lower
    }
}

/// Exact point-in-hull test. `hull` is CCW with strict turns, or a
/// degenerate singleton/segment.
fn hull_contains(hull: &[LatticePoint], p: LatticePoint) -> bool {
    match hull.len() {
        0 => false,
        1 => hull[0] == p,
        2 => {
            let (a, b) = (hull[0], hull[1]);
            let d = b - a;
            let w = p - a;
            d.cross(w) == 0 && d.dot(w) >= 0 && d.dot(w) <= d.norm_sq()
        }
        _ => {
            for i in 0..hull.len() {
                let a = hull[i];
                let b = hull[(i + 1) % hull.len()];
                if (b - a).cross(p - a) < 0 {
                    return false;
                }
            }
            true
        }
    }
}

/// A finite nonempty set of lattice points equal to the lattice points of
/// its own convex hull. The invariant is established at construction.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct ConvexLatticeSet {
    points: PointSet,
    hull: Vec<LatticePoint>,
}

impl ConvexLatticeSet {
    /// Closes an arbitrary nonempty point collection: conv(input) ∩ Z².
    pub fn convex_close(input: &[LatticePoint]) -> Result<ConvexLatticeSet> {
        if input.is_empty() {
            return Err(LatticeError::EmptySet);
        }
        let seed = PointSet::new(input.iter().copied());
        let hull = hull_of_sorted(seed.as_slice());
        let (min, max) = seed.bbox().unwrap();
        let cells = bbox_cells(min, max);
        if cells > SCAN_GUARD {
            return Err(LatticeError::RegionTooLarge {
                cells,
                limit: SCAN_GUARD,
            });
        }
        let mut pts = Vec::new();
        for y in min.y..=max.y {
            for x in min.x..=max.x {
                let p = pt(x, y);
                if hull_contains(&hull, p) {
                    pts.push(p);
                }
            }
        }
        Ok(ConvexLatticeSet {
            points: PointSet::new(pts),
            hull,
        })
    }

    /// Wraps a point set that is already convex; errors with a witness
    /// point of the hull that is missing from the set otherwise.
    pub fn from_set_exact(set: PointSet) -> Result<ConvexLatticeSet> {
        let closed = ConvexLatticeSet::convex_close(set.as_slice())?;
        if closed.points.len() != set.len() {
            let witness = closed
                .points
                .iter()
                .find(|p| !set.contains(*p))
                .expect("closure is a superset");
            return Err(LatticeError::NotConvex(witness));
        }
        Ok(closed)
    }

    /// Axis-aligned rectangle of lattice points, both corners inclusive.
    pub fn rect(min: LatticePoint, max: LatticePoint) -> Result<ConvexLatticeSet> {
        if min.x > max.x || min.y > max.y {
            return Err(LatticeError::EmptySet);
        }
        let cells = bbox_cells(min, max);
        if cells > SCAN_GUARD {
            return Err(LatticeError::RegionTooLarge {
                cells,
                limit: SCAN_GUARD,
            });
        }
        let mut pts = Vec::with_capacity(cells as usize);
        for y in min.y..=max.y {
            for x in min.x..=max.x {
                pts.push(pt(x, y));
            }
        }
        let hull = hull_of_sorted(&pts);
        Ok(ConvexLatticeSet {
            points: PointSet { points: pts },
            hull,
        })
    }

    /// The n×k rectangle [0,n-1]×[0,k-1].
    pub fn grid_rect(n: i64, k: i64) -> Result<ConvexLatticeSet> {
        if n < 1 || k < 1 {
            return Err(LatticeError::NonPositive {
                what: "rectangle side",
                got: format!("{}x{}", n, k),
            });
        }
        ConvexLatticeSet::rect(pt(0, 0), pt(n - 1, k - 1))
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn hull(&self) -> &[LatticePoint] {
        &self.hull
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, p: LatticePoint) -> bool {
        self.points.contains(p)
    }

    pub fn bbox(&self) -> (LatticePoint, LatticePoint) {
        self.points.bbox().expect("convex sets are nonempty")
    }

    pub fn translate(&self, v: LatticePoint) -> ConvexLatticeSet {
        ConvexLatticeSet {
            points: self.points.translate(v),
            hull: self.hull.iter().map(|p| *p + v).collect(),
        }
    }

    /// Lattice points of the set lying on the hull boundary.
    pub fn boundary_points(&self) -> PointSet {
        match self.hull.len() {
            1 | 2 => self.points.clone(),
            _ => {
                let mut out = Vec::new();
                for p in self.points.iter() {
                    for i in 0..self.hull.len() {
                        let a = self.hull[i];
                        let b = self.hull[(i + 1) % self.hull.len()];
                        if (b - a).cross(p - a) == 0 {
                            out.push(p);
                            break;
                        }
                    }
                }
                PointSet::new(out)
            }
        }
    }

    /// Number of distinct x coordinates (columns touched).
    pub fn width(&self) -> u32 {
        let mut xs: Vec<i64> = self.points.iter().map(|p| p.x).collect();
        xs.sort_unstable();
        xs.dedup();
        xs.len() as u32
    }

    /// Number of distinct y coordinates (rows touched).
    pub fn height(&self) -> u32 {
        let mut ys: Vec<i64> = self.points.iter().map(|p| p.y).collect();
        ys.sort_unstable();
        ys.dedup();
        ys.len() as u32
    }
}

/// A primitive nonzero lattice direction. Constructors reduce by the gcd,
/// so (2,4) and (1,2) name the same direction.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Direction {
    p: i64,
    q: i64,
}

impl Direction {
    pub fn new(p: i64, q: i64) -> Result<Direction> {
        if p == 0 && q == 0 {
            return Err(LatticeError::ZeroDirection);
        }
        let g = num_integer::gcd(p.abs(), q.abs());
        Ok(Direction { p: p / g, q: q / g })
    }

    pub const E1: Direction = Direction { p: 1, q: 0 };
    pub const E2: Direction = Direction { p: 0, q: 1 };

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn vector(&self) -> LatticePoint {
        pt(self.p, self.q)
    }

    /// The plane normal used throughout: for direction (a,b) the associated
    /// half-planes are {x : <x,(b,-a)> <= c}.
    pub fn plane_normal(&self) -> LatticePoint {
        pt(self.q, -self.p)
    }

    pub fn neg(&self) -> Direction {
        Direction {
            p: -self.p,
            q: -self.q,
        }
    }

    pub fn norm_sq(&self) -> i64 {
        self.p * self.p + self.q * self.q
    }

    pub fn is_axis(&self) -> bool {
        self.p == 0 || self.q == 0
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.p, self.q)
    }
}

/// The directional edge E(l,S): the points of S on the boundary line of the
/// tightest half-plane {x : <x, normal> <= c} containing S, where normal is
/// `dir.plane_normal()`. For a convex S this is a contiguous lattice segment
/// parallel to `dir`.
pub fn edge_set(region: &ConvexLatticeSet, dir: Direction) -> ConvexLatticeSet {
    let n = dir.plane_normal();
    let c = region
        .points()
        .iter()
        .map(|p| p.dot(n))
        .max()
        .expect("convex sets are nonempty");
    let pts: Vec<_> = region.points().iter().filter(|p| p.dot(n) == c).collect();
    let hull = hull_of_sorted(&PointSet::new(pts.iter().copied()).points);
    ConvexLatticeSet {
        points: PointSet::new(pts),
        hull,
    }
}

/// Closed segment neighborhood [0, stretch·(p,q)]^(t): all lattice points at
/// Euclidean distance strictly less than `thickness` from the segment whose
/// endpoints are the origin and `stretch` times the primitive direction
/// vector. The Euclidean scale of the segment is stretch·sqrt(p²+q²); storing
/// the rational stretch keeps every membership test in rational arithmetic.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SegmentNeighborhood {
    pub direction: Direction,
    pub stretch: Rational,
    pub thickness: Rational,
}

type Rat128 = Ratio<i128>;

fn widen(r: Rational) -> Rat128 {
    Ratio::new(*r.numer() as i128, *r.denom() as i128)
}

impl SegmentNeighborhood {
    pub fn new(direction: Direction, stretch: Rational, thickness: Rational) -> Result<Self> {
        if stretch < Rational::zero() {
            return Err(LatticeError::Negative {
                what: "segment stretch",
                got: stretch.to_string(),
            });
        }
        if thickness <= Rational::zero() {
            return Err(LatticeError::NonPositive {
                what: "neighborhood thickness",
                got: thickness.to_string(),
            });
        }
        Ok(SegmentNeighborhood {
            direction,
            stretch,
            thickness,
        })
    }

    /// Euclidean length of the core segment, as a float for reporting.
    pub fn euclidean_scale(&self) -> f64 {
        ratio_to_f64(self.stretch) * (self.direction.norm_sq() as f64).sqrt()
    }

    /// Squared distance from `w` to the core segment, exact.
    fn dist_sq(&self, w: LatticePoint) -> Rat128 {
        let u = self.direction.vector();
        let n = self.direction.norm_sq() as i128;
        let proj = w.dot(u); // <w,u>, integer
        let lam = widen(self.stretch);
        if proj <= 0 {
            Ratio::from_integer(w.norm_sq())
        } else if Ratio::from_integer(proj) >= lam * n {
            // |w - lam*u|^2 = |w|^2 - 2 lam <w,u> + lam^2 n
            Ratio::from_integer(w.norm_sq()) - lam * (2 * proj) + lam * lam * n
        } else {
            let c = w.cross(u);
            Ratio::new(c * c, n)
        }
    }

    /// The lattice points of the neighborhood.
    pub fn points(&self) -> PointSet {
        let u = self.direction.vector();
        let lam = widen(self.stretch);
        let t = widen(self.thickness);
        let end_x = lam * u.x as i128;
        let end_y = lam * u.y as i128;
        let x_lo = rat_floor(Rat128::zero().min(end_x) - t);
        let x_hi = rat_ceil(Rat128::zero().max(end_x) + t);
        let y_lo = rat_floor(Rat128::zero().min(end_y) - t);
        let y_hi = rat_ceil(Rat128::zero().max(end_y) + t);
        let t_sq = t * t;
        let mut out = Vec::new();
        for y in y_lo..=y_hi {
            for x in x_lo..=x_hi {
                let w = pt(x as i64, y as i64);
                if self.dist_sq(w) < t_sq {
                    out.push(w);
                }
            }
        }
        PointSet::new(out)
    }
}

fn rat_floor(r: Rat128) -> i128 {
    r.floor().to_integer()
}

fn rat_ceil(r: Rat128) -> i128 {
    r.ceil().to_integer()
}

pub fn ratio_to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Compact text form of a rational: integers render bare, everything else
/// as `numer/denom`. Matches the CLI's input syntax for thicknesses.
pub fn ratio_string(r: Rational) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Directional thickness: the largest Euclidean length `tau` such that some
/// lattice translate of the segment [0, tau·û] fits inside the convex hull
/// of the region. Anchors are lattice points, so the value is
/// stretch·sqrt(p²+q²) with a rational stretch; the squared length is exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Thickness {
    pub stretch: Rational,
    pub dir_norm_sq: i64,
}

impl Thickness {
    pub fn zero(dir: Direction) -> Thickness {
        Thickness {
            stretch: Rational::zero(),
            dir_norm_sq: dir.norm_sq(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.stretch.is_zero()
    }

    /// Exact squared Euclidean length.
    pub fn euclidean_sq(&self) -> Rat128 {
        let s = widen(self.stretch);
        s * s * self.dir_norm_sq as i128
    }

    pub fn euclidean(&self) -> f64 {
        ratio_to_f64(self.stretch) * (self.dir_norm_sq as f64).sqrt()
    }
}

/// Maximal forward stretch of a chord starting at lattice point `v` and
/// running in direction `u` inside the hull. `v` must lie in the hull.
fn forward_stretch(hull: &[LatticePoint], v: LatticePoint, u: LatticePoint) -> Option<Rat128> {
    match hull.len() {
        0 => None,
        1 => Some(Rat128::zero()),
        2 => {
            let (a, b) = (hull[0], hull[1]);
            let d = b - a;
            if d.cross(u) != 0 {
                return Some(Rat128::zero());
            }
            // Both v and the segment lie on one line; express in units of u.
            // d = m*u with m = <d,u>/<u,u>; v = a + s*u similarly.
            let n = u.norm_sq();
            let m = Ratio::new(d.dot(u), n);
            let s = Ratio::new((v - a).dot(u), n);
            let hi = if m >= Ratio::zero() { m } else { Ratio::zero() };
            let lo = if m >= Ratio::zero() { Ratio::zero() } else { m };
            if s < lo || s > hi {
                return None;
            }
            Some(hi - s)
        }
        _ => {
            // Clip {v + t*u : t >= 0} against each CCW edge half-plane.
            let mut hi: Option<Rat128> = None;
            for i in 0..hull.len() {
                let a = hull[i];
                let b = hull[(i + 1) % hull.len()];
                let e = b - a;
                let alpha = e.cross(v - a);
                let beta = e.cross(u);
                if beta == 0 {
                    if alpha < 0 {
                        return None;
                    }
                } else {
                    let bound = Ratio::new(-alpha, beta);
                    if beta < 0 {
                        hi = Some(match hi {
                            None => bound,
                            Some(h) => h.min(bound),
                        });
                    } else if bound > Rat128::zero() {
                        // t >= bound > 0 contradicts starting inside at t=0
                        // only if v itself violates the half-plane.
                        if alpha < 0 {
                            return None;
                        }
                    }
                }
            }
            let h = hi.unwrap_or(Rat128::zero());
            if h < Rat128::zero() {
                None
            } else {
                Some(h)
            }
        }
    }
}

/// Directional thickness of a convex lattice set: the maximum over lattice
/// anchors in the region of the forward chord stretch, scaled to Euclidean
/// length by sqrt(p²+q²).
pub fn thickness(region: &ConvexLatticeSet, dir: Direction) -> Thickness {
    let u = dir.vector();
    let mut best = Rat128::zero();
    for v in region.points().iter() {
        if let Some(s) = forward_stretch(region.hull(), v, u) {
            if s > best {
                best = s;
            }
        }
    }
    Thickness {
        stretch: Rational::new(*best.numer() as i64, *best.denom() as i64),
        dir_norm_sq: dir.norm_sq(),
    }
}

/// Parameters of the trapezoid pair (T, B).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrapezoidParams {
    pub n1: i64,
    pub k1: i64,
    pub m: i64,
    pub k: i64,
}

/// The trapezoid T and its inner band B:
///
/// T = Z² ∩ ([0,n1-1]×[0,k-1] ∪ {(i,j) : n1 <= i <= m-1,
///                                k1(i-n1) <= j <= k - k1(i-n1)})
/// B = Z² ∩ [0,m-1]×[7·m·n1·k1, k - 7·m·n1·k1]
///
/// Requires k > 14·m·n1·k1, which makes B a nonempty sub-rectangle of T.
pub fn trapezoid_region(params: &TrapezoidParams) -> Result<(ConvexLatticeSet, ConvexLatticeSet)> {
    let TrapezoidParams { n1, k1, m, k } = *params;
    for (name, v) in [("n1", n1), ("k1", k1), ("m", m), ("k", k)] {
        if v < 1 {
            return Err(LatticeError::NonPositive {
                what: name,
                got: v.to_string(),
            });
        }
    }
    let bound = 14i64
        .checked_mul(m)
        .and_then(|v| v.checked_mul(n1))
        .and_then(|v| v.checked_mul(k1))
        .ok_or(LatticeError::Overflow("trapezoid bound 14*m*n1*k1"))?;
    if k <= bound {
        return Err(LatticeError::DegenerateTrapezoid { k, bound });
    }
    let mut pts = Vec::new();
    for i in 0..n1 {
        for j in 0..=k - 1 {
            pts.push(pt(i, j));
        }
    }
    for i in n1..=m - 1 {
        let off = k1 * (i - n1);
        for j in off..=k - off {
            pts.push(pt(i, j));
        }
    }
    let t = ConvexLatticeSet::from_set_exact(PointSet::new(pts))?;
    let half = bound / 2; // 7*m*n1*k1
    let b = ConvexLatticeSet::rect(pt(0, half), pt(m - 1, k - half))?;
    debug_assert!(b.points().is_subset_of(t.points()));
    Ok((t, b))
}

/// Signed line index of `p` against the family of lines parallel to `dir`:
/// constant exactly on each lattice line parallel to the direction.
pub fn line_index(p: LatticePoint, dir: Direction) -> i128 {
    p.dot(dir.plane_normal())
}
