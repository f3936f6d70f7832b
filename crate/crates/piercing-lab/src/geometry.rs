//! Closed planar regions (discs and convex polygons), intersection and
//! containment predicates, and the finite candidate-point set.
//!
//! Regions are closed sets: boundary points count as inside, so boundary
//! crossings are valid piercing witnesses. The candidate set per family is
//! one interior anchor per region plus every boundary-boundary intersection
//! point of each intersecting pair. For closed convex regions this set
//! dominates the arrangement: the signature of any plane point is a subset
//! of the signature of some candidate (`oracle::signature_grid_check`
//! falsifies this at finite resolution).

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Containment slack: a point within this distance of a region tests as
/// inside. Candidates are computed from boundary equations and must test
/// as contained despite floating-point rounding.
pub const CONTAINMENT_EPS: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("coordinate is not finite")]
    NonFiniteCoordinate,
    #[error("disc radius must be positive, got {0}")]
    NonPositiveRadius(f64),
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("polygon must be strictly convex, counterclockwise, without repeated vertices")]
    NotStrictlyConvex,
    #[error("family must contain at least one region")]
    EmptyFamily,
    #[error("region id {0} out of range for family of {1}")]
    BadRegionId(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

fn cross(ax: f64, ay: f64, bx: f64, by: f64) -> f64 {
    ax * by - ay * bx
}

/// Strictly convex counterclockwise polygon. Constructible only through
/// [`ConvexPolygon::new`], which rejects repeated vertices, clockwise order,
/// collinear triples and multiply-wound vertex sequences.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<Point>,
}

impl ConvexPolygon {
    pub fn new(vertices: Vec<Point>) -> Result<Self, GeometryError> {
        if vertices.len() < 3 {
            return Err(GeometryError::TooFewVertices(vertices.len()));
        }
        if vertices.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::NonFiniteCoordinate);
        }
        let k = vertices.len();
        let mut turn_sum = 0.0;
        for i in 0..k {
            let a = vertices[i];
            let b = vertices[(i + 1) % k];
            let c = vertices[(i + 2) % k];
            let (ux, uy) = (b.x - a.x, b.y - a.y);
            let (vx, vy) = (c.x - b.x, c.y - b.y);
            // Strict left turn at every vertex: convex, ccw, no duplicates.
            let turn_cross = cross(ux, uy, vx, vy);
            if turn_cross <= 0.0 {
                return Err(GeometryError::NotStrictlyConvex);
            }
            turn_sum += turn_cross.atan2(ux * vx + uy * vy);
        }
        // All-left-turn sequences can still wind several times around; each
        // turn is in (0, π), so the sum is 2π·w and a simple polygon has w = 1.
        let winding = (turn_sum / (2.0 * std::f64::consts::PI)).round() as i64;
        if winding != 1 {
            return Err(GeometryError::NotStrictlyConvex);
        }
        Ok(ConvexPolygon { vertices })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let k = self.vertices.len();
        (0..k).map(move |i| (self.vertices[i], self.vertices[(i + 1) % k]))
    }

    /// Vertex mean; strictly interior for a strictly convex polygon.
    pub fn centroid(&self) -> Point {
        let k = self.vertices.len() as f64;
        let sx: f64 = self.vertices.iter().map(|v| v.x).sum();
        let sy: f64 = self.vertices.iter().map(|v| v.y).sum();
        Point::new(sx / k, sy / k)
    }

    /// True containment without the tolerance slack.
    fn contains_exact(&self, p: Point) -> bool {
        self.edges()
            .all(|(a, b)| cross(b.x - a.x, b.y - a.y, p.x - a.x, p.y - a.y) >= 0.0)
    }

    /// Euclidean distance from `p` to the polygon; 0 inside.
    fn distance(&self, p: Point) -> f64 {
        if self.contains_exact(p) {
            return 0.0;
        }
        self.edges()
            .map(|(a, b)| point_segment_distance(p, a, b))
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    Disc { center: Point, radius: f64 },
    Polygon(ConvexPolygon),
}

impl Region {
    pub fn disc(center: Point, radius: f64) -> Result<Self, GeometryError> {
        let r = Region::Disc { center, radius };
        r.validate()?;
        Ok(r)
    }

    pub fn convex_polygon(vertices: Vec<Point>) -> Result<Self, GeometryError> {
        Ok(Region::Polygon(ConvexPolygon::new(vertices)?))
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        match self {
            Region::Disc { center, radius } => {
                if !center.is_finite() || !radius.is_finite() {
                    return Err(GeometryError::NonFiniteCoordinate);
                }
                if *radius <= 0.0 {
                    return Err(GeometryError::NonPositiveRadius(*radius));
                }
                Ok(())
            }
            // ConvexPolygon is validated on construction; re-check is cheap
            // and covers values assembled by deserialization paths.
            Region::Polygon(p) => ConvexPolygon::new(p.vertices.clone()).map(|_| ()),
        }
    }

    /// Closed containment with the [`CONTAINMENT_EPS`] slack.
    pub fn contains(&self, p: Point) -> bool {
        match self {
            Region::Disc { center, radius } => center.dist(p) <= radius + CONTAINMENT_EPS,
            Region::Polygon(poly) => poly.distance(p) <= CONTAINMENT_EPS,
        }
    }

    /// An interior point: disc center or polygon centroid.
    pub fn anchor(&self) -> Point {
        match self {
            Region::Disc { center, .. } => *center,
            Region::Polygon(poly) => poly.centroid(),
        }
    }

    /// Axis-aligned bounding box as (min corner, max corner).
    pub fn bbox(&self) -> (Point, Point) {
        match self {
            Region::Disc { center, radius } => (
                Point::new(center.x - radius, center.y - radius),
                Point::new(center.x + radius, center.y + radius),
            ),
            Region::Polygon(poly) => {
                let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
                let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
                for v in poly.vertices() {
                    lo.x = lo.x.min(v.x);
                    lo.y = lo.y.min(v.y);
                    hi.x = hi.x.max(v.x);
                    hi.y = hi.y.max(v.y);
                }
                (lo, hi)
            }
        }
    }
}

/// Spec-level alias for [`Region::contains`].
pub fn contains_point(r: &Region, p: Point) -> bool {
    r.contains(p)
}

/// Do two closed regions share at least one point? Disc-disc by center
/// distance, polygon-polygon by separating axes, disc-polygon by distance
/// from the center to the polygon. Touching (tangent) regions intersect.
pub fn intersects(a: &Region, b: &Region) -> bool {
    match (a, b) {
        (Region::Disc { center: c1, radius: r1 }, Region::Disc { center: c2, radius: r2 }) => {
            c1.dist(*c2) <= r1 + r2 + CONTAINMENT_EPS
        }
        (Region::Disc { center, radius }, Region::Polygon(poly))
        | (Region::Polygon(poly), Region::Disc { center, radius }) => {
            poly.distance(*center) <= radius + CONTAINMENT_EPS
        }
        (Region::Polygon(p1), Region::Polygon(p2)) => !separated_by_axis(p1, p2),
    }
}

/// Separating-axis test over both polygons' edge normals.
fn separated_by_axis(p1: &ConvexPolygon, p2: &ConvexPolygon) -> bool {
    let axes = p1
        .edges()
        .chain(p2.edges())
        .map(|(a, b)| (-(b.y - a.y), b.x - a.x));
    for (nx, ny) in axes {
        let norm = nx.hypot(ny);
        if norm == 0.0 {
            continue;
        }
        let project = |poly: &ConvexPolygon| {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for v in poly.vertices() {
                let t = (v.x * nx + v.y * ny) / norm;
                lo = lo.min(t);
                hi = hi.max(t);
            }
            (lo, hi)
        };
        let (lo1, hi1) = project(p1);
        let (lo2, hi2) = project(p2);
        if hi1 < lo2 - CONTAINMENT_EPS || hi2 < lo1 - CONTAINMENT_EPS {
            return true;
        }
    }
    false
}

fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0);
    p.dist(Point::new(a.x + t * dx, a.y + t * dy))
}

/// Boundary intersection points of two circles: two crossings, one tangency
/// point, or none (disjoint, strictly nested, or concentric).
fn circle_circle_points(c1: Point, r1: f64, c2: Point, r2: f64) -> Vec<Point> {
    let d = c1.dist(c2);
    if d <= f64::EPSILON {
        return Vec::new(); // concentric: boundaries coincide or never meet
    }
    if d + CONTAINMENT_EPS < (r1 - r2).abs() || d > r1 + r2 + CONTAINMENT_EPS {
        return Vec::new();
    }
    let a = (d * d + r1 * r1 - r2 * r2) / (2.0 * d);
    // Clamp: within the processed band a tiny negative h² means tangency.
    let h = (r1 * r1 - a * a).max(0.0).sqrt();
    let (ux, uy) = ((c2.x - c1.x) / d, (c2.y - c1.y) / d);
    let base = Point::new(c1.x + a * ux, c1.y + a * uy);
    if h <= CONTAINMENT_EPS {
        return vec![base];
    }
    vec![
        Point::new(base.x - h * uy, base.y + h * ux),
        Point::new(base.x + h * uy, base.y - h * ux),
    ]
}

/// Intersections of a circle with a closed segment, tangencies included.
fn circle_segment_points(c: Point, r: f64, a: Point, b: Point) -> Vec<Point> {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let (fx, fy) = (a.x - c.x, a.y - c.y);
    let qa = dx * dx + dy * dy;
    if qa == 0.0 {
        return Vec::new();
    }
    let qb = 2.0 * (fx * dx + fy * dy);
    let qc = fx * fx + fy * fy - r * r;
    let mut disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 {
        // disc ≈ -8·qa·r·δ for a line passing distance r+δ from the center;
        // treat sub-tolerance misses as tangencies so touching pairs emit
        // their contact point.
        let tol = 8.0 * qa * r.max(1.0) * CONTAINMENT_EPS;
        if disc < -tol {
            return Vec::new();
        }
        disc = 0.0;
    }
    let sq = disc.sqrt();
    let t_eps = CONTAINMENT_EPS / qa.sqrt();
    let mut out = Vec::new();
    let mut roots = [(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)];
    if sq == 0.0 {
        roots[1] = f64::NAN; // single tangency root
    }
    for t in roots {
        if t.is_nan() || t < -t_eps || t > 1.0 + t_eps {
            continue;
        }
        let tc = t.clamp(0.0, 1.0);
        out.push(Point::new(a.x + tc * dx, a.y + tc * dy));
    }
    out
}

enum SegSeg {
    Miss,
    At(Point),
    Overlap(Point, Point),
}

fn segment_segment(p1: Point, p2: Point, q1: Point, q2: Point) -> SegSeg {
    let (rx, ry) = (p2.x - p1.x, p2.y - p1.y);
    let (sx, sy) = (q2.x - q1.x, q2.y - q1.y);
    let rlen = rx.hypot(ry);
    let slen = sx.hypot(sy);
    if rlen == 0.0 || slen == 0.0 {
        return SegSeg::Miss;
    }
    let rxs = cross(rx, ry, sx, sy);
    let (qpx, qpy) = (q1.x - p1.x, q1.y - p1.y);
    if rxs.abs() <= 1e-12 * rlen * slen {
        // Parallel; collinear iff q1 lies on the line through p1,p2.
        if cross(qpx, qpy, rx, ry).abs() / rlen > CONTAINMENT_EPS {
            return SegSeg::Miss;
        }
        let inv = 1.0 / (rx * rx + ry * ry);
        let t0 = (qpx * rx + qpy * ry) * inv;
        let t1 = t0 + (sx * rx + sy * ry) * inv;
        let (lo, hi) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
        let t_eps = CONTAINMENT_EPS / rlen;
        let lo_c = lo.max(0.0);
        let hi_c = hi.min(1.0);
        if hi_c < lo_c - t_eps {
            return SegSeg::Miss;
        }
        let at = |t: f64| Point::new(p1.x + t * rx, p1.y + t * ry);
        if (hi_c - lo_c).abs() <= t_eps {
            return SegSeg::At(at(lo_c.clamp(0.0, 1.0)));
        }
        return SegSeg::Overlap(at(lo_c), at(hi_c));
    }
    let t = cross(qpx, qpy, sx, sy) / rxs;
    let u = cross(qpx, qpy, rx, ry) / rxs;
    let t_eps = CONTAINMENT_EPS / rlen;
    let u_eps = CONTAINMENT_EPS / slen;
    if t < -t_eps || t > 1.0 + t_eps || u < -u_eps || u > 1.0 + u_eps {
        return SegSeg::Miss;
    }
    let tc = t.clamp(0.0, 1.0);
    SegSeg::At(Point::new(p1.x + tc * rx, p1.y + tc * ry))
}

/// All boundary-boundary intersection points of an intersecting pair.
fn boundary_pair_points(a: &Region, b: &Region) -> Vec<Point> {
    match (a, b) {
        (Region::Disc { center: c1, radius: r1 }, Region::Disc { center: c2, radius: r2 }) => {
            circle_circle_points(*c1, *r1, *c2, *r2)
        }
        (Region::Disc { center, radius }, Region::Polygon(poly))
        | (Region::Polygon(poly), Region::Disc { center, radius }) => {
            let mut out = Vec::new();
            for (s, e) in poly.edges() {
                out.extend(circle_segment_points(*center, *radius, s, e));
            }
            out
        }
        (Region::Polygon(p1), Region::Polygon(p2)) => {
            let mut out = Vec::new();
            for (a1, a2) in p1.edges() {
                for (b1, b2) in p2.edges() {
                    match segment_segment(a1, a2, b1, b2) {
                        SegSeg::Miss => {}
                        SegSeg::At(p) => out.push(p),
                        SegSeg::Overlap(p, q) => {
                            out.push(p);
                            out.push(q);
                        }
                    }
                }
            }
            out
        }
    }
}

/// Ordered family of regions with ids `0..n-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionFamily {
    regions: Vec<Region>,
}

impl RegionFamily {
    pub fn new(regions: Vec<Region>) -> Result<Self, GeometryError> {
        if regions.is_empty() {
            return Err(GeometryError::EmptyFamily);
        }
        for r in &regions {
            r.validate()?;
        }
        Ok(RegionFamily { regions })
    }

    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        false // n ≥ 1 by construction
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn region(&self, id: usize) -> &Region {
        &self.regions[id]
    }

    /// Sub-family of the given region ids, in the given order.
    pub fn subfamily(&self, ids: &[usize]) -> Result<RegionFamily, GeometryError> {
        let mut regions = Vec::with_capacity(ids.len());
        for &id in ids {
            let r = self
                .regions
                .get(id)
                .ok_or(GeometryError::BadRegionId(id, self.len()))?;
            regions.push(r.clone());
        }
        RegionFamily::new(regions)
    }

    /// Ids of regions containing `p`.
    pub fn signature(&self, p: Point) -> Vec<usize> {
        self.regions
            .iter()
            .enumerate()
            .filter(|(_, r)| r.contains(p))
            .map(|(i, _)| i)
            .collect()
    }

    /// Signature as a bitmask. Callers guarantee `n ≤ 64`.
    pub(crate) fn signature_mask(&self, p: Point) -> u64 {
        debug_assert!(self.len() <= 64);
        let mut m = 0u64;
        for (i, r) in self.regions.iter().enumerate() {
            if r.contains(p) {
                m |= 1u64 << i;
            }
        }
        m
    }

    /// Pairs `(i, j)`, `i < j`, of intersecting regions.
    pub fn intersecting_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if intersects(&self.regions[i], &self.regions[j]) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Bounding box of the whole family.
    pub fn bounding_box(&self) -> (Point, Point) {
        let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for r in &self.regions {
            let (l, h) = r.bbox();
            lo.x = lo.x.min(l.x);
            lo.y = lo.y.min(l.y);
            hi.x = hi.x.max(h.x);
            hi.y = hi.y.max(h.y);
        }
        (lo, hi)
    }

    /// Finite witness set for all depth cells: one anchor per region plus
    /// all boundary crossings (and tangency points) of intersecting pairs.
    /// Exact duplicates are dropped, first occurrence kept.
    pub fn candidate_points(&self) -> Vec<Point> {
        let mut out: Vec<Point> = self.regions.iter().map(|r| r.anchor()).collect();
        let n = self.len();
        for i in 0..n {
            for j in (i + 1)..n {
                if intersects(&self.regions[i], &self.regions[j]) {
                    out.extend(boundary_pair_points(&self.regions[i], &self.regions[j]));
                }
            }
        }
        let mut seen = std::collections::HashSet::new();
        out.retain(|p| seen.insert((p.x.to_bits(), p.y.to_bits())));
        out
    }

    /// Distinct inclusion-maximal candidate signatures with one
    /// representative point each, in first-occurrence order. Only maximal
    /// signatures matter for covering and packing: a point whose signature
    /// is contained in another's is dominated by it. Callers guarantee
    /// `n ≤ 64`.
    pub(crate) fn maximal_signature_atlas(&self) -> SignatureAtlas {
        debug_assert!(self.len() <= 64);
        let mut masks: Vec<u64> = Vec::new();
        let mut points: Vec<Point> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for p in self.candidate_points() {
            let m = self.signature_mask(p);
            if m != 0 && seen.insert(m) {
                masks.push(m);
                points.push(p);
            }
        }
        let keep: Vec<bool> = masks
            .iter()
            .map(|&m| !masks.iter().any(|&o| o != m && o & m == m))
            .collect();
        let mut kept_masks = Vec::new();
        let mut kept_points = Vec::new();
        for (i, &k) in keep.iter().enumerate() {
            if k {
                kept_masks.push(masks[i]);
                kept_points.push(points[i]);
            }
        }
        SignatureAtlas {
            points: kept_points,
            masks: kept_masks,
        }
    }
}

/// Representative candidate points, one per distinct maximal signature.
pub(crate) struct SignatureAtlas {
    pub points: Vec<Point>,
    pub masks: Vec<u64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc(cx: f64, cy: f64, r: f64) -> Region {
        Region::disc(Point::new(cx, cy), r).unwrap()
    }

    fn square(x: f64, y: f64, side: f64) -> Region {
        Region::convex_polygon(vec![
            Point::new(x, y),
            Point::new(x + side, y),
            Point::new(x + side, y + side),
            Point::new(x, y + side),
        ])
        .unwrap()
    }

    #[test]
    fn disc_containment_center_boundary_outside() {
        let d = disc(0.0, 0.0, 1.0);
        assert!(d.contains(Point::new(0.0, 0.0)));
        assert!(d.contains(Point::new(1.0, 0.0))); // closed region
        assert!(!d.contains(Point::new(2.0, 0.0)));
    }

    #[test]
    fn disc_disc_intersection_cases() {
        let a = disc(0.0, 0.0, 1.0);
        assert!(intersects(&a, &disc(1.5, 0.0, 1.0)));
        assert!(intersects(&a, &disc(2.0, 0.0, 1.0))); // tangent, closed regions touch
        assert!(!intersects(&a, &disc(3.0, 0.0, 1.0)));
    }

    #[test]
    fn polygon_validation_rejects_bad_input() {
        let p = |pts: &[(f64, f64)]| {
            Region::convex_polygon(pts.iter().map(|&(x, y)| Point::new(x, y)).collect())
        };
        assert!(matches!(
            p(&[(0.0, 0.0), (1.0, 0.0)]),
            Err(GeometryError::TooFewVertices(2))
        ));
        // clockwise
        assert!(matches!(
            p(&[(0.0, 0.0), (0.0, 1.0), (1.0, 0.0)]),
            Err(GeometryError::NotStrictlyConvex)
        ));
        // repeated vertex
        assert!(matches!(
            p(&[(0.0, 0.0), (1.0, 0.0), (1.0, 0.0), (0.0, 1.0)]),
            Err(GeometryError::NotStrictlyConvex)
        ));
        // collinear triple
        assert!(matches!(
            p(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (0.0, 1.0)]),
            Err(GeometryError::NotStrictlyConvex)
        ));
        assert!(p(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]).is_ok());
        assert!(matches!(
            Region::disc(Point::new(0.0, 0.0), 0.0),
            Err(GeometryError::NonPositiveRadius(_))
        ));
    }

    #[test]
    fn polygon_containment_and_boundary() {
        let s = square(0.0, 0.0, 1.0);
        assert!(s.contains(Point::new(0.5, 0.5)));
        assert!(s.contains(Point::new(0.0, 0.0))); // vertex
        assert!(s.contains(Point::new(1.0, 0.5))); // edge
        assert!(!s.contains(Point::new(1.1, 0.5)));
        assert!(!s.contains(Point::new(1.0 + 1e-6, 1.0 + 1e-6)));
    }

    #[test]
    fn polygon_polygon_intersection() {
        let a = square(0.0, 0.0, 1.0);
        assert!(intersects(&a, &square(0.5, 0.5, 1.0)));
        assert!(intersects(&a, &square(1.0, 0.0, 1.0))); // shared edge
        assert!(intersects(&a, &square(1.0, 1.0, 1.0))); // shared corner
        assert!(!intersects(&a, &square(2.5, 0.0, 1.0)));
    }

    #[test]
    fn disc_polygon_intersection_and_tangency() {
        let s = square(0.0, 0.0, 1.0);
        assert!(intersects(&s, &disc(0.5, 0.5, 0.2))); // disc inside
        assert!(intersects(&s, &disc(2.0, 0.5, 1.0))); // tangent to right edge
        assert!(!intersects(&s, &disc(3.0, 0.5, 1.0)));
    }

    #[test]
    fn candidates_single_disc_is_center() {
        let f = RegionFamily::new(vec![disc(0.0, 0.0, 1.0)]).unwrap();
        assert_eq!(f.candidate_points(), vec![Point::new(0.0, 0.0)]);
    }

    #[test]
    fn candidates_symmetric_disc_pair() {
        let f = RegionFamily::new(vec![disc(0.0, 0.0, 1.0), disc(1.0, 0.0, 1.0)]).unwrap();
        let pts = f.candidate_points();
        assert_eq!(pts.len(), 4);
        assert_eq!(pts[0], Point::new(0.0, 0.0));
        assert_eq!(pts[1], Point::new(1.0, 0.0));
        let root = 0.75f64.sqrt(); // √3/2 ≈ 0.8660254
        let mut ys: Vec<f64> = pts[2..].iter().map(|p| p.y).collect();
        ys.sort_by(f64::total_cmp);
        assert!((ys[0] + root).abs() < 1e-9 && (ys[1] - root).abs() < 1e-9);
        assert!((pts[2].x - 0.5).abs() < 1e-9 && (pts[3].x - 0.5).abs() < 1e-9);
        // crossing points are contained in both closed discs
        for p in &pts[2..] {
            assert_eq!(f.signature(*p), vec![0, 1]);
        }
    }

    #[test]
    fn candidates_emit_tangency_point() {
        let f = RegionFamily::new(vec![disc(0.0, 0.0, 1.0), disc(2.0, 0.0, 1.0)]).unwrap();
        let pts = f.candidate_points();
        assert_eq!(pts.len(), 3);
        assert_eq!(pts[2], Point::new(1.0, 0.0));
        assert_eq!(f.signature(pts[2]), vec![0, 1]);
    }

    #[test]
    fn candidates_internal_tangency() {
        let f = RegionFamily::new(vec![disc(0.0, 0.0, 2.0), disc(0.5, 0.0, 1.5)]).unwrap();
        let pts = f.candidate_points();
        assert!(pts.iter().any(|p| p.dist(Point::new(2.0, 0.0)) < 1e-9));
    }

    #[test]
    fn candidates_three_generic_discs() {
        let f = RegionFamily::new(vec![
            disc(0.0, 0.0, 1.2),
            disc(1.5, 0.2, 1.1),
            disc(0.7, 1.3, 1.0),
        ])
        .unwrap();
        assert_eq!(f.intersecting_pairs().len(), 3);
        assert_eq!(f.candidate_points().len(), 9); // 3 centers + 6 circle-circle roots
        let grid = crate::oracle::signature_grid_check(&f, 200).unwrap();
        assert!(grid.passed, "violator {:?}", grid.worst_point);
    }

    #[test]
    fn candidates_shared_square_edge() {
        let f = RegionFamily::new(vec![square(0.0, 0.0, 1.0), square(1.0, 0.0, 1.0)]).unwrap();
        let pts = f.candidate_points();
        // overlap endpoints of the shared edge must appear
        for target in [Point::new(1.0, 0.0), Point::new(1.0, 1.0)] {
            assert!(
                pts.iter().any(|p| p.dist(target) < 1e-9),
                "missing shared-edge endpoint {target:?}"
            );
        }
    }

    #[test]
    fn intersection_symmetry_random_mix() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(11);
        let random_region = |rng: &mut rand_chacha::ChaCha20Rng| -> Region {
            if rng.gen_bool(0.5) {
                disc(rng.gen_range(0.0..6.0), rng.gen_range(0.0..6.0), rng.gen_range(0.3..1.5))
            } else {
                square(rng.gen_range(0.0..6.0), rng.gen_range(0.0..6.0), 1.0)
            }
        };
        for _ in 0..300 {
            let a = random_region(&mut rng);
            let b = random_region(&mut rng);
            assert_eq!(intersects(&a, &b), intersects(&b, &a));
        }
    }

    #[test]
    fn intersection_consistent_with_candidates() {
        // intersects(a,b) iff some candidate of the two-region family lies in both
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(23);
        for trial in 0..200 {
            let a = disc(rng.gen_range(0.0..5.0), rng.gen_range(0.0..5.0), rng.gen_range(0.3..1.5));
            let b = if trial % 2 == 0 {
                disc(rng.gen_range(0.0..5.0), rng.gen_range(0.0..5.0), rng.gen_range(0.3..1.5))
            } else {
                square(rng.gen_range(0.0..5.0), rng.gen_range(0.0..5.0), 1.0)
            };
            let f = RegionFamily::new(vec![a.clone(), b.clone()]).unwrap();
            let witnessed = f
                .candidate_points()
                .iter()
                .any(|&p| f.signature(p).len() == 2);
            assert_eq!(intersects(&a, &b), witnessed, "trial {trial}");
        }
    }

    #[test]
    fn candidate_points_lie_in_their_generators() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(37);
        for _ in 0..50 {
            let regions: Vec<Region> = (0..8)
                .map(|_| {
                    disc(rng.gen_range(0.0..8.0), rng.gen_range(0.0..8.0), rng.gen_range(0.4..2.0))
                })
                .collect();
            let f = RegionFamily::new(regions).unwrap();
            // every candidate has a non-empty signature (anchors by construction,
            // crossings because regions are closed)
            for p in f.candidate_points() {
                assert!(!f.signature(p).is_empty());
            }
        }
    }

    #[test]
    fn subfamily_preserves_selection() {
        let f = RegionFamily::new(vec![
            disc(0.0, 0.0, 1.0),
            disc(5.0, 0.0, 1.0),
            disc(10.0, 0.0, 1.0),
        ])
        .unwrap();
        let sub = f.subfamily(&[2, 0]).unwrap();
        assert_eq!(sub.len(), 2);
        assert_eq!(sub.region(0), f.region(2));
        assert!(f.subfamily(&[3]).is_err());
        assert!(f.subfamily(&[]).is_err());
    }
}
