//! The full pipeline over heterogeneous families mixing discs, axis-aligned
//! squares, and general convex polygons: every boundary-crossing code path
//! (circle-circle, circle-segment, segment-segment, collinear overlaps,
//! tangencies) feeds the same dominance, LP, and sandwich guarantees.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use piercing_lab::geometry::{Point, Region, RegionFamily};
use piercing_lab::oracle::{
    max_packing_exact, min_transversal_exact, signature_grid_check, OracleBudget,
};
use piercing_lab::transversal::{fractional_transversal, greedy_pierce, pierce_p2};

fn regular_polygon(cx: f64, cy: f64, r: f64, k: usize, rot: f64) -> Region {
    let tau = 2.0 * std::f64::consts::PI;
    Region::convex_polygon(
        (0..k)
            .map(|i| {
                let a = rot + tau * i as f64 / k as f64;
                Point::new(cx + r * a.cos(), cy + r * a.sin())
            })
            .collect(),
    )
    .unwrap()
}

fn random_mixed_family(rng: &mut ChaCha20Rng, n: usize, span: f64) -> RegionFamily {
    let regions = (0..n)
        .map(|_| {
            let cx = rng.gen_range(0.0..span);
            let cy = rng.gen_range(0.0..span);
            let r = rng.gen_range(0.4..1.5);
            match rng.gen_range(0..3) {
                0 => Region::disc(Point::new(cx, cy), r).unwrap(),
                1 => Region::convex_polygon(vec![
                    Point::new(cx, cy),
                    Point::new(cx + r, cy),
                    Point::new(cx + r, cy + r),
                    Point::new(cx, cy + r),
                ])
                .unwrap(),
                _ => regular_polygon(cx, cy, r, rng.gen_range(3..=7), rng.gen_range(0.0..1.0)),
            }
        })
        .collect();
    RegionFamily::new(regions).unwrap()
}

#[test]
fn dominance_holds_on_mixed_families() {
    let mut rng = ChaCha20Rng::seed_from_u64(31_415);
    for trial in 0..30 {
        let f = random_mixed_family(&mut rng, 12, 6.0);
        let rep = signature_grid_check(&f, 150).unwrap();
        assert!(rep.passed, "trial {trial}: violator {:?}", rep.worst_point);
    }
}

#[test]
fn sandwich_holds_on_mixed_families() {
    let mut rng = ChaCha20Rng::seed_from_u64(27_182);
    let budget = OracleBudget::default();
    for trial in 0..25 {
        let f = random_mixed_family(&mut rng, 13, 6.5);
        let nu = max_packing_exact(&f, &budget).unwrap().len();
        let lp = fractional_transversal(&f).unwrap();
        let opt = min_transversal_exact(&f, &budget).unwrap().len();
        let pipe = pierce_p2(&f, nu + 1, 100 + trial).unwrap();
        let greedy = greedy_pierce(&f, nu + 1).unwrap();
        assert!(nu as f64 <= lp.primal_value + 1e-6, "trial {trial}");
        assert!(lp.primal_value - 1e-6 <= opt as f64, "trial {trial}");
        assert!(opt <= pipe.tau_points.len(), "trial {trial}");
        assert!(opt <= greedy.tau_points.len(), "trial {trial}");
        pipe.verify_stabs(&f).unwrap();
        greedy.verify_stabs(&f).unwrap();
    }
}

#[test]
fn disc_polygon_tangency_point_is_a_candidate() {
    // unit square with a disc tangent to its right edge at (1, 0.5)
    let f = RegionFamily::new(vec![
        Region::convex_polygon(vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ])
        .unwrap(),
        Region::disc(Point::new(2.0, 0.5), 1.0).unwrap(),
    ])
    .unwrap();
    let pts = f.candidate_points();
    let tangency = Point::new(1.0, 0.5);
    assert!(
        pts.iter().any(|p| p.dist(tangency) < 1e-9),
        "tangency point missing from {pts:?}"
    );
    assert_eq!(f.signature(tangency), vec![0, 1]);
}

#[test]
fn containment_without_crossings_is_covered_by_anchors() {
    // disc strictly inside a polygon and polygon strictly inside a disc:
    // no boundary crossings exist, anchors must dominate the signatures
    let poly = regular_polygon(0.0, 0.0, 3.0, 6, 0.3);
    let small_disc = Region::disc(Point::new(0.2, -0.1), 0.5).unwrap();
    let f = RegionFamily::new(vec![poly, small_disc]).unwrap();
    assert!(signature_grid_check(&f, 100).unwrap().passed);

    let big_disc = Region::disc(Point::new(0.0, 0.0), 4.0).unwrap();
    let inner_poly = regular_polygon(0.5, 0.2, 1.0, 5, 0.0);
    let f = RegionFamily::new(vec![big_disc, inner_poly]).unwrap();
    assert!(signature_grid_check(&f, 100).unwrap().passed);
    let lp = fractional_transversal(&f).unwrap();
    assert!((lp.primal_value - 1.0).abs() < 1e-9); // nested pair: one point
}
