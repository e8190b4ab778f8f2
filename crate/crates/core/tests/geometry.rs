use nalgebra::Matrix2;
use num_complex::Complex64;
use proptest::prelude::*;

use carrier_forge::hyperbolic::{cosine_sum, dist, vertex_angle, HPoint};
use carrier_forge::isometry::Isometry;

fn point() -> impl Strategy<Value = HPoint> {
    prop::array::uniform3(-2.0f64..2.0).prop_map(HPoint::from_spatial)
}

fn isometry() -> impl Strategy<Value = Isometry> {
    prop::array::uniform4((-1.5f64..1.5, -1.5f64..1.5)).prop_filter_map("singular", |e| {
        let c = |(re, im): (f64, f64)| Complex64::new(re, im);
        let m = Matrix2::new(c(e[0]), c(e[1]), c(e[2]), c(e[3]));
        if m.determinant().norm() < 0.1 {
            return None;
        }
        Isometry::from_unnormalized(m).ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn distances_and_angles_are_isometry_invariant(p in point(), a in point(), b in point(), h in isometry()) {
        prop_assume!(dist(&p, &a) > 1e-3 && dist(&p, &b) > 1e-3);
        let (hp, ha, hb) = (h.apply(&p), h.apply(&a), h.apply(&b));
        prop_assert!((dist(&hp, &ha) - dist(&p, &a)).abs() < 1e-8 * (1.0 + dist(&p, &a)));
        let before = vertex_angle(&p, &a, &b).unwrap();
        let after = vertex_angle(&hp, &ha, &hb).unwrap();
        prop_assert!((before - after).abs() < 1e-8);
    }

    #[test]
    fn cosine_sums_are_isometry_invariant(p in point(), qs in prop::collection::vec(point(), 2..8), h in isometry()) {
        prop_assume!(qs.iter().all(|q| dist(&p, q) > 1e-3));
        let moved: Vec<HPoint> = qs.iter().map(|q| h.apply(q)).collect();
        let before = cosine_sum(&p, &qs).unwrap();
        let after = cosine_sum(&h.apply(&p), &moved).unwrap();
        prop_assert!((before - after).abs() < 1e-8);
        prop_assert!(before >= -(qs.len() as f64) / 2.0);
    }

    #[test]
    fn law_of_cosines_closes(p in point(), a in point(), b in point()) {
        let (x, y) = (dist(&p, &a), dist(&p, &b));
        prop_assume!(x > 1e-3 && y > 1e-3);
        let gamma = vertex_angle(&p, &a, &b).unwrap();
        let z = dist(&a, &b);
        let rhs = x.cosh() * y.cosh() - gamma.cos() * x.sinh() * y.sinh();
        prop_assert!((z.cosh() - rhs).abs() < 1e-9 * z.cosh());
    }
}
