use admiss_core::controllability::{controllability_measure, interpolation_sum, InterpolationProblem};
use admiss_core::geometry::blaschke_products;
use admiss_core::{DiagonalSystem, ScaleGrid};
use num_complex::Complex64;
use proptest::prelude::*;

/// Real points with ratio at least 4 between neighbours.
fn separated(len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    (1e-3f64..1.0, prop::collection::vec(4.0f64..16.0, len)).prop_map(|(start, ratios)| {
        let mut x = start;
        ratios
            .iter()
            .map(|r| {
                x *= r;
                Complex64::new(x, 0.0)
            })
            .collect()
    })
}

fn weights(len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((0.1f64..10.0, 0.0f64..6.3), len)
        .prop_map(|v| v.into_iter().map(|(r, a)| Complex64::from_polar(r, a)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn masses_ignore_rotations(pts in separated(12), b in weights(12), turn in 0.0f64..6.3) {
        let sys = DiagonalSystem::new(pts.iter().map(|z| -z).collect(), b, 2.0).unwrap();
        let a = controllability_measure(&sys).unwrap().measure;
        let r = controllability_measure(&sys.scaled(Complex64::from_polar(1.0, turn))).unwrap().measure;
        for (x, y) in a.atoms().iter().zip(r.atoms()) {
            prop_assert!((x.mass - y.mass).abs() <= 1e-12 * x.mass);
        }
    }

    #[test]
    fn interpolation_constant_is_homogeneous(pts in separated(10), g in weights(10), c in 0.1f64..10.0, beta in 0.0f64..2.0) {
        let grid = ScaleGrid::default();
        let a = interpolation_sum(&InterpolationProblem::new(pts.clone(), g.clone(), beta).unwrap(), grid).unwrap();
        let gc: Vec<Complex64> = g.iter().map(|x| x * c).collect();
        let b = interpolation_sum(&InterpolationProblem::new(pts, gc, beta).unwrap(), grid).unwrap();
        prop_assert!((b.constant - a.constant / (c * c)).abs() <= 1e-12 * b.constant);
    }

    #[test]
    fn separated_products_settle_under_window_doubling(pts in separated(24)) {
        let wide = blaschke_products(&pts, 12).unwrap().products;
        let narrow: Vec<f64> = blaschke_products(&pts[..12], 6).unwrap().products;
        for k in 0..6 {
            prop_assert!((wide[k] - narrow[k]).abs() < 0.01 * wide[k]);
        }
    }
}
