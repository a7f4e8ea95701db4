use admiss_core::geometry::{
    balayage_norm, heaviest_square, measure_on_square, pseudo_hyperbolic, strip_masses, CarlesonSquare,
    SquareFamily, SquarePart,
};
use admiss_core::AtomicMeasure;
use num_complex::Complex64;
use proptest::prelude::*;

fn point() -> impl Strategy<Value = Complex64> {
    (1e-3f64..1e3, -1e3f64..1e3).prop_map(|(x, y)| Complex64::new(x, y))
}

fn measure(max: usize) -> impl Strategy<Value = AtomicMeasure> {
    prop::collection::vec((point(), 1e-3f64..10.0), 1..max)
        .prop_map(|v| AtomicMeasure::from_pairs(v).unwrap())
}

proptest! {
    #[test]
    fn strips_partition_the_mass(m in measure(40)) {
        let total: f64 = strip_masses(&m, -12, 12).iter().map(|s| s.1).sum();
        prop_assert!((total - m.total_mass()).abs() <= 1e-12 * m.total_mass());
    }

    #[test]
    fn balayage_conserves_mass(m in measure(20)) {
        let n = balayage_norm(&m, 0.0, 1.0).unwrap();
        prop_assert!((n.value - m.total_mass()).abs() < 1e-8 * m.total_mass());
    }

    #[test]
    fn pseudo_hyperbolic_is_symmetric_and_below_one(z in point(), w in point()) {
        let a = pseudo_hyperbolic(z, w).unwrap();
        prop_assert_eq!(a, pseudo_hyperbolic(w, z).unwrap());
        prop_assert!(a < 1.0);
    }

    #[test]
    fn full_square_dominates_right_half(m in measure(40), c in -1e3f64..1e3, len in 1e-3f64..1e4) {
        let sq = CarlesonSquare { center_y: c, length: len };
        prop_assert!(measure_on_square(&m, sq, SquarePart::Full) >= measure_on_square(&m, sq, SquarePart::RightHalf));
    }

    #[test]
    fn heaviest_staggered_square_is_a_maximum(m in measure(30), n in -8i32..12, c in -1e3f64..1e3) {
        let len = 2f64.powi(n);
        let best = heaviest_square(&m, len, SquareFamily::Staggered, SquarePart::Full);
        let k = (c / (0.5 * len)).floor();
        let sq = CarlesonSquare { center_y: k * 0.5 * len + 0.5 * len, length: len };
        prop_assert!(measure_on_square(&m, sq, SquarePart::Full) <= best.mass * (1.0 + 1e-12));
    }
}
