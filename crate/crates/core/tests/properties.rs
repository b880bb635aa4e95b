//! Property-based invariants for the lattice substrate and the transform
//! pair: zero-extension consistency, the norm interpolation inequalities,
//! Young's inequality, and transform round trips on random data.

use lattice_harmonics::lattice::{
    convolve, holder_seminorm, laplacian, lp_norm, weak_l1_norm, RealSeq, Weight, Window,
};
use lattice_harmonics::spectral::{dft, idft_to_window, TorusGrid};
use proptest::prelude::*;

fn seq_strategy(dim: usize, radius: i64) -> impl Strategy<Value = RealSeq> {
    let len = Window::new(dim, radius).unwrap().len();
    proptest::collection::vec(-1.0f64..1.0, len).prop_map(move |values| {
        RealSeq::from_values(Window::new(dim, radius).unwrap(), values).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn zero_extension_consistency(f in seq_strategy(2, 2)) {
        let padded = f.with_radius(f.radius() + 2).unwrap();
        // norms unchanged
        for p in [1.0, 2.0, f64::INFINITY] {
            prop_assert!((lp_norm(&f, p, None).unwrap() - lp_norm(&padded, p, None).unwrap()).abs() < 1e-13);
        }
        // operators agree on the original interior
        let a = laplacian(&f);
        let b = laplacian(&padded);
        Window::new(2, f.radius() - 1).unwrap().for_each_point(|_, pt| {
            assert!((a.get(pt) - b.get(pt)).abs() < 1e-13);
        });
        let ca = convolve(&f, &f).unwrap();
        let cb = convolve(&padded, &padded).unwrap();
        Window::new(2, 2 * f.radius()).unwrap().for_each_point(|_, pt| {
            assert!((ca.get(pt) - cb.get(pt)).abs() < 1e-12);
        });
    }

    #[test]
    fn norm_sandwich(f in seq_strategy(1, 4)) {
        let l1 = lp_norm(&f, 1.0, None).unwrap();
        let linf = lp_norm(&f, f64::INFINITY, None).unwrap();
        for p in [1.5, 2.0, 3.0, 7.0] {
            let lp = lp_norm(&f, p, None).unwrap();
            prop_assert!(linf <= lp * (1.0 + 1e-12) && lp <= l1 * (1.0 + 1e-12));
        }
    }

    #[test]
    fn young_inequality(f in seq_strategy(1, 3), g in seq_strategy(1, 2)) {
        let conv = convolve(&f, &g).unwrap();
        let f1 = lp_norm(&f, 1.0, None).unwrap();
        for p in [1.0, 2.0, f64::INFINITY] {
            let lhs = lp_norm(&conv, p, None).unwrap();
            let rhs = f1 * lp_norm(&g, p, None).unwrap();
            prop_assert!(lhs <= rhs * (1.0 + 1e-12), "p={p}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn convolution_commutes(f in seq_strategy(1, 3), g in seq_strategy(1, 2)) {
        let fg = convolve(&f, &g).unwrap();
        let gf = convolve(&g, &f).unwrap();
        prop_assert!(fg.sup_distance(&gf) < 1e-13);
    }

    #[test]
    fn weak_l1_below_l1(f in seq_strategy(2, 2)) {
        let w = Weight::radial_power(f.window(), 0.3);
        let weak = weak_l1_norm(&f, &w).unwrap();
        let strong = lp_norm(&f, 1.0, Some(&w)).unwrap();
        prop_assert!(weak <= strong * (1.0 + 1e-12));
    }

    #[test]
    fn transform_roundtrip_and_parseval(f in seq_strategy(1, 4)) {
        let grid = TorusGrid::for_window(f.window(), 2).unwrap();
        let hat = dft(&f, &grid).unwrap();
        let back = idft_to_window(&hat, &grid, f.window()).unwrap();
        f.window().for_each_point(|idx, p| {
            let v = back.get(p);
            assert!((v.re - f.values()[idx]).abs() < 1e-12 && v.im.abs() < 1e-12);
        });
        let energy = (hat.iter().map(|v| v.norm_sqr()).sum::<f64>() / grid.len() as f64).sqrt();
        let direct = lp_norm(&f, 2.0, None).unwrap();
        prop_assert!((energy - direct).abs() < 1e-12);
    }

    #[test]
    fn holder_scale_equivariance(f in seq_strategy(1, 3), c in -3.0f64..3.0) {
        let base = holder_seminorm(&f, 0.7, 0).unwrap();
        let scaled = holder_seminorm(&f.scale(c), 0.7, 0).unwrap();
        prop_assert!((scaled - c.abs() * base).abs() < 1e-12 * (1.0 + base));
    }
}

proptest! {
    // the interpolation inequality is cheap: run a large grid
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn littlewood_interpolation(f in seq_strategy(1, 4)) {
        let l1 = lp_norm(&f, 1.0, None).unwrap();
        let linf = lp_norm(&f, f64::INFINITY, None).unwrap();
        for r in [1.5, 2.0, 3.0, f64::INFINITY] {
            let lr = lp_norm(&f, r, None).unwrap();
            let bound = if r.is_infinite() { linf } else { l1.powf(1.0 / r) * linf.powf(1.0 - 1.0 / r) };
            prop_assert!(lr <= bound * (1.0 + 1e-12), "r={r}: {lr} vs {bound}");
        }
    }
}
