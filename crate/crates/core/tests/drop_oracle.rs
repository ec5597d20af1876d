//! Properties of the elliptical-drop reference solution.

use bipi::wcsph::{drop_oracle, drop_oracle_by_quadrature};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn area_is_conserved(a0 in 0.1f64..3.0, r0 in 0.2f64..2.0, t in 0.0f64..3.0) {
        let d = drop_oracle(a0, r0, t);
        prop_assert!((d.a * d.b - r0 * r0).abs() <= 1e-12 * r0 * r0);
    }

    #[test]
    fn integrators_agree(a0 in 0.1f64..3.0, t in 0.0f64..3.0) {
        let ode = drop_oracle(a0, 1.0, t);
        let quad = drop_oracle_by_quadrature(a0, 1.0, t);
        prop_assert!((ode.a - quad.a).abs() <= 1e-8 * ode.a);
        prop_assert!((ode.big_a - quad.big_a).abs() <= 1e-8 * a0);
    }

    #[test]
    fn strain_rate_decays_and_axis_grows(a0 in 0.1f64..3.0, t1 in 0.0f64..1.5, dt in 0.01f64..1.5) {
        let early = drop_oracle(a0, 1.0, t1);
        let late = drop_oracle(a0, 1.0, t1 + dt);
        prop_assert!(late.a > early.a);
        prop_assert!(late.big_a <= early.big_a);
    }
}

#[test]
fn scale_invariance() {
    // a/R0 depends on A0 t only.
    let base = drop_oracle(1.0, 1.0, 2.0);
    let scaled = drop_oracle(4.0, 3.0, 0.5);
    assert!((scaled.a / 3.0 - base.a).abs() < 1e-9);
}
