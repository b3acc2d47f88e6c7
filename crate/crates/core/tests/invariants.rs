use compass_core::fock_oracle::{oracle_general_moment, oracle_wigner, TruncationBudget};
use compass_core::sensitivity::{sensitivity, Displacement};
use compass_core::squeezing::{quadrature_variances, QuadratureAngle};
use compass_core::statistics::{g2_zero, mandel_q, normally_ordered_moment};
use compass_core::wigner::{wigner_closed_form, wigner_grid};
use compass_core::{GcsParams, PhaseSpaceGrid, PhaseTriple, ScalarField};
use num_complex::Complex64;
use proptest::prelude::*;

fn params() -> impl Strategy<Value = GcsParams> {
    (
        0.1f64..2.5,
        0.0f64..std::f64::consts::TAU,
        0.1f64..2.5,
        0.0f64..std::f64::consts::TAU,
        (
            0.0f64..std::f64::consts::TAU,
            0.0f64..std::f64::consts::TAU,
            0.0f64..std::f64::consts::TAU,
        ),
    )
        .prop_filter_map("null state", |(ra, pa, rb, pb, (t, p, c))| {
            GcsParams::from_complex(
                Complex64::from_polar(ra, pa),
                Complex64::from_polar(rb, pb),
                PhaseTriple::new(t, p, c).ok()?,
            )
            .ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sensitivity_is_even_and_bounded(p in params(), dx in -1.0f64..1.0, dp in -1.0f64..1.0) {
        let plus = sensitivity(&p, Displacement::new(dx, dp).unwrap());
        let minus = sensitivity(&p, Displacement::new(-dx, -dp).unwrap());
        prop_assert!((plus - minus).abs() < 1e-12);
        prop_assert!((-1e-14..=1.0 + 1e-12).contains(&plus));
    }

    #[test]
    fn uncertainty_product(p in params(), theta in 0.0f64..std::f64::consts::PI) {
        let r = quadrature_variances(&p, QuadratureAngle::new(theta).unwrap());
        prop_assert!(r.var_x * r.var_y >= 1.0 / 16.0 - 1e-10);
    }

    #[test]
    fn g2_follows_from_q(p in params()) {
        let n = normally_ordered_moment(&p, 1);
        let g2 = g2_zero(&p).unwrap();
        let q = mandel_q(&p).unwrap();
        prop_assert!((g2 - (1.0 + q / n)).abs() < 1e-9 * g2.abs().max(1.0));
    }

    #[test]
    fn closed_forms_match_oracle(p in params(), x in -2.0f64..2.0, y in -2.0f64..2.0) {
        let v = TruncationBudget::default().expand(&p).unwrap();
        let z = Complex64::new(x, y);
        prop_assert!((wigner_closed_form(&p, z) - oracle_wigner(&v, z).unwrap()).abs() < 1e-9);
        let m2 = normally_ordered_moment(&p, 2);
        let o2 = oracle_general_moment(&v, 2, 2).unwrap().re;
        prop_assert!((m2 - o2).abs() <= 1e-9 * o2.abs().max(1e-3));
    }
}

#[test]
fn parallel_and_sequential_fields_agree_bitwise() {
    let p = GcsParams::from_complex(
        Complex64::new(1.3, 0.4),
        Complex64::new(-0.2, 1.9),
        PhaseTriple::new(0.5, 1.5, 2.5).unwrap(),
    )
    .unwrap();
    let grid = PhaseSpaceGrid::square(4.0, 61).unwrap();
    let par = wigner_grid(&p, &grid);
    let seq =
        ScalarField::from_fn_sequential(&grid, |x, y| wigner_closed_form(&p, Complex64::new(x, y)));
    assert_eq!(par.values(), seq.values());
}
