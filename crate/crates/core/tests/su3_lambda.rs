use monopole_core::numerics::{c64, matrix_exp, max_abs, ComplexMatrix};
use monopole_core::su3_lambda::{
    cartan_charge, cartan_charge_quarter, charge_matrix_basic, dark_bright_states, lambda_hamiltonian,
    spin_hypercharge_decomposition, su3_gauge_transform, ChargeMatrix, LambdaParams, LambdaState,
};
use num_rational::Rational64;
use proptest::prelude::*;
use std::f64::consts::{PI, TAU};

#[test]
fn basic_charge_is_half_the_lowest_cartan_charge() {
    assert_eq!(charge_matrix_basic(), cartan_charge(-2, -1).scaled(Rational64::new(1, 2)));
    assert_eq!(charge_matrix_basic(), cartan_charge_quarter(-2, -1));
    assert!(!charge_matrix_basic().su_n_quantized());
    assert!(cartan_charge(-2, -1).su_n_quantized());
}

proptest! {
    #[test]
    fn cartan_charges_are_quantized(n1 in -5i64..=5, n2 in -5i64..=5) {
        let q = cartan_charge(n1, n2);
        prop_assert!(q.su_n_quantized());
        prop_assert!(q.su_n_mod_center_quantized());
        prop_assert_eq!(q.trace(), Rational64::from_integer(0));
        prop_assert!(max_abs(&(q.exp_i4pi() - ComplexMatrix::identity(3, 3))) < 1e-12);
        let direct = matrix_exp(&(q.to_matrix() * c64(0.0, 4.0 * PI)));
        prop_assert!(max_abs(&(direct - q.exp_i4pi())) < 1e-10);
    }

    #[test]
    fn decomposition_reassembles(a in -20i64..20, b in -20i64..20, d in 1i64..9) {
        let q = ChargeMatrix::new(vec![
            Rational64::new(a, d),
            Rational64::new(b, d),
            Rational64::new(-a - b, d),
        ]).unwrap();
        let dec = spin_hypercharge_decomposition(&q).unwrap();
        prop_assert_eq!(dec.reassemble(), q);
    }

    #[test]
    fn gauge_transform_is_unitary(theta in 0.0..PI, phi in 0.0..TAU) {
        let u = su3_gauge_transform(theta, phi);
        prop_assert!(max_abs(&(u.adjoint() * &u - ComplexMatrix::identity(3, 3))) < 1e-13);
        prop_assert!((u.determinant() - c64(1.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn dark_and_bright_states_diagonalize_the_coupling(
        r in 0.2..3.0f64, theta in 0.05..(PI - 0.05), pp in 0.0..TAU, pc in 0.0..TAU,
    ) {
        let p = LambdaParams::from_chart(r, theta, pp, pc);
        let h = lambda_hamiltonian(&p);
        let s = dark_bright_states(&p).unwrap();
        for a in LambdaState::ALL {
            let v = s.get(a);
            prop_assert!((&h * v - v * c64(a.energy(p.rabi()), 0.0)).norm() < 1e-12 * r.max(1.0));
            for b in LambdaState::ALL {
                let expect = if a == b { 1.0 } else { 0.0 };
                prop_assert!((v.dotc(s.get(b)) - c64(expect, 0.0)).norm() < 1e-12);
            }
        }
    }
}
