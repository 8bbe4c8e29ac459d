use monopole_core::classical_dynamics::{
    analytic_orbit, cone_azimuth, conserved_quantities, default_dt, integrate_orbit, ChargedParticleState,
};
use nalgebra::Vector3;
use proptest::prelude::*;

fn paper_orbit() -> ChargedParticleState {
    ChargedParticleState::perihelion(1.0, 1.0, 1.0, 0.5).unwrap()
}

#[test]
fn unit_vector_precesses_about_j() {
    let s0 = paper_orbit();
    let dt = default_dt(1.0, 1.0);
    let traj = integrate_orbit(&s0, (0.0, 4.0), dt).unwrap();
    let j = conserved_quantities(&s0).j;
    let h = traj.times[1] - traj.times[0];
    let mut worst = 0.0_f64;
    for k in 1..traj.len() - 1 {
        let rhat = |i: usize| traj.states[i].r.normalize();
        let rate = (rhat(k + 1) - rhat(k - 1)) / (2.0 * h);
        let s = &traj.states[k];
        let expect = j.normalize().cross(&rhat(k)) * (j.norm() / (s.m * s.r.norm_squared()));
        worst = worst.max((rate - expect).norm());
    }
    assert!(worst < 1e-5, "{worst}");
}

#[test]
fn cone_coordinates_follow_the_orbit_equation() {
    let s0 = paper_orbit();
    let dt = default_dt(1.0, 1.0);
    for span in [(0.0, 3.0), (0.0, -3.0)] {
        let traj = integrate_orbit(&s0, span, dt).unwrap();
        let phi = cone_azimuth(&traj.states);
        let mut checked = 0;
        for (s, &p) in traj.states.iter().zip(&phi) {
            if p.abs() > 1.0 {
                continue;
            }
            let r = analytic_orbit(1.0, 1.0, 0.5, 1.0, p).unwrap();
            assert!((s.r.norm() - r).abs() < 1e-5, "phi {p}: {} vs {r}", s.r.norm());
            checked += 1;
        }
        assert!(checked > 100);
    }
}

#[test]
fn cone_opening_is_fixed_by_the_charge() {
    let s0 = paper_orbit();
    let traj = integrate_orbit(&s0, (-5.0, 5.0), default_dt(1.0, 1.0)).unwrap();
    let c = conserved_quantities(&s0);
    for s in &traj.states {
        let cos = s.r.normalize().dot(&c.j.normalize());
        assert!((cos + c.cos_cone).abs() < 1e-8);
    }
}

#[test]
fn free_particle_is_a_straight_line() {
    let s0 = ChargedParticleState::new(Vector3::new(0.5, -1.0, 2.0), Vector3::new(-0.2, 0.7, 0.1), 2.0, 0.0).unwrap();
    let traj = integrate_orbit(&s0, (0.0, 8.0), 1e-2).unwrap();
    for (t, s) in traj.times.iter().zip(&traj.states) {
        assert!((s.r - (s0.r + s0.v * *t)).norm() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn conservation_and_reversal(
        b in 0.5..2.0f64, v in 0.5..2.0f64, mu in -1.5..1.5f64, m in 0.5..2.0f64, t_end in 1.0..4.0f64,
    ) {
        let s0 = ChargedParticleState::perihelion(b, v, m, mu).unwrap();
        let dt = default_dt(b, v);
        let traj = integrate_orbit(&s0, (0.0, t_end), dt).unwrap();
        let c0 = conserved_quantities(&s0);
        for (t, s) in traj.times.iter().zip(&traj.states) {
            let c = conserved_quantities(s);
            prop_assert!((c.j - c0.j).norm() / c0.j.norm() < 1e-8);
            prop_assert!((s.v.norm() - v).abs() < 1e-10);
            prop_assert!((s.r.norm() - (v * v * t * t + b * b).sqrt()).abs() < 1e-6);
        }
        let back = integrate_orbit(traj.last(), (t_end, 0.0), dt).unwrap();
        let end = back.last();
        prop_assert!((end.r - s0.r).norm() < 1e-8 && (end.v - s0.v).norm() < 1e-8);
        prop_assert!(end.time_since_perihelion().abs() < 1e-8);
    }
}
