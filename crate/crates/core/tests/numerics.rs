use monopole_core::numerics::{
    c64, central_diff, eigensolve_hermitian, fix_phase, matrix_exp, max_abs, unwrap_phase, ComplexMatrix, StateVector,
};
use monopole_core::two_level::{hamiltonian, TwoLevelParams};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Cyclic Jacobi eigenvalues of a real symmetric matrix.
fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut values: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    values.sort_by(f64::total_cmp);
    values
}

/// Eigenvalues of `H = A + iB` through the real form `[[A, -B], [B, A]]`,
/// whose spectrum is that of `H` with every value doubled.
fn oracle_eigenvalues(h: &ComplexMatrix) -> Vec<f64> {
    let n = h.nrows();
    let mut real = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            real[i][j] = z.re;
            real[i + n][j + n] = z.re;
            real[i][j + n] = -z.im;
            real[i + n][j] = z.im;
        }
    }
    jacobi_eigenvalues(real).into_iter().step_by(2).collect()
}

fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = c64(rng.gen_range(-2.0..2.0), 0.0);
        for j in (i + 1)..n {
            let z = c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

fn reconstruction_error(h: &ComplexMatrix) -> f64 {
    let eig = eigensolve_hermitian(h).unwrap();
    let n = h.nrows();
    let mut sum = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        let v = eig.vector(k);
        sum += &v * v.adjoint() * c64(eig.values[k], 0.0);
    }
    max_abs(&(sum - h))
}

#[test]
fn random_hermitian_matches_jacobi_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let h = random_hermitian(&mut rng, 5);
        let eig = eigensolve_hermitian(&h).unwrap();
        let oracle = oracle_eigenvalues(&h);
        let scale = max_abs(&h).max(1.0);
        for (a, b) in eig.values.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-10 * scale, "{a} vs {b}");
        }
        for k in 0..5 {
            let v = eig.vector(k);
            assert!((&h * &v - &v * c64(eig.values[k], 0.0)).norm() < 1e-10 * scale);
            for l in 0..5 {
                let expect = if k == l { 1.0 } else { 0.0 };
                assert!((v.dotc(&eig.vector(l)) - c64(expect, 0.0)).norm() < 1e-10);
            }
            // gauge: the largest component is real and nonnegative
            let (pivot, _) = v
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
                .unwrap();
            assert!(v[pivot].im.abs() < 1e-15 && v[pivot].re >= 0.0);
        }
    }
}

#[test]
fn two_level_spectrum_at_unit_field() {
    let h = hamiltonian(&TwoLevelParams::new(0.0, 0.0, 0.0, 1.0));
    let eig = eigensolve_hermitian(&h).unwrap();
    assert!((eig.values[0] + 0.5).abs() < 1e-15);
    assert!((eig.values[1] - 0.5).abs() < 1e-15);
}

#[test]
fn center_element_of_the_lambda_charge() {
    let q0 = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        c64(-0.5, 0.0),
        c64(0.25, 0.0),
        c64(0.25, 0.0),
    ]));
    let e = matrix_exp(&(q0 * c64(0.0, 4.0 * std::f64::consts::PI)));
    let expect = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        c64(1.0, 0.0),
        c64(-1.0, 0.0),
        c64(-1.0, 0.0),
    ]));
    assert!(max_abs(&(e - expect)) < 1e-12);
}

#[test]
fn derivative_of_rwa_quasienergy_at_resonance() {
    // at delta = 0: d/d omega of E0 + (omega + sqrt(l^2 |V|^2 + (w0 - omega)^2)) / 2 is 1/2
    let (w0, lv) = (1.2, 0.3);
    let eps = |w: f64| 0.5 * (w + (lv * lv + (w0 - w) * (w0 - w)).sqrt());
    let d = central_diff(eps, w0, 1e-6).unwrap();
    assert!((d - 0.5).abs() < 1e-5);
}

#[test]
fn unwrap_long_ramp() {
    let raw: Vec<f64> = (0..1000)
        .map(|k| {
            let t = k as f64 / 999.0;
            (4.0 * std::f64::consts::PI * t).rem_euclid(std::f64::consts::TAU)
        })
        .collect();
    let u = unwrap_phase(&raw).unwrap();
    assert!((u[999] - 4.0 * std::f64::consts::PI).abs() < 1e-9);
}

fn hermitian_strategy(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec(-3.0..3.0f64, n * n * 2).prop_map(move |xs| {
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let k = 2 * (i * n + j);
                m[(i, j)] = c64(xs[k], xs[k + 1]);
            }
        }
        (&m + m.adjoint()) * c64(0.5, 0.0)
    })
}

proptest! {
    #[test]
    fn eigensolve_reconstructs(h in (2usize..6).prop_flat_map(hermitian_strategy)) {
        prop_assert!(reconstruction_error(&h) < 1e-9);
    }

    #[test]
    fn exp_inverse_is_exp_of_negative(a in hermitian_strategy(3), scale in 0.0..3.0f64) {
        // anti-Hermitian and Hermitian parts both checked, norm at most ~10
        let m = &a * c64(scale * 0.3, scale * 0.4);
        let prod = matrix_exp(&m) * matrix_exp(&(-&m));
        prop_assert!(max_abs(&(prod - ComplexMatrix::identity(3, 3))) < 1e-10);
    }

    #[test]
    fn central_diff_exact_on_quadratics(a in -5.0..5.0f64, b in -5.0..5.0f64, c in -5.0..5.0f64, x in -3.0..3.0f64) {
        let d = central_diff(|t| a * t * t + b * t + c, x, 1e-3).unwrap();
        prop_assert!((d - (2.0 * a * x + b)).abs() < 1e-9);
    }

    #[test]
    fn phase_fix_is_idempotent(xs in prop::collection::vec(-1.0..1.0f64, 8)) {
        let mut v = StateVector::from_iterator(4, xs.chunks(2).map(|p| c64(p[0], p[1])));
        fix_phase(&mut v);
        let once = v.clone();
        fix_phase(&mut v);
        prop_assert_eq!(once, v);
    }

    #[test]
    fn unwrap_keeps_smooth_sequences(start in -3.0..3.0f64, steps in prop::collection::vec(-3.0..3.0f64, 1..50)) {
        let mut exact = vec![start];
        for s in &steps {
            exact.push(exact.last().unwrap() + s);
        }
        let raw: Vec<f64> = exact.iter().map(|x| x.rem_euclid(std::f64::consts::TAU)).collect();
        let u = unwrap_phase(&raw).unwrap();
        let shift = u[0] - exact[0];
        let turns = shift / std::f64::consts::TAU;
        prop_assert!((turns - turns.round()).abs() < 1e-9);
        for (a, b) in u.iter().zip(&exact) {
            prop_assert!((a - b - shift).abs() < 1e-9);
        }
    }
}
