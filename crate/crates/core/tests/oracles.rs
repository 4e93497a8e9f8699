//! Library results checked against reference computations written
//! independently in test code.

mod common;

use nalgebra::DMatrix;
use rand::Rng;
use tssr::analysis::{analyze, controllability_rank, spectral_radius, AnalysisConfig};
use tssr::multirate::{eval_state, trajectory_on_grid, MultirateSystem, Sequence};
use tssr::simulate::{simulate_continuous, simulate_discrete};
use tssr::{lift_matrix_state, InputSignal, Method, Tensor, TimeKind};

use common::*;

#[test]
fn contract_last_matches_quadruple_loop() {
    let mut rng = rng(1);
    let a = random_tensor(&mut rng, &[3, 3, 3, 3]);
    let x = random_tensor(&mut rng, &[3, 3]);
    let y = a.contract_last(&x).unwrap();
    let mut expected = vec![0.0; 9];
    for i1 in 0..3 {
        for i2 in 0..3 {
            for j1 in 0..3 {
                for j2 in 0..3 {
                    expected[i1 * 3 + i2] += a.data()[i1 * 27 + i2 * 9 + j1 * 3 + j2] * x.data()[j1 * 3 + j2];
                }
            }
        }
    }
    assert_eq!(y.shape(), &[3, 3]);
    assert!(max_abs_diff(y.data(), &expected) < 1e-15);
    assert!(max_abs_diff(y.data(), &direct_contract_last(&a, &x)) < 1e-15);
}

#[test]
fn contract_last_matches_direct_summation_mixed_shapes() {
    let mut rng = rng(2);
    for _ in 0..50 {
        let lead: Vec<usize> = (0..rng.gen_range(0..=2)).map(|_| rng.gen_range(1..=4)).collect();
        let tail: Vec<usize> = (0..rng.gen_range(1..=3)).map(|_| rng.gen_range(1..=3)).collect();
        let a = random_tensor(&mut rng, &concat(&lead, &tail));
        let x = random_tensor(&mut rng, &tail);
        let y = a.contract_last(&x).unwrap();
        assert_eq!(y.shape(), lead.as_slice());
        assert!(max_abs_diff(y.data(), &direct_contract_last(&a, &x)) < 1e-13);
    }
}

#[test]
fn outer_then_pair_contraction_is_matrix_product() {
    let mut rng = rng(3);
    for (n, k, m) in [(2, 3, 4), (1, 1, 1), (4, 2, 3), (3, 5, 2)] {
        let a = random_tensor(&mut rng, &[n, k]);
        let b = random_tensor(&mut rng, &[k, m]);
        let c = a.outer_product(&b).contract_pair(1, 2).unwrap();
        assert_eq!(c.shape(), &[n, m]);
        assert!(max_abs_diff(c.data(), &naive_matmul(a.data(), b.data(), n, k, m)) < 1e-14);
    }
}

#[test]
fn lifted_state_matches_per_column_iteration() {
    let mut rng = rng(4);
    let (m, cols) = (3, 4);
    let a = with_frobenius_norm(&random_tensor(&mut rng, &[m, m]), 0.8);
    let lifted = lift_matrix_state(TimeKind::Discrete, &a, None, None, None, cols).unwrap();
    let z0 = random_tensor(&mut rng, &[m, cols]);
    let traj = simulate_discrete(&lifted, &z0, &InputSignal::Zero, 10).unwrap();

    for alpha in 0..cols {
        let mut v: Vec<f64> = (0..m).map(|i| z0.data()[i * cols + alpha]).collect();
        for sample in traj.samples.iter().skip(1) {
            v = naive_matvec(a.data(), &v, m);
            let column: Vec<f64> = (0..m).map(|i| sample.state.data()[i * cols + alpha]).collect();
            assert!(max_abs_diff(&column, &v) < 1e-14);
        }
    }
}

#[test]
fn lifted_controllability_matches_reachable_span() {
    // input drives column 0 only, so reachable states fill one column block
    let mut rng = rng(5);
    let (m, cols) = (3, 2);
    let q = m * cols;
    let a = random_tensor(&mut rng, &[m, m]);
    let b = random_tensor(&mut rng, &[m, 1]);
    let lifted = lift_matrix_state(TimeKind::Discrete, &a, Some(&b), None, None, cols).unwrap();
    // lifted B maps [1, cols] inputs; only column 0 is driven
    let driven = |k: usize| {
        let mut u = vec![0.0; cols];
        u[0] = if k == 0 { 1.0 } else { 0.0 };
        Tensor::new(vec![1, cols], u).unwrap()
    };

    // impulse responses from rest over 2q steps span the reachable space
    let mut vectors = Vec::new();
    for delay in 0..2 * q {
        let table = (0..=delay).map(|k| (k as f64, driven(k))).collect();
        let traj = simulate_discrete(
            &lifted,
            &Tensor::zeros(&[m, cols]).unwrap(),
            &InputSignal::table(table).unwrap(),
            delay + 1,
        )
        .unwrap();
        vectors.push(traj.final_state().unwrap().data().to_vec());
    }
    let reachable = span_rank(&vectors, 1e-9);
    assert_eq!(reachable, q / cols);

    let restricted = tssr::TssrSystem::build(
        TimeKind::Discrete,
        tssr::SystemShapes::new(vec![m, cols], Some(vec![1]), None),
        vec![tssr::Segment {
            start: 0.0,
            coefficients: tssr::CoefficientSet::new(
                lifted.segments()[0].coefficients.a.clone(),
                Some(
                    Tensor::new(
                        vec![m, cols, 1],
                        (0..q)
                            .map(|i| if i % cols == 0 { b.data()[i / cols] } else { 0.0 })
                            .collect(),
                    )
                    .unwrap(),
                ),
                None,
                None,
            ),
        }],
    )
    .unwrap();
    assert_eq!(
        controllability_rank(&restricted, &AnalysisConfig::default()).unwrap(),
        reachable
    );
}

#[test]
fn spectral_radius_matches_power_iteration() {
    let mut rng = rng(6);
    let r = uniform(&mut rng, 25);
    let sym: Vec<f64> = (0..25).map(|k| r[k] + r[(k % 5) * 5 + k / 5]).collect();
    let a = DMatrix::from_row_slice(5, 5, &sym);

    // power iteration on A² converges to the largest |λ|² for symmetric A
    let a2 = naive_matmul(&sym, &sym, 5, 5, 5);
    let mut v = vec![1.0; 5];
    let mut estimate = 0.0;
    for _ in 0..5000 {
        let w = naive_matvec(&a2, &v, 5);
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        estimate = norm / v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v = w.iter().map(|x| x / norm).collect();
    }
    let reference = estimate.sqrt();
    assert!((spectral_radius(&a).unwrap() - reference).abs() < 1e-9, "{reference}");
}

#[test]
fn exact_continuous_decay_matches_scalar_exponential() {
    let sys = tssr::TssrSystem::build(
        TimeKind::Continuous,
        tssr::SystemShapes::new(vec![1], Some(vec![1]), None),
        vec![tssr::Segment {
            start: 0.0,
            coefficients: tssr::CoefficientSet::new(
                Tensor::new(vec![1, 1], vec![-2.0]).unwrap(),
                Some(Tensor::new(vec![1, 1], vec![1.0]).unwrap()),
                None,
                None,
            ),
        }],
    )
    .unwrap();
    let x0 = Tensor::new(vec![1], vec![1.0]).unwrap();
    let u = InputSignal::Constant(Tensor::new(vec![1], vec![3.0]).unwrap());
    let traj = simulate_continuous(&sys, &x0, &u, 2.0, Some(0.25), Method::Exact).unwrap();
    for s in &traj.samples {
        // x(t) = 1.5 + (1 - 1.5)·e^(-2t)
        let expected = 1.5 - 0.5 * (-2.0 * s.when).exp();
        assert!((s.state.data()[0] - expected).abs() < 1e-14, "t={}", s.when);
    }
}

#[test]
fn unfolded_twin_gives_identical_report() {
    let mut rng = rng(7);
    for _ in 0..10 {
        let sys = random_system(&mut rng, TimeKind::Continuous, &[2, 2], Some(&[2]), Some(&[1, 2]), None);
        let config = AnalysisConfig::default();
        assert_eq!(
            analyze(&sys, &config).unwrap(),
            analyze(&sys.unfolded().unwrap(), &config).unwrap()
        );
    }
}

/// `x_i(n)` by unmemoized recursion on hand-coded clocks (2, 3).
fn expand(i: usize, n: u64) -> f64 {
    if n == 0 || !n.is_multiple_of(6) {
        return if i == 0 { n as f64 } else { 1.0 };
    }
    match i {
        0 => expand(0, n / 2) + expand(1, n / 3),
        _ => expand(1, n / 3),
    }
}

#[test]
fn multirate_worked_values_match_expansion() {
    let sys = MultirateSystem::new(
        DMatrix::from_row_slice(2, 2, &[1., 1., 0., 1.]),
        None,
        vec![2, 3],
        vec![Sequence::Index, Sequence::Constant(1.0)],
        None,
    )
    .unwrap();
    for (n, frozen) in [(6, 4.0), (18, 10.0), (36, 11.0)] {
        assert_eq!(expand(0, n), frozen);
        assert_eq!(eval_state(&sys, 0, n as i64).unwrap(), frozen);
    }
    let rows = trajectory_on_grid(&sys, 60).unwrap();
    for (k, row) in rows.iter().enumerate() {
        let n = 6 * k as u64;
        assert_eq!(row, &vec![expand(0, n), expand(1, n)], "n={n}");
    }
}

#[test]
fn equal_clocks_subsample_single_rate_trajectory() {
    let a = Tensor::new(vec![2, 2], vec![0.5, 0.25, -0.125, 0.75]).unwrap();
    let sys = MultirateSystem::new(
        DMatrix::from_row_slice(2, 2, a.data()),
        None,
        vec![2, 2],
        vec![Sequence::Constant(1.0), Sequence::Constant(-2.0)],
        None,
    )
    .unwrap();
    let single = tssr::TssrSystem::build(
        TimeKind::Discrete,
        tssr::SystemShapes::new(vec![2], None, None),
        vec![tssr::Segment {
            start: 0.0,
            coefficients: tssr::CoefficientSet::new(a, None, None, None),
        }],
    )
    .unwrap();
    let x1 = Tensor::new(vec![2], vec![1.0, -2.0]).unwrap();
    let reference = simulate_discrete(&single, &x1, &InputSignal::Zero, 8).unwrap();
    for j in 1..=8u32 {
        let n = 2i64.pow(j);
        let got = [eval_state(&sys, 0, n).unwrap(), eval_state(&sys, 1, n).unwrap()];
        assert!(max_abs_diff(&got, reference.samples[j as usize].state.data()) < 1e-15);
    }
}
