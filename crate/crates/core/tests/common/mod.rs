//! Random instances and independent reference computations shared by the
//! integration tests. Nothing here calls the library's numerical routines.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tssr::{CoefficientSet, Segment, SystemShapes, Tensor, TimeKind, TssrSystem};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn product(shape: &[usize]) -> usize {
    shape.iter().product()
}

pub fn uniform(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

pub fn random_tensor(rng: &mut ChaCha8Rng, shape: &[usize]) -> Tensor {
    Tensor::new(shape.to_vec(), uniform(rng, product(shape))).unwrap()
}

pub fn concat(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().chain(b).copied().collect()
}

/// Scales data so its Frobenius norm is `target`, which bounds the
/// spectral radius of the unfolded operator by `target`.
pub fn with_frobenius_norm(t: &Tensor, target: f64) -> Tensor {
    let norm = t.data().iter().map(|v| v * v).sum::<f64>().sqrt();
    Tensor::new(t.shape().to_vec(), t.data().iter().map(|v| v * target / norm).collect()).unwrap()
}

/// Time-invariant random system. `a_norm` caps the Frobenius norm of `A`.
pub fn random_system(
    rng: &mut ChaCha8Rng,
    kind: TimeKind,
    state: &[usize],
    input: Option<&[usize]>,
    output: Option<&[usize]>,
    a_norm: Option<f64>,
) -> TssrSystem {
    let mut a = random_tensor(rng, &concat(state, state));
    if let Some(n) = a_norm {
        a = with_frobenius_norm(&a, n);
    }
    let b = input.map(|u| random_tensor(rng, &concat(state, u)));
    let c = output.map(|y| random_tensor(rng, &concat(y, state)));
    let d = match (output, input) {
        (Some(y), Some(u)) => Some(random_tensor(rng, &concat(y, u))),
        _ => None,
    };
    TssrSystem::build(
        kind,
        SystemShapes::new(
            state.to_vec(),
            input.map(<[usize]>::to_vec),
            output.map(<[usize]>::to_vec),
        ),
        vec![Segment {
            start: 0.0,
            coefficients: CoefficientSet::new(a, b, c, d),
        }],
    )
    .unwrap()
}

/// Row-major strides of a shape.
pub fn strides(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1; shape.len()];
    for i in (0..shape.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * shape[i + 1];
    }
    s
}

/// Every multi-index of `shape`, odometer order.
pub fn indices(shape: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &size in shape {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..size).map(move |i| {
                    let mut v = prefix.clone();
                    v.push(i);
                    v
                })
            })
            .collect();
    }
    out
}

fn at(data: &[f64], strides: &[usize], index: &[usize]) -> f64 {
    data[index.iter().zip(strides).map(|(i, s)| i * s).sum::<usize>()]
}

/// Direct summation `Σ_j a[i.., j..] x[j..]` over explicit multi-indices.
pub fn direct_contract_last(a: &Tensor, x: &Tensor) -> Vec<f64> {
    let lead = &a.shape()[..a.order() - x.order()];
    let a_strides = strides(a.shape());
    let x_strides = strides(x.shape());
    indices(lead)
        .into_iter()
        .map(|i| {
            let mut acc = 0.0;
            for j in indices(x.shape()) {
                let full = concat(&i, &j);
                acc += at(a.data(), &a_strides, &full) * at(x.data(), &x_strides, &j);
            }
            acc
        })
        .collect()
}

/// Naive row-by-column product of row-major matrices.
pub fn naive_matmul(a: &[f64], b: &[f64], n: usize, k: usize, m: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * m];
    for i in 0..n {
        for j in 0..m {
            for l in 0..k {
                out[i * m + j] += a[i * k + l] * b[l * m + j];
            }
        }
    }
    out
}

/// Naive row-major matrix-vector product.
pub fn naive_matvec(a: &[f64], x: &[f64], rows: usize) -> Vec<f64> {
    let cols = x.len();
    (0..rows)
        .map(|i| (0..cols).map(|j| a[i * cols + j] * x[j]).sum())
        .collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Rank by modified Gram-Schmidt with an absolute tolerance on residual norms.
pub fn span_rank(vectors: &[Vec<f64>], tol: f64) -> usize {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let mut r = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let p: f64 = r.iter().zip(b).map(|(x, y)| x * y).sum();
                for (ri, bi) in r.iter_mut().zip(b) {
                    *ri -= p * bi;
                }
            }
        }
        let norm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        let scale = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1.0);
        if norm > tol * scale {
            basis.push(r.iter().map(|x| x / norm).collect());
        }
    }
    basis.len()
}

pub fn transpose(m: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    let mut t = vec![0.0; rows * cols];
    for i in 0..rows {
        for j in 0..cols {
            t[j * rows + i] = m[i * cols + j];
        }
    }
    t
}
