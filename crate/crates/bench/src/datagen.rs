//! Synthetic joint-sparse instances.

use mmv_core::{Matrix, RngStream};

/// `m × n` matrix with i.i.d. `N(0, 1/m)` entries, each column then scaled
/// to unit Euclidean norm.
pub fn gen_sensing_matrix(m: usize, n: usize, rng: &mut RngStream) -> Matrix {
    let scale = 1.0 / (m as f64).sqrt();
    let mut a = Matrix::from_fn(m, n, |_, _| scale * rng.standard_normal());
    let norms: Vec<f64> = (0..n)
        .map(|j| (0..m).map(|i| a[(i, j)] * a[(i, j)]).sum::<f64>().sqrt())
        .collect();
    for i in 0..m {
        for (v, &norm) in a.row_mut(i).iter_mut().zip(&norms) {
            if norm > 0.0 {
                *v /= norm;
            }
        }
    }
    a
}

/// Standard normal `n × L` matrix with all but a uniformly random set of `k`
/// rows zeroed.
pub fn gen_row_sparse_signal(n: usize, l: usize, k: usize, rng: &mut RngStream) -> Matrix {
    assert!(k <= n, "sparsity {k} exceeds dimension {n}");
    let mut x = Matrix::from_fn(n, l, |_, _| rng.standard_normal());
    let keep = rng.subset(n, k);
    let mut kept = vec![false; n];
    for i in keep {
        kept[i] = true;
    }
    for (i, &keep) in kept.iter().enumerate() {
        if !keep {
            x.row_mut(i).fill(0.0);
        }
    }
    x
}

/// `Y + σ·G` with `G` standard normal; `σ = 0` returns `Y` without drawing.
pub fn add_noise(y: &Matrix, sigma: f64, rng: &mut RngStream) -> Matrix {
    assert!(sigma >= 0.0, "negative noise level {sigma}");
    if sigma == 0.0 {
        return y.clone();
    }
    Matrix::from_fn(y.rows(), y.cols(), |i, j| y[(i, j)] + sigma * rng.standard_normal())
}

/// One synthetic problem: sensing matrix, noise-free ground truth and
/// (possibly noisy) measurements.
#[derive(Clone, Debug)]
pub struct Instance {
    pub a: Matrix,
    pub x: Matrix,
    pub y: Matrix,
}

pub fn gen_instance(n: usize, m: usize, l: usize, k: usize, sigma: f64, rng: &mut RngStream) -> Instance {
    let a = gen_sensing_matrix(m, n, rng);
    let x = gen_row_sparse_signal(n, l, k, rng);
    let clean = a.matmul(&x).expect("shapes agree by construction");
    let y = add_noise(&clean, sigma, rng);
    Instance { a, x, y }
}
