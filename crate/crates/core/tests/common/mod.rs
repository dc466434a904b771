#![allow(dead_code)]

use mmv_core::{Matrix, Objective, RngStream};

pub fn normal_matrix(rows: usize, cols: usize, rng: &mut RngStream) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.standard_normal())
}

/// Gaussian sensing matrix with unit-norm columns.
pub fn sensing(m: usize, n: usize, rng: &mut RngStream) -> Matrix {
    let mut a = normal_matrix(m, n, rng);
    for j in 0..n {
        let c = a.column(j);
        let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
        a.set_column(j, &c.iter().map(|v| v / norm).collect::<Vec<_>>());
    }
    a
}

/// `k` nonzero rows at random positions, returned with the sorted support.
pub fn row_sparse(n: usize, l: usize, k: usize, rng: &mut RngStream) -> (Matrix, Vec<usize>) {
    let support = rng.subset(n, k);
    let mut x = Matrix::zeros(n, l);
    for &i in &support {
        for v in x.row_mut(i) {
            *v = rng.standard_normal();
        }
    }
    (x, support)
}

pub struct Planted {
    pub obj: Objective,
    pub x: Matrix,
    pub support: Vec<usize>,
}

pub fn planted(n: usize, m: usize, l: usize, k: usize, seed: u64) -> Planted {
    let mut rng = RngStream::new(seed, 0);
    let a = sensing(m, n, &mut rng);
    let (x, support) = row_sparse(n, l, k, &mut rng);
    let y = a.matmul(&x).unwrap();
    Planted {
        obj: Objective::new(a, y).unwrap(),
        x,
        support,
    }
}

pub fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
