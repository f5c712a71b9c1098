//! Small dense tensors of rank 3 and 4 over `f64`.
//!
//! Dimensions here never exceed 7, so flat `Vec` storage with index
//! arithmetic is all that is needed.

/// Rank-3 tensor `T[a][b][c]` with all axes of length `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor3 {
    n: usize,
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(n: usize) -> Self {
        Tensor3 {
            n,
            data: vec![0.0; n * n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        self.data[(a * self.n + b) * self.n + c]
    }

    #[inline]
    pub fn set(&mut self, a: usize, b: usize, c: usize, value: f64) {
        self.data[(a * self.n + b) * self.n + c] = value;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Rank-4 tensor `T[a][b][c][d]` with all axes of length `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor4 {
    n: usize,
    data: Vec<f64>,
}

impl Tensor4 {
    pub fn zeros(n: usize) -> Self {
        Tensor4 {
            n,
            data: vec![0.0; n * n * n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.data[((a * self.n + b) * self.n + c) * self.n + d]
    }

    #[inline]
    pub fn set(&mut self, a: usize, b: usize, c: usize, d: usize, value: f64) {
        self.data[((a * self.n + b) * self.n + c) * self.n + d] = value;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}
