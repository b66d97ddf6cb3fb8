//! Dense cubic tensors with row-major storage.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

/// An `n × n × n` array indexed by `(a, b, c)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Copy + Default> Tensor3<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![T::default(); n * n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * n * n);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    data.push(f(a, b, c));
                }
            }
        }
        Self { n, data }
    }

    pub fn map<U: Copy + Default>(&self, f: impl Fn(T) -> U) -> Tensor3<U> {
        Tensor3 {
            n: self.n,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn zip_map<U: Copy + Default, V: Copy + Default>(
        &self,
        other: &Tensor3<U>,
        f: impl Fn(T, U) -> V,
    ) -> Tensor3<V> {
        assert_eq!(self.n, other.n, "tensor dimension mismatch");
        Tensor3 {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }
}

impl<T> Tensor3<T> {
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Entries in row-major order.
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }
}

impl<T> Index<(usize, usize, usize)> for Tensor3<T> {
    type Output = T;
    fn index(&self, (a, b, c): (usize, usize, usize)) -> &T {
        &self.data[(a * self.n + b) * self.n + c]
    }
}

impl<T> IndexMut<(usize, usize, usize)> for Tensor3<T> {
    fn index_mut(&mut self, (a, b, c): (usize, usize, usize)) -> &mut T {
        &mut self.data[(a * self.n + b) * self.n + c]
    }
}

impl Tensor3<f64> {
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.zip_map(other, |a, b| a - b).max_abs()
    }
}

impl Tensor3<Complex64> {
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.norm()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.zip_map(other, |a, b| a - b).max_abs()
    }

    pub fn re(&self) -> Tensor3<f64> {
        self.map(|z| z.re)
    }

    pub fn im(&self) -> Tensor3<f64> {
        self.map(|z| z.im)
    }
}

/// An `n × n × n × n` array indexed by `(a, b, c, d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor4<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Copy + Default> Tensor4<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![T::default(); n * n * n * n],
        }
    }
}

impl<T> Tensor4<T> {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }
}

impl<T> Index<(usize, usize, usize, usize)> for Tensor4<T> {
    type Output = T;
    fn index(&self, (a, b, c, d): (usize, usize, usize, usize)) -> &T {
        &self.data[((a * self.n + b) * self.n + c) * self.n + d]
    }
}

impl<T> IndexMut<(usize, usize, usize, usize)> for Tensor4<T> {
    fn index_mut(&mut self, (a, b, c, d): (usize, usize, usize, usize)) -> &mut T {
        &mut self.data[((a * self.n + b) * self.n + c) * self.n + d]
    }
}

impl Tensor4<f64> {
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_major_layout() {
        let t = Tensor3::from_fn(2, |a, b, c| (a * 4 + b * 2 + c) as f64);
        assert_eq!(t.as_slice(), &[0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0]);
        assert_eq!(t[(1, 0, 1)], 5.0);
    }

    #[test]
    fn tensor4_indexing() {
        let mut t = Tensor4::<f64>::zeros(3);
        t[(2, 1, 0, 2)] = 4.5;
        assert_eq!(t.as_slice()[2 * 27 + 9 + 2], 4.5);
        assert_eq!(t.max_abs(), 4.5);
    }
}
