use std::ops::{Index, IndexMut};

use crate::error::{invalid, Result};

/// Row-major 2D grid of manifold points.
#[derive(Debug, Clone, PartialEq)]
pub struct Image<P> {
    rows: usize,
    cols: usize,
    data: Vec<P>,
}

impl<P> Image<P> {
    pub fn new(rows: usize, cols: usize, data: Vec<P>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(invalid("image must have at least one row and one column"));
        }
        if data.len() != rows * cols {
            return Err(invalid(format!(
                "image of shape {rows}x{cols} needs {} cells, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> P) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::new(rows, cols, data)
    }

    /// A single-row image holding a 1D signal.
    pub fn from_signal(signal: Vec<P>) -> Result<Self> {
        let n = signal.len();
        Self::new(1, n, signal)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn as_slice(&self) -> &[P] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [P] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<P> {
        self.data
    }

    pub fn offset(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.rows && j < self.cols);
        i * self.cols + j
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&P> {
        (i < self.rows && j < self.cols).then(|| &self.data[i * self.cols + j])
    }

    pub fn map<Q>(&self, f: impl FnMut(&P) -> Q) -> Image<Q> {
        Image {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// Iterates `(i, j, &point)` in row-major order.
    pub fn indexed(&self) -> impl Iterator<Item = (usize, usize, &P)> {
        let cols = self.cols;
        self.data.iter().enumerate().map(move |(k, p)| (k / cols, k % cols, p))
    }
}

impl<P> Index<(usize, usize)> for Image<P> {
    type Output = P;

    fn index(&self, (i, j): (usize, usize)) -> &P {
        &self.data[self.offset(i, j)]
    }
}

impl<P> IndexMut<(usize, usize)> for Image<P> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut P {
        let k = self.offset(i, j);
        &mut self.data[k]
    }
}
