//! Internal FFT helpers shared by the grid transforms.
//!
//! Thin wrapper around `rustfft` that plans row- and column-wise transforms
//! for an `rows x cols` grid once and reuses them. Row-major layout throughout.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

pub(crate) struct Fft2 {
    rows: usize,
    cols: usize,
    row_fwd: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
}

impl Fft2 {
    pub fn new(rows: usize, cols: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            rows,
            cols,
            row_fwd: planner.plan_fft(cols, FftDirection::Forward),
            row_inv: planner.plan_fft(cols, FftDirection::Inverse),
            col_fwd: planner.plan_fft(rows, FftDirection::Forward),
            col_inv: planner.plan_fft(rows, FftDirection::Inverse),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Forward DFT of every row: `out[r][q] = sum_c data[r][c] e^{-j2pi qc/cols}`.
    /// No normalization.
    pub fn fft_rows(&self, data: &mut [Complex64]) {
        debug_assert_eq!(data.len(), self.rows * self.cols);
        for row in data.chunks_exact_mut(self.cols) {
            self.row_fwd.process(row);
        }
    }

    /// Unnormalized inverse DFT of every row: kernel `e^{+j2pi qc/cols}`.
    pub fn ifft_rows(&self, data: &mut [Complex64]) {
        debug_assert_eq!(data.len(), self.rows * self.cols);
        for row in data.chunks_exact_mut(self.cols) {
            self.row_inv.process(row);
        }
    }

    /// Forward DFT of every column, via gather/scatter into a scratch buffer.
    pub fn fft_cols(&self, data: &mut [Complex64]) {
        self.cols_transform(data, &self.col_fwd);
    }

    /// Unnormalized inverse DFT of every column.
    pub fn ifft_cols(&self, data: &mut [Complex64]) {
        self.cols_transform(data, &self.col_inv);
    }

    fn cols_transform(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        debug_assert_eq!(data.len(), self.rows * self.cols);
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.rows];
        for c in 0..self.cols {
            for r in 0..self.rows {
                scratch[r] = data[r * self.cols + c];
            }
            fft.process(&mut scratch);
            for r in 0..self.rows {
                data[r * self.cols + c] = scratch[r];
            }
        }
    }
}

/// One-dimensional forward DFT in place (kernel `e^{-j2pi nk/N}`), unnormalized.
pub(crate) fn fft_inplace(data: &mut [Complex64]) {
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft(data.len(), FftDirection::Forward);
    fft.process(data);
}

/// One-dimensional unnormalized inverse DFT in place (kernel `e^{+j2pi nk/N}`).
pub(crate) fn ifft_inplace(data: &mut [Complex64]) {
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft(data.len(), FftDirection::Inverse);
    fft.process(data);
}
