use std::sync::atomic::{AtomicUsize, Ordering};

use crate::linalg::DenseMatrix;

/// A linear map `y = A x` together with its adjoint.
pub trait LinearOperator: Sync {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;
    fn apply(&self, x: &[f64], out: &mut [f64]);
    fn apply_transpose(&self, y: &[f64], out: &mut [f64]);
}

impl LinearOperator for DenseMatrix {
    fn rows(&self) -> usize {
        DenseMatrix::rows(self)
    }

    fn cols(&self) -> usize {
        DenseMatrix::cols(self)
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        self.apply_into(x, out)
    }

    fn apply_transpose(&self, y: &[f64], out: &mut [f64]) {
        self.apply_transpose_into(y, out)
    }
}

/// Wraps an operator and counts forward and adjoint applications.
#[derive(Debug, Default)]
pub struct CountingOperator<O> {
    pub inner: O,
    forward: AtomicUsize,
    adjoint: AtomicUsize,
}

impl<O: LinearOperator> CountingOperator<O> {
    pub fn new(inner: O) -> Self {
        Self { inner, forward: AtomicUsize::new(0), adjoint: AtomicUsize::new(0) }
    }

    /// `(forward, adjoint)` applications so far.
    pub fn counts(&self) -> (usize, usize) {
        (self.forward.load(Ordering::Relaxed), self.adjoint.load(Ordering::Relaxed))
    }

    pub fn reset(&self) {
        self.forward.store(0, Ordering::Relaxed);
        self.adjoint.store(0, Ordering::Relaxed);
    }
}

impl<O: LinearOperator> LinearOperator for CountingOperator<O> {
    fn rows(&self) -> usize {
        self.inner.rows()
    }

    fn cols(&self) -> usize {
        self.inner.cols()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        self.forward.fetch_add(1, Ordering::Relaxed);
        self.inner.apply(x, out)
    }

    fn apply_transpose(&self, y: &[f64], out: &mut [f64]) {
        self.adjoint.fetch_add(1, Ordering::Relaxed);
        self.inner.apply_transpose(y, out)
    }
}
