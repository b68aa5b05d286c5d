//! Dense and sparse complex linear algebra used by the walk engine.

pub mod dense;
pub mod eigen;
pub mod phase;
pub mod sparse;

pub use dense::CMatrix;
pub use eigen::eigenvalues;
pub use phase::{circular_multiset_distance, circular_spread, sorted_phases, wrap_phase};
pub use sparse::CsrMatrix;

use num_complex::Complex64;

/// Anything that can act on a state vector.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;
    fn apply_into(&self, x: &[Complex64], y: &mut [Complex64]);

    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::new(0.0, 0.0); self.dim()];
        self.apply_into(x, &mut y);
        y
    }
}

impl LinearOperator for CsrMatrix {
    fn dim(&self) -> usize {
        CsrMatrix::dim(self)
    }

    fn apply_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        self.matvec_into(x, y);
    }
}

impl LinearOperator for CMatrix {
    fn dim(&self) -> usize {
        self.rows()
    }

    fn apply_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        y.copy_from_slice(&self.matvec(x));
    }
}

/// ⟨a|b⟩.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
