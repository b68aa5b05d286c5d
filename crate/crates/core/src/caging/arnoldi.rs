//! Arnoldi recursion b_{n+1}|n+1⟩ = W|n⟩ − Σ_{m≤n} ⟨m|W|n⟩|m⟩.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{inner, norm, CMatrix, LinearOperator};
use crate::walk::StateVector;

#[derive(Debug, Clone)]
pub struct ArnoldiResult {
    /// Orthonormal Krylov states |0⟩, |1⟩, ...
    pub basis: Vec<StateVector>,
    /// b_1, b_2, ... in order; `b[n - 1]` is b_n.
    pub b: Vec<f64>,
    /// ⟨m|W|n⟩ over the basis, with b_{n+1} on the subdiagonal.
    pub hessenberg: CMatrix,
    /// Krylov dimension when the recursion closed before `max_iter`.
    pub n_c: Option<usize>,
}

impl ArnoldiResult {
    /// b_n; zero beyond the termination index.
    pub fn b_at(&self, n: usize) -> f64 {
        if n == 0 {
            return 0.0;
        }
        self.b.get(n - 1).copied().unwrap_or(0.0)
    }

    /// b_n / max(b_1..b_{n−1}), with 1 as the reference for n = 1.
    pub fn relative_b(&self, n: usize) -> f64 {
        if n == 0 || n > self.b.len() {
            return 0.0;
        }
        let reference = self.b[..n - 1].iter().copied().fold(0.0, f64::max);
        let reference = if n == 1 { 1.0 } else { reference };
        self.b[n - 1] / reference
    }

    /// Largest |⟨m|n⟩ − δ_mn|.
    pub fn orthonormality_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.basis.iter().enumerate() {
            for (j, c) in self.basis.iter().enumerate() {
                let d = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((inner(&a.amps, &c.amps) - d).norm());
            }
        }
        worst
    }

    pub fn is_caged(&self) -> bool {
        self.n_c.is_some()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

fn project_out(basis: &[StateVector], w: &mut [Complex64], h: &mut [Complex64]) {
    for (m, q) in basis.iter().enumerate() {
        let c = inner(&q.amps, w);
        h[m] += c;
        for (x, y) in w.iter_mut().zip(&q.amps) {
            *x -= c * y;
        }
    }
}

/// Runs at most `max_iter` steps (clamped to the dimension) with two-pass
/// Gram–Schmidt. Stops once b_{n+1}/max(b_1..b_n) < `tol`.
pub fn arnoldi<O: LinearOperator + ?Sized>(op: &O, psi0: &StateVector, max_iter: usize, tol: f64) -> Result<ArnoldiResult> {
    let dim = op.dim();
    if psi0.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: psi0.dim(),
        });
    }
    let mut q0 = psi0.clone();
    q0.normalize()?;
    let max_iter = max_iter.clamp(1, dim);

    let mut basis = vec![q0];
    let mut b: Vec<f64> = Vec::new();
    let mut columns: Vec<Vec<Complex64>> = Vec::new();
    let mut n_c = None;
    let mut w = vec![Complex64::new(0.0, 0.0); dim];

    for n in 0..max_iter {
        op.apply_into(&basis[n].amps, &mut w);
        let mut h = vec![Complex64::new(0.0, 0.0); n + 1];
        project_out(&basis, &mut w, &mut h);
        project_out(&basis, &mut w, &mut h);
        let bn = norm(&w);
        columns.push(h);
        b.push(bn);
        let reference = if n == 0 {
            1.0
        } else {
            b[..n].iter().copied().fold(0.0, f64::max)
        };
        if bn / reference < tol {
            n_c = Some(n + 1);
            break;
        }
        if n + 1 == max_iter {
            break;
        }
        basis.push(StateVector {
            amps: w.iter().map(|x| x / bn).collect(),
        });
    }

    let k = basis.len();
    let mut hess = CMatrix::zeros(k, k);
    for (n, col) in columns.iter().enumerate() {
        for (m, &v) in col.iter().enumerate() {
            hess[(m, n)] = v;
        }
        if n + 1 < k {
            hess[(n + 1, n)] = Complex64::new(b[n], 0.0);
        }
    }
    Ok(ArnoldiResult {
        basis,
        b,
        hessenberg: hess,
        n_c,
    })
}
