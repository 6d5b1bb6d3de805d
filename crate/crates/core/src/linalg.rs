//! Small dense Hermitian eigensolvers used for reduced operators.
//!
//! Matrices up to [`JACOBI_MAX_DIM`] go through a cyclic complex Jacobi sweep,
//! which delivers every eigenvalue to working precision regardless of
//! spectral gaps. Larger matrices only ever need their top eigenpair, which
//! comes from a shifted power iteration.

use num_complex::Complex64;

use crate::error::{QdtError, Result};

pub const JACOBI_MAX_DIM: usize = 128;

const JACOBI_MAX_SWEEPS: usize = 100;
const POWER_MAX_ITERATIONS: usize = 200_000;

/// Dense square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl SquareMatrix {
    pub fn new(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(QdtError::Shape(format!(
                "{} entries for a {dim}x{dim} matrix",
                data.len()
            )));
        }
        Ok(Self { dim, data })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise deviation from Hermitian symmetry.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.data
            .chunks(self.dim)
            .map(|row| row.iter().zip(v).map(|(a, x)| a * x).sum())
            .collect()
    }
}

/// Eigenvalues in ascending order with matching unit eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    /// `vectors[k]` belongs to `values[k]`.
    pub vectors: Vec<Vec<Complex64>>,
}

/// Full eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
pub fn hermitian_eigen(m: &SquareMatrix) -> Result<EigenDecomposition> {
    let n = m.dim;
    let mut a = m.clone();
    // symmetrize so that rounding in the input cannot leak into the rotations
    for i in 0..n {
        let d = a.get(i, i).re;
        a.set(i, i, Complex64::new(d, 0.0));
        for j in (i + 1)..n {
            let v = (a.get(i, j) + a.get(j, i).conj()) * 0.5;
            a.set(i, j, v);
            a.set(j, i, v.conj());
        }
    }
    let mut w = SquareMatrix::zeros(n);
    for i in 0..n {
        w.set(i, i, Complex64::new(1.0, 0.0));
    }

    let total = a.frobenius();
    let mut converged = n <= 1 || total == 0.0;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if converged {
            break;
        }
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a.get(i, j).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-16 * total {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut w, p, q);
            }
        }
    }
    if !converged {
        return Err(QdtError::NumericFailure {
            message: format!("Jacobi eigensolver did not converge for a {n}x{n} matrix"),
            best_lower_bound: None,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).re.total_cmp(&a.get(j, j).re));
    Ok(EigenDecomposition {
        values: order.iter().map(|&k| a.get(k, k).re).collect(),
        vectors: order
            .iter()
            .map(|&k| (0..n).map(|i| w.get(i, k)).collect())
            .collect(),
    })
}

// Zeroes a[p][q] with the unitary V = diag(1, e^{-iφ}) · R(θ) acting on columns p, q.
fn rotate(a: &mut SquareMatrix, w: &mut SquareMatrix, p: usize, q: usize) {
    let n = a.dim;
    let apq = a.get(p, q);
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let app = a.get(p, p).re;
    let aqq = a.get(q, q).re;
    if mag < 1e-300 || mag <= f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a.set(p, q, Complex64::new(0.0, 0.0));
        a.set(q, p, Complex64::new(0.0, 0.0));
        return;
    }
    let phase = apq / mag;
    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta == 0.0 {
        1.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let vpp = Complex64::new(c, 0.0);
    let vpq = Complex64::new(s, 0.0);
    let vqp = -phase.conj() * s;
    let vqq = phase.conj() * c;

    // A <- A V
    for k in 0..n {
        let akp = a.get(k, p);
        let akq = a.get(k, q);
        a.set(k, p, akp * vpp + akq * vqp);
        a.set(k, q, akp * vpq + akq * vqq);
    }
    // A <- V† A
    for k in 0..n {
        let apk = a.get(p, k);
        let aqk = a.get(q, k);
        a.set(p, k, vpp.conj() * apk + vqp.conj() * aqk);
        a.set(q, k, vpq.conj() * apk + vqq.conj() * aqk);
    }
    a.set(p, q, Complex64::new(0.0, 0.0));
    a.set(q, p, Complex64::new(0.0, 0.0));
    let dp = a.get(p, p).re;
    let dq = a.get(q, q).re;
    a.set(p, p, Complex64::new(dp, 0.0));
    a.set(q, q, Complex64::new(dq, 0.0));
    // W <- W V
    for k in 0..n {
        let wkp = w.get(k, p);
        let wkq = w.get(k, q);
        w.set(k, p, wkp * vpp + wkq * vqp);
        w.set(k, q, wkp * vpq + wkq * vqq);
    }
}

/// Largest eigenvalue and a unit eigenvector of a Hermitian matrix.
pub fn top_eigenpair(m: &SquareMatrix) -> Result<(f64, Vec<Complex64>)> {
    if m.dim == 0 {
        return Err(QdtError::Shape("empty matrix".into()));
    }
    if m.dim <= JACOBI_MAX_DIM {
        let mut eig = hermitian_eigen(m)?;
        let v = eig.vectors.pop().expect("nonempty");
        let l = eig.values.pop().expect("nonempty");
        return Ok((l, v));
    }
    power_iteration(m, 1e-12)
}

/// Shifted power iteration for the algebraically largest eigenvalue.
///
/// The shift by the Gershgorin bound makes the spectrum nonnegative so the
/// dominant eigenvalue is the largest one. Stops once the Rayleigh quotient
/// moves by less than `rel_tol` (relative) and the residual is small.
pub fn power_iteration(m: &SquareMatrix, rel_tol: f64) -> Result<(f64, Vec<Complex64>)> {
    let n = m.dim;
    let shift = (0..n)
        .map(|i| (0..n).map(|j| m.get(i, j).norm()).sum::<f64>())
        .fold(0.0, f64::max);
    if shift == 0.0 {
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        v[0] = Complex64::new(1.0, 0.0);
        return Ok((0.0, v));
    }
    // deterministic start with no special alignment to coordinate axes
    let mut v: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(1.0 + 0.1 * ((i * 7919) % 97) as f64 / 97.0, 0.01 * (i % 5) as f64))
        .collect();
    normalize(&mut v);
    let mut prev = f64::NAN;
    for _ in 0..POWER_MAX_ITERATIONS {
        let av = m.mul_vec(&v);
        let lambda: f64 = v.iter().zip(&av).map(|(x, y)| (x.conj() * y).re).sum();
        let residual = av
            .iter()
            .zip(&v)
            .map(|(y, x)| (y - x * lambda).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let scale = lambda.abs().max(shift * 1e-300);
        if (lambda - prev).abs() <= rel_tol * scale && residual <= 1e-6 * shift {
            return Ok((lambda, v));
        }
        prev = lambda;
        v = av.iter().zip(&v).map(|(y, x)| y + x * shift).collect();
        normalize(&mut v);
    }
    Err(QdtError::NumericFailure {
        message: format!("power iteration did not converge for a {n}x{n} matrix"),
        best_lower_bound: Some(prev),
    })
}

fn normalize(v: &mut [Complex64]) {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|z| *z /= norm);
    }
}
