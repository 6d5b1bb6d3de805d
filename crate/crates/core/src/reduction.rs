//! Partial traces of rank-1 prospect operators and the nonentangling
//! counterpart built from them.
//!
//! Everything is computed from the coefficient tensor; neither the full
//! operator nor the tensor product of reduced operators is materialized.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{QdtError, Result};
use crate::linalg::{hermitian_eigen, SquareMatrix, JACOBI_MAX_DIM};
use crate::state::ProspectOperator;

/// Smallest admissible eigenvalue of a reduced operator, per unit of trace.
pub const PSD_TOLERANCE: f64 = 1e-10;

/// P̂_n: the operator on mode space `n` left after tracing out every other action.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedOperator {
    pub action_index: usize,
    pub matrix: SquareMatrix,
}

impl ReducedOperator {
    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

/// T^(1−N) ⊗_n P̂_n, kept in factorized form.
#[derive(Debug, Clone, PartialEq)]
pub struct NonentanglingOperator {
    pub prefactor: f64,
    pub factors: Vec<ReducedOperator>,
}

impl NonentanglingOperator {
    /// Tr of the full product: prefactor · ∏_n Tr P̂_n.
    pub fn trace(&self) -> f64 {
        self.prefactor * self.factors.iter().map(ReducedOperator::trace).product::<f64>()
    }
}

/// T = Tr P̂ = Σ_α |b(e_α)|².
pub fn trace_full(op: &ProspectOperator) -> f64 {
    op.state.norm_sqr()
}

/// Traces out every action except `n`.
///
/// Entry (μ, ν) is Σ over the other indices of b(…μ…)·conj(b(…ν…)).
pub fn partial_trace(op: &ProspectOperator, n: usize) -> Result<ReducedOperator> {
    let ring = op.state.ring();
    let dims = ring.dims();
    if n >= dims.len() {
        return Err(QdtError::Index(format!(
            "action {n} requested, ring has {} actions",
            dims.len()
        )));
    }
    let m = dims[n];
    let stride = ring.strides()[n];
    let data = op.state.data();
    let outer = data.len() / (m * stride);

    let mut acc = vec![Complex64::new(0.0, 0.0); m * m];
    let mut fiber = vec![Complex64::new(0.0, 0.0); m];
    for o in 0..outer {
        for i in 0..stride {
            let base = o * m * stride + i;
            for (mu, slot) in fiber.iter_mut().enumerate() {
                *slot = data[base + mu * stride];
            }
            for mu in 0..m {
                let x = fiber[mu];
                if x.norm_sqr() == 0.0 {
                    continue;
                }
                for nu in mu..m {
                    acc[mu * m + nu] += x * fiber[nu].conj();
                }
            }
        }
    }
    for mu in 0..m {
        acc[mu * m + mu].im = 0.0;
        for nu in (mu + 1)..m {
            acc[nu * m + mu] = acc[mu * m + nu].conj();
        }
    }
    let matrix = SquareMatrix::new(m, acc)?;
    check_psd(&matrix, trace_full(op))?;
    Ok(ReducedOperator {
        action_index: n,
        matrix,
    })
}

// Gram matrices are PSD in exact arithmetic; anything more negative than
// rounding allows means the input was corrupted.
fn check_psd(matrix: &SquareMatrix, trace: f64) -> Result<()> {
    if matrix.dim() > JACOBI_MAX_DIM {
        // only the diagonal is cheap to check at this size
        if let Some(k) = (0..matrix.dim()).find(|&k| matrix.get(k, k).re < 0.0) {
            return Err(QdtError::NumericFailure {
                message: format!("reduced operator has negative diagonal entry at {k}"),
                best_lower_bound: None,
            });
        }
        return Ok(());
    }
    let eig = hermitian_eigen(matrix)?;
    let smallest = eig.values.first().copied().unwrap_or(0.0);
    if smallest < -PSD_TOLERANCE * trace.max(1.0) {
        return Err(QdtError::NumericFailure {
            message: format!("reduced operator has eigenvalue {smallest}"),
            best_lower_bound: None,
        });
    }
    Ok(())
}

/// All N reduced operators; computed independently per action.
pub fn partial_traces(op: &ProspectOperator) -> Result<Vec<ReducedOperator>> {
    (0..op.state.action_count())
        .into_par_iter()
        .map(|n| partial_trace(op, n))
        .collect()
}

pub fn nonentangling_operator(op: &ProspectOperator) -> Result<NonentanglingOperator> {
    let t = trace_full(op);
    let n = op.state.action_count() as i32;
    Ok(NonentanglingOperator {
        prefactor: t.powi(1 - n),
        factors: partial_traces(op)?,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceIdentityReport {
    pub trace: f64,
    /// |Tr P̂_n − Tr P̂| / Tr P̂ for every action.
    pub partial_trace_deviation: Vec<f64>,
    /// |∏_n Tr P̂_n − T^N| / T^N.
    pub product_trace_deviation: f64,
    /// |Tr P̂⊗ − Tr P̂| / Tr P̂.
    pub nonentangling_trace_deviation: f64,
    pub pass: bool,
}

impl TraceIdentityReport {
    pub fn max_deviation(&self) -> f64 {
        self.partial_trace_deviation
            .iter()
            .copied()
            .chain([self.product_trace_deviation, self.nonentangling_trace_deviation])
            .fold(0.0, f64::max)
    }
}

/// Checks Tr P̂ = Tr P̂_n for every n, Tr ⊗P̂_n = T^N, and Tr P̂⊗ = Tr P̂.
/// Deviations are relative.
pub fn verify_trace_identities(op: &ProspectOperator, tol: f64) -> Result<TraceIdentityReport> {
    let ne = nonentangling_operator(op)?;
    let t = trace_full(op);
    let partial_trace_deviation: Vec<f64> = ne
        .factors
        .iter()
        .map(|r| (r.trace() - t).abs() / t)
        .collect();
    let n = ne.factors.len() as i32;
    let product: f64 = ne.factors.iter().map(ReducedOperator::trace).product();
    let tn = t.powi(n);
    let product_trace_deviation = (product - tn).abs() / tn;
    let nonentangling_trace_deviation = (ne.trace() - t).abs() / t;
    let mut report = TraceIdentityReport {
        trace: t,
        partial_trace_deviation,
        product_trace_deviation,
        nonentangling_trace_deviation,
        pass: false,
    };
    report.pass = report.max_deviation() <= tol;
    Ok(report)
}
