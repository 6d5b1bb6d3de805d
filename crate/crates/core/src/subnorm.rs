//! Restricted norm of a prospect operator over product (factor) states.
//!
//! For the rank-1 operator |π⟩⟨π| the quadratic form at a product state
//! `f = ⊗ f_n` is |⟨f|π⟩|² / ⟨f|f⟩, so the supremum is the squared overlap
//! of π with its best rank-1 approximation. With all factors but one held
//! fixed, the optimal free factor is the contraction of the coefficient
//! tensor with the conjugated fixed factors; cycling that update is a
//! monotone ascent (higher-order power iteration). Two actions are solved
//! exactly through the top eigenpair of a reduced operator.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{QdtError, Result};
use crate::linalg::top_eigenpair;
use crate::reduction::{partial_trace, NonentanglingOperator, ReducedOperator};
use crate::state::ProspectState;

/// A point of the disentangled set: one vector per action.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorPoint {
    pub factors: Vec<Vec<Complex64>>,
}

impl FactorPoint {
    /// Rescales every factor to unit norm with its first nonzero entry real
    /// and nonnegative. Zero factors are rejected.
    pub fn canonical(factors: Vec<Vec<Complex64>>) -> Result<Self> {
        let factors = factors
            .into_iter()
            .enumerate()
            .map(|(n, mut f)| {
                let norm = f.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                let lead = f.iter().copied().find(|z| z.norm_sqr() > 0.0);
                match lead {
                    Some(lead) if norm > 0.0 => {
                        let phase = lead.conj() / lead.norm();
                        f.iter_mut().for_each(|z| *z = *z * phase / norm);
                        Ok(f)
                    }
                    _ => Err(QdtError::Degenerate(format!("factor {n} is zero"))),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { factors })
    }

    /// |⟨f|π⟩|² / ⟨f|f⟩.
    pub fn objective(&self, state: &ProspectState) -> Result<f64> {
        if self.factors.len() != state.action_count()
            || self.factors.iter().zip(state.dims()).any(|(f, &m)| f.len() != m)
        {
            return Err(QdtError::Shape("factor point does not match the state's ring".into()));
        }
        let conj: Vec<Vec<Complex64>> = self
            .factors
            .iter()
            .map(|f| f.iter().map(|z| z.conj()).collect())
            .collect();
        let c = contract_except(state.data(), state.dims(), &conj, 0);
        let amp: Complex64 = c.iter().zip(&conj[0]).map(|(x, y)| x * y).sum();
        let norm: f64 = self
            .factors
            .iter()
            .map(|f| f.iter().map(|z| z.norm_sqr()).sum::<f64>())
            .product();
        Ok(amp.norm_sqr() / norm)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimizerOptions {
    pub restarts: usize,
    pub max_iterations: usize,
    /// Relative change of the objective below which a restart has converged.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            restarts: 32,
            max_iterations: 500,
            tolerance: 1e-10,
            seed: 0,
        }
    }
}

impl OptimizerOptions {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_iterations == 0 {
            return Err(QdtError::InvalidOptions(
                "restarts and max_iterations must be positive".into(),
            ));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(QdtError::InvalidOptions(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubnormResult {
    pub value: f64,
    pub argmax: FactorPoint,
    pub iterations: usize,
    pub converged: bool,
    pub restarts_used: usize,
    /// Index of the restart that produced `value`.
    pub best_restart: usize,
    /// Solved in closed form (one or two actions); no restarts ran.
    pub exact: bool,
}

/// Contracts every axis except `keep` with the given (already conjugated)
/// vectors, returning a vector of length `dims[keep]`.
pub(crate) fn contract_except(
    data: &[Complex64],
    dims: &[usize],
    vectors: &[Vec<Complex64>],
    keep: usize,
) -> Vec<Complex64> {
    let mut cur = data.to_vec();
    let mut cur_dims = dims.to_vec();
    // Contract from the last axis down so that the axis numbering of the
    // remaining (earlier) axes never changes.
    for m in (0..dims.len()).rev() {
        if m == keep {
            continue;
        }
        let size = cur_dims[m];
        let inner: usize = cur_dims[m + 1..].iter().product();
        let outer: usize = cur_dims[..m].iter().product();
        let v = &vectors[m];
        let mut next = vec![Complex64::new(0.0, 0.0); outer * inner];
        for o in 0..outer {
            for mu in 0..size {
                let w = v[mu];
                if w.re == 0.0 && w.im == 0.0 {
                    continue;
                }
                let src = &cur[(o * size + mu) * inner..(o * size + mu + 1) * inner];
                let dst = &mut next[o * inner..(o + 1) * inner];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += s * w;
                }
            }
        }
        cur = next;
        cur_dims.remove(m);
    }
    cur
}

struct Ascent {
    factors: Vec<Vec<Complex64>>,
    value: f64,
    iterations: usize,
    converged: bool,
}

// One full cycle of single-factor updates; returns the objective after the
// last update (factors are kept at unit norm).
fn sweep(state: &ProspectState, factors: &mut [Vec<Complex64>]) -> f64 {
    let mut value = 0.0;
    for n in 0..factors.len() {
        let conj: Vec<Vec<Complex64>> = factors
            .iter()
            .map(|f| f.iter().map(|z| z.conj()).collect())
            .collect();
        let c = contract_except(state.data(), state.dims(), &conj, n);
        let norm_sqr: f64 = c.iter().map(|z| z.norm_sqr()).sum();
        value = norm_sqr;
        if norm_sqr > 0.0 {
            let norm = norm_sqr.sqrt();
            factors[n] = c.into_iter().map(|z| z / norm).collect();
        }
    }
    value
}

fn ascend(state: &ProspectState, mut factors: Vec<Vec<Complex64>>, opts: &OptimizerOptions) -> Ascent {
    let mut prev = FactorPoint { factors: factors.clone() }
        .objective(state)
        .unwrap_or(0.0);
    for it in 1..=opts.max_iterations {
        let value = sweep(state, &mut factors);
        if (value - prev).abs() <= opts.tolerance * value.abs() {
            return Ascent {
                factors,
                value,
                iterations: it,
                converged: true,
            };
        }
        prev = value;
    }
    Ascent {
        factors,
        value: prev,
        iterations: opts.max_iterations,
        converged: false,
    }
}

// Continue sweeping the winner until the objective stops increasing at
// working precision.
fn polish(state: &ProspectState, ascent: &mut Ascent, max_sweeps: usize) {
    for _ in 0..max_sweeps {
        let mut trial = ascent.factors.clone();
        let value = sweep(state, &mut trial);
        if value <= ascent.value {
            break;
        }
        let gain = value - ascent.value;
        ascent.factors = trial;
        ascent.value = value;
        ascent.iterations += 1;
        if gain <= 4.0 * f64::EPSILON * value {
            break;
        }
    }
}

/// Starting points: the heaviest basis states first, then random unit
/// product states drawn from `seed + restart index`.
fn initializers(state: &ProspectState, opts: &OptimizerOptions) -> Vec<Vec<Vec<Complex64>>> {
    let dims = state.dims();
    let data = state.data();
    let n_basis = (opts.restarts / 2).min(data.len()).max(1).min(opts.restarts);
    let mut order: Vec<usize> = (0..data.len()).collect();
    order.sort_by(|&a, &b| data[b].norm_sqr().total_cmp(&data[a].norm_sqr()).then(a.cmp(&b)));

    let ring = state.ring();
    let mut inits = Vec::with_capacity(opts.restarts);
    for &k in order.iter().take(n_basis) {
        let idx = ring.unflatten(k).expect("offset in range");
        inits.push(
            idx.entries()
                .iter()
                .zip(dims)
                .map(|(&mu, &m)| {
                    let mut v = vec![Complex64::new(0.0, 0.0); m];
                    v[mu] = Complex64::new(1.0, 0.0);
                    v
                })
                .collect(),
        );
    }
    for r in n_basis..opts.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(r as u64));
        inits.push(dims.iter().map(|&m| random_unit_vector(&mut rng, m)).collect());
    }
    inits
}

pub(crate) fn random_unit_vector(rng: &mut ChaCha8Rng, m: usize) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..m)
            .map(|_| Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
            .collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-150 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

fn exact_small(state: &ProspectState) -> Result<SubnormResult> {
    let dims = state.dims();
    let op = state.operator();
    let mut factors: Vec<Vec<Complex64>> = dims.iter().map(|&m| vec![Complex64::new(0.0, 0.0); m]).collect();
    let value;
    if dims.len() == 1 {
        value = state.norm_sqr();
        factors[0] = state.data().to_vec();
    } else {
        // σ_max² of the M_1×M_2 coefficient matrix from the smaller Gram matrix
        let keep = if dims[0] <= dims[1] { 0 } else { 1 };
        let other = 1 - keep;
        let reduced = partial_trace(&op, keep)?;
        let (lambda, u) = top_eigenpair(&reduced.matrix)?;
        value = lambda;
        factors[keep] = u;
        let conj: Vec<Vec<Complex64>> = factors
            .iter()
            .map(|f| f.iter().map(|z| z.conj()).collect())
            .collect();
        let c = contract_except(state.data(), dims, &conj, other);
        factors[other] = if c.iter().any(|z| z.norm_sqr() > 0.0) {
            c
        } else {
            let mut e = vec![Complex64::new(0.0, 0.0); dims[other]];
            e[0] = Complex64::new(1.0, 0.0);
            e
        };
    }
    Ok(at_least_best_basis(
        state,
        SubnormResult {
            value,
            argmax: FactorPoint::canonical(factors)?,
            iterations: 0,
            converged: true,
            restarts_used: 0,
            best_restart: 0,
            exact: true,
        },
    ))
}

/// sup over product states of |⟨f|π⟩|² / ⟨f|f⟩.
///
/// One or two actions are solved exactly. Otherwise every restart runs the
/// alternating ascent until the relative objective change drops below
/// `opts.tolerance`; the best restart (lowest index on ties) is then swept
/// further until the objective stops increasing. Fails only when no restart
/// converged, carrying the best value found.
pub fn subnorm_variational(state: &ProspectState, opts: &OptimizerOptions) -> Result<SubnormResult> {
    opts.validate()?;
    if state.action_count() <= 2 {
        return exact_small(state);
    }
    let inits = initializers(state, opts);
    let outcomes: Vec<Ascent> = inits
        .into_par_iter()
        .map(|init| ascend(state, init, opts))
        .collect();

    let any_converged = outcomes.iter().any(|a| a.converged);
    let (best_restart, _) = outcomes
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, a)| {
            if a.value > bv {
                (i, a.value)
            } else {
                (bi, bv)
            }
        });
    let restarts_used = outcomes.len();
    let mut best = outcomes.into_iter().nth(best_restart).expect("at least one restart");
    if !any_converged {
        return Err(QdtError::NumericFailure {
            message: format!(
                "alternating ascent did not converge in {} restarts of {} sweeps",
                restarts_used, opts.max_iterations
            ),
            best_lower_bound: Some(best.value),
        });
    }
    polish(state, &mut best, opts.max_iterations);

    let argmax = FactorPoint::canonical(best.factors)?;
    let value = argmax.objective(state)?;
    Ok(at_least_best_basis(
        state,
        SubnormResult {
            value,
            argmax,
            iterations: best.iterations,
            converged: best.converged,
            restarts_used,
            best_restart,
            exact: false,
        },
    ))
}

// The heaviest basis state is feasible and scores exactly max_α |b(e_α)|²;
// rounding in the ascent must not report less than that.
fn at_least_best_basis(state: &ProspectState, mut result: SubnormResult) -> SubnormResult {
    let data = state.data();
    let (k, sup) = data
        .iter()
        .enumerate()
        .fold((0, 0.0), |(bk, bv), (k, z)| if z.norm_sqr() > bv { (k, z.norm_sqr()) } else { (bk, bv) });
    if sup > result.value {
        let idx = state.ring().unflatten(k).expect("offset in range");
        let factors = idx
            .entries()
            .iter()
            .zip(state.dims())
            .map(|(&mu, &m)| {
                let mut v = vec![Complex64::new(0.0, 0.0); m];
                v[mu] = Complex64::new(1.0, 0.0);
                v
            })
            .collect();
        result.argmax = FactorPoint { factors };
        result.value = sup;
    }
    result
}

/// max_α |b(e_α)|². Equals the restricted norm on diagonal multimode states;
/// in general only a lower bound of it.
pub fn subnorm_formula(state: &ProspectState) -> f64 {
    state.coefficients.max_abs_sqr()
}

/// Largest eigenvalue of a reduced operator.
pub fn mode_operator_norm(r: &ReducedOperator) -> Result<f64> {
    Ok(top_eigenpair(&r.matrix)?.0)
}

/// Restricted norm of T^(1−N) ⊗ P̂_n, i.e. the prefactor times ∏_n ‖P̂_n‖.
pub fn subnorm_nonentangling(ne: &NonentanglingOperator) -> Result<f64> {
    let mut product = ne.prefactor;
    for f in &ne.factors {
        product *= mode_operator_norm(f)?;
    }
    Ok(product)
}
