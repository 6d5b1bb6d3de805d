//! Entanglement production ε = log(‖P̂‖_D / ‖P̂⊗‖_D), by the closed form and
//! by the variational restricted norm, plus the multimode closed forms.

use serde::Serialize;

use crate::error::{QdtError, Result};
use crate::reduction::{nonentangling_operator, trace_full};
use crate::state::{Amplitude, ProspectState};
use crate::subnorm::{
    mode_operator_norm, subnorm_formula, subnorm_variational, FactorPoint, OptimizerOptions,
};

pub const WARN_NEGATIVE_FORMULA: &str = "negative_epsilon_formula";
pub const WARN_SINGLE_ACTION: &str = "single_action";

/// Logarithm base for ε; must exceed 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct LogBase(f64);

impl LogBase {
    pub fn new(base: f64) -> Result<Self> {
        if !(base > 1.0 && base.is_finite()) {
            return Err(QdtError::InvalidOptions(format!(
                "log base must be finite and > 1, got {base}"
            )));
        }
        Ok(Self(base))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn log(self, x: f64) -> f64 {
        if self.0 == 2.0 {
            x.log2()
        } else if self.0 == 10.0 {
            x.log10()
        } else if self.0 == std::f64::consts::E {
            x.ln()
        } else {
            x.ln() / self.0.ln()
        }
    }
}

impl Default for LogBase {
    fn default() -> Self {
        Self(2.0)
    }
}

/// Which numerators of ε to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Formula,
    Variational,
    #[default]
    Both,
}

impl Method {
    fn formula(self) -> bool {
        matches!(self, Method::Formula | Method::Both)
    }

    fn variational(self) -> bool {
        matches!(self, Method::Variational | Method::Both)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizerDiagnostics {
    pub iterations: usize,
    pub converged: bool,
    pub restarts_used: usize,
    pub best_restart: usize,
    pub exact: bool,
    pub argmax: FactorPoint,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntanglementReport {
    pub action_count: usize,
    pub mode_counts: Vec<usize>,
    pub log_base: LogBase,
    pub trace: f64,
    pub per_mode_norms: Vec<f64>,
    pub subnorm_nonentangling: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subnorm_full_formula: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subnorm_full_variational: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon_formula: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon_variational: Option<f64>,
    /// Set for a single action, where ε is defined as 0.
    pub degenerate: bool,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimizer: Option<OptimizerDiagnostics>,
}

/// Both ε values for `state`.
pub fn entanglement_production(
    state: &ProspectState,
    base: LogBase,
    opts: &OptimizerOptions,
) -> Result<EntanglementReport> {
    entanglement_production_with(state, base, opts, Method::Both)
}

/// ε by the selected method(s). The closed form uses
/// sup_α|b|² · T^(N−1) / ∏_n ‖P̂_n‖; the variational form replaces sup_α|b|²
/// by the optimized restricted norm. Both share one set of reduced operators.
pub fn entanglement_production_with(
    state: &ProspectState,
    base: LogBase,
    opts: &OptimizerOptions,
    method: Method,
) -> Result<EntanglementReport> {
    let op = state.operator();
    let trace = trace_full(&op);
    let ne = nonentangling_operator(&op)?;
    let per_mode_norms = ne
        .factors
        .iter()
        .map(mode_operator_norm)
        .collect::<Result<Vec<f64>>>()?;
    let subnorm_ne = ne.prefactor * per_mode_norms.iter().product::<f64>();
    let n = state.action_count();
    let degenerate = n == 1;
    let mut warnings = Vec::new();
    if degenerate {
        warnings.push(WARN_SINGLE_ACTION.to_string());
    }

    let epsilon = |numerator: f64| {
        if degenerate {
            0.0
        } else {
            base.log(numerator / subnorm_ne)
        }
    };

    let (subnorm_full_formula, epsilon_formula) = if method.formula() {
        let sf = subnorm_formula(state);
        let eps = epsilon(sf);
        if eps < 0.0 {
            warnings.push(WARN_NEGATIVE_FORMULA.to_string());
        }
        (Some(sf), Some(eps))
    } else {
        (None, None)
    };

    let (subnorm_full_variational, epsilon_variational, optimizer) = if method.variational() {
        let r = subnorm_variational(state, opts)?;
        let eps = epsilon(r.value);
        let diag = OptimizerDiagnostics {
            iterations: r.iterations,
            converged: r.converged,
            restarts_used: r.restarts_used,
            best_restart: r.best_restart,
            exact: r.exact,
            argmax: r.argmax,
        };
        (Some(r.value), Some(eps), Some(diag))
    } else {
        (None, None, None)
    };

    Ok(EntanglementReport {
        action_count: n,
        mode_counts: state.dims().to_vec(),
        log_base: base,
        trace,
        per_mode_norms,
        subnorm_nonentangling: subnorm_ne,
        subnorm_full_formula,
        subnorm_full_variational,
        epsilon_formula,
        epsilon_variational,
        degenerate,
        warnings,
        optimizer,
    })
}

/// Pretty JSON rendering of a report.
pub fn report_to_json(report: &EntanglementReport) -> String {
    serde_json::to_string_pretty(report).expect("report is serializable")
}

/// ε of the multimode state Σ_μ b_μ |μ…μ⟩ on `n_actions` actions:
/// (N−1) · log(Σ|b_μ|² / max|b_μ|²).
pub fn multimode_entanglement(b: &[Amplitude], n_actions: usize, base: LogBase) -> Result<f64> {
    if n_actions == 0 {
        return Err(QdtError::InvalidRing("need at least one action".into()));
    }
    let sum: f64 = b.iter().map(|z| z.norm_sqr()).sum();
    let sup = b.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
    if sup == 0.0 {
        return Err(QdtError::Degenerate("all branch amplitudes are zero".into()));
    }
    Ok((n_actions - 1) as f64 * base.log(sum / sup))
}

/// (N−1) · log M, the largest ε over multimode states of N actions with M modes.
pub fn maximal_entanglement(n_actions: usize, modes: usize, base: LogBase) -> Result<f64> {
    if n_actions == 0 || modes == 0 {
        return Err(QdtError::InvalidRing("need at least one action and one mode".into()));
    }
    Ok((n_actions - 1) as f64 * base.log(modes as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{make_bell_state, make_factor_state, make_multimode_state};
    use num_complex::Complex64 as C;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn log_base_validation() {
        assert!(LogBase::new(1.0).is_err());
        assert!(LogBase::new(0.5).is_err());
        assert!(LogBase::new(f64::NAN).is_err());
        assert_eq!(LogBase::default().value(), 2.0);
        assert!((LogBase::new(3.0).unwrap().log(9.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn production_examples() {
        let opts = OptimizerOptions::default();
        let bell = make_bell_state(C::new(H, 0.0), C::new(H, 0.0)).unwrap();
        let r = entanglement_production(&bell, LogBase::default(), &opts).unwrap();
        assert!((r.epsilon_formula.unwrap() - 1.0).abs() < 1e-12);
        assert!((r.epsilon_variational.unwrap() - 1.0).abs() < 1e-12);
        assert!(r.warnings.is_empty());

        let spread = make_factor_state(&[vec![C::new(H, 0.0); 2], vec![C::new(H, 0.0); 2]]).unwrap();
        let r = entanglement_production(&spread, LogBase::default(), &opts).unwrap();
        assert!(r.epsilon_variational.unwrap().abs() < 1e-12);
        assert!((r.epsilon_formula.unwrap() + 2.0).abs() < 1e-12);
        assert_eq!(r.warnings, vec![WARN_NEGATIVE_FORMULA.to_string()]);

        let mm = make_multimode_state(3, 2, &[C::new(0.8f64.sqrt(), 0.0), C::new(0.2f64.sqrt(), 0.0)]).unwrap();
        let r = entanglement_production(&mm, LogBase::default(), &opts).unwrap();
        let want = 2.0 * (1.0f64 / 0.8).log2();
        assert!((want - 0.643856).abs() < 1e-6);
        assert!((r.epsilon_formula.unwrap() - want).abs() < 1e-12);
        assert!((r.epsilon_variational.unwrap() - want).abs() < 1e-10);
    }

    #[test]
    fn single_action_is_degenerate_zero() {
        let s = ProspectState::from_dense(&[3], vec![C::new(1.0, 0.0), C::new(0.5, 0.0), C::new(0.0, 0.2)]).unwrap();
        let r = entanglement_production(&s, LogBase::default(), &OptimizerOptions::default()).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.epsilon_formula, Some(0.0));
        assert_eq!(r.epsilon_variational, Some(0.0));
    }

    #[test]
    fn method_selection() {
        let bell = make_bell_state(C::new(H, 0.0), C::new(H, 0.0)).unwrap();
        let opts = OptimizerOptions::default();
        let r = entanglement_production_with(&bell, LogBase::default(), &opts, Method::Formula).unwrap();
        assert!(r.optimizer.is_none() && r.epsilon_variational.is_none());
        let r = entanglement_production_with(&bell, LogBase::default(), &opts, Method::Variational).unwrap();
        assert!(r.optimizer.is_some() && r.epsilon_formula.is_none());
    }

    #[test]
    fn epsilons_reproduce_subnorm_ratio() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..20 {
            let data = (0..12).map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let s = ProspectState::from_dense(&[2, 3, 2], data).unwrap();
            let r = entanglement_production(&s, LogBase::default(), &OptimizerOptions::default()).unwrap();
            let ef = (r.subnorm_full_formula.unwrap() / r.subnorm_nonentangling).log2();
            let ev = (r.subnorm_full_variational.unwrap() / r.subnorm_nonentangling).log2();
            assert!((ef - r.epsilon_formula.unwrap()).abs() < 1e-10);
            assert!((ev - r.epsilon_variational.unwrap()).abs() < 1e-10);
            assert!(r.epsilon_variational.unwrap() >= r.epsilon_formula.unwrap());
        }
    }

    #[test]
    fn multimode_closed_form_examples() {
        let two = LogBase::default();
        assert!((multimode_entanglement(&[C::new(H, 0.0); 2], 2, two).unwrap() - 1.0).abs() < 1e-15);
        for n in 1..6 {
            let b = [C::new(0.0, 0.0), C::new(0.0, 3.0), C::new(0.0, 0.0)];
            assert_eq!(multimode_entanglement(&b, n, two).unwrap(), 0.0);
        }
        let b = [0.5f64.sqrt(), 0.3f64.sqrt(), 0.2f64.sqrt()].map(|x| C::new(x, 0.0));
        assert!((multimode_entanglement(&b, 2, two).unwrap() - 1.0).abs() < 1e-15);
        assert!(multimode_entanglement(&[C::new(0.0, 0.0)], 2, two).is_err());
    }

    #[test]
    fn maximal_examples() {
        let two = LogBase::default();
        assert_eq!(maximal_entanglement(2, 2, two).unwrap(), 1.0);
        for m in 1..10 {
            assert_eq!(maximal_entanglement(1, m, two).unwrap(), 0.0);
        }
        let v = maximal_entanglement(4, 3, two).unwrap();
        assert!((v - 3.0 * 3f64.log2()).abs() < 1e-15);
        assert!((v - 4.754888).abs() < 1e-6);
        for n in 1..6 {
            for m in 1..6 {
                let ones = vec![C::new(1.0, 0.0); m];
                assert_eq!(
                    maximal_entanglement(n, m, two).unwrap(),
                    multimode_entanglement(&ones, n, two).unwrap()
                );
            }
        }
        assert!(maximal_entanglement(0, 2, two).is_err());
    }

    #[test]
    fn closed_form_matches_constructed_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for _ in 0..20 {
            let m = rng.gen_range(1..=4);
            let n = rng.gen_range(1..=4);
            let b: Vec<C> = (0..m).map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let s = make_multimode_state(n, m, &b).unwrap();
            let r = entanglement_production(&s, LogBase::default(), &OptimizerOptions::default()).unwrap();
            let cf = multimode_entanglement(&b, n, LogBase::default()).unwrap();
            assert!((r.epsilon_formula.unwrap() - cf).abs() < 1e-8);
            assert!((r.epsilon_variational.unwrap() - cf).abs() < 1e-8);
        }
    }
}
