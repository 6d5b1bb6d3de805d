//! Prospect states as dense coefficient tensors, and their rank-1 operators.

use num_complex::Complex64;

use crate::error::{QdtError, Result};
use crate::prospect::{ActionRing, MultiIndex};

/// Complex coefficient of a prospect state on one basic state.
pub type Amplitude = Complex64;

/// Tolerance on the squared norm of a strategic state.
pub const STRATEGIC_NORM_TOL: f64 = 1e-12;

/// Dense row-major coefficients over the mind space of a ring.
///
/// Construction rejects non-finite entries and the all-zero tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTensor {
    ring: ActionRing,
    data: Vec<Amplitude>,
}

impl CoefficientTensor {
    pub fn new(ring: ActionRing, data: Vec<Amplitude>) -> Result<Self> {
        if data.len() != ring.dimension() {
            return Err(QdtError::Shape(format!(
                "tensor has {} entries, ring dimension is {}",
                data.len(),
                ring.dimension()
            )));
        }
        if let Some(k) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(QdtError::NonFinite(format!("coefficient at offset {k}")));
        }
        if data.iter().all(|z| z.re == 0.0 && z.im == 0.0) {
            return Err(QdtError::Degenerate("all coefficients are zero".into()));
        }
        Ok(Self { ring, data })
    }

    /// Builds a tensor from (multi-index, amplitude) pairs; unlisted entries are zero.
    pub fn from_sparse<I>(ring: ActionRing, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, Amplitude)>,
    {
        let mut data = vec![Amplitude::new(0.0, 0.0); ring.dimension()];
        for (idx, amp) in entries {
            let k = ring.flat_index(&idx)?;
            data[k] += amp;
        }
        Self::new(ring, data)
    }

    pub fn ring(&self) -> &ActionRing {
        &self.ring
    }

    pub fn data(&self) -> &[Amplitude] {
        &self.data
    }

    pub fn dims(&self) -> &[usize] {
        self.ring.dims()
    }

    pub fn get(&self, idx: &MultiIndex) -> Result<Amplitude> {
        Ok(self.data[self.ring.flat_index(idx)?])
    }

    /// Σ_α |b(e_α)|².
    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// max_α |b(e_α)|².
    pub fn max_abs_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, c: Amplitude) -> Result<Self> {
        Self::new(self.ring.clone(), self.data.iter().map(|z| z * c).collect())
    }

    /// Reorders the actions: action `n` of the result is action `perm[n]` of `self`.
    pub fn permute_actions(&self, perm: &[usize]) -> Result<Self> {
        let n_act = self.ring.action_count();
        let mut seen = vec![false; n_act];
        if perm.len() != n_act || perm.iter().any(|&p| p >= n_act || std::mem::replace(&mut seen[p], true)) {
            return Err(QdtError::Shape(format!("{perm:?} is not a permutation of {n_act} actions")));
        }
        let actions = perm.iter().map(|&p| self.ring.actions()[p].clone()).collect();
        let ring = ActionRing::new(actions)?;
        let mut data = vec![Amplitude::new(0.0, 0.0); self.data.len()];
        let mut src = vec![0usize; n_act];
        for (k, slot) in data.iter_mut().enumerate() {
            let dst = ring.unflatten(k)?;
            for (n, &p) in perm.iter().enumerate() {
                src[p] = dst.entries()[n];
            }
            *slot = self.data[self.ring.flat_index(&MultiIndex(src.clone()))?];
        }
        Self::new(ring, data)
    }

    /// Applies a square matrix (row-major, `M_n × M_n`) to the index of action `n`:
    /// b'(…μ…) = Σ_ν u[μ][ν] b(…ν…).
    pub fn apply_local(&self, n: usize, u: &[Amplitude]) -> Result<Self> {
        let dims = self.ring.dims();
        if n >= dims.len() {
            return Err(QdtError::Index(format!("action {n} of {}", dims.len())));
        }
        let m = dims[n];
        if u.len() != m * m {
            return Err(QdtError::Shape(format!("local matrix needs {} entries", m * m)));
        }
        let stride = self.ring.strides()[n];
        let outer = self.data.len() / (m * stride);
        let mut data = vec![Amplitude::new(0.0, 0.0); self.data.len()];
        for o in 0..outer {
            for i in 0..stride {
                let base = o * m * stride + i;
                for mu in 0..m {
                    let mut acc = Amplitude::new(0.0, 0.0);
                    for nu in 0..m {
                        acc += u[mu * m + nu] * self.data[base + nu * stride];
                    }
                    data[base + mu * stride] = acc;
                }
            }
        }
        Self::new(self.ring.clone(), data)
    }
}

/// A prospect state |π⟩. Need not be normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct ProspectState {
    pub coefficients: CoefficientTensor,
    pub prospect_id: String,
}

impl ProspectState {
    pub fn new(coefficients: CoefficientTensor, prospect_id: impl Into<String>) -> Self {
        Self {
            coefficients,
            prospect_id: prospect_id.into(),
        }
    }

    pub fn from_tensor(coefficients: CoefficientTensor) -> Self {
        Self::new(coefficients, "pi")
    }

    /// Dense state with the default ring for `dims`.
    pub fn from_dense(dims: &[usize], data: Vec<Amplitude>) -> Result<Self> {
        Ok(Self::from_tensor(CoefficientTensor::new(ActionRing::from_dims(dims)?, data)?))
    }

    pub fn ring(&self) -> &ActionRing {
        self.coefficients.ring()
    }

    pub fn dims(&self) -> &[usize] {
        self.coefficients.dims()
    }

    pub fn data(&self) -> &[Amplitude] {
        self.coefficients.data()
    }

    pub fn action_count(&self) -> usize {
        self.ring().action_count()
    }

    /// T = ⟨π|π⟩.
    pub fn norm_sqr(&self) -> f64 {
        self.coefficients.norm_sqr()
    }

    pub fn scaled(&self, c: Amplitude) -> Result<Self> {
        Ok(Self::new(self.coefficients.scaled(c)?, self.prospect_id.clone()))
    }

    pub fn operator(&self) -> ProspectOperator {
        ProspectOperator::new(self.clone())
    }
}

/// The rank-1 operator |π⟩⟨π|, held as its generating state.
#[derive(Debug, Clone, PartialEq)]
pub struct ProspectOperator {
    pub state: ProspectState,
}

impl ProspectOperator {
    pub fn new(state: ProspectState) -> Self {
        Self { state }
    }

    /// ⟨f|P̂|f⟩ = |⟨π|f⟩|².
    pub fn expectation(&self, f: &ProspectState) -> Result<f64> {
        Ok(overlap(&self.state, f)?.norm_sqr())
    }
}

/// Unit-norm decision-maker state.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategicState {
    state: ProspectState,
}

impl StrategicState {
    pub fn new(coefficients: CoefficientTensor) -> Result<Self> {
        Self::with_tolerance(coefficients, STRATEGIC_NORM_TOL)
    }

    pub fn with_tolerance(coefficients: CoefficientTensor, tol: f64) -> Result<Self> {
        let t = coefficients.norm_sqr();
        if (t - 1.0).abs() > tol {
            return Err(QdtError::Degenerate(format!(
                "strategic state has squared norm {t}, expected 1"
            )));
        }
        Ok(Self {
            state: ProspectState::new(coefficients, "s"),
        })
    }

    pub fn state(&self) -> &ProspectState {
        &self.state
    }
}

fn same_ring(a: &ProspectState, b: &ProspectState) -> Result<()> {
    if a.dims() != b.dims() {
        return Err(QdtError::Shape(format!(
            "mode counts {:?} and {:?} differ",
            a.dims(),
            b.dims()
        )));
    }
    Ok(())
}

/// ⟨a|b⟩, conjugate-linear in `a`.
pub fn overlap(a: &ProspectState, b: &ProspectState) -> Result<Amplitude> {
    same_ring(a, b)?;
    Ok(a.data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| x.conj() * y)
        .sum())
}

/// Outcome of applying an operator; the zero vector cannot be a [`ProspectState`].
#[derive(Debug, Clone, PartialEq)]
pub enum Applied {
    State(ProspectState),
    Zero,
}

impl Applied {
    pub fn is_zero(&self) -> bool {
        matches!(self, Applied::Zero)
    }

    pub fn state(&self) -> Option<&ProspectState> {
        match self {
            Applied::State(s) => Some(s),
            Applied::Zero => None,
        }
    }
}

/// P̂|f⟩ = |π⟩⟨π|f⟩.
pub fn apply_operator(op: &ProspectOperator, f: &ProspectState) -> Result<Applied> {
    let c = overlap(&op.state, f)?;
    match op.state.scaled(c) {
        Ok(s) => Ok(Applied::State(s)),
        Err(QdtError::Degenerate(_)) => Ok(Applied::Zero),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizationCheck {
    pub sum: f64,
    pub pass: bool,
}

/// Σ_j ⟨s|P̂(π_j)|s⟩ compared against 1.
pub fn strategic_normalization_check(
    ops: &[ProspectOperator],
    s: &StrategicState,
    tol: f64,
) -> Result<NormalizationCheck> {
    let mut sum = 0.0;
    for op in ops {
        sum += op.expectation(s.state())?;
    }
    Ok(NormalizationCheck {
        sum,
        pass: (sum - 1.0).abs() <= tol,
    })
}

/// Product state ⊗_n |f_n⟩ on the default ring for the factor lengths.
pub fn make_factor_state(factors: &[Vec<Amplitude>]) -> Result<ProspectState> {
    let dims: Vec<usize> = factors.iter().map(Vec::len).collect();
    let ring = ActionRing::from_dims(&dims)?;
    make_factor_state_on(ring, factors)
}

pub fn make_factor_state_on(ring: ActionRing, factors: &[Vec<Amplitude>]) -> Result<ProspectState> {
    if factors.len() != ring.action_count()
        || factors.iter().zip(ring.dims()).any(|(f, &m)| f.len() != m)
    {
        return Err(QdtError::Shape("factor lengths do not match the ring".into()));
    }
    for (n, f) in factors.iter().enumerate() {
        if f.iter().all(|z| z.norm_sqr() == 0.0) {
            return Err(QdtError::Degenerate(format!("factor {n} is zero")));
        }
    }
    let mut data = vec![Amplitude::new(1.0, 0.0)];
    for f in factors {
        data = data
            .iter()
            .flat_map(|a| f.iter().map(move |x| a * x))
            .collect();
    }
    Ok(ProspectState::from_tensor(CoefficientTensor::new(ring, data)?))
}

/// Σ_μ b_μ |μ μ … μ⟩ over `n_actions` actions with `modes` modes each.
pub fn make_multimode_state(
    n_actions: usize,
    modes: usize,
    b: &[Amplitude],
) -> Result<ProspectState> {
    if n_actions == 0 || modes == 0 {
        return Err(QdtError::InvalidRing("need at least one action and one mode".into()));
    }
    if b.len() != modes {
        return Err(QdtError::Shape(format!(
            "{} amplitudes for {modes} modes",
            b.len()
        )));
    }
    if b.iter().all(|z| z.norm_sqr() == 0.0) {
        return Err(QdtError::Degenerate("all branch amplitudes are zero".into()));
    }
    let ring = ActionRing::from_dims(&vec![modes; n_actions])?;
    let entries = b
        .iter()
        .enumerate()
        .map(|(mu, &amp)| (MultiIndex(vec![mu; n_actions]), amp));
    Ok(ProspectState::from_tensor(CoefficientTensor::from_sparse(ring, entries)?))
}

/// b1|00…0⟩ + b2|11…1⟩ over `n_actions` two-mode actions.
pub fn make_multicat_state(n_actions: usize, b1: Amplitude, b2: Amplitude) -> Result<ProspectState> {
    make_multimode_state(n_actions, 2, &[b1, b2])
}

/// b1|00⟩ + b2|11⟩.
pub fn make_bell_state(b1: Amplitude, b2: Amplitude) -> Result<ProspectState> {
    make_multicat_state(2, b1, b2)
}
