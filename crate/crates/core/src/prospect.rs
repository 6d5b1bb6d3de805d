//! Actions, modes, elementary prospects and the prospect lattice.
//!
//! Modes are 0-based. Multi-indices map to flat offsets in row-major order
//! (last action varies fastest), which is the storage layout used by every
//! coefficient tensor in the crate.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{QdtError, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionMode {
    pub action_id: String,
    pub mode_index: usize,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Action {
    action_id: String,
    modes: Vec<ActionMode>,
}

impl Action {
    /// Builds an action whose modes carry the given labels in order.
    pub fn new<S: Into<String>>(action_id: S, labels: &[&str]) -> Result<Self> {
        Self::from_labels(action_id, labels.iter().map(|s| s.to_string()).collect())
    }

    pub fn from_labels<S: Into<String>>(action_id: S, labels: Vec<String>) -> Result<Self> {
        let action_id = action_id.into();
        if labels.is_empty() {
            return Err(QdtError::InvalidRing(format!(
                "action `{action_id}` has no modes"
            )));
        }
        let mut seen = HashSet::new();
        for label in &labels {
            if !seen.insert(label.as_str()) {
                return Err(QdtError::InvalidRing(format!(
                    "action `{action_id}` repeats mode label `{label}`"
                )));
            }
        }
        let modes = labels
            .into_iter()
            .enumerate()
            .map(|(mode_index, label)| ActionMode {
                action_id: action_id.clone(),
                mode_index,
                label,
            })
            .collect();
        Ok(Self { action_id, modes })
    }

    pub fn id(&self) -> &str {
        &self.action_id
    }

    pub fn modes(&self) -> &[ActionMode] {
        &self.modes
    }

    /// Number of modes, i.e. the dimension of this action's mode space.
    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }
}

/// The ordered set of actions; fixes the number of actions and the mode counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionRing {
    actions: Vec<Action>,
    dims: Vec<usize>,
    dimension: usize,
}

impl ActionRing {
    pub fn new(actions: Vec<Action>) -> Result<Self> {
        if actions.is_empty() {
            return Err(QdtError::InvalidRing("ring has no actions".into()));
        }
        let mut ids = HashSet::new();
        for a in &actions {
            if !ids.insert(a.id()) {
                return Err(QdtError::InvalidRing(format!(
                    "duplicate action id `{}`",
                    a.id()
                )));
            }
        }
        let dims: Vec<usize> = actions.iter().map(Action::mode_count).collect();
        let dimension = dims
            .iter()
            .try_fold(1usize, |acc, &m| acc.checked_mul(m))
            .ok_or_else(|| QdtError::InvalidRing("mind-space dimension overflows usize".into()))?;
        Ok(Self {
            actions,
            dims,
            dimension,
        })
    }

    /// Ring with actions `A1..AN` and modes labelled `m0..`.
    pub fn from_dims(dims: &[usize]) -> Result<Self> {
        let actions = dims
            .iter()
            .enumerate()
            .map(|(n, &m)| {
                Action::from_labels(format!("A{}", n + 1), (0..m).map(|mu| format!("m{mu}")).collect())
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(actions)
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    /// Number of actions N.
    pub fn action_count(&self) -> usize {
        self.actions.len()
    }

    /// Mode counts M_1..M_N.
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Mind-space dimension ∏ M_n.
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Row-major stride of each action.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for n in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[n] = strides[n + 1] * self.dims[n + 1];
        }
        strides
    }

    pub fn flat_index(&self, idx: &MultiIndex) -> Result<usize> {
        if idx.len() != self.dims.len() {
            return Err(QdtError::Index(format!(
                "multi-index has {} entries, ring has {} actions",
                idx.len(),
                self.dims.len()
            )));
        }
        let mut offset = 0;
        for (n, (&mu, &m)) in idx.entries().iter().zip(&self.dims).enumerate() {
            if mu >= m {
                return Err(QdtError::Index(format!(
                    "entry {n} is {mu}, action has {m} modes"
                )));
            }
            offset = offset * m + mu;
        }
        Ok(offset)
    }

    pub fn unflatten(&self, mut offset: usize) -> Result<MultiIndex> {
        if offset >= self.dimension {
            return Err(QdtError::Index(format!(
                "offset {offset} outside mind space of dimension {}",
                self.dimension
            )));
        }
        let mut entries = vec![0; self.dims.len()];
        for n in (0..self.dims.len()).rev() {
            entries[n] = offset % self.dims[n];
            offset /= self.dims[n];
        }
        Ok(MultiIndex(entries))
    }
}

/// Free-function form of [`ActionRing::flat_index`].
pub fn flat_index(ring: &ActionRing, idx: &MultiIndex) -> Result<usize> {
    ring.flat_index(idx)
}

/// Mode selection (μ_1, …, μ_N) labelling one elementary prospect.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MultiIndex(pub Vec<usize>);

impl MultiIndex {
    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<Vec<usize>> for MultiIndex {
    fn from(v: Vec<usize>) -> Self {
        MultiIndex(v)
    }
}

/// All elementary prospects of the ring, in row-major order.
pub fn enumerate_elementary(ring: &ActionRing) -> Vec<MultiIndex> {
    let dims = ring.dims();
    let mut out = Vec::with_capacity(ring.dimension());
    let mut cur = vec![0usize; dims.len()];
    for _ in 0..ring.dimension() {
        out.push(MultiIndex(cur.clone()));
        for n in (0..dims.len()).rev() {
            cur[n] += 1;
            if cur[n] < dims[n] {
                break;
            }
            cur[n] = 0;
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Less,
    Greater,
    Equivalent,
}

impl Relation {
    /// The relation seen from the other side of the pair.
    pub fn swapped(self) -> Self {
        match self {
            Relation::Less => Relation::Greater,
            Relation::Greater => Relation::Less,
            Relation::Equivalent => Relation::Equivalent,
        }
    }
}

/// Prospects with their stated pairwise preference relations.
///
/// Relations are kept as stated so that contradictory statements about the
/// same pair can be reported rather than silently overwritten.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ProspectLattice {
    pub prospect_ids: Vec<String>,
    pub relations: Vec<(String, String, Relation)>,
}

impl ProspectLattice {
    pub fn new(prospect_ids: Vec<String>) -> Self {
        Self {
            prospect_ids,
            relations: Vec::new(),
        }
    }

    pub fn relate(&mut self, left: &str, right: &str, relation: Relation) -> &mut Self {
        self.relations
            .push((left.to_string(), right.to_string(), relation));
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LatticeReport {
    pub duplicate_ids: Vec<String>,
    pub unknown_ids: Vec<String>,
    pub self_relations: Vec<String>,
    /// Pairs (in id order) that have no relation.
    pub missing: Vec<(String, String)>,
    /// Pairs (in id order) with incompatible stated relations.
    pub contradictions: Vec<(String, String)>,
}

impl LatticeReport {
    pub fn is_valid(&self) -> bool {
        self.duplicate_ids.is_empty()
            && self.unknown_ids.is_empty()
            && self.self_relations.is_empty()
            && self.missing.is_empty()
            && self.contradictions.is_empty()
    }
}

/// Checks total comparability and swap consistency. Never fails; problems are
/// listed in the report.
pub fn validate_lattice(lattice: &ProspectLattice) -> LatticeReport {
    let mut report = LatticeReport::default();
    let mut position = BTreeMap::new();
    for (i, id) in lattice.prospect_ids.iter().enumerate() {
        if position.insert(id.as_str(), i).is_some() && !report.duplicate_ids.contains(id) {
            report.duplicate_ids.push(id.clone());
        }
    }

    // Canonical pair (lower position first) -> relation as seen from the lower side.
    let mut stated: BTreeMap<(usize, usize), Relation> = BTreeMap::new();
    let mut contradicted = BTreeSet::new();
    let mut unknown = BTreeSet::new();
    for (left, right, rel) in &lattice.relations {
        let (l, r) = match (position.get(left.as_str()), position.get(right.as_str())) {
            (Some(&l), Some(&r)) => (l, r),
            (l, r) => {
                if l.is_none() {
                    unknown.insert(left.clone());
                }
                if r.is_none() {
                    unknown.insert(right.clone());
                }
                continue;
            }
        };
        if l == r {
            if !report.self_relations.contains(left) {
                report.self_relations.push(left.clone());
            }
            continue;
        }
        let (key, rel) = if l < r {
            ((l, r), *rel)
        } else {
            ((r, l), rel.swapped())
        };
        match stated.get(&key) {
            Some(prev) if *prev != rel => {
                contradicted.insert(key);
            }
            Some(_) => {}
            None => {
                stated.insert(key, rel);
            }
        }
    }
    report.unknown_ids = unknown.into_iter().collect();

    let ids = &lattice.prospect_ids;
    for i in 0..ids.len() {
        for j in (i + 1)..ids.len() {
            if ids[i] == ids[j] {
                continue;
            }
            if !stated.contains_key(&(i, j)) {
                report.missing.push((ids[i].clone(), ids[j].clone()));
            }
        }
    }
    report.contradictions = contradicted
        .into_iter()
        .map(|(i, j)| (ids[i].clone(), ids[j].clone()))
        .collect();
    report
}
