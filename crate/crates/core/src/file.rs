//! Prospect definition files.
//!
//! A file is one JSON document:
//!
//! ```json
//! {
//!   "prospect_id": "bell",
//!   "actions": [
//!     { "id": "A1", "modes": ["a", "b"] },
//!     { "id": "A2", "modes": ["a", "b"] }
//!   ],
//!   "coefficients": [
//!     { "index": [0, 0], "re": 0.7071067811865476, "im": 0.0 },
//!     { "index": [1, 1], "re": 0.7071067811865476, "im": 0.0 }
//!   ]
//! }
//! ```
//!
//! `strategic_state` (same sparse form as `coefficients`) and `lattice`
//! (`prospects` plus `relations` of `left`/`right`/`relation`) are optional.
//! Coefficients not listed are zero. The canonical form lists nonzero
//! coefficients in row-major order and is what [`ParsedProspect::to_canonical_string`]
//! writes.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::prospect::{
    validate_lattice, Action, ActionRing, MultiIndex, ProspectLattice, Relation,
};
use crate::state::{Amplitude, CoefficientTensor, ProspectState, StrategicState};

/// Allowed deviation of a file's strategic state from unit squared norm.
pub const FILE_STRATEGIC_NORM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionEntry {
    pub id: String,
    pub modes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientEntry {
    pub index: Vec<usize>,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationEntry {
    pub left: String,
    pub right: String,
    pub relation: Relation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeEntry {
    pub prospects: Vec<String>,
    #[serde(default)]
    pub relations: Vec<RelationEntry>,
}

/// Raw document, before semantic validation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProspectFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prospect_id: Option<String>,
    pub actions: Vec<ActionEntry>,
    pub coefficients: Vec<CoefficientEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategic_state: Option<Vec<CoefficientEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<LatticeEntry>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FileError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid `{path}`: {message}")]
    Semantic { path: String, message: String },
}

impl FileError {
    /// 1 for syntax errors, 3 for validation errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            FileError::Syntax { .. } => 1,
            FileError::Semantic { .. } => 3,
        }
    }

    fn semantic(path: impl Into<String>, message: impl Into<String>) -> Self {
        FileError::Semantic {
            path: path.into(),
            message: message.into(),
        }
    }
}

/// A fully validated prospect file.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedProspect {
    pub ring: ActionRing,
    pub state: ProspectState,
    pub strategic: Option<StrategicState>,
    pub lattice: Option<ProspectLattice>,
}

pub fn parse_prospect_file(text: &[u8]) -> Result<ParsedProspect, FileError> {
    let doc: ProspectFile = serde_json::from_slice(text).map_err(|e| {
        use serde_json::error::Category;
        match e.classify() {
            Category::Data => FileError::semantic("document", e.to_string()),
            Category::Syntax | Category::Eof | Category::Io => FileError::Syntax {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            },
        }
    })?;
    validate_document(&doc)
}

pub fn validate_document(doc: &ProspectFile) -> Result<ParsedProspect, FileError> {
    if doc.actions.is_empty() {
        return Err(FileError::semantic("actions", "at least one action is required"));
    }
    let mut actions = Vec::with_capacity(doc.actions.len());
    let mut ids = BTreeSet::new();
    for (n, a) in doc.actions.iter().enumerate() {
        if !ids.insert(a.id.as_str()) {
            return Err(FileError::semantic(format!("actions[{n}].id"), format!("duplicate action id `{}`", a.id)));
        }
        if a.modes.is_empty() {
            return Err(FileError::semantic(format!("actions[{n}].modes"), "an action needs at least one mode"));
        }
        let mut labels = BTreeSet::new();
        for (mu, label) in a.modes.iter().enumerate() {
            if !labels.insert(label.as_str()) {
                return Err(FileError::semantic(
                    format!("actions[{n}].modes[{mu}]"),
                    format!("duplicate mode label `{label}`"),
                ));
            }
        }
        actions.push(
            Action::from_labels(a.id.clone(), a.modes.clone())
                .map_err(|e| FileError::semantic(format!("actions[{n}]"), e.to_string()))?,
        );
    }
    let ring = ActionRing::new(actions).map_err(|e| FileError::semantic("actions", e.to_string()))?;

    let tensor = sparse_tensor(&ring, &doc.coefficients, "coefficients")?;
    let state = ProspectState::new(tensor, doc.prospect_id.clone().unwrap_or_else(|| "pi".to_string()));

    let strategic = match &doc.strategic_state {
        None => None,
        Some(entries) => {
            let tensor = sparse_tensor(&ring, entries, "strategic_state")?;
            Some(
                StrategicState::with_tolerance(tensor, FILE_STRATEGIC_NORM_TOL)
                    .map_err(|e| FileError::semantic("strategic_state", e.to_string()))?,
            )
        }
    };

    let lattice = match &doc.lattice {
        None => None,
        Some(l) => {
            let mut lattice = ProspectLattice::new(l.prospects.clone());
            for r in &l.relations {
                lattice.relate(&r.left, &r.right, r.relation);
            }
            let report = validate_lattice(&lattice);
            if !report.is_valid() {
                let detail = serde_json::to_string(&report).unwrap_or_default();
                return Err(FileError::semantic("lattice", format!("inconsistent relations {detail}")));
            }
            Some(lattice)
        }
    };

    Ok(ParsedProspect {
        ring,
        state,
        strategic,
        lattice,
    })
}

fn sparse_tensor(
    ring: &ActionRing,
    entries: &[CoefficientEntry],
    field: &str,
) -> Result<CoefficientTensor, FileError> {
    if entries.is_empty() {
        return Err(FileError::semantic(field, "at least one coefficient is required"));
    }
    let dims = ring.dims();
    let mut seen = BTreeSet::new();
    let mut sparse = Vec::with_capacity(entries.len());
    for (k, c) in entries.iter().enumerate() {
        if c.index.len() != dims.len() {
            return Err(FileError::semantic(
                format!("{field}[{k}].index"),
                format!("has {} entries, expected {}", c.index.len(), dims.len()),
            ));
        }
        for (n, (&mu, &m)) in c.index.iter().zip(dims).enumerate() {
            if mu >= m {
                return Err(FileError::semantic(
                    format!("{field}[{k}].index[{n}]"),
                    format!("mode {mu} out of range for action `{}` with {m} modes", ring.actions()[n].id()),
                ));
            }
        }
        if !c.re.is_finite() || !c.im.is_finite() {
            return Err(FileError::semantic(format!("{field}[{k}]"), "coefficient is not finite"));
        }
        if !seen.insert(c.index.clone()) {
            return Err(FileError::semantic(
                format!("{field}[{k}].index"),
                format!("duplicate index {:?}", c.index),
            ));
        }
        sparse.push((MultiIndex(c.index.clone()), Amplitude::new(c.re, c.im)));
    }
    CoefficientTensor::from_sparse(ring.clone(), sparse).map_err(|e| FileError::semantic(field, e.to_string()))
}

fn to_entries(ring: &ActionRing, data: &[Amplitude]) -> Vec<CoefficientEntry> {
    data.iter()
        .enumerate()
        .filter(|(_, z)| z.re != 0.0 || z.im != 0.0)
        .map(|(k, z)| CoefficientEntry {
            index: ring.unflatten(k).expect("offset in range").0,
            re: z.re,
            im: z.im,
        })
        .collect()
}

impl ParsedProspect {
    pub fn to_document(&self) -> ProspectFile {
        ProspectFile {
            prospect_id: Some(self.state.prospect_id.clone()),
            actions: self
                .ring
                .actions()
                .iter()
                .map(|a| ActionEntry {
                    id: a.id().to_string(),
                    modes: a.modes().iter().map(|m| m.label.clone()).collect(),
                })
                .collect(),
            coefficients: to_entries(&self.ring, self.state.data()),
            strategic_state: self
                .strategic
                .as_ref()
                .map(|s| to_entries(&self.ring, s.state().data())),
            lattice: self.lattice.as_ref().map(|l| LatticeEntry {
                prospects: l.prospect_ids.clone(),
                relations: l
                    .relations
                    .iter()
                    .map(|(left, right, relation)| RelationEntry {
                        left: left.clone(),
                        right: right.clone(),
                        relation: *relation,
                    })
                    .collect(),
            }),
        }
    }

    /// Pretty-printed canonical document with a trailing newline.
    pub fn to_canonical_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_document()).expect("serializable");
        s.push('\n');
        s
    }
}

/// Canonical document for a bare state on its own ring.
pub fn state_to_canonical_string(state: &ProspectState) -> String {
    ParsedProspect {
        ring: state.ring().clone(),
        state: state.clone(),
        strategic: None,
        lattice: None,
    }
    .to_canonical_string()
}
