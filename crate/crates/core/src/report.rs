//! Structured comparison of an exact count against a closed-form bound.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// How the exact count relates to the formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    /// `|exact − main| ≤ C · Σ terms`.
    TwoSided,
    /// `exact ≤ C · Σ terms`.
    Upper,
    /// `exact ≤ main + C · Σ terms`, with the constant only on the error.
    Excess,
    /// `exact ≥ C · predicted`.
    Lower,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub label: String,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Precondition {
    pub name: String,
    /// `None` when the condition cannot be decided from the inputs.
    pub holds: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Precondition {
    pub fn checked(name: impl Into<String>, holds: bool) -> Self {
        Precondition {
            name: name.into(),
            holds: Some(holds),
            note: None,
        }
    }

    pub fn unchecked(name: impl Into<String>, note: impl Into<String>) -> Self {
        Precondition {
            name: name.into(),
            holds: None,
            note: Some(note.into()),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// Structural parameters a bound may use.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub theorem_id: String,
    pub kind: BoundKind,
    pub p: u64,
    pub sizes: BTreeMap<String, u64>,
    pub params: Params,
    pub exact: u64,
    pub main_term: f64,
    pub terms: Vec<Term>,
    /// Whether `predicted` includes the `log₂ p` factor.
    pub log_factor: bool,
    pub predicted: f64,
    /// `None` when the denominator vanishes.
    pub empirical_constant: Option<f64>,
    pub preconditions: Vec<Precondition>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl BoundReport {
    pub fn new(theorem_id: &str, kind: BoundKind, p: u64) -> Self {
        BoundReport {
            theorem_id: theorem_id.to_string(),
            kind,
            p,
            sizes: BTreeMap::new(),
            params: Params::default(),
            exact: 0,
            main_term: 0.0,
            terms: Vec::new(),
            log_factor: false,
            predicted: 0.0,
            empirical_constant: None,
            preconditions: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn size(mut self, name: &str, value: usize) -> Self {
        self.sizes.insert(name.to_string(), value as u64);
        self
    }

    pub fn term(mut self, label: &str, value: f64) -> Self {
        self.terms.push(Term {
            label: label.to_string(),
            value,
        });
        self
    }

    pub fn precondition(mut self, pre: Precondition) -> Self {
        self.preconditions.push(pre);
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn error_sum(&self) -> f64 {
        self.terms.iter().map(|t| t.value).sum()
    }

    fn log2p(&self) -> f64 {
        (self.p as f64).log2()
    }

    /// Fills `predicted` and `empirical_constant` from the terms.
    pub fn finish(mut self) -> Self {
        let exact = self.exact as f64;
        let sum = self.error_sum();
        let scale = if self.log_factor { self.log2p() } else { 1.0 };
        let ratio = |num: f64, den: f64| (den > 0.0 && den.is_finite()).then(|| num / den);
        match self.kind {
            BoundKind::TwoSided => {
                self.predicted = self.main_term + sum;
                self.empirical_constant = ratio((exact - self.main_term).abs(), sum);
            }
            BoundKind::Upper => {
                self.predicted = sum * scale;
                self.empirical_constant = ratio(exact, self.predicted);
            }
            BoundKind::Excess => {
                self.predicted = self.main_term + sum;
                self.empirical_constant = ratio((exact - self.main_term).max(0.0), sum);
            }
            BoundKind::Lower => {
                self.predicted = sum / scale;
                self.empirical_constant = ratio(exact, self.predicted);
            }
        }
        self
    }

    /// Every decidable precondition holds.
    pub fn preconditions_hold(&self) -> bool {
        self.preconditions.iter().all(|p| p.holds != Some(false))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_sided_constant() {
        let mut r = BoundReport::new("x", BoundKind::TwoSided, 7)
            .term("a", 10.0)
            .term("b", 10.0);
        r.exact = 50;
        r.main_term = 40.0;
        let r = r.finish();
        assert_eq!(r.predicted, 60.0);
        assert_eq!(r.empirical_constant, Some(0.5));
    }

    #[test]
    fn upper_with_log() {
        let mut r = BoundReport::new("x", BoundKind::Upper, 8).term("a", 2.0);
        r.log_factor = true;
        r.exact = 12;
        let r = r.finish();
        assert_eq!(r.predicted, 6.0);
        assert_eq!(r.empirical_constant, Some(2.0));
    }

    #[test]
    fn zero_denominator() {
        let r = BoundReport::new("x", BoundKind::Lower, 5).finish();
        assert_eq!(r.empirical_constant, None);
    }
}
