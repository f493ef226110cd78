//! Uniform pass/fail record for every closed-form-versus-probe comparison.

use serde::Serialize;
use std::collections::BTreeMap;

/// Outcome of checking one numerical probe against one closed-form bound.
///
/// Sign convention: the closed form is always the *upper* bound, so
/// `margin = closed_form_value - probe_value` and the bound holds when the
/// margin is no more negative than the declared tolerance. Quantities that
/// are naturally lower bounds (spectral bounds on `-lambda_1`) are reported
/// with both sides negated so the same convention applies.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    /// Stable identifier of the inequality being checked.
    pub bound_name: String,
    /// Numeric parameters the check ran with (sorted keys, so serialized
    /// output is deterministic).
    pub params: BTreeMap<String, f64>,
    /// The analytic side of the comparison.
    pub closed_form_value: f64,
    /// The measured side of the comparison.
    pub probe_value: f64,
    /// `closed_form_value - probe_value`.
    pub margin: f64,
    /// `margin >= -tolerance`.
    pub satisfied: bool,
    /// Slack allowed for discretization error before declaring failure.
    pub tolerance: f64,
    /// Optional free-text remark (e.g. which of two bounds was sharper, or
    /// a degeneracy warning).
    pub note: Option<String>,
}

impl BoundReport {
    /// Builds a report, deriving `margin` and `satisfied`.
    pub fn new(
        bound_name: impl Into<String>,
        params: BTreeMap<String, f64>,
        closed_form_value: f64,
        probe_value: f64,
        tolerance: f64,
    ) -> Self {
        let margin = closed_form_value - probe_value;
        Self {
            bound_name: bound_name.into(),
            params,
            closed_form_value,
            probe_value,
            margin,
            satisfied: margin >= -tolerance,
            tolerance,
            note: None,
        }
    }

    /// Builds a report for a two-sided *identity* check (closed form and
    /// probe must agree within the tolerance, rather than one bounding the
    /// other).
    pub fn identity(
        bound_name: impl Into<String>,
        params: BTreeMap<String, f64>,
        closed_form_value: f64,
        probe_value: f64,
        tolerance: f64,
    ) -> Self {
        let margin = closed_form_value - probe_value;
        Self {
            bound_name: bound_name.into(),
            params,
            closed_form_value,
            probe_value,
            margin,
            satisfied: margin.abs() <= tolerance,
            tolerance,
            note: Some("two-sided identity check".into()),
        }
    }

    /// Attaches a remark.
    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// One-line human-readable rendering (used by the CLI and the test
    /// harness output).
    pub fn summary_line(&self) -> String {
        format!(
            "[{}] {}: closed={:.9e} probe={:.9e} margin={:+.3e} tol={:.1e}",
            if self.satisfied { "PASS" } else { "FAIL" },
            self.bound_name,
            self.closed_form_value,
            self.probe_value,
            self.margin,
            self.tolerance,
        )
    }
}

/// Convenience for building the params map literals.
pub fn params_map(entries: &[(&str, f64)]) -> BTreeMap<String, f64> {
    entries.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}
