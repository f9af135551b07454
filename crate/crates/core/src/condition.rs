//! Reporting types shared by the dual-space and matrix-class evaluators.
//!
//! Every condition in this crate is a finiteness or limit statement about
//! an infinite matrix. On a finite window it can only be *observed*: each
//! report carries the evaluated quantity over a sequence of growing windows
//! and a tri-state verdict read off that trend.

use std::fmt;

use serde::Serialize;

/// Relative tolerance below which an increment or tail estimate counts as zero.
pub const SETTLE_TOL: f64 = 1e-9;

/// Identifier of an evaluated condition.
///
/// Serialized (and displayed) by its short code, e.g. `C3_4` or `MT_ADD`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ConditionId {
    /// `sup_j Σ_k |φ_jk| < ∞`
    #[serde(rename = "C3_1")]
    RowAbsSum,
    /// column limits `lim_j φ_jk` exist
    #[serde(rename = "C3_2")]
    ColumnLimits,
    /// `lim_j Σ_k |φ_jk| = Σ_k |lim_j φ_jk|`
    #[serde(rename = "C3_3")]
    AbsSumInterchange,
    /// `sup_J Σ_k |Σ_{j∈J} φ_jk| < ∞`
    #[serde(rename = "C3_4")]
    SubsetColumnSum,
    /// `sup_j Σ_k |φ_jk|^{p'} < ∞`, 1 < p < ∞
    #[serde(rename = "C3_5")]
    RowConjugatePower,
    /// `sup_{j,k} |φ_jk|^p < ∞`, 0 < p ≤ 1
    #[serde(rename = "C3_6")]
    EntryPower,
    /// `sup_J sup_k |Σ_{j∈J} φ_jk|^p < ∞`, 0 < p ≤ 1
    #[serde(rename = "C3_7")]
    SubsetEntryPower,
    /// `sup_J Σ_k |Σ_{j∈J} φ_jk|^{p'} < ∞`, 1 < p < ∞
    #[serde(rename = "C3_8")]
    SubsetConjugatePower,
    /// column limits exist and are all zero
    #[serde(rename = "C3_9")]
    ColumnLimitsZero,
    T1,
    T2,
    T3,
    T4,
    S,
    Sp,
    #[serde(rename = "MT_ADD")]
    MtAdd,
    #[serde(rename = "MT1")]
    Mt1,
    #[serde(rename = "MT2")]
    Mt2,
    #[serde(rename = "MT3")]
    Mt3,
    #[serde(rename = "MT4")]
    Mt4,
    #[serde(rename = "MT5")]
    Mt5,
    #[serde(rename = "A_PRIME")]
    APrime,
    #[serde(rename = "B_PRIME")]
    BPrime,
}

impl ConditionId {
    pub fn code(self) -> &'static str {
        use ConditionId::*;
        match self {
            RowAbsSum => "C3_1",
            ColumnLimits => "C3_2",
            AbsSumInterchange => "C3_3",
            SubsetColumnSum => "C3_4",
            RowConjugatePower => "C3_5",
            EntryPower => "C3_6",
            SubsetEntryPower => "C3_7",
            SubsetConjugatePower => "C3_8",
            ColumnLimitsZero => "C3_9",
            T1 => "T1",
            T2 => "T2",
            T3 => "T3",
            T4 => "T4",
            S => "S",
            Sp => "Sp",
            MtAdd => "MT_ADD",
            Mt1 => "MT1",
            Mt2 => "MT2",
            Mt3 => "MT3",
            Mt4 => "MT4",
            Mt5 => "MT5",
            APrime => "A_PRIME",
            BPrime => "B_PRIME",
        }
    }

    /// Conditions of the general matrix-class lemma (the `C3_*` family).
    pub fn is_lemma_condition(self) -> bool {
        self.code().starts_with("C3_")
    }
}

impl fmt::Display for ConditionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// The quantity settled on the observed windows (for limit conditions:
    /// the tail estimates shrank).
    BoundedOnWindow,
    /// The quantity kept increasing (for limit conditions: the tail
    /// estimates did not shrink).
    Growing,
    Inconclusive,
}

impl Verdict {
    /// Worst of two verdicts: growing beats inconclusive beats bounded.
    pub fn combine(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Growing, _) | (_, Growing) => Growing,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => BoundedOnWindow,
        }
    }
}

/// Where the worst-case value of a condition was attained.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Witness {
    Subset(Vec<usize>),
    Row(usize),
    Column(usize),
    Entry { row: usize, col: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowValue {
    pub window: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub condition: ConditionId,
    pub values: Vec<WindowValue>,
    pub verdict: Verdict,
    pub detail: Option<Witness>,
}

impl ConditionReport {
    pub fn last_value(&self) -> f64 {
        self.values.last().map_or(0.0, |v| v.value)
    }

    pub(crate) fn relabel(mut self, condition: ConditionId) -> Self {
        self.condition = condition;
        self
    }
}

/// How the evaluated quantity is expected to behave when the condition holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Trend {
    /// A running supremum that must stay finite.
    Bounded,
    /// A tail or defect estimate that must shrink towards zero.
    Vanishing,
}

pub(crate) fn classify(trend: Trend, values: &[f64], scale: f64) -> Verdict {
    match trend {
        Trend::Bounded => classify_bounded(values),
        Trend::Vanishing => classify_vanishing(values, scale),
    }
}

fn classify_bounded(values: &[f64]) -> Verdict {
    let Some(&last) = values.last() else {
        return Verdict::Inconclusive;
    };
    let tol = SETTLE_TOL * (1.0 + last.abs());
    if values.len() == 1 {
        return if last == 0.0 {
            Verdict::BoundedOnWindow
        } else {
            Verdict::Inconclusive
        };
    }
    let incs: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    let d_last = incs[incs.len() - 1];
    if d_last <= tol {
        return Verdict::BoundedOnWindow;
    }
    if incs.len() >= 2 {
        let d_prev = incs[incs.len() - 2];
        if d_prev > tol && d_last >= 0.5 * d_prev {
            return Verdict::Growing;
        }
    }
    Verdict::Inconclusive
}

fn classify_vanishing(values: &[f64], scale: f64) -> Verdict {
    let Some(&last) = values.last() else {
        return Verdict::Inconclusive;
    };
    if last <= SETTLE_TOL * (1.0 + scale) {
        return Verdict::BoundedOnWindow;
    }
    if values.len() < 2 {
        return Verdict::Inconclusive;
    }
    let first = values[0];
    let nonincreasing = values.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
    if nonincreasing && last <= 0.75 * first {
        Verdict::BoundedOnWindow
    } else if last >= first {
        Verdict::Growing
    } else {
        Verdict::Inconclusive
    }
}

/// Powers of two below `n`, followed by `n` itself.
pub fn default_windows(n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut w = 1;
    while w < n {
        out.push(w);
        w *= 2;
    }
    if n > 0 {
        out.push(n);
    }
    out
}
