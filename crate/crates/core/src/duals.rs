//! Dual-space machinery: the Λ(q) and Ω(q) matrices that carry multiplier
//! problems on the domain spaces back to plain `ℓ_p`, and truncated-window
//! evaluation of the matrix-class conditions that characterize the duals.
//!
//! With `h = ∇^(γ)_q g`:
//!
//! * `a_j g_j = (Λ(q) h)_j` with `λ_jk = e_{j-k} a_j`,
//! * `Σ_{k≤j} a_k g_k = (Ω(q) h)_j` with `ω_jk = Σ_{v=k}^{j} e_{v-k} a_v`,
//!
//! where `e` are the inverse-operator coefficients. Each dual is then the
//! set of `a` for which Λ(q) or Ω(q) lies in a classical matrix class.

use serde::Serialize;

use crate::condition::{
    classify, ConditionId, ConditionReport, Trend, Verdict, WindowValue, Witness,
};
use crate::error::{Error, Result};
use crate::fracdiff::{inverse_coeffs, SeqWindow};
use crate::matrix::MatrixWindow;
use crate::qcore::{QParam, QReal};
use crate::spaces::PExponent;

/// Hard cap on rows for exhaustive subset enumeration (2^20 subsets).
pub const MAX_SUBSET_ROWS: usize = 20;

/// `λ_jk = e_{j-k}(γ, q) a_j` for `k ≤ j`.
pub fn lambda_matrix(a: &SeqWindow, gamma: QReal, qp: &QParam) -> MatrixWindow {
    let n = a.len();
    let e = inverse_coeffs(gamma, qp, n - 1);
    let mut m = MatrixWindow::lower_zeros(n);
    for j in 0..n {
        let aj = a.values()[j];
        for k in 0..=j {
            m.set(j, k, e.coeffs()[j - k] * aj);
        }
    }
    m
}

/// `ω_jk = Σ_{v=k}^{j} e_{v-k}(γ, q) a_v` for `k ≤ j`.
pub fn omega_matrix(a: &SeqWindow, gamma: QReal, qp: &QParam) -> MatrixWindow {
    let n = a.len();
    let e = inverse_coeffs(gamma, qp, n - 1);
    let mut m = MatrixWindow::lower_zeros(n);
    for k in 0..n {
        let mut acc = 0.0;
        for j in k..n {
            acc += e.coeffs()[j - k] * a.values()[j];
            m.set(j, k, acc);
        }
    }
    m
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubsetMode {
    /// `Σ_k |Σ_{j∈J} m_jk|^e`
    SumOverCols,
    /// `sup_k |Σ_{j∈J} m_jk|^e`
    SupOverCols,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsetSup {
    pub value: f64,
    /// Lexicographically least maximizing subset, rows in ascending order.
    pub witness: Vec<usize>,
}

/// Column-sum functional of a subset, given its column sums.
pub(crate) fn subset_objective(col_sums: &[f64], exponent: f64, mode: SubsetMode) -> f64 {
    let term = |s: f64| {
        if exponent == 1.0 {
            s.abs()
        } else {
            s.abs().powf(exponent)
        }
    };
    match mode {
        SubsetMode::SumOverCols => col_sums.iter().fold(0.0, |acc, &s| acc + term(s)),
        SubsetMode::SupOverCols => col_sums.iter().fold(0.0, |acc, &s| acc.max(term(s))),
    }
}

/// Exhaustive maximum over all nonempty subsets `J ⊆ {0..row_limit-1}`.
///
/// Subsets are visited in lexicographic order and column sums are
/// accumulated in ascending row order, so each subset's value is the same
/// bit pattern a direct ascending summation would give.
pub fn subset_sup(
    m: &MatrixWindow,
    exponent: f64,
    mode: SubsetMode,
    row_limit: usize,
) -> Result<SubsetSup> {
    if row_limit > MAX_SUBSET_ROWS {
        return Err(Error::Limit {
            requested: row_limit,
            cap: MAX_SUBSET_ROWS,
        });
    }
    if row_limit > m.rows() {
        return Err(Error::invalid(
            "row_limit",
            format!("row_limit {row_limit} exceeds the {} matrix rows", m.rows()),
        ));
    }
    if !(exponent > 0.0 && exponent.is_finite()) {
        return Err(Error::invalid(
            "exponent",
            format!("must be positive, got {exponent}"),
        ));
    }
    let cols = m.cols();
    let mut search = SubsetSearch {
        m,
        exponent,
        mode,
        row_limit,
        stack: Vec::with_capacity(row_limit),
        sums: vec![vec![0.0; cols]; row_limit + 1],
        best: SubsetSup {
            value: 0.0,
            witness: Vec::new(),
        },
        found: false,
    };
    search.visit(0, 0);
    Ok(search.best)
}

struct SubsetSearch<'a> {
    m: &'a MatrixWindow,
    exponent: f64,
    mode: SubsetMode,
    row_limit: usize,
    stack: Vec<usize>,
    // sums[d] holds the column sums of the subset on the stack at depth d
    sums: Vec<Vec<f64>>,
    best: SubsetSup,
    found: bool,
}

impl SubsetSearch<'_> {
    fn visit(&mut self, depth: usize, start: usize) {
        for i in start..self.row_limit {
            let (head, tail) = self.sums.split_at_mut(depth + 1);
            let parent = &head[depth];
            let cur = &mut tail[0];
            for ((c, p), x) in cur.iter_mut().zip(parent).zip(self.m.row(i)) {
                *c = p + x;
            }
            self.stack.push(i);
            let value = subset_objective(cur, self.exponent, self.mode);
            if !self.found || value > self.best.value {
                self.found = true;
                self.best.value = value;
                self.best.witness.clone_from(&self.stack);
            }
            self.visit(depth + 1, i + 1);
            self.stack.pop();
        }
    }
}

/// Windows (or row limits) at which a condition is evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowPlan {
    pub windows: Vec<usize>,
    pub row_limits: Vec<usize>,
}

impl WindowPlan {
    /// Log-spaced windows up to `n` and row limits up to `min(row_limit, n, 20)`.
    pub fn log_spaced(n: usize, row_limit: usize) -> Self {
        WindowPlan {
            windows: crate::condition::default_windows(n),
            row_limits: crate::condition::default_windows(row_limit.min(n).min(MAX_SUBSET_ROWS)),
        }
    }
}

fn check_windows(name: &'static str, windows: &[usize], bound: usize) -> Result<()> {
    if windows.is_empty() {
        return Err(Error::invalid(name, "at least one window is required"));
    }
    if windows[0] == 0 || windows.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid(
            name,
            "windows must be positive and strictly increasing",
        ));
    }
    let last = windows[windows.len() - 1];
    if last > bound {
        return Err(Error::invalid(
            name,
            format!("window {last} exceeds the available size {bound}"),
        ));
    }
    Ok(())
}

/// Number of trailing rows used for a Cauchy-tail estimate on an `n`-window.
pub(crate) fn tail_rows(n: usize) -> usize {
    n.div_ceil(4).max(2)
}

/// The quantity a lemma condition measures on one square window.
fn window_quantity(
    block: &MatrixWindow,
    cond: ConditionId,
    exponent: f64,
) -> Result<Option<(f64, Option<Witness>)>> {
    use ConditionId::*;
    let n = block.rows();
    let cols = block.cols();
    let t = tail_rows(n);
    let settled_cols = n.saturating_sub(t).min(cols);
    let tail = n.saturating_sub(t)..n;

    let out = match cond {
        RowAbsSum | RowConjugatePower => {
            let mut best = (0.0, 0);
            for j in 0..n {
                let s = block.row(j).iter().fold(0.0, |acc, v| {
                    acc + if exponent == 1.0 {
                        v.abs()
                    } else {
                        v.abs().powf(exponent)
                    }
                });
                if s > best.0 {
                    best = (s, j);
                }
            }
            Some((best.0, Some(Witness::Row(best.1))))
        }
        EntryPower => {
            let mut best = (0.0, 0, 0);
            for j in 0..n {
                for (k, v) in block.row(j).iter().enumerate() {
                    let s = v.abs().powf(exponent);
                    if s > best.0 {
                        best = (s, j, k);
                    }
                }
            }
            Some((
                best.0,
                Some(Witness::Entry {
                    row: best.1,
                    col: best.2,
                }),
            ))
        }
        ColumnLimits => {
            if settled_cols == 0 {
                return Ok(None);
            }
            let mut best = (0.0, 0);
            for k in 0..settled_cols {
                let (lo, hi) =
                    tail.clone()
                        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), j| {
                            let v = block.get(j, k);
                            (lo.min(v), hi.max(v))
                        });
                if hi - lo > best.0 {
                    best = (hi - lo, k);
                }
            }
            Some((best.0, Some(Witness::Column(best.1))))
        }
        ColumnLimitsZero => {
            if settled_cols == 0 {
                return Ok(None);
            }
            let mut best = (0.0, 0, 0);
            for j in tail.clone() {
                for k in 0..settled_cols {
                    let v = block.get(j, k).abs();
                    if v > best.0 {
                        best = (v, j, k);
                    }
                }
            }
            Some((
                best.0,
                Some(Witness::Entry {
                    row: best.1,
                    col: best.2,
                }),
            ))
        }
        AbsSumInterchange => {
            if settled_cols == 0 {
                return Ok(None);
            }
            // limit of each settled column estimated by the last row
            let limit_mass: f64 = block.row(n - 1)[..settled_cols]
                .iter()
                .map(|v| v.abs())
                .sum();
            let mut best = (0.0, n - 1);
            for j in tail.clone() {
                let mass: f64 = block.row(j).iter().map(|v| v.abs()).sum();
                let d = (mass - limit_mass).abs();
                if d > best.0 {
                    best = (d, j);
                }
            }
            Some((best.0, Some(Witness::Row(best.1))))
        }
        SubsetColumnSum | SubsetEntryPower | SubsetConjugatePower => {
            let mode = if cond == SubsetEntryPower {
                SubsetMode::SupOverCols
            } else {
                SubsetMode::SumOverCols
            };
            let s = subset_sup(block, exponent, mode, n)?;
            Some((s.value, Some(Witness::Subset(s.witness))))
        }
        other => {
            return Err(Error::InvalidCondition {
                condition: other,
                reason: "not a matrix-class lemma condition".into(),
            })
        }
    };
    Ok(out)
}

fn trend_of(cond: ConditionId) -> Trend {
    use ConditionId::*;
    match cond {
        ColumnLimits | ColumnLimitsZero | AbsSumInterchange => Trend::Vanishing,
        _ => Trend::Bounded,
    }
}

fn is_subset_condition(cond: ConditionId) -> bool {
    matches!(
        cond,
        ConditionId::SubsetColumnSum
            | ConditionId::SubsetEntryPower
            | ConditionId::SubsetConjugatePower
    )
}

/// Evaluates a lemma condition with an explicit exponent over the leading
/// square blocks of `m`.
pub(crate) fn evaluate_lemma(
    m: &MatrixWindow,
    cond: ConditionId,
    exponent: f64,
    plan: &WindowPlan,
) -> Result<ConditionReport> {
    let windows = if is_subset_condition(cond) {
        if let Some(&too_big) = plan.row_limits.iter().find(|&&r| r > MAX_SUBSET_ROWS) {
            return Err(Error::Limit {
                requested: too_big,
                cap: MAX_SUBSET_ROWS,
            });
        }
        check_windows("row_limit", &plan.row_limits, m.rows().min(m.cols()))?;
        &plan.row_limits
    } else {
        check_windows("window", &plan.windows, m.rows().min(m.cols()))?;
        &plan.windows
    };

    let mut values = Vec::with_capacity(windows.len());
    let mut detail = None;
    for &n in windows {
        let block = m.leading_block(n, n);
        if let Some((value, witness)) = window_quantity(&block, cond, exponent)? {
            values.push(WindowValue { window: n, value });
            detail = witness;
        }
    }
    if values.is_empty() {
        return Err(Error::invalid(
            "window",
            format!("condition {cond} needs a window of at least 3 rows for a tail estimate"),
        ));
    }
    let raw: Vec<f64> = values.iter().map(|v| v.value).collect();
    let verdict = classify(trend_of(cond), &raw, m.max_abs());
    Ok(ConditionReport {
        condition: cond,
        values,
        verdict,
        detail,
    })
}

fn regime_error(cond: ConditionId, p: PExponent, needs: &str) -> Error {
    Error::InvalidCondition {
        condition: cond,
        reason: format!("requires {needs}, got p = {p}"),
    }
}

fn conjugate_or(cond: ConditionId, p: PExponent) -> Result<f64> {
    p.conjugate()
        .ok_or_else(|| regime_error(cond, p, "1 < p < ∞"))
}

fn at_most_one_or(cond: ConditionId, p: PExponent) -> Result<f64> {
    match p {
        PExponent::Finite(v) if v <= 1.0 => Ok(v),
        _ => Err(regime_error(cond, p, "0 < p ≤ 1")),
    }
}

/// Single dispatch point for the general matrix-class lemma conditions
/// (`C3_1` … `C3_9`), with the exponent chosen from `p` where the condition
/// depends on it.
pub fn lemma_mc_condition(
    m: &MatrixWindow,
    cond: ConditionId,
    p: PExponent,
    plan: &WindowPlan,
) -> Result<ConditionReport> {
    use ConditionId::*;
    let exponent = match cond {
        RowAbsSum | ColumnLimits | AbsSumInterchange | ColumnLimitsZero | SubsetColumnSum => 1.0,
        RowConjugatePower | SubsetConjugatePower => conjugate_or(cond, p)?,
        EntryPower | SubsetEntryPower => at_most_one_or(cond, p)?,
        other => {
            return Err(Error::InvalidCondition {
                condition: other,
                reason: "not a matrix-class lemma condition".into(),
            })
        }
    };
    evaluate_lemma(m, cond, exponent, plan)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DualKind {
    Alpha,
    Beta,
    Gamma,
}

/// Conjunction of condition reports making up one dual-set test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualReport {
    pub dual: DualKind,
    pub p: PExponent,
    pub components: Vec<ConditionReport>,
    pub verdict: Verdict,
}

impl DualReport {
    fn new(dual: DualKind, p: PExponent, components: Vec<ConditionReport>) -> Self {
        let verdict = components
            .iter()
            .fold(Verdict::BoundedOnWindow, |v, c| v.combine(c.verdict));
        DualReport {
            dual,
            p,
            components,
            verdict,
        }
    }
}

/// α-dual test on Λ(q): `S(q)` for `0 < p ≤ 1`, `S^(p')(q)` for
/// `1 < p < ∞`, `S^(1)(q)` for `p = ∞`.
pub fn alpha_dual_check(
    a: &SeqWindow,
    gamma: QReal,
    qp: &QParam,
    p: PExponent,
    row_limits: &[usize],
) -> Result<ConditionReport> {
    let lambda = lambda_matrix(a, gamma, qp);
    let plan = WindowPlan {
        windows: Vec::new(),
        row_limits: row_limits.to_vec(),
    };
    let (cond, exponent, label) = match p {
        PExponent::Finite(v) if v <= 1.0 => (ConditionId::SubsetEntryPower, v, ConditionId::S),
        PExponent::Finite(_) => (
            ConditionId::SubsetConjugatePower,
            p.conjugate().expect("p > 1"),
            ConditionId::Sp,
        ),
        PExponent::Infinity => (ConditionId::SubsetColumnSum, 1.0, ConditionId::Sp),
    };
    Ok(evaluate_lemma(&lambda, cond, exponent, &plan)?.relabel(label))
}

/// β-dual test on Ω(q): `T₁ ∧ T₃` for `0 < p ≤ 1`, `T₁ ∧ T₂` for
/// `1 < p < ∞`, `T₁ ∧ T₄` for `p = ∞`.
pub fn beta_dual_check(
    a: &SeqWindow,
    gamma: QReal,
    qp: &QParam,
    p: PExponent,
    windows: &[usize],
) -> Result<DualReport> {
    let omega = omega_matrix(a, gamma, qp);
    let plan = WindowPlan {
        windows: windows.to_vec(),
        row_limits: Vec::new(),
    };
    let t1 =
        evaluate_lemma(&omega, ConditionId::ColumnLimits, 1.0, &plan)?.relabel(ConditionId::T1);
    let second = match p {
        PExponent::Infinity => evaluate_lemma(&omega, ConditionId::AbsSumInterchange, 1.0, &plan)?
            .relabel(ConditionId::T4),
        _ => bounded_component(&omega, p, &plan)?,
    };
    Ok(DualReport::new(DualKind::Beta, p, vec![t1, second]))
}

/// γ-dual test on Ω(q): `T₃` for `0 < p ≤ 1`, `T₂` for `1 < p < ∞`, `T₂`
/// with `p' = 1` for `p = ∞`.
pub fn gamma_dual_check(
    a: &SeqWindow,
    gamma: QReal,
    qp: &QParam,
    p: PExponent,
    windows: &[usize],
) -> Result<DualReport> {
    let omega = omega_matrix(a, gamma, qp);
    let plan = WindowPlan {
        windows: windows.to_vec(),
        row_limits: Vec::new(),
    };
    let component = match p {
        PExponent::Infinity => evaluate_lemma(&omega, ConditionId::RowConjugatePower, 1.0, &plan)?
            .relabel(ConditionId::T2),
        _ => bounded_component(&omega, p, &plan)?,
    };
    Ok(DualReport::new(DualKind::Gamma, p, vec![component]))
}

// T₃ for 0 < p ≤ 1, T₂ for 1 < p < ∞
fn bounded_component(
    omega: &MatrixWindow,
    p: PExponent,
    plan: &WindowPlan,
) -> Result<ConditionReport> {
    match p {
        PExponent::Finite(v) if v <= 1.0 => {
            Ok(evaluate_lemma(omega, ConditionId::EntryPower, v, plan)?.relabel(ConditionId::T3))
        }
        _ => {
            let pc = p.conjugate().expect("1 < p < ∞");
            Ok(
                evaluate_lemma(omega, ConditionId::RowConjugatePower, pc, plan)?
                    .relabel(ConditionId::T2),
            )
        }
    }
}
