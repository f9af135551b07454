//! Matrix transformations out of (and into) the difference-operator
//! domains.
//!
//! A matrix Φ maps the domain `X(∇^(γ)_q)` into `Y` exactly when the
//! auxiliary matrices
//!
//! * `ψ^(j)_{mk} = Σ_{v=k}^{m} e_{v-k} φ_jv` (one per row `j` of Φ), and
//! * `ψ_jk = Σ_{v≥k} e_{v-k} φ_jv`
//!
//! satisfy a bundle of classical conditions, tabulated per `(X, Y)` cell.
//! Into-domain questions go through `Υ = ∇^(γ)_q Φ` instead.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::condition::{
    classify, default_windows, ConditionId, ConditionReport, Trend, Verdict, WindowValue, Witness,
};
use crate::duals::{
    evaluate_lemma, subset_sup, tail_rows, SubsetMode, WindowPlan, MAX_SUBSET_ROWS,
};
use crate::error::{Error, Result};
use crate::fracdiff::{apply_forward, inverse_coeffs, SeqWindow};
use crate::matrix::MatrixWindow;
use crate::qcore::{bracket, QParam, QReal};
use crate::spaces::PExponent;

/// Default relative tolerance for the ψ row-tail decay test.
pub const DEFAULT_TAIL_RTOL: f64 = 1e-8;

/// `ψ^(j)_{mk} = Σ_{v=k}^{m} e_{v-k} φ_jv` for `k ≤ m < N`, `N` = column count of Φ.
pub fn psi_j_matrix(
    phi: &MatrixWindow,
    j: usize,
    gamma: QReal,
    qp: &QParam,
) -> Result<MatrixWindow> {
    if j >= phi.rows() {
        return Err(Error::Index {
            name: "j",
            index: j,
            bound: phi.rows(),
        });
    }
    let e = inverse_coeffs(gamma, qp, phi.cols() - 1);
    Ok(psi_j_with(phi.row(j), e.coeffs()))
}

// Incremental in m, so each entry is the ascending-v sum.
fn psi_j_with(phi_row: &[f64], e: &[f64]) -> MatrixWindow {
    let n = phi_row.len();
    let mut out = MatrixWindow::lower_zeros(n);
    for m in 0..n {
        for k in 0..=m {
            let prev = if k < m { out.get(m - 1, k) } else { 0.0 };
            out.set(m, k, prev + e[m - k] * phi_row[m]);
        }
    }
    out
}

/// Window truncation of `ψ` together with a per-row bound on the
/// truncation error.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsiMatrix {
    pub matrix: MatrixWindow,
    /// `sup_k |e_k|` times the row's tail mass; zero for rows supported in the window.
    pub tail_bounds: Vec<f64>,
}

/// `ψ_jk = Σ_{v=k}^{N-1} e_{v-k} φ_jv`.
///
/// A lower-triangular Φ has every row supported inside the window, so the
/// truncation is exact. Otherwise each row must show decay: the mass in its
/// last quarter must stay below `tail_rtol · (head mass + 1)`, since the
/// inverse coefficients do not decay and only Φ can make the series converge.
pub fn psi_matrix(
    phi: &MatrixWindow,
    gamma: QReal,
    qp: &QParam,
    tail_rtol: f64,
) -> Result<PsiMatrix> {
    if !(tail_rtol >= 0.0 && tail_rtol.is_finite()) {
        return Err(Error::invalid(
            "tail_rtol",
            format!("must be finite and ≥ 0, got {tail_rtol}"),
        ));
    }
    let e = inverse_coeffs(gamma, qp, phi.cols() - 1);
    psi_with(phi, e.coeffs(), tail_rtol)
}

fn psi_with(phi: &MatrixWindow, e: &[f64], tail_rtol: f64) -> Result<PsiMatrix> {
    let (rows, n) = (phi.rows(), phi.cols());
    let e_max = e.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tail_start = n - n.div_ceil(4);
    let mut tail_bounds = vec![0.0; rows];
    if !phi.triangular() {
        for (j, bound) in tail_bounds.iter_mut().enumerate() {
            let row = phi.row(j);
            let head: f64 = row[..tail_start].iter().map(|v| v.abs()).sum();
            let tail: f64 = row[tail_start..].iter().map(|v| v.abs()).sum();
            let allowed = tail_rtol * (head + 1.0);
            if tail > allowed {
                return Err(Error::Tail {
                    row: j,
                    tail,
                    allowed,
                });
            }
            *bound = e_max * tail;
        }
    }
    let matrix = MatrixWindow::from_fn(rows, n, |j, k| {
        let row = phi.row(j);
        (k..n).fold(0.0, |acc, v| acc + e[v - k] * row[v])
    });
    Ok(PsiMatrix {
        matrix,
        tail_bounds,
    })
}

/// Φ together with its ψ matrix, sharing one `(γ, q)`.
#[derive(Debug, Clone)]
pub struct PsiFamily {
    phi: MatrixWindow,
    gamma: QReal,
    qp: QParam,
    e: Vec<f64>,
    psi: PsiMatrix,
}

impl PsiFamily {
    pub fn new(phi: MatrixWindow, gamma: QReal, qp: &QParam, tail_rtol: f64) -> Result<Self> {
        let psi = psi_matrix(&phi, gamma, qp, tail_rtol)?;
        let e = inverse_coeffs(gamma, qp, phi.cols() - 1).coeffs().to_vec();
        Ok(PsiFamily {
            phi,
            gamma,
            qp: *qp,
            e,
            psi,
        })
    }

    pub fn phi(&self) -> &MatrixWindow {
        &self.phi
    }

    pub fn gamma(&self) -> QReal {
        self.gamma
    }

    pub fn qparam(&self) -> &QParam {
        &self.qp
    }

    pub fn psi(&self) -> &PsiMatrix {
        &self.psi
    }

    pub fn psi_j(&self, j: usize) -> Result<MatrixWindow> {
        if j >= self.phi.rows() {
            return Err(Error::Index {
                name: "j",
                index: j,
                bound: self.phi.rows(),
            });
        }
        Ok(psi_j_with(self.phi.row(j), &self.e))
    }
}

/// `max_{j,m} |Σ_{k≤m} φ_jk g_k − Σ_{k≤m} ψ^(j)_{mk} h_k|` with `h = ∇^(γ)_q g`.
pub fn thm41_consistency(
    phi: &MatrixWindow,
    g: &SeqWindow,
    gamma: QReal,
    qp: &QParam,
) -> Result<f64> {
    if g.len() != phi.cols() {
        return Err(Error::invalid(
            "g",
            format!(
                "sequence has {} entries but Φ has {} columns",
                g.len(),
                phi.cols()
            ),
        ));
    }
    let h = apply_forward(g, gamma, qp);
    let e = inverse_coeffs(gamma, qp, phi.cols() - 1);
    let mut worst = 0.0f64;
    for j in 0..phi.rows() {
        let psi_j = psi_j_with(phi.row(j), e.coeffs());
        let mut lhs = 0.0;
        for m in 0..phi.cols() {
            lhs += phi.get(j, m) * g.values()[m];
            let rhs: f64 = psi_j.row(m)[..=m]
                .iter()
                .zip(h.values())
                .map(|(a, b)| a * b)
                .sum();
            worst = worst.max((lhs - rhs).abs());
        }
    }
    Ok(worst)
}

fn validate_windows(windows: &[usize], bound: usize) -> Result<()> {
    if windows.is_empty() {
        return Err(Error::invalid("window", "at least one window is required"));
    }
    if windows[0] == 0 || windows.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid(
            "window",
            "windows must be positive and strictly increasing",
        ));
    }
    let last = windows[windows.len() - 1];
    if last > bound {
        return Err(Error::invalid(
            "window",
            format!("window {last} exceeds the available size {bound}"),
        ));
    }
    Ok(())
}

fn spread(values: impl Iterator<Item = f64>) -> f64 {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if lo.is_finite() {
        hi - lo
    } else {
        0.0
    }
}

// Per-row quantity of an MT condition on the leading n×n block of ψ^(j).
fn mt_row_quantity(
    cond: ConditionId,
    psi_j: &MatrixWindow,
    psi_row_mass: f64,
    exponent: f64,
    n: usize,
) -> f64 {
    let settled = n.saturating_sub(tail_rows(n));
    let tail = settled..n;
    match cond {
        ConditionId::Mt1 => (0..settled)
            .map(|k| spread(tail.clone().map(|m| psi_j.get(m, k))))
            .fold(0.0, f64::max),
        ConditionId::Mt2 => (0..n)
            .flat_map(|m| psi_j.row(m)[..=m].iter().map(|v| v.abs()))
            .fold(0.0, f64::max),
        ConditionId::Mt3 => (0..n)
            .map(|m| {
                psi_j.row(m)[..=m]
                    .iter()
                    .fold(0.0, |acc, v| acc + v.abs().powf(exponent))
            })
            .fold(0.0, f64::max),
        ConditionId::Mt4 => spread(tail.map(|m| psi_j.row(m)[..=m].iter().sum::<f64>())),
        ConditionId::Mt5 => tail
            .map(|m| {
                let mass: f64 = psi_j.row(m)[..=m].iter().map(|v| v.abs()).sum();
                (mass - psi_row_mass).abs()
            })
            .fold(0.0, f64::max),
        _ => unreachable!("only MT1..MT5 are evaluated per row"),
    }
}

/// Evaluates one of the Ψ-family conditions over the leading windows.
///
/// Limit conditions (`MT1`, `MT4`, `MT5`) are read as Cauchy-tail estimates
/// over the last quarter of each window and only for rows `j` that end
/// before that tail; `MT_ADD` tracks the absolute mass of the window's last
/// ψ row, which must vanish.
pub fn mtc_condition(
    family: &PsiFamily,
    cond: ConditionId,
    p: PExponent,
    windows: &[usize],
) -> Result<ConditionReport> {
    let phi = &family.phi;
    let psi = &family.psi.matrix;
    validate_windows(windows, phi.rows().min(phi.cols()))?;

    let exponent = match cond {
        ConditionId::Mt3 => p.conjugate().ok_or_else(|| Error::InvalidCondition {
            condition: cond,
            reason: format!("requires 1 < p < ∞, got p = {p}"),
        })?,
        ConditionId::MtAdd
        | ConditionId::Mt1
        | ConditionId::Mt2
        | ConditionId::Mt4
        | ConditionId::Mt5 => 1.0,
        other => {
            return Err(Error::InvalidCondition {
                condition: other,
                reason: "not a Ψ-family condition".into(),
            })
        }
    };
    let vanishing = matches!(
        cond,
        ConditionId::MtAdd | ConditionId::Mt1 | ConditionId::Mt4 | ConditionId::Mt5
    );

    // (window, value, worst row), None where the window has no settled part
    let mut per_window: Vec<Option<(f64, usize)>> = vec![None; windows.len()];
    if cond == ConditionId::MtAdd {
        for (slot, &n) in per_window.iter_mut().zip(windows) {
            let mass: f64 = psi.row(n - 1).iter().map(|v| v.abs()).sum();
            *slot = Some((mass, n - 1));
        }
    } else {
        let max_n = windows[windows.len() - 1];
        for j in 0..phi.rows().min(max_n) {
            let psi_j = psi_j_with(phi.row(j), &family.e);
            let row_mass: f64 = psi.row(j).iter().map(|v| v.abs()).sum();
            for (slot, &n) in per_window.iter_mut().zip(windows) {
                let rows_in = if vanishing {
                    n.saturating_sub(tail_rows(n))
                } else {
                    n
                };
                if j >= rows_in {
                    continue;
                }
                let value = mt_row_quantity(cond, &psi_j, row_mass, exponent, n);
                match slot {
                    Some((best, _)) if value <= *best => {}
                    _ => *slot = Some((value, j)),
                }
            }
        }
    }

    let mut values = Vec::new();
    let mut detail = None;
    for (&n, slot) in windows.iter().zip(&per_window) {
        if let Some((value, row)) = slot {
            values.push(WindowValue {
                window: n,
                value: *value,
            });
            detail = Some(Witness::Row(*row));
        }
    }
    if values.is_empty() {
        return Err(Error::invalid(
            "window",
            format!("condition {cond} needs a window of at least 3 rows for a tail estimate"),
        ));
    }
    let trend = if vanishing {
        Trend::Vanishing
    } else {
        Trend::Bounded
    };
    let raw: Vec<f64> = values.iter().map(|v| v.value).collect();
    let verdict = classify(trend, &raw, psi.max_abs());
    Ok(ConditionReport {
        condition: cond,
        values,
        verdict,
        detail,
    })
}

/// Source spaces of the class table: the operator domains of `ℓ_1`, `ℓ_p`, `ℓ_∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    L1Domain,
    LpDomain,
    LinfDomain,
}

/// The four classical targets the class table is indexed by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseTarget {
    L1,
    C0,
    C,
    Linf,
}

/// Target of a class query. `Bs`, `Cs`, `Cs0` are answered through the
/// partial-sum matrix Σ and `QCesaro` through the q-Cesàro composite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    L1,
    C0,
    C,
    Linf,
    Bs,
    Cs,
    Cs0,
    QCesaro(BaseTarget),
}

/// Which matrix the class-table conditions were evaluated on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Operand {
    Phi,
    Sigma,
    QCesaro,
}

impl Target {
    /// The class-table column and the matrix it is applied to.
    pub fn resolve(self) -> (BaseTarget, Operand) {
        match self {
            Target::L1 => (BaseTarget::L1, Operand::Phi),
            Target::C0 => (BaseTarget::C0, Operand::Phi),
            Target::C => (BaseTarget::C, Operand::Phi),
            Target::Linf => (BaseTarget::Linf, Operand::Phi),
            Target::Bs => (BaseTarget::Linf, Operand::Sigma),
            Target::Cs => (BaseTarget::C, Operand::Sigma),
            Target::Cs0 => (BaseTarget::C0, Operand::Sigma),
            Target::QCesaro(base) => (base, Operand::QCesaro),
        }
    }
}

impl FromStr for Source {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "l1-domain" => Ok(Source::L1Domain),
            "lp-domain" => Ok(Source::LpDomain),
            "linf-domain" => Ok(Source::LinfDomain),
            _ => Err(Error::invalid(
                "source",
                format!("unknown source `{s}` (expected l1-domain, lp-domain or linf-domain)"),
            )),
        }
    }
}

impl FromStr for BaseTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(BaseTarget::L1),
            "c0" => Ok(BaseTarget::C0),
            "c" => Ok(BaseTarget::C),
            "linf" => Ok(BaseTarget::Linf),
            _ => Err(Error::invalid(
                "target",
                format!("unknown target `{s}` (expected l1, c0, c or linf)"),
            )),
        }
    }
}

impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase().replace('_', "-");
        if let Some(base) = lower.strip_prefix("qcesaro-") {
            return Ok(Target::QCesaro(base.parse()?));
        }
        match lower.as_str() {
            "bs" => Ok(Target::Bs),
            "cs" => Ok(Target::Cs),
            "cs0" => Ok(Target::Cs0),
            other => Ok(match other.parse::<BaseTarget>().map_err(|_| {
                Error::invalid(
                    "target",
                    format!("unknown target `{s}` (expected l1, c0, c, linf, bs, cs, cs0 or qcesaro-<l1|c0|c|linf>)"),
                )
            })? {
                BaseTarget::L1 => Target::L1,
                BaseTarget::C0 => Target::C0,
                BaseTarget::C => Target::C,
                BaseTarget::Linf => Target::Linf,
            }),
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::L1Domain => "l1-domain",
            Source::LpDomain => "lp-domain",
            Source::LinfDomain => "linf-domain",
        })
    }
}

impl fmt::Display for BaseTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BaseTarget::L1 => "l1",
            BaseTarget::C0 => "c0",
            BaseTarget::C => "c",
            BaseTarget::Linf => "linf",
        })
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::L1 => f.write_str("l1"),
            Target::C0 => f.write_str("c0"),
            Target::C => f.write_str("c"),
            Target::Linf => f.write_str("linf"),
            Target::Bs => f.write_str("bs"),
            Target::Cs => f.write_str("cs"),
            Target::Cs0 => f.write_str("cs0"),
            Target::QCesaro(base) => write!(f, "qcesaro-{base}"),
        }
    }
}

/// Condition bundles of the class table (Φ out of a domain), rows `ℓ_1, ℓ_p, ℓ_∞` domains, columns
/// `ℓ_1, c_0, c, ℓ_∞`. The numbered items are:
///
/// | item | condition |
/// |------|-----------|
/// | 1 | MT1 ∧ MT2 |
/// | 2 | MT1 ∧ MT3 |
/// | 3 | MT1 ∧ MT5 |
/// | 4 | C3_4 on Ψ |
/// | 5 | C3_9 on Ψ |
/// | 6 | C3_2 on Ψ |
/// | 7 | C3_1 on Ψ |
/// | 8 | MT_ADD |
/// | 9 | C3_3 on Ψ |
/// | 10 | C3_5 on Ψ (exponent p′) |
/// | 11 | C3_7 on Ψ (exponent 1) |
/// | 12 | C3_8 on Ψ (exponent p′) |
/// | 13 | C3_6 on Ψ (exponent 1) |
pub const CLASS_TABLE: [[&[u8]; 4]; 3] = [
    [&[1, 11], &[1, 5, 13], &[1, 6, 13], &[1, 13]],
    [&[2, 12], &[2, 5, 10], &[2, 6, 10], &[2, 10]],
    [&[3, 4], &[3, 8], &[3, 6, 9], &[3, 7]],
];

pub fn class_table_cell(source: Source, target: BaseTarget) -> &'static [u8] {
    let row = match source {
        Source::L1Domain => 0,
        Source::LpDomain => 1,
        Source::LinfDomain => 2,
    };
    let col = match target {
        BaseTarget::L1 => 0,
        BaseTarget::C0 => 1,
        BaseTarget::C => 2,
        BaseTarget::Linf => 3,
    };
    CLASS_TABLE[row][col]
}

/// A class-membership question `Φ ∈ (source, target)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassQuery {
    pub source: Source,
    pub target: Target,
    pub p: PExponent,
    pub gamma: QReal,
    pub qp: QParam,
    /// Largest window used for the trend.
    pub window: usize,
    /// Largest row count for exhaustive subset conditions.
    pub row_limit: usize,
    pub tail_rtol: f64,
}

impl ClassQuery {
    pub fn new(
        source: Source,
        target: Target,
        p: PExponent,
        gamma: QReal,
        qp: QParam,
        window: usize,
        row_limit: usize,
    ) -> Result<Self> {
        let query = ClassQuery {
            source,
            target,
            p,
            gamma,
            qp,
            window,
            row_limit,
            tail_rtol: DEFAULT_TAIL_RTOL,
        };
        query.validate()?;
        Ok(query)
    }

    pub fn validate(&self) -> Result<()> {
        if self.source == Source::LpDomain && self.p.conjugate().is_none() {
            return Err(Error::invalid(
                "p",
                format!("the ℓ_p-domain source needs 1 < p < ∞, got p = {}", self.p),
            ));
        }
        validate_plan_sizes(self.window, self.row_limit)
    }
}

fn validate_plan_sizes(window: usize, row_limit: usize) -> Result<()> {
    if window == 0 {
        return Err(Error::invalid("window", "window must be ≥ 1"));
    }
    if row_limit == 0 {
        return Err(Error::invalid("row_limit", "row_limit must be ≥ 1"));
    }
    if row_limit > MAX_SUBSET_ROWS {
        return Err(Error::Limit {
            requested: row_limit,
            cap: MAX_SUBSET_ROWS,
        });
    }
    Ok(())
}

fn plan_for(window: usize, row_limit: usize, m: &MatrixWindow) -> WindowPlan {
    let n = window.min(m.rows()).min(m.cols());
    WindowPlan {
        windows: default_windows(n),
        row_limits: default_windows(row_limit.min(n)),
    }
}

/// One evaluated condition, tagged with the table item it belongs to.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassEntry {
    pub item: u8,
    pub report: ConditionReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassCheck {
    pub source: Source,
    pub target: Target,
    pub operand: Operand,
    /// The table cell that was dispatched.
    pub items: Vec<u8>,
    pub entries: Vec<ClassEntry>,
    pub verdict: Verdict,
}

fn combined(entries: &[ClassEntry]) -> Verdict {
    entries
        .iter()
        .fold(Verdict::BoundedOnWindow, |v, e| v.combine(e.report.verdict))
}

fn class_table_item(
    item: u8,
    family: &PsiFamily,
    p: PExponent,
    plan: &WindowPlan,
) -> Result<Vec<ConditionReport>> {
    use ConditionId::*;
    let psi = &family.psi.matrix;
    let mt = |cond| mtc_condition(family, cond, p, &plan.windows);
    let needs_conjugate = |cond| {
        p.conjugate().ok_or_else(|| Error::InvalidCondition {
            condition: cond,
            reason: format!("requires 1 < p < ∞, got p = {p}"),
        })
    };
    Ok(match item {
        1 => vec![mt(Mt1)?, mt(Mt2)?],
        2 => vec![mt(Mt1)?, mt(Mt3)?],
        3 => vec![mt(Mt1)?, mt(Mt5)?],
        4 => vec![evaluate_lemma(psi, SubsetColumnSum, 1.0, plan)?],
        5 => vec![evaluate_lemma(psi, ColumnLimitsZero, 1.0, plan)?],
        6 => vec![evaluate_lemma(psi, ColumnLimits, 1.0, plan)?],
        7 => vec![evaluate_lemma(psi, RowAbsSum, 1.0, plan)?],
        8 => vec![mt(MtAdd)?],
        9 => vec![evaluate_lemma(psi, AbsSumInterchange, 1.0, plan)?],
        10 => vec![evaluate_lemma(
            psi,
            RowConjugatePower,
            needs_conjugate(RowConjugatePower)?,
            plan,
        )?],
        11 => vec![evaluate_lemma(psi, SubsetEntryPower, 1.0, plan)?],
        12 => vec![evaluate_lemma(
            psi,
            SubsetConjugatePower,
            needs_conjugate(SubsetConjugatePower)?,
            plan,
        )?],
        13 => vec![evaluate_lemma(psi, EntryPower, 1.0, plan)?],
        other => {
            return Err(Error::invalid(
                "item",
                format!("the class table has no item {other}"),
            ))
        }
    })
}

/// Dispatches the class-table bundle for `query` and evaluates it on the Ψ
/// family of Φ (or of ΣΦ / C(q)Φ for the derived targets).
///
/// Fails with [`Error::Tail`] when a row of the operand does not decay
/// inside the window, since ψ cannot then be truncated honestly.
pub fn class_check(query: &ClassQuery, phi: &MatrixWindow) -> Result<ClassCheck> {
    query.validate()?;
    let (base, operand) = query.target.resolve();
    let matrix = match operand {
        Operand::Phi => phi.clone(),
        Operand::Sigma => sigma_matrix(phi),
        Operand::QCesaro => cesaro_composite(phi, &query.qp),
    };
    let plan = plan_for(query.window, query.row_limit, &matrix);
    let family = PsiFamily::new(matrix, query.gamma, &query.qp, query.tail_rtol)?;
    let items = class_table_cell(query.source, base);
    let mut entries = Vec::new();
    for &item in items {
        for report in class_table_item(item, &family, query.p, &plan)? {
            entries.push(ClassEntry { item, report });
        }
    }
    Ok(ClassCheck {
        source: query.source,
        target: query.target,
        operand,
        items: items.to_vec(),
        verdict: combined(&entries),
        entries,
    })
}

/// `υ_jk = Σ_{v≤j} c_{j-v} φ_vk`: the forward operator applied down each
/// column of Φ.
pub fn upsilon_matrix(phi: &MatrixWindow, gamma: QReal, qp: &QParam) -> MatrixWindow {
    let columns: Vec<Vec<f64>> = (0..phi.cols())
        .map(|k| {
            let col =
                SeqWindow::new(phi.column(k)).expect("matrix windows are nonempty and finite");
            apply_forward(&col, gamma, qp).into_values()
        })
        .collect();
    MatrixWindow::from_fn(phi.rows(), phi.cols(), |j, k| columns[k][j])
}

/// `A′` (row sums of `|υ_jk|^p`) and `B′` (column-subset sums, exhaustive
/// over the first `row_limit` columns).
pub fn conditions_a_b_prime(
    upsilon: &MatrixWindow,
    p: PExponent,
    row_limit: usize,
) -> Result<Vec<ConditionReport>> {
    let PExponent::Finite(exponent) = p else {
        return Err(Error::InvalidCondition {
            condition: ConditionId::APrime,
            reason: "requires a finite p".into(),
        });
    };
    if row_limit > MAX_SUBSET_ROWS {
        return Err(Error::Limit {
            requested: row_limit,
            cap: MAX_SUBSET_ROWS,
        });
    }
    if row_limit == 0 || row_limit > upsilon.cols() {
        return Err(Error::invalid(
            "row_limit",
            format!(
                "row_limit must lie in 1..={}, got {row_limit}",
                upsilon.cols().min(MAX_SUBSET_ROWS)
            ),
        ));
    }
    let n = upsilon.rows().min(upsilon.cols());
    let plan = WindowPlan {
        windows: default_windows(n),
        row_limits: Vec::new(),
    };
    let a_prime = evaluate_lemma(upsilon, ConditionId::RowConjugatePower, exponent, &plan)?
        .relabel(ConditionId::APrime);

    // columns of Υ become rows; every row of Υ contributes to the sum
    let transposed = upsilon.transpose();
    let mut values = Vec::new();
    let mut detail = None;
    for r in default_windows(row_limit) {
        let block = transposed.leading_block(r, transposed.cols());
        let s = subset_sup(&block, exponent, SubsetMode::SumOverCols, r)?;
        values.push(WindowValue {
            window: r,
            value: s.value,
        });
        detail = Some(Witness::Subset(s.witness));
    }
    let raw: Vec<f64> = values.iter().map(|v| v.value).collect();
    let b_prime = ConditionReport {
        condition: ConditionId::BPrime,
        verdict: classify(Trend::Bounded, &raw, upsilon.max_abs()),
        values,
        detail,
    };
    Ok(vec![a_prime, b_prime])
}

/// Sequence spaces that are sources in the into-domain table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeqSource {
    L1,
    C0,
    C,
    Linf,
}

/// Operator domains that are targets in the into-domain table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainTarget {
    LpDomain,
    LinfDomain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DomainItem {
    APrime,
    BPrime,
    /// A numbered class-table item applied to Υ.
    Item(u8),
}

/// Condition bundles of the into-domain table (Φ into a domain), rows `ℓ_1, c_0, c, ℓ_∞`, columns the
/// `ℓ_p` and `ℓ_∞` domains. Each cell is evaluated on Υ.
pub const INTO_DOMAIN_TABLE: [[DomainItem; 2]; 4] = [
    [DomainItem::APrime, DomainItem::Item(13)],
    [DomainItem::BPrime, DomainItem::Item(7)],
    [DomainItem::BPrime, DomainItem::Item(7)],
    [DomainItem::BPrime, DomainItem::Item(7)],
];

pub fn into_domain_cell(source: SeqSource, target: DomainTarget) -> DomainItem {
    let row = match source {
        SeqSource::L1 => 0,
        SeqSource::C0 => 1,
        SeqSource::C => 2,
        SeqSource::Linf => 3,
    };
    let col = match target {
        DomainTarget::LpDomain => 0,
        DomainTarget::LinfDomain => 1,
    };
    INTO_DOMAIN_TABLE[row][col]
}

impl FromStr for SeqSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(SeqSource::L1),
            "c0" => Ok(SeqSource::C0),
            "c" => Ok(SeqSource::C),
            "linf" => Ok(SeqSource::Linf),
            _ => Err(Error::invalid(
                "source",
                format!("unknown source `{s}` (expected l1, c0, c or linf)"),
            )),
        }
    }
}

impl FromStr for DomainTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "lp-domain" => Ok(DomainTarget::LpDomain),
            "linf-domain" => Ok(DomainTarget::LinfDomain),
            _ => Err(Error::invalid(
                "target",
                format!("unknown target `{s}` (expected lp-domain or linf-domain)"),
            )),
        }
    }
}

/// A class-membership question `Φ ∈ (source, target-domain)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainQuery {
    pub source: SeqSource,
    pub target: DomainTarget,
    pub p: PExponent,
    pub gamma: QReal,
    pub qp: QParam,
    pub window: usize,
    pub row_limit: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DomainCheck {
    pub source: SeqSource,
    pub target: DomainTarget,
    pub item: DomainItem,
    pub reports: Vec<ConditionReport>,
    pub verdict: Verdict,
}

/// Dispatches the into-domain cell for `query` and evaluates it on `Υ`.
pub fn class_check_into_domain(query: &DomainQuery, phi: &MatrixWindow) -> Result<DomainCheck> {
    validate_plan_sizes(query.window, query.row_limit)?;
    if query.target == DomainTarget::LpDomain && !matches!(query.p, PExponent::Finite(_)) {
        return Err(Error::invalid(
            "p",
            "the ℓ_p-domain target needs a finite p",
        ));
    }
    let upsilon = upsilon_matrix(phi, query.gamma, &query.qp);
    let n = query.window.min(upsilon.rows()).min(upsilon.cols());
    let windowed = upsilon.leading_block(n, n);
    let item = into_domain_cell(query.source, query.target);
    let plan = plan_for(n, query.row_limit, &windowed);
    let reports = match item {
        DomainItem::APrime | DomainItem::BPrime => {
            let both = conditions_a_b_prime(&windowed, query.p, query.row_limit.min(n))?;
            let wanted = if item == DomainItem::APrime {
                ConditionId::APrime
            } else {
                ConditionId::BPrime
            };
            both.into_iter().filter(|r| r.condition == wanted).collect()
        }
        DomainItem::Item(7) => vec![evaluate_lemma(
            &windowed,
            ConditionId::RowAbsSum,
            1.0,
            &plan,
        )?],
        DomainItem::Item(13) => vec![evaluate_lemma(
            &windowed,
            ConditionId::EntryPower,
            1.0,
            &plan,
        )?],
        DomainItem::Item(other) => unreachable!("the into-domain table holds no item {other}"),
    };
    let verdict = reports
        .iter()
        .fold(Verdict::BoundedOnWindow, |v, r| v.combine(r.verdict));
    Ok(DomainCheck {
        source: query.source,
        target: query.target,
        item,
        reports,
        verdict,
    })
}

/// `σ_jk = Σ_{v≤j} φ_vk`.
pub fn sigma_matrix(phi: &MatrixWindow) -> MatrixWindow {
    let mut acc = vec![0.0; phi.cols()];
    let mut rows = Vec::with_capacity(phi.rows());
    for j in 0..phi.rows() {
        for (a, x) in acc.iter_mut().zip(phi.row(j)) {
            *a += x;
        }
        rows.push(acc.clone());
    }
    MatrixWindow::from_rows(rows).expect("partial sums of a finite window are finite")
}

/// Row `j` of the q-Cesàro weights: `q^v / [j+1]_q` for `v ≤ j`.
pub fn cesaro_weights(j: usize, qp: &QParam) -> Vec<f64> {
    let denom = bracket(j as f64 + 1.0, qp);
    (0..=j).map(|v| qp.pow(v as f64) / denom).collect()
}

/// `c^q_jk = Σ_{v≤j} (q^v / [j+1]_q) φ_vk`.
pub fn cesaro_composite(phi: &MatrixWindow, qp: &QParam) -> MatrixWindow {
    let weights: Vec<Vec<f64>> = (0..phi.rows()).map(|j| cesaro_weights(j, qp)).collect();
    MatrixWindow::from_fn(phi.rows(), phi.cols(), |j, k| {
        weights[j]
            .iter()
            .enumerate()
            .fold(0.0, |acc, (v, w)| acc + w * phi.get(v, k))
    })
}
