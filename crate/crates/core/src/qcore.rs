//! q-arithmetic primitives: q-integers, q-factorials, q-binomial
//! coefficients, infinite q-Pochhammer products and the q-gamma function.
//!
//! Every function here is a pure function of its arguments. Real powers
//! `q^t` are evaluated as `exp(t ln q)`; infinite products are truncated
//! once the factor `|x| q^j` drops below [`QParam::prod_tol`].

use serde::Serialize;

use crate::error::{Error, Result};

pub const DEFAULT_PROD_TOL: f64 = 1e-15;
pub const DEFAULT_POLE_EPS: f64 = 1e-12;

/// Largest |t| for which an integer-valued q-bracket is summed term by term.
const EXACT_BRACKET_LIMIT: f64 = 64.0;

/// The deformation parameter `q ∈ (0, 1)` together with the numeric
/// tolerances used by the products and pole checks built on it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QParam {
    q: f64,
    prod_tol: f64,
    eps: f64,
    #[serde(skip)]
    ln_q: f64,
}

impl QParam {
    pub fn new(q: f64) -> Result<Self> {
        Self::with_tolerances(q, DEFAULT_PROD_TOL, DEFAULT_POLE_EPS)
    }

    pub fn with_tolerances(q: f64, prod_tol: f64, eps: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::invalid(
                "q",
                format!("q must lie in (0, 1), got {q}"),
            ));
        }
        if !(prod_tol > 0.0 && prod_tol.is_finite()) {
            return Err(Error::invalid(
                "prod_tol",
                format!("product tolerance must be positive, got {prod_tol}"),
            ));
        }
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::invalid(
                "eps",
                format!("pole tolerance must be positive, got {eps}"),
            ));
        }
        Ok(QParam {
            q,
            prod_tol,
            eps,
            ln_q: (-(1.0 - q)).ln_1p(),
        })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn prod_tol(&self) -> f64 {
        self.prod_tol
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// `ln q`, computed from `1 - q` so that q close to 1 keeps its precision.
    pub fn ln_q(&self) -> f64 {
        self.ln_q
    }

    /// `q^t` for real `t`.
    pub fn pow(&self, t: f64) -> f64 {
        if t.fract() == 0.0 && t.abs() <= i32::MAX as f64 {
            self.q.powi(t as i32)
        } else {
            (t * self.ln_q).exp()
        }
    }

    /// True when `t` lies within `eps` of a non-positive integer.
    pub fn is_pole(&self, t: f64) -> bool {
        let n = t.round();
        n <= 0.0 && (t - n).abs() < self.eps
    }
}

/// A finite real argument (an order γ, a gamma argument t, ...).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct QReal(f64);

impl QReal {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() {
            Ok(QReal(value))
        } else {
            Err(Error::invalid(
                "value",
                format!("expected a finite real, got {value}"),
            ))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for QReal {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        QReal::new(value)
    }
}

impl From<i32> for QReal {
    fn from(value: i32) -> Self {
        QReal(value as f64)
    }
}

impl std::fmt::Display for QReal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// The q-integer `[t]_q = (1 - q^t) / (1 - q)`.
///
/// Integer-valued arguments of moderate size are summed as the finite
/// geometric series, so `[1]_q == 1` and `[0]_q == 0` hold exactly.
pub fn q_integer(t: QReal, qp: &QParam) -> f64 {
    bracket(t.0, qp)
}

pub(crate) fn bracket(t: f64, qp: &QParam) -> f64 {
    if t.fract() == 0.0 && t.abs() <= EXACT_BRACKET_LIMIT {
        let n = t.abs() as u32;
        let mut sum = 0.0;
        let mut term = 1.0;
        for _ in 0..n {
            sum += term;
            term *= qp.q;
        }
        if t >= 0.0 {
            sum
        } else {
            // [-n]_q = -q^{-n} [n]_q
            -sum / qp.q.powi(n as i32)
        }
    } else {
        -(t * qp.ln_q).exp_m1() / (1.0 - qp.q)
    }
}

/// `[n]_q! = [1]_q [2]_q ... [n]_q`, with `[0]_q! = 1`.
pub fn q_factorial(n: u32, qp: &QParam) -> f64 {
    (1..=n).fold(1.0, |acc, v| acc * bracket(v as f64, qp))
}

/// Gaussian binomial coefficient; zero when `nu > mu`.
pub fn q_binomial(mu: u32, nu: u32, qp: &QParam) -> f64 {
    if nu > mu {
        return 0.0;
    }
    q_factorial(mu, qp) / (q_factorial(mu - nu, qp) * q_factorial(nu, qp))
}

/// `(x; q)_∞ = ∏_{j≥0} (1 - x q^j)`, truncated at the first index `J` with
/// `|x| q^J < prod_tol` (that factor is still included).
pub fn q_pochhammer_inf(x: f64, qp: &QParam) -> f64 {
    let mut prod = 1.0;
    let mut j = 0u32;
    loop {
        let xj = x * qp.q.powi(j as i32);
        prod *= 1.0 - xj;
        if xj.abs() < qp.prod_tol || prod == 0.0 {
            return prod;
        }
        j += 1;
    }
}

/// `Γ_q(t) = (q;q)_∞ / (q^t;q)_∞ · (1-q)^{1-t}`.
pub fn q_gamma(t: QReal, qp: &QParam) -> Result<f64> {
    if qp.is_pole(t.0) {
        return Err(Error::Pole {
            name: "t",
            value: t.0,
        });
    }
    Ok(gamma_ratio_unchecked(t.0, 1.0, qp))
}

/// `Γ_q(a) / Γ_q(b)`, evaluated as a single product
/// `(q^b;q)_∞ / (q^a;q)_∞ · (1-q)^{b-a}`.
///
/// Returns exactly `0.0` when `b` is a pole (the reciprocal gamma vanishes
/// there) and fails when `a` is.
pub fn q_gamma_ratio(a: QReal, b: QReal, qp: &QParam) -> Result<f64> {
    if qp.is_pole(a.0) {
        return Err(Error::Pole {
            name: "a",
            value: a.0,
        });
    }
    if qp.is_pole(b.0) {
        return Ok(0.0);
    }
    Ok(gamma_ratio_unchecked(a.0, b.0, qp))
}

/// Log-domain product of `(1 - q^{b+j}) / (1 - q^{a+j})`.
///
/// The two Pochhammer products underflow individually when q is close to 1,
/// but their termwise ratio stays moderate.
fn gamma_ratio_unchecked(a: f64, b: f64, qp: &QParam) -> f64 {
    if a == b {
        return 1.0;
    }
    let qa = qp.pow(a);
    let qb = qp.pow(b);
    let dq = qa - qb;
    let big = qa.max(qb);

    let mut log_sum = Neumaier::default();
    let mut negative = false;
    let mut qj = 1.0;
    let mut j: u64 = 0;
    loop {
        let xa = qj * qa;
        let xb = qj * qb;
        let den = 1.0 - xa;
        let num = 1.0 - xb;
        let ratio = num / den;
        if ratio > 0.0 {
            // (1 - xb) / (1 - xa) = 1 + (xa - xb) / (1 - xa)
            log_sum.add((qj * dq / den).ln_1p());
        } else {
            negative = !negative;
            log_sum.add(ratio.abs().ln());
        }
        if qj * big < qp.prod_tol {
            break;
        }
        j += 1;
        // refresh q^j periodically so the running product does not drift
        qj = if j.is_multiple_of(32) {
            (j as f64 * qp.ln_q).exp()
        } else {
            qj * qp.q
        };
    }
    // (1 - q)^{b - a}
    let scale = (b - a) * (1.0 - qp.q).ln();
    let value = (log_sum.total() + scale).exp();
    if negative {
        -value
    } else {
        value
    }
}

#[derive(Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.comp
    }
}
