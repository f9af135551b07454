//! The fractional q-difference operator and its inverse as lower-triangular
//! Toeplitz operators.
//!
//! The forward operator of order γ has symbol coefficients
//!
//! ```text
//! c_k = (-1)^k q^{k(k-1)/2} Γ_q(γ+1) / ([k]_q! Γ_q(γ-k+1))
//! ```
//!
//! and the inverse operator has
//!
//! ```text
//! e_k = (-1)^k Γ_q(1-γ) / ([k]_q! Γ_q(1-γ-k)) = [γ]_q [γ+1]_q ... [γ+k-1]_q / [k]_q!
//! ```
//!
//! Note the inverse carries no `q^{k(k-1)/2}` factor. Both streams are
//! generated by multiplicative recurrences rather than gamma quotients, so
//! integer orders truncate exactly.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::MatrixWindow;
use crate::qcore::{bracket, QParam, QReal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoeffKind {
    Forward,
    Inverse,
    /// Convolution of two streams.
    Composite,
}

/// Finite prefix `coeffs[0..=K]` of an operator's Toeplitz symbol.
///
/// `gamma` is the order of the operator. For a composite stream it holds
/// the net order: forward orders count positively, inverse orders negatively.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoeffStream {
    gamma: QReal,
    #[serde(skip)]
    qp: QParam,
    kind: CoeffKind,
    coeffs: Vec<f64>,
}

impl CoeffStream {
    pub fn gamma(&self) -> QReal {
        self.gamma
    }

    pub fn qparam(&self) -> &QParam {
        &self.qp
    }

    pub fn kind(&self) -> CoeffKind {
        self.kind
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Truncation index `K`; the stream holds `K + 1` coefficients.
    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    fn signed_order(&self) -> f64 {
        match self.kind {
            CoeffKind::Inverse => -self.gamma.value(),
            _ => self.gamma.value(),
        }
    }

    /// Applies the operator to a window: `out_j = Σ_{k≤j} coeffs[j-k] g_k`.
    pub fn apply(&self, g: &SeqWindow) -> Result<SeqWindow> {
        let n = g.len();
        if self.coeffs.len() < n {
            return Err(Error::invalid(
                "window",
                format!(
                    "stream holds {} coefficients but the window has {n} entries",
                    self.coeffs.len()
                ),
            ));
        }
        let values = (0..n)
            .map(|j| {
                (0..=j)
                    .map(|k| self.coeffs[j - k] * g.values[k])
                    .sum::<f64>()
            })
            .collect();
        Ok(SeqWindow { values })
    }

    /// Dense `n × n` lower-triangular Toeplitz window `d_jk = coeffs[j-k]`.
    pub fn toeplitz_matrix(&self, n: usize) -> Result<MatrixWindow> {
        if self.coeffs.len() < n {
            return Err(Error::invalid(
                "window",
                format!("stream holds {} coefficients, need {n}", self.coeffs.len()),
            ));
        }
        let mut m = MatrixWindow::lower_zeros(n);
        for j in 0..n {
            for k in 0..=j {
                m.set(j, k, self.coeffs[j - k]);
            }
        }
        Ok(m)
    }
}

/// A finite window `g_0..g_{N-1}` of a sequence; entries at negative
/// indices are implicitly zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct SeqWindow {
    values: Vec<f64>,
}

impl SeqWindow {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("window", "window must be ≥ 1"));
        }
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(
                "window",
                format!("entry {j} is not finite ({})", values[j]),
            ));
        }
        Ok(SeqWindow { values })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![0.0; n])
    }

    /// Unit vector with a one at index `k`.
    pub fn impulse(k: usize, n: usize) -> Result<Self> {
        if k >= n {
            return Err(Error::Index {
                name: "k",
                index: k,
                bound: n,
            });
        }
        let mut values = vec![0.0; n];
        values[k] = 1.0;
        Self::new(values)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; windows hold at least one entry.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Value at index `j`, zero for negative indices and past the window.
    pub fn at(&self, j: isize) -> f64 {
        if j < 0 {
            0.0
        } else {
            self.values.get(j as usize).copied().unwrap_or(0.0)
        }
    }

    /// First `n` entries.
    pub fn prefix(&self, n: usize) -> Result<SeqWindow> {
        SeqWindow::new(self.values[..n.min(self.len())].to_vec())
    }
}

// Normalizes -0.0 so printed streams never show a signed zero.
fn unsign_zero(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

/// Coefficients `c_0..c_K` of the forward operator of order `gamma`, from
/// `c_{k+1} = -c_k q^k [γ-k]_q / [k+1]_q`.
pub fn forward_coeffs(gamma: QReal, qp: &QParam, k_max: usize) -> CoeffStream {
    let g = gamma.value();
    let mut coeffs = Vec::with_capacity(k_max + 1);
    coeffs.push(1.0);
    for k in 0..k_max {
        let kf = k as f64;
        let next = -coeffs[k] * qp.pow(kf) * bracket(g - kf, qp) / bracket(kf + 1.0, qp);
        coeffs.push(unsign_zero(next));
    }
    CoeffStream {
        gamma,
        qp: *qp,
        kind: CoeffKind::Forward,
        coeffs,
    }
}

/// Coefficients `e_0..e_K` of the inverse operator, from
/// `e_{k+1} = e_k [γ+k]_q / [k+1]_q`.
pub fn inverse_coeffs(gamma: QReal, qp: &QParam, k_max: usize) -> CoeffStream {
    let g = gamma.value();
    let mut coeffs = Vec::with_capacity(k_max + 1);
    coeffs.push(1.0);
    for k in 0..k_max {
        let kf = k as f64;
        let next = coeffs[k] * bracket(g + kf, qp) / bracket(kf + 1.0, qp);
        coeffs.push(unsign_zero(next));
    }
    CoeffStream {
        gamma,
        qp: *qp,
        kind: CoeffKind::Inverse,
        coeffs,
    }
}

pub fn apply_forward(g: &SeqWindow, gamma: QReal, qp: &QParam) -> SeqWindow {
    forward_coeffs(gamma, qp, g.len() - 1)
        .apply(g)
        .expect("stream sized to the window")
}

pub fn apply_inverse(h: &SeqWindow, gamma: QReal, qp: &QParam) -> SeqWindow {
    inverse_coeffs(gamma, qp, h.len() - 1)
        .apply(h)
        .expect("stream sized to the window")
}

/// Cauchy product of two symbols, truncated to the shorter stream.
pub fn compose_coeffs(a: &CoeffStream, b: &CoeffStream) -> Result<CoeffStream> {
    if a.qp.q() != b.qp.q() {
        return Err(Error::MismatchedParameter {
            name: "q",
            left: a.qp.q(),
            right: b.qp.q(),
        });
    }
    let len = a.coeffs.len().min(b.coeffs.len());
    let coeffs = (0..len)
        .map(|k| unsign_zero((0..=k).map(|i| a.coeffs[i] * b.coeffs[k - i]).sum::<f64>()))
        .collect();
    let order = a.signed_order() + b.signed_order();
    Ok(CoeffStream {
        gamma: QReal::new(order)?,
        qp: a.qp,
        kind: CoeffKind::Composite,
        coeffs,
    })
}

fn max_delta_residual(stream: &CoeffStream) -> f64 {
    stream
        .coeffs
        .iter()
        .enumerate()
        .map(|(k, &v)| if k == 0 { (v - 1.0).abs() } else { v.abs() })
        .fold(0.0, f64::max)
}

/// `max_k |(c∗e)_k - δ_k0|` over a window of `n` lags, taking the worse of
/// the two composition orders.
pub fn verify_inverse(gamma: QReal, qp: &QParam, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("window", "window must be ≥ 1"));
    }
    let c = forward_coeffs(gamma, qp, n - 1);
    let e = inverse_coeffs(gamma, qp, n - 1);
    let ce = compose_coeffs(&c, &e)?;
    let ec = compose_coeffs(&e, &c)?;
    Ok(max_delta_residual(&ce).max(max_delta_residual(&ec)))
}

/// `max_{k<n} |(c^μ ∗ c^ν)_k - c^{μ+ν}_k|`: how far the composition of two
/// forward operators is from the forward operator of the summed order.
pub fn semigroup_defect(mu: QReal, nu: QReal, qp: &QParam, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::invalid(
            "window",
            format!("window must be ≥ 2, got {n}"),
        ));
    }
    let composed = compose_coeffs(
        &forward_coeffs(mu, qp, n - 1),
        &forward_coeffs(nu, qp, n - 1),
    )?;
    let direct = forward_coeffs(QReal::new(mu.value() + nu.value())?, qp, n - 1);
    Ok(composed
        .coeffs
        .iter()
        .zip(&direct.coeffs)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{q_binomial, q_factorial, q_gamma_ratio};

    fn r(v: f64) -> QReal {
        QReal::new(v).unwrap()
    }

    fn qp(q: f64) -> QParam {
        QParam::new(q).unwrap()
    }

    fn w(v: &[f64]) -> SeqWindow {
        SeqWindow::new(v.to_vec()).unwrap()
    }

    #[test]
    fn forward_examples() {
        let one = forward_coeffs(r(1.0), &qp(0.37), 4);
        assert_eq!(one.coeffs(), &[1.0, -1.0, 0.0, 0.0, 0.0]);

        let two = forward_coeffs(r(2.0), &qp(0.5), 4);
        assert_eq!(two.coeffs(), &[1.0, -1.5, 0.5, 0.0, 0.0]);

        let zero = forward_coeffs(r(0.0), &qp(0.5), 3);
        assert_eq!(zero.coeffs(), &[1.0, 0.0, 0.0, 0.0]);

        let half = forward_coeffs(r(0.5), &qp(0.25), 1);
        assert!((half.coeffs()[1] + 2.0 / 3.0).abs() < 1e-15);
        // cross-check against the gamma-ratio form of c_1
        let c1 = -q_gamma_ratio(r(1.5), r(0.5), &qp(0.25)).unwrap();
        assert!((half.coeffs()[1] - c1).abs() < 1e-12);
    }

    #[test]
    fn inverse_examples() {
        let one = inverse_coeffs(r(1.0), &qp(0.6), 5);
        assert_eq!(one.coeffs(), &[1.0; 6]);
        let zero = inverse_coeffs(r(0.0), &qp(0.6), 3);
        assert_eq!(zero.coeffs(), &[1.0, 0.0, 0.0, 0.0]);
        for (g, q) in [(0.3, 0.2), (1.7, 0.9), (2.5, 0.5)] {
            let e = inverse_coeffs(r(g), &qp(q), 1);
            assert!((e.coeffs()[1] - bracket(g, &qp(q))).abs() < 1e-15);
        }
    }

    #[test]
    fn inverse_coefficients_nonnegative() {
        for g in [0.1, 0.3, 0.5, 1.0, 1.7, 2.5, 4.0] {
            for q in [0.2, 0.5, 0.9] {
                let e = inverse_coeffs(r(g), &qp(q), 40);
                assert!(e.coeffs().iter().all(|&v| v >= 0.0));
            }
        }
    }

    #[test]
    fn recurrence_matches_closed_form() {
        for q in [0.2, 0.5, 0.9] {
            let q = qp(q);
            for g in [0.3, 0.5, 1.7, 2.5] {
                let c = forward_coeffs(r(g), &q, 25);
                for k in 0..=25u32 {
                    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                    let binom = (k as i32) * (k as i32 - 1) / 2;
                    let direct = sign
                        * q.q().powi(binom)
                        * q_gamma_ratio(r(g + 1.0), r(g - k as f64 + 1.0), &q).unwrap()
                        / q_factorial(k, &q);
                    let got = c.coeffs()[k as usize];
                    assert!(
                        (got - direct).abs() <= 1e-10 * direct.abs().max(f64::MIN_POSITIVE),
                        "g={g} k={k} got={got} direct={direct}"
                    );
                }
            }
        }
    }

    #[test]
    fn integer_orders_truncate_to_q_binomials() {
        for q in [0.2, 0.5, 0.9] {
            let q = qp(q);
            for r_ord in 1..=4u32 {
                let c = forward_coeffs(r(r_ord as f64), &q, 10);
                let nonzero = c.coeffs().iter().filter(|v| **v != 0.0).count();
                assert_eq!(nonzero as u32, r_ord + 1);
                for k in 0..=r_ord {
                    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                    let expect = sign
                        * q.q().powi((k * k.saturating_sub(1) / 2) as i32)
                        * q_binomial(r_ord, k, &q);
                    assert!((c.coeffs()[k as usize] - expect).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn forward_coefficients_decay_geometrically() {
        for (g, q) in [(0.5, 0.5), (1.7, 0.9), (2.5, 0.2), (0.3, 0.9)] {
            let q = qp(q);
            let c = forward_coeffs(r(g), &q, 60);
            let k0 = g.ceil() as usize + 2;
            let rate = q.pow(g) + 0.1;
            for k in k0 + 1..=60 {
                let bound = c.coeffs()[k0].abs() * rate.powi((k - k0) as i32);
                assert!(c.coeffs()[k].abs() <= bound, "g={g} k={k}");
            }
        }
    }

    #[test]
    fn apply_examples() {
        let q = qp(0.5);
        assert_eq!(
            apply_forward(&w(&[1.0; 4]), r(1.0), &q).values(),
            &[1.0, 0.0, 0.0, 0.0]
        );
        assert_eq!(
            apply_forward(&w(&[1.0, 0.0, 0.0, 0.0]), r(2.0), &q).values(),
            &[1.0, -1.5, 0.5, 0.0]
        );
        let zeros = SeqWindow::zeros(6).unwrap();
        assert_eq!(apply_forward(&zeros, r(0.5), &qp(0.25)), zeros);
        assert_eq!(
            apply_inverse(&w(&[1.0, 0.0, 0.0, 0.0]), r(1.0), &q).values(),
            &[1.0; 4]
        );
        assert_eq!(apply_inverse(&zeros, r(0.5), &q), zeros);
    }

    #[test]
    fn empty_window_rejected() {
        let err = SeqWindow::new(vec![]).unwrap_err();
        assert!(err.to_string().contains("window must be ≥ 1"));
    }

    #[test]
    fn compose_examples() {
        let q = qp(0.25);
        let c = forward_coeffs(r(0.5), &q, 6);
        let id = forward_coeffs(r(0.0), &q, 6);
        assert_eq!(compose_coeffs(&c, &id).unwrap().coeffs(), c.coeffs());

        let e = inverse_coeffs(r(0.5), &q, 6);
        let ce = compose_coeffs(&c, &e).unwrap();
        assert!((ce.coeffs()[0] - 1.0).abs() < 1e-10);
        assert!(ce.coeffs()[1..].iter().all(|v| v.abs() < 1e-10));

        let cc = compose_coeffs(&c, &c).unwrap();
        assert!((cc.coeffs()[1] + 4.0 / 3.0).abs() < 1e-14);

        let other = forward_coeffs(r(0.5), &qp(0.3), 6);
        assert!(matches!(
            compose_coeffs(&c, &other),
            Err(Error::MismatchedParameter { name: "q", .. })
        ));
    }

    #[test]
    fn composed_half_orders_lag_two_closed_form() {
        // (c∗c)_2 = 2 c_2 + c_1^2 = (1 - √q)^4 / ((1 + q)(1 - q)^2)
        for q in [0.1, 0.25, 0.5, 0.9] {
            let cc = compose_coeffs(
                &forward_coeffs(r(0.5), &qp(q), 4),
                &forward_coeffs(r(0.5), &qp(q), 4),
            )
            .unwrap();
            let s = f64::sqrt(q);
            let closed = (1.0 - s).powi(4) / ((1.0 + q) * (1.0 - q).powi(2));
            assert!((cc.coeffs()[2] - closed).abs() < 1e-13);
            // the expression (1 + 5q - 4√q) / ((1+q)(1-q)^2) does not match
            let alt = (1.0 + 5.0 * q - 4.0 * s) / ((1.0 + q) * (1.0 - q).powi(2));
            assert!((cc.coeffs()[2] - alt).abs() > 1e-3);
        }
    }

    #[test]
    fn verify_inverse_examples() {
        for q in [0.2, 0.5, 0.9] {
            assert_eq!(verify_inverse(r(1.0), &qp(q), 20).unwrap(), 0.0);
        }
        assert!(verify_inverse(r(0.5), &qp(0.5), 30).unwrap() <= 1e-10);
        assert!(verify_inverse(r(2.5), &qp(0.9), 30).unwrap() <= 1e-10);
        assert!(verify_inverse(r(0.5), &qp(0.5), 0).is_err());
    }

    #[test]
    fn convolution_commutes() {
        let q = qp(0.7);
        let c = forward_coeffs(r(1.3), &q, 20);
        let e = inverse_coeffs(r(1.3), &q, 20);
        let ce = compose_coeffs(&c, &e).unwrap();
        let ec = compose_coeffs(&e, &c).unwrap();
        for (a, b) in ce.coeffs().iter().zip(ec.coeffs()) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn semigroup_defect_examples() {
        let q = qp(0.25);
        assert_eq!(semigroup_defect(r(0.0), r(0.7), &q, 8).unwrap(), 0.0);
        let d = semigroup_defect(r(0.5), r(0.5), &q, 8).unwrap();
        assert!(d >= 0.333, "defect {d}");
        let d11 = semigroup_defect(r(1.0), r(1.0), &qp(0.5), 3).unwrap();
        assert!((d11 - 0.5).abs() < 1e-15);
        assert!(semigroup_defect(r(1.0), r(1.0), &q, 1).is_err());
    }

    #[test]
    fn toeplitz_window_is_shift_invariant() {
        let c = forward_coeffs(r(1.3), &qp(0.4), 11);
        let m = c.toeplitz_matrix(12).unwrap();
        assert!(m.triangular());
        for j in 0..11 {
            for k in 0..11 {
                assert_eq!(m.get(j, k), m.get(j + 1, k + 1));
            }
        }
    }

    #[test]
    fn classical_limit_matches_gruenwald_weights() {
        let q = qp(1.0 - 1e-5);
        for g in [0.5, 1.5] {
            let c = forward_coeffs(r(g), &q, 10);
            // classical weights via the standard recurrence w_k = -w_{k-1} (g - k + 1) / k
            let mut wk = 1.0;
            for k in 0..=10 {
                if k > 0 {
                    wk = -wk * (g - k as f64 + 1.0) / k as f64;
                }
                assert!((c.coeffs()[k] - wk).abs() <= 1e-3 * wk.abs(), "g={g} k={k}");
            }
        }
    }
}
