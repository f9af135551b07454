//! Norms on the matrix-domain spaces `ℓ_p(∇^(γ)_q)` and `ℓ_∞(∇^(γ)_q)`
//! and their Schauder basis.
//!
//! A sequence belongs to the domain space when its forward transform lies
//! in `ℓ_p`; its norm is the `ℓ_p` norm of that transform. The basis
//! vectors are the columns of the inverse operator.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::condition::default_windows;
use crate::error::{Error, Result};
use crate::fracdiff::{apply_forward, inverse_coeffs, SeqWindow};
use crate::qcore::{QParam, QReal};

/// Summability exponent `p ∈ (0, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PExponent {
    Finite(f64),
    Infinity,
}

impl PExponent {
    pub fn new(p: f64) -> Result<Self> {
        if p == f64::INFINITY {
            Ok(PExponent::Infinity)
        } else if p > 0.0 && p.is_finite() {
            Ok(PExponent::Finite(p))
        } else {
            Err(Error::invalid(
                "p",
                format!("p must lie in (0, ∞], got {p}"),
            ))
        }
    }

    /// `p' = p / (p - 1)`, defined for `1 < p < ∞` only.
    pub fn conjugate(self) -> Option<f64> {
        match self {
            PExponent::Finite(p) if p > 1.0 => Some(p / (p - 1.0)),
            _ => None,
        }
    }

    /// `0 < p ≤ 1`.
    pub fn is_at_most_one(self) -> bool {
        matches!(self, PExponent::Finite(p) if p <= 1.0)
    }
}

impl std::str::FromStr for PExponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(PExponent::Infinity),
            other => other
                .parse::<f64>()
                .map_err(|_| Error::invalid("p", format!("cannot parse `{s}` as an exponent")))
                .and_then(PExponent::new),
        }
    }
}

impl fmt::Display for PExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PExponent::Finite(p) => p.fmt(f),
            PExponent::Infinity => f.write_str("inf"),
        }
    }
}

impl Serialize for PExponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            PExponent::Finite(p) => s.serialize_f64(*p),
            PExponent::Infinity => s.serialize_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartialNorm {
    pub window: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormReport {
    pub value: f64,
    pub p: PExponent,
    pub window: usize,
    pub partials: Vec<PartialNorm>,
}

/// `(Σ|h_j|^p)^{1/p}` for `p ≥ 1`, the p-norm `Σ|h_j|^p` for `0 < p < 1`,
/// `max |h_j|` for `p = ∞`.
pub fn lp_norm(h: &SeqWindow, p: PExponent) -> f64 {
    lp_norm_slice(h.values(), p)
}

fn lp_norm_slice(h: &[f64], p: PExponent) -> f64 {
    match p {
        PExponent::Infinity => h.iter().fold(0.0, |m, v| m.max(v.abs())),
        PExponent::Finite(p) => {
            let s: f64 = h.iter().map(|v| v.abs().powf(p)).sum();
            if p >= 1.0 {
                s.powf(1.0 / p)
            } else {
                s
            }
        }
    }
}

fn partial_norms(h: &[f64], p: PExponent, checkpoints: &[usize]) -> Vec<PartialNorm> {
    checkpoints
        .iter()
        .map(|&n| PartialNorm {
            window: n,
            value: lp_norm_slice(&h[..n], p),
        })
        .collect()
}

/// Norm of `g` in the domain space: the `ℓ_p` norm of its forward transform.
/// Partials are taken at powers of two up to the window length.
pub fn domain_norm(g: &SeqWindow, gamma: QReal, qp: &QParam, p: PExponent) -> NormReport {
    let h = apply_forward(g, gamma, qp);
    NormReport {
        value: lp_norm(&h, p),
        p,
        window: g.len(),
        partials: partial_norms(h.values(), p, &default_windows(g.len())),
    }
}

/// `ζ^(k)`: zero before index `k`, then the inverse coefficients `e_{j-k}`.
pub fn schauder_basis_vector(k: usize, gamma: QReal, qp: &QParam, n: usize) -> Result<SeqWindow> {
    if k >= n {
        return Err(Error::Index {
            name: "k",
            index: k,
            bound: n,
        });
    }
    let e = inverse_coeffs(gamma, qp, n - 1 - k);
    let mut values = vec![0.0; n];
    values[k..].copy_from_slice(e.coeffs());
    SeqWindow::new(values)
}

/// `Σ_k h_k ζ^(k)`, accumulated basis vector by basis vector.
pub fn schauder_reconstruct(h: &SeqWindow, gamma: QReal, qp: &QParam) -> SeqWindow {
    let n = h.len();
    let e = inverse_coeffs(gamma, qp, n - 1);
    let mut g = vec![0.0; n];
    for (k, &hk) in h.values().iter().enumerate() {
        if hk == 0.0 {
            continue;
        }
        // ζ^(k)_j = e_{j-k}
        for (gj, ej) in g[k..].iter_mut().zip(e.coeffs()) {
            *gj += hk * ej;
        }
    }
    SeqWindow::new(g).expect("finite inputs give finite sums")
}

/// Growth profile of the domain norm over explicit checkpoints.
///
/// A finite window cannot decide membership; the report only exposes the
/// partial norms so the caller can judge the trend.
pub fn membership_diagnostic(
    g: &SeqWindow,
    gamma: QReal,
    qp: &QParam,
    p: PExponent,
    checkpoints: &[usize],
) -> Result<NormReport> {
    if checkpoints.is_empty() {
        return Err(Error::invalid(
            "checkpoints",
            "at least one checkpoint is required",
        ));
    }
    if checkpoints[0] == 0 || checkpoints.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid(
            "checkpoints",
            "checkpoints must be positive and strictly increasing",
        ));
    }
    if let Some(&last) = checkpoints.last() {
        if last > g.len() {
            return Err(Error::invalid(
                "checkpoints",
                format!("checkpoint {last} exceeds the window length {}", g.len()),
            ));
        }
    }
    let h = apply_forward(g, gamma, qp);
    Ok(NormReport {
        value: lp_norm(&h, p),
        p,
        window: g.len(),
        partials: partial_norms(h.values(), p, checkpoints),
    })
}
