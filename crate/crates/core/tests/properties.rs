use proptest::prelude::*;

use qnabla_core::{
    apply_forward, apply_inverse, compose_coeffs, domain_norm, forward_coeffs, inverse_coeffs,
    lambda_matrix, lp_norm, omega_matrix, psi_j_matrix, psi_matrix, q_gamma, q_integer, subset_sup,
    thm41_consistency, upsilon_matrix, MatrixWindow, PExponent, QParam, QReal, SeqWindow,
    SubsetMode,
};

const GAMMAS: [f64; 6] = [0.3, 0.5, 1.0, 1.7, 2.0, 2.5];
const QS: [f64; 3] = [0.2, 0.5, 0.9];

fn r(v: f64) -> QReal {
    QReal::new(v).unwrap()
}

fn qp(q: f64) -> QParam {
    QParam::new(q).unwrap()
}

fn grid() -> impl Strategy<Value = (f64, f64)> {
    (
        prop::sample::select(GAMMAS.to_vec()),
        prop::sample::select(QS.to_vec()),
    )
}

fn window(n: usize) -> impl Strategy<Value = SeqWindow> {
    prop::collection::vec(-1.0f64..1.0, n).prop_map(|v| SeqWindow::new(v).unwrap())
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = MatrixWindow> {
    prop::collection::vec(prop::collection::vec(-1.0f64..1.0, cols), rows)
        .prop_map(|rows| MatrixWindow::from_rows(rows).unwrap())
}

fn lower_matrix(n: usize) -> impl Strategy<Value = MatrixWindow> {
    matrix(n, n).prop_map(move |m| {
        MatrixWindow::from_fn(n, n, |j, k| if k <= j { m.get(j, k) } else { 0.0 })
    })
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Independent exhaustive search: subsets visited by descending bitmask,
/// each summed directly in ascending row order.
fn reverse_enumeration(m: &MatrixWindow, exponent: f64, mode: SubsetMode, rows: usize) -> f64 {
    let mut best = 0.0f64;
    for mask in (1u32..(1 << rows)).rev() {
        let value = column_functional(
            m,
            &(0..rows).filter(|j| mask >> j & 1 == 1).collect::<Vec<_>>(),
            exponent,
            mode,
        );
        best = best.max(value);
    }
    best
}

fn column_functional(m: &MatrixWindow, subset: &[usize], exponent: f64, mode: SubsetMode) -> f64 {
    let sums: Vec<f64> = (0..m.cols())
        .map(|k| subset.iter().fold(0.0, |acc, &j| acc + m.get(j, k)))
        .collect();
    let term = |s: f64| {
        if exponent == 1.0 {
            s.abs()
        } else {
            s.abs().powf(exponent)
        }
    };
    match mode {
        SubsetMode::SumOverCols => sums.iter().fold(0.0, |acc, &s| acc + term(s)),
        SubsetMode::SupOverCols => sums.iter().fold(0.0, |acc, &s| acc.max(term(s))),
    }
}

/// Greedy ascent: add whichever row raises the functional most, until none does.
fn greedy_lower_bound(m: &MatrixWindow, exponent: f64, mode: SubsetMode, rows: usize) -> f64 {
    let mut chosen: Vec<usize> = Vec::new();
    let mut current = 0.0f64;
    loop {
        let mut step: Option<(f64, usize)> = None;
        for j in (0..rows).filter(|j| !chosen.contains(j)) {
            let mut trial = chosen.clone();
            trial.push(j);
            trial.sort_unstable();
            let v = column_functional(m, &trial, exponent, mode);
            if v > current && step.is_none_or(|(best, _)| v > best) {
                step = Some((v, j));
            }
        }
        match step {
            Some((v, j)) => {
                chosen.push(j);
                current = v;
            }
            None => return current,
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn q_gamma_recurrence(t in 0.05f64..6.0, q in 0.05f64..0.95) {
        let p = qp(q);
        let lhs = q_gamma(r(t + 1.0), &p).unwrap();
        let rhs = q_integer(r(t), &p) * q_gamma(r(t), &p).unwrap();
        prop_assert!(((lhs - rhs) / lhs).abs() <= 1e-10);
    }

    #[test]
    fn forward_operator_is_linear((g, q) in grid(), a in window(16), b in window(16), s in -3.0f64..3.0) {
        let p = qp(q);
        let combo = SeqWindow::new(a.values().iter().zip(b.values()).map(|(x, y)| s * x + y).collect()).unwrap();
        let lhs = apply_forward(&combo, r(g), &p);
        let fa = apply_forward(&a, r(g), &p);
        let fb = apply_forward(&b, r(g), &p);
        let rhs: Vec<f64> = fa.values().iter().zip(fb.values()).map(|(x, y)| s * x + y).collect();
        prop_assert!(max_diff(lhs.values(), &rhs) <= 1e-10);
    }

    #[test]
    fn inverse_round_trips((g, q) in grid(), x in window(32)) {
        let p = qp(q);
        let back = apply_inverse(&apply_forward(&x, r(g), &p), r(g), &p);
        prop_assert!(max_diff(back.values(), x.values()) <= 1e-10);
        let forth = apply_forward(&apply_inverse(&x, r(g), &p), r(g), &p);
        prop_assert!(max_diff(forth.values(), x.values()) <= 1e-10);
    }

    #[test]
    fn symbols_compose_to_identity((g, q) in grid()) {
        let p = qp(q);
        let id = compose_coeffs(&forward_coeffs(r(g), &p, 29), &inverse_coeffs(r(g), &p, 29)).unwrap();
        prop_assert!((id.coeffs()[0] - 1.0).abs() <= 1e-12);
        prop_assert!(id.coeffs()[1..].iter().all(|c| c.abs() <= 1e-10));
    }

    #[test]
    fn toeplitz_matrix_matches_apply((g, q) in grid(), x in window(12)) {
        let stream = forward_coeffs(r(g), &qp(q), 11);
        let m = stream.toeplitz_matrix(12).unwrap();
        for j in 1..12 {
            for k in 1..=j {
                prop_assert_eq!(m.get(j, k), m.get(j - 1, k - 1));
            }
        }
        let dense = m.mul_vec(x.values()).unwrap();
        prop_assert!(max_diff(&dense, stream.apply(&x).unwrap().values()) <= 1e-12);
    }

    #[test]
    fn domain_norm_is_homogeneous((g, q) in grid(), x in window(16), s in -4.0f64..4.0, pv in prop::sample::select(vec![1.0, 1.5, 2.0, 3.0, f64::INFINITY])) {
        let p = qp(q);
        let pe = PExponent::new(pv).unwrap();
        let scaled = SeqWindow::new(x.values().iter().map(|v| s * v).collect()).unwrap();
        let lhs = domain_norm(&scaled, r(g), &p, pe).value;
        let rhs = s.abs() * domain_norm(&x, r(g), &p, pe).value;
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs));
    }

    #[test]
    fn domain_norm_triangle((g, q) in grid(), a in window(16), b in window(16), pv in prop::sample::select(vec![1.0, 2.0, 4.0, f64::INFINITY])) {
        let p = qp(q);
        let pe = PExponent::new(pv).unwrap();
        let sum = SeqWindow::new(a.values().iter().zip(b.values()).map(|(x, y)| x + y).collect()).unwrap();
        let lhs = domain_norm(&sum, r(g), &p, pe).value;
        let rhs = domain_norm(&a, r(g), &p, pe).value + domain_norm(&b, r(g), &p, pe).value;
        prop_assert!(lhs <= rhs * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn p_norm_subadditive_below_one(a in window(16), b in window(16), pv in 0.1f64..1.0) {
        let pe = PExponent::new(pv).unwrap();
        let sum = SeqWindow::new(a.values().iter().zip(b.values()).map(|(x, y)| x + y).collect()).unwrap();
        prop_assert!(lp_norm(&sum, pe) <= (lp_norm(&a, pe) + lp_norm(&b, pe)) * (1.0 + 1e-12));
    }

    #[test]
    fn subset_sup_matches_reverse_oracle(m in matrix(8, 8), e in prop::sample::select(vec![0.5, 1.0, 2.0, 3.0]), sup in any::<bool>()) {
        let mode = if sup { SubsetMode::SupOverCols } else { SubsetMode::SumOverCols };
        let fwd = subset_sup(&m, e, mode, 8).unwrap();
        prop_assert_eq!(fwd.value, reverse_enumeration(&m, e, mode, 8));
        prop_assert_eq!(fwd.value, column_functional(&m, &fwd.witness, e, mode));
        prop_assert!(greedy_lower_bound(&m, e, mode, 8) <= fwd.value);
    }

    #[test]
    fn subset_sup_monotone_in_row_limit(m in matrix(10, 6), e in prop::sample::select(vec![1.0, 2.0])) {
        let mut prev = 0.0;
        for rows in 1..=10 {
            let v = subset_sup(&m, e, SubsetMode::SumOverCols, rows).unwrap().value;
            prop_assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn lambda_omega_identities((g, q) in grid(), a in window(16), x in window(16)) {
        let p = qp(q);
        let h = apply_forward(&x, r(g), &p);
        let lh = lambda_matrix(&a, r(g), &p).mul_vec(h.values()).unwrap();
        let products: Vec<f64> = a.values().iter().zip(x.values()).map(|(u, v)| u * v).collect();
        prop_assert!(max_diff(&lh, &products) <= 1e-10);
        let oh = omega_matrix(&a, r(g), &p).mul_vec(h.values()).unwrap();
        let partial: Vec<f64> = products.iter().scan(0.0, |acc, v| { *acc += v; Some(*acc) }).collect();
        prop_assert!(max_diff(&oh, &partial) <= 1e-10);
    }

    #[test]
    fn thm41_identity((g, q) in grid(), phi in lower_matrix(12), x in window(12)) {
        prop_assert!(thm41_consistency(&phi, &x, r(g), &qp(q)).unwrap() <= 1e-10);
    }

    #[test]
    fn psi_family_coherence((g, q) in grid(), phi in lower_matrix(10)) {
        let p = qp(q);
        let psi = psi_matrix(&phi, r(g), &p, 1e-8).unwrap();
        for j in 0..10 {
            let pj = psi_j_matrix(&phi, j, r(g), &p).unwrap();
            prop_assert_eq!(pj.row(9), psi.matrix.row(j));
        }
    }

    #[test]
    fn upsilon_inverts_columnwise((g, q) in grid(), phi in matrix(14, 5)) {
        let p = qp(q);
        let u = upsilon_matrix(&phi, r(g), &p);
        for k in 0..5 {
            let back = apply_inverse(&SeqWindow::new(u.column(k)).unwrap(), r(g), &p);
            prop_assert!(max_diff(back.values(), &phi.column(k)) <= 1e-10);
        }
    }
}
