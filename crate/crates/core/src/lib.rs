//! Fractional q-difference operators on sequence windows: q-analog special
//! functions, the operator and its inverse as coefficient streams, the
//! associated sequence spaces and their duals, and matrix-class diagnostics.

pub mod condition;
pub mod duals;
pub mod error;
pub mod fracdiff;
pub mod matclass;
pub mod matrix;
pub mod qcore;
pub mod spaces;

pub use condition::{default_windows, ConditionId, ConditionReport, Verdict, WindowValue, Witness};
pub use duals::{
    alpha_dual_check, beta_dual_check, gamma_dual_check, lambda_matrix, lemma_mc_condition,
    omega_matrix, subset_sup, DualKind, DualReport, SubsetMode, SubsetSup, WindowPlan,
    MAX_SUBSET_ROWS,
};
pub use error::{Error, Result};
pub use fracdiff::{
    apply_forward, apply_inverse, compose_coeffs, forward_coeffs, inverse_coeffs, semigroup_defect,
    verify_inverse, CoeffKind, CoeffStream, SeqWindow,
};
pub use matclass::{
    cesaro_composite, cesaro_weights, class_check, class_check_into_domain, class_table_cell,
    conditions_a_b_prime, into_domain_cell, mtc_condition, psi_j_matrix, psi_matrix, sigma_matrix,
    thm41_consistency, upsilon_matrix, BaseTarget, ClassCheck, ClassEntry, ClassQuery, DomainCheck,
    DomainItem, DomainQuery, DomainTarget, Operand, PsiFamily, PsiMatrix, SeqSource, Source,
    Target, CLASS_TABLE, DEFAULT_TAIL_RTOL, INTO_DOMAIN_TABLE,
};
pub use matrix::MatrixWindow;
pub use qcore::{
    q_binomial, q_factorial, q_gamma, q_gamma_ratio, q_integer, q_pochhammer_inf, QParam, QReal,
};
pub use spaces::{
    domain_norm, lp_norm, membership_diagnostic, schauder_basis_vector, schauder_reconstruct,
    NormReport, PExponent, PartialNorm,
};
