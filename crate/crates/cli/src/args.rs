use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qnabla_core::PExponent;

#[derive(Debug, Parser)]
#[command(
    name = "qnabla",
    version,
    about = "Fractional q-difference operators: transforms, inverses, norms and dual/matrix-class diagnostics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Forward,
    Inverse,
}

/// Order and deformation parameter shared by every operator command.
#[derive(Debug, Args)]
pub struct Operator {
    /// Order γ of the operator.
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: f64,
    /// Deformation parameter, 0 < q < 1.
    #[arg(long)]
    pub q: f64,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Write the result here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct Input {
    /// Sequence file: a JSON array, or one number per line.
    #[arg(long)]
    pub input: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the coefficients c_0..c_K (or e_0..e_K with --kind inverse).
    Coeffs {
        #[command(flatten)]
        op: Operator,
        /// Truncation index K.
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value_t = Kind::Forward)]
        kind: Kind,
        #[command(flatten)]
        out: Output,
    },
    /// Apply the forward operator to a sequence file.
    Transform {
        #[command(flatten)]
        op: Operator,
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        out: Output,
    },
    /// Apply the inverse operator to a sequence file.
    Invert {
        #[command(flatten)]
        op: Operator,
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        out: Output,
    },
    /// Residual of forward∘inverse against the identity over a window.
    VerifyInverse {
        #[command(flatten)]
        op: Operator,
        #[arg(long)]
        window: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Distance between the order-(γ+ν) operator and the composition of orders γ and ν.
    SemigroupDefect {
        #[command(flatten)]
        op: Operator,
        /// Second order ν.
        #[arg(long, allow_hyphen_values = true)]
        nu: f64,
        #[arg(long)]
        window: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Domain-space norm of a sequence file (ℓ_p norm of its transform).
    Norm {
        #[command(flatten)]
        op: Operator,
        /// Exponent in (0, ∞]; `inf` for the sup norm.
        #[arg(long)]
        p: PExponent,
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        out: Output,
    },
    /// Schauder basis vector ζ^(k) over a window.
    Basis {
        #[command(flatten)]
        op: Operator,
        /// Basis index k.
        #[arg(long)]
        index: usize,
        #[arg(long)]
        window: usize,
        #[command(flatten)]
        out: Output,
    },
    /// α-dual membership report for the sequence in --input.
    AlphaDual {
        #[command(flatten)]
        op: Operator,
        #[arg(long)]
        p: PExponent,
        #[command(flatten)]
        input: Input,
        /// Largest row count for exhaustive subset enumeration (≤ 20).
        #[arg(long, default_value_t = 12)]
        row_limit: usize,
        #[command(flatten)]
        out: Output,
    },
    /// β-dual membership report for the sequence in --input.
    BetaDual {
        #[command(flatten)]
        op: Operator,
        #[arg(long)]
        p: PExponent,
        #[command(flatten)]
        input: Input,
        /// Largest window (defaults to the sequence length).
        #[arg(long)]
        window: Option<usize>,
        #[command(flatten)]
        out: Output,
    },
    /// γ-dual membership report for the sequence in --input.
    GammaDual {
        #[command(flatten)]
        op: Operator,
        #[arg(long)]
        p: PExponent,
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        window: Option<usize>,
        #[command(flatten)]
        out: Output,
    },
    /// Matrix-class report for the matrix in --input (a JSON array of rows,
    /// or comma-separated rows).
    ///
    /// With a domain source (l1-domain, lp-domain, linf-domain) the target is
    /// one of l1, c0, c, linf, bs, cs, cs0, qcesaro-<l1|c0|c|linf>. With a
    /// sequence-space source (l1, c0, c, linf) the target is lp-domain or
    /// linf-domain.
    ClassCheck {
        #[command(flatten)]
        op: Operator,
        #[arg(long, default_value = "2")]
        p: PExponent,
        #[arg(long)]
        source: String,
        #[arg(long)]
        target: String,
        #[command(flatten)]
        input: Input,
        /// Largest window (defaults to the matrix size).
        #[arg(long)]
        window: Option<usize>,
        #[arg(long, default_value_t = 8)]
        row_limit: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Cauchy product of two coefficient streams sharing q.
    Compose {
        #[command(flatten)]
        op: Operator,
        #[arg(long, value_enum, default_value_t = Kind::Forward)]
        kind: Kind,
        /// Order of the second stream.
        #[arg(long, allow_hyphen_values = true)]
        second: f64,
        #[arg(long, value_enum, default_value_t = Kind::Forward)]
        second_kind: Kind,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        out: Output,
    },
}
