use qnabla_core::{
    alpha_dual_check, apply_forward, apply_inverse, beta_dual_check, class_check,
    class_check_into_domain, compose_coeffs, domain_norm, forward_coeffs, gamma_dual_check,
    inverse_coeffs, schauder_basis_vector, semigroup_defect, verify_inverse, ClassCheck,
    ClassQuery, CoeffStream, ConditionReport, DomainQuery, DomainTarget, DualReport, NormReport,
    QParam, QReal, SeqSource, Source, Target,
};
use serde::Serialize;
use serde_json::Value;

use crate::args::{Command, Kind, Operator};
use crate::error::Result;
use crate::io::{emit, fmt_f64, read_matrix, read_sequence, Artifact};

fn operator(op: &Operator) -> Result<(QReal, QParam)> {
    Ok((QReal::new(op.gamma)?, QParam::new(op.q)?))
}

fn stream(kind: Kind, gamma: QReal, qp: &QParam, k: usize) -> CoeffStream {
    match kind {
        Kind::Forward => forward_coeffs(gamma, qp, k),
        Kind::Inverse => inverse_coeffs(gamma, qp, k),
    }
}

fn to_json<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("report types serialize to JSON")
}

fn sequence(values: &[f64]) -> Artifact {
    Artifact {
        json: to_json(&values),
        csv: values.iter().map(|v| fmt_f64(*v) + "\n").collect(),
    }
}

fn scalar(name: &str, value: f64) -> Artifact {
    let mut json = serde_json::Map::new();
    json.insert(name.to_string(), to_json(&value));
    Artifact {
        json: Value::Object(json),
        csv: format!("{name}\n{}\n", fmt_f64(value)),
    }
}

fn norm(report: &NormReport) -> Artifact {
    let mut csv = String::from("window,value\n");
    for partial in &report.partials {
        csv += &format!("{},{}\n", partial.window, fmt_f64(partial.value));
    }
    Artifact {
        json: to_json(report),
        csv,
    }
}

fn verdict_code(report: &ConditionReport) -> String {
    to_json(&report.verdict)
        .as_str()
        .unwrap_or_default()
        .to_string()
}

/// One CSV line per (condition, window) pair, tagged with a group label.
fn condition_rows<'a>(rows: impl IntoIterator<Item = (String, &'a ConditionReport)>) -> String {
    let mut csv = String::from("group,condition,window,value,verdict\n");
    for (group, report) in rows {
        for v in &report.values {
            csv += &format!(
                "{group},{},{},{},{}\n",
                report.condition,
                v.window,
                fmt_f64(v.value),
                verdict_code(report)
            );
        }
    }
    csv
}

fn condition(report: &ConditionReport) -> Artifact {
    Artifact {
        json: to_json(report),
        csv: condition_rows([(String::from("alpha"), report)]),
    }
}

fn dual(report: &DualReport) -> Artifact {
    let group = to_json(&report.dual)
        .as_str()
        .unwrap_or_default()
        .to_string();
    Artifact {
        json: to_json(report),
        csv: condition_rows(report.components.iter().map(|c| (group.clone(), c))),
    }
}

fn class(report: &ClassCheck) -> Artifact {
    Artifact {
        json: to_json(report),
        csv: condition_rows(
            report
                .entries
                .iter()
                .map(|e| (format!("item{}", e.item), &e.report)),
        ),
    }
}

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Coeffs { op, k, kind, out } => {
            let (gamma, qp) = operator(&op)?;
            emit(
                sequence(stream(kind, gamma, &qp, k).coeffs()),
                out.format,
                out.output.as_deref(),
            )
        }
        Command::Transform { op, input, out } => {
            let (gamma, qp) = operator(&op)?;
            let g = read_sequence(&input.input)?;
            emit(
                sequence(apply_forward(&g, gamma, &qp).values()),
                out.format,
                out.output.as_deref(),
            )
        }
        Command::Invert { op, input, out } => {
            let (gamma, qp) = operator(&op)?;
            let h = read_sequence(&input.input)?;
            emit(
                sequence(apply_inverse(&h, gamma, &qp).values()),
                out.format,
                out.output.as_deref(),
            )
        }
        Command::VerifyInverse { op, window, out } => {
            let (gamma, qp) = operator(&op)?;
            let residual = verify_inverse(gamma, &qp, window)?;
            emit(
                scalar("residual", residual),
                out.format,
                out.output.as_deref(),
            )
        }
        Command::SemigroupDefect {
            op,
            nu,
            window,
            out,
        } => {
            let (gamma, qp) = operator(&op)?;
            let defect = semigroup_defect(gamma, QReal::new(nu)?, &qp, window)?;
            emit(scalar("defect", defect), out.format, out.output.as_deref())
        }
        Command::Norm { op, p, input, out } => {
            let (gamma, qp) = operator(&op)?;
            let g = read_sequence(&input.input)?;
            emit(
                norm(&domain_norm(&g, gamma, &qp, p)),
                out.format,
                out.output.as_deref(),
            )
        }
        Command::Basis {
            op,
            index,
            window,
            out,
        } => {
            let (gamma, qp) = operator(&op)?;
            let zeta = schauder_basis_vector(index, gamma, &qp, window)?;
            emit(sequence(zeta.values()), out.format, out.output.as_deref())
        }
        Command::AlphaDual {
            op,
            p,
            input,
            row_limit,
            out,
        } => {
            let (gamma, qp) = operator(&op)?;
            let a = read_sequence(&input.input)?;
            let limits = qnabla_core::default_windows(row_limit);
            let report = alpha_dual_check(&a, gamma, &qp, p, &limits)?;
            emit(condition(&report), out.format, out.output.as_deref())
        }
        Command::BetaDual {
            op,
            p,
            input,
            window,
            out,
        } => {
            let (gamma, qp) = operator(&op)?;
            let a = read_sequence(&input.input)?;
            let windows = qnabla_core::default_windows(window.unwrap_or(a.len()));
            emit(
                dual(&beta_dual_check(&a, gamma, &qp, p, &windows)?),
                out.format,
                out.output.as_deref(),
            )
        }
        Command::GammaDual {
            op,
            p,
            input,
            window,
            out,
        } => {
            let (gamma, qp) = operator(&op)?;
            let a = read_sequence(&input.input)?;
            let windows = qnabla_core::default_windows(window.unwrap_or(a.len()));
            emit(
                dual(&gamma_dual_check(&a, gamma, &qp, p, &windows)?),
                out.format,
                out.output.as_deref(),
            )
        }
        Command::ClassCheck {
            op,
            p,
            source,
            target,
            input,
            window,
            row_limit,
            out,
        } => {
            let (gamma, qp) = operator(&op)?;
            let phi = read_matrix(&input.input)?;
            let window = window.unwrap_or(phi.rows().min(phi.cols()));
            let artifact = if let Ok(source) = source.parse::<Source>() {
                let target: Target = target.parse()?;
                let query = ClassQuery::new(source, target, p, gamma, qp, window, row_limit)?;
                class(&class_check(&query, &phi)?)
            } else {
                let source: SeqSource = source.parse()?;
                let target: DomainTarget = target.parse()?;
                let query = DomainQuery {
                    source,
                    target,
                    p,
                    gamma,
                    qp,
                    window,
                    row_limit,
                };
                let report = class_check_into_domain(&query, &phi)?;
                Artifact {
                    csv: condition_rows(
                        report
                            .reports
                            .iter()
                            .map(|r| (String::from("into-domain"), r)),
                    ),
                    json: to_json(&report),
                }
            };
            emit(artifact, out.format, out.output.as_deref())
        }
        Command::Compose {
            op,
            kind,
            second,
            second_kind,
            k,
            out,
        } => {
            let (gamma, qp) = operator(&op)?;
            let a = stream(kind, gamma, &qp, k);
            let b = stream(second_kind, QReal::new(second)?, &qp, k);
            let composed = compose_coeffs(&a, &b)?;
            emit(
                sequence(composed.coeffs()),
                out.format,
                out.output.as_deref(),
            )
        }
    }
}
