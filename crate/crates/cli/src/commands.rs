//! Command execution: load inputs, call the library, assemble envelopes.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::canonical::{digest, to_canonical_string, ResultEnvelope};
use crate::cli::{
    CheckArgs, Cli, Command, CommonArgs, IdealNormArgs, MatrixMArgs, ModularArgs, NormArgs,
    RearrangeArgs, SnumbersArgs, SuiteArg, TheoremArg,
};
use crate::config::{self, Resolved};
use crate::error::{CliError, CliResult};
use crate::table::{emit_table, Format};
use morlicz::geometry::{
    check_ak, check_delta2_collapse, check_norm_modular, check_order_continuity, check_sigma_dc,
    check_uniform_monotonicity, check_uniform_opial, GeometryReport, SpaceConfig,
};
use morlicz::sampling::{random_matrix, seeded_rng};
use morlicz::snumbers::{
    check_ideal_axioms, check_quasi_norm_axioms, check_s_axioms, ideal_quasi_norm, AxiomCheck,
    OperatorSampler,
};
use morlicz::space::{luxemburg_norm, modular, LuxemburgResult};
use morlicz::{FiniteOperator64, VectorSequence64};

/// Runs one parsed invocation end to end: results to standard output,
/// warnings duplicated to standard error.
pub fn execute(cli: Cli) -> CliResult<()> {
    let (envelopes, format) = run(cli)?;
    for envelope in &envelopes {
        for warning in &envelope.warnings {
            eprintln!("warning: {warning}");
        }
    }
    let text = if envelopes.len() == 1 && format == Format::Json {
        to_canonical_string(&envelopes[0].to_value())
    } else {
        emit_table(&envelopes, format)?
    };
    if text.ends_with('\n') {
        print!("{text}");
    } else {
        println!("{text}");
    }
    Ok(())
}

/// Dispatches a parsed invocation into result envelopes.
pub fn run(cli: Cli) -> CliResult<(Vec<ResultEnvelope>, Format)> {
    match cli.command {
        Command::Norm(args) => cmd_norm(args),
        Command::Modular(args) => cmd_modular(args),
        Command::Rearrange(args) => cmd_rearrange(args),
        Command::Snumbers(args) => cmd_snumbers(args),
        Command::IdealNorm(args) => cmd_ideal_norm(args),
        Command::MatrixM(args) => cmd_matrix_m(args),
        Command::Check(args) => cmd_check(args),
    }
}

fn resolve_common(common: &CommonArgs) -> CliResult<(config::RunConfig, Resolved)> {
    let cfg = config::load_config(&common.config)?;
    let resolved = cfg.resolve()?;
    Ok((cfg, resolved))
}

fn envelope(command: &str, digest: &str, outputs: Value, warnings: Vec<String>) -> ResultEnvelope {
    ResultEnvelope {
        command: command.to_string(),
        config_digest: digest.to_string(),
        outputs,
        warnings,
    }
}

fn luxemburg_outputs(result: &LuxemburgResult<f64>) -> Value {
    json!({
        "norm": result.norm,
        "sigma_bracket": [result.sigma_bracket.0, result.sigma_bracket.1],
        "rows_used": result.rows_used,
        "certified": result.certified,
    })
}

fn note_uncertified(certified: bool, warnings: &mut Vec<String>, what: &str) {
    if !certified && !warnings.iter().any(|w| w.contains("certified")) {
        warnings.push(format!("{what} is not certified under the truncation policy"));
    }
}

fn cmd_norm(args: NormArgs) -> CliResult<(Vec<ResultEnvelope>, Format)> {
    let (cfg, r) = resolve_common(&args.common)?;
    let x = config::load_sequence(&args.sequence, &cfg.vector_norm)?;
    let result = luxemburg_norm(&r.family, &r.kernel, &x, &r.vector_norm, r.tol, &r.policy)?;
    let outputs = luxemburg_outputs(&result);
    let mut warnings = result.warnings.clone();
    note_uncertified(result.certified, &mut warnings, "the norm bracket");
    Ok((vec![envelope("norm", &r.digest, outputs, warnings)], args.common.format))
}

fn cmd_modular(args: ModularArgs) -> CliResult<(Vec<ResultEnvelope>, Format)> {
    let (cfg, r) = resolve_common(&args.common)?;
    let x = config::load_sequence(&args.sequence, &cfg.vector_norm)?;
    let value = modular(&r.family, &r.kernel, &x, &r.vector_norm, args.sigma, &r.policy)?;
    let outputs = json!({
        "value": value.value,
        "rows_used": value.rows_used,
        "tail_estimate": value.tail_estimate,
        "certified": value.certified,
    });
    let mut warnings = Vec::new();
    note_uncertified(value.certified, &mut warnings, "the modular tail");
    Ok((vec![envelope("modular", &r.digest, outputs, warnings)], args.common.format))
}

fn cmd_rearrange(args: RearrangeArgs) -> CliResult<(Vec<ResultEnvelope>, Format)> {
    let (cfg, r) = resolve_common(&args.common)?;
    let x = config::load_sequence(&args.sequence, &cfg.vector_norm)?;
    let rearranged = x.decreasing_rearrangement(&r.vector_norm)?;
    let values: Vec<f64> = rearranged.entries().iter().map(|(_, v)| v[0]).collect();
    let outputs = json!({ "values": values });
    Ok((vec![envelope("rearrange", &r.digest, outputs, Vec::new())], args.common.format))
}

fn cmd_snumbers(args: SnumbersArgs) -> CliResult<(Vec<ResultEnvelope>, Format)> {
    // Singular values need no run configuration; when one is supplied it is
    // validated and digested so the envelope stays traceable.
    let digest_hex = match &args.config {
        Some(path) => config::load_config(path)?.resolve()?.digest,
        None => digest(&Value::Null),
    };
    let op = config::load_operator(&args.matrix)?;
    let values = op.s_numbers()?;
    let outputs = json!({
        "values": values,
        "operator_norm": values.first().copied().unwrap_or(0.0),
        "rank": op.rank()?,
        "rows": op.nrows(),
        "cols": op.ncols(),
    });
    Ok((vec![envelope("snumbers", &digest_hex, outputs, Vec::new())], args.format))
}

fn cmd_ideal_norm(args: IdealNormArgs) -> CliResult<(Vec<ResultEnvelope>, Format)> {
    let (_, r) = resolve_common(&args.common)?;
    let op = config::load_operator(&args.matrix)?;
    let result = ideal_quasi_norm(&r.family, &r.kernel, &op, r.tol, &r.policy)?;
    let outputs = luxemburg_outputs(&result);
    let mut warnings = result.warnings.clone();
    note_uncertified(result.certified, &mut warnings, "the quasi-norm bracket");
    Ok((vec![envelope("ideal-norm", &r.digest, outputs, warnings)], args.common.format))
}

fn cmd_matrix_m(args: MatrixMArgs) -> CliResult<(Vec<ResultEnvelope>, Format)> {
    let (_, r) = resolve_common(&args.common)?;
    let report = r.kernel.estimate_condition_m(args.rows, args.cols)?;
    let pair = |p: Option<(usize, usize)>| p.map(|(n, k)| json!([n, k])).unwrap_or(Value::Null);
    let outputs = json!({
        "M_estimate": report.m_estimate,
        "attained_at": pair(report.attained_at),
        "violated": report.violated,
        "violating_entry": pair(report.violating_entry),
        "window_rows": report.window_rows,
        "window_cols": report.window_cols,
    });
    let mut warnings = vec![format!(
        "the halving constant is a window estimate over {} rows and {} columns, not a global bound",
        report.window_rows, report.window_cols
    )];
    if report.violated {
        if let Some((n, k)) = report.violating_entry {
            warnings.push(format!(
                "the halving inequality is unsatisfiable at entry ({n}, {k}): the base entry \
                 vanishes under a positive left side"
            ));
        }
    }
    Ok((vec![envelope("matrix-m", &r.digest, outputs, warnings)], args.common.format))
}

fn unit_first_coordinate(dim: usize) -> CliResult<VectorSequence64> {
    let mut e1 = vec![0.0; dim];
    e1[0] = 1.0;
    VectorSequence64::new(dim, vec![(1, e1)]).map_err(CliError::from)
}

fn geometry_outputs(kind: &str, report: &GeometryReport<f64>) -> Value {
    json!({
        kind: report.theorem_id.as_str(),
        "samples": report.samples,
        "epsilon": report.epsilon,
        "estimated_modulus": report.estimated_modulus,
        "passed": report.passed,
        "inconclusive": report.inconclusive,
        "seed": report.seed,
        "worst_case": report.worst_case.as_ref().map(|w| json!({
            "stream": w.stream,
            "margin": w.margin,
            "description": w.description,
        })),
    })
}

fn axiom_checks_value(checks: &[AxiomCheck<f64>]) -> Value {
    Value::Array(
        checks
            .iter()
            .map(|c| {
                json!({
                    "axiom": c.axiom,
                    "passed": c.passed,
                    "worst_violation": c.worst_violation,
                    "detail": c.detail,
                })
            })
            .collect(),
    )
}

fn cmd_check(args: CheckArgs) -> CliResult<(Vec<ResultEnvelope>, Format)> {
    let (cfg, r) = resolve_common(&args.common)?;
    if let Some(theorem) = args.theorem {
        check_theorem(theorem, args, cfg, r)
    } else if let Some(suite) = args.suite {
        check_suite(suite, args, r)
    } else {
        unreachable!("clap requires exactly one of --theorem/--suite")
    }
}

fn space_config(args: &CheckArgs, r: &Resolved) -> SpaceConfig<f64> {
    let mut cfg = SpaceConfig::new(r.family.clone(), r.kernel.clone(), r.vector_norm);
    cfg.tol = r.tol;
    cfg.policy = r.policy;
    cfg.seed = args.seed.unwrap_or(r.seed);
    cfg.parallel = args.common.parallel;
    if let Some(m) = r.geometry.margin_floor {
        cfg.margin_floor = m;
    }
    if let Some(e) = r.geometry.exploratory {
        cfg.exploratory = e;
    }
    if let Some(s) = r.geometry.max_support {
        cfg.sampling.max_support = s;
    }
    if let Some(i) = r.geometry.max_index {
        cfg.sampling.max_index = i;
    }
    if let Some(a) = r.geometry.amplitude {
        cfg.sampling.amplitude = a;
    }
    cfg
}

fn reject_flag(given: bool, flag: &str, valid: &str) -> CliResult<()> {
    if given {
        Err(CliError::usage(format!("{flag} only applies to {valid}")))
    } else {
        Ok(())
    }
}

fn check_theorem(
    theorem: TheoremArg,
    args: CheckArgs,
    cfg: config::RunConfig,
    r: Resolved,
) -> CliResult<(Vec<ResultEnvelope>, Format)> {
    let takes_epsilon = matches!(theorem, TheoremArg::Um | TheoremArg::Opial);
    let takes_probe = matches!(theorem, TheoremArg::Opial | TheoremArg::OrderCont);
    if !takes_epsilon {
        reject_flag(!args.epsilon.is_empty(), "--epsilon", "um and opial")?;
    }
    if !takes_probe {
        reject_flag(args.sequence.is_some(), "a probe sequence", "opial and order-cont")?;
    }
    reject_flag(
        args.chain_length.is_some() && theorem != TheoremArg::SigmaDc,
        "--chain-length",
        "sigma-dc",
    )?;
    reject_flag(
        args.ladder.is_some() && theorem != TheoremArg::OrderCont,
        "--ladder",
        "order-cont",
    )?;
    reject_flag(
        !args.sigma.is_empty() && theorem != TheoremArg::Delta2Collapse,
        "--sigma",
        "delta2-collapse",
    )?;
    if takes_epsilon && args.epsilon.is_empty() {
        return Err(CliError::usage(format!(
            "check --theorem {} needs at least one --epsilon",
            if theorem == TheoremArg::Um { "um" } else { "opial" }
        )));
    }

    let space = space_config(&args, &r);
    let probe = |path: &Option<std::path::PathBuf>| -> CliResult<VectorSequence64> {
        match path {
            Some(p) => config::load_sequence(p.as_path(), &cfg.vector_norm),
            None => unit_first_coordinate(r.vector_norm.dim()),
        }
    };

    let reports: Vec<GeometryReport<f64>> = match theorem {
        TheoremArg::NormModular => vec![check_norm_modular(&space, args.samples, r.tol)?],
        TheoremArg::Um => args
            .epsilon
            .iter()
            .map(|&eps| check_uniform_monotonicity(&space, eps, args.samples))
            .collect::<morlicz::Result<_>>()?,
        TheoremArg::Opial => {
            let fixed = probe(&args.sequence)?;
            args.epsilon
                .iter()
                .map(|&eps| check_uniform_opial(&space, eps, args.samples, &fixed))
                .collect::<morlicz::Result<_>>()?
        }
        TheoremArg::SigmaDc => {
            vec![check_sigma_dc(&space, args.samples, args.chain_length.unwrap_or(6))?]
        }
        TheoremArg::OrderCont => {
            let x = probe(&args.sequence)?;
            vec![check_order_continuity(&space, &x, args.ladder.unwrap_or(10))?]
        }
        TheoremArg::Ak => vec![check_ak(&space, args.samples)?],
        TheoremArg::Delta2Collapse => {
            let grid: Vec<f64> =
                if args.sigma.is_empty() { vec![0.1, 1.0, 10.0] } else { args.sigma.clone() };
            vec![check_delta2_collapse(&space, args.samples, &grid)?]
        }
    };

    let envelopes = reports
        .into_iter()
        .map(|report| {
            let outputs = geometry_outputs("theorem", &report);
            let mut warnings = report.warnings.clone();
            if report.inconclusive {
                warnings.push(
                    "the worst margin sits inside the solver-tolerance floor; no conclusion \
                     is drawn"
                        .to_string(),
                );
            }
            envelope("check", &r.digest, outputs, warnings)
        })
        .collect();
    Ok((envelopes, args.common.format))
}

fn check_suite(
    suite: SuiteArg,
    args: CheckArgs,
    r: Resolved,
) -> CliResult<(Vec<ResultEnvelope>, Format)> {
    reject_flag(!args.epsilon.is_empty(), "--epsilon", "um and opial")?;
    reject_flag(args.sequence.is_some(), "a probe sequence", "opial and order-cont")?;
    reject_flag(args.chain_length.is_some(), "--chain-length", "sigma-dc")?;
    reject_flag(args.ladder.is_some(), "--ladder", "order-cont")?;
    reject_flag(!args.sigma.is_empty(), "--sigma", "delta2-collapse")?;
    if args.samples == 0 {
        return Err(CliError::usage("--samples must be at least 1"));
    }
    let seed = args.seed.unwrap_or(r.seed);
    let rows = r.operator.rows.unwrap_or(8);
    let cols = r.operator.cols.unwrap_or(8);
    let amplitude = r.operator.amplitude.unwrap_or(1.0);

    let (outputs, warnings) = match suite {
        SuiteArg::SAxioms => s_axiom_outputs(seed, rows, cols, amplitude, args.samples)?,
        SuiteArg::QnAxioms => {
            let sampler = OperatorSampler::new(seed, rows, cols, amplitude)
                .map_err(|e| CliError::validation("operator", e.to_string()))?;
            let rep =
                check_quasi_norm_axioms(&r.family, &r.kernel, &sampler, args.samples, r.tol, &r.policy)?;
            let outputs = json!({
                "suite": "qn-axioms",
                "samples": rep.samples,
                "m_estimate": rep.m_estimate,
                "qn2_applicable": rep.qn2_applicable,
                "qn1_ratio_range": [rep.qn1_ratio_range.0, rep.qn1_ratio_range.1],
                "checks": axiom_checks_value(&rep.checks),
                "all_passed": rep.all_passed,
            });
            let mut warnings = Vec::new();
            if !rep.qn2_applicable {
                warnings.push(
                    "the kernel window shows a halving violation; the quasi-triangle axiom \
                     is not applicable"
                        .to_string(),
                );
            }
            (outputs, warnings)
        }
        SuiteArg::IdealAxioms => {
            let sampler = OperatorSampler::new(seed, rows, cols, amplitude)
                .map_err(|e| CliError::validation("operator", e.to_string()))?;
            let rep =
                check_ideal_axioms(&r.family, &r.kernel, &sampler, args.samples, r.tol, &r.policy)?;
            let outputs = json!({
                "suite": "ideal-axioms",
                "samples": args.samples,
                "hypothesis_ok": rep.hypothesis_ok,
                "first_column_norm": rep.first_column_norm,
                "checks": axiom_checks_value(&rep.checks),
                "all_passed": rep.all_passed,
            });
            let mut warnings = Vec::new();
            if !rep.hypothesis_ok {
                warnings.push(
                    "the first kernel column has no certified finite norm; the ideal \
                     hypothesis fails"
                        .to_string(),
                );
            }
            (outputs, warnings)
        }
    };
    Ok((vec![envelope("check", &r.digest, outputs, warnings)], args.common.format))
}

/// Runs the s-number axiom suite over deterministically sampled operator
/// tuples and aggregates the worst violation per axiom.
fn s_axiom_outputs(
    seed: u64,
    rows: usize,
    cols: usize,
    amplitude: f64,
    samples: usize,
) -> CliResult<(Value, Vec<String>)> {
    let min_dim = rows.min(cols);
    if min_dim == 0 {
        return Err(CliError::validation("operator", "rows and cols must be at least 1"));
    }
    // Additivity index pairs (m, n) cycle through the valid range
    // m + n - 1 ≤ min_dim, capped like the operator shapes at modest sizes.
    let hi_m = min_dim.div_ceil(2);
    let mut worst: BTreeMap<String, (f64, String, usize)> = BTreeMap::new();
    for i in 0..samples {
        let mut rng = seeded_rng(seed, i as u64 + 1);
        let s = FiniteOperator64::from_rows(random_matrix(&mut rng, rows, cols, amplitude))?;
        let t = FiniteOperator64::from_rows(random_matrix(&mut rng, rows, cols, amplitude))?;
        let left = FiniteOperator64::from_rows(random_matrix(&mut rng, rows, rows, amplitude))?;
        let right = FiniteOperator64::from_rows(random_matrix(&mut rng, cols, cols, amplitude))?;
        let m = i % hi_m + 1;
        let n_max = (min_dim + 1 - m).min(hi_m);
        let n = (i / hi_m) % n_max + 1;
        let rep = check_s_axioms(&s, &t, &left, &right, m, n)?;
        for check in rep.checks {
            let entry = worst.entry(check.axiom).or_insert((f64::NEG_INFINITY, String::new(), 0));
            if check.worst_violation > entry.0 {
                entry.0 = check.worst_violation;
                entry.1 = check.detail;
                entry.2 = i;
            }
        }
    }
    let checks: Vec<Value> = worst
        .iter()
        .map(|(axiom, (violation, detail, sample))| {
            json!({
                "axiom": axiom,
                "passed": *violation <= 0.0,
                "worst_violation": violation,
                "detail": format!("{detail} (worst at sample {sample})"),
            })
        })
        .collect();
    let all_passed = worst.values().all(|(v, _, _)| *v <= 0.0);
    let outputs = json!({
        "suite": "s-axioms",
        "samples": samples,
        "checks": checks,
        "all_passed": all_passed,
    });
    Ok((outputs, Vec::new()))
}
