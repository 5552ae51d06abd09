use entmeter::manybody::{self, measure_reduced, measure_spin, reduced_dm, spin_density_matrix};
use entmeter::measure::{entanglement, order_index as op_order_index, MeasureResult};
use entmeter::norms::restricted_norm_oracle;
use entmeter::properties::{audit, Property};
use entmeter::states::{self, Statistics};
use entmeter::tensor::outer;
use entmeter::{LogBase, NormMode, NormOptions, Operator, C64};

use crate::report::{
    FailureInfo, OptimizerInfo, OracleInfo, OrderIndexReport, PropertySummary, Report, ReproduceRow, VerifySummary,
    TOOL_VERSION,
};
use crate::spec::{StateSpec, Target};
use crate::{CliError, Settings, ORACLE_MAX_DIM, ORACLE_SAMPLES};

/// Largest `abs_diff` an unflagged reproduction row may have.
pub const REPRODUCE_TOL: f64 = 1e-6;

fn compute(target: &Target, mode: NormMode, base: LogBase, opts: &NormOptions) -> Result<MeasureResult, CliError> {
    Ok(match target {
        Target::Operator(op) => entanglement(op, mode, base, opts)?,
        Target::Fock { space, rho, p } => measure_reduced(space, rho, *p, mode, base, opts)?,
        Target::Spin { rho, p } => measure_spin(rho, *p, mode, base, opts)?,
    })
}

/// The operator whose restricted norm is the numerator of the measure.
fn measured_operator(target: &Target) -> Result<Operator, CliError> {
    Ok(match target {
        Target::Operator(op) => op.clone(),
        Target::Fock { space, rho, p } => reduced_dm(space, rho, *p)?.matrix,
        Target::Spin { rho, p } => spin_density_matrix(rho, *p)?.matrix,
    })
}

/// `ε` for one input.
pub fn measure(spec: &StateSpec, settings: &Settings) -> Result<Report, CliError> {
    settings.opts.validate()?;
    let mut warnings = Vec::new();
    let target = spec.build(&mut warnings)?;
    let r = compute(&target, settings.mode, settings.base, &settings.opts)?;
    warnings.extend(r.warnings.iter().cloned());
    let optimizer = match &r.diagnostics {
        Some(d) => OptimizerInfo {
            restarts: d.a.restarts_run,
            converged: r.converged,
            restarts_agreeing: d.a.restarts_agreeing,
            sweeps: d.a.sweeps_used,
        },
        None => OptimizerInfo {
            restarts: 0,
            converged: r.converged,
            restarts_agreeing: 0,
            sweeps: 0,
        },
    };
    let oracle = if settings.oracle_check {
        let op = measured_operator(&target)?;
        if op.dim() <= ORACLE_MAX_DIM {
            let value = restricted_norm_oracle(&op, ORACLE_SAMPLES, settings.opts.seed)?;
            Some(OracleInfo {
                samples: ORACLE_SAMPLES,
                seed: settings.opts.seed,
                value,
                abs_diff: (value - r.norm_d_a).abs(),
            })
        } else {
            warnings.push(format!("oracle check skipped: dimension {} exceeds {ORACLE_MAX_DIM}", op.dim()));
            None
        }
    } else {
        None
    };
    Ok(Report {
        epsilon: r.epsilon,
        log_base: r.log_base.value(),
        mode: r.mode.to_string(),
        norm_d_a: r.norm_d_a,
        norm_d_aotimes: r.norm_d_aotimes,
        optimizer,
        oracle,
        warnings,
        tool_version: TOOL_VERSION.to_string(),
    })
}

/// `ω` of the input operator, or of `ρ_p` for Fock inputs.
pub fn order_index(spec: &StateSpec) -> Result<OrderIndexReport, CliError> {
    let target = spec.build(&mut Vec::new())?;
    let r = op_order_index(&measured_operator(&target)?)?;
    Ok(OrderIndexReport {
        omega: r.omega,
        norm: r.norm,
        trace_abs: r.trace_abs,
        tool_version: TOOL_VERSION.to_string(),
    })
}

fn log2_ratio_factorials(n: usize, p: usize) -> f64 {
    // log2((N-p)! N^p / N!)
    let mut acc = p as f64 * (n as f64).log2();
    for k in (n - p + 1)..=n {
        acc -= (k as f64).log2();
    }
    acc
}

fn pure(psi: entmeter::Result<entmeter::PureState>) -> Result<Target, CliError> {
    Ok(Target::Operator(outer(&psi?)?))
}

struct Case {
    name: String,
    target: Target,
    mode: NormMode,
    formula: f64,
    flag: Option<&'static str>,
}

fn cases() -> Result<Vec<Case>, CliError> {
    use NormMode::{Basis, Variational};
    let r = |x: f64| C64::new(x, 0.0);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::new();
    let mut push = |name: String, target: Target, mode, formula, flag| {
        out.push(Case {
            name,
            target,
            mode,
            formula,
            flag,
        })
    };
    for (name, s) in [("plus", 1i8), ("minus", -1)] {
        push(format!("epr_{name}"), pure(states::epr(s))?, Basis, 1.0, None);
        push(format!("bell_{name}"), pure(states::bell(s))?, Basis, 1.0, None);
        push(format!("ghz_{name}"), pure(states::ghz(s))?, Basis, 2.0, None);
    }
    push(
        "multicat_n4_c0.6_0.8".into(),
        pure(states::multicat(4, r(0.6), r(0.8)))?,
        Basis,
        -3.0 * 0.64f64.log2(),
        None,
    );
    push("multicat_n4_equal".into(), pure(states::multicat(4, r(h), r(h)))?, Basis, 3.0, None);
    for (n, m) in [(2usize, 3usize), (3, 3), (3, 4)] {
        let c = vec![r(1.0 / (m as f64).sqrt()); m];
        push(
            format!("multimode_n{n}_m{m}"),
            pure(states::multimode(n, &c))?,
            Basis,
            (n as f64 - 1.0) * (m as f64).log2(),
            None,
        );
    }
    for stat in [Statistics::Fermi, Statistics::Bose] {
        let tag = if stat == Statistics::Fermi { "fermi" } else { "bose" };
        for n in 2..=5 {
            push(
                format!("hartree_fock_{tag}_n{n}"),
                pure(states::hartree_fock(n, stat))?,
                Basis,
                log2_ratio_factorials(n, n),
                None,
            );
        }
    }
    push(
        "hartree_fock_bose_n3_variational".into(),
        pure(states::hartree_fock(3, Statistics::Bose))?,
        Variational,
        log2_ratio_factorials(3, 3),
        Some("variational_exceeds_basis"),
    );
    for (n, p) in [(3usize, 2usize), (4, 2), (5, 3)] {
        push(
            format!("reduced_hf_fermi_n{n}_p{p}"),
            Target::Operator(states::reduced_hartree_fock(n, p, Statistics::Fermi)?),
            Basis,
            log2_ratio_factorials(n, p),
            None,
        );
    }
    for (n, p) in [(5usize, 3usize), (6, 2)] {
        let (space, rho) = manybody::condensate(n, 2)?;
        push(format!("condensate_n{n}_p{p}"), Target::Fock { space, rho, p }, Variational, 0.0, None);
    }
    let (space, rho) = manybody::fermi_sea(3, 3)?;
    push(
        "fermi_sea_n3_m3_p2".into(),
        Target::Fock { space, rho, p: 2 },
        Variational,
        1.5f64.log2(),
        None,
    );
    push(
        "ferromagnet_n4_p2".into(),
        Target::Spin {
            rho: manybody::polarized(4)?,
            p: 2,
        },
        Variational,
        0.0,
        None,
    );
    push(
        "paramagnet_n4_p1".into(),
        Target::Spin {
            rho: manybody::infinite_temperature(4)?,
            p: 1,
        },
        Variational,
        0.0,
        None,
    );
    push(
        "paramagnet_n8_p2".into(),
        Target::Spin {
            rho: manybody::infinite_temperature(8)?,
            p: 2,
        },
        Variational,
        3f64.log2(),
        Some("finite_n"),
    );
    Ok(out)
}

/// The example table. Every row uses base 2; unflagged rows must agree with
/// their closed form within [`REPRODUCE_TOL`].
pub fn reproduce(settings: &Settings) -> Result<Vec<ReproduceRow>, CliError> {
    settings.opts.validate()?;
    cases()?
        .into_iter()
        .map(|c| {
            let r = compute(&c.target, c.mode, LogBase::TWO, &settings.opts)?;
            Ok(ReproduceRow {
                name: c.name,
                epsilon_computed: r.epsilon,
                epsilon_closed_form: c.formula,
                abs_diff: (r.epsilon - c.formula).abs(),
                mode_used: c.mode.to_string(),
                flag: c.flag.map(str::to_string),
            })
        })
        .collect()
}

/// Property audit over `seeds`.
pub fn verify(seeds: &[u64], settings: &Settings) -> Result<VerifySummary, CliError> {
    if seeds.is_empty() {
        return Err(CliError::Input("at least one seed is required".into()));
    }
    settings.opts.validate()?;
    let outcomes = audit(&Property::ALL, seeds, &settings.opts)?;
    let properties: Vec<PropertySummary> = outcomes
        .iter()
        .map(|o| PropertySummary {
            property: o.property.name().to_string(),
            passed: o.passed,
            failed: o.failed,
            worst_deviation: o.worst,
            tolerance: o.property.tolerance(),
            failures: o
                .failures
                .iter()
                .map(|c| FailureInfo {
                    seed: c.seed,
                    deviation: c.deviation,
                    detail: c.detail.clone(),
                })
                .collect(),
        })
        .collect();
    Ok(VerifySummary {
        seeds: seeds.to_vec(),
        all_passed: properties.iter().all(|p| p.failed == 0),
        properties,
        tool_version: TOOL_VERSION.to_string(),
    })
}

/// `"0..19"` (both ends included), `"0..=19"`, `"3,5,8"` or `"7"`.
pub fn parse_seeds(text: &str) -> Result<Vec<u64>, CliError> {
    let bad = || CliError::Input(format!("cannot parse seeds {text:?}"));
    let num = |s: &str| s.trim().parse::<u64>().map_err(|_| bad());
    let text = text.trim();
    if let Some((a, b)) = text.split_once("..") {
        let b = b.strip_prefix('=').unwrap_or(b);
        let (a, b) = (num(a)?, num(b)?);
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    text.split(',').map(num).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_ranges() {
        assert_eq!(parse_seeds("0..19").unwrap().len(), 20);
        assert_eq!(parse_seeds("2..=4").unwrap(), vec![2, 3, 4]);
        assert_eq!(parse_seeds("5, 1").unwrap(), vec![5, 1]);
        assert!(parse_seeds("4..2").is_err());
        assert!(parse_seeds("x").is_err());
    }

    #[test]
    fn factorial_ratio() {
        assert!((log2_ratio_factorials(4, 2) - (4.0f64 / 3.0).log2()).abs() < 1e-14);
        assert!((log2_ratio_factorials(3, 3) - 4.5f64.log2()).abs() < 1e-14);
    }
}
