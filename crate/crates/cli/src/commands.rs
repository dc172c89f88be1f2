//! Subcommand implementations. Each returns a [`Report`]; writing it out is
//! left to the caller.

use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use ngforge_core::analysis::{
    concurrence_bell_like, joint_parity_map, linear_entropy, negativity_volume, pure_state_concurrence, sign_changes,
    tmsv_linear_entropy, wigner,
};
use ngforge_core::gaussian::squeezed_coherent;
use ngforge_core::measurement::{sigma_x_selection, weak_value, SelectionPair, WeakValue};
use ngforge_core::protocols::{
    prepare, psi1_norm_inv_sq, psi1_pipeline, Family, Prepared, PreparedState, ProtocolSpec,
};
use ngforge_core::truncation::{check_tail, escalate, Escalation, TAIL_TOLERANCE};
use ngforge_core::verify::{self, Level, VerifyOptions, VerifyReport};
use ngforge_core::{BeamSplitterParam, Complex64, FockVector, SqueezeParam, TruncationDim, TwoModeVector};
use serde::Serialize;
use serde_json::json;

use crate::args::{Axis, EntropyArg, GridArgs, Metric, OutputArgs, SectionArgs, StateArgs};
use crate::output::{Report, Table};
use crate::CliError;

/// Values below this magnitude are treated as zero when counting sign changes.
pub const SIGN_FLOOR: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(name = "ngforge", version, about = "Non-Gaussian state engineering by postselected measurement")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fock amplitudes and success probability of one state.
    State {
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Wigner map of a single-mode state.
    Wigner {
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Joint-parity section of a two-mode state.
    Jointwigner {
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        section: SectionArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Metric over a one- or two-axis parameter grid.
    Sweep {
        #[command(flatten)]
        sweep: SweepArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Cross-module invariant suite.
    Verify(VerifyArgs),
    /// Data behind a figure: one CSV per panel plus a manifest.
    Figure(crate::figures::FigureArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepArgs {
    #[command(flatten)]
    pub state: StateArgs,
    /// First axis as name:start:stop:n with name in {s, theta, delta, r, wv}.
    #[arg(long)]
    pub x: Axis,
    /// Optional second axis.
    #[arg(long)]
    pub y: Option<Axis>,
    #[arg(long, value_enum)]
    pub metric: Metric,
    /// Linear-entropy prefactor convention.
    #[arg(long, value_enum, default_value_t = EntropyArg::Asymptotic)]
    pub entropy: EntropyArg,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Run the fast suite (default).
    #[arg(long, conflicts_with = "full")]
    pub fast: bool,
    /// Run the full suite.
    #[arg(long)]
    pub full: bool,
    /// Replaces the 50:50 splitter angle in the two-mode pipeline checks.
    #[arg(long, hide = true, allow_negative_numbers = true)]
    pub bs_tau: Option<f64>,
    /// Emit the report as JSON instead of text lines.
    #[arg(long)]
    pub json: bool,
}

// ---------------------------------------------------------------------------
// Parameter resolution

/// State parameters after selection and truncation defaults are applied.
#[derive(Debug, Clone)]
pub struct Resolved {
    /// `None` for the bare pointer.
    pub spec: Option<ProtocolSpec>,
    pub alpha: Complex64,
    pub squeeze: SqueezeParam,
    pub wv: WeakValue,
    pub overlap: Complex64,
    pub dim: TruncationDim,
}

fn env_nmax() -> Result<Option<usize>, CliError> {
    match std::env::var("NGFORGE_NMAX") {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Usage(format!("NGFORGE_NMAX must be a positive integer, got `{v}`"))),
        Err(_) => Ok(None),
    }
}

pub fn resolve(args: &StateArgs) -> Result<Resolved, CliError> {
    let squeeze = SqueezeParam::new(args.r, args.phi)?;
    let sel = match (args.theta, args.wv) {
        (Some(theta), _) => sigma_x_selection(theta, args.delta.unwrap_or(0.0))?,
        (None, w) => SelectionPair::for_weak_value(WeakValue::new(w.unwrap_or_default())?)?,
    };
    let wv = match args.wv {
        Some(w) if args.theta.is_none() => WeakValue::new(w)?,
        _ => weak_value(&sel)?,
    };
    let overlap = sel.overlap();
    let family = args.family.family();
    let default_dim = if family.is_some_and(Family::is_two_mode) {
        TruncationDim::two_mode_default()
    } else {
        TruncationDim::single_mode_default()
    };
    let dim = match args.nmax.or(env_nmax()?) {
        Some(n) => TruncationDim::new(n)?,
        None => default_dim,
    };
    let spec = family.map(|f| {
        let mut spec = ProtocolSpec::new(f, args.s, wv);
        spec.alpha = args.alpha;
        spec.squeeze = squeeze;
        spec.overlap = overlap;
        spec.beta = args.beta;
        spec.dim = dim;
        spec
    });
    if let Some(spec) = &spec {
        spec.validate()?;
    } else if !(args.s >= 0.0 && args.s.is_finite()) {
        return Err(ngforge_core::Error::InvalidParameter {
            name: "s",
            reason: format!("must be finite and >= 0, got {}", args.s),
        }
        .into());
    }
    Ok(Resolved {
        spec,
        alpha: args.alpha,
        squeeze,
        wv,
        overlap,
        dim,
    })
}

/// The bare squeezed-coherent pointer S(ξ)-displaced by α.
pub fn pointer_state(res: &Resolved) -> Result<FockVector, CliError> {
    let (v, _) = escalate(res.dim, Escalation::SINGLE, |d| {
        let v = squeezed_coherent(res.alpha, res.squeeze, d);
        check_tail(&v, TAIL_TOLERANCE)?;
        v.normalized()
    })?;
    Ok(v)
}

/// Builds the state named by `args`.
pub fn build(args: &StateArgs) -> Result<(Resolved, Prepared), CliError> {
    let res = resolve(args)?;
    let prepared = match &res.spec {
        Some(spec) => prepare(spec)?,
        None => Prepared {
            state: PreparedState::Single(pointer_state(&res)?),
            p: 1.0,
            analytic_fidelity: Some(1.0),
            bell: None,
            warnings: Vec::new(),
        },
    };
    for w in &prepared.warnings {
        eprintln!("warning: {w}");
    }
    Ok((res, prepared))
}

fn echo_resolved(report: &mut Report, res: &Resolved, prepared: &Prepared) {
    report.result("wv", [res.wv.value().re, res.wv.value().im]);
    report.result("overlap", [res.overlap.re, res.overlap.im]);
    report.result("p", prepared.p);
    report.result("n_max", prepared.state.n_max());
    report.result("tail_mass", prepared.state.tail_mass());
}

// ---------------------------------------------------------------------------
// state

pub fn cmd_state(args: &StateArgs) -> Result<Report, CliError> {
    let (res, prepared) = build(args)?;
    let table = match &prepared.state {
        PreparedState::Single(v) => {
            let mut t = Table::new(&["index", "re", "im"]);
            for (k, z) in v.amplitudes().iter().enumerate() {
                t.push(vec![k as f64, z.re, z.im]);
            }
            t
        }
        PreparedState::TwoMode(v) => {
            let mut t = Table::new(&["a", "b", "re", "im"]);
            let n = v.dim().get();
            for a in 0..n {
                for b in 0..n {
                    let z = v.amplitude(a, b);
                    t.push(vec![a as f64, b as f64, z.re, z.im]);
                }
            }
            t
        }
    };
    let mut report = Report::new("state", args, table);
    echo_resolved(&mut report, &res, &prepared);
    report.result("analytic_fidelity", prepared.analytic_fidelity);
    if let PreparedState::Single(v) = &prepared.state {
        report.result("parity", v.parity_expectation());
        report.result("mean_photon_number", v.mean_photon_number());
    }
    if let Some(b) = &prepared.bell {
        report.result("bell_fidelity", b.fidelity_plus.max(b.fidelity_minus));
        report.result("bell_fidelity_plus", b.fidelity_plus);
        report.result("bell_fidelity_minus", b.fidelity_minus);
        report.result("bell_span_weight", b.span_weight);
    }
    report.result("warnings", &prepared.warnings);
    Ok(report)
}

// ---------------------------------------------------------------------------
// wigner / jointwigner

#[derive(Serialize)]
struct WignerConfig<'a> {
    #[serde(flatten)]
    state: &'a StateArgs,
    grid: &'a GridArgs,
}

pub fn cmd_wigner(args: &StateArgs, grid: &GridArgs) -> Result<Report, CliError> {
    if args.family.is_two_mode() {
        return Err(CliError::Usage(format!(
            "wigner needs a single-mode family; use jointwigner for {:?}",
            args.family
        )));
    }
    let g = grid.grid()?;
    let (res, prepared) = build(args)?;
    let PreparedState::Single(v) = &prepared.state else {
        unreachable!("single-mode family");
    };
    let map = wigner(v, &g)?;
    let (xs, ps) = (g.xs(), g.ps());
    let mut t = Table::new(&["x", "p", "W"]);
    for (i, &x) in xs.iter().enumerate() {
        for (j, &p) in ps.iter().enumerate() {
            t.push(vec![x, p, map.values[(i, j)]]);
        }
    }
    let mut report = Report::new("wigner", WignerConfig { state: args, grid }, t);
    echo_resolved(&mut report, &res, &prepared);
    report.result("min", map.min());
    report.result("max", map.max());
    report.result("integral", map.integral());
    report.result("negativity", negativity_volume(&map));
    Ok(report)
}

#[derive(Serialize)]
struct SectionConfig<'a> {
    #[serde(flatten)]
    state: &'a StateArgs,
    section: &'a SectionArgs,
}

pub fn cmd_jointwigner(args: &StateArgs, section: &SectionArgs) -> Result<Report, CliError> {
    if !args.family.is_two_mode() {
        return Err(CliError::Usage(format!(
            "jointwigner needs a two-mode family, got {:?}",
            args.family
        )));
    }
    let spec = section.spec();
    spec.validate()?;
    let (res, prepared) = build(args)?;
    let PreparedState::TwoMode(v) = &prepared.state else {
        unreachable!("two-mode family");
    };
    let map = joint_parity_map(v, &spec)?;
    let coords = &map.coordinates;
    let t = if spec.kind.is_2d() {
        let mut t = Table::new(&["x", "y", "pj"]);
        for (i, &x) in coords.iter().enumerate() {
            for (j, &y) in coords.iter().enumerate() {
                t.push(vec![x, y, map.values[(i, j)]]);
            }
        }
        t
    } else {
        let mut t = Table::new(&["coord", "pj"]);
        for (i, &x) in coords.iter().enumerate() {
            t.push(vec![x, map.values[(i, 0)]]);
        }
        t
    };
    let mut report = Report::new("jointwigner", SectionConfig { state: args, section }, t);
    echo_resolved(&mut report, &res, &prepared);
    report.result("min", map.min());
    report.result("max", map.max());
    report.result("central_value", map.central_value());
    if !spec.kind.is_2d() {
        let col: Vec<f64> = map.values.column(0).iter().copied().collect();
        report.result("sign_changes", sign_changes(&col, SIGN_FLOOR));
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// sweep

fn two_mode_state(prepared: &Prepared) -> &TwoModeVector {
    match &prepared.state {
        PreparedState::TwoMode(v) => v,
        PreparedState::Single(_) => unreachable!("two-mode family"),
    }
}

/// Closed-form success probability |⟨ψ_f|ψ_i⟩|²/4 · N⁻² of the measured mode.
fn closed_probability(res: &Resolved, s: f64) -> f64 {
    let spec = res.spec.as_ref().expect("protocol family");
    let (alpha, xi) = match spec.family {
        Family::Phi3 | Family::Phi4 => (spec.beta.unwrap_or(Complex64::new(s, 0.0)), SqueezeParam::zero()),
        _ => (spec.alpha, spec.squeeze),
    };
    0.25 * res.overlap.norm_sqr() * psi1_norm_inv_sq(alpha, xi, s, res.wv)
}

fn bell_family(f: Family) -> bool {
    matches!(f, Family::Phi3 | Family::Phi4)
}

/// Metric and its reference value (NaN when no reference applies).
pub fn metric_point(args: &StateArgs, metric: Metric, entropy: EntropyArg) -> Result<(f64, f64), CliError> {
    let res = resolve(args)?;
    let Some(spec) = res.spec.clone() else {
        return Err(CliError::Usage("sweep needs a protocol family".into()));
    };
    match metric {
        Metric::P => {
            let p = if spec.family.is_two_mode() {
                prepare(&spec)?.p
            } else {
                psi1_pipeline(spec.alpha, spec.squeeze, spec.s, spec.wv, spec.overlap, spec.dim)?.p
            };
            Ok((p, closed_probability(&res, spec.s)))
        }
        Metric::LinearEntropy | Metric::Concurrence if !spec.family.is_two_mode() => Err(CliError::Usage(format!(
            "{metric:?} needs a two-mode family, got {}",
            spec.family.name()
        ))),
        Metric::LinearEntropy => {
            let prepared = prepare(&spec)?;
            let e = linear_entropy(two_mode_state(&prepared), entropy.convention())?;
            Ok((e, tmsv_linear_entropy(spec.squeeze.r())))
        }
        Metric::Concurrence => {
            let prepared = prepare(&spec)?;
            let c = pure_state_concurrence(two_mode_state(&prepared))?;
            let closed_form = bell_family(spec.family) && spec.beta.is_none_or(|b| (b - spec.s).norm() < 1e-12);
            let reference = if closed_form {
                concurrence_bell_like(spec.s, spec.wv)?
            } else {
                f64::NAN
            };
            Ok((c, reference))
        }
    }
}

fn metric_columns(metric: Metric) -> [&'static str; 2] {
    match metric {
        Metric::P => ["p", "p_closed"],
        Metric::LinearEntropy => ["linear_entropy", "tmsv"],
        Metric::Concurrence => ["concurrence", "concurrence_closed"],
    }
}

pub fn cmd_sweep(sweep: &SweepArgs) -> Result<Report, CliError> {
    if sweep.y.is_some_and(|y| y.name == sweep.x.name) {
        return Err(CliError::Usage("sweep axes must differ".into()));
    }
    let [m, reference] = metric_columns(sweep.metric);
    let mut names = vec![sweep.x.name.label()];
    if let Some(y) = sweep.y {
        names.push(y.name.label());
    }
    names.extend([m, reference]);
    let mut t = Table::new(&names);
    let ys: Vec<Option<f64>> = match sweep.y {
        Some(y) => y.values().into_iter().map(Some).collect(),
        None => vec![None],
    };
    for x in sweep.x.values() {
        let at_x = sweep.x.name.apply(&sweep.state, x);
        for &y in &ys {
            let point = match (sweep.y, y) {
                (Some(axis), Some(v)) => axis.name.apply(&at_x, v),
                _ => at_x.clone(),
            };
            let (value, refv) = metric_point(&point, sweep.metric, sweep.entropy)?;
            let mut row = vec![x];
            row.extend(y);
            row.extend([value, refv]);
            t.push(row);
        }
    }
    let values = t.column(m).expect("metric column");
    let mut report = Report::new("sweep", sweep, t);
    report.result("min", values.iter().copied().fold(f64::INFINITY, f64::min));
    report.result("max", values.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    Ok(report)
}

// ---------------------------------------------------------------------------
// verify

pub fn verify_options(args: &VerifyArgs) -> Result<VerifyOptions, CliError> {
    let mut opts = VerifyOptions::new(if args.full { Level::Full } else { Level::Fast });
    if let Some(tau) = args.bs_tau {
        let b = BeamSplitterParam::balanced();
        opts.beam_splitter = BeamSplitterParam::new(tau, b.phi_tau, b.phi_rho)?;
    }
    Ok(opts)
}

/// Runs the suite; returns the rendered report and whether every check passed.
pub fn cmd_verify(args: &VerifyArgs) -> Result<(String, bool), CliError> {
    let opts = verify_options(args)?;
    let start = Instant::now();
    let report: VerifyReport = verify::run(&opts);
    let elapsed = start.elapsed().as_secs_f64();
    let passed = report.passed();
    let text = if args.json {
        let mut s = serde_json::to_string_pretty(&json!({
            "level": report.level,
            "passed": passed,
            "seconds": elapsed,
            "checks": report.checks,
        }))
        .expect("report serializes");
        s.push('\n');
        s
    } else {
        let mut s = String::new();
        for c in &report.checks {
            s.push_str(&c.to_string());
            s.push('\n');
        }
        let n_pass = report.checks.iter().filter(|c| c.passed).count();
        s.push_str(&format!(
            "{} {}/{} checks passed in {elapsed:.1} s\n",
            if passed { "OK" } else { "FAILED" },
            n_pass,
            report.checks.len()
        ));
        s
    };
    Ok((text, passed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::args::FamilyArg;

    fn args(f: FamilyArg) -> StateArgs {
        StateArgs::new(f)
    }

    #[test]
    fn selection_by_angles_matches_weak_value() {
        let mut a = args(FamilyArg::Psi4);
        a.s = 1.0;
        a.theta = Some(std::f64::consts::FRAC_PI_2);
        let r = resolve(&a).unwrap();
        assert!((r.wv.value() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((r.overlap.re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn validation_errors_map_to_exit_two() {
        let mut a = args(FamilyArg::Psi2);
        a.alpha = Complex64::new(1.0, 0.0);
        let e = resolve(&a).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(e.to_string().contains("alpha"));
    }

    #[test]
    fn vacuum_pointer_origin() {
        let mut g = GridArgs {
            x_min: -1.0,
            x_max: 1.0,
            p_min: -1.0,
            p_max: 1.0,
            points: 3,
        };
        let r = cmd_wigner(&args(FamilyArg::Input), &g).unwrap();
        let w = r.table.rows[4][2];
        assert!((w - std::f64::consts::FRAC_2_PI).abs() < 1e-12);
        g.points = 1;
        assert_eq!(cmd_wigner(&args(FamilyArg::Input), &g).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn two_mode_wigner_is_rejected() {
        let g = GridArgs {
            x_min: -1.0,
            x_max: 1.0,
            p_min: -1.0,
            p_max: 1.0,
            points: 3,
        };
        assert_eq!(cmd_wigner(&args(FamilyArg::Phi3), &g).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn psi4_probability_matches_reference() {
        let mut a = args(FamilyArg::Psi4);
        a.s = 1.0;
        a.wv = Some(Complex64::new(0.0, -1.0));
        let (p, refp) = metric_point(&a, Metric::P, EntropyArg::Asymptotic).unwrap();
        assert!((p - refp).abs() < 1e-12);
    }

    #[test]
    fn bell_probability_matches_reference() {
        let mut a = args(FamilyArg::Phi4);
        a.s = 1.0;
        a.wv = Some(Complex64::new(2.0, 0.0));
        let (p, refp) = metric_point(&a, Metric::P, EntropyArg::Asymptotic).unwrap();
        assert!((p - refp).abs() < 1e-10 * refp.max(1.0), "{p} vs {refp}");
    }
}
