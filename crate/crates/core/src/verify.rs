//! Cross-module consistency suite.
//!
//! Each check compares two independent constructions of the same quantity
//! and records the worst deviation seen. Random draws come from a seeded
//! ChaCha stream, so reports are reproducible.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analysis::{
    concurrence_bell_like, joint_parity_map, negativity_volume, pure_state_concurrence, wigner, PhaseSpaceGrid,
    SectionKind, SectionSpec,
};
use crate::error::Result;
use crate::fock::{fidelity, vacuum, Mode, PureState, TruncationDim};
use crate::gaussian::{squeezed_coherent, squeezed_vacuum, BeamSplitterParam, SqueezeParam};
use crate::measurement::{
    evolve_full, postselect, sigma_x_selection, success_probability_closed, ClosedFormInput, CouplingSpec,
    SelectionPair, WeakValue,
};
use crate::protocols::{
    bell_like, bell_pipeline, eta_inv_sq, even_cat, gamma_inv_sq, kappa, phi_pipeline, phi_two_mode_cat, psi1,
    psi1_norm_inv_sq, psi1_pipeline, psi4_vacuum_cat, BellVariant,
};
use crate::truncation::{check_tail, escalate, Escalation, TAIL_TOLERANCE};

/// Suite size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Fast,
    Full,
}

/// Knobs for the suite. `beam_splitter` replaces the 50:50 splitter in the
/// two-mode pipelines only, so that a wrong convention shows up as a
/// pipeline/closed-form mismatch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub level: Level,
    pub beam_splitter: BeamSplitterParam,
    pub seed: u64,
}

impl VerifyOptions {
    pub fn new(level: Level) -> Self {
        VerifyOptions {
            level,
            beam_splitter: BeamSplitterParam::balanced(),
            seed: 0x5eed,
        }
    }
}

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub cases: usize,
    pub worst: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<28} cases={:<4} worst={:.3e} tol={:.1e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.cases,
            self.worst,
            self.tolerance
        )?;
        if !self.detail.is_empty() {
            write!(f, "  {}", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub level: Level,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

struct Tracker {
    name: &'static str,
    tolerance: f64,
    worst: f64,
    cases: usize,
    detail: String,
    error: Option<String>,
}

impl Tracker {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Tracker {
            name,
            tolerance,
            worst: 0.0,
            cases: 0,
            detail: String::new(),
            error: None,
        }
    }

    fn record(&mut self, deviation: f64, label: impl FnOnce() -> String) {
        self.cases += 1;
        if deviation > self.worst || deviation.is_nan() {
            self.worst = deviation;
            self.detail = label();
        }
    }

    fn run(&mut self, case: impl FnOnce(&mut Self) -> Result<()>) {
        if self.error.is_some() {
            return;
        }
        if let Err(e) = case(self) {
            self.error = Some(e.to_string());
        }
    }

    fn finish(self) -> CheckResult {
        let passed = self.error.is_none() && self.worst <= self.tolerance;
        let detail = match self.error {
            Some(e) => format!("error: {e}"),
            None if self.detail.is_empty() => String::new(),
            None => format!("at {}", self.detail),
        };
        CheckResult {
            name: self.name,
            passed,
            cases: self.cases,
            worst: self.worst,
            tolerance: self.tolerance,
            detail,
        }
    }
}

fn by_level<T>(level: Level, fast: T, full: T) -> T {
    match level {
        Level::Fast => fast,
        Level::Full => full,
    }
}

fn random_wv(rng: &mut ChaCha8Rng, max_modulus: f64) -> WeakValue {
    let m = max_modulus * rng.random::<f64>();
    WeakValue(Complex64::from_polar(m, 2.0 * PI * rng.random::<f64>()))
}

/// One random draw compared between the branch channel and the composite
/// unitary oracle. Returns (1 − F, |Δp|).
pub fn channel_oracle_deviation(
    sel: &SelectionPair,
    alpha: Complex64,
    xi: SqueezeParam,
    s: f64,
) -> Result<(f64, f64)> {
    let coupling = CouplingSpec::with_oracle(2.0 * s, 1.0, crate::fock::QuadratureKind::P)?;
    let (out, _) = escalate(TruncationDim::single_mode_default(), Escalation::SINGLE, |d| {
        let pointer = squeezed_coherent(alpha, xi, d);
        check_tail(&pointer, TAIL_TOLERANCE)?;
        let pointer = pointer.normalized()?;
        let channel = postselect(sel, &pointer, &coupling)?;
        let oracle = evolve_full(sel, &pointer, &coupling)?;
        let f = fidelity(&channel.state, &oracle.pointer.normalized()?)?;
        Ok((1.0 - f, (channel.p - oracle.p).abs()))
    })?;
    Ok(out)
}

fn channel_vs_oracle(opts: &VerifyOptions, rng: &mut ChaCha8Rng) -> Vec<CheckResult> {
    let mut fid = Tracker::new("channel-vs-oracle fidelity", 1e-10);
    let mut prob = Tracker::new("channel-vs-oracle p", 1e-10);
    let draws = by_level(opts.level, 10, 50);
    for _ in 0..draws {
        let s = 2.0 * rng.random::<f64>();
        let xi = SqueezeParam::new(rng.random::<f64>(), 2.0 * PI * rng.random::<f64>()).expect("valid draw");
        let alpha = Complex64::from_polar(0.5 * rng.random::<f64>(), 2.0 * PI * rng.random::<f64>());
        let wv = random_wv(rng, 10.0);
        let label = || format!("s={s:.3} r={:.3} phi={:.3} alpha={alpha:.3} wv={:.3}", xi.r(), xi.phi(), wv.value());
        let mut outcome = None;
        fid.run(|t| {
            let sel = SelectionPair::for_weak_value(wv)?;
            let (df, dp) = channel_oracle_deviation(&sel, alpha, xi, s)?;
            t.record(df, label);
            outcome = Some(dp);
            Ok(())
        });
        if let Some(dp) = outcome {
            prob.record(dp, label);
        }
    }
    if fid.error.is_some() {
        prob.error.clone_from(&fid.error);
    }
    vec![fid.finish(), prob.finish()]
}

fn closed_probability(opts: &VerifyOptions) -> CheckResult {
    let mut t = Tracker::new("success-probability closed", 1e-10);
    let n_theta = by_level(opts.level, 9, 33);
    for s in [0.5, 1.0, 2.0] {
        for (input, xi) in [(ClosedFormInput::Vacuum, 0.0), (ClosedFormInput::SqueezedVacuum(0.5), 0.5)] {
            for i in 0..n_theta {
                let theta = PI * i as f64 / n_theta as f64;
                t.run(|t| {
                    let sel = sigma_x_selection(theta, 0.0)?;
                    let pointer = squeezed_vacuum(SqueezeParam::real(xi)?, TruncationDim::new(96)?).normalized()?;
                    let res = postselect(&sel, &pointer, &CouplingSpec::momentum(s)?)?;
                    let closed = success_probability_closed(input, theta, 0.0, s)?;
                    t.record((res.p - closed).abs(), || format!("s={s} r={xi} theta={theta:.4}"));
                    Ok(())
                });
            }
        }
    }
    t.finish()
}

fn single_mode_analytic(opts: &VerifyOptions, rng: &mut ChaCha8Rng) -> Vec<CheckResult> {
    let mut fid = Tracker::new("psi analytic-vs-pipeline", 1e-9);
    let mut norm = Tracker::new("psi closed-form norm", 1e-10);
    for _ in 0..by_level(opts.level, 6, 24) {
        let s = 1.5 * rng.random::<f64>();
        let xi = SqueezeParam::new(0.8 * rng.random::<f64>(), 2.0 * PI * rng.random::<f64>()).expect("valid draw");
        let alpha = Complex64::from_polar(rng.random::<f64>(), 2.0 * PI * rng.random::<f64>());
        let wv = random_wv(rng, 10.0);
        let label = || format!("s={s:.3} r={:.3} phi={:.3} alpha={alpha:.3} wv={:.3}", xi.r(), xi.phi(), wv.value());
        let mut p = None;
        fid.run(|t| {
            let one = Complex64::new(1.0, 0.0);
            let res = psi1_pipeline(alpha, xi, s, wv, one, TruncationDim::single_mode_default())?;
            let an = psi1(alpha, xi, s, wv, res.state.dim())?;
            t.record(1.0 - fidelity(&an.resized(res.state.dim()), &res.state)?, label);
            p = Some(res.p);
            Ok(())
        });
        if let Some(p) = p {
            let closed = psi1_norm_inv_sq(alpha, xi, s, wv);
            norm.record((4.0 * p - closed).abs() / closed, label);
        }
    }
    if fid.error.is_some() {
        norm.error.clone_from(&fid.error);
    }
    vec![fid.finish(), norm.finish()]
}

fn two_mode_pipelines(opts: &VerifyOptions) -> Vec<CheckResult> {
    let bs = opts.beam_splitter;
    let one = Complex64::new(1.0, 0.0);
    let start = TruncationDim::two_mode_default();
    let mut phi = Tracker::new("phi pipeline identity", 1e-9);
    let mut prob = Tracker::new("phi probability invariance", 1e-12);
    let cases: Vec<(f64, f64, f64)> = match opts.level {
        Level::Fast => vec![(0.5, 1.0, 0.0), (1.0, 1.5, 10.0)],
        Level::Full => [0.5, 1.0]
            .iter()
            .flat_map(|&r| [1.0, 1.5].iter().flat_map(move |&s| [0.0, 10.0].map(|w| (r, s, w))))
            .collect(),
    };
    for &(r, s, x) in &cases {
        for mode in [Mode::A, Mode::B] {
            let wv = WeakValue::real(x);
            phi.run(|t| {
                let xi = SqueezeParam::real(r)?;
                let res = phi_pipeline(xi, s, wv, one, mode, bs, start)?;
                let an = phi_two_mode_cat(xi, s, wv, mode, res.state.dim())?;
                let label = || format!("r={r} s={s} wv={x} measured={mode:?}");
                let dev = if an.n_max() == res.state.n_max() {
                    1.0 - fidelity(&an, &res.state)?
                } else {
                    1.0
                };
                t.record(dev, label);
                // The measured mode carries |ξ⟩ in both arrangements.
                let single = psi1_pipeline(Complex64::new(0.0, 0.0), xi, s, wv, one, res.state.dim())?.p;
                prob.record((res.p - single).abs() / single, label);
                if x == 0.0 {
                    let k = kappa(r, s);
                    prob.record((k * k * eta_inv_sq(r, s, wv) - 1.0).abs(), || format!("kappa r={r} s={s}"));
                }
                Ok(())
            });
        }
    }
    if phi.error.is_some() {
        prob.error.clone_from(&phi.error);
    }

    let mut bell = Tracker::new("bell pipeline identity", 1e-9);
    let bell_s = by_level(opts.level, vec![1.0, 2.5], vec![0.5, 1.0, 1.5, 2.5]);
    let bell_w = by_level(
        opts.level,
        vec![Complex64::new(0.0, 0.0), Complex64::new(10.0, 0.0)],
        vec![Complex64::new(0.0, 0.0), Complex64::new(10.0, 0.0), Complex64::new(0.0, -1.0), Complex64::new(-3.0, 2.0)],
    );
    for &s in &bell_s {
        for &w in &bell_w {
            for variant in [BellVariant::Phi3, BellVariant::Phi4] {
                let wv = WeakValue(w);
                bell.run(|t| {
                    let res = bell_pipeline(s, Complex64::new(s, 0.0), wv, one, variant, bs, start)?;
                    let an = bell_like(s, wv, variant, res.state.dim())?;
                    let dev = if an.n_max() == res.state.n_max() {
                        1.0 - fidelity(&an, &res.state)?
                    } else {
                        1.0
                    };
                    t.record(dev, || format!("s={s} wv={w} {variant:?}"));
                    let closed = 0.25 * gamma_inv_sq(s, wv);
                    t.record((res.p - closed).abs() / closed, || format!("p at s={s} wv={w} {variant:?}"));
                    Ok(())
                });
            }
        }
    }
    vec![phi.finish(), prob.finish(), bell.finish()]
}

fn concurrence_oracle(opts: &VerifyOptions) -> CheckResult {
    let mut t = Tracker::new("concurrence oracle", 1e-8);
    let n = by_level(opts.level, 5, 9);
    let variants: &[BellVariant] = by_level(opts.level, &[BellVariant::Phi3], &[BellVariant::Phi3, BellVariant::Phi4]);
    for i in 0..n {
        for j in 0..n {
            let s = 2.0 * i as f64 / (n - 1) as f64;
            let wv = WeakValue::real(10.0 * j as f64 / (n - 1) as f64);
            for &variant in variants {
                t.run(|t| {
                    let st = bell_like(s, wv, variant, TruncationDim::two_mode_default())?;
                    let dev = (pure_state_concurrence(&st)? - concurrence_bell_like(s, wv)?).abs();
                    t.record(dev, || format!("s={s:.3} wv={:.3} {variant:?}", wv.value().re));
                    Ok(())
                });
            }
        }
    }
    t.finish()
}

fn wigner_normalization(opts: &VerifyOptions) -> Vec<CheckResult> {
    let grid = PhaseSpaceGrid::default();
    let mut norm = Tracker::new("wigner normalization", 1e-3);
    let mut gauss = Tracker::new("gaussian negativity", 1e-6);
    let d = TruncationDim::single_mode_default();
    norm.run(|t| {
        let mut states = vec![("vacuum", vacuum(d)), ("even cat s=1.5", even_cat(1.5, d)?)];
        if opts.level == Level::Full {
            states.push(("psi4 s=1.5 wv=-i", psi4_vacuum_cat(1.5, WeakValue(Complex64::new(0.0, -1.0)), d)?));
            states.push((
                "squeezed coherent",
                squeezed_coherent(Complex64::new(1.0, 0.5), SqueezeParam::real(0.5)?, d).normalized()?,
            ));
        }
        for (name, st) in states {
            let map = wigner(&st, &grid)?;
            t.record((map.integral() - 1.0).abs(), || name.to_string());
            if name == "vacuum" || name == "squeezed coherent" {
                gauss.record(negativity_volume(&map).abs(), || name.to_string());
            }
        }
        Ok(())
    });
    if norm.error.is_some() {
        gauss.error.clone_from(&norm.error);
    }
    vec![norm.finish(), gauss.finish()]
}

fn parity_bounds(opts: &VerifyOptions) -> CheckResult {
    let mut t = Tracker::new("joint parity bound", 1e-9);
    let kinds: &[SectionKind] = by_level(
        opts.level,
        &[SectionKind::ReDiag, SectionKind::ImDiag],
        &[SectionKind::ReRe, SectionKind::ImIm, SectionKind::ReDiag, SectionKind::ImDiag],
    );
    for r in [0.2, 1.0] {
        t.run(|t| {
            let st = phi_two_mode_cat(SqueezeParam::real(r)?, 1.5, WeakValue::real(10.0), Mode::B, TruncationDim::two_mode_default())?;
            for &kind in kinds {
                let mut spec = SectionSpec::new(kind);
                if kind.is_2d() && opts.level == Level::Fast {
                    spec.n_points = 41;
                }
                let map = joint_parity_map(&st, &spec)?;
                let excess = map.values.iter().map(|v| v.abs() - 1.0).fold(0.0, f64::max);
                t.record(excess, || format!("r={r} {kind:?}"));
            }
            Ok(())
        });
    }
    t.finish()
}

/// Runs the suite.
pub fn run(opts: &VerifyOptions) -> VerifyReport {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut checks = Vec::new();
    checks.extend(channel_vs_oracle(opts, &mut rng));
    checks.push(closed_probability(opts));
    checks.extend(single_mode_analytic(opts, &mut rng));
    checks.extend(two_mode_pipelines(opts));
    checks.push(concurrence_oracle(opts));
    checks.extend(wigner_normalization(opts));
    checks.push(parity_bounds(opts));
    VerifyReport {
        level: opts.level,
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tracker_keeps_worst_case() {
        let mut t = Tracker::new("x", 0.5);
        t.record(0.1, || "a".into());
        t.record(0.3, || "b".into());
        t.record(0.2, || "c".into());
        let r = t.finish();
        assert!(r.passed);
        assert_eq!(r.cases, 3);
        assert_eq!(r.worst, 0.3);
        assert_eq!(r.detail, "at b");
    }

    #[test]
    fn tracker_fails_on_error() {
        let mut t = Tracker::new("x", 0.5);
        t.run(|_| Err(crate::Error::NonFinite));
        let r = t.finish();
        assert!(!r.passed);
        assert!(r.detail.starts_with("error"));
    }

    #[test]
    fn oracle_draw_agrees() {
        let sel = SelectionPair::for_weak_value(WeakValue(Complex64::new(3.0, -1.0))).unwrap();
        let xi = SqueezeParam::new(0.6, 1.0).unwrap();
        let (df, dp) = channel_oracle_deviation(&sel, Complex64::new(0.3, 0.2), xi, 1.2).unwrap();
        assert!(df < 1e-10 && dp < 1e-10, "{df} {dp}");
    }
}
