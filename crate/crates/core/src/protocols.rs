//! State-engineering recipes: Gaussian inputs, the postselected channel, and
//! (for two modes) a balanced beam splitter.
//!
//! Every family has two constructions. The *pipeline* runs the physical
//! sequence through [`crate::measurement`] and [`crate::gaussian`] and is
//! the ground truth. The *analytic* constructor builds the closed-form
//! superposition of (squeezed) coherent states directly. Closed-form
//! normalizations are exposed separately so they can be checked against
//! the numeric norm.
//!
//! Output forms (t± = 1 ± w, s′ = s(cosh r + e^{iφ} sinh r),
//! α′ = α cosh r + α* e^{iφ} sinh r):
//!
//! ```text
//! Ψ₁ = N S(ξ)[t₊ e^{2is Im α*}|α′+s′⟩ + t₋|α′−s′⟩]
//! Ψ₂ = η S(r)[t₊|se^r⟩ + t₋|−se^r⟩]                 (α = 0, φ = 0)
//! Ψ₃ = γ[t₊ e^{2is Im α*}|α+s⟩ + t₋|α−s⟩]            (ξ = 0)
//! Ψ₄ = γ[t₊|s⟩ + t₋|−s⟩]                             (α = 0, ξ = 0)
//! Φ₁ = η S_ab(−ξ)[t₊|s′/√2, −s′/√2⟩ + t₋|−s′/√2, s′/√2⟩]   measure a, input |ξ⟩|−ξ⟩
//! Φ₂ = η S_ab(ξ)[t₊|s′/√2, s′/√2⟩ + t₋|−s′/√2, −s′/√2⟩]    measure b, input |−ξ⟩|ξ⟩
//! Φ₃ = γ[t₊|√2s, 0⟩ + t₋|0, √2s⟩]                    measure a, input |0⟩|s⟩
//! Φ₄ = γ[t₊|√2s, 0⟩ + t₋|0, −√2s⟩]                   measure b, input |s⟩|0⟩
//! ```
//!
//! The sign of the two-mode squeezing parameter in Φ₁ and Φ₂ follows from
//! the beam-splitter convention documented in [`crate::gaussian`].

use std::f64::consts::SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{fidelity, tensor, vacuum, FockVector, Mode, PureState, TruncationDim, TwoModeVector};
use crate::gaussian::{
    beam_splitter, coherent, squeeze, squeezed_coherent, squeezed_vacuum, two_mode_squeeze, BeamSplitterParam,
    SqueezeParam,
};
use crate::measurement::{postselect_channel, postselect_channel_two_mode, ChannelResult, CouplingSpec, WeakValue};
use crate::truncation::{check_tail, escalate, Escalation, TAIL_TOLERANCE};

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn coupling(s: f64) -> Result<CouplingSpec> {
    CouplingSpec::momentum(s)
}

fn finish_single(v: FockVector) -> Result<FockVector> {
    check_tail(&v, TAIL_TOLERANCE)?;
    v.normalized()
}

fn finish_two(v: TwoModeVector) -> Result<TwoModeVector> {
    check_tail(&v, TAIL_TOLERANCE)?;
    v.normalized()
}

fn zero_norm_guard(norm_sqr: f64) -> Result<()> {
    if norm_sqr < crate::measurement::MIN_PROBABILITY {
        return Err(Error::DegenerateCancellation {
            raw_probability: norm_sqr,
        });
    }
    Ok(())
}

/// s′ = s(cosh r + e^{iφ} sinh r).
pub fn transformed_s(xi: SqueezeParam, s: f64) -> Complex64 {
    xi.transform_displacement(Complex64::new(s, 0.0))
}

/// α′ = α cosh r + α* e^{iφ} sinh r.
pub fn transformed_alpha(xi: SqueezeParam, alpha: Complex64) -> Complex64 {
    xi.transform_displacement(alpha)
}

/// Closed form of N⁻² for Ψ₁:
/// |t₊|² + |t₋|² + 2 Re(t₊* t₋ e^{4is Im α}) e^{−2|s′|²}, where
/// |s′|² = s²(cosh 2r + cos φ sinh 2r).
pub fn psi1_norm_inv_sq(alpha: Complex64, xi: SqueezeParam, s: f64, wv: WeakValue) -> f64 {
    let (tp, tm) = (wv.t_plus(), wv.t_minus());
    let sp2 = transformed_s(xi, s).norm_sqr();
    let phase = Complex64::from_polar(1.0, 4.0 * s * alpha.im);
    tp.norm_sqr() + tm.norm_sqr() + 2.0 * (tp.conj() * tm * phase).re * (-2.0 * sp2).exp()
}

/// η⁻² = 2[(1 + e^{−2s²e^{2r}}) + |w|²(1 − e^{−2s²e^{2r}})].
pub fn eta_inv_sq(r: f64, s: f64, wv: WeakValue) -> f64 {
    let e = (-2.0 * s * s * (2.0 * r).exp()).exp();
    2.0 * ((1.0 + e) + wv.value().norm_sqr() * (1.0 - e))
}

/// γ⁻² = 2[(1 + e^{−2s²}) + |w|²(1 − e^{−2s²})]; exact for real α.
pub fn gamma_inv_sq(s: f64, wv: WeakValue) -> f64 {
    eta_inv_sq(0.0, s, wv)
}

/// κ = 1/√(2(1 + e^{−2s²e^{2r}})), the w = 0 value of η.
pub fn kappa(r: f64, s: f64) -> f64 {
    1.0 / (2.0 * (1.0 + (-2.0 * s * s * (2.0 * r).exp()).exp())).sqrt()
}

/// Weights (b₁, b₂) = (|t₊|γ, |t₋|γ) of the odd-cat-like form b₁|s⟩ − b₂|−s⟩
/// reached for real w > 1.
pub fn odd_cat_weights(s: f64, wv: WeakValue) -> (f64, f64) {
    let g = 1.0 / gamma_inv_sq(s, wv).sqrt();
    (wv.t_plus().norm() * g, wv.t_minus().norm() * g)
}

// ---------------------------------------------------------------------------
// Single-mode analytic constructors

fn psi1_at(alpha: Complex64, xi: SqueezeParam, s: f64, wv: WeakValue, dim: TruncationDim) -> Result<FockVector> {
    let ap = transformed_alpha(xi, alpha);
    let sp = transformed_s(xi, s);
    let phase = Complex64::from_polar(1.0, 2.0 * s * (-alpha.im));
    let plus = coherent(ap + sp, dim)?.scale(wv.t_plus() * phase);
    let minus = coherent(ap - sp, dim)?.scale(wv.t_minus());
    let sum = plus.add(&minus)?;
    zero_norm_guard(sum.norm_sqr())?;
    let out = if xi.r() == 0.0 { sum } else { squeeze(xi, dim)?.apply(&sum)? };
    finish_single(out)
}

/// Ψ₁ from its closed-form superposition.
pub fn psi1(alpha: Complex64, xi: SqueezeParam, s: f64, wv: WeakValue, dim: TruncationDim) -> Result<FockVector> {
    escalate(dim, Escalation::SINGLE, |d| psi1_at(alpha, xi, s, wv, d)).map(|(v, _)| v)
}

/// Ψ₂: squeezed cat from a squeezed-vacuum pointer (φ = 0).
pub fn psi2_squeezed_cat(r: f64, s: f64, wv: WeakValue, dim: TruncationDim) -> Result<FockVector> {
    psi1(Complex64::new(0.0, 0.0), SqueezeParam::real(r)?, s, wv, dim)
}

/// Ψ₃: displaced cat from a coherent pointer.
pub fn psi3_displaced_cat(alpha: Complex64, s: f64, wv: WeakValue, dim: TruncationDim) -> Result<FockVector> {
    psi1(alpha, SqueezeParam::zero(), s, wv, dim)
}

/// Ψ₄: cat-like state from a vacuum pointer.
pub fn psi4_vacuum_cat(s: f64, wv: WeakValue, dim: TruncationDim) -> Result<FockVector> {
    check_s(s)?;
    psi1(Complex64::new(0.0, 0.0), SqueezeParam::zero(), s, wv, dim)
}

fn cat(s: f64, relative: Complex64, dim: TruncationDim) -> Result<FockVector> {
    escalate(dim, Escalation::SINGLE, |d| {
        let v = coherent(Complex64::new(s, 0.0), d)?.add(&coherent(Complex64::new(-s, 0.0), d)?.scale(relative))?;
        zero_norm_guard(v.norm_sqr())?;
        finish_single(v)
    })
    .map(|(v, _)| v)
}

/// N(|s⟩ + |−s⟩).
pub fn even_cat(s: f64, dim: TruncationDim) -> Result<FockVector> {
    cat(s, ONE, dim)
}

/// N(|s⟩ − |−s⟩).
pub fn odd_cat(s: f64, dim: TruncationDim) -> Result<FockVector> {
    cat(s, -ONE, dim)
}

/// (|s⟩ + i|−s⟩)/√2.
pub fn yurke_stoler(s: f64, dim: TruncationDim) -> Result<FockVector> {
    cat(s, I, dim)
}

// ---------------------------------------------------------------------------
// Single-mode pipeline

/// Squeezed coherent pointer through the channel.
pub fn psi1_pipeline(
    alpha: Complex64,
    xi: SqueezeParam,
    s: f64,
    wv: WeakValue,
    overlap: Complex64,
    dim: TruncationDim,
) -> Result<ChannelResult<FockVector>> {
    let cp = coupling(s)?;
    escalate(dim, Escalation::SINGLE, |d| {
        let pointer = squeezed_coherent(alpha, xi, d);
        check_tail(&pointer, TAIL_TOLERANCE)?;
        let res = postselect_channel(&pointer.normalized()?, wv, overlap, &cp)?;
        check_tail(&res.state, TAIL_TOLERANCE)?;
        Ok(res)
    })
    .map(|(v, _)| v)
}

// ---------------------------------------------------------------------------
// Two-mode squeezed cats

fn measured_inputs(xi: SqueezeParam, mode: Mode) -> (SqueezeParam, SqueezeParam) {
    match mode {
        Mode::A => (xi, xi.negated()),
        Mode::B => (xi.negated(), xi),
    }
}

/// The two unnormalized components of a two-mode cat, kept apart so that
/// many weak values can share one construction.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoBranch {
    pub plus: TwoModeVector,
    pub minus: TwoModeVector,
}

impl TwoBranch {
    /// Normalized t₊·plus + t₋·minus.
    pub fn combine(&self, wv: WeakValue) -> Result<TwoModeVector> {
        let sum = self.plus.scale(wv.t_plus()).add(&self.minus.scale(wv.t_minus()))?;
        zero_norm_guard(sum.norm_sqr())?;
        finish_two(sum)
    }

    pub fn dim(&self) -> TruncationDim {
        self.plus.dim()
    }
}

fn phi_branches_at(xi: SqueezeParam, s: f64, mode: Mode, dim: TruncationDim) -> Result<TwoBranch> {
    let h = transformed_s(xi, s) / SQRT_2;
    let (plus, minus, sab) = match mode {
        Mode::A => ((h, -h), (-h, h), xi.negated()),
        Mode::B => ((h, h), (-h, -h), xi),
    };
    let sab = if xi.r() == 0.0 { None } else { Some(two_mode_squeeze(sab, dim)?) };
    let branch = |(a, b): (Complex64, Complex64)| -> Result<TwoModeVector> {
        let v = tensor(&coherent(a, dim)?, &coherent(b, dim)?)?;
        let v = match &sab {
            Some(u) => u.apply(&v)?,
            None => v,
        };
        check_tail(&v, TAIL_TOLERANCE)?;
        Ok(v)
    };
    Ok(TwoBranch {
        plus: branch(plus)?,
        minus: branch(minus)?,
    })
}

/// Branches of Φ₁ (`Mode::A`) or Φ₂ (`Mode::B`) with the two-mode squeezer
/// already applied.
pub fn phi_branches(xi: SqueezeParam, s: f64, measured_mode: Mode, dim: TruncationDim) -> Result<TwoBranch> {
    escalate(dim, Escalation::TWO_MODE, |d| phi_branches_at(xi, s, measured_mode, d)).map(|(v, _)| v)
}

/// Φ₁ (`Mode::A`) or Φ₂ (`Mode::B`) from the closed form.
pub fn phi_two_mode_cat(xi: SqueezeParam, s: f64, wv: WeakValue, measured_mode: Mode, dim: TruncationDim) -> Result<TwoModeVector> {
    escalate(dim, Escalation::TWO_MODE, |d| phi_branches_at(xi, s, measured_mode, d)?.combine(wv)).map(|(v, _)| v)
}

/// Squeezed inputs → channel on `measured_mode` → beam splitter `bs`.
pub fn phi_pipeline(
    xi: SqueezeParam,
    s: f64,
    wv: WeakValue,
    overlap: Complex64,
    measured_mode: Mode,
    bs: BeamSplitterParam,
    dim: TruncationDim,
) -> Result<ChannelResult<TwoModeVector>> {
    let cp = coupling(s)?;
    let (xa, xb) = measured_inputs(xi, measured_mode);
    escalate(dim, Escalation::TWO_MODE, |d| {
        let input = tensor(&squeezed_vacuum(xa, d), &squeezed_vacuum(xb, d))?;
        check_tail(&input, TAIL_TOLERANCE)?;
        let res = postselect_channel_two_mode(&input.normalized()?, wv, overlap, &cp, measured_mode)?;
        let out = beam_splitter(bs, d).apply(&res.state)?;
        Ok(ChannelResult {
            state: finish_two(out)?,
            p: res.p,
        })
    })
    .map(|(v, _)| v)
}

// ---------------------------------------------------------------------------
// Bell-like states

/// Which Bell-like construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BellVariant {
    /// Input |0⟩_a|β⟩_b, measurement on a.
    Phi3,
    /// Input |β⟩_a|0⟩_b, measurement on b.
    Phi4,
}

impl BellVariant {
    pub fn measured_mode(self) -> Mode {
        match self {
            BellVariant::Phi3 => Mode::A,
            BellVariant::Phi4 => Mode::B,
        }
    }
}

fn bell_branches_at(s: f64, variant: BellVariant, dim: TruncationDim) -> Result<TwoBranch> {
    let c = Complex64::new(SQRT_2 * s, 0.0);
    let v = vacuum(dim);
    let plus = tensor(&coherent(c, dim)?, &v)?;
    let minus = match variant {
        BellVariant::Phi3 => tensor(&v, &coherent(c, dim)?)?,
        BellVariant::Phi4 => tensor(&v, &coherent(-c, dim)?)?,
    };
    check_tail(&plus, TAIL_TOLERANCE)?;
    check_tail(&minus, TAIL_TOLERANCE)?;
    Ok(TwoBranch { plus, minus })
}

fn check_s(s: f64) -> Result<()> {
    if !(s >= 0.0 && s.is_finite()) {
        return Err(Error::invalid("s", format!("must be finite and >= 0, got {s}")));
    }
    Ok(())
}

/// Branches of Φ₃ or Φ₄ for the slot amplitude β = s.
pub fn bell_branches(s: f64, variant: BellVariant, dim: TruncationDim) -> Result<TwoBranch> {
    check_s(s)?;
    escalate(dim, Escalation::TWO_MODE, |d| bell_branches_at(s, variant, d)).map(|(v, _)| v)
}

/// Φ₃ or Φ₄ from the closed form, for the slot amplitude β = s.
pub fn bell_like(s: f64, wv: WeakValue, variant: BellVariant, dim: TruncationDim) -> Result<TwoModeVector> {
    check_s(s)?;
    escalate(dim, Escalation::TWO_MODE, |d| bell_branches_at(s, variant, d)?.combine(wv)).map(|(v, _)| v)
}

/// Coherent inputs with slot amplitude `beta` → channel → beam splitter.
#[allow(clippy::too_many_arguments)]
pub fn bell_pipeline(
    s: f64,
    beta: Complex64,
    wv: WeakValue,
    overlap: Complex64,
    variant: BellVariant,
    bs: BeamSplitterParam,
    dim: TruncationDim,
) -> Result<ChannelResult<TwoModeVector>> {
    let cp = coupling(s)?;
    escalate(dim, Escalation::TWO_MODE, |d| {
        let slot = coherent(beta, d)?;
        let input = match variant {
            BellVariant::Phi3 => tensor(&vacuum(d), &slot)?,
            BellVariant::Phi4 => tensor(&slot, &vacuum(d))?,
        };
        let res = postselect_channel_two_mode(&input.normalized()?, wv, overlap, &cp, variant.measured_mode())?;
        let out = beam_splitter(bs, d).apply(&res.state)?;
        Ok(ChannelResult {
            state: finish_two(out)?,
            p: res.p,
        })
    })
    .map(|(v, _)| v)
}

/// Two-qubit view of a Bell-like state in Löwdin-orthogonalized coherent
/// bases.
///
/// Φ₃ maps |√2s⟩ ↦ |1⟩ and |0⟩ ↦ |0⟩ on both modes. Φ₄ maps mode a the same
/// way and mode b as |0⟩ ↦ |1⟩, |−√2s⟩ ↦ |0⟩, so that it reads
/// t₊|11⟩ + t₋|00⟩. Each two-state basis {e₀, e₁} with Gram matrix G is
/// replaced by e G^{−1/2}.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BellView {
    /// Coefficients c_{jk} of |j⟩_a|k⟩_b in the orthogonalized basis.
    pub coefficients: [[Complex64; 2]; 2],
    /// Weight of the state inside the two-qubit span.
    pub span_weight: f64,
    /// Fidelity with the "+" Bell target (|10⟩+|01⟩ for Φ₃, |11⟩+|00⟩ for Φ₄).
    pub fidelity_plus: f64,
    /// Fidelity with the "−" Bell target (|10⟩−|01⟩ for Φ₃, |11⟩−|00⟩ for Φ₄).
    pub fidelity_minus: f64,
}

fn inv_sqrt_gram(o: Complex64) -> Result<[[Complex64; 2]; 2]> {
    let m = o.norm();
    if 1.0 - m < 1e-12 {
        return Err(Error::invalid("s", "coherent basis states coincide; no two-qubit view"));
    }
    let (lp, lm) = (1.0 / (1.0 + m).sqrt(), 1.0 / (1.0 - m).sqrt());
    let p = 0.5 * (lp + lm);
    let q = 0.5 * (lp - lm);
    let ph = if m > 0.0 { o / m } else { ONE };
    Ok([[Complex64::new(p, 0.0), ph * q], [ph.conj() * q, Complex64::new(p, 0.0)]])
}

/// Two-qubit view of `state` as a Φ₃ or Φ₄ state at strength `s`.
pub fn bell_view(state: &TwoModeVector, s: f64, variant: BellVariant) -> Result<BellView> {
    let dim = state.dim();
    let c = Complex64::new(SQRT_2 * s, 0.0);
    let a_basis = [vacuum(dim), coherent(c, dim)?];
    let b_basis = match variant {
        BellVariant::Phi3 => [vacuum(dim), coherent(c, dim)?],
        BellVariant::Phi4 => [coherent(-c, dim)?, vacuum(dim)],
    };
    let ga = inv_sqrt_gram(a_basis[0].inner(&a_basis[1])?)?;
    let gb = inv_sqrt_gram(b_basis[0].inner(&b_basis[1])?)?;
    let mut o = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (i, ea) in a_basis.iter().enumerate() {
        for (j, fb) in b_basis.iter().enumerate() {
            o[i][j] = tensor(ea, fb)?.inner(state)?;
        }
    }
    // C̃ = G_a^{−1/2} O (G_b^{−1/2})ᵀ
    let mut ct = [[Complex64::new(0.0, 0.0); 2]; 2];
    for k in 0..2 {
        for l in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    ct[k][l] += ga[k][i] * o[i][j] * gb[l][j];
                }
            }
        }
    }
    let span_weight = ct.iter().flatten().map(|z| z.norm_sqr()).sum();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let plus_minus = |sign: f64| -> f64 {
        let amp = match variant {
            BellVariant::Phi3 => ct[1][0] + ct[0][1] * sign,
            BellVariant::Phi4 => ct[1][1] + ct[0][0] * sign,
        };
        (amp * h).norm_sqr()
    };
    Ok(BellView {
        coefficients: ct,
        span_weight,
        fidelity_plus: plus_minus(1.0),
        fidelity_minus: plus_minus(-1.0),
    })
}

// ---------------------------------------------------------------------------
// Family dispatch

/// Named state families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Psi1,
    Psi2,
    Psi3,
    Psi4,
    EvenCat,
    OddCatLike,
    YurkeStoler,
    Phi1,
    Phi2,
    Phi1Prime,
    Phi2Prime,
    Phi3,
    Phi4,
}

impl Family {
    pub const ALL: [Family; 13] = [
        Family::Psi1,
        Family::Psi2,
        Family::Psi3,
        Family::Psi4,
        Family::EvenCat,
        Family::OddCatLike,
        Family::YurkeStoler,
        Family::Phi1,
        Family::Phi2,
        Family::Phi1Prime,
        Family::Phi2Prime,
        Family::Phi3,
        Family::Phi4,
    ];

    pub fn is_two_mode(self) -> bool {
        matches!(
            self,
            Family::Phi1 | Family::Phi2 | Family::Phi1Prime | Family::Phi2Prime | Family::Phi3 | Family::Phi4
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Psi1 => "psi1",
            Family::Psi2 => "psi2",
            Family::Psi3 => "psi3",
            Family::Psi4 => "psi4",
            Family::EvenCat => "evencat",
            Family::OddCatLike => "oddcatlike",
            Family::YurkeStoler => "yurkestoler",
            Family::Phi1 => "phi1",
            Family::Phi2 => "phi2",
            Family::Phi1Prime => "phi1prime",
            Family::Phi2Prime => "phi2prime",
            Family::Phi3 => "phi3",
            Family::Phi4 => "phi4",
        }
    }

    pub fn parse(name: &str) -> Option<Family> {
        Family::ALL.into_iter().find(|f| f.name() == name.to_ascii_lowercase())
    }

    /// Mode carrying the measurement for two-mode families.
    pub fn measured_mode(self) -> Option<Mode> {
        match self {
            Family::Phi1 | Family::Phi1Prime | Family::Phi3 => Some(Mode::A),
            Family::Phi2 | Family::Phi2Prime | Family::Phi4 => Some(Mode::B),
            _ => None,
        }
    }
}

/// Parameters of a family instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolSpec {
    pub family: Family,
    pub alpha: Complex64,
    pub squeeze: SqueezeParam,
    pub s: f64,
    pub wv: WeakValue,
    /// ⟨ψ_f|ψ_i⟩; scales the success probability only.
    pub overlap: Complex64,
    /// Coherent slot amplitude for Φ₃/Φ₄; `None` means β = s.
    pub beta: Option<Complex64>,
    /// Starting truncation (escalated as needed).
    pub dim: TruncationDim,
}

impl ProtocolSpec {
    /// A spec with α = 0, ξ = 0 and the σ_x overlap 1/√(1+|w|²).
    pub fn new(family: Family, s: f64, wv: WeakValue) -> Self {
        let dim = if family.is_two_mode() {
            TruncationDim::two_mode_default()
        } else {
            TruncationDim::single_mode_default()
        };
        ProtocolSpec {
            family,
            alpha: Complex64::new(0.0, 0.0),
            squeeze: SqueezeParam::zero(),
            s,
            wv,
            overlap: Complex64::new(1.0 / (1.0 + wv.value().norm_sqr()).sqrt(), 0.0),
            beta: None,
            dim,
        }
    }

    fn reject(&self, reason: &str) -> Error {
        Error::invalid("family", format!("{}: {reason}", self.family.name()))
    }

    /// Checks the parameter subset each family is defined on.
    pub fn validate(&self) -> Result<()> {
        if !(self.s >= 0.0 && self.s.is_finite()) {
            return Err(Error::invalid("s", format!("must be finite and >= 0, got {}", self.s)));
        }
        let zero_alpha = self.alpha.norm() == 0.0;
        let no_squeeze = self.squeeze.r() == 0.0;
        let real_squeeze = self.squeeze.phi() == 0.0;
        let w = self.wv.value();
        use Family::*;
        match self.family {
            Psi1 => {}
            Psi2 if !zero_alpha => return Err(self.reject("requires alpha = 0")),
            Psi2 if !real_squeeze => return Err(self.reject("requires phi = 0")),
            Psi3 if !no_squeeze => return Err(self.reject("requires r = 0")),
            Psi4 | EvenCat | OddCatLike | YurkeStoler if !(zero_alpha && no_squeeze) => {
                return Err(self.reject("requires alpha = 0 and r = 0"))
            }
            EvenCat if w.norm() != 0.0 => return Err(self.reject("requires wv = 0")),
            YurkeStoler if (w + I).norm() > 1e-12 => return Err(self.reject("requires wv = -i")),
            OddCatLike if !(w.im == 0.0 && w.re > 1.0) => return Err(self.reject("requires real wv > 1")),
            Phi1 | Phi2 | Phi1Prime | Phi2Prime if !zero_alpha => return Err(self.reject("requires alpha = 0")),
            Phi1Prime | Phi2Prime if w.norm() != 0.0 || !real_squeeze => {
                return Err(self.reject("requires wv = 0 and phi = 0"))
            }
            Phi3 | Phi4 if !(zero_alpha && no_squeeze) => return Err(self.reject("requires alpha = 0 and r = 0")),
            _ => {}
        }
        if self.overlap.norm() == 0.0 {
            return Err(Error::OrthogonalPostselection);
        }
        Ok(())
    }
}

/// Single- or two-mode state.
#[derive(Debug, Clone, PartialEq)]
pub enum PreparedState {
    Single(FockVector),
    TwoMode(TwoModeVector),
}

impl PreparedState {
    pub fn n_max(&self) -> usize {
        match self {
            PreparedState::Single(v) => v.n_max(),
            PreparedState::TwoMode(v) => v.n_max(),
        }
    }

    pub fn tail_mass(&self) -> f64 {
        match self {
            PreparedState::Single(v) => v.tail_mass(),
            PreparedState::TwoMode(v) => v.tail_mass(),
        }
    }
}

/// Pipeline output with cross-checks.
#[derive(Debug, Clone, PartialEq)]
pub struct Prepared {
    pub state: PreparedState,
    pub p: f64,
    /// Fidelity between the pipeline state and the closed-form state, when
    /// a closed form applies.
    pub analytic_fidelity: Option<f64>,
    /// Two-qubit view for Φ₃/Φ₄.
    pub bell: Option<BellView>,
    /// Deviations from the closed-form regime.
    pub warnings: Vec<String>,
}

/// Builds a family instance through its pipeline and compares it with the
/// closed form where one applies.
pub fn prepare(spec: &ProtocolSpec) -> Result<Prepared> {
    spec.validate()?;
    let mut warnings = Vec::new();
    let bs = BeamSplitterParam::balanced();
    let fam = spec.family;
    match fam {
        Family::Psi1 | Family::Psi2 | Family::Psi3 | Family::Psi4 | Family::EvenCat | Family::OddCatLike | Family::YurkeStoler => {
            let res = psi1_pipeline(spec.alpha, spec.squeeze, spec.s, spec.wv, spec.overlap, spec.dim)?;
            let analytic = psi1(spec.alpha, spec.squeeze, spec.s, spec.wv, res.state.dim())?;
            let f = fidelity(&analytic.resized(res.state.dim()), &res.state).ok();
            Ok(Prepared {
                state: PreparedState::Single(res.state),
                p: res.p,
                analytic_fidelity: f,
                bell: None,
                warnings,
            })
        }
        Family::Phi1 | Family::Phi2 | Family::Phi1Prime | Family::Phi2Prime => {
            let mode = fam.measured_mode().expect("two-mode family");
            let res = phi_pipeline(spec.squeeze, spec.s, spec.wv, spec.overlap, mode, bs, spec.dim)?;
            let analytic = phi_two_mode_cat(spec.squeeze, spec.s, spec.wv, mode, res.state.dim())?;
            let f = if analytic.n_max() == res.state.n_max() {
                fidelity(&analytic, &res.state).ok()
            } else {
                None
            };
            Ok(Prepared {
                state: PreparedState::TwoMode(res.state),
                p: res.p,
                analytic_fidelity: f,
                bell: None,
                warnings,
            })
        }
        Family::Phi3 | Family::Phi4 => {
            let variant = if fam == Family::Phi3 { BellVariant::Phi3 } else { BellVariant::Phi4 };
            let beta = spec.beta.unwrap_or(Complex64::new(spec.s, 0.0));
            let res = bell_pipeline(spec.s, beta, spec.wv, spec.overlap, variant, bs, spec.dim)?;
            let closed_form = (beta - Complex64::new(spec.s, 0.0)).norm() < 1e-12;
            let mut f = None;
            let mut bell = None;
            if closed_form {
                let analytic = bell_like(spec.s, spec.wv, variant, res.state.dim())?;
                if analytic.n_max() == res.state.n_max() {
                    f = fidelity(&analytic, &res.state).ok();
                }
                bell = bell_view(&res.state, spec.s, variant).ok();
            } else {
                warnings.push("beta differs from s: closed form and two-qubit view not applicable".to_string());
            }
            Ok(Prepared {
                state: PreparedState::TwoMode(res.state),
                p: res.p,
                analytic_fidelity: f,
                bell,
                warnings,
            })
        }
    }
}
