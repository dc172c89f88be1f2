//! Postselected von Neumann measurement of a qubit observable `A` (with
//! `A² = I`) coupled to one bosonic pointer mode through `H = g A ⊗ Q`.
//!
//! After the interaction and projection onto `⟨ψ_f|`, the pointer is left in
//!
//! ```text
//! |Φ⟩ = (⟨ψ_f|ψ_i⟩ / 2) [t₊ e^{−igQ} + t₋ e^{igQ}] |φ⟩,   t± = 1 ± ⟨A⟩_w,
//! ```
//!
//! with success probability `p = ⟨Φ|Φ⟩`. For `Q = P = (i/2σ)(a† − a)` each
//! branch is a displacement `D(±s)` with `s = g/2σ`; for `Q = X = σ(a + a†)`
//! it is `D(∓igσ)`. [`postselect_channel`] uses this identity directly and
//! [`evolve_full`] exponentiates the composite Hamiltonian as an oracle.

use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{
    op_exp, quadrature_op, FockOperator, FockVector, Mode, PureState, QuadratureKind, TruncationDim, TwoModeVector,
};
use crate::gaussian::displacement_elements;
use crate::linalg::{self, CMatrix};
use crate::truncation::TAIL_TOLERANCE;

/// Raw success probability below which the output is treated as a
/// degenerate cancellation.
pub const MIN_PROBABILITY: f64 = 1e-15;

/// Boundary leakage tolerated by [`evolve_full`].
pub const ORACLE_LEAKAGE_LIMIT: f64 = 1e-8;

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Qubit state `c_H|H⟩ + c_V|V⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitState {
    c_h: Complex64,
    c_v: Complex64,
}

impl QubitState {
    pub fn new(c_h: Complex64, c_v: Complex64) -> Result<Self> {
        let n = c_h.norm_sqr() + c_v.norm_sqr();
        if !n.is_finite() {
            return Err(Error::NonFinite);
        }
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized { norm: n.sqrt() });
        }
        Ok(QubitState { c_h, c_v })
    }

    pub fn h() -> Self {
        QubitState { c_h: ONE, c_v: ZERO }
    }

    pub fn v() -> Self {
        QubitState { c_h: ZERO, c_v: ONE }
    }

    /// `cos(θ/2)|H⟩ + e^{iδ} sin(θ/2)|V⟩`.
    pub fn from_angles(theta: f64, delta: f64) -> Self {
        let (s, c) = (0.5 * theta).sin_cos();
        QubitState {
            c_h: Complex64::new(c, 0.0),
            c_v: Complex64::from_polar(s, delta),
        }
    }

    /// The state orthogonal to this one (up to phase).
    pub fn orthogonal(&self) -> Self {
        QubitState {
            c_h: -self.c_v.conj(),
            c_v: self.c_h.conj(),
        }
    }

    pub fn c_h(&self) -> Complex64 {
        self.c_h
    }

    pub fn c_v(&self) -> Complex64 {
        self.c_v
    }

    fn vector(&self) -> [Complex64; 2] {
        [self.c_h, self.c_v]
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &QubitState) -> Complex64 {
        self.c_h.conj() * other.c_h + self.c_v.conj() * other.c_v
    }
}

/// Two-level Hermitian observable squaring to the identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observable {
    m: Matrix2<Complex64>,
}

impl Observable {
    pub fn new(m: Matrix2<Complex64>) -> Result<Self> {
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let herm = (m - m.adjoint()).iter().fold(0.0f64, |a, z| a.max(z.norm()));
        let square = (m * m - Matrix2::identity()).iter().fold(0.0f64, |a, z| a.max(z.norm()));
        let deviation = herm.max(square);
        if deviation > 1e-10 {
            return Err(Error::InvalidObservable { deviation });
        }
        Ok(Observable { m })
    }

    /// `|V⟩⟨H| + |H⟩⟨V|`.
    pub fn sigma_x() -> Self {
        Observable {
            m: Matrix2::new(ZERO, ONE, ONE, ZERO),
        }
    }

    pub fn sigma_z() -> Self {
        Observable {
            m: Matrix2::new(ONE, ZERO, ZERO, -ONE),
        }
    }

    /// `n̂·σ` for a unit Bloch vector.
    pub fn bloch(n: [f64; 3]) -> Result<Self> {
        let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        if !(len > 0.0 && len.is_finite()) {
            return Err(Error::invalid("bloch", "direction must be nonzero and finite"));
        }
        let [x, y, z] = n.map(|c| c / len);
        Observable::new(Matrix2::new(
            Complex64::new(z, 0.0),
            Complex64::new(x, -y),
            Complex64::new(x, y),
            Complex64::new(-z, 0.0),
        ))
    }

    pub fn matrix(&self) -> &Matrix2<Complex64> {
        &self.m
    }

    fn apply(&self, q: &QubitState) -> [Complex64; 2] {
        let v = q.vector();
        [
            self.m[(0, 0)] * v[0] + self.m[(0, 1)] * v[1],
            self.m[(1, 0)] * v[0] + self.m[(1, 1)] * v[1],
        ]
    }
}

/// Pre- and post-selected qubit states with the measured observable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionPair {
    psi_i: QubitState,
    psi_f: QubitState,
    observable: Observable,
}

impl SelectionPair {
    pub fn new(psi_i: QubitState, psi_f: QubitState, observable: Observable) -> Result<Self> {
        if psi_f.inner(&psi_i).norm() <= 1e-12 {
            return Err(Error::OrthogonalPostselection);
        }
        Ok(SelectionPair {
            psi_i,
            psi_f,
            observable,
        })
    }

    /// The σ_x selection realizing weak value `w`: θ = 2 atan|w|, δ = arg w.
    pub fn for_weak_value(w: WeakValue) -> Result<Self> {
        let v = w.value();
        sigma_x_selection(2.0 * v.norm().atan(), v.arg().rem_euclid(2.0 * std::f64::consts::PI))
    }

    pub fn psi_i(&self) -> &QubitState {
        &self.psi_i
    }

    pub fn psi_f(&self) -> &QubitState {
        &self.psi_f
    }

    pub fn observable(&self) -> &Observable {
        &self.observable
    }

    /// ⟨ψ_f|ψ_i⟩.
    pub fn overlap(&self) -> Complex64 {
        self.psi_f.inner(&self.psi_i)
    }
}

/// Weak value ⟨A⟩_w, with branch weights t± = 1 ± ⟨A⟩_w.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeakValue(pub Complex64);

impl WeakValue {
    pub fn new(value: Complex64) -> Result<Self> {
        if !(value.re.is_finite() && value.im.is_finite()) {
            return Err(Error::invalid("wv", "must be finite"));
        }
        Ok(WeakValue(value))
    }

    pub fn real(x: f64) -> Self {
        WeakValue(Complex64::new(x, 0.0))
    }

    pub fn value(&self) -> Complex64 {
        self.0
    }

    pub fn t_plus(&self) -> Complex64 {
        ONE + self.0
    }

    pub fn t_minus(&self) -> Complex64 {
        ONE - self.0
    }
}

/// ⟨ψ_f|A|ψ_i⟩ / ⟨ψ_f|ψ_i⟩.
pub fn weak_value(sel: &SelectionPair) -> Result<WeakValue> {
    let overlap = sel.overlap();
    if overlap.norm() <= 1e-12 {
        return Err(Error::OrthogonalPostselection);
    }
    let av = sel.observable.apply(&sel.psi_i);
    let f = sel.psi_f.vector();
    let num = f[0].conj() * av[0] + f[1].conj() * av[1];
    WeakValue::new(num / overlap)
}

/// σ_x with ψ_i = cos(θ/2)|H⟩ + e^{iδ}sin(θ/2)|V⟩ and ψ_f = |H⟩, giving
/// ⟨σ_x⟩_w = e^{iδ} tan(θ/2) at postselection overlap cos(θ/2).
pub fn sigma_x_selection(theta: f64, delta: f64) -> Result<SelectionPair> {
    if !(theta.is_finite() && delta.is_finite()) {
        return Err(Error::invalid("theta", "angles must be finite"));
    }
    if !(0.0..std::f64::consts::PI).contains(&theta) {
        return Err(Error::invalid("theta", format!("must lie in [0, π), got {theta}")));
    }
    SelectionPair::new(QubitState::from_angles(theta, delta), QubitState::h(), Observable::sigma_x())
}

/// Interaction strength and pointer quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingSpec {
    s: f64,
    quadrature: QuadratureKind,
    g: Option<f64>,
    sigma: Option<f64>,
}

impl CouplingSpec {
    /// Q = P at interaction strength `s`.
    pub fn momentum(s: f64) -> Result<Self> {
        if !(s >= 0.0 && s.is_finite()) {
            return Err(Error::invalid("s", format!("must be finite and >= 0, got {s}")));
        }
        Ok(CouplingSpec {
            s,
            quadrature: QuadratureKind::P,
            g: None,
            sigma: None,
        })
    }

    /// Coupling `g = g₀t` and pointer width `σ`; sets s = g/2σ.
    pub fn with_oracle(g: f64, sigma: f64, quadrature: QuadratureKind) -> Result<Self> {
        if !(g >= 0.0 && g.is_finite()) {
            return Err(Error::invalid("g", format!("must be finite and >= 0, got {g}")));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::invalid("sigma", format!("must be positive, got {sigma}")));
        }
        Ok(CouplingSpec {
            s: g / (2.0 * sigma),
            quadrature,
            g: Some(g),
            sigma: Some(sigma),
        })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn quadrature(&self) -> QuadratureKind {
        self.quadrature
    }

    pub fn g(&self) -> Option<f64> {
        self.g
    }

    pub fn sigma(&self) -> Option<f64> {
        self.sigma
    }

    /// β with e^{−igQ} = D(β).
    pub fn branch_displacement(&self) -> Complex64 {
        match (self.quadrature, self.g, self.sigma) {
            (QuadratureKind::X, Some(g), Some(sigma)) => Complex64::new(0.0, -g * sigma),
            (QuadratureKind::X, _, _) => unreachable!("X coupling is only built with g and sigma"),
            (QuadratureKind::P, _, _) => Complex64::new(self.s, 0.0),
        }
    }

    fn oracle_params(&self) -> Result<(f64, f64)> {
        match (self.g, self.sigma) {
            (Some(g), Some(sigma)) => Ok((g, sigma)),
            _ => Err(Error::invalid("coupling", "the full-evolution oracle needs g and sigma")),
        }
    }
}

/// Normalized output state and its success probability.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelResult<S> {
    pub state: S,
    pub p: f64,
}

fn check_overlap(overlap: Complex64) -> Result<()> {
    if overlap.norm() <= 0.0 || !overlap.re.is_finite() || !overlap.im.is_finite() {
        return Err(Error::OrthogonalPostselection);
    }
    Ok(())
}

fn check_normalized<S: PureState>(s: &S) -> Result<()> {
    if !s.is_normalized() {
        return Err(Error::NotNormalized { norm: s.norm() });
    }
    Ok(())
}

fn lost_mass_check<S: PureState>(branch: &S, n_max: usize) -> Result<()> {
    // Displacements are norm-preserving, so any deficit left the truncated space.
    let lost = (1.0 - branch.norm_sqr()).max(0.0) + branch.tail_mass();
    if lost > TAIL_TOLERANCE {
        return Err(Error::TruncationInsufficient { n_max, tail_mass: lost });
    }
    Ok(())
}

fn finish<S: PureState + Clone>(
    unnormalized: S,
    normalize: impl FnOnce(&S) -> Result<S>,
) -> Result<ChannelResult<S>> {
    let p = unnormalized.norm_sqr();
    if !p.is_finite() {
        return Err(Error::NonFinite);
    }
    if p < MIN_PROBABILITY {
        return Err(Error::DegenerateCancellation { raw_probability: p });
    }
    Ok(ChannelResult {
        state: normalize(&unnormalized)?,
        p,
    })
}

/// Pointer output `(overlap/2)[t₊ e^{−igQ} + t₋ e^{igQ}]|φ⟩`, normalized,
/// with its success probability.
pub fn postselect_channel(
    pointer: &FockVector,
    wv: WeakValue,
    overlap: Complex64,
    coupling: &CouplingSpec,
) -> Result<ChannelResult<FockVector>> {
    check_overlap(overlap)?;
    check_normalized(pointer)?;
    let dim = pointer.dim();
    let beta = coupling.branch_displacement();
    let plus = displacement_elements(beta, dim).apply(pointer)?;
    let minus = displacement_elements(-beta, dim).apply(pointer)?;
    lost_mass_check(&plus, dim.get())?;
    lost_mass_check(&minus, dim.get())?;
    let half = overlap * 0.5;
    let out = plus.scale(half * wv.t_plus()).add(&minus.scale(half * wv.t_minus()))?;
    finish(out, FockVector::normalized)
}

/// Convenience wrapper taking the weak value and overlap from `sel`.
pub fn postselect(sel: &SelectionPair, pointer: &FockVector, coupling: &CouplingSpec) -> Result<ChannelResult<FockVector>> {
    postselect_channel(pointer, weak_value(sel)?, sel.overlap(), coupling)
}

/// Two-mode version acting on `measured_mode` only.
pub fn postselect_channel_two_mode(
    pointer: &TwoModeVector,
    wv: WeakValue,
    overlap: Complex64,
    coupling: &CouplingSpec,
    measured_mode: Mode,
) -> Result<ChannelResult<TwoModeVector>> {
    check_overlap(overlap)?;
    check_normalized(pointer)?;
    let dim = pointer.dim();
    let beta = coupling.branch_displacement();
    let plus = pointer.apply_local(&displacement_elements(beta, dim), measured_mode)?;
    let minus = pointer.apply_local(&displacement_elements(-beta, dim), measured_mode)?;
    lost_mass_check(&plus, dim.get())?;
    lost_mass_check(&minus, dim.get())?;
    let half = overlap * 0.5;
    let out = plus.scale(half * wv.t_plus()).add(&minus.scale(half * wv.t_minus()))?;
    finish(out, TwoModeVector::normalized)
}

/// Output of the full composite-space evolution.
#[derive(Debug, Clone, PartialEq)]
pub struct FullEvolution {
    /// Unnormalized projected pointer ⟨ψ_f|U|ψ_i⟩|φ⟩ on the input truncation.
    pub pointer: FockVector,
    pub p: f64,
    /// Population that left the input truncation.
    pub leakage: f64,
}

/// Extra levels given to the oracle beyond the input truncation.
const ORACLE_PADDING: usize = 32;

/// Builds `H = g A ⊗ Q` on the qubit ⊗ pointer space (qubit index outer),
/// exponentiates it, applies it to `|ψ_i⟩|φ⟩` and projects onto `⟨ψ_f|`.
pub fn evolve_full(sel: &SelectionPair, pointer: &FockVector, coupling: &CouplingSpec) -> Result<FullEvolution> {
    let (g, sigma) = coupling.oracle_params()?;
    let n = pointer.dim().get();
    let big = TruncationDim::new(n + ORACLE_PADDING)?;
    let nb = big.get();
    let q = quadrature_op(coupling.quadrature(), sigma, big)?;
    let a = CMatrix::from_fn(2, 2, |i, j| sel.observable.m[(i, j)]);
    let h = linalg::kron(&a, q.matrix());
    let u = op_exp(&FockOperator::from_matrix(h * Complex64::new(0.0, -g))?)?;

    let phi = pointer.resized(big);
    let psi_i = sel.psi_i.vector();
    let input = DVector::from_fn(2 * nb, |idx, _| psi_i[idx / nb] * phi.amplitude(idx % nb));
    let evolved = u.matrix() * input;

    let psi_f = sel.psi_f.vector();
    let projected: Vec<Complex64> = (0..nb)
        .map(|k| psi_f[0].conj() * evolved[k] + psi_f[1].conj() * evolved[nb + k])
        .collect();
    let p: f64 = projected.iter().map(|z| z.norm_sqr()).sum();
    let outside: f64 = projected[n..].iter().map(|z| z.norm_sqr()).sum();
    let leakage = if p > 0.0 { outside / p } else { 0.0 };
    if leakage > ORACLE_LEAKAGE_LIMIT {
        return Err(Error::TruncationInsufficient {
            n_max: n,
            tail_mass: leakage,
        });
    }
    Ok(FullEvolution {
        pointer: FockVector::from_amplitudes(projected[..n].to_vec())?,
        p,
        leakage,
    })
}

/// ½[(1+A)⊗e^{−igQ} + (1−A)⊗e^{igQ}] assembled from single-mode exponentials.
pub fn interaction_unitary(a: &Observable, g: f64, sigma: f64, kind: QuadratureKind, dim: TruncationDim) -> Result<FockOperator> {
    let q = quadrature_op(kind, sigma, dim)?;
    let fwd = op_exp(&q.scale(Complex64::new(0.0, -g)))?;
    let back = op_exp(&q.scale(Complex64::new(0.0, g)))?;
    let id = CMatrix::identity(2, 2);
    let am = CMatrix::from_fn(2, 2, |i, j| a.m[(i, j)]);
    let plus = (&id + &am) * Complex64::new(0.5, 0.0);
    let minus = (&id - &am) * Complex64::new(0.5, 0.0);
    FockOperator::from_matrix(linalg::kron(&plus, fwd.matrix()) + linalg::kron(&minus, back.matrix()))
}

/// exp(−i g A⊗Q) by direct exponentiation of the composite generator.
pub fn interaction_unitary_exact(
    a: &Observable,
    g: f64,
    sigma: f64,
    kind: QuadratureKind,
    dim: TruncationDim,
) -> Result<FockOperator> {
    let q = quadrature_op(kind, sigma, dim)?;
    let am = DMatrix::from_fn(2, 2, |i, j| a.m[(i, j)]);
    op_exp(&FockOperator::from_matrix(linalg::kron(&am, q.matrix()) * Complex64::new(0.0, -g))?)
}

/// Pointer inputs with a closed-form success probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ClosedFormInput {
    Vacuum,
    /// Real squeezing r (φ = 0).
    SqueezedVacuum(f64),
}

/// Success probability ½(1 + e^{−2s²e^{2r}} cos θ) of the σ_x selection on
/// vacuum (r = 0) or squeezed-vacuum pointers. Independent of δ.
pub fn success_probability_closed(input: ClosedFormInput, theta: f64, delta: f64, s: f64) -> Result<f64> {
    sigma_x_selection(theta, delta)?;
    if !(s >= 0.0 && s.is_finite()) {
        return Err(Error::invalid("s", format!("must be finite and >= 0, got {s}")));
    }
    let r = match input {
        ClosedFormInput::Vacuum => 0.0,
        ClosedFormInput::SqueezedVacuum(r) if r >= 0.0 && r.is_finite() => r,
        ClosedFormInput::SqueezedVacuum(r) => {
            return Err(Error::invalid("r", format!("must be finite and >= 0, got {r}")))
        }
    };
    Ok(0.5 * (1.0 + (-2.0 * s * s * (2.0 * r).exp()).exp() * theta.cos()))
}
