//! Gaussian states and unitaries: coherent and squeezed states,
//! displacement, single- and two-mode squeezing, the beam splitter, and
//! photon subtraction.
//!
//! Each state family has a closed-form amplitude path; each unitary has a
//! matrix-exponential path. Single-mode unitaries are exponentiated on a
//! doubled internal truncation and then cut back to `n_max`, so their low
//! matrix elements are those of the untruncated operator. Two-mode unitaries
//! are kept as sparse generators and applied with a Taylor propagator; a
//! dense matrix is available for small truncations.
//!
//! Beam-splitter convention: the scattering matrix
//!
//! ```text
//! M = [  cos τ e^{iφτ}    sin τ e^{iφρ} ]
//!     [ -sin τ e^{-iφρ}   cos τ e^{-iφτ} ]
//! ```
//!
//! acts on the annihilation operators, `U†(a, b)ᵀU = M (a, b)ᵀ`, so coherent
//! inputs map as `|α⟩|β⟩ → |M₁₁α + M₁₂β⟩|M₂₁α + M₂₂β⟩`. Under this
//! convention a balanced splitter turns `S_a(ξ) S_b(−ξ)` into `S_ab(−ξ)` and
//! `S_a(−ξ) S_b(ξ)` into `S_ab(ξ)`.

use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{op_exp, FockOperator, FockVector, PureState, TruncationDim, TwoModeVector};
use crate::linalg::{self, CMatrix, SparseMatrix};

/// Tail population above which an operator constructor refuses to build at
/// the requested truncation.
pub const OPERATOR_TAIL_LIMIT: f64 = 1e-6;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Squeezing ξ = r·e^{iφ}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezeParam {
    r: f64,
    phi: f64,
}

impl SqueezeParam {
    pub fn new(r: f64, phi: f64) -> Result<Self> {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(Error::invalid("r", format!("must be finite and >= 0, got {r}")));
        }
        if !phi.is_finite() {
            return Err(Error::invalid("phi", "must be finite"));
        }
        Ok(SqueezeParam {
            r,
            phi: phi.rem_euclid(2.0 * PI),
        })
    }

    pub fn real(r: f64) -> Result<Self> {
        Self::new(r, 0.0)
    }

    pub fn zero() -> Self {
        SqueezeParam { r: 0.0, phi: 0.0 }
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn xi(&self) -> Complex64 {
        Complex64::from_polar(self.r, self.phi)
    }

    /// −ξ.
    pub fn negated(&self) -> Self {
        SqueezeParam::new(self.r, self.phi + PI).expect("finite")
    }

    /// Image of a displacement amplitude under S†(ξ) D(β) S(ξ) = D(β′):
    /// β′ = β cosh r + β* e^{iφ} sinh r.
    pub fn transform_displacement(&self, beta: Complex64) -> Complex64 {
        beta * self.r.cosh() + beta.conj() * Complex64::from_polar(self.r.sinh(), self.phi)
    }
}

/// Beam splitter with R = sin²τ and T = cos²τ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamSplitterParam {
    pub tau: f64,
    pub phi_tau: f64,
    pub phi_rho: f64,
}

impl BeamSplitterParam {
    pub fn new(tau: f64, phi_tau: f64, phi_rho: f64) -> Result<Self> {
        if !(tau.is_finite() && phi_tau.is_finite() && phi_rho.is_finite()) {
            return Err(Error::invalid("beam splitter", "parameters must be finite"));
        }
        Ok(BeamSplitterParam { tau, phi_tau, phi_rho })
    }

    /// τ = π/4 with zero phases.
    pub fn balanced() -> Self {
        BeamSplitterParam {
            tau: PI / 4.0,
            phi_tau: 0.0,
            phi_rho: 0.0,
        }
    }

    pub fn reflectivity(&self) -> f64 {
        self.tau.sin().powi(2)
    }

    pub fn transmittance(&self) -> f64 {
        self.tau.cos().powi(2)
    }

    /// Scattering matrix acting on `(a, b)ᵀ`.
    pub fn mode_matrix(&self) -> [[Complex64; 2]; 2] {
        let (s, c) = self.tau.sin_cos();
        [
            [Complex64::from_polar(c, self.phi_tau), Complex64::from_polar(s, self.phi_rho)],
            [-Complex64::from_polar(s, -self.phi_rho), Complex64::from_polar(c, -self.phi_tau)],
        ]
    }

    /// Output coherent amplitudes for input |α⟩_a|β⟩_b.
    pub fn transform_amplitudes(&self, alpha: Complex64, beta: Complex64) -> (Complex64, Complex64) {
        let m = self.mode_matrix();
        (m[0][0] * alpha + m[0][1] * beta, m[1][0] * alpha + m[1][1] * beta)
    }
}

fn coherent_fits(alpha: Complex64, dim: TruncationDim) -> bool {
    let a = alpha.norm();
    a * a + 6.0 * a + 10.0 < dim.get() as f64
}

fn coherent_guard(alpha: Complex64, dim: TruncationDim) -> Result<()> {
    if coherent_fits(alpha, dim) {
        Ok(())
    } else {
        let tail = coherent_amplitudes(alpha, dim.get());
        let v = FockVector::from_amplitudes(tail).map_err(|_| Error::NonFinite)?;
        Err(Error::TruncationInsufficient {
            n_max: dim.get(),
            tail_mass: 1.0 - v.norm_sqr() + v.tail_mass(),
        })
    }
}

pub(crate) fn coherent_amplitudes(alpha: Complex64, n: usize) -> Vec<Complex64> {
    let mut amps = Vec::with_capacity(n);
    let mut c = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    amps.push(c);
    for k in 1..n {
        c = c * alpha / (k as f64).sqrt();
        amps.push(c);
    }
    amps
}

/// Coherent state |α⟩ with amplitudes e^{−|α|²/2} αⁿ/√n!.
pub fn coherent(alpha: Complex64, dim: TruncationDim) -> Result<FockVector> {
    coherent_guard(alpha, dim)?;
    FockVector::from_amplitudes(coherent_amplitudes(alpha, dim.get()))
}

/// Matrix elements ⟨m|D(α)|n⟩ of the untruncated displacement operator for
/// m, n < n_max.
///
/// Uses the Laguerre form ⟨n+k|D(α)|n⟩ = √(n!/(n+k)!) αᵏ e^{−|α|²/2} L_n^{(k)}(|α|²)
/// with the three-term recurrence run along each diagonal on scaled values,
/// which stays accurate where the plain ladder recurrences lose everything
/// to cancellation (|α| ≳ 2 at large n_max).
pub fn displacement_elements(alpha: Complex64, dim: TruncationDim) -> FockOperator {
    let n = dim.get();
    let mut m = CMatrix::zeros(n, n);
    for_each_displacement_element(alpha, n, |row, col, v| m[(row, col)] = v);
    FockOperator::from_matrix(m).expect("square")
}

/// Visits every ⟨row|D(α)|col⟩ with row, col < n, diagonal by diagonal.
pub(crate) fn for_each_displacement_element(alpha: Complex64, n: usize, mut visit: impl FnMut(usize, usize, Complex64)) {
    let x = alpha.norm_sqr();
    if x == 0.0 {
        for j in 0..n {
            visit(j, j, Complex64::new(1.0, 0.0));
        }
        return;
    }
    let ln_abs = 0.5 * x.ln();
    let unit = alpha / alpha.norm();
    let lower_phase = unit;
    let upper_phase = -unit.conj();
    let mut ln_fact = 0.0;
    let mut lo = Complex64::new(1.0, 0.0);
    let mut up = Complex64::new(1.0, 0.0);
    let mut diag = Vec::with_capacity(n);
    for k in 0..n {
        if k > 0 {
            ln_fact += (k as f64).ln();
            lo *= lower_phase;
            up *= upper_phase;
        }
        let kf = k as f64;
        diag.clear();
        diag.push((kf * ln_abs - 0.5 * x - 0.5 * ln_fact).exp());
        if n - k > 1 {
            diag.push(diag[0] * (1.0 + kf - x) / (1.0 + kf).sqrt());
        }
        for j in 1..(n - k).saturating_sub(1) {
            let jf = j as f64;
            let next = ((2.0 * jf + 1.0 + kf - x) * diag[j] - (jf * (jf + kf)).sqrt() * diag[j - 1])
                / ((jf + 1.0) * (jf + 1.0 + kf)).sqrt();
            diag.push(next);
        }
        for (j, &f) in diag.iter().enumerate() {
            visit(j + k, j, lo * f);
            if k > 0 {
                visit(j, j + k, up * f);
            }
        }
    }
}

fn padded(dim: TruncationDim) -> TruncationDim {
    TruncationDim::new(2 * dim.get()).expect("n_max >= 2")
}

/// D(α) = exp(α a† − α* a) by matrix exponential.
pub fn displacement(alpha: Complex64, dim: TruncationDim) -> Result<FockOperator> {
    coherent_guard(alpha, dim)?;
    let big = padded(dim);
    let (a, ad) = crate::fock::ladder_ops(big);
    let gen = ad.scale(alpha).sub(&a.scale(alpha.conj()))?;
    op_exp(&gen)?.truncated(dim)
}

pub(crate) fn squeezed_vacuum_amplitudes(xi: SqueezeParam, n: usize) -> Vec<Complex64> {
    let mut amps = vec![ZERO; n];
    let ratio = -Complex64::from_polar(xi.r.tanh(), xi.phi);
    let mut c = Complex64::new(1.0 / xi.r.cosh().sqrt(), 0.0);
    let mut k = 0usize;
    while 2 * k < n {
        amps[2 * k] = c;
        // c_{2k+2} / c_{2k} = ratio · √((2k+1)(2k+2)) / (2(k+1))
        let f = (((2 * k + 1) * (2 * k + 2)) as f64).sqrt() / (2.0 * (k + 1) as f64);
        c = c * ratio * f;
        k += 1;
    }
    amps
}

/// Squeezed vacuum S(ξ)|0⟩ from its closed-form even-number amplitudes.
pub fn squeezed_vacuum(xi: SqueezeParam, dim: TruncationDim) -> FockVector {
    FockVector::from_amplitudes(squeezed_vacuum_amplitudes(xi, dim.get())).expect("finite amplitudes")
}

/// Squeezed coherent state D(α)S(ξ)|0⟩.
pub fn squeezed_coherent(alpha: Complex64, xi: SqueezeParam, dim: TruncationDim) -> FockVector {
    let d = displacement_elements(alpha, dim);
    d.apply(&squeezed_vacuum(xi, dim)).expect("dims agree")
}

fn squeeze_guard(xi: SqueezeParam, dim: TruncationDim) -> Result<()> {
    let sv = squeezed_vacuum(xi, dim);
    let missing = (1.0 - sv.norm_sqr()).max(0.0) + sv.tail_mass();
    if missing >= OPERATOR_TAIL_LIMIT {
        return Err(Error::TruncationInsufficient {
            n_max: dim.get(),
            tail_mass: missing,
        });
    }
    Ok(())
}

/// S(ξ) = exp[(ξ*/2)a² − (ξ/2)a†²] by matrix exponential.
pub fn squeeze(xi: SqueezeParam, dim: TruncationDim) -> Result<FockOperator> {
    squeeze_guard(xi, dim)?;
    let big = padded(dim);
    let (a, ad) = crate::fock::ladder_ops(big);
    let a2 = a.compose(&a)?;
    let ad2 = ad.compose(&ad)?;
    let x = xi.xi();
    let gen = a2.scale(x.conj() * 0.5).sub(&ad2.scale(x * 0.5))?;
    op_exp(&gen)?.truncated(dim)
}

/// Two-mode squeezed vacuum S_ab(ξ)|0,0⟩ = Σ (−e^{iφ} tanh r)ⁿ / cosh r |n,n⟩.
pub fn two_mode_squeezed_vacuum(xi: SqueezeParam, dim: TruncationDim) -> TwoModeVector {
    let n = dim.get();
    let ratio = -Complex64::from_polar(xi.r.tanh(), xi.phi);
    let mut coeffs = CMatrix::zeros(n, n);
    let mut c = Complex64::new(1.0 / xi.r.cosh(), 0.0);
    for k in 0..n {
        coeffs[(k, k)] = c;
        c *= ratio;
    }
    TwoModeVector::from_coefficients(coeffs).expect("square")
}

/// A two-mode Gaussian unitary `exp(G)` held as its sparse generator.
#[derive(Debug, Clone)]
pub struct TwoModeUnitary {
    n: usize,
    generator: SparseMatrix,
    dense_generator: CMatrix,
}

/// Generator term `coef · (a†)^pa a^qa (b†)^pb b^qb` with total degree at most one per factor.
#[derive(Clone, Copy)]
struct Term {
    coef: Complex64,
    da: i32,
    db: i32,
}

fn ladder_factor(n_from: usize, delta: i32) -> Option<(usize, f64)> {
    match delta {
        0 => Some((n_from, 1.0)),
        1 => Some((n_from + 1, ((n_from + 1) as f64).sqrt())),
        -1 if n_from > 0 => Some((n_from - 1, (n_from as f64).sqrt())),
        _ => None,
    }
}

impl TwoModeUnitary {
    fn from_terms(dim: TruncationDim, diag: (Complex64, Complex64), terms: &[Term]) -> Self {
        let n = dim.get();
        let mut sparse = Vec::new();
        let mut dense = CMatrix::zeros(n * n, n * n);
        for na in 0..n {
            for nb in 0..n {
                let d = diag.0 * na as f64 + diag.1 * nb as f64;
                if d != ZERO {
                    sparse.push((na + nb * n, na + nb * n, d));
                    dense[(na * n + nb, na * n + nb)] += d;
                }
                for t in terms {
                    let (Some((ma, fa)), Some((mb, fb))) = (ladder_factor(na, t.da), ladder_factor(nb, t.db)) else {
                        continue;
                    };
                    if ma >= n || mb >= n {
                        continue;
                    }
                    let v = t.coef * fa * fb;
                    sparse.push((ma + mb * n, na + nb * n, v));
                    dense[(ma * n + mb, na * n + nb)] += v;
                }
            }
        }
        TwoModeUnitary {
            n,
            generator: SparseMatrix::from_triplets(n * n, sparse),
            dense_generator: dense,
        }
    }

    pub fn dim(&self) -> TruncationDim {
        TruncationDim::new(self.n).expect("n >= 2")
    }

    pub fn apply(&self, v: &TwoModeVector) -> Result<TwoModeVector> {
        if v.dim().get() != self.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: v.dim().get(),
            });
        }
        let out = self.generator.exp_apply(v.coefficients().as_slice());
        TwoModeVector::from_coefficients(CMatrix::from_vec(self.n, self.n, out))
    }

    /// Inverse unitary exp(−G).
    pub fn inverse(&self) -> TwoModeUnitary {
        TwoModeUnitary {
            n: self.n,
            generator: self.generator.scaled(Complex64::new(-1.0, 0.0)),
            dense_generator: -&self.dense_generator,
        }
    }

    /// Dense matrix on the flattened space (index n_a · n_max + n_b).
    /// Memory grows as n_max⁴; intended for small truncations.
    pub fn to_dense(&self) -> Result<FockOperator> {
        FockOperator::from_matrix(linalg::expm(&self.dense_generator)?)
    }
}

/// Beam splitter unitary realizing [`BeamSplitterParam::mode_matrix`].
pub fn beam_splitter(p: BeamSplitterParam, dim: TruncationDim) -> TwoModeUnitary {
    let k = mode_generator(p.mode_matrix());
    // G = K₀₀ a†a + K₀₁ a†b + K₁₀ b†a + K₁₁ b†b
    let terms = [
        Term { coef: k[0][1], da: 1, db: -1 },
        Term { coef: k[1][0], da: -1, db: 1 },
    ];
    TwoModeUnitary::from_terms(dim, (k[0][0], k[1][1]), &terms)
}

/// Anti-Hermitian K with exp(K) = M for M ∈ SU(2).
fn mode_generator(m: [[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    let cos_w = (0.5 * (m[0][0] + m[1][1]).re).clamp(-1.0, 1.0);
    let w = cos_w.acos();
    let sin_w = w.sin();
    if sin_w.abs() < 1e-12 {
        if cos_w > 0.0 {
            return [[m[0][0] - 1.0, m[0][1]], [m[1][0], m[1][1] - 1.0]];
        }
        let ipi = Complex64::new(0.0, PI);
        return [[ipi, ZERO], [ZERO, -ipi]];
    }
    let f = w / sin_w;
    [
        [(m[0][0] - cos_w) * f, m[0][1] * f],
        [m[1][0] * f, (m[1][1] - cos_w) * f],
    ]
}

fn two_mode_squeeze_guard(xi: SqueezeParam, dim: TruncationDim) -> Result<()> {
    let t = two_mode_squeezed_vacuum(xi, dim);
    let missing = (1.0 - t.norm_sqr()).max(0.0) + t.tail_mass();
    if missing >= OPERATOR_TAIL_LIMIT {
        return Err(Error::TruncationInsufficient {
            n_max: dim.get(),
            tail_mass: missing,
        });
    }
    Ok(())
}

/// S_ab(ξ) = exp(ξ* ab − ξ a†b†).
pub fn two_mode_squeeze(xi: SqueezeParam, dim: TruncationDim) -> Result<TwoModeUnitary> {
    two_mode_squeeze_guard(xi, dim)?;
    let x = xi.xi();
    let terms = [
        Term { coef: x.conj(), da: -1, db: -1 },
        Term { coef: -x, da: 1, db: 1 },
    ];
    Ok(TwoModeUnitary::from_terms(dim, (ZERO, ZERO), &terms))
}

/// Result of applying a^k without renormalizing.
#[derive(Debug, Clone, PartialEq)]
pub struct Subtracted {
    pub state: FockVector,
    /// Squared norm of `state`; zero flags an annihilated input.
    pub weight: f64,
}

impl Subtracted {
    pub fn is_zero(&self) -> bool {
        self.weight <= f64::MIN_POSITIVE
    }
}

/// aᵏ|ψ⟩.
pub fn photon_subtract(state: &FockVector, k: usize) -> Result<Subtracted> {
    if k == 0 {
        return Err(Error::invalid("k", "must be at least 1"));
    }
    let n = state.n_max();
    let amps = DVector::from_fn(n, |m, _| {
        if m + k < n {
            let f: f64 = ((m + 1)..=(m + k)).map(|j| (j as f64).sqrt()).product();
            state.amplitude(m + k) * f
        } else {
            ZERO
        }
    });
    let out = FockVector::from_amplitudes(amps.as_slice().to_vec())?;
    let weight = out.norm_sqr();
    Ok(Subtracted { state: out, weight })
}
