//! Phase-space and entanglement diagnostics.
//!
//! Wigner values use the displaced-parity form
//! W(β) = (2/π) Tr[ρ D(β) Π D†(β)] = (2/π) Tr[ρ D(2β) Π], and the joint
//! parity P_J(α, β) = Tr[ρ D(α)D(β) Π_aΠ_b D†(β)D†(α)] uses the same
//! displacement matrix elements. Those elements are exact inside the
//! truncated space, so the only truncation error is the tail of the state.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{DensityMatrix, FockVector, Mode, PureState, TwoModeVector};
use crate::gaussian::for_each_displacement_element;
use crate::linalg::{self, CMatrix};
use crate::measurement::WeakValue;
use crate::truncation::{check_tail, TAIL_TOLERANCE};

const TWO_OVER_PI: f64 = std::f64::consts::FRAC_2_PI;

fn sign(n: usize) -> f64 {
    if n.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| if i + 1 == n { hi } else { lo + step * i as f64 }).collect()
}

/// Rectangular grid over β = x + ip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpaceGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub nx: usize,
    pub np: usize,
}

impl Default for PhaseSpaceGrid {
    /// [−6, 6]² with 201 points per axis.
    fn default() -> Self {
        PhaseSpaceGrid {
            x_min: -6.0,
            x_max: 6.0,
            p_min: -6.0,
            p_max: 6.0,
            nx: 201,
            np: 201,
        }
    }
}

impl PhaseSpaceGrid {
    pub fn new(x_min: f64, x_max: f64, p_min: f64, p_max: f64, nx: usize, np: usize) -> Result<Self> {
        let g = PhaseSpaceGrid {
            x_min,
            x_max,
            p_min,
            p_max,
            nx,
            np,
        };
        g.validate()?;
        Ok(g)
    }

    /// Square grid [−half, half]² with `n` points per axis.
    pub fn square(half: f64, n: usize) -> Result<Self> {
        Self::new(-half, half, -half, half, n, n)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.x_min, self.x_max, self.p_min, self.p_max].iter().all(|v| v.is_finite());
        if !finite || self.x_min >= self.x_max || self.p_min >= self.p_max {
            return Err(Error::invalid("grid", "bounds must be finite with min < max"));
        }
        if self.nx < 2 || self.np < 2 {
            return Err(Error::invalid("grid", "at least two points per axis"));
        }
        Ok(())
    }

    pub fn xs(&self) -> Vec<f64> {
        linspace(self.x_min, self.x_max, self.nx)
    }

    pub fn ps(&self) -> Vec<f64> {
        linspace(self.p_min, self.p_max, self.np)
    }

    pub fn cell_area(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64 * (self.p_max - self.p_min) / (self.np - 1) as f64
    }
}

/// Wigner values on a grid; `values[(i, j)]` is W(x_i + i p_j).
#[derive(Debug, Clone, PartialEq)]
pub struct WignerMap {
    pub grid: PhaseSpaceGrid,
    pub values: DMatrix<f64>,
}

impl WignerMap {
    /// Riemann sum Σ W · cell area.
    pub fn integral(&self) -> f64 {
        self.values.sum() * self.grid.cell_area()
    }

    pub fn min(&self) -> f64 {
        self.values.min()
    }

    pub fn max(&self) -> f64 {
        self.values.max()
    }

    /// Interior points strictly above all eight neighbours and above
    /// `min_height`.
    pub fn local_maxima(&self, min_height: f64) -> Vec<(usize, usize)> {
        let v = &self.values;
        let (nx, np) = v.shape();
        let mut out = Vec::new();
        for i in 1..nx.saturating_sub(1) {
            for j in 1..np.saturating_sub(1) {
                let c = v[(i, j)];
                if c <= min_height {
                    continue;
                }
                let is_max = (i - 1..=i + 1)
                    .flat_map(|a| (j - 1..=j + 1).map(move |b| (a, b)))
                    .filter(|&(a, b)| (a, b) != (i, j))
                    .all(|(a, b)| v[(a, b)] < c);
                if is_max {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

/// W(β) of a pure state.
pub fn wigner_point(state: &FockVector, beta: Complex64) -> f64 {
    let psi = state.amplitudes();
    let n = psi.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for_each_displacement_element(2.0 * beta, n, |row, col, d| {
        acc += psi[row].conj() * d * psi[col] * sign(col);
    });
    TWO_OVER_PI * acc.re
}

/// W(β) of a single-mode density matrix.
pub fn wigner_point_density(rho: &DensityMatrix, beta: Complex64) -> f64 {
    let m = rho.matrix();
    let n = m.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for_each_displacement_element(2.0 * beta, n, |row, col, d| {
        acc += d * sign(col) * m[(col, row)];
    });
    TWO_OVER_PI * acc.re
}

/// Wigner map of a normalized pure state.
pub fn wigner(state: &FockVector, grid: &PhaseSpaceGrid) -> Result<WignerMap> {
    grid.validate()?;
    if !state.is_normalized() {
        return Err(Error::NotNormalized { norm: state.norm() });
    }
    check_tail(state, TAIL_TOLERANCE)?;
    Ok(map_grid(grid, |b| wigner_point(state, b)))
}

/// Wigner map of a single-mode density matrix.
pub fn wigner_density(rho: &DensityMatrix, grid: &PhaseSpaceGrid) -> Result<WignerMap> {
    grid.validate()?;
    if rho.two_mode_dim().is_some() {
        return Err(Error::invalid("rho", "expected a single-mode density matrix"));
    }
    Ok(map_grid(grid, |b| wigner_point_density(rho, b)))
}

fn map_grid(grid: &PhaseSpaceGrid, f: impl Fn(Complex64) -> f64) -> WignerMap {
    let xs = grid.xs();
    let ps = grid.ps();
    let values = DMatrix::from_fn(grid.nx, grid.np, |i, j| f(Complex64::new(xs[i], ps[j])));
    WignerMap { grid: *grid, values }
}

/// ∫|W| dx dp − 1 over the grid.
pub fn negativity_volume(map: &WignerMap) -> f64 {
    map.values.iter().map(|v| v.abs()).sum::<f64>() * map.grid.cell_area() - 1.0
}

// ---------------------------------------------------------------------------
// Joint parity

/// Geometry of a P_J section.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SectionKind {
    /// Im α = Im β = 0; 2D over (Re α, Re β).
    ReRe,
    /// Re α = Re β = 0; 2D over (Im α, Im β).
    ImIm,
    /// α = β = x real.
    ReDiag,
    /// α = β = iy.
    ImDiag,
}

impl SectionKind {
    pub fn is_2d(self) -> bool {
        matches!(self, SectionKind::ReRe | SectionKind::ImIm)
    }

    fn unit(self) -> Complex64 {
        match self {
            SectionKind::ReRe | SectionKind::ReDiag => Complex64::new(1.0, 0.0),
            SectionKind::ImIm | SectionKind::ImDiag => Complex64::new(0.0, 1.0),
        }
    }
}

/// A section with its coordinate range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionSpec {
    pub kind: SectionKind,
    pub min: f64,
    pub max: f64,
    pub n_points: usize,
}

impl SectionSpec {
    /// [−4, 4] with 161 points.
    pub fn new(kind: SectionKind) -> Self {
        SectionSpec {
            kind,
            min: -4.0,
            max: 4.0,
            n_points: 161,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite() && self.min < self.max) || self.n_points < 2 {
            return Err(Error::invalid("section", "range must be finite with min < max and >= 2 points"));
        }
        Ok(())
    }

    pub fn coordinates(&self) -> Vec<f64> {
        linspace(self.min, self.max, self.n_points)
    }
}

/// P_J along a section. For 2D kinds `values[(i, j)]` is P_J at the
/// i-th α coordinate and j-th β coordinate; diagonal cuts are a single
/// column.
#[derive(Debug, Clone, PartialEq)]
pub struct SectionMap {
    pub spec: SectionSpec,
    pub coordinates: Vec<f64>,
    pub values: DMatrix<f64>,
}

impl SectionMap {
    pub fn min(&self) -> f64 {
        self.values.min()
    }

    pub fn max(&self) -> f64 {
        self.values.max()
    }

    /// Value closest to α = β = 0.
    pub fn central_value(&self) -> f64 {
        let mid = self
            .coordinates
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(i, _)| i)
            .unwrap_or(0);
        if self.spec.kind.is_2d() {
            self.values[(mid, mid)]
        } else {
            self.values[(mid, 0)]
        }
    }
}

fn displaced_parity(alpha: Complex64, n: usize) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    for_each_displacement_element(2.0 * alpha, n, |row, col, d| m[(row, col)] = d * sign(col));
    m
}

/// A(α)_{jl} = Σ_{ik} C*_{ij} [D(2α)Π]_{ik} C_{kl}, so that
/// P_J(α, β) = Σ_{jl} A(α)_{jl} [D(2β)Π]_{jl}.
fn partial_parity(c: &CMatrix, alpha: Complex64) -> CMatrix {
    let da = displaced_parity(alpha, c.nrows());
    linalg::matmul(&c.adjoint(), &linalg::matmul(&da, c))
}

fn contract(a: &CMatrix, beta: Complex64) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for_each_displacement_element(2.0 * beta, a.nrows(), |row, col, d| {
        acc += a[(row, col)] * d * sign(col);
    });
    acc.re
}

/// P_J(α, β) of a pure two-mode state.
pub fn joint_parity_point(state: &TwoModeVector, alpha: Complex64, beta: Complex64) -> f64 {
    contract(&partial_parity(state.coefficients(), alpha), beta)
}

/// P_J of a two-mode density matrix by direct contraction over all four
/// indices.
pub fn joint_parity_point_density(rho: &DensityMatrix, alpha: Complex64, beta: Complex64) -> Result<f64> {
    let n = rho
        .two_mode_dim()
        .ok_or_else(|| Error::invalid("rho", "expected a two-mode density matrix"))?
        .get();
    let da = displaced_parity(alpha, n);
    let db = displaced_parity(beta, n);
    let m = rho.matrix();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    acc += m[(k * n + l, i * n + j)] * da[(i, k)] * db[(j, l)];
                }
            }
        }
    }
    Ok(acc.re)
}

/// P_J over a section of a normalized pure two-mode state.
pub fn joint_parity_map(state: &TwoModeVector, spec: &SectionSpec) -> Result<SectionMap> {
    spec.validate()?;
    if !state.is_normalized() {
        return Err(Error::NotNormalized { norm: state.norm() });
    }
    check_tail(state, TAIL_TOLERANCE)?;
    let coords = spec.coordinates();
    let u = spec.kind.unit();
    let c = state.coefficients();
    let values = if spec.kind.is_2d() {
        let mut v = DMatrix::zeros(coords.len(), coords.len());
        for (i, &x) in coords.iter().enumerate() {
            let a = partial_parity(c, u * x);
            for (j, &y) in coords.iter().enumerate() {
                v[(i, j)] = contract(&a, u * y);
            }
        }
        v
    } else {
        DMatrix::from_iterator(coords.len(), 1, coords.iter().map(|&x| joint_parity_point(state, u * x, u * x)))
    };
    Ok(SectionMap {
        spec: *spec,
        coordinates: coords,
        values,
    })
}

/// P_J over a section of a two-mode density matrix.
pub fn joint_parity_map_density(rho: &DensityMatrix, spec: &SectionSpec) -> Result<SectionMap> {
    spec.validate()?;
    let coords = spec.coordinates();
    let u = spec.kind.unit();
    let values = if spec.kind.is_2d() {
        let mut v = DMatrix::zeros(coords.len(), coords.len());
        for (i, &x) in coords.iter().enumerate() {
            for (j, &y) in coords.iter().enumerate() {
                v[(i, j)] = joint_parity_point_density(rho, u * x, u * y)?;
            }
        }
        v
    } else {
        let vals = coords
            .iter()
            .map(|&x| joint_parity_point_density(rho, u * x, u * x))
            .collect::<Result<Vec<_>>>()?;
        DMatrix::from_vec(coords.len(), 1, vals)
    };
    Ok(SectionMap {
        spec: *spec,
        coordinates: coords,
        values,
    })
}

/// Sign changes along a sequence, skipping entries with |v| < `floor`.
pub fn sign_changes(values: &[f64], floor: f64) -> usize {
    let mut last: Option<bool> = None;
    let mut count = 0;
    for &v in values {
        if v.abs() < floor {
            continue;
        }
        let positive = v > 0.0;
        if let Some(prev) = last {
            if prev != positive {
                count += 1;
            }
        }
        last = Some(positive);
    }
    count
}

// ---------------------------------------------------------------------------
// Entanglement

/// Prefactor applied to 1 − Tr ρ₁².
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntropyConvention {
    /// Prefactor 1.
    #[default]
    Asymptotic,
    /// Prefactor d/(d − 1) with d the per-mode truncation.
    Truncated,
}

/// Linear entropy of the reduced state of mode a.
pub fn linear_entropy(state: &TwoModeVector, convention: EntropyConvention) -> Result<f64> {
    if !state.is_normalized() {
        return Err(Error::NotNormalized { norm: state.norm() });
    }
    let e = 1.0 - state.reduced_density(Mode::A).purity();
    Ok(match convention {
        EntropyConvention::Asymptotic => e,
        EntropyConvention::Truncated => {
            let d = state.n_max() as f64;
            e * d / (d - 1.0)
        }
    })
}

/// 1 − 1/cosh(2r), the two-mode squeezed vacuum value.
pub fn tmsv_linear_entropy(r: f64) -> f64 {
    1.0 - 1.0 / (2.0 * r).cosh()
}

/// Concurrence of M[λ|a⟩|b⟩ + δ|c⟩|d⟩] with P₁ = ⟨a|c⟩ and P₂ = ⟨b|d⟩.
pub fn concurrence_general(lambda: Complex64, delta: Complex64, p1: Complex64, p2: Complex64, m: f64) -> Result<f64> {
    let inputs = [lambda.re, lambda.im, delta.re, delta.im, p1.re, p1.im, p2.re, p2.im, m];
    if inputs.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    if p1.norm() > 1.0 + 1e-12 || p2.norm() > 1.0 + 1e-12 {
        return Err(Error::invalid("overlap", "|P| must not exceed 1"));
    }
    let norm_sqr = m * m * (lambda.norm_sqr() + delta.norm_sqr() + 2.0 * (lambda.conj() * delta * p1 * p2).re);
    if (norm_sqr - 1.0).abs() > 1e-8 {
        return Err(Error::InconsistentNormalization { norm: norm_sqr.sqrt() });
    }
    let q1 = (1.0 - p1.norm_sqr()).max(0.0).sqrt();
    let q2 = (1.0 - p2.norm_sqr()).max(0.0).sqrt();
    Ok((2.0 * m * m * lambda * delta * q1 * q2).norm())
}

/// Concurrence of the Bell-like states, 2γ²(1 − e^{−2s²})|1 − w²|.
pub fn concurrence_bell_like(s: f64, wv: WeakValue) -> Result<f64> {
    if !(s >= 0.0 && s.is_finite()) {
        return Err(Error::invalid("s", format!("must be finite and >= 0, got {s}")));
    }
    let e = (-2.0 * s * s).exp();
    let w = wv.value();
    let denom = 1.0 + e + w.norm_sqr() * (1.0 - e);
    Ok((1.0 - e) * (1.0 - w * w).norm() / denom)
}

/// 2√(Σ_{i<j} σᵢ²σⱼ²) from the Schmidt coefficients; equals
/// √(2(1 − Tr ρ₁²)) for normalized states without its cancellation near 0.
pub fn pure_state_concurrence(state: &TwoModeVector) -> Result<f64> {
    if !state.is_normalized() {
        return Err(Error::NotNormalized { norm: state.norm() });
    }
    let sv = state.schmidt_coefficients();
    let total: f64 = sv.iter().map(|x| x * x).sum();
    let w: Vec<f64> = sv.iter().map(|x| x * x / total).collect();
    let mut acc = 0.0;
    for i in 0..w.len() {
        for j in i + 1..w.len() {
            acc += w[i] * w[j];
        }
    }
    Ok(2.0 * acc.sqrt())
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_1_SQRT_2;

    use super::*;
    use crate::fock::{tensor, vacuum, TruncationDim};
    use crate::gaussian::{coherent, squeezed_vacuum, two_mode_squeezed_vacuum, SqueezeParam};
    use crate::protocols::{bell_like, even_cat, odd_cat, yurke_stoler, BellVariant};

    fn dim(n: usize) -> TruncationDim {
        TruncationDim::new(n).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn small_grid() -> PhaseSpaceGrid {
        PhaseSpaceGrid::square(5.0, 81).unwrap()
    }

    /// Closed-form Wigner function of a coherent state.
    fn coherent_wigner(alpha: Complex64, beta: Complex64) -> f64 {
        TWO_OVER_PI * (-2.0 * (beta - alpha).norm_sqr()).exp()
    }

    #[test]
    fn parity_anchors() {
        let d = dim(32);
        assert!((wigner_point(&vacuum(d), c(0.0, 0.0)) - TWO_OVER_PI).abs() < 1e-14);
        let one = FockVector::basis(d, 1).unwrap();
        assert!((wigner_point(&one, c(0.0, 0.0)) + TWO_OVER_PI).abs() < 1e-14);
        let d = dim(64);
        assert!((wigner_point(&even_cat(1.5, d).unwrap(), c(0.0, 0.0)) - TWO_OVER_PI).abs() < 1e-10);
        assert!((wigner_point(&odd_cat(1.5, d).unwrap(), c(0.0, 0.0)) + TWO_OVER_PI).abs() < 1e-10);
        let ys = yurke_stoler(1.5, d).unwrap();
        assert!((wigner_point(&ys, c(0.0, 0.0)) - TWO_OVER_PI * (-4.5f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn coherent_state_matches_gaussian_form() {
        let d = dim(64);
        let alpha = c(1.0, -0.5);
        let v = coherent(alpha, d).unwrap();
        for beta in [c(0.0, 0.0), c(1.3, 0.2), c(-2.0, 3.0), c(5.5, -5.5)] {
            assert!((wigner_point(&v, beta) - coherent_wigner(alpha, beta)).abs() < 1e-12);
        }
    }

    #[test]
    fn cat_wigner_matches_series_form() {
        // W of N(|s⟩ + |−s⟩) from the four coherent-state cross terms.
        let s = 1.5;
        let d = dim(64);
        let cat = even_cat(s, d).unwrap();
        let n2 = 1.0 / (2.0 * (1.0 + (-2.0 * s * s).exp()));
        for beta in [c(0.3, 0.4), c(-1.0, 1.2), c(1.5, 0.0)] {
            let direct = coherent_wigner(c(s, 0.0), beta) + coherent_wigner(c(-s, 0.0), beta);
            let cross = 2.0 * TWO_OVER_PI * (-2.0 * beta.norm_sqr()).exp() * (4.0 * s * beta.im).cos();
            assert!((wigner_point(&cat, beta) - n2 * (direct + cross)).abs() < 1e-12);
        }
    }

    #[test]
    fn density_and_pure_paths_agree() {
        let v = yurke_stoler(1.2, dim(48)).unwrap();
        let rho = DensityMatrix::from_pure(&v);
        for beta in [c(0.0, 0.0), c(0.7, -1.1), c(-2.0, 0.5)] {
            assert!((wigner_point(&v, beta) - wigner_point_density(&rho, beta)).abs() < 1e-13);
        }
    }

    #[test]
    fn normalization_and_negativity() {
        let grid = PhaseSpaceGrid::default();
        let d = dim(64);
        let vac = wigner(&vacuum(d), &grid).unwrap();
        assert!((vac.integral() - 1.0).abs() < 1e-3);
        assert!(negativity_volume(&vac).abs() < 1e-6);
        let coh = wigner(&coherent(c(1.0, 0.0), d).unwrap(), &grid).unwrap();
        assert!(negativity_volume(&coh).abs() < 1e-6);
        assert!(coh.min() > -1e-6);
        let sq = wigner(&squeezed_vacuum(SqueezeParam::real(0.8).unwrap(), d), &grid).unwrap();
        assert!(sq.min() > -1e-6);
        let cat = wigner(&even_cat(1.5, d).unwrap(), &grid).unwrap();
        assert!((cat.integral() - 1.0).abs() < 1e-3);
        let nv = negativity_volume(&cat);
        // Same Riemann sum over the closed-form cat Wigner function.
        let s: f64 = 1.5;
        let n2 = 1.0 / (2.0 * (1.0 + (-2.0 * s * s).exp()));
        let mut oracle = 0.0;
        for &x in &grid.xs() {
            for &p in &grid.ps() {
                let b = c(x, p);
                let w = n2
                    * (coherent_wigner(c(s, 0.0), b)
                        + coherent_wigner(c(-s, 0.0), b)
                        + 2.0 * TWO_OVER_PI * (-2.0 * b.norm_sqr()).exp() * (4.0 * s * p).cos());
                oracle += w.abs();
            }
        }
        oracle = oracle * grid.cell_area() - 1.0;
        assert!((nv - oracle).abs() < 1e-8, "{nv} vs {oracle}");
        assert!((nv - 0.4811).abs() < 1e-3);
    }

    #[test]
    fn local_maxima_of_a_cat() {
        let cat = wigner(&even_cat(2.0, dim(64)).unwrap(), &small_grid()).unwrap();
        let peaks = cat.local_maxima(0.05);
        assert!(peaks.len() >= 3, "{peaks:?}");
    }

    #[test]
    fn grid_and_section_validation() {
        assert!(PhaseSpaceGrid::new(1.0, 1.0, -1.0, 1.0, 10, 10).is_err());
        assert!(PhaseSpaceGrid::new(-1.0, 1.0, -1.0, 1.0, 1, 10).is_err());
        let mut s = SectionSpec::new(SectionKind::ReDiag);
        s.n_points = 1;
        assert!(s.validate().is_err());
        assert_eq!(SectionSpec::new(SectionKind::ReRe).coordinates().len(), 161);
    }

    #[test]
    fn joint_parity_anchors() {
        let d = dim(24);
        let vv = tensor(&vacuum(d), &vacuum(d)).unwrap();
        assert!((joint_parity_point(&vv, c(0.0, 0.0), c(0.0, 0.0)) - 1.0).abs() < 1e-14);
        let one = TwoModeVector::basis(d, 1, 0).unwrap();
        assert!((joint_parity_point(&one, c(0.0, 0.0), c(0.0, 0.0)) + 1.0).abs() < 1e-14);
        let (a, b) = (c(0.4, -0.2), c(-0.8, 0.6));
        let prod = tensor(&coherent(a, d).unwrap(), &coherent(b, d).unwrap()).unwrap();
        let want = (-2.0 * (c(0.1, 0.3) - a).norm_sqr()).exp() * (-2.0 * (c(-0.5, 0.2) - b).norm_sqr()).exp();
        assert!((joint_parity_point(&prod, c(0.1, 0.3), c(-0.5, 0.2)) - want).abs() < 1e-12);
    }

    #[test]
    fn joint_parity_density_matches_pure() {
        let v = bell_like(0.8, WeakValue::real(3.0), BellVariant::Phi4, dim(10)).unwrap();
        let rho = DensityMatrix::from_two_mode_pure(&v);
        for (a, b) in [(c(0.0, 0.0), c(0.0, 0.0)), (c(0.3, 0.1), c(-0.2, 0.4))] {
            let p = joint_parity_point(&v, a, b);
            let q = joint_parity_point_density(&rho, a, b).unwrap();
            assert!((p - q).abs() < 1e-12);
        }
        let spec = SectionSpec {
            kind: SectionKind::ImIm,
            min: -1.0,
            max: 1.0,
            n_points: 5,
        };
        let pure = joint_parity_map(&v, &spec).unwrap();
        let dens = joint_parity_map_density(&rho, &spec).unwrap();
        assert!((&pure.values - &dens.values).amax() < 1e-12);
    }

    #[test]
    fn sign_change_counting() {
        assert_eq!(sign_changes(&[1.0, -1.0, 1e-5, -0.5, 0.5], 1e-3), 2);
        assert_eq!(sign_changes(&[], 1e-3), 0);
    }

    #[test]
    fn entropy_examples() {
        let d = dim(8);
        let prod = tensor(&vacuum(d), &FockVector::basis(d, 1).unwrap()).unwrap();
        assert!(linear_entropy(&prod, EntropyConvention::Asymptotic).unwrap().abs() < 1e-15);
        let bell = TwoModeVector::basis(d, 0, 1)
            .unwrap()
            .add(&TwoModeVector::basis(d, 1, 0).unwrap())
            .unwrap()
            .scale(c(FRAC_1_SQRT_2, 0.0));
        assert!((linear_entropy(&bell, EntropyConvention::Asymptotic).unwrap() - 0.5).abs() < 1e-14);
        assert!((linear_entropy(&bell, EntropyConvention::Truncated).unwrap() - 0.5 * 8.0 / 7.0).abs() < 1e-14);
        assert!((pure_state_concurrence(&bell).unwrap() - 1.0).abs() < 1e-14);
        assert!(pure_state_concurrence(&prod).unwrap() < 1e-15);

        let tmsv = two_mode_squeezed_vacuum(SqueezeParam::real(1.0).unwrap(), dim(64));
        let e = linear_entropy(&tmsv, EntropyConvention::Asymptotic).unwrap();
        assert!((e - tmsv_linear_entropy(1.0)).abs() < 1e-9);
        assert!((tmsv_linear_entropy(1.0) - 0.73420).abs() < 1e-5);
    }

    #[test]
    fn concurrence_examples() {
        let h = c(FRAC_1_SQRT_2, 0.0);
        let z = c(0.0, 0.0);
        assert!((concurrence_general(h, h, z, z, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(concurrence_general(c(1.0, 0.0), z, c(0.3, 0.0), z, 1.0).unwrap(), 0.0);
        assert!(matches!(
            concurrence_general(h, h, z, z, 2.0),
            Err(Error::InconsistentNormalization { .. })
        ));

        let w0 = WeakValue::real(0.0);
        assert_eq!(concurrence_bell_like(0.0, w0).unwrap(), 0.0);
        assert_eq!(concurrence_bell_like(1.3, WeakValue::real(1.0)).unwrap(), 0.0);
        assert_eq!(concurrence_bell_like(1.3, WeakValue::real(-1.0)).unwrap(), 0.0);
        let e = (-4.5f64).exp();
        let c15 = concurrence_bell_like(1.5, w0).unwrap();
        assert!((c15 - (1.0 - e) / (1.0 + e)).abs() < 1e-15);
        assert!((c15 - 0.97803).abs() < 1e-5);
        // Saturates at (w² − 1)/(w² + 1) for large s.
        let c3 = concurrence_bell_like(3.0, WeakValue::real(10.0)).unwrap();
        assert!((c3 - 99.0 / 101.0).abs() < 1e-7);
        let curve: Vec<f64> = (0..=30)
            .map(|i| concurrence_bell_like(0.1 * i as f64, WeakValue::real(10.0)).unwrap())
            .collect();
        assert!(curve.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn bell_like_concurrence_three_ways() {
        let (s, x) = (1.5, 0.0);
        let wv = WeakValue::real(x);
        let state = bell_like(s, wv, BellVariant::Phi3, dim(40)).unwrap();
        let closed = concurrence_bell_like(s, wv).unwrap();
        assert!((pure_state_concurrence(&state).unwrap() - closed).abs() < 1e-8);
        let overlap = c((-s * s).exp(), 0.0);
        let gamma = 1.0 / crate::protocols::gamma_inv_sq(s, wv).sqrt();
        let general = concurrence_general(wv.t_plus(), wv.t_minus(), overlap, overlap, gamma).unwrap();
        assert!((general - closed).abs() < 1e-10);
        let purity_form = (2.0 * (1.0 - state.reduced_density(Mode::A).purity())).sqrt();
        assert!((purity_form - closed).abs() < 1e-7);
    }
}
