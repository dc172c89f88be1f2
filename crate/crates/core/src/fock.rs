//! States and operators on truncated single- and two-mode Fock spaces.
//!
//! A single mode keeps the number states |0⟩ … |n_max − 1⟩. Two-mode states
//! store their amplitudes as an `n_max × n_max` coefficient matrix with mode
//! `a` on the rows and mode `b` on the columns; the flattened index of
//! |n_a, n_b⟩ is `n_a · n_max + n_b` (mode `a` outer).

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};

/// Accepted deviation of ‖ψ‖ from one for inputs that must be normalized.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Number of top Fock levels whose population counts as truncation tail.
pub const TAIL_WINDOW: usize = 4;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Number of retained Fock levels per mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TruncationDim(usize);

impl TruncationDim {
    pub const DEFAULT_SINGLE: usize = 64;
    pub const DEFAULT_TWO_MODE: usize = 40;

    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 2 {
            return Err(Error::invalid("n_max", format!("must be at least 2, got {n_max}")));
        }
        Ok(TruncationDim(n_max))
    }

    pub fn single_mode_default() -> Self {
        TruncationDim(Self::DEFAULT_SINGLE)
    }

    pub fn two_mode_default() -> Self {
        TruncationDim(Self::DEFAULT_TWO_MODE)
    }

    pub fn get(self) -> usize {
        self.0
    }
}

/// Which mode of a two-mode system an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    A,
    B,
}

impl Mode {
    pub fn other(self) -> Mode {
        match self {
            Mode::A => Mode::B,
            Mode::B => Mode::A,
        }
    }
}

/// Common access to state amplitudes, used by overlap-type functions.
pub trait PureState {
    /// Amplitudes in a fixed storage order shared by all states of the same shape.
    fn amplitudes_slice(&self) -> &[Complex64];
    /// Per-mode truncation; states are comparable only when this matches.
    fn n_max(&self) -> usize;
    /// Population in the top [`TAIL_WINDOW`] levels of any mode.
    fn tail_mass(&self) -> f64;

    fn norm_sqr(&self) -> f64 {
        self.amplitudes_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= NORM_TOLERANCE
    }
}

fn inner_slices(bra: &[Complex64], ket: &[Complex64]) -> Complex64 {
    bra.iter().zip(ket).map(|(b, k)| b.conj() * k).sum()
}

/// ⟨u|v⟩ for states of equal shape.
pub fn overlap<S: PureState>(u: &S, v: &S) -> Result<Complex64> {
    if u.n_max() != v.n_max() {
        return Err(Error::DimensionMismatch {
            left: u.n_max(),
            right: v.n_max(),
        });
    }
    Ok(inner_slices(u.amplitudes_slice(), v.amplitudes_slice()))
}

/// |⟨u|v⟩|² for normalized states.
pub fn fidelity<S: PureState>(u: &S, v: &S) -> Result<f64> {
    for s in [u, v] {
        if !s.is_normalized() {
            return Err(Error::NotNormalized { norm: s.norm() });
        }
    }
    Ok(overlap(u, v)?.norm_sqr())
}

/// Single-mode pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    amps: DVector<Complex64>,
}

impl FockVector {
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        TruncationDim::new(amps.len())?;
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(FockVector {
            amps: DVector::from_vec(amps),
        })
    }

    pub(crate) fn from_dvector(amps: DVector<Complex64>) -> Self {
        FockVector { amps }
    }

    /// Number state |k⟩.
    pub fn basis(dim: TruncationDim, k: usize) -> Result<Self> {
        if k >= dim.get() {
            return Err(Error::invalid("k", format!("{k} outside truncation {}", dim.get())));
        }
        let mut amps = DVector::from_element(dim.get(), ZERO);
        amps[k] = ONE;
        Ok(FockVector { amps })
    }

    pub fn dim(&self) -> TruncationDim {
        TruncationDim(self.amps.len())
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amps
    }

    pub fn amplitude(&self, n: usize) -> Complex64 {
        self.amps[n]
    }

    pub fn inner(&self, other: &FockVector) -> Result<Complex64> {
        overlap(self, other)
    }

    /// Rescaled copy with unit norm.
    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm();
        if norm <= f64::MIN_POSITIVE || !norm.is_finite() {
            return Err(Error::NotNormalized { norm });
        }
        Ok(FockVector {
            amps: self.amps.unscale(norm),
        })
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        FockVector {
            amps: &self.amps * factor,
        }
    }

    pub fn add(&self, other: &FockVector) -> Result<Self> {
        if self.amps.len() != other.amps.len() {
            return Err(Error::DimensionMismatch {
                left: self.amps.len(),
                right: other.amps.len(),
            });
        }
        Ok(FockVector {
            amps: &self.amps + &other.amps,
        })
    }

    /// Zero-padded or truncated copy with `n_max` levels.
    pub fn resized(&self, dim: TruncationDim) -> Self {
        let n = dim.get();
        FockVector {
            amps: DVector::from_fn(n, |i, _| if i < self.amps.len() { self.amps[i] } else { ZERO }),
        }
    }

    pub fn expectation(&self, op: &FockOperator) -> Result<Complex64> {
        let applied = op.apply(self)?;
        self.inner(&applied)
    }

    /// ⟨(−1)^n⟩.
    pub fn parity_expectation(&self) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .map(|(n, z)| if n % 2 == 0 { z.norm_sqr() } else { -z.norm_sqr() })
            .sum()
    }

    pub fn mean_photon_number(&self) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .map(|(n, z)| n as f64 * z.norm_sqr())
            .sum()
    }
}

impl PureState for FockVector {
    fn amplitudes_slice(&self) -> &[Complex64] {
        self.amps.as_slice()
    }

    fn n_max(&self) -> usize {
        self.amps.len()
    }

    fn tail_mass(&self) -> f64 {
        let n = self.amps.len();
        let start = n.saturating_sub(TAIL_WINDOW);
        self.amps.rows(start, n - start).iter().map(|z| z.norm_sqr()).sum()
    }
}

/// The vacuum |0⟩.
pub fn vacuum(dim: TruncationDim) -> FockVector {
    FockVector::basis(dim, 0).expect("n_max >= 2")
}

/// Two-mode pure state stored as a coefficient matrix `c[(n_a, n_b)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeVector {
    coeffs: CMatrix,
}

impl TwoModeVector {
    pub fn from_coefficients(coeffs: CMatrix) -> Result<Self> {
        if coeffs.nrows() != coeffs.ncols() {
            return Err(Error::DimensionMismatch {
                left: coeffs.nrows(),
                right: coeffs.ncols(),
            });
        }
        TruncationDim::new(coeffs.nrows())?;
        if coeffs.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(TwoModeVector { coeffs })
    }

    /// Builds from amplitudes in flattened order `n_a · n_max + n_b`.
    pub fn from_flat(dim: TruncationDim, flat: &[Complex64]) -> Result<Self> {
        let n = dim.get();
        if flat.len() != n * n {
            return Err(Error::DimensionMismatch {
                left: flat.len(),
                right: n * n,
            });
        }
        Self::from_coefficients(CMatrix::from_fn(n, n, |a, b| flat[a * n + b]))
    }

    pub fn basis(dim: TruncationDim, n_a: usize, n_b: usize) -> Result<Self> {
        let n = dim.get();
        if n_a >= n || n_b >= n {
            return Err(Error::invalid("n_a/n_b", "outside truncation"));
        }
        let mut coeffs = CMatrix::zeros(n, n);
        coeffs[(n_a, n_b)] = ONE;
        Ok(TwoModeVector { coeffs })
    }

    pub fn dim(&self) -> TruncationDim {
        TruncationDim(self.coeffs.nrows())
    }

    pub fn coefficients(&self) -> &CMatrix {
        &self.coeffs
    }

    pub fn amplitude(&self, n_a: usize, n_b: usize) -> Complex64 {
        self.coeffs[(n_a, n_b)]
    }

    pub fn flat_index(&self, n_a: usize, n_b: usize) -> usize {
        n_a * self.coeffs.nrows() + n_b
    }

    /// Amplitudes in flattened order `n_a · n_max + n_b`.
    pub fn to_flat(&self) -> Vec<Complex64> {
        let n = self.coeffs.nrows();
        let mut out = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                out.push(self.coeffs[(a, b)]);
            }
        }
        out
    }

    pub fn inner(&self, other: &TwoModeVector) -> Result<Complex64> {
        overlap(self, other)
    }

    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm();
        if norm <= f64::MIN_POSITIVE || !norm.is_finite() {
            return Err(Error::NotNormalized { norm });
        }
        Ok(TwoModeVector {
            coeffs: self.coeffs.unscale(norm),
        })
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        TwoModeVector {
            coeffs: &self.coeffs * factor,
        }
    }

    pub fn add(&self, other: &TwoModeVector) -> Result<Self> {
        if self.coeffs.nrows() != other.coeffs.nrows() {
            return Err(Error::DimensionMismatch {
                left: self.coeffs.nrows(),
                right: other.coeffs.nrows(),
            });
        }
        Ok(TwoModeVector {
            coeffs: &self.coeffs + &other.coeffs,
        })
    }

    /// Applies a single-mode operator to one mode, identity on the other.
    pub fn apply_local(&self, op: &FockOperator, mode: Mode) -> Result<Self> {
        let n = self.coeffs.nrows();
        if op.dim().get() != n {
            return Err(Error::DimensionMismatch {
                left: op.dim().get(),
                right: n,
            });
        }
        let coeffs = match mode {
            Mode::A => linalg::matmul(op.matrix(), &self.coeffs),
            Mode::B => linalg::matmul(&self.coeffs, &op.matrix().transpose()),
        };
        Ok(TwoModeVector { coeffs })
    }

    /// Reduced density matrix of `keep`, computed directly from the amplitudes.
    pub fn reduced_density(&self, keep: Mode) -> DensityMatrix {
        let m = match keep {
            Mode::A => linalg::matmul(&self.coeffs, &self.coeffs.adjoint()),
            Mode::B => linalg::matmul(&self.coeffs.transpose(), &self.coeffs.conjugate()),
        };
        DensityMatrix {
            matrix: m,
            layout: Layout::Single,
        }
    }

    /// Schmidt coefficients in descending order (singular values of the
    /// coefficient matrix).
    pub fn schmidt_coefficients(&self) -> Vec<f64> {
        let svd = self.coeffs.clone().svd(false, false);
        let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        sv
    }

    /// Photon-number-weighted means ⟨n_a⟩, ⟨n_b⟩.
    pub fn mean_photon_numbers(&self) -> (f64, f64) {
        let n = self.coeffs.nrows();
        let mut na = 0.0;
        let mut nb = 0.0;
        for a in 0..n {
            for b in 0..n {
                let p = self.coeffs[(a, b)].norm_sqr();
                na += a as f64 * p;
                nb += b as f64 * p;
            }
        }
        (na, nb)
    }

    /// ⟨(−1)^{n_a + n_b}⟩.
    pub fn joint_parity_expectation(&self) -> f64 {
        let n = self.coeffs.nrows();
        let mut acc = 0.0;
        for a in 0..n {
            for b in 0..n {
                let p = self.coeffs[(a, b)].norm_sqr();
                acc += if (a + b) % 2 == 0 { p } else { -p };
            }
        }
        acc
    }
}

impl PureState for TwoModeVector {
    fn amplitudes_slice(&self) -> &[Complex64] {
        self.coeffs.as_slice()
    }

    fn n_max(&self) -> usize {
        self.coeffs.nrows()
    }

    fn tail_mass(&self) -> f64 {
        let n = self.coeffs.nrows();
        let edge = n.saturating_sub(TAIL_WINDOW);
        let mut acc = 0.0;
        for a in 0..n {
            for b in 0..n {
                if a >= edge || b >= edge {
                    acc += self.coeffs[(a, b)].norm_sqr();
                }
            }
        }
        acc
    }
}

/// Product state |u⟩_a ⊗ |v⟩_b.
pub fn tensor(u: &FockVector, v: &FockVector) -> Result<TwoModeVector> {
    if u.n_max() != v.n_max() {
        return Err(Error::DimensionMismatch {
            left: u.n_max(),
            right: v.n_max(),
        });
    }
    let coeffs = u.amplitudes() * v.amplitudes().transpose();
    Ok(TwoModeVector { coeffs })
}

/// Dense operator on a truncated single-mode space, or on the flattened
/// two-mode space for small truncations.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    matrix: CMatrix,
}

impl FockOperator {
    pub fn from_matrix(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                left: matrix.nrows(),
                right: matrix.ncols(),
            });
        }
        TruncationDim::new(matrix.nrows())?;
        Ok(FockOperator { matrix })
    }

    pub fn identity(dim: TruncationDim) -> Self {
        FockOperator {
            matrix: CMatrix::identity(dim.get(), dim.get()),
        }
    }

    pub fn annihilation(dim: TruncationDim) -> Self {
        let n = dim.get();
        let mut m = CMatrix::zeros(n, n);
        for k in 1..n {
            m[(k - 1, k)] = Complex64::new((k as f64).sqrt(), 0.0);
        }
        FockOperator { matrix: m }
    }

    pub fn creation(dim: TruncationDim) -> Self {
        Self::annihilation(dim).adjoint()
    }

    pub fn number(dim: TruncationDim) -> Self {
        let n = dim.get();
        FockOperator {
            matrix: CMatrix::from_fn(n, n, |i, j| if i == j { Complex64::new(i as f64, 0.0) } else { ZERO }),
        }
    }

    /// diag((−1)^n).
    pub fn parity(dim: TruncationDim) -> Self {
        let n = dim.get();
        FockOperator {
            matrix: CMatrix::from_fn(n, n, |i, j| {
                if i != j {
                    ZERO
                } else if i % 2 == 0 {
                    ONE
                } else {
                    -ONE
                }
            }),
        }
    }

    pub fn dim(&self) -> TruncationDim {
        TruncationDim(self.matrix.nrows())
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn adjoint(&self) -> Self {
        FockOperator {
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        FockOperator {
            matrix: &self.matrix * factor,
        }
    }

    pub fn add(&self, other: &FockOperator) -> Result<Self> {
        self.check_dim(other)?;
        Ok(FockOperator {
            matrix: &self.matrix + &other.matrix,
        })
    }

    pub fn sub(&self, other: &FockOperator) -> Result<Self> {
        self.check_dim(other)?;
        Ok(FockOperator {
            matrix: &self.matrix - &other.matrix,
        })
    }

    /// Operator product `self · other`.
    pub fn compose(&self, other: &FockOperator) -> Result<Self> {
        self.check_dim(other)?;
        Ok(FockOperator {
            matrix: linalg::matmul(&self.matrix, &other.matrix),
        })
    }

    pub fn apply(&self, v: &FockVector) -> Result<FockVector> {
        if v.n_max() != self.matrix.nrows() {
            return Err(Error::DimensionMismatch {
                left: self.matrix.nrows(),
                right: v.n_max(),
            });
        }
        Ok(FockVector::from_dvector(&self.matrix * v.amplitudes()))
    }

    /// `self ⊗ other` with `self` on the outer index.
    pub fn kron(&self, other: &FockOperator) -> FockOperator {
        FockOperator {
            matrix: linalg::kron(&self.matrix, &other.matrix),
        }
    }

    /// Matrix exponential of this operator.
    pub fn exp(&self) -> Result<FockOperator> {
        op_exp(self)
    }

    /// Largest absolute entry of `self − other`.
    pub fn max_abs_diff(&self, other: &FockOperator) -> Result<f64> {
        self.check_dim(other)?;
        Ok(linalg::max_abs(&(&self.matrix - &other.matrix)))
    }

    /// Top-left `dim × dim` block.
    pub fn truncated(&self, dim: TruncationDim) -> Result<FockOperator> {
        let n = dim.get();
        if n > self.matrix.nrows() {
            return Err(Error::DimensionMismatch {
                left: n,
                right: self.matrix.nrows(),
            });
        }
        Ok(FockOperator {
            matrix: self.matrix.view((0, 0), (n, n)).into_owned(),
        })
    }

    fn check_dim(&self, other: &FockOperator) -> Result<()> {
        if self.matrix.nrows() != other.matrix.nrows() {
            return Err(Error::DimensionMismatch {
                left: self.matrix.nrows(),
                right: other.matrix.nrows(),
            });
        }
        Ok(())
    }
}

/// `(a, a†)` on the truncated space.
pub fn ladder_ops(dim: TruncationDim) -> (FockOperator, FockOperator) {
    let a = FockOperator::annihilation(dim);
    let ad = a.adjoint();
    (a, ad)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QuadratureKind {
    X,
    P,
}

/// `X = σ(a + a†)` or `P = (i/2σ)(a† − a)`.
pub fn quadrature_op(kind: QuadratureKind, sigma: f64, dim: TruncationDim) -> Result<FockOperator> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::invalid("sigma", format!("must be positive, got {sigma}")));
    }
    let (a, ad) = ladder_ops(dim);
    let op = match kind {
        QuadratureKind::X => a.add(&ad)?.scale(Complex64::new(sigma, 0.0)),
        QuadratureKind::P => ad.sub(&a)?.scale(Complex64::new(0.0, 0.5 / sigma)),
    };
    Ok(op)
}

/// Matrix exponential (scaling and squaring, Padé 13).
pub fn op_exp(m: &FockOperator) -> Result<FockOperator> {
    Ok(FockOperator {
        matrix: linalg::expm(&m.matrix)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Layout {
    Single,
    TwoMode(usize),
}

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
    layout: Layout,
}

impl DensityMatrix {
    /// Validates Hermiticity (1e-12) and unit trace (1e-10).
    pub fn from_matrix(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                left: matrix.nrows(),
                right: matrix.ncols(),
            });
        }
        let herm = linalg::max_abs(&(&matrix - matrix.adjoint()));
        if herm > 1e-12 {
            return Err(Error::invalid("rho", format!("not Hermitian (deviation {herm:e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(Error::invalid("rho", format!("trace {tr} is not 1")));
        }
        Ok(DensityMatrix {
            matrix,
            layout: Layout::Single,
        })
    }

    /// Declares the matrix as a two-mode operator on `n × n` levels.
    pub fn from_two_mode_matrix(matrix: CMatrix, dim: TruncationDim) -> Result<Self> {
        let n = dim.get();
        if matrix.nrows() != n * n {
            return Err(Error::DimensionMismatch {
                left: matrix.nrows(),
                right: n * n,
            });
        }
        let mut rho = Self::from_matrix(matrix)?;
        rho.layout = Layout::TwoMode(n);
        Ok(rho)
    }

    pub fn from_pure(v: &FockVector) -> Self {
        DensityMatrix {
            matrix: v.amplitudes() * v.amplitudes().adjoint(),
            layout: Layout::Single,
        }
    }

    /// |ψ⟩⟨ψ| on the flattened two-mode space (dimension n_max²).
    pub fn from_two_mode_pure(v: &TwoModeVector) -> Self {
        let flat = DVector::from_vec(v.to_flat());
        DensityMatrix {
            matrix: &flat * flat.adjoint(),
            layout: Layout::TwoMode(v.n_max()),
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Per-mode truncation when the matrix is two-mode.
    pub fn two_mode_dim(&self) -> Option<TruncationDim> {
        match self.layout {
            Layout::TwoMode(n) => Some(TruncationDim(n)),
            Layout::Single => None,
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// Tr(ρ²).
    pub fn purity(&self) -> f64 {
        // Tr(ρ²) = Σ |ρ_ij|² for Hermitian ρ.
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Traces out one mode of a two-mode density matrix.
pub fn partial_trace(rho: &DensityMatrix, keep: Mode) -> Result<DensityMatrix> {
    let n = match rho.layout {
        Layout::TwoMode(n) => n,
        Layout::Single => {
            let total = rho.matrix.nrows();
            let n = (total as f64).sqrt().round() as usize;
            if n * n != total || n < 2 {
                return Err(Error::invalid("rho", format!("dimension {total} is not a two-mode square")));
            }
            n
        }
    };
    let m = &rho.matrix;
    let reduced = match keep {
        Mode::A => CMatrix::from_fn(n, n, |i, j| (0..n).map(|b| m[(i * n + b, j * n + b)]).sum()),
        Mode::B => CMatrix::from_fn(n, n, |i, j| (0..n).map(|a| m[(a * n + i, a * n + j)]).sum()),
    };
    Ok(DensityMatrix {
        matrix: reduced,
        layout: Layout::Single,
    })
}
