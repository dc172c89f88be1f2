//! Dense and sparse complex kernels shared by the operator modules.
//!
//! Complex products above a small size are split into real and imaginary
//! parts so that the `f64` GEMM path of nalgebra (which is considerably
//! faster than its generic complex loop) does the work.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

const SPLIT_THRESHOLD: usize = 24;

/// Complex matrix product `a * b`.
pub fn matmul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    assert_eq!(a.ncols(), b.nrows(), "matmul shape mismatch");
    if a.nrows().min(a.ncols()).min(b.ncols()) < SPLIT_THRESHOLD {
        return a * b;
    }
    let (ar, ai) = split(a);
    let (br, bi) = split(b);
    let rr = &ar * &br;
    let ii = &ai * &bi;
    let ri = &ar * &bi;
    let ir = &ai * &br;
    DMatrix::from_fn(a.nrows(), b.ncols(), |i, j| {
        Complex64::new(rr[(i, j)] - ii[(i, j)], ri[(i, j)] + ir[(i, j)])
    })
}

fn split(m: &CMatrix) -> (DMatrix<f64>, DMatrix<f64>) {
    (m.map(|z| z.re), m.map(|z| z.im))
}

/// Largest absolute entry.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Induced 1-norm (maximum absolute column sum).
pub fn norm_1(m: &CMatrix) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Kronecker product with the left factor as the outer index.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    DMatrix::from_fn(ra * rb, ca * cb, |i, j| {
        a[(i / rb, j / cb)] * b[(i % rb, j % cb)]
    })
}

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

/// Matrix exponential by scaling and squaring with a degree-13 Padé
/// approximant.
pub fn expm(m: &CMatrix) -> Result<CMatrix> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::DimensionMismatch {
            left: n,
            right: m.ncols(),
        });
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    if n == 0 {
        return Ok(m.clone());
    }

    let norm = norm_1(m);
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil().max(0.0) as u32
    } else {
        0
    };
    let scaled = m.scale(0.5f64.powi(squarings as i32));

    let ident = CMatrix::identity(n, n);
    let a2 = matmul(&scaled, &scaled);
    let a4 = matmul(&a2, &a2);
    let a6 = matmul(&a4, &a2);
    let b = &PADE13;

    let inner_u = a6.scale(b[13]) + a4.scale(b[11]) + a2.scale(b[9]);
    let u_poly = matmul(&a6, &inner_u)
        + a6.scale(b[7])
        + a4.scale(b[5])
        + a2.scale(b[3])
        + ident.scale(b[1]);
    let u = matmul(&scaled, &u_poly);

    let inner_v = a6.scale(b[12]) + a4.scale(b[10]) + a2.scale(b[8]);
    let v = matmul(&a6, &inner_v)
        + a6.scale(b[6])
        + a4.scale(b[4])
        + a2.scale(b[2])
        + ident.scale(b[0]);

    let lu = (&v - &u).lu();
    let mut result = lu.solve(&(&v + &u)).ok_or(Error::NonFinite)?;
    for _ in 0..squarings {
        result = matmul(&result, &result);
    }
    Ok(result)
}

/// Sparse square matrix in row-compressed form.
#[derive(Debug, Clone)]
pub struct SparseMatrix {
    dim: usize,
    row_start: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

impl SparseMatrix {
    /// Assembles from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, Complex64)>) -> Self {
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_start = vec![0usize; dim + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<Complex64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            assert!(r < dim && c < dim, "triplet out of range");
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
                continue;
            }
            cols.push(c);
            vals.push(v);
            row_start[r + 1] += 1;
            last = Some((r, c));
        }
        for r in 0..dim {
            row_start[r + 1] += row_start[r];
        }
        SparseMatrix {
            dim,
            row_start,
            cols,
            vals,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        SparseMatrix {
            vals: self.vals.iter().map(|v| v * factor).collect(),
            ..self.clone()
        }
    }

    pub fn apply(&self, x: &[Complex64], out: &mut [Complex64]) {
        for (r, slot) in out.iter_mut().enumerate().take(self.dim) {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.row_start[r]..self.row_start[r + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *slot = acc;
        }
    }

    /// Induced 1-norm.
    pub fn norm_1(&self) -> f64 {
        let mut col_sums = vec![0.0; self.dim];
        for (c, v) in self.cols.iter().zip(&self.vals) {
            col_sums[*c] += v.norm();
        }
        col_sums.into_iter().fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for k in self.row_start[r]..self.row_start[r + 1] {
                m[(r, self.cols[k])] += self.vals[k];
            }
        }
        m
    }

    /// `exp(self) x` by a Taylor series over `ceil(‖self‖₁)` substeps.
    pub fn exp_apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.dim);
        let steps = self.norm_1().ceil().max(1.0) as usize;
        let h = 1.0 / steps as f64;
        let mut v = x.to_vec();
        let mut term = vec![Complex64::new(0.0, 0.0); self.dim];
        let mut next = vec![Complex64::new(0.0, 0.0); self.dim];
        for _ in 0..steps {
            term.copy_from_slice(&v);
            let scale = sup_norm(&v).max(f64::MIN_POSITIVE);
            for k in 1..=64 {
                self.apply(&term, &mut next);
                let f = h / k as f64;
                for (t, n) in term.iter_mut().zip(&next) {
                    *t = n * f;
                }
                for (acc, t) in v.iter_mut().zip(&term) {
                    *acc += t;
                }
                if sup_norm(&term) <= 1e-18 * scale {
                    break;
                }
            }
        }
        v
    }
}

fn sup_norm(v: &[Complex64]) -> f64 {
    v.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}
