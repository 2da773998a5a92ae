//! Dense 3-order tensors with mode-n unfolding, folding, mode-n products,
//! norms, and seeded random low-rank (Tucker) generation.
//!
//! Storage is a flat `Vec<f64>` addressed by `(i, j, k)` with the first index
//! varying fastest: `idx = i + j*M + k*M*N`. A frontal slice `k` is therefore
//! one contiguous chunk of `M*N` values.

use rand::rngs::StdRng;
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Tensor mode selector for unfolding and mode-n products.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    One,
    Two,
    Three,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::One, Mode::Two, Mode::Three];

    /// Zero-based index of the mode (0, 1, or 2).
    pub fn index(self) -> usize {
        match self {
            Mode::One => 0,
            Mode::Two => 1,
            Mode::Three => 2,
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.index() + 1)
    }
}

impl TryFrom<usize> for Mode {
    type Error = Error;

    fn try_from(value: usize) -> Result<Self> {
        match value {
            1 => Ok(Mode::One),
            2 => Ok(Mode::Two),
            3 => Ok(Mode::Three),
            other => Err(Error::DimMismatch {
                context: format!("mode must be 1, 2, or 3, got {other}"),
            }),
        }
    }
}

// ---------------------------------------------------------------------------
// Dense matrix
// ---------------------------------------------------------------------------

/// Dense real matrix in row-major storage. Holds unfoldings and the dense
/// Haar matrices used by the testing path.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dims must be positive");
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dims must be positive");
        assert_eq!(data.len(), rows * cols, "data length must equal rows*cols");
        Self { rows, cols, data }
    }

    /// Build entry-by-entry in row-major order.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.data[r * cols + c] = f(r, c);
            }
        }
        m
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[c * self.rows + r] = self.data[r * self.cols + c];
            }
        }
        out
    }

    /// Dense product `self * other`.
    ///
    /// Deliberately a plain dense loop with no sparsity shortcuts: the
    /// explicit-matrix transform path must cost its full O(rows*cols*inner)
    /// so the fast-path comparison measures what it claims to.
    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(
            self.cols, other.rows,
            "matmul dimension mismatch: {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = Matrix::zeros(self.rows, other.cols);
        let n = other.cols;
        for i in 0..self.rows {
            let out_row = &mut out.data[i * n..(i + 1) * n];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                let rhs_row = &other.data[k * n..(k + 1) * n];
                for (o, r) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * r;
                }
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, &x| m.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

// ---------------------------------------------------------------------------
// Tensor3
// ---------------------------------------------------------------------------

/// Dense 3-order tensor of shape `M x N x S`.
///
/// All operations are pure; values are never mutated behind a shared
/// reference, so `Tensor3` is safe to read from multiple threads.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    m: usize,
    n: usize,
    s: usize,
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(m: usize, n: usize, s: usize) -> Self {
        assert!(m > 0 && n > 0 && s > 0, "tensor dims must be positive");
        Self {
            m,
            n,
            s,
            data: vec![0.0; m * n * s],
        }
    }

    pub fn filled(m: usize, n: usize, s: usize, value: f64) -> Self {
        let mut t = Self::zeros(m, n, s);
        t.data.fill(value);
        t
    }

    /// Wrap a flat buffer in `(k-outer, j, i-inner)` order.
    pub fn from_vec(m: usize, n: usize, s: usize, data: Vec<f64>) -> Self {
        assert!(m > 0 && n > 0 && s > 0, "tensor dims must be positive");
        assert_eq!(data.len(), m * n * s, "data length must equal M*N*S");
        Self { m, n, s, data }
    }

    /// Build entry-by-entry; `f` is called in storage order (k outer, i inner).
    pub fn from_fn(m: usize, n: usize, s: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut t = Self::zeros(m, n, s);
        let mut idx = 0;
        for k in 0..s {
            for j in 0..n {
                for i in 0..m {
                    t.data[idx] = f(i, j, k);
                    idx += 1;
                }
            }
        }
        t
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.m, self.n, self.s)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        false // dims are positive by construction
    }

    #[inline]
    fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        debug_assert!(i < self.m && j < self.n && k < self.s);
        i + j * self.m + k * self.m * self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[self.idx(i, j, k)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: f64) {
        let idx = self.idx(i, j, k);
        self.data[idx] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Contiguous data of frontal slice `k` in `(j-outer, i-inner)` order.
    pub fn slice(&self, k: usize) -> &[f64] {
        let plane = self.m * self.n;
        &self.data[k * plane..(k + 1) * plane]
    }

    pub fn slice_mut(&mut self, k: usize) -> &mut [f64] {
        let plane = self.m * self.n;
        &mut self.data[k * plane..(k + 1) * plane]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Tensor3 {
        Tensor3 {
            m: self.m,
            n: self.n,
            s: self.s,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn map_inplace(&mut self, f: impl Fn(f64) -> f64) {
        for v in &mut self.data {
            *v = f(*v);
        }
    }

    pub fn zip_with(&self, other: &Tensor3, f: impl Fn(f64, f64) -> f64) -> Tensor3 {
        assert_eq!(self.dims(), other.dims(), "tensor dims must match");
        Tensor3 {
            m: self.m,
            n: self.n,
            s: self.s,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn add(&self, other: &Tensor3) -> Tensor3 {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Tensor3) -> Tensor3 {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: f64) -> Tensor3 {
        self.map(|v| v * c)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, &x| m.max(x.abs()))
    }

    /// `(min, max)` over all entries.
    pub fn value_range(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in &self.data {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (lo, hi)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// Mode-n unfolding.
    ///
    /// Row `r` of the result indexes mode `n`; the remaining two indices form
    /// the column with the lower-numbered mode varying fastest:
    ///
    /// * mode 1: `M x (N*S)`, column `j + k*N`
    /// * mode 2: `N x (M*S)`, column `i + k*M`
    /// * mode 3: `S x (M*N)`, column `i + j*M`
    ///
    /// Mode 3 matches the storage layout, so that unfolding is a straight copy.
    pub fn unfold(&self, mode: Mode) -> Matrix {
        let (m, n, s) = self.dims();
        match mode {
            Mode::One => {
                let mut out = Matrix::zeros(m, n * s);
                for k in 0..s {
                    for j in 0..n {
                        let col = j + k * n;
                        for i in 0..m {
                            out.data[i * (n * s) + col] = self.data[self.idx(i, j, k)];
                        }
                    }
                }
                out
            }
            Mode::Two => {
                let mut out = Matrix::zeros(n, m * s);
                for k in 0..s {
                    for j in 0..n {
                        for i in 0..m {
                            out.data[j * (m * s) + (i + k * m)] = self.data[self.idx(i, j, k)];
                        }
                    }
                }
                out
            }
            Mode::Three => Matrix::from_vec(s, m * n, self.data.clone()),
        }
    }

    /// Inverse of [`unfold`](Self::unfold): rebuild a tensor of shape `dims`
    /// from its mode-n unfolding. Exact (a copy, no arithmetic).
    pub fn fold(mat: &Matrix, mode: Mode, dims: (usize, usize, usize)) -> Tensor3 {
        let (m, n, s) = dims;
        let expected = match mode {
            Mode::One => (m, n * s),
            Mode::Two => (n, m * s),
            Mode::Three => (s, m * n),
        };
        assert_eq!(
            mat.shape(),
            expected,
            "fold: matrix shape {:?} does not match mode-{} unfolding of {:?}",
            mat.shape(),
            mode,
            dims
        );
        match mode {
            Mode::One => Tensor3::from_fn(m, n, s, |i, j, k| mat.get(i, j + k * n)),
            Mode::Two => Tensor3::from_fn(m, n, s, |i, j, k| mat.get(j, i + k * m)),
            Mode::Three => Tensor3::from_vec(m, n, s, mat.data.clone()),
        }
    }

    /// Mode-n product `self x_n b`: replaces mode `n` of size `d` by the row
    /// count of `b` (which must have `d` columns).
    pub fn mode_n_product(&self, b: &Matrix, mode: Mode) -> Result<Tensor3> {
        let (m, n, s) = self.dims();
        let mode_dim = [m, n, s][mode.index()];
        if b.cols() != mode_dim {
            return Err(Error::DimMismatch {
                context: format!(
                    "mode-{} product needs {} columns, matrix is {}x{}",
                    mode,
                    mode_dim,
                    b.rows(),
                    b.cols()
                ),
            });
        }
        let product = b.matmul(&self.unfold(mode));
        let new_dims = match mode {
            Mode::One => (b.rows(), n, s),
            Mode::Two => (m, b.rows(), s),
            Mode::Three => (m, n, b.rows()),
        };
        Ok(Tensor3::fold(&product, mode, new_dims))
    }

    /// Number of singular values of the mode-n unfolding strictly greater
    /// than `tol * sigma_max`. The zero tensor has rank 0 in every mode.
    pub fn numerical_n_rank(&self, mode: Mode, tol: f64) -> usize {
        assert!(tol > 0.0, "rank tolerance must be positive");
        let factors = match crate::prox::svd(&self.unfold(mode)) {
            Ok(f) => f,
            Err(_) => return 0,
        };
        let sigma_max = factors.sigma.first().copied().unwrap_or(0.0);
        if sigma_max == 0.0 {
            return 0;
        }
        let cutoff = tol * sigma_max;
        factors.sigma.iter().filter(|&&s| s > cutoff).count()
    }
}

// ---------------------------------------------------------------------------
// Random Tucker generation
// ---------------------------------------------------------------------------

/// Specification of a random Tucker-form tensor: core dimensions and a seed.
/// Factor dimensions are implied by the target tensor dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TuckerSpec {
    pub core_dims: (usize, usize, usize),
    pub seed: u64,
}

impl TuckerSpec {
    pub fn new(core_dims: (usize, usize, usize), seed: u64) -> Self {
        Self { core_dims, seed }
    }

    pub fn validate(&self, dims: (usize, usize, usize)) -> Result<()> {
        let ranks = [self.core_dims.0, self.core_dims.1, self.core_dims.2];
        let sizes = [dims.0, dims.1, dims.2];
        for (&rank, &dim) in ranks.iter().zip(&sizes) {
            if rank < 1 || rank > dim {
                return Err(Error::InvalidTuckerRank { rank, dim });
            }
        }
        Ok(())
    }
}

fn gaussian_tensor(rng: &mut StdRng, m: usize, n: usize, s: usize) -> Tensor3 {
    let normal = StandardNormal;
    Tensor3::from_fn(m, n, s, |_, _, _| normal.sample(rng))
}

fn gaussian_matrix(rng: &mut StdRng, rows: usize, cols: usize) -> Matrix {
    let normal = StandardNormal;
    Matrix::from_fn(rows, cols, |_, _| normal.sample(rng))
}

/// Draw a random tensor `C x_1 U1 x_2 U2 x_3 U3` with standard-Gaussian core
/// and factors, normalized to unit Frobenius norm. Deterministic per seed.
pub fn random_tucker(dims: (usize, usize, usize), spec: &TuckerSpec) -> Result<Tensor3> {
    spec.validate(dims)?;
    let (m, n, s) = dims;
    let (r1, r2, r3) = spec.core_dims;
    let mut rng = StdRng::seed_from_u64(spec.seed);
    let core = gaussian_tensor(&mut rng, r1, r2, r3);
    let u1 = gaussian_matrix(&mut rng, m, r1);
    let u2 = gaussian_matrix(&mut rng, n, r2);
    let u3 = gaussian_matrix(&mut rng, s, r3);
    let x = core
        .mode_n_product(&u1, Mode::One)?
        .mode_n_product(&u2, Mode::Two)?
        .mode_n_product(&u3, Mode::Three)?;
    let norm = x.frobenius_norm();
    if norm > 0.0 {
        Ok(x.scale(1.0 / norm))
    } else {
        Ok(x)
    }
}
