//! 1-D Haar wavelet matrices and the 2-D frontal slice-wise Haar transform.
//!
//! The transform of a tensor `A` (even spatial dims `M x N`) is
//! `A x_1 W_M x_2 W_N`, partitioned into four coefficient tensors
//! `B1..B4` of shape `M/2 x N/2 x S` (approximation, horizontal, vertical,
//! diagonal). Production code uses the per-2x2-patch fast path, which costs
//! O(MNS) instead of the O(MNS(M+N)) explicit matrix products; the dense
//! path is kept for testing and as the defining oracle for the fast path's
//! sign conventions.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::tensor::{Matrix, Mode, Tensor3};

/// The orthogonal Haar matrix `W_N` for even order `N`, stored implicitly.
///
/// The top `N/2` rows average adjacent pairs (entries `sqrt(2)/2`), the
/// bottom `N/2` rows difference them (`sqrt(2)/2, -sqrt(2)/2`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HaarMatrix {
    order: usize,
}

impl HaarMatrix {
    /// `N` must be even and at least 2.
    pub fn new(order: usize) -> Result<Self> {
        if order < 2 || order % 2 != 0 {
            return Err(Error::InvalidHaarOrder(order));
        }
        Ok(Self { order })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Materialize `W_N` as a dense matrix (testing path only).
    pub fn dense(&self) -> Matrix {
        let n = self.order;
        let half = n / 2;
        let mut w = Matrix::zeros(n, n);
        for i in 0..half {
            w.set(i, 2 * i, FRAC_1_SQRT_2);
            w.set(i, 2 * i + 1, FRAC_1_SQRT_2);
            w.set(half + i, 2 * i, FRAC_1_SQRT_2);
            w.set(half + i, 2 * i + 1, -FRAC_1_SQRT_2);
        }
        w
    }

    /// `W_N * a` without materializing the matrix.
    pub fn apply(&self, a: &[f64]) -> Vec<f64> {
        assert_eq!(a.len(), self.order, "vector length must equal order");
        let half = self.order / 2;
        let mut out = vec![0.0; self.order];
        for i in 0..half {
            out[i] = (a[2 * i] + a[2 * i + 1]) * FRAC_1_SQRT_2;
            out[half + i] = (a[2 * i] - a[2 * i + 1]) * FRAC_1_SQRT_2;
        }
        out
    }

    /// `W_N^T * b`, the exact inverse of [`apply`](Self::apply).
    pub fn apply_inverse(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.order, "vector length must equal order");
        let half = self.order / 2;
        let mut out = vec![0.0; self.order];
        for i in 0..half {
            out[2 * i] = (b[i] + b[half + i]) * FRAC_1_SQRT_2;
            out[2 * i + 1] = (b[i] - b[half + i]) * FRAC_1_SQRT_2;
        }
        out
    }
}

/// 1-D Haar transform of an even-length vector.
pub fn hwt1(a: &[f64]) -> Result<Vec<f64>> {
    Ok(HaarMatrix::new(a.len())?.apply(a))
}

/// Inverse 1-D Haar transform.
pub fn ihwt1(b: &[f64]) -> Result<Vec<f64>> {
    Ok(HaarMatrix::new(b.len())?.apply_inverse(b))
}

// ---------------------------------------------------------------------------
// Wavelet coefficient blocks
// ---------------------------------------------------------------------------

/// The four coefficient tensors of a 2-D slice-wise Haar transform, each of
/// shape `M/2 x N/2 x S`. Equal block dimensions are enforced at
/// construction, so inverse transforms cannot see mismatched blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletBlocks {
    blocks: [Tensor3; 4],
    parent_dims: (usize, usize, usize),
}

impl WaveletBlocks {
    /// Wrap four equally-shaped block tensors (order: b1, b2, b3, b4).
    pub fn from_blocks(blocks: [Tensor3; 4]) -> Result<Self> {
        let dims = blocks[0].dims();
        for b in &blocks[1..] {
            if b.dims() != dims {
                return Err(Error::DimMismatch {
                    context: format!(
                        "wavelet blocks must share dims, got {:?} and {:?}",
                        dims,
                        b.dims()
                    ),
                });
            }
        }
        let parent_dims = (2 * dims.0, 2 * dims.1, dims.2);
        Ok(Self { blocks, parent_dims })
    }

    pub fn zeros(parent_dims: (usize, usize, usize)) -> Result<Self> {
        let (m, n, s) = parent_dims;
        if m % 2 != 0 || n % 2 != 0 || m == 0 || n == 0 {
            return Err(Error::OddSpatialDims { m, n });
        }
        let z = Tensor3::zeros(m / 2, n / 2, s);
        Self::from_blocks([z.clone(), z.clone(), z.clone(), z])
    }

    /// Block `i` for `i` in `0..4` (b1 is index 0).
    pub fn block(&self, i: usize) -> &Tensor3 {
        &self.blocks[i]
    }

    pub fn blocks(&self) -> &[Tensor3; 4] {
        &self.blocks
    }

    pub fn block_dims(&self) -> (usize, usize, usize) {
        self.blocks[0].dims()
    }

    pub fn parent_dims(&self) -> (usize, usize, usize) {
        self.parent_dims
    }

    /// Joint Frobenius norm over all four blocks.
    pub fn frobenius_norm(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| {
                let n = b.frobenius_norm();
                n * n
            })
            .sum::<f64>()
            .sqrt()
    }

    pub fn map_blocks(&self, f: impl Fn(&Tensor3) -> Tensor3) -> WaveletBlocks {
        let blocks = [
            f(&self.blocks[0]),
            f(&self.blocks[1]),
            f(&self.blocks[2]),
            f(&self.blocks[3]),
        ];
        WaveletBlocks {
            blocks,
            parent_dims: self.parent_dims,
        }
    }

    pub fn zip_blocks(
        &self,
        other: &WaveletBlocks,
        f: impl Fn(&Tensor3, &Tensor3) -> Tensor3,
    ) -> WaveletBlocks {
        assert_eq!(self.parent_dims, other.parent_dims, "block dims must match");
        let blocks = [
            f(&self.blocks[0], &other.blocks[0]),
            f(&self.blocks[1], &other.blocks[1]),
            f(&self.blocks[2], &other.blocks[2]),
            f(&self.blocks[3], &other.blocks[3]),
        ];
        WaveletBlocks {
            blocks,
            parent_dims: self.parent_dims,
        }
    }

    /// Lay the blocks out as the full `M x N x S` coefficient tensor
    /// `[b1 b2; b3 b4]` per frontal slice.
    pub fn assemble(&self) -> Tensor3 {
        let (m, n, s) = self.parent_dims;
        let (hm, hn, _) = self.block_dims();
        let mut out = Tensor3::zeros(m, n, s);
        for k in 0..s {
            for j in 0..hn {
                for i in 0..hm {
                    out.set(i, j, k, self.blocks[0].get(i, j, k));
                    out.set(i, j + hn, k, self.blocks[1].get(i, j, k));
                    out.set(i + hm, j, k, self.blocks[2].get(i, j, k));
                    out.set(i + hm, j + hn, k, self.blocks[3].get(i, j, k));
                }
            }
        }
        out
    }

    /// Partition an assembled `M x N x S` coefficient tensor back into blocks.
    pub fn from_assembled(t: &Tensor3) -> Result<Self> {
        let (m, n, s) = t.dims();
        if m % 2 != 0 || n % 2 != 0 {
            return Err(Error::OddSpatialDims { m, n });
        }
        let (hm, hn) = (m / 2, n / 2);
        let mut blocks = [
            Tensor3::zeros(hm, hn, s),
            Tensor3::zeros(hm, hn, s),
            Tensor3::zeros(hm, hn, s),
            Tensor3::zeros(hm, hn, s),
        ];
        for k in 0..s {
            for j in 0..hn {
                for i in 0..hm {
                    blocks[0].set(i, j, k, t.get(i, j, k));
                    blocks[1].set(i, j, k, t.get(i, j + hn, k));
                    blocks[2].set(i, j, k, t.get(i + hm, j, k));
                    blocks[3].set(i, j, k, t.get(i + hm, j + hn, k));
                }
            }
        }
        Self::from_blocks(blocks)
    }
}

// ---------------------------------------------------------------------------
// 2-D frontal slice-wise transform
// ---------------------------------------------------------------------------

fn require_even(m: usize, n: usize) -> Result<()> {
    if m == 0 || n == 0 || m % 2 != 0 || n % 2 != 0 {
        return Err(Error::OddSpatialDims { m, n });
    }
    Ok(())
}

/// 2-D slice-wise Haar transform, fast per-patch path.
///
/// For each 2x2 patch `[a00 a01; a10 a11]` of every frontal slice:
///
/// ```text
/// b1 = (a00 + a10 + a01 + a11) / 2
/// b2 = (a00 + a10 - a01 - a11) / 2
/// b3 = (a00 - a10 + a01 - a11) / 2
/// b4 = (a00 - a10 - a01 + a11) / 2
/// ```
///
/// These are exactly the entries of `W_M * A * W_N^T`; the dense product is
/// the defining convention and [`fhwt2_via_matrices`] the oracle.
pub fn fhwt2(t: &Tensor3) -> Result<WaveletBlocks> {
    let (m, n, s) = t.dims();
    require_even(m, n)?;
    let (hm, hn) = (m / 2, n / 2);
    let mut b1 = Tensor3::zeros(hm, hn, s);
    let mut b2 = Tensor3::zeros(hm, hn, s);
    let mut b3 = Tensor3::zeros(hm, hn, s);
    let mut b4 = Tensor3::zeros(hm, hn, s);
    let half_plane = hm * hn;
    for k in 0..s {
        let slice = t.slice(k);
        let o1 = &mut b1.as_mut_slice()[k * half_plane..(k + 1) * half_plane];
        let o2 = &mut b2.as_mut_slice()[k * half_plane..(k + 1) * half_plane];
        let o3 = &mut b3.as_mut_slice()[k * half_plane..(k + 1) * half_plane];
        let o4 = &mut b4.as_mut_slice()[k * half_plane..(k + 1) * half_plane];
        for j in 0..hn {
            let col0 = &slice[(2 * j) * m..(2 * j) * m + m];
            let col1 = &slice[(2 * j + 1) * m..(2 * j + 1) * m + m];
            let base = j * hm;
            for i in 0..hm {
                let a00 = col0[2 * i];
                let a10 = col0[2 * i + 1];
                let a01 = col1[2 * i];
                let a11 = col1[2 * i + 1];
                o1[base + i] = (a00 + a10 + a01 + a11) * 0.5;
                o2[base + i] = (a00 + a10 - a01 - a11) * 0.5;
                o3[base + i] = (a00 - a10 + a01 - a11) * 0.5;
                o4[base + i] = (a00 - a10 - a01 + a11) * 0.5;
            }
        }
    }
    WaveletBlocks::from_blocks([b1, b2, b3, b4])
}

/// Inverse 2-D slice-wise Haar transform, fast per-patch path. Exact inverse
/// of [`fhwt2`].
pub fn ifhwt2(b: &WaveletBlocks) -> Tensor3 {
    let (m, n, s) = b.parent_dims();
    let (hm, hn) = (m / 2, n / 2);
    let mut out = Tensor3::zeros(m, n, s);
    let half_plane = hm * hn;
    for k in 0..s {
        let i1 = &b.block(0).as_slice()[k * half_plane..(k + 1) * half_plane];
        let i2 = &b.block(1).as_slice()[k * half_plane..(k + 1) * half_plane];
        let i3 = &b.block(2).as_slice()[k * half_plane..(k + 1) * half_plane];
        let i4 = &b.block(3).as_slice()[k * half_plane..(k + 1) * half_plane];
        let slice = out.slice_mut(k);
        for j in 0..hn {
            let base = j * hm;
            let (left, right) = slice[(2 * j) * m..(2 * j + 2) * m].split_at_mut(m);
            for i in 0..hm {
                let c1 = i1[base + i];
                let c2 = i2[base + i];
                let c3 = i3[base + i];
                let c4 = i4[base + i];
                left[2 * i] = (c1 + c2 + c3 + c4) * 0.5;
                left[2 * i + 1] = (c1 + c2 - c3 - c4) * 0.5;
                right[2 * i] = (c1 - c2 + c3 - c4) * 0.5;
                right[2 * i + 1] = (c1 - c2 - c3 + c4) * 0.5;
            }
        }
    }
    out
}

/// Transform via explicit mode-n products with dense `W_M`, `W_N`.
/// O(MNS(M+N)); testing/benchmark path and sign-convention oracle.
pub fn fhwt2_via_matrices(t: &Tensor3) -> Result<WaveletBlocks> {
    let (m, n, _) = t.dims();
    require_even(m, n)?;
    let wm = HaarMatrix::new(m)?.dense();
    let wn = HaarMatrix::new(n)?.dense();
    let assembled = t
        .mode_n_product(&wm, Mode::One)?
        .mode_n_product(&wn, Mode::Two)?;
    WaveletBlocks::from_assembled(&assembled)
}

/// Inverse transform via explicit mode-n products with `W^T`.
pub fn ifhwt2_via_matrices(b: &WaveletBlocks) -> Tensor3 {
    let (m, n, _) = b.parent_dims();
    let wm_t = HaarMatrix::new(m).expect("parent dims are even").dense().transpose();
    let wn_t = HaarMatrix::new(n).expect("parent dims are even").dense().transpose();
    b.assemble()
        .mode_n_product(&wm_t, Mode::One)
        .expect("shapes agree by construction")
        .mode_n_product(&wn_t, Mode::Two)
        .expect("shapes agree by construction")
}

/// Cumulative energy of a nonincreasing, nonnegative singular value sequence:
/// `CE_k = sum_{i<=k} s_i / sum_i s_i`.
pub fn cumulative_energy(singular_values: &[f64]) -> Result<Vec<f64>> {
    let total: f64 = singular_values.iter().sum();
    if total <= 0.0 {
        return Err(Error::AllZeroSingularValues);
    }
    debug_assert!(
        singular_values.windows(2).all(|w| w[0] >= w[1]) && singular_values.iter().all(|&v| v >= 0.0),
        "singular values must be nonnegative and nonincreasing"
    );
    let mut acc = 0.0;
    Ok(singular_values
        .iter()
        .map(|&v| {
            acc += v;
            acc / total
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::TuckerSpec;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_tensor(seed: u64, m: usize, n: usize, s: usize) -> Tensor3 {
        let mut rng = StdRng::seed_from_u64(seed);
        Tensor3::from_fn(m, n, s, |_, _, _| rng.random::<f64>() * 2.0 - 1.0)
    }

    #[test]
    fn haar_matrix_order_two() {
        let w = HaarMatrix::new(2).unwrap().dense();
        let c = FRAC_1_SQRT_2;
        assert_eq!(w.row(0), &[c, c]);
        assert_eq!(w.row(1), &[c, -c]);
    }

    #[test]
    fn haar_matrix_rejects_odd_and_zero() {
        assert!(matches!(HaarMatrix::new(3), Err(Error::InvalidHaarOrder(3))));
        assert!(HaarMatrix::new(0).is_err());
        assert!(HaarMatrix::new(1).is_err());
    }

    #[test]
    fn haar_matrix_is_orthogonal() {
        for n in [2usize, 4, 8, 256] {
            let w = HaarMatrix::new(n).unwrap().dense();
            let gram = w.matmul(&w.transpose());
            let mut max_dev = 0.0f64;
            for r in 0..n {
                for c in 0..n {
                    let expect = if r == c { 1.0 } else { 0.0 };
                    max_dev = max_dev.max((gram.get(r, c) - expect).abs());
                }
            }
            assert!(max_dev <= 1e-12, "N={n}: max deviation {max_dev}");
        }
    }

    #[test]
    fn haar_matrix_row_sums() {
        let w = HaarMatrix::new(8).unwrap().dense();
        for r in 0..4 {
            let sum: f64 = w.row(r).iter().sum();
            assert!((sum - 2f64.sqrt()).abs() < 1e-14, "average row {r}");
        }
        for r in 4..8 {
            let sum: f64 = w.row(r).iter().sum();
            assert!(sum.abs() < 1e-14, "difference row {r}");
        }
    }

    #[test]
    fn hwt1_known_values() {
        let b = hwt1(&[1.0, 1.0]).unwrap();
        assert!((b[0] - 2f64.sqrt()).abs() < 1e-14);
        assert!(b[1].abs() < 1e-14);
        let b = hwt1(&[1.0, -1.0]).unwrap();
        assert!(b[0].abs() < 1e-14);
        assert!((b[1] - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn hwt1_matches_dense_matrix_and_inverts() {
        let mut rng = StdRng::seed_from_u64(5);
        let a: Vec<f64> = (0..16).map(|_| rng.random::<f64>() * 4.0 - 2.0).collect();
        let fast = hwt1(&a).unwrap();
        let w = HaarMatrix::new(16).unwrap().dense();
        for i in 0..16 {
            let dot: f64 = w.row(i).iter().zip(&a).map(|(x, y)| x * y).sum();
            assert!((fast[i] - dot).abs() < 1e-13);
        }
        let back = ihwt1(&fast).unwrap();
        for (orig, rec) in a.iter().zip(&back) {
            assert!((orig - rec).abs() < 1e-12);
        }
    }

    #[test]
    fn hwt1_rejects_odd_length() {
        assert!(hwt1(&[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn fhwt2_constant_tensor() {
        let c = 1.7;
        let t = Tensor3::filled(2, 2, 3, c);
        let b = fhwt2(&t).unwrap();
        for k in 0..3 {
            assert!((b.block(0).get(0, 0, k) - 2.0 * c).abs() < 1e-14);
            for i in 1..4 {
                assert!(b.block(i).get(0, 0, k).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn ifhwt2_of_constant_approximation() {
        // b1 = 2, rest zero, 1x1x1 blocks -> constant ones 2x2x1
        let two = Tensor3::filled(1, 1, 1, 2.0);
        let zero = Tensor3::zeros(1, 1, 1);
        let b = WaveletBlocks::from_blocks([two, zero.clone(), zero.clone(), zero]).unwrap();
        let t = ifhwt2(&b);
        assert_eq!(t.dims(), (2, 2, 1));
        for v in t.as_slice() {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn fhwt2_preserves_frobenius_norm() {
        let t = random_tensor(21, 16, 12, 5);
        let b = fhwt2(&t).unwrap();
        assert!((b.frobenius_norm() - t.frobenius_norm()).abs() < 1e-10);
        let assembled = b.assemble();
        assert!((assembled.frobenius_norm() - t.frobenius_norm()).abs() < 1e-10);
    }

    #[test]
    fn fast_path_matches_matrix_path() {
        for trial in 0..10 {
            let t = random_tensor(100 + trial, 8, 8, 3);
            let fast = fhwt2(&t).unwrap();
            let dense = fhwt2_via_matrices(&t).unwrap();
            for i in 0..4 {
                let diff = fast.block(i).sub(dense.block(i)).max_abs();
                assert!(diff <= 1e-12, "block {i} trial {trial}: {diff}");
            }
        }
    }

    #[test]
    fn inverse_fast_path_matches_matrix_path() {
        let t = random_tensor(55, 10, 6, 4);
        let b = fhwt2(&t).unwrap();
        let fast = ifhwt2(&b);
        let dense = ifhwt2_via_matrices(&b);
        assert!(fast.sub(&dense).max_abs() <= 1e-12);
    }

    #[test]
    fn roundtrips_both_directions() {
        for trial in 0..20 {
            let m = 2 * (1 + (trial as usize % 8));
            let n = 2 * (1 + ((trial as usize * 3) % 8));
            let t = random_tensor(200 + trial, m, n, 1 + (trial as usize % 4));
            let rec = ifhwt2(&fhwt2(&t).unwrap());
            let rel = rec.sub(&t).frobenius_norm() / t.frobenius_norm();
            assert!(rel <= 1e-10, "forward roundtrip trial {trial}: {rel}");

            let b = fhwt2(&t).unwrap();
            let b2 = fhwt2(&ifhwt2(&b)).unwrap();
            for i in 0..4 {
                let rel = b2.block(i).sub(b.block(i)).frobenius_norm()
                    / b.block(i).frobenius_norm().max(1e-300);
                assert!(rel <= 1e-10, "inverse roundtrip block {i}: {rel}");
            }
        }
    }

    #[test]
    fn all_zero_blocks_invert_to_zero_tensor() {
        let b = WaveletBlocks::zeros((6, 4, 2)).unwrap();
        let t = ifhwt2(&b);
        assert_eq!(t.dims(), (6, 4, 2));
        assert_eq!(t.frobenius_norm(), 0.0);
    }

    #[test]
    fn fhwt2_rejects_odd_dims() {
        assert!(matches!(
            fhwt2(&Tensor3::zeros(3, 4, 2)),
            Err(Error::OddSpatialDims { m: 3, n: 4 })
        ));
        assert!(fhwt2(&Tensor3::zeros(4, 5, 2)).is_err());
    }

    #[test]
    fn fhwt2_is_linear() {
        let t = random_tensor(31, 8, 6, 3);
        let u = random_tensor(32, 8, 6, 3);
        let (alpha, beta) = (0.7, -1.3);
        let lhs = fhwt2(&t.scale(alpha).add(&u.scale(beta))).unwrap();
        let bt = fhwt2(&t).unwrap();
        let bu = fhwt2(&u).unwrap();
        for i in 0..4 {
            let rhs = bt.block(i).scale(alpha).add(&bu.block(i).scale(beta));
            let rel = lhs.block(i).sub(&rhs).frobenius_norm() / rhs.frobenius_norm();
            assert!(rel < 1e-10);
        }
    }

    #[test]
    fn wavelet_blocks_reject_mismatched_dims() {
        let a = Tensor3::zeros(2, 2, 2);
        let b = Tensor3::zeros(2, 3, 2);
        assert!(WaveletBlocks::from_blocks([a.clone(), a.clone(), a, b]).is_err());
    }

    #[test]
    fn block_ranks_do_not_exceed_parent_ranks() {
        // low-rank property of the coefficients, spot-checked here; the
        // acceptance suite sweeps 100 instances
        for trial in 0..10 {
            let dims = (16, 20, 9);
            let r = 1 + (trial as usize % 5);
            let t = crate::tensor::random_tucker(dims, &TuckerSpec::new((r, r, r), 400 + trial)).unwrap();
            let blocks = fhwt2(&t).unwrap();
            for mode in Mode::ALL {
                let parent_rank = t.numerical_n_rank(mode, 1e-8);
                for i in 0..4 {
                    let block_rank = blocks.block(i).numerical_n_rank(mode, 1e-8);
                    assert!(
                        block_rank <= parent_rank,
                        "trial {trial} block {i} mode {mode}: {block_rank} > {parent_rank}"
                    );
                }
            }
        }
    }

    #[test]
    fn cumulative_energy_known_values() {
        assert_eq!(cumulative_energy(&[1.0, 0.0, 0.0]).unwrap(), vec![1.0, 1.0, 1.0]);
        let ce = cumulative_energy(&[2.0, 1.0, 1.0]).unwrap();
        assert_eq!(ce, vec![0.5, 0.75, 1.0]);
        assert!(cumulative_energy(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn cumulative_energy_is_nondecreasing_and_ends_at_one() {
        let sv = [5.0, 3.0, 2.5, 0.5, 0.1, 0.0];
        let ce = cumulative_energy(&sv).unwrap();
        for w in ce.windows(2) {
            assert!(w[1] >= w[0]);
        }
        assert!((ce.last().unwrap() - 1.0).abs() < 1e-12);
    }

    /// Piecewise-smooth multiband image: a large smooth background shared
    /// across bands plus faint band-varying texture. The approximation
    /// coefficients concentrate energy in few components, the diagonal
    /// details spread it out, so the CE curve of b1 dominates that of b4.
    #[test]
    fn approximation_ce_curve_dominates_diagonal() {
        let (m, n, s) = (32, 32, 8);
        let mut rng = StdRng::seed_from_u64(61);
        let texture: Vec<f64> = (0..m * n * s).map(|_| rng.random::<f64>() - 0.5).collect();
        let t = Tensor3::from_fn(m, n, s, |i, j, k| {
            let x = i as f64 / m as f64;
            let y = j as f64 / n as f64;
            let smooth = 0.6 + 0.3 * (2.0 * std::f64::consts::PI * x).sin() * (1.0 + 0.1 * k as f64)
                + 0.2 * y;
            let step = if (i / 8 + j / 8) % 2 == 0 { 0.15 } else { 0.0 };
            smooth + step + 0.02 * texture[i + j * m + k * m * n]
        });
        let blocks = fhwt2(&t).unwrap();
        let sv1 = crate::prox::svd(&blocks.block(0).unfold(Mode::Three)).unwrap().sigma;
        let sv4 = crate::prox::svd(&blocks.block(3).unfold(Mode::Three)).unwrap().sigma;
        let ce1 = cumulative_energy(&sv1).unwrap();
        let ce4 = cumulative_energy(&sv4).unwrap();
        for (k, (a, d)) in ce1.iter().zip(&ce4).enumerate() {
            assert!(a + 1e-12 >= *d, "CE ordering violated at k={k}: {a} < {d}");
        }
    }
}
