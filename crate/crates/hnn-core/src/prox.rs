//! Singular value machinery: thin SVD, nuclear norm, singular value
//! thresholding, elementwise soft-thresholding, and the Haar-domain nuclear
//! norm functional.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::haar::fhwt2;
use crate::tensor::{Matrix, Mode, Tensor3};

/// Thin SVD factors `U * diag(sigma) * Vt` with `sigma` nonincreasing and
/// `U`, `V` having orthonormal columns.
#[derive(Debug, Clone)]
pub struct SvdFactors {
    pub u: Matrix,
    pub sigma: Vec<f64>,
    pub vt: Matrix,
}

impl SvdFactors {
    pub fn reconstruct(&self) -> Matrix {
        let (rows, r) = self.u.shape();
        let cols = self.vt.cols();
        let mut scaled = Matrix::zeros(rows, r);
        for i in 0..rows {
            for j in 0..r {
                scaled.set(i, j, self.u.get(i, j) * self.sigma[j]);
            }
        }
        assert_eq!(scaled.cols(), self.vt.rows());
        let mut out = Matrix::zeros(rows, cols);
        for i in 0..rows {
            for k in 0..r {
                let a = scaled.get(i, k);
                for j in 0..cols {
                    out.set(i, j, out.get(i, j) + a * self.vt.get(k, j));
                }
            }
        }
        out
    }
}

fn to_nalgebra(a: &Matrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(a.rows(), a.cols(), a.as_slice())
}

fn from_nalgebra(a: &DMatrix<f64>) -> Matrix {
    Matrix::from_fn(a.nrows(), a.ncols(), |r, c| a[(r, c)])
}

/// Thin/economy SVD. The backend is a contract, not a prescription: any
/// factorization with orthonormal columns, nonincreasing singular values,
/// and faithful reconstruction is acceptable.
pub fn svd(a: &Matrix) -> Result<SvdFactors> {
    if !a.is_finite() {
        return Err(Error::NonFinite {
            context: format!("svd of a {}x{} matrix", a.rows(), a.cols()),
        });
    }
    let decomp = to_nalgebra(a).svd(true, true);
    let u = decomp.u.expect("u requested");
    let vt = decomp.v_t.expect("v_t requested");
    Ok(SvdFactors {
        u: from_nalgebra(&u),
        sigma: decomp.singular_values.as_slice().to_vec(),
        vt: from_nalgebra(&vt),
    })
}

/// `sign(x) * max(|x| - gamma, 0)`.
#[inline]
pub fn soft_threshold(x: f64, gamma: f64) -> f64 {
    debug_assert!(gamma >= 0.0, "soft threshold requires gamma >= 0");
    let mag = x.abs() - gamma;
    if mag > 0.0 {
        mag.copysign(x)
    } else {
        0.0
    }
}

/// Singular value thresholding `U * soft(sigma, tau) * Vt`, the proximal
/// operator of `tau * ||.||_*`.
pub fn svt(a: &Matrix, tau: f64) -> Result<Matrix> {
    assert!(tau >= 0.0, "svt threshold must be nonnegative");
    let mut factors = svd(a)?;
    for s in &mut factors.sigma {
        *s = soft_threshold(*s, tau);
    }
    Ok(factors.reconstruct())
}

/// Sum of singular values. Requires finite entries.
pub fn nuclear_norm(a: &Matrix) -> f64 {
    svd(a)
        .expect("nuclear norm requires finite entries")
        .sigma
        .iter()
        .sum()
}

/// Haar-domain nuclear norm: the sum of nuclear norms of the mode-3
/// unfoldings of the four wavelet coefficient tensors.
pub fn hnn(t: &Tensor3) -> Result<f64> {
    let blocks = fhwt2(t)?;
    Ok(blocks
        .blocks()
        .iter()
        .map(|b| nuclear_norm(&b.unfold(Mode::Three)))
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_matrix(seed: u64, rows: usize, cols: usize) -> Matrix {
        let mut rng = StdRng::seed_from_u64(seed);
        Matrix::from_fn(rows, cols, |_, _| rng.random::<f64>() * 2.0 - 1.0)
    }

    fn random_tensor(seed: u64, m: usize, n: usize, s: usize) -> Tensor3 {
        let mut rng = StdRng::seed_from_u64(seed);
        Tensor3::from_fn(m, n, s, |_, _, _| rng.random::<f64>() * 2.0 - 1.0)
    }

    #[test]
    fn svd_of_diagonal() {
        let mut a = Matrix::zeros(2, 2);
        a.set(0, 0, 3.0);
        a.set(1, 1, 1.0);
        let f = svd(&a).unwrap();
        assert!((f.sigma[0] - 3.0).abs() < 1e-12);
        assert!((f.sigma[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn svd_of_zero_matrix() {
        let f = svd(&Matrix::zeros(4, 3)).unwrap();
        assert!(f.sigma.iter().all(|&s| s == 0.0));
        assert_eq!(f.sigma.len(), 3);
    }

    #[test]
    fn svd_reconstructs_and_is_orthonormal() {
        let a = random_matrix(1, 20, 8);
        let f = svd(&a).unwrap();
        let rel = {
            let rec = f.reconstruct();
            let mut diff = 0.0f64;
            for r in 0..20 {
                for c in 0..8 {
                    diff += (rec.get(r, c) - a.get(r, c)).powi(2);
                }
            }
            diff.sqrt() / a.frobenius_norm()
        };
        assert!(rel <= 1e-10, "reconstruction error {rel}");
        // sigma nonincreasing
        for w in f.sigma.windows(2) {
            assert!(w[0] >= w[1]);
        }
        // U^T U = I, V V^T = ... checked via vt * vt^T
        let utu = f.u.transpose().matmul(&f.u);
        let vvt = f.vt.matmul(&f.vt.transpose());
        for gram in [utu, vvt] {
            let n = gram.rows();
            for r in 0..n {
                for c in 0..n {
                    let expect = if r == c { 1.0 } else { 0.0 };
                    assert!((gram.get(r, c) - expect).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn svd_rejects_non_finite() {
        let mut a = Matrix::zeros(2, 2);
        a.set(0, 1, f64::NAN);
        assert!(matches!(svd(&a), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn soft_threshold_known_values() {
        assert!((soft_threshold(2.0, 0.5) - 1.5).abs() < 1e-15);
        assert_eq!(soft_threshold(-0.3, 1.0), 0.0);
        assert!((soft_threshold(-2.0, 0.5) + 1.5).abs() < 1e-15);
        assert_eq!(soft_threshold(0.0, 0.0), 0.0);
    }

    #[test]
    fn soft_threshold_minimizes_scalar_prox_objective() {
        // g(z) = gamma|z| + (z - x)^2 / 2, checked against a fine grid
        let mut rng = StdRng::seed_from_u64(9);
        for _ in 0..100 {
            let x = rng.random::<f64>() * 6.0 - 3.0;
            let gamma = rng.random::<f64>() * 2.0;
            let z_star = soft_threshold(x, gamma);
            let obj = |z: f64| gamma * z.abs() + 0.5 * (z - x).powi(2);
            let best = obj(z_star);
            let span = x.abs() + gamma + 1.0;
            for step in 0..=2000 {
                let z = -span + 2.0 * span * (step as f64) / 2000.0;
                assert!(best <= obj(z) + 1e-9, "x={x} gamma={gamma} z={z}");
            }
        }
    }

    #[test]
    fn svt_with_zero_threshold_is_identity() {
        let a = random_matrix(2, 6, 9);
        let out = svt(&a, 0.0).unwrap();
        let mut max_dev = 0.0f64;
        for r in 0..6 {
            for c in 0..9 {
                max_dev = max_dev.max((out.get(r, c) - a.get(r, c)).abs());
            }
        }
        assert!(max_dev < 1e-10);
    }

    #[test]
    fn svt_of_diagonal() {
        let mut a = Matrix::zeros(2, 2);
        a.set(0, 0, 3.0);
        a.set(1, 1, 1.0);
        let out = svt(&a, 2.0).unwrap();
        assert!((out.get(0, 0) - 1.0).abs() < 1e-12);
        assert!(out.get(1, 1).abs() < 1e-12);
        assert!(out.get(0, 1).abs() < 1e-12);
    }

    #[test]
    fn svt_threshold_shows_in_nuclear_norm() {
        let a = random_matrix(3, 8, 5);
        let tau = 0.4;
        let sigma = svd(&a).unwrap().sigma;
        let expected: f64 = sigma.iter().map(|&s| (s - tau).max(0.0)).sum();
        let got = nuclear_norm(&svt(&a, tau).unwrap());
        assert!((got - expected).abs() < 1e-10);
    }

    #[test]
    fn svt_minimizes_prox_objective_against_perturbations() {
        let a = random_matrix(4, 7, 5);
        let tau = 0.6;
        let z = svt(&a, tau).unwrap();
        let objective = |m: &Matrix| {
            let mut dist = 0.0;
            for r in 0..7 {
                for c in 0..5 {
                    dist += (m.get(r, c) - a.get(r, c)).powi(2);
                }
            }
            tau * nuclear_norm(m) + 0.5 * dist
        };
        let base = objective(&z);
        let mut rng = StdRng::seed_from_u64(44);
        for trial in 0..200 {
            let delta = 10f64.powf(-(trial % 5) as f64);
            let perturbed = Matrix::from_fn(7, 5, |r, c| {
                z.get(r, c) + delta * (rng.random::<f64>() * 2.0 - 1.0)
            });
            assert!(base <= objective(&perturbed) + 1e-9);
        }
    }

    #[test]
    fn svt_is_nonexpansive() {
        for seed in 0..10 {
            let a = random_matrix(500 + seed, 6, 8);
            let b = random_matrix(600 + seed, 6, 8);
            let tau = 0.3 + 0.1 * seed as f64;
            let sa = svt(&a, tau).unwrap();
            let sb = svt(&b, tau).unwrap();
            let mut num = 0.0;
            let mut den = 0.0;
            for r in 0..6 {
                for c in 0..8 {
                    num += (sa.get(r, c) - sb.get(r, c)).powi(2);
                    den += (a.get(r, c) - b.get(r, c)).powi(2);
                }
            }
            assert!(num.sqrt() <= den.sqrt() + 1e-12);
        }
    }

    #[test]
    fn nuclear_norm_known_values() {
        assert!((nuclear_norm(&Matrix::identity(3)) - 3.0).abs() < 1e-12);
        // rank-1 u v^T with unit norms
        let u = [0.6, 0.8];
        let v = [1.0 / 3f64.sqrt(); 3];
        let a = Matrix::from_fn(2, 3, |r, c| u[r] * v[c]);
        assert!((nuclear_norm(&a) - 1.0).abs() < 1e-12);
        assert_eq!(nuclear_norm(&Matrix::zeros(3, 4)), 0.0);
    }

    #[test]
    fn nuclear_norm_triangle_inequality() {
        for seed in 0..20 {
            let a = random_matrix(700 + seed, 7, 9);
            let b = random_matrix(800 + seed, 7, 9);
            let mut sum = Matrix::zeros(7, 9);
            for r in 0..7 {
                for c in 0..9 {
                    sum.set(r, c, a.get(r, c) + b.get(r, c));
                }
            }
            assert!(nuclear_norm(&sum) <= nuclear_norm(&a) + nuclear_norm(&b) + 1e-10);
        }
    }

    #[test]
    fn hnn_of_zero_and_constant() {
        assert_eq!(hnn(&Tensor3::zeros(4, 4, 3)).unwrap(), 0.0);
        // c * ones(2,2,S): only b1 nonzero, rank 1, value 2|c|sqrt(S)
        let c = -1.25;
        let s = 5;
        let t = Tensor3::filled(2, 2, s, c);
        let expected = 2.0 * c.abs() * (s as f64).sqrt();
        assert!((hnn(&t).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn hnn_matches_per_block_sum() {
        let t = random_tensor(71, 8, 10, 6);
        let blocks = fhwt2(&t).unwrap();
        let by_hand: f64 = (0..4)
            .map(|i| {
                svd(&blocks.block(i).unfold(Mode::Three))
                    .unwrap()
                    .sigma
                    .iter()
                    .sum::<f64>()
            })
            .sum();
        assert!((hnn(&t).unwrap() - by_hand).abs() < 1e-10);
    }

    #[test]
    fn hnn_rejects_odd_dims() {
        assert!(hnn(&Tensor3::zeros(3, 4, 2)).is_err());
    }

    #[test]
    fn hnn_is_a_norm() {
        let t = random_tensor(81, 8, 6, 4);
        let u = random_tensor(82, 8, 6, 4);
        let alpha = -2.4;
        let homog = (hnn(&t.scale(alpha)).unwrap() - alpha.abs() * hnn(&t).unwrap()).abs();
        assert!(homog < 1e-10 * hnn(&t).unwrap().max(1.0));
        let tri = hnn(&t.add(&u)).unwrap();
        assert!(tri <= hnn(&t).unwrap() + hnn(&u).unwrap() + 1e-8);
    }

    #[test]
    fn hnn_invariant_under_mode3_rotation() {
        let t = random_tensor(91, 8, 6, 5);
        let q = svd(&random_matrix(92, 5, 5)).unwrap().u;
        let rotated = t.mode_n_product(&q, Mode::Three).unwrap();
        let a = hnn(&t).unwrap();
        let b = hnn(&rotated).unwrap();
        assert!((a - b).abs() <= 1e-8 * a.max(1.0), "{a} vs {b}");
    }
}
