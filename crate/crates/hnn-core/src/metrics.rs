//! Image quality metrics for tensor images: PSNR, band-averaged SSIM, ERGAS,
//! and the spectral angle mapper. All metrics are pure functions and are
//! invariant under band permutations.

use crate::error::{Error, Result};
use crate::tensor::Tensor3;

const SSIM_WINDOW: usize = 11;
const SSIM_SIGMA: f64 = 1.5;
const SSIM_K1: f64 = 0.01;
const SSIM_K2: f64 = 0.03;

fn check_dims(x: &Tensor3, reference: &Tensor3) -> Result<()> {
    if x.dims() != reference.dims() {
        return Err(Error::DimMismatch {
            context: format!("metric inputs {:?} vs {:?}", x.dims(), reference.dims()),
        });
    }
    Ok(())
}

/// Peak signal-to-noise ratio in dB over all entries,
/// `10 log10(peak^2 / MSE)`. Identical inputs give `f64::INFINITY`.
pub fn psnr(x: &Tensor3, reference: &Tensor3, peak: f64) -> Result<f64> {
    check_dims(x, reference)?;
    assert!(peak > 0.0, "peak must be positive");
    let mse = x
        .as_slice()
        .iter()
        .zip(reference.as_slice())
        .map(|(&a, &b)| (a - b) * (a - b))
        .sum::<f64>()
        / x.len() as f64;
    if mse == 0.0 {
        Ok(f64::INFINITY)
    } else {
        Ok(10.0 * (peak * peak / mse).log10())
    }
}

/// PSNR of each frontal slice separately.
pub fn per_band_psnr(x: &Tensor3, reference: &Tensor3, peak: f64) -> Result<Vec<f64>> {
    check_dims(x, reference)?;
    assert!(peak > 0.0, "peak must be positive");
    let (_, _, s) = x.dims();
    let mut out = Vec::with_capacity(s);
    for k in 0..s {
        let xs = x.slice(k);
        let rs = reference.slice(k);
        let mse = xs
            .iter()
            .zip(rs)
            .map(|(&a, &b)| (a - b) * (a - b))
            .sum::<f64>()
            / xs.len() as f64;
        out.push(if mse == 0.0 {
            f64::INFINITY
        } else {
            10.0 * (peak * peak / mse).log10()
        });
    }
    Ok(out)
}

fn gaussian_window() -> [f64; SSIM_WINDOW] {
    let mut w = [0.0; SSIM_WINDOW];
    let center = (SSIM_WINDOW / 2) as f64;
    let mut sum = 0.0;
    for (i, v) in w.iter_mut().enumerate() {
        let d = i as f64 - center;
        *v = (-d * d / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
        sum += *v;
    }
    for v in &mut w {
        *v /= sum;
    }
    w
}

/// Separable valid-mode Gaussian filtering of an `m x n` column-major plane:
/// output is `(m - W + 1) x (n - W + 1)`.
fn filter_valid(plane: &[f64], m: usize, n: usize, w: &[f64; SSIM_WINDOW]) -> Vec<f64> {
    let vm = m - SSIM_WINDOW + 1;
    let vn = n - SSIM_WINDOW + 1;
    // vertical pass: vm x n
    let mut tmp = vec![0.0; vm * n];
    for j in 0..n {
        let col = &plane[j * m..(j + 1) * m];
        for i in 0..vm {
            let mut acc = 0.0;
            for (u, &wu) in w.iter().enumerate() {
                acc += wu * col[i + u];
            }
            tmp[j * vm + i] = acc;
        }
    }
    // horizontal pass: vm x vn
    let mut out = vec![0.0; vm * vn];
    for j in 0..vn {
        for i in 0..vm {
            let mut acc = 0.0;
            for (v, &wv) in w.iter().enumerate() {
                acc += wv * tmp[(j + v) * vm + i];
            }
            out[j * vm + i] = acc;
        }
    }
    out
}

/// Mean structural similarity: per-band 2-D SSIM with an 11x11 Gaussian
/// window (sigma 1.5, K1 = 0.01, K2 = 0.03, unit dynamic range), averaged
/// over bands. Inputs are expected on the `[0,1]` scale.
pub fn ssim(x: &Tensor3, reference: &Tensor3) -> Result<f64> {
    check_dims(x, reference)?;
    let (m, n, s) = x.dims();
    if m < SSIM_WINDOW || n < SSIM_WINDOW {
        return Err(Error::BandTooSmall {
            m,
            n,
            window: SSIM_WINDOW,
        });
    }
    let w = gaussian_window();
    let c1 = (SSIM_K1 * 1.0f64).powi(2);
    let c2 = (SSIM_K2 * 1.0f64).powi(2);
    let plane = m * n;
    let mut band_scores = Vec::with_capacity(s);
    let mut xx = vec![0.0; plane];
    let mut yy = vec![0.0; plane];
    let mut xy = vec![0.0; plane];
    for k in 0..s {
        let xs = x.slice(k);
        let ys = reference.slice(k);
        for idx in 0..plane {
            xx[idx] = xs[idx] * xs[idx];
            yy[idx] = ys[idx] * ys[idx];
            xy[idx] = xs[idx] * ys[idx];
        }
        let mu_x = filter_valid(xs, m, n, &w);
        let mu_y = filter_valid(ys, m, n, &w);
        let e_xx = filter_valid(&xx, m, n, &w);
        let e_yy = filter_valid(&yy, m, n, &w);
        let e_xy = filter_valid(&xy, m, n, &w);
        let mut acc = 0.0;
        for idx in 0..mu_x.len() {
            let mx = mu_x[idx];
            let my = mu_y[idx];
            let var_x = e_xx[idx] - mx * mx;
            let var_y = e_yy[idx] - my * my;
            let cov = e_xy[idx] - mx * my;
            let num = (2.0 * mx * my + c1) * (2.0 * cov + c2);
            let den = (mx * mx + my * my + c1) * (var_x + var_y + c2);
            acc += num / den;
        }
        band_scores.push(acc / mu_x.len() as f64);
    }
    Ok(band_scores.iter().sum::<f64>() / s as f64)
}

/// Relative dimensionless global error: `100 * sqrt(mean_b (RMSE_b / mu_b)^2)`
/// with `mu_b` the reference band mean. The resolution ratio is fixed at 1
/// since restoration compares same-resolution images.
pub fn ergas(x: &Tensor3, reference: &Tensor3) -> Result<f64> {
    check_dims(x, reference)?;
    let (_, _, s) = x.dims();
    let mut acc = 0.0;
    for k in 0..s {
        let xs = x.slice(k);
        let rs = reference.slice(k);
        let count = xs.len() as f64;
        let mean: f64 = rs.iter().sum::<f64>() / count;
        if mean == 0.0 {
            return Err(Error::ZeroMeanBand { band: k });
        }
        let mse = xs
            .iter()
            .zip(rs)
            .map(|(&a, &b)| (a - b) * (a - b))
            .sum::<f64>()
            / count;
        acc += mse / (mean * mean);
    }
    Ok(100.0 * (acc / s as f64).sqrt())
}

/// Spectral angle statistics: mean per-pixel angle plus how many pixels were
/// skipped for having a zero-norm spectrum on either side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamStats {
    pub mean_radians: f64,
    pub evaluated_pixels: usize,
    pub skipped_pixels: usize,
}

/// Mean spectral angle in radians between per-pixel spectra (the `S`-vectors
/// at each spatial position). Zero-norm spectra are skipped and counted.
pub fn sam_stats(x: &Tensor3, reference: &Tensor3) -> Result<SamStats> {
    check_dims(x, reference)?;
    let (m, n, s) = x.dims();
    let plane = m * n;
    let mut total = 0.0;
    let mut evaluated = 0usize;
    let mut skipped = 0usize;
    for j in 0..n {
        for i in 0..m {
            let base = i + j * m;
            let mut nx = 0.0;
            let mut nr = 0.0;
            for k in 0..s {
                let a = x.as_slice()[base + k * plane];
                let b = reference.as_slice()[base + k * plane];
                nx += a * a;
                nr += b * b;
            }
            if nx == 0.0 || nr == 0.0 {
                skipped += 1;
                continue;
            }
            // angle between unit spectra via 2*atan2(|u-v|, |u+v|), which
            // stays accurate where acos of the cosine loses digits
            let (sx, sr) = (nx.sqrt(), nr.sqrt());
            let mut diff = 0.0;
            let mut sum = 0.0;
            for k in 0..s {
                let a = x.as_slice()[base + k * plane] / sx;
                let b = reference.as_slice()[base + k * plane] / sr;
                diff += (a - b) * (a - b);
                sum += (a + b) * (a + b);
            }
            total += 2.0 * diff.sqrt().atan2(sum.sqrt());
            evaluated += 1;
        }
    }
    if evaluated == 0 {
        return Err(Error::AllPixelsDegenerate);
    }
    Ok(SamStats {
        mean_radians: total / evaluated as f64,
        evaluated_pixels: evaluated,
        skipped_pixels: skipped,
    })
}

/// Mean spectral angle in radians; see [`sam_stats`].
pub fn sam(x: &Tensor3, reference: &Tensor3) -> Result<f64> {
    Ok(sam_stats(x, reference)?.mean_radians)
}

/// Bundle of all four metrics; on `(x, x)` this is `(inf, 1, 0, 0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub psnr: f64,
    pub ssim: f64,
    pub ergas: f64,
    pub sam: f64,
    pub per_band_psnr: Option<Vec<f64>>,
}

pub fn metrics_report(x: &Tensor3, reference: &Tensor3, peak: f64) -> Result<MetricsReport> {
    Ok(MetricsReport {
        psnr: psnr(x, reference, peak)?,
        ssim: ssim(x, reference)?,
        ergas: ergas(x, reference)?,
        sam: sam(x, reference)?,
        per_band_psnr: Some(per_band_psnr(x, reference, peak)?),
    })
}
