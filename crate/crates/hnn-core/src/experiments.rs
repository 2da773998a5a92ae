//! Synthetic experiment harnesses: the six hyperspectral noise cases, random
//! observation masks, sparse corruption, the phase-transition sweep, and the
//! channel-by-time reshape used for multi-temporal (cloud removal) data.
//!
//! Every generator is a pure function of its parameters and a seed. Phase-map
//! trial seeds are derived from `(grid seed, cell, repeat)`, so parallel and
//! serial sweeps produce identical results.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::solver::{hnn_mc, hnn_rpca, Mask, SolverConfig};
use crate::tensor::{random_tucker, Tensor3, TuckerSpec};

// ---------------------------------------------------------------------------
// Seed derivation
// ---------------------------------------------------------------------------

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministically derive a child seed from a base seed and index parts.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    let mut acc = mix64(base ^ 0x9e37_79b9_7f4a_7c15);
    for (i, &p) in parts.iter().enumerate() {
        acc = mix64(acc ^ p.wrapping_add((i as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15)));
    }
    acc
}

// ---------------------------------------------------------------------------
// Noise cases
// ---------------------------------------------------------------------------

/// Mixed-noise simulation protocol for unit-scale (`[0,1]`) data.
///
/// Case 1 is i.i.d. Gaussian noise; case 2 draws a separate deviation per
/// band; cases 3-5 additionally corrupt a fraction of the bands with impulse,
/// stripe, or deadline noise; case 6 applies all three structured patterns on
/// top of case 2. Deviations are quoted on the 0-255 scale in the literature
/// and divided by 255 here. Noisy values are not clamped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseCase {
    pub case_id: u8,
    /// Case 1 deviation (unit scale).
    pub gaussian_sigma: f64,
    /// Per-band deviation range for cases 2-6 (unit scale).
    pub sigma_range: (f64, f64),
    /// Ratio range for impulse pixels / striped columns / dead columns.
    pub corruption_ratio: (f64, f64),
    /// Fraction of bands hit by each structured pattern.
    pub band_fraction: f64,
    /// Stripe offsets are uniform in `[-stripe_offset_max, stripe_offset_max]`.
    pub stripe_offset_max: f64,
    pub seed: u64,
}

impl NoiseCase {
    pub fn new(case_id: u8, seed: u64) -> Result<Self> {
        if !(1..=6).contains(&case_id) {
            return Err(Error::InvalidNoiseCase(case_id));
        }
        Ok(Self {
            case_id,
            gaussian_sigma: 75.0 / 255.0,
            sigma_range: (30.0 / 255.0, 100.0 / 255.0),
            corruption_ratio: (0.05, 0.20),
            band_fraction: 1.0 / 3.0,
            stripe_offset_max: 0.25,
            seed,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=6).contains(&self.case_id) {
            return Err(Error::InvalidNoiseCase(self.case_id));
        }
        if self.gaussian_sigma < 0.0 || !self.gaussian_sigma.is_finite() {
            return Err(Error::InvalidNoiseParams(
                "gaussian sigma must be nonnegative".into(),
            ));
        }
        let (lo, hi) = self.sigma_range;
        if lo < 0.0 || hi < lo || !hi.is_finite() {
            return Err(Error::InvalidNoiseParams(
                "sigma range must satisfy 0 <= lo <= hi".into(),
            ));
        }
        let (plo, phi) = self.corruption_ratio;
        if !(0.0..=1.0).contains(&plo) || phi < plo || phi > 1.0 {
            return Err(Error::InvalidNoiseParams(
                "corruption ratio range must lie in [0,1]".into(),
            ));
        }
        if !(self.band_fraction > 0.0 && self.band_fraction <= 1.0) {
            return Err(Error::InvalidNoiseParams(
                "band fraction must lie in (0,1]".into(),
            ));
        }
        if self.stripe_offset_max < 0.0 {
            return Err(Error::InvalidNoiseParams(
                "stripe offset must be nonnegative".into(),
            ));
        }
        Ok(())
    }
}

fn sample_uniform(rng: &mut StdRng, lo: f64, hi: f64) -> f64 {
    if hi > lo {
        lo + (hi - lo) * rng.random::<f64>()
    } else {
        lo
    }
}

/// Choose `count` distinct values from `0..n`, returned in ascending order.
fn sample_without_replacement(rng: &mut StdRng, n: usize, count: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..n).collect();
    let count = count.min(n);
    for i in 0..count {
        let j = i + rng.random_range(0..(n - i));
        pool.swap(i, j);
    }
    let mut chosen = pool[..count].to_vec();
    chosen.sort_unstable();
    chosen
}

fn add_gaussian(data: &mut [f64], rng: &mut StdRng, sigma: f64) {
    if sigma == 0.0 {
        return;
    }
    let normal = Normal::new(0.0, sigma).expect("validated sigma");
    for v in data {
        *v += normal.sample(rng);
    }
}

/// Corrupt `x` per the chosen noise case. Returns the noisy tensor and the
/// support of the structured (impulse/stripe/deadline) corruption; the
/// Gaussian component is not part of the support.
pub fn apply_noise(x: &Tensor3, case: &NoiseCase) -> Result<(Tensor3, Mask)> {
    case.validate()?;
    let (m, n, s) = x.dims();
    let mut rng = StdRng::seed_from_u64(case.seed);
    let mut out = x.clone();
    let mut support = vec![false; x.len()];

    if case.case_id == 1 {
        add_gaussian(out.as_mut_slice(), &mut rng, case.gaussian_sigma);
    } else {
        let (lo, hi) = case.sigma_range;
        for band in 0..s {
            let sigma = sample_uniform(&mut rng, lo, hi);
            add_gaussian(out.slice_mut(band), &mut rng, sigma);
        }
    }

    let n_bands = ((s as f64 * case.band_fraction).round() as usize).clamp(1, s);
    let (plo, phi) = case.corruption_ratio;
    let plane = m * n;

    // impulse: salt-and-pepper pixels at ratio p within each chosen band
    if case.case_id == 3 || case.case_id == 6 {
        for &band in &sample_without_replacement(&mut rng, s, n_bands) {
            let p = sample_uniform(&mut rng, plo, phi);
            for j in 0..n {
                for i in 0..m {
                    if rng.random::<f64>() < p {
                        let v = if rng.random::<bool>() { 1.0 } else { 0.0 };
                        out.set(i, j, band, v);
                        support[i + j * m + band * plane] = true;
                    }
                }
            }
        }
    }

    // stripe: a constant offset added to whole columns of each chosen band
    if case.case_id == 4 || case.case_id == 6 {
        for &band in &sample_without_replacement(&mut rng, s, n_bands) {
            let p = sample_uniform(&mut rng, plo, phi);
            let cols = ((p * n as f64).round() as usize).clamp(1, n);
            for &col in &sample_without_replacement(&mut rng, n, cols) {
                let offset =
                    sample_uniform(&mut rng, -case.stripe_offset_max, case.stripe_offset_max);
                for i in 0..m {
                    let v = out.get(i, col, band) + offset;
                    out.set(i, col, band, v);
                    support[i + col * m + band * plane] = true;
                }
            }
        }
    }

    // deadline: whole columns of each chosen band are zeroed
    if case.case_id == 5 || case.case_id == 6 {
        for &band in &sample_without_replacement(&mut rng, s, n_bands) {
            let p = sample_uniform(&mut rng, plo, phi);
            let cols = ((p * n as f64).round() as usize).clamp(1, n);
            for &col in &sample_without_replacement(&mut rng, n, cols) {
                for i in 0..m {
                    out.set(i, col, band, 0.0);
                    support[i + col * m + band * plane] = true;
                }
            }
        }
    }

    Ok((out, Mask::from_flags((m, n, s), support)))
}

// ---------------------------------------------------------------------------
// Masks and sparse corruption
// ---------------------------------------------------------------------------

/// Uniform random observation mask with exactly `round(rate * M*N*S)`
/// observed entries, drawn without replacement.
pub fn random_mask(dims: (usize, usize, usize), sampling_rate: f64, seed: u64) -> Result<Mask> {
    if !(sampling_rate > 0.0 && sampling_rate <= 1.0) {
        return Err(Error::InvalidSamplingRate(sampling_rate));
    }
    let (m, n, s) = dims;
    let total = m * n * s;
    let count = ((sampling_rate * total as f64).round() as usize).min(total);
    let mut rng = StdRng::seed_from_u64(seed);
    let mut flags = vec![false; total];
    for idx in sample_without_replacement(&mut rng, total, count) {
        flags[idx] = true;
    }
    Ok(Mask::from_flags(dims, flags))
}

/// Additive sparse corruption: perturbs `round(fraction * M*N*S)` entries by
/// `+-magnitude` with random signs. Returns the corrupted tensor and the true
/// support.
pub fn sparse_corruption(
    x: &Tensor3,
    fraction: f64,
    magnitude: f64,
    seed: u64,
) -> Result<(Tensor3, Mask)> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::InvalidNoiseParams(format!(
            "corruption fraction must lie in [0,1], got {fraction}"
        )));
    }
    let dims = x.dims();
    let total = x.len();
    let count = ((fraction * total as f64).round() as usize).min(total);
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out = x.clone();
    let mut flags = vec![false; total];
    for idx in sample_without_replacement(&mut rng, total, count) {
        flags[idx] = true;
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        out.as_mut_slice()[idx] += sign * magnitude;
    }
    Ok((out, Mask::from_flags(dims, flags)))
}

// ---------------------------------------------------------------------------
// Phase transition sweep
// ---------------------------------------------------------------------------

/// Which restoration problem a phase sweep exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Problem {
    Mc,
    Rpca,
}

impl std::str::FromStr for Problem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mc" => Ok(Problem::Mc),
            "rpca" => Ok(Problem::Rpca),
            other => Err(Error::InvalidConfig(format!("unknown problem '{other}'"))),
        }
    }
}

/// Grid for a phase-transition study: Tucker ranks on one axis, sampling rate
/// (completion) or corruption fraction (robust PCA) on the other.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseGrid {
    pub dims: (usize, usize, usize),
    pub ranks: Vec<usize>,
    /// Sampling rates in `(0,1]` for completion, corruption fractions in
    /// `[0,1]` for robust PCA.
    pub axis2: Vec<f64>,
    pub repeats: usize,
    /// A trial succeeds when its relative reconstruction error is below this.
    pub success_threshold: f64,
    pub seed: u64,
}

impl PhaseGrid {
    pub fn new(ranks: Vec<usize>, axis2: Vec<f64>, seed: u64) -> Self {
        Self {
            dims: (30, 30, 30),
            ranks,
            axis2,
            repeats: 10,
            success_threshold: 0.1,
            seed,
        }
    }

    pub fn validate(&self, problem: Problem) -> Result<()> {
        let (m, n, s) = self.dims;
        let min_dim = m.min(n).min(s);
        if self.ranks.is_empty() || self.axis2.is_empty() {
            return Err(Error::InvalidConfig("phase grid axes must be nonempty".into()));
        }
        if let Some(&r) = self.ranks.iter().find(|&&r| r == 0 || r > min_dim) {
            return Err(Error::InvalidTuckerRank { rank: r, dim: min_dim });
        }
        for &v in &self.axis2 {
            match problem {
                Problem::Mc => {
                    if !(v > 0.0 && v <= 1.0) {
                        return Err(Error::InvalidSamplingRate(v));
                    }
                }
                Problem::Rpca => {
                    if !(0.0..=1.0).contains(&v) {
                        return Err(Error::InvalidNoiseParams(format!(
                            "corruption fraction must lie in [0,1], got {v}"
                        )));
                    }
                }
            }
        }
        if self.repeats == 0 {
            return Err(Error::InvalidConfig("repeats must be at least 1".into()));
        }
        if !(self.success_threshold > 0.0) {
            return Err(Error::InvalidConfig("success threshold must be positive".into()));
        }
        Ok(())
    }
}

/// Seed of one trial, derived so sweeps are reproducible cell by cell.
pub fn trial_seed(grid_seed: u64, rank_idx: usize, axis2_idx: usize, repeat: usize) -> u64 {
    derive_seed(grid_seed, &[rank_idx as u64, axis2_idx as u64, repeat as u64])
}

/// One synthetic trial instance: ground truth, observation, and (per problem)
/// the observation mask or the true corruption support.
#[derive(Debug, Clone)]
pub struct Trial {
    pub truth: Tensor3,
    pub observation: Tensor3,
    pub mask: Option<Mask>,
    pub support: Option<Mask>,
}

/// Build the trial for grid cell `(rank_idx, axis2_idx)` and repeat index.
pub fn make_trial(
    grid: &PhaseGrid,
    problem: Problem,
    rank_idx: usize,
    axis2_idx: usize,
    repeat: usize,
) -> Result<Trial> {
    let rank = grid.ranks[rank_idx];
    let value = grid.axis2[axis2_idx];
    let seed = trial_seed(grid.seed, rank_idx, axis2_idx, repeat);
    let truth = random_tucker(
        grid.dims,
        &TuckerSpec::new((rank, rank, rank), derive_seed(seed, &[0])),
    )?;
    match problem {
        Problem::Mc => {
            let mask = random_mask(grid.dims, value, derive_seed(seed, &[1]))?;
            Ok(Trial {
                observation: truth.clone(),
                truth,
                mask: Some(mask),
                support: None,
            })
        }
        Problem::Rpca => {
            let (lo, hi) = truth.value_range();
            let magnitude = 0.5 * (hi - lo);
            let (observation, support) =
                sparse_corruption(&truth, value, magnitude, derive_seed(seed, &[1]))?;
            Ok(Trial {
                truth,
                observation,
                mask: None,
                support: Some(support),
            })
        }
    }
}

/// Success-rate matrix of a phase sweep, indexed `[rank][axis2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseMap {
    pub problem: Problem,
    pub ranks: Vec<usize>,
    pub axis2: Vec<f64>,
    pub rates: Vec<Vec<f64>>,
}

impl PhaseMap {
    /// CSV with a header row of axis-2 values and ranks in the first column.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("rank");
        for v in &self.axis2 {
            out.push(',');
            out.push_str(&v.to_string());
        }
        out.push('\n');
        for (ri, &rank) in self.ranks.iter().enumerate() {
            out.push_str(&rank.to_string());
            for rate in &self.rates[ri] {
                out.push(',');
                out.push_str(&rate.to_string());
            }
            out.push('\n');
        }
        out
    }
}

fn trial_error(
    grid: &PhaseGrid,
    problem: Problem,
    cfg: &SolverConfig,
    ri: usize,
    ai: usize,
    rep: usize,
) -> Option<f64> {
    let trial = make_trial(grid, problem, ri, ai, rep).ok()?;
    let result = match problem {
        Problem::Mc => hnn_mc(&trial.observation, trial.mask.as_ref()?, cfg).ok()?,
        Problem::Rpca => hnn_rpca(&trial.observation, cfg).ok()?,
    };
    Some(result.x.sub(&trial.truth).frobenius_norm() / trial.truth.frobenius_norm())
}

/// Sweep the grid, running `repeats` seeded trials per cell, and report
/// per-cell success rates. Trials run in parallel; a solver failure counts
/// as an unsuccessful trial and never aborts the sweep.
pub fn phase_map(grid: &PhaseGrid, problem: Problem, cfg: &SolverConfig) -> Result<PhaseMap> {
    grid.validate(problem)?;
    cfg.validate()?;
    let cells: Vec<(usize, usize, usize)> = (0..grid.ranks.len())
        .flat_map(|ri| {
            (0..grid.axis2.len())
                .flat_map(move |ai| (0..grid.repeats).map(move |rep| (ri, ai, rep)))
        })
        .collect();
    let successes: Vec<((usize, usize), bool)> = cells
        .par_iter()
        .map(|&(ri, ai, rep)| {
            let ok = trial_error(grid, problem, cfg, ri, ai, rep)
                .map(|err| err < grid.success_threshold)
                .unwrap_or(false);
            ((ri, ai), ok)
        })
        .collect();
    let mut rates = vec![vec![0.0f64; grid.axis2.len()]; grid.ranks.len()];
    for ((ri, ai), ok) in successes {
        if ok {
            rates[ri][ai] += 1.0;
        }
    }
    for row in &mut rates {
        for rate in row {
            *rate /= grid.repeats as f64;
        }
    }
    Ok(PhaseMap {
        problem,
        ranks: grid.ranks.clone(),
        axis2: grid.axis2.clone(),
        rates,
    })
}

// ---------------------------------------------------------------------------
// Multi-temporal data
// ---------------------------------------------------------------------------

/// Dense 4-order array `M x N x C x T` (pixels by channels by time nodes),
/// stored with the first index fastest, matching [`Tensor3`].
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor4 {
    dims: (usize, usize, usize, usize),
    data: Vec<f64>,
}

impl Tensor4 {
    pub fn zeros(m: usize, n: usize, c: usize, t: usize) -> Self {
        assert!(m > 0 && n > 0 && c > 0 && t > 0, "tensor dims must be positive");
        Self {
            dims: (m, n, c, t),
            data: vec![0.0; m * n * c * t],
        }
    }

    pub fn from_fn(
        m: usize,
        n: usize,
        c: usize,
        t: usize,
        mut f: impl FnMut(usize, usize, usize, usize) -> f64,
    ) -> Self {
        let mut out = Self::zeros(m, n, c, t);
        let mut idx = 0;
        for tt in 0..t {
            for cc in 0..c {
                for j in 0..n {
                    for i in 0..m {
                        out.data[idx] = f(i, j, cc, tt);
                        idx += 1;
                    }
                }
            }
        }
        out
    }

    pub fn dims(&self) -> (usize, usize, usize, usize) {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, c: usize, t: usize) -> f64 {
        let (m, n, ch, _) = self.dims;
        self.data[i + j * m + c * m * n + t * m * n * ch]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

/// Fold channels and time nodes into a single spectral mode: the result has
/// `S = C*T` frontal slices ordered channel-fastest (`s = c + t*C`).
pub fn multitemporal_reshape(t4: &Tensor4) -> Tensor3 {
    let (m, n, c, t) = t4.dims();
    Tensor3::from_vec(m, n, c * t, t4.data.clone())
}

/// Inverse of [`multitemporal_reshape`]; `channels` must divide the spectral
/// dimension.
pub fn multitemporal_unreshape(t: &Tensor3, channels: usize) -> Result<Tensor4> {
    let (m, n, s) = t.dims();
    if channels == 0 || s % channels != 0 {
        return Err(Error::DimMismatch {
            context: format!("{s} slices cannot split into {channels} channels"),
        });
    }
    Ok(Tensor4 {
        dims: (m, n, channels, s / channels),
        data: t.as_slice().to_vec(),
    })
}

// ---------------------------------------------------------------------------
// Synthetic imagery
// ---------------------------------------------------------------------------

/// Smooth multi-channel video in `[0,1]`: a few random low-frequency spatial
/// waves drifting over time, mixed per channel. Deterministic per seed.
pub fn smooth_video(dims: (usize, usize, usize, usize), seed: u64) -> Tensor4 {
    let (m, n, c, t) = dims;
    let mut rng = StdRng::seed_from_u64(seed);
    let waves: Vec<(f64, f64, f64, f64, f64)> = (0..4)
        .map(|_| {
            (
                sample_uniform(&mut rng, 0.5, 2.0),
                sample_uniform(&mut rng, 0.5, 2.0),
                sample_uniform(&mut rng, 0.0, std::f64::consts::TAU),
                sample_uniform(&mut rng, 0.1, 0.6),
                sample_uniform(&mut rng, 0.3, 1.0),
            )
        })
        .collect();
    let channel_gain: Vec<f64> = (0..c).map(|_| sample_uniform(&mut rng, 0.6, 1.0)).collect();
    let channel_bias: Vec<f64> = (0..c).map(|_| sample_uniform(&mut rng, -0.2, 0.2)).collect();
    let mut out = Tensor4::from_fn(m, n, c, t, |i, j, cc, tt| {
        let x = i as f64 / m as f64;
        let y = j as f64 / n as f64;
        let time = tt as f64 / t.max(1) as f64;
        let mut v = 0.0;
        for &(fx, fy, phase, drift, amp) in &waves {
            v += amp * (std::f64::consts::TAU * (fx * x + fy * y) + phase + drift * time).sin();
        }
        channel_gain[cc] * v + channel_bias[cc]
    });
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &v in out.as_slice() {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let span = if hi > lo { hi - lo } else { 1.0 };
    for v in &mut out.data {
        *v = 0.05 + 0.9 * (*v - lo) / span;
    }
    out
}

/// Blob-shaped hidden-pixel mask over an `M x N` frame: `true` marks hidden
/// (clouded) pixels, exactly `round(coverage * M*N)` of them, clustered
/// around a handful of random centers.
pub fn blob_mask(spatial: (usize, usize), coverage: f64, seed: u64) -> Result<Vec<bool>> {
    if !(0.0..=1.0).contains(&coverage) {
        return Err(Error::InvalidNoiseParams(format!(
            "coverage must lie in [0,1], got {coverage}"
        )));
    }
    let (m, n) = spatial;
    let total = m * n;
    let hidden = ((coverage * total as f64).round() as usize).min(total);
    let mut rng = StdRng::seed_from_u64(seed);
    let blobs: Vec<(f64, f64, f64)> = (0..3)
        .map(|_| {
            (
                sample_uniform(&mut rng, 0.0, m as f64),
                sample_uniform(&mut rng, 0.0, n as f64),
                sample_uniform(&mut rng, 0.15, 0.45) * m.max(n) as f64,
            )
        })
        .collect();
    // intensity field peaking near blob centers; hide the top `hidden` pixels
    let mut scored: Vec<(f64, usize)> = (0..total)
        .map(|idx| {
            let i = (idx % m) as f64;
            let j = (idx / m) as f64;
            let mut field = 0.0;
            for &(ci, cj, radius) in &blobs {
                let d2 = (i - ci).powi(2) + (j - cj).powi(2);
                field += (-d2 / (2.0 * radius * radius)).exp();
            }
            (field, idx)
        })
        .collect();
    scored.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.1.cmp(&b.1))
    });
    let mut flags = vec![false; total];
    for &(_, idx) in scored.iter().take(hidden) {
        flags[idx] = true;
    }
    Ok(flags)
}
