//! Sparse-to-dense completion oracle and evaluation metrics.
//!
//! The completer is deliberately simple: inverse-distance weighting over the
//! nearest samples in pixel space. It is not meant to compete with learned
//! completion; it is a fixed, deterministic lens through which sampling
//! strategies can be compared. Whatever systematic advantage a strategy has
//! must survive this crude interpolator to count.

use crate::camera::DepthMap;
use crate::error::{Error, Result};
use crate::normals::NeighborhoodConfig;
use crate::reliability::{to_probabilities, ReliabilityConfig};
use crate::sampler::{sample_uniform, sample_without_replacement, SampleSet, Strategy};
use crate::scalar::{real, to_f64, Real};
use crate::synthetic::{apply_noise, NoiseModel};

/// Distance regularizer in the IDW weight 1 / (d^p + EPS); also what makes
/// the weight finite when two samples land on adjacent subpixel positions.
const IDW_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompletionConfig {
    /// Number of nearest samples blended per pixel.
    pub neighbors: usize,
    /// Exponent on pixel distance; 2 is the customary inverse-square falloff.
    pub power: f64,
}

impl CompletionConfig {
    pub fn new(neighbors: usize, power: f64) -> Result<Self> {
        let cfg = Self { neighbors, power };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.neighbors == 0 {
            return Err(Error::invalid("completion: neighbors must be >= 1"));
        }
        if !self.power.is_finite() || self.power <= 0.0 {
            return Err(Error::invalid(format!(
                "completion: power must be finite and > 0, got {}",
                self.power
            )));
        }
        Ok(())
    }
}

impl Default for CompletionConfig {
    fn default() -> Self {
        Self {
            neighbors: 8,
            power: 2.0,
        }
    }
}

/// Keeps the `n` smallest-distance rows of `dists`, preserving the original
/// (row-major scan) order among ties by selecting on (distance, index).
fn partial_select_nearest(dists: &mut Vec<(f64, usize)>, n: usize) {
    if dists.len() > n {
        dists.select_nth_unstable_by(n - 1, |a, b| {
            a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1))
        });
        dists.truncate(n);
    }
}

/// Densifies a sparse depth map by inverse-distance weighting.
///
/// Every output pixel receives the weighted mean of the depths of its
/// `neighbors` nearest samples, with distances measured between pixel
/// centers in 2D. A pixel that coincides exactly with a sample copies that
/// sample's depth, bypassing the blend entirely. The output is fully dense
/// (all pixels valid) and every value lies within the min-max span of the
/// contributing samples.
pub fn complete_idw<T: Real>(samples: &SampleSet<T>, cfg: &CompletionConfig) -> Result<DepthMap<T>> {
    cfg.validate()?;
    if samples.k() == 0 {
        return Err(Error::invalid("completion: sample set is empty"));
    }

    let width = samples.width;
    let height = samples.height;
    let coords: Vec<(f64, f64, f64)> = samples
        .indices
        .iter()
        .zip(&samples.depths)
        .map(|(&idx, &d)| ((idx % width) as f64, (idx / width) as f64, to_f64(d)))
        .collect();

    // Exact hits resolved up front by index, not by distance comparison.
    let mut exact = vec![None; width * height];
    for (&idx, &d) in samples.indices.iter().zip(&samples.depths) {
        exact[idx] = Some(d);
    }

    let mut values = vec![T::zero(); width * height];
    let mut dists: Vec<(f64, usize)> = Vec::with_capacity(coords.len());
    for v in 0..height {
        for u in 0..width {
            let i = v * width + u;
            if let Some(d) = exact[i] {
                values[i] = d;
                continue;
            }
            dists.clear();
            dists.extend(coords.iter().enumerate().map(|(j, &(su, sv, _))| {
                let du = u as f64 - su;
                let dv = v as f64 - sv;
                ((du * du + dv * dv).sqrt(), j)
            }));
            partial_select_nearest(&mut dists, cfg.neighbors);

            let mut wsum = 0.0;
            let mut acc = 0.0;
            for &(dist, j) in dists.iter() {
                let w = 1.0 / (dist.powf(cfg.power) + IDW_EPS);
                wsum += w;
                acc += w * coords[j].2;
            }
            values[i] = real::<T>(acc / wsum);
        }
    }

    DepthMap::from_parts(width, height, values, vec![true; width * height])
}

/// Mean absolute error and root mean squared error over an explicit pixel set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepthMetrics {
    pub mae: f64,
    pub rmse: f64,
    pub evaluated_pixels: usize,
}

/// Compares a prediction against ground truth over the pixels where
/// `eval_mask` is true and the ground truth is valid. Accumulation is Kahan-
/// compensated f64 regardless of `T`, and `rmse >= mae` is enforced against
/// rounding at the boundary case where all errors are equal.
pub fn evaluate_depth<T: Real>(
    prediction: &DepthMap<T>,
    ground_truth: &DepthMap<T>,
    eval_mask: Option<&[bool]>,
) -> Result<DepthMetrics> {
    if prediction.width() != ground_truth.width() || prediction.height() != ground_truth.height() {
        return Err(Error::invalid(format!(
            "evaluate: prediction is {}x{} but ground truth is {}x{}",
            prediction.width(),
            prediction.height(),
            ground_truth.width(),
            ground_truth.height()
        )));
    }
    if let Some(mask) = eval_mask {
        if mask.len() != ground_truth.len() {
            return Err(Error::invalid(format!(
                "evaluate: mask has {} entries for {} pixels",
                mask.len(),
                ground_truth.len()
            )));
        }
    }

    let mut abs = KahanSum::new();
    let mut sq = KahanSum::new();
    let mut count = 0usize;
    for i in 0..ground_truth.len() {
        if !ground_truth.is_valid(i) || !prediction.is_valid(i) {
            continue;
        }
        if let Some(mask) = eval_mask {
            if !mask[i] {
                continue;
            }
        }
        let e = (to_f64(prediction.value(i)) - to_f64(ground_truth.value(i))).abs();
        abs.add(e);
        sq.add(e * e);
        count += 1;
    }
    if count == 0 {
        return Err(Error::invalid("evaluate: no pixels to evaluate"));
    }

    let mae = abs.sum() / count as f64;
    let rmse = (sq.sum() / count as f64).sqrt().max(mae);
    Ok(DepthMetrics {
        mae,
        rmse,
        evaluated_pixels: count,
    })
}

/// Compensated summation; the error term rescues precision when many small
/// per-pixel errors accumulate into a large total.
pub(crate) struct KahanSum {
    sum: f64,
    c: f64,
}

impl KahanSum {
    pub(crate) fn new() -> Self {
        Self { sum: 0.0, c: 0.0 }
    }

    pub(crate) fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }

    pub(crate) fn sum(&self) -> f64 {
        self.sum
    }
}

/// One (strategy, k, seed) cell of a comparison run.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub strategy: Strategy,
    pub k: usize,
    pub seed: u64,
    pub metrics: DepthMetrics,
}

/// End-to-end benchmark: noise -> sample -> complete -> evaluate, crossed
/// over both strategies, every requested `k`, and `n_seeds` replicate seeds.
///
/// The clean frame supplies ground truth and the reliability field; each
/// replicate `s` perturbs it with noise seed `base_seed + s`, then both
/// strategies draw from the same noisy frame with sampling seed
/// `base_seed + s`. Geometry-aware sampling restricts reliability support
/// to pixels that survived the noise, so both strategies face the same
/// candidate set. Rows come back sorted by (strategy, k, seed).
#[allow(clippy::too_many_arguments)]
pub fn run_comparison<T: Real>(
    ground_truth: &DepthMap<T>,
    intrinsics: &crate::camera::CameraIntrinsics<T>,
    neighborhood: &NeighborhoodConfig<T>,
    reliability_cfg: &ReliabilityConfig<T>,
    completion_cfg: &CompletionConfig,
    noise: &NoiseModel<T>,
    k_values: &[usize],
    n_seeds: u64,
    base_seed: u64,
    eval_mask: Option<&[bool]>,
) -> Result<Vec<ComparisonRow>> {
    if k_values.is_empty() {
        return Err(Error::invalid("comparison: k_values must be non-empty"));
    }
    if n_seeds == 0 {
        return Err(Error::invalid("comparison: n_seeds must be >= 1"));
    }

    let cloud = crate::camera::backproject_map(ground_truth, intrinsics)?;
    let gt_normals = crate::normals::estimate_normal_map(&cloud, neighborhood);
    let reliability = crate::reliability::reliability_map(&gt_normals, &cloud, reliability_cfg)?;

    let mut rows = Vec::with_capacity(2 * k_values.len() * n_seeds as usize);
    for s in 0..n_seeds {
        let seed = base_seed + s;
        let noise_model = NoiseModel { seed, ..*noise };
        let (noisy, _) = apply_noise(ground_truth, &gt_normals, &cloud, &noise_model);

        let mut restricted = reliability.clone();
        restricted.restrict(noisy.valid_mask())?;
        let probs = to_probabilities(&restricted)?;
        let eligible: Vec<usize> = noisy.valid_indices().collect();

        for &k in k_values {
            let geo_idx = sample_without_replacement(&probs, k, seed)?;
            let uni_idx = sample_uniform(&eligible, k, seed)?;
            for (strategy, indices) in [
                (Strategy::GeometryAware, geo_idx),
                (Strategy::Uniform, uni_idx),
            ] {
                let samples = SampleSet::from_indices(indices, &noisy)?;
                let dense = complete_idw(&samples, completion_cfg)?;
                let metrics = evaluate_depth(&dense, ground_truth, eval_mask)?;
                rows.push(ComparisonRow {
                    strategy,
                    k,
                    seed,
                    metrics,
                });
            }
        }
    }

    rows.sort_by(|a, b| {
        (a.strategy, a.k, a.seed).cmp(&(b.strategy, b.k, b.seed))
    });
    Ok(rows)
}

/// Per-(strategy, k) aggregate of a comparison: arithmetic mean MAE and RMSE
/// across seeds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonSummary {
    pub strategy: Strategy,
    pub k: usize,
    pub mean_mae: f64,
    pub mean_rmse: f64,
    pub seeds: usize,
}

pub fn summarize_comparison(rows: &[ComparisonRow]) -> Vec<ComparisonSummary> {
    let mut keys: Vec<(Strategy, usize)> = rows.iter().map(|r| (r.strategy, r.k)).collect();
    keys.sort();
    keys.dedup();
    keys.iter()
        .map(|&(strategy, k)| {
            let group: Vec<&ComparisonRow> = rows
                .iter()
                .filter(|r| r.strategy == strategy && r.k == k)
                .collect();
            let n = group.len() as f64;
            ComparisonSummary {
                strategy,
                k,
                mean_mae: group.iter().map(|r| r.metrics.mae).sum::<f64>() / n,
                mean_rmse: group.iter().map(|r| r.metrics.rmse).sum::<f64>() / n,
                seeds: group.len(),
            }
        })
        .collect()
}
