//! Weighted and uniform sampling of sparse depth pixels without replacement.
//!
//! The weighted sampler uses the exponential-keys scheme: each eligible
//! index i draws an independent uniform u_i from its own keyed RNG stream
//! and receives the key ln(u_i)/w_i; the k largest keys win. The joint
//! distribution equals sequential draws without replacement with
//! probabilities proportional to the remaining weights, and because every
//! index owns its stream the result is independent of evaluation order.

use crate::camera::DepthMap;
use crate::error::{Error, Result};
use crate::reliability::ProbabilityVector;
use crate::rng::{keyed_rng, DOMAIN_SAMPLE_UNIFORM, DOMAIN_SAMPLE_WEIGHTED};
use crate::scalar::{to_f64, Real};
use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Strategy {
    GeometryAware,
    Uniform,
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Strategy::GeometryAware => write!(f, "geometry"),
            Strategy::Uniform => write!(f, "uniform"),
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "geometry" | "geometry_aware" | "geometry-aware" => Ok(Strategy::GeometryAware),
            "uniform" => Ok(Strategy::Uniform),
            other => Err(Error::invalid(format!(
                "unknown strategy '{other}' (expected geometry or uniform)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplerConfig {
    /// Number of samples to draw.
    pub k: usize,
    pub seed: u64,
    pub strategy: Strategy,
}

/// The drawn pixels: linear indices in draw order plus the source depth at
/// each one.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet<T> {
    pub width: usize,
    pub height: usize,
    pub indices: Vec<usize>,
    pub depths: Vec<T>,
}

impl<T: Real> SampleSet<T> {
    /// Attaches source depths to drawn indices. Every index must point at a
    /// valid pixel of `src`.
    pub fn from_indices(indices: Vec<usize>, src: &DepthMap<T>) -> Result<Self> {
        let mut depths = Vec::with_capacity(indices.len());
        for &i in &indices {
            if i >= src.len() || !src.is_valid(i) {
                return Err(Error::InvalidSample(i));
            }
            depths.push(src.value(i));
        }
        Ok(Self {
            width: src.width(),
            height: src.height(),
            indices,
            depths,
        })
    }

    pub fn k(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Pixel (u, v) of the j-th sample.
    pub fn pos(&self, j: usize) -> (usize, usize) {
        (self.indices[j] % self.width, self.indices[j] / self.width)
    }
}

/// Depth map that is zero except at the sampled pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseDepthMap<T> {
    pub map: DepthMap<T>,
}

impl<T: Real> SparseDepthMap<T> {
    pub fn sample_count(&self) -> usize {
        self.map.valid_count()
    }
}

fn top_k_keys(mut keyed: Vec<(f64, usize)>, k: usize) -> Vec<usize> {
    // Descending key; ties broken by ascending index.
    keyed.sort_unstable_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .expect("keys are finite")
            .then(a.1.cmp(&b.1))
    });
    keyed.truncate(k);
    keyed.into_iter().map(|(_, i)| i).collect()
}

/// Draws k distinct indices with probability proportional to the weights in
/// `pv`, without replacement. Deterministic given `seed`; indices come back
/// in draw order (largest key first).
pub fn sample_without_replacement<T: Real>(
    pv: &ProbabilityVector<T>,
    k: usize,
    seed: u64,
) -> Result<Vec<usize>> {
    if pv.indices.len() != pv.probs.len() {
        return Err(Error::invalid(
            "sample_without_replacement: indices/probs length mismatch",
        ));
    }
    let mut keyed = Vec::with_capacity(pv.indices.len());
    for (&idx, &p) in pv.indices.iter().zip(&pv.probs) {
        let w = to_f64(p);
        if !w.is_finite() || w < 0.0 {
            return Err(Error::invalid(
                "sample_without_replacement: weights must be finite and nonnegative",
            ));
        }
        if w == 0.0 {
            continue;
        }
        // OpenClosed01 keeps u away from 0 so ln(u) is finite.
        let u: f64 = keyed_rng(seed, DOMAIN_SAMPLE_WEIGHTED, idx as u64).sample(rand::distr::OpenClosed01);
        keyed.push((u.ln() / w, idx));
    }
    if k > keyed.len() {
        return Err(Error::InfeasibleK {
            requested: k,
            support: keyed.len(),
        });
    }
    Ok(top_k_keys(keyed, k))
}

/// Draws a uniform k-subset of `eligible` without replacement, via the same
/// top-k machinery with unit weights. Deterministic given `seed`.
pub fn sample_uniform(eligible: &[usize], k: usize, seed: u64) -> Result<Vec<usize>> {
    if k > eligible.len() {
        return Err(Error::InfeasibleK {
            requested: k,
            support: eligible.len(),
        });
    }
    let keyed = eligible
        .iter()
        .map(|&idx| {
            let u: f64 = keyed_rng(seed, DOMAIN_SAMPLE_UNIFORM, idx as u64).sample(rand::distr::OpenClosed01);
            (u.ln(), idx)
        })
        .collect();
    Ok(top_k_keys(keyed, k))
}

/// Materializes the sparse depth map: source depth at sampled pixels, zero
/// everywhere else.
pub fn build_sparse_depth<T: Real>(src: &DepthMap<T>, samples: &SampleSet<T>) -> Result<SparseDepthMap<T>> {
    if samples.width != src.width() || samples.height != src.height() {
        return Err(Error::invalid(format!(
            "build_sparse_depth: sample set shape {}x{} does not match source {}x{}",
            samples.width,
            samples.height,
            src.width(),
            src.height()
        )));
    }
    let mut values = vec![T::zero(); src.len()];
    let mut valid = vec![false; src.len()];
    for &i in &samples.indices {
        if i >= src.len() || !src.is_valid(i) {
            return Err(Error::InvalidSample(i));
        }
        values[i] = src.value(i);
        valid[i] = true;
    }
    Ok(SparseDepthMap {
        map: DepthMap::from_parts(src.width(), src.height(), values, valid)?,
    })
}

/// Output of the end-to-end per-frame pipeline.
#[derive(Debug, Clone)]
pub struct FrameSample<T> {
    pub sparse: SparseDepthMap<T>,
    /// Present for the geometry-aware strategy only.
    pub reliability: Option<crate::reliability::ReliabilityMap<T>>,
    pub samples: SampleSet<T>,
    /// True when the geometry-aware strategy hit a frame with zero
    /// reliability mass and fell back to uniform weights.
    pub uniform_fallback: bool,
}

/// Composes back-projection, normal estimation, reliability scoring, and
/// sampling into one call. The uniform strategy skips the geometry and
/// samples the valid-depth pixels directly.
pub fn sample_frame<T: Real>(
    depth: &DepthMap<T>,
    k: &crate::camera::CameraIntrinsics<T>,
    ncfg: &crate::normals::NeighborhoodConfig<T>,
    rcfg: &crate::reliability::ReliabilityConfig<T>,
    scfg: &SamplerConfig,
) -> Result<FrameSample<T>> {
    match scfg.strategy {
        Strategy::Uniform => {
            let eligible: Vec<usize> = depth.valid_indices().collect();
            let indices = sample_uniform(&eligible, scfg.k, scfg.seed)?;
            let samples = SampleSet::from_indices(indices, depth)?;
            let sparse = build_sparse_depth(depth, &samples)?;
            Ok(FrameSample {
                sparse,
                reliability: None,
                samples,
                uniform_fallback: false,
            })
        }
        Strategy::GeometryAware => {
            let cloud = crate::camera::backproject_map(depth, k)?;
            let nm = crate::normals::estimate_normal_map(&cloud, ncfg);
            let rel = crate::reliability::reliability_map(&nm, &cloud, rcfg)?;
            let pv = crate::reliability::to_probabilities(&rel)?;
            let indices = sample_without_replacement(&pv, scfg.k, scfg.seed)?;
            let samples = SampleSet::from_indices(indices, depth)?;
            let sparse = build_sparse_depth(depth, &samples)?;
            Ok(FrameSample {
                sparse,
                reliability: Some(rel),
                samples,
                uniform_fallback: pv.uniform_fallback,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reliability::ReliabilityMap;

    fn pv(weights: &[f64]) -> ProbabilityVector<f64> {
        let sum: f64 = weights.iter().sum();
        ProbabilityVector {
            indices: (0..weights.len()).collect(),
            probs: weights.iter().map(|w| w / sum).collect(),
            uniform_fallback: false,
        }
    }

    #[test]
    fn single_positive_weight_always_wins() {
        let v = ProbabilityVector {
            indices: vec![3, 7, 9],
            probs: vec![0.0, 1.0, 0.0],
            uniform_fallback: false,
        };
        for seed in 0..50 {
            assert_eq!(sample_without_replacement(&v, 1, seed).unwrap(), vec![7]);
        }
    }

    #[test]
    fn k_equals_n_returns_everything() {
        let v = pv(&[1.0, 2.0, 3.0, 4.0]);
        let mut got = sample_without_replacement(&v, 4, 11).unwrap();
        got.sort_unstable();
        assert_eq!(got, vec![0, 1, 2, 3]);
    }

    #[test]
    fn infeasible_k_is_an_error() {
        let v = pv(&[1.0, 1.0]);
        match sample_without_replacement(&v, 3, 0) {
            Err(Error::InfeasibleK { requested, support }) => {
                assert_eq!((requested, support), (3, 2));
            }
            other => panic!("expected InfeasibleK, got {other:?}"),
        }
        assert!(matches!(
            sample_uniform(&[1, 2], 3, 0),
            Err(Error::InfeasibleK { .. })
        ));
    }

    #[test]
    fn zero_weight_support_excluded() {
        let v = ProbabilityVector {
            indices: vec![0, 1, 2, 3],
            probs: vec![0.5, 0.0, 0.5, 0.0],
            uniform_fallback: false,
        };
        for seed in 0..100 {
            for i in sample_without_replacement(&v, 2, seed).unwrap() {
                assert!(i == 0 || i == 2);
            }
        }
    }

    #[test]
    fn draws_are_deterministic_and_distinct() {
        let v = pv(&[0.1, 0.2, 0.3, 0.15, 0.25]);
        let a = sample_without_replacement(&v, 3, 99).unwrap();
        let b = sample_without_replacement(&v, 3, 99).unwrap();
        assert_eq!(a, b);
        let mut sorted = a.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), 3);
        assert_eq!(sample_without_replacement(&v, 3, 100).unwrap().len(), 3);
    }

    #[test]
    fn uniform_inclusion_frequency() {
        let eligible: Vec<usize> = (0..10).collect();
        let mut counts = [0u32; 10];
        let draws = 100_000;
        for seed in 0..draws {
            for i in sample_uniform(&eligible, 3, seed).unwrap() {
                counts[i] += 1;
            }
        }
        for &c in &counts {
            let f = c as f64 / draws as f64;
            assert!((f - 0.3).abs() < 0.01, "inclusion frequency {f}");
        }
    }

    #[test]
    fn uniform_full_set() {
        let eligible = vec![4, 2, 9];
        let mut got = sample_uniform(&eligible, 3, 5).unwrap();
        got.sort_unstable();
        assert_eq!(got, vec![2, 4, 9]);
        assert_eq!(sample_uniform(&[8], 1, 123).unwrap(), vec![8]);
    }

    #[test]
    fn build_sparse_depth_places_source_values() {
        let d = DepthMap::from_values(4, 4, (1..=16).map(|x| x as f64 / 10.0).collect()).unwrap();
        let samples = SampleSet::from_indices(vec![0, 5, 10], &d).unwrap();
        let sp = build_sparse_depth(&d, &samples).unwrap();
        assert_eq!(sp.sample_count(), 3);
        assert_eq!(sp.map.value(0), 0.1);
        assert_eq!(sp.map.value(5), 0.6);
        assert_eq!(sp.map.value(10), 1.1);
        assert_eq!(sp.map.value(1), 0.0);
        let total: f64 = sp.map.values().iter().sum();
        assert_eq!(total, 0.1 + 0.6 + 1.1);
    }

    #[test]
    fn sample_at_invalid_pixel_rejected() {
        let d = DepthMap::from_values(2, 2, vec![1.0, 0.0, 1.0, 1.0]).unwrap();
        assert!(matches!(
            SampleSet::from_indices(vec![1], &d),
            Err(Error::InvalidSample(1))
        ));
    }

    #[test]
    fn geometry_never_selects_zero_reliability() {
        let scores = vec![0.0, 0.9, 0.0, 0.8, 0.7, 0.0];
        let rel = ReliabilityMap::from_parts(6, 1, scores, vec![true; 6]).unwrap();
        let pvec = crate::reliability::to_probabilities(&rel).unwrap();
        for seed in 0..200 {
            for i in sample_without_replacement(&pvec, 2, seed).unwrap() {
                assert!(i == 1 || i == 3 || i == 4);
            }
        }
    }

    #[test]
    fn sample_frame_uniform_counts() {
        let d = DepthMap::from_values(10, 10, vec![2.0; 100]).unwrap();
        let k = crate::camera::CameraIntrinsics::new(50.0, 50.0, 4.5, 4.5).unwrap();
        let out = sample_frame(
            &d,
            &k,
            &crate::normals::NeighborhoodConfig::default(),
            &crate::reliability::ReliabilityConfig::default(),
            &SamplerConfig {
                k: 17,
                seed: 3,
                strategy: Strategy::Uniform,
            },
        )
        .unwrap();
        assert_eq!(out.sparse.sample_count(), 17);
        assert_eq!(out.samples.k(), 17);
        assert!(out.reliability.is_none());
    }

    #[test]
    fn sample_frame_geometry_on_flat_plane() {
        let d = DepthMap::from_values(16, 16, vec![1.0; 256]).unwrap();
        let k = crate::camera::CameraIntrinsics::new(80.0, 80.0, 7.5, 7.5).unwrap();
        let out = sample_frame(
            &d,
            &k,
            &crate::normals::NeighborhoodConfig::new(5, 0.5, 5).unwrap(),
            &crate::reliability::ReliabilityConfig::default(),
            &SamplerConfig {
                k: 40,
                seed: 8,
                strategy: Strategy::GeometryAware,
            },
        )
        .unwrap();
        assert_eq!(out.sparse.sample_count(), 40);
        assert!(out.reliability.is_some());
        assert!(!out.uniform_fallback);
        // Sampled pixels carry the source depth exactly.
        for (&i, &dep) in out.samples.indices.iter().zip(&out.samples.depths) {
            assert_eq!(dep, 1.0);
            assert_eq!(out.sparse.map.value(i), 1.0);
        }
    }

    #[test]
    fn strategy_parsing_and_display() {
        assert_eq!("geometry".parse::<Strategy>().unwrap(), Strategy::GeometryAware);
        assert_eq!("geometry_aware".parse::<Strategy>().unwrap(), Strategy::GeometryAware);
        assert_eq!("uniform".parse::<Strategy>().unwrap(), Strategy::Uniform);
        assert!("best".parse::<Strategy>().is_err());
        assert_eq!(Strategy::GeometryAware.to_string(), "geometry");
        assert_eq!(Strategy::Uniform.to_string(), "uniform");
    }
}
