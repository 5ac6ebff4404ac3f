//! Subcommand implementations: resolve flags against the config file and
//! defaults, then drive the library.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use sparsedepth::io::{self, DepthEncoding};
use sparsedepth::{
    apply_noise, backproject_map, complete_idw, estimate_normal_map, evaluate_depth, render_scene,
    run_comparison, sample_frame, CameraIntrinsicsF64, ComparisonRow, CompletionConfig,
    DepthMapF64, DepthMetrics, Error, NeighborhoodConfig, NoiseModel, Point3, ReliabilityConfig,
    Result, SampleSet, SamplerConfig, SceneKind, SceneSpec, Strategy,
};

use crate::config::{require, resolve, Cfg};
use crate::{
    Cli, Command, CompareArgs, CompleteArgs, EvalArgs, NormalsArgs, SampleArgs, SynthArgs,
};

const DEFAULT_BETA: f64 = 2.0;
const DEFAULT_WINDOW: usize = 5;
const DEFAULT_RADIUS: f64 = 0.005;
const DEFAULT_MIN_POINTS: usize = 5;
const DEFAULT_NEIGHBORS: usize = 8;
const DEFAULT_POWER: f64 = 2.0;
/// NYU Depth v2 Kinect calibration, the conventional indoor default.
const NYU_INTRINSICS: (f64, f64, f64, f64) = (518.8579, 519.4696, 325.5824, 253.7362);

pub fn run(cli: Cli) -> Result<()> {
    let cfg = Cfg::load(cli.config.as_deref())?;
    match cli.command {
        Command::Normals(a) => cmd_normals(a, &cfg),
        Command::Sample(a) => cmd_sample(a, &cfg),
        Command::Synth(a) => cmd_synth(a, &cfg),
        Command::Complete(a) => cmd_complete(a, &cfg),
        Command::Eval(a) => cmd_eval(a, &cfg),
        Command::Compare(a) => cmd_compare(a, &cfg),
    }
}

/// Comma-separated sample counts for `--k-list`.
#[derive(Debug, Clone)]
pub struct KList(pub Vec<usize>);

impl FromStr for KList {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let ks: std::result::Result<Vec<usize>, _> = s
            .split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|e| format!("`{t}`: {e}")))
            .collect();
        let ks = ks?;
        if ks.is_empty() {
            return Err("k-list must contain at least one count".into());
        }
        Ok(KList(ks))
    }
}

/// `--noise sigma0_m,angle_gain,dropout_deg`.
#[derive(Debug, Clone, Copy)]
pub struct NoiseTriple {
    pub sigma0: f64,
    pub angle_gain: f64,
    pub dropout_deg: f64,
}

impl FromStr for NoiseTriple {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [a, b, c] = parts.as_slice() else {
            return Err(format!(
                "expected sigma0,angle_gain,dropout_deg, got `{s}`"
            ));
        };
        let num = |t: &str| t.parse::<f64>().map_err(|e| format!("`{t}`: {e}"));
        Ok(NoiseTriple {
            sigma0: num(a)?,
            angle_gain: num(b)?,
            dropout_deg: num(c)?,
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub enum SceneName {
    Plane,
    Sphere,
    Corner,
}

impl FromStr for SceneName {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "plane" => Ok(SceneName::Plane),
            "sphere" => Ok(SceneName::Sphere),
            "corner" => Ok(SceneName::Corner),
            other => Err(format!(
                "unknown scene `{other}` (expected plane, sphere, or corner)"
            )),
        }
    }
}

struct GeometryFlags {
    window: usize,
    radius: f64,
    min_points: usize,
}

impl GeometryFlags {
    fn resolve(
        window: Option<usize>,
        radius: Option<f64>,
        min_points: Option<usize>,
        cfg: &Cfg,
    ) -> Result<Self> {
        Ok(Self {
            window: resolve(window, cfg, "window")?.unwrap_or(DEFAULT_WINDOW),
            radius: resolve(radius, cfg, "radius")?.unwrap_or(DEFAULT_RADIUS),
            min_points: resolve(min_points, cfg, "min-points")?.unwrap_or(DEFAULT_MIN_POINTS),
        })
    }

    fn to_config(&self) -> Result<NeighborhoodConfig<f64>> {
        NeighborhoodConfig::new(self.window, self.radius, self.min_points)
    }
}

fn resolve_encoding(scale: Option<u32>, cfg: &Cfg) -> Result<DepthEncoding> {
    match resolve(scale, cfg, "scale")? {
        Some(s) => DepthEncoding::new(s),
        None => Ok(DepthEncoding::default()),
    }
}

fn reliability_config(beta: f64, kappa_max: Option<f64>) -> Result<ReliabilityConfig<f64>> {
    match kappa_max {
        Some(km) => ReliabilityConfig::with_curvature_gate(beta, km),
        None => ReliabilityConfig::new(beta),
    }
}

fn cmd_normals(a: NormalsArgs, cfg: &Cfg) -> Result<()> {
    let depth_path = require(resolve(a.depth, cfg, "depth")?, "depth")?;
    let intr_path = require(resolve(a.intrinsics, cfg, "intrinsics")?, "intrinsics")?;
    let out = require(resolve(a.out, cfg, "out")?, "out")?;
    let geom = GeometryFlags::resolve(a.window, a.radius, a.min_points, cfg)?;
    let enc = resolve_encoding(a.scale, cfg)?;

    let depth: DepthMapF64 = io::read_depth_png(&depth_path, enc)?;
    let k: CameraIntrinsicsF64 = io::read_intrinsics(&intr_path)?;
    let cloud = backproject_map(&depth, &k)?;
    let nm = estimate_normal_map(&cloud, &geom.to_config()?);
    io::write_normals_bin(&nm, &out)?;
    if let Some(p) = resolve(a.curvature_out, cfg, "curvature-out")? {
        io::write_curvature_png(&nm, &p)?;
    }
    Ok(())
}

fn cmd_sample(a: SampleArgs, cfg: &Cfg) -> Result<()> {
    let depth_path = require(resolve(a.depth, cfg, "depth")?, "depth")?;
    let intr_path = require(resolve(a.intrinsics, cfg, "intrinsics")?, "intrinsics")?;
    let out = require(resolve(a.out, cfg, "out")?, "out")?;
    let k_count = require(resolve(a.k, cfg, "k")?, "k")?;
    let seed = require(resolve(a.seed, cfg, "seed")?, "seed")?;
    let strategy = resolve(a.strategy, cfg, "strategy")?.unwrap_or(Strategy::GeometryAware);
    let beta = resolve(a.beta, cfg, "beta")?.unwrap_or(DEFAULT_BETA);
    let kappa_max = resolve(a.kappa_max, cfg, "kappa-max")?;
    let geom = GeometryFlags::resolve(a.window, a.radius, a.min_points, cfg)?;
    let enc = resolve_encoding(a.scale, cfg)?;
    let reliability_out = resolve(a.reliability_out, cfg, "reliability-out")?;
    let samples_out = resolve(a.samples_out, cfg, "samples-out")?;

    if reliability_out.is_some() && strategy == Strategy::Uniform {
        return Err(Error::InvalidInput(
            "--reliability-out requires --strategy geometry".into(),
        ));
    }

    let depth: DepthMapF64 = io::read_depth_png(&depth_path, enc)?;
    let k: CameraIntrinsicsF64 = io::read_intrinsics(&intr_path)?;
    let frame = sample_frame(
        &depth,
        &k,
        &geom.to_config()?,
        &reliability_config(beta, kappa_max)?,
        &SamplerConfig {
            k: k_count,
            seed,
            strategy,
        },
    )?;

    if frame.uniform_fallback {
        eprintln!("warning: reliability mass is zero; weights fell back to uniform");
    }
    io::write_depth_png(&frame.sparse.map, &out, enc)?;
    if let Some(p) = reliability_out {
        let rel = frame
            .reliability
            .as_ref()
            .expect("geometry strategy always carries a reliability map");
        io::write_reliability_png(rel, &p)?;
    }
    if let Some(p) = samples_out {
        io::write_samples(&frame.samples, &p)?;
    }
    Ok(())
}

fn cmd_synth(a: SynthArgs, cfg: &Cfg) -> Result<()> {
    let scene = require(resolve(a.scene, cfg, "scene")?, "scene")?;
    let out = require(resolve(a.out, cfg, "out")?, "out")?;
    let width = resolve(a.width, cfg, "width")?.unwrap_or(640);
    let height = resolve(a.height, cfg, "height")?.unwrap_or(480);
    let fx = resolve(a.fx, cfg, "fx")?.unwrap_or(NYU_INTRINSICS.0);
    let fy = resolve(a.fy, cfg, "fy")?.unwrap_or(NYU_INTRINSICS.1);
    let cx = resolve(a.cx, cfg, "cx")?.unwrap_or(NYU_INTRINSICS.2);
    let cy = resolve(a.cy, cfg, "cy")?.unwrap_or(NYU_INTRINSICS.3);
    let distance = resolve(a.distance, cfg, "distance")?.unwrap_or(2.0);
    let enc = resolve_encoding(a.scale, cfg)?;

    let on_axis = Point3::new(0.0, 0.0, distance);
    let kind = match scene {
        SceneName::Plane => {
            let t = resolve(a.tilt, cfg, "tilt")?.unwrap_or(0.0).to_radians();
            let normal = Point3::new(0.0, t.sin(), -t.cos());
            SceneKind::Plane {
                normal,
                offset: normal.dot(on_axis),
            }
        }
        SceneName::Sphere => SceneKind::Sphere {
            center: on_axis,
            radius: resolve(a.sphere_radius, cfg, "sphere-radius")?.unwrap_or(0.5),
        },
        SceneName::Corner => {
            let t = resolve(a.corner_angle, cfg, "corner-angle")?
                .unwrap_or(45.0)
                .to_radians();
            let n1 = Point3::new(-t.sin(), 0.0, -t.cos());
            let n2 = Point3::new(t.sin(), 0.0, -t.cos());
            SceneKind::Corner {
                normal1: n1,
                offset1: n1.dot(on_axis),
                normal2: n2,
                offset2: n2.dot(on_axis),
            }
        }
    };
    let spec = SceneSpec {
        kind,
        width,
        height,
        intrinsics: CameraIntrinsicsF64::new(fx, fy, cx, cy)?,
    };
    let (clean, gt_normals) = render_scene(&spec)?;

    io::write_depth_png(&clean, &out, enc)?;
    if let Some(p) = resolve(a.intrinsics_out, cfg, "intrinsics-out")? {
        io::write_intrinsics(&spec.intrinsics, &p)?;
    }
    if let Some(p) = resolve(a.normals_out, cfg, "normals-out")? {
        io::write_normals_bin(&gt_normals, &p)?;
    }
    if let Some(noisy_out) = resolve(a.noisy_out, cfg, "noisy-out")? {
        let seed = require(resolve(a.seed, cfg, "seed")?, "seed")?;
        let sigma0 = resolve(a.sigma0, cfg, "sigma0")?.unwrap_or(0.002);
        let angle_gain = resolve(a.angle_gain, cfg, "angle-gain")?.unwrap_or(0.0);
        let dropout = resolve(a.dropout, cfg, "dropout")?.unwrap_or(90.0);
        let model = NoiseModel::new(sigma0, angle_gain, dropout.to_radians(), seed)?;
        let cloud = backproject_map(&clean, &spec.intrinsics)?;
        let (noisy, _) = apply_noise(&clean, &gt_normals, &cloud, &model);
        io::write_depth_png(&noisy, &noisy_out, enc)?;
    }
    Ok(())
}

fn cmd_complete(a: CompleteArgs, cfg: &Cfg) -> Result<()> {
    let sparse_path = require(resolve(a.sparse, cfg, "sparse")?, "sparse")?;
    let out = require(resolve(a.out, cfg, "out")?, "out")?;
    let neighbors = resolve(a.neighbors, cfg, "neighbors")?.unwrap_or(DEFAULT_NEIGHBORS);
    let power = resolve(a.power, cfg, "power")?.unwrap_or(DEFAULT_POWER);
    let enc = resolve_encoding(a.scale, cfg)?;

    let sparse: DepthMapF64 = io::read_depth_png(&sparse_path, enc)?;
    let indices: Vec<usize> = sparse.valid_indices().collect();
    let set = SampleSet::from_indices(indices, &sparse)?;
    let dense = complete_idw(&set, &CompletionConfig::new(neighbors, power)?)?;
    io::write_depth_png(&dense, &out, enc)?;
    Ok(())
}

/// Evaluation mask for `--max-depth` / `--crop`, or `None` when neither
/// restriction is requested. A pixel survives when it sits at least `crop`
/// pixels from every image edge and its ground truth does not exceed the cap.
fn eval_mask(
    gt: &DepthMapF64,
    max_depth: Option<f64>,
    crop: Option<usize>,
) -> Result<Option<Vec<bool>>> {
    if let Some(m) = max_depth {
        if !m.is_finite() || m <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "--max-depth must be positive, got {m}"
            )));
        }
    }
    if max_depth.is_none() && crop.is_none() {
        return Ok(None);
    }
    let (w, h) = (gt.width(), gt.height());
    let c = crop.unwrap_or(0);
    let mut mask = vec![true; gt.len()];
    for (i, keep) in mask.iter_mut().enumerate() {
        let (u, v) = (i % w, i / w);
        if u < c || v < c || u + c >= w || v + c >= h {
            *keep = false;
        } else if let Some(m) = max_depth {
            if gt.is_valid(i) && gt.value(i) > m {
                *keep = false;
            }
        }
    }
    Ok(Some(mask))
}

fn cmd_eval(a: EvalArgs, cfg: &Cfg) -> Result<()> {
    let pred_path = require(resolve(a.pred, cfg, "pred")?, "pred")?;
    let gt_path = require(resolve(a.gt, cfg, "gt")?, "gt")?;
    let max_depth = resolve(a.max_depth, cfg, "max-depth")?;
    let crop = resolve(a.crop, cfg, "crop")?;
    let enc = resolve_encoding(a.scale, cfg)?;

    let pred: DepthMapF64 = io::read_depth_png(&pred_path, enc)?;
    let gt: DepthMapF64 = io::read_depth_png(&gt_path, enc)?;
    let mask = eval_mask(&gt, max_depth, crop)?;
    let m = evaluate_depth(&pred, &gt, mask.as_deref())?;
    println!("mae {}", m.mae);
    println!("rmse {}", m.rmse);
    println!("evaluated_pixels {}", m.evaluated_pixels);
    Ok(())
}

fn compare_frames(dir: &PathBuf) -> Result<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::Io {
        path: dir.display().to_string(),
        source: e,
    })?;
    let mut frames: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "png"))
        .collect();
    frames.sort();
    if frames.is_empty() {
        return Err(Error::InvalidInput(format!(
            "--depth-dir {}: no .png files found",
            dir.display()
        )));
    }
    Ok(frames)
}

/// Pools per-frame rows sharing a (strategy, k, seed) cell: MAE is the
/// pixel-weighted mean, RMSE the pixel-weighted root mean square.
fn pool_rows(per_frame: Vec<Vec<ComparisonRow>>) -> Vec<ComparisonRow> {
    let mut cells: BTreeMap<(Strategy, usize, u64), (f64, f64, usize)> = BTreeMap::new();
    for rows in per_frame {
        for r in rows {
            let cell = cells.entry((r.strategy, r.k, r.seed)).or_insert((0.0, 0.0, 0));
            let n = r.metrics.evaluated_pixels as f64;
            cell.0 += r.metrics.mae * n;
            cell.1 += r.metrics.rmse * r.metrics.rmse * n;
            cell.2 += r.metrics.evaluated_pixels;
        }
    }
    cells
        .into_iter()
        .map(|((strategy, k, seed), (abs, sq, n))| {
            let mae = abs / n as f64;
            let rmse = (sq / n as f64).sqrt().max(mae);
            ComparisonRow {
                strategy,
                k,
                seed,
                metrics: DepthMetrics {
                    mae,
                    rmse,
                    evaluated_pixels: n,
                },
            }
        })
        .collect()
}

fn cmd_compare(a: CompareArgs, cfg: &Cfg) -> Result<()> {
    let gt = resolve(a.gt, cfg, "gt")?;
    let depth_dir = resolve(a.depth_dir, cfg, "depth-dir")?;
    let intr_path = require(resolve(a.intrinsics, cfg, "intrinsics")?, "intrinsics")?;
    let k_list = require(resolve(a.k_list, cfg, "k-list")?, "k-list")?.0;
    let seeds = resolve(a.seeds, cfg, "seeds")?.unwrap_or(1);
    let base_seed = require(resolve(a.base_seed, cfg, "base-seed")?, "base-seed")?;
    let noise = require(resolve(a.noise, cfg, "noise")?, "noise")?;
    let out = require(resolve(a.out, cfg, "out")?, "out")?;
    let beta = resolve(a.beta, cfg, "beta")?.unwrap_or(DEFAULT_BETA);
    let kappa_max = resolve(a.kappa_max, cfg, "kappa-max")?;
    let geom = GeometryFlags::resolve(a.window, a.radius, a.min_points, cfg)?;
    let neighbors = resolve(a.neighbors, cfg, "neighbors")?.unwrap_or(DEFAULT_NEIGHBORS);
    let power = resolve(a.power, cfg, "power")?.unwrap_or(DEFAULT_POWER);
    let max_depth = resolve(a.max_depth, cfg, "max-depth")?;
    let crop = resolve(a.crop, cfg, "crop")?;
    let enc = resolve_encoding(a.scale, cfg)?;

    let frames: Vec<PathBuf> = match (gt, depth_dir) {
        (Some(g), None) => vec![g],
        (None, Some(d)) => compare_frames(&d)?,
        _ => {
            return Err(Error::InvalidInput(
                "exactly one of --gt and --depth-dir must be given".into(),
            ))
        }
    };

    let k: CameraIntrinsicsF64 = io::read_intrinsics(&intr_path)?;
    let ncfg = geom.to_config()?;
    let rcfg = reliability_config(beta, kappa_max)?;
    let ccfg = CompletionConfig::new(neighbors, power)?;
    let model = NoiseModel::new(
        noise.sigma0,
        noise.angle_gain,
        noise.dropout_deg.to_radians(),
        base_seed,
    )?;

    let mut per_frame = Vec::with_capacity(frames.len());
    for frame in &frames {
        let depth: DepthMapF64 = io::read_depth_png(frame, enc)?;
        let mask = eval_mask(&depth, max_depth, crop)?;
        per_frame.push(run_comparison(
            &depth,
            &k,
            &ncfg,
            &rcfg,
            &ccfg,
            &model,
            &k_list,
            seeds,
            base_seed,
            mask.as_deref(),
        )?);
    }
    let rows = if per_frame.len() == 1 {
        per_frame.pop().unwrap()
    } else {
        pool_rows(per_frame)
    };
    io::write_comparison_csv(&rows, &out)?;
    Ok(())
}
