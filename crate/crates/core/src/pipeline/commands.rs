use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand_distr::{Distribution, Normal};

use super::{PipelineConfig, RunManifest};
use crate::correlation::{
    check_frames, peak_background_ratio, r_autocorrelation, true_autocorrelation,
};
use crate::error::{Error, Result};
use crate::grid::ImageGrid;
use crate::io;
use crate::metrics::{aligned_ncc, line_profile, speckle_contrast, MetricReport};
use crate::objects::fit_to_window;
use crate::optics::{broadband_psf, make_diffuser, monochromatic_speckle, PsfEngine};
use crate::retrieval::{best_of_restarts, center_by_mass, fourier_magnitude_from_ac};
use crate::seed::{SeedSpec, DIFFUSER, FRAME};

pub const MANIFEST: &str = "manifest.txt";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    TrueAc,
    RAut,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::TrueAc => "trueac",
            Method::RAut => "raut",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "trueac" => Ok(Method::TrueAc),
            "raut" => Ok(Method::RAut),
            other => Err(Error::config(
                "method",
                format!("expected trueac or raut, got `{other}`"),
            )),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Reads a raw-float image, or a PGM (pixel pitch taken from `pitch`).
pub fn read_any(path: &Path, pitch: f64) -> Result<ImageGrid> {
    if path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("pgm"))
    {
        io::read_pgm(path, pitch)
    } else {
        io::read_image(path)
    }
}

/// Expands directories to their sorted raw-float files (PGM if there are none).
pub fn list_frames(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in inputs {
        if !p.is_dir() {
            out.push(p.clone());
            continue;
        }
        let mut found: Vec<PathBuf> = std::fs::read_dir(p)
            .map_err(|e| Error::io(p, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .collect();
        found.sort();
        let with_ext = |ext: &str| -> Vec<PathBuf> {
            found
                .iter()
                .filter(|f| f.extension().is_some_and(|e| e == ext))
                .cloned()
                .collect()
        };
        let raw = with_ext(io::EXTENSION);
        out.extend(if raw.is_empty() { with_ext("pgm") } else { raw });
    }
    if out.is_empty() {
        return Err(Error::Input("no frame files given".into()));
    }
    Ok(out)
}

fn write_image(
    m: &mut RunManifest,
    root: &Path,
    stem: &str,
    img: &ImageGrid,
    preview: bool,
) -> Result<PathBuf> {
    let path = m.write_output(
        root,
        &format!("{stem}.{}", io::EXTENSION),
        &io::encode_image(img)?,
    )?;
    if preview {
        m.write_output(root, &format!("{stem}.pgm"), &io::encode_pgm(img))?;
    }
    Ok(path)
}

pub struct SimulateOutput {
    pub object: PathBuf,
    pub frames: Vec<PathBuf>,
}

/// Renders the object and writes `cfg.frames` frames, each through its own
/// diffuser screen.
pub fn simulate_into(
    cfg: &PipelineConfig,
    root: &Path,
    m: &mut RunManifest,
) -> Result<SimulateOutput> {
    cfg.validate()?;
    let n = cfg.optics.grid_size;
    let object = cfg.object.render(n, cfg.optics.pixel_pitch)?;
    let object_path = write_image(m, root, "object", &object, true)?;
    let weights = cfg.spectrum.weights()?;
    m.set("simulate.spectral_lines", weights.len());
    let seeds = SeedSpec::new(cfg.seed);
    let mut frames = Vec::with_capacity(cfg.frames);
    for i in 0..cfg.frames {
        let screen = make_diffuser(
            &cfg.optics,
            cfg.diffuser.rms_height,
            cfg.diffuser.correlation_length,
            seeds.derive(DIFFUSER, i as u64),
        )?;
        let psf = broadband_psf(&PsfEngine::new(&cfg.optics, &screen)?, &weights)?;
        m.set(format!("simulate.frame_{i:03}.psf_sum"), psf.sum());
        let mut frame = monochromatic_speckle(&object, &psf)?;
        if cfg.noise > 0.0 {
            let sigma = cfg.noise * frame.mean();
            let normal =
                Normal::new(0.0, sigma).map_err(|e| Error::config("noise.sigma", e.to_string()))?;
            let mut rng = seeds.rng(FRAME, i as u64);
            for v in frame.samples_mut() {
                *v = (*v + normal.sample(&mut rng)).max(0.0);
            }
        }
        m.set(
            format!("simulate.frame_{i:03}.contrast"),
            speckle_contrast(&frame)?,
        );
        frames.push(write_image(
            m,
            root,
            &format!("frames/frame_{i:03}"),
            &frame,
            i == 0,
        )?);
    }
    Ok(SimulateOutput {
        object: object_path,
        frames,
    })
}

fn crop_to(frame: ImageGrid, crop: usize) -> Result<ImageGrid> {
    let (w, h) = (frame.width(), frame.height());
    if w < crop || h < crop {
        return Err(Error::Dimension(format!(
            "frame {h}x{w} is smaller than crop {crop}"
        )));
    }
    if w == crop && h == crop {
        return Ok(frame);
    }
    frame.crop((h - crop) / 2, (w - crop) / 2, crop, crop)
}

/// Reads and crops frames, runs one extractor and writes `<method>.spkimg`.
pub fn extract_into(
    frame_paths: &[PathBuf],
    method: Method,
    cfg: &PipelineConfig,
    root: &Path,
    m: &mut RunManifest,
) -> Result<PathBuf> {
    cfg.validate()?;
    let frames = frame_paths
        .iter()
        .map(|p| read_any(p, cfg.optics.pixel_pitch))
        .collect::<Result<Vec<_>>>()?;
    check_frames(&frames)?;
    let frames = frames
        .into_iter()
        .map(|f| crop_to(f, cfg.crop))
        .collect::<Result<Vec<_>>>()?;
    let window = cfg.window();
    let key = |k: &str| format!("extract.{method}.{k}");
    m.set(key("frames"), frames.len());
    m.set(key("window"), window);
    let pattern = match method {
        Method::TrueAc => true_autocorrelation(&frames, window)?,
        Method::RAut => {
            let out = r_autocorrelation(&frames, &cfg.subregions())?;
            m.set(key("windows_per_frame"), cfg.windows_per_frame);
            m.set(key("windows"), out.windows);
            m.set(key("redraws"), out.redraws);
            out.pattern
        }
    };
    let pbr = peak_background_ratio(&pattern, cfg.feature_radius())?;
    m.set(
        format!("metric.{method}.peak_background_ratio"),
        pbr.value(),
    );
    write_image(m, root, method.name(), &pattern, true)
}

pub struct ReconstructOutput {
    pub image: PathBuf,
    pub fourier_residual: f64,
    pub aligned_ncc: Option<f64>,
}

/// Phase retrieval from a correlation pattern; writes `recon_<tag>.spkimg`.
pub fn reconstruct_into(
    pattern_path: &Path,
    tag: &str,
    cfg: &PipelineConfig,
    truth: Option<&Path>,
    root: &Path,
    m: &mut RunManifest,
) -> Result<ReconstructOutput> {
    cfg.validate()?;
    let pattern = io::read_image(pattern_path)?;
    if pattern.width() != pattern.height() || pattern.width() % 2 == 0 {
        return Err(Error::Dimension(format!(
            "pattern {}x{} is not an odd square window",
            pattern.height(),
            pattern.width()
        )));
    }
    let mut opts = cfg.magnitude_options();
    if pattern.width() != cfg.window() {
        opts.feature_radius = crate::retrieval::default_feature_radius(pattern.width());
    }
    let support = cfg
        .support
        .then(|| crate::retrieval::Support::for_window(pattern.width()));
    let constraint = fourier_magnitude_from_ac(&pattern, &opts)?.with_support(support);
    let truth = truth
        .map(|p| read_any(p, pattern.pitch()).and_then(|t| fit_to_window(&t, pattern.width())))
        .transpose()?;
    let summary = best_of_restarts(&constraint, &cfg.schedule, truth.as_ref(), cfg.seed)?;
    let best = summary.best();
    let image = center_by_mass(&best.image);
    let key = |k: &str| format!("reconstruct.{tag}.{k}");
    m.set(key("restarts"), summary.runs.len());
    m.set(key("selector"), cfg.schedule.selector);
    m.set(key("selected"), summary.selected);
    m.set(key("hio_iterations"), best.hio_iterations);
    m.set(key("er_iterations"), best.er_iterations);
    let mut listing = String::new();
    for (i, r) in summary.residuals().iter().enumerate() {
        m.set(key(&format!("residual.{i:03}")), r);
        let _ = writeln!(listing, "{i} {r}");
    }
    m.write_output(
        root,
        &format!("recon_{tag}_residuals.txt"),
        listing.as_bytes(),
    )?;
    m.set(
        format!("metric.{tag}.fourier_residual"),
        best.fourier_residual,
    );
    let ncc = match &truth {
        Some(t) => Some(match aligned_ncc(&image, t) {
            Ok(v) => v,
            Err(Error::Degenerate(_)) => f64::NEG_INFINITY,
            Err(e) => return Err(e),
        }),
        None => None,
    };
    if let Some(v) = ncc {
        m.set(format!("metric.{tag}.aligned_ncc"), v);
    }
    if let Some(scores) = &summary.truth_scores {
        // score of the minimum-residual run, whichever selector picked the output
        let blind = summary
            .residuals()
            .iter()
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |best, (i, &r)| if r < best.1 { (i, r) } else { best },
            )
            .0;
        m.set(format!("metric.{tag}.aligned_ncc_blind"), scores[blind]);
    }
    let path = write_image(m, root, &format!("recon_{tag}"), &image, true)?;
    Ok(ReconstructOutput {
        image: path,
        fourier_residual: best.fourier_residual,
        aligned_ncc: ncc,
    })
}

pub fn cmd_simulate(cfg: &PipelineConfig) -> Result<RunManifest> {
    let root = &cfg.output_dir;
    let mut m = RunManifest::new("simulate", cfg);
    m.stage("simulate", |m| simulate_into(cfg, root, m))?;
    m.write(&root.join(MANIFEST))?;
    Ok(m)
}

pub fn cmd_extract(
    frames: &[PathBuf],
    method: Method,
    cfg: &PipelineConfig,
) -> Result<RunManifest> {
    let root = &cfg.output_dir;
    let mut m = RunManifest::new("extract", cfg);
    let frames = list_frames(frames)?;
    m.stage("extract", |m| extract_into(&frames, method, cfg, root, m))?;
    m.write(&root.join(MANIFEST))?;
    Ok(m)
}

pub fn cmd_reconstruct(
    pattern: &Path,
    cfg: &PipelineConfig,
    truth: Option<&Path>,
) -> Result<RunManifest> {
    let root = &cfg.output_dir;
    let mut m = RunManifest::new("reconstruct", cfg);
    let tag = pattern
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("pattern")
        .to_string();
    m.stage("reconstruct", |m| {
        reconstruct_into(pattern, &tag, cfg, truth, root, m)
    })?;
    m.write(&root.join(MANIFEST))?;
    Ok(m)
}

/// Figures of merit for one image: contrast, peak-to-background ratio for odd
/// square windows, and similarity to `truth` when given.
pub fn cmd_metrics(
    image: &Path,
    cfg: &PipelineConfig,
    truth: Option<&Path>,
) -> Result<Vec<MetricReport>> {
    let img = read_any(image, cfg.optics.pixel_pitch)?;
    let mut out = Vec::new();
    let size = format!("{}x{}", img.height(), img.width());
    if img.mean() > 0.0 {
        out.push(
            MetricReport::new("speckle_contrast", speckle_contrast(&img)?).with("size", &size),
        );
    }
    if img.width() == img.height() && img.width() % 2 == 1 {
        let radius = crate::retrieval::default_feature_radius(img.width());
        let pbr = peak_background_ratio(&img, radius)?;
        out.push(
            MetricReport::new("peak_background_ratio", pbr.value()).with("feature_radius", radius),
        );
    }
    if let Some(t) = truth {
        let t = fit_to_window(&read_any(t, img.pitch())?, img.width().min(img.height()))?;
        let t = t.embed_center(img.height(), img.width())?;
        out.push(MetricReport::new("aligned_ncc", aligned_ncc(&img, &t)?).with("truth", t.width()));
    }
    Ok(out)
}

fn normalized(img: &ImageGrid) -> ImageGrid {
    let (lo, hi) = (img.min(), img.max());
    let span = if hi > lo { hi - lo } else { 1.0 };
    img.map(|v| (v - lo) / span)
}

/// Two-row panel: patterns (R-AC, true AC, truth) over their reconstructions.
fn comparison_panel(
    tiles: [[Option<&ImageGrid>; 3]; 2],
    l: usize,
    pitch: f64,
) -> Result<ImageGrid> {
    let gap = 2;
    let mut panel = ImageGrid::zeros(3 * l + 2 * gap, 2 * l + gap, pitch)?;
    for (row, tiles) in tiles.iter().enumerate() {
        for (col, tile) in tiles.iter().enumerate() {
            let Some(tile) = tile else { continue };
            let t = normalized(tile);
            for r in 0..l {
                for c in 0..l {
                    panel.set(row * (l + gap) + r, col * (l + gap) + c, t.get(r, c));
                }
            }
        }
    }
    Ok(panel)
}

fn report(
    root: &Path,
    patterns: [&Path; 2],
    recons: [&ReconstructOutput; 2],
    object: &Path,
    m: &mut RunManifest,
) -> Result<()> {
    let raut = io::read_image(patterns[1])?;
    let trueac = io::read_image(patterns[0])?;
    let l = raut.width();
    let truth = fit_to_window(&io::read_image(object)?, l)?;
    let recon_raut = io::read_image(&recons[1].image)?;
    let recon_trueac = io::read_image(&recons[0].image)?;

    let mut table = String::from("method peak_background_ratio fourier_residual aligned_ncc\n");
    for (method, rec) in [(Method::TrueAc, recons[0]), (Method::RAut, recons[1])] {
        let pbr = m
            .get(&format!("metric.{method}.peak_background_ratio"))
            .unwrap_or("nan")
            .to_string();
        let ncc = rec
            .aligned_ncc
            .map_or("nan".to_string(), |v| format!("{v:.4}"));
        let _ = writeln!(table, "{method} {pbr} {:.6} {ncc}", rec.fourier_residual);
    }
    m.write_output(root, "comparison.txt", table.as_bytes())?;

    let column = l / 2;
    let raut_col = line_profile(&normalized(&raut), column)?;
    let trueac_col = line_profile(&normalized(&trueac), column)?;
    let mut csv = String::from("row,raut,trueac\n");
    for r in 0..l {
        let _ = writeln!(csv, "{r},{},{}", raut_col[r], trueac_col[r]);
    }
    m.write_output(root, "profiles.csv", csv.as_bytes())?;

    let panel = comparison_panel(
        [
            [Some(&raut), Some(&trueac), Some(&truth)],
            [Some(&recon_raut), Some(&recon_trueac), None],
        ],
        l,
        raut.pitch(),
    )?;
    m.write_output(root, "comparison.pgm", &io::encode_pgm(&panel))?;
    Ok(())
}

/// simulate -> extract (both methods) -> reconstruct (both) -> comparison.
///
/// Every stage after simulation reads its inputs back from the files the
/// previous stage wrote.
pub fn cmd_pipeline(cfg: &PipelineConfig) -> Result<RunManifest> {
    cfg.validate()?;
    let root = cfg.output_dir.as_path();
    let mut m = RunManifest::new("pipeline", cfg);
    let sim = m.stage("simulate", |m| simulate_into(cfg, root, m))?;
    let trueac = m.stage("extract_trueac", |m| {
        extract_into(&sim.frames, Method::TrueAc, cfg, root, m)
    })?;
    let raut = m.stage("extract_raut", |m| {
        extract_into(&sim.frames, Method::RAut, cfg, root, m)
    })?;
    let truth = Some(sim.object.as_path());
    let rec_trueac = m.stage("reconstruct_trueac", |m| {
        reconstruct_into(&trueac, "trueac", cfg, truth, root, m)
    })?;
    let rec_raut = m.stage("reconstruct_raut", |m| {
        reconstruct_into(&raut, "raut", cfg, truth, root, m)
    })?;
    m.stage("report", |m| {
        report(
            root,
            [&trueac, &raut],
            [&rec_trueac, &rec_raut],
            &sim.object,
            m,
        )
    })?;
    m.write(&root.join(MANIFEST))?;
    Ok(m)
}
