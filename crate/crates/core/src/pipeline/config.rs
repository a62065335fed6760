use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::correlation::SubRegionSpec;
use crate::error::{Error, Result};
use crate::objects::ObjectSpec;
use crate::optics::{gaussian_weights, OpticsConfig, SpectralWeights};
use crate::retrieval::{default_feature_radius, HioSchedule, MagnitudeOptions, Support};

#[derive(Debug, Clone, PartialEq)]
pub struct DiffuserParams {
    pub rms_height: f64,
    pub correlation_length: f64,
}

/// Gaussian spectrum sampled on `[lo, hi]` every `step` (all in meters).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumParams {
    pub center: f64,
    pub fwhm: f64,
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl SpectrumParams {
    pub fn weights(&self) -> Result<SpectralWeights> {
        gaussian_weights(self.center, self.fwhm, self.lo, self.hi, self.step)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub optics: OpticsConfig,
    pub diffuser: DiffuserParams,
    pub spectrum: SpectrumParams,
    /// Number of frames M, each through an independent diffuser screen.
    pub frames: usize,
    pub object: ObjectSpec,
    pub window_size: usize,
    pub windows_per_frame: usize,
    pub max_redraws: usize,
    pub schedule: HioSchedule,
    pub support: bool,
    pub taper_fraction: f64,
    pub dc_interpolate: bool,
    /// `None` means `floor(0.4 * L)`.
    pub feature_radius: Option<f64>,
    /// Additive Gaussian noise, standard deviation as a fraction of the frame mean.
    pub noise: f64,
    pub seed: u64,
    pub crop: usize,
    pub output_dir: PathBuf,
}

impl Default for PipelineConfig {
    /// Desk-scale broadband preset.
    fn default() -> Self {
        Self {
            optics: OpticsConfig::default(),
            diffuser: DiffuserParams {
                rms_height: 3e-6,
                correlation_length: 250e-6,
            },
            spectrum: SpectrumParams {
                center: 632e-9,
                fwhm: 104e-9,
                lo: 500e-9,
                hi: 764e-9,
                step: 2e-9,
            },
            frames: 10,
            object: ObjectSpec::Letter {
                ch: 'F',
                height: 21,
            },
            window_size: 80,
            windows_per_frame: 10_000,
            max_redraws: 1000,
            schedule: HioSchedule::default(),
            support: false,
            taper_fraction: 0.1,
            dc_interpolate: false,
            feature_radius: None,
            noise: 0.0,
            seed: 1,
            crop: 400,
            output_dir: PathBuf::from("run"),
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: Display,
{
    value
        .parse()
        .map_err(|e| Error::config(key, format!("cannot parse `{value}`: {e}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(Error::config(
            key,
            format!("expected true or false, got `{value}`"),
        )),
    }
}

impl PipelineConfig {
    /// Parses `key = value` lines on top of the defaults. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut seen = std::collections::HashSet::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::config(
                    format!("line {}", lineno + 1),
                    format!("expected `key = value`, got `{line}`"),
                )
            })?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(Error::config(key, "given more than once"));
            }
            cfg.set(key, value)?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "optics.object_distance" => self.optics.object_distance = parse(key, v)?,
            "optics.camera_distance" => self.optics.camera_distance = parse(key, v)?,
            "optics.iris_diameter" => self.optics.iris_diameter = parse(key, v)?,
            "optics.pixel_pitch" => self.optics.pixel_pitch = parse(key, v)?,
            "optics.grid_size" => self.optics.grid_size = parse(key, v)?,
            "optics.refractive_index_minus_one" => {
                self.optics.refractive_index_minus_one = parse(key, v)?
            }
            "diffuser.rms_height" => self.diffuser.rms_height = parse(key, v)?,
            "diffuser.correlation_length" => self.diffuser.correlation_length = parse(key, v)?,
            "spectrum.center" => self.spectrum.center = parse(key, v)?,
            "spectrum.fwhm" => self.spectrum.fwhm = parse(key, v)?,
            "spectrum.lo" => self.spectrum.lo = parse(key, v)?,
            "spectrum.hi" => self.spectrum.hi = parse(key, v)?,
            "spectrum.step" => self.spectrum.step = parse(key, v)?,
            "frames" => self.frames = parse(key, v)?,
            "object" => self.object = v.parse()?,
            "subregions.window_size" => self.window_size = parse(key, v)?,
            "subregions.windows_per_frame" => self.windows_per_frame = parse(key, v)?,
            "subregions.max_redraws" => self.max_redraws = parse(key, v)?,
            "schedule.beta_start" => self.schedule.beta_start = parse(key, v)?,
            "schedule.beta_end" => self.schedule.beta_end = parse(key, v)?,
            "schedule.beta_step" => self.schedule.beta_step = parse(key, v)?,
            "schedule.iters_per_beta" => self.schedule.iters_per_beta = parse(key, v)?,
            "schedule.er_iters" => self.schedule.er_iters = parse(key, v)?,
            "schedule.restarts" => self.schedule.restarts = parse(key, v)?,
            "schedule.selector" => self.schedule.selector = v.parse()?,
            "schedule.support" => self.support = parse_bool(key, v)?,
            "magnitude.taper_fraction" => self.taper_fraction = parse(key, v)?,
            "magnitude.dc_interpolate" => self.dc_interpolate = parse_bool(key, v)?,
            "metrics.feature_radius" => {
                self.feature_radius = if v == "auto" {
                    None
                } else {
                    Some(parse(key, v)?)
                }
            }
            "noise.sigma" => self.noise = parse(key, v)?,
            "seed" => self.seed = parse(key, v)?,
            "crop" => self.crop = parse(key, v)?,
            "output_dir" => self.output_dir = PathBuf::from(v),
            _ => return Err(Error::config(key, "unknown key")),
        }
        Ok(())
    }

    /// Canonical `key = value` form; `parse(to_text())` gives back `self`.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let s = &self.schedule;
        vec![
            (
                "optics.object_distance",
                self.optics.object_distance.to_string(),
            ),
            (
                "optics.camera_distance",
                self.optics.camera_distance.to_string(),
            ),
            (
                "optics.iris_diameter",
                self.optics.iris_diameter.to_string(),
            ),
            ("optics.pixel_pitch", self.optics.pixel_pitch.to_string()),
            ("optics.grid_size", self.optics.grid_size.to_string()),
            (
                "optics.refractive_index_minus_one",
                self.optics.refractive_index_minus_one.to_string(),
            ),
            ("diffuser.rms_height", self.diffuser.rms_height.to_string()),
            (
                "diffuser.correlation_length",
                self.diffuser.correlation_length.to_string(),
            ),
            ("spectrum.center", self.spectrum.center.to_string()),
            ("spectrum.fwhm", self.spectrum.fwhm.to_string()),
            ("spectrum.lo", self.spectrum.lo.to_string()),
            ("spectrum.hi", self.spectrum.hi.to_string()),
            ("spectrum.step", self.spectrum.step.to_string()),
            ("frames", self.frames.to_string()),
            ("object", self.object.to_string()),
            ("subregions.window_size", self.window_size.to_string()),
            (
                "subregions.windows_per_frame",
                self.windows_per_frame.to_string(),
            ),
            ("subregions.max_redraws", self.max_redraws.to_string()),
            ("schedule.beta_start", s.beta_start.to_string()),
            ("schedule.beta_end", s.beta_end.to_string()),
            ("schedule.beta_step", s.beta_step.to_string()),
            ("schedule.iters_per_beta", s.iters_per_beta.to_string()),
            ("schedule.er_iters", s.er_iters.to_string()),
            ("schedule.restarts", s.restarts.to_string()),
            ("schedule.selector", s.selector.to_string()),
            ("schedule.support", self.support.to_string()),
            ("magnitude.taper_fraction", self.taper_fraction.to_string()),
            ("magnitude.dc_interpolate", self.dc_interpolate.to_string()),
            (
                "metrics.feature_radius",
                self.feature_radius
                    .map_or("auto".to_string(), |r| r.to_string()),
            ),
            ("noise.sigma", self.noise.to_string()),
            ("seed", self.seed.to_string()),
            ("crop", self.crop.to_string()),
            ("output_dir", self.output_dir.display().to_string()),
        ]
    }

    pub fn to_text(&self) -> String {
        self.entries()
            .into_iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    pub fn subregions(&self) -> SubRegionSpec {
        SubRegionSpec {
            window_size: self.window_size,
            windows_per_frame: self.windows_per_frame,
            seed: self.seed,
            max_redraws: self.max_redraws,
        }
    }

    /// Odd side of every correlation window and reconstruction.
    pub fn window(&self) -> usize {
        self.subregions().effective_window()
    }

    pub fn feature_radius(&self) -> f64 {
        self.feature_radius
            .unwrap_or_else(|| default_feature_radius(self.window()))
    }

    pub fn magnitude_options(&self) -> MagnitudeOptions {
        MagnitudeOptions {
            feature_radius: self.feature_radius(),
            taper_fraction: self.taper_fraction,
            dc_interpolate: self.dc_interpolate,
        }
    }

    pub fn support(&self) -> Option<Support> {
        self.support.then(|| Support::for_window(self.window()))
    }

    /// Checks every field; errors name the offending key.
    pub fn validate(&self) -> Result<()> {
        self.optics.validate()?;
        if !(self.diffuser.rms_height.is_finite() && self.diffuser.rms_height >= 0.0) {
            return Err(Error::config("diffuser.rms_height", "must be >= 0"));
        }
        if !(self.diffuser.correlation_length >= self.optics.pixel_pitch) {
            return Err(Error::config(
                "diffuser.correlation_length",
                format!(
                    "must be at least the pixel pitch {}",
                    self.optics.pixel_pitch
                ),
            ));
        }
        self.spectrum
            .weights()
            .map_err(|e| Error::config("spectrum", e.to_string()))?;
        if self.frames == 0 {
            return Err(Error::config("frames", "must be at least 1"));
        }
        if self.crop > self.optics.grid_size {
            return Err(Error::config(
                "crop",
                format!(
                    "{} exceeds optics.grid_size {}",
                    self.crop, self.optics.grid_size
                ),
            ));
        }
        if self.windows_per_frame == 0 {
            return Err(Error::config(
                "subregions.windows_per_frame",
                "must be at least 1",
            ));
        }
        self.subregions()
            .validate_for(self.crop, self.crop)
            .map_err(|e| Error::config("subregions.window_size", e.to_string()))?;
        self.schedule.validate()?;
        if !(0.0..0.5).contains(&self.taper_fraction) {
            return Err(Error::config(
                "magnitude.taper_fraction",
                "must be in [0, 0.5)",
            ));
        }
        let r = self.feature_radius();
        if !(r >= 0.0 && r < self.window() as f64 / 2.0) {
            return Err(Error::config(
                "metrics.feature_radius",
                format!("{r} must be below half the window ({})", self.window()),
            ));
        }
        if !(self.noise.is_finite() && self.noise >= 0.0) {
            return Err(Error::config("noise.sigma", "must be >= 0"));
        }
        Ok(())
    }
}
