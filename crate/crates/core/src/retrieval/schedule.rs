use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use super::{MagnitudeConstraint, Projector};
use crate::error::{Error, Result};
use crate::grid::ImageGrid;
use crate::metrics::aligned_ncc;
use crate::seed::{SeedSpec, RESTART};

/// How the final reconstruction is picked among restarts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selector {
    /// Smallest Fourier residual; needs no ground truth.
    Blind,
    /// Highest alignment-invariant similarity to a known object.
    Oracle,
}

impl std::str::FromStr for Selector {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "blind" => Ok(Selector::Blind),
            "oracle" => Ok(Selector::Oracle),
            other => Err(Error::config(
                "schedule.selector",
                format!("unknown selector `{other}`"),
            )),
        }
    }
}

impl std::fmt::Display for Selector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Selector::Blind => "blind",
            Selector::Oracle => "oracle",
        })
    }
}

/// HIO/ER iteration plan: `iters_per_beta` HIO steps at each beta from
/// `beta_start` down to `beta_end` in `beta_step` decrements, then `er_iters`
/// ER steps. Defaults give 51 x 100 = 5100 HIO + 100 ER.
#[derive(Debug, Clone, PartialEq)]
pub struct HioSchedule {
    pub beta_start: f64,
    pub beta_end: f64,
    pub beta_step: f64,
    pub iters_per_beta: usize,
    pub er_iters: usize,
    pub restarts: usize,
    pub selector: Selector,
}

impl Default for HioSchedule {
    fn default() -> Self {
        Self {
            beta_start: 2.0,
            beta_end: 0.0,
            beta_step: 0.04,
            iters_per_beta: 100,
            er_iters: 100,
            restarts: 50,
            selector: Selector::Blind,
        }
    }
}

impl HioSchedule {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta_start > self.beta_end && self.beta_end >= 0.0) {
            return Err(Error::config(
                "schedule.beta_start",
                format!(
                    "need beta_start > beta_end >= 0, got {} and {}",
                    self.beta_start, self.beta_end
                ),
            ));
        }
        if !(self.beta_step > 0.0) {
            return Err(Error::config("schedule.beta_step", "must be positive"));
        }
        let steps = (self.beta_start - self.beta_end) / self.beta_step;
        if (steps - steps.round()).abs() > 1e-9 {
            return Err(Error::config(
                "schedule.beta_step",
                format!(
                    "({} - {}) / {} is not an integer",
                    self.beta_start, self.beta_end, self.beta_step
                ),
            ));
        }
        if self.restarts == 0 {
            return Err(Error::config("schedule.restarts", "must be at least 1"));
        }
        Ok(())
    }

    /// Beta values from start to end inclusive.
    pub fn betas(&self) -> Vec<f64> {
        let count = ((self.beta_start - self.beta_end) / self.beta_step).round() as usize + 1;
        (0..count)
            .map(|k| (self.beta_start - k as f64 * self.beta_step).max(self.beta_end))
            .collect()
    }

    pub fn total_hio_iterations(&self) -> usize {
        self.betas().len() * self.iters_per_beta
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionResult {
    pub image: ImageGrid,
    /// `|| |FFT(image)| - M || / ||M||` of the final image.
    pub fourier_residual: f64,
    pub restart_index: usize,
    pub selected: bool,
    pub hio_iterations: usize,
    pub er_iterations: usize,
    /// Residual of the iterate after each ER step.
    pub er_residuals: Vec<f64>,
}

/// One full HIO -> ER run from a uniform random start.
pub fn run_schedule(
    c: &MagnitudeConstraint,
    sched: &HioSchedule,
    seed: u64,
) -> Result<ReconstructionResult> {
    sched.validate()?;
    let (w, h) = (c.width(), c.height());
    let n = w * h;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut g: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let mut next = vec![0.0; n];
    let mut proj = Projector::new(c);
    let mut iteration = 0;
    let check = |v: &[f64], iteration: usize| -> Result<()> {
        if v.iter().any(|x| !x.is_finite()) {
            Err(Error::Numerical { iteration })
        } else {
            Ok(())
        }
    };

    let mut hio_iterations = 0;
    for beta in sched.betas() {
        for _ in 0..sched.iters_per_beta {
            proj.hio(&g, &g, beta, &mut next);
            std::mem::swap(&mut g, &mut next);
            iteration += 1;
            hio_iterations += 1;
            check(&g, iteration)?;
        }
    }
    let mut er_residuals = Vec::with_capacity(sched.er_iters);
    for _ in 0..sched.er_iters {
        proj.er(&g, &mut next);
        std::mem::swap(&mut g, &mut next);
        iteration += 1;
        check(&g, iteration)?;
        er_residuals.push(proj.residual(&g));
    }
    let fourier_residual = match er_residuals.last() {
        Some(&r) => r,
        None => proj.residual(&g),
    };
    Ok(ReconstructionResult {
        image: ImageGrid::new(w, h, c.magnitude.pitch(), g)?,
        fourier_residual,
        restart_index: 0,
        selected: false,
        hio_iterations,
        er_iterations: er_residuals.len(),
        er_residuals,
    })
}

/// All restarts plus the index picked by the selector.
#[derive(Debug, Clone)]
pub struct RestartSummary {
    pub runs: Vec<ReconstructionResult>,
    pub selected: usize,
    /// Similarity to the truth for each run, when a truth image was supplied.
    pub truth_scores: Option<Vec<f64>>,
}

impl RestartSummary {
    pub fn best(&self) -> &ReconstructionResult {
        &self.runs[self.selected]
    }

    pub fn residuals(&self) -> Vec<f64> {
        self.runs.iter().map(|r| r.fourier_residual).collect()
    }
}

/// Runs `sched.restarts` independent schedules (seeds derived per restart
/// index from `seed`) and selects one.
pub fn best_of_restarts(
    c: &MagnitudeConstraint,
    sched: &HioSchedule,
    truth: Option<&ImageGrid>,
    seed: u64,
) -> Result<RestartSummary> {
    sched.validate()?;
    if sched.selector == Selector::Oracle && truth.is_none() {
        return Err(Error::config(
            "schedule.selector",
            "oracle selection requires a truth image",
        ));
    }
    let seeds = SeedSpec::new(seed);
    let mut runs = (0..sched.restarts)
        .into_par_iter()
        .map(|i| {
            let mut r = run_schedule(c, sched, seeds.derive(RESTART, i as u64))?;
            r.restart_index = i;
            Ok(r)
        })
        .collect::<Result<Vec<_>>>()?;
    let truth_scores = truth
        .map(|t| {
            runs.iter()
                .map(|r| match aligned_ncc(&r.image, t) {
                    Ok(v) => Ok(v),
                    Err(Error::Degenerate(_)) => Ok(f64::NEG_INFINITY),
                    Err(e) => Err(e),
                })
                .collect::<Result<Vec<f64>>>()
        })
        .transpose()?;
    // first index wins ties
    let selected = match sched.selector {
        Selector::Blind => argbest(runs.iter().map(|r| -r.fourier_residual)),
        Selector::Oracle => argbest(
            truth_scores
                .as_ref()
                .expect("checked above")
                .iter()
                .copied(),
        ),
    };
    runs[selected].selected = true;
    Ok(RestartSummary {
        runs,
        selected,
        truth_scores,
    })
}

fn argbest(values: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, v) in values.enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best.0
}

/// Circularly shifts `img` so its intensity centroid (circular mean) sits at
/// the center pixel. Purely cosmetic: phase retrieval fixes position only up
/// to translation.
pub fn center_by_mass(img: &ImageGrid) -> ImageGrid {
    let (w, h) = (img.width(), img.height());
    let circular_mean = |n: usize, weight: &dyn Fn(usize) -> f64| {
        let (mut s, mut c) = (0.0, 0.0);
        for i in 0..n {
            let a = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            let wgt = weight(i);
            s += wgt * a.sin();
            c += wgt * a.cos();
        }
        let ang = s.atan2(c).rem_euclid(2.0 * std::f64::consts::PI);
        (ang / (2.0 * std::f64::consts::PI) * n as f64).round() as isize
    };
    let row_w = |r: usize| img.row(r).iter().map(|v| v.max(0.0)).sum::<f64>();
    let col_w = |c: usize| (0..h).map(|r| img.get(r, c).max(0.0)).sum::<f64>();
    let cr = circular_mean(h, &row_w);
    let cc = circular_mean(w, &col_w);
    img.roll((h / 2) as isize - cr, (w / 2) as isize - cc)
}
