use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Simultaneous-perturbation stochastic approximation settings.
#[derive(Clone, Debug, PartialEq)]
pub struct SpsaConfig {
    /// Number of trials; one trial is one `±` evaluation pair.
    pub max_trials: usize,
    /// Step gain numerator; `None` calibrates it from a gradient probe.
    pub a: Option<f64>,
    pub c: f64,
    /// Stability offset; `None` means `0.1 · max_trials`.
    pub stability: Option<f64>,
    pub alpha: f64,
    pub gamma: f64,
    /// Size of the first parameter update targeted by the calibration.
    pub target_step: f64,
    pub seed: u64,
    /// If nonzero, the trace is smoothed with this trailing window before
    /// the best trial is picked.
    pub averaging_window: usize,
}

impl Default for SpsaConfig {
    fn default() -> Self {
        Self {
            max_trials: 150,
            a: None,
            c: 0.1,
            stability: None,
            alpha: 0.602,
            gamma: 0.101,
            target_step: 0.1,
            seed: 0,
            averaging_window: 0,
        }
    }
}

impl SpsaConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidModel(format!("SPSA: {m}")));
        if let Some(a) = self.a {
            if !(a > 0.0 && a.is_finite()) {
                return bad("a must be positive");
            }
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return bad("c must be positive");
        }
        if !(self.alpha > 0.0 && self.gamma > 0.0) {
            return bad("gain exponents must be positive");
        }
        if !(self.target_step > 0.0) {
            return bad("target step must be positive");
        }
        if self.stability.is_some_and(|s| s < 0.0) {
            return bad("stability offset must be non-negative");
        }
        Ok(())
    }

    fn stability_offset(&self) -> f64 {
        self.stability.unwrap_or(0.1 * self.max_trials as f64)
    }

    pub fn a_gain(&self, a: f64, t: usize) -> f64 {
        a / (t as f64 + 1.0 + self.stability_offset()).powf(self.alpha)
    }

    pub fn c_gain(&self, t: usize) -> f64 {
        self.c / (t as f64 + 1.0).powf(self.gamma)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpsaResult {
    pub theta: Vec<f64>,
    pub energy: f64,
    /// Mean of the `±` pair at each trial, an estimate of `f(θ_t)`.
    pub trace: Vec<f64>,
    pub evaluations: usize,
    /// Trial at which a non-finite value stopped the run.
    pub aborted_at: Option<usize>,
}

fn bernoulli(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
        .collect()
}

fn shifted(theta: &[f64], delta: &[f64], s: f64) -> Vec<f64> {
    theta.iter().zip(delta).map(|(t, d)| t + s * d).collect()
}

/// Minimizes `f` from `theta0`.
///
/// The initial gain `a` (if not given) is set so that the first update has
/// magnitude `target_step`, using the mean gradient estimate of two probe
/// pairs. Together with `f(θ0)` the probe costs five evaluations.
pub fn spsa_minimize<F>(mut f: F, theta0: &[f64], cfg: &SpsaConfig) -> Result<SpsaResult>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut evaluations = 1;
    let f0 = f(theta0)?;
    if !f0.is_finite() {
        return Err(Error::NonFiniteObjective { trial: 0 });
    }
    let mut result = SpsaResult {
        theta: theta0.to_vec(),
        energy: f0,
        trace: Vec::with_capacity(cfg.max_trials),
        evaluations,
        aborted_at: None,
    };
    if cfg.max_trials == 0 || theta0.is_empty() {
        return Ok(result);
    }
    let a = match cfg.a {
        Some(a) => a,
        None => {
            let c0 = cfg.c_gain(0);
            let mut mag = 0.0;
            for _ in 0..2 {
                let delta = bernoulli(&mut rng, theta0.len());
                let yp = f(&shifted(theta0, &delta, c0))?;
                let ym = f(&shifted(theta0, &delta, -c0))?;
                evaluations += 2;
                mag += ((yp - ym) / (2.0 * c0)).abs() / 2.0;
            }
            if mag.is_finite() && mag > 1e-12 {
                cfg.target_step * (1.0 + cfg.stability_offset()).powf(cfg.alpha) / mag
            } else {
                cfg.target_step
            }
        }
    };
    let mut theta = theta0.to_vec();
    let mut iterates = Vec::with_capacity(cfg.max_trials);
    for t in 0..cfg.max_trials {
        let (at, ct) = (cfg.a_gain(a, t), cfg.c_gain(t));
        let delta = bernoulli(&mut rng, theta.len());
        let yp = f(&shifted(&theta, &delta, ct))?;
        let ym = f(&shifted(&theta, &delta, -ct))?;
        evaluations += 2;
        if !(yp.is_finite() && ym.is_finite()) {
            result.aborted_at = Some(t);
            break;
        }
        result.trace.push(0.5 * (yp + ym));
        iterates.push(theta.clone());
        let g = (yp - ym) / (2.0 * ct);
        for (th, d) in theta.iter_mut().zip(&delta) {
            *th -= at * g * d;
        }
    }
    result.evaluations = evaluations;
    let smoothed: Vec<f64> = if cfg.averaging_window > 1 {
        (0..result.trace.len())
            .map(|i| {
                let lo = (i + 1).saturating_sub(cfg.averaging_window);
                let w = &result.trace[lo..=i];
                w.iter().sum::<f64>() / w.len() as f64
            })
            .collect()
    } else {
        result.trace.clone()
    };
    if let Some((i, &e)) = smoothed
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
    {
        if e < result.energy {
            result.energy = e;
            result.theta = if cfg.averaging_window > 1 {
                let lo = (i + 1).saturating_sub(cfg.averaging_window);
                let w = &iterates[lo..=i];
                (0..theta.len())
                    .map(|j| w.iter().map(|v| v[j]).sum::<f64>() / w.len() as f64)
                    .collect()
            } else {
                iterates[i].clone()
            };
        }
    }
    Ok(result)
}
