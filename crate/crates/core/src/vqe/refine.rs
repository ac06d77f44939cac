use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Deterministic coordinate descent with a golden-section line search per
/// parameter (with Brent's parabolic steps), followed by a line search along
/// the net move of the sweep.
/// One step is one full sweep over all parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct RefinerConfig {
    pub max_sweeps: usize,
    /// Converged once a sweep lowers the energy by less than this.
    pub energy_tol: f64,
    /// Width to which each line search shrinks its bracket.
    pub x_tol: f64,
    /// Initial half-width of the bracket around the current value.
    pub initial_step: f64,
}

impl Default for RefinerConfig {
    fn default() -> Self {
        Self {
            max_sweeps: 200,
            energy_tol: 1e-10,
            x_tol: 1e-7,
            initial_step: 0.1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RefineResult {
    pub theta: Vec<f64>,
    pub energy: f64,
    /// Sweeps performed until convergence (or the cap).
    pub sweeps: usize,
    pub converged: bool,
    pub evaluations: usize,
}

struct Counted<F> {
    f: F,
    evals: usize,
}

impl<F: FnMut(&[f64]) -> Result<f64>> Counted<F> {
    fn call(&mut self, x: &[f64]) -> Result<f64> {
        self.evals += 1;
        let v = (self.f)(x)?;
        if !v.is_finite() {
            return Err(Error::NonFiniteObjective { trial: self.evals });
        }
        Ok(v)
    }
}

/// Minimizes `t ↦ f(base + t·dir)` starting from `t = 0` with value `f0`;
/// returns the best `t` and its value.
fn line_search<F>(cf: &mut Counted<F>, base: &[f64], dir: &[f64], f0: f64, h0: f64, x_tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let mut point = base.to_vec();
    let mut eval = |cf: &mut Counted<F>, t: f64| {
        for ((p, b), d) in point.iter_mut().zip(base).zip(dir) {
            *p = b + t * d;
        }
        cf.call(&point)
    };
    // bracket a minimum: a < b < c with f(b) ≤ f(a), f(c)
    let h = h0.max(x_tol);
    let (mut a, mut b, mut fb) = (-h, 0.0, f0);
    let mut fa = eval(cf, a)?;
    let mut c = h;
    let mut fc = eval(cf, c)?;
    let mut grow = 0;
    while !(fb <= fa && fb <= fc) && grow <= 60 {
        grow += 1;
        if fa < fc {
            c = b;
            fc = fb;
            b = a;
            fb = fa;
            a = b - 2.0 * (c - b);
            fa = eval(cf, a)?;
        } else {
            a = b;
            fa = fb;
            b = c;
            fb = fc;
            c = b + 2.0 * (b - a);
            fc = eval(cf, c)?;
        }
    }
    // Brent: golden-section steps on [a, c], parabolic where they are safe
    let (mut lo, mut hi) = (a, c);
    let (mut x, mut w, mut v) = (b, b, b);
    let (mut fx, mut fw, mut fv) = (fb, fb, fb);
    let (mut d, mut e) = (0.0f64, 0.0f64);
    let tol1 = 0.25 * x_tol;
    let tol2 = 2.0 * tol1;
    for _ in 0..200 {
        let xm = 0.5 * (lo + hi);
        if (x - xm).abs() <= tol2 - 0.5 * (hi - lo) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let e_old = e;
            e = d;
            if p.abs() < (0.5 * q * e_old).abs() && p > q * (lo - x) && p < q * (hi - x) {
                d = p / q;
                let u = x + d;
                if u - lo < tol2 || hi - u < tol2 {
                    d = tol1.copysign(xm - x);
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= xm { lo - x } else { hi - x };
            d = (1.0 - INV_PHI) * e;
        }
        let u = if d.abs() >= tol1 { x + d } else { x + tol1.copysign(d) };
        let fu = eval(cf, u)?;
        if fu <= fx {
            if u >= x {
                lo = x;
            } else {
                hi = x;
            }
            (v, fv, w, fw, x, fx) = (w, fw, x, fx, u, fu);
        } else {
            if u < x {
                lo = u;
            } else {
                hi = u;
            }
            if fu <= fw || w == x {
                (v, fv, w, fw) = (w, fw, u, fu);
            } else if fu <= fv || v == x || v == w {
                (v, fv) = (u, fu);
            }
        }
    }
    let candidates = [(0.0, f0), (a, fa), (c, fc), (x, fx)];
    Ok(candidates
        .into_iter()
        .min_by(|p, q| p.1.total_cmp(&q.1))
        .expect("nonempty"))
}

pub fn refine_coordinates<F>(f: F, theta0: &[f64], cfg: &RefinerConfig) -> Result<RefineResult>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let mut cf = Counted { f, evals: 0 };
    let mut theta = theta0.to_vec();
    let mut energy = cf.call(&theta)?;
    let mut steps = vec![cfg.initial_step; theta.len()];
    let mut sweeps = 0;
    let mut converged = theta.is_empty();
    let mut unit = vec![0.0; theta.len()];
    while !converged && sweeps < cfg.max_sweeps {
        let before = energy;
        let start = theta.clone();
        for i in 0..theta.len() {
            unit[i] = 1.0;
            let (t, e) = line_search(&mut cf, &theta, &unit, energy, steps[i], cfg.x_tol)?;
            unit[i] = 0.0;
            theta[i] += t;
            energy = e;
            steps[i] = (2.0 * t.abs()).clamp(10.0 * cfg.x_tol, cfg.initial_step);
        }
        // pattern move along the net displacement of this sweep
        let dir: Vec<f64> = theta.iter().zip(&start).map(|(a, b)| a - b).collect();
        let len = dir.iter().map(|d| d * d).sum::<f64>().sqrt();
        if theta.len() > 1 && len > cfg.x_tol {
            let (t, e) = line_search(&mut cf, &theta, &dir, energy, 0.5, cfg.x_tol / len)?;
            if e < energy {
                theta.iter_mut().zip(&dir).for_each(|(x, d)| *x += t * d);
                energy = e;
            }
        }
        sweeps += 1;
        converged = before - energy < cfg.energy_tol;
    }
    Ok(RefineResult {
        theta,
        energy,
        sweeps,
        converged,
        evaluations: cf.evals,
    })
}
