//! Time evolution, two-point correlations, exponential fits and eigenmode
//! contributions to correlations.

use std::fmt::Write as _;

use faer::{c64, Col, ColRef, Mat};
use serde::{Deserialize, Serialize};

use crate::liouvillian::{self, LiouvillianSpectrum, Superoperator};
use crate::operators::{single_atom_op, Operator, SpinOpKind};
use crate::{Error, Result};

/// All atoms in |g>.
pub fn ground_state(atoms: usize) -> Operator {
    let d = 1usize << atoms;
    let mut rho = Mat::<c64>::zeros(d, d);
    rho[(d - 1, d - 1)] = c64::new(1.0, 0.0);
    rho
}

/// All atoms in |e>.
pub fn excited_state(atoms: usize) -> Operator {
    let d = 1usize << atoms;
    let mut rho = Mat::<c64>::zeros(d, d);
    rho[(0, 0)] = c64::new(1.0, 0.0);
    rho
}

pub fn linear_grid(t0: f64, t1: f64, samples: usize) -> Vec<f64> {
    match samples {
        0 => Vec::new(),
        1 => vec![t0],
        _ => (0..samples).map(|k| t0 + (t1 - t0) * k as f64 / (samples - 1) as f64).collect(),
    }
}

pub fn log_grid(t0: f64, t1: f64, samples: usize) -> Vec<f64> {
    let (a, b) = (t0.ln(), t1.ln());
    linear_grid(a, b, samples).into_iter().map(f64::exp).collect()
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Operator>,
}

pub fn propagate_spectral(spec: &LiouvillianSpectrum, rho0: &Operator, times: &[f64]) -> Result<Trajectory> {
    let c = liouvillian::decompose_initial(spec, rho0)?;
    let n = c.len();
    let mut states = Vec::with_capacity(times.len());
    for &t in times {
        let w = Col::from_fn(n, |i| c[i] * (spec.eigenvalues[i] * t).exp());
        let v = &spec.right * &w;
        states.push(liouvillian::unvectorize(v.as_ref()));
    }
    Ok(Trajectory { times: times.to_vec(), states })
}

/// Local error tolerance of the adaptive integrator.
pub const ODE_TOL: f64 = 1e-9;

// Dormand-Prince 5(4) tableau; the system is autonomous so the nodes are not needed
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn axpy(y: &mut Col<c64>, a: f64, x: ColRef<'_, c64>) {
    for i in 0..y.nrows() {
        y[i] += x[i] * a;
    }
}

/// Direct adaptive integration of `d vec(rho)/dt = L vec(rho)`.
pub fn propagate_ode(l: &Superoperator, rho0: &Operator, times: &[f64]) -> Result<Trajectory> {
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParams("time grid must be strictly increasing".into()));
    }
    let m = &l.matrix;
    let n = m.nrows();
    let mut y = liouvillian::vectorize(rho0);
    let mut t = times.first().copied().unwrap_or(0.0).min(0.0);
    let scale_rate = (l.norm() / (n as f64).sqrt()).max(1e-3);
    let mut h = 0.1 / scale_rate;
    let mut states = Vec::with_capacity(times.len());
    let mut k: Vec<Col<c64>> = Vec::with_capacity(7);
    for &target in times {
        while t < target {
            let step = h.min(target - t);
            if step < 1e-14 * t.abs().max(1.0) && t + step < target {
                return Err(Error::StepUnderflow { t, h: step });
            }
            k.clear();
            for s in 0..7 {
                let mut ys = y.clone();
                for (r, kr) in k.iter().enumerate() {
                    if A[s][r] != 0.0 {
                        axpy(&mut ys, step * A[s][r], kr.as_ref());
                    }
                }
                k.push(m * &ys);
            }
            let mut y5 = y.clone();
            let mut err = 0.0f64;
            for i in 0..n {
                let mut d5 = c64::new(0.0, 0.0);
                let mut d4 = c64::new(0.0, 0.0);
                for s in 0..7 {
                    d5 += k[s][i] * B5[s];
                    d4 += k[s][i] * B4[s];
                }
                y5[i] += d5 * step;
                let sc = ODE_TOL * (1.0 + y[i].norm().max(y5[i].norm()));
                err = err.max(((d5 - d4) * step).norm() / sc);
            }
            if err <= 1.0 {
                t += step;
                y = y5;
                let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                // keep a step that was only shortened to land on the output time
                h = (step * fac).max(h.min(step * 5.0));
            } else {
                let fac = if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.1, 0.9) } else { 0.1 };
                h = step * fac;
                if h < 1e-14 * t.abs().max(1.0) {
                    return Err(Error::StepUnderflow { t, h });
                }
            }
        }
        states.push(liouvillian::unvectorize(y.as_ref()));
    }
    Ok(Trajectory { times: times.to_vec(), states })
}

#[derive(Clone, Debug)]
pub struct TimeTrace {
    pub times: Vec<f64>,
    /// 1-based atom pairs `(n, m)` for `<sigma_n^+ sigma_m^->`.
    pub pairs: Vec<(usize, usize)>,
    /// `values[p][k]`: pair `p` at time `k`.
    pub values: Vec<Vec<c64>>,
}

/// `<sigma_n^+ sigma_m^->` as an operator.
pub fn pair_operator(n: usize, m: usize, atoms: usize) -> Result<Operator> {
    Ok(single_atom_op(n, SpinOpKind::Raise, atoms)? * single_atom_op(m, SpinOpKind::Lower, atoms)?)
}

/// `tr(O rho)` for a sparse `O` given by its nonzero entries.
fn expectation(entries: &[(usize, usize, c64)], rho: &Operator) -> c64 {
    entries.iter().map(|&(i, j, o)| o * rho[(j, i)]).sum()
}

fn nonzeros(op: &Operator) -> Vec<(usize, usize, c64)> {
    let mut out = Vec::new();
    for j in 0..op.ncols() {
        for i in 0..op.nrows() {
            if op[(i, j)] != c64::new(0.0, 0.0) {
                out.push((i, j, op[(i, j)]));
            }
        }
    }
    out
}

pub fn correlations(traj: &Trajectory, pairs: &[(usize, usize)]) -> Result<TimeTrace> {
    let d = traj.states.first().map(|s| s.nrows()).unwrap_or(1);
    let atoms = d.trailing_zeros() as usize;
    let mut values = Vec::with_capacity(pairs.len());
    for &(n, m) in pairs {
        let entries = nonzeros(&pair_operator(n, m, atoms)?);
        values.push(traj.states.iter().map(|rho| expectation(&entries, rho)).collect());
    }
    Ok(TimeTrace { times: traj.times.clone(), pairs: pairs.to_vec(), values })
}

impl TimeTrace {
    /// Magnitudes of pair `p`.
    pub fn magnitudes(&self, p: usize) -> Vec<f64> {
        self.values[p].iter().map(|v| v.norm()).collect()
    }

    /// CSV with header `t,re_n_m,im_n_m,...`, 12 significant digits.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t");
        for (n, m) in &self.pairs {
            let _ = write!(s, ",re_{n}_{m},im_{n}_{m}");
        }
        s.push('\n');
        for (k, t) in self.times.iter().enumerate() {
            let _ = write!(s, "{t:.11e}");
            for series in &self.values {
                let v = series[k];
                let _ = write!(s, ",{:.11e},{:.11e}", v.re, v.im);
            }
            s.push('\n');
        }
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum FitMethod {
    /// Levenberg-Marquardt on `A exp(-B t)` against `|value|`, seeded by the log-linear fit.
    #[default]
    Nonlinear,
    /// Straight line through `ln|value|`.
    LogLinear,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitWindow {
    pub t_min: f64,
    pub t_max: f64,
}

impl Default for FitWindow {
    fn default() -> Self {
        FitWindow { t_min: 20.0, t_max: 500.0 }
    }
}

/// Samples used when a trace is generated specifically for fitting.
pub const DEFAULT_FIT_SAMPLES: usize = 500;
pub const MIN_FIT_SAMPLES: usize = 10;

#[derive(Clone, Debug, Serialize)]
pub struct ExpFit {
    pub amplitude: f64,
    pub rate: f64,
    pub window: (f64, f64),
    /// RMS of `A exp(-B t) - y` over the fitted samples.
    pub residual_rms: f64,
    pub samples: usize,
    pub method: FitMethod,
    pub envelope: bool,
}

fn log_linear(t: &[f64], y: &[f64]) -> (f64, f64) {
    let n = t.len() as f64;
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mt = t.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = t.iter().zip(&ly).map(|(a, b)| (a - mt) * (b - my)).sum();
    let sxx: f64 = t.iter().map(|a| (a - mt) * (a - mt)).sum();
    let slope = sxy / sxx;
    ((my - slope * mt).exp(), -slope)
}

fn sse(t: &[f64], y: &[f64], a: f64, b: f64) -> f64 {
    t.iter().zip(y).map(|(ti, yi)| (a * (-b * ti).exp() - yi).powi(2)).sum()
}

fn levenberg_marquardt(t: &[f64], y: &[f64], a0: f64, b0: f64) -> (f64, f64) {
    // parametrize A = exp(p) so the amplitude stays positive
    let (mut p, mut b) = (a0.ln(), b0);
    let mut lambda = 1e-3;
    let mut cost = sse(t, y, p.exp(), b);
    for _ in 0..500 {
        let (mut g0, mut g1, mut h00, mut h01, mut h11) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (ti, yi) in t.iter().zip(y) {
            let f = (p - b * ti).exp();
            let r = f - yi;
            let (j0, j1) = (f, -ti * f);
            g0 += j0 * r;
            g1 += j1 * r;
            h00 += j0 * j0;
            h01 += j0 * j1;
            h11 += j1 * j1;
        }
        let mut improved = false;
        for _ in 0..30 {
            let (a00, a11) = (h00 * (1.0 + lambda), h11 * (1.0 + lambda));
            let det = a00 * a11 - h01 * h01;
            if det == 0.0 || !det.is_finite() {
                lambda *= 10.0;
                continue;
            }
            let dp = -(a11 * g0 - h01 * g1) / det;
            let db = -(a00 * g1 - h01 * g0) / det;
            let c = sse(t, y, (p + dp).exp(), b + db);
            if c < cost {
                let rel = (cost - c) / cost.max(f64::MIN_POSITIVE);
                p += dp;
                b += db;
                cost = c;
                lambda = (lambda / 10.0).max(1e-12);
                improved = rel > 1e-15;
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    (p.exp(), b)
}

/// Indices of local maxima of `y` (interior points not smaller than both neighbours).
pub fn local_maxima(y: &[f64]) -> Vec<usize> {
    (1..y.len().saturating_sub(1)).filter(|&k| y[k] >= y[k - 1] && y[k] >= y[k + 1]).collect()
}

/// Fit `A exp(-B t)` to `magnitudes` on `window`. With `envelope`, only local
/// maxima are used, which follows the decay of an oscillating trace.
pub fn fit_exponential(
    times: &[f64],
    magnitudes: &[f64],
    window: FitWindow,
    method: FitMethod,
    envelope: bool,
) -> Result<ExpFit> {
    let mut idx: Vec<usize> = (0..times.len())
        .filter(|&k| times[k] >= window.t_min && times[k] <= window.t_max)
        .collect();
    if envelope {
        let sub: Vec<f64> = idx.iter().map(|&k| magnitudes[k]).collect();
        idx = local_maxima(&sub).into_iter().map(|k| idx[k]).collect();
    }
    if idx.len() < MIN_FIT_SAMPLES {
        return Err(Error::Fit(format!(
            "window [{}, {}] holds {} samples, need at least {MIN_FIT_SAMPLES}",
            window.t_min,
            window.t_max,
            idx.len()
        )));
    }
    let t: Vec<f64> = idx.iter().map(|&k| times[k]).collect();
    let y: Vec<f64> = idx.iter().map(|&k| magnitudes[k]).collect();
    if let Some(bad) = y.iter().find(|v| !(**v > 0.0)) {
        return Err(Error::Fit(format!("non-positive magnitude {bad} in window")));
    }
    let (a0, b0) = log_linear(&t, &y);
    let (a, b) = match method {
        FitMethod::LogLinear => (a0, b0),
        FitMethod::Nonlinear => levenberg_marquardt(&t, &y, a0, b0),
    };
    let residual_rms = (sse(&t, &y, a, b) / t.len() as f64).sqrt();
    Ok(ExpFit {
        amplitude: a,
        rate: b,
        window: (window.t_min, window.t_max),
        residual_rms,
        samples: t.len(),
        method,
        envelope,
    })
}

/// `|tr(sigma_n^+ sigma_m^- rho_i)|` for the first `k` eigenmodes.
#[derive(Clone, Debug, Serialize)]
pub struct ContributionTable {
    pub pairs: Vec<(usize, usize)>,
    /// Eigenvalues of the tabulated modes as `[re, im]`.
    pub eigenvalues: Vec<[f64; 2]>,
    /// `values[p][i]` for pair `p`, mode `i`.
    pub values: Vec<Vec<f64>>,
}

/// Mode 0 is the steady state (unit trace); the others are Frobenius-normalized.
pub fn eigenvector_observables(spec: &LiouvillianSpectrum, pairs: &[(usize, usize)], k: usize) -> Result<ContributionTable> {
    let k = k.min(spec.len());
    let mut values = Vec::with_capacity(pairs.len());
    for &(n, m) in pairs {
        let entries = nonzeros(&pair_operator(n, m, spec.atoms)?);
        values.push((0..k).map(|i| expectation(&entries, &spec.eigenmatrix(i)).norm()).collect());
    }
    let eigenvalues = spec.eigenvalues[..k].iter().map(|l| [l.re, l.im]).collect();
    Ok(ContributionTable { pairs: pairs.to_vec(), eigenvalues, values })
}

impl ContributionTable {
    /// Nonstationary mode with the largest contribution to pair `p`.
    pub fn dominant_mode(&self, p: usize) -> Option<usize> {
        let row = &self.values[p];
        (1..row.len()).max_by(|&a, &b| row[a].total_cmp(&row[b]))
    }

    /// Slowest nonstationary mode whose contribution to pair `p` exceeds
    /// `fraction` of that pair's largest nonstationary contribution.
    pub fn slowest_significant_mode(&self, p: usize, fraction: f64) -> Option<usize> {
        let row = &self.values[p];
        let top = self.dominant_mode(p).map(|i| row[i])?;
        (1..row.len())
            .filter(|&i| row[i] > fraction * top)
            .min_by(|&a, &b| (-self.eigenvalues[a][0]).total_cmp(&(-self.eigenvalues[b][0])))
    }
}
