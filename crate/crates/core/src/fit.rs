//! Fits complex exponentials to mode amplitude histories.
//!
//! A single decaying mode is fitted by log-linear least squares. Several
//! coupled modes are fitted jointly with least-squares linear prediction
//! over all supplied series (Prony-type): the prediction polynomial's roots
//! are the per-step multipliers, their logarithms the complex frequencies.

use crate::error::{Error, Result};
use crate::linalg::solve_complex;
use num_complex::Complex64;

/// Condition-estimate threshold above which a fit is rejected instead of
/// silently returned.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Result of an exponential fit, frequencies in per-step units.
#[derive(Clone, Debug)]
pub struct ExpFit {
    /// One complex frequency per mode, sorted by imaginary part.
    pub frequencies: Vec<Complex64>,
    /// Complex amplitude of each mode in each input series.
    pub amplitudes: Vec<Vec<Complex64>>,
    /// Relative root-mean-square reconstruction error.
    pub residual: f64,
    /// Pivot-ratio condition estimate of the prediction solve.
    pub condition: f64,
}

/// Fits `mode_count` complex exponentials jointly to the given series
/// (all series share the frequencies, amplitudes differ).
pub fn fit_frequencies(series: &[&[Complex64]], mode_count: usize) -> Result<ExpFit> {
    let len = series.first().map_or(0, |s| s.len());
    if series.is_empty() || mode_count == 0 {
        return Err(Error::SeriesTooShort { len: 0, needed: 1 });
    }
    if series.iter().any(|s| s.len() != len) {
        return Err(Error::InvalidExperiment(
            "all series must have the same length".into(),
        ));
    }
    let needed = 4 * mode_count + 4;
    if len < needed {
        return Err(Error::SeriesTooShort { len, needed });
    }
    if mode_count == 1 && series.len() == 1 {
        return log_linear(series[0]);
    }
    prony_least_squares(series, mode_count)
}

fn log_linear(s: &[Complex64]) -> Result<ExpFit> {
    if s.iter().any(|v| v.norm() == 0.0) {
        return Err(Error::InvalidExperiment(
            "zero sample in single-mode series".into(),
        ));
    }
    // unwrap the phase so the imaginary slope is well defined
    let mut phase = s[0].arg();
    let mut ys = Vec::with_capacity(s.len());
    ys.push(Complex64::new(s[0].norm().ln(), phase));
    for t in 1..s.len() {
        phase += (s[t] / s[t - 1]).arg();
        ys.push(Complex64::new(s[t].norm().ln(), phase));
    }
    let n = s.len() as f64;
    let tbar = (n - 1.0) / 2.0;
    let mut sxx = 0.0;
    let mut sxy = Complex64::new(0.0, 0.0);
    let mut ybar = Complex64::new(0.0, 0.0);
    for y in &ys {
        ybar += y;
    }
    ybar /= n;
    for (t, y) in ys.iter().enumerate() {
        let dt = t as f64 - tbar;
        sxx += dt * dt;
        sxy += (y - ybar) * dt;
    }
    let omega = sxy / sxx;
    let intercept = ybar - omega * tbar;
    let amp = intercept.exp();
    let mut err = 0.0;
    let mut norm = 0.0;
    for (t, v) in s.iter().enumerate() {
        let model = amp * (omega * t as f64).exp();
        err += (model - v).norm_sqr();
        norm += v.norm_sqr();
    }
    Ok(ExpFit {
        frequencies: vec![omega],
        amplitudes: vec![vec![amp]],
        residual: (err / norm).sqrt(),
        condition: 1.0,
    })
}

fn prony_least_squares(series: &[&[Complex64]], p: usize) -> Result<ExpFit> {
    // joint linear prediction: s[t+p] = Σ_j c_j s[t+p-1-j]
    let mut m = vec![vec![Complex64::new(0.0, 0.0); p]; p];
    let mut rhs = vec![Complex64::new(0.0, 0.0); p];
    for s in series {
        for t in 0..s.len() - p {
            for j in 0..p {
                let xj = s[t + p - 1 - j].conj();
                rhs[j] += xj * s[t + p];
                for k in 0..p {
                    m[j][k] += xj * s[t + p - 1 - k];
                }
            }
        }
    }
    let (coeffs, condition) =
        solve_complex(m, rhs).ok_or(Error::IllConditionedFit { condition: f64::INFINITY })?;
    if condition > CONDITION_LIMIT {
        return Err(Error::IllConditionedFit { condition });
    }

    // z^p - c_0 z^{p-1} - ... - c_{p-1} = 0
    let mut monic = vec![Complex64::new(0.0, 0.0); p + 1];
    monic[p] = Complex64::new(1.0, 0.0);
    for (j, c) in coeffs.iter().enumerate() {
        monic[p - 1 - j] = -c;
    }
    let roots = durand_kerner(&monic);
    let mut frequencies: Vec<Complex64> = Vec::with_capacity(p);
    for z in &roots {
        if z.norm() == 0.0 {
            return Err(Error::IllConditionedFit { condition });
        }
        frequencies.push(z.ln());
    }

    // amplitudes per series by Vandermonde least squares
    let len = series[0].len();
    let mut powers = vec![vec![Complex64::new(1.0, 0.0); p]; len];
    for t in 1..len {
        for j in 0..p {
            powers[t][j] = powers[t - 1][j] * roots[j];
        }
    }
    let mut amplitudes = Vec::with_capacity(series.len());
    let mut err = 0.0;
    let mut norm = 0.0;
    for s in series {
        let mut h = vec![vec![Complex64::new(0.0, 0.0); p]; p];
        let mut b = vec![Complex64::new(0.0, 0.0); p];
        for (t, v) in s.iter().enumerate() {
            for j in 0..p {
                let pj = powers[t][j].conj();
                b[j] += pj * v;
                for k in 0..p {
                    h[j][k] += pj * powers[t][k];
                }
            }
        }
        let (amp, _) =
            solve_complex(h, b).ok_or(Error::IllConditionedFit { condition: f64::INFINITY })?;
        for (t, v) in s.iter().enumerate() {
            let model: Complex64 = (0..p).map(|j| amp[j] * powers[t][j]).sum();
            err += (model - v).norm_sqr();
            norm += v.norm_sqr();
        }
        amplitudes.push(amp);
    }

    // sort modes by imaginary part for a stable presentation
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| {
        (frequencies[a].im, frequencies[a].re)
            .partial_cmp(&(frequencies[b].im, frequencies[b].re))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let frequencies: Vec<Complex64> = order.iter().map(|&j| frequencies[j]).collect();
    let amplitudes: Vec<Vec<Complex64>> = amplitudes
        .iter()
        .map(|a| order.iter().map(|&j| a[j]).collect())
        .collect();

    Ok(ExpFit {
        frequencies,
        amplitudes,
        residual: if norm > 0.0 { (err / norm).sqrt() } else { 0.0 },
        condition,
    })
}

/// Roots of a monic polynomial (coefficients in ascending degree order) by
/// Durand-Kerner iteration; plenty for the handful of modes fitted here.
fn durand_kerner(monic: &[Complex64]) -> Vec<Complex64> {
    let p = monic.len() - 1;
    let eval = |z: Complex64| -> Complex64 {
        let mut acc = monic[p];
        for j in (0..p).rev() {
            acc = acc * z + monic[j];
        }
        acc
    };
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..p).map(|k| seed.powu(k as u32 + 1)).collect();
    for _ in 0..300 {
        let mut delta_max = 0.0f64;
        for k in 0..p {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..p {
                if j != k {
                    denom *= roots[k] - roots[j];
                }
            }
            if denom.norm() == 0.0 {
                continue;
            }
            let delta = eval(roots[k]) / denom;
            roots[k] -= delta;
            delta_max = delta_max.max(delta.norm() / (1.0 + roots[k].norm()));
        }
        if delta_max < 1e-15 {
            break;
        }
    }
    roots
}
