//! Building solutions from mode coefficients, evaluating the homogeneous
//! series, and recovering coefficients from circle samples.
//!
//! Every solution on the disc is a sum of rotation-homogeneous modes: for
//! `m ≥ 0` the mode is `k·𝒫(r+sm, s+t | m+1; |z|²)·z^m`, and for `m < 0` the
//! conjugate form `k·𝒫(r+t|m|, t+s | |m|+1; |z|²)·z̄^{|m|}`. Coefficients are
//! recovered from samples on a circle of radius `ρ` by a forward DFT with
//! `e^{−imθ}` kernel and `1/N` normalization, then division by the mode's
//! radial value `𝒫(…; ρ²)·ρ^{|m|}`. That division is exact for finite mode
//! sums, but its conditioning degrades like `ρ^{−|m|}`: at the default
//! `ρ = 0.5` double precision supports roughly `|m| ≤ 20` at 1e-10 absolute
//! accuracy, and larger bands need a larger `ρ`.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::series::p_series;
use crate::{complex_pair, Error, EvalConfig, Params, Result};

/// Divisors smaller than this are reported as [`Error::DivisorNearZero`].
const DIVISOR_FLOOR: f64 = 1e-300;

/// A single mode index and its complex coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeCoefficient {
    pub m: i32,
    #[serde(with = "complex_pair")]
    pub k: Complex64,
}

/// A finite mode sum: parameters plus a list of distinct mode coefficients.
#[derive(Clone, Debug)]
pub struct SolutionSeries {
    params: Params,
    modes: Vec<ModeCoefficient>,
    cfg: EvalConfig,
}

impl SolutionSeries {
    /// Mode indices must be pairwise distinct.
    pub fn new(params: Params, modes: Vec<ModeCoefficient>, cfg: EvalConfig) -> Result<Self> {
        cfg.validate()?;
        let mut seen = std::collections::BTreeSet::new();
        for mc in &modes {
            if !seen.insert(mc.m) {
                return Err(Error::InvalidConfig(format!(
                    "duplicate mode index {}",
                    mc.m
                )));
            }
        }
        Ok(SolutionSeries { params, modes, cfg })
    }

    pub fn params(&self) -> Params {
        self.params
    }

    pub fn modes(&self) -> &[ModeCoefficient] {
        &self.modes
    }

    pub fn cfg(&self) -> &EvalConfig {
        &self.cfg
    }

    /// Evaluate the finite mode sum at `z`. No truncation happens here
    /// beyond the per-mode series truncation.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let mut acc = Complex64::ZERO;
        for mc in &self.modes {
            acc += mode_value(self.params, mc.m, mc.k, z, &self.cfg)?;
        }
        Ok(acc)
    }

    /// Finite surrogate for the root condition on coefficient sequences:
    /// checks `|k_m| ≤ bound · rho0^{−|m|}` for every stored mode.
    pub fn satisfies_coefficient_bound(&self, bound: f64, rho0: f64) -> bool {
        self.modes
            .iter()
            .all(|mc| mc.k.norm() <= bound * rho0.powf(-(mc.m.unsigned_abs() as f64)))
    }
}

/// Radial profile of mode `m` evaluated at `x` (normally `x = |z|²`):
/// `𝒫(r+sm, s+t | m+1; x)` for `m ≥ 0` and the `s↔t` swapped form for
/// `m < 0`.
pub fn radial_part(params: Params, m: i32, x: Complex64, cfg: &EvalConfig) -> Result<Complex64> {
    if m >= 0 {
        p_series(params, m as u32, x, cfg)
    } else {
        p_series(params.st_swapped(), m.unsigned_abs(), x, cfg)
    }
}

/// Value of the homogeneous mode `(m, k)` at `z`.
pub fn mode_value(
    params: Params,
    m: i32,
    k: Complex64,
    z: Complex64,
    cfg: &EvalConfig,
) -> Result<Complex64> {
    let radial = radial_part(params, m, Complex64::from(z.norm_sqr()), cfg)?;
    let angular = if m >= 0 {
        z.powu(m as u32)
    } else {
        z.conj().powu(m.unsigned_abs())
    };
    Ok(k * radial * angular)
}

/// Assemble a solution from derivative data at the origin:
/// `k_m = ∂^m u(0)/m!` from `d_plus[m]` and `k_{−m} = ∂̄^m u(0)/m!` from
/// `d_minus[m−1]`.
pub fn modes_from_taylor(
    params: Params,
    d_plus: &[Complex64],
    d_minus: &[Complex64],
    cfg: EvalConfig,
) -> Result<SolutionSeries> {
    let mut modes = Vec::with_capacity(d_plus.len() + d_minus.len());
    let mut factorial = 1.0f64;
    for (m, &v) in d_plus.iter().enumerate() {
        if m > 0 {
            factorial *= m as f64;
        }
        modes.push(ModeCoefficient {
            m: m as i32,
            k: v / factorial,
        });
    }
    factorial = 1.0;
    for (i, &v) in d_minus.iter().enumerate() {
        let m = i + 1;
        factorial *= m as f64;
        modes.push(ModeCoefficient {
            m: -(m as i32),
            k: v / factorial,
        });
    }
    SolutionSeries::new(params, modes, cfg)
}

/// Equally spaced samples `u(ρ·e^{2πij/N})`, `j = 0..N`, with `N` a power of
/// two and `0 < ρ < 1`.
#[derive(Clone, Debug)]
pub struct CircleSamples {
    rho: f64,
    values: Vec<Complex64>,
}

impl CircleSamples {
    pub fn new(rho: f64, values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() || !values.len().is_power_of_two() {
            return Err(Error::BadSampleCount { n: values.len() });
        }
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "circle radius must lie in (0,1), got {rho}"
            )));
        }
        Ok(CircleSamples { rho, values })
    }

    /// Sample a function at the `n` roots of unity scaled by `rho`.
    pub fn from_sampler<F: Fn(Complex64) -> Complex64>(rho: f64, n: usize, f: F) -> Result<Self> {
        if n == 0 || !n.is_power_of_two() {
            return Err(Error::BadSampleCount { n });
        }
        let values = (0..n)
            .map(|j| {
                let theta = std::f64::consts::TAU * j as f64 / n as f64;
                f(Complex64::from_polar(rho, theta))
            })
            .collect();
        CircleSamples::new(rho, values)
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Raw Fourier coefficients `c_m(ρ) = (1/N) Σ_j u_j e^{−2πimj/N}` for all
/// resolvable modes `|m| < N/2`, keyed by `m`.
pub fn decompose_circle(samples: &CircleSamples) -> BTreeMap<i32, Complex64> {
    let n = samples.len();
    let mut buf = samples.values().to_vec();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    let h = ((n - 1) / 2) as i32;
    let mut out = BTreeMap::new();
    for m in -h..=h {
        let idx = m.rem_euclid(n as i32) as usize;
        out.insert(m, buf[idx] * scale);
    }
    out
}

/// Divide raw circle coefficients by the radial mode values to recover the
/// mode coefficients `k_m` of a finite mode sum.
pub fn coefficients_from_samples(
    samples: &CircleSamples,
    params: Params,
    m_range: RangeInclusive<i32>,
    cfg: &EvalConfig,
) -> Result<Vec<ModeCoefficient>> {
    let n = samples.len();
    for &m in [*m_range.start(), *m_range.end()].iter() {
        if 2 * (m.unsigned_abs() as usize) >= n {
            return Err(Error::AliasWarning { m, n });
        }
    }
    let raw = decompose_circle(samples);
    let rho = samples.rho();
    let x = Complex64::from(rho * rho);
    let mut out = Vec::new();
    for m in m_range {
        let divisor = radial_part(params, m, x, cfg)? * rho.powi(m.unsigned_abs() as i32);
        if divisor.norm() < DIVISOR_FLOOR {
            return Err(Error::DivisorNearZero {
                m,
                divisor: divisor.norm(),
            });
        }
        out.push(ModeCoefficient {
            m,
            k: raw[&m] / divisor,
        });
    }
    Ok(out)
}

/// Sample `u` on the circle of radius `rho` at `n` points (a power of two)
/// and recover the mode coefficients over `m_range`.
///
/// Exact for finite mode sums with all modes below the alias limit `N/2`,
/// up to the `ρ^{−|m|}` conditioning discussed at module level.
pub fn extract_coefficients<F: Fn(Complex64) -> Complex64>(
    sampler: F,
    params: Params,
    m_range: RangeInclusive<i32>,
    rho: f64,
    n: usize,
    cfg: &EvalConfig,
) -> Result<Vec<ModeCoefficient>> {
    let samples = CircleSamples::from_sampler(rho, n, sampler)?;
    coefficients_from_samples(&samples, params, m_range, cfg)
}

/// Fejér mean of order `order` at `z`: `Σ_{|m|≤order} (1 − |m|/(order+1))·u_m(z)`,
/// with the homogeneous parts `u_m(z) = c_m(|z|)·e^{imθ}` read off a circle
/// decomposition at radius `|z|`. Converges to `u(z)` as the order grows for
/// continuous `u`.
///
/// `sample` receives polar coordinates `(ρ, θ)`.
pub fn fejer_reconstruct<F: Fn(f64, f64) -> Complex64>(
    sample: F,
    order: usize,
    z: Complex64,
) -> Result<Complex64> {
    if z == Complex64::ZERO {
        // The circle collapses; only the m = 0 part survives at the origin.
        return Ok(sample(0.0, 0.0));
    }
    let rho = z.norm();
    let theta = z.arg();
    let n = (2 * (order + 1)).next_power_of_two();
    let values = (0..n)
        .map(|j| sample(rho, std::f64::consts::TAU * j as f64 / n as f64))
        .collect();
    let samples = CircleSamples::new(rho, values)?;
    let raw = decompose_circle(&samples);
    let mut acc = Complex64::ZERO;
    for m in -(order as i32)..=(order as i32) {
        let weight = 1.0 - m.abs() as f64 / (order as f64 + 1.0);
        acc += weight * raw[&m] * Complex64::from_polar(1.0, m as f64 * theta);
    }
    Ok(acc)
}
