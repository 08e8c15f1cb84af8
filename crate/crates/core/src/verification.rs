//! Independent checks that constructed functions actually solve the
//! equations: Wirtinger finite differences, the exact power-series
//! recurrence, and a Wronskian invariant integrated by Runge–Kutta.
//!
//! Finite differences are used instead of any series-based differentiation
//! so that the verifier never shares a computation path with the evaluators
//! it is checking. Stencils are second order; grids exclude a small
//! neighborhood of the origin where `z̄/z`-type factors degrade them.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{equivalent, lambda_map, OperatorElement};
use crate::{complex_pair, Error, Params, Result};

/// Cartesian `n × n` grid over `[−radius, radius]²`; points outside the disc
/// of the given radius or closer to the origin than `exclude_origin_radius`
/// are skipped.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub radius: f64,
    pub n: usize,
    #[serde(default)]
    pub exclude_origin_radius: f64,
}

impl GridSpec {
    pub fn new(radius: f64, n: usize, exclude_origin_radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "grid radius must lie in (0,1), got {radius}"
            )));
        }
        if n == 0 {
            return Err(Error::InvalidConfig("grid needs at least one point".into()));
        }
        if exclude_origin_radius < 0.0 {
            return Err(Error::InvalidConfig(
                "exclude_origin_radius must be nonnegative".into(),
            ));
        }
        Ok(GridSpec {
            radius,
            n,
            exclude_origin_radius,
        })
    }

    /// Grid points that survive the disc and origin filters.
    pub fn points(&self) -> Vec<Complex64> {
        let mut pts = Vec::new();
        let coord = |i: usize| {
            if self.n <= 1 {
                0.0
            } else {
                -self.radius + 2.0 * self.radius * i as f64 / (self.n - 1) as f64
            }
        };
        let keep = self.radius * (1.0 + 1e-12);
        for i in 0..self.n {
            for j in 0..self.n {
                let z = Complex64::new(coord(i), coord(j));
                let rho = z.norm();
                if rho <= keep && rho >= self.exclude_origin_radius {
                    pts.push(z);
                }
            }
        }
        pts
    }
}

/// Worst-point summary of a residual sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub max_abs: f64,
    #[serde(with = "complex_pair")]
    pub argmax_point: Complex64,
    pub points_checked: usize,
    pub fd_step: f64,
}

/// Wirtinger derivatives of a sampled function at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WirtingerDerivatives {
    /// `∂u = (∂_x − i∂_y)u / 2`
    pub d: Complex64,
    /// `∂̄u = (∂_x + i∂_y)u / 2`
    pub dbar: Complex64,
    /// `∂∂̄u`, one quarter of the Laplacian.
    pub ddbar: Complex64,
    /// The center sample `u(z)`.
    pub value: Complex64,
}

/// Second-order central stencils for `∂`, `∂̄` and `∂∂̄` (five samples).
pub fn wirtinger_fd<F: Fn(Complex64) -> Complex64>(
    f: &F,
    z: Complex64,
    h: f64,
) -> WirtingerDerivatives {
    let right = f(z + h);
    let left = f(z - h);
    let up = f(z + Complex64::new(0.0, h));
    let down = f(z - Complex64::new(0.0, h));
    let center = f(z);
    let ux = (right - left) / (2.0 * h);
    let uy = (up - down) / (2.0 * h);
    let lap = (right + left + up + down - 4.0 * center) / (h * h);
    WirtingerDerivatives {
        d: (ux - Complex64::I * uy) / 2.0,
        dbar: (ux + Complex64::I * uy) / 2.0,
        ddbar: lap / 4.0,
        value: center,
    }
}

/// Apply a span element to a sampled function at `z` by finite differences:
/// `a₁·u + a₂·z·∂u + a₃·z̄·∂̄u + a₄·∂∂̄u`.
pub fn apply_element<F: Fn(Complex64) -> Complex64>(
    elem: &OperatorElement,
    f: &F,
    z: Complex64,
    h: f64,
) -> Complex64 {
    let w = wirtinger_fd(f, z, h);
    elem.ident * w.value
        + elem.z_del * z * w.d
        + elem.zbar_delbar * z.conj() * w.dbar
        + elem.del_delbar * w.ddbar
}

fn worst_point<I: Iterator<Item = (f64, Complex64)>>(it: I) -> (f64, Complex64) {
    it.fold((0.0, Complex64::ZERO), |acc, cur| {
        if cur.0 > acc.0 {
            cur
        } else {
            acc
        }
    })
}

/// Maximum of `|∂∂̄u − s·z·∂u − t·z̄·∂̄u − r·u|` over the grid, by finite
/// differences. For an exact solution this is the stencil error, `O(h²)`.
pub fn residual_m<F: Fn(Complex64) -> Complex64 + Sync>(
    params: Params,
    sampler: &F,
    grid: &GridSpec,
    h: f64,
) -> ResidualReport {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let elem = OperatorElement::from_params(params);
        let pts = grid.points();
        let (max_abs, argmax_point) = pts
            .par_iter()
            .map(|&z| (apply_element(&elem, sampler, z, h).norm(), z))
            .reduce(
                || (0.0, Complex64::ZERO),
                |a, b| if b.0 > a.0 { b } else { a },
            );
        ResidualReport {
            max_abs,
            argmax_point,
            points_checked: pts.len(),
            fd_step: h,
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        residual_m_seq(params, sampler, grid, h)
    }
}

/// Sequential twin of [`residual_m`].
pub fn residual_m_seq<F: Fn(Complex64) -> Complex64>(
    params: Params,
    sampler: &F,
    grid: &GridSpec,
    h: f64,
) -> ResidualReport {
    let elem = OperatorElement::from_params(params);
    let pts = grid.points();
    let (max_abs, argmax_point) = worst_point(
        pts.iter()
            .map(|&z| (apply_element(&elem, sampler, z, h).norm(), z)),
    );
    ResidualReport {
        max_abs,
        argmax_point,
        points_checked: pts.len(),
        fd_step: h,
    }
}

/// Exact coefficient recurrence of the mode ODE
/// `x·y'' + (m+1 − (s+t)x)·y' − (r+sm)·y = 0`: returns
/// `max_k |(k+1)(k+m+1)·f_{k+1} − (r+sm+k(s+t))·f_k|` over the given
/// coefficients. Identically zero iff the power series solves the equation
/// termwise; linear under coefficient scaling.
pub fn ode_recurrence_residual(params: Params, m: u32, coeffs: &[Complex64]) -> f64 {
    let lambda = params.r + params.s * m as f64;
    let st = params.s + params.t;
    let mut worst: f64 = 0.0;
    for k in 0..coeffs.len().saturating_sub(1) {
        let kf = k as f64;
        let lhs = (kf + 1.0) * (kf + m as f64 + 1.0) * coeffs[k + 1];
        let rhs = (lambda + kf * st) * coeffs[k];
        worst = worst.max((lhs - rhs).norm());
    }
    worst
}

/// RK4 integration of two solutions of the mode ODE from `x0` with the
/// given `(y, y')` initial conditions, tracking the weighted Wronskian
/// `W(x)·x^{m+1}·e^{−(s+t)x}`, which is constant along exact solutions.
/// Returns the maximum relative deviation of that quantity from its value
/// at `x0`; pairs with a vanishing initial Wronskian get deviation 0.
pub fn wronskian_deviation(
    params: Params,
    m: u32,
    x0: f64,
    x1: f64,
    steps: usize,
    ic1: (Complex64, Complex64),
    ic2: (Complex64, Complex64),
) -> f64 {
    let st = params.s + params.t;
    let lambda = params.r + params.s * m as f64;
    let m1 = m as f64 + 1.0;
    // y'' = ((s+t)x − (m+1))·y'/x + (r+sm)·y/x
    let accel = |x: f64, y: Complex64, v: Complex64| ((st * x - m1) * v + lambda * y) / x;
    let weight = |x: f64| Complex64::from(x.powf(m1)) * (-st * x).exp();

    let (mut y1, mut v1) = ic1;
    let (mut y2, mut v2) = ic2;
    let w0 = (y1 * v2 - v1 * y2) * weight(x0);
    if w0.norm() == 0.0 {
        return 0.0;
    }
    let h = (x1 - x0) / steps as f64;
    let mut worst: f64 = 0.0;
    for i in 0..steps {
        let x = x0 + i as f64 * h;
        // One RK4 step for both second-order systems jointly.
        let step = |y: Complex64, v: Complex64| {
            let (k1y, k1v) = (v, accel(x, y, v));
            let (k2y, k2v) = (
                v + 0.5 * h * k1v,
                accel(x + 0.5 * h, y + 0.5 * h * k1y, v + 0.5 * h * k1v),
            );
            let (k3y, k3v) = (
                v + 0.5 * h * k2v,
                accel(x + 0.5 * h, y + 0.5 * h * k2y, v + 0.5 * h * k2v),
            );
            let (k4y, k4v) = (v + h * k3v, accel(x + h, y + h * k3y, v + h * k3v));
            (
                y + h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y),
                v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v),
            )
        };
        (y1, v1) = step(y1, v1);
        (y2, v2) = step(y2, v2);
        let xn = x0 + (i + 1) as f64 * h;
        let w = (y1 * v2 - v1 * y2) * weight(xn);
        worst = worst.max((w - w0).norm());
    }
    worst / w0.norm()
}

/// Wronskian invariance check with the canonical independent initial
/// conditions `(1, 0)` and `(0, 1)` at `x0`.
///
/// The run is repeated with the step halved; if the deviation fails to
/// shrink while still above the roundoff floor, the requested step count is
/// reported as too coarse.
pub fn wronskian_check(params: Params, m: u32, x0: f64, x1: f64, steps: usize) -> Result<f64> {
    if !(0.0 < x0 && x0 < x1) {
        return Err(Error::InvalidConfig(format!(
            "need 0 < x0 < x1, got [{x0}, {x1}]"
        )));
    }
    if steps == 0 {
        return Err(Error::InvalidConfig("need at least one step".into()));
    }
    let ic1 = (Complex64::ONE, Complex64::ZERO);
    let ic2 = (Complex64::ZERO, Complex64::ONE);
    let at_requested = wronskian_deviation(params, m, x0, x1, steps, ic1, ic2);
    let at_halved = wronskian_deviation(params, m, x0, x1, steps * 2, ic1, ic2);
    // Below ~1e-8 the deviation is dominated by cancellation roundoff in the
    // Wronskian itself and refinement no longer shrinks it; that is
    // convergence, not coarseness.
    if at_halved >= at_requested && at_requested > 1e-8 {
        return Err(Error::StepTooCoarse {
            at_requested,
            at_halved,
        });
    }
    Ok(at_requested)
}

/// For an equivalent pair `(v, w)`, the difference `M_v − M_w` annihilates
/// `z^m·f(|z|²)`; this returns the finite-difference residual of that action
/// maximized over the grid (origin always excluded), expected `O(h²)`.
///
/// Errors with [`Error::NotEquivalent`] when the pair is not equivalent
/// modulo the mode-`m` kernel.
pub fn equivalence_action_check(
    v: &OperatorElement,
    w: &OperatorElement,
    m: u32,
    f_poly: &[Complex64],
    grid: &GridSpec,
    h: f64,
) -> Result<f64> {
    if !equivalent(v, w, m).equivalent {
        return Err(Error::NotEquivalent { m });
    }
    Ok(action_difference_max(v, w, m, f_poly, grid, h))
}

/// Maximum over the grid of `|(M_v − M_w)(z^m f(|z|²))|` by finite
/// differences, with no equivalence precondition. For non-equivalent pairs
/// this stays bounded away from zero as `h → 0`, matching the closed form
/// `z^m·(Λ_m(v−w) f)(|z|²)`.
pub fn action_difference_max(
    v: &OperatorElement,
    w: &OperatorElement,
    m: u32,
    f_poly: &[Complex64],
    grid: &GridSpec,
    h: f64,
) -> f64 {
    let diff = *v - *w;
    let u = homogeneous_sampler(m, f_poly);
    let pts: Vec<Complex64> = grid
        .points()
        .into_iter()
        .filter(|z| z.norm() > 0.0)
        .collect();
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        pts.par_iter()
            .map(|&z| apply_element(&diff, &u, z, h).norm())
            .reduce(|| 0.0, f64::max)
    }
    #[cfg(not(feature = "parallel"))]
    {
        pts.iter()
            .map(|&z| apply_element(&diff, &u, z, h).norm())
            .fold(0.0, f64::max)
    }
}

/// The test function `z ↦ z^m·f(|z|²)` for a polynomial `f`.
pub fn homogeneous_sampler(
    m: u32,
    f_poly: &[Complex64],
) -> impl Fn(Complex64) -> Complex64 + Sync + '_ {
    move |z: Complex64| {
        let x = Complex64::from(z.norm_sqr());
        let mut f = Complex64::ZERO;
        for &ck in f_poly.iter().rev() {
            f = f * x + ck;
        }
        z.powu(m) * f
    }
}

/// Exact value of `Λ_m(v−w)` applied to the polynomial, times `z^m`, at `z`
/// — the closed-form oracle behind the negative controls of
/// [`action_difference_max`].
pub fn homogeneous_action_exact(
    d: &OperatorElement,
    m: u32,
    f_poly: &[Complex64],
    z: Complex64,
) -> Complex64 {
    let t = lambda_map(d, m);
    z.powu(m) * t.apply_poly(f_poly, Complex64::from(z.norm_sqr()))
}
