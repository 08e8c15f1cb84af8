//! Series kernels: the generalized Pochhammer symbol, the unifying power
//! series `G(a,b|c,d;z) = Σ (a,b)_k/(c,d)_k · z^k/k!` and its `𝒫` instance,
//! the Kummer and Θ special cases, the modified Bessel function, derivative
//! shifts, and the large-mode asymptotics.
//!
//! Every evaluation truncates against a certified tail bound rather than a
//! heuristic "term got small" check: once the remaining Pochhammer ratios are
//! bounded by `C`, the tail after term `K` is at most
//! `|term_K| · (C|z|/(K+1)) · e^{C|z|}`, and the loop stops when that is
//! below the configured tolerance.

use num_complex::Complex64;

use crate::{Error, EvalConfig, Params, Result};

/// Generalized Pochhammer symbol `(x, y)_n = x(x+y)(x+2y)⋯(x+(n−1)y)`,
/// with `(x, y)_0 = 1` and `(x, 1)_n` the classical rising factorial.
pub fn poch(x: Complex64, y: Complex64, n: u32) -> Complex64 {
    let mut acc = Complex64::ONE;
    for k in 0..n {
        acc *= x + k as f64 * y;
    }
    acc
}

/// Parameters of the series `G(a,b|c,d;z) = Σ_k (a,b)_k/(c,d)_k · z^k/k!`.
///
/// Requires `c + n·d ≠ 0` for every `n ≥ 0`; a violation is reported as
/// [`Error::DenominatorPole`]. Degenerate steps `b = 0` or `d = 0` are fully
/// supported (they produce geometric-type factors).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GSeriesArgs {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl GSeriesArgs {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        GSeriesArgs { a, b, c, d }
    }

    /// Rejects parameter pairs whose denominator sequence `c + k·d` hits an
    /// exact zero for some `k ≥ 0`.
    fn check_poles(&self) -> Result<()> {
        if self.d == Complex64::ZERO {
            if self.c == Complex64::ZERO {
                return Err(Error::DenominatorPole { index: 0 });
            }
            return Ok(());
        }
        let k0 = -self.c / self.d;
        if k0.im == 0.0 && k0.re >= -0.5 {
            let k = k0.re.round();
            if k >= 0.0 && k <= u32::MAX as f64 {
                let k = k as u32;
                if self.c + k as f64 * self.d == Complex64::ZERO {
                    return Err(Error::DenominatorPole { index: k });
                }
            }
        }
        Ok(())
    }
}

/// Certified upper bound on `sup_{k≥0} |a + k·b| / |c + k·d|` for `d ≠ 0`.
///
/// When `Re(c·d̄) ≥ 0` the denominator modulus dominates `max(|c|, k|d|)` and
/// `|a|/|c| + |b|/|d|` is a sup bound. Otherwise `|c + kd| = |d|·|k − k₀|`
/// with `k₀ = −c/d` lying in the right half plane: below `K₁ = 2(|k₀|+1)`
/// the denominator is at least `|d|` times the distance from `k₀` to the
/// nonnegative integers, and beyond `K₁` it is at least `k|d|/2`.
fn ratio_sup_bound(args: &GSeriesArgs) -> f64 {
    let (na, nb, nc, nd) = (args.a.norm(), args.b.norm(), args.c.norm(), args.d.norm());
    let cross = (args.c * args.d.conj()).re;
    if cross >= 0.0 {
        return na / nc + nb / nd;
    }
    let k0 = -args.c / args.d;
    let dist = if k0.re <= 0.0 {
        k0.norm()
    } else {
        let lo = (k0 - k0.re.floor()).norm();
        let hi = (k0 - k0.re.ceil()).norm();
        lo.min(hi)
    };
    let k1 = 2.0 * (k0.norm() + 1.0);
    let near = (na + k1 * nb) / (nd * dist);
    let far = 2.0 * nb / nd + 2.0 * na / (k1 * nd);
    near.max(far)
}

/// Evaluate `G(a,b|c,d;z)` by the ratio recurrence
/// `term_{k+1} = term_k · (a+kb) · z / ((c+kd)(k+1))`, truncated at the first
/// index whose certified tail bound drops below `cfg.tol`.
pub fn g_series(args: GSeriesArgs, z: Complex64, cfg: &EvalConfig) -> Result<Complex64> {
    args.check_poles()?;
    let mut total = Complex64::ONE;
    let mut term = Complex64::ONE;
    if z == Complex64::ZERO {
        return Ok(total);
    }
    let abs_z = z.norm();
    let ln_tol = cfg.tol.ln();
    let d_is_zero = args.d == Complex64::ZERO;
    // Pochhammer-ratio sup for the factorial-style tail bound; unused (and
    // unbounded) when d = 0, where a geometric bound applies instead.
    let c_sup = if d_is_zero {
        0.0
    } else {
        ratio_sup_bound(&args)
    };

    let mut k: u32 = 0;
    loop {
        // `total` holds the partial sum through term_k; certify the tail.
        if term == Complex64::ZERO {
            // A numerator factor hit zero: all later terms vanish.
            return Ok(total);
        }
        let certified = if d_is_zero {
            // sup_{j≥k} (|a|+j|b|)/(j+1) is monotone with limit |b|.
            let g_sup =
                ((args.a.norm() + k as f64 * args.b.norm()) / (k as f64 + 1.0)).max(args.b.norm());
            let q = abs_z * g_sup / args.c.norm();
            q < 1.0 && term.norm() * q / (1.0 - q) < cfg.tol
        } else {
            let w = c_sup * abs_z;
            // ln of |term_k| · (w/(k+1)) · e^w, evaluated in logs so large w
            // cannot overflow before the terms have decayed.
            term.norm().ln() + w.ln() - ((k + 1) as f64).ln() + w < ln_tol
        };
        if certified {
            return Ok(total);
        }
        if k + 1 >= cfg.max_terms {
            return Err(Error::NoConvergence {
                max_terms: cfg.max_terms,
            });
        }
        let kf = k as f64;
        let den = args.c + kf * args.d;
        if den == Complex64::ZERO {
            return Err(Error::DenominatorPole { index: k });
        }
        term = term * (args.a + kf * args.b) * z / (den * (kf + 1.0));
        total += term;
        k += 1;
    }
}

/// `n`-th derivative of `G` through the shift identity
/// `G^{(n)}(a,b|c,d;z) = (a,b)_n/(c,d)_n · G(a+nb, b | c+nd, d; z)`.
pub fn g_derivative(
    args: GSeriesArgs,
    n: u32,
    z: Complex64,
    cfg: &EvalConfig,
) -> Result<Complex64> {
    for j in 0..n {
        if args.c + j as f64 * args.d == Complex64::ZERO {
            return Err(Error::DenominatorPole { index: j });
        }
    }
    let nf = n as f64;
    let shifted = GSeriesArgs {
        a: args.a + nf * args.b,
        b: args.b,
        c: args.c + nf * args.d,
        d: args.d,
    };
    let ratio = poch(args.a, args.b, n) / poch(args.c, args.d, n);
    Ok(ratio * g_series(shifted, z, cfg)?)
}

/// The mode-`m` kernel `𝒫(r+sm, s+t | m+1; z)`.
///
/// This single series covers both parameter regimes: for `s+t ≠ 0` it equals
/// the Kummer function `Φ((r+sm)/(s+t), m+1, (s+t)z)` and for `s+t = 0` the
/// Θ-series `Θ(m+1, (r+sm)z)`.
pub fn p_series(params: Params, m: u32, z: Complex64, cfg: &EvalConfig) -> Result<Complex64> {
    let args = GSeriesArgs {
        a: params.r + m as f64 * params.s,
        b: params.s + params.t,
        c: Complex64::from(m as f64 + 1.0),
        d: Complex64::ONE,
    };
    g_series(args, z, cfg)
}

/// First `len` Taylor coefficients `f_k = (r+sm, s+t)_k / ((m+1)_k · k!)`
/// of the mode-`m` kernel, by the same ratio recurrence the evaluator uses.
pub fn p_coefficients(params: Params, m: u32, len: usize) -> Vec<Complex64> {
    let alpha = params.r + m as f64 * params.s;
    let beta = params.s + params.t;
    let mut out = Vec::with_capacity(len);
    let mut f = Complex64::ONE;
    for k in 0..len {
        out.push(f);
        let kf = k as f64;
        f = f * (alpha + kf * beta) / ((m as f64 + 1.0 + kf) * (kf + 1.0));
    }
    out
}

/// Confluent hypergeometric function `Φ(a, b, z) = Σ (a)_k/(b)_k · z^k/k!`.
///
/// Fails with [`Error::DenominatorPole`] when `b` is zero or a negative
/// integer.
pub fn kummer(a: Complex64, b: Complex64, z: Complex64, cfg: &EvalConfig) -> Result<Complex64> {
    g_series(
        GSeriesArgs {
            a,
            b: Complex64::ONE,
            c: b,
            d: Complex64::ONE,
        },
        z,
        cfg,
    )
}

/// `Θ(m+1, z) = Σ_k z^k / ((m+1)_k · k!)`, the Bessel-regime kernel.
pub fn theta(m: u32, z: Complex64, cfg: &EvalConfig) -> Result<Complex64> {
    g_series(
        GSeriesArgs {
            a: Complex64::ONE,
            b: Complex64::ZERO,
            c: Complex64::from(m as f64 + 1.0),
            d: Complex64::ONE,
        },
        z,
        cfg,
    )
}

/// Modified Bessel function of the first kind,
/// `I_n(z) = (z/2)^n Σ_k (z/2)^{2k} / (k! · (n+k)!)`.
///
/// The integer-order gamma factors are folded into the running term, so no
/// general gamma routine is involved.
pub fn bessel_i(n: u32, z: Complex64, cfg: &EvalConfig) -> Result<Complex64> {
    let half = z / 2.0;
    let mut term = Complex64::ONE;
    for i in 1..=n {
        term *= half / i as f64;
    }
    let mut total = term;
    let w = half * half;
    if w == Complex64::ZERO {
        return Ok(total);
    }
    for k in 0..cfg.max_terms {
        let kf = k as f64;
        let denom = (kf + 1.0) * (n as f64 + kf + 1.0);
        // Successive ratios only shrink, so the tail is geometric.
        let q = w.norm() / denom;
        if q < 1.0 && term.norm() * q / (1.0 - q) < cfg.tol {
            return Ok(total);
        }
        term = term * w / denom;
        total += term;
    }
    Err(Error::NoConvergence {
        max_terms: cfg.max_terms,
    })
}

/// Uniform-in-`m` bound `exp((|r| + |s| + |s+t|)·|z|)` on the mode kernels.
pub fn growth_bound(params: Params, abs_z: f64) -> f64 {
    let rate = params.r.norm() + params.s.norm() + (params.s + params.t).norm();
    (rate * abs_z).exp()
}

/// Maximum of `|𝒫(r+sm, s+t|m+1; z) − e^{sz}|` over an `n_grid × n_grid`
/// Cartesian grid of the disc `|z| ≤ radius`.
///
/// The kernels converge to `e^{sz}` normally as `m → ∞`; the decrease is a
/// trend in `m`, not pointwise monotone.
pub fn asymptotic_gap(
    params: Params,
    m: u32,
    radius: f64,
    n_grid: usize,
    cfg: &EvalConfig,
) -> Result<f64> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let pts = disc_grid(radius, n_grid);
        pts.par_iter()
            .map(|&z| gap_at(params, m, z, cfg))
            .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
    }
    #[cfg(not(feature = "parallel"))]
    {
        asymptotic_gap_seq(params, m, radius, n_grid, cfg)
    }
}

/// Sequential twin of [`asymptotic_gap`].
pub fn asymptotic_gap_seq(
    params: Params,
    m: u32,
    radius: f64,
    n_grid: usize,
    cfg: &EvalConfig,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for z in disc_grid(radius, n_grid) {
        worst = worst.max(gap_at(params, m, z, cfg)?);
    }
    Ok(worst)
}

fn gap_at(params: Params, m: u32, z: Complex64, cfg: &EvalConfig) -> Result<f64> {
    Ok((p_series(params, m, z, cfg)? - (params.s * z).exp()).norm())
}

/// Cartesian grid over `[−radius, radius]²` restricted to the closed disc.
fn disc_grid(radius: f64, n_grid: usize) -> Vec<Complex64> {
    let mut pts = Vec::new();
    let coord = |i: usize| {
        if n_grid <= 1 {
            0.0
        } else {
            -radius + 2.0 * radius * i as f64 / (n_grid - 1) as f64
        }
    };
    let keep = radius * (1.0 + 1e-12);
    for i in 0..n_grid.max(1) {
        for j in 0..n_grid.max(1) {
            let z = Complex64::new(coord(i), coord(j));
            if z.norm() <= keep {
                pts.push(z);
            }
        }
    }
    pts
}
