//! Generalized harmonic functions on the unit disc.
//!
//! This crate computes with the solutions of the rotationally symmetric
//! second order equation
//!
//! ```text
//! ∂∂̄u − s·z·∂u − t·z̄·∂̄u − r·u = 0,        z ∈ 𝔻,
//! ```
//!
//! for complex parameters `(s, t, r)`, where `∂` and `∂̄` are the Wirtinger
//! derivatives. Setting `s = t = 0` recovers the Helmholtz equation and
//! `s = t = r = 0` the Laplace equation.
//!
//! The crate is organized around four pieces:
//!
//! - [`series`]: the entire-function kernels behind every solution — the
//!   generalized Pochhammer symbol, the unifying `𝒫`/`G` power series, and
//!   the Kummer, Θ and modified-Bessel special cases, with certified
//!   truncation bounds.
//! - [`algebra`]: the four-dimensional span of `(1, z∂, z̄∂̄, ∂∂̄)` as a small
//!   Lie algebra, the map `Λ_m` onto ordinary differential operators, and the
//!   equivalence classes modulo its kernel.
//! - [`solutions`]: building solutions from mode coefficients, evaluating the
//!   homogeneous series, and recovering coefficients from circle samples by
//!   Fourier decomposition.
//! - [`verification`]: independent checks — Wirtinger finite differences,
//!   exact series recurrence residuals, and a Wronskian invariant integrated
//!   by RK4 — deliberately kept on a separate computation path from the
//!   series evaluators they test.
//!
//! Grid sweeps are data-parallel via rayon when the default `parallel`
//! feature is enabled; every parallel entry point has a `_seq` twin used as
//! the fallback and for benchmarking the speedup.
//!
//! ```
//! use num_complex::Complex64;
//! use gharmonics::{EvalConfig, Params};
//! use gharmonics::solutions::{ModeCoefficient, SolutionSeries};
//! use gharmonics::verification::{residual_m, GridSpec};
//!
//! // A two-mode solution for a generic parameter triple...
//! let params = Params::new(
//!     Complex64::new(0.4, 0.1),
//!     Complex64::new(-0.2, 0.3),
//!     Complex64::new(0.5, 0.0),
//! );
//! let cfg = EvalConfig::default();
//! let sol = SolutionSeries::new(
//!     params,
//!     vec![
//!         ModeCoefficient { m: 2, k: Complex64::new(1.0, 0.0) },
//!         ModeCoefficient { m: -1, k: Complex64::new(0.0, 0.5) },
//!     ],
//!     cfg,
//! )?;
//!
//! // ...passes the independent finite-difference residual check.
//! let grid = GridSpec::new(0.8, 21, 2e-3)?;
//! let sampler = |z| sol.eval(z).unwrap();
//! let report = residual_m(params, &sampler, &grid, 1e-3);
//! assert!(report.max_abs < 1e-4);
//! # Ok::<(), gharmonics::Error>(())
//! ```

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub mod algebra;
mod error;
pub mod series;
pub mod solutions;
pub mod verification;

pub use error::{Error, Result};

/// Serialize a complex number as a two-element `[re, im]` array.
///
/// JSON and CSV have no complex literal; every interface of this crate uses
/// the pair form.
pub mod complex_pair {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [v.re, v.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

/// The parameter triple `(s, t, r)` of the operator `∂∂̄ − s z∂ − t z̄∂̄ − r`.
///
/// All of ℂ³ is admissible; the unified series form covers `s + t ≠ 0`
/// (Kummer regime) and `s + t = 0` (Bessel regime) alike.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params {
    #[serde(with = "complex_pair")]
    pub s: Complex64,
    #[serde(with = "complex_pair")]
    pub t: Complex64,
    #[serde(with = "complex_pair")]
    pub r: Complex64,
}

impl Params {
    pub fn new(s: Complex64, t: Complex64, r: Complex64) -> Self {
        Params { s, t, r }
    }

    /// Convenience constructor for real parameters.
    pub fn real(s: f64, t: f64, r: f64) -> Self {
        Params {
            s: Complex64::new(s, 0.0),
            t: Complex64::new(t, 0.0),
            r: Complex64::new(r, 0.0),
        }
    }

    /// The triple with `s` and `t` interchanged.
    ///
    /// Conjugating a solution swaps the roles of `z∂` and `z̄∂̄`, which on the
    /// parameter side is exactly this swap; it is how negative rotation modes
    /// reduce to nonnegative ones.
    pub fn st_swapped(&self) -> Self {
        Params {
            s: self.t,
            t: self.s,
            r: self.r,
        }
    }

    /// Componentwise conjugate `(s̄, t̄, r̄)`.
    pub fn conj(&self) -> Self {
        Params {
            s: self.s.conj(),
            t: self.t.conj(),
            r: self.r.conj(),
        }
    }
}

/// Truncation and finite-difference controls shared by every numerical
/// routine.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    /// Absolute tail tolerance for series truncation.
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Hard cap on the number of series terms before giving up.
    #[serde(default = "default_max_terms")]
    pub max_terms: u32,
    /// Step `h` for finite-difference stencils.
    #[serde(default = "default_fd_step")]
    pub fd_step: f64,
}

fn default_tol() -> f64 {
    1e-12
}
fn default_max_terms() -> u32 {
    512
}
fn default_fd_step() -> f64 {
    1e-3
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            tol: default_tol(),
            max_terms: default_max_terms(),
            fd_step: default_fd_step(),
        }
    }
}

impl EvalConfig {
    /// Validated constructor: `tol > 0`, `max_terms ≥ 1`, `fd_step > 0`.
    pub fn new(tol: f64, max_terms: u32, fd_step: f64) -> Result<Self> {
        let cfg = EvalConfig {
            tol,
            max_terms,
            fd_step,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.tol.is_finite() || self.tol <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.max_terms == 0 {
            return Err(Error::InvalidConfig("max_terms must be at least 1".into()));
        }
        if !self.fd_step.is_finite() || self.fd_step <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "fd_step must be positive, got {}",
                self.fd_step
            )));
        }
        Ok(())
    }
}
