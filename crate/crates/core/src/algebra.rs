//! The four-dimensional complex span of `(1, z∂, z̄∂̄, ∂∂̄)` as a Lie algebra,
//! the map `Λ_m` onto ordinary differential operators in `x = |z|²`, and the
//! equivalence classes of elements that act identically on rotation-
//! homogeneous functions.
//!
//! Acting on `u = z^m f(|z|²)` the four basis operators reduce to `f`,
//! `m·f + x·f'`, `x·f'` and `(m+1)·f' + x·f''` respectively; `Λ_m` collects
//! those into the coefficients of `q₂·x·d²/dx² + (q₁ᶜ + q₁ˡ·x)·d/dx + q₀`.
//! Its kernel is the line through `A − m`, where `A = z∂ − z̄∂̄` is the
//! angular derivative.

use std::ops::{Add, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{complex_pair, Params};

/// An element of the span, stored as coefficients in the ordered basis
/// `(1, z∂, z̄∂̄, ∂∂̄)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorElement {
    /// Coefficient of the identity.
    #[serde(with = "complex_pair")]
    pub ident: Complex64,
    /// Coefficient of `z∂`.
    #[serde(with = "complex_pair")]
    pub z_del: Complex64,
    /// Coefficient of `z̄∂̄`.
    #[serde(with = "complex_pair")]
    pub zbar_delbar: Complex64,
    /// Coefficient of `∂∂̄`.
    #[serde(with = "complex_pair")]
    pub del_delbar: Complex64,
}

impl OperatorElement {
    pub const ZERO: OperatorElement = OperatorElement {
        ident: Complex64::ZERO,
        z_del: Complex64::ZERO,
        zbar_delbar: Complex64::ZERO,
        del_delbar: Complex64::ZERO,
    };

    pub fn new(
        ident: Complex64,
        z_del: Complex64,
        zbar_delbar: Complex64,
        del_delbar: Complex64,
    ) -> Self {
        OperatorElement {
            ident,
            z_del,
            zbar_delbar,
            del_delbar,
        }
    }

    /// Coordinates `(−r, −s, −t, 1)` of the operator
    /// `∂∂̄ − s z∂ − t z̄∂̄ − r`.
    pub fn from_params(params: Params) -> Self {
        OperatorElement {
            ident: -params.r,
            z_del: -params.s,
            zbar_delbar: -params.t,
            del_delbar: Complex64::ONE,
        }
    }

    /// Lie bracket `[D₁, D₂] = γ·∂∂̄` with
    /// `γ = a₄(b₂+b₃) − b₄(a₂+a₃)`; the first-order terms commute and
    /// `[∂∂̄, z∂] = [∂∂̄, z̄∂̄] = ∂∂̄`.
    pub fn bracket(&self, other: &OperatorElement) -> OperatorElement {
        let gamma = self.del_delbar * (other.z_del + other.zbar_delbar)
            - other.del_delbar * (self.z_del + self.zbar_delbar);
        OperatorElement {
            ident: Complex64::ZERO,
            z_del: Complex64::ZERO,
            zbar_delbar: Complex64::ZERO,
            del_delbar: gamma,
        }
    }

    pub fn scaled(&self, factor: Complex64) -> OperatorElement {
        OperatorElement {
            ident: factor * self.ident,
            z_del: factor * self.z_del,
            zbar_delbar: factor * self.zbar_delbar,
            del_delbar: factor * self.del_delbar,
        }
    }

    /// The element with the `z∂` and `z̄∂̄` coefficients interchanged.
    ///
    /// Acting on conjugate-type functions `z̄^n f(|z|²)` an element behaves
    /// exactly as its swapped twin does on `z^n f(|z|²)`, which is how
    /// negative rotation modes are handled throughout.
    pub fn swap_first_order(&self) -> OperatorElement {
        OperatorElement {
            ident: self.ident,
            z_del: self.zbar_delbar,
            zbar_delbar: self.z_del,
            del_delbar: self.del_delbar,
        }
    }

    pub fn max_norm(&self) -> f64 {
        self.ident
            .norm()
            .max(self.z_del.norm())
            .max(self.zbar_delbar.norm())
            .max(self.del_delbar.norm())
    }
}

impl Add for OperatorElement {
    type Output = OperatorElement;
    fn add(self, rhs: OperatorElement) -> OperatorElement {
        OperatorElement {
            ident: self.ident + rhs.ident,
            z_del: self.z_del + rhs.z_del,
            zbar_delbar: self.zbar_delbar + rhs.zbar_delbar,
            del_delbar: self.del_delbar + rhs.del_delbar,
        }
    }
}

impl Sub for OperatorElement {
    type Output = OperatorElement;
    fn sub(self, rhs: OperatorElement) -> OperatorElement {
        OperatorElement {
            ident: self.ident - rhs.ident,
            z_del: self.z_del - rhs.z_del,
            zbar_delbar: self.zbar_delbar - rhs.zbar_delbar,
            del_delbar: self.del_delbar - rhs.del_delbar,
        }
    }
}

impl Neg for OperatorElement {
    type Output = OperatorElement;
    fn neg(self) -> OperatorElement {
        self.scaled(-Complex64::ONE)
    }
}

/// Coefficients of `q₂·x·d²/dx² + (q₁ᶜ + q₁ˡ·x)·d/dx + q₀`, the ordinary
/// differential image of a span element under `Λ_m`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OdeOperator {
    #[serde(with = "complex_pair")]
    pub q2: Complex64,
    #[serde(with = "complex_pair")]
    pub q1_const: Complex64,
    #[serde(with = "complex_pair")]
    pub q1_lin: Complex64,
    #[serde(with = "complex_pair")]
    pub q0: Complex64,
}

impl OdeOperator {
    pub const ZERO: OdeOperator = OdeOperator {
        q2: Complex64::ZERO,
        q1_const: Complex64::ZERO,
        q1_lin: Complex64::ZERO,
        q0: Complex64::ZERO,
    };

    pub fn is_zero(&self) -> bool {
        *self == OdeOperator::ZERO
    }

    /// Apply to a polynomial `f(x) = Σ cₖ xᵏ` at the point `x`.
    pub fn apply_poly(&self, coeffs: &[Complex64], x: Complex64) -> Complex64 {
        let (f, f1, f2) = horner_with_derivatives(coeffs, x);
        self.q2 * x * f2 + (self.q1_const + self.q1_lin * x) * f1 + self.q0 * f
    }
}

/// Evaluate a polynomial and its first two derivatives by Horner's rule.
fn horner_with_derivatives(
    coeffs: &[Complex64],
    x: Complex64,
) -> (Complex64, Complex64, Complex64) {
    let mut f = Complex64::ZERO;
    let mut f1 = Complex64::ZERO;
    let mut f2 = Complex64::ZERO;
    for &ck in coeffs.iter().rev() {
        f2 = f2 * x + 2.0 * f1;
        f1 = f1 * x + f;
        f = f * x + ck;
    }
    (f, f1, f2)
}

/// The image of an element under `Λ_m`: the unique ordinary operator `T`
/// with `D(z^m f(|z|²)) = z^m (T f)(|z|²)` away from the origin.
pub fn lambda_map(d: &OperatorElement, m: u32) -> OdeOperator {
    let mf = m as f64;
    OdeOperator {
        q2: d.del_delbar,
        q1_const: d.del_delbar * (mf + 1.0),
        q1_lin: d.z_del + d.zbar_delbar,
        q0: d.ident + d.z_del * mf,
    }
}

/// `A − m = (−m, 1, −1, 0)` in the `(1, z∂, z̄∂̄, ∂∂̄)` basis, where `A` is
/// the angular derivative `z∂ − z̄∂̄`. This element spans `ker Λ_m`.
pub fn kernel_basis(m: u32) -> OperatorElement {
    OperatorElement {
        ident: Complex64::from(-(m as f64)),
        z_del: Complex64::ONE,
        zbar_delbar: -Complex64::ONE,
        del_delbar: Complex64::ZERO,
    }
}

/// Outcome of an equivalence test: when `equivalent` holds,
/// `v − w = μ·(A − m)` componentwise.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceWitness {
    pub equivalent: bool,
    #[serde(with = "complex_pair")]
    pub mu: Complex64,
}

/// Decide whether `v − w` lies on the mode-`m` kernel line.
///
/// The multiple `μ` is read off the `z∂` component, whose kernel coordinate
/// is exactly 1, and then all four components are verified against
/// `μ·kernel_basis(m)` within a small relative slack.
pub fn equivalent(v: &OperatorElement, w: &OperatorElement, m: u32) -> EquivalenceWitness {
    let diff = *v - *w;
    let mu = diff.z_del;
    let residual = (diff - kernel_basis(m).scaled(mu)).max_norm();
    let scale = v.max_norm().max(w.max_norm()).max(1.0);
    EquivalenceWitness {
        equivalent: residual <= 1e-12 * scale,
        mu,
    }
}

/// Parameter rescaling `(s, t, r) ↦ (ρ²s, ρ²t, ρ²r)`.
///
/// If `u` solves the equation on the ball of radius `ρ` then `v(z) = u(ρz)`
/// solves it on the unit disc with the rescaled parameters.
pub fn rescale_params(params: Params, rho: f64) -> Params {
    let f = rho * rho;
    Params {
        s: f * params.s,
        t: f * params.t,
        r: f * params.r,
    }
}
