//! Arithmetic of the Blaschke group `D x T`: Blaschke maps, the induced group
//! law on parameters, the radial subgroup used to place grid circles, and the
//! pseudohyperbolic metric.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest radial index accepted by [`radial_node`]; `a^k` is evaluated
/// directly and must stay finite.
pub const MAX_RADIAL_INDEX: u32 = 60;

const POLE_TOL: f64 = 1e-14;

/// A point `(b, eps)` of the Blaschke group with `|b| < 1` and `|eps| = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupElement {
    b: Complex64,
    eps: Complex64,
}

impl GroupElement {
    /// Builds an element, rescaling `eps` onto the unit circle.
    pub fn new(b: Complex64, eps: Complex64) -> Result<Self> {
        if !(b.norm() < 1.0) {
            return Err(Error::InvalidGroupElement(format!(
                "|b| = {} is not < 1",
                b.norm()
            )));
        }
        let m = eps.norm();
        if !(m > 0.0) || !m.is_finite() {
            return Err(Error::InvalidGroupElement(format!(
                "eps = {eps} cannot be normalized"
            )));
        }
        Ok(Self { b, eps: eps / m })
    }

    /// The neutral element `(0, 1)`.
    pub fn identity() -> Self {
        Self {
            b: Complex64::new(0.0, 0.0),
            eps: Complex64::new(1.0, 0.0),
        }
    }

    /// Element `(r, 1)` of the radial (dilation-like) subgroup.
    pub fn radial(r: f64) -> Result<Self> {
        Self::new(Complex64::new(r, 0.0), Complex64::new(1.0, 0.0))
    }

    pub fn b(&self) -> Complex64 {
        self.b
    }

    pub fn eps(&self) -> Complex64 {
        self.eps
    }

    /// `B_a(z) = eps (z - b) / (1 - conj(b) z)`.
    pub fn apply(&self, z: Complex64) -> Result<Complex64> {
        blaschke_map(self, z)
    }

    /// Group law induced by composition: `B_{self ∘ other} = B_self ∘ B_other`.
    pub fn compose(&self, other: &Self) -> Self {
        compose(self, other)
    }

    pub fn inverse(&self) -> Self {
        inverse(self)
    }
}

impl Default for GroupElement {
    fn default() -> Self {
        Self::identity()
    }
}

pub fn blaschke_map(a: &GroupElement, z: Complex64) -> Result<Complex64> {
    let den = Complex64::new(1.0, 0.0) - a.b.conj() * z;
    if den.norm() < POLE_TOL {
        return Err(Error::PoleAtInput);
    }
    Ok(a.eps * (z - a.b) / den)
}

pub fn compose(a1: &GroupElement, a2: &GroupElement) -> GroupElement {
    let one = Complex64::new(1.0, 0.0);
    let (b1, e1) = (a1.b, a1.eps);
    let (b2, e2) = (a2.b, a2.eps);

    let den_b = one + b1 * b2.conj() * e2.conj();
    let den_e = one + e2 * b1.conj() * b2;
    // |den| >= 1 - |b1||b2| > 0 for valid elements.
    debug_assert!(den_b.norm() > 0.0 && den_e.norm() > 0.0);

    let b = (b1 * e2.conj() + b2) / den_b;
    let eps = e1 * (e2 + b1 * b2.conj()) / den_e;
    GroupElement {
        b,
        eps: eps / eps.norm(),
    }
}

/// `(b, eps)^{-1} = (-b eps, conj(eps))`.
pub fn inverse(a: &GroupElement) -> GroupElement {
    GroupElement {
        b: -a.b * a.eps,
        eps: a.eps.conj(),
    }
}

/// Pseudohyperbolic distance `|(w - z) / (1 - conj(w) z)|`.
pub fn pseudo_distance(z: Complex64, w: Complex64) -> f64 {
    let den = Complex64::new(1.0, 0.0) - w.conj() * z;
    ((w - z) / den).norm()
}

/// `r_k = (a^k - a^-k) / (a^k + a^-k)`, evaluated as written.
pub fn radial_node(a_base: f64, k: u32) -> Result<f64> {
    if !(a_base > 1.0) || !a_base.is_finite() {
        return Err(Error::InvalidBase(a_base));
    }
    if k > MAX_RADIAL_INDEX {
        return Err(Error::IndexOutOfRange(format!(
            "radial index {k} exceeds {MAX_RADIAL_INDEX}"
        )));
    }
    let up = a_base.powi(k as i32);
    if !up.is_finite() {
        return Err(Error::IndexOutOfRange(format!(
            "a^{k} overflows for a = {a_base}"
        )));
    }
    let down = up.recip();
    Ok((up - down) / (up + down))
}
