//! Function model for the Bergman space A² of the unit disc with the
//! normalized area measure `dA = dx dy / π` (so `‖1‖ = 1` and
//! `⟨z^n, z^n⟩ = 1/(n+1)`).
//!
//! Two finite representations are supported: Taylor polynomials and finite
//! combinations of reproducing kernels `K(z, w) = 1 / (1 - conj(w) z)²`.
//! Inner products between them are exact, using the reproducing property
//! `⟨f, K(·, w)⟩ = f(w)`.

use num_complex::Complex64;

use crate::blaschke::{blaschke_map, GroupElement};
use crate::qd::{kernel_qd, Cqd, Qd};
use crate::error::{Error, Result};

/// Maximum number of Taylor coefficients.
pub const MAX_TAYLOR_COEFFS: usize = 512;

/// Evaluation of kernel combinations is refused beyond this radius.
pub const EVAL_RADIUS: f64 = 1.0 - 1e-6;

const SINGULAR_TOL: f64 = 1e-14;
const MERGE_TOL: f64 = 1e-15;

/// Bergman kernel `K(z, w) = 1 / (1 - conj(w) z)²`.
pub fn kernel(z: Complex64, w: Complex64) -> Result<Complex64> {
    let d = Complex64::new(1.0, 0.0) - w.conj() * z;
    if d.norm() < SINGULAR_TOL {
        return Err(Error::NearSingular { re: z.re, im: z.im });
    }
    Ok((d * d).inv())
}

/// Kernel for arguments known to lie in the open disc.
#[inline]
pub(crate) fn kernel_in_disc(z: Complex64, w: Complex64) -> Complex64 {
    let d = Complex64::new(1.0, 0.0) - w.conj() * z;
    (d * d).inv()
}

/// `f(z) = Σ c_n z^n`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TaylorFunction {
    coeffs: Vec<Complex64>,
}

impl TaylorFunction {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() > MAX_TAYLOR_COEFFS {
            return Err(Error::TooManyCoefficients(coeffs.len()));
        }
        Ok(Self { coeffs })
    }

    /// Truncated expansion of `c · K(·, w)`: `Σ_{n<terms} c (n+1) conj(w)^n z^n`.
    pub fn kernel_series(w: Complex64, c: Complex64, terms: usize) -> Result<Self> {
        let mut coeffs = Vec::with_capacity(terms);
        let mut pow = c;
        for n in 0..terms {
            coeffs.push(pow * (n + 1) as f64);
            pow *= w.conj();
        }
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub(crate) fn evaluate_qd(&self, z: Complex64) -> Cqd {
        let z = Cqd::from(z);
        self.coeffs
            .iter()
            .rev()
            .fold(Cqd::ZERO, |acc, &c| acc * z + Cqd::from(c))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| c.norm_sqr() / (n + 1) as f64)
            .sum()
    }
}

/// One term `coeff · K(·, node)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelTerm {
    pub node: Complex64,
    pub coeff: Complex64,
}

/// `f(z) = Σ_j coeff_j K(z, node_j)` with pairwise distinct nodes in the disc.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct KernelExpansion {
    terms: Vec<KernelTerm>,
}

impl KernelExpansion {
    /// Builds an expansion, merging coincident nodes by summing coefficients.
    pub fn new(terms: impl IntoIterator<Item = KernelTerm>) -> Result<Self> {
        let mut merged: Vec<KernelTerm> = Vec::new();
        for t in terms {
            if !(t.node.norm() < 1.0) {
                return Err(Error::PreconditionViolated(format!(
                    "kernel node {} lies outside the open disc",
                    t.node
                )));
            }
            match merged
                .iter_mut()
                .find(|m| (m.node - t.node).norm() <= MERGE_TOL)
            {
                Some(m) => m.coeff += t.coeff,
                None => merged.push(t),
            }
        }
        Ok(Self { terms: merged })
    }

    /// Terms whose nodes are already known to be distinct and inside the disc.
    pub(crate) fn from_distinct(terms: Vec<KernelTerm>) -> Self {
        Self { terms }
    }

    /// `c · K(·, w)`.
    pub fn single(w: Complex64, c: Complex64) -> Result<Self> {
        Self::new([KernelTerm { node: w, coeff: c }])
    }

    /// The constant `c`, written as `c · K(·, 0)`.
    pub fn constant(c: Complex64) -> Self {
        Self {
            terms: vec![KernelTerm {
                node: Complex64::new(0.0, 0.0),
                coeff: c,
            }],
        }
    }

    pub fn terms(&self) -> &[KernelTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        if !(z.norm() <= EVAL_RADIUS) {
            return Err(Error::NearSingular { re: z.re, im: z.im });
        }
        Ok(self.evaluate_in_disc(z))
    }

    pub(crate) fn evaluate_in_disc(&self, z: Complex64) -> Complex64 {
        self.terms
            .iter()
            .map(|t| t.coeff * kernel_in_disc(z, t.node))
            .sum()
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| KernelTerm {
                    node: t.node,
                    coeff: t.coeff * s,
                })
                .collect(),
        }
    }

    /// `self + other`, merging shared nodes.
    pub fn sum(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        for t in &other.terms {
            match terms
                .iter_mut()
                .find(|m| (m.node - t.node).norm() <= MERGE_TOL)
            {
                Some(m) => m.coeff += t.coeff,
                None => terms.push(*t),
            }
        }
        Self { terms }
    }
}

/// `(1 - |w|²) K(·, w)`, the unit-norm kernel at `w`.
pub fn normalized_kernel(w: Complex64) -> Result<KernelExpansion> {
    KernelExpansion::single(w, Complex64::new(1.0 - w.norm_sqr(), 0.0))
}

/// An element of the supported function model.
#[derive(Debug, Clone, PartialEq)]
pub enum BergmanFunction {
    Taylor(TaylorFunction),
    Kernels(KernelExpansion),
}

impl From<TaylorFunction> for BergmanFunction {
    fn from(f: TaylorFunction) -> Self {
        BergmanFunction::Taylor(f)
    }
}

impl From<KernelExpansion> for BergmanFunction {
    fn from(f: KernelExpansion) -> Self {
        BergmanFunction::Kernels(f)
    }
}

impl BergmanFunction {
    /// Point value; kernel combinations are only evaluated for
    /// `|z| <= 1 - 1e-6`.
    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        match self {
            BergmanFunction::Taylor(f) => Ok(f.evaluate(z)),
            BergmanFunction::Kernels(f) => f.evaluate(z),
        }
    }

    /// Values at points inside the open disc (no radius guard).
    pub(crate) fn evaluate_in_disc(&self, z: Complex64) -> Complex64 {
        match self {
            BergmanFunction::Taylor(f) => f.evaluate(z),
            BergmanFunction::Kernels(f) => f.evaluate_in_disc(z),
        }
    }

    /// Point value in quad-double, for points inside the open disc.
    pub(crate) fn evaluate_qd(&self, z: Complex64) -> Cqd {
        match self {
            BergmanFunction::Taylor(f) => f.evaluate_qd(z),
            BergmanFunction::Kernels(f) => f
                .terms
                .iter()
                .map(|t| Cqd::from(t.coeff) * kernel_qd(z, t.node))
                .sum(),
        }
    }

    pub fn samples(&self, points: &[Complex64]) -> Result<Vec<Complex64>> {
        points.iter().map(|&z| self.evaluate(z)).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        inner_product(self, self).re.max(0.0)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }
}

/// Exact `⟨f, g⟩ = ∫ f conj(g) dA`.
pub fn inner_product(f: &BergmanFunction, g: &BergmanFunction) -> Complex64 {
    match (f, g) {
        (BergmanFunction::Taylor(f), BergmanFunction::Taylor(g)) => f
            .coeffs
            .iter()
            .zip(&g.coeffs)
            .enumerate()
            .map(|(n, (c, d))| c * d.conj() / (n + 1) as f64)
            .sum(),
        (f, BergmanFunction::Kernels(g)) => g
            .terms
            .iter()
            .map(|t| t.coeff.conj() * f.evaluate_in_disc(t.node))
            .sum(),
        (BergmanFunction::Kernels(_), BergmanFunction::Taylor(_)) => inner_product(g, f).conj(),
    }
}

/// `‖f‖²` in quad-double.
pub(crate) fn norm_sqr_qd(f: &BergmanFunction) -> Qd {
    match f {
        BergmanFunction::Taylor(t) => t
            .coeffs
            .iter()
            .enumerate()
            .fold(Qd::ZERO, |acc, (n, c)| acc + Cqd::from(*c).norm_sqr() / Qd::from((n + 1) as f64)),
        BergmanFunction::Kernels(k) => k
            .terms
            .iter()
            .map(|t| Cqd::from(t.coeff).conj_mul(f.evaluate_qd(t.node)))
            .sum::<Cqd>()
            .re,
    }
}

/// `Σ_j w_j K(·, a_j)` with quad-double weights.
///
/// Orthonormal-system combinations such as `P_n f` have kernel weights that
/// are huge and cancel; rounded to `f64` they would lose every digit of the
/// function they describe. Nodes may repeat.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NodalExpansion {
    nodes: Vec<Complex64>,
    weights: Vec<Cqd>,
}

impl NodalExpansion {
    pub fn new(nodes: Vec<Complex64>, weights: Vec<Cqd>) -> Result<Self> {
        if nodes.len() != weights.len() {
            return Err(Error::LengthMismatch {
                expected: nodes.len(),
                found: weights.len(),
                missing: None,
            });
        }
        if let Some(a) = nodes.iter().find(|a| !(a.norm() < 1.0)) {
            return Err(Error::PreconditionViolated(format!(
                "kernel node {a} lies outside the open disc"
            )));
        }
        Ok(Self { nodes, weights })
    }

    pub(crate) fn from_parts(nodes: Vec<Complex64>, weights: Vec<Cqd>) -> Self {
        Self { nodes, weights }
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[Cqd] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        if !(z.norm() <= EVAL_RADIUS) {
            return Err(Error::NearSingular { re: z.re, im: z.im });
        }
        Ok(self.evaluate_qd(z).to_c64())
    }

    pub(crate) fn evaluate_qd(&self, z: Complex64) -> Cqd {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&a, w)| *w * kernel_qd(z, a))
            .sum()
    }

    /// `‖·‖² = Σ_{i,j} conj(w_i) w_j K(a_i, a_j)`.
    pub fn norm_sqr(&self) -> f64 {
        self.norm_sqr_qd().to_f64()
    }

    pub(crate) fn norm_sqr_qd(&self) -> Qd {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&ai, wi)| wi.conj_mul(self.evaluate_qd(ai)))
            .sum::<Cqd>()
            .re
    }

    /// `⟨f, self⟩` for a model function `f`.
    pub fn inner_product_with(&self, f: &BergmanFunction) -> Complex64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&a, w)| w.conj_mul(f.evaluate_qd(a)))
            .sum::<Cqd>()
            .to_c64()
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        let s = Cqd::from(s);
        Self {
            nodes: self.nodes.clone(),
            weights: self.weights.iter().map(|w| *w * s).collect(),
        }
    }

    /// Concatenation; shared nodes are kept as separate terms.
    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.nodes.extend_from_slice(&other.nodes);
        out.weights.extend_from_slice(&other.weights);
        out
    }

    /// Rounds the weights; only meaningful when they do not cancel.
    pub fn to_kernel_expansion(&self) -> Result<KernelExpansion> {
        KernelExpansion::new(self.nodes.iter().zip(&self.weights).map(|(&node, w)| KernelTerm {
            node,
            coeff: w.to_c64(),
        }))
    }
}

impl From<&KernelExpansion> for NodalExpansion {
    fn from(f: &KernelExpansion) -> Self {
        Self {
            nodes: f.terms.iter().map(|t| t.node).collect(),
            weights: f.terms.iter().map(|t| Cqd::from(t.coeff)).collect(),
        }
    }
}

pub fn norm(f: &BergmanFunction) -> f64 {
    f.norm()
}

pub fn evaluate(f: &BergmanFunction, z: Complex64) -> Result<Complex64> {
    f.evaluate(z)
}

/// `F_a(z)² = eps (1 - |b|²) / (1 - conj(b) z)²`; the square avoids choosing
/// a branch of `sqrt(eps)`.
pub fn cocycle_squared(a: &GroupElement, z: Complex64) -> Complex64 {
    let d = Complex64::new(1.0, 0.0) - a.b().conj() * z;
    a.eps() * (1.0 - a.b().norm_sqr()) / (d * d)
}

/// `U_a f = F_{a⁻¹}² · (f ∘ B_{a⁻¹})`, computed symbolically: each kernel
/// `K(·, w)` maps to `conj(eps)(1 - |b|²)/(1 - b conj(w))² · K(·, B_a(w))`.
pub fn representation_apply(a: &GroupElement, f: &KernelExpansion) -> KernelExpansion {
    let (b, eps) = (a.b(), a.eps());
    let scale = eps.conj() * (1.0 - b.norm_sqr());
    let terms = f
        .terms
        .iter()
        .map(|t| {
            let d = Complex64::new(1.0, 0.0) - b * t.node.conj();
            KernelTerm {
                node: blaschke_map(a, t.node).expect("|b|, |w| < 1 keeps B_a regular"),
                coeff: t.coeff * scale / (d * d),
            }
        })
        .collect();
    KernelExpansion::from_distinct(terms)
}

/// `(U_a f)(z)` straight from the definition, for any model function.
pub fn representation_at(a: &GroupElement, f: &BergmanFunction, z: Complex64) -> Result<Complex64> {
    let inv = a.inverse();
    let w = blaschke_map(&inv, z)?;
    Ok(cocycle_squared(&inv, z) * f.evaluate(w)?)
}

/// Voice transform `(V_g f)(x) = ⟨f, U_x g⟩`.
pub fn voice_transform(f: &BergmanFunction, g: &KernelExpansion, x: &GroupElement) -> Complex64 {
    let ug = BergmanFunction::Kernels(representation_apply(x, g));
    inner_product(f, &ug)
}
