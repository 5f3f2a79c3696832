//! Discrete hyperbolic wavelet transform: coefficients `b_m = ⟨f, ψ_m⟩` from
//! point samples, the projections `P_n` onto the resolution levels, the
//! detail operators `Q_n`, and residual / minimal-norm audits.
//!
//! Analysis needs only the values of `f` at the grid nodes: by the
//! reproducing property `⟨f, ψ_m⟩ = Σ_{j<=m} conj(C[m][j]) f(a_j)`.
//! That map amplifies sample errors by the size of `C`, so model functions
//! are sampled in quad-double; synthesis is well conditioned.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::function::{norm_sqr_qd, BergmanFunction, NodalExpansion};
use crate::grid::{build_grid, Grid, GridConfig};
use crate::orthonormal::{check_eval_point, orthonormalize, OrthonormalSystem};
use crate::qd::{Cqd, Qd};

/// Tolerance on `|ψ_{m'}(a_j)|` for a perturbation to count as vanishing on
/// the coarse nodes.
pub const VANISHING_TOL: f64 = 1e-10;

/// Relative tolerance of the Pythagorean identity in the minimal-norm audit.
pub const PYTHAGORAS_TOL: f64 = 1e-10;

/// A grid together with its orthonormal kernel system.
#[derive(Debug, Clone, PartialEq)]
pub struct Multiresolution {
    grid: Grid,
    system: OrthonormalSystem,
}

impl Multiresolution {
    pub fn build(config: &GridConfig) -> Result<Self> {
        let grid = build_grid(config);
        let system = orthonormalize(&grid)?;
        Ok(Self { grid, system })
    }

    /// Pairs a grid with a system built on exactly its nodes.
    pub fn new(grid: Grid, system: OrthonormalSystem) -> Result<Self> {
        if grid.nodes() != system.nodes() {
            return Err(Error::PreconditionViolated(
                "system nodes differ from grid nodes".into(),
            ));
        }
        Ok(Self { grid, system })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn system(&self) -> &OrthonormalSystem {
        &self.system
    }

    pub fn levels(&self) -> usize {
        self.grid.levels()
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    fn check_level(&self, n: usize) -> Result<()> {
        if n > self.levels() {
            return Err(Error::LevelOutOfRange {
                level: n,
                max: self.levels(),
            });
        }
        Ok(())
    }
}

/// `b_m = ⟨f, ψ_m⟩` in the grid's linear order.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletCoefficients {
    values: Vec<Complex64>,
    precise: Vec<Cqd>,
    level_offsets: Vec<usize>,
}

impl WaveletCoefficients {
    pub fn new(values: Vec<Complex64>, level_offsets: Vec<usize>) -> Result<Self> {
        let precise = values.iter().map(|&v| Cqd::from(v)).collect();
        Self::from_precise(precise, level_offsets)
    }

    fn from_precise(precise: Vec<Cqd>, level_offsets: Vec<usize>) -> Result<Self> {
        let ok = level_offsets.first() == Some(&0)
            && level_offsets.windows(2).all(|w| w[0] < w[1])
            && level_offsets.last().is_some_and(|&o| o < precise.len().max(1));
        if !ok {
            return Err(Error::PreconditionViolated(
                "level offsets do not partition the coefficients".into(),
            ));
        }
        Ok(Self {
            values: precise.iter().map(|v| v.to_c64()).collect(),
            precise,
            level_offsets,
        })
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn level_offsets(&self) -> &[usize] {
        &self.level_offsets
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn levels(&self) -> usize {
        self.level_offsets.len() - 1
    }

    /// `M_n`.
    pub fn count_through(&self, n: usize) -> usize {
        self.level_offsets
            .get(n + 1)
            .copied()
            .unwrap_or(self.values.len())
    }

    /// The block `{b_{n,l}}`.
    pub fn level(&self, n: usize) -> &[Complex64] {
        let start = self.level_offsets[n];
        &self.values[start..self.count_through(n)]
    }

    /// Coefficients of levels `0..=n`.
    pub fn through(&self, n: usize) -> &[Complex64] {
        &self.values[..self.count_through(n)]
    }

    pub fn energy_through(&self, n: usize) -> f64 {
        self.energy_through_qd(n).to_f64()
    }

    fn energy_through_qd(&self, n: usize) -> Qd {
        self.precise[..self.count_through(n)]
            .iter()
            .fold(Qd::ZERO, |acc, b| acc + b.norm_sqr())
    }
}

/// Wavelet coefficients from the samples `f(a_1), ..., f(a_M)`.
pub fn analyze(samples: &[Complex64], mra: &Multiresolution) -> Result<WaveletCoefficients> {
    let s: Vec<Cqd> = samples.iter().map(|&v| Cqd::from(v)).collect();
    analyze_qd(&s, mra)
}

pub(crate) fn analyze_qd(samples: &[Cqd], mra: &Multiresolution) -> Result<WaveletCoefficients> {
    if samples.len() != mra.len() {
        return Err(Error::LengthMismatch {
            expected: mra.len(),
            found: samples.len(),
            missing: None,
        });
    }
    let precise = mra
        .system
        .coefficients_qd()
        .iter()
        .map(|row| row.iter().zip(samples).map(|(c, f)| c.conj_mul(*f)).sum())
        .collect();
    WaveletCoefficients::from_precise(precise, mra.grid.level_offsets().to_vec())
}

/// Coefficients of a model function, sampled at the nodes in quad-double.
pub fn analyze_function(f: &BergmanFunction, mra: &Multiresolution) -> Result<WaveletCoefficients> {
    let s: Vec<Cqd> = mra.grid.nodes().iter().map(|&a| f.evaluate_qd(a)).collect();
    analyze_qd(&s, mra)
}

/// Coefficients of a kernel combination with full-precision weights.
pub fn analyze_nodal(f: &NodalExpansion, mra: &Multiresolution) -> Result<WaveletCoefficients> {
    let s: Vec<Cqd> = mra.grid.nodes().iter().map(|&a| f.evaluate_qd(a)).collect();
    analyze_qd(&s, mra)
}

/// Samples of a model function at every node.
pub fn sample(f: &BergmanFunction, mra: &Multiresolution) -> Result<Vec<Complex64>> {
    f.samples(mra.grid.nodes())
}

fn check_coeffs(coeffs: &WaveletCoefficients, mra: &Multiresolution) -> Result<()> {
    if coeffs.len() != mra.len() {
        return Err(Error::LengthMismatch {
            expected: mra.len(),
            found: coeffs.len(),
            missing: None,
        });
    }
    Ok(())
}

/// `Σ_{m in range} b_m ψ_m` rewritten as a kernel combination.
fn combine(coeffs: &WaveletCoefficients, mra: &Multiresolution, range: std::ops::Range<usize>) -> NodalExpansion {
    let c = mra.system.coefficients_qd();
    let end = range.end;
    let mut weights = vec![Cqd::ZERO; end];
    for m in range {
        let b = coeffs.precise[m];
        for (w, cm) in weights.iter_mut().zip(&c[m]) {
            *w += b * *cm;
        }
    }
    NodalExpansion::from_parts(mra.grid.nodes()[..end].to_vec(), weights)
}

/// `P_n f` as a kernel combination over the nodes of levels `0..=n`.
pub fn projection(coeffs: &WaveletCoefficients, mra: &Multiresolution, n: usize) -> Result<NodalExpansion> {
    check_coeffs(coeffs, mra)?;
    mra.check_level(n)?;
    Ok(combine(coeffs, mra, 0..mra.grid.count_through(n)))
}

/// `Σ_m b_m ψ_m(z)` over all coefficients.
pub fn synthesize(coeffs: &WaveletCoefficients, mra: &Multiresolution, z: Complex64) -> Result<Complex64> {
    synthesize_level(coeffs, mra, mra.levels(), z)
}

/// `P_n f(z)`.
pub fn synthesize_level(
    coeffs: &WaveletCoefficients,
    mra: &Multiresolution,
    n: usize,
    z: Complex64,
) -> Result<Complex64> {
    check_eval_point(z)?;
    projection(coeffs, mra, n)?.evaluate(z)
}

/// `𝐊_N(z, ξ) = Σ_{m<=N} ψ_m(z) conj(ψ_m(ξ))`.
pub fn projection_kernel(system: &OrthonormalSystem, n_terms: usize, z: Complex64, xi: Complex64) -> Result<Complex64> {
    if n_terms > system.len() {
        return Err(Error::IndexOutOfRange(format!(
            "{n_terms} terms requested from a system of {}",
            system.len()
        )));
    }
    let pz = system.psi_values_qd(z, n_terms)?;
    let px = system.psi_values_qd(xi, n_terms)?;
    Ok(pz
        .iter()
        .zip(&px)
        .map(|(a, b)| b.conj_mul(*a))
        .sum::<Cqd>()
        .to_c64())
}

/// `Q_n f = Σ_l b_{n+1,l} ψ_{n+1,l}` as a kernel combination.
pub fn detail_expansion(coeffs: &WaveletCoefficients, mra: &Multiresolution, n: usize) -> Result<NodalExpansion> {
    check_coeffs(coeffs, mra)?;
    mra.check_level(n + 1)?;
    let start = mra.grid.level_offsets()[n + 1];
    let end = mra.grid.count_through(n + 1);
    Ok(combine(coeffs, mra, start..end))
}

/// `Q_n f(z)`.
pub fn detail(coeffs: &WaveletCoefficients, mra: &Multiresolution, n: usize, z: Complex64) -> Result<Complex64> {
    let q = detail_expansion(coeffs, mra, n)?;
    check_eval_point(z)?;
    q.evaluate(z)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelResidual {
    pub level: usize,
    /// `M_n`.
    pub count: usize,
    /// `‖f‖² - Σ_{m<=M_n} |b_m|²`.
    pub residual_sq: f64,
    /// `sqrt(max(residual_sq, 0))`.
    pub residual_norm: f64,
}

/// Per-level residuals `‖f - P_n f‖` via the Parseval identity.
pub fn error_report(f: &BergmanFunction, mra: &Multiresolution) -> Result<Vec<LevelResidual>> {
    let coeffs = analyze_function(f, mra)?;
    Ok(residuals_qd(norm_sqr_qd(f), &coeffs))
}

/// Parseval residuals given `‖f‖²` and the full coefficient vector.
pub fn residuals(norm_sq: f64, coeffs: &WaveletCoefficients) -> Vec<LevelResidual> {
    residuals_qd(Qd::from(norm_sq), coeffs)
}

fn residuals_qd(norm_sq: Qd, coeffs: &WaveletCoefficients) -> Vec<LevelResidual> {
    (0..=coeffs.levels())
        .map(|n| {
            let r = (norm_sq - coeffs.energy_through_qd(n)).to_f64();
            LevelResidual {
                level: n,
                count: coeffs.count_through(n),
                residual_sq: r,
                residual_norm: r.max(0.0).sqrt(),
            }
        })
        .collect()
}

/// `‖f - P_n f‖` for a kernel-combination `f`, from the difference expansion
/// (no Parseval subtraction).
pub fn direct_residual_norm(f: &NodalExpansion, coeffs: &WaveletCoefficients, mra: &Multiresolution, n: usize) -> Result<f64> {
    let diff = f.plus(&projection(coeffs, mra, n)?.scaled(Complex64::new(-1.0, 0.0)));
    Ok(diff.norm_sqr().max(0.0).sqrt())
}

/// Outcome of one perturbation `h = c ψ_{m'}` of `P_n f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationOutcome {
    pub m_prime: usize,
    /// `ψ_{m'}` does not vanish on the level-`<= n` nodes; nothing was tested.
    pub skipped: bool,
    /// `‖P_n f‖²`.
    pub base_norm_sq: f64,
    /// `‖P_n f + h‖²`.
    pub perturbed_norm_sq: f64,
    /// `‖P_n f‖² + |c|²`.
    pub pythagorean: f64,
}

impl PerturbationOutcome {
    pub fn deviation(&self) -> f64 {
        (self.perturbed_norm_sq - self.pythagorean).abs()
    }

    pub fn pythagorean_holds(&self, rel_tol: f64) -> bool {
        !self.skipped && self.deviation() <= rel_tol * self.pythagorean.max(1.0)
    }

    pub fn strictly_larger(&self) -> bool {
        !self.skipped && self.perturbed_norm_sq > self.base_norm_sq
    }
}

/// Tests one perturbation of the interpolant `pn` (= `P_n f`). Both norms
/// come from the kernel Gram form, not from the coefficients.
pub fn check_perturbation(
    mra: &Multiresolution,
    pn: &NodalExpansion,
    n: usize,
    m_prime: usize,
    c: Complex64,
) -> Result<PerturbationOutcome> {
    let coarse = mra.grid.count_through(n);
    let sys = &mra.system;
    let psi = sys.psi_nodal(m_prime)?;
    let vanishes = sys.psi_at_nodes()[m_prime - 1][..coarse]
        .iter()
        .all(|v| v.norm() < VANISHING_TOL);
    let base_norm_sq = pn.norm_sqr();
    if !vanishes {
        return Ok(PerturbationOutcome {
            m_prime,
            skipped: true,
            base_norm_sq,
            perturbed_norm_sq: f64::NAN,
            pythagorean: f64::NAN,
        });
    }
    let perturbed = pn.plus(&psi.scaled(c));
    Ok(PerturbationOutcome {
        m_prime,
        skipped: false,
        base_norm_sq,
        perturbed_norm_sq: perturbed.norm_sqr(),
        pythagorean: base_norm_sq + c.norm_sqr(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimalNormReport {
    pub trials: usize,
    pub passed: usize,
    pub skipped: usize,
    pub max_deviation: f64,
}

impl MinimalNormReport {
    pub fn all_passed(&self) -> bool {
        self.passed == self.trials
    }
}

/// Randomized certificate that `P_n f` is the smallest-norm interpolant among
/// `P_n f + c ψ_{m'}` with `a_{m'}` deeper than level `n`.
pub fn minimal_norm_check<R: Rng + ?Sized>(
    f: &BergmanFunction,
    mra: &Multiresolution,
    n: usize,
    trials: usize,
    rng: &mut R,
) -> Result<MinimalNormReport> {
    mra.check_level(n)?;
    let coarse = mra.grid.count_through(n);
    if coarse >= mra.len() {
        return Err(Error::InsufficientDepth(n));
    }
    let coeffs = analyze_function(f, mra)?;
    let pn = projection(&coeffs, mra, n)?;
    let mut report = MinimalNormReport {
        trials,
        passed: 0,
        skipped: 0,
        max_deviation: 0.0,
    };
    for _ in 0..trials {
        let m_prime = rng.gen_range(coarse + 1..=mra.len());
        let c = loop {
            let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            if c.norm() > 1e-3 {
                break c;
            }
        };
        let out = check_perturbation(mra, &pn, n, m_prime, c)?;
        if out.skipped {
            report.skipped += 1;
            continue;
        }
        report.max_deviation = report.max_deviation.max(out.deviation());
        if out.pythagorean_holds(PYTHAGORAS_TOL) && out.strictly_larger() {
            report.passed += 1;
        }
    }
    Ok(report)
}
