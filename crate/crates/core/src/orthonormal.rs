//! Orthonormal kernel system on an ordered node list `a_1, ..., a_M`.
//!
//! `ψ_m = Σ_{j<=m} C[m][j] K(·, a_j)` is the normalized component of
//! `K(·, a_m)` orthogonal to the kernels at the earlier nodes. Equivalently
//! `ψ_m = K_{A_{m-1}}(·, a_m) / sqrt(d_m)` where `K_{A_m}` is the reproducing
//! kernel of the functions vanishing on `{a_1, ..., a_m}` and
//! `d_m = K_{A_{m-1}}(a_m, a_m)`.
//!
//! The production path is modified Gram–Schmidt carried out in kernel
//! coordinates, with the Hilbert-space geometry supplied by the Gram matrix.
//! The residual-kernel recursion lives in [`crate::recursion`] as an
//! independent construction.
//!
//! `C` grows like the inverse square root of the smallest pivot, so the
//! construction, the stored coefficients and every sum of coefficients
//! against kernel values use quad-double arithmetic ([`crate::qd`]).
//! The `f64` accessors are rounded copies.
//!
//! Public `m` indices are 1-based, matching the grid's linear order.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::qd::{kernel_qd, Cqd, Qd};
use crate::error::{Error, Result};
use crate::function::{kernel_in_disc, KernelExpansion, KernelTerm, NodalExpansion, EVAL_RADIUS};
use crate::grid::Grid;

/// Relative pivot floor: `d_m <= PIVOT_FLOOR * K(a_m, a_m)` is degenerate.
pub const PIVOT_FLOOR: f64 = 1e-20;

/// Off-diagonal level of `C G C*` that triggers a second projection pass.
pub const REORTHOGONALIZE_ABOVE: f64 = 1e-10;

/// Pivot spread above which results deserve a conditioning warning.
pub const PIVOT_RATIO_WARN: f64 = 1e10;

const DUPLICATE_TOL: f64 = 1e-14;

pub type ComplexMatrix = Vec<Vec<Complex64>>;
pub type QdMatrix = Vec<Vec<Cqd>>;

/// `G[i][j] = K(a_i, a_j) = ⟨K(·, a_j), K(·, a_i)⟩`.
pub fn gram_matrix(nodes: &[Complex64]) -> Result<ComplexMatrix> {
    check_nodes(nodes)?;
    Ok(nodes
        .iter()
        .map(|&ai| nodes.iter().map(|&aj| kernel_in_disc(ai, aj)).collect())
        .collect())
}

pub(crate) fn gram_qd(nodes: &[Complex64]) -> QdMatrix {
    nodes
        .par_iter()
        .map(|&ai| nodes.iter().map(|&aj| kernel_qd(ai, aj)).collect())
        .collect()
}

pub(crate) fn check_nodes(nodes: &[Complex64]) -> Result<()> {
    for (i, a) in nodes.iter().enumerate() {
        if !(a.norm() < 1.0) {
            return Err(Error::PreconditionViolated(format!(
                "node {} = {a} lies outside the open disc",
                i + 1
            )));
        }
        for (j, b) in nodes[..i].iter().enumerate() {
            if (a - b).norm() < DUPLICATE_TOL {
                return Err(Error::DuplicateNode {
                    first: j + 1,
                    second: i + 1,
                });
            }
        }
    }
    Ok(())
}

fn round_matrix(m: &QdMatrix) -> ComplexMatrix {
    m.iter().map(|row| row.iter().map(|x| x.to_c64()).collect()).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalSystem {
    nodes: Vec<Complex64>,
    /// Row `i` (0-based) holds `C[i][0..=i]`.
    coeffs: QdMatrix,
    pivots: Vec<Qd>,
    /// `psi[i][j] = ψ_{i+1}(a_{j+1})`.
    psi: QdMatrix,
    coeffs_f64: ComplexMatrix,
    pivots_f64: Vec<f64>,
    psi_f64: ComplexMatrix,
    reorthogonalized: bool,
}

/// Orthonormalizes the kernels at the grid nodes in canonical order.
pub fn orthonormalize(grid: &Grid) -> Result<OrthonormalSystem> {
    orthonormalize_nodes(grid.nodes())
}

/// Modified Gram–Schmidt on `K(·, a_1), ..., K(·, a_M)`. Repeated with a
/// second projection pass per vector when the orthonormality defect exceeds
/// [`REORTHOGONALIZE_ABOVE`].
pub fn orthonormalize_nodes(nodes: &[Complex64]) -> Result<OrthonormalSystem> {
    check_nodes(nodes)?;
    let gram = gram_qd(nodes);
    let sys = gram_schmidt(nodes, &gram, 1)?;
    if sys.audit_with(&gram).max_off_diagonal <= REORTHOGONALIZE_ABOVE {
        return Ok(sys);
    }
    gram_schmidt(nodes, &gram, 2)
}

fn gram_schmidt(nodes: &[Complex64], gram: &QdMatrix, passes: usize) -> Result<OrthonormalSystem> {
    let n = nodes.len();
    let mut coeffs: QdMatrix = Vec::with_capacity(n);
    let mut psi: QdMatrix = Vec::with_capacity(n);
    let mut pivots = Vec::with_capacity(n);

    for m in 0..n {
        // u = K(·, a_m) in kernel coordinates, with its values at every node.
        let mut u = vec![Cqd::ZERO; m + 1];
        u[m] = Cqd::ONE;
        let mut vals: Vec<Cqd> = (0..n).map(|j| gram[j][m]).collect();

        for _ in 0..passes {
            for i in 0..m {
                // ⟨u, ψ_i⟩ = Σ_k conj(C[i][k]) u(a_k)
                let proj: Cqd = coeffs[i].iter().zip(&vals).map(|(c, v)| c.conj_mul(*v)).sum();
                for (uk, ck) in u.iter_mut().zip(&coeffs[i]) {
                    *uk -= proj * *ck;
                }
                for (vk, pk) in vals.iter_mut().zip(&psi[i]) {
                    *vk -= proj * *pk;
                }
            }
        }

        // ‖u‖² = Σ_k conj(u_k) u(a_k)
        let d = u
            .iter()
            .zip(&vals)
            .fold(Qd::ZERO, |acc, (uk, vk)| acc + uk.conj_mul(*vk).re);
        check_pivot(m, d, nodes[m])?;
        let s = d.sqrt().recip();
        coeffs.push(u.into_iter().map(|x| x.scale(s)).collect());
        psi.push(vals.into_iter().map(|x| x.scale(s)).collect());
        pivots.push(d);
    }

    Ok(OrthonormalSystem::assemble(nodes.to_vec(), coeffs, pivots, psi, passes > 1))
}

pub(crate) fn check_pivot(m: usize, d: Qd, node: Complex64) -> Result<()> {
    let diag = kernel_in_disc(node, node).re;
    if !(d.to_f64() > PIVOT_FLOOR * diag) {
        return Err(Error::DegeneratePivot {
            m: m + 1,
            pivot: d.to_f64(),
            diag,
        });
    }
    Ok(())
}

/// Largest deviations of `C G C*` from the identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrthonormalityAudit {
    pub max_diagonal: f64,
    pub max_off_diagonal: f64,
}

impl OrthonormalityAudit {
    pub fn defect(&self) -> f64 {
        self.max_diagonal.max(self.max_off_diagonal)
    }
}

impl OrthonormalSystem {
    fn assemble(nodes: Vec<Complex64>, coeffs: QdMatrix, pivots: Vec<Qd>, psi: QdMatrix, reorthogonalized: bool) -> Self {
        Self {
            coeffs_f64: round_matrix(&coeffs),
            pivots_f64: pivots.iter().map(|d| d.to_f64()).collect(),
            psi_f64: round_matrix(&psi),
            nodes,
            coeffs,
            pivots,
            psi,
            reorthogonalized,
        }
    }

    /// Reassembles a system from stored coefficients (e.g. a cache file);
    /// values at the nodes are recomputed from `C` and the kernels.
    pub fn from_parts(nodes: Vec<Complex64>, coeffs: QdMatrix, pivots: Vec<Qd>) -> Result<Self> {
        check_nodes(&nodes)?;
        let n = nodes.len();
        if coeffs.len() != n || pivots.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: coeffs.len().min(pivots.len()),
                missing: None,
            });
        }
        for (i, row) in coeffs.iter().enumerate() {
            if row.len() != i + 1 {
                return Err(Error::PreconditionViolated(format!(
                    "coefficient row {} has {} entries, expected {}",
                    i + 1,
                    row.len(),
                    i + 1
                )));
            }
        }
        for (i, d) in pivots.iter().enumerate() {
            check_pivot(i, *d, nodes[i])?;
        }
        let gram = gram_qd(&nodes);
        let psi = values_at_nodes(&coeffs, &gram);
        Ok(Self::assemble(nodes, coeffs, pivots, psi, false))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    /// Lower-triangular rows: `coefficients()[i][j] = C[i+1][j+1]`, rounded.
    pub fn coefficients(&self) -> &ComplexMatrix {
        &self.coeffs_f64
    }

    pub fn coefficients_qd(&self) -> &QdMatrix {
        &self.coeffs
    }

    /// `d_m` for `m = 1..=M` (0-based storage).
    pub fn pivots(&self) -> &[f64] {
        &self.pivots_f64
    }

    pub fn pivots_qd(&self) -> &[Qd] {
        &self.pivots
    }

    /// `psi_at_nodes()[i][j] = ψ_{i+1}(a_{j+1})`.
    pub fn psi_at_nodes(&self) -> &ComplexMatrix {
        &self.psi_f64
    }

    pub fn psi_at_nodes_qd(&self) -> &QdMatrix {
        &self.psi
    }

    /// Whether construction needed the second projection pass.
    pub fn reorthogonalized(&self) -> bool {
        self.reorthogonalized
    }

    pub fn pivot_ratio(&self) -> f64 {
        let max = self.pivots_f64.iter().copied().fold(f64::MIN, f64::max);
        let min = self.pivots_f64.iter().copied().fold(f64::MAX, f64::min);
        max / min
    }

    fn check_m(&self, m: usize) -> Result<()> {
        if m == 0 || m > self.len() {
            return Err(Error::IndexOutOfRange(format!(
                "ψ index {m} outside 1..={}",
                self.len()
            )));
        }
        Ok(())
    }

    /// `ψ_m` as a kernel combination with rounded coefficients. Sums of
    /// these lose digits to cancellation; prefer [`Self::psi_evaluate`].
    pub fn expansion(&self, m: usize) -> Result<KernelExpansion> {
        self.check_m(m)?;
        Ok(KernelExpansion::from_distinct(
            self.coeffs_f64[m - 1]
                .iter()
                .zip(&self.nodes)
                .map(|(&coeff, &node)| KernelTerm { node, coeff })
                .collect(),
        ))
    }

    /// `ψ_m` with its full-precision kernel weights.
    pub fn psi_nodal(&self, m: usize) -> Result<NodalExpansion> {
        self.check_m(m)?;
        Ok(NodalExpansion::from_parts(
            self.nodes[..m].to_vec(),
            self.coeffs[m - 1].clone(),
        ))
    }

    /// `ψ_m(z)`.
    pub fn psi_evaluate(&self, m: usize, z: Complex64) -> Result<Complex64> {
        self.check_m(m)?;
        check_eval_point(z)?;
        Ok(self.coeffs[m - 1]
            .iter()
            .zip(&self.nodes)
            .map(|(c, &a)| *c * kernel_qd(z, a))
            .sum::<Cqd>()
            .to_c64())
    }

    /// `[ψ_1(z), ..., ψ_upto(z)]`.
    pub fn psi_values(&self, z: Complex64, upto: usize) -> Result<Vec<Complex64>> {
        Ok(self.psi_values_qd(z, upto)?.into_iter().map(|x| x.to_c64()).collect())
    }

    pub(crate) fn psi_values_qd(&self, z: Complex64, upto: usize) -> Result<Vec<Cqd>> {
        check_eval_point(z)?;
        let upto = upto.min(self.len());
        let k: Vec<Cqd> = self.nodes[..upto].iter().map(|&a| kernel_qd(z, a)).collect();
        Ok(self.coeffs[..upto]
            .iter()
            .map(|row| row.iter().zip(&k).map(|(c, kv)| *c * *kv).sum())
            .collect())
    }

    /// `K_{A_m}(z, w) = K(z, w) - Σ_{i<=m} ψ_i(z) conj(ψ_i(w))`, `0 <= m <= M`.
    pub fn residual_kernel(&self, m: usize, z: Complex64, w: Complex64) -> Result<Complex64> {
        if m > self.len() {
            return Err(Error::IndexOutOfRange(format!(
                "residual index {m} exceeds {}",
                self.len()
            )));
        }
        let pz = self.psi_values_qd(z, m)?;
        let pw = self.psi_values_qd(w, m)?;
        let proj: Cqd = pz.iter().zip(&pw).map(|(a, b)| b.conj_mul(*a)).sum();
        Ok((kernel_qd(z, w) - proj).to_c64())
    }

    /// Solves the lower-triangular system `⟨ψ_n, ψ_m⟩ = δ_{nm}`, `n = m, m-1, ..., 1`,
    /// whose rows are the values `ψ_n(a_m), ψ_n(a_{m-1}), ..., ψ_n(a_n)`, for
    /// the conjugated partial-fraction coefficients of `ψ_m`. Returned in node
    /// order: entry `j-1` is `conj(C[m][j])`.
    pub fn triangular_coefficients_oracle(&self, m: usize) -> Result<Vec<Cqd>> {
        self.check_m(m)?;
        let p = &self.psi;
        let mut x = vec![Cqd::ZERO; m];
        // Row for ψ_n (0-based n), unknowns ordered a_m, a_{m-1}, ... .
        for n in (0..m).rev() {
            let diag = p[n][n];
            if diag.norm_sqr().to_f64() == 0.0 || !diag.is_finite() {
                return Err(Error::SingularTriangle(n + 1));
            }
            let rhs = if n == m - 1 { Cqd::ONE } else { Cqd::ZERO };
            let acc: Cqd = (n + 1..m).map(|j| p[n][j] * x[j]).sum();
            x[n] = (rhs - acc) / diag;
        }
        Ok(x)
    }

    /// `max_{i,l} |⟨ψ_i, ψ_l⟩ - δ_{il}|`, from `C` and the Gram matrix only.
    pub fn orthonormality_defect(&self) -> f64 {
        self.orthonormality_audit().defect()
    }

    /// Largest off-diagonal entry of the Gram matrix of `ψ`.
    pub fn max_off_diagonal(&self) -> f64 {
        self.orthonormality_audit().max_off_diagonal
    }

    pub fn orthonormality_audit(&self) -> OrthonormalityAudit {
        self.audit_with(&gram_qd(&self.nodes))
    }

    fn audit_with(&self, gram: &QdMatrix) -> OrthonormalityAudit {
        // h[i][k] = Σ_j C[i][j] G[k][j] = ⟨ψ_i, K(·, a_k)⟩
        let h = values_at_nodes(&self.coeffs, gram);
        let rows: Vec<(f64, f64)> = (0..self.len())
            .into_par_iter()
            .map(|i| {
                let mut diag: f64 = 0.0;
                let mut off: f64 = 0.0;
                for l in 0..=i {
                    let ip: Cqd = self.coeffs[l].iter().zip(&h[i]).map(|(c, hv)| c.conj_mul(*hv)).sum();
                    if l == i {
                        diag = (ip - Cqd::ONE).to_c64().norm();
                    } else {
                        off = off.max(ip.to_c64().norm());
                    }
                }
                (diag, off)
            })
            .collect();
        OrthonormalityAudit {
            max_diagonal: rows.iter().map(|r| r.0).fold(0.0, f64::max),
            max_off_diagonal: rows.iter().map(|r| r.1).fold(0.0, f64::max),
        }
    }
}

/// `P[i][k] = Σ_j C[i][j] G[k][j]`.
fn values_at_nodes(coeffs: &QdMatrix, gram: &QdMatrix) -> QdMatrix {
    coeffs
        .par_iter()
        .map(|row| {
            gram.iter()
                .map(|gk| row.iter().zip(gk).map(|(c, g)| *c * *g).sum())
                .collect()
        })
        .collect()
}

pub(crate) fn check_eval_point(z: Complex64) -> Result<()> {
    if !(z.norm() <= EVAL_RADIUS) {
        return Err(Error::NearSingular { re: z.re, im: z.im });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::{inner_product, BergmanFunction};
    use crate::grid::{build_grid, GridConfig};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_nodes(rng: &mut ChaCha8Rng, n: usize, rmax: f64) -> Vec<Complex64> {
        (0..n)
            .map(|_| Complex64::from_polar(rmax * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU)))
            .collect()
    }

    #[test]
    fn gram_matrix_examples() {
        assert_eq!(gram_matrix(&[c(0.0, 0.0)]).unwrap(), vec![vec![c(1.0, 0.0)]]);
        let g = gram_matrix(&[c(0.0, 0.0), c(0.6, 0.0)]).unwrap();
        assert_eq!(g[0][0], c(1.0, 0.0));
        assert_eq!(g[0][1], c(1.0, 0.0));
        assert_eq!(g[1][0], c(1.0, 0.0));
        assert!((g[1][1] - c(2.44140625, 0.0)).norm() < 1e-14);
        assert!(matches!(
            gram_matrix(&[c(0.1, 0.0), c(0.2, 0.0), c(0.1, 0.0)]),
            Err(Error::DuplicateNode { first: 1, second: 3 })
        ));
    }

    #[test]
    fn gram_matrix_is_hermitian_positive_definite() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [2, 5, 10] {
            let nodes = random_nodes(&mut rng, n, 0.9);
            let g = gram_matrix(&nodes).unwrap();
            let mat = nalgebra::DMatrix::from_fn(n, n, |i, j| g[i][j]);
            assert!((mat.clone() - mat.adjoint()).norm() < 1e-12);
            let eig = nalgebra::SymmetricEigen::new(mat);
            let min = eig.eigenvalues.iter().copied().fold(f64::MAX, f64::min);
            assert!(min > 0.0, "n={n} min eigenvalue {min}");
        }
        // Larger sets have eigenvalues below f64 resolution; positive
        // quad-double Cholesky pivots certify definiteness instead.
        for n in [30, 50] {
            let nodes = random_nodes(&mut rng, n, 0.9);
            let sys = orthonormalize_nodes(&nodes).unwrap();
            assert!(sys.pivots().iter().all(|&d| d > 0.0));
        }
    }

    #[test]
    fn orthonormalize_single_node() {
        let sys = orthonormalize_nodes(&[c(0.0, 0.0)]).unwrap();
        assert_eq!(sys.coefficients(), &vec![vec![c(1.0, 0.0)]]);
        assert_eq!(sys.pivots(), &[1.0]);
        for z in [c(0.3, 0.2), c(-0.9, 0.0)] {
            assert!((sys.psi_evaluate(1, z).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn orthonormalize_two_nodes() {
        let sys = orthonormalize_nodes(&[c(0.0, 0.0), c(0.6, 0.0)]).unwrap();
        assert!((sys.pivots()[1] - 1.44140625).abs() < 1e-14);
        let v = sys.psi_evaluate(2, c(0.6, 0.0)).unwrap();
        assert!((v - c(1.200_585_79, 0.0)).norm() < 1e-8);
        assert!((v - c(1.44140625f64.sqrt(), 0.0)).norm() < 1e-14);
        assert!(sys.psi_evaluate(2, c(0.0, 0.0)).unwrap().norm() < 1e-15);
        // ψ_2 = (K(·,0.6) - 1) / sqrt(d_2)
        let s = 1.44140625f64.sqrt();
        assert!((sys.coefficients()[1][0] - c(-1.0 / s, 0.0)).norm() < 1e-14);
        assert!((sys.coefficients()[1][1] - c(1.0 / s, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn structural_invariants_on_grid() {
        let grid = build_grid(&GridConfig::sqrt2(3).unwrap());
        let sys = orthonormalize(&grid).unwrap();
        assert!(sys.orthonormality_defect() < 1e-8);
        for m in 1..=sys.len() {
            assert!(sys.pivots()[m - 1] > 0.0);
            let row = &sys.psi_at_nodes()[m - 1];
            let diag = row[m - 1];
            assert!(diag.im.abs() < 1e-10 * diag.re);
            assert!((diag.re - sys.pivots()[m - 1].sqrt()).abs() < 1e-10 * diag.re);
            let direct = sys.psi_evaluate(m, sys.nodes()[m - 1]).unwrap();
            assert!((direct - diag).norm() < 1e-10 * diag.norm());
            for j in 0..m - 1 {
                assert!(row[j].norm() < 1e-10, "P[{m}][{}] = {}", j + 1, row[j]);
                assert!(sys.psi_evaluate(m, sys.nodes()[j]).unwrap().norm() < 1e-10);
            }
        }
    }

    #[test]
    fn residual_kernel_properties() {
        let grid = build_grid(&GridConfig::sqrt2(2).unwrap());
        let sys = orthonormalize(&grid).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let pts = random_nodes(&mut rng, 20, 0.9);
        for w in pts.chunks(2) {
            let (z, w) = (w[0], w[1]);
            assert!((sys.residual_kernel(0, z, w).unwrap() - kernel_in_disc(z, w)).norm() < 1e-14);
            for m in [1, 5, sys.len()] {
                let k = sys.residual_kernel(m, z, w).unwrap();
                let kt = sys.residual_kernel(m, w, z).unwrap();
                assert!((k - kt.conj()).norm() < 1e-12 * (1.0 + k.norm()));
                assert!(sys.residual_kernel(m, z, z).unwrap().re >= -1e-10);
                for j in 0..m {
                    assert!(sys.residual_kernel(m, sys.nodes()[j], w).unwrap().norm() < 1e-9);
                }
            }
        }
        assert!(sys.residual_kernel(sys.len() + 1, c(0.0, 0.0), c(0.0, 0.0)).is_err());
    }

    #[test]
    fn triangular_oracle_examples() {
        let sys = orthonormalize_nodes(&[c(0.0, 0.0)]).unwrap();
        assert_eq!(sys.triangular_coefficients_oracle(1).unwrap(), vec![Cqd::ONE]);

        let sys = orthonormalize_nodes(&[c(0.0, 0.0), c(0.6, 0.0)]).unwrap();
        let x = sys.triangular_coefficients_oracle(2).unwrap();
        let s = 1.44140625f64.sqrt();
        // Row ψ_2: ψ_2(0.6) x_2 = 1; row ψ_1: ψ_1(0.6) x_2 + ψ_1(0) x_1 = 0.
        assert!((x[1].to_c64() - c(1.0 / s, 0.0)).norm() < 1e-12);
        assert!((x[0].to_c64() - c(-1.0 / s, 0.0)).norm() < 1e-12);
        for (xj, cj) in x.iter().zip(&sys.coefficients()[1]) {
            assert!((xj.to_c64() - cj.conj()).norm() < 1e-12);
        }
        assert!(sys.triangular_coefficients_oracle(3).is_err());
    }

    #[test]
    fn extremal_property() {
        let grid = build_grid(&GridConfig::sqrt2(2).unwrap());
        let sys = orthonormalize(&grid).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let n = sys.len();
        for m in [2, 5, 9, n - 3] {
            let peak = sys.psi_at_nodes()[m - 1][m - 1].re;
            for _ in 0..50 {
                let mut x: Vec<Complex64> = (m..=n)
                    .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect();
                let norm = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
                x.iter_mut().for_each(|v| *v /= norm);
                let g_at: Complex64 = x
                    .iter()
                    .enumerate()
                    .map(|(i, xi)| xi * sys.psi_evaluate(m + i, sys.nodes()[m - 1]).unwrap())
                    .sum();
                assert!(g_at.re <= peak + 1e-10);
            }
        }
    }

    #[test]
    fn psi_expansion_is_unit_norm() {
        let sys = orthonormalize_nodes(&[c(0.0, 0.0), c(0.5, 0.1), c(-0.3, 0.6)]).unwrap();
        for m in 1..=3 {
            let f = BergmanFunction::from(sys.expansion(m).unwrap());
            assert!((inner_product(&f, &f).re - 1.0).abs() < 1e-12);
        }
        assert!(sys.expansion(0).is_err());
        assert!(sys.psi_evaluate(1, c(1.0, 0.0)).is_err());
    }

    #[test]
    fn from_parts_recovers_values() {
        let grid = build_grid(&GridConfig::standard(1).unwrap());
        let sys = orthonormalize(&grid).unwrap();
        let back = OrthonormalSystem::from_parts(
            sys.nodes().to_vec(),
            sys.coefficients_qd().clone(),
            sys.pivots_qd().to_vec(),
        )
        .unwrap();
        for (a, b) in sys.psi_at_nodes_qd().iter().zip(back.psi_at_nodes_qd()) {
            for (x, y) in a.iter().zip(b) {
                assert!((*x - *y).to_c64().norm() < 1e-12);
            }
        }
        assert!(OrthonormalSystem::from_parts(vec![c(0.0, 0.0)], vec![], vec![]).is_err());
    }
}
