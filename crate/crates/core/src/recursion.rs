//! Residual-kernel recursion
//!
//! `K_{A_{m+1}}(z, w) = K_{A_m}(z, w) - K_{A_m}(z, a_{m+1}) K_{A_m}(a_{m+1}, w) / K_{A_m}(a_{m+1}, a_{m+1})`
//! with `K_{A_0} = K`.
//!
//! Works on kernel values only (a Schur-complement sweep over the Gram
//! matrix) and never forms an inner product, so it serves as an independent
//! route to the orthonormal system built by Gram–Schmidt.

use num_complex::Complex64;

use crate::qd::{kernel_qd, Cqd, Qd};
use crate::error::{Error, Result};
use crate::orthonormal::{check_nodes, check_pivot, gram_qd, QdMatrix, OrthonormalSystem};

/// Builds `ψ_m = K_{A_{m-1}}(·, a_m) / sqrt(K_{A_{m-1}}(a_m, a_m))` by tracking
/// each residual kernel `K_{A_m}(·, a_j)` as a kernel combination.
pub fn orthonormalize_by_recursion(nodes: &[Complex64]) -> Result<OrthonormalSystem> {
    check_nodes(nodes)?;
    let n = nodes.len();
    // r[i][j] = K_{A_t}(a_i, a_j) for i, j >= t.
    let mut r = gram_qd(nodes);
    // e[j][k]: coefficient of K(·, a_k) in K_{A_t}(·, a_j).
    let mut e: QdMatrix = (0..n)
        .map(|j| {
            let mut row = vec![Cqd::ZERO; j + 1];
            row[j] = Cqd::ONE;
            row
        })
        .collect();
    let mut coeffs = Vec::with_capacity(n);
    let mut pivots = Vec::with_capacity(n);

    for t in 0..n {
        let d = r[t][t].re;
        check_pivot(t, d, nodes[t])?;
        let s = d.sqrt().recip();
        coeffs.push(e[t].iter().map(|x| x.scale(s)).collect::<Vec<_>>());
        pivots.push(d);

        // Only the lower triangle is kept: K_{A_t}(a_t, a_j) is taken as
        // conj(K_{A_t}(a_j, a_t)). Updating both triangles independently lets
        // rounding break the Hermitian symmetry, and the asymmetry is
        // amplified at every small pivot.
        let inv = d.recip();
        let col: Vec<Cqd> = (t + 1..n).map(|i| r[i][t]).collect();
        let (head, tail) = e.split_at_mut(t + 1);
        let et = &head[t];
        for (ej, cj) in tail.iter_mut().zip(&col) {
            let f = cj.conj().scale(inv);
            for k in 0..=t {
                ej[k] -= et[k] * f;
            }
        }
        for (oi, ci) in col.iter().enumerate() {
            let i = t + 1 + oi;
            let f = ci.scale(inv);
            for (oj, cj) in col[..=oi].iter().enumerate() {
                r[i][t + 1 + oj] -= f * cj.conj();
            }
        }
    }

    OrthonormalSystem::from_parts(nodes.to_vec(), coeffs, pivots)
}

/// `K_{A_m}(z_p, w_p)` for each pair, evaluated by running the recursion on
/// the first `m` nodes.
pub fn residual_kernel_recursive(
    nodes: &[Complex64],
    m: usize,
    pairs: &[(Complex64, Complex64)],
) -> Result<Vec<Complex64>> {
    check_nodes(nodes)?;
    if m > nodes.len() {
        return Err(Error::IndexOutOfRange(format!(
            "residual index {m} exceeds {}",
            nodes.len()
        )));
    }
    let a = &nodes[..m];
    let mut r = gram_qd(a);
    // u[p][j] = K_{A_t}(z_p, a_j), v[p][j] = K_{A_t}(a_j, w_p)
    let mut u: QdMatrix = pairs
        .iter()
        .map(|&(z, _)| a.iter().map(|&y| kernel_qd(z, y)).collect())
        .collect();
    let mut v: QdMatrix = pairs
        .iter()
        .map(|&(_, w)| a.iter().map(|&y| kernel_qd(y, w)).collect())
        .collect();
    let mut s: Vec<Cqd> = pairs.iter().map(|&(z, w)| kernel_qd(z, w)).collect();

    for t in 0..m {
        let d: Qd = r[t][t].re;
        if !(d.to_f64() > 0.0) {
            return Err(Error::DegeneratePivot {
                m: t + 1,
                pivot: d.to_f64(),
                diag: kernel_qd(a[t], a[t]).re.to_f64(),
            });
        }
        let inv = d.recip();
        let col: Vec<Cqd> = (t + 1..m).map(|i| r[i][t]).collect();
        for p in 0..pairs.len() {
            let ut = u[p][t].scale(inv);
            let vt = v[p][t];
            s[p] -= ut * vt;
            for (oj, cj) in col.iter().enumerate() {
                u[p][t + 1 + oj] -= ut * cj.conj();
                v[p][t + 1 + oj] -= cj.scale(inv) * vt;
            }
        }
        for (oi, ci) in col.iter().enumerate() {
            let f = ci.scale(inv);
            for (oj, cj) in col[..=oi].iter().enumerate() {
                r[t + 1 + oi][t + 1 + oj] -= f * cj.conj();
            }
        }
    }
    Ok(s.into_iter().map(|x| x.to_c64()).collect())
}
