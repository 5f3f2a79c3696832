//! Numerical integration over the unit disc, used as an independent check of
//! the closed-form inner products.
//!
//! With `s = r²` the normalized area measure becomes `ds dθ / (2π)`, so the
//! radial integral is smooth for analytic integrands after angular averaging.
//! Gauss–Legendre handles `s ∈ [0, 1]`; the periodic trapezoid rule handles θ.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::function::BergmanFunction;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = x;
        nodes[n - 1 - i] = -x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// `∫_D f conj(g) dA` by Gauss–Legendre in `r²` times trapezoid in angle.
pub fn quadrature_inner_product(
    f: &BergmanFunction,
    g: &BergmanFunction,
    radial_nodes: usize,
    angular_nodes: usize,
) -> Complex64 {
    integrate_disc(
        |z| f.evaluate_in_disc(z) * g.evaluate_in_disc(z).conj(),
        radial_nodes,
        angular_nodes,
    )
}

/// `∫_D h dA` for an integrand continuous on the open disc.
pub fn integrate_disc<F>(h: F, radial_nodes: usize, angular_nodes: usize) -> Complex64
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    let (x, w) = gauss_legendre(radial_nodes);
    (0..radial_nodes)
        .into_par_iter()
        .map(|i| {
            let s = 0.5 * (x[i] + 1.0);
            let r = s.sqrt();
            let ring: Complex64 = (0..angular_nodes)
                .map(|j| h(Complex64::from_polar(r, TAU * j as f64 / angular_nodes as f64)))
                .sum();
            // [0,1] weight is w/2; angular mean is ring / T.
            ring * (0.5 * w[i] / angular_nodes as f64)
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::{inner_product, KernelExpansion, TaylorFunction};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for n in [1, 2, 5, 16, 64, 128] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            for deg in 0..(2 * n).min(40) {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg + 1) as f64 };
                assert!((q - exact).abs() < 1e-13, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn quadrature_examples() {
        let one = BergmanFunction::from(TaylorFunction::new(vec![c(1.0, 0.0)]).unwrap());
        assert!((quadrature_inner_product(&one, &one, 8, 8) - c(1.0, 0.0)).norm() < 1e-12);

        let z = BergmanFunction::from(TaylorFunction::new(vec![c(0.0, 0.0), c(1.0, 0.0)]).unwrap());
        assert!((quadrature_inner_product(&z, &z, 64, 256) - c(0.5, 0.0)).norm() < 1e-10);

        let k = BergmanFunction::from(KernelExpansion::single(c(0.3, 0.0), c(1.0, 0.0)).unwrap());
        let q = quadrature_inner_product(&k, &k, 128, 512);
        assert!((q - c(1.0 / (0.91f64 * 0.91), 0.0)).norm() < 1e-6);
        assert!((q - inner_product(&k, &k)).norm() < 1e-10);
    }
}
