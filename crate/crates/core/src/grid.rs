//! The discrete node set: circles of radius `r_k` (the radial subgroup of the
//! Blaschke group) carrying `N(k)` equally spaced nodes, with the canonical
//! level-by-level linear ordering, plus separation / covering / sampling
//! diagnostics for the node family.
//!
//! Linear indices `m` are 1-based: `m = 1` is the origin `z_{00}`, then
//! level 1 in increasing `l`, then level 2, and so on.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::blaschke::{pseudo_distance, radial_node, MAX_RADIAL_INDEX};
use crate::error::{Error, Result};
use crate::function::BergmanFunction;

/// Relative tolerance for "α(k) is constant / monotone".
pub const ALPHA_TOL: f64 = 1e-12;

/// Levels allowed without an explicit override (a = 2 gives 673 nodes at 3).
pub const DEFAULT_LEVEL_CAP: usize = 3;

/// Parameters of the node set: base `a`, per-level node counts `N(k)` for
/// `k = 0..=levels`, and the Bergman exponent used by the sampling test.
#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    a_base: f64,
    schedule: Vec<usize>,
    p: f64,
}

impl GridConfig {
    /// Validates and stores an explicit schedule; `schedule[0]` must be 1.
    pub fn new(a_base: f64, schedule: Vec<usize>, p: f64) -> Result<Self> {
        if !(a_base > 1.0) || !a_base.is_finite() {
            return Err(Error::InvalidBase(a_base));
        }
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::PreconditionViolated(format!(
                "exponent p = {p} must be positive"
            )));
        }
        if schedule.first() != Some(&1) {
            return Err(Error::InvalidSchedule("N(0) must be 1".into()));
        }
        if schedule.len() - 1 > MAX_RADIAL_INDEX as usize {
            return Err(Error::InvalidSchedule(format!(
                "at most {MAX_RADIAL_INDEX} levels are supported"
            )));
        }
        for k in 1..schedule.len() {
            let (prev, cur) = (schedule[k - 1], schedule[k]);
            if k >= 2 && cur <= prev {
                return Err(Error::InvalidSchedule(format!(
                    "N({k}) = {cur} does not exceed N({}) = {prev}",
                    k - 1
                )));
            }
            if cur == 0 || cur % prev != 0 {
                return Err(Error::InvalidSchedule(format!(
                    "N({k}) = {cur} is not a multiple of N({}) = {prev}",
                    k - 1
                )));
            }
        }
        for k in 0..schedule.len() {
            radial_node(a_base, k as u32)?;
        }
        Ok(Self {
            a_base,
            schedule,
            p,
        })
    }

    /// `a = 2`, `N(k) = 2^(2k + beta)` for `k >= 1`.
    pub fn dyadic(beta: u32, levels: usize) -> Result<Self> {
        Self::with_power_schedule(2.0, levels, |k| 2 * k as u32 + beta)
    }

    /// The default configuration: `a = 2`, `N(k) = 2^(2k+3)`, `p = 2`.
    pub fn standard(levels: usize) -> Result<Self> {
        Self::dyadic(3, levels)
    }

    /// `a = sqrt(2)`, `N(k) = 2^(k+2)`.
    pub fn sqrt2(levels: usize) -> Result<Self> {
        Self::with_power_schedule(2f64.sqrt(), levels, |k| k as u32 + 2)
    }

    fn with_power_schedule(a: f64, levels: usize, exp: impl Fn(usize) -> u32) -> Result<Self> {
        let mut schedule = vec![1usize];
        for k in 1..=levels {
            let e = exp(k);
            if e >= usize::BITS {
                return Err(Error::InvalidSchedule(format!("2^{e} nodes on level {k}")));
            }
            schedule.push(1usize << e);
        }
        Self::new(a, schedule, 2.0)
    }

    pub fn with_p(mut self, p: f64) -> Result<Self> {
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::PreconditionViolated(format!(
                "exponent p = {p} must be positive"
            )));
        }
        self.p = p;
        Ok(self)
    }

    pub fn a_base(&self) -> f64 {
        self.a_base
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn levels(&self) -> usize {
        self.schedule.len() - 1
    }

    pub fn schedule(&self) -> &[usize] {
        &self.schedule
    }

    /// `N(k)`.
    pub fn count(&self, k: usize) -> usize {
        self.schedule[k]
    }

    pub fn radius(&self, k: usize) -> f64 {
        radial_node(self.a_base, k as u32).expect("validated on construction")
    }

    /// `α(k) = N(k) a^(-2k)` for `k = 1..=levels`.
    pub fn alpha_sequence(&self) -> Vec<f64> {
        (1..self.schedule.len())
            .map(|k| self.schedule[k] as f64 * self.a_base.powi(-2 * k as i32))
            .collect()
    }

    /// The common value of α(k) when it is constant across levels, taken as
    /// `N(1) a^-2`.
    pub fn constant_alpha(&self) -> Result<f64> {
        let seq = self.alpha_sequence();
        let alpha = *seq.first().ok_or_else(|| {
            Error::PreconditionViolated("α is undefined without levels k >= 1".into())
        })?;
        for (i, &v) in seq.iter().enumerate() {
            if (v - alpha).abs() > ALPHA_TOL * alpha {
                return Err(Error::PreconditionViolated(format!(
                    "α({}) = {v} differs from α(1) = {alpha}",
                    i + 1
                )));
            }
        }
        Ok(alpha)
    }

    /// Every level-k angle `2πl/N(k)` reappears on level k+1 as `2π(ql)/N(k+1)`
    /// with `q = N(k+1)/N(k)`; checked in exact integer arithmetic.
    pub fn refinement_embeds(&self) -> bool {
        self.schedule.windows(2).skip(1).all(|w| {
            let (n, next) = (w[0], w[1]);
            if next % n != 0 {
                return false;
            }
            let q = next / n;
            (0..n).all(|l| (l as u128) * (next as u128) == ((q * l) as u128) * (n as u128))
        })
    }
}

/// The materialized node set in canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    config: GridConfig,
    nodes: Vec<Complex64>,
    level_offsets: Vec<usize>,
}

/// Position of a node on the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeInfo {
    pub k: usize,
    pub l: usize,
    pub z: Complex64,
}

pub fn build_grid(config: &GridConfig) -> Grid {
    let mut nodes = Vec::with_capacity(config.schedule.iter().sum());
    let mut level_offsets = Vec::with_capacity(config.schedule.len());
    for (k, &n) in config.schedule.iter().enumerate() {
        level_offsets.push(nodes.len());
        let r = config.radius(k);
        nodes.extend((0..n).map(|l| {
            if k == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::from_polar(r, TAU * l as f64 / n as f64)
            }
        }));
    }
    Grid {
        config: config.clone(),
        nodes,
        level_offsets,
    }
}

impl Grid {
    pub fn new(config: &GridConfig) -> Self {
        build_grid(config)
    }

    pub fn config(&self) -> &GridConfig {
        &self.config
    }

    pub fn levels(&self) -> usize {
        self.config.levels()
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Start (0-based) of each level in the node list.
    pub fn level_offsets(&self) -> &[usize] {
        &self.level_offsets
    }

    /// `M_n`: number of nodes on levels `0..=n`.
    pub fn count_through(&self, n: usize) -> usize {
        if n >= self.levels() {
            self.len()
        } else {
            self.level_offsets[n + 1]
        }
    }

    /// 1-based position of `z_{kl}`.
    pub fn linear_index(&self, k: usize, l: usize) -> Result<usize> {
        if k > self.levels() || l >= self.config.count(k) {
            return Err(Error::IndexOutOfRange(format!(
                "node (k={k}, l={l}) is not on the grid"
            )));
        }
        Ok(self.level_offsets[k] + l + 1)
    }

    /// Inverse of [`Grid::linear_index`].
    pub fn node_of(&self, m: usize) -> Result<NodeInfo> {
        if m == 0 || m > self.len() {
            return Err(Error::IndexOutOfRange(format!(
                "linear index {m} outside 1..={}",
                self.len()
            )));
        }
        let i = m - 1;
        let k = self.level_offsets.partition_point(|&off| off <= i) - 1;
        Ok(NodeInfo {
            k,
            l: i - self.level_offsets[k],
            z: self.nodes[i],
        })
    }

    /// Level of the 0-based node position `i`.
    pub fn level_of_position(&self, i: usize) -> usize {
        self.level_offsets.partition_point(|&off| off <= i) - 1
    }
}

/// `min(r_1, 1/sqrt(1 + α²))`.
pub fn separation_bound_for(a_base: f64, alpha: f64) -> Result<f64> {
    let r1 = radial_node(a_base, 1)?;
    Ok(r1.min(1.0 / (1.0 + alpha * alpha).sqrt()))
}

/// `K = 1 + (a - 1/a)²/4 + a²π²/(4α²)`.
pub fn covering_constant(a_base: f64, alpha: f64) -> f64 {
    let s = a_base - a_base.recip();
    1.0 + s * s / 4.0 + a_base * a_base * PI * PI / (4.0 * alpha * alpha)
}

/// `ε₀ = sqrt(1 - 1/K)`.
pub fn epsilon_net_bound_for(a_base: f64, alpha: f64) -> f64 {
    (1.0 - 1.0 / covering_constant(a_base, alpha)).sqrt()
}

/// Per-ring covering constant `K(a,k)` for the annulus `r_k < |z| <= r_{k+1}`
/// served by the `n` nodes of circle k.
pub fn ring_covering_constant(a_base: f64, k: u32, n: usize) -> f64 {
    let s = a_base - a_base.recip();
    let sh = |j: i32| a_base.powi(j) - a_base.powi(-j);
    let ki = k as i32;
    let angular = sh(2 * ki + 2) * sh(2 * ki) / 4.0 * PI * PI / (n * n) as f64;
    1.0 + s * s / 4.0 + angular
}

/// `(a - 1/a)² + π² a²/α²`, to be compared with `2p`.
pub fn sampling_lhs(a_base: f64, alpha: f64) -> f64 {
    let s = a_base - a_base.recip();
    s * s + PI * PI * a_base * a_base / (alpha * alpha)
}

/// Closed form of the distance between adjacent nodes on a circle of radius
/// `r` carrying `n` nodes.
pub fn adjacent_distance(r: f64, n: usize) -> f64 {
    let t = (1.0 - r * r) / (2.0 * r * (PI / n as f64).sin());
    (1.0 + t * t).powf(-0.5)
}

fn check_monotone(seq: &[f64], increasing: bool) -> Result<()> {
    if seq.is_empty() {
        return Err(Error::PreconditionViolated(
            "α is undefined without levels k >= 1".into(),
        ));
    }
    for (i, w) in seq.windows(2).enumerate() {
        let slack = ALPHA_TOL * w[0].abs().max(w[1].abs());
        let ok = if increasing {
            w[1] >= w[0] - slack
        } else {
            w[1] <= w[0] + slack
        };
        if !ok {
            return Err(Error::PreconditionViolated(format!(
                "α(k) is not {} at k = {}",
                if increasing { "increasing" } else { "decreasing" },
                i + 2
            )));
        }
    }
    Ok(())
}

/// Lower bound on the separation constant; α(k) must be nondecreasing, and
/// its largest configured value stands in for the limit.
pub fn separation_lower_bound(config: &GridConfig) -> Result<f64> {
    let seq = config.alpha_sequence();
    check_monotone(&seq, true)?;
    let alpha = seq.iter().copied().fold(f64::MIN, f64::max);
    separation_bound_for(config.a_base, alpha)
}

/// Covering radius ε₀; α(k) must be nonincreasing, and its smallest
/// configured value stands in for the limit.
pub fn epsilon_net_bound(config: &GridConfig) -> Result<f64> {
    let seq = config.alpha_sequence();
    check_monotone(&seq, false)?;
    let alpha = seq.iter().copied().fold(f64::MAX, f64::min);
    Ok(epsilon_net_bound_for(config.a_base, alpha))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingReport {
    pub alpha: f64,
    pub p: f64,
    /// `(a - 1/a)² + π² a²/α²`.
    pub lhs: f64,
    /// `2p - lhs`; positive when the condition holds.
    pub margin: f64,
    pub holds: bool,
    pub epsilon0: f64,
    /// `sqrt(p / (p + 2))`.
    pub epsilon_threshold: f64,
}

pub fn sampling_condition(config: &GridConfig, p: f64) -> Result<SamplingReport> {
    let alpha = config.constant_alpha()?;
    let lhs = sampling_lhs(config.a_base, alpha);
    Ok(SamplingReport {
        alpha,
        p,
        lhs,
        margin: 2.0 * p - lhs,
        holds: lhs < 2.0 * p,
        epsilon0: epsilon_net_bound_for(config.a_base, alpha),
        epsilon_threshold: (p / (p + 2.0)).sqrt(),
    })
}

/// Brute-force minimum pairwise pseudohyperbolic distance; `None` for fewer
/// than two nodes.
pub fn empirical_separation(grid: &Grid) -> Option<f64> {
    let nodes = grid.nodes();
    if nodes.len() < 2 {
        return None;
    }
    let min = (0..nodes.len())
        .into_par_iter()
        .map(|i| {
            nodes[i + 1..]
                .iter()
                .map(|&w| pseudo_distance(nodes[i], w))
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| f64::INFINITY, f64::min);
    Some(min)
}

/// Distance from `z` to the nearest grid node.
pub fn nearest_node_distance(grid: &Grid, z: Complex64) -> f64 {
    grid.nodes()
        .iter()
        .map(|&w| pseudo_distance(z, w))
        .fold(f64::INFINITY, f64::min)
}

/// Polar probe mesh over `|z| <= radius`, uniform in `atanh|z|` and angle.
/// Returns `radial * angular` points (the origin ring collapses to copies of 0).
pub fn polar_mesh(radius: f64, radial: usize, angular: usize) -> Vec<Complex64> {
    let t_max = radius.atanh();
    let mut pts = Vec::with_capacity(radial * angular);
    for i in 0..radial {
        let frac = if radial > 1 {
            i as f64 / (radial - 1) as f64
        } else {
            1.0
        };
        let r = (t_max * frac).tanh();
        for j in 0..angular {
            pts.push(Complex64::from_polar(r, TAU * j as f64 / angular as f64));
        }
    }
    pts
}

/// Largest nearest-node distance over a deterministic mesh of roughly
/// `probe_count` points covering `|z| <= r_levels`.
pub fn empirical_epsilon_net(grid: &Grid, probe_count: usize) -> f64 {
    let levels = grid.levels();
    if levels == 0 || probe_count == 0 {
        return 0.0;
    }
    let radial = ((probe_count as f64).sqrt().floor() as usize).max(1);
    let angular = (probe_count / radial).max(1);
    let probes = polar_mesh(grid.config().radius(levels), radial, angular);
    probes
        .par_iter()
        .map(|&z| nearest_node_distance(grid, z))
        .reduce(|| 0.0, f64::max)
}

/// `Σ_nodes |f(z)|² (1 - |z|²)² / ‖f‖²`.
pub fn frame_ratio(grid: &Grid, f: &BergmanFunction) -> Result<f64> {
    let norm_sq = f.norm_sqr();
    if !(norm_sq > 0.0) {
        return Err(Error::ZeroFunction);
    }
    let mut sum = 0.0;
    for &z in grid.nodes() {
        let w = 1.0 - z.norm_sqr();
        sum += f.evaluate(z)?.norm_sqr() * w * w;
    }
    Ok(sum / norm_sq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::{KernelExpansion, TaylorFunction};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn build_grid_examples() {
        let g = build_grid(&GridConfig::standard(1).unwrap());
        assert_eq!(g.len(), 33);
        assert_eq!(g.nodes()[0], c(0.0, 0.0));
        for z in &g.nodes()[1..] {
            assert!((z.norm() - 0.6).abs() < 1e-15);
        }
        let g = build_grid(&GridConfig::sqrt2(3).unwrap());
        assert_eq!(g.len(), 57);
        let g = build_grid(&GridConfig::standard(0).unwrap());
        assert_eq!(g.nodes(), &[c(0.0, 0.0)]);
        assert_eq!(build_grid(&GridConfig::standard(2).unwrap()).len(), 161);
        assert_eq!(build_grid(&GridConfig::standard(3).unwrap()).len(), 673);
    }

    #[test]
    fn schedule_validation() {
        assert!(matches!(
            GridConfig::new(2.0, vec![1, 8, 12], 2.0),
            Err(Error::InvalidSchedule(_))
        ));
        assert!(matches!(
            GridConfig::new(2.0, vec![1, 8, 8], 2.0),
            Err(Error::InvalidSchedule(_))
        ));
        assert!(matches!(
            GridConfig::new(2.0, vec![2, 8], 2.0),
            Err(Error::InvalidSchedule(_))
        ));
        assert!(matches!(
            GridConfig::new(1.0, vec![1, 8], 2.0),
            Err(Error::InvalidBase(_))
        ));
        assert!(GridConfig::new(2.0, vec![1, 3, 9], 2.0).is_ok());
    }

    #[test]
    fn linear_index_examples() {
        let g = build_grid(&GridConfig::standard(2).unwrap());
        assert_eq!(g.linear_index(0, 0).unwrap(), 1);
        assert_eq!(g.linear_index(1, 0).unwrap(), 2);
        assert_eq!(g.linear_index(1, 31).unwrap(), 33);
        assert_eq!(g.linear_index(2, 0).unwrap(), 34);
        assert!(g.linear_index(3, 0).is_err());
        assert!(g.linear_index(1, 32).is_err());
        assert!(g.node_of(0).is_err());
        assert!(g.node_of(162).is_err());
        for m in 1..=g.len() {
            let info = g.node_of(m).unwrap();
            assert_eq!(g.linear_index(info.k, info.l).unwrap(), m);
            assert_eq!(g.nodes()[m - 1], info.z);
        }
        let g = build_grid(&GridConfig::sqrt2(3).unwrap());
        assert_eq!(g.linear_index(1, 0).unwrap(), 2);
    }

    #[test]
    fn separation_bound_examples() {
        let b = separation_lower_bound(&GridConfig::standard(3).unwrap()).unwrap();
        assert!((b - 1.0 / 65f64.sqrt()).abs() < 1e-15);
        assert!((b - 0.12403473).abs() < 1e-8);
        let b = separation_lower_bound(&GridConfig::sqrt2(3).unwrap()).unwrap();
        assert!((b - 1.0 / 17f64.sqrt()).abs() < 1e-15);
        assert!((b - 0.24253).abs() < 1e-5);
        assert!((separation_bound_for(2.0, 1e-9).unwrap() - 0.6).abs() < 1e-15);
    }

    #[test]
    fn alpha_precondition() {
        // α(1) = 16/4 = 4, α(2) = 32/16 = 2: decreasing.
        let cfg = GridConfig::new(2.0, vec![1, 16, 32], 2.0).unwrap();
        assert!(matches!(
            separation_lower_bound(&cfg),
            Err(Error::PreconditionViolated(_))
        ));
        assert!(epsilon_net_bound(&cfg).is_ok());
        assert!(sampling_condition(&cfg, 2.0).is_err());
        let level0 = GridConfig::standard(0).unwrap();
        assert!(separation_lower_bound(&level0).is_err());
    }

    #[test]
    fn epsilon_net_bound_examples() {
        let k = covering_constant(2.0, 8.0);
        assert!((k - 1.716_712_57).abs() < 1e-8);
        let e = epsilon_net_bound(&GridConfig::standard(2).unwrap()).unwrap();
        assert!((e - 0.64613).abs() < 1e-5);
        let k = covering_constant(2f64.sqrt(), 4.0);
        assert!((k - 1.43343).abs() < 1e-5);
        let e = epsilon_net_bound(&GridConfig::sqrt2(3).unwrap()).unwrap();
        assert!((e - 0.549_882).abs() < 1e-6);
        assert!(epsilon_net_bound_for(1.0 + 1e-9, 1e9) < 1e-4);
    }

    #[test]
    fn sampling_condition_examples() {
        let rep = sampling_condition(&GridConfig::standard(2).unwrap(), 2.0).unwrap();
        assert!((rep.lhs - 2.86685).abs() < 1e-5 && rep.holds);
        assert!(rep.epsilon0 < rep.epsilon_threshold);
        let rep = sampling_condition(&GridConfig::dyadic(2, 2).unwrap(), 2.0).unwrap();
        assert!((rep.lhs - 4.71740).abs() < 1e-5 && !rep.holds);
        let rep = sampling_condition(&GridConfig::sqrt2(3).unwrap(), 2.0).unwrap();
        assert!((rep.lhs - 1.73370).abs() < 1e-5 && rep.holds);
    }

    #[test]
    fn sampling_condition_implies_small_covering_radius() {
        for beta in 0..8 {
            for p in [0.5, 1.0, 2.0, 3.0, 4.0] {
                let cfg = GridConfig::dyadic(beta, 2).unwrap();
                let rep = sampling_condition(&cfg, p).unwrap();
                if rep.holds {
                    assert!(rep.epsilon0 < rep.epsilon_threshold);
                }
            }
        }
    }

    #[test]
    fn empirical_separation_examples() {
        let g = build_grid(&GridConfig::standard(1).unwrap());
        let d = empirical_separation(&g).unwrap();
        assert!(d >= 0.12403473 - 1e-12);
        let adj = pseudo_distance(g.nodes()[1], g.nodes()[2]);
        assert!((adj - adjacent_distance(0.6, 32)).abs() < 1e-12);
        assert!((d - adj).abs() < 1e-12);

        let two = Grid {
            config: GridConfig::standard(1).unwrap(),
            nodes: vec![c(0.0, 0.0), c(0.6, 0.0)],
            level_offsets: vec![0, 1],
        };
        assert!((empirical_separation(&two).unwrap() - 0.6).abs() < 1e-15);
        let one = build_grid(&GridConfig::standard(0).unwrap());
        assert_eq!(empirical_separation(&one), None);
    }

    #[test]
    fn separation_respects_bound() {
        for cfg in [
            GridConfig::standard(2).unwrap(),
            GridConfig::sqrt2(3).unwrap(),
            GridConfig::dyadic(5, 2).unwrap(),
        ] {
            let bound = separation_lower_bound(&cfg).unwrap();
            let d = empirical_separation(&build_grid(&cfg)).unwrap();
            assert!(d >= bound - 1e-12, "{d} < {bound}");
        }
    }

    #[test]
    fn epsilon_net_examples() {
        let g = build_grid(&GridConfig::standard(2).unwrap());
        assert_eq!(nearest_node_distance(&g, g.nodes()[40]), 0.0);
        let e = empirical_epsilon_net(&g, 10_000);
        assert!(e <= 0.64614, "{e}");
        assert!(e <= epsilon_net_bound(g.config()).unwrap() + 1e-9);
    }

    #[test]
    fn ring_covering_bound_at_bisector() {
        let cfg = GridConfig::standard(2).unwrap();
        let (r1, r2) = (cfg.radius(1), cfg.radius(2));
        let r = 0.5 * (r1 + r2);
        let theta = PI / cfg.count(2) as f64;
        let z = Complex64::from_polar(r, theta);
        // The annulus (r_1, r_2] is served by the ring-1 node at angle 0.
        let node = c(r1, 0.0);
        let rho = pseudo_distance(z, node);
        let lhs = 1.0 / (1.0 - rho * rho);
        let s2 = (theta / 2.0).sin().powi(2);
        let exact = ((1.0 - r * r1).powi(2) + 4.0 * r * r1 * s2) / ((1.0 - r * r) * (1.0 - r1 * r1));
        assert!((lhs - exact).abs() < 1e-12 * exact);
        let k_ring = ring_covering_constant(2.0, 1, cfg.count(1));
        assert!(lhs <= k_ring);
        assert!(k_ring <= covering_constant(2.0, 8.0));
    }

    #[test]
    fn refinement_embedding() {
        let cfg = GridConfig::standard(3).unwrap();
        assert!(cfg.refinement_embeds());
        for k in 1..3 {
            assert_eq!(cfg.count(k + 1), 4 * cfg.count(k));
            for l in 0..cfg.count(k) {
                assert_eq!(l * cfg.count(k + 1), 4 * l * cfg.count(k));
            }
        }
    }

    #[test]
    fn frame_ratio_examples() {
        let one = BergmanFunction::from(TaylorFunction::new(vec![c(1.0, 0.0)]).unwrap());
        let g0 = build_grid(&GridConfig::standard(0).unwrap());
        assert!((frame_ratio(&g0, &one).unwrap() - 1.0).abs() < 1e-15);

        let cfg = GridConfig::standard(2).unwrap();
        let g = build_grid(&cfg);
        let expected: f64 = 1.0
            + (1..=2)
                .map(|k| cfg.count(k) as f64 * (1.0 - cfg.radius(k).powi(2)).powi(2))
                .sum::<f64>();
        assert!((frame_ratio(&g, &one).unwrap() - expected).abs() < 1e-12 * expected);

        let z = BergmanFunction::from(TaylorFunction::new(vec![c(0.0, 0.0), c(1.0, 0.0)]).unwrap());
        let expected: f64 = (1..=2)
            .map(|k| {
                let r2 = cfg.radius(k).powi(2);
                cfg.count(k) as f64 * r2 * (1.0 - r2).powi(2)
            })
            .sum::<f64>()
            / 0.5;
        assert!((frame_ratio(&g, &z).unwrap() - expected).abs() < 1e-12 * expected);

        let zero = BergmanFunction::from(KernelExpansion::default());
        assert!(matches!(frame_ratio(&g, &zero), Err(Error::ZeroFunction)));
    }
}
