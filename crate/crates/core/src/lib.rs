//! Hyperbolic wavelet multiresolution analysis of the Bergman space A².
//!
//! The node set places `N(k)` equally spaced points on circles of radius
//! `r_k = (a^k - a^-k)/(a^k + a^-k)`, the orbit of the origin under a
//! discrete radial subgroup of the Blaschke group. Orthonormalizing the
//! reproducing kernels at these nodes level by level gives a nested family
//! of spaces `V_0 ⊂ V_1 ⊂ ...`; the projection `P_n f` onto `V_n` depends
//! only on the samples of `f` at levels `0..=n`, interpolates them, and has
//! the smallest norm among such interpolants.
//!
//! Modules:
//! - [`blaschke`]: group law, Blaschke maps, pseudohyperbolic distance.
//! - [`grid`]: node set, linear ordering, separation / covering / sampling diagnostics.
//! - [`function`]: Taylor and kernel-combination models, exact inner products,
//!   the representation `U_a` and the voice transform.
//! - [`quadrature`]: disc quadrature used to cross-check inner products.
//! - [`orthonormal`], [`recursion`]: the orthonormal kernel system, built two ways.
//! - [`transform`]: analysis, synthesis, `P_n`, `Q_n`, residual audits.
//! - [`io`]: plain-text file formats.

pub mod blaschke;
pub mod error;
pub mod function;
pub mod grid;
pub mod io;
pub mod orthonormal;
pub mod qd;
pub mod quadrature;
pub mod recursion;
pub mod transform;

pub use blaschke::GroupElement;
pub use error::{Error, ErrorClass, Result};
pub use function::{BergmanFunction, KernelExpansion, KernelTerm, NodalExpansion, TaylorFunction};
pub use grid::{build_grid, Grid, GridConfig};
pub use num_complex::Complex64;
pub use orthonormal::{orthonormalize, OrthonormalSystem};
pub use transform::{Multiresolution, WaveletCoefficients};
