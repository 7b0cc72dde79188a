//! Energy-preserving enhanced continuous-stage integrators for Poisson
//! systems `ẏ = S(y)∇H(y)`.
//!
//! The crate is organised bottom-up:
//!
//! - [`legendre`]: shifted Legendre polynomials on `[0, 1]` and their running integrals.
//! - [`quadrature`]: Gauss–Legendre and general interpolatory rules on `[0, 1]`.
//! - [`tableau`]: the order-`2m` coefficient family and verifiers for the
//!   energy, symmetry, Casimir and simplifying-assumption conditions.
//! - [`systems`]: the Poisson-system bundle and the reference problems.
//! - [`integrator`]: the discretized enhanced step, the Cohen–Hairer
//!   baseline, and trajectory recording.
//! - [`oracle`]: explicit RK4 / Euler steppers used as independent references.
//!
//! ```
//! use enhanced_cs::integrator::{integrate, Method, MethodSpec};
//! use enhanced_cs::systems::euler_rigid_body;
//!
//! let sys = euler_rigid_body();
//! let spec = MethodSpec::gauss(2, 2).unwrap();
//! let run = integrate(&sys, Method::Enhanced, &spec, sys.initial_state(), 0.1, 100, None).unwrap();
//! assert!(run.max_energy_error() < 1e-12);
//! ```

pub mod elliptic;
pub mod error;
pub mod integrator;
pub mod legendre;
pub mod oracle;
pub mod quadrature;
pub mod systems;
pub mod tableau;

pub use error::{Error, Result};
