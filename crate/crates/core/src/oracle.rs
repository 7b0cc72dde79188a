//! Classical explicit reference steppers.
//!
//! These share nothing with the structure-preserving integrators and serve as
//! independent references: a brute-force RK4 solution for problems without a
//! closed-form solution, and an explicit Euler step as a non-symmetric control.

use crate::error::Result;
use crate::systems::PoissonSystem;

/// Starting step of [`rk4_reference`].
pub const RK4_START_STEP: f64 = 1e-4;
/// Agreement required between successive halvings in [`rk4_reference`].
pub const RK4_AGREEMENT: f64 = 1e-10;

fn axpy(y: &[f64], a: f64, x: &[f64]) -> Vec<f64> {
    y.iter().zip(x).map(|(y, x)| y + a * x).collect()
}

pub fn explicit_euler_step(sys: &PoissonSystem, y0: &[f64], h: f64) -> Result<Vec<f64>> {
    Ok(axpy(y0, h, &sys.vector_field(y0)?))
}

pub fn rk4_step(sys: &PoissonSystem, y0: &[f64], h: f64) -> Result<Vec<f64>> {
    let k1 = sys.vector_field(y0)?;
    let k2 = sys.vector_field(&axpy(y0, 0.5 * h, &k1))?;
    let k3 = sys.vector_field(&axpy(y0, 0.5 * h, &k2))?;
    let k4 = sys.vector_field(&axpy(y0, h, &k3))?;
    Ok(y0
        .iter()
        .enumerate()
        .map(|(i, y)| y + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect())
}

/// RK4 with `n` uniform steps over `[0, duration]`.
pub fn rk4_solve(sys: &PoissonSystem, y0: &[f64], duration: f64, n: usize) -> Result<Vec<f64>> {
    let h = duration / n as f64;
    let mut y = y0.to_vec();
    for _ in 0..n {
        y = rk4_step(sys, &y, h)?;
    }
    Ok(y)
}

/// State after `duration` by RK4 at step `≈ 1e−4`, halved until two
/// successive answers agree to `1e−10` in max norm.
pub fn rk4_reference(sys: &PoissonSystem, y0: &[f64], duration: f64) -> Result<Vec<f64>> {
    let mut n = ((duration.abs() / RK4_START_STEP).ceil() as usize).max(1);
    let mut previous = rk4_solve(sys, y0, duration, n)?;
    loop {
        n *= 2;
        let refined = rk4_solve(sys, y0, duration, n)?;
        let diff = refined
            .iter()
            .zip(&previous)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if diff <= RK4_AGREEMENT || n > (1 << 26) {
            return Ok(refined);
        }
        previous = refined;
    }
}
