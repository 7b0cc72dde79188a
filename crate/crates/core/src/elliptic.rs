//! Jacobi elliptic functions by the arithmetic–geometric mean (descending
//! Landen) algorithm.

/// `(sn, cn, dn)` of argument `u` and parameter `m = k²`, `0 ≤ m < 1`.
pub fn jacobi_sn_cn_dn(u: f64, m: f64) -> (f64, f64, f64) {
    debug_assert!((0.0..1.0).contains(&m));
    if m == 0.0 {
        return (u.sin(), u.cos(), 1.0);
    }

    // AGM sequence a_n, c_n.
    let mut a = vec![1.0];
    let mut c = vec![m.sqrt()];
    let mut b = (1.0 - m).sqrt();
    while c.last().copied().unwrap_or(0.0).abs() > f64::EPSILON && a.len() < 32 {
        let an = *a.last().unwrap();
        let next_a = 0.5 * (an + b);
        c.push(0.5 * (an - b));
        b = (an * b).sqrt();
        a.push(next_a);
    }
    let n = a.len() - 1;

    // Reduce modulo the real period 4K, K = π / (2 a_N).
    let quarter = std::f64::consts::PI / (2.0 * a[n]);
    let period = 4.0 * quarter;
    let u = u - period * (u / period).round();

    let mut phi = 2f64.powi(n as i32) * a[n] * u;
    for k in (1..=n).rev() {
        phi = 0.5 * (phi + (c[k] / a[k] * phi.sin()).asin());
    }
    let sn = phi.sin();
    let cn = phi.cos();
    // dn > 0 for m < 1.
    let dn = (1.0 - m * sn * sn).sqrt();
    (sn, cn, dn)
}
