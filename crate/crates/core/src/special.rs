//! Special-function helpers shared by the weight, resolvent and oracle code.

use num_complex::Complex64;

pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

/// Principal-branch power `z^s`, arg in (−π, π].
pub fn cpow(z: Complex64, s: f64) -> Complex64 {
    if z == Complex64::new(0.0, 0.0) {
        return if s == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
    }
    let (r, theta) = z.to_polar();
    Complex64::from_polar(r.powf(s), theta * s)
}

/// `∫_0^∞ t^s e^{−c t} dt = Γ(s+1) / c^{s+1}` for `s > −1`, `Re c > 0`.
pub fn gamma_integral(s: f64, c: Complex64) -> Complex64 {
    debug_assert!(s > -1.0 && c.re > 0.0);
    let exponent = s + 1.0;
    // evaluate in log space so large exponents do not overflow Γ
    let (r, theta) = c.to_polar();
    let log_mag = ln_gamma(exponent) - exponent * r.ln();
    Complex64::from_polar(log_mag.exp(), -theta * exponent)
}
