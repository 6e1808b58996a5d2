//! Hyperbolic helpers with small-argument series and overflow-safe scaling.

/// Below this magnitude coth and friends switch to their Laurent series.
pub const SERIES_CUTOFF: f64 = 1e-4;

/// coth(x)
pub fn coth(x: f64) -> f64 {
    if x.abs() < SERIES_CUTOFF {
        let x2 = x * x;
        1.0 / x + x / 3.0 - x * x2 / 45.0
    } else {
        1.0 / x.tanh()
    }
}

/// x coth(x), continuous at 0 with value 1.
pub fn xcoth(x: f64) -> f64 {
    if x.abs() < SERIES_CUTOFF {
        let x2 = x * x;
        1.0 + x2 / 3.0 - x2 * x2 / 45.0
    } else {
        x / x.tanh()
    }
}

/// d/dx [x coth(x)] = coth(x) - x csch^2(x)
pub fn xcoth_prime(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        let x2 = x * x;
        2.0 * x / 3.0 - 4.0 * x * x2 / 45.0 + 4.0 * x * x2 * x2 / 315.0
    } else {
        coth(x) - x * csch2(x)
    }
}

/// coth(x) - 1/x
pub fn coth_minus_inv(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        let x2 = x * x;
        x / 3.0 - x * x2 / 45.0 + 2.0 * x * x2 * x2 / 945.0
    } else {
        coth(x) - 1.0 / x
    }
}

/// 1/sinh^2(x), scaled for large |x|.
pub fn csch2(x: f64) -> f64 {
    let a = x.abs();
    if a > 20.0 {
        let e = (-2.0 * a).exp();
        4.0 * e / ((1.0 - e) * (1.0 - e))
    } else {
        let s = x.sinh();
        1.0 / (s * s)
    }
}

/// coth(x)/x - csch^2(x); tends to 2/3 at the origin.
pub fn coth_over_x_minus_csch2(x: f64) -> f64 {
    if x.abs() < 2e-3 {
        let x2 = x * x;
        2.0 / 3.0 - 4.0 * x2 / 45.0 + 4.0 * x2 * x2 / 315.0
    } else {
        coth(x) / x - csch2(x)
    }
}

/// csc^2(x) - cot(x)/x, the continuation of the previous function to
/// imaginary argument; tends to 2/3 at the origin.
pub fn csc2_minus_cot_over_x(x: f64) -> f64 {
    if x.abs() < 2e-3 {
        let x2 = x * x;
        2.0 / 3.0 + 4.0 * x2 / 45.0 + 4.0 * x2 * x2 / 315.0
    } else {
        let s = x.sin();
        1.0 / (s * s) - x.cos() / (s * x)
    }
}

/// Returns (cosh(k y)/sinh k, sinh(k y)/sinh k) for k > 0 and y in [0, 1],
/// without forming cosh or sinh of large arguments.
pub fn ratio_cs(kappa: f64, y: f64) -> (f64, f64) {
    let den = -(-2.0 * kappa).exp_m1();
    let a = (kappa * (y - 1.0)).exp();
    let b = (-kappa * (y + 1.0)).exp();
    ((a + b) / den, (a - b) / den)
}
