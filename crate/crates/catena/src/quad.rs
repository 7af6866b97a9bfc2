//! Composite Simpson quadrature on uniform samples.

/// Composite Simpson over an odd number of uniform samples with spacing h.
pub fn simpson(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    assert!(n >= 3 && n % 2 == 1, "Simpson needs an odd sample count");
    let mut acc = values[0] + values[n - 1];
    for (i, &v) in values.iter().enumerate().take(n - 1).skip(1) {
        acc += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    acc * h / 3.0
}

/// Composite Simpson of f over [a, b] with n nodes (odd).
pub fn simpson_fn(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    assert!(n >= 3 && n % 2 == 1);
    let h = (b - a) / (n - 1) as f64;
    let values: Vec<f64> = (0..n).map(|i| f(a + i as f64 * h)).collect();
    simpson(&values, h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_is_exact() {
        let v = simpson_fn(|x| x * x * x - 2.0 * x + 1.0, -1.0, 2.0, 11);
        // integral = [x^4/4 - x^2 + x] from -1 to 2 = (4-4+2)-(1/4-1-1)
        let exact = 2.0 - (0.25 - 2.0);
        assert!((v - exact).abs() < 1e-13);
    }

    #[test]
    fn sine_converges_fourth_order() {
        let e1 = (simpson_fn(f64::sin, 0.0, 1.0, 11) - (1.0 - 1.0f64.cos())).abs();
        let e2 = (simpson_fn(f64::sin, 0.0, 1.0, 21) - (1.0 - 1.0f64.cos())).abs();
        assert!(e1 / e2 > 12.0);
    }
}
