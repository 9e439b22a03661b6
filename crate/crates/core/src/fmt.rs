//! Number formatting for machine-readable output.

/// 17 significant digits in scientific notation; round-trips any binary64.
pub fn sig17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        for x in [0.1, 1.0 / 3.0, std::f64::consts::PI, 1e-300, 6.02214076e23, -2.5] {
            assert_eq!(sig17(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(sig17(0.75), "7.5000000000000000e-1");
    }
}
