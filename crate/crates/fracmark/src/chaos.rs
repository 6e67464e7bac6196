//! Logistic-map keystream used for one-way watermark encryption.
//!
//! The map `x -> a*x*(1-x)` is iterated in binary64 with a fixed
//! evaluation order, `(a * x) * (1 - x)`, and no fused multiply-add, so
//! the same parameters regenerate the same digit stream on any platform.
//! The stream itself is the d-th decimal digit of each iterate after a
//! warm-up of `k` steps.

use crate::error::{Error, Result};

/// Valid range for the initial value.
pub const X0_RANGE: (f64, f64) = (0.1, 0.9);
/// Valid range for the map parameter: `[3.7, 4.0)`, the chaotic regime.
pub const A_RANGE: (f64, f64) = (3.7, 4.0);
/// Valid range for the warm-up index.
pub const WARMUP_RANGE: (u32, u32) = (100, 1000);
/// Valid range for the extracted digit position.
pub const DIGIT_RANGE: (u8, u8) = (2, 20);

// 10^d is exact in binary64 for d <= 22.
const POW10: [f64; 21] = [
    1e0, 1e1, 1e2, 1e3, 1e4, 1e5, 1e6, 1e7, 1e8, 1e9, 1e10, 1e11, 1e12, 1e13, 1e14, 1e15, 1e16,
    1e17, 1e18, 1e19, 1e20,
];

/// Validated parameter tuple for the chaotic keystream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChaosParams {
    x0: f64,
    a: f64,
    warmup: u32,
    digit: u8,
}

impl ChaosParams {
    /// Checks every range bound and rejects the fixed point `x0 = 1 - 1/a`,
    /// which would freeze the iteration into a constant stream.
    pub fn new(x0: f64, a: f64, warmup: u32, digit: u8) -> Result<Self> {
        if !x0.is_finite() || !(X0_RANGE.0..=X0_RANGE.1).contains(&x0) {
            return Err(Error::parameter(format!(
                "x0 = {x0} outside [{}, {}]",
                X0_RANGE.0, X0_RANGE.1
            )));
        }
        if !a.is_finite() || !(A_RANGE.0..A_RANGE.1).contains(&a) {
            return Err(Error::parameter(format!(
                "a = {a} outside [{}, {}) (range is half-open)",
                A_RANGE.0, A_RANGE.1
            )));
        }
        if !(WARMUP_RANGE.0..=WARMUP_RANGE.1).contains(&warmup) {
            return Err(Error::parameter(format!(
                "k = {warmup} outside [{}, {}]",
                WARMUP_RANGE.0, WARMUP_RANGE.1
            )));
        }
        if !(DIGIT_RANGE.0..=DIGIT_RANGE.1).contains(&digit) {
            return Err(Error::parameter(format!(
                "d = {digit} outside [{}, {}]",
                DIGIT_RANGE.0, DIGIT_RANGE.1
            )));
        }
        if x0 == 1.0 - 1.0 / a {
            return Err(Error::parameter(format!(
                "x0 = {x0} is the fixed point 1 - 1/a of the map; the stream would be constant"
            )));
        }
        Ok(ChaosParams {
            x0,
            a,
            warmup,
            digit,
        })
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn warmup(&self) -> u32 {
        self.warmup
    }

    pub fn digit(&self) -> u8 {
        self.digit
    }

    /// Digits of the iterates `x_k, x_{k+1}, ..., x_{k+count-1}`.
    ///
    /// Fails with a degeneracy error if any iterate leaves `(0, 1)` or the
    /// requested digits come out constant; both mean the chosen parameters
    /// cannot key a watermark and different ones must be picked.
    pub fn keystream(&self, count: usize) -> Result<DigitKeystream> {
        if count == 0 {
            return Err(Error::parameter("keystream count must be >= 1".to_string()));
        }
        let mut x = self.x0;
        for i in 0..self.warmup {
            x = step_unchecked(x, self.a);
            check_open_interval(x, i as usize + 1)?;
        }
        let mut digits = Vec::with_capacity(count);
        for i in 0..count {
            digits.push(extract_digit_unchecked(x, self.digit));
            x = step_unchecked(x, self.a);
            check_open_interval(x, self.warmup as usize + i + 1)?;
        }
        let first = digits[0];
        if digits.iter().all(|&d| d == first) {
            return Err(Error::DegenerateKeystream(format!(
                "all {count} digits equal {first}; choose different chaos parameters"
            )));
        }
        Ok(DigitKeystream { digits })
    }
}

fn check_open_interval(x: f64, iteration: usize) -> Result<()> {
    if x <= 0.0 || x >= 1.0 || !x.is_finite() {
        return Err(Error::DegenerateKeystream(format!(
            "iterate {iteration} left (0, 1) with value {x}; choose different chaos parameters"
        )));
    }
    Ok(())
}

#[inline]
fn step_unchecked(x: f64, a: f64) -> f64 {
    (a * x) * (1.0 - x)
}

/// One application of the logistic map with domain checks.
pub fn logistic_step(x: f64, a: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::parameter(format!("x = {x} outside (0, 1)")));
    }
    if !(A_RANGE.0..A_RANGE.1).contains(&a) {
        return Err(Error::parameter(format!(
            "a = {a} outside [{}, {})",
            A_RANGE.0, A_RANGE.1
        )));
    }
    Ok(step_unchecked(x, a))
}

/// The d-th decimal digit of the fractional part: `floor(x * 10^d) mod 10`.
pub fn digit_extract(x: f64, digit: u8) -> Result<u8> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::parameter(format!("x = {x} outside (0, 1)")));
    }
    if !(DIGIT_RANGE.0..=DIGIT_RANGE.1).contains(&digit) {
        return Err(Error::parameter(format!(
            "d = {digit} outside [{}, {}]",
            DIGIT_RANGE.0, DIGIT_RANGE.1
        )));
    }
    Ok(extract_digit_unchecked(x, digit))
}

#[inline]
fn extract_digit_unchecked(x: f64, digit: u8) -> u8 {
    ((x * POW10[digit as usize]).floor() % 10.0) as u8
}

/// An ordered stream of decimal digits, one per curve index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitKeystream {
    digits: Vec<u8>,
}

impl DigitKeystream {
    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    #[cfg(test)]
    pub(crate) fn from_digits(digits: Vec<u8>) -> Self {
        DigitKeystream { digits }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_matches_direct_arithmetic() {
        // 3.7 * 0.1 * 0.9 and 3.8 * 0.25, evaluated as (a*x)*(1-x)
        let y = logistic_step(0.1, 3.7).unwrap();
        assert!((y - 0.333).abs() < 1e-15);
        assert_eq!(y, (3.7 * 0.1) * 0.9);
        assert_eq!(logistic_step(0.5, 3.8).unwrap(), 0.95);
    }

    #[test]
    fn step_rejects_domain_violations() {
        assert!(logistic_step(0.0, 3.8).is_err());
        assert!(logistic_step(1.0, 3.8).is_err());
        assert!(logistic_step(0.5, 4.0).is_err());
        assert!(logistic_step(0.5, 3.6).is_err());
    }

    #[test]
    fn iterates_stay_inside_unit_interval() {
        let mut x = 0.2;
        for _ in 0..1000 {
            x = logistic_step(x, 3.9).unwrap();
            assert!(x > 0.0 && x < 1.0);
        }
    }

    #[test]
    fn digit_extract_reads_decimal_digits() {
        assert_eq!(digit_extract(0.333, 2).unwrap(), 3);
        assert_eq!(digit_extract(0.95, 2).unwrap(), 5);
        assert_eq!(digit_extract(0.123456, 5).unwrap(), 5);
    }

    #[test]
    fn digit_extract_rejects_bad_inputs() {
        assert!(digit_extract(1.5, 3).is_err());
        assert!(digit_extract(0.5, 1).is_err());
        assert!(digit_extract(0.5, 21).is_err());
    }

    #[test]
    fn params_enforce_ranges() {
        assert!(ChaosParams::new(0.05, 3.8, 200, 5).is_err());
        assert!(ChaosParams::new(0.95, 3.8, 200, 5).is_err());
        assert!(ChaosParams::new(0.5, 4.0, 200, 5).is_err());
        assert!(ChaosParams::new(0.5, 3.69, 200, 5).is_err());
        assert!(ChaosParams::new(0.5, 3.8, 99, 5).is_err());
        assert!(ChaosParams::new(0.5, 3.8, 1001, 5).is_err());
        assert!(ChaosParams::new(0.5, 3.8, 200, 1).is_err());
        assert!(ChaosParams::new(0.5, 3.8, 200, 21).is_err());
        assert!(ChaosParams::new(0.5, 3.8, 200, 5).is_ok());
    }

    #[test]
    fn fixed_point_is_rejected() {
        let a = 3.8f64;
        let trap = 1.0 - 1.0 / a;
        assert!(ChaosParams::new(trap, a, 200, 5).is_err());
    }

    #[test]
    fn keystream_is_deterministic_and_in_range() {
        let p = ChaosParams::new(0.1, 3.7, 100, 2).unwrap();
        let a = p.keystream(64).unwrap();
        let b = p.keystream(64).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 64);
        assert!(a.digits().iter().all(|&d| d <= 9));
    }

    #[test]
    fn keystream_matches_independent_oracle() {
        // Frozen from a scripted binary64 iteration of the map with the
        // same (a*x)*(1-x) evaluation order.
        let p = ChaosParams::new(0.5, 3.9, 100, 3).unwrap();
        let ks = p.keystream(4).unwrap();
        assert_eq!(ks.digits(), &[4, 8, 7, 6]);
    }

    #[test]
    fn keystream_rejects_zero_count() {
        let p = ChaosParams::new(0.5, 3.9, 100, 3).unwrap();
        assert!(p.keystream(0).is_err());
    }

    #[test]
    fn digit_frequencies_are_roughly_uniform() {
        // loose sanity bound: over 4096 digits no frequency strays from
        // 10% by more than 8 points
        for digit in [2u8, 7, 14] {
            let p = ChaosParams::new(0.31, 3.91, 250, digit).unwrap();
            let ks = p.keystream(4096).unwrap();
            let mut counts = [0u32; 10];
            for &d in ks.digits() {
                counts[d as usize] += 1;
            }
            for (value, &count) in counts.iter().enumerate() {
                let freq = count as f64 / 4096.0;
                assert!(
                    (freq - 0.10).abs() <= 0.08,
                    "digit {value} frequency {freq:.4} at d={digit}"
                );
            }
        }
    }
}
