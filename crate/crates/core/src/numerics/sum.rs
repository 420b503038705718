//! Neumaier compensated summation for real and complex accumulators.

use num_complex::Complex64;

/// Compensated real accumulator. Summation order is the caller's order.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated complex accumulator (independent real and imaginary parts).
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexSum {
    re: NeumaierSum,
    im: NeumaierSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: Complex64) {
        self.re.add(v.re);
        self.im.add(v.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// Sum a slice in index order with compensation.
pub fn sum_complex(values: &[Complex64]) -> Complex64 {
    let mut acc = ComplexSum::new();
    for &v in values {
        acc.add(v);
    }
    acc.value()
}

pub fn sum_real(values: &[f64]) -> f64 {
    let mut acc = NeumaierSum::new();
    for &v in values {
        acc.add(v);
    }
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_small_terms_lost_by_naive_sum() {
        let values = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(sum_real(&values), 2.0);
        let naive: f64 = values.iter().sum();
        assert_eq!(naive, 0.0);
    }

    #[test]
    fn complex_parts_are_independent() {
        let v = [
            Complex64::new(1e16, 1.0),
            Complex64::new(1.0, 1e16),
            Complex64::new(-1e16, -1e16),
        ];
        let s = sum_complex(&v);
        assert_eq!(s, Complex64::new(1.0, 1.0));
    }
}
