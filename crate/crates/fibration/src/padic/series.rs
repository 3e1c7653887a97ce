//! Truncated power series.

use super::coeff::Coeff;

/// `Σ_{i<order} c_i y^i + O(y^order)`.
#[derive(Clone, Debug)]
pub struct TruncSeries<C> {
    coeffs: Vec<C>,
    order: usize,
}

impl<C: Coeff> TruncSeries<C> {
    /// Pads with `zero` (or truncates) to exactly `order` coefficients.
    pub fn new(mut coeffs: Vec<C>, order: usize, zero: &C) -> Self {
        coeffs.resize(order, zero.zero_like());
        TruncSeries { coeffs, order }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &C {
        &self.coeffs[i]
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.order.min(o.order);
        TruncSeries { coeffs: (0..n).map(|i| self.coeffs[i].add(&o.coeffs[i])).collect(), order: n }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.order.min(o.order);
        TruncSeries { coeffs: (0..n).map(|i| self.coeffs[i].sub(&o.coeffs[i])).collect(), order: n }
    }

    /// Product truncated to the smaller order.
    pub fn mul(&self, o: &Self) -> Self {
        let n = self.order.min(o.order);
        if n == 0 {
            return TruncSeries { coeffs: Vec::new(), order: 0 };
        }
        let zero = self.coeffs[0].zero_like();
        let coeffs = (0..n)
            .map(|k| C::dot(&zero, (0..=k).map(|i| (&self.coeffs[i], &o.coeffs[k - i]))))
            .collect();
        TruncSeries { coeffs, order: n }
    }

    /// Multiplicative inverse when the constant term is invertible.
    pub fn inv(&self) -> Option<Self> {
        let c0 = self.coeffs.first()?.try_inv()?;
        let zero = c0.zero_like();
        let mut out: Vec<C> = vec![c0.clone()];
        for k in 1..self.order {
            let s = C::dot(&zero, (1..=k).map(|i| (&self.coeffs[i], &out[k - i])));
            out.push(s.mul(&c0).neg());
        }
        Some(TruncSeries { coeffs: out, order: self.order })
    }

    pub fn derivative(&self) -> Self {
        let n = self.order.saturating_sub(1);
        TruncSeries {
            coeffs: (0..n).map(|i| self.coeffs[i + 1].mul_i64(i as i64 + 1)).collect(),
            order: n,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn s(cs: &[i64], n: usize) -> TruncSeries<BigInt> {
        let z = BigInt::from(0);
        TruncSeries::new(cs.iter().map(|&c| BigInt::from(c)).collect(), n, &z)
    }

    #[test]
    fn geometric_inverse() {
        let inv = s(&[1, -1], 6).inv().unwrap();
        assert!(inv.coeffs().iter().all(|c| *c == BigInt::from(1)));
    }

    #[test]
    fn orders_truncate_to_min() {
        let a = s(&[1, 2, 3], 3);
        let b = s(&[1, 1], 5);
        let c = a.mul(&b);
        assert_eq!(c.order(), 3);
        assert_eq!(c.coeffs(), s(&[1, 3, 5], 3).coeffs());
    }
}
