//! Dense matrices and the division-free characteristic polynomial.

use super::coeff::Coeff;
use super::poly::Poly;

/// Row-major dense matrix.
#[derive(Clone, Debug)]
pub struct Matrix<C> {
    rows: usize,
    cols: usize,
    data: Vec<C>,
}

impl<C: PartialEq> PartialEq for Matrix<C> {
    fn eq(&self, o: &Self) -> bool {
        self.rows == o.rows && self.cols == o.cols && self.data == o.data
    }
}

impl<C: Coeff> Matrix<C> {
    pub fn new(rows: usize, cols: usize, data: Vec<C>) -> Self {
        assert_eq!(data.len(), rows * cols, "dimension mismatch");
        Matrix { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C) -> Self {
        let mut f = f;
        let data = (0..rows * cols).map(|k| f(k / cols, k % cols)).collect();
        Matrix { rows, cols, data }
    }

    pub fn identity(n: usize, template: &C) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { template.one_like() } else { template.zero_like() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &C {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, c: C) {
        self.data[i * self.cols + j] = c;
    }

    pub fn data(&self) -> &[C] {
        &self.data
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Matrix<D> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn add(&self, o: &Self) -> Self {
        assert!(self.rows == o.rows && self.cols == o.cols);
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert!(self.rows == o.rows && self.cols == o.cols);
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        self.map(|a| a.mul(c))
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "dimension mismatch");
        let zero = self.data[0].zero_like();
        Self::from_fn(self.rows, o.cols, |i, j| {
            C::dot(&zero, (0..self.cols).map(|k| (self.get(i, k), o.get(k, j))))
        })
    }

    pub fn mul_vec(&self, v: &[C]) -> Vec<C> {
        assert_eq!(self.cols, v.len());
        let zero = self.data[0].zero_like();
        (0..self.rows).map(|i| C::dot(&zero, (0..self.cols).map(|k| (self.get(i, k), &v[k])))).collect()
    }

    pub fn trace(&self) -> C {
        let mut t = self.data[0].zero_like();
        for i in 0..self.rows.min(self.cols) {
            t = t.add(self.get(i, i));
        }
        t
    }

    /// `det(T·I − M)` by Berkowitz's division-free algorithm, ascending coefficients.
    ///
    /// Only ring operations are used, so p-adic precision propagates through
    /// the ordinary tracked arithmetic and every coefficient's precision is a
    /// provable lower bound.
    pub fn charpoly(&self) -> Poly<C> {
        assert_eq!(self.rows, self.cols, "charpoly of a non-square matrix");
        let n = self.rows;
        let one = self.data[0].one_like();
        let zero = self.data[0].zero_like();
        // vect holds the charpoly of the leading r×r block, highest degree first.
        let mut vect = vec![one.clone(), self.get(0, 0).neg()];
        for r in 1..n {
            let a = self.get(r, r);
            let mut col = vec![one.clone(), a.neg()];
            let mut x: Vec<C> = (0..r).map(|i| self.get(i, r).clone()).collect();
            for step in 0..r {
                let rx = C::dot(&zero, (0..r).map(|j| (self.get(r, j), &x[j])));
                col.push(rx.neg());
                if step + 1 < r {
                    x = (0..r)
                        .map(|i| C::dot(&zero, (0..r).map(|j| (self.get(i, j), &x[j]))))
                        .collect();
                }
            }
            // Lower-triangular Toeplitz (r+2)×(r+1) with first column `col`.
            let next = (0..r + 2)
                .map(|i| C::dot(&zero, (0..=i.min(r)).map(|j| (&col[i - j], &vect[j]))))
                .collect();
            vect = next;
        }
        vect.reverse();
        Poly::new(vect)
    }

    pub fn det(&self) -> C {
        let cp = self.charpoly();
        let c0 = cp.coeff(0).cloned().unwrap_or_else(|| self.data[0].zero_like());
        if self.rows % 2 == 1 {
            c0.neg()
        } else {
            c0
        }
    }
}

/// Characteristic polynomial `det(T·I − M)` of a square p-adic (or any) matrix.
pub fn charpoly<C: Coeff>(m: &Matrix<C>) -> Poly<C> {
    m.charpoly()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::PadicRing;
    use num_bigint::BigInt;

    fn zm(n: usize, v: &[i64]) -> Matrix<BigInt> {
        Matrix::new(n, n, v.iter().map(|&c| BigInt::from(c)).collect())
    }

    fn ints(p: &Poly<BigInt>) -> Vec<i64> {
        p.coeffs().iter().map(|c| i64::try_from(c).unwrap()).collect()
    }

    #[test]
    fn identity_charpoly() {
        assert_eq!(ints(&zm(2, &[1, 0, 0, 1]).charpoly()), vec![1, -2, 1]);
    }

    #[test]
    fn diagonal_over_padics() {
        let z = PadicRing::new(5, 8);
        let m = Matrix::new(2, 2, [2, 0, 0, 3].iter().map(|&v| z.from_i64(v, 4)).collect());
        let cp = m.charpoly();
        let lifted: Vec<_> = cp.coeffs().iter().map(|c| c.lift_symmetric()).collect();
        assert_eq!(lifted, [6, -5, 1].map(BigInt::from));
        assert!(cp.coeffs().iter().all(|c| c.precision() >= 4));
    }

    #[test]
    fn three_by_three_det() {
        let m = zm(3, &[2, -1, 0, 1, 3, 4, 0, 5, 1]);
        // det = 2(3 - 20) + 1(1 - 0) = -33
        assert_eq!(m.det(), BigInt::from(-33));
        assert_eq!(ints(&m.charpoly())[3], 1);
    }
}
