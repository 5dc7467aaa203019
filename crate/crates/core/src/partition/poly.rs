use crate::error::{Result, TangenciaError};
use crate::lifting::Point3;

/// Number of monomials in three variables of total degree at most `d`.
pub fn monomial_count(d: usize) -> usize {
    (d + 1) * (d + 2) * (d + 3) / 6
}

/// Exponent triples of degree at most `d` in storage order: the power of `x`
/// varies slowest and the power of `z` fastest.
pub fn monomials(d: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::with_capacity(monomial_count(d));
    for i in 0..=d {
        for j in 0..=d - i {
            for k in 0..=d - i - j {
                out.push([i, j, k]);
            }
        }
    }
    out
}

/// Values of every monomial of degree at most `d` at `p`, in storage order.
pub fn veronese(p: &Point3, d: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(monomial_count(d));
    veronese_into(p, d, &mut out);
    out
}

pub(crate) fn veronese_into(p: &Point3, d: usize, out: &mut Vec<f64>) {
    out.clear();
    let mut px = 1.0;
    for i in 0..=d {
        let mut pxy = px;
        for j in 0..=d - i {
            let mut m = pxy;
            for _ in 0..=d - i - j {
                out.push(m);
                m *= p[2];
            }
            pxy *= p[1];
        }
        px *= p[0];
    }
}

/// A real polynomial in three variables with dense coefficients.
///
/// Coefficients follow [`monomials`] order. Evaluation is nested Horner:
/// innermost in `z`, then `y`, then `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiPoly {
    degree: usize,
    coeffs: Vec<f64>,
}

impl MultiPoly {
    pub fn new(degree: usize, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != monomial_count(degree) {
            return Err(TangenciaError::InvalidParams(format!(
                "degree {degree} needs {} coefficients, got {}",
                monomial_count(degree),
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) || coeffs.iter().all(|&c| c == 0.0) {
            return Err(TangenciaError::InvalidParams("coefficients must be finite and not all zero".into()));
        }
        Ok(MultiPoly { degree, coeffs })
    }

    /// Builds a polynomial from (exponent, coefficient) terms.
    pub fn from_terms(degree: usize, terms: &[([usize; 3], f64)]) -> Result<Self> {
        let mons = monomials(degree);
        let mut coeffs = vec![0.0; mons.len()];
        for (e, c) in terms {
            let idx = mons.iter().position(|m| m == e).ok_or_else(|| {
                TangenciaError::InvalidParams(format!("exponent {e:?} exceeds degree {degree}"))
            })?;
            coeffs[idx] += c;
        }
        MultiPoly::new(degree, coeffs)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn terms(&self) -> impl Iterator<Item = ([usize; 3], f64)> + '_ {
        monomials(self.degree).into_iter().zip(self.coeffs.iter().copied())
    }

    pub fn eval(&self, p: &Point3) -> f64 {
        let d = self.degree;
        // Coefficients for a fixed power of x occupy a contiguous block; walk
        // the blocks backwards so each level is a Horner step.
        let mut end = self.coeffs.len();
        let mut acc_x = 0.0;
        for i in (0..=d).rev() {
            let block = monomial_count_2(d - i);
            let start = end - block;
            let mut acc_y = 0.0;
            let mut row_end = end;
            for j in (0..=d - i).rev() {
                let len = d - i - j + 1;
                let row = &self.coeffs[row_end - len..row_end];
                let acc_z = row.iter().rev().fold(0.0, |a, &c| a * p[2] + c);
                acc_y = acc_y * p[1] + acc_z;
                row_end -= len;
            }
            acc_x = acc_x * p[0] + acc_y;
            end = start;
        }
        acc_x
    }

    /// Sum of absolute term magnitudes at `p`; the scale for zero tests.
    pub fn magnitude(&self, p: &Point3) -> f64 {
        let abs = [p[0].abs(), p[1].abs(), p[2].abs()];
        let mut buf = Vec::new();
        veronese_into(&abs, self.degree, &mut buf);
        buf.iter().zip(&self.coeffs).map(|(m, c)| m * c.abs()).sum()
    }
}

/// Monomials in two variables of degree at most `d`.
fn monomial_count_2(d: usize) -> usize {
    (d + 1) * (d + 2) / 2
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(p: &MultiPoly, x: &Point3) -> f64 {
        p.terms()
            .map(|(e, c)| c * x[0].powi(e[0] as i32) * x[1].powi(e[1] as i32) * x[2].powi(e[2] as i32))
            .sum()
    }

    #[test]
    fn counts_match_enumeration() {
        for d in 0..8 {
            assert_eq!(monomials(d).len(), monomial_count(d));
            assert_eq!(veronese(&[0.3, -0.7, 1.1], d).len(), monomial_count(d));
        }
        assert_eq!(monomial_count(1), 4);
        assert_eq!(monomial_count(2), 10);
    }

    #[test]
    fn horner_matches_term_sum() {
        for d in 0..7 {
            let n = monomial_count(d);
            let coeffs: Vec<f64> = (0..n).map(|i| ((i * 37 % 11) as f64 - 5.0) / 3.0).collect();
            let p = MultiPoly::new(d, coeffs).unwrap();
            for x in [[0.3, -0.7, 1.1], [-1.0, 0.5, 0.25], [2.0, 0.0, -1.5]] {
                let (a, b) = (p.eval(&x), naive(&p, &x));
                assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "d={d}: {a} vs {b}");
                let v: f64 = veronese(&x, d).iter().zip(p.coeffs()).map(|(m, c)| m * c).sum();
                assert!((v - b).abs() <= 1e-12 * b.abs().max(1.0));
            }
        }
    }

    #[test]
    fn terms_and_validation() {
        let p = MultiPoly::from_terms(2, &[([0, 0, 1], 1.0), ([2, 0, 0], -3.0)]).unwrap();
        assert_eq!(p.eval(&[1.0, 5.0, 2.0]), -1.0);
        assert!(MultiPoly::from_terms(1, &[([2, 0, 0], 1.0)]).is_err());
        assert!(MultiPoly::new(1, vec![0.0; 4]).is_err());
        assert!(MultiPoly::new(1, vec![1.0; 3]).is_err());
        assert!(p.magnitude(&[1.0, 0.0, -2.0]) >= p.eval(&[1.0, 0.0, -2.0]).abs());
    }
}
