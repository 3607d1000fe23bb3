//! Univariate polynomials over the rationals.
//!
//! Coefficients ascending, canonical form (no trailing zeros; empty vector is
//! the zero polynomial). Provides the exact root-counting machinery (Sturm
//! chains, resultants, Cauchy bounds) used for certified spectral-radius
//! intervals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QPoly {
    coeffs: Vec<BigRational>,
}

impl QPoly {
    pub fn zero() -> Self {
        QPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        QPoly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        let mut p = QPoly { coeffs: vec![c] };
        p.normalize();
        p
    }

    pub fn from_coeffs(coeffs: Vec<BigRational>) -> Self {
        let mut p = QPoly { coeffs };
        p.normalize();
        p
    }

    pub fn from_bigint_coeffs(coeffs: &[BigInt]) -> Self {
        Self::from_coeffs(
            coeffs
                .iter()
                .map(|c| BigRational::from_integer(c.clone()))
                .collect(),
        )
    }

    fn normalize(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn add(&self, rhs: &QPoly) -> QPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = vec![BigRational::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in rhs.coeffs.iter().enumerate() {
            out[i] += c;
        }
        QPoly::from_coeffs(out)
    }

    pub fn neg(&self) -> QPoly {
        QPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn sub(&self, rhs: &QPoly) -> QPoly {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &QPoly) -> QPoly {
        if self.is_zero() || rhs.is_zero() {
            return QPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        QPoly::from_coeffs(out)
    }

    pub fn scale(&self, c: &BigRational) -> QPoly {
        QPoly::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Euclidean division: returns `(quotient, remainder)`.
    pub fn div_rem(&self, divisor: &QPoly) -> (QPoly, QPoly) {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        let dd = divisor.degree().unwrap();
        let dlc = divisor.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![
            BigRational::zero();
            if self.coeffs.len() > dd {
                self.coeffs.len() - dd
            } else {
                1
            }
        ];
        while rem.len() > dd && !rem.is_empty() {
            let k = rem.len() - 1;
            let factor = rem[k].clone() / &dlc;
            if !factor.is_zero() {
                quot[k - dd] = factor.clone();
                for (i, c) in divisor.coeffs.iter().enumerate() {
                    let v = &rem[k - dd + i] - &factor * c;
                    rem[k - dd + i] = v;
                }
            }
            rem.pop();
            while rem.last().is_some_and(|c| c.is_zero()) {
                rem.pop();
            }
            if rem.len() <= dd {
                break;
            }
        }
        (QPoly::from_coeffs(quot), QPoly::from_coeffs(rem))
    }

    pub fn derivative(&self) -> QPoly {
        if self.coeffs.len() <= 1 {
            return QPoly::zero();
        }
        QPoly::from_coeffs(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i as i64 + 1)))
                .collect(),
        )
    }

    /// Monic gcd.
    pub fn gcd(&self, rhs: &QPoly) -> QPoly {
        let mut a = self.clone();
        let mut b = rhs.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            return a;
        }
        let lc = a.leading().unwrap().clone();
        a.scale(&lc.recip())
    }

    /// p / gcd(p, p'): same roots, all simple.
    pub fn squarefree_part(&self) -> QPoly {
        if self.degree().unwrap_or(0) <= 1 {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        if g.degree() == Some(0) {
            return self.clone();
        }
        let (q, r) = self.div_rem(&g);
        debug_assert!(r.is_zero());
        q
    }

    /// Scale by a positive rational so the coefficients become coprime
    /// integers. Sign pattern is preserved.
    fn primitive_scaled(&self) -> QPoly {
        use num_integer::Integer;
        if self.is_zero() {
            return self.clone();
        }
        let denom_lcm = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&denom_lcm / c.denom()))
            .collect();
        let content = ints
            .iter()
            .fold(BigInt::zero(), |acc, c| acc.gcd(c));
        QPoly {
            coeffs: ints
                .iter()
                .map(|c| BigRational::from_integer(c / &content))
                .collect(),
        }
    }

    /// Resultant Res(self, rhs) via the Euclidean recursion.
    pub fn resultant(&self, rhs: &QPoly) -> BigRational {
        fn res(f: &QPoly, g: &QPoly) -> BigRational {
            let df = f.degree();
            let dg = g.degree();
            match (df, dg) {
                (None, _) | (_, None) => BigRational::zero(),
                (Some(0), Some(n)) => pow_rat(f.leading().unwrap(), n as u32),
                (Some(m), Some(0)) => pow_rat(g.leading().unwrap(), m as u32),
                (Some(m), Some(n)) => {
                    let (_, r) = f.div_rem(g);
                    if r.is_zero() {
                        return BigRational::zero();
                    }
                    let dr = r.degree().unwrap();
                    let sign = if (m * n) % 2 == 1 {
                        -BigRational::one()
                    } else {
                        BigRational::one()
                    };
                    sign * pow_rat(g.leading().unwrap(), (m - dr) as u32) * res(g, &r)
                }
            }
        }
        res(self, rhs)
    }

    /// Cauchy bound: every real root has absolute value below the returned
    /// value.
    pub fn cauchy_root_bound(&self) -> BigRational {
        let lc = self.leading().expect("root bound of zero polynomial");
        let max_ratio = self
            .coeffs
            .iter()
            .rev()
            .skip(1)
            .map(|c| (c / lc).abs())
            .fold(BigRational::zero(), |a, b| if b > a { b } else { a });
        max_ratio + BigRational::one() + BigRational::one()
    }

    /// Sturm chain, each member scaled to a primitive integer polynomial
    /// (positive scaling preserves the sign sequence).
    pub fn sturm_chain(&self) -> Vec<QPoly> {
        let mut chain = vec![self.primitive_scaled()];
        let d = self.derivative();
        if !d.is_zero() {
            chain.push(d.primitive_scaled());
        }
        while chain.last().map(|p| !p.is_zero()).unwrap_or(false) && chain.len() >= 2 {
            let n = chain.len();
            let (_, r) = chain[n - 2].div_rem(&chain[n - 1]);
            if r.is_zero() {
                break;
            }
            chain.push(r.neg().primitive_scaled());
        }
        chain
    }

    fn sign_variations<F: Fn(&QPoly) -> i32>(chain: &[QPoly], sign_of: F) -> usize {
        let mut variations = 0;
        let mut last = 0i32;
        for p in chain {
            let s = sign_of(p);
            if s == 0 {
                continue;
            }
            if last != 0 && s != last {
                variations += 1;
            }
            last = s;
        }
        variations
    }

    /// Number of distinct real roots strictly greater than `t`.
    /// `self` must not vanish at `t`.
    pub fn count_roots_greater_than(chain: &[QPoly], t: &BigRational) -> usize {
        let at_t = Self::sign_variations(chain, |p| sign_rat(&p.eval(t)));
        let at_inf = Self::sign_variations(chain, |p| sign_rat(p.leading().unwrap()));
        at_t.saturating_sub(at_inf)
    }

    /// Lagrange interpolation through distinct nodes.
    pub fn interpolate(points: &[(BigRational, BigRational)]) -> QPoly {
        let mut acc = QPoly::zero();
        for (i, (xi, yi)) in points.iter().enumerate() {
            if yi.is_zero() {
                continue;
            }
            let mut numer = QPoly::constant(yi.clone());
            let mut denom = BigRational::one();
            for (j, (xj, _)) in points.iter().enumerate() {
                if i == j {
                    continue;
                }
                numer = numer.mul(&QPoly::from_coeffs(vec![-xj, BigRational::one()]));
                denom *= xi - xj;
            }
            acc = acc.add(&numer.scale(&denom.recip()));
        }
        acc
    }

    /// Multiplicity of the rational root `r` (0 if not a root).
    pub fn root_multiplicity(&self, r: &BigRational) -> usize {
        let mut p = self.clone();
        let factor = QPoly::from_coeffs(vec![-r, BigRational::one()]);
        let mut mult = 0;
        while !p.is_zero() && p.eval(r).is_zero() {
            let (q, rem) = p.div_rem(&factor);
            debug_assert!(rem.is_zero());
            p = q;
            mult += 1;
        }
        mult
    }

    /// Divide out `(x - r)^mult`, which must divide exactly.
    pub fn divide_out_root(&self, r: &BigRational, mult: usize) -> QPoly {
        let factor = QPoly::from_coeffs(vec![-r, BigRational::one()]);
        let mut p = self.clone();
        for _ in 0..mult {
            let (q, rem) = p.div_rem(&factor);
            assert!(rem.is_zero(), "divide_out_root: factor does not divide");
            p = q;
        }
        p
    }
}

fn pow_rat(base: &BigRational, exp: u32) -> BigRational {
    let mut out = BigRational::one();
    for _ in 0..exp {
        out *= base;
    }
    out
}

fn sign_rat(x: &BigRational) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn poly(cs: &[i64]) -> QPoly {
        QPoly::from_coeffs(cs.iter().map(|&c| q(c)).collect())
    }

    #[test]
    fn div_rem_round_trip() {
        // (x^2+x+4) = (x+1)(x) + 4
        let p = poly(&[4, 1, 1]);
        let d = poly(&[0, 1]);
        let (quot, rem) = p.div_rem(&d);
        assert_eq!(quot, poly(&[1, 1]));
        assert_eq!(rem, poly(&[4]));
        assert_eq!(quot.mul(&d).add(&rem), p);
    }

    #[test]
    fn gcd_of_shared_factor() {
        // (x-1)(x-2) and (x-1)(x+3) share (x-1)
        let a = poly(&[2, -3, 1]);
        let b = poly(&[-3, 2, 1]);
        assert_eq!(a.gcd(&b), poly(&[-1, 1]));
    }

    #[test]
    fn squarefree_strips_multiplicity() {
        // (x+3)^2 (x-2)
        let p = poly(&[-18, -3, 4, 1]);
        let sf = p.squarefree_part();
        assert_eq!(sf.degree(), Some(2));
        assert!(sf.eval(&q(-3)).is_zero());
        assert!(sf.eval(&q(2)).is_zero());
    }

    #[test]
    fn resultant_of_known_pair() {
        // Res(x^2-1, x-2) = (2-1)(2+1)... = p(2) = 3 for monic p with roots ±1.
        let p = poly(&[-1, 0, 1]);
        let l = poly(&[-2, 1]);
        // Res(p, l) = lc(l)^2 * p evaluated... use symmetric formula:
        // Res(p,l) = prod over roots r of p of l(r) = (1-2)(-1-2) = 3.
        assert_eq!(p.resultant(&l), q(3));
    }

    #[test]
    fn sturm_counts_roots() {
        // (x-1)(x-2)(x+5) has roots -5, 1, 2.
        let p = poly(&[10, -13, 2, 1]);
        let chain = p.sturm_chain();
        assert_eq!(QPoly::count_roots_greater_than(&chain, &q(0)), 2);
        assert_eq!(
            QPoly::count_roots_greater_than(&chain, &q(-10)),
            3
        );
        assert_eq!(QPoly::count_roots_greater_than(&chain, &q(3)), 0);
    }

    #[test]
    fn interpolation_recovers_polynomial() {
        let p = poly(&[4, 1, 1]);
        let pts: Vec<(BigRational, BigRational)> =
            (0..3).map(|i| (q(i), p.eval(&q(i)))).collect();
        assert_eq!(QPoly::interpolate(&pts), p);
    }

    #[test]
    fn multiplicity_and_division() {
        // (x+3)^2 (x-2)
        let p = poly(&[-18, -3, 4, 1]);
        assert_eq!(p.root_multiplicity(&q(-3)), 2);
        assert_eq!(p.root_multiplicity(&q(2)), 1);
        assert_eq!(p.root_multiplicity(&q(7)), 0);
        let rest = p.divide_out_root(&q(-3), 2);
        assert_eq!(rest, poly(&[-2, 1]));
    }
}
