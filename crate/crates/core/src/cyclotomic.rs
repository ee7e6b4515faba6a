//! Exact arithmetic in cyclotomic fields ℚ(ζ_e).
//!
//! An element is a polynomial in ζ of degree below φ(e) with rational
//! coefficients, reduced modulo the e-th cyclotomic polynomial.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

fn cache() -> &'static RwLock<HashMap<u32, Arc<Vec<i64>>>> {
    static CACHE: OnceLock<RwLock<HashMap<u32, Arc<Vec<i64>>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Coefficients (constant term first) of the e-th cyclotomic polynomial.
pub fn cyclotomic_polynomial(e: u32) -> Arc<Vec<i64>> {
    assert!(e >= 1, "cyclotomic order must be positive");
    if let Some(p) = cache().read().unwrap().get(&e) {
        return p.clone();
    }
    // x^e - 1 divided by Φ_d for every proper divisor d.
    let mut num = vec![0i64; e as usize + 1];
    num[0] = -1;
    num[e as usize] = 1;
    for d in 1..e {
        if e % d == 0 {
            let div = cyclotomic_polynomial(d);
            num = exact_div(&num, &div);
        }
    }
    let arc = Arc::new(num);
    cache().write().unwrap().insert(e, arc.clone());
    arc
}

fn exact_div(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let lead = den[dd];
    debug_assert!(lead == 1);
    let qlen = rem.len() - dd;
    let mut q = vec![0i64; qlen];
    for i in (0..qlen).rev() {
        let c = rem[i + dd];
        q[i] = c;
        if c != 0 {
            for (j, &dj) in den.iter().enumerate() {
                rem[i + j] -= c * dj;
            }
        }
    }
    debug_assert!(rem.iter().all(|&x| x == 0));
    q
}

/// Euler's totient.
pub fn totient(e: u32) -> u32 {
    (1..=e).filter(|&k| num_integer::gcd(k, e) == 1).count() as u32
}

/// An element of ℚ(ζ_e).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Cyclotomic {
    order: u32,
    coeffs: Vec<BigRational>,
}

impl Cyclotomic {
    pub fn zero(order: u32) -> Self {
        let d = totient(order) as usize;
        Cyclotomic {
            order,
            coeffs: vec![BigRational::zero(); d],
        }
    }

    pub fn one(order: u32) -> Self {
        Self::from_rational(order, BigRational::one())
    }

    pub fn from_int(order: u32, v: i64) -> Self {
        Self::from_rational(order, BigRational::from_integer(BigInt::from(v)))
    }

    pub fn from_rational(order: u32, v: BigRational) -> Self {
        let mut z = Self::zero(order);
        z.coeffs[0] = v;
        z
    }

    /// Builds an element from a coefficient vector of any length, reducing
    /// modulo Φ_e.
    pub fn from_coeffs(order: u32, coeffs: Vec<BigRational>) -> Self {
        let mut c = coeffs;
        reduce(order, &mut c);
        Cyclotomic { order, coeffs: c }
    }

    /// ζ_e^k.
    pub fn zeta_pow(order: u32, k: i64) -> Self {
        let k = k.rem_euclid(order as i64) as usize;
        let mut c = vec![BigRational::zero(); k + 1];
        c[k] = BigRational::one();
        Self::from_coeffs(order, c)
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// The rational value, if the element lies in ℚ.
    pub fn to_rational(&self) -> Option<BigRational> {
        if self.coeffs.iter().skip(1).all(Zero::is_zero) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    /// Image under the Galois automorphism ζ ↦ ζ^k.
    pub fn galois(&self, k: i64) -> Self {
        let e = self.order as i64;
        let mut out = vec![BigRational::zero(); self.order as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                let j = ((i as i64) * k).rem_euclid(e) as usize;
                out[j] += c;
            }
        }
        Self::from_coeffs(self.order, out)
    }

    /// Complex conjugate: ζ ↦ ζ^{-1}.
    pub fn conj(&self) -> Self {
        self.galois(-1)
    }

    /// Multiplicative inverse, via the product of the other Galois conjugates.
    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        if self.order <= 2 {
            return Self::from_rational(self.order, self.coeffs[0].recip());
        }
        let mut rest = Self::one(self.order);
        for k in 2..self.order {
            if num_integer::gcd(k, self.order) == 1 {
                rest = &rest * &self.galois(k as i64);
            }
        }
        let norm = (self * &rest)
            .to_rational()
            .expect("field norm must be rational");
        rest.scale(&norm.recip())
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Cyclotomic {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    /// Re-expresses an element of ℚ(ζ_e) inside ℚ(ζ_f), for e | f.
    pub fn embed(&self, target: u32) -> Self {
        assert!(target % self.order == 0, "ℚ(ζ_{}) ⊄ ℚ(ζ_{})", self.order, target);
        let step = (target / self.order) as usize;
        let mut out = vec![BigRational::zero(); self.coeffs.len() * step + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i * step] = c.clone();
        }
        Self::from_coeffs(target, out)
    }

    /// Embedding into ℂ with ζ_e ↦ exp(2πi/e).
    pub fn to_complex(&self) -> Complex64 {
        let e = self.order as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let v = rat_to_f64(c);
            let ang = 2.0 * std::f64::consts::PI * i as f64 / e;
            acc += Complex64::from_polar(v, ang);
        }
        acc
    }

    pub fn checked_same_field(&self, other: &Self) -> Result<()> {
        if self.order == other.order {
            Ok(())
        } else {
            Err(Error::InternalInconsistency(format!(
                "mixing ℚ(ζ_{}) and ℚ(ζ_{})",
                self.order, other.order
            )))
        }
    }
}

pub(crate) fn rat_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => r.to_f64().unwrap_or(f64::NAN),
    }
}

fn reduce(order: u32, c: &mut Vec<BigRational>) {
    let phi = cyclotomic_polynomial(order);
    let d = phi.len() - 1;
    while c.len() > d {
        let top = c.pop().unwrap();
        if top.is_zero() {
            continue;
        }
        let shift = c.len() - d;
        for (j, &pj) in phi.iter().enumerate().take(d) {
            if pj != 0 {
                c[shift + j] -= &top * BigInt::from(pj);
            }
        }
    }
    c.resize(d, BigRational::zero());
}

impl fmt::Debug for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match i {
                0 => write!(f, "{a}")?,
                1 if a.is_one() => write!(f, "z{}", self.order)?,
                1 => write!(f, "{a}*z{}", self.order)?,
                _ if a.is_one() => write!(f, "z{}^{i}", self.order)?,
                _ => write!(f, "{a}*z{}^{i}", self.order)?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl<'a> Add<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    fn add(self, rhs: &Cyclotomic) -> Cyclotomic {
        debug_assert_eq!(self.order, rhs.order);
        Cyclotomic {
            order: self.order,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl<'a> Sub<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    fn sub(self, rhs: &Cyclotomic) -> Cyclotomic {
        debug_assert_eq!(self.order, rhs.order);
        Cyclotomic {
            order: self.order,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl<'a> Mul<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, rhs: &Cyclotomic) -> Cyclotomic {
        debug_assert_eq!(self.order, rhs.order);
        let d = self.coeffs.len();
        if d == 1 {
            return Cyclotomic {
                order: self.order,
                coeffs: vec![&self.coeffs[0] * &rhs.coeffs[0]],
            };
        }
        let mut out = vec![BigRational::zero(); 2 * d - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        reduce(self.order, &mut out);
        Cyclotomic {
            order: self.order,
            coeffs: out,
        }
    }
}

impl Neg for &Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        Cyclotomic {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(*cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(*cyclotomic_polynomial(2), vec![1, 1]);
        assert_eq!(*cyclotomic_polynomial(3), vec![1, 1, 1]);
        assert_eq!(*cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(*cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(*cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(totient(12), 4);
    }

    #[test]
    fn roots_of_unity_multiply() {
        for e in [3u32, 4, 5, 6, 8, 12] {
            let z = Cyclotomic::zeta_pow(e, 1);
            let mut p = Cyclotomic::one(e);
            for _ in 0..e {
                p = &p * &z;
            }
            assert_eq!(p, Cyclotomic::one(e));
            // 1 + ζ + ... + ζ^{e-1} = 0 for e > 1
            let mut s = Cyclotomic::zero(e);
            for k in 0..e {
                s = &s + &Cyclotomic::zeta_pow(e, k as i64);
            }
            assert!(s.is_zero());
        }
    }

    #[test]
    fn inverse_and_conjugate() {
        let e = 12;
        let a = Cyclotomic::from_coeffs(e, vec![r(1, 2), r(-3, 1), r(0, 1), r(2, 5)]);
        let inv = a.inv();
        assert_eq!(&a * &inv, Cyclotomic::one(e));
        let n = &a * &a.conj();
        assert!(n.to_complex().im.abs() < 1e-12);
        let z = a.to_complex() * a.to_complex().conj();
        assert!((n.to_complex() - z).norm() < 1e-9);
    }

    #[test]
    fn embedding_preserves_values() {
        let a = Cyclotomic::zeta_pow(3, 1);
        let b = a.embed(6);
        assert!((a.to_complex() - b.to_complex()).norm() < 1e-12);
        assert_eq!(b, Cyclotomic::zeta_pow(6, 2));
    }

    #[test]
    fn rational_detection() {
        let z = Cyclotomic::zeta_pow(3, 1);
        let s = &z + &z.conj();
        assert_eq!(s.to_rational(), Some(r(-1, 1)));
        assert_eq!(z.to_rational(), None);
    }
}
