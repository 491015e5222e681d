//! Exact arithmetic in prime fields F_p.
//!
//! Everything downstream (matrices, generator checks, the codec) works over a
//! small prime field. The default field for randomized codes is F_257: small
//! enough for exhaustive tests, large enough that random matrices are full
//! rank with high probability.

use thiserror::Error;

/// Default modulus for randomized code construction.
pub const DEFAULT_PRIME: u32 = 257;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not a prime modulus")]
    NotPrime(u32),
    #[error("modulus {0} exceeds 2^31")]
    ModulusTooLarge(u32),
    #[error("elements belong to different fields (F_{0} vs F_{1})")]
    FieldMismatch(u32, u32),
    #[error("division by zero in F_{0}")]
    DivisionByZero(u32),
}

/// A prime field F_p, p < 2^31, primality checked at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self, FieldError> {
        if p >= 1 << 31 {
            return Err(FieldError::ModulusTooLarge(p));
        }
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(PrimeField { p })
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    pub fn element(&self, value: u64) -> FieldElement {
        FieldElement {
            value: (value % self.p as u64) as u32,
            field: *self,
        }
    }

    pub fn zero(&self) -> FieldElement {
        self.element(0)
    }

    pub fn one(&self) -> FieldElement {
        self.element(1)
    }

    // Raw residue arithmetic used by the matrix kernels, where the field is
    // fixed and element wrappers would just add overhead.
    #[inline]
    pub(crate) fn add_raw(&self, a: u32, b: u32) -> u32 {
        let s = a as u64 + b as u64;
        (s % self.p as u64) as u32
    }

    #[inline]
    pub(crate) fn sub_raw(&self, a: u32, b: u32) -> u32 {
        let s = a as u64 + (self.p - b) as u64;
        (s % self.p as u64) as u32
    }

    #[inline]
    pub(crate) fn mul_raw(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    #[inline]
    pub(crate) fn inv_raw(&self, a: u32) -> Result<u32, FieldError> {
        if a == 0 {
            return Err(FieldError::DivisionByZero(self.p));
        }
        // Extended Euclid on (a, p); p prime so gcd = 1.
        let (mut r0, mut r1) = (a as i64, self.p as i64);
        let (mut s0, mut s1) = (1i64, 0i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        debug_assert_eq!(r0, 1);
        Ok(s0.rem_euclid(self.p as i64) as u32)
    }
}

/// A residue in [0, p) tagged with its field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u32,
    field: PrimeField,
}

impl FieldElement {
    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn check_same(&self, other: &FieldElement) -> Result<(), FieldError> {
        if self.field != other.field {
            return Err(FieldError::FieldMismatch(
                self.field.p,
                other.field.p,
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check_same(other)?;
        Ok(FieldElement {
            value: self.field.add_raw(self.value, other.value),
            field: self.field,
        })
    }

    pub fn sub(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check_same(other)?;
        Ok(FieldElement {
            value: self.field.sub_raw(self.value, other.value),
            field: self.field,
        })
    }

    pub fn mul(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check_same(other)?;
        Ok(FieldElement {
            value: self.field.mul_raw(self.value, other.value),
            field: self.field,
        })
    }

    pub fn neg(&self) -> FieldElement {
        FieldElement {
            value: self.field.sub_raw(0, self.value),
            field: self.field,
        }
    }

    /// Multiplicative inverse via extended Euclid.
    pub fn inv(&self) -> Result<FieldElement, FieldError> {
        Ok(FieldElement {
            value: self.field.inv_raw(self.value)?,
            field: self.field,
        })
    }

    pub fn div(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check_same(other)?;
        self.mul(&other.inv()?)
    }
}

impl std::fmt::Display for FieldElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.value)
    }
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    if p % 2 == 0 {
        return p == 2;
    }
    let mut d = 3u64;
    let p64 = p as u64;
    while d * d <= p64 {
        if p64 % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f7() -> PrimeField {
        PrimeField::new(7).unwrap()
    }

    #[test]
    fn rejects_composite_modulus() {
        assert_eq!(PrimeField::new(6), Err(FieldError::NotPrime(6)));
        assert_eq!(PrimeField::new(1), Err(FieldError::NotPrime(1)));
        assert_eq!(PrimeField::new(0), Err(FieldError::NotPrime(0)));
        assert!(PrimeField::new(2).is_ok());
        assert!(PrimeField::new(257).is_ok());
    }

    #[test]
    fn add_examples() {
        let f = f7();
        assert_eq!(f.element(3).add(&f.element(5)).unwrap().value(), 1);
        assert_eq!(f.element(0).add(&f.element(6)).unwrap().value(), 6);
        let f257 = PrimeField::new(257).unwrap();
        assert_eq!(f257.element(256).add(&f257.element(1)).unwrap().value(), 0);
    }

    #[test]
    fn mul_examples() {
        let f = f7();
        assert_eq!(f.element(3).mul(&f.element(4)).unwrap().value(), 5);
        assert_eq!(f.element(1).mul(&f.element(6)).unwrap().value(), 6);
        assert_eq!(f.element(0).mul(&f.element(6)).unwrap().value(), 0);
    }

    #[test]
    fn inv_examples() {
        let f = f7();
        assert_eq!(f.element(3).inv().unwrap().value(), 5);
        assert_eq!(f.element(1).inv().unwrap().value(), 1);
        assert_eq!(f.element(6).inv().unwrap().value(), 6);
        assert_eq!(f.zero().inv(), Err(FieldError::DivisionByZero(7)));
    }

    #[test]
    fn mismatched_fields_rejected() {
        let a = f7().element(3);
        let b = PrimeField::new(11).unwrap().element(3);
        assert_eq!(a.add(&b), Err(FieldError::FieldMismatch(7, 11)));
        assert_eq!(a.mul(&b), Err(FieldError::FieldMismatch(7, 11)));
    }

    #[test]
    fn inverses_exhaustive_small_primes() {
        for p in [2u32, 3, 5, 7, 13, 101, 257] {
            let f = PrimeField::new(p).unwrap();
            for v in 1..p {
                let a = f.element(v as u64);
                assert_eq!(a.mul(&a.inv().unwrap()).unwrap(), f.one());
            }
        }
    }
}
