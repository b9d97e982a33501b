//! Exact integer primitives: factorization, divisors, Möbius, Jordan's
//! totient and the generalized gcd `(a, b)ₛ`.
//!
//! Everything here is exact. Factorizations are limited to values that fit a
//! `u128`; derived quantities that grow with `s` (powers, totients) are
//! returned as big integers.

mod prime;

pub use prime::is_prime;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Canonical prime factorization of a positive integer.
///
/// Primes are strictly increasing and every exponent is at least one; the
/// factorization of `1` is empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Factorization {
    value: u128,
    factors: Vec<(u128, u32)>,
}

impl Factorization {
    pub fn one() -> Self {
        Factorization {
            value: 1,
            factors: Vec::new(),
        }
    }

    /// Builds a factorization from `(prime, exponent)` pairs, checking every
    /// invariant.
    pub fn from_factors(mut factors: Vec<(u128, u32)>) -> Result<Self> {
        factors.sort_unstable();
        let mut value: u128 = 1;
        for (i, &(p, e)) in factors.iter().enumerate() {
            if e == 0 {
                return Err(Error::Domain(format!("exponent of {p} is zero")));
            }
            if i > 0 && factors[i - 1].0 == p {
                return Err(Error::Domain(format!("prime {p} listed twice")));
            }
            if !is_prime(p) {
                return Err(Error::Domain(format!("{p} is not prime")));
            }
            value = p
                .checked_pow(e)
                .and_then(|pe| value.checked_mul(pe))
                .ok_or_else(|| Error::Capacity("factorization value exceeds u128".into()))?;
        }
        Ok(Factorization { value, factors })
    }

    /// Trusted constructor for divisors of an already validated factorization.
    pub(crate) fn from_parts(value: u128, factors: Vec<(u128, u32)>) -> Self {
        debug_assert_eq!(
            factors.iter().map(|&(p, e)| p.pow(e)).product::<u128>(),
            value
        );
        Factorization { value, factors }
    }

    pub fn value(&self) -> u128 {
        self.value
    }

    pub fn factors(&self) -> &[(u128, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u128> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    /// Exponent of `p` in this factorization (zero when `p` does not divide).
    pub fn exponent_of(&self, p: u128) -> u32 {
        self.factors
            .binary_search_by_key(&p, |&(q, _)| q)
            .map(|i| self.factors[i].1)
            .unwrap_or(0)
    }

    /// τ(n)
    pub fn divisor_count(&self) -> u128 {
        self.factors.iter().map(|&(_, e)| e as u128 + 1).product()
    }

    /// `self / other`, or `None` when `other` does not divide `self`.
    pub fn checked_div(&self, other: &Factorization) -> Option<Factorization> {
        let mut out = Vec::with_capacity(self.factors.len());
        for &(p, _) in &other.factors {
            if self.exponent_of(p) == 0 {
                return None;
            }
        }
        for &(p, e) in &self.factors {
            let f = other.exponent_of(p);
            if f > e {
                return None;
            }
            if e > f {
                out.push((p, e - f));
            }
        }
        Some(Factorization::from_parts(self.value / other.value, out))
    }

    /// Factorization of `self · other` for coprime or overlapping operands.
    pub fn checked_mul(&self, other: &Factorization) -> Option<Factorization> {
        let value = self.value.checked_mul(other.value)?;
        let mut out: Vec<(u128, u32)> = self.factors.clone();
        for &(p, e) in &other.factors {
            match out.binary_search_by_key(&p, |&(q, _)| q) {
                Ok(i) => out[i].1 += e,
                Err(i) => out.insert(i, (p, e)),
            }
        }
        Some(Factorization::from_parts(value, out))
    }

    /// `value^s` as a big integer.
    pub fn pow_big(&self, s: u32) -> BigUint {
        BigUint::from(self.value).pow(s)
    }
}

/// Factorizes integers up to a configurable bound.
#[derive(Debug, Clone, Copy)]
pub struct Factorizer {
    limit: u128,
}

impl Default for Factorizer {
    /// Accepts every value below 2¹²⁸.
    fn default() -> Self {
        Factorizer { limit: u128::MAX }
    }
}

impl Factorizer {
    pub fn with_limit(limit: u128) -> Self {
        Factorizer { limit }
    }

    pub fn limit(&self) -> u128 {
        self.limit
    }

    pub fn factorize(&self, n: u128) -> Result<Factorization> {
        if n == 0 {
            return Err(Error::Domain("cannot factorize 0".into()));
        }
        if n > self.limit {
            return Err(Error::Capacity(format!(
                "{n} exceeds the factorization limit {}",
                self.limit
            )));
        }
        let mut rest = n;
        let mut factors = Vec::new();
        for &p in prime::small_primes() {
            let p = p as u128;
            if p * p > rest {
                break;
            }
            if rest % p == 0 {
                let mut e = 0;
                while rest % p == 0 {
                    rest /= p;
                    e += 1;
                }
                factors.push((p, e));
            }
        }
        if rest > 1 {
            let mut large = Vec::new();
            prime::split_large(rest, &mut large);
            large.sort_unstable();
            for p in large {
                match factors.last_mut() {
                    Some((q, e)) if *q == p => *e += 1,
                    _ => factors.push((p, 1)),
                }
            }
        }
        Ok(Factorization { value: n, factors })
    }

    /// Factorizes an arbitrary integer, rejecting non-positive values.
    pub fn factorize_integer(&self, n: &BigInt) -> Result<Factorization> {
        if !n.is_positive() {
            return Err(Error::Domain(format!("cannot factorize {n}")));
        }
        match n.to_u128() {
            Some(v) => self.factorize(v),
            None => Err(Error::Capacity(format!(
                "{n} exceeds the factorization limit {}",
                self.limit
            ))),
        }
    }
}

/// Factorizes `n` with the default bound.
pub fn factorize(n: u128) -> Result<Factorization> {
    Factorizer::default().factorize(n)
}

/// Every divisor of `n` together with its factorization, sorted by value.
pub fn divisor_factorizations(n: &Factorization) -> Vec<Factorization> {
    let mut out = vec![Factorization::one()];
    for &(p, e) in &n.factors {
        let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
        for d in &out {
            let mut pk: u128 = 1;
            for k in 0..=e {
                let mut factors = d.factors.clone();
                if k > 0 {
                    factors.push((p, k));
                }
                next.push(Factorization::from_parts(d.value * pk, factors));
                pk *= p;
            }
        }
        out = next;
    }
    out.sort_unstable_by_key(|d| d.value);
    out
}

/// All positive divisors of `n` in increasing order.
pub fn divisors(n: &Factorization) -> Vec<u128> {
    divisor_factorizations(n)
        .into_iter()
        .map(|d| d.value)
        .collect()
}

pub fn mobius(n: &Factorization) -> i8 {
    if n.factors.iter().any(|&(_, e)| e >= 2) {
        0
    } else if n.factors.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `Σ_{d|n} μ(d)`, evaluated as the literal divisor sum.
pub fn mobius_summatory(n: &Factorization) -> i64 {
    divisor_factorizations(n)
        .iter()
        .map(|d| mobius(d) as i64)
        .sum()
}

/// Jordan's totient `Jₛ(n) = nˢ ∏_{p|n} (1 - p⁻ˢ)`.
///
/// # Panics
///
/// Panics if `s == 0`.
pub fn jordan_totient(n: &Factorization, s: u32) -> BigUint {
    assert!(s >= 1, "Jordan totient needs s >= 1");
    let mut numerator = n.pow_big(s);
    let mut denominator = BigUint::one();
    for p in n.primes() {
        let ps = BigUint::from(p).pow(s);
        numerator *= &ps - 1u32;
        denominator *= ps;
    }
    let (q, r) = numerator.div_rem(&denominator);
    debug_assert!(r.is_zero());
    q
}

/// The generalized gcd `(a, b)ₛ = lˢ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GcdS {
    pub base: BigUint,
    pub power: u32,
    pub value: BigUint,
}

/// Largest `lˢ` dividing both `a` and `b`.
///
/// Signs are ignored. `(0, 0)` has no largest common divisor and is
/// rejected, as is `s = 0`.
pub fn gcd_s(a: impl Into<BigInt>, b: impl Into<BigInt>, s: u32) -> Result<GcdS> {
    gcd_s_with(&Factorizer::default(), &a.into(), &b.into(), s)
}

pub fn gcd_s_with(factorizer: &Factorizer, a: &BigInt, b: &BigInt, s: u32) -> Result<GcdS> {
    if s == 0 {
        return Err(Error::Domain("s must be at least 1".into()));
    }
    if a.is_zero() && b.is_zero() {
        return Err(Error::Domain("(0, 0)_s is undefined".into()));
    }
    let g = a.gcd(b);
    let g = factorizer.factorize_integer(&g)?;
    let mut base = BigUint::one();
    for &(p, e) in g.factors() {
        let k = e / s;
        if k > 0 {
            base *= BigUint::from(p).pow(k);
        }
    }
    let value = base.clone().pow(s);
    Ok(GcdS {
        base,
        power: s,
        value,
    })
}

/// The divisor `l` of `n` with `(x, nˢ)ₛ = lˢ`.
///
/// Computed prime by prime from the factorization of `n`, so `x` may be
/// arbitrarily large. `x ≡ 0 (mod nˢ)` yields `n` itself.
pub fn gcd_s_against_power(x: &BigInt, n: &Factorization, s: u32) -> Factorization {
    let mut value: u128 = 1;
    let mut factors = Vec::new();
    for &(p, e) in n.factors() {
        let v = valuation_capped(x, p, e.saturating_mul(s));
        let k = (v / s).min(e);
        if k > 0 {
            factors.push((p, k));
            value *= p.pow(k);
        }
    }
    Factorization::from_parts(value, factors)
}

/// `min(v_p(x), cap)`, with `v_p(0) = ∞`.
pub(crate) fn valuation_capped(x: &BigInt, p: u128, cap: u32) -> u32 {
    if x.is_zero() {
        return cap;
    }
    let p = BigInt::from(p);
    let mut x = x.clone();
    let mut v = 0;
    while v < cap {
        let (q, r) = x.div_rem(&p);
        if !r.is_zero() {
            break;
        }
        x = q;
        v += 1;
    }
    v
}
