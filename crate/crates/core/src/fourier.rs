//! Ramanujan sums, `(r,s)`-even functions and their finite Fourier
//! transforms.
//!
//! Two transform conventions live here. [`dft`] is the mean-normalized
//! transform `(1/N) Σ f(m) e(-bm/N)` of an arbitrary `N`-periodic function and
//! is evaluated in floating point. [`dft_even`] is the unnormalized transform
//! of an `(r,s)`-even function, written as a divisor sum over generalized
//! Ramanujan sums and evaluated exactly. The counting theorems only ever use
//! the second one.

use std::f64::consts::TAU;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Pow, ToPrimitive, Zero};

use crate::arith::{
    divisor_factorizations, factorize, gcd_s_against_power, mobius, valuation_capped, Factorization,
};
use crate::error::{Error, Result};

/// Largest period `rˢ` the exponential-sum oracle will evaluate.
pub const DEFINITION_ORACLE_MAX_PERIOD: u64 = 1_000_000;

/// Bound on both the imaginary part and the rounding residual of the
/// exponential-sum oracle.
pub const DEFINITION_ORACLE_TOLERANCE: f64 = 1e-6;

/// Periods up to this size are stored as explicit value tables.
pub const MAX_STORED_PERIOD: u64 = 1 << 24;

/// Largest `period²` for which Cauchy products use the direct fold.
pub const DIRECT_FOLD_LIMIT: u128 = 100_000_000;

/// Classic Ramanujan sum `c_r(m)`, by Hölder's formula
/// `μ(r/g) φ(r) / φ(r/g)` with `g = gcd(r, m)`.
pub fn ramanujan_sum(r: u128, m: impl Into<BigInt>) -> Result<BigInt> {
    if r == 0 {
        return Err(Error::Domain("r must be at least 1".into()));
    }
    let m: BigInt = m.into();
    let g = m
        .magnitude()
        .gcd(&r.into())
        .to_u128()
        .expect("gcd divides r");
    let rf = factorize(r)?;
    let q = factorize(r / g)?;
    let phi = |f: &Factorization| BigInt::from(crate::arith::jordan_totient(f, 1));
    Ok(BigInt::from(mobius(&q)) * phi(&rf) / phi(&q))
}

/// Cohen's generalized Ramanujan sum `c_{r,s}(m) = Σ_{d|r, dˢ|m} μ(r/d) dˢ`.
///
/// `m = 0` is divisible by every `dˢ`, which gives `Jₛ(r)`.
pub fn generalized_ramanujan_sum(r: u128, s: u32, m: impl Into<BigInt>) -> Result<BigInt> {
    if r == 0 {
        return Err(Error::Domain("r must be at least 1".into()));
    }
    if s == 0 {
        return Err(Error::Domain("s must be at least 1".into()));
    }
    Ok(grs_divisor_sum(&factorize(r)?, s, &m.into()))
}

/// Möbius divisor-sum form of `c_{r,s}(m)` over a known factorization.
pub fn grs_divisor_sum(r: &Factorization, s: u32, m: &BigInt) -> BigInt {
    let mut total = BigInt::zero();
    for d in divisor_factorizations(r) {
        let ds = BigInt::from(d.value()).pow(s);
        if !(m % &ds).is_zero() {
            continue;
        }
        let q = r.checked_div(&d).expect("d divides r");
        match mobius(&q) {
            1 => total += ds,
            -1 => total -= ds,
            _ => {}
        }
    }
    total
}

/// `c_{r,s}` as a product of prime-power local factors.
///
/// `valuation(p, cap)` must return `min(v_p(m), cap)`. For `pᵉ ‖ r` only the
/// divisors `pᵉ` and `pᵉ⁻¹` carry a nonzero Möbius weight, so each local
/// factor is `pᵉˢ - p⁽ᵉ⁻¹⁾ˢ`, `-p⁽ᵉ⁻¹⁾ˢ` or `0`.
pub(crate) fn grs_multiplicative(
    r: &Factorization,
    s: u32,
    mut valuation: impl FnMut(u128, u32) -> u32,
) -> BigInt {
    let mut out = BigInt::one();
    for &(p, e) in r.factors() {
        let v = valuation(p, e * s);
        let lower = BigInt::from(p).pow((e - 1) * s);
        if v >= e * s {
            let upper = BigInt::from(p).pow(e * s);
            out *= upper - lower;
        } else if v >= (e - 1) * s {
            out *= -lower;
        } else {
            return BigInt::zero();
        }
    }
    out
}

/// Fast exact `c_{r,s}(m)` for arbitrary integer `m`.
pub fn grs_fast(r: &Factorization, s: u32, m: &BigInt) -> BigInt {
    grs_multiplicative(r, s, |p, cap| valuation_capped(m, p, cap))
}

/// Evaluates `c_{r,s}` straight from its exponential-sum definition,
/// `Σ e(jm/rˢ)` over `1 ≤ j ≤ rˢ` with `(j, rˢ)ₛ = 1`.
///
/// Admissible `j` are found by direct search for `lˢ | gcd(j, rˢ)`, so this
/// shares no code with the Möbius form. The admissible set and the table of
/// roots of unity are built once; [`DefinitionSum::eval`] is then a plain
/// summation.
pub struct DefinitionSum {
    period: u64,
    admissible: Vec<u64>,
    roots: Vec<Complex64>,
}

impl DefinitionSum {
    pub fn new(r: u64, s: u32) -> Result<Self> {
        if r == 0 || s == 0 {
            return Err(Error::Domain("r and s must be at least 1".into()));
        }
        let period = r
            .checked_pow(s)
            .filter(|&n| n <= DEFINITION_ORACLE_MAX_PERIOD)
            .ok_or_else(|| {
                Error::Capacity(format!(
                    "r^s exceeds the oracle bound {DEFINITION_ORACLE_MAX_PERIOD}"
                ))
            })?;
        let admissible = (1..=period)
            .filter(|&j| no_nontrivial_power_divides(j.gcd(&period), s))
            .collect();
        let roots = (0..period)
            .map(|k| {
                let (sin, cos) = (TAU * k as f64 / period as f64).sin_cos();
                Complex64::new(cos, sin)
            })
            .collect();
        Ok(DefinitionSum {
            period,
            admissible,
            roots,
        })
    }

    pub fn period(&self) -> u64 {
        self.period
    }

    /// Number of admissible `j`, which is `Jₛ(r)`.
    pub fn admissible_count(&self) -> usize {
        self.admissible.len()
    }

    pub fn eval(&self, m: i64) -> Result<i64> {
        let p = self.period;
        let m = (m as i128).rem_euclid(p as i128) as u64;
        let mut sum = Complex64::new(0.0, 0.0);
        // period ≤ 10⁶ keeps j·m inside u64
        for &j in &self.admissible {
            sum += self.roots[(j * m % p) as usize];
        }
        let rounded = sum.re.round();
        let residual = (sum.re - rounded).abs();
        if sum.im.abs() >= DEFINITION_ORACLE_TOLERANCE || residual >= DEFINITION_ORACLE_TOLERANCE {
            return Err(Error::OracleFailure(format!(
                "exponential sum {sum} is not within {DEFINITION_ORACLE_TOLERANCE} of an integer"
            )));
        }
        Ok(rounded as i64)
    }
}

fn no_nontrivial_power_divides(g: u64, s: u32) -> bool {
    if s == 1 {
        return g == 1;
    }
    let mut l: u64 = 2;
    while let Some(ls) = l.checked_pow(s).filter(|&ls| ls <= g) {
        if g % ls == 0 {
            return false;
        }
        l += 1;
    }
    true
}

/// One-shot exponential-sum evaluation of `c_{r,s}(m)`.
pub fn grs_definition_oracle(r: u64, s: u32, m: i64) -> Result<i64> {
    DefinitionSum::new(r, s)?.eval(m)
}

/// An integer-valued function on the residues modulo `rˢ`.
///
/// Values are stored at indices `0..rˢ`; index `0` stands for the residue
/// class of `rˢ`. When `is_even()` holds the function has been checked to
/// satisfy `f(m) = f((m, rˢ)ₛ)` for every residue.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodicFunction {
    r: Factorization,
    s: u32,
    values: Vec<i128>,
    even: bool,
}

fn stored_period(r: &Factorization, s: u32) -> Result<usize> {
    if s == 0 {
        return Err(Error::Domain("s must be at least 1".into()));
    }
    r.value()
        .checked_pow(s)
        .filter(|&n| n <= MAX_STORED_PERIOD as u128)
        .map(|n| n as usize)
        .ok_or_else(|| {
            Error::Capacity(format!("period {}^{s} is too large to tabulate", r.value()))
        })
}

impl PeriodicFunction {
    pub fn new(r: u128, s: u32, values: Vec<i128>) -> Result<Self> {
        let r = factorize(r)?;
        let period = stored_period(&r, s)?;
        if values.len() != period {
            return Err(Error::Contract(format!(
                "expected {period} values, got {}",
                values.len()
            )));
        }
        Ok(PeriodicFunction {
            r,
            s,
            values,
            even: false,
        })
    }

    pub fn from_fn(r: u128, s: u32, f: impl FnMut(usize) -> i128) -> Result<Self> {
        let rf = factorize(r)?;
        let period = stored_period(&rf, s)?;
        Self::new(r, s, (0..period).map(f).collect())
    }

    /// Builds the `(r,s)`-even function whose value at every `m` with
    /// `(m, rˢ)ₛ = dˢ` is `at_divisor(d)`.
    pub fn even_from_divisors(
        r: u128,
        s: u32,
        mut at_divisor: impl FnMut(&Factorization) -> i128,
    ) -> Result<Self> {
        let rf = factorize(r)?;
        let period = stored_period(&rf, s)?;
        let table: Vec<(u128, i128)> = divisor_factorizations(&rf)
            .iter()
            .map(|d| (d.value(), at_divisor(d)))
            .collect();
        let values = (0..period)
            .map(|m| {
                let l = gcd_s_against_power(&BigInt::from(m), &rf, s).value();
                table[table
                    .binary_search_by_key(&l, |&(d, _)| d)
                    .expect("l divides r")]
                .1
            })
            .collect();
        Ok(PeriodicFunction {
            r: rf,
            s,
            values,
            even: true,
        })
    }

    /// Checks `(r,s)`-evenness exhaustively and attaches the certificate.
    pub fn certify_even(mut self) -> Result<Self> {
        let n = self.values.len();
        for m in 1..=n {
            let l = gcd_s_against_power(&BigInt::from(m), &self.r, self.s);
            let ls = (l.value() as usize).pow(self.s);
            if self.values[m % n] != self.values[ls % n] {
                return Err(Error::Contract(format!(
                    "f({m}) != f({ls}); the function is not ({}, {})-even",
                    self.r.value(),
                    self.s
                )));
            }
        }
        self.even = true;
        Ok(self)
    }

    pub fn r(&self) -> &Factorization {
        &self.r
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn period(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[i128] {
        &self.values
    }

    pub fn is_even(&self) -> bool {
        self.even
    }

    pub fn value(&self, m: i128) -> i128 {
        self.values[m.rem_euclid(self.values.len() as i128) as usize]
    }

    /// `f(dˢ)`
    pub fn at_divisor(&self, d: &Factorization) -> i128 {
        let ds = (d.value() as usize).pow(self.s);
        self.values[ds % self.values.len()]
    }
}

/// The indicator `ρ_{n,s,t}(m) = [(m, nˢ)ₛ = tˢ]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RestrictedIndicator {
    n: Factorization,
    s: u32,
    t: Factorization,
}

impl RestrictedIndicator {
    pub fn new(n: u128, s: u32, t: u128) -> Result<Self> {
        if s == 0 {
            return Err(Error::Domain("s must be at least 1".into()));
        }
        let n = factorize(n)?;
        if t == 0 || n.value() % t != 0 {
            return Err(Error::Contract(format!(
                "t = {t} does not divide n = {}",
                n.value()
            )));
        }
        let t = factorize(t)?;
        Ok(RestrictedIndicator { n, s, t })
    }

    pub fn contains(&self, m: &BigInt) -> bool {
        gcd_s_against_power(m, &self.n, self.s) == self.t
    }

    pub fn to_function(&self) -> Result<PeriodicFunction> {
        PeriodicFunction::even_from_divisors(self.n.value(), self.s, |d| (*d == self.t) as i128)
    }

    /// `ρ̂_{n,s,t}(b) = c_{n/t,s}(b)`
    pub fn transform(&self, b: &BigInt) -> BigInt {
        let q = self.n.checked_div(&self.t).expect("t divides n");
        grs_fast(&q, self.s, b)
    }
}

/// Summation convention for [`dft_spectrum`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// Divide by the period.
    Mean,
    /// Plain sum, as used for even functions.
    Sum,
}

fn phase_table(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|k| {
            let (sin, cos) = (TAU * k as f64 / n as f64).sin_cos();
            Complex64::new(cos, sin)
        })
        .collect()
}

/// `(1/N) Σ_{m=1..N} f(m) e(-bm/N)` for the period `N` of `f`.
pub fn dft(f: &PeriodicFunction, b: i128) -> Complex64 {
    let n = f.period();
    let b = b.rem_euclid(n as i128) as u128;
    let mut sum = Complex64::new(0.0, 0.0);
    for m in 1..=n {
        let k = (n as u128 - (b * m as u128) % n as u128) % n as u128;
        let (sin, cos) = (TAU * k as f64 / n as f64).sin_cos();
        sum += Complex64::new(cos, sin) * f.value(m as i128) as f64;
    }
    sum / n as f64
}

/// Transform of a complex sequence `values[0..N]` at every `b` in `0..N`.
pub fn dft_spectrum(values: &[Complex64], normalization: Normalization) -> Vec<Complex64> {
    let n = values.len();
    let roots = phase_table(n);
    let scale = match normalization {
        Normalization::Mean => 1.0 / n as f64,
        Normalization::Sum => 1.0,
    };
    (0..n)
        .map(|b| {
            let mut sum = Complex64::new(0.0, 0.0);
            for (m, v) in values.iter().enumerate() {
                let k = (n - (b * m) % n) % n;
                sum += roots[k] * v;
            }
            sum * scale
        })
        .collect()
}

/// Unnormalized transform of an `(r,s)`-even function,
/// `Σ_{d|r} f(dˢ) c_{r/d,s}(b)`.
pub fn dft_even(f: &PeriodicFunction, b: &BigInt) -> Result<BigInt> {
    if !f.is_even() {
        return Err(Error::Contract(
            "dft_even needs a function with an evenness certificate".into(),
        ));
    }
    let mut total = BigInt::zero();
    for d in divisor_factorizations(f.r()) {
        let fd = f.at_divisor(&d);
        if fd == 0 {
            continue;
        }
        let q = f.r().checked_div(&d).expect("d divides r");
        total += grs_fast(&q, f.s(), b) * fd;
    }
    Ok(total)
}

/// How [`cauchy_product_with`] evaluates the product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CauchyStrategy {
    /// Direct fold when `period² ≤ DIRECT_FOLD_LIMIT`, otherwise the
    /// even-transform route.
    Auto,
    Direct,
    /// Only available when every factor is certified even.
    EvenTransform,
}

/// `(f₁ ⊗ … ⊗ f_k)(m)`: the sum over residue tuples adding up to `m` of
/// `∏ fᵢ(aᵢ)`.
pub fn cauchy_product(fs: &[PeriodicFunction], m: i128) -> Result<i128> {
    let h = cauchy_product_with(fs, CauchyStrategy::Auto)?;
    Ok(h.value(m))
}

/// The full Cauchy product as a periodic function. The result carries an
/// evenness certificate when every factor does.
pub fn cauchy_product_with(
    fs: &[PeriodicFunction],
    strategy: CauchyStrategy,
) -> Result<PeriodicFunction> {
    if fs.len() < 2 {
        return Err(Error::Contract(
            "a Cauchy product needs at least two functions".into(),
        ));
    }
    let first = &fs[0];
    if let Some(g) = fs
        .iter()
        .find(|g| g.period() != first.period() || g.r() != first.r() || g.s() != first.s())
    {
        return Err(Error::Contract(format!(
            "period mismatch: {} vs {}",
            first.period(),
            g.period()
        )));
    }
    let all_even = fs.iter().all(PeriodicFunction::is_even);
    let n = first.period() as u128;
    let strategy = match strategy {
        CauchyStrategy::Auto if n * n <= DIRECT_FOLD_LIMIT => CauchyStrategy::Direct,
        CauchyStrategy::Auto if all_even => CauchyStrategy::EvenTransform,
        CauchyStrategy::Auto => {
            return Err(Error::Capacity(format!(
                "period {n} is too large for a direct Cauchy product of non-even functions"
            )))
        }
        other => other,
    };
    let values = match strategy {
        CauchyStrategy::Direct => fold_direct(fs)?,
        CauchyStrategy::EvenTransform => {
            if !all_even {
                return Err(Error::Contract(
                    "the transform route needs every factor to be even".into(),
                ));
            }
            fold_even(fs)?
        }
        CauchyStrategy::Auto => unreachable!(),
    };
    Ok(PeriodicFunction {
        r: first.r.clone(),
        s: first.s,
        values,
        even: all_even,
    })
}

fn overflow() -> Error {
    Error::Capacity("Cauchy product value overflows i128".into())
}

fn fold_direct(fs: &[PeriodicFunction]) -> Result<Vec<i128>> {
    let n = fs[0].period();
    let mut acc = fs[0].values.clone();
    for g in &fs[1..] {
        let mut next = vec![0i128; n];
        for (a, &fa) in acc.iter().enumerate() {
            if fa == 0 {
                continue;
            }
            for (b, &gb) in g.values.iter().enumerate() {
                if gb == 0 {
                    continue;
                }
                let slot = &mut next[(a + b) % n];
                *slot = fa
                    .checked_mul(gb)
                    .and_then(|p| slot.checked_add(p))
                    .ok_or_else(overflow)?;
            }
        }
        acc = next;
    }
    Ok(acc)
}

fn fold_even(fs: &[PeriodicFunction]) -> Result<Vec<i128>> {
    let first = &fs[0];
    let r = first.r();
    let s = first.s();
    let n = BigInt::from(first.period());
    let divs = divisor_factorizations(r);
    // ĥ(dˢ) for every d | r; ĥ is even so these determine it.
    let mut spectrum = Vec::with_capacity(divs.len());
    for d in &divs {
        let ds = BigInt::from(d.value()).pow(s);
        let mut prod = BigInt::one();
        for f in fs {
            prod *= dft_even(f, &ds)?;
        }
        spectrum.push(prod);
    }
    let mut by_class: Vec<(u128, i128)> = Vec::with_capacity(divs.len());
    for l in &divs {
        let m = BigInt::from(l.value()).pow(s);
        let mut total = BigInt::zero();
        for (d, hd) in divs.iter().zip(&spectrum) {
            let q = r.checked_div(d).expect("d divides r");
            total += grs_fast(&q, s, &m) * hd;
        }
        let (q, rem) = total.div_rem(&n);
        if !rem.is_zero() {
            return Err(Error::Inconsistent(format!(
                "inverse even transform left remainder {rem}"
            )));
        }
        by_class.push((l.value(), q.to_i128().ok_or_else(overflow)?));
    }
    let period = first.period();
    Ok((0..period)
        .map(|m| {
            let l = gcd_s_against_power(&BigInt::from(m), r, s).value();
            by_class[by_class
                .binary_search_by_key(&l, |&(d, _)| d)
                .expect("class")]
            .1
        })
        .collect())
}
