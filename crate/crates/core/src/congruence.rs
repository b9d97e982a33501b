//! Solution counts for restricted linear congruences
//!
//! ```text
//! a₁ˢx₁ + … + aₖˢxₖ ≡ b (mod nˢ),   (xᵢ, nˢ)ₛ = tᵢˢ
//! ```
//!
//! with `tᵢ | n`. Solutions are counted as residue tuples modulo `nˢ`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Pow, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{
    divisor_factorizations, factorize, gcd_s_against_power, jordan_totient, valuation_capped,
    Factorization,
};
use crate::error::{Error, Result};
use crate::fourier::{grs_fast, grs_multiplicative, ramanujan_sum};

/// Inner argument of `c_{n/(tᵢdᵢ),s}` in the divisor-sum count.
///
/// `Power` evaluates at `(n/d)ˢ`, `Linear` at `n/d`. The two coincide for
/// `s = 1`. Only `Power` agrees with exhaustive enumeration for `s ≥ 2`;
/// `Linear` is kept for comparison runs.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum ArgConvention {
    #[default]
    Power,
    Linear,
}

impl ArgConvention {
    pub const ALL: [ArgConvention; 2] = [ArgConvention::Power, ArgConvention::Linear];

    pub fn as_str(self) -> &'static str {
        match self {
            ArgConvention::Power => "power",
            ArgConvention::Linear => "linear",
        }
    }

    /// Whether counts under this convention have been checked against the
    /// enumeration oracle for the given `s`.
    pub fn is_validated_for(self, s: u32) -> bool {
        self == ArgConvention::Power || s == 1
    }
}

impl fmt::Display for ArgConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ArgConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "power" => Ok(ArgConvention::Power),
            "linear" => Ok(ArgConvention::Linear),
            other => Err(Error::field(
                "convention",
                format!("unknown convention {other:?}"),
            )),
        }
    }
}

/// One restricted congruence, validated at construction.
///
/// `b` is stored reduced into `[0, nˢ)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CongruenceInstance {
    coefficients: Vec<BigInt>,
    b: BigInt,
    n: Factorization,
    s: u32,
    restrictions: Vec<Factorization>,
}

impl CongruenceInstance {
    pub fn new(
        coefficients: Vec<BigInt>,
        b: BigInt,
        n: u128,
        s: u32,
        t: Vec<u128>,
    ) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::field("a", "at least one coefficient is required"));
        }
        if coefficients.len() != t.len() {
            return Err(Error::field(
                "t",
                format!(
                    "{} restrictions given for {} coefficients",
                    t.len(),
                    coefficients.len()
                ),
            ));
        }
        if n == 0 {
            return Err(Error::field("n", "must be at least 1"));
        }
        if s == 0 {
            return Err(Error::field("s", "must be at least 1"));
        }
        let nf = factorize(n)?;
        let mut restrictions = Vec::with_capacity(t.len());
        for (i, &ti) in t.iter().enumerate() {
            if ti == 0 || n % ti != 0 {
                return Err(Error::field(
                    format!("t[{i}]"),
                    format!("{ti} does not divide n = {n}"),
                ));
            }
            restrictions.push(factorize(ti)?);
        }
        let modulus = BigInt::from(nf.pow_big(s));
        let b = b.mod_floor(&modulus);
        Ok(CongruenceInstance {
            coefficients,
            b,
            n: nf,
            s,
            restrictions,
        })
    }

    /// Convenience constructor for small machine integers.
    pub fn from_ints(a: &[i64], b: i64, n: u128, s: u32, t: &[u128]) -> Result<Self> {
        Self::new(
            a.iter().map(|&x| BigInt::from(x)).collect(),
            BigInt::from(b),
            n,
            s,
            t.to_vec(),
        )
    }

    pub fn coefficients(&self) -> &[BigInt] {
        &self.coefficients
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    pub fn n(&self) -> u128 {
        self.n.value()
    }

    pub fn n_factorization(&self) -> &Factorization {
        &self.n
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn restrictions(&self) -> Vec<u128> {
        self.restrictions.iter().map(Factorization::value).collect()
    }

    pub fn restriction_factorizations(&self) -> &[Factorization] {
        &self.restrictions
    }

    pub fn k(&self) -> usize {
        self.coefficients.len()
    }

    /// `nˢ`
    pub fn modulus(&self) -> BigUint {
        self.n.pow_big(self.s)
    }

    /// Same instance with a different right-hand side.
    pub fn with_b(&self, b: BigInt) -> Self {
        let modulus = BigInt::from(self.modulus());
        CongruenceInstance {
            b: b.mod_floor(&modulus),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Reason {
    Ok,
    /// `tˢ ∤ (b, nˢ)ₛ` in the single-variable case.
    TPowerNotDividingB,
    /// `(aˢ, nˢ/tˢ)ₛ ≠ (b/tˢ, nˢ/tˢ)ₛ` in the single-variable case.
    GcdMismatch,
    ZeroCount,
}

impl Reason {
    pub fn as_str(self) -> &'static str {
        match self {
            Reason::Ok => "OK",
            Reason::TPowerNotDividingB => "T_POWER_NOT_DIVIDING_B",
            Reason::GcdMismatch => "GCD_MISMATCH",
            Reason::ZeroCount => "ZERO_COUNT",
        }
    }
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolvabilityReport {
    pub solvable: bool,
    pub count: BigUint,
    /// `dᵢ = gcd(aᵢ, n/tᵢ)`
    pub derived_d: Vec<u128>,
    pub reason: Reason,
    /// False when the count came from a convention that the oracle has not
    /// confirmed for this `s`.
    pub verified: bool,
}

/// `gcd(a₁, …, aₖ, m)` as in Lehmer's theorem.
fn lehmer_gcd(a: &[BigInt], m: &BigUint) -> BigUint {
    a.iter().fold(m.clone(), |g, x| g.gcd(x.magnitude()))
}

/// Lehmer's count of all solutions of `a₁x₁ + … + aₖxₖ ≡ b (mod m)`:
/// `l·mᵏ⁻¹` when `l = gcd(a₁, …, aₖ, m)` divides `b`, else zero.
pub fn lehmer_count(a: &[BigInt], b: &BigInt, m: &BigUint) -> Result<BigUint> {
    if a.is_empty() {
        return Err(Error::Contract(
            "at least one coefficient is required".into(),
        ));
    }
    if m.is_zero() {
        return Err(Error::Domain("modulus must be at least 1".into()));
    }
    let l = lehmer_gcd(a, m);
    if (b.magnitude() % &l).is_zero() {
        Ok(l * m.pow(a.len() as u32 - 1))
    } else {
        Ok(BigUint::zero())
    }
}

fn exact_quotient(num: &BigInt, den: &BigInt, what: &str) -> Result<BigInt> {
    let (q, r) = num.div_rem(den);
    if !r.is_zero() {
        return Err(Error::Inconsistent(format!(
            "{what}: {num} is not divisible by {den}"
        )));
    }
    Ok(q)
}

fn non_negative(v: BigInt, what: &str) -> Result<BigUint> {
    v.to_biguint()
        .ok_or_else(|| Error::Inconsistent(format!("{what} is negative")))
}

/// Number of `k`-tuples of units mod `n` adding up to `b`:
/// `(1/n) Σ_{d|n} c_d(b) c_n(n/d)ᵏ`.
pub fn units_count(k: u32, b: &BigInt, n: u128) -> Result<BigUint> {
    if k == 0 {
        return Err(Error::Contract("k must be at least 1".into()));
    }
    let nf = factorize(n)?;
    let mut total = BigInt::zero();
    for d in divisor_factorizations(&nf) {
        let cd = ramanujan_sum(d.value(), b.clone())?;
        if cd.is_zero() {
            continue;
        }
        let cn = ramanujan_sum(n, n / d.value())?;
        total += cd * cn.pow(k);
    }
    let q = exact_quotient(&total, &BigInt::from(n), "units count")?;
    non_negative(q, "units count")
}

/// `Jₛ(Nd)/Jₛ(N)` written as the product `dˢ ∏_{p|d, p∤N} (1 - p⁻ˢ)`.
///
/// Returns the exact integer value; the product is always integral because
/// every `p` in it divides `d`.
pub fn lift_count(d: &Factorization, big_n: &Factorization, s: u32) -> BigUint {
    let mut num = d.pow_big(s);
    let mut den = BigUint::one();
    for p in d.primes() {
        if big_n.exponent_of(p) == 0 {
            let ps = BigUint::from(p).pow(s);
            num *= &ps - 1u32;
            den *= ps;
        }
    }
    num / den
}

/// Which uniqueness case of the single-variable count applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum UniquenessCase {
    DEqualsOne,
    /// `s = 1`, `d = 2` and `2 ∤ n/(2t)`.
    Dyadic,
    None,
}

/// Per-variable data shared by the single- and multi-variable counts.
struct Variable {
    /// `d = gcd(a, n/t)`
    d: Factorization,
    /// `t·d`
    td: Factorization,
    /// `Jₛ(n/t) / Jₛ(n/(td))`
    lift: BigUint,
}

fn variable(n: &Factorization, s: u32, a: &BigInt, t: &Factorization) -> Variable {
    let n_over_t = n.checked_div(t).expect("t divides n");
    // gcd(a, n/t) as a divisor of n/t
    let mut d_factors = Vec::new();
    let mut d_value: u128 = 1;
    for &(p, e) in n_over_t.factors() {
        let v = valuation_capped(a, p, e);
        if v > 0 {
            d_factors.push((p, v));
            d_value *= p.pow(v);
        }
    }
    let d = Factorization::from_parts(d_value, d_factors);
    let td = t.checked_mul(&d).expect("td divides n");
    let big_n = n.checked_div(&td).expect("td divides n");
    let lift = lift_count(&d, &big_n, s);
    Variable { d, td, lift }
}

/// Single-variable count `aˢx ≡ b (mod nˢ)` with `(x, nˢ)ₛ = tˢ`.
///
/// Solvable exactly when `tˢ | (b, nˢ)ₛ` and
/// `(aˢ, nˢ/tˢ)ₛ = (b/tˢ, nˢ/tˢ)ₛ`; the count is then `Jₛ(n/t)/Jₛ(n/(dt))`.
pub fn single_var(a: &BigInt, b: &BigInt, n: u128, s: u32, t: u128) -> Result<SolvabilityReport> {
    let inst =
        CongruenceInstance::new(vec![a.clone()], b.clone(), n, s, vec![t]).map_err(
            |e| match e {
                Error::InvalidField { message, .. } => Error::Contract(message),
                other => other,
            },
        )?;
    Ok(single_var_instance(&inst))
}

fn single_var_instance(inst: &CongruenceInstance) -> SolvabilityReport {
    let n = inst.n_factorization();
    let s = inst.s();
    let t = &inst.restriction_factorizations()[0];
    let a = &inst.coefficients()[0];
    let b = inst.b();
    let var = variable(n, s, a, t);
    let derived_d = vec![var.d.value()];

    // (b, nˢ)ₛ = lˢ with l | n
    let b_class = gcd_s_against_power(b, n, s);
    let reason = if b_class.checked_div(t).is_none() {
        Reason::TPowerNotDividingB
    } else {
        // (b/tˢ, (n/t)ˢ)ₛ is (b_class/t)ˢ; (aˢ, (n/t)ˢ)ₛ is dˢ.
        let b_over_t = b_class.checked_div(t).expect("checked above");
        if b_over_t.value() != var.d.value() {
            Reason::GcdMismatch
        } else {
            Reason::Ok
        }
    };
    let count = if reason == Reason::Ok {
        let n_over_t = n.checked_div(t).expect("t divides n");
        let big_n = n.checked_div(&var.td).expect("td divides n");
        let ratio = jordan_totient(&n_over_t, s) / jordan_totient(&big_n, s);
        debug_assert_eq!(ratio, var.lift);
        ratio
    } else {
        BigUint::zero()
    };
    SolvabilityReport {
        solvable: reason == Reason::Ok,
        count,
        derived_d,
        reason,
        verified: true,
    }
}

/// Whether a solvable single-variable instance has exactly one solution,
/// and which uniqueness case explains it.
pub fn single_var_unique(
    a: &BigInt,
    b: &BigInt,
    n: u128,
    s: u32,
    t: u128,
) -> Result<(bool, UniquenessCase)> {
    let report = single_var(a, b, n, s, t)?;
    if !report.solvable {
        return Err(Error::Contract(format!(
            "instance is unsolvable ({})",
            report.reason
        )));
    }
    let d = report.derived_d[0];
    let unique = report.count.is_one();
    let case = if d == 1 {
        UniquenessCase::DEqualsOne
    } else if s == 1 && d == 2 && (n / (2 * t)) % 2 == 1 {
        UniquenessCase::Dyadic
    } else {
        UniquenessCase::None
    };
    Ok((unique, case))
}

/// Evaluates the divisor-sum counts for one modulus `nˢ`.
///
/// Construction factors `n` and lists its divisors once; the counting
/// methods then only do divisor sums.
pub struct Counter {
    n: Factorization,
    s: u32,
    divisors: Vec<Factorization>,
    modulus: BigInt,
}

impl Counter {
    pub fn new(n: u128, s: u32) -> Result<Self> {
        if s == 0 {
            return Err(Error::Domain("s must be at least 1".into()));
        }
        let n = factorize(n)?;
        Ok(Self::from_factorization(n, s))
    }

    pub fn from_factorization(n: Factorization, s: u32) -> Self {
        let divisors = divisor_factorizations(&n);
        let modulus = BigInt::from(n.pow_big(s));
        Counter {
            n,
            s,
            divisors,
            modulus,
        }
    }

    /// `Σ_{d|n} c_{d,s}(b) ∏ᵢ c_{n/rᵢ,s}(ARG)` for restriction divisors
    /// `rᵢ` of `n`.
    fn divisor_sum(
        &self,
        b: &BigInt,
        restrictions: &[&Factorization],
        convention: ArgConvention,
    ) -> BigInt {
        let s = self.s;
        // Group equal restrictions: the product only depends on multiplicities.
        let mut groups: HashMap<u128, (Factorization, u32)> = HashMap::new();
        for r in restrictions {
            let q = self.n.checked_div(r).expect("restriction divides n");
            groups.entry(q.value()).or_insert((q, 0)).1 += 1;
        }
        let mut groups: Vec<_> = groups.into_values().collect();
        groups.sort_unstable_by_key(|(q, _)| q.value());

        let mut total = BigInt::zero();
        for d in &self.divisors {
            let c_b = grs_fast(d, s, b);
            if c_b.is_zero() {
                continue;
            }
            let n_over_d = self.n.checked_div(d).expect("d divides n");
            let mut prod = BigInt::one();
            for (q, mult) in &groups {
                let c = grs_multiplicative(q, s, |p, cap| {
                    let v = n_over_d.exponent_of(p);
                    let v = match convention {
                        ArgConvention::Power => v * s,
                        ArgConvention::Linear => v,
                    };
                    v.min(cap)
                });
                if c.is_zero() {
                    prod = BigInt::zero();
                    break;
                }
                prod *= c.pow(*mult);
            }
            total += c_b * prod;
        }
        total
    }

    fn check_restrictions(&self, t: &[Factorization]) -> Result<()> {
        for (i, ti) in t.iter().enumerate() {
            if self.n.checked_div(ti).is_none() {
                return Err(Error::Contract(format!(
                    "t[{i}] = {} does not divide n = {}",
                    ti.value(),
                    self.n.value()
                )));
            }
        }
        Ok(())
    }

    /// Count for `x₁ + … + xₖ ≡ b (mod nˢ)` with `(xᵢ, nˢ)ₛ = tᵢˢ`:
    /// `(1/nˢ) Σ_{d|n} c_{d,s}(b) ∏ᵢ c_{n/tᵢ,s}(ARG)`.
    pub fn count_units_style(
        &self,
        b: &BigInt,
        t: &[Factorization],
        convention: ArgConvention,
    ) -> Result<BigUint> {
        if t.is_empty() {
            return Err(Error::Contract(
                "at least one restriction is required".into(),
            ));
        }
        self.check_restrictions(t)?;
        let refs: Vec<&Factorization> = t.iter().collect();
        let total = self.divisor_sum(b, &refs, convention);
        let q = exact_quotient(&total, &self.modulus, "restricted count")?;
        non_negative(q, "restricted count")
    }

    /// General count:
    /// `(1/nˢ) ∏ᵢ Jₛ(n/tᵢ)/Jₛ(n/(tᵢdᵢ)) · Σ_{d|n} c_{d,s}(b) ∏ᵢ c_{n/(tᵢdᵢ),s}(ARG)`
    /// with `dᵢ = gcd(aᵢ, n/tᵢ)`. Returns the count and the `dᵢ`.
    pub fn count_general(
        &self,
        a: &[BigInt],
        b: &BigInt,
        t: &[Factorization],
        convention: ArgConvention,
    ) -> Result<(BigUint, Vec<u128>)> {
        if a.is_empty() || a.len() != t.len() {
            return Err(Error::Contract(
                "coefficients and restrictions must be non-empty and of equal length".into(),
            ));
        }
        self.check_restrictions(t)?;
        let vars: Vec<Variable> = a
            .iter()
            .zip(t)
            .map(|(ai, ti)| variable(&self.n, self.s, ai, ti))
            .collect();
        let refs: Vec<&Factorization> = vars.iter().map(|v| &v.td).collect();
        let sum = self.divisor_sum(b, &refs, convention);
        let lift = vars.iter().fold(BigUint::one(), |acc, v| acc * &v.lift);
        let total = sum * BigInt::from(lift);
        let q = exact_quotient(&total, &self.modulus, "general count")?;
        let count = non_negative(q, "general count")?;
        Ok((count, vars.iter().map(|v| v.d.value()).collect()))
    }
}

/// Units-style count (all coefficients equal to one).
pub fn count_units_style(
    b: &BigInt,
    n: u128,
    s: u32,
    t: &[u128],
    convention: ArgConvention,
) -> Result<BigUint> {
    let counter = Counter::new(n, s)?;
    let t = t
        .iter()
        .map(|&ti| {
            if ti == 0 {
                Err(Error::Contract("restriction 0 does not divide n".into()))
            } else {
                factorize(ti)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let modulus = BigInt::from(counter.n.pow_big(s));
    counter.count_units_style(&b.mod_floor(&modulus), &t, convention)
}

/// General count with the default convention.
pub fn count_general(inst: &CongruenceInstance) -> Result<SolvabilityReport> {
    count_general_with(inst, ArgConvention::default())
}

pub fn count_general_with(
    inst: &CongruenceInstance,
    convention: ArgConvention,
) -> Result<SolvabilityReport> {
    let counter = Counter::from_factorization(inst.n_factorization().clone(), inst.s());
    report_with(&counter, inst, convention)
}

/// [`count_general_with`] reusing a prepared [`Counter`] for `inst`'s modulus.
pub fn report_with(
    counter: &Counter,
    inst: &CongruenceInstance,
    convention: ArgConvention,
) -> Result<SolvabilityReport> {
    debug_assert_eq!(counter.n, *inst.n_factorization());
    let (count, derived_d) = counter.count_general(
        inst.coefficients(),
        inst.b(),
        inst.restriction_factorizations(),
        convention,
    )?;
    let verified = convention.is_validated_for(inst.s());
    let reason = if inst.k() == 1 {
        let single = single_var_instance(inst);
        if verified && single.count != count {
            return Err(Error::Inconsistent(format!(
                "general count {count} disagrees with the single-variable count {}",
                single.count
            )));
        }
        if count.is_zero() {
            match single.reason {
                Reason::Ok => Reason::ZeroCount,
                other => other,
            }
        } else {
            Reason::Ok
        }
    } else if count.is_zero() {
        Reason::ZeroCount
    } else {
        Reason::Ok
    };
    Ok(SolvabilityReport {
        solvable: !count.is_zero(),
        count,
        derived_d,
        reason,
        verified,
    })
}
