//! Brute-force ground truth for restricted congruence counts.
//!
//! Nothing here uses factorizations, Ramanujan sums or any closed form. The
//! restriction class of a residue is found by searching for the largest
//! `lˢ` dividing `gcd(x, nˢ)`, and counts come from folding per-variable
//! histograms with cyclic convolution.

use std::env;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::congruence::CongruenceInstance;
use crate::error::{Error, Result};

pub const DEFAULT_MAX_MODULUS: u64 = 100_000;
pub const DEFAULT_MAX_WORK: u64 = 100_000_000;
pub const DEFAULT_MAX_SOLUTIONS: u64 = 10_000;

pub const ENV_MAX_MODULUS: &str = "RESCONG_ORACLE_MAX_MODULUS";
pub const ENV_MAX_WORK: &str = "RESCONG_ORACLE_MAX_WORK";
pub const ENV_MAX_SOLUTIONS: &str = "RESCONG_ORACLE_MAX_SOLUTIONS";

/// Capacity limits for the oracle.
///
/// `max_work` bounds the number of multiply-adds spent in the convolution
/// fold, i.e. `Σᵢ nˢ · |support of variable i|` over the folded variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBounds {
    pub max_modulus: u64,
    pub max_work: u64,
    pub max_solutions: u64,
}

impl Default for OracleBounds {
    fn default() -> Self {
        OracleBounds {
            max_modulus: DEFAULT_MAX_MODULUS,
            max_work: DEFAULT_MAX_WORK,
            max_solutions: DEFAULT_MAX_SOLUTIONS,
        }
    }
}

impl OracleBounds {
    /// Defaults, overridden by the `RESCONG_ORACLE_*` environment variables.
    pub fn from_env() -> Result<Self> {
        let mut bounds = Self::default();
        let read = |name: &str, slot: &mut u64| -> Result<()> {
            if let Ok(raw) = env::var(name) {
                *slot = raw
                    .trim()
                    .parse()
                    .map_err(|_| Error::field(name, format!("expected an integer, got {raw:?}")))?;
            }
            Ok(())
        };
        read(ENV_MAX_MODULUS, &mut bounds.max_modulus)?;
        read(ENV_MAX_WORK, &mut bounds.max_work)?;
        read(ENV_MAX_SOLUTIONS, &mut bounds.max_solutions)?;
        Ok(bounds)
    }
}

/// Per-instance tables: modulus, scaled coefficients and, for every
/// variable, its admissible residues.
struct Prepared {
    modulus: u64,
    scaled: Vec<u64>,
    candidates: Vec<Vec<u64>>,
}

/// Largest `l` with `lˢ | g`, by direct search.
fn largest_power_base(g: u64, s: u32) -> u64 {
    if s == 1 {
        return g;
    }
    let mut best = 1;
    let mut l: u64 = 2;
    while let Some(ls) = l.checked_pow(s).filter(|&ls| ls <= g) {
        if g % ls == 0 {
            best = l;
        }
        l += 1;
    }
    best
}

/// `l` with `(x, nˢ)ₛ = lˢ` for every residue `x` modulo `nˢ`.
fn class_table(modulus: u64, s: u32) -> Vec<u64> {
    let mut by_gcd = vec![0u64; modulus as usize + 1];
    (0..modulus)
        .map(|x| {
            let g = x.gcd(&modulus) as usize;
            if by_gcd[g] == 0 {
                by_gcd[g] = largest_power_base(g as u64, s);
            }
            by_gcd[g]
        })
        .collect()
}

impl Prepared {
    fn new(inst: &CongruenceInstance, bounds: &OracleBounds) -> Result<Self> {
        let modulus = inst
            .modulus()
            .to_u64()
            .filter(|&m| m <= bounds.max_modulus)
            .ok_or_else(|| {
                Error::Capacity(format!(
                    "modulus {} exceeds the oracle bound {}",
                    inst.modulus(),
                    bounds.max_modulus
                ))
            })?;
        let m_big = BigInt::from(modulus);
        let scaled = inst
            .coefficients()
            .iter()
            .map(|a| {
                let a = a.mod_floor(&m_big).to_u64().expect("reduced");
                let mut acc: u64 = 1 % modulus;
                for _ in 0..inst.s() {
                    acc = (acc as u128 * a as u128 % modulus as u128) as u64;
                }
                acc
            })
            .collect();
        let classes = class_table(modulus, inst.s());
        let candidates = inst
            .restrictions()
            .iter()
            .map(|&t| {
                (0..modulus)
                    .filter(|&x| classes[x as usize] as u128 == t)
                    .collect()
            })
            .collect();
        Ok(Prepared {
            modulus,
            scaled,
            candidates,
        })
    }

    /// `v[y] = #{x admissible for variable i : aᵢˢx ≡ y}`
    fn histogram(&self, i: usize) -> Vec<u128> {
        let m = self.modulus as usize;
        let mut v = vec![0u128; m];
        let a = self.scaled[i] as u128;
        for &x in &self.candidates[i] {
            v[(a * x as u128 % m as u128) as usize] += 1;
        }
        v
    }

    fn check_work(&self, bounds: &OracleBounds) -> Result<()> {
        let work: u128 = self.candidates[1..]
            .iter()
            .map(|c| self.modulus as u128 * c.len() as u128)
            .sum();
        if work > bounds.max_work as u128 {
            return Err(Error::Capacity(format!(
                "oracle fold needs {work} steps, above the bound {}",
                bounds.max_work
            )));
        }
        Ok(())
    }

    /// Histogram of `Σ_{j ≥ from} aⱼˢxⱼ` over admissible tuples.
    fn suffix_distribution(&self, from: usize) -> Result<Vec<u128>> {
        let m = self.modulus as usize;
        let mut acc = vec![0u128; m];
        acc[0] = 1;
        for i in from..self.scaled.len() {
            let v = self.histogram(i);
            let mut next = vec![0u128; m];
            for (y, &cy) in v.iter().enumerate() {
                if cy == 0 {
                    continue;
                }
                for (r, &cr) in acc.iter().enumerate() {
                    if cr == 0 {
                        continue;
                    }
                    let slot = &mut next[(r + y) % m];
                    *slot = cr
                        .checked_mul(cy)
                        .and_then(|p| slot.checked_add(p))
                        .ok_or_else(|| Error::Capacity("oracle count overflows u128".into()))?;
                }
            }
            acc = next;
        }
        Ok(acc)
    }
}

/// Counts for every right-hand side `b ∈ [0, nˢ)` at once; the `b` stored in
/// `inst` is ignored.
pub fn oracle_distribution(inst: &CongruenceInstance, bounds: &OracleBounds) -> Result<Vec<u128>> {
    let prepared = Prepared::new(inst, bounds)?;
    prepared.check_work(bounds)?;
    prepared.suffix_distribution(0)
}

/// Exact number of admissible tuples in `[0, nˢ)ᵏ` solving the congruence.
pub fn oracle_count(inst: &CongruenceInstance) -> Result<u128> {
    oracle_count_with(inst, &OracleBounds::default())
}

pub fn oracle_count_with(inst: &CongruenceInstance, bounds: &OracleBounds) -> Result<u128> {
    let dist = oracle_distribution(inst, bounds)?;
    Ok(dist[inst.b().to_usize().expect("b is reduced below the modulus")])
}

/// Every solution tuple in lexicographic order.
pub fn oracle_enumerate(inst: &CongruenceInstance) -> Result<Vec<Vec<u64>>> {
    oracle_enumerate_with(inst, &OracleBounds::default())
}

pub fn oracle_enumerate_with(
    inst: &CongruenceInstance,
    bounds: &OracleBounds,
) -> Result<Vec<Vec<u64>>> {
    let prepared = Prepared::new(inst, bounds)?;
    prepared.check_work(bounds)?;
    let k = inst.k();
    let suffixes: Vec<Vec<u128>> = (0..=k)
        .map(|i| prepared.suffix_distribution(i))
        .collect::<Result<_>>()?;
    let b = inst.b().to_u64().expect("b is reduced below the modulus");
    let total = suffixes[0][b as usize];
    if total > bounds.max_solutions as u128 {
        return Err(Error::Capacity(format!(
            "{total} solutions exceed the enumeration bound {}",
            bounds.max_solutions
        )));
    }

    let m = prepared.modulus;
    let mut out = Vec::with_capacity(total as usize);
    let mut stack = Vec::with_capacity(k);
    walk(&prepared, &suffixes, 0, b, &mut stack, &mut out);
    debug_assert_eq!(out.len() as u128, total);

    for tuple in &out {
        let sum = tuple
            .iter()
            .zip(&prepared.scaled)
            .fold(0u128, |acc, (&x, &a)| {
                (acc + a as u128 * x as u128) % m as u128
            });
        let admissible = tuple
            .iter()
            .zip(&prepared.candidates)
            .all(|(x, c)| c.binary_search(x).is_ok());
        if sum != b as u128 || !admissible {
            return Err(Error::OracleFailure(format!(
                "enumerated tuple {tuple:?} does not solve the congruence"
            )));
        }
    }
    Ok(out)
}

fn walk(
    p: &Prepared,
    suffixes: &[Vec<u128>],
    i: usize,
    target: u64,
    stack: &mut Vec<u64>,
    out: &mut Vec<Vec<u64>>,
) {
    let m = p.modulus;
    if i == p.scaled.len() {
        if target == 0 {
            out.push(stack.clone());
        }
        return;
    }
    let a = p.scaled[i] as u128;
    for &x in &p.candidates[i] {
        let y = (a * x as u128 % m as u128) as u64;
        let rest = (target + m - y) % m;
        if suffixes[i + 1][rest as usize] == 0 {
            continue;
        }
        stack.push(x);
        walk(p, suffixes, i + 1, rest, stack, out);
        stack.pop();
    }
}

/// Nested-loop count over all `nˢᵏ` tuples. Used to cross-check the fold on
/// tiny instances; refuses anything above `10⁷` tuples.
pub fn naive_count(inst: &CongruenceInstance) -> Result<u128> {
    let m = inst
        .modulus()
        .to_u64()
        .ok_or_else(|| Error::Capacity("modulus too large".into()))?;
    let k = inst.k() as u32;
    if m.checked_pow(k).is_none_or(|tuples| tuples > 10_000_000) {
        return Err(Error::Capacity(
            "too many tuples for naive enumeration".into(),
        ));
    }
    let s = inst.s();
    let class = |x: u64| largest_power_base(x.gcd(&m), s) as u128;
    let m_big = BigInt::from(m);
    let a: Vec<u128> = inst
        .coefficients()
        .iter()
        .map(|a| a.modpow(&BigInt::from(s), &m_big).to_u128().unwrap())
        .collect();
    let t = inst.restrictions();
    let b = inst.b().to_u64().unwrap();
    let mut xs = vec![0u64; k as usize];
    let mut count = 0;
    loop {
        let lhs = xs
            .iter()
            .zip(&a)
            .fold(0u128, |acc, (&x, &ai)| (acc + ai * x as u128) % m as u128);
        if lhs == b as u128 && xs.iter().zip(&t).all(|(&x, &ti)| class(x) == ti) {
            count += 1;
        }
        let mut i = 0;
        loop {
            if i == xs.len() {
                return Ok(count);
            }
            xs[i] += 1;
            if xs[i] < m {
                break;
            }
            xs[i] = 0;
            i += 1;
        }
    }
}
