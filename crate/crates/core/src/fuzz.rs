//! Campaigns comparing every closed-form count against the oracle.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::arith::{divisors, factorize};
use crate::congruence::{single_var, units_count, ArgConvention, CongruenceInstance, Counter};
use crate::error::Result;
use crate::oracle::{oracle_distribution, OracleBounds};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampling {
    /// Every `n`, `s`, `k`, coefficient tuple in `[0, n)ᵏ`, restriction
    /// tuple and right-hand side in range.
    Exhaustive,
    /// `draws` independent uniformly drawn instances.
    Random { draws: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuzzDomain {
    pub n: (u128, u128),
    pub s: (u32, u32),
    pub k: (usize, usize),
    /// Restrict every coefficient to `1`.
    pub unit_coefficients: bool,
    pub sampling: Sampling,
    pub seed: u64,
}

impl Default for FuzzDomain {
    fn default() -> Self {
        FuzzDomain {
            n: (1, 8),
            s: (1, 1),
            k: (1, 2),
            unit_coefficients: false,
            sampling: Sampling::Exhaustive,
            seed: 0,
        }
    }
}

impl FuzzDomain {
    fn is_empty(&self) -> bool {
        self.n.0 == 0
            || self.n.0 > self.n.1
            || self.s.0 == 0
            || self.s.0 > self.s.1
            || self.k.0 == 0
            || self.k.0 > self.k.1
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Count(BigUint),
    Error(String),
}

impl Outcome {
    fn matches(&self, oracle: u128) -> bool {
        matches!(self, Outcome::Count(c) if c.to_u128() == Some(oracle))
    }
}

#[derive(Debug, Clone)]
pub struct FuzzReport {
    pub instance: CongruenceInstance,
    pub oracle_count: u128,
    /// Formulas whose agreement is required.
    pub formula_counts: BTreeMap<String, Outcome>,
    /// Conventions not validated for this `s`; compared for the summary only.
    pub alternate_counts: BTreeMap<String, Outcome>,
    pub agree: bool,
    pub elapsed: Duration,
}

/// Equality ignores timing.
impl PartialEq for FuzzReport {
    fn eq(&self, other: &Self) -> bool {
        self.instance == other.instance
            && self.oracle_count == other.oracle_count
            && self.formula_counts == other.formula_counts
            && self.alternate_counts == other.alternate_counts
            && self.agree == other.agree
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct AgreementRow {
    pub formula: String,
    pub s: u32,
    pub checked: u64,
    pub agreed: u64,
    /// Whether this formula is required to agree.
    pub required: bool,
}

impl AgreementRow {
    pub fn rate(&self) -> f64 {
        if self.checked == 0 {
            1.0
        } else {
            self.agreed as f64 / self.checked as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FuzzSummary {
    pub instances: u64,
    pub disagreements: u64,
    pub rows: Vec<AgreementRow>,
}

impl FuzzSummary {
    pub fn from_reports(reports: &[FuzzReport]) -> Self {
        let mut rows: BTreeMap<(String, u32), AgreementRow> = BTreeMap::new();
        let mut disagreements = 0;
        for r in reports {
            if !r.agree {
                disagreements += 1;
            }
            let s = r.instance.s();
            let all = r
                .formula_counts
                .iter()
                .map(|e| (e, true))
                .chain(r.alternate_counts.iter().map(|e| (e, false)));
            for ((name, outcome), required) in all {
                let row = rows
                    .entry((name.clone(), s))
                    .or_insert_with(|| AgreementRow {
                        formula: name.clone(),
                        s,
                        checked: 0,
                        agreed: 0,
                        required,
                    });
                row.checked += 1;
                if outcome.matches(r.oracle_count) {
                    row.agreed += 1;
                }
            }
        }
        FuzzSummary {
            instances: reports.len() as u64,
            disagreements,
            rows: rows.into_values().collect(),
        }
    }

    pub fn all_agree(&self) -> bool {
        self.disagreements == 0
    }

    /// Agreement of one formula across every `s`.
    pub fn totals(&self, formula: &str) -> (u64, u64) {
        self.rows
            .iter()
            .filter(|r| r.formula == formula)
            .fold((0, 0), |(c, a), r| (c + r.checked, a + r.agreed))
    }
}

pub fn general_name(c: ArgConvention) -> String {
    format!("count_general[{c}]")
}

pub fn units_style_name(c: ArgConvention) -> String {
    format!("count_units_style[{c}]")
}

/// One `(n, s, a, t)` combination, evaluated for a set of right-hand sides.
struct Group {
    n: u128,
    s: u32,
    a: Vec<i64>,
    t: Vec<u128>,
    /// `None` means every `b ∈ [0, nˢ)`.
    bs: Option<Vec<u64>>,
}

fn outcome(r: Result<BigUint>) -> Outcome {
    match r {
        Ok(c) => Outcome::Count(c),
        Err(e) => Outcome::Error(e.to_string()),
    }
}

fn evaluate_group(g: &Group, bounds: &OracleBounds) -> Result<Vec<FuzzReport>> {
    let started = Instant::now();
    let template = CongruenceInstance::from_ints(&g.a, 0, g.n, g.s, &g.t)?;
    let dist = oracle_distribution(&template, bounds)?;
    let counter = Counter::from_factorization(template.n_factorization().clone(), g.s);
    let setup = started.elapsed();

    let bs: Vec<u64> = match &g.bs {
        Some(bs) => bs.clone(),
        None => (0..dist.len() as u64).collect(),
    };
    let units = g.a.iter().all(|&a| a == 1);
    let mut reports = Vec::with_capacity(bs.len());
    for b in bs {
        let t0 = Instant::now();
        let inst = template.with_b(BigInt::from(b));
        let oracle = dist[b as usize];
        let mut checked = BTreeMap::new();
        let mut alternate = BTreeMap::new();
        for conv in ArgConvention::ALL {
            let slot = if conv.is_validated_for(g.s) {
                &mut checked
            } else {
                &mut alternate
            };
            let general = counter
                .count_general(
                    inst.coefficients(),
                    inst.b(),
                    inst.restriction_factorizations(),
                    conv,
                )
                .map(|(c, _)| c);
            slot.insert(general_name(conv), outcome(general));
            if units {
                let u =
                    counter.count_units_style(inst.b(), inst.restriction_factorizations(), conv);
                slot.insert(units_style_name(conv), outcome(u));
            }
        }
        if g.a.len() == 1 {
            let sv =
                single_var(&inst.coefficients()[0], inst.b(), g.n, g.s, g.t[0]).map(|r| r.count);
            checked.insert("single_var".to_string(), outcome(sv));
        }
        if units && g.s == 1 && g.t.iter().all(|&t| t == 1) {
            let u = units_count(g.a.len() as u32, inst.b(), g.n);
            checked.insert("units_count".to_string(), outcome(u));
        }
        let agree = checked.values().all(|o| o.matches(oracle));
        reports.push(FuzzReport {
            instance: inst,
            oracle_count: oracle,
            formula_counts: checked,
            alternate_counts: alternate,
            agree,
            elapsed: t0.elapsed() + setup,
        });
    }
    Ok(reports)
}

fn tuples<T: Clone>(choices: &[T], k: usize) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                choices.iter().map(move |c| {
                    let mut next = prefix.clone();
                    next.push(c.clone());
                    next
                })
            })
            .collect();
    }
    out
}

fn groups(domain: &FuzzDomain) -> Result<Vec<Group>> {
    let mut out = Vec::new();
    if domain.is_empty() {
        return Ok(out);
    }
    match domain.sampling {
        Sampling::Exhaustive => {
            for n in domain.n.0..=domain.n.1 {
                let ts = divisors(&factorize(n)?);
                let coeffs: Vec<i64> = if domain.unit_coefficients {
                    vec![1]
                } else {
                    (0..n as i64).collect()
                };
                for s in domain.s.0..=domain.s.1 {
                    for k in domain.k.0..=domain.k.1 {
                        for a in tuples(&coeffs, k) {
                            for t in tuples(&ts, k) {
                                out.push(Group {
                                    n,
                                    s,
                                    a: a.clone(),
                                    t,
                                    bs: None,
                                });
                            }
                        }
                    }
                }
            }
        }
        Sampling::Random { draws } => {
            let mut rng = ChaCha8Rng::seed_from_u64(domain.seed);
            for _ in 0..draws {
                let n = rng.gen_range(domain.n.0..=domain.n.1);
                let s = rng.gen_range(domain.s.0..=domain.s.1);
                let k = rng.gen_range(domain.k.0..=domain.k.1);
                let ts = divisors(&factorize(n)?);
                let a = (0..k)
                    .map(|_| {
                        if domain.unit_coefficients {
                            1
                        } else {
                            rng.gen_range(0..n as i64)
                        }
                    })
                    .collect();
                let t = (0..k).map(|_| ts[rng.gen_range(0..ts.len())]).collect();
                let modulus = n.pow(s) as u64;
                let b = rng.gen_range(0..modulus);
                out.push(Group {
                    n,
                    s,
                    a,
                    t,
                    bs: Some(vec![b]),
                });
            }
        }
    }
    Ok(out)
}

/// Runs the campaign. Reports come back in generation order regardless of
/// how the work was scheduled.
pub fn fuzz_campaign(
    domain: &FuzzDomain,
    bounds: &OracleBounds,
) -> Result<(Vec<FuzzReport>, FuzzSummary)> {
    let groups = groups(domain)?;
    let nested: Vec<Vec<FuzzReport>> = groups
        .par_iter()
        .map(|g| evaluate_group(g, bounds))
        .collect::<Result<_>>()?;
    let reports: Vec<FuzzReport> = nested.into_iter().flatten().collect();
    let summary = FuzzSummary::from_reports(&reports);
    Ok((reports, summary))
}

/// Disagreement classes of one formula: `(n, s, t)` keys with the number of
/// mismatching instances, for the archived discrepancy listing.
pub fn disagreement_classes(
    reports: &[FuzzReport],
    formula: &str,
) -> Vec<((u128, u32, Vec<u128>), u64)> {
    let mut classes: BTreeMap<(u128, u32, Vec<u128>), u64> = BTreeMap::new();
    for r in reports {
        let outcome = r
            .formula_counts
            .get(formula)
            .or_else(|| r.alternate_counts.get(formula));
        if let Some(o) = outcome {
            if !o.matches(r.oracle_count) {
                let key = (r.instance.n(), r.instance.s(), r.instance.restrictions());
                *classes.entry(key).or_default() += 1;
            }
        }
    }
    classes.into_iter().collect()
}
