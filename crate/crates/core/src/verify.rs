//! Verification suites: every structural law checked on a large pool of
//! systems, plus the census formulas checked against enumeration.
//!
//! Each suite reports how many cases it checked and, for failures, a
//! description and (where one exists) a system description that reproduces
//! the failure.

use std::collections::HashMap;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{divisors, is_prime, multiplicative_order, unit_decomposition_mod_2k};
use crate::census::{
    automorphism_cycle_multiset, brute_force_census, nilpotent_behavior, stretch_invariant,
    CensusCounts,
};
use crate::dynamics::{fds_product, periodic_points_floyd, Fdg};
use crate::group::{
    abelian_groups_up_to, all_table_endomorphisms, builtin_table_group, enumerate_endomorphisms,
};
use crate::realization::{realize, DivisorChain};
use crate::spec_file::SystemSpec;
use crate::state_graph::{
    kernel_index_check, CanonicalForm, CanonicalInvariant, CycleMultiset, StateSpace,
};

/// Groups with more factors or larger order than this are only sampled.
pub const EXHAUSTIVE_MAX_ORDER: u64 = 48;
pub const EXHAUSTIVE_MAX_FACTORS: usize = 3;
pub const CYCLIC_MAX_ORDER: u64 = 512;
pub const RANDOM_MAX_ORDER: u64 = 10_000;
pub const TENSOR_SAMPLES: usize = 500;
pub const REALIZATION_SAMPLES: usize = 200;
pub const COMPLETENESS_MAX_N: u64 = 100;
pub const CENSUS_SPOT_CHECKS: [u64; 3] = [1024, 2048, 3600];
pub const SIMULATION_MAX_PRIME_POWER: u64 = 2048;
pub const ORDER_FORMULA_MAX_K: u32 = 10;

/// At most this many failures are kept per suite; all are counted.
const KEPT_VIOLATIONS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Number of random endomorphisms of larger abelian groups. With 0 only
    /// the exhaustive pool is used.
    pub budget: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 42,
            budget: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reproducer: Option<SystemSpec>,
}

impl Violation {
    fn new(message: impl Into<String>, reproducer: Option<SystemSpec>) -> Self {
        Violation {
            message: message.into(),
            reproducer,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteOutcome {
    pub name: String,
    pub checked: u64,
    pub violation_count: u64,
    /// The first few failures.
    pub violations: Vec<Violation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl SuiteOutcome {
    fn collect(name: &str, results: impl IntoIterator<Item = Option<Violation>>) -> Self {
        let mut outcome = SuiteOutcome {
            name: name.to_string(),
            checked: 0,
            violation_count: 0,
            violations: Vec::new(),
            note: None,
        };
        for r in results {
            outcome.checked += 1;
            if let Some(v) = r {
                outcome.violation_count += 1;
                if outcome.violations.len() < KEPT_VIOLATIONS {
                    outcome.violations.push(v);
                }
            }
        }
        outcome
    }

    fn with_note(mut self, note: &str) -> Self {
        self.note = Some(note.to_string());
        self
    }

    pub fn passed(&self) -> bool {
        self.violation_count == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub budget: usize,
    pub suites: Vec<SuiteOutcome>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteOutcome::passed)
    }

    pub fn suite(&self, name: &str) -> Option<&SuiteOutcome> {
        self.suites.iter().find(|s| s.name == name)
    }
}

/// Every endomorphism of: abelian groups of rank 2 or 3 and order at most 48,
/// `Z/n` for `n <= 512` (rank 1 is covered here), and S3, D4, Q8.
pub fn exhaustive_pool() -> Vec<SystemSpec> {
    let mut pool = Vec::new();
    for n in 1..=CYCLIC_MAX_ORDER {
        pool.extend((0..n as i64).map(|a| SystemSpec::Cyclic { n, a }));
    }
    for g in abelian_groups_up_to(EXHAUSTIVE_MAX_ORDER, EXHAUSTIVE_MAX_FACTORS) {
        if g.rank() >= 2 {
            pool.extend(
                enumerate_endomorphisms(&g, usize::MAX, 0).map(|phi| SystemSpec::abelian(&phi)),
            );
        }
    }
    for name in ["S3", "D4", "Q8"] {
        let g = builtin_table_group(name).expect("builtin");
        pool.extend(
            all_table_endomorphisms(&g)
                .iter()
                .map(|f| SystemSpec::table(&g, f.images())),
        );
    }
    pool
}

/// `budget` endomorphisms of abelian groups of order in `49..=10^4` with at
/// most three invariant factors; the group is drawn uniformly from that list
/// and the endomorphism uniformly from its endomorphisms.
pub fn random_pool(seed: u64, budget: usize) -> Vec<SystemSpec> {
    if budget == 0 {
        return Vec::new();
    }
    let groups: Vec<_> = abelian_groups_up_to(RANDOM_MAX_ORDER, EXHAUSTIVE_MAX_FACTORS)
        .into_iter()
        .filter(|g| g.size() > EXHAUSTIVE_MAX_ORDER)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..budget)
        .map(|_| {
            let g = &groups[rng.gen_range(0..groups.len())];
            let phi = enumerate_endomorphisms(g, 1, rng.gen())
                .next()
                .expect("nontrivial groups have endomorphisms");
            SystemSpec::abelian(&phi)
        })
        .collect()
}

/// Functional graphs on which procreation is not rigid, so they cannot be
/// state spaces of group endomorphisms.
pub fn non_rigid_graphs() -> Vec<Vec<usize>> {
    vec![
        // three leaves and a 2-chain into one loop
        vec![0, 0, 0, 0, 5, 0],
        // two loops, one with an extra leaf
        vec![0, 1, 0],
        // a 2-cycle with a leaf on one side
        vec![1, 0, 0],
        // loop with a path of length 2 and a leaf
        vec![0, 0, 1, 0],
        // loop with two leaves whose middle vertex branches twice
        vec![0, 0, 1, 1, 0],
    ]
}

struct MemberChecks {
    fitting: Option<Violation>,
    periodic: Option<Violation>,
    rigidity: Option<Violation>,
    kernel_index: Option<Violation>,
}

fn check_member(spec: &SystemSpec) -> MemberChecks {
    let fail = |msg: String| Some(Violation::new(msg, Some(spec.clone())));
    let fdg = match spec.build() {
        Ok(f) => f,
        Err(e) => {
            let v = fail(format!("pool member failed to build: {e}"));
            return MemberChecks {
                fitting: v.clone(),
                periodic: v.clone(),
                rigidity: v.clone(),
                kernel_index: v,
            };
        }
    };
    let fitting = fdg.fitting_check();
    let per = fdg.per_part();
    let space = StateSpace::from_fdg(&fdg);
    let rigidity = space.rigid_procreation_check();
    let kernel = kernel_index_check(&fdg);
    MemberChecks {
        fitting: (!fitting.passed())
            .then(|| fail(format!("{fitting:?}")))
            .flatten(),
        periodic: (periodic_points_floyd(&fdg) != per)
            .then(|| fail("cycle detection disagrees with the stable image".into()))
            .flatten(),
        rigidity: (!rigidity.is_rigid())
            .then(|| fail(format!("{rigidity:?}")))
            .flatten(),
        kernel_index: (!kernel.passed())
            .then(|| fail(format!("{kernel:?}")))
            .flatten(),
    }
}

/// Decomposition, cycle-detection, rigidity and kernel-index suites over
/// `pool`, plus the hand-built non-rigid graphs in the rigidity suite.
pub fn pool_suites(pool: &[SystemSpec]) -> Vec<SuiteOutcome> {
    let checks: Vec<MemberChecks> = pool.par_iter().map(check_member).collect();
    let non_rigid = non_rigid_graphs().into_iter().map(|succ| {
        let space = StateSpace::from_successors(succ.clone()).expect("valid graph");
        space
            .rigid_procreation_check()
            .is_rigid()
            .then(|| Violation::new(format!("graph {succ:?} reported rigid"), None))
    });
    vec![
        SuiteOutcome::collect("fitting", checks.iter().map(|c| c.fitting.clone())),
        SuiteOutcome::collect("periodic-oracle", checks.iter().map(|c| c.periodic.clone())),
        SuiteOutcome::collect(
            "rigidity",
            checks.iter().map(|c| c.rigidity.clone()).chain(non_rigid),
        ),
        SuiteOutcome::collect(
            "kernel-index",
            checks.iter().map(|c| c.kernel_index.clone()),
        ),
    ]
}

/// The state space of a system against the product of its restrictions to
/// the nilpotent and periodic parts, for `samples` members of `pool` chosen
/// with `seed`.
pub fn tensor_suite(pool: &[SystemSpec], seed: u64, samples: usize) -> SuiteOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = index::sample(&mut rng, pool.len(), samples.min(pool.len())).into_vec();
    picked.sort_unstable();
    let results: Vec<Option<Violation>> = picked
        .par_iter()
        .map(|&i| {
            let spec = &pool[i];
            let check = || -> crate::error::Result<bool> {
                let fdg = spec.build()?;
                let nil = fdg.restrict(&fdg.nil_part())?;
                let per = fdg.restrict(&fdg.per_part())?;
                let product = fds_product(&nil, &per)?;
                Ok(StateSpace::from_fdg(&fdg).is_isomorphic(&StateSpace::from_fdg(&product)))
            };
            match check() {
                Ok(true) => None,
                Ok(false) => Some(Violation::new(
                    "not isomorphic to nil x per",
                    Some(spec.clone()),
                )),
                Err(e) => Some(Violation::new(e.to_string(), Some(spec.clone()))),
            }
        })
        .collect();
    SuiteOutcome::collect("tensor-decomposition", results)
}

/// A random divisor chain of length at most 5 starting at most at 16.
fn random_chain(rng: &mut ChaCha8Rng) -> Vec<u64> {
    let len = rng.gen_range(0..=5);
    let mut chain: Vec<u64> = Vec::with_capacity(len);
    for i in 0..len {
        let next = if i == 0 {
            rng.gen_range(1..=16)
        } else {
            let ds = divisors(chain[i - 1]).expect("positive");
            ds[rng.gen_range(0..ds.len())]
        };
        chain.push(next);
    }
    chain
}

pub fn realization_suite(seed: u64, samples: usize) -> SuiteOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chains: Vec<Vec<u64>> = (0..samples).map(|_| random_chain(&mut rng)).collect();
    let results = chains.iter().map(|raw| {
        let chain = match DivisorChain::new(raw.clone()) {
            Ok(c) => c,
            Err(e) => return Some(Violation::new(format!("chain {raw:?}: {e}"), None)),
        };
        let fdg = match realize(&chain) {
            Ok(f) => f,
            Err(e) => return Some(Violation::new(format!("chain {raw:?}: {e}"), None)),
        };
        let inv = crate::state_graph::canonical_invariant(&fdg);
        let space = StateSpace::from_fdg(&fdg);
        let ok = inv.identity_behavior.as_slice() == chain.as_slice()
            && inv.cycles.pairs() == [(1, 1)]
            && space.rigid_procreation_check().is_rigid()
            && kernel_index_check(&fdg).passed();
        (!ok).then(|| {
            Violation::new(
                format!("chain {raw:?} realized with invariant {inv}"),
                SystemSpec::describe(&fdg),
            )
        })
    });
    SuiteOutcome::collect("realization", results.collect::<Vec<_>>())
}

/// Whether equal invariants and equal canonical forms pick out the same
/// pairs among all stretch maps on `Z/n`, `n <= max_n`.
pub fn completeness_suite(max_n: u64) -> SuiteOutcome {
    let rows: Vec<(u64, i64, CanonicalInvariant, CanonicalForm)> = (1..=max_n)
        .into_par_iter()
        .flat_map_iter(|n| {
            (0..n as i64).map(move |a| {
                let space = StateSpace::from_fdg(&Fdg::stretch(n, a).expect("n >= 1"));
                let inv = CanonicalInvariant::of_state_space(&space, 0);
                (n, a, inv, space.ahu_canonical_form())
            })
        })
        .collect();
    let mut form_of: HashMap<&CanonicalInvariant, (&CanonicalForm, u64, i64)> = HashMap::new();
    let mut inv_of: HashMap<&CanonicalForm, (&CanonicalInvariant, u64, i64)> = HashMap::new();
    let results = rows.iter().map(|(n, a, inv, form)| {
        let spec = SystemSpec::Cyclic { n: *n, a: *a };
        let (seen_form, n0, a0) = *form_of.entry(inv).or_insert((form, *n, *a));
        if seen_form != form {
            return Some(Violation::new(
                format!("same invariant {inv} but non-isomorphic to n={n0} a={a0}"),
                Some(spec),
            ));
        }
        let (seen_inv, n0, a0) = *inv_of.entry(form).or_insert((inv, *n, *a));
        if seen_inv != inv {
            return Some(Violation::new(
                format!("isomorphic to n={n0} a={a0} but invariants differ ({inv} vs {seen_inv})"),
                Some(spec),
            ));
        }
        None
    });
    SuiteOutcome::collect("invariant-completeness", results.collect::<Vec<_>>())
        .with_note("completeness of the invariant is a tested hypothesis, not a proven property")
}

fn census_violation(n: u64) -> Option<Violation> {
    match brute_force_census(n) {
        Ok(r) => {
            let sizes: u64 = r.classes.iter().map(|c| c.size).sum();
            (!r.agrees() || sizes != n).then(|| {
                Violation::new(
                    format!(
                        "n={n}: formula {:?}, enumeration {:?}",
                        r.formula, r.brute_force
                    ),
                    None,
                )
            })
        }
        Err(e) => Some(Violation::new(format!("n={n}: {e}"), None)),
    }
}

/// Formula against enumeration for `1..=max_n` and the extra values.
pub fn census_suite(max_n: u64, extra: &[u64]) -> SuiteOutcome {
    let ns: Vec<u64> = (1..=max_n).chain(extra.iter().copied()).collect();
    SuiteOutcome::collect(
        "census",
        ns.into_iter().map(census_violation).collect::<Vec<_>>(),
    )
}

/// Small groups whose counts are known by hand: `(n, total, trees, cycle unions)`.
pub const PRIME_POWER_PINS: [(u64, u64, u64, u64); 7] = [
    (2, 2, 1, 1),
    (4, 4, 2, 2),
    (8, 6, 3, 3),
    (16, 9, 4, 5),
    (9, 6, 2, 4),
    (25, 8, 2, 6),
    (7, 5, 1, 4),
];

pub fn prime_power_pin_suite() -> SuiteOutcome {
    let results = PRIME_POWER_PINS
        .iter()
        .map(|&(n, total, trees, cycle_unions)| {
            let expected = CensusCounts {
                total,
                trees,
                cycle_unions,
                mixed: 0,
            };
            let found = brute_force_census(n).ok().and_then(|r| r.brute_force);
            (found != Some(expected)).then(|| {
                Violation::new(
                    format!("n={n}: expected {expected:?}, found {found:?}"),
                    None,
                )
            })
        });
    SuiteOutcome::collect("prime-power-pins", results.collect::<Vec<_>>())
}

/// `ord(a mod 2^m) = 2^max(eps, m - 2 - l)` for all odd `a < 2^k`,
/// `2 <= m <= k`, `3 <= k <= max_k`.
pub fn order_formula_suite(max_k: u32) -> SuiteOutcome {
    let mut results = Vec::new();
    for k in 3..=max_k {
        for a in (1..1i64 << k).step_by(2) {
            let d = unit_decomposition_mod_2k(a, k).expect("odd a, k >= 3");
            for m in 2..=k {
                let exp = i64::from(d.sign).max(i64::from(m) - 2 - i64::from(d.level));
                let found = multiplicative_order(a, 1 << m).expect("odd a is a unit");
                results.push((found != 1 << exp).then(|| {
                    Violation::new(
                        format!("a={a} k={k} m={m}: order {found}, formula 2^{exp} from {d:?}"),
                        Some(SystemSpec::Cyclic { n: 1 << m, a }),
                    )
                }));
            }
        }
    }
    SuiteOutcome::collect("order-formula", results)
}

/// Prime powers `p^k <= max` as `(p, k)`.
fn prime_powers_up_to(max: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    for p in (2..=max).filter(|&p| is_prime(p)) {
        let mut k = 1;
        while p.pow(k) <= max {
            out.push((p, k));
            k += 1;
        }
    }
    out
}

/// The predicted identity behavior of `x -> u p^l x` on `Z/p^k` against the
/// simulated one, for every unit `u` and `1 <= l <= k`. Units giving the same
/// multiplier share one simulation.
pub fn nilpotent_behavior_suite(max_prime_power: u64) -> SuiteOutcome {
    let results: Vec<Vec<Option<Violation>>> = prime_powers_up_to(max_prime_power)
        .into_par_iter()
        .map(|(p, k)| {
            let q = p.pow(k);
            let mut out = Vec::new();
            for l in 1..=k {
                let predicted = nilpotent_behavior(p, l, k).expect("valid range");
                let mut simulated: HashMap<u64, bool> = HashMap::new();
                for u in (1..q).filter(|u| u % p != 0) {
                    let a = (u as u128 * p.pow(l) as u128 % q as u128) as u64;
                    let ok = *simulated.entry(a).or_insert_with(|| {
                        stretch_invariant(q, a as i64)
                            .expect("q >= 1")
                            .identity_behavior
                            == predicted
                    });
                    out.push((!ok).then(|| {
                        Violation::new(
                            format!("p={p} l={l} k={k} u={u}: predicted {predicted}"),
                            Some(SystemSpec::Cyclic { n: q, a: a as i64 }),
                        )
                    }));
                }
            }
            out
        })
        .collect();
    SuiteOutcome::collect("nilpotent-behavior", results.into_iter().flatten())
}

/// Cycle lengths of the permutation `x -> a x` on `Z/q` by direct walking.
fn simulated_cycles(q: u64, a: u64) -> CycleMultiset {
    let mut seen = vec![false; q as usize];
    let mut lengths = Vec::new();
    for x in 0..q {
        if seen[x as usize] {
            continue;
        }
        let mut len = 0;
        let mut y = x;
        while !seen[y as usize] {
            seen[y as usize] = true;
            y = (a as u128 * y as u128 % q as u128) as u64;
            len += 1;
        }
        lengths.push(len);
    }
    CycleMultiset::from_lengths(lengths)
}

/// Predicted cycle structure of every automorphism `x -> a x` of `Z/p^k`
/// against direct simulation.
pub fn automorphism_cycle_suite(max_prime_power: u64) -> SuiteOutcome {
    let results: Vec<Vec<Option<Violation>>> = prime_powers_up_to(max_prime_power)
        .into_par_iter()
        .map(|(p, k)| {
            let q = p.pow(k);
            (1..q)
                .filter(|a| a % p != 0)
                .map(|a| {
                    let predicted = automorphism_cycle_multiset(p, k, a as i64).expect("unit");
                    let simulated = simulated_cycles(q, a);
                    (predicted != simulated).then(|| {
                        Violation::new(
                            format!(
                                "p={p} k={k} a={a}: predicted {predicted}, simulated {simulated}"
                            ),
                            Some(SystemSpec::Cyclic { n: q, a: a as i64 }),
                        )
                    })
                })
                .collect()
        })
        .collect();
    SuiteOutcome::collect("automorphism-cycles", results.into_iter().flatten())
}

/// Every suite at its standard size.
pub fn run_all(config: VerifyConfig) -> VerifyReport {
    let exhaustive = exhaustive_pool();
    let mut pool = exhaustive.clone();
    pool.extend(random_pool(config.seed, config.budget));
    let mut suites = pool_suites(&pool);
    suites.push(tensor_suite(&exhaustive, config.seed, TENSOR_SAMPLES));
    suites.push(realization_suite(config.seed, REALIZATION_SAMPLES));
    suites.push(completeness_suite(COMPLETENESS_MAX_N));
    suites.push(census_suite(CYCLIC_MAX_ORDER, &CENSUS_SPOT_CHECKS));
    suites.push(prime_power_pin_suite());
    suites.push(order_formula_suite(ORDER_FORMULA_MAX_K));
    suites.push(nilpotent_behavior_suite(SIMULATION_MAX_PRIME_POWER));
    suites.push(automorphism_cycle_suite(SIMULATION_MAX_PRIME_POWER));
    VerifyReport {
        seed: config.seed,
        budget: config.budget,
        suites,
    }
}
