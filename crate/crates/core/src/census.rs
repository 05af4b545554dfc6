//! Counting isomorphism types of state spaces of the stretch maps
//! `x -> a x` on `Z/n`.
//!
//! The closed forms work one prime power at a time and multiply, because a
//! stretch map on `Z/n` splits over the prime-power factors of `n` and the
//! identity behavior and periodic counts of a product of coprime-order
//! systems determine those of the factors. [`brute_force_census`] computes
//! every invariant directly and is the ground truth the formulas are tested
//! against.

use std::collections::HashMap;

use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{self, euler_phi, factorize, is_prime, multiplicative_order, tau};
use crate::error::{Error, Result};
use crate::state_graph::{CanonicalInvariant, CycleMultiset, ProcreationBehavior, StateSpace};

/// Number of isomorphism types, split by kind.
///
/// `total = trees + cycle_unions + mixed` except for `n = 1`, where the
/// single type (a loop) is both a tree and a cycle union.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct CensusCounts {
    pub total: u64,
    /// Nilpotent endomorphisms: one fixed point with a tree hanging off it.
    pub trees: u64,
    /// Automorphisms: disjoint unions of cycles.
    pub cycle_unions: u64,
    pub mixed: u64,
}

impl CensusCounts {
    fn new(total: u64, trees: u64, cycle_unions: u64) -> Self {
        CensusCounts {
            total,
            trees,
            cycle_unions,
            mixed: total.saturating_sub(trees + cycle_unions),
        }
    }
}

/// Counts for `Z/p^k`.
pub fn prime_power_count(p: u64, k: u32) -> Result<CensusCounts> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if k == 0 {
        return Err(Error::Zero);
    }
    let k64 = u64::from(k);
    Ok(if p == 2 {
        match k {
            1 => CensusCounts::new(2, 1, 1),
            2 => CensusCounts::new(4, 2, 2),
            _ => CensusCounts::new(3 * k64 - 3, k64, 2 * k64 - 3),
        }
    } else {
        let t = tau(p - 1)?;
        CensusCounts::new(k64 * (t + 1), k64, k64 * t)
    })
}

/// `2^(k * [k <= 2])`: 1, 2, 4 for `k = 0, 1, 2` and 1 afterwards.
pub fn small_two_power_factor(k: u32) -> u64 {
    if k <= 2 {
        1 << k
    } else {
        1
    }
}

/// Closed-form counts for `Z/n`, from the factorization
/// `n = 2^k * p_1^k_1 * ... * p_l^k_l`.
pub fn formula_count(n: u64) -> Result<CensusCounts> {
    let f = factorize(n)?;
    let k = i64::from(f.exponent_of(2));
    let mut total = small_two_power_factor(k as u32).max((3 * k - 3).max(0) as u64);
    let mut trees = k.max(1) as u64;
    let mut cycle_unions = k.max(1).max(2 * k - 3) as u64;
    for (p, e) in f.iter().filter(|&(p, _)| p != 2) {
        let e = u64::from(e);
        let t = tau(p - 1)?;
        total *= e * (t + 1);
        trees *= e;
        cycle_unions *= e * t;
    }
    Ok(CensusCounts::new(total, trees, cycle_unions))
}

/// Identity behavior of `x -> u p^l x` on `Z/p^k` for any unit `u`:
/// with `k = q l + r`, `q` copies of `p^l` followed by `p^r`.
pub fn nilpotent_behavior(p: u64, l: u32, k: u32) -> Result<ProcreationBehavior> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if l == 0 || l > k {
        return Err(Error::OutOfRange {
            value: u64::from(l),
            lo: 1,
            hi: u64::from(k),
        });
    }
    let (q, r) = (k / l, k % l);
    let mut seq = vec![p.pow(l); q as usize];
    if r > 0 {
        seq.push(p.pow(r));
    }
    Ok(ProcreationBehavior::new(seq))
}

/// Cycle structure of `x -> a x` on `Z/p^k` for a unit `a`.
///
/// The `phi(p^m)` elements of additive order `p^m` lie on cycles of length
/// `ord(a mod p^m)`; this covers `p = 2` as well.
pub fn automorphism_cycle_multiset(p: u64, k: u32, a: i64) -> Result<CycleMultiset> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if k == 0 {
        return Err(Error::Zero);
    }
    if arith::reduce(a, p) == 0 {
        return Err(Error::NotUnit { a, m: p });
    }
    let mut pairs = vec![(1u64, 1u64)];
    for m in 1..=k {
        let modulus = p.pow(m);
        let count = euler_phi(modulus)?;
        let len = multiplicative_order(a, modulus)?;
        pairs.push((len, count / len));
    }
    Ok(CycleMultiset::from_pairs(pairs))
}

/// Invariant of `x -> a x` on `Z/n`, computed from the state space.
pub fn stretch_invariant(n: u64, a: i64) -> Result<CanonicalInvariant> {
    if n == 0 {
        return Err(Error::Zero);
    }
    let a = u128::from(arith::reduce(a, n));
    let succ = (0..n)
        .map(|x| ((a * u128::from(x)) % u128::from(n)) as usize)
        .collect();
    let space = StateSpace::from_successors(succ)?;
    Ok(CanonicalInvariant::of_state_space(&space, 0))
}

/// Invariants of the prime-power components `x -> (a mod p^k) x` on `Z/p^k`.
pub fn crt_split_invariant(n: u64, a: i64) -> Result<Vec<CanonicalInvariant>> {
    factorize(n)?
        .prime_powers()
        .map(|q| stretch_invariant(q, a))
        .collect()
}

/// Invariant of the product of systems on groups of pairwise coprime order:
/// behaviors multiply pointwise, cycle multisets combine by lcm/gcd.
pub fn crt_combine(parts: &[CanonicalInvariant]) -> Result<CanonicalInvariant> {
    let orders: Vec<u64> = parts.iter().map(CanonicalInvariant::group_order).collect();
    for i in 0..orders.len() {
        for j in i + 1..orders.len() {
            if orders[i].gcd(&orders[j]) != 1 {
                return Err(Error::NotCoprime(orders[i], orders[j]));
            }
        }
    }
    let unit = CanonicalInvariant {
        identity_behavior: ProcreationBehavior::default(),
        cycles: CycleMultiset::from_lengths([1]),
    };
    Ok(parts.iter().fold(unit, |acc, part| CanonicalInvariant {
        identity_behavior: acc
            .identity_behavior
            .pointwise_product(&part.identity_behavior),
        cycles: acc.cycles.combine(&part.cycles),
    }))
}

/// One isomorphism type found by the census.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusClass {
    /// Smallest `a` whose state space has this type.
    pub rep: u64,
    pub invariant: CanonicalInvariant,
    /// How many `a` in `0..n` have this type.
    pub size: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusReport {
    pub n: u64,
    pub formula: CensusCounts,
    pub brute_force: Option<CensusCounts>,
    pub classes: Vec<CensusClass>,
    /// Set for `n = 1`, where the only type is both a tree and a cycle union.
    pub overlap: bool,
}

impl CensusReport {
    /// Formula only, no enumeration.
    pub fn formula_only(n: u64) -> Result<CensusReport> {
        Ok(CensusReport {
            n,
            formula: formula_count(n)?,
            brute_force: None,
            classes: Vec::new(),
            overlap: n == 1,
        })
    }

    /// Whether the enumerated counts (when present) equal the formula.
    pub fn agrees(&self) -> bool {
        self.brute_force.map_or(true, |b| b == self.formula)
    }
}

/// Computes the invariant of every stretch map on `Z/n`, merges equal ones
/// and classifies the resulting types.
pub fn brute_force_census(n: u64) -> Result<CensusReport> {
    if n == 0 {
        return Err(Error::Zero);
    }
    let invariants: Vec<CanonicalInvariant> = (0..n)
        .into_par_iter()
        .map(|a| stretch_invariant(n, a as i64))
        .collect::<Result<_>>()?;

    let mut index: HashMap<&CanonicalInvariant, usize> = HashMap::new();
    let mut classes: Vec<CensusClass> = Vec::new();
    for (a, inv) in invariants.iter().enumerate() {
        match index.get(inv) {
            Some(&i) => classes[i].size += 1,
            None => {
                index.insert(inv, classes.len());
                classes.push(CensusClass {
                    rep: a as u64,
                    invariant: inv.clone(),
                    size: 1,
                });
            }
        }
    }

    let trees = classes
        .iter()
        .filter(|c| c.invariant.is_nilpotent())
        .count() as u64;
    let cycle_unions = classes
        .iter()
        .filter(|c| c.invariant.is_automorphism())
        .count() as u64;
    let total = classes.len() as u64;
    Ok(CensusReport {
        n,
        formula: formula_count(n)?,
        brute_force: Some(CensusCounts::new(total, trees, cycle_unions)),
        classes,
        overlap: n == 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::unit_decomposition_mod_2k;
    use std::collections::{BTreeSet, HashSet};

    fn counts(total: u64, trees: u64, cycle_unions: u64, mixed: u64) -> CensusCounts {
        CensusCounts {
            total,
            trees,
            cycle_unions,
            mixed,
        }
    }

    #[test]
    fn prime_power_examples() {
        assert_eq!(prime_power_count(3, 2).unwrap(), counts(6, 2, 4, 0));
        assert_eq!(prime_power_count(2, 3).unwrap(), counts(6, 3, 3, 0));
        assert_eq!(prime_power_count(2, 2).unwrap().total, 4);
        assert_eq!(prime_power_count(2, 1).unwrap(), counts(2, 1, 1, 0));
        assert_eq!(prime_power_count(5, 2).unwrap(), counts(8, 2, 6, 0));
        assert_eq!(prime_power_count(4, 2), Err(Error::NotPrime(4)));
        assert_eq!(prime_power_count(3, 0), Err(Error::Zero));
    }

    #[test]
    fn delta_factor() {
        assert_eq!(
            (0..5).map(small_two_power_factor).collect::<Vec<_>>(),
            vec![1, 2, 4, 1, 1]
        );
    }

    #[test]
    fn formula_examples() {
        assert_eq!(formula_count(8).unwrap(), counts(6, 3, 3, 0));
        assert_eq!(formula_count(12).unwrap(), counts(12, 2, 4, 6));
        assert_eq!(formula_count(9).unwrap(), counts(6, 2, 4, 0));
        assert_eq!(formula_count(1).unwrap(), counts(1, 1, 1, 0));
        assert_eq!(formula_count(0), Err(Error::Zero));
    }

    #[test]
    fn formula_matches_prime_powers() {
        for p in [2u64, 3, 5, 7, 11, 13] {
            for k in 1..=6u32 {
                let pk = p.pow(k);
                assert_eq!(formula_count(pk).unwrap(), prime_power_count(p, k).unwrap());
            }
        }
    }

    #[test]
    fn nilpotent_behavior_examples() {
        assert_eq!(nilpotent_behavior(3, 1, 2).unwrap().as_slice(), &[3, 3]);
        assert_eq!(nilpotent_behavior(2, 2, 3).unwrap().as_slice(), &[4, 2]);
        assert_eq!(nilpotent_behavior(5, 3, 3).unwrap().as_slice(), &[125]);
        assert!(nilpotent_behavior(5, 4, 3).is_err());
        assert!(nilpotent_behavior(5, 0, 3).is_err());
    }

    #[test]
    fn automorphism_cycle_examples() {
        assert_eq!(
            automorphism_cycle_multiset(7, 1, 2).unwrap().pairs(),
            &[(1, 1), (3, 2)]
        );
        assert_eq!(
            automorphism_cycle_multiset(2, 3, 5).unwrap().pairs(),
            &[(1, 4), (2, 2)]
        );
        assert_eq!(
            automorphism_cycle_multiset(3, 4, 1).unwrap().pairs(),
            &[(1, 81)]
        );
        assert!(automorphism_cycle_multiset(3, 2, 6).is_err());
    }

    #[test]
    fn brute_force_examples() {
        let r = brute_force_census(8).unwrap();
        assert_eq!(r.classes.len(), 6);
        let reps: Vec<u64> = r.classes.iter().map(|c| c.rep).collect();
        assert_eq!(reps, vec![0, 1, 2, 3, 4, 5]);
        let three = r.classes.iter().find(|c| c.rep == 3).unwrap();
        assert_eq!(three.size, 2);
        assert!(r.agrees());

        let r = brute_force_census(7).unwrap();
        assert_eq!(r.brute_force.unwrap(), counts(5, 1, 4, 0));
        let reps: Vec<u64> = r.classes.iter().map(|c| c.rep).collect();
        assert_eq!(reps, vec![0, 1, 2, 3, 6]);

        let r = brute_force_census(1).unwrap();
        assert_eq!(r.classes.len(), 1);
        assert!(r.overlap);
        assert_eq!(r.brute_force.unwrap(), counts(1, 1, 1, 0));

        let r = brute_force_census(12).unwrap();
        assert_eq!(r.brute_force.unwrap(), counts(12, 2, 4, 6));
        assert_eq!(r.classes.iter().map(|c| c.size).sum::<u64>(), 12);
    }

    #[test]
    fn crt_examples() {
        let tree = CanonicalInvariant {
            identity_behavior: ProcreationBehavior::new(vec![4]),
            cycles: CycleMultiset::from_lengths([1]),
        };
        let swap = CanonicalInvariant {
            identity_behavior: ProcreationBehavior::default(),
            cycles: CycleMultiset::from_pairs([(1, 1), (2, 1)]),
        };
        let combined = crt_combine(&[tree.clone(), swap.clone()]).unwrap();
        assert_eq!(combined.identity_behavior.as_slice(), &[4]);
        assert_eq!(combined.cycles.pairs(), &[(1, 1), (2, 1)]);

        let trivial = stretch_invariant(1, 0).unwrap();
        assert_eq!(crt_combine(&[tree.clone(), trivial]).unwrap(), tree);

        let parts = crt_split_invariant(12, 7).unwrap();
        assert_eq!(
            parts,
            vec![
                stretch_invariant(4, 3).unwrap(),
                stretch_invariant(3, 1).unwrap()
            ]
        );
        assert_eq!(
            crt_combine(&parts).unwrap(),
            stretch_invariant(12, 7).unwrap()
        );

        assert_eq!(
            crt_combine(&[tree.clone(), tree]),
            Err(Error::NotCoprime(4, 4))
        );
    }

    #[test]
    fn crt_round_trip() {
        for n in 1..=300u64 {
            for a in 0..n as i64 {
                let parts = crt_split_invariant(n, a).unwrap();
                assert_eq!(
                    crt_combine(&parts).unwrap(),
                    stretch_invariant(n, a).unwrap(),
                    "n={n} a={a}"
                );
            }
        }
    }

    #[test]
    fn coprime_product_is_injective() {
        for n1 in 1..=200u64 {
            for n2 in n1 + 1..=200 / n1 {
                if n1.gcd(&n2) != 1 {
                    continue;
                }
                let left: BTreeSet<_> = (0..n1)
                    .map(|a| stretch_invariant(n1, a as i64).unwrap())
                    .collect();
                let right: BTreeSet<_> = (0..n2)
                    .map(|a| stretch_invariant(n2, a as i64).unwrap())
                    .collect();
                let mut seen = HashSet::new();
                for x in &left {
                    for y in &right {
                        let c = crt_combine(&[x.clone(), y.clone()]).unwrap();
                        assert!(seen.insert(c), "collision for n1={n1} n2={n2}");
                    }
                }
            }
        }
    }

    #[test]
    fn odd_prime_classes_are_indexed_by_divisor_and_level() {
        for (p, k) in [(3u64, 3u32), (5, 2), (7, 2), (11, 1), (13, 2), (3, 5)] {
            let pk = p.pow(k);
            let mut by_key: HashMap<(u64, u32), CanonicalInvariant> = HashMap::new();
            let mut by_inv: HashMap<CanonicalInvariant, (u64, u32)> = HashMap::new();
            for a in (1..pk).filter(|a| a % p != 0) {
                let d = multiplicative_order(a as i64, p).unwrap();
                let full = multiplicative_order(a as i64, pk).unwrap();
                // full = d * p^(k-1-l)
                let level = k - 1 - ilog(full / d, p);
                let inv = stretch_invariant(pk, a as i64).unwrap();
                if let Some(prev) = by_key.insert((d, level), inv.clone()) {
                    assert_eq!(prev, inv);
                }
                if let Some(prev) = by_inv.insert(inv, (d, level)) {
                    assert_eq!(prev, (d, level));
                }
            }
            assert_eq!(by_key.len() as u64, u64::from(k) * tau(p - 1).unwrap());
        }
    }

    fn ilog(x: u64, p: u64) -> u32 {
        let mut e = 0;
        let mut x = x;
        while x > 1 {
            assert_eq!(x % p, 0);
            x /= p;
            e += 1;
        }
        e
    }

    #[test]
    fn two_power_classes_collide_only_at_top_levels() {
        for k in 3..=9u32 {
            let modulus = 1u64 << k;
            let mut classes: HashMap<(u8, u32), CanonicalInvariant> = HashMap::new();
            for a in (1..modulus).step_by(2) {
                let d = unit_decomposition_mod_2k(a as i64, k).unwrap();
                let inv = stretch_invariant(modulus, a as i64).unwrap();
                if let Some(prev) = classes.insert((d.sign, d.level), inv.clone()) {
                    assert_eq!(prev, inv);
                }
            }
            for (ka, ia) in &classes {
                for (kb, ib) in &classes {
                    let merged = [(1, k - 3), (1, k - 2)];
                    let expected_equal = ka == kb || (merged.contains(ka) && merged.contains(kb));
                    assert_eq!(ia == ib, expected_equal, "k={k} {ka:?} {kb:?}");
                }
            }
        }
    }
}
