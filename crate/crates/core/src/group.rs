//! Finite group carriers and validated endomorphisms.
//!
//! Two carriers are supported:
//!
//! * [`AbelianGroup`]: a product `Z/m_1 x ... x Z/m_r` of cyclic groups, with
//!   endomorphisms given by integer matrices ([`MatrixEndomorphism`]).
//! * [`TableGroup`]: an arbitrary finite group given by its Cayley table, with
//!   endomorphisms given by image arrays ([`TableEndomorphism`]).
//!
//! Elements of either carrier are addressed by an index in `0..order`. For an
//! abelian group the index is the mixed-radix encoding of the residue tuple
//! with the last coordinate varying fastest, so for `Z/n` the index of `x` is
//! `x` itself and the identity is always index 0.

use std::collections::HashSet;
use std::fmt;

use num_integer::Integer;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::reduce;
use crate::error::{Error, Result};

/// Largest carrier the library will index element by element.
pub const MAX_ORDER: u64 = 1 << 24;

/// Operations shared by both carriers, phrased on element indices.
pub trait FiniteGroup {
    fn order(&self) -> usize;
    fn identity(&self) -> usize;
    fn op(&self, a: usize, b: usize) -> usize;
    fn inverse(&self, a: usize) -> usize;
    fn is_abelian_carrier(&self) -> bool;

    /// Human-readable name of an element.
    fn label(&self, a: usize) -> String;

    /// Order of the element `a` (smallest `e >= 1` with `a^e = 1`).
    fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut e = 1;
        while x != self.identity() {
            x = self.op(x, a);
            e += 1;
        }
        e
    }
}

/// A residue tuple `(x_1, ..., x_r)` with `0 <= x_i < m_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupElement(pub Vec<u64>);

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            return write!(f, "{}", self.0[0]);
        }
        f.write_str("(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str(")")
    }
}

/// `Z/m_1 x ... x Z/m_r`. The tuple is kept as given; it is not forced into
/// invariant-factor normal form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AbelianGroup {
    orders: Vec<u64>,
    strides: Vec<u64>,
    size: u64,
}

impl AbelianGroup {
    /// Builds the group from its cyclic orders. The empty tuple is normalized
    /// to `(1)`.
    pub fn new(orders: Vec<u64>) -> Result<Self> {
        let orders = if orders.is_empty() { vec![1] } else { orders };
        if orders.iter().any(|&m| m == 0) {
            return Err(Error::Zero);
        }
        let size = orders
            .iter()
            .try_fold(1u128, |acc, &m| {
                let next = acc * u128::from(m);
                (next <= u128::from(MAX_ORDER)).then_some(next)
            })
            .ok_or_else(|| Error::TooLarge(orders.iter().map(|&m| u128::from(m)).product()))?
            as u64;
        let mut strides = vec![1u64; orders.len()];
        for i in (0..orders.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * orders[i + 1];
        }
        Ok(AbelianGroup {
            orders,
            strides,
            size,
        })
    }

    pub fn cyclic(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Zero);
        }
        Self::new(vec![n])
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn element(&self, index: usize) -> GroupElement {
        let idx = index as u64;
        GroupElement(
            self.orders
                .iter()
                .zip(&self.strides)
                .map(|(&m, &s)| (idx / s) % m)
                .collect(),
        )
    }

    pub fn index_of(&self, x: &GroupElement) -> Result<usize> {
        if x.0.len() != self.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.rank(),
                found: x.0.len(),
            });
        }
        Ok(x.0
            .iter()
            .zip(&self.orders)
            .zip(&self.strides)
            .map(|((&xi, &m), &s)| (xi % m) * s)
            .sum::<u64>() as usize)
    }

    pub fn add(&self, x: &GroupElement, y: &GroupElement) -> GroupElement {
        GroupElement(
            x.0.iter()
                .zip(&y.0)
                .zip(&self.orders)
                .map(|((&a, &b), &m)| (a + b) % m)
                .collect(),
        )
    }

    /// The direct product, with `self` as the leading coordinates.
    pub fn product(&self, other: &AbelianGroup) -> Result<AbelianGroup> {
        let mut orders = self.orders.clone();
        orders.extend_from_slice(&other.orders);
        AbelianGroup::new(orders)
    }
}

impl FiniteGroup for AbelianGroup {
    fn order(&self) -> usize {
        self.size as usize
    }

    fn identity(&self) -> usize {
        0
    }

    fn op(&self, a: usize, b: usize) -> usize {
        let (a, b) = (a as u64, b as u64);
        let mut out = 0;
        for (&m, &s) in self.orders.iter().zip(&self.strides) {
            out += (((a / s) % m + (b / s) % m) % m) * s;
        }
        out as usize
    }

    fn inverse(&self, a: usize) -> usize {
        let a = a as u64;
        let mut out = 0;
        for (&m, &s) in self.orders.iter().zip(&self.strides) {
            out += ((m - (a / s) % m) % m) * s;
        }
        out as usize
    }

    fn is_abelian_carrier(&self) -> bool {
        true
    }

    fn label(&self, a: usize) -> String {
        self.element(a).to_string()
    }
}

pub fn make_cyclic(n: u64) -> Result<AbelianGroup> {
    AbelianGroup::cyclic(n)
}

/// Invariant-factor tuples `m_1 | m_2 | ... | m_r` (all `m_i >= 2`) of the
/// abelian groups of order at most `max_order` with at most `max_factors`
/// factors. The trivial group is included as `(1)`.
pub fn abelian_groups_up_to(max_order: u64, max_factors: usize) -> Vec<AbelianGroup> {
    fn extend(
        prefix: &mut Vec<u64>,
        product: u64,
        max_order: u64,
        max_factors: usize,
        out: &mut Vec<Vec<u64>>,
    ) {
        if !prefix.is_empty() {
            out.push(prefix.clone());
        }
        if prefix.len() == max_factors {
            return;
        }
        let step = prefix.last().copied().unwrap_or(1).max(2);
        let mut m = step;
        while product * m <= max_order {
            if prefix.last().map_or(true, |&last| m % last == 0) {
                prefix.push(m);
                extend(prefix, product * m, max_order, max_factors, out);
                prefix.pop();
            }
            m += 1;
        }
    }
    let mut tuples = vec![vec![1]];
    extend(&mut Vec::new(), 1, max_order, max_factors, &mut tuples);
    tuples.sort_by_key(|t| (t.iter().product::<u64>(), t.clone()));
    tuples
        .into_iter()
        .map(|t| AbelianGroup::new(t).expect("orders are bounded"))
        .collect()
}

/// A subset of a carrier, stored as a membership mask over element indices.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subset {
    mask: Vec<bool>,
    len: usize,
}

impl Subset {
    pub fn from_mask(mask: Vec<bool>) -> Self {
        let len = mask.iter().filter(|&&b| b).count();
        Subset { mask, len }
    }

    pub fn from_indices(universe: usize, members: impl IntoIterator<Item = usize>) -> Self {
        let mut mask = vec![false; universe];
        for x in members {
            mask[x] = true;
        }
        Self::from_mask(mask)
    }

    pub fn full(universe: usize) -> Self {
        Subset {
            mask: vec![true; universe],
            len: universe,
        }
    }

    pub fn singleton(universe: usize, x: usize) -> Self {
        Self::from_indices(universe, [x])
    }

    pub fn contains(&self, x: usize) -> bool {
        self.mask.get(x).copied().unwrap_or(false)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn universe(&self) -> usize {
        self.mask.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn intersection(&self, other: &Subset) -> Subset {
        Subset::from_mask(
            self.mask
                .iter()
                .zip(&other.mask)
                .map(|(&a, &b)| a && b)
                .collect(),
        )
    }

    pub fn is_subset_of(&self, other: &Subset) -> bool {
        self.mask.iter().zip(&other.mask).all(|(&a, &b)| !a || b)
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Whether `h` is a subgroup of `g`.
///
/// Grows a generating set greedily and closes it under right multiplication
/// by the generators; any product escaping `h` disproves closure. This costs
/// `O(|h| log^2 |h|)` instead of checking all pairs.
pub fn is_subgroup<G: FiniteGroup + ?Sized>(g: &G, h: &Subset) -> bool {
    if !h.contains(g.identity()) {
        return false;
    }
    let mut generators: Vec<usize> = Vec::new();
    let mut span = Subset::singleton(h.universe(), g.identity());
    while span.len() < h.len() {
        let next = h
            .iter()
            .find(|&x| !span.contains(x))
            .expect("span is strictly smaller than h");
        generators.push(next);
        let mut mask = vec![false; h.universe()];
        mask[g.identity()] = true;
        let mut queue = vec![g.identity()];
        while let Some(x) = queue.pop() {
            for &s in &generators {
                let y = g.op(x, s);
                if !h.contains(y) {
                    return false;
                }
                if !mask[y] {
                    mask[y] = true;
                    queue.push(y);
                }
            }
        }
        span = Subset::from_mask(mask);
    }
    true
}

/// An endomorphism of an [`AbelianGroup`] given by an `r x r` integer matrix.
/// Column `j` holds the image of the `j`-th canonical generator; row `i` is
/// reduced mod `m_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MatrixEndomorphism {
    group: AbelianGroup,
    entries: Vec<Vec<u64>>,
}

impl MatrixEndomorphism {
    /// Validates `a_ij * m_j = 0 (mod m_i)` for every entry.
    pub fn new(group: AbelianGroup, entries: Vec<Vec<i64>>) -> Result<Self> {
        let r = group.rank();
        if entries.len() != r {
            return Err(Error::DimensionMismatch {
                expected: r,
                found: entries.len(),
            });
        }
        let mut reduced = Vec::with_capacity(r);
        for (i, row) in entries.iter().enumerate() {
            if row.len() != r {
                return Err(Error::DimensionMismatch {
                    expected: r,
                    found: row.len(),
                });
            }
            let mi = group.orders[i];
            let mut out = Vec::with_capacity(r);
            for (j, &a) in row.iter().enumerate() {
                let a = reduce(a, mi);
                let mj = group.orders[j];
                if (u128::from(a) * u128::from(mj)) % u128::from(mi) != 0 {
                    return Err(Error::WellDefinednessViolation {
                        row: i + 1,
                        col: j + 1,
                    });
                }
                out.push(a);
            }
            reduced.push(out);
        }
        Ok(MatrixEndomorphism {
            group,
            entries: reduced,
        })
    }

    pub fn identity(group: AbelianGroup) -> Self {
        let r = group.rank();
        let entries = (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| u64::from(i == j) % group.orders[i])
                    .collect()
            })
            .collect();
        MatrixEndomorphism { group, entries }
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn entries(&self) -> &[Vec<u64>] {
        &self.entries
    }

    pub fn apply(&self, x: &GroupElement) -> Result<GroupElement> {
        if x.0.len() != self.group.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.group.rank(),
                found: x.0.len(),
            });
        }
        Ok(self.apply_unchecked(&x.0))
    }

    fn apply_unchecked(&self, x: &[u64]) -> GroupElement {
        GroupElement(
            self.entries
                .iter()
                .zip(&self.group.orders)
                .map(|(row, &m)| {
                    let s: u128 = row
                        .iter()
                        .zip(x)
                        .map(|(&a, &xj)| u128::from(a) * u128::from(xj))
                        .sum();
                    (s % u128::from(m)) as u64
                })
                .collect(),
        )
    }

    /// The image of every element, indexed like the carrier.
    pub fn image_table(&self) -> Vec<usize> {
        let g = &self.group;
        if g.rank() == 1 {
            let (m, a) = (g.orders[0], self.entries[0][0]);
            return (0..m)
                .map(|x| ((u128::from(a) * u128::from(x)) % u128::from(m)) as usize)
                .collect();
        }
        // Linear: the image of x is the sum of x_j copies of each column, so
        // walk the elements in index order and add one column per step.
        let columns: Vec<usize> = (0..g.rank())
            .map(|j| {
                let mut e = vec![0u64; g.rank()];
                e[j] = 1 % g.orders[j];
                g.index_of(&self.apply_unchecked(&e)).expect("rank matches")
            })
            .collect();
        let n = g.order();
        let mut images = vec![0usize; n];
        let mut digits = vec![0u64; g.rank()];
        let mut current = 0usize;
        for slot in images.iter_mut().skip(1) {
            // increment the mixed-radix counter, last coordinate fastest
            let mut j = g.rank() - 1;
            loop {
                digits[j] += 1;
                current = g.op(current, columns[j]);
                if digits[j] < g.orders[j] {
                    break;
                }
                digits[j] = 0;
                j -= 1;
            }
            *slot = current;
        }
        images
    }

    /// `self o other`.
    pub fn compose(&self, other: &MatrixEndomorphism) -> Result<MatrixEndomorphism> {
        if self.group != other.group {
            return Err(Error::DimensionMismatch {
                expected: self.group.rank(),
                found: other.group.rank(),
            });
        }
        let r = self.group.rank();
        let entries = (0..r)
            .map(|i| {
                let m = u128::from(self.group.orders[i]);
                (0..r)
                    .map(|j| {
                        let s: u128 = (0..r)
                            .map(|k| {
                                u128::from(self.entries[i][k]) * u128::from(other.entries[k][j])
                            })
                            .sum();
                        (s % m) as u64
                    })
                    .collect()
            })
            .collect();
        Ok(MatrixEndomorphism {
            group: self.group.clone(),
            entries,
        })
    }

    /// Block-diagonal sum acting on `self.group x other.group`.
    pub fn direct_sum(&self, other: &MatrixEndomorphism) -> Result<MatrixEndomorphism> {
        let group = self.group.product(&other.group)?;
        let (r1, r2) = (self.group.rank(), other.group.rank());
        let mut entries = vec![vec![0u64; r1 + r2]; r1 + r2];
        for i in 0..r1 {
            entries[i][..r1].copy_from_slice(&self.entries[i]);
        }
        for i in 0..r2 {
            entries[r1 + i][r1..].copy_from_slice(&other.entries[i]);
        }
        Ok(MatrixEndomorphism { group, entries })
    }

    pub(crate) fn entries_signed(&self) -> Vec<Vec<i64>> {
        self.entries
            .iter()
            .map(|row| row.iter().map(|&a| a as i64).collect())
            .collect()
    }
}

/// The stretch map `x -> a x` on `Z/n`.
pub fn stretch(n: u64, a: i64) -> Result<MatrixEndomorphism> {
    MatrixEndomorphism::new(AbelianGroup::cyclic(n)?, vec![vec![a]])
}

/// For each matrix position, the step between admissible entries
/// (`m_i / gcd(m_i, m_j)`) and how many there are (`gcd(m_i, m_j)`).
fn admissible_entries(group: &AbelianGroup) -> Vec<(u64, u64)> {
    let o = group.orders();
    o.iter()
        .flat_map(|&mi| o.iter().map(move |&mj| (mi / mi.gcd(&mj), mi.gcd(&mj))))
        .collect()
}

/// Number of endomorphisms of the group, `prod_{i,j} gcd(m_i, m_j)`.
pub fn endomorphism_count(group: &AbelianGroup) -> u128 {
    admissible_entries(group)
        .iter()
        .map(|&(_, c)| u128::from(c))
        .product()
}

fn endomorphism_from_index(
    group: &AbelianGroup,
    slots: &[(u64, u64)],
    mut idx: u128,
) -> MatrixEndomorphism {
    let r = group.rank();
    let mut entries = vec![vec![0u64; r]; r];
    for pos in (0..r * r).rev() {
        let (step, count) = slots[pos];
        let digit = (idx % u128::from(count)) as u64;
        idx /= u128::from(count);
        entries[pos / r][pos % r] = digit * step;
    }
    MatrixEndomorphism {
        group: group.clone(),
        entries,
    }
}

/// All endomorphisms when there are at most `budget` of them (in a fixed
/// lexicographic order); otherwise `budget` distinct ones drawn uniformly
/// with a generator seeded by `seed`.
pub fn enumerate_endomorphisms(
    group: &AbelianGroup,
    budget: usize,
    seed: u64,
) -> impl Iterator<Item = MatrixEndomorphism> + '_ {
    let slots = admissible_entries(group);
    let total = endomorphism_count(group);
    let indices: Box<dyn Iterator<Item = u128>> = if total <= budget as u128 {
        Box::new(0..total)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let picked: Vec<u128> = match usize::try_from(total) {
            Ok(len) => index::sample(&mut rng, len, budget)
                .into_iter()
                .map(|i| i as u128)
                .collect(),
            Err(_) => {
                let mut seen = HashSet::with_capacity(budget);
                let mut out = Vec::with_capacity(budget);
                while out.len() < budget {
                    let i = rng.gen_range(0..total);
                    if seen.insert(i) {
                        out.push(i);
                    }
                }
                out
            }
        };
        Box::new(picked.into_iter())
    };
    indices.map(move |i| endomorphism_from_index(group, &slots, i))
}

/// A finite group given by its Cayley table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableGroup {
    n: usize,
    table: Vec<usize>,
    identity: usize,
    inverses: Vec<usize>,
    labels: Vec<String>,
}

impl TableGroup {
    /// Validates a Cayley table: square, Latin, associative, with identity and
    /// inverses. Associativity is checked exhaustively (`O(n^3)`).
    pub fn from_cayley(rows: &[Vec<usize>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidTable("empty table".into()));
        }
        let mut table = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidTable(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            if let Some(&bad) = row.iter().find(|&&x| x >= n) {
                return Err(Error::InvalidTable(format!(
                    "row {i} refers to element {bad} outside 0..{n}"
                )));
            }
            table.extend_from_slice(row);
        }
        let group = Self::assemble(n, table, None)?;
        for a in 0..n {
            for b in 0..n {
                let ab = group.op(a, b);
                for c in 0..n {
                    if group.op(ab, c) != group.op(a, group.op(b, c)) {
                        return Err(Error::InvalidTable(format!(
                            "not associative at ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
        Ok(group)
    }

    /// Latin-square, identity and inverse checks, without associativity.
    fn assemble(n: usize, table: Vec<usize>, labels: Option<Vec<String>>) -> Result<Self> {
        let mut seen = vec![false; n];
        for i in 0..n {
            seen.iter_mut().for_each(|s| *s = false);
            for j in 0..n {
                let x = table[i * n + j];
                if std::mem::replace(&mut seen[x], true) {
                    return Err(Error::InvalidTable(format!("row {i} repeats {x}")));
                }
            }
            seen.iter_mut().for_each(|s| *s = false);
            for j in 0..n {
                let x = table[j * n + i];
                if std::mem::replace(&mut seen[x], true) {
                    return Err(Error::InvalidTable(format!("column {i} repeats {x}")));
                }
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e * n + x] == x && table[x * n + e] == x))
            .ok_or_else(|| Error::InvalidTable("no identity element".into()))?;
        let inverses = (0..n)
            .map(|a| {
                (0..n)
                    .find(|&b| table[a * n + b] == identity && table[b * n + a] == identity)
                    .ok_or_else(|| Error::InvalidTable(format!("{a} has no inverse")))
            })
            .collect::<Result<Vec<_>>>()?;
        let labels = labels.unwrap_or_else(|| (0..n).map(|i| i.to_string()).collect());
        Ok(TableGroup {
            n,
            table,
            identity,
            inverses,
            labels,
        })
    }

    /// Builds a table group from elements of a known group closed under a
    /// known law. Associativity is inherited, so only the cheap checks run.
    pub(crate) fn from_closed_law<T, F>(elements: &[T], law: F, labels: Vec<String>) -> Self
    where
        T: PartialEq,
        F: Fn(&T, &T) -> T,
    {
        let n = elements.len();
        let mut table = Vec::with_capacity(n * n);
        for a in elements {
            for b in elements {
                let c = law(a, b);
                let idx = elements
                    .iter()
                    .position(|x| *x == c)
                    .expect("element set is closed under the law");
                table.push(idx);
            }
        }
        Self::assemble(n, table, Some(labels)).expect("law defines a group")
    }

    /// Subgroup of `g` on the listed indices (ascending), relabelled
    /// `0..len`. The caller guarantees closure.
    pub(crate) fn subgroup_of<G: FiniteGroup + ?Sized>(
        g: &G,
        members: &[usize],
        labels: Vec<String>,
    ) -> Self {
        let mut position = vec![usize::MAX; g.order()];
        for (i, &m) in members.iter().enumerate() {
            position[m] = i;
        }
        let k = members.len();
        let mut table = Vec::with_capacity(k * k);
        for &a in members {
            for &b in members {
                table.push(position[g.op(a, b)]);
            }
        }
        Self::assemble(k, table, Some(labels)).expect("closed subset of a group")
    }

    /// Direct product, pairs `(a, b)` indexed `a * |other| + b`.
    pub fn product(&self, other: &TableGroup) -> Result<TableGroup> {
        let n = self.n as u64 * other.n as u64;
        if n > MAX_ORDER || n * n > (1 << 28) {
            return Err(Error::TooLarge(u128::from(n)));
        }
        let (n1, n2) = (self.n, other.n);
        let n = n1 * n2;
        let mut table = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                let a = self.op(x / n2, y / n2);
                let b = other.op(x % n2, y % n2);
                table.push(a * n2 + b);
            }
        }
        let labels = (0..n)
            .map(|x| format!("({},{})", self.labels[x / n2], other.labels[x % n2]))
            .collect();
        Self::assemble(n, table, Some(labels))
    }

    pub fn cayley_rows(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.n).map(<[usize]>::to_vec).collect()
    }

    pub fn is_commutative(&self) -> bool {
        (0..self.n).all(|a| (0..self.n).all(|b| self.op(a, b) == self.op(b, a)))
    }

    /// Elements commuting with everything.
    pub fn center(&self) -> Vec<usize> {
        (0..self.n)
            .filter(|&z| (0..self.n).all(|g| self.op(z, g) == self.op(g, z)))
            .collect()
    }
}

impl FiniteGroup for TableGroup {
    fn order(&self) -> usize {
        self.n
    }

    fn identity(&self) -> usize {
        self.identity
    }

    fn op(&self, a: usize, b: usize) -> usize {
        self.table[a * self.n + b]
    }

    fn inverse(&self, a: usize) -> usize {
        self.inverses[a]
    }

    fn is_abelian_carrier(&self) -> bool {
        false
    }

    fn label(&self, a: usize) -> String {
        self.labels[a].clone()
    }
}

fn permutation_label(p: &[usize; 3]) -> String {
    // cycle notation on {1,2,3}
    match p {
        [0, 1, 2] => "e".into(),
        [1, 0, 2] => "(1 2)".into(),
        [2, 1, 0] => "(1 3)".into(),
        [0, 2, 1] => "(2 3)".into(),
        [1, 2, 0] => "(1 2 3)".into(),
        [2, 0, 1] => "(1 3 2)".into(),
        _ => unreachable!("not a permutation of three points"),
    }
}

fn symmetric3() -> TableGroup {
    // identity first, then the three transpositions, then the 3-cycles
    let elements: [[usize; 3]; 6] = [
        [0, 1, 2],
        [1, 0, 2],
        [2, 1, 0],
        [0, 2, 1],
        [1, 2, 0],
        [2, 0, 1],
    ];
    let labels = elements.iter().map(permutation_label).collect();
    TableGroup::from_closed_law(&elements, |p, q| [p[q[0]], p[q[1]], p[q[2]]], labels)
}

fn dihedral4() -> TableGroup {
    // r^i s^j, with s r s = r^-1
    let elements: Vec<(u8, u8)> = (0..2).flat_map(|j| (0..4).map(move |i| (i, j))).collect();
    let labels = elements
        .iter()
        .map(|&(i, j)| match (i, j) {
            (0, 0) => "e".to_string(),
            (i, 0) => format!("r{i}"),
            (0, _) => "s".to_string(),
            (i, _) => format!("r{i}s"),
        })
        .collect();
    TableGroup::from_closed_law(
        &elements,
        |&(a, b), &(c, d)| {
            let turn = if b == 0 { c } else { (4 - c) % 4 };
            ((a + turn) % 4, (b + d) % 2)
        },
        labels,
    )
}

fn quaternion8() -> TableGroup {
    // (negated, unit) with unit 0..4 = 1, i, j, k
    const UNIT_PRODUCT: [[(bool, u8); 4]; 4] = [
        [(false, 0), (false, 1), (false, 2), (false, 3)],
        [(false, 1), (true, 0), (false, 3), (true, 2)],
        [(false, 2), (true, 3), (true, 0), (false, 1)],
        [(false, 3), (false, 2), (true, 1), (true, 0)],
    ];
    let elements: Vec<(bool, u8)> = [false, true]
        .into_iter()
        .flat_map(|neg| (0..4).map(move |u| (neg, u)))
        .collect();
    let labels = elements
        .iter()
        .map(|&(neg, u)| {
            format!(
                "{}{}",
                if neg { "-" } else { "" },
                ["1", "i", "j", "k"][u as usize]
            )
        })
        .collect();
    TableGroup::from_closed_law(
        &elements,
        |&(n1, u1), &(n2, u2)| {
            let (n3, u3) = UNIT_PRODUCT[u1 as usize][u2 as usize];
            (n1 ^ n2 ^ n3, u3)
        },
        labels,
    )
}

/// One of the built-in nonabelian groups `S3`, `D4`, `Q8`.
pub fn builtin_table_group(name: &str) -> Result<TableGroup> {
    match name.to_ascii_uppercase().as_str() {
        "S3" => Ok(symmetric3()),
        "D4" => Ok(dihedral4()),
        "Q8" => Ok(quaternion8()),
        _ => Err(Error::UnknownGroup(name.to_string())),
    }
}

/// An endomorphism of a [`TableGroup`] given by its image array.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TableEndomorphism {
    images: Vec<usize>,
}

impl TableEndomorphism {
    /// Checks `f(xy) = f(x) f(y)` over all pairs.
    pub fn new(group: &TableGroup, images: Vec<usize>) -> Result<Self> {
        let n = group.order();
        if images.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: images.len(),
            });
        }
        if let Some(&bad) = images.iter().find(|&&x| x >= n) {
            return Err(Error::Spec(format!("image {bad} is not an element index")));
        }
        for x in 0..n {
            for y in 0..n {
                if images[group.op(x, y)] != group.op(images[x], images[y]) {
                    return Err(Error::HomomorphismViolation { x, y });
                }
            }
        }
        Ok(TableEndomorphism { images })
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub(crate) fn from_trusted(images: Vec<usize>) -> Self {
        TableEndomorphism { images }
    }
}

/// Every endomorphism of a table group, found by choosing images for a
/// generating set and extending along words in the generators.
pub fn all_table_endomorphisms(group: &TableGroup) -> Vec<TableEndomorphism> {
    let n = group.order();
    let e = group.identity();
    // greedy generating set
    let mut generators = Vec::new();
    let mut span = vec![false; n];
    span[e] = true;
    let close = |span: &mut Vec<bool>| loop {
        let members: Vec<usize> = (0..n).filter(|&x| span[x]).collect();
        let mut grew = false;
        for &a in &members {
            for &b in &members {
                let c = group.op(a, b);
                if !span[c] {
                    span[c] = true;
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
    };
    for x in 0..n {
        if !span[x] {
            generators.push(x);
            span[x] = true;
            close(&mut span);
        }
    }

    let mut out = Vec::new();
    let mut choice = vec![0usize; generators.len()];
    loop {
        if let Some(images) = extend_on_generators(group, &generators, &choice) {
            if let Ok(f) = TableEndomorphism::new(group, images) {
                out.push(f);
            }
        }
        // next tuple of generator images
        let mut i = 0;
        loop {
            if i == choice.len() {
                return out;
            }
            choice[i] += 1;
            if choice[i] < n {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

fn extend_on_generators(
    group: &TableGroup,
    generators: &[usize],
    images_of_generators: &[usize],
) -> Option<Vec<usize>> {
    let n = group.order();
    let mut f = vec![usize::MAX; n];
    f[group.identity()] = group.identity();
    let mut queue = vec![group.identity()];
    while let Some(x) = queue.pop() {
        for (&g, &fg) in generators.iter().zip(images_of_generators) {
            let y = group.op(x, g);
            let fy = group.op(f[x], fg);
            if f[y] == usize::MAX {
                f[y] = fy;
                queue.push(y);
            } else if f[y] != fy {
                return None;
            }
        }
    }
    Some(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_examples() {
        assert_eq!(make_cyclic(1).unwrap().orders(), &[1]);
        assert_eq!(make_cyclic(12).unwrap().orders(), &[12]);
        assert_eq!(make_cyclic(8).unwrap().orders(), &[8]);
        assert_eq!(make_cyclic(0), Err(Error::Zero));
        assert_eq!(AbelianGroup::new(vec![]).unwrap().orders(), &[1]);
    }

    #[test]
    fn stretch_examples() {
        let zero = stretch(5, 0).unwrap();
        assert!(zero.image_table().iter().all(|&y| y == 0));
        let id = stretch(5, 1).unwrap();
        assert_eq!(id.image_table(), vec![0, 1, 2, 3, 4]);
        let four = stretch(12, 4).unwrap();
        let t = four.image_table();
        assert_eq!((t[3], t[5]), (0, 8));
        assert_eq!(stretch(7, -1).unwrap().entries(), &[vec![6]]);
    }

    #[test]
    fn matrix_validation() {
        let g = AbelianGroup::new(vec![4, 2]).unwrap();
        assert!(MatrixEndomorphism::new(g.clone(), vec![vec![0, 2], vec![0, 0]]).is_ok());
        assert_eq!(
            MatrixEndomorphism::new(g.clone(), vec![vec![0, 1], vec![0, 0]]),
            Err(Error::WellDefinednessViolation { row: 1, col: 2 })
        );
        assert!(matches!(
            MatrixEndomorphism::new(g, vec![vec![0, 1]]),
            Err(Error::DimensionMismatch { .. })
        ));
        for a in -20..20 {
            assert!(
                MatrixEndomorphism::new(AbelianGroup::cyclic(9).unwrap(), vec![vec![a]]).is_ok()
            );
        }
    }

    #[test]
    fn apply_examples() {
        let g = AbelianGroup::new(vec![4, 2]).unwrap();
        let id = MatrixEndomorphism::identity(g.clone());
        let x = GroupElement(vec![3, 1]);
        assert_eq!(id.apply(&x).unwrap(), x);
        let phi = MatrixEndomorphism::new(g, vec![vec![0, 2], vec![0, 0]]).unwrap();
        assert_eq!(
            phi.apply(&GroupElement(vec![0, 1])).unwrap(),
            GroupElement(vec![2, 0])
        );
        assert_eq!(
            stretch(12, 4)
                .unwrap()
                .apply(&GroupElement(vec![3]))
                .unwrap(),
            GroupElement(vec![0])
        );
        assert!(phi.apply(&GroupElement(vec![1])).is_err());
    }

    #[test]
    fn image_table_matches_apply() {
        let g = AbelianGroup::new(vec![4, 6, 3]).unwrap();
        for phi in enumerate_endomorphisms(&g, 50, 7) {
            let table = phi.image_table();
            for (x, &y) in table.iter().enumerate() {
                let direct = phi.apply(&g.element(x)).unwrap();
                assert_eq!(g.index_of(&direct).unwrap(), y);
            }
        }
    }

    #[test]
    fn enumeration_examples() {
        let count = |orders: Vec<u64>| {
            let g = AbelianGroup::new(orders).unwrap();
            enumerate_endomorphisms(&g, 100, 0).count()
        };
        assert_eq!(count(vec![2]), 2);
        assert_eq!(count(vec![4]), 4);
        assert_eq!(count(vec![2, 2]), 16);
    }

    /// Scan every integer matrix with entries in `0..m_i` and keep the valid ones.
    fn brute_force_endomorphism_count(g: &AbelianGroup) -> usize {
        let r = g.rank();
        let o = g.orders();
        let mut count = 0;
        let total: u64 = (0..r * r).map(|p| o[p / r]).product();
        for mut idx in 0..total {
            let mut entries = vec![vec![0i64; r]; r];
            for p in 0..r * r {
                entries[p / r][p % r] = (idx % o[p / r]) as i64;
                idx /= o[p / r];
            }
            if MatrixEndomorphism::new(g.clone(), entries).is_ok() {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn exhaustive_enumeration_matches_brute_force() {
        for g in abelian_groups_up_to(32, 3) {
            let listed: Vec<_> = enumerate_endomorphisms(&g, usize::MAX, 0).collect();
            assert_eq!(
                listed.len(),
                brute_force_endomorphism_count(&g),
                "{:?}",
                g.orders()
            );
            let distinct: HashSet<_> = listed.iter().collect();
            assert_eq!(distinct.len(), listed.len());
        }
    }

    #[test]
    fn sampling_is_seeded_and_distinct() {
        let g = AbelianGroup::new(vec![6, 12]).unwrap();
        let a: Vec<_> = enumerate_endomorphisms(&g, 40, 3).collect();
        let b: Vec<_> = enumerate_endomorphisms(&g, 40, 3).collect();
        assert_eq!(a, b);
        assert_eq!(a.len(), 40);
        assert_eq!(a.iter().collect::<HashSet<_>>().len(), 40);
    }

    #[test]
    fn group_law_and_composition() {
        for g in abelian_groups_up_to(64, 3) {
            for phi in enumerate_endomorphisms(&g, 12, 1) {
                let t = phi.image_table();
                for x in 0..g.order() {
                    for y in 0..g.order() {
                        assert_eq!(t[g.op(x, y)], g.op(t[x], t[y]));
                    }
                }
                for psi in enumerate_endomorphisms(&g, 4, 2) {
                    let composed = phi.compose(&psi).unwrap().image_table();
                    let u = psi.image_table();
                    assert!((0..g.order()).all(|x| composed[x] == t[u[x]]));
                }
            }
        }
    }

    #[test]
    fn invariant_factor_listing() {
        let groups = abelian_groups_up_to(16, 3);
        let tuples: Vec<Vec<u64>> = groups.iter().map(|g| g.orders().to_vec()).collect();
        assert!(tuples.contains(&vec![1]));
        assert!(tuples.contains(&vec![2, 2, 4]));
        assert!(tuples.contains(&vec![4, 4]));
        assert!(!tuples.contains(&vec![2, 2, 2, 2]));
        assert!(!tuples.contains(&vec![4, 2]));
        // order 16: (16), (2,8), (4,4), (2,2,4); (2,2,2,2) needs four factors
        let sixteen = tuples
            .iter()
            .filter(|t| t.iter().product::<u64>() == 16)
            .count();
        assert_eq!(sixteen, 4);
    }

    #[test]
    fn subgroup_detection_matches_pairwise_closure() {
        let g = AbelianGroup::new(vec![2, 6]).unwrap();
        let s3 = builtin_table_group("S3").unwrap();
        let pairwise = |grp: &dyn FiniteGroup, h: &Subset| {
            h.contains(grp.identity())
                && h.iter().all(|x| h.iter().all(|y| h.contains(grp.op(x, y))))
        };
        for code in 0u32..(1 << 12) {
            let h = Subset::from_indices(12, (0..12).filter(|i| code >> i & 1 == 1));
            assert_eq!(is_subgroup(&g, &h), pairwise(&g, &h), "{h:?}");
        }
        for code in 0u32..(1 << 6) {
            let h = Subset::from_indices(6, (0..6).filter(|i| code >> i & 1 == 1));
            assert_eq!(is_subgroup(&s3, &h), pairwise(&s3, &h), "{h:?}");
        }
    }

    #[test]
    fn builtins() {
        let s3 = builtin_table_group("S3").unwrap();
        assert_eq!(s3.order(), 6);
        assert!(!s3.is_commutative());
        let q8 = builtin_table_group("Q8").unwrap();
        assert_eq!(q8.order(), 8);
        assert_eq!((0..8).filter(|&x| q8.element_order(x) == 2).count(), 1);
        let d4 = builtin_table_group("d4").unwrap();
        assert_eq!(d4.order(), 8);
        assert_eq!(d4.center().len(), 2);
        assert_eq!(
            builtin_table_group("A5"),
            Err(Error::UnknownGroup("A5".into()))
        );
        for g in [&s3, &q8, &d4] {
            assert!(TableGroup::from_cayley(&g.cayley_rows()).is_ok());
        }
    }

    #[test]
    fn cayley_validation_rejects() {
        assert!(TableGroup::from_cayley(&[vec![0, 1], vec![1, 1]]).is_err());
        assert!(TableGroup::from_cayley(&[vec![0, 1]]).is_err());
        assert!(TableGroup::from_cayley(&[vec![0, 2], vec![1, 0]]).is_err());
        // a Latin square with identity 0 that is not associative
        let loop5 = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(matches!(
            TableGroup::from_cayley(&loop5),
            Err(Error::InvalidTable(msg)) if msg.contains("associative")
        ));
    }

    #[test]
    fn table_endomorphism_examples() {
        let s3 = builtin_table_group("S3").unwrap();
        assert!(TableEndomorphism::new(&s3, vec![0; 6]).is_ok());
        // transpositions are indices 1..=3, 3-cycles 4 and 5
        let sign = vec![0, 1, 1, 1, 0, 0];
        assert!(TableEndomorphism::new(&s3, sign).is_ok());
        let bad = vec![0, 1, 1, 1, 1, 0];
        assert!(matches!(
            TableEndomorphism::new(&s3, bad),
            Err(Error::HomomorphismViolation { .. })
        ));
    }

    #[test]
    fn table_endomorphism_counts() {
        let s3 = builtin_table_group("S3").unwrap();
        let all = all_table_endomorphisms(&s3);
        let mut brute = 0;
        for code in 0..6usize.pow(6) {
            let images: Vec<usize> = (0..6).map(|i| (code / 6usize.pow(i)) % 6).collect();
            if TableEndomorphism::new(&s3, images).is_ok() {
                brute += 1;
            }
        }
        assert_eq!(all.len(), brute);
        for g in ["S3", "D4", "Q8"] {
            let g = builtin_table_group(g).unwrap();
            for f in all_table_endomorphisms(&g) {
                assert_eq!(f.images()[g.identity()], g.identity());
                for x in 0..g.order() {
                    assert_eq!(g.element_order(x) % g.element_order(f.images()[x]), 0);
                }
            }
        }
    }
}
