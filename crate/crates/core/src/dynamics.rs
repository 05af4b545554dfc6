//! Finite dynamical groups: a finite group together with one of its
//! endomorphisms, iterated as a dynamical system.
//!
//! This module computes the ascending chain of iterated kernels
//! `ker^(m) = phi^-m({1})`, the descending chain of images `im(phi^n)`, and
//! their stable values, the nilpotent part `nil(phi)` and the periodic part
//! `per(phi)`. [`Fdg::fitting_check`] certifies the decomposition
//! `G = nil(phi) x| per(phi)` through three facts: the orders multiply to
//! `|G|`, the parts meet only in the identity, and (for nonabelian carriers)
//! `nil(phi)` is normal.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{
    is_subgroup, AbelianGroup, FiniteGroup, MatrixEndomorphism, Subset, TableEndomorphism,
    TableGroup,
};

/// The group underlying an [`Fdg`].
#[derive(Debug, Clone)]
pub enum Carrier {
    Abelian(AbelianGroup),
    Table(TableGroup),
}

impl FiniteGroup for Carrier {
    fn order(&self) -> usize {
        match self {
            Carrier::Abelian(g) => g.order(),
            Carrier::Table(g) => g.order(),
        }
    }

    fn identity(&self) -> usize {
        match self {
            Carrier::Abelian(g) => g.identity(),
            Carrier::Table(g) => g.identity(),
        }
    }

    fn op(&self, a: usize, b: usize) -> usize {
        match self {
            Carrier::Abelian(g) => g.op(a, b),
            Carrier::Table(g) => g.op(a, b),
        }
    }

    fn inverse(&self, a: usize) -> usize {
        match self {
            Carrier::Abelian(g) => g.inverse(a),
            Carrier::Table(g) => g.inverse(a),
        }
    }

    fn is_abelian_carrier(&self) -> bool {
        matches!(self, Carrier::Abelian(_))
    }

    fn label(&self, a: usize) -> String {
        match self {
            Carrier::Abelian(g) => g.label(a),
            Carrier::Table(g) => g.label(a),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Endomorphism {
    Matrix(MatrixEndomorphism),
    Table(TableEndomorphism),
}

/// A finite dynamical group `(G, phi)`.
///
/// The image of every element is cached at construction, so iteration is a
/// table lookup.
#[derive(Debug, Clone)]
pub struct Fdg {
    carrier: Carrier,
    endomorphism: Endomorphism,
    images: Vec<usize>,
}

/// Result of [`Fdg::fitting_check`]. Every flag is expected to be true.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FittingReport {
    pub nil_order: usize,
    pub per_order: usize,
    /// `m*`: first `m` with `ker^(m) = ker^(m+1)`.
    pub stabilization_index_kernel: usize,
    /// `n*`: first `n` with `im(phi^n) = im(phi^(n+1))`.
    pub stabilization_index_image: usize,
    pub product_ok: bool,
    pub intersection_trivial: bool,
    pub per_restriction_bijective: bool,
    pub nil_restriction_nilpotent: bool,
    /// Every member of both chains is a subgroup.
    pub chains_are_subgroups: bool,
    /// Conjugation invariance of `nil(phi)`; only checked for table carriers.
    pub nil_normal: Option<bool>,
}

impl FittingReport {
    pub fn passed(&self) -> bool {
        self.product_ok
            && self.intersection_trivial
            && self.per_restriction_bijective
            && self.nil_restriction_nilpotent
            && self.chains_are_subgroups
            && self.nil_normal.unwrap_or(true)
    }
}

impl Fdg {
    pub fn from_matrix(phi: MatrixEndomorphism) -> Fdg {
        let images = phi.image_table();
        Fdg {
            carrier: Carrier::Abelian(phi.group().clone()),
            endomorphism: Endomorphism::Matrix(phi),
            images,
        }
    }

    pub fn from_table(group: TableGroup, f: TableEndomorphism) -> Result<Fdg> {
        if f.images().len() != group.order() {
            return Err(Error::DimensionMismatch {
                expected: group.order(),
                found: f.images().len(),
            });
        }
        let images = f.images().to_vec();
        Ok(Fdg {
            carrier: Carrier::Table(group),
            endomorphism: Endomorphism::Table(f),
            images,
        })
    }

    /// `(Z/n, x -> a x)`.
    pub fn stretch(n: u64, a: i64) -> Result<Fdg> {
        Ok(Fdg::from_matrix(crate::group::stretch(n, a)?))
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn endomorphism(&self) -> &Endomorphism {
        &self.endomorphism
    }

    pub fn order(&self) -> usize {
        self.images.len()
    }

    pub fn identity(&self) -> usize {
        self.carrier.identity()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    pub fn iterate(&self, mut x: usize, times: usize) -> usize {
        for _ in 0..times {
            x = self.images[x];
        }
        x
    }

    /// `[ker^(0), ..., ker^(m*)]`, ending at the first member equal to its
    /// successor.
    pub fn kernel_chain(&self) -> Vec<Subset> {
        let n = self.order();
        let mut chain = vec![Subset::singleton(n, self.identity())];
        loop {
            let last = chain.last().expect("chain is never empty");
            let next = Subset::from_mask(self.images.iter().map(|&y| last.contains(y)).collect());
            if next == *last {
                return chain;
            }
            chain.push(next);
        }
    }

    /// `[im(phi^0), ..., im(phi^n*)]`, ending at the first member equal to
    /// its successor.
    pub fn image_chain(&self) -> Vec<Subset> {
        let n = self.order();
        let mut chain = vec![Subset::full(n)];
        loop {
            let last = chain.last().expect("chain is never empty");
            let next = Subset::from_indices(n, last.iter().map(|x| self.images[x]));
            if next == *last {
                return chain;
            }
            chain.push(next);
        }
    }

    pub fn nil_part(&self) -> Subset {
        self.kernel_chain().pop().expect("chain is never empty")
    }

    pub fn per_part(&self) -> Subset {
        self.image_chain().pop().expect("chain is never empty")
    }

    pub fn fitting_check(&self) -> FittingReport {
        let kernels = self.kernel_chain();
        let images = self.image_chain();
        let nil = kernels.last().expect("chain is never empty");
        let per = images.last().expect("chain is never empty");
        let e = self.identity();

        let product_ok = nil.len() * per.len() == self.order();
        let intersection_trivial = {
            let meet = nil.intersection(per);
            meet.len() == 1 && meet.contains(e)
        };
        let per_restriction_bijective = {
            let mut hit = vec![false; self.order()];
            per.iter().all(|x| {
                let y = self.images[x];
                per.contains(y) && !std::mem::replace(&mut hit[y], true)
            })
        };
        let nil_restriction_nilpotent = nil.iter().all(|x| {
            let mut y = x;
            let mut steps = 0;
            while y != e && steps < nil.len() {
                y = self.images[y];
                steps += 1;
            }
            y == e && nil.contains(self.images[x])
        });
        let chains_are_subgroups = kernels
            .iter()
            .chain(&images)
            .all(|h| is_subgroup(&self.carrier, h));
        let nil_normal = match &self.carrier {
            Carrier::Abelian(_) => None,
            Carrier::Table(g) => Some((0..g.order()).all(|c| {
                let c_inv = g.inverse(c);
                nil.iter().all(|x| nil.contains(g.op(g.op(c, x), c_inv)))
            })),
        };

        FittingReport {
            nil_order: nil.len(),
            per_order: per.len(),
            stabilization_index_kernel: kernels.len() - 1,
            stabilization_index_image: images.len() - 1,
            product_ok,
            intersection_trivial,
            per_restriction_bijective,
            nil_restriction_nilpotent,
            chains_are_subgroups,
            nil_normal,
        }
    }

    /// Walks the orbit of `x` until it repeats; returns (steps before the
    /// cycle, cycle length).
    fn orbit_shape(&self, x: usize) -> (usize, usize) {
        let mut first_seen = HashMap::new();
        let mut y = x;
        let mut step = 0usize;
        loop {
            if let Some(&s) = first_seen.get(&y) {
                return (s, step - s);
            }
            first_seen.insert(y, step);
            y = self.images[y];
            step += 1;
        }
    }

    /// Steps needed to reach a periodic point (0 when `x` is periodic).
    pub fn height(&self, x: usize) -> usize {
        self.orbit_shape(x).0
    }

    /// Least `n >= 1` with `phi^n(x) = x`, or `None` for transient `x`.
    pub fn period(&self, x: usize) -> Option<usize> {
        match self.orbit_shape(x) {
            (0, len) => Some(len),
            _ => None,
        }
    }

    /// `|per_n(phi)|`: periodic points whose period divides `n`.
    pub fn per_n_order(&self, n: usize) -> Result<usize> {
        if n == 0 {
            return Err(Error::Zero);
        }
        let per = self.per_part();
        let mut period = vec![0usize; self.order()];
        for x in per.iter() {
            if period[x] != 0 {
                continue;
            }
            let mut cycle = vec![x];
            let mut y = self.images[x];
            while y != x {
                cycle.push(y);
                y = self.images[y];
            }
            for &c in &cycle {
                period[c] = cycle.len();
            }
        }
        Ok(per.iter().filter(|&x| n % period[x] == 0).count())
    }

    /// The product system on `G_1 x G_2`, with `self` in the leading
    /// coordinates.
    pub fn product(&self, other: &Fdg) -> Result<Fdg> {
        match (&self.endomorphism, &other.endomorphism) {
            (Endomorphism::Matrix(a), Endomorphism::Matrix(b)) => {
                Ok(Fdg::from_matrix(a.direct_sum(b)?))
            }
            (Endomorphism::Table(_), Endomorphism::Table(_)) => {
                let (Carrier::Table(g1), Carrier::Table(g2)) = (&self.carrier, &other.carrier)
                else {
                    unreachable!("table endomorphisms live on table carriers");
                };
                let group = g1.product(g2)?;
                let n2 = g2.order();
                let images = (0..group.order())
                    .map(|x| self.images[x / n2] * n2 + other.images[x % n2])
                    .collect();
                Fdg::from_table(group, TableEndomorphism::from_trusted(images))
            }
            _ => Err(Error::MixedKinds),
        }
    }

    /// The restriction of `phi` to an invariant subgroup, as a table-backed
    /// system whose elements are the members of `h` in ascending order.
    pub fn restrict(&self, h: &Subset) -> Result<Fdg> {
        if h.universe() != self.order()
            || !is_subgroup(&self.carrier, h)
            || h.iter().any(|x| !h.contains(self.images[x]))
        {
            return Err(Error::NotInvariantSubgroup);
        }
        let members = h.to_vec();
        let mut position = vec![usize::MAX; self.order()];
        for (i, &m) in members.iter().enumerate() {
            position[m] = i;
        }
        let labels = members.iter().map(|&m| self.carrier.label(m)).collect();
        let group = TableGroup::subgroup_of(&self.carrier, &members, labels);
        let images = members.iter().map(|&m| position[self.images[m]]).collect();
        Fdg::from_table(group, TableEndomorphism::from_trusted(images))
    }
}

/// `a x b` for two systems of the same kind.
pub fn fds_product(first: &Fdg, second: &Fdg) -> Result<Fdg> {
    first.product(second)
}

/// Periodic points found with Floyd's tortoise and hare, without reference
/// to the image chain.
///
/// Each search stops as soon as it reaches an already classified vertex, so
/// every cycle is walked once and the total cost is linear.
pub fn periodic_points_floyd(fdg: &Fdg) -> Subset {
    const UNKNOWN: u8 = 0;
    const PERIODIC: u8 = 1;
    const TRANSIENT: u8 = 2;
    let f = |x: usize| fdg.apply(x);
    let n = fdg.order();
    let mut state = vec![UNKNOWN; n];
    for x in 0..n {
        if state[x] != UNKNOWN {
            continue;
        }
        let (mut slow, mut fast) = (x, x);
        let new_cycle = loop {
            slow = f(slow);
            let mid = f(fast);
            fast = f(mid);
            if state[mid] != UNKNOWN || state[fast] != UNKNOWN {
                break false;
            }
            if slow == fast {
                break true;
            }
        };
        if new_cycle {
            let mut y = slow;
            loop {
                state[y] = PERIODIC;
                y = f(y);
                if y == slow {
                    break;
                }
            }
        }
        // whatever on x's path is still unknown lies before a cycle
        let mut y = x;
        while state[y] == UNKNOWN {
            state[y] = TRANSIENT;
            y = f(y);
        }
    }
    Subset::from_mask(state.into_iter().map(|s| s == PERIODIC).collect())
}
