//! State spaces as functional graphs.
//!
//! A [`StateSpace`] stores the successor map `x -> f(x)` together with the
//! reversed adjacency (the dual digraph, where the children of `v` are its
//! preimages). On top of that it provides
//!
//! * successor generations and procreation behaviors in the dual graph,
//! * the rigid-procreation check (fast, plus a naive reference version),
//! * the cycle multiset of the periodic part,
//! * [`CanonicalInvariant`]: identity behavior plus cycle multiset, which
//!   classifies state spaces of group endomorphisms,
//! * [`CanonicalForm`]: an AHU-style canonization valid for every functional
//!   graph, used as an independent isomorphism oracle.

use std::cmp::Ordering;
use std::fmt::{self, Write as _};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::dynamics::Fdg;
use crate::error::{Error, Result};
use crate::group::FiniteGroup;

/// Number of successor generations of a vertex in the dual graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generations {
    Finite(usize),
    /// Periodic vertices: a dual path may wind around the cycle forever.
    Infinite,
}

impl Generations {
    pub fn at_least(self, k: usize) -> bool {
        match self {
            Generations::Finite(g) => g >= k,
            Generations::Infinite => true,
        }
    }

    fn capped(self, cap: usize) -> usize {
        match self {
            Generations::Finite(g) => g.min(cap),
            Generations::Infinite => cap,
        }
    }
}

/// A functional graph with its dual adjacency.
#[derive(Debug, Clone)]
pub struct StateSpace {
    succ: Vec<usize>,
    child_offsets: Vec<usize>,
    children: Vec<usize>,
    labels: Option<Vec<String>>,
    periodic: Vec<bool>,
    generations: Vec<Generations>,
    /// Transient vertices, every vertex after all of its preimages.
    peel_order: Vec<usize>,
}

impl StateSpace {
    /// Builds the state space of an arbitrary endofunction of `0..n`.
    pub fn from_successors(succ: Vec<usize>) -> Result<StateSpace> {
        let n = succ.len();
        if let Some(&bad) = succ.iter().find(|&&y| y >= n) {
            return Err(Error::Spec(format!(
                "successor {bad} is not a vertex of 0..{n}"
            )));
        }
        // dual adjacency in compressed form
        let mut child_offsets = vec![0usize; n + 1];
        for &y in &succ {
            child_offsets[y + 1] += 1;
        }
        for i in 0..n {
            child_offsets[i + 1] += child_offsets[i];
        }
        let mut fill = child_offsets.clone();
        let mut children = vec![0usize; n];
        for (x, &y) in succ.iter().enumerate() {
            children[fill[y]] = x;
            fill[y] += 1;
        }

        // peel vertices of in-degree 0; what survives lies on cycles
        let mut indegree: Vec<usize> = (0..n)
            .map(|v| child_offsets[v + 1] - child_offsets[v])
            .collect();
        let mut peel_order: Vec<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
        let mut head = 0;
        while head < peel_order.len() {
            let y = succ[peel_order[head]];
            head += 1;
            indegree[y] -= 1;
            if indegree[y] == 0 {
                peel_order.push(y);
            }
        }
        let mut periodic = vec![true; n];
        for &v in &peel_order {
            periodic[v] = false;
        }
        let mut generations = vec![Generations::Infinite; n];
        let mut depth = vec![0usize; n];
        for &v in &peel_order {
            generations[v] = Generations::Finite(depth[v]);
            let y = succ[v];
            if !periodic[y] {
                depth[y] = depth[y].max(depth[v] + 1);
            }
        }

        Ok(StateSpace {
            succ,
            child_offsets,
            children,
            labels: None,
            periodic,
            generations,
            peel_order,
        })
    }

    /// `Gamma_phi`: an edge from every element to its image.
    pub fn from_fdg(fdg: &Fdg) -> StateSpace {
        let mut s = Self::from_successors(fdg.images().to_vec())
            .expect("images of an endomorphism are elements");
        s.labels = Some((0..fdg.order()).map(|x| fdg.carrier().label(x)).collect());
        s
    }

    pub fn vertex_count(&self) -> usize {
        self.succ.len()
    }

    pub fn successor(&self, v: usize) -> usize {
        self.succ[v]
    }

    pub fn successors(&self) -> &[usize] {
        &self.succ
    }

    /// Children of `v` in the dual graph, i.e. the preimages of `v`.
    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[self.child_offsets[v]..self.child_offsets[v + 1]]
    }

    pub fn is_periodic(&self, v: usize) -> bool {
        self.periodic[v]
    }

    pub fn periodic_count(&self) -> usize {
        self.periodic.iter().filter(|&&p| p).count()
    }

    pub fn label(&self, v: usize) -> Option<&str> {
        self.labels.as_ref().map(|l| l[v].as_str())
    }

    /// Length of the longest dual path starting at `v`.
    pub fn generations(&self, v: usize) -> Generations {
        self.generations[v]
    }

    /// `(a_1, ..., a_n)` for `v`, where `a_k` counts children with at least
    /// `k - 1` successor generations.
    pub fn procreation_behavior(&self, v: usize, n: usize) -> Result<Vec<u64>> {
        if !self.generations[v].at_least(n) {
            return Err(Error::InsufficientGenerations {
                vertex: v,
                available: self.generations[v].capped(usize::MAX),
                requested: n,
            });
        }
        Ok(self.behavior_prefix(v, n))
    }

    fn behavior_prefix(&self, v: usize, n: usize) -> Vec<u64> {
        let mut counts = vec![0u64; n];
        for &c in self.children(v) {
            // c contributes to a_1 .. a_{g+1}
            let reach = self.generations[c].capped(n.saturating_sub(1)) + 1;
            for a in counts.iter_mut().take(reach) {
                *a += 1;
            }
        }
        counts
    }

    /// The whole behavior of `v` as a finite prefix followed by a constant
    /// tail (the number of periodic children).
    fn behavior_shape(&self, v: usize) -> (Vec<u64>, u64) {
        let mut tail = 0u64;
        let mut longest = None;
        for &c in self.children(v) {
            match self.generations[c] {
                Generations::Infinite => tail += 1,
                Generations::Finite(g) => longest = longest.max(Some(g)),
            }
        }
        let len = longest.map_or(0, |g| g + 1);
        let mut prefix = vec![tail; len];
        for &c in self.children(v) {
            if let Generations::Finite(g) = self.generations[c] {
                for a in prefix.iter_mut().take(g + 1) {
                    *a += 1;
                }
            }
        }
        (prefix, tail)
    }

    /// The procreation behavior of `v`, with trailing 1s dropped. Meaningful
    /// when `v` has exactly one periodic child, as the identity of a group
    /// endomorphism does.
    pub fn trimmed_behavior(&self, v: usize) -> ProcreationBehavior {
        ProcreationBehavior::new(self.behavior_shape(v).0)
    }

    /// Rigid procreation of the dual graph.
    ///
    /// Length-`n` behaviors are prefixes of longer ones, so it is enough to
    /// compare every vertex against one vertex with the most generations, up
    /// to the generations of the former. Costs `O(V * depth)`.
    pub fn rigid_procreation_check(&self) -> RigidityCheck {
        let n = self.vertex_count();
        let cap = |v: usize| self.generations[v].capped(n);
        let Some(reference) = (0..n).max_by(|&a, &b| cap(a).cmp(&cap(b)).then(b.cmp(&a))) else {
            return RigidityCheck::Rigid;
        };
        let (ref_prefix, ref_tail) = self.behavior_shape(reference);
        let at = |prefix: &[u64], tail: u64, k: usize| prefix.get(k - 1).copied().unwrap_or(tail);
        for v in 0..n {
            if v == reference {
                continue;
            }
            let (prefix, tail) = self.behavior_shape(v);
            let horizon = cap(v).min(prefix.len().max(ref_prefix.len()) + 1);
            for k in 1..=horizon {
                if at(&prefix, tail, k) != at(&ref_prefix, ref_tail, k) {
                    let (first, second) = if reference < v {
                        (reference, v)
                    } else {
                        (v, reference)
                    };
                    return RigidityCheck::NotRigid {
                        first,
                        second,
                        length: k,
                    };
                }
            }
        }
        RigidityCheck::Rigid
    }

    /// Pairwise version of [`Self::rigid_procreation_check`], straight from
    /// the definition. Quadratic in the vertex count; meant for small graphs
    /// and for cross-checking the fast version.
    pub fn rigid_procreation_check_naive(&self) -> RigidityCheck {
        let n = self.vertex_count();
        for v in 0..n {
            for w in v + 1..n {
                let len = self.generations[v]
                    .capped(n)
                    .min(self.generations[w].capped(n));
                let bv = self.behavior_prefix(v, len);
                let bw = self.behavior_prefix(w, len);
                if let Some(k) = bv.iter().zip(&bw).position(|(a, b)| a != b) {
                    return RigidityCheck::NotRigid {
                        first: v,
                        second: w,
                        length: k + 1,
                    };
                }
            }
        }
        RigidityCheck::Rigid
    }

    /// The cycles of the periodic part, as sorted `(length, multiplicity)`.
    pub fn cycle_multiset(&self) -> CycleMultiset {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut lengths = Vec::new();
        for v in 0..n {
            if !self.periodic[v] || seen[v] {
                continue;
            }
            let mut len = 0;
            let mut y = v;
            while !seen[y] {
                seen[y] = true;
                len += 1;
                y = self.succ[y];
            }
            lengths.push(len);
        }
        CycleMultiset::from_lengths(lengths)
    }

    /// AHU canonical form, complete for arbitrary functional graphs.
    ///
    /// Each vertex gets a byte label: a big-endian `u32` length followed by
    /// the sorted labels of its transient preimages. A cycle is the least
    /// rotation of the labels of its vertices in successor order, and the
    /// form is the sorted list of cycle encodings. Total size is
    /// `O(V * depth)`.
    pub fn ahu_canonical_form(&self) -> CanonicalForm {
        let n = self.vertex_count();
        let mut labels: Vec<Vec<u8>> = vec![Vec::new(); n];
        let label_of = |labels: &mut Vec<Vec<u8>>, v: usize| {
            let mut parts: Vec<&[u8]> = self
                .children(v)
                .iter()
                .filter(|&&c| !self.periodic[c])
                .map(|&c| labels[c].as_slice())
                .collect();
            parts.sort_unstable();
            let body_len: usize = parts.iter().map(|p| p.len()).sum();
            let mut out = Vec::with_capacity(4 + body_len);
            push_len(&mut out, body_len);
            for p in parts {
                out.extend_from_slice(p);
            }
            out
        };
        for &v in &self.peel_order {
            labels[v] = label_of(&mut labels, v);
        }
        for v in 0..n {
            if self.periodic[v] {
                labels[v] = label_of(&mut labels, v);
            }
        }

        let mut seen = vec![false; n];
        let mut cycles: Vec<Vec<u8>> = Vec::new();
        for v in 0..n {
            if !self.periodic[v] || seen[v] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut y = v;
            while !seen[y] {
                seen[y] = true;
                cycle.push(labels[y].as_slice());
                y = self.succ[y];
            }
            let start = least_rotation(&cycle);
            let mut enc = Vec::new();
            push_len(&mut enc, cycle.len());
            for i in 0..cycle.len() {
                enc.extend_from_slice(cycle[(start + i) % cycle.len()]);
            }
            cycles.push(enc);
        }
        cycles.sort_unstable();
        let mut form = Vec::new();
        push_len(&mut form, cycles.len());
        for c in cycles {
            push_len(&mut form, c.len());
            form.extend_from_slice(&c);
        }
        CanonicalForm(form)
    }

    pub fn is_isomorphic(&self, other: &StateSpace) -> bool {
        self.vertex_count() == other.vertex_count()
            && self.ahu_canonical_form() == other.ahu_canonical_form()
    }

    /// Graph tensor product: `(x, y) -> (f(x), g(y))`, vertex `(x, y)` at
    /// index `x * |other| + y`.
    pub fn tensor_product(&self, other: &StateSpace) -> StateSpace {
        let m = other.vertex_count();
        let succ = (0..self.vertex_count() * m)
            .map(|v| self.succ[v / m] * m + other.succ[v % m])
            .collect();
        StateSpace::from_successors(succ).expect("product of functional graphs")
    }

    /// Graphviz rendering: one `x -> f(x)` line per vertex, ascending.
    /// With `labels`, each vertex also gets a `label` attribute.
    pub fn to_dot(&self, labels: bool) -> String {
        let mut out = String::from("digraph state_space {\n");
        if labels {
            for v in 0..self.vertex_count() {
                let text = self.label(v).map_or_else(|| v.to_string(), str::to_string);
                let escaped = text.replace('\\', "\\\\").replace('"', "\\\"");
                writeln!(out, "  {v} [label=\"{escaped}\"];").expect("writing to a String");
            }
        }
        for (x, y) in self.succ.iter().enumerate() {
            writeln!(out, "  {x} -> {y};").expect("writing to a String");
        }
        out.push_str("}\n");
        out
    }
}

fn push_len(out: &mut Vec<u8>, len: usize) {
    out.extend_from_slice(&u32::try_from(len).expect("label fits in u32").to_be_bytes());
}

/// Start index of the lexicographically least rotation (two-pointer scan,
/// linear number of comparisons).
pub fn least_rotation<T: Ord>(s: &[T]) -> usize {
    let n = s.len();
    let (mut i, mut j, mut k) = (0usize, 1usize, 0usize);
    while i < n && j < n && k < n {
        match s[(i + k) % n].cmp(&s[(j + k) % n]) {
            Ordering::Equal => {
                k += 1;
                continue;
            }
            Ordering::Greater => i += k + 1,
            Ordering::Less => j += k + 1,
        }
        if i == j {
            j += 1;
        }
        k = 0;
    }
    i.min(j)
}

/// Outcome of a rigid-procreation check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum RigidityCheck {
    Rigid,
    /// Both vertices have at least `length` generations but their
    /// behaviors of that length differ (first in position `length`).
    NotRigid {
        first: usize,
        second: usize,
        length: usize,
    },
}

impl RigidityCheck {
    pub fn is_rigid(&self) -> bool {
        matches!(self, RigidityCheck::Rigid)
    }
}

/// A procreation behavior `(a_1, a_2, ...)` with trailing 1s dropped.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProcreationBehavior(Vec<u64>);

impl ProcreationBehavior {
    pub fn new(mut seq: Vec<u64>) -> Self {
        while seq.last() == Some(&1) {
            seq.pop();
        }
        ProcreationBehavior(seq)
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `a_k` (1-based); 1 past the stored terms.
    pub fn get(&self, k: usize) -> u64 {
        assert!(k >= 1, "procreation numbers are indexed from 1");
        self.0.get(k - 1).copied().unwrap_or(1)
    }

    pub fn product(&self) -> u64 {
        self.0.iter().product()
    }

    /// Pointwise product, padding the shorter sequence with 1s.
    pub fn pointwise_product(&self, other: &Self) -> Self {
        let len = self.len().max(other.len());
        Self::new((1..=len).map(|k| self.get(k) * other.get(k)).collect())
    }
}

impl fmt::Display for ProcreationBehavior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

/// Cycle lengths with multiplicities, sorted by length.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CycleMultiset(Vec<(u64, u64)>);

impl CycleMultiset {
    pub fn from_lengths(lengths: impl IntoIterator<Item = u64>) -> Self {
        Self::from_pairs(lengths.into_iter().map(|l| (l, 1)))
    }

    /// Aggregates `(length, multiplicity)` pairs, dropping zero multiplicities.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u64, u64)>) -> Self {
        let mut v: Vec<(u64, u64)> = pairs.into_iter().filter(|&(_, m)| m > 0).collect();
        v.sort_unstable();
        let mut out: Vec<(u64, u64)> = Vec::with_capacity(v.len());
        for (len, mult) in v {
            match out.last_mut() {
                Some(last) if last.0 == len => last.1 += mult,
                _ => out.push((len, mult)),
            }
        }
        CycleMultiset(out)
    }

    pub fn pairs(&self) -> &[(u64, u64)] {
        &self.0
    }

    /// Number of periodic points, `sum length * multiplicity`.
    pub fn point_count(&self) -> u64 {
        self.0.iter().map(|&(l, m)| l * m).sum()
    }

    /// `|per_n|`: points whose period divides `n`.
    pub fn per_n(&self, n: u64) -> u64 {
        self.0
            .iter()
            .filter(|&&(l, _)| n % l == 0)
            .map(|&(l, m)| l * m)
            .sum()
    }

    /// Cycles of the product map: cycles of lengths `c1`, `c2` give
    /// `gcd(c1, c2)` cycles of length `lcm(c1, c2)`.
    pub fn combine(&self, other: &Self) -> Self {
        Self::from_pairs(self.0.iter().flat_map(|&(l1, m1)| {
            other
                .0
                .iter()
                .map(move |&(l2, m2)| (l1.lcm(&l2), l1.gcd(&l2) * m1 * m2))
        }))
    }
}

impl fmt::Display for CycleMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, (l, m)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "({l},{m})")?;
        }
        f.write_str("]")
    }
}

/// Identity procreation behavior paired with the cycle multiset.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonicalInvariant {
    pub identity_behavior: ProcreationBehavior,
    pub cycles: CycleMultiset,
}

impl CanonicalInvariant {
    /// Invariant of a state space whose identity element is `identity`.
    pub fn of_state_space(space: &StateSpace, identity: usize) -> Self {
        CanonicalInvariant {
            identity_behavior: space.trimmed_behavior(identity),
            cycles: space.cycle_multiset(),
        }
    }

    /// `|G| = |nil| * |per|`, read off the invariant.
    pub fn group_order(&self) -> u64 {
        self.identity_behavior.product() * self.cycles.point_count()
    }

    pub fn is_nilpotent(&self) -> bool {
        self.cycles.pairs() == [(1, 1)]
    }

    pub fn is_automorphism(&self) -> bool {
        self.identity_behavior.is_empty()
    }
}

impl fmt::Display for CanonicalInvariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "behavior {} cycles {}",
            self.identity_behavior, self.cycles
        )
    }
}

/// Byte string produced by [`StateSpace::ahu_canonical_form`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm(pub Vec<u8>);

pub fn build_state_space(fdg: &Fdg) -> StateSpace {
    StateSpace::from_fdg(fdg)
}

pub fn canonical_invariant(fdg: &Fdg) -> CanonicalInvariant {
    CanonicalInvariant::of_state_space(&StateSpace::from_fdg(fdg), fdg.identity())
}

pub fn is_isomorphic(a: &StateSpace, b: &StateSpace) -> bool {
    a.is_isomorphic(b)
}

/// Checks `a_1 * ... * a_k = |ker^(k)|`, `a_k = [ker^(k) : ker^(k-1)]` and
/// `a_m | a_n` for `n <= m`, with the behavior read from the state space and
/// the kernels from the group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KernelIndexReport {
    pub behavior: ProcreationBehavior,
    pub kernel_sizes: Vec<usize>,
    pub products_match: bool,
    pub indices_match: bool,
    pub divisibility_chain: bool,
}

impl KernelIndexReport {
    pub fn passed(&self) -> bool {
        self.products_match && self.indices_match && self.divisibility_chain
    }
}

pub fn kernel_index_check(fdg: &Fdg) -> KernelIndexReport {
    let space = StateSpace::from_fdg(fdg);
    let behavior = space.trimmed_behavior(fdg.identity());
    let kernel_sizes: Vec<usize> = fdg.kernel_chain().iter().map(|k| k.len()).collect();
    let stable = kernel_sizes.len() - 1;
    let horizon = stable.max(behavior.len()) + 1;
    let kernel = |k: usize| kernel_sizes[k.min(stable)] as u64;

    let mut product = 1u64;
    let mut products_match = true;
    let mut indices_match = true;
    for k in 1..=horizon {
        let a = behavior.get(k);
        product *= a;
        products_match &= product == kernel(k);
        indices_match &= kernel(k) % kernel(k - 1) == 0 && a == kernel(k) / kernel(k - 1);
    }
    let divisibility_chain =
        (1..=horizon).all(|n| (n..=horizon).all(|m| behavior.get(n) % behavior.get(m) == 0));

    KernelIndexReport {
        behavior,
        kernel_sizes,
        products_match,
        indices_match,
        divisibility_chain,
    }
}
