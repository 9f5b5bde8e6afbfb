//! Connected components of the Gillet-Grayson model for finite abelian p-groups
//! of bounded length.
//!
//! Objects are skeletal: one group `(+)_i Z/p^{l_i}` per partition `l`.
//! Homomorphisms are stored by the images of the standard generators.
//! Vertices are pairs of objects; an edge is a pair of exact sequences
//! `P0 -> P1 -> Q`, `P0' -> P1' -> Q` with the same cokernel object, running
//! from `(P0, P0')` to `(P1, P1')`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::arith::{checked_pow, is_prime};
use crate::error::{bail, Result};

/// Largest length the enumeration accepts.
pub const MAX_LENGTH: u32 = 3;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FinitePGroup {
    p: u64,
    partition: Vec<u32>,
}

pub type Element = Vec<u64>;

impl FinitePGroup {
    pub fn new(p: u64, mut partition: Vec<u32>) -> Result<Self> {
        if !is_prime(p) {
            bail!(Domain, "{p} is not prime");
        }
        partition.retain(|&l| l > 0);
        partition.sort_unstable_by(|a, b| b.cmp(a));
        let g = Self { p, partition };
        for m in g.moduli() {
            let _ = m?;
        }
        Ok(g)
    }

    pub fn zero(p: u64) -> Result<Self> {
        Self::new(p, vec![])
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn partition(&self) -> &[u32] {
        &self.partition
    }

    /// Composition length, the exponent of the order.
    pub fn length(&self) -> u32 {
        self.partition.iter().sum()
    }

    pub fn rank(&self) -> usize {
        self.partition.len()
    }

    fn moduli(&self) -> impl Iterator<Item = Result<u64>> + '_ {
        self.partition.iter().map(|&l| checked_pow(self.p, l))
    }

    fn modulus(&self, i: usize) -> u64 {
        self.p.pow(self.partition[i])
    }

    pub fn order(&self) -> u64 {
        self.p.pow(self.length())
    }

    pub fn is_element(&self, x: &[u64]) -> bool {
        x.len() == self.rank() && x.iter().enumerate().all(|(i, &c)| c < self.modulus(i))
    }

    pub fn elements(&self) -> Vec<Element> {
        let mut out = vec![vec![]];
        for i in 0..self.rank() {
            let m = self.modulus(i);
            out = out
                .into_iter()
                .flat_map(|x| {
                    (0..m).map(move |c| {
                        let mut y = x.clone();
                        y.push(c);
                        y
                    })
                })
                .collect();
        }
        out
    }

    pub fn zero_element(&self) -> Element {
        vec![0; self.rank()]
    }

    fn add(&self, x: &[u64], y: &[u64]) -> Element {
        x.iter()
            .zip(y)
            .enumerate()
            .map(|(i, (a, b))| (a + b) % self.modulus(i))
            .collect()
    }

    fn times(&self, k: u64, x: &[u64]) -> Element {
        x.iter()
            .enumerate()
            .map(|(i, a)| {
                let m = self.modulus(i);
                ((k % m) as u128 * *a as u128 % m as u128) as u64
            })
            .collect()
    }

    /// Elements killed by `p^l`: the possible images of a generator of order `p^l`.
    fn killed_by(&self, l: u32) -> Vec<Element> {
        let k = self.p.pow(l);
        let zero = self.zero_element();
        self.elements()
            .into_iter()
            .filter(|x| self.times(k, x) == zero)
            .collect()
    }
}

impl fmt::Display for FinitePGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.partition.is_empty() {
            return f.write_str("0");
        }
        for (i, l) in self.partition.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "Z/{}", self.p.pow(*l))?;
        }
        Ok(())
    }
}

/// A homomorphism given by the images of the source generators.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Hom {
    pub images: Vec<Element>,
}

impl Hom {
    pub fn identity(g: &FinitePGroup) -> Self {
        let images = (0..g.rank())
            .map(|i| {
                let mut e = g.zero_element();
                e[i] = 1;
                e
            })
            .collect();
        Self { images }
    }

    pub fn zero(source: &FinitePGroup, target: &FinitePGroup) -> Self {
        Self {
            images: vec![target.zero_element(); source.rank()],
        }
    }

    /// Checks that the images respect the orders of the generators.
    pub fn is_well_defined(&self, source: &FinitePGroup, target: &FinitePGroup) -> bool {
        self.images.len() == source.rank()
            && self.images.iter().zip(&source.partition).all(|(y, &l)| {
                target.is_element(y) && target.times(source.p.pow(l), y) == target.zero_element()
            })
    }

    pub fn apply(&self, target: &FinitePGroup, x: &[u64]) -> Element {
        let mut out = target.zero_element();
        for (c, y) in x.iter().zip(&self.images) {
            out = target.add(&out, &target.times(*c, y));
        }
        out
    }

    /// All homomorphisms `source -> target`.
    pub fn all(source: &FinitePGroup, target: &FinitePGroup) -> Vec<Hom> {
        let mut out = vec![Hom { images: vec![] }];
        for &l in &source.partition {
            let choices = target.killed_by(l);
            out = out
                .into_iter()
                .flat_map(|h| {
                    choices.iter().map(move |y| {
                        let mut images = h.images.clone();
                        images.push(y.clone());
                        Hom { images }
                    })
                })
                .collect();
        }
        out
    }

    fn image_set(&self, source: &FinitePGroup, target: &FinitePGroup) -> Vec<Element> {
        let mut image: Vec<Element> = source
            .elements()
            .iter()
            .map(|x| self.apply(target, x))
            .collect();
        image.sort();
        image.dedup();
        image
    }

    fn kernel(&self, source: &FinitePGroup, target: &FinitePGroup) -> Vec<Element> {
        let zero = target.zero_element();
        source
            .elements()
            .into_iter()
            .filter(|x| self.apply(target, x) == zero)
            .collect()
    }

    pub fn is_automorphism(&self, g: &FinitePGroup) -> bool {
        self.is_well_defined(g, g) && self.image_set(g, g).len() as u64 == g.order()
    }
}

/// `sub --inclusion--> total --projection--> quot`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShortExact {
    pub sub: FinitePGroup,
    pub total: FinitePGroup,
    pub quot: FinitePGroup,
    pub inclusion: Hom,
    pub projection: Hom,
}

impl ShortExact {
    /// Elementwise exactness: injective, surjective, and image equal to kernel.
    pub fn validate(&self) -> Result<()> {
        if !self.inclusion.is_well_defined(&self.sub, &self.total) {
            bail!(
                Invariant,
                "inclusion {:?} is not a homomorphism {} -> {}",
                self.inclusion,
                self.sub,
                self.total
            );
        }
        if !self.projection.is_well_defined(&self.total, &self.quot) {
            bail!(
                Invariant,
                "projection {:?} is not a homomorphism {} -> {}",
                self.projection,
                self.total,
                self.quot
            );
        }
        if self.inclusion.kernel(&self.sub, &self.total).len() != 1 {
            bail!(
                Invariant,
                "inclusion {} -> {} is not injective",
                self.sub,
                self.total
            );
        }
        if self.projection.image_set(&self.total, &self.quot).len() as u64 != self.quot.order() {
            bail!(
                Invariant,
                "projection {} -> {} is not surjective",
                self.total,
                self.quot
            );
        }
        let image = self.inclusion.image_set(&self.sub, &self.total);
        let mut kernel = self.projection.kernel(&self.total, &self.quot);
        kernel.sort();
        if image != kernel {
            bail!(Invariant, "image and kernel differ in {}", self.total);
        }
        if self.total.order() != self.sub.order() * self.quot.order() {
            bail!(
                Invariant,
                "|{}| != |{}| * |{}|",
                self.total,
                self.sub,
                self.quot
            );
        }
        Ok(())
    }

    /// `0 -> P --f--> P`.
    pub fn over_zero(p: &FinitePGroup, f: Hom) -> Result<Self> {
        let zero = FinitePGroup::zero(p.prime())?;
        Ok(Self {
            inclusion: Hom::zero(&zero, p),
            sub: zero,
            total: p.clone(),
            quot: p.clone(),
            projection: f,
        })
    }
}

fn partitions(n: u32, max_part: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = vec![];
    for first in (1..=n.min(max_part)).rev() {
        for mut rest in partitions(n - first, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// All objects of length at most `cap`, by length.
pub fn objects(p: u64, cap: u32) -> Result<Vec<FinitePGroup>> {
    let mut out = vec![];
    for n in 0..=cap {
        for lambda in partitions(n, n) {
            out.push(FinitePGroup::new(p, lambda)?);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct GGComplex {
    p: u64,
    cap: u32,
    objects: Vec<FinitePGroup>,
    /// Exact sequences, as (sub, total, quot) object indices plus maps.
    sequences: Vec<(usize, usize, usize, ShortExact)>,
}

pub fn gg_build(p: u64, cap: u32) -> Result<GGComplex> {
    if !is_prime(p) {
        bail!(Domain, "{p} is not prime");
    }
    if cap > MAX_LENGTH {
        bail!(
            Guard,
            "length cap {cap} exceeds the enumeration limit {MAX_LENGTH}"
        );
    }
    let objects = objects(p, cap)?;
    let index = |g: &FinitePGroup| {
        objects
            .iter()
            .position(|o| o == g)
            .expect("skeletal object")
    };
    let mut sequences = vec![];
    for total in &objects {
        for quot in objects.iter().filter(|q| q.length() <= total.length()) {
            let surjections: Vec<Hom> = Hom::all(total, quot)
                .into_iter()
                .filter(|h| h.image_set(total, quot).len() as u64 == quot.order())
                .collect();
            for sub in objects
                .iter()
                .filter(|s| s.length() + quot.length() == total.length())
            {
                let homs = Hom::all(sub, total);
                for projection in &surjections {
                    let mut kernel = projection.kernel(total, quot);
                    kernel.sort();
                    for inclusion in &homs {
                        if inclusion.image_set(sub, total) != kernel {
                            continue;
                        }
                        let seq = ShortExact {
                            sub: sub.clone(),
                            total: total.clone(),
                            quot: quot.clone(),
                            inclusion: inclusion.clone(),
                            projection: projection.clone(),
                        };
                        seq.validate()?;
                        sequences.push((index(sub), index(total), index(quot), seq));
                    }
                }
            }
        }
    }
    Ok(GGComplex {
        p,
        cap,
        objects,
        sequences,
    })
}

impl GGComplex {
    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn objects(&self) -> &[FinitePGroup] {
        &self.objects
    }

    pub fn vertex_count(&self) -> usize {
        self.objects.len() * self.objects.len()
    }

    pub fn sequences(&self) -> impl Iterator<Item = &ShortExact> + '_ {
        self.sequences.iter().map(|s| &s.3)
    }

    pub fn sequence_count(&self) -> usize {
        self.sequences.len()
    }

    /// Number of sequences per cokernel object.
    fn by_cokernel(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut out: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, s) in self.sequences.iter().enumerate() {
            out.entry(s.2).or_default().push(i);
        }
        out
    }

    /// Every ordered pair of sequences with a common cokernel is an edge.
    pub fn edge_count(&self) -> u64 {
        self.by_cokernel()
            .values()
            .map(|v| (v.len() as u64).pow(2))
            .sum()
    }

    fn vertex(&self, a: usize, b: usize) -> usize {
        a * self.objects.len() + b
    }
}

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            core::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pi0Report {
    pub vertex_count: usize,
    pub sequence_count: usize,
    pub edge_count: u64,
    /// Each component as a sorted list of `(P, P')` object indices.
    pub components: Vec<Vec<(usize, usize)>>,
    /// `l(P') - l(P)` of each component, aligned with `components`.
    pub differences: Vec<i64>,
    pub edges_checked: u64,
    /// Every edge joins vertices with the same `l(P') - l(P)`.
    pub difference_constant: bool,
    /// `(0, 0)` and `(P, P)` are joined by the edge built from `0 -> P -> P` for every `P`.
    pub diagonal_connected: bool,
    pub components_per_difference: BTreeMap<i64, usize>,
}

impl Pi0Report {
    pub fn pass(&self) -> bool {
        self.difference_constant && self.diagonal_connected
    }

    /// Differences realized by more than one component inside the truncation.
    pub fn unmerged(&self) -> Vec<i64> {
        self.components_per_difference
            .iter()
            .filter(|(_, &c)| c > 1)
            .map(|(d, _)| *d)
            .collect()
    }
}

pub fn gg_pi0(c: &GGComplex) -> Pi0Report {
    let n = c.objects.len();
    let len = |i: usize| c.objects[i].length() as i64;
    let mut uf = UnionFind::new(n * n);
    let mut difference_constant = true;
    let mut edges_checked = 0u64;
    for seqs in c.by_cokernel().values() {
        // Edges only see endpoint objects, so group sequences by (sub, total)
        // and weight each endpoint pair by how many edges it stands for.
        let mut shapes: BTreeMap<(usize, usize), u64> = BTreeMap::new();
        for &i in seqs {
            let (s, t, _, _) = c.sequences[i];
            *shapes.entry((s, t)).or_default() += 1;
        }
        for (&(s, t), &m) in &shapes {
            for (&(s2, t2), &m2) in &shapes {
                let from = c.vertex(s, s2);
                let to = c.vertex(t, t2);
                if len(s2) - len(s) != len(t2) - len(t) {
                    difference_constant = false;
                }
                edges_checked += m * m2;
                uf.union(from, to);
            }
        }
    }

    let zero = 0usize;
    let mut diagonal_connected = true;
    for (i, obj) in c.objects.iter().enumerate() {
        let nu = ShortExact::over_zero(obj, Hom::identity(obj)).expect("prime validated");
        let present = c
            .sequences
            .iter()
            .any(|(s, t, q, seq)| (*s, *t, *q) == (zero, i, i) && seq == &nu);
        if !present || uf.find(c.vertex(zero, zero)) != uf.find(c.vertex(i, i)) {
            diagonal_connected = false;
        }
    }

    let mut groups: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for a in 0..n {
        for b in 0..n {
            groups
                .entry(uf.find(c.vertex(a, b)))
                .or_default()
                .push((a, b));
        }
    }
    let mut components: Vec<Vec<(usize, usize)>> = groups.into_values().collect();
    components.sort();
    let differences: Vec<i64> = components
        .iter()
        .map(|comp| len(comp[0].1) - len(comp[0].0))
        .collect();
    for (comp, d) in components.iter().zip(&differences) {
        if comp.iter().any(|&(a, b)| len(b) - len(a) != *d) {
            difference_constant = false;
        }
    }
    let mut components_per_difference = BTreeMap::new();
    for d in &differences {
        *components_per_difference.entry(*d).or_insert(0) += 1;
    }
    Pi0Report {
        vertex_count: n * n,
        sequence_count: c.sequences.len(),
        edge_count: c.edge_count(),
        components,
        differences,
        edges_checked,
        difference_constant,
        diagonal_connected,
        components_per_difference,
    }
}

/// The two edges `(0 -> P -> P, 0 -> P -> P)` and `(0 -> P --f--> P, 0 -> P -> P)`
/// from `(0, 0)` to `(P, P)`, which together form a loop at the basepoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoopCertificate {
    pub nu: (ShortExact, ShortExact),
    pub xi: (ShortExact, ShortExact),
}

impl LoopCertificate {
    pub fn is_degenerate(&self) -> bool {
        self.nu == self.xi
    }
}

pub fn gg_loop(group: &FinitePGroup, f: &Hom) -> Result<LoopCertificate> {
    if !f.is_automorphism(group) {
        bail!(Domain, "{f:?} is not an automorphism of {group}");
    }
    let one = ShortExact::over_zero(group, Hom::identity(group))?;
    let twisted = ShortExact::over_zero(group, f.clone())?;
    one.validate()?;
    twisted.validate()?;
    for s in [&one, &twisted] {
        if s.sub.length() != 0 || s.total != *group || s.quot != *group {
            bail!(
                Invariant,
                "loop edge does not run from (0, 0) to ({group}, {group})"
            );
        }
    }
    Ok(LoopCertificate {
        nu: (one.clone(), one.clone()),
        xi: (twisted, one),
    })
}
