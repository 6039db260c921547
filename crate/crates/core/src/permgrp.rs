//! Finite permutation groups with full element enumeration.
//!
//! Every group in scope is small, so a group is stored as its complete element
//! list together with a word table expressing each element in the generators.
//! Element 0 is always the identity.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default refusal threshold for [`Group::close`].
pub const DEFAULT_ORDER_CAP: usize = 10_000;

const TABLE_LIMIT: usize = 2048;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("generator {index} is not a permutation of 0..{degree}")]
    NotAPermutation { index: usize, degree: usize },
    #[error("group order exceeds the cap of {cap} elements")]
    OrderCap { cap: usize },
}

/// A bijection of `{0, …, n−1}`; `images[i]` is the image of `i`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Perm {
    images: Vec<u32>,
}

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm {
            images: (0..n as u32).collect(),
        }
    }

    /// Validates that `images` is a bijection.
    pub fn new(images: Vec<u32>) -> Option<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            let i = i as usize;
            if i >= n || seen[i] {
                return None;
            }
            seen[i] = true;
        }
        Some(Perm { images })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i] as usize
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm {
            images: other
                .images
                .iter()
                .map(|&i| self.images[i as usize])
                .collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j as usize] = i as u32;
        }
        Perm { images: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i as u32 == j)
    }

    pub fn order(&self) -> usize {
        let mut seen = vec![false; self.images.len()];
        let mut ord = 1usize;
        for start in 0..self.images.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.images[i] as usize;
                len += 1;
            }
            ord = lcm(ord, len);
        }
        ord
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.images)
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// JSON group description: `{ "name", "degree", "generators": [[images…], …] }`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub name: String,
    pub degree: usize,
    pub generators: Vec<Vec<u32>>,
}

impl GroupSpec {
    pub fn close(&self) -> Result<Group, GroupError> {
        let gens = self
            .generators
            .iter()
            .enumerate()
            .map(|(index, g)| {
                if g.len() != self.degree {
                    return Err(GroupError::NotAPermutation {
                        index,
                        degree: self.degree,
                    });
                }
                Perm::new(g.clone()).ok_or(GroupError::NotAPermutation {
                    index,
                    degree: self.degree,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut g = Group::close_with_cap(self.degree, gens, DEFAULT_ORDER_CAP)?;
        g.name = self.name.clone();
        Ok(g)
    }
}

/// A finite permutation group, fully enumerated.
#[derive(Clone)]
pub struct Group {
    name: String,
    degree: usize,
    generators: Vec<Perm>,
    elements: Vec<Perm>,
    words: Vec<Vec<usize>>,
    parents: Vec<Option<(usize, usize)>>,
    index: HashMap<Perm, usize>,
    inverses: Vec<usize>,
    table: Option<Vec<u32>>,
}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Group")
            .field("name", &self.name)
            .field("degree", &self.degree)
            .field("order", &self.order())
            .field("generators", &self.generators)
            .finish()
    }
}

impl Group {
    pub fn close(degree: usize, generators: Vec<Perm>) -> Result<Group, GroupError> {
        Self::close_with_cap(degree, generators, DEFAULT_ORDER_CAP)
    }

    /// Breadth-first closure under left multiplication by the generators.
    ///
    /// `words[i]` lists generator indices `[a, b, …, z]` with
    /// `elements[i] = g_a ∘ g_b ∘ … ∘ g_z`.
    pub fn close_with_cap(
        degree: usize,
        generators: Vec<Perm>,
        cap: usize,
    ) -> Result<Group, GroupError> {
        for (index, g) in generators.iter().enumerate() {
            if g.degree() != degree {
                return Err(GroupError::NotAPermutation { index, degree });
            }
        }
        let id = Perm::identity(degree);
        let mut elements = vec![id.clone()];
        let mut words: Vec<Vec<usize>> = vec![Vec::new()];
        let mut parents = vec![None];
        let mut index = HashMap::from([(id, 0usize)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for (gi, g) in generators.iter().enumerate() {
                let y = g.compose(&elements[x]);
                if index.contains_key(&y) {
                    continue;
                }
                if elements.len() == cap {
                    return Err(GroupError::OrderCap { cap });
                }
                let mut w = Vec::with_capacity(words[x].len() + 1);
                w.push(gi);
                w.extend_from_slice(&words[x]);
                index.insert(y.clone(), elements.len());
                queue.push_back(elements.len());
                elements.push(y);
                words.push(w);
                parents.push(Some((gi, x)));
            }
        }
        let inverses = elements.iter().map(|e| index[&e.inverse()]).collect();
        let mut group = Group {
            name: String::new(),
            degree,
            generators,
            elements,
            words,
            parents,
            index,
            inverses,
            table: None,
        };
        let n = group.order();
        if n <= TABLE_LIMIT {
            let mut t = Vec::with_capacity(n * n);
            for a in 0..n {
                for b in 0..n {
                    t.push(group.compute_mul(a, b) as u32);
                }
            }
            group.table = Some(t);
        }
        Ok(group)
    }

    pub fn trivial(degree: usize) -> Group {
        Self::close(degree, Vec::new()).expect("trivial group closes")
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &Perm {
        &self.elements[i]
    }

    pub fn word(&self, i: usize) -> &[usize] {
        &self.words[i]
    }

    /// `(gen, parent)` with `elements[i] = generators[gen] ∘ elements[parent]`;
    /// `None` for the identity.
    pub fn bfs_parent(&self, i: usize) -> Option<(usize, usize)> {
        self.parents[i]
    }

    pub fn words(&self) -> &[Vec<usize>] {
        &self.words
    }

    pub fn index_of(&self, p: &Perm) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn spec(&self) -> GroupSpec {
        GroupSpec {
            name: self.name.clone(),
            degree: self.degree,
            generators: self.generators.iter().map(|g| g.images.clone()).collect(),
        }
    }

    /// Index of the element `generators[gi]`.
    pub fn generator_index(&self, gi: usize) -> usize {
        self.index[&self.generators[gi]]
    }

    fn compute_mul(&self, a: usize, b: usize) -> usize {
        self.index[&self.elements[a].compose(&self.elements[b])]
    }

    /// Index of `elements[a] ∘ elements[b]`.
    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        match &self.table {
            Some(t) => t[a * self.order() + b] as usize,
            None => self.compute_mul(a, b),
        }
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn element_order(&self, a: usize) -> usize {
        self.elements[a].order()
    }

    /// Evaluates a word in generator indices.
    pub fn eval_word(&self, word: &[usize]) -> Perm {
        word.iter().fold(Perm::identity(self.degree), |acc, &g| {
            acc.compose(&self.generators[g])
        })
    }

    /// Subgroup generated by the listed element indices, as a sorted index list.
    pub fn subgroup_closure(&self, gens: &[usize]) -> Vec<usize> {
        let mut member = vec![false; self.order()];
        member[0] = true;
        let mut list = vec![0usize];
        let mut i = 0;
        while i < list.len() {
            let x = list[i];
            for &g in gens {
                let y = self.mul(g, x);
                if !member[y] {
                    member[y] = true;
                    list.push(y);
                }
            }
            i += 1;
        }
        list.sort_unstable();
        list
    }

    pub fn is_normal(&self, members: &[usize]) -> bool {
        let mut member = vec![false; self.order()];
        for &m in members {
            member[m] = true;
        }
        (0..self.order()).all(|g| {
            let gi = self.inverse(g);
            members
                .iter()
                .all(|&h| member[self.mul(self.mul(g, h), gi)])
        })
    }

    /// Direct product acting on the disjoint union of the point sets.
    pub fn direct_product(&self, other: &Group) -> Group {
        let n = self.degree;
        let m = other.degree;
        let mut gens = Vec::new();
        for g in &self.generators {
            let mut im = g.images.clone();
            im.extend((n..n + m).map(|i| i as u32));
            gens.push(Perm { images: im });
        }
        for g in &other.generators {
            let mut im: Vec<u32> = (0..n as u32).collect();
            im.extend(g.images.iter().map(|&i| i + n as u32));
            gens.push(Perm { images: im });
        }
        Group::close(n + m, gens)
            .expect("product of capped groups")
            .with_name(format!("{}x{}", self.name, other.name))
    }
}

/// The subgroup `O^p(G)`: smallest normal subgroup with `p`-group quotient.
#[derive(Clone, Debug)]
pub struct OpSubgroup {
    pub p: u32,
    /// Sorted element indices of the subgroup.
    pub members: Vec<usize>,
    /// A generating set made of `p′`-elements.
    pub generators: Vec<usize>,
    pub parent_order: usize,
}

impl OpSubgroup {
    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn index(&self) -> usize {
        self.parent_order / self.members.len()
    }
}

fn is_power_of(mut n: usize, p: usize) -> bool {
    while n > 1 && n.is_multiple_of(p) {
        n /= p;
    }
    n == 1
}

/// Closure of all elements of order coprime to `p`.
pub fn o_p_subgroup(g: &Group, p: u32) -> OpSubgroup {
    let pp = p as usize;
    let p_prime: Vec<usize> = (0..g.order())
        .filter(|&a| !g.element_order(a).is_multiple_of(pp))
        .collect();
    let mut gens = Vec::new();
    let mut members = vec![0usize];
    let mut member = vec![false; g.order()];
    member[0] = true;
    for &a in &p_prime {
        if member[a] {
            continue;
        }
        gens.push(a);
        members = g.subgroup_closure(&gens);
        member.iter_mut().for_each(|m| *m = false);
        for &m in &members {
            member[m] = true;
        }
    }
    debug_assert!(p_prime.iter().all(|&a| member[a]));
    debug_assert!(is_power_of(g.order() / members.len(), pp));
    debug_assert!(g.is_normal(&members));
    OpSubgroup {
        p,
        members,
        generators: gens,
        parent_order: g.order(),
    }
}

/// Whether `G` has a normal `p`-complement, i.e. `p ∤ |O^p(G)|`.
pub fn is_p_nilpotent(g: &Group, p: u32) -> bool {
    !o_p_subgroup(g, p).order().is_multiple_of(p as usize)
}

/// `|G / O^p(G)|`.
pub fn largest_p_quotient_order(g: &Group, p: u32) -> usize {
    o_p_subgroup(g, p).index()
}

/// Checks the defining properties of an [`OpSubgroup`] against its parent.
pub fn verify_op_subgroup(g: &Group, op: &OpSubgroup) -> bool {
    let pp = op.p as usize;
    let mut member = vec![false; g.order()];
    for &m in &op.members {
        member[m] = true;
    }
    let closed = op
        .members
        .iter()
        .all(|&a| op.members.iter().all(|&b| member[g.mul(a, b)]));
    let has_p_prime = (0..g.order()).all(|a| g.element_order(a).is_multiple_of(pp) || member[a]);
    closed
        && has_p_prime
        && g.is_normal(&op.members)
        && g.order().is_multiple_of(op.members.len())
        && is_power_of(g.order() / op.members.len(), pp)
}

/// Small named groups used throughout tests and the shipped catalog.
pub mod named {
    use super::*;

    fn build(name: &str, degree: usize, gens: &[&[u32]]) -> Group {
        GroupSpec {
            name: name.into(),
            degree,
            generators: gens.iter().map(|g| g.to_vec()).collect(),
        }
        .close()
        .expect("named group closes")
    }

    pub fn trivial() -> Group {
        Group::trivial(1).with_name("1")
    }

    pub fn cyclic(n: usize) -> Group {
        let gen: Vec<u32> = (0..n as u32).map(|i| (i + 1) % n as u32).collect();
        build(&format!("C{n}"), n, &[&gen])
    }

    pub fn symmetric3() -> Group {
        build("S3", 3, &[&[1, 0, 2], &[1, 2, 0]])
    }

    pub fn dihedral8() -> Group {
        build("D8", 4, &[&[1, 2, 3, 0], &[0, 3, 2, 1]])
    }

    pub fn alternating4() -> Group {
        build("A4", 4, &[&[1, 2, 0, 3], &[1, 0, 3, 2]])
    }

    /// Frobenius group `C5 ⋊ C4` acting on `Z/5` by `x ↦ x + 1` and `x ↦ 2x`.
    pub fn frobenius20() -> Group {
        build("C5:C4", 5, &[&[1, 2, 3, 4, 0], &[0, 2, 4, 1, 3]])
    }

    pub fn c3_times_s3() -> Group {
        build(
            "C3xS3",
            6,
            &[
                &[1, 2, 0, 3, 4, 5],
                &[0, 1, 2, 4, 3, 5],
                &[0, 1, 2, 4, 5, 3],
            ],
        )
    }
}
