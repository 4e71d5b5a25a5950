//! Fully materialized finite groups: closure, stabilizers, conjugacy
//! classes and the lattice of normal subgroups.
//!
//! Groups are stored as an element list with the identity at index 0 and a
//! hash index back from element to position. Everything else works on
//! element indices.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::hash::Hash;

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::forms::{act, CubicForm};
use crate::gf2k::{FieldSpec, Matrix};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("group order exceeds the limit of {0}")]
    LimitExceeded(usize),
    #[error("{0} conjugacy classes exceed the lattice limit of 64")]
    ClassLimitExceeded(usize),
    #[error("element set is not closed under multiplication")]
    NotASubgroup,
}

pub const MAX_LATTICE_CLASSES: usize = 64;

/// What a materialized group needs from its elements.
pub trait GroupElement: Clone + Eq + Hash + Send + Sync {
    /// The identity of the group this element lives in.
    fn identity_like(&self) -> Self;
    /// `self * other`.
    fn compose(&self, other: &Self) -> Self;
    fn inverse(&self) -> Self;
}

/// An element of PGL_n(GF(2^k)): an invertible matrix scaled so that its
/// first nonzero entry in row-major order is 1.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PglElement {
    mat: Matrix,
}

impl fmt::Debug for PglElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.mat)
    }
}

impl PglElement {
    /// Normalizes `m`; `None` if it is singular.
    pub fn new(m: Matrix) -> Option<PglElement> {
        if !m.is_invertible() {
            return None;
        }
        Some(PglElement { mat: normalize(&m) })
    }

    pub fn identity(field: &'static FieldSpec, n: usize) -> PglElement {
        PglElement { mat: Matrix::identity(field, n) }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.mat
    }
}

fn normalize(m: &Matrix) -> Matrix {
    let lead = m.entries().iter().copied().find(|&c| c != 0).expect("nonzero matrix");
    if lead == 1 {
        return *m;
    }
    m.scale(m.field().inv(lead).unwrap())
}

impl GroupElement for PglElement {
    fn identity_like(&self) -> Self {
        PglElement::identity(self.mat.field(), self.mat.n())
    }

    fn compose(&self, other: &Self) -> Self {
        PglElement { mat: normalize(&self.mat.mul(&other.mat)) }
    }

    fn inverse(&self) -> Self {
        PglElement { mat: normalize(&self.mat.invert().expect("group elements are invertible")) }
    }
}

/// A finite group held as an explicit element list.
#[derive(Clone)]
pub struct FiniteGroup<E: GroupElement> {
    elements: Vec<E>,
    index: FxHashMap<E, u32>,
    generators: Vec<usize>,
}

impl<E: GroupElement + fmt::Debug> fmt::Debug for FiniteGroup<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteGroup(order {}, {} generators)", self.order(), self.generators.len())
    }
}

impl<E: GroupElement> FiniteGroup<E> {
    /// Breadth-first closure of `gens` under right multiplication.
    pub fn generate(identity: E, gens: &[E], limit: usize) -> Result<FiniteGroup<E>, GroupError> {
        let mut elements = vec![identity.clone()];
        let mut index = FxHashMap::default();
        index.insert(identity, 0u32);
        let mut head = 0;
        while head < elements.len() {
            let x = elements[head].clone();
            for g in gens {
                let y = x.compose(g);
                if !index.contains_key(&y) {
                    if elements.len() >= limit {
                        return Err(GroupError::LimitExceeded(limit));
                    }
                    index.insert(y.clone(), elements.len() as u32);
                    elements.push(y);
                }
            }
            head += 1;
        }
        let generators = gens.iter().map(|g| index[g] as usize).collect();
        Ok(FiniteGroup { elements, index, generators })
    }

    /// The subgroup formed by `elems`, with a greedily chosen generating set.
    pub fn from_elements(identity: E, elems: &[E]) -> Result<FiniteGroup<E>, GroupError> {
        let target: HashSet<&E> = elems.iter().collect();
        let mut gens: Vec<E> = Vec::new();
        let mut group = FiniteGroup::generate(identity.clone(), &gens, usize::MAX)?;
        for e in elems {
            if group.index_of(e).is_none() {
                gens.push(e.clone());
                group = FiniteGroup::generate(identity.clone(), &gens, target.len() + 1)
                    .map_err(|_| GroupError::NotASubgroup)?;
            }
        }
        if group.order() != target.len() || !group.elements.iter().all(|e| target.contains(e)) {
            return Err(GroupError::NotASubgroup);
        }
        Ok(group)
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[E] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &E {
        &self.elements[i]
    }

    pub fn identity(&self) -> &E {
        &self.elements[0]
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn index_of(&self, e: &E) -> Option<usize> {
        self.index.get(e).map(|&i| i as usize)
    }

    pub fn contains(&self, e: &E) -> bool {
        self.index.contains_key(e)
    }

    #[inline]
    pub fn mul(&self, i: usize, j: usize) -> usize {
        self.index[&self.elements[i].compose(&self.elements[j])] as usize
    }

    pub fn inv(&self, i: usize) -> usize {
        self.index[&self.elements[i].inverse()] as usize
    }

    /// `g x g^-1` by index.
    pub fn conjugate(&self, g: usize, x: usize) -> usize {
        let gi = self.elements[g].inverse();
        self.index[&self.elements[g].compose(&self.elements[x]).compose(&gi)] as usize
    }

    pub fn element_order(&self, i: usize) -> usize {
        let mut k = 1;
        let mut y = self.elements[i].clone();
        let id = self.identity();
        while &y != id {
            y = y.compose(&self.elements[i]);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        commute_pairwise(self, &self.generators)
    }

    /// Element set, for comparing groups built in different ways.
    pub fn element_set(&self) -> HashSet<E> {
        self.elements.iter().cloned().collect()
    }

    /// Index closure of `gens` inside this group.
    pub fn closure_indices(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order()];
        seen[0] = true;
        let mut out = vec![0usize];
        let mut head = 0;
        while head < out.len() {
            let x = out[head];
            for &g in gens {
                let y = self.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    out.push(y);
                }
            }
            head += 1;
        }
        out
    }

    /// The subgroup on the given indices, materialized on its own.
    pub fn subgroup(&self, members: &[usize]) -> Result<FiniteGroup<E>, GroupError> {
        let elems: Vec<E> = members.iter().map(|&i| self.elements[i].clone()).collect();
        FiniteGroup::from_elements(self.identity().clone(), &elems)
    }
}

fn commute_pairwise<E: GroupElement>(group: &FiniteGroup<E>, gens: &[usize]) -> bool {
    gens.iter().enumerate().all(|(a, &x)| {
        gens[a + 1..].iter().all(|&y| {
            let (ex, ey) = (group.element(x), group.element(y));
            ex.compose(ey) == ey.compose(ex)
        })
    })
}

/// BFS closure in PGL_n given generators.
pub fn closure(
    field: &'static FieldSpec,
    n: usize,
    gens: &[PglElement],
    limit: usize,
) -> Result<FiniteGroup<PglElement>, GroupError> {
    FiniteGroup::generate(PglElement::identity(field, n), gens, limit)
}

/// |PGL_n(F_q)| = q^{n(n-1)/2} prod_{i=2}^{n} (q^i - 1).
pub fn pgl_order(n: u32, q: u64) -> u64 {
    let mut r = q.pow(n * (n - 1) / 2);
    for i in 2..=n {
        r *= q.pow(i) - 1;
    }
    r
}

/// |GL_n(F_q)| = prod_{i=0}^{n-1} (q^n - q^i).
pub fn gl_order(n: u32, q: u64) -> u64 {
    (0..n).map(|i| q.pow(n) - q.pow(i)).product()
}

/// The transvection I + E_{01}, the cyclic coordinate shift and, for q > 2,
/// diag(a, 1, ..., 1) with a primitive. Together they generate PGL_n(F_q).
pub fn pgl_generators(field: &'static FieldSpec, n: usize) -> Vec<PglElement> {
    let mut t = Matrix::identity(field, n);
    t.set(0, 1, 1);
    let mut shift = Matrix::zero(field, n);
    for i in 0..n {
        shift.set((i + 1) % n, i, 1);
    }
    let mut gens = vec![PglElement::new(t).unwrap(), PglElement::new(shift).unwrap()];
    if field.q() > 2 {
        let mut d = Matrix::identity(field, n);
        d.set(0, 0, field.primitive());
        gens.push(PglElement::new(d).unwrap());
    }
    gens
}

/// PGL_n(F_q), checked against the order formula.
pub fn pgl(field: &'static FieldSpec, n: usize) -> Result<FiniteGroup<PglElement>, GroupError> {
    let expect = pgl_order(n as u32, field.q() as u64) as usize;
    let g = closure(field, n, &pgl_generators(field, n), expect)?;
    assert_eq!(g.order(), expect, "generators do not generate PGL_{n}(F_{})", field.q());
    Ok(g)
}

/// The antidiagonal 4x4 matrix; over F_2 it is the Gram matrix of
/// x1 y4 + x2 y3 + x3 y2 + x4 y1.
pub fn antidiagonal(field: &'static FieldSpec) -> Matrix {
    let mut m = Matrix::zero(field, 4);
    for i in 0..4 {
        m.set(i, 3 - i, 1);
    }
    m
}

/// Elements with g^T omega g a nonzero multiple of omega. Over F_2 this is
/// exactly g^T omega g = omega.
pub fn symplectic_group(
    ambient: &FiniteGroup<PglElement>,
    omega: &Matrix,
) -> Result<FiniteGroup<PglElement>, GroupError> {
    let field = omega.field();
    let keep: Vec<PglElement> = ambient
        .elements()
        .iter()
        .filter(|g| {
            let m = g.matrix();
            let lhs = m.transpose().mul(omega).mul(m);
            (1..field.q() as u8).any(|c| omega.scale(c) == lhs)
        })
        .copied()
        .collect();
    FiniteGroup::from_elements(*ambient.identity(), &keep)
}

/// Elements g with f(g v) a nonzero multiple of f, the automorphisms of f = 0.
pub fn stabilizer(group: &FiniteGroup<PglElement>, f: &CubicForm) -> Result<FiniteGroup<PglElement>, GroupError> {
    let field = f.field();
    let keep: Vec<PglElement> = group
        .elements()
        .iter()
        .filter(|g| {
            let img = act(g.matrix(), f);
            (1..field.q() as u8).any(|c| f.scale(c) == img)
        })
        .copied()
        .collect();
    FiniteGroup::from_elements(*group.identity(), &keep)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjugacyClasses {
    pub reps: Vec<usize>,
    pub class_of: Vec<u32>,
    pub sizes: Vec<usize>,
}

impl ConjugacyClasses {
    pub fn count(&self) -> usize {
        self.reps.len()
    }

    /// Multiset of class sizes, sorted.
    pub fn size_profile(&self) -> Vec<usize> {
        let mut s = self.sizes.clone();
        s.sort_unstable();
        s
    }
}

/// Classes as orbits of conjugation by the generators. Representatives are
/// the least index in each class; class ids follow representative order.
pub fn conjugacy_classes<E: GroupElement>(group: &FiniteGroup<E>) -> ConjugacyClasses {
    let n = group.order();
    let gens: Vec<(E, E)> = group
        .generators()
        .iter()
        .map(|&g| (group.element(g).clone(), group.element(g).inverse()))
        .collect();
    let mut class_of = vec![u32::MAX; n];
    let mut reps = Vec::new();
    let mut sizes = Vec::new();
    let mut queue = Vec::new();
    for start in 0..n {
        if class_of[start] != u32::MAX {
            continue;
        }
        let id = reps.len() as u32;
        reps.push(start);
        class_of[start] = id;
        queue.clear();
        queue.push(start);
        let mut head = 0;
        while head < queue.len() {
            let x = group.element(queue[head]).clone();
            for (g, gi) in &gens {
                let y = group.index_of(&g.compose(&x).compose(gi)).expect("closed");
                if class_of[y] == u32::MAX {
                    class_of[y] = id;
                    queue.push(y);
                }
            }
            head += 1;
        }
        sizes.push(queue.len());
    }
    ConjugacyClasses { reps, class_of, sizes }
}

/// A normal subgroup recorded by its element indices in the parent group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalSubgroup {
    /// Sorted element indices.
    pub elements: Vec<usize>,
    /// Bit `c` set iff class `c` is contained.
    pub class_mask: u64,
    pub generators: Vec<usize>,
    pub abelian: bool,
}

impl NormalSubgroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }
}

#[derive(Clone, Debug)]
pub struct NormalSubgroupLattice {
    pub classes: ConjugacyClasses,
    /// Sorted by order, then by class mask.
    pub subgroups: Vec<NormalSubgroup>,
}

impl NormalSubgroupLattice {
    pub fn orders(&self) -> Vec<usize> {
        let mut o: Vec<usize> = self.subgroups.iter().map(|s| s.order()).collect();
        o.dedup();
        o
    }
}

/// Smallest normal subgroup containing `seeds`, with a small generating set.
pub fn normal_closure<E: GroupElement>(group: &FiniteGroup<E>, seeds: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let mut gens: Vec<usize> = seeds.iter().copied().filter(|&s| s != 0).collect();
    gens.dedup();
    let outer: Vec<usize> = group.generators().to_vec();
    loop {
        let members = group.closure_indices(&gens);
        let mut inside = vec![false; group.order()];
        for &m in &members {
            inside[m] = true;
        }
        let missing = gens
            .iter()
            .flat_map(|&h| outer.iter().map(move |&s| (s, h)))
            .map(|(s, h)| group.conjugate(s, h))
            .find(|&c| !inside[c]);
        match missing {
            Some(c) => gens.push(c),
            None => {
                let mut sorted = members;
                sorted.sort_unstable();
                return (sorted, gens);
            }
        }
    }
}

fn mask_of(classes: &ConjugacyClasses, members: &[usize]) -> u64 {
    members.iter().fold(0u64, |m, &e| m | 1 << classes.class_of[e])
}

/// Every normal subgroup, as joins of normal closures of classes closed
/// under pairwise join and intersection.
pub fn normal_subgroups<E: GroupElement>(group: &FiniteGroup<E>) -> Result<NormalSubgroupLattice, GroupError> {
    let classes = conjugacy_classes(group);
    if classes.count() > MAX_LATTICE_CLASSES {
        return Err(GroupError::ClassLimitExceeded(classes.count()));
    }
    let mut found: BTreeMap<u64, NormalSubgroup> = BTreeMap::new();
    let record = |found: &mut BTreeMap<u64, NormalSubgroup>, seeds: &[usize]| -> u64 {
        let (elements, generators) = normal_closure(group, seeds);
        let class_mask = mask_of(&classes, &elements);
        found.entry(class_mask).or_insert_with(|| NormalSubgroup {
            abelian: commute_pairwise(group, &generators),
            elements,
            class_mask,
            generators,
        });
        class_mask
    };
    record(&mut found, &[]);
    for &r in &classes.reps {
        record(&mut found, &[r]);
    }
    loop {
        let masks: Vec<u64> = found.keys().copied().collect();
        let before = found.len();
        for (i, &a) in masks.iter().enumerate() {
            for &b in &masks[i + 1..] {
                if a | b != a && a | b != b && !found.contains_key(&(a | b)) {
                    let mut seeds = found[&a].generators.clone();
                    seeds.extend_from_slice(&found[&b].generators);
                    record(&mut found, &seeds);
                }
                let meet = a & b;
                if !found.contains_key(&meet) {
                    let seeds: Vec<usize> =
                        (0..classes.count()).filter(|&c| meet >> c & 1 == 1).map(|c| classes.reps[c]).collect();
                    record(&mut found, &seeds);
                }
            }
        }
        if found.len() == before {
            break;
        }
    }
    let mut subgroups: Vec<NormalSubgroup> = found.into_values().collect();
    subgroups.sort_by_key(|s| (s.order(), s.class_mask));
    Ok(NormalSubgroupLattice { classes, subgroups })
}

/// Direct check that `sub` is a normal subgroup of `group`.
pub fn verify_normal<E: GroupElement>(group: &FiniteGroup<E>, sub: &NormalSubgroup) -> bool {
    let mut inside = vec![false; group.order()];
    for &e in &sub.elements {
        inside[e] = true;
    }
    if !inside[0] || group.order() % sub.order() != 0 {
        return false;
    }
    if !sub.generators.iter().all(|&h| inside[h]) {
        return false;
    }
    // S * h in S for the generators h, and S is no larger than <h>
    let closed = sub.elements.iter().all(|&s| sub.generators.iter().all(|&h| inside[group.mul(s, h)]));
    let generated = group.closure_indices(&sub.generators).len() == sub.order();
    let stable = sub
        .generators
        .iter()
        .all(|&h| group.generators().iter().all(|&g| inside[group.conjugate(g, h)]));
    let small_pairs = sub.order() > 1000
        || sub.elements.iter().all(|&a| sub.elements.iter().all(|&b| inside[group.mul(a, b)]));
    closed && generated && stable && small_pairs
}

/// |G| divided by the largest order of an abelian normal subgroup.
pub fn min_index_normal_abelian<E: GroupElement>(group: &FiniteGroup<E>) -> Result<usize, GroupError> {
    if group.is_abelian() {
        return Ok(1);
    }
    let lattice = normal_subgroups(group)?;
    let best = lattice.subgroups.iter().filter(|s| s.abelian).map(|s| s.order()).max().unwrap_or(1);
    Ok(group.order() / best)
}

/// Outcome of a bounded normal-closure computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Closure {
    Whole,
    Proper(usize),
}

/// Normal closure of `seed`, stopping as soon as it is provably the whole
/// group: more than half the elements reached, or an element reached whose
/// class is already known to normally generate the group.
fn bounded_normal_closure<E: GroupElement>(
    group: &FiniteGroup<E>,
    classes: &ConjugacyClasses,
    generating: &[bool],
    seed: usize,
) -> Closure {
    let n = group.order();
    let mut gens = vec![seed];
    let outer = group.generators().to_vec();
    let mut inside = vec![false; n];
    loop {
        inside.iter_mut().for_each(|b| *b = false);
        inside[0] = true;
        let mut members = vec![0usize];
        let mut head = 0;
        while head < members.len() {
            let x = members[head];
            for &g in &gens {
                let y = group.mul(x, g);
                if !inside[y] {
                    if generating[classes.class_of[y] as usize] || 2 * (members.len() + 1) > n {
                        return Closure::Whole;
                    }
                    inside[y] = true;
                    members.push(y);
                }
            }
            head += 1;
        }
        let missing = gens
            .iter()
            .flat_map(|&h| outer.iter().map(move |&s| (s, h)))
            .map(|(s, h)| group.conjugate(s, h))
            .find(|&c| !inside[c]);
        match missing {
            Some(c) => gens.push(c),
            None => return Closure::Proper(members.len()),
        }
    }
}

/// Simplicity via class-representative normal closures.
pub fn is_simple<E: GroupElement>(group: &FiniteGroup<E>, classes: &ConjugacyClasses) -> bool {
    if group.order() == 1 {
        return false;
    }
    let mut generating = vec![false; classes.count()];
    for c in 0..classes.count() {
        let rep = classes.reps[c];
        if rep == 0 || generating[c] {
            continue;
        }
        match bounded_normal_closure(group, classes, &generating, rep) {
            Closure::Whole => generating[c] = true,
            Closure::Proper(_) => return false,
        }
    }
    true
}
