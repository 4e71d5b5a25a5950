//! Structural recognition: the permutation action on the points of
//! P^3(F_2), symmetric groups, explicit isomorphisms, and the arithmetic
//! certificates about the order-720 automorphism group.

use std::fmt;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::arith::{factorize, format_factorization};
use crate::forms::{eval_word, monomial_values_f2, NUM_NONZERO_F2_FORMS};
use crate::gf2k::gf2;
use crate::grouptool::{
    conjugacy_classes, gl_order, normal_subgroups, pgl, ConjugacyClasses, FiniteGroup, GroupElement, GroupError,
    PglElement,
};
use crate::projspace::{enumerate_points, ProjPoint};
use crate::unionfind::UnionFind;

/// A permutation of `0..n`, composed left to right: `(p * q)(i) = q(p(i))`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(pub Vec<u8>);

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl Perm {
    pub fn identity(n: usize) -> Perm {
        Perm((0..n as u8).collect())
    }

    pub fn transposition(n: usize, a: usize, b: usize) -> Perm {
        let mut p = Perm::identity(n);
        p.0.swap(a, b);
        p
    }

    /// i -> i + 1 mod n.
    pub fn cycle(n: usize) -> Perm {
        Perm((0..n).map(|i| ((i + 1) % n) as u8).collect())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }
}

impl GroupElement for Perm {
    fn identity_like(&self) -> Self {
        Perm::identity(self.0.len())
    }

    fn compose(&self, other: &Self) -> Self {
        Perm(self.0.iter().map(|&i| other.0[i as usize]).collect())
    }

    fn inverse(&self) -> Self {
        let mut out = vec![0u8; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            out[j as usize] = i as u8;
        }
        Perm(out)
    }
}

/// S_n generated by (0 1) and (0 1 ... n-1).
pub fn symmetric_group(n: usize) -> FiniteGroup<Perm> {
    assert!((1..=7).contains(&n), "symmetric groups are supported for n <= 7");
    let mut gens = vec![Perm::transposition(n, 0, n.min(2) - 1), Perm::cycle(n)];
    gens.retain(|g| *g != Perm::identity(n));
    gens.dedup();
    FiniteGroup::generate(Perm::identity(n), &gens, usize::MAX).expect("no limit")
}

/// Permutation images of group elements on the points of P^3.
#[derive(Clone, Debug)]
pub struct PermAction {
    pub points: Vec<ProjPoint>,
    /// `images[g][p]` is the index of `g . points[p]`.
    pub images: Vec<Vec<u8>>,
    pub faithful: bool,
    /// Sorted ascending.
    pub orbit_sizes: Vec<usize>,
}

impl PermAction {
    pub fn degree(&self) -> usize {
        self.points.len()
    }

    pub fn is_transitive(&self) -> bool {
        self.orbit_sizes == vec![self.degree()]
    }
}

/// The action g . p = [g v] on the points of P^3 over the group's field.
pub fn action_on_points(group: &FiniteGroup<PglElement>) -> PermAction {
    let m = group.identity().matrix();
    let field = m.field();
    let points = enumerate_points(m.n() - 1, field);
    let pos = |p: &ProjPoint| points.binary_search(p).expect("normalized point");
    let images: Vec<Vec<u8>> = group
        .elements()
        .iter()
        .map(|g| {
            points
                .iter()
                .map(|p| {
                    let v = g.matrix().apply(p.coords());
                    pos(&ProjPoint::new(field, &v[..p.coords().len()]).expect("invertible")) as u8
                })
                .collect()
        })
        .collect();
    let identity: Vec<u8> = (0..points.len() as u8).collect();
    let faithful = images.iter().filter(|im| **im == identity).count() == 1;
    let mut uf = UnionFind::new(points.len());
    for &g in group.generators() {
        for (p, &img) in images[g].iter().enumerate() {
            uf.union(p, img as usize);
        }
    }
    let mut counts = vec![0usize; points.len()];
    for p in 0..points.len() {
        counts[uf.find(p)] += 1;
    }
    let mut orbit_sizes: Vec<usize> = counts.into_iter().filter(|&c| c > 0).collect();
    orbit_sizes.sort_unstable();
    PermAction { points, images, faithful, orbit_sizes }
}

/// Generator images of an isomorphism G -> H.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IsoWitness {
    /// Element indices in G.
    pub generators: Vec<usize>,
    /// Element indices in H.
    pub images: Vec<usize>,
    pub verified: bool,
}

fn element_orders<E: GroupElement>(g: &FiniteGroup<E>) -> Vec<usize> {
    (0..g.order()).map(|i| g.element_order(i)).collect()
}

/// Two generators if a short search finds them, otherwise a greedy set.
pub fn small_generating_set<E: GroupElement>(g: &FiniteGroup<E>) -> Vec<usize> {
    let n = g.order();
    if n == 1 {
        return Vec::new();
    }
    let orders = element_orders(g);
    let classes = conjugacy_classes(g);
    let mut firsts: Vec<usize> = classes.reps.clone();
    firsts.sort_by_key(|&r| std::cmp::Reverse(orders[r]));
    for &a in firsts.iter().take(4) {
        if g.closure_indices(&[a]).len() == n {
            return vec![a];
        }
        for b in 1..n.min(400) {
            if g.closure_indices(&[a, b]).len() == n {
                return vec![a, b];
            }
        }
    }
    let mut gens = Vec::new();
    let mut reached = g.closure_indices(&gens);
    for x in 0..n {
        if reached.len() == n {
            break;
        }
        if !reached.contains(&x) {
            gens.push(x);
            reached = g.closure_indices(&gens);
        }
    }
    gens
}

/// Extends generator images to a full map G -> H, or `None` if the
/// assignment is not a well-defined bijective homomorphism.
fn extend_map<A: GroupElement, B: GroupElement>(
    g: &FiniteGroup<A>,
    h: &FiniteGroup<B>,
    gens: &[usize],
    images: &[usize],
) -> Option<Vec<usize>> {
    let n = g.order();
    let mut map = vec![usize::MAX; n];
    map[0] = 0;
    let mut queue = vec![0usize];
    let mut head = 0;
    while head < queue.len() {
        let x = queue[head];
        for (&s, &t) in gens.iter().zip(images) {
            let y = g.mul(x, s);
            let my = h.mul(map[x], t);
            if map[y] == usize::MAX {
                map[y] = my;
                queue.push(y);
            } else if map[y] != my {
                return None;
            }
        }
        head += 1;
    }
    if queue.len() != n {
        return None;
    }
    let mut hit = vec![false; h.order()];
    for &m in &map {
        if std::mem::replace(&mut hit[m], true) {
            return None;
        }
    }
    Some(map)
}

/// Rebuilds the map from the witness alone and checks it is an isomorphism.
pub fn verify_witness<A: GroupElement, B: GroupElement>(
    g: &FiniteGroup<A>,
    h: &FiniteGroup<B>,
    w: &IsoWitness,
) -> bool {
    if g.order() != h.order() || w.generators.len() != w.images.len() {
        return false;
    }
    let Some(map) = extend_map(g, h, &w.generators, &w.images) else {
        return false;
    };
    if g.order() <= 1000 {
        for a in 0..g.order() {
            for b in 0..g.order() {
                if map[g.mul(a, b)] != h.mul(map[a], map[b]) {
                    return false;
                }
            }
        }
    }
    true
}

fn class_sizes(c: &ConjugacyClasses, n: usize) -> Vec<usize> {
    (0..n).map(|i| c.sizes[c.class_of[i] as usize]).collect()
}

/// Backtracking over generator images, pruned by element order, class size
/// and the orders of pairwise products.
pub fn is_isomorphic<A: GroupElement, B: GroupElement>(g: &FiniteGroup<A>, h: &FiniteGroup<B>) -> Option<IsoWitness> {
    if g.order() != h.order() {
        return None;
    }
    let n = g.order();
    let (cg, ch) = (conjugacy_classes(g), conjugacy_classes(h));
    if cg.size_profile() != ch.size_profile() {
        return None;
    }
    let (og, oh) = (element_orders(g), element_orders(h));
    let (sg, sh) = (class_sizes(&cg, n), class_sizes(&ch, n));
    let mut pg: Vec<(usize, usize)> = og.iter().copied().zip(sg.iter().copied()).collect();
    let mut ph: Vec<(usize, usize)> = oh.iter().copied().zip(sh.iter().copied()).collect();
    pg.sort_unstable();
    ph.sort_unstable();
    if pg != ph {
        return None;
    }
    let gens = small_generating_set(g);
    if gens.is_empty() {
        return Some(IsoWitness { generators: vec![], images: vec![], verified: true });
    }
    let candidates: Vec<Vec<usize>> = gens
        .iter()
        .enumerate()
        .map(|(depth, &x)| {
            (0..n)
                .filter(|&y| oh[y] == og[x] && sh[y] == sg[x])
                // conjugating an isomorphism keeps it one, so the first
                // image only needs one element per class
                .filter(|&y| depth > 0 || ch.reps[ch.class_of[y] as usize] == y)
                .collect()
        })
        .collect();
    let mut images = Vec::with_capacity(gens.len());
    let found = backtrack(g, h, &gens, &candidates, &og, &oh, &mut images);
    found.then(|| {
        let mut w = IsoWitness { generators: gens, images, verified: false };
        w.verified = verify_witness(g, h, &w);
        w
    })
}

fn backtrack<A: GroupElement, B: GroupElement>(
    g: &FiniteGroup<A>,
    h: &FiniteGroup<B>,
    gens: &[usize],
    candidates: &[Vec<usize>],
    og: &[usize],
    oh: &[usize],
    images: &mut Vec<usize>,
) -> bool {
    let depth = images.len();
    if depth == gens.len() {
        return extend_map(g, h, gens, images).is_some();
    }
    for &y in &candidates[depth] {
        let consistent = (0..depth).all(|i| {
            og[g.mul(gens[i], gens[depth])] == oh[h.mul(images[i], y)]
                && og[g.mul(gens[i], g.inv(gens[depth]))] == oh[h.mul(images[i], h.inv(y))]
        });
        if !consistent {
            continue;
        }
        images.push(y);
        if backtrack(g, h, gens, candidates, og, oh, images) {
            return true;
        }
        images.pop();
    }
    false
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CertificateError {
    #[error("certificate ({0}) failed")]
    Failed(&'static str),
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaA2Report {
    pub certificates: Vec<Certificate>,
}

impl LemmaA2Report {
    pub fn pass(&self) -> bool {
        self.certificates.iter().all(|c| c.pass)
    }

    /// The first failing certificate as an error.
    pub fn check(&self) -> Result<(), CertificateError> {
        match self.certificates.iter().find(|c| !c.pass) {
            Some(c) => Err(CertificateError::Failed(c.name)),
            None => Ok(()),
        }
    }
}

/// (a): |GL_3(F_2)| = 168, materialized and by formula, and 5 does not divide it.
pub fn certificate_gl3_order() -> Result<Certificate, CertificateError> {
    let start = Instant::now();
    let materialized = pgl(gf2(), 3)?.order() as u64;
    let formula = gl_order(3, 2);
    let pass = materialized == 168 && formula == 168 && materialized % 5 != 0;
    Ok(Certificate {
        name: "a",
        pass,
        detail: format!("|GL3(F2)| = {materialized} = {}; 5 does not divide it", format_factorization(&factorize(formula))),
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// (b): a subgroup of index 5 would have a normal kernel N with |G/N|
/// dividing 120 and divisible by 5; no normal subgroup allows that.
pub fn certificate_no_index_five<E: GroupElement>(group: &FiniteGroup<E>) -> Result<Certificate, CertificateError> {
    let start = Instant::now();
    let lattice = normal_subgroups(group)?;
    let orders = lattice.orders();
    let n = group.order();
    let survivors: Vec<usize> =
        orders.iter().map(|&o| n / o).filter(|&img| 120 % img == 0 && img % 5 == 0).collect();
    let pass = orders == vec![1, 360, 720] && survivors.is_empty();
    Ok(Certificate {
        name: "b",
        pass,
        detail: format!("normal subgroup orders {orders:?}; quotient orders admitting a transitive action on 5 points: {survivors:?}"),
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// (c): the action on the 15 points is faithful and transitive.
pub fn certificate_transitive(group: &FiniteGroup<PglElement>) -> Certificate {
    let start = Instant::now();
    let action = action_on_points(group);
    Certificate {
        name: "c",
        pass: action.faithful && action.is_transitive() && action.degree() == 15,
        detail: format!("faithful = {}, orbit sizes {:?}", action.faithful, action.orbit_sizes),
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// Number of nonzero F_2 cubic forms with no F_2-rational zero.
pub fn count_pointless_forms() -> u64 {
    let masks: Vec<u32> = enumerate_points(3, gf2()).iter().map(monomial_values_f2).collect();
    (1..=NUM_NONZERO_F2_FORMS)
        .into_par_iter()
        .filter(|&w| masks.iter().all(|&m| eval_word(w, m) == 1))
        .count() as u64
}

/// (d): every nonzero cubic form over F_2 has an F_2-point.
pub fn certificate_chevalley_warning() -> Certificate {
    let start = Instant::now();
    let bad = count_pointless_forms();
    Certificate {
        name: "d",
        pass: bad == 0,
        detail: format!("{bad} of {NUM_NONZERO_F2_FORMS} nonzero forms have no F2-point"),
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// All four certificates for the order-720 automorphism group.
pub fn lemma_a2_certificates(group: &FiniteGroup<PglElement>) -> Result<LemmaA2Report, CertificateError> {
    Ok(LemmaA2Report {
        certificates: vec![
            certificate_gl3_order()?,
            certificate_no_index_five(group)?,
            certificate_transitive(group),
            certificate_chevalley_warning(),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::paper_form_1;
    use crate::gf2k::Matrix;
    use crate::grouptool::{closure, stabilizer};

    #[test]
    fn symmetric_groups() {
        assert_eq!(symmetric_group(6).order(), 720);
        assert_eq!(symmetric_group(1).order(), 1);
        assert_eq!(symmetric_group(2).order(), 2);
        assert_eq!(symmetric_group(4).order(), 24);
        assert_eq!(conjugacy_classes(&symmetric_group(6)).count(), 11);
    }

    #[test]
    fn cyclic_vs_klein() {
        let c4 = FiniteGroup::generate(Perm::identity(4), &[Perm::cycle(4)], 100).unwrap();
        let v4 = FiniteGroup::generate(
            Perm::identity(4),
            &[Perm(vec![1, 0, 3, 2]), Perm(vec![2, 3, 0, 1])],
            100,
        )
        .unwrap();
        assert_eq!(c4.order(), 4);
        assert_eq!(v4.order(), 4);
        assert!(is_isomorphic(&c4, &v4).is_none());
        assert!(is_isomorphic(&c4, &c4).unwrap().verified);
    }

    #[test]
    fn s6_self_isomorphic() {
        let s6 = symmetric_group(6);
        let w = is_isomorphic(&s6, &s6).unwrap();
        assert!(w.verified);
        assert!(verify_witness(&s6, &s6, &w));
        let bogus = IsoWitness { generators: w.generators.clone(), images: vec![0; w.images.len()], verified: false };
        assert!(!verify_witness(&s6, &s6, &bogus));
    }

    #[test]
    fn trivial_and_involution_actions() {
        let f2 = gf2();
        let t = closure(f2, 4, &[], 1).unwrap();
        let a = action_on_points(&t);
        assert_eq!(a.orbit_sizes, vec![1; 15]);
        let omega = PglElement::new(Matrix::from_rows(f2, 4, &[0, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0, 0])).unwrap();
        let c2 = closure(f2, 4, &[omega], 10).unwrap();
        let a = action_on_points(&c2);
        assert_eq!(a.orbit_sizes.iter().sum::<usize>(), 15);
        assert!(a.orbit_sizes.iter().all(|&s| s <= 2));
        // fixed points of the coordinate reversal: (a:b:b:a)
        assert_eq!(a.orbit_sizes.iter().filter(|&&s| s == 1).count(), 3);
    }

    #[test]
    fn stabilizer_action_is_a_transitive_homomorphism() {
        let f2 = gf2();
        let g = pgl(f2, 4).unwrap();
        let st = stabilizer(&g, &paper_form_1(f2)).unwrap();
        let a = action_on_points(&st);
        assert!(a.faithful);
        assert_eq!(a.orbit_sizes, vec![15]);
        for x in 0..st.order() {
            for y in (0..st.order()).step_by(7) {
                let xy = st.mul(x, y);
                let composed: Vec<u8> = (0..15).map(|p| a.images[x][a.images[y][p] as usize]).collect();
                assert_eq!(a.images[xy], composed);
            }
        }
        let w = is_isomorphic(&st, &symmetric_group(6)).unwrap();
        assert!(w.verified);
    }

    #[test]
    fn gl3_certificate() {
        let c = certificate_gl3_order().unwrap();
        assert!(c.pass);
        assert!(c.detail.contains("2^3 * 3 * 7"));
    }
}
