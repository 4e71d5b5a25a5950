use cubsurf::census::Census;
use cubsurf::forms::{act, monomial_values_f2, CoeffAction, CubicForm, MONOMIAL_ORDER, NUM_NONZERO_F2_FORMS};
use cubsurf::gf2k::{gf, gf2, Matrix};
use cubsurf::grouptool::{pgl, GroupElement, PglElement};
use cubsurf::idealtest::{buchberger, is_smooth, jacobian_ideal, normal_form, IdealBasis, Monomial, SparsePoly};
use cubsurf::projspace::{enumerate_points, ProjPoint};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MODULI: [u32; 8] = [0x3, 0x7, 0xb, 0x13, 0x25, 0x43, 0x83, 0x11d];

/// Shift-and-add product modulo the field polynomial.
fn slow_mul(k: u32, mut a: u32, mut b: u32) -> u32 {
    let m = MODULI[k as usize - 1];
    let mut acc = 0;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a >> k & 1 == 1 {
            a ^= m;
        }
    }
    acc
}

#[test]
fn field_axioms_exhaustive() {
    for k in 1..=8u32 {
        let f = gf(k);
        let q = f.q() as u32;
        for a in 0..q {
            for b in 0..q {
                let ab = f.mul(a as u8, b as u8);
                assert_eq!(ab as u32, slow_mul(k, a, b), "k={k} {a}*{b}");
                assert_eq!(ab, f.mul(b as u8, a as u8));
                assert_eq!(f.add(a as u8, b as u8), (a ^ b) as u8);
            }
            if a != 0 {
                let inv = f.inv(a as u8).unwrap();
                assert_eq!(f.mul(a as u8, inv), 1);
            } else {
                assert!(f.inv(0).is_none());
            }
            assert_eq!(f.mul(a as u8, 1), a as u8);
        }
        for a in 0..q as u8 {
            for b in 0..q as u8 {
                let ab = f.mul(a, b);
                let apb = a ^ b;
                for c in 0..q as u8 {
                    assert_eq!(f.mul(ab, c), f.mul(a, f.mul(b, c)));
                    assert_eq!(f.mul(apb, c), f.mul(a, c) ^ f.mul(b, c));
                }
            }
        }
    }
}

#[test]
fn frobenius() {
    for k in 1..=8u32 {
        let f = gf(k);
        for a in 0..f.q() {
            let a = a as u8;
            assert_eq!(f.pow(a, f.q() as u32), a);
            for b in 0..f.q() {
                let b = b as u8;
                assert_eq!(f.pow(a ^ b, 2), f.pow(a, 2) ^ f.pow(b, 2));
            }
        }
    }
}

fn random_matrix(rng: &mut ChaCha8Rng, k: u32, n: usize) -> Matrix {
    let f = gf(k);
    let entries: Vec<u8> = (0..n * n).map(|_| rng.gen_range(0..f.q()) as u8).collect();
    Matrix::from_rows(f, n, &entries)
}

#[test]
fn random_inversions() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for k in [1, 2, 3, 8] {
        for n in 1..=4 {
            for _ in 0..1000 {
                let m = random_matrix(&mut rng, k, n);
                match m.invert() {
                    Ok(inv) => {
                        assert_eq!(m.rank(), n);
                        assert!(m.mul(&inv).is_identity());
                        assert!(inv.mul(&m).is_identity());
                    }
                    Err(_) => assert!(m.rank() < n),
                }
            }
        }
    }
}

#[test]
fn euler_identity_all_forms() {
    for w in 1..=NUM_NONZERO_F2_FORMS {
        let f = CubicForm::from_word(w);
        let mut sum = CubicForm::zero(gf2());
        for v in 0..4 {
            sum = sum.add(&f.derivative(v).times_variable(v));
        }
        // 3 f = f in characteristic 2
        assert_eq!(sum, f, "{w:05x}");
    }
}

fn f2_rank(rows: &[u32]) -> usize {
    let mut basis: Vec<u32> = Vec::new();
    for &r in rows {
        let mut x = r;
        for &b in &basis {
            x = x.min(x ^ b);
        }
        if x != 0 {
            basis.push(x);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.len()
}

#[test]
fn evaluation_matrix_has_rank_14() {
    let points = enumerate_points(3, gf2());
    assert_eq!(points.len(), 15);
    let rows: Vec<u32> = points.iter().map(monomial_values_f2).collect();
    for (p, &row) in points.iter().zip(&rows) {
        for i in 0..20 {
            let f = CubicForm::from_word(1 << i);
            assert_eq!(f.evaluate(p).bits() as u32, row >> i & 1);
        }
    }
    assert_eq!(f2_rank(&rows), 14);
}

fn random_pgl(rng: &mut ChaCha8Rng, k: u32) -> PglElement {
    loop {
        if let Some(g) = PglElement::new(random_matrix(rng, k, 4)) {
            return g;
        }
    }
}

fn random_form(rng: &mut ChaCha8Rng, k: u32) -> CubicForm {
    let f = gf(k);
    let mut c = [0u8; 20];
    c.iter_mut().for_each(|x| *x = rng.gen_range(0..f.q()) as u8);
    CubicForm::from_coeffs(f, c)
}

#[test]
fn action_is_a_right_action() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for k in [1, 2] {
        for _ in 0..300 {
            let (g, h) = (random_pgl(&mut rng, k), random_pgl(&mut rng, k));
            let f = random_form(&mut rng, k);
            let lhs = act(g.matrix(), &act(h.matrix(), &f));
            assert_eq!(lhs, act(&h.matrix().mul(g.matrix()), &f));
            let v: [u8; 4] = std::array::from_fn(|_| rng.gen_range(0..gf(k).q()) as u8);
            assert_eq!(act(g.matrix(), &f).evaluate_vec(&v), f.evaluate_vec(&g.matrix().apply(&v)));
        }
    }
}

#[test]
fn coefficient_action_matches_substitution() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..200 {
        let g = random_pgl(&mut rng, 1);
        let ca = CoeffAction::new(g.matrix());
        let w = rng.gen_range(1..=NUM_NONZERO_F2_FORMS);
        assert_eq!(ca.apply(w), act(g.matrix(), &CubicForm::from_word(w)).word().unwrap());
    }
}

#[test]
fn smoothness_is_orbit_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..200 {
        let g = random_pgl(&mut rng, 1);
        let f = CubicForm::from_word(rng.gen_range(1..=NUM_NONZERO_F2_FORMS));
        let moved = act(g.matrix(), &f);
        assert_eq!(is_smooth(&f).unwrap().smooth, is_smooth(&moved).unwrap().smooth, "{f}");
    }
}

/// Orbit count by Burnside: the average number of fixed forms, each fixed
/// space being the kernel of rho(g) - 1 over F_2.
#[test]
fn burnside_orbit_count_matches_partition() {
    let group = pgl(gf2(), 4).unwrap();
    let mut fixed_total: u64 = 0;
    for g in group.elements() {
        let rows: Vec<u32> = (0..20)
            .map(|i| act(g.matrix(), &CubicForm::from_word(1 << i)).word().unwrap() ^ (1 << i))
            .collect();
        fixed_total += 1 << (20 - f2_rank(&rows));
    }
    assert_eq!(fixed_total % 20160, 0);
    let orbits_with_zero = fixed_total / 20160;
    let census = Census::compute().unwrap();
    assert_eq!(census.records.len() as u64 + 1, orbits_with_zero);
    for r in &census.records {
        assert_eq!(r.rep, census.partition.members(r.rep)[0]);
    }
}

#[test]
fn group_inverse_and_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..200 {
        let g = random_pgl(&mut rng, 3);
        let e = PglElement::identity(gf(3), 4);
        assert_eq!(g.compose(&g.inverse()), e);
        assert_eq!(g.compose(&e), g);
    }
}

fn monomials_of_degree(d: u8) -> Vec<Monomial> {
    let mut out = Vec::new();
    for a in 0..=d {
        for b in 0..=d - a {
            for c in 0..=d - a - b {
                out.push(Monomial([a, b, c, d - a - b - c]));
            }
        }
    }
    out
}

fn dense(p: &SparsePoly, basis: &[Monomial]) -> u64 {
    p.terms().iter().fold(0, |acc, (m, c)| {
        assert_eq!(*c, 1);
        acc | 1 << basis.iter().position(|b| b == m).unwrap()
    })
}

fn f2_reduce(basis: &[u64], mut x: u64) -> u64 {
    for &b in basis {
        x = x.min(x ^ b);
    }
    x
}

fn f2_basis(rows: impl IntoIterator<Item = u64>) -> Vec<u64> {
    let mut basis: Vec<u64> = Vec::new();
    for r in rows {
        let x = f2_reduce(&basis, r);
        if x != 0 {
            basis.push(x);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis
}

/// Membership of homogeneous polynomials in a homogeneous ideal, decided by
/// the reduced Gröbner basis and by linear algebra in each degree.
#[test]
fn groebner_membership_matches_linear_algebra() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..40 {
        let f = CubicForm::from_word(rng.gen_range(1..=NUM_NONZERO_F2_FORMS));
        let ideal = jacobian_ideal(&f).unwrap();
        let gens: Vec<SparsePoly> = ideal.gens.iter().filter(|g| !g.is_zero()).cloned().collect();
        let gb = buchberger(&IdealBasis::new(gens.clone()));
        for d in 3..=5u8 {
            let monos = monomials_of_degree(d);
            let mut products = Vec::new();
            for g in &gens {
                let gd = g.lm().degree() as u8;
                for m in monomials_of_degree(d - gd) {
                    products.push(g.mul_term(&m, 1));
                }
            }
            let span = f2_basis(products.iter().map(|p| dense(p, &monos)));
            for trial in 0..20 {
                let p = if trial % 2 == 0 {
                    products.iter().filter(|_| rng.gen_bool(0.5)).fold(SparsePoly::zero(gf2()), |a, b| a.add(b))
                } else {
                    SparsePoly::from_terms(gf2(), monos.iter().filter(|_| rng.gen_bool(0.3)).map(|m| (*m, 1)))
                };
                let member = f2_reduce(&span, dense(&p, &monos)) == 0;
                let nf = normal_form(&p, &gb.gens);
                assert_eq!(nf.is_zero(), member, "{f} degree {d}");
                assert!(normal_form(&nf, &gb.gens) == nf);
            }
        }
    }
}

proptest! {
    #[test]
    fn hex_round_trip(w in 0u32..(1 << 20)) {
        let f = CubicForm::from_word(w);
        let h = f.to_hex().unwrap();
        prop_assert_eq!(h.len(), 5);
        prop_assert_eq!(CubicForm::from_hex(&h).unwrap(), f);
    }

    #[test]
    fn projective_normalization(k in 1u32..=8, coords in prop::array::uniform4(any::<u8>()), l in 1u8..=255) {
        let f = gf(k);
        let mask = (f.q() - 1) as u8;
        let v = coords.map(|c| c & mask);
        let l = (l & mask).max(1);
        let scaled = v.map(|c| f.mul(c, l));
        let p = ProjPoint::new(f, &v);
        prop_assert_eq!(p, ProjPoint::new(f, &scaled));
        prop_assert_eq!(p.is_none(), v == [0; 4]);
    }
}

#[test]
fn monomial_order_is_lex_descending() {
    for w in MONOMIAL_ORDER.windows(2) {
        assert!(w[0] > w[1]);
    }
}
