//! Homogeneous cubic forms in x, y, z, t over GF(2^k).
//!
//! Coefficients are indexed by [`MONOMIAL_ORDER`], the 20 cubic exponent
//! tuples in descending lexicographic order. Over F_2 a form is the 20-bit
//! word whose bit `i` is the coefficient of monomial `i`; that word is the
//! form's index everywhere else in the crate.
//!
//! The substitution action is `act(g, f)(v) = f(g v)` for column vectors
//! `v`, so `act(g, act(h, f)) == act(h * g, f)`.

use std::fmt;
use std::sync::OnceLock;

use thiserror::Error;

use crate::gf2k::{gf2, FieldElement, FieldSpec, Matrix};
use crate::projspace::{ProjLine, ProjPoint};

pub const NUM_CUBIC_MONOMIALS: usize = 20;
pub const NUM_QUADRATIC_MONOMIALS: usize = 10;
/// Number of nonzero cubic forms over F_2.
pub const NUM_NONZERO_F2_FORMS: u32 = (1 << 20) - 1;

/// Exponents (e_x, e_y, e_z, e_t) of the cubic monomials; x^3 first, t^3 last.
pub const MONOMIAL_ORDER: [[u8; 4]; 20] = [
    [3, 0, 0, 0],
    [2, 1, 0, 0],
    [2, 0, 1, 0],
    [2, 0, 0, 1],
    [1, 2, 0, 0],
    [1, 1, 1, 0],
    [1, 1, 0, 1],
    [1, 0, 2, 0],
    [1, 0, 1, 1],
    [1, 0, 0, 2],
    [0, 3, 0, 0],
    [0, 2, 1, 0],
    [0, 2, 0, 1],
    [0, 1, 2, 0],
    [0, 1, 1, 1],
    [0, 1, 0, 2],
    [0, 0, 3, 0],
    [0, 0, 2, 1],
    [0, 0, 1, 2],
    [0, 0, 0, 3],
];

pub const QUADRATIC_ORDER: [[u8; 4]; 10] = [
    [2, 0, 0, 0],
    [1, 1, 0, 0],
    [1, 0, 1, 0],
    [1, 0, 0, 1],
    [0, 2, 0, 0],
    [0, 1, 1, 0],
    [0, 1, 0, 1],
    [0, 0, 2, 0],
    [0, 0, 1, 1],
    [0, 0, 0, 2],
];

const LINEAR_ORDER: [[u8; 4]; 4] = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]];

pub const VARIABLES: [&str; 4] = ["x", "y", "z", "t"];

fn monomials_of_degree(d: usize) -> &'static [[u8; 4]] {
    match d {
        0 => &[[0, 0, 0, 0]],
        1 => &LINEAR_ORDER,
        2 => &QUADRATIC_ORDER,
        3 => &MONOMIAL_ORDER,
        _ => panic!("degree {d} unsupported"),
    }
}

fn key(e: [u8; 4]) -> usize {
    (e[0] as usize) << 6 | (e[1] as usize) << 4 | (e[2] as usize) << 2 | e[3] as usize
}

/// Position of an exponent tuple of degree <= 3 within its degree's list.
pub fn monomial_index(e: [u8; 4]) -> usize {
    static TABLE: OnceLock<[u8; 256]> = OnceLock::new();
    let t = TABLE.get_or_init(|| {
        let mut t = [u8::MAX; 256];
        for d in 0..=3 {
            for (i, &m) in monomials_of_degree(d).iter().enumerate() {
                t[key(m)] = i as u8;
            }
        }
        t
    });
    let i = t[key(e)];
    assert!(i != u8::MAX, "exponent {e:?} is not of degree <= 3");
    i as usize
}

fn eval_monomial(field: &FieldSpec, e: [u8; 4], v: &[u8; 4]) -> u8 {
    let mut acc = 1u8;
    for j in 0..4 {
        for _ in 0..e[j] {
            acc = field.mul(acc, v[j]);
        }
    }
    acc
}

/// Dense homogeneous polynomial of degree <= 3, used while expanding products.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Dense {
    degree: usize,
    coeffs: Vec<u8>,
}

impl Dense {
    fn one() -> Dense {
        Dense { degree: 0, coeffs: vec![1] }
    }

    fn times_linear(&self, field: &FieldSpec, lin: &[u8; 4]) -> Dense {
        let out_deg = self.degree + 1;
        let mut coeffs = vec![0u8; monomials_of_degree(out_deg).len()];
        for (m, &c) in monomials_of_degree(self.degree).iter().zip(&self.coeffs) {
            if c == 0 {
                continue;
            }
            for (j, &l) in lin.iter().enumerate() {
                if l == 0 {
                    continue;
                }
                let mut e = *m;
                e[j] += 1;
                coeffs[monomial_index(e)] ^= field.mul(c, l);
            }
        }
        Dense { degree: out_deg, coeffs }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormError {
    #[error("the family parameter must be a nonzero 6-bit mask, got {0:#x}")]
    BadFamilyParameter(u8),
    #[error("operation requires forms over F_2")]
    NotBinary,
    #[error("invalid cubic form encoding {0:?}")]
    BadEncoding(String),
}

/// A homogeneous cubic form in four variables.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct CubicForm {
    field: &'static FieldSpec,
    coeffs: [u8; 20],
}

impl fmt::Debug for CubicForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CubicForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if c != 1 {
                write!(f, "[{c}]")?;
            }
            let mut wrote = false;
            for (v, &e) in VARIABLES.iter().zip(&MONOMIAL_ORDER[i]) {
                match e {
                    0 => {}
                    1 => write!(f, "{v}")?,
                    _ => write!(f, "{v}^{e}")?,
                }
                wrote |= e > 0;
            }
            debug_assert!(wrote);
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl CubicForm {
    pub fn zero(field: &'static FieldSpec) -> CubicForm {
        CubicForm { field, coeffs: [0; 20] }
    }

    pub fn from_coeffs(field: &'static FieldSpec, coeffs: [u8; 20]) -> CubicForm {
        assert!(coeffs.iter().all(|&c| (c as usize) < field.q()));
        CubicForm { field, coeffs }
    }

    /// The F_2 form with bit `i` of `word` as coefficient of monomial `i`.
    pub fn from_word(word: u32) -> CubicForm {
        assert!(word < 1 << 20, "{word:#x} has more than 20 bits");
        let mut coeffs = [0u8; 20];
        for (i, c) in coeffs.iter_mut().enumerate() {
            *c = (word >> i & 1) as u8;
        }
        CubicForm { field: gf2(), coeffs }
    }

    /// Sum of the listed monomials with coefficient 1.
    pub fn from_monomials(field: &'static FieldSpec, monos: &[[u8; 4]]) -> CubicForm {
        let mut f = CubicForm::zero(field);
        for &m in monos {
            f.coeffs[monomial_index(m)] ^= 1;
        }
        f
    }

    pub fn field(&self) -> &'static FieldSpec {
        self.field
    }

    pub fn coeffs(&self) -> &[u8; 20] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> FieldElement {
        self.field.elem(self.coeffs[i])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_binary(&self) -> bool {
        self.coeffs.iter().all(|&c| c <= 1)
    }

    /// The 20-bit encoding; only defined for F_2 forms.
    pub fn word(&self) -> Result<u32, FormError> {
        if !self.is_binary() {
            return Err(FormError::NotBinary);
        }
        Ok(self.coeffs.iter().enumerate().fold(0u32, |w, (i, &c)| w | (c as u32) << i))
    }

    /// Five lower-case hex digits of the 20-bit word.
    pub fn to_hex(&self) -> Result<String, FormError> {
        Ok(format!("{:05x}", self.word()?))
    }

    pub fn from_hex(s: &str) -> Result<CubicForm, FormError> {
        let t = s.trim().trim_start_matches("0x");
        if t.is_empty() || t.len() > 5 {
            return Err(FormError::BadEncoding(s.to_string()));
        }
        let w = u32::from_str_radix(t, 16).map_err(|_| FormError::BadEncoding(s.to_string()))?;
        if w >= 1 << 20 {
            return Err(FormError::BadEncoding(s.to_string()));
        }
        Ok(CubicForm::from_word(w))
    }

    /// The same F_2 form viewed over GF(2^k).
    pub fn lift(&self, field: &'static FieldSpec) -> Result<CubicForm, FormError> {
        if self.field.k() != 1 && self.field != field {
            return Err(FormError::NotBinary);
        }
        Ok(CubicForm { field, coeffs: self.coeffs })
    }

    pub fn evaluate_vec(&self, v: &[u8; 4]) -> u8 {
        let mut acc = 0u8;
        for (m, &c) in MONOMIAL_ORDER.iter().zip(&self.coeffs) {
            if c != 0 {
                acc ^= self.field.mul(c, eval_monomial(self.field, *m, v));
            }
        }
        acc
    }

    /// Value at the normalized representative of `p`.
    pub fn evaluate(&self, p: &ProjPoint) -> FieldElement {
        assert_eq!(p.dim(), 3);
        self.field.elem(self.evaluate_vec(&p.raw()))
    }

    pub fn add(&self, other: &CubicForm) -> CubicForm {
        assert!(self.field == other.field);
        let mut r = *self;
        for (a, b) in r.coeffs.iter_mut().zip(&other.coeffs) {
            *a ^= b;
        }
        r
    }

    pub fn scale(&self, c: u8) -> CubicForm {
        let mut r = *self;
        for a in r.coeffs.iter_mut() {
            *a = self.field.mul(*a, c);
        }
        r
    }

    /// Formal partial derivative with respect to variable `v` (0 = x, ..., 3 = t).
    pub fn derivative(&self, v: usize) -> QuadForm {
        let mut out = [0u8; 10];
        for (m, &c) in MONOMIAL_ORDER.iter().zip(&self.coeffs) {
            if c != 0 && m[v] % 2 == 1 {
                let mut e = *m;
                e[v] -= 1;
                out[monomial_index(e)] ^= c;
            }
        }
        QuadForm { field: self.field, coeffs: out }
    }
}

/// A quadratic form, the carrier of first partials.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct QuadForm {
    field: &'static FieldSpec,
    coeffs: [u8; 10],
}

impl QuadForm {
    pub fn from_monomials(field: &'static FieldSpec, monos: &[[u8; 4]]) -> QuadForm {
        let mut coeffs = [0u8; 10];
        for &m in monos {
            coeffs[monomial_index(m)] ^= 1;
        }
        QuadForm { field, coeffs }
    }

    pub fn coeffs(&self) -> &[u8; 10] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn evaluate_vec(&self, v: &[u8; 4]) -> u8 {
        let mut acc = 0u8;
        for (m, &c) in QUADRATIC_ORDER.iter().zip(&self.coeffs) {
            if c != 0 {
                acc ^= self.field.mul(c, eval_monomial(self.field, *m, v));
            }
        }
        acc
    }

    /// Product with the variable `v`.
    pub fn times_variable(&self, v: usize) -> CubicForm {
        let mut out = CubicForm::zero(self.field);
        for (m, &c) in QUADRATIC_ORDER.iter().zip(&self.coeffs) {
            let mut e = *m;
            e[v] += 1;
            out.coeffs[monomial_index(e)] ^= c;
        }
        out
    }
}

/// The form f(g v).
pub fn act(g: &Matrix, f: &CubicForm) -> CubicForm {
    assert_eq!(g.n(), 4, "cubic forms need 4 x 4 matrices");
    assert!(g.field() == f.field(), "field mismatch");
    let field = f.field();
    let rows = g.rows();
    let mut out = [0u8; 20];
    for (m, &c) in MONOMIAL_ORDER.iter().zip(f.coeffs()) {
        if c == 0 {
            continue;
        }
        let mut p = Dense::one();
        for (j, &e) in m.iter().enumerate() {
            for _ in 0..e {
                p = p.times_linear(field, &rows[j]);
            }
        }
        for (o, &pc) in out.iter_mut().zip(&p.coeffs) {
            *o ^= field.mul(c, pc);
        }
    }
    CubicForm { field, coeffs: out }
}

/// The F_2-linear map induced by `g` on 20-bit form words.
///
/// `cols[i]` is the word of `act(g, monomial i)`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct CoeffAction {
    cols: [u32; 20],
}

impl CoeffAction {
    pub fn new(g: &Matrix) -> CoeffAction {
        assert_eq!(g.field().k(), 1, "coefficient actions are only precomputed over F_2");
        let mut cols = [0u32; 20];
        for (i, c) in cols.iter_mut().enumerate() {
            *c = act(g, &CubicForm::from_word(1 << i)).word().expect("binary");
        }
        CoeffAction { cols }
    }

    #[inline]
    pub fn apply(&self, word: u32) -> u32 {
        let mut w = word;
        let mut acc = 0u32;
        while w != 0 {
            let i = w.trailing_zeros();
            acc ^= self.cols[i as usize];
            w &= w - 1;
        }
        acc
    }
}

/// Bit `i` is the value of monomial `i` at the F_2-point `p`.
pub fn monomial_values_f2(p: &ProjPoint) -> u32 {
    let v = p.raw();
    MONOMIAL_ORDER.iter().enumerate().fold(0u32, |acc, (i, m)| {
        let val = (0..4).all(|j| m[j] == 0 || v[j] == 1);
        acc | (val as u32) << i
    })
}

/// Value of the F_2 form `word` at a point whose monomial mask is `mask`.
#[inline]
pub fn eval_word(word: u32, mask: u32) -> u32 {
    (word & mask).count_ones() & 1
}

/// x^2 t + y^2 z + y z^2 + x t^2.
pub fn paper_form_1(field: &'static FieldSpec) -> CubicForm {
    CubicForm::from_monomials(field, &[[2, 0, 0, 1], [0, 2, 1, 0], [0, 1, 2, 0], [1, 0, 0, 2]])
}

/// x^3 + y^3 + z^3 + t^3.
pub fn fermat_form(field: &'static FieldSpec) -> CubicForm {
    CubicForm::from_monomials(field, &[[3, 0, 0, 0], [0, 3, 0, 0], [0, 0, 3, 0], [0, 0, 0, 3]])
}

/// Pairs (u, v) of variables in the order xy, xz, xt, yz, yt, zt.
const FAMILY_PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Sum of a_i * u v (u + v) over the six variable pairs; bit 0 of `mask` is a_1.
///
/// These are exactly the F_2 cubics vanishing at all 15 points of P^3(F_2).
pub fn vanishing_family_form(mask: u8) -> Result<CubicForm, FormError> {
    if mask == 0 || mask >= 64 {
        return Err(FormError::BadFamilyParameter(mask));
    }
    let mut monos = Vec::new();
    for (i, &(u, v)) in FAMILY_PAIRS.iter().enumerate() {
        if mask >> i & 1 == 1 {
            let mut a = [0u8; 4];
            a[u] = 2;
            a[v] = 1;
            let mut b = [0u8; 4];
            b[u] = 1;
            b[v] = 2;
            monos.push(a);
            monos.push(b);
        }
    }
    Ok(CubicForm::from_monomials(gf2(), &monos))
}

/// The product of the three planes through a line of P^3(F_2).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PencilCubic {
    pub line: ProjLine,
    pub form: CubicForm,
}

/// Linear forms (as coefficient vectors) vanishing on `l`.
pub fn planes_through(field: &FieldSpec, l: &ProjLine) -> Vec<[u8; 4]> {
    let q = field.q();
    let basis = l.basis();
    let mut out = Vec::new();
    for code in 1..q.pow(4) {
        let mut a = [0u8; 4];
        let mut rest = code;
        for i in (0..4).rev() {
            a[i] = (rest % q) as u8;
            rest /= q;
        }
        if a.iter().find(|&&x| x != 0) != Some(&1) {
            continue;
        }
        let vanishes = basis.iter().all(|row| (0..4).fold(0u8, |s, j| s ^ field.mul(a[j], row[j])) == 0);
        if vanishes {
            out.push(a);
        }
    }
    out
}

pub fn pencil_cubic(field: &'static FieldSpec, l: &ProjLine) -> Result<PencilCubic, FormError> {
    if field.k() != 1 {
        return Err(FormError::NotBinary);
    }
    let planes = planes_through(field, l);
    debug_assert_eq!(planes.len(), 3);
    let mut p = Dense::one();
    for a in &planes {
        p = p.times_linear(field, a);
    }
    let mut coeffs = [0u8; 20];
    coeffs.copy_from_slice(&p.coeffs);
    Ok(PencilCubic { line: *l, form: CubicForm { field, coeffs } })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2k::gf;
    use crate::projspace::{enumerate_lines, enumerate_points};

    fn lex_desc(a: &[u8; 4], b: &[u8; 4]) -> bool {
        a > b
    }

    #[test]
    fn monomial_order_is_lex_descending() {
        for w in MONOMIAL_ORDER.windows(2) {
            assert!(lex_desc(&w[0], &w[1]));
        }
        for w in QUADRATIC_ORDER.windows(2) {
            assert!(lex_desc(&w[0], &w[1]));
        }
        assert!(MONOMIAL_ORDER.iter().all(|m| m.iter().sum::<u8>() == 3));
        assert_eq!(MONOMIAL_ORDER[0], [3, 0, 0, 0]);
        assert_eq!(MONOMIAL_ORDER[19], [0, 0, 0, 3]);
    }

    #[test]
    fn evaluation_examples() {
        let f2 = gf2();
        let pts = enumerate_points(3, f2);
        let f1 = paper_form_1(f2);
        assert!(pts.iter().all(|p| f1.evaluate(p).is_zero()));
        let x3 = CubicForm::from_monomials(f2, &[[3, 0, 0, 0]]);
        assert_eq!(x3.evaluate(&ProjPoint::new(f2, &[1, 0, 0, 0]).unwrap()).bits(), 1);
        let fermat = fermat_form(f2);
        assert!(fermat.evaluate(&ProjPoint::new(f2, &[1, 1, 0, 0]).unwrap()).is_zero());
        for p in &pts {
            let mask = monomial_values_f2(p);
            for w in [0x12345u32, 0xfffff, f1.word().unwrap()] {
                let slow = CubicForm::from_word(w).evaluate(p).bits() as u32;
                assert_eq!(eval_word(w, mask), slow);
            }
        }
    }

    #[test]
    fn act_examples() {
        let f2 = gf2();
        let f1 = paper_form_1(f2);
        assert_eq!(act(&Matrix::identity(f2, 4), &f1), f1);
        let omega = Matrix::from_rows(f2, 4, &[0, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0, 0]);
        assert_eq!(act(&omega, &f1), f1);
        // x -> x + y
        let g = Matrix::from_rows(f2, 4, &[1, 1, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1]);
        let x3 = CubicForm::from_monomials(f2, &[[3, 0, 0, 0]]);
        let expect = CubicForm::from_monomials(f2, &[[3, 0, 0, 0], [2, 1, 0, 0], [1, 2, 0, 0], [0, 3, 0, 0]]);
        assert_eq!(act(&g, &x3), expect);
    }

    #[test]
    fn act_composition_convention() {
        let f2 = gf2();
        let g = Matrix::from_rows(f2, 4, &[1, 1, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 1, 0, 1]);
        let h = Matrix::from_rows(f2, 4, &[0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 1, 0, 0, 0]);
        let f = CubicForm::from_word(0x9a3c1);
        assert_eq!(act(&g, &act(&h, &f)), act(&h.mul(&g), &f));
        let ca = CoeffAction::new(&g);
        assert_eq!(ca.apply(f.word().unwrap()), act(&g, &f).word().unwrap());
    }

    #[test]
    fn derivative_examples() {
        let f2 = gf2();
        let x2t = CubicForm::from_monomials(f2, &[[2, 0, 0, 1]]);
        assert!(x2t.derivative(0).is_zero());
        assert_eq!(x2t.derivative(3), QuadForm::from_monomials(f2, &[[2, 0, 0, 0]]));
        let g = CubicForm::from_monomials(f2, &[[0, 2, 1, 0], [0, 1, 2, 0]]);
        assert_eq!(g.derivative(2), QuadForm::from_monomials(f2, &[[0, 2, 0, 0]]));
    }

    #[test]
    fn distinguished_forms() {
        let fam = vanishing_family_form(0b000001).unwrap();
        assert_eq!(fam, CubicForm::from_monomials(gf2(), &[[2, 1, 0, 0], [1, 2, 0, 0]]));
        let f1 = paper_form_1(gf2());
        let idx: Vec<usize> = (0..20).filter(|&i| f1.coeffs()[i] == 1).collect();
        let expect: Vec<usize> =
            [[2, 0, 0, 1], [0, 2, 1, 0], [0, 1, 2, 0], [1, 0, 0, 2]].iter().map(|&m| monomial_index(m)).collect();
        let mut expect = expect;
        expect.sort();
        assert_eq!(idx, expect);
        let members: Vec<_> = (1..64u8).map(|a| vanishing_family_form(a).unwrap()).collect();
        assert_eq!(members.len(), 63);
        assert_eq!(vanishing_family_form(0), Err(FormError::BadFamilyParameter(0)));
        assert_eq!(vanishing_family_form(64), Err(FormError::BadFamilyParameter(64)));
    }

    #[test]
    fn pencil_cubics() {
        let f2 = gf2();
        let l = ProjLine::span(f2, [0, 0, 1, 0], [0, 0, 0, 1]).unwrap();
        let pc = pencil_cubic(f2, &l).unwrap();
        assert_eq!(pc.form, CubicForm::from_monomials(f2, &[[2, 1, 0, 0], [1, 2, 0, 0]]));
        let pts = enumerate_points(3, f2);
        let mut forms: Vec<u32> = enumerate_lines(f2)
            .iter()
            .map(|l| pencil_cubic(f2, l).unwrap().form)
            .inspect(|f| assert!(pts.iter().all(|p| f.evaluate(p).is_zero())))
            .map(|f| f.word().unwrap())
            .collect();
        forms.sort();
        forms.dedup();
        assert_eq!(forms.len(), 35);
        assert_eq!(pencil_cubic(gf(2), &ProjLine::span(gf(2), [1, 0, 0, 0], [0, 1, 0, 0]).unwrap()), Err(FormError::NotBinary));
    }

    #[test]
    fn hex_roundtrip_and_errors() {
        let f1 = paper_form_1(gf2());
        let hex = f1.to_hex().unwrap();
        assert_eq!(hex.len(), 5);
        assert_eq!(CubicForm::from_hex(&hex).unwrap(), f1);
        assert!(CubicForm::from_hex("100000").is_err());
        assert!(CubicForm::from_hex("zz").is_err());
        assert!(CubicForm::from_hex("").is_err());
    }
}
