//! Arithmetic in GF(2^k) for 1 <= k <= 8 and small dense matrices over it.
//!
//! Every field uses a fixed modulus so that downstream encodings are
//! reproducible: x+1 for the prime field, x^2+x+1, x^3+x+1, and for
//! 4 <= k <= 8 the numerically smallest primitive polynomial of degree k.
//! Multiplication goes through log/antilog tables built once per field.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul};
use std::sync::OnceLock;

use thiserror::Error;

/// Bit-encoded moduli, indexed by `k - 1`.
pub const MODULI: [u16; 8] = [0x3, 0x7, 0xb, 0x13, 0x25, 0x43, 0x83, 0x11d];

pub const MAX_DEGREE: u32 = 8;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("extension degree {0} outside 1..=8")]
    UnsupportedDegree(u32),
    #[error("modulus {0:#x} is reducible")]
    Reducible(u16),
}

/// A finite field GF(2^k) with its log/antilog tables.
pub struct FieldSpec {
    k: u32,
    modulus: u16,
    q: usize,
    exp: Vec<u8>,
    log: Vec<u8>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF(2^{}; {:#x})", self.k, self.modulus)
    }
}

// Fields are identified by their degree; the moduli are fixed.
impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.k == other.k
    }
}
impl Eq for FieldSpec {}

impl Hash for FieldSpec {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.k.hash(state);
    }
}

/// Carry-less product of two bit-encoded polynomials.
pub fn poly_mul(a: u32, b: u32) -> u32 {
    let mut r = 0;
    let mut a = a;
    let mut b = b;
    while b != 0 {
        if b & 1 == 1 {
            r ^= a;
        }
        a <<= 1;
        b >>= 1;
    }
    r
}

fn degree(p: u32) -> i32 {
    31 - p.leading_zeros() as i32
}

/// Remainder of `a` modulo `m` over F_2.
pub fn poly_rem(mut a: u32, m: u32) -> u32 {
    let dm = degree(m);
    while a != 0 && degree(a) >= dm {
        a ^= m << (degree(a) - dm);
    }
    a
}

/// Trial division by every polynomial of degree 1..=deg(p)/2.
pub fn is_irreducible(p: u32) -> bool {
    let d = degree(p);
    if d < 1 {
        return false;
    }
    for cand in 2u32..(1 << (d / 2 + 1)) {
        if degree(cand) >= 1 && degree(cand) <= d / 2 && poly_rem(p, cand) == 0 {
            return false;
        }
    }
    true
}

/// True when x generates the multiplicative group of F_2[x]/(p).
pub fn is_primitive(p: u32) -> bool {
    if !is_irreducible(p) {
        return false;
    }
    let d = degree(p);
    let order = (1u32 << d) - 1;
    let mut acc = 1u32;
    for i in 1..=order {
        acc = poly_rem(acc << 1, p);
        if acc == 1 {
            return i == order;
        }
    }
    false
}

impl FieldSpec {
    pub fn new(k: u32) -> Result<Self, FieldError> {
        if !(1..=MAX_DEGREE).contains(&k) {
            return Err(FieldError::UnsupportedDegree(k));
        }
        let modulus = MODULI[k as usize - 1];
        if !is_irreducible(modulus as u32) {
            return Err(FieldError::Reducible(modulus));
        }
        let q = 1usize << k;
        let order = q - 1;
        let mut exp = vec![0u8; 2 * order];
        let mut log = vec![0u8; q];
        let mut x: u16 = 1;
        for i in 0..order {
            exp[i] = x as u8;
            log[x as usize] = i as u8;
            x <<= 1;
            if x & (1 << k) != 0 {
                x ^= modulus;
            }
        }
        for i in order..2 * order {
            exp[i] = exp[i - order];
        }
        Ok(FieldSpec { k, modulus, q, exp, log })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn modulus(&self) -> u16 {
        self.modulus
    }

    pub fn q(&self) -> usize {
        self.q
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        a ^ b
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp[self.log[a as usize] as usize + self.log[b as usize] as usize]
    }

    /// Multiplicative inverse; `None` for zero.
    #[inline]
    pub fn inv(&self, a: u8) -> Option<u8> {
        if a == 0 {
            return None;
        }
        let order = self.q - 1;
        Some(self.exp[(order - self.log[a as usize] as usize) % order])
    }

    pub fn pow(&self, a: u8, e: u32) -> u8 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let order = (self.q - 1) as u64;
        let l = self.log[a as usize] as u64 * e as u64 % order;
        self.exp[l as usize]
    }

    /// The class of x, a generator of the multiplicative group.
    pub fn primitive(&self) -> u8 {
        self.exp[1 % (self.q - 1)]
    }

    pub fn elem(&'static self, bits: u8) -> FieldElement {
        assert!((bits as usize) < self.q, "{bits} is not an element of {self:?}");
        FieldElement { bits, field: self }
    }

    pub fn elements(&'static self) -> impl Iterator<Item = FieldElement> {
        (0..self.q).map(move |b| FieldElement { bits: b as u8, field: self })
    }
}

/// The shared instance of GF(2^k).
///
/// Panics when `k` is outside `1..=8`.
pub fn gf(k: u32) -> &'static FieldSpec {
    static FIELDS: OnceLock<Vec<FieldSpec>> = OnceLock::new();
    assert!((1..=MAX_DEGREE).contains(&k), "unsupported extension degree {k}");
    let all = FIELDS.get_or_init(|| {
        (1..=MAX_DEGREE)
            .map(|k| FieldSpec::new(k).expect("fixed moduli are irreducible"))
            .collect()
    });
    &all[k as usize - 1]
}

pub fn gf2() -> &'static FieldSpec {
    gf(1)
}

/// An element of a fixed GF(2^k).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    bits: u8,
    field: &'static FieldSpec,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.bits)
    }
}

impl FieldElement {
    pub fn bits(self) -> u8 {
        self.bits
    }

    pub fn field(self) -> &'static FieldSpec {
        self.field
    }

    pub fn is_zero(self) -> bool {
        self.bits == 0
    }

    pub fn inv(self) -> Option<FieldElement> {
        self.field.inv(self.bits).map(|bits| FieldElement { bits, field: self.field })
    }

    pub fn square(self) -> FieldElement {
        self * self
    }

    fn check(self, other: FieldElement) {
        assert!(self.field == other.field, "mixing elements of {:?} and {:?}", self.field, other.field);
    }
}

impl Add for FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: FieldElement) -> FieldElement {
        self.check(rhs);
        FieldElement { bits: self.bits ^ rhs.bits, field: self.field }
    }
}

impl Mul for FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: FieldElement) -> FieldElement {
        self.check(rhs);
        FieldElement { bits: self.field.mul(self.bits, rhs.bits), field: self.field }
    }
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("matrix is not invertible")]
pub struct NotInvertible;

/// Dense row-major n x n matrix over GF(2^k), n <= 4, one byte per entry.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: &'static FieldSpec,
    n: u8,
    e: [u8; 16],
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.n();
        write!(f, "[")?;
        for i in 0..n {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..n {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn zero(field: &'static FieldSpec, n: usize) -> Matrix {
        assert!((1..=4).contains(&n), "matrix dimension {n} unsupported");
        Matrix { field, n: n as u8, e: [0; 16] }
    }

    pub fn identity(field: &'static FieldSpec, n: usize) -> Matrix {
        let mut m = Matrix::zero(field, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from row-major entries; panics on a bad length or entry.
    pub fn from_rows(field: &'static FieldSpec, n: usize, entries: &[u8]) -> Matrix {
        assert_eq!(entries.len(), n * n);
        let mut m = Matrix::zero(field, n);
        for (i, &v) in entries.iter().enumerate() {
            assert!((v as usize) < field.q());
            m.e[i] = v;
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn field(&self) -> &'static FieldSpec {
        self.field
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.e[i * self.n() + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u8) {
        let n = self.n();
        self.e[i * n + j] = v;
    }

    pub fn entry(&self, i: usize, j: usize) -> FieldElement {
        self.field.elem(self.get(i, j))
    }

    /// Row-major entries, `n * n` bytes.
    pub fn entries(&self) -> &[u8] {
        &self.e[..self.n() * self.n()]
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert!(self.n == other.n && self.field == other.field);
        let n = self.n();
        let f = self.field;
        let mut r = Matrix::zero(f, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0u8;
                for l in 0..n {
                    acc ^= f.mul(self.get(i, l), other.get(l, j));
                }
                r.set(i, j, acc);
            }
        }
        r
    }

    /// Matrix times column vector.
    pub fn apply(&self, v: &[u8]) -> [u8; 4] {
        let n = self.n();
        let mut r = [0u8; 4];
        for (i, out) in r.iter_mut().enumerate().take(n) {
            let mut acc = 0u8;
            for (j, &x) in v.iter().enumerate().take(n) {
                acc ^= self.field.mul(self.get(i, j), x);
            }
            *out = acc;
        }
        r
    }

    pub fn transpose(&self) -> Matrix {
        let n = self.n();
        let mut r = Matrix::zero(self.field, n);
        for i in 0..n {
            for j in 0..n {
                r.set(j, i, self.get(i, j));
            }
        }
        r
    }

    pub fn scale(&self, c: u8) -> Matrix {
        let mut r = *self;
        let len = self.n() * self.n();
        for v in r.e[..len].iter_mut() {
            *v = self.field.mul(*v, c);
        }
        r
    }

    pub fn is_identity(&self) -> bool {
        *self == Matrix::identity(self.field, self.n())
    }

    pub fn rank(&self) -> usize {
        rank_of_rows(self.field, self.n(), &self.rows())
    }

    pub fn rows(&self) -> Vec<[u8; 4]> {
        let n = self.n();
        (0..n)
            .map(|i| {
                let mut row = [0u8; 4];
                row[..n].copy_from_slice(&self.e[i * n..i * n + n]);
                row
            })
            .collect()
    }

    /// Gauss-Jordan inverse.
    pub fn invert(&self) -> Result<Matrix, NotInvertible> {
        let n = self.n();
        let f = self.field;
        let mut a = *self;
        let mut inv = Matrix::identity(f, n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| a.get(r, col) != 0).ok_or(NotInvertible)?;
            if pivot != col {
                for j in 0..n {
                    let (x, y) = (a.get(col, j), a.get(pivot, j));
                    a.set(col, j, y);
                    a.set(pivot, j, x);
                    let (x, y) = (inv.get(col, j), inv.get(pivot, j));
                    inv.set(col, j, y);
                    inv.set(pivot, j, x);
                }
            }
            let s = f.inv(a.get(col, col)).expect("pivot is nonzero");
            for j in 0..n {
                a.set(col, j, f.mul(a.get(col, j), s));
                inv.set(col, j, f.mul(inv.get(col, j), s));
            }
            for r in 0..n {
                let c = a.get(r, col);
                if r != col && c != 0 {
                    for j in 0..n {
                        a.set(r, j, a.get(r, j) ^ f.mul(c, a.get(col, j)));
                        inv.set(r, j, inv.get(r, j) ^ f.mul(c, inv.get(col, j)));
                    }
                }
            }
        }
        Ok(inv)
    }

    pub fn is_invertible(&self) -> bool {
        self.rank() == self.n()
    }

    /// Lower-case hex, two digits per entry, row-major.
    pub fn to_hex(&self) -> String {
        self.entries().iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Rank of a list of row vectors of length `width`.
pub fn rank_of_rows(field: &'static FieldSpec, width: usize, rows: &[[u8; 4]]) -> usize {
    let mut rows: Vec<[u8; 4]> = rows.to_vec();
    let mut rank = 0;
    for col in 0..width {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, p);
        let s = field.inv(rows[rank][col]).unwrap();
        for j in 0..width {
            rows[rank][j] = field.mul(rows[rank][j], s);
        }
        for r in 0..rows.len() {
            let c = rows[r][col];
            if r != rank && c != 0 {
                for j in 0..width {
                    rows[r][j] ^= field.mul(c, rows[rank][j]);
                }
            }
        }
        rank += 1;
    }
    rank
}
