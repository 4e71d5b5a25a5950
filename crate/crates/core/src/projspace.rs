//! Points and lines of P^n(GF(2^k)) for n <= 3.
//!
//! Points are normalized so that the leftmost nonzero coordinate is 1.
//! Lines of P^3 are 2 x 4 bases in reduced row-echelon form. All
//! enumerations come out in a fixed sort order.

use std::fmt;

use crate::gf2k::{rank_of_rows, FieldSpec};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjPoint {
    coords: [u8; 4],
    len: u8,
}

impl fmt::Debug for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords().iter().enumerate() {
            if i > 0 {
                write!(f, ":")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl ProjPoint {
    /// Normalizes `coords`; `None` for the zero vector.
    pub fn new(field: &FieldSpec, coords: &[u8]) -> Option<ProjPoint> {
        assert!((1..=4).contains(&coords.len()));
        let lead = *coords.iter().find(|&&c| c != 0)?;
        let s = field.inv(lead).unwrap();
        let mut out = [0u8; 4];
        for (o, &c) in out.iter_mut().zip(coords) {
            *o = field.mul(c, s);
        }
        Some(ProjPoint { coords: out, len: coords.len() as u8 })
    }

    pub fn coords(&self) -> &[u8] {
        &self.coords[..self.len as usize]
    }

    /// Coordinates padded to four entries.
    pub fn raw(&self) -> [u8; 4] {
        self.coords
    }

    pub fn dim(&self) -> usize {
        self.len as usize - 1
    }
}

/// All points of P^n(F_q) in ascending lexicographic order.
pub fn enumerate_points(n: usize, field: &FieldSpec) -> Vec<ProjPoint> {
    assert!(n <= 3, "dimension {n} unsupported");
    let q = field.q();
    let len = n + 1;
    let mut out = Vec::new();
    let total = q.pow(len as u32);
    for code in 1..total {
        let mut c = [0u8; 4];
        let mut rest = code;
        for i in (0..len).rev() {
            c[i] = (rest % q) as u8;
            rest /= q;
        }
        if c[..len].iter().find(|&&x| x != 0) == Some(&1) {
            out.push(ProjPoint { coords: c, len: len as u8 });
        }
    }
    out.sort();
    out
}

/// A line of P^3 as the row space of a 2 x 4 reduced echelon basis.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjLine {
    basis: [[u8; 4]; 2],
}

impl fmt::Debug for ProjLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{:?} {:?}>", self.basis[0], self.basis[1])
    }
}

impl ProjLine {
    /// The span of two vectors; `None` when they are dependent.
    pub fn span(field: &FieldSpec, a: [u8; 4], b: [u8; 4]) -> Option<ProjLine> {
        let mut rows = [a, b];
        let mut rank = 0;
        for col in 0..4 {
            if rank == 2 {
                break;
            }
            let Some(p) = (rank..2).find(|&r| rows[r][col] != 0) else {
                continue;
            };
            rows.swap(rank, p);
            let s = field.inv(rows[rank][col]).unwrap();
            for j in 0..4 {
                rows[rank][j] = field.mul(rows[rank][j], s);
            }
            for r in 0..2 {
                let c = rows[r][col];
                if r != rank && c != 0 {
                    for j in 0..4 {
                        rows[r][j] ^= field.mul(c, rows[rank][j]);
                    }
                }
            }
            rank += 1;
        }
        (rank == 2).then_some(ProjLine { basis: rows })
    }

    pub fn basis(&self) -> [[u8; 4]; 2] {
        self.basis
    }

    /// Canonical encoding: the eight basis bytes, row-major.
    pub fn encode(&self) -> [u8; 8] {
        let mut out = [0u8; 8];
        out[..4].copy_from_slice(&self.basis[0]);
        out[4..].copy_from_slice(&self.basis[1]);
        out
    }

    pub fn contains(&self, field: &'static FieldSpec, p: &ProjPoint) -> bool {
        rank_of_rows(field, 4, &[self.basis[0], self.basis[1], p.raw()]) == 2
    }
}

/// All lines of P^3(F_q), deduplicated and sorted by encoded basis.
pub fn enumerate_lines(field: &FieldSpec) -> Vec<ProjLine> {
    assert!(field.q() <= 8, "line enumeration is limited to q <= 8");
    let pts = enumerate_points(3, field);
    let mut lines = Vec::new();
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i + 1..] {
            lines.push(ProjLine::span(field, a.raw(), b.raw()).expect("distinct points span a line"));
        }
    }
    lines.sort();
    lines.dedup();
    lines
}

/// True when the two lines have empty intersection.
pub fn are_skew(field: &'static FieldSpec, a: &ProjLine, b: &ProjLine) -> bool {
    rank_of_rows(field, 4, &[a.basis[0], a.basis[1], b.basis[0], b.basis[1]]) == 4
}

/// The q + 1 points of a line, sorted.
pub fn points_on_line(field: &FieldSpec, l: &ProjLine) -> Vec<ProjPoint> {
    let q = field.q();
    let mut out = Vec::with_capacity(q + 1);
    for s in 0..q as u8 {
        for t in 0..q as u8 {
            let mut v = [0u8; 4];
            for (j, x) in v.iter_mut().enumerate() {
                *x = field.mul(s, l.basis[0][j]) ^ field.mul(t, l.basis[1][j]);
            }
            if let Some(p) = ProjPoint::new(field, &v) {
                out.push(p);
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2k::gf;

    fn line(rows: [[u8; 4]; 2]) -> ProjLine {
        ProjLine::span(gf(1), rows[0], rows[1]).unwrap()
    }

    #[test]
    fn point_counts() {
        assert_eq!(enumerate_points(3, gf(1)).len(), 15);
        assert_eq!(enumerate_points(1, gf(1)).len(), 3);
        assert_eq!(enumerate_points(3, gf(2)).len(), 85);
        let p1: Vec<_> = enumerate_points(1, gf(1)).iter().map(|p| p.coords().to_vec()).collect();
        assert_eq!(p1, vec![vec![0, 1], vec![1, 0], vec![1, 1]]);
    }

    #[test]
    fn line_counts() {
        assert_eq!(enumerate_lines(gf(1)).len(), 35);
        assert_eq!(enumerate_lines(gf(2)).len(), 357);
        assert_eq!(enumerate_lines(gf(3)).len(), (64 + 1) * (64 + 8 + 1));
    }

    #[test]
    fn coordinate_lines_are_present_and_skew() {
        let f = gf(1);
        let lines = enumerate_lines(f);
        let xy0 = line([[0, 0, 1, 0], [0, 0, 0, 1]]);
        let zt0 = line([[1, 0, 0, 0], [0, 1, 0, 0]]);
        let xz0 = line([[0, 1, 0, 0], [0, 0, 0, 1]]);
        assert!(lines.contains(&xy0) && lines.contains(&zt0));
        assert!(are_skew(f, &xy0, &zt0));
        assert!(!are_skew(f, &xy0, &xy0));
        assert!(!are_skew(f, &xy0, &xz0));
        let common = ProjPoint::new(f, &[0, 0, 0, 1]).unwrap();
        assert!(xy0.contains(f, &common) && xz0.contains(f, &common));
    }

    #[test]
    fn points_on_lines() {
        let f = gf(1);
        for l in enumerate_lines(f) {
            assert_eq!(points_on_line(f, &l).len(), 3);
        }
        let zt0 = line([[1, 0, 0, 0], [0, 1, 0, 0]]);
        let pts: Vec<_> = points_on_line(f, &zt0).iter().map(|p| p.raw()).collect();
        assert_eq!(pts, vec![[0, 1, 0, 0], [1, 0, 0, 0], [1, 1, 0, 0]]);
        for l in enumerate_lines(gf(2)).iter().take(50) {
            assert_eq!(points_on_line(gf(2), l).len(), 5);
        }
    }

    #[test]
    fn two_points_one_line() {
        let f = gf(1);
        let pts = enumerate_points(3, f);
        let lines = enumerate_lines(f);
        for (i, a) in pts.iter().enumerate() {
            for b in &pts[i + 1..] {
                let n = lines.iter().filter(|l| l.contains(f, a) && l.contains(f, b)).count();
                assert_eq!(n, 1);
            }
        }
    }

    #[test]
    fn normalization_is_scalar_invariant() {
        let f = gf(3);
        for p in enumerate_points(3, f) {
            for c in 1..8u8 {
                let v: Vec<u8> = p.coords().iter().map(|&x| f.mul(x, c)).collect();
                assert_eq!(ProjPoint::new(f, &v), Some(p));
            }
        }
    }
}
