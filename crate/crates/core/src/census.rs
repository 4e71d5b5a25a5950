//! Exhaustive classification of the nonzero cubic forms over F_2 under
//! PGL_4(F_2).
//!
//! Forms are 20-bit words. The orbit partition is a union-find over all
//! 2^20 - 1 words, built by applying each group generator's coefficient
//! action; the root of an orbit is its least word. Each orbit then gets a
//! smoothness verdict, the order of its stabilizer (scanned over all 20 160
//! group elements) and whether it vanishes at every point of P^3(F_2).
//!
//! Cache layout (little-endian): magic `CBC1`; the 20 monomial exponent
//! tuples, 4 bytes each; the root of every word 1..2^20-1 as u32; then one
//! 14-byte record per orbit: root u32, size u32, smooth u8, aut_order u32,
//! all15 u8.

use std::collections::BTreeSet;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::forms::{
    eval_word, monomial_values_f2, paper_form_1, pencil_cubic, vanishing_family_form, CoeffAction, CubicForm,
    MONOMIAL_ORDER, NUM_NONZERO_F2_FORMS,
};
use crate::gf2k::gf2;
use crate::grouptool::{pgl, pgl_generators, stabilizer, FiniteGroup, GroupError, PglElement};
use crate::idealtest::{is_smooth, SmoothError};
use crate::projspace::{enumerate_lines, enumerate_points};
use crate::recognize::{is_isomorphic, symmetric_group};
use crate::unionfind::UnionFind;

pub const PGL4_F2_ORDER: u32 = 20160;
pub const CACHE_MAGIC: &[u8; 4] = b"CBC1";
const RECORD_BYTES: usize = 14;
const FORM_SPACE: usize = 1 << 20;

#[derive(Debug, Error)]
pub enum CensusError {
    #[error("generators produce a group of order {0}, expected 20160")]
    NotFullGroup(usize),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Smooth(#[from] SmoothError),
    #[error("cache: {0}")]
    Cache(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("fifteen-point analysis failed: {0}")]
    FifteenPoint(String),
}

/// Union-find over the form words 0..2^20; word 0 stays a singleton.
#[derive(Clone, Debug)]
pub struct OrbitPartition {
    uf: UnionFind,
    reps: Vec<u32>,
}

impl OrbitPartition {
    pub fn root(&self, word: u32) -> u32 {
        self.uf.parents()[word as usize]
    }

    /// Orbit roots, ascending.
    pub fn reps(&self) -> &[u32] {
        &self.reps
    }

    pub fn orbit_sizes(&self) -> Vec<u32> {
        let mut counts = vec![0u32; FORM_SPACE];
        for w in 1..FORM_SPACE {
            counts[self.root(w as u32) as usize] += 1;
        }
        self.reps.iter().map(|&r| counts[r as usize]).collect()
    }

    /// All words of the orbit rooted at `root`.
    pub fn members(&self, root: u32) -> Vec<u32> {
        (1..FORM_SPACE as u32).filter(|&w| self.root(w) == root).collect()
    }

    fn from_parents(parents: Vec<u32>) -> OrbitPartition {
        let reps = (1..FORM_SPACE as u32).filter(|&w| parents[w as usize] == w).collect();
        OrbitPartition { uf: UnionFind::from_parents(parents), reps }
    }
}

/// Orbits of the group generated by `gens` on nonzero F_2 cubic forms.
pub fn build_partition(gens: &[PglElement]) -> Result<OrbitPartition, CensusError> {
    let order = crate::grouptool::closure(gf2(), 4, gens, PGL4_F2_ORDER as usize + 1)
        .map_err(|_| CensusError::NotFullGroup(PGL4_F2_ORDER as usize + 1))?
        .order();
    if order != PGL4_F2_ORDER as usize {
        return Err(CensusError::NotFullGroup(order));
    }
    let actions: Vec<CoeffAction> = gens.iter().map(|g| CoeffAction::new(g.matrix())).collect();
    let mut uf = UnionFind::new(FORM_SPACE);
    for w in 1..FORM_SPACE as u32 {
        for a in &actions {
            uf.union(w as usize, a.apply(w) as usize);
        }
    }
    uf.flatten();
    Ok(OrbitPartition::from_parents(uf.parents().to_vec()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitRecord {
    /// Least word in the orbit.
    pub rep: u32,
    pub orbit_size: u32,
    pub smooth: bool,
    pub aut_order: u32,
    pub passes_all_15: bool,
}

impl OrbitRecord {
    pub fn form(&self) -> CubicForm {
        CubicForm::from_word(self.rep)
    }
}

fn point_masks() -> Vec<u32> {
    enumerate_points(3, gf2()).iter().map(monomial_values_f2).collect()
}

pub fn vanishes_everywhere(word: u32, masks: &[u32]) -> bool {
    masks.iter().all(|&m| eval_word(word, m) == 0)
}

/// Coefficient actions of every element of the group.
pub fn group_actions(group: &FiniteGroup<PglElement>) -> Vec<CoeffAction> {
    group.elements().par_iter().map(|g| CoeffAction::new(g.matrix())).collect()
}

pub fn stabilizer_order(actions: &[CoeffAction], word: u32) -> u32 {
    actions.iter().filter(|a| a.apply(word) == word).count() as u32
}

/// One record per orbit, in root order.
pub fn orbit_records(partition: &OrbitPartition, actions: &[CoeffAction]) -> Result<Vec<OrbitRecord>, CensusError> {
    let masks = point_masks();
    let sizes = partition.orbit_sizes();
    partition
        .reps()
        .par_iter()
        .zip(sizes.par_iter())
        .map(|(&rep, &orbit_size)| {
            let verdict = is_smooth(&CubicForm::from_word(rep))?;
            Ok(OrbitRecord {
                rep,
                orbit_size,
                smooth: verdict.smooth,
                aut_order: stabilizer_order(actions, rep),
                passes_all_15: vanishes_everywhere(rep, &masks),
            })
        })
        .collect()
}

/// Partition plus per-orbit records.
#[derive(Clone, Debug)]
pub struct Census {
    pub partition: OrbitPartition,
    pub records: Vec<OrbitRecord>,
}

impl Census {
    pub fn compute() -> Result<Census, CensusError> {
        let group = pgl(gf2(), 4)?;
        let partition = build_partition(&pgl_generators(gf2(), 4))?;
        let records = orbit_records(&partition, &group_actions(&group))?;
        Ok(Census { partition, records })
    }

    /// Reads `path` if it exists, otherwise computes and writes it.
    pub fn load_or_compute(path: Option<&Path>) -> Result<Census, CensusError> {
        match path {
            Some(p) if p.exists() => Census::read(p),
            Some(p) => {
                let c = Census::compute()?;
                c.write(p)?;
                Ok(c)
            }
            None => Census::compute(),
        }
    }

    pub fn record_of(&self, word: u32) -> Option<&OrbitRecord> {
        let root = self.partition.root(word);
        self.records.binary_search_by_key(&root, |r| r.rep).ok().map(|i| &self.records[i])
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(4 + 80 + 4 * (FORM_SPACE - 1) + RECORD_BYTES * self.records.len());
        out.extend_from_slice(CACHE_MAGIC);
        for m in MONOMIAL_ORDER {
            out.extend_from_slice(&m);
        }
        for w in 1..FORM_SPACE as u32 {
            out.extend_from_slice(&self.partition.root(w).to_le_bytes());
        }
        for r in &self.records {
            out.extend_from_slice(&r.rep.to_le_bytes());
            out.extend_from_slice(&r.orbit_size.to_le_bytes());
            out.push(r.smooth as u8);
            out.extend_from_slice(&r.aut_order.to_le_bytes());
            out.push(r.passes_all_15 as u8);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Census, CensusError> {
        let bad = |m: &str| CensusError::Cache(m.to_string());
        if bytes.len() < 4 || &bytes[..4] != CACHE_MAGIC {
            return Err(bad("unknown magic or version"));
        }
        let header = 4 + 80;
        if bytes.len() < header || bytes[4..header] != MONOMIAL_ORDER.concat()[..] {
            return Err(bad("monomial order mismatch"));
        }
        let body = header + 4 * (FORM_SPACE - 1);
        if bytes.len() < body || (bytes.len() - body) % RECORD_BYTES != 0 {
            return Err(bad("truncated file"));
        }
        let u32_at = |off: usize| u32::from_le_bytes(bytes[off..off + 4].try_into().unwrap());
        let mut parents = vec![0u32; FORM_SPACE];
        for w in 1..FORM_SPACE {
            let r = u32_at(header + 4 * (w - 1));
            if r == 0 || r as usize > w {
                return Err(bad("root out of range"));
            }
            parents[w] = r;
        }
        if (1..FORM_SPACE).any(|w| parents[parents[w] as usize] != parents[w]) {
            return Err(bad("parent array is not flattened"));
        }
        let partition = OrbitPartition::from_parents(parents);
        let records: Vec<OrbitRecord> = bytes[body..]
            .chunks_exact(RECORD_BYTES)
            .map(|c| OrbitRecord {
                rep: u32::from_le_bytes(c[0..4].try_into().unwrap()),
                orbit_size: u32::from_le_bytes(c[4..8].try_into().unwrap()),
                smooth: c[8] != 0,
                aut_order: u32::from_le_bytes(c[9..13].try_into().unwrap()),
                passes_all_15: c[13] != 0,
            })
            .collect();
        let roots: Vec<u32> = records.iter().map(|r| r.rep).collect();
        if roots != partition.reps() {
            return Err(bad("records do not match the orbit roots"));
        }
        Ok(Census { partition, records })
    }

    pub fn write(&self, path: &Path) -> Result<(), CensusError> {
        let mut f = fs::File::create(path)?;
        f.write_all(&self.to_bytes())?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Census, CensusError> {
        Census::from_bytes(&fs::read(path)?)
    }

    pub fn report(&self) -> CensusReport {
        let smooth: Vec<&OrbitRecord> = self.records.iter().filter(|r| r.smooth).collect();
        let max = smooth.iter().map(|r| r.aut_order).max().unwrap_or(0);
        let at_max: Vec<u32> = smooth.iter().filter(|r| r.aut_order == max).map(|r| r.rep).collect();
        let f1_root = self.partition.root(paper_form_1(gf2()).word().unwrap());
        CensusReport {
            total_forms: self.records.iter().map(|r| r.orbit_size as u64).sum(),
            orbits: self.records.len(),
            smooth_orbits: smooth.len(),
            orbit_stabilizer_holds: self.records.iter().all(|r| r.aut_order * r.orbit_size == PGL4_F2_ORDER),
            max_smooth_aut: max,
            max_smooth_aut_reps: at_max.iter().map(|&w| CubicForm::from_word(w).to_hex().unwrap()).collect(),
            unique_max: at_max.len() == 1,
            max_orbit_contains_form1: at_max == vec![f1_root],
            all15_orbits: self.records.iter().filter(|r| r.passes_all_15).count(),
            orbits_table: self
                .records
                .iter()
                .map(|r| OrbitRow {
                    rep: CubicForm::from_word(r.rep).to_hex().unwrap(),
                    form: CubicForm::from_word(r.rep).to_string(),
                    orbit_size: r.orbit_size,
                    smooth: r.smooth,
                    aut_order: r.aut_order,
                    passes_all_15: r.passes_all_15,
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitRow {
    pub rep: String,
    pub form: String,
    pub orbit_size: u32,
    pub smooth: bool,
    pub aut_order: u32,
    pub passes_all_15: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CensusReport {
    pub total_forms: u64,
    pub orbits: usize,
    pub smooth_orbits: usize,
    pub orbit_stabilizer_holds: bool,
    pub max_smooth_aut: u32,
    pub max_smooth_aut_reps: Vec<String>,
    pub unique_max: bool,
    pub max_orbit_contains_form1: bool,
    pub all15_orbits: usize,
    pub orbits_table: Vec<OrbitRow>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FifteenPointSummary {
    pub vanishing_forms: usize,
    pub pencil_cubics: usize,
    pub smooth_remainder: usize,
    /// Every pencil cubic has a singular F_2-point.
    pub pencils_have_f2_witnesses: bool,
    /// Root shared by the smooth remainder.
    pub smooth_root: u32,
    pub smooth_root_is_form1: bool,
}

/// Counts the forms through all 15 points, splits them into the 35 pencil
/// cubics and the smooth rest, and checks the rest is one orbit, that of
/// x^2 t + y^2 z + y z^2 + x t^2.
pub fn fifteen_point_analysis(census: &Census) -> Result<FifteenPointSummary, CensusError> {
    let fail = |m: String| CensusError::FifteenPoint(m);
    let f2 = gf2();
    let masks = point_masks();
    let vanishing: BTreeSet<u32> =
        (1..=NUM_NONZERO_F2_FORMS).into_par_iter().filter(|&w| vanishes_everywhere(w, &masks)).collect();
    if vanishing.len() != 63 {
        return Err(fail(format!("{} forms vanish on all 15 points, expected 63", vanishing.len())));
    }
    let family: BTreeSet<u32> = (1..64u8).map(|a| vanishing_family_form(a).unwrap().word().unwrap()).collect();
    if family != vanishing {
        return Err(fail("the six-parameter family is not the set of vanishing forms".into()));
    }
    let mut pencils = BTreeSet::new();
    let mut witnesses = true;
    for l in enumerate_lines(f2) {
        let pc = pencil_cubic(f2, &l).map_err(|e| fail(e.to_string()))?;
        let w = pc.form.word().unwrap();
        if !vanishing.contains(&w) {
            return Err(fail(format!("pencil cubic {} misses a point", pc.form)));
        }
        let v = is_smooth(&pc.form)?;
        if v.smooth {
            return Err(fail(format!("pencil cubic {} reported smooth", pc.form)));
        }
        witnesses &= v.witness.map(|w| w.k) == Some(1);
        pencils.insert(w);
    }
    if pencils.len() != 35 {
        return Err(fail(format!("{} distinct pencil cubics, expected 35", pencils.len())));
    }
    let rest: Vec<u32> = vanishing.difference(&pencils).copied().collect();
    for &w in &rest {
        if !is_smooth(&CubicForm::from_word(w))?.smooth {
            return Err(fail(format!("non-pencil form {:05x} is singular", w)));
        }
    }
    let roots: BTreeSet<u32> = rest.iter().map(|&w| census.partition.root(w)).collect();
    if rest.len() != 28 || roots.len() != 1 {
        return Err(fail(format!("{} smooth forms in {} orbits", rest.len(), roots.len())));
    }
    let smooth_root = *roots.iter().next().unwrap();
    let f1_root = census.partition.root(paper_form_1(f2).word().unwrap());
    Ok(FifteenPointSummary {
        vanishing_forms: vanishing.len(),
        pencil_cubics: pencils.len(),
        smooth_remainder: rest.len(),
        pencils_have_f2_witnesses: witnesses,
        smooth_root,
        smooth_root_is_form1: smooth_root == f1_root,
    })
}

/// Membership of one orbit in the two sets the corollary identifies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct A3Membership {
    pub rep: u32,
    /// Smooth, stabilizer of order 720 and isomorphic to S_6.
    pub s6_orbit: bool,
    /// Smooth and vanishing at all 15 points.
    pub all15_orbit: bool,
}

pub fn a3_membership(record: &OrbitRecord, pgl4: &FiniteGroup<PglElement>) -> Result<A3Membership, CensusError> {
    let s6_orbit = record.smooth && record.aut_order == 720 && {
        let st = stabilizer(pgl4, &record.form())?;
        is_isomorphic(&st, &symmetric_group(6)).is_some_and(|w| w.verified)
    };
    Ok(A3Membership { rep: record.rep, s6_orbit, all15_orbit: record.smooth && record.passes_all_15 })
}

/// True iff the smooth orbits with an S_6 automorphism group are exactly the
/// smooth orbits through all 15 points.
pub fn corollary_a3_check(census: &Census) -> Result<bool, CensusError> {
    let pgl4 = pgl(gf2(), 4)?;
    let mut s6 = BTreeSet::new();
    let mut all15 = BTreeSet::new();
    for r in census.records.iter().filter(|r| r.smooth) {
        let m = a3_membership(r, &pgl4)?;
        if m.s6_orbit {
            s6.insert(r.rep);
        }
        if m.all15_orbit {
            all15.insert(r.rep);
        }
    }
    Ok(!s6.is_empty() && s6 == all15)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cache_rejects_garbage() {
        assert!(matches!(Census::from_bytes(b"CBC2xxxx"), Err(CensusError::Cache(_))));
        assert!(matches!(Census::from_bytes(b""), Err(CensusError::Cache(_))));
        let mut header = CACHE_MAGIC.to_vec();
        header.extend_from_slice(&MONOMIAL_ORDER.concat());
        assert!(matches!(Census::from_bytes(&header), Err(CensusError::Cache(_))));
        let mut wrong_order = CACHE_MAGIC.to_vec();
        wrong_order.extend(MONOMIAL_ORDER.iter().rev().flatten());
        assert!(matches!(Census::from_bytes(&wrong_order), Err(CensusError::Cache(_))));
    }

    #[test]
    fn cache_round_trip() {
        let c = Census::compute().unwrap();
        let back = Census::from_bytes(&c.to_bytes()).unwrap();
        assert_eq!(back.records, c.records);
        assert_eq!(back.partition.reps(), c.partition.reps());
        let f1 = paper_form_1(gf2()).word().unwrap();
        let r = c.record_of(f1).unwrap();
        assert_eq!((r.orbit_size, r.aut_order, r.smooth, r.passes_all_15), (28, 720, true, true));
        assert_eq!(r.rep, c.partition.members(r.rep)[0]);
        let mut truncated = c.to_bytes();
        truncated.pop();
        assert!(matches!(Census::from_bytes(&truncated), Err(CensusError::Cache(_))));
    }

    #[test]
    fn partition_requires_full_group() {
        let gens = pgl_generators(gf2(), 4);
        assert!(matches!(build_partition(&gens[..1]), Err(CensusError::NotFullGroup(_))));
    }
}
