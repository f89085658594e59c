//! Set families, the odd pair number, and the odd pair graph.

use std::collections::HashSet;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gf2::{check_n, dot_bits, SetVector};

/// Families at least this large use the parallel pair kernel.
const PARALLEL_THRESHOLD: usize = 2048;
/// Column tile width for the pair kernel; 512 words fit in L1.
const TILE: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ParityProfile {
    AllOdd,
    AllEven,
    Mixed,
}

impl ParityProfile {
    pub fn as_str(&self) -> &'static str {
        match self {
            ParityProfile::AllOdd => "all-odd",
            ParityProfile::AllEven => "all-even",
            ParityProfile::Mixed => "mixed",
        }
    }
}

/// Ordered, duplicate-free family of subsets of `[n]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetFamily {
    n: usize,
    members: Vec<SetVector>,
    bits: Vec<u64>,
    parity_profile: ParityProfile,
}

impl SetFamily {
    pub fn new(n: usize, members: Vec<SetVector>) -> Result<Self> {
        check_n(n)?;
        let mut seen = HashSet::with_capacity(members.len());
        for m in &members {
            if m.n() != n {
                return Err(Error::DimensionMismatch {
                    left: n,
                    right: m.n(),
                });
            }
            if !seen.insert(m.bits()) {
                return Err(Error::DuplicateMember(m.to_string()));
            }
        }
        let bits: Vec<u64> = members.iter().map(|m| m.bits()).collect();
        let odd = members.iter().filter(|m| m.parity() == 1).count();
        // The empty family is vacuously all-even.
        let parity_profile = if odd == 0 {
            ParityProfile::AllEven
        } else if odd == members.len() {
            ParityProfile::AllOdd
        } else {
            ParityProfile::Mixed
        };
        Ok(SetFamily {
            n,
            members,
            bits,
            parity_profile,
        })
    }

    pub fn from_bits(n: usize, bits: &[u64]) -> Result<Self> {
        let members = bits
            .iter()
            .map(|&b| SetVector::new(b, n))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, members)
    }

    /// Convenience constructor from 1-indexed element lists.
    pub fn from_sets(n: usize, sets: &[&[usize]]) -> Result<Self> {
        let members = sets
            .iter()
            .map(|s| SetVector::from_elements(n, s))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, members)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[SetVector] {
        &self.members
    }

    pub fn member(&self, i: usize) -> SetVector {
        self.members[i]
    }

    pub(crate) fn bits(&self) -> &[u64] {
        &self.bits
    }

    pub fn parity_profile(&self) -> ParityProfile {
        self.parity_profile
    }

    pub fn all_odd(&self) -> bool {
        self.bits.iter().all(|b| b.count_ones() & 1 == 1)
    }

    pub fn all_even(&self) -> bool {
        self.bits.iter().all(|b| b.count_ones() & 1 == 0)
    }

    pub fn odd_member_count(&self) -> usize {
        self.bits.iter().filter(|b| b.count_ones() & 1 == 1).count()
    }

    pub fn is_oddtown(&self) -> bool {
        self.all_odd() && op_count(self) == 0
    }

    pub fn is_eventown(&self) -> bool {
        self.all_even() && op_count(self) == 0
    }

    /// Sub-family on the given indices, in the given order.
    pub fn subfamily(&self, indices: &[usize]) -> Result<SetFamily> {
        validate_indices(indices, self.len())?;
        Ok(SetFamily::new(
            self.n,
            indices.iter().map(|&i| self.members[i]).collect(),
        )
        .expect("sub-family of a valid family is valid"))
    }

    /// Family with one member removed.
    pub fn without(&self, index: usize) -> Result<SetFamily> {
        if index >= self.len() {
            return Err(Error::IndexOutOfRange {
                index,
                len: self.len(),
            });
        }
        let mut members = self.members.clone();
        members.remove(index);
        SetFamily::new(self.n, members)
    }

    /// Same sets viewed inside `[n]` for a larger `n`.
    pub fn lift(&self, n: usize) -> Result<SetFamily> {
        let members = self
            .members
            .iter()
            .map(|m| m.lift(n))
            .collect::<Result<Vec<_>>>()?;
        SetFamily::new(n, members)
    }
}

pub(crate) fn validate_indices(indices: &[usize], len: usize) -> Result<()> {
    let mut seen = vec![false; len];
    for &i in indices {
        if i >= len {
            return Err(Error::IndexOutOfRange { index: i, len });
        }
        if seen[i] {
            return Err(Error::RepeatedIndex(i));
        }
        seen[i] = true;
    }
    Ok(())
}

/// Number of odd partners of `a` among `row`, self included when `a` is odd.
#[inline]
fn odd_partners(a: u64, row: &[u64]) -> u32 {
    row.iter().map(|&b| dot_bits(a, b)).sum()
}

/// Per-member degree in H(A).
fn degree_table(bits: &[u64]) -> Vec<u32> {
    let m = bits.len();
    let row_degree = |i: usize| -> u32 {
        let a = bits[i];
        let mut d = 0u32;
        for tile in bits.chunks(TILE) {
            d += odd_partners(a, tile);
        }
        d - (a.count_ones() & 1)
    };
    if m >= PARALLEL_THRESHOLD {
        (0..m).into_par_iter().map(row_degree).collect()
    } else {
        let mut deg = vec![0u32; m];
        for i in 0..m {
            for j in i + 1..m {
                let d = dot_bits(bits[i], bits[j]);
                deg[i] += d;
                deg[j] += d;
            }
        }
        deg
    }
}

/// `op(A)`: unordered pairs of distinct members with odd intersection.
pub fn op_count(family: &SetFamily) -> u64 {
    let bits = family.bits();
    if bits.len() >= PARALLEL_THRESHOLD {
        degree_table(bits).iter().map(|&d| d as u64).sum::<u64>() / 2
    } else {
        pair_count(bits)
    }
}

fn pair_count(bits: &[u64]) -> u64 {
    let mut e = 0u64;
    for (i, &a) in bits.iter().enumerate() {
        e += odd_partners(a, &bits[i + 1..]) as u64;
    }
    e
}

/// The odd pair graph H(A). Vertex order is the family order.
#[derive(Clone, Debug)]
pub struct OddPairGraph {
    family: SetFamily,
    degrees: Vec<u32>,
    edge_count: u64,
    odd_vertex_count: usize,
}

pub fn build_odd_pair_graph(family: &SetFamily) -> OddPairGraph {
    let degrees = degree_table(family.bits());
    let edge_count = degrees.iter().map(|&d| d as u64).sum::<u64>() / 2;
    OddPairGraph {
        odd_vertex_count: family.odd_member_count(),
        family: family.clone(),
        degrees,
        edge_count,
    }
}

impl OddPairGraph {
    pub fn family(&self) -> &SetFamily {
        &self.family
    }

    /// v(H).
    pub fn vertex_count(&self) -> usize {
        self.family.len()
    }

    /// e(H) = op(A).
    pub fn edge_count(&self) -> u64 {
        self.edge_count
    }

    /// v_o(H).
    pub fn odd_vertex_count(&self) -> usize {
        self.odd_vertex_count
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn degree(&self, v: usize) -> u32 {
        self.degrees[v]
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        u != v && dot_bits(self.family.bits[u], self.family.bits[v]) == 1
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let a = self.family.bits[v];
        self.family
            .bits
            .iter()
            .enumerate()
            .filter(|&(j, &b)| j != v && dot_bits(a, b) == 1)
            .map(|(j, _)| j)
            .collect()
    }

    /// Degree -> number of vertices with that degree, ascending by degree.
    pub fn degree_histogram(&self) -> Vec<(u32, usize)> {
        let mut h = std::collections::BTreeMap::new();
        for &d in &self.degrees {
            *h.entry(d).or_insert(0usize) += 1;
        }
        h.into_iter().collect()
    }
}

/// `op` of the sub-family on `subset_indices`.
pub fn induced_subgraph_edge_count(family: &SetFamily, subset_indices: &[usize]) -> Result<u64> {
    validate_indices(subset_indices, family.len())?;
    let bits: Vec<u64> = subset_indices.iter().map(|&i| family.bits[i]).collect();
    Ok(pair_count(&bits))
}

/// `e(U_1, U_2)`: odd pairs with one member on each side.
pub fn bipartite_edge_count(family: &SetFamily, left: &[usize], right: &[usize]) -> Result<u64> {
    validate_indices(left, family.len())?;
    validate_indices(right, family.len())?;
    let left_set: HashSet<usize> = left.iter().copied().collect();
    if let Some(&i) = right.iter().find(|i| left_set.contains(i)) {
        return Err(Error::OverlappingParts(i));
    }
    let right_bits: Vec<u64> = right.iter().map(|&j| family.bits[j]).collect();
    Ok(left
        .iter()
        .map(|&i| odd_partners(family.bits[i], &right_bits) as u64)
        .sum())
}

/// Parses the family text format: a `n=<int>` header, then one set per line
/// as comma-separated 1-indexed elements (`empty` for ∅). Blank lines and
/// lines starting with `#` are skipped.
pub fn parse_family(text: &str) -> Result<SetFamily> {
    let mut n: Option<usize> = None;
    let mut members = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let line_no = lineno + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let perr = |msg: String| Error::Parse { line: line_no, msg };
        let Some(ground) = n else {
            let value = line
                .strip_prefix("n=")
                .ok_or_else(|| perr(format!("expected header n=<int>, found {line:?}")))?;
            let v: usize = value
                .trim()
                .parse()
                .map_err(|_| perr(format!("bad ground set size {value:?}")))?;
            check_n(v).map_err(|e| perr(e.to_string()))?;
            n = Some(v);
            continue;
        };
        if line == "empty" {
            members.push(SetVector::empty(ground)?);
            continue;
        }
        let mut elements = Vec::new();
        for tok in line.split(',') {
            let tok = tok.trim();
            let e: usize = tok
                .parse()
                .map_err(|_| perr(format!("bad element {tok:?}")))?;
            if elements.contains(&e) {
                return Err(perr(format!("element {e} repeated")));
            }
            elements.push(e);
        }
        let v = SetVector::from_elements(ground, &elements).map_err(|e| perr(e.to_string()))?;
        members.push(v);
    }
    let n = n.ok_or(Error::Parse {
        line: 0,
        msg: "missing n=<int> header".into(),
    })?;
    SetFamily::new(n, members)
}

/// Canonical writer for the family text format.
pub fn write_family(family: &SetFamily) -> String {
    let mut out = String::new();
    writeln!(out, "n={}", family.n()).unwrap();
    for m in family.members() {
        if m.is_empty() {
            out.push_str("empty\n");
        } else {
            let e: Vec<String> = m.elements().iter().map(|e| e.to_string()).collect();
            out.push_str(&e.join(","));
            out.push('\n');
        }
    }
    out
}
