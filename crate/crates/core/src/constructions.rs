//! Generators for the oddtown and eventown constructions.
//!
//! None of the generators computes an odd pair number; callers verify the
//! claimed counts through [`crate::family::op_count`].

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::family::SetFamily;
use crate::gf2::{check_n, span, SetVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ConstructionKind {
    OddtownK4Triples,
    AsFamily,
    AsExtended,
    ProductFamily,
    EventownBlocksA,
    EventownBlocksB,
    EventownMixed,
    FullEvenFamily,
}

impl ConstructionKind {
    pub const ALL: [ConstructionKind; 8] = [
        ConstructionKind::OddtownK4Triples,
        ConstructionKind::AsFamily,
        ConstructionKind::AsExtended,
        ConstructionKind::ProductFamily,
        ConstructionKind::EventownBlocksA,
        ConstructionKind::EventownBlocksB,
        ConstructionKind::EventownMixed,
        ConstructionKind::FullEvenFamily,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ConstructionKind::OddtownK4Triples => "oddtown_k4_triples",
            ConstructionKind::AsFamily => "as_family",
            ConstructionKind::AsExtended => "as_extended",
            ConstructionKind::ProductFamily => "product_family",
            ConstructionKind::EventownBlocksA => "eventown_blocks_A",
            ConstructionKind::EventownBlocksB => "eventown_blocks_B",
            ConstructionKind::EventownMixed => "eventown_mixed",
            ConstructionKind::FullEvenFamily => "full_even_family",
        }
    }
}

impl fmt::Display for ConstructionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ConstructionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ConstructionKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidParameters(format!("unknown construction kind {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockVariant {
    A,
    B,
}

/// A construction together with its parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstructionSpec {
    pub kind: ConstructionKind,
    pub n: Option<usize>,
    pub s: Option<usize>,
    pub m: Option<usize>,
    /// Eventown input of the product family. When absent, the first
    /// `eventown_size` members (all, if unset) of [`pair_block_eventown`] on `[m]`.
    pub eventown: Option<SetFamily>,
    pub eventown_size: Option<usize>,
}

impl ConstructionSpec {
    pub fn new(kind: ConstructionKind) -> Self {
        ConstructionSpec {
            kind,
            n: None,
            s: None,
            m: None,
            eventown: None,
            eventown_size: None,
        }
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = Some(n);
        self
    }

    pub fn with_s(mut self, s: usize) -> Self {
        self.s = Some(s);
        self
    }

    pub fn with_m(mut self, m: usize) -> Self {
        self.m = Some(m);
        self
    }

    fn need(&self, v: Option<usize>, name: &str) -> Result<usize> {
        v.ok_or_else(|| {
            Error::InvalidParameters(format!("{} requires parameter {name}", self.kind))
        })
    }

    pub fn build(&self) -> Result<SetFamily> {
        use ConstructionKind::*;
        match self.kind {
            OddtownK4Triples => {
                build_oneill_oddtown(self.need(self.n, "n")?, self.need(self.s, "s")?)
            }
            AsFamily => build_as_family(self.need(self.s, "s")?),
            AsExtended => build_as_extended(self.need(self.n, "n")?, self.need(self.s, "s")?),
            ProductFamily => {
                let n = self.need(self.n, "n")?;
                let m = self.need(self.m, "m")?;
                let e = match &self.eventown {
                    Some(e) => e.clone(),
                    None => {
                        let full = pair_block_eventown(m)?;
                        match self.eventown_size {
                            Some(k) if k == 0 || k > full.len() => {
                                return Err(Error::InvalidParameters(format!(
                                    "eventown size {k} outside 1..={}",
                                    full.len()
                                )))
                            }
                            Some(k) => full.subfamily(&(0..k).collect::<Vec<_>>())?,
                            None => full,
                        }
                    }
                };
                build_product_family(&e, m, n)
            }
            EventownBlocksA => build_eventown_blocks(self.need(self.n, "n")?, BlockVariant::A),
            EventownBlocksB => build_eventown_blocks(self.need(self.n, "n")?, BlockVariant::B),
            EventownMixed => build_eventown_mixed(self.need(self.n, "n")?, self.need(self.s, "s")?),
            FullEvenFamily => build_full_even_family(self.need(self.n, "n")?),
        }
    }
}

/// Singletons `{i}` for all `i ∈ [n]`, followed by `s` triples taken from
/// the disjoint blocks `{4j-3, …, 4j}` (lexicographic triples, block by block).
pub fn build_oneill_oddtown(n: usize, s: usize) -> Result<SetFamily> {
    check_n(n)?;
    if n < 4 || s == 0 || 4 * s.div_ceil(4) > n {
        return Err(Error::InvalidParameters(format!(
            "oddtown K4 triples need n >= 4 and 1 <= s with 4*ceil(s/4) <= n (n={n}, s={s})"
        )));
    }
    let mut members: Vec<SetVector> = (1..=n)
        .map(|i| SetVector::from_elements(n, &[i]))
        .collect::<Result<_>>()?;
    let triples = (0..n / 4).flat_map(|j| {
        let b = 4 * j + 1;
        [
            [b, b + 1, b + 2],
            [b, b + 1, b + 3],
            [b, b + 2, b + 3],
            [b + 1, b + 2, b + 3],
        ]
    });
    for t in triples.take(s) {
        members.push(SetVector::from_elements(n, &t)?);
    }
    SetFamily::new(n, members)
}

fn center_sets() -> [[usize; 3]; 6] {
    [
        [1, 2, 3],
        [1, 2, 4],
        [1, 2, 5],
        [1, 3, 4],
        [1, 3, 5],
        [1, 4, 5],
    ]
}

/// The family A_s on `[s+4]`: the six-set center followed by the pairs
/// `{i+5}`, `{2,3,4,5,i+5}` for `i ∈ [s-1]`.
pub fn build_as_family(s: usize) -> Result<SetFamily> {
    if s == 0 {
        return Err(Error::InvalidParameters("A_s needs s >= 1".into()));
    }
    as_members(s + 4, s).and_then(|m| SetFamily::new(s + 4, m))
}

fn as_members(n: usize, s: usize) -> Result<Vec<SetVector>> {
    check_n(n)?;
    let mut members = center_sets()
        .iter()
        .map(|c| SetVector::from_elements(n, c))
        .collect::<Result<Vec<_>>>()?;
    for i in 1..s {
        members.push(SetVector::from_elements(n, &[i + 5])?);
        members.push(SetVector::from_elements(n, &[2, 3, 4, 5, i + 5])?);
    }
    Ok(members)
}

/// A_s inside `[n]` together with the singletons `{i}`, `i ∈ [s+5, n]`.
pub fn build_as_extended(n: usize, s: usize) -> Result<SetFamily> {
    check_n(n)?;
    if s == 0 || s + 4 > n {
        return Err(Error::InvalidParameters(format!(
            "extended A_s needs 1 <= s <= n-4 (n={n}, s={s})"
        )));
    }
    let mut members = as_members(n, s)?;
    for i in s + 5..=n {
        members.push(SetVector::from_elements(n, &[i])?);
    }
    SetFamily::new(n, members)
}

/// `{E ∪ {i} : E ∈ eventown, i ∈ [m+1, n]}`, ordered by `E` then `i`.
pub fn build_product_family(eventown: &SetFamily, m: usize, n: usize) -> Result<SetFamily> {
    check_n(n)?;
    if eventown.n() != m {
        return Err(Error::DimensionMismatch {
            left: m,
            right: eventown.n(),
        });
    }
    if n <= m {
        return Err(Error::InvalidParameters(format!(
            "product family needs n > m (n={n}, m={m})"
        )));
    }
    if !eventown.is_eventown() {
        return Err(Error::Parity(
            "product family input is not an eventown family".into(),
        ));
    }
    let mut bits = Vec::with_capacity(eventown.len() * (n - m));
    for e in eventown.members() {
        for i in m..n {
            bits.push(e.bits() | 1 << i);
        }
    }
    SetFamily::from_bits(n, &bits)
}

/// All unions of the pairs `{1,2}, {3,4}, …` on `[m]`; an extremal eventown
/// family of size `2^⌊m/2⌋` for every `m`.
pub fn pair_block_eventown(m: usize) -> Result<SetFamily> {
    check_n(m)?;
    let k = m / 2;
    let bits: Vec<u64> = (0u64..1 << k)
        .map(|j| {
            (0..k)
                .filter(|t| j >> t & 1 == 1)
                .fold(0u64, |acc, t| acc | 0b11 << (2 * t))
        })
        .collect();
    SetFamily::from_bits(m, &bits)
}

fn block_pairs(n: usize, variant: BlockVariant) -> Vec<u64> {
    // A_{2i-1}, A_{2i} (or B_{2i-1}, B_{2i}) for each block X_i, 0-indexed bits.
    (0..n / 4)
        .flat_map(|i| {
            let b = 4 * i;
            match variant {
                BlockVariant::A => [0b11u64 << b, 0b1100u64 << b],
                BlockVariant::B => [0b1001u64 << b, 0b0110u64 << b],
            }
        })
        .collect()
}

fn block_family_bits(n: usize, variant: BlockVariant) -> Vec<u64> {
    let gens = block_pairs(n, variant);
    let k = gens.len();
    (0u64..1 << k)
        .map(|j| {
            gens.iter()
                .enumerate()
                .filter(|(t, _)| j >> t & 1 == 1)
                .fold(0, |acc, (_, &g)| acc | g)
        })
        .collect()
}

fn check_doubly_even(n: usize) -> Result<()> {
    check_n(n)?;
    if n % 4 != 0 {
        return Err(Error::InvalidParameters(format!(
            "block construction needs n divisible by 4 (n={n})"
        )));
    }
    Ok(())
}

/// The block families A or B for `n = 2k = 4ℓ`, subsets `J ⊆ [k]` in binary
/// counter order.
pub fn build_eventown_blocks(n: usize, variant: BlockVariant) -> Result<SetFamily> {
    check_doubly_even(n)?;
    SetFamily::from_bits(n, &block_family_bits(n, variant))
}

/// Block family A followed by the first `s` members of B (counter order)
/// that lie outside `span(A)`.
pub fn build_eventown_mixed(n: usize, s: usize) -> Result<SetFamily> {
    check_doubly_even(n)?;
    let k = n / 2;
    let cap = (1usize << k) - (1usize << (n / 4));
    if s == 0 || s > cap {
        return Err(Error::InvalidParameters(format!(
            "eventown mixed needs 1 <= s <= 2^(n/2) - 2^(n/4) = {cap} (s={s})"
        )));
    }
    let a = block_family_bits(n, BlockVariant::A);
    let a_members = a
        .iter()
        .map(|&b| SetVector::new(b, n))
        .collect::<Result<Vec<_>>>()?;
    let w = span(n, &a_members)?;
    let extra = block_family_bits(n, BlockVariant::B)
        .into_iter()
        .filter(|&b| !w.contains_bits(b))
        .take(s);
    let mut bits = a;
    bits.extend(extra);
    SetFamily::from_bits(n, &bits)
}

/// Every even-sized subset of `[n]`, by bitmask value.
pub fn build_full_even_family(n: usize) -> Result<SetFamily> {
    check_n(n)?;
    if n > 24 {
        return Err(Error::InvalidParameters(format!(
            "full even family on n={n} has 2^{} members; limit is n <= 24",
            n - 1
        )));
    }
    let bits: Vec<u64> = (0u64..1 << n).filter(|b| b.count_ones() % 2 == 0).collect();
    SetFamily::from_bits(n, &bits)
}
