//! Bit-level GF(2) primitives.
//!
//! A subset of `[n]` is stored as a single `u64` (element `i` is bit `i - 1`),
//! so the ground set is capped at 63 elements. Inner products, parities and
//! row reduction all work on whole words.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported ground set.
pub const MAX_N: usize = 63;

#[inline]
pub(crate) fn mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Inner product of two raw bit words over GF(2).
#[inline(always)]
pub fn dot_bits(a: u64, b: u64) -> u32 {
    (a & b).count_ones() & 1
}

pub(crate) fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_N {
        return Err(Error::GroundSetSize(n));
    }
    Ok(())
}

/// Characteristic vector of a subset of `[n]`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetVector {
    // Field order matters for the derived Ord: members of one family share n,
    // so sorting is by bitmask value.
    n: u8,
    bits: u64,
}

impl SetVector {
    pub fn new(bits: u64, n: usize) -> Result<Self> {
        check_n(n)?;
        if bits & !mask(n) != 0 {
            let element = 64 - bits.leading_zeros() as usize;
            return Err(Error::ElementOutOfRange { element, n });
        }
        Ok(SetVector { n: n as u8, bits })
    }

    /// Builds the vector from 1-indexed elements. Repeated elements are an error
    /// only in the sense that they are ignored; sets have no multiplicity.
    pub fn from_elements(n: usize, elements: &[usize]) -> Result<Self> {
        check_n(n)?;
        let mut bits = 0u64;
        for &e in elements {
            if e == 0 || e > n {
                return Err(Error::ElementOutOfRange { element: e, n });
            }
            bits |= 1 << (e - 1);
        }
        Ok(SetVector { n: n as u8, bits })
    }

    pub fn empty(n: usize) -> Result<Self> {
        Self::new(0, n)
    }

    /// The all-one vector `1`.
    pub fn all_ones(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(SetVector {
            n: n as u8,
            bits: mask(n),
        })
    }

    #[inline]
    pub fn bits(&self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n as usize
    }

    /// Cardinality of the represented set.
    #[inline]
    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn contains(&self, element: usize) -> bool {
        element >= 1 && element <= self.n() && self.bits >> (element - 1) & 1 == 1
    }

    /// Sorted 1-indexed elements.
    pub fn elements(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.len());
        let mut b = self.bits;
        while b != 0 {
            out.push(b.trailing_zeros() as usize + 1);
            b &= b - 1;
        }
        out
    }

    /// Same set viewed inside a larger ground set.
    pub fn lift(&self, n: usize) -> Result<Self> {
        if n < self.n() {
            return Err(Error::DimensionMismatch {
                left: self.n(),
                right: n,
            });
        }
        Self::new(self.bits, n)
    }

    /// Symmetric difference (vector addition over GF(2)).
    pub fn add(&self, other: &SetVector) -> Result<SetVector> {
        same_n(self, other)?;
        Ok(SetVector {
            n: self.n,
            bits: self.bits ^ other.bits,
        })
    }

    #[inline]
    pub fn parity(&self) -> u8 {
        (self.bits.count_ones() & 1) as u8
    }

    pub fn inner_product(&self, other: &SetVector) -> Result<u8> {
        same_n(self, other)?;
        Ok(dot_bits(self.bits, other.bits) as u8)
    }
}

impl fmt::Debug for SetVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for SetVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.elements().into_iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

fn same_n(u: &SetVector, v: &SetVector) -> Result<()> {
    if u.n != v.n {
        return Err(Error::DimensionMismatch {
            left: u.n(),
            right: v.n(),
        });
    }
    Ok(())
}

/// `|A ∩ B| mod 2`.
pub fn inner_product(u: &SetVector, v: &SetVector) -> Result<u8> {
    u.inner_product(v)
}

/// `|A| mod 2`.
pub fn set_parity(v: &SetVector) -> u8 {
    v.parity()
}

/// A subspace of F_2^n kept in reduced row-echelon form.
///
/// Rows are ordered by pivot (highest set bit) descending and every pivot
/// column is zero in all other rows, so two subspaces are equal exactly when
/// their bases are equal.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Gf2Subspace {
    n: usize,
    rows: Vec<u64>,
}

#[inline]
fn pivot(row: u64) -> u32 {
    63 - row.leading_zeros()
}

impl Gf2Subspace {
    /// The zero subspace `{0}`.
    pub fn zero(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(Gf2Subspace { n, rows: Vec::new() })
    }

    /// All of F_2^n.
    pub fn full(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(Gf2Subspace {
            n,
            rows: (0..n).rev().map(|i| 1u64 << i).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> Vec<SetVector> {
        self.rows
            .iter()
            .map(|&bits| SetVector {
                n: self.n as u8,
                bits,
            })
            .collect()
    }

    #[cfg(test)]
    pub(crate) fn basis_bits(&self) -> &[u64] {
        &self.rows
    }

    fn reduce(&self, mut v: u64) -> u64 {
        for &row in &self.rows {
            if v >> pivot(row) & 1 == 1 {
                v ^= row;
            }
        }
        v
    }

    /// Adds `bits` to the spanning set. Returns true when the rank grew.
    pub(crate) fn insert_bits(&mut self, bits: u64) -> bool {
        let v = self.reduce(bits);
        if v == 0 {
            return false;
        }
        let p = pivot(v);
        for row in self.rows.iter_mut() {
            if *row >> p & 1 == 1 {
                *row ^= v;
            }
        }
        let at = self.rows.partition_point(|&r| pivot(r) > p);
        self.rows.insert(at, v);
        true
    }

    pub fn insert(&mut self, v: &SetVector) -> Result<bool> {
        if v.n() != self.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: v.n(),
            });
        }
        Ok(self.insert_bits(v.bits))
    }

    pub(crate) fn contains_bits(&self, bits: u64) -> bool {
        self.reduce(bits) == 0
    }

    pub fn contains(&self, v: &SetVector) -> Result<bool> {
        if v.n() != self.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: v.n(),
            });
        }
        Ok(self.contains_bits(v.bits))
    }

    /// `W^⊥`. For a free (non-pivot) column `f` the vector `e_f + Σ e_{pivot(r)}`
    /// over rows `r` containing `f` is orthogonal to every row.
    pub fn orthogonal_complement(&self) -> Gf2Subspace {
        let pivots: u64 = self.rows.iter().fold(0, |acc, &r| acc | 1 << pivot(r));
        let mut out = Gf2Subspace {
            n: self.n,
            rows: Vec::with_capacity(self.n - self.rank()),
        };
        for f in 0..self.n {
            if pivots >> f & 1 == 1 {
                continue;
            }
            let mut x = 1u64 << f;
            for &row in &self.rows {
                if row >> f & 1 == 1 {
                    x |= 1 << pivot(row);
                }
            }
            out.insert_bits(x);
        }
        out
    }

    /// `W + U`.
    pub fn sum(&self, other: &Gf2Subspace) -> Result<Gf2Subspace> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let mut out = self.clone();
        for &r in &other.rows {
            out.insert_bits(r);
        }
        Ok(out)
    }

    /// `W ∩ U = (W^⊥ + U^⊥)^⊥`.
    pub fn intersection(&self, other: &Gf2Subspace) -> Result<Gf2Subspace> {
        Ok(self
            .orthogonal_complement()
            .sum(&other.orthogonal_complement())?
            .orthogonal_complement())
    }

    /// `W ∩ v^⊥`.
    pub fn intersect_hyperplane(&self, v: &SetVector) -> Result<Gf2Subspace> {
        let mut line = Gf2Subspace::zero(self.n)?;
        line.insert(v)?;
        self.intersection(&line.orthogonal_complement())
    }

    pub fn is_subspace_of(&self, other: &Gf2Subspace) -> bool {
        self.n == other.n && self.rows.iter().all(|&r| other.contains_bits(r))
    }

    /// `W ⊆ W^⊥`.
    pub fn is_self_orthogonal(&self) -> bool {
        self.rows
            .iter()
            .enumerate()
            .all(|(i, &a)| self.rows[i..].iter().all(|&b| dot_bits(a, b) == 0))
    }

    /// All `2^rank` members, in Gray-code-free binary counter order over the basis.
    pub fn elements(&self) -> Vec<SetVector> {
        let r = self.rank();
        assert!(r < 32, "refusing to enumerate 2^{r} vectors");
        (0u64..1 << r)
            .map(|c| {
                let bits = self
                    .rows
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| c >> i & 1 == 1)
                    .fold(0, |acc, (_, &row)| acc ^ row);
                SetVector {
                    n: self.n as u8,
                    bits,
                }
            })
            .collect()
    }
}

impl fmt::Debug for Gf2Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Gf2Subspace")
            .field("n", &self.n)
            .field("basis", &self.basis())
            .finish()
    }
}

/// Row-reduced span of `vectors` inside F_2^n.
pub fn span(n: usize, vectors: &[SetVector]) -> Result<Gf2Subspace> {
    let mut w = Gf2Subspace::zero(n)?;
    for v in vectors {
        w.insert(v)?;
    }
    Ok(w)
}

pub fn orthogonal_complement(w: &Gf2Subspace) -> Gf2Subspace {
    w.orthogonal_complement()
}
