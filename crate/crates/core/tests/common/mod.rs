//! Random family generators shared by the integration suites.
#![allow(dead_code)]

use oelab::family::SetFamily;
use oelab::gf2::SetVector;
use rand::seq::index::sample;
use rand::Rng;

/// Subsets of `[n]` with the given parity (`None` for all), ascending.
pub fn sets_with_parity(n: usize, parity: Option<u32>) -> Vec<u64> {
    (0..1u64 << n)
        .filter(|b| parity.map_or(true, |p| b.count_ones() & 1 == p))
        .collect()
}

/// Uniform `size`-subset of `pool`, kept in sampled order.
pub fn sample_family<R: Rng>(rng: &mut R, n: usize, pool: &[u64], size: usize) -> SetFamily {
    let bits: Vec<u64> = sample(rng, pool.len(), size).into_iter().map(|i| pool[i]).collect();
    SetFamily::from_bits(n, &bits).unwrap()
}

/// Random family of `size` distinct subsets of `[n]` drawn by rejection;
/// suitable when `2^n` is too large to list.
pub fn sparse_family<R: Rng>(rng: &mut R, n: usize, size: usize, parity: Option<u32>) -> SetFamily {
    let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut seen = std::collections::BTreeSet::new();
    let mut bits = Vec::with_capacity(size);
    while bits.len() < size {
        let b = rng.gen::<u64>() & mask;
        if parity.map_or(true, |p| b.count_ones() & 1 == p) && seen.insert(b) {
            bits.push(b);
        }
    }
    SetFamily::from_bits(n, &bits).unwrap()
}

/// Family extended by `extra` distinct even sets chosen outside it.
pub fn extend_with_even<R: Rng>(rng: &mut R, base: &SetFamily, extra: usize) -> SetFamily {
    let n = base.n();
    let present: std::collections::BTreeSet<u64> = base.members().iter().map(SetVector::bits).collect();
    let pool: Vec<u64> = sets_with_parity(n, Some(0))
        .into_iter()
        .filter(|b| !present.contains(b))
        .collect();
    let mut bits: Vec<u64> = present.iter().copied().collect();
    bits.extend(sample(rng, pool.len(), extra).into_iter().map(|i| pool[i]));
    SetFamily::from_bits(n, &bits).unwrap()
}
