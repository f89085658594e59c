//! Peeling a family into independent layers of its odd pair graph.

use std::fmt;
use std::str::FromStr;

use crate::bounds::y_size_bound;
use crate::error::{Error, Result};
use crate::family::{validate_indices, SetFamily};
use crate::gf2::{dot_bits, Gf2Subspace};
use crate::mis;

/// Families larger than this need the greedy variant.
pub const DEFAULT_SOLVER_CAP: usize = 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TownMode {
    Oddtown,
    Eventown,
}

impl TownMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            TownMode::Oddtown => "odd",
            TownMode::Eventown => "even",
        }
    }

    fn check(&self, family: &SetFamily) -> Result<()> {
        let ok = match self {
            TownMode::Oddtown => family.all_odd() || family.is_empty(),
            TownMode::Eventown => family.all_even(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Parity(format!(
                "{} mode needs a family of {}-sized sets (profile {})",
                self.as_str(),
                self.as_str(),
                family.parity_profile().as_str()
            )))
        }
    }
}

impl FromStr for TownMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "odd" | "oddtown" => Ok(TownMode::Oddtown),
            "even" | "eventown" => Ok(TownMode::Eventown),
            _ => Err(Error::InvalidParameters(format!("unknown mode {s:?}"))),
        }
    }
}

impl fmt::Display for TownMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exactness {
    Maximum,
    MaximalGreedy,
}

impl Exactness {
    pub fn as_str(&self) -> &'static str {
        match self {
            Exactness::Maximum => "maximum",
            Exactness::MaximalGreedy => "maximal-greedy",
        }
    }
}

/// Largest independent subfamily, lexicographically smallest among optima.
pub fn maximum_independent_subfamily(family: &SetFamily, mode: TownMode) -> Result<Vec<usize>> {
    maximum_independent_subfamily_with_cap(family, mode, DEFAULT_SOLVER_CAP)
}

pub fn maximum_independent_subfamily_with_cap(
    family: &SetFamily,
    mode: TownMode,
    cap: usize,
) -> Result<Vec<usize>> {
    mode.check(family)?;
    if family.len() > cap {
        return Err(Error::OverSolverCap {
            size: family.len(),
            cap,
        });
    }
    let all: Vec<usize> = (0..family.len()).collect();
    Ok(mis::max_independent_lex(family, &all))
}

/// Facts about the first layer used by the eventown peeling argument.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventownContext {
    pub family_size: usize,
    /// `|A| − 2^⌊n/2⌋`; `None` when the family is not larger than that.
    pub s: Option<u64>,
    /// `⌈|A| / (s + 2)⌉`.
    pub alpha: Option<u64>,
    /// `2^⌊n/2⌋ > (s + 1)²`. The argument is silent when this fails, so the
    /// flag is reported rather than acted on.
    pub precondition_holds: Option<bool>,
    pub first_layer_size: usize,
    /// `|A_1| >= α`.
    pub first_layer_at_least_alpha: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeelingTrace {
    pub n: usize,
    pub mode: TownMode,
    pub exactness: Exactness,
    pub layers: Vec<Vec<usize>>,
    /// `|A ∖ (A_1 ∪ … ∪ A_i)|` after each layer.
    pub residual_sizes: Vec<usize>,
    pub eventown: Option<EventownContext>,
}

impl PeelingTrace {
    /// `Σ_{i<r} |A ∖ (A_1 ∪ … ∪ A_i)|`, a lower bound on `op(A)`.
    pub fn bound(&self) -> u64 {
        self.residual_sizes.iter().map(|&r| r as u64).sum()
    }
}

pub fn greedy_peeling(family: &SetFamily, mode: TownMode, exactness: Exactness) -> Result<PeelingTrace> {
    greedy_peeling_with_cap(family, mode, exactness, DEFAULT_SOLVER_CAP)
}

pub fn greedy_peeling_with_cap(
    family: &SetFamily,
    mode: TownMode,
    exactness: Exactness,
    cap: usize,
) -> Result<PeelingTrace> {
    mode.check(family)?;
    if exactness == Exactness::Maximum && family.len() > cap {
        return Err(Error::OverSolverCap {
            size: family.len(),
            cap,
        });
    }
    let bits = family.bits();
    let mut residual: Vec<usize> = (0..family.len()).collect();
    let mut layers = Vec::new();
    let mut residual_sizes = Vec::new();
    while !residual.is_empty() {
        let layer = match exactness {
            Exactness::Maximum => mis::max_independent_lex(family, &residual),
            Exactness::MaximalGreedy => {
                let mut layer: Vec<usize> = Vec::new();
                for &i in &residual {
                    if layer.iter().all(|&j| dot_bits(bits[i], bits[j]) == 0) {
                        layer.push(i);
                    }
                }
                layer
            }
        };
        residual.retain(|i| layer.binary_search(i).is_err());
        residual_sizes.push(residual.len());
        layers.push(layer);
    }
    let eventown = (mode == TownMode::Eventown).then(|| eventown_context(family, &layers));
    Ok(PeelingTrace {
        n: family.n(),
        mode,
        exactness,
        layers,
        residual_sizes,
        eventown,
    })
}

fn eventown_context(family: &SetFamily, layers: &[Vec<usize>]) -> EventownContext {
    let size = family.len();
    let base = 1u64 << (family.n() / 2);
    let s = (size as u64).checked_sub(base).filter(|&s| s >= 1);
    let alpha = s.map(|s| (size as u64).div_ceil(s + 2));
    let first = layers.first().map_or(0, Vec::len);
    EventownContext {
        family_size: size,
        s,
        alpha,
        precondition_holds: s.map(|s| (base as u128) > ((s as u128 + 1) * (s as u128 + 1))),
        first_layer_size: first,
        first_layer_at_least_alpha: alpha.map(|a| first as u64 >= a),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeighborhoodDiagnostic {
    pub x: usize,
    pub core: Vec<usize>,
    /// Neighbours of `x` inside the core.
    pub n_x: Vec<usize>,
    /// Members `y` outside the core whose core-neighbourhood lies in `N_x`.
    pub y: Vec<usize>,
    pub core_rank: usize,
    /// `rank(W) − rank(W ∩ x^⊥)` with `W = span(core)`.
    pub dim_drop: usize,
    /// `rank(span(core ∖ N_x))`.
    pub remaining_rank: usize,
    pub peel_index: u64,
    pub y_bound: u128,
    /// `|Y| < y_bound`.
    pub y_within_bound: bool,
}

pub fn neighborhood_diagnostic(family: &SetFamily, core: &[usize], x: usize) -> Result<NeighborhoodDiagnostic> {
    neighborhood_diagnostic_at(family, core, x, 1)
}

pub fn neighborhood_diagnostic_at(
    family: &SetFamily,
    core: &[usize],
    x: usize,
    peel_index: u64,
) -> Result<NeighborhoodDiagnostic> {
    validate_indices(core, family.len())?;
    validate_indices(&[x], family.len())?;
    if core.contains(&x) {
        return Err(Error::InvalidParameters(format!("x={x} lies inside the core")));
    }
    let bits = family.bits();
    for (k, &i) in core.iter().enumerate() {
        if let Some(&j) = core[k + 1..].iter().find(|&&j| dot_bits(bits[i], bits[j]) == 1) {
            return Err(Error::InvalidParameters(format!(
                "core is not independent: members {i} and {j} form an odd pair"
            )));
        }
    }
    let mut core_sorted = core.to_vec();
    core_sorted.sort_unstable();
    let core_mask = |v: usize| -> Vec<bool> { core_sorted.iter().map(|&c| dot_bits(bits[v], bits[c]) == 1).collect() };
    let x_mask = core_mask(x);
    let n_x: Vec<usize> = core_sorted
        .iter()
        .zip(&x_mask)
        .filter_map(|(&c, &adj)| adj.then_some(c))
        .collect();
    let y: Vec<usize> = (0..family.len())
        .filter(|v| core_sorted.binary_search(v).is_err())
        .filter(|&v| core_mask(v).iter().zip(&x_mask).all(|(&a, &b)| !a || b))
        .collect();

    let n = family.n();
    let mut w = Gf2Subspace::zero(n)?;
    let mut rest = Gf2Subspace::zero(n)?;
    for (&c, &adj) in core_sorted.iter().zip(&x_mask) {
        w.insert(&family.member(c))?;
        if !adj {
            rest.insert(&family.member(c))?;
        }
    }
    let cut = w.intersect_hyperplane(&family.member(x))?;
    let y_bound = y_size_bound(n as u32, n_x.len() as u64, peel_index);
    Ok(NeighborhoodDiagnostic {
        x,
        core: core_sorted.clone(),
        y_within_bound: (y.len() as u128) < y_bound,
        n_x,
        y,
        core_rank: w.rank(),
        dim_drop: w.rank() - cut.rank(),
        remaining_rank: rest.rank(),
        peel_index,
        y_bound,
    })
}
