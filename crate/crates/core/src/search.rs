//! Exhaustive search for the minimum odd pair number over all families of a
//! given size and parity, and for the largest independent families.
//!
//! Families are enumerated as increasing index sequences over the candidate
//! sets sorted by bitmask. Each node carries, for every later candidate, the
//! number of odd pairs it would add, so extending a family costs one array
//! update and the cheapest possible completion gives a lower bound.
//!
//! Work is split on the first two chosen candidates and processed in fixed
//! chunks. Subtrees in a chunk share only the best value from earlier chunks,
//! so node counts, the witness, and the exhaustive flag do not depend on the
//! number of threads.

use rayon::prelude::*;

use crate::decomposition::TownMode;
use crate::error::{Error, Result};
use crate::family::SetFamily;
use crate::gf2::dot_bits;
use crate::mis;

pub const DEFAULT_BUDGET: u64 = 1_000_000_000;
pub const BUDGET_ENV: &str = "OELAB_BUDGET";
/// Largest ground set accepted by the minimum search.
pub const MAX_SEARCH_N: usize = 12;
pub const MAX_EVENTOWN_N: usize = 10;
pub const MAX_ODDTOWN_N: usize = 8;
/// Subtrees per synchronisation round.
const CHUNK: usize = 256;

/// Budget from `OELAB_BUDGET`, falling back to [`DEFAULT_BUDGET`].
pub fn default_budget() -> u64 {
    std::env::var(BUDGET_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_BUDGET)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    /// Maximum number of enumeration nodes.
    pub budget: u64,
    /// Fix a canonical first member `{1, …, k}` with `k` the smallest member size.
    pub canonical: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            budget: default_budget(),
            canonical: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchResult {
    pub n: usize,
    pub size: usize,
    pub mode: TownMode,
    pub canonical: bool,
    pub budget: u64,
    /// Smallest odd pair number found; exact when `exhaustive`.
    pub minimum_op: Option<u64>,
    pub witness: Option<SetFamily>,
    /// Enumeration nodes visited.
    pub explored: u64,
    /// Subtrees cut by the completion bound.
    pub pruned: u64,
    pub exhaustive: bool,
}

impl SearchResult {
    /// `size − n` (odd) or `size − 2^⌊n/2⌋` (even), when non-negative.
    pub fn s(&self) -> Option<u64> {
        let base = match self.mode {
            TownMode::Oddtown => self.n as u64,
            TownMode::Eventown => 1u64 << (self.n / 2),
        };
        (self.size as u64).checked_sub(base)
    }
}

pub fn min_op_exhaustive(n: usize, size: usize, mode: TownMode) -> Result<SearchResult> {
    search_min(n, size, mode, &SearchOptions::default())
}

pub fn min_op_with_canonical_pruning(n: usize, size: usize, mode: TownMode) -> Result<SearchResult> {
    let opts = SearchOptions {
        canonical: true,
        ..SearchOptions::default()
    };
    search_min(n, size, mode, &opts)
}

fn parity_bit(mode: TownMode) -> u32 {
    match mode {
        TownMode::Oddtown => 1,
        TownMode::Eventown => 0,
    }
}

/// All subsets of `[n]` of the mode's parity, by ascending bitmask.
pub(crate) fn candidates(n: usize, mode: TownMode) -> Vec<u64> {
    let p = parity_bit(mode);
    (0..1u64 << n).filter(|b| b.count_ones() & 1 == p).collect()
}

/// A search problem: members that are always present plus a pool to choose from.
struct Branch {
    forced: Vec<u64>,
    pool: Vec<u64>,
    /// Odd pairs between each pool member and the forced members.
    cost: Vec<u32>,
    /// Odd pairs among the forced members.
    partial: u64,
    need: usize,
}

impl Branch {
    fn new(forced: Vec<u64>, pool: Vec<u64>, size: usize) -> Self {
        let cost = pool
            .iter()
            .map(|&c| forced.iter().map(|&f| dot_bits(f, c)).sum())
            .collect();
        let partial = forced
            .iter()
            .enumerate()
            .map(|(i, &a)| forced[i + 1..].iter().map(|&b| dot_bits(a, b) as u64).sum::<u64>())
            .sum();
        let need = size - forced.len();
        Branch {
            forced,
            pool,
            cost,
            partial,
            need,
        }
    }
}

struct Task {
    branch: usize,
    prefix: Vec<usize>,
}

#[derive(Default)]
struct TaskOutcome {
    best: Option<(u64, Vec<usize>)>,
    nodes: u64,
    pruned: u64,
    complete: bool,
}

struct Dfs<'a> {
    pool: &'a [u64],
    /// One cost row per depth.
    rows: Vec<u32>,
    scratch: Vec<u32>,
    best: u64,
    witness: Option<Vec<usize>>,
    chosen: Vec<usize>,
    nodes: u64,
    pruned: u64,
    budget: u64,
    aborted: bool,
}

impl Dfs<'_> {
    fn sum_smallest(&mut self, row: usize, start: usize, k: usize) -> u64 {
        let len = self.pool.len();
        let slice = &self.rows[row * len + start..(row + 1) * len];
        if k == 1 {
            return slice.iter().copied().min().unwrap_or(0) as u64;
        }
        self.scratch.clear();
        self.scratch.extend_from_slice(slice);
        self.scratch.select_nth_unstable(k - 1);
        self.scratch[..k].iter().map(|&c| c as u64).sum()
    }

    /// Writes row `depth + 1` as row `depth` plus the pairs formed with `pool[i]`.
    fn push_row(&mut self, depth: usize, i: usize) {
        let len = self.pool.len();
        let a = self.pool[i];
        let (lo, hi) = self.rows.split_at_mut((depth + 1) * len);
        let parent = &lo[depth * len..];
        let child = &mut hi[..len];
        for c in i + 1..len {
            child[c] = parent[c] + dot_bits(a, self.pool[c]);
        }
    }

    fn visit(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.aborted = true;
        }
        !self.aborted
    }

    fn dfs(&mut self, depth: usize, start: usize, need: usize, partial: u64) {
        let len = self.pool.len();
        if need == 0 {
            if partial < self.best {
                self.best = partial;
                self.witness = Some(self.chosen.clone());
            }
            return;
        }
        if len - start < need {
            return;
        }
        if partial + self.sum_smallest(depth, start, need) >= self.best {
            self.pruned += 1;
            return;
        }
        for i in start..=len - need {
            if !self.visit() {
                return;
            }
            let p = partial + self.rows[depth * len + i] as u64;
            if need == 1 {
                if p < self.best {
                    self.best = p;
                    self.chosen.push(i);
                    self.witness = Some(self.chosen.clone());
                    self.chosen.pop();
                }
                continue;
            }
            if p >= self.best {
                self.pruned += 1;
                continue;
            }
            self.push_row(depth, i);
            self.chosen.push(i);
            self.dfs(depth + 1, i + 1, need - 1, p);
            self.chosen.pop();
            if self.aborted {
                return;
            }
        }
    }
}

fn run_task(branch: &Branch, prefix: &[usize], bound: u64, budget: u64) -> TaskOutcome {
    let len = branch.pool.len();
    let mut dfs = Dfs {
        pool: &branch.pool,
        rows: vec![0; len * (branch.need + 1)],
        scratch: Vec::with_capacity(len),
        best: bound,
        witness: None,
        chosen: Vec::with_capacity(branch.need),
        nodes: 0,
        pruned: 0,
        budget,
        aborted: false,
    };
    dfs.rows[..len].copy_from_slice(&branch.cost);
    let mut partial = branch.partial;
    for (depth, &i) in prefix.iter().enumerate() {
        dfs.visit();
        partial += dfs.rows[depth * len + i] as u64;
        dfs.push_row(depth, i);
        dfs.chosen.push(i);
    }
    let start = prefix.last().map_or(0, |&i| i + 1);
    if !dfs.aborted {
        dfs.dfs(prefix.len(), start, branch.need - prefix.len(), partial);
    }
    TaskOutcome {
        best: dfs.witness.map(|w| (dfs.best, w)),
        nodes: dfs.nodes,
        pruned: dfs.pruned,
        complete: !dfs.aborted,
    }
}

fn tasks_for(branch_index: usize, branch: &Branch) -> Vec<Task> {
    let len = branch.pool.len();
    let mut tasks = Vec::new();
    match branch.need {
        0 => tasks.push(Task {
            branch: branch_index,
            prefix: Vec::new(),
        }),
        1 => tasks.extend((0..len).map(|i| Task {
            branch: branch_index,
            prefix: vec![i],
        })),
        need => {
            for i in 0..len {
                for j in i + 1..len {
                    if len - j > need - 2 {
                        tasks.push(Task {
                            branch: branch_index,
                            prefix: vec![i, j],
                        });
                    }
                }
            }
        }
    }
    tasks
}

/// Minimum odd pair number over all `size`-member families of `mode`-parity
/// subsets of `[n]`. The witness is the first minimiser in enumeration order.
pub fn search_min(n: usize, size: usize, mode: TownMode, opts: &SearchOptions) -> Result<SearchResult> {
    if n == 0 || n > MAX_SEARCH_N {
        return Err(Error::InvalidParameters(format!(
            "search needs 1 <= n <= {MAX_SEARCH_N} (n={n})"
        )));
    }
    let all = candidates(n, mode);
    if size > all.len() {
        return Err(Error::InvalidParameters(format!(
            "only {} {}-sized subsets of [{n}] exist (size={size})",
            all.len(),
            mode.as_str()
        )));
    }
    let branches: Vec<Branch> = if opts.canonical && size > 0 {
        // The smallest member can be relabelled to {1, …, k}.
        (0..=n)
            .filter(|&k| k as u32 & 1 == parity_bit(mode))
            .map(|k| {
                let rep = (1u64 << k) - 1;
                let pool = all
                    .iter()
                    .copied()
                    .filter(|&c| c != rep && c.count_ones() as usize >= k)
                    .collect();
                Branch::new(vec![rep], pool, size)
            })
            .filter(|b| b.pool.len() >= b.need)
            .collect()
    } else {
        vec![Branch::new(Vec::new(), all, size)]
    };
    let tasks: Vec<Task> = branches
        .iter()
        .enumerate()
        .flat_map(|(bi, b)| tasks_for(bi, b))
        .collect();

    let mut best: Option<(u64, usize, Vec<usize>)> = None;
    let mut explored = 0u64;
    let mut pruned = 0u64;
    let mut exhaustive = true;
    for chunk in tasks.chunks(CHUNK) {
        let bound = best.as_ref().map_or(u64::MAX, |b| b.0);
        // Splitting the remaining budget keeps the total within it.
        let share = (opts.budget.saturating_sub(explored) / chunk.len() as u64).max(1);
        let outcomes: Vec<TaskOutcome> = chunk
            .par_iter()
            .map(|t| run_task(&branches[t.branch], &t.prefix, bound, share))
            .collect();
        for (task, out) in chunk.iter().zip(outcomes) {
            explored += out.nodes;
            pruned += out.pruned;
            exhaustive &= out.complete;
            if let Some((value, chosen)) = out.best {
                if best.as_ref().map_or(true, |b| value < b.0) {
                    best = Some((value, task.branch, chosen));
                }
            }
        }
        if !exhaustive || explored > opts.budget {
            exhaustive = false;
            break;
        }
    }

    let witness = match &best {
        Some((_, bi, chosen)) => {
            let b = &branches[*bi];
            let bits: Vec<u64> = b
                .forced
                .iter()
                .copied()
                .chain(chosen.iter().map(|&i| b.pool[i]))
                .collect();
            Some(SetFamily::from_bits(n, &bits)?)
        }
        None => None,
    };
    Ok(SearchResult {
        n,
        size,
        mode,
        canonical: opts.canonical,
        budget: opts.budget,
        minimum_op: best.map(|b| b.0),
        witness,
        explored,
        pruned,
        exhaustive,
    })
}

fn extremal_size(n: usize, mode: TownMode, cap: usize) -> Result<usize> {
    if n == 0 || n > cap {
        return Err(Error::InvalidParameters(format!(
            "exhaustive size search needs 1 <= n <= {cap} (n={n})"
        )));
    }
    Ok(mis::independence_number(&candidates(n, mode)).len())
}

/// Largest all-even family with no odd pairs, found by exact search.
pub fn max_eventown_size(n: usize) -> Result<usize> {
    extremal_size(n, TownMode::Eventown, MAX_EVENTOWN_N)
}

/// Largest all-odd family with no odd pairs, found by exact search.
pub fn max_oddtown_size(n: usize) -> Result<usize> {
    extremal_size(n, TownMode::Oddtown, MAX_ODDTOWN_N)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::op_count;

    /// Minimum over every `size`-subset of the candidates, by plain recursion.
    fn brute_min(n: usize, size: usize, mode: TownMode) -> u64 {
        fn go(c: &[u64], start: usize, left: usize, chosen: &mut Vec<u64>, best: &mut u64) {
            if left == 0 {
                let mut e = 0;
                for i in 0..chosen.len() {
                    for j in i + 1..chosen.len() {
                        e += dot_bits(chosen[i], chosen[j]) as u64;
                    }
                }
                *best = (*best).min(e);
                return;
            }
            for i in start..c.len() {
                chosen.push(c[i]);
                go(c, i + 1, left - 1, chosen, best);
                chosen.pop();
            }
        }
        let c = candidates(n, mode);
        let mut best = u64::MAX;
        go(&c, 0, size, &mut Vec::new(), &mut best);
        best
    }

    fn opts(canonical: bool) -> SearchOptions {
        SearchOptions {
            budget: DEFAULT_BUDGET,
            canonical,
        }
    }

    #[test]
    fn known_minima() {
        let r = min_op_exhaustive(5, 6, TownMode::Oddtown).unwrap();
        assert_eq!(r.minimum_op, Some(3));
        assert!(r.exhaustive);
        assert_eq!(op_count(r.witness.as_ref().unwrap()), 3);
        assert_eq!(r.s(), Some(1));

        assert_eq!(min_op_exhaustive(4, 5, TownMode::Eventown).unwrap().minimum_op, Some(2));
        assert_eq!(min_op_exhaustive(3, 4, TownMode::Oddtown).unwrap().minimum_op, Some(3));

        let r = min_op_with_canonical_pruning(7, 8, TownMode::Oddtown).unwrap();
        assert_eq!(r.minimum_op, Some(3));
        assert!(r.exhaustive);
    }

    #[test]
    fn matches_brute_force_on_small_cases() {
        for n in 1..=5 {
            for mode in [TownMode::Oddtown, TownMode::Eventown] {
                let max = candidates(n, mode).len().min(7);
                for size in 0..=max {
                    let plain = search_min(n, size, mode, &opts(false)).unwrap();
                    let canon = search_min(n, size, mode, &opts(true)).unwrap();
                    let expected = if size < 2 { 0 } else { brute_min(n, size, mode) };
                    assert_eq!(plain.minimum_op, Some(expected), "n={n} size={size} {mode}");
                    assert_eq!(canon.minimum_op, Some(expected), "canonical n={n} size={size} {mode}");
                    for r in [&plain, &canon] {
                        let w = r.witness.as_ref().unwrap();
                        assert_eq!(w.len(), size);
                        assert_eq!(op_count(w), expected);
                    }
                }
            }
        }
    }

    #[test]
    fn canonical_explores_less() {
        let plain = search_min(6, 8, TownMode::Oddtown, &opts(false)).unwrap();
        let canon = search_min(6, 8, TownMode::Oddtown, &opts(true)).unwrap();
        assert_eq!(plain.minimum_op, Some(4));
        assert_eq!(canon.minimum_op, Some(4));
        assert!(canon.explored < plain.explored);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let r = search_min(
            6,
            8,
            TownMode::Oddtown,
            &SearchOptions {
                budget: 50,
                canonical: false,
            },
        )
        .unwrap();
        assert!(!r.exhaustive);
        if let (Some(m), Some(w)) = (r.minimum_op, &r.witness) {
            assert_eq!(op_count(w), m);
        }
    }

    #[test]
    fn deterministic_across_pools() {
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| search_min(6, 7, TownMode::Oddtown, &opts(false)).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(search_min(3, 5, TownMode::Oddtown, &opts(false)).is_err());
        assert!(search_min(13, 2, TownMode::Oddtown, &opts(false)).is_err());
        let r = search_min(3, 0, TownMode::Oddtown, &opts(false)).unwrap();
        assert_eq!(r.minimum_op, Some(0));
        assert!(search_min(0, 0, TownMode::Oddtown, &opts(true)).is_err());
    }

    #[test]
    fn extremal_examples() {
        assert_eq!(max_eventown_size(4).unwrap(), 4);
        assert_eq!(max_eventown_size(5).unwrap(), 4);
        assert_eq!(max_eventown_size(2).unwrap(), 2);
        assert_eq!(max_eventown_size(1).unwrap(), 1);
        assert_eq!(max_oddtown_size(3).unwrap(), 3);
        assert_eq!(max_oddtown_size(1).unwrap(), 1);
        assert_eq!(max_oddtown_size(5).unwrap(), 5);
        assert!(max_oddtown_size(9).is_err());
        assert!(max_eventown_size(11).is_err());
    }
}
