//! Property tests for the structural invariants of every module.

mod common;

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use oelab::bounds::*;
use oelab::decomposition::*;
use oelab::family::*;
use oelab::gf2::*;
use oelab::report::{emit_report, parse_report, Format, Report, ReportKind, Value};
use oelab::search::{search_min, SearchOptions};
use oelab::spectral::*;

fn family_strategy(max_n: usize, max_len: usize, parity: Option<u32>) -> impl Strategy<Value = SetFamily> {
    (1..=max_n).prop_flat_map(move |n| {
        prop::collection::vec(any::<u64>(), 0..=max_len).prop_map(move |raw| {
            let mask = (1u64 << n) - 1;
            let mut seen = BTreeSet::new();
            let bits: Vec<u64> = raw
                .into_iter()
                .map(|b| {
                    let b = b & mask;
                    match parity {
                        // Flip element 1 to force the parity.
                        Some(p) if b.count_ones() & 1 != p => b ^ 1,
                        _ => b,
                    }
                })
                .filter(|&b| seen.insert(b))
                .collect();
            SetFamily::from_bits(n, &bits).unwrap()
        })
    })
}

fn vectors(n: usize, max: usize) -> impl Strategy<Value = Vec<SetVector>> {
    prop::collection::vec(any::<u64>(), 0..=max)
        .prop_map(move |raw| raw.into_iter().map(|b| SetVector::new(b & ((1 << n) - 1), n).unwrap()).collect())
}

fn naive_op(bits: &[u64]) -> u64 {
    let mut e = 0;
    for i in 0..bits.len() {
        for j in i + 1..bits.len() {
            e += ((bits[i] & bits[j]).count_ones() & 1) as u64;
        }
    }
    e
}

fn bits_of(f: &SetFamily) -> Vec<u64> {
    f.members().iter().map(SetVector::bits).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inner_product_is_symmetric_and_bilinear(n in 1usize..=63, a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let m = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let [a, b, c] = [a, b, c].map(|x| SetVector::new(x & m, n).unwrap());
        prop_assert_eq!(inner_product(&a, &b).unwrap(), inner_product(&b, &a).unwrap());
        let lhs = inner_product(&a.add(&b).unwrap(), &c).unwrap();
        prop_assert_eq!(lhs, inner_product(&a, &c).unwrap() ^ inner_product(&b, &c).unwrap());
        prop_assert_eq!(inner_product(&a, &a).unwrap(), set_parity(&a));
    }

    #[test]
    fn complement_dimensions(n in 1usize..=12, vs in (1usize..=12).prop_flat_map(|n| vectors(n, 10))) {
        let n = vs.first().map_or(n, |v| v.n());
        let w = span(n, &vs).unwrap();
        let perp = orthogonal_complement(&w);
        prop_assert_eq!(w.rank() + perp.rank(), n);
        prop_assert_eq!(orthogonal_complement(&perp), w.clone());
        for v in &vs {
            prop_assert!(w.contains(v).unwrap());
        }
        for a in w.basis() {
            for b in perp.basis() {
                prop_assert_eq!(inner_product(&a, &b).unwrap(), 0);
            }
        }
    }

    #[test]
    fn modular_law(pair in (1usize..=10).prop_flat_map(|n| (vectors(n, 6), vectors(n, 6), Just(n)))) {
        let (u, v, n) = pair;
        let a = span(n, &u).unwrap();
        let b = span(n, &v).unwrap();
        let sum = a.sum(&b).unwrap();
        let cap = a.intersection(&b).unwrap();
        prop_assert_eq!(sum.rank() + cap.rank(), a.rank() + b.rank());
        prop_assert!(cap.is_subspace_of(&a) && cap.is_subspace_of(&b));
        prop_assert!(a.is_subspace_of(&sum));
        // Order of the spanning vectors does not change the canonical basis.
        let mut rev = u.clone();
        rev.reverse();
        prop_assert_eq!(span(n, &rev).unwrap().basis(), a.basis());
    }

    #[test]
    fn op_count_matches_pairs(f in family_strategy(10, 60, None)) {
        let bits = bits_of(&f);
        let e = op_count(&f);
        prop_assert_eq!(e, naive_op(&bits));
        let g = build_odd_pair_graph(&f);
        prop_assert_eq!(g.degrees().iter().map(|&d| d as u64).sum::<u64>(), 2 * e);
        prop_assert_eq!(g.edge_count(), e);
        prop_assert_eq!(g.degree_histogram().iter().map(|&(_, c)| c).sum::<usize>(), f.len());
        for v in 0..f.len() {
            prop_assert_eq!(g.neighbors(v).len(), g.degree(v) as usize);
        }
    }

    #[test]
    fn edge_counts_split_over_partitions(f in family_strategy(8, 40, None), split in any::<u64>()) {
        let (left, right): (Vec<usize>, Vec<usize>) = (0..f.len()).partition(|&i| split >> (i % 64) & 1 == 1);
        let total = induced_subgraph_edge_count(&f, &left).unwrap()
            + induced_subgraph_edge_count(&f, &right).unwrap()
            + bipartite_edge_count(&f, &left, &right).unwrap();
        prop_assert_eq!(total, op_count(&f));
    }

    #[test]
    fn text_round_trip(f in family_strategy(20, 30, None)) {
        prop_assert_eq!(parse_family(&write_family(&f)).unwrap(), f);
    }

    #[test]
    fn odd_peeling_invariants(f in family_strategy(7, 30, Some(1))) {
        let op = op_count(&f);
        let exact = greedy_peeling(&f, TownMode::Oddtown, Exactness::Maximum).unwrap();
        let greedy = greedy_peeling(&f, TownMode::Oddtown, Exactness::MaximalGreedy).unwrap();
        for t in [&exact, &greedy] {
            let mut all: Vec<usize> = t.layers.iter().flatten().copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..f.len()).collect::<Vec<_>>());
            for layer in &t.layers {
                prop_assert_eq!(induced_subgraph_edge_count(&f, layer).unwrap(), 0);
                prop_assert!(layer.len() <= f.n());
            }
            prop_assert!(t.bound() <= op);
        }
        for w in exact.layers.windows(2) {
            prop_assert!(w[0].len() >= w[1].len());
        }
        if let (Some(a), Some(b)) = (exact.layers.first(), greedy.layers.first()) {
            prop_assert!(a.len() >= b.len());
            let best = maximum_independent_subfamily(&f, TownMode::Oddtown).unwrap();
            prop_assert_eq!(&best, a);
        }
    }

    #[test]
    fn even_peeling_invariants(f in family_strategy(7, 30, Some(0))) {
        let t = greedy_peeling(&f, TownMode::Eventown, Exactness::Maximum).unwrap();
        for layer in &t.layers {
            prop_assert!(layer.len() <= 1 << (f.n() / 2));
        }
        prop_assert!(t.bound() <= op_count(&f));
    }

    #[test]
    fn neighborhood_invariants(f in family_strategy(7, 24, Some(0)), pick in any::<usize>()) {
        prop_assume!(f.len() >= 2);
        let core = maximum_independent_subfamily(&f, TownMode::Eventown).unwrap();
        let outside: Vec<usize> = (0..f.len()).filter(|i| !core.contains(i)).collect();
        prop_assume!(!outside.is_empty());
        let x = outside[pick % outside.len()];
        let d = neighborhood_diagnostic(&f, &core, x).unwrap();
        prop_assert!(d.y.contains(&x));
        prop_assert_eq!(d.n_x.len() as u64, bipartite_edge_count(&f, &[x], &core).unwrap());
        prop_assert_eq!(d.dim_drop, usize::from(!d.n_x.is_empty()));
        prop_assert!(d.remaining_rank <= d.core_rank);
    }

    #[test]
    fn plancherel_and_concentration(f in family_strategy(10, 80, None)) {
        let d = concentration_check(&f, ConcentrationMode::General).unwrap();
        prop_assert_eq!(d.plancherel_holds(), Some(true));
        prop_assert!(d.concentration_holds);
        let g = build_odd_pair_graph(&f);
        for (i, a) in f.members().iter().enumerate() {
            let direct = indicator_fourier_coefficient(&f, a).unwrap();
            let formula = BigRational::new(
                BigInt::from(f.len() as i64 - 2 * g.degree(i) as i64 - 2 * a.parity() as i64),
                BigInt::from(1u64 << f.n()),
            );
            prop_assert_eq!(direct, formula);
        }
    }

    #[test]
    fn restricted_concentration(f in family_strategy(9, 60, Some(0))) {
        prop_assume!(f.n() % 2 == 1);
        let d = concentration_check(&f, ConcentrationMode::EvenRestricted).unwrap();
        prop_assert_eq!(d.plancherel_holds(), Some(true));
        prop_assert!(d.concentration_holds);
        if f.len() >= 2 {
            prop_assert!(density_floor(&f).unwrap().holds);
        }
    }

    #[test]
    fn characters_are_multiplicative_and_distinct(n in 1usize..=16, m in any::<u64>(), m2 in any::<u64>(), a in any::<u64>(), b in any::<u64>()) {
        let mask = (1u64 << n) - 1;
        let [m, m2, a, b] = [m, m2, a, b].map(|x| SetVector::new(x & mask, n).unwrap());
        let ab = a.add(&b).unwrap();
        prop_assert_eq!(
            character_value(&m, &ab).unwrap(),
            character_value(&m, &a).unwrap() * character_value(&m, &b).unwrap()
        );
        if m != m2 {
            // A singleton in the symmetric difference separates the characters.
            let e = (m.bits() ^ m2.bits()).trailing_zeros() as usize + 1;
            let w = SetVector::from_elements(n, &[e]).unwrap();
            prop_assert_ne!(character_value(&m, &w).unwrap(), character_value(&m2, &w).unwrap());
        }
    }

    #[test]
    fn bound_relations(n in 1u64..=40, s in 0u64..=200) {
        let direct: u64 = (0..=s / n).map(|j| s - n * j).sum();
        prop_assert_eq!(oddtown_peeling_bound(n, s), BigInt::from(direct));
        if s >= 1 {
            let half = eventown_lower_bound(n as u32, s, EventownStrength::ProvenHalf);
            let full = eventown_lower_bound(n as u32, s, EventownStrength::ConjecturedFull);
            prop_assert!(half.strict && half.value < full.value);
            prop_assert!(y_size_bound(n as u32, s, 1) >= s as u128 * 2);
        }
    }

    #[test]
    fn density_bracket_is_ordered(n in 3u32..=60, num in 1i64..=49) {
        let eps = BigRational::new(BigInt::from(num), BigInt::from(100));
        if let Ok(b) = eventown_density_bounds(n, &eps) {
            prop_assert!(b.lower <= b.upper);
            prop_assert!(b.lower < BigRational::new(1.into(), 2.into()));
        }
    }

    #[test]
    fn bound_checks_never_violated(f in family_strategy(8, 24, None)) {
        for name in BoundName::ALL {
            let params = BoundParams {
                epsilon: Some(BigRational::new(1.into(), 4.into())),
                ..Default::default()
            };
            let r = check_bound(&f, name, &params).unwrap();
            prop_assert_ne!(r.verdict, Verdict::Violated, "{}", name);
        }
    }

    #[test]
    fn report_round_trip(
        ints in prop::collection::vec(any::<i64>(), 0..5),
        num in any::<i64>(),
        den in 1i64..=i64::MAX,
        text in "[a-z_, \"]{0,12}",
        flag in any::<bool>(),
    ) {
        let mut r = Report::new(ReportKind::Search)
            .param("label", text.as_str())
            .param("flag", flag)
            .value("list", ints.clone())
            .value("ratio", BigRational::new(BigInt::from(num), BigInt::from(den)))
            .value("big", BigInt::from(num) * BigInt::from(den) * BigInt::from(den));
        r.witness = Some(text.clone());
        let json = emit_report(&r, Format::Json).unwrap();
        let back = parse_report(&json).unwrap();
        prop_assert_eq!(&back, &r);
        prop_assert_eq!(emit_report(&back, Format::Json).unwrap(), json);
        prop_assert!(matches!(back.values["list"], Value::List(_)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn search_respects_bounds_and_monotonicity(n in 3usize..=5, mode_odd in any::<bool>()) {
        let mode = if mode_odd { TownMode::Oddtown } else { TownMode::Eventown };
        let total = 1usize << (n - 1);
        let mut last = 0;
        for size in 0..=total.min(8) {
            let opts = SearchOptions { budget: 50_000_000, canonical: size % 2 == 0 };
            let r = search_min(n, size, mode, &opts).unwrap();
            prop_assert!(r.exhaustive);
            let m = r.minimum_op.unwrap();
            prop_assert!(m >= last);
            last = m;
            if mode == TownMode::Oddtown && size >= n {
                let s = (size - n) as u64;
                prop_assert!(BigInt::from(m) >= oddtown_peeling_bound(n as u64, s));
                if (1..=n as u64).contains(&s) {
                    prop_assert!(m >= oddtown_lower_bound(s));
                }
            }
        }
    }
}
