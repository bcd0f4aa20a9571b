use proptest::prelude::*;

use rainbow_core::bounds::{
    binomial_upper_vs_union, expected_x_upper, star_double_count, star_sum_scan,
};
use rainbow_core::colorings::{
    canonicalize, color_degrees, edge_count, parse_coloring, ColoringSpace, CompleteGraphColoring,
};
use rainbow_core::montecarlo::{exact_tail_within_chernoff, wilson_interval, Z95};
use rainbow_core::trees::{
    combinations, exact_count, internal_tree_packing, max_disjoint_rainbow_trees,
    rainbow_star_count, verify_coloring, DisjointFamily, OracleMode, StarIndex, VertexSet,
};

fn coloring(
    n_range: std::ops::RangeInclusive<usize>,
    t_range: std::ops::RangeInclusive<usize>,
) -> impl Strategy<Value = CompleteGraphColoring> {
    (n_range, t_range).prop_flat_map(|(n, t)| {
        prop::collection::vec(1..=t as u8, edge_count(n))
            .prop_map(move |colors| CompleteGraphColoring::new(n, t, colors).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn text_format_round_trips(c in coloring(2..=12, 1..=5)) {
        let back = parse_coloring(&c.to_text()).unwrap();
        prop_assert_eq!(back, c);
    }

    #[test]
    fn degree_rows_sum_to_n_minus_one(c in coloring(2..=15, 1..=6)) {
        let d = color_degrees(&c);
        for v in 0..c.n() {
            prop_assert_eq!(d.row(v).iter().sum::<u32>() as usize, c.n() - 1);
        }
    }

    #[test]
    fn canonical_form_is_idempotent_and_ranked(c in coloring(3..=6, 2..=3)) {
        let canon = canonicalize(c.colors());
        prop_assert_eq!(canonicalize(&canon), canon.clone());
        let space = ColoringSpace::new(c.n(), c.palette(), true, u128::MAX).unwrap();
        let rank = space.rank(&canon).expect("canonical sequences are in the space");
        prop_assert_eq!(space.unrank(rank), canon);
    }

    #[test]
    fn star_index_matches_scan(c in coloring(3..=14, 2..=5), k in 2usize..=4) {
        prop_assume!(k <= c.n());
        let idx = StarIndex::new(&c);
        for s in combinations(c.n(), k).take(60) {
            let s = VertexSet::new(s, c.n()).unwrap();
            prop_assert_eq!(idx.count(&s), rainbow_star_count(&s, &c));
        }
    }

    #[test]
    fn certificates_are_sound(c in coloring(4..=7, 3..=3)) {
        for s in combinations(c.n(), 3) {
            let s = VertexSet::new(s, c.n()).unwrap();
            let lower = rainbow_star_count(&s, &c) + internal_tree_packing(&s, &c).len();
            let paper = exact_count(&s, &c, OracleMode::Paper).unwrap();
            let full = exact_count(&s, &c, OracleMode::full_default(3)).unwrap();
            prop_assert_eq!(lower, paper);
            prop_assert!(paper <= full);
        }
    }

    #[test]
    fn witness_families_revalidate(c in coloring(4..=7, 3..=4)) {
        let s = VertexSet::first(3, c.n()).unwrap();
        let (count, family) = max_disjoint_rainbow_trees(&s, &c, OracleMode::Full { budget: 2 }).unwrap();
        prop_assert_eq!(count, family.len());
        // the checked constructor re-tests rainbow and pairwise disjointness
        let again = DisjointFamily::new(&s, family.trees().to_vec(), &c);
        prop_assert!(again.is_ok());
    }

    #[test]
    fn verification_is_monotone_in_ell(c in coloring(5..=8, 3..=3)) {
        let mode = OracleMode::full_default(3);
        let mut previous = true;
        for ell in 0..=4 {
            let pass = verify_coloring(&c, 3, ell, mode).unwrap().pass;
            prop_assert!(previous || !pass);
            previous = pass;
        }
    }

    #[test]
    fn double_counting_identity(c in coloring(3..=12, 3..=3)) {
        let (stars, products) = star_double_count(&c).unwrap();
        prop_assert_eq!(stars, products);
        prop_assert_eq!(star_sum_scan(&c, 3), stars);
        prop_assert!(expected_x_upper(&c).unwrap().holds());
    }

    #[test]
    fn wilson_interval_brackets_estimate(samples in 1u64..5000, frac in 0.0f64..=1.0) {
        let successes = (samples as f64 * frac).floor() as u64;
        let (lo, hi) = wilson_interval(successes, samples, Z95);
        let phat = successes as f64 / samples as f64;
        prop_assert!(0.0 <= lo && lo <= phat && phat <= hi && hi <= 1.0);
    }

    #[test]
    fn binomial_tail_sandwich(n in 8usize..120, k in 3usize..=4, ell_frac in 0.0f64..1.0) {
        let p = match k { 3 => 2.0 / 9.0, _ => 24.0 / 256.0 };
        let mean = (n - k) as f64 * p;
        let ell = 1 + (ell_frac * mean).floor() as usize;
        prop_assume!((ell as f64) - 1.0 < mean - 1e-9);
        prop_assert!(exact_tail_within_chernoff(n, k, ell).unwrap());
        if n >= k + ell {
            let chain = binomial_upper_vs_union(n as u64, k as u64, ell as u64).unwrap();
            prop_assert!(chain.exact <= chain.right);
        }
    }
}
