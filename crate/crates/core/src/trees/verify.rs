use rayon::prelude::*;
use serde::Serialize;

use super::{
    candidates::DEFAULT_CANDIDATE_LIMIT, internal_packing_up_to, max_disjoint_up_to, OracleMode,
    StarIndex, VertexSet,
};
use crate::colorings::CompleteGraphColoring;
use crate::error::{domain, Result};

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut cur: Option<Vec<usize>> = (k <= n).then(|| (0..k).collect());
    std::iter::from_fn(move || {
        let out = cur.clone()?;
        let c = cur.as_mut().unwrap();
        let mut i = k;
        loop {
            if i == 0 {
                cur = None;
                break;
            }
            i -= 1;
            if c[i] < n - k + i {
                c[i] += 1;
                for j in i + 1..k {
                    c[j] = c[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetOutcome {
    /// At least `ℓ` disjoint rainbow S-trees exist.
    Satisfied,
    /// The mode's exact maximum, which is below `ℓ`.
    Deficient(usize),
}

/// Decides whether `S` has `ℓ` internally disjoint rainbow S-trees.
///
/// Stars plus the internal packing are always internally disjoint from each
/// other, so their sum is a sound lower bound and is tried first. In paper
/// mode that sum is also the exact value.
pub fn check_set(
    terminals: &VertexSet,
    stars: &StarIndex<'_>,
    ell: usize,
    mode: OracleMode,
    candidate_limit: usize,
) -> Result<SetOutcome> {
    if ell == 0 {
        return Ok(SetOutcome::Satisfied);
    }
    let coloring = stars.coloring();
    let star_count = stars.count(terminals);
    if star_count >= ell {
        return Ok(SetOutcome::Satisfied);
    }
    let internal = internal_packing_up_to(terminals, coloring, ell - star_count).len();
    if star_count + internal >= ell {
        return Ok(SetOutcome::Satisfied);
    }
    match mode {
        OracleMode::Paper => Ok(SetOutcome::Deficient(star_count + internal)),
        OracleMode::Full { .. } => {
            let (exact, _) = max_disjoint_up_to(terminals, coloring, mode, ell, candidate_limit)?;
            Ok(if exact >= ell {
                SetOutcome::Satisfied
            } else {
                SetOutcome::Deficient(exact)
            })
        }
    }
}

/// Exact oracle value for one set.
pub fn exact_count(
    terminals: &VertexSet,
    coloring: &CompleteGraphColoring,
    mode: OracleMode,
) -> Result<usize> {
    Ok(max_disjoint_up_to(
        terminals,
        coloring,
        mode,
        usize::MAX,
        DEFAULT_CANDIDATE_LIMIT,
    )?
    .0)
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    /// Also compute the exact count for every set (slow on large `n`).
    pub with_counts: bool,
    pub candidate_limit: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            with_counts: false,
            candidate_limit: DEFAULT_CANDIDATE_LIMIT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SetCount {
    #[serde(rename = "S")]
    pub set: Vec<usize>,
    pub count: usize,
}

/// Result of checking every `k`-set of a coloring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verification {
    pub n: usize,
    pub t: usize,
    pub k: usize,
    pub ell: usize,
    pub mode: String,
    pub pass: bool,
    /// First failing set in lexicographic order, 1-based.
    #[serde(rename = "witness_S")]
    pub witness_s: Option<Vec<usize>>,
    /// Exact count of the witness set.
    pub witness_count: Option<usize>,
    pub sets_checked: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_s_counts: Option<Vec<SetCount>>,
}

pub fn verify_coloring(
    coloring: &CompleteGraphColoring,
    k: usize,
    ell: usize,
    mode: OracleMode,
) -> Result<Verification> {
    verify_coloring_with(coloring, k, ell, mode, VerifyOptions::default())
}

const CHUNK: usize = 4096;

pub fn verify_coloring_with(
    coloring: &CompleteGraphColoring,
    k: usize,
    ell: usize,
    mode: OracleMode,
    opts: VerifyOptions,
) -> Result<Verification> {
    mode.validate()?;
    let n = coloring.n();
    if k < 2 || k > n {
        return domain(format!("need 2 <= k <= n, got k={} n={}", k, n));
    }
    let stars = StarIndex::new(coloring);
    let mut report = Verification {
        n,
        t: coloring.palette(),
        k,
        ell,
        mode: mode.name(),
        pass: true,
        witness_s: None,
        witness_count: None,
        sets_checked: 0,
        per_s_counts: None,
    };

    if opts.with_counts {
        let sets: Vec<Vec<usize>> = combinations(n, k).collect();
        let counts: Vec<usize> = sets
            .par_iter()
            .map(|s| exact_count(&VertexSet::from_sorted_unchecked(s.clone()), coloring, mode))
            .collect::<Result<_>>()?;
        report.sets_checked = sets.len() as u64;
        if let Some(i) = counts.iter().position(|&c| c < ell) {
            report.pass = false;
            report.witness_s = Some(sets[i].iter().map(|v| v + 1).collect());
            report.witness_count = Some(counts[i]);
        }
        report.per_s_counts = Some(
            sets.into_iter()
                .zip(counts)
                .map(|(s, count)| SetCount {
                    set: s.iter().map(|v| v + 1).collect(),
                    count,
                })
                .collect(),
        );
        return Ok(report);
    }

    if ell == 0 {
        return Ok(report);
    }
    let mut sets = combinations(n, k);
    loop {
        let chunk: Vec<Vec<usize>> = sets.by_ref().take(CHUNK).collect();
        if chunk.is_empty() {
            return Ok(report);
        }
        // first failing set or error within the chunk, by position
        let hit = chunk
            .par_iter()
            .enumerate()
            .map(|(i, s)| {
                let set = VertexSet::from_sorted_unchecked(s.clone());
                match check_set(&set, &stars, ell, mode, opts.candidate_limit) {
                    Ok(SetOutcome::Satisfied) => None,
                    Ok(SetOutcome::Deficient(c)) => Some((i, Ok(c))),
                    Err(e) => Some((i, Err(e))),
                }
            })
            .find_first(|r| r.is_some())
            .flatten();
        match hit {
            None => report.sets_checked += chunk.len() as u64,
            Some((i, outcome)) => {
                let count = outcome?;
                report.sets_checked += i as u64 + 1;
                report.pass = false;
                report.witness_s = Some(chunk[i].iter().map(|v| v + 1).collect());
                report.witness_count = Some(count);
                return Ok(report);
            }
        }
    }
}

/// Number of `k`-sets that fail, sequentially. Used by local search.
pub(crate) fn count_failing(
    coloring: &CompleteGraphColoring,
    k: usize,
    ell: usize,
    mode: OracleMode,
) -> Result<usize> {
    let stars = StarIndex::new(coloring);
    let mut failing = 0;
    for s in combinations(coloring.n(), k) {
        let set = VertexSet::from_sorted_unchecked(s);
        if let SetOutcome::Deficient(_) =
            check_set(&set, &stars, ell, mode, DEFAULT_CANDIDATE_LIMIT)?
        {
            failing += 1;
        }
    }
    Ok(failing)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colorings::{random_coloring, ColoringSpace, SeededStream};
    use crate::trees::{internal_tree_packing, max_disjoint_rainbow_trees, rainbow_star_count};

    #[test]
    fn combinations_lexicographic() {
        let all: Vec<Vec<usize>> = combinations(4, 2).collect();
        assert_eq!(
            all,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        assert_eq!(combinations(6, 3).count(), 20);
        assert_eq!(combinations(3, 4).count(), 0);
        assert_eq!(combinations(3, 0).count(), 1);
    }

    #[test]
    fn zero_demand_passes() {
        let c = CompleteGraphColoring::monochromatic(5, 3, 1).unwrap();
        let v = verify_coloring(&c, 3, 0, OracleMode::Paper).unwrap();
        assert!(v.pass);
    }

    #[test]
    fn monochromatic_fails_at_first_set() {
        let c = CompleteGraphColoring::monochromatic(6, 3, 1).unwrap();
        let v = verify_coloring(&c, 3, 1, OracleMode::full_default(3)).unwrap();
        assert!(!v.pass);
        assert_eq!(v.witness_s, Some(vec![1, 2, 3]));
        assert_eq!(v.witness_count, Some(0));
    }

    #[test]
    fn some_k5_colorings_fail() {
        let space = ColoringSpace::new(5, 3, true, 100_000).unwrap();
        let mut fails = 0;
        for c in space.iter().step_by(37) {
            let v = verify_coloring(&c, 3, 1, OracleMode::full_default(3)).unwrap();
            if !v.pass {
                fails += 1;
                let w = VertexSet::from_one_based(v.witness_s.as_ref().unwrap(), 5).unwrap();
                let (exact, _) =
                    max_disjoint_rainbow_trees(&w, &c, OracleMode::full_default(3)).unwrap();
                assert_eq!(Some(exact), v.witness_count);
                assert_eq!(exact, 0);
            }
        }
        assert!(fails > 0);
    }

    #[test]
    fn with_counts_agrees_with_fast_path() {
        for seed in 0..30 {
            let c = random_coloring(7, 3, &SeededStream::new(3, seed)).unwrap();
            for ell in 1..=3 {
                for mode in [OracleMode::Paper, OracleMode::full_default(3)] {
                    let fast = verify_coloring(&c, 3, ell, mode).unwrap();
                    let slow = verify_coloring_with(
                        &c,
                        3,
                        ell,
                        mode,
                        VerifyOptions {
                            with_counts: true,
                            ..Default::default()
                        },
                    )
                    .unwrap();
                    assert_eq!(fast.pass, slow.pass);
                    assert_eq!(fast.witness_s, slow.witness_s);
                    assert_eq!(fast.witness_count, slow.witness_count);
                }
            }
        }
    }

    #[test]
    fn certificate_soundness_and_mode_inclusion() {
        for seed in 0..60 {
            let n = 5 + (seed as usize % 3);
            let c = random_coloring(n, 3, &SeededStream::new(12, seed)).unwrap();
            for s in combinations(n, 3) {
                let s = VertexSet::new(s, n).unwrap();
                let lower = rainbow_star_count(&s, &c) + internal_tree_packing(&s, &c).len();
                let paper = exact_count(&s, &c, OracleMode::Paper).unwrap();
                let full = exact_count(&s, &c, OracleMode::Full { budget: 2 }).unwrap();
                assert_eq!(lower, paper);
                assert!(paper <= full);
            }
        }
    }

    #[test]
    fn witness_is_deterministic_under_thread_count() {
        let c = random_coloring(40, 3, &SeededStream::new(4, 4)).unwrap();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| verify_coloring(&c, 3, 4, OracleMode::Paper).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn rejects_bad_k() {
        let c = CompleteGraphColoring::monochromatic(4, 3, 1).unwrap();
        assert!(verify_coloring(&c, 5, 1, OracleMode::Paper).is_err());
        assert!(verify_coloring(&c, 1, 1, OracleMode::Paper).is_err());
    }
}
