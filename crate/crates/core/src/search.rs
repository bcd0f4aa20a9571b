//! Searching for colorings that pass verification.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::colorings::{
    edge_count, random_coloring, ColoringSpace, CompleteGraphColoring, SeededStream,
};
use crate::error::{domain, Error, Result};
use crate::trees::{
    combinations, count_failing, max_disjoint_rainbow_trees, verify_coloring, OracleMode,
    Verification, VertexSet,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Rejection sampling: verify independent uniform colorings.
    Random,
    /// Walk every coloring up to color permutation, in rank order.
    Exhaustive,
    /// Hill-climb on the number of failing sets, with random restarts.
    Local,
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(Strategy::Random),
            "exhaustive" => Ok(Strategy::Exhaustive),
            "local" => Ok(Strategy::Local),
            other => domain(format!(
                "unknown strategy {:?} (random|exhaustive|local)",
                other
            )),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Random => "random",
            Strategy::Exhaustive => "exhaustive",
            Strategy::Local => "local",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchConfig {
    pub n: usize,
    pub k: usize,
    pub ell: usize,
    pub t: usize,
    pub strategy: Strategy,
    /// Colorings to try (random, exhaustive) or recolor moves to evaluate
    /// (local).
    pub budget: u64,
    pub seed: u64,
    pub mode: OracleMode,
}

#[derive(Debug, Clone)]
pub enum SearchOutcome {
    Found {
        coloring: CompleteGraphColoring,
        verification: Verification,
        /// Colorings or moves evaluated, including the successful one.
        tried: u64,
    },
    /// The budget ran out. Says nothing about existence.
    NoneWithinBudget { tried: u64 },
    /// Every coloring was checked; none passes.
    ProvenNone { tried: u64 },
}

impl SearchOutcome {
    pub fn coloring(&self) -> Option<&CompleteGraphColoring> {
        match self {
            SearchOutcome::Found { coloring, .. } => Some(coloring),
            _ => None,
        }
    }

    pub fn tried(&self) -> u64 {
        match *self {
            SearchOutcome::Found { tried, .. }
            | SearchOutcome::NoneWithinBudget { tried }
            | SearchOutcome::ProvenNone { tried } => tried,
        }
    }
}

pub fn search(cfg: &SearchConfig) -> Result<SearchOutcome> {
    cfg.mode.validate()?;
    if cfg.k < 2 || cfg.k > cfg.n {
        return domain(format!("need 2 <= k <= n, got k={} n={}", cfg.k, cfg.n));
    }
    if cfg.budget == 0 {
        return domain("search budget must be at least 1");
    }
    match cfg.strategy {
        Strategy::Random => random_search(cfg),
        Strategy::Exhaustive => exhaustive_search(cfg),
        Strategy::Local => local_search(cfg),
    }
}

const CHUNK: u64 = 1024;

/// First index in `0..total`, scanned in parallel chunks, whose coloring
/// passes. Ties go to the smallest index.
fn first_pass(
    cfg: &SearchConfig,
    total: u64,
    make: impl Fn(u64) -> Result<CompleteGraphColoring> + Sync,
) -> Result<Option<(u64, CompleteGraphColoring, Verification)>> {
    let mut start = 0;
    while start < total {
        let end = (start + CHUNK).min(total);
        let hit = (start..end)
            .into_par_iter()
            .map(|i| -> Result<Option<_>> {
                let c = make(i)?;
                let v = verify_coloring(&c, cfg.k, cfg.ell, cfg.mode)?;
                Ok(v.pass.then_some((i, c, v)))
            })
            .find_first(|r| !matches!(r, Ok(None)));
        if let Some(r) = hit {
            return r;
        }
        start = end;
    }
    Ok(None)
}

fn random_search(cfg: &SearchConfig) -> Result<SearchOutcome> {
    let seed = SeededStream::new(cfg.seed, 0);
    let hit = first_pass(cfg, cfg.budget, |i| {
        random_coloring(cfg.n, cfg.t, &seed.substream(i))
    })?;
    Ok(match hit {
        Some((i, coloring, verification)) => SearchOutcome::Found {
            coloring,
            verification,
            tried: i + 1,
        },
        None => SearchOutcome::NoneWithinBudget { tried: cfg.budget },
    })
}

fn exhaustive_search(cfg: &SearchConfig) -> Result<SearchOutcome> {
    // passing is invariant under permuting colors, so one coloring per orbit
    // suffices
    let space = ColoringSpace::new(cfg.n, cfg.t, true, u128::MAX)?;
    let total = space.len().min(cfg.budget as u128) as u64;
    let hit = first_pass(cfg, total, |i| Ok(space.coloring(i as u128)))?;
    Ok(match hit {
        Some((i, coloring, verification)) => SearchOutcome::Found {
            coloring,
            verification,
            tried: i + 1,
        },
        None if total as u128 == space.len() => SearchOutcome::ProvenNone { tried: total },
        None => SearchOutcome::NoneWithinBudget { tried: total },
    })
}

fn local_search(cfg: &SearchConfig) -> Result<SearchOutcome> {
    let m = edge_count(cfg.n);
    if m == 0 || cfg.t < 2 {
        // nothing to move; a single evaluation decides
        let c = random_coloring(cfg.n, cfg.t, &SeededStream::new(cfg.seed, 0))?;
        let v = verify_coloring(&c, cfg.k, cfg.ell, cfg.mode)?;
        return Ok(if v.pass {
            SearchOutcome::Found {
                coloring: c,
                verification: v,
                tried: 1,
            }
        } else {
            SearchOutcome::NoneWithinBudget { tried: 1 }
        });
    }
    let patience = 20 * m as u64 * (cfg.t as u64 - 1);
    let mut tried = 0u64;
    let mut restart = 0u64;
    while tried < cfg.budget {
        let stream = SeededStream::new(cfg.seed, restart);
        let mut rng = stream.rng();
        let mut c = random_coloring(cfg.n, cfg.t, &stream.substream(u64::MAX - restart))?;
        let mut score = count_failing(&c, cfg.k, cfg.ell, cfg.mode)?;
        tried += 1;
        let mut stale = 0u64;
        while score > 0 && stale < patience && tried < cfg.budget {
            let e = rng.gen_range(0..m);
            let old = c.colors()[e];
            // uniform over the other t-1 colors
            let mut new = rng.gen_range(1..cfg.t as u8);
            if new >= old {
                new += 1;
            }
            c.set_color_at(e, new);
            let s = count_failing(&c, cfg.k, cfg.ell, cfg.mode)?;
            tried += 1;
            if s < score {
                stale = 0;
            } else {
                stale += 1;
            }
            if s <= score {
                score = s;
            } else {
                c.set_color_at(e, old);
            }
        }
        if score == 0 {
            let verification = verify_coloring(&c, cfg.k, cfg.ell, cfg.mode)?;
            if !verification.pass {
                return Err(Error::Invariant(
                    "local search score disagrees with verification".into(),
                ));
            }
            return Ok(SearchOutcome::Found {
                coloring: c,
                verification,
                tried,
            });
        }
        restart += 1;
    }
    Ok(SearchOutcome::NoneWithinBudget { tried })
}

/// For every `k`-set, a maximum family of disjoint rainbow S-trees:
///
/// ```text
/// S={1,2,3} count=2
/// T: (1,4) (2,4) (3,4)
/// T: (1,2) (2,3)
/// ```
pub fn witness_dump(
    coloring: &CompleteGraphColoring,
    k: usize,
    mode: OracleMode,
) -> Result<String> {
    let n = coloring.n();
    if k < 2 || k > n {
        return domain(format!("need 2 <= k <= n, got k={} n={}", k, n));
    }
    let sets: Vec<Vec<usize>> = combinations(n, k).collect();
    let blocks: Vec<String> = sets
        .par_iter()
        .map(|s| {
            let set = VertexSet::new(s.iter().copied(), n)?;
            let (count, family) = max_disjoint_rainbow_trees(&set, coloring, mode)?;
            Ok(format!("S={} count={}\n{}", set, count, family.dump()))
        })
        .collect::<Result<_>>()?;
    Ok(blocks.concat())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: usize, ell: usize, t: usize, strategy: Strategy, budget: u64) -> SearchConfig {
        SearchConfig {
            n,
            k: 3,
            ell,
            t,
            strategy,
            budget,
            seed: 5,
            mode: OracleMode::full_default(3),
        }
    }

    fn assert_found(out: &SearchOutcome, ell: usize) {
        let c = out.coloring().expect("search should succeed");
        let v = verify_coloring(c, 3, ell, OracleMode::full_default(3)).unwrap();
        assert!(v.pass);
        let n = c.n() as u64;
        assert_eq!(v.sets_checked, n * (n - 1) * (n - 2) / 6);
    }

    #[test]
    fn random_finds_k6_ell1() {
        let out = search(&cfg(6, 1, 3, Strategy::Random, 10_000)).unwrap();
        assert_found(&out, 1);
    }

    #[test]
    fn local_finds_k6_ell2() {
        let out = search(&cfg(6, 2, 3, Strategy::Local, 200_000)).unwrap();
        assert_found(&out, 2);
    }

    #[test]
    fn exhaustive_finds_k6_ell1() {
        let out = search(&cfg(6, 1, 3, Strategy::Exhaustive, u64::MAX)).unwrap();
        assert_found(&out, 1);
    }

    #[test]
    fn exhaustive_k5_two_colors_pentagon() {
        // the 5-cycle and its complement: no monochromatic triangle, so every
        // triple spans a rainbow path
        let out = search(&cfg(5, 1, 2, Strategy::Exhaustive, u64::MAX)).unwrap();
        assert_found(&out, 1);
    }

    #[test]
    fn exhaustive_refutes_k6_two_colors() {
        // every 2-coloring of K6 has a monochromatic triangle
        let out = search(&cfg(6, 1, 2, Strategy::Exhaustive, u64::MAX)).unwrap();
        match out {
            SearchOutcome::ProvenNone { tried } => {
                assert_eq!(
                    tried as u128,
                    ColoringSpace::new(6, 2, true, u128::MAX).unwrap().len()
                );
            }
            other => panic!("expected refutation, got {:?}", other),
        }
    }

    #[test]
    fn budget_exhaustion_is_not_refutation() {
        let out = search(&cfg(6, 1, 2, Strategy::Exhaustive, 100)).unwrap();
        assert!(matches!(
            out,
            SearchOutcome::NoneWithinBudget { tried: 100 }
        ));
        let out = search(&cfg(6, 1, 1, Strategy::Random, 50)).unwrap();
        assert!(matches!(out, SearchOutcome::NoneWithinBudget { tried: 50 }));
        let out = search(&cfg(6, 1, 1, Strategy::Local, 50)).unwrap();
        assert!(matches!(out, SearchOutcome::NoneWithinBudget { .. }));
    }

    #[test]
    fn random_search_is_thread_independent() {
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| search(&cfg(6, 1, 3, Strategy::Random, 5000)).unwrap())
        };
        let (a, b) = (run(1), run(4));
        assert_eq!(a.coloring(), b.coloring());
        assert_eq!(a.tried(), b.tried());
    }

    #[test]
    fn witness_dump_lists_every_set() {
        let c = crate::trees::tests::k4_example();
        let dump = witness_dump(&c, 3, OracleMode::full_default(3)).unwrap();
        assert_eq!(dump.lines().filter(|l| l.starts_with("S=")).count(), 4);
        assert!(dump.starts_with("S={1,2,3} count=2\nT: (1,2) (1,3)\nT: (1,4) (2,4) (3,4)\n"));
    }

    #[test]
    fn strategy_parsing() {
        assert_eq!("local".parse::<Strategy>().unwrap(), Strategy::Local);
        assert!("greedy".parse::<Strategy>().is_err());
        assert!(search(&cfg(6, 1, 3, Strategy::Random, 0)).is_err());
    }
}
