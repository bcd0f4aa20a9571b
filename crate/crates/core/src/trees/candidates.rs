//! Candidate rainbow S-trees for the exact oracle.
//!
//! Trees on a vertex set `W = S ∪ I` are generated from Prüfer sequences
//! over `W`. A vertex is a leaf exactly when it is absent from the sequence,
//! so "every vertex of `I` is internal" is "every vertex of `I` occurs".

use super::{edges_rainbow, norm, star_tree, Edge, OracleMode, STree, VertexSet};
use crate::colorings::CompleteGraphColoring;
use crate::error::{Error, Result};

/// Largest number of structural candidate trees the oracle will generate.
pub const DEFAULT_CANDIDATE_LIMIT: usize = 2_000_000;

/// Decodes a Prüfer sequence over local labels `0..m` into local edges.
fn prufer_decode(seq: &[usize], m: usize, edges: &mut Vec<Edge>) {
    edges.clear();
    let mut degree = vec![1usize; m];
    for &x in seq {
        degree[x] += 1;
    }
    for &x in seq {
        let leaf = (0..m)
            .find(|&v| degree[v] == 1)
            .expect("a leaf always exists");
        edges.push((leaf, x));
        degree[leaf] -= 1;
        degree[x] -= 1;
    }
    let mut rest = (0..m).filter(|&v| degree[v] == 1);
    let (a, b) = (rest.next().unwrap(), rest.next().unwrap());
    edges.push((a, b));
}

/// Calls `f` with the global edge list of every spanning tree of `K[W]` in
/// which each vertex flagged in `must_be_internal` has degree at least 2.
fn for_each_tree(vertices: &[usize], must_be_internal: &[bool], mut f: impl FnMut(&[Edge])) {
    let m = vertices.len();
    if m < 2 {
        return;
    }
    if m == 2 {
        if !must_be_internal.iter().any(|&b| b) {
            f(&[norm(vertices[0], vertices[1])]);
        }
        return;
    }
    let len = m - 2;
    let mut seq = vec![0usize; len];
    let mut local = Vec::with_capacity(m - 1);
    let mut global = Vec::with_capacity(m - 1);
    let mut seen = vec![false; m];
    loop {
        seen.iter_mut().for_each(|s| *s = false);
        for &x in &seq {
            seen[x] = true;
        }
        if must_be_internal
            .iter()
            .zip(&seen)
            .all(|(&need, &s)| !need || s)
        {
            prufer_decode(&seq, m, &mut local);
            global.clear();
            global.extend(local.iter().map(|&(a, b)| norm(vertices[a], vertices[b])));
            global.sort_unstable();
            f(&global);
        }
        // next sequence, last position fastest
        let mut i = len;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            seq[i] += 1;
            if seq[i] < m {
                break;
            }
            seq[i] = 0;
        }
    }
}

fn rainbow_trees_on(
    terminals: &VertexSet,
    vertices: &[usize],
    coloring: &CompleteGraphColoring,
    out: &mut Vec<STree>,
) {
    let must: Vec<bool> = vertices.iter().map(|&v| !terminals.contains(v)).collect();
    for_each_tree(vertices, &must, |edges| {
        if edges_rainbow(edges, coloring) {
            out.push(STree::from_parts_unchecked(
                terminals,
                vertices.to_vec(),
                edges.to_vec(),
            ));
        }
    });
}

/// Rainbow spanning trees of `G[S]`, sorted by edge list.
pub(crate) fn internal_candidates(
    terminals: &VertexSet,
    coloring: &CompleteGraphColoring,
) -> Vec<STree> {
    let mut out = Vec::new();
    if terminals.k() - 1 <= coloring.palette() {
        rainbow_trees_on(terminals, terminals.members(), coloring, &mut out);
    }
    out.sort_by(|a, b| a.edges().cmp(b.edges()));
    out
}

fn is_star(tree: &STree, k: usize) -> bool {
    tree.vertices().len() == k + 1 && tree.edges().len() == k && {
        let center = tree.external_vertices().next();
        center.is_some_and(|c| tree.edges().iter().all(|&(u, v)| u == c || v == c))
    }
}

fn binomial(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    (0..r).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Number of trees the generator would inspect, before the rainbow filter.
fn structural_count(n: usize, k: usize, t: usize, mode: OracleMode) -> u128 {
    let trees_on = |m: usize| -> u128 {
        if m < 2 {
            0
        } else {
            (m as u128).saturating_pow(m as u32 - 2)
        }
    };
    let internal = if k - 1 <= t { trees_on(k) } else { 0 };
    match mode {
        OracleMode::Paper => internal + if k <= t { (n - k) as u128 } else { 0 },
        OracleMode::Full { budget } => {
            let mut total = internal;
            for i in 1..=budget.min(n - k) {
                if k + i - 1 > t {
                    break;
                }
                total = total.saturating_add(binomial(n - k, i).saturating_mul(trees_on(k + i)));
            }
            total
        }
    }
}

/// All rainbow candidate S-trees of the mode, sorted by edge count, then
/// stars `T(u)` before other trees of the same size, then edge list. That
/// order fixes the witness tie-breaking.
pub fn candidate_trees(
    terminals: &VertexSet,
    coloring: &CompleteGraphColoring,
    mode: OracleMode,
    limit: usize,
) -> Result<Vec<STree>> {
    let n = coloring.n();
    let k = terminals.k();
    let t = coloring.palette();
    let structural = structural_count(n, k, t, mode);
    if structural > limit as u128 {
        return Err(Error::OracleBudget {
            candidates: structural.min(usize::MAX as u128) as usize,
            limit,
        });
    }
    let mut out = internal_candidates(terminals, coloring);
    let outside: Vec<usize> = (0..n).filter(|&v| !terminals.contains(v)).collect();
    match mode {
        OracleMode::Paper => {
            for &u in &outside {
                let star = star_tree(terminals, u)?;
                if star.is_rainbow(coloring) {
                    out.push(star);
                }
            }
        }
        OracleMode::Full { budget } => {
            for i in 1..=budget.min(outside.len()) {
                // a rainbow tree on k + i vertices needs k + i - 1 colors
                if k + i - 1 > t {
                    break;
                }
                for ext in super::verify::combinations(outside.len(), i) {
                    let mut vs: Vec<usize> = terminals.members().to_vec();
                    vs.extend(ext.iter().map(|&j| outside[j]));
                    vs.sort_unstable();
                    rainbow_trees_on(terminals, &vs, coloring, &mut out);
                }
            }
        }
    }
    let k = terminals.k();
    let key = |t: &STree| (t.edges().len(), !is_star(t, k));
    out.sort_by(|a, b| (key(a), a.edges()).cmp(&(key(b), b.edges())));
    Ok(out)
}
