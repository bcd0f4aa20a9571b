//! S-trees, rainbow predicates, and exact packing of internally disjoint
//! rainbow S-trees.

mod candidates;
mod packing;
mod stars;
mod verify;

pub use candidates::{candidate_trees, DEFAULT_CANDIDATE_LIMIT};
pub use packing::max_packing;
pub use stars::{rainbow_star_count, StarIndex};
pub(crate) use verify::count_failing;
pub use verify::{
    check_set, combinations, exact_count, verify_coloring, verify_coloring_with, SetOutcome,
    Verification, VerifyOptions,
};

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::colorings::CompleteGraphColoring;
use crate::error::{domain, Error, Result};

/// A sorted set of distinct vertices of `K_n` (0-based).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexSet(Vec<usize>);

impl VertexSet {
    pub fn new(members: impl IntoIterator<Item = usize>, n: usize) -> Result<Self> {
        let mut v: Vec<usize> = members.into_iter().collect();
        v.sort_unstable();
        if v.windows(2).any(|w| w[0] == w[1]) {
            return domain(format!("duplicate vertex in {:?}", v));
        }
        if let Some(&bad) = v.iter().find(|&&x| x >= n) {
            return domain(format!("vertex {} outside 1..={}", bad + 1, n));
        }
        if v.len() < 2 {
            return domain(format!(
                "terminal set needs at least 2 vertices, got {}",
                v.len()
            ));
        }
        Ok(Self(v))
    }

    /// From 1-based labels, as used in files and on the command line.
    pub fn from_one_based(labels: &[usize], n: usize) -> Result<Self> {
        if labels.contains(&0) {
            return domain("vertex labels are 1-based");
        }
        Self::new(labels.iter().map(|&x| x - 1), n)
    }

    /// `{0, 1, ..., k-1}`.
    pub fn first(k: usize, n: usize) -> Result<Self> {
        Self::new(0..k, n)
    }

    pub(crate) fn from_sorted_unchecked(v: Vec<usize>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        Self(v)
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    pub fn members(&self) -> &[usize] {
        &self.0
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|&v| v + 1).collect()
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self.0.iter().map(|v| (v + 1).to_string()).collect();
        write!(f, "{{{}}}", labels.join(","))
    }
}

pub type Edge = (usize, usize);

#[inline]
fn norm(u: usize, v: usize) -> Edge {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

/// A tree in `K_n` whose vertex set contains the terminal set `S` and whose
/// leaves all lie in `S`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct STree {
    vertices: Vec<usize>,
    edges: Vec<Edge>,
    terminals: VertexSet,
}

impl STree {
    /// Validates the tree shape: `|E| = |V| - 1`, connected, `S ⊆ V`, all
    /// leaves in `S`.
    pub fn new(terminals: &VertexSet, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let mut es: Vec<Edge> = Vec::new();
        for (u, v) in edges {
            if u == v {
                return Err(Error::NotATree(format!("loop at vertex {}", u + 1)));
            }
            es.push(norm(u, v));
        }
        es.sort_unstable();
        if es.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::NotATree("repeated edge".into()));
        }
        let mut vs: BTreeSet<usize> = terminals.members().iter().copied().collect();
        for &(u, v) in &es {
            vs.insert(u);
            vs.insert(v);
        }
        let vertices: Vec<usize> = vs.into_iter().collect();
        if es.len() + 1 != vertices.len() {
            return Err(Error::NotATree(format!(
                "{} edges on {} vertices",
                es.len(),
                vertices.len()
            )));
        }
        // connectivity by union-find over local indices
        let local = |x: usize| vertices.binary_search(&x).unwrap();
        let mut parent: Vec<usize> = (0..vertices.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &(u, v) in &es {
            let (a, b) = (find(&mut parent, local(u)), find(&mut parent, local(v)));
            if a == b {
                return Err(Error::NotATree("edges contain a cycle".into()));
            }
            parent[a] = b;
        }
        let mut degree = vec![0usize; vertices.len()];
        for &(u, v) in &es {
            degree[local(u)] += 1;
            degree[local(v)] += 1;
        }
        if let Some(i) =
            (0..vertices.len()).find(|&i| degree[i] <= 1 && !terminals.contains(vertices[i]))
        {
            return Err(Error::NotATree(format!(
                "vertex {} outside S is a leaf",
                vertices[i] + 1
            )));
        }
        Ok(Self {
            vertices,
            edges: es,
            terminals: terminals.clone(),
        })
    }

    pub(crate) fn from_parts_unchecked(
        terminals: &VertexSet,
        vertices: Vec<usize>,
        edges: Vec<Edge>,
    ) -> Self {
        Self {
            vertices,
            edges,
            terminals: terminals.clone(),
        }
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    /// Edges as sorted `(u, v)` pairs with `u < v`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn terminals(&self) -> &VertexSet {
        &self.terminals
    }

    pub fn external_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.vertices
            .iter()
            .copied()
            .filter(move |&v| !self.terminals.contains(v))
    }

    /// True when every edge lies inside `G[S]`.
    pub fn is_internal(&self) -> bool {
        self.vertices.len() == self.terminals.k()
    }

    pub fn is_rainbow(&self, coloring: &CompleteGraphColoring) -> bool {
        is_rainbow(self, coloring)
    }

    /// `T: (u,v) (u,v) ...` with 1-based labels.
    pub fn dump_line(&self) -> String {
        let parts: Vec<String> = self
            .edges
            .iter()
            .map(|&(u, v)| format!("({},{})", u + 1, v + 1))
            .collect();
        format!("T: {}", parts.join(" "))
    }
}

/// True iff all edge colors of the tree are pairwise distinct.
pub fn is_rainbow(tree: &STree, coloring: &CompleteGraphColoring) -> bool {
    edges_rainbow(tree.edges(), coloring)
}

pub(crate) fn edges_rainbow(edges: &[Edge], coloring: &CompleteGraphColoring) -> bool {
    let mut seen = [false; 256];
    for &(u, v) in edges {
        let c = coloring.color(u, v) as usize;
        if seen[c] {
            return false;
        }
        seen[c] = true;
    }
    true
}

/// The star `T(u)` with center `u` and edges `{u s : s in S}`.
pub fn star_tree(terminals: &VertexSet, u: usize) -> Result<STree> {
    if terminals.contains(u) {
        return domain(format!("star center {} lies in S = {}", u + 1, terminals));
    }
    let mut vertices = terminals.members().to_vec();
    let pos = vertices.binary_search(&u).unwrap_err();
    vertices.insert(pos, u);
    let mut edges: Vec<Edge> = terminals.members().iter().map(|&s| norm(u, s)).collect();
    edges.sort_unstable();
    Ok(STree::from_parts_unchecked(terminals, vertices, edges))
}

/// Two S-trees are internally disjoint when they share no edge and no
/// vertex outside `S`.
pub fn internally_disjoint(a: &STree, b: &STree) -> bool {
    let shares_edge = {
        let (mut i, mut j) = (0, 0);
        let mut hit = false;
        while i < a.edges.len() && j < b.edges.len() {
            match a.edges[i].cmp(&b.edges[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    hit = true;
                    break;
                }
            }
        }
        hit
    };
    if shares_edge {
        return false;
    }
    let ext_b: BTreeSet<usize> = b.external_vertices().collect();
    !a.external_vertices().any(|v| ext_b.contains(&v))
}

/// Whether a rainbow S-tree lies inside `G[S]` or uses an outside vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TreeClass {
    /// All edges in `G[S]`; uses exactly `k - 1` colors.
    Internal,
    /// At least one edge leaves `S`; uses at least `k` colors.
    External,
}

/// Classifies a rainbow S-tree and checks its color count against its class.
pub fn classify_stree(
    tree: &STree,
    coloring: &CompleteGraphColoring,
) -> Result<(TreeClass, usize)> {
    if !tree.is_rainbow(coloring) {
        return domain(format!("tree {} is not rainbow", tree.dump_line()));
    }
    let k = tree.terminals.k();
    let colors = tree.edges.len();
    let class = if tree.is_internal() {
        TreeClass::Internal
    } else {
        TreeClass::External
    };
    let ok = match class {
        TreeClass::Internal => colors == k - 1,
        TreeClass::External => colors >= k,
    };
    if !ok {
        return Err(Error::NotATree(format!(
            "{:?} tree with {} colors for k={}",
            class, colors, k
        )));
    }
    Ok((class, colors))
}

/// Which candidate S-trees the exact oracle considers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum OracleMode {
    /// Spanning trees of `G[S]` plus the stars `T(u)`.
    Paper,
    /// Every tree on `S ∪ I` with all leaves in `S`, for external sets `I`
    /// of size at most `budget`.
    Full { budget: usize },
}

impl OracleMode {
    /// Full mode with the default external budget `k - 2` (at least 1).
    pub fn full_default(k: usize) -> Self {
        OracleMode::Full {
            budget: k.saturating_sub(2).max(1),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            OracleMode::Full { budget: 0 } => domain("full-mode budget must be at least 1"),
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> String {
        match self {
            OracleMode::Paper => "paper".into(),
            OracleMode::Full { budget } => format!("full:{}", budget),
        }
    }
}

impl fmt::Display for OracleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl std::str::FromStr for OracleMode {
    type Err = Error;

    /// `paper` or `full:<budget>`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(OracleMode::Paper),
            _ => {
                let b = s
                    .strip_prefix("full:")
                    .and_then(|b| b.parse::<usize>().ok())
                    .ok_or_else(|| Error::Domain(format!("unknown oracle mode {:?}", s)))?;
                let mode = OracleMode::Full { budget: b };
                mode.validate()?;
                Ok(mode)
            }
        }
    }
}

/// A set of pairwise internally disjoint rainbow S-trees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisjointFamily {
    terminals: VertexSet,
    trees: Vec<STree>,
}

impl DisjointFamily {
    /// Checks every tree is a rainbow S-tree for `terminals` and the trees
    /// are pairwise internally disjoint.
    pub fn new(
        terminals: &VertexSet,
        trees: Vec<STree>,
        coloring: &CompleteGraphColoring,
    ) -> Result<Self> {
        for t in &trees {
            if t.terminals() != terminals {
                return domain(format!(
                    "tree terminal set {} differs from {}",
                    t.terminals(),
                    terminals
                ));
            }
            if !t.is_rainbow(coloring) {
                return domain(format!("{} is not rainbow", t.dump_line()));
            }
        }
        for (i, a) in trees.iter().enumerate() {
            for b in &trees[i + 1..] {
                if !internally_disjoint(a, b) {
                    return domain(format!(
                        "{} and {} are not internally disjoint",
                        a.dump_line(),
                        b.dump_line()
                    ));
                }
            }
        }
        Ok(Self {
            terminals: terminals.clone(),
            trees,
        })
    }

    pub(crate) fn from_trees_unchecked(terminals: &VertexSet, trees: Vec<STree>) -> Self {
        Self {
            terminals: terminals.clone(),
            trees,
        }
    }

    pub fn terminals(&self) -> &VertexSet {
        &self.terminals
    }

    pub fn trees(&self) -> &[STree] {
        &self.trees
    }

    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    /// Witness dump: one `T: (u,v) ...` line per tree.
    pub fn dump(&self) -> String {
        self.trees.iter().map(|t| t.dump_line() + "\n").collect()
    }
}

/// Internal spanning-tree packing: a maximum set of pairwise edge-disjoint
/// rainbow spanning trees of `G[S]`.
pub fn internal_tree_packing(
    terminals: &VertexSet,
    coloring: &CompleteGraphColoring,
) -> DisjointFamily {
    internal_packing_up_to(terminals, coloring, usize::MAX)
}

pub(crate) fn internal_packing_up_to(
    terminals: &VertexSet,
    coloring: &CompleteGraphColoring,
    stop_at: usize,
) -> DisjointFamily {
    let cands = candidates::internal_candidates(terminals, coloring);
    let chosen = max_packing(&cands, stop_at);
    DisjointFamily::from_trees_unchecked(
        terminals,
        chosen.into_iter().map(|i| cands[i].clone()).collect(),
    )
}

/// Exact maximum number of internally disjoint rainbow S-trees among the
/// mode's candidates, with a witness family.
pub fn max_disjoint_rainbow_trees(
    terminals: &VertexSet,
    coloring: &CompleteGraphColoring,
    mode: OracleMode,
) -> Result<(usize, DisjointFamily)> {
    max_disjoint_up_to(
        terminals,
        coloring,
        mode,
        usize::MAX,
        DEFAULT_CANDIDATE_LIMIT,
    )
}

/// Same as [`max_disjoint_rainbow_trees`] but stops once `stop_at` trees
/// are packed.
pub(crate) fn max_disjoint_up_to(
    terminals: &VertexSet,
    coloring: &CompleteGraphColoring,
    mode: OracleMode,
    stop_at: usize,
    candidate_limit: usize,
) -> Result<(usize, DisjointFamily)> {
    mode.validate()?;
    let cands = candidate_trees(terminals, coloring, mode, candidate_limit)?;
    let chosen = max_packing(&cands, stop_at);
    let trees: Vec<STree> = chosen.into_iter().map(|i| cands[i].clone()).collect();
    Ok((
        trees.len(),
        DisjointFamily::from_trees_unchecked(terminals, trees),
    ))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    fn s(labels: &[usize], n: usize) -> VertexSet {
        VertexSet::from_one_based(labels, n).unwrap()
    }

    /// (1,2)=1, (1,3)=2, (2,3)=3, (1,4)=1, (2,4)=2, (3,4)=3
    pub(crate) fn k4_example() -> CompleteGraphColoring {
        CompleteGraphColoring::new(4, 3, vec![1, 2, 1, 3, 2, 3]).unwrap()
    }

    #[test]
    fn vertex_set_validation() {
        assert!(VertexSet::from_one_based(&[1, 1, 2], 4).is_err());
        assert!(VertexSet::from_one_based(&[1, 5], 4).is_err());
        assert!(VertexSet::from_one_based(&[2], 4).is_err());
        assert_eq!(s(&[3, 1, 2], 4).members(), &[0, 1, 2]);
        assert_eq!(s(&[3, 1, 2], 4).to_string(), "{1,2,3}");
    }

    #[test]
    fn star_edges() {
        let t = star_tree(&s(&[1, 2, 3], 5), 3).unwrap();
        assert_eq!(t.dump_line(), "T: (1,4) (2,4) (3,4)");
        let t = star_tree(&s(&[1, 2], 6), 4).unwrap();
        assert_eq!(t.dump_line(), "T: (1,5) (2,5)");
        assert!(star_tree(&s(&[1, 2, 3], 5), 1).is_err());
    }

    #[test]
    fn rainbow_predicate() {
        let terms = s(&[1, 2], 4);
        let single = STree::new(&terms, [(0, 1)]).unwrap();
        let mono = CompleteGraphColoring::monochromatic(4, 3, 1).unwrap();
        assert!(single.is_rainbow(&mono));

        // star colors 1,2,2
        let c = CompleteGraphColoring::new(4, 3, vec![1, 1, 1, 1, 2, 2]).unwrap();
        let star = star_tree(&s(&[1, 2, 3], 4), 3).unwrap();
        assert!(!star.is_rainbow(&c));
        assert!(star.is_rainbow(&k4_example()));
    }

    #[test]
    fn stree_shape_checks() {
        let terms = s(&[1, 2, 3], 5);
        assert!(STree::new(&terms, [(0, 1)]).is_err()); // vertex 3 missing
        assert!(STree::new(&terms, [(0, 1), (1, 2), (0, 2)]).is_err()); // cycle
        assert!(STree::new(&terms, [(0, 1), (1, 2), (2, 4)]).is_err()); // outside leaf
        assert!(STree::new(&terms, [(0, 1), (1, 1)]).is_err());
        assert!(STree::new(&terms, [(0, 1), (1, 3), (3, 2)]).is_ok());
    }

    #[test]
    fn classification() {
        let c = k4_example();
        let terms = s(&[1, 2, 3], 4);
        let path = STree::new(&terms, [(0, 1), (0, 2)]).unwrap();
        assert_eq!(classify_stree(&path, &c).unwrap(), (TreeClass::Internal, 2));
        let star = star_tree(&terms, 3).unwrap();
        assert_eq!(classify_stree(&star, &c).unwrap(), (TreeClass::External, 3));
        let mixed = STree::new(&terms, [(0, 1), (1, 3), (2, 3)]).unwrap();
        assert_eq!(
            classify_stree(&mixed, &c).unwrap(),
            (TreeClass::External, 3)
        );
        let mono = CompleteGraphColoring::monochromatic(4, 3, 2).unwrap();
        assert!(classify_stree(&path, &mono).is_err());
    }

    #[test]
    fn internal_packing_small_cases() {
        let terms = s(&[1, 2, 3], 3);
        let rainbow = CompleteGraphColoring::new(3, 3, vec![1, 2, 3]).unwrap();
        let fam = internal_tree_packing(&terms, &rainbow);
        assert_eq!(fam.len(), 1);
        assert_eq!(fam.trees()[0].dump_line(), "T: (1,2) (1,3)");
        let mono = CompleteGraphColoring::monochromatic(3, 3, 1).unwrap();
        assert_eq!(internal_tree_packing(&terms, &mono).len(), 0);
    }

    #[test]
    fn k4_full_mode_example() {
        let c = k4_example();
        let terms = s(&[1, 2, 3], 4);
        let (count, fam) =
            max_disjoint_rainbow_trees(&terms, &c, OracleMode::Full { budget: 1 }).unwrap();
        assert_eq!(count, 2);
        assert_eq!(fam.dump(), "T: (1,2) (1,3)\nT: (1,4) (2,4) (3,4)\n");
        DisjointFamily::new(&terms, fam.trees().to_vec(), &c).unwrap();

        let mixed = STree::new(&terms, [(0, 1), (1, 3), (2, 3)]).unwrap();
        assert!(mixed.is_rainbow(&c));
        let star = star_tree(&terms, 3).unwrap();
        assert!(!internally_disjoint(&mixed, &star));
        assert_eq!(rainbow_star_count(&terms, &c), 1);
    }

    #[test]
    fn monochromatic_has_no_trees() {
        let c = CompleteGraphColoring::monochromatic(6, 3, 1).unwrap();
        for mode in [OracleMode::Paper, OracleMode::Full { budget: 2 }] {
            let (count, fam) = max_disjoint_rainbow_trees(&s(&[1, 2, 3], 6), &c, mode).unwrap();
            assert_eq!(count, 0);
            assert!(fam.is_empty());
        }
    }

    #[test]
    fn family_validation_is_order_independent() {
        let c = k4_example();
        let terms = s(&[1, 2, 3], 4);
        let path = STree::new(&terms, [(0, 1), (0, 2)]).unwrap();
        let star = star_tree(&terms, 3).unwrap();
        let mixed = STree::new(&terms, [(0, 1), (1, 3), (2, 3)]).unwrap();
        assert!(DisjointFamily::new(&terms, vec![path.clone(), star.clone()], &c).is_ok());
        assert!(DisjointFamily::new(&terms, vec![star.clone(), path.clone()], &c).is_ok());
        assert!(DisjointFamily::new(&terms, vec![mixed.clone(), star.clone()], &c).is_err());
        assert!(DisjointFamily::new(&terms, vec![star, mixed], &c).is_err());
    }

    #[test]
    fn oracle_mode_parsing() {
        assert_eq!("paper".parse::<OracleMode>().unwrap(), OracleMode::Paper);
        assert_eq!(
            "full:3".parse::<OracleMode>().unwrap(),
            OracleMode::Full { budget: 3 }
        );
        assert!("full:0".parse::<OracleMode>().is_err());
        assert!("fast".parse::<OracleMode>().is_err());
        assert!("full".parse::<OracleMode>().is_err());
    }
}
