//! Edge-colorings of the complete graph `K_n`.
//!
//! Vertices are 0-based in the library API and 1-based in every external
//! format (coloring files, witness dumps, JSON reports). Edges `{i, j}` with
//! `i < j` are laid out lexicographically: `(0,1), (0,2), ..., (0,n-1), (1,2), ...`.
//! That order is shared by the file format and by the canonical form used
//! for symmetry breaking.

mod enumerate;
mod io;

pub use enumerate::{canonicalize, ColoringSpace, SpaceIter, DEFAULT_ENUM_BUDGET};
pub use io::{parse_coloring, read_coloring, write_coloring};

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, Error, Result};

/// Colors are stored as `u8`, so palettes are limited to 255 colors.
pub const MAX_PALETTE: usize = u8::MAX as usize;

/// Index of edge `{u, v}` (0-based, `u != v`) in the lexicographic layout.
#[inline]
pub fn edge_index(n: usize, u: usize, v: usize) -> usize {
    debug_assert!(u != v && u < n && v < n);
    let (i, j) = if u < v { (u, v) } else { (v, u) };
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

#[inline]
pub fn edge_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// An edge-coloring `c : E(K_n) -> {1, ..., t}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CompleteGraphColoring {
    n: usize,
    t: usize,
    colors: Vec<u8>,
}

impl CompleteGraphColoring {
    /// Builds a coloring from colors in lexicographic edge order.
    pub fn new(n: usize, t: usize, colors: Vec<u8>) -> Result<Self> {
        check_dims(n, t)?;
        if colors.len() != edge_count(n) {
            return Err(Error::Invariant(format!(
                "expected {} edge colors for n={}, found {}",
                edge_count(n),
                n,
                colors.len()
            )));
        }
        if let Some((e, &c)) = colors
            .iter()
            .enumerate()
            .find(|(_, &c)| c == 0 || c as usize > t)
        {
            return Err(Error::Invariant(format!(
                "edge #{} has color {} outside palette 1..={}",
                e + 1,
                c,
                t
            )));
        }
        Ok(Self { n, t, colors })
    }

    /// Every edge gets `color`.
    pub fn monochromatic(n: usize, t: usize, color: u8) -> Result<Self> {
        check_dims(n, t)?;
        Self::new(n, t, vec![color; edge_count(n)])
    }

    pub fn from_fn(n: usize, t: usize, mut f: impl FnMut(usize, usize) -> u8) -> Result<Self> {
        check_dims(n, t)?;
        let mut colors = Vec::with_capacity(edge_count(n));
        for i in 0..n {
            for j in i + 1..n {
                colors.push(f(i, j));
            }
        }
        Self::new(n, t, colors)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Palette size `t`.
    #[inline]
    pub fn palette(&self) -> usize {
        self.t
    }

    #[inline]
    pub fn color(&self, u: usize, v: usize) -> u8 {
        self.colors[edge_index(self.n, u, v)]
    }

    /// Colors in lexicographic edge order.
    #[inline]
    pub fn colors(&self) -> &[u8] {
        &self.colors
    }

    /// Edges `(i, j)`, `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n;
        (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
    }

    pub(crate) fn set_color_at(&mut self, edge: usize, c: u8) {
        debug_assert!(c >= 1 && c as usize <= self.t);
        self.colors[edge] = c;
    }

    /// Number of distinct colors actually used.
    pub fn colors_used(&self) -> usize {
        let mut seen = [false; 256];
        for &c in &self.colors {
            seen[c as usize] = true;
        }
        seen.iter().filter(|&&s| s).count()
    }
}

impl fmt::Debug for CompleteGraphColoring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "K{}[t={}; ", self.n, self.t)?;
        for c in &self.colors {
            write!(f, "{}", c)?;
        }
        write!(f, "]")
    }
}

fn check_dims(n: usize, t: usize) -> Result<()> {
    if n < 2 {
        return domain(format!("vertex count must be at least 2, got {}", n));
    }
    if t < 1 {
        return domain("palette size must be at least 1");
    }
    if t > MAX_PALETTE {
        return domain(format!("palette size {} exceeds {}", t, MAX_PALETTE));
    }
    Ok(())
}

/// Name of the generator behind [`SeededStream`]. Changing the generator
/// changes every seeded result, so it is versioned.
pub const RNG_NAME: &str = "chacha8/seed_from_u64/v1";

/// A reproducible random stream: ChaCha8 keyed by `master_seed`, with
/// `stream_index` selecting the ChaCha stream. ChaCha is counter based, so
/// distinct stream indices never overlap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct SeededStream {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl SeededStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        Self {
            master_seed,
            stream_index,
        }
    }

    /// The substream `index` under the same master seed.
    pub fn substream(&self, index: u64) -> Self {
        Self::new(self.master_seed, index)
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index);
        rng
    }
}

/// Colors every edge of `K_n` independently and uniformly from `1..=t`.
pub fn random_coloring(n: usize, t: usize, stream: &SeededStream) -> Result<CompleteGraphColoring> {
    check_dims(n, t)?;
    let mut rng = stream.rng();
    Ok(random_coloring_with(n, t, &mut rng))
}

pub(crate) fn random_coloring_with<R: Rng>(
    n: usize,
    t: usize,
    rng: &mut R,
) -> CompleteGraphColoring {
    let colors = (0..edge_count(n))
        .map(|_| rng.gen_range(1..=t as u8))
        .collect();
    CompleteGraphColoring { n, t, colors }
}

/// `d(v, i)`: number of edges of color `i` at vertex `v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorDegreeTable {
    n: usize,
    t: usize,
    d: Vec<u32>,
}

impl ColorDegreeTable {
    /// Degree of `v` in color `color` (1-based color).
    #[inline]
    pub fn get(&self, v: usize, color: u8) -> u32 {
        self.d[v * self.t + (color as usize - 1)]
    }

    pub fn row(&self, v: usize) -> &[u32] {
        &self.d[v * self.t..(v + 1) * self.t]
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn palette(&self) -> usize {
        self.t
    }

    /// `prod_i d(v, i)` for one vertex, as an exact integer.
    pub fn product(&self, v: usize) -> u128 {
        self.row(v).iter().map(|&x| x as u128).product()
    }
}

pub fn color_degrees(coloring: &CompleteGraphColoring) -> ColorDegreeTable {
    let (n, t) = (coloring.n, coloring.t);
    let mut d = vec![0u32; n * t];
    for ((i, j), &c) in coloring.edges().zip(&coloring.colors) {
        let c = c as usize - 1;
        d[i * t + c] += 1;
        d[j * t + c] += 1;
    }
    ColorDegreeTable { n, t, d }
}
