use super::VertexSet;
use crate::colorings::CompleteGraphColoring;

/// Number of `u ∉ S` whose star `T(u)` is rainbow.
pub fn rainbow_star_count(terminals: &VertexSet, coloring: &CompleteGraphColoring) -> usize {
    let s = terminals.members();
    if s.len() > coloring.palette() {
        return 0;
    }
    (0..coloring.n())
        .filter(|&u| !terminals.contains(u))
        .filter(|&u| {
            let mut seen = [false; 256];
            s.iter().all(|&v| {
                let c = coloring.color(u, v) as usize;
                !std::mem::replace(&mut seen[c], true)
            })
        })
        .count()
}

/// Per-color neighborhood bitsets for fast star counting.
///
/// `u` spans a rainbow star over `S = {s_1..s_k}` iff there is an injective
/// color assignment `σ` with `u ∈ N_{σ(i)}(s_i)` for all `i`. Each such `u`
/// matches exactly one `σ`, and no `s_i` lies in its own neighborhood, so
/// the count is a sum of popcounts of intersections.
pub struct StarIndex<'a> {
    coloring: &'a CompleteGraphColoring,
    words: usize,
    // nbr[(v * t + c) * words ..]: vertices joined to v by color c + 1
    nbr: Vec<u64>,
}

impl<'a> StarIndex<'a> {
    pub fn new(coloring: &'a CompleteGraphColoring) -> Self {
        let n = coloring.n();
        let t = coloring.palette();
        let words = n.div_ceil(64);
        let mut nbr = vec![0u64; n * t * words];
        for (u, v) in coloring.edges() {
            let c = coloring.color(u, v) as usize - 1;
            nbr[(u * t + c) * words + v / 64] |= 1 << (v % 64);
            nbr[(v * t + c) * words + u / 64] |= 1 << (u % 64);
        }
        Self {
            coloring,
            words,
            nbr,
        }
    }

    pub fn coloring(&self) -> &'a CompleteGraphColoring {
        self.coloring
    }

    fn row(&self, v: usize, c: usize) -> &[u64] {
        let t = self.coloring.palette();
        let start = (v * t + c) * self.words;
        &self.nbr[start..start + self.words]
    }

    /// Same value as [`rainbow_star_count`].
    pub fn count(&self, terminals: &VertexSet) -> usize {
        let s = terminals.members();
        let t = self.coloring.palette();
        if s.len() > t {
            return 0;
        }
        // falling factorial t!/(t-k)! leaves; fall back when that is worse
        // than scanning every outside vertex
        let leaves = (0..s.len()).fold(1usize, |acc, i| acc.saturating_mul(t - i));
        if leaves.saturating_mul(self.words) > self.coloring.n() * s.len() {
            return rainbow_star_count(terminals, self.coloring);
        }
        let mut acc = vec![u64::MAX; self.words * (s.len() + 1)];
        let mut used = [false; 256];
        self.descend(s, 0, &mut acc, &mut used)
    }

    fn descend(&self, s: &[usize], depth: usize, acc: &mut [u64], used: &mut [bool; 256]) -> usize {
        let w = self.words;
        if depth == s.len() {
            return acc[depth * w..(depth + 1) * w]
                .iter()
                .map(|x| x.count_ones() as usize)
                .sum();
        }
        let mut total = 0;
        for c in 0..self.coloring.palette() {
            if used[c] {
                continue;
            }
            let (prev, next) = acc.split_at_mut((depth + 1) * w);
            let prev = &prev[depth * w..];
            let next = &mut next[..w];
            let mut any = 0u64;
            for ((dst, &a), &b) in next.iter_mut().zip(prev).zip(self.row(s[depth], c)) {
                *dst = a & b;
                any |= *dst;
            }
            if any == 0 {
                continue;
            }
            used[c] = true;
            total += self.descend(s, depth + 1, acc, used);
            used[c] = false;
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colorings::{random_coloring, SeededStream};
    use crate::trees::verify::combinations;

    #[test]
    fn k4_example_single_star() {
        let c = crate::trees::tests::k4_example();
        let s = VertexSet::new([0, 1, 2], 4).unwrap();
        assert_eq!(rainbow_star_count(&s, &c), 1);
        assert_eq!(StarIndex::new(&c).count(&s), 1);
    }

    #[test]
    fn monochromatic_has_no_stars() {
        let c = CompleteGraphColoring::monochromatic(8, 3, 2).unwrap();
        for k in 2..=4 {
            let s = VertexSet::first(k, 8).unwrap();
            assert_eq!(rainbow_star_count(&s, &c), 0);
            assert_eq!(StarIndex::new(&c).count(&s), 0);
        }
    }

    #[test]
    fn no_outside_vertices() {
        let c = random_coloring(3, 3, &SeededStream::new(1, 0)).unwrap();
        let s = VertexSet::first(3, 3).unwrap();
        assert_eq!(rainbow_star_count(&s, &c), 0);
        assert_eq!(StarIndex::new(&c).count(&s), 0);
    }

    #[test]
    fn index_agrees_with_scan() {
        for (n, t, k) in [(10, 3, 3), (70, 3, 3), (130, 4, 4), (20, 5, 3), (9, 2, 2)] {
            for seed in 0..4 {
                let c = random_coloring(n, t, &SeededStream::new(31, seed)).unwrap();
                let idx = StarIndex::new(&c);
                for combo in combinations(n, k).take(300) {
                    let s = VertexSet::new(combo, n).unwrap();
                    assert_eq!(idx.count(&s), rainbow_star_count(&s, &c));
                }
            }
        }
    }

    #[test]
    fn mean_star_count_matches_binomial_mean() {
        // X ~ Bin(n - k, k!/k^k); mean 20 * 2/9, sd sqrt(20 * 2/9 * 7/9)
        let (n, k) = (23, 3);
        let samples = 4000;
        let s = VertexSet::first(k, n).unwrap();
        let counts: Vec<f64> = (0..samples)
            .map(|i| {
                let c = random_coloring(n, k, &SeededStream::new(8, i)).unwrap();
                rainbow_star_count(&s, &c) as f64
            })
            .collect();
        let mean = counts.iter().sum::<f64>() / samples as f64;
        let p = 2.0 / 9.0;
        let expected = 20.0 * p;
        let se = (20.0 * p * (1.0 - p) / samples as f64).sqrt();
        assert!(
            (mean - expected).abs() < 3.0 * se,
            "mean {} expected {}",
            mean,
            expected
        );
    }
}
