//! Stallings folding: deciding whether words generate the whole free group.

use std::collections::BTreeMap;

use super::group::Word;

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = (ra.min(rb), ra.max(rb));
        self.0[hi] = lo;
        true
    }
}

/// Folded graph of a wedge of the given words, as `(vertex count, edges)`
/// with edges `(from, generator, to)`. The base point is vertex 0.
pub fn fold(words: &[Word]) -> (usize, Vec<(usize, usize, usize)>) {
    let mut n = 1;
    let mut edges = Vec::new();
    for w in words {
        let w = w.reduced();
        if w.is_empty() {
            continue;
        }
        let mut cur = 0;
        for (i, l) in w.0.iter().enumerate() {
            let next = if i + 1 == w.len() {
                0
            } else {
                n += 1;
                n - 1
            };
            if l.inverse {
                edges.push((next, l.generator, cur));
            } else {
                edges.push((cur, l.generator, next));
            }
            cur = next;
        }
    }
    let mut uf = UnionFind((0..n).collect());
    loop {
        let mut seen: BTreeMap<(usize, usize, bool), usize> = BTreeMap::new();
        let mut merged = false;
        for &(a, g, b) in &edges {
            let (ra, rb) = (uf.find(a), uf.find(b));
            for (key, target) in [((ra, g, true), rb), ((rb, g, false), ra)] {
                match seen.get(&key) {
                    Some(&t) if uf.find(t) != uf.find(target) => {
                        merged |= uf.union(t, target);
                    }
                    Some(_) => {}
                    None => {
                        seen.insert(key, target);
                    }
                }
            }
        }
        if !merged {
            break;
        }
    }
    let mut reps: BTreeMap<usize, usize> = BTreeMap::new();
    for v in 0..n {
        let r = uf.find(v);
        let next = reps.len();
        reps.entry(r).or_insert(next);
    }
    let mut out: Vec<(usize, usize, usize)> =
        edges.iter().map(|&(a, g, b)| (reps[&uf.find(a)], g, reps[&uf.find(b)])).collect();
    out.sort_unstable();
    out.dedup();
    (reps.len(), out)
}

/// Whether `words` generate the free group on `rank` generators.
pub fn generates_free_group(words: &[Word], rank: usize) -> bool {
    let (n, edges) = fold(words);
    n == 1 && edges.len() == rank && edges.iter().enumerate().all(|(i, &(a, g, b))| a == 0 && b == 0 && g == i)
}
