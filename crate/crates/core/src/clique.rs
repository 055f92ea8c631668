//! Exact maximum clique by branch-and-bound with a greedy-coloring bound, and
//! lexicographic enumeration of all k-cliques.

#[derive(Clone, PartialEq, Eq)]
struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    fn new(n: usize) -> Self {
        BitSet {
            words: vec![0; n.div_ceil(64)],
        }
    }

    fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    fn remove(&mut self, i: usize) {
        self.words[i / 64] &= !(1 << (i % 64));
    }

    fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    fn intersect(&self, other: &BitSet) -> BitSet {
        BitSet {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        }
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            })
        })
    }
}

/// Simple undirected graph on `0..n`.
#[derive(Clone)]
pub struct Graph {
    n: usize,
    adj: Vec<BitSet>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph {
            n,
            adj: vec![BitSet::new(n); n],
        }
    }

    pub fn from_adjacency(adjacency: &[Vec<bool>]) -> Self {
        let mut g = Graph::new(adjacency.len());
        for (i, row) in adjacency.iter().enumerate() {
            for (j, &e) in row.iter().enumerate() {
                if e && i != j {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    pub fn add_edge(&mut self, i: usize, j: usize) {
        self.adj[i].insert(j);
        self.adj[j].insert(i);
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i].contains(j)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].iter().count()
    }

    /// A maximum clique, sorted ascending. Deterministic.
    pub fn maximum_clique(&self) -> Vec<usize> {
        if self.n == 0 {
            return Vec::new();
        }
        // Degree-descending order, ties by index.
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by_key(|&v| (std::cmp::Reverse(self.degree(v)), v));
        let mut best = vec![order[0]];
        let mut current = Vec::new();
        self.expand(&mut current, order, &mut best);
        best.sort_unstable();
        best
    }

    fn expand(&self, current: &mut Vec<usize>, candidates: Vec<usize>, best: &mut Vec<usize>) {
        let (ordered, colors) = self.color_sort(&candidates);
        for idx in (0..ordered.len()).rev() {
            if current.len() + colors[idx] <= best.len() {
                return;
            }
            let v = ordered[idx];
            current.push(v);
            let next: Vec<usize> = ordered[..idx]
                .iter()
                .copied()
                .filter(|&u| self.adj[v].contains(u))
                .collect();
            if next.is_empty() {
                if current.len() > best.len() {
                    *best = current.clone();
                }
            } else {
                self.expand(current, next, best);
            }
            current.pop();
        }
    }

    /// Greedy sequential coloring; returns vertices sorted by color and the
    /// running color number (an upper bound on the clique size among the prefix).
    fn color_sort(&self, candidates: &[usize]) -> (Vec<usize>, Vec<usize>) {
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for &v in candidates {
            match classes
                .iter_mut()
                .find(|c| c.iter().all(|&u| !self.adj[v].contains(u)))
            {
                Some(c) => c.push(v),
                None => classes.push(vec![v]),
            }
        }
        let mut ordered = Vec::with_capacity(candidates.len());
        let mut colors = Vec::with_capacity(candidates.len());
        for (k, class) in classes.into_iter().enumerate() {
            for v in class {
                ordered.push(v);
                colors.push(k + 1);
            }
        }
        (ordered, colors)
    }

    /// All cliques of exactly `k` vertices, each sorted, in lexicographic order.
    pub fn cliques_of_size(&self, k: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        if k == 0 {
            return vec![Vec::new()];
        }
        let mut all = BitSet::new(self.n);
        for v in 0..self.n {
            all.insert(v);
        }
        let mut current = Vec::with_capacity(k);
        self.enumerate(&mut current, all, k, &mut out);
        out
    }

    fn enumerate(&self, current: &mut Vec<usize>, cand: BitSet, k: usize, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        let mut rest = cand;
        let items: Vec<usize> = rest.iter().collect();
        for v in items {
            rest.remove(v);
            let next = rest.intersect(&self.adj[v]);
            if current.len() + 1 < k && next.is_empty() {
                continue;
            }
            current.push(v);
            self.enumerate(current, next, k, out);
            current.pop();
        }
    }

    pub fn is_clique(&self, vertices: &[usize]) -> bool {
        vertices
            .iter()
            .enumerate()
            .all(|(a, &i)| vertices[a + 1..].iter().all(|&j| self.has_edge(i, j)))
    }
}
