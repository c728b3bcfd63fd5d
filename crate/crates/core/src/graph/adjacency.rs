/// Compressed sparse adjacency with sorted, duplicate-free neighbor lists.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Adjacency {
    offsets: Vec<usize>,
    targets: Vec<usize>,
}

impl Adjacency {
    /// Builds the symmetric adjacency of an undirected edge list on `n` nodes.
    /// Self-loops and repeated edges are dropped.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut degree = vec![0usize; n];
        for &(u, v) in edges {
            if u != v {
                degree[u] += 1;
                degree[v] += 1;
            }
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut targets = vec![0usize; offsets[n]];
        for &(u, v) in edges {
            if u != v {
                targets[fill[u]] = v;
                fill[u] += 1;
                targets[fill[v]] = u;
                fill[v] += 1;
            }
        }
        // sort + dedup each row, then compact
        let mut out_offsets = Vec::with_capacity(n + 1);
        out_offsets.push(0);
        let mut out_targets = Vec::with_capacity(targets.len());
        if edges.is_empty() {
            return Adjacency::empty(n);
        }
        for u in 0..n {
            let row = &mut targets[offsets[u]..offsets[u + 1]];
            if row.len() > 1 {
                row.sort_unstable();
            }
            let mut last = None;
            for &x in row.iter() {
                if last != Some(x) {
                    out_targets.push(x);
                    last = Some(x);
                }
            }
            out_offsets.push(out_targets.len());
        }
        Adjacency {
            offsets: out_offsets,
            targets: out_targets,
        }
    }

    pub fn empty(n: usize) -> Self {
        Adjacency {
            offsets: vec![0; n + 1],
            targets: Vec::new(),
        }
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.targets[self.offsets[u]..self.offsets[u + 1]]
    }

    #[inline]
    pub fn degree(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    pub fn max_degree(&self) -> usize {
        (0..self.node_count()).map(|u| self.degree(u)).max().unwrap_or(0)
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    /// Undirected edges `(u, v)` with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.node_count()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    pub fn contains(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }
}
