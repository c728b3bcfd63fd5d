/// One bit per ring edge; bit `i` stands for the edge `{i, i+1 mod n}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingMask {
    n: usize,
    words: Vec<u64>,
}

impl RingMask {
    pub fn new(n: usize, value: bool) -> Self {
        let fill = if value { u64::MAX } else { 0 };
        let mut mask = RingMask {
            n,
            words: vec![fill; n.div_ceil(64)],
        };
        mask.clear_tail();
        mask
    }

    fn clear_tail(&mut self) {
        let rem = self.n % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    /// Mask whose bit `i` is `keep(i)`, filled in index order.
    pub fn from_fn(n: usize, mut keep: impl FnMut(usize) -> bool) -> Self {
        let mut words = vec![0u64; n.div_ceil(64)];
        for (w, word) in words.iter_mut().enumerate() {
            let base = 64 * w;
            for b in 0..64.min(n - base) {
                *word |= (keep(base + b) as u64) << b;
            }
        }
        RingMask { n, words }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        let bit = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= bit;
        } else {
            self.words[i / 64] &= !bit;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Indices of retained edges.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&i| self.get(i))
    }
}

/// Distance between `i` and `j` on the unpercolated `n`-cycle.
#[inline]
pub fn ring_distance(n: usize, i: usize, j: usize) -> usize {
    let d = i.abs_diff(j);
    d.min(n - d)
}

#[inline]
pub(crate) fn ring_next(n: usize, i: usize) -> usize {
    if i + 1 == n {
        0
    } else {
        i + 1
    }
}

#[inline]
pub(crate) fn ring_prev(n: usize, i: usize) -> usize {
    if i == 0 {
        n - 1
    } else {
        i - 1
    }
}

/// Index of the ring edge joining two ring-adjacent nodes.
#[inline]
pub(crate) fn ring_edge_index(n: usize, u: usize, v: usize) -> Option<usize> {
    if ring_next(n, u) == v {
        Some(u)
    } else if ring_next(n, v) == u {
        Some(v)
    } else {
        None
    }
}
