/// A set of worlds, as a bitset over world indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModelSet {
    len: usize,
    words: Vec<u64>,
}

impl ModelSet {
    pub fn empty(len: usize) -> Self {
        ModelSet {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn full(len: usize) -> Self {
        let mut s = ModelSet {
            len,
            words: vec![!0; len.div_ceil(64)],
        };
        s.trim();
        s
    }

    /// Worlds in which atom `atom` is true, out of `len = 2^k` worlds.
    pub fn atom(atom: usize, len: usize) -> Self {
        let mut s = Self::empty(len);
        if atom < 6 {
            let mut pattern = 0u64;
            for b in 0..64 {
                if (b >> atom) & 1 == 1 {
                    pattern |= 1 << b;
                }
            }
            s.words.iter_mut().for_each(|w| *w = pattern);
        } else {
            let shift = atom - 6;
            for (i, w) in s.words.iter_mut().enumerate() {
                if (i >> shift) & 1 == 1 {
                    *w = !0;
                }
            }
        }
        s.trim();
        s
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(len: usize, indices: I) -> Self {
        let mut s = Self::empty(len);
        for i in indices {
            s.insert(i);
        }
        s
    }

    fn trim(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn universe_len(&self) -> usize {
        self.len
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < self.len);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.len && (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn complement(&self) -> Self {
        let mut s = ModelSet {
            len: self.len,
            words: self.words.iter().map(|w| !w).collect(),
        };
        s.trim();
        s
    }

    pub fn intersect(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a & b)
    }

    pub fn union(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a | b)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    fn zip(&self, other: &Self, f: impl Fn(u64, u64) -> u64) -> Self {
        assert_eq!(
            self.len, other.len,
            "model sets over different world spaces"
        );
        ModelSet {
            len: self.len,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// World indices in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }
}
