use crate::logic::GroundSentence;
use crate::numeric::CompensatedSum;

use super::{ModelSet, WorldSpace, WorldsError};

/// Blocks `ψ_S = ⋀_{i∈S} φ_i ∧ ⋀_{j∉S} ¬φ_j` for sentences `φ_1..φ_n`.
///
/// Subset `S` is a bitmask with bit `i` for sentence `i` (0-based). Each world
/// belongs to exactly one block, its *signature*; a block is satisfiable iff
/// some world carries its signature.
#[derive(Clone, Debug)]
pub struct Partition {
    n: usize,
    signature: Vec<u32>,
    blocks: Vec<u32>,
    sentence_models: Vec<ModelSet>,
}

impl Partition {
    pub(super) fn new(
        space: &WorldSpace,
        sentences: &[GroundSentence],
    ) -> Result<Self, WorldsError> {
        if sentences.len() > 20 {
            return Err(WorldsError::TooManySentences(sentences.len()));
        }
        let mut signature = vec![0u32; space.world_count()];
        let mut sentence_models = Vec::with_capacity(sentences.len());
        for (i, g) in sentences.iter().enumerate() {
            let m = space.models(g)?;
            for w in m.iter() {
                signature[w] |= 1 << i;
            }
            sentence_models.push(m);
        }
        let mut seen = vec![false; 1usize << sentences.len()];
        for &s in &signature {
            seen[s as usize] = true;
        }
        let blocks = (0..seen.len() as u32)
            .filter(|&s| seen[s as usize])
            .collect();
        Ok(Partition {
            n: sentences.len(),
            signature,
            blocks,
            sentence_models,
        })
    }

    pub fn num_sentences(&self) -> usize {
        self.n
    }

    pub fn world_count(&self) -> usize {
        self.signature.len()
    }

    /// Satisfiable subsets in ascending mask order.
    pub fn blocks(&self) -> &[u32] {
        &self.blocks
    }

    pub fn signature(&self, world: usize) -> u32 {
        self.signature[world]
    }

    pub fn signatures(&self) -> &[u32] {
        &self.signature
    }

    pub fn is_satisfiable(&self, subset: u32) -> bool {
        self.blocks.binary_search(&subset).is_ok()
    }

    pub fn block_index(&self, subset: u32) -> Option<usize> {
        self.blocks.binary_search(&subset).ok()
    }

    pub fn sentence_models(&self, i: usize) -> &ModelSet {
        &self.sentence_models[i]
    }

    pub fn block_models(&self, subset: u32) -> ModelSet {
        ModelSet::from_indices(
            self.signature.len(),
            self.signature
                .iter()
                .enumerate()
                .filter(|(_, &s)| s == subset)
                .map(|(w, _)| w),
        )
    }

    /// Satisfiable subsets of the first `level` sentences.
    pub fn level_blocks(&self, level: usize) -> Vec<u32> {
        assert!(level <= self.n);
        let mask = low_mask(level);
        let mut out: Vec<u32> = self.blocks.iter().map(|s| s & mask).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Total weight of each satisfiable block (aligned with [`blocks`]).
    ///
    /// [`blocks`]: Partition::blocks
    pub fn block_masses(&self, weights: &[f64]) -> Vec<f64> {
        assert_eq!(weights.len(), self.signature.len());
        let mut acc = vec![CompensatedSum::new(); self.blocks.len()];
        let mut index = vec![usize::MAX; 1usize << self.n];
        for (k, &s) in self.blocks.iter().enumerate() {
            index[s as usize] = k;
        }
        for (w, &s) in self.signature.iter().enumerate() {
            acc[index[s as usize]].add(weights[w]);
        }
        acc.iter().map(|a| a.value()).collect()
    }

    /// The sentence `ψ_S` over the first `level` sentences.
    pub fn psi(sentences: &[GroundSentence], level: usize, subset: u32) -> GroundSentence {
        GroundSentence::conjunction(sentences[..level].iter().enumerate().map(|(i, g)| {
            if subset >> i & 1 == 1 {
                g.clone()
            } else {
                g.clone().not()
            }
        }))
    }
}

pub(crate) fn low_mask(level: usize) -> u32 {
    if level >= 32 {
        !0
    } else {
        (1u32 << level) - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_program;
    use crate::sat::SatOracle;
    use std::sync::Arc;

    fn space(src: &str) -> Arc<WorldSpace> {
        WorldSpace::new(parse_program(src).unwrap().vocabulary).unwrap()
    }

    #[test]
    fn valid_single_sentence() {
        let w = space("prop p");
        let part = w.partition(&[GroundSentence::True]).unwrap();
        assert_eq!(part.blocks(), &[1]);
        assert_eq!(part.block_models(1).count(), 2);
        assert!(part.block_models(0).is_empty());
    }

    #[test]
    fn complement_pair() {
        let w = space("prop p\nprop q");
        let p = GroundSentence::Atom(0);
        let part = w.partition(&[p.clone(), p.not()]).unwrap();
        assert_eq!(part.blocks(), &[0b01, 0b10]);
        assert_eq!(part.block_models(0b01).count(), 2);
        assert_eq!(part.block_models(0b10).count(), 2);
        assert!(!part.is_satisfiable(0b00));
        assert!(!part.is_satisfiable(0b11));
    }

    #[test]
    fn independent_ravens() {
        let p = parse_program("domain R = {1,2,3}\npred B : R").unwrap();
        let w = WorldSpace::new(p.vocabulary).unwrap();
        let gs: Vec<_> = (0..3).map(GroundSentence::Atom).collect();
        let part = w.partition(&gs).unwrap();
        assert_eq!(part.blocks().len(), 8);
        for &s in part.blocks() {
            assert_eq!(part.block_models(s).count(), 1);
        }
    }

    #[test]
    fn blocks_agree_with_sat_and_cover() {
        let w = space("prop a\nprop b\nprop c");
        let a = GroundSentence::Atom;
        let gs = vec![a(0).and(a(1)), a(0), a(1).or(a(2)), a(2).implies(a(0))];
        let part = w.partition(&gs).unwrap();
        let oracle = SatOracle::default();
        let mut union = ModelSet::empty(8);
        for s in 0..16u32 {
            let psi = Partition::psi(&gs, gs.len(), s);
            assert_eq!(oracle.is_satisfiable(&psi).unwrap(), part.is_satisfiable(s));
            let m = part.block_models(s);
            assert_eq!(m, w.models(&psi).unwrap());
            assert!(union.intersect(&m).is_empty());
            union = union.union(&m);
        }
        assert_eq!(union.count(), 8);
        // each sentence is the union of its blocks
        for i in 0..gs.len() {
            let mut u = ModelSet::empty(8);
            for &s in part.blocks().iter().filter(|&&s| s >> i & 1 == 1) {
                u = u.union(&part.block_models(s));
            }
            assert_eq!(&u, part.sentence_models(i));
        }
    }
}
