//! Power-of-two freelist allocator.
//!
//! Blocks are opaque ids with a recorded capacity of `2^k` words; no raw
//! buffer is ever handed out. The size-class exponent is validated against
//! `[0, kmax]` before any shift is evaluated, and freed blocks recycle
//! LIFO within their own size class.

use std::collections::HashMap;

pub const DEFAULT_KMAX: u32 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockId(u64);

impl BlockId {
    pub fn raw(&self) -> u64 {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AllocError {
    /// The requested size-class exponent is outside `[0, kmax]`. The
    /// allocator refuses before computing any capacity.
    #[error("size-class exponent {k} outside [0, {kmax}]")]
    InvalidShiftExponent { k: i64, kmax: u32 },
    #[error("block {0:?} freed twice")]
    DoubleFree(BlockId),
    #[error("block {0:?} was never allocated")]
    UnknownBlock(BlockId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockInfo {
    pub k: u32,
    pub capacity_words: u64,
}

/// Allocator state: per-class recycle stacks plus the live ledger.
#[derive(Debug)]
pub struct FreelistState {
    kmax: u32,
    freelists: Vec<Vec<BlockId>>,
    live: HashMap<BlockId, BlockInfo>,
    /// k recorded at mint time; consulted when a recycled id resurfaces.
    minted: HashMap<BlockId, u32>,
    next_id: u64,
}

impl Default for FreelistState {
    fn default() -> Self {
        Self::new(DEFAULT_KMAX)
    }
}

impl FreelistState {
    pub fn new(kmax: u32) -> Self {
        Self {
            kmax,
            freelists: vec![Vec::new(); kmax as usize + 1],
            live: HashMap::new(),
            minted: HashMap::new(),
            next_id: 0,
        }
    }

    pub fn kmax(&self) -> u32 {
        self.kmax
    }

    /// Allocates a block of capacity `2^k` words. Recycles the most
    /// recently freed block of the same class when one exists.
    pub fn balloc(&mut self, k: i64) -> Result<BlockId, AllocError> {
        if k < 0 || k > self.kmax as i64 {
            return Err(AllocError::InvalidShiftExponent { k, kmax: self.kmax });
        }
        // Only reachable with a validated exponent.
        let k = k as u32;
        let capacity_words = 1u64 << k;
        let id = match self.freelists[k as usize].pop() {
            Some(recycled) => recycled,
            None => {
                let id = BlockId(self.next_id);
                self.next_id += 1;
                self.minted.insert(id, k);
                id
            }
        };
        self.live.insert(id, BlockInfo { k, capacity_words });
        Ok(id)
    }

    /// Returns a live block to its size-class freelist.
    pub fn bfree(&mut self, block: BlockId) -> Result<(), AllocError> {
        match self.live.remove(&block) {
            Some(info) => {
                self.freelists[info.k as usize].push(block);
                Ok(())
            }
            None => {
                if self.minted.contains_key(&block) {
                    Err(AllocError::DoubleFree(block))
                } else {
                    Err(AllocError::UnknownBlock(block))
                }
            }
        }
    }

    pub fn block_info(&self, block: BlockId) -> Option<BlockInfo> {
        self.live.get(&block).copied()
    }

    pub fn live_count(&self) -> usize {
        self.live.len()
    }

    pub fn recycled_count(&self) -> usize {
        self.freelists.iter().map(|f| f.len()).sum()
    }

    pub fn minted_count(&self) -> usize {
        self.minted.len()
    }

    /// Smallest exponent whose block holds at least `words` words.
    pub fn class_for_words(words: u64) -> u32 {
        if words <= 1 {
            0
        } else {
            64 - (words - 1).leading_zeros()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn guard_rejects_out_of_range_exponents() {
        let mut state = FreelistState::new(32);
        for k in [-3i64, -1, 33, 64, (1 << 31) - 1] {
            let err = state.balloc(k).unwrap_err();
            assert_eq!(err, AllocError::InvalidShiftExponent { k, kmax: 32 });
        }
        // Refused requests leave no trace.
        assert_eq!(state.live_count(), 0);
        assert_eq!(state.minted_count(), 0);
    }

    #[test]
    fn zero_class_is_one_word() {
        let mut state = FreelistState::default();
        let id = state.balloc(0).unwrap();
        assert_eq!(state.block_info(id).unwrap().capacity_words, 1);
        let id32 = state.balloc(32).unwrap();
        assert_eq!(state.block_info(id32).unwrap().capacity_words, 1 << 32);
    }

    #[test]
    fn lifo_reuse_within_class() {
        let mut state = FreelistState::default();
        let b1 = state.balloc(5).unwrap();
        let b2 = state.balloc(5).unwrap();
        state.bfree(b1).unwrap();
        state.bfree(b2).unwrap();
        assert_eq!(state.balloc(5).unwrap(), b2);
        assert_eq!(state.balloc(5).unwrap(), b1);
    }

    #[test]
    fn free_errors() {
        let mut state = FreelistState::default();
        let b = state.balloc(3).unwrap();
        state.bfree(b).unwrap();
        assert_eq!(state.bfree(b).unwrap_err(), AllocError::DoubleFree(b));
        let ghost = BlockId(999);
        assert_eq!(state.bfree(ghost).unwrap_err(), AllocError::UnknownBlock(ghost));
    }

    #[test]
    fn class_for_words_is_minimal() {
        assert_eq!(FreelistState::class_for_words(0), 0);
        assert_eq!(FreelistState::class_for_words(1), 0);
        assert_eq!(FreelistState::class_for_words(2), 1);
        assert_eq!(FreelistState::class_for_words(3), 2);
        assert_eq!(FreelistState::class_for_words(4), 2);
        assert_eq!(FreelistState::class_for_words(5), 3);
        assert_eq!(FreelistState::class_for_words(1 << 20), 20);
        assert_eq!(FreelistState::class_for_words((1 << 20) + 1), 21);
    }
}
