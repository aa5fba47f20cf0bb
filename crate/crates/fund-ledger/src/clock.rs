//! Block-height clock. The engine has exactly one clock per run; everything
//! rate-based (fees, yields, GBM steps) converts through `blocks_per_year`.

/// Monotone block clock with value semantics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct BlockClock {
    height: u64,
    blocks_per_year: u64,
}

impl BlockClock {
    /// Starts at height 0. `blocks_per_year` must be positive.
    pub fn new(blocks_per_year: u64) -> Option<BlockClock> {
        if blocks_per_year == 0 {
            return None;
        }
        Some(BlockClock { height: 0, blocks_per_year })
    }

    #[inline]
    pub fn height(self) -> u64 {
        self.height
    }

    #[inline]
    pub fn blocks_per_year(self) -> u64 {
        self.blocks_per_year
    }

    /// Advance by exactly one block.
    #[must_use]
    pub fn step(self) -> BlockClock {
        BlockClock { height: self.height + 1, ..self }
    }
}
