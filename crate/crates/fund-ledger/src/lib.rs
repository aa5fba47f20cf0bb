//! Shared primitives for the fund engine: 18-decimal fixed point, identifier
//! newtypes, the block clock, and counter-based deterministic randomness.
//! Everything downstream builds on these; none of it uses floating point, so
//! runs replay bit-exactly across platforms.

mod clock;
mod dec;
mod error;
mod ids;
mod rng;
pub mod stats;
pub mod wide;

pub use clock::BlockClock;
pub use dec::{dec, Dec18, SCALE};
pub use error::LedgerError;
pub use ids::{account, asset, cso, strat, venue};
pub use ids::{AccountId, AssetId, CsoId, StrategyId, VaultId, VenueId};
pub use rng::DetRng;
