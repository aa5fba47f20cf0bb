//! Canonical signal oracle marketplace: registration and nonce-versioned
//! publication of typed oracle states, strategy subscriptions with flat-fee
//! and participation models, auction-based access pricing, rolling signal
//! track records, and Merkle utilities for reward-allocation states.

mod error;
mod market;
pub mod merkle;
mod state;

pub use error::CsoError;
pub use market::{
    clear_auction, AuctionClearing, AuctionOutcome, EpochStats, FeeEvent, FeeEventKind, FeeModel,
    MarketParams, Marketplace, SignalTrackRecord, Subscription, SubscriptionStatus, TrackUpdate,
};
pub use merkle::{
    compute_merkle_root, gen_merkle_proof, leaf_hash, verify_merkle_proof, Hash32, MerkleProof,
    SiblingSide,
};
pub use state::{
    ArbitrageLeg, CsoKind, CsoPayload, CsoState, LpAllocation, Quote, Side, YieldOffer,
};
