//! Opaque identifier newtypes. Each namespace gets its own type so that a
//! venue id can never be passed where a strategy id is expected; uniqueness
//! within a namespace is enforced by the registries at registration time.

use core::fmt;

use crate::error::LedgerError;

macro_rules! id_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
        #[derive(serde::Serialize, serde::Deserialize)]
        #[serde(try_from = "String", into = "String")]
        pub struct $name(String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Result<Self, LedgerError> {
                let id = id.into();
                if id.is_empty() {
                    return Err(LedgerError::EmptyId);
                }
                Ok(Self(id))
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}({:?})", stringify!($name), self.0)
            }
        }

        impl TryFrom<String> for $name {
            type Error = LedgerError;
            fn try_from(s: String) -> Result<Self, Self::Error> {
                Self::new(s)
            }
        }

        impl TryFrom<&str> for $name {
            type Error = LedgerError;
            fn try_from(s: &str) -> Result<Self, Self::Error> {
                Self::new(s)
            }
        }

        impl From<$name> for String {
            fn from(id: $name) -> String {
                id.0
            }
        }
    };
}

id_type!(
    /// A tradeable or holdable asset.
    AssetId
);
id_type!(
    /// An execution venue (exchange, staking protocol, ...).
    VenueId
);
id_type!(
    /// A strategy acting as one of the vault's capital managers.
    StrategyId
);
id_type!(
    /// A signal oracle provider.
    CsoId
);
id_type!(
    /// A depositor, validator or fee-recipient account.
    AccountId
);
id_type!(
    /// A vault instance within a scenario.
    VaultId
);

/// Shorthand constructors that panic on empty input; for tests and static
/// configuration.
pub fn asset(s: &str) -> AssetId {
    AssetId::new(s).expect("non-empty asset id")
}

pub fn venue(s: &str) -> VenueId {
    VenueId::new(s).expect("non-empty venue id")
}

pub fn strat(s: &str) -> StrategyId {
    StrategyId::new(s).expect("non-empty strategy id")
}

pub fn cso(s: &str) -> CsoId {
    CsoId::new(s).expect("non-empty cso id")
}

pub fn account(s: &str) -> AccountId {
    AccountId::new(s).expect("non-empty account id")
}
