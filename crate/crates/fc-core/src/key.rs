//! Totally ordered key domain with explicit `-inf`/`+inf` sentinels.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use thiserror::Error;

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum KeyError {
    #[error("key value must be finite, got {0}")]
    NotFinite(f64),
}

/// A finite 64-bit key. NaN and infinities are rejected at construction and
/// `-0.0` is normalized to `+0.0`, so comparison, equality and hashing all
/// agree on one strict total order.
#[derive(Clone, Copy)]
pub struct FiniteKey(f64);

impl FiniteKey {
    pub fn new(value: f64) -> Result<Self, KeyError> {
        if !value.is_finite() {
            return Err(KeyError::NotFinite(value));
        }
        Ok(FiniteKey(if value == 0.0 { 0.0 } else { value }))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl PartialEq for FiniteKey {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

impl Eq for FiniteKey {}

impl PartialOrd for FiniteKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FiniteKey {
    fn cmp(&self, other: &Self) -> Ordering {
        // Total order: no NaN by construction, -0.0 normalized away.
        self.0.total_cmp(&other.0)
    }
}

impl Hash for FiniteKey {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.to_bits().hash(state);
    }
}

impl fmt::Debug for FiniteKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for FiniteKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A catalog key or one of the two sentinels. The derived ordering places
/// `MinusInf` below every finite key and `PlusInf` above.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Key {
    MinusInf,
    Finite(FiniteKey),
    PlusInf,
}

impl Key {
    pub fn finite(value: f64) -> Result<Self, KeyError> {
        FiniteKey::new(value).map(Key::Finite)
    }

    pub fn as_finite(self) -> Option<FiniteKey> {
        match self {
            Key::Finite(k) => Some(k),
            _ => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Key::Finite(_))
    }
}

impl From<FiniteKey> for Key {
    fn from(k: FiniteKey) -> Self {
        Key::Finite(k)
    }
}

impl From<i32> for Key {
    fn from(v: i32) -> Self {
        Key::Finite(FiniteKey(v as f64))
    }
}

impl fmt::Display for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Key::MinusInf => write!(f, "-inf"),
            Key::Finite(k) => write!(f, "{}", k),
            Key::PlusInf => write!(f, "+inf"),
        }
    }
}
