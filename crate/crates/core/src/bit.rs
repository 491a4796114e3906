use std::fmt;
use std::ops::{BitXor, Not};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Result};

/// A classical bit. Serialised as the integer `0` or `1`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bit(bool);

impl Bit {
    pub const ZERO: Bit = Bit(false);
    pub const ONE: Bit = Bit(true);
    pub const BOTH: [Bit; 2] = [Bit::ZERO, Bit::ONE];

    pub fn new(value: u8) -> Result<Self> {
        match value {
            0 => Ok(Bit::ZERO),
            1 => Ok(Bit::ONE),
            other => Err(invalid(format!("bit must be 0 or 1, got {other}"))),
        }
    }

    pub fn from_index(index: usize) -> Self {
        Bit(index & 1 == 1)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn as_u8(self) -> u8 {
        self.0 as u8
    }

    pub fn is_one(self) -> bool {
        self.0
    }
}

impl From<bool> for Bit {
    fn from(value: bool) -> Self {
        Bit(value)
    }
}

impl BitXor for Bit {
    type Output = Bit;

    fn bitxor(self, rhs: Bit) -> Bit {
        Bit(self.0 ^ rhs.0)
    }
}

impl Not for Bit {
    type Output = Bit;

    fn not(self) -> Bit {
        Bit(!self.0)
    }
}

impl fmt::Display for Bit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

impl std::str::FromStr for Bit {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s.trim() {
            "0" => Ok(Bit::ZERO),
            "1" => Ok(Bit::ONE),
            other => Err(crate::error::invalid(format!(
                "expected 0 or 1, got {other:?}"
            ))),
        }
    }
}

impl Serialize for Bit {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_u8(self.as_u8())
    }
}

impl<'de> Deserialize<'de> for Bit {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = u8::deserialize(deserializer)?;
        Bit::new(raw).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xor_table() {
        for a in Bit::BOTH {
            for b in Bit::BOTH {
                assert_eq!((a ^ b).as_u8(), a.as_u8() ^ b.as_u8());
            }
        }
    }

    #[test]
    fn rejects_non_bits() {
        assert!(Bit::new(2).is_err());
        assert!(serde_json::from_str::<Bit>("3").is_err());
        assert_eq!(serde_json::from_str::<Bit>("1").unwrap(), Bit::ONE);
    }
}
