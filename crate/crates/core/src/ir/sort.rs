use std::fmt;

use serde::{Serialize, Serializer};

use super::IrError;

/// Largest supported bit-vector width.
pub const MAX_WIDTH: u8 = 64;

/// Value domain of a variable or expression.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sort {
    Bool,
    /// Unsigned bit-vector, 1..=64 bits wide.
    BitVec(u8),
}

impl Sort {
    pub fn bitvec(width: u32) -> Result<Self, IrError> {
        if width == 0 || width > MAX_WIDTH as u32 {
            return Err(IrError::BadWidth(width));
        }
        Ok(Sort::BitVec(width as u8))
    }

    /// Number of bits needed to store a value of this sort.
    pub fn bits(self) -> u32 {
        match self {
            Sort::Bool => 1,
            Sort::BitVec(w) => w as u32,
        }
    }

    /// Largest value of the sort, as raw bits.
    pub fn max_raw(self) -> u64 {
        match self {
            Sort::Bool => 1,
            Sort::BitVec(w) => mask(w),
        }
    }

    pub fn value_from_raw(self, raw: u64) -> Value {
        match self {
            Sort::Bool => Value::Bool(raw != 0),
            Sort::BitVec(w) => Value::Bv {
                width: w,
                bits: raw & mask(w),
            },
        }
    }

    pub fn is_bool(self) -> bool {
        matches!(self, Sort::Bool)
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Bool => f.write_str("bool"),
            Sort::BitVec(w) => write!(f, "(bv {w})"),
        }
    }
}

/// All-ones mask for a width in 1..=64.
pub fn mask(width: u8) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

/// Concrete value of a boolean or bit-vector sort.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Bool(bool),
    Bv { width: u8, bits: u64 },
}

impl Value {
    pub fn bv(width: u8, bits: u64) -> Self {
        Value::Bv {
            width,
            bits: bits & mask(width),
        }
    }

    pub fn sort(self) -> Sort {
        match self {
            Value::Bool(_) => Sort::Bool,
            Value::Bv { width, .. } => Sort::BitVec(width),
        }
    }

    /// Raw bits; booleans map to 0/1.
    pub fn raw(self) -> u64 {
        match self {
            Value::Bool(b) => b as u64,
            Value::Bv { bits, .. } => bits,
        }
    }

    pub fn as_bool(self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(b),
            Value::Bv { .. } => None,
        }
    }

    pub fn fits(self, sort: Sort) -> bool {
        match (self, sort) {
            (Value::Bool(_), Sort::Bool) => true,
            (Value::Bv { width, bits }, Sort::BitVec(w)) => width == w && bits <= mask(w),
            _ => false,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Bv { bits, .. } => write!(f, "{bits}"),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Bool(b) => serializer.serialize_bool(*b),
            Value::Bv { bits, .. } => serializer.serialize_u64(*bits),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn width_bounds() {
        assert!(Sort::bitvec(0).is_err());
        assert!(Sort::bitvec(65).is_err());
        assert_eq!(Sort::bitvec(64).unwrap(), Sort::BitVec(64));
        assert_eq!(mask(64), u64::MAX);
        assert_eq!(mask(3), 7);
    }

    #[test]
    fn value_masks_on_construction() {
        assert_eq!(Value::bv(3, 9), Value::Bv { width: 3, bits: 1 });
        assert!(Value::bv(3, 7).fits(Sort::BitVec(3)));
        assert!(!Value::Bool(true).fits(Sort::BitVec(1)));
    }
}
