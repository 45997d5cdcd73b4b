//! Fixed-length bit strings used for tape contents and configuration
//! serialization. Bit 0 is the first serialized bit; multi-bit fields are
//! stored big-endian (most significant bit first).

use std::fmt;

use smallvec::SmallVec;

/// Inline storage covers every serialized configuration at desk scale, so
/// cloning configurations in graph walks stays allocation-free; longer
/// strings (virtual tapes, counters) spill to the heap transparently.
type Store = SmallVec<[bool; 64]>;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bits(Store);

impl Bits {
    pub fn zeros(len: usize) -> Self {
        Bits(SmallVec::from_elem(false, len))
    }

    pub fn from_bools(v: Vec<bool>) -> Self {
        Bits(Store::from_vec(v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, b: bool) {
        self.0[i] = b;
    }

    pub fn flip(&mut self, i: usize) {
        self.0[i] = !self.0[i];
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.0.iter().copied()
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|b| **b).count()
    }

    /// Parse a string of '0'/'1' characters.
    pub fn parse_bin(s: &str) -> Result<Self, String> {
        let mut v = Store::with_capacity(s.len());
        for ch in s.chars() {
            match ch {
                '0' => v.push(false),
                '1' => v.push(true),
                _ => return Err(format!("invalid bit character {ch:?}")),
            }
        }
        Ok(Bits(v))
    }

    /// Parse a hex string into exactly `len` bits. The hex value is read
    /// big-endian and must fit in `len` bits.
    pub fn parse_hex(s: &str, len: usize) -> Result<Self, String> {
        let mut v = Store::with_capacity(s.len() * 4);
        for ch in s.chars() {
            let d = ch
                .to_digit(16)
                .ok_or_else(|| format!("invalid hex character {ch:?}"))? as u8;
            for k in (0..4).rev() {
                v.push(d >> k & 1 == 1);
            }
        }
        while v.len() > len {
            if v[0] {
                return Err(format!("hex value does not fit in {len} bits"));
            }
            v.remove(0);
        }
        while v.len() < len {
            v.insert(0, false);
        }
        Ok(Bits(v))
    }

    pub fn to_hex(&self) -> String {
        let mut padded = vec![false; (4 - self.len() % 4) % 4];
        padded.extend(self.0.iter().copied());
        padded
            .chunks(4)
            .map(|c| {
                let d = c.iter().fold(0u32, |acc, b| acc << 1 | *b as u32);
                char::from_digit(d, 16).unwrap()
            })
            .collect()
    }

    /// Append `width` bits holding `value`, big-endian.
    pub fn push_uint(&mut self, value: u128, width: usize) {
        debug_assert!(width == 128 || value < 1u128 << width);
        for k in (0..width).rev() {
            self.0.push(value >> k & 1 == 1);
        }
    }

    /// Read `width` bits starting at `offset` as a big-endian integer.
    pub fn uint_at(&self, offset: usize, width: usize) -> u128 {
        debug_assert!(width <= 128);
        self.0[offset..offset + width]
            .iter()
            .fold(0u128, |acc, b| acc << 1 | *b as u128)
    }

    pub fn to_u128(&self) -> u128 {
        self.uint_at(0, self.len())
    }

    pub fn from_uint(value: u128, width: usize) -> Self {
        let mut b = Bits(Store::with_capacity(width));
        b.push_uint(value, width);
        b
    }

    /// Treat the whole string as a big-endian counter and add one.
    /// Returns true on carry out (wrap to zero).
    pub fn increment(&mut self) -> bool {
        for i in (0..self.0.len()).rev() {
            if self.0[i] {
                self.0[i] = false;
            } else {
                self.0[i] = true;
                return false;
            }
        }
        true
    }

    pub fn slice(&self, start: usize, end: usize) -> Bits {
        Bits(Store::from_slice(&self.0[start..end]))
    }

    /// Overwrite the bits starting at `offset` with `other`.
    pub fn splice(&mut self, offset: usize, other: &Bits) {
        self.0[offset..offset + other.len()].copy_from_slice(&other.0);
    }

    pub fn concat(&self, other: &Bits) -> Bits {
        let mut v = self.0.clone();
        v.extend(other.0.iter().copied());
        Bits(v)
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{}", *b as u8)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Bits needed to address a domain of `card` values; at least 1 so every
/// serialized field has nonzero width.
pub fn bit_width(card: u128) -> usize {
    if card <= 2 {
        1
    } else {
        128 - (card - 1).leading_zeros() as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hex_round_trip() {
        let b = Bits::parse_bin("10110").unwrap();
        assert_eq!(b.to_hex(), "16");
        assert_eq!(Bits::parse_hex("16", 5).unwrap(), b);
    }

    #[test]
    fn uint_fields() {
        let mut b = Bits::zeros(0);
        b.push_uint(5, 4);
        b.push_uint(1, 2);
        assert_eq!(b.to_string(), "010101");
        assert_eq!(b.uint_at(0, 4), 5);
        assert_eq!(b.uint_at(4, 2), 1);
    }

    #[test]
    fn counter_wraps() {
        let mut b = Bits::from_uint(2, 2);
        assert!(!b.increment());
        assert_eq!(b.to_u128(), 3);
        assert!(b.increment());
        assert_eq!(b.to_u128(), 0);
    }

    #[test]
    fn widths() {
        assert_eq!(bit_width(1), 1);
        assert_eq!(bit_width(2), 1);
        assert_eq!(bit_width(3), 2);
        assert_eq!(bit_width(4), 2);
        assert_eq!(bit_width(5), 3);
        assert_eq!(bit_width(1024), 10);
    }
}
