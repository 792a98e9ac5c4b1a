// SPDX-License-Identifier: Apache-2.0

//! Points of `B^n` and the integer time axis.
//!
//! Coordinates are numbered from 1, as in the usual `mu_1 .. mu_n` notation.
//! Coordinate `i` is stored in bit `i - 1` of a `u64`, and the text form writes
//! coordinate 1 leftmost: the vector with `mu_1 = 1, mu_2 = 0` prints as `10`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_WIDTH: usize = 64;

/// A time coordinate. Exact, signed, dimensionless.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Tick(pub i64);

impl Tick {
    pub const fn new(t: i64) -> Self {
        Tick(t)
    }

    pub const fn get(self) -> i64 {
        self.0
    }
}

impl From<i64> for Tick {
    fn from(t: i64) -> Self {
        Tick(t)
    }
}

impl std::ops::Add<i64> for Tick {
    type Output = Tick;
    fn add(self, rhs: i64) -> Tick {
        Tick(self.0 + rhs)
    }
}

impl std::ops::Sub<i64> for Tick {
    type Output = Tick;
    fn sub(self, rhs: i64) -> Tick {
        Tick(self.0 - rhs)
    }
}

impl fmt::Display for Tick {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl FromStr for Tick {
    type Err = std::num::ParseIntError;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        s.trim().parse().map(Tick)
    }
}

/// A point of `B^n`, `0 <= n <= 64`.
///
/// Width 0 is allowed so that generator functions without inputs (`m = 0`)
/// can be evaluated on the empty input vector.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitVec {
    width: u8,
    bits: u64,
}

#[inline]
fn mask(width: usize) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

impl BitVec {
    /// Builds a vector from its packed form. Bits above `width` must be clear.
    pub fn new(width: usize, bits: u64) -> Result<Self> {
        if width > MAX_WIDTH {
            return Err(Error::WidthOutOfRange(width));
        }
        if bits & !mask(width) != 0 {
            return Err(Error::BadSelection(format!(
                "packed value {bits:#x} does not fit in {width} bits"
            )));
        }
        Ok(BitVec {
            width: width as u8,
            bits,
        })
    }

    /// Like [`BitVec::new`] but silently drops bits above `width`.
    pub(crate) fn truncated(width: usize, bits: u64) -> Self {
        debug_assert!(width <= MAX_WIDTH);
        BitVec {
            width: width as u8,
            bits: bits & mask(width),
        }
    }

    pub fn zeros(width: usize) -> Self {
        Self::truncated(width, 0)
    }

    pub fn ones(width: usize) -> Self {
        Self::truncated(width, u64::MAX)
    }

    pub fn empty() -> Self {
        Self::zeros(0)
    }

    pub fn from_bools(bits: &[bool]) -> Result<Self> {
        if bits.len() > MAX_WIDTH {
            return Err(Error::WidthOutOfRange(bits.len()));
        }
        let packed = bits
            .iter()
            .enumerate()
            .fold(0u64, |acc, (k, &b)| acc | ((b as u64) << k));
        Ok(Self::truncated(bits.len(), packed))
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width as usize
    }

    /// Packed form: coordinate `i` in bit `i - 1`.
    #[inline]
    pub fn bits(&self) -> u64 {
        self.bits
    }

    /// Value of coordinate `i` (1-based).
    pub fn get(&self, i: usize) -> Result<bool> {
        self.check_index(i)?;
        Ok(self.bits >> (i - 1) & 1 == 1)
    }

    pub fn with(&self, i: usize, value: bool) -> Result<Self> {
        self.check_index(i)?;
        let b = 1u64 << (i - 1);
        let bits = if value { self.bits | b } else { self.bits & !b };
        Ok(BitVec { bits, ..*self })
    }

    /// Complements coordinate `i`.
    pub fn flipped(&self, i: usize) -> Result<Self> {
        self.check_index(i)?;
        Ok(BitVec {
            bits: self.bits ^ (1u64 << (i - 1)),
            ..*self
        })
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn count_ones(&self) -> u32 {
        self.bits.count_ones()
    }

    /// `(self, other)` as a point of `B^(n' + n'')`.
    pub fn concat(&self, other: &BitVec) -> Result<Self> {
        let width = self.width() + other.width();
        if width > MAX_WIDTH {
            return Err(Error::WidthOutOfRange(width));
        }
        Ok(Self::truncated(
            width,
            self.bits | other.bits.checked_shl(self.width as u32).unwrap_or(0),
        ))
    }

    /// Splits into the first `at` coordinates and the rest.
    pub fn split_at(&self, at: usize) -> Result<(Self, Self)> {
        if at > self.width() {
            return Err(Error::IndexOutOfRange {
                index: at,
                width: self.width(),
            });
        }
        let head = Self::truncated(at, self.bits);
        let tail = Self::truncated(
            self.width() - at,
            self.bits.checked_shr(at as u32).unwrap_or(0),
        );
        Ok((head, tail))
    }

    /// The vector `(self_{c_1}, .., self_{c_k})` for the 1-based coordinate list `coords`.
    pub fn select(&self, coords: &[usize]) -> Result<Self> {
        if coords.len() > MAX_WIDTH {
            return Err(Error::WidthOutOfRange(coords.len()));
        }
        let mut out = 0u64;
        for (k, &c) in coords.iter().enumerate() {
            self.check_index(c)?;
            out |= (self.bits >> (c - 1) & 1) << k;
        }
        Ok(Self::truncated(coords.len(), out))
    }

    /// Inverse of [`BitVec::select`] for a permutation: coordinate `coords[k]` of the
    /// result is coordinate `k + 1` of `self`.
    pub fn scatter(&self, coords: &[usize]) -> Result<Self> {
        if coords.len() != self.width() {
            return Err(Error::WidthMismatch {
                expected: self.width(),
                found: coords.len(),
            });
        }
        let mut out = 0u64;
        for (k, &c) in coords.iter().enumerate() {
            if c == 0 || c > self.width() {
                return Err(Error::IndexOutOfRange {
                    index: c,
                    width: self.width(),
                });
            }
            out |= (self.bits >> k & 1) << (c - 1);
        }
        Ok(Self::truncated(self.width(), out))
    }

    /// All `2^width` vectors in packed order.
    pub fn all(width: usize) -> impl Iterator<Item = BitVec> {
        assert!(width < 32, "refusing to enumerate B^{width}");
        (0..1u64 << width).map(move |b| BitVec::truncated(width, b))
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.width()).map(move |k| self.bits >> k & 1 == 1)
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.width() {
            Err(Error::IndexOutOfRange {
                index: i,
                width: self.width(),
            })
        } else {
            Ok(())
        }
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec({self})")
    }
}

impl FromStr for BitVec {
    type Err = Error;

    /// Parses `b_1 b_2 .. b_n` written left to right, e.g. `"101"`.
    /// The empty string is the width-0 vector.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.len() > MAX_WIDTH {
            return Err(Error::WidthOutOfRange(s.len()));
        }
        let mut bits = 0u64;
        for (k, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => bits |= 1 << k,
                other => {
                    return Err(Error::BadSelection(format!(
                        "`{other}` is not a bit in `{s}`"
                    )))
                }
            }
        }
        Ok(Self::truncated(s.len(), bits))
    }
}

impl Serialize for BitVec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitVec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses a bit string, panicking on malformed input. Test and example helper.
pub fn bv(s: &str) -> BitVec {
    s.parse().unwrap_or_else(|e| panic!("bad bit string {s:?}: {e}"))
}
