//! Binary strings and dot-bracket symbol strings.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A finite, non-empty binary sequence.
///
/// The canonical textual form is the left-to-right string of `'0'`/`'1'`
/// characters; ordering and equality follow that form.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitString {
    bits: Vec<u8>,
}

impl BitString {
    /// Builds from raw bits; every element must be 0 or 1 and the sequence
    /// non-empty.
    pub fn from_bits(bits: Vec<u8>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::EmptyInput);
        }
        if let Some(pos) = bits.iter().position(|&b| b > 1) {
            return Err(Error::InvalidSymbol {
                found: (b'0' + bits[pos]) as char,
                pos,
            });
        }
        Ok(Self { bits })
    }

    /// Internal constructor for bits produced by the maps themselves.
    pub(crate) fn from_raw(bits: Vec<u8>) -> Self {
        debug_assert!(!bits.is_empty() && bits.iter().all(|&b| b <= 1));
        Self { bits }
    }

    /// The all-`bit` string of length `n`.
    pub fn uniform(bit: u8, n: usize) -> Result<Self> {
        Self::from_bits(vec![bit; n])
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        false // invariant: length >= 1
    }

    pub fn bit(&self, i: usize) -> u8 {
        self.bits[i]
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.bits
    }

    /// True when every bit equals the first.
    pub fn is_uniform(&self) -> bool {
        self.bits.iter().all(|&b| b == self.bits[0])
    }

    /// Count of 1-bits.
    pub fn ones_count(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    /// Number of adjacent positions where the bit value changes.
    pub fn changes_count(&self) -> usize {
        self.bits.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// The string read right to left.
    pub fn reversed(&self) -> Self {
        let mut bits = self.bits.clone();
        bits.reverse();
        Self { bits }
    }

    /// The string with every bit flipped.
    pub fn complemented(&self) -> Self {
        Self {
            bits: self.bits.iter().map(|&b| 1 - b).collect(),
        }
    }

    /// A copy with one extra bit appended.
    pub fn extended(&self, bit: u8) -> Self {
        debug_assert!(bit <= 1);
        let mut bits = self.bits.clone();
        bits.push(bit);
        Self { bits }
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::EmptyInput);
        }
        s.chars()
            .enumerate()
            .map(|(pos, c)| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                found => Err(Error::InvalidSymbol { found, pos }),
            })
            .collect::<Result<Vec<u8>>>()
            .map(|bits| Self { bits })
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            write!(f, "{}", b)?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({})", self)
    }
}

/// One symbol of a dot-bracket secondary-structure string.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Bracket {
    Dot,
    Open,
    Close,
}

impl Bracket {
    pub fn as_char(self) -> char {
        match self {
            Bracket::Dot => '.',
            Bracket::Open => '(',
            Bracket::Close => ')',
        }
    }
}

/// A non-empty dot-bracket string over `{'.', '(', ')'}`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DotBracket {
    symbols: Vec<Bracket>,
}

impl DotBracket {
    pub fn new(symbols: Vec<Bracket>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::EmptyInput);
        }
        Ok(Self { symbols })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn as_symbols(&self) -> &[Bracket] {
        &self.symbols
    }

    /// Fixed two-bit encoding per symbol: `.` → 00, `(` → 01, `)` → 10.
    /// The output length is twice the symbol count.
    pub fn to_bits(&self) -> BitString {
        let mut bits = Vec::with_capacity(2 * self.symbols.len());
        for &s in &self.symbols {
            match s {
                Bracket::Dot => bits.extend_from_slice(&[0, 0]),
                Bracket::Open => bits.extend_from_slice(&[0, 1]),
                Bracket::Close => bits.extend_from_slice(&[1, 0]),
            }
        }
        BitString::from_raw(bits)
    }

    /// Matched bracket pairs as `(open, close)` index tuples, or `None`
    /// when the brackets do not balance.
    pub fn pairs(&self) -> Option<Vec<(usize, usize)>> {
        let mut stack = Vec::new();
        let mut pairs = Vec::new();
        for (i, &s) in self.symbols.iter().enumerate() {
            match s {
                Bracket::Open => stack.push(i),
                Bracket::Close => pairs.push((stack.pop()?, i)),
                Bracket::Dot => {}
            }
        }
        if stack.is_empty() {
            pairs.sort_unstable();
            Some(pairs)
        } else {
            None
        }
    }

    pub fn is_balanced(&self) -> bool {
        self.pairs().is_some()
    }

    /// Number of base pairs (matched bracket pairs).
    pub fn pair_count(&self) -> usize {
        self.symbols
            .iter()
            .filter(|&&s| s == Bracket::Open)
            .count()
    }
}

impl FromStr for DotBracket {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::EmptyInput);
        }
        s.chars()
            .enumerate()
            .map(|(pos, c)| match c {
                '.' => Ok(Bracket::Dot),
                '(' => Ok(Bracket::Open),
                ')' => Ok(Bracket::Close),
                found => Err(Error::InvalidSymbol { found, pos }),
            })
            .collect::<Result<Vec<Bracket>>>()
            .map(|symbols| Self { symbols })
    }
}

impl fmt::Display for DotBracket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.symbols {
            write!(f, "{}", s.as_char())?;
        }
        Ok(())
    }
}
