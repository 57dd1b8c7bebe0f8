//! RNA sequences and maximum-base-pair secondary structure folding.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::{BitString, Bracket, DotBracket};
use crate::error::{Error, Result};

/// One nucleotide. The discriminant order fixes the enumeration order of
/// sequences.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
#[repr(u8)]
pub enum Base {
    A = 0,
    C = 1,
    G = 2,
    U = 3,
}

impl Base {
    pub fn from_index(i: u8) -> Base {
        match i & 3 {
            0 => Base::A,
            1 => Base::C,
            2 => Base::G,
            _ => Base::U,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Base::A => 'A',
            Base::C => 'C',
            Base::G => 'G',
            Base::U => 'U',
        }
    }
}

/// Watson-Crick pairs plus the GU wobble, in both orientations.
pub fn can_pair(a: Base, b: Base) -> bool {
    matches!(
        (a, b),
        (Base::A, Base::U)
            | (Base::U, Base::A)
            | (Base::G, Base::C)
            | (Base::C, Base::G)
            | (Base::G, Base::U)
            | (Base::U, Base::G)
    )
}

/// A non-empty nucleotide sequence.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RnaSequence {
    bases: Vec<Base>,
}

impl RnaSequence {
    pub fn new(bases: Vec<Base>) -> Result<Self> {
        if bases.is_empty() {
            return Err(Error::EmptyInput);
        }
        Ok(Self { bases })
    }

    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn bases(&self) -> &[Base] {
        &self.bases
    }

    /// The `index`-th sequence of length `len` with bases ordered A, C, G, U
    /// (most significant position first).
    pub fn from_index(index: u64, len: usize) -> Self {
        let bases = (0..len)
            .map(|i| Base::from_index(((index >> (2 * (len - 1 - i))) & 3) as u8))
            .collect();
        Self { bases }
    }
}

impl FromStr for RnaSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::EmptyInput);
        }
        s.chars()
            .enumerate()
            .map(|(pos, c)| match c {
                'A' => Ok(Base::A),
                'C' => Ok(Base::C),
                'G' => Ok(Base::G),
                'U' => Ok(Base::U),
                found => Err(Error::InvalidSymbol { found, pos }),
            })
            .collect::<Result<Vec<Base>>>()
            .map(|bases| Self { bases })
    }
}

impl fmt::Display for RnaSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bases {
            write!(f, "{}", b.as_char())?;
        }
        Ok(())
    }
}

/// Folding parameters: sequence length for sampling and the minimum number
/// of unpaired bases a hairpin loop must enclose.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RnaSpec {
    seq_length: usize,
    min_loop: usize,
}

impl RnaSpec {
    pub fn new(seq_length: usize, min_loop: usize) -> Result<Self> {
        if seq_length == 0 {
            return Err(Error::InvalidArgument("seq_length must be >= 1".into()));
        }
        Ok(Self {
            seq_length,
            min_loop,
        })
    }

    pub fn seq_length(&self) -> usize {
        self.seq_length
    }

    pub fn min_loop(&self) -> usize {
        self.min_loop
    }

    pub fn output_len(&self) -> usize {
        2 * self.seq_length
    }

    pub fn input_cardinality(&self) -> u128 {
        4u128.pow(self.seq_length as u32)
    }

    /// Uniformly random sequence folded and encoded as bits.
    pub fn sample_output(&self, seed: u64) -> BitString {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bases = (0..self.seq_length)
            .map(|_| Base::from_index(rng.random_range(0..4u8)))
            .collect();
        let seq = RnaSequence { bases };
        nussinov_fold(&seq, self).to_bits()
    }

    pub fn output_for_index(&self, index: u64) -> BitString {
        let seq = RnaSequence::from_index(index, self.seq_length);
        nussinov_fold(&seq, self).to_bits()
    }

    pub fn canonical_string(&self) -> String {
        format!("rna:len={};minloop={}", self.seq_length, self.min_loop)
    }
}

impl Default for RnaSpec {
    fn default() -> Self {
        Self {
            seq_length: 35,
            min_loop: 3,
        }
    }
}

/// Maximum-base-pair secondary structure by dynamic programming.
///
/// Pairs must satisfy [`can_pair`] and enclose at least `min_loop` unpaired
/// bases. Traceback ties are resolved deterministically: leaving position
/// `i` unpaired wins over pairing, then the smallest partner index wins.
pub fn nussinov_fold(seq: &RnaSequence, spec: &RnaSpec) -> DotBracket {
    let bases = seq.bases();
    let n = bases.len();
    let min_loop = spec.min_loop();
    let idx = |i: usize, j: usize| i * n + j;

    // best[i][j] = max pairs within bases[i..=j]; zero for empty spans.
    let mut best = vec![0u16; n * n];
    for span in 1..n {
        for i in 0..n - span {
            let j = i + span;
            let mut value = best[idx(i + 1, j)];
            for k in (i + min_loop + 1)..=j {
                if !can_pair(bases[i], bases[k]) {
                    continue;
                }
                let inner = if k > i + 1 { best[idx(i + 1, k - 1)] } else { 0 };
                let right = if k < j { best[idx(k + 1, j)] } else { 0 };
                value = value.max(inner + 1 + right);
            }
            best[idx(i, j)] = value;
        }
    }

    let mut structure = vec![Bracket::Dot; n];
    let mut stack = vec![(0usize, n - 1)];
    while let Some((i, j)) = stack.pop() {
        if i >= j || best[idx(i, j)] == 0 {
            continue;
        }
        if best[idx(i, j)] == best[idx(i + 1, j)] {
            stack.push((i + 1, j));
            continue;
        }
        for k in (i + min_loop + 1)..=j {
            if !can_pair(bases[i], bases[k]) {
                continue;
            }
            let inner = if k > i + 1 { best[idx(i + 1, k - 1)] } else { 0 };
            let right = if k < j { best[idx(k + 1, j)] } else { 0 };
            if inner + 1 + right == best[idx(i, j)] {
                structure[i] = Bracket::Open;
                structure[k] = Bracket::Close;
                if k > i + 1 {
                    stack.push((i + 1, k - 1));
                }
                if k < j {
                    stack.push((k + 1, j));
                }
                break;
            }
        }
    }

    DotBracket::new(structure).expect("sequence is non-empty")
}

/// Checks that a structure is a valid folding of `seq` under `spec`:
/// balanced brackets, every pair chemically allowed, and every pair
/// enclosing at least `min_loop` positions.
pub fn structure_is_valid(seq: &RnaSequence, structure: &DotBracket, spec: &RnaSpec) -> bool {
    if seq.len() != structure.len() {
        return false;
    }
    match structure.pairs() {
        None => false,
        Some(pairs) => pairs.iter().all(|&(i, j)| {
            j > i && j - i > spec.min_loop() && can_pair(seq.bases()[i], seq.bases()[j])
        }),
    }
}
