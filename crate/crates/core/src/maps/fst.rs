//! Deterministic finite state transducer over the binary alphabet.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::BitString;
use crate::error::{Error, Result};

/// One transducer edge: where to go and what to emit.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Transition {
    pub next_state: usize,
    pub output_bit: u8,
}

/// A total transducer: every `(state, input bit)` pair has exactly one
/// transition, and the machine emits one output bit per input bit.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FstSpec {
    num_states: usize,
    start_state: usize,
    /// Indexed `state * 2 + input_bit`.
    transitions: Vec<Transition>,
    input_length: usize,
}

impl FstSpec {
    pub fn new(
        num_states: usize,
        start_state: usize,
        transitions: Vec<Transition>,
        input_length: usize,
    ) -> Result<Self> {
        if num_states == 0 {
            return Err(Error::InvalidArgument("num_states must be >= 1".into()));
        }
        if input_length == 0 {
            return Err(Error::InvalidArgument("input_length must be >= 1".into()));
        }
        if start_state >= num_states {
            return Err(Error::InvalidArgument(format!(
                "start_state {start_state} out of range for {num_states} states"
            )));
        }
        if transitions.len() != 2 * num_states {
            return Err(Error::InvalidArgument(format!(
                "transition table must cover every (state, bit) pair exactly once: \
                 expected {} entries, got {}",
                2 * num_states,
                transitions.len()
            )));
        }
        for (i, t) in transitions.iter().enumerate() {
            if t.next_state >= num_states {
                return Err(Error::InvalidArgument(format!(
                    "transition {i} references state {} >= {num_states}",
                    t.next_state
                )));
            }
            if t.output_bit > 1 {
                return Err(Error::InvalidArgument(format!(
                    "transition {i} emits non-binary symbol {}",
                    t.output_bit
                )));
            }
        }
        Ok(Self {
            num_states,
            start_state,
            transitions,
            input_length,
        })
    }

    /// Uniformly random transition table, deterministic in `seed`; the
    /// start state is 0. Entries are drawn state-major, input bit 0 first.
    pub fn random(num_states: usize, input_length: usize, seed: u64) -> Result<Self> {
        if num_states == 0 {
            return Err(Error::InvalidArgument("num_states must be >= 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let transitions = (0..2 * num_states)
            .map(|_| Transition {
                next_state: rng.random_range(0..num_states),
                output_bit: rng.random_range(0..2u8),
            })
            .collect();
        Self::new(num_states, 0, transitions, input_length)
    }

    /// Single-state transducer that echoes its input.
    pub fn identity(input_length: usize) -> Result<Self> {
        Self::new(
            1,
            0,
            vec![
                Transition { next_state: 0, output_bit: 0 },
                Transition { next_state: 0, output_bit: 1 },
            ],
            input_length,
        )
    }

    /// Single-state transducer that emits `bit` regardless of input.
    pub fn constant(bit: u8, input_length: usize) -> Result<Self> {
        Self::new(
            1,
            0,
            vec![
                Transition { next_state: 0, output_bit: bit },
                Transition { next_state: 0, output_bit: bit },
            ],
            input_length,
        )
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn start_state(&self) -> usize {
        self.start_state
    }

    pub fn input_length(&self) -> usize {
        self.input_length
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    /// Runs the machine over `input`, emitting one bit per consumed bit.
    pub fn apply(&self, input: &BitString) -> Result<BitString> {
        if input.len() != self.input_length {
            return Err(Error::LengthMismatch {
                expected: self.input_length,
                got: input.len(),
            });
        }
        let mut state = self.start_state;
        let mut out = Vec::with_capacity(input.len());
        for &b in input.as_slice() {
            let t = self.transitions[state * 2 + b as usize];
            out.push(t.output_bit);
            state = t.next_state;
        }
        Ok(BitString::from_raw(out))
    }

    pub fn input_cardinality(&self) -> u128 {
        1u128 << self.input_length
    }

    /// The `index`-th input in lexicographic order (most significant bit
    /// first), for exhaustive enumeration.
    pub fn input_from_index(&self, index: u64) -> BitString {
        let n = self.input_length;
        let bits = (0..n)
            .map(|i| ((index >> (n - 1 - i)) & 1) as u8)
            .collect();
        BitString::from_raw(bits)
    }

    /// A uniformly random input of the configured length.
    pub fn sample_output(&self, seed: u64) -> BitString {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bits: Vec<u8> = (0..self.input_length)
            .map(|_| (rng.next_u64() & 1) as u8)
            .collect();
        self.apply(&BitString::from_raw(bits))
            .expect("generated input has the configured length")
    }

    pub fn canonical_string(&self) -> String {
        let table: Vec<String> = self
            .transitions
            .iter()
            .map(|t| format!("{}.{}", t.next_state, t.output_bit))
            .collect();
        format!(
            "fst:states={};start={};len={};table={}",
            self.num_states,
            self.start_state,
            self.input_length,
            table.join(",")
        )
    }
}
