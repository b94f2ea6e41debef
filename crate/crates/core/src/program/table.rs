use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::Assignment;
use crate::error::ProgramError;

/// Largest arity [`LeveledProgram::truth_table`](super::LeveledProgram::truth_table) will expand.
pub const DEFAULT_TABLE_LIMIT: usize = 24;

/// A packed table of `2^n` bits. Entry `i` is the value on the input whose
/// bit `j` is bit `j` of `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TruthTable {
    n: usize,
    words: Vec<u64>,
}

impl TruthTable {
    pub fn zeros(n: usize) -> Self {
        TruthTable { n, words: vec![0; word_count(n)] }
    }

    pub fn from_fn(n: usize, f: impl Fn(&Assignment) -> bool + Sync) -> Self {
        Self::try_from_fn(n, |x| Ok::<_, ProgramError>(f(x))).unwrap()
    }

    pub fn try_from_fn<E: Send>(n: usize, f: impl Fn(&Assignment) -> Result<bool, E> + Sync) -> Result<Self, E> {
        let len = 1u64 << n;
        let words = (0..word_count(n) as u64)
            .into_par_iter()
            .map(|w| {
                let mut word = 0u64;
                for bit in 0..64.min(len) {
                    if f(&Assignment::from_index(w * 64 + bit, n))? {
                        word |= 1 << bit;
                    }
                }
                Ok(word)
            })
            .collect::<Result<Vec<_>, E>>()?;
        Ok(TruthTable { n, words })
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self, usize> {
        if !bits.len().is_power_of_two() {
            return Err(bits.len());
        }
        let n = bits.len().trailing_zeros() as usize;
        let mut t = TruthTable::zeros(n);
        for (i, &b) in bits.iter().enumerate() {
            t.set(i, b);
        }
        Ok(t)
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        1 << self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, i: usize) -> bool {
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        if value {
            self.words[i / 64] |= 1 << (i % 64);
        } else {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}

fn word_count(n: usize) -> usize {
    (1usize << n).div_ceil(64)
}

impl fmt::Display for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for TruthTable {
    type Err = ProgramError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bits: Assignment = s.trim().parse()?;
        TruthTable::from_bits(bits.bits())
            .map_err(|len| ProgramError::BadAssignment(format!("table length {len} is not a power of two")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_fn_follows_index_convention() {
        let t = TruthTable::from_fn(2, |x| x.get(0) && !x.get(1));
        assert_eq!(t.to_string(), "0100");
    }

    #[test]
    fn parse_and_print() {
        let t: TruthTable = "0110".parse().unwrap();
        assert_eq!(t.arity(), 2);
        assert_eq!(t.to_string(), "0110");
        assert!("011".parse::<TruthTable>().is_err());
    }

    #[test]
    fn wide_tables_pack_into_words() {
        let t = TruthTable::from_fn(8, |x| x.get(7));
        assert_eq!(t.words().len(), 4);
        assert_eq!(t.count_ones(), 128);
        assert!(t.get(128) && !t.get(127));
    }
}
