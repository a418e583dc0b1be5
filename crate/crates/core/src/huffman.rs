//! Minimum-redundancy prefix codes over bit-pattern alphabets, used by the
//! average-case cost accounting and by the polling simulator's uplinks.
//!
//! Construction is deterministic: ties in the merge queue are broken by
//! creation order, so a uniform distribution over `2^B` symbols yields the
//! balanced tree with every codeword exactly `B` bits long.

use crate::bits::Bits;
use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum HuffmanError {
    #[error("cannot build a code over an empty alphabet")]
    EmptyAlphabet,
    #[error("probability at symbol {symbol} is {value}, must be finite and >= 0")]
    InvalidProbability { symbol: usize, value: f64 },
    #[error("all symbol probabilities are zero")]
    AllZero,
    #[error("symbol {symbol} has zero probability and no codeword")]
    UncodedSymbol { symbol: usize },
    #[error("symbol {symbol} out of range for alphabet of {len}")]
    SymbolOutOfRange { symbol: usize, len: usize },
    #[error("bit stream ended inside a codeword")]
    Truncated,
}

#[derive(Clone, Debug)]
enum Tree {
    Leaf(usize),
    Internal(Box<Tree>, Box<Tree>),
}

/// Merge-queue entry ordered by (weight, creation stamp); stamps are unique
/// so the tree itself never enters the comparison.
struct HeapEntry {
    weight: f64,
    stamp: u64,
    tree: Tree,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for HeapEntry {}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight
            .total_cmp(&other.weight)
            .then(self.stamp.cmp(&other.stamp))
    }
}

/// A prefix code over symbols `0..len`. Symbols with zero probability carry
/// no codeword; a single-symbol alphabet is assigned the 1-bit codeword `0`.
#[derive(Clone, Debug)]
pub struct Codebook {
    codes: Vec<Option<Bits>>,
    probs: Vec<f64>,
    tree: Tree,
    single: bool,
}

impl Codebook {
    /// Build from a probability vector. Probabilities must be finite and
    /// nonnegative with at least one positive entry; normalization is the
    /// caller's concern (expected length is computed against the vector as
    /// given).
    pub fn from_probs(probs: &[f64]) -> Result<Self, HuffmanError> {
        if probs.is_empty() {
            return Err(HuffmanError::EmptyAlphabet);
        }
        for (symbol, &p) in probs.iter().enumerate() {
            if !p.is_finite() || p < 0.0 {
                return Err(HuffmanError::InvalidProbability { symbol, value: p });
            }
        }
        let alive: Vec<usize> = (0..probs.len()).filter(|&s| probs[s] > 0.0).collect();
        if alive.is_empty() {
            return Err(HuffmanError::AllZero);
        }

        let mut codes = vec![None; probs.len()];
        let (tree, single) = if alive.len() == 1 {
            codes[alive[0]] = Some(Bits::single(0));
            (Tree::Leaf(alive[0]), true)
        } else {
            // (weight, creation order) keyed min-heap; FIFO tie-break keeps
            // equal-weight subtrees at equal depth.
            let mut heap: BinaryHeap<Reverse<HeapEntry>> = BinaryHeap::new();
            let mut stamp = 0u64;
            for &s in &alive {
                heap.push(Reverse(HeapEntry {
                    weight: probs[s],
                    stamp,
                    tree: Tree::Leaf(s),
                }));
                stamp += 1;
            }
            while heap.len() > 1 {
                let Reverse(a) = heap.pop().expect("len > 1");
                let Reverse(b) = heap.pop().expect("len > 1");
                heap.push(Reverse(HeapEntry {
                    weight: a.weight + b.weight,
                    stamp,
                    tree: Tree::Internal(Box::new(a.tree), Box::new(b.tree)),
                }));
                stamp += 1;
            }
            let Reverse(HeapEntry { tree: root, .. }) = heap.pop().expect("one tree remains");
            let mut stack = vec![(&root, Bits::empty())];
            let mut assignments = Vec::new();
            while let Some((node, prefix)) = stack.pop() {
                match node {
                    Tree::Leaf(s) => assignments.push((*s, prefix)),
                    Tree::Internal(left, right) => {
                        let mut l = prefix.clone();
                        l.push_bit(0);
                        let mut r = prefix;
                        r.push_bit(1);
                        stack.push((right, r));
                        stack.push((left, l));
                    }
                }
            }
            for (s, code) in assignments {
                codes[s] = Some(code);
            }
            (root, false)
        };

        Ok(Codebook {
            codes,
            probs: probs.to_vec(),
            tree,
            single,
        })
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    /// Codeword for a symbol, if it has one.
    pub fn code(&self, symbol: usize) -> Result<&Bits, HuffmanError> {
        self.codes
            .get(symbol)
            .ok_or(HuffmanError::SymbolOutOfRange {
                symbol,
                len: self.codes.len(),
            })?
            .as_ref()
            .ok_or(HuffmanError::UncodedSymbol { symbol })
    }

    /// Expected codeword length under the construction probabilities.
    pub fn expected_length(&self) -> f64 {
        self.codes
            .iter()
            .zip(&self.probs)
            .filter_map(|(code, p)| code.as_ref().map(|c| p * c.len() as f64))
            .sum()
    }

    /// Decode one symbol starting at `*cursor` within a 0/1 string, advancing
    /// the cursor past the codeword.
    pub fn decode_prefix(&self, bits: &str, cursor: &mut usize) -> Result<usize, HuffmanError> {
        let bytes = bits.as_bytes();
        if self.single {
            if *cursor >= bytes.len() {
                return Err(HuffmanError::Truncated);
            }
            *cursor += 1;
            return match self.tree {
                Tree::Leaf(s) => Ok(s),
                Tree::Internal(..) => unreachable!("single-symbol codebook"),
            };
        }
        let mut node = &self.tree;
        loop {
            match node {
                Tree::Leaf(s) => return Ok(*s),
                Tree::Internal(left, right) => {
                    let bit = *bytes.get(*cursor).ok_or(HuffmanError::Truncated)?;
                    *cursor += 1;
                    node = if bit == b'1' { right } else { left };
                }
            }
        }
    }
}

/// Uniform probability vector over `2^b` patterns.
pub fn uniform_pattern_probs(b: u32) -> Vec<f64> {
    let count = 1usize << b;
    vec![1.0 / count as f64; count]
}
