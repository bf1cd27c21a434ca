//! Elementary automorphisms of a free group and compositions of them.
//!
//! Three move kinds generate the automorphism group of a finitely generated
//! free group: inverting one generator, swapping two, and right-multiplying
//! one by a power of another. An [`Automorphism`] is a rank plus a move
//! sequence, applied left to right; its inverse is the reversed sequence of
//! inverted moves, so round trips are exact on the nose, not just up to
//! equivalence.

use crate::error::{Error, Result};
use crate::word::{Generator, Letter, ReducedBuf, Sign, Word};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

/// One elementary Nielsen move on generator indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op")]
pub enum NielsenMove {
    /// `x_i -> x_i^-1`.
    #[serde(rename = "inv")]
    Inv { i: usize },
    /// `x_i -> x_i x_j^e` with `i != j`, `e != 0`.
    #[serde(rename = "mul")]
    RightMult { i: usize, j: usize, e: i64 },
    /// Exchange `x_i` and `x_j`.
    #[serde(rename = "swap")]
    Swap { i: usize, j: usize },
}

impl NielsenMove {
    pub fn validate(&self, rank: usize) -> Result<()> {
        let check = |i: usize| {
            if i < rank {
                Ok(())
            } else {
                Err(Error::GeneratorOutOfRank { index: i, rank })
            }
        };
        match *self {
            NielsenMove::Inv { i } => check(i),
            NielsenMove::RightMult { i, j, e } => {
                check(i)?;
                check(j)?;
                if i == j {
                    return Err(Error::InvalidPair { i, j });
                }
                if e == 0 {
                    return Err(Error::InvalidMove(format!(
                        "right multiplication of x_{i} by x_{j}^0 is the identity"
                    )));
                }
                Ok(())
            }
            NielsenMove::Swap { i, j } => {
                check(i)?;
                check(j)?;
                if i == j {
                    return Err(Error::InvalidPair { i, j });
                }
                Ok(())
            }
        }
    }

    /// Image of a word under this single move.
    pub fn apply(&self, w: &Word) -> Word {
        match *self {
            NielsenMove::Inv { i } => {
                // Flipping every occurrence of one generator cannot create
                // a cancellation in a reduced word.
                let letters = w.letters().iter().map(|&l| {
                    if l.generator().index() == i {
                        l.inverse()
                    } else {
                        l
                    }
                });
                Word::reduce(letters)
            }
            NielsenMove::Swap { i, j } => {
                let letters = w.letters().iter().map(|&l| {
                    let g = l.generator().index();
                    let target = if g == i {
                        j
                    } else if g == j {
                        i
                    } else {
                        g
                    };
                    Letter::new(Generator::new(target as u32), l.sign())
                });
                Word::reduce(letters)
            }
            NielsenMove::RightMult { i, j, e } => {
                let mut buf = ReducedBuf::with_capacity(w.len());
                let tail = Word::gen_pow(j as u32, e);
                for &l in w.letters() {
                    if l.generator().index() == i {
                        match l.sign() {
                            // x_i -> x_i x_j^e
                            Sign::Plus => {
                                buf.push(l);
                                buf.extend(tail.letters().iter().copied());
                            }
                            // x_i^-1 -> x_j^-e x_i^-1
                            Sign::Minus => {
                                buf.extend(tail.letters().iter().rev().map(|t| t.inverse()));
                                buf.push(l);
                            }
                        }
                    } else {
                        buf.push(l);
                    }
                }
                buf.into_word()
            }
        }
    }

    pub fn inverse(&self) -> NielsenMove {
        match *self {
            NielsenMove::Inv { i } => NielsenMove::Inv { i },
            NielsenMove::Swap { i, j } => NielsenMove::Swap { i, j },
            NielsenMove::RightMult { i, j, e } => NielsenMove::RightMult { i, j, e: -e },
        }
    }

    /// Generator images of this move at the given rank, for comparing a
    /// move application against plain substitution.
    pub fn images(&self, rank: usize) -> Vec<Word> {
        let mut out: Vec<Word> = (0..rank as u32).map(Word::gen).collect();
        match *self {
            NielsenMove::Inv { i } => out[i] = out[i].inverse(),
            NielsenMove::Swap { i, j } => out.swap(i, j),
            NielsenMove::RightMult { i, j, e } => {
                out[i] = out[i].concat(&Word::gen_pow(j as u32, e));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Deserialize)]
struct RawAutomorphism {
    rank: usize,
    moves: Vec<NielsenMove>,
}

/// Composition of Nielsen moves on a free group of fixed rank, applied in
/// sequence order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawAutomorphism")]
pub struct Automorphism {
    rank: usize,
    moves: Vec<NielsenMove>,
}

impl TryFrom<RawAutomorphism> for Automorphism {
    type Error = Error;

    fn try_from(raw: RawAutomorphism) -> Result<Self> {
        Automorphism::new(raw.rank, raw.moves)
    }
}

impl Automorphism {
    pub fn identity(rank: usize) -> Self {
        Automorphism {
            rank,
            moves: Vec::new(),
        }
    }

    pub fn new(rank: usize, moves: Vec<NielsenMove>) -> Result<Self> {
        for m in &moves {
            m.validate(rank)?;
        }
        Ok(Automorphism { rank, moves })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn moves(&self) -> &[NielsenMove] {
        &self.moves
    }

    pub fn is_identity(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn push(&mut self, m: NielsenMove) -> Result<()> {
        m.validate(self.rank)?;
        self.moves.push(m);
        Ok(())
    }

    pub fn apply(&self, w: &Word) -> Result<Word> {
        if !w.fits_rank(self.rank) {
            return Err(Error::GeneratorOutOfRank {
                index: w.max_generator_index().unwrap_or(0),
                rank: self.rank,
            });
        }
        let mut out = w.clone();
        for m in &self.moves {
            out = m.apply(&out);
        }
        Ok(out)
    }

    /// The inverse composition: reversed move order, each move inverted.
    pub fn inverse(&self) -> Automorphism {
        Automorphism {
            rank: self.rank,
            moves: self.moves.iter().rev().map(|m| m.inverse()).collect(),
        }
    }

    /// Generator images, computed by applying the whole composition to each
    /// generator.
    pub fn images(&self) -> Vec<Word> {
        (0..self.rank as u32)
            .map(|i| self.apply(&Word::gen(i)).expect("generator fits rank"))
            .collect()
    }

    /// Induced matrix on the abelianization, acting on exponent vectors:
    /// if `v` is the exponent vector of `w` then `M v` is the exponent
    /// vector of the image of `w`. Row operations accumulate right to left
    /// as `M = E_k ... E_1` for moves `E_1, ..., E_k`.
    pub fn abelianized_matrix(&self) -> Vec<Vec<BigInt>> {
        let n = self.rank;
        let mut m: Vec<Vec<BigInt>> = (0..n)
            .map(|r| (0..n).map(|c| BigInt::from((r == c) as i64)).collect())
            .collect();
        for mv in &self.moves {
            match *mv {
                NielsenMove::Inv { i } => {
                    for c in 0..n {
                        let v = -m[i][c].clone();
                        m[i][c] = v;
                    }
                }
                NielsenMove::Swap { i, j } => m.swap(i, j),
                // x_i picks up x_j^e, so weight flowing into j grows by
                // e times the weight flowing into i.
                NielsenMove::RightMult { i, j, e } => {
                    for c in 0..n {
                        let add = &m[i][c] * BigInt::from(e);
                        m[j][c] += add;
                    }
                }
            }
        }
        m
    }
}
