//! Words in a finitely generated free group.
//!
//! A [`Word`] is always freely reduced: no letter is followed by its
//! inverse. Every constructor and operation preserves that invariant, so
//! equality of `Word` values is equality in the free group.

use crate::error::{Error, Result};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt;

/// Hard cap on letters in any single word this library will build.
pub const MAX_WORD_LETTERS: usize = 1 << 24;

/// Index of a free generator, zero based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Generator(u32);

impl Generator {
    pub fn new(index: u32) -> Self {
        assert!(index < i32::MAX as u32, "generator index overflow");
        Generator(index)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// One signed generator occurrence, packed as a nonzero i32:
/// `+(index+1)` for a positive letter, `-(index+1)` for its inverse.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter(i32);

impl Letter {
    pub fn new(gen: Generator, sign: Sign) -> Self {
        let magnitude = gen.0 as i32 + 1;
        Letter(match sign {
            Sign::Plus => magnitude,
            Sign::Minus => -magnitude,
        })
    }

    pub fn positive(gen: Generator) -> Self {
        Letter::new(gen, Sign::Plus)
    }

    pub fn generator(self) -> Generator {
        Generator(self.0.unsigned_abs() - 1)
    }

    pub fn sign(self) -> Sign {
        if self.0 > 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn inverse(self) -> Letter {
        Letter(-self.0)
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign() {
            Sign::Plus => write!(f, "g{}", self.generator().index()),
            Sign::Minus => write!(f, "g{}^-1", self.generator().index()),
        }
    }
}

/// Freely reduced word. The letter sequence never contains `l, l.inverse()`
/// adjacently.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word {
    letters: Vec<Letter>,
}

/// Push-with-cancellation buffer. Appending letters one at a time keeps the
/// prefix reduced, so the final content is a reduced word.
#[derive(Default)]
pub(crate) struct ReducedBuf {
    letters: Vec<Letter>,
}

impl ReducedBuf {
    pub(crate) fn with_capacity(cap: usize) -> Self {
        ReducedBuf {
            letters: Vec::with_capacity(cap),
        }
    }

    pub(crate) fn push(&mut self, l: Letter) {
        if self.letters.last() == Some(&l.inverse()) {
            self.letters.pop();
        } else {
            self.letters.push(l);
        }
    }

    pub(crate) fn extend(&mut self, letters: impl IntoIterator<Item = Letter>) {
        for l in letters {
            self.push(l);
        }
    }

    pub(crate) fn into_word(self) -> Word {
        Word {
            letters: self.letters,
        }
    }
}

impl Word {
    pub fn empty() -> Self {
        Word::default()
    }

    /// Freely reduce an arbitrary letter sequence.
    pub fn reduce(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut buf = ReducedBuf::default();
        buf.extend(letters);
        buf.into_word()
    }

    /// Single positive generator as a word.
    pub fn gen(index: u32) -> Self {
        Word {
            letters: vec![Letter::positive(Generator::new(index))],
        }
    }

    /// `x_index ^ exponent`. The empty word when `exponent == 0`.
    pub fn gen_pow(index: u32, exponent: i64) -> Self {
        let n = exponent.unsigned_abs() as usize;
        assert!(n <= MAX_WORD_LETTERS, "exponent too large");
        let sign = if exponent >= 0 {
            Sign::Plus
        } else {
            Sign::Minus
        };
        Word {
            letters: vec![Letter::new(Generator::new(index), sign); n],
        }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    /// Concatenation in the free group. Both operands are reduced, so only
    /// the seam can cancel.
    pub fn concat(&self, other: &Word) -> Word {
        let mut left = self.letters.clone();
        let mut skip = 0;
        while let Some(&last) = left.last() {
            match other.letters.get(skip) {
                Some(&first) if first == last.inverse() => {
                    left.pop();
                    skip += 1;
                }
                _ => break,
            }
        }
        left.extend_from_slice(&other.letters[skip..]);
        Word { letters: left }
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// Strip matching first/last pairs until the word is cyclically reduced.
    pub fn cyclically_reduced(&self) -> Word {
        let mut letters = self.letters.as_slice();
        while letters.len() >= 2 && letters[0] == letters[letters.len() - 1].inverse() {
            letters = &letters[1..letters.len() - 1];
        }
        Word {
            letters: letters.to_vec(),
        }
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        self.letters.len() < 2 || self.letters[0] != self.letters[self.letters.len() - 1].inverse()
    }

    /// Signed exponent sum of every generator below `rank`.
    pub fn exponent_vector(&self, rank: usize) -> Result<Vec<i64>> {
        let mut sums = vec![0i64; rank];
        for l in &self.letters {
            let i = l.generator().index();
            if i >= rank {
                return Err(Error::GeneratorOutOfRank { index: i, rank });
            }
            sums[i] += l.sign().value();
        }
        Ok(sums)
    }

    /// Count of positive and negative occurrences of one generator.
    pub fn occurrences(&self, gen: Generator) -> (usize, usize) {
        let mut pos = 0;
        let mut neg = 0;
        for l in &self.letters {
            if l.generator() == gen {
                match l.sign() {
                    Sign::Plus => pos += 1,
                    Sign::Minus => neg += 1,
                }
            }
        }
        (pos, neg)
    }

    /// Replace each generator by its image and reduce. `images[i]` is the
    /// image of generator `i`; a letter outside the slice is an error.
    pub fn substitute(&self, images: &[Word]) -> Result<Word> {
        let mut buf = ReducedBuf::with_capacity(self.letters.len());
        for l in &self.letters {
            let i = l.generator().index();
            let image = images.get(i).ok_or(Error::MissingImage { index: i })?;
            match l.sign() {
                Sign::Plus => buf.extend(image.letters.iter().copied()),
                Sign::Minus => buf.extend(image.letters.iter().rev().map(|x| x.inverse())),
            }
        }
        Ok(buf.into_word())
    }

    pub fn max_generator_index(&self) -> Option<usize> {
        self.letters.iter().map(|l| l.generator().index()).max()
    }

    pub fn fits_rank(&self, rank: usize) -> bool {
        self.max_generator_index().is_none_or(|m| m < rank)
    }
}

impl std::ops::Mul for &Word {
    type Output = Word;

    fn mul(self, rhs: &Word) -> Word {
        self.concat(rhs)
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "(empty)");
        }
        for (k, l) in self.letters.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l:?}")?;
        }
        Ok(())
    }
}

/// Uniform random freely reduced word of exactly `len` letters: the first
/// letter is uniform over all `2 * rank` letters, each later letter uniform
/// over the `2 * rank - 1` letters that do not cancel the previous one.
pub fn random_reduced_with(rank: usize, len: usize, rng: &mut impl Rng) -> Word {
    assert!(rank >= 1, "need at least one generator");
    let mut letters = Vec::with_capacity(len);
    for _ in 0..len {
        let forbidden = letters.last().map(|l: &Letter| l.inverse());
        loop {
            let i = rng.gen_range(0..rank) as u32;
            let sign = if rng.gen::<bool>() {
                Sign::Plus
            } else {
                Sign::Minus
            };
            let l = Letter::new(Generator::new(i), sign);
            if Some(l) != forbidden {
                letters.push(l);
                break;
            }
        }
    }
    Word { letters }
}

pub fn random_reduced_word(rank: usize, len: usize, seed: u64) -> Word {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_reduced_with(rank, len, &mut rng)
}
