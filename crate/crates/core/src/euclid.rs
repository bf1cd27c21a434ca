//! Euclidean elimination of exponent sums by Nielsen moves.
//!
//! Right-multiplying `x_i` by `x_j^e` adds `e` times the `x_i` exponent sum
//! to the `x_j` exponent sum, so the classical subtractive gcd computation
//! runs on exponent pairs while every intermediate stays an honest word. The
//! point of the bookkeeping here is quantitative: a division step with
//! quotient `c` multiplies word length by at most `c + 1`, so the product of
//! `(c + 1)` over all steps bounds total growth.

use crate::error::{Error, Result};
use crate::nielsen::{Automorphism, NielsenMove};
use crate::word::{random_reduced_with, Generator, Word};
use num_bigint::BigUint;
use num_traits::One;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// One division step of the elimination, with the state it left behind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrowthStep {
    pub mv: NielsenMove,
    /// Euclidean quotient used for this step.
    pub quotient: u64,
    /// Word length immediately after the step.
    pub length_after: usize,
    /// Exponent sums of the active pair after the step, in pair order.
    pub exponents_after: (i64, i64),
}

/// Division step log for one word across an elimination run. Sign
/// normalizations and swaps preserve length and are not logged; they are
/// still part of the returned automorphism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrowthTrace {
    pub initial_length: usize,
    pub steps: Vec<GrowthStep>,
    /// Product of (quotient + 1) over all steps.
    pub product_p: BigUint,
    pub final_length: usize,
}

struct TraceBuilder {
    initial_length: usize,
    steps: Vec<GrowthStep>,
}

/// Shared elimination engine: a move sequence applied to several words at
/// once, with exponent sums kept current and division steps logged per word.
pub(crate) struct Elimination {
    rank: usize,
    moves: Vec<NielsenMove>,
    words: Vec<Word>,
    exps: Vec<Vec<i64>>,
    tracks: Vec<TraceBuilder>,
}

impl Elimination {
    pub(crate) fn new(rank: usize, words: Vec<Word>) -> Result<Self> {
        let mut exps = Vec::with_capacity(words.len());
        let mut tracks = Vec::with_capacity(words.len());
        for w in &words {
            exps.push(w.exponent_vector(rank)?);
            tracks.push(TraceBuilder {
                initial_length: w.len(),
                steps: Vec::new(),
            });
        }
        Ok(Elimination {
            rank,
            moves: Vec::new(),
            words,
            exps,
            tracks,
        })
    }

    fn apply(&mut self, mv: NielsenMove) {
        for (w, e) in self.words.iter_mut().zip(&mut self.exps) {
            *w = mv.apply(w);
            *e = w.exponent_vector(self.rank).expect("moves preserve rank");
        }
        self.moves.push(mv);
    }

    fn apply_division(&mut self, mv: NielsenMove, quotient: u64, pair: (usize, usize)) {
        self.apply(mv);
        for (k, t) in self.tracks.iter_mut().enumerate() {
            t.steps.push(GrowthStep {
                mv,
                quotient,
                length_after: self.words[k].len(),
                exponents_after: (self.exps[k][pair.0], self.exps[k][pair.1]),
            });
        }
    }

    /// Run Euclid on the pilot word's exponent pair (i, j) until one of the
    /// two sums is zero. No-op when either is zero on entry. The survivor
    /// ends up positive (equal to the gcd) otherwise.
    pub(crate) fn zero_pair(&mut self, pilot: usize, i: usize, j: usize) {
        if self.exps[pilot][i] == 0 || self.exps[pilot][j] == 0 {
            return;
        }
        if self.exps[pilot][i] < 0 {
            self.apply(NielsenMove::Inv { i });
        }
        if self.exps[pilot][j] < 0 {
            self.apply(NielsenMove::Inv { i: j });
        }
        loop {
            let xi = self.exps[pilot][i];
            let xj = self.exps[pilot][j];
            debug_assert!(xi >= 0 && xj >= 0);
            if xi == 0 || xj == 0 {
                break;
            }
            let (acting, victim, c) = if xi < xj {
                (i, j, xj / xi)
            } else if xj < xi {
                (j, i, xi / xj)
            } else {
                // Equal sums: one subtraction finishes. Keep the generator
                // that occurs more often; break occurrence ties toward the
                // lower index.
                let occ = |g: usize| {
                    let (p, n) = self.words[pilot].occurrences(Generator::new(g as u32));
                    p + n
                };
                let survivor = match occ(i).cmp(&occ(j)) {
                    std::cmp::Ordering::Greater => i,
                    std::cmp::Ordering::Less => j,
                    std::cmp::Ordering::Equal => i.min(j),
                };
                let victim = if survivor == i { j } else { i };
                (survivor, victim, 1)
            };
            let mv = NielsenMove::RightMult {
                i: acting,
                j: victim,
                e: -c,
            };
            self.apply_division(mv, c as u64, (i, j));
        }
    }

    /// Zero the pilot's exponent sum at every index but the last, walking
    /// consecutive pairs. The residual (the gcd of the touched sums, up to
    /// sign) sits at `indices.last()` afterwards.
    pub(crate) fn chain(&mut self, pilot: usize, indices: &[usize]) {
        for k in 0..indices.len().saturating_sub(1) {
            let (a, b) = (indices[k], indices[k + 1]);
            if self.exps[pilot][a] == 0 {
                continue;
            }
            self.zero_pair(pilot, a, b);
            if self.exps[pilot][a] != 0 {
                self.apply(NielsenMove::Swap { i: a, j: b });
            }
        }
    }

    pub(crate) fn finish(self) -> (Automorphism, Vec<Word>, Vec<GrowthTrace>) {
        let auto = Automorphism::new(self.rank, self.moves).expect("engine emits valid moves");
        let traces = self
            .tracks
            .into_iter()
            .zip(&self.words)
            .map(|(t, w)| {
                let product_p = t
                    .steps
                    .iter()
                    .map(|s| BigUint::from(s.quotient + 1))
                    .product::<BigUint>()
                    .max(BigUint::one());
                GrowthTrace {
                    initial_length: t.initial_length,
                    steps: t.steps,
                    product_p,
                    final_length: w.len(),
                }
            })
            .collect();
        (auto, self.words, traces)
    }
}

fn check_pair(rank: usize, i: usize, j: usize) -> Result<()> {
    for g in [i, j] {
        if g >= rank {
            return Err(Error::GeneratorOutOfRank { index: g, rank });
        }
    }
    if i == j {
        return Err(Error::InvalidPair { i, j });
    }
    Ok(())
}

/// Drive the exponent sum of `w` at `j` or `i` to zero with Nielsen moves,
/// leaving the gcd of the two sums on the other index. Returns the move
/// sequence, the transformed word, and the division step log.
pub fn zero_pair(
    w: &Word,
    rank: usize,
    i: usize,
    j: usize,
) -> Result<(Automorphism, Word, GrowthTrace)> {
    check_pair(rank, i, j)?;
    let mut engine = Elimination::new(rank, vec![w.clone()])?;
    engine.zero_pair(0, i, j);
    let (auto, mut words, mut traces) = engine.finish();
    Ok((auto, words.pop().unwrap(), traces.pop().unwrap()))
}

/// Zero every exponent sum of `w` except the one at `order.last()`, visiting
/// generators in the given order. `order` must be a permutation of
/// `0..order.len()` with length at least 2.
pub fn zero_all_but_one(w: &Word, order: &[usize]) -> Result<(Automorphism, Word, GrowthTrace)> {
    let rank = order.len();
    if rank < 2 {
        return Err(Error::InvalidArgument(
            "need at least two generators to eliminate into".into(),
        ));
    }
    let mut seen = vec![false; rank];
    for &g in order {
        if g >= rank {
            return Err(Error::GeneratorOutOfRank { index: g, rank });
        }
        if std::mem::replace(&mut seen[g], true) {
            return Err(Error::InvalidArgument(format!(
                "generator {g} appears twice in the elimination order"
            )));
        }
    }
    let mut engine = Elimination::new(rank, vec![w.clone()])?;
    engine.chain(0, order);
    let (auto, mut words, mut traces) = engine.finish();
    Ok((auto, words.pop().unwrap(), traces.pop().unwrap()))
}

/// One row of a growth experiment.
#[derive(Debug, Clone)]
pub struct GrowthSample {
    /// Requested (and actual) initial word length.
    pub length: usize,
    pub final_length: usize,
    pub steps: usize,
    pub product_p: BigUint,
    /// Master seed of the experiment, echoed for reproducibility.
    pub seed: u64,
    /// Sample number within this length.
    pub sample: usize,
    pub trace: GrowthTrace,
}

/// Run the full elimination on uniform random reduced words of each length,
/// `samples_per_length` times per length. Deterministic in `seed`: sample
/// `s` of length index `li` uses stream `(li << 32) | s` of a ChaCha8
/// generator seeded with `seed`. `jobs` limits the thread pool (0 picks the
/// default). Zero lengths are skipped.
pub fn growth_experiment(
    rank: usize,
    lengths: &[usize],
    samples_per_length: usize,
    seed: u64,
    jobs: usize,
) -> Vec<GrowthSample> {
    assert!(rank >= 2, "growth experiment needs rank at least 2");
    let order: Vec<usize> = (0..rank).collect();
    let tasks: Vec<(usize, usize)> = lengths
        .iter()
        .enumerate()
        .filter(|(_, &len)| len > 0)
        .flat_map(|(li, _)| (0..samples_per_length).map(move |s| (li, s)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("thread pool");
    pool.install(|| {
        tasks
            .par_iter()
            .map(|&(li, s)| {
                let len = lengths[li];
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(((li as u64) << 32) | s as u64);
                let w = random_reduced_with(rank, len, &mut rng);
                let (_, _, trace) = zero_all_but_one(&w, &order).expect("random word fits rank");
                GrowthSample {
                    length: len,
                    final_length: trace.final_length,
                    steps: trace.steps.len(),
                    product_p: trace.product_p.clone(),
                    seed,
                    sample: s,
                    trace,
                }
            })
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::{Letter, Sign};

    fn l(v: i32) -> Letter {
        Letter::new(
            Generator::new(v.unsigned_abs() - 1),
            if v > 0 { Sign::Plus } else { Sign::Minus },
        )
    }

    fn w(vals: &[i32]) -> Word {
        Word::reduce(vals.iter().map(|&v| l(v)))
    }

    fn quotients(t: &GrowthTrace) -> Vec<u64> {
        t.steps.iter().map(|s| s.quotient).collect()
    }

    #[test]
    fn worked_pair_elimination() {
        // x y x y y has exponent sums (2, 3)
        let word = w(&[1, 2, 1, 2, 2]);
        let (auto, out, trace) = zero_pair(&word, 2, 0, 1).unwrap();
        assert_eq!(
            auto.moves(),
            &[
                NielsenMove::RightMult { i: 0, j: 1, e: -1 },
                NielsenMove::RightMult { i: 1, j: 0, e: -2 },
            ]
        );
        assert_eq!(out, w(&[1, 1, 2, -1, -1])); // x x y x^-2
        assert_eq!(out.exponent_vector(2).unwrap(), vec![0, 1]);
        assert_eq!(trace.initial_length, 5);
        assert_eq!(trace.final_length, 5);
        assert_eq!(quotients(&trace), vec![1, 2]);
        assert_eq!(trace.product_p, BigUint::from(6u32));
        assert_eq!(trace.steps[0].length_after, 3);
        assert_eq!(trace.steps[0].exponents_after, (2, 1));
        assert_eq!(trace.steps[1].length_after, 5);
        assert_eq!(trace.steps[1].exponents_after, (0, 1));
        assert_eq!(auto.apply(&word).unwrap(), out);
    }

    #[test]
    fn consecutive_fibonacci_sums_are_the_slow_case() {
        // Exponent pair (F_12, F_13) = (144, 233) forces quotient 1 at
        // every step except the last.
        let word = Word::gen_pow(0, 144).concat(&Word::gen_pow(1, 233));
        let (_, out, trace) = zero_pair(&word, 2, 0, 1).unwrap();
        assert_eq!(trace.steps.len(), 11);
        assert_eq!(quotients(&trace), vec![1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 2]);
        assert_eq!(trace.product_p, BigUint::from(3072u32)); // 2^10 * 3
        assert_eq!(out.exponent_vector(2).unwrap(), vec![1, 0]);
        // cumulative growth bound
        let bound = &trace.product_p * BigUint::from(trace.initial_length);
        assert!(BigUint::from(trace.final_length) <= bound);
    }

    #[test]
    fn zero_exponent_short_circuits() {
        let word = w(&[2, 2, 2, 2, 2]); // y^5, x sum is 0
        let (auto, out, trace) = zero_pair(&word, 2, 0, 1).unwrap();
        assert!(auto.is_identity());
        assert_eq!(out, word);
        assert!(trace.steps.is_empty());
        assert_eq!(trace.product_p, BigUint::one());
    }

    #[test]
    fn negative_sums_get_normalized_first() {
        let word = Word::gen_pow(0, -4).concat(&Word::gen_pow(1, 6));
        let (auto, out, trace) = zero_pair(&word, 2, 0, 1).unwrap();
        assert_eq!(auto.moves()[0], NielsenMove::Inv { i: 0 });
        assert_eq!(quotients(&trace), vec![1, 2]);
        assert_eq!(out.exponent_vector(2).unwrap(), vec![0, 2]); // gcd(4, 6)
    }

    #[test]
    fn equal_sums_keep_the_busier_generator() {
        // sums (2, 2); generator 0 occurs 4 times, generator 1 twice
        let busy_first = w(&[1, 1, 1, 2, 2, -1]);
        let (_, out, trace) = zero_pair(&busy_first, 2, 0, 1).unwrap();
        assert_eq!(quotients(&trace), vec![1]);
        assert_eq!(out.exponent_vector(2).unwrap(), vec![2, 0]);

        // mirrored: generator 1 is busier, so it survives
        let busy_second = w(&[2, 2, 2, 1, 1, -2]);
        let (_, out, _) = zero_pair(&busy_second, 2, 0, 1).unwrap();
        assert_eq!(out.exponent_vector(2).unwrap(), vec![0, 2]);

        // full tie: lower index survives
        let tied = w(&[1, 1, 2, 2]);
        let (_, out, trace) = zero_pair(&tied, 2, 0, 1).unwrap();
        assert_eq!(out.exponent_vector(2).unwrap(), vec![2, 0]);
        assert_eq!(trace.product_p, BigUint::from(2u32));
    }

    #[test]
    fn chain_pushes_residual_to_the_last_generator() {
        let word = Word::gen_pow(0, 6)
            .concat(&Word::gen_pow(1, 10))
            .concat(&Word::gen_pow(2, 15));
        let (auto, out, trace) = zero_all_but_one(&word, &[0, 1, 2]).unwrap();
        assert_eq!(out.exponent_vector(3).unwrap(), vec![0, 0, 1]); // gcd = 1
        assert_eq!(quotients(&trace), vec![1, 1, 2, 7, 2]);
        assert_eq!(trace.product_p, BigUint::from(288u32));
        assert_eq!(auto.apply(&word).unwrap(), out);
        // the (0,1) pair left its residual on 0, so a swap was inserted
        assert!(auto
            .moves()
            .iter()
            .any(|m| matches!(m, NielsenMove::Swap { i: 0, j: 1 })));
    }

    #[test]
    fn chain_skips_already_zero_entries() {
        // x sum zero, y and z nonzero
        let word = w(&[1, -1])
            .concat(&Word::gen_pow(1, 4))
            .concat(&Word::gen_pow(2, 6));
        let (_, out, _) = zero_all_but_one(&word, &[0, 1, 2]).unwrap();
        assert_eq!(out.exponent_vector(3).unwrap(), vec![0, 0, 2]);
    }

    #[test]
    fn chain_moves_a_lone_residual_by_swapping() {
        // only the first generator has nonzero sum; a pure swap chain must
        // carry it to the end
        let word = Word::gen_pow(0, 5);
        let (auto, out, trace) = zero_all_but_one(&word, &[0, 1, 2]).unwrap();
        assert_eq!(out.exponent_vector(3).unwrap(), vec![0, 0, 5]);
        assert!(trace.steps.is_empty());
        assert_eq!(auto.moves().len(), 2); // two swaps, no divisions
    }

    #[test]
    fn argument_validation() {
        let word = w(&[1]);
        assert!(zero_pair(&word, 2, 0, 0).is_err());
        assert!(zero_pair(&word, 2, 0, 2).is_err());
        assert!(zero_all_but_one(&word, &[0]).is_err());
        assert!(zero_all_but_one(&word, &[0, 0]).is_err());
        assert!(zero_all_but_one(&word, &[0, 2]).is_err());
        // word outside the claimed rank
        assert!(zero_pair(&w(&[3]), 2, 0, 1).is_err());
    }

    #[test]
    fn growth_experiment_is_deterministic_and_complete() {
        let a = growth_experiment(3, &[10, 0, 25], 4, 99, 2);
        let b = growth_experiment(3, &[10, 0, 25], 4, 99, 1);
        assert_eq!(a.len(), 8); // zero length skipped
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.length, y.length);
            assert_eq!(x.sample, y.sample);
            assert_eq!(x.final_length, y.final_length);
            assert_eq!(x.product_p, y.product_p);
            assert_eq!(x.seed, 99);
        }
    }

    mod props {
        use super::*;
        use num_integer::Integer;
        use proptest::prelude::*;

        fn arb_word(rank: i32) -> impl Strategy<Value = Word> {
            prop::collection::vec((1..=rank, prop::bool::ANY), 0..50).prop_map(|ls| {
                Word::reduce(ls.into_iter().map(|(g, s)| {
                    Letter::new(
                        Generator::new(g as u32 - 1),
                        if s { Sign::Plus } else { Sign::Minus },
                    )
                }))
            })
        }

        fn check_growth_bounds(trace: &GrowthTrace) {
            let mut prev = trace.initial_length;
            let mut product = BigUint::one();
            for step in &trace.steps {
                assert!(step.length_after <= (step.quotient as usize + 1) * prev);
                product *= BigUint::from(step.quotient + 1);
                prev = step.length_after;
            }
            assert_eq!(product.max(BigUint::one()), trace.product_p);
        }

        proptest! {
            #[test]
            fn pair_elimination_computes_gcd(word in arb_word(2)) {
                let before = word.exponent_vector(2).unwrap();
                let (auto, out, trace) = zero_pair(&word, 2, 0, 1).unwrap();
                let after = out.exponent_vector(2).unwrap();
                prop_assert_eq!(auto.apply(&word).unwrap(), out.clone());
                if before[0] == 0 || before[1] == 0 {
                    prop_assert_eq!(&word, &out);
                } else {
                    let g = before[0].abs().gcd(&before[1].abs());
                    prop_assert!(after.contains(&0));
                    prop_assert_eq!(after[0] + after[1], g);
                }
                check_growth_bounds(&trace);
            }

            #[test]
            fn two_step_halving(word in arb_word(2)) {
                let (_, _, trace) = zero_pair(&word, 2, 0, 1).unwrap();
                let entry = word.exponent_vector(2).unwrap();
                let mut maxima = vec![entry[0].abs().max(entry[1].abs())];
                for step in &trace.steps {
                    let (a, b) = step.exponents_after;
                    maxima.push(a.abs().max(b.abs()));
                }
                for k in 2..maxima.len() {
                    prop_assert!(2 * maxima[k] <= maxima[k - 2]);
                }
            }

            #[test]
            fn full_chain_leaves_single_gcd_residual(word in arb_word(3)) {
                let before = word.exponent_vector(3).unwrap();
                let (auto, out, trace) = zero_all_but_one(&word, &[0, 1, 2]).unwrap();
                let after = out.exponent_vector(3).unwrap();
                prop_assert_eq!(auto.apply(&word).unwrap(), out);
                prop_assert_eq!(after[0], 0);
                prop_assert_eq!(after[1], 0);
                let g = before.iter().fold(0i64, |acc, x| acc.gcd(x));
                prop_assert_eq!(after[2].abs(), g);
                check_growth_bounds(&trace);
            }

            #[test]
            fn elimination_order_is_respected(word in arb_word(3), perm in 0..6usize) {
                let orders = [
                    [0, 1, 2], [0, 2, 1], [1, 0, 2],
                    [1, 2, 0], [2, 0, 1], [2, 1, 0],
                ];
                let order = orders[perm];
                let (_, out, _) = zero_all_but_one(&word, &order).unwrap();
                let after = out.exponent_vector(3).unwrap();
                prop_assert_eq!(after[order[0]], 0);
                prop_assert_eq!(after[order[1]], 0);
            }
        }
    }
}
