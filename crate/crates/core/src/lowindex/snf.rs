//! Smith normal form over arbitrary precision integers, and the
//! abelianization invariants it yields.

use crate::presentation::ExponentMatrix;
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

/// Dense integer matrix, row major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigInt>) -> Self {
        assert_eq!(data.len(), rows * cols);
        IntMatrix { rows, cols, data }
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let data = rows
            .iter()
            .flat_map(|r| {
                assert_eq!(r.len(), cols);
                r.iter().map(|&x| BigInt::from(x))
            })
            .collect();
        IntMatrix {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }
}

impl From<&ExponentMatrix> for IntMatrix {
    fn from(m: &ExponentMatrix) -> Self {
        let rows: Vec<Vec<i64>> = (0..m.rows).map(|r| m.row(r).to_vec()).collect();
        IntMatrix::from_i64_rows(&rows)
    }
}

/// Diagonal of the Smith normal form. Entries are nonnegative, zeros come
/// last, and each nonzero entry divides the next.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm {
    pub diagonal: Vec<BigUint>,
    /// Number of nonzero diagonal entries.
    pub rank: usize,
}

/// Reduce to Smith normal form by unimodular row and column operations:
/// pick the smallest nonzero entry as pivot, run Euclid along its row and
/// column, and when the pivot fails to divide some remaining entry, fold
/// that entry's row in and redo. The pivot's absolute value strictly
/// decreases through every retry, so the loop terminates.
pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let (rows, cols) = (m.rows, m.cols);
    let dim = rows.min(cols);
    let mut a: Vec<Vec<BigInt>> = (0..rows)
        .map(|r| (0..cols).map(|c| m.get(r, c).clone()).collect())
        .collect();
    let mut diagonal = vec![BigUint::zero(); dim];
    let mut rank = 0;

    let mut t = 0;
    while t < dim {
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !a[i][j].is_zero()
                    && pivot.is_none_or(|(pi, pj)| a[i][j].abs() < a[pi][pj].abs())
                {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else {
            break; // remaining block is zero
        };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }

        'clear: loop {
            for i in t + 1..rows {
                if !a[i][t].is_zero() {
                    let q = &a[i][t] / &a[t][t];
                    for j in t..cols {
                        let sub = &q * &a[t][j];
                        a[i][j] -= sub;
                    }
                    if !a[i][t].is_zero() {
                        // remainder became the smaller pivot
                        a.swap(i, t);
                        continue 'clear;
                    }
                }
            }
            for j in t + 1..cols {
                if !a[t][j].is_zero() {
                    let q = &a[t][j] / &a[t][t];
                    for row in a.iter_mut().skip(t) {
                        let sub = &q * &row[t];
                        row[j] -= sub;
                    }
                    if !a[t][j].is_zero() {
                        for row in a.iter_mut() {
                            row.swap(j, t);
                        }
                        continue 'clear;
                    }
                }
            }
            break;
        }

        // the pivot must divide everything that is left; otherwise pull the
        // offending row up and shrink the pivot further
        let mut retry = false;
        'divisibility: for i in t + 1..rows {
            for j in t + 1..cols {
                if !(&a[i][j] % &a[t][t]).is_zero() {
                    for j in t..cols {
                        let add = a[i][j].clone();
                        a[t][j] += add;
                    }
                    retry = true;
                    break 'divisibility;
                }
            }
        }
        if retry {
            continue;
        }

        diagonal[t] = a[t][t].abs().to_biguint().expect("absolute value");
        rank += 1;
        t += 1;
    }

    SmithForm { diagonal, rank }
}

/// Free rank and torsion coefficients of the abelianized group presented
/// by an exponent matrix: free rank is generators minus matrix rank,
/// torsion is the diagonal entries exceeding 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Abelianization {
    pub free_rank: usize,
    pub torsion: Vec<BigUint>,
}

/// Anything that can present its relator exponent sums as a matrix.
pub trait ExponentRows {
    fn exponent_rows(&self) -> ExponentMatrix;
}

impl ExponentRows for crate::presentation::Presentation {
    fn exponent_rows(&self) -> ExponentMatrix {
        self.exponent_matrix()
    }
}

impl ExponentRows for crate::cover::SubgroupPresentation {
    fn exponent_rows(&self) -> ExponentMatrix {
        self.exponent_matrix()
    }
}

pub fn abelianization<T: ExponentRows>(x: &T) -> Abelianization {
    let m = x.exponent_rows();
    let snf = smith_normal_form(&IntMatrix::from(&m));
    let one = BigUint::one();
    Abelianization {
        free_rank: m.cols - snf.rank,
        torsion: snf.diagonal.iter().filter(|d| **d > one).cloned().collect(),
    }
}
