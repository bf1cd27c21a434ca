//! Exhaustive search for the conjugacy classes of subgroups up to a given
//! index, as complete coset tables.
//!
//! A transitive action of the presented group on d points is a complete
//! coset table of d rows in which every relator traces back to its start
//! from every coset; pointing the action at coset 0 picks out the subgroup
//! stabilizing it, and relabeling the cosets moves between conjugates. The
//! search below fills table slots depth first, propagates forced entries by
//! scanning relators, and keeps exactly one representative per conjugacy
//! class: the table that is lexicographically minimal among all relabelings
//! rooted at each of its cosets.

use crate::cover::CosetTable;
use crate::error::{Error, Result};
use crate::presentation::Presentation;
use crate::word::Word;

const UNDEF: usize = usize::MAX;

/// Relator as a sequence of (forward column, backward column) pairs.
/// Columns pair up as 2g for a positive edge and 2g+1 for its inverse, so
/// flipping the low bit flips the direction.
fn columns_of(w: &Word) -> Vec<(usize, usize)> {
    w.letters()
        .iter()
        .map(|l| {
            let fwd = 2 * l.generator().index() + usize::from(l.sign() == crate::word::Sign::Minus);
            (fwd, fwd ^ 1)
        })
        .collect()
}

enum Scan {
    Complete,
    Deduction(usize, usize, usize),
    Gap,
    Dead,
}

/// Trace one relator loop at one coset as far as the partial table allows,
/// from both ends.
fn scan(table: &[Vec<usize>], r: &[(usize, usize)], start: usize) -> Scan {
    let len = r.len();
    let mut pos = 0;
    let mut cur = start;
    while pos < len {
        let next = table[cur][r[pos].0];
        if next == UNDEF {
            break;
        }
        cur = next;
        pos += 1;
    }
    if pos == len {
        return if cur == start {
            Scan::Complete
        } else {
            Scan::Dead
        };
    }
    let mut bpos = len;
    let mut bcur = start;
    while bpos > pos {
        let prev = table[bcur][r[bpos - 1].1];
        if prev == UNDEF {
            break;
        }
        bcur = prev;
        bpos -= 1;
    }
    match bpos - pos {
        0 => {
            // both walks name the coset at this position; a mismatch here
            // can never be repaired because slots are immutable
            if cur == bcur {
                Scan::Gap
            } else {
                Scan::Dead
            }
        }
        1 => Scan::Deduction(cur, r[pos].0, bcur),
        _ => Scan::Gap,
    }
}

struct Search {
    cols: usize,
    max_index: usize,
    relators: Vec<Vec<(usize, usize)>>,
    table: Vec<Vec<usize>>,
    /// Slots filled since the enclosing guess, for backtracking.
    trail: Vec<(usize, usize)>,
    found: Vec<Vec<Vec<usize>>>,
}

impl Search {
    fn define(&mut self, c: usize, col: usize, d: usize) {
        debug_assert_eq!(self.table[c][col], UNDEF);
        debug_assert_eq!(self.table[d][col ^ 1], UNDEF);
        self.table[c][col] = d;
        self.table[d][col ^ 1] = c;
        self.trail.push((c, col));
        self.trail.push((d, col ^ 1));
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (c, col) = self.trail.pop().expect("trail entry");
            self.table[c][col] = UNDEF;
        }
    }

    /// Re-scan every relator at every coset until nothing new is forced.
    /// Returns false when some relator can no longer close.
    fn propagate(&mut self) -> bool {
        loop {
            let mut changed = false;
            for ri in 0..self.relators.len() {
                for c in 0..self.table.len() {
                    match scan(&self.table, &self.relators[ri], c) {
                        Scan::Complete | Scan::Gap => {}
                        Scan::Dead => return false,
                        Scan::Deduction(a, col, b) => {
                            self.define(a, col, b);
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn first_undefined(&self) -> Option<(usize, usize)> {
        for (c, row) in self.table.iter().enumerate() {
            for (col, &t) in row.iter().enumerate() {
                if t == UNDEF {
                    return Some((c, col));
                }
            }
        }
        None
    }

    fn dfs(&mut self) {
        let Some((c, col)) = self.first_undefined() else {
            self.emit();
            return;
        };
        for d in 0..self.table.len() {
            if self.table[d][col ^ 1] == UNDEF {
                let mark = self.trail.len();
                self.define(c, col, d);
                if self.propagate() {
                    self.dfs();
                }
                self.undo_to(mark);
            }
        }
        if self.table.len() < self.max_index {
            let d = self.table.len();
            self.table.push(vec![UNDEF; self.cols]);
            let mark = self.trail.len();
            self.define(c, col, d);
            if self.propagate() {
                self.dfs();
            }
            self.undo_to(mark);
            self.table.pop();
        }
    }

    fn emit(&mut self) {
        debug_assert!(self.relator_closed());
        let flat: Vec<usize> = self.table.iter().flatten().copied().collect();
        debug_assert_eq!(
            relabeled_from(&self.table, 0),
            flat,
            "new cosets are numbered in scan order, so root 0 reproduces the table"
        );
        for root in 1..self.table.len() {
            if relabeled_from(&self.table, root) < flat {
                return; // a conjugate representative is smaller; skip
            }
        }
        self.found.push(self.table.clone());
    }

    fn relator_closed(&self) -> bool {
        self.relators.iter().all(|r| {
            (0..self.table.len()).all(|c| {
                let end = r.iter().fold(c, |cur, &(fwd, _)| self.table[cur][fwd]);
                end == c
            })
        })
    }
}

/// Relabel a complete table so `root` becomes coset 0 and every other coset
/// is numbered at its first appearance in row-scan order. The result is the
/// lexicographically smallest flat table among all relabelings sending
/// `root` to 0, and it presents the same subgroup as `root`'s stabilizer.
pub(crate) fn relabeled_from(rows: &[Vec<usize>], root: usize) -> Vec<usize> {
    let n = rows.len();
    let cols = rows[0].len();
    let mut to_new = vec![UNDEF; n];
    let mut order = Vec::with_capacity(n);
    to_new[root] = 0;
    order.push(root);
    let mut scanned = 0;
    while scanned < order.len() {
        let orig = order[scanned];
        for col in 0..cols {
            let t = rows[orig][col];
            if to_new[t] == UNDEF {
                to_new[t] = order.len();
                order.push(t);
            }
        }
        scanned += 1;
    }
    debug_assert_eq!(order.len(), n, "complete tables are transitive");
    let mut flat = Vec::with_capacity(n * cols);
    for &orig in &order {
        for col in 0..cols {
            flat.push(to_new[rows[orig][col]]);
        }
    }
    flat
}

/// All conjugacy classes of subgroups of index at most `max_index`, one
/// canonical coset table per class, sorted by index and then by flat table.
/// The search defines slots in scan order and never merges cosets, so every
/// complete table it reaches is transitive and relator-closed by
/// construction.
pub fn low_index_subgroups(p: &Presentation, max_index: usize) -> Result<Vec<CosetTable>> {
    if max_index == 0 {
        return Err(Error::InvalidArgument(
            "index bound must be at least 1".into(),
        ));
    }
    let rank = p.rank();
    let relators: Vec<Vec<(usize, usize)>> = p
        .relators()
        .iter()
        .map(|r| columns_of(&r.cyclically_reduced()))
        .filter(|r| !r.is_empty())
        .collect();
    let mut search = Search {
        cols: 2 * rank,
        max_index,
        relators,
        table: vec![vec![UNDEF; 2 * rank]],
        trail: Vec::new(),
        found: Vec::new(),
    };
    if search.propagate() {
        search.dfs();
    }
    let mut tables = search.found;
    tables.sort_by(|a, b| {
        a.len()
            .cmp(&b.len())
            .then_with(|| a.iter().flatten().cmp(b.iter().flatten()))
    });
    Ok(tables
        .into_iter()
        .map(|rows| CosetTable::new(rank, rows).expect("search tables are complete and transitive"))
        .collect())
}
