//! Finite cyclic covers and subgroup presentations.
//!
//! The kernel of the map onto Z/k that sends the distinguished generator to
//! 1 and every other generator to 0 is a finite index subgroup. Its coset
//! table is trivial to write down, and a generic Reidemeister-Schreier
//! rewrite over any complete table turns it into an explicit presentation
//! whose generator and relator counts follow the Schreier index formulas.

use crate::error::{Error, Result};
use crate::goodpres::GoodPresentation;
use crate::presentation::{format_word, parse_word_tokens, ExponentMatrix, Presentation};
use crate::word::{Generator, Letter, ReducedBuf, Sign, Word};
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use std::fmt;

/// Complete coset table for a transitive action: one row per coset, one
/// column per signed generator, entry = target coset. Coset 0 is the
/// subgroup itself. Signed generator columns are mutually inverse
/// permutations and every coset is reachable from 0, both validated on
/// construction, so an incomplete or disconnected table cannot exist as a
/// value of this type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetTable {
    rank: usize,
    rows: Vec<Vec<usize>>,
}

impl CosetTable {
    /// Column of generator `g` walked with `sign`.
    fn col(g: usize, sign: Sign) -> usize {
        2 * g
            + match sign {
                Sign::Plus => 0,
                Sign::Minus => 1,
            }
    }

    pub fn new(rank: usize, rows: Vec<Vec<usize>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::BadTable("no cosets".into()));
        }
        for (c, row) in rows.iter().enumerate() {
            if row.len() != 2 * rank {
                return Err(Error::BadTable(format!(
                    "coset {c} has {} entries, expected {}",
                    row.len(),
                    2 * rank
                )));
            }
            if let Some(&bad) = row.iter().find(|&&t| t >= n) {
                return Err(Error::BadTable(format!(
                    "coset {c} points at nonexistent coset {bad}"
                )));
            }
        }
        let table = CosetTable { rank, rows };
        for g in 0..rank {
            for c in 0..n {
                let fwd = table.follow(c, g, Sign::Plus);
                let bwd = table.follow(c, g, Sign::Minus);
                if table.follow(fwd, g, Sign::Minus) != c || table.follow(bwd, g, Sign::Plus) != c {
                    return Err(Error::BadTable(format!(
                        "generator {g} columns are not mutually inverse at coset {c}"
                    )));
                }
            }
        }
        // reachability from coset 0; positive edges suffice because each
        // column is a permutation of a finite set
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(c) = queue.pop_front() {
            for g in 0..rank {
                let t = table.follow(c, g, Sign::Plus);
                if !seen[t] {
                    seen[t] = true;
                    queue.push_back(t);
                }
            }
        }
        if let Some(orphan) = seen.iter().position(|s| !s) {
            return Err(Error::BadTable(format!(
                "coset {orphan} unreachable from coset 0"
            )));
        }
        Ok(table)
    }

    /// Number of cosets.
    pub fn index(&self) -> usize {
        self.rows.len()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn follow(&self, coset: usize, g: usize, sign: Sign) -> usize {
        self.rows[coset][Self::col(g, sign)]
    }

    /// Walk a word from a starting coset.
    pub fn trace_from(&self, coset: usize, w: &Word) -> usize {
        w.letters().iter().fold(coset, |c, l| {
            self.follow(c, l.generator().index(), l.sign())
        })
    }

    /// Row-major flat form, for ordering and serialization.
    pub fn flat(&self) -> Vec<usize> {
        self.rows.iter().flatten().copied().collect()
    }
}

/// Coset table of the kernel of base group -> Z/k, distinguished generator
/// to 1, everything else to 0. The distinguished column is the k-cycle,
/// all other columns are the identity. Fails if some relator does not
/// close a loop, i.e. has distinguished exponent sum not divisible by k.
pub fn zk_coset_table(g: &GoodPresentation, k: usize) -> Result<CosetTable> {
    if k == 0 {
        return Err(Error::InvalidArgument("index k must be at least 1".into()));
    }
    let n = g.base.rank();
    let t = g.t_index;
    if t >= n {
        return Err(Error::GeneratorOutOfRank { index: t, rank: n });
    }
    let rows = (0..k)
        .map(|j| {
            (0..n)
                .flat_map(|gen| {
                    if gen == t {
                        [(j + 1) % k, (j + k - 1) % k]
                    } else {
                        [j, j]
                    }
                })
                .collect()
        })
        .collect();
    let table = CosetTable::new(n, rows).expect("cycle and identity columns are valid");
    for (idx, r) in g.base.relators().iter().enumerate() {
        for c in 0..k {
            if table.trace_from(c, r) != c {
                let sum = r.exponent_vector(n).expect("relator fits rank")[t];
                return Err(Error::NotGood { relator: idx, sum });
            }
        }
    }
    Ok(table)
}

/// One surviving Schreier generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchreierGenerator {
    pub name: String,
    /// Generator of the base group this label came from.
    pub base_gen: usize,
    /// Coset at which the positive edge leaves.
    pub coset: usize,
}

/// Presentation of a finite index subgroup in Schreier generators,
/// together with the inclusion words expressing each generator inside the
/// base group. Unlike [`Presentation`], relators may be empty words: a
/// rewrite can die entirely, and the relator count bookkeeping must still
/// see it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupPresentation {
    labels: Vec<SchreierGenerator>,
    relators: Vec<Word>,
    inclusions: Vec<Word>,
    index: usize,
    base_rank: usize,
}

impl SubgroupPresentation {
    pub fn new(
        labels: Vec<SchreierGenerator>,
        relators: Vec<Word>,
        inclusions: Vec<Word>,
        index: usize,
        base_rank: usize,
    ) -> Result<Self> {
        if index == 0 {
            return Err(Error::InvalidArgument("index must be at least 1".into()));
        }
        if inclusions.len() != labels.len() {
            return Err(Error::InvalidArgument(format!(
                "{} labels but {} inclusion words",
                labels.len(),
                inclusions.len()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for l in &labels {
            if l.base_gen >= base_rank || l.coset >= index {
                return Err(Error::InvalidArgument(format!(
                    "label {} addresses generator {} at coset {}",
                    l.name, l.base_gen, l.coset
                )));
            }
            if !seen.insert(l.name.as_str()) {
                return Err(Error::InvalidArgument(format!(
                    "duplicate label name {:?}",
                    l.name
                )));
            }
        }
        for r in &relators {
            if !r.fits_rank(labels.len()) {
                return Err(Error::GeneratorOutOfRank {
                    index: r.max_generator_index().unwrap_or(0),
                    rank: labels.len(),
                });
            }
        }
        for w in &inclusions {
            if !w.fits_rank(base_rank) {
                return Err(Error::GeneratorOutOfRank {
                    index: w.max_generator_index().unwrap_or(0),
                    rank: base_rank,
                });
            }
        }
        Ok(SubgroupPresentation {
            labels,
            relators,
            inclusions,
            index,
            base_rank,
        })
    }

    pub fn labels(&self) -> &[SchreierGenerator] {
        &self.labels
    }

    pub fn label_names(&self) -> Vec<String> {
        self.labels.iter().map(|l| l.name.clone()).collect()
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    /// Inclusion word of label `i` in the base group's generators.
    pub fn inclusions(&self) -> &[Word] {
        &self.inclusions
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn base_rank(&self) -> usize {
        self.base_rank
    }

    pub fn generator_count(&self) -> usize {
        self.labels.len()
    }

    pub fn relator_count(&self) -> usize {
        self.relators.len()
    }

    pub fn deficiency(&self) -> i64 {
        self.labels.len() as i64 - self.relators.len() as i64
    }

    pub fn exponent_matrix(&self) -> ExponentMatrix {
        let cols = self.labels.len();
        let rows = self
            .relators
            .iter()
            .map(|r| r.exponent_vector(cols).expect("relators fit labels"))
            .collect();
        ExponentMatrix::from_rows(rows, cols)
    }

    /// Same line format as [`Presentation::to_text`]; empty relators render
    /// as bare `relator:` lines, so this is display output, not input.
    pub fn to_text(&self) -> String {
        let names = self.label_names();
        let mut out = String::new();
        out.push_str("generators:");
        for n in &names {
            out.push(' ');
            out.push_str(n);
        }
        out.push('\n');
        for r in &self.relators {
            let body = format_word(r, &names);
            if body.is_empty() {
                out.push_str("relator:\n");
            } else {
                out.push_str(&format!("relator: {body}\n"));
            }
        }
        out
    }
}

impl fmt::Display for SubgroupPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Classical subgroup presentation rewriting over a complete coset table.
///
/// The Schreier transversal comes from a breadth-first search along
/// positive edges from coset 0 (positive edges reach everything: a
/// permutation's inverse is one of its positive powers). Transversal
/// representatives are then positive words, so an edge is in the BFS tree
/// exactly when its Schreier generator is trivial; the survivors are
/// labeled `s_<gen>_<coset>` in (generator, coset) order. Relators are
/// rewritten for every (relator, coset) pair in that order and freely
/// reduced; empty rewrites are kept.
pub fn reidemeister_schreier(p: &Presentation, table: &CosetTable) -> Result<SubgroupPresentation> {
    if table.rank() != p.rank() {
        return Err(Error::RankMismatch {
            expected: p.rank(),
            got: table.rank(),
        });
    }
    let rank = p.rank();
    let index = table.index();

    let mut reps: Vec<Option<Word>> = vec![None; index];
    let mut tree = vec![vec![false; rank]; index];
    reps[0] = Some(Word::empty());
    let mut queue = VecDeque::from([0usize]);
    while let Some(c) = queue.pop_front() {
        for g in 0..rank {
            let target = table.follow(c, g, Sign::Plus);
            if reps[target].is_none() {
                let rep = reps[c].as_ref().unwrap().concat(&Word::gen(g as u32));
                reps[target] = Some(rep);
                tree[c][g] = true;
                queue.push_back(target);
            }
        }
    }
    let reps: Vec<Word> = reps
        .into_iter()
        .map(|r| r.expect("table is transitive"))
        .collect();

    let mut labels = Vec::new();
    let mut inclusions = Vec::new();
    let mut label_of = vec![vec![None; rank]; index];
    for g in 0..rank {
        for c in 0..index {
            if tree[c][g] {
                continue;
            }
            let target = table.follow(c, g, Sign::Plus);
            let word = reps[c]
                .concat(&Word::gen(g as u32))
                .concat(&reps[target].inverse());
            label_of[c][g] = Some(labels.len() as u32);
            labels.push(SchreierGenerator {
                name: format!("s_{g}_{c}"),
                base_gen: g,
                coset: c,
            });
            inclusions.push(word);
        }
    }

    let mut relators = Vec::new();
    for (r_idx, r) in p.relators().iter().enumerate() {
        for start in 0..index {
            let mut cur = start;
            let mut buf = ReducedBuf::with_capacity(r.len());
            for l in r.letters() {
                let g = l.generator().index();
                match l.sign() {
                    Sign::Plus => {
                        if let Some(id) = label_of[cur][g] {
                            buf.push(Letter::new(Generator::new(id), Sign::Plus));
                        }
                        cur = table.follow(cur, g, Sign::Plus);
                    }
                    Sign::Minus => {
                        let prev = table.follow(cur, g, Sign::Minus);
                        if let Some(id) = label_of[prev][g] {
                            buf.push(Letter::new(Generator::new(id), Sign::Minus));
                        }
                        cur = prev;
                    }
                }
            }
            if cur != start {
                return Err(Error::BadTable(format!(
                    "relator {r_idx} does not close a loop at coset {start}"
                )));
            }
            relators.push(buf.into_word());
        }
    }

    SubgroupPresentation::new(labels, relators, inclusions, index, rank)
}

/// Transversal representatives of the table used by
/// [`reidemeister_schreier`], exposed for spot checks: `reps[c]` carries
/// coset 0 to coset c.
pub fn schreier_transversal(table: &CosetTable) -> Vec<Word> {
    let mut reps: Vec<Option<Word>> = vec![None; table.index()];
    reps[0] = Some(Word::empty());
    let mut queue = VecDeque::from([0usize]);
    while let Some(c) = queue.pop_front() {
        for g in 0..table.rank() {
            let target = table.follow(c, g, Sign::Plus);
            if reps[target].is_none() {
                reps[target] = Some(reps[c].as_ref().unwrap().concat(&Word::gen(g as u32)));
                queue.push_back(target);
            }
        }
    }
    reps.into_iter()
        .map(|r| r.expect("table is transitive"))
        .collect()
}

/// Build the index-k cyclic cover subgroup of a good presentation: the
/// coset table, the rewrite, and the conventional names `tau` for the
/// surviving distinguished-generator label and `y_<gen>_<coset>` for the
/// rest.
pub fn cyclic_cover(g: &GoodPresentation, k: usize) -> Result<SubgroupPresentation> {
    let table = zk_coset_table(g, k)?;
    let sub = reidemeister_schreier(&g.base, &table)?;
    let labels = sub
        .labels
        .iter()
        .map(|l| {
            let name = if l.base_gen == g.t_index {
                "tau".to_string()
            } else {
                format!("y_{}_{}", l.base_gen, l.coset)
            };
            SchreierGenerator { name, ..l.clone() }
        })
        .collect();
    SubgroupPresentation::new(
        labels,
        sub.relators,
        sub.inclusions,
        sub.index,
        sub.base_rank,
    )
}

/// Wire format of a subgroup presentation. Relator strings are spelled in
/// the label names, inclusion strings in the base generator names carried
/// alongside, and the empty word is the empty string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupDto {
    pub base_generators: Vec<String>,
    pub labels: Vec<LabelDto>,
    pub relators: Vec<String>,
    pub inclusions: Vec<String>,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelDto {
    pub name: String,
    pub base_gen: usize,
    pub coset: usize,
}

impl SubgroupDto {
    pub fn new(sub: &SubgroupPresentation, base_names: &[String]) -> Self {
        debug_assert_eq!(base_names.len(), sub.base_rank);
        let label_names = sub.label_names();
        SubgroupDto {
            base_generators: base_names.to_vec(),
            labels: sub
                .labels
                .iter()
                .map(|l| LabelDto {
                    name: l.name.clone(),
                    base_gen: l.base_gen,
                    coset: l.coset,
                })
                .collect(),
            relators: sub
                .relators
                .iter()
                .map(|r| format_word(r, &label_names))
                .collect(),
            inclusions: sub
                .inclusions
                .iter()
                .map(|w| format_word(w, base_names))
                .collect(),
            index: sub.index,
        }
    }
}

impl TryFrom<&SubgroupDto> for SubgroupPresentation {
    type Error = Error;

    fn try_from(dto: &SubgroupDto) -> Result<Self> {
        let label_names: Vec<String> = dto.labels.iter().map(|l| l.name.clone()).collect();
        let labels = dto
            .labels
            .iter()
            .map(|l| SchreierGenerator {
                name: l.name.clone(),
                base_gen: l.base_gen,
                coset: l.coset,
            })
            .collect();
        let relators = dto
            .relators
            .iter()
            .map(|s| parse_word_tokens(s, &label_names).map_err(Error::from))
            .collect::<Result<Vec<Word>>>()?;
        let inclusions = dto
            .inclusions
            .iter()
            .map(|s| parse_word_tokens(s, &dto.base_generators).map_err(Error::from))
            .collect::<Result<Vec<Word>>>()?;
        SubgroupPresentation::new(
            labels,
            relators,
            inclusions,
            dto.index,
            dto.base_generators.len(),
        )
    }
}

/// Audit a claimed cyclic cover subgroup against its good presentation:
/// every inclusion word lies in the kernel of the Z/k map (distinguished
/// exponent sum divisible by k), the Schreier counts hold, and for a
/// deficiency >= 2 base the subgroup deficiency identity
/// `(n - 1 - m)k + 1 >= k + 1` holds.
pub fn verify_subgroup(sub: &SubgroupPresentation, g: &GoodPresentation, k: usize) -> bool {
    let n = g.base.rank();
    let m = g.base.relators().len();
    if k == 0 || sub.index() != k || sub.base_rank() != n || g.t_index >= n {
        return false;
    }
    for w in sub.inclusions() {
        match w.exponent_vector(n) {
            Ok(v) => {
                if v[g.t_index].rem_euclid(k as i64) != 0 {
                    return false;
                }
            }
            Err(_) => return false,
        }
    }
    if sub.generator_count() != (n - 1) * k + 1 || sub.relator_count() != m * k {
        return false;
    }
    if g.base.is_bp() {
        let expected = (n as i64 - 1 - m as i64) * k as i64 + 1;
        if sub.deficiency() != expected || expected < k as i64 + 1 {
            return false;
        }
    }
    true
}
