//! Certified surjections onto the free group of rank 2.
//!
//! The verifier is the contract: an assignment of target words to the
//! subgroup's generators is a homomorphism exactly when every relator's
//! image freely reduces to nothing, and it is surjective when both target
//! letters appear among the assigned values. The search half only produces
//! candidates; whatever it finds is re-verified, and a failed search proves
//! nothing.

use crate::cover::{cyclic_cover, SubgroupDto, SubgroupPresentation};
use crate::error::{Error, Result};
use crate::goodpres::{make_good, GoodPresentation};
use crate::lowindex::abelianization;
use crate::nielsen::Automorphism;
use crate::presentation::{format_word, parse_word_tokens, Presentation, PresentationDto};
use crate::word::Word;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// The two target letters. Every image word lives in the free group they
/// generate.
fn target_u() -> Word {
    Word::gen(0)
}

fn target_v() -> Word {
    Word::gen(1)
}

fn target_names() -> Vec<String> {
    vec!["u".into(), "v".into()]
}

/// Images of the subgroup generators inside the rank-2 target, positional
/// over the label order. The search only ever assigns the empty word, u,
/// or v, but externally supplied certificates may use arbitrary words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    images: Vec<Word>,
}

impl Assignment {
    pub fn new(images: Vec<Word>) -> Result<Self> {
        if let Some(w) = images.iter().find(|w| !w.fits_rank(2)) {
            return Err(Error::GeneratorOutOfRank {
                index: w.max_generator_index().unwrap_or(0),
                rank: 2,
            });
        }
        Ok(Assignment { images })
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }
}

/// True iff the assignment is a surjection witness for the subgroup: every
/// relator image freely reduces to the empty word (well-defined
/// homomorphism) and both target letters occur among the assigned values
/// (surjectivity). Fails with an error when some label has no image.
pub fn verify_certificate(sub: &SubgroupPresentation, a: &Assignment) -> Result<bool> {
    let labels = sub.labels();
    if a.images.len() < labels.len() {
        return Err(Error::UnassignedLabel {
            label: labels[a.images.len()].name.clone(),
        });
    }
    if a.images.len() > labels.len() {
        return Err(Error::InvalidArgument(format!(
            "{} images for {} labels",
            a.images.len(),
            labels.len()
        )));
    }
    for r in sub.relators() {
        if !r.substitute(&a.images)?.is_empty() {
            return Ok(false);
        }
    }
    Ok(a.images.contains(&target_u()) && a.images.contains(&target_v()))
}

/// What a bounded search produced: the verified assignment, if any, and
/// how many candidate assignments were charged against the budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    pub assignment: Option<Assignment>,
    pub nodes: u64,
}

struct Budget {
    nodes: u64,
    limit: u64,
}

impl Budget {
    fn spend(&mut self) -> bool {
        if self.nodes >= self.limit {
            return false;
        }
        self.nodes += 1;
        true
    }
}

/// Search for a surjection witness, cheapest shapes first:
/// (1) kill all but an ordered pair of labels, mapped to u and v;
/// (2) whole rows and whole columns of the (base generator, coset) label
///     grid as survivors, alternating u and v, distinguished label killed;
/// (3) depth-first assignment of empty/u/v to the labels in order, pruning
///     as soon as a fully assigned relator image fails to vanish.
/// Every candidate costs one node from the budget; a returned assignment
/// always passes [`verify_certificate`]. NotFound proves nothing.
pub fn search_certificate(sub: &SubgroupPresentation, budget: u64) -> SearchOutcome {
    let g = sub.generator_count();
    let mut b = Budget {
        nodes: 0,
        limit: budget,
    };

    let passes = |images: &[Word]| -> bool {
        sub.relators().iter().all(|r| {
            r.substitute(images)
                .expect("images cover labels")
                .is_empty()
        }) && images.contains(&target_u())
            && images.contains(&target_v())
    };
    let accept = |images: Vec<Word>, b: &Budget| -> SearchOutcome {
        let assignment = Assignment::new(images).expect("rank-2 images");
        debug_assert!(verify_certificate(sub, &assignment).expect("images cover labels"));
        SearchOutcome {
            assignment: Some(assignment),
            nodes: b.nodes,
        }
    };

    // phase 1: two survivors
    for p in 0..g {
        for q in 0..g {
            if p == q {
                continue;
            }
            if !b.spend() {
                return SearchOutcome {
                    assignment: None,
                    nodes: b.nodes,
                };
            }
            let mut images = vec![Word::empty(); g];
            images[p] = target_u();
            images[q] = target_v();
            if passes(&images) {
                return accept(images, &b);
            }
        }
    }

    // phase 2: grid patterns over rows (base generator) and columns
    // (coset), skipping the distinguished label
    let mut rows: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut cols: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, l) in sub.labels().iter().enumerate() {
        if l.name == "tau" {
            continue;
        }
        rows.entry(l.base_gen).or_default().push(i);
        cols.entry(l.coset).or_default().push(i);
    }
    for groups in [&rows, &cols] {
        let keys: Vec<usize> = groups.keys().copied().collect();
        let mut candidates: Vec<Vec<Word>> = Vec::new();
        for &k1 in &keys {
            for &k2 in &keys {
                if k1 == k2 {
                    continue;
                }
                let mut images = vec![Word::empty(); g];
                for &i in &groups[&k1] {
                    images[i] = target_u();
                }
                for &i in &groups[&k2] {
                    images[i] = target_v();
                }
                candidates.push(images);
            }
        }
        if keys.len() >= 2 {
            let mut images = vec![Word::empty(); g];
            for (pos, key) in keys.iter().enumerate() {
                let val = if pos % 2 == 0 { target_u() } else { target_v() };
                for &i in &groups[key] {
                    images[i] = val.clone();
                }
            }
            candidates.push(images);
        }
        for images in candidates {
            if !b.spend() {
                return SearchOutcome {
                    assignment: None,
                    nodes: b.nodes,
                };
            }
            if passes(&images) {
                return accept(images, &b);
            }
        }
    }

    // phase 3: backtracking over all {empty, u, v} assignments
    let mut by_max: Vec<Vec<usize>> = vec![Vec::new(); g];
    for (ri, r) in sub.relators().iter().enumerate() {
        if let Some(max) = r.max_generator_index() {
            by_max[max].push(ri);
        }
    }
    enum Dfs {
        Found,
        Exhausted,
        NotHere,
    }
    fn dfs(
        sub: &SubgroupPresentation,
        by_max: &[Vec<usize>],
        images: &mut Vec<Word>,
        level: usize,
        b: &mut Budget,
    ) -> Dfs {
        if level == images.len() {
            return if images.contains(&target_u()) && images.contains(&target_v()) {
                Dfs::Found
            } else {
                Dfs::NotHere
            };
        }
        for value in [Word::empty(), target_u(), target_v()] {
            if !b.spend() {
                return Dfs::Exhausted;
            }
            images[level] = value;
            let consistent = by_max[level].iter().all(|&ri| {
                sub.relators()[ri]
                    .substitute(&images[..=level])
                    .expect("relator letters stay within assigned prefix")
                    .is_empty()
            });
            if consistent {
                match dfs(sub, by_max, images, level + 1, b) {
                    Dfs::NotHere => {}
                    other => return other,
                }
            }
        }
        images[level] = Word::empty();
        Dfs::NotHere
    }
    let mut images = vec![Word::empty(); g];
    if let Dfs::Found = dfs(sub, &by_max, &mut images, 0, &mut b) {
        return accept(images, &b);
    }
    SearchOutcome {
        assignment: None,
        nodes: b.nodes,
    }
}

/// Knobs for the full certification pipeline.
#[derive(Debug, Clone)]
pub struct CertifyOptions {
    /// Largest cover index to try; defaults to one more than the longest
    /// relator of the normalized presentation.
    pub k_max: Option<usize>,
    /// Node budget per cover index.
    pub budget: u64,
    /// Worker threads for the index sweep; 0 uses the default pool size.
    pub jobs: usize,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            k_max: None,
            budget: 200_000,
            jobs: 0,
        }
    }
}

/// Search statistics for one cover index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KStat {
    pub k: usize,
    pub nodes: u64,
}

/// Everything needed to replay a largeness proof from scratch: the input
/// presentation, the normalizing automorphism and distinguished generator,
/// the cover index, the subgroup presentation, and the verified assignment
/// onto the rank-2 target.
#[derive(Debug, Clone, PartialEq)]
pub struct LargenessCertificate {
    pub original: Presentation,
    pub automorphism: Automorphism,
    pub t_index: usize,
    pub k: usize,
    pub subgroup: SubgroupPresentation,
    pub assignment: Assignment,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CertifyOutcome {
    Found(Box<LargenessCertificate>),
    NotFound { k_stats: Vec<KStat> },
}

/// Normalize, sweep cover indices from 1 upward, search each cover, and
/// return the smallest index that certifies. Indices are searched in
/// parallel batches but the accepted certificate is always the smallest
/// successful k, so the outcome does not depend on scheduling. The found
/// certificate is fully re-audited before being returned.
pub fn certify_large(p: &Presentation, opts: &CertifyOptions) -> Result<CertifyOutcome> {
    let good = make_good(p)?;
    let longest = good
        .base
        .relators()
        .iter()
        .map(Word::len)
        .max()
        .unwrap_or(0);
    let k_max = opts.k_max.unwrap_or(longest + 1).max(1);

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    let batch = if opts.jobs == 0 {
        pool.current_num_threads().max(1)
    } else {
        opts.jobs
    };

    let mut k_stats = Vec::with_capacity(k_max);
    let mut start = 1usize;
    while start <= k_max {
        let ks: Vec<usize> = (start..=k_max).take(batch).collect();
        let batch_results: Vec<Result<(SubgroupPresentation, SearchOutcome)>> =
            pool.install(|| {
                ks.par_iter()
                    .map(|&k| {
                        let sub = cyclic_cover(&good, k)?;
                        let outcome = search_certificate(&sub, opts.budget);
                        Ok((sub, outcome))
                    })
                    .collect()
            });
        for (&k, result) in ks.iter().zip(batch_results) {
            let (sub, outcome) = result?;
            k_stats.push(KStat {
                k,
                nodes: outcome.nodes,
            });
            if let Some(assignment) = outcome.assignment {
                let cert = LargenessCertificate {
                    original: p.clone(),
                    automorphism: good.automorphism.clone(),
                    t_index: good.t_index,
                    k,
                    subgroup: sub,
                    assignment,
                };
                cert.audit()?;
                return Ok(CertifyOutcome::Found(Box::new(cert)));
            }
        }
        start += batch;
    }
    Ok(CertifyOutcome::NotFound { k_stats })
}

impl LargenessCertificate {
    /// Replay the whole pipeline from the stored original presentation and
    /// fail on the first discrepancy. A certificate that audits cleanly
    /// proves the presented group surjects onto a rank-2 free group.
    pub fn audit(&self) -> Result<()> {
        let n = self.original.rank();
        let bad = |msg: String| Err(Error::BadCertificate(msg));

        if self.automorphism.rank() != n {
            return bad(format!(
                "automorphism acts on rank {} but the presentation has rank {}",
                self.automorphism.rank(),
                n
            ));
        }
        if self.t_index >= n {
            return bad(format!(
                "distinguished index {} outside rank {n}",
                self.t_index
            ));
        }

        // replay the normalization word-exactly
        let transformed = self
            .original
            .relators()
            .iter()
            .map(|r| self.automorphism.apply(r))
            .collect::<Result<Vec<Word>>>()?;
        let base = Presentation::new(self.original.generator_names().to_vec(), transformed)?;
        let good = GoodPresentation::already_good(&base, self.t_index).map_err(|e| {
            Error::BadCertificate(format!("normalized presentation is not good: {e}"))
        })?;

        let longest = base.relators().iter().map(Word::len).max().unwrap_or(0);
        if self.k == 0 || self.k > longest + 1 {
            return bad(format!(
                "cover index {} outside 1..={}",
                self.k,
                longest + 1
            ));
        }

        let rebuilt = cyclic_cover(&good, self.k)?;
        if rebuilt != self.subgroup {
            return bad("stored subgroup differs from the rebuilt cover".into());
        }

        match verify_certificate(&self.subgroup, &self.assignment) {
            Ok(true) => {}
            Ok(false) => return bad("assignment is not a surjection witness".into()),
            Err(e) => return bad(format!("assignment does not cover the labels: {e}")),
        }

        // independent cross-check through the abelianization route
        let ab = abelianization(&self.subgroup);
        if ab.free_rank < 2 {
            return bad(format!(
                "subgroup abelianization has free rank {}, expected at least 2",
                ab.free_rank
            ));
        }
        Ok(())
    }
}

/// Wire format of a certificate. Words are spelled in generator names
/// (assignment values in the target letters u and v), the empty word is
/// the empty string, and the assignment is keyed by label name.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateDto {
    pub format: u32,
    pub kind: String,
    pub original: PresentationDto,
    pub automorphism: Automorphism,
    pub t_index: usize,
    pub k: usize,
    pub subgroup: SubgroupDto,
    pub assignment: BTreeMap<String, String>,
}

impl From<&LargenessCertificate> for CertificateDto {
    fn from(c: &LargenessCertificate) -> Self {
        let targets = target_names();
        CertificateDto {
            format: 1,
            kind: "largeness_certificate".into(),
            original: PresentationDto::from(&c.original),
            automorphism: c.automorphism.clone(),
            t_index: c.t_index,
            k: c.k,
            subgroup: SubgroupDto::new(&c.subgroup, c.original.generator_names()),
            assignment: c
                .subgroup
                .labels()
                .iter()
                .zip(c.assignment.images())
                .map(|(l, w)| (l.name.clone(), format_word(w, &targets)))
                .collect(),
        }
    }
}

impl TryFrom<&CertificateDto> for LargenessCertificate {
    type Error = Error;

    fn try_from(dto: &CertificateDto) -> Result<Self> {
        if dto.format != 1 {
            return Err(Error::BadCertificate(format!(
                "unsupported format {}",
                dto.format
            )));
        }
        if dto.kind != "largeness_certificate" {
            return Err(Error::BadCertificate(format!(
                "unexpected kind {:?}",
                dto.kind
            )));
        }
        let original = Presentation::try_from(dto.original.clone())?;
        let subgroup = SubgroupPresentation::try_from(&dto.subgroup)?;
        let targets = target_names();
        let known: BTreeSet<&str> = subgroup.labels().iter().map(|l| l.name.as_str()).collect();
        if let Some(extra) = dto.assignment.keys().find(|k| !known.contains(k.as_str())) {
            return Err(Error::InvalidArgument(format!(
                "assignment names unknown label {extra:?}"
            )));
        }
        let images = subgroup
            .labels()
            .iter()
            .map(|l| {
                let text = dto.assignment.get(&l.name).ok_or(Error::UnassignedLabel {
                    label: l.name.clone(),
                })?;
                parse_word_tokens(text, &targets).map_err(Error::from)
            })
            .collect::<Result<Vec<Word>>>()?;
        Ok(LargenessCertificate {
            original,
            automorphism: dto.automorphism.clone(),
            t_index: dto.t_index,
            k: dto.k,
            subgroup,
            assignment: Assignment::new(images)?,
        })
    }
}
