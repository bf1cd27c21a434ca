//! Bounded refutation of largeness: enumerate every conjugacy class of
//! subgroups up to a chosen index, present each subgroup, and read off the
//! torsion-free rank of its abelianization. A surjection onto a rank-2
//! free group forces torsion-free rank at least 2 and survives conjugation,
//! so if every class comes out with rank at most 1, no subgroup within the
//! bound surjects. The converse fails (a rank-2 abelianization does not
//! build a surjection), which is why the positive verdict is only ever
//! "inconclusive": deciding the existence of such a surjection outright is
//! not possible in general, and this check is the sound half.

mod enumerate;
mod snf;

pub use enumerate::low_index_subgroups;
pub use snf::{
    abelianization, smith_normal_form, Abelianization, ExponentRows, IntMatrix, SmithForm,
};

use crate::cover::{reidemeister_schreier, CosetTable};
use crate::error::Result;
use crate::presentation::{Presentation, PresentationDto};
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// No subgroup within the index bound can surject a rank-2 free group.
    Refuted,
    /// At least one class has torsion-free rank 2 or more; nothing follows.
    Inconclusive,
}

/// One conjugacy class of subgroups: its coset table and the invariants of
/// its abelianization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassRecord {
    pub table: CosetTable,
    pub index: usize,
    pub free_rank: usize,
    pub torsion: Vec<BigUint>,
}

/// Outcome of the bounded refutation sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Refutation {
    pub presentation: Presentation,
    pub max_index: usize,
    pub classes: Vec<ClassRecord>,
    /// Positions in `classes` whose torsion-free rank is at least 2.
    pub witnesses: Vec<usize>,
    pub verdict: Verdict,
}

/// Sweep all conjugacy classes of subgroups of index <= max_index and
/// compute each abelianization through the subgroup presentation engine.
/// Refuted iff every class has torsion-free rank <= 1.
pub fn refute_largeness_at_index(p: &Presentation, max_index: usize) -> Result<Refutation> {
    let tables = low_index_subgroups(p, max_index)?;
    let mut classes = Vec::with_capacity(tables.len());
    for table in tables {
        let sub = reidemeister_schreier(p, &table)?;
        let ab = abelianization(&sub);
        classes.push(ClassRecord {
            index: table.index(),
            table,
            free_rank: ab.free_rank,
            torsion: ab.torsion,
        });
    }
    let witnesses: Vec<usize> = classes
        .iter()
        .enumerate()
        .filter(|(_, c)| c.free_rank >= 2)
        .map(|(i, _)| i)
        .collect();
    let verdict = if witnesses.is_empty() {
        Verdict::Refuted
    } else {
        Verdict::Inconclusive
    };
    Ok(Refutation {
        presentation: p.clone(),
        max_index,
        classes,
        witnesses,
        verdict,
    })
}

/// Wire format of a refutation report. Coset tables are flat row-major
/// target lists and torsion coefficients are decimal strings, so the file
/// stays readable and independent of integer width.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RefutationDto {
    pub format: u32,
    pub kind: String,
    pub presentation: PresentationDto,
    pub max_index: usize,
    pub classes: Vec<ClassRecordDto>,
    pub witnesses: Vec<usize>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassRecordDto {
    pub index: usize,
    pub table: Vec<usize>,
    pub free_rank: usize,
    pub torsion: Vec<String>,
}

impl From<&Refutation> for RefutationDto {
    fn from(r: &Refutation) -> Self {
        RefutationDto {
            format: 1,
            kind: "refutation".into(),
            presentation: PresentationDto::from(&r.presentation),
            max_index: r.max_index,
            classes: r
                .classes
                .iter()
                .map(|c| ClassRecordDto {
                    index: c.index,
                    table: c.table.flat(),
                    free_rank: c.free_rank,
                    torsion: c.torsion.iter().map(BigUint::to_string).collect(),
                })
                .collect(),
            witnesses: r.witnesses.clone(),
            verdict: r.verdict,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Presentation {
        Presentation::parse(text).unwrap()
    }

    #[test]
    fn klein_four_group_is_refuted() {
        let p = parse("generators: a b\nrelator: a^2\nrelator: b^2\nrelator: a b a b\n");
        let r = refute_largeness_at_index(&p, 4).unwrap();
        assert_eq!(r.verdict, Verdict::Refuted);
        assert!(r.witnesses.is_empty());
        assert_eq!(r.classes.len(), 5);
        // subgroups of a finite group are finite: free rank 0 everywhere
        assert!(r.classes.iter().all(|c| c.free_rank == 0));
    }

    #[test]
    fn free_abelian_plane_is_inconclusive() {
        let p = parse("generators: a b\nrelator: a b a^-1 b^-1\n");
        let r = refute_largeness_at_index(&p, 2).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
        // every finite index subgroup of Z x Z is again Z x Z
        assert_eq!(r.witnesses, [0, 1, 2, 3]);
        assert!(r.classes.iter().all(|c| c.free_rank == 2));
        assert!(r.classes.iter().all(|c| c.torsion.is_empty()));
    }

    #[test]
    fn free_group_is_inconclusive_at_index_one() {
        let p = parse("generators: a b c\n");
        let r = refute_largeness_at_index(&p, 1).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert_eq!(r.classes.len(), 1);
        assert_eq!(r.classes[0].free_rank, 3);
    }

    #[test]
    fn subgroup_invariants_follow_the_index() {
        // the index-d subgroup of the cyclic group of order 6 is cyclic
        // of order 6/d, so every abelianization is pure torsion
        let p = parse("generators: a\nrelator: a^6\n");
        let r = refute_largeness_at_index(&p, 6).unwrap();
        assert_eq!(r.verdict, Verdict::Refuted);
        let indices: Vec<usize> = r.classes.iter().map(|c| c.index).collect();
        assert_eq!(indices, [1, 2, 3, 6]);
        for c in &r.classes {
            assert_eq!(c.free_rank, 0);
            let order: u64 = 6 / c.index as u64;
            let expected: Vec<BigUint> = if order > 1 {
                vec![BigUint::from(order)]
            } else {
                vec![]
            };
            assert_eq!(c.torsion, expected, "class of index {}", c.index);
        }
    }

    #[test]
    fn report_serializes_with_flat_tables() {
        let p = parse("generators: a b\nrelator: a b a^-1 b^-1\n");
        let r = refute_largeness_at_index(&p, 2).unwrap();
        let dto = RefutationDto::from(&r);
        let json = serde_json::to_string(&dto).unwrap();
        let back: RefutationDto = serde_json::from_str(&json).unwrap();
        assert_eq!(back.format, 1);
        assert_eq!(back.kind, "refutation");
        assert_eq!(back.verdict, Verdict::Inconclusive);
        assert_eq!(back.classes.len(), r.classes.len());
        assert_eq!(back.classes[0].table, r.classes[0].table.flat());
        assert!(json.contains("\"inconclusive\""));
    }
}
