//! Largeness certificates for finitely presented groups whose presentations
//! have at least two more generators than relators.
//!
//! The pipeline: normalize a presentation so one generator has zero exponent
//! sum in every relator ([`goodpres`]), pass to a finite cyclic cover and
//! rewrite the presentation on the subgroup ([`cover`]), then search for an
//! explicit surjection onto a rank 2 free group ([`freequot`]). A found
//! certificate proves the group maps onto a free group of rank 2 and is
//! checkable independently of the search. The [`lowindex`] module gives the
//! complementary negative test via abelianized low index subgroups.

pub mod cover;
pub mod error;
pub mod euclid;
pub mod freequot;
pub mod goodpres;
pub mod lowindex;
pub mod nielsen;
pub mod presentation;
pub mod word;

pub use cover::{cyclic_cover, verify_subgroup, CosetTable, SubgroupDto, SubgroupPresentation};
pub use error::{Error, ParseError, Result};
pub use euclid::{GrowthSample, GrowthStep, GrowthTrace};
pub use freequot::{
    certify_large, search_certificate, verify_certificate, Assignment, CertificateDto,
    CertifyOptions, CertifyOutcome, KStat, LargenessCertificate, SearchOutcome,
};
pub use goodpres::{make_good, verify_good, GoodPresentation};
pub use lowindex::{
    abelianization, low_index_subgroups, refute_largeness_at_index, Abelianization, ClassRecord,
    Refutation, RefutationDto, SmithForm, Verdict,
};
pub use nielsen::{Automorphism, NielsenMove};
pub use presentation::{ExponentMatrix, Presentation, PresentationDto};
pub use word::{Generator, Letter, Sign, Word};
