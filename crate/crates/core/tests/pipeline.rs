//! End to end flows through the library: parse, normalize, cover, certify,
//! audit, refute, with the consistency cross-checks between stages.

use bplarge::lowindex::{abelianization, refute_largeness_at_index, Verdict};
use bplarge::{
    certify_large, cyclic_cover, make_good, verify_good, verify_subgroup, CertificateDto,
    CertifyOptions, CertifyOutcome, LargenessCertificate, Presentation, PresentationDto,
};

fn certify(p: &Presentation) -> LargenessCertificate {
    match certify_large(p, &CertifyOptions::default()).expect("input has deficiency at least 2") {
        CertifyOutcome::Found(cert) => *cert,
        CertifyOutcome::NotFound { k_stats } => {
            panic!("expected a certificate, searched {} indices", k_stats.len())
        }
    }
}

#[test]
fn parse_to_certificate_roundtrip() {
    let text = "generators: a b c\nrelator: a^2 b^2\n";
    let p = Presentation::parse(text).unwrap();
    assert_eq!(p.to_text(), text);

    let good = make_good(&p).unwrap();
    assert!(verify_good(&good, &p));

    for k in 1..=3 {
        let sub = cyclic_cover(&good, k).unwrap();
        assert!(verify_subgroup(&sub, &good, k));
        assert_eq!(sub.generator_count(), 2 * k + 1);
        assert_eq!(sub.relator_count(), k);
    }

    let cert = certify(&p);
    cert.audit().unwrap();
    assert_eq!(cert.original, p);

    // The wire form replays to the same certificate and still audits.
    let dto = CertificateDto::from(&cert);
    let json = serde_json::to_string(&dto).unwrap();
    let back: CertificateDto = serde_json::from_str(&json).unwrap();
    let replayed = LargenessCertificate::try_from(&back).unwrap();
    replayed.audit().unwrap();
    assert_eq!(replayed, cert);
}

#[test]
fn certificate_subgroup_has_rank_two_abelianization() {
    let p = Presentation::parse("generators: a b c\nrelator: a b a^-1 b^-1\n").unwrap();
    let cert = certify(&p);
    let ab = abelianization(&cert.subgroup);
    assert!(ab.free_rank >= 2, "free rank {} too small", ab.free_rank);
}

#[test]
fn refuter_and_certifier_never_disagree() {
    // A certified group surjects a rank 2 free group from a finite index
    // subgroup, so the SNF sweep at any index bound covering that subgroup
    // must stay inconclusive.
    let texts = [
        "generators: a b c\nrelator: a b a^-1 b^-1\n",
        "generators: a b c\nrelator: a^2 b^2\n",
        "generators: a b c d\nrelator: a b a^-1 b^-1\nrelator: c d c^-1 d^-1\n",
    ];
    for text in texts {
        let p = Presentation::parse(text).unwrap();
        let cert = certify(&p);
        for bound in 1..=cert.k.max(2) {
            let r = refute_largeness_at_index(&p, bound).unwrap();
            assert_eq!(r.verdict, Verdict::Inconclusive, "bound {bound} on {text}");
        }
    }
}

#[test]
fn refuter_rejects_a_finite_group() {
    let p = Presentation::parse("generators: a b\nrelator: a^2\nrelator: b^2\nrelator: a b a b\n")
        .unwrap();
    let r = refute_largeness_at_index(&p, 4).unwrap();
    assert_eq!(r.verdict, Verdict::Refuted);
    assert!(r.witnesses.is_empty());
    // Klein four group: the five subgroup classes all have finite quotients.
    assert_eq!(r.classes.len(), 5);
}

#[test]
fn presentation_dto_round_trips_through_json() {
    let p = Presentation::parse("generators: s t u\nrelator: s t^2 s^-1 t^-3\n").unwrap();
    let dto = PresentationDto::from(&p);
    let json = serde_json::to_string(&dto).unwrap();
    let back: PresentationDto = serde_json::from_str(&json).unwrap();
    assert_eq!(Presentation::try_from(back).unwrap(), p);
}
