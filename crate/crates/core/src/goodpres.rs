//! Normalizing a presentation so one generator has exponent sum zero in
//! every relator.
//!
//! With at least two more generators than relators, running the exponent
//! elimination once per relator over a shrinking index range produces a
//! staircase: relator `q` keeps a possibly nonzero sum only at column
//! `n - 1 - q`. Earlier relators' zeros survive later rounds because later
//! rounds only touch columns where those relators are already zero. In
//! particular column 0 ends up zero everywhere, so generator 0 serves as
//! the distinguished one.

use crate::error::{Error, Result};
use crate::euclid::{Elimination, GrowthTrace};
use crate::nielsen::Automorphism;
use crate::presentation::Presentation;
use num_bigint::BigUint;
use num_traits::One;

/// A presentation together with the change of basis that made its
/// distinguished generator exponent-free, and the growth log of that
/// change. The base relators are exact automorphic images of the original
/// relators (freely reduced, not cyclically reduced), so replaying the
/// inverse recovers the originals verbatim.
#[derive(Debug, Clone, PartialEq)]
pub struct GoodPresentation {
    pub base: Presentation,
    /// Generator whose exponent sum vanishes in every relator.
    pub t_index: usize,
    /// Maps original relators onto base relators.
    pub automorphism: Automorphism,
    /// One division-step log per relator, all sharing the same quotients.
    pub traces: Vec<GrowthTrace>,
}

/// Eliminate exponent sums relator by relator. Requires deficiency at
/// least 2. The distinguished generator of the result is always index 0.
pub fn make_good(p: &Presentation) -> Result<GoodPresentation> {
    let n = p.rank();
    let m = p.relators().len();
    if !p.is_bp() {
        return Err(Error::NotBp {
            generators: n,
            relators: m,
        });
    }
    let mut engine = Elimination::new(n, p.relators().to_vec())?;
    for q in 0..m {
        // Push relator q's residual to column n - 1 - q; the range stays
        // inside earlier relators' zero columns.
        let indices: Vec<usize> = (0..n - q).collect();
        engine.chain(q, &indices);
    }
    let (automorphism, words, traces) = engine.finish();
    let base = Presentation::new(p.generator_names().to_vec(), words)?;
    debug_assert!(base.exponent_matrix().column_all_zero(0));
    Ok(GoodPresentation {
        base,
        t_index: 0,
        automorphism,
        traces,
    })
}

impl GoodPresentation {
    /// Wrap a presentation whose column `t_index` is already all zero,
    /// with the identity change of basis.
    pub fn already_good(p: &Presentation, t_index: usize) -> Result<Self> {
        if t_index >= p.rank() {
            return Err(Error::GeneratorOutOfRank {
                index: t_index,
                rank: p.rank(),
            });
        }
        let matrix = p.exponent_matrix();
        for (k, row) in (0..matrix.rows).map(|r| (r, matrix.row(r))) {
            if row[t_index] != 0 {
                return Err(Error::NotGood {
                    relator: k,
                    sum: row[t_index],
                });
            }
        }
        let traces = p
            .relators()
            .iter()
            .map(|r| GrowthTrace {
                initial_length: r.len(),
                steps: Vec::new(),
                product_p: BigUint::one(),
                final_length: r.len(),
            })
            .collect();
        Ok(GoodPresentation {
            base: p.clone(),
            t_index,
            automorphism: Automorphism::identity(p.rank()),
            traces,
        })
    }

    /// Exponent sum of the distinguished generator is zero in relator `k`
    /// by construction; expose the whole property as a predicate.
    pub fn distinguished_column_is_zero(&self) -> bool {
        self.base.exponent_matrix().column_all_zero(self.t_index)
    }
}

/// Check a claimed good presentation against the original it came from:
/// same generator names, every base relator is the exact automorphic image
/// of the corresponding original relator, and the distinguished column of
/// the base exponent matrix vanishes.
pub fn verify_good(g: &GoodPresentation, original: &Presentation) -> bool {
    if g.base.generator_names() != original.generator_names() {
        return false;
    }
    if g.automorphism.rank() != original.rank() {
        return false;
    }
    if g.base.relators().len() != original.relators().len() {
        return false;
    }
    if g.t_index >= g.base.rank() {
        return false;
    }
    for (orig, img) in original.relators().iter().zip(g.base.relators()) {
        match g.automorphism.apply(orig) {
            Ok(w) if &w == img => {}
            _ => return false,
        }
    }
    g.distinguished_column_is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nielsen::NielsenMove;
    use crate::presentation::format_word;
    use crate::word::Word;

    fn pres(text: &str) -> Presentation {
        Presentation::parse(text).unwrap()
    }

    #[test]
    fn equal_exponents_example() {
        let p = pres("generators: a b c\nrelator: a^2 b^2\n");
        let g = make_good(&p).unwrap();
        assert_eq!(
            g.automorphism.moves(),
            &[
                NielsenMove::RightMult { i: 0, j: 1, e: -1 },
                NielsenMove::Swap { i: 0, j: 1 },
                NielsenMove::Swap { i: 1, j: 2 },
            ]
        );
        assert_eq!(
            format_word(&g.base.relators()[0], g.base.generator_names()),
            "c a^-1 c a"
        );
        assert_eq!(g.t_index, 0);
        let m = g.base.exponent_matrix();
        assert_eq!(m.row(0), &[0, 0, 2]);
        assert!(verify_good(&g, &p));
        assert_eq!(g.traces[0].product_p, BigUint::from(2u32));
    }

    #[test]
    fn coprime_exponents_example() {
        let p = pres("generators: a b c\nrelator: a^2 b^3\n");
        let g = make_good(&p).unwrap();
        assert_eq!(
            g.automorphism.moves(),
            &[
                NielsenMove::RightMult { i: 0, j: 1, e: -1 },
                NielsenMove::RightMult { i: 1, j: 0, e: -2 },
                NielsenMove::Swap { i: 1, j: 2 },
            ]
        );
        assert_eq!(g.base.exponent_matrix().row(0), &[0, 0, 1]);
        assert!(verify_good(&g, &p));
        // inverse change of basis recovers the original relator verbatim
        let back = g
            .automorphism
            .inverse()
            .apply(&g.base.relators()[0])
            .unwrap();
        assert_eq!(back, p.relators()[0]);
    }

    #[test]
    fn two_relators_form_a_staircase() {
        let p = pres("generators: a b c d\nrelator: a b\nrelator: c d\n");
        let g = make_good(&p).unwrap();
        let m = g.base.exponent_matrix();
        // residuals land on the antidiagonal, zeros below it
        assert_eq!(m.row(0), &[0, 0, 0, 1]);
        assert_eq!(m.row(1), &[0, 0, 1, 0]);
        assert!(verify_good(&g, &p));
    }

    #[test]
    fn no_relators_is_trivially_good() {
        let p = pres("generators: a b\n");
        let g = make_good(&p).unwrap();
        assert!(g.automorphism.is_identity());
        assert_eq!(g.base, p);
        assert!(verify_good(&g, &p));
    }

    #[test]
    fn deficiency_below_two_is_rejected() {
        let p = pres("generators: a b\nrelator: a b\n");
        assert!(matches!(
            make_good(&p),
            Err(Error::NotBp {
                generators: 2,
                relators: 1
            })
        ));
    }

    #[test]
    fn already_good_wraps_a_zero_column() {
        let p = pres("generators: t x y\nrelator: t x t^-1 x^-2\n");
        let g = GoodPresentation::already_good(&p, 0).unwrap();
        assert!(g.automorphism.is_identity());
        assert_eq!(g.base, p);
        assert!(verify_good(&g, &p));
        assert!(g.traces.iter().all(|t| t.steps.is_empty()));

        // x has exponent sum -1 in the relator
        assert!(matches!(
            GoodPresentation::already_good(&p, 1),
            Err(Error::NotGood {
                relator: 0,
                sum: -1
            })
        ));
        assert!(GoodPresentation::already_good(&p, 3).is_err());
    }

    #[test]
    fn tampered_claims_fail_verification() {
        let p = pres("generators: a b c\nrelator: a^2 b^3\n");
        let g = make_good(&p).unwrap();

        let mut wrong_relator = g.clone();
        wrong_relator.base = Presentation::new(
            wrong_relator.base.generator_names().to_vec(),
            vec![Word::gen(2)],
        )
        .unwrap();
        assert!(!verify_good(&wrong_relator, &p));

        let mut wrong_t = g.clone();
        wrong_t.t_index = 2; // residual column
        assert!(!verify_good(&wrong_t, &p));

        let mut wrong_auto = g.clone();
        wrong_auto.automorphism = Automorphism::identity(3);
        assert!(!verify_good(&wrong_auto, &p));

        let other = pres("generators: a b c\nrelator: a^4 b^3\n");
        assert!(!verify_good(&g, &other));
    }

    mod props {
        use super::*;
        use crate::word::{Generator, Letter, Sign};
        use proptest::prelude::*;

        fn arb_bp() -> impl Strategy<Value = Presentation> {
            (3..=4usize)
                .prop_flat_map(|n| {
                    let letters = prop::collection::vec((0..n as i32, prop::bool::ANY), 1..20);
                    let m = 1..=(n - 2);
                    (
                        Just(n),
                        m.prop_flat_map(move |m| prop::collection::vec(letters.clone(), m..=m)),
                    )
                })
                .prop_filter_map("nonempty cyclically reduced relators", |(n, rels)| {
                    let names = (0..n).map(|i| format!("g{i}")).collect();
                    let mut relators = Vec::new();
                    for ls in rels {
                        let w = Word::reduce(ls.into_iter().map(|(g, s)| {
                            Letter::new(
                                Generator::new(g as u32),
                                if s { Sign::Plus } else { Sign::Minus },
                            )
                        }))
                        .cyclically_reduced();
                        if w.is_empty() {
                            return None;
                        }
                        relators.push(w);
                    }
                    Presentation::new(names, relators).ok()
                })
        }

        proptest! {
            #[test]
            fn make_good_output_verifies_and_is_staircase(p in arb_bp()) {
                let g = make_good(&p).unwrap();
                prop_assert!(verify_good(&g, &p));
                let n = p.rank();
                let matrix = g.base.exponent_matrix();
                // relator q is zeroed strictly below its residual column
                // n - 1 - q; columns above it are unconstrained
                for q in 0..matrix.rows {
                    for col in 0..n - 1 - q {
                        prop_assert_eq!(matrix.get(q, col), 0);
                    }
                }
                // inverse replay is exact, not just up to conjugacy
                let inv = g.automorphism.inverse();
                for (orig, img) in p.relators().iter().zip(g.base.relators()) {
                    prop_assert_eq!(&inv.apply(img).unwrap(), orig);
                }
                // growth accounting holds per relator
                for (trace, orig) in g.traces.iter().zip(p.relators()) {
                    prop_assert_eq!(trace.initial_length, orig.len());
                    let mut prev = trace.initial_length;
                    for step in &trace.steps {
                        prop_assert!(step.length_after <= (step.quotient as usize + 1) * prev);
                        prev = step.length_after;
                    }
                }
            }
        }
    }
}
