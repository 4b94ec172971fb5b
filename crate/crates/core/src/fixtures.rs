//! Named example structures used across tests, documentation, and the
//! shipped files under `fixtures/`.
//!
//! Every constructor re-verifies its relations on the way out, so a test
//! that starts from a fixture never inherits a silently broken table.

use std::sync::Arc;

use crate::morphism::InfinityMorphism;
use crate::scalar::from_i64;
use crate::space::{BasisVector, FilteredGradedSpace};
use crate::structure::{BracketOutput, SLInftyStructure};

fn vector(id: &str, degree: i64, weight: i64) -> BasisVector {
    BasisVector {
        id: id.into(),
        degree,
        weight,
    }
}

fn out(pairs: &[(usize, i64)]) -> BracketOutput {
    pairs.iter().map(|&(j, c)| (j, from_i64(c))).collect()
}

fn checked(l: SLInftyStructure) -> Arc<SLInftyStructure> {
    assert!(l.verify_linfty_relations(None).is_empty());
    assert!(l.verify_filtration_compatibility().is_empty());
    Arc::new(l)
}

/// Fixture A: abelian two-term complex e(0,1), f(1,2) with d e = f,
/// two filtration levels.  The smallest structure with a nonzero
/// differential.
pub fn fixture_a() -> Arc<SLInftyStructure> {
    let s = FilteredGradedSpace::new(
        "A",
        vec![vector("e", 0, 1), vector("f", 1, 2)],
        2,
        1,
    )
    .unwrap();
    checked(SLInftyStructure::new(&s, true, vec![(vec![0], out(&[(1, 1)]))]).unwrap())
}

/// Fixture B: x(0,1), z(1,2) with zero differential and {x,x} = z, two
/// filtration levels.  The smallest structure with a nonzero bracket;
/// curv(x) = z/2.
pub fn fixture_b() -> Arc<SLInftyStructure> {
    let s = FilteredGradedSpace::new(
        "B",
        vec![vector("x", 0, 1), vector("z", 1, 2)],
        2,
        1,
    )
    .unwrap();
    checked(SLInftyStructure::new(&s, false, vec![(vec![0, 0], out(&[(1, 1)]))]).unwrap())
}

/// Fixture C: a morphism with a genuine quadratic component.  The source
/// is a single closed generator a0(0,1); the target is x(0,1), w(0,2),
/// z(1,3) with d w = z and {x,x} = -z, the sign forced by the relation
/// U1(a0) = x, U2(a0,a0) = w.
pub fn fixture_c() -> InfinityMorphism {
    let sa = FilteredGradedSpace::new("Ca", vec![vector("a0", 0, 1)], 1, 1).unwrap();
    let la = checked(SLInftyStructure::new(&sa, true, vec![]).unwrap());
    let st = FilteredGradedSpace::new(
        "Ct",
        vec![vector("x", 0, 1), vector("w", 0, 2), vector("z", 1, 3)],
        3,
        1,
    )
    .unwrap();
    let lt = checked(
        SLInftyStructure::new(
            &st,
            false,
            vec![(vec![1], out(&[(2, 1)])), (vec![0, 0], out(&[(2, -1)]))],
        )
        .unwrap(),
    );
    let u = InfinityMorphism::new(
        &la,
        &lt,
        0,
        None,
        vec![(vec![0], out(&[(0, 1)])), (vec![0, 0], out(&[(1, 1)]))],
    )
    .unwrap();
    assert!(u.verify_morphism_relations(None).is_empty());
    assert!(u.verify_filtration_compatibility().is_empty());
    u
}

/// Fixture D: a shift-1 morphism from a weight-zero abelian source into a
/// bracketed target, with a finite-sum bound of two.  Built so that the
/// degree-0 source point c maps to xt + wt/2 whose trailing part needs
/// the quadratic correction: d(U2(ch,c)) = wt - st is nonzero.
pub fn fixture_d() -> InfinityMorphism {
    let sa = FilteredGradedSpace::new(
        "Da",
        vec![vector("ch", -1, 0), vector("c", 0, 0)],
        0,
        0,
    )
    .unwrap();
    let la = checked(SLInftyStructure::new(&sa, true, vec![(vec![0], out(&[(1, 1)]))]).unwrap());
    let st = FilteredGradedSpace::new(
        "Dt",
        vec![
            vector("m1", -1, 1),
            vector("xt", 0, 1),
            vector("mh", -1, 1),
            vector("wt", 0, 1),
            vector("st", 0, 2),
            vector("zt", 1, 2),
        ],
        2,
        1,
    )
    .unwrap();
    let lt = checked(
        SLInftyStructure::new(
            &st,
            false,
            vec![
                (vec![0], out(&[(1, 1)])),
                (vec![2], out(&[(3, 1), (4, -1)])),
                (vec![3], out(&[(5, 1)])),
                (vec![4], out(&[(5, 1)])),
                (vec![1, 1], out(&[(5, -1)])),
                (vec![0, 1], out(&[(4, 1)])),
            ],
        )
        .unwrap(),
    );
    let u = InfinityMorphism::new(
        &la,
        &lt,
        1,
        Some(2),
        vec![
            (vec![0], out(&[(0, 1)])),
            (vec![1], out(&[(1, 1)])),
            (vec![1, 1], out(&[(3, 1)])),
            (vec![0, 1], out(&[(2, 1)])),
        ],
    )
    .unwrap();
    assert!(u.verify_morphism_relations(None).is_empty());
    assert!(u.verify_filtration_compatibility().is_empty());
    u
}

/// A three-level structure whose gauge ladder takes more than one rung:
/// m(-1,1), e(0,1), z(0,2), s(0,2), w(1,3), y3(0,3) with d m = e,
/// d s = w, d y3 = -w and brackets {e,e} = -2w, {e,z} = w, {m,e} = 2s,
/// {m,z} = y3.  The elements e + z and e + s are flat.
pub fn fixture_layered() -> Arc<SLInftyStructure> {
    let s = FilteredGradedSpace::new(
        "L",
        vec![
            vector("m", -1, 1),
            vector("e", 0, 1),
            vector("z", 0, 2),
            vector("s", 0, 2),
            vector("w", 1, 3),
            vector("y3", 0, 3),
        ],
        3,
        1,
    )
    .unwrap();
    checked(
        SLInftyStructure::new(
            &s,
            false,
            vec![
                (vec![0], out(&[(1, 1)])),
                (vec![3], out(&[(4, 1)])),
                (vec![5], out(&[(4, -1)])),
                (vec![1, 1], out(&[(4, -2)])),
                (vec![1, 2], out(&[(4, 1)])),
                (vec![0, 1], out(&[(3, 2)])),
                (vec![0, 2], out(&[(5, 1)])),
            ],
        )
        .unwrap(),
    )
}

/// An abelian chain pair m(-1,1), e(0,1), m2(-1,1), u(-2,1) with d m = e
/// and d u = m2, declared two levels deep.  The window quotients of
/// degrees 0 and -1 are acyclic even though m2 is a nonzero cycle, which
/// exercises witness bootstrapping.
pub fn fixture_chain() -> Arc<SLInftyStructure> {
    let s = FilteredGradedSpace::new(
        "C",
        vec![
            vector("m", -1, 1),
            vector("e", 0, 1),
            vector("m2", -1, 1),
            vector("u", -2, 1),
        ],
        2,
        1,
    )
    .unwrap();
    checked(
        SLInftyStructure::new(
            &s,
            true,
            vec![(vec![0], out(&[(1, 1)])), (vec![3], out(&[(2, 1)]))],
        )
        .unwrap(),
    )
}

/// The identity morphism on `fixture_layered`, the usual endpoint pair
/// for surjectivity and injectivity runs.
pub fn fixture_layered_identity() -> InfinityMorphism {
    InfinityMorphism::identity(&fixture_layered())
}

/// The identity morphism on `fixture_chain`.
pub fn fixture_chain_identity() -> InfinityMorphism {
    InfinityMorphism::identity(&fixture_chain())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexes::{verify_gm_hypotheses, HypothesisVariant};
    use crate::space::Element;

    #[test]
    fn the_constructors_build_and_verify() {
        assert_eq!(fixture_a().space.dim(), 2);
        assert_eq!(fixture_b().space.dim(), 2);
        assert_eq!(fixture_c().target.space.dim(), 3);
        assert_eq!(fixture_d().finite_sum_bound, Some(2));
        assert_eq!(fixture_layered().space.dim(), 6);
        assert_eq!(fixture_chain().space.dim(), 4);
    }

    #[test]
    fn fixture_b_has_nonzero_curvature_on_x() {
        let b = fixture_b();
        let x = Element::basis_element(&b.space, 0);
        let curv = b.curvature(&x).unwrap();
        assert_eq!(curv, Element::basis_element(&b.space, 1).scale(&crate::scalar::ratio(1, 2)));
        assert!(!b.is_mc(&x).unwrap());
    }

    #[test]
    fn fixture_d_supports_the_abelian_variant() {
        let u = fixture_d();
        let report = verify_gm_hypotheses(&u, 2, HypothesisVariant::Abelian).unwrap();
        assert!(report.satisfied);
    }
}
