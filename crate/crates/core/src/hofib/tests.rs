use std::sync::Arc;

use super::*;
use crate::fixtures;
use crate::pstack::{bang, terminal_prestack, PseudoNat, Pseudofunctor};

fn named(site: &Arc<Site>, name: &str) -> Arc<Pseudofunctor> {
    fixtures::pseudofunctors(site)
        .into_iter()
        .find(|n| n.name == name)
        .map(|n| n.pf)
        .expect("fixture")
}

fn to_one(f: &Arc<Pseudofunctor>) -> PseudoNat {
    bang(f, &terminal_prestack(f.site()))
}

#[test]
fn identity_squares_lift() {
    let site = fixtures::site_two();
    let a = named(&site, "SHEAF-2");
    let g = to_one(&a);
    // f = 1_A against A → 1, with h = 1_A and k = g
    let sq = Square::new(
        PseudoNat::identity(&a),
        g.clone(),
        PseudoNat::identity(&a),
        g.clone(),
        Modification::identity(&g),
    )
    .unwrap();
    let found = search_lift(&sq).unwrap().expect("square along an identity lifts");
    assert!(check_lift(&sq, &found).is_valid());
    let built = construct_lift(&sq).unwrap();
    assert!(check_lift(&sq, &built).is_valid());
    assert_eq!(built.l.components, sq.h.components);
}

#[test]
fn horizontal_composition_with_identities() {
    let site = fixtures::site_two();
    let (_, _, incl) = fixtures::sieve_inclusion(&site);
    let sq = Square::identity(&incl);
    let twice = square_hcompose(&sq, &sq).unwrap();
    assert_eq!(twice.h, sq.h);
    assert_eq!(twice.k, sq.k);
    assert_eq!(twice.gamma, sq.gamma);
}

#[test]
fn exchange_law_detects_a_mutated_cell() {
    let site = fixtures::site_two();
    let bz2 = named(&site, "CONST-BZ2");
    let f = PseudoNat::identity(&bz2);
    let sq = Square::identity(&f);
    let id = Modification::identity(&f);
    let cell = SquareCell {
        phi0: id.clone(),
        phi1: id.clone(),
    };
    assert!(check_square_cell(&cell, &sq, &sq).unwrap().holds);
    // the generator on one side only
    let isos = enumerate_modifications(&f, &f, true, default_bound()).unwrap();
    let other = isos
        .into_iter()
        .find(|m| !m.is_identity())
        .expect("nontrivial automorphism");
    let bad = SquareCell { phi0: other, phi1: id };
    let d = check_square_cell(&bad, &sq, &sq).unwrap();
    assert!(!d.holds && d.witness.is_some());
}

#[test]
fn lifts_against_a_stack_are_found_and_constructed() {
    let site = fixtures::site_two();
    let (_, _, incl) = fixtures::sieve_inclusion(&site);
    for name in ["SHEAF-2", "STACK-BZ2-TW"] {
        let g = to_one(&named(&site, name));
        let squares = enumerate_squares(&incl, &g, default_bound()).unwrap();
        assert!(!squares.is_empty());
        for (sq, _) in &squares {
            let found = search_lift(sq).unwrap();
            assert!(found.is_some(), "{name}");
            let built = construct_lift(sq).unwrap();
            assert!(check_lift(sq, &built).is_valid());
        }
    }
}

#[test]
fn non_stacks_admit_unliftable_squares() {
    let site = fixtures::site_two();
    let (_, _, incl) = fixtures::sieve_inclusion(&site);
    let g = to_one(&named(&site, "PSH-GAP"));
    let d = pitchfork(&incl, &g).unwrap();
    assert!(!d.holds);
    assert!(d.witness.is_some());
    let err = construct_lift(&enumerate_squares(&incl, &g, default_bound()).unwrap()[0].0).unwrap_err();
    assert!(matches!(err, Error::NotLocalFibration(_)));
}

#[test]
fn fibrant_objects_are_the_stacks() {
    let site = fixtures::site_two();
    let w = sieve_inclusions(&site);
    for (name, expected) in [
        ("ONE", true),
        ("SHEAF-2", true),
        ("STACK-BZ2-TW", true),
        ("PSH-SEP", false),
    ] {
        let d = is_fibrant(&named(&site, name), &w).unwrap();
        assert_eq!(d.holds, expected, "{name}");
        assert_eq!(is_stack(&named(&site, name)).unwrap().holds, expected, "{name}");
    }
}

#[test]
fn lifting_does_not_see_fullness_outside_prestacks() {
    // CONST-D2 is not a prestack: its map to 1 fails fullness of Φ over the
    // empty cover, which no lifting problem detects
    let site = fixtures::site_two();
    let d2 = named(&site, "CONST-D2");
    assert!(!is_stack(&d2).unwrap().holds);
    assert!(is_fibrant(&d2, &sieve_inclusions(&site)).unwrap().holds);
}

#[test]
fn three_for_two_on_inclusion_triangles() {
    let site = fixtures::site_two();
    let (_, yx, incl) = fixtures::sieve_inclusion(&site);
    let t = Triangle {
        f: incl.clone(),
        g: incl.clone(),
        h: PseudoNat::identity(&yx),
        gamma: Modification::identity(&incl),
    };
    let r = three_for_two(&t).unwrap();
    assert!(r.f && r.g && r.h && r.consistent);
    let d2 = named(&site, "CONST-D2");
    let bang_d2 = to_one(&d2);
    let t = Triangle {
        f: bang_d2.clone(),
        g: PseudoNat::identity(&d2),
        h: bang_d2.clone(),
        gamma: Modification::identity(&bang_d2),
    };
    let r = three_for_two(&t).unwrap();
    assert!(!r.f && r.g && !r.h && r.consistent);
}

#[test]
fn weak_equivalences_between_stacks_have_pseudoinverses() {
    let site = fixtures::site_two();
    for name in ["SHEAF-2", "STACK-BZ2-TW"] {
        let f = PseudoNat::identity(&named(&site, name));
        let inv = lwe_between_fibrants_to_equivalence(&f).unwrap();
        assert!(validate_modification(&inv.unit).is_valid());
        assert!(validate_modification(&inv.counit).is_valid());
        assert!(inv.unit.is_iso() && inv.counit.is_iso());
    }
}

#[test]
fn trivial_topology_replacement_is_a_system_of_fibrant_objects() {
    let site = fixtures::site_trivial();
    let corpus: Vec<(String, Arc<Pseudofunctor>)> = fixtures::pseudofunctors(&site)
        .into_iter()
        .filter(|n| ["ONE", "CONST-D2", "SHEAF-2"].contains(&n.name.as_str()))
        .map(|n| (n.name, n.pf))
        .collect();
    let w = sieve_inclusions(&site);
    let r = validate_sfo(
        &corpus,
        |a| Ok((a.clone(), PseudoNat::identity(a))),
        &[],
        &w,
        default_bound(),
    )
    .unwrap();
    assert!(r.is_valid(), "{r}");
    let site = fixtures::site_two();
    let sep = named(&site, "PSH-SEP");
    let corpus = vec![("PSH-SEP".to_string(), sep)];
    let r = validate_sfo(
        &corpus,
        |a| Ok((a.clone(), PseudoNat::identity(a))),
        &[],
        &sieve_inclusions(&site),
        default_bound(),
    )
    .unwrap();
    assert!(r.has_rule("replacement is not fibrant"));
}

#[test]
fn path_objects_of_stacks() {
    let site = fixtures::site_two();
    for name in ["ONE", "SHEAF-2", "y(X)"] {
        let p = path_object(&named(&site, name)).unwrap();
        assert!(p.holds(), "{name}: {:?}", p.fibrations);
    }
}

#[test]
fn path_object_of_one_is_trivial() {
    let site = fixtures::site_two();
    let p = path_object(&terminal_prestack(&site)).unwrap();
    for u in site.cat().objects() {
        let fib = p.path.pf.fiber(u);
        for x in fib.objects() {
            for y in fib.objects() {
                assert_eq!(fib.hom(x, y).len(), 1);
            }
        }
    }
}
