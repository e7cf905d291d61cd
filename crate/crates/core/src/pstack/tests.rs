use std::sync::Arc;

use super::*;
use crate::fincat::standard;
use crate::fixtures::{self, arrow, object};

#[test]
fn corpus_pseudofunctors_validate() {
    for site in [fixtures::site_point(), fixtures::site_two(), fixtures::site_trivial()] {
        for named in fixtures::pseudofunctors(&site) {
            let r = validate_pseudofunctor(&named.pf);
            assert!(r.is_valid(), "{}: {r}", named.name);
        }
    }
}

#[test]
fn mutated_coherence_is_reported() {
    let site = fixtures::site_two();
    let f = fixtures::bz2_mutated(&site).unwrap();
    let r = validate_pseudofunctor(&f);
    assert!(r.has_rule("associativity coherence"), "{r}");
    assert!(Pseudofunctor::new(
        site.clone(),
        f.fibers().to_vec(),
        f.restrictions().to_vec(),
        f.upsilons().to_vec(),
        f.phi_table().to_vec()
    )
    .is_err());
}

#[test]
fn twisted_stack_has_nontrivial_coherence() {
    let site = fixtures::site_two();
    let f = fixtures::stack_bz2_twisted(&site).unwrap();
    let g = f.phi(arrow(&site, "2<X"), arrow(&site, "empty<2"));
    assert!(!g.is_identity());
}

#[test]
fn sigma_is_inverse_to_its_transpose() {
    let site = fixtures::site_two();
    let c = site.cat().clone();
    for named in fixtures::pseudofunctors(&site) {
        let f = &named.pf;
        for u in c.objects() {
            for &a in c.arrows_into(u) {
                for &b in c.arrows_into(u) {
                    let pb = site.pullback(a, b);
                    let fib = f.fiber(pb.apex);
                    for x in f.fiber(u).objects() {
                        let there = f.sigma(x, a, b);
                        let back = f.sigma(x, b, a);
                        assert!(fib.is_identity(fib.comp(back, there)), "{}", named.name);
                    }
                }
            }
        }
    }
}

#[test]
fn strict_sigma_is_identity() {
    let site = fixtures::site_two();
    let f = fixtures::sheaf_two(&site).unwrap();
    let (a, b) = (arrow(&site, "1<X"), arrow(&site, "2<X"));
    let x = object(&site, "X");
    for e in f.fiber(x).objects() {
        let s = f.sigma(e, a, b);
        assert!(f.fiber(site.pullback(a, b).apex).is_identity(s));
    }
}

#[test]
fn representable_fiber_sizes() {
    let site = fixtures::site_two();
    let sizes = |u: &str| -> Vec<usize> {
        let y = representable(&site, object(&site, u));
        ["X", "1", "2", "empty"]
            .iter()
            .map(|v| y.fiber(object(&site, v)).num_objects())
            .collect()
    };
    assert_eq!(sizes("X"), vec![1, 1, 1, 1]);
    assert_eq!(sizes("empty"), vec![0, 0, 0, 1]);
    assert_eq!(sizes("1"), vec![0, 1, 0, 1]);
}

#[test]
fn prestack_decisions() {
    let site = fixtures::site_two();
    let pair = fixtures::psh_pair(&site).unwrap();
    let d = is_prestack(&pair).unwrap();
    let w = d.witness.expect("witness");
    assert_eq!(w.kind, "not separated");
    assert_eq!(w.morphisms, vec!["u".to_string(), "v".to_string()]);
    let gap = fixtures::psh_gap(&site).unwrap();
    let w = is_prestack(&gap).unwrap().witness.expect("witness");
    assert_eq!(w.kind, "does not glue");
    for u in site.cat().objects() {
        assert!(is_prestack(&representable(&site, u)).unwrap().prestack);
    }
    assert!(!is_prestack(&fixtures::const_discrete_two(&site)).unwrap().prestack);
    assert!(
        is_prestack(&fixtures::stack_bz2_twisted(&site).unwrap())
            .unwrap()
            .prestack
    );
    let triv = fixtures::site_trivial();
    let iso = Pseudofunctor::constant(triv, &standard::walking_iso());
    assert!(is_prestack(&iso).unwrap().prestack);
}

#[test]
fn products_and_diagonal() {
    let site = fixtures::site_two();
    let a = Arc::new(fixtures::sheaf_two(&site).unwrap());
    let one = terminal_prestack(&site);
    let p = product(&a, &one).unwrap();
    for u in site.cat().objects() {
        assert_eq!(p.pf.fiber(u).num_objects(), a.fiber(u).num_objects());
    }
    let (prod, d) = diagonal(&a);
    assert!(validate_pseudonat(&d).is_valid());
    let (p1, _) = prod.projections();
    assert!(p1.after(&d).is_identity());
    let sq = product(&a, &a).unwrap();
    let x = object(&site, "X");
    assert_eq!(sq.pf.fiber(x).num_objects(), 16);
}

#[test]
fn cotensor_boundary_validates() {
    let site = fixtures::site_two();
    for named in fixtures::pseudofunctors(&site) {
        let ct = cotensor_two(&named.pf);
        assert!(validate_pseudofunctor(&ct.pf).is_valid(), "{}", named.name);
        assert!(validate_pseudonat(&ct.boundary).is_valid(), "{}", named.name);
    }
    let one = terminal_prestack(&site);
    let ct = cotensor_two(&one);
    for u in site.cat().objects() {
        assert_eq!(ct.pf.fiber(u).num_objects(), 1);
    }
}

#[test]
fn hom_categories() {
    let site = fixtures::site_two();
    let one = terminal_prestack(&site);
    let h = hom_category(&one, &one, 10_000).unwrap();
    assert_eq!((h.cat.num_objects(), h.cat.num_morphisms()), (1, 1));
    let a = Arc::new(fixtures::stack_bz2_twisted(&site).unwrap());
    let h = hom_category(&a, &one, 10_000).unwrap();
    assert_eq!((h.cat.num_objects(), h.cat.num_morphisms()), (1, 1));
    let (shat, yx, incl) = fixtures::sieve_inclusion(&site);
    let h = hom_category(&shat, &yx, 10_000).unwrap();
    assert!(h.index_of(&incl).is_some());
}

#[test]
fn pseudoinverse_of_identity() {
    let site = fixtures::site_two();
    let a = Arc::new(fixtures::stack_bz2_twisted(&site).unwrap());
    let id = PseudoNat::identity(&a);
    let inv = pseudonat_pointwise_pseudoinverse(&id).unwrap();
    assert!(inv.inverse.is_identity());
    let (shat, _, incl) = fixtures::sieve_inclusion(&site);
    let _ = shat;
    assert!(matches!(
        pseudonat_pointwise_pseudoinverse(&incl),
        Err(crate::Error::NotPointwiseEquivalence(_))
    ));
}

#[test]
fn pseudonat_enumeration_matches_brute_force() {
    // every pseudonatural transformation between discrete presheaves is a
    // natural transformation of presheaves of sets
    let site = fixtures::site_two();
    let a = Arc::new(fixtures::sheaf_two(&site).unwrap());
    let all = enumerate_pseudonats(&a, &a, 100_000).unwrap();
    // endomorphisms of the sheaf of functions into {a, b} are determined by
    // a self-map of {a, b} on each point
    assert_eq!(all.len(), 16);
    assert!(all.iter().all(|p| validate_pseudonat(p).is_valid()));
}
