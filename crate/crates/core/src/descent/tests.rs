use std::sync::Arc;

use proptest::prelude::*;

use super::*;
use crate::fincat::{is_equivalence, Functor};
use crate::fixtures::{self, arrow, object};
use crate::pstack::{bang, is_prestack, terminal_prestack, Modification, PseudoNat, Pseudofunctor};
use crate::site::{maximal_sieve, CoverFamily, Site};

fn to_one(f: &Arc<Pseudofunctor>) -> PseudoNat {
    bang(f, &terminal_prestack(f.site()))
}

fn family(site: &Site, apex: &str, members: &[&str]) -> CoverFamily {
    CoverFamily {
        apex: object(site, apex),
        members: members.iter().map(|m| arrow(site, m)).collect(),
    }
}

fn named(site: &Arc<Site>, name: &str) -> Arc<Pseudofunctor> {
    fixtures::pseudofunctors(site)
        .into_iter()
        .find(|n| n.name == name)
        .map(|n| n.pf)
        .expect("fixture")
}

/// Objects and morphisms of descent data for a constant group-valued
/// pseudofunctor mapped to 1: matrices `ϑ` over `Z/2` with zero diagonal and
/// `ϑ_ab + ϑ_bc = ϑ_ac`, and families `g` with `ϑ'_ab + g_b = g_a + ϑ_ab`.
fn constant_z2_oracle(n: usize) -> (usize, usize) {
    let thetas: Vec<Vec<u8>> = (0u32..1 << (n * n))
        .map(|bits| (0..n * n).map(|k| ((bits >> k) & 1) as u8).collect())
        .filter(|t: &Vec<u8>| {
            (0..n).all(|a| t[a * n + a] == 0)
                && (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| t[a * n + b] ^ t[b * n + c] == t[a * n + c])))
        })
        .collect();
    let mut morphisms = 0;
    for s in &thetas {
        for t in &thetas {
            for bits in 0u32..1 << n {
                let g: Vec<u8> = (0..n).map(|k| ((bits >> k) & 1) as u8).collect();
                let ok = (0..n).all(|a| (0..n).all(|b| t[a * n + b] ^ g[b] == g[a] ^ s[a * n + b]));
                if ok {
                    morphisms += 1;
                }
            }
        }
    }
    (thetas.len(), morphisms)
}

#[test]
fn constant_group_over_two_points_matches_oracle() {
    let site = fixtures::site_two();
    let bz2 = Arc::new(fixtures::const_bz2(&site));
    let d = build_descent_category(&to_one(&bz2), &family(&site, "X", &["1<X", "2<X"])).unwrap();
    // (2, 8)
    assert_eq!((d.objects.len(), d.morphisms.len()), constant_z2_oracle(2));
    assert!(d.cat.num_objects() == 2 && d.cat.num_morphisms() == 8);
}

#[test]
fn empty_cover_gives_the_base_fiber() {
    for site in [fixtures::site_point(), fixtures::site_two(), fixtures::site_trivial()] {
        for n in fixtures::pseudofunctors(&site) {
            let p = to_one(&n.pf);
            for u in site.cat().objects() {
                let cover = CoverFamily {
                    apex: u,
                    members: vec![],
                };
                let d = build_descent_category(&p, &cover).unwrap();
                assert_eq!(d.cat.num_objects(), p.target.fiber(u).num_objects());
                assert_eq!(d.cat.num_morphisms(), p.target.fiber(u).num_morphisms());
                assert!(d.pi.validate().is_valid());
                assert!(is_equivalence(&d.pi).is_equivalence(), "{}", n.name);
            }
        }
    }
}

#[test]
fn phi_is_a_functor_into_valid_descent_data() {
    let site = fixtures::site_two();
    for n in fixtures::pseudofunctors(&site) {
        let p = to_one(&n.pf);
        let prestack = is_prestack(&n.pf).unwrap().prestack;
        for u in site.cat().objects() {
            for cover in site.test_families(u) {
                let d = build_descent_category(&p, &cover).unwrap();
                for o in &d.objects {
                    assert!(d.ctx.check_object(o).is_valid());
                }
                let f = phi(&d).unwrap();
                assert!(f.validate().is_valid(), "{}", n.name);
                if prestack {
                    assert!(
                        is_equivalence(&f).faithful(),
                        "{} over {}",
                        n.name,
                        cover.describe(site.cat())
                    );
                }
            }
        }
    }
}

#[test]
fn phi_is_not_faithful_for_unseparated_sources() {
    let site = fixtures::site_two();
    let bz2 = named(&site, "CONST-BZ2");
    let empty = CoverFamily {
        apex: object(&site, "empty"),
        members: vec![],
    };
    let d = build_descent_category(&to_one(&bz2), &empty).unwrap();
    assert_eq!(
        is_equivalence(&phi(&d).unwrap()).not_faithful,
        Some(("g0".to_string(), "g1".to_string()))
    );
    let pair = named(&site, "PSH-PAIR");
    let d = build_descent_category(&to_one(&pair), &family(&site, "X", &["1<X", "2<X"])).unwrap();
    assert_eq!(
        is_equivalence(&phi(&d).unwrap()).not_faithful,
        Some(("u".to_string(), "v".to_string()))
    );
}

#[test]
fn maximal_sieve_phi_is_an_equivalence() {
    let site = fixtures::site_two();
    for n in fixtures::pseudofunctors(&site) {
        for p in [to_one(&n.pf), PseudoNat::identity(&n.pf)] {
            for u in site.cat().objects() {
                let cover = maximal_sieve(site.cat(), u).to_family();
                let d = build_descent_category(&p, &cover).unwrap();
                let dec = is_equivalence(&phi(&d).unwrap());
                assert!(dec.is_equivalence(), "{}: {dec:?}", n.name);
            }
        }
    }
}

#[test]
fn stacks_on_the_two_point_site() {
    let site = fixtures::site_two();
    for (name, expected) in [
        ("ONE", true),
        ("CONST-D2", false),
        ("CONST-BZ2", false),
        ("SHEAF-2", true),
        ("PSH-PAIR", false),
        ("PSH-GAP", false),
        ("STACK-BZ2-TW", true),
        ("y(X)", true),
        ("y(1)", true),
    ] {
        let dec = is_stack(&named(&site, name)).unwrap();
        assert_eq!(dec.holds, expected, "{name}: {dec:?}");
        assert_eq!(dec.witness.is_some(), !expected);
    }
    let w = is_stack(&named(&site, "CONST-D2")).unwrap().witness.unwrap();
    assert_eq!(w.reason, "not full");
}

#[test]
fn everything_is_a_stack_for_the_trivial_topology() {
    let site = fixtures::site_trivial();
    for n in fixtures::pseudofunctors(&site) {
        assert!(is_stack(&n.pf).unwrap().holds, "{}", n.name);
    }
}

#[test]
fn sieve_modes_agree_with_basis_on_stacks() {
    let site = fixtures::site_two();
    for name in ["SHEAF-2", "CONST-D2", "PSH-GAP"] {
        let f = named(&site, name);
        let basis = is_stack_with(&f, CoverMode::Basis, default_bound()).unwrap().holds;
        let sieves = is_stack_with(&f, CoverMode::Sieves, default_bound()).unwrap().holds;
        assert_eq!(basis, sieves, "{name}");
    }
}

#[test]
fn local_weak_equivalences() {
    let site = fixtures::site_two();
    let (_, _, incl) = fixtures::sieve_inclusion(&site);
    assert!(is_lwe(&incl).unwrap().holds);
    let d2 = named(&site, "CONST-D2");
    let dec = is_lwe(&to_one(&d2)).unwrap();
    assert!(!dec.holds);
    assert_eq!(dec.witness.unwrap().reason, "not full");
    let sheaf = named(&site, "SHEAF-2");
    assert!(is_lwe(&PseudoNat::identity(&sheaf)).unwrap().holds);
}

#[test]
fn descent_datum_from_the_sieve_inclusion() {
    let site = fixtures::site_two();
    let (_, yx, incl) = fixtures::sieve_inclusion(&site);
    let x = object(&site, "X");
    let top = yx.fiber(x).object_index("X<X").unwrap();
    let (ctx, d) = descent_from_lwe(&incl, x, top).unwrap();
    assert!(ctx.check_object(&d).is_valid());
    assert_eq!(d.base, top);
    assert!(!ctx.cover.members.contains(&arrow(&site, "X<X")));
}

#[test]
fn amalgamation_recovers_global_sections() {
    let site = fixtures::site_two();
    let sheaf = named(&site, "SHEAF-2");
    let ctx = DescentContext::new(&to_one(&sheaf), &family(&site, "X", &["1<X", "2<X"])).unwrap();
    for x in sheaf.fiber(object(&site, "X")).objects() {
        let (y, m) = amalgamate(&ctx, &ctx.phi_object(x)).unwrap();
        assert_eq!(y, x);
        assert_eq!(m, ctx.identity(&ctx.phi_object(x)));
    }
}

#[test]
fn restriction_to_a_subcover_commutes_with_phi() {
    let site = fixtures::site_two();
    let f = named(&site, "STACK-BZ2-TW");
    let p = to_one(&f);
    let big = build_descent_category(&p, &family(&site, "X", &["1<X", "2<X", "empty<X"])).unwrap();
    let small = build_descent_category(&p, &family(&site, "X", &["2<X", "1<X"])).unwrap();
    let r = restrict_to_subcover(&big, &small).unwrap();
    assert!(r.validate().is_valid());
    assert_eq!(r.after(&phi(&big).unwrap()), phi(&small).unwrap());
    assert_eq!(small.pi.after(&r), big.pi);
}

#[test]
fn base_change_is_functorial() {
    let site = fixtures::site_two();
    let f = named(&site, "STACK-BZ2-TW");
    let p = to_one(&f);
    let cover = family(&site, "X", &["1<X", "2<X"]);
    let from = build_descent_category(&p, &cover).unwrap();
    for g in ["1<X", "2<X", "empty<X", "X<X"] {
        let pc = PulledBackCover::of_family(&site, &cover, arrow(&site, g));
        let to = build_descent_category(&p, &pc.cover).unwrap();
        let bc = base_change(&from, &to, &pc).unwrap();
        assert!(bc.validate().is_valid(), "{g}");
    }
    let sieve = maximal_sieve(site.cat(), object(&site, "X")).to_family();
    let from = build_descent_category(&p, &sieve).unwrap();
    let pc = PulledBackCover::of_sieve(&site, &sieve, arrow(&site, "1<X"));
    let to = build_descent_category(&p, &pc.cover).unwrap();
    assert!(base_change(&from, &to, &pc).unwrap().validate().is_valid());
}

#[test]
fn pushforward_along_a_square_commutes_with_projections() {
    let site = fixtures::site_two();
    let f = named(&site, "STACK-BZ2-TW");
    let one = terminal_prestack(&site);
    let i = to_one(&f);
    let target = PseudoNat::identity(&one);
    // h = (F → 1), k = identity, γ the identity modification on F → 1
    let h = to_one(&f);
    let k = PseudoNat::identity(&one);
    let gamma = Modification::identity(&i);
    let sq = SquareData {
        h: &h,
        k: &k,
        gamma: &gamma,
    };
    let cover = family(&site, "X", &["1<X", "2<X"]);
    let from = build_descent_category(&i, &cover).unwrap();
    let to = build_descent_category(&target, &cover).unwrap();
    let push = pushforward_square(&sq, &from, &to).unwrap();
    assert!(push.validate().is_valid());
    assert_eq!(to.pi.after(&push), k.components[cover.apex].after(&from.pi));
    let g = gamma_hat(&sq, &from, &to).unwrap();
    assert!(g.is_iso());
}

#[test]
fn identity_square_pushes_forward_to_the_identity() {
    let site = fixtures::site_two();
    let f = named(&site, "SHEAF-2");
    let i = to_one(&f);
    let h = PseudoNat::identity(&f);
    let k = PseudoNat::identity(&i.target);
    let gamma = Modification::identity(&i);
    let sq = SquareData {
        h: &h,
        k: &k,
        gamma: &gamma,
    };
    let cover = family(&site, "X", &["1<X", "2<X"]);
    let d = build_descent_category(&i, &cover).unwrap();
    let push = pushforward_square(&sq, &d, &d).unwrap();
    assert_eq!(push, Functor::identity(&d.cat));
    assert!(gamma_hat(&sq, &d, &d).unwrap().is_identity());
}

#[test]
fn bounds_are_enforced() {
    let site = fixtures::site_two();
    let f = named(&site, "STACK-BZ2-TW");
    let err = build_descent_category_bounded(&to_one(&f), &family(&site, "X", &["1<X", "2<X"]), 3).unwrap_err();
    assert!(matches!(err, Error::BoundExceeded { .. }));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn phi_preserves_composition(pf in 0usize..14, u in 0usize..4, k in 0usize..32) {
        let site = fixtures::site_two();
        let corpus = fixtures::pseudofunctors(&site);
        let n = &corpus[pf % corpus.len()];
        let families = site.test_families(u);
        let cover = &families[k % families.len()];
        let ctx = DescentContext::new(&to_one(&n.pf), cover).unwrap();
        let fib = n.pf.fiber(u);
        for g in fib.morphisms() {
            for &f in fib.incoming(fib.dom(g)) {
                let lhs = ctx.phi_morphism(fib.comp(g, f));
                let rhs = ctx.compose(&ctx.phi_morphism(g), &ctx.phi_morphism(f));
                prop_assert_eq!(lhs, rhs);
            }
        }
        for x in fib.objects() {
            prop_assert!(ctx.check_object(&ctx.phi_object(x)).is_valid());
        }
    }
}
