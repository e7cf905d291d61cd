use std::sync::Arc;

use super::*;
use crate::descent::is_stack;
use crate::fincat::is_equivalence;
use crate::fixtures;
use crate::pstack::{cotensor_two, same_pf};
use crate::site::sieve_intersection;

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
fn identity_on_one_gives_trivial_fibers() {
    let site = fixtures::site_two();
    let one = terminal_prestack(&site);
    let po = path_object_unchecked(&PseudoNat::identity(&one), FiberModel::Exhaustive, default_bound()).unwrap();
    for u in site.cat().objects() {
        let fib = po.pf.fiber(u);
        // one copy of the trivial datum per covering sieve, all isomorphic
        assert_eq!(fib.num_objects(), site.covering_sieves(u).len());
        for x in fib.objects() {
            for y in fib.objects() {
                assert_eq!(fib.hom(x, y).len(), 1);
            }
        }
        assert!(is_equivalence(&po.q.components[u]).is_equivalence());
    }
}

#[test]
fn factorization_laws_on_two_point_site() {
    let site = fixtures::site_two();
    let mut maps: Vec<(String, PseudoNat)> = Vec::new();
    for name in ["ONE", "SHEAF-2", "PSH-SEP", "STACK-BZ2-TW"] {
        let a = named(&site, name);
        maps.push((format!("{name} → 1"), to_one(&a)));
        maps.push((format!("1_{name}"), PseudoNat::identity(&a)));
    }
    let (_, _, incl) = fixtures::sieve_inclusion(&site);
    maps.push(("sieve inclusion".into(), incl));
    let cot = cotensor_two(&named(&site, "SHEAF-2"));
    maps.push(("boundary SHEAF-2".into(), cot.boundary));
    for (name, f) in &maps {
        let po = path_object_prestack(f).unwrap();
        let r = verify_factorization(&po).unwrap();
        assert!(r.strict, "{name}");
        assert!(r.unit_lwe.holds, "{name}: {:?}", r.unit_lwe.witness);
        assert!(
            r.projection_fibration.holds,
            "{name}: {:?}",
            r.projection_fibration.witness
        );
        assert!(r.prestack.prestack, "{name}: {:?}", r.prestack.witness);
    }
}

#[test]
fn non_prestack_inputs_are_rejected() {
    let site = fixtures::site_two();
    let err = path_object_prestack(&to_one(&named(&site, "PSH-PAIR"))).unwrap_err();
    assert!(matches!(err, Error::NotAPrestack(_)));
    let err = stackify(&named(&site, "CONST-D2")).unwrap_err();
    assert!(matches!(err, Error::NotAPrestack(_)));
}

#[test]
fn stackification_of_constant_discrete_is_terminal_over_empty() {
    let site = fixtures::site_two();
    let po = path_object_unchecked(
        &to_one(&named(&site, "CONST-D2")),
        FiberModel::Exhaustive,
        default_bound(),
    )
    .unwrap();
    let empty = fixtures::object(&site, "empty");
    let fib = po.pf.fiber(empty);
    let first = fib.objects().next().unwrap();
    for x in fib.objects() {
        assert_eq!(fib.hom(x, first).len(), 1);
        assert_eq!(fib.hom(first, x).len(), 1);
    }
}

#[test]
fn stackification_produces_stacks() {
    let site = fixtures::site_two();
    for name in ["ONE", "SHEAF-2", "PSH-SEP", "STACK-BZ2-TW", "y(X)"] {
        let a = named(&site, name);
        let s = stackify(&a).unwrap();
        assert!(s.stack.holds, "{name}: {:?}", s.stack.witness);
        assert!(s.unit_lwe.holds, "{name}");
        let a_stack = is_stack(&a).unwrap().holds;
        assert_eq!(s.inverse.is_some(), a_stack, "{name}");
        if let Some(inv) = &s.inverse {
            assert!(validate_modification(&inv.unit).is_valid());
            assert!(validate_modification(&inv.counit).is_valid());
        }
    }
}

#[test]
fn normal_form_agrees_with_intersection_representatives() {
    // for prestack sources restriction from S ∩ S' to the minimal sieve is
    // injective, so both ways of identifying arrows coincide
    let site = fixtures::site_two();
    let f = to_one(&named(&site, "PSH-SEP"));
    let po = path_object_unchecked(&f, FiberModel::Exhaustive, default_bound()).unwrap();
    let budget = Budget::new(default_bound(), "test");
    for fib in &po.fibers {
        let min_fam = fib.minimal_context().cover.clone();
        for x in 0..fib.table.objects.len() {
            for y in 0..fib.table.objects.len() {
                let (i, dx) = &fib.table.objects[x];
                let (j, dy) = &fib.table.objects[y];
                let meet = sieve_intersection(&fib.sieves[*i], &fib.sieves[*j]).unwrap();
                let k = fib.sieve_index(&meet).expect("intersection covers");
                let ctx = &fib.contexts[k];
                let to_meet_x = subcover_positions(&fib.contexts[*i].cover, &ctx.cover).unwrap();
                let to_meet_y = subcover_positions(&fib.contexts[*j].cover, &ctx.cover).unwrap();
                let sx = restrict_object(&to_meet_x, fib.contexts[*i].len(), dx);
                let sy = restrict_object(&to_meet_y, fib.contexts[*j].len(), dy);
                let pos = subcover_positions(&ctx.cover, &min_fam).unwrap();
                let reps = ctx.morphisms_between(&sx, &sy, false, &budget).unwrap();
                let mut images: Vec<DescentMorphism> = reps.iter().map(|m| restrict_morphism(&pos, m)).collect();
                images.sort();
                images.dedup();
                assert_eq!(images.len(), reps.len());
            }
        }
    }
}

#[test]
fn isocomma_of_identities_is_the_iso_arrow_category() {
    let site = fixtures::site_two();
    let a = named(&site, "STACK-BZ2-TW");
    let id = PseudoNat::identity(&a);
    let iso = isocomma(&id, &id).unwrap();
    for u in site.cat().objects() {
        let fa = a.fiber(u);
        let isos: usize = fa
            .objects()
            .flat_map(|x| fa.objects().map(move |y| (x, y)))
            .map(|(x, y)| fa.isos(x, y).count())
            .sum();
        assert_eq!(iso.pf.fiber(u).num_objects(), isos);
    }
    assert!(is_prestack(&iso.pf).unwrap().prestack);
}

#[test]
fn mediator_of_the_universal_cone_is_the_identity() {
    let site = fixtures::site_two();
    let (_, _, incl) = fixtures::sieve_inclusion(&site);
    let id = PseudoNat::identity(&incl.target);
    let iso = isocomma(&incl, &id).unwrap();
    let z = isocomma_mediator(&iso, &iso.left, &iso.right, &iso.chi).unwrap();
    assert!(z.is_identity());
    assert!(same_pf(&z.source, &iso.pf));
}

#[test]
fn factorization_through_the_isocomma() {
    let site = fixtures::site_two();
    let (_, _, incl) = fixtures::sieve_inclusion(&site);
    let mut maps = vec![("sieve inclusion", incl)];
    for name in ["SHEAF-2", "STACK-BZ2-TW", "PSH-SEP"] {
        let a = named(&site, name);
        maps.push((name, to_one(&a)));
    }
    maps.push(("identity", PseudoNat::identity(&named(&site, "SHEAF-2"))));
    for (name, f) in &maps {
        let r = factor_through_isocomma(f).unwrap();
        assert!(r.strict, "{name}");
        assert!(r.i_lwe.holds, "{name}: {:?}", r.i_lwe.witness);
        if r.source_is_stack {
            assert!(r.p_fibration.holds, "{name}: {:?}", r.p_fibration.witness);
        }
        // the cone (1, f, 1) is recovered exactly
        let cell = Modification {
            source: f.after(&PseudoNat::identity(&f.source)),
            target: PseudoNat::identity(&f.target).after(f),
            components: f.components.iter().map(NatTrans::identity).collect(),
        };
        let rep = mediator_equations(&r.iso, &r.i, &PseudoNat::identity(&f.source), f, &cell);
        assert!(rep.is_valid(), "{name}: {rep}");
    }
}

#[test]
fn transversal_model_is_equivalent_to_the_exhaustive_one() {
    let site = fixtures::site_two();
    for name in ["SHEAF-2", "PSH-SEP", "STACK-BZ2-TW"] {
        let f = to_one(&named(&site, name));
        let small = path_object_unchecked(&f, FiberModel::Transversal, default_bound()).unwrap();
        let big = path_object_unchecked(&f, FiberModel::Exhaustive, default_bound()).unwrap();
        for u in site.cat().objects() {
            let (sf, bf) = (&small.fibers[u], &big.fibers[u]);
            // the inclusion on objects, identity on normal-form arrows
            let obj_map: Vec<usize> = sf
                .table
                .objects
                .iter()
                .map(|o| bf.table.object_index(o).expect("subset"))
                .collect();
            let mor_map: Vec<usize> = sf
                .table
                .morphisms
                .iter()
                .map(|(x, y, m)| bf.table.morphism_index(obj_map[*x], obj_map[*y], m).expect("full"))
                .collect();
            let incl = Functor {
                source: sf.cat().clone(),
                target: bf.cat().clone(),
                obj_map,
                mor_map,
            };
            assert!(incl.validate().is_valid());
            assert!(is_equivalence(&incl).is_equivalence(), "{name} at {u}");
        }
    }
}
