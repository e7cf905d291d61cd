//! The reference corpus: three small sites and the pseudofunctors and maps
//! over them that tests, the acceptance suite and the CLI `laws` command
//! share.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::fincat::standard::{self, Product};
use crate::fincat::{FinCategory, Functor, NatTrans};
use crate::hofib::NamedMap;
use crate::pstack::{bang, cotensor_two, representable, sieve_subfunctor, terminal_prestack, PseudoNat, Pseudofunctor};
use crate::site::{open_set_lattice, union_basis, CoverFamily, Sieve, Site};
use crate::Result;

/// Open sets of the one-point space.
pub const OPENS_POINT: [(&str, u64); 2] = [("empty", 0), ("pt", 1)];
/// Open sets of the two-point discrete space.
pub const OPENS_TWO: [(&str, u64); 4] = [("empty", 0), ("1", 1), ("2", 2), ("X", 3)];

fn lattice_site(opens: &[(&str, u64)]) -> Arc<Site> {
    let sk = open_set_lattice(opens).expect("open set lattice");
    let basis = union_basis(&sk, opens);
    Arc::new(Site::from_basis(sk, basis).expect("union basis is valid"))
}

/// `SITE-PT`: opens of a point, covered by unions.
pub fn site_point() -> Arc<Site> {
    lattice_site(&OPENS_POINT)
}

/// `SITE-2`: opens of the two-point discrete space, covered by unions
/// (the empty family covers `empty`).
pub fn site_two() -> Arc<Site> {
    lattice_site(&OPENS_TWO)
}

/// `SITE-TRIV`: the category of `SITE-2` with only maximal sieves covering.
pub fn site_trivial() -> Arc<Site> {
    let sk = open_set_lattice(&OPENS_TWO).expect("open set lattice");
    Arc::new(Site::trivial(sk).expect("trivial topology"))
}

/// The three reference sites with their names.
pub fn sites() -> Vec<(String, Arc<Site>)> {
    vec![
        ("SITE-PT".into(), site_point()),
        ("SITE-2".into(), site_two()),
        ("SITE-TRIV".into(), site_trivial()),
    ]
}

pub fn object(site: &Site, id: &str) -> usize {
    site.cat().object_index(id).expect("fixture object")
}

pub fn arrow(site: &Site, id: &str) -> usize {
    site.cat().morphism_index(id).expect("fixture arrow")
}

/// A presheaf of sets given by element names and a restriction rule
/// `(arrow id, element) → element`.
pub fn presheaf_of_sets(
    site: &Arc<Site>,
    sets: &BTreeMap<&str, Vec<&str>>,
    restrict: impl Fn(&str, &str) -> String,
) -> Result<Pseudofunctor> {
    let c = site.cat().clone();
    let sets_by_index: Vec<Vec<String>> = c
        .objects()
        .map(|u| sets[c.object_id(u)].iter().map(|s| s.to_string()).collect())
        .collect();
    let maps = c
        .morphisms()
        .map(|t| {
            let (v, u) = (c.dom(t), c.cod(t));
            sets_by_index[u]
                .iter()
                .map(|x| {
                    let y = restrict(c.morphism_id(t), x);
                    sets_by_index[v].iter().position(|z| *z == y).unwrap_or(usize::MAX)
                })
                .collect()
        })
        .collect();
    Pseudofunctor::from_sets(site.clone(), sets_by_index, maps)
}

/// A pseudofunctor from fibers by object id and restriction functors by
/// arrow id; coherence is chosen by [`Pseudofunctor::from_restrictions`].
pub fn from_fibers(
    site: &Arc<Site>,
    fibers: &BTreeMap<&str, Arc<FinCategory>>,
    restrict: impl Fn(&str, &Arc<FinCategory>, &Arc<FinCategory>) -> Result<Functor>,
) -> Result<Pseudofunctor> {
    let c = site.cat().clone();
    let fib: Vec<Arc<FinCategory>> = c.objects().map(|u| fibers[c.object_id(u)].clone()).collect();
    let res = c
        .morphisms()
        .map(|t| {
            let (v, u) = (c.dom(t), c.cod(t));
            if c.is_identity(t) {
                return Ok(Functor::identity(&fib[u]));
            }
            restrict(c.morphism_id(t), &fib[u], &fib[v])
        })
        .collect::<Result<Vec<_>>>()?;
    Pseudofunctor::from_restrictions(site.clone(), fib, res)
}

/// `SHEAF-2`: functions from the points of an open to `{a, b}`.
pub fn sheaf_two(site: &Arc<Site>) -> Result<Pseudofunctor> {
    let sets = BTreeMap::from([
        ("X", vec!["aa", "ab", "ba", "bb"]),
        ("1", vec!["a", "b"]),
        ("2", vec!["a", "b"]),
        ("empty", vec!["*"]),
    ]);
    presheaf_of_sets(site, &sets, |t, x| match t {
        "1<X" => x[..1].to_string(),
        "2<X" => x[1..].to_string(),
        t if t.starts_with("empty<") => "*".to_string(),
        _ => x.to_string(),
    })
}

/// `PSH-SEP`: constant functions only over `X`, all functions over the
/// points; separated, so a prestack, but `ab` has no amalgamation.
pub fn psh_separated(site: &Arc<Site>) -> Result<Pseudofunctor> {
    let sets = BTreeMap::from([
        ("X", vec!["aa", "bb"]),
        ("1", vec!["a", "b"]),
        ("2", vec!["a", "b"]),
        ("empty", vec!["*"]),
    ]);
    presheaf_of_sets(site, &sets, |t, x| match t {
        "1<X" => x[..1].to_string(),
        "2<X" => x[1..].to_string(),
        t if t.starts_with("empty<") => "*".to_string(),
        _ => x.to_string(),
    })
}

/// `CONST-D2`: the constant pseudofunctor at the discrete category `{x, y}`.
pub fn const_discrete_two(site: &Arc<Site>) -> Pseudofunctor {
    Pseudofunctor::constant(site.clone(), &standard::discrete(&["x", "y"]))
}

/// `CONST-BZ2`: the constant pseudofunctor at the cyclic group of order 2.
pub fn const_bz2(site: &Arc<Site>) -> Pseudofunctor {
    Pseudofunctor::constant(site.clone(), &standard::cyclic_group(2))
}

/// `PSH-PAIR`: parallel arrows `u, v` over `X` that both restrict to the
/// single arrow of **2** on each point; not separated.
pub fn psh_pair(site: &Arc<Site>) -> Result<Pseudofunctor> {
    let arrow2 = standard::walking_arrow();
    let fibers = BTreeMap::from([
        ("X", standard::parallel_pair()),
        ("1", arrow2.clone()),
        ("2", arrow2),
        ("empty", standard::terminal()),
    ]);
    from_fibers(site, &fibers, |t, src, tgt| {
        if t.starts_with("empty<") {
            return Ok(Functor::constant(src, tgt, 0));
        }
        Functor::from_ids(src, tgt, &[("a", "a"), ("b", "b")], &[("u", "u"), ("v", "u")])
    })
}

/// `PSH-GAP`: no arrow `a → b` over `X`, but one over each point agreeing
/// on the overlap; separated, does not glue.
pub fn psh_gap(site: &Arc<Site>) -> Result<Pseudofunctor> {
    let arrow2 = standard::walking_arrow();
    let fibers = BTreeMap::from([
        ("X", standard::discrete(&["a", "b"])),
        ("1", arrow2.clone()),
        ("2", arrow2),
        ("empty", standard::terminal()),
    ]);
    from_fibers(site, &fibers, |t, src, tgt| {
        if t.starts_with("empty<") {
            return Ok(Functor::constant(src, tgt, 0));
        }
        Functor::from_ids(src, tgt, &[("a", "a"), ("b", "b")], &[])
    })
}

/// `STACK-BZ2-TW`: pairs of `Z/2`-torsors over `X`, one torsor over each
/// point, and an indiscrete two-object fiber over `empty` reached through
/// different objects from the two points, so that composite coherence is not
/// the identity.
pub fn stack_bz2_twisted(site: &Arc<Site>) -> Result<Pseudofunctor> {
    let g = standard::cyclic_group(2);
    let pair = Product::new(&g, &g);
    let fibers = BTreeMap::from([
        ("X", pair.cat.clone()),
        ("1", g.clone()),
        ("2", g),
        ("empty", standard::indiscrete(&["p", "q"])),
    ]);
    let (left, right) = pair.projections();
    from_fibers(site, &fibers, |t, src, tgt| {
        Ok(match t {
            "1<X" => left.clone(),
            "2<X" => right.clone(),
            "empty<2" => Functor::constant(src, tgt, 1),
            _ => Functor::constant(src, tgt, 0),
        })
    })
}

/// `CONST-BZ2` with the coherence of `X<X` followed by `1<X` replaced by
/// the generator; violates pseudofunctor coherence.
pub fn bz2_mutated(site: &Arc<Site>) -> Result<Pseudofunctor> {
    let base = const_bz2(site);
    let c = site.cat().clone();
    let mut phi: Vec<Vec<NatTrans>> = base.phi_table().to_vec();
    let f = arrow(site, "X<X");
    let g = arrow(site, "1<X");
    let pos = c.incoming_position(g);
    phi[f][pos].components = vec![1];
    Pseudofunctor::new_unchecked(
        site.clone(),
        base.fibers().to_vec(),
        base.restrictions().to_vec(),
        base.upsilons().to_vec(),
        phi,
    )
}

/// The sieve on `X` generated by both points.
pub fn two_point_sieve(site: &Site) -> Sieve {
    site.generate_sieve(&CoverFamily {
        apex: object(site, "X"),
        members: vec![arrow(site, "1<X"), arrow(site, "2<X")],
    })
}

/// `S-HAT`: the covering sieve subfunctor of `yX` and its inclusion.
pub fn sieve_inclusion(site: &Arc<Site>) -> (Arc<Pseudofunctor>, Arc<Pseudofunctor>, PseudoNat) {
    sieve_subfunctor(site, &two_point_sieve(site))
}

/// A named pseudofunctor of the corpus.
#[derive(Debug, Clone)]
pub struct NamedPf {
    pub name: String,
    pub pf: Arc<Pseudofunctor>,
}

/// Every valid pseudofunctor of the corpus over `site`, with stable names.
/// Fixtures that only make sense over the two-point lattice are included
/// for `SITE-2` and `SITE-TRIV`.
pub fn pseudofunctors(site: &Arc<Site>) -> Vec<NamedPf> {
    let named = |name: &str, pf: Pseudofunctor| NamedPf {
        name: name.to_string(),
        pf: Arc::new(pf),
    };
    let mut out = vec![NamedPf {
        name: "ONE".into(),
        pf: terminal_prestack(site),
    }];
    out.push(named("CONST-D2", const_discrete_two(site)));
    out.push(named("CONST-BZ2", const_bz2(site)));
    let lattice_two = site.cat().object_index("X").is_some();
    if lattice_two {
        out.push(named("SHEAF-2", sheaf_two(site).expect("SHEAF-2")));
        out.push(named("PSH-PAIR", psh_pair(site).expect("PSH-PAIR")));
        out.push(named("PSH-GAP", psh_gap(site).expect("PSH-GAP")));
        out.push(named("PSH-SEP", psh_separated(site).expect("PSH-SEP")));
        out.push(named("STACK-BZ2-TW", stack_bz2_twisted(site).expect("STACK-BZ2-TW")));
        let (shat, _, _) = sieve_inclusion(site);
        out.push(NamedPf {
            name: "S-HAT".into(),
            pf: shat,
        });
    }
    for u in site.cat().objects() {
        out.push(NamedPf {
            name: format!("y({})", site.cat().object_id(u)),
            pf: representable(site, u),
        });
    }
    out
}

/// The fixture maps over `site`: for every fixture `A`, the maps `A->1`,
/// `id(A)` and `boundary(A)`, and on the two-point lattice the inclusion
/// `incl(S-HAT)`.
pub fn maps(site: &Arc<Site>) -> Vec<NamedMap> {
    let one = terminal_prestack(site);
    let mut out = Vec::new();
    for n in pseudofunctors(site) {
        out.push(NamedMap {
            name: format!("{}->1", n.name),
            map: bang(&n.pf, &one),
        });
        out.push(NamedMap {
            name: format!("id({})", n.name),
            map: PseudoNat::identity(&n.pf),
        });
        out.push(NamedMap {
            name: format!("boundary({})", n.name),
            map: cotensor_two(&n.pf).boundary,
        });
    }
    if site.cat().object_index("X").is_some() {
        let (_, _, incl) = sieve_inclusion(site);
        out.push(NamedMap {
            name: "incl(S-HAT)".into(),
            map: incl,
        });
    }
    out
}
