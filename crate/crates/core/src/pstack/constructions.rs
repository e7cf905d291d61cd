//! Stock pseudofunctors and transformations: terminal, constants,
//! representables, sieve subfunctors, products, diagonals and the cotensor
//! with the walking arrow.

use std::sync::Arc;

use super::{PseudoNat, Pseudofunctor};
use crate::fincat::standard::{self, ArrowCat, ArrowSquare, Product};
use crate::fincat::{FinCategory, Functor, NatTrans};
use crate::site::{Sieve, Site};
use crate::{Error, Result};

impl Pseudofunctor {
    /// Identity coherence throughout; the restriction functors must compose
    /// strictly.
    pub fn strict(site: Arc<Site>, fibers: Vec<Arc<FinCategory>>, restrict: Vec<Functor>) -> Result<Pseudofunctor> {
        let c = site.cat().clone();
        let upsilon = c
            .objects()
            .map(|u| NatTrans::identity(&restrict[c.identity(u)]))
            .collect();
        let phi = c
            .morphisms()
            .map(|f| {
                c.incoming(c.dom(f))
                    .iter()
                    .map(|&g| NatTrans::identity(&restrict[c.comp(f, g)]))
                    .collect()
            })
            .collect();
        Pseudofunctor::new(site, fibers, restrict, upsilon, phi)
    }

    /// A presheaf of sets, viewed as a pseudofunctor with discrete fibers.
    /// `maps[t][x]` is the index of `x·t` in `sets[dom t]`.
    pub fn from_sets(site: Arc<Site>, sets: Vec<Vec<String>>, maps: Vec<Vec<usize>>) -> Result<Pseudofunctor> {
        let c = site.cat().clone();
        let fibers: Vec<Arc<FinCategory>> = sets.iter().map(|s| standard::discrete(s)).collect();
        // discrete categories keep the given order only if it was sorted
        let index_of = |u: usize, i: usize| {
            fibers[u]
                .object_index(&sets[u][i])
                .expect("element present in its fiber")
        };
        let mut restrict = Vec::with_capacity(c.num_morphisms());
        for t in c.morphisms() {
            let (v, u) = (c.dom(t), c.cod(t));
            let mut obj_map = vec![0; fibers[u].num_objects()];
            for (i, &j) in maps[t].iter().enumerate() {
                if j >= sets[v].len() {
                    return Err(Error::shape("presheaf map leaves its codomain"));
                }
                obj_map[index_of(u, i)] = index_of(v, j);
            }
            let mor_map = obj_map.iter().map(|&y| fibers[v].identity(y)).collect::<Vec<_>>();
            let mut mm = vec![0; fibers[u].num_morphisms()];
            for x in fibers[u].objects() {
                mm[fibers[u].identity(x)] = mor_map[x];
            }
            restrict.push(Functor {
                source: fibers[u].clone(),
                target: fibers[v].clone(),
                obj_map,
                mor_map: mm,
            });
        }
        Pseudofunctor::strict(site, fibers, restrict)
    }

    /// The same category at every object, restrictions identities.
    pub fn constant(site: Arc<Site>, cat: &Arc<FinCategory>) -> Pseudofunctor {
        let c = site.cat().clone();
        let fibers = vec![cat.clone(); c.num_objects()];
        let restrict = vec![Functor::identity(cat); c.num_morphisms()];
        Pseudofunctor::strict(site, fibers, restrict).expect("constant pseudofunctor is strict")
    }
}

/// The terminal prestack: one object, one arrow everywhere.
pub fn terminal_prestack(site: &Arc<Site>) -> Arc<Pseudofunctor> {
    Arc::new(Pseudofunctor::constant(site.clone(), &standard::terminal()))
}

/// The unique map `a → 1` into a given terminal prestack.
pub fn bang(a: &Arc<Pseudofunctor>, one: &Arc<Pseudofunctor>) -> PseudoNat {
    let c = a.cat().clone();
    let components = c
        .objects()
        .map(|u| Functor::constant(a.fiber(u), one.fiber(u), 0))
        .collect();
    PseudoNat::strict(a, one, components).expect("maps into the terminal prestack are strict")
}

/// `yU(V)` is the discrete category on `hom(V, U)`.
pub fn representable(site: &Arc<Site>, u: usize) -> Arc<Pseudofunctor> {
    let c = site.cat().clone();
    let sets: Vec<Vec<String>> = c
        .objects()
        .map(|v| c.hom(v, u).iter().map(|&h| c.morphism_id(h).to_string()).collect())
        .collect();
    let maps = c
        .morphisms()
        .map(|t| {
            let (w, v) = (c.dom(t), c.cod(t));
            c.hom(v, u)
                .iter()
                .map(|&h| {
                    let ht = c.comp(h, t);
                    c.hom(w, u).iter().position(|&k| k == ht).expect("composite in hom")
                })
                .collect()
        })
        .collect();
    Arc::new(Pseudofunctor::from_sets(site.clone(), sets, maps).expect("representable is strict"))
}

/// The subfunctor of `yU` picked out by a sieve, and its inclusion.
pub fn sieve_subfunctor(site: &Arc<Site>, sieve: &Sieve) -> (Arc<Pseudofunctor>, Arc<Pseudofunctor>, PseudoNat) {
    let c = site.cat().clone();
    let u = sieve.apex;
    let yu = representable(site, u);
    let members = |v: usize| -> Vec<usize> { c.hom(v, u).iter().copied().filter(|&h| sieve.contains(h)).collect() };
    let sets: Vec<Vec<String>> = c
        .objects()
        .map(|v| members(v).iter().map(|&h| c.morphism_id(h).to_string()).collect())
        .collect();
    let maps = c
        .morphisms()
        .map(|t| {
            let (w, v) = (c.dom(t), c.cod(t));
            let target = members(w);
            members(v)
                .iter()
                .map(|&h| {
                    let ht = c.comp(h, t);
                    target.iter().position(|&k| k == ht).expect("sieve closed")
                })
                .collect()
        })
        .collect();
    let s = Arc::new(Pseudofunctor::from_sets(site.clone(), sets, maps).expect("sieve subfunctor is strict"));
    let components = c
        .objects()
        .map(|v| {
            let (fs, fy) = (s.fiber(v), yu.fiber(v));
            let obj_map: Vec<usize> = fs
                .objects()
                .map(|x| fy.object_index(fs.object_id(x)).expect("member of hom"))
                .collect();
            let mor_map = fs.morphisms().map(|m| fy.identity(obj_map[fs.dom(m)])).collect();
            Functor {
                source: fs.clone(),
                target: fy.clone(),
                obj_map,
                mor_map,
            }
        })
        .collect();
    let incl = PseudoNat::strict(&s, &yu, components).expect("inclusion is strict");
    (s, yu, incl)
}

/// A fiberwise product with the bookkeeping needed to address pairs.
#[derive(Debug, Clone)]
pub struct ProductPrestack {
    pub pf: Arc<Pseudofunctor>,
    pub left: Arc<Pseudofunctor>,
    pub right: Arc<Pseudofunctor>,
    pub fibers: Vec<Product>,
}

impl ProductPrestack {
    pub fn projections(&self) -> (PseudoNat, PseudoNat) {
        let c = self.pf.cat().clone();
        let (mut l, mut r) = (Vec::new(), Vec::new());
        for u in c.objects() {
            let (a, b) = self.fibers[u].projections();
            l.push(a);
            r.push(b);
        }
        (
            PseudoNat::strict(&self.pf, &self.left, l).expect("projections are strict"),
            PseudoNat::strict(&self.pf, &self.right, r).expect("projections are strict"),
        )
    }

    /// `⟨f, g⟩: X → left × right`.
    pub fn pairing(&self, f: &PseudoNat, g: &PseudoNat) -> PseudoNat {
        let c = self.pf.cat().clone();
        let components: Vec<Functor> = c
            .objects()
            .map(|u| self.fibers[u].pairing(&f.components[u], &g.components[u]))
            .collect();
        let coherence = c
            .morphisms()
            .map(|t| {
                let (v, u) = (c.dom(t), c.cod(t));
                let comps = f.coherence[t]
                    .components
                    .iter()
                    .zip(&g.coherence[t].components)
                    .map(|(&a, &b)| self.fibers[v].mor(a, b))
                    .collect();
                NatTrans {
                    source: components[v].after(f.source.restriction(t)),
                    target: self.pf.restriction(t).after(&components[u]),
                    components: comps,
                }
            })
            .collect();
        PseudoNat {
            source: f.source.clone(),
            target: self.pf.clone(),
            components,
            coherence,
        }
    }
}

/// Fiberwise product `a × b`.
pub fn product(a: &Arc<Pseudofunctor>, b: &Arc<Pseudofunctor>) -> Result<ProductPrestack> {
    if !crate::site::same_site(a.site(), b.site()) {
        return Err(Error::shape("product of pseudofunctors over different sites"));
    }
    let site = a.site().clone();
    let c = site.cat().clone();
    let fibers: Vec<Product> = c.objects().map(|u| Product::new(a.fiber(u), b.fiber(u))).collect();
    let restrict: Vec<Functor> = c
        .morphisms()
        .map(|t| {
            let (v, u) = (c.dom(t), c.cod(t));
            fibers[v].times(&fibers[u], a.restriction(t), b.restriction(t))
        })
        .collect();
    let upsilon = c
        .objects()
        .map(|u| {
            let p = &fibers[u];
            NatTrans {
                source: restrict[c.identity(u)].clone(),
                target: Functor::identity(&p.cat),
                components: p
                    .cat
                    .objects()
                    .map(|o| {
                        let (x, y) = p.obj_pair(o);
                        p.mor(a.upsilon_at(u, x), b.upsilon_at(u, y))
                    })
                    .collect(),
            }
        })
        .collect();
    let phi = c
        .morphisms()
        .map(|f| {
            let u = c.cod(f);
            c.incoming(c.dom(f))
                .iter()
                .map(|&g| {
                    let w = c.dom(g);
                    NatTrans {
                        source: restrict[c.comp(f, g)].clone(),
                        target: restrict[g].after(&restrict[f]),
                        components: fibers[u]
                            .cat
                            .objects()
                            .map(|o| {
                                let (x, y) = fibers[u].obj_pair(o);
                                fibers[w].mor(a.phi_at(f, g, x), b.phi_at(f, g, y))
                            })
                            .collect(),
                    }
                })
                .collect()
        })
        .collect();
    let cats = fibers.iter().map(|p| p.cat.clone()).collect();
    let pf = Pseudofunctor::new(site, cats, restrict, upsilon, phi)?;
    Ok(ProductPrestack {
        pf: Arc::new(pf),
        left: a.clone(),
        right: b.clone(),
        fibers,
    })
}

/// The diagonal `a → a × a`.
pub fn diagonal(a: &Arc<Pseudofunctor>) -> (ProductPrestack, PseudoNat) {
    let prod = product(a, a).expect("same site");
    let id = PseudoNat::identity(a);
    let d = prod.pairing(&id, &id);
    (prod, d)
}

/// The cotensor `[2, a]` and its boundary map into `a × a`.
#[derive(Debug, Clone)]
pub struct CotensorTwo {
    pub pf: Arc<Pseudofunctor>,
    pub fibers: Vec<ArrowCat>,
    pub square: ProductPrestack,
    pub boundary: PseudoNat,
}

/// Fiberwise arrow categories `a(U)^2` with the boundary `⟨∂0, ∂1⟩`.
pub fn cotensor_two(a: &Arc<Pseudofunctor>) -> CotensorTwo {
    let site = a.site().clone();
    let c = site.cat().clone();
    let fibers: Vec<ArrowCat> = c.objects().map(|u| ArrowCat::new(a.fiber(u))).collect();
    let restrict: Vec<Functor> = c
        .morphisms()
        .map(|t| fibers[c.dom(t)].apply(&fibers[c.cod(t)], a.restriction(t)))
        .collect();
    // a natural transformation between functors into a(V) gives squares
    let lift =
        |ac: &ArrowCat, base: &FinCategory, m: usize, src: &Functor, tgt: &Functor, n: &dyn Fn(usize) -> usize| {
            ac.square_index(&ArrowSquare {
                source: src.mor(m),
                target: tgt.mor(m),
                top: n(base.dom(m)),
                bottom: n(base.cod(m)),
            })
            .expect("naturality square")
        };
    let upsilon = c
        .objects()
        .map(|u| {
            let base = a.fiber(u);
            let id = Functor::identity(base);
            NatTrans {
                source: restrict[c.identity(u)].clone(),
                target: Functor::identity(&fibers[u].cat),
                components: base
                    .morphisms()
                    .map(|m| {
                        lift(&fibers[u], base, m, a.restriction(c.identity(u)), &id, &|x| {
                            a.upsilon_at(u, x)
                        })
                    })
                    .collect(),
            }
        })
        .collect();
    let phi = c
        .morphisms()
        .map(|f| {
            let u = c.cod(f);
            c.incoming(c.dom(f))
                .iter()
                .map(|&g| {
                    let w = c.dom(g);
                    let base = a.fiber(u);
                    let src = a.restriction(c.comp(f, g));
                    let tgt = a.restriction(g).after(a.restriction(f));
                    NatTrans {
                        source: restrict[c.comp(f, g)].clone(),
                        target: restrict[g].after(&restrict[f]),
                        components: base
                            .morphisms()
                            .map(|m| lift(&fibers[w], base, m, src, &tgt, &|x| a.phi_at(f, g, x)))
                            .collect(),
                    }
                })
                .collect()
        })
        .collect();
    let cats = fibers.iter().map(|ac| ac.cat.clone()).collect();
    let pf = Arc::new(Pseudofunctor::new(site, cats, restrict, upsilon, phi).expect("cotensor is coherent"));
    let square = product(a, a).expect("same site");
    let components = c
        .objects()
        .map(|u| {
            let (d0, d1) = fibers[u].boundary();
            square.fibers[u].pairing(&d0, &d1)
        })
        .collect();
    let boundary = PseudoNat::strict(&pf, &square.pf, components).expect("boundary commutes strictly");
    CotensorTwo {
        pf,
        fibers,
        square,
        boundary,
    }
}
