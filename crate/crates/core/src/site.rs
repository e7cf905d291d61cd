//! Finite sites: chosen pullbacks and terminal object, sieves, bases and the
//! Grothendieck topologies they generate.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::fincat::{validate_category, FinCategory};
use crate::validation::ValidationReport;
use crate::{Error, Result};

/// Largest number of arrows into one object for which all sieves are enumerated.
pub const MAX_SIEVE_ENUMERATION: usize = 20;

/// A chosen pullback `apex` of a cospan `(f, g)`, with `f∘p1 = g∘p2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Pullback {
    pub apex: usize,
    pub p1: usize,
    pub p2: usize,
}

/// A set of arrows into `apex` closed under precomposition.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sieve {
    pub apex: usize,
    pub arrows: BTreeSet<usize>,
}

impl Sieve {
    pub fn contains(&self, m: usize) -> bool {
        self.arrows.contains(&m)
    }

    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrows.is_empty()
    }

    pub fn is_subset(&self, other: &Sieve) -> bool {
        self.apex == other.apex && self.arrows.is_subset(&other.arrows)
    }

    /// Closure under precomposition.
    pub fn is_closed(&self, c: &FinCategory) -> bool {
        self.arrows.iter().all(|&f| {
            c.arrows_into(c.dom(f))
                .iter()
                .all(|&h| self.arrows.contains(&c.comp(f, h)))
        })
    }

    pub fn describe(&self, c: &FinCategory) -> String {
        let names: Vec<&str> = self.arrows.iter().map(|&m| c.morphism_id(m)).collect();
        format!("{}:{{{}}}", c.object_id(self.apex), names.join(","))
    }
}

/// A raw family of arrows into `apex`, possibly empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CoverFamily {
    pub apex: usize,
    pub members: Vec<usize>,
}

impl CoverFamily {
    fn as_set(&self) -> BTreeSet<usize> {
        self.members.iter().copied().collect()
    }

    pub fn describe(&self, c: &FinCategory) -> String {
        let names: Vec<&str> = self.members.iter().map(|&m| c.morphism_id(m)).collect();
        format!("{}:({})", c.object_id(self.apex), names.join(","))
    }
}

/// Covering sieves per object, each list in canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    pub covers: Vec<Vec<Sieve>>,
}

impl Topology {
    pub fn is_covering(&self, s: &Sieve) -> bool {
        self.covers[s.apex].binary_search(s).is_ok()
    }
}

impl FinCategory {
    /// All arrows with codomain `u`, in canonical order.
    pub fn arrows_into(&self, u: usize) -> &[usize] {
        self.incoming(u)
    }
}

/// A finite site.
#[derive(Clone)]
pub struct Site {
    cat: Arc<FinCategory>,
    terminal: usize,
    pullbacks: HashMap<(usize, usize), Pullback>,
    topology: Topology,
    basis: Option<Vec<Vec<CoverFamily>>>,
}

impl fmt::Debug for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Site({:?})", self.cat)
    }
}

impl PartialEq for Site {
    fn eq(&self, other: &Self) -> bool {
        self.cat == other.cat
            && self.terminal == other.terminal
            && self.pullbacks == other.pullbacks
            && self.topology == other.topology
    }
}

impl Eq for Site {}

pub(crate) fn same_site(a: &Arc<Site>, b: &Arc<Site>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Pieces of a site before a topology is attached.
#[derive(Clone)]
pub struct SiteSkeleton {
    pub cat: Arc<FinCategory>,
    pub terminal: usize,
    pub pullbacks: HashMap<(usize, usize), Pullback>,
}

impl SiteSkeleton {
    /// Terminal object and pullback table checks.
    pub fn validate(&self) -> ValidationReport {
        let c = &*self.cat;
        let mut r = ValidationReport::new();
        r.extend_prefixed("category", validate_category(c));
        if !r.is_valid() {
            return r;
        }
        if self.terminal >= c.num_objects() {
            r.push("terminal object missing", Vec::<String>::new());
            return r;
        }
        for o in c.objects() {
            if c.hom(o, self.terminal).len() != 1 {
                r.push(
                    "terminal object has not exactly one arrow",
                    [c.object_id(o), c.object_id(self.terminal)],
                );
            }
        }
        for u in c.objects() {
            for &f in c.arrows_into(u) {
                for &g in c.arrows_into(u) {
                    let w = [c.morphism_id(f), c.morphism_id(g)];
                    let Some(pb) = self.pullbacks.get(&(f, g)) else {
                        r.push("pullback table not total", w);
                        continue;
                    };
                    if c.cod(pb.p1) != c.dom(f)
                        || c.cod(pb.p2) != c.dom(g)
                        || c.dom(pb.p1) != pb.apex
                        || c.dom(pb.p2) != pb.apex
                    {
                        r.push("pullback projections have wrong type", w);
                        continue;
                    }
                    if c.comp(f, pb.p1) != c.comp(g, pb.p2) {
                        r.push("pullback square does not commute", w);
                        continue;
                    }
                    for q in c.objects() {
                        for &q1 in c.hom(q, c.dom(f)) {
                            for &q2 in c.hom(q, c.dom(g)) {
                                if c.comp(f, q1) != c.comp(g, q2) {
                                    continue;
                                }
                                let n = c
                                    .hom(q, pb.apex)
                                    .iter()
                                    .filter(|&&m| c.comp(pb.p1, m) == q1 && c.comp(pb.p2, m) == q2)
                                    .count();
                                if n != 1 {
                                    r.push(
                                        "pullback universal property",
                                        [c.morphism_id(f), c.morphism_id(g), c.morphism_id(q1), c.morphism_id(q2)],
                                    );
                                }
                            }
                        }
                    }
                }
            }
        }
        r
    }
}

/// The maximal sieve on `u`.
pub fn maximal_sieve(c: &FinCategory, u: usize) -> Sieve {
    Sieve {
        apex: u,
        arrows: c.arrows_into(u).iter().copied().collect(),
    }
}

/// Smallest sieve containing the given arrows into `apex`.
pub fn generate_sieve_in(c: &FinCategory, apex: usize, members: &[usize]) -> Sieve {
    let mut arrows = BTreeSet::new();
    for &f in members {
        debug_assert_eq!(c.cod(f), apex);
        for &h in c.arrows_into(c.dom(f)) {
            arrows.insert(c.comp(f, h));
        }
    }
    Sieve { apex, arrows }
}

/// Every sieve on `u`, in canonical order.
pub fn all_sieves(c: &FinCategory, u: usize) -> Result<Vec<Sieve>> {
    let into = c.arrows_into(u);
    if into.len() > MAX_SIEVE_ENUMERATION {
        return Err(Error::bound("enumerating sieves", 1 << MAX_SIEVE_ENUMERATION));
    }
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << into.len()) {
        let arrows: BTreeSet<usize> = into
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &m)| m)
            .collect();
        let s = Sieve { apex: u, arrows };
        if s.is_closed(c) {
            out.push(s);
        }
    }
    out.sort();
    Ok(out)
}

impl Site {
    /// Site whose topology is generated by `basis`, after checking the
    /// skeleton and the basis axioms.
    pub fn from_basis(skeleton: SiteSkeleton, basis: Vec<Vec<CoverFamily>>) -> Result<Site> {
        skeleton.validate().into_result("site")?;
        validate_basis(&skeleton, &basis)?;
        let topology = generate_topology(&skeleton, &basis)?;
        let site = Site {
            cat: skeleton.cat,
            terminal: skeleton.terminal,
            pullbacks: skeleton.pullbacks,
            topology,
            basis: Some(basis),
        };
        debug_assert!(validate_topology(&site).is_valid());
        Ok(site)
    }

    /// Site with an explicitly listed topology.
    pub fn from_topology(skeleton: SiteSkeleton, covers: Vec<Vec<Sieve>>) -> Result<Site> {
        skeleton.validate().into_result("site")?;
        let mut covers = covers;
        for list in covers.iter_mut() {
            list.sort();
            list.dedup();
        }
        let site = Site {
            cat: skeleton.cat,
            terminal: skeleton.terminal,
            pullbacks: skeleton.pullbacks,
            topology: Topology { covers },
            basis: None,
        };
        validate_topology(&site).into_result("topology")?;
        Ok(site)
    }

    /// Site whose only covering sieves are the maximal ones.
    pub fn trivial(skeleton: SiteSkeleton) -> Result<Site> {
        let covers = skeleton
            .cat
            .objects()
            .map(|u| vec![maximal_sieve(&skeleton.cat, u)])
            .collect();
        Site::from_topology(skeleton, covers)
    }

    pub fn cat(&self) -> &Arc<FinCategory> {
        &self.cat
    }

    pub fn terminal(&self) -> usize {
        self.terminal
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn basis(&self) -> Option<&Vec<Vec<CoverFamily>>> {
        self.basis.as_ref()
    }

    pub fn skeleton(&self) -> SiteSkeleton {
        SiteSkeleton {
            cat: self.cat.clone(),
            terminal: self.terminal,
            pullbacks: self.pullbacks.clone(),
        }
    }

    /// Chosen pullback of the cospan `(f, g)`.
    pub fn pullback(&self, f: usize, g: usize) -> Pullback {
        self.pullbacks[&(f, g)]
    }

    pub fn pullback_table(&self) -> &HashMap<(usize, usize), Pullback> {
        &self.pullbacks
    }

    pub fn covering_sieves(&self, u: usize) -> &[Sieve] {
        &self.topology.covers[u]
    }

    pub fn is_covering(&self, s: &Sieve) -> bool {
        self.topology.is_covering(s)
    }

    /// The families that quantify cover conditions on `u`: the basis families
    /// when a basis is present, the covering sieves otherwise.
    pub fn test_families(&self, u: usize) -> Vec<CoverFamily> {
        match &self.basis {
            Some(b) => b[u].clone(),
            None => self
                .covering_sieves(u)
                .iter()
                .map(|s| CoverFamily {
                    apex: u,
                    members: s.arrows.iter().copied().collect(),
                })
                .collect(),
        }
    }

    /// The intersection of all covering sieves on `u`; itself covering.
    pub fn minimal_covering_sieve(&self, u: usize) -> Sieve {
        let mut it = self.covering_sieves(u).iter();
        let mut acc = it.next().expect("maximal sieve covers").clone();
        for s in it {
            acc.arrows = acc.arrows.intersection(&s.arrows).copied().collect();
        }
        debug_assert!(self.is_covering(&acc));
        acc
    }

    pub fn generate_sieve(&self, fam: &CoverFamily) -> Sieve {
        generate_sieve_in(&self.cat, fam.apex, &fam.members)
    }

    /// `g*(s) = {f | g∘f ∈ s}`.
    pub fn pullback_sieve(&self, g: usize, s: &Sieve) -> Sieve {
        let c = &*self.cat;
        debug_assert_eq!(c.cod(g), s.apex);
        let v = c.dom(g);
        Sieve {
            apex: v,
            arrows: c
                .arrows_into(v)
                .iter()
                .copied()
                .filter(|&f| s.contains(c.comp(g, f)))
                .collect(),
        }
    }

    /// The unique arrow into the chosen pullback of `(f, g)` commuting with
    /// the projections.
    pub fn mediator(&self, f: usize, g: usize, q1: usize, q2: usize) -> Result<usize> {
        let c = &*self.cat;
        let pb = self.pullback(f, g);
        let q = c.dom(q1);
        let mut found = None;
        for &m in c.hom(q, pb.apex) {
            if c.comp(pb.p1, m) == q1 && c.comp(pb.p2, m) == q2 {
                if found.is_some() {
                    return Err(Error::NonUniqueMediator {
                        f: c.morphism_id(f).into(),
                        g: c.morphism_id(g).into(),
                    });
                }
                found = Some(m);
            }
        }
        found.ok_or_else(|| Error::NoMediator {
            f: c.morphism_id(f).into(),
            g: c.morphism_id(g).into(),
        })
    }
}

/// Setwise intersection of two sieves on the same object.
pub fn sieve_intersection(a: &Sieve, b: &Sieve) -> Result<Sieve> {
    if a.apex != b.apex {
        return Err(Error::ApexMismatch(a.apex.to_string(), b.apex.to_string()));
    }
    Ok(Sieve {
        apex: a.apex,
        arrows: a.arrows.intersection(&b.arrows).copied().collect(),
    })
}

fn contains_family(list: &[CoverFamily], fam: &BTreeSet<usize>) -> bool {
    list.iter().any(|k| &k.as_set() == fam)
}

/// Checks the three basis axioms. Families are compared as sets of arrows.
pub fn validate_basis(sk: &SiteSkeleton, basis: &[Vec<CoverFamily>]) -> Result<()> {
    let c = &*sk.cat;
    if basis.len() != c.num_objects() {
        return Err(Error::shape("basis must list families for every object"));
    }
    for (u, list) in basis.iter().enumerate() {
        for fam in list {
            if fam.apex != u || fam.members.iter().any(|&m| c.cod(m) != u) {
                return Err(Error::InvalidBasis {
                    axiom: 0,
                    witness: format!("family {} is not on {}", fam.describe(c), c.object_id(u)),
                });
            }
        }
    }
    for u in c.objects() {
        for &f in c.arrows_into(u) {
            if c.is_iso(f) && !contains_family(&basis[u], &BTreeSet::from([f])) {
                return Err(Error::InvalidBasis {
                    axiom: 1,
                    witness: format!("isomorphism {} is not a covering family", c.morphism_id(f)),
                });
            }
        }
    }
    for u in c.objects() {
        for fam in &basis[u] {
            for &g in c.arrows_into(u) {
                let pulled: BTreeSet<usize> = fam.members.iter().map(|&f| sk.pullbacks[&(g, f)].p1).collect();
                if !contains_family(&basis[c.dom(g)], &pulled) {
                    return Err(Error::InvalidBasis {
                        axiom: 2,
                        witness: format!("pullback of {} along {}", fam.describe(c), c.morphism_id(g)),
                    });
                }
            }
        }
    }
    for u in c.objects() {
        for fam in &basis[u] {
            let choices: Vec<&Vec<CoverFamily>> = fam.members.iter().map(|&f| &basis[c.dom(f)]).collect();
            if choices.iter().any(|l| l.is_empty()) {
                continue;
            }
            let mut idx = vec![0usize; choices.len()];
            loop {
                let composite: BTreeSet<usize> = fam
                    .members
                    .iter()
                    .zip(&idx)
                    .zip(&choices)
                    .flat_map(|((&f, &i), l)| l[i].members.iter().map(move |&h| (f, h)))
                    .map(|(f, h)| c.comp(f, h))
                    .collect();
                if !contains_family(&basis[u], &composite) {
                    return Err(Error::InvalidBasis {
                        axiom: 3,
                        witness: format!("composite refinement of {}", fam.describe(c)),
                    });
                }
                let mut k = 0;
                loop {
                    if k == idx.len() {
                        break;
                    }
                    idx[k] += 1;
                    if idx[k] < choices[k].len() {
                        break;
                    }
                    idx[k] = 0;
                    k += 1;
                }
                if k == idx.len() {
                    break;
                }
            }
        }
    }
    Ok(())
}

/// `S ∈ J(U)` iff some basis family on `U` lies inside `S`.
pub fn generate_topology(sk: &SiteSkeleton, basis: &[Vec<CoverFamily>]) -> Result<Topology> {
    let c = &*sk.cat;
    let mut covers = Vec::with_capacity(c.num_objects());
    for u in c.objects() {
        let list = all_sieves(c, u)?
            .into_iter()
            .filter(|s| basis[u].iter().any(|fam| fam.members.iter().all(|m| s.contains(*m))))
            .collect();
        covers.push(list);
    }
    Ok(Topology { covers })
}

/// Checks the three topology axioms exhaustively.
pub fn validate_topology(s: &Site) -> ValidationReport {
    let c = &*s.cat;
    let mut r = ValidationReport::new();
    if s.topology.covers.len() != c.num_objects() {
        r.push("topology must list sieves for every object", Vec::<String>::new());
        return r;
    }
    for u in c.objects() {
        for sv in s.covering_sieves(u) {
            if sv.apex != u || !sv.is_closed(c) {
                r.push("covering family is not a sieve", [sv.describe(c)]);
            }
        }
    }
    if !r.is_valid() {
        return r;
    }
    for u in c.objects() {
        if !s.is_covering(&maximal_sieve(c, u)) {
            r.push("axiom 1: maximal sieve", [c.object_id(u)]);
        }
    }
    for u in c.objects() {
        for sv in s.covering_sieves(u) {
            for &g in c.arrows_into(u) {
                if !s.is_covering(&s.pullback_sieve(g, sv)) {
                    r.push("axiom 2: pullback stability", [sv.describe(c), c.morphism_id(g).into()]);
                }
            }
        }
    }
    for u in c.objects() {
        let sieves = match all_sieves(c, u) {
            Ok(v) => v,
            Err(e) => {
                r.push("axiom 3: too many sieves", [e.to_string()]);
                continue;
            }
        };
        for sv in s.covering_sieves(u) {
            for rs in &sieves {
                if s.is_covering(rs) {
                    continue;
                }
                if sv.arrows.iter().all(|&f| s.is_covering(&s.pullback_sieve(f, rs))) {
                    r.push("axiom 3: transitivity", [sv.describe(c), rs.describe(c)]);
                }
            }
        }
    }
    r
}

/// The lattice of open sets of a finite space, as a category with chosen
/// meets as pullbacks and the top element as terminal object. Opens are given
/// by name and point mask; the list must be closed under intersection and
/// contain a largest element. The arrow `U ⊆ V` is named `U<V`.
pub fn open_set_lattice(opens: &[(&str, u64)]) -> Result<SiteSkeleton> {
    let n = opens.len();
    let leq = |a: usize, b: usize| opens[a].1 & !opens[b].1 == 0;
    let mut morphisms = Vec::new();
    let mut index = HashMap::new();
    for a in 0..n {
        for b in 0..n {
            if leq(a, b) {
                index.insert((a, b), morphisms.len());
                morphisms.push((format!("{}<{}", opens[a].0, opens[b].0), a, b));
            }
        }
    }
    let identity: Vec<Option<usize>> = (0..n).map(|a| index.get(&(a, a)).copied()).collect();
    let arrows = morphisms.clone();
    let assembled = FinCategory::assemble(
        opens.iter().map(|(s, _)| s.to_string()).collect(),
        morphisms,
        identity,
        |g, f| {
            let (_, b, c) = &arrows[g];
            let (_, a, b2) = &arrows[f];
            if b != b2 {
                return None;
            }
            index.get(&(*a, *c)).copied()
        },
    )?;
    let cat = assembled.category;
    let obj = |i: usize| assembled.objects[i];
    let top = (0..n)
        .find(|&t| (0..n).all(|a| leq(a, t)))
        .ok_or_else(|| Error::shape("open sets have no largest element"))?;
    let mut pullbacks = HashMap::new();
    for u in cat.objects() {
        for &f in cat.arrows_into(u) {
            for &g in cat.arrows_into(u) {
                let (x, y) = (cat.dom(f), cat.dom(g));
                let ox = assembled.objects.iter().position(|&o| o == x).unwrap();
                let oy = assembled.objects.iter().position(|&o| o == y).unwrap();
                let mask = opens[ox].1 & opens[oy].1;
                let m = (0..n)
                    .find(|&i| opens[i].1 == mask)
                    .ok_or_else(|| Error::shape("open sets not closed under intersection"))?;
                let apex = obj(m);
                let p1 = cat.hom(apex, x)[0];
                let p2 = cat.hom(apex, y)[0];
                pullbacks.insert((f, g), Pullback { apex, p1, p2 });
            }
        }
    }
    Ok(SiteSkeleton {
        cat,
        terminal: obj(top),
        pullbacks,
    })
}

/// For an open-set lattice: the families of arrows into each open whose union
/// is that open, as sorted sets of arrows.
pub fn union_basis(sk: &SiteSkeleton, opens: &[(&str, u64)]) -> Vec<Vec<CoverFamily>> {
    let c = &*sk.cat;
    let mask_of = |o: usize| {
        opens
            .iter()
            .find(|(n, _)| *n == c.object_id(o))
            .map(|(_, m)| *m)
            .expect("open listed")
    };
    c.objects()
        .map(|u| {
            let into = c.arrows_into(u);
            let mut fams = Vec::new();
            for mask in 0u64..(1u64 << into.len()) {
                let members: Vec<usize> = into
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &m)| m)
                    .collect();
                let union = members.iter().fold(0, |acc, &m| acc | mask_of(c.dom(m)));
                if union == mask_of(u) {
                    fams.push(CoverFamily { apex: u, members });
                }
            }
            fams.sort_by(|a, b| a.members.cmp(&b.members));
            fams
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO: [(&str, u64); 4] = [("empty", 0), ("1", 1), ("2", 2), ("X", 3)];

    fn site2() -> Site {
        let sk = open_set_lattice(&TWO).unwrap();
        let basis = union_basis(&sk, &TWO);
        Site::from_basis(sk, basis).unwrap()
    }

    fn m(s: &Site, id: &str) -> usize {
        s.cat().morphism_index(id).unwrap()
    }

    fn o(s: &Site, id: &str) -> usize {
        s.cat().object_index(id).unwrap()
    }

    #[test]
    fn generated_sieve_of_the_two_points() {
        let s = site2();
        let fam = CoverFamily {
            apex: o(&s, "X"),
            members: vec![m(&s, "1<X"), m(&s, "2<X")],
        };
        let sv = s.generate_sieve(&fam);
        let expected: BTreeSet<usize> = [m(&s, "1<X"), m(&s, "2<X"), m(&s, "empty<X")].into();
        assert_eq!(sv.arrows, expected);
        let id = CoverFamily {
            apex: o(&s, "X"),
            members: vec![m(&s, "X<X")],
        };
        assert_eq!(s.generate_sieve(&id), maximal_sieve(s.cat(), o(&s, "X")));
        let none = CoverFamily {
            apex: o(&s, "X"),
            members: vec![],
        };
        assert!(s.generate_sieve(&none).is_empty());
    }

    #[test]
    fn pullback_of_union_sieve_along_a_point() {
        let s = site2();
        let fam = CoverFamily {
            apex: o(&s, "X"),
            members: vec![m(&s, "1<X"), m(&s, "2<X")],
        };
        let sv = s.generate_sieve(&fam);
        let pulled = s.pullback_sieve(m(&s, "1<X"), &sv);
        assert_eq!(pulled, maximal_sieve(s.cat(), o(&s, "1")));
        assert_eq!(s.pullback_sieve(m(&s, "X<X"), &sv), sv);
    }

    #[test]
    fn intersection_of_point_sieves() {
        let s = site2();
        let a = generate_sieve_in(s.cat(), o(&s, "X"), &[m(&s, "1<X")]);
        let b = generate_sieve_in(s.cat(), o(&s, "X"), &[m(&s, "2<X")]);
        let i = sieve_intersection(&a, &b).unwrap();
        assert_eq!(i.arrows, BTreeSet::from([m(&s, "empty<X")]));
        let c = maximal_sieve(s.cat(), o(&s, "1"));
        assert!(matches!(sieve_intersection(&a, &c), Err(Error::ApexMismatch(..))));
    }

    #[test]
    fn covering_sieve_counts() {
        let s = site2();
        assert_eq!(s.covering_sieves(o(&s, "X")).len(), 2);
        assert_eq!(s.covering_sieves(o(&s, "1")).len(), 1);
        assert_eq!(s.covering_sieves(o(&s, "2")).len(), 1);
        assert_eq!(s.covering_sieves(o(&s, "empty")).len(), 2);
        assert_eq!(s.basis().unwrap()[o(&s, "X")].len(), 10);
        assert!(validate_topology(&s).is_valid());
    }

    #[test]
    fn mediators() {
        let s = site2();
        let (i1, i2) = (m(&s, "1<X"), m(&s, "2<X"));
        let pb = s.pullback(i1, i2);
        assert_eq!(s.cat().object_id(pb.apex), "empty");
        assert_eq!(s.mediator(i1, i2, pb.p1, pb.p2).unwrap(), s.cat().identity(pb.apex));
    }

    #[test]
    fn missing_pullback_sieve_is_an_axiom_two_violation() {
        let sk = open_set_lattice(&TWO).unwrap();
        let c = sk.cat.clone();
        let x = c.object_index("X").unwrap();
        let mut covers: Vec<Vec<Sieve>> = c.objects().map(|u| vec![maximal_sieve(&c, u)]).collect();
        covers[x].push(generate_sieve_in(&c, x, &[c.morphism_index("1<X").unwrap()]));
        let err = Site::from_topology(sk, covers).unwrap_err();
        match err {
            Error::Validation { report, .. } => assert!(report.has_rule("axiom 2")),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn unstable_basis_is_rejected() {
        let sk = open_set_lattice(&TWO).unwrap();
        let c = sk.cat.clone();
        let mut basis: Vec<Vec<CoverFamily>> = c
            .objects()
            .map(|u| {
                c.arrows_into(u)
                    .iter()
                    .filter(|&&f| c.is_iso(f))
                    .map(|&f| CoverFamily {
                        apex: u,
                        members: vec![f],
                    })
                    .collect()
            })
            .collect();
        let x = c.object_index("X").unwrap();
        basis[x].push(CoverFamily {
            apex: x,
            members: vec![c.morphism_index("1<X").unwrap(), c.morphism_index("2<X").unwrap()],
        });
        assert!(matches!(
            Site::from_basis(sk.clone(), basis.clone()),
            Err(Error::InvalidBasis { axiom: 2, .. })
        ));
        basis[x].pop();
        let trivial = Site::from_basis(sk, basis).unwrap();
        assert!(trivial.covering_sieves(x).len() == 1);
    }
}
