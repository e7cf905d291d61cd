//! Hom-presheaves and the prestack condition.

use std::collections::HashMap;

use serde::Serialize;

use super::Pseudofunctor;
use crate::bound::{default_bound, Budget};
use crate::site::CoverFamily;
use crate::Result;

/// The presheaf `F(a, b)` on the slice over `anchor`: its value at an
/// arrow `h: W → anchor` is `hom(a·h, b·h)` in `F(W)`.
pub struct HomPresheaf<'a> {
    pub base: &'a Pseudofunctor,
    pub anchor: usize,
    pub a: usize,
    pub b: usize,
}

impl<'a> HomPresheaf<'a> {
    pub fn new(base: &'a Pseudofunctor, anchor: usize, a: usize, b: usize) -> Self {
        HomPresheaf { base, anchor, a, b }
    }

    /// `hom(a·h, b·h)`.
    pub fn values(&self, h: usize) -> &'a [usize] {
        let f = self.base;
        let w = f.cat().dom(h);
        f.fiber(w).hom(f.res_obj(h, self.a), f.res_obj(h, self.b))
    }

    /// Transition along `k: W' → W` from the value at `h` to the value at
    /// `h∘k`: `m ↦ φ(h,k)_b⁻¹ ∘ m·k ∘ φ(h,k)_a`.
    pub fn restrict(&self, h: usize, k: usize, m: usize) -> usize {
        let f = self.base;
        let fib = f.fiber(f.cat().dom(k));
        let to = fib.inv(f.phi_at(h, k, self.b));
        fib.comp(to, fib.comp(f.res_mor(k, m), f.phi_at(h, k, self.a)))
    }
}

/// Why a pseudofunctor fails to be a prestack.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrestackWitness {
    /// `not separated` or `does not glue`
    pub kind: String,
    pub object: String,
    pub a: String,
    pub b: String,
    pub arrow: String,
    pub cover: Vec<String>,
    /// the offending morphisms: two distinct morphisms with equal local
    /// restrictions, or a matching family without amalgamation
    pub morphisms: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrestackDecision {
    pub prestack: bool,
    pub witness: Option<PrestackWitness>,
}

/// Decides whether every hom-presheaf is a sheaf for every test family.
pub fn is_prestack(f: &Pseudofunctor) -> Result<PrestackDecision> {
    is_prestack_bounded(f, default_bound())
}

pub fn is_prestack_bounded(f: &Pseudofunctor, bound: u64) -> Result<PrestackDecision> {
    let c = f.cat().clone();
    let site = f.site().clone();
    let budget = Budget::new(bound, "checking the prestack condition");
    for u in c.objects() {
        let fu = f.fiber(u);
        for a in fu.objects() {
            for b in fu.objects() {
                let hp = HomPresheaf::new(f, u, a, b);
                for v in c.objects() {
                    for &h in c.hom(v, u) {
                        for fam in site.test_families(v) {
                            if let Some(w) = check_family(&hp, h, &fam, &budget)? {
                                return Ok(PrestackDecision {
                                    prestack: false,
                                    witness: Some(w),
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(PrestackDecision {
        prestack: true,
        witness: None,
    })
}

fn check_family(hp: &HomPresheaf<'_>, h: usize, fam: &CoverFamily, budget: &Budget) -> Result<Option<PrestackWitness>> {
    let f = hp.base;
    let c = f.cat();
    let site = f.site();
    let n = fam.members.len();
    let arrows: Vec<usize> = fam.members.iter().map(|&g| c.comp(h, g)).collect();
    let witness = |kind: &str, morphisms: Vec<String>| PrestackWitness {
        kind: kind.to_string(),
        object: c.object_id(c.cod(h)).to_string(),
        a: f.fiber(c.cod(h)).object_id(hp.a).to_string(),
        b: f.fiber(c.cod(h)).object_id(hp.b).to_string(),
        arrow: c.morphism_id(h).to_string(),
        cover: fam.members.iter().map(|&g| c.morphism_id(g).to_string()).collect(),
        morphisms,
    };
    // restriction map from the global value to families
    let mut image: HashMap<Vec<usize>, usize> = HashMap::new();
    for &m in hp.values(h) {
        budget.tick()?;
        let local: Vec<usize> = fam.members.iter().map(|&g| hp.restrict(h, g, m)).collect();
        if let Some(&other) = image.get(&local) {
            let fib = f.fiber(c.dom(h));
            return Ok(Some(witness(
                "not separated",
                vec![fib.morphism_id(other).to_string(), fib.morphism_id(m).to_string()],
            )));
        }
        image.insert(local, m);
    }
    // matching families, by backtracking over members
    let overlaps: Vec<Vec<crate::site::Pullback>> = (0..n)
        .map(|i| (0..n).map(|j| site.pullback(fam.members[i], fam.members[j])).collect())
        .collect();
    let mut chosen = vec![0usize; n];
    let mut missing = None;
    search(hp, &arrows, &overlaps, 0, &mut chosen, &image, &mut missing, budget)?;
    Ok(missing.map(|fam_m: Vec<usize>| {
        let names = fam_m
            .iter()
            .zip(&arrows)
            .map(|(&m, &k)| f.fiber(c.dom(k)).morphism_id(m).to_string())
            .collect();
        witness("does not glue", names)
    }))
}

#[allow(clippy::too_many_arguments)]
fn search(
    hp: &HomPresheaf<'_>,
    arrows: &[usize],
    overlaps: &[Vec<crate::site::Pullback>],
    i: usize,
    chosen: &mut Vec<usize>,
    image: &HashMap<Vec<usize>, usize>,
    missing: &mut Option<Vec<usize>>,
    budget: &Budget,
) -> Result<()> {
    if missing.is_some() {
        return Ok(());
    }
    budget.tick()?;
    if i == arrows.len() {
        if !image.contains_key(chosen.as_slice()) {
            *missing = Some(chosen.clone());
        }
        return Ok(());
    }
    for &m in hp.values(arrows[i]) {
        chosen[i] = m;
        let ok = (0..=i).all(|j| {
            let pb = overlaps[j][i];
            hp.restrict(arrows[j], pb.p1, chosen[j]) == hp.restrict(arrows[i], pb.p2, m)
        });
        if ok {
            search(hp, arrows, overlaps, i + 1, chosen, image, missing, budget)?;
            if missing.is_some() {
                return Ok(());
            }
        }
    }
    Ok(())
}
