//! Small categories used throughout the test corpus and by constructions
//! (products, arrow categories).

use std::collections::HashMap;
use std::sync::Arc;

use super::{tuple_id, FinCategory, Functor};

fn build(
    objects: Vec<String>,
    morphisms: Vec<(String, usize, usize)>,
    identity: Vec<usize>,
    compose: impl FnMut(usize, usize) -> Option<usize>,
) -> Arc<FinCategory> {
    FinCategory::assemble(objects, morphisms, identity.into_iter().map(Some).collect(), compose)
        .expect("standard category assembles")
        .category
}

/// The category with no objects.
pub fn empty() -> Arc<FinCategory> {
    build(vec![], vec![], vec![], |_, _| None)
}

/// One object `*`, one morphism `1`.
pub fn terminal() -> Arc<FinCategory> {
    build(vec!["*".into()], vec![("1".into(), 0, 0)], vec![0], |_, _| Some(0))
}

/// Only identities; the identity of `o` is named `1o`.
pub fn discrete<S: AsRef<str>>(names: &[S]) -> Arc<FinCategory> {
    let objects: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
    let morphisms = objects
        .iter()
        .enumerate()
        .map(|(i, o)| (format!("1{o}"), i, i))
        .collect();
    let n = objects.len();
    build(objects, morphisms, (0..n).collect(), |g, f| (g == f).then_some(g))
}

/// Exactly one morphism between any two objects.
pub fn indiscrete<S: AsRef<str>>(names: &[S]) -> Arc<FinCategory> {
    let objects: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
    let n = objects.len();
    let mut morphisms = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            morphisms.push((tuple_id(&[&objects[a], &objects[b]]), a, b));
        }
    }
    // morphism a→b sits at a*n+b
    build(objects, morphisms, (0..n).map(|a| a * n + a).collect(), |g, f| {
        let (b, c) = (g / n, g % n);
        let (a, b2) = (f / n, f % n);
        (b == b2).then_some(a * n + c)
    })
}

/// Objects `a`, `b`; morphisms `1a`, `1b`, `f: a→b`, `g: b→a`, mutually inverse.
pub fn walking_iso() -> Arc<FinCategory> {
    let objects = vec!["a".into(), "b".into()];
    let morphisms = vec![
        ("1a".into(), 0, 0),
        ("1b".into(), 1, 1),
        ("f".into(), 0, 1),
        ("g".into(), 1, 0),
    ];
    build(objects, morphisms, vec![0, 1], |g, f| {
        Some(match (g, f) {
            (0, x) | (1, x) => x,
            (x, 0) | (x, 1) => x,
            (2, 3) => 1,
            (3, 2) => 0,
            _ => return None,
        })
    })
}

/// The category **2**: objects `a`, `b`; morphisms `1a`, `1b`, `u: a→b`.
pub fn walking_arrow() -> Arc<FinCategory> {
    let objects = vec!["a".into(), "b".into()];
    let morphisms = vec![("1a".into(), 0, 0), ("1b".into(), 1, 1), ("u".into(), 0, 1)];
    build(objects, morphisms, vec![0, 1], |g, f| match (g, f) {
        (0, x) | (1, x) => Some(x),
        (x, 0) | (x, 1) => Some(x),
        _ => None,
    })
}

/// Two objects with two parallel morphisms `u, v: a→b`.
pub fn parallel_pair() -> Arc<FinCategory> {
    let objects = vec!["a".into(), "b".into()];
    let morphisms = vec![
        ("1a".into(), 0, 0),
        ("1b".into(), 1, 1),
        ("u".into(), 0, 1),
        ("v".into(), 0, 1),
    ];
    build(objects, morphisms, vec![0, 1], |g, f| match (g, f) {
        (0, x) | (1, x) => Some(x),
        (x, 0) | (x, 1) => Some(x),
        _ => None,
    })
}

/// The cyclic group of order `n` as a one-object category; `gk` is the
/// k-th power of the generator and `g0` the identity.
pub fn cyclic_group(n: usize) -> Arc<FinCategory> {
    assert!((1..=10).contains(&n), "order must be between 1 and 10");
    build(
        vec!["*".into()],
        (0..n).map(|k| (format!("g{k}"), 0, 0)).collect(),
        vec![0],
        |g, f| Some((g + f) % n),
    )
}

/// Cartesian product of two categories with index bookkeeping for pairs.
#[derive(Debug, Clone)]
pub struct Product {
    pub cat: Arc<FinCategory>,
    pub left: Arc<FinCategory>,
    pub right: Arc<FinCategory>,
    obj_pairs: Vec<(usize, usize)>,
    mor_pairs: Vec<(usize, usize)>,
    obj_index: HashMap<(usize, usize), usize>,
    mor_index: HashMap<(usize, usize), usize>,
}

impl Product {
    /// Identifiers are tuple-encoded pairs.
    pub fn new(c: &Arc<FinCategory>, d: &Arc<FinCategory>) -> Product {
        let (nd, md) = (d.num_objects(), d.num_morphisms());
        let mut objects = Vec::new();
        let mut obj_pairs = Vec::new();
        for x in c.objects() {
            for y in d.objects() {
                objects.push(tuple_id(&[c.object_id(x), d.object_id(y)]));
                obj_pairs.push((x, y));
            }
        }
        let mut morphisms = Vec::new();
        let mut mor_pairs = Vec::new();
        for u in c.morphisms() {
            for v in d.morphisms() {
                morphisms.push((
                    tuple_id(&[c.morphism_id(u), d.morphism_id(v)]),
                    c.dom(u) * nd + d.dom(v),
                    c.cod(u) * nd + d.cod(v),
                ));
                mor_pairs.push((u, v));
            }
        }
        let identity = obj_pairs
            .iter()
            .map(|&(x, y)| Some(c.identity(x) * md + d.identity(y)))
            .collect();
        let assembled = FinCategory::assemble(objects, morphisms, identity, |g, f| {
            let x = c.compose(g / md, f / md)?;
            let y = d.compose(g % md, f % md)?;
            Some(x * md + y)
        })
        .expect("product assembles");
        let mut final_obj_pairs = vec![(0, 0); obj_pairs.len()];
        let mut obj_index = HashMap::new();
        for (old, &pair) in obj_pairs.iter().enumerate() {
            final_obj_pairs[assembled.objects[old]] = pair;
            obj_index.insert(pair, assembled.objects[old]);
        }
        let mut final_mor_pairs = vec![(0, 0); mor_pairs.len()];
        let mut mor_index = HashMap::new();
        for (old, &pair) in mor_pairs.iter().enumerate() {
            final_mor_pairs[assembled.morphisms[old]] = pair;
            mor_index.insert(pair, assembled.morphisms[old]);
        }
        Product {
            cat: assembled.category,
            left: c.clone(),
            right: d.clone(),
            obj_pairs: final_obj_pairs,
            mor_pairs: final_mor_pairs,
            obj_index,
            mor_index,
        }
    }

    pub fn obj(&self, x: usize, y: usize) -> usize {
        self.obj_index[&(x, y)]
    }

    pub fn mor(&self, u: usize, v: usize) -> usize {
        self.mor_index[&(u, v)]
    }

    pub fn obj_pair(&self, o: usize) -> (usize, usize) {
        self.obj_pairs[o]
    }

    pub fn mor_pair(&self, m: usize) -> (usize, usize) {
        self.mor_pairs[m]
    }

    pub fn projections(&self) -> (Functor, Functor) {
        let f0 = Functor {
            source: self.cat.clone(),
            target: self.left.clone(),
            obj_map: self.obj_pairs.iter().map(|p| p.0).collect(),
            mor_map: self.mor_pairs.iter().map(|p| p.0).collect(),
        };
        let f1 = Functor {
            source: self.cat.clone(),
            target: self.right.clone(),
            obj_map: self.obj_pairs.iter().map(|p| p.1).collect(),
            mor_map: self.mor_pairs.iter().map(|p| p.1).collect(),
        };
        (f0, f1)
    }

    /// `⟨f, g⟩` into this product.
    pub fn pairing(&self, f: &Functor, g: &Functor) -> Functor {
        Functor {
            source: f.source.clone(),
            target: self.cat.clone(),
            obj_map: f
                .obj_map
                .iter()
                .zip(&g.obj_map)
                .map(|(&x, &y)| self.obj(x, y))
                .collect(),
            mor_map: f
                .mor_map
                .iter()
                .zip(&g.mor_map)
                .map(|(&u, &v)| self.mor(u, v))
                .collect(),
        }
    }

    /// `f × g` from `source` to this product.
    pub fn times(&self, source: &Product, f: &Functor, g: &Functor) -> Functor {
        Functor {
            source: source.cat.clone(),
            target: self.cat.clone(),
            obj_map: source
                .obj_pairs
                .iter()
                .map(|&(x, y)| self.obj(f.obj(x), g.obj(y)))
                .collect(),
            mor_map: source
                .mor_pairs
                .iter()
                .map(|&(u, v)| self.mor(f.mor(u), g.mor(v)))
                .collect(),
        }
    }
}

/// Cartesian product; identifiers are tuple-encoded pairs.
pub fn product(c: &Arc<FinCategory>, d: &Arc<FinCategory>) -> Arc<FinCategory> {
    Product::new(c, d).cat
}

/// A square in an arrow category: `bottom ∘ source = target ∘ top`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ArrowSquare {
    pub source: usize,
    pub target: usize,
    pub top: usize,
    pub bottom: usize,
}

/// The functor category `c^2`: objects are the morphisms of `c` (with the
/// same indices), morphisms the commuting squares between them.
#[derive(Debug, Clone)]
pub struct ArrowCat {
    pub cat: Arc<FinCategory>,
    pub base: Arc<FinCategory>,
    squares: Vec<ArrowSquare>,
    index: HashMap<ArrowSquare, usize>,
}

impl ArrowCat {
    pub fn new(c: &Arc<FinCategory>) -> ArrowCat {
        let objects: Vec<String> = c.morphisms().map(|m| c.morphism_id(m).to_string()).collect();
        let mut squares = Vec::new();
        let mut index: HashMap<ArrowSquare, usize> = HashMap::new();
        for m in c.morphisms() {
            for n in c.morphisms() {
                for &s in c.hom(c.dom(m), c.dom(n)) {
                    for &t in c.hom(c.cod(m), c.cod(n)) {
                        if c.comp(t, m) == c.comp(n, s) {
                            let sq = ArrowSquare {
                                source: m,
                                target: n,
                                top: s,
                                bottom: t,
                            };
                            index.insert(sq, squares.len());
                            squares.push(sq);
                        }
                    }
                }
            }
        }
        let morphisms = squares
            .iter()
            .map(|sq| {
                (
                    tuple_id(&[
                        c.morphism_id(sq.source),
                        c.morphism_id(sq.target),
                        c.morphism_id(sq.top),
                        c.morphism_id(sq.bottom),
                    ]),
                    sq.source,
                    sq.target,
                )
            })
            .collect();
        let identity: Vec<Option<usize>> = c
            .morphisms()
            .map(|m| {
                Some(
                    index[&ArrowSquare {
                        source: m,
                        target: m,
                        top: c.identity(c.dom(m)),
                        bottom: c.identity(c.cod(m)),
                    }],
                )
            })
            .collect();
        let assembled = FinCategory::assemble(objects, morphisms, identity, |g, f| {
            let (sg, sf) = (squares[g], squares[f]);
            index
                .get(&ArrowSquare {
                    source: sf.source,
                    target: sg.target,
                    top: c.comp(sg.top, sf.top),
                    bottom: c.comp(sg.bottom, sf.bottom),
                })
                .copied()
        })
        .expect("arrow category assembles");
        debug_assert!(assembled.objects.iter().enumerate().all(|(i, &o)| i == o));
        let mut decoded = squares.clone();
        let mut final_index = HashMap::new();
        for (old, sq) in squares.iter().enumerate() {
            decoded[assembled.morphisms[old]] = *sq;
            final_index.insert(*sq, assembled.morphisms[old]);
        }
        ArrowCat {
            cat: assembled.category,
            base: c.clone(),
            squares: decoded,
            index: final_index,
        }
    }

    pub fn square(&self, m: usize) -> ArrowSquare {
        self.squares[m]
    }

    pub fn square_index(&self, sq: &ArrowSquare) -> Option<usize> {
        self.index.get(sq).copied()
    }

    /// `f^2` from `source` into this arrow category.
    pub fn apply(&self, source: &ArrowCat, f: &Functor) -> Functor {
        Functor {
            source: source.cat.clone(),
            target: self.cat.clone(),
            obj_map: source.base.morphisms().map(|m| f.mor(m)).collect(),
            mor_map: source
                .squares
                .iter()
                .map(|sq| {
                    self.index[&ArrowSquare {
                        source: f.mor(sq.source),
                        target: f.mor(sq.target),
                        top: f.mor(sq.top),
                        bottom: f.mor(sq.bottom),
                    }]
                })
                .collect(),
        }
    }

    /// Domain and codomain functors into the base.
    pub fn boundary(&self) -> (Functor, Functor) {
        let b = &self.base;
        (
            Functor {
                source: self.cat.clone(),
                target: b.clone(),
                obj_map: b.morphisms().map(|m| b.dom(m)).collect(),
                mor_map: self.squares.iter().map(|s| s.top).collect(),
            },
            Functor {
                source: self.cat.clone(),
                target: b.clone(),
                obj_map: b.morphisms().map(|m| b.cod(m)).collect(),
                mor_map: self.squares.iter().map(|s| s.bottom).collect(),
            },
        )
    }
}

/// The functor category `c^2`.
pub fn arrow_category(c: &Arc<FinCategory>) -> Arc<FinCategory> {
    ArrowCat::new(c).cat
}
