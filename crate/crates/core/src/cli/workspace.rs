//! The JSON workspace format. A document describes one site with its
//! pseudofunctors and maps; every table is explicit and is checked by the
//! validators on load. Documents are written in a canonical layout (sorted
//! keys, fixed indentation), so `write(load(x)) == x` for canonical `x`.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::fincat::{CategorySpec, FinCategory, Functor, NatTrans};
use crate::fixtures;
use crate::pstack::{cotensor_two, same_pf, validate_pseudonat, PseudoNat, Pseudofunctor};
use crate::site::{CoverFamily, Pullback, Sieve, Site, SiteSkeleton};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PullbackSpec {
    pub f: String,
    pub g: String,
    pub apex: String,
    pub p1: String,
    pub p2: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub apex: String,
    pub members: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SieveSpec {
    pub apex: String,
    pub arrows: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiberSpec {
    pub object: String,
    pub category: CategorySpec,
}

/// A functor between two fibers; every object and every morphism of the
/// source is listed once.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctorTable {
    pub objects: Vec<(String, String)>,
    pub morphisms: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RestrictionSpec {
    pub arrow: String,
    pub functor: FunctorTable,
}

/// `F(1_U)(x) → x` per object `x` of `F(U)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UpsilonSpec {
    pub object: String,
    pub components: Vec<(String, String)>,
}

/// For `f: V → U` and `g: W → V`, `F(f∘g)(x) → F(g)(F(f)(x))` per object
/// `x` of `F(U)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhiSpec {
    pub f: String,
    pub g: String,
    pub components: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PseudofunctorSpec {
    pub name: String,
    pub fibers: Vec<FiberSpec>,
    pub restrictions: Vec<RestrictionSpec>,
    pub upsilon: Vec<UpsilonSpec>,
    pub phi: Vec<PhiSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentSpec {
    pub object: String,
    pub functor: FunctorTable,
}

/// For `t: V → U`, `p_V(e·t) → p_U(e)·t` per object `e` of the source at `U`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoherenceSpec {
    pub arrow: String,
    pub components: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub name: String,
    pub source: String,
    pub target: String,
    pub components: Vec<ComponentSpec>,
    pub coherence: Vec<CoherenceSpec>,
}

/// One workspace file. Exactly one of `basis` and `covering_sieves` is
/// present.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub site: String,
    pub category: CategorySpec,
    pub terminal: String,
    pub pullbacks: Vec<PullbackSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<FamilySpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub covering_sieves: Option<Vec<SieveSpec>>,
    #[serde(default)]
    pub pseudofunctors: Vec<PseudofunctorSpec>,
    #[serde(default)]
    pub maps: Vec<MapSpec>,
}

impl Document {
    /// Parses without validating; syntax errors carry `file:line:column`.
    pub fn parse(text: &str, file: &str) -> Result<Document> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            location: format!("{file}:{}:{}", e.line(), e.column()),
            message: e.to_string(),
        })
    }

    /// The canonical text of this document, ending in a newline.
    pub fn to_canonical_string(&self) -> String {
        let v = serde_json::to_value(self).expect("documents serialize");
        let mut out = String::new();
        write_canonical(&v, 0, &mut out);
        out.push('\n');
        out
    }
}

const INLINE_WIDTH: usize = 100;

/// Objects and arrays go on one line when they contain no object and fit
/// in [`INLINE_WIDTH`] columns; otherwise one entry per line, indented by two.
pub fn write_canonical(v: &Value, indent: usize, out: &mut String) {
    let compact = serde_json::to_string(v).expect("values serialize");
    let nested_object = match v {
        Value::Array(items) => items.iter().any(Value::is_object),
        Value::Object(_) => true,
        _ => false,
    };
    if !nested_object && compact.len() + indent <= INLINE_WIDTH {
        out.push_str(&compact);
        return;
    }
    let pad = " ".repeat(indent + 2);
    match v {
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad);
                write_canonical(item, indent + 2, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&" ".repeat(indent));
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (k, item)) in map.iter().enumerate() {
                out.push_str(&pad);
                out.push_str(&serde_json::to_string(k).expect("keys serialize"));
                out.push_str(": ");
                write_canonical(item, indent + 2, out);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&" ".repeat(indent));
            out.push('}');
        }
        _ => out.push_str(&compact),
    }
}

/// SHA-256 over the compact canonical bytes of `value`, preceded by the
/// hashes it depends on.
pub fn content_hash<T: Serialize>(deps: &[&str], value: &T) -> String {
    let mut h = Sha256::new();
    for d in deps {
        h.update(d.as_bytes());
        h.update([0u8]);
    }
    h.update(serde_json::to_vec(&serde_json::to_value(value).expect("specs serialize")).expect("values serialize"));
    hex::encode(h.finalize())
}

/// Where an entity was read from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub file: String,
    pub line: usize,
}

#[derive(Debug, Clone)]
pub struct SiteEntry {
    pub name: String,
    pub site: Arc<Site>,
    pub hash: String,
    pub provenance: Provenance,
}

#[derive(Debug, Clone)]
pub struct PfEntry {
    pub name: String,
    pub site: String,
    pub pf: Arc<Pseudofunctor>,
    pub hash: String,
    pub provenance: Provenance,
}

#[derive(Debug, Clone)]
pub struct MapEntry {
    pub name: String,
    pub site: String,
    pub source: String,
    pub target: String,
    pub map: PseudoNat,
    pub hash: String,
    pub provenance: Provenance,
}

/// Validated entities of one or more documents. Pseudofunctors and maps are
/// keyed by `site/name`; a bare name resolves when it is unambiguous.
#[derive(Debug, Clone, Default)]
pub struct Workspace {
    pub sites: Vec<SiteEntry>,
    pub pseudofunctors: Vec<PfEntry>,
    pub maps: Vec<MapEntry>,
}

fn parse_err(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse {
        location: location.into(),
        message: message.into(),
    }
}

fn line_of(text: &str, needle: &str) -> usize {
    text.find(needle)
        .map(|i| text[..i].matches('\n').count() + 1)
        .unwrap_or(1)
}

fn name_line(text: &str, key: &str, name: &str) -> usize {
    let needle = format!("\"{key}\": {}", serde_json::to_string(name).expect("strings serialize"));
    line_of(text, &needle)
}

fn lookup(c: &FinCategory, id: &str, what: &str, loc: &str) -> Result<usize> {
    let found = if what == "object" {
        c.object_index(id)
    } else {
        c.morphism_index(id)
    };
    found.ok_or_else(|| parse_err(loc, format!("unknown {what} `{id}`")))
}

fn functor_from_table(
    source: &Arc<FinCategory>,
    target: &Arc<FinCategory>,
    table: &FunctorTable,
    loc: &str,
) -> Result<Functor> {
    let mut obj_map = vec![None; source.num_objects()];
    for (a, b) in &table.objects {
        let x = lookup(source, a, "object", loc)?;
        if obj_map[x].replace(lookup(target, b, "object", loc)?).is_some() {
            return Err(parse_err(loc, format!("object `{a}` listed twice")));
        }
    }
    let mut mor_map = vec![None; source.num_morphisms()];
    for (m, n) in &table.morphisms {
        let x = lookup(source, m, "morphism", loc)?;
        if mor_map[x].replace(lookup(target, n, "morphism", loc)?).is_some() {
            return Err(parse_err(loc, format!("morphism `{m}` listed twice")));
        }
    }
    let total = |v: Vec<Option<usize>>, what: &str, id: &dyn Fn(usize) -> String| -> Result<Vec<usize>> {
        v.iter()
            .enumerate()
            .map(|(i, x)| x.ok_or_else(|| parse_err(loc, format!("{what} `{}` not mapped", id(i)))))
            .collect()
    };
    let f = Functor {
        source: source.clone(),
        target: target.clone(),
        obj_map: total(obj_map, "object", &|i| source.object_id(i).to_string())?,
        mor_map: total(mor_map, "morphism", &|i| source.morphism_id(i).to_string())?,
    };
    f.validate().into_result(loc)?;
    Ok(f)
}

fn nat_from_table(source: Functor, target: Functor, table: &[(String, String)], loc: &str) -> Result<NatTrans> {
    let dom = source.source.clone();
    let cod = source.target.clone();
    let mut comps = vec![None; dom.num_objects()];
    for (x, m) in table {
        let i = lookup(&dom, x, "object", loc)?;
        if comps[i].replace(lookup(&cod, m, "morphism", loc)?).is_some() {
            return Err(parse_err(loc, format!("component at `{x}` listed twice")));
        }
    }
    let components = comps
        .iter()
        .enumerate()
        .map(|(i, c)| c.ok_or_else(|| parse_err(loc, format!("component at `{}` missing", dom.object_id(i)))))
        .collect::<Result<Vec<_>>>()?;
    Ok(NatTrans {
        source,
        target,
        components,
    })
}

fn functor_table(f: &Functor) -> FunctorTable {
    FunctorTable {
        objects: f
            .source
            .objects()
            .map(|x| {
                (
                    f.source.object_id(x).to_string(),
                    f.target.object_id(f.obj(x)).to_string(),
                )
            })
            .collect(),
        morphisms: f
            .source
            .morphisms()
            .map(|m| {
                (
                    f.source.morphism_id(m).to_string(),
                    f.target.morphism_id(f.mor(m)).to_string(),
                )
            })
            .collect(),
    }
}

fn nat_table(n: &NatTrans) -> Vec<(String, String)> {
    let (dom, cod) = (&n.source.source, &n.source.target);
    dom.objects()
        .map(|x| (dom.object_id(x).to_string(), cod.morphism_id(n.at(x)).to_string()))
        .collect()
}

fn load_site(doc: &Document, file: &str) -> Result<Site> {
    let loc = format!("{file}: site {}", doc.site);
    let cat = FinCategory::from_spec(&doc.category).map_err(|e| match e {
        Error::Parse { location, message } => parse_err(format!("{loc}, category, {location}"), message),
        other => other,
    })?;
    let terminal = lookup(&cat, &doc.terminal, "object", &loc)?;
    let mut pullbacks = HashMap::new();
    for pb in &doc.pullbacks {
        let l = format!("{loc}, pullback of ({}, {})", pb.f, pb.g);
        let key = (
            lookup(&cat, &pb.f, "morphism", &l)?,
            lookup(&cat, &pb.g, "morphism", &l)?,
        );
        let value = Pullback {
            apex: lookup(&cat, &pb.apex, "object", &l)?,
            p1: lookup(&cat, &pb.p1, "morphism", &l)?,
            p2: lookup(&cat, &pb.p2, "morphism", &l)?,
        };
        if pullbacks.insert(key, value).is_some() {
            return Err(parse_err(l, "pullback listed twice"));
        }
    }
    let skeleton = SiteSkeleton {
        cat: cat.clone(),
        terminal,
        pullbacks,
    };
    match (&doc.basis, &doc.covering_sieves) {
        (Some(basis), None) => {
            let mut per: Vec<Vec<CoverFamily>> = vec![Vec::new(); cat.num_objects()];
            for fam in basis {
                let l = format!("{loc}, basis family on {}", fam.apex);
                let apex = lookup(&cat, &fam.apex, "object", &l)?;
                let members = fam
                    .members
                    .iter()
                    .map(|m| lookup(&cat, m, "morphism", &l))
                    .collect::<Result<Vec<_>>>()?;
                per[apex].push(CoverFamily { apex, members });
            }
            Site::from_basis(skeleton, per)
        }
        (None, Some(sieves)) => {
            let mut per: Vec<Vec<Sieve>> = vec![Vec::new(); cat.num_objects()];
            for s in sieves {
                let l = format!("{loc}, covering sieve on {}", s.apex);
                let apex = lookup(&cat, &s.apex, "object", &l)?;
                let arrows = s
                    .arrows
                    .iter()
                    .map(|m| lookup(&cat, m, "morphism", &l))
                    .collect::<Result<_>>()?;
                per[apex].push(Sieve { apex, arrows });
            }
            Site::from_topology(skeleton, per)
        }
        _ => Err(parse_err(
            loc,
            "exactly one of `basis` and `covering_sieves` is required",
        )),
    }
}

fn load_pseudofunctor(site: &Arc<Site>, spec: &PseudofunctorSpec, loc: &str) -> Result<Pseudofunctor> {
    let c = site.cat().clone();
    let mut fibers: Vec<Option<Arc<FinCategory>>> = vec![None; c.num_objects()];
    for fib in &spec.fibers {
        let l = format!("{loc}, fiber at {}", fib.object);
        let u = lookup(&c, &fib.object, "object", &l)?;
        let cat = FinCategory::from_spec(&fib.category).map_err(|e| match e {
            Error::Parse { location, message } => parse_err(format!("{l}, {location}"), message),
            other => other,
        })?;
        if fibers[u].replace(cat).is_some() {
            return Err(parse_err(l, "fiber listed twice"));
        }
    }
    let fibers = fibers
        .into_iter()
        .enumerate()
        .map(|(u, f)| f.ok_or_else(|| parse_err(loc, format!("fiber at `{}` missing", c.object_id(u)))))
        .collect::<Result<Vec<_>>>()?;
    let mut restrict: Vec<Option<Functor>> = vec![None; c.num_morphisms()];
    for r in &spec.restrictions {
        let l = format!("{loc}, restriction along {}", r.arrow);
        let t = lookup(&c, &r.arrow, "morphism", &l)?;
        let f = functor_from_table(&fibers[c.cod(t)], &fibers[c.dom(t)], &r.functor, &l)?;
        if restrict[t].replace(f).is_some() {
            return Err(parse_err(l, "restriction listed twice"));
        }
    }
    let restrict = restrict
        .into_iter()
        .enumerate()
        .map(|(t, f)| f.ok_or_else(|| parse_err(loc, format!("restriction along `{}` missing", c.morphism_id(t)))))
        .collect::<Result<Vec<_>>>()?;
    let mut upsilon: Vec<Option<NatTrans>> = vec![None; c.num_objects()];
    for s in &spec.upsilon {
        let l = format!("{loc}, upsilon at {}", s.object);
        let u = lookup(&c, &s.object, "object", &l)?;
        let n = nat_from_table(
            restrict[c.identity(u)].clone(),
            Functor::identity(&fibers[u]),
            &s.components,
            &l,
        )?;
        if upsilon[u].replace(n).is_some() {
            return Err(parse_err(l, "upsilon listed twice"));
        }
    }
    let upsilon = upsilon
        .into_iter()
        .enumerate()
        .map(|(u, n)| n.ok_or_else(|| parse_err(loc, format!("upsilon at `{}` missing", c.object_id(u)))))
        .collect::<Result<Vec<_>>>()?;
    let mut phi: Vec<Vec<Option<NatTrans>>> = c.morphisms().map(|f| vec![None; c.incoming(c.dom(f)).len()]).collect();
    for s in &spec.phi {
        let l = format!("{loc}, phi at ({}, {})", s.f, s.g);
        let f = lookup(&c, &s.f, "morphism", &l)?;
        let g = lookup(&c, &s.g, "morphism", &l)?;
        if c.cod(g) != c.dom(f) {
            return Err(parse_err(l, "arrows are not composable"));
        }
        let n = nat_from_table(
            restrict[c.comp(f, g)].clone(),
            restrict[g].after(&restrict[f]),
            &s.components,
            &l,
        )?;
        if phi[f][c.incoming_position(g)].replace(n).is_some() {
            return Err(parse_err(l, "phi listed twice"));
        }
    }
    let mut table = Vec::with_capacity(phi.len());
    for (f, row) in phi.into_iter().enumerate() {
        let dom = c.dom(f);
        let row = row
            .into_iter()
            .enumerate()
            .map(|(i, n)| {
                n.ok_or_else(|| {
                    let g = c.incoming(dom)[i];
                    parse_err(
                        loc,
                        format!("phi at `({}, {})` missing", c.morphism_id(f), c.morphism_id(g)),
                    )
                })
            })
            .collect::<Result<Vec<_>>>()?;
        table.push(row);
    }
    Pseudofunctor::new(site.clone(), fibers, restrict, upsilon, table).map_err(|e| match e {
        Error::Validation { report, .. } => Error::Validation {
            entity: loc.to_string(),
            report,
        },
        other => other,
    })
}

fn load_map(source: &Arc<Pseudofunctor>, target: &Arc<Pseudofunctor>, spec: &MapSpec, loc: &str) -> Result<PseudoNat> {
    let c = source.cat().clone();
    let mut comps: Vec<Option<Functor>> = vec![None; c.num_objects()];
    for comp in &spec.components {
        let l = format!("{loc}, component at {}", comp.object);
        let u = lookup(&c, &comp.object, "object", &l)?;
        let f = functor_from_table(source.fiber(u), target.fiber(u), &comp.functor, &l)?;
        if comps[u].replace(f).is_some() {
            return Err(parse_err(l, "component listed twice"));
        }
    }
    let components = comps
        .into_iter()
        .enumerate()
        .map(|(u, f)| f.ok_or_else(|| parse_err(loc, format!("component at `{}` missing", c.object_id(u)))))
        .collect::<Result<Vec<_>>>()?;
    let mut coh: Vec<Option<NatTrans>> = vec![None; c.num_morphisms()];
    for s in &spec.coherence {
        let l = format!("{loc}, coherence along {}", s.arrow);
        let t = lookup(&c, &s.arrow, "morphism", &l)?;
        let from = components[c.dom(t)].after(source.restriction(t));
        let to = target.restriction(t).after(&components[c.cod(t)]);
        let n = nat_from_table(from, to, &s.components, &l)?;
        if coh[t].replace(n).is_some() {
            return Err(parse_err(l, "coherence listed twice"));
        }
    }
    let coherence = coh
        .into_iter()
        .enumerate()
        .map(|(t, n)| n.ok_or_else(|| parse_err(loc, format!("coherence along `{}` missing", c.morphism_id(t)))))
        .collect::<Result<Vec<_>>>()?;
    let p = PseudoNat {
        source: source.clone(),
        target: target.clone(),
        components,
        coherence,
    };
    validate_pseudonat(&p).into_result(loc)?;
    Ok(p)
}

fn site_sections(doc: &Document) -> Value {
    serde_json::json!({
        "site": doc.site,
        "category": doc.category,
        "terminal": doc.terminal,
        "pullbacks": doc.pullbacks,
        "basis": doc.basis,
        "covering_sieves": doc.covering_sieves,
    })
}

impl Workspace {
    /// Reads and validates every file; names must be unique per site and
    /// site names unique across files.
    pub fn load<P: AsRef<Path>>(paths: &[P]) -> Result<Workspace> {
        let mut ws = Workspace::default();
        for p in paths {
            let file = p.as_ref().display().to_string();
            let text = std::fs::read_to_string(p.as_ref())?;
            ws.add_text(&text, &file)?;
        }
        Ok(ws)
    }

    /// Parses, validates and adds one document.
    pub fn add_text(&mut self, text: &str, file: &str) -> Result<()> {
        let doc = Document::parse(text, file)?;
        if self.sites.iter().any(|s| s.name == doc.site) {
            return Err(parse_err(file, format!("site `{}` defined twice", doc.site)));
        }
        let site = Arc::new(load_site(&doc, file)?);
        let site_hash = content_hash(&[], &site_sections(&doc));
        self.sites.push(SiteEntry {
            name: doc.site.clone(),
            site: site.clone(),
            hash: site_hash.clone(),
            provenance: Provenance {
                file: file.to_string(),
                line: name_line(text, "site", &doc.site),
            },
        });
        let mut local: BTreeMap<&str, (Arc<Pseudofunctor>, String)> = BTreeMap::new();
        for spec in &doc.pseudofunctors {
            let loc = format!("{file}: pseudofunctor {}", spec.name);
            if local.contains_key(spec.name.as_str()) {
                return Err(parse_err(loc, "name defined twice"));
            }
            let pf = Arc::new(load_pseudofunctor(&site, spec, &loc)?);
            let hash = content_hash(&[&site_hash], spec);
            local.insert(&spec.name, (pf.clone(), hash.clone()));
            self.pseudofunctors.push(PfEntry {
                name: spec.name.clone(),
                site: doc.site.clone(),
                pf,
                hash,
                provenance: Provenance {
                    file: file.to_string(),
                    line: name_line(text, "name", &spec.name),
                },
            });
        }
        let mut map_names = BTreeMap::new();
        for spec in &doc.maps {
            let loc = format!("{file}: map {}", spec.name);
            if map_names.insert(spec.name.as_str(), ()).is_some() {
                return Err(parse_err(loc, "name defined twice"));
            }
            let find = |n: &str| {
                local
                    .get(n)
                    .cloned()
                    .ok_or_else(|| parse_err(&loc, format!("unknown pseudofunctor `{n}`")))
            };
            let (source, sh) = find(&spec.source)?;
            let (target, th) = find(&spec.target)?;
            let map = load_map(&source, &target, spec, &loc)?;
            self.maps.push(MapEntry {
                name: spec.name.clone(),
                site: doc.site.clone(),
                source: spec.source.clone(),
                target: spec.target.clone(),
                map,
                hash: content_hash(&[&sh, &th], spec),
                provenance: Provenance {
                    file: file.to_string(),
                    line: name_line(text, "name", &spec.name),
                },
            });
        }
        Ok(())
    }

    pub fn site(&self, name: &str) -> Result<&SiteEntry> {
        self.sites
            .iter()
            .find(|s| s.name == name)
            .ok_or_else(|| Error::UnknownEntity(format!("site {name}")))
    }

    pub fn pseudofunctor(&self, name: &str) -> Result<&PfEntry> {
        resolve(&self.pseudofunctors, name, |e| (&e.site, &e.name), "pseudofunctor")
    }

    pub fn map(&self, name: &str) -> Result<&MapEntry> {
        resolve(&self.maps, name, |e| (&e.site, &e.name), "map")
    }

    /// The canonical document of one site, rebuilt from the validated
    /// entities.
    pub fn document(&self, site: &str) -> Result<Document> {
        let entry = self.site(site)?;
        let pfs: Vec<(String, Arc<Pseudofunctor>)> = self
            .pseudofunctors
            .iter()
            .filter(|p| p.site == site)
            .map(|p| (p.name.clone(), p.pf.clone()))
            .collect();
        let maps: Vec<(String, PseudoNat)> = self
            .maps
            .iter()
            .filter(|m| m.site == site)
            .map(|m| (m.name.clone(), m.map.clone()))
            .collect();
        Document::describe(site, &entry.site, &pfs, &maps)
    }
}

fn resolve<'a, T>(entries: &'a [T], name: &str, key: impl Fn(&T) -> (&String, &String), what: &str) -> Result<&'a T> {
    if let Some((site, local)) = name.split_once('/') {
        if let Some(e) = entries
            .iter()
            .find(|e| key(e) == (&site.to_string(), &local.to_string()))
        {
            return Ok(e);
        }
    }
    let hits: Vec<&T> = entries.iter().filter(|e| key(e).1 == name).collect();
    match hits.as_slice() {
        [one] => Ok(one),
        [] => Err(Error::UnknownEntity(format!("{what} {name}"))),
        many => {
            let sites: Vec<&str> = many.iter().map(|e| key(e).0.as_str()).collect();
            Err(Error::UnknownEntity(format!(
                "{what} {name} is ambiguous; qualify it with one of {}",
                sites.join(", ")
            )))
        }
    }
}

impl Document {
    /// Writes in-memory entities as a document. Map endpoints must be
    /// among `pfs` (compared structurally).
    pub fn describe(
        name: &str,
        site: &Site,
        pfs: &[(String, Arc<Pseudofunctor>)],
        maps: &[(String, PseudoNat)],
    ) -> Result<Document> {
        let c = site.cat().clone();
        let mut pullbacks: Vec<(&(usize, usize), &Pullback)> = site.pullback_table().iter().collect();
        pullbacks.sort_by_key(|(k, _)| **k);
        let pullbacks = pullbacks
            .into_iter()
            .map(|(&(f, g), pb)| PullbackSpec {
                f: c.morphism_id(f).to_string(),
                g: c.morphism_id(g).to_string(),
                apex: c.object_id(pb.apex).to_string(),
                p1: c.morphism_id(pb.p1).to_string(),
                p2: c.morphism_id(pb.p2).to_string(),
            })
            .collect();
        let ids = |ms: &mut dyn Iterator<Item = usize>| ms.map(|m| c.morphism_id(m).to_string()).collect();
        let (basis, covering_sieves) = match site.basis() {
            Some(b) => (
                Some(
                    b.iter()
                        .flatten()
                        .map(|f| FamilySpec {
                            apex: c.object_id(f.apex).to_string(),
                            members: ids(&mut f.members.iter().copied()),
                        })
                        .collect(),
                ),
                None,
            ),
            None => (
                None,
                Some(
                    c.objects()
                        .flat_map(|u| site.covering_sieves(u).iter())
                        .map(|s| SieveSpec {
                            apex: c.object_id(s.apex).to_string(),
                            arrows: ids(&mut s.arrows.iter().copied()),
                        })
                        .collect(),
                ),
            ),
        };
        let pseudofunctors = pfs.iter().map(|(n, pf)| describe_pf(n, pf)).collect();
        let name_of = |pf: &Arc<Pseudofunctor>, map: &str| -> Result<String> {
            pfs.iter()
                .find(|(_, q)| same_pf(q, pf))
                .map(|(n, _)| n.clone())
                .ok_or_else(|| Error::UnknownEntity(format!("endpoint of map {map}")))
        };
        let maps = maps
            .iter()
            .map(|(n, m)| {
                Ok(MapSpec {
                    name: n.clone(),
                    source: name_of(&m.source, n)?,
                    target: name_of(&m.target, n)?,
                    components: c
                        .objects()
                        .map(|u| ComponentSpec {
                            object: c.object_id(u).to_string(),
                            functor: functor_table(&m.components[u]),
                        })
                        .collect(),
                    coherence: c
                        .morphisms()
                        .map(|t| CoherenceSpec {
                            arrow: c.morphism_id(t).to_string(),
                            components: nat_table(&m.coherence[t]),
                        })
                        .collect(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Document {
            site: name.to_string(),
            category: c.to_spec(),
            terminal: c.object_id(site.terminal()).to_string(),
            pullbacks,
            basis,
            covering_sieves,
            pseudofunctors,
            maps,
        })
    }
}

fn describe_pf(name: &str, pf: &Pseudofunctor) -> PseudofunctorSpec {
    let c = pf.cat().clone();
    PseudofunctorSpec {
        name: name.to_string(),
        fibers: c
            .objects()
            .map(|u| FiberSpec {
                object: c.object_id(u).to_string(),
                category: pf.fiber(u).to_spec(),
            })
            .collect(),
        restrictions: c
            .morphisms()
            .map(|t| RestrictionSpec {
                arrow: c.morphism_id(t).to_string(),
                functor: functor_table(pf.restriction(t)),
            })
            .collect(),
        upsilon: c
            .objects()
            .map(|u| UpsilonSpec {
                object: c.object_id(u).to_string(),
                components: nat_table(pf.upsilon(u)),
            })
            .collect(),
        phi: c
            .morphisms()
            .flat_map(|f| c.incoming(c.dom(f)).iter().map(move |&g| (f, g)))
            .map(|(f, g)| PhiSpec {
                f: c.morphism_id(f).to_string(),
                g: c.morphism_id(g).to_string(),
                components: nat_table(pf.phi(f, g)),
            })
            .collect(),
    }
}

/// The fixture corpus of one reference site as a document: every fixture
/// pseudofunctor, the arrow and pair prestacks `arrows(A)` and `pairs(A)`
/// that `boundary(A)` connects, and every fixture map.
pub fn fixture_document(site_name: &str) -> Result<Document> {
    let (_, site) = fixtures::sites()
        .into_iter()
        .find(|(n, _)| n == site_name)
        .ok_or_else(|| Error::UnknownEntity(format!("site {site_name}")))?;
    let mut pfs: Vec<(String, Arc<Pseudofunctor>)> = Vec::new();
    let base = fixtures::pseudofunctors(&site);
    for n in &base {
        pfs.push((n.name.clone(), n.pf.clone()));
    }
    for n in &base {
        let cot = cotensor_two(&n.pf);
        pfs.push((format!("arrows({})", n.name), cot.pf.clone()));
        pfs.push((format!("pairs({})", n.name), cot.square.pf.clone()));
    }
    let maps: Vec<(String, PseudoNat)> = fixtures::maps(&site).into_iter().map(|m| (m.name, m.map)).collect();
    Document::describe(site_name, &site, &pfs, &maps)
}
