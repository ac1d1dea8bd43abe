//! Torus diagrams of fivefolds: fixed points with five tangent weights,
//! compact edges, non-compact leaves, curve classes, and the framing data
//! (distinct directions and cyclic orders) the vertex formalism consumes.

use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use thiserror::Error;

use crate::series::{Degree, Grading};

/// A torus weight in integer coordinates of the character lattice.
pub type Weight = Vec<i64>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid diagram: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("edge {edge}: no linear relation between neighbouring weights")]
    NoLinearRelation { edge: usize },
    #[error("edge {edge}: ambiguous parity, solutions {solutions:?} disagree mod 2")]
    AmbiguousParity { edge: usize, solutions: Vec<Parity> },
    #[error("edge {edge}: parity requested for an edge with an anti-diagonal half-edge")]
    AntidiagonalEdge { edge: usize },
    #[error("edge {edge}: edge quadratic is not divisible by the tangent weight")]
    NonDivisibleQuadratic { edge: usize },
}

/// One failed invariant, located by a JSON path into the diagram file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

impl Violation {
    fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Violation { path: path.into(), message: message.into() }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexRecord {
    pub id: String,
    pub halfedges: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexFramingRecord {
    pub distinct: String,
    pub pair: String,
    pub cyclic: Vec<String>,
}

/// Framing and mixing parity of an edge, each mod 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Parity {
    pub f: u8,
    pub p: u8,
}

/// The on-disk diagram format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub m: usize,
    pub classes: usize,
    pub grading: Vec<u32>,
    pub vertices: Vec<VertexRecord>,
    pub weights: BTreeMap<String, Weight>,
    pub edges: Vec<[String; 2]>,
    pub leaves: Vec<String>,
    pub curve_class: BTreeMap<String, Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub framing: Option<BTreeMap<String, VertexFramingRecord>>,
    /// Resolves edges whose linear relations admit several parities.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub parity_hints: BTreeMap<String, Parity>,
}

impl DiagramFile {
    pub fn from_json_str(s: &str) -> Result<Self, DiagramError> {
        serde_json::from_str(s).map_err(|e| DiagramError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("diagram serializes")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfEdgeId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Attachment {
    Edge(EdgeId),
    Leaf,
}

#[derive(Clone, Debug)]
pub struct HalfEdge {
    pub name: String,
    pub vertex: VertexId,
    pub weight: Weight,
    pub attachment: Attachment,
}

#[derive(Clone, Debug)]
pub struct Vertex {
    pub id: String,
    pub halfedges: [HalfEdgeId; 5],
}

#[derive(Clone, Debug)]
pub struct Edge {
    pub halves: [HalfEdgeId; 2],
    pub class: Vec<u32>,
}

/// A structurally resolved diagram; semantic invariants are checked by [`TorusDiagram::validate`].
#[derive(Clone, Debug)]
pub struct TorusDiagram {
    pub name: Option<String>,
    pub m: usize,
    pub grading: Grading,
    pub vertices: Vec<Vertex>,
    pub half_edges: Vec<HalfEdge>,
    pub edges: Vec<Edge>,
    pub leaves: Vec<HalfEdgeId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexFrame {
    pub distinct: HalfEdgeId,
    pub pair: HalfEdgeId,
    pub cyclic: [HalfEdgeId; 3],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Framing {
    pub frames: Vec<VertexFrame>,
    pub parity_hints: BTreeMap<EdgeId, Parity>,
}

/// Assignment of a covering degree to each edge.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SkeletalDegree(pub Vec<u32>);

impl TorusDiagram {
    /// Resolves names into indices; reports every dangling or duplicated reference.
    pub fn from_file(file: &DiagramFile) -> Result<Self, Vec<Violation>> {
        let mut v = Vec::new();
        if file.grading.len() != file.classes {
            v.push(Violation::new("$.grading", format!("expected {} entries", file.classes)));
        }
        if file.grading.contains(&0) {
            v.push(Violation::new("$.grading", "grading must be positive"));
        }
        let mut index: HashMap<&str, HalfEdgeId> = HashMap::new();
        let mut half_edges = Vec::new();
        let mut vertices = Vec::new();
        for (vi, rec) in file.vertices.iter().enumerate() {
            if rec.halfedges.len() != 5 {
                v.push(Violation::new(format!("$.vertices[{vi}].halfedges"), "a vertex has exactly 5 half-edges"));
                continue;
            }
            let mut ids = [HalfEdgeId(0); 5];
            for (k, name) in rec.halfedges.iter().enumerate() {
                if index.contains_key(name.as_str()) {
                    v.push(Violation::new(
                        format!("$.vertices[{vi}].halfedges[{k}]"),
                        format!("half-edge {name} belongs to more than one vertex"),
                    ));
                }
                let weight = match file.weights.get(name) {
                    Some(w) if w.len() == file.m => w.clone(),
                    Some(_) => {
                        v.push(Violation::new(format!("$.weights.{name}"), format!("expected {} entries", file.m)));
                        vec![0; file.m]
                    }
                    None => {
                        v.push(Violation::new(format!("$.weights.{name}"), "missing weight"));
                        vec![0; file.m]
                    }
                };
                let id = HalfEdgeId(half_edges.len());
                index.insert(name, id);
                half_edges.push(HalfEdge {
                    name: name.clone(),
                    vertex: VertexId(vertices.len()),
                    weight,
                    attachment: Attachment::Leaf,
                });
                ids[k] = id;
            }
            vertices.push(Vertex { id: rec.id.clone(), halfedges: ids });
        }
        for name in file.weights.keys() {
            if !index.contains_key(name.as_str()) {
                v.push(Violation::new(format!("$.weights.{name}"), "weight for an unknown half-edge"));
            }
        }
        let mut attached: Vec<Option<String>> = vec![None; half_edges.len()];
        let mut attach = |h: HalfEdgeId, path: String, v: &mut Vec<Violation>| {
            if let Some(prev) = &attached[h.0] {
                v.push(Violation::new(path, format!("half-edge already used at {prev}")));
            } else {
                attached[h.0] = Some(path);
            }
        };
        let mut edges = Vec::new();
        for (ei, pair) in file.edges.iter().enumerate() {
            let mut halves = [HalfEdgeId(0); 2];
            let mut ok = true;
            for (k, name) in pair.iter().enumerate() {
                match index.get(name.as_str()) {
                    Some(&h) => {
                        attach(h, format!("$.edges[{ei}][{k}]"), &mut v);
                        halves[k] = h;
                    }
                    None => {
                        v.push(Violation::new(format!("$.edges[{ei}][{k}]"), format!("unknown half-edge {name}")));
                        ok = false;
                    }
                }
            }
            let class = match file.curve_class.get(&ei.to_string()) {
                Some(c) if c.len() == file.classes => c.clone(),
                Some(_) => {
                    v.push(Violation::new(format!("$.curve_class.{ei}"), format!("expected {} entries", file.classes)));
                    vec![0; file.classes]
                }
                None => {
                    v.push(Violation::new(format!("$.curve_class.{ei}"), "missing curve class"));
                    vec![0; file.classes]
                }
            };
            if ok {
                if half_edges[halves[0].0].vertex == half_edges[halves[1].0].vertex {
                    v.push(Violation::new(format!("$.edges[{ei}]"), "edge joins a vertex to itself"));
                }
                for h in halves {
                    half_edges[h.0].attachment = Attachment::Edge(EdgeId(edges.len()));
                }
            }
            edges.push(Edge { halves, class });
        }
        for key in file.curve_class.keys() {
            if key.parse::<usize>().map_or(true, |i| i >= file.edges.len()) {
                v.push(Violation::new(format!("$.curve_class.{key}"), "class for an unknown edge"));
            }
        }
        let mut leaves = Vec::new();
        for (li, name) in file.leaves.iter().enumerate() {
            match index.get(name.as_str()) {
                Some(&h) => {
                    attach(h, format!("$.leaves[{li}]"), &mut v);
                    leaves.push(h);
                }
                None => v.push(Violation::new(format!("$.leaves[{li}]"), format!("unknown half-edge {name}"))),
            }
        }
        for (h, a) in attached.iter().enumerate() {
            if a.is_none() {
                v.push(Violation::new(
                    format!("$.weights.{}", half_edges[h].name),
                    "half-edge is neither on an edge nor a leaf",
                ));
            }
        }
        if !v.is_empty() {
            return Err(v);
        }
        Ok(TorusDiagram {
            name: file.name.clone(),
            m: file.m,
            grading: Grading(file.grading.clone()),
            vertices,
            half_edges,
            edges,
            leaves,
        })
    }

    pub fn weight(&self, h: HalfEdgeId) -> &[i64] {
        &self.half_edges[h.0].weight
    }

    pub fn classes(&self) -> usize {
        self.grading.rank()
    }

    fn vertex_path(&self, v: usize) -> String {
        format!("$.vertices[{v}] ({})", self.vertices[v].id)
    }

    /// Calabi–Yau, locally anti-diagonal, edge consistency, nonzero weights, positive edge degree.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for h in &self.half_edges {
            if h.weight.iter().all(|&x| x == 0) {
                out.push(Violation::new(format!("$.weights.{}", h.name), "zero tangent weight"));
            }
        }
        for (vi, vert) in self.vertices.iter().enumerate() {
            let mut total = vec![0i64; self.m];
            for h in vert.halfedges {
                for (t, w) in total.iter_mut().zip(self.weight(h)) {
                    *t += w;
                }
            }
            if total.iter().any(|&x| x != 0) {
                out.push(Violation::new(
                    self.vertex_path(vi),
                    format!("Calabi-Yau condition fails: weights sum to {total:?}"),
                ));
            }
            if anti_diagonal_pairs(self, vert).is_empty() {
                out.push(Violation::new(
                    self.vertex_path(vi),
                    "not locally anti-diagonal: no pair of nonzero opposite weights",
                ));
            }
        }
        for (ei, e) in self.edges.iter().enumerate() {
            let (a, b) = (self.weight(e.halves[0]), self.weight(e.halves[1]));
            if a.iter().zip(b).any(|(x, y)| x + y != 0) {
                out.push(Violation::new(format!("$.edges[{ei}]"), "edge weights are not opposite"));
            }
            if self.grading.of(&e.class) == 0 {
                out.push(Violation::new(format!("$.curve_class.{ei}"), "edge class has grading degree 0"));
            }
        }
        out
    }

    /// Skeletal degrees `d` with `sum_e d_e [C_e] = beta`, in lexicographic order.
    pub fn degrees_for_class(&self, beta: &[u32]) -> Vec<SkeletalDegree> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; self.edges.len()];
        self.degrees_rec(0, beta.to_vec(), &mut cur, &mut out);
        out
    }

    fn degrees_rec(&self, i: usize, rest: Vec<u32>, cur: &mut Vec<u32>, out: &mut Vec<SkeletalDegree>) {
        if i == self.edges.len() {
            if rest.iter().all(|&x| x == 0) {
                out.push(SkeletalDegree(cur.clone()));
            }
            return;
        }
        let class = &self.edges[i].class;
        let max = class
            .iter()
            .zip(&rest)
            .filter(|(c, _)| **c > 0)
            .map(|(c, r)| r / c)
            .min()
            .unwrap_or(0);
        for k in 0..=max {
            cur[i] = k;
            let next: Vec<u32> = rest.iter().zip(class).map(|(r, c)| r - k * c).collect();
            self.degrees_rec(i + 1, next, cur, out);
        }
        cur[i] = 0;
    }

    /// Curve class `sum_e d_e [C_e]`.
    pub fn class_of(&self, d: &SkeletalDegree) -> Degree {
        let mut out = vec![0u32; self.classes()];
        for (e, &k) in self.edges.iter().zip(&d.0) {
            for (o, c) in out.iter_mut().zip(&e.class) {
                *o += k * c;
            }
        }
        out
    }
}

fn anti_diagonal_pairs(d: &TorusDiagram, v: &Vertex) -> Vec<(HalfEdgeId, HalfEdgeId)> {
    let mut out = Vec::new();
    for i in 0..5 {
        for j in i + 1..5 {
            let (a, b) = (d.weight(v.halfedges[i]), d.weight(v.halfedges[j]));
            if a.iter().any(|&x| x != 0) && a.iter().zip(b).all(|(x, y)| x + y == 0) {
                out.push((v.halfedges[i], v.halfedges[j]));
            }
        }
    }
    out
}

impl Framing {
    pub fn from_file(file: &DiagramFile, d: &TorusDiagram) -> Result<Self, Vec<Violation>> {
        let Some(records) = &file.framing else {
            return Err(vec![Violation::new("$.framing", "missing framing")]);
        };
        let mut v = Vec::new();
        let lookup = |name: &str, vi: usize, path: String, v: &mut Vec<Violation>| -> Option<HalfEdgeId> {
            let found = d.vertices[vi].halfedges.iter().copied().find(|&h| d.half_edges[h.0].name == name);
            if found.is_none() {
                v.push(Violation::new(path, format!("{name} is not a half-edge of this vertex")));
            }
            found
        };
        let mut frames = Vec::new();
        for (vi, vert) in d.vertices.iter().enumerate() {
            let base = format!("$.framing.{}", vert.id);
            let Some(rec) = records.get(&vert.id) else {
                v.push(Violation::new(base, "vertex has no framing"));
                continue;
            };
            let distinct = lookup(&rec.distinct, vi, format!("{base}.distinct"), &mut v);
            let pair = lookup(&rec.pair, vi, format!("{base}.pair"), &mut v);
            if rec.cyclic.len() != 3 {
                v.push(Violation::new(format!("{base}.cyclic"), "cyclic order lists exactly 3 half-edges"));
                continue;
            }
            let cyclic: Vec<Option<HalfEdgeId>> = rec
                .cyclic
                .iter()
                .enumerate()
                .map(|(k, n)| lookup(n, vi, format!("{base}.cyclic[{k}]"), &mut v))
                .collect();
            if let (Some(distinct), Some(pair), [Some(a), Some(b), Some(c)]) = (distinct, pair, cyclic.as_slice()) {
                frames.push(VertexFrame { distinct, pair, cyclic: [*a, *b, *c] });
            }
        }
        for key in records.keys() {
            if !d.vertices.iter().any(|x| &x.id == key) {
                v.push(Violation::new(format!("$.framing.{key}"), "framing for an unknown vertex"));
            }
        }
        let mut parity_hints = BTreeMap::new();
        for (key, hint) in &file.parity_hints {
            match key.parse::<usize>() {
                Ok(i) if i < d.edges.len() && hint.f < 2 && hint.p < 2 => {
                    parity_hints.insert(EdgeId(i), *hint);
                }
                _ => v.push(Violation::new(format!("$.parity_hints.{key}"), "unknown edge or parity out of range")),
            }
        }
        if !v.is_empty() {
            return Err(v);
        }
        let framing = Framing { frames, parity_hints };
        let issues = framing.validate(d);
        if issues.is_empty() {
            Ok(framing)
        } else {
            Err(issues)
        }
    }

    /// Distinct/pair are opposite nonzero weights; the cyclic triple is the rest.
    pub fn validate(&self, d: &TorusDiagram) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.frames.len() != d.vertices.len() {
            out.push(Violation::new("$.framing", "one frame per vertex required"));
            return out;
        }
        for (vi, (fr, vert)) in self.frames.iter().zip(&d.vertices).enumerate() {
            let base = format!("$.framing.{}", d.vertices[vi].id);
            let (a, b) = (d.weight(fr.distinct), d.weight(fr.pair));
            if fr.distinct == fr.pair || a.iter().all(|&x| x == 0) || a.iter().zip(b).any(|(x, y)| x + y != 0) {
                out.push(Violation::new(
                    format!("{base}.pair"),
                    "distinct direction and its partner must carry opposite nonzero weights",
                ));
            }
            let rest: BTreeSet<HalfEdgeId> =
                vert.halfedges.iter().copied().filter(|&h| h != fr.distinct && h != fr.pair).collect();
            let cyc: BTreeSet<HalfEdgeId> = fr.cyclic.iter().copied().collect();
            if rest != cyc {
                out.push(Violation::new(
                    format!("{base}.cyclic"),
                    "cyclic order must contain exactly the three remaining half-edges",
                ));
            }
        }
        out
    }

    pub fn is_antidiagonal(&self, d: &TorusDiagram, h: HalfEdgeId) -> bool {
        let fr = &self.frames[d.half_edges[h.0].vertex.0];
        h == fr.distinct || h == fr.pair
    }

    /// `sigma_v(h)`: successor of `h` in the cyclic order at its vertex.
    pub fn successor(&self, d: &TorusDiagram, h: HalfEdgeId) -> Option<HalfEdgeId> {
        let fr = &self.frames[d.half_edges[h.0].vertex.0];
        let i = fr.cyclic.iter().position(|&x| x == h)?;
        Some(fr.cyclic[(i + 1) % 3])
    }

    pub fn distinct_weight<'a>(&self, d: &'a TorusDiagram, v: VertexId) -> &'a [i64] {
        d.weight(self.frames[v.0].distinct)
    }

    /// Stable fingerprint of the diagram together with this framing.
    pub fn hash_hex(&self, d: &TorusDiagram) -> String {
        use sha2::{Digest, Sha256};
        let mut h = Sha256::new();
        let name = |x: HalfEdgeId| d.half_edges[x.0].name.as_str();
        h.update(format!("m={};grading={:?};", d.m, d.grading.0));
        for he in &d.half_edges {
            h.update(format!("w:{}@{}={:?};", he.name, d.vertices[he.vertex.0].id, he.weight));
        }
        for e in &d.edges {
            h.update(format!("e:{}-{}:{:?};", name(e.halves[0]), name(e.halves[1]), e.class));
        }
        for (v, fr) in d.vertices.iter().zip(&self.frames) {
            h.update(format!(
                "f:{}:{}/{}:({},{},{});",
                v.id,
                name(fr.distinct),
                name(fr.pair),
                name(fr.cyclic[0]),
                name(fr.cyclic[1]),
                name(fr.cyclic[2])
            ));
        }
        for (e, p) in &self.parity_hints {
            h.update(format!("p:{}:{}{};", e.0, p.f, p.p));
        }
        hex::encode(h.finalize())
    }
}

/// Edges with at least one half-edge in a chosen anti-diagonal pair.
pub fn antidiagonal_edges(d: &TorusDiagram, f: &Framing) -> BTreeSet<EdgeId> {
    d.edges
        .iter()
        .enumerate()
        .filter(|(_, e)| e.halves.iter().any(|&h| f.is_antidiagonal(d, h)))
        .map(|(i, _)| EdgeId(i))
        .collect()
}

/// Whether `d_e = 0` on every anti-diagonal edge.
pub fn supported_away(d: &TorusDiagram, f: &Framing, deg: &SkeletalDegree) -> Result<(), EdgeId> {
    for e in antidiagonal_edges(d, f) {
        if deg.0[e.0] > 0 {
            return Err(e);
        }
    }
    Ok(())
}

/// A solution of one of the two linear-relation systems.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RelationSolution {
    pub relation: u8,
    pub p1: u8,
    pub f1: i64,
    pub p2: u8,
    pub f2: i64,
}

impl RelationSolution {
    pub fn parity(&self) -> Parity {
        Parity { f: (self.f1 + self.f2).rem_euclid(2) as u8, p: (self.p1 + self.p2) % 2 }
    }
}

/// `f` with `x = f c`, if any.
fn multiple_of(x: &[i64], c: &[i64]) -> Option<i64> {
    let (i, &ci) = c.iter().enumerate().find(|(_, &v)| v != 0)?;
    if x[i] % ci != 0 {
        return None;
    }
    let f = x[i] / ci;
    x.iter().zip(c).all(|(a, b)| *a == f * b).then_some(f)
}

fn combine(a: &[i64], sign: i64, b: &[i64]) -> Weight {
    a.iter().zip(b).map(|(x, y)| x - sign * y).collect()
}

/// All `(relation, p1, f1, p2, f2)` solving either linear-relation system at edge `e`.
pub fn relation_solutions(d: &TorusDiagram, f: &Framing, e: EdgeId) -> Result<Vec<RelationSolution>, DiagramError> {
    let [h, h2] = d.edges[e.0].halves;
    if f.is_antidiagonal(d, h) || f.is_antidiagonal(d, h2) {
        return Err(DiagramError::AntidiagonalEdge { edge: e.0 });
    }
    let c = d.weight(h);
    let s1 = d.weight(f.successor(d, h).expect("non-antidiagonal half-edge is cyclic"));
    let s2 = d.weight(f.successor(d, h2).expect("non-antidiagonal half-edge is cyclic"));
    let ev1 = f.distinct_weight(d, d.half_edges[h.0].vertex);
    let ev2 = f.distinct_weight(d, d.half_edges[h2.0].vertex);
    let systems: [(u8, [(&[i64], &[i64]); 2]); 2] = [(1, [(s1, s2), (ev1, ev2)]), (2, [(s1, ev2), (ev1, s2)])];
    let mut out = Vec::new();
    for (relation, [(a1, b1), (a2, b2)]) in systems {
        for p1 in 0..2u8 {
            let Some(f1) = multiple_of(&combine(a1, if p1 == 0 { 1 } else { -1 }, b1), c) else { continue };
            for p2 in 0..2u8 {
                if let Some(f2) = multiple_of(&combine(a2, if p2 == 0 { 1 } else { -1 }, b2), c) {
                    out.push(RelationSolution { relation, p1, f1, p2, f2 });
                }
            }
        }
    }
    Ok(out)
}

/// Framing parity `f_e` and mixing parity `p_e` of a non-anti-diagonal edge.
pub fn parities(d: &TorusDiagram, f: &Framing, e: EdgeId) -> Result<Parity, DiagramError> {
    let sols = relation_solutions(d, f, e)?;
    let set: BTreeSet<Parity> = sols.iter().map(|s| s.parity()).collect();
    match set.len() {
        0 => Err(DiagramError::NoLinearRelation { edge: e.0 }),
        1 => Ok(*set.iter().next().expect("one element")),
        _ => match f.parity_hints.get(&e) {
            Some(hint) if set.contains(hint) => Ok(*hint),
            _ => Err(DiagramError::AmbiguousParity { edge: e.0, solutions: set.into_iter().collect() }),
        },
    }
}

/// The linear form `L = (eps_v eps_{sigma(h)} + (-1)^{p+1} eps_{v'} eps_{sigma(h')}) / eps_h`.
pub fn edge_linear_form(d: &TorusDiagram, f: &Framing, e: EdgeId, p: u8) -> Result<Vec<Rational64>, DiagramError> {
    let [h, h2] = d.edges[e.0].halves;
    let c = d.weight(h);
    let s1 = d.weight(f.successor(d, h).ok_or(DiagramError::AntidiagonalEdge { edge: e.0 })?);
    let s2 = d.weight(f.successor(d, h2).ok_or(DiagramError::AntidiagonalEdge { edge: e.0 })?);
    let ev1 = f.distinct_weight(d, d.half_edges[h.0].vertex);
    let ev2 = f.distinct_weight(d, d.half_edges[h2.0].vertex);
    let sign = if p.is_multiple_of(2) { -1 } else { 1 };
    divide_quadratic(&[(1, ev1, s1), (sign, ev2, s2)], c).ok_or(DiagramError::NonDivisibleQuadratic { edge: e.0 })
}

/// Divides `sum_k s_k (a_k . x)(b_k . x)` by `c . x` in `Q[x_1..x_m]`.
pub fn divide_quadratic(terms: &[(i64, &[i64], &[i64])], c: &[i64]) -> Option<Vec<Rational64>> {
    let m = c.len();
    let mut q = vec![vec![Rational64::zero(); m]; m];
    for &(s, a, b) in terms {
        for i in 0..m {
            for j in 0..m {
                q[i][j] += Rational64::new(s * (a[i] * b[j] + a[j] * b[i]), 2);
            }
        }
    }
    let k = c.iter().position(|&x| x != 0)?;
    let ck = Rational64::from_integer(c[k]);
    let lk = q[k][k] / ck;
    let l: Vec<Rational64> = (0..m)
        .map(|j| if j == k { lk } else { (q[k][j] * 2 - lk * c[j]) / ck })
        .collect();
    for i in 0..m {
        for j in 0..m {
            let expect = (l[i] * c[j] + l[j] * c[i]) / 2;
            if (q[i][j] - expect).abs() > Rational64::zero() {
                return None;
            }
        }
    }
    Some(l)
}

/// Parses, resolves and validates a diagram file with its framing.
pub fn load(file: &DiagramFile) -> Result<(TorusDiagram, Framing), DiagramError> {
    let d = TorusDiagram::from_file(file).map_err(DiagramError::Invalid)?;
    let v = d.validate();
    if !v.is_empty() {
        return Err(DiagramError::Invalid(v));
    }
    let f = Framing::from_file(file, &d).map_err(DiagramError::Invalid)?;
    Ok((d, f))
}

/// Every violation in the file: structure, diagram invariants, framing, and edge relations.
pub fn validate_file(file: &DiagramFile) -> Vec<Violation> {
    let d = match TorusDiagram::from_file(file) {
        Ok(d) => d,
        Err(v) => return v,
    };
    let mut out = d.validate();
    if file.framing.is_none() {
        return out;
    }
    match Framing::from_file(file, &d) {
        Ok(f) if out.is_empty() => {
            for (i, _) in d.edges.iter().enumerate() {
                let e = EdgeId(i);
                if antidiagonal_edges(&d, &f).contains(&e) {
                    continue;
                }
                let res = parities(&d, &f, e).and_then(|p| edge_linear_form(&d, &f, e, p.p));
                if let Err(err) = res {
                    out.push(Violation::new(format!("$.edges[{i}]"), err.to_string()));
                }
            }
        }
        Ok(_) => {}
        Err(v) => out.extend(v),
    }
    out
}
