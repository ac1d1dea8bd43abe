//! Builders for the worked geometries together with their oracles: closed
//! product formulas, hand-specialized partition sums, and index tables.

use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

use crate::diagram::{load, DiagramFile, Framing, Parity, TorusDiagram, VertexFramingRecord, VertexRecord, Weight};
use crate::evaluator::Mode;
use crate::partitions::{partitions_of, Partition};
use crate::ring::{int, HalfExponent, LaurentPoly, LocalizedElem};
use crate::schur::{inv_qdiff, substitute_character, topological_vertex};
use crate::series::{Degree, GradedSeries, Grading};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleStatus {
    Proven,
    Conjectural,
}

/// `N_{d;k1,k2}` keyed by `(k1, k2)`.
pub type QTable = BTreeMap<(u32, u32), i64>;

pub enum Oracle {
    /// Expected disconnected series, expanded to a requested cutoff.
    Disconnected(Box<dyn Fn(u32) -> GradedSeries + Send + Sync>),
    /// Expected `Psi_k(Omega_d)` for the listed grading degrees of a rank-one class lattice.
    AdamsIndices { k: u32, expected: BTreeMap<u32, LocalizedElem> },
    /// Expected q-number expansion of `Omega_d` in characters `x`, `y`.
    QNumberTables { x: Vec<i64>, y: Vec<i64>, tables: BTreeMap<u32, QTable> },
}

pub struct ExampleSpec {
    pub name: String,
    pub parameters: BTreeMap<String, String>,
    pub file: DiagramFile,
    pub diagram: TorusDiagram,
    pub framing: Framing,
    pub mode: Mode,
    /// Why degrees on anti-diagonal edges vanish, when `mode` assumes it.
    pub vanishing_justification: Option<String>,
    pub oracle: Oracle,
    pub oracle_status: OracleStatus,
    /// Signs `Q_i -> s_i Q_i` of the convention in which the oracle indices are stated.
    pub q_signs: Option<Vec<i64>>,
}

impl ExampleSpec {
    fn new(file: DiagramFile, oracle: Oracle, oracle_status: OracleStatus) -> Self {
        let (diagram, framing) = load(&file).unwrap_or_else(|e| panic!("builtin diagram is valid: {e}"));
        ExampleSpec {
            name: file.name.clone().unwrap_or_default(),
            parameters: BTreeMap::new(),
            file,
            diagram,
            framing,
            mode: Mode::Strict,
            vanishing_justification: None,
            oracle,
            oracle_status,
            q_signs: None,
        }
    }

    fn with_parameter(mut self, key: &str, value: impl Into<String>) -> Self {
        self.parameters.insert(key.into(), value.into());
        self
    }
}

/// Names accepted by [`by_name`].
pub const BUILTIN: &[&str] =
    &["a1c3-A", "a1c3-B", "strip-ud", "strip-uu", "strip-uud", "strip-udu", "conifold-a1", "local-p2", "local-p3"];

/// Builtin examples by name; `strip-<pattern>` accepts any word in `u`/`d`.
pub fn by_name(name: &str) -> Option<ExampleSpec> {
    match name {
        "a1c3-A" => Some(a1c3(A1C3Case::A)),
        "a1c3-B" => Some(a1c3(A1C3Case::B)),
        "conifold-a1" => Some(conifold_a1()),
        "local-p2" => Some(local_p2()),
        "local-p3" => Some(local_p3()),
        _ => {
            let pattern = name.strip_prefix("strip-")?;
            let legs: Option<Vec<Leg>> = pattern
                .chars()
                .map(|c| match c {
                    'u' => Some(Leg::Up),
                    'd' => Some(Leg::Down),
                    _ => None,
                })
                .collect();
            legs.filter(|l| !l.is_empty()).map(|l| strip(&l))
        }
    }
}

/// Incremental construction of a diagram file; unattached half-edges become leaves.
struct Draft {
    file: DiagramFile,
}

impl Draft {
    fn new(name: &str, m: usize, grading: Vec<u32>) -> Self {
        Draft {
            file: DiagramFile {
                name: Some(name.into()),
                notes: Vec::new(),
                m,
                classes: grading.len(),
                grading,
                vertices: Vec::new(),
                weights: BTreeMap::new(),
                edges: Vec::new(),
                leaves: Vec::new(),
                curve_class: BTreeMap::new(),
                framing: Some(BTreeMap::new()),
                parity_hints: BTreeMap::new(),
            },
        }
    }

    fn note(&mut self, s: &str) {
        self.file.notes.push(s.into());
    }

    fn vertex(&mut self, id: &str, halves: [(&str, Weight); 5]) {
        let mut names = Vec::new();
        for (n, w) in halves {
            let name = format!("{id}:{n}");
            self.file.weights.insert(name.clone(), w);
            names.push(name);
        }
        self.file.vertices.push(VertexRecord { id: id.into(), halfedges: names });
    }

    fn edge(&mut self, a: &str, b: &str, class: Vec<u32>) {
        self.file.curve_class.insert(self.file.edges.len().to_string(), class);
        self.file.edges.push([a.into(), b.into()]);
    }

    fn frame(&mut self, v: &str, distinct: &str, pair: &str, cyclic: [&str; 3]) {
        let q = |n: &str| format!("{v}:{n}");
        self.file.framing.as_mut().expect("draft has framing").insert(
            v.into(),
            VertexFramingRecord { distinct: q(distinct), pair: q(pair), cyclic: cyclic.iter().map(|n| q(n)).collect() },
        );
    }

    fn finish(mut self) -> DiagramFile {
        let used: BTreeSet<&String> = self.file.edges.iter().flatten().collect();
        let leaves: Vec<String> = self
            .file
            .vertices
            .iter()
            .flat_map(|v| v.halfedges.iter())
            .filter(|h| !used.contains(h))
            .cloned()
            .collect();
        self.file.leaves = leaves;
        self.file
    }
}

/// `1 / (x^{1/2} - x^{-1/2})` for the character `x = q^c`.
pub fn inv_bracket(c: &[i64]) -> LocalizedElem {
    substitute_character(&inv_qdiff(1), c).expect("nonzero character")
}

/// Symmetrized q-number `[n]_x` for `x = q^c`.
pub fn qnumber(n: u32, c: &[i64]) -> LocalizedElem {
    let m = c.len();
    let terms = (0..n).map(|j| {
        let k = n as i64 - 1 - 2 * j as i64;
        (HalfExponent::from(c.iter().map(|&x| (k * x) as i32).collect::<Vec<_>>()), int(1))
    });
    LocalizedElem::from_poly(LaurentPoly::from_terms(m, terms))
}

/// `1 / [n]_x = x^{(n-1)/2} (1 - x) / (1 - x^n)`.
pub fn inv_qnumber(n: u32, c: &[i64]) -> LocalizedElem {
    let half = |k: i64| HalfExponent::from(c.iter().map(|&x| (k * x) as i32).collect::<Vec<_>>());
    let num = LaurentPoly::from_terms(c.len(), [(half(n as i64 - 1), int(1)), (half(n as i64 + 1), int(-1))]);
    LocalizedElem::from_poly(num).div_one_minus(&half(2 * n as i64))
}

/// `(q^c)^{kappa(mu)/2}`.
pub fn kappa_monomial(c: &[i64], mu: &Partition) -> LocalizedElem {
    let k = mu.kappa();
    LocalizedElem::monomial(HalfExponent::from(c.iter().map(|&x| (x * k) as i32).collect::<Vec<_>>()), int(1))
}

/// `W_{a,b,c}(q^chi)`.
pub fn vertex_at(a: &Partition, b: &Partition, c: &Partition, chi: &[i64]) -> LocalizedElem {
    substitute_character(&topological_vertex(a, b, c), chi).expect("nonzero character")
}

fn sign(n: u32) -> i64 {
    if n.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn pexp_of(m: usize, grading: Grading, cutoff: u32, terms: Vec<(Degree, LocalizedElem)>) -> GradedSeries {
    let mut f = GradedSeries::zero(m, grading, cutoff);
    for (d, c) in terms {
        if f.grading.of(&d) <= cutoff {
            let prev = f.get(&d);
            f.set(d, &prev + &c);
        }
    }
    f.pexp()
}

/// Explicit partition sum with one partition per variable of class `classes[i]`.
pub fn hand_sum(
    m: usize,
    grading: &Grading,
    classes: &[Vec<u32>],
    cutoff: u32,
    term: impl Fn(&[Partition]) -> LocalizedElem,
) -> GradedSeries {
    let mut acc: BTreeMap<Degree, Vec<LocalizedElem>> = BTreeMap::new();
    let mut sizes = vec![0u32; classes.len()];
    loop {
        let mut beta = vec![0u32; grading.rank()];
        for (s, c) in sizes.iter().zip(classes) {
            for (b, x) in beta.iter_mut().zip(c) {
                *b += s * x;
            }
        }
        if grading.of(&beta) <= cutoff {
            let choices: Vec<Vec<Partition>> = sizes.iter().map(|&s| partitions_of(s)).collect();
            let mut idx = vec![0usize; choices.len()];
            'labels: loop {
                let mus: Vec<Partition> = idx.iter().zip(&choices).map(|(&i, c)| c[i].clone()).collect();
                acc.entry(beta.clone()).or_default().push(term(&mus));
                for k in (0..idx.len()).rev() {
                    idx[k] += 1;
                    if idx[k] < choices[k].len() {
                        continue 'labels;
                    }
                    idx[k] = 0;
                }
                break;
            }
        }
        let mut k = 0;
        loop {
            if k == sizes.len() {
                return finish_hand_sum(m, grading, cutoff, acc);
            }
            sizes[k] += 1;
            if grading.of(&classes[k]) * sizes[k] <= cutoff {
                break;
            }
            sizes[k] = 0;
            k += 1;
        }
    }
}

fn finish_hand_sum(m: usize, grading: &Grading, cutoff: u32, acc: BTreeMap<Degree, Vec<LocalizedElem>>) -> GradedSeries {
    let mut out = GradedSeries::zero(m, grading.clone(), cutoff);
    for (d, terms) in acc {
        out.set(d, LocalizedElem::sum_all(m, terms.iter()));
    }
    out
}

// ---------------------------------------------------------------------------
// A^1 x C^3

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum A1C3Case {
    /// Rank-three torus with one anti-diagonal plane on both vertices.
    A,
    /// Rank-two torus where the two vertices use different distinct directions.
    B,
}

/// Two vertices joined by the compact curve of `Tot O(-2) x C^3`.
pub fn a1c3(case: A1C3Case) -> ExampleSpec {
    match case {
        A1C3Case::A => {
            let mut d = Draft::new("a1c3-A", 3, vec![1]);
            d.note("coordinates (e1, e3, e4); the C^2 factor carries weights +-e4");
            d.vertex("0", [("e", vec![1, 0, 0]), ("b", vec![-1, -1, 0]), ("c", vec![0, 1, 0]), ("d", vec![0, 0, 1]), ("p", vec![0, 0, -1])]);
            d.vertex("inf", [("e", vec![-1, 0, 0]), ("b", vec![1, -1, 0]), ("c", vec![0, 1, 0]), ("d", vec![0, 0, 1]), ("p", vec![0, 0, -1])]);
            d.edge("0:e", "inf:e", vec![1]);
            d.frame("0", "d", "p", ["e", "c", "b"]);
            d.frame("inf", "d", "p", ["c", "e", "b"]);
            let oracle = Oracle::Disconnected(Box::new(|cutoff| {
                let a = &inv_bracket(&[0, 0, 1]) * &inv_bracket(&[0, 0, 1]);
                pexp_of(3, Grading(vec![1]), cutoff, vec![(vec![1], a)])
            }));
            ExampleSpec::new(d.finish(), oracle, OracleStatus::Proven).with_parameter("case", "A")
        }
        A1C3Case::B => {
            let mut d = Draft::new("a1c3-B", 2, vec![1]);
            d.note("coordinates (e1, e2)");
            d.vertex("0", [("e", vec![1, 0]), ("b", vec![-1, 1]), ("c", vec![0, 1]), ("g", vec![1, -1]), ("o", vec![-1, -1])]);
            d.vertex("inf", [("e", vec![-1, 0]), ("b", vec![1, 1]), ("c", vec![0, 1]), ("g", vec![1, -1]), ("o", vec![-1, -1])]);
            d.edge("0:e", "inf:e", vec![1]);
            d.frame("0", "g", "b", ["e", "o", "c"]);
            d.frame("inf", "o", "b", ["g", "e", "c"]);
            let oracle = Oracle::Disconnected(Box::new(|cutoff| {
                let a = &inv_bracket(&[1, -1]) * &inv_bracket(&[-1, -1]);
                pexp_of(2, Grading(vec![1]), cutoff, vec![(vec![1], a)])
            }));
            ExampleSpec::new(d.finish(), oracle, OracleStatus::Proven).with_parameter("case", "B")
        }
    }
}

/// The same geometry under the full rank-four Calabi-Yau torus: not locally anti-diagonal.
pub fn a1c3_generic_file() -> DiagramFile {
    let mut d = Draft::new("a1c3-generic", 4, vec![1]);
    d.note("coordinates (e1, e2, e3, e4) with e5 = -e2 - e3 - e4");
    d.vertex(
        "0",
        [("e", vec![1, 0, 0, 0]), ("b", vec![-1, 1, 0, 0]), ("c", vec![0, 0, 1, 0]), ("d", vec![0, 0, 0, 1]), ("f", vec![0, -1, -1, -1])],
    );
    d.vertex(
        "inf",
        [("e", vec![-1, 0, 0, 0]), ("b", vec![1, 1, 0, 0]), ("c", vec![0, 0, 1, 0]), ("d", vec![0, 0, 0, 1]), ("f", vec![0, -1, -1, -1])],
    );
    d.edge("0:e", "inf:e", vec![1]);
    let mut file = d.finish();
    file.framing = None;
    file
}

// ---------------------------------------------------------------------------
// Strips

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Leg {
    Up,
    Down,
}

/// Dual basis `w_i . v_j = delta_ij` of a unimodular triple.
fn dual_basis(v: [[i64; 3]; 3]) -> [[i64; 3]; 3] {
    let cross = |a: [i64; 3], b: [i64; 3]| [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
    let det: i64 = (0..3).map(|k| v[0][k] * cross(v[1], v[2])[k]).sum();
    assert!(det == 1 || det == -1, "strip triangles are unimodular");
    let rows = [cross(v[1], v[2]), cross(v[2], v[0]), cross(v[0], v[1])];
    rows.map(|r| r.map(|x| x * det))
}

/// `X x C^2` for the toric strip `X` with legs in `pattern`, on the torus with
/// coordinates `(u, e4, e5)` where up legs carry `-e4` and down legs `-e5`.
pub fn strip(pattern: &[Leg]) -> ExampleSpec {
    assert!(!pattern.is_empty(), "a strip has at least one vertex");
    let n = pattern.len();
    let word: String = pattern.iter().map(|l| if *l == Leg::Up { 'u' } else { 'd' }).collect();
    let mut d = Draft::new(&format!("strip-{word}"), 3, vec![1; n - 1]);
    d.note("coordinates (u, e4, e5); the fibre plane carries weights e4, e5");
    let (mut a, mut b) = (0i64, 0i64);
    let lift = |x: i64, row: i64| [x, row, 1];
    let to_torus = |w: [i64; 3]| vec![w[0], -w[2], -w[1] - w[2]];
    for (i, leg) in pattern.iter().enumerate() {
        let id = format!("v{}", i + 1);
        // (leg, left, right) as indices into the triangle's points.
        let (pts, roles) = match leg {
            Leg::Down => {
                let p = [lift(a, 0), lift(a + 1, 0), lift(b, 1)];
                a += 1;
                (p, [2, 1, 0])
            }
            Leg::Up => {
                let p = [lift(a, 0), lift(b, 1), lift(b + 1, 1)];
                b += 1;
                (p, [0, 2, 1])
            }
        };
        let w = dual_basis(pts);
        d.vertex(
            &id,
            [
                ("leg", to_torus(w[roles[0]])),
                ("left", to_torus(w[roles[1]])),
                ("right", to_torus(w[roles[2]])),
                ("e4", vec![0, 1, 0]),
                ("e5", vec![0, 0, 1]),
            ],
        );
        match leg {
            Leg::Up => d.frame(&id, "e4", "leg", ["right", "left", "e5"]),
            Leg::Down => d.frame(&id, "leg", "e5", ["right", "e4", "left"]),
        }
    }
    for i in 1..n {
        let mut class = vec![0; n - 1];
        class[i - 1] = 1;
        d.edge(&format!("v{i}:right"), &format!("v{}:left", i + 1), class);
    }
    let pattern = pattern.to_vec();
    let oracle = Oracle::Disconnected(Box::new(move |cutoff| strip_closed_form(&pattern, cutoff)));
    ExampleSpec::new(d.finish(), oracle, OracleStatus::Proven).with_parameter("pattern", word)
}

/// `Exp(sum_{m<n} Q_m...Q_{n-1} / ((q_{v_m}^{1/2} - q_{v_m}^{-1/2})(q_{v_n}^{1/2} - q_{v_n}^{-1/2})))`
/// with `q_v = q4` on up vertices and `q5` on down vertices.
pub fn strip_closed_form(pattern: &[Leg], cutoff: u32) -> GradedSeries {
    let n = pattern.len();
    let q = |l: Leg| if l == Leg::Up { inv_bracket(&[0, 1, 0]) } else { inv_bracket(&[0, 0, 1]) };
    let mut terms = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let mut deg = vec![0; n - 1];
            for k in &mut deg[a..b] {
                *k = 1;
            }
            terms.push((deg, &q(pattern[a]) * &q(pattern[b])));
        }
    }
    pexp_of(3, Grading(vec![1; n - 1]), cutoff, terms)
}

// ---------------------------------------------------------------------------
// Resolved conifold x A_1 resolution

/// The square of the conifold times the `A_1` resolution, classes `(Q1, Q2)`.
pub fn conifold_a1() -> ExampleSpec {
    let mut d = Draft::new("conifold-a1", 2, vec![1, 1]);
    d.note("coordinates (e1, e2); fibre weights e3 = -e2, e4 = e2, e5 = -e1 - e2 at (0,0)");
    d.vertex("00", [("m1", vec![1, 0]), ("n1", vec![0, 1]), ("f3", vec![0, -1]), ("f4", vec![0, 1]), ("f5", vec![-1, -1])]);
    d.vertex("i0", [("m1", vec![-1, 0]), ("n2", vec![0, 1]), ("f3", vec![1, -1]), ("f4", vec![1, 1]), ("f5", vec![-1, -1])]);
    d.vertex("0i", [("m2", vec![1, 0]), ("n1", vec![0, -1]), ("f3", vec![0, -1]), ("f4", vec![0, 1]), ("f5", vec![-1, 1])]);
    d.vertex("ii", [("m2", vec![-1, 0]), ("n2", vec![0, -1]), ("f3", vec![1, -1]), ("f4", vec![1, 1]), ("f5", vec![-1, 1])]);
    d.edge("00:m1", "i0:m1", vec![1, 0]);
    d.edge("0i:m2", "ii:m2", vec![1, 0]);
    d.edge("00:n1", "0i:n1", vec![0, 1]);
    d.edge("i0:n2", "ii:n2", vec![0, 1]);
    d.frame("00", "f3", "f4", ["n1", "m1", "f5"]);
    d.frame("i0", "f4", "f5", ["m1", "n2", "f3"]);
    d.frame("0i", "f4", "f3", ["n1", "m2", "f5"]);
    d.frame("ii", "f3", "f5", ["m2", "n2", "f4"]);
    d.note("the n1 edge admits two parities; the transposed matching is selected");
    let mut file = d.finish();
    file.parity_hints.insert("2".into(), Parity { f: 0, p: 1 });
    let oracle = Oracle::Disconnected(Box::new(conifold_conjecture));
    ExampleSpec::new(file, oracle, OracleStatus::Conjectural)
}

/// The conjectured factorized product for the conifold times the `A_1` resolution.
pub fn conifold_conjecture(cutoff: u32) -> GradedSeries {
    let m = 2;
    let h = |a: i32, b: i32| HalfExponent::from(vec![a, b]);
    let poly = |t: &[(i32, i32, i64)]| LaurentPoly::from_terms(m, t.iter().map(|&(a, b, c)| (h(a, b), int(c))));
    let f1 = LocalizedElem::from_poly(poly(&[(1, 0, 1), (3, 0, 1)])).div_one_minus(&h(2, 2)).div_one_minus(&h(2, -2));
    let f2 = LocalizedElem::from_poly(poly(&[(0, 2, 1), (2, 2, -2), (4, 2, 1)]))
        .div_one_minus(&h(0, 2))
        .div_one_minus(&h(0, 2))
        .div_one_minus(&h(2, 2))
        .div_one_minus(&h(2, -2));
    pexp_of(m, Grading(vec![1, 1]), cutoff, vec![(vec![1, 0], f1), (vec![0, 1], f2)])
}

/// The four-vertex partition sum written out for this geometry.
pub fn conifold_hand_sum(cutoff: u32) -> GradedSeries {
    let e = Partition::empty();
    let classes = [vec![1, 0], vec![1, 0], vec![0, 1], vec![0, 1]];
    hand_sum(2, &Grading(vec![1, 1]), &classes, cutoff, |p| {
        let (m1, m2, n1, n2) = (&p[0], &p[1], &p[2], &p[3]);
        let w = [
            vertex_at(n1, m1, &e, &[0, -1]),
            vertex_at(m1, n2, &e, &[1, 1]),
            vertex_at(m2, n2, &e, &[1, -1]),
            vertex_at(&n1.transpose(), m2, &e, &[0, 1]),
        ];
        let prod = w.iter().fold(LocalizedElem::from_int(2, sign(n1.size())), |acc, x| &acc * x);
        prod
    })
}

// ---------------------------------------------------------------------------
// O(-1)^3 over P^2

/// The triangle of `Tot O(-1)^{+3}` over `P^2` on the rank-three torus.
pub fn local_p2() -> ExampleSpec {
    let mut d = Draft::new("local-p2", 3, vec![1]);
    d.note("coordinates (e0, e1, e2); all edges are lines [H]");
    d.vertex("P0", [("P1", vec![-1, 1, 0]), ("P2", vec![-1, 0, 1]), ("d", vec![0, 1, -1]), ("p", vec![0, -1, 1]), ("leg", vec![2, -1, -1])]);
    d.vertex("P1", [("P0", vec![1, -1, 0]), ("P2", vec![0, -1, 1]), ("d", vec![-1, 0, 1]), ("p", vec![1, 0, -1]), ("leg", vec![-1, 2, -1])]);
    d.vertex("P2", [("P0", vec![1, 0, -1]), ("P1", vec![0, 1, -1]), ("d", vec![1, -1, 0]), ("p", vec![-1, 1, 0]), ("leg", vec![-1, -1, 2])]);
    d.edge("P0:P1", "P1:P0", vec![1]);
    d.edge("P1:P2", "P2:P1", vec![1]);
    d.edge("P2:P0", "P0:P2", vec![1]);
    d.frame("P0", "d", "p", ["P2", "P1", "leg"]);
    d.frame("P1", "d", "p", ["P0", "P2", "leg"]);
    d.frame("P2", "d", "p", ["P1", "P0", "leg"]);
    let oracle = Oracle::AdamsIndices { k: 2, expected: p2_indices_doubled() };
    ExampleSpec::new(d.finish(), oracle, OracleStatus::Proven)
}

/// The triangle partition sum written out for this geometry.
pub fn p2_hand_sum(cutoff: u32) -> GradedSeries {
    let e = Partition::empty();
    hand_sum(3, &Grading(vec![1]), &[vec![1], vec![1], vec![1]], cutoff, |p| {
        let (m1, m2, m3) = (&p[0], &p[1], &p[2]);
        let n = m1.size() + m2.size() + m3.size();
        let f = [
            kappa_monomial(&[0, -1, 1], m1),
            kappa_monomial(&[1, 0, -1], m2),
            kappa_monomial(&[-1, 1, 0], m3),
            vertex_at(m1, m2, &e, &[-1, 0, 1]),
            vertex_at(m2, m3, &e, &[1, -1, 0]),
            vertex_at(m3, m1, &e, &[0, 1, -1]),
        ];
        f.iter().fold(LocalizedElem::from_int(3, sign(n)), |acc, x| &acc * x)
    })
}

/// Rows `(coefficient, a, b, c)` of `sum coefficient e1^a e2^b e3^c`.
pub fn parse_e_polynomial(csv: &str) -> Vec<(i64, i32, i32, i32)> {
    csv.lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let v: Vec<i64> = l.split(',').map(|x| x.trim().parse().expect("integer cell")).collect();
            (v[0], v[1] as i32, v[2] as i32, v[3] as i32)
        })
        .collect()
}

pub const P2_OMEGA3_CSV: &str = include_str!("../fixtures/tables/p2_omega3.csv");
pub const P2_OMEGA4_CSV: &str = include_str!("../fixtures/tables/p2_omega4.csv");
pub const P3_D4_CSV: &str = include_str!("../fixtures/tables/p3_d4.csv");
pub const P3_D5_CSV: &str = include_str!("../fixtures/tables/p3_d5.csv");
pub const P3_D6_CSV: &str = include_str!("../fixtures/tables/p3_d6.csv");

/// `Psi_2` of the displayed local-P^2 indices. Under `Psi_2` the half-powers
/// `qbar_i^{1/2}` and `e_k` become honest half-exponent monomials.
pub fn p2_indices_doubled() -> BTreeMap<u32, LocalizedElem> {
    let m = 3;
    let c: [[i64; 3]; 3] = [[1, -1, 0], [0, 1, -1], [-1, 0, 1]];
    let prod = |f: &dyn Fn(&[i64]) -> LocalizedElem| c.iter().fold(LocalizedElem::one(m), |acc, ci| &acc * &f(ci));
    let pre1 = prod(&|ci| inv_qnumber(2, ci));
    let pre3 = prod(&|ci| &inv_qnumber(2, ci) * &inv_qnumber(4, ci));
    let pre4 = prod(&|ci| &(&qnumber(3, ci) * &inv_qnumber(2, ci)) * &(&inv_qnumber(4, ci) * &inv_qnumber(6, ci)));
    let mono = |e: [i32; 3]| LaurentPoly::monomial(HalfExponent::from(e.to_vec()), int(1));
    let e1 = &(&mono([2, 0, 0]) + &mono([0, 2, 0])) + &mono([0, 0, 2]);
    let e2 = &(&mono([2, 2, 0]) + &mono([2, 0, 2])) + &mono([0, 2, 2]);
    let e3 = |k: i32| mono([2 * k, 2 * k, 2 * k]);
    let poly = |rows: Vec<(i64, i32, i32, i32)>| {
        let mut acc = LaurentPoly::zero(m);
        for (coef, a, b, k) in rows {
            let t = &(&e1.pow(a as u32) * &e2.pow(b as u32)) * &e3(k);
            acc = &acc + &t.scale(&int(coef));
        }
        LocalizedElem::from_poly(acc)
    };
    BTreeMap::from([
        (1, -&pre1),
        (2, pre1.clone()),
        (3, &pre3 * &poly(parse_e_polynomial(P2_OMEGA3_CSV))),
        (4, &pre4 * &poly(parse_e_polynomial(P2_OMEGA4_CSV))),
    ])
}

// ---------------------------------------------------------------------------
// O(-2)^2 over P^3

/// Parses a table laid out as `k1\k2,<k2 values>` followed by rows `k1,<cells>`; blanks are zero.
pub fn parse_qtable(csv: &str) -> QTable {
    let mut lines = csv.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<u32> =
        lines.next().expect("header row").split(',').skip(1).map(|x| x.trim().parse().expect("column index")).collect();
    let mut out = QTable::new();
    for line in lines {
        let mut cells = line.split(',');
        let k1: u32 = cells.next().expect("row index").trim().parse().expect("row index");
        for (k2, cell) in header.iter().zip(cells) {
            let cell = cell.trim();
            if !cell.is_empty() {
                out.insert((k1, *k2), cell.parse().expect("integer cell"));
            }
        }
    }
    out
}

/// Index tables by degree: the low-degree values and the degree 4 to 6 fixture tables.
pub fn p3_tables() -> BTreeMap<u32, QTable> {
    BTreeMap::from([
        (1, QTable::new()),
        (2, QTable::from([((1, 1), 2)])),
        (3, QTable::from([((4, 4), -2)])),
        (4, parse_qtable(P3_D4_CSV)),
        (5, parse_qtable(P3_D5_CSV)),
        (6, parse_qtable(P3_D6_CSV)),
    ])
}

pub const P3_X: [i64; 4] = [1, -1, 0, 0];
pub const P3_Y: [i64; 4] = [0, 0, 1, -1];

/// `Tot O(-2)^{+2}` over `P^3` on the rank-four torus; lines `P0P1`, `P2P3` are anti-diagonal.
pub fn local_p3() -> ExampleSpec {
    let mut d = Draft::new("local-p3", 4, vec![1]);
    d.note("coordinates (e0, e1, e2, e3); fibre weights -e0-e1+2e_i and -e2-e3+2e_i at P_i");
    for i in 0..4 {
        let unit = |j: usize| (0..4).map(|k| if k == j { 1 } else { 0 }).collect::<Vec<i64>>();
        let towards = |j: usize| unit(j).iter().zip(unit(i)).map(|(a, b)| a - b).collect::<Vec<i64>>();
        let fibre = |a: usize, b: usize| (0..4).map(|k| 2 * unit(i)[k] - unit(a)[k] - unit(b)[k]).collect::<Vec<i64>>();
        let others: Vec<usize> = (0..4).filter(|&j| j != i).collect();
        let names: Vec<String> = others.iter().map(|j| format!("P{j}")).collect();
        d.vertex(
            &format!("P{i}"),
            [
                (&names[0], towards(others[0])),
                (&names[1], towards(others[1])),
                (&names[2], towards(others[2])),
                ("f01", fibre(0, 1)),
                ("f23", fibre(2, 3)),
            ],
        );
    }
    d.edge("P0:P1", "P1:P0", vec![1]);
    d.edge("P2:P3", "P3:P2", vec![1]);
    d.edge("P0:P2", "P2:P0", vec![1]);
    d.edge("P2:P1", "P1:P2", vec![1]);
    d.edge("P1:P3", "P3:P1", vec![1]);
    d.edge("P3:P0", "P0:P3", vec![1]);
    d.frame("P0", "f01", "P1", ["P3", "P2", "f23"]);
    d.frame("P1", "f01", "P0", ["P2", "P3", "f23"]);
    d.frame("P2", "f23", "P3", ["P0", "P1", "f01"]);
    d.frame("P3", "f23", "P2", ["P1", "P0", "f01"]);
    d.note("degrees on the lines P0P1 and P2P3 contribute zero");
    let oracle = Oracle::QNumberTables { x: P3_X.to_vec(), y: P3_Y.to_vec(), tables: p3_tables() };
    let mut spec = ExampleSpec::new(d.finish(), oracle, OracleStatus::Proven);
    spec.mode = Mode::AssumeVanishing;
    // The tables are the indices of GW(-Q): odd degrees of the displayed
    // vertex sum appear with the opposite sign.
    spec.q_signs = Some(vec![-1]);
    spec.vanishing_justification = Some(
        "over the lines P0P1 and P2P3 the bundle is O(-2)+O(-2) and the torus fixes the holomorphic two-form \
         of one Tot O(-2) factor; this nowhere vanishing invariant form gives a trivial factor of the \
         obstruction bundle, so the virtual class of every fixed component meeting these lines vanishes"
            .into(),
    );
    spec
}

/// The four-edge partition sum written out for this geometry.
pub fn p3_hand_sum(cutoff: u32) -> GradedSeries {
    let e = Partition::empty();
    hand_sum(4, &Grading(vec![1]), &[vec![1], vec![1], vec![1], vec![1]], cutoff, |p| {
        let (m1, m2, m3, m4) = (&p[0], &p[1], &p[2], &p[3]);
        let f = [
            kappa_monomial(&[-2, 2, -1, 1], m1),
            kappa_monomial(&[1, -1, -2, 2], m2),
            kappa_monomial(&[2, -2, 1, -1], m3),
            kappa_monomial(&[-1, 1, 2, -2], m4),
            vertex_at(&m4.transpose(), m1, &e, &[1, -1, 0, 0]),
            vertex_at(&m1.transpose(), m2, &e, &[0, 0, 1, -1]),
            vertex_at(&m2.transpose(), m3, &e, &[-1, 1, 0, 0]),
            vertex_at(&m3.transpose(), m4, &e, &[0, 0, -1, 1]),
        ];
        f.iter().fold(LocalizedElem::one(4), |acc, x| &acc * x)
    })
}

// ---------------------------------------------------------------------------
// Globally anti-diagonal fivefolds Tot_X(L + L^*)

#[derive(Clone, Debug)]
pub struct ThreefoldVertex {
    pub id: String,
    /// Half-edge names and weights in the cyclic order of the moment-map embedding.
    pub halfedges: [(String, Weight); 3],
    /// `eps_v`, the weight of the fibre of `L` at this vertex.
    pub line: Weight,
}

#[derive(Clone, Debug)]
pub struct ThreefoldEdge {
    pub halves: [String; 2],
    pub class: Vec<u32>,
    /// Twist of the normal bundle: `N = O(-1+f1) + O(-1-f1)`.
    pub f1: i64,
    /// Degree of `L` on the edge.
    pub f2: i64,
}

#[derive(Clone, Debug)]
pub struct ThreefoldDiagram {
    pub name: String,
    pub m: usize,
    pub grading: Vec<u32>,
    pub vertices: Vec<ThreefoldVertex>,
    pub edges: Vec<ThreefoldEdge>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BundleError {
    #[error("unknown half-edge {0}")]
    UnknownHalfEdge(String),
    #[error("edge {edge}: successor weights violate eps_s(h) = -eps_s(h') + f1 eps_h")]
    NormalBundle { edge: usize },
    #[error("edge {edge}: fibre weights violate eps_v = eps_v' + f2 eps_h")]
    LineBundle { edge: usize },
    #[error("edge {edge}: weights of the two half-edges are not opposite")]
    NotOpposite { edge: usize },
}

struct Located<'a> {
    vertex: &'a ThreefoldVertex,
    slot: usize,
}

impl ThreefoldDiagram {
    fn locate(&self, name: &str) -> Result<Located<'_>, BundleError> {
        for v in &self.vertices {
            if let Some(slot) = v.halfedges.iter().position(|(n, _)| n == name) {
                return Ok(Located { vertex: v, slot });
            }
        }
        Err(BundleError::UnknownHalfEdge(name.into()))
    }

    /// Checks the weight relations imposed by the splitting of `N + L + L^*` on each edge.
    pub fn check_bundle_data(&self) -> Result<(), BundleError> {
        let lin = |a: &[i64], s: i64, b: &[i64], f: i64, c: &[i64]| -> bool {
            (0..a.len()).all(|k| a[k] == s * b[k] + f * c[k])
        };
        for (i, e) in self.edges.iter().enumerate() {
            let h = self.locate(&e.halves[0])?;
            let h2 = self.locate(&e.halves[1])?;
            let eh = &h.vertex.halfedges[h.slot].1;
            let eh2 = &h2.vertex.halfedges[h2.slot].1;
            if eh.iter().zip(eh2).any(|(a, b)| a + b != 0) {
                return Err(BundleError::NotOpposite { edge: i });
            }
            let s = &h.vertex.halfedges[(h.slot + 1) % 3].1;
            let s2 = &h2.vertex.halfedges[(h2.slot + 1) % 3].1;
            if !lin(s, -1, s2, e.f1, eh) {
                return Err(BundleError::NormalBundle { edge: i });
            }
            if !lin(&h.vertex.line, 1, &h2.vertex.line, e.f2, eh) {
                return Err(BundleError::LineBundle { edge: i });
            }
        }
        Ok(())
    }
}

/// `Tot_X(L + L^*)` with `L` as distinct direction and the given cyclic orders.
pub fn globally_antidiagonal(x: &ThreefoldDiagram) -> Result<ExampleSpec, BundleError> {
    x.check_bundle_data()?;
    let mut d = Draft::new(&x.name, x.m, x.grading.clone());
    d.note("fivefold Tot_X(L + L^*): leaves L and Ld carry +-eps_v");
    for v in &x.vertices {
        let neg: Weight = v.line.iter().map(|a| -a).collect();
        let [(a, wa), (b, wb), (c, wc)] = &v.halfedges;
        d.vertex(&v.id, [(a, wa.clone()), (b, wb.clone()), (c, wc.clone()), ("L", v.line.clone()), ("Ld", neg)]);
        d.frame(&v.id, "L", "Ld", [a, b, c]);
    }
    let qualified = |name: &str| -> Result<String, BundleError> { Ok(format!("{}:{}", x.locate(name)?.vertex.id, name)) };
    for e in &x.edges {
        d.edge(&qualified(&e.halves[0])?, &qualified(&e.halves[1])?, e.class.clone());
    }
    let x2 = x.clone();
    let oracle = Oracle::Disconnected(Box::new(move |cutoff| globally_antidiagonal_formula(&x2, cutoff)));
    Ok(ExampleSpec::new(d.finish(), oracle, OracleStatus::Proven))
}

/// The closed vertex formula for `Tot_X(L + L^*)`: per edge the sign
/// `(-1)^{(f1+f2+1)|mu|}` and `(q_v^{f1} q_{sigma(h)}^{f2} q_h^{-f1 f2})^{kappa(mu)/2}`,
/// transposed partitions on the far half-edge, and `W(q_v)` at every vertex.
pub fn globally_antidiagonal_formula(x: &ThreefoldDiagram, cutoff: u32) -> GradedSeries {
    let classes: Vec<Vec<u32>> = x.edges.iter().map(|e| e.class.clone()).collect();
    let m = x.m;
    let ends: Vec<(Located<'_>, Located<'_>)> = x
        .edges
        .iter()
        .map(|e| (x.locate(&e.halves[0]).expect("checked"), x.locate(&e.halves[1]).expect("checked")))
        .collect();
    hand_sum(m, &Grading(x.grading.clone()), &classes, cutoff, |mus| {
        let mut acc = LocalizedElem::one(m);
        let mut labels: BTreeMap<(&str, usize), Partition> = BTreeMap::new();
        for ((e, (h, h2)), mu) in x.edges.iter().zip(&ends).zip(mus) {
            labels.insert((&h.vertex.id, h.slot), mu.clone());
            labels.insert((&h2.vertex.id, h2.slot), mu.transpose());
            let eh = &h.vertex.halfedges[h.slot].1;
            let s = &h.vertex.halfedges[(h.slot + 1) % 3].1;
            let c: Vec<i64> = (0..m).map(|k| e.f1 * h.vertex.line[k] + e.f2 * s[k] - e.f1 * e.f2 * eh[k]).collect();
            let sg = if (e.f1 + e.f2 + 1).rem_euclid(2) == 1 { sign(mu.size()) } else { 1 };
            acc = &(&acc * &kappa_monomial(&c, mu)) * &LocalizedElem::from_int(m, sg);
        }
        let empty = Partition::empty();
        for v in &x.vertices {
            let l = |slot: usize| labels.get(&(v.id.as_str(), slot)).unwrap_or(&empty);
            acc = &acc * &vertex_at(l(0), l(1), l(2), &v.line);
        }
        acc
    })
}

/// The threefold datum that yields the case-(A) diagram: `Tot O(-2) x C` with trivial `L`.
pub fn a1c3_threefold() -> ThreefoldDiagram {
    let hv = |n: &str, w: [i64; 3]| (n.to_string(), w.to_vec());
    ThreefoldDiagram {
        name: "a1c3-A-global".into(),
        m: 3,
        grading: vec![1],
        vertices: vec![
            ThreefoldVertex { id: "0".into(), halfedges: [hv("e", [1, 0, 0]), hv("c", [0, 1, 0]), hv("b", [-1, -1, 0])], line: vec![0, 0, 1] },
            ThreefoldVertex {
                id: "inf".into(),
                halfedges: [hv("c'", [0, 1, 0]), hv("e'", [-1, 0, 0]), hv("b'", [1, -1, 0])],
                line: vec![0, 0, 1],
            },
        ],
        edges: vec![ThreefoldEdge { halves: ["e".into(), "e'".into()], class: vec![1], f1: 1, f2: 0 }],
    }
}

/// Relabelling-invariant fingerprint: per vertex the distinct and pair weights,
/// the cyclic triple of weights up to rotation, and edges by weight and class.
pub fn diagram_signature(d: &TorusDiagram, f: &Framing) -> Vec<String> {
    let mut out = Vec::new();
    for fr in &f.frames {
        let cyc: Vec<&[i64]> = fr.cyclic.iter().map(|&h| d.weight(h)).collect();
        let rot = (0..3).map(|r| format!("{:?}", [cyc[r], cyc[(r + 1) % 3], cyc[(r + 2) % 3]])).min().expect("three rotations");
        out.push(format!("v:{:?}/{:?}/{rot}", d.weight(fr.distinct), d.weight(fr.pair)));
    }
    for e in &d.edges {
        let mut w = [format!("{:?}", d.weight(e.halves[0])), format!("{:?}", d.weight(e.halves[1]))];
        w.sort();
        out.push(format!("e:{}-{}:{:?}", w[0], w[1], e.class));
    }
    out.sort();
    out
}
