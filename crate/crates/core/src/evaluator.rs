//! The graph sum: partition labels, edge and vertex weights, disconnected
//! series, and membrane indices via the plethystic logarithm.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::collections::{BTreeMap, HashMap};
use std::sync::RwLock;
use thiserror::Error;

use crate::diagram::{
    antidiagonal_edges, edge_linear_form, parities, DiagramError, EdgeId, Framing, HalfEdgeId, Parity,
    SkeletalDegree, TorusDiagram, VertexId,
};
use crate::partitions::{partitions_of, Partition};
use crate::ring::{int, Coeff, HalfExponent, IntegralityReport, LaurentPoly, LocalizedElem, RingError};
use crate::schur::{substitute_character, topological_vertex, SchurError};
use crate::series::{mobius, Degree, GradedSeries, SeriesError};

/// Terms per partial sum; fixed so results do not depend on the thread count.
const CHUNK: usize = 32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error("skeletal degree {degree:?} has positive degree on anti-diagonal edge {edge} ({halves}); strict mode requires support away from anti-diagonal strata")]
    UnsupportedDegree { edge: usize, halves: String, degree: Vec<u32> },
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Schur(#[from] SchurError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("q-number expansion: {0}")]
    QNumber(#[from] QNumberError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QNumberError {
    #[error("not a Laurent polynomial: a denominator survives")]
    NotLaurent,
    #[error("not inversion-symmetric")]
    NotSymmetric,
    #[error("monomial is not a product of powers of the two characters")]
    OutsideSpan,
    #[error("non-integer coefficient")]
    NonInteger,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Strict,
    AssumeVanishing,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Strict => "strict",
            Mode::AssumeVanishing => "assume-vanishing",
        }
    }
}

/// One partition per half-edge.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PartitionLabel(pub Vec<Partition>);

impl PartitionLabel {
    pub fn get(&self, h: HalfEdgeId) -> &Partition {
        &self.0[h.0]
    }
}

#[derive(Clone, Debug)]
struct EdgeData {
    parity: Parity,
    /// `2L`, so that the half-exponent of `q^{kappa L / 2}` is `(kappa / 2)(2L)`.
    twice_form: Vec<i32>,
}

type VertexKey = (usize, [Partition; 3]);

/// A diagram with framing, prepared for evaluation.
pub struct Evaluator<'a> {
    pub diagram: &'a TorusDiagram,
    pub framing: &'a Framing,
    pub mode: Mode,
    edges: Vec<Option<EdgeData>>,
    antidiagonal: Vec<bool>,
    vertex_memo: RwLock<HashMap<VertexKey, LocalizedElem>>,
}

impl<'a> Evaluator<'a> {
    pub fn new(diagram: &'a TorusDiagram, framing: &'a Framing, mode: Mode) -> Result<Self, EvalError> {
        let anti = antidiagonal_edges(diagram, framing);
        let mut edges = Vec::new();
        for i in 0..diagram.edges.len() {
            let e = EdgeId(i);
            if anti.contains(&e) {
                edges.push(None);
                continue;
            }
            let parity = parities(diagram, framing, e)?;
            let form = edge_linear_form(diagram, framing, e, parity.p)?;
            let mut twice_form = Vec::with_capacity(form.len());
            for x in form {
                let t = x * 2;
                if !t.is_integer() {
                    return Err(DiagramError::NonDivisibleQuadratic { edge: i }.into());
                }
                twice_form.push(t.to_integer() as i32);
            }
            edges.push(Some(EdgeData { parity, twice_form }));
        }
        let antidiagonal = (0..diagram.edges.len()).map(|i| anti.contains(&EdgeId(i))).collect();
        Ok(Evaluator { diagram, framing, mode, edges, antidiagonal, vertex_memo: RwLock::new(HashMap::new()) })
    }

    pub fn m(&self) -> usize {
        self.diagram.m
    }

    pub fn edge_parity(&self, e: EdgeId) -> Option<Parity> {
        self.edges[e.0].as_ref().map(|x| x.parity)
    }

    /// The edge's linear form `L` in half-units (`2L`).
    pub fn edge_form(&self, e: EdgeId) -> Option<&[i32]> {
        self.edges[e.0].as_ref().map(|x| x.twice_form.as_slice())
    }

    /// Checks the support condition; `Ok(false)` means the degree is skipped.
    pub fn admits(&self, d: &SkeletalDegree) -> Result<bool, EvalError> {
        for (i, &k) in d.0.iter().enumerate() {
            if k > 0 && self.antidiagonal[i] {
                return match self.mode {
                    Mode::AssumeVanishing => Ok(false),
                    Mode::Strict => {
                        let [a, b] = self.diagram.edges[i].halves;
                        Err(EvalError::UnsupportedDegree {
                            edge: i,
                            halves: format!(
                                "{}-{}",
                                self.diagram.half_edges[a.0].name, self.diagram.half_edges[b.0].name
                            ),
                            degree: d.0.clone(),
                        })
                    }
                };
            }
        }
        Ok(true)
    }

    /// All labels in `P_{Gamma,p,d}`, in lexicographic order of the edge partitions.
    pub fn enumerate_labels(&self, d: &SkeletalDegree) -> Result<Vec<PartitionLabel>, EvalError> {
        if !self.admits(d)? {
            return Ok(Vec::new());
        }
        let choices: Vec<Vec<Partition>> = d.0.iter().map(|&k| partitions_of(k)).collect();
        let mut out = Vec::new();
        let mut idx = vec![0usize; choices.len()];
        loop {
            let mut label = vec![Partition::empty(); self.diagram.half_edges.len()];
            for (i, e) in self.diagram.edges.iter().enumerate() {
                let mu = &choices[i][idx[i]];
                if mu.is_empty() {
                    continue;
                }
                let parity = self.edges[i].as_ref().expect("supported edge").parity;
                label[e.halves[0].0] = mu.clone();
                label[e.halves[1].0] = if parity.p == 0 { mu.clone() } else { mu.transpose() };
            }
            out.push(PartitionLabel(label));
            let mut k = choices.len();
            loop {
                if k == 0 {
                    return Ok(out);
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < choices[k].len() {
                    break;
                }
                idx[k] = 0;
            }
        }
    }

    /// `E(e, mu) = (-1)^{(f+p)|mu_h|} q^{kappa(mu_h) L / 2}`.
    pub fn edge_weight(&self, e: EdgeId, label: &PartitionLabel) -> LocalizedElem {
        let (sign, exp) = self.edge_factor(e, label);
        LocalizedElem::monomial(exp, int(sign))
    }

    fn edge_factor(&self, e: EdgeId, label: &PartitionLabel) -> (i64, HalfExponent) {
        let mu = label.get(self.diagram.edges[e.0].halves[0]);
        let m = self.m();
        if mu.is_empty() {
            return (1, HalfExponent::zero(m));
        }
        let data = self.edges[e.0].as_ref().expect("labelled edge is supported");
        let odd = ((data.parity.f + data.parity.p) as u32 * mu.size()) % 2 == 1;
        let half_kappa = (mu.kappa() / 2) as i32;
        let exp = HalfExponent::from(data.twice_form.iter().map(|x| x * half_kappa).collect::<Vec<_>>());
        (if odd { -1 } else { 1 }, exp)
    }

    /// `W_{mu_{h1}, mu_{h2}, mu_{h3}}(e^{eps_v})` for the cyclic order `(h1 h2 h3)` at `v`.
    pub fn vertex_weight(&self, v: VertexId, label: &PartitionLabel) -> Result<LocalizedElem, EvalError> {
        let fr = &self.framing.frames[v.0];
        let key: VertexKey = (v.0, fr.cyclic.map(|h| label.get(h).clone()));
        if let Some(w) = self.vertex_memo.read().unwrap().get(&key) {
            return Ok(w.clone());
        }
        let [a, b, c] = &key.1;
        let w = substitute_character(&topological_vertex(a, b, c), self.framing.distinct_weight(self.diagram, v))?;
        self.vertex_memo.write().unwrap().insert(key, w.clone());
        Ok(w)
    }

    /// `prod_e E(e, mu) prod_v W(v, mu)` without final cancellation.
    pub fn term(&self, label: &PartitionLabel) -> Result<LocalizedElem, EvalError> {
        let m = self.m();
        let mut sign = 1;
        let mut exp = HalfExponent::zero(m);
        for i in 0..self.diagram.edges.len() {
            let (s, x) = self.edge_factor(EdgeId(i), label);
            sign *= s;
            exp = &exp + &x;
        }
        let mut acc = LocalizedElem::monomial(exp, int(sign));
        for v in 0..self.diagram.vertices.len() {
            let w = self.vertex_weight(VertexId(v), label)?;
            acc = acc.mul_uncancelled(&w);
        }
        Ok(acc)
    }

    /// Deterministic chunked parallel sum of the terms of `labels`.
    fn sum_labels(&self, labels: &[PartitionLabel]) -> Result<LocalizedElem, EvalError> {
        let m = self.m();
        let partials: Vec<LocalizedElem> = labels
            .par_chunks(CHUNK)
            .map(|chunk| {
                let terms = chunk.iter().map(|l| self.term(l)).collect::<Result<Vec<_>, _>>()?;
                Ok(LocalizedElem::sum_all(m, terms.iter()))
            })
            .collect::<Result<Vec<_>, EvalError>>()?;
        Ok(LocalizedElem::sum_all(m, partials.iter()))
    }

    /// `GW_d^bullet = sum_{mu in P} prod_e E(e, mu) prod_v W(v, mu)`.
    pub fn disconnected_coefficient(&self, d: &SkeletalDegree) -> Result<LocalizedElem, EvalError> {
        let labels = self.enumerate_labels(d)?;
        self.sum_labels(&labels)
    }

    /// Labels contributing to the class `beta`, over all skeletal degrees of that class.
    pub fn labels_for_class(&self, beta: &[u32]) -> Result<Vec<PartitionLabel>, EvalError> {
        let mut labels = Vec::new();
        for d in self.diagram.degrees_for_class(beta) {
            labels.extend(self.enumerate_labels(&d)?);
        }
        Ok(labels)
    }

    /// Disconnected series to grading degree `cutoff`.
    pub fn disconnected_series(&self, cutoff: u32) -> Result<GradedSeries, EvalError> {
        let g = self.diagram.grading.clone();
        let mut out = GradedSeries::one(self.m(), g.clone(), cutoff);
        for beta in g.degrees_up_to(cutoff) {
            if beta.iter().all(|&x| x == 0) {
                continue;
            }
            let labels = self.labels_for_class(&beta)?;
            let c = self.sum_labels(&labels)?;
            out.set(beta, c);
        }
        Ok(out)
    }

    /// Compares every coefficient of `series` with a term-by-term evaluation at `count` random points.
    pub fn verify_at_points(&self, series: &GradedSeries, count: usize, seed: u64) -> Result<Vec<Degree>, EvalError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut bad = Vec::new();
        for beta in series.grading.degrees_up_to(series.cutoff) {
            if beta.iter().all(|&x| x == 0) {
                continue;
            }
            let labels = self.labels_for_class(&beta)?;
            let value = series.get(&beta);
            let mut checked = 0;
            let mut attempts = 0;
            while checked < count && attempts < 20 * count.max(1) {
                attempts += 1;
                let point: Vec<Coeff> = (0..self.m())
                    .map(|_| {
                        let n: i64 = rng.gen_range(2..40);
                        let d: i64 = rng.gen_range(1..17);
                        let s = if rng.gen_bool(0.5) { 1 } else { -1 };
                        Coeff::new((s * n).into(), d.into())
                    })
                    .collect();
                let Ok(expect) = value.eval_rational(&point) else { continue };
                let mut total = Coeff::zero();
                let mut pole = false;
                for l in &labels {
                    match self.term(l)?.eval_rational(&point) {
                        Ok(x) => total += x,
                        Err(_) => {
                            pole = true;
                            break;
                        }
                    }
                }
                if pole {
                    continue;
                }
                if total != expect {
                    bad.push(beta.clone());
                    break;
                }
                checked += 1;
            }
        }
        Ok(bad)
    }
}

/// Connected series and membrane indices together with integrality data.
#[derive(Clone, Debug)]
pub struct IndexReport {
    /// Signs `Q_i -> s_i Q_i` applied before taking logarithms, if any.
    pub q_signs: Option<Vec<i64>>,
    /// The evaluated series, before any sign substitution.
    pub disconnected: GradedSeries,
    pub connected: GradedSeries,
    pub omega: GradedSeries,
    pub integrality: BTreeMap<Degree, IntegralityReport>,
}

/// `Omega = PLog(GW^bullet)` with an integrality report per class.
pub fn membrane_indices(ev: &Evaluator<'_>, cutoff: u32, q_signs: Option<&[i64]>) -> Result<IndexReport, EvalError> {
    let disconnected = ev.disconnected_series(cutoff)?;
    indices_from_series(disconnected, q_signs)
}

/// Connected series and indices of `G(s_1 Q_1, ..., s_r Q_r)`.
pub fn indices_from_series(disconnected: GradedSeries, q_signs: Option<&[i64]>) -> Result<IndexReport, EvalError> {
    let signed = match q_signs {
        Some(s) => disconnected.flip_q_signs(s),
        None => disconnected.clone(),
    };
    let connected = signed.log()?;
    let omega = signed.plog()?;
    let integrality = omega.iter().map(|(d, c)| (d.clone(), c.integrality_report())).collect();
    Ok(IndexReport { q_signs: q_signs.map(<[i64]>::to_vec), disconnected, connected, omega, integrality })
}

/// Multiplicities `n` over `D(target)` with `sum n_delta delta = target`.
fn multiplicities(target: &[u32]) -> (Vec<Degree>, Vec<Vec<u32>>) {
    let mut deltas: Vec<Degree> = Vec::new();
    let mut cur = vec![0u32; target.len()];
    fn boxes(t: &[u32], i: usize, cur: &mut Vec<u32>, out: &mut Vec<Degree>) {
        if i == t.len() {
            if cur.iter().any(|&x| x > 0) {
                out.push(cur.clone());
            }
            return;
        }
        for k in 0..=t[i] {
            cur[i] = k;
            boxes(t, i + 1, cur, out);
        }
        cur[i] = 0;
    }
    boxes(target, 0, &mut cur, &mut deltas);
    let mut out = Vec::new();
    let mut n = vec![0u32; deltas.len()];
    fn fill(deltas: &[Degree], i: usize, rest: Vec<u32>, n: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rest.iter().all(|&x| x == 0) {
            out.push(n.clone());
            return;
        }
        if i == deltas.len() {
            return;
        }
        let max = deltas[i].iter().zip(&rest).filter(|(d, _)| **d > 0).map(|(d, r)| r / d).min().unwrap_or(0);
        for k in (0..=max).rev() {
            n[i] = k;
            let next: Vec<u32> = rest.iter().zip(&deltas[i]).map(|(r, d)| r - k * d).collect();
            fill(deltas, i + 1, next, n, out);
        }
        n[i] = 0;
    }
    fill(&deltas, 0, target.to_vec(), &mut n, &mut out);
    (deltas, out)
}

fn factorial(n: u64) -> Coeff {
    (1..=n).fold(Coeff::one(), |acc, k| acc * int(k as i64))
}

fn gcd_all(v: &[u32]) -> u32 {
    v.iter().fold(0u32, |g, &x| num_integer::Integer::gcd(&g, &x))
}

/// The expanded Möbius/multinomial formula for the plethystic logarithm:
/// `Omega_d = -sum_{k | gcd d} sum_{n, gcd n = 1} 1/(k|n|) sum_{k'|k} mu(k/k')
///   (k'|n|)! / prod (k' n_delta)! ((-1)^{|n|} prod Psi_{k/k'}(G_delta^{n_delta}))^{k'}`.
pub fn plog_expanded(g: &GradedSeries, d: &[u32]) -> LocalizedElem {
    let m = g.nvars;
    let mut terms: Vec<LocalizedElem> = Vec::new();
    let gd = gcd_all(d);
    for k in (1..=gd).filter(|k| gd.is_multiple_of(*k)) {
        let target: Vec<u32> = d.iter().map(|x| x / k).collect();
        let (deltas, mults) = multiplicities(&target);
        for n in mults {
            if gcd_all(&n) != 1 {
                continue;
            }
            let size: u32 = n.iter().sum();
            for kp in (1..=k).filter(|kp| k % kp == 0) {
                let mu = mobius(k / kp);
                if mu == 0 {
                    continue;
                }
                let mut num = factorial((kp * size) as u64);
                for &ni in &n {
                    num /= factorial((kp * ni) as u64);
                }
                let mut prod = LocalizedElem::from_int(m, if size % 2 == 1 { -1 } else { 1 });
                for (delta, &ni) in deltas.iter().zip(&n) {
                    if ni == 0 {
                        continue;
                    }
                    prod = prod.mul_uncancelled(&g.get(delta).pow(ni).adams(k / kp));
                }
                let w = -(num * int(mu)) / int((k * size) as i64);
                terms.push(prod.pow(kp).scale(&w));
            }
        }
    }
    LocalizedElem::sum_all(m, terms.iter())
}

/// Expansion `e = sum N_{k1,k2} [k1]_x [k2]_y` in symmetrized q-numbers of two characters.
pub fn qnumber_expand(e: &LocalizedElem, x: &[i64], y: &[i64]) -> Result<BTreeMap<(u32, u32), i64>, QNumberError> {
    let e = e.canonicalize();
    if !e.is_laurent() {
        return Err(QNumberError::NotLaurent);
    }
    let mut rest: BTreeMap<(i64, i64), Coeff> = BTreeMap::new();
    for (exp, c) in e.numerator().terms() {
        let st = solve_span(exp.entries(), x, y).ok_or(QNumberError::OutsideSpan)?;
        rest.insert(st, c.clone());
    }
    for (&(s, t), c) in &rest {
        if rest.get(&(-s, t)) != Some(c) || rest.get(&(s, -t)) != Some(c) {
            return Err(QNumberError::NotSymmetric);
        }
    }
    let mut out = BTreeMap::new();
    while let Some((&(s, _), _)) = rest.iter().next_back() {
        let t = rest.keys().filter(|k| k.0 == s).map(|k| k.1).max().expect("nonempty slice");
        let c = rest[&(s, t)].clone();
        if !c.is_integer() {
            return Err(QNumberError::NonInteger);
        }
        if s < 0 || t < 0 {
            return Err(QNumberError::NotSymmetric);
        }
        let (k1, k2) = (s as u32 + 1, t as u32 + 1);
        for a in (0..k1).map(|j| s - 2 * j as i64) {
            for b in (0..k2).map(|j| t - 2 * j as i64) {
                let entry = rest.entry((a, b)).or_insert_with(Coeff::zero);
                *entry -= &c;
                if entry.is_zero() {
                    rest.remove(&(a, b));
                }
            }
        }
        out.insert((k1, k2), c.to_integer().try_into().map_err(|_| QNumberError::NonInteger)?);
    }
    Ok(out)
}

/// Integers `(s, t)` with half-exponent `e = s x + t y`.
fn solve_span(e: &[i32], x: &[i64], y: &[i64]) -> Option<(i64, i64)> {
    let n = e.len();
    for i in 0..n {
        for j in 0..n {
            let det = x[i] * y[j] - x[j] * y[i];
            if det == 0 {
                continue;
            }
            let (ei, ej) = (e[i] as i64, e[j] as i64);
            let sn = ei * y[j] - ej * y[i];
            let tn = x[i] * ej - x[j] * ei;
            if sn % det != 0 || tn % det != 0 {
                return None;
            }
            let (s, t) = (sn / det, tn / det);
            return (0..n).all(|k| e[k] as i64 == s * x[k] + t * y[k]).then_some((s, t));
        }
    }
    None
}

/// `sum N_{k1,k2} [k1]_x [k2]_y` rebuilt as a ring element.
pub fn qnumber_rebuild(table: &BTreeMap<(u32, u32), i64>, x: &[i64], y: &[i64]) -> LocalizedElem {
    let m = x.len();
    let mut terms = Vec::new();
    for (&(k1, k2), &n) in table {
        for a in (0..k1).map(|j| k1 as i64 - 1 - 2 * j as i64) {
            for b in (0..k2).map(|j| k2 as i64 - 1 - 2 * j as i64) {
                let e: Vec<i32> = (0..m).map(|i| (a * x[i] + b * y[i]) as i32).collect();
                terms.push((HalfExponent::from(e), int(n)));
            }
        }
    }
    LocalizedElem::from_poly(LaurentPoly::from_terms(m, terms))
}

/// JSON report: one entry per class with `Omega`, integrality flags, and optional tables.
pub fn report_json(
    ev: &Evaluator<'_>,
    report: &IndexReport,
    cutoff: u32,
    outputs: &[&str],
    qnumber: Option<(&[i64], &[i64])>,
) -> Value {
    let mut classes = Vec::new();
    for beta in report.omega.grading.degrees_up_to(cutoff) {
        if beta.iter().all(|&x| x == 0) {
            continue;
        }
        let mut entry = serde_json::Map::new();
        entry.insert("degree".into(), json!(beta));
        if outputs.contains(&"series") {
            entry.insert("disconnected".into(), report.disconnected.get(&beta).to_json());
        }
        if outputs.contains(&"connected") {
            entry.insert("connected".into(), report.connected.get(&beta).to_json());
        }
        if outputs.contains(&"indices") || outputs.contains(&"qnumber-table") {
            let omega = report.omega.get(&beta);
            let integ = omega.integrality_report();
            entry.insert("omega".into(), omega.to_json());
            entry.insert("integrality".into(), serde_json::to_value(integ).expect("plain struct"));
            if let (true, Some((x, y))) = (outputs.contains(&"qnumber-table"), qnumber) {
                let table = match qnumber_expand(&omega, x, y) {
                    Ok(t) => json!(t.iter().map(|(&(a, b), &n)| json!([a, b, n])).collect::<Vec<_>>()),
                    Err(e) => json!({ "error": e.to_string() }),
                };
                entry.insert("qnumbers".into(), table);
            }
        }
        classes.push(Value::Object(entry));
    }
    json!({
        "metadata": {
            "name": ev.diagram.name,
            "m": ev.m(),
            "mode": ev.mode.as_str(),
            "cutoff": cutoff,
            "grading": ev.diagram.grading.0,
            "framing_hash": ev.framing.hash_hex(ev.diagram),
            "q_signs": report.q_signs,
        },
        "classes": classes,
    })
}
