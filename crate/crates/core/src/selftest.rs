//! The acceptance criteria as runnable checks, shared by the integration
//! test suite and `qv selftest`.

use std::collections::BTreeMap;
use std::fmt;
use std::time::{Duration, Instant};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::evaluator::{membrane_indices, plog_expanded, qnumber_expand, report_json, EvalError, Evaluator, IndexReport};
use crate::examples::{by_name, conifold_conjecture, p2_indices_doubled, p3_tables, ExampleSpec, Oracle, P3_X, P3_Y};
use crate::partitions::{mn_character, partitions_of, Partition};
use crate::ring::{int, monomial_value, ratio, Coeff, DenomFactor, HalfExponent, LaurentPoly, LocalizedElem, VarNames};
use crate::schur::{pexp_check_cauchy, schur_spec, topological_vertex};
use crate::series::{GradedSeries, Grading};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tier {
    /// Small cutoffs: local P^2 to degree 3, local P^3 to degree 4.
    Quick,
    /// Adds local P^2 degree 4 and local P^3 degrees 5 and 6.
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// A conjectural oracle disagrees; fatal only with strict oracles.
    Warn,
}

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub criterion: u8,
    pub title: &'static str,
    pub verdict: Verdict,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Option<Duration>,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Warn => "WARN",
        };
        let time = match self.budget {
            Some(b) => format!("{:.2} s, budget {} s", self.elapsed.as_secs_f64(), b.as_secs()),
            None => format!("{:.2} s", self.elapsed.as_secs_f64()),
        };
        write!(f, "[{tag}] {}. {} ({time}): {}", self.criterion, self.title, self.detail)
    }
}

pub const CRITERIA: [u8; 8] = [1, 2, 3, 4, 5, 6, 7, 8];

/// Runs every criterion; conjectural mismatches fail only with `strict_oracles`.
pub fn run_all(tier: Tier, strict_oracles: bool) -> Vec<CheckResult> {
    CRITERIA.iter().map(|&n| run(n, tier, strict_oracles)).collect()
}

pub fn run(criterion: u8, tier: Tier, strict_oracles: bool) -> CheckResult {
    let start = Instant::now();
    let (title, budget, outcome) = match criterion {
        1 => ("A1xC3 closed forms", Some(10), closed_forms()),
        2 => ("strip formula", Some(60), strips()),
        3 => ("local P2 membrane indices", Some(if tier == Tier::Full { 1800 } else { 120 }), local_p2(tier)),
        4 => ("local P3 index tables", None, local_p3(tier)),
        5 => ("integrality", None, integrality(tier)),
        6 => ("property suites", Some(120), properties()),
        7 => ("conjectural conifold x A1 regression", None, conifold(strict_oracles)),
        8 => ("determinism across thread counts", None, determinism(tier)),
        _ => ("unknown criterion", None, Err(format!("no criterion {criterion}"))),
    };
    let elapsed = start.elapsed();
    let budget = budget.map(Duration::from_secs);
    let (mut verdict, mut detail) = match outcome {
        Ok(Outcome::Pass(d)) => (Verdict::Pass, d),
        Ok(Outcome::Warn(d)) => (Verdict::Warn, d),
        Err(d) => (Verdict::Fail, d),
    };
    if let Some(b) = budget {
        if elapsed > b && verdict == Verdict::Pass {
            verdict = Verdict::Fail;
            detail = format!("{detail}; exceeded the runtime budget");
        }
    }
    CheckResult { criterion, title, verdict, detail, elapsed, budget }
}

enum Outcome {
    Pass(String),
    Warn(String),
}

type Check = Result<Outcome, String>;

fn spec(name: &str) -> Result<ExampleSpec, String> {
    by_name(name).ok_or_else(|| format!("unknown example {name}"))
}

fn err(name: &str) -> impl Fn(EvalError) -> String + '_ {
    move |e| format!("{name}: {e}")
}

fn disconnected(s: &ExampleSpec, cutoff: u32) -> Result<GradedSeries, String> {
    let ev = Evaluator::new(&s.diagram, &s.framing, s.mode).map_err(err(&s.name))?;
    ev.disconnected_series(cutoff).map_err(err(&s.name))
}

fn indices(s: &ExampleSpec, cutoff: u32) -> Result<IndexReport, String> {
    let ev = Evaluator::new(&s.diagram, &s.framing, s.mode).map_err(err(&s.name))?;
    membrane_indices(&ev, cutoff, s.q_signs.as_deref()).map_err(err(&s.name))
}

/// Evaluator output against the example's closed-form series.
fn against_oracle(name: &str, cutoff: u32) -> Result<(), String> {
    let s = spec(name)?;
    let Oracle::Disconnected(f) = &s.oracle else { return Err(format!("{name} has no series oracle")) };
    let got = disconnected(&s, cutoff)?;
    let want = f(cutoff);
    match got.first_mismatch(&want) {
        None => Ok(()),
        Some(d) => Err(mismatch(name, &d, &got.get(&d), &want.get(&d))),
    }
}

fn mismatch(name: &str, d: &[u32], got: &LocalizedElem, want: &LocalizedElem) -> String {
    let names = VarNames::default_for(got.nvars());
    format!("{name} differs at degree {d:?}: computed {}, expected {}", got.pretty(&names), want.pretty(&names))
}

fn closed_forms() -> Check {
    against_oracle("a1c3-A", 4)?;
    against_oracle("a1c3-B", 4)?;
    Ok(Outcome::Pass("cases A and B equal their plethystic exponentials exactly through Q^4".into()))
}

fn strips() -> Check {
    for name in ["strip-ud", "strip-uud", "strip-udu"] {
        against_oracle(name, 3)?;
    }
    Ok(Outcome::Pass("patterns ud, uud, udu equal the closed form exactly to total degree 3".into()))
}

fn p2_max(tier: Tier) -> u32 {
    if tier == Tier::Full {
        4
    } else {
        3
    }
}

fn p3_max(tier: Tier) -> u32 {
    if tier == Tier::Full {
        6
    } else {
        4
    }
}

fn local_p2(tier: Tier) -> Check {
    let top = p2_max(tier);
    let s = spec("local-p2")?;
    let r = indices(&s, top)?;
    let expected = p2_indices_doubled();
    for d in 1..=top {
        let got = r.omega.get(&[d]).adams(2);
        if got != expected[&d] {
            return Err(mismatch("Psi_2 Omega of local-p2", &[d], &got, &expected[&d]));
        }
    }
    Ok(Outcome::Pass(format!("Psi_2(Omega_d) equals the displayed expression exactly for d = 1..{top}")))
}

/// Degrees whose q-number table differs from the reference, for a given sign convention.
fn p3_table_mismatches(s: &ExampleSpec, series: &GradedSeries, signs: Option<&[i64]>, top: u32) -> Result<Vec<u32>, String> {
    let report = crate::evaluator::indices_from_series(series.clone(), signs).map_err(err(&s.name))?;
    let tables = p3_tables();
    let mut bad = Vec::new();
    for d in 1..=top {
        match qnumber_expand(&report.omega.get(&[d]), &P3_X, &P3_Y) {
            Ok(t) if t == tables[&d] => {}
            _ => bad.push(d),
        }
    }
    Ok(bad)
}

fn local_p3(tier: Tier) -> Check {
    let top = p3_max(tier);
    let s = spec("local-p3")?;
    let series = disconnected(&s, top)?;
    let bad = p3_table_mismatches(&s, &series, s.q_signs.as_deref(), top)?;
    if !bad.is_empty() {
        return Err(format!("tables differ at d = {bad:?}"));
    }
    let untwisted = p3_table_mismatches(&s, &series, None, top)?;
    Ok(Outcome::Pass(format!(
        "N_{{2;1,1}} = 2, N_{{3;4,4}} = -2 and every cell of the d = 4..{top} tables match, no other nonzero N; \
         convention Q -> -Q before PLog (without it, the tables at d = {untwisted:?} do not match)"
    )))
}

fn integrality(tier: Tier) -> Check {
    let runs = [
        ("a1c3-A", 4),
        ("a1c3-B", 4),
        ("strip-ud", 3),
        ("strip-uud", 3),
        ("strip-udu", 3),
        ("local-p2", p2_max(tier)),
        ("local-p3", p3_max(tier).max(5)),
    ];
    let mut count = 0;
    for (name, cutoff) in runs {
        let s = spec(name)?;
        let r = indices(&s, cutoff)?;
        for (d, rep) in &r.integrality {
            if !rep.in_r_integer {
                return Err(format!("{name}: Omega at {d:?} is not integral"));
            }
            count += 1;
        }
        if name == "local-p3" {
            for d in 1..=5 {
                qnumber_expand(&r.omega.get(&[d]), &P3_X, &P3_Y)
                    .map_err(|e| format!("local-p3 d = {d} is not a polynomial in q-numbers: {e}"))?;
            }
        }
    }
    Ok(Outcome::Pass(format!(
        "all {count} indices lie in the integral ring; local P3 indices for d <= 5 expand in q-numbers (conjecture-consistent)"
    )))
}

fn ensure(cond: bool, what: &str) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.to_string())
    }
}

fn properties() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    // Topological vertex cyclic symmetry.
    for n in 0..=5u32 {
        for a in 0..=n {
            for b in 0..=n - a {
                for x in partitions_of(a) {
                    for y in partitions_of(b) {
                        for z in partitions_of(n - a - b) {
                            let w = topological_vertex(&x, &y, &z);
                            ensure(w == topological_vertex(&y, &z, &x), &format!("vertex cyclic symmetry at ({x},{y},{z})"))?;
                        }
                    }
                }
            }
        }
    }
    // kappa antisymmetry and q^{-kappa/2} s_mu(q^rho) = s_{mu^t}(q^rho) = (-1)^{|mu|} s_mu(q^{-rho}).
    for n in 0..=5 {
        for mu in partitions_of(n) {
            ensure(mu.transpose().kappa() == -mu.kappa(), "kappa antisymmetry")?;
            let shift = LocalizedElem::monomial(HalfExponent::from_slice(&[-(mu.kappa() as i32)]), int(1));
            let lhs = &shift * &schur_spec(&mu);
            ensure(lhs == schur_spec(&mu.transpose()), &format!("kappa shift at {mu}"))?;
            let inverted = schur_spec(&mu).map_exponents(1, |e| -e).map_err(|e| e.to_string())?;
            let sign = if n % 2 == 0 { 1 } else { -1 };
            ensure(lhs == inverted.scale(&int(sign)), &format!("q -> 1/q form at {mu}"))?;
        }
    }
    // Both orthogonality relations.
    for n in 0..=6 {
        let parts = partitions_of(n);
        let chi = |l: &Partition, nu: &Partition| mn_character(l, nu).map_err(|e| e.to_string());
        for a in &parts {
            for b in &parts {
                let mut rows = Coeff::zero();
                let mut cols = 0i64;
                for c in &parts {
                    rows += Coeff::new((chi(a, c)? * chi(b, c)?).into(), c.z_aut().into());
                    cols += chi(c, a)? * chi(c, b)?;
                }
                let delta = a == b;
                ensure(rows == if delta { Coeff::one() } else { Coeff::zero() }, "row orthogonality")?;
                ensure(cols as u128 == if delta { a.z_aut() } else { 0 }, "column orthogonality")?;
            }
        }
    }
    // Skew Cauchy identities.
    let e = Partition::empty();
    let one = Partition::from_unsorted(vec![1]);
    for (a, b) in [(&e, &e), (&one, &e), (&e, &one), (&one, &one)] {
        ensure(pexp_check_cauchy(a, b, 3), &format!("Cauchy identities for ({a},{b})"))?;
    }
    // PLog o PExp = id and plog = plog_expanded, on random series and every example.
    for _ in 0..4 {
        let g = Grading(vec![1, 1]);
        let mut f = GradedSeries::zero(2, g.clone(), 3);
        for d in g.degrees_up_to(3) {
            if d.iter().any(|&x| x > 0) {
                f.set(d, random_elem(&mut rng));
            }
        }
        let p = f.pexp();
        ensure(p.plog().map_err(|e| e.to_string())?.equals(&f), "PLog(PExp(F)) = F")?;
        check_plog_expanded(&p, "random series")?;
    }
    for name in crate::examples::BUILTIN {
        let s = spec(name)?;
        let mut g = disconnected(&s, 3)?;
        if let Some(signs) = &s.q_signs {
            g = g.flip_q_signs(signs);
        }
        check_plog_expanded(&g, name)?;
    }
    // Adams homomorphism and canonicalization value preservation.
    let mut checked = 0;
    for _ in 0..40 {
        let (a, b) = (random_elem(&mut rng), random_elem(&mut rng));
        for k in 1..=3 {
            ensure((&a * &b).adams(k) == &a.adams(k) * &b.adams(k), "Adams multiplicative")?;
            ensure((&a + &b).adams(k) == &a.adams(k) + &b.adams(k), "Adams additive")?;
        }
        let (num, den) = random_raw(&mut rng);
        let c = LocalizedElem::new(num.clone(), den.clone());
        let mut points = 0;
        while points < 20 {
            let pt: Vec<Coeff> = (0..2).map(|_| random_point_coord(&mut rng)).collect();
            let mut d = Coeff::one();
            for f in &den {
                let base = Coeff::one() - monomial_value(&f.character, &pt);
                for _ in 0..f.multiplicity {
                    d *= &base;
                }
            }
            if d.is_zero() {
                continue;
            }
            ensure(c.eval_rational(&pt).map_err(|e| e.to_string())? == num.eval(&pt) / d, "canonicalize preserves value")?;
            points += 1;
        }
        checked += 1;
    }
    Ok(Outcome::Pass(format!(
        "vertex cyclic symmetry, kappa identities (|mu| <= 5), orthogonality (n <= 6), Cauchy (cutoff 3), \
         PLog/PExp and expanded PLog (cutoff 3), Adams and canonicalization on {checked} random elements x 20 points"
    )))
}

fn check_plog_expanded(g: &GradedSeries, what: &str) -> Result<(), String> {
    let omega = g.plog().map_err(|e| e.to_string())?;
    for (d, c) in omega.iter() {
        if d.iter().any(|&x| x > 0) && plog_expanded(g, d) != *c {
            return Err(format!("{what}: plog and plog_expanded differ at {d:?}"));
        }
    }
    Ok(())
}

fn random_point_coord(rng: &mut ChaCha8Rng) -> Coeff {
    let n: i64 = rng.gen_range(1..=9);
    let d: i64 = rng.gen_range(1..=7);
    ratio(if rng.gen_bool(0.5) { n } else { -n }, d)
}

fn random_raw(rng: &mut ChaCha8Rng) -> (LaurentPoly, Vec<DenomFactor>) {
    let chars: [[i32; 2]; 5] = [[2, 0], [0, 2], [2, -2], [-2, 0], [1, 1]];
    let terms: Vec<(HalfExponent, Coeff)> = (0..rng.gen_range(1..4))
        .map(|_| (HalfExponent::from_slice(&[rng.gen_range(-3..=3), rng.gen_range(-3..=3)]), int(rng.gen_range(-4..=4))))
        .collect();
    let den = (0..rng.gen_range(0..3))
        .map(|_| DenomFactor {
            character: HalfExponent::from_slice(&chars[rng.gen_range(0..chars.len())]),
            multiplicity: rng.gen_range(1..=2),
        })
        .collect();
    (LaurentPoly::from_terms(2, terms), den)
}

fn random_elem(rng: &mut ChaCha8Rng) -> LocalizedElem {
    let (num, den) = random_raw(rng);
    LocalizedElem::new(num, den)
}

fn conifold(strict_oracles: bool) -> Check {
    let s = spec("conifold-a1")?;
    let got = disconnected(&s, 3)?;
    let want = conifold_conjecture(3);
    match got.first_mismatch(&want) {
        None => Ok(Outcome::Pass("matches the conjectured product to total degree 3 (regression datum)".into())),
        Some(d) => {
            let diff = &got.get(&d) - &want.get(&d);
            let msg = format!("{}; difference {}", mismatch("conifold-a1", &d, &got.get(&d), &want.get(&d)), diff);
            if strict_oracles {
                Err(msg)
            } else {
                Ok(Outcome::Warn(msg))
            }
        }
    }
}

/// JSON reports of the examples behind criteria 1-4.
pub fn criteria_reports(tier: Tier) -> Result<BTreeMap<String, String>, String> {
    let runs = [
        ("a1c3-A", 4),
        ("a1c3-B", 4),
        ("strip-ud", 3),
        ("strip-uud", 3),
        ("strip-udu", 3),
        ("local-p2", p2_max(tier)),
        ("local-p3", p3_max(tier)),
    ];
    let mut out = BTreeMap::new();
    for (name, cutoff) in runs {
        let s = spec(name)?;
        let ev = Evaluator::new(&s.diagram, &s.framing, s.mode).map_err(err(name))?;
        let r = membrane_indices(&ev, cutoff, s.q_signs.as_deref()).map_err(err(name))?;
        let q = (name == "local-p3").then_some((&P3_X[..], &P3_Y[..]));
        let outputs = ["series", "connected", "indices", "qnumber-table"];
        out.insert(name.to_string(), report_json(&ev, &r, cutoff, &outputs, q).to_string());
    }
    Ok(out)
}

fn determinism(tier: Tier) -> Check {
    let mut reference: Option<BTreeMap<String, String>> = None;
    for threads in [1, 4, 8] {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| e.to_string())?;
        let reports = pool.install(|| criteria_reports(tier))?;
        match &reference {
            None => reference = Some(reports),
            Some(r) => {
                for (name, text) in r {
                    if reports.get(name) != Some(text) {
                        return Err(format!("{name}: output at {threads} threads differs from 1 thread"));
                    }
                }
            }
        }
    }
    let n = reference.map(|r| r.len()).unwrap_or(0);
    Ok(Outcome::Pass(format!("{n} JSON reports byte-identical at 1, 4 and 8 worker threads")))
}
