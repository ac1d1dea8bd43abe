use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qv_core::diagram::{load, EdgeId, HalfEdgeId, SkeletalDegree, VertexId};
use qv_core::evaluator::{
    indices_from_series, membrane_indices, plog_expanded, qnumber_expand, qnumber_rebuild, report_json, EvalError,
    Evaluator, Mode, PartitionLabel, QNumberError,
};
use qv_core::examples::{a1c3, by_name, local_p2, local_p3, A1C3Case, BUILTIN};
use qv_core::partitions::{partitions_of, Partition};
use qv_core::ring::{int, ratio, HalfExponent, LaurentPoly, LocalizedElem};
use qv_core::series::{GradedSeries, Grading};

fn half(name: &str, d: &qv_core::diagram::TorusDiagram) -> HalfEdgeId {
    HalfEdgeId(d.half_edges.iter().position(|h| h.name == name).unwrap())
}

fn mono(e: &[i32], c: i64) -> LaurentPoly {
    LaurentPoly::monomial(HalfExponent::from_slice(e), int(c))
}

/// `1 / (x^{1/2} - x^{-1/2})` for the character `x = q^c`.
fn inv_diff(c: &[i32]) -> LocalizedElem {
    let neg: Vec<i32> = c.iter().map(|x| -x).collect();
    LocalizedElem::from_poly(&mono(c, 1) - &mono(&neg, 1)).inverse().unwrap()
}

fn random_elem(rng: &mut ChaCha8Rng, m: usize) -> LocalizedElem {
    let terms: Vec<(HalfExponent, _)> = (0..3)
        .map(|_| {
            let e: Vec<i32> = (0..m).map(|_| rng.gen_range(-2..=2)).collect();
            (HalfExponent::from(e), ratio(rng.gen_range(-5..=5), rng.gen_range(1..=3)))
        })
        .collect();
    let num = LaurentPoly::from_terms(m, terms);
    let c: Vec<i32> = (0..m).map(|i| if i == 0 { 2 } else { rng.gen_range(-2..=2) }).collect();
    LocalizedElem::from_poly(num).div_one_minus(&HalfExponent::from(c))
}

#[test]
fn label_counts() {
    let p2 = local_p2();
    let ev = Evaluator::new(&p2.diagram, &p2.framing, Mode::Strict).unwrap();
    let zero = ev.enumerate_labels(&SkeletalDegree(vec![0, 0, 0])).unwrap();
    assert_eq!(zero.len(), 1);
    assert!(zero[0].0.iter().all(Partition::is_empty));
    assert_eq!(ev.enumerate_labels(&SkeletalDegree(vec![2, 0, 0])).unwrap().len(), 2);
    assert_eq!(ev.enumerate_labels(&SkeletalDegree(vec![1, 1, 2])).unwrap().len(), 2);
    let n: usize = ev.enumerate_labels(&SkeletalDegree(vec![3, 2, 4])).unwrap().len();
    assert_eq!(n, 3 * 2 * 5);
}

#[test]
fn labels_follow_mixing_parity() {
    let p3 = local_p3();
    let ev = Evaluator::new(&p3.diagram, &p3.framing, Mode::AssumeVanishing).unwrap();
    for label in ev.enumerate_labels(&SkeletalDegree(vec![0, 0, 3, 0, 0, 0])).unwrap() {
        let [a, b] = p3.diagram.edges[2].halves;
        assert_eq!(label.get(a).transpose(), *label.get(b));
        for &h in &p3.diagram.leaves {
            assert!(label.get(h).is_empty());
        }
    }
}

#[test]
fn local_p2_edge_weights() {
    let p2 = local_p2();
    let ev = Evaluator::new(&p2.diagram, &p2.framing, Mode::Strict).unwrap();
    assert_eq!(ev.edge_form(EdgeId(0)).unwrap(), &[0, -2, 2]);
    let labels = ev.enumerate_labels(&SkeletalDegree(vec![2, 0, 0])).unwrap();
    let h = p2.diagram.edges[0].halves[0];
    let two = labels.iter().find(|l| l.get(h).parts() == [2]).unwrap();
    assert_eq!(ev.edge_weight(EdgeId(0), two), LocalizedElem::from_poly(mono(&[0, -2, 2], 1)));
    let one = &ev.enumerate_labels(&SkeletalDegree(vec![1, 0, 0])).unwrap()[0];
    assert_eq!(ev.edge_weight(EdgeId(0), one), LocalizedElem::from_int(3, -1));
    let empty = &ev.enumerate_labels(&SkeletalDegree(vec![0, 0, 0])).unwrap()[0];
    assert!(ev.edge_weight(EdgeId(0), empty).is_one());
}

#[test]
fn single_box_vertex_weight() {
    let p2 = local_p2();
    let ev = Evaluator::new(&p2.diagram, &p2.framing, Mode::Strict).unwrap();
    let v = VertexId(2);
    assert_eq!(p2.framing.distinct_weight(&p2.diagram, v), &[1, -1, 0]);
    let mut label = PartitionLabel(vec![Partition::empty(); p2.diagram.half_edges.len()]);
    assert!(ev.vertex_weight(v, &label).unwrap().is_one());
    label.0[half("P2:P1", &p2.diagram).0] = Partition::new(vec![1]).unwrap();
    assert_eq!(ev.vertex_weight(v, &label).unwrap(), inv_diff(&[1, -1, 0]));
}

#[test]
fn vertex_weight_is_invariant_under_cyclic_rotation() {
    let p2 = local_p2();
    let mut file = p2.file.clone();
    file.framing.as_mut().unwrap().get_mut("P0").unwrap().cyclic.rotate_left(1);
    let (d2, f2) = load(&file).unwrap();
    let ev1 = Evaluator::new(&p2.diagram, &p2.framing, Mode::Strict).unwrap();
    let ev2 = Evaluator::new(&d2, &f2, Mode::Strict).unwrap();
    let cyclic = p2.framing.frames[0].cyclic;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let mut label = PartitionLabel(vec![Partition::empty(); p2.diagram.half_edges.len()]);
        let mut budget = 5u32;
        for &h in &cyclic {
            let n = rng.gen_range(0..=budget);
            budget -= n;
            let parts = partitions_of(n);
            label.0[h.0] = parts[rng.gen_range(0..parts.len())].clone();
        }
        assert_eq!(ev1.vertex_weight(VertexId(0), &label).unwrap(), ev2.vertex_weight(VertexId(0), &label).unwrap());
    }
}

#[test]
fn a1c3_degree_one_coefficients() {
    let a = a1c3(A1C3Case::A);
    let ev = Evaluator::new(&a.diagram, &a.framing, Mode::Strict).unwrap();
    assert!(ev.disconnected_coefficient(&SkeletalDegree(vec![0])).unwrap().is_one());
    let x = inv_diff(&[0, 0, 1]);
    assert_eq!(ev.disconnected_coefficient(&SkeletalDegree(vec![1])).unwrap(), &x * &x);

    let b = a1c3(A1C3Case::B);
    let ev = Evaluator::new(&b.diagram, &b.framing, Mode::Strict).unwrap();
    let expected = &inv_diff(&[1, -1]) * &inv_diff(&[-1, -1]);
    assert_eq!(ev.disconnected_coefficient(&SkeletalDegree(vec![1])).unwrap(), expected);
    let report = membrane_indices(&ev, 4, None).unwrap();
    assert_eq!(report.omega.get(&[1]), expected);
    for d in 2..=4 {
        assert!(report.omega.get(&[d]).is_zero(), "d = {d}");
    }
}

#[test]
fn cutoff_zero_is_the_unit_series() {
    let a = a1c3(A1C3Case::A);
    let ev = Evaluator::new(&a.diagram, &a.framing, Mode::Strict).unwrap();
    let s = ev.disconnected_series(0).unwrap();
    assert!(s.constant().is_one());
    assert_eq!(s.iter().count(), 1);
}

#[test]
fn strict_mode_names_the_antidiagonal_edge() {
    let p3 = local_p3();
    let ev = Evaluator::new(&p3.diagram, &p3.framing, Mode::Strict).unwrap();
    match ev.disconnected_series(1) {
        Err(EvalError::UnsupportedDegree { edge, halves, .. }) => {
            assert!(edge == 0 || edge == 1);
            assert!(halves == "P0:P1-P1:P0" || halves == "P2:P3-P3:P2", "{halves}");
        }
        other => panic!("expected a support violation, got {:?}", other.map(|_| ())),
    }
    let ev = Evaluator::new(&p3.diagram, &p3.framing, Mode::AssumeVanishing).unwrap();
    assert!(ev.enumerate_labels(&SkeletalDegree(vec![1, 0, 0, 0, 0, 0])).unwrap().is_empty());
}

#[test]
fn log_examples() {
    let g = Grading(vec![1]);
    assert!(GradedSeries::one(1, g.clone(), 3).log().unwrap().iter().all(|(_, c)| c.is_zero()));
    let a = inv_diff(&[1]);
    let mut s = GradedSeries::one(1, g.clone(), 2);
    s.set(vec![1], a.clone());
    let l = s.log().unwrap();
    assert_eq!(l.get(&[1]), a);
    assert_eq!(l.get(&[2]), (&a * &a).scale(&ratio(-1, 2)));
}

#[test]
fn exp_inverts_log() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let g = Grading(vec![1, 2]);
        let mut s = GradedSeries::one(2, g.clone(), 3);
        for d in g.degrees_up_to(3) {
            if d.iter().any(|&x| x > 0) {
                s.set(d, random_elem(&mut rng, 2));
            }
        }
        assert!(s.log().unwrap().exp().equals(&s));
    }
}

#[test]
fn plog_inverts_pexp() {
    let a = &inv_diff(&[1]) * &inv_diff(&[1]);
    let f = GradedSeries::monomial_series(1, Grading(vec![1]), 4, vec![1], a.clone());
    let g = f.pexp();
    assert!(g.plog().unwrap().equals(&f));
    assert!(plog_expanded(&g, &[1]) == a);
    assert!(plog_expanded(&g, &[2]).is_zero());
    assert!(plog_expanded(&g, &[3]).is_zero());
}

#[test]
fn connected_series_is_divisor_sum_of_indices() {
    let p2 = local_p2();
    let ev = Evaluator::new(&p2.diagram, &p2.framing, Mode::Strict).unwrap();
    let r = membrane_indices(&ev, 3, None).unwrap();
    assert!(r.omega.divisor_sum().equals(&r.connected));
    assert!(r.connected.exp().equals(&r.disconnected));
    assert!(r.omega.constant().is_zero());
    assert!(r.disconnected.constant().is_one());
}

#[test]
fn plog_agrees_with_expanded_formula_on_all_examples() {
    for name in BUILTIN {
        let spec = by_name(name).unwrap();
        let ev = Evaluator::new(&spec.diagram, &spec.framing, spec.mode).unwrap();
        let mut g = ev.disconnected_series(3).unwrap();
        if let Some(s) = &spec.q_signs {
            g = g.flip_q_signs(s);
        }
        let omega = g.plog().unwrap();
        for (d, c) in omega.iter() {
            if d.iter().any(|&x| x > 0) {
                assert_eq!(plog_expanded(&g, d), *c, "{name} {d:?}");
            }
        }
    }
}

#[test]
fn indices_are_integral() {
    for name in BUILTIN {
        let spec = by_name(name).unwrap();
        let ev = Evaluator::new(&spec.diagram, &spec.framing, spec.mode).unwrap();
        let r = membrane_indices(&ev, 3, spec.q_signs.as_deref()).unwrap();
        for (d, rep) in &r.integrality {
            assert!(rep.in_r_integer, "{name} {d:?}");
        }
    }
}

#[test]
fn q_sign_flip_only_touches_odd_degrees() {
    let p3 = local_p3();
    let ev = Evaluator::new(&p3.diagram, &p3.framing, Mode::AssumeVanishing).unwrap();
    let g = ev.disconnected_series(3).unwrap();
    let r = indices_from_series(g.clone(), Some(&[-1])).unwrap();
    assert!(r.disconnected.equals(&g));
    let flipped = g.flip_q_signs(&[-1]);
    assert_eq!(flipped.get(&[2]), g.get(&[2]));
    assert_eq!(flipped.get(&[3]), -&g.get(&[3]));
}

#[test]
fn qnumber_examples() {
    let (x, y) = ([1i64, 0], [0i64, 1]);
    let one = LocalizedElem::one(2);
    assert_eq!(qnumber_expand(&one, &x, &y).unwrap().into_iter().collect::<Vec<_>>(), vec![((1, 1), 1)]);
    let two = LocalizedElem::from_poly(&mono(&[1, 0], 1) + &mono(&[-1, 0], 1));
    assert_eq!(qnumber_expand(&two, &x, &y).unwrap().into_iter().collect::<Vec<_>>(), vec![((2, 1), 1)]);
    let table = [((3, 2), 4), ((1, 1), -1), ((2, 4), 2)].into_iter().collect();
    let e = qnumber_rebuild(&table, &x, &y);
    assert_eq!(qnumber_expand(&e, &x, &y).unwrap(), table);
}

#[test]
fn qnumber_errors() {
    let (x, y) = ([1i64, 0], [0i64, 1]);
    assert_eq!(qnumber_expand(&inv_diff(&[1, 0]), &x, &y), Err(QNumberError::NotLaurent));
    assert_eq!(qnumber_expand(&LocalizedElem::from_poly(mono(&[1, 0], 1)), &x, &y), Err(QNumberError::NotSymmetric));
    assert_eq!(
        qnumber_expand(&LocalizedElem::from_poly(&mono(&[1, 1], 1) + &mono(&[-1, -1], 1)), &[2, 0], &[0, 2]),
        Err(QNumberError::OutsideSpan)
    );
    assert_eq!(qnumber_expand(&LocalizedElem::from_coeff(2, ratio(1, 2)), &x, &y), Err(QNumberError::NonInteger));
}

#[test]
fn point_verification_accepts_evaluated_series_and_rejects_tampering() {
    let p2 = local_p2();
    let ev = Evaluator::new(&p2.diagram, &p2.framing, Mode::Strict).unwrap();
    let mut s = ev.disconnected_series(2).unwrap();
    assert!(ev.verify_at_points(&s, 3, 1).unwrap().is_empty());
    let bumped = &s.get(&[2]) + &LocalizedElem::one(3);
    s.set(vec![2], bumped);
    assert_eq!(ev.verify_at_points(&s, 3, 1).unwrap(), vec![vec![2]]);
}

#[test]
fn reports_are_identical_across_thread_counts() {
    let render = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let p3 = local_p3();
            let ev = Evaluator::new(&p3.diagram, &p3.framing, p3.mode).unwrap();
            let r = membrane_indices(&ev, 4, p3.q_signs.as_deref()).unwrap();
            let x: Vec<i64> = [1, -1, 0, 0].to_vec();
            let y: Vec<i64> = [0, 0, 1, -1].to_vec();
            report_json(&ev, &r, 4, &["series", "connected", "indices", "qnumber-table"], Some((&x, &y))).to_string()
        })
    };
    let one = render(1);
    assert_eq!(render(4), one);
    assert_eq!(render(8), one);
}
