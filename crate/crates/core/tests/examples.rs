use std::path::PathBuf;

use qv_core::diagram::{load, DiagramFile, EdgeId};
use qv_core::evaluator::{membrane_indices, qnumber_expand, Evaluator, Mode};
use qv_core::examples::{
    a1c3, a1c3_threefold, by_name, conifold_a1, conifold_hand_sum, diagram_signature, globally_antidiagonal,
    globally_antidiagonal_formula, local_p3, p2_hand_sum, p3_hand_sum, strip, A1C3Case, BundleError,
    Leg, Oracle, OracleStatus, ThreefoldDiagram, ThreefoldEdge, ThreefoldVertex, BUILTIN, P3_X, P3_Y,
};
use qv_core::ring::HalfExponent;
use qv_core::series::GradedSeries;

fn evaluate(name: &str, cutoff: u32) -> GradedSeries {
    let spec = by_name(name).unwrap();
    let ev = Evaluator::new(&spec.diagram, &spec.framing, spec.mode).unwrap();
    ev.disconnected_series(cutoff).unwrap()
}

fn restrict(s: &GradedSeries, new_m: usize, f: impl Fn(&HalfExponent) -> HalfExponent + Copy) -> GradedSeries {
    let mut out = GradedSeries::zero(new_m, s.grading.clone(), s.cutoff);
    for (d, c) in s.iter() {
        out.set(d.clone(), c.map_exponents(new_m, f).unwrap());
    }
    out
}

#[test]
fn builder_parameters() {
    assert_eq!(a1c3(A1C3Case::A).diagram.m, 3);
    assert_eq!(a1c3(A1C3Case::B).diagram.m, 2);
    assert_eq!(conifold_a1().oracle_status, OracleStatus::Conjectural);
    assert_eq!(local_p3().mode, Mode::AssumeVanishing);
    assert!(local_p3().vanishing_justification.is_some());
    assert!(by_name("strip-udx").is_none());
    assert!(by_name("strip-").is_none());
    assert_eq!(by_name("strip-dduu").unwrap().diagram.edges.len(), 3);
}

#[test]
fn disconnected_oracles_match() {
    for name in BUILTIN {
        let spec = by_name(name).unwrap();
        if let Oracle::Disconnected(f) = &spec.oracle {
            let cutoff = if name.starts_with("a1c3") { 4 } else { 3 };
            let got = evaluate(name, cutoff);
            assert_eq!(got.first_mismatch(&f(cutoff)), None, "{name}");
        }
    }
}

#[test]
fn single_leg_strip_is_trivial() {
    let s = strip(&[Leg::Up]);
    assert!(s.diagram.edges.is_empty());
    assert_eq!(s.diagram.vertices.len(), 1);
    let ev = Evaluator::new(&s.diagram, &s.framing, Mode::Strict).unwrap();
    let series = ev.disconnected_series(3).unwrap();
    assert!(series.constant().is_one());
    assert!(series.iter().all(|(d, c)| d.iter().all(|&x| x == 0) || c.is_zero()));
}

#[test]
fn strip_series_do_not_depend_on_the_horizontal_weight() {
    for name in ["strip-ud", "strip-uud", "strip-udu", "strip-dud"] {
        for (_, c) in evaluate(name, 3).iter() {
            assert!(c.numerator().terms().iter().all(|(e, _)| e.entries()[0] == 0), "{name}");
            assert!(c.denominator().iter().all(|f| f.character.entries()[0] == 0), "{name}");
        }
    }
}

#[test]
fn conifold_matches_its_partition_sum() {
    assert_eq!(evaluate("conifold-a1", 3).first_mismatch(&conifold_hand_sum(3)), None);
}

#[test]
fn conifold_vertical_edges_pair_transposes_and_equals() {
    let s = conifold_a1();
    let ev = Evaluator::new(&s.diagram, &s.framing, Mode::Strict).unwrap();
    for label in ev.labels_for_class(&[0, 3]).unwrap() {
        let [a, b] = s.diagram.edges[2].halves;
        assert_eq!(*label.get(b), label.get(a).transpose());
        let [c, d] = s.diagram.edges[3].halves;
        assert_eq!(label.get(c), label.get(d));
    }
    assert_eq!(ev.edge_parity(EdgeId(2)).unwrap().p, 1);
}

#[test]
fn local_p2_matches_its_partition_sum() {
    assert_eq!(evaluate("local-p2", 3).first_mismatch(&p2_hand_sum(3)), None);
}

#[test]
fn local_p2_has_cyclic_weyl_symmetry() {
    let s = evaluate("local-p2", 3);
    let rotated = restrict(&s, 3, |e| {
        let x = e.entries();
        HalfExponent::from_slice(&[x[2], x[0], x[1]])
    });
    assert_eq!(s.first_mismatch(&rotated), None);
}

#[test]
fn local_p3_matches_its_partition_sum() {
    assert_eq!(evaluate("local-p3", 3).first_mismatch(&p3_hand_sum(3)), None);
}

#[test]
fn local_p3_low_degree_indices() {
    let s = local_p3();
    let ev = Evaluator::new(&s.diagram, &s.framing, s.mode).unwrap();
    let r = membrane_indices(&ev, 4, s.q_signs.as_deref()).unwrap();
    let table = |d: u32| qnumber_expand(&r.omega.get(&[d]), &P3_X, &P3_Y).unwrap();
    assert!(table(1).is_empty());
    assert_eq!(table(2).into_iter().collect::<Vec<_>>(), vec![((1, 1), 2)]);
    assert_eq!(table(3).into_iter().collect::<Vec<_>>(), vec![((4, 4), -2)]);
    let t4 = table(4);
    assert_eq!(t4[&(1, 1)], -1);
    assert_eq!(t4[&(3, 3)], 2);
}

#[test]
fn global_builder_reproduces_a1c3_case_a() {
    let global = globally_antidiagonal(&a1c3_threefold()).unwrap();
    let a = a1c3(A1C3Case::A);
    assert_eq!(diagram_signature(&global.diagram, &global.framing), diagram_signature(&a.diagram, &a.framing));
    let ev = Evaluator::new(&global.diagram, &global.framing, Mode::Strict).unwrap();
    let s = ev.disconnected_series(4).unwrap();
    assert_eq!(s.first_mismatch(&evaluate("a1c3-A", 4)), None);
    assert_eq!(s.first_mismatch(&globally_antidiagonal_formula(&a1c3_threefold(), 4)), None);
    let p = ev.edge_parity(EdgeId(0)).unwrap();
    assert_eq!((p.f, p.p), (1, 1));
}

/// The resolved conifold with trivial `L` on the torus `(u, e)`.
fn conifold_threefold() -> ThreefoldDiagram {
    let hv = |n: &str, w: [i64; 2]| (n.to_string(), w.to_vec());
    ThreefoldDiagram {
        name: "conifold-global".into(),
        m: 2,
        grading: vec![1],
        vertices: vec![
            ThreefoldVertex { id: "v1".into(), halfedges: [hv("r1", [-1, 1]), hv("g1", [0, -1]), hv("l1", [1, 0])], line: vec![0, 1] },
            ThreefoldVertex { id: "v2".into(), halfedges: [hv("l2", [1, -1]), hv("g2", [0, 1]), hv("r2", [-1, 0])], line: vec![0, 1] },
        ],
        edges: vec![ThreefoldEdge { halves: ["r1".into(), "l2".into()], class: vec![1], f1: 0, f2: 0 }],
    }
}

#[test]
fn global_builder_matches_strip_on_the_antidiagonal_subtorus() {
    let x = conifold_threefold();
    let global = globally_antidiagonal(&x).unwrap();
    let ev = Evaluator::new(&global.diagram, &global.framing, Mode::Strict).unwrap();
    let g = ev.disconnected_series(4).unwrap();
    assert_eq!(g.first_mismatch(&globally_antidiagonal_formula(&x, 4)), None);
    // e5 = -e4 on the strip torus (u, e4, e5).
    let s = restrict(&evaluate("strip-ud", 4), 2, |e| {
        let v = e.entries();
        HalfExponent::from_slice(&[v[0], v[1] - v[2]])
    });
    assert_eq!(g.first_mismatch(&s), None);
}

#[test]
fn inconsistent_bundle_data_is_rejected() {
    let mut x = conifold_threefold();
    x.edges[0].f2 = 1;
    assert_eq!(globally_antidiagonal(&x).err(), Some(BundleError::LineBundle { edge: 0 }));
    let mut x = conifold_threefold();
    x.edges[0].f1 = 1;
    assert_eq!(globally_antidiagonal(&x).err(), Some(BundleError::NormalBundle { edge: 0 }));
    let mut x = conifold_threefold();
    x.vertices[1].halfedges[0].1 = vec![1, 1];
    assert_eq!(globally_antidiagonal(&x).err(), Some(BundleError::NotOpposite { edge: 0 }));
    let mut x = conifold_threefold();
    x.edges[0].halves[1] = "nope".into();
    assert_eq!(globally_antidiagonal(&x).err(), Some(BundleError::UnknownHalfEdge("nope".into())));
}

#[test]
fn indices_of_closed_forms_are_single_interval_terms() {
    let s = by_name("strip-uud").unwrap();
    let ev = Evaluator::new(&s.diagram, &s.framing, Mode::Strict).unwrap();
    let r = membrane_indices(&ev, 3, None).unwrap();
    for (d, c) in r.omega.iter() {
        let ones: Vec<usize> = d.iter().enumerate().filter(|(_, &x)| x > 0).map(|(i, _)| i).collect();
        let interval = d.iter().all(|&x| x <= 1) && ones.windows(2).all(|w| w[1] == w[0] + 1);
        if ones.is_empty() || !interval {
            assert!(c.is_zero(), "{d:?}");
        } else {
            assert!(!c.is_zero(), "{d:?}");
        }
    }
}

fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/diagrams")
}

#[test]
fn diagram_fixtures_equal_builder_output() {
    for name in BUILTIN {
        let path = fixture_dir().join(format!("{name}.json"));
        let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let file = DiagramFile::from_json_str(&text).unwrap();
        assert_eq!(file, by_name(name).unwrap().file, "{name}");
        load(&file).unwrap();
    }
}
