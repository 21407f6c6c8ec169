use cpair::algebra::{AlgebraElement, Presentation, Strategy as Rewrite, DEFAULT_STEP_BUDGET};
use num_complex::Complex64;
use proptest::prelude::*;

fn catalogue() -> Vec<Presentation> {
    vec![
        Presentation::heisenberg(),
        Presentation::quantum_plane(0.125),
        Presentation::axb(0.2),
        Presentation::suq11(0.8).unwrap(),
    ]
}

fn element(p: &Presentation, spec: &[(Vec<u8>, f64, f64)]) -> AlgebraElement {
    let n = p.alphabet().len();
    AlgebraElement::from_terms(
        p.alphabet(),
        spec.iter().map(|(w, re, im)| (w.iter().map(|&g| g as usize % n).collect(), Complex64::new(*re, *im))),
    )
}

fn terms() -> impl Strategy<Value = Vec<(Vec<u8>, f64, f64)>> {
    prop::collection::vec((prop::collection::vec(0u8..8, 0..=4), -1.0..1.0f64, -1.0..1.0f64), 1..5)
}

fn close(a: &AlgebraElement, b: &AlgebraElement) -> bool {
    a.distance(b).unwrap() <= 1e-10 * (1.0 + a.max_coefficient())
}

proptest! {
    #[test]
    fn strategies_agree(which in 0usize..4, spec in terms()) {
        let p = &catalogue()[which];
        let e = element(p, &spec);
        let l = p.normal_form_with(&e, Rewrite::Leftmost, DEFAULT_STEP_BUDGET).unwrap();
        let r = p.normal_form_with(&e, Rewrite::Rightmost, DEFAULT_STEP_BUDGET).unwrap();
        prop_assert!(close(&l, &r), "{} vs {}", l, r);
    }

    #[test]
    fn normal_form_idempotent(which in 0usize..4, spec in terms()) {
        let p = &catalogue()[which];
        let nf = p.normal_form(&element(p, &spec)).unwrap();
        prop_assert!(close(&p.normal_form(&nf).unwrap(), &nf));
    }

    #[test]
    fn normal_form_respects_adjoint(which in 0usize..4, spec in terms()) {
        let p = &catalogue()[which];
        let e = element(p, &spec);
        let a = p.normal_form(&e.adjoint()).unwrap();
        let b = p.normal_form(&p.normal_form(&e).unwrap().adjoint()).unwrap();
        prop_assert!(close(&a, &b), "{} vs {}", a, b);
    }

    #[test]
    fn adjoint_is_antihomomorphism(which in 0usize..4, s1 in terms(), s2 in terms()) {
        let p = &catalogue()[which];
        let (e1, e2) = (element(p, &s1), element(p, &s2));
        let l = p.normal_form(&p.multiply(&e1, &e2).unwrap().adjoint()).unwrap();
        let r = p.multiply(&e2.adjoint(), &e1.adjoint()).unwrap();
        prop_assert!(close(&l, &r));
    }

    #[test]
    fn adjoint_is_involutive(spec in terms()) {
        let p = Presentation::suq11(0.8).unwrap();
        let e = element(&p, &spec);
        prop_assert_eq!(e.adjoint().adjoint(), e);
    }
}

#[test]
fn suq11_second_unitarity_relation() {
    let p = Presentation::suq11(0.8).unwrap();
    let q2 = Complex64::new(0.64, 0.0);
    let e = p
        .word("a a+")
        .unwrap()
        .sub(&p.word("").unwrap())
        .unwrap()
        .sub(&p.word("c+ c").unwrap().scale(q2))
        .unwrap();
    assert!(p.normal_form(&e).unwrap().is_zero());
}
