use std::sync::Arc;

use korovkin::bernstein::{
    kantorovich_family, max_kantorovich_family, sup_bernstein_family, CompositionMap, CompositionOperator,
    MaxKantorovich, SupBernstein,
};
use korovkin::choquet::{choquet_kantorovich_family, DistortionFunction};
use korovkin::domain::{GridDomain, NormKind};
use korovkin::harness::{
    apriori_bound, check_hypotheses, probe_functional_equation, run_korovkin_experiment, tabulate_convergence,
    weyl_experiment, HypothesisForm, Tolerances,
};
use korovkin::operators::{cesaro_family, FnOperator, Operator, OperatorInstance};
use korovkin::quadrature::Quadrature;
use korovkin::trig::{golden_angle, CircleMean};
use korovkin::{Error, RealFunction};

fn unit(m: usize) -> GridDomain {
    GridDomain::unit_interval(m).unwrap()
}

fn f(src: &str) -> RealFunction {
    RealFunction::parse(src).unwrap()
}

fn composition(src: &str, d: &GridDomain) -> CompositionOperator {
    let phi = if src == "x" {
        CompositionMap::identity()
    } else {
        CompositionMap::new(f(src), d).unwrap()
    };
    CompositionOperator::new(phi, d.clone()).unwrap()
}

#[test]
fn homomorphisms_satisfy_the_hypotheses() {
    let d = unit(101);
    for src in ["x", "x^2", "sqrt(x)"] {
        let r = check_hypotheses(&composition(src, &d), None, 1e-10).unwrap();
        assert!(r.passed(), "{r}");
        assert_eq!(r.form, HypothesisForm::Generic);
        assert_eq!(r.alpha, 0.0);
        assert!(r.functional_equation_residual.residual < 1e-12);
    }
    let r = check_hypotheses(&FnOperator::identity(d), Some(0.0), 1e-10).unwrap();
    assert_eq!(r.functional_equation_residual.residual, 0.0);
}

#[test]
fn homomorphisms_on_shifted_domains() {
    let d = GridDomain::interval(-1.0, 1.0, 41).unwrap();
    let r = check_hypotheses(&FnOperator::identity(d.clone()), None, 1e-10).unwrap();
    assert_eq!(r.alpha, 1.0);
    assert!(r.passed(), "{r}");
    assert!(matches!(
        check_hypotheses(&FnOperator::identity(d), Some(0.5), 1e-10),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn circle_mean_fails_trig_plus() {
    let d = GridDomain::circle(2048).unwrap();
    let r = check_hypotheses(&CircleMean::new(d).unwrap(), None, 1e-8).unwrap();
    assert_eq!(r.form, HypothesisForm::TrigPlus);
    assert!(r.strict_positivity.verdict.passed());
    assert!((r.functional_equation_residual.residual - 1.0).abs() < 1e-12);
    assert!(!r.passed());
    assert!(r.to_string().contains("fail"));
}

#[test]
fn identity_on_circle_passes_trig_plus() {
    let d = GridDomain::circle(256).unwrap();
    let r = check_hypotheses(&FnOperator::identity(d), None, 1e-12).unwrap();
    assert!(r.passed(), "{r}");
}

#[test]
fn functional_equation_survey() {
    let d = unit(201);
    let sq = CompositionMap::new(f("x^2"), &d).unwrap();
    let homs: Vec<OperatorInstance> = vec![
        Arc::new(composition("x", &d)),
        Arc::new(CompositionOperator::new(sq.clone(), d.clone()).unwrap()),
    ];
    for r in probe_functional_equation(&homs, None, 1e-10).unwrap() {
        assert!(r.passed(), "{r}");
    }

    // max(f∘φ₁, f∘φ₂) with φ₁ = id, φ₂ = x²: at x = 1/2 the branches for
    // -x and -x² differ, so A(-x)² ≠ A(1)A(x²) there.
    let grid = d.clone();
    let max_hom = FnOperator::new("max(f, f∘x²)", d.clone(), d.clone(), move |g| {
        Ok(grid
            .points()
            .iter()
            .map(|p| g.eval(p).max(g.eval(&[p[0] * p[0]])))
            .collect())
    });
    let a_one = 1.0;
    let a_sq = 0.25_f64.max(0.0625);
    let a_neg = (-0.5_f64).max(-0.25);
    let expected_at_half = (a_one * a_sq - a_neg * a_neg).abs();
    let r = probe_functional_equation(&[Arc::new(max_hom)], None, 1e-10)
        .unwrap()
        .remove(0);
    assert!(r.functional_equation_residual.residual >= expected_at_half - 1e-15);
    assert!(expected_at_half > 0.18);
    assert!(!r.passed());

    let c = GridDomain::circle(512).unwrap();
    let mean: Vec<OperatorInstance> = vec![Arc::new(CircleMean::new(c).unwrap())];
    let r = probe_functional_equation(&mean, None, 1e-8).unwrap().remove(0);
    assert!((r.functional_equation_residual.residual - 1.0).abs() < 1e-12);
}

#[test]
fn survey_rejects_mixed_domains() {
    let a: OperatorInstance = Arc::new(FnOperator::identity(unit(11)));
    let b: OperatorInstance = Arc::new(FnOperator::identity(unit(12)));
    assert!(matches!(
        probe_functional_equation(&[a, b], None, 1e-8),
        Err(Error::Invariant(_))
    ));
}

#[test]
fn apriori_identity_pair() {
    let d = unit(51);
    let id = FnOperator::identity(d);
    let r = apriori_bound(&id, &id, &f("sin(5*x)"), 0.1, None, 1e-8).unwrap();
    assert_eq!(r.lhs, 0.0);
    assert!((r.rhs - 0.1).abs() < 1e-15);
    assert!(r.verdict.passed());
}

#[test]
fn apriori_spec_examples() {
    let d = unit(101);
    let t = SupBernstein::new(8, CompositionMap::identity(), 2, d.clone()).unwrap();
    let r = apriori_bound(&t, &FnOperator::identity(d.clone()), &f("x^2"), 0.05, None, 1e-8).unwrap();
    assert!(r.verdict.passed() && r.slack >= 0.0, "{r:?}");
    assert!(r.lhs > 0.0);

    let t = MaxKantorovich::new(4, CompositionMap::identity(), Quadrature::default(), d.clone()).unwrap();
    let r = apriori_bound(&t, &composition("x", &d), &f("abs(x-0.5)"), 0.1, None, 1e-8).unwrap();
    assert!(r.verdict.passed() && r.slack >= 0.0, "{r:?}");
}

#[test]
fn sup_bernstein_experiment_converges() {
    let d = unit(201);
    let fam = sup_bernstein_family(CompositionMap::identity(), 2, d.clone());
    let schedule = [4, 8, 16, 32, 64, 128, 256];
    let probes = [f("abs(x-0.5)"), f("sin(3*x)")];
    let rep = run_korovkin_experiment(
        &fam,
        &FnOperator::identity(d),
        &schedule,
        &probes,
        &NormKind::Sup,
        None,
        Tolerances::for_norm(&NormKind::Sup),
    )
    .unwrap();
    assert!(rep.verdict.passed(), "{rep:#?}");
    assert_eq!(rep.test_functions().count(), 3);
    for s in rep.probes() {
        assert!(s.is_nonincreasing(), "{s:?}");
    }
    assert!(rep.hypotheses.as_ref().unwrap().passed());
}

#[test]
fn max_kantorovich_l1_experiment_converges() {
    let d = unit(201);
    let phi = CompositionMap::new(f("x^2"), &d).unwrap();
    let fam = max_kantorovich_family(phi.clone(), Quadrature::default(), d.clone());
    let limit = CompositionOperator::new(phi, d.clone()).unwrap();
    let norm = NormKind::l1_on(&d);
    let rep = run_korovkin_experiment(
        &fam,
        &limit,
        &[4, 8, 16, 32, 64, 128],
        &[f("abs(x-0.5)")],
        &norm,
        None,
        Tolerances::for_norm(&norm),
    )
    .unwrap();
    assert!(rep.verdict.passed(), "{rep:#?}");
    let norms = rep.operator_norms.as_ref().unwrap();
    assert!(norms.iter().all(|(_, v)| (v - 1.0).abs() < 1e-9));
    assert!((rep.sup_operator_norm.unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn gate_refuses_circle_mean() {
    let d = GridDomain::circle(256).unwrap();
    let fam = cesaro_family(&korovkin::trig::rotation_power_family(golden_angle(), 64, d.clone()).unwrap());
    let err = run_korovkin_experiment(
        &fam,
        &CircleMean::new(d).unwrap(),
        &[4, 8],
        &[],
        &NormKind::Sup,
        None,
        Tolerances::for_norm(&NormKind::Sup),
    )
    .unwrap_err();
    match err {
        Error::GateRefused(r) => assert!((r.functional_equation_residual.residual - 1.0).abs() < 1e-12),
        other => panic!("expected gate refusal, got {other}"),
    }
}

#[test]
fn weyl_cosine_envelope_and_square() {
    let d = GridDomain::circle(2048).unwrap();
    let alpha = golden_angle();
    let schedule = [16, 64, 256, 1024, 4096];
    let rep = weyl_experiment(&d, alpha, &schedule, &[f("cos(x)"), f("sin(x)"), f("cos(x)^2")], 5e-2).unwrap();
    let gap = (2.0 - 2.0 * alpha.cos()).sqrt();
    for id in ["cos(x)", "sin(x)"] {
        for &(n, e) in &rep.series_for(id).unwrap().errors {
            assert!(e <= 2.0 / n as f64 / gap + 1e-6, "{id} n={n}: {e}");
        }
    }
    let sq = rep.series_for("(cos(x)^2)").unwrap();
    assert!(sq.last() < 5e-2);
    assert!(rep.verdict.passed(), "{rep:#?}");
    let one = rep.series_for("1").unwrap();
    assert!(one.errors.iter().all(|&(_, e)| e == 0.0));
}

#[test]
fn weyl_rejects_rational_rotation() {
    let d = GridDomain::circle(64).unwrap();
    assert!(matches!(
        weyl_experiment(&d, std::f64::consts::PI / 2.0, &[4, 8], &[], 5e-2),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn malformed_schedule_rejected() {
    let d = unit(21);
    let fam = kantorovich_family(CompositionMap::identity(), Quadrature::default(), d.clone());
    for bad in [&[][..], &[4, 4][..], &[8, 4][..], &[0, 4][..]] {
        let r = run_korovkin_experiment(
            &fam,
            &FnOperator::identity(d.clone()),
            bad,
            &[],
            &NormKind::Sup,
            None,
            Tolerances::for_norm(&NormKind::Sup),
        );
        assert!(matches!(r, Err(Error::Precondition(_))), "{bad:?}");
    }
}

#[test]
fn cesaro_of_convergent_family_has_same_limit() {
    let d = unit(101);
    let fam = kantorovich_family(CompositionMap::identity(), Quadrature::default(), d.clone());
    let ces = cesaro_family(&fam);
    let id = FnOperator::identity(d);
    let schedule = [2, 8, 32, 128];
    let tol = Tolerances::for_norm(&NormKind::Sup);
    let probes = [f("sin(3*x)"), f("abs(x-0.5)")];
    let a = run_korovkin_experiment(&fam, &id, &schedule, &probes, &NormKind::Sup, None, tol).unwrap();
    assert!(a.verdict.passed());
    // Cesàro means converge more slowly, so only the trend is asserted.
    let b = tabulate_convergence(&ces, &id, &schedule, &probes, &NormKind::Sup, tol).unwrap();
    for s in b.probes() {
        assert!(s.is_nonincreasing() && s.last() <= 0.5 * s.first(), "{s:?}");
    }
}

#[test]
fn choquet_family_converges_in_l1() {
    let d = unit(201);
    let fam = choquet_kantorovich_family(CompositionMap::identity(), DistortionFunction::sqrt(), 64, d.clone());
    let norm = NormKind::l1_on(&d);
    let rep = run_korovkin_experiment(
        &fam,
        &FnOperator::identity(d),
        &[4, 8, 16, 32, 64, 128],
        &[f("abs(x-0.5)")],
        &norm,
        None,
        Tolerances::for_norm(&norm),
    )
    .unwrap();
    assert!(rep.verdict.passed(), "{rep:#?}");
}

#[test]
fn positivity_scaling_inequality() {
    // [min A(1)]·‖g‖ ≤ ‖g·A(1)‖ for a strictly positive unital A.
    let d = unit(101);
    let a = composition("x^2", &d);
    let a1 = a.apply(&RealFunction::one()).unwrap();
    let min = a1.iter().copied().fold(f64::INFINITY, f64::min);
    assert!(min > 0.0);
    let t = SupBernstein::new(16, CompositionMap::identity(), 2, d.clone()).unwrap();
    let probe = f("sin(3*x)");
    let diff: Vec<f64> = t
        .apply(&probe)
        .unwrap()
        .iter()
        .zip(a.apply(&probe).unwrap())
        .map(|(x, y)| x - y)
        .collect();
    let plain = diff.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let weighted = diff.iter().zip(&a1).fold(0.0_f64, |m, (v, w)| m.max((v * w).abs()));
    assert!(min * plain <= weighted + 1e-15);
}
