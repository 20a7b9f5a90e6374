use formalpatch_core::par::Exec;
use formalpatch_core::patch::{
    check_maximality, fiber_product_level, make_config, pose_problem, solve, unit_candidate,
    Candidate, OpenConfig, PatchProblem, Verdict,
};
use formalpatch_core::surface::{BaseRing, PrimeData};
use formalpatch_core::tower::PresModule;
use formalpatch_core::{Field, FreeVec};

fn ring_problem(b: &BaseRing, pd: &PrimeData, f1: &str, f2: &str, depth: u32) -> PatchProblem {
    let r = b.ring();
    let c = make_config(b, pd, &r.parse(f1).unwrap(), &r.parse(f2).unwrap(), depth).unwrap();
    free_problem(&c)
}

fn free_problem(c: &OpenConfig) -> PatchProblem {
    let m1 = PresModule::free(c.r1().clone(), 1).unwrap();
    let m2 = PresModule::free(c.r2().clone(), 1).unwrap();
    let m0 = PresModule::free(c.r0().clone(), 1).unwrap();
    let one = vec![FreeVec::unit(1, 0, Field::Rational)];
    pose_problem(c, &m1, &m2, &m0, &one, &one, 1, Exec::Parallel).unwrap()
}

fn single_prime(vars: &[&str], rels: &[&str]) -> (BaseRing, PrimeData) {
    let b = BaseRing::new(Field::Rational, vars, rels, "t").unwrap();
    let r = b.ring().clone();
    let pd = PrimeData::validate(&b, vec![vec![r.parse("t").unwrap()]], vec![r.one()]).unwrap();
    (b, pd)
}

#[test]
fn affine_line_partial_fractions() {
    let (b, pd) = single_prime(&["x", "t"], &[]);
    let problem = ring_problem(&b, &pd, "x", "x - 1", 1);
    let fp = fiber_product_level(&problem, 1, 2).unwrap();
    let one = problem
        .at_level(1, &[FreeVec::unit(1, 0, Field::Rational)])
        .unwrap();
    assert!(problem.in_base_span(1, &one[0], &fp.images()).unwrap());
    // every agreeing pair is a polynomial
    for w in fp.images() {
        assert!(problem.in_base_span(1, &w, &one).unwrap());
    }
}

#[test]
fn ring_problems_recover_the_base() {
    for (vars, f1, f2) in [
        (&["x", "t"][..], "x", "x - 1"),
        (&["x", "y", "t"][..], "y", "x"),
    ] {
        let (b, pd) = single_prime(vars, &[]);
        let problem = ring_problem(&b, &pd, f1, f2, 4);
        let sol = solve(&problem, &[0, 1, 2, 3], Exec::Parallel).unwrap();
        assert!(
            sol.checks.iter().all(|c| !c.verdict.is_failure()),
            "{:?}",
            sol.checks
        );
        for l in &sol.levels {
            assert!(l.d_stable.unwrap() <= 3);
        }
        let base = unit_candidate(&problem, "B");
        let m = check_maximality(&problem, &sol, &base).unwrap();
        assert!(m.contained && !m.strict);
    }
}

#[test]
fn two_planes_branch_indicator() {
    let b = BaseRing::new(
        Field::Rational,
        &["x", "y", "x'", "y'", "t"],
        &["x*x'", "x*y'", "y*x'", "y*y'"],
        "t",
    )
    .unwrap();
    let r = b.ring().clone();
    let p = |s: &str| r.parse(s).unwrap();
    let pd = PrimeData::validate(
        &b,
        vec![vec![p("x"), p("y"), p("t")], vec![p("x'"), p("y'"), p("t")]],
        vec![p("x'"), p("x")],
    )
    .unwrap();
    let problem = ring_problem(&b, &pd, "y + y'", "x + x'", 2);
    let sol = solve(&problem, &[0, 1, 2], Exec::Parallel).unwrap();
    assert!(
        sol.checks.iter().all(|c| c.verdict != Verdict::Fail),
        "{:?}",
        sol.checks
    );
    let base = unit_candidate(&problem, "B");
    let m = check_maximality(&problem, &sol, &base).unwrap();
    assert!(m.contained && m.strict);
    let r0 = problem.config().r0().clone();
    let indicator = Candidate::new("e", vec![FreeVec::parse(&r0, &["y*u1"]).unwrap()]);
    for l in &sol.levels {
        let e = problem.at_level(l.level, &indicator.generators).unwrap();
        assert!(problem
            .in_base_span(l.level, &e[0], &l.generators())
            .unwrap());
        let one = problem.at_level(l.level, &base.generators).unwrap();
        assert!(!problem.in_base_span(l.level, &e[0], &one).unwrap());
    }
}
