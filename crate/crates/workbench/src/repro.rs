//! Scripted reproductions of the bundled worked examples. Every claim is a
//! record whose name states it in words.

use formalpatch_core::par::Exec;
use formalpatch_core::patch::{
    check_flat_uniqueness, check_maximality, fiber_product_level, flatness_certificate, solve,
    unit_candidate, Candidate, PatchProblem, PatchSolution, Uniqueness, Verdict,
};
use formalpatch_core::surface::{symbolic_power, BaseRing, PrimeData};
use formalpatch_core::tower::{
    q_filtration, stabilization_index, symbolic_containment_bound, TowerModule,
};
use formalpatch_core::{Field, FreeVec};

use crate::commands;
use crate::error::CliError;
use crate::instance::Instance;
use crate::report::{Record, Report};

pub const IDS: &[&str] = &[
    "a1-partial-fractions",
    "a1-symbolic",
    "a2-ideal-xy",
    "flat-free-a2",
    "two-planes",
    "xm-tn",
];

pub fn repro(id: &str, exec: Exec) -> Result<Report, CliError> {
    let inst = crate::bundled(id)
        .filter(|_| IDS.contains(&id))
        .ok_or_else(|| {
            CliError::Usage(format!(
                "unknown example `{id}`; expected one of {}",
                IDS.join(", ")
            ))
        })?;
    let records = match id {
        "a2-ideal-xy" => a2_ideal_xy(&inst, exec)?,
        "xm-tn" => xm_tn(&inst, exec)?,
        "a1-partial-fractions" => a1_partial_fractions(&inst, exec)?,
        "two-planes" => two_planes(&inst, exec)?,
        "a1-symbolic" => a1_symbolic(&inst)?,
        "flat-free-a2" => flat_free_a2(&inst, exec)?,
        _ => unreachable!(),
    };
    Ok(Report::new("repro", id, records))
}

fn posed(
    inst: &Instance,
    exec: Exec,
) -> Result<(PatchProblem, PatchSolution, Vec<Record>), CliError> {
    let problem = match commands::pose(inst, None, exec)? {
        Ok(p) => p,
        Err(records) => {
            let msg = records
                .iter()
                .flat_map(|r| r.witness.clone())
                .collect::<Vec<_>>()
                .join("; ");
            return Err(CliError::instance(&inst.source, "problem", &msg));
        }
    };
    let sol = solve(&problem, &inst.schedule(), exec)?;
    let mut records: Vec<Record> = problem.checks.iter().cloned().map(Record::from).collect();
    records.extend(commands::solution_records(inst, &problem, &sol)?);
    Ok((problem, sol, records))
}

fn in_span(
    problem: &PatchProblem,
    i: u32,
    v: &FreeVec,
    gens: &[FreeVec],
) -> Result<bool, CliError> {
    let w = problem.at_level(i, std::slice::from_ref(v))?;
    let g = problem.at_level(i, gens)?;
    Ok(problem.in_base_span(i, &w[0], &g)?)
}

fn free_of_rank(
    problem: &PatchProblem,
    sol: &PatchSolution,
    out: &mut Vec<Record>,
) -> Result<(), CliError> {
    for l in &sol.levels {
        let f = flatness_certificate(&l.module, problem.rank())?;
        let free =
            f.flat && l.module.ngens() == problem.rank() && l.module.relation_vectors().is_empty();
        out.push(Record::check(
            format!("solution is free of rank {}", problem.rank()),
            l.level,
            free,
            vec![format!(
                "{} generators, {} relations",
                l.module.ngens(),
                l.module.relation_vectors().len()
            )],
        ));
    }
    Ok(())
}

fn stabilizes_by(sol: &PatchSolution, bound: u32, out: &mut Vec<Record>) {
    for l in &sol.levels {
        out.push(Record::check(
            format!("denominators stabilize by D = {bound}"),
            l.level,
            l.d_stable.is_some_and(|d| d <= bound),
            vec![match l.d_stable {
                Some(d) => format!("stable at D = {d}, least sufficient D = {}", l.d_min),
                None => "not stable within the schedule".into(),
            }],
        ));
    }
}

fn equals_base_image(
    problem: &PatchProblem,
    sol: &PatchSolution,
    out: &mut Vec<Record>,
) -> Result<(), CliError> {
    let m = check_maximality(problem, sol, &unit_candidate(problem, "base"))?;
    out.push(Record::check(
        "solution equals the base ring image",
        0,
        m.contained && !m.strict,
        vec![format!("contained: {}, strict: {}", m.contained, m.strict)],
    ));
    Ok(())
}

fn a2_ideal_xy(inst: &Instance, exec: Exec) -> Result<Vec<Record>, CliError> {
    let (problem, sol, mut out) = posed(inst, exec)?;
    free_of_rank(&problem, &sol, &mut out)?;
    let ideal = inst.candidate("I", problem.config())?;
    let one = inst.element("one", problem.config())?;
    for l in &sol.levels {
        let i = l.level;
        out.push(Record::check(
            "1 lies in the solution",
            i,
            in_span(&problem, i, &one, &l.generators())?,
            vec![],
        ));
        out.push(Record::check(
            "1 does not lie in I",
            i,
            !in_span(&problem, i, &one, &ideal.generators)?,
            vec![],
        ));
    }
    let m = check_maximality(&problem, &sol, &ideal)?;
    let mut w = vec![format!("contained: {}, strict: {}", m.contained, m.strict)];
    if let Some((i, g)) = &m.gap {
        w.push(format!(
            "{} at level {i} lies outside I",
            g.text(&problem.level(*i).rings.r0)
        ));
    }
    out.push(Record::check(
        "I is strictly contained in the solution",
        0,
        m.contained && m.strict,
        w,
    ));
    Ok(out)
}

fn xm_tn(inst: &Instance, exec: Exec) -> Result<Vec<Record>, CliError> {
    let spec = inst.file.tower.as_ref().expect("bundled tower");
    let mut out = commands::tower_verify(inst, None, exec)?.records;
    let m = inst.module("M", None)?;
    let tower = TowerModule::build(
        &m,
        spec.depth.unwrap_or(commands::DEFAULT_TOWER_DEPTH),
        exec,
    )?;
    for i in 2..=4 {
        let mi = tower.level(i);
        let r = mi.ring();
        let t = r.t_poly().expect("t");
        let x = r.var_poly(r.var("x").expect("x"));
        let q = mi.generator(0).scale(&t.pow(i - 1));
        let torsion = mi.is_zero_element(&q.scale(&x)) && !mi.is_zero_element(&q);
        out.push(Record::check(
            "t^(i-1)*m is nonzero x-torsion",
            i,
            torsion,
            vec![format!("x*{} = 0 and {} != 0", q.text(r), q.text(r))],
        ));
    }
    let pool = inst.polys("tower.pool", spec.pool.as_deref().unwrap_or_default())?;
    let filt = q_filtration(&tower, &inst.pd, &pool, exec)?;
    let n = stabilization_index(&tower, &filt)?;
    out.push(Record::check(
        "the torsion filtration stabilizes at n = 2",
        0,
        n == 2,
        vec![format!("n = {n}")],
    ));
    let b = symbolic_containment_bound(&m, &inst.pd, &pool, 1, 4)?;
    out.push(Record::check(
        "the containment bound for c = 1 is n = 2",
        0,
        b.n == 2,
        vec![format!("n = {}", b.n)],
    ));
    Ok(out)
}

fn a1_partial_fractions(inst: &Instance, exec: Exec) -> Result<Vec<Record>, CliError> {
    let (problem, sol, mut out) = posed(inst, exec)?;
    let one = unit_candidate(&problem, "base");
    let fp = fiber_product_level(&problem, 1, 2)?;
    let g = problem.at_level(1, &one.generators)?;
    let hit = problem.in_base_span(1, &g[0], &fp.images())?;
    let mut escaped = None;
    for w in fp.images() {
        if !problem.in_base_span(1, &w, &g)? {
            escaped = Some(w.text(&problem.level(1).rings.r0));
        }
    }
    out.push(Record::check(
        "1 = x - (x - 1) is an agreeing pair at D = 2",
        1,
        hit,
        vec![format!("{} agreeing pairs", fp.elements.len())],
    ));
    out.push(Record::check(
        "every agreeing pair at D = 2 is a polynomial",
        1,
        escaped.is_none(),
        escaped.into_iter().collect(),
    ));
    equals_base_image(&problem, &sol, &mut out)?;
    stabilizes_by(&sol, 3, &mut out);
    Ok(out)
}

fn two_planes(inst: &Instance, exec: Exec) -> Result<Vec<Record>, CliError> {
    let (problem, sol, mut out) = posed(inst, exec)?;
    let base = unit_candidate(&problem, "base");
    let e = inst.element("indicator", problem.config())?;
    let r0 = problem.config().r0().clone();
    for l in &sol.levels {
        let i = l.level;
        let inside = in_span(&problem, i, &e, &l.generators())?;
        let outside_base = !in_span(&problem, i, &e, &base.generators)?;
        let verdict = if inside && outside_base {
            Verdict::Demonstration
        } else {
            Verdict::Fail
        };
        out.push(Record::new(
            "the branch indicator lies in the solution but not in the base image",
            i,
            verdict,
            vec![format!("indicator {}", e.text(&r0))],
        ));
    }
    let m = check_maximality(&problem, &sol, &base)?;
    out.push(Record::new(
        "the solution is strictly larger than the base image",
        0,
        if m.contained && m.strict {
            Verdict::Demonstration
        } else {
            Verdict::Fail
        },
        vec![format!("contained: {}, strict: {}", m.contained, m.strict)],
    ));
    Ok(out)
}

fn a1_symbolic(inst: &Instance) -> Result<Vec<Record>, CliError> {
    let mut out = commands::symbolic_power(inst, 1, 2, None)?.records;
    let x = inst.base_element("x")?;
    let sp = symbolic_power(&inst.pd, 0, 2, None)?;
    let p2 = inst.pd.prime(0).power(2)?;
    out.push(Record::check(
        "x lies in P^(2)",
        2,
        sp.ideal.contains_poly(&x),
        vec![],
    ));
    out.push(Record::check(
        "x does not lie in P^2",
        2,
        !p2.contains_poly(&x),
        vec![],
    ));
    for vars in [&["x", "t"][..], &["x", "y", "t"][..]] {
        let b = BaseRing::new(Field::Rational, vars, &[], "t")?;
        let r = b.ring().clone();
        let pd = PrimeData::validate(&b, vec![vec![r.parse("t")?]], vec![r.one()])?;
        for n in 1..=3 {
            let sp = symbolic_power(&pd, 0, n, None)?;
            out.push(Record::check(
                format!(
                    "principal prime (t) in {} variables has P^(n) = P^n",
                    vars.len()
                ),
                n,
                sp.ideal.same_span(&pd.prime(0).power(n)?),
                vec![format!("P^({n}) = ({})", sp.ideal.texts().join(", "))],
            ));
        }
    }
    Ok(out)
}

fn flat_free_a2(inst: &Instance, exec: Exec) -> Result<Vec<Record>, CliError> {
    let (problem, sol, mut out) = posed(inst, exec)?;
    free_of_rank(&problem, &sol, &mut out)?;
    equals_base_image(&problem, &sol, &mut out)?;
    stabilizes_by(&sol, 3, &mut out);
    let own = Candidate::from_solution("solver", &problem, &sol)?;
    let u = check_flat_uniqueness(&problem, &sol, &own, exec)?;
    out.push(Record::check(
        "the solver output is the unique flat solution",
        0,
        u == Uniqueness::Equal,
        vec![match &u {
            Uniqueness::Equal => "EQUAL".to_string(),
            other => format!("{other:?}"),
        }],
    ));
    let ideal = inst.candidate("I", problem.config())?;
    let u = check_flat_uniqueness(&problem, &sol, &ideal, exec)?;
    let w = match &u {
        Uniqueness::RejectedNonflat { level, witness } => format!("level {level}: {witness}"),
        other => format!("{other:?}"),
    };
    out.push(Record::check(
        "the ideal (x, y) is rejected as non-flat",
        0,
        matches!(u, Uniqueness::RejectedNonflat { .. }),
        vec![w],
    ));
    Ok(out)
}
