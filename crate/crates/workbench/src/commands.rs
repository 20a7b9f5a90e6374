//! The workbench commands. Each returns a report; errors are reserved for
//! unusable input and budget exhaustion.

use formalpatch_core::par::Exec;
use formalpatch_core::patch::{
    certify_solution, check_flat_uniqueness, check_maximality, choose_codim2_cover,
    flatness_certificate, make_config, solve as solve_problem, unit_candidate, Candidate,
    Maximality, PatchProblem, PatchSolution, Uniqueness, Verdict,
};
use formalpatch_core::surface::symbolic_power as compute_symbolic_power;
use formalpatch_core::tower::{
    default_pool, q_filtration, stabilization_index, symbolic_containment_bound, verify_tower_laws,
    TowerModule,
};
use formalpatch_core::{Error, FreeVec, Poly};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::CliError;
use crate::instance::Instance;
use crate::report::{Record, Report};

pub const DEFAULT_TOWER_DEPTH: u32 = 5;

/// A posed problem, or the records explaining why it could not be posed.
pub fn pose(
    inst: &Instance,
    depth: Option<u32>,
    exec: Exec,
) -> Result<Result<PatchProblem, Vec<Record>>, CliError> {
    let config = inst.config(depth)?;
    let mut witness = vec![
        format!("f1 = {}", inst.ring().text(config.f1())),
        format!("f2 = {}", inst.ring().text(config.f2())),
    ];
    for (j, c) in config.codimensions.iter().enumerate() {
        witness.push(match c {
            Some(c) => format!("component {}: complement codimension {c}", j + 1),
            None => format!("component {}: complement empty", j + 1),
        });
    }
    witness.extend(config.warnings.iter().cloned());
    let config_record = Record::pass("config", 0, witness);
    match inst.problem(&config, exec)? {
        Ok(p) => Ok(Ok(p)),
        Err(Error::Problem(msg)) => Ok(Err(vec![
            config_record,
            Record::check("problem", 0, false, vec![msg]),
        ])),
        Err(e) => Err(e.into()),
    }
}

fn problem_records(inst: &Instance, problem: &PatchProblem) -> Vec<Record> {
    let mut out = vec![Record::pass(
        "config",
        0,
        vec![
            format!("f1 = {}", inst.ring().text(problem.config().f1())),
            format!("f2 = {}", inst.ring().text(problem.config().f2())),
        ],
    )];
    out.extend(problem.checks.iter().cloned().map(Record::from));
    out
}

fn vec_texts(problem: &PatchProblem, i: u32, v: &[FreeVec]) -> String {
    let r = &problem.level(i).rings.r0;
    v.iter().map(|g| g.text(r)).collect::<Vec<_>>().join(", ")
}

fn maximality_text(problem: &PatchProblem, m: &Maximality) -> Vec<String> {
    let mut w = Vec::new();
    match &m.escape {
        None => w.push("CONTAINED".to_string()),
        Some((i, g)) => w.push(format!(
            "NOT CONTAINED: {} at level {i}",
            vec_texts(problem, *i, std::slice::from_ref(g))
        )),
    }
    match &m.gap {
        Some((i, g)) => w.push(format!(
            "STRICT: {} at level {i}",
            vec_texts(problem, *i, std::slice::from_ref(g))
        )),
        None => w.push("NOT STRICT".to_string()),
    }
    w
}

pub fn solution_records(
    inst: &Instance,
    problem: &PatchProblem,
    sol: &PatchSolution,
) -> Result<Vec<Record>, CliError> {
    let mut out: Vec<Record> = sol.checks.iter().cloned().map(Record::from).collect();
    let names = problem.config().inverse_names();
    for l in &sol.levels {
        let i = l.level;
        let b = &problem.level(i).rings.b;
        let mut w = Vec::new();
        for e in &l.elements {
            let side = |nums: &[Poly]| {
                nums.iter()
                    .map(|p| b.text(p))
                    .collect::<Vec<_>>()
                    .join(", ")
            };
            w.push(format!(
                "generator {} = ({})*{}^{} = ({})*{}^{}",
                e.image.text(&problem.level(i).rings.r0),
                side(&e.left),
                names[0],
                e.d,
                side(&e.right),
                names[1],
                e.d
            ));
        }
        let rels = l.module.relation_vectors();
        if rels.is_empty() {
            w.push("relations: none".to_string());
        } else {
            w.push(format!(
                "relations: {}",
                rels.iter()
                    .map(|v| v.text(b))
                    .collect::<Vec<_>>()
                    .join(", ")
            ));
        }
        let f = flatness_certificate(&l.module, problem.rank())?;
        w.push(match f.witness {
            None => format!("flatness: FLAT of rank {}", problem.rank()),
            Some(x) => format!("flatness: NOT-FLAT, {x}"),
        });
        out.push(Record::pass("solution", i, w));
    }
    let base = unit_candidate(problem, "base");
    let m = check_maximality(problem, sol, &base)?;
    let verdict = if inst.file.demonstration {
        Verdict::Demonstration
    } else {
        Verdict::Pass
    };
    out.push(Record::new(
        "base-image",
        0,
        verdict,
        maximality_text(problem, &m),
    ));
    Ok(out)
}

/// Random `B_i`-combinations of solution generators must be sections over
/// both opens.
fn random_sections(
    problem: &PatchProblem,
    sol: &PatchSolution,
    seed: u64,
) -> Result<Vec<Record>, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for l in &sol.levels {
        let i = l.level;
        let lv = problem.level(i);
        let r0 = &lv.rings.r0;
        let nbase = lv.rings.b.nvars();
        let gens = l.generators();
        let mut bad = None;
        for _ in 0..3 {
            let mut w = FreeVec::zero(gens.first().map_or(0, FreeVec::rank));
            for g in &gens {
                let k: i64 = rng.gen_range(-3..=3);
                let v = rng.gen_range(0..=nbase);
                let mut c = Poly::from_i64(r0.field(), k);
                if v < nbase {
                    let var = r0.var(&lv.rings.b.names()[v]).expect("base variable");
                    c = &c * &r0.var_poly(var);
                }
                w = w.add(&g.scale(&c));
            }
            let w = lv.normalize(&w);
            for e in 1..=2 {
                if problem
                    .local_cofactors(i, e, &w, lv_alpha(problem, i, e))?
                    .is_none()
                {
                    bad = Some(format!("{} is not a section over U{e}", w.text(r0)));
                }
            }
        }
        let mut witness = vec![format!("3 samples, seed {seed}")];
        witness.extend(bad.iter().cloned());
        out.push(Record::check("random-sections", i, bad.is_none(), witness));
    }
    Ok(out)
}

fn lv_alpha(problem: &PatchProblem, i: u32, e: usize) -> &[FreeVec] {
    let lv = problem.level(i);
    if e == 1 {
        &lv.alpha1
    } else {
        &lv.alpha2
    }
}

pub fn schedule(inst: &Instance, dmax: Option<u32>) -> Vec<u32> {
    match dmax {
        Some(d) => (0..=d).collect(),
        None => inst.schedule(),
    }
}

pub fn solve(
    inst: &Instance,
    depth: Option<u32>,
    dmax: Option<u32>,
    seed: u64,
    exec: Exec,
) -> Result<Report, CliError> {
    let problem = match pose(inst, depth, exec)? {
        Ok(p) => p,
        Err(records) => return Ok(Report::new("solve", &inst.name, records)),
    };
    let mut records = problem_records(inst, &problem);
    let sol = solve_problem(&problem, &schedule(inst, dmax), exec)?;
    records.extend(solution_records(inst, &problem, &sol)?);
    records.extend(random_sections(&problem, &sol, seed)?);
    for name in inst.candidate_names() {
        let cand = inst.candidate(&name, problem.config())?;
        let checks = certify_solution(&problem, &cand, exec)?;
        if let Some(bad) = checks.iter().find(|c| c.verdict == Verdict::Fail) {
            records.push(Record::pass(
                format!("candidate[{name}]"),
                0,
                vec![format!(
                    "not a solution: {} fails at level {}",
                    bad.name, bad.level
                )],
            ));
            continue;
        }
        let m = check_maximality(&problem, &sol, &cand)?;
        records.push(Record::check(
            format!("maximality[{name}]"),
            0,
            m.contained,
            maximality_text(&problem, &m),
        ));
    }
    for name in inst.file.elements.keys() {
        let el = inst.element(name, problem.config())?;
        let mut levels_in = Vec::new();
        let mut levels_out = Vec::new();
        for l in &sol.levels {
            let w = problem.at_level(l.level, std::slice::from_ref(&el))?;
            if problem.in_base_span(l.level, &w[0], &l.generators())? {
                levels_in.push(l.level.to_string());
            } else {
                levels_out.push(l.level.to_string());
            }
        }
        let mut w = Vec::new();
        if !levels_in.is_empty() {
            w.push(format!(
                "in the solution at levels {}",
                levels_in.join(", ")
            ));
        }
        if !levels_out.is_empty() {
            w.push(format!(
                "outside the solution at levels {}",
                levels_out.join(", ")
            ));
        }
        records.push(Record::pass(format!("element[{name}]"), 0, w));
    }
    if inst.file.demonstration {
        records.push(Record::new(
            "demonstration",
            0,
            Verdict::Demonstration,
            vec!["the instance deliberately violates the integrality hypothesis".into()],
        ));
    }
    Ok(Report::new("solve", &inst.name, records))
}

pub fn tower_verify(inst: &Instance, depth: Option<u32>, exec: Exec) -> Result<Report, CliError> {
    let spec = inst
        .file
        .tower
        .as_ref()
        .ok_or_else(|| CliError::instance(&inst.source, "tower", "missing key: tower"))?;
    let depth = depth.or(spec.depth).unwrap_or(DEFAULT_TOWER_DEPTH);
    let pool = match &spec.pool {
        Some(p) => inst.polys("tower.pool", p)?,
        None => default_pool(&inst.pd),
    };
    let f = match &spec.localize {
        Some(t) => inst.poly("tower.localize", t)?,
        None => inst.ring().one(),
    };
    let mut records = Vec::new();
    for name in &spec.modules {
        let m = inst.module(name, None)?;
        let ring = m.ring().clone();
        let tower = TowerModule::build(&m, depth, exec)?;
        let filt = q_filtration(&tower, &inst.pd, &pool, exec)?;
        for law in verify_tower_laws(&tower, &filt, &inst.pd, &f, exec)? {
            let mut r = Record::from(law);
            r.name = format!("{name}:{}", r.name);
            records.push(r);
        }
        for ql in &filt.levels {
            let lr = tower.level(ql.level).ring().clone();
            let w: Vec<String> = ql
                .certificates
                .iter()
                .map(|c| format!("{} is killed by {}", c.q.text(&lr), lr.text(&c.f)))
                .collect();
            if !w.is_empty() {
                records.push(Record::pass(format!("{name}:q-torsion"), ql.level, w));
            }
        }
        if depth >= 2 {
            let r = match stabilization_index(&tower, &filt) {
                Ok(n) => Record::pass(
                    format!("{name}:stabilization-index"),
                    depth,
                    vec![format!("n = {n}")],
                ),
                Err(e) => Record::check(
                    format!("{name}:stabilization-index"),
                    depth,
                    false,
                    vec![e.to_string()],
                ),
            };
            records.push(r);
        }
        if let Some(c) = &spec.containment {
            let r = match symbolic_containment_bound(&m, &inst.pd, &pool, c.c, c.nmax) {
                Ok(b) => {
                    let mut w = vec![format!("n = {} for c = {}", b.n, c.c)];
                    if let Some(x) = b.witness {
                        w.push(format!("fails at n = {}: {}", b.n - 1, x.text(&ring)));
                    }
                    Record::pass(format!("{name}:containment-bound"), 0, w)
                }
                Err(Error::Exhausted(msg)) => {
                    Record::check(format!("{name}:containment-bound"), 0, false, vec![msg])
                }
                Err(e) => return Err(e.into()),
            };
            records.push(r);
        }
    }
    Ok(Report::new("tower-verify", &inst.name, records))
}

pub fn symbolic_power(
    inst: &Instance,
    prime: usize,
    n: u32,
    sep: Option<&str>,
) -> Result<Report, CliError> {
    if prime == 0 || prime > inst.pd.len() {
        return Err(CliError::Usage(format!(
            "--prime must lie between 1 and {}",
            inst.pd.len()
        )));
    }
    let ring = inst.ring().clone();
    let sep = sep.map(|s| inst.poly("--sep", s)).transpose()?;
    let sp = compute_symbolic_power(&inst.pd, prime - 1, n, sep.as_ref())?;
    let pn = inst.pd.prime(prime - 1).power(n)?;
    let mut records = vec![
        Record::pass(
            "symbolic-power",
            n,
            vec![
                format!("P{prime}^({n}) = ({})", sp.ideal.texts().join(", ")),
                format!(
                    "saturated by {} with exponent {}",
                    ring.text(&sp.separator),
                    sp.witness
                ),
                sp.caveat.to_string(),
            ],
        ),
        Record::pass(
            "ordinary-power",
            n,
            vec![format!("P{prime}^{n} = ({})", pn.texts().join(", "))],
        ),
    ];
    let extra = sp.ideal.generators().into_iter().find(|g| !pn.contains(g));
    records.push(Record::pass(
        "comparison",
        n,
        vec![match extra {
            None => "EQUAL".to_string(),
            Some(g) => format!(
                "STRICT: {} lies in P{prime}^({n}) but not in P{prime}^{n}",
                ring.text(&g.coords()[0])
            ),
        }],
    ));
    for name in inst.file.base_elements.keys() {
        let p = inst.base_element(name)?;
        let yes = |b: bool| if b { "yes" } else { "no" };
        records.push(Record::pass(
            format!("membership[{name}]"),
            n,
            vec![
                format!(
                    "{} in P{prime}^({n}): {}",
                    ring.text(&p),
                    yes(sp.ideal.contains_poly(&p))
                ),
                format!(
                    "{} in P{prime}^{n}: {}",
                    ring.text(&p),
                    yes(pn.contains_poly(&p))
                ),
            ],
        ));
    }
    Ok(Report::new("symbolic-power", &inst.name, records))
}

pub fn cover(inst: &Instance, pool: &[String]) -> Result<Report, CliError> {
    let pool = inst.polys("--pool", pool)?;
    let ring = inst.ring();
    let inter = inst.intersections()?;
    let records = match choose_codim2_cover(&inst.pd, &pool, &inter) {
        Ok((f1, f2)) => {
            let config = make_config(&inst.base, &inst.pd, &f1, &f2, 1)?;
            let mut w = vec![
                format!("f1 = {}", ring.text(&f1)),
                format!("f2 = {}", ring.text(&f2)),
            ];
            for (j, c) in config.codimensions.iter().enumerate() {
                w.push(match c {
                    Some(c) => format!("component {}: complement codimension {c}", j + 1),
                    None => format!("component {}: complement empty", j + 1),
                });
            }
            vec![Record::pass("cover", 0, w)]
        }
        Err(Error::Exhausted(msg)) => vec![Record::check("cover", 0, false, vec![msg])],
        Err(e) => return Err(e.into()),
    };
    Ok(Report::new("cover", &inst.name, records))
}

pub fn certify(
    inst: &Instance,
    candidate: &str,
    depth: Option<u32>,
    exec: Exec,
) -> Result<Report, CliError> {
    let problem = match pose(inst, depth, exec)? {
        Ok(p) => p,
        Err(records) => return Ok(Report::new("certify", &inst.name, records)),
    };
    let cand: Candidate = inst.candidate(candidate, problem.config())?;
    let mut records: Vec<Record> = certify_solution(&problem, &cand, exec)?
        .into_iter()
        .map(Record::from)
        .collect();
    for i in 1..=problem.depth() {
        let gens = problem.at_level(i, &cand.generators)?;
        let m = problem.present(i, &gens)?;
        let f = flatness_certificate(&m, problem.rank())?;
        records.push(Record::pass(
            "candidate-flatness",
            i,
            vec![match f.witness {
                None => "FLAT".to_string(),
                Some(w) => format!("NOT-FLAT: {w}"),
            }],
        ));
    }
    let sol = solve_problem(&problem, &inst.schedule(), exec)?;
    let certified = records.iter().all(|r| !r.verdict().is_failure());
    if certified {
        let m = check_maximality(&problem, &sol, &cand)?;
        records.push(Record::check(
            "maximality",
            0,
            m.contained,
            maximality_text(&problem, &m),
        ));
        let u = match check_flat_uniqueness(&problem, &sol, &cand, exec) {
            Ok(Uniqueness::Equal) => Record::pass("flat-uniqueness", 0, vec!["EQUAL".into()]),
            Ok(Uniqueness::RejectedNonflat { level, witness }) => Record::pass(
                "flat-uniqueness",
                0,
                vec![format!("REJECTED-NONFLAT at level {level}: {witness}")],
            ),
            Ok(Uniqueness::Different { level, witness }) => Record::check(
                "flat-uniqueness",
                0,
                false,
                vec![format!(
                    "a second flat solution differs at level {level}: {witness}"
                )],
            ),
            Ok(Uniqueness::NotASolution { level, witness }) => Record::check(
                "flat-uniqueness",
                0,
                false,
                vec![format!("level {level}: {witness}")],
            ),
            Err(Error::Invalid(msg)) => {
                Record::pass("flat-uniqueness", 0, vec![format!("not applicable: {msg}")])
            }
            Err(e) => return Err(e.into()),
        };
        records.push(u);
    }
    Ok(Report::new("certify", &inst.name, records))
}
