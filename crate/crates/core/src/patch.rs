//! Patching problems over a two-set basic open cover and their solution as
//! the intersection `α1(M1) ∩ α2(M2)` inside `M0`, level by level.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::groebner::{kernel, span_cofactors, FreeVec, PolyRing, SubmoduleBasis};
use crate::par::Exec;
use crate::poly::Poly;
use crate::surface::{codimension_in, BaseRing, PrimeData};
use crate::tower::{default_pool, fresh_name, q_level, PresModule, TowerModule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Verdict {
    Pass,
    Fail,
    CertifiedAtDepth,
    Unstabilized,
    Demonstration,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::CertifiedAtDepth => "CERTIFIED-AT-DEPTH",
            Verdict::Unstabilized => "UNSTABILIZED",
            Verdict::Demonstration => "DEMONSTRATION",
        }
    }

    pub fn is_failure(self) -> bool {
        matches!(self, Verdict::Fail | Verdict::Unstabilized)
    }
}

/// One certificate outcome.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub level: u32,
    pub verdict: Verdict,
    pub witness: Vec<String>,
}

impl Check {
    fn new(name: &str, level: u32, ok: Verdict, witness: Option<String>) -> Check {
        Check {
            name: name.to_string(),
            level,
            verdict: if witness.is_some() { Verdict::Fail } else { ok },
            witness: witness.into_iter().collect(),
        }
    }
}

/// The rings of one truncation level: `B_i`, `B_i[1/f1]`, `B_i[1/f2]` and
/// `B_i[1/f1, 1/f2]`.
#[derive(Clone, Debug)]
pub struct LevelRings {
    pub level: u32,
    pub b: Arc<PolyRing>,
    pub r1: Arc<PolyRing>,
    pub r2: Arc<PolyRing>,
    pub r0: Arc<PolyRing>,
}

#[derive(Clone, Debug)]
pub struct OpenConfig {
    base: BaseRing,
    pd: PrimeData,
    f1: Poly,
    f2: Poly,
    depth: u32,
    u: [String; 2],
    r1: Arc<PolyRing>,
    r2: Arc<PolyRing>,
    r0: Arc<PolyRing>,
    levels: Vec<LevelRings>,
    /// Codimension of `V(f1, f2)` in each `V(P_j)`; `None` when empty.
    pub codimensions: Vec<Option<usize>>,
    pub warnings: Vec<String>,
}

/// Validate a cover `U_e = D(f_e)` of the formal neighbourhood.
pub fn make_config(
    base: &BaseRing,
    pd: &PrimeData,
    f1: &Poly,
    f2: &Poly,
    depth: u32,
) -> Result<OpenConfig> {
    if depth == 0 {
        return Err(Error::Invalid("depth must be at least 1".into()));
    }
    let ring = base.ring();
    for (e, f) in [f1, f2].into_iter().enumerate() {
        if let Some(j) = pd.containing_prime(f) {
            return Err(Error::Density(format!(
                "f{} = {} lies in P_{}",
                e + 1,
                ring.text(f),
                j + 1
            )));
        }
    }
    let mut codimensions = Vec::new();
    for j in 0..pd.len() {
        let c = codimension_in(pd.prime(j), &[f1.clone(), f2.clone()])?;
        if let Some(c) = c {
            if c < 2 {
                return Err(Error::Codimension(format!(
                    "V({}, {}) has codimension {c} in component {}",
                    ring.text(f1),
                    ring.text(f2),
                    j + 1
                )));
            }
        }
        codimensions.push(c);
    }
    let u1 = fresh_name(ring, "u1");
    let r1 = ring.adjoin_inverse(f1, &u1)?;
    let u2 = fresh_name(&r1, "u2");
    let r2 = ring.adjoin_inverse(f2, &u2)?;
    let r0 = r1.adjoin_inverse(&r1.embed(f2, ring)?, &u2)?;
    let levels = (1..=depth)
        .map(|i| {
            Ok(LevelRings {
                level: i,
                b: ring.truncate(i)?,
                r1: r1.truncate(i)?,
                r2: r2.truncate(i)?,
                r0: r0.truncate(i)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut warnings = Vec::new();
    if pd.len() > 1 {
        warnings.push("connectivity of U_0 is declared, not proven".to_string());
    }
    Ok(OpenConfig {
        base: base.clone(),
        pd: pd.clone(),
        f1: f1.clone(),
        f2: f2.clone(),
        depth,
        u: [u1, u2],
        r1,
        r2,
        r0,
        levels,
        codimensions,
        warnings,
    })
}

impl OpenConfig {
    pub fn base(&self) -> &BaseRing {
        &self.base
    }

    pub fn prime_data(&self) -> &PrimeData {
        &self.pd
    }

    pub fn f1(&self) -> &Poly {
        &self.f1
    }

    pub fn f2(&self) -> &Poly {
        &self.f2
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// Names of the inverses of `f1` and `f2`.
    pub fn inverse_names(&self) -> [&str; 2] {
        [&self.u[0], &self.u[1]]
    }

    /// `B[1/f1]`, `B[1/f2]`, `B[1/(f1 f2)]` before truncation.
    pub fn r1(&self) -> &Arc<PolyRing> {
        &self.r1
    }

    pub fn r2(&self) -> &Arc<PolyRing> {
        &self.r2
    }

    pub fn r0(&self) -> &Arc<PolyRing> {
        &self.r0
    }

    pub fn level(&self, i: u32) -> &LevelRings {
        &self.levels[i as usize - 1]
    }

    /// Pool used for the torsion certificates: the default pool plus the
    /// non-constant cover elements.
    pub fn torsion_pool(&self) -> Vec<Poly> {
        let mut pool = default_pool(&self.pd);
        for f in [&self.f1, &self.f2] {
            if f.as_constant().is_none() && !pool.contains(f) {
                pool.push(f.clone());
            }
        }
        pool
    }

    fn u_index(&self, e: usize) -> usize {
        self.r0.var(&self.u[e]).expect("inverse variable present")
    }
}

/// First pool pair `(f1, f2)`, `f1` before `f2`, that avoids every prime and
/// every listed intersection prime and leaves a codimension-two complement.
pub fn choose_codim2_cover(
    pd: &PrimeData,
    pool: &[Poly],
    intersections: &[Vec<Poly>],
) -> Result<(Poly, Poly)> {
    let ring = pd.base();
    let avoid = intersections
        .iter()
        .map(|g| SubmoduleBasis::ideal(ring.clone(), g))
        .collect::<Result<Vec<_>>>()?;
    let usable: Vec<bool> = pool
        .iter()
        .map(|f| pd.containing_prime(f).is_none() && avoid.iter().all(|p| !p.contains_poly(f)))
        .collect();
    for a in 0..pool.len() {
        for b in a..pool.len() {
            if !usable[a] || !usable[b] {
                continue;
            }
            let mut ok = true;
            for j in 0..pd.len() {
                if let Some(c) = codimension_in(pd.prime(j), &[pool[a].clone(), pool[b].clone()])? {
                    if c < 2 {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                return Ok((pool[a].clone(), pool[b].clone()));
            }
        }
    }
    Err(Error::Exhausted(
        "no pool pair gives a codimension-two cover".into(),
    ))
}

/// The problem data truncated to one level.
#[derive(Clone, Debug)]
pub struct ProblemLevel {
    pub rings: LevelRings,
    pub m1: PresModule,
    pub m2: PresModule,
    pub m0: PresModule,
    /// `α_e(e_k)` in `M0` coordinates over `R0_i`.
    pub alpha1: Vec<FreeVec>,
    pub alpha2: Vec<FreeVec>,
    rel0: Vec<FreeVec>,
}

impl ProblemLevel {
    pub fn level(&self) -> u32 {
        self.rings.level
    }

    fn rel0_basis(&self) -> &SubmoduleBasis {
        self.m0.relations()
    }

    fn alpha(&self, e: usize) -> &[FreeVec] {
        if e == 0 {
            &self.alpha1
        } else {
            &self.alpha2
        }
    }

    fn r_e(&self, e: usize) -> &Arc<PolyRing> {
        if e == 0 {
            &self.rings.r1
        } else {
            &self.rings.r2
        }
    }

    fn m_e(&self, e: usize) -> &PresModule {
        if e == 0 {
            &self.m1
        } else {
            &self.m2
        }
    }

    /// Canonical representative of an `M0` element.
    pub fn normalize(&self, w: &FreeVec) -> FreeVec {
        self.rel0_basis().normal_form(&w.reduce_in(&self.rings.r0))
    }
}

#[derive(Clone, Debug)]
pub struct PatchProblem {
    config: OpenConfig,
    rank: usize,
    levels: Vec<ProblemLevel>,
    pub checks: Vec<Check>,
}

fn as_submodule(v: &[FreeVec], ring: &Arc<PolyRing>, rank: usize) -> Result<SubmoduleBasis> {
    SubmoduleBasis::with_default_order(ring.clone(), rank, v)
}

/// Threefold torsion certificate on consecutive levels of one module:
/// `t`-regularity, vanishing `Q`, and injectivity into the component-wise
/// localisations.
pub fn torsion_certificate(
    name: &str,
    levels: &[PresModule],
    pd: &PrimeData,
    pool: &[Poly],
    exec: Exec,
) -> Result<Vec<Check>> {
    let n = levels.len();
    let per_level = exec.try_map((0..n).collect(), |k| -> Result<Vec<Check>> {
        let m = &levels[k];
        let i = k as u32 + 1;
        let ring = m.ring();
        let mut out = Vec::new();
        if k + 1 < n {
            let next = &levels[k + 1];
            let nr = next.ring();
            let t = nr.t_poly().expect("level ring has t");
            let colon = next.relations().quotient_poly(&t)?;
            let ti = t.pow(i);
            let expected = next.relations().add_generators(
                &(0..next.ngens())
                    .map(|j| next.generator(j).scale(&ti))
                    .collect::<Vec<_>>(),
            )?;
            let w = colon
                .generators()
                .into_iter()
                .find(|g| !expected.contains(g))
                .map(|g| {
                    format!(
                        "{} is t-torsion in level {} but not in t^{i}",
                        g.text(nr),
                        i + 1
                    )
                });
            out.push(Check::new(
                &format!("{name}-torsion-t-regular"),
                i,
                Verdict::CertifiedAtDepth,
                w,
            ));
        }
        let q = q_level(m, i, pool, pd)?;
        let w =
            q.q.generators()
                .into_iter()
                .find(|g| !m.relations().contains(g))
                .map(|g| format!("{} lies in Q_{i}", g.text(ring)));
        out.push(Check::new(
            &format!("{name}-torsion-q-vanishing"),
            i,
            Verdict::CertifiedAtDepth,
            w,
        ));
        let mut acc: Option<SubmoduleBasis> = None;
        for rho in pd.separators() {
            let rho = ring.embed(rho, pd.base())?;
            let sat = if rho.as_constant().is_some() {
                m.relations().clone()
            } else {
                m.relations().saturate(&rho)?.0
            };
            acc = Some(match acc {
                None => sat,
                Some(a) => a.intersect(&sat)?,
            });
        }
        let w = acc.and_then(|a| {
            a.generators()
                .into_iter()
                .find(|g| !m.relations().contains(g))
                .map(|g| format!("{} vanishes on every component", g.text(ring)))
        });
        out.push(Check::new(
            &format!("{name}-torsion-components"),
            i,
            Verdict::CertifiedAtDepth,
            w,
        ));
        Ok(out)
    })?;
    Ok(per_level.into_iter().flatten().collect())
}

/// Validate `α_e : M_e ⊗ R0 → M0` at every level and certify the torsion
/// conditions of the three modules.
#[allow(clippy::too_many_arguments)]
pub fn pose_problem(
    config: &OpenConfig,
    m1: &PresModule,
    m2: &PresModule,
    m0: &PresModule,
    alpha1: &[FreeVec],
    alpha2: &[FreeVec],
    rank: usize,
    exec: Exec,
) -> Result<PatchProblem> {
    for (name, m, r) in [
        ("M1", m1, &config.r1),
        ("M2", m2, &config.r2),
        ("M0", m0, &config.r0),
    ] {
        if **m.ring() != **r {
            return Err(Error::Problem(format!(
                "{name} is not presented over its cover ring"
            )));
        }
    }
    for (e, (alpha, m)) in [(alpha1, m1), (alpha2, m2)].into_iter().enumerate() {
        if alpha.len() != m.ngens() {
            return Err(Error::Problem(format!(
                "α{} has {} images for {} generators",
                e + 1,
                alpha.len(),
                m.ngens()
            )));
        }
        if alpha.iter().any(|v| v.rank() != m0.ngens()) {
            return Err(Error::Problem(format!(
                "α{} images have the wrong rank",
                e + 1
            )));
        }
    }
    if rank > m0.ngens() {
        return Err(Error::Rank(format!(
            "rank {rank} exceeds the generators of M0"
        )));
    }
    let levels = exec.try_map((1..=config.depth).collect(), |i| -> Result<ProblemLevel> {
        let rings = config.level(i).clone();
        let lm1 = m1.over(rings.r1.clone())?;
        let lm2 = m2.over(rings.r2.clone())?;
        let lm0 = m0.over(rings.r0.clone())?;
        let map = |a: &[FreeVec]| -> Result<Vec<FreeVec>> {
            a.iter()
                .map(|v| {
                    Ok(lm0
                        .relations()
                        .normal_form(&v.embed(&rings.r0, &config.r0)?.reduce_in(&rings.r0)))
                })
                .collect()
        };
        let a1 = map(alpha1)?;
        let a2 = map(alpha2)?;
        let rel0 = lm0.relation_vectors();
        Ok(ProblemLevel {
            rings,
            m1: lm1,
            m2: lm2,
            m0: lm0,
            alpha1: a1,
            alpha2: a2,
            rel0,
        })
    })?;
    let mut checks = Vec::new();
    for lv in &levels {
        let i = lv.level();
        let r0 = &lv.rings.r0;
        for e in 0..2 {
            let image = lv.rel0_basis().add_generators(lv.alpha(e))?;
            let w = (0..lv.m0.ngens())
                .map(|j| lv.m0.generator(j))
                .find(|g| !image.contains(g))
                .map(|g| format!("{} is not in the image of α{}", g.text(r0), e + 1));
            if let Some(w) = w {
                return Err(Error::Problem(format!("level {i}: {w}")));
            }
            checks.push(Check::new(
                &format!("alpha{}-surjective", e + 1),
                i,
                Verdict::Pass,
                None,
            ));
            let other = config.u_index(1 - e);
            let ker = kernel(r0, lv.alpha(e), &lv.rel0, &[other])?;
            let r_e = lv.r_e(e);
            let m_e = lv.m_e(e);
            for v in ker {
                let v = v.embed(r_e, r0)?;
                if !m_e.relations().contains(&v) {
                    return Err(Error::Problem(format!(
                        "level {i}: α{} is not injective on M{}: {} maps to zero",
                        e + 1,
                        e + 1,
                        v.text(r_e)
                    )));
                }
            }
            checks.push(Check::new(
                &format!("alpha{}-injective", e + 1),
                i,
                Verdict::Pass,
                None,
            ));
        }
    }
    let pool = config.torsion_pool();
    for (name, pick) in [("m1", 0usize), ("m2", 1), ("m0", 2)] {
        let mods: Vec<PresModule> = levels
            .iter()
            .map(|l| match pick {
                0 => l.m1.clone(),
                1 => l.m2.clone(),
                _ => l.m0.clone(),
            })
            .collect();
        let tc = torsion_certificate(name, &mods, &config.pd, &pool, exec)?;
        if let Some(bad) = tc.iter().find(|c| c.verdict == Verdict::Fail) {
            return Err(Error::Problem(format!(
                "level {}: {} fails: {}",
                bad.level,
                bad.name,
                bad.witness.join("; ")
            )));
        }
        checks.extend(tc);
    }
    Ok(PatchProblem {
        config: config.clone(),
        rank,
        levels,
        checks,
    })
}

impl PatchProblem {
    pub fn config(&self) -> &OpenConfig {
        &self.config
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn depth(&self) -> u32 {
        self.config.depth
    }

    pub fn level(&self, i: u32) -> &ProblemLevel {
        &self.levels[i as usize - 1]
    }

    fn u_vars(&self) -> [usize; 2] {
        [self.config.u_index(0), self.config.u_index(1)]
    }

    /// Express elements of the untruncated `M0` at level `i`.
    pub fn at_level(&self, i: u32, gens: &[FreeVec]) -> Result<Vec<FreeVec>> {
        let lv = self.level(i);
        gens.iter()
            .map(|g| Ok(lv.normalize(&g.embed(&lv.rings.r0, &self.config.r0)?)))
            .collect()
    }

    /// Coefficients over `B_i` expressing `w` through `gens` inside `M0_i`.
    pub fn base_cofactors(
        &self,
        i: u32,
        w: &FreeVec,
        gens: &[FreeVec],
    ) -> Result<Option<Vec<Poly>>> {
        let lv = self.level(i);
        span_cofactors(&lv.rings.r0, w, gens, &lv.rel0, &self.u_vars(), &lv.rings.b)
    }

    pub fn in_base_span(&self, i: u32, w: &FreeVec, gens: &[FreeVec]) -> Result<bool> {
        Ok(self.base_cofactors(i, w, gens)?.is_some())
    }

    /// Coefficients over `R_{e,i}` (`e` = 1 or 2).
    pub fn local_cofactors(
        &self,
        i: u32,
        e: usize,
        w: &FreeVec,
        gens: &[FreeVec],
    ) -> Result<Option<Vec<Poly>>> {
        let lv = self.level(i);
        let other = self.config.u_index(2 - e);
        span_cofactors(&lv.rings.r0, w, gens, &lv.rel0, &[other], lv.r_e(e - 1))
    }

    /// The `B_i`-module spanned by `gens` inside `M0_i`, presented by its
    /// generators and their relations over `B_i`.
    pub fn present(&self, i: u32, gens: &[FreeVec]) -> Result<PresModule> {
        let lv = self.level(i);
        let b = &lv.rings.b;
        let ker = if gens.is_empty() {
            Vec::new()
        } else {
            kernel(&lv.rings.r0, gens, &lv.rel0, &self.u_vars())?
        };
        let rels = ker
            .iter()
            .map(|v| v.embed(b, &lv.rings.r0))
            .collect::<Result<Vec<_>>>()?;
        PresModule::new(b.clone(), gens.len(), &rels)
    }
}

/// A pair `(a / f1^d, b / f2^d)` agreeing in `M0`, with the common image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatchElement {
    pub d: u32,
    /// Numerator coefficients on the generators of `M1`, over `B_i`.
    pub left: Vec<Poly>,
    /// Numerator coefficients on the generators of `M2`, over `B_i`.
    pub right: Vec<Poly>,
    /// Image in `M0_i`, in normal form.
    pub image: FreeVec,
}

#[derive(Clone, Debug)]
pub struct FiberProduct {
    pub level: u32,
    pub d: u32,
    pub elements: Vec<PatchElement>,
}

impl FiberProduct {
    pub fn images(&self) -> Vec<FreeVec> {
        self.elements.iter().map(|e| e.image.clone()).collect()
    }
}

/// Pairs with denominators bounded by `f1^D`, `f2^D` that agree in `M0_i`.
pub fn fiber_product_level(problem: &PatchProblem, i: u32, d: u32) -> Result<FiberProduct> {
    let lv = problem.level(i);
    let r0 = &lv.rings.r0;
    let b = &lv.rings.b;
    let f1 = r0.embed(&problem.config.f1, problem.config.base.ring())?;
    let f2 = r0.embed(&problem.config.f2, problem.config.base.ring())?;
    let f1d = f1.pow(d);
    let f2d = f2.pow(d);
    let minus_f1d = -&f1d;
    let mut images: Vec<FreeVec> = lv.alpha1.iter().map(|v| v.scale(&f2d)).collect();
    images.extend(lv.alpha2.iter().map(|v| v.scale(&minus_f1d)));
    let ker = kernel(r0, &images, &lv.rel0, &problem.u_vars())?;
    let s1 = lv.alpha1.len();
    let [u1, _] = problem.u_vars();
    let u1d = r0.var_poly(u1).pow(d);
    let mut seen = BTreeSet::new();
    let mut elements = Vec::new();
    for v in ker {
        let coords = v.coords();
        let mut w = FreeVec::zero(lv.m0.ngens());
        for (k, a) in coords[..s1].iter().enumerate() {
            w = w.add(&lv.alpha1[k].scale(a));
        }
        let w = lv.normalize(&w.scale(&u1d));
        if w.is_zero() {
            continue;
        }
        let key = w.text(r0);
        if !seen.insert(key) {
            continue;
        }
        let to_b = |p: &Poly| b.embed(p, r0).map(|q| b.reduce(&q));
        elements.push(PatchElement {
            d,
            left: coords[..s1].iter().map(to_b).collect::<Result<_>>()?,
            right: coords[s1..].iter().map(to_b).collect::<Result<_>>()?,
            image: w,
        });
    }
    Ok(FiberProduct {
        level: i,
        d,
        elements,
    })
}

/// The solution at one level.
#[derive(Clone, Debug)]
pub struct LevelSolution {
    pub level: u32,
    /// Schedule value at which two consecutive rounds agreed.
    pub d_stable: Option<u32>,
    /// Least denominator bound reaching the final span.
    pub d_min: u32,
    /// `(D, number of fiber-product generators)` per round.
    pub trace: Vec<(u32, usize)>,
    pub elements: Vec<PatchElement>,
    pub module: PresModule,
}

impl LevelSolution {
    pub fn generators(&self) -> Vec<FreeVec> {
        self.elements.iter().map(|e| e.image.clone()).collect()
    }

    /// `γ_e` images over `R_{e,i}`: `u_e^d · numerator`.
    pub fn gamma(&self, problem: &PatchProblem, e: usize) -> Result<Vec<FreeVec>> {
        let lv = problem.level(self.level);
        let ring = lv.r_e(e - 1);
        let name = problem.config.inverse_names()[e - 1];
        let u = ring.var_poly(ring.var(name).expect("inverse variable"));
        let b = &lv.rings.b;
        self.elements
            .iter()
            .map(|el| {
                let nums = if e == 1 { &el.left } else { &el.right };
                let ud = u.pow(el.d);
                let coords = nums
                    .iter()
                    .map(|p| Ok(ring.reduce(&(&ring.embed(p, b)? * &ud))))
                    .collect::<Result<Vec<_>>>()?;
                Ok(FreeVec::new(coords))
            })
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct PatchSolution {
    pub levels: Vec<LevelSolution>,
    pub tower: TowerModule,
    pub stabilized: bool,
    pub checks: Vec<Check>,
}

impl PatchSolution {
    pub fn level(&self, i: u32) -> &LevelSolution {
        &self.levels[i as usize - 1]
    }

    pub fn depth(&self) -> u32 {
        self.levels.len() as u32
    }
}

fn span_contains(
    problem: &PatchProblem,
    i: u32,
    sub: &[FreeVec],
    gens: &[FreeVec],
) -> Result<Option<FreeVec>> {
    for w in sub {
        if !problem.in_base_span(i, w, gens)? {
            return Ok(Some(w.clone()));
        }
    }
    Ok(None)
}

fn prune(problem: &PatchProblem, i: u32, elements: Vec<PatchElement>) -> Result<Vec<PatchElement>> {
    let ring = &problem.level(i).rings.r0;
    let key = |e: &PatchElement| (e.image.total_degree().unwrap_or(0), e.image.text(ring));
    let mut sorted = elements;
    sorted.sort_by_key(|e| std::cmp::Reverse(key(e)));
    let mut keep = vec![true; sorted.len()];
    for k in 0..sorted.len() {
        let rest: Vec<FreeVec> = sorted
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != k && keep[*j])
            .map(|(_, e)| e.image.clone())
            .collect();
        if problem.in_base_span(i, &sorted[k].image, &rest)? {
            keep[k] = false;
        }
    }
    let mut out: Vec<PatchElement> = sorted
        .into_iter()
        .zip(keep)
        .filter_map(|(e, k)| k.then_some(e))
        .collect();
    out.sort_by_key(key);
    Ok(out)
}

fn solve_level(problem: &PatchProblem, i: u32, schedule: &[u32]) -> Result<LevelSolution> {
    let mut trace = Vec::new();
    let mut rounds: Vec<FiberProduct> = Vec::new();
    let mut d_stable = None;
    for &d in schedule {
        let fp = fiber_product_level(problem, i, d)?;
        trace.push((d, fp.elements.len()));
        if let Some(prev) = rounds.last() {
            if span_contains(problem, i, &fp.images(), &prev.images())?.is_none() {
                d_stable = Some(prev.d);
                rounds.push(fp);
                break;
            }
        }
        rounds.push(fp);
    }
    let last = rounds.last().expect("schedule is nonempty");
    let target = match d_stable {
        Some(d) => rounds.iter().find(|r| r.d == d).expect("stable round"),
        None => last,
    };
    let target_images = target.images();
    let mut chosen = None;
    for d in 0..target.d {
        let fp = match rounds.iter().find(|r| r.d == d) {
            Some(r) => r.clone(),
            None => fiber_product_level(problem, i, d)?,
        };
        if span_contains(problem, i, &target_images, &fp.images())?.is_none() {
            chosen = Some(fp);
            break;
        }
    }
    let chosen = chosen.unwrap_or_else(|| target.clone());
    let d_min = chosen.d;
    let elements = prune(problem, i, chosen.elements)?;
    let gens: Vec<FreeVec> = elements.iter().map(|e| e.image.clone()).collect();
    let module = problem.present(i, &gens)?;
    Ok(LevelSolution {
        level: i,
        d_stable,
        d_min,
        trace,
        elements,
        module,
    })
}

/// Span equality over `R_e` and commutation of the diagram for candidate
/// generators at one level.
fn certify_level(problem: &PatchProblem, i: u32, gens: &[FreeVec]) -> Result<Vec<Check>> {
    let lv = problem.level(i);
    let r0 = &lv.rings.r0;
    let mut out = Vec::new();
    let mut lifts: [Vec<Option<Vec<Poly>>>; 2] = [Vec::new(), Vec::new()];
    for e in 1..=2usize {
        let alpha = lv.alpha(e - 1);
        let mut w = None;
        for (k, a) in alpha.iter().enumerate() {
            if problem.local_cofactors(i, e, a, gens)?.is_none() {
                w = Some(format!(
                    "α{e}(e{}) = {} is outside the R{e}-span",
                    k + 1,
                    a.text(r0)
                ));
                break;
            }
        }
        out.push(Check::new(
            &format!("gamma{e}-surjective"),
            i,
            Verdict::Pass,
            w,
        ));
        let mut w = None;
        for g in gens {
            let c = problem.local_cofactors(i, e, g, alpha)?;
            if c.is_none() && w.is_none() {
                w = Some(format!("{} is not a section over U{e}", g.text(r0)));
            }
            let c = match c {
                Some(c) => Some(
                    c.iter()
                        .map(|p| r0.embed(p, lv.r_e(e - 1)))
                        .collect::<Result<Vec<_>>>()?,
                ),
                None => None,
            };
            lifts[e - 1].push(c);
        }
        out.push(Check::new(&format!("gamma{e}-into"), i, Verdict::Pass, w));
    }
    let mut w = None;
    for (k, g) in gens.iter().enumerate() {
        let (Some(c1), Some(c2)) = (&lifts[0][k], &lifts[1][k]) else {
            w = Some(format!("{} has no lift to both opens", g.text(r0)));
            break;
        };
        let img = |alpha: &[FreeVec], c: &[Poly]| {
            let mut v = FreeVec::zero(g.rank());
            for (a, x) in alpha.iter().zip(c) {
                v = v.add(&a.scale(x));
            }
            lv.normalize(&v)
        };
        let v1 = img(&lv.alpha1, c1);
        let v2 = img(&lv.alpha2, c2);
        if v1 != v2 || v1 != lv.normalize(g) {
            w = Some(format!("α1γ1 and α2γ2 differ on {}", g.text(r0)));
            break;
        }
    }
    out.push(Check::new("commutation", i, Verdict::Pass, w));
    Ok(out)
}

/// Solve level by level with the given increasing denominator schedule.
pub fn solve(problem: &PatchProblem, schedule: &[u32], exec: Exec) -> Result<PatchSolution> {
    if schedule.is_empty() {
        return Err(Error::Invalid("empty denominator schedule".into()));
    }
    if schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Invalid("denominator schedule must increase".into()));
    }
    let depth = problem.depth();
    let levels = exec.try_map((1..=depth).collect(), |i| solve_level(problem, i, schedule))?;
    let stabilized = levels.iter().all(|l| l.d_stable.is_some());
    let deep = levels.last().expect("depth at least 1");
    let tower = TowerModule::build(&deep.module, depth, exec)?;

    let mut checks = Vec::new();
    for l in &levels {
        let trace: Vec<String> = l
            .trace
            .iter()
            .map(|(d, n)| format!("D={d}: {n} generators"))
            .collect();
        let (verdict, mut witness) = match l.d_stable {
            Some(d) => (
                Verdict::Pass,
                vec![format!("stable at D={d}, minimal D={}", l.d_min)],
            ),
            None => (
                Verdict::Unstabilized,
                vec!["schedule exhausted".to_string()],
            ),
        };
        witness.extend(trace);
        checks.push(Check {
            name: "stabilization".into(),
            level: l.level,
            verdict,
            witness,
        });
    }
    let certs = exec.try_map((1..=depth).collect(), |i| -> Result<Vec<Check>> {
        let sol = &levels[i as usize - 1];
        let mut out = certify_level(problem, i, &sol.generators())?;
        out.extend(solution_level_checks(problem, &levels, i)?);
        Ok(out)
    })?;
    checks.extend(certs.into_iter().flatten());
    let mods: Vec<PresModule> = levels.iter().map(|l| l.module.clone()).collect();
    checks.extend(torsion_certificate(
        "solution",
        &mods,
        &problem.config.pd,
        &problem.config.torsion_pool(),
        exec,
    )?);
    checks.sort_by(|a, b| (&a.name, a.level).cmp(&(&b.name, b.level)));
    Ok(PatchSolution {
        levels,
        tower,
        stabilized,
        checks,
    })
}

/// Level coherence and injectivity of `M / t^i M → M'_i`, where `M` is the
/// deepest level.
fn solution_level_checks(
    problem: &PatchProblem,
    levels: &[LevelSolution],
    i: u32,
) -> Result<Vec<Check>> {
    let lv = problem.level(i);
    let r0 = &lv.rings.r0;
    let here = levels[i as usize - 1].generators();
    let mut out = Vec::new();
    if i >= 2 {
        let below = problem.level(i - 1);
        let down: Vec<FreeVec> = here
            .iter()
            .map(|g| Ok(below.normalize(&g.embed(&below.rings.r0, r0)?)))
            .collect::<Result<_>>()?;
        let lower = levels[i as usize - 2].generators();
        let w = match span_contains(problem, i - 1, &lower, &down)? {
            Some(g) => Some(format!(
                "{} is not hit from level {i}",
                g.text(&below.rings.r0)
            )),
            None => span_contains(problem, i - 1, &down, &lower)?
                .map(|g| format!("{} escapes level {}", g.text(&below.rings.r0), i - 1)),
        };
        out.push(Check::new("level-coherence", i, Verdict::Pass, w));
    }
    let deep = levels.last().expect("levels");
    let d = deep.level;
    let deep_ring = &problem.level(d).rings.r0;
    let gens: Vec<FreeVec> = deep
        .generators()
        .iter()
        .map(|g| Ok(lv.normalize(&g.embed(r0, deep_ring)?)))
        .collect::<Result<_>>()?;
    let b = &lv.rings.b;
    let deep_rels = deep
        .module
        .relation_vectors()
        .iter()
        .map(|v| v.embed(b, deep.module.ring()))
        .collect::<Result<Vec<_>>>()?;
    let rels = as_submodule(&deep_rels, b, gens.len())?;
    let mut w = None;
    if !gens.is_empty() {
        for v in kernel(r0, &gens, &lv.rel0, &problem.u_vars())? {
            let v = v.embed(b, r0)?;
            if !rels.contains(&v) {
                w = Some(format!("{} lies in the kernel", v.text(b)));
                break;
            }
        }
    }
    if w.is_none() {
        if let Some(g) = span_contains(problem, i, &here, &gens)? {
            w = Some(format!(
                "{} is not in the image of the deepest level",
                g.text(r0)
            ));
        }
    }
    out.push(Check::new("level-injectivity", i, Verdict::Pass, w));
    Ok(out)
}

/// A proposed solution given by generators in `M0` coordinates.
#[derive(Clone, Debug)]
pub struct Candidate {
    pub name: String,
    pub generators: Vec<FreeVec>,
}

impl Candidate {
    pub fn new(name: &str, generators: Vec<FreeVec>) -> Candidate {
        Candidate {
            name: name.to_string(),
            generators,
        }
    }

    /// The solver output, as generators of its deepest level.
    pub fn from_solution(
        name: &str,
        problem: &PatchProblem,
        sol: &PatchSolution,
    ) -> Result<Candidate> {
        let deep = sol.levels.last().expect("levels");
        let lv = problem.level(deep.level);
        let gens = deep
            .generators()
            .iter()
            .map(|g| g.embed(problem.config.r0(), &lv.rings.r0))
            .collect::<Result<Vec<_>>>()?;
        Ok(Candidate::new(name, gens))
    }

    /// Every generator multiplied by `f`.
    pub fn scaled(&self, name: &str, f: &Poly) -> Candidate {
        Candidate::new(name, self.generators.iter().map(|g| g.scale(f)).collect())
    }
}

/// Span equality and commutation for a candidate at every level.
pub fn certify_solution(
    problem: &PatchProblem,
    candidate: &Candidate,
    exec: Exec,
) -> Result<Vec<Check>> {
    let per = exec.try_map((1..=problem.depth()).collect(), |i| {
        let gens = problem.at_level(i, &candidate.generators)?;
        certify_level(problem, i, &gens)
    })?;
    let mut out: Vec<Check> = per.into_iter().flatten().collect();
    out.sort_by(|a, b| (&a.name, a.level).cmp(&(&b.name, b.level)));
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Maximality {
    pub contained: bool,
    pub strict: bool,
    /// `(level, candidate generator)` outside the solution.
    pub escape: Option<(u32, FreeVec)>,
    /// `(level, solution generator)` outside the candidate.
    pub gap: Option<(u32, FreeVec)>,
}

/// Whether the candidate lies inside the solution at every level, and
/// whether the inclusion is strict somewhere.
pub fn check_maximality(
    problem: &PatchProblem,
    solution: &PatchSolution,
    candidate: &Candidate,
) -> Result<Maximality> {
    let mut escape = None;
    let mut gap = None;
    for l in &solution.levels {
        let i = l.level;
        let cand = problem.at_level(i, &candidate.generators)?;
        let sol = l.generators();
        if escape.is_none() {
            escape = span_contains(problem, i, &cand, &sol)?.map(|g| (i, g));
        }
        if gap.is_none() {
            gap = span_contains(problem, i, &sol, &cand)?.map(|g| (i, g));
        }
    }
    Ok(Maximality {
        contained: escape.is_none(),
        strict: gap.is_some(),
        escape,
        gap,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Flatness {
    pub flat: bool,
    /// `Fitt_{r-1}` generators (empty when zero).
    pub lower: Vec<String>,
    /// `Fitt_r` reduced basis.
    pub upper: Vec<String>,
    pub witness: Option<String>,
}

fn det(m: &[Vec<Poly>], ring: &PolyRing) -> Poly {
    let n = m.len();
    if n == 0 {
        return ring.one();
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = Poly::zero();
    for c in 0..n {
        if m[0][c].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Poly>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(k, _)| *k != c)
                    .map(|(_, p)| p.clone())
                    .collect()
            })
            .collect();
        let term = &m[0][c] * &det(&minor, ring);
        acc = if c % 2 == 0 {
            &acc + &term
        } else {
            &acc - &term
        };
    }
    ring.reduce(&acc)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in start..n {
            cur.push(x);
            go(x + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// `Fitt_k(M)`: the ideal of `(g - k)`-minors of the relation matrix.
pub fn fitting_ideal(m: &PresModule, k: usize) -> Result<SubmoduleBasis> {
    let ring = m.ring();
    let g = m.ngens();
    if k >= g {
        return SubmoduleBasis::ideal(ring.clone(), &[ring.one()]);
    }
    let size = g - k;
    let rows: Vec<Vec<Poly>> = m
        .relation_vectors()
        .into_iter()
        .map(|v| v.into_coords())
        .filter(|r| r.iter().any(|p| !ring.is_zero(p)))
        .collect();
    let mut minors = Vec::new();
    if rows.len() >= size {
        for rs in combinations(rows.len(), size) {
            for cs in combinations(g, size) {
                let sub: Vec<Vec<Poly>> = rs
                    .iter()
                    .map(|&r| cs.iter().map(|&c| rows[r][c].clone()).collect())
                    .collect();
                let d = det(&sub, ring);
                if !d.is_zero() {
                    minors.push(d);
                }
            }
        }
    }
    SubmoduleBasis::ideal(ring.clone(), &minors)
}

/// Local freeness of rank `r` via `Fitt_{r-1} = 0` and `Fitt_r = (1)`.
pub fn flatness_certificate(m: &PresModule, r: usize) -> Result<Flatness> {
    if r > m.ngens() {
        return Err(Error::Rank(format!(
            "rank {r} exceeds {} generators",
            m.ngens()
        )));
    }
    let lower = if r == 0 {
        None
    } else {
        Some(fitting_ideal(m, r - 1)?)
    };
    let upper = fitting_ideal(m, r)?;
    let lower_zero = lower.as_ref().is_none_or(|l| l.is_zero());
    let upper_unit = upper.is_full();
    let lower_texts = lower.map(|l| l.texts()).unwrap_or_default();
    let upper_texts = upper.texts();
    let witness = if !lower_zero {
        Some(format!(
            "Fitt_{} = ({}) is not zero",
            r - 1,
            lower_texts.join(", ")
        ))
    } else if !upper_unit {
        Some(format!(
            "Fitt_{r} = ({}) is not the unit ideal",
            upper_texts.join(", ")
        ))
    } else {
        None
    };
    Ok(Flatness {
        flat: witness.is_none(),
        lower: lower_texts,
        upper: upper_texts,
        witness,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Uniqueness {
    Equal,
    /// A flat solution with a different span at `level`.
    Different {
        level: u32,
        witness: String,
    },
    RejectedNonflat {
        level: u32,
        witness: String,
    },
    /// The candidate fails certification.
    NotASolution {
        level: u32,
        witness: String,
    },
}

/// Compare a flat candidate with a flat solver output.
pub fn check_flat_uniqueness(
    problem: &PatchProblem,
    solution: &PatchSolution,
    candidate: &Candidate,
    exec: Exec,
) -> Result<Uniqueness> {
    for l in &solution.levels {
        let f = flatness_certificate(&l.module, problem.rank)?;
        if !f.flat {
            return Err(Error::Invalid(format!(
                "solution is not flat at level {}: {}",
                l.level,
                f.witness.unwrap_or_default()
            )));
        }
    }
    for i in 1..=problem.depth() {
        let gens = problem.at_level(i, &candidate.generators)?;
        let m = problem.present(i, &gens)?;
        let f = flatness_certificate(&m, problem.rank)?;
        if let Some(w) = f.witness {
            return Ok(Uniqueness::RejectedNonflat {
                level: i,
                witness: w,
            });
        }
    }
    if let Some(bad) = certify_solution(problem, candidate, exec)?
        .into_iter()
        .find(|c| c.verdict == Verdict::Fail)
    {
        return Ok(Uniqueness::NotASolution {
            level: bad.level,
            witness: format!("{}: {}", bad.name, bad.witness.join("; ")),
        });
    }
    let m = check_maximality(problem, solution, candidate)?;
    if let Some((level, g)) = m.escape.or(m.gap) {
        return Ok(Uniqueness::Different {
            level,
            witness: g.text(&problem.level(level).rings.r0),
        });
    }
    Ok(Uniqueness::Equal)
}

/// Generators of `M0` at every level, for the base image of a ring problem.
pub fn unit_candidate(problem: &PatchProblem, name: &str) -> Candidate {
    let r0 = problem.config.r0();
    let n = problem.level(1).m0.ngens();
    Candidate::new(
        name,
        (0..n).map(|j| FreeVec::unit(n, j, r0.field())).collect(),
    )
}
