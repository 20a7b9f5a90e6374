//! Finite-depth `t`-adic towers of presented modules and their Q/N
//! filtration.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::groebner::{FreeVec, PolyRing, SubmoduleBasis};
use crate::par::Exec;
use crate::poly::{Monomial, Poly};
use crate::surface::PrimeData;

/// `R^g / relations` over a presented ring.
#[derive(Clone, Debug)]
pub struct PresModule {
    ring: Arc<PolyRing>,
    ngens: usize,
    relations: SubmoduleBasis,
}

impl PresModule {
    pub fn new(ring: Arc<PolyRing>, ngens: usize, relations: &[FreeVec]) -> Result<Self> {
        let rel = SubmoduleBasis::with_default_order(ring.clone(), ngens, relations)?;
        Ok(PresModule {
            ring,
            ngens,
            relations: rel,
        })
    }

    pub fn from_relations(relations: SubmoduleBasis) -> Self {
        PresModule {
            ring: relations.ring().clone(),
            ngens: relations.rank(),
            relations,
        }
    }

    /// Relations given as coordinate texts, one row per relation.
    pub fn parse(ring: Arc<PolyRing>, ngens: usize, relations: &[Vec<&str>]) -> Result<Self> {
        let rels = relations
            .iter()
            .map(|r| FreeVec::parse(&ring, r))
            .collect::<Result<Vec<_>>>()?;
        PresModule::new(ring, ngens, &rels)
    }

    pub fn free(ring: Arc<PolyRing>, rank: usize) -> Result<Self> {
        PresModule::new(ring, rank, &[])
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn ngens(&self) -> usize {
        self.ngens
    }

    pub fn relations(&self) -> &SubmoduleBasis {
        &self.relations
    }

    /// Relation vectors that are nonzero modulo the ring.
    pub fn relation_vectors(&self) -> Vec<FreeVec> {
        self.relations.generators()
    }

    pub fn is_zero_element(&self, v: &FreeVec) -> bool {
        self.relations.contains(v)
    }

    pub fn generator(&self, j: usize) -> FreeVec {
        FreeVec::unit(self.ngens, j, self.ring.field())
    }

    /// The same presentation over another ring with compatible variable
    /// names (base change).
    pub fn over(&self, ring: Arc<PolyRing>) -> Result<Self> {
        let rels = self
            .relation_vectors()
            .iter()
            .map(|v| v.embed(&ring, &self.ring))
            .collect::<Result<Vec<_>>>()?;
        PresModule::new(ring, self.ngens, &rels)
    }

    /// `M / t^i M`.
    pub fn truncate(&self, level: u32) -> Result<Self> {
        self.over(self.ring.truncate(level)?)
    }

    pub fn is_zero(&self) -> bool {
        self.relations.is_full()
    }
}

/// A base module with its truncations `M_i = M / t^i M`, `i = 1..=depth`.
#[derive(Clone, Debug)]
pub struct TowerModule {
    base: PresModule,
    levels: Vec<PresModule>,
}

impl TowerModule {
    /// Builds the levels and certifies that level-`i` relations reduce to
    /// level-`(i-1)` relations; transitions are the identity on generators,
    /// hence surjective.
    pub fn build(base: &PresModule, depth: u32, exec: Exec) -> Result<Self> {
        if depth == 0 {
            return Err(Error::Invalid("tower depth must be at least 1".into()));
        }
        let levels = exec.try_map((1..=depth).collect(), |i| base.truncate(i))?;
        for w in levels.windows(2) {
            if !w[0].relations.contains_all(&w[1].relations) {
                return Err(Error::Invalid("truncation is not functorial".into()));
            }
        }
        Ok(TowerModule {
            base: base.clone(),
            levels,
        })
    }

    pub fn base(&self) -> &PresModule {
        &self.base
    }

    pub fn depth(&self) -> u32 {
        self.levels.len() as u32
    }

    /// Level `i`, counted from 1.
    pub fn level(&self, i: u32) -> &PresModule {
        &self.levels[i as usize - 1]
    }

    pub fn levels(&self) -> &[PresModule] {
        &self.levels
    }
}

/// `f·q = 0` in `M_i` with `f` outside every `P_j R_i`.
#[derive(Clone, Debug)]
pub struct QCertificate {
    pub q: FreeVec,
    pub f: Poly,
}

#[derive(Clone, Debug)]
pub struct QLevel {
    pub level: u32,
    /// Preimage of `Q_i` in the free module; contains the relations.
    pub q: SubmoduleBasis,
    pub certificates: Vec<QCertificate>,
    /// Every generator carries a verified certificate.
    pub certified: bool,
}

impl QLevel {
    /// `N_i = M_i / Q_i`.
    pub fn n_module(&self) -> PresModule {
        PresModule::from_relations(self.q.clone())
    }
}

#[derive(Clone, Debug)]
pub struct QNFiltration {
    pub pool: Vec<Poly>,
    pub levels: Vec<QLevel>,
}

impl QNFiltration {
    pub fn level(&self, i: u32) -> &QLevel {
        &self.levels[i as usize - 1]
    }
}

fn check_pool(pool: &[Poly], pd: &PrimeData) -> Result<()> {
    for f in pool {
        if let Some(j) = pd.containing_prime(f) {
            return Err(Error::Invalid(format!(
                "pool element {} lies in P_{}",
                pd.base().text(f),
                j + 1
            )));
        }
    }
    Ok(())
}

/// Default pool: the separator product when it avoids every prime.
pub fn default_pool(pd: &PrimeData) -> Vec<Poly> {
    let s = pd.separator_product();
    if s.as_constant().is_some() || pd.containing_prime(&s).is_some() {
        Vec::new()
    } else {
        vec![s]
    }
}

/// Saturate `rel` by every pool element until nothing changes.
pub fn pool_closure(rel: &SubmoduleBasis, pool: &[Poly]) -> Result<SubmoduleBasis> {
    let mut q = rel.clone();
    loop {
        let mut changed = false;
        for f in pool {
            let (s, _) = q.saturate(f)?;
            if !q.contains_all(&s) {
                q = s;
                changed = true;
            }
        }
        if !changed {
            return Ok(q);
        }
    }
}

fn outside_primes(f: &Poly, primes: &[SubmoduleBasis]) -> bool {
    primes.iter().all(|p| !p.contains_poly(f))
}

/// Compute `Q_i` for one presented module with certificates.
pub fn q_level(m: &PresModule, level: u32, pool: &[Poly], pd: &PrimeData) -> Result<QLevel> {
    let ring = m.ring();
    let pool_here = pool
        .iter()
        .map(|f| ring.embed(f, pd.base()))
        .collect::<Result<Vec<_>>>()?;
    let q = pool_closure(m.relations(), &pool_here)?;
    let primes = pd.primes_in(ring)?;
    let max_power = 2 * level + 4;
    let mut certificates = Vec::new();
    let mut certified = true;
    for g in q.generators() {
        if m.relations().contains(&g) {
            continue;
        }
        let mut found = None;
        'search: for k in 1..=max_power {
            for f in &pool_here {
                let fk = f.pow(k);
                if m.relations().contains(&g.scale(&fk)) {
                    found = Some(fk);
                    break 'search;
                }
            }
            let prod = pool_here.iter().fold(ring.one(), |a, f| &a * f).pow(k);
            if m.relations().contains(&g.scale(&prod)) {
                found = Some(prod);
                break 'search;
            }
        }
        match found {
            Some(f) if outside_primes(&f, &primes) => certificates.push(QCertificate { q: g, f }),
            _ => certified = false,
        }
    }
    Ok(QLevel {
        level,
        q,
        certificates,
        certified,
    })
}

/// Q/N filtration of every level of a tower.
pub fn q_filtration(
    tower: &TowerModule,
    pd: &PrimeData,
    pool: &[Poly],
    exec: Exec,
) -> Result<QNFiltration> {
    check_pool(pool, pd)?;
    let items: Vec<(u32, &PresModule)> = (1..=tower.depth()).zip(tower.levels()).collect();
    let levels = exec.try_map(items, |(i, m)| q_level(m, i, pool, pd))?;
    Ok(QNFiltration {
        pool: pool.to_vec(),
        levels,
    })
}

/// Least `n` such that every transition `Q_{i-1+n} -> Q_i` within the
/// tower is zero.
pub fn stabilization_index(tower: &TowerModule, filt: &QNFiltration) -> Result<u32> {
    let d = tower.depth();
    if d < 2 {
        return Err(Error::Invalid(
            "stabilization needs depth at least 2".into(),
        ));
    }
    'n: for n in 1..d {
        for i in 1..=d {
            let src = i - 1 + n;
            if src > d {
                break;
            }
            let rel_i = tower.level(i).relations();
            for q in filt.level(src).q.generators() {
                if !rel_i.contains(&q) {
                    continue 'n;
                }
            }
        }
        return Ok(n);
    }
    Err(Error::Exhausted(format!(
        "no stabilization index below depth {d}"
    )))
}

/// One checked law of the filtration at one level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LawCheck {
    pub law: &'static str,
    pub level: u32,
    pub pass: bool,
    pub witness: Option<String>,
}

fn law(law: &'static str, level: u32, witness: Option<String>) -> LawCheck {
    LawCheck {
        law,
        level,
        pass: witness.is_none(),
        witness,
    }
}

pub(crate) fn fresh_name(ring: &PolyRing, base: &str) -> String {
    let mut k = 0;
    loop {
        let name = if k == 0 {
            base.to_string()
        } else {
            format!("{base}{k}")
        };
        if ring.var(&name).is_none() {
            return name;
        }
        k += 1;
    }
}

fn level_laws(
    tower: &TowerModule,
    filt: &QNFiltration,
    pd: &PrimeData,
    f: &Poly,
    i: u32,
) -> Result<Vec<LawCheck>> {
    let m = tower.level(i);
    let ring = m.ring();
    let ql = filt.level(i);
    let mut out = Vec::new();
    let pool_here = filt
        .pool
        .iter()
        .map(|p| ring.embed(p, pd.base()))
        .collect::<Result<Vec<_>>>()?;

    // closure: Q_i is saturated for every pool element
    let mut w = None;
    for p in &pool_here {
        let colon = ql.q.quotient_poly(p)?;
        if let Some(g) = colon.generators().into_iter().find(|g| !ql.q.contains(g)) {
            w = Some(format!(
                "{} * {} lies in Q but {} does not",
                ring.text(p),
                g.text(ring),
                g.text(ring)
            ));
            break;
        }
    }
    out.push(law("q-closure", i, w));

    // certificates
    let primes = pd.primes_in(ring)?;
    let mut w = None;
    if !ql.certified {
        w = Some("a Q generator has no certificate".to_string());
    }
    for c in &ql.certificates {
        if !m.relations().contains(&c.q.scale(&c.f)) {
            w = Some(format!(
                "{} does not kill {}",
                ring.text(&c.f),
                c.q.text(ring)
            ));
        } else if let Some(j) = primes.iter().position(|p| p.contains_poly(&c.f)) {
            w = Some(format!("{} lies in P_{}", ring.text(&c.f), j + 1));
        }
    }
    out.push(law("q-certificates", i, w));

    // annihilators of N generators lie in some P_j R_i
    let mut w = None;
    for j in 0..m.ngens() {
        let e = m.generator(j);
        if ql.q.contains(&e) {
            continue;
        }
        let ann = ql.q.colon_element(&e)?;
        if !primes.iter().any(|p| p.contains_all(&ann)) {
            w = Some(format!(
                "ann(e{}) = ({}) escapes every P_j",
                j + 1,
                ann.texts().join(", ")
            ));
            break;
        }
    }
    out.push(law("n-annihilators", i, w));

    // transition Q_i -> Q_{i-1}
    if i >= 2 {
        let lower = &filt.level(i - 1).q;
        let w =
            ql.q.generators()
                .into_iter()
                .find(|g| !lower.contains(g))
                .map(|g| format!("image of {} not in Q_{}", g.text(ring), i - 1));
        out.push(law("transition", i, w));
    }

    // divisibility: t^c m in Q_i implies m in Q_{i-c}
    let t = ring.t().expect("tower ring has t");
    let mut w = None;
    for g in ql.q.generators() {
        if m.relations().contains(&g) {
            continue;
        }
        for c in 1..i {
            let tc = Monomial::var(t, c);
            let divided: Option<Vec<Poly>> =
                g.coords().iter().map(|p| p.div_monomial(&tc)).collect();
            if let Some(coords) = divided {
                let mv = FreeVec::new(coords);
                if !filt.level(i - c).q.contains(&mv) {
                    w = Some(format!(
                        "t^{c} * {} in Q_{i} but not in Q_{}",
                        mv.text(ring),
                        i - c
                    ));
                }
            }
        }
    }
    out.push(law("divisibility", i, w));

    // base change to the localisation at f
    let name = fresh_name(ring, "v");
    let f_here = ring.embed(f, pd.base())?;
    let loc = ring.adjoin_inverse(&f_here, &name)?;
    let m_loc = m.over(loc.clone())?;
    let q_loc = q_level(&m_loc, i, &filt.pool, pd)?;
    let extended_gens =
        ql.q.generators()
            .iter()
            .map(|g| g.embed(&loc, ring))
            .collect::<Result<Vec<_>>>()?;
    let extended = m_loc.relations().add_generators(&extended_gens)?;
    let w = if !q_loc.q.contains_all(&extended) {
        Some("Q_i extended is not inside the localized Q".to_string())
    } else if !extended.contains_all(&q_loc.q) {
        Some("localized Q is larger than Q_i extended".to_string())
    } else {
        None
    };
    out.push(law("base-change", i, w));
    Ok(out)
}

/// Check the filtration laws level by level, plus the existence of a
/// stabilization index.
pub fn verify_tower_laws(
    tower: &TowerModule,
    filt: &QNFiltration,
    pd: &PrimeData,
    f: &Poly,
    exec: Exec,
) -> Result<Vec<LawCheck>> {
    if let Some(j) = pd.containing_prime(f) {
        return Err(Error::Density(format!(
            "{} lies in P_{}",
            pd.base().text(f),
            j + 1
        )));
    }
    let per_level = exec.try_map((1..=tower.depth()).collect(), |i| {
        level_laws(tower, filt, pd, f, i)
    })?;
    let mut out: Vec<LawCheck> = per_level.into_iter().flatten().collect();
    if tower.depth() >= 2 {
        let w = match stabilization_index(tower, filt) {
            Ok(_) => None,
            Err(e) => Some(e.to_string()),
        };
        out.push(law("stabilization", tower.depth(), w));
    }
    Ok(out)
}

/// Result of the symbolic containment search.
#[derive(Clone, Debug)]
pub struct ContainmentBound {
    pub n: u32,
    /// Element witnessing failure at `n - 1`, if `n > 0`.
    pub witness: Option<FreeVec>,
}

/// Least `n ≤ n_max` with `∩_j (P_j^n M : s_j^∞) ⊆ t^c M`, where
/// `s_j = ρ_j · Π pool` clears every other component and the pool's
/// non-prime directions.
pub fn symbolic_containment_bound(
    m: &PresModule,
    pd: &PrimeData,
    pool: &[Poly],
    c: u32,
    n_max: u32,
) -> Result<ContainmentBound> {
    check_pool(pool, pd)?;
    let ring = m.ring();
    let rank = m.ngens();
    let t = ring
        .t_poly()
        .ok_or_else(|| Error::Ring("ring has no t".into()))?;
    let tc = t.pow(c);
    let target_gens: Vec<FreeVec> = (0..rank).map(|j| m.generator(j).scale(&tc)).collect();
    let target = m.relations().add_generators(&target_gens)?;
    let pool_prod = pool.iter().fold(ring.one(), |a, f| {
        &a * &ring.embed(f, pd.base()).unwrap_or_default()
    });
    let mut last_witness = None;
    for n in 0..=n_max {
        let mut acc: Option<SubmoduleBasis> = None;
        for j in 0..pd.len() {
            let pn = pd.prime_in(j, ring)?.power(n)?;
            let mut gens = Vec::new();
            for a in pn.generators() {
                for k in 0..rank {
                    gens.push(m.generator(k).scale(&a.coords()[0]));
                }
            }
            let pnm = m.relations().add_generators(&gens)?;
            let s = &ring.embed(&pd.separators()[j], pd.base())? * &pool_prod;
            let sat = if s.as_constant().is_some() {
                pnm
            } else {
                pnm.saturate(&s)?.0
            };
            acc = Some(match acc {
                None => sat,
                Some(a) => a.intersect(&sat)?,
            });
        }
        let inter = acc.expect("at least one prime");
        match inter.generators().into_iter().find(|g| !target.contains(g)) {
            None => {
                return Ok(ContainmentBound {
                    n,
                    witness: last_witness,
                })
            }
            Some(g) => last_witness = Some(g),
        }
    }
    Err(Error::Exhausted(format!(
        "no n <= {n_max} gives containment in t^{c}M; witness {}",
        last_witness.map(|w| w.text(ring)).unwrap_or_default()
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Field;
    use crate::surface::BaseRing;

    fn xm_tn() -> (BaseRing, PrimeData, PresModule) {
        let b = BaseRing::new(Field::Rational, &["x", "t"], &[], "t").unwrap();
        let r = b.ring().clone();
        let pd = PrimeData::validate(&b, vec![vec![r.parse("t").unwrap()]], vec![r.one()]).unwrap();
        let m = PresModule::parse(r, 2, &[vec!["x", "-t"]]).unwrap();
        (b, pd, m)
    }

    #[test]
    fn xm_tn_torsion_and_stabilization() {
        let (b, pd, m) = xm_tn();
        let r = b.ring();
        let pool = vec![r.parse("x").unwrap()];
        let tower = TowerModule::build(&m, 4, Exec::Sequential).unwrap();
        let filt = q_filtration(&tower, &pd, &pool, Exec::Sequential).unwrap();
        for i in 2..=4u32 {
            let tm = FreeVec::new(vec![r.parse("t").unwrap().pow(i - 1), Poly::zero()]);
            let level = filt.level(i);
            assert!(level.q.contains(&tm));
            assert!(!tower.level(i).is_zero_element(&tm));
            assert!(level.certified);
        }
        assert_eq!(stabilization_index(&tower, &filt).unwrap(), 2);
        let laws = verify_tower_laws(
            &tower,
            &filt,
            &pd,
            &r.parse("x + 1").unwrap(),
            Exec::Sequential,
        )
        .unwrap();
        assert!(laws.iter().all(|l| l.pass), "{laws:?}");
    }

    #[test]
    fn xm_tn_containment_bound() {
        let (b, pd, m) = xm_tn();
        let pool = vec![b.ring().parse("x").unwrap()];
        let bound = symbolic_containment_bound(&m, &pd, &pool, 1, 4).unwrap();
        assert_eq!(bound.n, 2);
        let w = bound.witness.unwrap();
        assert!(!m.is_zero_element(&w));
    }

    #[test]
    fn free_tower_has_no_torsion() {
        let b = BaseRing::new(Field::Rational, &["x", "t"], &[], "t").unwrap();
        let r = b.ring().clone();
        let pd = PrimeData::validate(&b, vec![vec![r.parse("t").unwrap()]], vec![r.one()]).unwrap();
        let m = PresModule::free(r.clone(), 1).unwrap();
        let tower = TowerModule::build(&m, 3, Exec::Parallel).unwrap();
        let filt = q_filtration(&tower, &pd, &[r.parse("x").unwrap()], Exec::Parallel).unwrap();
        assert!(filt.levels.iter().all(|l| l.certificates.is_empty()));
        assert_eq!(stabilization_index(&tower, &filt).unwrap(), 1);
    }
}
