//! Base rings `B = k[x, t] / J`, their truncations and localisations, and the
//! declared minimal primes of the closed fibre.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::groebner::{FreeVec, PolyRing, SubmoduleBasis};
use crate::poly::{Field, Monomial, Poly};

/// A presented ring on which `t` is a nonzerodivisor.
#[derive(Clone, Debug)]
pub struct BaseRing {
    ring: Arc<PolyRing>,
}

impl BaseRing {
    /// Builds the ring and certifies `(J : t) = J` and `J ≠ (1)`.
    pub fn new(field: Field, vars: &[&str], relations: &[&str], t: &str) -> Result<BaseRing> {
        BaseRing::from_ring(PolyRing::parse_new(field, vars, Some(t), relations)?)
    }

    pub fn from_ring(ring: Arc<PolyRing>) -> Result<BaseRing> {
        let t = ring
            .t_poly()
            .ok_or_else(|| Error::Ring("base ring needs a deformation variable".into()))?;
        if ring.is_unit_ring() {
            return Err(Error::Ring("relations generate the unit ideal".into()));
        }
        let zero = SubmoduleBasis::zero(ring.clone(), 1)?;
        let ann = zero.quotient_poly(&t)?;
        if let Some(w) = ann.generators().first() {
            return Err(Error::Ring(format!(
                "t is a zero-divisor: t*({}) = 0",
                ring.text(&w.coords()[0])
            )));
        }
        Ok(BaseRing { ring })
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn truncate(&self, level: u32) -> Result<TruncatedRing> {
        TruncatedRing::new(self, level)
    }
}

/// `B / (t^i)` with the certificate `t^(i-1) ≠ 0`.
#[derive(Clone, Debug)]
pub struct TruncatedRing {
    ring: Arc<PolyRing>,
    level: u32,
}

impl TruncatedRing {
    pub fn new(base: &BaseRing, level: u32) -> Result<TruncatedRing> {
        if level == 0 {
            return Err(Error::Invalid("truncation level must be at least 1".into()));
        }
        let ring = base.ring.truncate(level)?;
        let t = ring.t().expect("base ring has t");
        let top = Poly::monomial(Monomial::var(t, level - 1), ring.field().one());
        if ring.is_zero(&top) {
            return Err(Error::Ring(format!(
                "degenerate truncation: t^{} vanishes",
                level - 1
            )));
        }
        Ok(TruncatedRing { ring, level })
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn level(&self) -> u32 {
        self.level
    }
}

/// A ring with one more adjoined inverse `u = 1/f`.
#[derive(Clone, Debug)]
pub struct LocalizedRing {
    ring: Arc<PolyRing>,
    f: Poly,
    u: usize,
    trivial: bool,
}

impl LocalizedRing {
    /// Localise `base` at `f`, a polynomial in the variables of `pd`'s base
    /// ring. Rejects `f` lying in a declared minimal prime.
    pub fn new(base: &Arc<PolyRing>, f: &Poly, u_name: &str, pd: &PrimeData) -> Result<Self> {
        if let Some(j) = pd.containing_prime(f) {
            return Err(Error::Density(format!(
                "{} lies in P_{}; localisation would delete a component",
                pd.base().text(f),
                j + 1
            )));
        }
        let f_here = base.embed(f, pd.base())?;
        let ring = base.adjoin_inverse(&f_here, u_name)?;
        let u = ring.nvars() - 1;
        let trivial = f.as_constant().is_some();
        Ok(LocalizedRing {
            ring,
            f: f_here,
            u,
            trivial,
        })
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn inverted(&self) -> &Poly {
        &self.f
    }

    pub fn u(&self) -> usize {
        self.u
    }

    /// Localising at a constant changes nothing.
    pub fn is_trivial(&self) -> bool {
        self.trivial
    }
}

/// Declared minimal primes `P_j` of `(t)` with separators `ρ_j`.
#[derive(Clone, Debug)]
pub struct PrimeData {
    base: Arc<PolyRing>,
    primes: Vec<SubmoduleBasis>,
    prime_gens: Vec<Vec<Poly>>,
    separators: Vec<Poly>,
}

impl PrimeData {
    /// Certifies `t ∈ P_j`, pairwise non-containment and the separator
    /// conditions `ρ_j ∈ P_k (k ≠ j)`, `ρ_j ∉ P_j`. Primality is declared.
    pub fn validate(
        base: &BaseRing,
        primes: Vec<Vec<Poly>>,
        separators: Vec<Poly>,
    ) -> Result<Self> {
        let ring = base.ring().clone();
        if primes.is_empty() {
            return Err(Error::PrimeData("at least one prime is required".into()));
        }
        if primes.len() != separators.len() {
            return Err(Error::PrimeData(format!(
                "{} primes but {} separators",
                primes.len(),
                separators.len()
            )));
        }
        let t = ring.t_poly().expect("base ring has t");
        let bases = primes
            .iter()
            .map(|g| SubmoduleBasis::ideal(ring.clone(), g))
            .collect::<Result<Vec<_>>>()?;
        for (j, p) in bases.iter().enumerate() {
            if p.contains_poly(&ring.one()) {
                return Err(Error::PrimeData(format!("P_{} is the unit ideal", j + 1)));
            }
            if !p.contains_poly(&t) {
                return Err(Error::PrimeData(format!("t is not in P_{}", j + 1)));
            }
        }
        for (j, pj) in bases.iter().enumerate() {
            for (k, pk) in bases.iter().enumerate() {
                if j != k && pk.contains_all(pj) {
                    return Err(Error::PrimeData(format!(
                        "P_{} is contained in P_{}: minimality fails",
                        j + 1,
                        k + 1
                    )));
                }
            }
        }
        for (j, rho) in separators.iter().enumerate() {
            if bases[j].contains_poly(rho) {
                return Err(Error::PrimeData(format!(
                    "separator {} lies in P_{}",
                    ring.text(rho),
                    j + 1
                )));
            }
            for (k, pk) in bases.iter().enumerate() {
                if k != j && !pk.contains_poly(rho) {
                    return Err(Error::PrimeData(format!(
                        "separator {} of P_{} is not in P_{}",
                        ring.text(rho),
                        j + 1,
                        k + 1
                    )));
                }
            }
        }
        Ok(PrimeData {
            base: ring,
            primes: bases,
            prime_gens: primes,
            separators,
        })
    }

    pub fn base(&self) -> &Arc<PolyRing> {
        &self.base
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn prime(&self, j: usize) -> &SubmoduleBasis {
        &self.primes[j]
    }

    pub fn separators(&self) -> &[Poly] {
        &self.separators
    }

    /// First prime (in the base ring) containing `f`.
    pub fn containing_prime(&self, f: &Poly) -> Option<usize> {
        self.primes.iter().position(|p| p.contains_poly(f))
    }

    /// `P_j` extended to a ring whose variables include the base variables.
    pub fn prime_in(&self, j: usize, ring: &Arc<PolyRing>) -> Result<SubmoduleBasis> {
        let gens = self.prime_gens[j]
            .iter()
            .map(|g| ring.embed(g, &self.base))
            .collect::<Result<Vec<_>>>()?;
        SubmoduleBasis::ideal(ring.clone(), &gens)
    }

    pub fn primes_in(&self, ring: &Arc<PolyRing>) -> Result<Vec<SubmoduleBasis>> {
        (0..self.len()).map(|j| self.prime_in(j, ring)).collect()
    }

    /// Product of all separators; lies outside every `P_j` only when `s = 1`.
    pub fn separator_product(&self) -> Poly {
        self.separators
            .iter()
            .fold(self.base.one(), |acc, r| &acc * r)
    }
}

/// Pool scan for an element of `ideal` outside every `P_j`: first the pool
/// elements, then `p_a + c·p_b` for `a < b` and `c = 1..=s+1`.
pub fn prime_avoidance_pick(ideal: &SubmoduleBasis, pd: &PrimeData, pool: &[Poly]) -> Result<Poly> {
    if pool.is_empty() {
        return Err(Error::Invalid("empty pool".into()));
    }
    let ring = ideal.ring();
    let primes = pd.primes_in(ring)?;
    let mut candidates: Vec<Poly> = pool.to_vec();
    let field = ring.field();
    for a in 0..pool.len() {
        for b in (a + 1)..pool.len() {
            for c in 1..=(pd.len() as i64 + 1) {
                candidates.push(&pool[a] + &pool[b].scale(&field.from_i64(c)));
            }
        }
    }
    let mut blocked = Vec::new();
    for cand in candidates {
        if !ideal.contains_poly(&cand) {
            blocked.push(format!("{} not in the ideal", ring.text(&cand)));
            continue;
        }
        match primes.iter().position(|p| p.contains_poly(&cand)) {
            None => return Ok(cand),
            Some(j) => blocked.push(format!("{} in P_{}", ring.text(&cand), j + 1)),
        }
    }
    Err(Error::Exhausted(format!(
        "prime avoidance failed: {}",
        blocked.join("; ")
    )))
}

/// Generators of the same ideal, none of them in any `P_j`, following
/// `r_h = s_h + Σ_{j ∈ S_h} r_0 ρ_j` with `r_0` from [`prime_avoidance_pick`].
pub fn regenerate_generators(
    ring: &Arc<PolyRing>,
    gens: &[Poly],
    pd: &PrimeData,
    pool: Option<&[Poly]>,
) -> Result<Vec<Poly>> {
    let ideal = SubmoduleBasis::ideal(ring.clone(), gens)?;
    let r0 = prime_avoidance_pick(&ideal, pd, pool.unwrap_or(gens))?;
    let primes = pd.primes_in(ring)?;
    let rhos = pd
        .separators()
        .iter()
        .map(|r| ring.embed(r, pd.base()))
        .collect::<Result<Vec<_>>>()?;
    let mut out = vec![r0.clone()];
    for s in gens {
        let mut r = s.clone();
        for (j, p) in primes.iter().enumerate() {
            if p.contains_poly(s) {
                r = &r + &(&r0 * &rhos[j]);
            }
        }
        if !out.contains(&r) {
            out.push(r);
        }
    }
    for r in &out {
        if let Some(j) = primes.iter().position(|p| p.contains_poly(r)) {
            return Err(Error::PrimeData(format!(
                "regenerated {} lies in P_{}",
                ring.text(r),
                j + 1
            )));
        }
    }
    let regenerated = SubmoduleBasis::ideal(ring.clone(), &out)?;
    if !regenerated.same_span(&ideal) {
        return Err(Error::PrimeData(
            "regenerated generators change the ideal".into(),
        ));
    }
    Ok(out)
}

/// `(P^n : s^∞)` with the saturation witness exponent.
#[derive(Clone, Debug)]
pub struct SymbolicPower {
    pub ideal: SubmoduleBasis,
    pub witness: u32,
    pub separator: Poly,
    /// The sufficient condition under which this equals `P^(n)`.
    pub caveat: &'static str,
}

pub const SYMBOLIC_CAVEAT: &str = "exact when the separator lies in every embedded prime of P^n";

/// Symbolic power of `P_j` by a single saturation; the separator defaults
/// to `ρ_j`.
pub fn symbolic_power(
    pd: &PrimeData,
    j: usize,
    n: u32,
    separator: Option<&Poly>,
) -> Result<SymbolicPower> {
    if j >= pd.len() {
        return Err(Error::Invalid(format!("no prime P_{}", j + 1)));
    }
    let s = separator
        .cloned()
        .unwrap_or_else(|| pd.separators()[j].clone());
    let p = pd.prime(j);
    if p.contains_poly(&s) {
        return Err(Error::PrimeData(format!(
            "separator {} lies in P_{}",
            pd.base().text(&s),
            j + 1
        )));
    }
    let (ideal, witness) = p.power(n)?.saturate(&s)?;
    Ok(SymbolicPower {
        ideal,
        witness,
        separator: s,
        caveat: SYMBOLIC_CAVEAT,
    })
}

/// `dim V(P) - dim V(P + extra)`, `None` when the latter is empty.
pub fn codimension_in(prime: &SubmoduleBasis, extra: &[Poly]) -> Result<Option<usize>> {
    let whole = prime
        .dimension()
        .ok_or_else(|| Error::Codimension("component is empty".into()))?;
    let gens: Vec<FreeVec> = extra
        .iter()
        .map(|f| FreeVec::new(vec![f.clone()]))
        .collect();
    let cut = prime.add_generators(&gens)?;
    Ok(cut.dimension().map(|d| whole - d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Field {
        Field::Rational
    }

    fn polys(r: &PolyRing, v: &[&str]) -> Vec<Poly> {
        v.iter().map(|s| r.parse(s).unwrap()).collect()
    }

    #[test]
    fn base_ring_certificates() {
        assert!(BaseRing::new(q(), &["x", "y", "t"], &[], "t").is_ok());
        assert!(BaseRing::new(q(), &["x", "y", "z", "t"], &["x*y - z^2", "t - z"], "t").is_ok());
        let err = BaseRing::new(q(), &["x", "t"], &["t^2*x"], "t").unwrap_err();
        assert!(matches!(err, Error::Ring(m) if m.contains("zero-divisor")));
        assert!(BaseRing::new(q(), &["x", "t"], &["1"], "t").is_err());
    }

    #[test]
    fn truncation_levels() {
        let b = BaseRing::new(q(), &["x", "t"], &[], "t").unwrap();
        let r1 = b.truncate(1).unwrap();
        assert!(r1.ring().is_zero(&r1.ring().parse("t").unwrap()));
        let r3 = b.truncate(3).unwrap();
        assert!(!r3.ring().is_zero(&r3.ring().parse("t^2").unwrap()));
        let a1 = BaseRing::new(q(), &["x", "y", "z", "t"], &["x*y - z^2", "t - z"], "t").unwrap();
        let r2 = a1.truncate(2).unwrap();
        let texts: Vec<String> = r2
            .ring()
            .relations()
            .iter()
            .map(|p| r2.ring().text(p))
            .collect();
        assert_eq!(texts, vec!["x*y", "t^2", "z - t"]);
    }

    #[test]
    fn prime_data_validation() {
        let b = BaseRing::new(q(), &["x", "y", "t"], &["t - x*y"], "t").unwrap();
        let r = b.ring().clone();
        let pd = PrimeData::validate(
            &b,
            vec![polys(&r, &["x", "t"]), polys(&r, &["y", "t"])],
            polys(&r, &["y", "x"]),
        );
        assert!(pd.is_ok());
        let bad = PrimeData::validate(
            &b,
            vec![polys(&r, &["t", "x"]), polys(&r, &["t", "x", "y"])],
            polys(&r, &["y", "x"]),
        );
        assert!(bad.is_err());
        let line = BaseRing::new(q(), &["x", "t"], &[], "t").unwrap();
        let lr = line.ring().clone();
        assert!(PrimeData::validate(&line, vec![polys(&lr, &["t"])], polys(&lr, &["1"])).is_ok());
    }

    #[test]
    fn avoidance_and_regeneration() {
        let b = BaseRing::new(q(), &["x", "y", "t"], &[], "t").unwrap();
        let r = b.ring().clone();
        let pd = PrimeData::validate(&b, vec![polys(&r, &["t", "x"])], polys(&r, &["1"])).unwrap();
        let j = SubmoduleBasis::parse_ideal(r.clone(), &["x", "y"]).unwrap();
        let pick = prime_avoidance_pick(&j, &pd, &polys(&r, &["x", "y"])).unwrap();
        assert_eq!(r.text(&pick), "y");
        let jx = SubmoduleBasis::parse_ideal(r.clone(), &["x"]).unwrap();
        assert!(prime_avoidance_pick(&jx, &pd, &polys(&r, &["x"])).is_err());

        let r2 = b.truncate(2).unwrap().ring().clone();
        let pd_y =
            PrimeData::validate(&b, vec![polys(&r, &["t", "y"])], polys(&r, &["1"])).unwrap();
        let out = regenerate_generators(&r2, &polys(&r2, &["x", "y"]), &pd_y, None).unwrap();
        let texts: Vec<String> = out.iter().map(|p| r2.text(p)).collect();
        assert_eq!(texts, vec!["x", "x + y"]);
    }

    #[test]
    fn localisation_rules() {
        let b = BaseRing::new(q(), &["x", "y", "t"], &[], "t").unwrap();
        let r = b.ring().clone();
        let pd = PrimeData::validate(&b, vec![polys(&r, &["t"])], polys(&r, &["1"])).unwrap();
        let r2 = b.truncate(2).unwrap().ring().clone();
        let l = LocalizedRing::new(&r2, &r.parse("y").unwrap(), "u", &pd).unwrap();
        assert!(l.ring().is_zero(&l.ring().parse("u*y - 1").unwrap()));
        assert!(!l.is_trivial());
        assert!(LocalizedRing::new(&r2, &r.one(), "u", &pd)
            .unwrap()
            .is_trivial());
        assert!(LocalizedRing::new(&r2, &r.parse("t").unwrap(), "u", &pd).is_err());
    }

    #[test]
    fn symbolic_square_on_a1() {
        let b = BaseRing::new(q(), &["x", "y", "z", "t"], &["x*y - z^2", "t - z"], "t").unwrap();
        let r = b.ring().clone();
        let pd = PrimeData::validate(
            &b,
            vec![polys(&r, &["x", "z", "t"]), polys(&r, &["y", "z", "t"])],
            polys(&r, &["y", "x"]),
        )
        .unwrap();
        let sp = symbolic_power(&pd, 0, 2, None).unwrap();
        let x = r.parse("x").unwrap();
        assert!(sp.ideal.contains_poly(&x));
        assert!(!pd.prime(0).power(2).unwrap().contains_poly(&x));
        assert!(symbolic_power(&pd, 0, 2, Some(&x)).is_err());
    }

    #[test]
    fn codimension_of_origin() {
        let b = BaseRing::new(q(), &["x", "y", "t"], &[], "t").unwrap();
        let r = b.ring().clone();
        let p = SubmoduleBasis::parse_ideal(r.clone(), &["t"]).unwrap();
        assert_eq!(
            codimension_in(&p, &polys(&r, &["x", "y"])).unwrap(),
            Some(2)
        );
        assert_eq!(
            codimension_in(&p, &polys(&r, &["x", "x - 1"])).unwrap(),
            None
        );
    }
}
