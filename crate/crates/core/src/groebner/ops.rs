//! Derived module operations: kernels, intersections, colons, saturation and
//! elimination.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::poly::{ModuleOrder, Monomial, Poly, PositionOrder};

use super::ring::elimination_order;
use super::{gb_with_relations, FreeVec, PolyRing, SubmoduleBasis};

fn aux_names(ring: &PolyRing, extra: &str) -> Vec<String> {
    let mut names = ring.names().to_vec();
    names.push(extra.to_string());
    names
}

/// Generators of the kernel of `R^m -> R^r / N`, `e_k -> images[k]`, where
/// `N` is spanned by `target_relations`.
///
/// When `eliminate` is nonempty the kernel is contracted to coefficient
/// vectors free of those variables (a kernel over the subring).
pub fn kernel(
    ring: &PolyRing,
    images: &[FreeVec],
    target_relations: &[FreeVec],
    eliminate: &[usize],
) -> Result<Vec<FreeVec>> {
    let m = images.len();
    let r = images
        .first()
        .or(target_relations.first())
        .map(FreeVec::rank)
        .unwrap_or(0);
    if m == 0 {
        return Ok(Vec::new());
    }
    let mono = if eliminate.is_empty() {
        ring.order().clone()
    } else {
        elimination_order(ring.order(), eliminate, ring.nvars())
    };
    let order = ModuleOrder::new(mono, PositionOrder::Split(r));
    let mut gens = Vec::with_capacity(m + target_relations.len());
    for (k, img) in images.iter().enumerate() {
        if img.rank() != r {
            return Err(Error::Rank("kernel images of differing rank".into()));
        }
        gens.push(img.concat(&FreeVec::unit(m, k, ring.field())));
    }
    for rel in target_relations {
        gens.push(rel.concat(&FreeVec::zero(m)));
    }
    let rows = gb_with_relations(ring, r + m, &gens, &order, ring.names())?;
    Ok(rows
        .into_iter()
        .filter(|row| row.lead().pos >= r && !row.involves_any(eliminate))
        .map(|row| {
            let v = row.to_vec(r + m).into_coords();
            FreeVec::new(v[r..].to_vec())
        })
        .collect())
}

/// All relations among `gens` over the presented ring, as a submodule of
/// `R^gens.len()`.
pub fn syzygy_basis(ring: Arc<PolyRing>, gens: &[FreeVec]) -> Result<SubmoduleBasis> {
    let k = kernel(&ring, gens, &[], &[])?;
    SubmoduleBasis::with_default_order(ring, gens.len(), &k)
}

/// Coefficients `c` over `coeff_ring` with `w = sum c_k gens[k]` modulo
/// `target_relations`, or `None` if `w` lies outside that span.
///
/// `coeff_ring` must be the subring of `ring` obtained by dropping the
/// variables in `eliminate`.
pub fn span_cofactors(
    ring: &PolyRing,
    w: &FreeVec,
    gens: &[FreeVec],
    target_relations: &[FreeVec],
    eliminate: &[usize],
    coeff_ring: &Arc<PolyRing>,
) -> Result<Option<Vec<Poly>>> {
    let mut images = Vec::with_capacity(gens.len() + 1);
    images.push(w.clone());
    images.extend(gens.iter().cloned());
    let ker = kernel(ring, &images, target_relations, eliminate)?;
    let ker = ker
        .iter()
        .map(|v| v.embed(coeff_ring, ring))
        .collect::<Result<Vec<_>>>()?;
    let order = ModuleOrder::new(coeff_ring.order().clone(), PositionOrder::Pot);
    let k = SubmoduleBasis::new(coeff_ring.clone(), images.len(), &ker, order)?;
    for v in k.basis() {
        let first = &v.coords()[0];
        if first.as_constant().is_some_and(|c| c.is_one()) {
            return Ok(Some(v.coords()[1..].iter().map(|c| -c).collect()));
        }
    }
    Ok(None)
}

impl SubmoduleBasis {
    fn check_compatible(&self, other: &SubmoduleBasis) -> Result<()> {
        if self.rank != other.rank || **self.ring() != **other.ring() {
            return Err(Error::Rank("submodules over different ambients".into()));
        }
        Ok(())
    }

    pub fn intersect(&self, other: &SubmoduleBasis) -> Result<SubmoduleBasis> {
        self.check_compatible(other)?;
        let ring = self.ring();
        let y = ring.nvars();
        let yv = Poly::var(ring.field(), y);
        let one_minus_y = &ring.one() - &yv;
        let mut gens: Vec<FreeVec> = self.generators().iter().map(|g| g.scale(&yv)).collect();
        gens.extend(other.generators().iter().map(|g| g.scale(&one_minus_y)));
        let order = ModuleOrder::new(
            elimination_order(ring.order(), &[y], y + 1),
            PositionOrder::Top,
        );
        let rows = gb_with_relations(ring, self.rank, &gens, &order, &aux_names(ring, "_y"))?;
        let kept: Vec<FreeVec> = rows
            .iter()
            .filter(|r| !r.involves_any(&[y]))
            .map(|r| r.to_vec(self.rank))
            .collect();
        SubmoduleBasis::new(ring.clone(), self.rank, &kept, self.order.clone())
    }

    /// `(self :_F f) = { v : f·v ∈ self }`.
    pub fn quotient_poly(&self, f: &Poly) -> Result<SubmoduleBasis> {
        let field = self.ring().field();
        let images: Vec<FreeVec> = (0..self.rank)
            .map(|j| FreeVec::unit(self.rank, j, field).scale(f))
            .collect();
        let k = kernel(self.ring(), &images, &self.generators(), &[])?;
        SubmoduleBasis::new(self.ring().clone(), self.rank, &k, self.order.clone())
    }

    /// The ideal `{ r : r·m ∈ self }`; the annihilator of `m` modulo `self`.
    pub fn colon_element(&self, m: &FreeVec) -> Result<SubmoduleBasis> {
        let k = kernel(
            self.ring(),
            std::slice::from_ref(m),
            &self.generators(),
            &[],
        )?;
        SubmoduleBasis::with_default_order(self.ring().clone(), 1, &k)
    }

    /// The ideal `{ r : r·other ⊆ self }`.
    pub fn colon_module(&self, other: &SubmoduleBasis) -> Result<SubmoduleBasis> {
        self.check_compatible(other)?;
        let mut acc = SubmoduleBasis::full(self.ring().clone(), 1)?;
        for g in other.generators() {
            acc = acc.intersect(&self.colon_element(&g)?)?;
        }
        Ok(acc)
    }

    /// `self : f^∞` with the least `e` such that `self : f^e = self : f^(e+1)`.
    pub fn saturate(&self, f: &Poly) -> Result<(SubmoduleBasis, u32)> {
        if f.is_zero() {
            return Err(Error::Invalid("saturation by zero".into()));
        }
        let mut cur = self.clone();
        let mut e = 0u32;
        loop {
            let next = cur.quotient_poly(f)?;
            if cur.contains_all(&next) {
                return Ok((cur, e));
            }
            cur = next;
            e += 1;
            if e > self.ring().budget().max_degree {
                return Err(Error::Budget {
                    reason: "saturation exponent above degree budget".into(),
                    pair: self.ring().text(f),
                });
            }
        }
    }

    /// `self : f^∞` computed by eliminating `u` from `self + (u·f - 1)`.
    pub fn saturate_rabinowitsch(&self, f: &Poly) -> Result<SubmoduleBasis> {
        let ring = self.ring();
        let u = ring.nvars();
        let rel = &(&Poly::var(ring.field(), u) * f) - &ring.one();
        let mut gens = self.generators();
        for j in 0..self.rank {
            gens.push(FreeVec::unit(self.rank, j, ring.field()).scale(&rel));
        }
        let order = ModuleOrder::new(
            elimination_order(ring.order(), &[u], u + 1),
            PositionOrder::Top,
        );
        let rows = gb_with_relations(ring, self.rank, &gens, &order, &aux_names(ring, "_u"))?;
        let kept: Vec<FreeVec> = rows
            .iter()
            .filter(|r| !r.involves_any(&[u]))
            .map(|r| r.to_vec(self.rank))
            .collect();
        SubmoduleBasis::new(ring.clone(), self.rank, &kept, self.order.clone())
    }

    /// Generators of the contraction of `self` to the subring without
    /// `vars` (together with the ring relations, all contracted).
    pub fn contract(&self, vars: &[usize]) -> Result<Vec<FreeVec>> {
        if vars.is_empty() {
            return Ok(self.basis());
        }
        let ring = self.ring();
        let order = ModuleOrder::new(
            elimination_order(ring.order(), vars, ring.nvars()),
            PositionOrder::Top,
        );
        let rows = gb_with_relations(ring, self.rank, &self.basis(), &order, ring.names())?;
        Ok(rows
            .iter()
            .filter(|r| !r.involves_any(vars))
            .map(|r| r.to_vec(self.rank))
            .collect())
    }

    /// The contraction as a submodule over `target`, whose variables must
    /// be the variables of this ring minus `vars`.
    pub fn eliminate(&self, vars: &[usize], target: Arc<PolyRing>) -> Result<SubmoduleBasis> {
        let gens = self
            .contract(vars)?
            .iter()
            .map(|v| v.embed(&target, self.ring()))
            .collect::<Result<Vec<_>>>()?;
        SubmoduleBasis::with_default_order(target, self.rank, &gens)
    }

    /// Product of ideals (rank one) or `ideal · module`.
    pub fn scale_by_ideal(&self, ideal: &SubmoduleBasis) -> Result<SubmoduleBasis> {
        let mut gens = Vec::new();
        for a in ideal.generators() {
            for g in self.generators() {
                gens.push(g.scale(&a.coords()[0]));
            }
        }
        SubmoduleBasis::new(self.ring().clone(), self.rank, &gens, self.order.clone())
    }

    /// `n`-th power of an ideal; the zeroth power is the unit ideal.
    pub fn power(&self, n: u32) -> Result<SubmoduleBasis> {
        let mut acc = SubmoduleBasis::full(self.ring().clone(), 1)?;
        for _ in 0..n {
            acc = acc.scale_by_ideal(self)?;
        }
        Ok(acc)
    }

    /// Krull dimension of `R / I` for an ideal `I` of the ambient
    /// polynomial ring (ring relations included), from the leading-term ideal:
    /// the size of a largest independent variable set. `None` for the unit
    /// ideal.
    pub fn dimension(&self) -> Option<usize> {
        debug_assert_eq!(self.rank, 1);
        let leads: Vec<Monomial> = self.leading_terms().into_iter().map(|(m, _)| m).collect();
        if leads.iter().any(Monomial::is_one) {
            return None;
        }
        let n = self.ring().nvars();
        let supports: Vec<u64> = leads.iter().map(Monomial::support_mask).collect();
        let mut best = 0usize;
        for set in 0u64..(1u64 << n) {
            let size = set.count_ones() as usize;
            if size <= best {
                continue;
            }
            // independent: no leading monomial lives purely in `set`
            if supports.iter().all(|s| s & !set != 0) {
                best = size;
            }
        }
        Some(best)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Field;

    fn ring(names: &[&str], rels: &[&str]) -> Arc<PolyRing> {
        PolyRing::parse_new(Field::Rational, names, None, rels).unwrap()
    }

    #[test]
    fn intersection_of_principal_ideals() {
        let r = ring(&["x", "y"], &[]);
        let a = SubmoduleBasis::parse_ideal(r.clone(), &["x"]).unwrap();
        let b = SubmoduleBasis::parse_ideal(r.clone(), &["y"]).unwrap();
        assert_eq!(a.intersect(&b).unwrap().texts(), vec!["x*y"]);
    }

    #[test]
    fn colon_and_saturation() {
        let r = ring(&["x", "t"], &[]);
        let n = SubmoduleBasis::parse_ideal(r.clone(), &["x*t"]).unwrap();
        let t = r.parse("t").unwrap();
        assert_eq!(n.quotient_poly(&t).unwrap().texts(), vec!["x"]);
        let (s, e) = n.saturate(&t).unwrap();
        assert_eq!((s.texts(), e), (vec!["x".to_string()], 1));
        assert!(s.same_span(&n.saturate_rabinowitsch(&t).unwrap()));
    }

    #[test]
    fn koszul_syzygy() {
        let r = ring(&["x", "y"], &[]);
        let gens = [
            FreeVec::parse(&r, &["x"]).unwrap(),
            FreeVec::parse(&r, &["y"]).unwrap(),
        ];
        let s = syzygy_basis(r.clone(), &gens).unwrap();
        let texts: Vec<String> = s.generators().iter().map(|v| v.text(&r)).collect();
        assert_eq!(texts.len(), 1);
        assert!(s.contains(&FreeVec::parse(&r, &["y", "-x"]).unwrap()));
    }

    #[test]
    fn elimination_example() {
        let r = ring(&["x", "y", "u"], &[]);
        let n = SubmoduleBasis::parse_ideal(r.clone(), &["u*x - 1", "u*y"]).unwrap();
        let target = ring(&["x", "y"], &[]);
        assert_eq!(n.eliminate(&[2], target).unwrap().texts(), vec!["y"]);
    }

    #[test]
    fn dimension_of_planes() {
        let r = ring(&["x", "y", "t"], &[]);
        assert_eq!(
            SubmoduleBasis::parse_ideal(r.clone(), &["t"])
                .unwrap()
                .dimension(),
            Some(2)
        );
        assert_eq!(
            SubmoduleBasis::parse_ideal(r.clone(), &["t", "x", "y"])
                .unwrap()
                .dimension(),
            Some(0)
        );
        assert_eq!(
            SubmoduleBasis::parse_ideal(r, &["x", "x - 1"])
                .unwrap()
                .dimension(),
            None
        );
    }
}
