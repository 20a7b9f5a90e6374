//! Gröbner bases of submodules of free modules over presented rings.

mod buchberger;
mod ops;
mod ring;
mod row;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::poly::{Field, ModuleOrder, Poly, PositionOrder};

pub use ops::{kernel, span_cofactors, syzygy_basis};
pub use ring::{Budget, PolyRing};

use buchberger::groebner;
use row::{reduce, Row};

/// An element of a free module `R^r`, stored coordinate-wise.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct FreeVec(Vec<Poly>);

impl FreeVec {
    pub fn new(coords: Vec<Poly>) -> Self {
        FreeVec(coords)
    }

    pub fn zero(rank: usize) -> Self {
        FreeVec(vec![Poly::zero(); rank])
    }

    pub fn unit(rank: usize, j: usize, field: Field) -> Self {
        let mut v = FreeVec::zero(rank);
        v.0[j] = Poly::one(field);
        v
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Poly] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<Poly> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Poly::is_zero)
    }

    pub fn add(&self, other: &FreeVec) -> FreeVec {
        FreeVec(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &FreeVec) -> FreeVec {
        FreeVec(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, f: &Poly) -> FreeVec {
        FreeVec(self.0.iter().map(|a| a * f).collect())
    }

    /// Concatenation `(self | other)`.
    pub fn concat(&self, other: &FreeVec) -> FreeVec {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        FreeVec(v)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.0.iter().filter_map(Poly::total_degree).max()
    }

    pub fn involves_any(&self, vars: &[usize]) -> bool {
        self.0.iter().any(|p| p.involves_any(vars))
    }

    /// Coordinate-wise normal form modulo the ring relations.
    pub fn reduce_in(&self, ring: &PolyRing) -> FreeVec {
        FreeVec(self.0.iter().map(|p| ring.reduce(p)).collect())
    }

    pub fn embed(&self, to: &PolyRing, from: &PolyRing) -> Result<FreeVec> {
        Ok(FreeVec(
            self.0
                .iter()
                .map(|p| to.embed(p, from))
                .collect::<Result<_>>()?,
        ))
    }

    /// `(p1, p2, ...)` with canonical coordinate texts.
    pub fn text(&self, ring: &PolyRing) -> String {
        let parts: Vec<String> = self.0.iter().map(|p| ring.text(p)).collect();
        format!("({})", parts.join(", "))
    }

    pub fn parse(ring: &PolyRing, coords: &[&str]) -> Result<FreeVec> {
        Ok(FreeVec(
            coords
                .iter()
                .map(|c| ring.parse(c))
                .collect::<Result<_>>()?,
        ))
    }
}

/// Reduced Gröbner basis of a submodule of `R^rank`, where `R` is a
/// presented ring. The basis includes the ring relations times every unit
/// vector, so membership is decided by a single normal form.
#[derive(Clone, Debug)]
pub struct SubmoduleBasis {
    ring: Arc<PolyRing>,
    rank: usize,
    order: ModuleOrder,
    rows: Vec<Row>,
}

pub(crate) fn relation_rows(ring: &PolyRing, rank: usize, order: &ModuleOrder) -> Vec<Row> {
    let mut out = Vec::with_capacity(ring.relations().len() * rank);
    for j in 0..rank {
        for r in ring.relations() {
            let mut v = FreeVec::zero(rank);
            v.0[j] = r.clone();
            out.push(Row::from_vec(&v, order));
        }
    }
    out
}

pub(crate) fn gb_with_relations(
    ring: &PolyRing,
    rank: usize,
    gens: &[FreeVec],
    order: &ModuleOrder,
    names: &[String],
) -> Result<Vec<Row>> {
    let mut rows: Vec<Row> = gens.iter().map(|g| Row::from_vec(g, order)).collect();
    rows.extend(relation_rows(ring, rank, order));
    groebner(rows, order, &ring.budget(), rank == 1, names)
}

impl SubmoduleBasis {
    /// Default module order: the ring's monomial order, term over position.
    pub fn default_order(ring: &PolyRing) -> ModuleOrder {
        ModuleOrder::new(ring.order().clone(), PositionOrder::Top)
    }

    pub fn new(
        ring: Arc<PolyRing>,
        rank: usize,
        gens: &[FreeVec],
        order: ModuleOrder,
    ) -> Result<Self> {
        if let Some(g) = gens.iter().find(|g| g.rank() != rank) {
            return Err(Error::Rank(format!(
                "generator of rank {} in a module of rank {rank}",
                g.rank()
            )));
        }
        let rows = gb_with_relations(&ring, rank, gens, &order, ring.names())?;
        Ok(SubmoduleBasis {
            ring,
            rank,
            order,
            rows,
        })
    }

    pub fn with_default_order(ring: Arc<PolyRing>, rank: usize, gens: &[FreeVec]) -> Result<Self> {
        let order = SubmoduleBasis::default_order(&ring);
        SubmoduleBasis::new(ring, rank, gens, order)
    }

    pub fn ideal(ring: Arc<PolyRing>, gens: &[Poly]) -> Result<Self> {
        let vecs: Vec<FreeVec> = gens.iter().map(|g| FreeVec::new(vec![g.clone()])).collect();
        SubmoduleBasis::with_default_order(ring, 1, &vecs)
    }

    pub fn parse_ideal(ring: Arc<PolyRing>, gens: &[&str]) -> Result<Self> {
        let polys = gens
            .iter()
            .map(|g| ring.parse(g))
            .collect::<Result<Vec<_>>>()?;
        SubmoduleBasis::ideal(ring, &polys)
    }

    pub fn zero(ring: Arc<PolyRing>, rank: usize) -> Result<Self> {
        SubmoduleBasis::with_default_order(ring, rank, &[])
    }

    pub fn full(ring: Arc<PolyRing>, rank: usize) -> Result<Self> {
        let f = ring.field();
        let gens: Vec<FreeVec> = (0..rank).map(|j| FreeVec::unit(rank, j, f)).collect();
        SubmoduleBasis::with_default_order(ring, rank, &gens)
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn order(&self) -> &ModuleOrder {
        &self.order
    }

    /// The full reduced basis, ring relations included.
    pub fn basis(&self) -> Vec<FreeVec> {
        self.rows.iter().map(|r| r.to_vec(self.rank)).collect()
    }

    /// Basis elements that are nonzero modulo the ring relations.
    pub fn generators(&self) -> Vec<FreeVec> {
        self.basis()
            .into_iter()
            .filter(|v| !v.reduce_in(&self.ring).is_zero())
            .collect()
    }

    /// Leading `(monomial, position)` of every basis element.
    pub fn leading_terms(&self) -> Vec<(crate::poly::Monomial, usize)> {
        self.rows
            .iter()
            .map(|r| (r.lead().m.clone(), r.lead().pos))
            .collect()
    }

    pub fn with_order(&self, order: ModuleOrder) -> Result<Self> {
        SubmoduleBasis::new(self.ring.clone(), self.rank, &self.basis(), order)
    }

    pub fn normal_form(&self, v: &FreeVec) -> FreeVec {
        debug_assert_eq!(v.rank(), self.rank);
        let row = Row::from_vec(v, &self.order);
        let basis: Vec<&Row> = self.rows.iter().collect();
        reduce(row, &basis, &self.order, false).to_vec(self.rank)
    }

    pub fn contains(&self, v: &FreeVec) -> bool {
        self.normal_form(v).is_zero()
    }

    pub fn contains_poly(&self, p: &Poly) -> bool {
        self.contains(&FreeVec::new(vec![p.clone()]))
    }

    pub fn contains_all(&self, other: &SubmoduleBasis) -> bool {
        other
            .rows
            .iter()
            .all(|r| self.contains(&r.to_vec(self.rank)))
    }

    pub fn same_span(&self, other: &SubmoduleBasis) -> bool {
        self.rank == other.rank && self.contains_all(other) && other.contains_all(self)
    }

    /// True when every element is zero in the ring.
    pub fn is_zero(&self) -> bool {
        self.generators().is_empty()
    }

    /// True when the submodule is the whole free module.
    pub fn is_full(&self) -> bool {
        let f = self.ring.field();
        (0..self.rank).all(|j| self.contains(&FreeVec::unit(self.rank, j, f)))
    }

    pub fn sum(&self, other: &SubmoduleBasis) -> Result<SubmoduleBasis> {
        let mut gens = self.basis();
        gens.extend(other.basis());
        SubmoduleBasis::new(self.ring.clone(), self.rank, &gens, self.order.clone())
    }

    pub fn add_generators(&self, extra: &[FreeVec]) -> Result<SubmoduleBasis> {
        let mut gens = self.basis();
        gens.extend(extra.iter().cloned());
        SubmoduleBasis::new(self.ring.clone(), self.rank, &gens, self.order.clone())
    }

    /// Canonical texts of the nonzero basis elements; for ideals, plain
    /// polynomial texts.
    pub fn texts(&self) -> Vec<String> {
        self.generators()
            .iter()
            .map(|v| {
                if self.rank == 1 {
                    self.ring.text(&v.coords()[0])
                } else {
                    v.text(&self.ring)
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::MonomialOrder;

    fn ring(names: &[&str], rels: &[&str]) -> Arc<PolyRing> {
        PolyRing::parse_new(Field::Rational, names, None, rels).unwrap()
    }

    #[test]
    fn lex_basis_of_small_ideal() {
        let r = ring(&["x", "y"], &[]);
        let order = ModuleOrder::new(MonomialOrder::Lex, PositionOrder::Top);
        let gens = [
            FreeVec::parse(&r, &["x*y - 1"]).unwrap(),
            FreeVec::parse(&r, &["y^2 - 1"]).unwrap(),
        ];
        let n = SubmoduleBasis::new(r.clone(), 1, &gens, order).unwrap();
        let texts: Vec<String> = n
            .basis()
            .iter()
            .map(|v| v.coords()[0].to_text(r.names(), &MonomialOrder::Lex))
            .collect();
        assert_eq!(texts, vec!["x - y", "y^2 - 1"]);
        let nf = n.normal_form(&FreeVec::parse(&r, &["x^2*y"]).unwrap());
        assert_eq!(r.text(&nf.coords()[0]), "y");
    }

    #[test]
    fn rank_two_coordinate_module() {
        let r = ring(&["x"], &[]);
        let gens = [
            FreeVec::parse(&r, &["x", "0"]).unwrap(),
            FreeVec::parse(&r, &["0", "x"]).unwrap(),
        ];
        let n = SubmoduleBasis::with_default_order(r.clone(), 2, &gens).unwrap();
        assert_eq!(n.basis().len(), 2);
        assert!(n.contains(&FreeVec::parse(&r, &["x^2", "3*x"]).unwrap()));
        assert!(!n.contains(&FreeVec::parse(&r, &["1", "0"]).unwrap()));
    }

    #[test]
    fn unit_and_zero() {
        let r = ring(&["x", "y"], &[]);
        let i = SubmoduleBasis::parse_ideal(r.clone(), &["x", "y"]).unwrap();
        assert!(!i.contains_poly(&r.one()));
        let nf = i.normal_form(&FreeVec::new(vec![r.one()]));
        assert_eq!(r.text(&nf.coords()[0]), "1");
        assert!(SubmoduleBasis::zero(r.clone(), 2).unwrap().is_zero());
        assert!(SubmoduleBasis::full(r, 2).unwrap().is_full());
    }
}
