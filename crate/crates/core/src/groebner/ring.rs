use std::env;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::poly::{parse_poly, Field, ModuleOrder, Monomial, MonomialOrder, Poly, PositionOrder};

use super::buchberger::groebner;
use super::row::{reduce, Row};

/// Limits that abort runaway Gröbner computations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_degree: u32,
    pub max_pairs: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_degree: 40,
            max_pairs: 200_000,
        }
    }
}

impl Budget {
    /// Default budget, overridden by `FORMALPATCH_BUDGET=DEG,PAIRS`.
    pub fn from_env() -> Self {
        env::var("FORMALPATCH_BUDGET")
            .ok()
            .and_then(|v| Budget::parse(&v))
            .unwrap_or_default()
    }

    pub fn parse(text: &str) -> Option<Self> {
        let (d, p) = text.split_once(',')?;
        Some(Budget {
            max_degree: d.trim().parse().ok()?,
            max_pairs: p.trim().parse().ok()?,
        })
    }
}

/// A presented ring `k[vars] / relations`.
///
/// Adjoined inverse variables (from localisation) form the greatest block of
/// the default order; the deformation variable, if any, is the smallest
/// variable of the remaining block.
#[derive(Clone, Debug)]
pub struct PolyRing {
    field: Field,
    names: Vec<String>,
    t: Option<usize>,
    inverted: Vec<(Poly, usize)>,
    relations: Vec<Poly>,
    relation_rows: Vec<Row>,
    order: MonomialOrder,
    budget: Budget,
}

impl PartialEq for PolyRing {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.names == other.names && self.relations == other.relations
    }
}

fn valid_name(n: &str) -> bool {
    let mut chars = n.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '\'')
}

impl PolyRing {
    pub fn new(
        field: Field,
        names: Vec<String>,
        t: Option<&str>,
        relations: Vec<Poly>,
    ) -> Result<Arc<PolyRing>> {
        for (i, n) in names.iter().enumerate() {
            if !valid_name(n) {
                return Err(Error::Ring(format!("invalid variable name `{n}`")));
            }
            if names[..i].contains(n) {
                return Err(Error::Ring(format!("duplicate variable `{n}`")));
            }
        }
        if names.len() > 16 {
            return Err(Error::Ring("at most 16 variables are supported".into()));
        }
        let t = match t {
            Some(name) => Some(
                names
                    .iter()
                    .position(|n| n == name)
                    .ok_or_else(|| Error::UnknownVariable(name.to_string()))?,
            ),
            None => None,
        };
        PolyRing::build(field, names, t, Vec::new(), relations, Budget::from_env())
    }

    /// Parse relation texts and build the ring.
    pub fn parse_new(
        field: Field,
        names: &[&str],
        t: Option<&str>,
        relations: &[&str],
    ) -> Result<Arc<PolyRing>> {
        let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let rels = relations
            .iter()
            .map(|r| parse_poly(r, &names, field))
            .collect::<Result<Vec<_>>>()?;
        PolyRing::new(field, names, t, rels)
    }

    fn build(
        field: Field,
        names: Vec<String>,
        t: Option<usize>,
        inverted: Vec<(Poly, usize)>,
        relations: Vec<Poly>,
        budget: Budget,
    ) -> Result<Arc<PolyRing>> {
        let order = default_order(names.len(), t, &inverted);
        let morder = ModuleOrder::new(order.clone(), PositionOrder::Top);
        let rows: Vec<Row> = relations
            .iter()
            .map(|p| Row::from_vec(&super::FreeVec::new(vec![p.clone()]), &morder))
            .collect();
        let gb = groebner(rows, &morder, &budget, true, &names)?;
        let relations: Vec<Poly> = gb
            .iter()
            .map(|r| r.to_vec(1).into_coords().remove(0))
            .collect();
        Ok(Arc::new(PolyRing {
            field,
            names,
            t,
            inverted,
            relations,
            relation_rows: gb,
            order,
            budget,
        }))
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn t(&self) -> Option<usize> {
        self.t
    }

    pub fn t_poly(&self) -> Option<Poly> {
        self.t.map(|i| self.var_poly(i))
    }

    pub fn var(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn var_poly(&self, i: usize) -> Poly {
        Poly::var(self.field, i)
    }

    pub fn one(&self) -> Poly {
        Poly::one(self.field)
    }

    /// Localisation data `(f, index of u)` with `u·f = 1`.
    pub fn inverted(&self) -> &[(Poly, usize)] {
        &self.inverted
    }

    pub fn inverse_vars(&self) -> Vec<usize> {
        self.inverted.iter().map(|(_, u)| *u).collect()
    }

    /// Reduced Gröbner basis of the defining relations under [`Self::order`].
    pub fn relations(&self) -> &[Poly] {
        &self.relations
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.order
    }

    pub fn budget(&self) -> Budget {
        self.budget
    }

    pub fn with_budget(&self, budget: Budget) -> Arc<PolyRing> {
        let mut r = self.clone();
        r.budget = budget;
        Arc::new(r)
    }

    pub fn is_unit_ring(&self) -> bool {
        self.relations
            .iter()
            .any(|p| p.is_constant() && !p.is_zero())
    }

    pub fn add_relations(&self, extra: Vec<Poly>) -> Result<Arc<PolyRing>> {
        let mut rels = self.relations.clone();
        rels.extend(extra);
        PolyRing::build(
            self.field,
            self.names.clone(),
            self.t,
            self.inverted.clone(),
            rels,
            self.budget,
        )
    }

    /// `self[u] / (u·f - 1)` with `u` named `name`.
    pub fn adjoin_inverse(&self, f: &Poly, name: &str) -> Result<Arc<PolyRing>> {
        if self.var(name).is_some() {
            return Err(Error::Ring(format!("variable `{name}` already present")));
        }
        let u = self.nvars();
        let mut names = self.names.clone();
        names.push(name.to_string());
        let mut inverted = self.inverted.clone();
        inverted.push((f.clone(), u));
        let mut rels = self.relations.clone();
        rels.push(&(&Poly::var(self.field, u) * f) - &self.one());
        PolyRing::build(self.field, names, self.t, inverted, rels, self.budget)
    }

    /// `self / (t^i)`.
    pub fn truncate(&self, i: u32) -> Result<Arc<PolyRing>> {
        let t = self
            .t
            .ok_or_else(|| Error::Ring("ring has no deformation variable".into()))?;
        self.add_relations(vec![Poly::monomial(Monomial::var(t, i), self.field.one())])
    }

    pub fn parse(&self, text: &str) -> Result<Poly> {
        parse_poly(text, &self.names, self.field)
    }

    pub fn text(&self, p: &Poly) -> String {
        p.to_text(&self.names, &self.order)
    }

    /// Normal form modulo the relations.
    pub fn reduce(&self, p: &Poly) -> Poly {
        if self.relation_rows.is_empty() || p.is_zero() {
            return p.clone();
        }
        let morder = ModuleOrder::new(self.order.clone(), PositionOrder::Top);
        let row = Row::from_vec(&super::FreeVec::new(vec![p.clone()]), &morder);
        let basis: Vec<&Row> = self.relation_rows.iter().collect();
        reduce(row, &basis, &morder, false)
            .to_vec(1)
            .into_coords()
            .remove(0)
    }

    pub fn is_zero(&self, p: &Poly) -> bool {
        self.reduce(p).is_zero()
    }

    /// `map[i]` is the index in `self` of variable `i` of `from`.
    pub fn var_map_from(&self, from: &PolyRing) -> Vec<Option<usize>> {
        from.names.iter().map(|n| self.var(n)).collect()
    }

    /// Transport a polynomial of `from` into `self` by variable names.
    pub fn embed(&self, p: &Poly, from: &PolyRing) -> Result<Poly> {
        p.remap(&self.var_map_from(from)).ok_or_else(|| {
            Error::Ring(format!(
                "`{}` uses variables missing from the target ring",
                from.text(p)
            ))
        })
    }
}

fn default_order(n: usize, t: Option<usize>, inverted: &[(Poly, usize)]) -> MonomialOrder {
    let inv: Vec<usize> = inverted.iter().map(|(_, u)| *u).collect();
    let mut rest: Vec<usize> = (0..n)
        .filter(|v| !inv.contains(v) && Some(*v) != t)
        .collect();
    if let Some(t) = t {
        rest.push(t);
    }
    let mut blocks = Vec::new();
    if !inv.is_empty() {
        blocks.push(inv);
    }
    if !rest.is_empty() {
        blocks.push(rest);
    }
    MonomialOrder::Block(blocks)
}

/// Block order with `first` as greatest block, the rest keeping `base`'s
/// block structure.
pub(crate) fn elimination_order(
    base: &MonomialOrder,
    first: &[usize],
    nvars: usize,
) -> MonomialOrder {
    let mut blocks: Vec<Vec<usize>> = vec![first.to_vec()];
    match base {
        MonomialOrder::Block(bs) => {
            for b in bs {
                let kept: Vec<usize> = b.iter().copied().filter(|v| !first.contains(v)).collect();
                if !kept.is_empty() {
                    blocks.push(kept);
                }
            }
        }
        _ => {
            let rest: Vec<usize> = (0..nvars).filter(|v| !first.contains(v)).collect();
            if !rest.is_empty() {
                blocks.push(rest);
            }
        }
    }
    blocks.retain(|b| !b.is_empty());
    MonomialOrder::Block(blocks)
}
