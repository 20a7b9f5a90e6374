//! Sparse module elements sorted under a fixed module order.

use std::cmp::Ordering;

use crate::poly::{Coeff, ModuleOrder, Monomial, Poly};

use super::FreeVec;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Term {
    pub m: Monomial,
    pub pos: usize,
    pub c: Coeff,
}

/// A free-module element as terms in strictly descending module order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Row {
    pub terms: Vec<Term>,
    pub sugar: u32,
}

impl Row {
    pub fn from_vec(v: &FreeVec, order: &ModuleOrder) -> Row {
        let mut terms: Vec<Term> = v
            .coords()
            .iter()
            .enumerate()
            .flat_map(|(pos, p)| {
                p.terms().iter().map(move |(m, c)| Term {
                    m: m.clone(),
                    pos,
                    c: c.clone(),
                })
            })
            .collect();
        terms.sort_by(|a, b| order.cmp((&b.m, b.pos), (&a.m, a.pos)));
        let sugar = terms.iter().map(|t| t.m.degree()).max().unwrap_or(0);
        Row { terms, sugar }
    }

    pub fn to_vec(&self, rank: usize) -> FreeVec {
        let mut coords: Vec<Vec<(Monomial, Coeff)>> = vec![Vec::new(); rank];
        for t in &self.terms {
            coords[t.pos].push((t.m.clone(), t.c.clone()));
        }
        FreeVec::new(coords.into_iter().map(Poly::from_terms).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn lead(&self) -> &Term {
        &self.terms[0]
    }

    pub fn make_monic(&mut self) {
        if let Some(first) = self.terms.first() {
            if first.c.is_one() {
                return;
            }
            let inv = first.c.inv();
            for t in &mut self.terms {
                t.c = t.c.mul(&inv);
            }
        }
    }

    pub fn involves_any(&self, vars: &[usize]) -> bool {
        self.terms.iter().any(|t| t.m.involves_any(vars))
    }

    /// `self - c * m * other`.
    pub fn sub_scaled(&self, c: &Coeff, m: &Monomial, other: &Row, order: &ModuleOrder) -> Row {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let a = &self.terms;
        let mut i = 0;
        let mut shifted = other.terms.iter().map(|t| Term {
            m: t.m.mul(m),
            pos: t.pos,
            c: t.c.mul(c).neg(),
        });
        let mut pending = shifted.next();
        while let Some(b) = pending.take() {
            while i < a.len() && order.cmp((&a[i].m, a[i].pos), (&b.m, b.pos)) == Ordering::Greater
            {
                out.push(a[i].clone());
                i += 1;
            }
            if i < a.len() && a[i].pos == b.pos && a[i].m == b.m {
                let s = a[i].c.add(&b.c);
                if !s.is_zero() {
                    out.push(Term {
                        m: b.m,
                        pos: b.pos,
                        c: s,
                    });
                }
                i += 1;
            } else {
                out.push(b);
            }
            pending = shifted.next();
        }
        out.extend(a[i..].iter().cloned());
        let sugar = self.sugar.max(other.sugar + m.degree());
        Row { terms: out, sugar }
    }
}

/// Index of the first basis element whose leading term divides `(m, pos)`.
fn find_divisor(basis: &[&Row], masks: &[u64], m: &Monomial, pos: usize) -> Option<usize> {
    let mask = m.support_mask();
    basis.iter().enumerate().position(|(k, g)| {
        let l = g.lead();
        l.pos == pos && masks[k] & !mask == 0 && l.m.divides(m)
    })
}

/// Complete reduction of `row` by `basis`. With `top_only` the process
/// stops at the first irreducible leading term.
pub(crate) fn reduce(row: Row, basis: &[&Row], order: &ModuleOrder, top_only: bool) -> Row {
    let masks: Vec<u64> = basis.iter().map(|g| g.lead().m.support_mask()).collect();
    let mut done: Vec<Term> = Vec::new();
    let mut rest = row;
    while !rest.terms.is_empty() {
        let (m, pos, c) = {
            let l = rest.lead();
            (l.m.clone(), l.pos, l.c.clone())
        };
        match find_divisor(basis, &masks, &m, pos) {
            Some(k) => {
                let g = basis[k];
                let q = g.lead().m.quotient_of(&m);
                let factor = c.div(&g.lead().c);
                rest = rest.sub_scaled(&factor, &q, g, order);
            }
            None => {
                if top_only {
                    done.append(&mut rest.terms);
                    break;
                }
                let t = rest.terms.remove(0);
                done.push(t);
            }
        }
    }
    Row {
        terms: done,
        sugar: rest.sugar,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_poly, Field, MonomialOrder, PositionOrder};

    #[test]
    fn subtraction_cancels_leading_terms() {
        let names: Vec<String> = vec!["x".into(), "y".into()];
        let q = Field::Rational;
        let order = ModuleOrder::new(MonomialOrder::Lex, PositionOrder::Top);
        let f = FreeVec::new(vec![parse_poly("x^2 + y", &names, q).unwrap()]);
        let g = FreeVec::new(vec![parse_poly("x - y", &names, q).unwrap()]);
        let rf = Row::from_vec(&f, &order);
        let rg = Row::from_vec(&g, &order);
        let r = reduce(rf, &[&rg], &order, false);
        let v = r.to_vec(1);
        assert_eq!(v.coords()[0], parse_poly("y^2 + y", &names, q).unwrap());
    }
}
