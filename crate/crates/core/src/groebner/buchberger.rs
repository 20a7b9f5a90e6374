//! Buchberger's algorithm with sugar selection and the Gebauer–Möller
//! pair update.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::poly::{ModuleOrder, Monomial};

use super::row::{reduce, Row};
use super::Budget;

#[derive(Clone, Debug)]
struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
    pos: usize,
    sugar: u32,
}

fn pair_cmp(order: &ModuleOrder, a: &Pair, b: &Pair) -> Ordering {
    a.sugar
        .cmp(&b.sugar)
        .then_with(|| order.cmp((&a.lcm, a.pos), (&b.lcm, b.pos)))
        .then_with(|| (a.j, a.i).cmp(&(b.j, b.i)))
}

fn describe(m: &Monomial, pos: usize, names: &[String]) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.exponents().iter().enumerate() {
        if e == 0 {
            continue;
        }
        let n = names.get(i).map(String::as_str).unwrap_or("?");
        if e == 1 {
            parts.push(n.to_string());
        } else {
            parts.push(format!("{n}^{e}"));
        }
    }
    let mono = if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    };
    format!("lcm {mono} at position {pos}")
}

struct State<'a> {
    order: &'a ModuleOrder,
    polys: Vec<Row>,
    active: Vec<bool>,
    pairs: Vec<Pair>,
    product_criterion: bool,
}

impl State<'_> {
    fn make_pair(&self, i: usize, j: usize) -> Pair {
        let (a, b) = (&self.polys[i], &self.polys[j]);
        let (la, lb) = (a.lead(), b.lead());
        let lcm = la.m.lcm(&lb.m);
        let d = lcm.degree();
        let sugar = (a.sugar + d - la.m.degree()).max(b.sugar + d - lb.m.degree());
        Pair {
            i,
            j,
            lcm,
            pos: la.pos,
            sugar,
        }
    }

    fn coprime(&self, p: &Pair) -> bool {
        self.polys[p.i]
            .lead()
            .m
            .is_coprime(&self.polys[p.j].lead().m)
    }

    /// Gebauer–Möller update for a new element at index `h`.
    fn update(&mut self, h: usize) {
        let hpos = self.polys[h].lead().pos;
        let hm = self.polys[h].lead().m.clone();
        let mut c: Vec<Pair> = (0..h)
            .filter(|&g| self.active[g] && self.polys[g].lead().pos == hpos)
            .map(|g| self.make_pair(g, h))
            .collect();

        // Chain criterion among the new pairs.
        let mut d: Vec<Pair> = Vec::new();
        while let Some(p) = c.pop() {
            let keep = (self.product_criterion && self.coprime(&p))
                || (!c.iter().any(|q| q.lcm.divides(&p.lcm))
                    && !d.iter().any(|q| q.lcm.divides(&p.lcm)));
            if keep {
                d.push(p);
            }
        }
        let e: Vec<Pair> = d
            .into_iter()
            .filter(|p| !(self.product_criterion && self.coprime(p)))
            .collect();

        // Drop old pairs made redundant by the new leading term.
        let polys = &self.polys;
        self.pairs.retain(|p| {
            if p.pos != hpos || !hm.divides(&p.lcm) {
                return true;
            }
            let li = polys[p.i].lead().m.lcm(&hm);
            let lj = polys[p.j].lead().m.lcm(&hm);
            li == p.lcm || lj == p.lcm
        });
        self.pairs.extend(e);
        let order = self.order;
        // Keep the cheapest pair at the end for popping.
        self.pairs.sort_by(|a, b| pair_cmp(order, b, a));

        for g in 0..h {
            if self.active[g] {
                let l = self.polys[g].lead();
                if l.pos == hpos && hm.divides(&l.m) {
                    self.active[g] = false;
                }
            }
        }
        self.active.push(true);
    }

    fn insert(&mut self, row: Row) {
        self.polys.push(row);
        self.update(self.polys.len() - 1);
    }

    fn current_basis(&self) -> Vec<&Row> {
        self.polys
            .iter()
            .zip(&self.active)
            .filter(|(_, a)| **a)
            .map(|(r, _)| r)
            .collect()
    }
}

fn spoly(a: &Row, b: &Row, lcm: &Monomial, order: &ModuleOrder) -> Row {
    let (la, lb) = (a.lead(), b.lead());
    let qa = la.m.quotient_of(lcm);
    let qb = lb.m.quotient_of(lcm);
    // a and b are monic
    let scaled_a = Row {
        terms: a
            .terms
            .iter()
            .map(|t| super::row::Term {
                m: t.m.mul(&qa),
                pos: t.pos,
                c: t.c.clone(),
            })
            .collect(),
        sugar: a.sugar + qa.degree(),
    };
    scaled_a.sub_scaled(&lb.c.inv().mul(&la.c), &qb, b, order)
}

/// Reduced Gröbner basis of the rows, sorted by descending leading term.
///
/// `product_criterion` must only be enabled for rank-one input.
pub(crate) fn groebner(
    input: Vec<Row>,
    order: &ModuleOrder,
    budget: &Budget,
    product_criterion: bool,
    names: &[String],
) -> Result<Vec<Row>> {
    let mut gens: Vec<Row> = input.into_iter().filter(|r| !r.is_zero()).collect();
    for g in &mut gens {
        g.make_monic();
    }
    gens.sort_by(|a, b| {
        a.sugar
            .cmp(&b.sugar)
            .then_with(|| order.cmp((&a.lead().m, a.lead().pos), (&b.lead().m, b.lead().pos)))
    });

    let mut st = State {
        order,
        polys: Vec::new(),
        active: Vec::new(),
        pairs: Vec::new(),
        product_criterion,
    };
    for g in gens {
        let basis = st.current_basis();
        let mut r = reduce(g, &basis, order, false);
        if r.is_zero() {
            continue;
        }
        r.make_monic();
        st.insert(r);
    }

    let mut processed = 0usize;
    while let Some(p) = st.pairs.pop() {
        processed += 1;
        if processed > budget.max_pairs {
            return Err(Error::Budget {
                reason: format!("more than {} S-pairs", budget.max_pairs),
                pair: describe(&p.lcm, p.pos, names),
            });
        }
        if p.lcm.degree() > budget.max_degree {
            return Err(Error::Budget {
                reason: format!("S-pair degree above {}", budget.max_degree),
                pair: describe(&p.lcm, p.pos, names),
            });
        }
        let s = spoly(&st.polys[p.i], &st.polys[p.j], &p.lcm, order);
        let basis = st.current_basis();
        let mut r = reduce(s, &basis, order, false);
        if r.is_zero() {
            continue;
        }
        r.make_monic();
        st.insert(r);
    }

    let basis: Vec<Row> = st.current_basis().into_iter().cloned().collect();
    Ok(interreduce(basis, order))
}

/// Minimalise and fully interreduce a Gröbner basis.
pub(crate) fn interreduce(basis: Vec<Row>, order: &ModuleOrder) -> Vec<Row> {
    let mut minimal: Vec<Row> = Vec::new();
    for (k, g) in basis.iter().enumerate() {
        let l = g.lead();
        let redundant = basis.iter().enumerate().any(|(j, h)| {
            let hl = h.lead();
            j != k && hl.pos == l.pos && hl.m.divides(&l.m) && (hl.m != l.m || j < k)
        });
        if !redundant {
            minimal.push(g.clone());
        }
    }
    let mut out: Vec<Row> = Vec::with_capacity(minimal.len());
    for k in 0..minimal.len() {
        let g = &minimal[k];
        let others: Vec<&Row> = minimal
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != k)
            .map(|(_, r)| r)
            .collect();
        let head = Row {
            terms: vec![g.terms[0].clone()],
            sugar: g.sugar,
        };
        let tail = Row {
            terms: g.terms[1..].to_vec(),
            sugar: g.sugar,
        };
        let mut reduced_tail = reduce(tail, &others, order, false);
        let mut terms = head.terms;
        terms.append(&mut reduced_tail.terms);
        let mut r = Row {
            terms,
            sugar: g.sugar,
        };
        r.make_monic();
        out.push(r);
    }
    out.sort_by(|a, b| order.cmp((&b.lead().m, b.lead().pos), (&a.lead().m, a.lead().pos)));
    out
}
