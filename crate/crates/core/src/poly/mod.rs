//! Exact multivariate polynomials over `Q` or `F_p`.

mod coeff;
mod monomial;
mod order;
mod parse;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

pub use coeff::{Coeff, Field};
pub use monomial::Monomial;
pub use order::{ModuleOrder, MonomialOrder, PositionOrder};
pub use parse::parse_poly;

/// A polynomial as a finite sum of terms with nonzero coefficients.
///
/// Terms are stored in descending lexicographic order of their exponent
/// vectors, which makes structural equality coincide with polynomial
/// equality. Presentation orders are applied only when printing or when the
/// Gröbner engine converts to its own representation.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    terms: Vec<(Monomial, Coeff)>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: Coeff) -> Self {
        Poly::monomial(Monomial::one(), c)
    }

    pub fn one(field: Field) -> Self {
        Poly::constant(field.one())
    }

    pub fn from_i64(field: Field, n: i64) -> Self {
        Poly::constant(field.from_i64(n))
    }

    pub fn monomial(m: Monomial, c: Coeff) -> Self {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly {
                terms: vec![(m, c)],
            }
        }
    }

    pub fn var(field: Field, index: usize) -> Self {
        Poly::monomial(Monomial::var(index, 1), field.one())
    }

    /// Builds a polynomial from arbitrary terms, combining duplicates.
    pub fn from_terms<I: IntoIterator<Item = (Monomial, Coeff)>>(terms: I) -> Self {
        let mut acc: BTreeMap<Monomial, Coeff> = BTreeMap::new();
        for (m, c) in terms {
            match acc.get_mut(&m) {
                Some(existing) => *existing = existing.add(&c),
                None => {
                    acc.insert(m, c);
                }
            }
        }
        let terms = acc
            .into_iter()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .collect();
        Poly { terms }
    }

    pub fn terms(&self) -> &[(Monomial, Coeff)] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<(Monomial, Coeff)> {
        self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn field(&self) -> Option<Field> {
        self.terms.first().map(|(_, c)| c.field())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.is_one())
    }

    /// The constant coefficient if the polynomial is a nonzero constant.
    pub fn as_constant(&self) -> Option<&Coeff> {
        match self.terms.as_slice() {
            [(m, c)] if m.is_one() => Some(c),
            _ => None,
        }
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.iter().map(|(m, _)| m.degree()).max()
    }

    /// One past the highest variable index occurring.
    pub fn width(&self) -> usize {
        self.terms.iter().map(|(m, _)| m.width()).max().unwrap_or(0)
    }

    pub fn involves_any(&self, vars: &[usize]) -> bool {
        self.terms.iter().any(|(m, _)| m.involves_any(vars))
    }

    pub fn leading(&self, order: &MonomialOrder) -> Option<&(Monomial, Coeff)> {
        self.terms.iter().max_by(|a, b| order.cmp(&a.0, &b.0))
    }

    pub fn scale(&self, c: &Coeff) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, d)| (m.clone(), d.mul(c)))
                .collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Poly {
        let terms: Vec<_> = self
            .terms
            .iter()
            .map(|(n, c)| (n.mul(m), c.clone()))
            .collect();
        // multiplication by a monomial preserves lex order
        Poly { terms }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let field = match self.field() {
            Some(f) => f,
            None => {
                return if e == 0 {
                    panic!("0^0 has no field")
                } else {
                    Poly::zero()
                }
            }
        };
        let mut result = Poly::one(field);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Exact division by a monomial, if every term is divisible.
    pub fn div_monomial(&self, m: &Monomial) -> Option<Poly> {
        if !self.terms.iter().all(|(n, _)| m.divides(n)) {
            return None;
        }
        Some(Poly {
            terms: self
                .terms
                .iter()
                .map(|(n, c)| (m.quotient_of(n), c.clone()))
                .collect(),
        })
    }

    /// Relabel variables (see [`Monomial::remap`]).
    pub fn remap(&self, map: &[Option<usize>]) -> Option<Poly> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            terms.push((m.remap(map)?, c.clone()));
        }
        Some(Poly::from_terms(terms))
    }

    /// Substitute polynomials for variables.
    pub fn substitute(&self, images: &[Poly], field: Field) -> Poly {
        let mut acc = Poly::zero();
        for (m, c) in &self.terms {
            let mut term = Poly::constant(c.clone());
            for (i, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    let img = images
                        .get(i)
                        .cloned()
                        .unwrap_or_else(|| Poly::var(field, i));
                    term = &term * &img.pow(e);
                }
            }
            acc = &acc + &term;
        }
        acc
    }

    /// Image in `F_p`; `None` if a denominator is divisible by `p`.
    pub fn reduce_mod(&self, p: u32) -> Option<Poly> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            terms.push((m.clone(), c.reduce_mod(p)?));
        }
        Some(Poly::from_terms(terms))
    }

    fn merge(&self, other: &Poly, negate: bool) -> Poly {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let a = &self.terms;
        let b = &other.terms;
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Less => {
                    let c = if negate { b[j].1.neg() } else { b[j].1.clone() };
                    out.push((b[j].0.clone(), c));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = if negate {
                        a[i].1.sub(&b[j].1)
                    } else {
                        a[i].1.add(&b[j].1)
                    };
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        for t in &b[j..] {
            let c = if negate { t.1.neg() } else { t.1.clone() };
            out.push((t.0.clone(), c));
        }
        Poly { terms: out }
    }

    /// Canonical text under `order`, leading term first.
    pub fn to_text(&self, names: &[String], order: &MonomialOrder) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut sorted: Vec<&(Monomial, Coeff)> = self.terms.iter().collect();
        sorted.sort_by(|a, b| order.cmp(&b.0, &a.0));
        let mut out = String::new();
        for (k, (m, c)) in sorted.into_iter().enumerate() {
            let negative = c.is_negative();
            if k == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let abs = c.abs();
            let mono = monomial_text(m, names);
            match (mono.is_empty(), abs.is_one()) {
                (true, _) => write!(out, "{abs}").unwrap(),
                (false, true) => out.push_str(&mono),
                (false, false) => write!(out, "{abs}*{mono}").unwrap(),
            }
        }
        out
    }
}

fn monomial_text(m: &Monomial, names: &[String]) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.exponents().iter().enumerate() {
        if e == 0 {
            continue;
        }
        let name = names.get(i).map(String::as_str).unwrap_or("?");
        if e == 1 {
            parts.push(name.to_string());
        } else {
            parts.push(format!("{name}^{e}"));
        }
    }
    parts.join("*")
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.merge(rhs, false)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.merge(rhs, true)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.neg()))
                .collect(),
        }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let (small, large) = if self.len() <= rhs.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut acc = Poly::zero();
        for (m, c) in &small.terms {
            let row = Poly {
                terms: large
                    .terms
                    .iter()
                    .map(|(n, d)| (n.mul(m), d.mul(c)))
                    .collect(),
            };
            acc = &acc + &row;
        }
        acc
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}
