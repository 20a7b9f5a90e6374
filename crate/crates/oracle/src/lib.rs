//! Brute-force reference computations by dense linear algebra over the
//! rationals.
//!
//! Every operation works inside the space of vectors of total degree at
//! most `D`, spanned by `m·g` for input generators `g`. A result is accepted
//! once it agrees at `D` and `D + 2`. Only rational coefficients and the
//! graded reverse lexicographic order (position broken with lower index
//! first) are supported.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use formalpatch_core::{Coeff, Monomial, Poly};
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Largest degree bound tried before giving up.
pub const MAX_DEGREE: u32 = 14;

type Q = BigRational;
type Exps = Vec<u32>;
type Vector = BTreeMap<(Exps, usize), Q>;

#[derive(Clone, Copy, Debug)]
pub struct Space {
    pub nvars: usize,
    pub rank: usize,
}

fn grevlex(a: &[u32], b: &[u32]) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    if da != db {
        return da.cmp(&db);
    }
    for k in (0..a.len()).rev() {
        if a[k] != b[k] {
            return b[k].cmp(&a[k]);
        }
    }
    Ordering::Equal
}

fn term_cmp(a: &(Exps, usize), b: &(Exps, usize)) -> Ordering {
    grevlex(&a.0, &b.0).then(b.1.cmp(&a.1))
}

fn monomials_upto(nvars: usize, d: u32) -> Vec<Exps> {
    fn go(k: usize, left: u32, cur: &mut Exps, out: &mut Vec<Exps>) {
        if k == cur.len() {
            out.push(cur.clone());
            return;
        }
        for e in 0..=left {
            cur[k] = e;
            go(k + 1, left - e, cur, out);
        }
        cur[k] = 0;
    }
    let mut out = Vec::new();
    go(0, d, &mut vec![0; nvars], &mut out);
    out
}

fn degree(v: &Vector) -> u32 {
    v.keys().map(|(e, _)| e.iter().sum()).max().unwrap_or(0)
}

fn shift(v: &Vector, m: &[u32]) -> Vector {
    v.iter()
        .map(|((e, p), c)| {
            (
                ((e.iter().zip(m).map(|(a, b)| a + b).collect()), *p),
                c.clone(),
            )
        })
        .collect()
}

fn poly_to_rat(p: &Poly, nvars: usize) -> BTreeMap<Exps, Q> {
    p.terms()
        .iter()
        .map(|(m, c)| {
            let e: Exps = (0..nvars).map(|k| m.exp(k)).collect();
            let q = match c {
                Coeff::Rat(q) => q.clone(),
                Coeff::Mod { .. } => panic!("the oracle works over the rationals only"),
            };
            (e, q)
        })
        .collect()
}

fn to_vector(coords: &[Poly], nvars: usize) -> Vector {
    let mut v = Vector::new();
    for (pos, p) in coords.iter().enumerate() {
        for (e, q) in poly_to_rat(p, nvars) {
            v.insert((e, pos), q);
        }
    }
    v
}

fn from_vector(v: &Vector, rank: usize) -> Vec<Poly> {
    (0..rank)
        .map(|pos| {
            Poly::from_terms(
                v.iter()
                    .filter(|((_, p), _)| *p == pos)
                    .map(|((e, _), q)| (Monomial::from_exponents(e), Coeff::Rat(q.clone()))),
            )
        })
        .collect()
}

fn scale_poly(v: &Vector, f: &BTreeMap<Exps, Q>) -> Vector {
    let mut out = Vector::new();
    for ((e, p), c) in v {
        for (fe, fc) in f {
            let key: (Exps, usize) = (e.iter().zip(fe).map(|(a, b)| a + b).collect(), *p);
            let entry = out.entry(key).or_insert_with(Q::zero);
            *entry += c * fc;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Dense matrix over the listed columns, in descending term order.
struct Matrix {
    cols: Vec<(Exps, usize)>,
    index: BTreeMap<(Exps, usize), usize>,
}

impl Matrix {
    fn new(space: Space, d: u32) -> Matrix {
        let mut cols: Vec<(Exps, usize)> = monomials_upto(space.nvars, d)
            .into_iter()
            .flat_map(|e| (0..space.rank).map(move |p| (e.clone(), p)))
            .collect();
        cols.sort_by(|a, b| term_cmp(b, a));
        let index = cols
            .iter()
            .enumerate()
            .map(|(k, c)| (c.clone(), k))
            .collect();
        Matrix { cols, index }
    }

    fn row(&self, v: &Vector) -> Vec<Q> {
        let mut r = vec![Q::zero(); self.cols.len()];
        for (k, c) in v {
            r[self.index[k]] = c.clone();
        }
        r
    }

    fn vector(&self, r: &[Q]) -> Vector {
        r.iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (self.cols[k].clone(), c.clone()))
            .collect()
    }
}

/// Reduced row echelon form; rows with pivots in increasing column order.
fn rref(mut rows: Vec<Vec<Q>>) -> Vec<Vec<Q>> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&k| !rows[k][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = Q::one() / rows[r][c].clone();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot = rows[r].clone();
        for (k, row) in rows.iter_mut().enumerate() {
            if k != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
        }
        r += 1;
    }
    rows.truncate(r);
    rows
}

/// Combinations of `rows` that vanish on the columns in `cols`.
fn relations_on(rows: &[Vec<Q>], cols: &[usize]) -> Vec<Vec<Q>> {
    let n = rows.len();
    let aug: Vec<Vec<Q>> = rows
        .iter()
        .enumerate()
        .map(|(k, r)| {
            let mut v: Vec<Q> = cols.iter().map(|&c| r[c].clone()).collect();
            v.extend((0..n).map(|j| if j == k { Q::one() } else { Q::zero() }));
            v
        })
        .collect();
    let m = cols.len();
    rref(aug)
        .into_iter()
        .filter(|r| r[..m].iter().all(Zero::is_zero))
        .map(|r| r[m..].to_vec())
        .collect()
}

fn combine(rows: &[Vec<Q>], coeffs: &[Q]) -> Vec<Q> {
    let mut out = vec![Q::zero(); rows.first().map_or(0, Vec::len)];
    for (r, c) in rows.iter().zip(coeffs) {
        if c.is_zero() {
            continue;
        }
        for (x, y) in out.iter_mut().zip(r) {
            *x += c * y;
        }
    }
    out
}

/// Echelon basis of the degree-`d` part of the span of the generators.
fn macaulay(space: Space, gens: &[Vector], d: u32, mat: &Matrix) -> Vec<Vec<Q>> {
    let mut rows = Vec::new();
    for g in gens {
        let dg = degree(g);
        if dg > d {
            continue;
        }
        for m in monomials_upto(space.nvars, d - dg) {
            rows.push(mat.row(&shift(g, &m)));
        }
    }
    rref(rows)
}

fn reduced_basis(space: Space, gens: &[Vector], d: u32) -> Vec<Vector> {
    let mat = Matrix::new(space, d);
    let ech = macaulay(space, gens, d, &mat);
    let vecs: Vec<Vector> = ech.iter().map(|r| mat.vector(r)).collect();
    let leads: Vec<(Exps, usize)> = vecs
        .iter()
        .map(|v| v.keys().max_by(|a, b| term_cmp(a, b)).unwrap().clone())
        .collect();
    let divides = |a: &(Exps, usize), b: &(Exps, usize)| {
        a.1 == b.1 && a.0.iter().zip(&b.0).all(|(x, y)| x <= y)
    };
    let mut out: Vec<(usize, Vector)> = Vec::new();
    for (k, l) in leads.iter().enumerate() {
        let minimal = leads
            .iter()
            .enumerate()
            .all(|(j, o)| j == k || !divides(o, l));
        if minimal {
            out.push((k, vecs[k].clone()));
        }
    }
    out.sort_by(|a, b| term_cmp(&leads[b.0], &leads[a.0]));
    out.into_iter().map(|(_, v)| v).collect()
}

fn stabilize<F: Fn(u32) -> Vec<Vector>>(start: u32, f: F) -> Vec<Vector> {
    let mut d = start;
    let mut prev = f(d);
    while d + 2 <= MAX_DEGREE {
        let next = f(d + 2);
        if next == prev {
            return prev;
        }
        prev = next;
        d += 2;
    }
    panic!("oracle did not stabilize below degree {MAX_DEGREE}");
}

fn input(space: Space, gens: &[Vec<Poly>]) -> Vec<Vector> {
    gens.iter()
        .map(|g| {
            assert_eq!(g.len(), space.rank, "generator of the wrong rank");
            to_vector(g, space.nvars)
        })
        .filter(|v| !v.is_empty())
        .collect()
}

fn start_degree(gens: &[Vector]) -> u32 {
    gens.iter().map(degree).max().unwrap_or(0) + 2
}

fn output(space: Space, v: Vec<Vector>) -> Vec<Vec<Poly>> {
    v.iter().map(|x| from_vector(x, space.rank)).collect()
}

/// Reduced Gröbner basis, monic, sorted by descending leading term.
pub fn groebner(space: Space, gens: &[Vec<Poly>]) -> Vec<Vec<Poly>> {
    let g = input(space, gens);
    output(
        space,
        stabilize(start_degree(&g), |d| reduced_basis(space, &g, d)),
    )
}

fn intersect_at(space: Space, a: &[Vector], b: &[Vector], d: u32) -> Vec<Vector> {
    let mat = Matrix::new(space, d);
    let ea = macaulay(space, a, d, &mat);
    let eb = macaulay(space, b, d, &mat);
    let mut rows = ea.clone();
    rows.extend(eb.iter().map(|r| r.iter().map(|x| -x).collect::<Vec<_>>()));
    let all: Vec<usize> = (0..mat.cols.len()).collect();
    let common: Vec<Vector> = relations_on(&rows, &all)
        .iter()
        .map(|c| mat.vector(&combine(&ea, &c[..ea.len()])))
        .filter(|v| !v.is_empty())
        .collect();
    reduced_basis(space, &common, d)
}

pub fn intersect(space: Space, a: &[Vec<Poly>], b: &[Vec<Poly>]) -> Vec<Vec<Poly>> {
    let (a, b) = (input(space, a), input(space, b));
    let start = start_degree(&a).max(start_degree(&b));
    output(space, stabilize(start, |d| intersect_at(space, &a, &b, d)))
}

fn colon_at(space: Space, a: &[Vector], f: &BTreeMap<Exps, Q>, d: u32) -> Vec<Vector> {
    let df: u32 = f.keys().map(|e| e.iter().sum()).max().unwrap_or(0);
    if df > d {
        return Vec::new();
    }
    let mat = Matrix::new(space, d);
    let ea = macaulay(space, a, d, &mat);
    let unknowns: Vec<Vector> = monomials_upto(space.nvars, d - df)
        .into_iter()
        .flat_map(|e| (0..space.rank).map(move |p| Vector::from([((e.clone(), p), Q::one())])))
        .collect();
    let mut rows: Vec<Vec<Q>> = unknowns
        .iter()
        .map(|u| mat.row(&scale_poly(u, f)))
        .collect();
    rows.extend(ea.iter().map(|r| r.iter().map(|x| -x).collect::<Vec<_>>()));
    let all: Vec<usize> = (0..mat.cols.len()).collect();
    let n = unknowns.len();
    let found: Vec<Vector> = relations_on(&rows, &all)
        .iter()
        .map(|c| {
            let mut v = Vector::new();
            for (u, x) in unknowns.iter().zip(&c[..n]) {
                if !x.is_zero() {
                    let key = u.keys().next().unwrap().clone();
                    v.insert(key, x.clone());
                }
            }
            v
        })
        .filter(|v| !v.is_empty())
        .collect();
    reduced_basis(space, &found, d)
}

/// `(gens) : f`.
pub fn colon(space: Space, gens: &[Vec<Poly>], f: &Poly) -> Vec<Vec<Poly>> {
    let a = input(space, gens);
    let fr = poly_to_rat(f, space.nvars);
    let df = f.total_degree().unwrap_or(0);
    output(
        space,
        stabilize(start_degree(&a) + df, |d| colon_at(space, &a, &fr, d)),
    )
}

/// `(gens) : f^∞` by iterated colons.
pub fn saturate(space: Space, gens: &[Vec<Poly>], f: &Poly) -> Vec<Vec<Poly>> {
    let mut cur = groebner(space, gens);
    loop {
        let next = colon(space, &cur, f);
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

fn eliminate_at(space: Space, a: &[Vector], vars: &[usize], d: u32) -> Vec<Vector> {
    let mat = Matrix::new(space, d);
    let ea = macaulay(space, a, d, &mat);
    let bad: Vec<usize> = mat
        .cols
        .iter()
        .enumerate()
        .filter(|(_, (e, _))| vars.iter().any(|&v| e[v] > 0))
        .map(|(k, _)| k)
        .collect();
    let found: Vec<Vector> = relations_on(&ea, &bad)
        .iter()
        .map(|c| mat.vector(&combine(&ea, c)))
        .filter(|v| !v.is_empty())
        .collect();
    reduced_basis(space, &found, d)
}

/// Contraction to the variables outside `vars`, still indexed in the full
/// ring.
pub fn eliminate(space: Space, gens: &[Vec<Poly>], vars: &[usize]) -> Vec<Vec<Poly>> {
    let a = input(space, gens);
    output(
        space,
        stabilize(start_degree(&a), |d| eliminate_at(space, &a, vars, d)),
    )
}
