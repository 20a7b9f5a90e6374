use std::sync::Arc;

use formalpatch_core::{Field, FreeVec, Poly, PolyRing, SubmoduleBasis};
use formalpatch_oracle::{self as oracle, Space};

/// Ideals and submodules in at most three variables, degree at most three.
pub const CORPUS: &[&[&[&str]]] = &[
    &[&["x^2 - y"], &["x*y - z"]],
    &[&["x*y"], &["y*z"], &["x*z"]],
    &[&["x^3 - y*z"], &["y^2 - x*z"]],
    &[&["x^2 + y^2 + z^2 - 1"], &["x - y"]],
    &[&["x*y - z^2"], &["y^3 - x*z"]],
    &[&["x - y^2"], &["y - z^2"]],
    &[&["x^2"], &["y^2"], &["x*y*z"]],
    &[&["x*z - y^2"], &["y*z - x^2"], &["z^2 - x*y"]],
    &[&["x + y + z"], &["x*y + y*z + x*z"], &["x*y*z"]],
    &[&["x^2*y - z"], &["x*y^2 - z^2"]],
    &[&["x", "y"], &["y", "z"]],
    &[&["x^2", "0"], &["y", "x"], &["0", "z"]],
    &[&["x*y", "z"], &["z^2", "x - y"]],
];

const MULTIPLIERS: &[&str] = &["x", "y", "z", "x + y", "z - 1"];

fn ring() -> Arc<PolyRing> {
    PolyRing::parse_new(Field::Rational, &["x", "y", "z"], None, &[]).unwrap()
}

fn gens(r: &PolyRing, spec: &[&[&str]]) -> Vec<Vec<Poly>> {
    spec.iter()
        .map(|g| g.iter().map(|c| r.parse(c).unwrap()).collect())
        .collect()
}

fn engine(r: &Arc<PolyRing>, g: &[Vec<Poly>]) -> SubmoduleBasis {
    let v: Vec<FreeVec> = g.iter().map(|c| FreeVec::new(c.clone())).collect();
    SubmoduleBasis::with_default_order(r.clone(), g[0].len(), &v).unwrap()
}

fn engine_texts(r: &PolyRing, m: &SubmoduleBasis) -> Vec<String> {
    m.basis().iter().map(|v| v.text(r)).collect()
}

fn oracle_texts(r: &PolyRing, v: &[Vec<Poly>]) -> Vec<String> {
    v.iter().map(|c| FreeVec::new(c.clone()).text(r)).collect()
}

fn space(g: &[Vec<Poly>]) -> Space {
    Space {
        nvars: 3,
        rank: g[0].len(),
    }
}

#[test]
fn groebner_bases_match() {
    let r = ring();
    for spec in CORPUS {
        let g = gens(&r, spec);
        let e = engine_texts(&r, &engine(&r, &g));
        let o = oracle_texts(&r, &oracle::groebner(space(&g), &g));
        assert_eq!(e, o, "basis of {spec:?}");
    }
}

#[test]
fn intersections_match() {
    let r = ring();
    for (k, a) in CORPUS.iter().enumerate() {
        let b = CORPUS
            .iter()
            .skip(k + 1)
            .find(|b| b[0].len() == a[0].len())
            .unwrap_or(&CORPUS[0]);
        if b[0].len() != a[0].len() {
            continue;
        }
        let (ga, gb) = (gens(&r, a), gens(&r, b));
        let e = engine(&r, &ga).intersect(&engine(&r, &gb)).unwrap();
        let o = oracle::intersect(space(&ga), &ga, &gb);
        assert_eq!(engine_texts(&r, &e), oracle_texts(&r, &o), "{a:?} ∩ {b:?}");
    }
}

#[test]
fn colons_and_saturations_match() {
    let r = ring();
    for (k, spec) in CORPUS.iter().enumerate() {
        let g = gens(&r, spec);
        let f = r.parse(MULTIPLIERS[k % MULTIPLIERS.len()]).unwrap();
        let m = engine(&r, &g);
        let e = m.quotient_poly(&f).unwrap();
        let o = oracle::colon(space(&g), &g, &f);
        assert_eq!(
            engine_texts(&r, &e),
            oracle_texts(&r, &o),
            "{spec:?} : {}",
            r.text(&f)
        );
        let (e, _) = m.saturate(&f).unwrap();
        let o = oracle::saturate(space(&g), &g, &f);
        assert_eq!(
            engine_texts(&r, &e),
            oracle_texts(&r, &o),
            "{spec:?} : {}^inf",
            r.text(&f)
        );
    }
}

#[test]
fn eliminations_match() {
    let r = ring();
    let sub = PolyRing::parse_new(Field::Rational, &["y", "z"], None, &[]).unwrap();
    for spec in CORPUS.iter().filter(|s| s[0].len() == 1) {
        let g = gens(&r, spec);
        let e = engine(&r, &g).eliminate(&[0], sub.clone()).unwrap();
        let o = oracle::eliminate(space(&g), &g, &[0]);
        assert_eq!(
            engine_texts(&sub, &e),
            oracle_texts(&r, &o),
            "eliminate x from {spec:?}"
        );
    }
}
