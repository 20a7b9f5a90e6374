//! Seeded invariant suite over random small ideals, plus the tower laws of
//! every bundled tower.

use formalpatch_core::par::Exec;
use formalpatch_core::surface::BaseRing;
use formalpatch_core::{Field, FreeVec, Poly, PolyRing, SubmoduleBasis};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::commands;
use crate::error::CliError;
use crate::report::{Record, Report};

const CASES: usize = 12;
const TOWER_DEPTH: u32 = 3;

fn random_poly(rng: &mut ChaCha8Rng, ring: &PolyRing) -> Poly {
    const MONOMIALS: &[&str] = &["1", "x", "y", "t", "x^2", "x*y", "y^2", "x*t", "y*t", "t^2"];
    let terms = rng.gen_range(1..=3);
    let text = (0..terms)
        .map(|_| {
            format!(
                "{}*{}",
                rng.gen_range(-3..=3),
                MONOMIALS.choose(rng).expect("monomials")
            )
        })
        .collect::<Vec<_>>()
        .join(" + ");
    ring.parse(&text).expect("generated text parses")
}

fn nonzero(rng: &mut ChaCha8Rng, ring: &PolyRing) -> Poly {
    loop {
        let p = random_poly(rng, ring);
        if !p.is_zero() {
            return p;
        }
    }
}

struct Tally {
    name: &'static str,
    failures: Vec<String>,
}

impl Tally {
    fn new(name: &'static str) -> Tally {
        Tally {
            name,
            failures: Vec::new(),
        }
    }

    fn expect(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok && self.failures.len() < 3 {
            self.failures.push(what());
        }
    }

    fn record(self, seed: u64) -> Record {
        let mut w = vec![format!("{CASES} cases, seed {seed}")];
        let ok = self.failures.is_empty();
        w.extend(self.failures);
        Record::check(self.name, 0, ok, w)
    }
}

fn algebra(seed: u64) -> Result<Vec<Record>, CliError> {
    let base = BaseRing::new(Field::Rational, &["x", "y", "t"], &[], "t")?;
    let ring = base.ring().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut arith = Tally::new("arithmetic-laws");
    let mut texts = Tally::new("text-round-trip");
    let mut gb = Tally::new("groebner-membership");
    let mut inter = Tally::new("intersection-bounds");
    let mut colon = Tally::new("colon-bounds");
    let mut sat = Tally::new("saturation-witness");
    for _ in 0..CASES {
        let a = random_poly(&mut rng, &ring);
        let b = random_poly(&mut rng, &ring);
        let c = random_poly(&mut rng, &ring);
        arith.expect(&(&a + &b) * &c == &(&a * &c) + &(&b * &c), || {
            "distributivity".into()
        });
        arith.expect(&a * &b == &b * &a, || "commutativity".into());
        texts.expect(ring.parse(&ring.text(&a)).ok().as_ref() == Some(&a), || {
            ring.text(&a)
        });

        let gens = [nonzero(&mut rng, &ring), nonzero(&mut rng, &ring)];
        let i = SubmoduleBasis::ideal(ring.clone(), &gens)?;
        let again = SubmoduleBasis::ideal(
            ring.clone(),
            &i.generators()
                .iter()
                .map(|v| v.coords()[0].clone())
                .collect::<Vec<_>>(),
        )?;
        gb.expect(gens.iter().all(|g| i.contains_poly(g)), || {
            format!("({})", i.texts().join(", "))
        });
        gb.expect(again.texts() == i.texts(), || "basis is not reduced".into());
        let nf = i.normal_form(&FreeVec::new(vec![a.clone()]));
        gb.expect(i.normal_form(&nf) == nf, || {
            "normal form is not idempotent".into()
        });

        let j = SubmoduleBasis::ideal(ring.clone(), &[nonzero(&mut rng, &ring)])?;
        let ij = i.intersect(&j)?;
        inter.expect(i.contains_all(&ij) && j.contains_all(&ij), || {
            "intersection escapes".into()
        });
        let prods: Vec<Poly> = gens
            .iter()
            .map(|g| g * &j.generators()[0].coords()[0])
            .collect();
        inter.expect(prods.iter().all(|p| ij.contains_poly(p)), || {
            "missing products".into()
        });

        let g = nonzero(&mut rng, &ring);
        let q = i.quotient_poly(&g)?;
        colon.expect(i.generators().iter().all(|v| q.contains(v)), || {
            "I is not inside I : g".into()
        });
        colon.expect(
            q.generators().iter().all(|v| i.contains(&v.scale(&g))),
            || "g*(I : g) escapes I".into(),
        );

        let s = nonzero(&mut rng, &ring);
        let (st, k) = i.saturate(&s)?;
        let sk = s.pow(k);
        sat.expect(
            st.generators().iter().all(|v| i.contains(&v.scale(&sk))),
            || format!("s = {}, k = {k}", ring.text(&s)),
        );
    }
    Ok([arith, texts, gb, inter, colon, sat]
        .into_iter()
        .map(|t| t.record(seed))
        .collect())
}

pub fn selftest(seed: u64, exec: Exec) -> Result<Report, CliError> {
    let mut records = algebra(seed)?;
    for (name, _) in crate::BUNDLED {
        let inst = crate::bundled(name).expect("bundled");
        if inst.file.tower.is_none() {
            continue;
        }
        for mut r in commands::tower_verify(&inst, Some(TOWER_DEPTH), exec)?.records {
            r.name = format!("{name}/{}", r.name);
            records.push(r);
        }
    }
    Ok(Report::new("selftest", "bundled", records))
}
