//! The seeded acceptance suite behind `haarcalc selftest`.
//!
//! Every criterion draws from its own ChaCha8 stream of the one seed, so the
//! criteria can run in any order or alone and still see the same inputs.

use haarcalc_core::diagram::{holonomy, Diagram, Edge};
use haarcalc_core::gg::{gg_build, gg_loop, gg_pi0, objects, Hom};
use haarcalc_core::haar::{
    check_axioms, glue, haq_membership, pushforward, root_measure, split, AxiomCase, Filtration,
    HaarElement,
};
use haarcalc_core::ktheory::{k0_class, k1_class};
use haarcalc_core::lca::{divisors, generalized_index};
use haarcalc_core::linalg::Scalar;
use haarcalc_core::morphism::{compose, mod_of};
use haarcalc_core::scalar::factorize;
use haarcalc_core::torsor::{basechange, signature_check, Base, TorsorElement};
use haarcalc_core::{
    Atom, ChoiceParam, CompactOpenChoice, ExactSequence, GroupExpr, Morphism, PositiveReal,
    PrimeExponentVector, Result, SequenceKind,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::parse::parse_expr;
use crate::random::{self, Gen};
use crate::report::exponents;

pub const DEFAULT_SEED: u64 = 20240601;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Criterion {
    pub id: u32,
    pub name: &'static str,
    pub pass: bool,
    pub details: Value,
}

pub const NAMES: [&str; 12] = [
    "multiplication-by-5 grid",
    "K1 valuation identity",
    "two-arrow holonomy",
    "vector-free holonomy is rational",
    "root measure well defined",
    "determinant functor axioms",
    "rational Haar measures closed",
    "homomorphism laws",
    "devissage",
    "Gillet-Grayson components",
    "signature triviality",
    "parser round trip",
];

/// Tally of checks with the first failure kept for the report.
#[derive(Default)]
struct Tally {
    checked: u64,
    failed: u64,
    first_failure: Option<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failed += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(describe());
            }
        }
    }

    /// Errors count as failures.
    fn check_result(&mut self, r: Result<bool>, describe: impl FnOnce() -> String) {
        match r {
            Ok(ok) => self.check(ok, describe),
            Err(e) => self.check(false, || format!("{}: {e}", describe())),
        }
    }

    fn pass(&self) -> bool {
        self.failed == 0 && self.checked > 0
    }

    fn json(&self) -> Value {
        let mut v = json!({"checked": self.checked, "failed": self.failed});
        if let Some(f) = &self.first_failure {
            v["first_failure"] = json!(f);
        }
        v
    }
}

fn criterion(id: u32, tally: &Tally, mut extra: Value) -> Criterion {
    let mut details = tally.json();
    if let (Some(d), Some(e)) = (details.as_object_mut(), extra.as_object_mut()) {
        d.append(e);
    }
    Criterion {
        id,
        name: NAMES[id as usize - 1],
        pass: tally.pass(),
        details,
    }
}

fn q(n: u64, d: u64) -> PositiveReal {
    factorize(n, d).expect("nonzero").into()
}

fn pow(p: u64, e: i64) -> PositiveReal {
    PrimeExponentVector::prime_power(p, e).into()
}

fn expr(atoms: &[(Atom, u32)]) -> GroupExpr {
    GroupExpr::new(atoms.iter().cloned()).expect("valid atoms")
}

pub fn multiplication_grid() -> Criterion {
    let mut t = Tally::default();
    for a in 0..=3u32 {
        for b in 0..=3u32 {
            for c in 0..=3u32 {
                let x = expr(&[
                    (Atom::LocalField(5), a),
                    (Atom::RealLine, b),
                    (Atom::LocalField(3), c),
                ]);
                let got = Morphism::scalar(&x, Scalar::integer(5)).and_then(|f| mod_of(&f));
                let want = pow(5, b as i64 - a as i64);
                t.check_result(got.map(|m| m == want), || format!("A={a} B={b} C={c}"));
            }
        }
    }
    criterion(1, &t, json!({"grid": "A, B, C in 0..=3"}))
}

pub fn valuation_identity() -> Criterion {
    let mut t = Tally::default();
    let mut classes = serde_json::Map::new();
    for p in [2u64, 3, 5, 7, 11] {
        let x = expr(&[(Atom::LocalField(p), 1)]);
        let f = Morphism::scalar(&x, Scalar::integer(p as i64)).expect("scalar");
        let k1 = k1_class(&f);
        t.check_result(
            k1.as_ref()
                .map(|k| *k == PrimeExponentVector::prime_power(p, -1))
                .map_err(Clone::clone),
            || format!("k1 on Qp({p})"),
        );
        if let Ok(k) = &k1 {
            classes.insert(p.to_string(), exponents(k));
        }
        let pushed = pushforward(&f, &HaarElement::canonical(&x)).map(|mu| mu.scale == q(1, p));
        t.check_result(pushed, || format!("pushforward on Qp({p})"));
    }
    criterion(2, &t, json!({"k1": classes}))
}

fn two_arrows(p: u64, alpha: Scalar) -> Result<Diagram> {
    let x = expr(&[(Atom::LocalField(p), 1)]);
    Diagram::new(
        vec![x.clone(), x.clone()],
        vec![
            Edge {
                from: 0,
                to: 1,
                morphism: Morphism::scalar(&x, alpha)?,
            },
            Edge {
                from: 0,
                to: 1,
                morphism: Morphism::identity(&x),
            },
        ],
    )
}

pub fn two_arrow_holonomy(seed: u64) -> Criterion {
    let mut g = random::generator(seed, 3);
    let mut t = Tally::default();
    for p in [2u64, 3, 5, 7, 11] {
        for r in -2..=2i32 {
            // alpha = u * p^r with u a random p-adic unit
            let unit = loop {
                let u = g.random_range(1..=40i64);
                if !(u as u64).is_multiple_of(p) {
                    break if g.random_bool(0.5) { -u } else { u };
                }
            };
            let alpha = Scalar::rational(
                BigRational::from_integer(BigInt::from(unit))
                    * BigRational::from_integer(BigInt::from(p)).pow(r),
            );
            let result = two_arrows(p, alpha).and_then(|d| {
                let basis = d.cycle_basis();
                let h = holonomy(&d, &[(0, true), (1, false)])?;
                let from_basis = basis
                    .iter()
                    .map(|c| holonomy(&d, c))
                    .collect::<Result<Vec<_>>>()?;
                Ok(basis.len() == 1
                    && h == pow(p, -(r as i64))
                    && h.is_rational()
                    && from_basis[0] == h)
            });
            t.check_result(result, || format!("p={p} r={r} unit={unit}"));
        }
    }
    criterion(3, &t, json!({"primes": [2, 3, 5, 7, 11], "r": "-2..=2"}))
}

/// Vertices come in isomorphism classes; every edge is an automorphism of its class.
fn random_diagram(g: &mut Gen) -> Diagram {
    let n = g.random_range(1..=8usize);
    let classes = g.random_range(1..=n.min(3));
    let groups: Vec<GroupExpr> = (0..classes).map(|_| random::vf_expr(g, 3)).collect();
    let class_of: Vec<usize> = (0..n).map(|_| g.random_range(0..classes)).collect();
    let m = g.random_range(0..=16usize);
    let mut edges = vec![];
    for _ in 0..m {
        let from = g.random_range(0..n);
        let peers: Vec<usize> = (0..n).filter(|&v| class_of[v] == class_of[from]).collect();
        let to = peers[g.random_range(0..peers.len())];
        let morphism = random::automorphism(g, &groups[class_of[from]], false);
        edges.push(Edge { from, to, morphism });
    }
    let vertices = class_of.iter().map(|&c| groups[c].clone()).collect();
    Diagram::new(vertices, edges).expect("generated diagram is valid")
}

pub fn vector_free_holonomy(seed: u64) -> Criterion {
    let mut g = random::generator(seed, 4);
    let mut t = Tally::default();
    let mut cycles = 0u64;
    let mut nontrivial = 0u64;
    for i in 0..200 {
        let d = random_diagram(&mut g);
        t.check(d.is_vector_free(), || {
            format!("diagram {i} is not vector free")
        });
        for c in d.cycle_basis() {
            cycles += 1;
            let h = holonomy(&d, &c);
            if let Ok(h) = &h {
                if !h.is_one() {
                    nontrivial += 1;
                }
            }
            t.check_result(h.map(|h| h.symbolic_part().is_empty()), || {
                format!("diagram {i}, cycle {c:?}")
            });
        }
    }
    // R with mul(c) against the identity picks up the transcendental c
    let r = expr(&[(Atom::RealLine, 1)]);
    let c = Scalar::symbol_term(BigRational::from_integer(BigInt::from(1)), "c", 1);
    let witness = Morphism::scalar(&r, c).and_then(|f| {
        let d = Diagram::new(
            vec![r.clone(), r.clone()],
            vec![
                Edge {
                    from: 0,
                    to: 1,
                    morphism: f,
                },
                Edge {
                    from: 0,
                    to: 1,
                    morphism: Morphism::identity(&r),
                },
            ],
        )?;
        holonomy(&d, &d.cycle_basis()[0])
    });
    let witness_value = witness.as_ref().map(|h| h.to_string()).unwrap_or_default();
    t.check_result(witness.map(|h| !h.is_rational()), || {
        "symbolic witness on R".into()
    });
    criterion(
        4,
        &t,
        json!({"diagrams": 200, "cycles": cycles, "nontrivial_cycles": nontrivial, "witness": witness_value}),
    )
}

pub fn root_measure_well_defined(seed: u64) -> Criterion {
    let mut g = random::generator(seed, 5);
    let mut t = Tally::default();
    for i in 0..100 {
        let x = random::vf_expr(&mut g, 4);
        let (c, c2) = (random::choice(&mut g, &x), random::choice(&mut g, &x));
        let ok = (|| {
            let ratio = root_measure(&x, &c)?
                .scale
                .div(&root_measure(&x, &c2)?.scale);
            Ok(ratio == generalized_index(&x, &c2, &c)?.into())
        })();
        t.check_result(ok, || format!("ratio {i}: {x}; {c}; {c2}"));
    }
    for i in 0..200 {
        let x = random::vf_expr(&mut g, 4);
        let cs: Vec<CompactOpenChoice> = (0..3).map(|_| random::choice(&mut g, &x)).collect();
        let ok = (|| {
            let lhs =
                generalized_index(&x, &cs[0], &cs[1])?.mul(&generalized_index(&x, &cs[1], &cs[2])?);
            Ok(lhs == generalized_index(&x, &cs[0], &cs[2])?)
        })();
        t.check_result(ok, || format!("cocycle {i}: {x}"));
    }
    criterion(5, &t, json!({"ratio_triples": 100, "cocycle_triples": 200}))
}

/// Every catalog filtration whose parameters stay within 3.
pub fn small_filtrations() -> Vec<Filtration> {
    let mut out = vec![];
    for q in [2u64, 3, 4, 5, 7, 8, 9] {
        for a in 0..=3u32 {
            for b in 0..=a {
                out.push(Filtration::ring_ideals(q, a, b).expect("nested"));
            }
        }
        for a in -3..=3i64 {
            for b in -3..=a {
                out.push(Filtration::field_ideals(q, a, b).expect("nested"));
            }
        }
    }
    let mut moduli = vec![];
    for a in 0..=3u32 {
        for b in 0..=3u32 {
            moduli.push(2u64.pow(a) * 3u64.pow(b));
        }
    }
    moduli.extend([5, 25, 125]);
    for &n in &moduli {
        for m in divisors(n) {
            out.push(Filtration::integers(n, m).expect("divides"));
        }
        if n > 1 {
            for d1 in divisors(n) {
                for d2 in divisors(n).into_iter().filter(|d| d % d1 == 0) {
                    out.push(Filtration::cyclic(n, d1, d2).expect("nested"));
                }
            }
        }
    }
    for p in [2u64, 3] {
        let x = expr(&[
            (Atom::LocalField(p), 1),
            (Atom::IntegerRing(p), 1),
            (Atom::Prufer(p), 1),
            (Atom::Cyclic(p * p), 1),
        ]);
        let choices: Vec<Vec<ChoiceParam>> = (0..4i64 * 4 * 4 * 3)
            .map(|k| {
                vec![
                    ChoiceParam::Ideal(k % 4),
                    ChoiceParam::Depth((k / 4 % 4) as u32),
                    ChoiceParam::Torsion((k / 16 % 4) as u32),
                    ChoiceParam::Divisor(p.pow((k / 64) as u32)),
                ]
            })
            .collect();
        for inner in &choices {
            for outer in &choices {
                if let Ok(f) = Filtration::tower(&x, inner.clone(), outer.clone()) {
                    out.push(f);
                }
            }
        }
    }
    out
}

pub fn axioms(seed: u64) -> Criterion {
    let mut g = random::generator(seed, 6);
    let mut t = Tally::default();
    let mut counts = [0u64; 3];
    let mut run = |t: &mut Tally, case: AxiomCase, slot: usize| {
        counts[slot] += 1;
        let label = format!("{case:?}");
        t.check_result(check_axioms(&case).map(|r| r.pass), || label);
    };
    for _ in 0..50 {
        let x = random::expr(&mut g, 4);
        let f = random::automorphism(&mut g, &x, true);
        run(&mut t, AxiomCase::Axiom3(f), 0);
    }
    for f in small_filtrations() {
        run(&mut t, AxiomCase::Axiom4(f), 1);
    }
    for _ in 0..50 {
        let a = random::expr(&mut g, 3);
        let b = random::expr(&mut g, 3);
        run(&mut t, AxiomCase::Axiom5(a, b), 2);
    }
    criterion(
        6,
        &t,
        json!({"axiom3": counts[0], "axiom4": counts[1], "axiom5": counts[2]}),
    )
}

fn catalog_closure(g: &mut Gen, mu: &HaarElement, t: &mut Tally, i: usize) {
    let x = &mu.group;
    let f = random::automorphism(g, x, false);
    let c = random::choice(g, x);
    let label = || format!("element {i}: {mu}");
    let result = (|| {
        let mut ok = haq_membership(mu)?;
        ok &= haq_membership(&pushforward(&f, mu)?)?;
        let y = random::vf_expr(g, 2);
        let mut sequences = vec![
            ExactSequence::compact_open(x, &c)?,
            ExactSequence::make(SequenceKind::IsoLeft(f.clone()))?,
            ExactSequence::make(SequenceKind::IsoRight(f.clone()))?,
        ];
        // x split off as the first summand of x + y
        let sum = ExactSequence::sum_split(x, &y)?;
        for s in sequences.drain(..).chain([sum.clone()]) {
            let whole = if s.total() == x {
                mu.clone()
            } else {
                HaarElement::new(s.total().clone(), mu.scale.clone())
            };
            let parts = split(&s, &whole)?;
            ok &= haq_membership(&parts.sub)? && haq_membership(&parts.quot)?;
            let back = glue(&s, &parts.sub, &parts.quot)?;
            ok &= haq_membership(&back)? && back == whole;
        }
        Ok(ok)
    })();
    t.check_result(result, label);
}

pub fn rational_closure(seed: u64) -> Criterion {
    let mut g = random::generator(seed, 7);
    let mut t = Tally::default();
    for i in 0..100 {
        let x = random::vf_expr(&mut g, 4);
        let mu = HaarElement::new(x, random::positive_rational(&mut g));
        catalog_closure(&mut g, &mu, &mut t, i);
    }
    // fixed catalog sequences on canonical measures
    let fixed = [
        ExactSequence::uniformizer(5),
        ExactSequence::uniformizer(9),
        ExactSequence::mult_n_z(6),
        ExactSequence::mult_n_t(4),
        ExactSequence::make(SequenceKind::MultUnifPrufer(3)),
        ExactSequence::make(SequenceKind::IdealFiltration { q: 2, a: 3, b: 1 }),
    ];
    for (i, s) in fixed.into_iter().enumerate() {
        let ok = s.and_then(|s| {
            let parts = split(&s, &HaarElement::canonical(s.total()))?;
            Ok(haq_membership(&parts.sub)?
                && haq_membership(&parts.quot)?
                && haq_membership(&glue(&s, &parts.sub, &parts.quot)?)?)
        });
        t.check_result(ok, || format!("catalog sequence {i}"));
    }
    criterion(7, &t, json!({"elements": 100}))
}

pub fn homomorphism_laws(seed: u64) -> Criterion {
    let mut g = random::generator(seed, 8);
    let mut t = Tally::default();
    for i in 0..100 {
        let x = random::vf_expr(&mut g, 4);
        let f = random::automorphism(&mut g, &x, false);
        let h = random::automorphism(&mut g, &x, false);
        let ok = (|| {
            let hf = compose(&h, &f)?;
            let module = mod_of(&hf)? == mod_of(&h)?.mul(&mod_of(&f)?);
            let k1 = k1_class(&hf)? == k1_class(&h)?.mul(&k1_class(&f)?);
            let mut triangle = true;
            for m in [&f, &h, &hf] {
                let torsor = TorsorElement::new(Base::Rational, k1_class(m)?.into())?;
                triangle &= *basechange(&torsor)?.scale() == mod_of(m)?;
            }
            Ok(module && k1 && triangle)
        })();
        t.check_result(ok, || format!("pair {i} on {x}: {f}; {h}"));
    }
    // module is multiplicative with real lines too
    for i in 0..100 {
        let x = random::expr(&mut g, 3);
        let f = random::automorphism(&mut g, &x, true);
        let h = random::automorphism(&mut g, &x, true);
        let ok = compose(&h, &f).and_then(|hf| Ok(mod_of(&hf)? == mod_of(&h)?.mul(&mod_of(&f)?)));
        t.check_result(ok, || format!("real pair {i} on {x}"));
    }
    criterion(
        8,
        &t,
        json!({"vector_free_pairs": 100, "general_pairs": 100}),
    )
}

pub fn devissage(seed: u64) -> Criterion {
    let mut g = random::generator(seed, 9);
    let mut t = Tally::default();
    let z12 = k0_class(&expr(&[(Atom::Cyclic(12), 1)]));
    let want = PrimeExponentVector::from_pairs([(2, 2), (3, 1)]).expect("primes");
    let z12_json = z12.as_ref().map(exponents).unwrap_or(Value::Null);
    t.check_result(z12.map(|k| k == want), || "k0(Z/12)".into());
    for i in 0..50 {
        let s = if g.random_bool(0.3) {
            ExactSequence::sum_split(
                &random::finite_expr(&mut g, 2),
                &random::finite_expr(&mut g, 2),
            )
        } else {
            let x = random::finite_expr(&mut g, 3);
            let c = random::choice(&mut g, &x);
            ExactSequence::compact_open(&x, &c)
        };
        let ok = s
            .and_then(|s| Ok(k0_class(s.total())? == k0_class(s.sub())?.mul(&k0_class(s.quot())?)));
        t.check_result(ok, || format!("sequence {i}"));
    }
    criterion(9, &t, json!({"k0_z12": z12_json, "sequences": 50}))
}

pub fn gillet_grayson() -> Criterion {
    let mut t = Tally::default();
    let mut runs = vec![];
    for cap in [2u32, 3] {
        let result = gg_build(2, cap).map(|c| (gg_pi0(&c), c));
        match result {
            Ok((r, c)) => {
                t.check(r.edges_checked == r.edge_count, || {
                    format!("cap {cap}: not every edge checked")
                });
                t.check(r.difference_constant, || {
                    format!("cap {cap}: length difference not constant")
                });
                t.check(r.diagonal_connected, || {
                    format!("cap {cap}: (0,0) and (P,P) not joined")
                });
                for obj in c.objects() {
                    t.check_result(
                        gg_loop(obj, &Hom::identity(obj)).map(|l| l.is_degenerate()),
                        || format!("loop on {obj}"),
                    );
                }
                runs.push(json!({
                    "prime": 2,
                    "max_length": cap,
                    "vertices": r.vertex_count,
                    "sequences": r.sequence_count,
                    "edges": r.edge_count,
                    "components": r.components.len(),
                    "unmerged_differences": r.unmerged(),
                }));
            }
            Err(e) => t.check(false, || format!("cap {cap}: {e}")),
        }
    }
    // nondegenerate loops on every object of length at most 2
    for obj in objects(2, 2).expect("small cap") {
        for f in Hom::all(&obj, &obj)
            .into_iter()
            .filter(|f| f.is_automorphism(&obj))
        {
            t.check_result(
                gg_loop(&obj, &f).map(|l| l.is_degenerate() == (f == Hom::identity(&obj))),
                || format!("loop {f:?} on {obj}"),
            );
        }
    }
    criterion(10, &t, json!({"complexes": runs}))
}

pub fn signature(seed: u64) -> Criterion {
    let mut g = random::generator(seed, 11);
    let mut t = Tally::default();
    for i in 0..50 {
        for base in [Base::Rational, Base::Real] {
            let scale = match base {
                Base::Rational => random::positive_rational(&mut g),
                Base::Real => random::positive_real(&mut g),
            };
            let ok = TorsorElement::new(base, scale).map(|x| signature_check(&x).is_one());
            t.check_result(ok, || format!("torsor {i} over {base}"));
        }
    }
    criterion(11, &t, json!({"per_base": 50}))
}

pub fn parser_round_trip(seed: u64) -> Criterion {
    let mut g = random::generator(seed, 12);
    let mut t = Tally::default();
    for _ in 0..200 {
        let x = random::expr(&mut g, 5);
        let printed = x.to_string();
        let ok = match parse_expr(&printed) {
            Ok(y) => y == x && y.to_string() == printed,
            Err(_) => false,
        };
        t.check(ok, || printed.clone());
    }
    criterion(12, &t, json!({"expressions": 200}))
}

pub fn run_one(id: u32, seed: u64) -> Option<Criterion> {
    Some(match id {
        1 => multiplication_grid(),
        2 => valuation_identity(),
        3 => two_arrow_holonomy(seed),
        4 => vector_free_holonomy(seed),
        5 => root_measure_well_defined(seed),
        6 => axioms(seed),
        7 => rational_closure(seed),
        8 => homomorphism_laws(seed),
        9 => devissage(seed),
        10 => gillet_grayson(),
        11 => signature(seed),
        12 => parser_round_trip(seed),
        _ => return None,
    })
}

pub fn run_all(seed: u64) -> Vec<Criterion> {
    (1..=12).filter_map(|id| run_one(id, seed)).collect()
}

/// `results` and verdicts for the selftest report.
pub fn summary(seed: u64, criteria: &[Criterion]) -> Value {
    json!({
        "seed": seed,
        "prng": random::PRNG,
        "criteria": criteria,
        "passed": criteria.iter().filter(|c| c.pass).count(),
        "total": criteria.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_criteria_pass() {
        for c in [multiplication_grid(), valuation_identity()] {
            assert!(c.pass, "{c:?}");
        }
    }

    #[test]
    fn filtrations_cover_towers() {
        let all = small_filtrations();
        assert!(
            all.iter()
                .filter(
                    |f| matches!(f, Filtration::Tower { group, .. } if group.atoms().len() == 4)
                )
                .count()
                > 1000
        );
        assert!(all
            .iter()
            .any(|f| matches!(f, Filtration::Integers { n: 216, m: 8 })));
    }
}
