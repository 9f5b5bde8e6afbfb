//! Seeded generators for groups, choices, automorphisms and scales.
//!
//! All randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `seed_from_u64`; each suite draws from its own stream of the same seed.

use haarcalc_core::arith::{gcd, prime_power};
use haarcalc_core::lca::divisors;
use haarcalc_core::linalg::{Matrix, Scalar};
use haarcalc_core::{
    Atom, Block, ChoiceParam, CompactOpenChoice, GroupExpr, Morphism, Payload, PositiveReal,
    PrimeExponentVector,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const PRNG: &str = "ChaCha8 (rand_chacha), seed_from_u64, one stream per suite";

pub type Gen = ChaCha8Rng;

pub fn generator(seed: u64, stream: u64) -> Gen {
    let mut g = ChaCha8Rng::seed_from_u64(seed);
    g.set_stream(stream);
    g
}

const PRIMES: [u64; 5] = [2, 3, 5, 7, 11];
const RESIDUES: [u64; 8] = [2, 3, 4, 5, 7, 8, 9, 25];
const LABELS: [&str; 3] = ["Rd", "Qd", "V"];

pub fn atom(g: &mut Gen, allow_real: bool) -> Atom {
    let residue = *RESIDUES.choose(g).unwrap();
    match g.random_range(0..if allow_real { 9 } else { 8 }) {
        0 => Atom::LocalField(residue),
        1 => Atom::IntegerRing(residue),
        2 => Atom::Prufer(residue),
        3 => Atom::Integers,
        4 => Atom::Circle,
        5 | 6 => Atom::Cyclic(g.random_range(2..=36)),
        7 => Atom::Blackbox(LABELS.choose(g).unwrap().to_string()),
        _ => Atom::RealLine,
    }
}

fn expr_from(g: &mut Gen, max_terms: usize, allow_real: bool) -> GroupExpr {
    let n = g.random_range(0..=max_terms);
    let atoms: Vec<(Atom, u32)> = (0..n)
        .map(|_| (atom(g, allow_real), g.random_range(1..=2)))
        .collect();
    GroupExpr::new(atoms).expect("generated atoms are valid")
}

/// A vector-free group with at most `max_terms` summands.
pub fn vf_expr(g: &mut Gen, max_terms: usize) -> GroupExpr {
    expr_from(g, max_terms, false)
}

/// Any group, real lines included.
pub fn expr(g: &mut Gen, max_terms: usize) -> GroupExpr {
    expr_from(g, max_terms, true)
}

/// A finite group: a sum of cyclic groups.
pub fn finite_expr(g: &mut Gen, max_terms: usize) -> GroupExpr {
    let n = g.random_range(1..=max_terms);
    let atoms: Vec<(Atom, u32)> = (0..n)
        .map(|_| (Atom::Cyclic(g.random_range(2..=60)), g.random_range(1..=2)))
        .collect();
    GroupExpr::new(atoms).expect("cyclic atoms are valid")
}

pub fn choice(g: &mut Gen, x: &GroupExpr) -> CompactOpenChoice {
    let params = x
        .occurrences()
        .map(|a| match a {
            Atom::LocalField(_) => ChoiceParam::Ideal(g.random_range(-3..=3)),
            Atom::IntegerRing(_) => ChoiceParam::Depth(g.random_range(0..=3)),
            Atom::Prufer(_) => ChoiceParam::Torsion(g.random_range(0..=3)),
            Atom::Cyclic(n) => ChoiceParam::Divisor(*divisors(*n).choose(g).unwrap()),
            _ => ChoiceParam::Fixed,
        })
        .collect();
    CompactOpenChoice::new(x, params).expect("generated choice is valid")
}

fn nonzero(g: &mut Gen, bound: i64) -> i64 {
    let v = g.random_range(1..=bound);
    if g.random_bool(0.5) {
        -v
    } else {
        v
    }
}

fn ratio(num: i64, den: i64) -> Scalar {
    Scalar::rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
}

/// Integer in `1..=bound` prime to `p`, with random sign.
fn unit_integer(g: &mut Gen, p: u64, bound: i64) -> i64 {
    loop {
        let v = nonzero(g, bound);
        if !v.unsigned_abs().is_multiple_of(p) {
            return v;
        }
    }
}

fn p_unit(g: &mut Gen, p: u64) -> Scalar {
    ratio(unit_integer(g, p, 30), unit_integer(g, p, 30).abs())
}

fn unit_mod(g: &mut Gen, n: u64) -> i64 {
    loop {
        let v = g.random_range(1..=n.max(2) * 2) as i64;
        if gcd(v as u64 % n, n) == 1 || n == 1 {
            return if g.random_bool(0.3) {
                v - 3 * n as i64
            } else {
                v
            };
        }
    }
}

fn sign(g: &mut Gen) -> i64 {
    if g.random_bool(0.5) {
        1
    } else {
        -1
    }
}

fn permutation(g: &mut Gen, k: usize) -> Vec<usize> {
    let mut sigma: Vec<usize> = (0..k).collect();
    sigma.shuffle(g);
    sigma
}

/// `U * P` with `U` upper triangular: `diag(i)` on the diagonal and
/// `above()` strictly above it.
fn triangular_times_permutation(
    g: &mut Gen,
    k: usize,
    mut diag: impl FnMut(&mut Gen, usize) -> Scalar,
    mut above: impl FnMut(&mut Gen) -> Scalar,
) -> Matrix {
    let rows = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| match i.cmp(&j) {
                    std::cmp::Ordering::Equal => diag(g, i),
                    std::cmp::Ordering::Less => above(g),
                    std::cmp::Ordering::Greater => Scalar::zero(),
                })
                .collect()
        })
        .collect();
    let u = Matrix::new(rows).expect("square");
    u.mul(&Matrix::permutation(&permutation(g, k)))
        .expect("same size")
}

fn symbol_or_rational(g: &mut Gen, symbols: bool) -> Scalar {
    if symbols && g.random_bool(0.4) {
        let name = *["c", "e", "pi"].choose(g).unwrap();
        Scalar::symbol_term(
            BigRational::new(nonzero(g, 5).into(), g.random_range(1..=5i64).into()),
            name,
            nonzero(g, 2),
        )
    } else {
        ratio(nonzero(g, 12), g.random_range(1..=12))
    }
}

fn block(g: &mut Gen, atom: &Atom, k: u32, symbols: bool) -> Payload {
    let k = k as usize;
    let use_matrix = k > 1 && g.random_bool(0.5);
    match atom {
        Atom::RealLine => {
            if use_matrix {
                Payload::Matrix(triangular_times_permutation(
                    g,
                    k,
                    |g, _| symbol_or_rational(g, symbols),
                    |g| ratio(g.random_range(-4..=4), 1),
                ))
            } else {
                Payload::Scale(symbol_or_rational(g, symbols))
            }
        }
        Atom::LocalField(q) => {
            let (p, f) = prime_power(*q).expect("residue");
            let pv = |g: &mut Gen| {
                let v = g.random_range(-2..=2i32);
                let unit = p_unit(g, p);
                let power = Scalar::rational(BigRational::from_integer(BigInt::from(p)).pow(v));
                unit.mul(&power)
            };
            if f > 1 {
                if g.random_bool(0.5) {
                    Payload::Valuation(g.random_range(-3..=3))
                } else {
                    Payload::Scale(Scalar::integer(unit_integer(g, p, 20)))
                }
            } else if use_matrix {
                Payload::Matrix(triangular_times_permutation(
                    g,
                    k,
                    |g, _| pv(g),
                    |g| ratio(g.random_range(-9..=9), g.random_range(1..=4)),
                ))
            } else {
                Payload::Scale(pv(g))
            }
        }
        Atom::IntegerRing(q) | Atom::Prufer(q) => {
            let (p, f) = prime_power(*q).expect("residue");
            if f == 1 && use_matrix {
                Payload::Matrix(triangular_times_permutation(
                    g,
                    k,
                    |g, _| p_unit(g, p),
                    |g| Scalar::integer(g.random_range(-9..=9)),
                ))
            } else if f == 1 {
                Payload::Scale(p_unit(g, p))
            } else {
                Payload::Scale(Scalar::integer(unit_integer(g, p, 20)))
            }
        }
        Atom::Integers | Atom::Circle => {
            if use_matrix {
                Payload::Matrix(triangular_times_permutation(
                    g,
                    k,
                    |g, _| Scalar::integer(sign(g)),
                    |g| Scalar::integer(g.random_range(-5..=5)),
                ))
            } else {
                Payload::Scale(Scalar::integer(sign(g)))
            }
        }
        Atom::Cyclic(n) => {
            let n = *n;
            if use_matrix {
                Payload::Matrix(triangular_times_permutation(
                    g,
                    k,
                    |g, _| Scalar::integer(unit_mod(g, n)),
                    |g| Scalar::integer(g.random_range(0..n as i64)),
                ))
            } else {
                Payload::Scale(Scalar::integer(unit_mod(g, n)))
            }
        }
        Atom::Blackbox(_) => {
            // opaque groups only admit coordinate permutations beyond the sign
            if k > 1 {
                Payload::Permutation(permutation(g, k))
            } else {
                Payload::Scale(Scalar::integer(sign(g)))
            }
        }
    }
}

/// A random automorphism; symbolic scalars appear on real lines only when `symbols`.
pub fn automorphism(g: &mut Gen, x: &GroupExpr, symbols: bool) -> Morphism {
    let blocks = x
        .atoms()
        .iter()
        .map(|(a, k)| {
            let payload = if g.random_bool(0.15) {
                Payload::Identity
            } else {
                block(g, a, *k, symbols)
            };
            Block::new(a.clone(), payload)
        })
        .collect();
    let f = Morphism::endo(x, blocks).expect("well formed blocks");
    debug_assert!(f.is_automorphism(), "{f}");
    f
}

/// `a/b` with small prime factors.
pub fn positive_rational(g: &mut Gen) -> PositiveReal {
    let mut pairs = vec![];
    for p in PRIMES {
        if g.random_bool(0.4) {
            pairs.push((p, g.random_range(-3..=3)));
        }
    }
    PrimeExponentVector::from_pairs(pairs)
        .expect("primes")
        .into()
}

/// A rational times a monomial in a couple of symbols.
pub fn positive_real(g: &mut Gen) -> PositiveReal {
    let mut out = positive_rational(g);
    for name in ["c", "e"] {
        if g.random_bool(0.5) {
            out = out.mul(&PositiveReal::symbol_power(name, nonzero(g, 3)));
        }
    }
    out
}
