//! Text syntax for groups, scalars, morphisms, compact open choices,
//! catalog sequences, filtrations and diagrams.
//!
//! ```text
//! expr := term ("+" term)*          term := atom ("^" nat)?
//! atom := R | Qp(p) | Zp(p) | Prufer(q) | K(q) | O(q) | Z | T | Z/n | D(label)
//! ```
//!
//! The empty string and `0` denote the zero group.

use std::str::FromStr;

use haarcalc_core::arith::{is_prime, prime_power};
use haarcalc_core::diagram::{Diagram, Edge, Step};
use haarcalc_core::haar::Filtration;
use haarcalc_core::linalg::{Matrix, Scalar};
use haarcalc_core::sequence::SequenceKind;
use haarcalc_core::{
    Atom, Block, ChoiceParam, CompactOpenChoice, GroupExpr, Morphism, Payload, PositiveReal,
    PrimeExponentVector,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::Value;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{message} (at position {position})")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

fn err<T>(position: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        position,
        message: message.into(),
    })
}

fn core_err<T>(position: usize, e: haarcalc_core::Error) -> Result<T, ParseError> {
    err(position, e.to_string())
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Self { src, pos: 0 }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos == self.src.len()
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<(), ParseError> {
        if self.eat(token) {
            Ok(())
        } else {
            let found = self
                .rest()
                .chars()
                .next()
                .map_or("end of input".to_string(), |c| format!("'{c}'"));
            err(self.pos, format!("expected '{token}', found {found}"))
        }
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> &'a str {
        self.skip_ws();
        let start = self.pos;
        let len = self
            .rest()
            .find(|c: char| !pred(c))
            .unwrap_or(self.rest().len());
        self.pos += len;
        &self.src[start..self.pos]
    }

    fn nat(&mut self) -> Result<u64, ParseError> {
        let start = {
            self.skip_ws();
            self.pos
        };
        let digits = self.take_while(|c| c.is_ascii_digit());
        if digits.is_empty() {
            return err(start, "expected a natural number");
        }
        digits
            .parse()
            .or_else(|_| err(start, format!("{digits} is too large")))
    }

    fn int(&mut self) -> Result<i64, ParseError> {
        let negative = self.eat("-");
        let start = self.pos;
        let n = self.nat()?;
        let n = i64::try_from(n).or_else(|_| err(start, "integer out of range"))?;
        Ok(if negative { -n } else { n })
    }

    fn ident(&mut self) -> Result<&'a str, ParseError> {
        self.skip_ws();
        let start = self.pos;
        if !self
            .rest()
            .starts_with(|c: char| c.is_ascii_alphabetic() || c == '_')
        {
            return err(start, "expected a name");
        }
        Ok(self.take_while(|c| c.is_ascii_alphanumeric() || c == '_'))
    }
}

fn atom(c: &mut Cursor) -> Result<Atom, ParseError> {
    c.skip_ws();
    let start = c.pos;
    let residue = |c: &mut Cursor, need_prime: bool, suggest: &str| -> Result<u64, ParseError> {
        let at = {
            c.skip_ws();
            c.pos
        };
        let q = c.nat()?;
        c.expect(")")?;
        if need_prime && !is_prime(q) {
            if prime_power(q).is_some() {
                return err(
                    at,
                    format!("{q} is not prime; for residue cardinality {q} write {suggest}({q})"),
                );
            }
            return err(at, format!("{q} is not prime"));
        }
        if prime_power(q).is_none() {
            return err(at, format!("{q} is not a prime power"));
        }
        Ok(q)
    };
    if c.eat("Qp(") {
        return Ok(Atom::LocalField(residue(c, true, "K")?));
    }
    if c.eat("Zp(") {
        return Ok(Atom::IntegerRing(residue(c, true, "O")?));
    }
    if c.eat("Prufer(") {
        return Ok(Atom::Prufer(residue(c, false, "")?));
    }
    if c.eat("K(") {
        return Ok(Atom::LocalField(residue(c, false, "")?));
    }
    if c.eat("O(") {
        return Ok(Atom::IntegerRing(residue(c, false, "")?));
    }
    if c.eat("D(") {
        let label = c.take_while(|ch| ch.is_ascii_alphanumeric() || ch == '_' || ch == '-');
        if label.is_empty() {
            return err(c.pos, "empty label");
        }
        c.expect(")")?;
        return Ok(Atom::Blackbox(label.to_string()));
    }
    if c.eat("Z/") {
        let at = c.pos;
        let n = c.nat()?;
        if n == 0 {
            return err(at, "Z/0 is not finite; write Z");
        }
        return Ok(Atom::Cyclic(n));
    }
    for (token, a) in [
        ("Z", Atom::Integers),
        ("T", Atom::Circle),
        ("R", Atom::RealLine),
    ] {
        if c.eat(token) {
            return Ok(a);
        }
    }
    let name = c.take_while(|ch| ch.is_ascii_alphanumeric() || ch == '_');
    if name.is_empty() {
        err(start, "expected an atom")
    } else {
        err(start, format!("unknown atom '{name}'"))
    }
}

fn expr_at(c: &mut Cursor) -> Result<GroupExpr, ParseError> {
    let mut atoms = vec![];
    loop {
        c.skip_ws();
        let is_zero = c.rest().starts_with('0');
        if is_zero {
            c.pos += 1;
        } else {
            let a = atom(c)?;
            let k = if c.eat("^") { c.nat()? } else { 1 };
            let k = u32::try_from(k).or_else(|_| err(c.pos, "multiplicity out of range"))?;
            atoms.push((a, k));
        }
        if !c.eat("+") {
            break;
        }
    }
    GroupExpr::new(atoms).or_else(|e| core_err(c.pos, e))
}

pub fn parse_expr(text: &str) -> Result<GroupExpr, ParseError> {
    let mut c = Cursor::new(text);
    if c.at_end() {
        return Ok(GroupExpr::zero());
    }
    let out = expr_at(&mut c)?;
    if !c.at_end() {
        return err(
            c.pos,
            format!("unexpected '{}'", c.rest().chars().next().unwrap_or(' ')),
        );
    }
    Ok(out)
}

fn bigint(c: &mut Cursor) -> Result<BigInt, ParseError> {
    let start = {
        c.skip_ws();
        c.pos
    };
    let digits = c.take_while(|ch| ch.is_ascii_digit());
    BigInt::from_str(digits).or_else(|_| err(start, "expected a number"))
}

/// A single term: `-3/2`, `c`, `2*c`, `1/3*c^-2`.
fn scalar_at(c: &mut Cursor) -> Result<Scalar, ParseError> {
    let negative = c.eat("-");
    c.skip_ws();
    let mut coefficient = BigRational::one();
    let mut symbol = None;
    if c.rest().starts_with(|ch: char| ch.is_ascii_digit()) {
        let num = bigint(c)?;
        let den = if c.eat("/") {
            bigint(c)?
        } else {
            BigInt::one()
        };
        if den.is_zero() {
            return err(c.pos, "zero denominator");
        }
        coefficient = BigRational::new(num, den);
        if c.eat("*") {
            symbol = Some(c.ident()?);
        }
    } else {
        symbol = Some(c.ident()?);
    }
    if negative {
        coefficient = -coefficient;
    }
    match symbol {
        None => Ok(Scalar::rational(coefficient)),
        Some(name) => {
            let power = if c.eat("^") { c.int()? } else { 1 };
            Ok(Scalar::symbol_term(coefficient, name, power))
        }
    }
}

pub fn parse_scalar(text: &str) -> Result<Scalar, ParseError> {
    let mut c = Cursor::new(text);
    let s = scalar_at(&mut c)?;
    if !c.at_end() {
        return err(c.pos, "trailing input after scalar");
    }
    Ok(s)
}

/// `3/2`, `c`, `3/2*c^2`, or the JSON form `{"rational": {"2": 2}, "symbols": {"c": 1}}`.
pub fn parse_positive_real(text: &str) -> Result<PositiveReal, ParseError> {
    let trimmed = text.trim();
    if trimmed.starts_with('{') {
        let v: Value = serde_json::from_str(trimmed).or_else(|e| err(e.column(), e.to_string()))?;
        return positive_real_from_json(&v);
    }
    let s = parse_scalar(text)?;
    if s.is_zero() {
        return err(0, "Haar scales are positive");
    }
    if s.as_monomial()
        .is_some_and(|(c, _)| *c < BigRational::zero())
    {
        return err(0, "Haar scales are positive");
    }
    s.abs_positive().or_else(|e| core_err(0, e))
}

pub fn positive_real_from_json(v: &Value) -> Result<PositiveReal, ParseError> {
    let Some(obj) = v.as_object() else {
        return err(0, "expected an object with 'rational' and 'symbols'");
    };
    let mut pairs = vec![];
    if let Some(r) = obj.get("rational") {
        for (p, e) in r.as_object().into_iter().flatten() {
            let (Ok(p), Some(e)) = (p.parse::<u64>(), e.as_i64()) else {
                return err(0, format!("bad prime exponent {p}: {e}"));
            };
            pairs.push((p, e));
        }
    }
    let rational = PrimeExponentVector::from_pairs(pairs).or_else(|e| core_err(0, e))?;
    let mut symbols = vec![];
    if let Some(s) = obj.get("symbols") {
        for (name, e) in s.as_object().into_iter().flatten() {
            let Some(e) = e.as_i64() else {
                return err(0, format!("bad symbol exponent for {name}"));
            };
            symbols.push((name.clone(), e));
        }
    }
    Ok(PositiveReal::from_parts(rational, symbols))
}

fn scalar_from_json(v: &Value) -> Result<Scalar, ParseError> {
    match v {
        Value::Number(n) => match n.as_i64() {
            Some(i) => Ok(Scalar::integer(i)),
            None => err(
                0,
                format!("matrix entries must be integers or strings, got {n}"),
            ),
        },
        Value::String(s) => parse_scalar(s),
        other => err(0, format!("expected a scalar, got {other}")),
    }
}

fn block_from_json(expr: &GroupExpr, v: &Value) -> Result<Block, ParseError> {
    let Some(obj) = v.as_object() else {
        return err(0, "each block must be an object");
    };
    let Some(sel) = obj.get("block").and_then(Value::as_str) else {
        return err(0, "block needs a \"block\" selector such as \"R^2\"");
    };
    let selected = parse_expr(sel)?;
    let [(atom, k)] = selected.atoms() else {
        return err(0, format!("selector {sel} must name exactly one atom"));
    };
    if expr.multiplicity(atom) != *k {
        return err(
            0,
            format!(
                "selector {sel} does not match the {} copies of {atom} in {expr}",
                expr.multiplicity(atom)
            ),
        );
    }
    let payload = if let Some(m) = obj.get("matrix") {
        let Some(rows) = m.as_array() else {
            return err(0, "matrix must be an array of rows");
        };
        let rows = rows
            .iter()
            .map(|r| match r.as_array() {
                Some(r) => r
                    .iter()
                    .map(scalar_from_json)
                    .collect::<Result<Vec<_>, _>>(),
                None => err(0, "matrix row must be an array"),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Payload::Matrix(Matrix::new(rows).or_else(|e| core_err(0, e))?)
    } else if let Some(s) = obj.get("scale") {
        Payload::Scale(scalar_from_json(s)?)
    } else if let Some(val) = obj.get("valuation") {
        match val.as_i64() {
            Some(k) => Payload::Valuation(k),
            None => return err(0, "valuation must be an integer"),
        }
    } else if let Some(p) = obj.get("permutation") {
        let sigma = p
            .as_array()
            .into_iter()
            .flatten()
            .map(|i| i.as_u64().map(|i| i as usize))
            .collect::<Option<Vec<_>>>();
        match sigma {
            Some(sigma) => Payload::Permutation(sigma),
            None => return err(0, "permutation must list copy indices"),
        }
    } else {
        Payload::Identity
    };
    Ok(Block::new(atom.clone(), payload))
}

/// `mul(q)`, `val(k)`, `id`, or JSON blocks.
pub fn parse_morphism(expr: &GroupExpr, text: &str) -> Result<Morphism, ParseError> {
    let trimmed = text.trim();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        let v: Value = serde_json::from_str(trimmed).or_else(|e| err(e.column(), e.to_string()))?;
        let blocks = match &v {
            Value::Array(items) => items.clone(),
            Value::Object(o) if o.contains_key("blocks") => {
                o["blocks"].as_array().cloned().unwrap_or_default()
            }
            other => vec![other.clone()],
        };
        let blocks = blocks
            .iter()
            .map(|b| block_from_json(expr, b))
            .collect::<Result<Vec<_>, _>>()?;
        return Morphism::endo(expr, blocks).or_else(|e| core_err(0, e));
    }
    let mut c = Cursor::new(text);
    let out = if c.eat("mul(") {
        let s = scalar_at(&mut c)?;
        c.expect(")")?;
        Morphism::scalar(expr, s)
    } else if c.eat("val(") {
        let k = c.int()?;
        c.expect(")")?;
        Morphism::valuation(expr, k)
    } else if c.eat("id") {
        Ok(Morphism::identity(expr))
    } else {
        return err(c.pos, "expected mul(..), val(..), id or JSON blocks");
    };
    if !c.at_end() {
        return err(c.pos, "trailing input after morphism");
    }
    out.or_else(|e| core_err(0, e))
}

/// One parameter per atom occurrence, e.g. `1,4,*`; `canonical` picks the canonical choice.
pub fn parse_choice(expr: &GroupExpr, text: &str) -> Result<CompactOpenChoice, ParseError> {
    let trimmed = text.trim();
    if trimmed == "canonical" {
        return CompactOpenChoice::canonical(expr).or_else(|e| core_err(0, e));
    }
    let parts: Vec<&str> = if trimmed.is_empty() {
        vec![]
    } else {
        trimmed.split(',').collect()
    };
    if parts.len() != expr.occurrence_count() {
        return err(
            0,
            format!(
                "{} parameters for the {} atom occurrences of {expr}",
                parts.len(),
                expr.occurrence_count()
            ),
        );
    }
    let mut params = vec![];
    let mut offset = 0;
    for (atom, part) in expr.occurrences().zip(&parts) {
        let p = part.trim();
        let bad = || err::<ChoiceParam>(offset, format!("bad parameter '{p}' for {atom}"));
        let param = match atom {
            Atom::LocalField(_) => p.parse().map(ChoiceParam::Ideal).or_else(|_| bad())?,
            Atom::IntegerRing(_) => p.parse().map(ChoiceParam::Depth).or_else(|_| bad())?,
            Atom::Prufer(_) => p.parse().map(ChoiceParam::Torsion).or_else(|_| bad())?,
            Atom::Cyclic(_) => p.parse().map(ChoiceParam::Divisor).or_else(|_| bad())?,
            _ if p == "*" => ChoiceParam::Fixed,
            _ => bad()?,
        };
        params.push(param);
        offset += part.len() + 1;
    }
    CompactOpenChoice::new(expr, params).or_else(|e| core_err(0, e))
}

/// `name(inner)` split into its parts.
fn call(text: &str) -> Result<(&str, &str), ParseError> {
    let t = text.trim();
    match (t.find('('), t.ends_with(')')) {
        (Some(i), true) => Ok((t[..i].trim(), &t[i + 1..t.len() - 1])),
        _ if !t.contains('(') => Ok((t, "")),
        _ => err(0, format!("expected name(arguments), got '{t}'")),
    }
}

fn numbers(inner: &str, count: usize) -> Result<Vec<i64>, ParseError> {
    let out = inner
        .split(',')
        .map(|s| s.trim().parse::<i64>())
        .collect::<Result<Vec<_>, _>>()
        .or_else(|_| err(0, format!("expected {count} integers, got '{inner}'")))?;
    if out.len() != count {
        return err(0, format!("expected {count} integers, got '{inner}'"));
    }
    Ok(out)
}

fn unsigned(v: i64) -> Result<u64, ParseError> {
    u64::try_from(v).or_else(|_| err(0, format!("{v} must be non-negative")))
}

/// Catalog sequence syntax, e.g. `uniformizer(5)`, `mult-z(3)`, `compact-open(Qp(3); 1)`.
pub fn parse_sequence(text: &str) -> Result<SequenceKind, ParseError> {
    let (name, inner) = call(text)?;
    let kind = match name {
        "uniformizer" => SequenceKind::Uniformizer(unsigned(numbers(inner, 1)?[0])?),
        "mult-z" => SequenceKind::MultNZ(unsigned(numbers(inner, 1)?[0])?),
        "mult-t" => SequenceKind::MultNT(unsigned(numbers(inner, 1)?[0])?),
        "mult-prufer" => SequenceKind::MultUnifPrufer(unsigned(numbers(inner, 1)?[0])?),
        "ideal-filtration" | "ideal" => {
            let n = numbers(inner, 3)?;
            let (a, b) = (u32::try_from(n[1]), u32::try_from(n[2]));
            let (Ok(a), Ok(b)) = (a, b) else {
                return err(0, "ideal exponents must be non-negative");
            };
            SequenceKind::IdealFiltration {
                q: unsigned(n[0])?,
                a,
                b,
            }
        }
        "z-r-t" => SequenceKind::IntegersInReals,
        "compact-open" => {
            let (e, ch) = inner.split_once(';').ok_or_else(|| ParseError {
                position: 0,
                message: "compact-open(EXPR; CHOICE)".into(),
            })?;
            let group = parse_expr(e)?;
            let choice = parse_choice(&group, ch)?;
            SequenceKind::CompactOpen { group, choice }
        }
        "sum" => {
            let (a, b) = inner.split_once(';').ok_or_else(|| ParseError {
                position: 0,
                message: "sum(EXPR; EXPR)".into(),
            })?;
            SequenceKind::SumSplit(parse_expr(a)?, parse_expr(b)?)
        }
        "iso-left" | "iso-right" => {
            let (e, m) = inner.split_once(';').ok_or_else(|| ParseError {
                position: 0,
                message: format!("{name}(EXPR; MORPHISM)"),
            })?;
            let f = parse_morphism(&parse_expr(e)?, m)?;
            if name == "iso-left" {
                SequenceKind::IsoLeft(f)
            } else {
                SequenceKind::IsoRight(f)
            }
        }
        other => return err(0, format!("unknown sequence '{other}'")),
    };
    Ok(kind)
}

/// `ring(q,a,b)`, `field(q,a,b)`, `cyclic(n,d1,d2)`, `integer(n,m)`, `tower(EXPR; INNER; OUTER)`.
pub fn parse_filtration(text: &str) -> Result<Filtration, ParseError> {
    let (name, inner) = call(text)?;
    let out = match name {
        "ring" => {
            let n = numbers(inner, 3)?;
            let (Ok(a), Ok(b)) = (u32::try_from(n[1]), u32::try_from(n[2])) else {
                return err(0, "ring ideal exponents must be non-negative");
            };
            Filtration::ring_ideals(unsigned(n[0])?, a, b)
        }
        "field" => {
            let n = numbers(inner, 3)?;
            Filtration::field_ideals(unsigned(n[0])?, n[1], n[2])
        }
        "cyclic" => {
            let n = numbers(inner, 3)?;
            Filtration::cyclic(unsigned(n[0])?, unsigned(n[1])?, unsigned(n[2])?)
        }
        "integer" => {
            let n = numbers(inner, 2)?;
            Filtration::integers(unsigned(n[0])?, unsigned(n[1])?)
        }
        "tower" => {
            let parts: Vec<&str> = inner.split(';').collect();
            let [e, a, b] = parts[..] else {
                return err(0, "tower(EXPR; INNER; OUTER)");
            };
            let group = parse_expr(e)?;
            let a = parse_choice(&group, a)?;
            let b = parse_choice(&group, b)?;
            Filtration::tower(&group, a.params().to_vec(), b.params().to_vec())
        }
        other => return err(0, format!("unknown filtration '{other}'")),
    };
    out.or_else(|e| core_err(0, e))
}

/// `{"vertices": ["Qp(5)"], "edges": [{"from": 0, "to": 0, "morphism": "mul(5)"}]}`.
pub fn parse_diagram(text: &str) -> Result<Diagram, ParseError> {
    let v: Value = serde_json::from_str(text).or_else(|e| err(e.column(), e.to_string()))?;
    let vertices = v
        .get("vertices")
        .and_then(Value::as_array)
        .ok_or_else(|| ParseError {
            position: 0,
            message: "diagram needs a \"vertices\" array".into(),
        })?
        .iter()
        .map(|x| match x.as_str() {
            Some(s) => parse_expr(s),
            None => err(0, "vertices are expression strings"),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut edges = vec![];
    for (i, e) in v
        .get("edges")
        .and_then(Value::as_array)
        .into_iter()
        .flatten()
        .enumerate()
    {
        let index = |key: &str| {
            e.get(key)
                .and_then(Value::as_u64)
                .map(|x| x as usize)
                .ok_or_else(|| ParseError {
                    position: 0,
                    message: format!("edge {i} needs an integer \"{key}\""),
                })
        };
        let (from, to) = (index("from")?, index("to")?);
        let Some(source) = vertices.get(from) else {
            return err(0, format!("edge {i} starts at missing vertex {from}"));
        };
        let morphism = match e.get("morphism") {
            Some(Value::String(s)) => parse_morphism(source, s)?,
            Some(other) => parse_morphism(source, &other.to_string())?,
            None => return err(0, format!("edge {i} needs a \"morphism\"")),
        };
        edges.push(Edge { from, to, morphism });
    }
    Diagram::new(vertices, edges).or_else(|e| core_err(0, e))
}

/// Walk syntax `0+,1-`: edge index with direction.
pub fn parse_cycle(text: &str) -> Result<Vec<Step>, ParseError> {
    text.split(',')
        .map(|s| {
            let s = s.trim();
            let (num, forward) = match s.strip_suffix('-') {
                Some(n) => (n, false),
                None => (s.strip_suffix('+').unwrap_or(s), true),
            };
            num.parse()
                .map(|i| (i, forward))
                .or_else(|_| err(0, format!("bad step '{s}'")))
        })
        .collect()
}
