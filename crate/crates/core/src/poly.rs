//! Multilinear polynomials with exact rational coefficients over binary
//! variables.
//!
//! Every variable takes values in {0, 1}, so `x * x = x` is applied eagerly
//! and monomials are plain sorted sets of variables.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

/// Exact coefficient type used across the compiler.
pub type Coeff = Rational64;

/// A binary decision variable of the multiplication table.
///
/// `P(i)` and `Q(i)` are interior bits of the two factors (bit 0 and the top
/// bit are the constant 1). `Carry { from, to }` carries weight `2^(to - from)`
/// out of column `from` into column `to`.
///
/// The derived ordering (p bits, then q bits, then carries by column pair) is
/// the qubit ordering used throughout.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarId {
    P(u32),
    Q(u32),
    Carry { from: u32, to: u32 },
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarId::P(i) => write!(f, "p{i}"),
            VarId::Q(i) => write!(f, "q{i}"),
            VarId::Carry { from, to } => write!(f, "z{from}_{to}"),
        }
    }
}

impl FromStr for VarId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || Error::Parse(format!("invalid variable name `{s}`"));
        let (head, rest) = s.split_at(s.char_indices().nth(1).map_or(s.len(), |(i, _)| i));
        match head {
            "p" => rest.parse().map(VarId::P).map_err(|_| bad()),
            "q" => rest.parse().map(VarId::Q).map_err(|_| bad()),
            "z" => {
                let (a, b) = rest.split_once('_').ok_or_else(bad)?;
                let from = a.parse().map_err(|_| bad())?;
                let to = b.parse().map_err(|_| bad())?;
                if to <= from {
                    return Err(bad());
                }
                Ok(VarId::Carry { from, to })
            }
            _ => Err(bad()),
        }
    }
}

/// A product of distinct binary variables; the empty product is the constant
/// monomial.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<VarId>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: VarId) -> Self {
        Monomial(vec![v])
    }

    pub fn from_vars<I: IntoIterator<Item = VarId>>(vars: I) -> Self {
        let mut v: Vec<VarId> = vars.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Monomial(v)
    }

    pub fn vars(&self) -> &[VarId] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn is_constant(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: VarId) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    /// Product of two monomials with `x^2 = x`.
    pub fn times(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => {
                    out.push(self.0[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(other.0[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push(self.0[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    pub fn eval<F: Fn(VarId) -> bool>(&self, value: F) -> bool {
        self.0.iter().all(|&v| value(v))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (k, v) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// A multilinear polynomial over binary variables with exact coefficients.
///
/// Zero coefficients are never stored, so structural equality is polynomial
/// equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly {
    terms: BTreeMap<Monomial, Coeff>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant<C: Into<Coeff>>(c: C) -> Self {
        let mut p = Poly::zero();
        p.add_term(Monomial::one(), c.into());
        p
    }

    pub fn var(v: VarId) -> Self {
        Poly::monomial(Monomial::var(v), Coeff::one())
    }

    pub fn monomial(m: Monomial, c: Coeff) -> Self {
        let mut p = Poly::zero();
        p.add_term(m, c);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Coeff)>>(terms: I) -> Self {
        let mut p = Poly::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: Coeff) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coeff)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> Coeff {
        self.terms.get(m).copied().unwrap_or_else(Coeff::zero)
    }

    pub fn constant_term(&self) -> Coeff {
        self.coeff(&Monomial::one())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_constant)
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Sorted, duplicate-free list of the variables that occur.
    pub fn variables(&self) -> Vec<VarId> {
        let mut v: Vec<VarId> = self.terms.keys().flat_map(|m| m.vars().iter().copied()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn contains_var(&self, v: VarId) -> bool {
        self.terms.keys().any(|m| m.contains(v))
    }

    /// Smallest and largest value reachable when every monomial is set to 0
    /// or 1 independently. Always brackets the true range.
    pub fn bounds(&self) -> (Coeff, Coeff) {
        let mut lo = Coeff::zero();
        let mut hi = Coeff::zero();
        for (m, &c) in &self.terms {
            if m.is_constant() {
                lo += c;
                hi += c;
            } else if c.is_positive() {
                hi += c;
            } else {
                lo += c;
            }
        }
        (lo, hi)
    }

    pub fn eval<F: Fn(VarId) -> bool>(&self, value: F) -> Coeff {
        self.terms.iter().filter(|(m, _)| m.eval(&value)).map(|(_, &c)| c).sum()
    }

    /// Replace `v` by the constant `value`.
    pub fn substitute(&self, v: VarId, value: bool) -> Poly {
        let mut out = Poly::zero();
        for (m, &c) in &self.terms {
            if !m.contains(v) {
                out.add_term(m.clone(), c);
            } else if value {
                out.add_term(Monomial::from_vars(m.vars().iter().copied().filter(|&x| x != v)), c);
            }
        }
        out
    }

    pub fn scale(&self, k: Coeff) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, &c)| (m.clone(), c * k)).collect() }
    }

    pub fn square(&self) -> Poly {
        self * self
    }

    /// Drop every monomial that satisfies `pred`.
    pub fn without_terms<F: Fn(&Monomial) -> bool>(&self, pred: F) -> Poly {
        Poly { terms: self.terms.iter().filter(|(m, _)| !pred(m)).map(|(m, &c)| (m.clone(), c)).collect() }
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if m.is_constant() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{mag}*{m}")?;
            }
        }
        Ok(())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, &c) in &rhs.terms {
            out.add_term(m.clone(), c);
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, &c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(-Coeff::one())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &rhs.terms {
                out.add_term(ma.times(mb), ca * cb);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $f(self, rhs: Poly) -> Poly {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Render a rational as `"num/den"` (or `"num"` when integral).
pub fn coeff_to_string(c: &Coeff) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

pub fn parse_coeff(s: &str) -> Result<Coeff, Error> {
    let bad = || Error::Parse(format!("invalid rational `{s}`"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ok(Coeff::new(n, d))
        }
        None => s.trim().parse::<i64>().map(Coeff::from_integer).map_err(|_| bad()),
    }
}
