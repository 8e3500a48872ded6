//! Multiplication-table layout and classical presolve.
//!
//! [`build_layout`] writes one balance equation per output column of the
//! binary long multiplication `p * q = N`; [`simplify`] runs a small set of
//! propagation rules to a fixpoint, fixing carries and factor bits that are
//! forced, recording pairs of variables that cannot both be 1, and dropping
//! equations that became trivial or duplicate.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::{Coeff, Monomial, Poly, VarId};

/// Number of bits in the binary representation of `n`.
pub fn bit_width(n: u64) -> u32 {
    64 - n.leading_zeros()
}

fn check_input(n: u64) -> Result<()> {
    if n.is_multiple_of(2) {
        return Err(Error::EvenInput(n));
    }
    if n < 9 {
        return Err(Error::TooSmall(n));
    }
    Ok(())
}

/// Candidate factor widths `(w_p, w_q)` with `2 <= w_p <= w_q` whose product
/// could have exactly `bit_width(n)` bits, most balanced first.
pub fn enumerate_width_splits(n: u64) -> Result<Vec<(u32, u32)>> {
    check_input(n)?;
    let bits = bit_width(n);
    let mut splits = Vec::new();
    for total in [bits, bits + 1] {
        for wp in 2..=total / 2 {
            splits.push((wp, total - wp));
        }
    }
    splits.sort_by_key(|&(wp, wq)| (wq - wp, wp + wq, wp));
    Ok(splits)
}

/// Balance equation of one column: `lhs = rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColumnEquation {
    /// Column index; the column has weight `2^column`.
    pub column: u32,
    pub lhs: Poly,
    pub rhs: Poly,
}

impl ColumnEquation {
    /// The polynomial `lhs - rhs`, zero exactly on solutions.
    pub fn residual(&self) -> Poly {
        &self.lhs - &self.rhs
    }

    fn from_residual(column: u32, r: &Poly) -> Self {
        let c = r.constant_term();
        ColumnEquation { column, lhs: r.without_terms(Monomial::is_constant), rhs: Poly::constant(-c) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquationSystem {
    pub n: u64,
    pub widths: (u32, u32),
    /// Every variable declared by the layout, sorted.
    pub variables: Vec<VarId>,
    pub equations: Vec<ColumnEquation>,
    pub fixed: BTreeMap<VarId, bool>,
    /// Unordered pairs `(x, y)`, stored with `x < y`, known to satisfy `xy = 0`.
    pub forbidden_pairs: BTreeSet<(VarId, VarId)>,
}

impl EquationSystem {
    /// Declared variables that are not fixed, in qubit order.
    pub fn free_variables(&self) -> Vec<VarId> {
        self.variables.iter().copied().filter(|v| !self.fixed.contains_key(v)).collect()
    }

    /// Whether an assignment of the free variables satisfies every equation.
    /// Fixed variables take their recorded values.
    pub fn is_satisfied_by<F: Fn(VarId) -> bool>(&self, value: F) -> bool {
        let full = |v: VarId| self.fixed.get(&v).copied().unwrap_or_else(|| value(v));
        self.equations.iter().all(|eq| eq.residual().eval(full).is_zero())
    }
}

/// Multiplication-table equations for `p * q = n` with `p` of `wp` bits and
/// `q` of `wq` bits, both with their lowest and highest bit set.
pub fn build_layout(n: u64, wp: u32, wq: u32) -> Result<EquationSystem> {
    check_input(n)?;
    let bits = bit_width(n);
    if wp < 2 || wq < 2 || !(wp + wq == bits || wp + wq == bits + 1) {
        return Err(Error::WidthMismatch { wp, wq, bits });
    }

    let factor_bit = |width: u32, i: u32, var: fn(u32) -> VarId| {
        if i == 0 || i == width - 1 {
            Poly::constant(1)
        } else {
            Poly::var(var(i))
        }
    };

    let last = wp + wq - 1;
    let mut variables: Vec<VarId> = (1..wp - 1).map(VarId::P).chain((1..wq - 1).map(VarId::Q)).collect();
    let mut incoming: BTreeMap<u32, Vec<VarId>> = BTreeMap::new();
    let mut equations = Vec::with_capacity(last as usize + 1);

    for c in 0..=last {
        let mut lhs = Poly::zero();
        for i in 0..wp.min(c + 1) {
            let j = c - i;
            if j < wq {
                lhs = &lhs + &(&factor_bit(wp, i, VarId::P) * &factor_bit(wq, j, VarId::Q));
            }
        }
        for &z in incoming.get(&c).into_iter().flatten() {
            lhs = &lhs + &Poly::var(z);
        }

        let (_, max) = lhs.bounds();
        let max = max.to_integer().max(0) as u64;
        let budget = if max >= 2 { 63 - max.leading_zeros() } else { 0 };
        let budget = budget.min(last - c);

        let mut rhs = Poly::constant(((n >> c) & 1) as i64);
        for m in 1..=budget {
            let z = VarId::Carry { from: c, to: c + m };
            rhs = &rhs + &Poly::monomial(Monomial::var(z), Coeff::from_integer(1 << m));
            incoming.entry(c + m).or_default().push(z);
            variables.push(z);
        }
        equations.push(ColumnEquation { column: c, lhs, rhs });
    }

    variables.sort_unstable();
    Ok(EquationSystem {
        n,
        widths: (wp, wq),
        variables,
        equations,
        fixed: BTreeMap::new(),
        forbidden_pairs: BTreeSet::new(),
    })
}

/// Scale to coprime integer coefficients with a positive leading
/// non-constant coefficient.
fn normalize(r: &Poly) -> Poly {
    if r.is_zero() {
        return Poly::zero();
    }
    let lcm = r.terms().fold(1i64, |acc, (_, c)| acc.lcm(c.denom()));
    let gcd = r.terms().fold(0i64, |acc, (_, c)| acc.gcd(&(*c * Coeff::from_integer(lcm)).to_integer()));
    let mut k = Coeff::new(lcm, gcd.max(1));
    let lead = r.terms().find(|(m, _)| !m.is_constant()).map(|(_, c)| *c);
    if lead.is_some_and(|c| c.is_negative()) {
        k = -k;
    }
    r.scale(k)
}

fn ordered_pair(a: VarId, b: VarId) -> (VarId, VarId) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn contains_zero((lo, hi): (Coeff, Coeff)) -> bool {
    lo <= Coeff::zero() && Coeff::zero() <= hi
}

struct Presolve {
    residuals: Vec<(u32, Poly)>,
    fixed: BTreeMap<VarId, bool>,
    forbidden: BTreeSet<(VarId, VarId)>,
}

impl Presolve {
    fn fix(&mut self, v: VarId, value: bool) -> Result<()> {
        match self.fixed.insert(v, value) {
            Some(old) if old != value => Err(Error::Infeasible(format!("{v} forced to both 0 and 1"))),
            _ => Ok(()),
        }
    }

    /// Substitute fixed variables, normalize, drop trivial and duplicate
    /// equations.
    fn substitute(&mut self) -> Result<()> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::with_capacity(self.residuals.len());
        for (col, r) in &self.residuals {
            let mut r = r.clone();
            for v in r.variables() {
                if let Some(&val) = self.fixed.get(&v) {
                    r = r.substitute(v, val);
                }
            }
            let r = normalize(&r);
            if r.is_constant() {
                if r.is_zero() {
                    continue;
                }
                return Err(Error::Infeasible(format!("column {col} reduces to {r} = 0")));
            }
            if seen.insert(r.clone()) {
                out.push((*col, r));
            }
        }
        self.residuals = out;
        Ok(())
    }

    /// Sum of same-signed terms equal to zero, or equal to its maximum.
    fn zero_sum_and_saturation(&mut self) -> Result<()> {
        let mut out = Vec::with_capacity(self.residuals.len());
        for (col, r) in std::mem::take(&mut self.residuals) {
            let c = r.constant_term();
            let products: Vec<(Monomial, Coeff)> =
                r.terms().filter(|(m, _)| !m.is_constant()).map(|(m, c)| (m.clone(), *c)).collect();
            let all_pos = products.iter().all(|(_, k)| k.is_positive());
            let all_neg = products.iter().all(|(_, k)| k.is_negative());
            let total: Coeff = products.iter().map(|(_, k)| *k).sum();

            if (all_pos || all_neg) && c.is_zero() {
                // every term must vanish
                for (m, _) in products {
                    match m.degree() {
                        1 => self.fix(m.vars()[0], false)?,
                        _ => out.push((col, Poly::monomial(m, Coeff::one()))),
                    }
                }
            } else if (all_pos || all_neg) && (c + total).is_zero() {
                // every term must be 1
                for (m, _) in products {
                    for &v in m.vars() {
                        self.fix(v, true)?;
                    }
                }
            } else {
                out.push((col, r));
            }
        }
        self.residuals = out;
        Ok(())
    }

    /// Record `xy = 0` from `x + y = 1` and `xy = 0`, then delete monomials
    /// containing a forbidden pair everywhere except in the defining `xy = 0`.
    fn pair_exclusion(&mut self) {
        for (_, r) in &self.residuals {
            let terms: Vec<(&Monomial, &Coeff)> = r.terms().collect();
            let unit = |k: &Coeff| k.is_one();
            match terms.as_slice() {
                [(m0, c0), (m1, k1), (m2, k2)]
                    if m0.is_constant()
                        && **c0 == -Coeff::one()
                        && m1.degree() == 1
                        && m2.degree() == 1
                        && unit(k1)
                        && unit(k2) =>
                {
                    self.forbidden.insert(ordered_pair(m1.vars()[0], m2.vars()[0]));
                }
                [(m, _)] if m.degree() == 2 => {
                    self.forbidden.insert(ordered_pair(m.vars()[0], m.vars()[1]));
                }
                _ => {}
            }
        }
        if self.forbidden.is_empty() {
            return;
        }
        let forbidden = &self.forbidden;
        for (_, r) in &mut self.residuals {
            if r.len() == 1 && r.degree() == 2 {
                continue;
            }
            *r = r.without_terms(|m| forbidden.iter().any(|&(x, y)| m.contains(x) && m.contains(y)));
        }
    }

    /// Interval propagation, each monomial treated independently.
    fn propagate_bounds(&mut self) -> Result<()> {
        let mut forced = Vec::new();
        for (col, r) in &self.residuals {
            if !contains_zero(r.bounds()) {
                return Err(Error::Infeasible(format!("column {col}: {r} = 0 has no solution")));
            }
            for v in r.variables() {
                let zero_ok = contains_zero(r.substitute(v, false).bounds());
                let one_ok = contains_zero(r.substitute(v, true).bounds());
                match (zero_ok, one_ok) {
                    (false, false) => return Err(Error::Infeasible(format!("column {col}: no value of {v} works"))),
                    (true, false) => forced.push((v, false)),
                    (false, true) => forced.push((v, true)),
                    (true, true) => {}
                }
            }
        }
        for (v, val) in forced {
            self.fix(v, val)?;
        }
        Ok(())
    }

    fn prune_pairs(&mut self) {
        let fixed = &self.fixed;
        self.forbidden.retain(|(x, y)| !fixed.contains_key(x) && !fixed.contains_key(y));
    }
}

/// Run the propagation rules to a fixpoint.
///
/// The result's solutions, extended by its fixed variables, are exactly the
/// solutions of the input. Returns [`Error::Infeasible`] when the rules prove
/// there are none.
pub fn simplify(system: &EquationSystem) -> Result<EquationSystem> {
    let mut state = Presolve {
        residuals: system.equations.iter().map(|e| (e.column, e.residual())).collect(),
        fixed: system.fixed.clone(),
        forbidden: system.forbidden_pairs.clone(),
    };

    loop {
        let before = (state.residuals.clone(), state.fixed.clone(), state.forbidden.clone());
        state.substitute()?;
        state.zero_sum_and_saturation()?;
        state.substitute()?;
        state.pair_exclusion();
        state.substitute()?;
        state.propagate_bounds()?;
        state.substitute()?;
        state.prune_pairs();
        if (&state.residuals, &state.fixed, &state.forbidden) == (&before.0, &before.1, &before.2) {
            break;
        }
    }

    Ok(EquationSystem {
        n: system.n,
        widths: system.widths,
        variables: system.variables.clone(),
        equations: state.residuals.iter().map(|(col, r)| ColumnEquation::from_residual(*col, r)).collect(),
        fixed: state.fixed,
        forbidden_pairs: state.forbidden,
    })
}
