//! Penalty polynomials, order reduction, and their realization as operators
//! on `n` qubits.
//!
//! Variable `x` maps to the projector `(1 - sigma_z) / 2`, so a basis state
//! is an assignment and a polynomial is diagonal in the computational basis.
//! Basis index `b` holds qubit 0 in its most significant bit.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::compiler::EquationSystem;
use crate::error::{Error, Result};
use crate::poly::{Coeff, Monomial, Poly, VarId};

/// Largest register simulated with dense matrices unless overridden by the
/// `AQFACTOR_QUBIT_CAP` environment variable.
pub const DEFAULT_QUBIT_CAP: usize = 14;

pub fn qubit_cap() -> usize {
    std::env::var("AQFACTOR_QUBIT_CAP").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_QUBIT_CAP)
}

fn check_cap(qubits: usize) -> Result<()> {
    let cap = qubit_cap();
    if qubits > cap {
        return Err(Error::DimensionTooLarge { qubits, cap });
    }
    Ok(())
}

/// Ordered qubit assignment of the surviving variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QubitMap {
    vars: Vec<VarId>,
}

impl QubitMap {
    /// Builds a map in canonical qubit order (p bits, q bits, carries).
    pub fn new(mut vars: Vec<VarId>) -> Self {
        vars.sort_unstable();
        vars.dedup();
        QubitMap { vars }
    }

    pub fn vars(&self) -> &[VarId] {
        &self.vars
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn dim(&self) -> usize {
        1 << self.vars.len()
    }

    pub fn position(&self, v: VarId) -> Option<usize> {
        self.vars.binary_search(&v).ok()
    }

    /// Bit mask of `v` within a basis index.
    pub fn mask(&self, v: VarId) -> Option<usize> {
        self.position(v).map(|k| 1 << (self.vars.len() - 1 - k))
    }

    /// Value of `v` in basis state `index`; `None` if `v` is unmapped.
    pub fn bit(&self, index: usize, v: VarId) -> Option<bool> {
        self.mask(v).map(|m| index & m != 0)
    }

    /// Basis index of an assignment.
    pub fn index_of<F: Fn(VarId) -> bool>(&self, value: F) -> usize {
        self.vars.iter().fold(0, |acc, &v| (acc << 1) | usize::from(value(v)))
    }
}

/// `r^2` reduced with `x^2 = x`.
pub fn penalty_polynomial(residual: &Poly) -> Poly {
    residual.square()
}

/// `2 [ (A + B - 1/2) / 2 + S ]^2 - 1/8` for a residual `A*B + S`.
///
/// Nonnegative on every assignment and zero exactly where `A*B + S = 0`,
/// provided `S` is integer valued, with one degree less than `(A*B + S)^2`.
pub fn quadratize_equation(residual: &Poly, a: VarId, b: VarId) -> Result<Poly> {
    if a == b {
        return Err(Error::NotApplicable);
    }
    let ab = Monomial::from_vars([a, b]);
    if !residual.coeff(&ab).is_one() {
        return Err(Error::NotApplicable);
    }
    let s = residual - &Poly::monomial(ab, Coeff::one());
    if s.terms().any(|(_, c)| !c.is_integer()) {
        return Err(Error::NotApplicable);
    }
    let half = Coeff::new(1, 2);
    let a_plus_b = &(&Poly::var(a) + &Poly::var(b)) - &Poly::constant(half);
    let inner = &a_plus_b.scale(half) + &s;
    Ok(&inner.square().scale(Coeff::from_integer(2)) - &Poly::constant(Coeff::new(1, 8)))
}

/// Which product term of an equation is split off by the order reduction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pairing {
    /// Lexicographically last two-variable product.
    #[default]
    LastProduct,
    /// Lexicographically first two-variable product; for 143 this is
    /// `(p1, q2)`, reproducing the hand-derived Hamiltonian.
    FirstProduct,
}

fn pairing_candidates(residual: &Poly) -> Vec<(VarId, VarId)> {
    residual.terms().filter(|(m, c)| m.degree() == 2 && c.is_one()).map(|(m, _)| (m.vars()[0], m.vars()[1])).collect()
}

/// Penalty for one residual: plain square when that is at most quadratic,
/// otherwise the order-reduced form around the chosen product.
pub fn equation_penalty(residual: &Poly, pairing: Pairing) -> Poly {
    let plain = penalty_polynomial(residual);
    if plain.degree() <= 2 {
        return plain;
    }
    let candidates = pairing_candidates(residual);
    let choice = match pairing {
        Pairing::LastProduct => candidates.last(),
        Pairing::FirstProduct => candidates.first(),
    };
    choice.and_then(|&(a, b)| quadratize_equation(residual, a, b).ok()).unwrap_or(plain)
}

/// Sum of all equation penalties, with the qubit map of the free variables.
pub fn assemble_problem(system: &EquationSystem, pairing: Pairing) -> Result<(Poly, QubitMap)> {
    let free = system.free_variables();
    if free.is_empty() {
        return Err(Error::EmptySystem);
    }
    let poly = system
        .equations
        .iter()
        .map(|eq| equation_penalty(&eq.residual(), pairing))
        .fold(Poly::zero(), |acc, p| &acc + &p);
    Ok((poly, QubitMap::new(free)))
}

/// Diagonal operator with exact energies and a cached `f64` view.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalOperator {
    qubits: usize,
    energies: Vec<Coeff>,
    float: Vec<f64>,
}

impl DiagonalOperator {
    pub fn new(energies: Vec<Coeff>) -> Result<Self> {
        let qubits = energies.len().trailing_zeros() as usize;
        if energies.is_empty() || energies.len() != 1 << qubits {
            return Err(Error::DimensionMismatch { expected: 1 << qubits.max(1), got: energies.len() });
        }
        let float = energies.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect();
        Ok(DiagonalOperator { qubits, energies, float })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[Coeff] {
        &self.energies
    }

    pub fn as_f64(&self) -> &[f64] {
        &self.float
    }

    pub fn min(&self) -> Coeff {
        *self.energies.iter().min().expect("non-empty")
    }

    pub fn max(&self) -> Coeff {
        *self.energies.iter().max().expect("non-empty")
    }
}

/// Evaluate `poly` on every basis state of `map`.
pub fn polynomial_to_diagonal(poly: &Poly, map: &QubitMap) -> Result<DiagonalOperator> {
    check_cap(map.len())?;
    let terms = poly
        .terms()
        .map(|(m, &c)| {
            m.vars()
                .iter()
                .map(|&v| map.mask(v).ok_or_else(|| Error::UnmappedVariable(v.to_string())))
                .try_fold(0usize, |acc, mask| mask.map(|k| acc | k))
                .map(|mask| (mask, c))
        })
        .collect::<Result<Vec<_>>>()?;
    let energies =
        (0..map.dim()).map(|b| terms.iter().filter(|(mask, _)| b & mask == *mask).map(|(_, c)| *c).sum()).collect();
    DiagonalOperator::new(energies)
}

/// `(N - x*y)^2` over a `wx`-bit `x` and a `wy`-bit `y`, basis index
/// `(x << wy) | y`.
pub fn direct_cost_diagonal(n: u64, wx: u32, wy: u32) -> Result<DiagonalOperator> {
    if wx == 0 || wy == 0 {
        return Err(Error::InvalidParameter("register widths must be positive".into()));
    }
    check_cap((wx + wy) as usize)?;
    let energies = (0u64..1 << (wx + wy))
        .map(|b| {
            let x = b >> wy;
            let y = b & ((1 << wy) - 1);
            let d = n as i64 - (x * y) as i64;
            Coeff::from_integer(d * d)
        })
        .collect();
    DiagonalOperator::new(energies)
}

/// Transverse-field mixer `g * sum_i sigma_x^i` on `n` qubits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixerSpec {
    pub n: usize,
    pub g: f64,
}

impl MixerSpec {
    pub fn new(n: usize, g: f64) -> Result<Self> {
        if !(g > 0.0 && g.is_finite()) {
            return Err(Error::InvalidParameter(format!("mixer strength must be positive, got {g}")));
        }
        Ok(MixerSpec { n, g })
    }
}

/// Dense Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(pub DMatrix<Complex64>);

impl HermitianMatrix {
    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    /// `max |H - H^dagger|` over all entries.
    pub fn hermiticity_defect(&self) -> f64 {
        let m = &self.0;
        let mut worst: f64 = 0.0;
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        worst
    }
}

/// `(1 - s) * H0 + s * diag(Hp)`.
pub fn interpolated_hamiltonian(s: f64, mixer: &MixerSpec, hp: &DiagonalOperator) -> Result<HermitianMatrix> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidParameter(format!("interpolation parameter {s} outside [0, 1]")));
    }
    if mixer.n != hp.qubits() {
        return Err(Error::DimensionMismatch { expected: 1 << mixer.n, got: hp.dim() });
    }
    let dim = hp.dim();
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    let off = Complex64::new((1.0 - s) * mixer.g, 0.0);
    for (b, &e) in hp.as_f64().iter().enumerate() {
        m[(b, b)] = Complex64::new(s * e, 0.0);
        if !off.is_zero() {
            for k in 0..mixer.n {
                m[(b, b ^ (1 << k))] = off;
            }
        }
    }
    Ok(HermitianMatrix(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::{build_layout, simplify, ColumnEquation};
    use std::collections::{BTreeMap, BTreeSet};

    const P1: VarId = VarId::P(1);
    const P2: VarId = VarId::P(2);
    const Q1: VarId = VarId::Q(1);
    const Q2: VarId = VarId::Q(2);

    fn poly(terms: &[(i64, &[VarId])]) -> Poly {
        Poly::from_terms(terms.iter().map(|(c, vs)| (Monomial::from_vars(vs.iter().copied()), Coeff::from_integer(*c))))
    }

    /// The hand-expanded Hamiltonian for 143 with widths (4, 4).
    fn reference_143() -> Poly {
        poly(&[
            (5, &[]),
            (-3, &[P1]),
            (-1, &[P2]),
            (-1, &[Q1]),
            (2, &[P1, Q1]),
            (-3, &[P2, Q1]),
            (2, &[P1, P2, Q1]),
            (-3, &[Q2]),
            (1, &[P1, Q2]),
            (2, &[P2, Q2]),
            (2, &[P2, Q1, Q2]),
        ])
    }

    fn system_143() -> EquationSystem {
        simplify(&build_layout(143, 4, 4).unwrap()).unwrap()
    }

    #[test]
    fn penalty_of_pair_constraint() {
        let r = poly(&[(1, &[P1]), (1, &[Q1]), (-1, &[])]);
        let pen = penalty_polynomial(&r);
        assert_eq!(pen, poly(&[(1, &[]), (-1, &[P1]), (-1, &[Q1]), (2, &[P1, Q1])]));
        for bits in 0..4 {
            let val = |v: VarId| if v == P1 { bits & 1 == 1 } else { bits & 2 == 2 };
            let x = r.eval(val);
            assert_eq!(pen.eval(val), x * x);
        }
        assert!(penalty_polynomial(&Poly::zero()).is_zero());
    }

    #[test]
    fn penalty_with_carry() {
        let z = VarId::Carry { from: 1, to: 2 };
        let pen = penalty_polynomial(&poly(&[(1, &[P1]), (1, &[Q1]), (-1, &[]), (-2, &[z])]));
        // (p + q - 1 - 2z)^2 expanded by hand with x^2 = x
        let expect =
            poly(&[(1, &[]), (-1, &[P1]), (-1, &[Q1]), (8, &[z]), (2, &[P1, Q1]), (-4, &[P1, z]), (-4, &[Q1, z])]);
        assert_eq!(pen, expect);
    }

    #[test]
    fn quadratized_third_equation() {
        let r = poly(&[(1, &[P2, Q1]), (1, &[P1, Q2]), (-1, &[])]);
        let h = quadratize_equation(&r, P1, Q2).unwrap();
        assert_eq!(h.degree(), 3);
        assert_eq!(penalty_polynomial(&r).degree(), 4);
        let half = Coeff::new(1, 2);
        let inner = &(&(&Poly::var(P1) + &Poly::var(Q2)) - &Poly::constant(half)).scale(half)
            + &(&Poly::monomial(Monomial::from_vars([P2, Q1]), Coeff::one()) - &Poly::constant(1));
        let by_hand = &inner.square().scale(Coeff::from_integer(2)) - &Poly::constant(Coeff::new(1, 8));
        assert_eq!(h, by_hand);
    }

    #[test]
    fn quadratize_small_cases() {
        // residual A*B + S with S a constant
        let f = |s: i64, a: bool, b: bool| {
            let r = &Poly::monomial(Monomial::from_vars([P1, Q1]), Coeff::one()) + &Poly::constant(s);
            quadratize_equation(&r, P1, Q1).unwrap().eval(|v| if v == P1 { a } else { b })
        };
        assert_eq!(f(-1, true, true), Coeff::zero());
        assert_eq!(f(-1, true, false), Coeff::one());
        assert!(matches!(quadratize_equation(&Poly::var(P1), P1, Q1), Err(Error::NotApplicable)));
    }

    #[test]
    fn quadratization_preserves_zero_set() {
        // exhaustive over A, B and integer S in a range
        for s in -3i64..=3 {
            for bits in 0..4 {
                let a = bits & 1 == 1;
                let b = bits & 2 == 2;
                let r = &Poly::monomial(Monomial::from_vars([P1, Q1]), Coeff::one()) + &Poly::constant(s);
                let h = quadratize_equation(&r, P1, Q1).unwrap();
                let val = h.eval(|v| if v == P1 { a } else { b });
                let satisfied = i64::from(a && b) + s == 0;
                assert!(val >= Coeff::zero());
                assert_eq!(val.is_zero(), satisfied, "s={s} a={a} b={b}");
            }
        }
    }

    #[test]
    fn assembled_143_with_first_pairing_matches_reference() {
        let (h, map) = assemble_problem(&system_143(), Pairing::FirstProduct).unwrap();
        assert_eq!(h, reference_143());
        assert_eq!(h.len(), 11);
        assert_eq!(map.vars(), &[P1, P2, Q1, Q2]);
    }

    #[test]
    fn default_pairing_is_the_swapped_reference() {
        let (h, _) = assemble_problem(&system_143(), Pairing::LastProduct).unwrap();
        let swap = |v: VarId| match v {
            VarId::P(i) => VarId::Q(i),
            VarId::Q(i) => VarId::P(i),
            c => c,
        };
        let swapped = Poly::from_terms(
            reference_143().terms().map(|(m, c)| (Monomial::from_vars(m.vars().iter().map(|&v| swap(v))), *c)),
        );
        assert_eq!(h, swapped);
    }

    #[test]
    fn single_equation_system() {
        let sys = EquationSystem {
            n: 143,
            widths: (4, 4),
            variables: vec![P1, Q1],
            equations: vec![ColumnEquation { column: 1, lhs: poly(&[(1, &[P1]), (1, &[Q1])]), rhs: Poly::constant(1) }],
            fixed: BTreeMap::new(),
            forbidden_pairs: BTreeSet::new(),
        };
        let (h, _) = assemble_problem(&sys, Pairing::default()).unwrap();
        assert_eq!(h, poly(&[(1, &[]), (-1, &[P1]), (-1, &[Q1]), (2, &[P1, Q1])]));
    }

    #[test]
    fn empty_system() {
        let sys = EquationSystem {
            n: 9,
            widths: (2, 2),
            variables: vec![],
            equations: vec![],
            fixed: BTreeMap::new(),
            forbidden_pairs: BTreeSet::new(),
        };
        assert_eq!(assemble_problem(&sys, Pairing::default()), Err(Error::EmptySystem));
    }

    #[test]
    fn diagonal_entries_143() {
        let map = QubitMap::new(vec![P1, P2, Q1, Q2]);
        let d = polynomial_to_diagonal(&reference_143(), &map).unwrap();
        assert_eq!(d.dim(), 16);
        assert_eq!(d.energies()[6], Coeff::zero());
        assert_eq!(d.energies()[9], Coeff::zero());
        assert_eq!(d.energies()[0], Coeff::from_integer(5));
        // independent evaluation through the assignment closure
        for b in 0..16 {
            let e = reference_143().eval(|v| map.bit(b, v).unwrap());
            assert_eq!(d.energies()[b], e);
        }
        assert!(d.energies().iter().all(|e| *e >= Coeff::zero()));
    }

    #[test]
    fn diagonal_errors_and_zero() {
        let map = QubitMap::new(vec![P1]);
        assert!(matches!(polynomial_to_diagonal(&Poly::var(Q1), &map), Err(Error::UnmappedVariable(_))));
        let d = polynomial_to_diagonal(&Poly::zero(), &QubitMap::new(vec![P1, Q1])).unwrap();
        assert!(d.energies().iter().all(Zero::is_zero));
    }

    #[test]
    fn direct_cost_entries() {
        let d = direct_cost_diagonal(143, 4, 4).unwrap();
        assert_eq!(d.energies()[(11 << 4) | 13], Coeff::zero());
        assert_eq!(d.energies()[0], Coeff::from_integer(20449));
        let d21 = direct_cost_diagonal(21, 2, 3).unwrap();
        assert_eq!(d21.min(), Coeff::zero());
        let zeros: Vec<usize> = (0..32).filter(|&b| d21.energies()[b].is_zero()).collect();
        assert_eq!(zeros, vec![(3 << 3) | 7]);
        assert!(matches!(direct_cost_diagonal(143, 10, 10), Err(Error::DimensionTooLarge { .. })));
    }

    #[test]
    fn mixer_endpoints() {
        let map = QubitMap::new(vec![P1, P2, Q1, Q2]);
        let hp = polynomial_to_diagonal(&reference_143(), &map).unwrap();
        let mixer = MixerSpec::new(4, 0.6).unwrap();
        let h0 = interpolated_hamiltonian(0.0, &mixer, &hp).unwrap();
        for b in 0..16 {
            for c in 0..16 {
                let x = h0.matrix()[(b, c)];
                let expect = if (b ^ c).count_ones() == 1 { 0.6 } else { 0.0 };
                assert_eq!(x, Complex64::new(expect, 0.0));
            }
        }
        let h1 = interpolated_hamiltonian(1.0, &mixer, &hp).unwrap();
        let diag = nalgebra::DVector::from_iterator(16, hp.as_f64().iter().map(|&e| Complex64::new(e, 0.0)));
        assert_eq!(h1.matrix(), &DMatrix::from_diagonal(&diag));
        for s in [0.0, 0.3, 0.5, 1.0] {
            assert!(interpolated_hamiltonian(s, &mixer, &hp).unwrap().hermiticity_defect() <= 1e-12);
        }
        assert!(interpolated_hamiltonian(1.5, &mixer, &hp).is_err());
        assert!(matches!(
            interpolated_hamiltonian(0.5, &MixerSpec::new(3, 0.6).unwrap(), &hp),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(MixerSpec::new(4, 0.0).is_err());
    }
}
