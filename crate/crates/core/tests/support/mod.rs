//! Independent reference implementations used by the integration tests.
//!
//! None of these share code paths with the library routines they check:
//! eigenvalues come from cyclic Jacobi rotations, time evolution from RK4,
//! and layout solutions from direct column-by-column enumeration.

#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::{BTreeMap, BTreeSet};

use aqfactor::compiler::EquationSystem;
use aqfactor::poly::VarId;
use num_complex::Complex64;

pub type Assignment = BTreeMap<VarId, bool>;

pub fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|k| k * k <= n).all(|k| !n.is_multiple_of(k))
}

pub fn is_semiprime(n: u64) -> bool {
    (2..).take_while(|k| k * k <= n).any(|k| n.is_multiple_of(k) && is_prime(k) && is_prime(n / k))
}

pub fn odd_semiprimes_below(limit: u64) -> Vec<u64> {
    (9..limit).step_by(2).filter(|&n| is_semiprime(n)).collect()
}

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-26 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// `(1 - s) g sum sigma_x + s diag(energies)` as a dense real matrix, built
/// from the definition.
pub fn reference_hamiltonian(s: f64, g: f64, energies: &[f64]) -> Vec<Vec<f64>> {
    let dim = energies.len();
    let n = dim.trailing_zeros();
    let mut h = vec![vec![0.0; dim]; dim];
    for b in 0..dim {
        h[b][b] = s * energies[b];
        for k in 0..n {
            h[b][b ^ (1 << k)] += (1.0 - s) * g;
        }
    }
    h
}

fn apply(h: &[Vec<f64>], psi: &[Complex64]) -> Vec<Complex64> {
    h.iter()
        .map(|row| row.iter().zip(psi).map(|(&x, &a)| a * x).sum::<Complex64>() * Complex64::new(0.0, -1.0))
        .collect()
}

fn axpy(psi: &[Complex64], k: &[Complex64], dt: f64) -> Vec<Complex64> {
    psi.iter().zip(k).map(|(a, b)| a + b * dt).collect()
}

/// Integrate `d psi / dt = -i H psi` for time `t` with `substeps` RK4 steps.
pub fn rk4_evolve(h: &[Vec<f64>], mut psi: Vec<Complex64>, t: f64, substeps: usize) -> Vec<Complex64> {
    let dt = t / substeps as f64;
    for _ in 0..substeps {
        let k1 = apply(h, &psi);
        let k2 = apply(h, &axpy(&psi, &k1, dt / 2.0));
        let k3 = apply(h, &axpy(&psi, &k2, dt / 2.0));
        let k4 = apply(h, &axpy(&psi, &k3, dt));
        for i in 0..psi.len() {
            psi[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (dt / 6.0);
        }
    }
    psi
}

/// Piecewise-constant sweep `H_m = (1 - m/M) H0 + (m/M) Hp`, integrated by
/// RK4 from the uniform-magnitude mixer ground state.
pub fn rk4_sweep(energies: &[f64], g: f64, total_time: f64, steps: usize, substeps: usize) -> Vec<f64> {
    let dim = energies.len();
    let amp = 1.0 / (dim as f64).sqrt();
    let mut psi: Vec<Complex64> = (0..dim)
        .map(|b: usize| Complex64::new(if b.count_ones().is_multiple_of(2) { amp } else { -amp }, 0.0))
        .collect();
    let tau = total_time / steps as f64;
    for m in 1..=steps {
        let h = reference_hamiltonian(m as f64 / steps as f64, g, energies);
        psi = rk4_evolve(&h, psi, tau, substeps);
    }
    psi.iter().map(|a| a.norm_sqr()).collect()
}

/// Every solution of an unsimplified multiplication-table layout.
///
/// Factor interior bits are enumerated exhaustively; for each, the columns
/// are walked in order and every assignment of each column's outgoing
/// carries is tried against that column's equation.
pub fn layout_solutions(layout: &EquationSystem) -> BTreeSet<Vec<(VarId, bool)>> {
    let interior: Vec<VarId> =
        layout.variables.iter().copied().filter(|v| matches!(v, VarId::P(_) | VarId::Q(_))).collect();
    let mut out = BTreeSet::new();
    for bits in 0u64..1 << interior.len() {
        let mut asg: Assignment = interior.iter().enumerate().map(|(k, &v)| (v, bits >> k & 1 == 1)).collect();
        walk_columns(layout, 0, &mut asg, &mut out);
    }
    out
}

fn walk_columns(layout: &EquationSystem, col: usize, asg: &mut Assignment, out: &mut BTreeSet<Vec<(VarId, bool)>>) {
    if col == layout.equations.len() {
        out.insert(asg.iter().map(|(&v, &b)| (v, b)).collect());
        return;
    }
    let eq = &layout.equations[col];
    let outgoing: Vec<VarId> = eq.rhs.variables();
    for bits in 0u64..1 << outgoing.len() {
        for (k, &z) in outgoing.iter().enumerate() {
            asg.insert(z, bits >> k & 1 == 1);
        }
        let value = |v: VarId| asg[&v];
        if eq.lhs.eval(value) == eq.rhs.eval(value) {
            walk_columns(layout, col + 1, asg, out);
        }
    }
    for z in outgoing {
        asg.remove(&z);
    }
}

/// Every solution of a simplified system, extended by its fixed variables,
/// by brute force over the free variables.
pub fn simplified_solutions(system: &EquationSystem) -> BTreeSet<Vec<(VarId, bool)>> {
    let free = system.free_variables();
    let residuals: Vec<_> = system.equations.iter().map(|e| e.residual()).collect();
    let mut out = BTreeSet::new();
    for bits in 0u64..1 << free.len() {
        let mut asg: Assignment = system.fixed.clone();
        for (k, &v) in free.iter().enumerate() {
            asg.insert(v, bits >> k & 1 == 1);
        }
        if residuals.iter().all(|r| r.eval(|v| asg[&v]) == 0.into()) {
            out.insert(asg.into_iter().collect());
        }
    }
    out
}

/// Integer value of a factor from a full assignment.
pub fn factor_value(asg: &[(VarId, bool)], width: u32, var: fn(u32) -> VarId) -> u64 {
    let mut value = 1 | 1 << (width - 1);
    for &(v, b) in asg {
        for i in 1..width - 1 {
            if v == var(i) && b {
                value |= 1 << i;
            }
        }
    }
    value
}
