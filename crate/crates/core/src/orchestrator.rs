//! End-to-end pipeline: width splits, compilation, simulation, decoding.

use std::collections::BTreeMap;

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::compiler::{build_layout, enumerate_width_splits, simplify, EquationSystem};
use crate::engine::{populations, run_schedule, EvolutionTrace, Schedule};
use crate::error::{Error, Result};
use crate::hamiltonian::{
    assemble_problem, polynomial_to_diagonal, qubit_cap, DiagonalOperator, MixerSpec, Pairing, QubitMap,
};
use crate::poly::{Coeff, Poly, VarId};

/// Largest variable count accepted by [`brute_force_min`].
pub const BRUTE_FORCE_LIMIT: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Presolve fixed every variable; no simulation needed.
    Preprocessed,
    Adiabatic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorResult {
    pub n: u64,
    pub p: u64,
    pub q: u64,
    pub widths: (u32, u32),
    pub mode: Mode,
    pub success_probability: f64,
    pub manifold: Vec<usize>,
    /// Every factor pair encoded by the ground manifold, `p <= q`.
    pub decodings: Vec<(u64, u64)>,
    pub min_gap: Option<f64>,
    pub schedule: Option<Schedule>,
}

/// Basis states attaining the exact minimum energy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundManifold {
    pub energy: Coeff,
    pub indices: Vec<usize>,
}

pub fn ground_manifold(hp: &DiagonalOperator) -> GroundManifold {
    let energy = hp.min();
    let indices = hp.energies().iter().enumerate().filter(|(_, e)| **e == energy).map(|(b, _)| b).collect();
    GroundManifold { energy, indices }
}

pub fn success_probability(populations: &[f64], manifold: &GroundManifold) -> Result<f64> {
    manifold
        .indices
        .iter()
        .map(|&b| populations.get(b).copied().ok_or(Error::IndexOutOfRange { index: b, dim: populations.len() }))
        .sum()
}

/// Reassemble both factors from a basis state plus the presolved bits.
pub fn decode_assignment(
    index: usize,
    widths: (u32, u32),
    map: &QubitMap,
    fixed: &BTreeMap<VarId, bool>,
) -> Result<(u64, u64)> {
    if index >= map.dim() {
        return Err(Error::IndexOutOfRange { index, dim: map.dim() });
    }
    let bit = |v: VarId| {
        map.bit(index, v)
            .or_else(|| fixed.get(&v).copied())
            .ok_or_else(|| Error::InconsistentMap(format!("{v} is neither mapped nor fixed")))
    };
    let factor = |width: u32, var: fn(u32) -> VarId| -> Result<u64> {
        let mut value = 1 | (1 << (width - 1));
        for i in 1..width - 1 {
            if bit(var(i))? {
                value |= 1 << i;
            }
        }
        Ok(value)
    };
    Ok((factor(widths.0, VarId::P)?, factor(widths.1, VarId::Q)?))
}

/// Exhaustive minimum of `poly` over every assignment of `map`'s variables.
/// Returns the minimum and the basis indices attaining it.
pub fn brute_force_min(poly: &Poly, map: &QubitMap) -> Result<(Coeff, Vec<usize>)> {
    if map.len() > BRUTE_FORCE_LIMIT {
        return Err(Error::TooManyVariables { vars: map.len(), limit: BRUTE_FORCE_LIMIT });
    }
    if let Some(v) = poly.variables().into_iter().find(|&v| map.position(v).is_none()) {
        return Err(Error::UnmappedVariable(v.to_string()));
    }
    let mut best: Option<Coeff> = None;
    let mut argmin = Vec::new();
    for b in 0..map.dim() {
        let value = poly.eval(|v| map.bit(b, v).unwrap_or(false));
        match best {
            Some(m) if value > m => {}
            Some(m) if value == m => argmin.push(b),
            _ => {
                best = Some(value);
                argmin = vec![b];
            }
        }
    }
    Ok((best.unwrap_or_else(Coeff::zero), argmin))
}

/// Solutions of a (possibly simplified) system over its free variables, by
/// exhaustive enumeration.
pub fn brute_force_solutions(system: &EquationSystem) -> Result<(QubitMap, Vec<usize>)> {
    let map = QubitMap::new(system.free_variables());
    if map.len() > BRUTE_FORCE_LIMIT {
        return Err(Error::TooManyVariables { vars: map.len(), limit: BRUTE_FORCE_LIMIT });
    }
    let solutions = (0..map.dim()).filter(|&b| system.is_satisfied_by(|v| map.bit(b, v).unwrap_or(false))).collect();
    Ok((map, solutions))
}

/// One width split carried through compilation.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub layout: EquationSystem,
    pub system: EquationSystem,
    /// `None` when presolve fixed every variable.
    pub problem: Option<Problem>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Problem {
    pub polynomial: Poly,
    pub map: QubitMap,
    pub diagonal: DiagonalOperator,
}

impl Problem {
    pub fn from_system(system: &EquationSystem, pairing: Pairing) -> Result<Self> {
        let (polynomial, map) = assemble_problem(system, pairing)?;
        let diagonal = polynomial_to_diagonal(&polynomial, &map)?;
        Ok(Problem { polynomial, map, diagonal })
    }

    pub fn mixer(&self, g: f64) -> Result<MixerSpec> {
        MixerSpec::new(self.map.len(), g)
    }
}

/// Layout, presolve and (if anything is left) the problem Hamiltonian.
pub fn compile_split(n: u64, widths: (u32, u32), pairing: Pairing) -> Result<Instance> {
    let layout = build_layout(n, widths.0, widths.1)?;
    let system = simplify(&layout)?;
    let problem = match Problem::from_system(&system, pairing) {
        Ok(p) => Some(p),
        Err(Error::EmptySystem) => None,
        Err(e) => return Err(e),
    };
    Ok(Instance { layout, system, problem })
}

/// Splits to try: the override, or every candidate in canonical order.
pub fn candidate_splits(n: u64, split: Option<(u32, u32)>) -> Result<Vec<(u32, u32)>> {
    let all = enumerate_width_splits(n)?;
    Ok(match split {
        Some(w) => vec![w],
        None => all,
    })
}

/// First split that survives presolve, in canonical order.
pub fn first_feasible(n: u64, split: Option<(u32, u32)>, pairing: Pairing) -> Result<Instance> {
    for widths in candidate_splits(n, split)? {
        match compile_split(n, widths, pairing) {
            Ok(inst) => return Ok(inst),
            Err(Error::Infeasible(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::NotFactorable(n))
}

#[derive(Clone, Debug, PartialEq)]
pub struct FactorOptions {
    pub schedule: Schedule,
    pub split: Option<(u32, u32)>,
    pub pairing: Pairing,
    /// Splits leaving more free variables than this are skipped.
    pub qubit_cap: usize,
}

impl Default for FactorOptions {
    fn default() -> Self {
        FactorOptions {
            schedule: Schedule::default(),
            split: None,
            pairing: Pairing::default(),
            qubit_cap: qubit_cap(),
        }
    }
}

fn ordered(p: u64, q: u64) -> (u64, u64) {
    (p.min(q), p.max(q))
}

/// Simulate one compiled problem and decode its most populated ground state.
pub fn solve_problem(
    n: u64,
    system: &EquationSystem,
    problem: &Problem,
    schedule: &Schedule,
) -> Result<Option<(FactorResult, EvolutionTrace)>> {
    let manifold = ground_manifold(&problem.diagonal);
    if !manifold.energy.is_zero() {
        return Ok(None);
    }
    let trace = run_schedule(&problem.mixer(schedule.g)?, &problem.diagonal, schedule)?;
    let pops = populations(&trace.final_state);
    let success = success_probability(&pops, &manifold)?;

    let mut decodings = Vec::new();
    for &b in &manifold.indices {
        let (p, q) = decode_assignment(b, system.widths, &problem.map, &system.fixed)?;
        if p.checked_mul(q) == Some(n) && !decodings.contains(&ordered(p, q)) {
            decodings.push(ordered(p, q));
        }
    }
    decodings.sort_unstable();

    // most populated ground state; ties go to the lowest index
    let best = manifold
        .indices
        .iter()
        .copied()
        .fold(None::<usize>, |acc, b| match acc {
            Some(a) if pops[a] >= pops[b] => Some(a),
            _ => Some(b),
        })
        .expect("manifold is non-empty");
    let (p, q) = decode_assignment(best, system.widths, &problem.map, &system.fixed)?;
    if p.checked_mul(q) != Some(n) {
        return Ok(None);
    }
    let (p, q) = ordered(p, q);
    let result = FactorResult {
        n,
        p,
        q,
        widths: system.widths,
        mode: Mode::Adiabatic,
        success_probability: success,
        manifold: manifold.indices,
        decodings,
        min_gap: trace.min_gap,
        schedule: Some(schedule.clone()),
    };
    Ok(Some((result, trace)))
}

/// Factor `n` into two nontrivial factors.
///
/// Splits are tried in canonical order; infeasible splits and splits that
/// leave more than `options.qubit_cap` free variables are skipped. If nothing
/// succeeds and some split was skipped for size, the size error is returned
/// instead of [`Error::NotFactorable`].
pub fn factor(n: u64, options: &FactorOptions) -> Result<FactorResult> {
    let mut oversize = None;
    for widths in candidate_splits(n, options.split)? {
        let layout = build_layout(n, widths.0, widths.1)?;
        let system = match simplify(&layout) {
            Ok(s) => s,
            Err(Error::Infeasible(_)) => continue,
            Err(e) => return Err(e),
        };
        let free = system.free_variables().len();
        if free > options.qubit_cap {
            oversize.get_or_insert(Error::DimensionTooLarge { qubits: free, cap: options.qubit_cap });
            continue;
        }
        let problem = match Problem::from_system(&system, options.pairing) {
            Ok(p) => Some(p),
            Err(Error::EmptySystem) => None,
            Err(e) => return Err(e),
        };
        let inst = Instance { layout, system, problem };
        match &inst.problem {
            None => {
                let (p, q) = decode_assignment(0, widths, &QubitMap::new(vec![]), &inst.system.fixed)?;
                if p.checked_mul(q) == Some(n) {
                    let (p, q) = ordered(p, q);
                    return Ok(FactorResult {
                        n,
                        p,
                        q,
                        widths,
                        mode: Mode::Preprocessed,
                        success_probability: 1.0,
                        manifold: vec![0],
                        decodings: vec![(p, q)],
                        min_gap: None,
                        schedule: None,
                    });
                }
            }
            Some(problem) => {
                if let Some((result, _)) = solve_problem(n, &inst.system, problem, &options.schedule)? {
                    return Ok(result);
                }
            }
        }
    }
    Err(oversize.unwrap_or(Error::NotFactorable(n)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepAxis {
    /// Total evolution time.
    T,
    /// Step count.
    M,
    /// Mixer strength.
    G,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub success_probability: f64,
    pub min_gap: Option<f64>,
}

/// Independent runs of [`factor`] with one schedule parameter varied. Rows
/// come back in input order.
pub fn sweep(n: u64, axis: SweepAxis, values: &[f64], options: &FactorOptions) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(Error::InvalidParameter("sweep needs at least one value".into()));
    }
    values
        .par_iter()
        .map(|&value| {
            let base = &options.schedule;
            let schedule = match axis {
                SweepAxis::T => {
                    Schedule { total_time: value, ..base.clone() }.with_checkpoints(base.checkpoints.clone())?
                }
                SweepAxis::G => Schedule { g: value, ..base.clone() }.with_checkpoints(base.checkpoints.clone())?,
                SweepAxis::M => {
                    if value < 1.0 || value.fract() != 0.0 {
                        return Err(Error::InvalidParameter(format!(
                            "step count must be a positive integer, got {value}"
                        )));
                    }
                    Schedule::new(base.g, base.total_time, value as usize)?
                }
            };
            let result = factor(n, &FactorOptions { schedule, ..options.clone() })?;
            Ok(SweepRow { value, success_probability: result.success_probability, min_gap: result.min_gap })
        })
        .collect()
}
