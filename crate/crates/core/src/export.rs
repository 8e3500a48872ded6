//! JSON and CSV encodings of systems, operators and traces.
//!
//! Exact rationals are written as `"num/den"` strings. Floating-point values
//! in CSV carry 12 significant digits.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::compiler::{ColumnEquation, EquationSystem};
use crate::engine::{EvolutionTrace, GapTrace};
use crate::error::{Error, Result};
use crate::hamiltonian::{DiagonalOperator, Pairing, QubitMap};
use crate::orchestrator::{Instance, SweepRow};
use crate::poly::{parse_coeff, Coeff, Monomial, Poly, VarId};

/// `[coefficient, [variable, ...]]`.
pub type TermJson = (String, Vec<String>);

fn rational(c: &Coeff) -> String {
    format!("{}/{}", c.numer(), c.denom())
}

pub fn poly_to_json(p: &Poly) -> Vec<TermJson> {
    p.terms().map(|(m, c)| (rational(c), m.vars().iter().map(VarId::to_string).collect())).collect()
}

pub fn poly_from_json(terms: &[TermJson]) -> Result<Poly> {
    terms
        .iter()
        .map(|(c, vars)| {
            let vars = vars.iter().map(|v| v.parse()).collect::<Result<Vec<VarId>>>()?;
            Ok((Monomial::from_vars(vars), parse_coeff(c)?))
        })
        .collect::<Result<Vec<_>>>()
        .map(Poly::from_terms)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquationJson {
    pub column: u32,
    pub lhs: Vec<TermJson>,
    pub rhs: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemJson {
    pub n: u64,
    pub widths: (u32, u32),
    pub variables: Vec<String>,
    pub equations: Vec<EquationJson>,
    pub fixed: BTreeMap<String, u8>,
    pub forbidden_pairs: Vec<(String, String)>,
}

impl From<&EquationSystem> for SystemJson {
    fn from(s: &EquationSystem) -> Self {
        SystemJson {
            n: s.n,
            widths: s.widths,
            variables: s.variables.iter().map(VarId::to_string).collect(),
            equations: s
                .equations
                .iter()
                .map(|e| EquationJson { column: e.column, lhs: poly_to_json(&e.lhs), rhs: poly_to_json(&e.rhs) })
                .collect(),
            fixed: s.fixed.iter().map(|(v, &b)| (v.to_string(), u8::from(b))).collect(),
            forbidden_pairs: s.forbidden_pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
        }
    }
}

impl TryFrom<&SystemJson> for EquationSystem {
    type Error = Error;

    fn try_from(j: &SystemJson) -> Result<Self> {
        let parse = |s: &String| s.parse::<VarId>();
        let mut variables = j.variables.iter().map(parse).collect::<Result<Vec<_>>>()?;
        variables.sort_unstable();
        let equations = j
            .equations
            .iter()
            .map(|e| {
                Ok(ColumnEquation { column: e.column, lhs: poly_from_json(&e.lhs)?, rhs: poly_from_json(&e.rhs)? })
            })
            .collect::<Result<Vec<_>>>()?;
        let fixed = j
            .fixed
            .iter()
            .map(|(v, &b)| match b {
                0 | 1 => Ok((parse(v)?, b == 1)),
                _ => Err(Error::Parse(format!("fixed value of {v} must be 0 or 1, got {b}"))),
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        let forbidden_pairs = j
            .forbidden_pairs
            .iter()
            .map(|(a, b)| {
                let (a, b) = (parse(a)?, parse(b)?);
                Ok(if a < b { (a, b) } else { (b, a) })
            })
            .collect::<Result<_>>()?;
        let system = EquationSystem { n: j.n, widths: j.widths, variables, equations, fixed, forbidden_pairs };
        for eq in &system.equations {
            for v in eq.residual().variables() {
                if system.variables.binary_search(&v).is_err() {
                    return Err(Error::Parse(format!("equation uses undeclared variable {v}")));
                }
            }
        }
        Ok(system)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianJson {
    pub pairing: Pairing,
    pub qubits: Vec<String>,
    pub terms: Vec<TermJson>,
}

/// Output of the compile step: the simplified system at the top level, the
/// raw multiplication table under `layout`, and the assembled polynomial
/// (absent when presolve fixed everything).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompileJson {
    #[serde(flatten)]
    pub system: SystemJson,
    pub layout: SystemJson,
    pub hamiltonian: Option<HamiltonianJson>,
}

impl CompileJson {
    pub fn new(inst: &Instance, pairing: Pairing) -> Self {
        CompileJson {
            system: (&inst.system).into(),
            layout: (&inst.layout).into(),
            hamiltonian: inst.problem.as_ref().map(|p| HamiltonianJson {
                pairing,
                qubits: p.map.vars().iter().map(VarId::to_string).collect(),
                terms: poly_to_json(&p.polynomial),
            }),
        }
    }
}

/// Format with 12 significant digits, trailing zeros trimmed.
pub fn fmt_sig(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..DIGITS).contains(&exp) {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
        if s == "-0" {
            "0".into()
        } else {
            s
        }
    } else {
        let s = format!("{:.*e}", (DIGITS - 1) as usize, x);
        let (mantissa, e) = s.split_once('e').expect("exponent");
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        format!("{mantissa}e{e}")
    }
}

pub fn diagonal_to_json(d: &DiagonalOperator) -> Vec<String> {
    d.energies().iter().map(rational).collect()
}

/// `index,energy` rows; energies exact.
pub fn diagonal_to_csv(d: &DiagonalOperator) -> String {
    let mut out = String::from("index,energy\n");
    for (b, e) in d.energies().iter().enumerate() {
        let _ = writeln!(out, "{b},{}", rational(e));
    }
    out
}

/// `s,E0,...,E{k-1}` rows.
pub fn gap_trace_to_csv(trace: &GapTrace) -> String {
    let k = trace.samples.first().map_or(0, |s| s.levels.len());
    let mut out = String::from("s");
    for i in 0..k {
        let _ = write!(out, ",E{i}");
    }
    out.push('\n');
    for smp in &trace.samples {
        out.push_str(&fmt_sig(smp.s));
        for e in &smp.levels {
            out.push(',');
            out.push_str(&fmt_sig(*e));
        }
        out.push('\n');
    }
    out
}

/// `step,s,index,population` rows, one per basis state per checkpoint.
pub fn evolution_trace_to_csv(trace: &EvolutionTrace) -> String {
    let mut out = String::from("step,s,index,population\n");
    for snap in &trace.snapshots {
        for (b, p) in snap.populations.iter().enumerate() {
            let _ = writeln!(out, "{},{},{b},{}", snap.step, fmt_sig(snap.s), fmt_sig(*p));
        }
    }
    out
}

pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("value,success_probability,min_gap\n");
    for r in rows {
        let gap = r.min_gap.map(fmt_sig).unwrap_or_default();
        let _ = writeln!(out, "{},{},{gap}", fmt_sig(r.value), fmt_sig(r.success_probability));
    }
    out
}

/// Qubit labels of `map` in basis-index order (most significant first).
pub fn qubit_labels(map: &QubitMap) -> Vec<String> {
    map.vars().iter().map(VarId::to_string).collect()
}
