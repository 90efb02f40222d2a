//! Clifford+T circuits: the line-oriented text format, translation to
//! ZX-diagrams, and boundary plugging.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::diagram::{EdgeKind, SpiderId, SpiderKind, Wire, ZxDiagram};
use crate::error::{Error, Result};
use crate::phase::Phase;
use crate::scalar::ScalarC;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gate {
    T(usize),
    S(usize),
    Sdg(usize),
    Z(usize),
    X(usize),
    H(usize),
    Hsh(usize),
    Cnot(usize, usize),
}

impl Gate {
    pub fn qubits(&self) -> (usize, Option<usize>) {
        match *self {
            Gate::T(q) | Gate::S(q) | Gate::Sdg(q) | Gate::Z(q) | Gate::X(q) | Gate::H(q)
            | Gate::Hsh(q) => (q, None),
            Gate::Cnot(c, t) => (c, Some(t)),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::T(q) => write!(f, "T {q}"),
            Gate::S(q) => write!(f, "S {q}"),
            Gate::Sdg(q) => write!(f, "Sdg {q}"),
            Gate::Z(q) => write!(f, "Z {q}"),
            Gate::X(q) => write!(f, "X {q}"),
            Gate::H(q) => write!(f, "H {q}"),
            Gate::Hsh(q) => write!(f, "HSH {q}"),
            Gate::Cnot(c, t) => write!(f, "CNOT {c} {t}"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Circuit {
    pub qubits: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(qubits: usize) -> Self {
        Circuit {
            qubits,
            gates: Vec::new(),
        }
    }

    pub fn push(&mut self, g: Gate) {
        let (a, b) = g.qubits();
        self.qubits = self.qubits.max(a + 1).max(b.map_or(0, |b| b + 1));
        self.gates.push(g);
    }

    pub fn t_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::T(_))).count()
    }

    /// Parses the text format. An optional `qubits N` line fixes the
    /// register size; otherwise it is one more than the largest index used.
    pub fn parse(text: &str) -> Result<Circuit> {
        let mut declared: Option<usize> = None;
        let mut c = Circuit::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let toks: Vec<&str> = body.split_whitespace().collect();
            let err = |msg: String| Error::Parse { line, msg };
            let idx = |k: usize| -> Result<usize> {
                let t = toks
                    .get(k)
                    .ok_or_else(|| err(format!("missing operand for {}", toks[0])))?;
                t.parse::<usize>()
                    .map_err(|_| err(format!("bad qubit index {t:?}")))
            };
            let name = toks[0].to_ascii_uppercase();
            let arity = if name == "CNOT" || name == "CX" { 3 } else { 2 };
            if toks.len() != arity {
                return Err(err(format!("expected {} operand(s) for {}", arity - 1, toks[0])));
            }
            let gate = match name.as_str() {
                "QUBITS" => {
                    if declared.is_some() || !c.gates.is_empty() {
                        return Err(err("qubits header must come first".into()));
                    }
                    declared = Some(idx(1)?);
                    c.qubits = declared.unwrap();
                    continue;
                }
                "T" => Gate::T(idx(1)?),
                "S" => Gate::S(idx(1)?),
                "SDG" => Gate::Sdg(idx(1)?),
                "Z" => Gate::Z(idx(1)?),
                "X" => Gate::X(idx(1)?),
                "H" => Gate::H(idx(1)?),
                "HSH" => Gate::Hsh(idx(1)?),
                "CNOT" | "CX" => {
                    let (a, b) = (idx(1)?, idx(2)?);
                    if a == b {
                        return Err(err("CNOT control equals target".into()));
                    }
                    Gate::Cnot(a, b)
                }
                _ => return Err(err(format!("unknown gate {:?}", toks[0]))),
            };
            if let Some(n) = declared {
                let (a, b) = gate.qubits();
                if a >= n || b.is_some_and(|b| b >= n) {
                    return Err(err(format!("qubit index out of range for {n} qubits")));
                }
            }
            c.push(gate);
        }
        Ok(c)
    }

    /// Text form with a `qubits` header, parseable by [`Circuit::parse`].
    pub fn to_text(&self) -> String {
        let mut s = format!("qubits {}\n", self.qubits);
        for g in &self.gates {
            s.push_str(&g.to_string());
            s.push('\n');
        }
        s
    }

    /// Widens the register without adding gates.
    pub fn with_qubits(mut self, n: usize) -> Circuit {
        self.qubits = self.qubits.max(n);
        self
    }

    /// The circuit's linear map as a ZX-diagram with `qubits` inputs and
    /// outputs.
    pub fn to_diagram(&self) -> ZxDiagram {
        let mut d = ZxDiagram::new();
        let mut front: Vec<(SpiderId, EdgeKind)> = Vec::with_capacity(self.qubits);
        for _ in 0..self.qubits {
            let v = d.add_z(0);
            d.inputs_mut().push(Wire {
                spider: v,
                kind: EdgeKind::Plain,
            });
            front.push((v, EdgeKind::Plain));
        }
        let step = |d: &mut ZxDiagram, front: &mut Vec<(SpiderId, EdgeKind)>, q: usize, kind, k| {
            let v = d.add_spider(kind, Phase::eighths(k));
            let (u, e) = front[q];
            d.add_edge(u, v, e);
            front[q] = (v, EdgeKind::Plain);
            v
        };
        for g in &self.gates {
            match *g {
                Gate::T(q) => {
                    step(&mut d, &mut front, q, SpiderKind::Z, 1);
                }
                Gate::S(q) => {
                    step(&mut d, &mut front, q, SpiderKind::Z, 2);
                }
                Gate::Sdg(q) => {
                    step(&mut d, &mut front, q, SpiderKind::Z, 6);
                }
                Gate::Z(q) => {
                    step(&mut d, &mut front, q, SpiderKind::Z, 4);
                }
                Gate::X(q) => {
                    step(&mut d, &mut front, q, SpiderKind::X, 4);
                }
                Gate::H(q) => front[q].1 = front[q].1.toggled(),
                Gate::Hsh(q) => {
                    // H·S·H is an X-phase of π/2.
                    step(&mut d, &mut front, q, SpiderKind::X, 2);
                }
                Gate::Cnot(c, t) => {
                    let a = step(&mut d, &mut front, c, SpiderKind::Z, 0);
                    let b = step(&mut d, &mut front, t, SpiderKind::X, 0);
                    d.add_edge(a, b, EdgeKind::Plain);
                    d.mul_scalar(ScalarC::sqrt2_pow(1));
                }
            }
        }
        for (v, e) in front {
            d.outputs_mut().push(Wire { spider: v, kind: e });
        }
        d
    }
}

/// Boundary state for one qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasisState {
    Zero,
    One,
    Plus,
}

impl BasisState {
    /// Parses a string of `0`, `1` and `+` characters, qubit 0 first.
    pub fn parse_list(s: &str) -> Result<Vec<BasisState>> {
        s.chars()
            .map(|ch| match ch {
                '0' => Ok(BasisState::Zero),
                '1' => Ok(BasisState::One),
                '+' => Ok(BasisState::Plus),
                _ => Err(Error::Invalid(format!("bad basis character {ch:?} in {s:?}"))),
            })
            .collect()
    }

    pub fn all_plus(n: usize) -> Vec<BasisState> {
        vec![BasisState::Plus; n]
    }

    pub fn from_bits(bits: usize, n: usize) -> Vec<BasisState> {
        (0..n)
            .map(|i| {
                if (bits >> i) & 1 == 1 {
                    BasisState::One
                } else {
                    BasisState::Zero
                }
            })
            .collect()
    }
}

/// Closes every boundary wire with a normalized state (inputs) or effect
/// (outputs), producing the scalar diagram for `⟨out|U|in⟩`.
pub fn plug(d: &ZxDiagram, ins: &[BasisState], outs: &[BasisState]) -> Result<ZxDiagram> {
    if ins.len() != d.inputs().len() {
        return Err(Error::LengthMismatch {
            expected: d.inputs().len(),
            got: ins.len(),
        });
    }
    if outs.len() != d.outputs().len() {
        return Err(Error::LengthMismatch {
            expected: d.outputs().len(),
            got: outs.len(),
        });
    }
    let mut r = d.clone();
    let wires: Vec<(Wire, BasisState)> = d
        .inputs()
        .iter()
        .copied()
        .zip(ins.iter().copied())
        .chain(d.outputs().iter().copied().zip(outs.iter().copied()))
        .collect();
    r.inputs_mut().clear();
    r.outputs_mut().clear();
    for (w, b) in wires {
        // X(bπ) with one leg is √2|b⟩; Z(0) with one leg is √2|+⟩.
        let v = match b {
            BasisState::Zero => r.add_x(0),
            BasisState::One => r.add_x(4),
            BasisState::Plus => r.add_z(0),
        };
        r.add_edge(v, w.spider, w.kind);
        r.mul_scalar(ScalarC::sqrt2_pow(-1));
    }
    Ok(r)
}
