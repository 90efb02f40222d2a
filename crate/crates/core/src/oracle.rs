//! Reference answers that share no code with the ZX pipeline: a dense
//! statevector simulator and brute-force summation over segment tables.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::circuit::{BasisState, Circuit, Gate};
use crate::error::{Error, Result};
use crate::phase::ParamId;
use crate::regroup::Segment;

pub const MAX_ORACLE_QUBITS: usize = 14;
pub const MAX_ORACLE_PARAMS: usize = 24;

fn state_vector(n: usize, states: &[BasisState]) -> Vec<Complex64> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut psi = vec![Complex64::new(1.0, 0.0)];
    // Qubit i is bit i of the index, so build from the last qubit down.
    for q in (0..n).rev() {
        let amp: [f64; 2] = match states[q] {
            BasisState::Zero => [1.0, 0.0],
            BasisState::One => [0.0, 1.0],
            BasisState::Plus => [h, h],
        };
        let mut next = Vec::with_capacity(psi.len() * 2);
        for a in &psi {
            next.push(a * amp[0]);
            next.push(a * amp[1]);
        }
        psi = next;
    }
    psi
}

fn apply_diag(psi: &mut [Complex64], q: usize, phase: Complex64) {
    for (i, a) in psi.iter_mut().enumerate() {
        if (i >> q) & 1 == 1 {
            *a *= phase;
        }
    }
}

fn apply_h(psi: &mut [Complex64], q: usize) {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let bit = 1 << q;
    for i in 0..psi.len() {
        if i & bit == 0 {
            let (a, b) = (psi[i], psi[i | bit]);
            psi[i] = (a + b) * h;
            psi[i | bit] = (a - b) * h;
        }
    }
}

fn apply_x(psi: &mut [Complex64], q: usize) {
    let bit = 1 << q;
    for i in 0..psi.len() {
        if i & bit == 0 {
            psi.swap(i, i | bit);
        }
    }
}

fn apply_cnot(psi: &mut [Complex64], c: usize, t: usize) {
    let (cb, tb) = (1 << c, 1 << t);
    for i in 0..psi.len() {
        if i & cb != 0 && i & tb == 0 {
            psi.swap(i, i | tb);
        }
    }
}

/// Final state `U|in⟩` as a dense vector.
pub fn evolve(c: &Circuit, ins: &[BasisState]) -> Result<Vec<Complex64>> {
    let n = c.qubits;
    if n > MAX_ORACLE_QUBITS {
        return Err(Error::SizeCap(format!("{n} qubits exceeds oracle cap")));
    }
    if ins.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: ins.len(),
        });
    }
    let mut psi = state_vector(n, ins);
    let phase = |deg: f64| Complex64::from_polar(1.0, deg.to_radians());
    for g in &c.gates {
        match *g {
            Gate::T(q) => apply_diag(&mut psi, q, phase(45.0)),
            Gate::S(q) => apply_diag(&mut psi, q, Complex64::new(0.0, 1.0)),
            Gate::Sdg(q) => apply_diag(&mut psi, q, Complex64::new(0.0, -1.0)),
            Gate::Z(q) => apply_diag(&mut psi, q, Complex64::new(-1.0, 0.0)),
            Gate::X(q) => apply_x(&mut psi, q),
            Gate::H(q) => apply_h(&mut psi, q),
            Gate::Hsh(q) => {
                apply_h(&mut psi, q);
                apply_diag(&mut psi, q, Complex64::new(0.0, 1.0));
                apply_h(&mut psi, q);
            }
            Gate::Cnot(a, b) => apply_cnot(&mut psi, a, b),
        }
    }
    Ok(psi)
}

/// `⟨out|U|in⟩` by gate-by-gate application.
pub fn statevector_amplitude(
    c: &Circuit,
    ins: &[BasisState],
    outs: &[BasisState],
) -> Result<Complex64> {
    let psi = evolve(c, ins)?;
    if outs.len() != c.qubits {
        return Err(Error::LengthMismatch {
            expected: c.qubits,
            got: outs.len(),
        });
    }
    let phi = state_vector(c.qubits, outs);
    Ok(phi.iter().zip(&psi).map(|(a, b)| a.conj() * b).sum())
}

/// `Σ_{all assignments} Π_i table_i[bits of its params]`, looking each bit
/// up by parameter id. The first parameter of a segment is the most
/// significant bit of its table index.
pub fn naive_global_sum(segments: &[Segment]) -> Result<Complex64> {
    let mut all: Vec<ParamId> = segments
        .iter()
        .flat_map(|s| s.params.iter().copied())
        .collect();
    all.sort_unstable();
    all.dedup();
    if all.len() > MAX_ORACLE_PARAMS {
        return Err(Error::SizeCap(format!(
            "{} parameters exceeds brute-force cap",
            all.len()
        )));
    }
    let mut total = Complex64::new(0.0, 0.0);
    let mut value: HashMap<ParamId, usize> = HashMap::new();
    for g in 0u64..(1u64 << all.len()) {
        for (k, p) in all.iter().enumerate() {
            value.insert(*p, ((g >> k) & 1) as usize);
        }
        let mut prod = Complex64::new(1.0, 0.0);
        for s in segments {
            let mut idx = 0usize;
            for p in &s.params {
                idx = (idx << 1) | value[p];
            }
            prod *= s.table[idx].to_complex();
        }
        total += prod;
    }
    Ok(total)
}
