//! Seeded random circuit families.
//!
//! All randomness comes from `ChaCha8Rng::seed_from_u64(seed)`. Per gate the
//! draws are: gate kind `gen_range(0..4)` (T, S, HSH, CNOT), then the
//! qubit(s) as described on [`sample_target`]. Compound circuits draw one
//! `u64` seed per block first, then the external CNOTs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitSpec {
    pub qubits: usize,
    pub depth: usize,
    /// Standard deviation of the CNOT span distribution; `f64::INFINITY`
    /// means the target is uniform over the other qubits.
    #[serde(with = "sigma_serde")]
    pub sigma: f64,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompoundSpec {
    pub blocks: usize,
    pub qubits_per_block: usize,
    pub depth_per_block: usize,
    pub external_cnots: usize,
    #[serde(with = "sigma_serde")]
    pub block_sigma: f64,
    pub seed: u64,
}

pub(crate) mod sigma_serde {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(f64),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::N(x) => Ok(x),
            Raw::S(s) => super::parse_sigma(&s).map_err(serde::de::Error::custom),
        }
    }
}

/// Accepts a non-negative number, `inf`, or `∞`.
pub fn parse_sigma(s: &str) -> Result<f64> {
    let t = s.trim();
    if matches!(t.to_ascii_lowercase().as_str(), "inf" | "infinity") || t == "∞" {
        return Ok(f64::INFINITY);
    }
    let v: f64 = t
        .parse()
        .map_err(|_| Error::Invalid(format!("bad sigma {s:?}")))?;
    if !(v >= 0.0) {
        return Err(Error::Invalid(format!("sigma must be non-negative, got {v}")));
    }
    Ok(v)
}

pub fn format_sigma(s: f64) -> String {
    if s.is_infinite() {
        "inf".to_string()
    } else {
        format!("{s}")
    }
}

/// Unnormalized weight of a span `delta ≥ 1`.
pub fn span_weight(delta: usize, sigma: f64) -> f64 {
    if sigma.is_infinite() {
        1.0
    } else if sigma == 0.0 {
        if delta == 1 {
            1.0
        } else {
            0.0
        }
    } else {
        let x = delta as f64 - 1.0;
        (-x * x / (2.0 * sigma * sigma)).exp()
    }
}

/// Picks a partner for `c` among `0..n` (excluding `c`).
///
/// Infinite `sigma`: uniform over the other positions. Otherwise a span
/// `Δ` is drawn from the weights over the spans reachable from `c` in at
/// least one direction, then a direction uniformly among those that fit.
pub fn sample_target(rng: &mut ChaCha8Rng, n: usize, c: usize, sigma: f64) -> usize {
    debug_assert!(n >= 2 && c < n);
    if sigma.is_infinite() {
        let t = rng.gen_range(0..n - 1);
        return if t >= c { t + 1 } else { t };
    }
    let max_span = c.max(n - 1 - c);
    let weights: Vec<f64> = (1..=max_span).map(|d| span_weight(d, sigma)).collect();
    let total: f64 = weights.iter().sum();
    let mut r = rng.gen::<f64>() * total;
    let mut delta = max_span;
    for (i, w) in weights.iter().enumerate() {
        if r < *w {
            delta = i + 1;
            break;
        }
        r -= w;
    }
    let up = c + delta < n;
    let down = delta <= c;
    match (up, down) {
        (true, true) => {
            if rng.gen::<bool>() {
                c + delta
            } else {
                c - delta
            }
        }
        (true, false) => c + delta,
        _ => c - delta,
    }
}

fn draw_gates(rng: &mut ChaCha8Rng, n: usize, depth: usize, sigma: f64) -> Vec<Gate> {
    let mut gates = Vec::with_capacity(depth);
    while gates.len() < depth {
        let kind = rng.gen_range(0..4u8);
        if kind == 3 && n < 2 {
            continue;
        }
        let q = rng.gen_range(0..n);
        gates.push(match kind {
            0 => Gate::T(q),
            1 => Gate::S(q),
            2 => Gate::Hsh(q),
            _ => Gate::Cnot(q, sample_target(rng, n, q, sigma)),
        });
    }
    gates
}

/// Random Clifford+T circuit with `depth` gates from {T, S, HSH, CNOT}.
pub fn gen_clifford_t(spec: &CircuitSpec) -> Result<Circuit> {
    if spec.qubits == 0 {
        return Err(Error::Invalid("circuit needs at least one qubit".into()));
    }
    if !(spec.sigma >= 0.0) {
        return Err(Error::Invalid("sigma must be non-negative".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    Ok(Circuit {
        qubits: spec.qubits,
        gates: draw_gates(&mut rng, spec.qubits, spec.depth, spec.sigma),
    })
}

/// Dense blocks stacked vertically and joined by a few long-range CNOTs.
pub fn gen_compound(spec: &CompoundSpec) -> Result<Circuit> {
    if spec.blocks < 2 || spec.qubits_per_block == 0 {
        return Err(Error::Invalid(
            "compound circuits need at least 2 blocks of at least 1 qubit".into(),
        ));
    }
    let q = spec.qubits_per_block;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let seeds: Vec<u64> = (0..spec.blocks).map(|_| rng.gen()).collect();
    let blocks: Vec<Vec<Gate>> = seeds
        .iter()
        .enumerate()
        .map(|(b, &s)| {
            let mut brng = ChaCha8Rng::seed_from_u64(s);
            let off = b * q;
            draw_gates(&mut brng, q, spec.depth_per_block, f64::INFINITY)
                .into_iter()
                .map(|g| shift(g, off))
                .collect()
        })
        .collect();
    // Round-robin interleave so block gates are spread across "time".
    let mut gates = Vec::with_capacity(spec.blocks * spec.depth_per_block + spec.external_cnots);
    for i in 0..spec.depth_per_block {
        for b in &blocks {
            gates.push(b[i]);
        }
    }
    for _ in 0..spec.external_cnots {
        let cb = rng.gen_range(0..spec.blocks);
        let tb = sample_target(&mut rng, spec.blocks, cb, spec.block_sigma);
        let c = cb * q + rng.gen_range(0..q);
        let t = tb * q + rng.gen_range(0..q);
        let pos = rng.gen_range(0..=gates.len());
        gates.insert(pos, Gate::Cnot(c, t));
    }
    Ok(Circuit {
        qubits: spec.blocks * q,
        gates,
    })
}

fn shift(g: Gate, off: usize) -> Gate {
    match g {
        Gate::T(q) => Gate::T(q + off),
        Gate::S(q) => Gate::S(q + off),
        Gate::Sdg(q) => Gate::Sdg(q + off),
        Gate::Z(q) => Gate::Z(q + off),
        Gate::X(q) => Gate::X(q + off),
        Gate::H(q) => Gate::H(q + off),
        Gate::Hsh(q) => Gate::Hsh(q + off),
        Gate::Cnot(c, t) => Gate::Cnot(c + off, t + off),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_zero_is_nearest_neighbour() {
        let spec = CircuitSpec { qubits: 12, depth: 2000, sigma: 0.0, seed: 3 };
        let c = gen_clifford_t(&spec).unwrap();
        for g in &c.gates {
            if let Gate::Cnot(a, b) = g {
                assert_eq!(a.abs_diff(*b), 1);
            }
        }
    }

    #[test]
    fn same_seed_same_circuit() {
        let spec = CircuitSpec { qubits: 7, depth: 300, sigma: 2.0, seed: 99 };
        assert_eq!(gen_clifford_t(&spec).unwrap(), gen_clifford_t(&spec).unwrap());
        let other = CircuitSpec { seed: 100, ..spec };
        assert_ne!(gen_clifford_t(&spec).unwrap(), gen_clifford_t(&other).unwrap());
    }

    #[test]
    fn single_qubit_never_gets_cnot() {
        let spec = CircuitSpec { qubits: 1, depth: 500, sigma: 1.0, seed: 1 };
        let c = gen_clifford_t(&spec).unwrap();
        assert_eq!(c.gates.len(), 500);
        assert!(c.gates.iter().all(|g| !matches!(g, Gate::Cnot(..))));
    }

    #[test]
    fn compound_external_count() {
        let spec = CompoundSpec {
            blocks: 2,
            qubits_per_block: 3,
            depth_per_block: 20,
            external_cnots: 1,
            block_sigma: 1.0,
            seed: 5,
        };
        let c = gen_compound(&spec).unwrap();
        let cross = c
            .gates
            .iter()
            .filter(|g| matches!(g, Gate::Cnot(a, b) if a / 3 != b / 3))
            .count();
        assert_eq!(cross, 1);
        assert_eq!(c.gates.len(), 41);
    }

    #[test]
    fn sigma_parsing() {
        assert!(parse_sigma("inf").unwrap().is_infinite());
        assert_eq!(parse_sigma("2.5").unwrap(), 2.5);
        assert!(parse_sigma("-1").is_err());
    }
}
