//! Spider phases: a multiple of π/4 plus a parity of boolean parameters.

use serde::{Deserialize, Serialize};

use crate::scalar::ScalarC;

/// Identifier of a boolean cut parameter.
pub type ParamId = u32;

/// `fixed·π/4 + π·(⊕ params)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Phase {
    fixed: u8,
    /// Sorted, no duplicates.
    params: Vec<ParamId>,
}

impl Phase {
    pub fn zero() -> Self {
        Phase::default()
    }

    /// `k·π/4`, reduced mod 8.
    pub fn eighths(k: i64) -> Self {
        Phase {
            fixed: k.rem_euclid(8) as u8,
            params: Vec::new(),
        }
    }

    pub fn param(p: ParamId) -> Self {
        Phase {
            fixed: 0,
            params: vec![p],
        }
    }

    pub fn with_params(fixed: i64, params: impl IntoIterator<Item = ParamId>) -> Self {
        let mut ph = Phase::eighths(fixed);
        for p in params {
            ph.toggle_param(p);
        }
        ph
    }

    pub fn fixed(&self) -> u8 {
        self.fixed
    }

    pub fn params(&self) -> &[ParamId] {
        &self.params
    }

    pub fn is_param_free(&self) -> bool {
        self.params.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.fixed == 0 && self.params.is_empty()
    }

    /// 0 or π with no parameters.
    pub fn is_pauli(&self) -> bool {
        self.params.is_empty() && self.fixed.is_multiple_of(4)
    }

    /// ±π/2 with no parameters.
    pub fn is_proper_clifford(&self) -> bool {
        self.params.is_empty() && self.fixed % 4 == 2
    }

    /// Odd multiple of π/4 (parameters only ever add π, so they don't
    /// change this).
    pub fn is_t_like(&self) -> bool {
        self.fixed % 2 == 1
    }

    pub fn add_eighths(&mut self, k: i64) {
        self.fixed = ((self.fixed as i64 + k).rem_euclid(8)) as u8;
    }

    /// Symmetric-difference insert.
    pub fn toggle_param(&mut self, p: ParamId) {
        match self.params.binary_search(&p) {
            Ok(i) => {
                self.params.remove(i);
            }
            Err(i) => self.params.insert(i, p),
        }
    }

    pub fn add(&mut self, other: &Phase) {
        self.add_eighths(other.fixed as i64);
        for &p in &other.params {
            self.toggle_param(p);
        }
    }

    /// `-φ`; a parameter term `aπ` is its own negation.
    pub fn negated(&self) -> Phase {
        Phase {
            fixed: ((8 - self.fixed as i64).rem_euclid(8)) as u8,
            params: self.params.clone(),
        }
    }

    pub fn has_param(&self, p: ParamId) -> bool {
        self.params.binary_search(&p).is_ok()
    }

    /// Substitute `p := bit`, returning whether `p` was present.
    pub fn assign(&mut self, p: ParamId, bit: bool) -> bool {
        match self.params.binary_search(&p) {
            Ok(i) => {
                self.params.remove(i);
                if bit {
                    self.add_eighths(4);
                }
                true
            }
            Err(_) => false,
        }
    }
}

/// A scalar that depends on the parity of a set of parameters:
/// `values[⊕ params]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamFactor {
    pub params: Vec<ParamId>,
    pub values: [ScalarC; 2],
}

impl ParamFactor {
    pub fn new(params: impl IntoIterator<Item = ParamId>, values: [ScalarC; 2]) -> Self {
        let mut ps: Vec<ParamId> = Vec::new();
        for p in params {
            match ps.binary_search(&p) {
                Ok(i) => {
                    ps.remove(i);
                }
                Err(i) => ps.insert(i, p),
            }
        }
        ParamFactor { params: ps, values }
    }

    pub fn assign(&mut self, p: ParamId, bit: bool) -> bool {
        match self.params.binary_search(&p) {
            Ok(i) => {
                self.params.remove(i);
                if bit {
                    self.values.swap(0, 1);
                }
                true
            }
            Err(_) => false,
        }
    }

    /// Value once every parameter is resolved.
    pub fn resolved(&self) -> Option<ScalarC> {
        self.params.is_empty().then_some(self.values[0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_reduces_mod_eight() {
        let mut p = Phase::eighths(7);
        p.add_eighths(3);
        assert_eq!(p.fixed(), 2);
        assert_eq!(Phase::eighths(-1).fixed(), 7);
    }

    #[test]
    fn repeated_parameter_cancels() {
        let mut a = Phase::param(3);
        a.add(&Phase::param(3));
        assert!(a.is_zero());
    }

    #[test]
    fn assigning_one_adds_pi() {
        let mut p = Phase::with_params(1, [5]);
        assert!(p.assign(5, true));
        assert_eq!(p.fixed(), 5);
        assert!(p.is_param_free());
    }

    #[test]
    fn factor_swaps_on_odd_assignment() {
        let mut f = ParamFactor::new([1, 2], [ScalarC::one(), ScalarC::zero()]);
        f.assign(1, true);
        assert!(f.resolved().is_none());
        f.assign(2, false);
        assert!(f.resolved().unwrap().is_zero());
    }
}
