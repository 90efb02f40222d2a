//! Dense evaluation of small diagrams by variable elimination.
//!
//! Every X-spider is read as a Z-spider with a Hadamard on each leg, so
//! after flipping edge kinds the diagram is all-Z. Plain-connected Z
//! spiders fuse into a single boolean variable; Hadamard edges become
//! `(−1)^{xy}/√2` factors. This is slow and deliberately simple: it is the
//! reference every rewrite is checked against.

use std::collections::BTreeSet;

use num_complex::Complex64;

use crate::diagram::{EdgeKind, SpiderKind, ZxDiagram};
use crate::error::{Error, Result};
use crate::scalar::eighth_root;

/// Largest intermediate factor (in variables) the evaluator will build.
pub const MAX_FACTOR_VARS: usize = 26;

/// Linear map with `n_in` input and `n_out` output qubits. Entry
/// `(out, in)` lives at `(out << n_in) | in`; bit `i` of `in` is input `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    pub n_in: usize,
    pub n_out: usize,
    pub data: Vec<Complex64>,
}

impl Tensor {
    pub fn get(&self, out_bits: usize, in_bits: usize) -> Complex64 {
        self.data[(out_bits << self.n_in) | in_bits]
    }

    pub fn as_scalar(&self) -> Option<Complex64> {
        (self.n_in == 0 && self.n_out == 0).then(|| self.data[0])
    }

    pub fn max_abs_diff(&self, other: &Tensor) -> f64 {
        assert_eq!(self.data.len(), other.data.len(), "shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `|a − b| ≤ tol · max(1, max|a|)` entrywise.
    pub fn approx_eq(&self, other: &Tensor, tol: f64) -> bool {
        self.n_in == other.n_in
            && self.n_out == other.n_out
            && self.max_abs_diff(other) <= tol * 1f64.max(self.max_abs())
    }

    pub fn add(&self, other: &Tensor) -> Tensor {
        assert_eq!((self.n_in, self.n_out), (other.n_in, other.n_out));
        Tensor {
            n_in: self.n_in,
            n_out: self.n_out,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }
}

/// Table over a sorted variable list; bit `i` of the index is `vars[i]`.
#[derive(Clone, Debug)]
struct Factor {
    vars: Vec<usize>,
    table: Vec<Complex64>,
}

impl Factor {
    fn constant(c: Complex64) -> Self {
        Factor {
            vars: Vec::new(),
            table: vec![c],
        }
    }

    fn unary(v: usize, t: [Complex64; 2]) -> Self {
        Factor {
            vars: vec![v],
            table: t.to_vec(),
        }
    }

    fn binary(a: usize, b: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let mut table = vec![Complex64::new(0.0, 0.0); 4];
        for (idx, slot) in table.iter_mut().enumerate() {
            let (xl, xh) = (idx & 1, idx >> 1);
            *slot = if a < b { f(xl, xh) } else { f(xh, xl) };
        }
        Factor {
            vars: vec![lo, hi],
            table,
        }
    }

    fn position_map(&self, vars: &[usize]) -> Vec<usize> {
        self.vars
            .iter()
            .map(|v| vars.binary_search(v).expect("subset"))
            .collect()
    }

    fn local(idx: usize, pos: &[usize]) -> usize {
        pos.iter()
            .enumerate()
            .fold(0, |acc, (i, &p)| acc | (((idx >> p) & 1) << i))
    }
}

/// Multiplies `factors` together and sums out `elim` (if any).
fn combine(factors: &[Factor], elim: Option<usize>) -> Result<Factor> {
    let mut all: BTreeSet<usize> = BTreeSet::new();
    for f in factors {
        all.extend(f.vars.iter().copied());
    }
    let vars: Vec<usize> = all.into_iter().collect();
    if vars.len() > MAX_FACTOR_VARS {
        return Err(Error::SizeCap(format!(
            "intermediate factor over {} variables",
            vars.len()
        )));
    }
    let positions: Vec<Vec<usize>> = factors.iter().map(|f| f.position_map(&vars)).collect();
    let mut joint = vec![Complex64::new(1.0, 0.0); 1 << vars.len()];
    for (idx, slot) in joint.iter_mut().enumerate() {
        for (f, pos) in factors.iter().zip(&positions) {
            *slot *= f.table[Factor::local(idx, pos)];
        }
    }
    let Some(e) = elim else {
        return Ok(Factor { vars, table: joint });
    };
    let ep = vars.binary_search(&e).expect("eliminated var present");
    let rest: Vec<usize> = vars.iter().copied().filter(|&v| v != e).collect();
    let mut table = vec![Complex64::new(0.0, 0.0); 1 << rest.len()];
    for (idx, val) in joint.iter().enumerate() {
        let lo = idx & ((1 << ep) - 1);
        let hi = idx >> (ep + 1);
        table[lo | (hi << ep)] += val;
    }
    Ok(Factor { vars: rest, table })
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut c = x;
        while self.0[c] != r {
            let n = self.0[c];
            self.0[c] = r;
            c = n;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

fn effective(kind: EdgeKind, flips: usize) -> EdgeKind {
    if flips % 2 == 1 {
        kind.toggled()
    } else {
        kind
    }
}

/// Contracts the diagram to a dense tensor, including its scalar.
pub fn tensor_of(d: &ZxDiagram) -> Result<Tensor> {
    if !d.used_params().is_empty() {
        return Err(Error::Parameterized);
    }
    let n_in = d.inputs().len();
    let n_out = d.outputs().len();
    if n_in + n_out > MAX_FACTOR_VARS - 2 {
        return Err(Error::SizeCap(format!("{} boundary wires", n_in + n_out)));
    }
    let is_x = |v: usize| (d.kind(v) == SpiderKind::X) as usize;

    let bound = d.id_bound();
    let mut uf = UnionFind((0..bound).collect());
    for (u, v, k) in d.edges() {
        if effective(k, is_x(u) + is_x(v)) == EdgeKind::Plain {
            uf.union(u, v);
        }
    }

    // Variables 0..n_in+n_out are the open indices; class variables follow.
    let n_open = n_in + n_out;
    let mut class_var = vec![usize::MAX; bound];
    let mut next = n_open;
    let mut phase_sum = vec![0i64; bound];
    for v in d.spider_ids() {
        let r = uf.find(v);
        if class_var[r] == usize::MAX {
            class_var[r] = next;
            next += 1;
        }
        phase_sum[r] += d.phase(v).fixed() as i64;
    }

    let one = Complex64::new(1.0, 0.0);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let sign = |x: usize, y: usize| if x & y == 1 { -h } else { h };
    let mut factors = Vec::new();
    factors.push(Factor::constant(d.scalar().to_complex()));
    for v in d.spider_ids() {
        if uf.find(v) == v {
            let ph = eighth_root(phase_sum[v].rem_euclid(8) as u8);
            factors.push(Factor::unary(class_var[v], [one, ph]));
        }
    }
    for (u, v, k) in d.edges() {
        if effective(k, is_x(u) + is_x(v)) == EdgeKind::Plain {
            continue;
        }
        let (a, b) = (class_var[uf.find(u)], class_var[uf.find(v)]);
        if a == b {
            factors.push(Factor::unary(a, [Complex64::new(h, 0.0), Complex64::new(-h, 0.0)]));
        } else {
            factors.push(Factor::binary(a, b, |x, y| Complex64::new(sign(x, y), 0.0)));
        }
    }
    for (i, w) in d.inputs().iter().chain(d.outputs().iter()).enumerate() {
        let c = class_var[uf.find(w.spider)];
        if effective(w.kind, is_x(w.spider)) == EdgeKind::Plain {
            factors.push(Factor::binary(i, c, |x, y| {
                Complex64::new((x == y) as u8 as f64, 0.0)
            }));
        } else {
            factors.push(Factor::binary(i, c, |x, y| Complex64::new(sign(x, y), 0.0)));
        }
    }

    // Greedy elimination of interior variables, cheapest resulting factor
    // first.
    let mut remaining: BTreeSet<usize> = (n_open..next).collect();
    while !remaining.is_empty() {
        let mut best: Option<(usize, usize)> = None;
        for &v in &remaining {
            let mut s: BTreeSet<usize> = BTreeSet::new();
            for f in factors.iter().filter(|f| f.vars.contains(&v)) {
                s.extend(f.vars.iter().copied());
            }
            let size = s.len();
            if best.is_none_or(|(_, b)| size < b) {
                best = Some((v, size));
            }
        }
        let (v, _) = best.expect("nonempty");
        remaining.remove(&v);
        let (with, without): (Vec<Factor>, Vec<Factor>) =
            factors.into_iter().partition(|f| f.vars.contains(&v));
        factors = without;
        factors.push(combine(&with, Some(v))?);
    }
    let mut result = combine(&factors, None)?;
    // Open variables that never appeared (impossible with wires, but keep
    // the table shape honest).
    if result.vars.len() != n_open {
        let missing: Vec<usize> = (0..n_open).filter(|v| !result.vars.contains(v)).collect();
        let mut fs = vec![result];
        for m in missing {
            fs.push(Factor::unary(m, [one, one]));
        }
        result = combine(&fs, None)?;
    }
    // vars are 0..n_open ascending: inputs occupy the low bits, outputs the
    // high bits, which is exactly the Tensor layout.
    Ok(Tensor {
        n_in,
        n_out,
        data: result.table,
    })
}

/// Value of a scalar diagram.
pub fn scalar_of(d: &ZxDiagram) -> Result<Complex64> {
    if !d.is_scalar() {
        return Err(Error::NotScalar);
    }
    Ok(tensor_of(d)?.data[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::Wire;
    use crate::phase::Phase;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn wire_through_z_is_identity() {
        let mut d = ZxDiagram::new();
        let v = d.add_z(0);
        d.inputs_mut().push(Wire { spider: v, kind: EdgeKind::Plain });
        d.outputs_mut().push(Wire { spider: v, kind: EdgeKind::Plain });
        let t = tensor_of(&d).unwrap();
        assert_eq!(t.data, vec![c(1., 0.), c(0., 0.), c(0., 0.), c(1., 0.)]);
    }

    #[test]
    fn legless_spider_is_one_plus_phase() {
        for k in 0..8 {
            let mut d = ZxDiagram::new();
            d.add_z(k);
            let want = c(1.0, 0.0) + eighth_root(k as u8);
            assert!((scalar_of(&d).unwrap() - want).norm() < 1e-15);
            let mut d = ZxDiagram::new();
            d.add_x(k);
            assert!((scalar_of(&d).unwrap() - want).norm() < 1e-15);
        }
    }

    #[test]
    fn hadamard_wire_is_hadamard_matrix() {
        let mut d = ZxDiagram::new();
        let v = d.add_z(0);
        d.inputs_mut().push(Wire { spider: v, kind: EdgeKind::Hadamard });
        d.outputs_mut().push(Wire { spider: v, kind: EdgeKind::Plain });
        let t = tensor_of(&d).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(t.max_abs_diff(&Tensor { n_in: 1, n_out: 1, data: vec![c(h, 0.), c(h, 0.), c(h, 0.), c(-h, 0.)] }) < 1e-15);
    }

    #[test]
    fn x_spider_pi_is_not_gate() {
        let mut d = ZxDiagram::new();
        let v = d.add_x(4);
        d.inputs_mut().push(Wire { spider: v, kind: EdgeKind::Plain });
        d.outputs_mut().push(Wire { spider: v, kind: EdgeKind::Plain });
        let t = tensor_of(&d).unwrap();
        assert!(t.max_abs_diff(&Tensor { n_in: 1, n_out: 1, data: vec![c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)] }) < 1e-14);
    }

    #[test]
    fn parameters_are_rejected() {
        let mut d = ZxDiagram::new();
        d.add_spider(SpiderKind::Z, Phase::param(0));
        assert!(matches!(tensor_of(&d), Err(Error::Parameterized)));
    }
}
