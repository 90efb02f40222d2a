//! Stabiliser decomposition of T-spiders with Clifford simplification
//! between steps.
//!
//! Two T-spiders are split into two Clifford terms (fuse them, or join them
//! through an X(π) spider); a lone T-spider falls back to a two-term split
//! into Z(0) and Z(π/2). Coefficients are solved against the dense tensors
//! of the patterns once and cached.

use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diagram::{EdgeKind, SpiderId, Wire, ZxDiagram};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::rewrite::{fuse_into, Simplifier};
use crate::scalar::ScalarC;
use crate::tensor::{tensor_of, Tensor};

/// Clifford pattern replacing a set of T-spider states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Template {
    /// Two legs joined by Z(π/2).
    FuseHalfPi,
    /// Two legs joined by X(π).
    XPi,
    /// One leg, Z(0).
    ZZero,
    /// One leg, Z(π/2).
    ZHalfPi,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Decomposition {
    pub t_cost: usize,
    pub terms: Vec<(Template, Complex64)>,
    pub alpha_nominal: f64,
    pub residual: f64,
}

/// State tensor (no inputs) of `n` legs hanging off a single spider.
fn state_tensor(build: impl FnOnce(&mut ZxDiagram) -> Vec<SpiderId>) -> Tensor {
    let mut d = ZxDiagram::new();
    let legs = build(&mut d);
    for v in legs {
        d.outputs_mut().push(Wire {
            spider: v,
            kind: EdgeKind::Plain,
        });
    }
    tensor_of(&d).expect("small pattern")
}

fn template_tensor(t: Template) -> Tensor {
    state_tensor(|d| match t {
        Template::FuseHalfPi => {
            let v = d.add_z(2);
            vec![v, v]
        }
        Template::XPi => {
            let v = d.add_x(4);
            vec![v, v]
        }
        Template::ZZero => vec![d.add_z(0)],
        Template::ZHalfPi => vec![d.add_z(2)],
    })
}

/// Least-squares fit `target ≈ Σ c_k basis_k` via the normal equations;
/// returns coefficients and the max-abs residual.
fn fit(target: &Tensor, basis: &[Tensor]) -> Result<(Vec<Complex64>, f64)> {
    let k = basis.len();
    let mut g = vec![vec![Complex64::new(0.0, 0.0); k + 1]; k];
    for i in 0..k {
        for j in 0..k {
            g[i][j] = basis[i]
                .data
                .iter()
                .zip(&basis[j].data)
                .map(|(a, b)| a.conj() * b)
                .sum();
        }
        g[i][k] = basis[i]
            .data
            .iter()
            .zip(&target.data)
            .map(|(a, b)| a.conj() * b)
            .sum();
    }
    // Gaussian elimination with partial pivoting.
    for col in 0..k {
        let piv = (col..k)
            .max_by(|&a, &b| g[a][col].norm().total_cmp(&g[b][col].norm()))
            .unwrap();
        if g[piv][col].norm() < 1e-12 {
            return Err(Error::Singular("template tensors are linearly dependent".into()));
        }
        g.swap(col, piv);
        for r in 0..k {
            if r != col {
                let f = g[r][col] / g[col][col];
                let pivot = g[col].clone();
                for (x, &y) in g[r][col..=k].iter_mut().zip(&pivot[col..=k]) {
                    *x -= f * y;
                }
            }
        }
    }
    let coeffs: Vec<Complex64> = (0..k).map(|i| g[i][k] / g[i][i]).collect();
    let mut residual = 0.0f64;
    for (idx, t) in target.data.iter().enumerate() {
        let fitted: Complex64 = coeffs.iter().zip(basis).map(|(c, b)| c * b.data[idx]).sum();
        residual = residual.max((fitted - t).norm());
    }
    Ok((coeffs, residual))
}

fn solve(t_cost: usize, templates: [Template; 2]) -> Result<Decomposition> {
    let target = state_tensor(|d| (0..t_cost).map(|_| d.add_z(1)).collect());
    let basis: Vec<Tensor> = templates.iter().map(|&t| template_tensor(t)).collect();
    let (coeffs, residual) = fit(&target, &basis)?;
    Ok(Decomposition {
        t_cost,
        terms: templates.into_iter().zip(coeffs).collect(),
        alpha_nominal: (templates.len() as f64).log2() / t_cost as f64,
        residual,
    })
}

/// The two-T, two-term decomposition, solved against the joint tensor of
/// two T-states.
pub fn derive_two_t_coefficients() -> Result<Decomposition> {
    solve(2, [Template::FuseHalfPi, Template::XPi])
}

/// The single-T fallback `|T⟩ = x·Z(0) + y·Z(π/2)`.
pub fn derive_one_t_coefficients() -> Result<Decomposition> {
    solve(1, [Template::ZZero, Template::ZHalfPi])
}

struct Coeffs {
    pair: [ScalarC; 2],
    single: [ScalarC; 2],
}

fn coeffs() -> &'static Coeffs {
    static C: OnceLock<Coeffs> = OnceLock::new();
    C.get_or_init(|| {
        let two = derive_two_t_coefficients().expect("two-T templates are independent");
        let one = derive_one_t_coefficients().expect("one-T templates are independent");
        assert!(two.residual <= 1e-12 && one.residual <= 1e-12);
        Coeffs {
            pair: [two.terms[0].1.into(), two.terms[1].1.into()],
            single: [one.terms[0].1.into(), one.terms[1].1.into()],
        }
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DecompStats {
    /// Fully Clifford terms evaluated.
    pub leaves: u64,
    /// T-count after the initial simplification.
    pub t_count: usize,
}

impl std::ops::AddAssign for DecompStats {
    fn add_assign(&mut self, o: DecompStats) {
        self.leaves += o.leaves;
    }
}

#[derive(Clone, Copy, Debug)]
pub struct DecompOptions {
    pub exec: Exec,
    /// Recursion depth below which the two branches run concurrently.
    pub parallel_depth: usize,
}

impl Default for DecompOptions {
    fn default() -> Self {
        DecompOptions {
            exec: Exec::default(),
            parallel_depth: 10,
        }
    }
}

fn t_spiders(d: &ZxDiagram) -> Vec<SpiderId> {
    d.spider_ids().filter(|&v| d.phase(v).is_t_like()).collect()
}

/// The T pair with the most common neighbours, ties to the smallest ids.
fn choose_pair(d: &ZxDiagram, ts: &[SpiderId]) -> (SpiderId, SpiderId) {
    let mut best = (ts[0], ts[1]);
    let mut best_shared: isize = -1;
    for (i, &a) in ts.iter().enumerate() {
        let na = d.incident(a);
        for &b in &ts[i + 1..] {
            let nb = d.incident(b);
            let (mut x, mut y, mut shared) = (0, 0, 0isize);
            while x < na.len() && y < nb.len() {
                match na[x].0.cmp(&nb[y].0) {
                    std::cmp::Ordering::Less => x += 1,
                    std::cmp::Ordering::Greater => y += 1,
                    std::cmp::Ordering::Equal => {
                        shared += 1;
                        x += 1;
                        y += 1;
                    }
                }
            }
            if shared > best_shared {
                best_shared = shared;
                best = (a, b);
            }
        }
    }
    best
}

/// The two Clifford terms for the T pair `(a, b)`.
pub fn split_pair(d: &ZxDiagram, a: SpiderId, b: SpiderId) -> [ZxDiagram; 2] {
    let c = coeffs();
    let mut fused = d.clone();
    fused.add_eighths(a, -1);
    fused.add_eighths(b, -1);
    fuse_into(&mut fused, a, b);
    fused.add_eighths(a, 2);
    fused.mul_scalar(c.pair[0]);

    // X(π) between the two remainders: push the π through b, then fuse.
    let mut crossed = d.clone();
    let gb = (d.phase(b).fixed() as i64 - 1).rem_euclid(8);
    crossed.add_eighths(a, -1);
    crossed.set_phase(b, crate::phase::Phase::eighths(-gb));
    crossed.mul_scalar(ScalarC::phase(gb as u8));
    for w in crossed.neighbor_vec(b) {
        crossed.add_eighths(w, 4);
    }
    fuse_into(&mut crossed, a, b);
    crossed.mul_scalar(c.pair[1]);
    [fused, crossed]
}

/// The two Clifford terms for a single T-spider.
pub fn split_single(d: &ZxDiagram, v: SpiderId) -> [ZxDiagram; 2] {
    let c = coeffs();
    let mut lo = d.clone();
    lo.add_eighths(v, -1);
    lo.mul_scalar(c.single[0]);
    let mut hi = d.clone();
    hi.add_eighths(v, 1);
    hi.mul_scalar(c.single[1]);
    [lo, hi]
}

fn reduce(mut d: ZxDiagram, opts: &DecompOptions, depth: usize) -> Result<(ScalarC, DecompStats)> {
    Simplifier::new().run(&mut d);
    if d.scalar().is_zero() {
        return Ok((ScalarC::zero(), DecompStats { leaves: 1, t_count: 0 }));
    }
    let ts = t_spiders(&d);
    let [x, y] = match ts.len() {
        0 => {
            if d.num_spiders() > 0 {
                // Clifford simplification empties every Clifford scalar
                // diagram; anything left is a bug, but still evaluable.
                let v = tensor_of(&d)?.data[0];
                return Ok((ScalarC::from_complex(v), DecompStats { leaves: 1, t_count: 0 }));
            }
            return Ok((*d.scalar(), DecompStats { leaves: 1, t_count: 0 }));
        }
        1 => split_single(&d, ts[0]),
        _ => {
            let (a, b) = choose_pair(&d, &ts);
            split_pair(&d, a, b)
        }
    };
    drop(d);
    let run = |t: ZxDiagram| reduce(t, opts, depth + 1);
    let (ra, rb) = if depth < opts.parallel_depth {
        opts.exec.join(|| run(x), || run(y))
    } else {
        (run(x), run(y))
    };
    let (va, sa) = ra?;
    let (vb, sb) = rb?;
    let mut stats = sa;
    stats += sb;
    Ok((va + vb, stats))
}

/// Exact value of a parameter-free scalar diagram.
pub fn decompose_to_scalar(d: &ZxDiagram) -> Result<ScalarC> {
    decompose_with_stats(d, &DecompOptions::default()).map(|r| r.0)
}

pub fn decompose_with_stats(d: &ZxDiagram, opts: &DecompOptions) -> Result<(ScalarC, DecompStats)> {
    if !d.is_scalar() {
        return Err(Error::NotScalar);
    }
    if !d.used_params().is_empty() {
        return Err(Error::Parameterized);
    }
    let mut s = d.clone();
    Simplifier::new().run(&mut s);
    let t = s.t_count();
    let (v, mut stats) = reduce(s, opts, 0)?;
    stats.t_count = t;
    Ok((v, stats))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AlphaEstimate {
    pub mean: f64,
    pub std_dev: f64,
    pub samples: usize,
}

/// Average of `log2(leaves)/t` over the sample, with `t` taken after the
/// initial Clifford simplification.
pub fn measure_alpha(samples: &[ZxDiagram], opts: &DecompOptions) -> Result<AlphaEstimate> {
    if samples.is_empty() {
        return Err(Error::Invalid("empty sample".into()));
    }
    let results = opts
        .exec
        .map_slice(samples, |d| decompose_with_stats(d, &DecompOptions { exec: Exec::Sequential, ..*opts }));
    let mut ratios = Vec::with_capacity(samples.len());
    for r in results {
        let (_, st) = r?;
        if st.t_count == 0 {
            return Err(Error::Invalid("sample diagram has no T-spiders".into()));
        }
        ratios.push((st.leaves as f64).log2() / st.t_count as f64);
    }
    let n = ratios.len() as f64;
    let mean = ratios.iter().sum::<f64>() / n;
    let var = if ratios.len() > 1 {
        ratios.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Ok(AlphaEstimate {
        mean,
        std_dev: var.sqrt(),
        samples: ratios.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{plug, BasisState};
    use crate::generators::{gen_clifford_t, CircuitSpec};
    use crate::oracle::statevector_amplitude;

    #[test]
    fn two_t_solve() {
        let d = derive_two_t_coefficients().unwrap();
        assert!(d.residual <= 1e-12);
        assert_eq!(d.alpha_nominal, 0.5);
        assert!((d.terms[0].1 - 1.0).norm() < 1e-12);
    }

    #[test]
    fn splits_preserve_value() {
        let spec = CircuitSpec { qubits: 3, depth: 30, sigma: f64::INFINITY, seed: 11 };
        let c = gen_clifford_t(&spec).unwrap();
        let mut d = plug(&c.to_diagram(), &BasisState::all_plus(3), &BasisState::all_plus(3)).unwrap();
        Simplifier::new().run(&mut d);
        let want = tensor_of(&d).unwrap().data[0];
        let ts = t_spiders(&d);
        assert!(ts.len() >= 2, "need T-spiders for this test");
        let [x, y] = split_pair(&d, ts[0], ts[1]);
        let got = tensor_of(&x).unwrap().data[0] + tensor_of(&y).unwrap().data[0];
        assert!((got - want).norm() < 1e-9);
        let [x, y] = split_single(&d, ts[0]);
        let got = tensor_of(&x).unwrap().data[0] + tensor_of(&y).unwrap().data[0];
        assert!((got - want).norm() < 1e-9);
    }

    #[test]
    fn matches_statevector() {
        for seed in 0..20 {
            let spec = CircuitSpec { qubits: 6, depth: 40, sigma: f64::INFINITY, seed };
            let c = gen_clifford_t(&spec).unwrap();
            let ins = BasisState::from_bits(seed as usize % 64, 6);
            let outs = BasisState::all_plus(6);
            let d = plug(&c.to_diagram(), &ins, &outs).unwrap();
            let (v, st) = decompose_with_stats(&d, &DecompOptions::default()).unwrap();
            let want = statevector_amplitude(&c, &ins, &outs).unwrap();
            assert!((v.to_complex() - want).norm() < 1e-7, "seed {seed}");
            assert!(st.leaves <= 1u64 << st.t_count.div_ceil(2));
        }
    }
}
