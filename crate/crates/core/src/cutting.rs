//! Vertex and edge cuts as boolean parameters.
//!
//! A Z(α) spider with n legs equals `Σ_a e^{iαa} s^n ⊗ X(aπ)`: one X(aπ)
//! state per leg, where `s` is the per-leg normalization. Each X(aπ) piece
//! is stored as a Z-spider with phase `aπ` behind a toggled edge, and
//! `s^n·e^{iαa}` becomes a parameter factor on `a`.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::diagram::{EdgeKind, SpiderId, SpiderKind, Wire, ZxDiagram};
use crate::error::{Error, Result};
use crate::phase::{ParamFactor, ParamId, Phase};
use crate::rewrite::color_change;
use crate::scalar::ScalarC;
use crate::tensor::tensor_of;

/// Per-leg factor `s` with `Z(0) = s·X(0) + s·X(π)` for one-legged
/// spiders, solved once from the dense tensors.
pub fn cut_leg_coefficient() -> ScalarC {
    static S: OnceLock<ScalarC> = OnceLock::new();
    *S.get_or_init(|| {
        let one_leg = |kind: SpiderKind, k: i64| {
            let mut d = ZxDiagram::new();
            let v = d.add_spider(kind, Phase::eighths(k));
            d.outputs_mut().push(Wire {
                spider: v,
                kind: EdgeKind::Plain,
            });
            tensor_of(&d).expect("one spider")
        };
        let z = one_leg(SpiderKind::Z, 0);
        let x0 = one_leg(SpiderKind::X, 0);
        let x1 = one_leg(SpiderKind::X, 4);
        // z = s0·x0 + s1·x1 is diagonal in the computational basis:
        // x0 ∝ |0⟩, x1 ∝ |1⟩.
        let s0 = z.data[0] / x0.data[0];
        let s1 = z.data[1] / x1.data[1];
        assert!((s0 - s1).norm() < 1e-12, "cut coefficients must agree");
        let fit = x0.add(&x1).data.iter().map(|c| c * s0).collect::<Vec<Complex64>>();
        assert!(fit.iter().zip(&z.data).all(|(a, b)| (a - b).norm() < 1e-12));
        ScalarC::from_complex(s0)
    })
}

/// Replaces `v` by one parameterized piece per leg, so that summing the
/// two instantiations of `p` gives back the original diagram.
pub fn cut_spider(d: &ZxDiagram, v: SpiderId, p: ParamId) -> Result<ZxDiagram> {
    let mut r = d.clone();
    cut_spider_in_place(&mut r, v, p)?;
    Ok(r)
}

pub fn cut_spider_in_place(d: &mut ZxDiagram, v: SpiderId, p: ParamId) -> Result<Vec<SpiderId>> {
    if !d.contains(v) {
        return Err(Error::MissingSpider(v));
    }
    if d.params().contains(&p) {
        return Err(Error::ParamCollision(p));
    }
    if !d.phase(v).is_param_free() {
        return Err(Error::Invalid(format!("spider {v} already carries parameters")));
    }
    if d.kind(v) == SpiderKind::X {
        color_change(d, v);
    }
    let loops = d.edge_mult(v, v);
    if loops.total() > 0 {
        d.remove_all_edges(v, v);
        d.add_eighths(v, 4 * loops.hadamard as i64);
        d.scalar_mut().mul_sqrt2_pow(-(loops.hadamard as i32));
    }
    let alpha = d.phase(v).fixed();
    let legs: Vec<(SpiderId, EdgeKind)> = d
        .incident(v)
        .iter()
        .flat_map(|&(w, m)| {
            std::iter::repeat_n((w, EdgeKind::Plain), m.plain as usize)
                .chain(std::iter::repeat_n((w, EdgeKind::Hadamard), m.hadamard as usize))
        })
        .collect();
    let mut pieces = Vec::with_capacity(legs.len());
    for (w, kind) in legs {
        let piece = d.add_spider(SpiderKind::Z, Phase::param(p));
        d.add_edge(piece, w, kind.toggled());
        pieces.push(piece);
    }
    // Boundary wires on v get a piece each as well.
    let n_wires = d.boundary_legs(v);
    let mut wire_pieces = Vec::new();
    for _ in 0..n_wires {
        wire_pieces.push(d.add_spider(SpiderKind::Z, Phase::param(p)));
    }
    let mut it = wire_pieces.iter();
    let mut wires: Vec<Wire> = d.inputs().iter().chain(d.outputs()).copied().collect();
    for w in wires.iter_mut() {
        if w.spider == v {
            w.spider = *it.next().expect("one piece per wire");
            w.kind = w.kind.toggled();
        }
    }
    let n_in = d.inputs().len();
    *d.outputs_mut() = wires.split_off(n_in);
    *d.inputs_mut() = wires;
    pieces.extend(wire_pieces);
    let n = pieces.len() as i32;
    d.remove_spider(v);
    let s = cut_leg_coefficient();
    let mut sn = ScalarC::one();
    for _ in 0..n {
        sn *= s;
    }
    d.declare_param(p);
    d.add_factor(ParamFactor::new([p], [sn, sn * ScalarC::phase(alpha)]));
    Ok(pieces)
}

/// Puts a phase-0 spider on one `u`–`w` edge of the given kind and cuts
/// it. Returns the new diagram and the inserted spider's id.
pub fn cut_edge(
    d: &ZxDiagram,
    u: SpiderId,
    w: SpiderId,
    kind: EdgeKind,
    p: ParamId,
) -> Result<(ZxDiagram, SpiderId)> {
    if !d.contains(u) {
        return Err(Error::MissingSpider(u));
    }
    if !d.contains(w) {
        return Err(Error::MissingSpider(w));
    }
    let m = d.edge_mult(u, w);
    if m.count(kind) == 0 {
        return Err(Error::Invalid(format!("no {kind:?} edge between {u} and {w}")));
    }
    let mut r = d.clone();
    let mut nm = m;
    match kind {
        EdgeKind::Plain => nm.plain -= 1,
        EdgeKind::Hadamard => nm.hadamard -= 1,
    }
    r.set_edge_mult(u, w, nm);
    let z = r.add_z(0);
    r.add_edge(u, z, kind);
    r.add_edge(z, w, EdgeKind::Plain);
    cut_spider_in_place(&mut r, z, p)?;
    Ok((r, z))
}

/// Substitutes bits for some parameters; unknown ids are an error.
pub fn instantiate(d: &ZxDiagram, assignment: &BTreeMap<ParamId, bool>) -> Result<ZxDiagram> {
    if let Some(p) = assignment.keys().find(|p| !d.params().contains(p)) {
        return Err(Error::UnknownParam(*p));
    }
    let mut r = d.clone();
    instantiate_in_place(&mut r, assignment);
    Ok(r)
}

/// Like [`instantiate`], silently skipping parameters the diagram no
/// longer has.
pub fn instantiate_in_place(d: &mut ZxDiagram, assignment: &BTreeMap<ParamId, bool>) {
    if assignment.is_empty() {
        return;
    }
    let ids: Vec<SpiderId> = d
        .spider_ids()
        .filter(|&v| !d.phase(v).is_param_free())
        .collect();
    for v in ids {
        let ph = d.phase_mut(v);
        for (&p, &bit) in assignment {
            ph.assign(p, bit);
        }
    }
    let mut resolved = ScalarC::one();
    let mut keep = Vec::new();
    for mut f in std::mem::take(d.factors_mut()) {
        for (&p, &bit) in assignment {
            f.assign(p, bit);
        }
        match f.resolved() {
            Some(v) => resolved *= v,
            None => keep.push(f),
        }
    }
    *d.factors_mut() = keep;
    d.mul_scalar(resolved);
    for p in assignment.keys() {
        d.params_mut().remove(p);
    }
}

/// `2^{n}` terms for `n` cuts (saturating).
pub fn cut_cost(n: usize) -> u128 {
    1u128.checked_shl(n as u32).unwrap_or(u128::MAX)
}

/// Assignment of the bits of `idx` to `params`, first parameter most
/// significant (the segment table order).
pub fn assignment_for(params: &[ParamId], idx: usize) -> BTreeMap<ParamId, bool> {
    let n = params.len();
    params
        .iter()
        .enumerate()
        .map(|(k, &p)| (p, (idx >> (n - 1 - k)) & 1 == 1))
        .collect()
}
