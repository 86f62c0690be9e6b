use serde::Serialize;
use serde_json::{json, Value};

use super::code::CodeBook;
use super::graph::{find_mcis, PartiteGraph};
use crate::error::{Error, Result};
use crate::instance::{Facilities, Group, Instance};
use crate::metric::{MetricSpace, Site};
use crate::oracle::exact_solve;

/// Which points may serve as centers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GadgetFacilities {
    /// Centers are vertex points only.
    VertexPoints,
    /// Every point, vertex or edge, may be a center.
    AllPoints,
}

#[derive(Clone, Debug)]
pub struct Gadget {
    pub instance: Instance,
    pub num_vertex_points: usize,
    /// Edge of each edge point, in point order after the vertex points.
    pub edge_points: Vec<(usize, usize)>,
    pub q: u32,
    pub facilities: GadgetFacilities,
}

impl Gadget {
    /// Sidecar document: graph, code and the two thresholds.
    pub fn sidecar(&self, graph: &PartiteGraph, code: &CodeBook) -> Result<Value> {
        let (yes, no) = thresholds(code);
        Ok(json!({
            "graph": serde_json::to_value(graph)?,
            "code": serde_json::to_value(code)?,
            "bounds": {"yes": yes, "no": no},
            "q": self.q,
            "facilities": serde_json::to_value(self.facilities)?,
        }))
    }
}

/// `((1 + 2η) t, (3/2 − 3η) t)`.
fn thresholds(code: &CodeBook) -> (f64, f64) {
    let t = code.t as f64;
    ((1.0 + 2.0 * code.eta) * t, (1.5 - 3.0 * code.eta) * t)
}

/// Points in `{0,1}^{k t}` under `ℓ_q`: vertex `v ∈ V_i` has block `i` equal
/// to its code word, an edge `(u, v)` has the complements of both words in
/// their blocks. One singleton group per point, `z = 1`.
pub fn mcis_to_kcenter(
    g: &PartiteGraph,
    code: &CodeBook,
    q: u32,
    facilities: GadgetFacilities,
) -> Result<Gadget> {
    if q == 0 {
        return Err(Error::InvalidParameter(
            "q must be a positive integer".into(),
        ));
    }
    let n = g.num_vertices();
    if n > code.len() {
        return Err(Error::Code(format!(
            "{n} vertices but only {} code words",
            code.len()
        )));
    }
    let k = g.k();
    let t = code.t;
    let part: Vec<usize> = (0..n).map(|v| g.part_of(v)).collect();
    for &(a, b) in &g.edges {
        if a >= n || b >= n || part[a] == part[b] {
            return Err(Error::Graph(format!(
                "edge ({a}, {b}) is not between two parts"
            )));
        }
    }
    let block = |x: &mut [f64], v: usize, complement: bool| {
        let i = part[v];
        for (slot, &bit) in x[i * t..(i + 1) * t].iter_mut().zip(&code.words[v]) {
            *slot = if bit != complement { 1.0 } else { 0.0 };
        }
    };
    let mut points = Vec::with_capacity(n + g.edges.len());
    for v in 0..n {
        let mut x = vec![0.0; k * t];
        block(&mut x, v, false);
        points.push(Site::Coords(x));
    }
    for &(a, b) in &g.edges {
        let mut x = vec![0.0; k * t];
        block(&mut x, a, true);
        block(&mut x, b, true);
        points.push(Site::Coords(x));
    }
    let groups = (0..points.len()).map(Group::indicator).collect();
    let f = match facilities {
        GadgetFacilities::VertexPoints => Facilities::Sites(points[..n].to_vec()),
        GadgetFacilities::AllPoints => Facilities::SameAsPoints,
    };
    let instance = Instance::new(MetricSpace::lq(q as f64)?, points, f, k, 1, groups)?;
    Ok(Gadget {
        instance,
        num_vertex_points: n,
        edge_points: g.edges.clone(),
        q,
        facilities,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapReport {
    pub has_mcis: bool,
    pub witness: Option<Vec<usize>>,
    pub kcenter_opt: f64,
    /// `kcenter_opt^q`, comparable with the thresholds.
    pub opt_pow_q: f64,
    pub centers: Vec<usize>,
    pub yes_bound: f64,
    pub no_bound: f64,
    pub gap_respected: bool,
}

/// Exhaustive check that an independent transversal forces
/// `OPT^q ≤ (1 + 2η) t` and its absence forces `OPT^q ≥ (3/2 − 3η) t`.
pub fn verify_gap(
    gadget: &Gadget,
    g: &PartiteGraph,
    code: &CodeBook,
    budget: u128,
) -> Result<GapReport> {
    if g.k() < 3 {
        return Err(Error::Graph(format!(
            "the gap needs k >= 3 parts, got {}",
            g.k()
        )));
    }
    let witness = find_mcis(g);
    let opt = exact_solve(&gadget.instance, budget)?;
    let opt_pow_q = opt.cost.powi(gadget.q as i32);
    let (yes_bound, no_bound) = thresholds(code);
    let tol = 1e-9 * yes_bound.max(1.0);
    let gap_respected = match witness {
        Some(_) => opt_pow_q <= yes_bound + tol,
        None => opt_pow_q >= no_bound - tol,
    };
    Ok(GapReport {
        has_mcis: witness.is_some(),
        witness,
        kcenter_opt: opt.cost,
        opt_pow_q,
        centers: opt.centers,
        yes_bound,
        no_bound,
        gap_respected,
    })
}
