//! Client coreset for the weight-vector formulation.
//!
//! Given an (α, β)-bicriteria set `B = {b_i}`, let `τ = max_w ‖w‖₁` and
//! `R = (cost(B) / (α τ))^{1/z}`. Each client belongs to the ring
//! `Q_i^j = ball(b_i, 2^j R) \ ball(b_i, 2^{j-1} R)` with the smallest `j`
//! over all centers (ties to the smallest `i`). Every ring is carved into
//! sub-balls of radius `ε / (α · 3^{z+2}) · 2^j R` by a greedy net over its
//! own clients; each nonempty sub-ball keeps its lowest-index client as the
//! representative, which inherits the summed weight of the sub-ball in every
//! group.
//!
//! The sub-ball radius uses the `3^{z+2}` denominator rather than the looser
//! `40` that also appears in the literature for this construction.
//!
//! For every `k`-subset `X` and group `w` the result satisfies
//! `(1-ε) c(w,X) ≤ c(η(w),X) ≤ (1+ε) max_{w'} c(w',X)`.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};

use crate::bicriteria::BicriteriaSolution;
use crate::error::{Error, Result};
use crate::instance::{Facilities, Group, Instance};
use crate::io::instance_to_value;
use crate::metric::greedy_net;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoresetParams {
    pub eps: f64,
    pub alpha: f64,
    /// Base ring radius `R`.
    pub radius: f64,
    pub tau: f64,
    /// Weight aspect ratio `Δ`.
    pub delta: f64,
    /// Highest ring index in use.
    pub rings: u32,
    /// Ring count before any automatic extension, `⌈2 log₂(αΔ)⌉`.
    pub rings_nominal: u32,
    /// Sub-ball radius of ring `j` is `subball_factor · 2^j · R`.
    pub subball_factor: f64,
    /// `cost(B) = 0`: every distinct location is its own representative.
    pub degenerate: bool,
}

/// Ring cell of a client: bicriteria center position `i`, ring `j`, and the
/// client at the center of its sub-ball.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RingCell {
    pub center: usize,
    pub ring: u32,
    pub cell: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Coreset {
    /// Retained clients, ascending original indices.
    pub points: Vec<usize>,
    /// Representative (original index) of every original client.
    pub rep: Vec<usize>,
    /// `η(w)` for each input group, keyed by original client index.
    pub groups: Vec<Group>,
    pub assignment: Vec<RingCell>,
    /// Facility indices of the bicriteria set.
    pub bicriteria: Vec<usize>,
    pub params: CoresetParams,
}

pub fn build_coreset(inst: &Instance, bic: &BicriteriaSolution, eps: f64) -> Result<Coreset> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "eps must lie in (0, 1), got {eps}"
        )));
    }
    let alpha = bic.alpha;
    if !(alpha.is_finite() && alpha >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "bicriteria alpha must be finite and >= 1, got {alpha}"
        )));
    }
    let centers = bic.centers.clone();
    let (cost_b, _) = inst.solution_cost(&centers)?;
    let z = inst.z();
    let n = inst.num_points();
    let tau = inst.groups().iter().map(Group::l1).fold(0.0, f64::max);
    let delta = inst.weight_aspect();
    let rings_nominal = (2.0 * (alpha * delta).log2()).ceil().max(0.0) as u32;
    let subball_factor = eps / (alpha * 3f64.powi(z as i32 + 2));

    let nearest_center = |p: usize| -> (usize, f64) { nearest_of(inst, &bic.centers, p) };
    if cost_b == 0.0 {
        return Ok(degenerate_coreset(
            inst,
            centers,
            eps,
            alpha,
            tau,
            delta,
            rings_nominal,
            subball_factor,
            nearest_center,
        ));
    }

    let radius = (cost_b / (alpha * tau)).powf(1.0 / z as f64);

    // Ring of every client: smallest j with δ(p, B) ≤ 2^j R, then the
    // smallest center index reaching it.
    let mut placement = Vec::with_capacity(n);
    let mut rings = rings_nominal;
    let mut outside_positive = 0usize;
    let positive: Vec<bool> = {
        let mut v = vec![false; n];
        for g in inst.groups() {
            for &(p, w) in g.entries() {
                v[p] |= w > 0.0;
            }
        }
        v
    };
    for (p, &is_positive) in positive.iter().enumerate() {
        let (_, d) = nearest_center(p);
        let mut j = 0u32;
        while d > ring_radius(radius, j) {
            j += 1;
        }
        let reach = ring_radius(radius, j);
        let i = centers
            .iter()
            .position(|&b| inst.dist(p, b) <= reach)
            .expect("nearest center lies within its own ring");
        if j > rings_nominal && is_positive {
            outside_positive += 1;
        }
        rings = rings.max(j);
        placement.push((i, j));
    }
    if outside_positive > 0 {
        log::warn!(
            "{outside_positive} weighted points lie beyond ring {rings_nominal}; extended to {rings} rings"
        );
    }

    let mut by_ring: BTreeMap<(usize, u32), Vec<usize>> = BTreeMap::new();
    for (p, &key) in placement.iter().enumerate() {
        by_ring.entry(key).or_default().push(p);
    }

    let mut rep = vec![usize::MAX; n];
    let mut assignment = vec![
        RingCell {
            center: 0,
            ring: 0,
            cell: 0
        };
        n
    ];
    for (&(i, j), members) in &by_ring {
        let rho = subball_factor * ring_radius(radius, j);
        let net = greedy_net(members, rho, |a, b| inst.point_dist(a, b));
        let mut cells: BTreeMap<usize, usize> = BTreeMap::new();
        for &p in members {
            // Nearest sub-ball center; density guarantees it is within rho.
            let mut best = (net[0], inst.point_dist(p, net[0]));
            for &c in &net[1..] {
                let d = inst.point_dist(p, c);
                if d < best.1 {
                    best = (c, d);
                }
            }
            let cell = best.0;
            // Members arrive in ascending order, so the first one seen is the
            // lowest-index client of the sub-ball.
            let r = *cells.entry(cell).or_insert(p);
            rep[p] = r;
            assignment[p] = RingCell {
                center: i,
                ring: j,
                cell,
            };
        }
    }

    Ok(finish(
        inst,
        rep,
        assignment,
        centers,
        CoresetParams {
            eps,
            alpha,
            radius,
            tau,
            delta,
            rings,
            rings_nominal,
            subball_factor,
            degenerate: false,
        },
    ))
}

fn nearest_of(inst: &Instance, centers: &[usize], p: usize) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (i, &b) in centers.iter().enumerate() {
        let d = inst.dist(p, b);
        if d < best.1 {
            best = (i, d);
        }
    }
    best
}

fn ring_radius(radius: f64, j: u32) -> f64 {
    radius * 2f64.powi(j as i32)
}

#[allow(clippy::too_many_arguments)]
fn degenerate_coreset(
    inst: &Instance,
    centers: Vec<usize>,
    eps: f64,
    alpha: f64,
    tau: f64,
    delta: f64,
    rings_nominal: u32,
    subball_factor: f64,
    nearest_center: impl Fn(usize) -> (usize, f64),
) -> Coreset {
    let n = inst.num_points();
    let mut reps: Vec<usize> = Vec::new();
    let mut rep = Vec::with_capacity(n);
    let mut assignment = Vec::with_capacity(n);
    for p in 0..n {
        let r = match reps.iter().find(|&&q| inst.point_dist(p, q) == 0.0) {
            Some(&q) => q,
            None => {
                reps.push(p);
                p
            }
        };
        rep.push(r);
        assignment.push(RingCell {
            center: nearest_center(p).0,
            ring: 0,
            cell: r,
        });
    }
    finish(
        inst,
        rep,
        assignment,
        centers,
        CoresetParams {
            eps,
            alpha,
            radius: 0.0,
            tau,
            delta,
            rings: 0,
            rings_nominal,
            subball_factor,
            degenerate: true,
        },
    )
}

fn finish(
    inst: &Instance,
    rep: Vec<usize>,
    assignment: Vec<RingCell>,
    bicriteria: Vec<usize>,
    params: CoresetParams,
) -> Coreset {
    let mut points: Vec<usize> = rep.clone();
    points.sort_unstable();
    points.dedup();
    let groups = inst
        .groups()
        .iter()
        .map(|g| {
            let mut eta: BTreeMap<usize, f64> = BTreeMap::new();
            for &(p, w) in g.entries() {
                *eta.entry(rep[p]).or_insert(0.0) += w;
            }
            eta.retain(|_, w| *w != 0.0);
            Group::from_map(eta)
        })
        .collect();
    Coreset {
        points,
        rep,
        groups,
        assignment,
        bicriteria,
        params,
    }
}

impl Coreset {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Position of an original client's representative within `points`.
    pub fn rep_position(&self, p: usize) -> usize {
        self.points
            .binary_search(&self.rep[p])
            .expect("representatives are retained points")
    }

    /// Number of distinct nonempty `(i, j, sub-ball)` cells.
    pub fn cell_count(&self) -> usize {
        let mut cells: Vec<_> = self
            .assignment
            .iter()
            .map(|c| (c.center, c.ring, c.cell))
            .collect();
        cells.sort_unstable();
        cells.dedup();
        cells.len()
    }

    /// JSON document: the reduced instance plus `rep`, `source_points` and
    /// `params`.
    pub fn to_value(&self, original: &Instance) -> Result<Value> {
        let reduced = coreset_instance(self, original)?;
        let mut v = instance_to_value(&reduced);
        let rep: Vec<usize> = (0..self.rep.len()).map(|p| self.rep_position(p)).collect();
        let obj = v.as_object_mut().expect("instance encodes as an object");
        obj.insert("rep".into(), json!(rep));
        obj.insert("source_points".into(), json!(self.points));
        obj.insert("bicriteria".into(), json!(self.bicriteria));
        obj.insert("params".into(), serde_json::to_value(&self.params)?);
        Ok(v)
    }
}

/// Instance over the retained clients with groups `η(w)`, the same
/// facilities, `k`, `z` and metric.
pub fn coreset_instance(coreset: &Coreset, original: &Instance) -> Result<Instance> {
    let points = coreset
        .points
        .iter()
        .map(|&p| original.points()[p].clone())
        .collect();
    let groups = coreset
        .groups
        .iter()
        .map(|g| {
            Group::from_map(
                g.entries()
                    .iter()
                    .map(|&(p, w)| (coreset.rep_position(p), w))
                    .collect(),
            )
        })
        .collect();
    Instance::new(
        original.metric().clone(),
        points,
        Facilities::Sites(original.facilities().to_vec()),
        original.k(),
        original.z(),
        groups,
    )
}

/// Per-group displacement error `Σ_p w[p] |δ(p,X)^z − δ(r(p),X)^z|`, split
/// over `P_R` (both `δ(p,B)` and `δ(p,X)` at most `R`), `P_B`
/// (`δ(p,B) > R`, `δ(p,X) ≤ δ(p,B)`) and `P_X` (the rest, where
/// `δ(p,X) > R` and `δ(p,B) ≤ δ(p,X)`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GroupError {
    pub total: f64,
    pub near: f64,
    pub bicriteria_side: f64,
    pub solution_side: f64,
}

pub fn coreset_error_report(
    inst: &Instance,
    coreset: &Coreset,
    x: &[usize],
) -> Result<Vec<GroupError>> {
    if x.is_empty() {
        return Err(Error::Empty("center set"));
    }
    let r = coreset.params.radius;
    let pc = inst.point_costs(x);
    let dist_x: Vec<f64> = (0..inst.num_points())
        .map(|p| inst.dist_to_set(p, x))
        .collect();
    let dist_b: Vec<f64> = (0..inst.num_points())
        .map(|p| inst.dist_to_set(p, &coreset.bicriteria))
        .collect();
    Ok(inst
        .groups()
        .iter()
        .map(|g| {
            let mut e = GroupError {
                total: 0.0,
                near: 0.0,
                bicriteria_side: 0.0,
                solution_side: 0.0,
            };
            for &(p, w) in g.entries() {
                let term = w * (pc[p] - pc[coreset.rep[p]]).abs();
                let (db, dx) = (dist_b[p], dist_x[p]);
                if db <= r && dx <= r {
                    e.near += term;
                } else if db > r && dx <= db {
                    e.bicriteria_side += term;
                } else {
                    e.solution_side += term;
                }
                e.total += term;
            }
            e
        })
        .collect())
}
