//! Discrete Euclidean instances: midpoint closure, the projection and
//! mirror-point assignment rules, and the closure-enumeration solver.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::bicriteria::BicriteriaSolution;
use crate::error::{Error, Result};
use crate::instance::{Instance, Solution};
use crate::metric::{l2, Site};
use crate::oracle::{binomial, search_subsets};

/// Radius factor of the mirror-point test.
pub const ALPHA: f64 = 0.6;
/// Far-point threshold: `p` is far when `δ(p, O) ≥ β₀ δ(p, B)`.
pub const BETA0: f64 = 0.05;
pub const EPS0: f64 = 0.002;
/// Largest displacement ratio a far point may see.
pub const GAMMA: f64 = 0.9978;
/// Multiplicative saving of the closure solver, `3^z (1 - η₀)`.
pub const ETA0: f64 = 0.0006;
pub const CLAIM_BOUND: f64 = 1.9982;

fn require_euclidean(inst: &Instance) -> Result<()> {
    if inst.metric().is_euclidean() {
        Ok(())
    } else {
        Err(Error::NotEuclidean)
    }
}

fn site_coords(sites: &[Site]) -> Result<Vec<Vec<f64>>> {
    sites
        .iter()
        .map(|s| s.coords().map(<[f64]>::to_vec).ok_or(Error::NotEuclidean))
        .collect()
}

/// Position of the nearest member of `set` (ties to the lowest position).
fn nearest(x: &[f64], set: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (i, s) in set.iter().enumerate() {
        let d = l2(x, s);
        if d < best.1 {
            best = (i, d);
        }
    }
    best
}

fn nearest_among(x: &[f64], set: &[Vec<f64>], members: &[usize]) -> (usize, f64) {
    let mut best = (members[0], f64::INFINITY);
    for &m in members {
        let d = l2(x, &set[m]);
        if d < best.1 {
            best = (m, d);
        }
    }
    best
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosureOrigin {
    Center(usize),
    Midpoint(usize, usize),
}

/// `cl(B) = B ∪ {π_F((b + b')/2)}` as ascending facility indices.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClosureSet {
    pub members: Vec<usize>,
    pub origin: Vec<ClosureOrigin>,
}

impl ClosureSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Midpoint closure of the facilities `b` within `facilities`. Every pair,
/// including `b = b'`, contributes the facility nearest its midpoint.
pub fn midpoint_closure(facilities: &[Vec<f64>], b: &[usize]) -> Result<ClosureSet> {
    if b.is_empty() {
        return Err(Error::Empty("bicriteria center set"));
    }
    if let Some(&i) = b.iter().find(|&&i| i >= facilities.len()) {
        return Err(Error::IndexOutOfRange {
            what: "facilities",
            index: i,
            len: facilities.len(),
        });
    }
    let mut found: Vec<(usize, ClosureOrigin)> =
        b.iter().map(|&i| (i, ClosureOrigin::Center(i))).collect();
    for (x, &i) in b.iter().enumerate() {
        for &j in &b[x..] {
            let mid: Vec<f64> = facilities[i]
                .iter()
                .zip(&facilities[j])
                .map(|(a, c)| 0.5 * (a + c))
                .collect();
            let (f, _) = nearest(&mid, facilities);
            found.push((f, ClosureOrigin::Midpoint(i.min(j), i.max(j))));
        }
    }
    // Stable sort keeps the first origin recorded for each facility.
    found.sort_by_key(|&(f, _)| f);
    found.dedup_by_key(|&mut (f, _)| f);
    Ok(ClosureSet {
        members: found.iter().map(|&(f, _)| f).collect(),
        origin: found.iter().map(|&(_, o)| o).collect(),
    })
}

pub fn instance_closure(inst: &Instance, b: &[usize]) -> Result<ClosureSet> {
    require_euclidean(inst)?;
    midpoint_closure(&site_coords(inst.facilities())?, b)
}

/// `σ(x) = π_B(x)` for every `x`, as positions into `b`.
pub fn projection_assign(x: &[Vec<f64>], b: &[Vec<f64>]) -> Result<Vec<usize>> {
    if b.is_empty() {
        return Err(Error::Empty("projection target set"));
    }
    Ok(x.iter().map(|xi| nearest(xi, b).0).collect())
}

/// `‖p − σ(o)‖ / (2‖p − o‖ + ‖p − b'‖)`.
pub fn displacement_ratio(o: &[f64], sigma_o: &[f64], p: &[f64], b_prime: &[f64]) -> Result<f64> {
    let den = 2.0 * l2(p, o) + l2(p, b_prime);
    if den == 0.0 {
        return Err(Error::Degenerate("p, o and b' coincide".into()));
    }
    Ok(l2(p, sigma_o) / den)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PointRatio {
    pub far: bool,
    /// `δ(p, σ(O)) / (2δ(p, O) + δ(p, B))`; `None` when both distances vanish.
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AssignmentReport {
    /// Facility index assigned to each center of `O`.
    pub sigma: Vec<usize>,
    /// Whether the mirror ball of each center met `B` (closure branch taken).
    pub mirror_hit: Vec<bool>,
    pub points: Vec<PointRatio>,
    pub closure: ClosureSet,
    pub alpha: f64,
    pub beta0: f64,
}

impl AssignmentReport {
    /// Largest ratio over far points.
    pub fn max_far_ratio(&self) -> f64 {
        self.points
            .iter()
            .filter(|p| p.far)
            .filter_map(|p| p.ratio)
            .fold(0.0, f64::max)
    }
}

/// Mirror-point assignment of each `o ∈ O` into `cl(B)`: with `b = π_B(o)`
/// and `q = 2o − b`, `σ(o) = b` when no member of `B` lies in
/// `ball(q, α‖o − b‖)`, otherwise `σ(o) = π_{cl(B)}(o)`.
pub fn sigma_assign(
    facilities: &[Vec<f64>],
    o: &[Vec<f64>],
    b: &[usize],
    points: &[Vec<f64>],
    alpha: f64,
    beta0: f64,
) -> Result<AssignmentReport> {
    if o.is_empty() {
        return Err(Error::Empty("center set O"));
    }
    let closure = midpoint_closure(facilities, b)?;
    let mut sigma = Vec::with_capacity(o.len());
    let mut mirror_hit = Vec::with_capacity(o.len());
    for oi in o {
        let (bi, d) = nearest_among(oi, facilities, b);
        if d == 0.0 {
            sigma.push(bi);
            mirror_hit.push(false);
            continue;
        }
        let q: Vec<f64> = oi
            .iter()
            .zip(&facilities[bi])
            .map(|(x, y)| 2.0 * x - y)
            .collect();
        let hit = b.iter().any(|&m| l2(&q, &facilities[m]) <= alpha * d);
        sigma.push(if hit {
            nearest_among(oi, facilities, &closure.members).0
        } else {
            bi
        });
        mirror_hit.push(hit);
    }
    let report_points = points
        .iter()
        .map(|p| {
            let d_o = o.iter().map(|x| l2(p, x)).fold(f64::INFINITY, f64::min);
            let d_b = b
                .iter()
                .map(|&m| l2(p, &facilities[m]))
                .fold(f64::INFINITY, f64::min);
            let d_s = sigma
                .iter()
                .map(|&m| l2(p, &facilities[m]))
                .fold(f64::INFINITY, f64::min);
            let den = 2.0 * d_o + d_b;
            PointRatio {
                far: d_o >= beta0 * d_b,
                ratio: (den > 0.0).then(|| d_s / den),
            }
        })
        .collect();
    Ok(AssignmentReport {
        sigma,
        mirror_hit,
        points: report_points,
        closure,
        alpha,
        beta0,
    })
}

/// Per-group cost of `x`, split into clients with `δ(p, O) < β₀ δ(p, B)`
/// (near) and the rest (far). Returns `(near, far)` per group.
pub fn cost_split(
    inst: &Instance,
    x: &[usize],
    o: &[usize],
    b: &[usize],
    beta0: f64,
) -> Result<Vec<(f64, f64)>> {
    if !(beta0 > 0.0 && beta0 < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "beta0 must lie in (0, 1), got {beta0}"
        )));
    }
    for set in [x, o, b] {
        if set.is_empty() {
            return Err(Error::Empty("center set"));
        }
    }
    let pc = inst.point_costs(x);
    let far: Vec<bool> = (0..inst.num_points())
        .map(|p| inst.dist_to_set(p, o) >= beta0 * inst.dist_to_set(p, b))
        .collect();
    Ok(inst
        .groups()
        .iter()
        .map(|g| {
            g.entries().iter().fold((0.0, 0.0), |(n, f), &(p, w)| {
                if far[p] {
                    (n, f + w * pc[p])
                } else {
                    (n + w * pc[p], f)
                }
            })
        })
        .collect())
}

/// `2(1 − ε₀)^z + ε₀ (1 + 2 β₀^z z)`.
pub fn claim_value(z: u32, eps0: f64, beta0: f64) -> f64 {
    2.0 * (1.0 - eps0).powi(z as i32) + eps0 * (1.0 + 2.0 * beta0.powi(z as i32) * z as f64)
}

pub fn fpt_ratio_bound(z: u32) -> f64 {
    3f64.powi(z as i32) * (1.0 - ETA0)
}

#[derive(Clone, Debug, Serialize)]
pub struct FptSolution {
    pub solution: Solution,
    pub closure: ClosureSet,
    pub subsets_evaluated: u128,
    pub ratio_bound: f64,
}

/// Best `k`-subset of `cl(B)`; all of `cl(B)` when it has fewer than `k`
/// members.
pub fn fpt_solve(inst: &Instance, bic: &BicriteriaSolution, budget: u128) -> Result<FptSolution> {
    let closure = instance_closure(inst, &bic.centers)?;
    let needed = binomial(closure.len(), inst.k().min(closure.len())).unwrap_or(u128::MAX);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let search = search_subsets(inst, &closure.members, u128::MAX)?;
    Ok(FptSolution {
        solution: search.solution,
        closure,
        subsets_evaluated: search.evaluated,
        ratio_bound: fpt_ratio_bound(inst.z()),
    })
}

const CHUNK: u64 = 1024;

fn chunk_rng(seed: u64, dim: usize, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((dim as u64) << 40) ^ chunk);
    rng
}

fn unit_vector(rng: &mut impl Rng, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-9 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

fn offset(base: &[f64], dir: &[f64], t: f64) -> Vec<f64> {
    base.iter().zip(dir).map(|(a, b)| a + t * b).collect()
}

/// One sampled configuration of the assignment lemma check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaConfig {
    pub o: Vec<f64>,
    /// `B`; the first member is the projection of `o`.
    pub b: Vec<Vec<f64>>,
    pub extra_facilities: Vec<Vec<f64>>,
    pub p: Vec<f64>,
    pub sigma: Vec<f64>,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DimReport {
    pub dim: usize,
    pub samples: u64,
    pub max_ratio: f64,
    pub worst: Option<LemmaConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AssignmentLemmaReport {
    pub samples: u64,
    pub seed: u64,
    pub alpha: f64,
    pub beta0: f64,
    pub bound: f64,
    pub max_ratio: f64,
    pub dims: Vec<DimReport>,
    pub passed: bool,
}

/// Samples one normalized configuration: `o = 0`, `‖b‖ = 1`, other members
/// of `B` no closer to `o` than `b`, and a far client `p` outside
/// `ball(o, β₀)`.
fn sample_config(rng: &mut ChaCha8Rng, d: usize, alpha: f64, beta0: f64) -> LemmaConfig {
    let o = vec![0.0; d];
    let b0 = unit_vector(rng, d);
    let q: Vec<f64> = b0.iter().map(|x| -x).collect();
    let mut b = vec![b0];
    for _ in 0..rng.random_range(0..=3) {
        let cand = loop {
            let c = match rng.random_range(0..3) {
                0 => {
                    let r = alpha * rng.random::<f64>().powf(1.0 / d as f64);
                    offset(&q, &unit_vector(rng, d), r)
                }
                1 => offset(&q, &unit_vector(rng, d), alpha * rng.random_range(0.9..1.1)),
                _ => offset(&o, &unit_vector(rng, d), rng.random_range(1.0..3.0)),
            };
            if l2(&c, &o) >= 1.0 {
                break c;
            }
        };
        b.push(cand);
    }
    let extra: Vec<Vec<f64>> = (0..rng.random_range(0..=2))
        .map(|_| offset(&o, &unit_vector(rng, d), rng.random_range(0.0..1.2)))
        .collect();

    let mut facilities = vec![o.clone()];
    facilities.extend(b.iter().cloned());
    facilities.extend(extra.iter().cloned());
    let b_idx: Vec<usize> = (1..=b.len()).collect();

    loop {
        let p = match rng.random_range(0..4) {
            0 => offset(&o, &unit_vector(rng, d), rng.random_range(beta0..3.0)),
            1 => offset(&o, &unit_vector(rng, d), rng.random_range(beta0..0.3)),
            2 => {
                let along = offset(&o, &q, rng.random_range(beta0..2.0));
                offset(&along, &unit_vector(rng, d), rng.random_range(0.0..0.2))
            }
            _ => {
                let m = rng.random_range(0..b.len());
                offset(&b[m], &unit_vector(rng, d), rng.random_range(0.0..0.5))
            }
        };
        let d_o = l2(&p, &o);
        let d_b = b.iter().map(|x| l2(&p, x)).fold(f64::INFINITY, f64::min);
        if d_o < beta0 || d_o < beta0 * d_b {
            continue;
        }
        let report = sigma_assign(
            &facilities,
            std::slice::from_ref(&o),
            &b_idx,
            std::slice::from_ref(&p),
            alpha,
            beta0,
        )
        .expect("configuration is well formed");
        let ratio = report.points[0].ratio.expect("p is away from o");
        return LemmaConfig {
            sigma: facilities[report.sigma[0]].clone(),
            o,
            b,
            extra_facilities: extra,
            p,
            ratio,
        };
    }
}

/// Monte-Carlo check of the far-point displacement bound. Samples are split
/// evenly over `dims`; each chunk has its own seeded stream, so the report
/// does not depend on the thread count.
pub fn check_assignment_lemma(
    samples: u64,
    dims: &[usize],
    seed: u64,
    alpha: f64,
    beta0: f64,
) -> Result<AssignmentLemmaReport> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::InvalidParameter(
            "dimensions must be positive".into(),
        ));
    }
    let per_dim = samples.div_ceil(dims.len() as u64);
    let mut reports = Vec::new();
    for &d in dims {
        let chunks = per_dim.div_ceil(CHUNK);
        let worst: Vec<Option<LemmaConfig>> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut rng = chunk_rng(seed, d, c);
                let n = CHUNK.min(per_dim - c * CHUNK);
                let mut best: Option<LemmaConfig> = None;
                for _ in 0..n {
                    let cfg = sample_config(&mut rng, d, alpha, beta0);
                    if best.as_ref().is_none_or(|b| cfg.ratio > b.ratio) {
                        best = Some(cfg);
                    }
                }
                best
            })
            .collect();
        let worst = worst
            .into_iter()
            .flatten()
            .reduce(|a, b| if b.ratio > a.ratio { b } else { a });
        reports.push(DimReport {
            dim: d,
            samples: per_dim,
            max_ratio: worst.as_ref().map_or(0.0, |w| w.ratio),
            worst,
        });
    }
    let max_ratio = reports.iter().map(|r| r.max_ratio).fold(0.0, f64::max);
    let bound = GAMMA + 1e-9;
    Ok(AssignmentLemmaReport {
        samples: per_dim * dims.len() as u64,
        seed,
        alpha,
        beta0,
        bound,
        max_ratio,
        dims: reports,
        passed: max_ratio <= bound,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProjectionLemmaReport {
    pub samples: u64,
    pub seed: u64,
    /// Largest `δ(p, π_B(x)) − 2δ(p, x) − δ(p, B)` observed.
    pub max_excess: f64,
    pub violations: u64,
    pub passed: bool,
}

/// Random check of `δ(p, π_B(x)) ≤ 2δ(p, x) + δ(p, B)` for every sampled
/// `x` and `p`, `samples` configurations per dimension.
pub fn check_projection_lemma(
    samples: u64,
    dims: &[usize],
    seed: u64,
) -> Result<ProjectionLemmaReport> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::InvalidParameter(
            "dimensions must be positive".into(),
        ));
    }
    let mut max_excess = f64::NEG_INFINITY;
    let mut violations = 0u64;
    for &d in dims {
        let chunks = samples.div_ceil(CHUNK);
        let parts: Vec<(f64, u64)> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut rng = chunk_rng(seed, d, c);
                let mut worst = f64::NEG_INFINITY;
                let mut bad = 0u64;
                let cloud = |rng: &mut ChaCha8Rng, n: usize| -> Vec<Vec<f64>> {
                    (0..n)
                        .map(|_| (0..d).map(|_| rng.random_range(-1.0..1.0)).collect())
                        .collect()
                };
                for _ in 0..CHUNK.min(samples - c * CHUNK) {
                    let nb = rng.random_range(1..=5);
                    let b = cloud(&mut rng, nb);
                    let nx = rng.random_range(1..=4);
                    let x = cloud(&mut rng, nx);
                    let p = cloud(&mut rng, 1).remove(0);
                    let sigma = projection_assign(&x, &b).expect("b is nonempty");
                    let d_b = nearest(&p, &b).1;
                    for (xi, &s) in x.iter().zip(&sigma) {
                        let excess = l2(&p, &b[s]) - 2.0 * l2(&p, xi) - d_b;
                        worst = worst.max(excess);
                        if excess > 1e-12 {
                            bad += 1;
                        }
                    }
                }
                (worst, bad)
            })
            .collect();
        for (w, b) in parts {
            max_excess = max_excess.max(w);
            violations += b;
        }
    }
    Ok(ProjectionLemmaReport {
        samples: samples * dims.len() as u64,
        seed,
        max_excess,
        violations,
        passed: violations == 0,
    })
}
