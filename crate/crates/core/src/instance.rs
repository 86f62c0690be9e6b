//! Robust (k,z)-clustering instances in the weight-vector formulation and
//! their cost functions.
//!
//! A group is a sparse nonnegative weight vector over the clients. The cost
//! of a center set `X` for group `w` is `Σ_p w[p] · δ(p, X)^z`, and the cost
//! of `X` for the instance is the maximum over groups.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::{MetricSpace, Site};

/// Sparse weight vector over client indices, sorted by index.
#[derive(Clone, Debug, PartialEq)]
pub struct Group {
    entries: Vec<(usize, f64)>,
}

impl Group {
    pub fn from_map(weights: BTreeMap<usize, f64>) -> Self {
        Self {
            entries: weights.into_iter().collect(),
        }
    }

    /// Weight 1 on a single client; `k`-center semantics use one per client.
    pub fn indicator(p: usize) -> Self {
        Self {
            entries: vec![(p, 1.0)],
        }
    }

    /// A subset group `S` with client weights `w(p)`: `w[p] = w(p)` on `S`
    /// and zero elsewhere.
    pub fn from_subset(members: &[usize], point_weights: Option<&[f64]>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for &p in members {
            let w = match point_weights {
                Some(ws) => *ws.get(p).ok_or(Error::IndexOutOfRange {
                    what: "point weights",
                    index: p,
                    len: ws.len(),
                })?,
                None => 1.0,
            };
            map.insert(p, w);
        }
        Ok(Self::from_map(map))
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn weight(&self, p: usize) -> f64 {
        self.entries
            .binary_search_by_key(&p, |&(i, _)| i)
            .map(|pos| self.entries[pos].1)
            .unwrap_or(0.0)
    }

    /// `‖w‖₁` over the strictly positive entries.
    pub fn l1(&self) -> f64 {
        self.entries
            .iter()
            .map(|&(_, w)| w)
            .filter(|&w| w > 0.0)
            .sum()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            entries: self.entries.iter().map(|&(p, w)| (p, w * c)).collect(),
        }
    }

    pub fn to_map(&self) -> BTreeMap<usize, f64> {
        self.entries.iter().copied().collect()
    }
}

/// Where the facility list comes from.
#[derive(Clone, Debug, PartialEq)]
pub enum Facilities {
    SameAsPoints,
    Sites(Vec<Site>),
}

#[derive(Clone, Debug)]
pub struct Instance {
    metric: MetricSpace,
    points: Vec<Site>,
    facilities: Vec<Site>,
    same_as_points: bool,
    k: usize,
    z: u32,
    groups: Vec<Group>,
    // |P| x |F| row-major distances and their z-th powers.
    dist: Vec<f64>,
    dist_pow: Vec<f64>,
    weight_aspect: f64,
    distance_aspect: f64,
}

impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        self.metric == other.metric
            && self.points == other.points
            && self.facilities == other.facilities
            && self.same_as_points == other.same_as_points
            && self.k == other.k
            && self.z == other.z
            && self.groups == other.groups
    }
}

impl Instance {
    pub fn new(
        metric: MetricSpace,
        points: Vec<Site>,
        facilities: Facilities,
        k: usize,
        z: u32,
        groups: Vec<Group>,
    ) -> Result<Self> {
        let (facilities, same_as_points) = match facilities {
            Facilities::SameAsPoints => (points.clone(), true),
            Facilities::Sites(f) => (f, false),
        };
        if points.is_empty() {
            return Err(Error::Schema("instance has no points".into()));
        }
        if facilities.is_empty() {
            return Err(Error::Schema("instance has no facilities".into()));
        }
        if k == 0 {
            return Err(Error::Schema("k must be positive".into()));
        }
        if z == 0 {
            return Err(Error::Schema("z must be a positive integer".into()));
        }
        if k > facilities.len() {
            return Err(Error::Schema(format!(
                "k = {k} exceeds the {} facilities",
                facilities.len()
            )));
        }
        if groups.is_empty() {
            return Err(Error::Schema("instance has no groups".into()));
        }
        for s in points.iter().chain(facilities.iter()) {
            metric.check_site(s)?;
        }
        if let Some(dim) = points.first().and_then(|s| s.coords()).map(<[f64]>::len) {
            for s in points.iter().chain(facilities.iter()) {
                let d = s.coords().map_or(dim, <[f64]>::len);
                if d != dim {
                    return Err(Error::DimensionMismatch(dim, d));
                }
            }
        }
        let n = points.len();
        for (gi, g) in groups.iter().enumerate() {
            let mut positive = false;
            for &(p, w) in &g.entries {
                if p >= n {
                    return Err(Error::Schema(format!(
                        "group {gi} references point {p}, only {n} points"
                    )));
                }
                if !w.is_finite() || w < 0.0 {
                    return Err(Error::Schema(format!(
                        "group {gi} has invalid weight {w} at point {p}"
                    )));
                }
                positive |= w > 0.0;
            }
            if !positive {
                return Err(Error::Schema(format!(
                    "group {gi} has no strictly positive weight"
                )));
            }
        }

        let nf = facilities.len();
        let mut dist = Vec::with_capacity(n * nf);
        for p in &points {
            for f in &facilities {
                dist.push(metric.distance(p, f)?);
            }
        }
        let dist_pow = dist.iter().map(|d| d.powi(z as i32)).collect();

        let (wmin, wmax) = groups
            .iter()
            .flat_map(|g| g.entries.iter().map(|&(_, w)| w))
            .filter(|&w| w > 0.0)
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), w| {
                (lo.min(w), hi.max(w))
            });
        let weight_aspect = wmax / wmin;
        let (dmin, dmax) = positive_range(&dist);
        let distance_aspect = if dmin.is_finite() { dmax / dmin } else { 1.0 };
        let limit = (n as f64).powi(4);
        if weight_aspect > limit {
            log::warn!("weight aspect ratio {weight_aspect:e} exceeds n^4 = {limit:e}");
        }
        if distance_aspect > limit {
            log::warn!("distance aspect ratio {distance_aspect:e} exceeds n^4 = {limit:e}");
        }

        Ok(Self {
            metric,
            points,
            facilities,
            same_as_points,
            k,
            z,
            groups,
            dist,
            dist_pow,
            weight_aspect,
            distance_aspect,
        })
    }

    pub fn metric(&self) -> &MetricSpace {
        &self.metric
    }
    pub fn points(&self) -> &[Site] {
        &self.points
    }
    pub fn facilities(&self) -> &[Site] {
        &self.facilities
    }
    pub fn facilities_same_as_points(&self) -> bool {
        self.same_as_points
    }
    pub fn k(&self) -> usize {
        self.k
    }
    pub fn z(&self) -> u32 {
        self.z
    }
    pub fn groups(&self) -> &[Group] {
        &self.groups
    }
    pub fn num_points(&self) -> usize {
        self.points.len()
    }
    pub fn num_facilities(&self) -> usize {
        self.facilities.len()
    }
    /// Ratio of the largest to the smallest positive weight.
    pub fn weight_aspect(&self) -> f64 {
        self.weight_aspect
    }
    /// Ratio of the largest to the smallest positive client–facility distance.
    pub fn distance_aspect(&self) -> f64 {
        self.distance_aspect
    }

    /// Same instance with a different `k`.
    pub fn with_k(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.facilities.len() {
            return Err(Error::InvalidParameter(format!(
                "k = {k} must lie in 1..={}",
                self.facilities.len()
            )));
        }
        let mut out = self.clone();
        out.k = k;
        Ok(out)
    }

    /// Same clients, metric, `k` and `z` with a new group list.
    pub fn with_groups(&self, groups: Vec<Group>) -> Result<Self> {
        let facilities = if self.same_as_points {
            Facilities::SameAsPoints
        } else {
            Facilities::Sites(self.facilities.clone())
        };
        Self::new(
            self.metric.clone(),
            self.points.clone(),
            facilities,
            self.k,
            self.z,
            groups,
        )
    }

    /// `δ(p, f)`.
    #[inline]
    pub fn dist(&self, p: usize, f: usize) -> f64 {
        self.dist[p * self.facilities.len() + f]
    }

    /// `δ(p, f)^z`.
    #[inline]
    pub fn dist_pow(&self, p: usize, f: usize) -> f64 {
        self.dist_pow[p * self.facilities.len() + f]
    }

    /// Distance between two clients.
    pub fn point_dist(&self, a: usize, b: usize) -> f64 {
        self.metric
            .distance(&self.points[a], &self.points[b])
            .expect("sites validated at construction")
    }

    /// Distance between two facilities.
    pub fn facility_dist(&self, a: usize, b: usize) -> f64 {
        self.metric
            .distance(&self.facilities[a], &self.facilities[b])
            .expect("sites validated at construction")
    }

    /// `δ(p, X)`; ties are irrelevant here.
    pub fn dist_to_set(&self, p: usize, x: &[usize]) -> f64 {
        x.iter()
            .map(|&f| self.dist(p, f))
            .fold(f64::INFINITY, f64::min)
    }

    /// Nearest facility of `x` to client `p` as `(facility, distance)`,
    /// smallest facility index on ties.
    pub fn nearest_in(&self, p: usize, x: &[usize]) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for &f in x {
            let d = self.dist(p, f);
            match best {
                Some((bf, bd)) if d > bd || (d == bd && f >= bf) => {}
                _ => best = Some((f, d)),
            }
        }
        best
    }

    fn check_centers(&self, x: &[usize]) -> Result<()> {
        if x.is_empty() {
            return Err(Error::Empty("center set"));
        }
        if let Some(&f) = x.iter().find(|&&f| f >= self.facilities.len()) {
            return Err(Error::IndexOutOfRange {
                what: "facilities",
                index: f,
                len: self.facilities.len(),
            });
        }
        Ok(())
    }

    /// `δ(p, X)^z` for every client.
    pub fn point_costs(&self, x: &[usize]) -> Vec<f64> {
        (0..self.points.len())
            .map(|p| {
                x.iter()
                    .map(|&f| self.dist_pow(p, f))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect()
    }

    fn weighted(w: &Group, point_costs: &[f64]) -> f64 {
        w.entries
            .iter()
            .filter(|&&(_, wp)| wp != 0.0)
            .map(|&(p, wp)| wp * point_costs[p])
            .sum()
    }

    /// `c(w, X) = Σ_p w[p] · δ(p, X)^z`.
    pub fn group_cost(&self, w: &Group, x: &[usize]) -> Result<f64> {
        self.check_centers(x)?;
        if let Some(&(p, _)) = w.entries.iter().find(|&&(p, _)| p >= self.points.len()) {
            return Err(Error::IndexOutOfRange {
                what: "points",
                index: p,
                len: self.points.len(),
            });
        }
        Ok(Self::weighted(w, &self.point_costs(x)))
    }

    /// `max_w c(w, X)` together with every group's cost.
    pub fn solution_cost(&self, x: &[usize]) -> Result<(f64, Vec<f64>)> {
        self.check_centers(x)?;
        let pc = self.point_costs(x);
        let per_group: Vec<f64> = self.groups.iter().map(|g| Self::weighted(g, &pc)).collect();
        let max = per_group.iter().copied().fold(0.0, f64::max);
        Ok((max, per_group))
    }

    /// Cost of `X` unless some group already exceeds `bound`.
    pub(crate) fn cost_bounded(
        &self,
        x: &[usize],
        bound: f64,
        scratch: &mut Vec<f64>,
    ) -> Option<f64> {
        scratch.clear();
        scratch.extend((0..self.points.len()).map(|p| {
            x.iter()
                .map(|&f| self.dist_pow(p, f))
                .fold(f64::INFINITY, f64::min)
        }));
        let mut max = 0.0f64;
        for g in &self.groups {
            let c = Self::weighted(g, scratch);
            if c > bound {
                return None;
            }
            max = max.max(c);
        }
        Some(max)
    }
}

fn positive_range(values: &[f64]) -> (f64, f64) {
    values
        .iter()
        .copied()
        .filter(|&d| d > 0.0)
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), d| {
            (lo.min(d), hi.max(d))
        })
}

/// A center set and its evaluated cost.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Solution {
    pub centers: Vec<usize>,
    pub cost: f64,
    pub group_costs: Vec<f64>,
}

impl Solution {
    /// Evaluates `centers` (sorted and deduplicated) on `instance`.
    pub fn evaluate(instance: &Instance, centers: &[usize]) -> Result<Self> {
        let mut centers = centers.to_vec();
        centers.sort_unstable();
        centers.dedup();
        let (cost, group_costs) = instance.solution_cost(&centers)?;
        Ok(Self {
            centers,
            cost,
            group_costs,
        })
    }
}
