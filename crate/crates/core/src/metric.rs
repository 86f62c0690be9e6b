//! Metric spaces over finite point universes and the two geometric primitives
//! everything else is built on: nearest-member queries and greedy ε-nets.
//!
//! Two kinds of space are supported: `ℓ_q` norms over coordinate vectors
//! (`q ≥ 1`) and an explicit symmetric distance matrix whose sites are plain
//! indices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Above this many sites the O(n³) triangle-inequality scan is skipped.
pub const TRIANGLE_CHECK_LIMIT: usize = 500;

/// A location in a [`MetricSpace`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Site {
    Coords(Vec<f64>),
    Index(usize),
}

impl Site {
    pub fn coords(&self) -> Option<&[f64]> {
        match self {
            Site::Coords(c) => Some(c),
            Site::Index(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum MetricKind {
    /// `ℓ_q` distance between coordinate vectors.
    Lq { q: f64 },
    /// Explicit distance matrix; sites are row indices.
    Matrix { d: Vec<Vec<f64>> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricSpace {
    kind: MetricKind,
    doubling_dim: Option<u32>,
}

impl MetricSpace {
    pub fn lq(q: f64) -> Result<Self> {
        if !(q.is_finite() && q >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "l_q exponent must be >= 1, got {q}"
            )));
        }
        Ok(Self {
            kind: MetricKind::Lq { q },
            doubling_dim: None,
        })
    }

    pub fn euclidean() -> Self {
        Self {
            kind: MetricKind::Lq { q: 2.0 },
            doubling_dim: None,
        }
    }

    /// Builds a matrix metric, validating symmetry, the zero diagonal and
    /// nonnegativity. The triangle inequality is checked when `check_triangle`
    /// is set and the matrix has at most [`TRIANGLE_CHECK_LIMIT`] rows.
    pub fn matrix(d: Vec<Vec<f64>>, check_triangle: bool) -> Result<Self> {
        let n = d.len();
        for (i, row) in d.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Schema(format!(
                    "distance matrix row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::Schema(format!(
                        "distance d[{i}][{j}] = {v} is not a finite nonnegative number"
                    )));
                }
                if i == j && v != 0.0 {
                    return Err(Error::Schema(format!(
                        "distance matrix diagonal d[{i}][{i}] = {v} is not zero"
                    )));
                }
            }
        }
        #[allow(clippy::needless_range_loop)]
        for i in 0..n {
            for j in (i + 1)..n {
                if d[i][j] != d[j][i] {
                    return Err(Error::Schema(format!(
                        "distance matrix is not symmetric: d[{i}][{j}] = {} but d[{j}][{i}] = {}",
                        d[i][j], d[j][i]
                    )));
                }
            }
        }
        if check_triangle {
            if n <= TRIANGLE_CHECK_LIMIT {
                check_triangle_inequality(&d)?;
            } else {
                log::warn!("skipping triangle-inequality check for {n}-site matrix");
            }
        }
        Ok(Self {
            kind: MetricKind::Matrix { d },
            doubling_dim: None,
        })
    }

    pub fn with_doubling_dim(mut self, dim: Option<u32>) -> Self {
        self.doubling_dim = dim;
        self
    }

    pub fn kind(&self) -> &MetricKind {
        &self.kind
    }

    pub fn doubling_dim(&self) -> Option<u32> {
        self.doubling_dim
    }

    /// True for `ℓ_2` over coordinates.
    pub fn is_euclidean(&self) -> bool {
        matches!(self.kind, MetricKind::Lq { q } if q == 2.0)
    }

    /// Checks that `site` belongs to this space's universe.
    pub fn check_site(&self, site: &Site) -> Result<()> {
        match (&self.kind, site) {
            (MetricKind::Lq { .. }, Site::Coords(c)) => {
                if let Some(bad) = c.iter().find(|v| !v.is_finite()) {
                    return Err(Error::Schema(format!("non-finite coordinate {bad}")));
                }
                Ok(())
            }
            (MetricKind::Matrix { d }, Site::Index(i)) => {
                if *i < d.len() {
                    Ok(())
                } else {
                    Err(Error::IndexOutOfRange {
                        what: "distance matrix",
                        index: *i,
                        len: d.len(),
                    })
                }
            }
            (MetricKind::Lq { .. }, Site::Index(_)) => {
                Err(Error::SiteKind("index site in an l_q space".into()))
            }
            (MetricKind::Matrix { .. }, Site::Coords(_)) => {
                Err(Error::SiteKind("coordinate site in a matrix space".into()))
            }
        }
    }

    pub fn distance(&self, a: &Site, b: &Site) -> Result<f64> {
        match (&self.kind, a, b) {
            (MetricKind::Lq { q }, Site::Coords(x), Site::Coords(y)) => {
                if x.len() != y.len() {
                    return Err(Error::DimensionMismatch(x.len(), y.len()));
                }
                Ok(lq_distance(x, y, *q))
            }
            (MetricKind::Matrix { d }, Site::Index(i), Site::Index(j)) => {
                let n = d.len();
                for &idx in [i, j] {
                    if idx >= n {
                        return Err(Error::IndexOutOfRange {
                            what: "distance matrix",
                            index: idx,
                            len: n,
                        });
                    }
                }
                Ok(d[*i][*j])
            }
            _ => Err(Error::SiteKind(
                "site kind does not match metric kind".into(),
            )),
        }
    }

    /// Nearest member of `set` to `x`, as `(position in set, distance)`.
    /// Ties go to the smallest position.
    pub fn nearest(&self, x: &Site, set: &[Site]) -> Result<(usize, f64)> {
        if set.is_empty() {
            return Err(Error::Empty("nearest-point query set"));
        }
        let mut best = (0, f64::INFINITY);
        for (i, s) in set.iter().enumerate() {
            let d = self.distance(x, s)?;
            if d < best.1 {
                best = (i, d);
            }
        }
        Ok(best)
    }
}

fn check_triangle_inequality(d: &[Vec<f64>]) -> Result<()> {
    let n = d.len();
    let scale = d.iter().flatten().fold(0.0f64, |m, &v| m.max(v));
    let slack = 1e-9 * scale.max(1.0);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if d[i][j] > d[i][k] + d[k][j] + slack {
                    return Err(Error::Schema(format!(
                        "triangle inequality violated: d[{i}][{j}] = {} > d[{i}][{k}] + d[{k}][{j}] = {}",
                        d[i][j],
                        d[i][k] + d[k][j]
                    )));
                }
            }
        }
    }
    Ok(())
}

/// `ℓ_q` distance between equal-length coordinate slices.
pub fn lq_distance(x: &[f64], y: &[f64], q: f64) -> f64 {
    if q == 2.0 {
        x.iter()
            .zip(y)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    } else if q == 1.0 {
        x.iter().zip(y).map(|(a, b)| (a - b).abs()).sum()
    } else {
        x.iter()
            .zip(y)
            .map(|(a, b)| (a - b).abs().powf(q))
            .sum::<f64>()
            .powf(1.0 / q)
    }
}

/// Euclidean distance, for callers that work on raw coordinates.
pub fn l2(x: &[f64], y: &[f64]) -> f64 {
    lq_distance(x, y, 2.0)
}

/// Closed ball `{x : δ(center, x) ≤ radius}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Ball {
    pub center: Site,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Site, radius: f64) -> Result<Self> {
        if !(radius >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "ball radius must be >= 0, got {radius}"
            )));
        }
        Ok(Self { center, radius })
    }
}

/// Greedy ε-net over `members`, scanned in the given order: a member joins
/// the net unless some earlier net point lies within `eps` of it.
///
/// The result is ε-dense in `members` and ε-separated.
pub fn greedy_net<F>(members: &[usize], eps: f64, dist: F) -> Vec<usize>
where
    F: Fn(usize, usize) -> f64,
{
    let mut net: Vec<usize> = Vec::new();
    for &m in members {
        if !net.iter().any(|&a| dist(a, m) <= eps) {
            net.push(m);
        }
    }
    net
}

/// Decomposes `ball ∩ candidates` into sub-balls of radius `eps`, returning
/// the sub-ball centers as ascending positions into `candidates`.
pub fn ball_decompose(
    space: &MetricSpace,
    ball: &Ball,
    eps: f64,
    candidates: &[Site],
) -> Result<Vec<usize>> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "decomposition radius must be > 0, got {eps}"
        )));
    }
    let mut inside = Vec::new();
    for (i, c) in candidates.iter().enumerate() {
        if space.distance(&ball.center, c)? <= ball.radius {
            inside.push(i);
        }
    }
    // Distances are validated above for every member, so the unwrap below
    // only sees same-kind sites.
    Ok(greedy_net(&inside, eps, |a, b| {
        space
            .distance(&candidates[a], &candidates[b])
            .expect("candidates share the space's site kind")
    }))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NetCheckReport {
    pub calls: u64,
    pub seed: u64,
    /// Ball members farther than `eps` from every net point.
    pub density_violations: u64,
    /// Net point pairs at distance `≤ eps`.
    pub separation_violations: u64,
    /// Net points outside the ball.
    pub containment_violations: u64,
    pub passed: bool,
}

/// Runs `calls` random ball decompositions (random `ℓ_q` space, cloud, ball
/// and radius) and counts density, separation and containment failures.
pub fn check_ball_decompositions(calls: u64, seed: u64) -> Result<NetCheckReport> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let (mut dense, mut sep, mut inside) = (0u64, 0u64, 0u64);
    for _ in 0..calls {
        let dim = rng.random_range(1..=5);
        let q = [1.0, 2.0, 3.0][rng.random_range(0..3)];
        let space = MetricSpace::lq(q)?;
        let n = rng.random_range(1..=60);
        let cloud: Vec<Site> = (0..n)
            .map(|_| Site::Coords((0..dim).map(|_| rng.random_range(-1.0..1.0)).collect()))
            .collect();
        let center = cloud[rng.random_range(0..n)].clone();
        let ball = Ball::new(center, rng.random_range(0.0..2.0))?;
        let eps = rng.random_range(0.01..1.0);
        let net = ball_decompose(&space, &ball, eps, &cloud)?;
        let d = |a: &Site, b: &Site| space.distance(a, b);
        for c in &cloud {
            if d(&ball.center, c)? <= ball.radius
                && !net.iter().any(|&m| d(&cloud[m], c).is_ok_and(|x| x <= eps))
            {
                dense += 1;
            }
        }
        for (i, &a) in net.iter().enumerate() {
            if d(&ball.center, &cloud[a])? > ball.radius {
                inside += 1;
            }
            for &b in &net[i + 1..] {
                if d(&cloud[a], &cloud[b])? <= eps {
                    sep += 1;
                }
            }
        }
    }
    Ok(NetCheckReport {
        calls,
        seed,
        density_violations: dense,
        separation_violations: sep,
        containment_violations: inside,
        passed: dense + sep + inside == 0,
    })
}
