//! Seeded random instance generators.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::instance::{Facilities, Group, Instance};
use crate::metric::{l2, MetricSpace, Site};

#[derive(Clone, Debug, PartialEq)]
pub enum Layout {
    /// Uniform in `[0, side]^dim`.
    Cube { dim: usize, side: f64 },
    /// Isotropic Gaussians of deviation `sigma` around `clusters` centers
    /// drawn uniformly from `[0, spread]^dim`.
    Gaussian {
        dim: usize,
        clusters: usize,
        sigma: f64,
        spread: f64,
    },
    /// Uniform on `[0, length]`.
    Line { length: f64 },
    /// Euclidean distances of uniform planar sites, stored as an explicit
    /// matrix.
    Matrix { side: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FacilityMode {
    SameAsPoints,
    /// `m` facilities drawn from the client distribution.
    Separate(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GroupMode {
    /// One group, unit weight on every client.
    Single,
    /// Clients dealt into `count` groups with unit weights.
    Partition(usize),
    /// `count` groups, each keeping every client with probability 1/2 at a
    /// weight uniform in `[1, max_weight]`.
    Random { count: usize, max_weight: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenSpec {
    pub layout: Layout,
    pub n: usize,
    pub facilities: FacilityMode,
    pub k: usize,
    pub z: u32,
    pub groups: GroupMode,
    /// Exponent of the `ℓ_q` metric for coordinate layouts.
    pub q: f64,
    pub seed: u64,
}

impl GenSpec {
    pub fn new(layout: Layout, n: usize, k: usize, z: u32, seed: u64) -> Self {
        Self {
            layout,
            n,
            facilities: FacilityMode::SameAsPoints,
            k,
            z,
            groups: GroupMode::Single,
            q: 2.0,
            seed,
        }
    }
}

fn uniform_cloud(rng: &mut ChaCha8Rng, count: usize, dim: usize, side: f64) -> Vec<Vec<f64>> {
    (0..count)
        .map(|_| (0..dim).map(|_| rng.random::<f64>() * side).collect())
        .collect()
}

fn sample_coords(
    rng: &mut ChaCha8Rng,
    layout: &Layout,
    count: usize,
    anchors: &[Vec<f64>],
) -> Result<Vec<Vec<f64>>> {
    Ok(match *layout {
        Layout::Cube { dim, side } => uniform_cloud(rng, count, dim, side),
        Layout::Line { length } => uniform_cloud(rng, count, 1, length),
        Layout::Matrix { side } => uniform_cloud(rng, count, 2, side),
        Layout::Gaussian { sigma, .. } => {
            let noise =
                Normal::new(0.0, sigma).map_err(|e| Error::InvalidParameter(e.to_string()))?;
            (0..count)
                .map(|_| {
                    let c = &anchors[rng.random_range(0..anchors.len())];
                    c.iter().map(|&x| x + noise.sample(rng)).collect()
                })
                .collect()
        }
    })
}

fn make_groups(rng: &mut ChaCha8Rng, mode: GroupMode, n: usize) -> Result<Vec<Group>> {
    Ok(match mode {
        GroupMode::Single => vec![Group::from_subset(&(0..n).collect::<Vec<_>>(), None)?],
        GroupMode::Partition(count) => {
            if count == 0 || count > n {
                return Err(Error::InvalidParameter(format!(
                    "cannot split {n} clients into {count} groups"
                )));
            }
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(rng);
            let mut members = vec![Vec::new(); count];
            for (i, p) in order.into_iter().enumerate() {
                members[i % count].push(p);
            }
            members
                .iter()
                .map(|m| Group::from_subset(m, None))
                .collect::<Result<_>>()?
        }
        GroupMode::Random { count, max_weight } => {
            if count == 0 || !(max_weight >= 1.0) {
                return Err(Error::InvalidParameter(
                    "random groups need count >= 1 and max_weight >= 1".into(),
                ));
            }
            (0..count)
                .map(|_| {
                    let mut map = std::collections::BTreeMap::new();
                    for p in 0..n {
                        if rng.random::<bool>() {
                            map.insert(p, 1.0 + rng.random::<f64>() * (max_weight - 1.0));
                        }
                    }
                    if map.is_empty() {
                        map.insert(rng.random_range(0..n), 1.0);
                    }
                    Group::from_map(map)
                })
                .collect()
        }
    })
}

pub fn generate(spec: &GenSpec) -> Result<Instance> {
    if spec.n == 0 {
        return Err(Error::InvalidParameter("need at least one client".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let anchors = match spec.layout {
        Layout::Gaussian {
            dim,
            clusters,
            spread,
            ..
        } => {
            if clusters == 0 {
                return Err(Error::InvalidParameter("need at least one cluster".into()));
            }
            uniform_cloud(&mut rng, clusters, dim, spread)
        }
        _ => Vec::new(),
    };
    let points = sample_coords(&mut rng, &spec.layout, spec.n, &anchors)?;
    let extra = match spec.facilities {
        FacilityMode::SameAsPoints => Vec::new(),
        FacilityMode::Separate(m) => sample_coords(&mut rng, &spec.layout, m, &anchors)?,
    };
    let groups = make_groups(&mut rng, spec.groups, spec.n)?;

    if let Layout::Matrix { .. } = spec.layout {
        let all: Vec<&Vec<f64>> = points.iter().chain(&extra).collect();
        let d = all
            .iter()
            .map(|a| all.iter().map(|b| l2(a, b)).collect())
            .collect();
        let metric = MetricSpace::matrix(d, false)?;
        let sites: Vec<Site> = (0..spec.n).map(Site::Index).collect();
        let facilities = match spec.facilities {
            FacilityMode::SameAsPoints => Facilities::SameAsPoints,
            FacilityMode::Separate(m) => {
                Facilities::Sites((spec.n..spec.n + m).map(Site::Index).collect())
            }
        };
        return Instance::new(metric, sites, facilities, spec.k, spec.z, groups);
    }
    let metric = MetricSpace::lq(spec.q)?;
    let facilities = match spec.facilities {
        FacilityMode::SameAsPoints => Facilities::SameAsPoints,
        FacilityMode::Separate(_) => {
            Facilities::Sites(extra.into_iter().map(Site::Coords).collect())
        }
    };
    Instance::new(
        metric,
        points.into_iter().map(Site::Coords).collect(),
        facilities,
        spec.k,
        spec.z,
        groups,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        let mut spec = GenSpec::new(Layout::Cube { dim: 3, side: 1.0 }, 20, 2, 1, 9);
        spec.groups = GroupMode::Random {
            count: 3,
            max_weight: 4.0,
        };
        spec.facilities = FacilityMode::Separate(6);
        assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
        let mut other = spec.clone();
        other.seed = 10;
        assert_ne!(generate(&spec).unwrap(), generate(&other).unwrap());
    }

    #[test]
    fn zero_variance_mixture_is_colocated() {
        let spec = GenSpec::new(
            Layout::Gaussian {
                dim: 2,
                clusters: 2,
                sigma: 0.0,
                spread: 10.0,
            },
            12,
            2,
            2,
            3,
        );
        let inst = generate(&spec).unwrap();
        let mut locations: Vec<Vec<f64>> = inst
            .points()
            .iter()
            .map(|s| s.coords().unwrap().to_vec())
            .collect();
        locations.sort_by(|a, b| a.partial_cmp(b).unwrap());
        locations.dedup();
        assert!(locations.len() <= 2);
    }

    #[test]
    fn matrix_and_partition() {
        let mut spec = GenSpec::new(Layout::Matrix { side: 5.0 }, 9, 2, 1, 4);
        spec.facilities = FacilityMode::Separate(4);
        spec.groups = GroupMode::Partition(3);
        let inst = generate(&spec).unwrap();
        assert_eq!(inst.num_facilities(), 4);
        assert_eq!(inst.groups().len(), 3);
        assert!(inst.groups().iter().all(|g| g.entries().len() == 3));
    }
}
