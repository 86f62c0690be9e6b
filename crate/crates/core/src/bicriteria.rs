//! (α, β)-bicriteria seeds: at most βk centers whose cost is at most α·OPT.
//!
//! Two providers are available. `bicriteria_exact` returns the optimum
//! (α = β = 1) through the oracle. `bicriteria_greedy` runs a farthest-point
//! traversal on the weighted objective and certifies α with the oracle when
//! the enumeration is affordable.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::oracle::{binomial, exact_solve};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlphaMode {
    CertifiedByOracle,
    Configured,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BicriteriaSolution {
    pub centers: Vec<usize>,
    pub beta: f64,
    pub alpha: f64,
    pub alpha_mode: AlphaMode,
}

impl BicriteriaSolution {
    /// Wraps an arbitrary center set with a caller-supplied α.
    pub fn configured(inst: &Instance, mut centers: Vec<usize>, alpha: f64) -> Result<Self> {
        centers.sort_unstable();
        centers.dedup();
        if centers.is_empty() {
            return Err(Error::Empty("bicriteria center set"));
        }
        if !(alpha.is_finite() && alpha >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must be finite and >= 1, got {alpha}"
            )));
        }
        Ok(Self {
            beta: centers.len() as f64 / inst.k() as f64,
            centers,
            alpha,
            alpha_mode: AlphaMode::Configured,
        })
    }
}

pub fn bicriteria_exact(inst: &Instance, budget: u128) -> Result<BicriteriaSolution> {
    let opt = exact_solve(inst, budget)?;
    Ok(BicriteriaSolution {
        beta: opt.centers.len() as f64 / inst.k() as f64,
        centers: opt.centers,
        alpha: 1.0,
        alpha_mode: AlphaMode::CertifiedByOracle,
    })
}

/// `cost(B) / OPT`, with `0/0 = 1`.
pub fn certify_alpha(inst: &Instance, centers: &[usize], budget: u128) -> Result<f64> {
    let (cost, _) = inst.solution_cost(centers)?;
    let opt = exact_solve(inst, budget)?.cost;
    if opt == 0.0 {
        return if cost == 0.0 {
            Ok(1.0)
        } else {
            Err(Error::InfiniteRatio(cost))
        };
    }
    Ok(cost / opt)
}

/// Farthest-point traversal opening `⌊target_beta · k⌋` facilities.
///
/// Starts at the facility nearest the heaviest client, then repeatedly opens
/// the unopened facility nearest the client maximizing
/// `max_w w[p] · δ(p, B)^z`. Once every weighted client is served at
/// distance 0 the remaining slots take the lowest unopened indices.
///
/// α is certified with the oracle when `C(|F|, k) ≤ budget`, otherwise
/// `assume_alpha` is used (mode `Configured`) or α is left unknown (NaN).
pub fn bicriteria_greedy(
    inst: &Instance,
    target_beta: f64,
    assume_alpha: Option<f64>,
    budget: u128,
) -> Result<BicriteriaSolution> {
    if !(target_beta.is_finite() && target_beta >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "target beta must be >= 1, got {target_beta}"
        )));
    }
    let count = (target_beta * inst.k() as f64).floor() as usize;
    let nf = inst.num_facilities();
    if count > nf {
        return Err(Error::InvalidParameter(format!(
            "beta * k = {count} exceeds the {nf} facilities"
        )));
    }
    let centers = greedy_centers(inst, count);

    let affordable = binomial(nf, inst.k()).is_some_and(|c| c <= budget);
    let (alpha, alpha_mode) = if affordable {
        (
            certify_alpha(inst, &centers, budget)?.max(1.0),
            AlphaMode::CertifiedByOracle,
        )
    } else if let Some(a) = assume_alpha {
        if !(a.is_finite() && a >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "assumed alpha must be >= 1, got {a}"
            )));
        }
        (a, AlphaMode::Configured)
    } else {
        (f64::NAN, AlphaMode::Unknown)
    };
    Ok(BicriteriaSolution {
        beta: centers.len() as f64 / inst.k() as f64,
        centers,
        alpha,
        alpha_mode,
    })
}

fn greedy_centers(inst: &Instance, count: usize) -> Vec<usize> {
    let n = inst.num_points();
    let nf = inst.num_facilities();
    let mut max_weight = vec![0.0f64; n];
    for g in inst.groups() {
        for &(p, w) in g.entries() {
            max_weight[p] = max_weight[p].max(w);
        }
    }
    let mut open = vec![false; nf];
    let mut centers = Vec::with_capacity(count);
    let mut served = vec![f64::INFINITY; n];

    let nearest_closed = |p: usize, open: &[bool]| -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for f in (0..nf).filter(|&f| !open[f]) {
            let d = inst.dist(p, f);
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((f, d));
            }
        }
        best.map(|(f, _)| f)
    };

    let mut heaviest = 0;
    for p in 1..n {
        if max_weight[p] > max_weight[heaviest] {
            heaviest = p;
        }
    }
    let mut target = Some(heaviest);
    while centers.len() < count {
        let f = match target.and_then(|p| nearest_closed(p, &open)) {
            Some(f) => f,
            None => (0..nf).find(|&f| !open[f]).expect("count <= |F|"),
        };
        open[f] = true;
        centers.push(f);
        for (p, s) in served.iter_mut().enumerate() {
            *s = s.min(inst.dist_pow(p, f));
        }
        let mut best: Option<(usize, f64)> = None;
        for p in 0..n {
            let score = max_weight[p] * served[p];
            if score > 0.0 && best.is_none_or(|(_, b)| score > b) {
                best = Some((p, score));
            }
        }
        target = best.map(|(p, _)| p);
    }
    centers.sort_unstable();
    centers
}
