//! Leader-guessing search and the full approximation pipeline.
//!
//! For each leader `ℓ` (a client) and radius `λ` from a geometric grid, the
//! facilities in `ball(ℓ, λ)` are carved into sub-balls of radius
//! `(ε/(20z)) λ` and the lowest-index facility of each sub-ball forms the
//! candidate set `T(ℓ, λ)`. The search tries every tuple in
//! `T(ℓ_1, λ_1) × … × T(ℓ_k, λ_k)` over all leader and radius tuples.
//!
//! Leaders and radii are chosen independently per coordinate, so the union
//! of those products is exactly `U^k` with `U = ⋃ T(ℓ, λ)`. The search
//! therefore evaluates the `k`-subsets of `U` once each, which finds the same
//! minimum as the literal enumeration. The literal tuple count is still
//! reported.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::bicriteria::{bicriteria_exact, bicriteria_greedy, AlphaMode, BicriteriaSolution};
use crate::coreset::{build_coreset, coreset_instance};
use crate::error::{Error, Result};
use crate::instance::{Instance, Solution};
use crate::metric::greedy_net;
use crate::oracle::{binomial, search_subsets, DEFAULT_BUDGET};

pub const DEFAULT_SEARCH_BUDGET: u128 = 100_000_000;

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "eps must be positive, got {eps}"
        )));
    }
    Ok(())
}

/// Powers `d_min · (1 + ε/(10z))^i` from the smallest positive client–facility
/// distance up to and including the first value `≥` the largest one.
/// All-zero distances give `[0.0]`.
pub fn radii_grid(inst: &Instance, eps: f64) -> Result<Vec<f64>> {
    check_eps(eps)?;
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for p in 0..inst.num_points() {
        for f in 0..inst.num_facilities() {
            let d = inst.dist(p, f);
            if d > 0.0 {
                lo = lo.min(d);
                hi = hi.max(d);
            }
        }
    }
    if hi == 0.0 {
        return Ok(vec![0.0]);
    }
    let step = 1.0 + eps / (10.0 * inst.z() as f64);
    let mut grid = Vec::new();
    let mut i = 0i32;
    loop {
        let v = lo * step.powi(i);
        grid.push(v);
        if v >= hi {
            break;
        }
        i += 1;
    }
    Ok(grid)
}

/// A leader tuple with one radius per leader.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LeaderGuess {
    pub leaders: Vec<usize>,
    pub radii: Vec<f64>,
}

struct FacilityTable {
    n: usize,
    d: Vec<f64>,
}

impl FacilityTable {
    fn new(inst: &Instance) -> Self {
        let n = inst.num_facilities();
        let mut d = vec![0.0; n * n];
        for a in 0..n {
            for b in (a + 1)..n {
                let x = inst.facility_dist(a, b);
                d[a * n + b] = x;
                d[b * n + a] = x;
            }
        }
        Self { n, d }
    }

    fn get(&self, a: usize, b: usize) -> f64 {
        self.d[a * self.n + b]
    }
}

fn candidates_with(
    inst: &Instance,
    table: &FacilityTable,
    leader: usize,
    lambda: f64,
    eps: f64,
) -> Vec<usize> {
    let inside: Vec<usize> = (0..inst.num_facilities())
        .filter(|&f| inst.dist(leader, f) <= lambda)
        .collect();
    if inside.is_empty() {
        return inside;
    }
    let rho = eps / (20.0 * inst.z() as f64) * lambda;
    let net = greedy_net(&inside, rho, |a, b| table.get(a, b));
    // One facility per sub-ball: the lowest-index member assigned to it.
    let mut reps: Vec<Option<usize>> = vec![None; net.len()];
    for &f in &inside {
        let mut best = (0, f64::INFINITY);
        for (c, &center) in net.iter().enumerate() {
            let d = table.get(f, center);
            if d < best.1 {
                best = (c, d);
            }
        }
        reps[best.0].get_or_insert(f);
    }
    let mut out: Vec<usize> = reps.into_iter().flatten().collect();
    out.sort_unstable();
    out
}

/// `T(ℓ, λ)`: lowest-index facility of each sub-ball of `ball(ℓ, λ)`, in
/// ascending order. `λ = 0` keeps one facility co-located with the leader.
pub fn candidate_set(inst: &Instance, leader: usize, lambda: f64, eps: f64) -> Result<Vec<usize>> {
    check_eps(eps)?;
    if leader >= inst.num_points() {
        return Err(Error::IndexOutOfRange {
            what: "points",
            index: leader,
            len: inst.num_points(),
        });
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "radius must be finite and >= 0, got {lambda}"
        )));
    }
    Ok(candidates_with(
        inst,
        &FacilityTable::new(inst),
        leader,
        lambda,
        eps,
    ))
}

/// Best tuple in `T_1 × … × T_k` for one guess, or `None` when some `T_i`
/// is empty.
pub fn evaluate_guess(inst: &Instance, guess: &LeaderGuess, eps: f64) -> Result<Option<Solution>> {
    if guess.leaders.len() != guess.radii.len() || guess.leaders.is_empty() {
        return Err(Error::InvalidParameter(
            "a guess needs one radius per leader".into(),
        ));
    }
    let sets = guess
        .leaders
        .iter()
        .zip(&guess.radii)
        .map(|(&l, &r)| candidate_set(inst, l, r, eps))
        .collect::<Result<Vec<_>>>()?;
    if sets.iter().any(Vec::is_empty) {
        return Ok(None);
    }
    let mut best: Option<Solution> = None;
    let mut idx = vec![0usize; sets.len()];
    loop {
        let x: Vec<usize> = idx.iter().zip(&sets).map(|(&i, s)| s[i]).collect();
        let s = Solution::evaluate(inst, &x)?;
        if best
            .as_ref()
            .is_none_or(|b| s.cost < b.cost || (s.cost == b.cost && s.centers < b.centers))
        {
            best = Some(s);
        }
        let mut pos = 0;
        while pos < idx.len() {
            idx[pos] += 1;
            if idx[pos] < sets[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
        if pos == idx.len() {
            break;
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, Serialize)]
pub struct LeaderSearch {
    pub solution: Solution,
    /// `false` when the budget cut the search short.
    pub certified: bool,
    /// Size of the literal leader × radius × candidate enumeration.
    pub tuples_enumerated: u128,
    /// Distinct center sets actually evaluated.
    pub subsets_evaluated: u128,
    pub grid_len: usize,
    /// `|⋃ T(ℓ, λ)|`.
    pub candidates: usize,
}

/// Best solution over every leader/radius guess. At most `budget` center
/// sets are evaluated; past that the best so far is returned uncertified.
pub fn leader_search(inst: &Instance, eps: f64, budget: u128) -> Result<LeaderSearch> {
    let grid = radii_grid(inst, eps)?;
    let table = FacilityTable::new(inst);
    let mut radii = grid.clone();
    if radii[0] != 0.0 {
        radii.insert(0, 0.0);
    }
    let per_leader: Vec<(BTreeSet<usize>, u128)> = (0..inst.num_points())
        .into_par_iter()
        .map(|l| {
            let mut seen = BTreeSet::new();
            let mut total: u128 = 0;
            for &r in &radii {
                let t = candidates_with(inst, &table, l, r, eps);
                total += t.len() as u128;
                seen.extend(t);
            }
            (seen, total)
        })
        .collect();
    let mut union = BTreeSet::new();
    let mut per_coordinate: u128 = 0;
    for (s, t) in per_leader {
        union.extend(s);
        per_coordinate = per_coordinate.saturating_add(t);
    }
    let tuples_enumerated = (0..inst.k()).fold(1u128, |acc, _| acc.saturating_mul(per_coordinate));

    let cands: Vec<usize> = union.into_iter().collect();
    let needed = binomial(cands.len(), inst.k().min(cands.len())).unwrap_or(u128::MAX);
    let search = search_subsets(inst, &cands, budget.max(1))?;
    if needed > budget {
        log::warn!("leader search budget {budget} below the {needed} candidate sets; result is uncertified");
    }
    Ok(LeaderSearch {
        solution: search.solution,
        certified: search.complete,
        tuples_enumerated,
        subsets_evaluated: search.evaluated,
        grid_len: grid.len(),
        candidates: cands.len(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BicriteriaChoice {
    /// Oracle optimum when affordable, otherwise greedy with β = 2.
    Auto,
    Exact,
    Greedy,
}

#[derive(Clone, Debug)]
pub struct EpasOptions {
    pub bicriteria: BicriteriaChoice,
    pub greedy_beta: f64,
    pub assume_alpha: Option<f64>,
    /// Cap on the oracle enumeration used for the bicriteria seed.
    pub oracle_budget: u128,
    /// Cap on center sets evaluated by the leader search.
    pub search_budget: u128,
}

impl Default for EpasOptions {
    fn default() -> Self {
        Self {
            bicriteria: BicriteriaChoice::Auto,
            greedy_beta: 2.0,
            assume_alpha: None,
            oracle_budget: DEFAULT_BUDGET,
            search_budget: DEFAULT_SEARCH_BUDGET,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EpasResult {
    /// Centers with their cost on the input instance.
    pub solution: Solution,
    pub bicriteria: BicriteriaSolution,
    pub coreset_size: usize,
    pub search: LeaderSearch,
    /// `(1 + ε/10)² (1 + 2ε/10)`.
    pub ratio_bound: f64,
    pub certified: bool,
}

pub fn epas_ratio_bound(eps: f64) -> f64 {
    let e = eps / 10.0;
    (1.0 + e) * (1.0 + e) * (1.0 + 2.0 * e)
}

pub fn choose_bicriteria(inst: &Instance, opts: &EpasOptions) -> Result<BicriteriaSolution> {
    let affordable =
        binomial(inst.num_facilities(), inst.k()).is_some_and(|c| c <= opts.oracle_budget);
    match opts.bicriteria {
        BicriteriaChoice::Exact => bicriteria_exact(inst, opts.oracle_budget),
        BicriteriaChoice::Auto if affordable => bicriteria_exact(inst, opts.oracle_budget),
        BicriteriaChoice::Auto | BicriteriaChoice::Greedy => {
            // Never ask for more centers than there are facilities.
            let beta = opts
                .greedy_beta
                .min(inst.num_facilities() as f64 / inst.k() as f64)
                .max(1.0);
            bicriteria_greedy(inst, beta, opts.assume_alpha, opts.oracle_budget)
        }
    }
}

/// Coreset at `ε/10`, leader search at `ε/10` on the coreset, and the
/// returned centers re-evaluated on `inst`.
pub fn epas_solve(inst: &Instance, eps: f64, opts: &EpasOptions) -> Result<EpasResult> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "eps must lie in (0, 1), got {eps}"
        )));
    }
    let bic = choose_bicriteria(inst, opts)?;
    if bic.alpha_mode == AlphaMode::Unknown {
        return Err(Error::InvalidParameter(
            "bicriteria ratio unknown: the oracle is over budget and no alpha was assumed".into(),
        ));
    }
    let cs = build_coreset(inst, &bic, eps / 10.0)?;
    let reduced = coreset_instance(&cs, inst)?;
    let search = leader_search(&reduced, eps / 10.0, opts.search_budget)?;
    let solution = Solution::evaluate(inst, &search.solution.centers)?;
    Ok(EpasResult {
        solution,
        coreset_size: cs.len(),
        certified: search.certified,
        bicriteria: bic,
        search,
        ratio_bound: epas_ratio_bound(eps),
    })
}
