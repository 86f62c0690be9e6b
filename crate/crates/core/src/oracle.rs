//! Exact brute-force solving by subset enumeration.
//!
//! Subsets are visited in colexicographic order and split into blocks by
//! their largest element; blocks run in parallel, each with a local
//! incumbent. A subset is abandoned as soon as one group's cost exceeds the
//! incumbent. The winner is the minimum under (cost, index set), so the
//! answer does not depend on the number of workers.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::instance::{Instance, Solution};

pub const DEFAULT_BUDGET: u128 = 10_000_000;

/// `C(n, k)`, or `None` on overflow.
pub fn binomial(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// `k`-subsets of `0..n` in colexicographic order.
#[derive(Clone, Debug)]
pub struct Colex {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Colex {
    pub fn new(n: usize, k: usize) -> Self {
        let current = (k <= n).then(|| (0..k).collect());
        Self { n, current }
    }
}

impl Iterator for Colex {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let c = self.current.as_mut().expect("checked above");
        let k = c.len();
        // Lowest position that can move up without colliding with its successor.
        let mut i = 0;
        loop {
            if i == k {
                self.current = None;
                break;
            }
            let limit = if i + 1 < k { c[i + 1] } else { self.n };
            if c[i] + 1 < limit {
                c[i] += 1;
                for (j, slot) in c.iter_mut().enumerate().take(i) {
                    *slot = j;
                }
                break;
            }
            i += 1;
        }
        Some(out)
    }
}

fn better(a: &(f64, Vec<usize>), b: &(f64, Vec<usize>)) -> bool {
    match a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal) {
        Ordering::Less => true,
        Ordering::Greater => false,
        Ordering::Equal => a.1 < b.1,
    }
}

/// Outcome of a (possibly truncated) subset search.
#[derive(Clone, Debug)]
pub struct SubsetSearch {
    pub solution: Solution,
    pub evaluated: u128,
    pub complete: bool,
}

/// Best `min(k, |candidates|)`-subset of `candidates` (facility indices).
/// At most `limit` subsets are visited, always the colex-first ones;
/// `complete` reports whether the search was exhaustive.
pub fn search_subsets(inst: &Instance, candidates: &[usize], limit: u128) -> Result<SubsetSearch> {
    let mut cands = candidates.to_vec();
    cands.sort_unstable();
    cands.dedup();
    if cands.is_empty() {
        return Err(Error::Empty("candidate facility set"));
    }
    if let Some(&f) = cands.iter().find(|&&f| f >= inst.num_facilities()) {
        return Err(Error::IndexOutOfRange {
            what: "facilities",
            index: f,
            len: inst.num_facilities(),
        });
    }
    let n = cands.len();
    let k = inst.k().min(n);
    let total = binomial(n, k).unwrap_or(u128::MAX);

    // Block m holds the subsets whose largest position is m: C(m, k-1) of them.
    let mut blocks = Vec::new();
    let mut remaining = limit;
    for m in (k - 1)..n {
        if remaining == 0 {
            break;
        }
        let size = binomial(m, k - 1).unwrap_or(u128::MAX);
        let take = size.min(remaining);
        remaining -= take;
        blocks.push((m, take));
    }
    let evaluated: u128 = blocks.iter().map(|&(_, t)| t).sum();

    let results: Vec<Option<(f64, Vec<usize>)>> = blocks
        .par_iter()
        .map(|&(m, take)| {
            let mut best: Option<(f64, Vec<usize>)> = None;
            let mut scratch = Vec::new();
            let mut set = vec![0usize; k];
            for head in Colex::new(m, k - 1).take(usize::try_from(take).unwrap_or(usize::MAX)) {
                for (slot, &pos) in set.iter_mut().zip(head.iter()) {
                    *slot = cands[pos];
                }
                set[k - 1] = cands[m];
                let bound = best.as_ref().map_or(f64::INFINITY, |b| b.0);
                if let Some(c) = inst.cost_bounded(&set, bound, &mut scratch) {
                    let cand = (c, set.clone());
                    if best.as_ref().is_none_or(|b| better(&cand, b)) {
                        best = Some(cand);
                    }
                }
            }
            best
        })
        .collect();

    let best = results
        .into_iter()
        .flatten()
        .reduce(|a, b| if better(&b, &a) { b } else { a })
        .ok_or(Error::Empty("subset search visited nothing"))?;
    Ok(SubsetSearch {
        solution: Solution::evaluate(inst, &best.1)?,
        evaluated,
        complete: evaluated == total,
    })
}

fn check_budget(inst: &Instance, budget: u128) -> Result<u128> {
    let needed = binomial(inst.num_facilities(), inst.k()).unwrap_or(u128::MAX);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    Ok(needed)
}

/// Optimal `k`-subset of the facilities; ties go to the lexicographically
/// smallest index set.
pub fn exact_solve(inst: &Instance, budget: u128) -> Result<Solution> {
    check_budget(inst, budget)?;
    let all: Vec<usize> = (0..inst.num_facilities()).collect();
    Ok(search_subsets(inst, &all, u128::MAX)?.solution)
}

/// Cost of every `k`-subset of the facilities.
pub fn enumerate_costs(inst: &Instance, budget: u128) -> Result<BTreeMap<Vec<usize>, f64>> {
    check_budget(inst, budget)?;
    let subsets: Vec<Vec<usize>> = Colex::new(inst.num_facilities(), inst.k()).collect();
    let costs: Vec<f64> = subsets
        .par_iter()
        .map(|x| inst.solution_cost(x).map(|(c, _)| c))
        .collect::<Result<_>>()?;
    Ok(subsets.into_iter().zip(costs).collect())
}

/// Every `k`-subset with its per-group cost vector.
pub fn enumerate_group_costs(inst: &Instance, budget: u128) -> Result<Vec<(Vec<usize>, Vec<f64>)>> {
    check_budget(inst, budget)?;
    let subsets: Vec<Vec<usize>> = Colex::new(inst.num_facilities(), inst.k()).collect();
    subsets
        .into_par_iter()
        .map(|x| inst.solution_cost(&x).map(|(_, per)| (x, per)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{Facilities, Group};
    use crate::metric::{MetricSpace, Site};

    fn line(
        points: &[f64],
        facilities: Option<&[f64]>,
        k: usize,
        z: u32,
        groups: Vec<Group>,
    ) -> Instance {
        let site = |&x: &f64| Site::Coords(vec![x]);
        let f = match facilities {
            Some(fs) => Facilities::Sites(fs.iter().map(site).collect()),
            None => Facilities::SameAsPoints,
        };
        Instance::new(
            MetricSpace::euclidean(),
            points.iter().map(site).collect(),
            f,
            k,
            z,
            groups,
        )
        .unwrap()
    }

    #[test]
    fn colex_order_and_count() {
        let all: Vec<_> = Colex::new(4, 2).collect();
        assert_eq!(
            all,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![1, 2],
                vec![0, 3],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        assert_eq!(Colex::new(7, 3).count() as u128, binomial(7, 3).unwrap());
        assert_eq!(
            Colex::new(3, 0).collect::<Vec<_>>(),
            vec![Vec::<usize>::new()]
        );
        assert_eq!(Colex::new(2, 3).count(), 0);
        assert_eq!(binomial(25, 5), Some(53130));
    }

    #[test]
    fn symmetric_line_ties_to_smallest() {
        let g = Group::from_subset(&[0, 1], None).unwrap();
        let inst = line(&[0.0, 2.0], None, 1, 1, vec![g]);
        let s = exact_solve(&inst, DEFAULT_BUDGET).unwrap();
        assert_eq!(s.centers, vec![0]);
        assert_eq!(s.cost, 2.0);
    }

    #[test]
    fn k_equals_facility_count() {
        let g = Group::from_subset(&[0, 1, 2], None).unwrap();
        let inst = line(&[0.0, 1.0, 5.0], Some(&[0.5, 4.0]), 2, 1, vec![g]);
        let s = exact_solve(&inst, DEFAULT_BUDGET).unwrap();
        assert_eq!(s.centers, vec![0, 1]);
        assert_eq!(s.cost, 0.5 + 0.5 + 1.0);
    }

    #[test]
    fn budget_error() {
        let g = Group::indicator(0);
        let inst = line(&[0.0, 1.0, 2.0, 3.0], None, 2, 1, vec![g]);
        assert!(matches!(
            exact_solve(&inst, 5),
            Err(Error::BudgetExceeded {
                needed: 6,
                budget: 5
            })
        ));
        assert!(exact_solve(&inst, 6).is_ok());
    }

    #[test]
    fn enumerate_matches_exact() {
        let g1 = Group::from_subset(&[0, 1], None).unwrap();
        let g2 = Group::from_subset(&[2], None).unwrap();
        let inst = line(&[0.0, 1.0, 3.0], None, 2, 2, vec![g1, g2]);
        let map = enumerate_costs(&inst, DEFAULT_BUDGET).unwrap();
        assert_eq!(map.len(), 3);
        let min = map.values().copied().fold(f64::INFINITY, f64::min);
        assert_eq!(min, exact_solve(&inst, DEFAULT_BUDGET).unwrap().cost);
    }

    #[test]
    fn truncated_search_reports_incomplete() {
        let g = Group::from_subset(&[0, 1, 2, 3], None).unwrap();
        let inst = line(&[0.0, 1.0, 2.0, 3.0], None, 2, 1, vec![g]);
        let all: Vec<usize> = (0..4).collect();
        let s = search_subsets(&inst, &all, 2).unwrap();
        assert!(!s.complete);
        assert_eq!(s.evaluated, 2);
        let full = search_subsets(&inst, &all, u128::MAX).unwrap();
        assert!(full.complete);
        assert_eq!(full.evaluated, 6);
    }
}
