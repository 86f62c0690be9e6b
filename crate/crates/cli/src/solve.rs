use std::time::Instant;

use anyhow::Context;

use robustkz::bicriteria::{AlphaMode, BicriteriaSolution};
use robustkz::coreset::build_coreset;
use robustkz::epas::{choose_bicriteria, epas_solve, BicriteriaChoice, EpasOptions};
use robustkz::euclid::{fpt_solve, EPS0};
use robustkz::io::{instance_digest, load_instance_with};
use robustkz::oracle::{binomial, exact_solve};
use robustkz::{Instance, Solution};
use serde_json::{json, Value};

use crate::args::{Algo, BicriteriaArg, CoresetArgs, SeedArgs, SolveArgs};
use crate::{emit, EXIT_BUDGET};

fn saturate(x: u128) -> u64 {
    u64::try_from(x).unwrap_or(u64::MAX)
}

pub(crate) fn epas_options(s: &SeedArgs, search_budget: u128) -> EpasOptions {
    EpasOptions {
        bicriteria: match s.bicriteria {
            BicriteriaArg::Auto => BicriteriaChoice::Auto,
            BicriteriaArg::Exact => BicriteriaChoice::Exact,
            BicriteriaArg::Greedy => BicriteriaChoice::Greedy,
        },
        greedy_beta: s.beta,
        assume_alpha: s.assume_alpha,
        oracle_budget: s.budget,
        search_budget,
    }
}

pub(crate) fn seed_solution(inst: &Instance, s: &SeedArgs) -> anyhow::Result<BicriteriaSolution> {
    Ok(choose_bicriteria(inst, &epas_options(s, 0))?)
}

fn bicriteria_value(b: &BicriteriaSolution) -> Value {
    json!({
        "centers": b.centers,
        "alpha": b.alpha,
        "beta": b.beta,
        "alpha_mode": serde_json::to_value(b.alpha_mode).expect("enum serializes"),
    })
}

struct Outcome {
    solution: Solution,
    ratio_bound: Value,
    certified: bool,
    tuples: u128,
    subsets: u128,
    extra: Value,
}

fn solve(inst: &Instance, a: &SolveArgs) -> anyhow::Result<Outcome> {
    let s = &a.seed_args;
    Ok(match a.algo {
        Algo::Exact => {
            let sol = exact_solve(inst, s.budget)?;
            let n = binomial(inst.num_facilities(), inst.k()).unwrap_or(u128::MAX);
            Outcome {
                solution: sol,
                ratio_bound: json!(1.0),
                certified: true,
                tuples: n,
                subsets: n,
                extra: json!({}),
            }
        }
        Algo::Bicriteria => {
            let b = seed_solution(inst, s)?;
            Outcome {
                solution: Solution::evaluate(inst, &b.centers)?,
                ratio_bound: json!(b.alpha),
                certified: b.alpha_mode == AlphaMode::CertifiedByOracle,
                tuples: 0,
                subsets: 0,
                extra: json!({ "bicriteria": bicriteria_value(&b) }),
            }
        }
        Algo::Epas => {
            let r = epas_solve(inst, a.eps, &epas_options(s, a.search_budget))?;
            Outcome {
                solution: r.solution,
                ratio_bound: json!(r.ratio_bound),
                certified: r.certified,
                tuples: r.search.tuples_enumerated,
                subsets: r.search.subsets_evaluated,
                extra: json!({
                    "bicriteria": bicriteria_value(&r.bicriteria),
                    "coreset_size": r.coreset_size,
                    "grid_len": r.search.grid_len,
                    "candidates": r.search.candidates,
                    "eps": a.eps,
                }),
            }
        }
        Algo::FptEuclid => {
            let b = seed_solution(inst, s)?;
            let r = fpt_solve(inst, &b, s.budget)?;
            Outcome {
                solution: Solution::evaluate(inst, &r.solution.centers)?,
                ratio_bound: json!(r.ratio_bound),
                // The closure bound needs a (1 + ε₀)-approximate seed.
                certified: b.alpha_mode == AlphaMode::CertifiedByOracle && b.alpha <= 1.0 + EPS0,
                tuples: r.subsets_evaluated,
                subsets: r.subsets_evaluated,
                extra: json!({
                    "bicriteria": bicriteria_value(&b),
                    "closure": r.closure.members,
                }),
            }
        }
    })
}

fn algo_name(a: Algo) -> &'static str {
    match a {
        Algo::Exact => "exact",
        Algo::Bicriteria => "bicriteria",
        Algo::Epas => "epas",
        Algo::FptEuclid => "fpt-euclid",
    }
}

pub fn run(a: &SolveArgs) -> anyhow::Result<u8> {
    let inst = load_instance_with(&a.instance, a.seed_args.trusted)
        .with_context(|| format!("loading {}", a.instance.display()))?;
    let start = Instant::now();
    let out = solve(&inst, a)?;
    let wall_ms = if a.no_timing {
        0
    } else {
        start.elapsed().as_millis() as u64
    };
    // Recompute from the centers so the reported cost is never stale.
    let solution = Solution::evaluate(&inst, &out.solution.centers)?;
    let mut result = json!({
        "command": "solve",
        "params": {
            "eps": a.eps,
            "budget": saturate(a.seed_args.budget),
            "search_budget": saturate(a.search_budget),
            "bicriteria": format!("{:?}", a.seed_args.bicriteria).to_lowercase(),
            "beta": a.seed_args.beta,
            "assume_alpha": a.seed_args.assume_alpha,
        },
        "instance": instance_digest(&inst),
        "algo": algo_name(a.algo),
        "solution": {
            "centers": solution.centers,
            "cost": solution.cost,
            "group_costs": solution.group_costs,
        },
        "certification": {
            "ratio_bound": out.ratio_bound,
            "certified": out.certified,
        },
        "counters": {
            "tuples_enumerated": saturate(out.tuples),
            "subsets_evaluated": saturate(out.subsets),
            "wall_ms": wall_ms,
        },
        "seed": a.seed,
    });
    if let Value::Object(extra) = out.extra {
        if !extra.is_empty() {
            result["details"] = Value::Object(extra);
        }
    }
    emit(&result, a.out.as_deref())?;
    Ok(if a.algo == Algo::Epas && !out.certified {
        EXIT_BUDGET
    } else {
        0
    })
}

pub fn coreset_build(a: &CoresetArgs) -> anyhow::Result<()> {
    let inst = load_instance_with(&a.instance, a.seed_args.trusted)
        .with_context(|| format!("loading {}", a.instance.display()))?;
    let b = seed_solution(&inst, &a.seed_args)?;
    let cs = build_coreset(&inst, &b, a.eps)?;
    let v = cs.to_value(&inst)?;
    emit(&v, a.out.as_deref())
}
