use anyhow::Context;
use robustkz::coreset::{build_coreset, coreset_error_report, coreset_instance};
use robustkz::euclid::{check_assignment_lemma, check_projection_lemma};
use robustkz::hardness::verify_gap;
use robustkz::io::load_instance_with;
use robustkz::metric::check_ball_decompositions;
use robustkz::oracle::{enumerate_group_costs, exact_solve};
use serde_json::{json, Value};

use crate::args::{CheckArgs, CheckKind};
use crate::emit;
use crate::gen::build_gadget;
use crate::solve::seed_solution;

const REL_TOL: f64 = 1e-9;

fn coreset(a: &CheckArgs) -> anyhow::Result<Value> {
    let path = a
        .instance
        .as_ref()
        .context("coreset check needs --instance")?;
    let inst = load_instance_with(path, a.seed_args.trusted)
        .with_context(|| format!("loading {}", path.display()))?;
    let budget = a.seed_args.budget;
    let b = seed_solution(&inst, &a.seed_args)?;
    let cs = build_coreset(&inst, &b, a.eps)?;
    let reduced = coreset_instance(&cs, &inst)?;
    let opt = exact_solve(&inst, budget)?.cost;
    let original = enumerate_group_costs(&inst, budget)?;
    let shrunk = enumerate_group_costs(&reduced, budget)?;
    let eps = a.eps;
    let mut lower = 0u64;
    let mut upper = 0u64;
    let mut parts = 0u64;
    let mut first_failure = Value::Null;
    for ((x, before), (_, after)) in original.iter().zip(&shrunk) {
        let top = before.iter().copied().fold(0.0, f64::max);
        let report = coreset_error_report(&inst, &cs, x)?;
        for (g, (&c, &c2)) in before.iter().zip(after).enumerate() {
            let lo_bad = (1.0 - eps) * c > c2 * (1.0 + REL_TOL);
            let hi_bad = c2 > (1.0 + eps) * top * (1.0 + REL_TOL);
            let e = &report[g];
            let slack = 1.0 + REL_TOL;
            let part_bad = e.near > eps / 3.0 * opt * slack
                || e.bicriteria_side > eps / 3.0 * opt * slack
                || e.solution_side > eps / 3.0 * c * slack;
            lower += u64::from(lo_bad);
            upper += u64::from(hi_bad);
            parts += u64::from(part_bad);
            if (lo_bad || hi_bad || part_bad) && first_failure.is_null() {
                first_failure = json!({"centers": x, "group": g, "cost": c, "coreset_cost": c2});
            }
        }
    }
    Ok(json!({
        "check": "coreset",
        "eps": eps,
        "points": inst.num_points(),
        "coreset_points": cs.len(),
        "subsets": original.len(),
        "lower_violations": lower,
        "upper_violations": upper,
        "error_bound_violations": parts,
        "first_failure": first_failure,
        "passed": lower + upper + parts == 0,
    }))
}

pub fn run(a: &CheckArgs) -> anyhow::Result<bool> {
    let report = match a.kind {
        CheckKind::Coreset => coreset(a)?,
        CheckKind::ProjectionLemma => {
            serde_json::to_value(check_projection_lemma(a.samples, &a.dims, a.seed)?)?
        }
        CheckKind::AssignmentLemma => serde_json::to_value(check_assignment_lemma(
            a.samples, &a.dims, a.seed, a.alpha, a.beta0,
        )?)?,
        CheckKind::GadgetGap => {
            let (graph, code, gadget) = build_gadget(&a.gadget, a.k, a.q, a.seed)?;
            let r = verify_gap(&gadget, &graph, &code, a.seed_args.budget)?;
            let mut v = serde_json::to_value(&r)?;
            v["passed"] = json!(r.gap_respected);
            v["t"] = json!(code.t);
            v["q"] = json!(a.q);
            v
        }
        CheckKind::EpsNet => serde_json::to_value(check_ball_decompositions(a.samples, a.seed)?)?,
    };
    let passed = report["passed"].as_bool().unwrap_or(false);
    emit(&report, a.out.as_deref())?;
    Ok(passed)
}
