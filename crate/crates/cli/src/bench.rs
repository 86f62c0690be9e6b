use std::time::Instant;

use robustkz::bicriteria::bicriteria_exact;
use robustkz::epas::{epas_solve, EpasOptions};
use robustkz::euclid::fpt_solve;
use robustkz::generate::{generate, FacilityMode, GenSpec, GroupMode, Layout};
use robustkz::oracle::{exact_solve, DEFAULT_BUDGET};
use serde::Serialize;

use crate::args::BenchArgs;

#[derive(Serialize)]
struct Row {
    n: usize,
    facilities: usize,
    k: usize,
    z: u32,
    seed: u64,
    algo: &'static str,
    cost: f64,
    ratio: f64,
    subsets_evaluated: u64,
    coreset_size: Option<usize>,
    wall_ms: u64,
}

pub fn run(a: &BenchArgs) -> anyhow::Result<()> {
    let mut out = csv::Writer::from_path(&a.out)?;
    for &n in &a.n {
        for seed in 0..a.seeds {
            let mut spec = GenSpec::new(
                Layout::Cube {
                    dim: a.dim,
                    side: 1.0,
                },
                n,
                a.k,
                a.z,
                seed,
            );
            spec.facilities = FacilityMode::Separate(a.facilities);
            spec.groups = GroupMode::Partition(2.min(n));
            let inst = generate(&spec)?;
            let ms = |t: Instant| {
                if a.no_timing {
                    0
                } else {
                    t.elapsed().as_millis() as u64
                }
            };
            let row = |algo, cost: f64, opt: f64, subsets: u128, coreset_size, wall_ms| Row {
                n,
                facilities: a.facilities,
                k: a.k,
                z: a.z,
                seed,
                algo,
                cost,
                ratio: if opt > 0.0 { cost / opt } else { 1.0 },
                subsets_evaluated: u64::try_from(subsets).unwrap_or(u64::MAX),
                coreset_size,
                wall_ms,
            };

            let t = Instant::now();
            let opt = exact_solve(&inst, DEFAULT_BUDGET)?;
            let subsets = robustkz::oracle::binomial(a.facilities, a.k).unwrap_or(u128::MAX);
            out.serialize(row("exact", opt.cost, opt.cost, subsets, None, ms(t)))?;

            let t = Instant::now();
            let r = epas_solve(&inst, a.eps, &EpasOptions::default())?;
            out.serialize(row(
                "epas",
                r.solution.cost,
                opt.cost,
                r.search.subsets_evaluated,
                Some(r.coreset_size),
                ms(t),
            ))?;

            let t = Instant::now();
            let b = bicriteria_exact(&inst, DEFAULT_BUDGET)?;
            let f = fpt_solve(&inst, &b, DEFAULT_BUDGET)?;
            out.serialize(row(
                "fpt-euclid",
                f.solution.cost,
                opt.cost,
                f.subsets_evaluated,
                None,
                ms(t),
            ))?;
        }
    }
    out.flush()?;
    Ok(())
}
