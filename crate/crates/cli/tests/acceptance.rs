//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Reference values come from brute-force code in this file
//! that works on raw coordinates rather than the library's cost routines.

use std::path::Path;
use std::process::Command;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use robustkz::bicriteria::{bicriteria_exact, bicriteria_greedy, AlphaMode};
use robustkz::coreset::build_coreset;
use robustkz::epas::{epas_solve, EpasOptions};
use robustkz::euclid::{
    check_assignment_lemma, claim_value, fpt_solve, projection_assign, LemmaConfig, ALPHA, BETA0,
    EPS0, GAMMA,
};
use robustkz::generate::{generate, FacilityMode, GenSpec, GroupMode, Layout};
use robustkz::hardness::{
    build_code, mcis_to_kcenter, verify_gap, CodeMode, GadgetFacilities, PartiteGraph,
};
use robustkz::metric::{ball_decompose, Ball, MetricSpace, Site};
use robustkz::oracle::DEFAULT_BUDGET;
use robustkz::{Facilities, Group, Instance};

const REL_TOL: f64 = 1e-9;

// ---------------------------------------------------------------------------
// Reference computations

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn lq(a: &[f64], b: &[f64], q: u32) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs().powi(q as i32))
        .sum::<f64>()
        .powf(1.0 / q as f64)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k.min(n), &mut Vec::new(), &mut out);
    out
}

/// Plain copy of an instance: coordinates, facility coordinates and weights.
struct Raw {
    points: Vec<Vec<f64>>,
    facilities: Vec<Vec<f64>>,
    groups: Vec<Vec<(usize, f64)>>,
    k: usize,
    z: u32,
}

impl Raw {
    fn of(inst: &Instance) -> Self {
        let coords = |s: &[Site]| {
            s.iter()
                .map(|x| x.coords().expect("coordinates").to_vec())
                .collect()
        };
        Raw {
            points: coords(inst.points()),
            facilities: coords(inst.facilities()),
            groups: inst.groups().iter().map(|g| g.entries().to_vec()).collect(),
            k: inst.k(),
            z: inst.z(),
        }
    }

    fn group_costs_with(&self, groups: &[Vec<(usize, f64)>], x: &[usize]) -> Vec<f64> {
        groups
            .iter()
            .map(|g| {
                g.iter()
                    .map(|&(p, w)| {
                        let d = x
                            .iter()
                            .map(|&f| euclid(&self.points[p], &self.facilities[f]))
                            .fold(f64::INFINITY, f64::min);
                        w * d.powi(self.z as i32)
                    })
                    .sum()
            })
            .collect()
    }

    fn cost(&self, x: &[usize]) -> f64 {
        self.group_costs_with(&self.groups, x)
            .into_iter()
            .fold(0.0, f64::max)
    }

    fn opt(&self) -> f64 {
        combinations(self.facilities.len(), self.k)
            .iter()
            .map(|x| self.cost(x))
            .fold(f64::INFINITY, f64::min)
    }
}

// ---------------------------------------------------------------------------
// Criteria

struct Outcome {
    passed: bool,
    detail: String,
}

fn coreset_guarantee() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut failures = Vec::new();
    let (mut instances, mut subsets, mut literal, mut shrunk) = (0, 0u64, 0u64, 0);
    let mut ratio_sum = 0.0;
    for seed in 0..60u64 {
        let n = rng.random_range(10..=40);
        let m = rng.random_range(5..=15);
        let k = rng.random_range(1..=3);
        let z = rng.random_range(1..=2);
        let eps = [0.2, 0.4][rng.random_range(0..2)];
        let sigma = [0.0, 1e-4, 1e-3, 1e-2][rng.random_range(0..4)];
        let mut spec = GenSpec::new(
            Layout::Gaussian {
                dim: rng.random_range(1..=3),
                clusters: rng.random_range(2..=4),
                sigma,
                spread: 10.0,
            },
            n,
            k,
            z,
            seed,
        );
        spec.facilities = FacilityMode::Separate(m);
        spec.groups = GroupMode::Random {
            count: rng.random_range(1..=3),
            max_weight: 4.0,
        };
        let inst = generate(&spec).expect("generator");
        let bic = bicriteria_exact(&inst, DEFAULT_BUDGET).expect("oracle seed");
        let cs = build_coreset(&inst, &bic, eps).expect("coreset");
        let raw = Raw::of(&inst);
        let opt = raw.opt();
        instances += 1;
        if cs.len() < n {
            shrunk += 1;
        }
        ratio_sum += cs.len() as f64 / n as f64;
        for x in combinations(m, k) {
            subsets += 1;
            let before = raw.group_costs_with(&raw.groups, &x);
            let after = raw.group_costs_with(
                &cs.groups
                    .iter()
                    .map(|g| g.entries().to_vec())
                    .collect::<Vec<_>>(),
                &x,
            );
            let top = before.iter().copied().fold(0.0, f64::max);
            for (g, (&c, &c2)) in before.iter().zip(&after).enumerate() {
                if (1.0 - eps) * c > c2 * (1.0 + REL_TOL)
                    || c2 > (1.0 + eps) * top * (1.0 + REL_TOL)
                {
                    failures.push(format!("seed {seed} X {x:?} group {g}: {c} -> {c2}"));
                }
                if c2 > (1.0 + eps) * opt * (1.0 + REL_TOL) {
                    literal += 1;
                }
            }
        }
    }
    println!(
        "  info: {instances} instances, {subsets} center sets, {shrunk} coresets smaller than the input, mean size ratio {:.3}",
        ratio_sum / instances as f64
    );
    println!(
        "  info: {literal} (X, group) pairs exceed (1+eps)*OPT, as expected for X far from optimal"
    );
    Outcome {
        passed: failures.is_empty() && instances >= 50 && shrunk > 0,
        detail: format!(
            "(1-eps)c(w,X) <= c(eta(w),X) <= (1+eps) max_w' c(w',X) on {instances} instances; {} violations{}",
            failures.len(),
            failures.first().map(|f| format!(", first: {f}")).unwrap_or_default()
        ),
    }
}

fn epas_certification() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    let mut count = 0;
    for seed in 0..60u64 {
        let eps = [0.3, 0.5][(seed % 2) as usize];
        let n = rng.random_range(6..=20);
        let m = rng.random_range(4..=10);
        let k = rng.random_range(1..=3);
        let z = rng.random_range(1..=2);
        let layout = if seed % 3 == 0 {
            Layout::Cube { dim: 2, side: 1.0 }
        } else {
            Layout::Gaussian {
                dim: 2,
                clusters: 3,
                sigma: 0.05,
                spread: 1.0,
            }
        };
        let mut spec = GenSpec::new(layout, n, k, z, 1000 + seed);
        spec.facilities = FacilityMode::Separate(m);
        spec.groups = GroupMode::Random {
            count: rng.random_range(1..=3),
            max_weight: 3.0,
        };
        let inst = generate(&spec).expect("generator");
        let r = epas_solve(&inst, eps, &EpasOptions::default()).expect("epas");
        let raw = Raw::of(&inst);
        let opt = raw.opt();
        let cost = raw.cost(&r.solution.centers);
        count += 1;
        let ratio = if opt > 0.0 { cost / opt } else { 1.0 };
        worst = worst.max(ratio);
        if !r.certified
            || cost > (1.0 + eps) * opt * (1.0 + REL_TOL)
            || (cost - r.solution.cost).abs() > 1e-9 * cost.max(1.0)
        {
            failures.push(format!("seed {seed}: cost {cost} opt {opt} eps {eps}"));
        }
    }
    Outcome {
        passed: failures.is_empty() && count >= 50,
        detail: format!(
            "epas cost <= (1+eps) OPT on {count} instances, worst ratio {worst:.6}; {} violations{}",
            failures.len(),
            failures.first().map(|f| format!(", first: {f}")).unwrap_or_default()
        ),
    }
}

fn projection_lemma() -> Outcome {
    let mut violations = 0;
    let mut worst = f64::NEG_INFINITY;
    let mut total = 0;
    for d in [1usize, 2, 3, 5, 10] {
        let mut rng = ChaCha8Rng::seed_from_u64(300 + d as u64);
        for _ in 0..1000 {
            let cloud = |rng: &mut ChaCha8Rng, n: usize| -> Vec<Vec<f64>> {
                (0..n)
                    .map(|_| (0..d).map(|_| rng.random_range(-2.0..2.0)).collect())
                    .collect()
            };
            let nb = rng.random_range(1..=6);
            let b = cloud(&mut rng, nb);
            let nx = rng.random_range(1..=4);
            let x = cloud(&mut rng, nx);
            let p = cloud(&mut rng, 1).remove(0);
            let sigma = projection_assign(&x, &b).expect("nonempty B");
            let lhs = sigma
                .iter()
                .map(|&s| euclid(&p, &b[s]))
                .fold(f64::INFINITY, f64::min);
            let d_x = x
                .iter()
                .map(|xi| euclid(&p, xi))
                .fold(f64::INFINITY, f64::min);
            let d_b = b
                .iter()
                .map(|bi| euclid(&p, bi))
                .fold(f64::INFINITY, f64::min);
            let excess = lhs - 2.0 * d_x - d_b;
            worst = worst.max(excess);
            if excess > 1e-12 {
                violations += 1;
            }
            total += 1;
        }
    }
    Outcome {
        passed: violations == 0,
        detail: format!("{total} configurations over d in {{1,2,3,5,10}}, {violations} violations, max excess {worst:.3e}"),
    }
}

/// Recomputes the ratio of a sampled configuration from its raw vectors.
fn recompute_ratio(cfg: &LemmaConfig) -> f64 {
    let o = &cfg.o;
    let b0 = &cfg.b[0];
    let mut facilities = vec![o.clone()];
    facilities.extend(cfg.b.iter().cloned());
    facilities.extend(cfg.extra_facilities.iter().cloned());
    let nearest_facility = |x: &[f64]| {
        facilities
            .iter()
            .min_by(|a, b| euclid(x, a).partial_cmp(&euclid(x, b)).unwrap())
            .unwrap()
            .clone()
    };
    let r = euclid(o, b0);
    let q: Vec<f64> = o.iter().zip(b0).map(|(a, b)| 2.0 * a - b).collect();
    let sigma = if cfg.b.iter().any(|bb| euclid(&q, bb) <= ALPHA * r) {
        let mut closure: Vec<Vec<f64>> = cfg.b.clone();
        for i in 0..cfg.b.len() {
            for j in i..cfg.b.len() {
                let mid: Vec<f64> = cfg.b[i]
                    .iter()
                    .zip(&cfg.b[j])
                    .map(|(a, b)| 0.5 * (a + b))
                    .collect();
                closure.push(nearest_facility(&mid));
            }
        }
        closure
            .into_iter()
            .min_by(|a, b| euclid(o, a).partial_cmp(&euclid(o, b)).unwrap())
            .unwrap()
    } else {
        b0.clone()
    };
    let d_b = cfg
        .b
        .iter()
        .map(|bb| euclid(&cfg.p, bb))
        .fold(f64::INFINITY, f64::min);
    euclid(&cfg.p, &sigma) / (2.0 * euclid(&cfg.p, o) + d_b)
}

fn assignment_lemma() -> Outcome {
    let report =
        check_assignment_lemma(120_000, &[2, 3, 5, 10], 404, ALPHA, BETA0).expect("checker");
    let mut consistent = true;
    for d in &report.dims {
        if let Some(w) = &d.worst {
            let r = recompute_ratio(w);
            if (r - w.ratio).abs() > 1e-12 {
                consistent = false;
                println!("  info: d={} reported {} recomputed {}", d.dim, w.ratio, r);
            }
        }
    }
    let bound = GAMMA + 1e-9;
    Outcome {
        passed: report.max_ratio <= bound && consistent && report.samples >= 100_000,
        detail: format!(
            "{} far configurations, max ratio {:.6} (bound {GAMMA}), per-dimension max {:?}",
            report.samples,
            report.max_ratio,
            report
                .dims
                .iter()
                .map(|d| (d.dim, (d.max_ratio * 1e6).round() / 1e6))
                .collect::<Vec<_>>()
        ),
    }
}

fn euclid_fpt() -> Outcome {
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for seed in 0..120u64 {
        let z = 1 + (seed % 2) as u32;
        let mut spec = GenSpec::new(Layout::Cube { dim: 5, side: 1.0 }, 15, 2, z, 5000 + seed);
        spec.facilities = FacilityMode::Separate(10);
        spec.groups = GroupMode::Partition(2);
        let inst = generate(&spec).expect("generator");
        let bic = bicriteria_greedy(&inst, 2.0, None, DEFAULT_BUDGET).expect("greedy seed");
        assert_eq!(bic.alpha_mode, AlphaMode::CertifiedByOracle);
        let sol = fpt_solve(&inst, &bic, DEFAULT_BUDGET).expect("fpt");
        let raw = Raw::of(&inst);
        let opt = raw.opt();
        let cost = raw.cost(&sol.solution.centers);
        let ratio = cost / opt;
        worst = worst.max(ratio);
        let bound = 3f64.powi(z as i32) * (1.0 - 0.0006);
        // cl(B) contains B, so it does at least as well as any k-subset of B.
        let from_b = combinations(bic.centers.len(), inst.k())
            .iter()
            .map(|s| raw.cost(&s.iter().map(|&i| bic.centers[i]).collect::<Vec<_>>()))
            .fold(f64::INFINITY, f64::min);
        if ratio > bound || cost > from_b * (1.0 + REL_TOL) {
            failures.push(format!("seed {seed}: ratio {ratio}"));
        }
        count += 1;
    }

    // P = {0.5}, F = {-1, 0, 1}, B = {-1, 1}.
    let site = |x: f64| Site::Coords(vec![x]);
    let tight = Instance::new(
        MetricSpace::euclidean(),
        vec![site(0.5)],
        Facilities::Sites(vec![site(-1.0), site(0.0), site(1.0)]),
        1,
        1,
        vec![Group::indicator(0)],
    )
    .expect("tight instance");
    let b = vec![vec![-1.0], vec![1.0]];
    let projected = projection_assign(&[vec![0.0]], &b).expect("projection");
    let plain_ratio = euclid(&[0.5], &b[projected[0]]) / 0.5;
    let bic = robustkz::bicriteria::BicriteriaSolution::configured(&tight, vec![0, 2], 1.0)
        .expect("seed");
    let closed = fpt_solve(&tight, &bic, DEFAULT_BUDGET).expect("fpt");
    let closed_ratio = closed.solution.cost / 0.5;
    let tight_ok = plain_ratio == 3.0 && closed_ratio == 1.0;
    Outcome {
        passed: failures.is_empty() && count >= 100 && tight_ok,
        detail: format!(
            "{count} instances in R^5 with oracle-certified greedy seeds, worst ratio {worst:.4}; tight line {plain_ratio} -> {closed_ratio}; {} violations",
            failures.len()
        ),
    }
}

fn claim_check() -> Outcome {
    let mut max: f64 = 0.0;
    let mut ok = true;
    for z in 1..=10u32 {
        let lib = claim_value(z, EPS0, BETA0);
        let direct = 2.0 * (1.0f64 - 0.002).powi(z as i32)
            + 0.002 * (1.0 + 2.0 * 0.05f64.powi(z as i32) * z as f64);
        max = max.max(direct);
        // At z = 1 the value is exactly 1.9982; allow for rounding.
        ok &= (lib - direct).abs() <= 1e-15 && direct <= 1.9982 + 1e-12;
    }
    Outcome {
        passed: ok,
        detail: format!("max over z = 1..10 is {max:.16} (bound 1.9982)"),
    }
}

fn brute_mcis(g: &PartiteGraph) -> bool {
    let edges: std::collections::HashSet<(usize, usize)> = g.edges.iter().copied().collect();
    let adj = |a: usize, b: usize| edges.contains(&(a.min(b), a.max(b)));
    let k = g.parts.len();
    let mut idx = vec![0usize; k];
    loop {
        let pick: Vec<usize> = (0..k).map(|i| g.parts[i][idx[i]]).collect();
        if (0..k).all(|i| (i + 1..k).all(|j| !adj(pick[i], pick[j]))) {
            return true;
        }
        let mut pos = 0;
        while pos < k {
            idx[pos] += 1;
            if idx[pos] < g.parts[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
        if pos == k {
            return false;
        }
    }
}

fn gadget_gap() -> Outcome {
    let mut runs = 0;
    let mut failures = Vec::new();
    let mut saw = (false, false);
    for size in [2usize, 3, 4, 5] {
        for (p, seed) in [(0.0, 1u64), (1.0, 2), (0.3, 3), (0.6, 4)] {
            let g = PartiteGraph::random(3, size, p, seed).expect("graph");
            let code = build_code(g.num_vertices(), 0.0, CodeMode::Hadamard, 0).expect("code");
            for q in [1u32, 2] {
                let gad =
                    mcis_to_kcenter(&g, &code, q, GadgetFacilities::VertexPoints).expect("gadget");
                let report = verify_gap(&gad, &g, &code, DEFAULT_BUDGET).expect("gap");
                // Reference optimum over vertex-point centers.
                let inst = &gad.instance;
                let coords: Vec<Vec<f64>> = inst
                    .points()
                    .iter()
                    .map(|s| s.coords().unwrap().to_vec())
                    .collect();
                let nv = gad.num_vertex_points;
                let opt = combinations(nv, 3)
                    .iter()
                    .map(|x| {
                        coords
                            .iter()
                            .map(|c| {
                                x.iter()
                                    .map(|&f| lq(c, &coords[f], q))
                                    .fold(f64::INFINITY, f64::min)
                            })
                            .fold(0.0, f64::max)
                    })
                    .fold(f64::INFINITY, f64::min);
                let t = code.t as f64;
                let has = brute_mcis(&g);
                let opt_q = opt.powi(q as i32);
                let respected = if has {
                    opt_q <= t * (1.0 + REL_TOL)
                } else {
                    opt_q >= 1.5 * t * (1.0 - REL_TOL)
                };
                if p == 0.0 {
                    saw.0 |= has;
                }
                if p == 1.0 {
                    saw.1 |= !has;
                }
                let agrees = report.has_mcis == has
                    && (report.opt_pow_q - opt_q).abs() <= 1e-9 * t
                    && report.yes_bound == t
                    && report.no_bound == 1.5 * t;
                if !(respected && report.gap_respected && agrees) {
                    failures.push(format!(
                        "size {size} p {p} q {q}: mcis {has} opt^q {opt_q} t {t}"
                    ));
                }
                runs += 1;
            }
        }
    }
    Outcome {
        passed: failures.is_empty() && saw.0 && saw.1,
        detail: format!(
            "{runs} gadgets (k=3, part sizes 2..5, q in {{1,2}}, Hadamard), YES and NO graphs covered; {} violations{}",
            failures.len(),
            failures.first().map(|f| format!(", first: {f}")).unwrap_or_default()
        ),
    }
}

fn eps_nets() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let mut bad = 0;
    for _ in 0..200 {
        let dim = rng.random_range(1..=4);
        let q = [1.0, 2.0, 3.5][rng.random_range(0..3)];
        let n = rng.random_range(1..=80);
        let pts: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..dim).map(|_| rng.random_range(0.0..1.0)).collect())
            .collect();
        let center: Vec<f64> = (0..dim).map(|_| rng.random_range(0.0..1.0)).collect();
        let radius = rng.random_range(0.0..1.2);
        let eps = rng.random_range(0.02..0.6);
        let space = MetricSpace::lq(q).unwrap();
        let sites: Vec<Site> = pts.iter().cloned().map(Site::Coords).collect();
        let ball = Ball::new(Site::Coords(center.clone()), radius).unwrap();
        let net = ball_decompose(&space, &ball, eps, &sites).expect("decompose");
        let dq = |a: &[f64], b: &[f64]| {
            a.iter()
                .zip(b)
                .map(|(x, y)| (x - y).abs().powf(q))
                .sum::<f64>()
                .powf(1.0 / q)
        };
        let inside: Vec<usize> = (0..n).filter(|&i| dq(&pts[i], &center) <= radius).collect();
        for &i in &inside {
            if !net.iter().any(|&c| dq(&pts[i], &pts[c]) <= eps) {
                bad += 1;
            }
        }
        for (a, &i) in net.iter().enumerate() {
            if !inside.contains(&i) {
                bad += 1;
            }
            for &j in &net[a + 1..] {
                if dq(&pts[i], &pts[j]) <= eps {
                    bad += 1;
                }
            }
        }
    }
    Outcome {
        passed: bad == 0,
        detail: format!(
            "200 random decompositions, {bad} density/separation/containment violations"
        ),
    }
}

fn run_cli(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_robustkz"))
        .args(args)
        .env_remove("ROBUSTKZ_THREADS")
        .output()
        .expect("spawn cli");
    assert!(
        out.status.code() == Some(0),
        "robustkz {args:?} exited with {:?}: {}",
        out.status,
        String::from_utf8_lossy(&out.stderr)
    );
    out.stdout
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let read = |p: &str| std::fs::read(Path::new(p)).expect("read output");
    let mut mismatches = Vec::new();

    let gens: Vec<(&str, Vec<&str>)> = vec![
        (
            "cube",
            vec![
                "gen",
                "cube",
                "--n",
                "18",
                "--facilities",
                "8",
                "--k",
                "2",
                "--groups",
                "random:3",
                "--seed",
                "5",
            ],
        ),
        (
            "gauss",
            vec![
                "gen",
                "gaussian",
                "--n",
                "20",
                "--facilities",
                "7",
                "--k",
                "2",
                "--z",
                "2",
                "--sigma",
                "0.001",
                "--groups",
                "partition:2",
                "--seed",
                "6",
            ],
        ),
        (
            "matrix",
            vec![
                "gen",
                "matrix",
                "--n",
                "12",
                "--facilities",
                "6",
                "--k",
                "2",
                "--seed",
                "7",
            ],
        ),
        (
            "gadget",
            vec![
                "gen",
                "gadget",
                "--k",
                "3",
                "--part-size",
                "3",
                "--edges",
                "random:0.4",
                "--seed",
                "8",
            ],
        ),
    ];
    for (name, args) in &gens {
        let mut outputs = Vec::new();
        for round in 0..2 {
            let p = path(&format!("{name}{round}.json"));
            let mut a = args.clone();
            a.extend(["--out", &p]);
            run_cli(&a);
            outputs.push(read(&p));
        }
        if outputs[0] != outputs[1] {
            mismatches.push(format!("gen {name}"));
        }
    }
    let cube = path("cube0.json");
    let gauss = path("gauss0.json");
    let matrix = path("matrix0.json");
    let gadget = path("gadget0.json");
    let solves: Vec<Vec<&str>> = vec![
        vec!["solve", &cube, "--algo", "exact"],
        vec![
            "solve",
            &cube,
            "--algo",
            "bicriteria",
            "--bicriteria",
            "greedy",
        ],
        vec!["solve", &cube, "--algo", "epas", "--eps", "0.5"],
        vec!["solve", &gauss, "--algo", "epas", "--eps", "0.3"],
        vec!["solve", &cube, "--algo", "fpt-euclid"],
        vec!["solve", &matrix, "--algo", "epas", "--eps", "0.5"],
        vec!["solve", &gadget, "--algo", "exact"],
        vec!["coreset", "build", &gauss, "--eps", "0.3"],
        vec![
            "check",
            "assignment-lemma",
            "--samples",
            "5000",
            "--seed",
            "3",
        ],
        vec!["check", "coreset", "--instance", &gauss, "--eps", "0.4"],
    ];
    for args in &solves {
        let mut outputs = Vec::new();
        for threads in ["1", "4", "4"] {
            let mut a = vec!["--threads", threads];
            a.extend(args.iter().copied());
            if args[0] == "solve" {
                a.push("--no-timing");
            }
            outputs.push(run_cli(&a));
        }
        if outputs.iter().any(|o| o != &outputs[0]) {
            mismatches.push(args[..2].join(" "));
        }
    }
    Outcome {
        passed: mismatches.is_empty(),
        detail: format!(
            "{} generators twice, {} solver/check commands across threads {{1,4,4}}; mismatches: {mismatches:?}",
            gens.len(),
            solves.len()
        ),
    }
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("1 coreset guarantee", coreset_guarantee),
        ("2 epas certification", epas_certification),
        ("3 projection lemma", projection_lemma),
        ("4 assignment lemma", assignment_lemma),
        ("5 euclidean fpt margin", euclid_fpt),
        ("6 claim value", claim_check),
        ("7 gadget gap", gadget_gap),
        ("8 eps-net properties", eps_nets),
        ("9 determinism", determinism),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (name, f) in criteria {
        if !filter.is_empty() && !filter.iter().any(|x| name.contains(x.as_str())) {
            continue;
        }
        let start = std::time::Instant::now();
        let out = std::panic::catch_unwind(f).unwrap_or_else(|e| Outcome {
            passed: false,
            detail: format!(
                "panicked: {}",
                e.downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default()
            ),
        });
        println!(
            "{} criterion {name}: {} [{:.1}s]",
            if out.passed { "PASS" } else { "FAIL" },
            out.detail,
            start.elapsed().as_secs_f64()
        );
        failed += usize::from(!out.passed);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
