use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context};
use robustkz::generate::{generate, FacilityMode, GenSpec, GroupMode, Layout};
use robustkz::hardness::CodeBook;
use robustkz::hardness::{
    build_code, mcis_to_kcenter, CodeMode, Gadget, GadgetFacilities, PartiteGraph,
};
use robustkz::io::{instance_to_value, save_instance};
use serde_json::Value;

use crate::args::{CenterArg, CodeArg, GadgetArgs, GenArgs, GenKind};
use crate::emit;

fn parse_groups(s: &str, max_weight: f64) -> anyhow::Result<GroupMode> {
    if s == "single" {
        return Ok(GroupMode::Single);
    }
    let (mode, count) = s
        .split_once(':')
        .context("groups must be single, partition:<m> or random:<m>")?;
    let count: usize = count.parse().context("group count")?;
    match mode {
        "partition" => Ok(GroupMode::Partition(count)),
        "random" => Ok(GroupMode::Random { count, max_weight }),
        other => bail!("unknown group mode {other:?}"),
    }
}

/// Graph, code and gadget for `k` parts as described by `args`.
pub(crate) fn build_gadget(
    args: &GadgetArgs,
    k: usize,
    q: u32,
    seed: u64,
) -> anyhow::Result<(PartiteGraph, CodeBook, Gadget)> {
    let graph = match args.edges.strip_prefix("random:") {
        Some(p) => PartiteGraph::random(
            k,
            args.part_size,
            p.parse().context("edge probability")?,
            seed,
        )?,
        None => {
            let text = fs::read_to_string(&args.edges)
                .with_context(|| format!("reading {}", args.edges))?;
            let raw: PartiteGraph = serde_json::from_str(&text).context("graph file")?;
            PartiteGraph::new(raw.parts, raw.edges)?
        }
    };
    let mode = match args.code {
        CodeArg::Hadamard => CodeMode::Hadamard,
        CodeArg::RandomLinear => CodeMode::RandomLinear,
    };
    let code = build_code(graph.num_vertices(), args.eta, mode, seed)?;
    let centers = match args.centers {
        CenterArg::Vertex => GadgetFacilities::VertexPoints,
        CenterArg::All => GadgetFacilities::AllPoints,
    };
    let gadget = mcis_to_kcenter(&graph, &code, q, centers)?;
    Ok((graph, code, gadget))
}

pub fn run(a: &GenArgs) -> anyhow::Result<()> {
    if a.kind == GenKind::Gadget {
        if a.q.fract() != 0.0 || a.q < 1.0 {
            bail!("gadget q must be a positive integer, got {}", a.q);
        }
        let (graph, code, gadget) = build_gadget(&a.gadget, a.k, a.q as u32, a.seed)?;
        save_instance(&gadget.instance, &a.out)?;
        let sidecar = a.sidecar.clone().unwrap_or_else(|| {
            let mut p = PathBuf::from(&a.out);
            p.set_extension("sidecar.json");
            p
        });
        let v: Value = gadget.sidecar(&graph, &code)?;
        emit(&v, Some(&sidecar))?;
        return Ok(());
    }
    let layout = match a.kind {
        GenKind::Cube => Layout::Cube {
            dim: a.dim,
            side: a.side,
        },
        GenKind::Gaussian => Layout::Gaussian {
            dim: a.dim,
            clusters: a.clusters,
            sigma: a.sigma,
            spread: a.side,
        },
        GenKind::Line => Layout::Line { length: a.side },
        GenKind::Matrix => Layout::Matrix { side: a.side },
        GenKind::Gadget => unreachable!("handled above"),
    };
    let spec = GenSpec {
        layout,
        n: a.n,
        facilities: if a.facilities == 0 {
            FacilityMode::SameAsPoints
        } else {
            FacilityMode::Separate(a.facilities)
        },
        k: a.k,
        z: a.z,
        groups: parse_groups(&a.groups, a.max_weight)?,
        q: a.q,
        seed: a.seed,
    };
    let inst = generate(&spec)?;
    emit(&instance_to_value(&inst), Some(&a.out))
}
