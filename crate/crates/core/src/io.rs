//! JSON instance files.
//!
//! ```json
//! { "metric": {"kind": "lq", "q": 2} | {"kind": "matrix", "d": [[...]]},
//!   "points": [[x, y], ...]            // matrix metric: [i, j, ...]
//!   "facilities": [[...], ...] | "same_as_points",
//!   "k": 2, "z": 1,
//!   "groups": [ {"weights": {"0": 1.0, "3": 2.5}}, {"subset": [1, 2]} ],
//!   "point_weights": [...]             // optional, used by "subset" groups
//! }
//! ```
//!
//! Output is canonical: object keys sorted, floats in shortest round-trip
//! form, subset groups expanded to weight maps.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::instance::{Facilities, Group, Instance};
use crate::metric::{MetricKind, MetricSpace, Site};

fn schema(msg: impl Into<String>) -> Error {
    Error::Schema(msg.into())
}

fn as_f64(v: &Value, what: &str) -> Result<f64> {
    let x = v
        .as_f64()
        .ok_or_else(|| schema(format!("{what} must be a number, got {v}")))?;
    if !x.is_finite() {
        return Err(schema(format!("{what} is not finite")));
    }
    Ok(x)
}

fn as_usize(v: &Value, what: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| schema(format!("{what} must be a nonnegative integer, got {v}")))
}

fn parse_metric(v: &Value, check_triangle: bool) -> Result<MetricSpace> {
    let kind = v
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| schema("metric.kind missing"))?;
    let dim = match v.get("doubling_dim") {
        None | Some(Value::Null) => None,
        Some(d) => Some(as_usize(d, "metric.doubling_dim")? as u32).filter(|&d| d > 0),
    };
    let space = match kind {
        "lq" => {
            let q = v
                .get("q")
                .map(|q| as_f64(q, "metric.q"))
                .transpose()?
                .unwrap_or(2.0);
            MetricSpace::lq(q)?
        }
        "matrix" => {
            let rows = v
                .get("d")
                .and_then(Value::as_array)
                .ok_or_else(|| schema("metric.d must be an array of rows"))?;
            let d = rows
                .iter()
                .enumerate()
                .map(|(i, row)| {
                    row.as_array()
                        .ok_or_else(|| schema(format!("metric.d[{i}] must be an array")))?
                        .iter()
                        .map(|x| as_f64(x, "distance"))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            MetricSpace::matrix(d, check_triangle)?
        }
        other => return Err(schema(format!("unknown metric kind {other:?}"))),
    };
    Ok(space.with_doubling_dim(dim))
}

fn parse_sites(v: &Value, metric: &MetricSpace, what: &str) -> Result<Vec<Site>> {
    let arr = v
        .as_array()
        .ok_or_else(|| schema(format!("{what} must be an array")))?;
    arr.iter()
        .enumerate()
        .map(|(i, s)| match metric.kind() {
            MetricKind::Lq { .. } => {
                let c = s
                    .as_array()
                    .ok_or_else(|| schema(format!("{what}[{i}] must be a coordinate array")))?;
                Ok(Site::Coords(
                    c.iter()
                        .map(|x| as_f64(x, "coordinate"))
                        .collect::<Result<_>>()?,
                ))
            }
            MetricKind::Matrix { .. } => Ok(Site::Index(as_usize(s, &format!("{what}[{i}]"))?)),
        })
        .collect()
}

fn parse_group(v: &Value, i: usize, point_weights: Option<&[f64]>) -> Result<Group> {
    if let Some(w) = v.get("weights") {
        let obj = w
            .as_object()
            .ok_or_else(|| schema(format!("groups[{i}].weights must be an object")))?;
        let mut map = BTreeMap::new();
        for (key, val) in obj {
            let p: usize = key
                .parse()
                .map_err(|_| schema(format!("groups[{i}] key {key:?} is not a point index")))?;
            map.insert(p, as_f64(val, "weight")?);
        }
        Ok(Group::from_map(map))
    } else if let Some(s) = v.get("subset") {
        let members = s
            .as_array()
            .ok_or_else(|| schema(format!("groups[{i}].subset must be an array")))?
            .iter()
            .map(|x| as_usize(x, "subset member"))
            .collect::<Result<Vec<_>>>()?;
        Group::from_subset(&members, point_weights)
    } else {
        Err(schema(format!(
            "groups[{i}] needs \"weights\" or \"subset\""
        )))
    }
}

/// Parses an instance from its JSON value. `check_triangle` enables the
/// triangle-inequality scan on matrix metrics.
pub fn instance_from_value(v: &Value, check_triangle: bool) -> Result<Instance> {
    let metric = parse_metric(
        v.get("metric")
            .ok_or_else(|| schema("missing \"metric\""))?,
        check_triangle,
    )?;
    let points = parse_sites(
        v.get("points")
            .ok_or_else(|| schema("missing \"points\""))?,
        &metric,
        "points",
    )?;
    let facilities = match v.get("facilities") {
        Some(Value::String(s)) if s == "same_as_points" => Facilities::SameAsPoints,
        Some(f) => Facilities::Sites(parse_sites(f, &metric, "facilities")?),
        None => return Err(schema("missing \"facilities\"")),
    };
    let k = as_usize(v.get("k").ok_or_else(|| schema("missing \"k\""))?, "k")?;
    let z = as_usize(v.get("z").ok_or_else(|| schema("missing \"z\""))?, "z")?;
    let point_weights = v
        .get("point_weights")
        .map(|pw| {
            pw.as_array()
                .ok_or_else(|| schema("point_weights must be an array"))?
                .iter()
                .map(|x| as_f64(x, "point weight"))
                .collect::<Result<Vec<_>>>()
        })
        .transpose()?;
    let groups = v
        .get("groups")
        .and_then(Value::as_array)
        .ok_or_else(|| schema("\"groups\" must be an array"))?
        .iter()
        .enumerate()
        .map(|(i, g)| parse_group(g, i, point_weights.as_deref()))
        .collect::<Result<Vec<_>>>()?;
    let z = u32::try_from(z).map_err(|_| schema("z too large"))?;
    Instance::new(metric, points, facilities, k, z, groups)
}

fn sites_value(sites: &[Site]) -> Value {
    Value::Array(
        sites
            .iter()
            .map(|s| match s {
                Site::Coords(c) => json!(c),
                Site::Index(i) => json!(i),
            })
            .collect(),
    )
}

/// Canonical JSON value of an instance.
pub fn instance_to_value(inst: &Instance) -> Value {
    let mut metric = Map::new();
    match inst.metric().kind() {
        MetricKind::Lq { q } => {
            metric.insert("kind".into(), json!("lq"));
            metric.insert("q".into(), json!(q));
        }
        MetricKind::Matrix { d } => {
            metric.insert("kind".into(), json!("matrix"));
            metric.insert("d".into(), json!(d));
        }
    }
    if let Some(dim) = inst.metric().doubling_dim() {
        metric.insert("doubling_dim".into(), json!(dim));
    }
    let facilities = if inst.facilities_same_as_points() {
        json!("same_as_points")
    } else {
        sites_value(inst.facilities())
    };
    let groups: Vec<Value> = inst.groups().iter().map(group_value).collect();
    json!({
        "metric": Value::Object(metric),
        "points": sites_value(inst.points()),
        "facilities": facilities,
        "k": inst.k(),
        "z": inst.z(),
        "groups": groups,
    })
}

pub(crate) fn group_value(g: &Group) -> Value {
    let weights: Map<String, Value> = g
        .entries()
        .iter()
        .map(|&(p, w)| (p.to_string(), json!(w)))
        .collect();
    json!({ "weights": weights })
}

/// Serializes with sorted keys; `serde_json::Value` objects are ordered maps.
pub fn canonical_string(v: &Value) -> String {
    serde_json::to_string(v).expect("JSON values always serialize")
}

pub fn canonical_pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values always serialize")
}

/// SHA-256 of the canonical compact encoding, as lowercase hex.
pub fn digest_value(v: &Value) -> String {
    let hash = Sha256::digest(canonical_string(v).as_bytes());
    hash.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn instance_digest(inst: &Instance) -> String {
    digest_value(&instance_to_value(inst))
}

/// Loads and validates an instance; matrix metrics get the triangle check.
pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance> {
    load_instance_with(path, false)
}

/// Like [`load_instance`]; `trusted` skips the triangle-inequality scan.
pub fn load_instance_with(path: impl AsRef<Path>, trusted: bool) -> Result<Instance> {
    let text = fs::read_to_string(path)?;
    let v: Value = serde_json::from_str(&text)?;
    instance_from_value(&v, !trusted)
}

pub fn save_instance(inst: &Instance, path: impl AsRef<Path>) -> Result<()> {
    let mut text = canonical_pretty(&instance_to_value(inst));
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_round_trip() {
        let v = json!({
            "metric": {"kind": "lq", "q": 2},
            "points": [[0.1]],
            "facilities": [[0.30000000000000004]],
            "k": 1, "z": 1,
            "groups": [{"weights": {"0": 1.0}}]
        });
        let inst = instance_from_value(&v, true).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("i.json");
        save_instance(&inst, &path).unwrap();
        let back = load_instance(&path).unwrap();
        assert_eq!(inst, back);
        assert_eq!(
            back.facilities()[0],
            Site::Coords(vec![0.30000000000000004])
        );
    }

    #[test]
    fn asymmetric_matrix_rejected() {
        let v = json!({
            "metric": {"kind": "matrix", "d": [[0, 1], [2, 0]]},
            "points": [0, 1],
            "facilities": "same_as_points",
            "k": 1, "z": 1,
            "groups": [{"weights": {"0": 1}}]
        });
        assert!(matches!(
            instance_from_value(&v, true),
            Err(Error::Schema(_))
        ));
    }

    #[test]
    fn subset_groups_expand() {
        let v = json!({
            "metric": {"kind": "lq", "q": 1},
            "points": [[0], [1], [2]],
            "facilities": "same_as_points",
            "k": 1, "z": 2,
            "point_weights": [1.5, 2.0, 4.0],
            "groups": [{"subset": [0, 2]}, {"subset": [1]}]
        });
        let inst = instance_from_value(&v, true).unwrap();
        assert!(inst.facilities_same_as_points());
        assert_eq!(inst.groups()[0].entries(), &[(0, 1.5), (2, 4.0)]);
        assert_eq!(inst.groups()[1].entries(), &[(1, 2.0)]);
        let out = instance_to_value(&inst);
        assert_eq!(out["groups"][0], json!({"weights": {"0": 1.5, "2": 4.0}}));
    }

    #[test]
    fn schema_errors() {
        let base = json!({
            "metric": {"kind": "lq", "q": 2},
            "points": [[0.0]],
            "facilities": [[1.0]],
            "k": 2, "z": 1,
            "groups": [{"weights": {"0": 1.0}}]
        });
        assert!(instance_from_value(&base, true).is_err());
        let mut bad = base.clone();
        bad["k"] = json!(1);
        bad["metric"]["kind"] = json!("hamming");
        assert!(instance_from_value(&bad, true).is_err());
        let mut bad = base.clone();
        bad["k"] = json!(1);
        bad["groups"] = json!([{"weights": {"x": 1.0}}]);
        assert!(instance_from_value(&bad, true).is_err());
    }

    #[test]
    fn digest_is_stable() {
        let v = json!({"b": 1, "a": [1.5, 2]});
        assert_eq!(canonical_string(&v), r#"{"a":[1.5,2],"b":1}"#);
        assert_eq!(digest_value(&v), digest_value(&v.clone()));
    }
}
