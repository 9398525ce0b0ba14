//! JSON payloads shared by the command line and the HTTP service.
//!
//! Bodies are built as [`serde_json::Value`] and printed with
//! [`canonical`]: object keys sorted, floats in scientific notation with 17
//! significant digits, integers as-is, no whitespace.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::algorithms::{summarize, AlgoParams, Algorithm, Seeding, DEFAULT_HYBRID_C, KMODES_MAX_ITERS};
use crate::error::{Error, Result};
use crate::matchviz::{crossing_cost, default_order, optimal_order, overlap_matrix};
use crate::model::{avg_value, check_feasible, coverage, Dataset, Params, Solution};
use crate::oracle::OracleResult;
use crate::store::ParamStore;

pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".into()
    }
}

/// Canonical text of a JSON value.
pub fn canonical(v: &Value) -> String {
    let mut out = String::new();
    write_value(v, &mut out);
    out
}

/// Re-print arbitrary JSON text canonically.
pub fn canonicalize(text: &str) -> Result<String> {
    let v: Value =
        serde_json::from_str(text).map_err(|e| Error::Parameter(format!("invalid JSON: {e}")))?;
    Ok(canonical(&v))
}

fn write_value(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else {
                out.push_str(&format_float(n.as_f64().unwrap_or(f64::NAN)));
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("strings serialize")),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (i, key) in keys.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(key).expect("strings serialize"));
                out.push(':');
                write_value(&map[key], out);
            }
            out.push('}');
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeedingKind {
    #[default]
    None,
    Random,
    Kmodes,
}

/// Body of a summarize request.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SummarizeRequest {
    pub k: usize,
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "D")]
    pub d: usize,
    #[serde(default = "default_algo")]
    pub algo: Algorithm,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Defaults to random when a seed is given, otherwise none.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seeding: Option<SeedingKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hybrid_c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase_a_budget: Option<usize>,
}

fn default_algo() -> Algorithm {
    Algorithm::Hybrid
}

impl SummarizeRequest {
    pub fn new(k: usize, l: usize, d: usize, algo: Algorithm) -> Self {
        SummarizeRequest { k, l, d, algo, seed: None, seeding: None, hybrid_c: None, phase_a_budget: None }
    }

    pub fn seeding(&self) -> Seeding {
        let kind = self.seeding.unwrap_or(if self.seed.is_some() { SeedingKind::Random } else { SeedingKind::None });
        let seed = self.seed.unwrap_or(0);
        match kind {
            SeedingKind::None => Seeding::None,
            SeedingKind::Random => Seeding::Random { seed },
            SeedingKind::Kmodes => Seeding::Kmodes { seed, iters: KMODES_MAX_ITERS },
        }
    }

    pub fn algo_params(&self) -> AlgoParams {
        AlgoParams {
            k: self.k,
            l: self.l,
            d: self.d,
            seeding: self.seeding(),
            hybrid_c: self.hybrid_c.unwrap_or(DEFAULT_HYBRID_C),
            phase_a_budget: self.phase_a_budget,
        }
    }

    pub fn run(&self, ds: &Dataset) -> Result<Solution> {
        summarize(ds, self.algo, &self.algo_params())
    }
}

fn seeding_json(s: Seeding) -> Value {
    serde_json::to_value(s).expect("seeding serializes")
}

fn params_json(p: Params) -> Value {
    json!({ "k": p.k, "L": p.l, "D": p.d })
}

fn member_json(ds: &Dataset, r: usize, l: usize) -> Value {
    let row = ds.row(r);
    let attrs: Vec<&str> = row
        .codes
        .iter()
        .zip(ds.dicts())
        .map(|(&c, d)| d.value(c).unwrap_or("?"))
        .collect();
    json!({
        "row": r,
        "rank": ds.rank_of(r),
        "attrs": attrs,
        "value": row.value,
        "top_l": ds.in_top(r, l),
    })
}

/// Clusters with decoded patterns, averages, sizes, top-L counts, and
/// members sorted by rank.
pub fn solution_json(ds: &Dataset, sol: &Solution) -> Result<Value> {
    let l = sol.params.l;
    let display = default_order(sol, ds);
    let mut clusters = Vec::with_capacity(sol.clusters.len());
    for (i, c) in sol.clusters.iter().enumerate() {
        let mut rows = coverage(c, ds);
        rows.sort_by_key(|&r| ds.rank_of(r));
        let avg = avg_value(&rows, ds)?;
        clusters.push(json!({
            "index": i,
            "display_pos": display[i],
            "pattern": ds.decode(c)?,
            "level": c.level(),
            "avg": avg,
            "size": rows.len(),
            "topL_count": rows.iter().filter(|&&r| ds.in_top(r, l)).count(),
            "members": rows.iter().map(|&r| member_json(ds, r, l)).collect::<Vec<_>>(),
        }));
    }
    Ok(json!({
        "params": params_json(sol.params),
        "objective": sol.objective,
        "covered_count": sol.covered.len(),
        "collapsed_to_trivial": sol.collapsed_to_trivial,
        "feasible": check_feasible(sol, ds).feasible(),
        "clusters": clusters,
    }))
}

/// Full response to a summarize request.
pub fn summarize_payload(ds: &Dataset, req: &SummarizeRequest, sol: &Solution) -> Result<Value> {
    let mut v = solution_json(ds, sol)?;
    let obj = v.as_object_mut().expect("object");
    let ap = req.algo_params();
    obj.insert("algorithm".into(), json!(req.algo.name()));
    obj.insert("seeding".into(), seeding_json(ap.seeding));
    obj.insert("hybrid_c".into(), json!(ap.hybrid_c));
    obj.insert("phase_a_budget".into(), json!(req.phase_a_budget));
    Ok(v)
}

pub fn meta_payload(ds: &Dataset) -> Value {
    let values: Vec<f64> = ds.rows().iter().map(|e| e.value).collect();
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    json!({
        "attributes": ds.attr_names(),
        "domain_sizes": ds.dicts().iter().map(|d| d.len()).collect::<Vec<_>>(),
        "m": ds.m(),
        "n": ds.n(),
        "value_stats": { "min": min, "max": max, "mean": mean },
        "fingerprint": ds.fingerprint(),
    })
}

pub fn guidance_payload(store: &ParamStore) -> Value {
    let series: Vec<Value> = store
        .guidance_matrix()
        .into_iter()
        .map(|(d, points)| {
            let points: Vec<Value> = points
                .into_iter()
                .map(|(k, obj)| json!({ "k": k, "objective": obj, "retrievable": true }))
                .collect();
            json!({ "D": d, "points": points })
        })
        .collect();
    json!({
        "L": store.l(),
        "k_range": [store.k_range().0, store.k_range().1],
        "d_range": [store.d_range().0, store.d_range().1],
        "algorithm": store.algorithm().name(),
        "seeding": seeding_json(store.seeding()),
        "hybrid_c": store.hybrid_c(),
        "phase_a_budget": store.phase_a_budget(),
        "start_sizes": store.meta().start_sizes.iter().map(|(d, n)| json!({ "D": d, "clusters": n })).collect::<Vec<_>>(),
        "series": series,
    })
}

/// `D,k,objective` with one row per grid point.
pub fn guidance_csv(store: &ParamStore) -> String {
    let mut out = String::from("D,k,objective\n");
    for (d, points) in store.guidance_matrix() {
        for (k, obj) in points {
            out.push_str(&format!("{d},{k},{}\n", format_float(obj)));
        }
    }
    out
}

fn descriptor(ds: &Dataset, sol: &Solution) -> Result<Vec<Value>> {
    sol.clusters
        .iter()
        .map(|c| {
            let rows = coverage(c, ds);
            Ok(json!({
                "pattern": ds.decode(c)?,
                "size": rows.len(),
                "topL_count": rows.iter().filter(|&&r| ds.in_top(r, sol.params.l)).count(),
                "objective": avg_value(&rows, ds)?,
            }))
        })
        .collect()
}

/// Overlap matrix, the optimal new-side order, and the value-ordered
/// default for reference.
pub fn compare_payload(ds: &Dataset, old: &Solution, new: &Solution) -> Result<Value> {
    let om = overlap_matrix(old, new, ds);
    let placement = optimal_order(&om);
    let default_p_b = default_order(new, ds);
    let default_cost = crossing_cost(&om, &default_p_b)?;
    Ok(json!({
        "old": descriptor(ds, old)?,
        "new": descriptor(ds, new)?,
        "old_params": params_json(old.params),
        "new_params": params_json(new.params),
        "M": om.counts,
        "p_a": om.p_a,
        "p_b": placement.p_b,
        "total_cost": placement.total_cost,
        "default_p_b": default_p_b,
        "default_cost": default_cost,
    }))
}

pub fn oracle_payload(ds: &Dataset, res: &OracleResult) -> Result<Value> {
    let optimal = match &res.optimal {
        Some(sol) => solution_json(ds, sol)?,
        None => Value::Null,
    };
    Ok(json!({
        "optimal": optimal,
        "feasible_count": res.feasible_count,
        "evaluated_count": res.evaluated_count,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::t1;

    #[test]
    fn canonical_sorts_and_formats() {
        let v = json!({ "b": 1, "a": [1.5, -2, "x\"y"], "c": { "z": null, "y": true } });
        assert_eq!(
            canonical(&v),
            r#"{"a":[1.5000000000000000e0,-2,"x\"y"],"b":1,"c":{"y":true,"z":null}}"#
        );
        assert_eq!(format_float(0.1), "1.0000000000000001e-1");
        let text = canonical(&v);
        assert_eq!(canonicalize(&text).unwrap(), text);
    }

    #[test]
    fn request_defaults() {
        let req: SummarizeRequest = serde_json::from_str(r#"{"k":2,"L":2,"D":0}"#).unwrap();
        assert_eq!(req.algo, Algorithm::Hybrid);
        assert_eq!(req.seeding(), Seeding::None);
        let req: SummarizeRequest = serde_json::from_str(r#"{"k":2,"L":2,"D":0,"seed":5}"#).unwrap();
        assert_eq!(req.seeding(), Seeding::Random { seed: 5 });
        assert!(serde_json::from_str::<SummarizeRequest>(r#"{"k":2,"L":2,"D":0,"x":1}"#).is_err());
    }

    #[test]
    fn t1_summarize_payload() {
        let ds = t1();
        let req = SummarizeRequest::new(2, 2, 0, Algorithm::Hybrid);
        let sol = req.run(&ds).unwrap();
        let v = summarize_payload(&ds, &req, &sol).unwrap();
        let clusters = v["clusters"].as_array().unwrap();
        assert_eq!(clusters.len(), 2);
        assert_eq!(clusters[0]["pattern"], json!(["a1", "b1"]));
        assert_eq!(clusters[0]["members"][0]["rank"], json!(1));
        assert_eq!(clusters[1]["avg"], json!(8.0));
        assert_eq!(v["objective"], json!(9.0));
        assert_eq!(v["feasible"], json!(true));
    }

    #[test]
    fn self_compare_has_zero_cost() {
        let ds = t1();
        let sol = SummarizeRequest::new(2, 4, 0, Algorithm::BottomUp).run(&ds).unwrap();
        let v = compare_payload(&ds, &sol, &sol).unwrap();
        assert_eq!(v["total_cost"], json!(0));
    }
}
