//! Line-oriented, tab-separated store file.
//!
//! ```text
//! summit-store    1
//! l               <L>
//! m               <m>
//! k_range         <kmin>  <kmax>
//! d_range         <dmin>  <dmax>
//! algorithm       hybrid
//! hybrid_c        <c>
//! seeding         none | random:<seed> | kmodes:<seed>:<iters>
//! phase_a_budget  <B> | -
//! fingerprint     <sha256 hex>
//! start_size      <D>  <clusters>
//! timing_us       <D>  <micros>
//! interval        <D>  <seq>  <k_lo>  <k_hi>  <code,code,*,...>
//! grid            <D>  <k>    <objective>
//! end             <record count>
//! ```
//!
//! The trailing `end` line counts every line before it except the first, so
//! a truncated file is detected.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{BuildMeta, IntervalEntry, IntervalTree, ParamStore};
use crate::algorithms::{Algorithm, Seeding};
use crate::error::{Error, Result};
use crate::model::{Cluster, Slot};

pub const STORE_FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "summit-store";

fn seeding_str(s: Seeding) -> String {
    match s {
        Seeding::None => "none".into(),
        Seeding::Random { seed } => format!("random:{seed}"),
        Seeding::Kmodes { seed, iters } => format!("kmodes:{seed}:{iters}"),
    }
}

fn parse_seeding(s: &str) -> Option<Seeding> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        ["none"] => Some(Seeding::None),
        ["random", seed] => Some(Seeding::Random { seed: seed.parse().ok()? }),
        ["kmodes", seed, iters] => Some(Seeding::Kmodes { seed: seed.parse().ok()?, iters: iters.parse().ok()? }),
        _ => None,
    }
}

fn slots_str(c: &Cluster) -> String {
    let parts: Vec<String> = c
        .slots()
        .iter()
        .map(|s| match s {
            Slot::Star => "*".to_string(),
            Slot::Concrete(v) => v.to_string(),
        })
        .collect();
    parts.join(",")
}

pub(super) fn write(store: &ParamStore) -> String {
    let mut body = String::new();
    let mut line = |s: String| {
        body.push_str(&s);
        body.push('\n');
    };
    line(format!("l\t{}", store.l));
    line(format!("m\t{}", store.m));
    line(format!("k_range\t{}\t{}", store.k_range.0, store.k_range.1));
    line(format!("d_range\t{}\t{}", store.d_range.0, store.d_range.1));
    line(format!("algorithm\t{}", store.algorithm));
    line(format!("hybrid_c\t{}", store.hybrid_c));
    line(format!("seeding\t{}", seeding_str(store.seeding)));
    line(match store.phase_a_budget {
        Some(b) => format!("phase_a_budget\t{b}"),
        None => "phase_a_budget\t-".into(),
    });
    line(format!("fingerprint\t{}", store.fingerprint));
    for (d, n) in &store.meta.start_sizes {
        line(format!("start_size\t{d}\t{n}"));
    }
    for (d, us) in &store.meta.timings_us {
        line(format!("timing_us\t{d}\t{us}"));
    }
    for (d, tree) in &store.trees {
        for e in tree.entries() {
            line(format!("interval\t{d}\t{}\t{}\t{}\t{}", e.seq, e.k_lo, e.k_hi, slots_str(&e.cluster)));
        }
    }
    for ((d, k), obj) in &store.grid {
        line(format!("grid\t{d}\t{k}\t{obj}"));
    }
    let count = body.lines().count();
    let mut out = String::with_capacity(body.len() + 64);
    let _ = writeln!(out, "{MAGIC}\t{STORE_FORMAT_VERSION}");
    out.push_str(&body);
    let _ = writeln!(out, "end\t{count}");
    out
}

fn corrupt(lineno: usize, msg: impl std::fmt::Display) -> Error {
    Error::CorruptStore(format!("line {lineno}: {msg}"))
}

fn num<T: std::str::FromStr>(field: Option<&&str>, lineno: usize, what: &str) -> Result<T> {
    field
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| corrupt(lineno, format!("bad or missing {what}")))
}

fn parse_slots(s: &str, m: usize, lineno: usize) -> Result<Cluster> {
    let slots: Vec<Slot> = s
        .split(',')
        .map(|p| match p {
            "*" => Ok(Slot::Star),
            v => v.parse().map(Slot::Concrete).map_err(|_| corrupt(lineno, format!("bad slot {v:?}"))),
        })
        .collect::<Result<_>>()?;
    if slots.len() != m {
        return Err(corrupt(lineno, format!("pattern has {} slots, expected {m}", slots.len())));
    }
    Ok(Cluster::from(slots))
}

pub(super) fn read(text: &str) -> Result<ParamStore> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().ok_or_else(|| Error::CorruptStore("empty file".into()))?;
    let version = match header.split('\t').collect::<Vec<_>>().as_slice() {
        [MAGIC, v] => v.parse::<u32>().map_err(|_| corrupt(1, "bad version"))?,
        _ => return Err(corrupt(1, "not a store file")),
    };
    if version != STORE_FORMAT_VERSION {
        return Err(Error::StoreVersion { found: version, expected: STORE_FORMAT_VERSION });
    }

    let mut l = None;
    let mut m = None;
    let mut k_range = None;
    let mut d_range = None;
    let mut algorithm = None;
    let mut hybrid_c = None;
    let mut seeding = None;
    let mut phase_a_budget = None;
    let mut fingerprint = None;
    let mut meta = BuildMeta::default();
    let mut intervals: BTreeMap<usize, Vec<IntervalEntry>> = BTreeMap::new();
    let mut grid = BTreeMap::new();
    let mut records = 0usize;
    let mut ended = false;

    for (n, raw) in lines {
        if ended {
            return Err(corrupt(n, "content after end marker"));
        }
        let f: Vec<&str> = raw.split('\t').collect();
        match f[0] {
            "end" => {
                let want: usize = num(f.get(1), n, "record count")?;
                if want != records {
                    return Err(corrupt(n, format!("end marker counts {want} records, found {records}")));
                }
                ended = true;
                continue;
            }
            "l" => l = Some(num::<usize>(f.get(1), n, "L")?),
            "m" => m = Some(num::<usize>(f.get(1), n, "m")?),
            "k_range" => k_range = Some((num(f.get(1), n, "k min")?, num(f.get(2), n, "k max")?)),
            "d_range" => d_range = Some((num(f.get(1), n, "D min")?, num(f.get(2), n, "D max")?)),
            "algorithm" => {
                algorithm = Some(
                    f.get(1)
                        .and_then(|s| s.parse::<Algorithm>().ok())
                        .ok_or_else(|| corrupt(n, "bad algorithm"))?,
                )
            }
            "hybrid_c" => hybrid_c = Some(num::<f64>(f.get(1), n, "hybrid_c")?),
            "seeding" => {
                seeding = Some(f.get(1).and_then(|s| parse_seeding(s)).ok_or_else(|| corrupt(n, "bad seeding"))?)
            }
            "phase_a_budget" => {
                phase_a_budget = Some(match f.get(1) {
                    Some(&"-") => None,
                    other => Some(num::<usize>(other, n, "budget")?),
                })
            }
            "fingerprint" => fingerprint = Some(f.get(1).ok_or_else(|| corrupt(n, "missing fingerprint"))?.to_string()),
            "start_size" => {
                meta.start_sizes.insert(num(f.get(1), n, "D")?, num(f.get(2), n, "size")?);
            }
            "timing_us" => {
                meta.timings_us.insert(num(f.get(1), n, "D")?, num(f.get(2), n, "time")?);
            }
            "interval" => {
                let m = m.ok_or_else(|| corrupt(n, "interval before m"))?;
                let d: usize = num(f.get(1), n, "D")?;
                let entry = IntervalEntry {
                    seq: num(f.get(2), n, "seq")?,
                    k_lo: num(f.get(3), n, "k_lo")?,
                    k_hi: num(f.get(4), n, "k_hi")?,
                    cluster: parse_slots(f.get(5).ok_or_else(|| corrupt(n, "missing pattern"))?, m, n)?,
                };
                intervals.entry(d).or_default().push(entry);
            }
            "grid" => {
                let d: usize = num(f.get(1), n, "D")?;
                let k: usize = num(f.get(2), n, "k")?;
                grid.insert((d, k), num::<f64>(f.get(3), n, "objective")?);
            }
            other => return Err(corrupt(n, format!("unknown record {other:?}"))),
        }
        records += 1;
    }
    if !ended {
        return Err(Error::CorruptStore("truncated: missing end marker".into()));
    }

    let missing = |what: &str| Error::CorruptStore(format!("missing {what}"));
    let k_range: (usize, usize) = k_range.ok_or_else(|| missing("k_range"))?;
    let d_range: (usize, usize) = d_range.ok_or_else(|| missing("d_range"))?;
    for d in d_range.0..=d_range.1 {
        for k in k_range.0..=k_range.1 {
            if !grid.contains_key(&(d, k)) {
                return Err(Error::CorruptStore(format!("grid point k={k}, D={d} missing")));
            }
        }
    }
    let trees = (d_range.0..=d_range.1)
        .map(|d| (d, IntervalTree::new(intervals.remove(&d).unwrap_or_default())))
        .collect();
    let store = ParamStore {
        l: l.ok_or_else(|| missing("l"))?,
        m: m.ok_or_else(|| missing("m"))?,
        k_range,
        d_range,
        algorithm: algorithm.ok_or_else(|| missing("algorithm"))?,
        hybrid_c: hybrid_c.ok_or_else(|| missing("hybrid_c"))?,
        seeding: seeding.ok_or_else(|| missing("seeding"))?,
        phase_a_budget: phase_a_budget.ok_or_else(|| missing("phase_a_budget"))?,
        fingerprint: fingerprint.ok_or_else(|| missing("fingerprint"))?,
        trees,
        grid,
        meta,
    };
    store.verify_continuity().map_err(|e| Error::CorruptStore(e.to_string()))?;
    Ok(store)
}
