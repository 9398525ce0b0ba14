use std::io::{self, Write};

use serde_json::Value;
use summit_core::model::{avg_value, coverage};
use summit_core::{Dataset, Error, Solution};

fn io_err(e: Error) -> io::Error {
    io::Error::other(e.to_string())
}

/// Clusters by average value, optionally followed by their member rows.
pub fn solution(out: &mut dyn Write, ds: &Dataset, sol: &Solution, expand: bool) -> io::Result<()> {
    let p = sol.params;
    writeln!(
        out,
        "k={} L={} D={}  objective {:.4}  covering {} rows",
        p.k,
        p.l,
        p.d,
        sol.objective,
        sol.covered.len()
    )?;
    let mut rows: Vec<(Vec<String>, f64, Vec<usize>)> = Vec::new();
    for c in &sol.clusters {
        let mut members = coverage(c, ds);
        members.sort_by_key(|&r| ds.rank_of(r));
        let avg = avg_value(&members, ds).map_err(io_err)?;
        rows.push((ds.decode(c).map_err(io_err)?, avg, members));
    }
    // stable sort keeps creation order among equal averages
    rows.sort_by(|a, b| b.1.total_cmp(&a.1));
    let header: Vec<String> = ds.attr_names().to_vec();
    let mut widths: Vec<usize> = header.iter().map(String::len).collect();
    for (pattern, _, members) in &rows {
        for (w, s) in widths.iter_mut().zip(pattern) {
            *w = (*w).max(s.chars().count());
        }
        if expand {
            for &r in members {
                let decoded = ds.decode(&ds.singleton(r)).map_err(io_err)?;
                for (w, s) in widths.iter_mut().zip(&decoded) {
                    *w = (*w).max(s.chars().count());
                }
            }
        }
    }
    let cells = |vals: &[String]| -> String {
        vals.iter().zip(&widths).map(|(v, w)| format!("{v:<w$}")).collect::<Vec<_>>().join("  ")
    };
    writeln!(out, "{:>4}  {}  {:>12}  {:>6}  {:>5}", "#", cells(&header), "avg", "size", "topL")?;
    for (i, (pattern, avg, members)) in rows.iter().enumerate() {
        let top = members.iter().filter(|&&r| ds.in_top(r, p.l)).count();
        writeln!(out, "{:>4}  {}  {avg:>12.4}  {:>6}  {top:>5}", i + 1, cells(pattern), members.len())?;
        if expand {
            for &r in members {
                let decoded = ds.decode(&ds.singleton(r)).map_err(io_err)?;
                let mark = if ds.in_top(r, p.l) { '*' } else { ' ' };
                writeln!(out, "{:>4}{mark} {}  {:>12}", ds.rank_of(r), cells(&decoded), ds.value(r))?;
            }
        }
    }
    Ok(())
}

/// Compact view of a compare payload.
pub fn compare(out: &mut dyn Write, v: &Value) -> io::Result<()> {
    let pattern = |c: &Value| {
        let parts: Vec<&str> = c["pattern"].as_array().into_iter().flatten().filter_map(Value::as_str).collect();
        format!("({})", parts.join(","))
    };
    writeln!(out, "crossing cost {} (value order: {})", v["total_cost"], v["default_cost"])?;
    writeln!(out, "old clusters by slot:")?;
    let place = |side: &str, order: &str, out: &mut dyn Write| -> io::Result<()> {
        let clusters = v[side].as_array().cloned().unwrap_or_default();
        let slots: Vec<usize> = v[order].as_array().into_iter().flatten().filter_map(|x| x.as_u64()).map(|x| x as usize).collect();
        let mut by_slot: Vec<(usize, usize)> = slots.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        by_slot.sort();
        for (slot, i) in by_slot {
            writeln!(out, "  {slot:>3}  {}  size {}", pattern(&clusters[i]), clusters[i]["size"])?;
        }
        Ok(())
    };
    place("old", "p_a", out)?;
    writeln!(out, "new clusters by slot:")?;
    place("new", "p_b", out)?;
    writeln!(out, "shared rows (old x new): {}", v["M"])?;
    Ok(())
}
