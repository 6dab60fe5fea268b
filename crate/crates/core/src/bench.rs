//! Weighted vs uniform enumeration: operation counts and timings per level.

use std::fmt::Write as _;
use std::time::Duration;

use crate::alphabet::WeightedAlphabet;
use crate::enumerator::{EnumerationError, EnumerationStats, Enumerator};
use crate::validation::trivial_validator;

pub const WEIGHTED_LABEL: &str = "weighted";
pub const UNIFORM_LABEL: &str = "uniform12";

pub const CSV_HEADER: &str = "alphabet,q,stored,unions_attempted,duplicates_rejected,elapsed_seconds";

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub alphabet_label: String,
    pub q: u32,
    pub stored: u64,
    pub unions_attempted: u64,
    pub duplicates_rejected: u64,
    pub elapsed_seconds: f64,
}

/// The two alphabets compared: A..L weighted 1,1,4×4,7×6 and twelve
/// weight-1 letters.
pub fn bench_alphabets() -> Vec<(&'static str, WeightedAlphabet)> {
    vec![
        (WEIGHTED_LABEL, WeightedAlphabet::weighted()),
        (UNIFORM_LABEL, WeightedAlphabet::uniform(12)),
    ]
}

/// Marches one alphabet `1 + repetitions` times, discarding the first run.
/// Counts come from the kept runs (they never differ); elapsed is the
/// per-level minimum over the kept runs.
pub fn bench_alphabet(
    label: &str,
    alphabet: &WeightedAlphabet,
    max_comp: u32,
    repetitions: usize,
    enumerator: &Enumerator,
) -> Result<Vec<BenchRow>, EnumerationError> {
    let validator = trivial_validator();
    // warm-up
    enumerator.march(alphabet, max_comp, &validator)?;
    let mut best: Option<Vec<EnumerationStats>> = None;
    for _ in 0..repetitions.max(1) {
        let stats = enumerator.march(alphabet, max_comp, &validator)?.stats;
        best = Some(match best {
            None => stats,
            Some(prev) => prev
                .into_iter()
                .zip(stats)
                .map(|(a, b)| {
                    debug_assert!(a.same_counts(&b));
                    let elapsed: Duration = a.elapsed.min(b.elapsed);
                    EnumerationStats { elapsed, ..a }
                })
                .collect(),
        });
    }
    Ok(best
        .unwrap_or_default()
        .into_iter()
        .map(|s| BenchRow {
            alphabet_label: label.to_string(),
            q: s.q,
            stored: s.stored,
            unions_attempted: s.unions_attempted,
            duplicates_rejected: s.duplicates_rejected,
            elapsed_seconds: s.elapsed.as_secs_f64(),
        })
        .collect())
}

/// Rows for both alphabets, sorted by `(alphabet label, q)`. Levels above
/// an alphabet's total weight produce no row.
pub fn run_bench_with(
    max_comp: u32,
    repetitions: usize,
    workers: usize,
) -> Result<Vec<BenchRow>, EnumerationError> {
    let enumerator = Enumerator::with_workers(workers)?;
    let mut rows = Vec::new();
    for (label, alphabet) in bench_alphabets() {
        rows.extend(bench_alphabet(label, &alphabet, max_comp, repetitions, &enumerator)?);
    }
    sort_rows(&mut rows);
    Ok(rows)
}

/// Single-worker [`run_bench_with`].
pub fn run_bench(max_comp: u32, repetitions: usize) -> Result<Vec<BenchRow>, EnumerationError> {
    run_bench_with(max_comp, repetitions, 1)
}

pub fn sort_rows(rows: &mut [BenchRow]) {
    rows.sort_by(|a, b| (&a.alphabet_label, a.q).cmp(&(&b.alphabet_label, b.q)));
}

pub fn total_unions(rows: &[BenchRow], label: &str) -> u64 {
    rows.iter()
        .filter(|r| r.alphabet_label == label)
        .map(|r| r.unions_attempted)
        .sum()
}

pub fn total_stored(rows: &[BenchRow], label: &str) -> u64 {
    rows.iter()
        .filter(|r| r.alphabet_label == label)
        .map(|r| r.stored)
        .sum()
}

pub fn emit_csv(rows: &[BenchRow]) -> String {
    let mut sorted = rows.to_vec();
    sort_rows(&mut sorted);
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in &sorted {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{:e}",
            r.alphabet_label, r.q, r.stored, r.unions_attempted, r.duplicates_rejected, r.elapsed_seconds
        );
    }
    out
}

/// Timer resolution. Zero timings are drawn at this floor on the log axis.
pub const MEASUREMENT_FLOOR_SECONDS: f64 = 1e-9;

/// A standalone matplotlib script plotting elapsed seconds against `q` for
/// each alphabet on a log axis, with the data embedded as CSV.
pub fn emit_plot_script(rows: &[BenchRow]) -> String {
    let floor = MEASUREMENT_FLOOR_SECONDS;
    let csv = emit_csv(rows);
    format!(
        r#"#!/usr/bin/env python3
# Time per complexity level, weighted vs uniform alphabet.
import csv
import io
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

DATA = """{csv}"""

# zero timings are drawn at the measurement floor instead of being dropped
FLOOR = {floor:e}

series = {{}}
for row in csv.DictReader(io.StringIO(DATA)):
    label = row["alphabet"]
    q = int(row["q"])
    elapsed = max(float(row["elapsed_seconds"]), FLOOR)
    series.setdefault(label, []).append((q, elapsed, int(row["unions_attempted"])))

fig, (ax_time, ax_ops) = plt.subplots(1, 2, figsize=(11, 4))
for label, points in sorted(series.items()):
    points.sort()
    qs = [p[0] for p in points]
    ax_time.plot(qs, [p[1] for p in points], marker="o", label=label)
    ax_ops.plot(qs, [max(p[2], 1) for p in points], marker="o", label=label)

ax_time.set_yscale("log")
ax_time.set_xlabel("complexity q")
ax_time.set_ylabel("elapsed_seconds")
ax_time.set_title("Time per level")
ax_time.legend()

ax_ops.set_yscale("log")
ax_ops.set_xlabel("complexity q")
ax_ops.set_ylabel("unions_attempted")
ax_ops.set_title("Union operations per level")
ax_ops.legend()

fig.tight_layout()
out = sys.argv[1] if len(sys.argv) > 1 else "bench.png"
fig.savefig(out, dpi=120)
print("wrote", out)
"#
    )
}
