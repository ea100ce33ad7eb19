//! Output artifacts: CSVs, plot scripts and the run manifest.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

/// Run manifest, written next to the CSVs. Re-running with the same
/// manifest (same config bytes + seed + version) reproduces the outputs
/// byte for byte.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub experiment: String,
    pub seed: u64,
    pub config_sha256: String,
    pub library_version: String,
    pub outputs: Vec<String>,
    /// Channel draws that had to be redrawn (Monte-Carlo experiments).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub redraws: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

/// Collects files to write, then flushes them all at once so partially
/// written runs are easy to spot (the manifest is written last).
pub struct OutputSet {
    dir: PathBuf,
    files: Vec<(String, String)>,
}

impl OutputSet {
    pub fn new(dir: &Path) -> Self {
        Self { dir: dir.to_path_buf(), files: Vec::new() }
    }

    pub fn add(&mut self, name: &str, content: String) {
        self.files.push((name.to_string(), content));
    }

    pub fn names(&self) -> Vec<String> {
        self.files.iter().map(|(n, _)| n.clone()).collect()
    }

    pub fn write_all(self, manifest: &Manifest) -> Result<Vec<String>> {
        std::fs::create_dir_all(&self.dir)
            .with_context(|| format!("creating output directory {}", self.dir.display()))?;
        let mut written = Vec::new();
        for (name, content) in &self.files {
            let path = self.dir.join(name);
            std::fs::write(&path, content).with_context(|| format!("writing {}", path.display()))?;
            written.push(name.clone());
        }
        let manifest_path = self.dir.join("manifest.json");
        let mut body = serde_json::to_string_pretty(manifest)?;
        body.push('\n');
        std::fs::write(&manifest_path, body)
            .with_context(|| format!("writing {}", manifest_path.display()))?;
        written.push("manifest.json".to_string());
        Ok(written)
    }
}

/// Line plot of mean_metric against SNR, one line per strategy label.
pub fn curve_plot_script(csv_name: &str, ylabel: &str, logy: bool) -> String {
    let yscale = if logy { "ax.set_yscale('log')\n" } else { "" };
    format!(
        r#"#!/usr/bin/env python3
"""Plot {csv} (generated alongside the data; needs matplotlib)."""
import csv
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

curves = defaultdict(list)
with open("{csv}", newline="") as fh:
    for row in csv.DictReader(fh):
        curves[row["strategy"]].append(
            (float(row["snr_db"]), float(row["mean_metric"]), float(row["stderr"]))
        )

fig, ax = plt.subplots(figsize=(7, 5))
for label in sorted(curves):
    pts = sorted(curves[label])
    ax.errorbar(
        [p[0] for p in pts],
        [p[1] for p in pts],
        yerr=[p[2] for p in pts],
        marker="o",
        markersize=3,
        capsize=2,
        label=label,
    )
{yscale}ax.set_xlabel("SNR [dB]")
ax.set_ylabel("{ylabel}")
ax.grid(True, which="both", alpha=0.3)
ax.legend(fontsize=8)
fig.tight_layout()
fig.savefig("{stem}.png", dpi=150)
print("wrote {stem}.png")
"#,
        csv = csv_name,
        ylabel = ylabel,
        yscale = yscale,
        stem = csv_name.trim_end_matches(".csv"),
    )
}

/// Log-log plot of operation counts against system size per
/// (task, realization).
pub fn complexity_plot_script(csv_name: &str) -> String {
    format!(
        r#"#!/usr/bin/env python3
"""Plot {csv} (generated alongside the data; needs matplotlib)."""
import csv
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

curves = defaultdict(list)
with open("{csv}", newline="") as fh:
    for row in csv.DictReader(fh):
        ops = float(row["ops_sci"])
        if ops > 0:
            curves[(row["task"], row["realization"])].append((int(row["n_r"]), ops))

fig, ax = plt.subplots(figsize=(7, 5))
for (task, realization) in sorted(curves):
    pts = sorted(curves[(task, realization)])
    style = "-o" if realization == "digital" else "--s"
    ax.plot([p[0] for p in pts], [p[1] for p in pts], style, markersize=3,
            label=f"{{task}} ({{realization}})")
ax.set_xscale("log", base=2)
ax.set_yscale("log")
ax.set_xlabel("antennas")
ax.set_ylabel("real operations per coherence block")
ax.grid(True, which="both", alpha=0.3)
ax.legend(fontsize=8)
fig.tight_layout()
fig.savefig("{stem}.png", dpi=150)
print("wrote {stem}.png")
"#,
        csv = csv_name,
        stem = csv_name.trim_end_matches(".csv"),
    )
}

/// Sum rate against operation count, one marker set per SNR level.
pub fn perf_vs_complexity_plot_script() -> String {
    r#"#!/usr/bin/env python3
"""Plot rates.csv against complexity.csv (needs matplotlib)."""
import csv
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

ops = {}
with open("complexity.csv", newline="") as fh:
    for row in csv.DictReader(fh):
        ops[(row["realization"], int(row["n_r"]), int(row["n_t"]))] = float(row["ops_sci"])

points = defaultdict(list)
with open("rates.csv", newline="") as fh:
    for row in csv.DictReader(fh):
        realization = "digital" if row["strategy"].startswith("digital") else "milac"
        key = (realization, int(row["n_r"]), int(row["n_t"]))
        points[(row["strategy"], float(row["snr_db"]))].append(
            (ops[key], float(row["mean_metric"]))
        )

fig, ax = plt.subplots(figsize=(7, 5))
markers = {}
for (strategy, snr) in sorted(points):
    pts = sorted(points[(strategy, snr)])
    style = "o" if strategy.startswith("digital") else "s"
    ax.plot([p[0] for p in pts], [p[1] for p in pts], style + "-",
            markersize=4, label=f"{strategy}, {snr:g} dB")
ax.set_xscale("log")
ax.set_xlabel("real operations per coherence block")
ax.set_ylabel("sum rate [bits/s/Hz]")
ax.grid(True, which="both", alpha=0.3)
ax.legend(fontsize=7)
fig.tight_layout()
fig.savefig("perf_vs_complexity.png", dpi=150)
print("wrote perf_vs_complexity.png")
"#
    .to_string()
}

/// Error metrics of the DFT network against its size.
pub fn dft_check_plot_script() -> String {
    r#"#!/usr/bin/env python3
"""Plot dft_check.csv (needs matplotlib)."""
import csv

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

rows = list(csv.DictReader(open("dft_check.csv", newline="")))
n = [int(r["n_r"]) for r in rows]
fig, ax = plt.subplots(figsize=(7, 5))
for column in ("max_error", "unitarity_error", "parseval_error"):
    ax.plot(n, [max(float(r[column]), 1e-18) for r in rows], "o-", label=column)
ax.set_xscale("log", base=2)
ax.set_yscale("log")
ax.set_xlabel("transform size")
ax.set_ylabel("relative error")
ax.grid(True, which="both", alpha=0.3)
ax.legend(fontsize=8)
fig.tight_layout()
fig.savefig("dft_check.png", dpi=150)
print("wrote dft_check.png")
"#
    .to_string()
}
