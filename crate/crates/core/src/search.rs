//! Isomorphism-reduced enumeration of K(p,q,e), maximizer identification,
//! and desk-scale verification of the extremal-graph statements.
//!
//! Enumeration generates biadjacency matrices whose rows are non-increasing
//! by (popcount, value) as a pruning pre-filter, then dedupes exactly on
//! canonical forms. Sharding assigns whole canonical classes by a stable
//! 64-bit hash of the canonical form, so shard outputs partition the class
//! set exactly and merge deterministically.

use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::io::{BufRead, Write};
use std::path::Path;

use rand::SeedableRng;
use rand::rngs::StdRng;
use rand::seq::index::sample;

use crate::bounds::rho_k_brace_closed;
use crate::canonical::CanonicalForm;
use crate::error::{Error, Result};
use crate::graph::BipartiteGraph;
use crate::spectral::{DEFAULT_RHO_TOL, spectral_radius};

/// Exhaustive enumeration is limited to p * q <= this.
pub const EXHAUSTIVE_CELL_CAP: usize = 25;

/// One (p, q, e) enumeration task.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationSpec {
    pub p: usize,
    pub q: usize,
    pub e: usize,
    /// Treat a square graph and its part swap as one class.
    pub dedupe_transpose: bool,
    /// (index, count): keep only classes whose canonical hash lands in this
    /// shard. (0, 1) means everything.
    pub shard: (usize, usize),
}

impl EnumerationSpec {
    pub fn new(p: usize, q: usize, e: usize) -> Self {
        EnumerationSpec {
            p,
            q,
            e,
            dedupe_transpose: false,
            shard: (0, 1),
        }
    }

    pub fn with_shard(mut self, index: usize, count: usize) -> Self {
        self.shard = (index, count);
        self
    }

    fn validate(&self) -> Result<()> {
        if self.p < 1 || self.q < 1 {
            return Err(Error::Domain("parts must be >= 1".into()));
        }
        if self.e > self.p * self.q {
            return Err(Error::Domain(format!(
                "e = {} exceeds pq = {}",
                self.e,
                self.p * self.q
            )));
        }
        if self.shard.1 == 0 || self.shard.0 >= self.shard.1 {
            return Err(Error::Domain(format!(
                "shard index {} out of range for count {}",
                self.shard.0, self.shard.1
            )));
        }
        Ok(())
    }

    fn check_scale(&self) -> Result<()> {
        if self.p * self.q > EXHAUSTIVE_CELL_CAP {
            return Err(Error::Scale(format!(
                "exhaustive enumeration needs pq <= {EXHAUSTIVE_CELL_CAP}, got {}; \
                 use the sampled mode instead",
                self.p * self.q
            )));
        }
        Ok(())
    }

    fn canonical(&self, g: &BipartiteGraph) -> Result<CanonicalForm> {
        if self.dedupe_transpose {
            g.canonical_form_transpose_deduped()
        } else {
            g.canonical_form()
        }
    }
}

/// Verdict of a cell against the conjectured extremal value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Confirmed,
    Refuted,
    Inapplicable,
    Sampled,
}

/// Result of scanning one (p, q, e) cell.
#[derive(Debug, Clone)]
pub struct SearchRecord {
    pub spec: EnumerationSpec,
    pub class_count: usize,
    pub max_rho: f64,
    /// Canonical forms attaining max_rho within tolerance, sorted.
    pub maximizers: Vec<CanonicalForm>,
    /// Closed-form rho of the conjectured extremal graph, when its
    /// constraints hold.
    pub extremal_value: Option<f64>,
    pub verdict: Verdict,
}

/// Outcome of the concluding-conjecture scan for one cell.
#[derive(Debug, Clone)]
pub struct ConjectureVerdict {
    pub spec: EnumerationSpec,
    pub best_st: Option<(usize, usize)>,
    pub found: bool,
}

/// JSONL line schema for the append-only result log.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellRecord {
    pub p: usize,
    pub q: usize,
    pub e: usize,
    pub classes: usize,
    pub max_rho: f64,
    pub extremal_rho: Option<f64>,
    pub verdict: Verdict,
    pub maximizers: Vec<CanonicalForm>,
}

impl From<&SearchRecord> for CellRecord {
    fn from(r: &SearchRecord) -> Self {
        CellRecord {
            p: r.spec.p,
            q: r.spec.q,
            e: r.spec.e,
            classes: r.class_count,
            max_rho: r.max_rho,
            extremal_rho: r.extremal_value,
            verdict: r.verdict,
            maximizers: r.maximizers.clone(),
        }
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// One representative per canonical class of e-edge subgraphs of K_{p,q},
/// in deterministic generation order.
pub fn enumerate_kpqe(spec: &EnumerationSpec) -> Result<Vec<BipartiteGraph>> {
    spec.validate()?;
    spec.check_scale()?;
    let (p, q, e) = (spec.p, spec.q, spec.e);
    // Masks grouped by popcount, each group sorted descending.
    let mut by_popcount: Vec<Vec<u64>> = vec![Vec::new(); q + 1];
    for mask in 0..(1u64 << q) {
        by_popcount[mask.count_ones() as usize].push(mask);
    }
    for group in &mut by_popcount {
        group.sort_unstable_by(|a, b| b.cmp(a));
    }

    let mut seen: HashSet<CanonicalForm> = HashSet::new();
    let mut out: Vec<BipartiteGraph> = Vec::new();
    let mut rows: Vec<u64> = Vec::with_capacity(p);

    fn recurse(
        spec: &EnumerationSpec,
        by_popcount: &[Vec<u64>],
        rows: &mut Vec<u64>,
        prev: (usize, u64),
        e_rem: usize,
        seen: &mut HashSet<CanonicalForm>,
        out: &mut Vec<BipartiteGraph>,
    ) -> Result<()> {
        let remaining = spec.p - rows.len();
        if remaining == 0 {
            if e_rem == 0 {
                let g = BipartiteGraph::from_bit_rows(spec.p, spec.q, rows.clone())?;
                let canon = spec.canonical(&g)?;
                if seen.insert(canon.clone())
                    && fnv1a(canon.as_bytes()) % spec.shard.1 as u64 == spec.shard.0 as u64
                {
                    out.push(g);
                }
            }
            return Ok(());
        }
        let max_pc = prev.0.min(e_rem);
        for pc in (0..=max_pc).rev() {
            if pc * remaining < e_rem {
                break;
            }
            for &mask in &by_popcount[pc] {
                if pc == prev.0 && mask > prev.1 {
                    continue;
                }
                rows.push(mask);
                recurse(spec, by_popcount, rows, (pc, mask), e_rem - pc, seen, out)?;
                rows.pop();
            }
        }
        Ok(())
    }

    recurse(
        spec,
        &by_popcount,
        &mut rows,
        (q, u64::MAX),
        e,
        &mut seen,
        &mut out,
    )?;
    Ok(out)
}

/// The conjectured extremal value for a cell, when its hypothesis holds.
fn extremal_for_cell(spec: &EnumerationSpec) -> Option<f64> {
    let removed = spec.p * spec.q - spec.e;
    if removed > 0 && removed < spec.p.min(spec.q) {
        Some(rho_k_brace_closed(spec.p, spec.q, spec.e).expect("hypothesis checked"))
    } else {
        None
    }
}

fn finalize(
    spec: EnumerationSpec,
    class_count: usize,
    max_rho: f64,
    mut candidates: Vec<(CanonicalForm, f64)>,
    tol: f64,
    sampled: bool,
) -> Result<SearchRecord> {
    candidates.retain(|(_, rho)| *rho >= max_rho - tol);
    candidates.sort_by(|a, b| a.0.cmp(&b.0));
    candidates.dedup_by(|a, b| a.0 == b.0);
    let maximizers: Vec<CanonicalForm> = candidates.into_iter().map(|(c, _)| c).collect();
    let extremal_value = extremal_for_cell(&spec);
    let verdict = if sampled {
        Verdict::Sampled
    } else {
        match extremal_value {
            None => Verdict::Inapplicable,
            Some(target) => {
                let brace = BipartiteGraph::k_brace(spec.p, spec.q, spec.e)?;
                let brace_canon = spec.canonical(&brace)?;
                if (max_rho - target).abs() <= tol && maximizers.contains(&brace_canon) {
                    Verdict::Confirmed
                } else {
                    Verdict::Refuted
                }
            }
        }
    };
    Ok(SearchRecord {
        spec,
        class_count,
        max_rho,
        maximizers,
        extremal_value,
        verdict,
    })
}

/// Enumerate a cell (or one shard of it) and find the spectral-radius
/// maximizers; ties within `tol` are all retained.
pub fn max_spectral(spec: &EnumerationSpec, tol: f64) -> Result<SearchRecord> {
    let reps = enumerate_kpqe(spec)?;
    let rho_tol = (tol / 100.0).min(DEFAULT_RHO_TOL);
    let mut max_rho = 0.0f64;
    let mut candidates: Vec<(CanonicalForm, f64)> = Vec::new();
    for g in &reps {
        let rho = spectral_radius(g, rho_tol)?;
        max_rho = max_rho.max(rho);
        if rho >= max_rho - tol {
            candidates.push((spec.canonical(g)?, rho));
        }
    }
    finalize(*spec, reps.len(), max_rho, candidates, tol, false)
}

/// Merge shard records of one cell into the full record. The result is
/// identical to an unsharded run for any shard count.
pub fn merge_records(shards: &[SearchRecord], tol: f64) -> Result<SearchRecord> {
    let first = shards
        .first()
        .ok_or_else(|| Error::Domain("no shard records to merge".into()))?;
    let cell = (first.spec.p, first.spec.q, first.spec.e);
    if shards
        .iter()
        .any(|r| (r.spec.p, r.spec.q, r.spec.e) != cell)
    {
        return Err(Error::Domain("shard records belong to different cells".into()));
    }
    let spec = EnumerationSpec {
        shard: (0, 1),
        ..first.spec
    };
    let class_count = shards.iter().map(|r| r.class_count).sum();
    let max_rho = shards.iter().map(|r| r.max_rho).fold(0.0f64, f64::max);
    let sampled = shards.iter().any(|r| r.verdict == Verdict::Sampled);
    // Each shard keeps everything within tol of its own maximum, which
    // covers the global threshold; re-evaluate rho per candidate so the
    // merged tie list filters exactly as an unsharded run would.
    let rho_tol = (tol / 100.0).min(DEFAULT_RHO_TOL);
    let mut candidates: Vec<(CanonicalForm, f64)> = Vec::new();
    for record in shards {
        for canon in &record.maximizers {
            let g = crate::canonical::graph_from_canonical(canon)?;
            let rho = spectral_radius(&g, rho_tol)?;
            candidates.push((canon.clone(), rho));
        }
    }
    finalize(spec, class_count, max_rho, candidates, tol, sampled)
}

/// Uniform sampling fallback for cells beyond the exhaustive cap. Verdicts
/// are always `Sampled`.
pub fn sample_spectral(
    spec: &EnumerationSpec,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<SearchRecord> {
    spec.validate()?;
    let (p, q, e) = (spec.p, spec.q, spec.e);
    let mut rng = StdRng::seed_from_u64(seed);
    let rho_tol = (tol / 100.0).min(DEFAULT_RHO_TOL);
    let mut seen: HashSet<CanonicalForm> = HashSet::new();
    let mut max_rho = 0.0f64;
    let mut candidates: Vec<(CanonicalForm, f64)> = Vec::new();
    for _ in 0..samples {
        let cells = sample(&mut rng, p * q, e);
        let edges: Vec<(usize, usize)> = cells.iter().map(|c| (c / q, c % q)).collect();
        let g = BipartiteGraph::from_edges(p, q, &edges)?;
        let canon = spec.canonical(&g)?;
        if !seen.insert(canon.clone()) {
            continue;
        }
        let rho = spectral_radius(&g, rho_tol)?;
        max_rho = max_rho.max(rho);
        if rho >= max_rho - tol {
            candidates.push((canon, rho));
        }
    }
    finalize(*spec, seen.len(), max_rho, candidates, tol, true)
}

/// Re-verify the proved extremal statement on one cell: under
/// 0 < pq - e < min(p, q) the enumeration maximum must match
/// rho(K_{p,q}^{{e}}) and the maximizer must be that graph.
pub fn verify_conjecture2(p: usize, q: usize, e: usize, tol: f64) -> Result<SearchRecord> {
    if p < 1 || q < 1 {
        return Err(Error::Domain("parts must be >= 1".into()));
    }
    let pq = p * q;
    if e >= pq || pq - e >= p.min(q) {
        return Err(Error::Domain(format!(
            "verify_conjecture2 requires 0 < pq - e < min(p, q), got (p, q, e) = ({p}, {q}, {e})"
        )));
    }
    max_spectral(&EnumerationSpec::new(p, q, e), tol)
}

/// Scan the concluding conjecture on one cell: look for (s, t) with s <= p,
/// t <= q, 0 <= st - e <= min(s, t) whose extremal graph dominates the true
/// cell maximum. Candidates are tried in decreasing st order and the first
/// hit wins; `witnesses` lists every hit instead.
pub fn scan_conjecture3(
    p: usize,
    q: usize,
    e: usize,
    tol: f64,
) -> Result<(ConjectureVerdict, SearchRecord)> {
    let (hits, record) = scan3_hits(p, q, e, tol, true)?;
    let spec = EnumerationSpec::new(p, q, e);
    Ok((
        ConjectureVerdict {
            spec,
            best_st: hits.first().copied(),
            found: !hits.is_empty(),
        },
        record,
    ))
}

/// All witnessing (s, t) pairs in decreasing st order.
pub fn scan_conjecture3_witnesses(
    p: usize,
    q: usize,
    e: usize,
    tol: f64,
) -> Result<(Vec<(usize, usize)>, SearchRecord)> {
    scan3_hits(p, q, e, tol, false)
}

fn scan3_hits(
    p: usize,
    q: usize,
    e: usize,
    tol: f64,
    stop_at_first: bool,
) -> Result<(Vec<(usize, usize)>, SearchRecord)> {
    let record = max_spectral(&EnumerationSpec::new(p, q, e), tol)?;
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for s in 1..=p {
        for t in 1..=q {
            if s * t >= e && s * t - e <= s.min(t) {
                pairs.push((s, t));
            }
        }
    }
    pairs.sort_by_key(|&(s, t)| (std::cmp::Reverse(s * t), std::cmp::Reverse(s)));
    let mut hits = Vec::new();
    for (s, t) in pairs {
        // st = e means the complete K_{s,t}, admissible by the conjecture's
        // 0 <= st - e boundary.
        let rho_st = if s * t == e {
            (e as f64).sqrt()
        } else {
            rho_k_brace_closed(s, t, e)?
        };
        if rho_st >= record.max_rho - tol {
            hits.push((s, t));
            if stop_at_first {
                break;
            }
        }
    }
    Ok((hits, record))
}

/// Append one record to the JSONL log; the log is append-only and re-runs
/// of a cell add a new line.
pub fn append_record(path: &Path, record: &CellRecord) -> Result<()> {
    let mut file = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)?;
    let line = serde_json::to_string(record).map_err(|e| Error::LogFormat(e.to_string()))?;
    writeln!(file, "{line}")?;
    Ok(())
}

/// Read every record of a JSONL log.
pub fn read_log(path: &Path) -> Result<Vec<CellRecord>> {
    let file = std::fs::File::open(path)?;
    let mut out = Vec::new();
    for (i, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: CellRecord = serde_json::from_str(&line)
            .map_err(|e| Error::LogFormat(format!("line {}: {e}", i + 1)))?;
        out.push(rec);
    }
    Ok(out)
}
