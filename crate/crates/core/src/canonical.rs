//! Canonical forms under independent row and column permutations.
//!
//! Two graphs are part-respecting isomorphic iff their canonical forms are
//! equal; parts are never swapped, even when p = q. The form is computed by
//! exact minimization: iterate every permutation of the smaller side and sort
//! the other side, which realizes the true orbit minimum at desk scale.

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::BipartiteGraph;

/// Exact minimization is limited to this many vertices on the smaller side.
pub const MAX_CANONICAL_SIDE: usize = 8;

/// Orbit representative of a biadjacency matrix, serialized as
/// `"pxq:row/row/..."` with `0`/`1` characters.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CanonicalForm(String);

impl CanonicalForm {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn as_bytes(&self) -> &[u8] {
        self.0.as_bytes()
    }
}

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn render(p: usize, q: usize, rows: &[u64]) -> CanonicalForm {
    let mut s = format!("{p}x{q}:");
    for (i, &row) in rows.iter().enumerate() {
        if i > 0 {
            s.push('/');
        }
        for j in 0..q {
            s.push(if (row >> j) & 1 == 1 { '1' } else { '0' });
        }
    }
    CanonicalForm(s)
}

/// Canonical rows: minimize over permutations of the smaller side while the
/// larger side is sorted, which scans the whole orbit.
fn canonical_rows(g: &BipartiteGraph) -> Result<Vec<u64>> {
    let (p, q) = (g.left_order(), g.right_order());
    if p.min(q) > MAX_CANONICAL_SIDE {
        return Err(Error::Scale(format!(
            "canonical form needs min(p, q) <= {MAX_CANONICAL_SIDE}, got ({p}, {q})"
        )));
    }
    if p <= q {
        let mut best: Option<Vec<u64>> = None;
        let mut best_rows: Vec<u64> = Vec::new();
        for perm in (0..p).permutations(p) {
            let permuted: Vec<u64> = perm.iter().map(|&i| g.row(i)).collect();
            let mut cols: Vec<u64> = (0..q)
                .map(|j| {
                    let mut c = 0u64;
                    for (i, &row) in permuted.iter().enumerate() {
                        c |= ((row >> j) & 1) << i;
                    }
                    c
                })
                .collect();
            cols.sort_unstable();
            if best.as_ref().is_none_or(|b| cols < *b) {
                let mut rows = vec![0u64; p];
                for (j, &c) in cols.iter().enumerate() {
                    for (i, row) in rows.iter_mut().enumerate() {
                        *row |= ((c >> i) & 1) << j;
                    }
                }
                best = Some(cols);
                best_rows = rows;
            }
        }
        Ok(best_rows)
    } else {
        let cols: Vec<u64> = (0..q).map(|j| g.col(j)).collect();
        let mut best: Option<Vec<u64>> = None;
        for perm in (0..q).permutations(q) {
            let mut rows: Vec<u64> = (0..p)
                .map(|i| {
                    let mut r = 0u64;
                    for (jj, &j) in perm.iter().enumerate() {
                        r |= ((cols[j] >> i) & 1) << jj;
                    }
                    r
                })
                .collect();
            rows.sort_unstable();
            if best.as_ref().is_none_or(|b| rows < *b) {
                best = Some(rows);
            }
        }
        Ok(best.unwrap())
    }
}

impl BipartiteGraph {
    /// Representation invariant under independent row and column
    /// permutations; parts are not swapped.
    pub fn canonical_form(&self) -> Result<CanonicalForm> {
        let rows = canonical_rows(self)?;
        Ok(render(self.left_order(), self.right_order(), &rows))
    }

    /// Canonical form that additionally identifies a square graph with its
    /// part swap. Equals `canonical_form` when p != q.
    pub fn canonical_form_transpose_deduped(&self) -> Result<CanonicalForm> {
        let own = self.canonical_form()?;
        if self.left_order() != self.right_order() {
            return Ok(own);
        }
        let flipped = self.transpose().canonical_form()?;
        Ok(own.min(flipped))
    }
}

/// Parse a canonical string back into the representative graph.
pub fn graph_from_canonical(form: &CanonicalForm) -> Result<BipartiteGraph> {
    let s = form.as_str();
    let bad = || Error::LogFormat(format!("malformed canonical form {s:?}"));
    let (dims, body) = s.split_once(':').ok_or_else(bad)?;
    let (p, q) = dims.split_once('x').ok_or_else(bad)?;
    let p: usize = p.parse().map_err(|_| bad())?;
    let q: usize = q.parse().map_err(|_| bad())?;
    let rows: Vec<Vec<u8>> = body
        .split('/')
        .map(|row| row.bytes().map(|b| b.wrapping_sub(b'0')).collect())
        .collect();
    if rows.len() != p || rows.iter().any(|r| r.len() != q) {
        return Err(bad());
    }
    BipartiteGraph::from_biadjacency(&rows).map_err(|_| bad())
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Number of labeled biadjacency matrices isomorphic to `g`, i.e.
/// p! q! / |Aut(g)| where Aut fixes both parts.
pub fn labeled_orbit_size(g: &BipartiteGraph) -> Result<u64> {
    let (p, q) = (g.left_order(), g.right_order());
    if p.min(q) > MAX_CANONICAL_SIDE {
        return Err(Error::Scale(format!(
            "orbit size needs min(p, q) <= {MAX_CANONICAL_SIDE}, got ({p}, {q})"
        )));
    }
    // Count stabilizer pairs (sigma, tau): iterate the smaller side, and for
    // each sigma the tau choices permute equal vectors of the other side.
    let aut = if p <= q {
        let base = multiset(&(0..q).map(|j| g.col(j)).collect::<Vec<_>>());
        let mut count: u64 = 0;
        for perm in (0..p).permutations(p) {
            let permuted: Vec<u64> = perm.iter().map(|&i| g.row(i)).collect();
            let cols: Vec<u64> = (0..q)
                .map(|j| {
                    let mut c = 0u64;
                    for (i, &row) in permuted.iter().enumerate() {
                        c |= ((row >> j) & 1) << i;
                    }
                    c
                })
                .collect();
            if multiset(&cols) == base {
                count += base.values().map(|&m| factorial(m)).product::<u64>();
            }
        }
        count
    } else {
        let base = multiset(g.rows());
        let cols: Vec<u64> = (0..q).map(|j| g.col(j)).collect();
        let mut count: u64 = 0;
        for perm in (0..q).permutations(q) {
            let rows: Vec<u64> = (0..p)
                .map(|i| {
                    let mut r = 0u64;
                    for (jj, &j) in perm.iter().enumerate() {
                        r |= ((cols[j] >> i) & 1) << jj;
                    }
                    r
                })
                .collect();
            if multiset(&rows) == base {
                count += base.values().map(|&m| factorial(m)).product::<u64>();
            }
        }
        count
    };
    Ok(factorial(p) * factorial(q) / aut)
}

fn multiset(v: &[u64]) -> HashMap<u64, usize> {
    let mut m = HashMap::new();
    for &x in v {
        *m.entry(x).or_insert(0) += 1;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(rows: &[&str]) -> BipartiteGraph {
        let rows: Vec<Vec<u8>> = rows
            .iter()
            .map(|r| r.bytes().map(|b| b - b'0').collect())
            .collect();
        BipartiteGraph::from_biadjacency(&rows).unwrap()
    }

    #[test]
    fn column_and_row_swaps_collapse() {
        assert_eq!(
            g(&["10", "01"]).canonical_form().unwrap(),
            g(&["01", "10"]).canonical_form().unwrap()
        );
        assert_eq!(
            g(&["11", "00"]).canonical_form().unwrap(),
            g(&["00", "11"]).canonical_form().unwrap()
        );
    }

    #[test]
    fn row_pair_differs_from_column_pair() {
        // Exhausting all 2x2 row/column permutations confirms these orbits
        // are disjoint.
        let a = g(&["11", "00"]);
        let b = g(&["10", "10"]);
        for rp in [[0, 1], [1, 0]] {
            for cp in [[0, 1], [1, 0]] {
                assert_ne!(a.permuted(&rp, &cp), b);
            }
        }
        assert_ne!(a.canonical_form().unwrap(), b.canonical_form().unwrap());
    }

    #[test]
    fn transpose_dedupe_merges_square_mirror_classes() {
        let a = g(&["11", "10"]);
        let b = a.transpose();
        assert_eq!(a.canonical_form().unwrap(), b.canonical_form().unwrap());
        let c = g(&["110", "100", "100"]);
        let d = c.transpose();
        assert_ne!(c.canonical_form().unwrap(), d.canonical_form().unwrap());
        assert_eq!(
            c.canonical_form_transpose_deduped().unwrap(),
            d.canonical_form_transpose_deduped().unwrap()
        );
    }

    #[test]
    fn canonical_invariant_under_permutation() {
        let base = g(&["1010", "0110", "1101"]);
        let canon = base.canonical_form().unwrap();
        let rps = [[0, 1, 2], [2, 0, 1], [1, 2, 0]];
        let cps = [[0, 1, 2, 3], [3, 2, 1, 0], [1, 3, 0, 2]];
        for rp in &rps {
            for cp in &cps {
                assert_eq!(base.permuted(rp, cp).canonical_form().unwrap(), canon);
            }
        }
    }

    #[test]
    fn orbit_sizes() {
        // K_{2,2} is invariant under all 4 row/col permutation pairs.
        assert_eq!(
            labeled_orbit_size(&BipartiteGraph::complete(2, 2).unwrap()).unwrap(),
            1
        );
        // A single edge in a 2x2 grid can sit in 4 places.
        assert_eq!(labeled_orbit_size(&g(&["10", "00"])).unwrap(), 4);
        // One-row graphs: orbits are column choices.
        assert_eq!(labeled_orbit_size(&g(&["110"])).unwrap(), 3);
    }
}
