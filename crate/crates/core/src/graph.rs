//! Bipartite graphs with a fixed bipartition, stored as packed bit rows.
//!
//! The left part U has `p` vertices, the right part V has `q` vertices, and
//! `rows[i]` holds the biadjacency row of u_i with bit j set iff u_i ~ v_j.
//! Parts are capped at 64 so that a row fits one machine word; that is the
//! scale the enumeration machinery is built for.

use crate::error::{Error, Result};

/// Hard cap on each part size; rows must fit a u64.
pub const MAX_PART: usize = 64;

/// A labeled bipartite graph with bipartition orders `(p, q)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BipartiteGraph {
    p: usize,
    q: usize,
    rows: Vec<u64>,
    e: usize,
}

/// Left and right degree sequences sorted non-increasing, plus the edge count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeProfile {
    pub d: Vec<usize>,
    pub dprime: Vec<usize>,
    pub e: usize,
}

/// A witness that a graph is a bipartite sum of a complete bipartite graph
/// K_{s',t'} with a biregular graph `h` on the remaining vertices.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub s_prime: usize,
    pub t_prime: usize,
    pub h: BipartiteGraph,
    pub h_biregular: bool,
}

fn check_parts(p: usize, q: usize) -> Result<()> {
    if p < 1 || q < 1 {
        return Err(Error::Domain(format!(
            "bipartition orders must be >= 1, got ({p}, {q})"
        )));
    }
    if p > MAX_PART || q > MAX_PART {
        return Err(Error::Scale(format!(
            "bipartition orders capped at {MAX_PART}, got ({p}, {q})"
        )));
    }
    Ok(())
}

impl BipartiteGraph {
    /// Build from explicit 0/1 rows.
    pub fn from_biadjacency(rows: &[Vec<u8>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InputShape("no rows given".into()));
        }
        let q = rows[0].len();
        if q == 0 {
            return Err(Error::InputShape("rows must have positive length".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != q {
                return Err(Error::InputShape(format!(
                    "row {i} has length {}, expected {q}",
                    row.len()
                )));
            }
        }
        check_parts(rows.len(), q)?;
        let mut bits = Vec::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            let mut b = 0u64;
            for (j, &v) in row.iter().enumerate() {
                match v {
                    0 => {}
                    1 => b |= 1 << j,
                    other => {
                        return Err(Error::InputValue(format!(
                            "entry ({i}, {j}) is {other}, expected 0 or 1"
                        )));
                    }
                }
            }
            bits.push(b);
        }
        Ok(Self::from_bit_rows_unchecked(rows.len(), q, bits))
    }

    /// Build from packed rows; bits at column q and above must be clear.
    pub fn from_bit_rows(p: usize, q: usize, rows: Vec<u64>) -> Result<Self> {
        check_parts(p, q)?;
        if rows.len() != p {
            return Err(Error::InputShape(format!(
                "expected {p} rows, got {}",
                rows.len()
            )));
        }
        let mask = row_mask(q);
        if rows.iter().any(|r| r & !mask != 0) {
            return Err(Error::InputValue("row has bits beyond column q".into()));
        }
        Ok(Self::from_bit_rows_unchecked(p, q, rows))
    }

    fn from_bit_rows_unchecked(p: usize, q: usize, rows: Vec<u64>) -> Self {
        let e = rows.iter().map(|r| r.count_ones() as usize).sum();
        BipartiteGraph { p, q, rows, e }
    }

    /// Build from an edge list with 0-indexed endpoints.
    pub fn from_edges(p: usize, q: usize, edges: &[(usize, usize)]) -> Result<Self> {
        check_parts(p, q)?;
        let mut rows = vec![0u64; p];
        for &(i, j) in edges {
            if i >= p || j >= q {
                return Err(Error::InputValue(format!(
                    "edge ({i}, {j}) out of range for ({p}, {q})"
                )));
            }
            rows[i] |= 1 << j;
        }
        Ok(Self::from_bit_rows_unchecked(p, q, rows))
    }

    /// The complete bipartite graph K_{p,q}.
    pub fn complete(p: usize, q: usize) -> Result<Self> {
        check_parts(p, q)?;
        Ok(Self::from_bit_rows_unchecked(p, q, vec![row_mask(q); p]))
    }

    /// The edgeless bipartite graph N_{s,t}.
    pub fn empty(s: usize, t: usize) -> Result<Self> {
        check_parts(s, t)?;
        Ok(Self::from_bit_rows_unchecked(s, t, vec![0u64; s]))
    }

    /// Bipartite sum: the union of `self` and `other` plus every edge between
    /// self's left part and other's right part, and between other's left part
    /// and self's right part.
    pub fn bipartite_sum(&self, other: &BipartiteGraph) -> Result<Self> {
        let p = self.p + other.p;
        let q = self.q + other.q;
        check_parts(p, q)?;
        let other_right = row_mask(other.q) << self.q;
        let self_right = row_mask(self.q);
        let mut rows = Vec::with_capacity(p);
        for i in 0..self.p {
            rows.push(self.rows[i] | other_right);
        }
        for i in 0..other.p {
            rows.push(self_right | (other.rows[i] << self.q));
        }
        Ok(Self::from_bit_rows_unchecked(p, q, rows))
    }

    /// K_{p,q} minus `pq - e` edges, all incident on one common vertex in the
    /// partite set of smaller order (ties go to the right part).
    pub fn k_bracket(p: usize, q: usize, e: usize) -> Result<Self> {
        check_parts(p, q)?;
        let pq = p * q;
        if e >= pq {
            return Err(Error::Domain(format!(
                "k_bracket requires pq - e >= 1, got e = {e}, pq = {pq}"
            )));
        }
        let removed = pq - e;
        if removed > p.max(q) {
            return Err(Error::Domain(format!(
                "k_bracket requires pq - e <= max(p, q), got {removed}"
            )));
        }
        let host_left = p < q;
        Ok(Self::deleted_at_host(p, q, removed, host_left))
    }

    /// K_{p,q} minus `pq - e` edges, all incident on one common vertex in the
    /// partite set of larger order (ties go to the left part).
    pub fn k_brace(p: usize, q: usize, e: usize) -> Result<Self> {
        check_parts(p, q)?;
        let pq = p * q;
        if e >= pq {
            return Err(Error::Domain(format!(
                "k_brace requires pq - e >= 1, got e = {e}, pq = {pq}"
            )));
        }
        let removed = pq - e;
        if removed > p.min(q) {
            return Err(Error::Domain(format!(
                "k_brace requires pq - e <= min(p, q), got {removed}"
            )));
        }
        let host_left = p >= q;
        Ok(Self::deleted_at_host(p, q, removed, host_left))
    }

    /// Complete graph with `removed` edges deleted at the last vertex of one
    /// part; the host keeps its first neighbors and loses the last ones.
    fn deleted_at_host(p: usize, q: usize, removed: usize, host_left: bool) -> Self {
        let full = row_mask(q);
        let mut rows = vec![full; p];
        if host_left {
            rows[p - 1] = row_mask(q - removed);
        } else {
            let lost = 1u64 << (q - 1);
            for row in rows.iter_mut().skip(p - removed) {
                *row &= !lost;
            }
        }
        Self::from_bit_rows_unchecked(p, q, rows)
    }

    pub fn left_order(&self) -> usize {
        self.p
    }

    pub fn right_order(&self) -> usize {
        self.q
    }

    pub fn edge_count(&self) -> usize {
        self.e
    }

    pub fn row(&self, i: usize) -> u64 {
        self.rows[i]
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn col(&self, j: usize) -> u64 {
        let mut c = 0u64;
        for i in 0..self.p {
            c |= ((self.rows[i] >> j) & 1) << i;
        }
        c
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        (self.rows[i] >> j) & 1 == 1
    }

    pub fn left_degree(&self, i: usize) -> usize {
        self.rows[i].count_ones() as usize
    }

    pub fn right_degree(&self, j: usize) -> usize {
        self.col(j).count_ones() as usize
    }

    /// Unsorted left and right degree vectors.
    pub fn degrees(&self) -> (Vec<usize>, Vec<usize>) {
        let left = (0..self.p).map(|i| self.left_degree(i)).collect();
        let right = (0..self.q).map(|j| self.right_degree(j)).collect();
        (left, right)
    }

    /// Degree sequences sorted non-increasing.
    pub fn degree_profile(&self) -> DegreeProfile {
        let (mut d, mut dprime) = self.degrees();
        d.sort_unstable_by(|a, b| b.cmp(a));
        dprime.sort_unstable_by(|a, b| b.cmp(a));
        DegreeProfile {
            d,
            dprime,
            e: self.e,
        }
    }

    /// Common-neighbor counts: the Gram matrices B B^T and B^T B entrywise.
    pub fn common_neighbors(&self) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
        let left = (0..self.p)
            .map(|i| {
                (0..self.p)
                    .map(|k| (self.rows[i] & self.rows[k]).count_ones() as usize)
                    .collect()
            })
            .collect();
        let cols: Vec<u64> = (0..self.q).map(|j| self.col(j)).collect();
        let right = (0..self.q)
            .map(|j| {
                (0..self.q)
                    .map(|l| (cols[j] & cols[l]).count_ones() as usize)
                    .collect()
            })
            .collect();
        (left, right)
    }

    /// Both degree sequences constant.
    pub fn is_biregular(&self) -> bool {
        let (d, dp) = self.degrees();
        d.iter().all(|&x| x == d[0]) && dp.iter().all(|&x| x == dp[0])
    }

    /// Connectivity over all p + q vertices.
    pub fn is_connected(&self) -> bool {
        let all_left = row_mask(self.p);
        let all_right = row_mask(self.q);
        let cols: Vec<u64> = (0..self.q).map(|j| self.col(j)).collect();
        let mut vl: u64 = 1;
        let mut vr: u64 = 0;
        loop {
            let mut nr = vr;
            for i in 0..self.p {
                if (vl >> i) & 1 == 1 {
                    nr |= self.rows[i];
                }
            }
            let mut nl = vl;
            for (j, &col) in cols.iter().enumerate() {
                if (nr >> j) & 1 == 1 {
                    nl |= col;
                }
            }
            if nl == vl && nr == vr {
                break;
            }
            vl = nl;
            vr = nr;
        }
        vl == all_left && vr == all_right
    }

    /// Connected components as (left mask, right mask) pairs.
    pub fn components(&self) -> Vec<(u64, u64)> {
        let cols: Vec<u64> = (0..self.q).map(|j| self.col(j)).collect();
        let mut seen_l: u64 = 0;
        let mut seen_r: u64 = 0;
        let mut out = Vec::new();
        loop {
            let (mut vl, mut vr) = if let Some(i) = (0..self.p).find(|&i| (seen_l >> i) & 1 == 0) {
                (1u64 << i, 0u64)
            } else if let Some(j) = (0..self.q).find(|&j| (seen_r >> j) & 1 == 0) {
                (0u64, 1u64 << j)
            } else {
                break;
            };
            loop {
                let mut nr = vr;
                for i in 0..self.p {
                    if (vl >> i) & 1 == 1 {
                        nr |= self.rows[i];
                    }
                }
                let mut nl = vl;
                for (j, &col) in cols.iter().enumerate() {
                    if (nr >> j) & 1 == 1 {
                        nl |= col;
                    }
                }
                if nl == vl && nr == vr {
                    break;
                }
                vl = nl;
                vr = nr;
            }
            seen_l |= vl;
            seen_r |= vr;
            out.push((vl, vr));
        }
        out
    }

    /// If the graph is a bipartite sum K_{s',t'} + H with H biregular, return
    /// the witness. Biregular graphs decompose with s' = t' = 0; otherwise s'
    /// and t' count the vertices of full degree, and the decomposition exists
    /// only if the remaining degrees are constant on each side.
    pub fn decompose_ks_plus_biregular(&self) -> Result<Option<Decomposition>> {
        if !self.is_connected() {
            return Err(Error::Precondition(
                "decompose_ks_plus_biregular requires a connected graph".into(),
            ));
        }
        if self.is_biregular() {
            return Ok(Some(Decomposition {
                s_prime: 0,
                t_prime: 0,
                h: self.clone(),
                h_biregular: true,
            }));
        }
        let (dl, dr) = self.degrees();
        let full_left: Vec<usize> = (0..self.p).filter(|&i| dl[i] == self.q).collect();
        let full_right: Vec<usize> = (0..self.q).filter(|&j| dr[j] == self.p).collect();
        let s_prime = full_left.len();
        let t_prime = full_right.len();
        // Not biregular, so neither part can be entirely full.
        debug_assert!(s_prime < self.p && t_prime < self.q);
        let rest_left: Vec<usize> = (0..self.p).filter(|&i| dl[i] < self.q).collect();
        let rest_right: Vec<usize> = (0..self.q).filter(|&j| dr[j] < self.p).collect();
        if !rest_left.iter().all(|&i| dl[i] == dl[rest_left[0]])
            || !rest_right.iter().all(|&j| dr[j] == dr[rest_right[0]])
        {
            return Ok(None);
        }
        let mut h_rows = Vec::with_capacity(rest_left.len());
        for &i in &rest_left {
            let mut r = 0u64;
            for (jj, &j) in rest_right.iter().enumerate() {
                r |= (self.rows[i] >> j & 1) << jj;
            }
            h_rows.push(r);
        }
        let h = BipartiteGraph::from_bit_rows_unchecked(rest_left.len(), rest_right.len(), h_rows);
        if !h.is_biregular() {
            return Ok(None);
        }
        // Reconstruct and compare: full vertices must see the whole opposite
        // part, everything else is exactly h.
        let full_right_mask = full_right.iter().fold(0u64, |m, &j| m | 1 << j);
        for (i, &deg) in dl.iter().enumerate() {
            let expected = if deg == self.q {
                row_mask(self.q)
            } else {
                let hi = rest_left.iter().position(|&x| x == i).unwrap();
                let mut r = full_right_mask;
                for (jj, &j) in rest_right.iter().enumerate() {
                    r |= (h.rows[hi] >> jj & 1) << j;
                }
                r
            };
            if self.rows[i] != expected {
                return Ok(None);
            }
        }
        Ok(Some(Decomposition {
            s_prime,
            t_prime,
            h,
            h_biregular: true,
        }))
    }

    /// Part-swapped copy (biadjacency transpose).
    pub fn transpose(&self) -> Self {
        let rows = (0..self.q).map(|j| self.col(j)).collect();
        Self::from_bit_rows_unchecked(self.q, self.p, rows)
    }

    /// Relabel vertices: new row `rp[i]` is old row `i`, new column `cp[j]`
    /// is old column `j`.
    pub fn permuted(&self, rp: &[usize], cp: &[usize]) -> Self {
        let mut rows = vec![0u64; self.p];
        for i in 0..self.p {
            let mut r = 0u64;
            for (j, &cj) in cp.iter().enumerate() {
                r |= (self.rows[i] >> j & 1) << cj;
            }
            rows[rp[i]] = r;
        }
        Self::from_bit_rows_unchecked(self.p, self.q, rows)
    }
}

pub(crate) fn row_mask(q: usize) -> u64 {
    if q >= 64 { !0u64 } else { (1u64 << q) - 1 }
}

impl DegreeProfile {
    /// Validate the type invariants: sorted non-increasing, equal sums, and
    /// degrees bounded by the opposite part order.
    pub fn new(d: Vec<usize>, dprime: Vec<usize>) -> Result<Self> {
        if d.is_empty() || dprime.is_empty() {
            return Err(Error::Domain("degree sequences must be nonempty".into()));
        }
        if d.windows(2).any(|w| w[0] < w[1]) || dprime.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Domain("degree sequences must be non-increasing".into()));
        }
        if d[0] > dprime.len() || dprime[0] > d.len() {
            return Err(Error::Domain(
                "degrees exceed the opposite bipartition order".into(),
            ));
        }
        let e: usize = d.iter().sum();
        if dprime.iter().sum::<usize>() != e {
            return Err(Error::Domain("degree sums differ".into()));
        }
        Ok(DegreeProfile { d, dprime, e })
    }

    pub fn left_order(&self) -> usize {
        self.d.len()
    }

    pub fn right_order(&self) -> usize {
        self.dprime.len()
    }
}
