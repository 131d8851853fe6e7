//! Exact spectral radius, equitable quotient matrices, and the row-sum
//! scaling certificate.
//!
//! For a bipartite graph with biadjacency B, the adjacency matrix is
//! A = [[0, B], [B^T, 0]] and rho(G)^2 is the top eigenvalue of the Gram
//! matrix B B^T. Power iteration runs on the smaller Gram matrix of each
//! connected component; the Collatz-Wielandt ratios bracket the eigenvalue
//! from both sides, so convergence is certified rather than assumed.

use crate::bounds;
use crate::error::{Error, Result};
use crate::graph::BipartiteGraph;

/// Default absolute tolerance on rho.
pub const DEFAULT_RHO_TOL: f64 = 1e-10;
/// Default absolute tolerance on rho^2.
pub const DEFAULT_RHO_SQ_TOL: f64 = 1e-9;
/// Power iteration gives up after this many steps.
const ITERATION_CAP: usize = 1_000_000;
/// Dimension limit for the small dense eigensolver.
pub const MAX_SMALL_DIM: usize = 8;

/// Which matrix a quotient is taken of.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuotientOf {
    Adjacency,
    Square,
}

/// Block-average matrix over a vertex partition. Vertices are indexed
/// 0..p (left part) then p..p+q (right part).
#[derive(Debug, Clone)]
pub struct QuotientMatrix {
    pub entries: Vec<Vec<f64>>,
    pub equitable: bool,
    pub partition: Vec<Vec<usize>>,
}

/// Weights and scaled row sums of U^-1 A^2 U for one (s, t) cell, after
/// relabeling vertices in non-increasing degree order.
#[derive(Debug, Clone)]
pub struct CertificateReport {
    pub s: usize,
    pub t: usize,
    pub phi_sq: f64,
    pub x: Vec<f64>,
    pub xprime: Vec<f64>,
    pub row_sums: Vec<f64>,
    pub max_row_sum: f64,
    pub verdict: bool,
}

/// rho(G) to absolute accuracy `tol`, 0 for edgeless graphs. Disconnected
/// graphs take the maximum over connected components, which keeps the
/// iteration matrix irreducible.
pub fn spectral_radius(g: &BipartiteGraph, tol: f64) -> Result<f64> {
    if tol <= 0.0 {
        return Err(Error::Domain(format!("tol must be positive, got {tol}")));
    }
    let mut best = 0.0f64;
    for (lmask, rmask) in g.components() {
        let left: Vec<usize> = (0..g.left_order()).filter(|&i| (lmask >> i) & 1 == 1).collect();
        let right: Vec<usize> = (0..g.right_order()).filter(|&j| (rmask >> j) & 1 == 1).collect();
        let edges: usize = left.iter().map(|&i| g.left_degree(i)).sum();
        if edges == 0 {
            continue;
        }
        let gram = if left.len() <= right.len() {
            gram_rows(&left.iter().map(|&i| g.row(i)).collect::<Vec<_>>())
        } else {
            gram_rows(&right.iter().map(|&j| g.col(j)).collect::<Vec<_>>())
        };
        let lambda = power_top_eigenvalue(&gram, tol * tol)?;
        best = best.max(lambda.sqrt());
    }
    Ok(best)
}

fn gram_rows(rows: &[u64]) -> Vec<Vec<f64>> {
    rows.iter()
        .map(|&a| {
            rows.iter()
                .map(|&b| (a & b).count_ones() as f64)
                .collect()
        })
        .collect()
}

/// Top eigenvalue of an irreducible nonnegative symmetric matrix with
/// positive diagonal, by power iteration from the all-ones vector. Stops
/// when the Collatz-Wielandt interval is below `width` or at the f64 noise
/// floor, whichever is larger.
fn power_top_eigenvalue(m: &[Vec<f64>], width: f64) -> Result<f64> {
    let n = m.len();
    let mut x = vec![1.0f64; n];
    let mut last = (0.0, f64::INFINITY);
    for _ in 0..ITERATION_CAP {
        let mut y = vec![0.0f64; n];
        for (i, row) in m.iter().enumerate() {
            y[i] = row.iter().zip(&x).map(|(a, b)| a * b).sum();
        }
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for i in 0..n {
            let r = y[i] / x[i];
            lo = lo.min(r);
            hi = hi.max(r);
        }
        last = (lo, hi);
        if hi - lo <= width + 16.0 * f64::EPSILON * hi {
            return Ok(0.5 * (lo + hi));
        }
        let norm = y.iter().fold(0.0f64, |m, &v| m.max(v));
        x = y.iter().map(|&v| v / norm).collect();
    }
    Err(Error::Convergence {
        low: last.0,
        high: last.1,
    })
}

/// Quotient of A or A^2 over a vertex partition; entries are exact block
/// row-sum averages and the equitable flag comes from an exact integer
/// per-row check.
pub fn quotient_matrix(
    g: &BipartiteGraph,
    partition: &[Vec<usize>],
    of: QuotientOf,
) -> Result<QuotientMatrix> {
    let n = g.left_order() + g.right_order();
    let mut seen = vec![false; n];
    if partition.is_empty() {
        return Err(Error::Partition("partition has no blocks".into()));
    }
    for block in partition {
        if block.is_empty() {
            return Err(Error::Partition("empty block".into()));
        }
        for &v in block {
            if v >= n {
                return Err(Error::Partition(format!(
                    "index {v} out of range for {n} vertices"
                )));
            }
            if seen[v] {
                return Err(Error::Partition(format!("index {v} appears twice")));
            }
            seen[v] = true;
        }
    }
    if !seen.iter().all(|&s| s) {
        return Err(Error::Partition("partition does not cover all vertices".into()));
    }

    let p = g.left_order();
    let (nl, nr) = g.common_neighbors();
    let entry = |i: usize, j: usize| -> usize {
        match of {
            QuotientOf::Adjacency => {
                if i < p && j >= p {
                    g.has_edge(i, j - p) as usize
                } else if i >= p && j < p {
                    g.has_edge(j, i - p) as usize
                } else {
                    0
                }
            }
            QuotientOf::Square => {
                if i < p && j < p {
                    nl[i][j]
                } else if i >= p && j >= p {
                    nr[i - p][j - p]
                } else {
                    0
                }
            }
        }
    };

    let m = partition.len();
    let mut entries = vec![vec![0.0f64; m]; m];
    let mut equitable = true;
    for (k, bk) in partition.iter().enumerate() {
        for (l, bl) in partition.iter().enumerate() {
            let sums: Vec<usize> = bk
                .iter()
                .map(|&i| bl.iter().map(|&j| entry(i, j)).sum())
                .collect();
            if sums.iter().any(|&s| s != sums[0]) {
                equitable = false;
            }
            let total: usize = sums.iter().sum();
            entries[k][l] = total as f64 / bk.len() as f64;
        }
    }
    Ok(QuotientMatrix {
        entries,
        equitable,
        partition: partition.to_vec(),
    })
}

/// Largest real eigenvalue magnitude of a small matrix with real spectrum.
/// Dimensions up to 4 go through the characteristic polynomial with exact
/// cofactor expansion and bisection; 5 to 8 fall back to shifted power
/// iteration.
pub fn max_eigenvalue_small(m: &[Vec<f64>], tol: f64) -> Result<f64> {
    let n = m.len();
    if n == 0 || n > MAX_SMALL_DIM {
        return Err(Error::Dimension {
            dim: n,
            limit: MAX_SMALL_DIM,
        });
    }
    if m.iter().any(|row| row.len() != n) {
        return Err(Error::InputShape("matrix must be square".into()));
    }
    if n <= 4 {
        let poly = characteristic_polynomial(m);
        let hi = largest_real_root(&poly);
        let lo = largest_real_root(&reflect(&poly));
        Ok(hi.abs().max(lo.abs()))
    } else {
        let shift = 1.0 + m
            .iter()
            .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0f64, f64::max);
        let lambda_max = shifted_power(m, shift, 1.0, tol)? - shift;
        let lambda_min = shift - shifted_power(m, shift, -1.0, tol)?;
        Ok(lambda_max.abs().max(lambda_min.abs()))
    }
}

/// Monic characteristic polynomial det(lambda I - M), coefficients in
/// ascending degree order, computed by cofactor expansion over polynomial
/// entries.
fn characteristic_polynomial(m: &[Vec<f64>]) -> Vec<f64> {
    let n = m.len();
    // Entry (i, j) of M - lambda I as a linear polynomial.
    let entries: Vec<Vec<Vec<f64>>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| vec![m[i][j], if i == j { -1.0 } else { 0.0 }])
                .collect()
        })
        .collect();
    let det = poly_det(&entries);
    // det(M - lambda I) = (-1)^n det(lambda I - M); normalize monic.
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    det.iter().map(|c| c * sign).collect()
}

fn poly_det(m: &[Vec<Vec<f64>>]) -> Vec<f64> {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut det = vec![0.0];
    for col in 0..n {
        let minor: Vec<Vec<Vec<f64>>> = (1..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| j != col)
                    .map(|j| m[i][j].clone())
                    .collect()
            })
            .collect();
        let term = poly_mul(&m[0][col], &poly_det(&minor));
        let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
        det = poly_add(&det, &term.iter().map(|c| c * sign).collect::<Vec<_>>());
    }
    det
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len().max(b.len())];
    for (i, &x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, &x) in b.iter().enumerate() {
        out[i] += x;
    }
    out
}

/// q(lambda) = (-1)^n p(-lambda): monic polynomial whose largest root is
/// minus the smallest root of p.
fn reflect(p: &[f64]) -> Vec<f64> {
    let n = p.len() - 1;
    p.iter()
        .enumerate()
        .map(|(i, &c)| {
            let sign = if (n - i).is_multiple_of(2) { 1.0 } else { -1.0 };
            c * sign
        })
        .collect()
}

fn horner(p: &[f64], x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn derivative(p: &[f64]) -> Vec<f64> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| c * i as f64)
        .collect()
}

/// Largest real root of a monic polynomial with all real roots.
///
/// For such polynomials, m is at least every root iff p and all of its
/// derivatives are nonnegative at m (the derivative roots interlace below the
/// largest root), which gives a bisection predicate robust to multiple roots.
fn largest_real_root(poly: &[f64]) -> f64 {
    let mut chain = vec![poly.to_vec()];
    while chain.last().unwrap().len() > 1 {
        chain.push(derivative(chain.last().unwrap()));
    }
    // Values within evaluation noise count as nonnegative, so near a
    // multiple root the lowest-multiplicity chain member (whose sign is
    // well conditioned) decides the predicate.
    let above = |x: f64| {
        chain.iter().all(|p| {
            let noise: f64 = p
                .iter()
                .enumerate()
                .map(|(i, c)| c.abs() * x.abs().max(1.0).powi(i as i32))
                .sum();
            horner(p, x) >= -8.0 * f64::EPSILON * noise
        })
    };
    let bound = 1.0 + poly[..poly.len() - 1]
        .iter()
        .map(|c| c.abs())
        .fold(0.0f64, f64::max);
    let mut lo = -bound - 1.0;
    let mut hi = bound + 1.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if above(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Power iteration on sign * M + shift * I, whose spectrum is nonnegative
/// when `shift` dominates; returns its top eigenvalue.
fn shifted_power(m: &[Vec<f64>], shift: f64, sign: f64, tol: f64) -> Result<f64> {
    let n = m.len();
    // Slight asymmetry in the start vector avoids starting orthogonal to the
    // top eigenspace.
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.01 * (i + 1) as f64).collect();
    let mut theta_prev = f64::INFINITY;
    let mut last = (0.0, f64::INFINITY);
    for _ in 0..ITERATION_CAP {
        let mut y = vec![0.0f64; n];
        for (i, row) in m.iter().enumerate() {
            y[i] = shift * x[i] + sign * row.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>();
        }
        let xx: f64 = x.iter().map(|v| v * v).sum();
        let theta: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>() / xx;
        let resid = y
            .iter()
            .zip(&x)
            .map(|(yi, xi)| (yi - theta * xi).abs())
            .fold(0.0f64, f64::max);
        let scale = x.iter().map(|v| v.abs()).fold(0.0f64, f64::max);
        last = (theta - resid, theta + resid);
        if (theta - theta_prev).abs() <= 0.25 * tol * theta.abs().max(1.0)
            && resid <= tol.sqrt() * scale.max(1.0)
        {
            return Ok(theta);
        }
        theta_prev = theta;
        let norm = y.iter().map(|v| v.abs()).fold(0.0f64, f64::max);
        if norm == 0.0 {
            return Ok(0.0);
        }
        x = y.iter().map(|v| v / norm).collect();
    }
    Err(Error::Convergence {
        low: last.0,
        high: last.1,
    })
}

/// Build the diagonal scaling U from the degree-derived weights and report the row
/// sums of U^-1 A^2 U. Every row sum is at most phi_{s,t}^2; a violation is
/// an internal bug and comes back as an error.
///
/// Vertices are relabeled in non-increasing degree order (ties broken by
/// original index) before anything else, and `row_sums` follows that order:
/// p left rows first, then q right rows.
pub fn scaling_certificate(
    g: &BipartiteGraph,
    s: usize,
    t: usize,
    tol: f64,
) -> Result<CertificateReport> {
    let (p, q) = (g.left_order(), g.right_order());
    if s < 1 || s > p || t < 1 || t > q {
        return Err(Error::Domain(format!(
            "(s, t) = ({s}, {t}) out of range for ({p}, {q})"
        )));
    }
    let profile = g.degree_profile();
    let params = bounds::phi(&profile, s, t)?;
    let phi_sq = params.phi * params.phi;

    // Sorted vertex order: non-increasing degree, ties by original index.
    let (dl, dr) = g.degrees();
    let mut left: Vec<usize> = (0..p).collect();
    left.sort_by_key(|&i| (std::cmp::Reverse(dl[i]), i));
    let mut right: Vec<usize> = (0..q).collect();
    right.sort_by_key(|&j| (std::cmp::Reverse(dr[j]), j));

    let d = &profile.d;
    let dp = &profile.dprime;
    let d_s = d[s - 1];
    let dp_t = dp[t - 1];
    let excess_left: usize = d[..s - 1].iter().map(|&x| x - d_s).sum();
    let excess_right: usize = dp[..t - 1].iter().map(|&x| x - dp_t).sum();

    // Degenerate branch: phi^2 equals the excess sum exactly when the pivot
    // degree is zero, an integer test that avoids float equality.
    let x: Vec<f64> = (0..s.saturating_sub(1))
        .map(|k| {
            if d_s == 0 {
                1.0
            } else {
                1.0 + (dp_t * (d[k] - d_s)) as f64 / (phi_sq - excess_left as f64)
            }
        })
        .collect();
    let xprime: Vec<f64> = (0..t.saturating_sub(1))
        .map(|l| {
            if dp_t == 0 {
                1.0
            } else {
                1.0 + (d_s * (dp[l] - dp_t)) as f64 / (phi_sq - excess_right as f64)
            }
        })
        .collect();
    debug_assert!(x.iter().chain(&xprime).all(|&w| w >= 1.0));

    let wl: Vec<f64> = (0..p)
        .map(|i| if i < s - 1 { x[i] } else { 1.0 })
        .collect();
    let wr: Vec<f64> = (0..q)
        .map(|j| if j < t - 1 { xprime[j] } else { 1.0 })
        .collect();

    let lrows: Vec<u64> = left.iter().map(|&i| g.row(i)).collect();
    let rcols: Vec<u64> = right.iter().map(|&j| g.col(j)).collect();
    let mut row_sums = Vec::with_capacity(p + q);
    for i in 0..p {
        let sum: f64 = (0..p)
            .map(|k| (lrows[i] & lrows[k]).count_ones() as f64 * wl[k])
            .sum();
        row_sums.push(sum / wl[i]);
    }
    for j in 0..q {
        let sum: f64 = (0..q)
            .map(|l| (rcols[j] & rcols[l]).count_ones() as f64 * wr[l])
            .sum();
        row_sums.push(sum / wr[j]);
    }
    let max_row_sum = row_sums.iter().copied().fold(0.0f64, f64::max);
    let verdict = max_row_sum <= phi_sq + tol;
    if !verdict {
        return Err(Error::CertificateViolation {
            max_row_sum,
            phi_sq,
            tol,
        });
    }
    Ok(CertificateReport {
        s,
        t,
        phi_sq,
        x,
        xprime,
        row_sums,
        max_row_sum,
        verdict,
    })
}
