//! The phi_{s,t} family of sharp upper bounds on the spectral radius, its
//! closed-form specializations, the two-variable function in the minimum
//! degrees, and the closed-form radii of the extremal graphs.
//!
//! For degree sequences d_1 >= ... >= d_p and d'_1 >= ... >= d'_q,
//!
//!   X_{s,t} = d_s d'_t + sum_{i<s} (d_i - d_s) + sum_{j<t} (d'_j - d'_t)
//!   Y_{s,t} = sum_{i<s} (d_i - d_s) * sum_{j<t} (d'_j - d'_t)
//!   phi_{s,t} = sqrt((X + sqrt(X^2 - 4Y)) / 2)
//!
//! and rho(G) <= phi_{s,t} for every cell, with equality (connected case)
//! exactly when G is a bipartite sum K_{s',t'} + H, s' < s, t' < t, H
//! biregular. X and Y are kept in exact integer arithmetic; only the final
//! square roots are floating point.

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, Decomposition, DegreeProfile};
use crate::spectral::{DEFAULT_RHO_TOL, spectral_radius};

/// Relative tolerance used to flag grid cells as tight against rho.
pub const TIGHTNESS_REL_TOL: f64 = 1e-7;

/// One evaluated bound cell with its exact integer ingredients.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiParams {
    pub s: usize,
    pub t: usize,
    pub d_s: usize,
    pub d_t_prime: usize,
    pub excess_left: i64,
    pub excess_right: i64,
    /// X_{s,t}, exact.
    pub x: i64,
    /// Y_{s,t}, exact.
    pub y: i64,
    pub phi: f64,
}

/// phi_{s,t} over every cell, with the minimizing cell and tightness flags.
#[derive(Debug, Clone)]
pub struct BoundGrid {
    /// values[s-1][t-1] = phi_{s,t}.
    pub values: Vec<Vec<f64>>,
    /// First minimizing cell in row-major order, 1-indexed.
    pub best: (usize, usize),
    pub best_value: f64,
    pub rho: f64,
    /// Cells with phi = rho within `TIGHTNESS_REL_TOL`, 1-indexed.
    pub tight_cells: Vec<(usize, usize)>,
}

/// A classical bound value plus its equality-case diagnostic.
#[derive(Debug, Clone, Copy)]
pub struct ClassicalBound {
    pub value: f64,
    pub equality_case: bool,
}

/// Outcome of checking the equality characterization at one cell.
#[derive(Debug, Clone)]
pub struct EqualityDiagnosis {
    pub tight: bool,
    pub phi: f64,
    pub rho: f64,
    pub decomposition: Option<Decomposition>,
    /// Decomposition exists with s' < s and t' < t.
    pub structural: bool,
}

fn phi_from_xy(x: i64, y: i64) -> f64 {
    let disc = x * x - 4 * y;
    debug_assert!(disc >= 0);
    let phi_sq = 0.5 * (x as f64 + (disc as f64).sqrt());
    phi_sq.sqrt()
}

/// Evaluate phi_{s,t} on a degree profile, 1-indexed cell.
pub fn phi(profile: &DegreeProfile, s: usize, t: usize) -> Result<PhiParams> {
    let (p, q) = (profile.left_order(), profile.right_order());
    if s < 1 || s > p || t < 1 || t > q {
        return Err(Error::Domain(format!(
            "(s, t) = ({s}, {t}) out of range for ({p}, {q})"
        )));
    }
    let d_s = profile.d[s - 1];
    let d_t_prime = profile.dprime[t - 1];
    let excess_left: i64 = profile.d[..s - 1].iter().map(|&d| (d - d_s) as i64).sum();
    let excess_right: i64 = profile.dprime[..t - 1]
        .iter()
        .map(|&d| (d - d_t_prime) as i64)
        .sum();
    let x = d_s as i64 * d_t_prime as i64 + excess_left + excess_right;
    let y = excess_left * excess_right;
    let phi = phi_from_xy(x, y);
    debug_assert!(phi * phi >= excess_left.max(excess_right) as f64 - 1e-9);
    Ok(PhiParams {
        s,
        t,
        d_s,
        d_t_prime,
        excess_left,
        excess_right,
        x,
        y,
        phi,
    })
}

/// Full grid of phi values compared against the exact spectral radius.
pub fn phi_grid(g: &BipartiteGraph, tol: f64) -> Result<BoundGrid> {
    let profile = g.degree_profile();
    let (p, q) = (g.left_order(), g.right_order());
    let mut values = vec![vec![0.0f64; q]; p];
    let mut best = (1, 1);
    let mut best_value = f64::INFINITY;
    for s in 1..=p {
        for t in 1..=q {
            let v = phi(&profile, s, t)?.phi;
            values[s - 1][t - 1] = v;
            if v < best_value {
                best_value = v;
                best = (s, t);
            }
        }
    }
    let rho = spectral_radius(g, tol)?;
    let mut tight_cells = Vec::new();
    for s in 1..=p {
        for t in 1..=q {
            if (values[s - 1][t - 1] - rho).abs() <= TIGHTNESS_REL_TOL * rho.max(1.0) {
                tight_cells.push((s, t));
            }
        }
    }
    Ok(BoundGrid {
        values,
        best,
        best_value,
        rho,
        tight_cells,
    })
}

/// Closed form phi_{1,q} = sqrt(e - (q - d_1) d'_q).
pub fn phi_1q(profile: &DegreeProfile) -> f64 {
    let q = profile.right_order();
    let inner = profile.e as i64
        - (q as i64 - profile.d[0] as i64) * profile.dprime[q - 1] as i64;
    (inner as f64).sqrt()
}

/// Closed form phi_{p,1} = sqrt(e - (p - d'_1) d_p).
pub fn phi_p1(profile: &DegreeProfile) -> f64 {
    let p = profile.left_order();
    let inner = profile.e as i64
        - (p as i64 - profile.dprime[0] as i64) * profile.d[p - 1] as i64;
    (inner as f64).sqrt()
}

fn check_closed_form_domain(p: i64, q: i64, e: i64, d_p: i64, d_q_prime: i64) -> Result<()> {
    if p < 1 || q < 1 || e < 0 || d_p < 0 || d_q_prime < 0 {
        return Err(Error::Domain(format!(
            "invalid scalars (p, q, e, d_p, d'_q) = ({p}, {q}, {e}, {d_p}, {d_q_prime})"
        )));
    }
    if p * d_p > e || q * d_q_prime > e {
        return Err(Error::Domain(format!(
            "need p d_p <= e and q d'_q <= e, got ({p}*{d_p}, {q}*{d_q_prime}) vs {e}"
        )));
    }
    Ok(())
}

/// phi_{p,q} as a function of the five scalars alone:
/// X = 2e - (p d_p + q d'_q - d_p d'_q), Y = (e - p d_p)(e - q d'_q).
pub fn phi_pq_closed(p: i64, q: i64, e: i64, d_p: i64, d_q_prime: i64) -> Result<f64> {
    check_closed_form_domain(p, q, e, d_p, d_q_prime)?;
    let w = p * d_p + q * d_q_prime - d_p * d_q_prime;
    let x = 2 * e - w;
    let y = (e - p * d_p) * (e - q * d_q_prime);
    Ok(phi_from_xy(x, y))
}

/// Real-valued variant of `phi_pq_closed`, used for finite differencing.
pub fn phi_pq_closed_real(p: f64, q: f64, e: f64, d_p: f64, d_q_prime: f64) -> f64 {
    let w = p * d_p + q * d_q_prime - d_p * d_q_prime;
    let x = 2.0 * e - w;
    let y = (e - p * d_p) * (e - q * d_q_prime);
    (0.5 * (x + (x * x - 4.0 * y).sqrt())).sqrt()
}

/// Analytic partial derivative of 2 phi_{p,q}^2 with respect to d_p:
///
///   -p + d'_q + (W (p - d'_q) - 2 d'_q (pq - e)) / sqrt(W^2 - 4 d_p d'_q (pq - e))
///
/// with W = p d_p + q d'_q - d_p d'_q. Strictly negative on the domain
/// 1 <= d'_q <= p - 1, q d'_q <= e < pq.
pub fn phi_pq_partial_dp(p: i64, q: i64, e: i64, d_p: i64, d_q_prime: i64) -> Result<f64> {
    check_closed_form_domain(p, q, e, d_p, d_q_prime)?;
    if d_q_prime < 1 || d_q_prime > p - 1 {
        return Err(Error::Domain(format!(
            "need 1 <= d'_q <= p - 1, got d'_q = {d_q_prime}, p = {p}"
        )));
    }
    if e >= p * q {
        return Err(Error::Domain(format!(
            "need e < pq, got e = {e}, pq = {}",
            p * q
        )));
    }
    let w = p * d_p + q * d_q_prime - d_p * d_q_prime;
    let disc = w * w - 4 * d_p * d_q_prime * (p * q - e);
    debug_assert!(disc > 0);
    let numerator = (w * (p - d_q_prime) - 2 * d_q_prime * (p * q - e)) as f64;
    Ok((d_q_prime - p) as f64 + numerator / (disc as f64).sqrt())
}

fn check_deleted_domain(p: usize, q: usize, e: usize, limit: usize, name: &str) -> Result<()> {
    let pq = p * q;
    if e >= pq || pq - e > limit {
        return Err(Error::Domain(format!(
            "{name} requires 1 <= pq - e <= {limit}, got (p, q, e) = ({p}, {q}, {e})"
        )));
    }
    Ok(())
}

/// Closed-form spectral radius of K_{p,q}^{{e}}:
/// sqrt((e + sqrt(e^2 - 4 (q-1)(p - pq + e)(pq - e))) / 2) for p <= q,
/// with parts swapped otherwise.
pub fn rho_k_brace_closed(p: usize, q: usize, e: usize) -> Result<f64> {
    if p < 1 || q < 1 {
        return Err(Error::Domain("parts must be >= 1".into()));
    }
    check_deleted_domain(p, q, e, p.min(q), "rho_k_brace_closed")?;
    let (a, b) = (p.min(q) as i64, p.max(q) as i64);
    let e = e as i64;
    let inner = e * e - 4 * (b - 1) * (a - a * b + e) * (a * b - e);
    debug_assert!(inner >= 0);
    Ok((0.5 * (e as f64 + (inner as f64).sqrt())).sqrt())
}

/// Closed-form spectral radius of K_{p,q}^{[e]} = phi_{p,q}(q - pq + e, p - 1)
/// for p <= q, with parts swapped otherwise.
pub fn rho_k_bracket_closed(p: usize, q: usize, e: usize) -> Result<f64> {
    if p < 1 || q < 1 {
        return Err(Error::Domain("parts must be >= 1".into()));
    }
    check_deleted_domain(p, q, e, p.max(q), "rho_k_bracket_closed")?;
    let (a, b) = (p.min(q) as i64, p.max(q) as i64);
    let e = e as i64;
    phi_pq_closed(a, b, e, b - a * b + e, a - 1)
}

/// rho(G) <= sqrt(e), equality iff G is a complete bipartite graph plus
/// isolated vertices.
pub fn bound_sqrt_e(g: &BipartiteGraph) -> ClassicalBound {
    let value = (g.edge_count() as f64).sqrt();
    let live_right: Vec<usize> = (0..g.right_order())
        .filter(|&j| g.right_degree(j) > 0)
        .collect();
    let full = live_right.iter().fold(0u64, |m, &j| m | 1 << j);
    let equality_case = (0..g.left_order())
        .filter(|&i| g.left_degree(i) > 0)
        .all(|i| g.row(i) == full);
    ClassicalBound {
        value,
        equality_case,
    }
}

/// rho(G) <= sqrt(d_1 d'_1); the equality diagnostic applies to connected
/// graphs and reports biregularity.
pub fn bound_d1d1(g: &BipartiteGraph) -> ClassicalBound {
    let profile = g.degree_profile();
    let value = ((profile.d[0] * profile.dprime[0]) as f64).sqrt();
    ClassicalBound {
        value,
        equality_case: g.is_connected() && g.is_biregular(),
    }
}

/// Check numeric tightness of phi_{s,t} against the structural
/// characterization; the two must agree on connected graphs, and a
/// disagreement is an internal bug surfaced as `TheoremViolation`.
pub fn equality_case_check(
    g: &BipartiteGraph,
    s: usize,
    t: usize,
    tol: f64,
) -> Result<EqualityDiagnosis> {
    if !g.is_connected() {
        return Err(Error::Precondition(
            "equality_case_check requires a connected graph".into(),
        ));
    }
    let profile = g.degree_profile();
    let params = phi(&profile, s, t)?;
    let rho = spectral_radius(g, (tol / 4.0).min(DEFAULT_RHO_TOL))?;
    let tight = (params.phi - rho).abs() <= tol;
    let decomposition = g.decompose_ks_plus_biregular()?;
    let structural = decomposition
        .as_ref()
        .is_some_and(|d| d.s_prime < s && d.t_prime < t);
    if tight != structural {
        return Err(Error::TheoremViolation(format!(
            "cell ({s}, {t}): tight = {tight} (phi = {}, rho = {rho}) but structural = {structural}",
            params.phi
        )));
    }
    Ok(EqualityDiagnosis {
        tight,
        phi: params.phi,
        rho,
        decomposition,
        structural,
    })
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
    fn phi_k235_cell_23() {
        let profile = g(&["111", "110"]).degree_profile();
        let params = phi(&profile, 2, 3).unwrap();
        assert_eq!((params.x, params.y), (5, 2));
        let expected = ((5.0 + 17f64.sqrt()) / 2.0).sqrt();
        assert!((params.phi - expected).abs() < 1e-14);
    }

    #[test]
    fn phi_11_is_sqrt_d1d1() {
        for graph in [
            g(&["111", "110"]),
            g(&["1010", "0110", "1101"]),
            BipartiteGraph::complete(3, 4).unwrap(),
        ] {
            let profile = graph.degree_profile();
            let params = phi(&profile, 1, 1).unwrap();
            let expected = ((profile.d[0] * profile.dprime[0]) as f64).sqrt();
            assert!((params.phi - expected).abs() < 1e-13);
        }
    }

    #[test]
    fn phi_path_four_is_golden_ratio() {
        let profile = DegreeProfile::new(vec![2, 1], vec![2, 1]).unwrap();
        let params = phi(&profile, 2, 2).unwrap();
        assert_eq!((params.x, params.y), (3, 1));
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((params.phi - golden).abs() < 1e-14);
    }

    #[test]
    fn phi_duplicate_degree_cells_agree() {
        // Equal pivot degrees give equal cells: d_{s-1} = d_s forces
        let profile = g(&["1110", "1110", "1001"]).degree_profile();
        for t in 1..=4 {
            let a = phi(&profile, 1, t).unwrap().phi;
            let b = phi(&profile, 2, t).unwrap().phi;
            assert_eq!(profile.d[0], profile.d[1]);
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn phi_rejects_out_of_range() {
        let profile = g(&["11", "10"]).degree_profile();
        assert!(matches!(phi(&profile, 0, 1), Err(Error::Domain(_))));
        assert!(matches!(phi(&profile, 3, 1), Err(Error::Domain(_))));
        assert!(matches!(phi(&profile, 1, 3), Err(Error::Domain(_))));
    }

    #[test]
    fn grid_k235() {
        let grid = phi_grid(&g(&["111", "110"]), 1e-10).unwrap();
        assert_eq!(grid.best, (2, 3));
        let expected = ((5.0 + 17f64.sqrt()) / 2.0).sqrt();
        assert!((grid.best_value - expected).abs() < 1e-10);
        assert!((grid.values[0][0] - 6f64.sqrt()).abs() < 1e-13);
        assert!(grid.tight_cells.contains(&(2, 3)));
        assert!(!grid.tight_cells.contains(&(1, 1)));
    }

    #[test]
    fn grid_complete_all_tight() {
        let grid = phi_grid(&BipartiteGraph::complete(3, 4).unwrap(), 1e-10).unwrap();
        for row in &grid.values {
            for &v in row {
                assert!((v - 12f64.sqrt()).abs() < 1e-12);
            }
        }
        assert_eq!(grid.tight_cells.len(), 12);
    }

    #[test]
    fn grid_single_edge_cell_22_is_sqrt_e() {
        // d = (1, 0), d' = (1, 0): X = 2, Y = 1, phi = 1 = sqrt(e).
        let grid = phi_grid(&g(&["10", "00"]), 1e-10).unwrap();
        assert!((grid.values[1][1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn closed_forms_1q_p1() {
        let k235 = g(&["111", "110"]).degree_profile();
        assert!((phi_1q(&k235) - 5f64.sqrt()).abs() < 1e-14);
        let kpq = BipartiteGraph::complete(3, 4).unwrap().degree_profile();
        assert!((phi_1q(&kpq) - 12f64.sqrt()).abs() < 1e-14);
        let path = DegreeProfile::new(vec![2, 1], vec![2, 1]).unwrap();
        assert!((phi_1q(&path) - 3f64.sqrt()).abs() < 1e-14);

        // The closed forms agree with the grid cells exactly.
        for graph in [g(&["111", "110"]), g(&["1010", "0110", "1101"])] {
            let profile = graph.degree_profile();
            let p = profile.left_order();
            let q = profile.right_order();
            assert!((phi_1q(&profile) - phi(&profile, 1, q).unwrap().phi).abs() < 1e-12);
            assert!((phi_p1(&profile) - phi(&profile, p, 1).unwrap().phi).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_form_pq() {
        let expected = ((5.0 + 17f64.sqrt()) / 2.0).sqrt();
        assert!((phi_pq_closed(2, 3, 5, 2, 1).unwrap() - expected).abs() < 1e-14);
        // d_p = 0 collapses to sqrt(e).
        assert!((phi_pq_closed(3, 3, 7, 0, 1).unwrap() - 7f64.sqrt()).abs() < 1e-14);
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((phi_pq_closed(2, 2, 3, 1, 1).unwrap() - golden).abs() < 1e-14);
        assert!(matches!(
            phi_pq_closed(2, 3, 5, 3, 1),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn partial_derivative_examples() {
        for d_p in [1, 2] {
            let v = phi_pq_partial_dp(2, 3, 5, d_p, 1).unwrap();
            assert!(v < 0.0, "derivative at d_p = {d_p} is {v}");
            // Central finite difference on 2 phi^2.
            let h = 1e-5;
            let f = |x: f64| {
                let v = phi_pq_closed_real(2.0, 3.0, 5.0, x, 1.0);
                2.0 * v * v
            };
            let fd = (f(d_p as f64 + h) - f(d_p as f64 - h)) / (2.0 * h);
            assert!((v - fd).abs() < 1e-5, "analytic {v} vs fd {fd}");
        }
        // Boundary q d'_q = e has value exactly 2 (d'_q - p).
        let v = phi_pq_partial_dp(2, 3, 3, 1, 1).unwrap();
        assert!((v - 2.0 * (1.0 - 2.0)).abs() < 1e-12);
        // d'_q = p is outside the stated domain.
        assert!(matches!(
            phi_pq_partial_dp(2, 3, 5, 1, 2),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn closed_form_brace() {
        let expected = ((5.0 + 17f64.sqrt()) / 2.0).sqrt();
        assert!((rho_k_brace_closed(2, 3, 5).unwrap() - expected).abs() < 1e-14);
        let expected337 = ((7.0 + 33f64.sqrt()) / 2.0).sqrt();
        assert!((rho_k_brace_closed(3, 3, 7).unwrap() - expected337).abs() < 1e-14);
        assert!(matches!(
            rho_k_brace_closed(2, 2, 4),
            Err(Error::Domain(_))
        ));
        // Part order does not matter.
        assert_eq!(
            rho_k_brace_closed(2, 3, 5).unwrap(),
            rho_k_brace_closed(3, 2, 5).unwrap()
        );
    }

    #[test]
    fn closed_form_bracket() {
        // (2,4,5): X = 5, Y = 3.
        let expected = ((5.0 + 13f64.sqrt()) / 2.0).sqrt();
        assert!((rho_k_bracket_closed(2, 4, 5).unwrap() - expected).abs() < 1e-14);
        assert_eq!(
            rho_k_bracket_closed(2, 3, 5).unwrap(),
            rho_k_brace_closed(2, 3, 5).unwrap()
        );
        // Both graphs are single-vertex-deficient at (3,3,7).
        assert!(
            (rho_k_bracket_closed(3, 3, 7).unwrap() - rho_k_brace_closed(3, 3, 7).unwrap()).abs()
                < 1e-14
        );
    }

    #[test]
    fn brace_closed_form_equals_phi_pq() {
        for (p, q) in [(2usize, 3usize), (3, 3), (4, 5), (5, 4)] {
            for removed in 1..=p.min(q) {
                let e = p * q - removed;
                let (a, b) = (p.min(q) as i64, p.max(q) as i64);
                let via_phi =
                    phi_pq_closed(a, b, e as i64, b - 1, a - a * b + e as i64).unwrap();
                let direct = rho_k_brace_closed(p, q, e).unwrap();
                assert!((via_phi - direct).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn classical_bounds() {
        // K_{2,3} plus an isolated left vertex: sqrt(e) is attained.
        let k23_iso = g(&["111", "111", "000"]);
        let b = bound_sqrt_e(&k23_iso);
        assert!((b.value - 6f64.sqrt()).abs() < 1e-14);
        assert!(b.equality_case);

        let path = g(&["11", "10"]);
        let b = bound_sqrt_e(&path);
        assert!((b.value - 3f64.sqrt()).abs() < 1e-14);
        assert!(!b.equality_case);

        let c6 = g(&["110", "011", "101"]);
        let b = bound_d1d1(&c6);
        assert!((b.value - 2.0).abs() < 1e-14);
        assert!(b.equality_case);
        let b = bound_d1d1(&path);
        assert!(!b.equality_case);
    }

    #[test]
    fn equality_check_examples() {
        let path = g(&["11", "10"]);
        let diag = equality_case_check(&path, 2, 2, 1e-8).unwrap();
        assert!(diag.tight && diag.structural);
        let d = diag.decomposition.unwrap();
        assert_eq!((d.s_prime, d.t_prime), (1, 1));

        let k235 = g(&["111", "110"]);
        let diag = equality_case_check(&k235, 1, 1, 1e-8).unwrap();
        assert!(!diag.tight && !diag.structural);

        let k33 = BipartiteGraph::complete(3, 3).unwrap();
        let diag = equality_case_check(&k33, 1, 1, 1e-8).unwrap();
        assert!(diag.tight);
        let d = diag.decomposition.unwrap();
        assert_eq!((d.s_prime, d.t_prime), (0, 0));
    }

    #[test]
    fn quartic_identity_small_graphs() {
        for graph in [
            g(&["111", "110"]),
            g(&["1010", "0110", "1101"]),
            g(&["11011", "10110", "01101"]),
        ] {
            let profile = graph.degree_profile();
            for s in 1..=profile.left_order() {
                for t in 1..=profile.right_order() {
                    let c = phi(&profile, s, t).unwrap();
                    let v = c.phi.powi(4) - c.x as f64 * c.phi * c.phi + c.y as f64;
                    assert!(v.abs() < 1e-9, "quartic residual {v}");
                }
            }
        }
    }
}
