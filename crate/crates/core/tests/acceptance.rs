//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the scan size it covered. Run with
//! `cargo test -p bispec --test acceptance -- --nocapture`.

use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

use bispec::bounds::{
    self, equality_case_check, phi_1q, phi_p1, phi_pq_closed, phi_pq_closed_real,
    phi_pq_partial_dp, rho_k_brace_closed, rho_k_bracket_closed,
};
use bispec::graph::BipartiteGraph;
use bispec::labeled_orbit_size;
use bispec::search::{EnumerationSpec, Verdict, enumerate_kpqe, verify_conjecture2};
use bispec::spectral::{scaling_certificate, spectral_radius};

/// Top eigenvalue of a symmetric 2x2 matrix by the quadratic formula; the
/// independent oracle for the named spectral radii.
fn sym2_top(a: f64, b: f64, c: f64) -> f64 {
    0.5 * (a + c + ((a - c).powi(2) + 4.0 * b * b).sqrt())
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let mut out: u128 = 1;
    for i in 0..k.min(n - k) {
        out = out * (n - i) as u128 / (i + 1) as u128;
    }
    out
}

/// All ordered part pairs with p * q <= cap.
fn cells_up_to(cap: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for p in 1..=cap {
        for q in 1..=cap {
            if p * q <= cap {
                out.push((p, q));
            }
        }
    }
    out
}

fn random_graph(rng: &mut StdRng, max_p: usize, max_q: usize) -> BipartiteGraph {
    let p = rng.random_range(1..=max_p);
    let q = rng.random_range(1..=max_q);
    let density: f64 = rng.random_range(0.1..0.9);
    let mut rows = vec![0u64; p];
    for row in rows.iter_mut() {
        for j in 0..q {
            if rng.random::<f64>() < density {
                *row |= 1 << j;
            }
        }
    }
    BipartiteGraph::from_bit_rows(p, q, rows).unwrap()
}

#[test]
fn criterion_01_closed_form_extremal_radii() {
    let mut checked = 0usize;
    for p in 1..=6usize {
        for q in 1..=6usize {
            let pq = p * q;
            for removed in 1..=p.min(q) {
                let e = pq - removed;
                let g = BipartiteGraph::k_brace(p, q, e).unwrap();
                let rho = spectral_radius(&g, 1e-10).unwrap();
                let closed = rho_k_brace_closed(p, q, e).unwrap();
                assert!(
                    (rho - closed).abs() <= 1e-8,
                    "brace ({p},{q},{e}): {rho} vs {closed}"
                );
                checked += 1;
            }
            for removed in 1..=p.max(q) {
                let e = pq - removed;
                let g = BipartiteGraph::k_bracket(p, q, e).unwrap();
                let rho = spectral_radius(&g, 1e-10).unwrap();
                let closed = rho_k_bracket_closed(p, q, e).unwrap();
                assert!(
                    (rho - closed).abs() <= 1e-8,
                    "bracket ({p},{q},{e}): {rho} vs {closed}"
                );
                checked += 1;
            }
        }
    }
    println!("criterion 01: PASS ({checked} (p,q,e) cells, tolerance 1e-8)");
}

#[test]
fn criterion_02_figure_one_identities() {
    let brace = BipartiteGraph::k_brace(2, 3, 5).unwrap();
    let bracket = BipartiteGraph::k_bracket(2, 3, 5).unwrap();
    assert_eq!(
        brace.canonical_form().unwrap(),
        bracket.canonical_form().unwrap()
    );

    // Independent oracle: Gram matrix of K_{2,3}^{{5}} is [[3,2],[2,2]].
    let rho_235 = spectral_radius(&brace, 1e-10).unwrap();
    let oracle_235 = sym2_top(3.0, 2.0, 2.0).sqrt();
    assert!((rho_235 - oracle_235).abs() <= 1e-8);
    assert!((rho_235 - 2.135779205).abs() <= 1e-8);

    // Gram matrix of K_{2,4}^{[5]} is [[4,1],[1,1]].
    let b245 = BipartiteGraph::k_bracket(2, 4, 5).unwrap();
    let rho_245 = spectral_radius(&b245, 1e-10).unwrap();
    let oracle_245 = sym2_top(4.0, 1.0, 1.0).sqrt();
    assert!((rho_245 - oracle_245).abs() <= 1e-8);
    assert!((rho_245 - 2.074313).abs() <= 5e-7);

    println!("criterion 02: PASS (rho = {rho_235:.9} and {rho_245:.9})");
}

fn check_domination(g: &BipartiteGraph) {
    let rho = spectral_radius(g, 1e-10).unwrap();
    let profile = g.degree_profile();
    for s in 1..=g.left_order() {
        for t in 1..=g.right_order() {
            let cell = bounds::phi(&profile, s, t).unwrap();
            assert!(
                rho <= cell.phi + 1e-9,
                "rho {rho} > phi_{{{s},{t}}} {} on {:?}",
                cell.phi,
                g
            );
        }
    }
    assert!(rho <= bounds::bound_sqrt_e(g).value + 1e-9);
    assert!(rho <= bounds::bound_d1d1(g).value + 1e-9);
}

#[test]
fn criterion_03_bound_domination() {
    let mut exhaustive = 0usize;
    for (p, q) in cells_up_to(16) {
        for e in 0..=p * q {
            for g in enumerate_kpqe(&EnumerationSpec::new(p, q, e)).unwrap() {
                check_domination(&g);
                exhaustive += 1;
            }
        }
    }

    let mut rng = StdRng::seed_from_u64(0xB15EC01);
    for _ in 0..1000 {
        let g = random_graph(&mut rng, 10, 10);
        check_domination(&g);
    }
    println!(
        "criterion 03: PASS ({exhaustive} exhaustive classes with pq <= 16 plus 1000 random graphs)"
    );
}

#[test]
fn criterion_04_equality_characterization() {
    let mut checked = 0usize;
    for p in 1..=4usize {
        for q in 1..=4usize {
            for e in 0..=p * q {
                for g in enumerate_kpqe(&EnumerationSpec::new(p, q, e)).unwrap() {
                    if !g.is_connected() {
                        continue;
                    }
                    for s in 1..=p {
                        for t in 1..=q {
                            // Any tight/structural disagreement raises
                            // TheoremViolation and fails the unwrap.
                            equality_case_check(&g, s, t, 1e-8).unwrap();
                            checked += 1;
                        }
                    }
                }
            }
        }
    }
    assert!(checked > 1000);
    println!("criterion 04: PASS ({checked} (graph, s, t) checks, zero theorem violations)");
}

#[test]
fn criterion_05_certificate_soundness() {
    // On a tight cell the scaled matrix has spectral radius phi^2, so the
    // max row sum must attain phi^2 to within tolerance. The converse does
    // not hold: a single row can saturate the inequality chain without the
    // graph being extremal (see `saturated_row_without_tightness` in the
    // spectral unit tests), so only the provable direction is asserted.
    let mut rng = StdRng::seed_from_u64(0xCE127F1C);
    let mut tight_cells = 0usize;
    let mut saturated_loose = 0usize;
    for _ in 0..1000 {
        let g = random_graph(&mut rng, 10, 10);
        let s = rng.random_range(1..=g.left_order());
        let t = rng.random_range(1..=g.right_order());
        let report = scaling_certificate(&g, s, t, 1e-9).unwrap();
        assert!(report.verdict);

        let rho = spectral_radius(&g, 1e-10).unwrap();
        let tight = (rho * rho - report.phi_sq).abs() <= 1e-7;
        let row_sum_attains = (report.max_row_sum - report.phi_sq).abs() <= 1e-7;
        if tight {
            assert!(
                row_sum_attains,
                "tight cell ({s},{t}) did not attain phi^2: max row sum {} vs {}",
                report.max_row_sum, report.phi_sq
            );
            tight_cells += 1;
        } else if row_sum_attains {
            saturated_loose += 1;
        }
    }
    println!(
        "criterion 05: PASS (1000 random triples, verdict always true; {tight_cells} tight cells \
         attained phi^2, {saturated_loose} non-tight cells saturated a row)"
    );
}

fn check_quartic_and_specializations(g: &BipartiteGraph) {
    let profile = g.degree_profile();
    let (p, q) = (profile.left_order(), profile.right_order());
    for s in 1..=p {
        for t in 1..=q {
            let cell = bounds::phi(&profile, s, t).unwrap();
            let residual = cell.phi.powi(4) - cell.x as f64 * cell.phi * cell.phi + cell.y as f64;
            assert!(residual.abs() <= 1e-9, "quartic residual {residual}");
        }
    }
    let d1d1 = ((profile.d[0] * profile.dprime[0]) as f64).sqrt();
    assert!((bounds::phi(&profile, 1, 1).unwrap().phi - d1d1).abs() <= 1e-12);
    assert!((phi_1q(&profile) - bounds::phi(&profile, 1, q).unwrap().phi).abs() <= 1e-12);
    assert!((phi_p1(&profile) - bounds::phi(&profile, p, 1).unwrap().phi).abs() <= 1e-12);
}

#[test]
fn criterion_06_quartic_identity_and_specializations() {
    let mut checked = 0usize;
    for (p, q) in cells_up_to(12) {
        for e in 0..=p * q {
            for g in enumerate_kpqe(&EnumerationSpec::new(p, q, e)).unwrap() {
                check_quartic_and_specializations(&g);
                checked += 1;
            }
        }
    }
    let mut rng = StdRng::seed_from_u64(0x9A47);
    for _ in 0..200 {
        let g = random_graph(&mut rng, 10, 10);
        check_quartic_and_specializations(&g);
        checked += 1;
    }
    println!("criterion 06: PASS ({checked} graphs, every cell within 1e-9 / 1e-12)");
}

#[test]
fn criterion_07_monotonicity() {
    let mut checked = 0usize;
    for p in 2..=8i64 {
        for q in 1..=8i64 {
            let pq = p * q;
            for d_q in 1..=p - 1 {
                for e in (q * d_q)..pq {
                    for d_p in 0..=q.min(e / p) {
                        let analytic = phi_pq_partial_dp(p, q, e, d_p, d_q).unwrap();
                        assert!(
                            analytic < 0.0,
                            "derivative >= 0 at ({p},{q},{e},{d_p},{d_q}): {analytic}"
                        );
                        let h = 1e-5;
                        let f = |x: f64| {
                            let v =
                                phi_pq_closed_real(p as f64, q as f64, e as f64, x, d_q as f64);
                            2.0 * v * v
                        };
                        let fd = (f(d_p as f64 + h) - f(d_p as f64 - h)) / (2.0 * h);
                        assert!(
                            fd < 0.0,
                            "finite difference >= 0 at ({p},{q},{e},{d_p},{d_q}): {fd}"
                        );
                        assert!(
                            (analytic - fd).abs() <= 1e-5 * analytic.abs().max(1.0),
                            "analytic {analytic} vs finite difference {fd}"
                        );
                        checked += 1;
                    }
                }
            }
        }
    }
    println!("criterion 07: PASS ({checked} integer domain points, both slopes negative)");
}

#[test]
fn criterion_08_reduction_to_extremal_value() {
    // Part one: on the line d_p + d'_q = e - (p-1)(q-1), phi is dominated by
    // the closed-form extremal value.
    let mut line_checked = 0usize;
    for p in 2..=8usize {
        for q in 2..=8usize {
            let pq = p * q;
            for removed in 1..p.min(q) {
                let e = pq - removed;
                let target = rho_k_brace_closed(p, q, e).unwrap();
                let line = e as i64 - ((p - 1) * (q - 1)) as i64;
                for d_q in 1..=(p - 1) as i64 {
                    let d_p = line - d_q;
                    if d_p < 1 || d_p > (q - 1) as i64 {
                        continue;
                    }
                    let phi = phi_pq_closed(p as i64, q as i64, e as i64, d_p, d_q).unwrap();
                    assert!(
                        phi <= target + 1e-9,
                        "({p},{q},{e},{d_p},{d_q}): phi {phi} > extremal {target}"
                    );
                    line_checked += 1;
                }
            }
        }
    }

    // Part two: the e_p reduction chain
    // phi(d_p, d'_q) <= phi(e_p, d'_q) <= rho(K^{{e}}).
    let mut chain_checked = 0usize;
    for p in 2..=8usize {
        for q in 2..=8usize {
            let pq = p * q;
            for removed in 1..p.min(q) {
                let e = pq - removed;
                let target = rho_k_brace_closed(p, q, e).unwrap();
                for d_q in 1..=(p - 1) as i64 {
                    if q as i64 * d_q > e as i64 {
                        continue;
                    }
                    let e_p = e as i64 - ((p - 1) * (q - 1)) as i64 - d_q;
                    for d_p in 1..=(q - 1) as i64 {
                        if p as i64 * d_p > e as i64 || e_p < 1 || e_p > d_p {
                            continue;
                        }
                        let phi_dp =
                            phi_pq_closed(p as i64, q as i64, e as i64, d_p, d_q).unwrap();
                        let phi_ep =
                            phi_pq_closed(p as i64, q as i64, e as i64, e_p, d_q).unwrap();
                        assert!(phi_dp <= phi_ep + 1e-9);
                        assert!(phi_ep <= target + 1e-9);
                        chain_checked += 1;
                    }
                }
            }
        }
    }
    println!(
        "criterion 08: PASS ({line_checked} line tuples, {chain_checked} chain tuples, tolerance 1e-9)"
    );
}

#[test]
fn criterion_09_conjecture_two_desk_scale() {
    let mut cells = 0usize;
    for p in 2..=4usize {
        for q in 2..=4usize {
            let pq = p * q;
            for removed in 1..p.min(q) {
                let e = pq - removed;
                let record = verify_conjecture2(p, q, e, 1e-8).unwrap();
                assert_eq!(
                    record.verdict,
                    Verdict::Confirmed,
                    "cell ({p},{q},{e}) verdict {:?}",
                    record.verdict
                );
                let brace_canon = BipartiteGraph::k_brace(p, q, e)
                    .unwrap()
                    .canonical_form()
                    .unwrap();
                assert!(record.maximizers.contains(&brace_canon));
                cells += 1;
            }
        }
    }
    println!("criterion 09: PASS ({cells} cells confirmed with extremal maximizers)");
}

#[test]
fn criterion_10_enumeration_correctness() {
    let mut cells = 0usize;
    for (p, q) in cells_up_to(16) {
        for e in 0..=p * q {
            let reps = enumerate_kpqe(&EnumerationSpec::new(p, q, e)).unwrap();
            let total: u128 = reps
                .iter()
                .map(|g| labeled_orbit_size(g).unwrap() as u128)
                .sum();
            assert_eq!(total, binomial(p * q, e), "cell ({p},{q},{e})");
            cells += 1;
        }
    }

    for (p, q, e) in [(4usize, 4usize, 8usize), (3, 5, 7)] {
        let full: Vec<_> = enumerate_kpqe(&EnumerationSpec::new(p, q, e))
            .unwrap()
            .iter()
            .map(|g| g.canonical_form().unwrap())
            .collect();
        for count in [1usize, 2, 7] {
            let mut union: Vec<_> = Vec::new();
            for index in 0..count {
                union.extend(
                    enumerate_kpqe(&EnumerationSpec::new(p, q, e).with_shard(index, count))
                        .unwrap()
                        .iter()
                        .map(|g| g.canonical_form().unwrap()),
                );
            }
            let mut a = full.clone();
            a.sort();
            union.sort();
            assert_eq!(a, union, "cell ({p},{q},{e}) shard count {count}");
        }
    }
    println!(
        "criterion 10: PASS ({cells} cells sum to C(pq, e); shard counts 1, 2, 7 partition exactly)"
    );
}
