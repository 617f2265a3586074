use cssball_core::driver::{
    build_ansatz, reduced_scan, solve, sweep, tangent_direction, AnsatzSpec, NodePolicy,
    ScanConfig, ScanResult, SolveOptions, SolveStatus, SweepSpec,
};
use cssball_core::radial::{el_residual, energy, hessian_apply};
use cssball_core::{Params, RadialField, RadialGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn reference() -> Params {
    Params::new(2.0, 0.05).unwrap()
}

fn ansatz_at(scan: &ScanResult, grid: &RadialGrid, rho: f64) -> RadialField {
    let spec = AnsatzSpec::new(scan.p, grid.radius, scan.k2, rho, scan.alpha, scan.beta).unwrap();
    build_ansatz(&Params::new(scan.p, scan.omega).unwrap(), grid, &spec).unwrap()
}

#[test]
fn descent_is_monotone_and_lands_below_the_ansatz() {
    let params = reference();
    let grid = RadialGrid::with_default_nodes(60.0).unwrap();
    let scan = reduced_scan(&params, &grid, &ScanConfig::default()).unwrap();
    let init = ansatz_at(&scan, &grid, scan.rho_star);
    let start = energy(&params, &init).unwrap().total;
    let report = solve(&params, init, &SolveOptions::default()).unwrap();
    assert_eq!(report.status, SolveStatus::Converged);
    assert!(report.grad_norm < 1e-8);
    assert!(report.positive);
    assert_eq!(report.energy_trace[0], start);
    let noise = 1e-13 * start.abs();
    for w in report.energy_trace.windows(2) {
        assert!(w[1] <= w[0] + noise, "{} -> {}", w[0], w[1]);
    }
    assert!(report.energy.total < start);
}

#[test]
fn gradient_only_descent_still_decreases() {
    let params = reference();
    let grid = RadialGrid::with_default_nodes(40.0).unwrap();
    let scan = reduced_scan(&params, &grid, &ScanConfig::default()).unwrap();
    let init = ansatz_at(&scan, &grid, scan.rho_star);
    let options = SolveOptions {
        newton: false,
        max_iter: 300,
        ..Default::default()
    };
    let report = solve(&params, init, &options).unwrap();
    assert!(report.energy_trace.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    assert!(report.grad_norm < 1e-3);
    assert!(report.newton_steps == 0);
}

#[test]
fn ansatz_residual_decays_with_distance_to_wall() {
    let params = reference();
    let grid = RadialGrid::with_default_nodes(80.0).unwrap();
    let scan = reduced_scan(&params, &grid, &ScanConfig::default()).unwrap();
    let half = grid.unknowns() / 2;
    let sups: Vec<f64> = scan
        .rho_grid
        .iter()
        .rev()
        .step_by(7)
        .map(|&rho| {
            let res = el_residual(&params, &ansatz_at(&scan, &grid, rho)).unwrap();
            res[half..].iter().fold(0.0f64, |m, x| m.max(x.abs()))
        })
        .collect();
    // rho decreasing, so R - rho increasing
    assert!(sups.windows(2).all(|w| w[1] < w[0]), "{sups:?}");
    assert!(sups[0] / sups[sups.len() - 1] > 4.0, "{sups:?}");
}

#[test]
fn offset_from_log_prediction_is_stable() {
    let params = reference();
    let mut offsets = Vec::new();
    for radius in [100.0, 200.0] {
        let grid = RadialGrid::with_default_nodes(radius).unwrap();
        let scan = reduced_scan(&params, &grid, &ScanConfig::default()).unwrap();
        if radius == 200.0 {
            assert!(scan.interior(), "{} in {:?}", scan.rho_star, scan.interval);
        }
        offsets.push(scan.rho_star - (radius - radius.ln() / (2.0 * scan.k2.sqrt())));
    }
    assert!(offsets.iter().all(|o| o.abs() < 10.0));
    assert!((offsets[0] - offsets[1]).abs() < 0.5, "{offsets:?}");
}

#[test]
fn widened_window_still_hits_left_edge_at_moderate_radius() {
    // the minimum of the reduced energy sits left of the admissible window at R = 100
    let params = reference();
    let config = ScanConfig {
        alpha: Some(0.99),
        beta: Some(1.97),
        ..Default::default()
    };
    let grid = RadialGrid::with_default_nodes(100.0).unwrap();
    let scan = reduced_scan(&params, &grid, &config).unwrap();
    assert_eq!(scan.rho_star, scan.interval[0]);
    assert!(scan.phi.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn rho_star_stable_under_refinement() {
    let params = reference();
    let coarse = RadialGrid::new(100.0, 4000).unwrap();
    let fine = RadialGrid::new(100.0, 8000).unwrap();
    let a = reduced_scan(&params, &coarse, &ScanConfig::default()).unwrap();
    let b = reduced_scan(&params, &fine, &ScanConfig::default()).unwrap();
    assert!((a.rho_star - b.rho_star).abs() < coarse.spacing());
}

#[test]
fn location_matches_amplitude_weighted_model() {
    let params = reference();
    for radius in [80.0, 120.0] {
        let grid = RadialGrid::with_default_nodes(radius).unwrap();
        let scan = reduced_scan(&params, &grid, &ScanConfig::default()).unwrap();
        let report = solve(
            &params,
            ansatz_at(&scan, &grid, scan.rho_star),
            &SolveOptions::default(),
        )
        .unwrap();
        let predicted = scan.amplitude_model_rho_star.unwrap();
        assert!(
            (report.rho_fit - predicted).abs() < 2.0 * grid.spacing(),
            "R = {radius}: {} vs {predicted}",
            report.rho_fit
        );
    }
}

#[test]
fn hessian_positive_off_the_tangent_direction() {
    let params = reference();
    let grid = RadialGrid::with_default_nodes(50.0).unwrap();
    let scan = reduced_scan(&params, &grid, &ScanConfig::default()).unwrap();
    let report = solve(
        &params,
        ansatz_at(&scan, &grid, scan.rho_star),
        &SolveOptions::default(),
    )
    .unwrap();
    let u = report.field();
    let rho = report.rho_fit.clamp(scan.interval[0], scan.interval[1]);
    let spec = AnsatzSpec::new(2.0, 50.0, scan.k2, rho, scan.alpha, scan.beta).unwrap();
    let t = tangent_direction(&params, &grid, &spec).unwrap();
    let t = t.values();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..10 {
        // smooth random bump localized near the layer
        let (c, w, a) = (
            rng.gen_range(40.0..50.0),
            rng.gen_range(0.5..4.0),
            rng.gen_range(-1.0..1.0),
        );
        let mut v: Vec<f64> = grid
            .nodes()
            .iter()
            .map(|&r| a * (-(r - c) * (r - c) / (w * w)).exp() * (50.0 - r))
            .collect();
        let proj = grid.dot_h1(&v, t) / grid.dot_h1(t, t);
        v.iter_mut().zip(t).for_each(|(x, y)| *x -= proj * y);
        let hv = hessian_apply(&params, u, &v).unwrap();
        let q: f64 = hv.iter().zip(&v).map(|(a, b)| a * b).sum();
        assert!(q > 0.0, "curvature {q}");
    }
}

#[test]
fn sweep_over_frequencies() {
    let spec = SweepSpec {
        ps: vec![2.0],
        omegas: vec![0.03, 0.05, 0.08],
        radii: vec![100.0],
        nodes: NodePolicy::Default,
        scan: ScanConfig::default(),
        solve: Some(SolveOptions::default()),
    };
    let cells = sweep(&spec).unwrap();
    assert_eq!(cells.len(), 3);
    for cell in &cells {
        let solved = cell.solve.as_ref().expect("solved");
        assert!(
            solved.converged && solved.positive,
            "omega = {}",
            cell.omega
        );
        let scan = cell.scan.as_ref().unwrap();
        assert!(scan.j_value < 0.0);
        println!(
            "omega = {}: rho* = {:.3}, rho_fit = {:.3}, model {:?}",
            cell.omega, scan.rho_star, solved.rho_fit, scan.amplitude_model_rho_star
        );
    }
}
