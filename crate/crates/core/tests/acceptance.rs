//! Acceptance suite: one test per release criterion, each printing a
//! `[PASS]` line with the measured numbers (`--nocapture` shows them).
//! Tolerances are pinned here as constants.

use std::sync::{Arc, LazyLock, Mutex};

use ddm_bem::admittance::InnerSolver;
use ddm_bem::ddm::{self, DdmSystem, DdmVariant};
use ddm_bem::excitation::PlaneWave;
use ddm_bem::geom::vec3;
use ddm_bem::linalg::{arnoldi_ritz_values, nrm2, LinearOperator, SolveReport};
use ddm_bem::mesh::{self, OpenFace};
use ddm_bem::post;
use ddm_bem::quadrature::QuadratureRule;
use ddm_bem::{mie, C64, GmresConfig, WaveContext};

// criterion 1: artificial sphere, 168 dofs at 68 MHz, tolerance 1e-6
const C1_TOL: f64 = 1e-6;
const C1_PRECONDITIONED_MAX: usize = 8;
const C1_Y0_FACTOR: usize = 5;
// criterion 2: Ritz cluster of the left-preconditioned operator
const C2_ARNOLDI_STEPS: usize = 30;
const C2_RADIUS: f64 = 0.5;
const C2_FRACTION: f64 = 0.9;
const C2_NOISE_FLOOR: f64 = 1e-9;
// criterion 3: frequency sweep at 3072 dofs, tolerance 1e-5
const C3_TOL: f64 = 1e-5;
const C3_Y2_SPREAD: usize = 2;
const C3_Y0_GROWTH: f64 = 1.5;
// criterion 4: open box at 100 MHz, tolerance 1e-6
const C4_TOL: f64 = 1e-6;
const C4_Y1_MAX: usize = 38;
const C4_Y2_MAX: usize = 26;
const C4_Y3_MAX: usize = 22;
const C4_Y0_BUDGET: usize = 200;
// criterion 5: hollow spheres at 400 MHz, tolerance 1e-4
const C5_TOL: f64 = 1e-4;
const C5_Y0_OVER_Y1: usize = 4;
// criterion 6: sphere RCS against the series solution
const C6_DB: f64 = 1.0;
const C6_DYNAMIC_RANGE_DB: f64 = 10.0;
// criterion 7: box RCS, decomposition against monolithic reference
const C7_TOL: f64 = 1e-8;
const C7_DB: f64 = 0.5;
// criterion 8: variant consistency
const C8_TOL: f64 = 1e-10;
const C8_PAIRWISE: f64 = 1e-6;
// criterion 9: solver properties
const C9_TRANSMISSION_FACTOR: f64 = 10.0;

fn assert_monotone(report: &SolveReport, label: &str) {
    for w in report.residual_history.windows(2) {
        assert!(
            w[1] <= w[0],
            "{label}: residual history not non-increasing ({} -> {})",
            w[0],
            w[1]
        );
    }
}

fn solve_as(
    system: &mut DdmSystem,
    variant: DdmVariant,
    config: &GmresConfig,
) -> (Vec<C64>, SolveReport) {
    system.variant = variant;
    let out = ddm::solve(system, config);
    assert_monotone(&out.1, &format!("{variant}"));
    out
}

fn build_sphere168() -> DdmSystem {
    let mesh = mesh::generate_sphere_uv(0.5, 8, 8, None).unwrap();
    let maps = Arc::new(mesh::build_spaces(&mesh).unwrap());
    assert_eq!(maps.interface_dim(), 168);
    let ctx = WaveContext::from_frequency_mhz(68.0);
    let wave = PlaneWave::new(vec3(0.0, 0.0, 1.0), vec3(1.0, 0.0, 0.0), ctx);
    ddm::build_system(
        &maps,
        &ctx,
        &wave,
        &QuadratureRule::default(),
        DdmVariant::Y0,
        InnerSolver::Direct,
    )
    .unwrap()
}

static SPHERE168: LazyLock<Mutex<DdmSystem>> = LazyLock::new(|| Mutex::new(build_sphere168()));

fn build_box(resolution: f64, frequency_mhz: f64) -> DdmSystem {
    let mesh =
        mesh::generate_open_box([1.0, 1.0, 1.0], OpenFace::parse("+x").unwrap(), resolution)
            .unwrap();
    let maps = Arc::new(mesh::build_spaces(&mesh).unwrap());
    let ctx = WaveContext::from_frequency_mhz(frequency_mhz);
    let wave = PlaneWave::new(vec3(-1.0, 0.0, 0.0), vec3(0.0, 0.0, 1.0), ctx);
    ddm::build_system(
        &maps,
        &ctx,
        &wave,
        &QuadratureRule::default(),
        DdmVariant::Y0,
        InnerSolver::Direct,
    )
    .unwrap()
}

static BOX102: LazyLock<Mutex<DdmSystem>> = LazyLock::new(|| Mutex::new(build_box(1.0 / 6.0, 100.0)));

#[test]
fn c1_artificial_sphere_preconditioned_convergence() {
    let mut system = SPHERE168.lock().unwrap();
    let cfg = GmresConfig::new(C1_TOL, 400);
    let (_, y2) = solve_as(&mut system, DdmVariant::Y2, &cfg);
    let (_, y3) = solve_as(&mut system, DdmVariant::Y3, &cfg);
    let (_, y0) = solve_as(&mut system, DdmVariant::Y0, &cfg);
    assert!(y2.converged && y3.converged, "preconditioned solves converge");
    assert!(
        y2.iterations <= C1_PRECONDITIONED_MAX,
        "Y2 took {} iterations",
        y2.iterations
    );
    assert!(
        y3.iterations <= C1_PRECONDITIONED_MAX,
        "Y3 took {} iterations",
        y3.iterations
    );
    let y0_count = y0.iterations;
    assert!(
        y0_count >= C1_Y0_FACTOR * y2.iterations,
        "Y0 ({y0_count}) not >= {C1_Y0_FACTOR}x Y2 ({})",
        y2.iterations
    );
    println!(
        "[PASS] criterion 1: artificial sphere 168 dofs at 68 MHz, tol {C1_TOL:.0e}: \
         Y2 {} its, Y3 {} its, Y0 {} its",
        y2.iterations, y3.iterations, y0_count
    );
}

struct OuterOp<'a>(&'a DdmSystem);

impl LinearOperator for OuterOp<'_> {
    fn dim(&self) -> usize {
        self.0.interface_dim()
    }
    fn apply(&self, x: &[C64], y: &mut [C64]) {
        y.copy_from_slice(&self.0.outer_apply(x));
    }
}

#[test]
fn c2_identity_ritz_cluster() {
    let mean_distance = |n_phi: usize, n_bands: usize| -> f64 {
        let mesh = mesh::generate_sphere_uv(0.5, n_phi, n_bands, None).unwrap();
        let maps = Arc::new(mesh::build_spaces(&mesh).unwrap());
        let ctx = WaveContext::from_frequency_mhz(68.0);
        let wave = PlaneWave::new(vec3(0.0, 0.0, 1.0), vec3(1.0, 0.0, 0.0), ctx);
        let system = ddm::build_system(
            &maps,
            &ctx,
            &wave,
            &QuadratureRule::default(),
            DdmVariant::Y2,
            InnerSolver::Direct,
        )
        .unwrap();
        let ritz = arnoldi_ritz_values(&OuterOp(&system), C2_ARNOLDI_STEPS);
        let distances: Vec<f64> = ritz
            .iter()
            .map(|z| (z - C64::new(1.0, 0.0)).norm())
            .collect();
        let inside = distances.iter().filter(|&&d| d <= C2_RADIUS).count();
        assert!(
            inside as f64 >= C2_FRACTION * ritz.len() as f64,
            "only {inside}/{} Ritz values within {C2_RADIUS} of 1",
            ritz.len()
        );
        distances.iter().sum::<f64>() / distances.len() as f64
    };
    let coarse = mean_distance(8, 8);
    let fine = mean_distance(12, 12);
    // the admittance blocks cancel algebraically on a closed interface, so
    // both means sit at solver noise; the decrease is only required above it
    assert!(
        fine < coarse || (coarse < C2_NOISE_FLOOR && fine < C2_NOISE_FLOOR),
        "cluster did not tighten: {coarse:e} -> {fine:e}"
    );
    println!(
        "[PASS] criterion 2: Ritz cluster around 1, mean distance {coarse:.2e} -> {fine:.2e} \
         under refinement"
    );
}

#[test]
fn c3_frequency_robustness() {
    let frequencies = [50.0, 68.0, 100.0, 150.0, 200.0, 250.0, 300.0, 360.0];
    let mut y2_counts = Vec::new();
    let mut y0_endpoints = Vec::new();
    for (i, &f) in frequencies.iter().enumerate() {
        let mesh = mesh::generate_sphere_uv(0.5, 32, 33, None).unwrap();
        let maps = Arc::new(mesh::build_spaces(&mesh).unwrap());
        assert_eq!(maps.interface_dim(), 3072);
        let ctx = WaveContext::from_frequency_mhz(f);
        let wave = PlaneWave::new(vec3(0.0, 0.0, 1.0), vec3(1.0, 0.0, 0.0), ctx);
        let mut system = ddm::build_system(
            &maps,
            &ctx,
            &wave,
            &QuadratureRule::default(),
            DdmVariant::Y2,
            InnerSolver::Direct,
        )
        .unwrap();
        let cfg = GmresConfig::new(C3_TOL, 600);
        let (_, y2) = solve_as(&mut system, DdmVariant::Y2, &cfg);
        assert!(y2.converged, "Y2 at {f} MHz");
        y2_counts.push(y2.iterations);
        // the growth assertion needs the band endpoints only
        if i == 0 || i == frequencies.len() - 1 {
            let (_, y0) = solve_as(&mut system, DdmVariant::Y0, &cfg);
            assert!(y0.converged, "Y0 at {f} MHz");
            y0_endpoints.push(y0.iterations);
        }
    }
    let (y2_min, y2_max) = (
        *y2_counts.iter().min().unwrap(),
        *y2_counts.iter().max().unwrap(),
    );
    assert!(
        y2_max - y2_min <= C3_Y2_SPREAD,
        "Y2 counts vary too much: {y2_counts:?}"
    );
    assert!(
        y0_endpoints[1] as f64 >= C3_Y0_GROWTH * y0_endpoints[0] as f64,
        "Y0 growth {} -> {}",
        y0_endpoints[0],
        y0_endpoints[1]
    );
    println!(
        "[PASS] criterion 3: sphere 3072 dofs, 50-360 MHz at tol {C3_TOL:.0e}: \
         Y2 counts {y2_counts:?}, Y0 {} -> {}",
        y0_endpoints[0], y0_endpoints[1]
    );
}

#[test]
fn c4_open_box_iteration_counts() {
    let mut system = BOX102.lock().unwrap();
    let n = system.interface_dim();
    let cfg = GmresConfig::new(C4_TOL, 400);
    let (_, y1) = solve_as(&mut system, DdmVariant::Y1, &cfg);
    let (_, y2) = solve_as(&mut system, DdmVariant::Y2, &cfg);
    let (_, y3) = solve_as(&mut system, DdmVariant::Y3, &cfg);
    assert!(y1.converged && y2.converged && y3.converged);
    assert!(y1.iterations <= C4_Y1_MAX, "Y1 took {}", y1.iterations);
    assert!(y2.iterations <= C4_Y2_MAX, "Y2 took {}", y2.iterations);
    assert!(y3.iterations <= C4_Y3_MAX, "Y3 took {}", y3.iterations);
    // the unpreconditioned run uses the restarted solver (a Krylov basis of
    // the full interface dimension would terminate by exactness instead of
    // exposing the stagnation)
    let y0_cfg = GmresConfig::new(C4_TOL, C4_Y0_BUDGET).with_restart(50);
    let (_, y0) = {
        system.variant = DdmVariant::Y0;
        ddm::solve(&system, &y0_cfg)
    };
    assert!(
        !y0.converged,
        "Y0 unexpectedly converged in {} iterations",
        y0.iterations
    );
    println!(
        "[PASS] criterion 4: open box ({n} interface dofs) at tol {C4_TOL:.0e}: \
         Y1 {} its, Y2 {} its, Y3 {} its, Y0 stalled at residual {:.1e} after {} its",
        y1.iterations,
        y2.iterations,
        y3.iterations,
        y0.residual_history.last().unwrap(),
        y0.iterations
    );
}

#[test]
fn c5_hollow_sphere_ordering() {
    let mut results = Vec::new();
    for (name, n_phi, n_bands) in [("hollow12", 72usize, 25usize), ("hollow15", 90, 31)] {
        let mesh = mesh::generate_sphere_uv(1.0, n_phi, n_bands, Some(45.0)).unwrap();
        let maps = Arc::new(mesh::build_spaces(&mesh).unwrap());
        let ctx = WaveContext::from_frequency_mhz(400.0);
        let wave = PlaneWave::new(vec3(0.0, 0.0, -1.0), vec3(1.0, 0.0, 0.0), ctx);
        let mut system = ddm::build_system(
            &maps,
            &ctx,
            &wave,
            &QuadratureRule::default(),
            DdmVariant::Y1,
            InnerSolver::Direct,
        )
        .unwrap();
        let cfg = GmresConfig::new(C5_TOL, 400);
        let (_, y1) = solve_as(&mut system, DdmVariant::Y1, &cfg);
        let (_, y2) = solve_as(&mut system, DdmVariant::Y2, &cfg);
        let (_, y3) = solve_as(&mut system, DdmVariant::Y3, &cfg);
        assert!(y1.converged && y2.converged && y3.converged, "{name}");
        assert!(
            y2.iterations < y1.iterations,
            "{name}: Y2 {} !< Y1 {}",
            y2.iterations,
            y1.iterations
        );
        // Y0 must need at least 4x the Y1 count: cap the budget there and
        // require that it has not converged
        let budget = C5_Y0_OVER_Y1 * y1.iterations;
        let y0_cfg = GmresConfig::new(C5_TOL, budget);
        system.variant = DdmVariant::Y0;
        let (_, y0) = ddm::solve(&system, &y0_cfg);
        assert_monotone(&y0, "Y0");
        assert!(
            !y0.converged,
            "{name}: Y0 converged within {budget} iterations"
        );
        results.push(format!(
            "{name} (N={}, shells {}): Y1 {}, Y2 {}, Y3 {}, Y0 >{}",
            maps.interface_dim(),
            maps.plus_space.dof_count(),
            y1.iterations,
            y2.iterations,
            y3.iterations,
            budget
        ));
    }
    println!(
        "[PASS] criterion 5: hollow-sphere ordering at 400 MHz, tol {C5_TOL:.0e}: {}",
        results.join("; ")
    );
}

#[test]
fn c6_sphere_rcs_against_series() {
    let radius = 0.5;
    let mesh = mesh::generate_sphere(radius, 2, None).unwrap();
    let ctx = WaveContext::from_wavenumber(2.0); // ka = 1, mesh ~ λ/20
    let wave = PlaneWave::new(vec3(0.0, 0.0, 1.0), vec3(1.0, 0.0, 0.0), ctx);
    let sol = post::monolithic_efie(
        mesh.sub_shell(|_| true),
        &ctx,
        &wave,
        &QuadratureRule::default(),
    )
    .unwrap();
    let mut worst: f64 = 0.0;
    for phi in [0.0, 90.0] {
        let angles: Vec<(f64, f64)> = (0..=36).map(|i| (5.0 * i as f64, phi)).collect();
        let dirs = post::directions_from_angles(&angles);
        let pattern = sol.far_field(&ctx, &dirs, ddm_bem::excitation::PROJECTION_ORDER);
        let bem_db = post::rcs(&pattern);
        let mie_db = mie::mie_reference(radius, &ctx, wave.direction, wave.polarization, &dirs);
        let peak = mie_db.iter().cloned().fold(f64::MIN, f64::max);
        for (&b, &m) in bem_db.iter().zip(&mie_db) {
            if m >= peak - C6_DYNAMIC_RANGE_DB {
                assert!((b - m).abs() <= C6_DB, "{b:.2} dB vs series {m:.2} dB");
                worst = worst.max((b - m).abs());
            }
        }
    }
    println!(
        "[PASS] criterion 6: sphere ka=1 bistatic RCS within {C6_DB} dB of the series \
         (worst {worst:.3} dB)"
    );
}

#[test]
fn c7_box_rcs_decomposition_vs_monolithic() {
    let mesh =
        mesh::generate_open_box([1.0, 1.0, 1.0], OpenFace::parse("+x").unwrap(), 1.0 / 6.0)
            .unwrap();
    let maps = Arc::new(mesh::build_spaces(&mesh).unwrap());
    let ctx = WaveContext::from_frequency_mhz(100.0);
    let wave = PlaneWave::new(vec3(-1.0, 0.0, 0.0), vec3(0.0, 0.0, 1.0), ctx);
    let quad = QuadratureRule::default();
    let system =
        ddm::build_system(&maps, &ctx, &wave, &quad, DdmVariant::Y2, InnerSolver::Direct).unwrap();
    let (e_tan, report) = ddm::solve(&system, &GmresConfig::new(C7_TOL, 400));
    assert!(report.converged);
    assert_monotone(&report, "Y2");

    let walls = mesh.sub_shell(|r| r == mesh::Region::GdPlus);
    let mono = post::monolithic_efie(walls, &ctx, &wave, &quad).unwrap();

    let mut worst: f64 = 0.0;
    for phi in [0.0, 90.0] {
        let angles: Vec<(f64, f64)> = (0..=36).map(|i| (5.0 * i as f64, phi)).collect();
        let dirs = post::directions_from_angles(&angles);
        let order = ddm_bem::excitation::PROJECTION_ORDER;
        let ddm_db = post::rcs(&post::ddm_far_field(&system, &e_tan, &dirs, order).unwrap());
        let mono_db = post::rcs(&mono.far_field(&ctx, &dirs, order));
        for (i, (&a, &b)) in ddm_db.iter().zip(&mono_db).enumerate() {
            let dev = (a - b).abs();
            assert!(
                dev < C7_DB,
                "phi={phi} theta={}: decomposition {a:.2} dB vs monolithic {b:.2} dB",
                angles[i].0
            );
            worst = worst.max(dev);
        }
    }
    println!(
        "[PASS] criterion 7: open-box RCS, decomposition vs monolithic within {C7_DB} dB \
         (worst {worst:.3} dB) at outer tol {C7_TOL:.0e}"
    );
}

#[test]
fn c8_variant_consistency() {
    let mut system = SPHERE168.lock().unwrap();
    let cfg = GmresConfig::new(C8_TOL, 400);
    let mut solutions = Vec::new();
    for variant in DdmVariant::ALL {
        let (e_tan, report) = solve_as(&mut system, variant, &cfg);
        assert!(report.converged, "{variant}");
        solutions.push(e_tan);
    }
    let scale = nrm2(&solutions[0]);
    let mut worst: f64 = 0.0;
    for i in 0..solutions.len() {
        for j in (i + 1)..solutions.len() {
            let diff: f64 = solutions[i]
                .iter()
                .zip(&solutions[j])
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt()
                / scale;
            assert!(diff < C8_PAIRWISE, "variants {i},{j} differ by {diff:e}");
            worst = worst.max(diff);
        }
    }
    println!(
        "[PASS] criterion 8: E_tan agreement across Y0..Y3 at tol {C8_TOL:.0e}: \
         worst pairwise {worst:.2e}"
    );
}

#[test]
fn c9_solver_properties() {
    // monotone residual histories are asserted on every run in this suite
    // through solve_as; here the transmission condition is verified too
    let mut worst: f64 = 0.0;
    {
        let mut system = SPHERE168.lock().unwrap();
        for (variant, tol) in [(DdmVariant::Y2, 1e-6), (DdmVariant::Y3, 1e-6)] {
            let (e_tan, report) = solve_as(&mut system, variant, &GmresConfig::new(tol, 400));
            assert!(report.converged);
            let traces = ddm::recover_traces(&system, &e_tan).unwrap();
            assert!(
                traces.transmission_residual <= C9_TRANSMISSION_FACTOR * tol,
                "sphere {variant}: transmission residual {:e}",
                traces.transmission_residual
            );
            worst = worst.max(traces.transmission_residual / tol);
        }
    }
    {
        let mut system = BOX102.lock().unwrap();
        let tol = 1e-6;
        let (e_tan, report) = solve_as(&mut system, DdmVariant::Y2, &GmresConfig::new(tol, 400));
        assert!(report.converged);
        let traces = ddm::recover_traces(&system, &e_tan).unwrap();
        assert!(
            traces.transmission_residual <= C9_TRANSMISSION_FACTOR * tol,
            "box: transmission residual {:e}",
            traces.transmission_residual
        );
        worst = worst.max(traces.transmission_residual / tol);
    }
    println!(
        "[PASS] criterion 9: residual histories non-increasing on all runs; transmission \
         residual at most {worst:.2}x the outer tolerance (limit {C9_TRANSMISSION_FACTOR}x)"
    );
}
