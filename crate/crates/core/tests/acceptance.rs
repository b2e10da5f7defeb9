//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_2, PI};
use std::time::{Duration, Instant};

use pendulum_vib::dynamics::{
    averaged_hamiltonian, convergence_sweep, full_hamiltonian, full_rhs, integrate, reduced_energy,
    reduced_rhs, successive_ratios, AveragedParams, FullState, PhysicalParams, CONVERGENCE_BAND,
    NOISE_FLOOR,
};
use pendulum_vib::excitation::{
    periodic_mean_simpson, velocity_moments, Excitation, HarmonicSeries, QUADRATURE_NODES,
};
use pendulum_vib::portrait::{build_grid, extract_contours, render_svg};
use pendulum_vib::potential::{d2v, dv, find_equilibria, gamma_point, v_bar, EquilibriumKind};

struct Outcome {
    ok: bool,
    detail: String,
}

fn check(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * 1f64.max(a.abs()).max(b.abs())
}

fn random_series(rng: &mut impl Rng, max_order: usize) -> HarmonicSeries {
    let k = rng.gen_range(0..=max_order);
    HarmonicSeries::new(
        (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect(),
    )
}

fn random_excitation(rng: &mut impl Rng) -> Excitation {
    Excitation::new(
        rng.gen_range(0.01..0.2),
        rng.gen_range(0.5..3.0),
        random_series(rng, 3),
        random_series(rng, 3),
        random_series(rng, 3),
    )
    .unwrap()
}

/// Gamma meets the B = 0 axis at A - C = 1.
fn ac1_gamma_endpoint() -> Outcome {
    let g = gamma_point(PI).unwrap();
    check(
        (g.a_minus_c - 1.0).abs() <= 1e-12 && g.b.abs() <= 1e-12,
        format!("(A-C, B) = ({:.3e}, {:.3e})", g.a_minus_c, g.b),
    )
}

fn ac2_gamma_residual() -> Outcome {
    let lo = FRAC_PI_2 + 0.01;
    let mut worst: f64 = 0.0;
    for i in 0..1000 {
        let phi = lo + (PI - lo) * (i + 1) as f64 / 1000.0;
        let g = gamma_point(phi).unwrap();
        let ap = g.params();
        // φ = π itself sits on the pole; its residual is the B = 0 limit
        let (r1, r2) = if phi == PI {
            let k = g.a_minus_c;
            (0.0, k - 1.0)
        } else {
            (dv(phi, &ap).unwrap(), d2v(phi, &ap).unwrap())
        };
        worst = worst.max(r1.abs()).max(r2.abs());
    }
    check(worst < 1e-9, format!("max residual {worst:.3e}"))
}

/// Fast-period average of the full Hamiltonian, slow state frozen, against the
/// closed-form averaged Hamiltonian.
fn ac3_averaging_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let e = random_excitation(&mut rng);
        let phys = PhysicalParams::new(
            rng.gen_range(0.5..2.0),
            rng.gen_range(0.5..2.0),
            rng.gen_range(0.5..10.0),
        )
        .unwrap();
        let s = FullState::new(
            rng.gen_range(0.2..PI - 0.2),
            rng.gen_range(-PI..PI),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-1.0..1.0),
        );
        let period = e.fast_period();
        let oracle = periodic_mean_simpson(
            |u| full_hamiltonian(&s, u / (2.0 * PI) * period, &e, &phys).unwrap(),
            QUADRATURE_NODES,
        );
        let closed = averaged_hamiltonian(&s, &velocity_moments(&e), &phys).unwrap();
        worst = worst.max((oracle - closed).abs());
    }
    check(
        worst <= 1e-10,
        format!("max |time-average - closed form| {worst:.3e}"),
    )
}

fn brute_force_count(ap: &AveragedParams) -> usize {
    let n = 100_000;
    let lo = 1e-4;
    let hi = PI - 1e-4;
    let mut prev = dv(lo, ap).unwrap();
    let mut count = 0;
    for i in 1..=n {
        let cur = dv(lo + (hi - lo) * i as f64 / n as f64, ap).unwrap();
        if (prev < 0.0) != (cur < 0.0) {
            count += 1;
        }
        prev = cur;
    }
    count
}

fn ac4_equilibrium_counts() -> Outcome {
    let one = AveragedParams::from_difference(0.0, 0.1);
    let three = AveragedParams::from_difference(3.5, 0.01);
    let n1 = find_equilibria(&one).len();
    let n3 = find_equilibria(&three).len();
    let b1 = brute_force_count(&one);
    let b3 = brute_force_count(&three);

    // the degenerate point is built from the critical curve at φ = 2π/3
    let g = gamma_point(2.0 * PI / 3.0).unwrap();
    let degenerate = find_equilibria(&g.params())
        .into_iter()
        .find(|e| e.kind == EquilibriumKind::Degenerate);
    let deg_ok = degenerate.is_some_and(|e| (e.phi - 2.0 * PI / 3.0).abs() <= 1e-6);

    check(
        n1 == 1 && n3 == 3 && b1 == 1 && b3 == 3 && deg_ok && (g.a_minus_c - 3.5).abs() < 1e-12,
        format!(
            "counts {n1}/{n3}, brute force {b1}/{b3}, degenerate at (A-C, B) = ({:.6}, {:.6}): {:?}",
            g.a_minus_c,
            g.b,
            degenerate.map(|e| e.phi)
        ),
    )
}

fn ac5_kapitsa_edge() -> Outcome {
    let top = |a: f64| {
        find_equilibria(&AveragedParams::new(a, 0.0, 0.0).unwrap())
            .into_iter()
            .find(|e| e.phi == PI)
            .map(|e| e.kind)
    };
    let mut ok =
        top(0.5) == Some(EquilibriumKind::Unstable) && top(2.0) == Some(EquilibriumKind::Stable);
    for a in [0.0, 0.5, 0.9, 0.999, 1.0 + 1e-6, 1.2, 2.0, 3.5, 10.0] {
        let eqs = find_equilibria(&AveragedParams::new(a, 0.0, 0.0).unwrap());
        let interior: Vec<_> = eqs.iter().filter(|e| e.phi > 0.0 && e.phi < PI).collect();
        if a >= 1.0 {
            let root = (-1.0 / a).acos();
            ok &= interior.len() == 1
                && (interior[0].phi - root).abs() <= 1e-10
                && interior[0].kind == EquilibriumKind::Unstable;
        } else {
            ok &= interior.is_empty();
        }
    }
    check(
        ok,
        "top unstable at A=0.5, stable at A=2; saddle at arccos(-1/A) iff A >= 1",
    )
}

fn ac6_averaging_convergence() -> Outcome {
    let e = Excitation::vertical(0.1, 1.0, HarmonicSeries::sin(1)).unwrap();
    let s = FullState::new(2.0, 0.0, 0.0, 0.3);
    let r = convergence_sweep(&e, &s, 10.0, &[0.1, 0.05, 0.025]).unwrap();
    let ratios = successive_ratios(&r.max_err_phi);
    let decreasing = r.max_err_phi.windows(2).all(|w| w[1] < w[0]);
    let drift_floor = r.p_alpha_drift.iter().all(|d| d.abs() <= NOISE_FLOOR);
    check(
        decreasing && r.phi_converges() && r.p_alpha_converges(),
        format!(
            "phi errors {:?}, ratios {:?} in [{}, {}]; p_alpha drift {:?}{}",
            r.max_err_phi,
            ratios,
            CONVERGENCE_BAND.0,
            CONVERGENCE_BAND.1,
            r.p_alpha_drift,
            if drift_floor {
                " (azimuth cyclic under vertical excitation: conserved)"
            } else {
                ""
            }
        ),
    )
}

/// Horizontal circular excitation couples to the azimuth, so there the p_alpha
/// drift is nonzero and its halving ratios can be measured.
fn ac6b_p_alpha_drift_circular() -> Outcome {
    let e = Excitation::new(
        0.1,
        1.0,
        HarmonicSeries::cos(1),
        HarmonicSeries::sin(1),
        HarmonicSeries::zero(),
    )
    .unwrap();
    let s = FullState::new(2.0, 0.0, 0.0, 0.3);
    let r = convergence_sweep(&e, &s, 10.0, &[0.1, 0.05, 0.025]).unwrap();
    let ratios = successive_ratios(&r.p_alpha_drift);
    let nonzero = r.p_alpha_drift.iter().all(|d| *d > NOISE_FLOOR);
    check(
        nonzero && r.p_alpha_converges() && r.phi_converges(),
        format!("p_alpha drift {:?}, ratios {ratios:?}", r.p_alpha_drift),
    )
}

fn ac7_conservation() -> Outcome {
    let ap = AveragedParams::from_difference(0.5, 0.09);
    let p_alpha = ap.b.sqrt();
    let rhs = |_: f64, y: &[f64; 3]| {
        let params = AveragedParams::from_difference(0.5, y[2] * y[2]);
        let (a, b) = reduced_rhs(y[0], y[1], &params)?;
        Ok([a, b, 0.0])
    };
    let traj = integrate(rhs, [2.0, 0.0, p_alpha], (0.0, 100.0), 1e-3).unwrap();
    let e0 = reduced_energy(2.0, 0.0, &ap).unwrap();
    let drift = traj
        .states
        .iter()
        .map(|y| (reduced_energy(y[0], y[1], &ap).unwrap() - e0).abs())
        .fold(0.0, f64::max);
    let bits = traj
        .states
        .iter()
        .all(|y| y[2].to_bits() == p_alpha.to_bits());
    check(
        drift < 1e-8 && bits,
        format!("energy drift {drift:.3e}, p_alpha bit-identical: {bits}"),
    )
}

fn ac8_derivative_consistency() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let h = 1e-6;
    let tol = 1e-6;
    let mut failures = 0usize;
    for _ in 0..10_000 {
        let phi = rng.gen_range(0.2..PI - 0.2);
        let ap = AveragedParams::from_difference(rng.gen_range(-5.0..5.0), rng.gen_range(0.0..2.0));
        let fd1 = (v_bar(phi + h, &ap).unwrap() - v_bar(phi - h, &ap).unwrap()) / (2.0 * h);
        let fd2 = (dv(phi + h, &ap).unwrap() - dv(phi - h, &ap).unwrap()) / (2.0 * h);
        let d1 = dv(phi, &ap).unwrap();
        failures += !rel_close(d1, fd1, tol) as usize;
        failures += !rel_close(d2v(phi, &ap).unwrap(), fd2, tol) as usize;
        let p = rng.gen_range(-2.0..2.0);
        failures += !rel_close(reduced_rhs(phi, p, &ap).unwrap().1, -fd1, tol) as usize;
    }

    for _ in 0..10_000 {
        let e = random_excitation(&mut rng);
        let phys = PhysicalParams::new(
            rng.gen_range(0.5..2.0),
            rng.gen_range(0.5..2.0),
            rng.gen_range(0.5..10.0),
        )
        .unwrap();
        let s = FullState::new(
            rng.gen_range(0.2..PI - 0.2),
            rng.gen_range(-PI..PI),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-1.0..1.0),
        );
        let t = rng.gen_range(0.0..1.0);
        let hfun = |st: FullState| full_hamiltonian(&st, t, &e, &phys).unwrap();
        let d = full_rhs(&s, t, &e, &phys).unwrap();
        let fd = |i: usize| {
            let mut plus = s.to_array();
            let mut minus = s.to_array();
            plus[i] += h;
            minus[i] -= h;
            (hfun(FullState::from_array(plus)) - hfun(FullState::from_array(minus))) / (2.0 * h)
        };
        failures += !rel_close(d.phi, fd(2), tol) as usize;
        failures += !rel_close(d.alpha, fd(3), tol) as usize;
        failures += !rel_close(d.p_phi, -fd(0), tol) as usize;
        failures += !rel_close(d.p_alpha, -fd(1), tol) as usize;
    }
    check(
        failures == 0,
        format!("{failures} mismatches over 2x10^4 samples"),
    )
}

fn ac9_portrait() -> Outcome {
    let nx = 256;
    let ap = AveragedParams::from_difference(2.0, 0.0);
    let g = build_grid(&ap, nx, nx, None).unwrap();

    let mut sep_err: f64 = 0.0;
    let mut mirror_err: f64 = 0.0;
    let ny = g.ny();
    for i in 0..g.nx() {
        let dv_i = v_bar(g.phi[i], &ap).unwrap() - v_bar(g.phi[0], &ap).unwrap();
        for j in 0..ny {
            sep_err = sep_err.max((g.values[i][j] - g.values[0][j] - dv_i).abs());
            mirror_err = mirror_err.max((g.values[i][j] - g.values[i][ny - 1 - j]).abs());
        }
    }

    let contours = extract_contours(&g);
    let saddle = 2.0 * PI / 3.0;
    let level_ok = g
        .separatrix
        .is_some_and(|l| (l - 1.25).abs() <= 2.0 / nx as f64);
    let sep = contours.iter().find(|c| c.is_separatrix);
    let cell = ((g.phi[1] - g.phi[0]).powi(2) + (g.p[1] - g.p[0]).powi(2)).sqrt();
    let near_saddle = sep.is_some_and(|c| {
        c.polylines
            .iter()
            .flatten()
            .any(|(x, y)| ((x - saddle).powi(2) + y * y).sqrt() <= cell)
    });
    let on_level = sep.is_some_and(|c| {
        c.polylines
            .iter()
            .flatten()
            .all(|(x, y)| (0.5 * y * y + v_bar(*x, &ap).unwrap() - 1.25).abs() <= 2.0 / nx as f64)
    });

    let svg_a = render_svg(&g, &contours);
    let g2 = build_grid(&ap, nx, nx, None).unwrap();
    let svg_b = render_svg(&g2, &extract_contours(&g2));

    check(
        sep_err <= 1e-12 && mirror_err <= 1e-12 && level_ok && near_saddle && on_level && svg_a == svg_b,
        format!(
            "separability {sep_err:.1e}, mirror {mirror_err:.1e}, separatrix level {:?}, passes saddle {near_saddle}, on level {on_level}, svg identical {}",
            g.separatrix,
            svg_a == svg_b
        ),
    )
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome, Duration);
    let criteria: [Criterion; 10] = [
        (
            "AC1 critical-curve endpoint",
            ac1_gamma_endpoint,
            Duration::from_millis(1),
        ),
        (
            "AC2 critical-curve residual",
            ac2_gamma_residual,
            Duration::from_millis(100),
        ),
        (
            "AC3 averaged-Hamiltonian oracle",
            ac3_averaging_oracle,
            Duration::from_secs(1),
        ),
        (
            "AC4 equilibrium counts",
            ac4_equilibrium_counts,
            Duration::from_secs(1),
        ),
        (
            "AC5 Kapitsa edge case",
            ac5_kapitsa_edge,
            Duration::from_millis(100),
        ),
        (
            "AC6 averaging convergence",
            ac6_averaging_convergence,
            Duration::from_secs(30),
        ),
        (
            "AC6b p_alpha drift under circular excitation",
            ac6b_p_alpha_drift_circular,
            Duration::from_secs(30),
        ),
        ("AC7 conservation", ac7_conservation, Duration::from_secs(5)),
        (
            "AC8 derivative consistency",
            ac8_derivative_consistency,
            Duration::from_secs(5),
        ),
        (
            "AC9 portrait properties",
            ac9_portrait,
            Duration::from_secs(5),
        ),
    ];

    let mut failed = 0;
    for (name, run, budget) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= budget;
        let ok = outcome.ok && in_time;
        if !ok {
            failed += 1;
        }
        println!(
            "[{}] {name}: {} ({:.3?} / budget {:?}{})",
            if ok { "PASS" } else { "FAIL" },
            outcome.detail,
            elapsed,
            budget,
            if in_time { "" } else { ", over budget" }
        );
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
