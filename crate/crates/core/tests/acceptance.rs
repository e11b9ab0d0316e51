//! Acceptance suite: one line per criterion, tolerances pinned below.
//!
//! Run with `cargo test -p cr3bp-core --test acceptance`. The process fails
//! when a criterion fails that is not listed in `KNOWN_FAILURES`.

use cr3bp_core::convexity::{
    appendix_b_suite, convexity_scan, copenhagen_model, cubic_coefficient, g1, g2, ScanSpec,
};
use cr3bp_core::dynamics::{
    from_frame, hamiltonian, hamiltonian_hessian, lagrange_r1, lagrange_values, mu_of_r1, Cr3bp,
    Frame, MassRatio, RotatingState,
};
use cr3bp_core::flow::{Direction, EventSpec, Integrator, StateFlow};
use cr3bp_core::index::{
    elliptic_path, generator_eigen_range, hyperbolic_path, nonneg_path, random_hat_h_path,
    robbin_salamon, saddle_center_path, SymplecticPath,
};
use cr3bp_core::linalg::{j4, random_symmetric, random_symplectic, symplectic_defect4};
use cr3bp_core::liouville::{verify_y_eps, SurfaceGrid};
use cr3bp_core::orbits::{
    find_retrograde, lyapunov_orbit, retrograde_family, symmetry_defect, transverse_hyperbolic,
    LyapunovConfig, ShootingConfig,
};
use cr3bp_core::regularization::{
    from_regularized, to_regularized, RegularizedHamiltonian, RegularizedState,
    TimedRegularizedFlow,
};
use cr3bp_core::saddle_center::{a_of_r1, shield_profile, shield_rate_at_r0, SaddleCenterData};
use nalgebra::{Complex, Vector2, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::{PI, TAU};
use std::time::{Duration, Instant};

/// Criteria expected to fail; see the notes in the README.
const KNOWN_FAILURES: &[usize] = &[11];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(checks: &[(&str, bool)], detail: String) -> Outcome {
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    let detail = if failed.is_empty() {
        detail
    } else {
        format!("{detail}; failed: {}", failed.join(", "))
    };
    Outcome {
        pass: failed.is_empty(),
        detail,
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// 1 -------------------------------------------------------------------------

fn lagrange_data() -> Outcome {
    let half = lagrange_values(&MassRatio::new(0.5).unwrap());
    let l1_err = (half.l1() + 2.0).abs();
    let mut round_trip: f64 = 0.0;
    let mut ordered = true;
    for k in 0..50 {
        let mu = 0.01 + 0.98 * k as f64 / 49.0;
        let r1 = lagrange_r1(mu).unwrap();
        round_trip = round_trip.max((mu_of_r1(r1) - mu).abs());
        let v = lagrange_values(&MassRatio::new(mu).unwrap()).values;
        ordered &= v[0] < v[1] && v[1] <= v[2] && v[2] < v[3] && v[3] == v[4];
    }
    outcome(
        &[
            ("L1(1/2) = -2 (1e-12)", l1_err < 1e-12),
            ("round trip < 1e-12", round_trip < 1e-12),
            ("L1 < L2 <= L3 < L4 = L5", ordered),
        ],
        format!("|L1+2| = {l1_err:.1e}, round trip {round_trip:.1e}"),
    )
}

// 2 -------------------------------------------------------------------------

fn saddle_center() -> Outcome {
    let mut eig_err: f64 = 0.0;
    let mut sympl: f64 = 0.0;
    for k in 0..20 {
        let mu = MassRatio::new(0.025 + 0.95 * k as f64 / 19.0).unwrap();
        let scd = SaddleCenterData::new(&mu);
        let h = hamiltonian_hessian(&mu, &scd.l1, Frame::Standard).unwrap();
        let a = j4() * h;
        let eig = a.complex_eigenvalues();
        let want = [
            Complex::new(scd.lambda1, 0.0),
            Complex::new(-scd.lambda1, 0.0),
            Complex::new(0.0, scd.lambda2),
            Complex::new(0.0, -scd.lambda2),
        ];
        for w in want {
            let d = eig
                .iter()
                .map(|e| (e - w).norm())
                .fold(f64::INFINITY, f64::min);
            eig_err = eig_err.max(d);
        }
        sympl = sympl.max(symplectic_defect4(&scd.v));
    }
    let a_err = (a_of_r1(0.5) - 4.0).abs();
    outcome(
        &[
            ("eigenvalues (1e-8)", eig_err < 1e-8),
            ("V^T J V = J (1e-10)", sympl < 1e-10),
            ("a(1/2) = 4 (1e-12)", a_err < 1e-12),
        ],
        format!("eigen err {eig_err:.1e}, symplectic defect {sympl:.1e}, |a-4| {a_err:.1e}"),
    )
}

// 3 -------------------------------------------------------------------------

fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx, sxy * sxy / (sxx * syy))
}

fn lyapunov() -> Outcome {
    let mu = MassRatio::new(0.5).unwrap();
    let scd = SaddleCenterData::new(&mu);
    let t0 = TAU / scd.lambda2;
    let cfg = LyapunovConfig::default();
    let mut residual: f64 = 0.0;
    let mut index_ok = true;
    let mut hyperbolic = true;
    for eps in [1e-4, 1e-3, 1e-2] {
        match lyapunov_orbit(&mu, eps, &cfg) {
            Ok(o) => {
                residual = residual.max(o.closure_residual);
                index_ok &= o.index == Some(2);
                hyperbolic &= transverse_hyperbolic(&o);
            }
            Err(_) => {
                residual = f64::INFINITY;
                index_ok = false;
            }
        }
    }
    let fit_eps = [1e-4, 2e-4, 5e-4, 1e-3, 2e-3, 5e-3, 1e-2];
    let no_index = LyapunovConfig {
        compute_index: false,
        ..cfg
    };
    let dev: Vec<f64> = fit_eps
        .iter()
        .map(|&e| {
            lyapunov_orbit(&mu, e, &no_index)
                .map(|o| o.period - t0)
                .unwrap_or(f64::NAN)
        })
        .collect();
    let (slope, intercept, r2) = linear_fit(&fit_eps, &dev);
    outcome(
        &[
            ("residual < 1e-10", residual < 1e-10),
            ("O(eps) fit R^2 > 0.99", r2 > 0.99),
            ("period -> 2pi/lambda2", intercept.abs() < 1e-3),
            ("index = 2", index_ok),
            ("transverse block hyperbolic", hyperbolic),
        ],
        format!(
            "residual {residual:.1e}, T - 2π/λ₂ ≈ {slope:.3}·ε + {intercept:.1e} (R² = {r2:.5})"
        ),
    )
}

// 4 -------------------------------------------------------------------------

fn retrograde() -> Outcome {
    let mu = MassRatio::new(0.5).unwrap();
    let cfg = ShootingConfig::default();
    let orbit = match find_retrograde(&mu, -2.2, None, &cfg) {
        Ok(o) => o,
        Err(e) => {
            return Outcome {
                pass: false,
                detail: format!("no orbit: {e}"),
            }
        }
    };
    let sym = symmetry_defect(&orbit, 8).unwrap_or(f64::INFINITY);
    let index = orbit.index.unwrap_or(i64::MIN);
    let energies: Vec<f64> = (0..=10).map(|k| -2.05 - 0.025 * k as f64).collect();
    let no_index = ShootingConfig {
        compute_index: false,
        ..cfg
    };
    let (family_ok, max_jump, family_residual) = match retrograde_family(&mu, &energies, &no_index)
    {
        Ok(fam) => {
            let q1: Vec<f64> = fam.iter().map(|(o, _)| o.state.q.x).collect();
            let p2: Vec<f64> = fam.iter().map(|(o, _)| o.state.p.y).collect();
            let jumps: Vec<f64> = q1
                .windows(2)
                .zip(p2.windows(2))
                .map(|(a, b)| (a[1] - a[0]).abs().max((b[1] - b[0]).abs()))
                .collect();
            let max_jump = jumps.iter().cloned().fold(0.0, f64::max);
            let min_jump = jumps.iter().cloned().fold(f64::INFINITY, f64::min);
            let res = fam
                .iter()
                .map(|(o, _)| o.closure_residual)
                .fold(0.0, f64::max);
            // equal energy steps: no jump may exceed three times the smallest
            (
                fam.len() == energies.len() && max_jump < 3.0 * min_jump && res < 1e-8,
                max_jump,
                res,
            )
        }
        Err(_) => (false, f64::NAN, f64::NAN),
    };
    outcome(
        &[
            ("closure < 1e-8", orbit.closure_residual < 1e-8),
            ("q2-symmetry < 1e-8", sym < 1e-8),
            ("continuation over [-2.3, -2.05]", family_ok),
            ("double-cover index >= 3", index >= 3),
        ],
        format!(
            "closure {:.1e}, symmetry {sym:.1e}, index {index}, family: max step {max_jump:.3e}, residual {family_residual:.1e}",
            orbit.closure_residual
        ),
    )
}

// 5 -------------------------------------------------------------------------

fn copenhagen_convexity() -> Outcome {
    let spec = ScanSpec::default();
    let at_two = convexity_scan(&copenhagen_model(-2.0), &spec).unwrap();
    let full = ScanSpec {
        full_domain: true,
        ..spec
    };
    let lower: Vec<_> = [-2.5, -3.0]
        .iter()
        .map(|&h| convexity_scan(&copenhagen_model(h), &full).unwrap())
        .collect();
    let fit = at_two.collar.expect("saddles lie in the region at h = -2");
    outcome(
        &[
            ("h = -2 min det > 0", at_two.positive()),
            ("h = -2.5 min det > 0", lower[0].positive()),
            ("h = -3 min det > 0", lower[1].positive()),
            (
                "vanishing order in [3.5, 4.5]",
                (3.5..=4.5).contains(&fit.det_exponent),
            ),
        ],
        format!(
            "min det {:.2e} / {:.2e} / {:.2e}, order {:.3} (R² {:.4}), {} samples at h = -2",
            at_two.min_det,
            lower[0].min_det,
            lower[1].min_det,
            fit.det_exponent,
            fit.det_r_squared,
            at_two.samples
        ),
    )
}

// 6 -------------------------------------------------------------------------

fn appendix_b() -> Outcome {
    let rep = appendix_b_suite();
    let claim = |n: &str| rep.claim(n).map(|c| c.pass).unwrap_or(false);
    let transcription = rep.transcription.iter().all(|c| c.pass);
    let worst = rep
        .transcription
        .iter()
        .map(|c| c.max_relative_error)
        .fold(0.0, f64::max);
    let e2 = rep.claim("E2").map(|c| c.margin).unwrap_or(f64::NAN);
    let k5 = rep.claim("k5(4/5)").map(|c| c.at[0]).unwrap_or(f64::NAN);
    outcome(
        &[
            ("E2 > 0 on 2000x2000", claim("E2") && rep.resolution == 2000),
            ("k5(4/5) = 14698.5 +- 0.1", claim("k5(4/5)")),
            ("k5 decreasing on [0, 6/5]", claim("-k5'")),
            ("D1 > 0 on [0, 1]", claim("D1")),
            ("E1(0,0) (1e-10)", claim("E1(0,0)")),
            ("transcription (1e-9 rel)", transcription),
            ("all remaining claims", rep.pass),
        ],
        format!("min E2 {e2:.4}, k5(4/5) = {k5:.6}, worst transcription error {worst:.1e}"),
    )
}

// 7 -------------------------------------------------------------------------

fn nonconvexity() -> Outcome {
    let mut g2_max = f64::NEG_INFINITY;
    for i in 1..=500 {
        let r1 = i as f64 / 501.0;
        for j in 0..200 {
            let s = -1.0 + 2.0 * j as f64 / 199.0;
            g2_max = g2_max.max(g2(r1, s));
        }
    }
    let n = 100_000;
    let vals: Vec<f64> = (1..n).map(|i| g1(i as f64 / n as f64)).collect();
    let changes: Vec<f64> = (1..vals.len())
        .filter(|&i| vals[i].signum() != vals[i - 1].signum())
        .map(|i| (i + 1) as f64 / n as f64)
        .collect();
    let sign_ok = changes.len() == 1 && (changes[0] - 0.5).abs() <= 1.0 / n as f64 + 1e-12;
    let mut worst: f64 = 0.0;
    for r1 in [0.3, 0.4, 0.6] {
        for th in [0.0, 0.7, 1.6, 2.5, 3.6, 5.0] {
            match cubic_coefficient(r1, th, 1e-3) {
                Ok(f) => worst = worst.max(f.max_relative_error()),
                Err(_) => worst = f64::INFINITY,
            }
        }
    }
    outcome(
        &[
            ("G2 < 0 on 500x200", g2_max < 0.0),
            ("G1 changes sign only at 1/2", sign_ok),
            ("cubic coefficient within 2%", worst < 0.02),
        ],
        format!(
            "max G2 {g2_max:.3}, G1 sign changes at {changes:?}, worst one-sided cubic error {:.2}%",
            100.0 * worst
        ),
    )
}

// 8 -------------------------------------------------------------------------

fn index_engine() -> Outcome {
    let rotations = (1..=10).all(|k| {
        robbin_salamon(&SymplecticPath::rotation(k as f64)).map(|m| m.value()) == Ok(2.0 * k as f64)
    });
    let axioms: Vec<bool> = (0..100u64)
        .into_par_iter()
        .map(|i| {
            let mut r = rng(800 + i);
            let n = 1 + (i % 2) as usize;
            let s = random_symmetric(&mut r, 2 * n, 2.0);
            let psi0 = random_symplectic(&mut r, n, 0.5);
            let b = r.gen_range(1.0..5.0);
            let split = r.gen_range(0.1..0.9) * b;
            let p = SymplecticPath::constant_generator(s, psi0, 0.0, b);
            let whole = match robbin_salamon(&p) {
                Ok(w) => w,
                Err(_) => return false,
            };
            let parts = robbin_salamon(&p.restrict(0.0, split)).and_then(|a| Ok(a + robbin_salamon(&p.restrict(split, b))?));
            let q = elliptic_path(r.gen_range(0.5..3.0), random_symplectic(&mut r, 1, 0.5), 0.0, b);
            let sum = robbin_salamon(&p.direct_sum(&q));
            let q_idx = robbin_salamon(&q);
            matches!((parts, sum, q_idx), (Ok(pa), Ok(su), Ok(qi)) if pa == whole && su == whole + qi)
        })
        .collect();
    let axioms_ok = axioms.iter().filter(|&&b| b).count();
    let hyperbolic: Vec<Option<f64>> = (0..100u64)
        .into_par_iter()
        .map(|i| {
            let mut r = rng(900 + i);
            let psi0 = random_symplectic(&mut r, 1, 1.0);
            let a = r.gen_range(-2.0..2.0);
            let b = a + r.gen_range(0.1..4.0);
            let lam = r.gen_range(0.3..3.0);
            robbin_salamon(&hyperbolic_path(lam, psi0, a, b))
                .ok()
                .map(|m| m.value())
        })
        .collect();
    let hyp_max = hyperbolic
        .iter()
        .map(|m| m.map_or(f64::INFINITY, f64::abs))
        .fold(0.0, f64::max);
    let nonneg: Vec<(bool, bool)> = (0..100u64)
        .into_par_iter()
        .map(|i| {
            let mut r = rng(1000 + i);
            let n = 1 + (i % 2) as usize;
            let m = random_symplectic(&mut r, n, 1.2);
            match nonneg_path(&m) {
                Ok((path, _)) => {
                    let (lo, _) = generator_eigen_range(&path, 400);
                    let scale = path.psi(0.5).amax().powi(2).max(1.0);
                    let mu = robbin_salamon(&path).map(|m| m.value()).unwrap_or(f64::NAN);
                    (
                        true,
                        lo >= -1e-9 * scale && mu >= n as f64 && mu <= 2.0 * n as f64,
                    )
                }
                Err(_) => (false, false),
            }
        })
        .collect();
    let nonneg_ok = nonneg.iter().filter(|x| x.1).count();
    let nonneg_built = nonneg.iter().filter(|x| x.0).count();
    outcome(
        &[
            ("rotations mu = 2k", rotations),
            ("catenation/product 100/100", axioms_ok == 100),
            ("hyperbolic |mu| <= 1", hyp_max <= 1.0),
            ("non-negative paths n <= mu <= 2n", nonneg_ok == 100),
        ],
        format!(
            "axioms {axioms_ok}/100, max |μ| hyperbolic {hyp_max}, non-negative {nonneg_ok}/100 (built {nonneg_built})"
        ),
    )
}

// 9 -------------------------------------------------------------------------

fn saddle_center_growth() -> Outcome {
    let scd = SaddleCenterData::new(&MassRatio::new(0.5).unwrap());
    let growth: Vec<bool> = (0..20u64)
        .into_par_iter()
        .map(|i| {
            let mut r = rng(1100 + i);
            let psi0 = random_symplectic(&mut r, 2, 0.7);
            (1..=10).all(|m| {
                let t = m as f64 * TAU / scd.lambda2;
                robbin_salamon(&saddle_center_path(&scd, psi0.clone(), 0.0, t))
                    .map(|mu| mu.value() >= (2 * m - 1) as f64)
                    .unwrap_or(false)
            })
        })
        .collect();
    let growth_ok = growth.iter().filter(|&&b| b).count();
    let lows: Vec<Option<f64>> = (0..200u64)
        .into_par_iter()
        .map(|i| {
            let mut r = rng(1200 + i);
            let h = r.gen_range(-2.4..-2.0);
            let p = random_hat_h_path(&mut r, h).ok()?;
            robbin_salamon(&p).ok().map(|m| m.value())
        })
        .collect();
    let computed = lows.iter().flatten().count();
    let min_mu = lows.iter().flatten().cloned().fold(f64::INFINITY, f64::min);
    outcome(
        &[
            ("mu >= 2m - 1 for 20 psi0, m <= 10", growth_ok == 20),
            ("200 paths computed", computed == 200),
            ("mu >= -9", min_mu >= -9.0),
        ],
        format!("growth {growth_ok}/20, Ĥ paths {computed}/200, min μ_RS {min_mu}"),
    )
}

// 10 ------------------------------------------------------------------------

fn shield() -> Outcome {
    let scd = SaddleCenterData::new(&MassRatio::new(0.5).unwrap());
    let expected_rate = shield_rate_at_r0(&scd).abs();
    let mut rate_err: f64 = 0.0;
    let mut area_err: f64 = 0.0;
    let mut r0_err: f64 = 0.0;
    for (c0, b) in [(0.5, 0.5), (1.0, 0.3), (0.2, 0.7)] {
        let r0 = (2.0 * c0 / scd.lambda2).sqrt();
        match shield_profile(&scd, c0, b, 0.5 * r0) {
            Ok(p) => {
                rate_err = rate_err.max((p.rate - expected_rate).abs() / expected_rate);
                area_err =
                    area_err.max((p.area_rate_end - 2.0 * PI * c0 / scd.lambda2).abs() / p.energy);
                r0_err = r0_err.max((p.r.last().unwrap() - r0).abs());
            }
            Err(_) => rate_err = f64::INFINITY,
        }
    }
    outcome(
        &[
            ("r -> r0", r0_err < 1e-8),
            ("rate within 5%", rate_err < 0.05),
            ("area rate = 2 pi c0 / lambda2 (1e-6)", area_err < 1e-6),
        ],
        format!(
            "|r_end - r0| {r0_err:.1e}, rate error {:.3}%, area error {area_err:.1e}",
            100.0 * rate_err
        ),
    )
}

// 11 ------------------------------------------------------------------------

fn liouville() -> Outcome {
    let mu = MassRatio::new(0.5).unwrap();
    let eps = 1e-3;
    let rep = verify_y_eps(&mu, eps, &SurfaceGrid::default()).unwrap();
    outcome(
        &[
            (">= 1e5 samples", rep.full.samples >= 100_000),
            ("min dH.Y > 0", rep.transverse()),
            ("beta-condition slack >= 0", rep.beta_slack_min >= 0.0),
            (
                "neck containment < 10 eps^1/2",
                rep.neck_max_distance < 10.0,
            ),
        ],
        format!(
            "{} samples, min dH·Y {:.3e}, β slack min {:.3} at x₃ = {:.3}, neck max {:.2} ε^½",
            rep.full.samples,
            rep.full.min_margin,
            rep.beta_slack_min,
            rep.beta_slack_argmin,
            rep.neck_max_distance
        ),
    )
}

// 12 ------------------------------------------------------------------------

/// Sup-norm distance over one time unit between the regularized arc mapped
/// back to Cartesian coordinates and the direct Cartesian arc.
fn correspondence(mu: f64, s0: &RotatingState) -> Option<f64> {
    let m = MassRatio::new(mu).ok()?;
    let t_end = 1.0;
    let std0 = from_frame(&m, s0, Frame::Symmetric);
    let h = hamiltonian(&m, &std0).ok()?;
    let cart = Cr3bp::in_frame(m, Frame::Symmetric);
    let csol = Integrator::with_tol(1e-13, 1e-15)
        .dense()
        .integrate(&StateFlow(&cart), 0.0, s0.to_vec().as_slice(), t_end, &[])
        .ok()
        .ok()?;
    // stay away from collisions
    let earth = Vector2::new(-0.5, 0.0);
    let moon = Vector2::new(0.5, 0.0);
    for y in &csol.y {
        let q = Vector2::new(y[2], y[3]);
        if (q - earth).norm() < 0.1 || (q - moon).norm() < 0.1 {
            return None;
        }
    }
    let ham = RegularizedHamiltonian::new(mu, h);
    let mut y0 = to_regularized(s0).ok()?.to_vec().as_slice().to_vec();
    y0.push(0.0);
    let flow = TimedRegularizedFlow {
        ham: &ham,
        variational: false,
    };
    let ev = [EventSpec::new(
        move |_s, y: &[f64]| y[4] - t_end,
        Direction::Increasing,
        true,
    )];
    let rsol = Integrator::with_tol(1e-13, 1e-15).integrate(&flow, 0.0, &y0, 1e3, &ev);
    let mut worst: f64 = 0.0;
    for y in &rsol.y {
        let rs = RegularizedState::from_vec(&Vector4::from_column_slice(&y[..4]));
        let z = from_regularized(&rs).ok()?.to_vec();
        let zc = Vector4::from_column_slice(&csol.interpolate(y[4])?[..4]);
        worst = worst.max((z - zc).amax());
    }
    let reached = rsol
        .y
        .last()
        .map(|y| (y[4] - t_end).abs() < 1e-9)
        .unwrap_or(false);
    Some(if reached { worst } else { f64::INFINITY })
}

fn regularization() -> Outcome {
    let mut r = rng(1300);
    let mut errs = Vec::new();
    while errs.len() < 10 {
        let mu = r.gen_range(0.1..0.9);
        let q = Vector2::new(r.gen_range(-1.2..1.2), r.gen_range(-1.0..1.0));
        if (q - Vector2::new(-0.5, 0.0)).norm() < 0.2 || (q - Vector2::new(0.5, 0.0)).norm() < 0.2 {
            continue;
        }
        let qdot = Vector2::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
        let s0 = RotatingState::from_velocity(q, qdot);
        if let Some(e) = correspondence(mu, &s0) {
            errs.push(e);
        }
    }
    let worst = errs.iter().cloned().fold(0.0, f64::max);
    outcome(
        &[("sup-norm < 1e-6", worst < 1e-6)],
        format!("worst sup-norm {worst:.2e} over 10 arcs"),
    )
}

// ---------------------------------------------------------------------------

type Criterion = (usize, &'static str, Duration, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 12] = [
        (1, "Lagrange data", Duration::from_secs(1), lagrange_data),
        (
            2,
            "saddle-center closed forms",
            Duration::from_secs(5),
            saddle_center,
        ),
        (3, "Lyapunov orbits", Duration::from_secs(30), lyapunov),
        (4, "retrograde orbit", Duration::from_secs(120), retrograde),
        (
            5,
            "Copenhagen convexity",
            Duration::from_secs(300),
            copenhagen_convexity,
        ),
        (6, "positivity suite", Duration::from_secs(120), appendix_b),
        (
            7,
            "non-convexity certificate",
            Duration::from_secs(60),
            nonconvexity,
        ),
        (8, "index engine", Duration::from_secs(60), index_engine),
        (
            9,
            "saddle-center index growth",
            Duration::from_secs(180),
            saddle_center_growth,
        ),
        (10, "shield profile", Duration::from_secs(10), shield),
        (
            11,
            "Liouville interpolation",
            Duration::from_secs(300),
            liouville,
        ),
        (
            12,
            "regularization correspondence",
            Duration::from_secs(60),
            regularization,
        ),
    ];
    let filter: Option<usize> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut unexpected = Vec::new();
    for (id, name, budget, run) in criteria {
        if filter.is_some_and(|f| f != id) {
            continue;
        }
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= budget;
        let pass = out.pass && in_time;
        let tag = match (pass, KNOWN_FAILURES.contains(&id)) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        let time_note = if in_time {
            String::new()
        } else {
            " over budget".to_string()
        };
        println!(
            "[{tag}] {id:>2} {name}: {} ({:.2} s / {} s{time_note})",
            out.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
        if !pass && !KNOWN_FAILURES.contains(&id) {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
