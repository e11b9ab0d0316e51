use super::appendix_b::{self, in_h1};
use super::copenhagen::{bar_h, d_of, s20, shat1, shat2, underline_h};
use super::*;
use approx::assert_relative_eq;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::FRAC_PI_2;

/// `F = 0`, `V = ½(a x₁² + b x₂²) − 1`.
struct Mechanical {
    a: f64,
    b: f64,
}

impl MagneticModel for Mechanical {
    fn jet(&self, x: &Vector2<f64>) -> ModelJet {
        let zero = Jet2 {
            value: 0.0,
            grad: Vector2::zeros(),
            hess: Matrix2::zeros(),
        };
        ModelJet {
            f: [zero, zero],
            v: Jet2 {
                value: 0.5 * (self.a * x.x * x.x + self.b * x.y * x.y) - 1.0,
                grad: Vector2::new(self.a * x.x, self.b * x.y),
                hess: Matrix2::new(self.a, 0.0, 0.0, self.b),
            },
        }
    }
}

fn random_inside<M: MagneticModel>(m: &M, rng: &mut ChaCha8Rng, x1: f64, x2: f64) -> Vector2<f64> {
    loop {
        let x = Vector2::new(rng.gen_range(-x1..x1), rng.gen_range(-x2..x2));
        if let Ok((r, _)) = radius(m, &x) {
            if r > 1e-3 {
                return x;
            }
        }
    }
}

#[test]
fn frame_determinant_matches_det_u_w() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let models = [
        RegularizedHamiltonian::new(0.5, -2.2),
        RegularizedHamiltonian::new(0.3, -1.9),
        RegularizedHamiltonian::new(0.05, -1.7),
    ];
    let mut worst: f64 = 0.0;
    for m in &models {
        for _ in 0..3400 {
            let x = random_inside(m, &mut rng, 1.5, FRAC_PI_2);
            let th = rng.gen_range(0.0..std::f64::consts::TAU);
            let a = tangent_hessian_det(m, th, &x).unwrap();
            let b = det_u_w(m, th, &x).unwrap();
            let u = u_w_matrix(m, th, &x).unwrap().determinant();
            let scale = a.abs().max(b.abs()).max(1e-3);
            worst = worst.max((a - b).abs() / scale).max((u - b).abs() / scale);
        }
    }
    assert!(worst < 1e-8, "{worst}");
}

#[test]
fn boundary_frame_gives_boundary_form() {
    let m = copenhagen_model(-2.3);
    let x2 = 0.7;
    let x1 = m.boundary_x1(x2).unwrap();
    let x = Vector2::new(x1, x2);
    let jet = m.jet(&x);
    let b = boundary_det(&jet.v);
    assert_relative_eq!(det_u_w(&m, 1.0, &x).unwrap(), b, max_relative = 1e-6);
    assert_relative_eq!(
        tangent_hessian_det(&m, 1.0, &x).unwrap(),
        b,
        max_relative = 1e-6
    );
    assert!(u_w_matrix(&m, 1.0, &Vector2::new(x1 + 1e-15, x2)).is_err() || b > 0.0);
}

#[test]
fn decoupled_form_and_split() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let m = RegularizedHamiltonian::new(0.5, -2.1);
    for _ in 0..2000 {
        let x = random_inside(&m, &mut rng, 1.2, FRAC_PI_2);
        let th = rng.gen_range(-3.2..3.2);
        let det = det_u_w(&m, th, &x).unwrap();
        assert_relative_eq!(
            decoupled_det(&m, th, &x).unwrap(),
            det,
            max_relative = 1e-10,
            epsilon = 1e-12
        );
        let t = criterion_terms(&m, th, &x).unwrap();
        assert!(t.d1.abs() < 1e-12 * (1.0 + t.d2.abs()));
        assert_relative_eq!(t.c0, det, max_relative = 1e-9, epsilon = 1e-12);
        assert_relative_eq!(t.d1 + t.d2, det, max_relative = 1e-9, epsilon = 1e-12);
    }
    assert!(decoupled_det(
        &RegularizedHamiltonian::new(0.3, -2.0),
        0.0,
        &Vector2::new(0.1, 0.1)
    )
    .is_err());
}

#[test]
fn split_holds_for_coupled_models() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let m = RegularizedHamiltonian::new(0.2, -1.8);
    for _ in 0..2000 {
        let x = random_inside(&m, &mut rng, 1.2, FRAC_PI_2);
        let th = rng.gen_range(-3.2..3.2);
        let det = det_u_w(&m, th, &x).unwrap();
        let t = criterion_terms(&m, th, &x).unwrap();
        let scale = det.abs().max(1e-6);
        assert!((t.c0 - det).abs() / scale < 1e-8);
        assert!((t.d1 + t.d2 - det).abs() / scale < 1e-8);
    }
}

#[test]
fn mechanical_case_is_convex() {
    let m = Mechanical { a: 1.0, b: 3.0 };
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..500 {
        let x = random_inside(&m, &mut rng, 1.4, 0.8);
        let t = criterion_terms(&m, 0.3, &x).unwrap();
        assert_eq!(t.a2, 0.0);
        assert_eq!(t.a13, 0.0);
        assert_eq!(t.a11, 0.0);
        assert_relative_eq!(t.c0, t.a0, max_relative = 1e-14);
        assert!(det_u_w(&m, 0.3, &x).unwrap() > 0.0);
        assert!(tangent_hessian_det(&m, 0.3, &x).unwrap() > 0.0);
    }
    assert!(radius(&m, &Vector2::new(3.0, 0.0)).is_err());
}

#[test]
fn copenhagen_jet_matches_regularized_hamiltonian() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for &h in &[-2.0, -2.4, -3.0] {
        let c = copenhagen_model(h);
        let g = RegularizedHamiltonian::new(0.5, h);
        for _ in 0..500 {
            let x = Vector2::new(rng.gen_range(-1.3..1.3), rng.gen_range(-1.6..1.6));
            let (a, b) = (c.jet(&x), g.jet(&x));
            let close = |p: f64, q: f64| (p - q).abs() <= 1e-13 * (1.0 + p.abs().max(q.abs()));
            assert!(close(a.v.value, b.v.value), "{} {}", a.v.value, b.v.value);
            for i in 0..2 {
                assert!(close(a.v.grad[i], b.v.grad[i]));
                for j in 0..2 {
                    assert!(close(a.v.hess[(i, j)], b.v.hess[(i, j)]));
                }
            }
            for k in 0..2 {
                assert!(close(a.f[k].value, b.f[k].value));
                for i in 0..2 {
                    assert!(close(a.f[k].grad[i], b.f[k].grad[i]));
                    assert!(close(a.f[k].hess[(i, i)], b.f[k].hess[(i, i)]));
                }
            }
            // closed forms in (s₁, s₂)
            let (s1, s2) = (x.x.cosh(), x.y.cos());
            assert!(close(a.v.value, c.potential_s(s1, s2)));
            assert!(close(a.v.grad.x.abs(), c.v1_s(s1).abs()));
            assert!(close(a.v.hess[(0, 0)], c.v11_s(s1)));
            assert!(close(a.v.hess[(1, 1)], c.v22_s(s2)));
        }
    }
}

#[test]
fn copenhagen_symmetries() {
    let c = copenhagen_model(-2.2);
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for _ in 0..300 {
        let x = random_inside(&c, &mut rng, 1.0, FRAC_PI_2);
        let th = rng.gen_range(-3.0..3.0);
        let d = det_u_w(&c, th, &x).unwrap();
        // (x₁, x₂, θ) ↦ (−x₁, x₂, −θ) and (x₁, −x₂, π − θ)
        let d1 = det_u_w(&c, -th, &Vector2::new(-x.x, x.y)).unwrap();
        let d2 = det_u_w(&c, std::f64::consts::PI - th, &Vector2::new(x.x, -x.y)).unwrap();
        assert_relative_eq!(d, d1, max_relative = 1e-10, epsilon = 1e-14);
        assert_relative_eq!(d, d2, max_relative = 1e-10, epsilon = 1e-14);
    }
}

#[test]
fn hill_bounds() {
    let (x, s) = copenhagen_model(-2.0).hill_bound();
    assert_relative_eq!(s, 1.80996018585967661917, epsilon = 1e-13);
    assert_relative_eq!(x, 1.19953919079840781770, epsilon = 1e-13);
    assert_relative_eq!(
        copenhagen_model(-2.5).hill_bound().0,
        1.00880777954318726,
        epsilon = 1e-13
    );
    assert_relative_eq!(
        copenhagen_model(-3.0).hill_bound().0,
        0.895625409094960246,
        epsilon = 1e-13
    );
    let m = copenhagen_model(-2.0);
    assert!(m.contains_saddles());
    assert!(m.potential_s(1.0, 0.0).abs() < 1e-15);
    assert!(!copenhagen_model(-2.01).contains_saddles());
    // S₊ sits on ∂ℋ: V(0, π/2) = 0 with ∇V = 0
    let jet = m.jet(&Vector2::new(0.0, FRAC_PI_2));
    assert!(jet.v.value.abs() < 1e-15 && jet.v.grad.norm() < 1e-15);
}

#[test]
fn helper_values() {
    assert_relative_eq!(shat2(), 0.818794146005224880535, epsilon = 1e-14);
    assert_relative_eq!(s20(), 0.61672646089655942, epsilon = 1e-15);
    assert_relative_eq!(shat1(), 1.37115710870562966950, epsilon = 1e-13);
    assert_relative_eq!(d_of(0.82), 0.003661876562843766, epsilon = 1e-15);
    assert_relative_eq!(d_of(0.0), -17.0 / 16.0);
    assert_relative_eq!(d_of(1.0), 15.0 / 16.0);
    let m = copenhagen_model(-2.0);
    assert_relative_eq!(m.potential_s(1.6f64, 0.82), 0.012116305, epsilon = 1e-9);
    assert_relative_eq!(m.potential_s(1.9, 1.0), 19379.0 / 320000.0, epsilon = 1e-15);
    assert_relative_eq!(m.c_minus_one(1.0, 0.3), 7.0 / 16.0, epsilon = 1e-15);
    assert_relative_eq!(m.v11_s(1.0), 7.0 / 16.0, epsilon = 1e-15);
    assert_relative_eq!(
        appendix_b::e1(0.0, 0.0),
        6.52190190946864966,
        epsilon = 1e-13
    );
    assert_relative_eq!(
        appendix_b::k5(0.8),
        448561805958688.0 / 30517578125.0,
        max_relative = 1e-14
    );
    for s2 in [0.5, 0.7, 0.9] {
        assert_relative_eq!(m.d_hat(s2), d_of(s2), epsilon = 1e-14);
        let hd = copenhagen::hat_d_closed(s2, -2.4);
        assert_relative_eq!(copenhagen_model(-2.4).d_hat(s2), hd, epsilon = 1e-14);
        // V(1, s₂) vanishes at h = h(s₂)
        assert!(copenhagen_model(underline_h(s2)).potential_s(1.0, s2).abs() < 1e-14);
        // ∂_h D̂ vanishes at h̄(s₂)
        let hb = bar_h(s2);
        let dd = (copenhagen::hat_d_closed(s2, hb + 1e-6)
            - copenhagen::hat_d_closed(s2, hb - 1e-6))
            / 2e-6;
        if hb < underline_h(s2) {
            assert!(dd.abs() < 1e-6, "{s2} {dd}");
        }
    }
    let h = helper_functions(-2.0, 1.2, 0.5).unwrap();
    assert_relative_eq!(h.i0, m.i0(1.2, 0.5));
    assert!(helper_functions(-2.0, 0.9, 0.5).is_err());
}

#[test]
fn monotonicity_on_h1() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let m = copenhagen_model(-2.0);
    let mut n = 0;
    while n < 2000 {
        let (s2, c) = (
            rng.gen_range(0.01..1.0),
            rng.gen_range(0.0..appendix_b::c_max()),
        );
        if !in_h1(s2, c) {
            continue;
        }
        n += 1;
        let s1 = 1.0 + c * c * s2 * s2;
        assert!(m.v1_s(s1) >= 0.0 && m.v2_s(s2) >= 0.0);
        // r decreases in s₁ and increases in s₂
        assert!(m.r_s(s1 + 1e-6, s2) <= m.r_s(s1, s2));
        assert!(m.r_s(s1, (s2 + 1e-6).min(1.0)) >= m.r_s(s1, s2) - 1e-15);
        // c_t ≥ c₋₁
        let x = Vector2::new(s1.acosh(), s2.acos());
        let (r, jet) = radius(&m, &x).unwrap();
        for t in [-1.0, -0.3, 0.4, 1.0] {
            let ct = r * t * jet.f[1].hess[(0, 0)] + jet.v.hess[(0, 0)];
            assert!(
                ct >= m.c_minus_one(s1, s2) - 1e-12,
                "{ct} {}",
                m.c_minus_one(s1, s2)
            );
        }
        // ∂_h I₀ ≤ 0 where D̂ ≤ 0
        if m.d_hat(s2) <= 0.0 {
            let dh = (copenhagen_model(-2.0 + 1e-7).i0(s1, s2)
                - copenhagen_model(-2.0 - 1e-7).i0(s1, s2))
                / 2e-7;
            assert!(dh <= 1e-7, "{dh}");
        }
    }
}

#[test]
fn scan_is_positive_and_vanishes_to_fourth_order() {
    let spec = ScanSpec {
        n_x1: 96,
        n_x2: 96,
        n_theta: 64,
        ..ScanSpec::default()
    };
    let s = convexity_scan(&copenhagen_model(-2.0), &spec).unwrap();
    assert!(s.positive(), "{} at {:?}", s.min_det, s.argmin);
    let fit = s.collar.unwrap();
    assert!((3.5..=4.5).contains(&fit.det_exponent), "{fit:?}");
    assert!(fit.det_r_squared > 0.99);
    assert!((3.5..=4.5).contains(&fit.i0_exponent), "{fit:?}");
    let below = convexity_scan(&copenhagen_model(-2.5), &spec).unwrap();
    assert!(below.positive() && below.collar.is_none());
    let bad = ScanSpec { n_theta: 8, ..spec };
    assert!(convexity_scan(&copenhagen_model(-2.0), &bad).is_err());
}

#[test]
fn nonconvexity_away_from_half() {
    assert!(g1(0.5).abs() < 1e-15);
    for r1 in [0.1, 0.3, 0.45, 0.55, 0.7, 0.9] {
        assert!(g1(r1).abs() > 0.0 && g1(r1).signum() == (0.5 - r1).signum());
        for s in [-1.0, 0.0, 1.0] {
            assert!(g2(r1, s) < 0.0);
        }
    }
    assert!(nonconvexity_certificate(1.2, 0.0).is_err());
    assert!(nonconvexity_certificate(0.3, 1.5).is_err());
    for r1 in [0.3, 0.4, 0.6] {
        let (m, xs) = saddle_model(r1).unwrap();
        let jet = m.jet(&Vector2::new(0.0, xs));
        assert!(
            jet.v.value.abs() < 1e-12 && jet.v.grad.norm() < 1e-10,
            "{jet:?}"
        );
        for th in [0.0, 1.0, 2.5] {
            let fit = cubic_coefficient(r1, th, 1e-3).unwrap();
            assert!(fit.max_relative_error() < 0.02, "{fit:?}");
        }
    }
}

#[test]
fn appendix_b_reduced_resolution() {
    let rep = appendix_b_suite_with(240);
    for c in &rep.claims {
        assert!(c.pass, "{c:?}");
    }
    for c in &rep.transcription {
        assert!(c.pass, "{c:?}");
    }
    assert!(rep.pass);
    assert!(rep.claim("E2").is_some() && rep.identity("k5 = k2 + 2k3").is_some());
}

proptest! {
    #[test]
    fn det_u_w_is_periodic_in_theta(x1 in -1.0f64..1.0, x2 in -1.5f64..1.5, th in -3.0f64..3.0) {
        let m = RegularizedHamiltonian::new(0.35, -1.8);
        let x = Vector2::new(x1, x2);
        if let Ok(d) = det_u_w(&m, th, &x) {
            let e = det_u_w(&m, th + std::f64::consts::TAU, &x).unwrap();
            prop_assert!((d - e).abs() <= 1e-9 * (1.0 + d.abs()));
        }
    }

    #[test]
    fn e2_forms_agree(l2 in 0.0f64..1.0, c in 0.0f64..1.1) {
        let a = 64.0 * appendix_b::e2(l2.sqrt(), c);
        let b = appendix_b::e2_expanded64(l2, c);
        prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0));
    }
}
