use proptest::prelude::*;
use rotating_trap::numerics::gauss_legendre_on;
use rotating_trap::reference::TrapConfig;
use rotating_trap::series::*;
use std::f64::consts::PI;

fn tr() -> SeriesTruncation {
    SeriesTruncation::default()
}

/// Disk integral with Gauss–Legendre in `r` split at the source radius and
/// the midpoint rule in `theta`.
fn disk_integral(g: &SeriesGreen, nr: usize, nt: usize) -> f64 {
    let mut tot = 0.0;
    for (a, b) in [(0.0, g.r0()), (g.r0(), 1.0)] {
        let (x, wx) = gauss_legendre_on(nr, a, b);
        for (r, wr) in x.iter().zip(&wx) {
            let c = g.radial_coefficients(*r).unwrap();
            let s: f64 = (0..nt)
                .map(|j| g.green_with(*r, 2.0 * PI * (j as f64 + 0.5) / nt as f64, &c).unwrap())
                .sum();
            tot += wr * r * s * 2.0 * PI / nt as f64;
        }
    }
    tot
}

/// The log singularity makes the error `O(h^2)`; extrapolate and double
/// until two successive estimates agree to `1e-7`.
fn converged_disk_integral(g: &SeriesGreen) -> f64 {
    let (mut nr, mut nt) = (20, 128);
    let mut coarse = disk_integral(g, nr, nt);
    let mut prev = f64::NAN;
    loop {
        nr *= 2;
        nt *= 2;
        let fine = disk_integral(g, nr, nt);
        let est = (4.0 * fine - coarse) / 3.0;
        if (est - prev).abs() < 1e-7 || nr >= 320 {
            return est;
        }
        prev = est;
        coarse = fine;
    }
}

#[test]
fn zero_mean() {
    for (r0, w) in [(0.6, 10.0), (0.3, 2.0)] {
        let g = SeriesGreen::new(r0, w, tr()).unwrap();
        let m = converged_disk_integral(&g);
        assert!(m.abs() < 1e-6, "r0={r0} omega={w}: {m:e}");
    }
}

#[test]
fn field_average_is_mass_over_pi() {
    let cfg = TrapConfig::new(0.6, 0.05, 10.0).unwrap();
    let g = SeriesGreen::new(cfg.r0, cfg.omega, tr()).unwrap();
    let h = matching_h(&cfg, &tr()).unwrap().value;
    // u = -pi G + H, integrated over the disk of area pi
    let avg = (-PI * converged_disk_integral(&g) + PI * h) / PI;
    let mass = mass_series(&cfg, &tr()).unwrap().value;
    assert!((avg - mass / PI).abs() < 1e-6);
}

#[test]
fn neumann_boundary() {
    let g = SeriesGreen::new(0.6, 10.0, tr()).unwrap();
    let h = 1e-4;
    for k in 0..24 {
        let t = 2.0 * PI * k as f64 / 24.0;
        let f = |r: f64| g.green(r, t).unwrap();
        let d = (3.0 * f(1.0) - 4.0 * f(1.0 - h) + f(1.0 - 2.0 * h)) / (2.0 * h);
        assert!(d.abs() < 1e-6, "theta={t}: {d:e}");
    }
}

#[test]
fn no_flux_per_mode() {
    for w in [1.0, 10.0, 100.0] {
        for m in [1u32, 5, 20] {
            let f = |r: f64| radial_mode(r, 0.5, w, m).unwrap();
            // fourth-order one-sided difference
            let h = 1e-3;
            let d = (25.0 * f(1.0) - 48.0 * f(1.0 - h) + 36.0 * f(1.0 - 2.0 * h) - 16.0 * f(1.0 - 3.0 * h)
                + 3.0 * f(1.0 - 4.0 * h))
                / (12.0 * h);
            let scale = f(1.0).norm().max(1e-3);
            assert!(d.norm() < 1e-9_f64.max(1e-6 * scale), "omega={w} m={m}: {d}");
        }
    }
}

#[test]
fn mode_continuity_and_jump() {
    for r0 in [0.2, 0.5, 0.8] {
        for w in [1.0, 10.0, 100.0] {
            for m in 1..=20u32 {
                let f = |r: f64| radial_mode(r, r0, w, m).unwrap();
                let scale = f(r0).norm().max(1e-12);
                assert!((f(r0 - 1e-12) - f(r0 + 1e-12)).norm() < 1e-10_f64.max(1e-8 * scale));
                let h = 1e-6;
                let left = (3.0 * f(r0) - 4.0 * f(r0 - h) + f(r0 - 2.0 * h)) / (2.0 * h);
                let right = (-3.0 * f(r0) + 4.0 * f(r0 + h) - f(r0 + 2.0 * h)) / (2.0 * h);
                let jump = right - left;
                let expect = -1.0 / (2.0 * PI * r0);
                assert!(
                    (jump.re - expect).abs() < 1e-5 && jump.im.abs() < 1e-5,
                    "r0={r0} omega={w} m={m}: {jump}"
                );
            }
        }
    }
}

#[test]
fn zero_mode_boundary_value() {
    let r0 = 0.6;
    let v = radial_mode(1.0, r0, 10.0, 0).unwrap();
    let a0 = (2.0 * r0 * r0 - 3.0) / (8.0 * PI);
    assert!((v.re - (1.0 / (4.0 * PI) + a0)).abs() < 1e-15);
}

#[test]
fn truncation_doubling_is_stable() {
    let a = regular_part(0.6, 10.0, &tr()).unwrap().value;
    let b = regular_part(0.6, 10.0, &SeriesTruncation { m_max: 4000, ..tr() }).unwrap().value;
    assert!((a - b).abs() < 1e-8);
}

#[test]
fn tail_terms_decrease() {
    let (r0, w) = (0.6, 10.0);
    let t = |m: u32| (radial_mode(r0, r0, w, m).unwrap() - 1.0 / (4.0 * PI * m as f64)).norm();
    let mut prev = t(30);
    for m in 31..200 {
        let v = t(m);
        assert!(v < prev, "m={m}");
        prev = v;
    }
}

#[test]
fn near_trap_log_slope() {
    let cfg = TrapConfig::new(0.6, 1e-6, 10.0).unwrap();
    let f = SeriesField::new(&cfg, &tr()).unwrap();
    let at = |d: f64| {
        // behind the trap, along the ring direction
        let (x, y) = (cfg.r0, d);
        f.u(x.hypot(y), y.atan2(x)).unwrap()
    };
    let slope = (at(1e-3) - at(1e-4)) / (1e-3f64.ln() - 1e-4f64.ln());
    assert!((slope - 0.5).abs() < 0.01, "{slope}");
}

#[test]
fn field_minimum_on_ring_lies_ahead_of_trap() {
    let cfg = TrapConfig::new(0.6, 0.05, 10.0).unwrap();
    let f = SeriesField::new(&cfg, &tr()).unwrap();
    // the trap moves towards negative theta
    for d in [0.1, 0.3, 0.6] {
        assert!(f.u(cfg.r0, -d).unwrap() < f.u(cfg.r0, d).unwrap(), "d={d}");
    }
}

#[test]
fn fourier_log_identity() {
    // log|x - x0| = log r> - sum_m (r</r>)^m cos(m theta) / m
    for &(r, th, r0) in &[(0.3, 1.0, 0.6), (0.9, 2.0, 0.5), (0.55, 0.4, 0.6)] {
        let (lo, hi) = if r < r0 { (r, r0) } else { (r0, r) };
        let q: f64 = lo / hi;
        let s: f64 = (1..=200).map(|m| q.powi(m) * (m as f64 * th).cos() / m as f64).sum();
        let exact = (r * th.cos() - r0).hypot(r * th.sin()).ln();
        assert!((hi.ln() - s - exact).abs() < 1e-4);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn pde_residual(r in 0.1f64..0.95, th in 0.3f64..(2.0 * PI - 0.3), w in 0.5f64..20.0) {
        let r0 = 0.6;
        let g = SeriesGreen::new(r0, w, tr()).unwrap();
        let f = |r: f64, t: f64| g.green(r, t).unwrap();
        let h = 1e-3;
        let grr = (f(r + h, th) - 2.0 * f(r, th) + f(r - h, th)) / (h * h);
        let gr = (f(r + h, th) - f(r - h, th)) / (2.0 * h);
        let gtt = (f(r, th + h) - 2.0 * f(r, th) + f(r, th - h)) / (h * h);
        let gt = (f(r, th + h) - f(r, th - h)) / (2.0 * h);
        let res = grr + gr / r + gtt / (r * r) + w * gt - 1.0 / PI;
        prop_assert!(res.abs() < 1e-4, "residual {}", res);
    }

    #[test]
    fn mode_sum_is_real_and_finite(r0 in 0.05f64..0.9, w in 0.1f64..200.0) {
        let v = regular_part(r0, w, &tr()).unwrap();
        prop_assert!(v.value.is_finite());
        prop_assert!(v.converged);
    }
}
