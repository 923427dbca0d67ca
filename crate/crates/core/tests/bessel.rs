use num_complex::Complex64;
use proptest::prelude::*;
use rotating_trap::special::{bessel_i, bessel_ik, bessel_k, bessel_prime_pair};
use std::f64::consts::PI;

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

// (n, z, I_n(z), K_n(z)) evaluated at 30 digits with an arbitrary-precision library.
const TABLE: &[(u32, (f64, f64), (f64, f64), (f64, f64))] = &[
    (0, (0.5, 0.0), (1.0634833707413235193, 0.0), (0.92441907122766586178, 0.0)),
    (1, (1.7, -0.4), (1.1229557625429745483, -0.4542368418335816847), (0.17517902927363449635, 0.10694685038593957738)),
    (0, (3.5, 2.0), (-1.0046979493161126783, 6.6902643840870194151), (-0.011501563791813885862, -0.014340974647701019774)),
    (2, (7.0, -7.0), (108.57072847918599074, -54.861205406337222167), (0.00013714684908361830952, 0.00039187126535902554196)),
    (5, (15.0, -15.0), (-145982.9931984660105, -117052.55898315536508), (-1.2545866676494008681e-7, -1.0318428709095094982e-8)),
    (10, (20.0, 5.0), (2726669.7486229273736, -2943838.2505114087048), (4.4530672396281645601e-9, 3.2093133899661117502e-9)),
    (3, (0.05, -0.02), (1.3539745714127347756e-6, -2.9588909050848060282e-6), (21303.852239666266532, 46571.476456611172462)),
    (25, (8.0, -8.0), (-1.8562468019779771745e-7, -3.9049567556078027793e-7), (-23727.709969177675294, 39150.685611397249312)),
];

#[test]
fn high_precision_reference_values() {
    for &(n, (zr, zi), (ir, ii), (kr, ki)) in TABLE {
        let z = Complex64::new(zr, zi);
        let i = bessel_i(n, z).unwrap();
        let k = bessel_k(n, z).unwrap();
        assert!(rel(i, Complex64::new(ir, ii)) < 1e-12, "I_{n}({z}) = {i}");
        assert!(rel(k, Complex64::new(kr, ki)) < 1e-12, "K_{n}({z}) = {k}");
    }
}

/// I_n(z) = (1/pi) int_0^pi exp(z cos t) cos(n t) dt; trapezoid is spectrally accurate.
fn i_integral(n: u32, z: Complex64) -> Complex64 {
    let m = 2000;
    let h = PI / m as f64;
    let f = |t: f64| (z * t.cos()).exp() * (n as f64 * t).cos();
    let mut s = (f(0.0) + f(PI)) * 0.5;
    for j in 1..m {
        s += f(j as f64 * h);
    }
    s * h / PI
}

/// K_n(z) = int_0^inf exp(-z cosh t) cosh(n t) dt for Re z > 0.
fn k_integral(n: u32, z: Complex64) -> Complex64 {
    let h: f64 = 1e-3;
    let mut s = Complex64::new(0.5, 0.0) * (-z).exp();
    let mut t: f64 = h;
    loop {
        let term = (-z * t.cosh()).exp() * (n as f64 * t).cosh();
        s += term;
        if term.norm() < 1e-18 * s.norm() {
            break;
        }
        t += h;
    }
    s * h
}

#[test]
fn integral_representations() {
    for &(n, z) in &[
        (0, Complex64::new(0.8, 0.3)),
        (2, Complex64::new(4.0, -4.0)),
        (6, Complex64::new(9.0, 9.0)),
        (1, Complex64::new(13.0, -2.0)),
    ] {
        assert!(rel(bessel_i(n, z).unwrap(), i_integral(n, z)) < 1e-11, "I_{n}({z})");
        assert!(rel(bessel_k(n, z).unwrap(), k_integral(n, z)) < 1e-9, "K_{n}({z})");
    }
}

#[test]
fn derivative_by_central_difference() {
    let z = Complex64::new(2.5, -1.5);
    let h = 1e-5;
    for n in [0u32, 3, 7] {
        let (di, dk) = bessel_prime_pair(n, z).unwrap();
        let fd_i = (bessel_i(n, z + h).unwrap() - bessel_i(n, z - h).unwrap()) / (2.0 * h);
        let fd_k = (bessel_k(n, z + h).unwrap() - bessel_k(n, z - h).unwrap()) / (2.0 * h);
        assert!(rel(di, fd_i) < 1e-8);
        assert!(rel(dk, fd_k) < 1e-8);
    }
}

proptest! {
    #[test]
    fn wronskian_holds(n in 0u32..80, r in 0.01f64..60.0, phi in -PI / 2.0..PI / 2.0) {
        let z = Complex64::from_polar(r, phi);
        let b = bessel_ik(n, z).unwrap();
        let w = ((b.i * b.dk - b.di * b.k) * z).value();
        prop_assert!((w + 1.0).norm() < 1e-10, "z W = {}", w);
    }

    #[test]
    fn conjugate_symmetry(n in 0u32..20, r in 0.01f64..30.0, phi in -PI / 2.0..PI / 2.0) {
        let z = Complex64::from_polar(r, phi);
        let i1 = bessel_i(n, z).unwrap();
        let i2 = bessel_i(n, z.conj()).unwrap();
        let k1 = bessel_k(n, z).unwrap();
        let k2 = bessel_k(n, z.conj()).unwrap();
        prop_assert!(rel(i2, i1.conj()) < 1e-13);
        prop_assert!(rel(k2, k1.conj()) < 1e-13);
    }
}
