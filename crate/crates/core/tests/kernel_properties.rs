use proptest::prelude::*;
use surfdenoise_core::{Kernel, KernelKind};

// Reference weights g(x) written out from the closed forms, used to check
// the library and, after integrating x g(x), its error norms.
fn oracle_g(kind: KernelKind, s: f64, floor: f64, x: f64) -> Option<f64> {
    let r = x / s;
    Some(match kind {
        KernelKind::L2 => 2.0,
        KernelKind::TruncatedL2 => {
            if x * x < s {
                2.0
            } else {
                0.0
            }
        }
        KernelKind::L1 if x == 0.0 => return None,
        KernelKind::L1 => x.recip(),
        KernelKind::TruncatedL1 if x == 0.0 => return None,
        KernelKind::TruncatedL1 => {
            if r < 1.0 {
                x.recip()
            } else {
                0.0
            }
        }
        KernelKind::HuberMinimax => s.max(x).recip(),
        KernelKind::Lorentzian => (1.0 + 0.5 * r * r).recip() / (s * s),
        KernelKind::Gaussian => 2.0 * (-r * r).exp() / (s * s),
        KernelKind::Tukey => {
            if r < 1.0 {
                2.0 * (1.0 - r * r).powi(2) / (s * s)
            } else {
                0.0
            }
        }
        KernelKind::Box => {
            if r < 1.0 {
                1.0
            } else {
                floor
            }
        }
        KernelKind::CentinRational => {
            if r < 1.0 {
                1.0
            } else {
                1.0 / (1.0 + (r - 1.0).powi(2))
            }
        }
    })
}

// Composite Simpson rule of x g(x) on [a, b].
fn simpson(kind: KernelKind, s: f64, floor: f64, a: f64, b: f64) -> f64 {
    let n = 2000;
    let h = (b - a) / n as f64;
    let f = |t: f64| {
        // the L1 family integrand x g(x) tends to 1 at zero
        if t == 0.0 {
            return if kind.undefined_at_zero() { 1.0 } else { 0.0 };
        }
        t * oracle_g(kind, s, floor, t).unwrap()
    };
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

fn integral(kind: KernelKind, s: f64, floor: f64, x: f64) -> f64 {
    match kind.breakpoint(s) {
        // left segment stops just short of the jump so its endpoint takes the inner branch
        Some(b) if b < x => simpson(kind, s, floor, 0.0, b * (1.0 - 1e-13)) + simpson(kind, s, floor, b, x),
        _ => simpson(kind, s, floor, 0.0, x),
    }
}

fn grid(sigma: f64) -> impl Iterator<Item = f64> {
    (1..=60).map(move |k| 0.05 * k as f64 * sigma)
}

fn kernel(kind: KernelKind, sigma: f64) -> Kernel {
    Kernel::new(kind, sigma).unwrap()
}

#[test]
fn weights_match_reference() {
    for kind in KernelKind::ALL {
        for sigma in [0.25, 1.0, 2.5] {
            let k = kernel(kind, sigma);
            for x in std::iter::once(0.0).chain(grid(sigma)) {
                let want = oracle_g(kind, sigma, k.box_floor(), x);
                match (k.weight(x), want) {
                    (Some(a), Some(b)) => assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "{kind:?} {x}"),
                    (None, None) => {}
                    other => panic!("{kind:?} at {x}: {other:?}"),
                }
            }
        }
    }
}

#[test]
fn rho_is_integral_of_psi() {
    for kind in KernelKind::ALL {
        for sigma in [0.5, 1.0, 2.0] {
            let k = kernel(kind, sigma);
            for x in grid(sigma).step_by(7) {
                let want = integral(kind, sigma, k.box_floor(), x);
                let got = k.rho(x) - k.rho(0.0);
                assert!(
                    (got - want).abs() < 1e-8,
                    "{kind:?} sigma {sigma} x {x}: {got} vs {want}"
                );
            }
        }
    }
}

#[test]
fn derivative_consistency_on_grid() {
    let h = 1e-5;
    for kind in KernelKind::ALL {
        for sigma in [0.5, 1.0, 2.0] {
            let k = kernel(kind, sigma);
            for x in grid(sigma) {
                if kind.breakpoint(sigma).is_some_and(|b| (x - b).abs() < 1e-3) {
                    continue;
                }
                let fd = (k.rho(x + h) - k.rho(x - h)) / (2.0 * h);
                let psi = k.psi(x).unwrap();
                assert!((psi - fd).abs() < 1e-5, "{kind:?} sigma {sigma} x {x}: {psi} vs {fd}");
            }
        }
    }
}

#[test]
fn rho_is_monotone_and_bounded() {
    for kind in KernelKind::ALL {
        let sigma = 0.8;
        let k = kernel(kind, sigma);
        let values: Vec<f64> = std::iter::once(0.0).chain(grid(sigma)).map(|x| k.rho(x)).collect();
        assert!(values.windows(2).all(|w| w[1] >= w[0]), "{kind:?}");
        let bound = match kind {
            KernelKind::Gaussian => Some(1.0),
            KernelKind::Tukey => Some(1.0 / 3.0),
            KernelKind::TruncatedL2 | KernelKind::TruncatedL1 => Some(sigma),
            _ => None,
        };
        if let Some(b) = bound {
            assert!((0..1000).all(|i| k.rho(i as f64 * 0.1) <= b + 1e-15), "{kind:?}");
        }
    }
}

#[test]
fn tukey_and_truncated_l1_vanish_beyond_sigma() {
    for kind in [KernelKind::Tukey, KernelKind::TruncatedL1] {
        let k = kernel(kind, 0.7);
        for x in [0.7, 0.71, 1.0, 70.0] {
            assert_eq!(k.psi(x), Some(0.0));
            assert_eq!(k.weight(x), Some(0.0));
        }
    }
}

fn kind_strategy() -> impl Strategy<Value = KernelKind> {
    proptest::sample::select(KernelKind::ALL.to_vec())
}

proptest! {
    #[test]
    fn weight_times_x_is_psi(kind in kind_strategy(), sigma in 0.05f64..5.0, t in 1e-6f64..1.0) {
        let k = kernel(kind, sigma);
        let x = t * 5.0 * sigma;
        let psi = k.psi(x).unwrap();
        let gx = k.weight(x).unwrap() * x;
        prop_assert!((gx - psi).abs() < 1e-12 * psi.abs().max(1.0), "{:?}: {} vs {}", kind, gx, psi);
    }

    #[test]
    fn kernels_are_even(kind in kind_strategy(), sigma in 0.05f64..5.0, x in 1e-6f64..10.0) {
        let k = kernel(kind, sigma);
        prop_assert_eq!(k.rho(x), k.rho(-x));
        prop_assert_eq!(k.weight(x), k.weight(-x));
    }

    #[test]
    fn weights_are_non_negative(kind in kind_strategy(), sigma in 0.05f64..5.0, x in 0.0f64..20.0) {
        let g = kernel(kind, sigma).weight_or(x, 0.0);
        prop_assert!(g >= 0.0 && g.is_finite());
    }

    #[test]
    fn box_floor_scales_the_far_weight(sigma in 0.05f64..2.0, floor in 0.0f64..=1.0, t in 1.0f64..10.0) {
        let k = Kernel::boxed(sigma, floor).unwrap();
        prop_assert_eq!(k.weight(sigma * t), Some(floor));
        prop_assert_eq!(k.weight(sigma * 0.5), Some(1.0));
    }
}
