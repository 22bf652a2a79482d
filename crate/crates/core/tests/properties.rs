use lpc_enhance_core::blocks::{
    dense_oracle, lp2poles, lp2wav, poles2lp, poles_from_params, LpCoefficients, PairingMode, PoleParams,
};
use lpc_enhance_core::channel::mix_at_snr;
use lpc_enhance_core::enhance::{composite_loss, EnhanceConfig, LossTarget};
use lpc_enhance_core::lpc::{autocorrelation, levinson_durbin, resynthesize};
use lpc_enhance_core::signal::{power, FrameLayout, SampleBuffer};
use proptest::prelude::*;

fn rms_rel(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum::<f64>().max(1e-300);
    (num / den).sqrt()
}

fn params_strategy(mode: PairingMode, order: usize, slots: usize) -> impl Strategy<Value = PoleParams> {
    let n = mode.columns(order) * slots;
    (prop::collection::vec(-4.0f64..4.0, n), prop::collection::vec(-3.2f64..3.2, n)).prop_map(move |(r, a)| {
        PoleParams { mode, order, slots, radius_raw: r, angle: a }
    })
}

/// Stable real coefficients for `slots` slots of `order`.
fn stable_coeffs(order: usize, slots: usize) -> impl Strategy<Value = LpCoefficients> {
    params_strategy(PairingMode::Conjugate, order, slots).prop_map(|p| poles2lp(&poles_from_params(&p)).real())
}

/// Gaussian elimination with partial pivoting.
fn dense_solve(mut m: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for c in 0..n {
        let piv = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs())).unwrap();
        m.swap(c, piv);
        b.swap(c, piv);
        for r in c + 1..n {
            let f = m[r][c] / m[c][c];
            for k in c..n {
                m[r][k] -= f * m[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        x[r] = (b[r] - (r + 1..n).map(|k| m[r][k] * x[k]).sum::<f64>()) / m[r][r];
    }
    x
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lp2wav_is_linear_in_excitation(
        a in stable_coeffs(3, 4),
        z1 in prop::collection::vec(-1.0f64..1.0, 32),
        z2 in prop::collection::vec(-1.0f64..1.0, 32),
        alpha in -2.0f64..2.0,
        beta in -2.0f64..2.0,
    ) {
        let layout = FrameLayout::new(8, 4, 3).unwrap();
        let x1 = lp2wav(&a, &z1, &layout).unwrap();
        let x2 = lp2wav(&a, &z2, &layout).unwrap();
        let z: Vec<f64> = z1.iter().zip(&z2).map(|(u, v)| alpha * u + beta * v).collect();
        let x = lp2wav(&a, &z, &layout).unwrap();
        let expect: Vec<f64> = x1.iter().zip(&x2).map(|(u, v)| alpha * u + beta * v).collect();
        for (g, e) in x.iter().zip(&expect) {
            prop_assert!((g - e).abs() <= 1e-9 * (1.0 + e.abs()));
        }
    }

    #[test]
    fn lp2wav_matches_dense_solve(a in stable_coeffs(3, 3), z in prop::collection::vec(-1.0f64..1.0, 12)) {
        let layout = FrameLayout::new(4, 3, 3).unwrap();
        let fast = lp2wav(&a, &z, &layout).unwrap();
        let dense = dense_oracle(&a, &z, &layout).unwrap();
        prop_assert!(dense.x[0] == 0.0 && rms_rel(&fast, &dense.x[1..]) < 1e-10);
    }

    #[test]
    fn parameters_always_give_stable_filters(
        p in params_strategy(PairingMode::Conjugate, 11, 10),
        z in prop::collection::vec(-1.0f64..1.0, 460),
    ) {
        let poles = poles_from_params(&p);
        prop_assert!(poles.max_radius() <= 0.999 + 1e-12);
        let a = poles2lp(&poles);
        prop_assert!(a.max_imag() <= 1e-12);
        let x = lp2wav(&a.real(), &z, &FrameLayout::new(46, 10, 11).unwrap()).unwrap();
        prop_assert!(x.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn free_mode_parameters_are_stable(p in params_strategy(PairingMode::Free, 5, 3)) {
        prop_assert!(poles_from_params(&p).max_radius() <= 0.999 + 1e-12);
    }

    #[test]
    fn roots_then_expansion_round_trips(a in stable_coeffs(8, 1)) {
        let roots = lp2poles(a.slot(0)).unwrap();
        let back = poles2lp(&lpc_enhance_core::blocks::PoleSet { order: 8, slots: 1, poles: roots });
        for (g, e) in back.slot(0).iter().zip(a.slot(0)) {
            prop_assert!((g.re - e).abs() < 1e-7, "{} vs {}", g.re, e);
            prop_assert!(g.im.abs() < 1e-7);
        }
    }

    #[test]
    fn levinson_matches_normal_equations(x in prop::collection::vec(-1.0f64..1.0, 64..256), order in 1usize..=20) {
        let r = autocorrelation(&x, order).unwrap();
        let lev = levinson_durbin(&r, order).unwrap();
        prop_assume!(lev.truncated_at.is_none());
        let m: Vec<Vec<f64>> = (0..order).map(|i| (0..order).map(|j| r[i.abs_diff(j)]).collect()).collect();
        let dense = dense_solve(m, r[1..].to_vec());
        for (g, e) in lev.coeffs.iter().zip(&dense) {
            prop_assert!((g - e).abs() < 1e-8, "{} vs {}", g, e);
        }
    }

    #[test]
    fn analysis_synthesis_round_trip(x in prop::collection::vec(-1.0f64..1.0, 276..1200)) {
        let buf = SampleBuffer::new(x, 11025).unwrap();
        let layout = FrameLayout::new(46, 6, 11).unwrap();
        let y = resynthesize(&buf, &layout).unwrap();
        prop_assert_eq!(y.len(), buf.len());
        prop_assert!(rms_rel(y.samples(), buf.samples()) < 1e-10);
    }

    #[test]
    fn mixing_hits_the_requested_snr(
        s in prop::collection::vec(-1.0f64..1.0, 256),
        n in prop::collection::vec(-1.0f64..1.0, 256),
        snr in -10.0f64..20.0,
    ) {
        let sb = SampleBuffer::new(s.clone(), 8000).unwrap();
        let nb = SampleBuffer::new(n, 8000).unwrap();
        let mixed = mix_at_snr(&sb, &nb, snr).unwrap();
        let resid: Vec<f64> = mixed.samples().iter().zip(&s).map(|(m, v)| m - v).collect();
        let got = 10.0 * (power(&s) / power(&resid)).log10();
        prop_assert!((got - snr).abs() < 1e-3);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn loss_decomposes_into_weighted_terms(
        p in params_strategy(PairingMode::Conjugate, 4, 3),
        z in prop::collection::vec(-1.0f64..1.0, 96),
        clean in prop::collection::vec(-0.5f64..0.5, 96),
        mu in 0.0f64..3.0,
        lambda in 0.0f64..3.0,
    ) {
        let layout = FrameLayout::new(32, 3, 4).unwrap();
        let target = LossTarget::new(&SampleBuffer::new(clean, 11025).unwrap(), &layout, 11025).unwrap();
        let cfg = EnhanceConfig { mu, lambda, layout, ..EnhanceConfig::default() };
        let (r, _) = composite_loss(&p, &z, &target, &cfg).unwrap();
        prop_assert!((r.total - (r.mel + mu * r.wave + lambda * r.lp)).abs() <= 1e-12 * r.total.abs().max(1.0));
    }
}
