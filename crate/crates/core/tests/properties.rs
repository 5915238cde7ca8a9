use std::io::BufReader;

use proptest::prelude::*;

use lpmhd::diagnostics::{
    fit_lifespan_constant, lifespan_bound_new, lifespan_bound_old, running_sup, t_star_empirical, LifespanSample,
};
use lpmhd::dynamics::snapshot::{read_snapshot, write_snapshot};
use lpmhd::dynamics::{from_elsasser, to_elsasser, MhdState, SimConfig};
use lpmhd::littlewood_paley::{all_blocks, besov_norm, BesovSpec, DyadicPartition};
use lpmhd::paracalculus::{biot_savart, bony_reconstruct, curl2d, leray_project};
use lpmhd::spectral::ops::divergence;
use lpmhd::spectral::{random, Grid, ScalarField, VectorField};

fn grid(n: usize) -> Grid {
    Grid::periodic(n).unwrap()
}

fn sizes() -> impl Strategy<Value = usize> {
    prop_oneof![Just(16usize), Just(32), Just(64)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn blocks_sum_back_to_field(n in sizes(), seed in any::<u64>(), decay in 0.0f64..2.0) {
        let g = grid(n);
        let part = DyadicPartition::new(&g);
        let f = random::dealiased(&g, decay, seed).unwrap();
        let blocks = all_blocks(&f, &part).unwrap();
        let terms: Vec<(f64, &ScalarField)> = blocks.iter().map(|b| (1.0, b)).collect();
        prop_assert!(ScalarField::lincomb(&terms).unwrap().max_abs_diff(&f).unwrap() <= 1e-12);
    }

    #[test]
    fn bony_identity_holds(n in sizes(), seed in any::<u64>()) {
        let g = grid(n);
        let part = DyadicPartition::new(&g);
        let u = random::dealiased(&g, 1.0, seed).unwrap();
        let v = random::dealiased(&g, 1.0, seed ^ 0x5555).unwrap();
        prop_assert!(bony_reconstruct(&u, &v, &part).unwrap().residual <= 1e-10);
    }

    #[test]
    fn leray_is_an_idempotent_projection(n in sizes(), seed in any::<u64>()) {
        let g = grid(n);
        let f = VectorField::new(
            random::dealiased(&g, 1.0, seed).unwrap(),
            random::dealiased(&g, 1.0, seed.wrapping_add(1)).unwrap(),
        ).unwrap();
        let p = leray_project(&f);
        prop_assert!(leray_project(&p).max_abs_diff(&p).unwrap() <= 1e-12);
        prop_assert!(divergence(&p).sup_norm() <= 1e-10);
        // orthogonal projection never increases the L² norm
        prop_assert!(p.l2_norm() <= f.l2_norm() * (1.0 + 1e-12));
    }

    #[test]
    fn curl_inverts_biot_savart(n in sizes(), seed in any::<u64>()) {
        let g = grid(n);
        let omega = random::dealiased(&g, 1.0, seed).unwrap();
        prop_assert!(curl2d(&biot_savart(&omega)).max_abs_diff(&omega).unwrap() <= 1e-10);
    }

    #[test]
    fn besov_norm_is_a_seminorm(seed in any::<u64>(), lambda in -5.0f64..5.0) {
        let g = grid(32);
        let part = DyadicPartition::new(&g);
        let spec = BesovSpec::inf_one(1.0);
        let f = random::dealiased(&g, 1.0, seed).unwrap();
        let h = random::dealiased(&g, 1.0, seed.wrapping_add(7)).unwrap();
        let nf = besov_norm(&f, spec, &part).unwrap();
        let nh = besov_norm(&h, spec, &part).unwrap();
        let scaled = besov_norm(&f.scale(lambda), spec, &part).unwrap();
        prop_assert!((scaled - lambda.abs() * nf).abs() <= 1e-12 * (1.0 + nf));
        let sum = besov_norm(&f.add(&h).unwrap(), spec, &part).unwrap();
        prop_assert!(sum <= (nf + nh) * (1.0 + 1e-12));
    }

    #[test]
    fn elsasser_roundtrip(seed in any::<u64>()) {
        let g = grid(16);
        let s = MhdState {
            u: random::solenoidal(&g, 4, 1.0, seed).unwrap(),
            b: random::solenoidal(&g, 4, 1.0, seed.wrapping_add(3)).unwrap(),
            t: 0.25,
        };
        let back = from_elsasser(&to_elsasser(&s));
        prop_assert!(back.u.max_abs_diff(&s.u).unwrap() <= 1e-14);
        prop_assert!(back.b.max_abs_diff(&s.b).unwrap() <= 1e-14);
    }

    #[test]
    fn snapshot_roundtrip_is_exact(seed in any::<u64>()) {
        let g = grid(16);
        let s = MhdState {
            u: random::solenoidal(&g, 4, 1.0, seed).unwrap(),
            b: random::solenoidal(&g, 4, 1.0, seed.wrapping_add(3)).unwrap(),
            t: 0.5,
        };
        let mut buf = Vec::new();
        write_snapshot(&mut buf, &s).unwrap();
        let back = read_snapshot(&mut BufReader::new(buf.as_slice())).unwrap();
        prop_assert_eq!(back.t, s.t);
        prop_assert_eq!(back.u.max_abs_diff(&s.u).unwrap(), 0.0);
        prop_assert_eq!(back.b.max_abs_diff(&s.b).unwrap(), 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn lifespan_bound_decreases_in_b0(u in 0.1f64..50.0, b in 1e-6f64..10.0, c in 0.1f64..10.0, f in 1.01f64..10.0) {
        let small = lifespan_bound_new(u, b, c).unwrap().bound;
        let large = lifespan_bound_new(u, b * f, c).unwrap().bound;
        prop_assert!(large < small);
        let small = lifespan_bound_old(u, u, b, c).unwrap().bound;
        let large = lifespan_bound_old(u, u, b * f, c).unwrap().bound;
        prop_assert!(large < small);
    }

    #[test]
    fn lifespan_bound_increases_in_c(u in 0.1f64..50.0, b in 1e-6f64..10.0, c in 0.1f64..10.0) {
        let lo = lifespan_bound_new(u, b, c).unwrap().bound;
        let hi = lifespan_bound_new(u, b, c * 1.5).unwrap().bound;
        prop_assert!(hi > lo);
    }

    #[test]
    fn fitted_constant_is_a_valid_lower_bound(
        pts in prop::collection::vec((0.5f64..20.0, 1e-4f64..1.0, 0.05f64..5.0), 1..8)
    ) {
        let samples: Vec<LifespanSample> =
            pts.iter().map(|&(u0_norm, b0_norm, t_star)| LifespanSample { u0_norm, b0_norm, t_star }).collect();
        let c = fit_lifespan_constant(&samples).unwrap().unwrap();
        let mut tight = false;
        for s in &samples {
            let bound = lifespan_bound_new(s.u0_norm, s.b0_norm, c).unwrap().bound;
            prop_assert!(bound <= s.t_star * (1.0 + 1e-9));
            tight |= bound >= s.t_star * (1.0 - 1e-6);
        }
        prop_assert!(tight);
    }

    #[test]
    fn running_sup_is_monotone(xs in prop::collection::vec(-1e3f64..1e3, 1..64)) {
        let s = running_sup(&xs);
        prop_assert!(s.windows(2).all(|w| w[1] >= w[0]));
        prop_assert!(xs.iter().zip(&s).all(|(x, m)| m >= x));
    }

    #[test]
    fn t_star_grows_with_threshold(a in 0.05f64..1.0, rate in 0.1f64..3.0, e0 in 0.01f64..1.0) {
        let times: Vec<f64> = (0..=2000).map(|i| i as f64 * 2e-3).collect();
        let e: Vec<f64> = times.iter().map(|t| a * (rate * t).exp()).collect();
        let t1 = t_star_empirical(&times, &e, e0).unwrap();
        let t2 = t_star_empirical(&times, &e, 2.0 * e0).unwrap();
        prop_assert!(t2.t_star >= t1.t_star);
        if !t1.censored {
            let exact = (1.0 + 2.0 * rate * e0 / (a * a)).ln() / (2.0 * rate);
            prop_assert!((t1.t_star - exact).abs() <= 1e-3);
        }
    }

    #[test]
    fn config_roundtrips_through_toml(n_pow in 4u32..8, dt_k in 1u32..10, seed in any::<u32>(), eps in 0.0f64..1.0) {
        let dt = dt_k as f64 * 1e-3;
        let cfg = SimConfig {
            n: 1 << n_pow,
            dt,
            t_end: 100.0 * dt,
            cadence: 10.0 * dt,
            snapshot_cadence: 50.0 * dt,
            seed: seed as u64,
            epsilon: Some(eps),
            ..SimConfig::default()
        };
        let back = SimConfig::parse(&cfg.to_toml()).unwrap();
        prop_assert_eq!(back, cfg);
    }
}
