//! Property tests for the structural invariants: exact coupling, scheme
//! positivity, rate-fit recovery, and CSV round-trips.

use cirheston::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coarsening_is_bitwise_exact(
        master_seed in any::<u64>(),
        path_index in 0u64..1000,
        exp in 1u32..10,
    ) {
        let seed = SeedSpec { master_seed, path_index };
        let fine = gaussian_increments(&seed, 1 << exp, 1.0).unwrap();
        let coarse = fine.coarsen().unwrap();
        for k in 0..coarse.level {
            prop_assert_eq!(
                coarse.dw[k].to_bits(),
                (fine.dw[2 * k] + fine.dw[2 * k + 1]).to_bits()
            );
            prop_assert_eq!(
                coarse.db[k].to_bits(),
                (fine.db[2 * k] + fine.db[2 * k + 1]).to_bits()
            );
        }
    }

    #[test]
    fn vhat_stays_nonnegative_for_every_scheme(
        master_seed in any::<u64>(),
        model_id in 1u32..=5,
        exp in 1u32..8,
    ) {
        let p = builtin_model(model_id).unwrap();
        let seed = SeedSpec { master_seed, path_index: 0 };
        let grid = gaussian_increments(&seed, 1 << exp, p.horizon).unwrap();
        for scheme in SchemeSpec::all_named() {
            let path = cir_path(&scheme, &p, &grid);
            prop_assert!(path.v_hat.iter().all(|&v| v >= 0.0));
        }
    }

    #[test]
    fn fit_recovers_random_power_laws(
        slope in 0.05f64..1.5,
        log_c in -8.0f64..8.0,
    ) {
        let c = log_c.exp2();
        let table: Vec<ErrorRecord> = (1..=15)
            .map(|k| {
                let n = 1usize << k;
                let err = c * (n as f64).powf(-slope);
                ErrorRecord {
                    scheme: "x".into(),
                    model: "x".into(),
                    n,
                    m: 2,
                    err_v: err,
                    se_v: 0.0,
                    err_x: err,
                    se_x: 0.0,
                    seed: 0,
                }
            })
            .collect();
        let fit = fit_rate(&table, FitTarget::Cir, 2, 1 << 15).unwrap();
        prop_assert!((fit.slope - slope).abs() < 1e-9);
        prop_assert!((fit.intercept - log_c).abs() < 1e-8);
        prop_assert!(fit.residual_norm < 1e-9);
    }

    #[test]
    fn error_csv_round_trips(
        n_exp in 1u32..15,
        m in 2usize..1_000_000,
        err_v in 0.0f64..10.0,
        se_v in 0.0f64..1.0,
        err_x in 0.0f64..10.0,
        se_x in 0.0f64..1.0,
        seed in any::<u64>(),
    ) {
        let records = vec![ErrorRecord {
            scheme: "FTE".into(),
            model: "2".into(),
            n: 1 << n_exp,
            m,
            err_v,
            se_v,
            err_x,
            se_x,
            seed,
        }];
        let mut buf = Vec::new();
        cirheston::report::write_error_records(&mut buf, &records).unwrap();
        let back = cirheston::report::read_error_records(buf.as_slice()).unwrap();
        prop_assert_eq!(back, records);
    }

    #[test]
    fn correlated_increment_is_a_contraction(
        dw in -5.0f64..5.0,
        db in -5.0f64..5.0,
        rho in -1.0f64..=1.0,
    ) {
        let u = correlated_increment(dw, db, rho);
        // |rho| + sqrt(1-rho^2) <= sqrt(2)
        prop_assert!(u.abs() <= 2f64.sqrt() * dw.abs().max(db.abs()) + 1e-12);
    }
}
