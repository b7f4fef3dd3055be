use predprey_cli::csvio::*;
use predprey_core::ScanLabel;
use proptest::prelude::*;

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        -1e3f64..1e3,
        (any::<f64>()).prop_filter("finite", |v| v.is_finite()),
        Just(0.0),
        Just(-0.0),
        Just(f64::MIN_POSITIVE),
    ]
}

fn maybe_nan() -> impl Strategy<Value = f64> {
    prop_oneof![3 => finite(), 1 => Just(f64::NAN)]
}

fn scan_row() -> impl Strategy<Value = ScanRow> {
    (
        (finite(), finite(), any::<bool>(), maybe_nan()),
        prop::sample::select(ScanLabel::ALL.to_vec()),
        (maybe_nan(), maybe_nan(), maybe_nan(), maybe_nan()),
    )
        .prop_map(|((p1, p2, coexists, j11), label, (lin_lo, lin_hi, cross_lo, cross_hi))| ScanRow {
            p1,
            p2,
            coexists,
            j11,
            label,
            lin_lo,
            lin_hi,
            cross_lo,
            cross_hi,
        })
}

fn positive() -> impl Strategy<Value = f64> {
    1e-300f64..1e300
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn scan_reports(rows in prop::collection::vec(scan_row(), 0..40)) {
        let mut buf = Vec::new();
        write_scan(&mut buf, &rows).unwrap();
        prop_assert_eq!(read_scan(buf.as_slice()).unwrap(), rows);
    }

    #[test]
    fn convergence_reports(raw in prop::collection::vec((positive(), positive(), positive(), positive()), 0..8)) {
        let rows: Vec<ConvergenceRow> = raw
            .into_iter()
            .map(|(epsilon, residual_l2sq, residual_l1, dist_l2)| ConvergenceRow { epsilon, residual_l2sq, residual_l1, dist_l2 })
            .collect();
        let mut buf = Vec::new();
        write_convergence(&mut buf, &rows).unwrap();
        prop_assert_eq!(read_convergence(buf.as_slice()).unwrap(), rows);
    }

    #[test]
    fn series_and_equilibria(vals in prop::collection::vec(finite(), 9), field in "[A-Za-z_]{1,6}") {
        let series = vec![SeriesRow { t: vals[0], field: field.clone(), l1: vals[1], l2: vals[2], linf: vals[3] }];
        let mut buf = Vec::new();
        write_series(&mut buf, &series).unwrap();
        prop_assert_eq!(read_series(buf.as_slice()).unwrap(), series);

        let eq = vec![EquilibriumRow {
            kind: "E*".into(),
            n: vals[0], p: vals[1], j11: vals[2], j12: vals[3], j21: vals[4], j22: vals[5],
            trace: vals[6], det: vals[7],
            classification: field,
        }];
        let mut buf = Vec::new();
        write_equilibria(&mut buf, &eq).unwrap();
        prop_assert_eq!(read_equilibria(buf.as_slice()).unwrap(), eq);

        let slopes = vec![SlopeRow { metric: "dist_l2".into(), slope: vals[8], half_width: vals[0].abs() }];
        let mut buf = Vec::new();
        write_slopes(&mut buf, &slopes).unwrap();
        prop_assert_eq!(read_slopes(buf.as_slice()).unwrap(), slopes);
    }
}
