mod common;

use chainflow::pipeline::{read_external_series, ExternalSeries, SeriesKind};
use common::rng;
use rand::Rng;

#[test]
fn thousand_rows_round_trip() {
    let mut r = rng(12);
    let mut t = 1_230_768_000i64;
    let points: Vec<(i64, f64)> = (0..1000)
        .map(|i| {
            // Mostly daily points with some intraday timestamps.
            t += if i % 7 == 3 { 3_600 * r.random_range(1..20) } else { 86_400 };
            (t, (r.random_range(0.0..1e6f64) * 1e4).round() / 1e4)
        })
        .collect();
    for kind in [SeriesKind::PriceUsd, SeriesKind::Difficulty] {
        let s = ExternalSeries {
            kind,
            points: points.clone(),
        };
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let back = read_external_series(buf.as_slice(), kind).unwrap();
        assert!(back.warnings.is_empty());
        assert_eq!(back.series, s);
    }
}
