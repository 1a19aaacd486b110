use std::io::{Read, Write};

use crate::txgraph::NodeMetrics;

use super::RolesError;

/// Fourteen days.
pub const DEFAULT_GRID_STEP_SECS: i64 = 14 * 24 * 3600;

/// Values on a strictly increasing grid of unix timestamps; `None` marks a
/// missing value.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    grid: Vec<i64>,
    values: Vec<Option<f64>>,
}

impl TimeSeries {
    pub fn new(grid: Vec<i64>, values: Vec<Option<f64>>) -> Result<Self, RolesError> {
        if grid.len() != values.len() {
            return Err(RolesError::LengthMismatch {
                grid: grid.len(),
                values: values.len(),
            });
        }
        check_grid(&grid)?;
        Ok(TimeSeries { grid, values })
    }

    pub fn from_values(grid: Vec<i64>, values: Vec<f64>) -> Result<Self, RolesError> {
        Self::new(grid, values.into_iter().map(Some).collect())
    }

    pub fn grid(&self) -> &[i64] {
        &self.grid
    }

    pub fn values(&self) -> &[Option<f64>] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = (i64, Option<f64>)> + '_ {
        self.grid.iter().copied().zip(self.values.iter().copied())
    }

    /// Multiplies every present value by `k`.
    pub fn scaled(&self, k: f64) -> TimeSeries {
        TimeSeries {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v.map(|x| x * k)).collect(),
        }
    }

    /// Value in force at `t`: the one at the last grid point `<= t`.
    pub fn value_at(&self, t: i64) -> Option<f64> {
        let idx = self.grid.partition_point(|&g| g <= t);
        if idx == 0 {
            None
        } else {
            self.values[idx - 1]
        }
    }
}

fn check_grid(grid: &[i64]) -> Result<(), RolesError> {
    match grid.windows(2).position(|w| w[0] >= w[1]) {
        Some(i) => Err(RolesError::UnsortedGrid(i + 1)),
        None => Ok(()),
    }
}

/// `start, start + step, ...` up to and including `end`.
pub fn default_grid(start: i64, end: i64, step: i64) -> Vec<i64> {
    assert!(step > 0, "grid step must be positive");
    let mut grid = Vec::new();
    let mut t = start;
    while t <= end {
        grid.push(t);
        t += step;
    }
    grid
}

/// Count of selected nodes whose lifetime `[first_ts, last_ts]` contains
/// each grid point. Nodes without edges are never active.
pub fn active_population<F>(
    metrics: &[NodeMetrics],
    include: F,
    grid: &[i64],
) -> Result<TimeSeries, RolesError>
where
    F: Fn(usize) -> bool,
{
    check_grid(grid)?;
    let mut starts = Vec::new();
    let mut ends = Vec::new();
    for (i, m) in metrics.iter().enumerate() {
        if let Some((first, last)) = m.lifetime() {
            if include(i) {
                starts.push(first);
                ends.push(last);
            }
        }
    }
    starts.sort_unstable();
    ends.sort_unstable();
    let values = grid
        .iter()
        .map(|&t| {
            let started = starts.partition_point(|&s| s <= t);
            let ended = ends.partition_point(|&e| e < t);
            Some((started - ended) as f64)
        })
        .collect();
    Ok(TimeSeries {
        grid: grid.to_vec(),
        values,
    })
}

/// Elementwise customers / sellers; points with zero (or missing) sellers
/// are missing.
pub fn customer_seller_ratio(
    customers: &TimeSeries,
    sellers: &TimeSeries,
) -> Result<TimeSeries, RolesError> {
    if customers.grid != sellers.grid {
        return Err(RolesError::GridMismatch);
    }
    let values = customers
        .values
        .iter()
        .zip(&sellers.values)
        .map(|(c, s)| match (c, s) {
            (Some(c), Some(s)) if *s != 0.0 => Some(c / s),
            _ => None,
        })
        .collect();
    Ok(TimeSeries {
        grid: customers.grid.clone(),
        values,
    })
}

/// The four role populations and the customer/seller ratio on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationSeries {
    pub miners: TimeSeries,
    pub collectors: TimeSeries,
    pub customers: TimeSeries,
    pub sellers: TimeSeries,
    pub ratio: TimeSeries,
}

pub const POPULATION_HEADER: [&str; 6] =
    ["timestamp", "miners", "collectors", "customers", "sellers", "ratio"];

impl PopulationSeries {
    /// CSV `timestamp,miners,collectors,customers,sellers,ratio`; a missing
    /// ratio is an empty field.
    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(POPULATION_HEADER)?;
        let fmt = |v: Option<f64>| v.map(|x| format!("{x}")).unwrap_or_default();
        for i in 0..self.ratio.len() {
            wtr.write_record([
                self.ratio.grid[i].to_string(),
                fmt(self.miners.values[i]),
                fmt(self.collectors.values[i]),
                fmt(self.customers.values[i]),
                fmt(self.sellers.values[i]),
                fmt(self.ratio.values[i]),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self, RolesError> {
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(r);
        let mut grid = Vec::new();
        let mut cols: [Vec<Option<f64>>; 5] = Default::default();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| RolesError::BadRow {
                line: e.position().map_or(0, |p| p.line()),
                message: e.to_string(),
            })?;
            let line = rec.position().map_or(0, |p| p.line());
            let bad = |message: String| RolesError::BadRow { line, message };
            if rec.len() != 6 {
                return Err(bad("expected 6 fields".into()));
            }
            grid.push(rec[0].parse().map_err(|_| bad(format!("bad timestamp {:?}", &rec[0])))?);
            for (c, col) in cols.iter_mut().enumerate() {
                let field = rec[c + 1].trim();
                col.push(if field.is_empty() {
                    None
                } else {
                    Some(field.parse().map_err(|_| bad(format!("bad number {field:?}")))?)
                });
            }
        }
        let [m, co, cu, s, r] = cols;
        Ok(PopulationSeries {
            miners: TimeSeries::new(grid.clone(), m)?,
            collectors: TimeSeries::new(grid.clone(), co)?,
            customers: TimeSeries::new(grid.clone(), cu)?,
            sellers: TimeSeries::new(grid.clone(), s)?,
            ratio: TimeSeries::new(grid, r)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn life(first: i64, last: i64) -> NodeMetrics {
        NodeMetrics {
            in_degree: 1,
            first_ts: first,
            last_ts: last,
            ..Default::default()
        }
    }

    fn counts(ts: &TimeSeries) -> Vec<f64> {
        ts.values().iter().map(|v| v.unwrap()).collect()
    }

    #[test]
    fn single_lifetime() {
        let ts = active_population(&[life(10, 20)], |_| true, &[5, 15, 25]).unwrap();
        assert_eq!(counts(&ts), vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn point_lifetime_is_inclusive() {
        let ts = active_population(&[life(15, 15)], |_| true, &[14, 15, 16]).unwrap();
        assert_eq!(counts(&ts), vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn filter_and_isolated_nodes() {
        let metrics = [life(0, 100), life(0, 100), NodeMetrics::default()];
        let ts = active_population(&metrics, |i| i != 1, &[0, 50]).unwrap();
        assert_eq!(counts(&ts), vec![1.0, 1.0]);
    }

    #[test]
    fn unsorted_grid_rejected() {
        assert_eq!(
            active_population(&[], |_| true, &[5, 5]),
            Err(RolesError::UnsortedGrid(1))
        );
    }

    #[test]
    fn ratio_basic_and_missing() {
        let c = TimeSeries::from_values(vec![1, 2], vec![10.0, 4.0]).unwrap();
        let s = TimeSeries::from_values(vec![1, 2], vec![5.0, 0.0]).unwrap();
        let r = customer_seller_ratio(&c, &s).unwrap();
        assert_eq!(r.values(), &[Some(2.0), None]);
        let other = TimeSeries::from_values(vec![1, 3], vec![1.0, 1.0]).unwrap();
        assert_eq!(
            customer_seller_ratio(&c, &other),
            Err(RolesError::GridMismatch)
        );
    }

    #[test]
    fn grid_includes_end() {
        assert_eq!(default_grid(0, 10, 5), vec![0, 5, 10]);
        assert_eq!(default_grid(0, 9, 5), vec![0, 5]);
    }

    #[test]
    fn value_at_carries_forward() {
        let ts = TimeSeries::from_values(vec![10, 20], vec![1.0, 2.0]).unwrap();
        assert_eq!(ts.value_at(5), None);
        assert_eq!(ts.value_at(10), Some(1.0));
        assert_eq!(ts.value_at(19), Some(1.0));
        assert_eq!(ts.value_at(100), Some(2.0));
    }

    #[test]
    fn population_csv_round_trip() {
        let g = vec![0, 10];
        let mk = |a: f64, b: f64| TimeSeries::from_values(g.clone(), vec![a, b]).unwrap();
        let p = PopulationSeries {
            miners: mk(1.0, 2.0),
            collectors: mk(0.0, 3.0),
            customers: mk(4.0, 5.0),
            sellers: mk(2.0, 0.0),
            ratio: TimeSeries::new(g.clone(), vec![Some(2.0), None]).unwrap(),
        };
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(
            text,
            "timestamp,miners,collectors,customers,sellers,ratio\n0,1,0,4,2,2\n10,2,3,5,0,\n"
        );
        assert_eq!(PopulationSeries::read_csv(buf.as_slice()).unwrap(), p);
    }
}
