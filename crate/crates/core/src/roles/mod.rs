//! Economic role labels, lifetimes and active-population time series.

mod series;

use std::collections::BTreeMap;
use std::io::{Read, Write};

use crate::nullmodel::SignificanceThresholds;
use crate::txgraph::NodeMetrics;

pub use series::{
    active_population, customer_seller_ratio, default_grid, PopulationSeries, TimeSeries,
    DEFAULT_GRID_STEP_SECS,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RolesError {
    #[error("time grid is not strictly increasing at index {0}")]
    UnsortedGrid(usize),
    #[error("grid and values differ in length ({grid} vs {values})")]
    LengthMismatch { grid: usize, values: usize },
    #[error("series are on different grids")]
    GridMismatch,
    #[error("role table line {line}: {message}")]
    BadRow { line: u64, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    Miner,
    Collector,
    Customer,
    Seller,
}

impl Role {
    pub const ALL: [Role; 4] = [Role::Miner, Role::Collector, Role::Customer, Role::Seller];

    pub fn name(self) -> &'static str {
        match self {
            Role::Miner => "miner",
            Role::Collector => "collector",
            Role::Customer => "customer",
            Role::Seller => "seller",
        }
    }

    /// The strict inequality defining the role.
    pub fn holds(self, m: &NodeMetrics, t: &SignificanceThresholds) -> bool {
        match self {
            Role::Miner => m.out_minus_in_value() > t.out_minus_in_value,
            Role::Collector => m.in_minus_out_value() > t.in_minus_out_value,
            Role::Customer => m.out_minus_in_degree() > t.out_minus_in_degree,
            Role::Seller => m.in_minus_out_degree() > t.in_minus_out_degree,
        }
    }
}

/// Independent role flags; a node may hold several.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct RoleLabel {
    pub is_miner: bool,
    pub is_collector: bool,
    pub is_customer: bool,
    pub is_seller: bool,
}

impl RoleLabel {
    pub fn has(&self, role: Role) -> bool {
        match role {
            Role::Miner => self.is_miner,
            Role::Collector => self.is_collector,
            Role::Customer => self.is_customer,
            Role::Seller => self.is_seller,
        }
    }

    pub fn set(&mut self, role: Role, on: bool) {
        match role {
            Role::Miner => self.is_miner = on,
            Role::Collector => self.is_collector = on,
            Role::Customer => self.is_customer = on,
            Role::Seller => self.is_seller = on,
        }
    }

    pub fn roles(&self) -> impl Iterator<Item = Role> + '_ {
        Role::ALL.into_iter().filter(|&r| self.has(r))
    }

    pub fn is_empty(&self) -> bool {
        self.roles().next().is_none()
    }
}

pub fn classify(metrics: &NodeMetrics, thresholds: &SignificanceThresholds) -> RoleLabel {
    let mut label = RoleLabel::default();
    for role in Role::ALL {
        label.set(role, role.holds(metrics, thresholds));
    }
    label
}

pub fn classify_all(metrics: &[NodeMetrics], thresholds: &SignificanceThresholds) -> Vec<RoleLabel> {
    metrics.iter().map(|m| classify(m, thresholds)).collect()
}

/// Counts per role combination (e.g. `collector+seller`), plus the number
/// of labeled nodes whose lifetime reaches the end of the observed span and
/// may therefore be right-censored.
pub fn role_summary(
    metrics: &[NodeMetrics],
    labels: &[RoleLabel],
) -> BTreeMap<String, u64> {
    let span_end = metrics.iter().filter_map(|m| m.lifetime()).map(|l| l.1).max();
    let mut out = BTreeMap::new();
    for role in Role::ALL {
        out.insert(role.name().to_string(), 0);
        out.insert(format!("right_censored_{}", role.name()), 0);
    }
    for (m, label) in metrics.iter().zip(labels) {
        if label.is_empty() {
            continue;
        }
        let combo: Vec<_> = label.roles().map(Role::name).collect();
        for role in label.roles() {
            *out.get_mut(role.name()).unwrap() += 1;
            if m.lifetime().map(|l| l.1) == span_end {
                *out.get_mut(&format!("right_censored_{}", role.name())).unwrap() += 1;
            }
        }
        if combo.len() > 1 {
            *out.entry(combo.join("+")).or_insert(0) += 1;
        }
    }
    out
}

pub const ROLE_TABLE_HEADER: [&str; 11] = [
    "user_id",
    "miner",
    "collector",
    "customer",
    "seller",
    "in_degree",
    "out_degree",
    "in_value_satoshi",
    "out_value_satoshi",
    "first_ts",
    "last_ts",
];

/// One row of the role labels report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoleRow {
    pub user_id: u64,
    pub label: RoleLabel,
    pub metrics: NodeMetrics,
}

pub fn write_role_table<W: Write>(rows: &[RoleRow], w: W) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(ROLE_TABLE_HEADER)?;
    let flag = |b: bool| if b { "1" } else { "0" }.to_string();
    for r in rows {
        let m = &r.metrics;
        wtr.write_record([
            r.user_id.to_string(),
            flag(r.label.is_miner),
            flag(r.label.is_collector),
            flag(r.label.is_customer),
            flag(r.label.is_seller),
            m.in_degree.to_string(),
            m.out_degree.to_string(),
            m.in_value.to_string(),
            m.out_value.to_string(),
            m.first_ts.to_string(),
            m.last_ts.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_role_table<R: Read>(r: R) -> Result<Vec<RoleRow>, RolesError> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(r);
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| RolesError::BadRow {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let bad = |message: String| RolesError::BadRow { line, message };
        if rec.len() != ROLE_TABLE_HEADER.len() {
            return Err(bad(format!("expected {} fields", ROLE_TABLE_HEADER.len())));
        }
        let int = |i: usize| -> Result<i64, RolesError> {
            rec[i]
                .parse::<i64>()
                .map_err(|_| bad(format!("{} {:?} is not an integer", ROLE_TABLE_HEADER[i], &rec[i])))
        };
        let uint = |i: usize| -> Result<u64, RolesError> {
            rec[i]
                .parse::<u64>()
                .map_err(|_| bad(format!("{} {:?} is not an integer", ROLE_TABLE_HEADER[i], &rec[i])))
        };
        rows.push(RoleRow {
            user_id: uint(0)?,
            label: RoleLabel {
                is_miner: uint(1)? != 0,
                is_collector: uint(2)? != 0,
                is_customer: uint(3)? != 0,
                is_seller: uint(4)? != 0,
            },
            metrics: NodeMetrics {
                in_degree: uint(5)?,
                out_degree: uint(6)?,
                in_value: uint(7)?,
                out_value: uint(8)?,
                first_ts: int(9)?,
                last_ts: int(10)?,
            },
        });
    }
    Ok(rows)
}
