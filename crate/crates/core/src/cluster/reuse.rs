use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use super::ledger::{AddressId, ResolvedTransaction, Timestamped};
use super::ClusterError;

/// Number of addresses used exactly `r` times, for every observed `r >= 1`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReuseHistogram {
    pub bins: BTreeMap<u64, u64>,
    pub total_addresses: u64,
}

impl ReuseHistogram {
    pub fn from_usage_counts<I: IntoIterator<Item = u64>>(counts: I) -> Self {
        let mut h = ReuseHistogram::default();
        for r in counts {
            if r == 0 {
                continue;
            }
            *h.bins.entry(r).or_insert(0) += 1;
            h.total_addresses += 1;
        }
        h
    }

    pub fn from_bins<I: IntoIterator<Item = (u64, u64)>>(bins: I) -> Self {
        let mut h = ReuseHistogram::default();
        for (r, c) in bins {
            if r == 0 || c == 0 {
                continue;
            }
            *h.bins.entry(r).or_insert(0) += c;
            h.total_addresses += c;
        }
        h
    }

    /// Σ r · count(r).
    pub fn total_occurrences(&self) -> u64 {
        self.bins.iter().map(|(r, c)| r * c).sum()
    }

    /// CSV `r,count`, ascending r.
    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["r", "count"])?;
        for (r, c) in &self.bins {
            wtr.write_record([r.to_string(), c.to_string()])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Counts, per address, the transactions it appears in (either side, at most
/// once per transaction) and bins the counts.
pub fn reuse_histogram<'a, I>(transactions: I) -> ReuseHistogram
where
    I: IntoIterator<Item = &'a ResolvedTransaction>,
{
    let mut usage: HashMap<AddressId, u64> = HashMap::new();
    for tx in transactions {
        for a in tx.participants() {
            *usage.entry(a).or_insert(0) += 1;
        }
    }
    ReuseHistogram::from_usage_counts(usage.into_values())
}

/// Sorts by timestamp (stable) and cuts into `parts` contiguous chunks of
/// equal size; when the length is not divisible the first chunks get one
/// extra item.
pub fn time_partition<T: Timestamped>(
    mut items: Vec<T>,
    parts: usize,
) -> Result<Vec<Vec<T>>, ClusterError> {
    if parts == 0 {
        return Err(ClusterError::ZeroParts);
    }
    if parts > items.len() {
        return Err(ClusterError::TooManyParts {
            parts,
            len: items.len(),
        });
    }
    items.sort_by_key(|t| t.timestamp());
    let base = items.len() / parts;
    let extra = items.len() % parts;
    let mut out = Vec::with_capacity(parts);
    let mut rest = items.into_iter();
    for i in 0..parts {
        let size = base + usize::from(i < extra);
        out.push(rest.by_ref().take(size).collect());
    }
    Ok(out)
}
