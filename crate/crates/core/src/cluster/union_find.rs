use std::io::{Read, Write};

use super::ledger::{AddressBook, AddressId, Ledger};
use crate::blockparse::Address;

/// Disjoint-set forest over address ids with union by rank and full path
/// compression.
#[derive(Debug, Clone)]
pub struct AddressClustering {
    parent: Vec<AddressId>,
    rank: Vec<u8>,
    user_count: usize,
}

impl AddressClustering {
    pub fn new(address_count: usize) -> Self {
        AddressClustering {
            parent: (0..address_count as AddressId).collect(),
            rank: vec![0; address_count],
            user_count: address_count,
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    /// Number of distinct roots.
    pub fn user_count(&self) -> usize {
        self.user_count
    }

    pub fn find(&mut self, a: AddressId) -> AddressId {
        let mut root = a;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        let mut cur = a;
        while self.parent[cur as usize] != root {
            let next = self.parent[cur as usize];
            self.parent[cur as usize] = root;
            cur = next;
        }
        root
    }

    /// Merges the sets holding `a` and `b`. Returns false if already joined.
    pub fn union(&mut self, a: AddressId, b: AddressId) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (hi, lo) = match self.rank[ra as usize].cmp(&self.rank[rb as usize]) {
            std::cmp::Ordering::Less => (rb, ra),
            std::cmp::Ordering::Greater => (ra, rb),
            std::cmp::Ordering::Equal => {
                self.rank[ra as usize] += 1;
                (ra, rb)
            }
        };
        self.parent[lo as usize] = hi;
        self.user_count -= 1;
        true
    }

    /// Joins every address of each set (common-input ownership).
    pub fn merge_sets<I, S>(&mut self, sets: I)
    where
        I: IntoIterator<Item = S>,
        S: IntoIterator<Item = AddressId>,
    {
        for set in sets {
            let mut it = set.into_iter();
            if let Some(first) = it.next() {
                for other in it {
                    self.union(first, other);
                }
            }
        }
    }

    /// Assigns dense user ids: clusters are numbered in ascending order of
    /// their smallest address id.
    pub fn finalize(mut self) -> UserMap {
        let n = self.parent.len();
        let mut user_of_root = vec![u32::MAX; n];
        let mut user_of = Vec::with_capacity(n);
        let mut next = 0u32;
        for a in 0..n as AddressId {
            let root = self.find(a) as usize;
            if user_of_root[root] == u32::MAX {
                user_of_root[root] = next;
                next += 1;
            }
            user_of.push(user_of_root[root]);
        }
        UserMap {
            user_of,
            user_count: next as usize,
        }
    }
}

/// Clusters the resolved input addresses of every transaction. Coinbase
/// transactions and unresolved inputs contribute nothing.
pub fn cluster_transactions(ledger: &Ledger) -> AddressClustering {
    let mut uf = AddressClustering::new(ledger.book.len());
    uf.merge_sets(ledger.transactions.iter().map(|tx| tx.input_addresses()));
    uf
}

/// Frozen address → user assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserMap {
    user_of: Vec<u32>,
    user_count: usize,
}

impl UserMap {
    pub fn user(&self, address: AddressId) -> u32 {
        self.user_of[address as usize]
    }

    pub fn user_count(&self) -> usize {
        self.user_count
    }

    pub fn address_count(&self) -> usize {
        self.user_of.len()
    }

    /// Address sets per user, each ascending; users ascending.
    pub fn clusters(&self) -> Vec<Vec<AddressId>> {
        let mut out = vec![Vec::new(); self.user_count];
        for (a, &u) in self.user_of.iter().enumerate() {
            out[u as usize].push(a as AddressId);
        }
        out
    }

    /// CSV `address,user_id`, one row per address in id order.
    pub fn write_csv<W: Write>(&self, book: &AddressBook, w: W) -> csv::Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["address", "user_id"])?;
        for (id, addr) in book.iter() {
            wtr.write_record([addr.encoded(), self.user(id).to_string()])?;
        }
        wtr.flush()?;
        Ok(())
    }

    /// Reads an `address,user_id` export back against `book`. Every book
    /// address must appear exactly once and user ids must be dense.
    pub fn read_csv<R: Read>(book: &AddressBook, r: R) -> Result<UserMap, String> {
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(r);
        let mut user_of = vec![u32::MAX; book.len()];
        for rec in rdr.records() {
            let rec = rec.map_err(|e| e.to_string())?;
            let line = rec.position().map_or(0, |p| p.line());
            if rec.len() != 2 {
                return Err(format!("line {line}: expected 2 fields"));
            }
            let addr: Address = rec[0]
                .parse()
                .map_err(|e| format!("line {line}: {e}"))?;
            let id = book
                .get(&addr)
                .ok_or_else(|| format!("line {line}: address {addr} is not in the ledger"))?;
            let user: u32 = rec[1]
                .parse()
                .map_err(|_| format!("line {line}: bad user id {:?}", &rec[1]))?;
            if user == u32::MAX {
                return Err(format!("line {line}: user id out of range"));
            }
            if user_of[id as usize] != u32::MAX {
                return Err(format!("line {line}: address {addr} listed twice"));
            }
            user_of[id as usize] = user;
        }
        if let Some(a) = user_of.iter().position(|&u| u == u32::MAX) {
            return Err(format!("address {} has no user", book.address(a as AddressId)));
        }
        let user_count = user_of.iter().map(|&u| u as usize + 1).max().unwrap_or(0);
        let mut seen = vec![false; user_count];
        for &u in &user_of {
            seen[u as usize] = true;
        }
        if seen.contains(&false) {
            return Err("user ids are not dense".into());
        }
        Ok(UserMap { user_of, user_count })
    }
}
