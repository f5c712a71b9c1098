//! Shared index tables for dense multivariate jets.
//!
//! Coefficients of a jet are stored in a flat vector ranked by graded
//! lexicographic order: multi-indices are grouped by total degree, and within
//! a degree block they are enumerated lexicographically. The table for order
//! `k - 1` is therefore a prefix of the table for order `k`, which is what
//! makes truncation exact.

use once_cell::sync::Lazy;
use std::collections::HashMap;
use std::sync::{Arc, RwLock};

pub(crate) struct IndexTable {
    pub num_vars: usize,
    pub order: usize,
    /// rank -> exponent tuple
    pub exponents: Vec<Vec<u8>>,
    /// rank -> total degree
    pub degrees: Vec<u8>,
    /// prefix length of each degree block: `cumulative[d]` = #ranks of degree <= d
    pub cumulative: Vec<usize>,
    rank_of: HashMap<Vec<u8>, u32>,
    /// (i, j, rank(alpha_i + alpha_j)) for all pairs with degree sum <= order,
    /// in (i, j) lexicographic order. Multiplication walks this list, so the
    /// accumulation order into any low-degree coefficient is independent of
    /// the truncation order.
    pub products: Vec<(u32, u32, u32)>,
}

impl IndexTable {
    fn new(num_vars: usize, order: usize) -> Self {
        assert!(num_vars >= 1, "jets need at least one variable");
        let mut exponents = Vec::new();
        let mut scratch = vec![0u8; num_vars];
        let mut cumulative = Vec::with_capacity(order + 1);
        for degree in 0..=order {
            push_compositions(degree as u8, 0, &mut scratch, &mut exponents);
            cumulative.push(exponents.len());
        }
        assert!(
            exponents.len() <= 1_000_000,
            "jet coefficient table too large ({} vars, order {})",
            num_vars,
            order
        );
        let degrees: Vec<u8> = exponents
            .iter()
            .map(|e| e.iter().map(|&x| x as u32).sum::<u32>() as u8)
            .collect();
        let rank_of: HashMap<Vec<u8>, u32> = exponents
            .iter()
            .enumerate()
            .map(|(r, e)| (e.clone(), r as u32))
            .collect();

        let count = exponents.len();
        let mut products = Vec::new();
        let mut sum = vec![0u8; num_vars];
        for i in 0..count {
            for j in 0..count {
                if (degrees[i] + degrees[j]) as usize > order {
                    continue;
                }
                for v in 0..num_vars {
                    sum[v] = exponents[i][v] + exponents[j][v];
                }
                let target = rank_of[&sum];
                products.push((i as u32, j as u32, target));
            }
        }

        IndexTable {
            num_vars,
            order,
            exponents,
            degrees,
            cumulative,
            rank_of,
            products,
        }
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn rank(&self, alpha: &[u8]) -> Option<u32> {
        self.rank_of.get(alpha).copied()
    }
}

/// Enumerate all exponent tuples of the given total degree, lexicographically
/// (first variable's exponent descending).
fn push_compositions(remaining: u8, var: usize, scratch: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
    if var + 1 == scratch.len() {
        scratch[var] = remaining;
        out.push(scratch.clone());
        return;
    }
    for e in (0..=remaining).rev() {
        scratch[var] = e;
        push_compositions(remaining - e, var + 1, scratch, out);
    }
}

type TableCache = RwLock<HashMap<(usize, usize), Arc<IndexTable>>>;

static TABLES: Lazy<TableCache> = Lazy::new(Default::default);

pub(crate) fn shared_table(num_vars: usize, order: usize) -> Arc<IndexTable> {
    if let Some(t) = TABLES.read().unwrap().get(&(num_vars, order)) {
        return Arc::clone(t);
    }
    let table = Arc::new(IndexTable::new(num_vars, order));
    let mut guard = TABLES.write().unwrap();
    Arc::clone(guard.entry((num_vars, order)).or_insert(table))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binomial(n: usize, k: usize) -> usize {
        let mut acc = 1usize;
        for i in 0..k {
            acc = acc * (n - i) / (i + 1);
        }
        acc
    }

    #[test]
    fn table_sizes_match_binomials() {
        for vars in 1..=6 {
            for order in 0..=5 {
                let t = shared_table(vars, order);
                assert_eq!(t.len(), binomial(vars + order, order));
            }
        }
    }

    #[test]
    fn lower_order_table_is_a_prefix() {
        let big = shared_table(3, 4);
        let small = shared_table(3, 3);
        assert_eq!(&big.exponents[..small.len()], &small.exponents[..]);
    }

    #[test]
    fn rank_round_trips() {
        let t = shared_table(4, 5);
        for (r, e) in t.exponents.iter().enumerate() {
            assert_eq!(t.rank(e), Some(r as u32));
        }
        assert_eq!(t.rank(&[6, 0, 0, 0]), None);
    }
}
