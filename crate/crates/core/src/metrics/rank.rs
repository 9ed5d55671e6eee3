use std::cmp::Ordering;

use crate::ingest::{JournalRecord, Package};

/// True when the exported ranks form a permutation of `1..=n`.
pub fn ranks_are_complete(pkg: &Package) -> bool {
    let n = pkg.len();
    let mut seen = vec![false; n];
    for r in pkg.records() {
        match r.cpu_rank {
            Some(rank) if (1..=n as u32).contains(&rank) && !seen[rank as usize - 1] => {
                seen[rank as usize - 1] = true;
            }
            _ => return false,
        }
    }
    true
}

/// Ranks records by ascending cost-per-use (1 = most economical). Missing
/// cost-per-use sorts last; ties break on title, then key.
pub fn rank_by_cpu(records: &[JournalRecord], cpus: &[Option<f64>]) -> Vec<u32> {
    debug_assert_eq!(records.len(), cpus.len());
    let mut order: Vec<usize> = (0..records.len()).collect();
    order.sort_by(|&a, &b| {
        cmp_cpu(cpus[a], cpus[b])
            .then_with(|| records[a].title.cmp(&records[b].title))
            .then_with(|| records[a].key.cmp(&records[b].key))
    });
    let mut ranks = vec![0; records.len()];
    for (position, &index) in order.iter().enumerate() {
        ranks[index] = position as u32 + 1;
    }
    ranks
}

fn cmp_cpu(a: Option<f64>, b: Option<f64>) -> Ordering {
    match (a, b) {
        (Some(x), Some(y)) => x.total_cmp(&y),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => Ordering::Equal,
    }
}

/// `(key, rank)` for every record. Exported ranks are kept when they form a
/// complete permutation; otherwise ranks are derived from cost-per-use
/// (exported, or price / usage when the cell is blank).
pub fn compute_cpu_ranks(pkg: &Package) -> Vec<(String, u32)> {
    let records = pkg.records();
    let ranks: Vec<u32> = if ranks_are_complete(pkg) {
        records.iter().map(|r| r.cpu_rank.expect("complete")).collect()
    } else {
        let cpus: Vec<Option<f64>> = records
            .iter()
            .map(|r| r.cpu.or_else(|| (r.usage > 0.0).then(|| r.price / r.usage)))
            .collect();
        rank_by_cpu(records, &cpus)
    };
    records.iter().map(|r| r.key.clone()).zip(ranks).collect()
}
