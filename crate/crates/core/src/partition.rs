//! Index-range partitioning of enumerations across workers.

use crate::error::{Error, Result};

/// Worker `index` out of `count` workers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Partition {
    pub index: usize,
    pub count: usize,
}

impl Partition {
    pub const WHOLE: Partition = Partition { index: 0, count: 1 };

    pub fn new(index: usize, count: usize) -> Result<Self> {
        if count == 0 || index >= count {
            return Err(Error::InvalidInput(format!(
                "worker index {index} out of range for {count} workers"
            )));
        }
        Ok(Self { index, count })
    }

    /// Half-open slice of `0..total` owned by this worker. Consecutive
    /// workers own consecutive slices.
    pub fn range(&self, total: u64) -> (u64, u64) {
        let bound = |i: usize| ((total as u128 * i as u128) / self.count as u128) as u64;
        (bound(self.index), bound(self.index + 1))
    }

    pub fn all(count: usize) -> impl Iterator<Item = Partition> {
        (0..count).map(move |index| Partition { index, count })
    }
}

/// Runs `work` once per partition on scoped threads and returns the results
/// in partition order.
pub fn fan_out<T, F>(workers: usize, work: F) -> Vec<T>
where
    T: Send,
    F: Fn(Partition) -> T + Sync,
{
    let workers = workers.max(1);
    if workers == 1 {
        return vec![work(Partition::WHOLE)];
    }
    std::thread::scope(|scope| {
        let handles: Vec<_> = Partition::all(workers)
            .map(|p| {
                let work = &work;
                scope.spawn(move || work(p))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_tile_the_index_space() {
        for total in [0u64, 1, 5, 17, 4096] {
            for count in 1..9 {
                let mut next = 0;
                for p in Partition::all(count) {
                    let (lo, hi) = p.range(total);
                    assert_eq!(lo, next);
                    assert!(hi >= lo);
                    next = hi;
                }
                assert_eq!(next, total);
            }
        }
    }

    #[test]
    fn rejects_bad_index() {
        assert!(Partition::new(3, 3).is_err());
        assert!(Partition::new(0, 0).is_err());
    }

    #[test]
    fn fan_out_preserves_order() {
        let out = fan_out(5, |p| p.index * 10);
        assert_eq!(out, vec![0, 10, 20, 30, 40]);
    }
}
