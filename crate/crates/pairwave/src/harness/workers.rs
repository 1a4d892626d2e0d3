//! Order-preserving work distribution over scoped threads.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;

/// Runs `job(0..n_items)` on up to `workers` threads and returns the
/// results in item order.
///
/// Items are claimed from a shared counter, so scheduling is dynamic,
/// but results are slotted back by index — the output is identical for
/// any worker count, which is what makes multi-worker scans
/// byte-reproducible. A panicking job propagates when the scope joins.
pub fn run_indexed<T, F>(n_items: usize, workers: usize, job: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    if n_items == 0 {
        return Vec::new();
    }
    let workers = workers.max(1).min(n_items);
    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel::<(usize, T)>();
    std::thread::scope(|scope| {
        for _ in 0..workers {
            let tx = tx.clone();
            let next = &next;
            let job = &job;
            scope.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n_items {
                    break;
                }
                let out = job(i);
                if tx.send((i, out)).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        let mut slots: Vec<Option<T>> = (0..n_items).map(|_| None).collect();
        for (i, out) in rx {
            slots[i] = Some(out);
        }
        slots
            .into_iter()
            .map(|s| s.expect("each index is claimed and answered exactly once"))
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn results_come_back_in_index_order() {
        let out = run_indexed(17, 4, |i| {
            // stagger completion so fast items finish before slow ones
            std::thread::sleep(std::time::Duration::from_micros(((17 - i) * 50) as u64));
            i * i
        });
        assert_eq!(out, (0..17).map(|i| i * i).collect::<Vec<_>>());
    }

    #[test]
    fn worker_count_does_not_change_the_answer() {
        let f = |i: usize| (i as f64).sqrt().sin();
        let one: Vec<f64> = run_indexed(9, 1, f);
        let eight: Vec<f64> = run_indexed(9, 8, f);
        assert_eq!(one, eight);
    }

    #[test]
    fn empty_and_oversubscribed_inputs_work() {
        let none: Vec<usize> = run_indexed(0, 4, |i| i);
        assert!(none.is_empty());
        let some: Vec<usize> = run_indexed(2, 64, |i| i + 1);
        assert_eq!(some, vec![1, 2]);
    }
}
