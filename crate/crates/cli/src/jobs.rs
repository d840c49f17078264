//! Tiny worker pool: runs independent jobs across up to `workers` threads.
//! Jobs write to disjoint directories, so outputs are identical regardless
//! of scheduling.

use std::sync::atomic::{AtomicUsize, Ordering};

use crate::CliError;

pub fn parallel_foreach<J, F>(jobs: &[J], workers: usize, f: F) -> Result<(), CliError>
where
    J: Sync,
    F: Fn(&J) -> Result<(), CliError> + Sync,
{
    let workers = workers.max(1).min(jobs.len().max(1));
    if workers == 1 {
        for job in jobs {
            f(job)?;
        }
        return Ok(());
    }
    let next = AtomicUsize::new(0);
    let failures = std::sync::Mutex::new(Vec::new());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, Ordering::Relaxed);
                if idx >= jobs.len() {
                    break;
                }
                if let Err(err) = f(&jobs[idx]) {
                    failures.lock().expect("collecting failures").push((idx, err));
                    break;
                }
            });
        }
    });
    let mut failures = failures.into_inner().expect("collecting failures");
    failures.sort_by_key(|(idx, _)| *idx);
    match failures.into_iter().next() {
        Some((_, err)) => Err(err),
        None => Ok(()),
    }
}
