//! Minimal scoped-thread parallel map for embarrassingly parallel grid
//! sweeps. Thread count is capped by the `PAULI_SEP_THREADS` environment
//! variable (default: available parallelism).

/// Number of worker threads to use for grid sweeps.
pub(crate) fn thread_count() -> usize {
    let avail = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    match std::env::var("PAULI_SEP_THREADS") {
        Ok(v) => v.parse::<usize>().ok().filter(|&n| n >= 1).unwrap_or(avail),
        Err(_) => avail,
    }
    .min(64)
}

/// Order-preserving parallel map over a slice using scoped threads.
pub(crate) fn parallel_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    let n = thread_count().min(items.len().max(1));
    if n <= 1 || items.len() < 2 {
        return items.iter().map(&f).collect();
    }
    let chunk = items.len().div_ceil(n);
    let mut out: Vec<Vec<R>> = Vec::new();
    std::thread::scope(|scope| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|part| scope.spawn(|| part.iter().map(&f).collect::<Vec<R>>()))
            .collect();
        out = handles.into_iter().map(|h| h.join().expect("worker panicked")).collect();
    });
    out.into_iter().flatten().collect()
}
