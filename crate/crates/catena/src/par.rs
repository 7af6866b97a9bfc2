//! Minimal deterministic fan-out helper: maps a function over a slice on a
//! bounded number of scoped threads and returns results in input order. The
//! CATENA_THREADS environment variable caps the worker count.

pub fn thread_limit() -> usize {
    std::env::var("CATENA_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(8)
        })
}

pub fn parallel_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    let workers = thread_limit().min(items.len().max(1));
    if workers <= 1 {
        return items.iter().map(|t| f(t)).collect();
    }
    let mut out: Vec<Option<R>> = (0..items.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        let chunk = items.len().div_ceil(workers);
        let mut rest = &mut out[..];
        let mut offset = 0;
        let mut handles = Vec::new();
        while !rest.is_empty() {
            let take = chunk.min(rest.len());
            let (head, tail) = rest.split_at_mut(take);
            rest = tail;
            let start = offset;
            offset += take;
            let f = &f;
            handles.push(scope.spawn(move || {
                for (k, slot) in head.iter_mut().enumerate() {
                    *slot = Some(f(&items[start + k]));
                }
            }));
        }
        for h in handles {
            h.join().expect("worker panicked");
        }
    });
    out.into_iter().map(|o| o.expect("worker left a gap")).collect()
}
