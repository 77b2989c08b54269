//! Worker-count control for the data-parallel sections.

/// Environment variable consulted for the default worker count.
pub const WORKERS_ENV: &str = "PERSPHERE_WORKERS";

/// Runs `f` inside a dedicated rayon pool with `workers` threads.
///
/// `workers == 0` uses the global pool.
pub fn with_workers<R: Send>(workers: usize, f: impl FnOnce() -> R + Send) -> R {
    if workers == 0 {
        return f();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}
