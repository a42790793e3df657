//! Grid evaluation on a rayon pool sized by `CQFI_WORKERS`.

use rayon::prelude::*;

use crate::error::{CliError, CliResult};

pub const WORKERS_ENV: &str = "CQFI_WORKERS";

/// Worker count from the environment; `None` leaves rayon's default.
pub fn workers() -> CliResult<Option<usize>> {
    match std::env::var(WORKERS_ENV) {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::usage(format!("{WORKERS_ENV} must be a positive integer, got '{s}'"))),
        },
    }
}

/// Maps `f` over `items`, results in input order.
pub fn par_map<T, R, F>(items: &[T], f: F) -> CliResult<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers()? {
        if n == 1 {
            return Ok(items.iter().map(f).collect());
        }
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::usage(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| items.par_iter().map(f).collect()))
}
