//! Worker count and the threaded brute-force oracle.

use std::num::NonZeroUsize;

use entrate_core::oracle::{assemble_trace, branch_entropies, check_size, OracleOptions, OracleTrace};
use entrate_core::HmpModel;

use crate::error::{CliError, CliResult};

pub const THREADS_VAR: &str = "ENTRATE_THREADS";

/// Reads `ENTRATE_THREADS`; unset or `0` means one worker per core.
pub fn thread_cap() -> CliResult<usize> {
    let auto = || std::thread::available_parallelism().map_or(1, NonZeroUsize::get);
    match std::env::var(THREADS_VAR) {
        Err(_) => Ok(auto()),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(0) => Ok(auto()),
            Ok(n) => Ok(n),
            Err(_) => Err(CliError::Invalid(format!(
                "{THREADS_VAR} must be a non-negative integer, got {v:?}"
            ))),
        },
    }
}

/// Block entropies with first-symbol branches spread over up to `workers`
/// threads. Branches are reduced in ascending order, so the result does not
/// depend on `workers`.
pub fn parallel_block_entropies(
    model: &HmpModel,
    n: usize,
    opts: &OracleOptions,
    workers: usize,
) -> CliResult<OracleTrace> {
    check_size(model.q(), n, opts)?;
    let q = model.q();
    let workers = workers.clamp(1, q);
    let mut branches: Vec<Option<Vec<f64>>> = vec![None; q];
    std::thread::scope(|s| -> CliResult<()> {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                s.spawn(move || {
                    (w..q)
                        .step_by(workers)
                        .map(|a| branch_entropies(model, n, a, opts).map(|b| (a, b)))
                        .collect::<Result<Vec<_>, _>>()
                })
            })
            .collect();
        for h in handles {
            for (a, b) in h.join().expect("oracle worker panicked")? {
                branches[a] = Some(b);
            }
        }
        Ok(())
    })?;
    let branches: Vec<Vec<f64>> = branches.into_iter().map(|b| b.expect("every branch")).collect();
    Ok(assemble_trace(&branches))
}
