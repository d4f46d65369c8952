//! File formats, experiment orchestration and timing on top of `pine-core`.

pub mod bench;
pub mod config;
pub mod io;
pub mod methods;
pub mod pipeline;

pub use bench::{benchmark, benchmark_file, BenchReport};
pub use config::{Config, Method};
pub use methods::StageError;
pub use pipeline::{run_pipeline, run_pipeline_file, Report};

/// Sizes the global worker pool from `PINE_THREADS`, if set. Call before any
/// parallel work.
pub fn init_thread_pool() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var("PINE_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().map_err(|_| anyhow::anyhow!("PINE_THREADS=`{raw}` is not a count"))?;
    if n == 0 {
        anyhow::bail!("PINE_THREADS must be at least 1");
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}
