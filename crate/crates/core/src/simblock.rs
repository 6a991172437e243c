//! Thread-block configurations and an abstract cost model over [`SyncStats`].
//!
//! Costs are weighted operation counts in arbitrary units. They order the two
//! reduction methods; they are not runtimes.

use crate::error::{Error, Result};
use crate::mma::AccumMode;
use crate::reduction::{self, Method, SyncStats, Vec4, MAX_BLOCK_THREADS, WARP_SIZE};

/// Block sizes swept by default.
pub const SWEEP_SIZES: [usize; 5] = [64, 128, 256, 512, 1024];

/// A validated block shape and reduction choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockConfig {
    threads: usize,
    method: Method,
    accum: AccumMode,
}

impl BlockConfig {
    pub fn new(threads: usize, method: Method, accum: AccumMode) -> Result<BlockConfig> {
        let min = method.min_threads();
        if threads < min || threads > MAX_BLOCK_THREADS || !threads.is_multiple_of(WARP_SIZE) {
            let reason = match method {
                Method::Tcu if threads < min => "64 threads is the lower limit of the matrix method",
                _ if threads > MAX_BLOCK_THREADS => "blocks are limited to 1024 threads",
                _ => "thread count must be a multiple of the warp size (32)",
            };
            return Err(Error::UnsupportedBlockSize {
                threads,
                method,
                reason,
            });
        }
        Ok(BlockConfig { threads, method, accum })
    }

    pub fn threads(&self) -> usize {
        self.threads
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn accum(&self) -> AccumMode {
        self.accum
    }
}

/// Per-thread block input.
#[derive(Debug, Clone)]
pub enum BlockInputs {
    Vec4(Vec<Vec4>),
    Seven(Vec<[f32; 7]>),
}

impl BlockInputs {
    pub fn len(&self) -> usize {
        match self {
            BlockInputs::Vec4(v) => v.len(),
            BlockInputs::Seven(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reduced {
    Vec4(Vec4),
    Seven([f32; 7]),
}

/// Runs one block-wide reduce-and-broadcast.
///
/// Four-component inputs on the baseline are reduced one component at a time,
/// as the scalar routine would be called four times.
pub fn simulate_block(config: &BlockConfig, inputs: &BlockInputs) -> Result<(Reduced, SyncStats)> {
    if inputs.len() != config.threads {
        return Err(Error::size(
            "per-thread inputs",
            config.threads.to_string(),
            inputs.len(),
        ));
    }
    match inputs {
        BlockInputs::Seven(recs) => {
            let (out, stats) = reduction::reduce7(recs, config.method, config.accum)?;
            Ok((Reduced::Seven(out), stats))
        }
        BlockInputs::Vec4(vs) => match config.method {
            Method::Tcu => {
                let (out, stats) = reduction::reduce4(vs, config.accum)?;
                Ok((Reduced::Vec4(out), stats))
            }
            Method::Baseline => {
                let mut out = [0.0f32; 4];
                let mut stats = SyncStats::default();
                let mut column = vec![0.0f32; vs.len()];
                for (c, slot) in out.iter_mut().enumerate() {
                    for (dst, v) in column.iter_mut().zip(vs) {
                        *dst = v.to_array()[c];
                    }
                    let (sum, s) = reduction::baseline_block_reduce(&column, config.threads)?;
                    *slot = sum;
                    stats += s;
                }
                Ok((Reduced::Vec4(Vec4::from_array(out)), stats))
            }
        },
    }
}

/// Abstract cost per counted operation. All weights are non-negative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostWeights {
    pub block_sync: f64,
    pub shuffle: f64,
    pub atomic: f64,
    pub mma: f64,
    pub fence: f64,
}

impl Default for CostWeights {
    /// Tunable defaults, not calibrated against any device.
    fn default() -> Self {
        CostWeights {
            block_sync: 10.0,
            shuffle: 1.0,
            atomic: 4.0,
            mma: 8.0,
            fence: 4.0,
        }
    }
}

impl CostWeights {
    pub fn unit() -> CostWeights {
        CostWeights {
            block_sync: 1.0,
            shuffle: 1.0,
            atomic: 1.0,
            mma: 1.0,
            fence: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.block_sync, self.shuffle, self.atomic, self.mma, self.fence];
        if all.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Config(format!("cost weights must be finite and >= 0: {self:?}")));
        }
        Ok(())
    }
}

pub fn estimate_cost(stats: &SyncStats, weights: &CostWeights) -> f64 {
    weights.block_sync * stats.block_syncs as f64
        + weights.shuffle * stats.warp_shuffles as f64
        + weights.atomic * stats.atomic_adds as f64
        + weights.mma * stats.mma_ops as f64
        + weights.fence * stats.memory_fences as f64
}

/// One block size in a scaling sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub threads: usize,
    /// Stats of a single scalar baseline reduction.
    pub baseline_per_call: SyncStats,
    /// Scalar baseline calls needed to match one matrix reduction (4).
    pub baseline_calls: u64,
    /// Stats of one four-component matrix reduction.
    pub tcu: SyncStats,
    pub baseline_cost: f64,
    pub tcu_cost: f64,
    /// `baseline_cost / tcu_cost`, or 1.0 when the matrix cost is zero.
    pub cost_ratio: f64,
    /// Set when the ratio is undefined and reported as 1.0.
    pub degenerate: bool,
}

/// Compares four scalar baseline reductions against one four-component
/// matrix reduction at each block size.
pub fn scaling_sweep(sizes: &[usize], accum: AccumMode, weights: &CostWeights) -> Result<Vec<SweepRow>> {
    weights.validate()?;
    let mut rows = Vec::with_capacity(sizes.len());
    for &threads in sizes {
        let base_cfg = BlockConfig::new(threads, Method::Baseline, accum)?;
        let tcu_cfg = BlockConfig::new(threads, Method::Tcu, accum)?;

        let scalars = vec![0.0f32; threads];
        let (_, baseline_per_call) = reduction::baseline_block_reduce(&scalars, base_cfg.threads)?;
        let (_, tcu) = simulate_block(&tcu_cfg, &BlockInputs::Vec4(vec![Vec4::ZERO; threads]))?;

        let baseline_calls = 4;
        let baseline_cost = estimate_cost(&baseline_per_call.times(baseline_calls), weights);
        let tcu_cost = estimate_cost(&tcu, weights);
        let degenerate = tcu_cost == 0.0;
        let cost_ratio = if degenerate { 1.0 } else { baseline_cost / tcu_cost };
        rows.push(SweepRow {
            threads,
            baseline_per_call,
            baseline_calls,
            tcu,
            baseline_cost,
            tcu_cost,
            cost_ratio,
            degenerate,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_bounds() {
        assert!(BlockConfig::new(64, Method::Tcu, AccumMode::Half).is_ok());
        assert!(BlockConfig::new(32, Method::Tcu, AccumMode::Half).is_err());
        assert!(BlockConfig::new(32, Method::Baseline, AccumMode::Half).is_ok());
        assert!(BlockConfig::new(1056, Method::Baseline, AccumMode::Half).is_err());
        assert!(BlockConfig::new(100, Method::Baseline, AccumMode::Half).is_err());
        assert!(BlockConfig::new(96, Method::Tcu, AccumMode::Single).is_ok());
    }

    #[test]
    fn simulate_examples() {
        let cfg = BlockConfig::new(64, Method::Tcu, AccumMode::Half).unwrap();
        let (out, _) = simulate_block(&cfg, &BlockInputs::Vec4(vec![Vec4::new(1.0, 1.0, 1.0, 1.0); 64])).unwrap();
        assert_eq!(out, Reduced::Vec4(Vec4::new(64.0, 64.0, 64.0, 64.0)));

        let cfg = BlockConfig::new(1024, Method::Baseline, AccumMode::Half).unwrap();
        let (_, stats) = simulate_block(&cfg, &BlockInputs::Seven(vec![[0.5; 7]; 1024])).unwrap();
        assert_eq!(stats.block_syncs, 21);

        let cfg = BlockConfig::new(1024, Method::Tcu, AccumMode::Half).unwrap();
        let (_, stats) = simulate_block(&cfg, &BlockInputs::Vec4(vec![Vec4::ZERO; 1024])).unwrap();
        assert_eq!(stats.block_syncs, 2);
        assert_eq!(stats.mma_ops, 17);
    }

    #[test]
    fn simulate_rejects_mismatched_inputs() {
        let cfg = BlockConfig::new(64, Method::Tcu, AccumMode::Half).unwrap();
        assert!(simulate_block(&cfg, &BlockInputs::Vec4(vec![Vec4::ZERO; 63])).is_err());
    }

    #[test]
    fn cost_examples() {
        assert_eq!(estimate_cost(&SyncStats::default(), &CostWeights::default()), 0.0);
        let s = SyncStats {
            block_syncs: 2,
            mma_ops: 2,
            ..SyncStats::default()
        };
        assert_eq!(estimate_cost(&s, &CostWeights::unit()), 4.0);
    }

    #[test]
    fn sweep_examples() {
        let rows = scaling_sweep(&[64, 1024], AccumMode::Half, &CostWeights::default()).unwrap();
        assert_eq!(rows[0].baseline_per_call.atomic_adds, 2);
        assert_eq!(rows[1].baseline_per_call.atomic_adds, 32);
        assert_eq!(rows[0].tcu.mma_ops, 2);
        assert_eq!(rows[1].tcu.mma_ops, 17);
        assert!(rows.iter().all(|r| r.tcu.atomic_adds == 0));
    }

    #[test]
    fn sweep_ratio_grows_to_512() {
        let rows = scaling_sweep(&SWEEP_SIZES, AccumMode::Half, &CostWeights::default()).unwrap();
        assert_eq!(rows.len(), 5);
        for w in rows[..4].windows(2) {
            assert!(w[1].cost_ratio > w[0].cost_ratio, "{w:?}");
        }
        assert!(rows.iter().all(|r| r.cost_ratio >= 1.0));
    }

    #[test]
    fn zero_weights_are_degenerate() {
        let zero = CostWeights {
            block_sync: 0.0,
            shuffle: 0.0,
            atomic: 0.0,
            mma: 0.0,
            fence: 0.0,
        };
        let rows = scaling_sweep(&SWEEP_SIZES, AccumMode::Half, &zero).unwrap();
        assert!(rows.iter().all(|r| r.degenerate && r.cost_ratio == 1.0));
    }

    #[test]
    fn sweep_rejects_bad_sizes() {
        assert!(scaling_sweep(&[32], AccumMode::Half, &CostWeights::default()).is_err());
        let neg = CostWeights {
            atomic: -1.0,
            ..CostWeights::default()
        };
        assert!(scaling_sweep(&[64], AccumMode::Half, &neg).is_err());
    }
}
