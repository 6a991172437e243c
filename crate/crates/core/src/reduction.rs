//! Block-level reduce-and-broadcast, two ways.
//!
//! The baseline mirrors a warp-shuffle tree followed by one atomic add per
//! warp into a shared accumulator, three block barriers per reduced scalar.
//! The matrix path packs four components per thread into 16×16 binary16
//! tiles and sums them with two multiply-accumulate stages (`V ← A·P + V`,
//! then `W ← Q·V`), needing two barriers per four reduced scalars and no
//! atomics or fences.
//!
//! Both paths run sequentially on the host but count the operations the
//! device code would issue in [`SyncStats`].

use std::fmt;
use std::ops::{Add, AddAssign};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::half::{f32_to_half, Half};
use crate::mma::{self, Accum16, AccumMode, Layout, Mat16, DIM, ELEMS};

pub const WARP_SIZE: usize = 32;
pub const MAX_BLOCK_THREADS: usize = 1024;
/// One 16×16 tile holds four components for each of 64 threads.
pub const VECTORS_PER_TILE: usize = ELEMS / 4;

/// Reduction implementation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Baseline,
    Tcu,
}

impl Method {
    /// Smallest block this method can reduce over.
    pub fn min_threads(self) -> usize {
        match self {
            Method::Baseline => WARP_SIZE,
            Method::Tcu => VECTORS_PER_TILE,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Baseline => "baseline",
            Method::Tcu => "tcu",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "baseline" => Ok(Method::Baseline),
            "tcu" => Ok(Method::Tcu),
            other => Err(Error::Config(format!("unknown reduction method `{other}`"))),
        }
    }
}

/// One thread's four-component record.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Vec4 {
    pub x: f32,
    pub y: f32,
    pub z: f32,
    pub e: f32,
}

impl Vec4 {
    pub const ZERO: Vec4 = Vec4::new(0.0, 0.0, 0.0, 0.0);

    pub const fn new(x: f32, y: f32, z: f32, e: f32) -> Vec4 {
        Vec4 { x, y, z, e }
    }

    pub fn to_array(self) -> [f32; 4] {
        [self.x, self.y, self.z, self.e]
    }

    pub fn from_array(a: [f32; 4]) -> Vec4 {
        Vec4::new(a[0], a[1], a[2], a[3])
    }
}

/// Operation counts for one or more reductions. Counters add up when
/// reductions are composed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyncStats {
    pub block_syncs: u64,
    pub warp_shuffles: u64,
    pub atomic_adds: u64,
    pub memory_fences: u64,
    pub mma_ops: u64,
    pub shared_mem_bytes: u64,
    pub precision_conversions: u64,
}

impl Add for SyncStats {
    type Output = SyncStats;

    fn add(mut self, rhs: SyncStats) -> SyncStats {
        self += rhs;
        self
    }
}

impl AddAssign for SyncStats {
    fn add_assign(&mut self, rhs: SyncStats) {
        self.block_syncs += rhs.block_syncs;
        self.warp_shuffles += rhs.warp_shuffles;
        self.atomic_adds += rhs.atomic_adds;
        self.memory_fences += rhs.memory_fences;
        self.mma_ops += rhs.mma_ops;
        self.shared_mem_bytes += rhs.shared_mem_bytes;
        self.precision_conversions += rhs.precision_conversions;
    }
}

impl std::iter::Sum for SyncStats {
    fn sum<I: Iterator<Item = SyncStats>>(iter: I) -> SyncStats {
        iter.fold(SyncStats::default(), |a, b| a + b)
    }
}

impl SyncStats {
    /// Counters multiplied by `n`, as for `n` identical reductions.
    pub fn times(self, n: u64) -> SyncStats {
        SyncStats {
            block_syncs: self.block_syncs * n,
            warp_shuffles: self.warp_shuffles * n,
            atomic_adds: self.atomic_adds * n,
            memory_fences: self.memory_fences * n,
            mma_ops: self.mma_ops * n,
            shared_mem_bytes: self.shared_mem_bytes * n,
            precision_conversions: self.precision_conversions * n,
        }
    }
}

/// The all-ones matrix: right-multiplying by it sums each row.
pub fn make_p() -> Mat16 {
    Mat16::from_fn(|_, _| Half::ONE)
}

/// A 4×4 grid of 4×4 identity blocks: left-multiplying by it sums every
/// fourth row.
pub fn make_q() -> Mat16 {
    Mat16::from_fn(|i, j| if i % 4 == j % 4 { Half::ONE } else { Half::ZERO })
}

/// Packs up to 64 records into one tile.
///
/// Record `j` fills column `j / 4`, rows `4 * (j % 4)` through
/// `4 * (j % 4) + 3`. Seen column-major, that is the contiguous buffer
/// `[x0 y0 z0 e0 x1 y1 ...]` each thread writes at offset `4 * j`.
pub fn pack_vectors(vs: &[Vec4]) -> Result<Mat16> {
    if vs.is_empty() || vs.len() > VECTORS_PER_TILE {
        return Err(Error::size("vectors per tile", "1..=64", vs.len()));
    }
    let mut staging = [Half::ZERO; ELEMS];
    for (j, v) in vs.iter().enumerate() {
        for (c, value) in v.to_array().into_iter().enumerate() {
            staging[4 * j + c] = f32_to_half(value);
        }
    }
    mma::load_matrix(&staging, Layout::ColMajor)
}

/// Sums four-component records with the matrix method.
///
/// Inputs are zero-padded to a multiple of 64. In half mode `V` is kept in
/// binary16 between tiles; in single mode it stays binary32 and is rounded to
/// binary16 once before the `Q` multiplication.
pub fn reduce4(vs: &[Vec4], accum: AccumMode) -> Result<(Vec4, SyncStats)> {
    if vs.is_empty() {
        return Err(Error::size("reduce4 input", "at least 1 vector", 0));
    }
    let p = make_p();
    let q = make_q();

    let mut v = Accum16::zeros(accum);
    let mut tiles = 0u64;
    for chunk in vs.chunks(VECTORS_PER_TILE) {
        let a = pack_vectors(chunk)?;
        v = mma::mma(&a, &p, &v);
        tiles += 1;
    }
    let w = mma::mma(&q, &v.to_operand(), &Accum16::zeros(accum));
    let total = Vec4::new(w.get(0, 0), w.get(1, 0), w.get(2, 0), w.get(3, 0));

    let n = vs.len() as u64;
    let padded = tiles * VECTORS_PER_TILE as u64;
    let result_bytes = match accum {
        AccumMode::Half => 2,
        AccumMode::Single => 4,
    };
    // Every thread narrows four inputs and widens four results; single mode
    // also narrows V before it can be an operand.
    let narrowed_v = match accum {
        AccumMode::Half => 0,
        AccumMode::Single => ELEMS as u64,
    };
    let stats = SyncStats {
        block_syncs: 2,
        mma_ops: tiles + 1,
        shared_mem_bytes: padded * 4 * 2 + (DIM * DIM) as u64 * result_bytes,
        precision_conversions: 4 * n + 4 * n + narrowed_v,
        ..SyncStats::default()
    };
    Ok((total, stats))
}

/// Shuffle-down tree over one warp: offsets 16, 8, 4, 2, 1.
pub fn baseline_warp_reduce(values: &[f32]) -> Result<(f32, SyncStats)> {
    if values.len() != WARP_SIZE {
        return Err(Error::size("warp lanes", WARP_SIZE.to_string(), values.len()));
    }
    let mut lanes = [0.0f32; WARP_SIZE];
    lanes.copy_from_slice(values);
    let mut offset = WARP_SIZE / 2;
    let mut rounds = 0u64;
    while offset > 0 {
        let prev = lanes;
        for (i, lane) in lanes.iter_mut().enumerate() {
            // Out-of-range sources read back the caller's own value.
            let src = if i + offset < WARP_SIZE { i + offset } else { i };
            *lane += prev[src];
        }
        offset /= 2;
        rounds += 1;
    }
    let stats = SyncStats {
        warp_shuffles: rounds * WARP_SIZE as u64,
        ..SyncStats::default()
    };
    Ok((lanes[0], stats))
}

fn check_baseline_block(threads: usize) -> Result<()> {
    if !(WARP_SIZE..=MAX_BLOCK_THREADS).contains(&threads) || !threads.is_multiple_of(WARP_SIZE) {
        return Err(Error::UnsupportedBlockSize {
            threads,
            method: Method::Baseline,
            reason: "must be a multiple of 32 in [32, 1024]",
        });
    }
    Ok(())
}

/// One scalar per thread: warp trees, one atomic add per warp into a shared
/// binary32 accumulator (ascending warp order), then a broadcast read.
pub fn baseline_block_reduce(values: &[f32], threads_per_block: usize) -> Result<(f32, SyncStats)> {
    check_baseline_block(threads_per_block)?;
    if values.len() != threads_per_block {
        return Err(Error::size(
            "per-thread values",
            threads_per_block.to_string(),
            values.len(),
        ));
    }

    let mut stats = SyncStats {
        // Reset barrier, post-atomic barrier, post-read barrier.
        block_syncs: 3,
        // Fence after the accumulator reset and after the atomics.
        memory_fences: 2,
        shared_mem_bytes: 4,
        ..SyncStats::default()
    };
    let mut acc = 0.0f32;
    for warp in values.chunks(WARP_SIZE) {
        let (partial, warp_stats) = baseline_warp_reduce(warp)?;
        stats += warp_stats;
        acc += partial;
        stats.atomic_adds += 1;
    }
    Ok((acc, stats))
}

/// Index of each component in a seven-component scoring record.
pub mod dim7 {
    pub const ENERGY: usize = 0;
    pub const GX: usize = 1;
    pub const GY: usize = 2;
    pub const GZ: usize = 3;
    pub const TX: usize = 4;
    pub const TY: usize = 5;
    pub const TZ: usize = 6;
}

/// Reduces per-thread `(E, gx, gy, gz, tx, ty, tz)` records.
///
/// The baseline issues seven scalar reductions. The matrix path issues two
/// four-component reductions, `(gx, gy, gz, E)` and `(tx, ty, tz, 0)`.
pub fn reduce7(partials: &[[f32; 7]], method: Method, accum: AccumMode) -> Result<([f32; 7], SyncStats)> {
    use dim7::*;

    let n = partials.len();
    let mut out = [0.0f32; 7];
    match method {
        Method::Baseline => {
            check_baseline_block(n)?;
            let mut stats = SyncStats::default();
            let mut column = vec![0.0f32; n];
            for (d, slot) in out.iter_mut().enumerate() {
                for (dst, rec) in column.iter_mut().zip(partials) {
                    *dst = rec[d];
                }
                let (sum, s) = baseline_block_reduce(&column, n)?;
                *slot = sum;
                stats += s;
            }
            Ok((out, stats))
        }
        Method::Tcu => {
            if n < VECTORS_PER_TILE {
                return Err(Error::UnsupportedBlockSize {
                    threads: n,
                    method,
                    reason: "the matrix method needs at least 64 threads to fill one tile",
                });
            }
            let grad: Vec<Vec4> = partials
                .iter()
                .map(|r| Vec4::new(r[GX], r[GY], r[GZ], r[ENERGY]))
                .collect();
            let torque: Vec<Vec4> = partials.iter().map(|r| Vec4::new(r[TX], r[TY], r[TZ], 0.0)).collect();
            let (g, s1) = reduce4(&grad, accum)?;
            let (t, s2) = reduce4(&torque, accum)?;
            out[ENERGY] = g.e;
            out[GX] = g.x;
            out[GY] = g.y;
            out[GZ] = g.z;
            out[TX] = t.x;
            out[TY] = t.y;
            out[TZ] = t.z;
            Ok((out, s1 + s2))
        }
    }
}
