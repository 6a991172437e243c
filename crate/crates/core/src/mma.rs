//! Emulated 16×16×16 warp matrix multiply-and-accumulate.
//!
//! Operands are binary16. Each output element is formed from binary32
//! products summed in binary32 in ascending `k`, plus the accumulator input,
//! and is rounded once to the accumulator precision. Fragments are modeled as
//! whole matrices; the per-lane register distribution is not.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::half::{f32_to_half, Half};

pub const DIM: usize = 16;
pub const ELEMS: usize = DIM * DIM;

/// Memory layout of a flat 256-element buffer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    RowMajor,
    ColMajor,
}

impl Layout {
    #[inline]
    fn offset(self, row: usize, col: usize) -> usize {
        match self {
            Layout::RowMajor => row * DIM + col,
            Layout::ColMajor => col * DIM + row,
        }
    }
}

/// Accumulator precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AccumMode {
    Half,
    Single,
}

impl fmt::Display for AccumMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AccumMode::Half => "half",
            AccumMode::Single => "single",
        })
    }
}

impl FromStr for AccumMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "half" => Ok(AccumMode::Half),
            "single" => Ok(AccumMode::Single),
            other => Err(Error::Config(format!("unknown accumulator mode `{other}`"))),
        }
    }
}

/// A 16×16 binary16 operand, stored in logical row-major order.
#[derive(Clone, PartialEq, Eq)]
pub struct Mat16 {
    elems: [Half; ELEMS],
    layout: Layout,
}

impl Mat16 {
    pub fn zeros() -> Mat16 {
        Mat16 {
            elems: [Half::ZERO; ELEMS],
            layout: Layout::RowMajor,
        }
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> Half) -> Mat16 {
        let mut m = Mat16::zeros();
        for i in 0..DIM {
            for j in 0..DIM {
                m.elems[i * DIM + j] = f(i, j);
            }
        }
        m
    }

    pub fn identity() -> Mat16 {
        Mat16::from_fn(|i, j| if i == j { Half::ONE } else { Half::ZERO })
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Half {
        self.elems[row * DIM + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, v: Half) {
        self.elems[row * DIM + col] = v;
    }

    /// Layout of the buffer this matrix was loaded from.
    pub fn layout(&self) -> Layout {
        self.layout
    }
}

impl fmt::Debug for Mat16 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat16 ({:?})", self.layout)?;
        for i in 0..DIM {
            let row: Vec<f32> = (0..DIM).map(|j| self.get(i, j).to_f32()).collect();
            writeln!(f, "  {row:?}")?;
        }
        Ok(())
    }
}

/// A 16×16 accumulator fragment.
///
/// Elements are held as binary32. In [`AccumMode::Half`] every element is a
/// binary16-representable value.
#[derive(Clone, PartialEq)]
pub struct Accum16 {
    elems: [f32; ELEMS],
    mode: AccumMode,
}

impl Accum16 {
    pub fn zeros(mode: AccumMode) -> Accum16 {
        Accum16 {
            elems: [0.0; ELEMS],
            mode,
        }
    }

    /// Builds an accumulator, rounding to binary16 in half mode.
    pub fn from_fn(mode: AccumMode, mut f: impl FnMut(usize, usize) -> f32) -> Accum16 {
        let mut acc = Accum16::zeros(mode);
        for i in 0..DIM {
            for j in 0..DIM {
                acc.elems[i * DIM + j] = round_to_mode(f(i, j), mode);
            }
        }
        acc
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f32 {
        self.elems[row * DIM + col]
    }

    pub fn mode(&self) -> AccumMode {
        self.mode
    }

    /// Rounds every element to binary16 so the accumulator can feed another
    /// multiplication as an operand.
    pub fn to_operand(&self) -> Mat16 {
        Mat16::from_fn(|i, j| f32_to_half(self.get(i, j)))
    }
}

impl fmt::Debug for Accum16 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Accum16 ({:?})", self.mode)?;
        for i in 0..DIM {
            writeln!(f, "  {:?}", &self.elems[i * DIM..(i + 1) * DIM])?;
        }
        Ok(())
    }
}

#[inline]
fn round_to_mode(v: f32, mode: AccumMode) -> f32 {
    match mode {
        AccumMode::Half => f32_to_half(v).to_f32(),
        AccumMode::Single => v,
    }
}

/// Maps a flat 256-element buffer onto a fragment.
pub fn load_matrix(src: &[Half], layout: Layout) -> Result<Mat16> {
    if src.len() != ELEMS {
        return Err(Error::size("matrix buffer", ELEMS.to_string(), src.len()));
    }
    let mut m = Mat16::from_fn(|i, j| src[layout.offset(i, j)]);
    m.layout = layout;
    Ok(m)
}

/// Writes an accumulator out to a flat buffer in the given layout.
pub fn store_matrix(m: &Accum16, layout: Layout) -> Vec<f32> {
    let mut out = vec![0.0; ELEMS];
    for i in 0..DIM {
        for j in 0..DIM {
            out[layout.offset(i, j)] = m.get(i, j);
        }
    }
    out
}

/// `a · b + c`, result in `c`'s precision.
pub fn mma(a: &Mat16, b: &Mat16, c: &Accum16) -> Accum16 {
    // Widen once; binary16 -> binary32 is exact.
    let mut aw = [0.0f32; ELEMS];
    let mut bw = [0.0f32; ELEMS];
    for (dst, src) in aw.iter_mut().zip(a.elems.iter()) {
        *dst = src.to_f32();
    }
    for (dst, src) in bw.iter_mut().zip(b.elems.iter()) {
        *dst = src.to_f32();
    }

    // Row at a time; each element still sums its products in ascending k.
    let mut out = Accum16::zeros(c.mode);
    for i in 0..DIM {
        let mut p = [0.0f32; DIM];
        for k in 0..DIM {
            let aik = aw[i * DIM + k];
            let brow = &bw[k * DIM..(k + 1) * DIM];
            for (pj, &bkj) in p.iter_mut().zip(brow) {
                *pj += aik * bkj;
            }
        }
        for (j, pj) in p.into_iter().enumerate() {
            out.elems[i * DIM + j] = round_to_mode(pj + c.get(i, j), c.mode);
        }
    }
    out
}
