//! Lossless description of a quantized parameter vector.
//!
//! Two schemes, both over the grid the decoder rebuilds from header fields:
//!
//! - **Differential** (small supports): the smallest positive component's
//!   grid index is delta-coded, then each next component is coded as the
//!   index gap to its predecessor.  A `+1` keeps arguments positive when two
//!   components share a point.  Transmission goes smallest-to-largest; the
//!   decoder knows which symbol owns which probability purely from the
//!   monotone order.
//! - **Counts** (supports larger than the grid): for every grid point, from
//!   the largest down, the number of components quantized to it is
//!   delta-coded (`+1` for zero).  Walking points downward lets the decoder
//!   emit a monotone vector directly.
//!
//! The leading component is never transmitted: it is the remainder
//! `1 - sigma - sum(others)` on both sides.

use crate::bitio::{BitReader, BitWriter};
use crate::grids::{Grid, QuantizedParams, POINT_FRAC_BITS};
use crate::{Error, Result};

/// Differential grid-index code.  Returns bits written.
pub fn encode_params_differential(
    qp: &QuantizedParams,
    _grid: &Grid,
    w: &mut BitWriter,
) -> Result<usize> {
    let before = w.bit_len();
    if qp.support >= 2 {
        let idx = &qp.grid_indices;
        let last = idx[qp.support - 2] as u64;
        w.write_elias_delta(last + 1)?;
        for comp in (2..qp.support).rev() {
            let gap = idx[comp - 2] as u64 - idx[comp - 1] as u64;
            w.write_elias_delta(gap + 1)?;
        }
    }
    Ok(w.bit_len() - before)
}

/// Inverse of [`encode_params_differential`].  `dim` and `support` come
/// from the container header; `sigma` is `(index, n)` when the model has a
/// clustered-tail slot.
pub fn decode_params_differential(
    r: &mut BitReader,
    grid: &Grid,
    dim: usize,
    support: usize,
    sigma: Option<(u64, u64)>,
    n: u64,
) -> Result<QuantizedParams> {
    if support > dim {
        return Err(Error::Corrupt("support exceeds model dimension".into()));
    }
    let mut indices = vec![0usize; support.saturating_sub(1)];
    if support >= 2 {
        let v = r.read_elias_delta()?;
        let last = (v - 1) as usize;
        if last >= grid.len() {
            return Err(Error::Corrupt("grid index out of range".into()));
        }
        indices[support - 2] = last;
        let mut prev = last;
        for comp in (2..support).rev() {
            let gap = r.read_elias_delta()? - 1;
            let idx = prev + gap as usize;
            if idx >= grid.len() {
                return Err(Error::Corrupt("grid index out of range".into()));
            }
            indices[comp - 2] = idx;
            prev = idx;
        }
    }
    rebuild(grid, Some(dim), Some(support), indices, sigma, n)
}

/// Counts-per-grid-point code.  Returns bits written.
pub fn encode_params_counts(qp: &QuantizedParams, grid: &Grid, w: &mut BitWriter) -> Result<usize> {
    let before = w.bit_len();
    let b = grid.len();
    let mut counts = vec![0u64; b];
    for &g in &qp.grid_indices {
        if g >= b {
            return Err(Error::InvalidInput("grid index out of range".into()));
        }
        counts[g] += 1;
    }
    for j in (0..b).rev() {
        w.write_elias_delta(counts[j] + 1)?;
    }
    Ok(w.bit_len() - before)
}

/// Inverse of [`encode_params_counts`].  When `dim` is `None` the model
/// dimension is the decoded support (the bounded-alphabet codec); `Some(m)`
/// fixes it (the clustered codecs).
pub fn decode_params_counts(
    r: &mut BitReader,
    grid: &Grid,
    dim: Option<usize>,
    sigma: Option<(u64, u64)>,
    n: u64,
) -> Result<QuantizedParams> {
    let b = grid.len();
    let mut indices = Vec::new();
    for j in (0..b).rev() {
        let c = r.read_elias_delta()? - 1;
        if c > (1 << 30) {
            return Err(Error::Corrupt("implausible component count".into()));
        }
        for _ in 0..c {
            indices.push(j);
        }
        if indices.len() > (1 << 26) {
            return Err(Error::Corrupt("component count overflow".into()));
        }
    }
    rebuild(grid, dim, None, indices, sigma, n)
}

/// Recompute the leading remainder exactly, mirroring the quantizer.
/// `support` is explicit for the differential scheme; the counts scheme
/// passes `None` and the support is inferred (an empty index list with no
/// remaining mass is the all-tail model, support 0).
fn rebuild(
    grid: &Grid,
    dim: Option<usize>,
    support: Option<usize>,
    indices: Vec<usize>,
    sigma: Option<(u64, u64)>,
    n: u64,
) -> Result<QuantizedParams> {
    let (sigma_idx, n) = match sigma {
        Some((t, sn)) => (Some(t), sn),
        None => (None, n.max(1)),
    };
    let n128 = n as u128;
    let total: u128 = n128 << POINT_FRAC_BITS;
    let sigma_term: u128 = (sigma_idx.unwrap_or(0) as u128) << POINT_FRAC_BITS;
    let sum_points: u128 = indices.iter().map(|&g| grid.point_num(g) as u128).sum();
    let used = sigma_term + n128 * sum_points;
    if used > total {
        return Err(Error::Corrupt("decoded parameters exceed total mass".into()));
    }
    let lead = total - used;
    let support = support.unwrap_or(if indices.is_empty() && lead == 0 {
        0
    } else {
        indices.len() + 1
    });
    let dim = dim.unwrap_or(support);
    if support > dim || (support >= 2 && indices.len() != support - 1) {
        return Err(Error::Corrupt("support inconsistent with parameter list".into()));
    }
    if support >= 1 && lead == 0 {
        return Err(Error::Corrupt("leading component must be positive".into()));
    }
    if support == 0 && lead != 0 {
        return Err(Error::Corrupt("mass left over with no components".into()));
    }
    if support >= 2 && lead < n128 * grid.point_num(indices[0]) as u128 {
        return Err(Error::Corrupt("decoded parameters are not monotone".into()));
    }
    let (lead_num, lead_den) = if support == 0 {
        (0, if sigma_idx.is_some() { total } else { 1u128 << POINT_FRAC_BITS })
    } else if sigma_idx.is_some() {
        (lead, total)
    } else {
        (lead / n128, 1u128 << POINT_FRAC_BITS)
    };
    Ok(QuantizedParams { dim, support, grid_indices: indices, sigma_idx, n, lead_num, lead_den })
}
