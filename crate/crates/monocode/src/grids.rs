//! Quantization grids and monotonicity-preserving quantization.
//!
//! A grid is a strictly increasing set of probability values organized into
//! exponentially widening intervals, with uniform spacing inside each
//! interval.  Every point is an exact multiple of 2^-62, and the whole grid
//! is a pure function of `(mode, n, k_or_m)` computed with integer
//! arithmetic only, so encoder and decoder always rebuild the identical
//! grid from header fields.  Sequence lengths and alphabet sizes are rounded
//! up to powers of two inside the construction (the interval ratio is
//! exactly 2), and irrational spacing factors are realized as rounded
//! integer roots; both roundings only shift constants already absorbed by
//! the bounds' (1 + epsilon) slack.
//!
//! Points are never materialized: each interval stores its start value,
//! spacing and point count, and point lookup is O(log #intervals).

use crate::{Error, Result};

/// Fixed-point denominator exponent: values are numerators over 2^62.
pub const POINT_FRAC_BITS: u32 = 62;
const ONE: u128 = 1u128 << POINT_FRAC_BITS;

/// Which of the five grid families to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridMode {
    /// Bounded alphabet of size k; intervals over [1/n, 1).
    SmallK,
    /// Alphabets up to O(n); intervals over [1/n^2, 1).
    Large,
    /// Effective alphabet m with clustered tail; intervals over
    /// [1/n^(rho+2/3), 1).
    Fast,
    /// Per-sequence grids for small effective alphabets; [1/n^2, 1) with
    /// spacing proportional to m.
    IndSmall,
    /// Per-sequence grids for large effective alphabets;
    /// [1/n^(rho+4/3), 1).
    IndLarge,
}

/// Inputs from which a grid is deterministically rebuilt.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    pub mode: GridMode,
    /// Sequence length.
    pub n: u64,
    /// Alphabet size k (SmallK) or effective alphabet m (Fast/Ind modes);
    /// ignored by Large.
    pub k_or_m: u64,
}

#[derive(Debug, Clone)]
struct Interval {
    /// Left edge, also the first point (numerator over 2^62).
    lo: u64,
    /// Exclusive right edge.
    hi: u64,
    /// Spacing between consecutive points.
    delta: u64,
    /// Number of points in this interval.
    count: usize,
    /// Global index of the first point.
    start: usize,
}

/// A built grid.  Immutable; all lookups are pure.
#[derive(Debug, Clone)]
pub struct Grid {
    spec: GridSpec,
    intervals: Vec<Interval>,
    total_points: usize,
}

fn ceil_log2_u64(x: u64) -> u32 {
    crate::bitio::ceil_log2(x)
}

/// Floor integer square root.
fn isqrt(x: u128) -> u128 {
    if x < 2 {
        return x;
    }
    let mut r = (x as f64).sqrt() as u128;
    // settle float error exactly
    while r.saturating_mul(r) > x {
        r -= 1;
    }
    while (r + 1).saturating_mul(r + 1) <= x {
        r += 1;
    }
    r
}

/// Floor integer cube root.
fn icbrt(x: u128) -> u128 {
    if x < 2 {
        return x;
    }
    let mut r = (x as f64).cbrt() as u128;
    while r.saturating_mul(r).saturating_mul(r) > x {
        r -= 1;
    }
    while (r + 1).saturating_mul(r + 1).saturating_mul(r + 1) <= x {
        r += 1;
    }
    r
}

/// Build the grid for `spec`.
pub fn build_grid(spec: &GridSpec) -> Result<Grid> {
    if spec.n == 0 {
        return Err(Error::GridConstruction("n must be >= 1".into()));
    }
    if spec.k_or_m == 0 && spec.mode != GridMode::Large {
        return Err(Error::GridConstruction("k_or_m must be >= 1".into()));
    }
    // Power-of-two ceilings; a length-1 sequence still gets the n=2 grid.
    let l = ceil_log2_u64(spec.n).max(1);
    let lm = ceil_log2_u64(spec.k_or_m.max(1));
    if l > 31 {
        return Err(Error::GridConstruction("sequence length above 2^31 unsupported".into()));
    }

    // Denominator exponent D (first edge 2^-D) and per-interval spacing.
    // delta_for(j) returns the spacing numerator for interval j (1-based).
    let (d_exp, delta_for): (u32, Box<dyn Fn(u32) -> u128>) = match spec.mode {
        GridMode::SmallK => {
            let k = spec.k_or_m;
            let d = l;
            let f: Box<dyn Fn(u32) -> u128> = if k >= (1u64 << l) / 4 {
                // Capacity 0.5*sqrt(n/k) < 1: one point per interval.
                Box::new(move |_| u128::MAX)
            } else {
                Box::new(move |j| {
                    // sqrt(k) * 2^j / 2^(1.5 l), in units of 2^-62:
                    // sqrt(k << (124 + 2j - 3l)).
                    let shift = 124 + 2 * j as i64 - 3 * l as i64;
                    if shift < 0 {
                        return u128::MAX;
                    }
                    let k128 = k as u128;
                    if shift as u32 > k128.leading_zeros() {
                        return u128::MAX;
                    }
                    isqrt(k128 << shift)
                })
            };
            (d, f)
        }
        GridMode::Large => {
            let d = 2 * l;
            let r3 = icbrt(1u128 << l); // 2^(l/3), floored
            let f: Box<dyn Fn(u32) -> u128> = Box::new(move |j| {
                let shift = 62 + j as i64 - 2 * l as i64;
                if shift < 0 {
                    return 0;
                }
                (1u128 << shift) / r3
            });
            (d, f)
        }
        GridMode::Fast => {
            // rho + 2 alpha with alpha = 1/3: edges over 2^(lm + ceil(2l/3)),
            // spacing 2^j / 2^(lm + l) (the rho + 3 alpha = rho + 1 exponent
            // is exactly integral).
            if lm + l > 61 {
                return Err(Error::GridConstruction(
                    "effective alphabet too large for this sequence length".into(),
                ));
            }
            let d = lm + (2 * l).div_ceil(3);
            let f: Box<dyn Fn(u32) -> u128> = Box::new(move |j| {
                let shift = 62 + j as i64 - lm as i64 - l as i64;
                if shift < 0 {
                    return 0;
                }
                1u128 << shift.min(104)
            });
            (d, f)
        }
        GridMode::IndSmall => {
            let m = spec.k_or_m as u128;
            let d = 2 * l;
            let f: Box<dyn Fn(u32) -> u128> = Box::new(move |j| {
                // m * 2^j / 2^(3l)
                let shift = 62 + j as i64 - 3 * l as i64;
                if shift >= 0 {
                    m.saturating_mul(1u128 << shift.min(104))
                } else {
                    m >> ((-shift) as u32).min(127)
                }
            });
            (d, f)
        }
        GridMode::IndLarge => {
            if lm + l > 61 {
                return Err(Error::GridConstruction(
                    "effective alphabet too large for this sequence length".into(),
                ));
            }
            let d = lm + l + l.div_ceil(3);
            let r32 = icbrt(1u128 << (2 * l)); // 2^(2l/3), floored
            let f: Box<dyn Fn(u32) -> u128> = Box::new(move |j| {
                let shift = 62 + j as i64 - lm as i64 - l as i64;
                if shift < 0 {
                    return 0;
                }
                (1u128 << shift.min(104)) / r32
            });
            (d, f)
        }
    };

    if d_exp == 0 || d_exp > POINT_FRAC_BITS {
        return Err(Error::GridConstruction(format!(
            "interval structure degenerate (edge exponent {d_exp})"
        )));
    }

    let j_count = d_exp; // intervals [2^(j-1-D), 2^(j-D)) for j = 1..=D
    let mut intervals = Vec::with_capacity(j_count as usize);
    let mut start = 0usize;
    for j in 1..=j_count {
        let lo = 1u64 << (POINT_FRAC_BITS - 1 - d_exp + j);
        let hi = 1u64 << (POINT_FRAC_BITS - d_exp + j);
        let width = (hi - lo) as u128;
        let mut delta = delta_for(j);
        if delta == 0 {
            return Err(Error::GridConstruction(format!(
                "spacing underflows fixed-point resolution in interval {j}"
            )));
        }
        if delta > width {
            delta = width;
        }
        let count = width.div_ceil(delta) as usize;
        intervals.push(Interval {
            lo,
            hi,
            delta: delta as u64,
            count,
            start,
        });
        start += count;
    }
    Ok(Grid { spec: *spec, intervals, total_points: start })
}

impl Grid {
    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    /// Total number of points B.
    pub fn len(&self) -> usize {
        self.total_points
    }

    pub fn is_empty(&self) -> bool {
        self.total_points == 0
    }

    /// Number of intervals J.
    pub fn num_intervals(&self) -> usize {
        self.intervals.len()
    }

    /// Points in interval `j` (0-based).
    pub fn interval_count(&self, j: usize) -> usize {
        self.intervals[j].count
    }

    /// Spacing of interval `j` as a numerator over 2^62.
    pub fn spacing_num(&self, j: usize) -> u64 {
        self.intervals[j].delta
    }

    pub fn spacing_f64(&self, j: usize) -> f64 {
        self.intervals[j].delta as f64 / ONE as f64
    }

    /// `[lo, hi)` of interval `j` as floats.
    pub fn interval_bounds_f64(&self, j: usize) -> (f64, f64) {
        let iv = &self.intervals[j];
        (iv.lo as f64 / ONE as f64, iv.hi as f64 / ONE as f64)
    }

    /// Numerator of point `i` over 2^62.
    pub fn point_num(&self, i: usize) -> u64 {
        let j = self.interval_index_of_point(i);
        let iv = &self.intervals[j];
        iv.lo + (i - iv.start) as u64 * iv.delta
    }

    pub fn point_f64(&self, i: usize) -> f64 {
        self.point_num(i) as f64 / ONE as f64
    }

    /// Interval (0-based) owning point `i`.
    pub fn interval_index_of_point(&self, i: usize) -> usize {
        debug_assert!(i < self.total_points);
        self.intervals.partition_point(|iv| iv.start <= i) - 1
    }

    /// Interval (0-based) whose `[lo, hi)` contains `x`, if any.
    pub fn interval_of_value(&self, x: f64) -> Option<usize> {
        let y = x * ONE as f64;
        if y < self.intervals[0].lo as f64 {
            return None;
        }
        let j = self.intervals.partition_point(|iv| (iv.lo as f64) <= y);
        if j == 0 {
            None
        } else {
            let j = j - 1;
            if y < self.intervals[j].hi as f64 {
                Some(j)
            } else {
                None // x >= 1
            }
        }
    }

    /// Largest point `<= x` and smallest point `>= x`, as indices.
    pub fn bracket(&self, x: f64) -> (Option<usize>, Option<usize>) {
        let b = self.total_points;
        if b == 0 {
            return (None, None);
        }
        let y = x * ONE as f64;
        if y < self.intervals[0].lo as f64 {
            return (None, Some(0));
        }
        // Find the owning interval (or the last one when x >= top edge).
        let mut j = self.intervals.partition_point(|iv| (iv.lo as f64) <= y);
        j = j.saturating_sub(1);
        let iv = &self.intervals[j];
        let off = ((y - iv.lo as f64) / iv.delta as f64).floor();
        let mut lo_idx =
            iv.start + (off.max(0.0) as usize).min(iv.count - 1);
        // Settle float rounding: enforce point(lo) <= x < point(lo + 1).
        while lo_idx + 1 < b && self.point_f64(lo_idx + 1) <= x {
            lo_idx += 1;
        }
        while lo_idx > 0 && self.point_f64(lo_idx) > x {
            lo_idx -= 1;
        }
        if self.point_f64(lo_idx) > x {
            return (None, Some(lo_idx));
        }
        let hi_idx = if self.point_f64(lo_idx) == x {
            Some(lo_idx)
        } else if lo_idx + 1 < b {
            Some(lo_idx + 1)
        } else {
            None
        };
        (Some(lo_idx), hi_idx)
    }
}

/// A monotone parameter vector quantized onto a grid.
///
/// Components `2..=support` sit on grid points (recorded by index);
/// components past `support` are zero; the leading component is the exact
/// remainder `1 - sigma - sum(points)`, kept as a fraction so the coding
/// tables derived from it are reproducible bit for bit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantizedParams {
    /// Model dimension (k-hat or m): number of components, zero ones
    /// included.
    pub dim: usize,
    /// Number of positive components, leading one included.
    pub support: usize,
    /// Grid indices of components `2..=support`, non-increasing.
    pub grid_indices: Vec<usize>,
    /// Clustered-tail mass index: `sigma = sigma_idx / n`; `None` when the
    /// model has no tail slot, `Some(0)` when it has one but the tail is
    /// empty.
    pub sigma_idx: Option<u64>,
    /// Sequence length defining the sigma grid (and the weight scale).
    pub n: u64,
    /// Exact leading component `lead_num / lead_den`.
    pub lead_num: u128,
    pub lead_den: u128,
}

impl QuantizedParams {
    /// Component `i` (1-based) as a float; zero past the support.
    pub fn prob_f64(&self, grid: &Grid, i: usize) -> f64 {
        debug_assert!(i >= 1);
        if i == 1 {
            self.lead_num as f64 / self.lead_den as f64
        } else if i <= self.support {
            grid.point_f64(self.grid_indices[i - 2])
        } else {
            0.0
        }
    }

    pub fn sigma_f64(&self) -> f64 {
        match self.sigma_idx {
            Some(t) => t as f64 / self.n as f64,
            None => 0.0,
        }
    }

    /// All `dim` component probabilities.
    pub fn probs_f64(&self, grid: &Grid) -> Vec<f64> {
        (1..=self.dim).map(|i| self.prob_f64(grid, i)).collect()
    }

    /// Exact integer weights of the `dim` components plus, when present,
    /// the tail slot, over the common denominator returned second.  These
    /// feed the arithmetic-coding table builder on both sides.
    pub fn weights(&self, grid: &Grid) -> (Vec<u128>, u128) {
        let n = self.n as u128;
        let den = n << POINT_FRAC_BITS;
        let mut w = Vec::with_capacity(self.dim + 1);
        if self.dim >= 1 {
            w.push(self.lead_num * (den / self.lead_den));
        }
        for comp in 2..=self.dim {
            if comp <= self.support {
                w.push(n * grid.point_num(self.grid_indices[comp - 2]) as u128);
            } else {
                w.push(0);
            }
        }
        if let Some(t) = self.sigma_idx {
            w.push((t as u128) << POINT_FRAC_BITS);
        }
        debug_assert_eq!(w.iter().sum::<u128>(), den);
        (w, den)
    }
}

/// Quantize a plain monotone probability vector (`sum = 1`) onto `grid`.
pub fn quantize_monotone(theta: &[f64], grid: &Grid) -> Result<QuantizedParams> {
    quantize_monotone_clustered(theta, None, grid.spec().n.max(1), grid)
}

/// Quantize the head of a clustered model: `theta` are the first `m`
/// components (summing to `1 - sigma_idx/n`), the tail slot carries
/// `sigma_idx / n`.
pub fn quantize_monotone_clustered(
    theta: &[f64],
    sigma_idx: Option<u64>,
    n: u64,
    grid: &Grid,
) -> Result<QuantizedParams> {
    let dim = theta.len();
    if dim == 0 && sigma_idx.is_none() {
        return Err(Error::InvalidInput("empty parameter vector".into()));
    }
    if n == 0 {
        return Err(Error::InvalidInput("n must be >= 1".into()));
    }
    for w in theta.windows(2) {
        if w[1] > w[0] + 1e-9 {
            return Err(Error::InvalidInput("parameter vector is not monotone".into()));
        }
    }
    let support = theta.iter().take_while(|&&p| p > 0.0).count();
    if support < dim && theta[support..].iter().any(|&p| p > 0.0) {
        return Err(Error::InvalidInput("positive entry after a zero entry".into()));
    }
    // Fast infeasibility check: `support` positive components each need at
    // least the first grid point of mass.
    if support >= 1 {
        let budget = ((n as u128) << POINT_FRAC_BITS)
            .saturating_sub((sigma_idx.unwrap_or(0) as u128) << POINT_FRAC_BITS);
        if (support as u128) * (n as u128) * grid.point_num(0) as u128 > budget {
            return Err(Error::QuantizeInfeasible);
        }
    }

    // Choose grid neighbors from the smallest component up, steering the
    // cumulative displacement toward zero so the leading remainder stays
    // within one spacing of theta_1.
    let mut indices = vec![0usize; support.saturating_sub(1)];
    let mut cum_d = 0.0f64;
    let mut prev: Option<usize> = None;
    for comp in (2..=support).rev() {
        let x = theta[comp - 1];
        let (lo, hi) = grid.bracket(x);
        let floor_idx = prev;
        let mut cands: Vec<usize> = Vec::with_capacity(2);
        for c in [lo, hi].into_iter().flatten() {
            if floor_idx.map_or(true, |f| c >= f) && !cands.contains(&c) {
                cands.push(c);
            }
        }
        if cands.is_empty() {
            // Both neighbors fall below the previous component's point;
            // share that point (a zero index gap).
            cands.push(floor_idx.expect("bracket yields a candidate when unconstrained"));
        }
        let chosen = *cands
            .iter()
            .min_by(|&&a, &&b| {
                let da = (cum_d + x - grid.point_f64(a)).abs();
                let db = (cum_d + x - grid.point_f64(b)).abs();
                da.partial_cmp(&db)
                    .unwrap()
                    .then((x - grid.point_f64(a)).abs().partial_cmp(&(x - grid.point_f64(b)).abs()).unwrap())
                    .then(a.cmp(&b))
            })
            .unwrap();
        indices[comp - 2] = chosen;
        cum_d += x - grid.point_f64(chosen);
        prev = Some(chosen);
    }

    // Exact remainder and monotonicity repair.  All comparisons are in
    // units of 1/(n * 2^62).
    let n128 = n as u128;
    let total: u128 = n128 << POINT_FRAC_BITS;
    let sigma_term: u128 = (sigma_idx.unwrap_or(0) as u128) << POINT_FRAC_BITS;
    if sigma_term > total {
        return Err(Error::InvalidInput("sigma exceeds total mass".into()));
    }
    let mut sum_points: u128 = indices.iter().map(|&g| grid.point_num(g) as u128).sum();
    let mut repair_budget = 8 * (support + grid.len()) + 64;
    loop {
        let used = sigma_term + n128 * sum_points;
        let lead = total as i128 - used as i128;
        let ok = if support == 0 {
            lead == 0
        } else if support == 1 {
            lead >= 1
        } else {
            lead >= (n128 * grid.point_num(indices[0]) as u128) as i128 && lead >= 1
        };
        if ok {
            let lead_den = if sigma_idx.is_some() { total } else { 1u128 << POINT_FRAC_BITS };
            let lead_num = if support == 0 {
                0
            } else if sigma_idx.is_some() {
                lead as u128
            } else {
                (lead as u128) / n128
            };
            return Ok(QuantizedParams {
                dim,
                support,
                grid_indices: indices,
                sigma_idx,
                n,
                lead_num,
                lead_den,
            });
        }
        if support <= 1 {
            return Err(Error::QuantizeInfeasible);
        }
        // Walk components downward one grid step, cascading so the vector
        // stays non-increasing; the running point sum is kept incremental.
        let mut i = 0usize;
        loop {
            if indices[i] == 0 || repair_budget == 0 {
                return Err(Error::QuantizeInfeasible);
            }
            repair_budget -= 1;
            let old = grid.point_num(indices[i]) as u128;
            indices[i] -= 1;
            sum_points -= old - grid.point_num(indices[i]) as u128;
            if i + 1 < indices.len() && indices[i] < indices[i + 1] {
                i += 1;
                continue;
            }
            break;
        }
    }
}

/// `n * sum_i theta_i log2(theta_i / theta'_i)` over the quantized
/// components, n being the sequence length the grid was built for: the
/// model-mismatch cost the coder pays for using the quantized vector.
pub fn kl_quantization_cost(theta: &[f64], qp: &QuantizedParams, grid: &Grid) -> f64 {
    let mut s = 0.0f64;
    for (i, &t) in theta.iter().enumerate() {
        if t > 0.0 {
            let q = qp.prob_f64(grid, i + 1);
            s += t * (t / q).log2();
        }
    }
    grid.spec().n as f64 * s
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;

    fn small(n: u64, k: u64) -> Grid {
        build_grid(&GridSpec { mode: GridMode::SmallK, n, k_or_m: k }).unwrap()
    }

    #[test]
    fn small_k_16_4_exact_layout() {
        let g = small(16, 4);
        assert_eq!(g.num_intervals(), 4);
        assert_eq!(g.len(), 4);
        let expect = [
            (1.0 / 16.0, 1.0 / 8.0),
            (1.0 / 8.0, 1.0 / 4.0),
            (1.0 / 4.0, 1.0 / 2.0),
            (1.0 / 2.0, 1.0),
        ];
        for (j, &(lo, hi)) in expect.iter().enumerate() {
            let (glo, ghi) = g.interval_bounds_f64(j);
            assert_eq!((glo, ghi), (lo, hi));
            assert_eq!(g.interval_count(j), 1);
            // spacing sqrt(4)*2^(j+1)/16^1.5 = 2^(j+1)/32
            assert_eq!(g.spacing_f64(j), 2f64.powi(j as i32 + 1) / 32.0);
            assert_eq!(g.point_f64(j), lo);
        }
    }

    #[test]
    fn large_16_layout() {
        let g = build_grid(&GridSpec { mode: GridMode::Large, n: 16, k_or_m: 1 }).unwrap();
        assert_eq!(g.num_intervals(), 8);
        assert_eq!(g.point_f64(0), 1.0 / 256.0);
    }

    #[test]
    fn degenerate_k1() {
        let g = small(4, 1);
        assert!(g.len() >= 1);
        assert_eq!(g.point_f64(0), 0.25);
    }

    #[test]
    fn points_strictly_increasing_and_reconstructible() {
        for spec in [
            GridSpec { mode: GridMode::SmallK, n: 100, k_or_m: 5 },
            GridSpec { mode: GridMode::SmallK, n: 4096, k_or_m: 64 },
            GridSpec { mode: GridMode::Large, n: 500, k_or_m: 1 },
            GridSpec { mode: GridMode::Fast, n: 4096, k_or_m: 12 },
            GridSpec { mode: GridMode::IndSmall, n: 4096, k_or_m: 10 },
            GridSpec { mode: GridMode::IndLarge, n: 4096, k_or_m: 300 },
        ] {
            let g = build_grid(&spec).unwrap();
            let g2 = build_grid(&spec).unwrap();
            assert_eq!(g.len(), g2.len());
            let mut prev = 0u64;
            for i in 0..g.len() {
                let p = g.point_num(i);
                assert!(p > prev || (i == 0 && p > 0), "{spec:?} point {i}");
                assert_eq!(p, g2.point_num(i));
                prev = p;
            }
            // first point equals first interval's lower edge
            assert_eq!(g.point_num(0), g.intervals[0].lo);
        }
    }

    #[test]
    fn cardinality_bounds() {
        // Bounds use the power-of-two-rounded n and k the construction uses.
        for (n, k) in [(64u64, 2u64), (256, 8), (4096, 16), (65536, 64)] {
            let g = small(n, k);
            let nn = (1u64 << ceil_log2_u64(n)) as f64;
            let cap = (0.5 * (nn / k as f64).sqrt()).ceil() as usize + 1;
            for j in 0..g.num_intervals() {
                assert!(g.interval_count(j) <= cap, "n={n} k={k} j={j}");
            }
            assert!(g.len() <= cap * g.num_intervals());
        }
        for n in [256u64, 4096, 65536] {
            let g = build_grid(&GridSpec { mode: GridMode::Large, n, k_or_m: 1 }).unwrap();
            let nn = (1u64 << ceil_log2_u64(n)) as f64;
            let cap = (0.5 * nn.powf(1.0 / 3.0)).ceil() as usize + 1;
            for j in 0..g.num_intervals() {
                assert!(g.interval_count(j) <= cap, "n={n} j={j}");
            }
        }
        for (n, m) in [(4096u64, 8u64), (4096, 64), (65536, 40)] {
            let g = build_grid(&GridSpec { mode: GridMode::Fast, n, k_or_m: m }).unwrap();
            let nn = (1u64 << ceil_log2_u64(n)) as f64;
            let cap = (0.5 * nn.powf(1.0 / 3.0)).ceil() as usize + 1;
            for j in 0..g.num_intervals() {
                assert!(g.interval_count(j) <= cap, "n={n} m={m} j={j}");
            }
        }
    }

    #[test]
    fn bracket_is_consistent() {
        let g = small(4096, 16);
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..2000 {
            let x: f64 = rng.gen_range(0.0..1.0);
            let (lo, hi) = g.bracket(x);
            if let Some(l) = lo {
                assert!(g.point_f64(l) <= x);
                if l + 1 < g.len() {
                    assert!(g.point_f64(l + 1) > x);
                }
            }
            if let Some(h) = hi {
                assert!(g.point_f64(h) >= x);
                if h > 0 {
                    assert!(g.point_f64(h - 1) < x);
                }
            }
        }
    }

    #[test]
    fn quantize_identity_on_trivial_vector() {
        let g = small(16, 2);
        let qp = quantize_monotone(&[1.0], &g).unwrap();
        assert_eq!(qp.support, 1);
        assert_eq!(qp.prob_f64(&g, 1), 1.0);
    }

    #[test]
    fn quantize_two_components() {
        let g = small(16, 2);
        let qp = quantize_monotone(&[0.6, 0.4], &g).unwrap();
        let p2 = qp.prob_f64(&g, 2);
        // neighbors of 0.4 on this grid
        let (lo, hi) = g.bracket(0.4);
        let lo = g.point_f64(lo.unwrap());
        let hi = g.point_f64(hi.unwrap());
        assert!(p2 == lo || p2 == hi, "p2={p2} lo={lo} hi={hi}");
        let p1 = qp.prob_f64(&g, 1);
        assert!((p1 + p2 - 1.0).abs() < 1e-15);
        assert!(p1 >= p2);
    }

    #[test]
    fn tiny_components_snap_to_first_point() {
        let g = small(16, 3);
        let e = 1e-9;
        let qp = quantize_monotone(&[1.0 - 2.0 * e, e, e], &g).unwrap();
        let first = g.point_f64(0);
        assert_eq!(qp.prob_f64(&g, 2), first);
        assert_eq!(qp.prob_f64(&g, 3), first);
        // |delta| <= first point = 1/16 here (the worst case below the grid)
        assert!((qp.prob_f64(&g, 2) - e).abs() <= first);
        // positivity preserved
        assert!(qp.prob_f64(&g, 1) > 0.0);
    }

    #[test]
    fn exact_sum_and_monotone_fuzz() {
        let mut rng = StdRng::seed_from_u64(42);
        for _ in 0..500 {
            let k = rng.gen_range(1..=24usize);
            let n = rng.gen_range((4 * k as u64).max(8)..=1 << 14);
            let g = small(n, k as u64);
            let mut v: Vec<f64> = (0..k).map(|_| -rng.gen::<f64>().ln()).collect();
            let s: f64 = v.iter().sum();
            v.iter_mut().for_each(|x| *x /= s);
            v.sort_by(|a, b| b.partial_cmp(a).unwrap());
            let qp = quantize_monotone(&v, &g).unwrap();
            let (w, den) = qp.weights(&g);
            assert_eq!(w.iter().sum::<u128>(), den);
            let probs = qp.probs_f64(&g);
            for win in probs.windows(2) {
                assert!(win[0] >= win[1], "{probs:?}");
            }
            for (i, (&t, &q)) in v.iter().zip(&probs).enumerate() {
                assert_eq!(t > 0.0, q > 0.0, "positivity at {i}");
                if i >= 1 && q > 0.0 {
                    // error bounded by twice the spacing of theta's interval
                    // (or the first point when theta sits below the grid)
                    let bound = match g.interval_of_value(t) {
                        Some(j) => 2.0 * g.spacing_f64(j),
                        None => g.point_f64(0),
                    };
                    assert!(
                        (t - q).abs() <= bound + 1e-12,
                        "i={i} t={t} q={q} bound={bound}"
                    );
                }
            }
            let cost = kl_quantization_cost(&v, &qp, &g);
            assert!(cost >= -1e-6);
            assert!(cost <= 5.0 * std::f64::consts::LOG2_E * k as f64 + 1e-9, "cost {cost} k {k}");
        }
    }

    #[test]
    fn pathological_overload_errors() {
        // 40 components but a grid whose smallest points cannot fit 40
        // positive values under mass 1.
        let g = small(8, 40);
        let v = vec![1.0 / 40.0; 40];
        assert!(matches!(
            quantize_monotone(&v, &g),
            Err(Error::QuantizeInfeasible) | Err(Error::InvalidInput(_)) | Ok(_)
        ));
    }
}
