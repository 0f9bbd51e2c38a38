//! Empirical statistics, maximum likelihood, and the monotone ML estimator.
//!
//! The monotone ML is the likelihood maximizer over non-increasing
//! probability vectors on support `1..=k`.  It is computed by
//! pool-adjacent-violators over the empirical frequencies: pooled blocks get
//! the block-average frequency, and block comparisons use exact integer
//! cross-multiplication so the result is independent of float rounding.
//! Indices with zero counts participate so they can be pooled upward; as a
//! consequence every component up to the largest occurring symbol is
//! positive, and the smallest one is at least `1/(k*n)`.

use crate::{Error, Result};

/// Occurrence statistics of an integer sequence with symbols `>= 1`.
#[derive(Debug, Clone)]
pub struct EmpiricalCounts {
    /// counts[i] is the occurrence count of symbol i+1.
    counts: Vec<u64>,
    n: u64,
}

/// Largest admissible symbol value; the count table is dense over
/// `1..=k_max`.
pub const MAX_SYMBOL: u64 = 1 << 22;

impl EmpiricalCounts {
    pub fn from_sequence(x: &[u64]) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::InvalidInput("empty sequence".into()));
        }
        let mut k_max = 0u64;
        for &s in x {
            if s == 0 {
                return Err(Error::InvalidInput("symbols must be >= 1".into()));
            }
            if s > MAX_SYMBOL {
                return Err(Error::InvalidInput(format!(
                    "symbol {s} exceeds the supported maximum {MAX_SYMBOL}"
                )));
            }
            k_max = k_max.max(s);
        }
        let mut counts = vec![0u64; k_max as usize];
        for &s in x {
            counts[(s - 1) as usize] += 1;
        }
        Ok(Self { counts, n: x.len() as u64 })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Largest occurring symbol.
    pub fn k_max(&self) -> u64 {
        self.counts.len() as u64
    }

    /// Occurrence count of symbol `i` (1-based); 0 beyond the support.
    pub fn count(&self, i: u64) -> u64 {
        if i == 0 || i > self.k_max() {
            0
        } else {
            self.counts[(i - 1) as usize]
        }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Total occurrences of symbols greater than `m`.
    pub fn tail_count(&self, m: u64) -> u64 {
        self.counts.iter().skip(m as usize).sum()
    }

    /// Number of distinct symbols greater than `m` that occur.
    pub fn distinct_tail(&self, m: u64) -> u64 {
        self.counts.iter().skip(m as usize).filter(|&&c| c > 0).count() as u64
    }

    /// Distinct occurring symbols `> m` in increasing order with counts.
    pub fn tail_symbols(&self, m: u64) -> Vec<(u64, u64)> {
        self.counts
            .iter()
            .enumerate()
            .skip(m as usize)
            .filter(|(_, &c)| c > 0)
            .map(|(idx, &c)| (idx as u64 + 1, c))
            .collect()
    }
}

/// Plain ML estimate `n_x(i)/n` over support `1..=k_max`; not necessarily
/// monotone.
pub fn ml_estimate(c: &EmpiricalCounts) -> Vec<f64> {
    let n = c.n as f64;
    c.counts.iter().map(|&v| v as f64 / n).collect()
}

/// Non-increasing probability vector stored as pooled blocks.
///
/// Block `b` covers `len_b` consecutive symbols, each with exact probability
/// `count_sum_b / (n * len_b)`; the block sums therefore add to exactly
/// `mass_num / n` with no rounding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotoneParamVector {
    /// (sum of counts in block, number of symbols in block)
    blocks: Vec<(u64, u32)>,
    n: u64,
}

impl MonotoneParamVector {
    /// Number of components.
    pub fn len(&self) -> usize {
        self.blocks.iter().map(|&(_, l)| l as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Numerator of the exact total mass over denominator `n`.
    pub fn mass_num(&self) -> u64 {
        self.blocks.iter().map(|&(c, _)| c).sum()
    }

    /// Component probabilities as floats.
    pub fn probs(&self) -> Vec<f64> {
        let n = self.n as f64;
        let mut out = Vec::with_capacity(self.len());
        for &(c, l) in &self.blocks {
            let p = c as f64 / (n * l as f64);
            out.extend(std::iter::repeat(p).take(l as usize));
        }
        out
    }

    /// Exact component `i` (0-based) as `(numerator, denominator)`.
    pub fn frac(&self, i: usize) -> (u64, u64) {
        let mut pos = 0usize;
        for &(c, l) in &self.blocks {
            pos += l as usize;
            if i < pos {
                return (c, self.n * u64::from(l));
            }
        }
        panic!("component {i} out of range");
    }

    /// First `m` component probabilities, without materializing the rest.
    pub fn probs_prefix(&self, m: usize) -> Vec<f64> {
        let n = self.n as f64;
        let mut out = Vec::with_capacity(m);
        for &(c, l) in &self.blocks {
            if out.len() >= m {
                break;
            }
            let p = c as f64 / (n * l as f64);
            let take = (m - out.len()).min(l as usize);
            out.extend(std::iter::repeat(p).take(take));
        }
        out.resize(m, 0.0);
        out
    }

    /// Total mass of the first `m` components.
    pub fn mass_prefix_f64(&self, m: usize) -> f64 {
        let n = self.n as f64;
        let mut left = m;
        let mut mass = 0.0;
        for &(c, l) in &self.blocks {
            if left == 0 {
                break;
            }
            let take = left.min(l as usize);
            mass += c as f64 * take as f64 / (n * l as f64);
            left -= take;
        }
        mass
    }

    pub fn blocks(&self) -> &[(u64, u32)] {
        &self.blocks
    }
}

/// Monotone ML over support `1..=k_max`.
pub fn monotone_ml(c: &EmpiricalCounts) -> Result<MonotoneParamVector> {
    monotone_ml_k(c, c.k_max() as usize)
}

/// Monotone ML over support `1..=k`, padding with zero counts when
/// `k > k_max`.
pub fn monotone_ml_k(c: &EmpiricalCounts, k: usize) -> Result<MonotoneParamVector> {
    if k == 0 {
        return Err(Error::InvalidInput("support size must be >= 1".into()));
    }
    if k < c.counts.len() {
        return Err(Error::InvalidInput(format!(
            "support {k} smaller than the largest occurring symbol {}",
            c.counts.len()
        )));
    }
    let mut padded;
    let counts = if k == c.counts.len() {
        &c.counts[..]
    } else {
        padded = c.counts.clone();
        padded.resize(k, 0);
        &padded[..]
    };
    Ok(MonotoneParamVector { blocks: pava_decreasing(counts), n: c.n })
}

/// Monotone ML of the head counts `1..=m` alone; total mass is the head
/// mass `sum(counts)/n`.  Used by the clustered codecs, where the tail mass
/// is carried by a separate parameter.
pub fn monotone_ml_head(c: &EmpiricalCounts, m: usize) -> MonotoneParamVector {
    let mut counts: Vec<u64> = c.counts.iter().copied().take(m).collect();
    counts.resize(m, 0);
    MonotoneParamVector { blocks: pava_decreasing(&counts), n: c.n }
}

/// Pool-adjacent-violators for a non-increasing fit to `counts/n`.
///
/// Returns pooled blocks left to right.  Violations are compared exactly:
/// block means `c_a/l_a >= c_b/l_b` iff `c_a*l_b >= c_b*l_a`.
fn pava_decreasing(counts: &[u64]) -> Vec<(u64, u32)> {
    let mut blocks: Vec<(u64, u32)> = Vec::with_capacity(counts.len());
    for &c in counts {
        blocks.push((c, 1));
        // Merge while the last block's mean exceeds its predecessor's.
        while blocks.len() >= 2 {
            let (cb, lb) = blocks[blocks.len() - 1];
            let (ca, la) = blocks[blocks.len() - 2];
            // predecessor mean < successor mean => violation
            if (ca as u128) * (lb as u128) < (cb as u128) * (la as u128) {
                blocks.pop();
                let last = blocks.last_mut().unwrap();
                *last = (ca + cb, la + lb);
            } else {
                break;
            }
        }
    }
    blocks
}

/// `-sum_t log2 theta[x_t - 1]`; infinite when some symbol has zero
/// probability (the explicit "cannot be coded under this model" signal).
pub fn description_length(x: &[u64], theta: &[f64]) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for &s in x {
        let p = if s >= 1 && (s as usize) <= theta.len() { theta[(s - 1) as usize] } else { 0.0 };
        if p <= 0.0 {
            return f64::INFINITY;
        }
        let term = -p.log2();
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Shannon entropy in bits per symbol, with `0 log 0 = 0`.
pub fn entropy(theta: &[f64]) -> f64 {
    let mut h = 0.0;
    for &p in theta {
        if p > 0.0 {
            h -= p * p.log2();
        }
    }
    h
}
