//! The complete compressors/decompressors and the configuration search.
//!
//! Container layout, bit exact:
//!
//! ```text
//! magic "MONO1" | version 0x01 | delta(n) | 2-bit mode | mode fields
//!   | parameter description | delta(payload_bit_count) | payload | zero pad
//! ```
//!
//! Mode fields:
//! - `SmallK` (00): `delta(k_hat)`, support-1 in `ceil_log2(k_hat)` bits.
//! - `Large` (01): none (the support is recovered from the parameter
//!   counts).
//! - `Fast` (10): `delta(m)`, sigma index in `ceil_log2(n+1)` bits,
//!   distinct-tail count in `ceil_log2(n+1)` bits, then the tail list: per
//!   occurring symbol `i > m` in increasing order, `gamma(i)` and its count
//!   minus one in `ceil_log2(n)` bits.
//! - `Individual` (11): one flag bit; `1` = monotone-model branch laid out
//!   like `Fast` (on the per-sequence grids), `0` = plain type code:
//!   `delta(#distinct)`, then per occurring symbol `gamma(i)` and count-1.
//!
//! The payload is one arithmetic-coded stream.  Clustered modes code the
//! whole sequence over `{1..m, TAIL}` first, then the tail occurrences
//! under their empirical in-tail distribution; both tables are static and
//! known to the decoder before the payload starts.

use crate::bitio::{ceil_log2, BitReader, BitWriter};
use crate::entropy::{ideal_code_length, ArithmeticDecoder, ArithmeticEncoder, FrequencyTable};
use crate::estimators::{
    monotone_ml, monotone_ml_head, monotone_ml_k, EmpiricalCounts, MAX_SYMBOL,
};
use crate::grids::{
    build_grid, quantize_monotone, quantize_monotone_clustered, Grid, GridMode, GridSpec,
    QuantizedParams,
};
use crate::param_codec::{
    decode_params_counts, decode_params_differential, encode_params_counts,
    encode_params_differential,
};
use crate::{Error, Result};

pub const MAGIC: [u8; 5] = *b"MONO1";
pub const VERSION: u8 = 1;

/// Longest sequence the container accepts (the plain type code needs the
/// length to fit a coding-table total).
pub const MAX_N: u64 = 1 << 30;

const TABLE_TOTAL: u64 = 1 << 30;

/// Codec family, in tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    SmallK,
    Large,
    Fast,
    Individual,
}

impl Mode {
    fn bits(self) -> u64 {
        match self {
            Mode::SmallK => 0,
            Mode::Large => 1,
            Mode::Fast => 2,
            Mode::Individual => 3,
        }
    }

    fn from_bits(b: u64) -> Self {
        match b {
            0 => Mode::SmallK,
            1 => Mode::Large,
            2 => Mode::Fast,
            _ => Mode::Individual,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Mode::SmallK => "small",
            Mode::Large => "large",
            Mode::Fast => "fast",
            Mode::Individual => "individual",
        }
    }
}

/// A resolved encoding configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodecConfig {
    pub mode: Mode,
    pub n: u64,
    /// Model alphabet size for `SmallK`.
    pub k_hat: Option<u64>,
    /// Effective alphabet size for `Fast`.
    pub m: Option<u64>,
}

/// Size accounting for one encode.
#[derive(Debug, Clone)]
pub struct EncodeStats {
    pub mode: Mode,
    pub n: u64,
    pub k_hat: Option<u64>,
    pub m: Option<u64>,
    /// `Individual` only: true when the monotone branch won the flag bit.
    pub monotone_branch: Option<bool>,
    /// Exact container length in bits, padding excluded.
    pub total_bits: usize,
    /// Container length in bytes (with the zero padding).
    pub total_bytes: usize,
    /// Arithmetic-coded payload length in bits, as recorded in the header.
    pub payload_bits: usize,
    /// `-log2 P(x | model)` under the coding tables actually used.
    pub ideal_payload_bits: f64,
    /// Named bit spans, summing to `total_bits`.
    pub breakdown: Vec<(&'static str, usize)>,
}

impl EncodeStats {
    pub fn overhead_bits(&self) -> usize {
        self.total_bits - self.payload_bits
    }
}

// ---------------------------------------------------------------------
// Coding tables from exact weights
// ---------------------------------------------------------------------

/// Apportion exact rational weights `w/den` into integer frequencies with
/// total 2^30 by largest remainder, then bump zero frequencies of positive
/// weights.  Deterministic, so both sides derive identical tables from the
/// decoded parameters.
fn table_from_weights(weights: &[u128], den: u128) -> Result<FrequencyTable> {
    debug_assert_eq!(weights.iter().sum::<u128>(), den);
    let t = TABLE_TOTAL as u128;
    let mut freqs: Vec<u64> = Vec::with_capacity(weights.len());
    let mut rems: Vec<(u128, usize)> = Vec::new();
    let mut assigned: u128 = 0;
    for (i, &w) in weights.iter().enumerate() {
        let prod = w * t;
        let f = prod / den;
        let rem = prod % den;
        freqs.push(f as u64);
        assigned += f;
        if rem > 0 {
            rems.push((rem, i));
        }
    }
    let deficit = (t - assigned) as usize;
    if deficit > 0 && !rems.is_empty() {
        // Only the `deficit` largest remainders matter; the comparator is a
        // total order, so selection is deterministic.
        let cut = deficit.min(rems.len());
        rems.select_nth_unstable_by(cut - 1, |a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        for &(_, i) in rems.iter().take(cut) {
            freqs[i] += 1;
        }
    }
    // Positive weights must stay codable: give every starved one a unit,
    // paid for by the largest frequencies.
    let needy: Vec<usize> =
        (0..freqs.len()).filter(|&i| weights[i] > 0 && freqs[i] == 0).collect();
    if !needy.is_empty() {
        let mut need = needy.len() as u64;
        let mut donors: Vec<usize> = (0..freqs.len()).filter(|&i| freqs[i] >= 2).collect();
        donors.sort_unstable_by(|&a, &b| freqs[b].cmp(&freqs[a]).then(a.cmp(&b)));
        for &d in &donors {
            if need == 0 {
                break;
            }
            let give = (freqs[d] - 1).min(need);
            freqs[d] -= give;
            need -= give;
        }
        if need > 0 {
            return Err(Error::InvalidInput(
                "too many distinct parameters for the coding-table resolution".into(),
            ));
        }
        for &i in &needy {
            freqs[i] = 1;
        }
    }
    FrequencyTable::from_freqs(&freqs)
}

fn table_from_counts(counts: &[u64]) -> Result<FrequencyTable> {
    FrequencyTable::from_freqs(counts)
}

// ---------------------------------------------------------------------
// Shared container pieces
// ---------------------------------------------------------------------

fn sigma_field_width(n: u64) -> u32 {
    ceil_log2(n + 1)
}

fn count_field_width(n: u64) -> u32 {
    ceil_log2(n.max(1))
}

fn write_header(w: &mut BitWriter, n: u64, mode: Mode) -> Result<()> {
    for &b in MAGIC.iter() {
        w.write_fixed(u64::from(b), 8)?;
    }
    w.write_fixed(u64::from(VERSION), 8)?;
    w.write_elias_delta(n)?;
    w.write_fixed(mode.bits(), 2)?;
    Ok(())
}

fn write_tail_list(w: &mut BitWriter, tail: &[(u64, u64)], n: u64) -> Result<usize> {
    let before = w.bit_len();
    let width = count_field_width(n);
    for &(sym, cnt) in tail {
        w.write_elias_gamma(sym)?;
        w.write_fixed(cnt - 1, width)?;
    }
    Ok(w.bit_len() - before)
}

fn read_tail_list(r: &mut BitReader, c: u64, m: u64, n: u64) -> Result<Vec<(u64, u64)>> {
    let width = count_field_width(n);
    let mut tail = Vec::with_capacity(c as usize);
    let mut prev = m;
    let mut total = 0u64;
    for _ in 0..c {
        let sym = r.read_elias_gamma()?;
        if sym <= prev {
            return Err(Error::Corrupt("tail symbols not increasing".into()));
        }
        let cnt = r.read_fixed(width)? + 1;
        total += cnt;
        if total > n {
            return Err(Error::Corrupt("tail counts exceed n".into()));
        }
        tail.push((sym, cnt));
        prev = sym;
    }
    Ok(tail)
}

/// Accumulates a container and its bit-span accounting.
struct ContainerBuilder {
    w: BitWriter,
    breakdown: Vec<(&'static str, usize)>,
    mark: usize,
}

impl ContainerBuilder {
    fn new(n: u64, mode: Mode) -> Result<Self> {
        let mut w = BitWriter::new();
        write_header(&mut w, n, mode)?;
        let len = w.bit_len();
        Ok(Self { w, breakdown: vec![("header", len)], mark: len })
    }

    fn note(&mut self, name: &'static str) {
        let len = self.w.bit_len();
        if len > self.mark {
            self.breakdown.push((name, len - self.mark));
        }
        self.mark = len;
    }

    fn finish(
        mut self,
        payload: BitWriter,
        ideal_payload_bits: f64,
        mode: Mode,
        n: u64,
    ) -> Result<(Vec<u8>, EncodeStats)> {
        let payload_bits = payload.bit_len();
        self.w.write_elias_delta(payload_bits as u64)?;
        self.note("payload-length");
        self.w.append(&payload);
        self.note("payload");
        let total_bits = self.w.bit_len();
        let (bytes, _) = self.w.finish();
        let total_bytes = bytes.len();
        Ok((
            bytes,
            EncodeStats {
                mode,
                n,
                k_hat: None,
                m: None,
                monotone_branch: None,
                total_bits,
                total_bytes,
                payload_bits,
                ideal_payload_bits,
                breakdown: self.breakdown,
            },
        ))
    }
}

// ---------------------------------------------------------------------
// SmallK
// ---------------------------------------------------------------------

/// Bounded-alphabet codec: all symbols must be `<= k_hat`.
pub fn encode_small(x: &[u64], k_hat: u64) -> Result<(Vec<u8>, EncodeStats)> {
    let counts = EmpiricalCounts::from_sequence(x)?;
    encode_small_with_counts(x, &counts, k_hat)
}

fn encode_small_with_counts(
    x: &[u64],
    counts: &EmpiricalCounts,
    k_hat: u64,
) -> Result<(Vec<u8>, EncodeStats)> {
    let n = counts.n();
    check_n(n)?;
    if k_hat < counts.k_max() {
        return Err(Error::InvalidInput(format!(
            "k_hat {k_hat} below the largest occurring symbol {}",
            counts.k_max()
        )));
    }
    if k_hat > MAX_SYMBOL {
        return Err(Error::InvalidInput("k_hat above the supported maximum".into()));
    }
    let theta = monotone_ml_k(counts, k_hat as usize)?.probs();
    let grid = build_grid(&GridSpec { mode: GridMode::SmallK, n, k_or_m: k_hat })?;
    let qp = quantize_monotone(&theta, &grid)?;
    let (weights, den) = qp.weights(&grid);
    let table = table_from_weights(&weights, den)?;

    let mut cb = ContainerBuilder::new(n, Mode::SmallK)?;
    cb.w.write_elias_delta(k_hat)?;
    cb.note("k-hat");
    cb.w.write_fixed(qp.support as u64 - 1, ceil_log2(k_hat))?;
    cb.note("support");
    encode_params_differential(&qp, &grid, &mut cb.w)?;
    cb.note("params");

    let symbols: Vec<usize> = x.iter().map(|&s| (s - 1) as usize).collect();
    let payload = crate::entropy::ac_encode(&symbols, &table)?;
    let ideal = ideal_code_length(&symbols, &table)?;
    let (bytes, mut stats) = cb.finish(payload, ideal, Mode::SmallK, n)?;
    stats.k_hat = Some(k_hat);
    Ok((bytes, stats))
}

fn decode_small(r: &mut BitReader, n: u64) -> Result<Vec<u64>> {
    let k_hat = r.read_elias_delta()?;
    if k_hat == 0 || k_hat > MAX_SYMBOL {
        return Err(Error::Corrupt("bad k_hat".into()));
    }
    let support = r.read_fixed(ceil_log2(k_hat))? + 1;
    if support > k_hat {
        return Err(Error::Corrupt("support exceeds k_hat".into()));
    }
    let grid = build_grid(&GridSpec { mode: GridMode::SmallK, n, k_or_m: k_hat })?;
    let qp = decode_params_differential(r, &grid, k_hat as usize, support as usize, None, n)?;
    let (weights, den) = qp.weights(&grid);
    let table = table_from_weights(&weights, den)?;
    let payload_bits = r.read_elias_delta()? as usize;
    let payload = r.fork_window(payload_bits)?;
    let mut dec = ArithmeticDecoder::new(payload);
    let mut out = Vec::with_capacity(n as usize);
    for _ in 0..n {
        out.push(dec.decode_symbol(&table)? as u64 + 1);
    }
    Ok(out)
}

// ---------------------------------------------------------------------
// Large
// ---------------------------------------------------------------------

/// Large-alphabet codec: counts-per-grid-point parameter description over
/// the 1/n^2 grid.
pub fn encode_large(x: &[u64]) -> Result<(Vec<u8>, EncodeStats)> {
    let counts = EmpiricalCounts::from_sequence(x)?;
    encode_large_with_counts(x, &counts)
}

fn encode_large_with_counts(
    x: &[u64],
    counts: &EmpiricalCounts,
) -> Result<(Vec<u8>, EncodeStats)> {
    let n = counts.n();
    check_n(n)?;
    let k_max = counts.k_max();
    let theta = monotone_ml(counts)?.probs();
    let grid = build_grid(&GridSpec { mode: GridMode::Large, n, k_or_m: 1 })?;
    let qp = quantize_monotone(&theta, &grid)?;
    let (weights, den) = qp.weights(&grid);
    let table = table_from_weights(&weights, den)?;

    let mut cb = ContainerBuilder::new(n, Mode::Large)?;
    encode_params_counts(&qp, &grid, &mut cb.w)?;
    cb.note("params");

    let symbols: Vec<usize> = x.iter().map(|&s| (s - 1) as usize).collect();
    let payload = crate::entropy::ac_encode(&symbols, &table)?;
    let ideal = ideal_code_length(&symbols, &table)?;
    let (bytes, mut stats) = cb.finish(payload, ideal, Mode::Large, n)?;
    stats.k_hat = Some(k_max);
    Ok((bytes, stats))
}

fn decode_large(r: &mut BitReader, n: u64) -> Result<Vec<u64>> {
    let grid = build_grid(&GridSpec { mode: GridMode::Large, n, k_or_m: 1 })?;
    let qp = decode_params_counts(r, &grid, None, None, n)?;
    if qp.dim as u64 > MAX_SYMBOL {
        return Err(Error::Corrupt("alphabet above the supported maximum".into()));
    }
    let (weights, den) = qp.weights(&grid);
    let table = table_from_weights(&weights, den)?;
    let payload_bits = r.read_elias_delta()? as usize;
    let payload = r.fork_window(payload_bits)?;
    let mut dec = ArithmeticDecoder::new(payload);
    let mut out = Vec::with_capacity(n as usize);
    for _ in 0..n {
        out.push(dec.decode_symbol(&table)? as u64 + 1);
    }
    Ok(out)
}

// ---------------------------------------------------------------------
// Clustered payload (shared by Fast and the Individual monotone branch)
// ---------------------------------------------------------------------

/// Pick the transmitted tail share: the desired value (the exact or
/// estimated tail mass), lowered when the head's positive components would
/// not fit beside it on the grid.  Every positive component costs at least
/// the first grid point, so capping sigma at what that leaves guarantees
/// the quantizer a feasible outcome; a lowered sigma only costs payload
/// bits on tail occurrences, never losslessness.
fn clamp_sigma(desired: u64, head_support: usize, c: u64, n: u64, grid: &Grid) -> Result<u64> {
    if head_support == 0 {
        // All mass is clustered; sigma must carry everything.
        return Ok(n);
    }
    if c == 0 {
        return Ok(0);
    }
    let total = (n as u128) << crate::grids::POINT_FRAC_BITS;
    let commit = (head_support as u128 + 1) * (n as u128) * grid.point_num(0) as u128;
    if commit >= total {
        return Err(Error::QuantizeInfeasible);
    }
    let sigma_max = ((total - commit) >> crate::grids::POINT_FRAC_BITS) as u64;
    if sigma_max == 0 {
        return Err(Error::QuantizeInfeasible);
    }
    Ok(desired.clamp(1, sigma_max.min(n)))
}

/// Quantize a clustered head with the sigma policy above; the stepwise
/// fallback only runs if the conservative cap was still too generous.
fn quantize_with_sigma(
    head: &[f64],
    desired_sigma: u64,
    c: u64,
    n: u64,
    grid: &Grid,
) -> Result<(u64, QuantizedParams)> {
    let head_support = head.iter().take_while(|&&p| p > 0.0).count();
    let mut sigma_idx = clamp_sigma(desired_sigma, head_support, c, n, grid)?;
    loop {
        match quantize_monotone_clustered(head, Some(sigma_idx), n, grid) {
            Ok(qp) => return Ok((sigma_idx, qp)),
            Err(Error::QuantizeInfeasible) if c > 0 && sigma_idx > 1 => {
                sigma_idx = (sigma_idx / 2).max(1);
            }
            Err(e) => return Err(e),
        }
    }
}

fn encode_clustered_payload(
    x: &[u64],
    m: u64,
    qp: &QuantizedParams,
    grid: &Grid,
    tail: &[(u64, u64)],
) -> Result<(BitWriter, f64)> {
    let (weights, den) = qp.weights(grid);
    let table1 = table_from_weights(&weights, den)?;
    debug_assert_eq!(table1.len(), qp.dim + 1);
    let tail_counts: Vec<u64> = tail.iter().map(|&(_, c)| c).collect();
    let table2 = if tail.is_empty() { None } else { Some(table_from_counts(&tail_counts)?) };

    let pass1: Vec<usize> = x
        .iter()
        .map(|&s| if s <= m { (s - 1) as usize } else { m as usize })
        .collect();
    let pass2: Vec<usize> = x
        .iter()
        .filter(|&&s| s > m)
        .map(|&s| tail.binary_search_by_key(&s, |&(sym, _)| sym).expect("tail symbol listed"))
        .collect();

    let mut enc = ArithmeticEncoder::new();
    for &i in &pass1 {
        enc.encode_symbol(&table1, i)?;
    }
    if let Some(t2) = &table2 {
        for &i in &pass2 {
            enc.encode_symbol(t2, i)?;
        }
    }
    let mut ideal = ideal_code_length(&pass1, &table1)?;
    if let Some(t2) = &table2 {
        ideal += ideal_code_length(&pass2, t2)?;
    }
    Ok((enc.finish(), ideal))
}

fn decode_clustered_payload(
    payload: BitReader,
    n: u64,
    m: u64,
    qp: &QuantizedParams,
    grid: &Grid,
    tail: &[(u64, u64)],
) -> Result<Vec<u64>> {
    let (weights, den) = qp.weights(grid);
    let table1 = table_from_weights(&weights, den)?;
    let tail_counts: Vec<u64> = tail.iter().map(|&(_, c)| c).collect();
    let tail_total: u64 = tail_counts.iter().sum();
    let table2 = if tail.is_empty() { None } else { Some(table_from_counts(&tail_counts)?) };

    let mut dec = ArithmeticDecoder::new(payload);
    let mut pass1 = Vec::with_capacity(n as usize);
    let mut tails_seen = 0u64;
    for _ in 0..n {
        let s = dec.decode_symbol(&table1)?;
        if s == m as usize {
            tails_seen += 1;
        }
        pass1.push(s);
    }
    if tails_seen != tail_total {
        return Err(Error::Corrupt(format!(
            "clustered-symbol count {tails_seen} disagrees with the tail list total {tail_total}"
        )));
    }
    let mut out = Vec::with_capacity(n as usize);
    if let Some(t2) = &table2 {
        let mut tail_syms = Vec::with_capacity(tail_total as usize);
        for _ in 0..tail_total {
            tail_syms.push(tail[dec.decode_symbol(t2)?].0);
        }
        let mut it = tail_syms.into_iter();
        for s in pass1 {
            if s == m as usize {
                out.push(it.next().expect("counted above"));
            } else {
                out.push(s as u64 + 1);
            }
        }
    } else {
        for s in pass1 {
            out.push(s as u64 + 1);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------
// Fast
// ---------------------------------------------------------------------

fn fast_uses_differential(m: u64, n: u64) -> bool {
    (m as u128).pow(3) <= n as u128
}

/// Effective-alphabet codec with tail clustering.
pub fn encode_fast(x: &[u64], m: u64) -> Result<(Vec<u8>, EncodeStats)> {
    let counts = EmpiricalCounts::from_sequence(x)?;
    encode_fast_with_counts(x, &counts, m)
}

fn encode_fast_with_counts(
    x: &[u64],
    counts: &EmpiricalCounts,
    m: u64,
) -> Result<(Vec<u8>, EncodeStats)> {
    let n = counts.n();
    check_n(n)?;
    if m < 2 {
        return Err(Error::InvalidInput("effective alphabet m must be >= 2".into()));
    }
    if m > MAX_SYMBOL {
        return Err(Error::InvalidInput("m above the supported maximum".into()));
    }
    let tail = counts.tail_symbols(m);
    let n_tail = counts.tail_count(m);
    let c = tail.len() as u64;
    let head = monotone_ml_head(counts, m as usize).probs();
    let grid = build_grid(&GridSpec { mode: GridMode::Fast, n, k_or_m: m })?;
    // sigma starts at the exact clustered mass n_tail / n and is lowered
    // when the grid's minimum point leaves the head components no room.
    let (sigma_idx, qp) = quantize_with_sigma(&head, n_tail, c, n, &grid)?;

    let mut cb = ContainerBuilder::new(n, Mode::Fast)?;
    cb.w.write_elias_delta(m)?;
    cb.note("m");
    cb.w.write_fixed(sigma_idx, sigma_field_width(n))?;
    cb.note("sigma");
    cb.w.write_fixed(c, sigma_field_width(n))?;
    cb.note("tail-count");
    write_tail_list(&mut cb.w, &tail, n)?;
    cb.note("tail-list");
    if fast_uses_differential(m, n) {
        cb.w.write_elias_delta(qp.support as u64 + 1)?;
        encode_params_differential(&qp, &grid, &mut cb.w)?;
    } else {
        encode_params_counts(&qp, &grid, &mut cb.w)?;
    }
    cb.note("params");

    let (payload, ideal) = encode_clustered_payload(x, m, &qp, &grid, &tail)?;
    let (bytes, mut stats) = cb.finish(payload, ideal, Mode::Fast, n)?;
    stats.m = Some(m);
    Ok((bytes, stats))
}

fn decode_fast(r: &mut BitReader, n: u64) -> Result<Vec<u64>> {
    let m = r.read_elias_delta()?;
    if m < 2 || m > MAX_SYMBOL {
        return Err(Error::Corrupt("bad effective alphabet size".into()));
    }
    let sigma_idx = r.read_fixed(sigma_field_width(n))?;
    if sigma_idx > n {
        return Err(Error::Corrupt("sigma index out of range".into()));
    }
    let c = r.read_fixed(sigma_field_width(n))?;
    if c > n {
        return Err(Error::Corrupt("distinct-tail count exceeds n".into()));
    }
    let tail = read_tail_list(r, c, m, n)?;
    if c > 0 && sigma_idx == 0 {
        return Err(Error::Corrupt("tail symbols present but sigma is zero".into()));
    }
    let grid = build_grid(&GridSpec { mode: GridMode::Fast, n, k_or_m: m })?;
    let qp = if fast_uses_differential(m, n) {
        let support = r.read_elias_delta()? - 1;
        if support > m {
            return Err(Error::Corrupt("support exceeds m".into()));
        }
        decode_params_differential(r, &grid, m as usize, support as usize, Some((sigma_idx, n)), n)?
    } else {
        decode_params_counts(r, &grid, Some(m as usize), Some((sigma_idx, n)), n)?
    };
    let payload_bits = r.read_elias_delta()? as usize;
    let payload = r.fork_window(payload_bits)?;
    decode_clustered_payload(payload, n, m, &qp, &grid, &tail)
}

// ---------------------------------------------------------------------
// Individual
// ---------------------------------------------------------------------

fn ind_uses_small_grid(m: u64, n: u64) -> bool {
    (m as u128) * (m as u128) <= n as u128
}

/// Per-sequence codec: one flag bit selects between a monotone-ML model
/// (clustered, on per-sequence grids) and a plain type code, whichever is
/// shorter for this exact sequence.
pub fn encode_individual(x: &[u64]) -> Result<(Vec<u8>, EncodeStats)> {
    let counts = EmpiricalCounts::from_sequence(x)?;
    encode_individual_with_counts(x, &counts)
}

fn encode_individual_with_counts(
    x: &[u64],
    counts: &EmpiricalCounts,
) -> Result<(Vec<u8>, EncodeStats)> {
    let n = counts.n();
    check_n(n)?;
    let mut best: Option<(Vec<u8>, EncodeStats)> = None;
    let mut consider = |cand: Result<(Vec<u8>, EncodeStats)>| {
        if let Ok(c) = cand {
            if best.as_ref().map_or(true, |b| c.1.total_bits < b.1.total_bits) {
                best = Some(c);
            }
        }
    };

    consider(encode_individual_plain(x, counts));
    let k_max = counts.k_max();
    let full = monotone_ml(counts)?;
    let mut m_list: Vec<u64> = Vec::new();
    let mut p = 2u64;
    while p < k_max {
        m_list.push(p);
        p *= 2;
    }
    m_list.push(k_max.max(2));
    m_list.dedup();
    for m in m_list {
        consider(encode_individual_mono(x, counts, &full, m));
    }
    best.ok_or_else(|| Error::InvalidInput("no feasible individual encoding".into()))
}

fn encode_individual_plain(
    x: &[u64],
    counts: &EmpiricalCounts,
) -> Result<(Vec<u8>, EncodeStats)> {
    let n = counts.n();
    let distinct: Vec<(u64, u64)> = counts.tail_symbols(0);
    let mut cb = ContainerBuilder::new(n, Mode::Individual)?;
    cb.w.write_bit(false);
    cb.note("flag");
    cb.w.write_elias_delta(distinct.len() as u64)?;
    cb.note("type-size");
    write_tail_list(&mut cb.w, &distinct, n)?;
    cb.note("type-list");

    let freqs: Vec<u64> = distinct.iter().map(|&(_, c)| c).collect();
    let table = table_from_counts(&freqs)?;
    let symbols: Vec<usize> = x
        .iter()
        .map(|&s| distinct.binary_search_by_key(&s, |&(sym, _)| sym).expect("listed"))
        .collect();
    let payload = crate::entropy::ac_encode(&symbols, &table)?;
    let ideal = ideal_code_length(&symbols, &table)?;
    let (bytes, mut stats) = cb.finish(payload, ideal, Mode::Individual, n)?;
    stats.monotone_branch = Some(false);
    Ok((bytes, stats))
}

fn encode_individual_mono(
    x: &[u64],
    counts: &EmpiricalCounts,
    full: &crate::estimators::MonotoneParamVector,
    m: u64,
) -> Result<(Vec<u8>, EncodeStats)> {
    let n = counts.n();
    if m < 2 || m > MAX_SYMBOL {
        return Err(Error::InvalidInput("bad effective alphabet for the monotone branch".into()));
    }
    let tail = counts.tail_symbols(m);
    let c = tail.len() as u64;
    let head = full.probs_prefix(m as usize);
    // Tail mass of the monotone ML, quantized to the 1/n grid; forced off
    // zero while tail symbols exist, zero when none do, and lowered if the
    // head does not fit beside it.
    let sigma = (1.0 - full.mass_prefix_f64(m as usize)).max(0.0);
    let sigma_start = if c > 0 {
        ((sigma * n as f64).round() as u64).clamp(1, (n - 1).max(1))
    } else {
        0
    };
    let grid_mode = if ind_uses_small_grid(m, n) { GridMode::IndSmall } else { GridMode::IndLarge };
    let grid = build_grid(&GridSpec { mode: grid_mode, n, k_or_m: m })?;
    let (sigma_idx, qp) = quantize_with_sigma(&head, sigma_start, c, n, &grid)?;

    let mut cb = ContainerBuilder::new(n, Mode::Individual)?;
    cb.w.write_bit(true);
    cb.note("flag");
    cb.w.write_elias_delta(m)?;
    cb.note("m");
    cb.w.write_fixed(sigma_idx, sigma_field_width(n))?;
    cb.note("sigma");
    cb.w.write_fixed(c, sigma_field_width(n))?;
    cb.note("tail-count");
    write_tail_list(&mut cb.w, &tail, n)?;
    cb.note("tail-list");
    if grid_mode == GridMode::IndSmall {
        cb.w.write_elias_delta(qp.support as u64 + 1)?;
        encode_params_differential(&qp, &grid, &mut cb.w)?;
    } else {
        encode_params_counts(&qp, &grid, &mut cb.w)?;
    }
    cb.note("params");

    let (payload, ideal) = encode_clustered_payload(x, m, &qp, &grid, &tail)?;
    let (bytes, mut stats) = cb.finish(payload, ideal, Mode::Individual, n)?;
    stats.m = Some(m);
    stats.monotone_branch = Some(true);
    Ok((bytes, stats))
}

fn decode_individual(r: &mut BitReader, n: u64) -> Result<Vec<u64>> {
    let monotone = r.read_bit()?;
    if monotone {
        let m = r.read_elias_delta()?;
        if m < 2 || m > MAX_SYMBOL {
            return Err(Error::Corrupt("bad effective alphabet size".into()));
        }
        let sigma_idx = r.read_fixed(sigma_field_width(n))?;
        if sigma_idx > n {
            return Err(Error::Corrupt("sigma index out of range".into()));
        }
        let c = r.read_fixed(sigma_field_width(n))?;
        if c > n {
            return Err(Error::Corrupt("distinct-tail count exceeds n".into()));
        }
        let tail = read_tail_list(r, c, m, n)?;
        if c > 0 && sigma_idx == 0 {
            return Err(Error::Corrupt("tail symbols present but sigma is zero".into()));
        }
        let grid_mode =
            if ind_uses_small_grid(m, n) { GridMode::IndSmall } else { GridMode::IndLarge };
        let grid = build_grid(&GridSpec { mode: grid_mode, n, k_or_m: m })?;
        let qp = if grid_mode == GridMode::IndSmall {
            let support = r.read_elias_delta()? - 1;
            if support > m {
                return Err(Error::Corrupt("support exceeds m".into()));
            }
            decode_params_differential(
                r,
                &grid,
                m as usize,
                support as usize,
                Some((sigma_idx, n)),
                n,
            )?
        } else {
            decode_params_counts(r, &grid, Some(m as usize), Some((sigma_idx, n)), n)?
        };
        let payload_bits = r.read_elias_delta()? as usize;
        let payload = r.fork_window(payload_bits)?;
        decode_clustered_payload(payload, n, m, &qp, &grid, &tail)
    } else {
        let c = r.read_elias_delta()?;
        if c > n {
            return Err(Error::Corrupt("distinct-symbol count exceeds n".into()));
        }
        let distinct = read_tail_list(r, c, 0, n)?;
        let total: u64 = distinct.iter().map(|&(_, cnt)| cnt).sum();
        if total != n {
            return Err(Error::Corrupt("type counts do not sum to n".into()));
        }
        let freqs: Vec<u64> = distinct.iter().map(|&(_, cnt)| cnt).collect();
        let table = table_from_counts(&freqs)?;
        let payload_bits = r.read_elias_delta()? as usize;
        let payload = r.fork_window(payload_bits)?;
        let mut dec = ArithmeticDecoder::new(payload);
        let mut out = Vec::with_capacity(n as usize);
        for _ in 0..n {
            out.push(distinct[dec.decode_symbol(&table)?].0);
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------
// Configuration search and the public entry points
// ---------------------------------------------------------------------

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidInput("n >= 1 required".into()));
    }
    if n > MAX_N {
        return Err(Error::InvalidInput(format!("n {n} exceeds the supported maximum {MAX_N}")));
    }
    Ok(())
}

/// Candidate configurations the automatic search dry-runs, in tie-break
/// order (mode ordinal, then the size parameter).
fn candidate_configs(counts: &EmpiricalCounts) -> Vec<CodecConfig> {
    let n = counts.n();
    let k_max = counts.k_max();
    let mut cands = Vec::new();
    // Bounded-alphabet models: the max symbol, then powers of two up to
    // n^(1/3).
    let cbrt = (n as f64).powf(1.0 / 3.0).floor() as u64;
    let mut k_list = vec![k_max];
    let mut p = 1u64;
    while p <= cbrt {
        if p > k_max {
            k_list.push(p);
        }
        p *= 2;
    }
    k_list.sort_unstable();
    k_list.dedup();
    for k in k_list {
        cands.push(CodecConfig { mode: Mode::SmallK, n, k_hat: Some(k), m: None });
    }
    cands.push(CodecConfig { mode: Mode::Large, n, k_hat: None, m: None });
    // Effective alphabets: powers of two up to the max symbol, the max
    // symbol itself, and log2(n).
    let mut m_list: Vec<u64> = Vec::new();
    let mut p = 2u64;
    while p <= k_max {
        m_list.push(p);
        p *= 2;
    }
    m_list.push(k_max.max(2));
    m_list.push(u64::from(ceil_log2(n)).max(2));
    m_list.sort_unstable();
    m_list.dedup();
    for m in m_list {
        cands.push(CodecConfig { mode: Mode::Fast, n, k_hat: None, m: Some(m) });
    }
    cands
}

fn encode_config(
    x: &[u64],
    counts: &EmpiricalCounts,
    cfg: &CodecConfig,
) -> Result<(Vec<u8>, EncodeStats)> {
    match cfg.mode {
        Mode::SmallK => encode_small_with_counts(x, counts, cfg.k_hat.unwrap()),
        Mode::Large => encode_large_with_counts(x, counts),
        Mode::Fast => encode_fast_with_counts(x, counts, cfg.m.unwrap()),
        Mode::Individual => encode_individual_with_counts(x, counts),
    }
}

/// Dry-run every candidate configuration and return the winner (strictly
/// shorter beats; earlier candidates win ties).
pub fn choose_config(x: &[u64]) -> Result<CodecConfig> {
    let counts = EmpiricalCounts::from_sequence(x)?;
    check_n(counts.n())?;
    let mut best: Option<(usize, CodecConfig)> = None;
    let mut last_err = None;
    for cfg in candidate_configs(&counts) {
        match encode_config(x, &counts, &cfg) {
            Ok((_, stats)) => {
                if best.as_ref().map_or(true, |(bits, _)| stats.total_bits < *bits) {
                    best = Some((stats.total_bits, cfg));
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    best.map(|(_, cfg)| cfg)
        .ok_or_else(|| last_err.unwrap_or_else(|| Error::InvalidInput("no feasible config".into())))
}

/// Encode under the best candidate configuration.
pub fn encode_auto(x: &[u64]) -> Result<(Vec<u8>, EncodeStats)> {
    let counts = EmpiricalCounts::from_sequence(x)?;
    check_n(counts.n())?;
    let mut best: Option<(Vec<u8>, EncodeStats)> = None;
    let mut last_err = None;
    for cfg in candidate_configs(&counts) {
        match encode_config(x, &counts, &cfg) {
            Ok(c) => {
                if best.as_ref().map_or(true, |b| c.1.total_bits < b.1.total_bits) {
                    best = Some(c);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    best.ok_or_else(|| last_err.unwrap_or_else(|| Error::InvalidInput("no feasible config".into())))
}

/// Decode a container produced by any of the encoders.
pub fn decode(bytes: &[u8]) -> Result<Vec<u64>> {
    let mut r = BitReader::over(bytes);
    for &b in MAGIC.iter() {
        let got = r.read_fixed(8).map_err(|_| Error::BadMagic)?;
        if got as u8 != b {
            return Err(Error::BadMagic);
        }
    }
    let version = r.read_fixed(8)? as u8;
    if version != VERSION {
        return Err(Error::BadVersion(version));
    }
    let n = r.read_elias_delta()?;
    check_n(n).map_err(|_| Error::Corrupt("bad sequence length".into()))?;
    let mode = Mode::from_bits(r.read_fixed(2)?);
    match mode {
        Mode::SmallK => decode_small(&mut r, n),
        Mode::Large => decode_large(&mut r, n),
        Mode::Fast => decode_fast(&mut r, n),
        Mode::Individual => decode_individual(&mut r, n),
    }
}
