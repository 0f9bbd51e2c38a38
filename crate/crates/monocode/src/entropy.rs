//! Exact integer-frequency arithmetic coder.
//!
//! The coder realizes the `-log P(x^n | model)` part of every two-part code.
//! Probabilities reach it only as integer frequencies that both sides derive
//! from the decoded parameter description, so encoder and decoder always
//! agree on the model bit-for-bit.
//!
//! State is a 62-bit `[low, high]` interval renormalized one bit at a time,
//! with straddle bits counted and released on the next resolved bit.  With
//! the table total capped at 2^30 the interval never drops below 2^60
//! before a coding step, so the per-step truncation loss is below
//! `2^-29 log2(e)` bits and the emitted length stays within 2 bits of the
//! ideal code length for any input of realistic size.

use crate::bitio::{BitReader, BitWriter};
use crate::{Error, Result};

const PRECISION: u32 = 62;
const WHOLE: u64 = 1 << PRECISION;
const HALF: u64 = WHOLE / 2;
const QUARTER: u64 = WHOLE / 4;

/// Maximum admissible sum of frequencies.
pub const MAX_TOTAL: u64 = 1 << 30;

/// Static symbol-frequency model.
///
/// Symbols are dense indices `0..len`.  Zero frequencies are allowed for
/// symbols that never occur; coding one is an error, not a silent fallback.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyTable {
    /// `cum[s]..cum[s+1]` is symbol `s`'s slice of `[0, total)`.
    cum: Vec<u64>,
}

impl FrequencyTable {
    pub fn from_freqs(freqs: &[u64]) -> Result<Self> {
        if freqs.is_empty() {
            return Err(Error::InvalidInput("empty frequency table".into()));
        }
        let mut cum = Vec::with_capacity(freqs.len() + 1);
        let mut acc = 0u64;
        cum.push(0);
        for &f in freqs {
            acc = acc
                .checked_add(f)
                .ok_or_else(|| Error::InvalidInput("frequency sum overflow".into()))?;
            cum.push(acc);
        }
        if acc == 0 {
            return Err(Error::InvalidInput("all frequencies are zero".into()));
        }
        if acc > MAX_TOTAL {
            return Err(Error::InvalidInput(format!(
                "frequency total {acc} exceeds {MAX_TOTAL}"
            )));
        }
        Ok(Self { cum })
    }

    pub fn len(&self) -> usize {
        self.cum.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn total(&self) -> u64 {
        *self.cum.last().unwrap()
    }

    pub fn freq(&self, s: usize) -> u64 {
        self.cum[s + 1] - self.cum[s]
    }

    fn span(&self, s: usize) -> (u64, u64) {
        (self.cum[s], self.cum[s + 1])
    }

    /// Symbol owning `offset` in `[0, total)`.
    fn lookup(&self, offset: u64) -> usize {
        // partition_point: first index with cum[i] > offset, minus one.
        self.cum.partition_point(|&c| c <= offset) - 1
    }
}

/// Streaming encoder; one instance owns one payload.
pub struct ArithmeticEncoder {
    low: u64,
    high: u64,
    pending: u64,
    out: BitWriter,
}

impl Default for ArithmeticEncoder {
    fn default() -> Self {
        Self::new()
    }
}

impl ArithmeticEncoder {
    pub fn new() -> Self {
        Self { low: 0, high: WHOLE - 1, pending: 0, out: BitWriter::new() }
    }

    fn emit(&mut self, bit: bool) {
        self.out.write_bit(bit);
        for _ in 0..self.pending {
            self.out.write_bit(!bit);
        }
        self.pending = 0;
    }

    /// Code one symbol under `table`.  Tables may change per symbol as long
    /// as the decoder applies the same schedule.
    pub fn encode_symbol(&mut self, table: &FrequencyTable, s: usize) -> Result<()> {
        if s >= table.len() {
            return Err(Error::InvalidInput(format!("symbol {s} outside table")));
        }
        if table.freq(s) == 0 {
            return Err(Error::ZeroFrequency(s));
        }
        let (c_lo, c_hi) = table.span(s);
        let total = table.total() as u128;
        let span = (self.high - self.low) as u128 + 1;
        self.high = self.low + (span * c_hi as u128 / total) as u64 - 1;
        self.low += (span * c_lo as u128 / total) as u64;
        loop {
            if self.high < HALF {
                self.emit(false);
            } else if self.low >= HALF {
                self.emit(true);
                self.low -= HALF;
                self.high -= HALF;
            } else if self.low >= QUARTER && self.high < HALF + QUARTER {
                self.pending += 1;
                self.low -= QUARTER;
                self.high -= QUARTER;
            } else {
                break;
            }
            self.low <<= 1;
            self.high = (self.high << 1) | 1;
        }
        Ok(())
    }

    /// Flush the final interval; costs at most `2 + pending` bits.
    pub fn finish(mut self) -> BitWriter {
        self.pending += 1;
        if self.low < QUARTER {
            self.emit(false);
        } else {
            self.emit(true);
        }
        self.out
    }
}

/// Streaming decoder over a bounded bit window; reads zeros past the end.
pub struct ArithmeticDecoder<'a> {
    low: u64,
    high: u64,
    value: u64,
    reader: BitReader<'a>,
}

impl<'a> ArithmeticDecoder<'a> {
    pub fn new(mut reader: BitReader<'a>) -> Self {
        let mut value = 0u64;
        for _ in 0..PRECISION {
            value = (value << 1) | u64::from(reader.read_bit_or_zero());
        }
        Self { low: 0, high: WHOLE - 1, value, reader }
    }

    pub fn decode_symbol(&mut self, table: &FrequencyTable) -> Result<usize> {
        let total = table.total() as u128;
        let span = (self.high - self.low) as u128 + 1;
        // Largest cumulative count consistent with value; the owning symbol
        // is the one whose slice contains it.
        let target = (((self.value - self.low) as u128 + 1) * total - 1) / span;
        debug_assert!(target < total);
        let s = table.lookup(target as u64);
        if table.freq(s) == 0 {
            return Err(Error::Corrupt("decoded symbol has zero frequency".into()));
        }
        let (c_lo, c_hi) = table.span(s);
        self.high = self.low + (span * c_hi as u128 / total) as u64 - 1;
        self.low += (span * c_lo as u128 / total) as u64;
        loop {
            if self.high < HALF {
                // nothing
            } else if self.low >= HALF {
                self.low -= HALF;
                self.high -= HALF;
                self.value -= HALF;
            } else if self.low >= QUARTER && self.high < HALF + QUARTER {
                self.low -= QUARTER;
                self.high -= QUARTER;
                self.value -= QUARTER;
            } else {
                break;
            }
            self.low <<= 1;
            self.high = (self.high << 1) | 1;
            self.value = (self.value << 1) | u64::from(self.reader.read_bit_or_zero());
        }
        Ok(s)
    }
}

/// One-shot encode of `symbols` under a single table.
pub fn ac_encode(symbols: &[usize], table: &FrequencyTable) -> Result<BitWriter> {
    let mut enc = ArithmeticEncoder::new();
    for &s in symbols {
        enc.encode_symbol(table, s)?;
    }
    Ok(enc.finish())
}

/// One-shot decode of `n` symbols from `bits` (a window of `bit_len` bits).
pub fn ac_decode(bits: &[u8], bit_len: usize, table: &FrequencyTable, n: usize) -> Result<Vec<usize>> {
    if bits.len() * 8 < bit_len {
        return Err(Error::Truncated);
    }
    let mut dec = ArithmeticDecoder::new(BitReader::new(bits, bit_len));
    (0..n).map(|_| dec.decode_symbol(table)).collect()
}

/// `-sum log2(freq(s_t)/total)` with compensated accumulation.
pub fn ideal_code_length(symbols: &[usize], table: &FrequencyTable) -> Result<f64> {
    let total = table.total() as f64;
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for &s in symbols {
        if s >= table.len() {
            return Err(Error::InvalidInput(format!("symbol {s} outside table")));
        }
        let f = table.freq(s);
        if f == 0 {
            return Err(Error::ZeroFrequency(s));
        }
        let term = -(f as f64 / total).log2();
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;

    fn round_trip(symbols: &[usize], freqs: &[u64]) -> (usize, f64) {
        let table = FrequencyTable::from_freqs(freqs).unwrap();
        let w = ac_encode(symbols, &table).unwrap();
        let bit_len = w.bit_len();
        let (bytes, len) = w.finish();
        let back = ac_decode(&bytes, len, &table, symbols.len()).unwrap();
        assert_eq!(back, symbols);
        (bit_len, ideal_code_length(symbols, &table).unwrap())
    }

    #[test]
    fn zero_information_source() {
        let (bits, ideal) = round_trip(&[0; 8], &[1]);
        assert_eq!(ideal, 0.0);
        assert!(bits <= 2, "got {bits}");
    }

    #[test]
    fn uniform_two_symbols() {
        let (bits, ideal) = round_trip(&[0, 1, 0, 1, 1, 0, 0, 1], &[1, 1]);
        assert_eq!(ideal, 8.0);
        assert!(bits <= 10, "got {bits}");
    }

    #[test]
    fn skewed_table_ideal_value() {
        let table = FrequencyTable::from_freqs(&[3, 1]).unwrap();
        let ideal = ideal_code_length(&[0, 0, 0, 1], &table).unwrap();
        let expect = 3.0 * (4.0f64 / 3.0).log2() + 2.0;
        assert!((ideal - expect).abs() < 1e-12);
        round_trip(&[0, 0, 0, 1], &[3, 1]);
    }

    #[test]
    fn empty_sequence() {
        let table = FrequencyTable::from_freqs(&[2, 2]).unwrap();
        let w = ac_encode(&[], &table).unwrap();
        let (bytes, len) = w.finish();
        assert_eq!(ac_decode(&bytes, len, &table, 0).unwrap(), Vec::<usize>::new());
    }

    #[test]
    fn zero_frequency_symbol_rejected() {
        let table = FrequencyTable::from_freqs(&[4, 0, 1]).unwrap();
        let mut enc = ArithmeticEncoder::new();
        assert!(matches!(enc.encode_symbol(&table, 1), Err(Error::ZeroFrequency(1))));
    }

    #[test]
    fn table_total_cap() {
        assert!(FrequencyTable::from_freqs(&[MAX_TOTAL, 1]).is_err());
        assert!(FrequencyTable::from_freqs(&[MAX_TOTAL]).is_ok());
    }

    #[test]
    fn slack_within_two_bits_fuzzed() {
        let mut rng = StdRng::seed_from_u64(0x5eed);
        for _ in 0..400 {
            let k = rng.gen_range(1..=20usize);
            let freqs: Vec<u64> = (0..k)
                .map(|_| {
                    if rng.gen_bool(0.15) {
                        0
                    } else {
                        1 << rng.gen_range(0..20)
                    }
                })
                .collect();
            if freqs.iter().all(|&f| f == 0) {
                continue;
            }
            let positive: Vec<usize> =
                (0..k).filter(|&s| freqs[s] > 0).collect();
            let n = rng.gen_range(0..=400usize);
            let symbols: Vec<usize> =
                (0..n).map(|_| *positive.choose(&mut rng).unwrap()).collect();
            let (bits, ideal) = round_trip(&symbols, &freqs);
            let slack = bits as f64 - ideal;
            assert!((0.0..=2.0).contains(&slack), "slack {slack} freqs {freqs:?}");
        }
    }

    #[test]
    fn per_symbol_table_switching() {
        // The fast codec interleaves two static tables in one stream.
        let t1 = FrequencyTable::from_freqs(&[5, 3, 2]).unwrap();
        let t2 = FrequencyTable::from_freqs(&[1, 1]).unwrap();
        let mut enc = ArithmeticEncoder::new();
        let syms1 = [0usize, 2, 1, 0, 0, 2];
        let syms2 = [1usize, 0, 1];
        for &s in &syms1 {
            enc.encode_symbol(&t1, s).unwrap();
        }
        for &s in &syms2 {
            enc.encode_symbol(&t2, s).unwrap();
        }
        let (bytes, len) = enc.finish().finish();
        let mut dec = ArithmeticDecoder::new(BitReader::new(&bytes, len));
        for &s in &syms1 {
            assert_eq!(dec.decode_symbol(&t1).unwrap(), s);
        }
        for &s in &syms2 {
            assert_eq!(dec.decode_symbol(&t2).unwrap(), s);
        }
    }

    #[test]
    fn deterministic_output() {
        let table = FrequencyTable::from_freqs(&[7, 2, 1]).unwrap();
        let symbols: Vec<usize> = (0..300).map(|i| [0, 0, 1, 0, 2, 0][i % 6]).collect();
        let a = ac_encode(&symbols, &table).unwrap().finish();
        let b = ac_encode(&symbols, &table).unwrap().finish();
        assert_eq!(a, b);
    }
}
