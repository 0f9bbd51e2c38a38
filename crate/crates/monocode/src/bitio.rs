//! MSB-first bit streams and the two Elias codes used by every codec header.
//!
//! Bits are written most-significant-first within each byte, so a sequence
//! of prefix-free codewords concatenates and re-parses without markers.  A
//! finished stream is zero-padded to a byte boundary; the container records
//! the exact payload bit count so padding is never mistaken for data.

use crate::{Error, Result};

/// Append-only bit sink.
#[derive(Debug, Default, Clone)]
pub struct BitWriter {
    buf: Vec<u8>,
    bit_len: usize,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Total bits written so far.
    pub fn bit_len(&self) -> usize {
        self.bit_len
    }

    pub fn write_bit(&mut self, bit: bool) {
        let off = self.bit_len & 7;
        if off == 0 {
            self.buf.push(0);
        }
        if bit {
            *self.buf.last_mut().unwrap() |= 0x80 >> off;
        }
        self.bit_len += 1;
    }

    /// Write the low `width` bits of `value`, MSB first.
    pub fn write_fixed(&mut self, value: u64, width: u32) -> Result<()> {
        if width > 64 {
            return Err(Error::InvalidInput(format!("field width {width} > 64")));
        }
        if width < 64 && value >> width != 0 {
            return Err(Error::FieldOverflow { value, width });
        }
        for i in (0..width).rev() {
            self.write_bit((value >> i) & 1 == 1);
        }
        Ok(())
    }

    /// Elias gamma code for `i >= 1`: `floor(log2 i)` zeros, then `i` in
    /// binary.  Length `1 + 2*floor(log2 i)`.
    pub fn write_elias_gamma(&mut self, i: u64) -> Result<u32> {
        if i == 0 {
            return Err(Error::InvalidInput("Elias codes reject 0".into()));
        }
        let nbits = 63 - i.leading_zeros();
        for _ in 0..nbits {
            self.write_bit(false);
        }
        self.write_fixed(i, nbits + 1)?;
        Ok(2 * nbits + 1)
    }

    /// Elias delta code for `i >= 1`: gamma code of `floor(log2 i) + 1`,
    /// then the low `floor(log2 i)` bits of `i`.
    pub fn write_elias_delta(&mut self, i: u64) -> Result<u32> {
        if i == 0 {
            return Err(Error::InvalidInput("Elias codes reject 0".into()));
        }
        let nbits = 63 - i.leading_zeros();
        let head = self.write_elias_gamma(u64::from(nbits) + 1)?;
        if nbits > 0 {
            self.write_fixed(i & ((1 << nbits) - 1), nbits)?;
        }
        Ok(head + nbits)
    }

    /// Append every bit of `other`.
    pub fn append(&mut self, other: &BitWriter) {
        // Fast path when self is byte aligned.
        if self.bit_len & 7 == 0 {
            self.buf.extend_from_slice(&other.buf);
            self.bit_len += other.bit_len;
            return;
        }
        let mut reader = BitReader::new(&other.buf, other.bit_len);
        for _ in 0..other.bit_len {
            self.write_bit(reader.read_bit().unwrap());
        }
    }

    /// Consume the writer, returning the zero-padded bytes and the exact
    /// bit length.
    pub fn finish(self) -> (Vec<u8>, usize) {
        (self.buf, self.bit_len)
    }
}

/// Bit-level cursor over a byte slice with an explicit bit limit.
#[derive(Debug, Clone)]
pub struct BitReader<'a> {
    data: &'a [u8],
    pos: usize,
    limit: usize,
}

impl<'a> BitReader<'a> {
    /// Read up to `limit` bits from `data`.
    pub fn new(data: &'a [u8], limit: usize) -> Self {
        let limit = limit.min(data.len() * 8);
        Self { data, pos: 0, limit }
    }

    /// Reader over the whole slice.
    pub fn over(data: &'a [u8]) -> Self {
        Self::new(data, data.len() * 8)
    }

    pub fn bits_consumed(&self) -> usize {
        self.pos
    }

    pub fn bits_remaining(&self) -> usize {
        self.limit - self.pos
    }

    pub fn read_bit(&mut self) -> Result<bool> {
        if self.pos >= self.limit {
            return Err(Error::Truncated);
        }
        let byte = self.data[self.pos >> 3];
        let bit = byte >> (7 - (self.pos & 7)) & 1 == 1;
        self.pos += 1;
        Ok(bit)
    }

    /// Read a bit, or 0 once the stream is exhausted.  The arithmetic
    /// decoder drains trailing state this way.
    pub fn read_bit_or_zero(&mut self) -> bool {
        if self.pos >= self.limit {
            return false;
        }
        self.read_bit().unwrap()
    }

    pub fn read_fixed(&mut self, width: u32) -> Result<u64> {
        if width > 64 {
            return Err(Error::InvalidInput(format!("field width {width} > 64")));
        }
        let mut v = 0u64;
        for _ in 0..width {
            v = (v << 1) | u64::from(self.read_bit()?);
        }
        Ok(v)
    }

    pub fn read_elias_gamma(&mut self) -> Result<u64> {
        let mut nbits = 0u32;
        while !self.read_bit()? {
            nbits += 1;
            if nbits > 63 {
                return Err(Error::Corrupt("gamma codeword longer than 64 bits".into()));
            }
        }
        let rest = self.read_fixed(nbits)?;
        Ok((1 << nbits) | rest)
    }

    pub fn read_elias_delta(&mut self) -> Result<u64> {
        let nbits = self.read_elias_gamma()? - 1;
        if nbits > 63 {
            return Err(Error::Corrupt("delta codeword longer than 64 bits".into()));
        }
        let rest = self.read_fixed(nbits as u32)?;
        Ok((1 << nbits) | rest)
    }

    /// Split off a bounded sub-reader of exactly `bits` bits starting at the
    /// current position, advancing this reader past it.
    pub fn fork_window(&mut self, bits: usize) -> Result<BitReader<'a>> {
        if self.bits_remaining() < bits {
            return Err(Error::Truncated);
        }
        let w = BitReader { data: self.data, pos: self.pos, limit: self.pos + bits };
        self.pos += bits;
        Ok(w)
    }
}

/// Length in bits of the gamma code for `i >= 1`.
pub fn elias_gamma_len(i: u64) -> u32 {
    debug_assert!(i >= 1);
    2 * (63 - i.leading_zeros()) + 1
}

/// Length in bits of the delta code for `i >= 1`.
pub fn elias_delta_len(i: u64) -> u32 {
    debug_assert!(i >= 1);
    let nbits = 63 - i.leading_zeros();
    elias_gamma_len(u64::from(nbits) + 1) + nbits
}

/// Smallest `w` with `2^w >= x` (`x >= 1`).
pub fn ceil_log2(x: u64) -> u32 {
    debug_assert!(x >= 1);
    64 - (x - 1).leading_zeros().min(64)
}
