//! Plain bit vectors with a sampled rank directory.
//!
//! Positions are 0-based. `rank1(i)` counts the ones in `[0, i)`, so
//! `rank1(0) == 0` and `rank1(len)` is the total number of ones. `select1(k)`
//! returns the position of the `(k + 1)`-th one.

use std::io::{self, Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use thiserror::Error;

/// Default distance, in bits, between two cumulative rank samples.
pub const DEFAULT_RANK_STEP: usize = 64;

const WORD: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BitError {
    #[error("position {pos} is out of range for a bit vector of length {len}")]
    OutOfRange { pos: usize, len: usize },
    #[error("asked for {bit}-bit number {requested} but only {available} exist")]
    NotEnoughOccurrences {
        bit: u8,
        requested: usize,
        available: usize,
    },
    #[error("rank sample step must be a positive multiple of 64, got {0}")]
    BadSampleStep(usize),
}

/// Growable bit buffer used to assemble a [`RankBitVector`].
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct BitBuf {
    words: Vec<u64>,
    len: usize,
}

impl BitBuf {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        Self {
            words: Vec::with_capacity(bits.div_ceil(WORD)),
            len: 0,
        }
    }

    /// A buffer of `len` zero bits.
    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(WORD)],
            len,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(WORD) {
            self.words.push(0);
        }
        if bit {
            self.words[self.len / WORD] |= 1 << (self.len % WORD);
        }
        self.len += 1;
    }

    pub fn set(&mut self, pos: usize, bit: bool) {
        assert!(pos < self.len, "bit position {pos} out of range");
        let mask = 1u64 << (pos % WORD);
        if bit {
            self.words[pos / WORD] |= mask;
        } else {
            self.words[pos / WORD] &= !mask;
        }
    }

    pub fn get(&self, pos: usize) -> bool {
        assert!(pos < self.len, "bit position {pos} out of range");
        self.words[pos / WORD] >> (pos % WORD) & 1 == 1
    }
}

impl FromIterator<bool> for BitBuf {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let mut buf = BitBuf::new();
        for bit in iter {
            buf.push(bit);
        }
        buf
    }
}

/// Immutable bit vector answering rank in constant time and select in
/// logarithmic time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankBitVector {
    words: Vec<u64>,
    len: usize,
    step_words: usize,
    // samples[s] = number of ones in words[..s * step_words]; the last entry
    // is the total.
    samples: Vec<u64>,
}

impl Default for RankBitVector {
    fn default() -> Self {
        Self::new(BitBuf::new())
    }
}

impl RankBitVector {
    pub fn new(buf: BitBuf) -> Self {
        Self::with_step(buf, DEFAULT_RANK_STEP).expect("default step is valid")
    }

    /// Builds the rank directory with one sample every `step` bits.
    pub fn with_step(buf: BitBuf, step: usize) -> Result<Self, BitError> {
        if step == 0 || !step.is_multiple_of(WORD) {
            return Err(BitError::BadSampleStep(step));
        }
        let step_words = step / WORD;
        let BitBuf { words, len } = buf;
        let mut samples = Vec::with_capacity(words.len() / step_words + 2);
        let mut acc = 0u64;
        for chunk in words.chunks(step_words) {
            samples.push(acc);
            acc += chunk.iter().map(|w| w.count_ones() as u64).sum::<u64>();
        }
        samples.push(acc);
        Ok(Self {
            words,
            len,
            step_words,
            samples,
        })
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        Self::new(bits.into_iter().collect())
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Rank sample step in bits.
    pub fn sample_step(&self) -> usize {
        self.step_words * WORD
    }

    pub fn count_ones(&self) -> usize {
        *self.samples.last().unwrap() as usize
    }

    pub fn count_zeros(&self) -> usize {
        self.len - self.count_ones()
    }

    #[inline]
    pub fn get(&self, pos: usize) -> bool {
        assert!(pos < self.len, "bit position {pos} out of range");
        self.words[pos / WORD] >> (pos % WORD) & 1 == 1
    }

    /// Number of ones in `[0, i)`. Panics if `i > len`.
    #[inline]
    pub fn rank1(&self, i: usize) -> usize {
        assert!(i <= self.len, "rank position {i} out of range");
        let word = i / WORD;
        let block = word / self.step_words;
        let mut r = self.samples[block] as usize;
        for w in &self.words[block * self.step_words..word] {
            r += w.count_ones() as usize;
        }
        let rem = i % WORD;
        if rem != 0 {
            r += (self.words[word] & ((1u64 << rem) - 1)).count_ones() as usize;
        }
        r
    }

    /// Number of zeros in `[0, i)`. Panics if `i > len`.
    #[inline]
    pub fn rank0(&self, i: usize) -> usize {
        i - self.rank1(i)
    }

    /// Checked rank of either bit value.
    pub fn rank(&self, bit: bool, i: usize) -> Result<usize, BitError> {
        if i > self.len {
            return Err(BitError::OutOfRange {
                pos: i,
                len: self.len,
            });
        }
        Ok(if bit { self.rank1(i) } else { self.rank0(i) })
    }

    /// Position of the `(k + 1)`-th one. Panics if there are not enough ones.
    pub fn select1(&self, k: usize) -> usize {
        self.select(true, k).unwrap()
    }

    /// Position of the `(k + 1)`-th zero. Panics if there are not enough zeros.
    pub fn select0(&self, k: usize) -> usize {
        self.select(false, k).unwrap()
    }

    /// Position `p` of the `(k + 1)`-th occurrence of `bit`, so that
    /// `rank(bit, p) == k` and `get(p) == bit`.
    pub fn select(&self, bit: bool, k: usize) -> Result<usize, BitError> {
        let available = if bit {
            self.count_ones()
        } else {
            self.count_zeros()
        };
        if k >= available {
            return Err(BitError::NotEnoughOccurrences {
                bit: bit as u8,
                requested: k,
                available,
            });
        }
        let block_bits = self.step_words * WORD;
        let before = |s: usize| -> usize {
            let ones = self.samples[s] as usize;
            if bit {
                ones
            } else {
                (s * block_bits).min(self.len) - ones
            }
        };
        // Last block whose prefix count is <= k.
        let (mut lo, mut hi) = (0, self.samples.len() - 1);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if before(mid) <= k {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut remaining = k - before(lo);
        for (wi, &raw) in self.words.iter().enumerate().skip(lo * self.step_words) {
            let mut w = if bit { raw } else { !raw };
            if !bit && (wi + 1) * WORD > self.len {
                let valid = self.len - wi * WORD;
                w &= (1u64 << valid) - 1;
            }
            let c = w.count_ones() as usize;
            if remaining < c {
                for _ in 0..remaining {
                    w &= w - 1;
                }
                return Ok(wi * WORD + w.trailing_zeros() as usize);
            }
            remaining -= c;
        }
        unreachable!("occurrence count checked above")
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Size of bits plus rank directory, in bits.
    pub fn size_in_bits(&self) -> usize {
        (self.words.len() + self.samples.len()) * 64
    }

    pub fn write_to<W: Write>(&self, out: &mut W) -> io::Result<()> {
        out.write_u64::<LittleEndian>(self.len as u64)?;
        out.write_u64::<LittleEndian>(self.sample_step() as u64)?;
        out.write_u64::<LittleEndian>(self.words.len() as u64)?;
        for &w in &self.words {
            out.write_u64::<LittleEndian>(w)?;
        }
        out.write_u64::<LittleEndian>(self.samples.len() as u64)?;
        for &s in &self.samples {
            out.write_u64::<LittleEndian>(s)?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(input: &mut R) -> io::Result<Self> {
        let len = read_len(input)?;
        let step = read_len(input)?;
        if step == 0 || !step.is_multiple_of(WORD) {
            return Err(invalid("bad rank sample step"));
        }
        let nwords = read_len(input)?;
        if nwords != len.div_ceil(WORD) {
            return Err(invalid("bit vector word count does not match length"));
        }
        let words = read_u64s(input, nwords)?;
        let nsamples = read_len(input)?;
        let samples = read_u64s(input, nsamples)?;
        let rebuilt =
            Self::with_step(BitBuf { words, len }, step).map_err(|e| invalid(&e.to_string()))?;
        if rebuilt.samples != samples {
            return Err(invalid("rank samples do not match bit contents"));
        }
        Ok(rebuilt)
    }
}

pub(crate) fn invalid(msg: &str) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg.to_string())
}

pub(crate) fn read_len<R: Read>(input: &mut R) -> io::Result<usize> {
    let v = input.read_u64::<LittleEndian>()?;
    usize::try_from(v).map_err(|_| invalid("length does not fit in memory"))
}

pub(crate) fn read_u64s<R: Read>(input: &mut R, count: usize) -> io::Result<Vec<u64>> {
    // Cap the up-front allocation so a corrupt length fails on EOF instead of OOM.
    let mut out = Vec::with_capacity(count.min(1 << 20));
    for _ in 0..count {
        out.push(input.read_u64::<LittleEndian>()?);
    }
    Ok(out)
}
