//! Packed Boolean vectors.
//!
//! Coordinate `i` lives in word `i / 64` at bit `i % 64`. Bits past `len` are
//! always zero, so word-level popcounts never see garbage.

use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

#[inline]
fn word_count(len: usize) -> usize {
    len.div_ceil(64)
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec { len, words: vec![0; word_count(len)] }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = BitVec { len, words: vec![u64::MAX; word_count(len)] };
        v.clear_tail();
        v
    }

    pub fn from_fn(len: usize, mut f: impl FnMut(usize) -> bool) -> Self {
        let mut v = Self::zeros(len);
        for i in 0..len {
            if f(i) {
                v.words[i / 64] |= 1 << (i % 64);
            }
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        Self::from_fn(bits.len(), |i| bits[i])
    }

    /// Builds a vector from raw words; bits past `len` are masked off.
    pub fn from_words(len: usize, mut words: Vec<u64>) -> Self {
        words.resize(word_count(len), 0);
        let mut v = BitVec { len, words };
        v.clear_tail();
        v
    }

    fn clear_tail(&mut self) {
        let r = self.len % 64;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    /// Inner product over the integers: popcount of the AND.
    #[inline]
    pub fn dot(&self, other: &BitVec) -> u32 {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum()
    }

    /// True iff the vectors share no coordinate set to one.
    #[inline]
    pub fn is_orthogonal(&self, other: &BitVec) -> bool {
        debug_assert_eq!(self.len, other.len);
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    /// Generalized inner product `sum_i a_i b_i c_i`.
    #[inline]
    pub fn dot3(&self, b: &BitVec, c: &BitVec) -> u32 {
        debug_assert!(self.len == b.len && b.len == c.len);
        self.words
            .iter()
            .zip(&b.words)
            .zip(&c.words)
            .map(|((x, y), z)| (x & y & z).count_ones())
            .sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn ones_positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + t)
            })
        })
    }

    pub fn and(&self, other: &BitVec) -> BitVec {
        debug_assert_eq!(self.len, other.len);
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect();
        BitVec { len: self.len, words }
    }

    pub fn not(&self) -> BitVec {
        let words = self.words.iter().map(|w| !w).collect();
        BitVec::from_words(self.len, words)
    }

    /// Coordinates in `positions`, in order (repeats allowed).
    pub fn select(&self, positions: &[usize]) -> BitVec {
        BitVec::from_fn(positions.len(), |k| self.get(positions[k]))
    }

    /// Renders index 0 leftmost.
    pub fn to_bit_string(&self) -> String {
        self.iter().map(|b| if b { '1' } else { '0' }).collect()
    }

    pub fn parse_bit_string(s: &str) -> Option<BitVec> {
        let mut v = BitVec::zeros(s.len());
        for (i, ch) in s.bytes().enumerate() {
            match ch {
                b'0' => {}
                b'1' => v.words[i / 64] |= 1 << (i % 64),
                _ => return None,
            }
        }
        Some(v)
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec({})", self.to_bit_string())
    }
}

/// Append-only construction of long vectors from bits and blocks.
#[derive(Default)]
pub struct BitBuilder {
    len: usize,
    words: Vec<u64>,
}

impl BitBuilder {
    pub fn with_capacity(bits: usize) -> Self {
        BitBuilder { len: 0, words: Vec::with_capacity(word_count(bits)) }
    }

    #[inline]
    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(64) {
            self.words.push(0);
        }
        if bit {
            *self.words.last_mut().unwrap() |= 1 << (self.len % 64);
        }
        self.len += 1;
    }

    pub fn push_n(&mut self, bit: bool, count: usize) {
        if !bit {
            self.len += count;
            self.words.resize(word_count(self.len), 0);
            return;
        }
        for _ in 0..count {
            self.push(true);
        }
    }

    pub fn extend(&mut self, v: &BitVec) {
        let shift = self.len % 64;
        if shift == 0 {
            self.words.extend_from_slice(&v.words);
            self.len += v.len;
            self.words.truncate(word_count(self.len));
            return;
        }
        for &w in &v.words {
            *self.words.last_mut().unwrap() |= w << shift;
            self.words.push(w >> (64 - shift));
        }
        self.len += v.len;
        self.words.truncate(word_count(self.len));
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn finish(self) -> BitVec {
        BitVec::from_words(self.len, self.words)
    }
}
