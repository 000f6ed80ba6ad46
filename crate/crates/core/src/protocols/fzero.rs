use super::{chunk, compile_to_3ov, index_bits, CompileOptions, ProtocolSpec, Sigma2Protocol3};
use crate::error::{params, Result};
use crate::instances::{ThreeOvBundle, ThreeSumInstance};

/// Carries of a base-`2^T` addition. `carries[0]` is `c_0 = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CarryProof {
    pub carries: Vec<u8>,
    pub block_size: u32,
}

impl CarryProof {
    /// Carries of the digitwise sum of three shifted values over `blocks` digits.
    pub fn of_sum(x: u64, y: u64, z: u64, block_size: u32, blocks: u32) -> Self {
        let mask = (1u64 << block_size) - 1;
        let mut carries = vec![0u8];
        let mut c = 0u64;
        for i in 0..blocks {
            let s = (x >> (i * block_size) & mask) + (y >> (i * block_size) & mask) + (z >> (i * block_size) & mask) + c;
            c = s >> block_size;
            carries.push(c as u8);
        }
        CarryProof { carries, block_size }
    }

    /// Merlin index: `c_1, ..., c_l` in 2-bit chunks, `c_1` most significant.
    pub fn merlin_index(&self) -> u64 {
        self.carries[1..].iter().fold(0, |acc, &c| acc << 2 | c as u64)
    }
}

/// Decides `x + y + z = 0` for values in `[-2^(v-1), 2^(v-1))`.
///
/// Values are shifted into `[0, 2^v)` and compared with `t = 3 * 2^(v-1)`
/// digit by digit in base `2^T`. Merlin sends the carries, Megan a digit
/// index in `1..=l+1`, Bob and Charles their digits of that index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FZeroProtocol {
    pub value_bits: u32,
    pub block_size: u32,
    /// Digit count `l = ceil(v / T)`; the most significant block is zero-padded.
    pub blocks: u32,
}

impl FZeroProtocol {
    pub fn new(value_bits: u32, block_size: u32) -> Result<Self> {
        if !(1..=60).contains(&value_bits) || block_size == 0 || block_size > value_bits {
            return Err(params(format!("need 1 <= T = {block_size} <= v = {value_bits} <= 60")));
        }
        let blocks = value_bits.div_ceil(block_size);
        if 2 * blocks > 63 || 2 * block_size > 63 {
            return Err(params("protocol messages exceed 63 bits"));
        }
        Ok(FZeroProtocol { value_bits, block_size, blocks })
    }

    pub fn shift(&self, v: i64) -> u64 {
        (v + (1i64 << (self.value_bits - 1))) as u64
    }

    pub fn target(&self) -> u64 {
        3u64 << (self.value_bits - 1)
    }

    /// Digit `i` (1-based, least significant first) of a shifted value.
    pub fn digit(&self, v: u64, i: u32) -> u64 {
        let shift = (i - 1) * self.block_size;
        if shift >= 64 {
            0
        } else {
            (v >> shift) & ((1u64 << self.block_size) - 1)
        }
    }

    fn carry(&self, a: u64, i: u32) -> u64 {
        if i == 0 || i > self.blocks {
            0
        } else {
            chunk(a, i - 1, self.blocks, 2)
        }
    }

    fn split(&self, w: u64) -> (u64, u64) {
        (w >> self.block_size, w & ((1u64 << self.block_size) - 1))
    }

    /// Digit sent for Megan index `b` (0-based), zero past the last block.
    pub fn digit_for(&self, v: i64, b: u64) -> u64 {
        if b > self.blocks as u64 {
            0
        } else {
            self.digit(self.shift(v), b as u32 + 1)
        }
    }
}

impl Sigma2Protocol3 for FZeroProtocol {
    type X = i64;
    type Y = i64;
    type Z = i64;

    fn spec(&self) -> ProtocolSpec {
        ProtocolSpec {
            m1: 2 * self.blocks,
            m2: index_bits(self.blocks as u64 + 1),
            ell: 2 * self.block_size,
            parties: 3,
        }
    }

    fn consistent_x(&self, _x: &i64, _a: u64, _b: u64, _w: u64) -> bool {
        true
    }

    fn consistent_y(&self, y: &i64, _a: u64, b: u64, w: u64) -> bool {
        self.split(w).0 == self.digit_for(*y, b)
    }

    fn consistent_z(&self, z: &i64, _a: u64, b: u64, w: u64) -> bool {
        self.split(w).1 == self.digit_for(*z, b)
    }

    fn accepts(&self, x: &i64, a: u64, b: u64, w: u64) -> bool {
        if (1..=self.blocks).any(|i| self.carry(a, i) == 3) {
            return false;
        }
        if b > self.blocks as u64 {
            return true;
        }
        let i = b as u32 + 1;
        let (yi, zi) = self.split(w);
        let lhs = self.digit(self.shift(*x), i) + yi + zi + self.carry(a, i - 1);
        let rhs = self.digit(self.target(), i) + (self.carry(a, i) << self.block_size);
        lhs == rhs
    }

    /// Carry strings with every carry in `{0, 1, 2}`.
    fn viable_merlin(&self) -> Option<Vec<u64>> {
        let m1 = 2 * self.blocks;
        Some((0..1u64 << m1).filter(|&a| (1..=self.blocks).all(|i| self.carry(a, i) != 3)).collect())
    }
}

/// Bits needed so every value of a 3-SUM instance with bound `W` is in range.
pub fn value_bits_for(bound: i64) -> u32 {
    index_bits(bound as u64).max(1)
}

/// 3-SUM as an OR-bundle of 3-OV instances with digit blocks of `block_size` bits.
pub fn threesum_to_3ov(inst: &ThreeSumInstance, block_size: u32, opts: &CompileOptions) -> Result<ThreeOvBundle> {
    let p = FZeroProtocol::new(value_bits_for(inst.bound), block_size)?;
    compile_to_3ov(&p, &inst.a, &inst.b, &inst.c, &format!("threesum-3ov T={block_size}"), opts)
}
