use super::{chunk, compile_to_ov, index_bits, CompileOptions, ProtocolSpec, Sigma2Protocol};
use crate::error::{params, Result};
use crate::instances::{IntegerPairInstance, OvBundle};
use num_bigint::BigUint;

/// The first primes, in order.
pub fn first_primes(count: usize) -> Vec<u64> {
    let mut primes: Vec<u64> = Vec::with_capacity(count);
    let mut c = 2u64;
    while primes.len() < count {
        if primes.iter().take_while(|&&p| p * p <= c).all(|&p| !c.is_multiple_of(p)) {
            primes.push(c);
        }
        c += 1;
    }
    primes
}

/// Shortest non-empty prefix of the primes whose product exceeds `bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrtParams {
    pub primes: Vec<u64>,
    pub t: usize,
    pub product: BigUint,
}

impl CrtParams {
    pub fn exceeding(bound: &BigUint) -> Self {
        let mut primes = Vec::new();
        let mut product = BigUint::from(1u32);
        let mut c = 2u64;
        while &product <= bound || primes.is_empty() {
            if primes.iter().take_while(|&&p: &&u64| p * p <= c).all(|&p| !c.is_multiple_of(p)) {
                primes.push(c);
                product *= c;
            }
            c += 1;
        }
        CrtParams { t: primes.len(), primes, product }
    }
}

/// Decides `<x, y> = 0` over the integers with `|entries| <= bound`.
/// Merlin is silent, Megan names a prime, Bob sends his residues.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZipProtocol {
    pub d: usize,
    pub bound: i64,
    pub crt: CrtParams,
    /// Bits per residue, enough for the largest prime.
    pub residue_bits: u32,
}

impl ZipProtocol {
    pub fn new(d: usize, bound: i64) -> Result<Self> {
        if d == 0 || bound < 0 {
            return Err(params("zip protocol needs d >= 1 and bound >= 0"));
        }
        let max_ip = BigUint::from(d) * BigUint::from(bound as u64) * BigUint::from(bound as u64);
        let crt = CrtParams::exceeding(&max_ip);
        let residue_bits = index_bits(*crt.primes.last().expect("at least one prime"));
        let p = ZipProtocol { d, bound, crt, residue_bits };
        if p.spec().ell > 63 {
            return Err(params(format!("transcript of {} bits is too long", p.spec().ell)));
        }
        Ok(p)
    }

    /// Bob's message for prime index `b`: residues of `y`, first coordinate most significant.
    pub fn residues(&self, y: &[i64], b: u64) -> u64 {
        if b >= self.crt.t as u64 {
            return 0;
        }
        let p = self.crt.primes[b as usize] as i64;
        y.iter().fold(0, |acc, &v| acc << self.residue_bits | v.rem_euclid(p) as u64)
    }
}

impl Sigma2Protocol for ZipProtocol {
    type X = Vec<i64>;
    type Y = Vec<i64>;

    fn spec(&self) -> ProtocolSpec {
        ProtocolSpec { m1: 0, m2: index_bits(self.crt.t as u64), ell: self.d as u32 * self.residue_bits, parties: 2 }
    }

    fn consistent_x(&self, _x: &Vec<i64>, _a: u64, _b: u64, _w: u64) -> bool {
        true
    }

    fn consistent_y(&self, y: &Vec<i64>, _a: u64, b: u64, w: u64) -> bool {
        w == self.residues(y, b)
    }

    fn accepts(&self, x: &Vec<i64>, _a: u64, b: u64, w: u64) -> bool {
        if b >= self.crt.t as u64 {
            return true;
        }
        let p = self.crt.primes[b as usize] as i128;
        let k = self.d as u32;
        let s: i128 = x
            .iter()
            .enumerate()
            .map(|(j, &xj)| xj as i128 * chunk(w, j as u32, k, self.residue_bits) as i128)
            .sum();
        s.rem_euclid(p) == 0
    }
}

/// Hopcroft's problem as a single OV instance.
pub fn hopcroft_to_ov(inst: &IntegerPairInstance, opts: &CompileOptions) -> Result<OvBundle> {
    let p = ZipProtocol::new(inst.d, inst.bound)?;
    compile_to_ov(&p, &inst.a, &inst.b, "hopcroft-ov", opts)
}
