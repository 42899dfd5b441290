//! Fuzzy hashes: random hyperplane projection of graph signatures.
//!
//! Bit `i` of a hash is the sign of the dot product between the signature and
//! a Gaussian random vector `V_i`. The vectors are never materialized; the
//! component of `V_i` for a feature is derived on demand from the seed, the
//! feature key and `i` (see [`gaussian_component`]). The hash also carries the
//! signature's total feature count, so the size rectification factor can be
//! applied without the original signature.

use std::f64::consts::TAU;
use std::fmt;

use crate::error::{Error, Result};
use crate::features::{GraphSignature, DEFAULT_GRAM, MAX_GRAM};
use crate::similarity::{rectify_totals, SimilarityScore};

pub const DEFAULT_BITS: usize = 256;
/// ASCII "TAH_CFG1".
pub const DEFAULT_SEED: u64 = 0x5441_485F_4346_4731;
pub const HASH_TAG: &str = "tah1:";

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ProjectionParams {
    k: usize,
    seed: u64,
    n: usize,
}

impl ProjectionParams {
    /// `k` must be a positive multiple of 8 and `n` a supported gram length.
    pub fn new(k: usize, seed: u64, n: usize) -> Result<Self> {
        if k == 0 || !k.is_multiple_of(8) {
            return Err(Error::InvalidParams(format!(
                "bit count must be a positive multiple of 8, got {k}"
            )));
        }
        if !(1..=MAX_GRAM).contains(&n) {
            return Err(Error::InvalidGramLength {
                got: n,
                max: MAX_GRAM,
            });
        }
        Ok(Self { k, seed, n })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

impl Default for ProjectionParams {
    fn default() -> Self {
        Self {
            k: DEFAULT_BITS,
            seed: DEFAULT_SEED,
            n: DEFAULT_GRAM,
        }
    }
}

/// `k` projection bits plus the 32-bit total feature count.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FuzzyHash {
    bits: Vec<u8>,
    total: u32,
    params: ProjectionParams,
}

impl FuzzyHash {
    /// `bits` is MSB-first: bit `i` lives in byte `i / 8` at position `7 - i % 8`.
    pub fn from_parts(bits: Vec<u8>, total: u32, params: ProjectionParams) -> Result<Self> {
        if bits.len() * 8 != params.k {
            return Err(Error::InvalidParams(format!(
                "{} bit bytes do not hold {} bits",
                bits.len(),
                params.k
            )));
        }
        if total == 0 {
            return Err(Error::EmptySignature);
        }
        Ok(Self {
            bits,
            total,
            params,
        })
    }

    pub fn bit(&self, i: usize) -> bool {
        self.bits[i / 8] & (0x80 >> (i % 8)) != 0
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bits
    }

    pub fn total(&self) -> u32 {
        self.total
    }

    pub fn params(&self) -> &ProjectionParams {
        &self.params
    }

    pub fn k(&self) -> usize {
        self.params.k
    }

    /// Number of differing bits.
    pub fn hamming_distance(&self, other: &Self) -> Result<u32> {
        check_params(self, other)?;
        Ok(self
            .bits
            .iter()
            .zip(&other.bits)
            .map(|(a, b)| (a ^ b).count_ones())
            .sum())
    }
}

impl fmt::Debug for FuzzyHash {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FuzzyHash")
            .field("hash", &encode_hash(self))
            .field("params", &self.params)
            .finish()
    }
}

impl fmt::Display for FuzzyHash {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&encode_hash(self))
    }
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// SplitMix64 output finalizer.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Uniform deviate in the open interval (0, 1) from the top 53 bits.
fn unit_open(x: u64) -> f64 {
    ((x >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

fn gaussian_from_key_hash(seed: u64, key_hash: u64, bit: usize) -> f64 {
    let base = mix64(seed ^ mix64(key_hash ^ mix64((bit as u64).wrapping_add(GOLDEN))));
    let u1 = unit_open(mix64(base.wrapping_add(GOLDEN)));
    let u2 = unit_open(mix64(base.wrapping_add(GOLDEN.wrapping_mul(2))));
    (-2.0 * u1.ln()).sqrt() * (TAU * u2).cos()
}

/// Component of random vector `V_bit` along the feature named `key`.
///
/// The seed, the FNV-1a hash of the key bytes and the bit index are mixed
/// through SplitMix64 into two uniform deviates, which the first Box-Muller
/// output turns into a standard normal deviate.
pub fn gaussian_component(seed: u64, key: &str, bit: usize) -> f64 {
    gaussian_from_key_hash(seed, fnv1a64(key.as_bytes()), bit)
}

/// Projects a signature onto `params.k` random hyperplanes.
///
/// Bit `i` is set when the dot product with `V_i` is `>= 0`.
pub fn project(sig: &GraphSignature, params: &ProjectionParams) -> Result<FuzzyHash> {
    if sig.n() != params.n {
        return Err(Error::ParamMismatch(format!(
            "signature built with n={}, projection expects n={}",
            sig.n(),
            params.n
        )));
    }
    if sig.total() == 0 {
        return Err(Error::EmptySignature);
    }
    let mut dots = vec![0.0f64; params.k];
    for &(feature, count) in sig.entries() {
        let key_hash = fnv1a64(feature.key().as_bytes());
        let weight = count as f64;
        for (i, dot) in dots.iter_mut().enumerate() {
            *dot += weight * gaussian_from_key_hash(params.seed, key_hash, i);
        }
    }
    let mut bits = vec![0u8; params.k / 8];
    for (i, dot) in dots.iter().enumerate() {
        if *dot >= 0.0 {
            bits[i / 8] |= 0x80 >> (i % 8);
        }
    }
    FuzzyHash::from_parts(bits, sig.total(), *params)
}

fn check_params(a: &FuzzyHash, b: &FuzzyHash) -> Result<()> {
    if a.params != b.params {
        return Err(Error::ParamMismatch(format!(
            "hashes built with {:?} and {:?}",
            a.params, b.params
        )));
    }
    Ok(())
}

/// Fraction of agreeing bits.
pub fn hamming_similarity(a: &FuzzyHash, b: &FuzzyHash) -> Result<f64> {
    let differing = a.hamming_distance(b)?;
    Ok(1.0 - differing as f64 / a.params.k as f64)
}

/// `2H - 1` clamped to `[0, 1]`.
pub fn cosine_from_hamming(h: f64) -> f64 {
    (2.0 * h - 1.0).clamp(0.0, 1.0)
}

pub fn estimate_cosine(a: &FuzzyHash, b: &FuzzyHash) -> Result<f64> {
    hamming_similarity(a, b).map(cosine_from_hamming)
}

/// Size rectification of the stored totals times the estimated cosine.
pub fn hash_similarity(a: &FuzzyHash, b: &FuzzyHash) -> Result<SimilarityScore> {
    let est = estimate_cosine(a, b)?;
    Ok(SimilarityScore::new(rectify_totals(a.total, b.total) * est))
}

/// `tah1:` followed by the total as 8 hex digits and the bit bytes in hex.
pub fn encode_hash(h: &FuzzyHash) -> String {
    let mut s = String::with_capacity(HASH_TAG.len() + 8 + 2 * h.bits.len());
    s.push_str(HASH_TAG);
    s.push_str(&format!("{:08x}", h.total));
    for b in &h.bits {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

/// Decodes with the default seed and gram length; `k` follows from the
/// text length.
pub fn decode_hash(text: &str) -> Result<FuzzyHash> {
    let body = strip_tag(text)?;
    if body.len() < 10 || body.len() % 2 != 0 {
        return Err(Error::HashDecode(format!(
            "expected 8 total digits plus an even, nonzero number of bit digits, got {} digits",
            body.len()
        )));
    }
    let k = (body.len() - 8) * 4;
    let params = ProjectionParams::new(k, DEFAULT_SEED, DEFAULT_GRAM)?;
    decode_body(body, params)
}

/// Decodes a hash that was produced under `params`.
pub fn decode_hash_with(text: &str, params: &ProjectionParams) -> Result<FuzzyHash> {
    let body = strip_tag(text)?;
    let expected = 8 + params.k / 4;
    if body.len() != expected {
        return Err(Error::HashDecode(format!(
            "expected {expected} hex digits for k={}, got {}",
            params.k,
            body.len()
        )));
    }
    decode_body(body, *params)
}

fn strip_tag(text: &str) -> Result<&str> {
    let text = text.trim();
    if let Some(body) = text.strip_prefix(HASH_TAG) {
        return Ok(body);
    }
    match text.split_once(':') {
        Some((tag, _)) if tag.starts_with("tah") => Err(Error::HashDecode(format!(
            "unsupported version tag `{tag}`"
        ))),
        _ => Err(Error::HashDecode(format!("missing `{HASH_TAG}` tag"))),
    }
}

fn decode_body(body: &str, params: ProjectionParams) -> Result<FuzzyHash> {
    let digits = body.as_bytes();
    if let Some(pos) = digits.iter().position(|c| !c.is_ascii_hexdigit()) {
        return Err(Error::HashDecode(format!(
            "non-hex character at offset {}",
            HASH_TAG.len() + pos
        )));
    }
    let byte =
        |i: usize| -> u8 { u8::from_str_radix(&body[2 * i..2 * i + 2], 16).expect("checked hex") };
    let total = u32::from_str_radix(&body[..8], 16).expect("checked hex");
    let bits: Vec<u8> = (4..digits.len() / 2).map(byte).collect();
    if total == 0 {
        return Err(Error::HashDecode("total feature count is zero".into()));
    }
    FuzzyHash::from_parts(bits, total, params)
}
