//! Ground truth: the linear scan and the full answer bitmap.

use crate::bits::{words_orthogonal, BitVec, WORD_BITS};
use crate::error::{check_dim, Error, Result};
use crate::instance::OVInstance;

/// Largest dimension for which a `2^d`-bit answer table is materialized.
pub const DENSE_DIM_CAP: usize = 28;

/// True iff some vector of `x` is orthogonal to `q`. Scans in stored order and
/// stops at the first hit.
pub fn linear_scan_query(x: &OVInstance, q: &BitVec) -> Result<bool> {
    check_dim(x.dim(), q.dim())?;
    Ok(scan_words(x, q.words()))
}

#[inline]
pub(crate) fn scan_words(x: &OVInstance, q: &[u64]) -> bool {
    (0..x.len()).any(|i| words_orthogonal(x.row(i), q))
}

/// The answer to every query in `{0,1}^dim`, indexed by the integer whose bit
/// `j` is coordinate `j` of the query.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FullBitmap {
    dim: usize,
    bits: Vec<u64>,
}

impl FullBitmap {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bits(&self) -> &[u64] {
        &self.bits
    }

    pub fn from_bits(dim: usize, bits: Vec<u64>) -> Result<Self> {
        check_dense_dim(dim)?;
        if bits.len() != dense_words(dim) {
            return Err(Error::Format(format!(
                "dense bitmap over dimension {dim} needs {} words, got {}",
                dense_words(dim),
                bits.len()
            )));
        }
        Ok(FullBitmap { dim, bits })
    }

    #[inline]
    pub(crate) fn lookup_index(&self, index: u64) -> bool {
        let index = index as usize;
        (self.bits[index / WORD_BITS] >> (index % WORD_BITS)) & 1 == 1
    }

    /// Stored bit for the query whose packed words are `q` (dimension `dim`).
    #[inline]
    pub(crate) fn lookup_words(&self, q: &[u64]) -> bool {
        self.lookup_index(q.first().copied().unwrap_or(0))
    }

    /// Number of stored bits, `2^dim`.
    pub fn len_bits(&self) -> u128 {
        1u128 << self.dim
    }
}

pub(crate) fn dense_words(dim: usize) -> usize {
    (1usize << dim).div_ceil(WORD_BITS)
}

pub(crate) fn check_dense_dim(dim: usize) -> Result<()> {
    if dim > DENSE_DIM_CAP {
        Err(Error::Refused(format!(
            "dense bitmap over dimension {dim} exceeds the cap of {DENSE_DIM_CAP}"
        )))
    } else {
        Ok(())
    }
}

/// Answer every query by linear scan.
pub fn build_full_bitmap(x: &OVInstance) -> Result<FullBitmap> {
    let dim = x.dim();
    check_dense_dim(dim)?;
    let mut bits = vec![0u64; dense_words(dim)];
    for index in 0..(1u64 << dim) {
        let q = BitVec::from_index(dim, index);
        if scan_words(x, q.words()) {
            bits[index as usize / WORD_BITS] |= 1 << (index as usize % WORD_BITS);
        }
    }
    Ok(FullBitmap { dim, bits })
}

pub fn query_full_bitmap(b: &FullBitmap, q: &BitVec) -> Result<bool> {
    check_dim(b.dim, q.dim())?;
    Ok(b.lookup_words(q.words()))
}

const LOW_MASKS: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0F0F_0F0F_0F0F_0F0F,
    0x00FF_00FF_00FF_00FF,
    0x0000_FFFF_0000_FFFF,
    0x0000_0000_FFFF_FFFF,
];

/// Same table as [`build_full_bitmap`], computed in `O(2^d * d / 64)` word
/// operations: mark each complement `!x`, then OR every mask with its
/// supersets. A query `q` is answered 1 iff `q` is a subset of some `!x`.
pub(crate) fn orthogonality_closure(x: &OVInstance) -> Result<FullBitmap> {
    let dim = x.dim();
    check_dense_dim(dim)?;
    let full = if dim == 0 { 0 } else { (1u64 << dim) - 1 };
    let mut bits = vec![0u64; dense_words(dim)];
    for i in 0..x.len() {
        let comp = !x.row(i).first().copied().unwrap_or(0) & full;
        bits[comp as usize / WORD_BITS] |= 1 << (comp as usize % WORD_BITS);
    }
    for (j, &low) in LOW_MASKS.iter().enumerate().take(dim.min(6)) {
        let shift = 1u32 << j;
        for w in &mut bits {
            *w |= (*w >> shift) & low;
        }
    }
    for j in 6..dim {
        let stride = 1usize << (j - 6);
        for base in (0..bits.len()).step_by(2 * stride) {
            for wi in base..base + stride {
                bits[wi] |= bits[wi + stride];
            }
        }
    }
    Ok(FullBitmap { dim, bits })
}

/// Cost, in word operations, of [`orthogonality_closure`].
pub(crate) fn closure_cost(dim: usize, n: usize) -> u128 {
    (dense_words(dim) as u128) * (dim.max(1) as u128) + n as u128
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::sample_instance;

    fn bv(s: &str) -> BitVec {
        s.parse().unwrap()
    }

    #[test]
    fn linear_scan_examples() {
        let x = OVInstance::from_strs(&["1100", "0011"]).unwrap();
        assert!(linear_scan_query(&x, &bv("0011")).unwrap());
        let x = OVInstance::from_strs(&["1111"]).unwrap();
        assert!(!linear_scan_query(&x, &bv("0001")).unwrap());
        let x = OVInstance::from_strs(&["0000"]).unwrap();
        assert!(linear_scan_query(&x, &bv("1111")).unwrap());
        assert!(linear_scan_query(&x, &bv("111")).is_err());
    }

    #[test]
    fn full_bitmap_examples() {
        let b = build_full_bitmap(&OVInstance::from_strs(&["10"]).unwrap()).unwrap();
        let answers: Vec<bool> = ["00", "01", "10", "11"]
            .iter()
            .map(|q| query_full_bitmap(&b, &bv(q)).unwrap())
            .collect();
        assert_eq!(answers, [true, true, false, false]);

        let b = build_full_bitmap(&OVInstance::from_strs(&["00"]).unwrap()).unwrap();
        assert!(["00", "01", "10", "11"]
            .iter()
            .all(|q| query_full_bitmap(&b, &bv(q)).unwrap()));

        let b = build_full_bitmap(&OVInstance::from_strs(&["11"]).unwrap()).unwrap();
        assert!(!query_full_bitmap(&b, &bv("11")).unwrap());
        assert!(query_full_bitmap(&b, &bv("110")).is_err());
    }

    #[test]
    fn full_bitmap_matches_scan_exhaustively() {
        for d in 1..=12 {
            for (n, seed) in [(1, 1u64), (5, 2), (40, 3)] {
                let x = sample_instance(n, d, 0.5, seed * 100 + d as u64).unwrap();
                let b = build_full_bitmap(&x).unwrap();
                for idx in 0..(1u64 << d) {
                    let q = BitVec::from_index(d, idx);
                    assert_eq!(
                        query_full_bitmap(&b, &q).unwrap(),
                        linear_scan_query(&x, &q).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn closure_route_matches_direct_route() {
        for d in 1..=14 {
            for (n, p) in [(1, 0.5), (7, 0.3), (30, 0.6), (100, 0.5)] {
                let x = sample_instance(n, d, p, 17 * d as u64 + n as u64).unwrap();
                assert_eq!(
                    orthogonality_closure(&x).unwrap(),
                    build_full_bitmap(&x).unwrap()
                );
            }
        }
    }

    #[test]
    fn dense_cap_is_enforced() {
        let x = sample_instance(1, DENSE_DIM_CAP + 1, 0.5, 1).unwrap();
        assert!(matches!(build_full_bitmap(&x), Err(Error::Refused(_))));
    }
}
