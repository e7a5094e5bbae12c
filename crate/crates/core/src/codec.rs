//! File formats: instances (text and packed binary) and the structure
//! container.
//!
//! Text instance: a header line `OOV <n> <d>`, then `n` lines of exactly `d`
//! characters from `{0, 1}`.
//!
//! Binary instance: magic `OOVB`, `n` and `d` as little-endian u64, then each
//! vector in `ceil(d / 8)` bytes, coordinate `j` at bit `j % 8` of byte `j / 8`.
//!
//! Structure container, all integers little-endian:
//!
//! ```text
//! "OOVS" | version u8 | engine tag u8 | param length u32 | params | payload
//!        | CRC-64/XZ of payload u64
//! ```
//!
//! The parameter block is `t u32, i u32, flags u8, p f64, eps f64`; flag bit 0
//! marks `p`/`eps` as present. The payload layout depends on the engine tag.

use crc::{Crc, CRC_64_XZ};

use crate::avgcase::{choose_t_avg, AvgStructure};
use crate::bits::{words_for, BitVec, CoordSet};
use crate::candidates::{CandidateLists, SparseBitmap};
use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::instance::OVInstance;
use crate::oracle::FullBitmap;
use crate::worstcase::{Child, InternalNode, WorstNode, WorstStructure};

pub const CONTAINER_MAGIC: &[u8; 4] = b"OOVS";
pub const CONTAINER_VERSION: u8 = 1;
pub const BINARY_INSTANCE_MAGIC: &[u8; 4] = b"OOVB";

const CRC64: Crc<u64> = Crc::<u64>::new(&CRC_64_XZ);

pub fn checksum(payload: &[u8]) -> u64 {
    CRC64.checksum(payload)
}

// ---------------------------------------------------------------- instances

pub fn instance_to_text(x: &OVInstance) -> String {
    let mut out = String::with_capacity(16 + x.len() * (x.dim() + 1));
    out += &format!("OOV {} {}\n", x.len(), x.dim());
    for v in x.vectors() {
        out += &v.to_string();
        out.push('\n');
    }
    out
}

pub fn instance_from_text(text: &str) -> Result<OVInstance> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Format("empty instance file".into()))?;
    let f: Vec<&str> = header.split_whitespace().collect();
    let (n, d) = match f.as_slice() {
        ["OOV", n, d] => (
            n.parse::<usize>()
                .map_err(|_| Error::Format("line 1: bad vector count".into()))?,
            d.parse::<usize>()
                .map_err(|_| Error::Format("line 1: bad dimension".into()))?,
        ),
        _ => {
            return Err(Error::Format(
                "line 1: expected header `OOV <n> <d>`".into(),
            ))
        }
    };
    let mut x = OVInstance::empty(d);
    for (idx, line) in lines {
        let line = line.trim_end_matches('\r');
        if line.is_empty() && x.len() == n {
            continue;
        }
        let v: BitVec = line
            .parse()
            .map_err(|e| Error::Format(format!("line {}: {e}", idx + 1)))?;
        if v.dim() != d {
            return Err(Error::Format(format!(
                "line {}: expected {d} characters, found {}",
                idx + 1,
                v.dim()
            )));
        }
        if x.len() == n {
            return Err(Error::Format(format!(
                "line {}: more vectors than the {n} in the header",
                idx + 1
            )));
        }
        x.push(&v)?;
    }
    if x.len() != n {
        return Err(Error::Format(format!(
            "header announces {n} vectors, found {}",
            x.len()
        )));
    }
    Ok(x)
}

pub fn instance_to_binary(x: &OVInstance) -> Vec<u8> {
    let row_bytes = x.dim().div_ceil(8);
    let mut out = Vec::with_capacity(20 + x.len() * row_bytes);
    out.extend_from_slice(BINARY_INSTANCE_MAGIC);
    out.extend_from_slice(&(x.len() as u64).to_le_bytes());
    out.extend_from_slice(&(x.dim() as u64).to_le_bytes());
    for i in 0..x.len() {
        let bytes: Vec<u8> = x.row(i).iter().flat_map(|w| w.to_le_bytes()).collect();
        out.extend_from_slice(&bytes[..row_bytes]);
    }
    out
}

pub fn instance_from_binary(bytes: &[u8]) -> Result<OVInstance> {
    let mut r = Reader::new(bytes);
    if r.take(4)? != BINARY_INSTANCE_MAGIC {
        return Err(Error::Format("missing OOVB magic".into()));
    }
    let n = r.len_u64()?;
    let d = r.len_u64()?;
    let row_bytes = d.div_ceil(8);
    let stride = words_for(d);
    let mut words = Vec::with_capacity(n.saturating_mul(stride).min(1 << 24));
    for i in 0..n {
        let row = r.take(row_bytes)?;
        let mut buf = vec![0u8; stride * 8];
        buf[..row_bytes].copy_from_slice(row);
        let tail = d % 8;
        if tail != 0 && row[row_bytes - 1] >> tail != 0 {
            return Err(Error::Format(format!(
                "vector {i}: bits set past dimension {d}"
            )));
        }
        words.extend(
            buf.chunks_exact(8)
                .map(|c| u64::from_le_bytes(c.try_into().unwrap())),
        );
    }
    r.finish()?;
    Ok(OVInstance::from_packed(d, n, words))
}

/// Text or binary, chosen by the leading magic.
pub fn instance_from_bytes(bytes: &[u8]) -> Result<OVInstance> {
    if bytes.starts_with(BINARY_INSTANCE_MAGIC) {
        instance_from_binary(bytes)
    } else {
        let text = std::str::from_utf8(bytes)
            .map_err(|_| Error::Format("instance file is neither OOVB nor UTF-8 text".into()))?;
        instance_from_text(text)
    }
}

// ---------------------------------------------------------------- container

/// Build parameters recorded alongside a structure.
#[derive(Clone, Copy, Default, PartialEq, Debug)]
pub struct ContainerParams {
    pub t: u32,
    pub i: u32,
    /// `(p, eps)` when the threshold was chosen from them.
    pub p_eps: Option<(f64, f64)>,
}

#[repr(u8)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum EngineTag {
    Oracle = 1,
    Avg = 2,
    Worst = 3,
}

impl EngineTag {
    fn from_u8(b: u8) -> Result<Self> {
        match b {
            1 => Ok(EngineTag::Oracle),
            2 => Ok(EngineTag::Avg),
            3 => Ok(EngineTag::Worst),
            _ => Err(Error::Format(format!("unknown engine tag {b}"))),
        }
    }
}

pub fn encode_structure(engine: &Engine, params: &ContainerParams) -> Result<Vec<u8>> {
    if !matches!(engine, Engine::Scan(_)) {
        check_params(engine, params).map_err(|e| Error::Contract(e.to_string()))?;
    }
    let mut payload = Writer::default();
    let tag = match engine {
        Engine::Scan(_) => {
            return Err(Error::Contract(
                "the scan engine has no stored structure".into(),
            ))
        }
        Engine::Oracle(b) => {
            payload.full_bitmap(b);
            EngineTag::Oracle
        }
        Engine::Avg(s) => {
            payload.u32(s.t as u32);
            payload.instance(&s.vectors);
            payload.sparse(&s.sparse);
            payload.lists(&s.lists);
            EngineTag::Avg
        }
        Engine::Worst(w) => {
            payload.u32(w.level as u32);
            payload.u64(w.n);
            payload.node(&w.root);
            EngineTag::Worst
        }
    };
    let mut p = Writer::default();
    p.u32(params.t);
    p.u32(params.i);
    let (flags, pv, ev) = match params.p_eps {
        Some((pv, ev)) => (1u8, pv, ev),
        None => (0, 0.0, 0.0),
    };
    p.u8(flags);
    p.u64(pv.to_bits());
    p.u64(ev.to_bits());

    let mut out = Vec::with_capacity(payload.buf.len() + p.buf.len() + 22);
    out.extend_from_slice(CONTAINER_MAGIC);
    out.push(CONTAINER_VERSION);
    out.push(tag as u8);
    out.extend_from_slice(&(p.buf.len() as u32).to_le_bytes());
    out.extend_from_slice(&p.buf);
    out.extend_from_slice(&payload.buf);
    out.extend_from_slice(&checksum(&payload.buf).to_le_bytes());
    Ok(out)
}

pub fn decode_structure(bytes: &[u8]) -> Result<(Engine, ContainerParams)> {
    let mut r = Reader::new(bytes);
    if r.take(4)? != CONTAINER_MAGIC {
        return Err(Error::Format("missing OOVS magic".into()));
    }
    let version = r.u8()?;
    if version != CONTAINER_VERSION {
        return Err(Error::Format(format!(
            "unsupported container version {version}"
        )));
    }
    let tag = EngineTag::from_u8(r.u8()?)?;
    let plen = r.u32()? as usize;
    let mut pr = Reader::new(r.take(plen)?);
    let t = pr.u32()?;
    let i = pr.u32()?;
    let flags = pr.u8()?;
    let pv = f64::from_bits(pr.u64()?);
    let ev = f64::from_bits(pr.u64()?);
    pr.finish()?;
    if flags == 0 && (pv != 0.0 || ev != 0.0 || pv.is_sign_negative() || ev.is_sign_negative()) {
        return Err(Error::Format("p / eps present without their flag".into()));
    }
    if flags > 1 {
        return Err(Error::Format(format!("unknown parameter flags {flags:#x}")));
    }
    let params = ContainerParams {
        t,
        i,
        p_eps: (flags & 1 == 1).then_some((pv, ev)),
    };
    if r.remaining() < 8 {
        return Err(Error::Format("container truncated before checksum".into()));
    }
    let payload = r.take(r.remaining() - 8)?;
    let stored = r.u64()?;
    let computed = checksum(payload);
    if stored != computed {
        return Err(Error::Checksum { stored, computed });
    }
    let mut pl = Reader::new(payload);
    let engine = match tag {
        EngineTag::Oracle => Engine::Oracle(pl.full_bitmap()?),
        EngineTag::Avg => {
            let t = pl.len_u32()?;
            let vectors = pl.instance()?;
            let sparse = pl.sparse()?;
            let lists = pl.lists()?;
            Engine::Avg(AvgStructure::from_parts(t, vectors, sparse, lists)?)
        }
        EngineTag::Worst => {
            let level = pl.len_u32()?;
            let n = pl.u64()?;
            let root = pl.node(0)?;
            let w = WorstStructure::from_parts(root, level, n);
            w.validate()
                .map_err(|e| Error::Format(format!("stored tree is inconsistent: {e}")))?;
            Engine::Worst(w)
        }
    };
    pl.finish()?;
    check_params(&engine, &params)?;
    Ok((engine, params))
}

/// The parameter block sits outside the checksum; it must agree with the
/// structure it describes.
fn check_params(engine: &Engine, params: &ContainerParams) -> Result<()> {
    let bad = |what: &str| {
        Err(Error::Format(format!(
            "parameter block inconsistent with payload: {what}"
        )))
    };
    let (t, i) = match engine {
        Engine::Avg(s) => (s.t as u32, 0),
        Engine::Worst(w) => (0, w.level as u32),
        _ => (0, 0),
    };
    if params.t != t || params.i != i {
        return bad("t / i");
    }
    match (engine, params.p_eps) {
        (Engine::Avg(s), Some((p, eps))) => {
            let chosen = choose_t_avg(s.vectors.len().max(1) as u64, p, eps)
                .map_err(|e| Error::Format(format!("stored p / eps: {e}")))?;
            if chosen.clamp(1, s.vectors.dim().max(1)) != s.t {
                return bad("p / eps do not yield t");
            }
            Ok(())
        }
        (_, Some(_)) => bad("p / eps on a non-avg engine"),
        (_, None) => Ok(()),
    }
}

#[derive(Default)]
struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    fn words(&mut self, w: &[u64]) {
        for &x in w {
            self.u64(x);
        }
    }

    fn u32s(&mut self, v: &[u32]) {
        self.u64(v.len() as u64);
        for &x in v {
            self.u32(x);
        }
    }

    fn full_bitmap(&mut self, b: &FullBitmap) {
        self.u32(b.dim() as u32);
        self.words(b.bits());
    }

    fn instance(&mut self, x: &OVInstance) {
        self.u32(x.dim() as u32);
        self.u64(x.len() as u64);
        self.words(x.packed());
    }

    fn sparse(&mut self, s: &SparseBitmap) {
        self.u64(s.len);
        self.words(&s.bits);
    }

    fn lists(&mut self, l: &CandidateLists) {
        self.u32s(&l.offsets);
        self.u32s(&l.entries);
    }

    fn node(&mut self, node: &WorstNode) {
        match node {
            WorstNode::Leaf { vector } => {
                self.u8(0);
                self.u32(vector.dim() as u32);
                self.words(vector.words());
            }
            WorstNode::Dense { bitmap } => {
                self.u8(1);
                self.full_bitmap(bitmap);
            }
            WorstNode::Internal(n) => {
                self.u8(2);
                self.u32(n.dim as u32);
                self.u32(n.level as u32);
                self.u32(n.t as u32);
                self.u64(n.m);
                self.u64(n.n);
                self.sparse(&n.sparse);
                self.instance(&n.residual);
                self.lists(&n.lists);
                self.u32(n.children.len() as u32);
                for c in &n.children {
                    self.u32(c.zero_set.len() as u32);
                    for &j in c.zero_set.members() {
                        self.u32(j as u32);
                    }
                    self.node(&c.node);
                }
            }
        }
    }
}

/// Recursion limit when reading a tree; levels never exceed the dimension.
const MAX_TREE_DEPTH: usize = 4096;

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(buf: &'a [u8]) -> Self {
        Reader { buf, pos: 0 }
    }

    fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        if self.remaining() < len {
            return Err(Error::Format(format!(
                "truncated: needed {len} bytes at offset {}, {} left",
                self.pos,
                self.remaining()
            )));
        }
        let s = &self.buf[self.pos..self.pos + len];
        self.pos += len;
        Ok(s)
    }

    fn finish(&self) -> Result<()> {
        if self.remaining() != 0 {
            return Err(Error::Format(format!(
                "{} trailing bytes",
                self.remaining()
            )));
        }
        Ok(())
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn len_u32(&mut self) -> Result<usize> {
        Ok(self.u32()? as usize)
    }

    fn len_u64(&mut self) -> Result<usize> {
        usize::try_from(self.u64()?)
            .map_err(|_| Error::Format("length exceeds address space".into()))
    }

    /// `count` words, refusing counts the remaining input cannot hold.
    fn words(&mut self, count: usize) -> Result<Vec<u64>> {
        let bytes = self.take(
            count
                .checked_mul(8)
                .ok_or_else(|| Error::Format("length overflow".into()))?,
        )?;
        Ok(bytes
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }

    fn u32s(&mut self) -> Result<Vec<u32>> {
        let count = self.len_u64()?;
        let bytes = self.take(
            count
                .checked_mul(4)
                .ok_or_else(|| Error::Format("length overflow".into()))?,
        )?;
        Ok(bytes
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }

    fn bitvec(&mut self, dim: usize) -> Result<BitVec> {
        let words = self.words(words_for(dim))?;
        BitVec::from_words(dim, words).map_err(|e| Error::Format(e.to_string()))
    }

    fn full_bitmap(&mut self) -> Result<FullBitmap> {
        let dim = self.len_u32()?;
        if dim > crate::oracle::DENSE_DIM_CAP {
            return Err(Error::Format(format!("dense table over dimension {dim}")));
        }
        let bits = self.words(crate::oracle::dense_words(dim))?;
        if dim < 6 && bits[0] >> (1u32 << dim) != 0 {
            return Err(Error::Format("dense table has bits past 2^d".into()));
        }
        FullBitmap::from_bits(dim, bits)
    }

    fn instance(&mut self) -> Result<OVInstance> {
        let dim = self.len_u32()?;
        let n = self.len_u64()?;
        let mut x = OVInstance::empty(dim);
        for _ in 0..n {
            x.push(&self.bitvec(dim)?)?;
        }
        Ok(x)
    }

    fn sparse(&mut self) -> Result<SparseBitmap> {
        let len = self.u64()?;
        let words = usize::try_from(len.div_ceil(64))
            .map_err(|_| Error::Format("sparse bitmap too large".into()))?;
        let bits = self.words(words)?;
        if len % 64 != 0 && bits[words - 1] >> (len % 64) != 0 {
            return Err(Error::Format(
                "sparse bitmap has bits past its length".into(),
            ));
        }
        SparseBitmap::from_bits(len, bits)
    }

    fn lists(&mut self) -> Result<CandidateLists> {
        let offsets = self.u32s()?;
        let entries = self.u32s()?;
        CandidateLists::from_parts(offsets, entries)
    }

    fn node(&mut self, depth: usize) -> Result<WorstNode> {
        if depth > MAX_TREE_DEPTH {
            return Err(Error::Format("tree nested too deeply".into()));
        }
        match self.u8()? {
            0 => {
                let dim = self.len_u32()?;
                Ok(WorstNode::Leaf {
                    vector: self.bitvec(dim)?,
                })
            }
            1 => Ok(WorstNode::Dense {
                bitmap: self.full_bitmap()?,
            }),
            2 => {
                let dim = self.len_u32()?;
                let level = self.len_u32()?;
                let t = self.len_u32()?;
                let m = self.u64()?;
                let n = self.u64()?;
                let sparse = self.sparse()?;
                let residual = self.instance()?;
                let lists = self.lists()?;
                let count = self.len_u32()?;
                let mut children = Vec::with_capacity(count.min(1 << 16));
                for _ in 0..count {
                    let size = self.len_u32()?;
                    let members = (0..size)
                        .map(|_| self.len_u32())
                        .collect::<Result<Vec<_>>>()?;
                    let zero_set = CoordSet::new(dim, members)
                        .map_err(|e| Error::Format(format!("zero set: {e}")))?;
                    let keep = zero_set.complement().members().to_vec();
                    let node = self.node(depth + 1)?;
                    children.push(Child {
                        zero_set,
                        keep,
                        node,
                    });
                }
                let node = InternalNode::from_parts(
                    dim, level, t, m, n, sparse, residual, lists, children,
                )?;
                Ok(WorstNode::Internal(Box::new(node)))
            }
            other => Err(Error::Format(format!("unknown node tag {other}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{AvgThreshold, BuildOnlineOv, EngineConfig, OnlineOv};
    use crate::instance::sample_instance;

    #[test]
    fn text_instance_round_trip() {
        let x = OVInstance::from_strs(&["0011", "0000", "0001"]).unwrap();
        let text = instance_to_text(&x);
        assert_eq!(text, "OOV 3 4\n0011\n0000\n0001\n");
        assert_eq!(instance_from_text(&text).unwrap(), x);
    }

    #[test]
    fn text_instance_errors() {
        assert!(instance_from_text("").is_err());
        assert!(instance_from_text("OOV 2 3\n010\n").is_err());
        assert!(instance_from_text("OOV 1 3\n010\n111\n").is_err());
        let err = instance_from_text("OOV 2 3\n010\n01\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("line 3"), "{err}");
        let err = instance_from_text("OOV 1 3\n0x0\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("line 2"), "{err}");
        assert!(instance_from_text("OOV 0 3\n").unwrap().is_empty());
    }

    #[test]
    fn binary_instance_round_trip() {
        for (n, d) in [(5, 1), (7, 8), (3, 13), (4, 64), (2, 130)] {
            let x = sample_instance(n, d, 0.5, d as u64).unwrap();
            let bytes = instance_to_binary(&x);
            assert_eq!(bytes.len(), 20 + n * d.div_ceil(8));
            assert_eq!(instance_from_bytes(&bytes).unwrap(), x);
        }
        let mut bad = instance_to_binary(&OVInstance::from_strs(&["101"]).unwrap());
        *bad.last_mut().unwrap() |= 0x80;
        assert!(instance_from_binary(&bad).is_err());
        let bytes = instance_to_binary(&OVInstance::from_strs(&["101"]).unwrap());
        assert!(instance_from_binary(&bytes[..bytes.len() - 1]).is_err());
    }

    #[test]
    fn checksum_is_crc64_xz() {
        assert_eq!(checksum(b"123456789"), 0x995d_c9bb_df19_39fa);
    }

    fn round_trip(engine: &Engine, params: ContainerParams, d: usize) {
        let bytes = encode_structure(engine, &params).unwrap();
        let (back, p2) = decode_structure(&bytes).unwrap();
        assert_eq!(p2, params);
        assert_eq!(encode_structure(&back, &p2).unwrap(), bytes);
        for idx in 0..(1u64 << d) {
            let q = BitVec::from_index(d, idx);
            assert_eq!(back.query(&q).unwrap(), engine.query(&q).unwrap());
        }
    }

    #[test]
    fn every_engine_round_trips() {
        for seed in 0..6u64 {
            let d = 3 + seed as usize * 2;
            let x = sample_instance(20 + seed as usize * 7, d, 0.5, seed).unwrap();
            round_trip(
                &EngineConfig::Oracle.build(&x).unwrap(),
                ContainerParams::default(),
                d,
            );
            let avg = EngineConfig::Avg(AvgThreshold::Fixed(2)).build(&x).unwrap();
            round_trip(
                &avg,
                ContainerParams {
                    t: 2,
                    ..Default::default()
                },
                d,
            );
            for i in 1..=d.min(4) {
                let w = EngineConfig::Worst { i }.build(&x).unwrap();
                round_trip(
                    &w,
                    ContainerParams {
                        i: i as u32,
                        ..Default::default()
                    },
                    d,
                );
            }
        }
        let x = OVInstance::from_strs(&["1"]).unwrap();
        let p = ContainerParams {
            t: 1,
            i: 0,
            p_eps: Some((0.5, 0.5)),
        };
        round_trip(
            &EngineConfig::Avg(AvgThreshold::Fixed(1)).build(&x).unwrap(),
            p,
            1,
        );
    }

    #[test]
    fn corruption_is_detected() {
        let x = sample_instance(30, 8, 0.5, 1).unwrap();
        let w = EngineConfig::Worst { i: 2 }.build(&x).unwrap();
        assert!(encode_structure(&w, &ContainerParams::default()).is_err());
        let bytes = encode_structure(
            &w,
            &ContainerParams {
                i: 2,
                ..Default::default()
            },
        )
        .unwrap();
        let header = 4 + 1 + 1 + 4 + 25;
        for pos in [header, header + 17, bytes.len() - 9] {
            let mut bad = bytes.clone();
            bad[pos] ^= 0x10;
            assert!(
                matches!(decode_structure(&bad), Err(Error::Checksum { .. })),
                "pos {pos}"
            );
        }
        let mut bad = bytes.clone();
        bad[4] = 9;
        assert!(decode_structure(&bad).is_err());
        assert!(decode_structure(&bytes[..bytes.len() - 3]).is_err());
        assert!(encode_structure(&Engine::Scan(x), &ContainerParams::default()).is_err());
    }
}
