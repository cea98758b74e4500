//! Little-endian binary index files.
//!
//! Layout: magic `TGSI`, version, flags (bit 0 set for sketch builds), k,
//! n, m, h, seed; vertex labels; `f`; the global edge table; the position
//! list of every substream; the skip entries of every substream; CRC-32 of
//! everything before it.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use super::{Algorithm, IndexParams, Substream, SubstreamIndex};
use crate::error::{Error, Result};
use crate::graph::{EdgeStream, TemporalEdge, VertexId};
use crate::streaming::SkipArray;

pub const MAGIC: [u8; 4] = *b"TGSI";
pub const VERSION: u32 = 1;
const FLAG_SKETCH: u32 = 1;

pub fn to_bytes(ix: &SubstreamIndex) -> Vec<u8> {
    let s = ix.stream();
    let p = ix.params();
    let mut out = Vec::with_capacity(64 + 24 * s.edge_count() + 8 * ix.total_edges());
    out.extend_from_slice(&MAGIC);
    put_u32(&mut out, VERSION);
    put_u32(&mut out, if p.algorithm == Algorithm::Sketch { FLAG_SKETCH } else { 0 });
    put_u32(&mut out, ix.k() as u32);
    put_u32(&mut out, s.vertex_count() as u32);
    put_u64(&mut out, s.edge_count() as u64);
    put_u32(&mut out, p.h as u32);
    put_u64(&mut out, p.seed);
    for label in s.labels() {
        put_u32(&mut out, label.len() as u32);
        out.extend_from_slice(label.as_bytes());
    }
    for &f in ix.assignments() {
        put_u32(&mut out, f);
    }
    for e in s.edges() {
        put_u32(&mut out, e.tail.0);
        put_u32(&mut out, e.head.0);
        put_u64(&mut out, e.time);
        put_u64(&mut out, e.transition);
    }
    for sub in ix.substreams() {
        put_u64(&mut out, sub.len() as u64);
        for pos in sub.positions() {
            put_u64(&mut out, u64::from(pos));
        }
    }
    for sub in ix.substreams() {
        put_u64(&mut out, sub.skip().len() as u64);
        for &(v, local) in sub.skip().entries() {
            put_u32(&mut out, v.0);
            put_u64(&mut out, u64::from(local));
        }
    }
    let crc = crc32fast::hash(&out);
    put_u32(&mut out, crc);
    out
}

pub fn write_to(ix: &SubstreamIndex, mut w: impl Write) -> Result<()> {
    w.write_all(&to_bytes(ix))?;
    Ok(())
}

pub fn save(ix: &SubstreamIndex, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, to_bytes(ix))?;
    Ok(())
}

pub fn load(path: impl AsRef<Path>) -> Result<SubstreamIndex> {
    from_bytes(&fs::read(path)?)
}

pub fn from_bytes(bytes: &[u8]) -> Result<SubstreamIndex> {
    if bytes.len() < 8 || bytes[..4] != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    if bytes.len() < 12 {
        return Err(Error::Format("truncated".into()));
    }
    let (body, tail) = bytes.split_at(bytes.len() - 4);
    let stored = u32::from_le_bytes(tail.try_into().unwrap());
    let computed = crc32fast::hash(body);
    if stored != computed {
        return Err(Error::Checksum { stored, computed });
    }

    let mut r = Reader { buf: body, at: 8 };
    let flags = r.u32()?;
    let algorithm = if flags & FLAG_SKETCH != 0 { Algorithm::Sketch } else { Algorithm::Greedy };
    let k = r.u32()? as usize;
    let n = r.u32()? as usize;
    let m = r.len_u64("edge count")?;
    let h = r.u32()? as usize;
    let seed = r.u64()?;

    let mut labels = Vec::with_capacity(n.min(body.len()));
    for _ in 0..n {
        let len = r.u32()? as usize;
        let raw = r.take(len)?;
        let label = std::str::from_utf8(raw).map_err(|_| Error::Format("label is not UTF-8".into()))?;
        labels.push(label.to_string());
    }
    let mut assignment = Vec::with_capacity(n.min(body.len()));
    for _ in 0..n {
        let f = r.u32()?;
        if f as usize > k {
            return Err(Error::Format(format!("assignment {f} exceeds k={k}")));
        }
        assignment.push(f);
    }
    if m > u32::MAX as usize {
        return Err(Error::Format("edge count exceeds 32 bits".into()));
    }
    r.ensure(m.saturating_mul(24))?;
    let mut edges = Vec::with_capacity(m);
    for pos in 0..m {
        edges.push(TemporalEdge {
            tail: VertexId(r.u32()?),
            head: VertexId(r.u32()?),
            time: r.u64()?,
            transition: r.u64()?,
            pos: pos as u32,
        });
    }
    let stream = Arc::new(EdgeStream::from_parts(labels, edges).map_err(|e| Error::Format(e.to_string()))?);

    let mut lists = Vec::with_capacity(k.min(body.len()));
    for j in 1..=k {
        let count = r.len_u64("substream length")?;
        r.ensure(count.saturating_mul(8))?;
        let mut sub = Vec::with_capacity(count);
        let mut prev: Option<u64> = None;
        for _ in 0..count {
            let pos = r.u64()?;
            if pos >= m as u64 || prev.is_some_and(|p| p >= pos) {
                return Err(Error::Format(format!("substream {j}: bad position {pos}")));
            }
            prev = Some(pos);
            sub.push(stream.edges()[pos as usize]);
        }
        lists.push(sub);
    }
    let mut substreams = Vec::with_capacity(k.min(body.len()));
    for (j, edges) in lists.into_iter().enumerate() {
        let count = r.len_u64("skip length")?;
        r.ensure(count.saturating_mul(12))?;
        let mut entries = Vec::with_capacity(count);
        for _ in 0..count {
            let v = r.u32()?;
            let local = r.u64()?;
            if v as usize >= n || local >= edges.len() as u64 {
                return Err(Error::Format(format!("substream {}: bad skip entry", j + 1)));
            }
            entries.push((VertexId(v), local as u32));
        }
        let skip = SkipArray::from_entries(entries)
            .map_err(|e| Error::Format(format!("substream {}: {e}", j + 1)))?;
        substreams.push(Substream::from_parts(edges, skip));
    }
    if r.at != body.len() {
        return Err(Error::Format(format!("{} trailing bytes", body.len() - r.at)));
    }
    let params = IndexParams { algorithm, k, h, seed };
    Ok(SubstreamIndex::from_parts(stream, params, assignment, substreams))
}

fn put_u32(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn put_u64(out: &mut Vec<u8>, v: u64) {
    out.extend_from_slice(&v.to_le_bytes());
}

struct Reader<'a> {
    buf: &'a [u8],
    at: usize,
}

impl<'a> Reader<'a> {
    fn ensure(&self, len: usize) -> Result<()> {
        if self.buf.len() - self.at < len {
            return Err(Error::Format("truncated".into()));
        }
        Ok(())
    }

    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        self.ensure(len)?;
        let s = &self.buf[self.at..self.at + len];
        self.at += len;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn len_u64(&mut self, what: &str) -> Result<usize> {
        let v = self.u64()?;
        usize::try_from(v).map_err(|_| Error::Format(format!("{what} {v} too large")))
    }
}
