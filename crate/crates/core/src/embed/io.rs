//! Binary model files and `.vec` text vectors.
//!
//! Binary layout (all integers and floats little-endian):
//!
//! ```text
//! magic           8 bytes  "SUBVEC01"
//! dim, V, buckets u32 × 3
//! min_n, max_n    u32 × 2
//! markers         u8       0 | 1
//! hash id         u8       1 = FNV-1a 32
//! compose         u8       0 = mean, 1 = sum
//! epochs          u32
//! lr0             f64
//! window, neg     u32 × 2
//! min_count       u64
//! subsample_t     f64
//! neg_alpha       f64
//! threads         u32
//! seed            u64
//! vocab min_count u64
//! V × (len u32, token bytes, count u64)
//! input matrix    (V + buckets) × dim f32
//! output matrix   V × dim f32
//! ```

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{Compose, EmbeddingModel, Embeddings, Matrix, TrainConfig, WordVector};
use crate::subword::{SubwordConfig, HASH_FNV1A_32};
use crate::vocab::Vocabulary;
use crate::{Error, Result};

pub const MODEL_MAGIC: &[u8; 8] = b"SUBVEC01";

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidModel(msg.into())
}

struct Reader<R> {
    inner: R,
}

impl<R: Read> Reader<R> {
    fn bytes<const N: usize>(&mut self) -> Result<[u8; N]> {
        let mut buf = [0u8; N];
        self.inner
            .read_exact(&mut buf)
            .map_err(|e| bad(format!("truncated model file: {}", e)))?;
        Ok(buf)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.bytes::<1>()?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.bytes()?))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.bytes()?))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.bytes()?))
    }

    fn f32s(&mut self, n: usize) -> Result<Vec<f32>> {
        let mut raw = vec![0u8; n * 4];
        self.inner
            .read_exact(&mut raw)
            .map_err(|e| bad(format!("truncated matrix: {}", e)))?;
        Ok(raw
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect())
    }
}

fn write_f32s<W: Write>(w: &mut W, values: &[f32]) -> std::io::Result<()> {
    const CHUNK: usize = 1 << 16;
    let mut buf = Vec::with_capacity(CHUNK * 4);
    for chunk in values.chunks(CHUNK) {
        buf.clear();
        for v in chunk {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)?;
    }
    Ok(())
}

fn to_u32(value: usize, what: &str) -> Result<u32> {
    u32::try_from(value).map_err(|_| bad(format!("{} {} exceeds u32 range", what, value)))
}

impl EmbeddingModel {
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        let cfg = &self.config;
        let mut header = Vec::new();
        header.extend_from_slice(MODEL_MAGIC);
        for v in [cfg.dim, self.vocab.len(), cfg.subword.bucket_count, cfg.subword.min_n, cfg.subword.max_n] {
            header.extend_from_slice(&to_u32(v, "header value")?.to_le_bytes());
        }
        header.push(cfg.subword.use_boundary_markers as u8);
        header.push(HASH_FNV1A_32);
        header.push(cfg.compose.code());
        header.extend_from_slice(&to_u32(cfg.epochs, "epochs")?.to_le_bytes());
        header.extend_from_slice(&cfg.lr0.to_le_bytes());
        header.extend_from_slice(&to_u32(cfg.window, "window")?.to_le_bytes());
        header.extend_from_slice(&to_u32(cfg.negatives, "negatives")?.to_le_bytes());
        header.extend_from_slice(&cfg.min_count.to_le_bytes());
        header.extend_from_slice(&cfg.subsample_t.to_le_bytes());
        header.extend_from_slice(&cfg.neg_alpha.to_le_bytes());
        header.extend_from_slice(&to_u32(cfg.threads, "threads")?.to_le_bytes());
        header.extend_from_slice(&cfg.seed.to_le_bytes());
        header.extend_from_slice(&self.vocab.min_count().to_le_bytes());
        for (token, &count) in self.vocab.tokens().iter().zip(self.vocab.counts()) {
            header.extend_from_slice(&to_u32(token.len(), "token length")?.to_le_bytes());
            header.extend_from_slice(token.as_bytes());
            header.extend_from_slice(&count.to_le_bytes());
        }

        let io = |e| Error::io("<model stream>", e);
        w.write_all(&header).map_err(io)?;
        write_f32s(&mut w, self.input.as_slice()).map_err(io)?;
        write_f32s(&mut w, self.output.as_slice()).map_err(io)?;
        w.flush().map_err(io)
    }

    pub fn read_binary<R: Read>(inner: R) -> Result<Self> {
        let mut r = Reader { inner };
        if &r.bytes::<8>()? != MODEL_MAGIC {
            return Err(bad("missing SUBVEC01 magic"));
        }
        let dim = r.u32()? as usize;
        let vocab_len = r.u32()? as usize;
        let bucket_count = r.u32()? as usize;
        let min_n = r.u32()? as usize;
        let max_n = r.u32()? as usize;
        let markers = match r.u8()? {
            0 => false,
            1 => true,
            other => return Err(bad(format!("invalid markers flag {}", other))),
        };
        let hash = r.u8()?;
        if hash != HASH_FNV1A_32 {
            return Err(bad(format!("unsupported hash id {}", hash)));
        }
        let compose = Compose::from_code(r.u8()?).ok_or_else(|| bad("invalid composition code"))?;
        let config = TrainConfig {
            dim,
            epochs: r.u32()? as usize,
            lr0: r.f64()?,
            window: r.u32()? as usize,
            negatives: r.u32()? as usize,
            min_count: r.u64()?,
            subsample_t: r.f64()?,
            neg_alpha: r.f64()?,
            threads: r.u32()? as usize,
            seed: r.u64()?,
            subword: SubwordConfig {
                min_n,
                max_n,
                bucket_count,
                use_boundary_markers: markers,
            },
            compose,
        };
        if dim == 0 {
            return Err(bad("dimension is zero"));
        }

        let vocab_min_count = r.u64()?;
        let mut entries = Vec::with_capacity(vocab_len);
        for _ in 0..vocab_len {
            let len = r.u32()? as usize;
            let mut bytes = vec![0u8; len];
            r.inner
                .read_exact(&mut bytes)
                .map_err(|e| bad(format!("truncated vocabulary: {}", e)))?;
            let token = String::from_utf8(bytes).map_err(|_| bad("token is not UTF-8"))?;
            entries.push((token, r.u64()?));
        }
        let vocab = Vocabulary::from_entries(entries, vocab_min_count)?;
        if vocab.len() != vocab_len {
            return Err(bad("vocabulary size mismatch"));
        }

        let input_rows = vocab_len + bucket_count;
        let input = Matrix::from_vec(input_rows, dim, r.f32s(input_rows * dim)?);
        let output = Matrix::from_vec(vocab_len, dim, r.f32s(vocab_len * dim)?);
        let mut trailing = [0u8; 1];
        if r.inner.read(&mut trailing).map_err(|e| bad(e.to_string()))? != 0 {
            return Err(bad("trailing bytes after output matrix"));
        }
        EmbeddingModel::from_parts(vocab, config, input, output)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_binary(BufWriter::new(file))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_binary(BufReader::new(file))
    }
}

/// Write `V dim` followed by one `token v1 ... vdim` line per vocabulary
/// token. Values use the shortest decimal form that parses back to the
/// same `f32`.
pub fn write_vec<E: Embeddings + ?Sized, W: Write>(emb: &E, mut w: W) -> Result<()> {
    let io = |e| Error::io("<vec stream>", e);
    writeln!(w, "{} {}", emb.tokens().len(), emb.dim()).map_err(io)?;
    let mut line = String::new();
    for (id, token) in emb.tokens().iter().enumerate() {
        line.clear();
        line.push_str(token);
        for v in emb.vocab_vector(id as u32).values() {
            line.push(' ');
            line.push_str(&v.to_string());
        }
        line.push('\n');
        w.write_all(line.as_bytes()).map_err(io)?;
    }
    w.flush().map_err(io)
}

/// Word vectors without subword information, as stored in `.vec` files.
#[derive(Clone, Debug, PartialEq)]
pub struct VecEmbeddings {
    tokens: Vec<String>,
    index: HashMap<String, u32>,
    vectors: Matrix,
}

impl VecEmbeddings {
    pub fn new(rows: Vec<(String, Vec<f32>)>) -> Result<Self> {
        let dim = rows.first().map_or(0, |r| r.1.len());
        let mut tokens = Vec::with_capacity(rows.len());
        let mut index = HashMap::with_capacity(rows.len());
        let mut data = Vec::with_capacity(rows.len() * dim);
        for (token, v) in rows {
            if v.len() != dim {
                return Err(Error::LengthMismatch(v.len(), dim));
            }
            if index.insert(token.clone(), tokens.len() as u32).is_some() {
                return Err(bad(format!("duplicate token `{}`", token)));
            }
            tokens.push(token);
            data.extend(v);
        }
        let n = tokens.len();
        Ok(VecEmbeddings {
            tokens,
            index,
            vectors: Matrix::from_vec(n, dim, data),
        })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

impl Embeddings for VecEmbeddings {
    fn dim(&self) -> usize {
        self.vectors.cols()
    }

    fn tokens(&self) -> &[String] {
        &self.tokens
    }

    fn token_id(&self, word: &str) -> Option<u32> {
        self.index.get(word).copied()
    }

    fn word_vector(&self, word: &str) -> Result<WordVector> {
        let id = self
            .token_id(word)
            .ok_or_else(|| Error::NoRepresentation(word.to_owned()))?;
        Ok(self.vocab_vector(id))
    }

    fn vocab_vector(&self, id: u32) -> WordVector {
        WordVector(self.vectors.row(id as usize).to_vec())
    }
}

/// Parse a `.vec` file.
pub fn read_vec<R: BufRead>(reader: R) -> Result<VecEmbeddings> {
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::parse(1, "empty .vec file"))?
        .map_err(|e| Error::parse(1, e.to_string()))?;
    let mut fields = header.split_whitespace();
    let (n, dim) = match (
        fields.next().and_then(|s| s.parse::<usize>().ok()),
        fields.next().and_then(|s| s.parse::<usize>().ok()),
        fields.next(),
    ) {
        (Some(n), Some(d), None) => (n, d),
        _ => return Err(Error::parse(1, "expected header `count dim`")),
    };

    let mut rows = Vec::with_capacity(n);
    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        let line = line.map_err(|e| Error::parse(lineno, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split(' ').filter(|s| !s.is_empty());
        let token = parts.next().unwrap().to_owned();
        let values = parts
            .map(|s| s.parse::<f32>().map_err(|_| Error::parse(lineno, format!("invalid number `{}`", s))))
            .collect::<Result<Vec<_>>>()?;
        if values.len() != dim {
            return Err(Error::parse(lineno, format!("expected {} values, got {}", dim, values.len())));
        }
        rows.push((token, values));
    }
    if rows.len() != n {
        return Err(Error::parse(1, format!("header declares {} vectors, found {}", n, rows.len())));
    }
    let mut emb = VecEmbeddings::new(rows)?;
    if n == 0 {
        emb.vectors = Matrix::zeros(0, dim);
    }
    Ok(emb)
}
