//! On-disk index container.
//!
//! ```text
//! magic    "TKDI"
//! version  u16
//! header   n, d, sigma, g', k_max, variant tag, rank step   (u64 each)
//! sections (id u64, payload length in bytes u64, payload)*  until EOF
//! ```
//!
//! All integers are little-endian. Sections: 1 corpus (text bytes and the
//! document boundary bitmap), 2 wavelet tree (level by level), 3 sampled
//! suffix tree, 4 suffix array (optional; rebuilt from the text when
//! absent). Unknown section ids are skipped.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use thiserror::Error;

use crate::bits::{read_len, read_u64s, RankBitVector};
use crate::corpus::{Corpus, CorpusError};
use crate::engine::{IndexParams, TopKIndex};
use crate::sgst::{Sgst, Variant};
use crate::suffix::suffix_array;
use crate::wavelet::WaveletTree;

pub const MAGIC: &[u8; 4] = b"TKDI";
pub const VERSION: u16 = 1;

pub const SECTION_CORPUS: u64 = 1;
pub const SECTION_WAVELET: u64 = 2;
pub const SECTION_SGST: u64 = 3;
pub const SECTION_SUFFIX_ARRAY: u64 = 4;

#[derive(Debug, Error)]
pub enum ContainerError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("not an index file (bad magic)")]
    BadMagic,
    #[error("unsupported format version {found} (expected {expected})")]
    VersionMismatch { found: u16, expected: u16 },
    #[error("missing required section {0}")]
    MissingSection(u64),
    #[error("section {id}: {reason}")]
    BadSection { id: u64, reason: String },
    #[error("header does not match the stored data: {0}")]
    HeaderMismatch(&'static str),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SaveOptions {
    /// Store the suffix array instead of rebuilding it on load.
    pub include_suffix_array: bool,
}

pub fn write_index<W: Write>(
    index: &TopKIndex,
    out: &mut W,
    options: SaveOptions,
) -> Result<(), ContainerError> {
    let p = index.params();
    let corpus = index.corpus();
    out.write_all(MAGIC)?;
    out.write_u16::<LittleEndian>(VERSION)?;
    for v in [
        corpus.len() as u64,
        corpus.doc_count() as u64,
        corpus.sigma() as u64,
        p.g_prime as u64,
        p.k_max as u64,
        p.variant.tag(),
        p.rank_step as u64,
    ] {
        out.write_u64::<LittleEndian>(v)?;
    }

    let mut payload = Vec::new();
    payload.write_u64::<LittleEndian>(corpus.len() as u64)?;
    payload.write_all(corpus.text())?;
    corpus.boundaries().write_to(&mut payload)?;
    write_section(out, SECTION_CORPUS, &payload)?;

    payload.clear();
    index.wavelet().write_to(&mut payload)?;
    write_section(out, SECTION_WAVELET, &payload)?;

    payload.clear();
    index.sgst().write_to(&mut payload)?;
    write_section(out, SECTION_SGST, &payload)?;

    if options.include_suffix_array {
        payload.clear();
        let sa = index.suffix_array();
        payload.write_u64::<LittleEndian>(sa.len() as u64)?;
        for &p in sa {
            payload.write_u64::<LittleEndian>(p as u64)?;
        }
        write_section(out, SECTION_SUFFIX_ARRAY, &payload)?;
    }
    Ok(())
}

fn write_section<W: Write>(out: &mut W, id: u64, payload: &[u8]) -> io::Result<()> {
    out.write_u64::<LittleEndian>(id)?;
    out.write_u64::<LittleEndian>(payload.len() as u64)?;
    out.write_all(payload)
}

pub fn read_index<R: Read>(input: &mut R) -> Result<TopKIndex, ContainerError> {
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(ContainerError::BadMagic);
    }
    let version = input.read_u16::<LittleEndian>()?;
    if version != VERSION {
        return Err(ContainerError::VersionMismatch {
            found: version,
            expected: VERSION,
        });
    }
    let n = read_len(input)?;
    let d = read_len(input)?;
    let sigma = read_len(input)?;
    let g_prime = read_len(input)?;
    let k_max = read_len(input)?;
    let variant = Variant::from_tag(input.read_u64::<LittleEndian>()?)
        .ok_or(ContainerError::HeaderMismatch("unknown variant tag"))?;
    let rank_step = read_len(input)?;
    let params = IndexParams {
        g_prime,
        k_max,
        variant,
        rank_step,
    };
    params
        .validate()
        .map_err(|_| ContainerError::HeaderMismatch("invalid build parameters"))?;

    let mut corpus = None;
    let mut wavelet = None;
    let mut sgst = None;
    let mut sa = None;
    loop {
        let id = match input.read_u64::<LittleEndian>() {
            Ok(id) => id,
            Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => break,
            Err(e) => return Err(e.into()),
        };
        let len = input.read_u64::<LittleEndian>()?;
        let mut payload = Vec::new();
        input.take(len).read_to_end(&mut payload)?;
        if payload.len() as u64 != len {
            return Err(ContainerError::BadSection {
                id,
                reason: "truncated payload".into(),
            });
        }
        let bad = |e: io::Error| ContainerError::BadSection {
            id,
            reason: e.to_string(),
        };
        let mut cursor = payload.as_slice();
        match id {
            SECTION_CORPUS => {
                let text_len = read_len(&mut cursor).map_err(bad)?;
                if text_len > cursor.len() {
                    return Err(bad(io::ErrorKind::UnexpectedEof.into()));
                }
                let text = cursor[..text_len].to_vec();
                cursor = &cursor[text_len..];
                let bounds = RankBitVector::read_from(&mut cursor).map_err(bad)?;
                corpus = Some(Corpus::from_parts(text, bounds)?);
            }
            SECTION_WAVELET => {
                wavelet = Some(WaveletTree::read_from(&mut cursor).map_err(bad)?);
            }
            SECTION_SGST => {
                sgst = Some(Sgst::read_from(&mut cursor).map_err(bad)?);
            }
            SECTION_SUFFIX_ARRAY => {
                let count = read_len(&mut cursor).map_err(bad)?;
                let values = read_u64s(&mut cursor, count).map_err(bad)?;
                sa = Some(values.into_iter().map(|v| v as usize).collect::<Vec<_>>());
            }
            _ => continue,
        }
        if !cursor.is_empty() {
            return Err(ContainerError::BadSection {
                id,
                reason: "trailing bytes".into(),
            });
        }
    }

    let corpus = corpus.ok_or(ContainerError::MissingSection(SECTION_CORPUS))?;
    let wavelet = wavelet.ok_or(ContainerError::MissingSection(SECTION_WAVELET))?;
    let sgst = sgst.ok_or(ContainerError::MissingSection(SECTION_SGST))?;
    if corpus.len() != n || corpus.doc_count() != d || corpus.sigma() != sigma {
        return Err(ContainerError::HeaderMismatch("corpus dimensions"));
    }
    if wavelet.len() != n || wavelet.doc_count() as usize != d {
        return Err(ContainerError::HeaderMismatch("wavelet tree dimensions"));
    }
    if sgst.params() != params.sgst() || sgst.nodes().any(|v| v.interval.end > n) {
        return Err(ContainerError::HeaderMismatch("sampled tree parameters"));
    }
    if wavelet
        .levels()
        .iter()
        .any(|l| l.sample_step() != rank_step)
    {
        return Err(ContainerError::HeaderMismatch("rank sample step"));
    }
    let sa = match sa {
        Some(sa) => {
            if !is_permutation(&sa, n) {
                return Err(ContainerError::BadSection {
                    id: SECTION_SUFFIX_ARRAY,
                    reason: "not a permutation of the text positions".into(),
                });
            }
            sa
        }
        None => suffix_array(corpus.text()),
    };
    Ok(TopKIndex::from_parts(params, corpus, sa, wavelet, sgst))
}

fn is_permutation(v: &[usize], n: usize) -> bool {
    if v.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    v.iter()
        .all(|&p| p < n && !std::mem::replace(&mut seen[p], true))
}

pub fn save(index: &TopKIndex, path: &Path, options: SaveOptions) -> Result<(), ContainerError> {
    let mut out = BufWriter::new(File::create(path)?);
    write_index(index, &mut out, options)?;
    out.flush()?;
    Ok(())
}

pub fn load(path: &Path) -> Result<TopKIndex, ContainerError> {
    read_index(&mut BufReader::new(File::open(path)?))
}
