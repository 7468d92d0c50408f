//! Document collections and their sentinel-terminated concatenation.

use std::fmt;
use std::ops::Range;

use thiserror::Error;

use crate::bits::{BitBuf, RankBitVector};

/// Symbol terminating every document in the concatenated text. It sorts
/// before every other byte and may not appear inside a document.
pub const SENTINEL: u8 = 0;

/// 1-based document identifier, in ingestion order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DocId(pub u32);

impl DocId {
    pub fn get(self) -> u32 {
        self.0
    }
}

impl fmt::Display for DocId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorpusError {
    #[error("document {index} is empty")]
    EmptyDocument { index: usize },
    #[error("document {index} contains the reserved sentinel byte at offset {offset}")]
    SentinelInDocument { index: usize, offset: usize },
    #[error("text position {pos} is out of range (text length {len})")]
    OutOfRange { pos: usize, len: usize },
    #[error("a collection needs at least one document")]
    NoDocuments,
    #[error("too many documents for 32-bit ids")]
    TooManyDocuments,
    #[error("text and boundary bitmap are inconsistent")]
    Malformed,
}

/// An ordered document collection stored as `D1 $ D2 $ ... Dd $`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    text: Vec<u8>,
    boundaries: RankBitVector,
    doc_count: usize,
    sigma: usize,
}

impl Corpus {
    pub fn ingest<I, S>(documents: I) -> Result<Self, CorpusError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        let mut text = Vec::new();
        let mut ends = BitBuf::new();
        let mut doc_count = 0usize;
        for (index, doc) in documents.into_iter().enumerate() {
            let doc = doc.as_ref();
            if doc.is_empty() {
                return Err(CorpusError::EmptyDocument { index });
            }
            if let Some(offset) = doc.iter().position(|&b| b == SENTINEL) {
                return Err(CorpusError::SentinelInDocument { index, offset });
            }
            text.extend_from_slice(doc);
            text.push(SENTINEL);
            for _ in 0..doc.len() {
                ends.push(false);
            }
            ends.push(true);
            doc_count += 1;
        }
        if doc_count == 0 {
            return Err(CorpusError::NoDocuments);
        }
        if doc_count > u32::MAX as usize {
            return Err(CorpusError::TooManyDocuments);
        }
        let sigma = count_symbols(&text);
        Ok(Self {
            text,
            boundaries: RankBitVector::new(ends),
            doc_count,
            sigma,
        })
    }

    /// Reassembles a corpus from a stored text and boundary bitmap.
    pub fn from_parts(text: Vec<u8>, boundaries: RankBitVector) -> Result<Self, CorpusError> {
        if text.len() != boundaries.len() || text.is_empty() {
            return Err(CorpusError::Malformed);
        }
        let consistent = text
            .iter()
            .zip(boundaries.iter())
            .all(|(&c, end)| (c == SENTINEL) == end)
            && *text.last().unwrap() == SENTINEL;
        let no_empty = text
            .windows(2)
            .all(|w| !(w[0] == SENTINEL && w[1] == SENTINEL))
            && text[0] != SENTINEL;
        if !consistent || !no_empty {
            return Err(CorpusError::Malformed);
        }
        let doc_count = boundaries.count_ones();
        let sigma = count_symbols(&text);
        Ok(Self {
            text,
            boundaries,
            doc_count,
            sigma,
        })
    }

    /// Concatenated text including sentinels.
    pub fn text(&self) -> &[u8] {
        &self.text
    }

    pub fn len(&self) -> usize {
        self.text.len()
    }

    pub fn is_empty(&self) -> bool {
        self.text.is_empty()
    }

    pub fn doc_count(&self) -> usize {
        self.doc_count
    }

    /// Number of distinct non-sentinel symbols.
    pub fn sigma(&self) -> usize {
        self.sigma
    }

    pub fn boundaries(&self) -> &RankBitVector {
        &self.boundaries
    }

    /// Document owning text position `pos` (0-based). A sentinel belongs to
    /// the document it terminates.
    pub fn doc_of_position(&self, pos: usize) -> Result<DocId, CorpusError> {
        if pos >= self.text.len() {
            return Err(CorpusError::OutOfRange {
                pos,
                len: self.text.len(),
            });
        }
        Ok(DocId(1 + self.boundaries.rank1(pos) as u32))
    }

    /// Text range of a document, without its sentinel.
    pub fn doc_range(&self, doc: DocId) -> Option<Range<usize>> {
        let i = doc.0 as usize;
        if i == 0 || i > self.doc_count {
            return None;
        }
        let start = if i == 1 {
            0
        } else {
            self.boundaries.select1(i - 2) + 1
        };
        let end = self.boundaries.select1(i - 1);
        Some(start..end)
    }

    pub fn documents(&self) -> impl Iterator<Item = &[u8]> + '_ {
        self.text.split(|&b| b == SENTINEL).take(self.doc_count)
    }

    /// The text with sentinels rendered as `$`, for display.
    pub fn display_text(&self) -> String {
        self.text
            .iter()
            .map(|&b| if b == SENTINEL { '$' } else { b as char })
            .collect()
    }
}

fn count_symbols(text: &[u8]) -> usize {
    let mut seen = [false; 256];
    for &b in text {
        seen[b as usize] = true;
    }
    seen[1..].iter().filter(|&&s| s).count()
}
