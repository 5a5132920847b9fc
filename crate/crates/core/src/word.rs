use crate::error::{GfError, Result};

/// A finite string of positive digits indexing an inverse-branch composition
/// and its cylinder. The empty word is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<u32>);

impl Word {
    pub fn new(digits: Vec<u32>) -> Result<Self> {
        if digits.iter().any(|&d| d == 0) {
            return Err(GfError::Domain("word digits must be >= 1".into()));
        }
        Ok(Word(digits))
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn digits(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Digit string reversed.
    pub fn mirror(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    /// Drops the first digit (one application of the underlying map).
    pub fn shift(&self) -> Word {
        Word(self.0.iter().skip(1).copied().collect())
    }

    /// Drops the last digit.
    pub fn parent(&self) -> Word {
        let mut d = self.0.clone();
        d.pop();
        Word(d)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut d = self.0.clone();
        d.extend_from_slice(&other.0);
        Word(d)
    }

    pub fn prefix(&self, k: usize) -> Word {
        Word(self.0[..k].to_vec())
    }

    pub fn suffix(&self, k: usize) -> Word {
        Word(self.0[self.0.len() - k..].to_vec())
    }
}

impl std::fmt::Display for Word {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, ")")
    }
}

/// An ordered tuple of equal-length words, the operand of the block
/// concatenation operators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    words: Vec<Word>,
}

impl Block {
    pub fn new(words: Vec<Word>) -> Result<Self> {
        if let Some(first) = words.first() {
            if words.iter().any(|w| w.len() != first.len()) {
                return Err(GfError::Structure(
                    "block members must share one length".into(),
                ));
            }
        }
        Ok(Block { words })
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn arity(&self) -> usize {
        self.words.len()
    }
}

/// Interleaves `a0 b1 a1 b2 ... bk ak`; requires |A| = |B| + 1.
pub fn star_concat(a: &Block, b: &Block) -> Result<Word> {
    check_arity(a, b)?;
    let mut out = a.words[0].clone();
    for (bw, aw) in b.words.iter().zip(a.words.iter().skip(1)) {
        out = out.concat(bw).concat(aw);
    }
    Ok(out)
}

/// Interleaves `a0 b1 a1 ... a_{k-1} bk` (the star word without its last
/// `a`-factor); requires |A| = |B| + 1.
pub fn hash_concat(a: &Block, b: &Block) -> Result<Word> {
    check_arity(a, b)?;
    let mut out = a.words[0].clone();
    for (i, bw) in b.words.iter().enumerate() {
        out = out.concat(bw);
        if i + 1 < b.words.len() {
            out = out.concat(&a.words[i + 1]);
        }
    }
    Ok(out)
}

fn check_arity(a: &Block, b: &Block) -> Result<()> {
    if a.arity() != b.arity() + 1 {
        return Err(GfError::Structure(format!(
            "arity mismatch: |A| = {} must equal |B| + 1 = {}",
            a.arity(),
            b.arity() + 1
        )));
    }
    if a.arity() > 0
        && b.arity() > 0
        && a.words[0].len() != b.words[0].len()
    {
        return Err(GfError::Structure(
            "blocks must share the word length".into(),
        ));
    }
    Ok(())
}
