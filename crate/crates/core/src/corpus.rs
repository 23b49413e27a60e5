//! Text normalization, sentence splitting, tokenization and stop-word removal.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use regex::Regex;

use crate::{Error, Result};

/// Urdu full stop.
pub const URDU_FULL_STOP: char = '\u{06D4}';

const DEFAULT_REMOVAL_CLASS: &str = r#"[[\p{Po}()\[\]{}'"]--[\x{06D4}]]"#;

/// Characters replaced by a space during normalization.
///
/// The set is a regex character class. The default covers brackets,
/// single and double quotes and the Unicode `Po` (other punctuation)
/// category, minus the Urdu full stop so sentence boundaries survive
/// normalization.
#[derive(Clone, Debug)]
pub struct RemovalSet {
    class: Regex,
}

impl RemovalSet {
    /// Compile a removal set from a character class such as `[()\[\]"']`.
    pub fn from_class(class: &str) -> Result<Self> {
        let trimmed = class.trim();
        if !(trimmed.starts_with('[') && trimmed.ends_with(']')) {
            return Err(Error::InvalidRemovalClass(format!(
                "`{}` is not a bracketed character class",
                class
            )));
        }
        let class = Regex::new(trimmed).map_err(|e| Error::InvalidRemovalClass(e.to_string()))?;
        Ok(RemovalSet { class })
    }

    pub fn contains(&self, c: char) -> bool {
        let mut buf = [0u8; 4];
        self.class.is_match(c.encode_utf8(&mut buf))
    }

    pub fn as_str(&self) -> &str {
        self.class.as_str()
    }
}

impl Default for RemovalSet {
    fn default() -> Self {
        RemovalSet::from_class(DEFAULT_REMOVAL_CLASS).expect("default removal class compiles")
    }
}

/// Characters that end a sentence during tokenization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SentenceDelimiters(Vec<char>);

impl SentenceDelimiters {
    pub fn new(chars: impl IntoIterator<Item = char>) -> Self {
        let mut chars: Vec<char> = chars.into_iter().collect();
        if !chars.contains(&'\n') {
            chars.push('\n');
        }
        chars.sort_unstable();
        chars.dedup();
        SentenceDelimiters(chars)
    }

    pub fn contains(&self, c: char) -> bool {
        self.0.contains(&c)
    }

    pub fn chars(&self) -> &[char] {
        &self.0
    }
}

impl Default for SentenceDelimiters {
    fn default() -> Self {
        SentenceDelimiters::new(['\n', URDU_FULL_STOP])
    }
}

/// Normalized text: no removal-set characters, no runs of spaces and no
/// spaces at line ends.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct NormalizedText(String);

impl NormalizedText {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl fmt::Display for NormalizedText {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Replace every removal-set character by a space, collapse space runs and
/// trim spaces at the start and end of every line.
///
/// Whitespace other than newline (tabs, carriage returns, no-break spaces)
/// is treated as a space. Newlines are kept since they delimit sentences.
pub fn normalize(raw: &[u8], removal: &RemovalSet) -> Result<NormalizedText> {
    let text = std::str::from_utf8(raw).map_err(|e| Error::InvalidEncoding(e.valid_up_to()))?;
    Ok(normalize_str(text, removal))
}

/// [`normalize`] for text that is already known to be valid UTF-8.
pub fn normalize_str(text: &str, removal: &RemovalSet) -> NormalizedText {
    let replaced = removal.class.replace_all(text, " ");

    let mut out = String::with_capacity(replaced.len());
    for (i, line) in replaced.split('\n').enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let mut pending_space = false;
        let mut line_start = true;
        for c in line.chars() {
            if c.is_whitespace() {
                pending_space = true;
                continue;
            }
            if pending_space && !line_start {
                out.push(' ');
            }
            pending_space = false;
            line_start = false;
            out.push(c);
        }
    }

    NormalizedText(out)
}

/// Sentences of tokens. Tokens are non-empty and contain no whitespace.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TokenStream {
    sentences: Vec<Vec<String>>,
}

impl TokenStream {
    /// Build a stream from raw sentences, dropping empty tokens and empty
    /// sentences. Tokens containing whitespace are split.
    pub fn from_sentences<S, T>(sentences: impl IntoIterator<Item = S>) -> Self
    where
        S: IntoIterator<Item = T>,
        T: AsRef<str>,
    {
        let sentences = sentences
            .into_iter()
            .map(|s| {
                s.into_iter()
                    .flat_map(|t| {
                        t.as_ref()
                            .split_whitespace()
                            .map(str::to_owned)
                            .collect::<Vec<_>>()
                    })
                    .collect::<Vec<_>>()
            })
            .filter(|s| !s.is_empty())
            .collect();
        TokenStream { sentences }
    }

    pub fn sentences(&self) -> &[Vec<String>] {
        &self.sentences
    }

    pub fn into_sentences(self) -> Vec<Vec<String>> {
        self.sentences
    }

    pub fn n_sentences(&self) -> usize {
        self.sentences.len()
    }

    pub fn n_tokens(&self) -> usize {
        self.sentences.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.sentences.iter().flatten().map(String::as_str)
    }

    /// Write one sentence per line with space-separated tokens.
    pub fn write_to<W: Write>(&self, mut writer: W) -> io::Result<()> {
        for sentence in &self.sentences {
            writeln!(writer, "{}", sentence.join(" "))?;
        }
        Ok(())
    }
}

/// Split normalized text into sentences at the delimiters, then into
/// tokens at spaces.
pub fn tokenize(text: &NormalizedText, delimiters: &SentenceDelimiters) -> TokenStream {
    let sentences = text
        .as_str()
        .split(|c| delimiters.contains(c))
        .map(|s| s.split_whitespace().map(str::to_owned).collect::<Vec<_>>())
        .filter(|s| !s.is_empty())
        .collect();
    TokenStream { sentences }
}

/// Stop words, compared by exact string match.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StopList {
    words: HashSet<String>,
}

impl StopList {
    /// Build from entries; each entry is normalized with the default
    /// removal set and blank entries are ignored.
    pub fn new<T: AsRef<str>>(words: impl IntoIterator<Item = T>) -> Self {
        let removal = RemovalSet::default();
        let words = words
            .into_iter()
            .flat_map(|w| {
                normalize_str(w.as_ref(), &removal)
                    .as_str()
                    .split_whitespace()
                    .map(str::to_owned)
                    .collect::<Vec<_>>()
            })
            .collect();
        StopList { words }
    }

    /// Load a one-token-per-line UTF-8 file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        let text = std::str::from_utf8(&bytes).map_err(|e| Error::InvalidEncoding(e.valid_up_to()))?;
        Ok(StopList::new(text.lines()))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Drop stop words, preserving order. Sentences left empty are dropped.
pub fn remove_stopwords(stream: TokenStream, stops: &StopList) -> TokenStream {
    if stops.is_empty() {
        return stream;
    }
    let sentences = stream
        .sentences
        .into_iter()
        .map(|s| s.into_iter().filter(|t| !stops.contains(t)).collect::<Vec<_>>())
        .filter(|s| !s.is_empty())
        .collect();
    TokenStream { sentences }
}

/// Read, normalize and tokenize a corpus file.
pub fn read_corpus(
    path: impl AsRef<Path>,
    removal: &RemovalSet,
    delimiters: &SentenceDelimiters,
) -> Result<TokenStream> {
    let path = path.as_ref();
    let raw = fs::read(path).map_err(|e| Error::io(path, e))?;
    let text = normalize(&raw, removal)?;
    Ok(tokenize(&text, delimiters))
}
