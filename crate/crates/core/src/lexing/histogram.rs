use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Category, Lexer, Token, TokenDefinition};
use crate::error::{Error, Result};

pub const TOKHIST_FORMAT: &str = "tokhist.v1";

/// Longest vocabulary key kept, in characters.
pub const MAX_TOKEN_CHARS: usize = 512;

/// Category label used for category-bigram entries in `tokhist.v1`.
pub const BIGRAM_LABEL: &str = "syntax-bigram";

/// Per-category token vocabularies with occurrence counts.
///
/// Besides the unigram vocabularies, the histogram keeps a vocabulary of
/// adjacent-token keys `(category, category, second token)` used for the
/// structural overlap feature. Bigrams are not part of `total`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenHistogram {
    language: String,
    vocab: BTreeMap<Category, BTreeMap<String, u64>>,
    bigrams: BTreeMap<String, u64>,
    total: u64,
}

impl TokenHistogram {
    pub fn new(language: impl Into<String>) -> Self {
        TokenHistogram {
            language: language.into(),
            vocab: BTreeMap::new(),
            bigrams: BTreeMap::new(),
            total: 0,
        }
    }

    /// Histogram of one token stream. Returns the number of keys that were
    /// truncated to [`MAX_TOKEN_CHARS`].
    pub fn from_tokens(language: impl Into<String>, tokens: &[Token], case_insensitive: bool) -> (Self, usize) {
        let mut h = TokenHistogram::new(language);
        let truncated = h.add_tokens(tokens, case_insensitive);
        (h, truncated)
    }

    pub fn add_tokens(&mut self, tokens: &[Token], case_insensitive: bool) -> usize {
        let mut truncated = 0;
        let mut prev: Option<Category> = None;
        for tok in tokens {
            let (key, cut) = vocabulary_key(&tok.text, case_insensitive);
            truncated += usize::from(cut);
            if let Some(p) = prev {
                *self
                    .bigrams
                    .entry(bigram_key(p, tok.category, &key))
                    .or_insert(0) += 1;
            }
            *self
                .vocab
                .entry(tok.category)
                .or_default()
                .entry(key)
                .or_insert(0) += 1;
            self.total += 1;
            prev = Some(tok.category);
        }
        truncated
    }

    /// Adds every count of `other` into `self`.
    pub fn merge(&mut self, other: &TokenHistogram) {
        for (cat, words) in &other.vocab {
            let mine = self.vocab.entry(*cat).or_default();
            for (w, n) in words {
                *mine.entry(w.clone()).or_insert(0) += n;
            }
        }
        for (k, n) in &other.bigrams {
            *self.bigrams.entry(k.clone()).or_insert(0) += n;
        }
        self.total += other.total;
    }

    pub fn language(&self) -> &str {
        &self.language
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn count(&self, category: Category, token: &str) -> u64 {
        self.vocab
            .get(&category)
            .and_then(|m| m.get(token))
            .copied()
            .unwrap_or(0)
    }

    pub fn category_total(&self, category: Category) -> u64 {
        self.vocab.get(&category).map_or(0, |m| m.values().sum())
    }

    pub fn vocabulary(&self, category: Category) -> BTreeSet<&str> {
        self.vocab
            .get(&category)
            .map(|m| m.keys().map(String::as_str).collect())
            .unwrap_or_default()
    }

    pub fn entries(&self, category: Category) -> impl Iterator<Item = (&str, u64)> {
        self.vocab
            .get(&category)
            .into_iter()
            .flat_map(|m| m.iter().map(|(k, v)| (k.as_str(), *v)))
    }

    pub fn bigram_vocabulary(&self) -> BTreeSet<&str> {
        self.bigrams.keys().map(String::as_str).collect()
    }

    pub fn bigram_count(&self, key: &str) -> u64 {
        self.bigrams.get(key).copied().unwrap_or(0)
    }

    /// Union of all category vocabularies as plain token strings.
    pub fn all_tokens(&self) -> BTreeSet<&str> {
        self.vocab
            .values()
            .flat_map(|m| m.keys().map(String::as_str))
            .collect()
    }

    pub fn has_category(&self, category: Category) -> bool {
        self.vocab.get(&category).is_some_and(|m| !m.is_empty())
    }

    /// Serializes to `tokhist.v1`: a header line
    /// `tokhist.v1<TAB>language<TAB>total`, then `category<TAB>token<TAB>count`
    /// lines sorted by (category, token). Tabs, newlines, carriage returns
    /// and backslashes inside tokens are backslash-escaped.
    pub fn to_tokhist(&self) -> String {
        let mut lines: Vec<(&str, &str, u64)> = Vec::new();
        for (cat, words) in &self.vocab {
            for (w, n) in words {
                lines.push((cat.as_str(), w, *n));
            }
        }
        for (k, n) in &self.bigrams {
            lines.push((BIGRAM_LABEL, k, *n));
        }
        lines.sort();
        let mut out = format!("{TOKHIST_FORMAT}\t{}\t{}\n", escape(&self.language), self.total);
        for (cat, tok, n) in lines {
            out.push_str(cat);
            out.push('\t');
            out.push_str(&escape(tok));
            out.push('\t');
            out.push_str(&n.to_string());
            out.push('\n');
        }
        out
    }

    pub fn from_tokhist(text: &str, origin: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::parse(origin, 1, "missing header"))?;
        let mut parts = header.split('\t');
        let tag = parts.next().unwrap_or_default();
        if tag != TOKHIST_FORMAT {
            return Err(Error::FormatVersion {
                path: origin.to_string(),
                expected: TOKHIST_FORMAT.to_string(),
                found: tag.to_string(),
            });
        }
        let (Some(lang), Some(total), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::parse(origin, 1, "header must be `tokhist.v1<TAB>language<TAB>total`"));
        };
        let declared: u64 = total
            .parse()
            .map_err(|_| Error::parse(origin, 1, format!("bad total `{total}`")))?;
        let mut h = TokenHistogram::new(unescape(lang));
        for (i, line) in lines.enumerate() {
            let lineno = i + 2;
            let fields: Vec<&str> = line.split('\t').collect();
            let [cat, tok, n] = fields[..] else {
                return Err(Error::parse(origin, lineno, "expected 3 tab-separated fields"));
            };
            let n: u64 = n
                .parse()
                .map_err(|_| Error::parse(origin, lineno, format!("bad count `{n}`")))?;
            if n == 0 {
                return Err(Error::parse(origin, lineno, "counts must be at least 1"));
            }
            let tok = unescape(tok);
            if cat == BIGRAM_LABEL {
                *h.bigrams.entry(tok).or_insert(0) += n;
            } else {
                let cat: Category = cat.parse().map_err(|e: String| Error::parse(origin, lineno, e))?;
                *h.vocab.entry(cat).or_default().entry(tok).or_insert(0) += n;
                h.total += n;
            }
        }
        if h.total != declared {
            return Err(Error::parse(
                origin,
                1,
                format!("header total {declared} but counts sum to {}", h.total),
            ));
        }
        Ok(h)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_tokhist(&text, &path.display().to_string())
    }
}

fn vocabulary_key(text: &str, case_insensitive: bool) -> (String, bool) {
    let folded = if case_insensitive {
        text.to_lowercase()
    } else {
        text.to_string()
    };
    match folded.char_indices().nth(MAX_TOKEN_CHARS) {
        Some((cut, _)) => (folded[..cut].to_string(), true),
        None => (folded, false),
    }
}

fn bigram_key(first: Category, second: Category, token: &str) -> String {
    format!("{first}>{second}:{token}")
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            _ => out.push(c),
        }
    }
    out
}

fn unescape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some(other) => out.push(other),
            None => out.push('\\'),
        }
    }
    out
}

/// Result of walking a corpus directory.
#[derive(Debug, Clone)]
pub struct HistogramBuild {
    pub histogram: TokenHistogram,
    /// Files that contributed, in processing order.
    pub files: Vec<PathBuf>,
    pub diagnostics: Vec<String>,
}

/// Lists files under `root` (recursively) whose names match `def`'s
/// extensions, sorted by path.
pub fn corpus_files(root: &Path, def: &TokenDefinition) -> Result<Vec<PathBuf>> {
    let mut found = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        let entries = std::fs::read_dir(&dir).map_err(|e| Error::io(&dir, e))?;
        for entry in entries {
            let entry = entry.map_err(|e| Error::io(&dir, e))?;
            let path = entry.path();
            let file_type = entry.file_type().map_err(|e| Error::io(&path, e))?;
            if file_type.is_dir() {
                stack.push(path);
            } else if def.matches_path(&path) {
                found.push(path);
            }
        }
    }
    found.sort();
    Ok(found)
}

/// Tokenizes a corpus into one histogram.
///
/// With `max_files`, a seeded uniform sample (without replacement) of the
/// sorted file list is processed. Unreadable or non-UTF-8 files are skipped
/// with a diagnostic.
pub fn build_histogram(
    corpus_root: &Path,
    def: &TokenDefinition,
    max_files: Option<usize>,
    seed: u64,
) -> Result<HistogramBuild> {
    if !corpus_root.is_dir() {
        return Err(Error::io(
            corpus_root,
            std::io::Error::new(std::io::ErrorKind::NotFound, "corpus root is not a directory"),
        ));
    }
    let mut files = corpus_files(corpus_root, def)?;
    if let Some(k) = max_files {
        if k < files.len() {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut picked = rand::seq::index::sample(&mut rng, files.len(), k).into_vec();
            picked.sort_unstable();
            files = picked.into_iter().map(|i| files[i].clone()).collect();
        }
    }
    build_histogram_from_files(corpus_root, &files, def)
}

/// Histogram over an explicit file list. Listing a file twice counts it twice.
pub fn build_histogram_from_files(
    corpus_root: &Path,
    files: &[PathBuf],
    def: &TokenDefinition,
) -> Result<HistogramBuild> {
    let lexer = Lexer::new(def);
    let mut histogram = TokenHistogram::new(&def.language);
    let mut used = Vec::new();
    let mut diagnostics = Vec::new();
    for path in files {
        let text = match std::fs::read(path) {
            Ok(bytes) => match String::from_utf8(bytes) {
                Ok(t) => t,
                Err(_) => {
                    diagnostics.push(format!("{}: skipped, not valid UTF-8", path.display()));
                    continue;
                }
            },
            Err(e) => {
                diagnostics.push(format!("{}: skipped, {e}", path.display()));
                continue;
            }
        };
        let stream = lexer.tokenize(&text);
        for d in &stream.diagnostics {
            diagnostics.push(format!("{}@{}: {}", path.display(), d.offset, d.message));
        }
        let truncated = histogram.add_tokens(&stream.tokens, def.case_insensitive);
        if truncated > 0 {
            diagnostics.push(format!(
                "{}: {truncated} token(s) truncated to {MAX_TOKEN_CHARS} characters",
                path.display()
            ));
        }
        used.push(path.clone());
    }
    if used.is_empty() {
        return Err(Error::EmptyCorpus(corpus_root.to_path_buf()));
    }
    Ok(HistogramBuild {
        histogram,
        files: used,
        diagnostics,
    })
}
