use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::TokenDefinition;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Category {
    Name,
    Keyword,
    LiteralNumber,
    LiteralString,
    Operator,
    Punctuation,
    Comment,
    Text,
}

impl Category {
    pub const ALL: [Category; 8] = [
        Category::Name,
        Category::Keyword,
        Category::LiteralNumber,
        Category::LiteralString,
        Category::Operator,
        Category::Punctuation,
        Category::Comment,
        Category::Text,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Name => "name",
            Category::Keyword => "keyword",
            Category::LiteralNumber => "literal-number",
            Category::LiteralString => "literal-string",
            Category::Operator => "operator",
            Category::Punctuation => "punctuation",
            Category::Comment => "comment",
            Category::Text => "text",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Category::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown token category `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub category: Category,
    pub text: String,
    /// Byte offset of the token in the input.
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub offset: usize,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TokenStream {
    pub tokens: Vec<Token>,
    pub diagnostics: Vec<Diagnostic>,
}

impl TokenStream {
    pub fn pairs(&self) -> Vec<(Category, &str)> {
        self.tokens.iter().map(|t| (t.category, t.text.as_str())).collect()
    }
}

#[derive(Debug, Clone, Copy)]
enum Opener<'d> {
    Line,
    Block(&'d str),
    Str(&'d str, Option<char>),
}

/// A lexer compiled from a [`TokenDefinition`].
pub struct Lexer<'d> {
    def: &'d TokenDefinition,
    keywords: HashSet<String>,
    // Comment and string openers, longest first.
    openers: Vec<(&'d str, Opener<'d>)>,
}

impl<'d> Lexer<'d> {
    pub fn new(def: &'d TokenDefinition) -> Self {
        let keywords = def
            .keywords
            .iter()
            .map(|k| {
                if def.case_insensitive {
                    k.to_lowercase()
                } else {
                    k.clone()
                }
            })
            .collect();
        let mut openers: Vec<(&str, Opener)> = Vec::new();
        for (open, close) in &def.block_comments {
            openers.push((open, Opener::Block(close)));
        }
        for prefix in &def.line_comments {
            openers.push((prefix, Opener::Line));
        }
        for s in &def.strings {
            openers.push((&s.open, Opener::Str(&s.close, s.escape)));
        }
        openers.sort_by(|a, b| b.0.len().cmp(&a.0.len()));
        Lexer {
            def,
            keywords,
            openers,
        }
    }

    pub fn is_keyword(&self, word: &str) -> bool {
        if self.def.case_insensitive {
            self.keywords.contains(&word.to_lowercase())
        } else {
            self.keywords.contains(word)
        }
    }

    pub fn tokenize(&self, text: &str) -> TokenStream {
        let mut out = TokenStream::default();
        let mut pos = 0;
        while pos < text.len() {
            let rest = &text[pos..];
            let c = rest.chars().next().expect("non-empty remainder");
            if c.is_whitespace() {
                pos += c.len_utf8();
                continue;
            }
            let (category, len) = self.next_token(rest, pos, &mut out.diagnostics);
            out.tokens.push(Token {
                category,
                text: rest[..len].to_string(),
                offset: pos,
            });
            pos += len;
        }
        out
    }

    fn next_token(&self, rest: &str, offset: usize, diags: &mut Vec<Diagnostic>) -> (Category, usize) {
        for &(open, kind) in &self.openers {
            if !rest.starts_with(open) {
                continue;
            }
            return match kind {
                Opener::Line => {
                    let end = rest.find(['\n', '\r']).unwrap_or(rest.len());
                    (Category::Comment, end)
                }
                Opener::Block(close) => match rest[open.len()..].find(close) {
                    Some(i) => (Category::Comment, open.len() + i + close.len()),
                    None => {
                        diags.push(Diagnostic {
                            offset,
                            message: format!("unterminated block comment `{open}`"),
                        });
                        (Category::Text, rest.len())
                    }
                },
                Opener::Str(close, escape) => match scan_string(rest, open.len(), close, escape) {
                    Some(len) => (Category::LiteralString, len),
                    None => {
                        diags.push(Diagnostic {
                            offset,
                            message: format!("unterminated string `{open}`"),
                        });
                        (Category::Text, rest.len())
                    }
                },
            };
        }

        let c = rest.chars().next().expect("non-empty remainder");
        if let Some(len) = self.scan_number(rest) {
            return (Category::LiteralNumber, len);
        }
        if self.is_ident_start(c) {
            let len = rest
                .char_indices()
                .find(|&(_, ch)| !self.is_ident_continue(ch))
                .map_or(rest.len(), |(i, _)| i);
            let category = if self.is_keyword(&rest[..len]) {
                Category::Keyword
            } else {
                Category::Name
            };
            return (category, len);
        }
        if self.def.operators.contains(c) {
            let len = rest
                .char_indices()
                .find(|&(_, ch)| !self.def.operators.contains(ch))
                .map_or(rest.len(), |(i, _)| i);
            return (Category::Operator, len);
        }
        if self.def.punctuation.contains(c) {
            return (Category::Punctuation, c.len_utf8());
        }
        (Category::Text, c.len_utf8())
    }

    fn is_ident_start(&self, c: char) -> bool {
        c.is_alphabetic() || self.def.identifier.start_extra.contains(c)
    }

    fn is_ident_continue(&self, c: char) -> bool {
        c.is_alphanumeric() || self.def.identifier.continue_extra.contains(c)
    }

    fn scan_number(&self, rest: &str) -> Option<usize> {
        let rule = &self.def.numbers;
        let b = rest.as_bytes();
        let digit_run = |from: usize, radix: u32| -> usize {
            let mut i = from;
            while i < b.len() {
                let ch = b[i] as char;
                if ch.is_digit(radix) || (rule.underscores && ch == '_' && i > from) {
                    i += 1;
                } else {
                    break;
                }
            }
            i
        };
        let is_digit_at = |i: usize| b.get(i).is_some_and(u8::is_ascii_digit);

        let mut end;
        if b[0] == b'0' && b.len() > 2 {
            let radix = match b[1] {
                b'x' | b'X' if rule.hex => 16,
                b'b' | b'B' if rule.binary => 2,
                b'o' | b'O' if rule.octal => 8,
                _ => 0,
            };
            if radix != 0 && (b[2] as char).is_digit(radix) {
                end = digit_run(2, radix);
                return Some(self.scan_suffix(rest, end));
            }
        }

        if is_digit_at(0) {
            end = digit_run(0, 10);
        } else if rule.float && b[0] == b'.' && is_digit_at(1) {
            end = 0;
        } else {
            return None;
        }
        if rule.float {
            if b.get(end) == Some(&b'.') && is_digit_at(end + 1) {
                end = digit_run(end + 1, 10);
            }
            if matches!(b.get(end), Some(b'e' | b'E')) {
                let sign = usize::from(matches!(b.get(end + 1), Some(b'+' | b'-')));
                if is_digit_at(end + 1 + sign) {
                    end = digit_run(end + 1 + sign, 10);
                }
            }
        }
        Some(self.scan_suffix(rest, end))
    }

    fn scan_suffix(&self, rest: &str, mut end: usize) -> usize {
        let suffixes = &self.def.numbers.suffixes;
        while let Some(ch) = rest[end..].chars().next() {
            if suffixes.contains(ch) {
                end += ch.len_utf8();
            } else {
                break;
            }
        }
        end
    }
}

/// Length of a string literal starting at the beginning of `rest`, or
/// `None` when it never closes.
fn scan_string(rest: &str, open_len: usize, close: &str, escape: Option<char>) -> Option<usize> {
    let mut i = open_len;
    while i < rest.len() {
        let tail = &rest[i..];
        if tail.starts_with(close) {
            return Some(i + close.len());
        }
        let ch = tail.chars().next()?;
        i += ch.len_utf8();
        if Some(ch) == escape {
            if let Some(next) = rest[i..].chars().next() {
                i += next.len_utf8();
            }
        }
    }
    None
}

/// Tokenizes `text` with a one-off lexer for `def`.
pub fn tokenize(text: &str, def: &TokenDefinition) -> TokenStream {
    Lexer::new(def).tokenize(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexing::DefinitionSet;
    use Category::*;

    fn minimal() -> TokenDefinition {
        TokenDefinition::from_toml(
            r#"
format = "langdef.v1"
language = "mini"
extensions = [".mini"]
keywords = ["if"]
operators = "="
"#,
            "mini",
        )
        .unwrap()
    }

    fn c_def() -> TokenDefinition {
        DefinitionSet::shipped().get("c").unwrap().clone()
    }

    #[test]
    fn smallest_mixed_stream() {
        let ts = tokenize("x=1", &minimal());
        assert_eq!(
            ts.pairs(),
            vec![(Name, "x"), (Operator, "="), (LiteralNumber, "1")]
        );
    }

    #[test]
    fn empty_input_has_no_tokens() {
        let ts = tokenize("", &minimal());
        assert!(ts.tokens.is_empty() && ts.diagnostics.is_empty());
    }

    #[test]
    fn keywords_take_precedence_over_names() {
        let ts = tokenize("if iff", &minimal());
        assert_eq!(ts.pairs(), vec![(Keyword, "if"), (Name, "iff")]);
    }

    #[test]
    fn unterminated_block_comment_becomes_text() {
        let ts = tokenize("int x; /* open", &c_def());
        let last = ts.tokens.last().unwrap();
        assert_eq!((last.category, last.text.as_str()), (Text, "/* open"));
        assert_eq!(ts.diagnostics.len(), 1);
    }

    #[test]
    fn unterminated_string_becomes_text() {
        let ts = tokenize("s = \"abc", &c_def());
        assert_eq!(ts.tokens.last().unwrap().category, Text);
        assert_eq!(ts.diagnostics.len(), 1);
    }

    #[test]
    fn escapes_do_not_close_strings() {
        let ts = tokenize(r#""a\"b" x"#, &c_def());
        assert_eq!(ts.pairs(), vec![(LiteralString, r#""a\"b""#), (Name, "x")]);
    }

    #[test]
    fn c_numbers() {
        let ts = tokenize("0x1F 3.5e-2 10UL .5 1.", &c_def());
        let numbers: Vec<&str> = ts
            .tokens
            .iter()
            .filter(|t| t.category == LiteralNumber)
            .map(|t| t.text.as_str())
            .collect();
        assert_eq!(numbers, vec!["0x1F", "3.5e-2", "10UL", ".5", "1"]);
    }

    #[test]
    fn operators_are_maximal_runs() {
        let ts = tokenize("a += b == c", &c_def());
        assert_eq!(
            ts.pairs(),
            vec![(Name, "a"), (Operator, "+="), (Name, "b"), (Operator, "=="), (Name, "c")]
        );
    }

    #[test]
    fn longest_opener_wins() {
        let lua = DefinitionSet::shipped().get("lua").unwrap().clone();
        let ts = tokenize("--[[ block\n]] -- line\nx", &lua);
        assert_eq!(
            ts.pairs(),
            vec![(Comment, "--[[ block\n]]"), (Comment, "-- line"), (Name, "x")]
        );
    }

    #[test]
    fn case_insensitive_keywords() {
        let pascal = DefinitionSet::shipped().get("pascal").unwrap().clone();
        let ts = tokenize("BEGIN End", &pascal);
        assert_eq!(ts.pairs(), vec![(Keyword, "BEGIN"), (Keyword, "End")]);
    }
}
