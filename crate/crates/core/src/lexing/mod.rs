//! Data-driven lexing of source code into categorized tokens, and
//! per-language vocabulary histograms built from those tokens.

mod definition;
mod histogram;
mod lexer;

pub use definition::{
    DefinitionSet, IdentifierRule, NumberRule, StringDelimiter, TokenDefinition, LANGDEF_FORMAT,
};
pub use histogram::{
    build_histogram, build_histogram_from_files, corpus_files, HistogramBuild, TokenHistogram,
    BIGRAM_LABEL, MAX_TOKEN_CHARS, TOKHIST_FORMAT,
};
pub use lexer::{tokenize, Category, Diagnostic, Lexer, Token, TokenStream};
