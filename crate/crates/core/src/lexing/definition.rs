use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const LANGDEF_FORMAT: &str = "langdef.v1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StringDelimiter {
    pub open: String,
    pub close: String,
    #[serde(default)]
    pub escape: Option<char>,
}

/// Identifier shape: letters (any Unicode alphabetic) plus the listed extra
/// characters may start an identifier; letters, digits and `continue_extra`
/// may continue one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentifierRule {
    #[serde(default = "underscore")]
    pub start_extra: String,
    #[serde(default = "underscore")]
    pub continue_extra: String,
}

fn underscore() -> String {
    "_".to_string()
}

impl Default for IdentifierRule {
    fn default() -> Self {
        IdentifierRule {
            start_extra: underscore(),
            continue_extra: underscore(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NumberRule {
    #[serde(default)]
    pub hex: bool,
    #[serde(default)]
    pub binary: bool,
    #[serde(default)]
    pub octal: bool,
    #[serde(default)]
    pub float: bool,
    /// Digit separator `_` allowed inside numbers.
    #[serde(default)]
    pub underscores: bool,
    /// Characters accepted as trailing type suffixes (e.g. `uUlLfF`).
    #[serde(default)]
    pub suffixes: String,
}

/// Declarative token rules for one language (`langdef.v1`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TokenDefinition {
    pub format: String,
    pub language: String,
    pub extensions: Vec<String>,
    #[serde(default)]
    pub case_insensitive: bool,
    pub keywords: BTreeSet<String>,
    #[serde(default)]
    pub line_comments: Vec<String>,
    #[serde(default)]
    pub block_comments: Vec<(String, String)>,
    #[serde(default)]
    pub strings: Vec<StringDelimiter>,
    #[serde(default)]
    pub identifier: IdentifierRule,
    #[serde(default)]
    pub numbers: NumberRule,
    #[serde(default)]
    pub operators: String,
    #[serde(default)]
    pub punctuation: String,
}

impl TokenDefinition {
    pub fn from_toml(text: &str, origin: &str) -> Result<Self> {
        let raw: toml::Value = toml::from_str(text).map_err(|e| Error::parse(origin, 0, e.to_string()))?;
        let found = raw
            .get("format")
            .and_then(|v| v.as_str())
            .unwrap_or("<none>")
            .to_string();
        if found != LANGDEF_FORMAT {
            return Err(Error::FormatVersion {
                path: origin.to_string(),
                expected: LANGDEF_FORMAT.to_string(),
                found,
            });
        }
        let def: TokenDefinition = raw
            .try_into()
            .map_err(|e: toml::de::Error| Error::parse(origin, 0, e.to_string()))?;
        def.validate()
            .map_err(|e| Error::parse(origin, 0, e.to_string()))?;
        Ok(def)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text, &path.display().to_string())
    }

    pub fn validate(&self) -> Result<()> {
        if self.language.is_empty() {
            return Err(Error::invalid("language id is empty"));
        }
        if self.keywords.is_empty() {
            return Err(Error::invalid(format!("{}: keyword set is empty", self.language)));
        }
        if let Some(c) = self.operators.chars().find(|c| self.punctuation.contains(*c)) {
            return Err(Error::invalid(format!(
                "{}: `{c}` is both an operator and a punctuation character",
                self.language
            )));
        }
        let empty_delim = self.line_comments.iter().any(String::is_empty)
            || self
                .block_comments
                .iter()
                .any(|(o, c)| o.is_empty() || c.is_empty())
            || self
                .strings
                .iter()
                .any(|s| s.open.is_empty() || s.close.is_empty());
        if empty_delim {
            return Err(Error::invalid(format!("{}: empty delimiter", self.language)));
        }
        if self.extensions.iter().any(|e| !e.starts_with('.')) {
            return Err(Error::invalid(format!(
                "{}: extensions must start with `.`",
                self.language
            )));
        }
        Ok(())
    }

    pub fn matches_path(&self, path: &Path) -> bool {
        let Some(name) = path.file_name().and_then(|n| n.to_str()) else {
            return false;
        };
        self.extensions.iter().any(|ext| name.ends_with(ext.as_str()))
    }
}

/// Token definitions keyed by language id.
#[derive(Debug, Clone, Default)]
pub struct DefinitionSet {
    defs: BTreeMap<String, TokenDefinition>,
}

impl DefinitionSet {
    pub fn new(defs: impl IntoIterator<Item = TokenDefinition>) -> Result<Self> {
        let mut set = DefinitionSet::default();
        for def in defs {
            set.insert(def)?;
        }
        Ok(set)
    }

    pub fn insert(&mut self, def: TokenDefinition) -> Result<()> {
        def.validate()?;
        if self.defs.contains_key(&def.language) {
            return Err(Error::invalid(format!(
                "duplicate language id `{}` in definition set",
                def.language
            )));
        }
        self.defs.insert(def.language.clone(), def);
        Ok(())
    }

    /// Loads every `*.toml` file in `dir`.
    pub fn load_dir(dir: &Path) -> Result<Self> {
        let mut paths: Vec<_> = std::fs::read_dir(dir)
            .map_err(|e| Error::io(dir, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "toml"))
            .collect();
        paths.sort();
        let mut set = DefinitionSet::default();
        for p in paths {
            set.insert(TokenDefinition::load(&p)?)?;
        }
        Ok(set)
    }

    /// Definitions bundled with the crate.
    pub fn shipped() -> Self {
        let defs = SHIPPED
            .iter()
            .map(|(name, text)| TokenDefinition::from_toml(text, name).expect("shipped definition is valid"));
        DefinitionSet::new(defs).expect("shipped definitions are unique")
    }

    pub fn get(&self, language: &str) -> Option<&TokenDefinition> {
        self.defs.get(language)
    }

    pub fn languages(&self) -> impl Iterator<Item = &str> {
        self.defs.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = &TokenDefinition> {
        self.defs.values()
    }

    pub fn len(&self) -> usize {
        self.defs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.defs.is_empty()
    }
}

macro_rules! shipped {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../../langdefs/", $name, ".toml")))),*]
    };
}

const SHIPPED: &[(&str, &str)] = shipped![
    "c", "cpp", "csharp", "go", "haskell", "java", "javascript", "kotlin", "lua", "pascal", "php",
    "python", "ruby", "rust", "scala", "typescript",
];

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
format = "langdef.v1"
language = "mini"
extensions = [".mini"]
keywords = ["let"]
operators = "=+"
punctuation = ";"
"#;

    #[test]
    fn parses_minimal_definition() {
        let def = TokenDefinition::from_toml(MINIMAL, "mini.toml").unwrap();
        assert_eq!(def.language, "mini");
        assert_eq!(def.identifier, IdentifierRule::default());
    }

    #[test]
    fn rejects_wrong_version() {
        let text = MINIMAL.replace("langdef.v1", "langdef.v0");
        assert!(matches!(
            TokenDefinition::from_toml(&text, "x"),
            Err(Error::FormatVersion { .. })
        ));
    }

    #[test]
    fn rejects_overlapping_operator_and_punctuation() {
        let text = MINIMAL.replace("punctuation = \";\"", "punctuation = \";=\"");
        assert!(TokenDefinition::from_toml(&text, "x").is_err());
    }

    #[test]
    fn rejects_empty_keywords() {
        let text = MINIMAL.replace("keywords = [\"let\"]", "keywords = []");
        assert!(TokenDefinition::from_toml(&text, "x").is_err());
    }

    #[test]
    fn rejects_duplicate_language_ids() {
        let def = TokenDefinition::from_toml(MINIMAL, "x").unwrap();
        assert!(DefinitionSet::new([def.clone(), def]).is_err());
    }

    #[test]
    fn shipped_definitions_are_well_formed() {
        let set = DefinitionSet::shipped();
        assert_eq!(set.len(), SHIPPED.len());
        for def in set.iter() {
            assert!(!def.keywords.is_empty());
            assert!(!def.extensions.is_empty());
        }
    }
}
