use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::table;

pub const LANGPROF_FORMAT: &str = "langprof.v1";

pub const LANGPROF_HEADER: [&str; 11] = [
    "language",
    "paradigms",
    "object_oriented",
    "standardized",
    "type_strength",
    "type_safety",
    "expression_of_types",
    "type_compatibility",
    "type_checking",
    "parameter_passing",
    "garbage_collection",
];

macro_rules! labelled_enum {
    ($(#[$meta:meta])* $name:ident { $($variant:ident => $label:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $($name::$variant => $label),+
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = String;

            fn from_str(s: &str) -> std::result::Result<Self, String> {
                match s {
                    $($label => Ok($name::$variant),)+
                    other => Err(format!("unknown {} `{other}`", stringify!($name))),
                }
            }
        }
    };
}

labelled_enum!(Paradigm {
    Scripting => "scripting",
    Imperative => "imperative",
    Structured => "structured",
    Concurrent => "concurrent",
    Array => "array",
    Reflective => "reflective",
    Generic => "generic",
    Functional => "functional",
    ObjectOriented => "object-oriented",
    Procedural => "procedural",
    Logic => "logic",
    EventDriven => "event-driven",
    Declarative => "declarative",
    Metaprogramming => "metaprogramming",
    Modular => "modular",
    Macro => "macro",
    Pipeline => "pipeline",
    Esoteric => "esoteric",
    Distributed => "distributed",
    BlockStructured => "block-structured",
    DataDriven => "data-driven",
    AgentOriented => "agent-oriented",
    Compiled => "compiled",
    Multistaged => "multistaged",
    ProcessOriented => "process-oriented",
    TaskDriven => "task-driven",
});

labelled_enum!(TypeStrength {
    Strong => "strong",
    Weak => "weak",
});

labelled_enum!(TypeExpression {
    Explicit => "explicit",
    Implicit => "implicit",
    Inferred => "inferred",
});

labelled_enum!(TypeCompatibility {
    Nominal => "nominal",
    Structural => "structural",
});

labelled_enum!(TypeChecking {
    Static => "static",
    Dynamic => "dynamic",
});

labelled_enum!(ParameterPassing {
    ByValue => "by-value",
    ByReference => "by-reference",
    ByName => "by-name",
});

/// Linguistic metadata of one language. `None` marks an unknown value
/// (written `?` in `langprof.v1`); an empty set is a known empty set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LanguageProfile {
    pub language: String,
    pub paradigms: Option<BTreeSet<Paradigm>>,
    pub object_oriented: Option<bool>,
    pub standardized: Option<bool>,
    pub type_strength: Option<TypeStrength>,
    pub type_safety: Option<bool>,
    pub expression_of_types: Option<TypeExpression>,
    pub type_compatibility: Option<BTreeSet<TypeCompatibility>>,
    pub type_checking: Option<TypeChecking>,
    pub parameter_passing: Option<BTreeSet<ParameterPassing>>,
    pub garbage_collection: Option<bool>,
}

impl LanguageProfile {
    /// A profile with every field unknown.
    pub fn unknown(language: impl Into<String>) -> Self {
        LanguageProfile {
            language: language.into(),
            paradigms: None,
            object_oriented: None,
            standardized: None,
            type_strength: None,
            type_safety: None,
            expression_of_types: None,
            type_compatibility: None,
            type_checking: None,
            parameter_passing: None,
            garbage_collection: None,
        }
    }

    /// Parameter passing left blank in the source table.
    pub fn parameter_passing_blank(&self) -> bool {
        self.parameter_passing.as_ref().is_some_and(BTreeSet::is_empty)
    }
}

/// Language profiles keyed by id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProfileTable {
    profiles: BTreeMap<String, LanguageProfile>,
}

impl ProfileTable {
    pub fn new(profiles: impl IntoIterator<Item = LanguageProfile>) -> Result<Self> {
        let mut t = ProfileTable::default();
        for p in profiles {
            if t.profiles.contains_key(&p.language) {
                return Err(Error::invalid(format!("duplicate language id `{}`", p.language)));
            }
            t.profiles.insert(p.language.clone(), p);
        }
        Ok(t)
    }

    /// The bundled transcription of the linguistic-features table.
    pub fn shipped() -> Self {
        Self::parse(include_str!("../../data/langprof.v1.csv"), "langprof.v1.csv")
            .expect("shipped profile table is valid")
    }

    pub fn get(&self, language: &str) -> Option<&LanguageProfile> {
        self.profiles.get(language)
    }

    pub fn languages(&self) -> impl Iterator<Item = &str> {
        self.profiles.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = &LanguageProfile> {
        self.profiles.values()
    }

    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }

    /// Languages whose parameter-passing cell is blank.
    pub fn warnings(&self) -> Vec<String> {
        self.profiles
            .values()
            .filter(|p| p.parameter_passing_blank())
            .map(|p| format!("{}: parameter passing left blank", p.language))
            .collect()
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let rows = table::read(text, origin, LANGPROF_FORMAT, &LANGPROF_HEADER)?;
        let mut profiles = Vec::with_capacity(rows.len());
        for row in &rows {
            let err = |col: &str, msg: String| Error::parse(origin, row.line, format!("{col}: {msg}"));
            let language = row.get(0).to_string();
            if language.is_empty() {
                return Err(err("language", "empty id".into()));
            }
            profiles.push(LanguageProfile {
                language,
                paradigms: parse_set(row.get(1)).map_err(|m| err("paradigms", m))?,
                object_oriented: parse_bool(row.get(2)).map_err(|m| err("object_oriented", m))?,
                standardized: parse_bool(row.get(3)).map_err(|m| err("standardized", m))?,
                type_strength: parse_one(row.get(4)).map_err(|m| err("type_strength", m))?,
                type_safety: parse_bool(row.get(5)).map_err(|m| err("type_safety", m))?,
                expression_of_types: parse_one(row.get(6)).map_err(|m| err("expression_of_types", m))?,
                type_compatibility: parse_set(row.get(7)).map_err(|m| err("type_compatibility", m))?,
                type_checking: parse_one(row.get(8)).map_err(|m| err("type_checking", m))?,
                parameter_passing: parse_set(row.get(9)).map_err(|m| err("parameter_passing", m))?,
                garbage_collection: parse_bool(row.get(10)).map_err(|m| err("garbage_collection", m))?,
            });
        }
        ProfileTable::new(profiles).map_err(|e| Error::parse(origin, 0, e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn to_csv(&self) -> String {
        let rows = self.profiles.values().map(|p| {
            vec![
                p.language.clone(),
                fmt_set(&p.paradigms),
                fmt_bool(p.object_oriented),
                fmt_bool(p.standardized),
                fmt_one(p.type_strength),
                fmt_bool(p.type_safety),
                fmt_one(p.expression_of_types),
                fmt_set(&p.type_compatibility),
                fmt_one(p.type_checking),
                fmt_set(&p.parameter_passing),
                fmt_bool(p.garbage_collection),
            ]
        });
        table::write(&LANGPROF_HEADER, rows)
    }
}

const UNKNOWN: &str = "?";

fn parse_bool(s: &str) -> std::result::Result<Option<bool>, String> {
    match s {
        "yes" => Ok(Some(true)),
        "no" => Ok(Some(false)),
        UNKNOWN | "" => Ok(None),
        other => Err(format!("expected yes/no/?, found `{other}`")),
    }
}

fn parse_one<T: FromStr<Err = String>>(s: &str) -> std::result::Result<Option<T>, String> {
    match s {
        UNKNOWN | "" => Ok(None),
        other => other.parse().map(Some),
    }
}

fn parse_set<T: FromStr<Err = String> + Ord>(s: &str) -> std::result::Result<Option<BTreeSet<T>>, String> {
    if s == UNKNOWN {
        return Ok(None);
    }
    s.split(';')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(str::parse)
        .collect::<std::result::Result<BTreeSet<T>, String>>()
        .map(Some)
}

fn fmt_bool(b: Option<bool>) -> String {
    match b {
        Some(true) => "yes".into(),
        Some(false) => "no".into(),
        None => UNKNOWN.into(),
    }
}

fn fmt_one<T: fmt::Display>(v: Option<T>) -> String {
    v.map_or_else(|| UNKNOWN.to_string(), |v| v.to_string())
}

fn fmt_set<T: fmt::Display>(v: &Option<BTreeSet<T>>) -> String {
    match v {
        None => UNKNOWN.to_string(),
        Some(set) => set.iter().map(ToString::to_string).collect::<Vec<_>>().join(";"),
    }
}
