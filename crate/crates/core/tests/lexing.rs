use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use langxfer::lexing::{
    build_histogram, build_histogram_from_files, tokenize, Category, DefinitionSet, TokenHistogram,
};
use langxfer::Error;
use proptest::prelude::*;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn read_counts(path: &Path) -> BTreeMap<(String, String), u64> {
    let text = std::fs::read_to_string(path).unwrap();
    text.lines()
        .filter(|l| !l.starts_with("# ") && !l.is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split('\t').collect();
            assert_eq!(f.len(), 3, "bad counts line {l:?}");
            ((f[0].to_string(), f[1].to_string()), f[2].parse().unwrap())
        })
        .collect()
}

fn unigram_counts(h: &TokenHistogram) -> BTreeMap<(String, String), u64> {
    let mut out = BTreeMap::new();
    for cat in Category::ALL {
        for (tok, n) in h.entries(cat) {
            out.insert((cat.to_string(), tok.to_string()), n);
        }
    }
    out
}

fn assert_reconstructs(text: &str, tokens: &[langxfer::lexing::Token]) {
    let mut pos = 0;
    for t in tokens {
        assert!(t.offset >= pos);
        assert!(text[pos..t.offset].chars().all(char::is_whitespace), "non-whitespace gap before {t:?}");
        assert_eq!(&text[t.offset..t.offset + t.text.len()], t.text);
        pos = t.offset + t.text.len();
    }
    assert!(text[pos..].chars().all(char::is_whitespace));
}

const FIXTURES: [(&str, &str, u64); 5] = [
    ("sample.c", "c", 40),
    ("sample.py", "python", 27),
    ("Sample.java", "java", 39),
    ("sample.go", "go", 37),
    ("sample.pas", "pascal", 23),
];

#[test]
fn fixtures_match_hand_counts() {
    let defs = DefinitionSet::shipped();
    for (file, lang, total) in FIXTURES {
        let def = defs.get(lang).unwrap();
        let text = std::fs::read_to_string(fixture(file)).unwrap();
        let stream = tokenize(&text, def);
        assert!(stream.diagnostics.is_empty(), "{file}: {:?}", stream.diagnostics);
        assert_reconstructs(&text, &stream.tokens);
        let (h, _) = TokenHistogram::from_tokens(lang, &stream.tokens, def.case_insensitive);
        assert_eq!(h.total(), total, "{file}");
        let expected = read_counts(&fixture(&format!("{file}.counts")));
        assert_eq!(unigram_counts(&h), expected, "{file}");
    }
}

#[test]
fn single_file_corpus_equals_tokenized_file() {
    let defs = DefinitionSet::shipped();
    let def = defs.get("c").unwrap();
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(fixture("sample.c"), dir.path().join("sample.c")).unwrap();
    let built = build_histogram(dir.path(), def, None, 0).unwrap();
    let text = std::fs::read_to_string(fixture("sample.c")).unwrap();
    let (direct, _) = TokenHistogram::from_tokens("c", &tokenize(&text, def).tokens, false);
    assert_eq!(built.histogram, direct);
    assert_eq!(built.files.len(), 1);
}

#[test]
fn duplicated_file_doubles_every_count() {
    let defs = DefinitionSet::shipped();
    let def = defs.get("c").unwrap();
    let root = fixture("");
    let once = build_histogram_from_files(&root, &[fixture("sample.c")], def).unwrap();
    let twice = build_histogram_from_files(&root, &[fixture("sample.c"), fixture("sample.c")], def).unwrap();
    assert_eq!(twice.histogram.total(), 2 * once.histogram.total());
    for ((cat, tok), n) in unigram_counts(&once.histogram) {
        let cat: Category = cat.parse().unwrap();
        assert_eq!(twice.histogram.count(cat, &tok), 2 * n);
    }
}

#[test]
fn two_file_corpus_is_sum_of_files() {
    let defs = DefinitionSet::shipped();
    let def = defs.get("c").unwrap();
    let mut expected: BTreeMap<(String, String), u64> = BTreeMap::new();
    for name in ["corpus2/a.c", "corpus2/b.c"] {
        let text = std::fs::read_to_string(fixture(name)).unwrap();
        let (h, _) = TokenHistogram::from_tokens("c", &tokenize(&text, def).tokens, false);
        for (k, n) in unigram_counts(&h) {
            *expected.entry(k).or_insert(0) += n;
        }
    }
    let built = build_histogram(&fixture("corpus2"), def, None, 0).unwrap();
    assert_eq!(unigram_counts(&built.histogram), expected);
    assert_eq!(built.histogram.total(), expected.values().sum::<u64>());
}

#[test]
fn histogram_serialization_is_deterministic() {
    let defs = DefinitionSet::shipped();
    let def = defs.get("c").unwrap();
    let a = build_histogram(&fixture("corpus2"), def, None, 7).unwrap();
    let b = build_histogram(&fixture("corpus2"), def, None, 7).unwrap();
    assert_eq!(a.histogram.to_tokhist(), b.histogram.to_tokhist());
}

#[test]
fn sampling_is_seeded() {
    let defs = DefinitionSet::shipped();
    let def = defs.get("c").unwrap();
    let dir = tempfile::tempdir().unwrap();
    for i in 0..10 {
        std::fs::write(dir.path().join(format!("f{i}.c")), format!("int v{i};")).unwrap();
    }
    let a = build_histogram(dir.path(), def, Some(4), 42).unwrap();
    let b = build_histogram(dir.path(), def, Some(4), 42).unwrap();
    assert_eq!(a.files, b.files);
    assert_eq!(a.files.len(), 4);
    assert!(a.files.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(a.histogram, b.histogram);
    let all = build_histogram(dir.path(), def, Some(50), 42).unwrap();
    assert_eq!(all.files.len(), 10);
}

#[test]
fn empty_corpus_is_an_error() {
    let defs = DefinitionSet::shipped();
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("notes.txt"), "not code").unwrap();
    let err = build_histogram(dir.path(), defs.get("c").unwrap(), None, 0).unwrap_err();
    assert!(matches!(err, Error::EmptyCorpus(_)));
}

#[test]
fn non_utf8_files_are_skipped() {
    let defs = DefinitionSet::shipped();
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.c"), [0xff, 0xfe, 0x00]).unwrap();
    std::fs::write(dir.path().join("good.c"), "int x;").unwrap();
    let built = build_histogram(dir.path(), defs.get("c").unwrap(), None, 0).unwrap();
    assert_eq!(built.files.len(), 1);
    assert_eq!(built.diagnostics.len(), 1);
}

proptest! {
    #[test]
    fn reconstruction_holds_for_arbitrary_text(text in "[ -~\t\n\u{e9}\u{3bb}]{0,200}") {
        let defs = DefinitionSet::shipped();
        for lang in ["c", "python", "haskell", "lua", "pascal"] {
            let stream = tokenize(&text, defs.get(lang).unwrap());
            assert_reconstructs(&text, &stream.tokens);
            let (h, _) = TokenHistogram::from_tokens(lang, &stream.tokens, false);
            prop_assert_eq!(h.total(), stream.tokens.len() as u64);
        }
    }

    #[test]
    fn merging_is_additive(a in "[a-z0-9 =+;(){}\"]{0,80}", b in "[a-z0-9 =+;(){}\"]{0,80}") {
        let defs = DefinitionSet::shipped();
        let def = defs.get("c").unwrap();
        let (ha, _) = TokenHistogram::from_tokens("c", &tokenize(&a, def).tokens, false);
        let (hb, _) = TokenHistogram::from_tokens("c", &tokenize(&b, def).tokens, false);
        let mut merged = ha.clone();
        merged.merge(&hb);
        for cat in Category::ALL {
            for (tok, n) in merged.entries(cat) {
                prop_assert_eq!(n, ha.count(cat, tok) + hb.count(cat, tok));
            }
        }
        prop_assert_eq!(merged.total(), ha.total() + hb.total());
    }
}
