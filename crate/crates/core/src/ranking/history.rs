use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::path::Path;

use crate::error::{Error, Result};

pub const PLHIST_FORMAT: &str = "plhist.v1";

/// Undirected language-influence graph. Versions and dialects are
/// contracted through an alias map onto canonical ids, and edges only
/// ever connect canonical ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HistoryGraph {
    adjacency: BTreeMap<String, BTreeSet<String>>,
    aliases: BTreeMap<String, String>,
}

impl HistoryGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// The bundled curated graph.
    pub fn shipped() -> Self {
        Self::parse(include_str!("../../data/plhist.v1.txt"), "plhist.v1.txt").expect("shipped history graph is valid")
    }

    /// Maps `alias` onto `canonical`. Must precede any edge that uses
    /// `alias`; chains are collapsed so resolution is idempotent.
    pub fn add_alias(&mut self, alias: &str, canonical: &str) -> Result<()> {
        let canonical = self.resolve(canonical).to_string();
        if alias == canonical {
            return Err(Error::invalid(format!("alias `{alias}` resolves to itself")));
        }
        if self.adjacency.contains_key(alias) {
            return Err(Error::invalid(format!("`{alias}` already has edges and cannot become an alias")));
        }
        if let Some(old) = self.aliases.get(alias) {
            if *old != canonical {
                return Err(Error::invalid(format!("`{alias}` is already an alias of `{old}`")));
            }
        }
        for target in self.aliases.values_mut() {
            if target == alias {
                *target = canonical.clone();
            }
        }
        self.aliases.insert(alias.to_string(), canonical);
        Ok(())
    }

    pub fn add_edge(&mut self, a: &str, b: &str) {
        let a = self.resolve(a).to_string();
        let b = self.resolve(b).to_string();
        if a == b {
            self.adjacency.entry(a).or_default();
            return;
        }
        self.adjacency.entry(a.clone()).or_default().insert(b.clone());
        self.adjacency.entry(b).or_default().insert(a);
    }

    /// Canonical id of `id` (itself when not an alias).
    pub fn resolve<'a>(&'a self, id: &'a str) -> &'a str {
        self.aliases.get(id).map_or(id, String::as_str)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.adjacency.contains_key(self.resolve(id))
    }

    pub fn nodes(&self) -> impl Iterator<Item = &str> {
        self.adjacency.keys().map(String::as_str)
    }

    pub fn neighbors(&self, id: &str) -> impl Iterator<Item = &str> {
        self.adjacency.get(self.resolve(id)).into_iter().flatten().map(String::as_str)
    }

    pub fn num_edges(&self) -> usize {
        self.adjacency.values().map(BTreeSet::len).sum::<usize>() / 2
    }

    /// Breadth-first hop counts from `source` to every reachable node.
    pub fn distances(&self, source: &str) -> BTreeMap<&str, usize> {
        let mut dist = BTreeMap::new();
        let Some((start, _)) = self.adjacency.get_key_value(self.resolve(source)) else { return dist };
        dist.insert(start.as_str(), 0);
        let mut queue = VecDeque::from([start.as_str()]);
        while let Some(u) = queue.pop_front() {
            let d = dist[u];
            for v in &self.adjacency[u] {
                if !dist.contains_key(v.as_str()) {
                    dist.insert(v.as_str(), d + 1);
                    queue.push_back(v.as_str());
                }
            }
        }
        dist
    }

    /// Reads `plhist.v1`: a `format plhist.v1` line, then `edge <a> <b>`
    /// and `alias <id> <canonical>` lines; a `#` at the start of a word
    /// begins a comment.
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, strip_comment(l)))
            .filter(|(_, l)| !l.is_empty());
        match lines.next() {
            Some((_, l)) if l.split_whitespace().eq(["format", PLHIST_FORMAT]) => {}
            other => {
                return Err(Error::FormatVersion {
                    path: origin.to_string(),
                    expected: PLHIST_FORMAT.to_string(),
                    found: other.map_or("<empty file>".to_string(), |(_, l)| l.to_string()),
                })
            }
        }
        let mut g = HistoryGraph::new();
        for (line, l) in lines {
            let fields: Vec<&str> = l.split_whitespace().collect();
            match fields.as_slice() {
                ["edge", a, b] => g.add_edge(a, b),
                ["alias", a, c] => g.add_alias(a, c).map_err(|e| Error::parse(origin, line, e.to_string()))?,
                _ => return Err(Error::parse(origin, line, format!("expected `edge a b` or `alias a b`, found `{l}`"))),
            }
        }
        Ok(g)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("format {PLHIST_FORMAT}\n");
        for (a, c) in &self.aliases {
            s.push_str(&format!("alias {a} {c}\n"));
        }
        for (a, ns) in &self.adjacency {
            if ns.is_empty() {
                s.push_str(&format!("edge {a} {a}\n"));
            }
            for b in ns.iter().filter(|b| a < *b) {
                s.push_str(&format!("edge {a} {b}\n"));
            }
        }
        s
    }
}

/// Drops a `#` comment that starts at a word boundary, so ids such as
/// `c#` survive.
fn strip_comment(line: &str) -> &str {
    let mut prev = ' ';
    for (i, ch) in line.char_indices() {
        if ch == '#' && prev.is_whitespace() {
            return line[..i].trim();
        }
        prev = ch;
    }
    line.trim()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HistoryRanking {
    /// Candidates with their hop distance; `None` means unreachable.
    pub order: Vec<(String, Option<usize>)>,
    pub warnings: Vec<String>,
}

/// Orders candidates by graph distance to `target`, nearest first;
/// unreachable candidates come last; ties are lexicographic. Truncated to
/// `k`.
pub fn history_rank(graph: &HistoryGraph, target: &str, candidates: &[String], k: usize) -> HistoryRanking {
    let mut warnings = Vec::new();
    if !graph.contains(target) {
        warnings.push(format!("{target}: not in the history graph; candidates left in lexicographic order"));
    }
    let dist = graph.distances(target);
    let mut order: Vec<(String, Option<usize>)> =
        candidates.iter().map(|c| (c.clone(), dist.get(graph.resolve(c)).copied())).collect();
    order.sort_by(|a, b| {
        let key = |d: Option<usize>| d.unwrap_or(usize::MAX);
        key(a.1).cmp(&key(b.1)).then_with(|| a.0.cmp(&b.0))
    });
    order.truncate(k);
    HistoryRanking { order, warnings }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain() -> HistoryGraph {
        HistoryGraph::parse("format plhist.v1\nedge c cpp\nedge cpp java\nedge java kotlin # jvm\n", "mem").unwrap()
    }

    fn ids(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn chain_graph_by_hand() {
        let r = history_rank(&chain(), "kotlin", &ids(&["java", "cpp", "c"]), 2);
        assert_eq!(r.order, vec![("java".to_string(), Some(1)), ("cpp".to_string(), Some(2))]);
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn isolated_target_is_lexicographic() {
        let mut g = chain();
        g.add_edge("bf", "bf");
        let r = history_rank(&g, "bf", &ids(&["java", "c", "cpp"]), 3);
        assert_eq!(r.order.iter().map(|o| o.0.as_str()).collect::<Vec<_>>(), ["c", "cpp", "java"]);
        assert!(r.order.iter().all(|o| o.1.is_none()));
        let r = history_rank(&g, "klingon", &ids(&["java", "c"]), 3);
        assert_eq!(r.warnings.len(), 1);
    }

    #[test]
    fn aliases_resolve_before_search() {
        let g = HistoryGraph::parse("# graph\nformat plhist.v1\nalias python3 python\nalias py3k python3\nalias c# csharp\nedge python3 c\n", "mem").unwrap();
        assert_eq!(g.resolve("py3k"), "python");
        assert_eq!(g.resolve(g.resolve("py3k")), "python");
        assert_eq!(g.nodes().collect::<Vec<_>>(), ["c", "python"]);
        assert_eq!(g.distances("python3").get("c"), Some(&1));
        assert_eq!(HistoryGraph::parse(&g.to_text(), "mem").unwrap(), g);
    }

    #[test]
    fn rejects_bad_files() {
        assert!(matches!(HistoryGraph::parse("edge a b\n", "mem"), Err(Error::FormatVersion { .. })));
        assert!(HistoryGraph::parse("format plhist.v1\nnode a\n", "mem").is_err());
        assert!(HistoryGraph::parse("format plhist.v1\nedge a b\nalias a c\n", "mem").is_err());
    }

    #[test]
    fn shipped_graph_is_connected_where_expected() {
        let g = HistoryGraph::shipped();
        let d = g.distances("kotlin");
        assert_eq!(d.get("java"), Some(&1));
        assert!(d.contains_key("python"));
        assert!(!g.contains("bf"));
    }
}
