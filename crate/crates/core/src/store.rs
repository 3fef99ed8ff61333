//! Dictionary-encoded, immutable triple store.
//!
//! Entities and predicates are interned into dense `u32` ids in order of first
//! appearance, so loading the same bytes always produces the same ids. Every
//! entity keeps a sorted out-list and in-list of `(predicate, neighbor)` pairs.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EntityId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PredicateId(pub u32);

impl EntityId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl PredicateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub subject: EntityId,
    pub predicate: PredicateId,
    pub object: EntityId,
}

impl Triple {
    pub fn new(subject: EntityId, predicate: PredicateId, object: EntityId) -> Self {
        Triple {
            subject,
            predicate,
            object,
        }
    }
}

/// Bidirectional label <-> id map.
#[derive(Debug, Clone, Default)]
pub struct Dictionary {
    labels: Vec<String>,
    index: HashMap<String, u32>,
}

impl Dictionary {
    fn intern(&mut self, label: &str) -> u32 {
        if let Some(&id) = self.index.get(label) {
            return id;
        }
        let id = u32::try_from(self.labels.len()).expect("dictionary exceeds u32 ids");
        self.labels.push(label.to_owned());
        self.index.insert(label.to_owned(), id);
        id
    }

    pub fn get(&self, label: &str) -> Option<u32> {
        self.index.get(label).copied()
    }

    pub fn label(&self, id: u32) -> Option<&str> {
        self.labels.get(id as usize).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct LoadConfig {
    /// Fail on the first malformed line instead of skipping it.
    pub strict: bool,
    /// Lowercase every label at load and lookup time.
    pub lowercase_labels: bool,
}

/// Counters collected while loading a TSV file.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LoadReport {
    pub lines: usize,
    pub comments: usize,
    pub blank: usize,
    /// 1-based line numbers of skipped malformed lines.
    pub malformed: Vec<usize>,
    pub duplicates: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Out,
    In,
    Both,
}

/// Orientation of a neighbor relative to the queried entity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeDirection {
    Out,
    In,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Neighbor {
    pub predicate: PredicateId,
    pub entity: EntityId,
    pub direction: EdgeDirection,
}

/// Incrementally collects triples, then freezes them into a [`KnowledgeGraph`].
#[derive(Debug, Default)]
pub struct GraphBuilder {
    entities: Dictionary,
    predicates: Dictionary,
    triples: Vec<Triple>,
    seen: HashSet<Triple>,
    types: Vec<Vec<String>>,
    lowercase: bool,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_config(config: &LoadConfig) -> Self {
        GraphBuilder {
            lowercase: config.lowercase_labels,
            ..Self::default()
        }
    }

    /// Adds a triple by label. Returns false when it was already present.
    pub fn add(&mut self, subject: &str, predicate: &str, object: &str) -> bool {
        let (s, p, o) = if self.lowercase {
            (
                self.entities.intern(&subject.to_lowercase()),
                self.predicates.intern(&predicate.to_lowercase()),
                self.entities.intern(&object.to_lowercase()),
            )
        } else {
            (
                self.entities.intern(subject),
                self.predicates.intern(predicate),
                self.entities.intern(object),
            )
        };
        let t = Triple::new(EntityId(s), PredicateId(p), EntityId(o));
        if self.seen.insert(t) {
            self.triples.push(t);
            true
        } else {
            false
        }
    }

    /// Attaches a type attribute to an entity, registering the entity if needed.
    pub fn add_type(&mut self, entity: &str, ty: &str) -> EntityId {
        let id = self.add_entity(entity);
        if self.types.len() <= id.index() {
            self.types.resize(id.index() + 1, Vec::new());
        }
        let list = &mut self.types[id.index()];
        if let Err(at) = list.binary_search_by(|t| t.as_str().cmp(ty)) {
            list.insert(at, ty.to_owned());
        }
        id
    }

    /// Registers an entity without any triple (isolated node).
    pub fn add_entity(&mut self, label: &str) -> EntityId {
        if self.lowercase {
            EntityId(self.entities.intern(&label.to_lowercase()))
        } else {
            EntityId(self.entities.intern(label))
        }
    }

    pub fn build(mut self) -> KnowledgeGraph {
        let n = self.entities.len();
        self.types.resize(n, Vec::new());
        let out_adj = Adjacency::build(n, self.triples.iter().map(|t| (t.subject, (t.predicate, t.object))));
        let in_adj = Adjacency::build(n, self.triples.iter().map(|t| (t.object, (t.predicate, t.subject))));
        KnowledgeGraph {
            entities: self.entities,
            predicates: self.predicates,
            out_adj,
            in_adj,
            triple_count: self.triples.len(),
            types: self.types,
            lowercase: self.lowercase,
        }
    }
}

/// Sorted neighbor lists packed into one array, `offsets[v]..offsets[v + 1]` per entity.
#[derive(Debug, Clone, Default)]
struct Adjacency {
    offsets: Vec<usize>,
    items: Vec<(PredicateId, EntityId)>,
}

impl Adjacency {
    fn build(n: usize, entries: impl Iterator<Item = (EntityId, (PredicateId, EntityId))> + Clone) -> Self {
        let mut offsets = vec![0usize; n + 1];
        for (v, _) in entries.clone() {
            offsets[v.index() + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut items = vec![(PredicateId(0), EntityId(0)); offsets[n]];
        for (v, item) in entries {
            items[fill[v.index()]] = item;
            fill[v.index()] += 1;
        }
        for v in 0..n {
            items[offsets[v]..offsets[v + 1]].sort_unstable();
        }
        Adjacency { offsets, items }
    }

    fn len(&self) -> usize {
        self.offsets.len().saturating_sub(1)
    }

    fn get(&self, v: usize) -> &[(PredicateId, EntityId)] {
        if v < self.len() {
            &self.items[self.offsets[v]..self.offsets[v + 1]]
        } else {
            &[]
        }
    }
}

/// Immutable directed multigraph with typed edges.
///
/// A `(subject, predicate, object)` combination is stored at most once, while
/// different predicates between the same pair of entities are kept apart.
#[derive(Debug, Clone)]
pub struct KnowledgeGraph {
    entities: Dictionary,
    predicates: Dictionary,
    out_adj: Adjacency,
    in_adj: Adjacency,
    triple_count: usize,
    /// Optional type attributes per entity, sorted.
    types: Vec<Vec<String>>,
    lowercase: bool,
}

impl KnowledgeGraph {
    /// Builds a graph from `(subject, predicate, object)` label triples.
    pub fn from_triples<'a, I>(triples: I) -> Self
    where
        I: IntoIterator<Item = (&'a str, &'a str, &'a str)>,
    {
        let mut b = GraphBuilder::new();
        for (s, p, o) in triples {
            b.add(s, p, o);
        }
        b.build()
    }

    pub fn load_tsv(path: impl AsRef<Path>, config: &LoadConfig) -> Result<(Self, LoadReport)> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::read_tsv(file, config).map_err(|e| match e {
            Error::Io { source, .. } => Error::Io {
                path: path.to_owned(),
                source,
            },
            e => e,
        })
    }

    /// Reads tab-separated triples. Lines starting with `#` and blank lines are
    /// skipped; fields past the third are ignored.
    pub fn read_tsv<R: Read>(reader: R, config: &LoadConfig) -> Result<(Self, LoadReport)> {
        let mut builder = GraphBuilder::with_config(config);
        let mut report = LoadReport::default();
        let mut reader = BufReader::new(reader);
        let mut buf = String::new();
        let mut lineno = 0usize;
        loop {
            buf.clear();
            let read = reader.read_line(&mut buf).map_err(|source| Error::Io {
                path: Default::default(),
                source,
            })?;
            if read == 0 {
                break;
            }
            lineno += 1;
            report.lines += 1;
            let line = buf.trim_end_matches(['\n', '\r']);
            if line.starts_with('#') {
                report.comments += 1;
                continue;
            }
            if line.trim().is_empty() {
                report.blank += 1;
                continue;
            }
            let mut fields = line.split('\t');
            match (fields.next(), fields.next(), fields.next()) {
                (Some(s), Some(p), Some(o)) if !s.is_empty() && !p.is_empty() && !o.is_empty() => {
                    if !builder.add(s, p, o) {
                        report.duplicates += 1;
                    }
                }
                _ => {
                    if config.strict {
                        return Err(Error::Format {
                            line: lineno,
                            message: "expected at least three non-empty tab-separated fields"
                                .into(),
                        });
                    }
                    report.malformed.push(lineno);
                }
            }
        }
        Ok((builder.build(), report))
    }

    /// Reads `entity<TAB>type` lines and attaches each type to its entity.
    ///
    /// Types become extra node attributes next to the one-hot identity when
    /// segments are compared. Comments and blank lines are skipped; an unknown
    /// entity is an error. Returns the number of type assignments read.
    pub fn read_types<R: Read>(&mut self, reader: R) -> Result<usize> {
        let mut count = 0;
        for (no, line) in BufReader::new(reader).lines().enumerate() {
            let line = line.map_err(|source| Error::Io {
                path: Default::default(),
                source,
            })?;
            let line = line.trim_end_matches('\r');
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split('\t');
            let (Some(e), Some(ty)) = (fields.next(), fields.next()) else {
                return Err(Error::Format {
                    line: no + 1,
                    message: "expected entity and type separated by a tab".into(),
                });
            };
            if ty.is_empty() {
                return Err(Error::Format {
                    line: no + 1,
                    message: "empty type".into(),
                });
            }
            let id = self.entity(e)?;
            let ty = self.normalize(ty).into_owned();
            let list = &mut self.types[id.index()];
            if let Err(at) = list.binary_search(&ty) {
                list.insert(at, ty);
            }
            count += 1;
        }
        Ok(count)
    }

    pub fn load_types(&mut self, path: impl AsRef<Path>) -> Result<usize> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })?;
        self.read_types(file).map_err(|e| match e {
            Error::Io { source, .. } => Error::Io {
                path: path.to_owned(),
                source,
            },
            e => e,
        })
    }

    /// Type attributes of an entity; empty when none were loaded.
    pub fn entity_types(&self, id: EntityId) -> &[String] {
        self.types.get(id.index()).map_or(&[], Vec::as_slice)
    }

    fn normalize<'a>(&self, label: &'a str) -> std::borrow::Cow<'a, str> {
        if self.lowercase {
            std::borrow::Cow::Owned(label.to_lowercase())
        } else {
            std::borrow::Cow::Borrowed(label)
        }
    }

    pub fn resolve_entity(&self, label: &str) -> Option<EntityId> {
        self.entities.get(&self.normalize(label)).map(EntityId)
    }

    pub fn resolve_predicate(&self, label: &str) -> Option<PredicateId> {
        self.predicates.get(&self.normalize(label)).map(PredicateId)
    }

    /// Like [`resolve_entity`](Self::resolve_entity) but unknown labels are an error.
    pub fn entity(&self, label: &str) -> Result<EntityId> {
        self.resolve_entity(label)
            .ok_or_else(|| Error::UnknownEntity(label.to_owned()))
    }

    pub fn entity_label(&self, id: EntityId) -> &str {
        self.entities.label(id.0).unwrap_or("<unknown>")
    }

    pub fn predicate_label(&self, id: PredicateId) -> &str {
        self.predicates.label(id.0).unwrap_or("<unknown>")
    }

    pub fn entities(&self) -> &Dictionary {
        &self.entities
    }

    pub fn predicates(&self) -> &Dictionary {
        &self.predicates
    }

    pub fn entity_count(&self) -> usize {
        self.entities.len()
    }

    pub fn predicate_count(&self) -> usize {
        self.predicates.len()
    }

    pub fn triple_count(&self) -> usize {
        self.triple_count
    }

    pub fn contains_entity(&self, id: EntityId) -> bool {
        id.index() < self.out_adj.len()
    }

    /// Out-edges of `id` sorted by `(predicate, object)`. Empty for unknown ids.
    pub fn out_edges(&self, id: EntityId) -> &[(PredicateId, EntityId)] {
        self.out_adj.get(id.index())
    }

    /// In-edges of `id` sorted by `(predicate, subject)`. Empty for unknown ids.
    pub fn in_edges(&self, id: EntityId) -> &[(PredicateId, EntityId)] {
        self.in_adj.get(id.index())
    }

    pub fn out_degree(&self, id: EntityId) -> usize {
        self.out_edges(id).len()
    }

    pub fn in_degree(&self, id: EntityId) -> usize {
        self.in_edges(id).len()
    }

    pub fn neighbors(&self, id: EntityId, direction: Direction) -> Result<Vec<Neighbor>> {
        if !self.contains_entity(id) {
            return Err(Error::UnknownEntity(format!("#{}", id.0)));
        }
        let out = self.out_edges(id).iter().map(|&(predicate, entity)| Neighbor {
            predicate,
            entity,
            direction: EdgeDirection::Out,
        });
        let inc = self.in_edges(id).iter().map(|&(predicate, entity)| Neighbor {
            predicate,
            entity,
            direction: EdgeDirection::In,
        });
        Ok(match direction {
            Direction::Out => out.collect(),
            Direction::In => inc.collect(),
            Direction::Both => {
                let mut all: Vec<_> = out.chain(inc).collect();
                all.sort_unstable();
                all
            }
        })
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.out_edges(triple.subject)
            .binary_search(&(triple.predicate, triple.object))
            .is_ok()
    }

    /// All triples, ordered by subject id then `(predicate, object)`.
    pub fn triples(&self) -> impl Iterator<Item = Triple> + '_ {
        (0..self.out_adj.len()).flat_map(move |s| {
            let list = self.out_adj.get(s);
            list.iter()
                .map(move |&(p, o)| Triple::new(EntityId(s as u32), p, o))
        })
    }

    /// Renders a triple as `<subject, predicate, object>`.
    pub fn display_triple(&self, t: &Triple) -> String {
        format!(
            "<{}, {}, {}>",
            self.entity_label(t.subject),
            self.predicate_label(t.predicate),
            self.entity_label(t.object)
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(text: &str) -> (KnowledgeGraph, LoadReport) {
        KnowledgeGraph::read_tsv(text.as_bytes(), &LoadConfig::default()).unwrap()
    }

    #[test]
    fn types_attach_to_known_entities() {
        let (mut g, _) = load("A\tp\tB\n");
        let n = g.read_types("# t\nA\tCity\nA\tCapital\nA\tCity\n".as_bytes()).unwrap();
        assert_eq!(n, 3);
        assert_eq!(g.entity_types(g.entity("A").unwrap()), ["Capital", "City"]);
        assert!(g.entity_types(g.entity("B").unwrap()).is_empty());
        assert!(matches!(g.read_types("Z\tCity\n".as_bytes()), Err(Error::UnknownEntity(_))));
        assert!(matches!(g.read_types("A\n".as_bytes()), Err(Error::Format { line: 1, .. })));
    }

    #[test]
    fn three_line_file() {
        let (g, r) = load("A\tp\tB\nB\tp\tC\nA\tq\tC\n");
        assert_eq!(g.entity_count(), 3);
        assert_eq!(g.predicate_count(), 2);
        assert_eq!(g.triple_count(), 3);
        assert!(r.malformed.is_empty());
    }

    #[test]
    fn duplicates_are_stored_once() {
        let (g, r) = load("A\tp\tB\nA\tp\tB\n");
        assert_eq!(g.triple_count(), 1);
        assert_eq!(r.duplicates, 1);
    }

    #[test]
    fn parallel_predicates_are_kept() {
        let (g, _) = load("A\tp\tB\nA\tq\tB\n");
        assert_eq!(g.triple_count(), 2);
    }

    #[test]
    fn comments_blank_and_extra_fields() {
        let (g, r) = load("# header\n\nA\tp\tB\textra\tmore\r\n");
        assert_eq!(g.triple_count(), 1);
        assert_eq!(r.comments, 1);
        assert_eq!(r.blank, 1);
        assert_eq!(g.resolve_entity("B"), Some(EntityId(1)));
    }

    #[test]
    fn malformed_lines_counted_or_fatal() {
        let text = "A\tp\tB\nbroken line\nC\tq\n";
        let (g, r) = load(text);
        assert_eq!(g.triple_count(), 1);
        assert_eq!(r.malformed, vec![2, 3]);

        let strict = LoadConfig {
            strict: true,
            ..Default::default()
        };
        match KnowledgeGraph::read_tsv(text.as_bytes(), &strict) {
            Err(Error::Format { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = KnowledgeGraph::load_tsv("/nonexistent/kg.tsv", &LoadConfig::default())
            .unwrap_err();
        assert_eq!(err.kind(), "IoError");
    }

    #[test]
    fn resolve_and_round_trip() {
        let (g, _) = load("Barack Obama\twasBornIn\tHonolulu\n");
        let id = g.resolve_entity("Barack Obama").unwrap();
        assert_eq!(g.entity_label(id), "Barack Obama");
        assert_eq!(g.resolve_entity("barack obama"), None);
        assert_eq!(g.resolve_entity("Nobody"), None);
        for (i, label) in g.entities().labels().iter().enumerate() {
            assert_eq!(g.resolve_entity(label), Some(EntityId(i as u32)));
        }
    }

    #[test]
    fn lowercase_config_normalizes_lookups() {
        let cfg = LoadConfig {
            lowercase_labels: true,
            ..Default::default()
        };
        let (g, _) = KnowledgeGraph::read_tsv("Barack Obama\twasBornIn\tHonolulu\n".as_bytes(), &cfg)
            .unwrap();
        assert!(g.resolve_entity("BARACK OBAMA").is_some());
        assert!(g.resolve_predicate("WasBornIn").is_some());
    }

    #[test]
    fn neighbor_lists_are_sorted() {
        let (g, _) = load("H\tq\tC\nH\tp\tB\nX\tr\tH\n");
        let h = g.resolve_entity("H").unwrap();
        let p = g.resolve_predicate("p").unwrap();
        let q = g.resolve_predicate("q").unwrap();
        let b = g.resolve_entity("B").unwrap();
        let c = g.resolve_entity("C").unwrap();
        let out: Vec<_> = g
            .neighbors(h, Direction::Out)
            .unwrap()
            .iter()
            .map(|n| (n.predicate, n.entity))
            .collect();
        // q was interned first, so q < p by id
        assert_eq!(out, vec![(q, c), (p, b)]);
        let both = g.neighbors(h, Direction::Both).unwrap();
        assert_eq!(both.len(), 3);
        assert_eq!(
            both.iter().filter(|n| n.direction == EdgeDirection::In).count(),
            1
        );
        assert!(matches!(
            g.neighbors(EntityId(99), Direction::Out),
            Err(Error::UnknownEntity(_))
        ));
    }

    #[test]
    fn handshake_identity() {
        let (g, _) = load("A\tp\tB\nB\tp\tC\nA\tq\tC\nC\tq\tA\nA\tp\tA\n");
        let total: usize = (0..g.entity_count() as u32)
            .map(|i| g.out_degree(EntityId(i)))
            .sum();
        assert_eq!(total, g.triple_count());
        let total_in: usize = (0..g.entity_count() as u32)
            .map(|i| g.in_degree(EntityId(i)))
            .sum();
        assert_eq!(total_in, g.triple_count());
    }
}
