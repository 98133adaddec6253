//! Chain systems: finite word sets satisfying the completion and no-substitution axioms.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use itertools::Itertools;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::labeled_poset::{LabeledPoset, PosetError};
use crate::linalg::Q;
use crate::report::{all_pass, Check};

pub const DEFAULT_GROUP_LIKE_BOUND: usize = 2000;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(Arc<str>);

impl Letter {
    pub fn new(s: &str) -> Self {
        Letter(Arc::from(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for Letter {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Letter {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Ok(Letter::new(&s))
    }
}

pub type Word = Vec<Letter>;

pub fn word(s: &str) -> Word {
    s.chars().map(|c| Letter::new(&c.to_string())).collect()
}

pub fn word_string(w: &[Letter]) -> String {
    if w.is_empty() {
        "e".to_string()
    } else {
        w.iter().join(" ")
    }
}

/// Sorts by (length, lexicographic).
pub fn sort_words(words: &mut [Word]) {
    words.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChainError {
    #[error("letter {0} is not in the alphabet")]
    ForeignLetter(String),
    #[error("completion axiom fails: {0}")]
    CompletionAxiom(String),
    #[error("not a chain system: {0}")]
    NotChainSystem(String),
    #[error("alphabets overlap in {0}")]
    Overlap(String),
    #[error("letter map is not a bijection between alphabets")]
    BadLetterMap,
    #[error("relation contains the loop {0}{0}, so sequences are unbounded")]
    Loop(String),
    #[error("weight of {0} is not positive")]
    BadWeight(String),
    #[error("poset violates the label-reading condition: chains {0} and {1}")]
    LabelReading(String, String),
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error("malformed chain system json: {0}")]
    Json(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainSystem {
    alphabet: Vec<Letter>,
    words: Vec<Word>,
    set: HashSet<Word>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct BinaryRelation {
    pub pairs: BTreeSet<(Letter, Letter)>,
}

impl BinaryRelation {
    pub fn new(pairs: impl IntoIterator<Item = (Letter, Letter)>) -> Self {
        BinaryRelation { pairs: pairs.into_iter().collect() }
    }

    pub fn contains(&self, a: &Letter, b: &Letter) -> bool {
        self.pairs.contains(&(a.clone(), b.clone()))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Partition of prefixes (or postfixes) into classes.
#[derive(Debug, Clone)]
pub struct Classes {
    pub members: Vec<Vec<Word>>,
    pub index: HashMap<Word, usize>,
}

impl Classes {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn class_of(&self, w: &[Letter]) -> Option<usize> {
        self.index.get(w).copied()
    }
}

#[derive(Debug, Clone)]
pub struct AxiomReport {
    pub degenerate: bool,
    pub max_length: usize,
    pub checks: Vec<Check>,
}

impl AxiomReport {
    pub fn passes(&self) -> bool {
        !self.degenerate && all_pass(&self.checks)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        crate::report::find(&self.checks, name)
    }
}

#[derive(Debug, Clone)]
pub struct GarsideReport {
    pub checks: Vec<Check>,
}

impl GarsideReport {
    pub fn passes(&self) -> bool {
        all_pass(&self.checks)
    }
}

#[derive(Serialize, Deserialize)]
struct ChainJson {
    alphabet: Vec<Letter>,
    words: Vec<Word>,
    #[serde(default)]
    checks: Vec<JsonCheck>,
}

#[derive(Serialize, Deserialize)]
struct JsonCheck {
    name: String,
    pass: bool,
    witness: Option<String>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

impl ChainSystem {
    /// Builds a system whose alphabet is the set of occurring letters.
    pub fn new(words: impl IntoIterator<Item = Word>) -> Self {
        let mut ws: Vec<Word> = words.into_iter().collect();
        sort_words(&mut ws);
        ws.dedup();
        let alphabet: BTreeSet<Letter> = ws.iter().flatten().cloned().collect();
        let set = ws.iter().cloned().collect();
        ChainSystem { alphabet: alphabet.into_iter().collect(), words: ws, set }
    }

    pub fn with_alphabet(
        alphabet: &BTreeSet<Letter>,
        words: impl IntoIterator<Item = Word>,
    ) -> Result<Self, ChainError> {
        let c = Self::new(words);
        if let Some(l) = c.alphabet.iter().find(|l| !alphabet.contains(*l)) {
            return Err(ChainError::ForeignLetter(l.to_string()));
        }
        Ok(c)
    }

    pub fn from_strs(words: &[&str]) -> Self {
        Self::new(words.iter().map(|s| word(s)))
    }

    pub fn alphabet(&self) -> &[Letter] {
        &self.alphabet
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains(&self, w: &[Letter]) -> bool {
        self.set.contains(w)
    }

    pub fn prefixes(&self) -> BTreeSet<Word> {
        self.words
            .iter()
            .flat_map(|w| (0..=w.len()).map(move |i| w[..i].to_vec()))
            .collect()
    }

    pub fn postfixes(&self) -> BTreeSet<Word> {
        self.words
            .iter()
            .flat_map(|w| (0..=w.len()).map(move |i| w[i..].to_vec()))
            .collect()
    }

    /// Transitive closure of "share a completion", on prefixes or postfixes.
    fn closure_classes(&self, prefixes: bool) -> Classes {
        let mut ids: HashMap<Word, usize> = HashMap::new();
        let mut items: Vec<Word> = Vec::new();
        let mut links: Vec<(Word, usize)> = Vec::new();
        for w in &self.words {
            for i in 0..=w.len() {
                let (mine, other) = if prefixes {
                    (w[..i].to_vec(), w[i..].to_vec())
                } else {
                    (w[i..].to_vec(), w[..i].to_vec())
                };
                let id = *ids.entry(mine.clone()).or_insert_with(|| {
                    items.push(mine);
                    items.len() - 1
                });
                links.push((other, id));
            }
        }
        let mut uf = UnionFind((0..items.len()).collect());
        let mut first: HashMap<Word, usize> = HashMap::new();
        for (other, id) in links {
            match first.get(&other) {
                Some(&f) => uf.union(f, id),
                None => {
                    first.insert(other, id);
                }
            }
        }
        let mut groups: HashMap<usize, Vec<Word>> = HashMap::new();
        for (i, w) in items.iter().enumerate() {
            groups.entry(uf.find(i)).or_default().push(w.clone());
        }
        let mut members: Vec<Vec<Word>> = groups
            .into_values()
            .map(|mut v| {
                sort_words(&mut v);
                v
            })
            .collect();
        members.sort_by(|a, b| a[0].len().cmp(&b[0].len()).then_with(|| a[0].cmp(&b[0])));
        let mut index = HashMap::new();
        for (c, ws) in members.iter().enumerate() {
            for w in ws {
                index.insert(w.clone(), c);
            }
        }
        Classes { members, index }
    }

    pub fn check_axioms(&self) -> AxiomReport {
        let max_length = self.words.iter().map(Vec::len).max().unwrap_or(0);
        if self.words.is_empty() {
            return AxiomReport { degenerate: true, max_length, checks: Vec::new() };
        }
        let pre = self.closure_classes(true);
        let post = self.closure_classes(false);
        let mut checks = vec![Check::pass("condition_i")];
        checks.push(Check::from_result("condition_ii", self.completion_check(&pre, &post)));
        let (iii, lemma) = self.substitution_checks();
        checks.push(Check::from_result("condition_iii", iii));
        checks.push(Check::from_result("maximal_extension", lemma));
        checks.push(Check::from_result("prefix_equivalence_transitive", self.transitivity(&pre, true)));
        checks.push(Check::from_result("postfix_equivalence_transitive", self.transitivity(&post, false)));
        AxiomReport { degenerate: false, max_length, checks }
    }

    fn completion_check(&self, pre: &Classes, post: &Classes) -> Result<(), String> {
        let mut count: HashMap<(usize, usize), usize> = HashMap::new();
        for w in &self.words {
            for i in 0..=w.len() {
                let p = pre.index[&w[..i]];
                let x = post.index[&w[i..]];
                *count.entry((p, x)).or_default() += 1;
            }
        }
        let mut keys: Vec<_> = count.keys().copied().collect();
        keys.sort_unstable();
        for (p, x) in keys {
            if count[&(p, x)] == pre.members[p].len() * post.members[x].len() {
                continue;
            }
            for a in &pre.members[p] {
                for b in &post.members[x] {
                    let mut ab = a.clone();
                    ab.extend(b.iter().cloned());
                    if !self.contains(&ab) {
                        return Err(format!(
                            "prefix [{}] and postfix [{}] lie in classes that complete elsewhere, but their concatenation is missing",
                            word_string(a),
                            word_string(b)
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    fn substitution_checks(&self) -> (Result<(), String>, Result<(), String>) {
        let mut middles: HashMap<(&[Letter], &[Letter]), Vec<&[Letter]>> = HashMap::new();
        for w in &self.words {
            for i in 0..=w.len() {
                for j in i..=w.len() {
                    middles.entry((&w[..i], &w[j..])).or_default().push(&w[i..j]);
                }
            }
        }
        let mut keys: Vec<_> = middles.keys().copied().collect();
        keys.sort();
        let mut iii = Ok(());
        let mut lemma = Ok(());
        for key in keys {
            let ms = &middles[&key];
            if ms.len() < 2 {
                continue;
            }
            let (p, x) = key;
            if iii.is_ok() {
                if let Some(a) = ms.iter().find(|m| m.len() == 1) {
                    let other = ms.iter().find(|m| *m != a).unwrap();
                    iii = Err(format!(
                        "p = [{}], a = [{}], w = [{}], x = [{}]",
                        word_string(p),
                        word_string(a),
                        word_string(other),
                        word_string(x)
                    ));
                }
            }
            if lemma.is_ok() && ms.iter().any(|m| m.is_empty()) {
                let other = ms.iter().find(|m| !m.is_empty()).unwrap();
                lemma = Err(format!(
                    "p = [{}], w = [{}], x = [{}]",
                    word_string(p),
                    word_string(other),
                    word_string(x)
                ));
            }
        }
        (iii, lemma)
    }

    fn transitivity(&self, classes: &Classes, prefixes: bool) -> Result<(), String> {
        let mut completions: HashMap<&[Letter], BTreeSet<&[Letter]>> = HashMap::new();
        for w in &self.words {
            for i in 0..=w.len() {
                let (mine, other) = if prefixes { (&w[..i], &w[i..]) } else { (&w[i..], &w[..i]) };
                completions.entry(mine).or_default().insert(other);
            }
        }
        for members in &classes.members {
            let first = &completions[members[0].as_slice()];
            if members.iter().all(|m| &completions[m.as_slice()] == first) {
                continue;
            }
            for (a, b) in members.iter().tuple_combinations() {
                let (ca, cb) = (&completions[a.as_slice()], &completions[b.as_slice()]);
                if ca.is_disjoint(cb) {
                    return Err(format!("[{}] and [{}] share no completion", word_string(a), word_string(b)));
                }
            }
        }
        Ok(())
    }

    fn require_completion_axiom(&self) -> Result<(Classes, Classes), ChainError> {
        let pre = self.closure_classes(true);
        let post = self.closure_classes(false);
        self.completion_check(&pre, &post)
            .map_err(ChainError::CompletionAxiom)?;
        Ok((pre, post))
    }

    pub fn prefix_classes(&self) -> Result<Classes, ChainError> {
        Ok(self.require_completion_axiom()?.0)
    }

    pub fn postfix_classes(&self) -> Result<Classes, ChainError> {
        Ok(self.require_completion_axiom()?.1)
    }

    /// Maps each prefix class to the postfix class of its completions.
    pub fn post_map(&self) -> Result<Vec<usize>, ChainError> {
        let (pre, post) = self.require_completion_axiom()?;
        let mut out = vec![usize::MAX; pre.len()];
        for w in &self.words {
            for i in 0..=w.len() {
                out[pre.index[&w[..i]]] = post.index[&w[i..]];
            }
        }
        Ok(out)
    }

    /// Maps each postfix class to the prefix class of its completions.
    pub fn pre_map(&self) -> Result<Vec<usize>, ChainError> {
        let (pre, post) = self.require_completion_axiom()?;
        let mut out = vec![usize::MAX; post.len()];
        for w in &self.words {
            for i in 0..=w.len() {
                out[post.index[&w[i..]]] = pre.index[&w[..i]];
            }
        }
        Ok(out)
    }

    pub fn build_poset(&self) -> Result<LabeledPoset, ChainError> {
        let report = self.check_axioms();
        if !report.passes() {
            let why = report
                .checks
                .iter()
                .find(|c| !c.passed())
                .map(|c| format!("{}: {}", c.name, c.witness.clone().unwrap_or_default()))
                .unwrap_or_else(|| "empty system".into());
            return Err(ChainError::NotChainSystem(why));
        }
        let pre = self.closure_classes(true);
        let names = pre.members.iter().map(|m| word_string(&m[0])).collect();
        let mut covers = Vec::new();
        for w in &self.words {
            for i in 0..w.len() {
                covers.push((pre.index[&w[..i]], pre.index[&w[..i + 1]], w[i].clone()));
            }
        }
        Ok(LabeledPoset::new(names, covers)?)
    }

    pub fn maximal_b_sequences(rel: &BinaryRelation, alphabet: &BTreeSet<Letter>) -> Result<Self, ChainError> {
        let letters: Vec<Letter> = alphabet.iter().cloned().collect();
        let pos: HashMap<&Letter, usize> = letters.iter().enumerate().map(|(i, l)| (l, i)).collect();
        let n = letters.len();
        let mut out_nb = vec![FixedBitSet::with_capacity(n); n];
        let mut in_nb = vec![FixedBitSet::with_capacity(n); n];
        for (a, b) in &rel.pairs {
            let (Some(&i), Some(&j)) = (pos.get(a), pos.get(b)) else {
                let bad = if pos.contains_key(a) { b } else { a };
                return Err(ChainError::ForeignLetter(bad.to_string()));
            };
            if i == j {
                return Err(ChainError::Loop(a.to_string()));
            }
            out_nb[i].insert(j);
            in_nb[j].insert(i);
        }
        let mut full = FixedBitSet::with_capacity(n);
        full.insert_range(..);
        let found: Vec<Vec<usize>> = (0..n)
            .into_par_iter()
            .map(|first| {
                let mut acc = Vec::new();
                let mut seq = vec![first];
                extend_b(&mut seq, &out_nb[first], &out_nb, &in_nb, &full, &mut acc);
                acc
            })
            .flatten()
            .collect();
        let words = found
            .into_iter()
            .map(|s| s.into_iter().map(|i| letters[i].clone()).collect::<Word>());
        let mut c = Self::new(words);
        if n == 0 {
            c = Self::new(std::iter::empty());
        }
        Ok(c)
    }

    pub fn shuffle(&self, other: &ChainSystem) -> Result<Self, ChainError> {
        let mine: HashSet<&Letter> = self.alphabet.iter().collect();
        if let Some(l) = other.alphabet.iter().find(|l| mine.contains(l)) {
            return Err(ChainError::Overlap(l.to_string()));
        }
        let mut out = Vec::new();
        for x in &self.words {
            for y in &other.words {
                out.extend(shuffles(x, y));
            }
        }
        Ok(Self::new(out))
    }

    pub fn is_isomorphism(&self, other: &ChainSystem, map: &HashMap<Letter, Letter>) -> Result<bool, ChainError> {
        let image: HashSet<&Letter> = map.values().collect();
        let domain_ok = self.alphabet.iter().all(|l| map.contains_key(l)) && map.len() == self.alphabet.len();
        let target: HashSet<&Letter> = other.alphabet.iter().collect();
        if !domain_ok || image.len() != map.len() || image != target {
            return Err(ChainError::BadLetterMap);
        }
        if self.len() != other.len() {
            return Ok(false);
        }
        Ok(self
            .words
            .iter()
            .all(|w| other.contains(&w.iter().map(|l| map[l].clone()).collect::<Word>())))
    }

    pub fn relabel(&self, map: &HashMap<Letter, Letter>) -> Self {
        Self::new(
            self.words
                .iter()
                .map(|w| w.iter().map(|l| map.get(l).cloned().unwrap_or_else(|| l.clone())).collect()),
        )
    }

    /// Two-letter prefixes, the compatibility relation of a binary chain system.
    pub fn two_letter_prefixes(&self) -> BinaryRelation {
        BinaryRelation::new(
            self.words
                .iter()
                .filter(|w| w.len() >= 2)
                .map(|w| (w[0].clone(), w[1].clone())),
        )
    }

    pub fn is_balanced(&self) -> bool {
        self.prefixes() == self.postfixes()
    }

    /// Label words of saturated chains between two prefix classes.
    pub fn restriction(&self, x: usize, y: usize) -> Result<ChainSystem, ChainError> {
        let p = self.build_poset()?;
        let words = p.interval_words_from(x).remove(&y).unwrap_or_default();
        Ok(ChainSystem::new(words))
    }

    fn interval_sets(p: &LabeledPoset) -> (HashMap<(usize, usize), usize>, Vec<Vec<Word>>) {
        let mut ids: HashMap<Vec<Word>, usize> = HashMap::new();
        let mut sets: Vec<Vec<Word>> = Vec::new();
        let mut of: HashMap<(usize, usize), usize> = HashMap::new();
        for x in 0..p.len() {
            for (y, ws) in p.interval_words_from(x) {
                let id = *ids.entry(ws.clone()).or_insert_with(|| {
                    sets.push(ws);
                    sets.len() - 1
                });
                of.insert((x, y), id);
            }
        }
        (of, sets)
    }

    pub fn restriction_property(&self) -> Result<Result<(), String>, ChainError> {
        let p = self.build_poset()?;
        let (of, sets) = Self::interval_sets(&p);
        let mut keys: Vec<_> = of.keys().copied().collect();
        keys.sort_unstable();
        let mut owner: HashMap<&Word, ((usize, usize), usize)> = HashMap::new();
        for key in keys {
            let id = of[&key];
            for w in &sets[id] {
                if w.is_empty() {
                    continue;
                }
                match owner.get(w) {
                    Some((other, oid)) if *oid != id => {
                        return Ok(Err(format!(
                            "[{}] lies in the restrictions to [{}, {}] and [{}, {}], which differ",
                            word_string(w),
                            p.names()[other.0],
                            p.names()[other.1],
                            p.names()[key.0],
                            p.names()[key.1]
                        )))
                    }
                    Some(_) => {}
                    None => {
                        owner.insert(w, (key, id));
                    }
                }
            }
        }
        Ok(Ok(()))
    }

    pub fn has_restriction_property(&self) -> Result<bool, ChainError> {
        Ok(self.restriction_property()?.is_ok())
    }

    /// Three-interval group-like condition; `None` above the element bound.
    pub fn group_like_direct(&self, bound: usize) -> Result<Option<Result<(), String>>, ChainError> {
        let p = self.build_poset()?;
        if p.len() > bound {
            return Ok(None);
        }
        let (of, _) = Self::interval_sets(&p);
        let mut above: Vec<Vec<usize>> = vec![Vec::new(); p.len()];
        let mut keys: Vec<_> = of.keys().copied().collect();
        keys.sort_unstable();
        for &(x, y) in &keys {
            above[x].push(y);
        }
        let mut f1: HashMap<(usize, usize), usize> = HashMap::new();
        let mut f2: HashMap<(usize, usize), usize> = HashMap::new();
        let mut f3: HashMap<(usize, usize), usize> = HashMap::new();
        for x in 0..p.len() {
            for &y in &above[x] {
                for &z in &above[y] {
                    let (a, b, c) = (of[&(x, y)], of[&(x, z)], of[&(y, z)]);
                    for (map, key, val) in [(&mut f1, (a, c), b), (&mut f2, (a, b), c), (&mut f3, (b, c), a)] {
                        if let Some(&old) = map.get(&key) {
                            if old != val {
                                return Ok(Some(Err(format!(
                                    "triple {} <= {} <= {} breaks the two-of-three rule",
                                    p.names()[x],
                                    p.names()[y],
                                    p.names()[z]
                                ))));
                            }
                        } else {
                            map.insert(key, val);
                        }
                    }
                }
            }
        }
        Ok(Some(Ok(())))
    }

    pub fn weight(&self, w: &[Letter], weights: &HashMap<Letter, Q>) -> Q {
        w.iter().fold(Q::zero(), |s, l| s + weights.get(l).copied().unwrap_or_else(Q::zero))
    }

    pub fn is_weighted_graded(&self, weights: &HashMap<Letter, Q>) -> Result<bool, ChainError> {
        for l in &self.alphabet {
            match weights.get(l) {
                Some(w) if *w > Q::zero() => {}
                _ => return Err(ChainError::BadWeight(l.to_string())),
            }
        }
        let mut ws = self.words.iter().map(|w| self.weight(w, weights));
        let Some(first) = ws.next() else { return Ok(true) };
        Ok(ws.all(|w| w == first))
    }

    pub fn unit_weights(&self) -> HashMap<Letter, Q> {
        self.alphabet.iter().map(|l| (l.clone(), Q::from_integer(1))).collect()
    }

    pub fn is_garside(&self, weights: &HashMap<Letter, Q>) -> Result<GarsideReport, ChainError> {
        self.is_garside_bounded(weights, DEFAULT_GROUP_LIKE_BOUND)
    }

    pub fn is_garside_bounded(&self, weights: &HashMap<Letter, Q>, bound: usize) -> Result<GarsideReport, ChainError> {
        let mut checks = Vec::new();
        let graded = self.is_weighted_graded(weights)?;
        checks.push(if graded {
            Check::pass("weighted_graded")
        } else {
            Check::fail("weighted_graded", "maximal chains of different weight")
        });
        let axioms = self.check_axioms();
        if !axioms.passes() {
            checks.push(Check::fail("chain_system", "axioms fail"));
            return Ok(GarsideReport { checks });
        }
        let p = self.build_poset()?;
        let bounded = p.bottom().is_some() && p.top().is_some();
        checks.push(if bounded {
            Check::pass("unique_min_max")
        } else {
            Check::fail("unique_min_max", "several minimal or maximal elements")
        });
        checks.push(Check::pass("finite_height"));
        checks.push(if self.is_balanced() {
            Check::pass("balanced")
        } else {
            Check::fail("balanced", "prefix and postfix sets differ")
        });
        let restriction = self.restriction_property()?;
        let restriction_ok = restriction.is_ok();
        checks.push(Check::from_result("restriction_property", restriction));
        match self.group_like_direct(bound)? {
            Some(r) => checks.push(Check::from_result("group_like_direct", r)),
            None if restriction_ok => {}
            None => checks.push(Check::unknown("group_like_direct", "poset above the element bound")),
        }
        if bounded {
            let lat = p.is_lattice()?;
            checks.push(match lat.witness {
                None => Check::pass("lattice"),
                Some((a, b)) => Check::fail(
                    "lattice",
                    format!("{} and {} lack a meet or join", p.names()[a], p.names()[b]),
                ),
            });
        }
        Ok(GarsideReport { checks })
    }

    pub fn to_json(&self, checks: &[Check]) -> String {
        let j = ChainJson {
            alphabet: self.alphabet.clone(),
            words: self.words.clone(),
            checks: checks
                .iter()
                .map(|c| JsonCheck { name: c.name.clone(), pass: c.passed(), witness: c.witness.clone() })
                .collect(),
        };
        serde_json::to_string_pretty(&j).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self, ChainError> {
        let j: ChainJson = serde_json::from_str(text).map_err(|e| ChainError::Json(e.to_string()))?;
        let alphabet: BTreeSet<Letter> = j.alphabet.into_iter().collect();
        Self::with_alphabet(&alphabet, j.words)
    }
}

/// Converts a poset satisfying the label-reading conditions into its chain system.
pub fn poset_to_chain_system(p: &LabeledPoset) -> Result<ChainSystem, ChainError> {
    let paths = p.maximal_chain_paths();
    let mut from_bottom: HashMap<&[Letter], (usize, usize)> = HashMap::new();
    let mut from_top: HashMap<&[Letter], (usize, usize)> = HashMap::new();
    let render = |k: usize| word_string(&paths[k].1);
    for (k, (elems, w)) in paths.iter().enumerate() {
        for i in 0..=w.len() {
            if let Some(&(x, other)) = from_bottom.get(&w[..i]) {
                if x != elems[i] {
                    return Err(ChainError::LabelReading(render(other), render(k)));
                }
            } else {
                from_bottom.insert(&w[..i], (elems[i], k));
            }
            if let Some(&(x, other)) = from_top.get(&w[i..]) {
                if x != elems[i] {
                    return Err(ChainError::LabelReading(render(other), render(k)));
                }
            } else {
                from_top.insert(&w[i..], (elems[i], k));
            }
        }
    }
    Ok(ChainSystem::new(paths.into_iter().map(|(_, w)| w)))
}

fn extend_b(
    seq: &mut Vec<usize>,
    allowed: &FixedBitSet,
    out_nb: &[FixedBitSet],
    in_nb: &[FixedBitSet],
    full: &FixedBitSet,
    acc: &mut Vec<Vec<usize>>,
) {
    if is_maximal(seq, out_nb, in_nb, full) {
        acc.push(seq.clone());
    }
    for next in allowed.ones() {
        let mut a2 = allowed.clone();
        a2.intersect_with(&out_nb[next]);
        seq.push(next);
        extend_b(seq, &a2, out_nb, in_nb, full, acc);
        seq.pop();
    }
}

fn is_maximal(seq: &[usize], out_nb: &[FixedBitSet], in_nb: &[FixedBitSet], full: &FixedBitSet) -> bool {
    let k = seq.len();
    let mut suffix = vec![full.clone(); k + 1];
    for p in (0..k).rev() {
        let mut s = suffix[p + 1].clone();
        s.intersect_with(&in_nb[seq[p]]);
        suffix[p] = s;
    }
    let mut prefix = full.clone();
    for p in 0..=k {
        let mut both = prefix.clone();
        both.intersect_with(&suffix[p]);
        if both.count_ones(..) > 0 {
            return false;
        }
        if p < k {
            prefix.intersect_with(&out_nb[seq[p]]);
        }
    }
    true
}

pub fn shuffles(x: &[Letter], y: &[Letter]) -> Vec<Word> {
    let n = x.len() + y.len();
    (0..n)
        .combinations(x.len())
        .map(|pos| {
            let mut out = Vec::with_capacity(n);
            let (mut i, mut j) = (0, 0);
            for k in 0..n {
                if i < pos.len() && pos[i] == k {
                    out.push(x[i].clone());
                    i += 1;
                } else {
                    out.push(y[j].clone());
                    j += 1;
                }
            }
            out
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(pairs: &[&str]) -> BinaryRelation {
        BinaryRelation::new(pairs.iter().map(|p| {
            let w = word(p);
            (w[0].clone(), w[1].clone())
        }))
    }

    fn alpha(s: &str) -> BTreeSet<Letter> {
        word(s).into_iter().collect()
    }

    #[test]
    fn axiom_examples() {
        let r = ChainSystem::from_strs(&["a", "bc"]).check_axioms();
        assert!(!r.passes());
        let iii = r.check("condition_iii").unwrap();
        assert!(!iii.passed());
        assert!(iii.witness.as_ref().unwrap().contains("a = [a]"));
        assert!(ChainSystem::from_strs(&["ab"]).check_axioms().passes());
        assert!(ChainSystem::from_strs(&["ab", "ba"]).check_axioms().passes());
        assert!(ChainSystem::new(std::iter::empty()).check_axioms().degenerate);
    }

    #[test]
    fn classes() {
        let c = ChainSystem::from_strs(&["ab", "ba"]);
        let pre = c.prefix_classes().unwrap();
        let got: Vec<Vec<String>> = pre
            .members
            .iter()
            .map(|m| m.iter().map(|w| word_string(w)).collect())
            .collect();
        assert_eq!(got, vec![vec!["e"], vec!["a"], vec!["b"], vec!["a b", "b a"]]);
        let single = ChainSystem::from_strs(&["ab"]);
        assert_eq!(single.prefix_classes().unwrap().len(), 3);
        assert_eq!(c.postfix_classes().unwrap().len(), pre.len());
        let post = c.post_map().unwrap();
        let back = c.pre_map().unwrap();
        for (p, &x) in post.iter().enumerate() {
            assert_eq!(back[x], p);
        }
    }

    #[test]
    fn posets() {
        let b = ChainSystem::from_strs(&["ab", "ba"]).build_poset().unwrap();
        assert_eq!(b.len(), 4);
        assert_eq!(b.maximal_chains().len(), 2);
        assert!(b.is_lattice().unwrap().is_lattice);
        let ch = ChainSystem::from_strs(&["ab"]).build_poset().unwrap();
        assert_eq!(ch.len(), 3);
        assert_eq!(poset_to_chain_system(&ch).unwrap(), ChainSystem::from_strs(&["ab"]));
        assert_eq!(poset_to_chain_system(&b).unwrap(), ChainSystem::from_strs(&["ab", "ba"]));
    }

    #[test]
    fn label_reading_violation() {
        let names = ["0", "x", "y", "1"].iter().map(|s| s.to_string()).collect();
        let p = LabeledPoset::new(
            names,
            vec![
                (0, 1, Letter::new("a")),
                (0, 2, Letter::new("a")),
                (1, 3, Letter::new("b")),
                (2, 3, Letter::new("c")),
            ],
        )
        .unwrap();
        assert!(matches!(poset_to_chain_system(&p), Err(ChainError::LabelReading(_, _))));
    }

    #[test]
    fn b_sequences() {
        assert_eq!(
            ChainSystem::maximal_b_sequences(&rel(&["bc"]), &alpha("abc")).unwrap(),
            ChainSystem::from_strs(&["a", "bc"])
        );
        assert_eq!(
            ChainSystem::maximal_b_sequences(&rel(&[]), &alpha("a")).unwrap(),
            ChainSystem::from_strs(&["a"])
        );
        assert_eq!(
            ChainSystem::maximal_b_sequences(&rel(&["ab", "ba"]), &alpha("ab")).unwrap(),
            ChainSystem::from_strs(&["ab", "ba"])
        );
        assert!(ChainSystem::maximal_b_sequences(&rel(&["aa"]), &alpha("a")).is_err());
    }

    #[test]
    fn shuffle_examples() {
        let s = ChainSystem::from_strs(&["ab"]).shuffle(&ChainSystem::from_strs(&["c"])).unwrap();
        assert_eq!(s, ChainSystem::from_strs(&["abc", "acb", "cab"]));
        let p = s.build_poset().unwrap();
        assert_eq!(p.len(), 6);
        let grid = ChainSystem::from_strs(&["ab"])
            .build_poset()
            .unwrap()
            .labeled_product(&ChainSystem::from_strs(&["c"]).build_poset().unwrap())
            .unwrap();
        assert!(p.isomorphic_labeled(&grid, None).unwrap());
        let big = ChainSystem::from_strs(&["ab", "ba"])
            .shuffle(&ChainSystem::from_strs(&["cd", "dc"]))
            .unwrap();
        assert_eq!(big.len(), 24);
        assert!(ChainSystem::from_strs(&["a"]).shuffle(&ChainSystem::from_strs(&["a"])).is_err());
    }

    #[test]
    fn isomorphisms() {
        let c = ChainSystem::from_strs(&["ab"]);
        let d = ChainSystem::from_strs(&["xy"]);
        let l = |s: &str| Letter::new(s);
        let id: HashMap<_, _> = [(l("a"), l("a")), (l("b"), l("b"))].into_iter().collect();
        assert!(c.is_isomorphism(&c, &id).unwrap());
        let good: HashMap<_, _> = [(l("a"), l("x")), (l("b"), l("y"))].into_iter().collect();
        assert!(c.is_isomorphism(&d, &good).unwrap());
        let bad: HashMap<_, _> = [(l("a"), l("y")), (l("b"), l("x"))].into_iter().collect();
        assert!(!c.is_isomorphism(&d, &bad).unwrap());
        let broken: HashMap<_, _> = [(l("a"), l("x")), (l("b"), l("x"))].into_iter().collect();
        assert!(c.is_isomorphism(&d, &broken).is_err());
    }

    #[test]
    fn garside_examples() {
        let b = ChainSystem::from_strs(&["ab", "ba"]);
        let r = b.is_garside(&b.unit_weights()).unwrap();
        assert!(r.passes(), "{:?}", r.checks);
        let single = ChainSystem::from_strs(&["ab"]);
        assert!(!single.is_balanced());
        let mut w = single.unit_weights();
        w.insert(Letter::new("a"), Q::zero());
        assert!(single.is_weighted_graded(&w).is_err());
    }

    #[test]
    fn restriction_of_boolean() {
        let b = ChainSystem::from_strs(&["ab", "ba"]);
        let r = b.restriction(0, 3).unwrap();
        assert_eq!(r, b);
        let r = b.restriction(1, 3).unwrap();
        assert_eq!(r, ChainSystem::from_strs(&["b"]));
    }

    #[test]
    fn json_round_trip() {
        let c = ChainSystem::from_strs(&["ab", "ba"]);
        let text = c.to_json(&c.check_axioms().checks);
        assert_eq!(ChainSystem::from_json(&text).unwrap(), c);
    }
}
