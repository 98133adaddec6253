//! Finite posets whose cover relations carry letters.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::sync::OnceLock;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chain_system::{Letter, Word};

pub const DEFAULT_ISO_BOUND: usize = 5000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PosetError {
    #[error("cover ({0}, {1}) is out of range")]
    OutOfRange(usize, usize),
    #[error("cover relation has a cycle")]
    Cyclic,
    #[error("cover ({0}, {1}) is implied by a longer path")]
    Redundant(usize, usize),
    #[error("pair ({0}, {1}) carries two labels")]
    DoubleLabel(usize, usize),
    #[error("poset needs a unique minimum and maximum")]
    NoBounds,
    #[error("label {0} occurs in both factors")]
    LabelCollision(String),
    #[error("poset has {0} elements, above the bound {1}")]
    TooLarge(usize, usize),
    #[error("label map is not a bijection of label sets")]
    BadLabelMap,
    #[error("malformed poset json: {0}")]
    Json(String),
}

#[derive(Debug, Clone)]
pub struct LabeledPoset {
    names: Vec<String>,
    covers: Vec<(usize, usize, Letter)>,
    up: Vec<Vec<(usize, Letter)>>,
    down: Vec<Vec<(usize, Letter)>>,
    order: OnceLock<Order>,
}

#[derive(Debug, Clone)]
struct Order {
    above: Vec<FixedBitSet>,
    below: Vec<FixedBitSet>,
    topo: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeCheck {
    pub is_lattice: bool,
    pub witness: Option<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct PosetJson {
    elements: Vec<String>,
    covers: Vec<(usize, usize, String)>,
}

impl LabeledPoset {
    pub fn new(names: Vec<String>, covers: Vec<(usize, usize, Letter)>) -> Result<Self, PosetError> {
        let n = names.len();
        let mut seen: HashMap<(usize, usize), Letter> = HashMap::new();
        let mut uniq = Vec::new();
        for (a, b, l) in covers {
            if a >= n || b >= n {
                return Err(PosetError::OutOfRange(a, b));
            }
            match seen.get(&(a, b)) {
                Some(old) if *old != l => return Err(PosetError::DoubleLabel(a, b)),
                Some(_) => {}
                None => {
                    seen.insert((a, b), l.clone());
                    uniq.push((a, b, l));
                }
            }
        }
        uniq.sort();
        let mut up = vec![Vec::new(); n];
        let mut down = vec![Vec::new(); n];
        for (a, b, l) in &uniq {
            up[*a].push((*b, l.clone()));
            down[*b].push((*a, l.clone()));
        }
        let p = LabeledPoset { names, covers: uniq, up, down, order: OnceLock::new() };
        let order = p.compute_order()?;
        for (a, b, _) in &p.covers {
            let redundant = p.up[*a]
                .iter()
                .any(|(c, _)| c != b && order.above[*c].contains(*b));
            if redundant {
                return Err(PosetError::Redundant(*a, *b));
            }
        }
        let _ = p.order.set(order);
        Ok(p)
    }

    fn compute_order(&self) -> Result<Order, PosetError> {
        let n = self.names.len();
        let mut indeg: Vec<usize> = self.down.iter().map(Vec::len).collect();
        let mut queue: VecDeque<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut topo = Vec::with_capacity(n);
        while let Some(x) = queue.pop_front() {
            topo.push(x);
            for (y, _) in &self.up[x] {
                indeg[*y] -= 1;
                if indeg[*y] == 0 {
                    queue.push_back(*y);
                }
            }
        }
        if topo.len() != n {
            return Err(PosetError::Cyclic);
        }
        let mut above = vec![FixedBitSet::with_capacity(n); n];
        for &x in topo.iter().rev() {
            let mut s = FixedBitSet::with_capacity(n);
            s.insert(x);
            for (y, _) in &self.up[x] {
                s.union_with(&above[*y]);
            }
            above[x] = s;
        }
        let mut below = vec![FixedBitSet::with_capacity(n); n];
        for &x in &topo {
            let mut s = FixedBitSet::with_capacity(n);
            s.insert(x);
            for (y, _) in &self.down[x] {
                s.union_with(&below[*y]);
            }
            below[x] = s;
        }
        Ok(Order { above, below, topo })
    }

    fn order(&self) -> &Order {
        self.order
            .get_or_init(|| self.compute_order().expect("validated at construction"))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn covers(&self) -> &[(usize, usize, Letter)] {
        &self.covers
    }

    pub fn up_covers(&self, x: usize) -> &[(usize, Letter)] {
        &self.up[x]
    }

    pub fn down_covers(&self, x: usize) -> &[(usize, Letter)] {
        &self.down[x]
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.order().above[x].contains(y)
    }

    pub fn topological_order(&self) -> &[usize] {
        &self.order().topo
    }

    pub fn labels(&self) -> BTreeSet<Letter> {
        self.covers.iter().map(|(_, _, l)| l.clone()).collect()
    }

    pub fn minimal(&self) -> Vec<usize> {
        (0..self.len()).filter(|&x| self.down[x].is_empty()).collect()
    }

    pub fn maximal(&self) -> Vec<usize> {
        (0..self.len()).filter(|&x| self.up[x].is_empty()).collect()
    }

    pub fn bottom(&self) -> Option<usize> {
        match self.minimal().as_slice() {
            [x] => Some(*x),
            _ => None,
        }
    }

    pub fn top(&self) -> Option<usize> {
        match self.maximal().as_slice() {
            [x] => Some(*x),
            _ => None,
        }
    }

    /// Length of the longest chain.
    pub fn height(&self) -> usize {
        let mut best = vec![0usize; self.len()];
        for &x in self.topological_order() {
            for (y, _) in &self.up[x] {
                best[*y] = best[*y].max(best[x] + 1);
            }
        }
        best.into_iter().max().unwrap_or(0)
    }

    pub fn is_lattice(&self) -> Result<LatticeCheck, PosetError> {
        if self.bottom().is_none() || self.top().is_none() {
            return Err(PosetError::NoBounds);
        }
        let ord = self.order();
        let n = self.len();
        let has_extreme = |sets: &[FixedBitSet], a: usize, b: usize| {
            let mut common = sets[a].clone();
            common.intersect_with(&sets[b]);
            let size = common.count_ones(..);
            common.ones().any(|u| sets[u].count_ones(..) == size)
        };
        for a in 0..n {
            for b in a + 1..n {
                if !has_extreme(&ord.above, a, b) || !has_extreme(&ord.below, a, b) {
                    return Ok(LatticeCheck { is_lattice: false, witness: Some((a, b)) });
                }
            }
        }
        Ok(LatticeCheck { is_lattice: true, witness: None })
    }

    /// Label words of all maximal chains, sorted.
    pub fn maximal_chains(&self) -> Vec<Word> {
        let mut out: Vec<Word> = self
            .maximal_chain_paths()
            .into_iter()
            .map(|(_, w)| w)
            .collect();
        crate::chain_system::sort_words(&mut out);
        out
    }

    /// Maximal chains as (element sequence, label word).
    pub fn maximal_chain_paths(&self) -> Vec<(Vec<usize>, Word)> {
        let mut out = Vec::new();
        for m in self.minimal() {
            let mut elems = vec![m];
            let mut word = Vec::new();
            self.extend_chains(&mut elems, &mut word, &mut out);
        }
        out
    }

    fn extend_chains(&self, elems: &mut Vec<usize>, word: &mut Word, out: &mut Vec<(Vec<usize>, Word)>) {
        let x = *elems.last().unwrap();
        if self.up[x].is_empty() {
            out.push((elems.clone(), word.clone()));
            return;
        }
        for (y, l) in &self.up[x] {
            elems.push(*y);
            word.push(l.clone());
            self.extend_chains(elems, word, out);
            elems.pop();
            word.pop();
        }
    }

    /// For each `y ≥ x`, the label words of saturated chains from `x` to `y`.
    pub fn interval_words_from(&self, x: usize) -> BTreeMap<usize, Vec<Word>> {
        let mut acc: HashMap<usize, Vec<Word>> = HashMap::new();
        acc.insert(x, vec![Vec::new()]);
        for &y in self.topological_order() {
            let Some(ws) = acc.get(&y).cloned() else { continue };
            for (z, l) in &self.up[y] {
                let entry = acc.entry(*z).or_default();
                for w in &ws {
                    let mut w2 = w.clone();
                    w2.push(l.clone());
                    entry.push(w2);
                }
            }
        }
        acc.into_iter()
            .map(|(k, mut v)| {
                crate::chain_system::sort_words(&mut v);
                v.dedup();
                (k, v)
            })
            .collect()
    }

    pub fn labeled_product(&self, other: &LabeledPoset) -> Result<LabeledPoset, PosetError> {
        let la = self.labels();
        if let Some(l) = other.labels().iter().find(|l| la.contains(*l)) {
            return Err(PosetError::LabelCollision(l.to_string()));
        }
        let m = other.len();
        let idx = |a: usize, b: usize| a * m + b;
        let mut names = Vec::with_capacity(self.len() * m);
        for a in &self.names {
            for b in &other.names {
                names.push(format!("({a}, {b})"));
            }
        }
        let mut covers = Vec::new();
        for (x, y, l) in &self.covers {
            for b in 0..m {
                covers.push((idx(*x, b), idx(*y, b), l.clone()));
            }
        }
        for (x, y, l) in &other.covers {
            for a in 0..self.len() {
                covers.push((idx(a, *x), idx(a, *y), l.clone()));
            }
        }
        LabeledPoset::new(names, covers)
    }

    /// Decides whether some poset isomorphism respects labels through a bijection of label
    /// sets; with `label_map` the bijection is fixed.
    pub fn isomorphic_labeled(
        &self,
        other: &LabeledPoset,
        label_map: Option<&HashMap<Letter, Letter>>,
    ) -> Result<bool, PosetError> {
        self.isomorphic_labeled_bounded(other, label_map, DEFAULT_ISO_BOUND)
    }

    /// Decides order isomorphism, ignoring labels.
    pub fn isomorphic_unlabeled(&self, other: &LabeledPoset) -> Result<bool, PosetError> {
        self.isomorphic_search(other, None, DEFAULT_ISO_BOUND, false)
    }

    pub fn isomorphic_labeled_bounded(
        &self,
        other: &LabeledPoset,
        label_map: Option<&HashMap<Letter, Letter>>,
        bound: usize,
    ) -> Result<bool, PosetError> {
        self.isomorphic_search(other, label_map, bound, true)
    }

    fn isomorphic_search(
        &self,
        other: &LabeledPoset,
        label_map: Option<&HashMap<Letter, Letter>>,
        bound: usize,
        labeled: bool,
    ) -> Result<bool, PosetError> {
        if self.len() > bound || other.len() > bound {
            return Err(PosetError::TooLarge(self.len().max(other.len()), bound));
        }
        let (la, lb) = (self.labels(), other.labels());
        if let Some(map) = label_map {
            let image: HashSet<&Letter> = map.values().collect();
            let keys_ok = la.iter().all(|l| map.contains_key(l));
            if !keys_ok || image.len() != map.len() || map.len() != la.len() {
                return Err(PosetError::BadLabelMap);
            }
        }
        if self.len() != other.len() || self.covers.len() != other.covers.len() {
            return Ok(false);
        }
        if labeled && la.len() != lb.len() {
            return Ok(false);
        }
        let inv_a = self.element_invariants();
        let inv_b = other.element_invariants();
        let mut sa = inv_a.clone();
        let mut sb = inv_b.clone();
        sa.sort();
        sb.sort();
        if sa != sb {
            return Ok(false);
        }
        let lab_a = if labeled { self.label_invariants() } else { HashMap::new() };
        let lab_b = if labeled { other.label_invariants() } else { HashMap::new() };
        let mut la_inv: Vec<_> = lab_a.values().cloned().collect();
        let mut lb_inv: Vec<_> = lab_b.values().cloned().collect();
        la_inv.sort();
        lb_inv.sort();
        if la_inv != lb_inv {
            return Ok(false);
        }
        let mut lam: HashMap<Letter, Letter> = HashMap::new();
        let mut lam_inv: HashMap<Letter, Letter> = HashMap::new();
        if let Some(map) = label_map {
            for (k, v) in map {
                if lab_a.get(k) != lab_b.get(v) {
                    return Ok(false);
                }
                lam.insert(k.clone(), v.clone());
                lam_inv.insert(v.clone(), k.clone());
            }
        }
        let mut search = IsoSearch {
            a: self,
            b: other,
            inv_a,
            inv_b,
            lab_a,
            lab_b,
            order: self.topological_order().to_vec(),
            eta: vec![None; self.len()],
            used: vec![false; other.len()],
            lam,
            lam_inv,
            labeled,
        };
        Ok(search.run(0))
    }

    /// (longest chain below, longest chain above, down-degree, up-degree).
    fn element_invariants(&self) -> Vec<(usize, usize, usize, usize)> {
        let n = self.len();
        let mut below = vec![0usize; n];
        for &x in self.topological_order() {
            for (y, _) in &self.up[x] {
                below[*y] = below[*y].max(below[x] + 1);
            }
        }
        let mut above = vec![0usize; n];
        for &x in self.topological_order().iter().rev() {
            for (y, _) in &self.down[x] {
                above[*y] = above[*y].max(above[x] + 1);
            }
        }
        (0..n)
            .map(|x| (below[x], above[x], self.down[x].len(), self.up[x].len()))
            .collect()
    }

    /// For each label, the sorted list of invariants of the lower ends of its covers.
    fn label_invariants(&self) -> HashMap<Letter, Vec<(usize, usize, usize, usize)>> {
        let inv = self.element_invariants();
        let mut out: HashMap<Letter, Vec<_>> = HashMap::new();
        for (a, _, l) in &self.covers {
            out.entry(l.clone()).or_default().push(inv[*a]);
        }
        out.values_mut().for_each(|v| v.sort());
        out
    }

    pub fn to_dot(&self, name: &str) -> String {
        let mut s = format!("digraph \"{}\" {{\n", escape(name));
        for (i, nm) in self.names.iter().enumerate() {
            s.push_str(&format!("  n{i} [label=\"{}\"];\n", escape(nm)));
        }
        for (a, b, l) in &self.covers {
            s.push_str(&format!("  n{a} -> n{b} [label=\"{}\"];\n", escape(l.as_str())));
        }
        s.push_str("}\n");
        s
    }

    pub fn to_json(&self) -> String {
        let j = PosetJson {
            elements: self.names.clone(),
            covers: self
                .covers
                .iter()
                .map(|(a, b, l)| (*a, *b, l.as_str().to_string()))
                .collect(),
        };
        serde_json::to_string_pretty(&j).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self, PosetError> {
        let j: PosetJson = serde_json::from_str(text).map_err(|e| PosetError::Json(e.to_string()))?;
        let covers = j.covers.into_iter().map(|(a, b, l)| (a, b, Letter::new(&l))).collect();
        LabeledPoset::new(j.elements, covers)
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

struct IsoSearch<'a> {
    a: &'a LabeledPoset,
    b: &'a LabeledPoset,
    inv_a: Vec<(usize, usize, usize, usize)>,
    inv_b: Vec<(usize, usize, usize, usize)>,
    lab_a: HashMap<Letter, Vec<(usize, usize, usize, usize)>>,
    lab_b: HashMap<Letter, Vec<(usize, usize, usize, usize)>>,
    order: Vec<usize>,
    eta: Vec<Option<usize>>,
    used: Vec<bool>,
    lam: HashMap<Letter, Letter>,
    lam_inv: HashMap<Letter, Letter>,
    labeled: bool,
}

impl IsoSearch<'_> {
    fn run(&mut self, idx: usize) -> bool {
        if idx == self.order.len() {
            return true;
        }
        let x = self.order[idx];
        let candidates: Vec<usize> = match self.a.down[x].first() {
            Some((z, la)) => {
                let ez = self.eta[*z].expect("lower cover assigned first");
                self.b.up[ez]
                    .iter()
                    .filter(|(_, lb)| self.label_ok(la, lb))
                    .map(|(y, _)| *y)
                    .collect()
            }
            None => self.b.minimal(),
        };
        for y in candidates {
            if self.used[y] || self.inv_a[x] != self.inv_b[y] {
                continue;
            }
            let mut added: Vec<Letter> = Vec::new();
            if self.try_assign(x, y, &mut added) {
                self.eta[x] = Some(y);
                self.used[y] = true;
                if self.run(idx + 1) {
                    return true;
                }
                self.eta[x] = None;
                self.used[y] = false;
            }
            for l in added {
                if let Some(v) = self.lam.remove(&l) {
                    self.lam_inv.remove(&v);
                }
            }
        }
        false
    }

    fn label_ok(&self, la: &Letter, lb: &Letter) -> bool {
        if !self.labeled {
            return true;
        }
        match (self.lam.get(la), self.lam_inv.get(lb)) {
            (Some(v), _) => v == lb,
            (None, Some(_)) => false,
            (None, None) => self.lab_a.get(la) == self.lab_b.get(lb),
        }
    }

    /// Checks every lower cover of `x` against the lower covers of `y`, extending the label map.
    fn try_assign(&mut self, x: usize, y: usize, added: &mut Vec<Letter>) -> bool {
        let lowers: Vec<(usize, Letter)> = self.a.down[x].clone();
        for (z, la) in lowers {
            let ez = self.eta[z].expect("assigned");
            let Some((_, lb)) = self.b.down[y].iter().find(|(w, _)| *w == ez) else {
                return false;
            };
            if !self.label_ok(&la, lb) {
                return false;
            }
            if self.labeled && !self.lam.contains_key(&la) {
                self.lam.insert(la.clone(), lb.clone());
                self.lam_inv.insert(lb.clone(), la.clone());
                added.push(la);
            }
        }
        true
    }
}
