//! Horizontal data, factored translations and the factorable intervals of an affine Coxeter element.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap, HashSet, VecDeque};

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::chain_system::{BinaryRelation, ChainError, ChainSystem, Letter, Word};
use crate::group::GroupElement;
use crate::labeled_poset::{LabeledPoset, PosetError};
use crate::linalg::{self, Q};
use crate::report::Check;
use crate::root_datum::{abs_root, root_name, sort_roots, Root, RootDatum, RootError, TypeTag};

pub const DEFAULT_INTERVAL_BOUND: usize = 5_000_000;
pub const DEFAULT_HURWITZ_BOUND: usize = 20_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum McSulError {
    #[error("operation needs an affine datum")]
    NotAffine,
    #[error("horizontal data failed validation: {0}")]
    Validation(String),
    #[error("factoring needs at least two components, found {0}")]
    TooFewComponents(usize),
    #[error("q must have {expected} positive entries summing to 1")]
    BadQ { expected: usize },
    #[error("translation vector could not be decomposed: {0}")]
    Decomposition(String),
    #[error("interval search exceeded {0} elements")]
    TooLarge(usize),
    #[error("no consistent bijection from simple horizontal roots to factors: {0}")]
    Bijection(String),
    #[error(transparent)]
    Root(#[from] RootError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Poset(#[from] PosetError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Yes,
    No,
    Unknown,
}

fn to_q(v: &[i64]) -> Vec<Q> {
    v.iter().map(|&x| Q::from_integer(x)).collect()
}

fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |s, (x, y)| s + x * y)
}

fn add(a: &[i64], b: &[i64]) -> Root {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Positive real horizontal roots below `δ`: the roots `β` and `δ − β` for horizontal `β` of
/// the finite root system.
pub fn compute_th(datum: &RootDatum) -> Result<Vec<Root>, McSulError> {
    if datum.tag != TypeTag::Affine {
        return Err(McSulError::NotAffine);
    }
    let delta = datum.delta.clone().ok_or(McSulError::NotAffine)?;
    let mut out = Vec::new();
    for r in datum.positive_real_roots_bounded(Some(&delta))? {
        if datum.is_horizontal(&r)? {
            out.push(r);
        }
    }
    sort_roots(&mut out);
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct HorizontalData {
    pub th_roots: Vec<Root>,
    pub xi: Vec<Root>,
    /// `[β, c(β), c²(β), …]`, one per component.
    pub cycles: Vec<Vec<Root>>,
    pub m: usize,
    #[serde(skip)]
    pub component: HashMap<Root, usize>,
    /// T_H root ↦ `(β, k)` with the root equal to `β_(k)`.
    #[serde(skip)]
    pub composite: HashMap<Root, (Root, usize)>,
}

impl HorizontalData {
    pub fn rank_of(&self, beta: &[i64]) -> usize {
        self.cycles[self.component[beta]].len()
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.cycles.iter().map(Vec::len).collect()
    }

    /// `c^j(β)` for `β ∈ Ξ^c`.
    pub fn c_power(&self, beta: &[i64], j: usize) -> Root {
        let cyc = &self.cycles[self.component[beta]];
        let p = cyc.iter().position(|x| x == beta).expect("root in Ξ");
        cyc[(p + j) % cyc.len()].clone()
    }

    /// `β_(k) = β + c(β) + ⋯ + c^{k−1}(β)`.
    pub fn beta_k(&self, beta: &[i64], k: usize) -> Root {
        (1..k).fold(beta.to_vec(), |acc, j| add(&acc, &self.c_power(beta, j)))
    }
}

pub fn compute_xi(datum: &RootDatum) -> Result<HorizontalData, McSulError> {
    let th = compute_th(datum)?;
    let n = datum.n();
    let th_set: HashSet<&Root> = th.iter().collect();
    let mut composite_roots: HashSet<Root> = HashSet::new();
    for b in &th {
        let mut sum = b.clone();
        let mut cur = b.clone();
        for _ in 1..th.len() {
            cur = datum.apply_c(&cur);
            sum = add(&sum, &cur);
            if !th_set.contains(&sum) {
                break;
            }
            composite_roots.insert(sum.clone());
        }
    }
    let xi: Vec<Root> = th.iter().filter(|r| !composite_roots.contains(*r)).cloned().collect();
    let xi_set: HashSet<&Root> = xi.iter().collect();
    let mut cycles: Vec<Vec<Root>> = Vec::new();
    let mut placed: HashSet<Root> = HashSet::new();
    for b in &xi {
        if placed.contains(b) {
            continue;
        }
        let mut cyc = vec![b.clone()];
        placed.insert(b.clone());
        let mut cur = datum.apply_c(b);
        while &cur != b {
            if !xi_set.contains(&cur) || placed.contains(&cur) {
                return Err(McSulError::Validation(format!(
                    "c does not permute the simple horizontal roots cyclically at {}",
                    root_name(&cur)
                )));
            }
            placed.insert(cur.clone());
            cyc.push(cur.clone());
            cur = datum.apply_c(&cur);
        }
        cycles.push(cyc);
    }
    let m = cycles.len();
    if xi.len() + 2 != n + m {
        return Err(McSulError::Validation(format!(
            "|Ξ| = {} but n - 2 + m = {}",
            xi.len(),
            n + m - 2
        )));
    }
    let mut component = HashMap::new();
    let mut composite = HashMap::new();
    let mut hd = HorizontalData { th_roots: th.clone(), xi, cycles, m, component: HashMap::new(), composite: HashMap::new() };
    for (i, cyc) in hd.cycles.iter().enumerate() {
        for b in cyc {
            component.insert(b.clone(), i);
        }
    }
    hd.component = component.clone();
    for (i, cyc) in hd.cycles.iter().enumerate() {
        for b in cyc {
            for k in 1..cyc.len() {
                let r = hd.beta_k(b, k);
                if !th_set.contains(&r) {
                    return Err(McSulError::Validation(format!("{} is not in T_H", root_name(&r))));
                }
                if composite.insert(r.clone(), (b.clone(), k)).is_some() {
                    return Err(McSulError::Validation(format!("{} arises twice", root_name(&r))));
                }
                component.insert(r, i);
            }
        }
    }
    if composite.len() != th.len() {
        return Err(McSulError::Validation(format!(
            "{} of {} T_H roots are accounted for",
            composite.len(),
            th.len()
        )));
    }
    hd.component = component;
    hd.composite = composite;
    Ok(hd)
}

#[derive(Debug, Clone)]
pub struct Translation {
    pub element: GroupElement,
    pub lambda: Vec<Q>,
    /// Reduced T-word for `w⁻¹c`, grouped by component.
    pub hword: Vec<Root>,
}

/// Reflection of `beta` acting on V*.
pub fn dual_reflection(datum: &RootDatum, beta: &[i64]) -> Result<GroupElement, McSulError> {
    Ok(GroupElement::from_int(&linalg::transpose(&datum.reflection_of_root(beta)?)))
}

pub fn dual_coxeter(datum: &RootDatum) -> GroupElement {
    GroupElement::from_v_matrix(&datum.c_matrix)
}

fn component_paths(datum: &RootDatum, roots: &[Root], len: usize) -> Vec<Vec<Root>> {
    fn grow(datum: &RootDatum, roots: &[Root], len: usize, cur: &mut Vec<Root>, out: &mut Vec<Vec<Root>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for r in roots {
            if cur.contains(r) {
                continue;
            }
            let ok = cur.iter().enumerate().all(|(p, x)| {
                let orth = datum.k_form(x, r).is_zero();
                if p + 1 == cur.len() {
                    !orth
                } else {
                    orth
                }
            });
            if ok {
                cur.push(r.clone());
                grow(datum, roots, len, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    grow(datum, roots, len, &mut Vec::new(), &mut out);
    out
}

fn parallel(a: &[Q], b: &[Q]) -> bool {
    linalg::rank(&vec![a.to_vec(), b.to_vec()]) == 1
}

/// Translations `w ∈ [1,c]_T`, each with a horizontal reduced word for `w⁻¹c`.
pub fn translations_in_interval(datum: &RootDatum, hd: &HorizontalData) -> Result<Vec<Translation>, McSulError> {
    let delta = datum.delta.clone().ok_or(McSulError::NotAffine)?;
    let per_comp: Vec<Vec<Vec<Root>>> = hd
        .cycles
        .iter()
        .enumerate()
        .map(|(i, cyc)| {
            let roots: Vec<Root> = hd.th_roots.iter().filter(|r| hd.component[*r] == i).cloned().collect();
            component_paths(datum, &roots, cyc.len() - 1)
        })
        .collect();
    let directions: Vec<Vec<Q>> = datum
        .positive_real_roots_bounded(Some(&delta))?
        .iter()
        .map(|b| linalg::apply_q(&datum.k, &to_q(b)))
        .collect();
    let c = dual_coxeter(datum);
    let mut found: BTreeMap<GroupElement, Translation> = BTreeMap::new();
    let mut idx = vec![0usize; per_comp.len()];
    if per_comp.iter().any(Vec::is_empty) {
        return Ok(Vec::new());
    }
    loop {
        let hword: Vec<Root> = idx.iter().enumerate().flat_map(|(i, &j)| per_comp[i][j].clone()).collect();
        let mut v = GroupElement::identity(datum.n());
        for r in &hword {
            v = v.mul(&dual_reflection(datum, r)?);
        }
        let w = c.mul(&v.inverse());
        if let Some(mu) = w.translation_vector(&delta) {
            if mu.iter().any(|x| !x.is_zero()) && directions.iter().any(|d| parallel(&mu, d)) {
                found.entry(w.clone()).or_insert(Translation { element: w, lambda: mu, hword });
            }
        }
        let mut p = 0;
        loop {
            if p == idx.len() {
                return Ok(found.into_values().collect());
            }
            idx[p] += 1;
            if idx[p] < per_comp[p].len() {
                break;
            }
            idx[p] = 0;
            p += 1;
        }
    }
}

/// `(λ_1, …, λ_m, λ_0)`: orthogonal decomposition of a translation vector.
pub fn decompose_vector(datum: &RootDatum, hd: &HorizontalData, lambda: &[Q]) -> Result<(Vec<Vec<Q>>, Vec<Q>), McSulError> {
    let n = datum.n();
    let mut parts = Vec::new();
    let mut rest = lambda.to_vec();
    for cyc in &hd.cycles {
        let basis: Vec<Vec<Q>> = cyc[..cyc.len() - 1].iter().map(|b| to_q(b)).collect();
        if basis.is_empty() {
            parts.push(vec![Q::zero(); n]);
            continue;
        }
        let gram: Vec<Vec<Q>> = basis
            .iter()
            .map(|a| basis.iter().map(|b| linalg::form(&datum.k, a, b)).collect())
            .collect();
        let rhs: Vec<Q> = basis.iter().map(|b| dot(b, lambda)).collect();
        let coeff = linalg::solve(&gram, &rhs)
            .ok_or_else(|| McSulError::Decomposition("singular component Gram matrix".into()))?;
        let mut y = vec![Q::zero(); n];
        for (c, b) in coeff.iter().zip(&basis) {
            for j in 0..n {
                y[j] += c * b[j];
            }
        }
        let li = linalg::apply_q(&datum.k, &y);
        for j in 0..n {
            rest[j] -= li[j];
        }
        parts.push(li);
    }
    Ok((parts, rest))
}

#[derive(Debug, Clone)]
pub struct FactoredTranslation {
    pub component: usize,
    pub mu: Vec<Q>,
    pub element: GroupElement,
    /// `(λ_i, λ_0)`, independent of `q`.
    pub key: (Vec<Q>, Vec<Q>),
    pub source_beta: Option<Root>,
}

pub fn factor_translation(
    datum: &RootDatum,
    hd: &HorizontalData,
    w: &Translation,
    q: &[Q],
) -> Result<Vec<FactoredTranslation>, McSulError> {
    check_q(q, hd.m)?;
    let delta = datum.delta.clone().ok_or(McSulError::NotAffine)?;
    let (parts, l0) = decompose_vector(datum, hd, &w.lambda)?;
    let out: Vec<FactoredTranslation> = parts
        .into_iter()
        .enumerate()
        .map(|(i, li)| {
            let mu: Vec<Q> = li.iter().zip(&l0).map(|(a, b)| a + q[i] * b).collect();
            FactoredTranslation {
                component: i,
                element: GroupElement::translation(&mu, &delta),
                mu,
                key: (li, l0.clone()),
                source_beta: None,
            }
        })
        .collect();
    let product = out.iter().fold(GroupElement::identity(datum.n()), |acc, f| acc.mul(&f.element));
    if product != w.element {
        return Err(McSulError::Decomposition("factors do not multiply back to the translation".into()));
    }
    Ok(out)
}

fn check_q(q: &[Q], m: usize) -> Result<(), McSulError> {
    let sum = q.iter().fold(Q::zero(), |s, x| s + x);
    if q.len() != m || q.iter().any(|x| !x.is_positive()) || sum != Q::from_integer(1) {
        return Err(McSulError::BadQ { expected: m });
    }
    Ok(())
}

pub fn default_q(m: usize) -> Vec<Q> {
    vec![Q::new(1, m as i64); m]
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum McSulLetter {
    Refl(Root),
    Fact(usize),
}

/// `[1, c_i]` in the factorable group, with weights scaled by `m`.
#[derive(Debug, Clone)]
pub struct ComponentInterval {
    pub component: usize,
    pub c_i: GroupElement,
    pub letters: Vec<(McSulLetter, GroupElement, u32)>,
    pub total: u32,
    pub rank: HashMap<GroupElement, u32>,
    pub elements: Vec<GroupElement>,
}

fn weighted_ball(start: &GroupElement, steps: &[(GroupElement, u32)], limit: u32, cap: usize) -> Result<HashMap<GroupElement, u32>, McSulError> {
    let mut dist: HashMap<GroupElement, u32> = HashMap::new();
    let mut heap = BinaryHeap::new();
    let mut pool: Vec<GroupElement> = vec![start.clone()];
    dist.insert(start.clone(), 0);
    heap.push(Reverse((0u32, 0usize)));
    while let Some(Reverse((d, i))) = heap.pop() {
        let x = pool[i].clone();
        if dist[&x] < d {
            continue;
        }
        for (s, w) in steps {
            let nd = d + w;
            if nd > limit {
                continue;
            }
            let y = x.mul(s);
            if dist.get(&y).map_or(true, |&old| nd < old) {
                if dist.len() >= cap {
                    return Err(McSulError::TooLarge(cap));
                }
                dist.insert(y.clone(), nd);
                pool.push(y);
                heap.push(Reverse((nd, pool.len() - 1)));
            }
        }
    }
    Ok(dist)
}

impl ComponentInterval {
    pub fn build(
        component: usize,
        c_i: GroupElement,
        letters: Vec<(McSulLetter, GroupElement, u32)>,
        total: u32,
        cap: usize,
    ) -> Result<Self, McSulError> {
        let n = c_i.n();
        let fwd_steps: Vec<(GroupElement, u32)> = letters.iter().map(|(_, g, w)| (g.clone(), *w)).collect();
        let bwd_steps: Vec<(GroupElement, u32)> = letters.iter().map(|(_, g, w)| (g.inverse(), *w)).collect();
        let fwd = weighted_ball(&GroupElement::identity(n), &fwd_steps, total, cap)?;
        if fwd.get(&c_i) != Some(&total) {
            return Err(McSulError::Validation(format!(
                "c_{} has weighted length {:?}, expected {}",
                component + 1,
                fwd.get(&c_i),
                total
            )));
        }
        let bwd = weighted_ball(&c_i, &bwd_steps, total, cap)?;
        let mut rank = HashMap::new();
        for (x, &d) in &fwd {
            if bwd.get(x) == Some(&(total - d)) {
                rank.insert(x.clone(), d);
            }
        }
        let mut elements: Vec<GroupElement> = rank.keys().cloned().collect();
        elements.sort_by(|a, b| rank[a].cmp(&rank[b]).then_with(|| a.cmp(b)));
        Ok(ComponentInterval { component, c_i, letters, total, rank, elements })
    }

    pub fn contains(&self, x: &GroupElement) -> bool {
        self.rank.contains_key(x)
    }

    /// Whether the two-letter word `ab` is a prefix of a reduced word for `c_i`.
    pub fn prefix_pair(&self, a: &GroupElement, wa: u32, b: &GroupElement, wb: u32) -> bool {
        let ab = a.mul(b);
        !ab.is_identity() && self.rank.get(&ab) == Some(&(wa + wb))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct McSulSummary {
    pub datum: String,
    pub n: usize,
    pub m: usize,
    pub delta: Vec<i64>,
    pub xi: Vec<String>,
    pub cycles: Vec<Vec<String>>,
    pub th_size: usize,
    pub f_size: usize,
    pub translations: usize,
    pub interval_sizes: Vec<usize>,
    pub relation_size: usize,
}

/// All factorable-side structure for one affine Coxeter element and choice of `q`.
#[derive(Debug, Clone)]
pub struct McSul {
    pub datum: RootDatum,
    pub q: Vec<Q>,
    pub hd: HorizontalData,
    pub translations: Vec<Translation>,
    pub factors: Vec<FactoredTranslation>,
    /// Factor indices of each translation, by component.
    pub translation_factors: Vec<Vec<usize>>,
    pub c_parts: Vec<GroupElement>,
    pub intervals: Vec<ComponentInterval>,
    /// `β ↦ f_β` as an index into `factors`.
    pub f_of_beta: BTreeMap<Root, usize>,
    pub consistency: Vec<Check>,
}

impl McSul {
    pub fn new(datum: &RootDatum, q: Option<Vec<Q>>) -> Result<Self, McSulError> {
        Self::with_bound(datum, q, DEFAULT_INTERVAL_BOUND)
    }

    pub fn with_bound(datum: &RootDatum, q: Option<Vec<Q>>, cap: usize) -> Result<Self, McSulError> {
        let hd = compute_xi(datum)?;
        if hd.m < 2 {
            return Err(McSulError::TooFewComponents(hd.m));
        }
        let q = q.unwrap_or_else(|| default_q(hd.m));
        check_q(&q, hd.m)?;
        let translations = translations_in_interval(datum, &hd)?;
        if translations.is_empty() {
            return Err(McSulError::Validation("no translations found in [1,c]_T".into()));
        }
        let mut factors: Vec<FactoredTranslation> = Vec::new();
        let mut by_element: HashMap<GroupElement, usize> = HashMap::new();
        let mut raw: Vec<Vec<GroupElement>> = Vec::new();
        for t in &translations {
            let fs = factor_translation(datum, &hd, t, &q)?;
            raw.push(fs.iter().map(|f| f.element.clone()).collect());
            for f in fs {
                if !by_element.contains_key(&f.element) {
                    by_element.insert(f.element.clone(), factors.len());
                    factors.push(f);
                }
            }
        }
        factors.sort_by(|a, b| a.component.cmp(&b.component).then_with(|| a.element.cmp(&b.element)));
        let index: HashMap<GroupElement, usize> =
            factors.iter().enumerate().map(|(i, f)| (f.element.clone(), i)).collect();
        let translation_factors: Vec<Vec<usize>> =
            raw.iter().map(|fs| fs.iter().map(|f| index[f]).collect()).collect();

        let mut consistency = Vec::new();
        let parts_for = |ti: usize| -> Result<Vec<GroupElement>, McSulError> {
            let t = &translations[ti];
            (0..hd.m)
                .map(|i| {
                    let mut g = factors[translation_factors[ti][i]].element.clone();
                    for r in t.hword.iter().filter(|r| hd.component[*r] == i) {
                        g = g.mul(&dual_reflection(datum, r)?);
                    }
                    Ok(g)
                })
                .collect()
        };
        let c_parts = parts_for(0)?;
        let mut independent = Ok(());
        for ti in 1..translations.len() {
            if parts_for(ti)? != c_parts {
                independent = Err(format!("translation {ti} yields different component elements"));
                break;
            }
        }
        consistency.push(Check::from_result("c_i_independent_of_translation", independent));
        let product = c_parts.iter().fold(GroupElement::identity(datum.n()), |acc, g| acc.mul(g));
        consistency.push(if product == dual_coxeter(datum) {
            Check::pass("c_is_product_of_c_i")
        } else {
            Check::fail("c_is_product_of_c_i", "product of the c_i differs from c")
        });

        let m32 = hd.m as u32;
        let intervals: Vec<ComponentInterval> = (0..hd.m)
            .into_par_iter()
            .map(|i| {
                let mut letters = Vec::new();
                for r in hd.th_roots.iter().filter(|r| hd.component[*r] == i) {
                    letters.push((McSulLetter::Refl(r.clone()), dual_reflection(datum, r)?, m32));
                }
                for (j, f) in factors.iter().enumerate().filter(|(_, f)| f.component == i) {
                    letters.push((McSulLetter::Fact(j), f.element.clone(), 2));
                }
                let total = m32 * (hd.cycles[i].len() as u32 - 1) + 2;
                ComponentInterval::build(i, c_parts[i].clone(), letters, total, cap)
            })
            .collect::<Result<_, _>>()?;

        let mut me = McSul {
            datum: datum.clone(),
            q,
            hd,
            translations,
            factors,
            translation_factors,
            c_parts,
            intervals,
            f_of_beta: BTreeMap::new(),
            consistency,
        };
        me.assign_bijection()?;
        Ok(me)
    }

    fn letter_element(&self, l: &McSulLetter) -> (GroupElement, u32) {
        match l {
            McSulLetter::Refl(r) => (dual_reflection(&self.datum, r).expect("real root"), self.hd.m as u32),
            McSulLetter::Fact(j) => (self.factors[*j].element.clone(), 2),
        }
    }

    pub fn letter_component(&self, l: &McSulLetter) -> usize {
        match l {
            McSulLetter::Refl(r) => self.hd.component[r],
            McSulLetter::Fact(j) => self.factors[*j].component,
        }
    }

    /// Compatibility of two letters of `T_H ∪ F`, decided inside the factorable intervals.
    pub fn compatible(&self, a: &McSulLetter, b: &McSulLetter) -> bool {
        let (ca, cb) = (self.letter_component(a), self.letter_component(b));
        if ca != cb {
            return true;
        }
        let (ga, wa) = self.letter_element(a);
        let (gb, wb) = self.letter_element(b);
        self.intervals[ca].prefix_pair(&ga, wa, &gb, wb)
    }

    fn assign_bijection(&mut self) -> Result<(), McSulError> {
        let mut used: HashSet<usize> = HashSet::new();
        for beta in self.hd.xi.clone() {
            let i = self.hd.component[&beta];
            let t = McSulLetter::Refl(beta.clone());
            let cands: Vec<usize> = (0..self.factors.len())
                .filter(|&j| self.factors[j].component == i)
                .filter(|&j| {
                    let f = McSulLetter::Fact(j);
                    self.compatible(&f, &t) && !self.compatible(&t, &f)
                })
                .collect();
            if cands.len() != 1 {
                return Err(McSulError::Bijection(format!(
                    "{} has {} candidate factors",
                    root_name(&beta),
                    cands.len()
                )));
            }
            if !used.insert(cands[0]) {
                return Err(McSulError::Bijection(format!("factor {} chosen twice", cands[0])));
            }
            self.factors[cands[0]].source_beta = Some(beta.clone());
            self.f_of_beta.insert(beta, cands[0]);
        }
        if used.len() != self.factors.len() {
            return Err(McSulError::Bijection(format!(
                "{} factors but {} simple horizontal roots",
                self.factors.len(),
                used.len()
            )));
        }
        Ok(())
    }

    pub fn letter(&self, l: &McSulLetter) -> Letter {
        match l {
            McSulLetter::Refl(r) => Letter::new(&root_name(r)),
            McSulLetter::Fact(j) => {
                let b = self.factors[*j].source_beta.as_ref().expect("bijection assigned");
                Letter::new(&format!("f{}", &root_name(b)[1..]))
            }
        }
    }

    pub fn alphabet(&self) -> Vec<McSulLetter> {
        let mut out: Vec<McSulLetter> = self.hd.th_roots.iter().map(|r| McSulLetter::Refl(r.clone())).collect();
        out.extend((0..self.factors.len()).map(McSulLetter::Fact));
        out
    }

    /// `t_{β,k}`.
    pub fn t_beta_k(&self, beta: &[i64], k: usize) -> McSulLetter {
        McSulLetter::Refl(self.hd.beta_k(beta, k))
    }

    pub fn f_beta(&self, beta: &[i64]) -> McSulLetter {
        McSulLetter::Fact(self.f_of_beta[beta])
    }

    pub fn interval_poset(&self, i: usize) -> Result<LabeledPoset, McSulError> {
        let iv = &self.intervals[i];
        let pos: HashMap<&GroupElement, usize> = iv.elements.iter().enumerate().map(|(p, x)| (x, p)).collect();
        let mut names: Vec<Option<String>> = vec![None; iv.elements.len()];
        names[0] = Some("1".to_string());
        let mut covers = Vec::new();
        for (p, x) in iv.elements.iter().enumerate() {
            for (l, g, w) in &iv.letters {
                let y = x.mul(g);
                if iv.rank.get(&y) == Some(&(iv.rank[x] + w)) {
                    let q = pos[&y];
                    let label = self.letter(l);
                    if names[q].is_none() {
                        let base = names[p].clone().unwrap_or_default();
                        names[q] = Some(if p == 0 { label.to_string() } else { format!("{base} {label}") });
                    }
                    covers.push((p, q, label));
                }
            }
        }
        let names = names.into_iter().map(|n| n.unwrap_or_default()).collect();
        Ok(LabeledPoset::new(names, covers)?)
    }

    pub fn component_chain_system(&self, i: usize) -> Result<ChainSystem, McSulError> {
        Ok(ChainSystem::new(self.interval_poset(i)?.maximal_chains()))
    }

    /// `C_c^F` as the shuffle of the component chain systems.
    pub fn build_ccf(&self) -> Result<ChainSystem, McSulError> {
        let mut acc = self.component_chain_system(0)?;
        for i in 1..self.hd.m {
            acc = acc.shuffle(&self.component_chain_system(i)?)?;
        }
        Ok(acc)
    }

    /// `P(C_c^F)` as the labeled product of the component intervals.
    pub fn ccf_poset(&self) -> Result<LabeledPoset, McSulError> {
        let mut acc = self.interval_poset(0)?;
        for i in 1..self.hd.m {
            acc = acc.labeled_product(&self.interval_poset(i)?)?;
        }
        Ok(acc)
    }

    /// Weights 1 for reflections and `2/m` for factored translations.
    pub fn weights(&self) -> HashMap<Letter, Q> {
        self.alphabet()
            .iter()
            .map(|l| {
                let w = match l {
                    McSulLetter::Refl(_) => Q::from_integer(1),
                    McSulLetter::Fact(_) => Q::new(2, self.hd.m as i64),
                };
                (self.letter(l), w)
            })
            .collect()
    }

    /// The relation on `T_H ∪ F` read off the closed-form families, with
    /// reflection pairs decided by the intervals.
    pub fn mcsul_relation(&self) -> BinaryRelation {
        let mut pairs = Vec::new();
        let alpha = self.alphabet();
        for a in &alpha {
            for b in &alpha {
                if self.closed_form(a, b) {
                    pairs.push((self.letter(a), self.letter(b)));
                }
            }
        }
        BinaryRelation::new(pairs)
    }

    fn closed_form(&self, a: &McSulLetter, b: &McSulLetter) -> bool {
        let hd = &self.hd;
        let same = self.letter_component(a) == self.letter_component(b);
        match (a, b) {
            (McSulLetter::Fact(_), McSulLetter::Fact(_)) => !same,
            (McSulLetter::Fact(j), McSulLetter::Refl(r)) => {
                if !same {
                    return true;
                }
                let gamma = self.factors[*j].source_beta.as_ref().expect("assigned");
                let (beta, k) = &hd.composite[r];
                !(1..=*k).any(|i| &hd.c_power(beta, i) == gamma)
            }
            (McSulLetter::Refl(r), McSulLetter::Fact(j)) => {
                if !same {
                    return true;
                }
                let gamma = self.factors[*j].source_beta.as_ref().expect("assigned");
                let (beta, k) = &hd.composite[r];
                !(0..*k).any(|i| &hd.c_power(beta, i) == gamma)
            }
            (McSulLetter::Refl(_), McSulLetter::Refl(_)) => a != b && (!same || self.compatible(a, b)),
        }
    }

    /// Sweeps all same-component `(β, γ, k)` and compares interval verdicts with the closed form.
    pub fn verify_good_bij(&self) -> Vec<Check> {
        let hd = &self.hd;
        let mut right = Ok(());
        for beta in &hd.xi {
            let f = self.f_beta(beta);
            let (gf, _) = self.letter_element(&f);
            let (gt, _) = self.letter_element(&McSulLetter::Refl(beta.clone()));
            if self.letter_component(&f) != hd.component[beta] || gf.mul(&gt) == gt.mul(&gf) {
                right = Err(format!("f for {} is misplaced or commutes with its reflection", root_name(beta)));
                break;
            }
        }
        let mut ft = Ok(());
        let mut tf = Ok(());
        let mut cases = 0usize;
        for cyc in &hd.cycles {
            for beta in cyc {
                for k in 1..cyc.len() {
                    let t = self.t_beta_k(beta, k);
                    for gamma in cyc {
                        cases += 1;
                        let f = self.f_beta(gamma);
                        let want_ft = !(1..=k).any(|i| &hd.c_power(beta, i) == gamma);
                        let want_tf = !(0..k).any(|i| &hd.c_power(beta, i) == gamma);
                        if ft.is_ok() && self.compatible(&f, &t) != want_ft {
                            ft = Err(format!("beta {}, gamma {}, k {k}", root_name(beta), root_name(gamma)));
                        }
                        if tf.is_ok() && self.compatible(&t, &f) != want_tf {
                            tf = Err(format!("beta {}, gamma {}, k {k}", root_name(beta), root_name(gamma)));
                        }
                    }
                }
            }
        }
        let mut out = vec![
            Check::from_result("f_beta_right_component", right),
            Check::from_result("f_gamma_t_beta_k", ft),
            Check::from_result("t_beta_k_f_gamma", tf),
        ];
        if cases == 0 {
            out.push(Check::unknown("good_bij_cases", "no same-component cases"));
        }
        out
    }

    /// Structural checks on the words of `C_c^F`.
    pub fn verify_ccf_words(&self, ccf: &ChainSystem) -> Vec<Check> {
        let n = self.datum.n();
        let m = self.hd.m;
        let by_letter: HashMap<Letter, McSulLetter> = self.alphabet().into_iter().map(|l| (self.letter(&l), l)).collect();
        let factor_sets: HashSet<BTreeSet<usize>> =
            self.translation_factors.iter().map(|fs| fs.iter().copied().collect()).collect();
        let weights = self.weights();
        let (mut refl, mut fact, mut single, mut weight) = (Ok(()), Ok(()), Ok(()), Ok(()));
        for w in ccf.words() {
            let letters: Vec<&McSulLetter> = w.iter().map(|l| &by_letter[l]).collect();
            let r = letters.iter().filter(|l| matches!(l, McSulLetter::Refl(_))).count();
            let fs: BTreeSet<usize> = letters
                .iter()
                .filter_map(|l| match l {
                    McSulLetter::Fact(j) => Some(*j),
                    _ => None,
                })
                .collect();
            let render = || crate::chain_system::word_string(w);
            if refl.is_ok() && r + 2 != n {
                refl = Err(format!("[{}] has {r} reflections", render()));
            }
            if fact.is_ok() && w.len() - r != m {
                fact = Err(format!("[{}] has {} factored translations", render(), w.len() - r));
            }
            if single.is_ok() && !factor_sets.contains(&fs) {
                single = Err(format!("[{}] mixes factors of different translations", render()));
            }
            if weight.is_ok() && ccf.weight(w, &weights) != Q::from_integer(n as i64) {
                weight = Err(format!("[{}] has weighted length {}", render(), ccf.weight(w, &weights)));
            }
        }
        vec![
            Check::from_result("words_have_n_minus_2_reflections", refl),
            Check::from_result("words_have_m_factors", fact),
            Check::from_result("factors_from_one_translation", single),
            Check::from_result("weighted_length_n", weight),
        ]
    }

    /// Closed-form relation against the two-letter prefixes of `C_c^F`.
    pub fn verify_relation(&self, ccf: &ChainSystem) -> Check {
        let brute = ccf.two_letter_prefixes();
        let closed = self.mcsul_relation();
        if brute == closed {
            return Check::pass("relation_equals_ccf_prefixes");
        }
        let extra = closed.pairs.difference(&brute.pairs).next();
        let missing = brute.pairs.difference(&closed.pairs).next();
        Check::fail(
            "relation_equals_ccf_prefixes",
            format!("closed form only: {extra:?}; prefixes only: {missing:?}"),
        )
    }

    /// Letter correspondence with another choice of `q` for the same datum.
    pub fn natural_letter_map(&self, other: &McSul) -> Option<HashMap<Letter, Letter>> {
        let mut map = HashMap::new();
        for r in &self.hd.th_roots {
            let l = Letter::new(&root_name(r));
            map.insert(l.clone(), l);
        }
        for (j, f) in self.factors.iter().enumerate() {
            let k = other.factors.iter().position(|g| g.component == f.component && g.key == f.key)?;
            map.insert(self.letter(&McSulLetter::Fact(j)), other.letter(&McSulLetter::Fact(k)));
        }
        Some(map)
    }

    /// Bounded search for `tt′` as a prefix of a reduced T-word for `c`.
    pub fn reflection_pair_verdict(&self, t: &[i64], u: &[i64], bound: usize) -> Verdict {
        if t == u {
            return Verdict::No;
        }
        let (tl, ul) = (McSulLetter::Refl(t.to_vec()), McSulLetter::Refl(u.to_vec()));
        if self.hd.component.contains_key(t) && self.hd.component.contains_key(u) {
            return if self.compatible(&tl, &ul) { Verdict::Yes } else { Verdict::No };
        }
        if hurwitz_pair_search(&self.datum, t, u, bound) {
            Verdict::Yes
        } else {
            Verdict::Unknown
        }
    }

    /// Every two-reflection prefix of `C_c^F` found among reduced T-words for `c`.
    pub fn verify_ttprime(&self, ccf: &ChainSystem, bound: usize) -> Check {
        let by_letter: HashMap<Letter, McSulLetter> = self.alphabet().into_iter().map(|l| (self.letter(&l), l)).collect();
        let mut missing = Vec::new();
        for (a, b) in &ccf.two_letter_prefixes().pairs {
            if let (McSulLetter::Refl(t), McSulLetter::Refl(u)) = (&by_letter[a], &by_letter[b]) {
                if !hurwitz_pair_search(&self.datum, t, u, bound) {
                    missing.push(format!("{a}{b}"));
                }
            }
        }
        if missing.is_empty() {
            Check::pass("two_reflection_prefixes_in_cc")
        } else {
            Check::unknown("two_reflection_prefixes_in_cc", format!("not found within bound: {}", missing.join(", ")))
        }
    }

    pub fn summary(&self) -> McSulSummary {
        McSulSummary {
            datum: self.datum.name.clone(),
            n: self.datum.n(),
            m: self.hd.m,
            delta: self.datum.delta.clone().unwrap_or_default(),
            xi: self.hd.xi.iter().map(|r| root_name(r)).collect(),
            cycles: self.hd.cycles.iter().map(|c| c.iter().map(|r| root_name(r)).collect()).collect(),
            th_size: self.hd.th_roots.len(),
            f_size: self.factors.len(),
            translations: self.translations.len(),
            interval_sizes: self.intervals.iter().map(|i| i.elements.len()).collect(),
            relation_size: self.mcsul_relation().len(),
        }
    }

    pub fn letter_word(&self, w: &[McSulLetter]) -> Word {
        w.iter().map(|l| self.letter(l)).collect()
    }
}

/// Searches the Hurwitz orbit of the defining word for a word with `t` before `u`.
pub fn hurwitz_pair_search(datum: &RootDatum, t: &[i64], u: &[i64], bound: usize) -> bool {
    let n = datum.n();
    let start: Vec<Root> = datum
        .cox_word
        .iter()
        .map(|&i| {
            let mut e = vec![0; n];
            e[i] = 1;
            e
        })
        .collect();
    let hit = |w: &[Root]| {
        w.iter()
            .position(|x| x == t)
            .is_some_and(|p| w[p + 1..].iter().any(|x| x == u))
    };
    let mut seen: HashSet<Vec<Root>> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(start.clone());
    queue.push_back(start);
    while let Some(w) = queue.pop_front() {
        if hit(&w) {
            return true;
        }
        for i in 0..w.len() - 1 {
            let (a, b) = (&w[i], &w[i + 1]);
            let mut fwd = w.clone();
            fwd[i] = abs_root(&datum.reflect(a, b));
            fwd[i + 1] = a.clone();
            let mut back = w.clone();
            back[i] = b.clone();
            back[i + 1] = abs_root(&datum.reflect(b, a));
            for next in [fwd, back] {
                if seen.len() < bound && seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
    }
    false
}

/// `β, c(β), c²(β), …` on V.
pub fn c_orbit(datum: &RootDatum, beta: &[i64], steps: usize) -> Vec<Root> {
    let mut out = vec![beta.to_vec()];
    for _ in 1..steps {
        let next = datum.apply_c(out.last().expect("nonempty"));
        out.push(next);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::all_pass;
    use crate::root_datum::parse_named;

    fn d(s: &str) -> RootDatum {
        parse_named(s).unwrap()
    }

    #[test]
    fn horizontal_counts() {
        let a = compute_xi(&d("A~3:outer=1,3")).unwrap();
        assert_eq!(a.m, 2);
        assert_eq!(a.ranks(), vec![2, 2]);
        assert_eq!(a.th_roots.len(), 4);
        let dd = compute_xi(&d("D~4")).unwrap();
        assert_eq!(dd.m, 3);
        assert_eq!(dd.ranks(), vec![2, 2, 2]);
        assert_eq!(dd.th_roots.len(), 6);
        for cyc in &dd.cycles {
            assert_eq!(c_orbit(&d("D~4"), &cyc[0], 3)[2], cyc[0]);
        }
        assert!(compute_th(&d("A3")).is_err());
    }

    #[test]
    fn a3_structure() {
        let ms = McSul::new(&d("A~3:outer=1,3"), None).unwrap();
        assert_eq!(ms.factors.len(), 4);
        assert!(all_pass(&ms.consistency), "{:?}", ms.consistency);
        for t in &ms.translations {
            let mut g = t.element.clone();
            for r in &t.hword {
                g = g.mul(&dual_reflection(&ms.datum, r).unwrap());
            }
            assert_eq!(g, dual_coxeter(&ms.datum));
        }
        for i in 0..2 {
            let p = ms.interval_poset(i).unwrap();
            assert_eq!(p.len(), 6);
            assert_eq!(p.maximal_chains().len(), 4);
        }
        let ccf = ms.build_ccf().unwrap();
        assert_eq!(ccf.len(), 96);
        assert!(all_pass(&ms.verify_ccf_words(&ccf)));
        assert!(ms.verify_relation(&ccf).passed());
        assert!(all_pass(&ms.verify_good_bij()));
    }

    #[test]
    fn factors_commute_and_multiply() {
        let ms = McSul::new(&d("A~3:outer=1,2"), None).unwrap();
        for fs in &ms.translation_factors {
            let a = &ms.factors[fs[0]].element;
            let b = &ms.factors[fs[1]].element;
            assert_eq!(a.mul(b), b.mul(a));
        }
    }

    #[test]
    fn bad_q_rejected() {
        let r = McSul::new(&d("A~3:outer=1,3"), Some(vec![Q::new(1, 2), Q::new(1, 3)]));
        assert!(matches!(r, Err(McSulError::BadQ { .. })));
        assert!(matches!(McSul::new(&d("A~3:outer=1"), None), Err(McSulError::TooFewComponents(_))));
    }

    #[test]
    fn pair_verdicts() {
        let ms = McSul::new(&d("A~3:outer=1,3"), None).unwrap();
        let b = ms.hd.xi[0].clone();
        assert_eq!(ms.reflection_pair_verdict(&b, &b, 10), Verdict::No);
    }
}
