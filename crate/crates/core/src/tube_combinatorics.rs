//! Tube letters, Hom/Ext vanishing in tubes, regular para-exceptional sequences and the map `ω`.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::affine_mcsul::{compute_xi, HorizontalData, McSul, McSulError, McSulLetter};
use crate::chain_system::{word_string, BinaryRelation, ChainError, ChainSystem, Letter, Word};
use crate::finite_nc::{nc_lattice, NcError};
use crate::labeled_poset::{LabeledPoset, PosetError};
use crate::linalg::{self, Q};
use crate::report::Check;
use crate::root_datum::{parse_named, root_name, Root, RootDatum, RootError};

pub const MAX_TUBE_RANK: usize = 6;
pub const DEFAULT_RPE_BOUND: u128 = 5_000_000;

#[derive(Debug, Error)]
pub enum TubeError {
    #[error("tube rank {rank} outside 1..={cap}")]
    BadRank { rank: usize, cap: usize },
    #[error("no tubes")]
    NoTubes,
    #[error("expected {estimate} maximal sequences, above the bound {bound}")]
    TooLarge { estimate: u128, bound: u128 },
    #[error(transparent)]
    McSul(#[from] McSulError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Nc(#[from] NcError),
    #[error(transparent)]
    Root(#[from] RootError),
}

/// `R_{β,k}` in tube `tube` of rank `rank`; `beta` is the position of the quasi-top in its `c`-cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TubeLetter {
    pub tube: usize,
    pub rank: usize,
    pub beta: usize,
    pub k: usize,
}

impl TubeLetter {
    pub fn new(tube: usize, rank: usize, beta: usize, k: usize) -> Self {
        TubeLetter { tube, rank, beta: beta % rank, k }
    }

    pub fn is_brick(&self) -> bool {
        self.k <= self.rank
    }

    pub fn is_exceptional(&self) -> bool {
        self.k < self.rank
    }

    pub fn is_f(&self) -> bool {
        self.k == self.rank
    }

    /// `τ R_{β,k} = R_{c(β),k}`.
    pub fn tau(&self) -> Self {
        TubeLetter::new(self.tube, self.rank, self.beta + 1, self.k)
    }

    pub fn name(&self) -> Letter {
        if self.is_f() {
            Letter::new(&format!("F{}:{}", self.tube, self.beta))
        } else {
            Letter::new(&format!("R{}:{},{}", self.tube, self.beta, self.k))
        }
    }
}

/// Nonzero `Hom(X, Y)`: some quotient of `X` is a submodule of `Y`.
pub fn hom_nonzero(x: &TubeLetter, y: &TubeLetter) -> bool {
    if x.tube != y.tube || x.rank != y.rank {
        return false;
    }
    let r = y.rank;
    (1..=x.k.min(y.k)).any(|j| x.beta % r == (y.beta + y.k - j) % r)
}

/// Nonzero `Ext¹(X, Y)`, read as `Hom(Y, τX)`.
pub fn ext_nonzero(x: &TubeLetter, y: &TubeLetter) -> bool {
    hom_nonzero(y, &x.tau())
}

/// `(X, Y)` is a two-term brick sequence.
pub fn rpe_compatible(x: &TubeLetter, y: &TubeLetter) -> bool {
    !hom_nonzero(y, x) && !ext_nonzero(y, x)
}

/// Dimensions of `Hom` and `Ext¹` between uniserial nilpotent representations of the
/// cyclic quiver `v → v+1` on `r` vertices; `(b, k)` has top at vertex `b` and length `k`.
pub fn hom_ext_dims(r: usize, (b, k): (usize, usize), (c, l): (usize, usize)) -> (usize, usize) {
    let vm = |i: usize| (b + i) % r;
    let vn = |j: usize| (c + j) % r;
    let mut var: HashMap<(usize, usize), usize> = HashMap::new();
    for i in 0..k {
        for j in 0..l {
            if vm(i) == vn(j) {
                let id = var.len();
                var.insert((i, j), id);
            }
        }
    }
    let mut rows: Vec<Vec<Q>> = Vec::new();
    for i in 0..k {
        for j in 0..l {
            if vn(j) != (vm(i) + 1) % r {
                continue;
            }
            let mut row = vec![Q::from_integer(0); var.len()];
            if j >= 1 {
                if let Some(&v) = var.get(&(i, j - 1)) {
                    row[v] += Q::from_integer(1);
                }
            }
            if i + 1 < k {
                if let Some(&v) = var.get(&(i + 1, j)) {
                    row[v] -= Q::from_integer(1);
                }
            }
            rows.push(row);
        }
    }
    let rk = if var.is_empty() { 0 } else { linalg::rank(&rows) };
    (var.len() - rk, rows.len() - rk)
}

/// A family of tubes given by their ranks, optionally embedded as the `c`-cycles of `Ξ^c`.
#[derive(Debug, Clone)]
pub struct Tubes {
    pub ranks: Vec<usize>,
    pub cycles: Option<Vec<Vec<Root>>>,
    pub delta: Option<Root>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RpeSummary {
    pub ranks: Vec<usize>,
    pub alphabet: usize,
    pub relation: usize,
    pub words: usize,
    pub word_length: usize,
}

impl Tubes {
    pub fn from_ranks(ranks: &[usize]) -> Result<Self, TubeError> {
        if ranks.is_empty() {
            return Err(TubeError::NoTubes);
        }
        if let Some(&r) = ranks.iter().find(|&&r| r == 0 || r > MAX_TUBE_RANK) {
            return Err(TubeError::BadRank { rank: r, cap: MAX_TUBE_RANK });
        }
        Ok(Tubes { ranks: ranks.to_vec(), cycles: None, delta: None })
    }

    pub fn single(r: usize) -> Result<Self, TubeError> {
        Self::from_ranks(&[r])
    }

    pub fn from_horizontal(hd: &HorizontalData, datum: &RootDatum) -> Result<Self, TubeError> {
        let mut t = Self::from_ranks(&hd.ranks())?;
        t.cycles = Some(hd.cycles.clone());
        t.delta = datum.delta.clone();
        Ok(t)
    }

    pub fn from_datum(datum: &RootDatum) -> Result<Self, TubeError> {
        Self::from_horizontal(&compute_xi(datum)?, datum)
    }

    pub fn tube_letters(&self, tube: usize) -> Vec<TubeLetter> {
        let r = self.ranks[tube];
        let mut out = Vec::new();
        for b in 0..r {
            for k in 1..=r {
                out.push(TubeLetter::new(tube, r, b, k));
            }
        }
        out
    }

    pub fn letters(&self) -> Vec<TubeLetter> {
        (0..self.ranks.len()).flat_map(|t| self.tube_letters(t)).collect()
    }

    /// The root of the quasi-top of `x` when the tubes are embedded.
    pub fn beta_root(&self, x: &TubeLetter) -> Option<Root> {
        self.cycles.as_ref().map(|c| c[x.tube][x.beta].clone())
    }

    /// `β_(k)` for exceptional letters and `δ` for F-letters.
    pub fn dim_vector(&self, x: &TubeLetter) -> Option<Root> {
        let cyc = &self.cycles.as_ref()?[x.tube];
        if x.is_f() {
            return self.delta.clone();
        }
        let n = cyc[0].len();
        Some((0..x.k).fold(vec![0; n], |acc, j| {
            acc.iter().zip(&cyc[(x.beta + j) % x.rank]).map(|(a, b)| a + b).collect()
        }))
    }

    fn relation_on(&self, letters: &[TubeLetter]) -> BinaryRelation {
        let mut pairs = Vec::new();
        for x in letters {
            for y in letters {
                if x != y && rpe_compatible(x, y) {
                    pairs.push((x.name(), y.name()));
                }
            }
        }
        BinaryRelation::new(pairs)
    }

    /// `B_rpe`.
    pub fn relation(&self) -> BinaryRelation {
        self.relation_on(&self.letters())
    }

    /// Expected number of maximal sequences: a multinomial times `∏ r^r`.
    pub fn expected_words(&self) -> u128 {
        let mut total: u128 = 1;
        let mut placed: u128 = 0;
        for &r in &self.ranks {
            for i in 1..=r as u128 {
                placed += 1;
                total = total * placed / i;
            }
            total *= (r as u128).pow(r as u32);
        }
        total
    }

    pub fn tube_chain_system(&self, tube: usize) -> Result<ChainSystem, TubeError> {
        let letters = self.tube_letters(tube);
        let alpha: BTreeSet<Letter> = letters.iter().map(TubeLetter::name).collect();
        Ok(ChainSystem::maximal_b_sequences(&self.relation_on(&letters), &alpha)?)
    }

    /// `C_rpe`: maximal sequences of `B_rpe`.
    pub fn chain_system(&self) -> Result<ChainSystem, TubeError> {
        self.chain_system_bounded(DEFAULT_RPE_BOUND)
    }

    pub fn chain_system_bounded(&self, bound: u128) -> Result<ChainSystem, TubeError> {
        let estimate = self.expected_words();
        if estimate > bound {
            return Err(TubeError::TooLarge { estimate, bound });
        }
        let alpha: BTreeSet<Letter> = self.letters().iter().map(TubeLetter::name).collect();
        Ok(ChainSystem::maximal_b_sequences(&self.relation(), &alpha)?)
    }

    pub fn letter_index(&self) -> HashMap<Letter, TubeLetter> {
        self.letters().into_iter().map(|x| (x.name(), x)).collect()
    }

    /// Structural checks on `C_rpe`.
    pub fn verify(&self, c: &ChainSystem) -> Result<Vec<Check>, TubeError> {
        let index = self.letter_index();
        let mut checks = Vec::new();
        let expected_alpha: usize = self.ranks.iter().map(|r| r * r).sum();
        checks.push(Check::from_result(
            "alphabet_size",
            if index.len() == expected_alpha && c.alphabet().len() == expected_alpha {
                Ok(())
            } else {
                Err(format!("{} letters, expected {expected_alpha}", c.alphabet().len()))
            },
        ));
        let ax = c.check_axioms();
        checks.push(Check::from_result(
            "chain_system",
            match ax.checks.iter().find(|k| !k.passed()) {
                None => Ok(()),
                Some(k) => Err(format!("{}: {}", k.name, k.witness.clone().unwrap_or_default())),
            },
        ));
        checks.push(Check::from_result(
            "prefix_classes_well_defined",
            c.prefix_classes().map(|_| ()).map_err(|e| e.to_string()),
        ));
        let mut acc = self.tube_chain_system(0)?;
        for t in 1..self.ranks.len() {
            acc = acc.shuffle(&self.tube_chain_system(t)?)?;
        }
        let a: BTreeSet<&Word> = acc.words().iter().collect();
        let b: BTreeSet<&Word> = c.words().iter().collect();
        checks.push(Check::from_result(
            "equals_shuffle_of_tubes",
            match a.symmetric_difference(&b).next() {
                None => Ok(()),
                Some(w) => Err(word_string(w)),
            },
        ));
        let total: usize = self.ranks.iter().sum();
        let mut shape = Ok(());
        for w in c.words() {
            let mut fs = vec![0usize; self.ranks.len()];
            for l in w {
                let x = &index[l];
                if x.is_f() {
                    fs[x.tube] += 1;
                }
            }
            if w.len() != total || fs.iter().any(|&f| f != 1) {
                shape = Err(word_string(w));
                break;
            }
        }
        checks.push(Check::from_result("length_and_one_f_per_tube", shape));
        Ok(checks)
    }

    pub fn summary(&self, c: &ChainSystem) -> RpeSummary {
        RpeSummary {
            ranks: self.ranks.clone(),
            alphabet: self.letters().len(),
            relation: self.relation().len(),
            words: c.len(),
            word_length: c.words().first().map_or(0, Vec::len),
        }
    }
}

/// `ω`: exceptional letters go to the reflection of their dimension vector, `F_β` to `f_β`.
pub fn omega(ms: &McSul, tubes: &Tubes, x: &TubeLetter) -> Option<McSulLetter> {
    let beta = tubes.beta_root(x)?;
    if x.is_f() {
        ms.f_of_beta.get(&beta).map(|&j| McSulLetter::Fact(j))
    } else {
        Some(ms.t_beta_k(&beta, x.k))
    }
}

/// The letter map `ω` on names.
pub fn omega_map(ms: &McSul, tubes: &Tubes) -> Result<HashMap<Letter, Letter>, String> {
    let mut map = HashMap::new();
    for x in tubes.letters() {
        let y = omega(ms, tubes, &x).ok_or_else(|| format!("no image for {}", x.name()))?;
        map.insert(x.name(), ms.letter(&y));
    }
    Ok(map)
}

/// Compares `ω(B_rpe)` with the McSul relation and `ω(C_rpe)` with `C_c^F`.
pub fn verify_omega_iso(ms: &McSul) -> Result<Vec<Check>, TubeError> {
    let tubes = Tubes::from_horizontal(&ms.hd, &ms.datum)?;
    let mut checks = Vec::new();
    let map = match omega_map(ms, &tubes) {
        Ok(m) => m,
        Err(w) => return Ok(vec![Check::fail("omega_defined", w)]),
    };
    let target: HashSet<Letter> = ms.alphabet().iter().map(|l| ms.letter(l)).collect();
    let image: HashSet<&Letter> = map.values().collect();
    checks.push(Check::from_result(
        "omega_bijective",
        if image.len() == map.len() && image.len() == target.len() && image.iter().all(|l| target.contains(*l)) {
            Ok(())
        } else {
            Err(format!("{} letters, {} images, {} targets", map.len(), image.len(), target.len()))
        },
    ));
    let mut dims = Ok(());
    for x in tubes.letters() {
        if x.is_exceptional() {
            let d = tubes.dim_vector(&x).unwrap_or_default();
            if ms.letter(&McSulLetter::Refl(d.clone())) != map[&x.name()] {
                dims = Err(format!("{} has dimension vector {}", x.name(), root_name(&d)));
                break;
            }
        }
    }
    checks.push(Check::from_result("omega_uses_dimension_vectors", dims));
    let mapped: BTreeSet<(Letter, Letter)> =
        tubes.relation().pairs.iter().map(|(a, b)| (map[a].clone(), map[b].clone())).collect();
    let rel = ms.mcsul_relation();
    checks.push(Check::from_result(
        "relation_maps_onto_mcsul_relation",
        match mapped.symmetric_difference(&rel.pairs).next() {
            None => Ok(()),
            Some((a, b)) => Err(format!("({a}, {b})")),
        },
    ));
    let crpe = tubes.chain_system()?;
    let ccf = ms.build_ccf()?;
    let image: BTreeSet<Word> = crpe.relabel(&map).words().iter().cloned().collect();
    let ccf_words: BTreeSet<Word> = ccf.words().iter().cloned().collect();
    checks.push(Check::from_result(
        "words_map_onto_ccf",
        match image.symmetric_difference(&ccf_words).next() {
            None if crpe.len() == ccf.len() => Ok(()),
            None => Err(format!("{} vs {} words", crpe.len(), ccf.len())),
            Some(w) => Err(word_string(w)),
        },
    ));
    Ok(checks)
}

/// `P(C_T)` for one abstract tube of rank `r`.
pub fn tube_poset(r: usize) -> Result<LabeledPoset, TubeError> {
    let t = Tubes::single(r)?;
    Ok(t.tube_chain_system(0)?.build_poset()?)
}

/// `P(C_T)` against `NC(B_r)`: unlabeled isomorphism and maximal-chain counts.
pub fn compare_with_type_b(r: usize) -> Result<Vec<Check>, TubeError> {
    let p = tube_poset(r)?;
    if r == 1 {
        let chain = p.len() == 2 && p.maximal_chains().len() == 1;
        return Ok(vec![Check::from_result(
            "rank_one_is_two_chain",
            if chain { Ok(()) } else { Err(format!("{} elements", p.len())) },
        )]);
    }
    let nc = nc_lattice(&parse_named(&format!("B{r}"))?)?;
    let (a, b) = (p.maximal_chains().len(), nc.maximal_chains().len());
    Ok(vec![
        Check::from_result(
            "chain_count_matches",
            if a == b { Ok(()) } else { Err(format!("{a} vs {b}")) },
        ),
        Check::from_result(
            "unlabeled_isomorphic_to_nc_b",
            if p.isomorphic_unlabeled(&nc)? { Ok(()) } else { Err(format!("{} vs {} elements", p.len(), nc.len())) },
        ),
    ])
}

/// Closed-form predicates against the representation computation, for all pairs with
/// quasi-lengths up to `max_k`.
pub fn verify_against_oracle(r: usize, max_k: usize) -> Check {
    for b in 0..r {
        for k in 1..=max_k {
            for c in 0..r {
                for l in 1..=max_k {
                    let x = TubeLetter::new(0, r, b, k);
                    let y = TubeLetter::new(0, r, c, l);
                    let (h, e) = hom_ext_dims(r, (b, k), (c, l));
                    if (h > 0) != hom_nonzero(&x, &y) || (e > 0) != ext_nonzero(&x, &y) {
                        return Check::fail(
                            format!("oracle_rank_{r}"),
                            format!("({b},{k}) -> ({c},{l}): hom {h}, ext {e}"),
                        );
                    }
                }
            }
        }
    }
    Check::pass(format!("oracle_rank_{r}"))
}

/// The F-letter vanishing statements, for every `β, γ` and `1 ≤ k ≤ max_k`.
pub fn verify_f_vanishing(r: usize, max_k: usize) -> Vec<Check> {
    let mut before = Ok(());
    let mut after = Ok(());
    for b in 0..r {
        for g in 0..r {
            let f = TubeLetter::new(0, r, g, r);
            for k in 1..=max_k {
                let x = TubeLetter::new(0, r, b, k);
                let into = !hom_nonzero(&f, &x) && !ext_nonzero(&f, &x);
                let expect = !(0..k).any(|i| (b + i) % r == g);
                if into != expect && before.is_ok() {
                    before = Err(format!("F{g} vs ({b},{k})"));
                }
                let out = !hom_nonzero(&x, &f) && !ext_nonzero(&x, &f);
                let expect = !(1..=k).any(|i| (b + i) % r == g);
                if out != expect && after.is_ok() {
                    after = Err(format!("({b},{k}) vs F{g}"));
                }
            }
        }
    }
    vec![
        Check::from_result(format!("f_first_rank_{r}"), before),
        Check::from_result(format!("f_second_rank_{r}"), after),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_two_example() {
        let fb = TubeLetter::new(0, 2, 0, 2);
        let g = TubeLetter::new(0, 2, 1, 1);
        assert!(!hom_nonzero(&fb, &g));
        assert!(!ext_nonzero(&fb, &g));
        assert!(hom_nonzero(&fb, &fb));
    }

    #[test]
    fn different_tubes_vanish() {
        let x = TubeLetter::new(0, 2, 0, 1);
        let y = TubeLetter::new(1, 2, 0, 1);
        assert!(!hom_nonzero(&x, &y) && !ext_nonzero(&x, &y));
        assert!(rpe_compatible(&x, &y) && rpe_compatible(&y, &x));
    }

    #[test]
    fn oracle_simple_cases() {
        assert_eq!(hom_ext_dims(3, (0, 1), (0, 1)), (1, 0));
        assert_eq!(hom_ext_dims(3, (0, 1), (1, 1)), (0, 1));
        assert_eq!(hom_ext_dims(1, (0, 1), (0, 1)), (1, 1));
        assert_eq!(hom_ext_dims(2, (0, 2), (0, 2)), (1, 1));
    }

    #[test]
    fn rank_three_tube_has_27_words() {
        let t = Tubes::single(3).unwrap();
        let c = t.chain_system().unwrap();
        assert_eq!(c.len(), 27);
        assert!(t.verify(&c).unwrap().iter().all(Check::passed));
    }

    #[test]
    fn rank_one_is_chain() {
        let p = tube_poset(1).unwrap();
        assert_eq!(p.len(), 2);
        assert!(compare_with_type_b(1).unwrap().iter().all(Check::passed));
    }

    #[test]
    fn expected_counts() {
        assert_eq!(Tubes::from_ranks(&[2, 2]).unwrap().expected_words(), 96);
        assert_eq!(Tubes::from_ranks(&[4]).unwrap().expected_words(), 256);
        assert!(Tubes::single(7).is_err());
    }

    #[test]
    fn embedded_a3() {
        let d = parse_named("A~3:outer=1,3").unwrap();
        let ms = McSul::new(&d, None).unwrap();
        let t = Tubes::from_horizontal(&ms.hd, &d).unwrap();
        let c = t.chain_system().unwrap();
        assert_eq!(c.len(), 96);
        assert!(t.verify(&c).unwrap().iter().all(Check::passed));
        let checks = verify_omega_iso(&ms).unwrap();
        assert!(checks.iter().all(Check::passed), "{checks:?}");
    }
}
