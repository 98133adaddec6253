//! Finite Weyl groups: reflection length, absolute order, Hurwitz orbits and noncrossing lattices.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::chain_system::{BinaryRelation, ChainError, ChainSystem, Letter, Word};
use crate::labeled_poset::{LabeledPoset, PosetError};
use crate::linalg::{self, IMat, Q};
use crate::report::Check;
use crate::root_datum::{abs_root, root_name, Root, RootDatum, RootError, TypeTag};

pub const DEFAULT_RANK_CAP: usize = 6;
pub const DEFAULT_ORBIT_CAP: usize = 2_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NcError {
    #[error("operation needs a finite-type datum")]
    NotFinite,
    #[error("rank {0} exceeds the cap {1}")]
    RankTooLarge(usize, usize),
    #[error("orbit exceeded {cap} words (found {found} so far)")]
    OrbitTooLarge { found: usize, cap: usize },
    #[error("word is not a reduced T-word for its product")]
    NotReduced,
    #[error("letter {0} is not a reflection letter")]
    BadLetter(String),
    #[error(transparent)]
    Root(#[from] RootError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Poset(#[from] PosetError),
}

fn require_finite(datum: &RootDatum) -> Result<(), NcError> {
    if datum.tag != TypeTag::Finite {
        return Err(NcError::NotFinite);
    }
    Ok(())
}

pub fn reflection_letter(root: &[i64]) -> Letter {
    Letter::new(&root_name(root))
}

/// Inverse of [`reflection_letter`].
pub fn letter_root(l: &Letter) -> Result<Root, NcError> {
    let bad = || NcError::BadLetter(l.to_string());
    let body = l.as_str().strip_prefix("t[").and_then(|s| s.strip_suffix(']')).ok_or_else(bad)?;
    body.split(',').map(|x| x.trim().parse::<i64>().map_err(|_| bad())).collect()
}

/// `ℓ_T(w)`: the codimension of the fixed space of `w`.
pub fn reflection_length(datum: &RootDatum, w: &IMat) -> Result<usize, NcError> {
    require_finite(datum)?;
    let mut m = linalg::to_q(w);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] -= Q::from_integer(1);
    }
    Ok(linalg::rank(&m))
}

pub fn absolute_leq(datum: &RootDatum, u: &IMat, w: &IMat) -> Result<bool, NcError> {
    let u_inv = linalg::inverse(&linalg::to_q(u)).expect("invertible");
    let rest: IMat = linalg::mul_q(&u_inv, &linalg::to_q(w))
        .iter()
        .map(|row| row.iter().map(|x| x.to_integer()).collect())
        .collect();
    Ok(reflection_length(datum, u)? + reflection_length(datum, &rest)? == reflection_length(datum, w)?)
}

/// Product of the reflections of `roots`, leftmost factor outermost.
pub fn word_product(datum: &RootDatum, roots: &[Root]) -> Result<IMat, NcError> {
    let mut m = linalg::identity_i(datum.n());
    for r in roots {
        m = linalg::mul_i(&m, &datum.reflection_of_root(r)?);
    }
    Ok(m)
}

pub fn defining_word(datum: &RootDatum) -> Vec<Root> {
    let n = datum.n();
    datum
        .cox_word
        .iter()
        .map(|&i| {
            let mut e = vec![0; n];
            e[i] = 1;
            e
        })
        .collect()
}

/// The two Hurwitz moves at position `i`.
fn hurwitz_moves(datum: &RootDatum, w: &[Root], i: usize) -> [Vec<Root>; 2] {
    let (a, b) = (&w[i], &w[i + 1]);
    let mut fwd = w.to_vec();
    fwd[i] = abs_root(&datum.reflect(a, b));
    fwd[i + 1] = a.clone();
    let mut back = w.to_vec();
    back[i] = b.clone();
    back[i + 1] = abs_root(&datum.reflect(b, a));
    [fwd, back]
}

/// All reduced T-words for the product of `word`, as root sequences.
pub fn hurwitz_orbit_roots(datum: &RootDatum, word: &[Root], cap: usize) -> Result<Vec<Vec<Root>>, NcError> {
    require_finite(datum)?;
    let product = word_product(datum, word)?;
    if reflection_length(datum, &product)? != word.len() {
        return Err(NcError::NotReduced);
    }
    let start: Vec<Root> = word.iter().map(|r| abs_root(r)).collect();
    let mut seen: HashSet<Vec<Root>> = HashSet::new();
    seen.insert(start.clone());
    let mut queue = VecDeque::from([start]);
    while let Some(w) = queue.pop_front() {
        for i in 0..w.len().saturating_sub(1) {
            for next in hurwitz_moves(datum, &w, i) {
                if !seen.contains(&next) {
                    if seen.len() >= cap {
                        return Err(NcError::OrbitTooLarge { found: seen.len(), cap });
                    }
                    seen.insert(next.clone());
                    queue.push_back(next);
                }
            }
        }
    }
    let mut out: Vec<Vec<Root>> = seen.into_iter().collect();
    out.sort();
    Ok(out)
}

pub fn roots_to_word(roots: &[Root]) -> Word {
    roots.iter().map(|r| reflection_letter(r)).collect()
}

pub fn hurwitz_orbit(datum: &RootDatum, word: &[Root]) -> Result<ChainSystem, NcError> {
    let words = hurwitz_orbit_roots(datum, word, DEFAULT_ORBIT_CAP)?;
    Ok(ChainSystem::new(words.iter().map(|w| roots_to_word(w))))
}

/// `C_c` for the defining word of `c`.
pub fn coxeter_chain_system(datum: &RootDatum) -> Result<ChainSystem, NcError> {
    require_finite(datum)?;
    if datum.n() > DEFAULT_RANK_CAP {
        return Err(NcError::RankTooLarge(datum.n(), DEFAULT_RANK_CAP));
    }
    hurwitz_orbit(datum, &defining_word(datum))
}

pub fn nc_lattice(datum: &RootDatum) -> Result<LabeledPoset, NcError> {
    Ok(coxeter_chain_system(datum)?.build_poset()?)
}

/// Two prefixes are equivalent exactly when their products agree.
pub fn prefix_product_check(datum: &RootDatum, c: &ChainSystem) -> Result<Result<(), String>, NcError> {
    let classes = c.prefix_classes()?;
    let mut owner: HashMap<IMat, usize> = HashMap::new();
    for (id, members) in classes.members.iter().enumerate() {
        let mut product: Option<IMat> = None;
        for m in members {
            let roots: Vec<Root> = m.iter().map(letter_root).collect::<Result<_, _>>()?;
            let p = word_product(datum, &roots)?;
            match &product {
                None => product = Some(p),
                Some(q) if *q != p => {
                    return Ok(Err(format!(
                        "equivalent prefixes [{}] and [{}] have different products",
                        crate::chain_system::word_string(&members[0]),
                        crate::chain_system::word_string(m)
                    )))
                }
                Some(_) => {}
            }
        }
        let p = product.expect("nonempty class");
        if let Some(&other) = owner.get(&p) {
            return Ok(Err(format!(
                "inequivalent prefixes [{}] and [{}] have the same product",
                crate::chain_system::word_string(&classes.members[other][0]),
                crate::chain_system::word_string(&members[0])
            )));
        }
        owner.insert(p, id);
    }
    Ok(Ok(()))
}

/// Reflections `t ≤_T c`, as positive roots.
pub fn reflections_below_c(datum: &RootDatum) -> Result<Vec<Root>, NcError> {
    let mut out = Vec::new();
    for r in datum.positive_real_roots_bounded(None)? {
        if absolute_leq(datum, &datum.reflection_of_root(&r)?, &datum.c_matrix)? {
            out.push(r);
        }
    }
    Ok(out)
}

/// `{tt′ : 1 < tt′ ≤_T c}` on the reflections below `c`.
pub fn nc_relation(datum: &RootDatum) -> Result<(BinaryRelation, BTreeSet<Letter>), NcError> {
    let refl = reflections_below_c(datum)?;
    let mats: Vec<IMat> = refl.iter().map(|r| datum.reflection_of_root(r)).collect::<Result<_, _>>()?;
    let mut pairs = Vec::new();
    for (i, a) in mats.iter().enumerate() {
        for (j, b) in mats.iter().enumerate() {
            if i == j {
                continue;
            }
            if absolute_leq(datum, &linalg::mul_i(a, b), &datum.c_matrix)? {
                pairs.push((reflection_letter(&refl[i]), reflection_letter(&refl[j])));
            }
        }
    }
    let alphabet = refl.iter().map(|r| reflection_letter(r)).collect();
    Ok((BinaryRelation::new(pairs), alphabet))
}

/// Root sequences of length `n` that are `E_{c⁻¹}`-triangular and a Z-basis.
pub fn exceptional_root_sequences(datum: &RootDatum) -> Result<Vec<Vec<Root>>, NcError> {
    require_finite(datum)?;
    let roots = datum.positive_real_roots_bounded(None)?;
    let n = datum.n();
    let mut out = Vec::new();
    let mut seq: Vec<Root> = Vec::new();
    extend_exceptional(datum, &roots, n, &mut seq, &mut out);
    out.sort();
    Ok(out)
}

fn extend_exceptional(datum: &RootDatum, roots: &[Root], n: usize, seq: &mut Vec<Root>, out: &mut Vec<Vec<Root>>) {
    if seq.len() == n {
        let m: Vec<Vec<Q>> = seq.iter().map(|r| r.iter().map(|&x| Q::from_integer(x)).collect()).collect();
        if linalg::det(&m).abs() == Q::from_integer(1) {
            out.push(seq.clone());
        }
        return;
    }
    for r in roots {
        if seq.iter().all(|g| datum.ec_inv_form(r, g).is_zero()) {
            seq.push(r.clone());
            extend_exceptional(datum, roots, n, seq, out);
            seq.pop();
        }
    }
}

/// Compares the word sets from the maximal-pairwise, exceptional and braid descriptions.
pub fn verify_word_criteria(datum: &RootDatum) -> Result<Vec<Check>, NcError> {
    let orbit = coxeter_chain_system(datum)?;
    let mut checks = Vec::new();

    let (rel, alphabet) = nc_relation(datum)?;
    let pairwise = ChainSystem::maximal_b_sequences(&rel, &alphabet)?;
    checks.push(if pairwise == orbit {
        Check::pass("maximal_pairwise_equals_braid_orbit")
    } else {
        Check::fail(
            "maximal_pairwise_equals_braid_orbit",
            format!("{} maximal pairwise sequences vs {} orbit words", pairwise.len(), orbit.len()),
        )
    });
    checks.push(if orbit.two_letter_prefixes().pairs.is_subset(&rel.pairs) {
        Check::pass("orbit_prefixes_in_relation")
    } else {
        Check::fail("orbit_prefixes_in_relation", "some consecutive pair lies outside the relation")
    });

    let exc = ChainSystem::new(exceptional_root_sequences(datum)?.iter().map(|w| roots_to_word(w)));
    checks.push(if exc == orbit {
        Check::pass("exceptional_equals_braid_orbit")
    } else {
        Check::fail(
            "exceptional_equals_braid_orbit",
            format!("{} exceptional sequences vs {} orbit words", exc.len(), orbit.len()),
        )
    });

    let mut reduced = Ok(());
    for w in orbit.words() {
        let roots: Vec<Root> = w.iter().map(letter_root).collect::<Result<_, _>>()?;
        if w.len() != datum.n() || word_product(datum, &roots)? != datum.c_matrix {
            reduced = Err(format!("[{}] is not a reduced word for c", crate::chain_system::word_string(w)));
            break;
        }
    }
    checks.push(Check::from_result("orbit_words_reduced_for_c", reduced));
    checks.push(Check::from_result("prefix_products", prefix_product_check(datum, &orbit)?));
    Ok(checks)
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
    fn lengths() {
        let a3 = d("A3");
        assert_eq!(reflection_length(&a3, &linalg::identity_i(3)).unwrap(), 0);
        assert_eq!(reflection_length(&a3, &a3.reflection_of_root(&[1, 1, 0]).unwrap()).unwrap(), 1);
        assert_eq!(reflection_length(&a3, &a3.c_matrix).unwrap(), 3);
        assert!(reflection_length(&d("A~2"), &linalg::identity_i(3)).is_err());
    }

    #[test]
    fn absolute_order() {
        let a2 = d("A2");
        let id = linalg::identity_i(2);
        assert!(absolute_leq(&a2, &id, &a2.c_matrix).unwrap());
        assert_eq!(reflections_below_c(&a2).unwrap().len(), 3);
        let a3 = d("A3");
        let s1 = a3.simple_reflection(0);
        let s3 = a3.simple_reflection(2);
        assert!(!absolute_leq(&a3, &s1, &s3).unwrap());
    }

    #[test]
    fn orbit_sizes() {
        assert_eq!(coxeter_chain_system(&d("A2")).unwrap().len(), 3);
        assert_eq!(coxeter_chain_system(&d("B2")).unwrap().len(), 4);
        assert_eq!(coxeter_chain_system(&d("A3")).unwrap().len(), 16);
        assert_eq!(coxeter_chain_system(&d("B3")).unwrap().len(), 27);
    }

    #[test]
    fn lattice_sizes() {
        assert_eq!(nc_lattice(&d("A2")).unwrap().len(), 5);
        assert_eq!(nc_lattice(&d("B2")).unwrap().len(), 6);
        assert_eq!(nc_lattice(&d("A3")).unwrap().len(), 14);
    }

    #[test]
    fn criteria_agree() {
        for name in ["A2", "B2", "A3"] {
            let checks = verify_word_criteria(&d(name)).unwrap();
            assert!(all_pass(&checks), "{name}: {checks:?}");
        }
    }

    #[test]
    fn defining_word_is_exceptional() {
        let a3 = d("A3");
        let seqs = exceptional_root_sequences(&a3).unwrap();
        assert!(seqs.contains(&defining_word(&a3)));
    }

    #[test]
    fn non_reduced_rejected() {
        let a2 = d("A2");
        let w = vec![vec![1, 0], vec![1, 0]];
        assert_eq!(hurwitz_orbit(&a2, &w), Err(NcError::NotReduced));
    }

    #[test]
    fn letters_round_trip() {
        let r = vec![1, 0, 2];
        assert_eq!(letter_root(&reflection_letter(&r)).unwrap(), r);
        assert!(letter_root(&Letter::new("f1")).is_err());
    }
}
