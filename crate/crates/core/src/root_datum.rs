//! Cartan matrices, roots, the forms `K` and `E_c`, and Coxeter elements.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use itertools::Itertools;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, q, IMat, QMat, Q};

pub type Root = Vec<i64>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RootError {
    #[error("invalid Cartan matrix: {0}")]
    InvalidCartan(String),
    #[error("invalid Coxeter word: {0}")]
    InvalidWord(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("operation needs an affine datum")]
    NotAffine,
    #[error("operation needs a finite or affine datum")]
    WrongType,
    #[error("root {0:?} is not real")]
    Imaginary(Root),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TypeTag {
    Finite,
    Affine,
    Other,
}

impl fmt::Display for TypeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TypeTag::Finite => "finite",
            TypeTag::Affine => "affine",
            TypeTag::Other => "other",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CartanMatrix {
    pub n: usize,
    pub a: IMat,
    pub d: Vec<Q>,
}

impl CartanMatrix {
    /// Validates `a` and computes a symmetrizer.
    pub fn new(a: IMat) -> Result<Self, RootError> {
        let d = symmetrizer(&a)?;
        Self::with_symmetrizer(a, d)
    }

    pub fn with_symmetrizer(a: IMat, d: Vec<Q>) -> Result<Self, RootError> {
        let n = a.len();
        if n == 0 {
            return Err(RootError::InvalidCartan("empty matrix".into()));
        }
        if a.iter().any(|r| r.len() != n) || d.len() != n {
            return Err(RootError::InvalidCartan("shape mismatch".into()));
        }
        for i in 0..n {
            if a[i][i] != 2 {
                return Err(RootError::InvalidCartan(format!("a[{i}][{i}] != 2")));
            }
            if d[i] <= Q::zero() {
                return Err(RootError::InvalidCartan("symmetrizer must be positive".into()));
            }
            for j in 0..n {
                if i == j {
                    continue;
                }
                if a[i][j] > 0 {
                    return Err(RootError::InvalidCartan(format!("a[{i}][{j}] > 0")));
                }
                if (a[i][j] == 0) != (a[j][i] == 0) {
                    return Err(RootError::InvalidCartan(format!("zero pattern at ({i},{j})")));
                }
                if d[i] * q(a[i][j]) != d[j] * q(a[j][i]) {
                    return Err(RootError::InvalidCartan(format!(
                        "d[{i}] a[{i}][{j}] != d[{j}] a[{j}][{i}]"
                    )));
                }
            }
        }
        Ok(CartanMatrix { n, a, d })
    }

    /// `K(α_i, α_j) = d_i a_ij`.
    pub fn symmetrized(&self) -> QMat {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.d[i] * q(self.a[i][j])).collect())
            .collect()
    }

    /// Relabels simple roots: new index `k` is old index `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self, RootError> {
        let a = perm
            .iter()
            .map(|&i| perm.iter().map(|&j| self.a[i][j]).collect())
            .collect();
        let d = perm.iter().map(|&i| self.d[i]).collect();
        Self::with_symmetrizer(a, d)
    }
}

fn symmetrizer(a: &IMat) -> Result<Vec<Q>, RootError> {
    let n = a.len();
    let mut d: Vec<Option<Q>> = vec![None; n];
    for start in 0..n {
        if d[start].is_some() {
            continue;
        }
        d[start] = Some(Q::one());
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            for j in 0..n {
                if i == j || a[i].get(j).copied().unwrap_or(0) == 0 {
                    continue;
                }
                if a.get(j).and_then(|r| r.get(i)).copied().unwrap_or(0) == 0 {
                    return Err(RootError::InvalidCartan(format!("zero pattern at ({i},{j})")));
                }
                let di = d[i].unwrap();
                let want = di * q(a[i][j]) / q(a[j][i]);
                match d[j] {
                    None => {
                        d[j] = Some(want);
                        queue.push_back(j);
                    }
                    Some(x) if x != want => {
                        return Err(RootError::InvalidCartan("not symmetrizable".into()))
                    }
                    _ => {}
                }
            }
        }
    }
    let d: Vec<Q> = d.into_iter().map(Option::unwrap).collect();
    let ints = linalg::primitive(&d);
    Ok(ints.into_iter().map(q).collect())
}

pub fn classify(cartan: &CartanMatrix) -> TypeTag {
    let k = cartan.symmetrized();
    if linalg::is_positive_definite(&k) {
        return TypeTag::Finite;
    }
    let n = cartan.n;
    if n < 2 || !linalg::det(&k).is_zero() {
        return TypeTag::Other;
    }
    let all_deletions_finite = (0..n).all(|skip| {
        let idx: Vec<usize> = (0..n).filter(|&i| i != skip).collect();
        linalg::is_positive_definite(&linalg::principal_minor(&k, &idx))
    });
    if all_deletions_finite {
        TypeTag::Affine
    } else {
        TypeTag::Other
    }
}

#[derive(Debug, Clone)]
pub struct RootDatum {
    pub name: String,
    pub cartan: CartanMatrix,
    /// Defining word of `c`, 0-based indices.
    pub cox_word: Vec<usize>,
    /// Action of `c` on V in the simple-root basis.
    pub c_matrix: IMat,
    pub k: QMat,
    /// `ec[i][j] = E_c(α_i, α_j)`.
    pub ec: QMat,
    pub delta: Option<Root>,
    pub tag: TypeTag,
}

impl RootDatum {
    pub fn new(name: &str, cartan: CartanMatrix, cox_word: Vec<usize>) -> Result<Self, RootError> {
        let n = cartan.n;
        let mut seen = cox_word.clone();
        seen.sort_unstable();
        if seen != (0..n).collect::<Vec<_>>() {
            return Err(RootError::InvalidWord(format!(
                "{:?} is not a permutation of 0..{n}",
                cox_word
            )));
        }
        let tag = classify(&cartan);
        let k = cartan.symmetrized();
        let mut pos = vec![0; n];
        for (p, &i) in cox_word.iter().enumerate() {
            pos[i] = p;
        }
        let ec = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let base = if i == j {
                            Q::one()
                        } else if pos[i] > pos[j] {
                            q(cartan.a[i][j])
                        } else {
                            Q::zero()
                        };
                        cartan.d[i] * base
                    })
                    .collect()
            })
            .collect();
        let delta = if tag == TypeTag::Affine {
            let ker = linalg::kernel(&k);
            let mut v = linalg::primitive(&ker[0]);
            if v.iter().any(|&x| x < 0) {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            Some(v)
        } else {
            None
        };
        let mut datum = RootDatum {
            name: name.to_string(),
            cartan,
            cox_word,
            c_matrix: Vec::new(),
            k,
            ec,
            delta,
            tag,
        };
        datum.c_matrix = datum.word_matrix(&datum.cox_word.clone());
        Ok(datum)
    }

    pub fn n(&self) -> usize {
        self.cartan.n
    }

    /// Product of simple reflections, leftmost factor outermost.
    pub fn word_matrix(&self, word: &[usize]) -> IMat {
        word.iter().fold(linalg::identity_i(self.n()), |acc, &i| {
            linalg::mul_i(&acc, &self.simple_reflection(i))
        })
    }

    pub fn simple_reflection(&self, i: usize) -> IMat {
        let n = self.n();
        let mut m = linalg::identity_i(n);
        for j in 0..n {
            m[i][j] -= self.cartan.a[i][j];
        }
        m
    }

    pub fn k_form(&self, x: &[i64], y: &[i64]) -> Q {
        linalg::form_i(&self.k, x, y)
    }

    /// `E_c(x, y)` on root coordinates.
    pub fn ec_form(&self, x: &[i64], y: &[i64]) -> Q {
        linalg::form_i(&self.ec, x, y)
    }

    /// `E_{c^{-1}}(x, y) = E_c(y, x)`.
    pub fn ec_inv_form(&self, x: &[i64], y: &[i64]) -> Q {
        self.ec_form(y, x)
    }

    /// `E_c(x∨, y)` for a real root `x`.
    pub fn ec_coroot(&self, x: &[i64], y: &[i64]) -> Result<Q, RootError> {
        let kk = self.k_form(x, x);
        if kk.is_zero() {
            return Err(RootError::Imaginary(x.to_vec()));
        }
        Ok(self.ec_form(x, y) * q(2) / kk)
    }

    pub fn ec_inv_coroot(&self, x: &[i64], y: &[i64]) -> Result<Q, RootError> {
        let kk = self.k_form(x, x);
        if kk.is_zero() {
            return Err(RootError::Imaginary(x.to_vec()));
        }
        Ok(self.ec_inv_form(x, y) * q(2) / kk)
    }

    /// `K(β∨, x)`.
    pub fn pairing(&self, beta: &[i64], x: &[i64]) -> Result<Q, RootError> {
        let kk = self.k_form(beta, beta);
        if kk.is_zero() {
            return Err(RootError::Imaginary(beta.to_vec()));
        }
        Ok(self.k_form(beta, x) * q(2) / kk)
    }

    /// Matrix of `x ↦ x − K(β∨, x) β` on V.
    pub fn reflection_of_root(&self, beta: &[i64]) -> Result<IMat, RootError> {
        let n = self.n();
        let kk = self.k_form(beta, beta);
        if kk.is_zero() {
            return Err(RootError::Imaginary(beta.to_vec()));
        }
        let mut m = linalg::identity_i(n);
        for j in 0..n {
            let mut e = vec![0; n];
            e[j] = 1;
            let c = self.k_form(beta, &e) * q(2) / kk;
            if !c.is_integer() {
                return Err(RootError::Imaginary(beta.to_vec()));
            }
            let c = c.to_integer();
            for i in 0..n {
                m[i][j] -= c * beta[i];
            }
        }
        Ok(m)
    }

    /// Image of a root under the reflection in `beta`.
    pub fn reflect(&self, beta: &[i64], x: &[i64]) -> Root {
        let c = self.pairing(beta, x).expect("real root").to_integer();
        x.iter().zip(beta).map(|(a, b)| a - c * b).collect()
    }

    pub fn apply_c(&self, x: &[i64]) -> Root {
        linalg::apply_i(&self.c_matrix, x)
    }

    /// Positive real roots with every coordinate at most `bound` (all of them in finite
    /// type when `bound` is `None`).
    pub fn positive_real_roots_bounded(&self, bound: Option<&[i64]>) -> Result<Vec<Root>, RootError> {
        match (self.tag, bound) {
            (TypeTag::Other, _) => return Err(RootError::WrongType),
            (TypeTag::Affine, None) => return Err(RootError::WrongType),
            _ => {}
        }
        let n = self.n();
        let inside = |r: &Root| bound.map_or(true, |b| r.iter().zip(b).all(|(x, y)| x <= y));
        let mut seen: HashSet<Root> = HashSet::new();
        let mut queue = VecDeque::new();
        for i in 0..n {
            let mut e = vec![0; n];
            e[i] = 1;
            if inside(&e) && seen.insert(e.clone()) {
                queue.push_back(e);
            }
        }
        while let Some(r) = queue.pop_front() {
            for i in 0..n {
                let c: i64 = (0..n).map(|j| self.cartan.a[i][j] * r[j]).sum();
                if c >= 0 {
                    continue;
                }
                let mut s = r.clone();
                s[i] -= c;
                if inside(&s) && seen.insert(s.clone()) {
                    queue.push_back(s);
                }
            }
        }
        let mut out: Vec<Root> = seen.into_iter().collect();
        sort_roots(&mut out);
        Ok(out)
    }

    pub fn is_horizontal(&self, beta: &[i64]) -> Result<bool, RootError> {
        let delta = self.delta.as_ref().ok_or(RootError::NotAffine)?;
        Ok(self.ec_inv_form(delta, beta).is_zero())
    }
}

pub fn sort_roots(roots: &mut [Root]) {
    roots.sort_by(|a, b| {
        let ha: i64 = a.iter().sum();
        let hb: i64 = b.iter().sum();
        ha.cmp(&hb).then_with(|| b.cmp(a))
    });
}

pub fn is_positive(r: &[i64]) -> bool {
    r.iter().all(|&x| x >= 0) && r.iter().any(|&x| x > 0)
}

/// Normalizes a real root to its positive representative.
pub fn abs_root(r: &[i64]) -> Root {
    if r.iter().any(|&x| x < 0) {
        r.iter().map(|x| -x).collect()
    } else {
        r.to_vec()
    }
}

pub fn root_name(r: &[i64]) -> String {
    format!("t[{}]", r.iter().join(","))
}

fn path(n: usize) -> IMat {
    let mut a = vec![vec![0; n]; n];
    for i in 0..n {
        a[i][i] = 2;
        if i + 1 < n {
            a[i][i + 1] = -1;
            a[i + 1][i] = -1;
        }
    }
    a
}

fn link(a: &mut IMat, i: usize, j: usize, aij: i64, aji: i64) {
    a[i][j] = aij;
    a[j][i] = aji;
}

fn finite_cartan(family: char, k: usize) -> Result<IMat, RootError> {
    let bad = || RootError::Parse(format!("unsupported finite type {family}{k}"));
    let mut a = path(k);
    match family {
        'A' if k >= 1 => {}
        'B' if k >= 2 => link(&mut a, k - 2, k - 1, -1, -2),
        'C' if k >= 2 => link(&mut a, k - 2, k - 1, -2, -1),
        'D' if k >= 4 => {
            link(&mut a, k - 2, k - 1, 0, 0);
            link(&mut a, k - 3, k - 1, -1, -1);
        }
        'E' if (6..=8).contains(&k) => {
            a = vec![vec![0; k]; k];
            for i in 0..k {
                a[i][i] = 2;
            }
            // Bourbaki labels 1-3-4-5-6-7-8 with 2 attached to 4.
            link(&mut a, 0, 2, -1, -1);
            link(&mut a, 1, 3, -1, -1);
            for i in 2..k - 1 {
                link(&mut a, i, i + 1, -1, -1);
            }
        }
        'F' if k == 4 => link(&mut a, 1, 2, -1, -2),
        'G' if k == 2 => link(&mut a, 0, 1, -3, -1),
        _ => return Err(bad()),
    }
    Ok(a)
}

fn affine_cartan(family: char, k: usize) -> Result<IMat, RootError> {
    let bad = || RootError::Parse(format!("unsupported affine type {family}~{k}"));
    if family == 'A' {
        if k == 0 {
            return Err(bad());
        }
        let n = k + 1;
        if n == 2 {
            return Ok(vec![vec![2, -2], vec![-2, 2]]);
        }
        let mut a = path(n);
        link(&mut a, n - 1, 0, -1, -1);
        return Ok(a);
    }
    let fin = finite_cartan(family, k)?;
    let n = k + 1;
    let mut a = vec![vec![0; n]; n];
    for i in 0..k {
        for j in 0..k {
            a[i][j] = fin[i][j];
        }
    }
    a[k][k] = 2;
    let z = k;
    match (family, k) {
        ('B', k) if k >= 3 => link(&mut a, z, 1, -1, -1),
        ('C', k) if k >= 2 => link(&mut a, z, 0, -1, -2),
        ('D', k) if k >= 4 => link(&mut a, z, 1, -1, -1),
        ('E', 6) => link(&mut a, z, 1, -1, -1),
        ('E', 7) => link(&mut a, z, 0, -1, -1),
        ('E', 8) => link(&mut a, z, 7, -1, -1),
        ('F', 4) => link(&mut a, z, 0, -1, -1),
        ('G', 2) => link(&mut a, z, 1, -1, -1),
        _ => return Err(bad()),
    }
    Ok(a)
}

/// Window of the affine permutation `c` determined by an outer/inner split of `1..=n`.
pub fn annulus_coxeter_window(n: usize, outer: &[i64]) -> Vec<i64> {
    let n_i = n as i64;
    let outer: BTreeSet<i64> = outer.iter().copied().collect();
    let inner: Vec<i64> = (1..=n_i).filter(|x| !outer.contains(x)).collect();
    let outer: Vec<i64> = outer.into_iter().collect();
    let mut w = vec![0; n];
    for (j, &o) in outer.iter().enumerate() {
        w[(o - 1) as usize] = if j + 1 < outer.len() { outer[j + 1] } else { outer[0] + n_i };
    }
    for (j, &p) in inner.iter().enumerate() {
        w[(p - 1) as usize] = if j > 0 { inner[j - 1] } else { inner[inner.len() - 1] - n_i };
    }
    w
}

/// Window of `s_{w_1} ⋯ s_{w_k}` with `s_i = (i i+1)_n` (0-based `i` stands for `i+1`).
pub fn affine_word_window(n: usize, word: &[usize]) -> Vec<i64> {
    let n_i = n as i64;
    (1..=n_i)
        .map(|x| {
            word.iter().rev().fold(x, |y, &i| {
                let s = i as i64 + 1;
                let r = (y - 1).rem_euclid(n_i) + 1;
                let t = if s == n_i { 1 } else { s + 1 };
                if r == s {
                    y + 1
                } else if r == t {
                    y - 1
                } else {
                    y
                }
            })
        })
        .collect()
}

/// A defining word whose product is the annulus Coxeter element with the given outer points.
pub fn annulus_coxeter_word(n: usize, outer: &[i64]) -> Result<Vec<usize>, RootError> {
    if outer.is_empty() || outer.len() >= n || outer.iter().any(|&o| o < 1 || o > n as i64) {
        return Err(RootError::Parse("outer points must be a proper nonempty subset of 1..n".into()));
    }
    let target = annulus_coxeter_window(n, outer);
    (0..n)
        .permutations(n)
        .find(|w| affine_word_window(n, w) == target)
        .ok_or_else(|| RootError::InvalidWord("no Coxeter word realizes the split".into()))
}

/// Parses names like `A3`, `B~3`, `D~4`, `A~3:outer=1,3`, `F~4:cox=5,1,2,3,4`.
pub fn parse_named(spec: &str) -> Result<RootDatum, RootError> {
    let spec = spec.trim();
    let mut parts = spec.split(':');
    let head = parts.next().unwrap_or_default();
    let mut chars = head.chars();
    let family = chars
        .next()
        .ok_or_else(|| RootError::Parse("empty type name".into()))?
        .to_ascii_uppercase();
    let rest: String = chars.collect();
    let (affine, num) = match rest.strip_prefix('~') {
        Some(r) => (true, r),
        None => (false, rest.as_str()),
    };
    let k: usize = num
        .parse()
        .map_err(|_| RootError::Parse(format!("bad rank in {head:?}")))?;
    let a = if affine { affine_cartan(family, k)? } else { finite_cartan(family, k)? };
    let n = a.len();
    let cartan = CartanMatrix::new(a)?;
    let mut word: Vec<usize> = (0..n).collect();
    for p in parts {
        let (key, val) = p
            .split_once('=')
            .ok_or_else(|| RootError::Parse(format!("bad option {p:?}")))?;
        let nums = parse_list(val)?;
        match key.trim() {
            "outer" if affine && family == 'A' => word = annulus_coxeter_word(n, &nums)?,
            "cox" => word = one_based(&nums, n)?,
            _ => return Err(RootError::Parse(format!("unknown option {key:?}"))),
        }
    }
    RootDatum::new(spec, cartan, word)
}

fn parse_list(s: &str) -> Result<Vec<i64>, RootError> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| RootError::Parse(format!("bad integer {t:?}"))))
        .collect()
}

fn one_based(nums: &[i64], n: usize) -> Result<Vec<usize>, RootError> {
    nums.iter()
        .map(|&x| {
            if x >= 1 && x as usize <= n {
                Ok(x as usize - 1)
            } else {
                Err(RootError::InvalidWord(format!("index {x} out of range")))
            }
        })
        .collect()
}

fn parse_rational(t: &str) -> Result<Q, RootError> {
    let err = || RootError::Parse(format!("bad rational {t:?}"));
    match t.split_once('/') {
        Some((a, b)) => {
            let a: i64 = a.trim().parse().map_err(|_| err())?;
            let b: i64 = b.trim().parse().map_err(|_| err())?;
            if b == 0 {
                return Err(err());
            }
            Ok(Q::new(a, b))
        }
        None => Ok(q(t.trim().parse().map_err(|_| err())?)),
    }
}

/// Parses the Cartan file format: `n`, then `n` rows, then optional `d:` and `cox:` lines.
pub fn parse_cartan_file(text: &str, name: &str) -> Result<RootDatum, RootError> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let n: usize = lines
        .next()
        .ok_or_else(|| RootError::Parse("missing size line".into()))?
        .parse()
        .map_err(|_| RootError::Parse("bad size line".into()))?;
    if n == 0 {
        return Err(RootError::Parse("size must be positive".into()));
    }
    let mut a = Vec::with_capacity(n);
    for _ in 0..n {
        let row = lines
            .next()
            .ok_or_else(|| RootError::Parse("missing matrix row".into()))?;
        let r = parse_list(row)?;
        if r.len() != n {
            return Err(RootError::Parse(format!("row {row:?} does not have {n} entries")));
        }
        a.push(r);
    }
    let mut d = None;
    let mut word: Vec<usize> = (0..n).collect();
    for line in lines {
        if let Some(rest) = line.strip_prefix("d:") {
            let v: Result<Vec<Q>, _> = rest.split_whitespace().map(parse_rational).collect();
            d = Some(v?);
        } else if let Some(rest) = line.strip_prefix("cox:") {
            word = one_based(&parse_list(rest)?, n)?;
        } else {
            return Err(RootError::Parse(format!("unexpected line {line:?}")));
        }
    }
    let cartan = match d {
        Some(d) => CartanMatrix::with_symmetrizer(a, d)?,
        None => CartanMatrix::new(a)?,
    };
    RootDatum::new(name, cartan, word)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn datum(name: &str) -> RootDatum {
        parse_named(name).unwrap()
    }

    #[test]
    fn classify_examples() {
        let a2 = CartanMatrix::new(vec![vec![2, -1], vec![-1, 2]]).unwrap();
        assert_eq!(classify(&a2), TypeTag::Finite);
        let a1t = CartanMatrix::new(vec![vec![2, -2], vec![-2, 2]]).unwrap();
        assert_eq!(classify(&a1t), TypeTag::Affine);
        let d = datum("A~1");
        assert_eq!(d.delta, Some(vec![1, 1]));
        assert_eq!(datum("A~3").delta, Some(vec![1, 1, 1, 1]));
        let h = CartanMatrix::new(vec![vec![2, -3], vec![-3, 2]]).unwrap();
        assert_eq!(classify(&h), TypeTag::Other);
    }

    #[test]
    fn presets_classify() {
        for name in ["A1", "A4", "B3", "C3", "D4", "D5", "E6", "E7", "E8", "F4", "G2"] {
            assert_eq!(datum(name).tag, TypeTag::Finite, "{name}");
        }
        let cases = [
            ("A~2", vec![1, 1, 1]),
            ("B~3", vec![1, 2, 2, 1]),
            ("C~2", vec![2, 1, 1]),
            ("D~4", vec![1, 2, 1, 1, 1]),
            ("F~4", vec![2, 3, 4, 2, 1]),
            ("G~2", vec![3, 2, 1]),
            ("E~6", vec![1, 2, 2, 3, 2, 1, 1]),
        ];
        for (name, delta) in cases {
            let d = datum(name);
            assert_eq!(d.tag, TypeTag::Affine, "{name}");
            assert_eq!(d.delta.as_ref().unwrap(), &delta, "{name}");
        }
        assert_eq!(datum("E~7").tag, TypeTag::Affine);
        assert_eq!(datum("E~8").tag, TypeTag::Affine);
    }

    #[test]
    fn reflections() {
        let d = datum("A2");
        for i in 0..2 {
            let s = d.simple_reflection(i);
            assert_eq!(linalg::mul_i(&s, &s), linalg::identity_i(2));
            let mut e = vec![0; 2];
            e[i] = 1;
            assert_eq!(d.reflection_of_root(&e).unwrap(), s);
        }
        let s1 = d.simple_reflection(0);
        let s2 = d.simple_reflection(1);
        let prod = linalg::mul_i(&linalg::mul_i(&s1, &s2), &s1);
        assert_eq!(d.reflection_of_root(&[1, 1]).unwrap(), prod);
    }

    #[test]
    fn root_counts() {
        assert_eq!(datum("A2").positive_real_roots_bounded(None).unwrap().len(), 3);
        assert_eq!(datum("A3").positive_real_roots_bounded(None).unwrap().len(), 6);
        assert_eq!(datum("B3").positive_real_roots_bounded(None).unwrap().len(), 9);
        assert_eq!(datum("F4").positive_real_roots_bounded(None).unwrap().len(), 24);
        assert_eq!(datum("E8").positive_real_roots_bounded(None).unwrap().len(), 120);
        let a1t = datum("A~1");
        let r = a1t.positive_real_roots_bounded(Some(&[2, 2])).unwrap();
        assert_eq!(r, vec![vec![1, 0], vec![0, 1], vec![2, 1], vec![1, 2]]);
    }

    #[test]
    fn e_form_properties() {
        for name in ["A3", "B3", "G2", "F4", "A~3:outer=1,3", "D~4", "F~4", "C~2", "G~2"] {
            let d = datum(name);
            let bound = d.delta.as_ref().map(|v| v.iter().map(|x| 2 * x).collect::<Vec<_>>());
            let roots = d.positive_real_roots_bounded(bound.as_deref()).unwrap();
            for b in &roots {
                assert_eq!(d.ec_coroot(b, b).unwrap(), Q::one(), "{name} {b:?}");
                assert_eq!(d.ec_inv_coroot(b, b).unwrap(), Q::one(), "{name} {b:?}");
            }
            let n = d.n();
            for i in 0..n {
                for j in 0..n {
                    assert_eq!(d.ec[i][j] + d.ec[j][i], d.k[i][j]);
                }
            }
            if let Some(delta) = &d.delta {
                assert!(d.ec_inv_form(delta, delta).is_zero());
            }
        }
    }

    #[test]
    fn euler_form_and_coxeter_transformation() {
        // E_{c^{-1}}(x, y) = -E_{c^{-1}}(y, c x)
        for name in ["A3", "D4", "A~3:outer=1,3", "D~4", "F~4"] {
            let d = datum(name);
            let n = d.n();
            for i in 0..n {
                for j in 0..n {
                    let mut x = vec![0; n];
                    x[i] = 1;
                    let mut y = vec![0; n];
                    y[j] = 1;
                    let cx = d.apply_c(&x);
                    assert_eq!(d.ec_inv_form(&x, &y), -d.ec_inv_form(&y, &cx), "{name}");
                }
            }
        }
    }

    #[test]
    fn k_is_invariant() {
        let d = datum("F~4");
        let n = d.n();
        for g in 0..n {
            let s = d.simple_reflection(g);
            for i in 0..n {
                for j in 0..n {
                    let mut x = vec![0; n];
                    x[i] = 1;
                    let mut y = vec![0; n];
                    y[j] = 1;
                    let sx = linalg::apply_i(&s, &x);
                    let sy = linalg::apply_i(&s, &y);
                    assert_eq!(d.k_form(&sx, &sy), d.k_form(&x, &y));
                }
            }
        }
    }

    #[test]
    fn classify_is_permutation_invariant() {
        let d = datum("D~4");
        for perm in (0..5).permutations(5).take(40) {
            let c = d.cartan.permuted(&perm).unwrap();
            assert_eq!(classify(&c), TypeTag::Affine);
        }
    }

    #[test]
    fn annulus_word_matches() {
        let w = annulus_coxeter_word(4, &[1, 3]).unwrap();
        assert_eq!(affine_word_window(4, &w), annulus_coxeter_window(4, &[1, 3]));
        assert_eq!(annulus_coxeter_window(4, &[1, 3]), vec![3, 0, 5, 2]);
    }

    #[test]
    fn horizontal_is_c_stable() {
        let d = datum("A~3:outer=1,3");
        let delta = d.delta.clone().unwrap();
        let bound: Vec<i64> = delta.iter().map(|x| 3 * x).collect();
        for b in d.positive_real_roots_bounded(Some(&bound)).unwrap() {
            let cb = d.apply_c(&b);
            assert_eq!(d.is_horizontal(&b).unwrap(), d.is_horizontal(&cb).unwrap());
        }
        assert!(d.is_horizontal(&delta).unwrap());
    }

    #[test]
    fn cartan_file() {
        let text = "3\n2 -1 0\n-1 2 -2\n0 -1 2\ncox: 3 1 2\n";
        let d = parse_cartan_file(text, "file").unwrap();
        assert_eq!(d.tag, TypeTag::Finite);
        assert_eq!(d.cox_word, vec![2, 0, 1]);
        assert!(parse_cartan_file("2\n2 1\n1 2\n", "bad").is_err());
        assert!(parse_cartan_file("2\n2 -1\n", "bad").is_err());
    }
}
