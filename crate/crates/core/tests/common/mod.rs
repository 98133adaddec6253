#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use ncgarside::chain_system::{shuffles, ChainSystem, Letter, Word};
use ncgarside::root_datum::RootDatum;
use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::Rng;

const LETTERS: [&str; 5] = ["a", "b", "c", "d", "e"];

fn letters(n: usize) -> Vec<Letter> {
    LETTERS[..n].iter().map(|s| Letter::new(s)).collect()
}

/// Shuffle of disjoint blocks of a random alphabet.
pub fn random_shuffle_system<R: Rng>(rng: &mut R) -> ChainSystem {
    let len = rng.gen_range(1..=4);
    let mut alpha = letters(5);
    alpha.shuffle(rng);
    alpha.truncate(len);
    let mut blocks: Vec<Word> = Vec::new();
    for l in alpha {
        match blocks.last_mut() {
            Some(b) if rng.gen_bool(0.4) => b.push(l),
            _ => blocks.push(vec![l]),
        }
    }
    let mut words: Vec<Word> = vec![Vec::new()];
    for b in &blocks {
        words = words.iter().flat_map(|w| shuffles(w, b)).collect();
    }
    ChainSystem::new(words)
}

/// A random set of equal-length words, kept only when it satisfies the axioms.
pub fn random_filtered_system<R: Rng>(rng: &mut R) -> Option<ChainSystem> {
    let alpha = letters(rng.gen_range(2..=5));
    let len = rng.gen_range(1..=alpha.len().min(4));
    let count = rng.gen_range(1..=6);
    let mut words = HashSet::new();
    for _ in 0..count {
        let mut a = alpha.clone();
        a.shuffle(rng);
        a.truncate(len);
        words.insert(a);
    }
    let c = ChainSystem::new(words);
    if c.check_axioms().passes() {
        Some(c)
    } else {
        None
    }
}

pub fn random_valid_system<R: Rng>(rng: &mut R) -> ChainSystem {
    if rng.gen_bool(0.5) {
        for _ in 0..50 {
            if let Some(c) = random_filtered_system(rng) {
                return c;
            }
        }
    }
    random_shuffle_system(rng)
}

fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    // restricted growth strings
    let mut out = Vec::new();
    let mut cur = vec![0usize; n];
    fn go(i: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for b in 0..=max + 1 {
            cur[i] = b;
            go(i + 1, max.max(b), cur, out);
        }
    }
    if n == 0 {
        return vec![vec![]];
    }
    go(1, 0, &mut cur, &mut out);
    out
}

fn noncrossing(p: &[usize]) -> bool {
    let n = p.len();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    if p[a] == p[c] && p[b] == p[d] && p[a] != p[b] {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Noncrossing partitions of `n` points on a circle.
pub fn nc_count_a(n: usize) -> usize {
    set_partitions(n).iter().filter(|p| noncrossing(p)).count()
}

/// Noncrossing partitions of `2n` points invariant under the half turn.
pub fn nc_count_b(n: usize) -> usize {
    set_partitions(2 * n)
        .iter()
        .filter(|p| {
            noncrossing(p) && {
                let m = 2 * n;
                let mut pairs = BTreeSet::new();
                for i in 0..m {
                    pairs.insert((p[i], p[(i + n) % m]));
                }
                let map: std::collections::BTreeMap<_, _> = pairs.iter().copied().collect();
                map.len() == pairs.len() && {
                    let img: BTreeSet<_> = map.values().collect();
                    img.len() == map.len()
                }
            }
        })
        .count()
}

/// `h^n n! / |W|`.
pub fn reduced_factorization_count(h: u64, n: u64, order: u64) -> u64 {
    let fact: u64 = (1..=n).product();
    h.pow(n as u32) * fact / order
}

fn rank_q(mut m: Vec<Vec<Ratio<i64>>>) -> usize {
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| m[i][c] != Ratio::from_integer(0)) else {
            continue;
        };
        m.swap(r, p);
        let piv = m[r][c];
        for i in 0..m.len() {
            if i != r && m[i][c] != Ratio::from_integer(0) {
                let f = m[i][c] / piv;
                for j in 0..cols {
                    let v = m[r][j];
                    m[i][j] -= f * v;
                }
            }
        }
        r += 1;
    }
    r
}

/// Hom and Ext dimensions between uniserial nilpotent representations of the cyclic quiver
/// `v -> v+1` on `r` vertices, `(b, k)` with top `b` and length `k`. Ext from the Euler form.
pub fn quiver_hom_ext(r: usize, (b, k): (usize, usize), (c, l): (usize, usize)) -> (usize, usize) {
    let mv = |i: usize| (b + i) % r;
    let nv = |j: usize| (c + j) % r;
    // unknowns: f(e_i) coefficient on e'_j for matching vertices
    let mut vars = Vec::new();
    for i in 0..k {
        for j in 0..l {
            if mv(i) == nv(j) {
                vars.push((i, j));
            }
        }
    }
    let idx = |i: usize, j: usize| vars.iter().position(|&v| v == (i, j));
    // f(a e_i) = a f(e_i) compared on each e'_j
    let mut rows = Vec::new();
    for i in 0..k {
        for j in 0..l {
            let mut row = vec![Ratio::from_integer(0); vars.len()];
            if i + 1 < k {
                if let Some(v) = idx(i + 1, j) {
                    row[v] += Ratio::from_integer(1);
                }
            }
            if j >= 1 {
                if let Some(v) = idx(i, j - 1) {
                    row[v] -= Ratio::from_integer(1);
                }
            }
            if row.iter().any(|x| *x != Ratio::from_integer(0)) {
                rows.push(row);
            }
        }
    }
    let hom = vars.len() - if rows.is_empty() { 0 } else { rank_q(rows) };
    let mut dm = vec![0i64; r];
    let mut dn = vec![0i64; r];
    for i in 0..k {
        dm[mv(i)] += 1;
    }
    for j in 0..l {
        dn[nv(j)] += 1;
    }
    let euler: i64 = (0..r).map(|v| dm[v] * dn[v] - dm[v] * dn[(v + 1) % r]).sum();
    let ext = hom as i64 - euler;
    assert!(ext >= 0);
    (hom, ext as usize)
}

/// Orbit sizes of `c` on real roots strictly inside the box `0 < β < δ`, keeping the
/// finite orbits.
pub fn horizontal_orbits(d: &RootDatum) -> Vec<usize> {
    let delta = d.delta.clone().expect("affine");
    let a = &d.cartan.a;
    let n = delta.len();
    let mut roots = Vec::new();
    let mut v = vec![0i64; n];
    loop {
        let mut i = 0;
        while i < n && v[i] == delta[i] {
            v[i] = 0;
            i += 1;
        }
        if i == n {
            break;
        }
        v[i] += 1;
        if v == delta {
            continue;
        }
        let q: i64 = (0..n).map(|i| (0..n).map(|j| v[i] * a[i][j] * v[j]).sum::<i64>()).sum();
        if q == 2 {
            roots.push(v.clone());
        }
    }
    let set: HashSet<Vec<i64>> = roots.iter().cloned().collect();
    let mut seen = HashSet::new();
    let mut sizes = Vec::new();
    for r in &roots {
        if seen.contains(r) {
            continue;
        }
        let mut orbit = vec![r.clone()];
        let mut x = d.apply_c(r);
        while &x != r && orbit.len() <= n * n {
            orbit.push(x.clone());
            x = d.apply_c(&x);
        }
        if &x == r && orbit.iter().all(|y| set.contains(y)) {
            sizes.push(orbit.len());
            seen.extend(orbit);
        }
    }
    sizes.sort();
    sizes
}
