//! Small exact linear algebra over `Ratio<i64>` and `i64`.

use num_rational::Ratio;
use num_traits::{One, Zero};

pub type Q = Ratio<i64>;
pub type QMat = Vec<Vec<Q>>;
pub type IMat = Vec<Vec<i64>>;

pub fn q(n: i64) -> Q {
    Q::from_integer(n)
}

pub fn to_q(m: &IMat) -> QMat {
    m.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()
}

pub fn identity_i(n: usize) -> IMat {
    (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect()
}

pub fn identity_q(n: usize) -> QMat {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect())
        .collect()
}

pub fn mul_i(a: &IMat, b: &IMat) -> IMat {
    let n = a.len();
    let m = b[0].len();
    let k = b.len();
    let mut out = vec![vec![0i64; m]; n];
    for i in 0..n {
        for l in 0..k {
            let x = a[i][l];
            if x == 0 {
                continue;
            }
            for j in 0..m {
                out[i][j] += x * b[l][j];
            }
        }
    }
    out
}

pub fn mul_q(a: &QMat, b: &QMat) -> QMat {
    let n = a.len();
    let m = b[0].len();
    let k = b.len();
    let mut out = vec![vec![Q::zero(); m]; n];
    for i in 0..n {
        for l in 0..k {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..m {
                out[i][j] += a[i][l] * b[l][j];
            }
        }
    }
    out
}

pub fn apply_i(m: &IMat, v: &[i64]) -> Vec<i64> {
    m.iter()
        .map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

pub fn apply_q(m: &QMat, v: &[Q]) -> Vec<Q> {
    m.iter()
        .map(|r| r.iter().zip(v).fold(Q::zero(), |s, (a, b)| s + a * b))
        .collect()
}

pub fn transpose<T: Clone>(m: &[Vec<T>]) -> Vec<Vec<T>> {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len())
        .map(|j| m.iter().map(|r| r[j].clone()).collect())
        .collect()
}

/// Bilinear form `x^T m y`.
pub fn form(m: &QMat, x: &[Q], y: &[Q]) -> Q {
    let my = apply_q(m, y);
    x.iter().zip(&my).fold(Q::zero(), |s, (a, b)| s + a * b)
}

pub fn form_i(m: &QMat, x: &[i64], y: &[i64]) -> Q {
    let xs: Vec<Q> = x.iter().map(|&v| q(v)).collect();
    let ys: Vec<Q> = y.iter().map(|&v| q(v)).collect();
    form(m, &xs, &ys)
}

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref(m: &mut QMat) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c];
                for j in 0..cols {
                    let t = m[r][j] * f;
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &QMat) -> usize {
    let mut a = m.clone();
    rref(&mut a).len()
}

pub fn det(m: &QMat) -> Q {
    let n = m.len();
    let mut a = m.clone();
    let mut d = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Q::zero();
        };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= a[c][c];
        let inv = a[c][c].recip();
        for i in c + 1..n {
            if !a[i][c].is_zero() {
                let f = a[i][c] * inv;
                for j in c..n {
                    let t = a[c][j] * f;
                    a[i][j] -= t;
                }
            }
        }
    }
    d
}

pub fn inverse(m: &QMat) -> Option<QMat> {
    let n = m.len();
    let mut aug: QMat = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            row
        })
        .collect();
    let piv = rref(&mut aug);
    if piv.len() < n || piv[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Basis of the right kernel.
pub fn kernel(m: &QMat) -> Vec<Vec<Q>> {
    if m.is_empty() {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut a = m.clone();
    let piv = rref(&mut a);
    let free: Vec<usize> = (0..cols).filter(|c| !piv.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Q::zero(); cols];
            v[f] = Q::one();
            for (r, &p) in piv.iter().enumerate() {
                v[p] = -a[r][f];
            }
            v
        })
        .collect()
}

/// Some solution of `m x = b`, if one exists.
pub fn solve(m: &QMat, b: &[Q]) -> Option<Vec<Q>> {
    let cols = m[0].len();
    let mut aug: QMat = m
        .iter()
        .zip(b)
        .map(|(r, &x)| {
            let mut row = r.clone();
            row.push(x);
            row
        })
        .collect();
    let piv = rref(&mut aug);
    if piv.contains(&cols) {
        return None;
    }
    let mut x = vec![Q::zero(); cols];
    for (r, &p) in piv.iter().enumerate() {
        x[p] = aug[r][cols];
    }
    Some(x)
}

/// Scale a rational vector to the primitive integer vector on the same ray.
pub fn primitive(v: &[Q]) -> Vec<i64> {
    let l = v.iter().fold(1i64, |acc, x| num_integer::lcm(acc, *x.denom()));
    let ints: Vec<i64> = v.iter().map(|x| (x * l).to_integer()).collect();
    let g = ints.iter().fold(0i64, |acc, &x| num_integer::gcd(acc, x));
    if g == 0 {
        return ints;
    }
    ints.into_iter().map(|x| x / g).collect()
}

pub fn principal_minor(m: &QMat, idx: &[usize]) -> QMat {
    idx.iter()
        .map(|&i| idx.iter().map(|&j| m[i][j]).collect())
        .collect()
}

pub fn is_positive_definite(m: &QMat) -> bool {
    (1..=m.len()).all(|k| {
        let idx: Vec<usize> = (0..k).collect();
        det(&principal_minor(m, &idx)) > Q::zero()
    })
}
