//! Exact matrices acting on V* with a shared positive denominator.

use std::fmt;

use num_integer::Integer;
use num_traits::Zero;

use crate::linalg::{self, IMat, QMat, Q};

/// Matrix `num / den` on V*, normalized so that `den` is minimal and positive.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    n: usize,
    den: i64,
    num: Vec<i64>,
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.n {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.n {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.entry(i, j))?;
            }
        }
        write!(f, "]")
    }
}

impl GroupElement {
    pub fn identity(n: usize) -> Self {
        let mut num = vec![0; n * n];
        for i in 0..n {
            num[i * n + i] = 1;
        }
        GroupElement { n, den: 1, num }
    }

    fn normalized(n: usize, mut num: Vec<i64>, mut den: i64) -> Self {
        if den < 0 {
            den = -den;
            num.iter_mut().for_each(|x| *x = -*x);
        }
        let g = num.iter().fold(den, |acc, &x| acc.gcd(&x));
        if g > 1 {
            num.iter_mut().for_each(|x| *x /= g);
            den /= g;
        }
        GroupElement { n, den, num }
    }

    pub fn from_int(m: &IMat) -> Self {
        let n = m.len();
        GroupElement { n, den: 1, num: m.iter().flatten().copied().collect() }
    }

    pub fn from_q(m: &QMat) -> Self {
        let n = m.len();
        let den = m.iter().flatten().fold(1i64, |acc, x| acc.lcm(x.denom()));
        let num = m
            .iter()
            .flatten()
            .map(|x| (x * Q::from_integer(den)).to_integer())
            .collect();
        Self::normalized(n, num, den)
    }

    /// The V*-action of a Weyl element given by its V-matrix: inverse transpose.
    pub fn from_v_matrix(m: &IMat) -> Self {
        let inv = linalg::inverse(&linalg::to_q(m)).expect("invertible");
        Self::from_q(&linalg::transpose(&inv))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> Q {
        Q::new(self.num[i * self.n + j], self.den)
    }

    pub fn to_q(&self) -> QMat {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.entry(i, j)).collect())
            .collect()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.n;
        assert_eq!(n, other.n, "dimension mismatch");
        let mut num = vec![0i64; n * n];
        for i in 0..n {
            for l in 0..n {
                let a = self.num[i * n + l];
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    num[i * n + j] += a * other.num[l * n + j];
                }
            }
        }
        Self::normalized(n, num, self.den * other.den)
    }

    pub fn inverse(&self) -> Self {
        Self::from_q(&linalg::inverse(&self.to_q()).expect("invertible"))
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n)
    }

    pub fn apply(&self, v: &[Q]) -> Vec<Q> {
        linalg::apply_q(&self.to_q(), v)
    }

    /// `I + μ δ^T`: the translation `x ↦ x + ⟨x,δ⟩μ`.
    pub fn translation(mu: &[Q], delta: &[i64]) -> Self {
        let n = mu.len();
        let m: QMat = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let id = if i == j { Q::from_integer(1) } else { Q::zero() };
                        id + mu[i] * Q::from_integer(delta[j])
                    })
                    .collect()
            })
            .collect();
        Self::from_q(&m)
    }

    /// Returns `μ` if this element is `I + μ δ^T` with `⟨μ, δ⟩ = 0`.
    pub fn translation_vector(&self, delta: &[i64]) -> Option<Vec<Q>> {
        let n = self.n;
        let j0 = delta.iter().position(|&d| d != 0)?;
        let mu: Vec<Q> = (0..n)
            .map(|i| {
                let id = if i == j0 { Q::from_integer(1) } else { Q::zero() };
                (self.entry(i, j0) - id) / Q::from_integer(delta[j0])
            })
            .collect();
        let ok = (0..n).all(|i| {
            (0..n).all(|j| {
                let id = if i == j { Q::from_integer(1) } else { Q::zero() };
                self.entry(i, j) == id + mu[i] * Q::from_integer(delta[j])
            })
        });
        let level: Q = mu
            .iter()
            .zip(delta)
            .fold(Q::zero(), |s, (m, &d)| s + m * Q::from_integer(d));
        (ok && level.is_zero()).then_some(mu)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::q;

    #[test]
    fn translations_compose_additively() {
        let delta = [1, 1, 1];
        let a = GroupElement::translation(&[Q::new(1, 2), Q::new(-1, 2), q(0)], &delta);
        let b = GroupElement::translation(&[q(0), Q::new(1, 3), Q::new(-1, 3)], &delta);
        let ab = a.mul(&b);
        assert_eq!(ab, b.mul(&a));
        assert_eq!(
            ab.translation_vector(&delta).unwrap(),
            vec![Q::new(1, 2), Q::new(-1, 6), Q::new(-1, 3)]
        );
        assert!(a.mul(&a.inverse()).is_identity());
    }

    #[test]
    fn non_translation_detected() {
        let m = GroupElement::from_int(&vec![vec![0, 1], vec![1, 0]]);
        assert!(m.translation_vector(&[1, 1]).is_none());
        assert!(GroupElement::identity(2).translation_vector(&[1, 1]).is_some());
    }
}
