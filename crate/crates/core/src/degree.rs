//! Multi-indices in `Z^n` and finite boxes of them.

use serde::{Deserialize, Serialize};

pub type Degree = Vec<i64>;

/// Closed box `[lo, hi] ⊂ Z^n`. An `n = 0` box holds the single empty degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DegreeBox {
    pub lo: Degree,
    pub hi: Degree,
}

impl DegreeBox {
    pub fn new(lo: Degree, hi: Degree) -> Self {
        assert_eq!(lo.len(), hi.len(), "box corner length mismatch");
        assert!(lo.iter().zip(&hi).all(|(a, b)| a <= b), "empty box {lo:?}..{hi:?}");
        DegreeBox { lo, hi }
    }

    pub fn cube(n: usize, lo: i64, hi: i64) -> Self {
        DegreeBox::new(vec![lo; n], vec![hi; n])
    }

    pub fn n(&self) -> usize {
        self.lo.len()
    }

    pub fn extent(&self, i: usize) -> usize {
        (self.hi[i] - self.lo[i] + 1) as usize
    }

    pub fn len(&self) -> usize {
        (0..self.n()).map(|i| self.extent(i)).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, m: &[i64]) -> bool {
        m.len() == self.n() && m.iter().enumerate().all(|(i, &v)| self.lo[i] <= v && v <= self.hi[i])
    }

    pub fn covers(&self, other: &DegreeBox) -> bool {
        self.contains(&other.lo) && self.contains(&other.hi)
    }

    pub fn clamp(&self, m: &[i64]) -> Degree {
        m.iter()
            .enumerate()
            .map(|(i, &v)| v.clamp(self.lo[i], self.hi[i]))
            .collect()
    }

    /// Row-major position of `m` (last coordinate fastest).
    pub fn index_of(&self, m: &[i64]) -> usize {
        debug_assert!(self.contains(m), "{m:?} outside {self:?}");
        let mut idx = 0;
        for i in 0..self.n() {
            idx = idx * self.extent(i) + (m[i] - self.lo[i]) as usize;
        }
        idx
    }

    pub fn degree_at(&self, mut idx: usize) -> Degree {
        let mut m = vec![0; self.n()];
        for i in (0..self.n()).rev() {
            let e = self.extent(i);
            m[i] = self.lo[i] + (idx % e) as i64;
            idx /= e;
        }
        m
    }

    pub fn iter(&self) -> impl Iterator<Item = Degree> + '_ {
        (0..self.len()).map(move |k| self.degree_at(k))
    }

    pub fn union(&self, other: &DegreeBox) -> DegreeBox {
        assert_eq!(self.n(), other.n());
        DegreeBox::new(
            self.lo.iter().zip(&other.lo).map(|(a, b)| *a.min(b)).collect(),
            self.hi.iter().zip(&other.hi).map(|(a, b)| *a.max(b)).collect(),
        )
    }

    pub fn expand(&self, by: i64) -> DegreeBox {
        DegreeBox::new(
            self.lo.iter().map(|v| v - by).collect(),
            self.hi.iter().map(|v| v + by).collect(),
        )
    }

    /// Drops the coordinates listed in `dropped`.
    pub fn without(&self, dropped: &[usize]) -> DegreeBox {
        let keep: Vec<usize> = (0..self.n()).filter(|i| !dropped.contains(i)).collect();
        DegreeBox::new(
            keep.iter().map(|&i| self.lo[i]).collect(),
            keep.iter().map(|&i| self.hi[i]).collect(),
        )
    }

    pub fn negate(&self) -> DegreeBox {
        DegreeBox::new(
            self.hi.iter().map(|v| -v).collect(),
            self.lo.iter().map(|v| -v).collect(),
        )
    }
}

pub fn unit(n: usize, i: usize) -> Degree {
    let mut e = vec![0; n];
    e[i] = 1;
    e
}

pub fn add(a: &[i64], b: &[i64]) -> Degree {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[i64], b: &[i64]) -> Degree {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn neg(a: &[i64]) -> Degree {
    a.iter().map(|x| -x).collect()
}

pub fn shift(a: &[i64], i: usize, by: i64) -> Degree {
    let mut m = a.to_vec();
    m[i] += by;
    m
}

/// All `k`-element subsets of `0..n` in lexicographic order.
pub fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for j in start..n {
            cur.push(j);
            rec(j + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_round_trip() {
        let b = DegreeBox::new(vec![-1, 2, 0], vec![1, 3, 2]);
        assert_eq!(b.len(), 18);
        for (k, m) in b.iter().enumerate() {
            assert_eq!(b.index_of(&m), k);
        }
    }

    #[test]
    fn zero_dimensional_box_has_one_point() {
        let b = DegreeBox::new(vec![], vec![]);
        assert_eq!(b.len(), 1);
        assert_eq!(b.iter().collect::<Vec<_>>(), vec![Vec::<i64>::new()]);
    }

    #[test]
    fn subsets() {
        assert_eq!(subsets_of_size(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(subsets_of_size(2, 0), vec![Vec::<usize>::new()]);
    }
}
