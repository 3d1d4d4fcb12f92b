use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::subspace::Subspace;

/// A separated, exhaustive, descending filtration of `k^dim`.
///
/// Stored at its jump indices only: `(r, F^r)` is stored iff
/// `F^{r+1} ⊊ F^r`. Hence the smallest stored index carries the whole
/// space, the largest carries the last nonzero step, and for any `p`
/// the value `F^p` is the step at the smallest stored index `>= p`
/// (zero above the largest).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Filtration {
    dim: usize,
    jumps: Vec<(i64, Subspace)>,
}

impl Filtration {
    /// Builds a filtration from `(p, F^p)` samples, read with the same
    /// rule as the stored form. Samples may be redundant or include zero
    /// spaces; the result is normalized.
    pub fn new(dim: usize, mut steps: Vec<(i64, Subspace)>) -> Result<Self> {
        steps.sort_by_key(|(p, _)| *p);
        for w in steps.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidFiltration(format!("index {} listed twice", w[0].0)));
            }
        }
        for (p, s) in &steps {
            if s.ambient_dim() != dim {
                return Err(Error::InvalidFiltration(format!(
                    "step {p} lives in k^{}, expected k^{dim}",
                    s.ambient_dim()
                )));
            }
        }
        for w in steps.windows(2) {
            if !w[0].1.contains(&w[1].1) {
                return Err(Error::InvalidFiltration(format!(
                    "not descending: step {} is not contained in step {}",
                    w[1].0, w[0].0
                )));
            }
        }
        let mut jumps: Vec<(i64, Subspace)> = Vec::new();
        for (k, (p, s)) in steps.iter().enumerate() {
            if s.is_zero() {
                break;
            }
            let next_same = steps.get(k + 1).is_some_and(|(_, t)| t == s);
            if !next_same {
                jumps.push((*p, s.clone()));
            }
        }
        if let Some((p, s)) = jumps.first() {
            if !s.is_full() {
                return Err(Error::InvalidFiltration(format!(
                    "not exhaustive: lowest step {p} has dim {} < {dim}",
                    s.dim()
                )));
            }
        } else if dim > 0 {
            return Err(Error::InvalidFiltration(
                "not exhaustive: no nonzero step for a nonzero space".into(),
            ));
        }
        Ok(Filtration { dim, jumps })
    }

    /// From consecutive values `F^{lo}, F^{lo+1}, ...`; `F^p = V` below
    /// `lo` and `0` past the last value.
    pub fn from_values(dim: usize, lo: i64, values: Vec<Subspace>) -> Result<Self> {
        let mut steps = Vec::with_capacity(values.len() + 1);
        steps.push((lo - 1, Subspace::full(dim)));
        for (k, s) in values.into_iter().enumerate() {
            steps.push((lo + k as i64, s));
        }
        Filtration::new(dim, steps)
    }

    /// `F^p = V` for `p <= r`, zero above.
    pub fn single_jump(dim: usize, r: i64) -> Self {
        if dim == 0 {
            return Filtration { dim, jumps: vec![] };
        }
        Filtration {
            dim,
            jumps: vec![(r, Subspace::full(dim))],
        }
    }

    /// `F^p = span{ v_j : w_j >= p }` for a basis `v_j` with weights `w_j`.
    pub fn from_weighted_basis(dim: usize, basis: &[(Vec<Scalar>, i64)]) -> Result<Self> {
        if basis.is_empty() {
            return Filtration::new(dim, vec![]);
        }
        let lo = basis.iter().map(|(_, w)| *w).min().unwrap();
        let hi = basis.iter().map(|(_, w)| *w).max().unwrap();
        let values = (lo..=hi)
            .map(|p| {
                let vs: Vec<Vec<Scalar>> =
                    basis.iter().filter(|(_, w)| *w >= p).map(|(v, _)| v.clone()).collect();
                Subspace::span(dim, &vs)
            })
            .collect();
        let f = Filtration::from_values(dim, lo, values)?;
        if f.at(lo).dim() != dim {
            return Err(Error::InvalidFiltration("weighted vectors do not span the space".into()));
        }
        Ok(f)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn jumps(&self) -> &[(i64, Subspace)] {
        &self.jumps
    }

    /// `(first, last)` jump index.
    pub fn jump_range(&self) -> Option<(i64, i64)> {
        Some((self.jumps.first()?.0, self.jumps.last()?.0))
    }

    pub fn at(&self, p: i64) -> Subspace {
        match self.jumps.iter().find(|(r, _)| *r >= p) {
            Some((_, s)) => s.clone(),
            None => Subspace::zero(self.dim),
        }
    }

    /// `dim F^p / F^{p+1}` for each jump `p`.
    pub fn graded_dims(&self) -> Vec<(i64, usize)> {
        self.jumps
            .iter()
            .map(|(p, s)| (*p, s.dim() - self.at(p + 1).dim()))
            .collect()
    }

    /// Image under a linear map, `p -> m(F^p)`; exhaustive when `m` is onto.
    pub fn image(&self, m: &Matrix) -> Result<Filtration> {
        let target = m.rows();
        let steps = self
            .jumps
            .iter()
            .map(|(p, s)| Ok((*p, s.image(m)?)))
            .collect::<Result<Vec<_>>>()?;
        Filtration::new(target, steps)
    }

    /// Induced filtration on a subspace, in the subspace's basis coordinates.
    pub fn restrict_to(&self, sub: &Subspace) -> Result<Filtration> {
        let steps = self
            .jumps
            .iter()
            .map(|(p, s)| Ok((*p, sub.restrict(&s.intersect(sub)?)?)))
            .collect::<Result<Vec<_>>>()?;
        Filtration::new(sub.dim(), steps)
    }

    /// `F^p` shifted to `F^{p - by}` (jumps move up by `by`).
    pub fn shifted(&self, by: i64) -> Filtration {
        Filtration {
            dim: self.dim,
            jumps: self.jumps.iter().map(|(p, s)| (p + by, s.clone())).collect(),
        }
    }

    /// Applies an invertible change of basis `g` to every step.
    pub fn transform(&self, g: &Matrix) -> Result<Filtration> {
        self.image(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(xs: &[i64]) -> Subspace {
        Subspace::span(xs.len(), &[xs.iter().map(|&x| Scalar::from(x)).collect()])
    }

    #[test]
    fn normalizes_redundant_steps() {
        let f = Filtration::new(
            2,
            vec![
                (-3, Subspace::full(2)),
                (0, Subspace::full(2)),
                (1, line(&[1, 0])),
                (2, line(&[1, 0])),
                (3, Subspace::zero(2)),
            ],
        )
        .unwrap();
        assert_eq!(f.jumps().len(), 2);
        assert_eq!(f.jump_range(), Some((0, 2)));
        assert_eq!(f.at(-10), Subspace::full(2));
        assert_eq!(f.at(1), line(&[1, 0]));
        assert_eq!(f.at(2), line(&[1, 0]));
        assert_eq!(f.at(3), Subspace::zero(2));
    }

    #[test]
    fn rejects_non_descending_with_pair() {
        let err = Filtration::new(2, vec![(0, Subspace::full(2)), (1, line(&[1, 0])), (2, line(&[0, 1]))])
            .unwrap_err();
        assert_eq!(
            err,
            Error::InvalidFiltration("not descending: step 2 is not contained in step 1".into())
        );
    }

    #[test]
    fn rejects_non_exhaustive() {
        assert!(Filtration::new(2, vec![(0, line(&[1, 1]))]).is_err());
        assert!(Filtration::new(2, vec![]).is_err());
        assert!(Filtration::new(0, vec![]).is_ok());
    }

    #[test]
    fn weighted_basis() {
        let f = Filtration::from_weighted_basis(
            2,
            &[(vec![Scalar::from(1), Scalar::from(0)], 1), (vec![Scalar::from(0), Scalar::from(1)], 0)],
        )
        .unwrap();
        assert_eq!(f.graded_dims(), vec![(0, 1), (1, 1)]);
        assert_eq!(f.at(1), line(&[1, 0]));
    }

    #[test]
    fn single_jump() {
        let f = Filtration::single_jump(3, 4);
        assert_eq!(f.at(4).dim(), 3);
        assert_eq!(f.at(5).dim(), 0);
        assert_eq!(f.graded_dims(), vec![(4, 3)]);
    }
}
