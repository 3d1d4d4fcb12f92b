use std::collections::BTreeMap;

use crate::degree::{self, Degree, DegreeBox};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::subspace::{Quotient, Subspace};

use super::filtration::Filtration;

/// A finite-dimensional space with `n` separated exhaustive descending filtrations.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiFilteredSpace {
    dim: usize,
    filtrations: Vec<Filtration>,
}

/// `D^p = F^p / Σ_i F^{p + e_i}` together with the quotient data.
#[derive(Clone, Debug)]
pub struct GradedPiece {
    pub degree: Degree,
    pub dim: usize,
    pub numerator: Subspace,
    pub denominator: Subspace,
    pub quotient: Quotient,
}

impl MultiFilteredSpace {
    pub fn new(dim: usize, filtrations: Vec<Filtration>) -> Result<Self> {
        for (i, f) in filtrations.iter().enumerate() {
            if f.dim() != dim {
                return Err(Error::InvalidFiltration(format!(
                    "filtration {} acts on k^{}, expected k^{dim}",
                    i + 1,
                    f.dim()
                )));
            }
        }
        Ok(MultiFilteredSpace { dim, filtrations })
    }

    pub fn n(&self) -> usize {
        self.filtrations.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn filtrations(&self) -> &[Filtration] {
        &self.filtrations
    }

    pub fn filtration(&self, i: usize) -> &Filtration {
        &self.filtrations[i]
    }

    /// Box `[first_i, last_i]` of jump indices; `D^p` vanishes outside it.
    pub fn jump_box(&self) -> DegreeBox {
        let (lo, hi): (Vec<i64>, Vec<i64>) = self
            .filtrations
            .iter()
            .map(|f| f.jump_range().unwrap_or((0, 0)))
            .unzip();
        DegreeBox::new(lo, hi)
    }

    /// The jump box extended by one on each side; all `p`-indexed data is
    /// constant outside it along each axis.
    pub fn window(&self) -> DegreeBox {
        self.jump_box().expand(1)
    }

    /// `F^p = F_1^{p_1} ∩ ... ∩ F_n^{p_n}`.
    pub fn f_intersection(&self, p: &[i64]) -> Subspace {
        assert_eq!(p.len(), self.n(), "multi-index length mismatch");
        let mut acc = Subspace::full(self.dim);
        for (f, &pi) in self.filtrations.iter().zip(p) {
            if acc.is_zero() {
                break;
            }
            acc = acc.intersect(&f.at(pi)).expect("same ambient");
        }
        acc
    }

    pub fn graded_piece_d(&self, p: &[i64]) -> GradedPiece {
        let numerator = self.f_intersection(p);
        let mut denominator = Subspace::zero(self.dim);
        if !numerator.is_zero() {
            for i in 0..self.n() {
                let shifted = self.f_intersection(&degree::shift(p, i, 1));
                denominator = denominator.sum(&shifted).expect("same ambient");
            }
        }
        let quotient = numerator.quotient(&denominator).expect("shifted steps are contained");
        GradedPiece {
            degree: p.to_vec(),
            dim: quotient.dim,
            numerator,
            denominator,
            quotient,
        }
    }

    /// Nonzero `dim D^p`, keyed by `p`.
    pub fn d_table(&self) -> BTreeMap<Degree, usize> {
        self.jump_box()
            .iter()
            .filter_map(|p| {
                let d = self.graded_piece_d(&p).dim;
                (d > 0).then_some((p, d))
            })
            .collect()
    }

    pub fn d_total(&self) -> usize {
        self.d_table().values().sum()
    }

    /// Splittable iff `Σ_p dim D^p = dim V`.
    pub fn is_splittable(&self) -> bool {
        if self.dim == 0 {
            return true;
        }
        self.d_total() == self.dim
    }

    /// Lifts every `D^p` into `F^p`, visiting `p` in decreasing lexicographic
    /// order and taking the pivot-column complement each time.
    pub fn compute_splitting(&self) -> Result<Splitting> {
        let d_total = if self.dim == 0 { 0 } else { self.d_total() };
        if d_total != self.dim {
            return Err(Error::NotSplittable {
                d_total,
                dim: self.dim,
            });
        }
        let jb = self.jump_box();
        let mut degrees: Vec<Degree> = jb.iter().collect();
        degrees.reverse();
        let mut components = BTreeMap::new();
        for p in degrees {
            let piece = self.graded_piece_d(&p);
            if piece.dim == 0 {
                continue;
            }
            components.insert(p, Subspace::column_space(&piece.quotient.lift));
        }
        let s = Splitting {
            dim: self.dim,
            n: self.n(),
            components,
        };
        s.verify(self)?;
        Ok(s)
    }

    /// Keeps only the filtrations with the given indices, in that order.
    pub fn select(&self, keep: &[usize]) -> MultiFilteredSpace {
        MultiFilteredSpace {
            dim: self.dim,
            filtrations: keep.iter().map(|&i| self.filtrations[i].clone()).collect(),
        }
    }

    /// Drops the filtrations with the given indices.
    pub fn drop_filtrations(&self, dropped: &[usize]) -> MultiFilteredSpace {
        let keep: Vec<usize> = (0..self.n()).filter(|i| !dropped.contains(i)).collect();
        self.select(&keep)
    }

    /// Transports all filtrations along an invertible matrix.
    pub fn transform(&self, g: &Matrix) -> Result<MultiFilteredSpace> {
        if g.shape() != (self.dim, self.dim) || g.inverse().is_none() {
            return Err(Error::Shape("change of basis must be invertible".into()));
        }
        let filtrations = self
            .filtrations
            .iter()
            .map(|f| f.transform(g))
            .collect::<Result<Vec<_>>>()?;
        MultiFilteredSpace::new(self.dim, filtrations)
    }

    fn check_same_n(&self, other: &MultiFilteredSpace) -> Result<()> {
        if self.n() != other.n() {
            return Err(Error::FiltrationCountMismatch {
                left: self.n(),
                right: other.n(),
            });
        }
        Ok(())
    }

    /// Tensor product with `(F ⊗ F')^m = Σ_{p+q=m} F^p ⊗ F'^q` in each slot.
    pub fn tensor(&self, other: &MultiFilteredSpace) -> Result<MultiFilteredSpace> {
        self.check_same_n(other)?;
        let dim = self.dim * other.dim;
        let mut filtrations = Vec::with_capacity(self.n());
        for (f, g) in self.filtrations.iter().zip(&other.filtrations) {
            let (Some((fa, fb)), Some((ga, gb))) = (f.jump_range(), g.jump_range()) else {
                filtrations.push(Filtration::new(dim, vec![])?);
                continue;
            };
            let lo = fa + ga;
            let values = (lo..=fb + gb)
                .map(|m| {
                    let mut acc = Subspace::zero(dim);
                    for p in fa..=fb {
                        let piece = f.at(p).tensor(&g.at(m - p));
                        acc = acc.sum(&piece).expect("same ambient");
                    }
                    acc
                })
                .collect();
            filtrations.push(Filtration::from_values(dim, lo, values)?);
        }
        MultiFilteredSpace::new(dim, filtrations)
    }

    pub fn direct_sum(&self, other: &MultiFilteredSpace) -> Result<MultiFilteredSpace> {
        self.check_same_n(other)?;
        let dim = self.dim + other.dim;
        let mut filtrations = Vec::with_capacity(self.n());
        for (f, g) in self.filtrations.iter().zip(&other.filtrations) {
            let range = |h: &Filtration| h.jump_range().unwrap_or((0, 0));
            let (lo, hi) = {
                let (a, b) = range(f);
                let (c, d) = range(g);
                (a.min(c), b.max(d))
            };
            let values = (lo..=hi).map(|p| f.at(p).direct_sum(&g.at(p))).collect();
            filtrations.push(Filtration::from_values(dim, lo, values)?);
        }
        MultiFilteredSpace::new(dim, filtrations)
    }

    /// The one-dimensional object with jump `r_i` in filtration `i`.
    pub fn line(r: &[i64]) -> MultiFilteredSpace {
        MultiFilteredSpace {
            dim: 1,
            filtrations: r.iter().map(|&ri| Filtration::single_jump(1, ri)).collect(),
        }
    }
}

/// A decomposition `V = ⊕_p V^p` with `F_i^r = ⊕_{p_i >= r} V^p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Splitting {
    dim: usize,
    n: usize,
    components: BTreeMap<Degree, Subspace>,
}

impl Splitting {
    pub fn new(dim: usize, n: usize, components: BTreeMap<Degree, Subspace>) -> Result<Self> {
        for (p, s) in &components {
            if p.len() != n || s.ambient_dim() != dim {
                return Err(Error::InvalidSplitting(format!("component {p:?} has wrong shape")));
            }
        }
        let s = Splitting {
            dim,
            n,
            components: components.into_iter().filter(|(_, s)| !s.is_zero()).collect(),
        };
        s.check_direct()?;
        Ok(s)
    }

    pub fn components(&self) -> &BTreeMap<Degree, Subspace> {
        &self.components
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn check_direct(&self) -> Result<()> {
        let mut acc = Subspace::zero(self.dim);
        let mut total = 0;
        for s in self.components.values() {
            acc = acc.sum(s)?;
            total += s.dim();
        }
        if total != self.dim || acc.dim() != self.dim {
            return Err(Error::InvalidSplitting(format!(
                "components have total dim {total} and span dim {}, expected {}",
                acc.dim(),
                self.dim
            )));
        }
        Ok(())
    }

    /// Sum of the components whose degree satisfies `pred`.
    fn partial_sum(&self, pred: impl Fn(&Degree) -> bool) -> Subspace {
        self.components
            .iter()
            .filter(|(p, _)| pred(p))
            .fold(Subspace::zero(self.dim), |acc, (_, s)| acc.sum(s).expect("same ambient"))
    }

    /// Checks directness and that every `F_i^r` is the predicted partial sum.
    pub fn verify(&self, v: &MultiFilteredSpace) -> Result<()> {
        if v.dim() != self.dim || v.n() != self.n {
            return Err(Error::InvalidSplitting("splitting does not match the space".into()));
        }
        self.check_direct()?;
        let window = v.window();
        for i in 0..self.n {
            for r in window.lo[i]..=window.hi[i] {
                let expect = self.partial_sum(|p| p[i] >= r);
                if v.filtration(i).at(r) != expect {
                    return Err(Error::InvalidSplitting(format!(
                        "F_{}^{r} differs from the sum of components with p_{} >= {r}",
                        i + 1,
                        i + 1
                    )));
                }
            }
        }
        Ok(())
    }

    /// The multifiltered space induced by this decomposition.
    pub fn induced_space(&self) -> Result<MultiFilteredSpace> {
        let mut filtrations = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let (lo, hi) = self
                .components
                .keys()
                .map(|p| p[i])
                .fold((i64::MAX, i64::MIN), |(a, b), x| (a.min(x), b.max(x)));
            if self.components.is_empty() {
                filtrations.push(Filtration::new(self.dim, vec![])?);
                continue;
            }
            let values = (lo..=hi).map(|r| self.partial_sum(|p| p[i] >= r)).collect();
            filtrations.push(Filtration::from_values(self.dim, lo, values)?);
        }
        MultiFilteredSpace::new(self.dim, filtrations)
    }
}
