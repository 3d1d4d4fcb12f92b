use crate::degree::{self, DegreeBox};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::subspace::Subspace;

use super::filtration::Filtration;
use super::space::MultiFilteredSpace;

/// A linear map `V -> W` with `f(F_i^p) ⊆ G_i^p` for all `i, p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilteredMap {
    source: MultiFilteredSpace,
    target: MultiFilteredSpace,
    matrix: Matrix,
}

impl FilteredMap {
    pub fn new(source: MultiFilteredSpace, target: MultiFilteredSpace, matrix: Matrix) -> Result<Self> {
        if source.n() != target.n() {
            return Err(Error::FiltrationCountMismatch {
                left: source.n(),
                right: target.n(),
            });
        }
        if matrix.shape() != (target.dim(), source.dim()) {
            return Err(Error::Shape(format!(
                "map matrix is {}x{}, expected {}x{}",
                matrix.rows(),
                matrix.cols(),
                target.dim(),
                source.dim()
            )));
        }
        for i in 0..source.n() {
            for (p, s) in source.filtration(i).jumps() {
                if !target.filtration(i).at(*p).contains(&s.image(&matrix)?) {
                    return Err(Error::NotFiltered {
                        filtration: i + 1,
                        index: *p,
                    });
                }
            }
        }
        Ok(FilteredMap { source, target, matrix })
    }

    pub fn identity(v: &MultiFilteredSpace) -> FilteredMap {
        FilteredMap {
            source: v.clone(),
            target: v.clone(),
            matrix: Matrix::identity(v.dim()),
        }
    }

    pub fn source(&self) -> &MultiFilteredSpace {
        &self.source
    }

    pub fn target(&self) -> &MultiFilteredSpace {
        &self.target
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn n(&self) -> usize {
        self.source.n()
    }

    /// Union of the source and target windows.
    pub fn window(&self) -> DegreeBox {
        self.source.window().union(&self.target.window())
    }

    pub fn image(&self) -> Subspace {
        Subspace::column_space(&self.matrix)
    }

    /// `f(F_V^p)` for a full multi-index `p`.
    pub fn image_of_step(&self, p: &[i64]) -> Subspace {
        self.source.f_intersection(p).image(&self.matrix).expect("shape checked")
    }

    /// Checks `f(F_{i_1}^{p_1} ∩ ... ∩ F_{i_r}^{p_r}) = G_{i_1}^{p_1} ∩ ... ∩ G_{i_r}^{p_r} ∩ im f`
    /// for every `r`-subset of filtrations and every `p` in the window.
    pub fn is_r_strict(&self, r: usize) -> Result<bool> {
        let n = self.n();
        if r == 0 || r > n {
            return Err(Error::StrictnessRange { r, n });
        }
        let im = self.image();
        let window = self.window();
        for subset in degree::subsets_of_size(n, r) {
            let dropped: Vec<usize> = (0..n).filter(|i| !subset.contains(i)).collect();
            let src = self.source.select(&subset);
            let tgt = self.target.select(&subset);
            for p in window.without(&dropped).iter() {
                let lhs = src.f_intersection(&p).image(&self.matrix)?;
                let rhs = tgt.f_intersection(&p).intersect(&im)?;
                if lhs != rhs {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// `ker f` with the restricted filtrations, plus its inclusion `V <- ker f`.
    pub fn kernel_object(&self) -> Result<(MultiFilteredSpace, Matrix)> {
        let k = Subspace::kernel(&self.matrix);
        let filtrations = self
            .source
            .filtrations()
            .iter()
            .map(|f| f.restrict_to(&k))
            .collect::<Result<Vec<Filtration>>>()?;
        let inclusion = k.basis().transpose();
        Ok((MultiFilteredSpace::new(k.dim(), filtrations)?, inclusion))
    }

    /// `coker f` with the image filtrations `π(G_i^p)`, plus the projection `π`.
    pub fn cokernel_object(&self) -> Result<(MultiFilteredSpace, Matrix)> {
        let q = Subspace::full(self.target.dim()).quotient(&self.image())?;
        let filtrations = self
            .target
            .filtrations()
            .iter()
            .map(|f| f.image(&q.projection))
            .collect::<Result<Vec<Filtration>>>()?;
        Ok((MultiFilteredSpace::new(q.dim, filtrations)?, q.projection))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;

    fn line_space(r: i64) -> MultiFilteredSpace {
        MultiFilteredSpace::line(&[r])
    }

    #[test]
    fn rejects_non_filtered_matrix() {
        assert!(FilteredMap::new(line_space(0), line_space(1), Matrix::identity(1)).is_ok());
        assert!(FilteredMap::new(line_space(2), line_space(3), Matrix::identity(1)).is_ok());
        let err = FilteredMap::new(line_space(1), line_space(0), Matrix::identity(1)).unwrap_err();
        assert_eq!(err, Error::NotFiltered { filtration: 1, index: 1 });
    }

    #[test]
    fn strictness_of_identity_and_shift() {
        let id = FilteredMap::identity(&line_space(3));
        assert!(id.is_r_strict(1).unwrap());
        let f = FilteredMap::new(line_space(0), line_space(1), Matrix::identity(1)).unwrap();
        assert!(!f.is_r_strict(1).unwrap());
        assert_eq!(f.is_r_strict(2), Err(Error::StrictnessRange { r: 2, n: 1 }));
    }

    #[test]
    fn kernel_and_cokernel_of_zero_and_identity() {
        let v = line_space(0);
        let zero = FilteredMap::new(v.clone(), v.clone(), Matrix::zeros(1, 1)).unwrap();
        assert_eq!(zero.kernel_object().unwrap().0, v);
        assert_eq!(zero.cokernel_object().unwrap().0, v);
        let id = FilteredMap::identity(&v);
        assert_eq!(id.kernel_object().unwrap().0.dim(), 0);
        assert_eq!(id.cokernel_object().unwrap().0.dim(), 0);
    }

    #[test]
    fn projection_onto_a_line() {
        let s = |v: &[i64]| Subspace::span(v.len(), &[v.iter().map(|&x| Scalar::from(x)).collect()]);
        let f1 = Filtration::new(2, vec![(0, Subspace::full(2)), (1, s(&[1, 0]))]).unwrap();
        let v = MultiFilteredSpace::new(2, vec![f1]).unwrap();
        let w = line_space(0);
        let f = FilteredMap::new(v, w, Matrix::from_ints(&[&[0, 1]])).unwrap();
        let (k, inc) = f.kernel_object().unwrap();
        assert_eq!(k.dim(), 1);
        assert_eq!(inc.shape(), (2, 1));
        assert_eq!(k.filtration(0).jump_range(), Some((1, 1)));
        assert!(f.is_r_strict(1).unwrap());
    }
}
