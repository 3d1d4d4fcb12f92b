use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::multifilt::{Filtration, MultiFilteredSpace};

use super::rees::{rees_module, restrict_to_subtorus, ReesHandle};

/// The affine charts of `ξ_{P^n}(V)` built from `n + 1` filtrations.
#[derive(Clone, Debug)]
pub struct ProjectiveCharts {
    /// `charts[j]` omits filtration `j`.
    pub charts: Vec<ReesHandle>,
    /// `(j, k, agree)` for every pair of charts.
    pub overlaps: Vec<(usize, usize, bool)>,
}

impl ProjectiveCharts {
    pub fn all_overlaps_agree(&self) -> bool {
        self.overlaps.iter().all(|(_, _, ok)| *ok)
    }
}

pub fn projective_charts(v: &MultiFilteredSpace) -> Result<ProjectiveCharts> {
    let total = v.n();
    if total < 2 {
        return Err(Error::Shape("projective charts need at least two filtrations".into()));
    }
    let mut charts = Vec::with_capacity(total);
    for j in 0..total {
        let sub = v.drop_filtrations(&[j]);
        if !sub.is_splittable() {
            return Err(Error::NotChartSplittable {
                omitted: j + 1,
                subset: (0..total).filter(|&i| i != j).map(|i| i + 1).collect(),
            });
        }
        charts.push(rees_module(&sub));
    }
    let mut overlaps = Vec::new();
    for j in 0..total {
        for k in (j + 1)..total {
            let from_j = charts[j].module().invert_variables(&[k - 1]);
            let from_k = charts[k].module().invert_variables(&[j]);
            let expected = restrict_to_subtorus(v, &[j, k])?;
            let exp = expected.module().corner_images();
            let agree = from_j.window() == expected.window()
                && from_k.window() == expected.window()
                && from_j.corner_images() == exp
                && from_k.corner_images() == exp;
            overlaps.push((j, k, agree));
        }
    }
    Ok(ProjectiveCharts { charts, overlaps })
}

/// `h^0(E(t)) = Σ_{a+b=t} dim(F^{-a} ∩ G^{-b})` for the bundle on `P^1`
/// glued from two filtrations.
pub fn p1_sections(f: &Filtration, g: &Filtration, t: i64) -> usize {
    let (Some((_, f1)), Some((_, g1))) = (f.jump_range(), g.jump_range()) else {
        return 0;
    };
    let mut total = 0;
    for a in -f1..=(t + g1) {
        total += f.at(-a).intersect(&g.at(a - t)).expect("same ambient").dim();
    }
    total
}

/// Splitting type `{a_i}` with `E ≅ ⊕ O(a_i)` on `P^1`, sorted descending.
pub fn p1_splitting_type(f: &Filtration, g: &Filtration) -> Result<Vec<i64>> {
    if f.dim() != g.dim() {
        return Err(Error::AmbientMismatch {
            left: f.dim(),
            right: g.dim(),
        });
    }
    let dim = f.dim();
    let (Some((f0, f1)), Some((g0, g1))) = (f.jump_range(), g.jump_range()) else {
        return Ok(vec![]);
    };
    let (amin, amax) = (f0 + g0, f1 + g1);
    let h = |t: i64| p1_sections(f, g, t) as i64;
    // h(t) - h(t-1) counts the a_i >= -t
    let count = |t: i64| h(t) - h(t - 1);
    let mut multiplicities = BTreeMap::new();
    for t in (-amax)..=(-amin) {
        let c = count(t) - count(t - 1);
        if c < 0 {
            return Err(Error::Defect(format!("negative multiplicity at twist {t}")));
        }
        if c > 0 {
            multiplicities.insert(-t, c as usize);
        }
    }
    let mut out: Vec<i64> = multiplicities
        .iter()
        .flat_map(|(a, c)| std::iter::repeat(*a).take(*c))
        .collect();
    out.sort_unstable_by(|x, y| y.cmp(x));
    if out.len() != dim {
        return Err(Error::Defect(format!("splitting type has {} entries for rank {dim}", out.len())));
    }
    for t in (-amax - 2)..=(-amin + 2) {
        let predicted: i64 = out.iter().map(|a| (a + t + 1).max(0)).sum();
        if predicted != h(t) {
            return Err(Error::Defect(format!("h^0 mismatch at twist {t}")));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;
    use crate::subspace::Subspace;

    fn line(v: [i64; 2]) -> Subspace {
        Subspace::span(2, &[v.iter().map(|&x| Scalar::from(x)).collect()])
    }

    fn flag(l: Subspace) -> Filtration {
        Filtration::new(2, vec![(0, Subspace::full(2)), (1, l)]).unwrap()
    }

    #[test]
    fn transverse_weight_one_pair() {
        let f = flag(line([1, 0]));
        let g = flag(line([0, 1]));
        assert_eq!(p1_splitting_type(&f, &g).unwrap(), vec![1, 1]);
    }

    #[test]
    fn coincident_pair() {
        let f = flag(line([1, 1]));
        assert_eq!(p1_splitting_type(&f, &f.clone()).unwrap(), vec![2, 0]);
    }

    #[test]
    fn single_line() {
        let f = Filtration::single_jump(1, 3);
        let g = Filtration::single_jump(1, -5);
        assert_eq!(p1_splitting_type(&f, &g).unwrap(), vec![-2]);
    }

    #[test]
    fn charts_of_two_filtrations() {
        let v = MultiFilteredSpace::new(2, vec![flag(line([1, 0])), flag(line([0, 1]))]).unwrap();
        let c = projective_charts(&v).unwrap();
        assert_eq!(c.charts.len(), 2);
        assert!(c.all_overlaps_agree());
    }

    #[test]
    fn chart_containing_three_lines_is_rejected() {
        let fs = vec![
            flag(line([1, 0])),
            flag(line([0, 1])),
            flag(line([1, 1])),
            flag(line([1, 2])),
        ];
        let v = MultiFilteredSpace::new(2, fs).unwrap();
        assert!(matches!(projective_charts(&v), Err(Error::NotChartSplittable { omitted: 1, .. })));
        let three = MultiFilteredSpace::new(2, vec![flag(line([1, 0])), flag(line([0, 1])), flag(line([1, 1]))]).unwrap();
        let c = projective_charts(&three).unwrap();
        assert_eq!(c.charts.len(), 3);
        assert!(c.all_overlaps_agree());
    }
}
