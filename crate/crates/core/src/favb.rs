//! The approximating vector bundle of a double complex: the Rees module of
//! the Hodge filtration on `H^k`, its fibers, and the base-change comparison
//! with the cohomology of the Rees complex.

use std::collections::BTreeMap;

use crate::complex::{Bidegree, BigradedComplex};
use crate::degree::{Degree, DegreeBox};
use crate::error::{Error, Result};
use crate::graded::{p1_splitting_type, rees_module, GradedModule, TorsionReport};
use crate::matrix::Matrix;
use crate::multifilt::{Filtration, MultiFilteredSpace};
use crate::scalar::Scalar;
use crate::subspace::Subspace;

/// One-variable window `[-bound-1, 0]` used for every degree of `X`.
pub fn favb_window(x: &BigradedComplex) -> DegreeBox {
    DegreeBox::new(vec![-x.bound() - 1], vec![0])
}

/// `A^k` in split coordinates: the generator for a basis vector of
/// `C^{p,q}` sits in degree `-p` and `d_z = z ∂ + ∂̄`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReesComplexTerm {
    pub degree: i64,
    pub generator_degrees: Vec<i64>,
    /// Coefficient of `z` in `d_z`, i.e. `∂`.
    pub z_part: Matrix,
    /// Constant coefficient of `d_z`, i.e. `∂̄`.
    pub constant_part: Matrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReesComplex {
    pub window: DegreeBox,
    pub terms: BTreeMap<i64, ReesComplexTerm>,
}

pub fn rees_complex(x: &BigradedComplex, degrees: std::ops::RangeInclusive<i64>) -> ReesComplex {
    let one = Scalar::one();
    let zero = Scalar::zero();
    let terms = degrees
        .map(|k| {
            let generator_degrees = x
                .blocks(k)
                .into_iter()
                .flat_map(|(p, _)| std::iter::repeat(-p).take(x.dim((p, k - p))))
                .collect();
            let term = ReesComplexTerm {
                degree: k,
                generator_degrees,
                z_part: x.total_differential_with(k, &one, &zero),
                constant_part: x.total_differential_with(k, &zero, &one),
            };
            (k, term)
        })
        .collect();
    ReesComplex {
        window: favb_window(x),
        terms,
    }
}

impl ReesComplex {
    pub fn term(&self, k: i64) -> Option<&ReesComplexTerm> {
        self.terms.get(&k)
    }

    /// Coordinates of `A^k_m`: generators of degree `<= m`, each multiplied
    /// by the matching power of `z`.
    pub fn piece(&self, k: i64, m: i64) -> Subspace {
        match self.term(k) {
            Some(t) => Subspace::coordinate(
                t.generator_degrees.len(),
                t.generator_degrees.iter().enumerate().filter(|(_, &g)| g <= m).map(|(i, _)| i),
            ),
            None => Subspace::zero(0),
        }
    }

    /// `d_z` on `A^k_m` in the coordinates of [`Self::piece`].
    pub fn differential(&self, k: i64) -> Option<Matrix> {
        self.term(k).map(|t| t.z_part.add(&t.constant_part))
    }

    /// `d_z` specialised at `z = h`.
    pub fn evaluate(&self, k: i64, h: &Scalar) -> Option<Matrix> {
        self.term(k).map(|t| t.z_part.scale(h).add(&t.constant_part))
    }

    /// `d_z ∘ d_z = 0` coefficientwise in `z`.
    pub fn is_complex(&self) -> bool {
        self.terms.iter().all(|(k, t)| {
            let Some(next) = self.term(k + 1) else { return true };
            let (a, b, c, d) = (&next.z_part, &next.constant_part, &t.z_part, &t.constant_part);
            a.mul(c).is_zero() && a.mul(d).add(&b.mul(c)).is_zero() && b.mul(d).is_zero()
        })
    }

    /// `d_z` carries `A^k_m` into `A^{k+1}_m` for every `m` in the window.
    pub fn is_graded(&self) -> bool {
        self.terms.iter().all(|(&k, t)| {
            let Some(next) = self.term(k + 1) else { return true };
            let d = t.z_part.add(&t.constant_part);
            self.window.iter().all(|m| {
                let shifted = Subspace::coordinate(
                    next.generator_degrees.len(),
                    next.generator_degrees.iter().enumerate().filter(|(_, &g)| g <= m[0]).map(|(i, _)| i),
                );
                shifted.contains(&self.piece(k, m[0]).image(&d).expect("shapes agree"))
            })
        })
    }
}

/// `H^k(A_•, d_z)`, its torsion and its torsion-free quotient.
#[derive(Clone, Debug)]
pub struct ReesComplexCohomology {
    pub module: GradedModule,
    pub torsion: TorsionReport,
    pub quotient: GradedModule,
}

pub fn rees_complex_cohomology(x: &BigradedComplex, k: i64) -> Result<GradedModule> {
    let rc = rees_complex(x, (k - 1)..=k);
    let n = x.total_dim(k);
    let d_out = x.total_differential(k);
    let d_in = rc.differential(k - 1).expect("term present");
    let cycles = Subspace::kernel(&d_out);
    GradedModule::from_quotients(
        rc.window.clone(),
        |m| rc.piece(k, m[0]).intersect(&cycles).expect("same ambient"),
        |m| {
            if d_in.cols() == 0 {
                Subspace::zero(n)
            } else {
                rc.piece(k - 1, m[0]).image(&d_in).expect("shapes agree")
            }
        },
    )
}

pub fn rees_complex_cohomology_mod_torsion(x: &BigradedComplex, k: i64) -> Result<ReesComplexCohomology> {
    let module = rees_complex_cohomology(x, k)?;
    let torsion = TorsionReport::of(&module);
    let quotient = module.torsion_free_quotient();
    Ok(ReesComplexCohomology {
        module,
        torsion,
        quotient,
    })
}

/// `ξ(H^k, F)` on the window [`favb_window`].
pub fn favb_module(x: &BigradedComplex, k: i64) -> GradedModule {
    filtration_module(&x.hodge_filtration(k), &favb_window(x))
}

fn filtration_module(f: &Filtration, window: &DegreeBox) -> GradedModule {
    let v = MultiFilteredSpace::new(f.dim(), vec![f.clone()]).expect("one filtration");
    let h = rees_module(&v);
    if h.window() == window {
        h.module().clone()
    } else {
        h.with_window(window).expect("window covers the jumps").module().clone()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseChange {
    pub rees_complex_cohomology_dims: BTreeMap<i64, usize>,
    pub torsion_dims: BTreeMap<i64, usize>,
    pub quotient_dims: BTreeMap<i64, usize>,
    pub torsion_support_codim: usize,
    /// Piece dims and multiplication ranks agree.
    pub invariants_match: bool,
    /// The corner images of the quotient are the Hodge filtration steps.
    pub subspaces_match: bool,
    pub iso_verified: bool,
}

fn one_var(d: BTreeMap<Degree, usize>) -> BTreeMap<i64, usize> {
    d.into_iter().filter(|(_, v)| *v > 0).map(|(m, v)| (m[0], v)).collect()
}

pub fn base_change(x: &BigradedComplex, k: i64) -> Result<BaseChange> {
    let rc = rees_complex_cohomology_mod_torsion(x, k)?;
    let target = favb_module(x, k);
    let f = x.hodge_filtration(k);
    let invariants_match = rc.quotient.same_invariants(&target);
    let subspaces_match = rc.quotient.corner_dim() == f.dim()
        && rc
            .quotient
            .corner_images()
            .iter()
            .all(|(m, s)| *s == f.at(-m[0]));
    Ok(BaseChange {
        rees_complex_cohomology_dims: one_var(rc.module.piece_dims()),
        torsion_dims: one_var(rc.torsion.torsion_pieces.clone()),
        quotient_dims: one_var(rc.quotient.piece_dims()),
        torsion_support_codim: rc.torsion.support_codim,
        invariants_match,
        subspaces_match,
        iso_verified: invariants_match && subspaces_match,
    })
}

pub fn verify_base_change(x: &BigradedComplex, k: i64) -> bool {
    base_change(x, k).map(|b| b.iso_verified).unwrap_or(false)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenericFiber {
    pub label: String,
    pub point: Scalar,
    pub dim: usize,
    /// `dim H^k(h ∂ + ∂̄)`, identified with `H^k` through `θ_h`.
    pub twisted_dim: usize,
    pub theta_intertwines: bool,
    pub matches: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZeroFiber {
    /// `p ↦` dimension of the fiber in degree `-p`.
    pub graded: BTreeMap<i64, usize>,
    /// `p ↦ dim E_∞^{p, k-p}`.
    pub e_infinity: BTreeMap<i64, usize>,
    pub total: usize,
    pub matches: bool,
}

#[derive(Clone, Debug)]
pub struct FAVBReport {
    pub k: i64,
    pub betti: usize,
    pub module: GradedModule,
    pub piece_dims: BTreeMap<i64, usize>,
    /// `O(a)` summands, ascending.
    pub line_bundle_type: Vec<i64>,
    pub fiber_generic: Vec<GenericFiber>,
    pub fiber_zero: ZeroFiber,
    pub base_change: BaseChange,
}

impl FAVBReport {
    pub fn verified(&self) -> bool {
        self.fiber_generic.iter().all(|f| f.matches) && self.fiber_zero.matches && self.base_change.iso_verified
    }
}

pub fn generic_sample_points() -> Vec<(String, Scalar)> {
    vec![
        ("1".into(), Scalar::one()),
        ("2".into(), Scalar::from(2)),
        ("i".into(), Scalar::i()),
    ]
}

pub fn favb(x: &BigradedComplex, k: i64) -> Result<FAVBReport> {
    let module = favb_module(x, k);
    let hodge = x.hodge_filtration(k);
    let betti = hodge.dim();
    let mut fiber_generic = Vec::new();
    for (label, h) in generic_sample_points() {
        let dim = module.fiber(&[h.clone()])?.dim;
        let twisted_dim = x.twisted_cohomology(&h, k).dim;
        let theta_intertwines = x.theta_intertwine_check(&h);
        fiber_generic.push(GenericFiber {
            label,
            point: h,
            dim,
            twisted_dim,
            theta_intertwines,
            matches: dim == betti && twisted_dim == betti && theta_intertwines,
        });
    }
    let zero = module.fiber(&[Scalar::zero()])?;
    let graded: BTreeMap<i64, usize> = zero
        .graded
        .unwrap_or_default()
        .into_iter()
        .map(|(m, d)| (-m[0], d))
        .collect();
    let table = x.spectral_sequence(1);
    let e_infinity: BTreeMap<i64, usize> = table
        .e_infinity
        .iter()
        .filter(|((p, q), _)| p + q == k)
        .map(|((p, _), d)| (*p, *d))
        .collect();
    let fiber_zero = ZeroFiber {
        total: zero.dim,
        matches: graded == e_infinity && zero.dim == betti,
        graded,
        e_infinity,
    };
    let line_bundle_type = hodge
        .graded_dims()
        .into_iter()
        .flat_map(|(p, d)| std::iter::repeat(p).take(d))
        .collect();
    Ok(FAVBReport {
        k,
        betti,
        piece_dims: one_var(module.piece_dims()),
        module,
        line_bundle_type,
        fiber_generic,
        fiber_zero,
        base_change: base_change(x, k)?,
    })
}

/// Dimensions of `D^{p,q} = (F^p ∩ F̄^q) / (F^{p+1} ∩ F̄^q + F^p ∩ F̄^{q+1})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PurityReport {
    pub k: i64,
    pub dims: BTreeMap<Bidegree, usize>,
    pub total: usize,
    pub betti: usize,
    pub pure: bool,
}

#[derive(Clone, Debug)]
pub struct Favb2Report {
    pub k: i64,
    pub space: MultiFilteredSpace,
    pub module: GradedModule,
    pub purity: PurityReport,
    /// Graded fiber at the origin, keyed by `(p, q)`.
    pub fiber_zero: BTreeMap<Bidegree, usize>,
    pub fiber_matches_purity: bool,
    /// Inverting the second variable gives the favb module.
    pub slice_hodge: bool,
    /// Inverting the first variable gives the conjugate favb module.
    pub slice_conjugate: bool,
}

impl Favb2Report {
    pub fn verified(&self) -> bool {
        self.fiber_matches_purity && self.slice_hodge && self.slice_conjugate
    }
}

/// `(H^k, F, F̄)`.
pub fn hodge_pair(x: &BigradedComplex, k: i64) -> Result<MultiFilteredSpace> {
    let f = x.hodge_filtration(k);
    let fbar = x.conjugate_filtration(k)?;
    MultiFilteredSpace::new(f.dim(), vec![f, fbar])
}

fn slice_matches(sliced: &GradedModule, f: &Filtration, window: &DegreeBox) -> bool {
    let expected = filtration_module(f, window);
    let sliced = sliced.extend_to(&window.union(sliced.window()));
    sliced.same_invariants(&expected)
        && window
            .iter()
            .all(|m| sliced.corner_images().get(&m).map_or(f.at(-m[0]).is_zero(), |s| *s == f.at(-m[0])))
}

pub fn favb2(x: &BigradedComplex, k: i64) -> Result<Favb2Report> {
    if !x.has_real_structure() {
        return Err(Error::NoRealStructure);
    }
    let space = hodge_pair(x, k)?;
    let window = DegreeBox::cube(2, -x.bound() - 1, 0);
    let module = rees_module(&space)
        .with_window(&window)
        .expect("window covers the jumps")
        .module()
        .clone();
    let dims: BTreeMap<Bidegree, usize> = space
        .d_table()
        .into_iter()
        .filter(|(_, d)| *d > 0)
        .map(|(p, d)| ((p[0], p[1]), d))
        .collect();
    let total = dims.values().sum();
    let purity = PurityReport {
        k,
        pure: total == space.dim() && dims.keys().all(|(p, q)| p + q == k),
        dims,
        total,
        betti: space.dim(),
    };
    let fiber_zero: BTreeMap<Bidegree, usize> = module
        .fiber_at_zero_graded()?
        .into_iter()
        .map(|(m, d)| ((-m[0], -m[1]), d))
        .collect();
    let one = DegreeBox::new(vec![-x.bound() - 1], vec![0]);
    let slice_hodge = slice_matches(&module.invert_variables(&[1]), space.filtration(0), &one);
    let slice_conjugate = slice_matches(&module.invert_variables(&[0]), space.filtration(1), &one);
    Ok(Favb2Report {
        k,
        fiber_matches_purity: fiber_zero == purity.dims,
        space,
        module,
        purity,
        fiber_zero,
        slice_hodge,
        slice_conjugate,
    })
}

/// Splitting type of the bundle on `P^1` glued from `F` and `F̄` on `H^k`.
pub fn twistor_type(x: &BigradedComplex, k: i64) -> Result<Vec<i64>> {
    if !x.has_real_structure() {
        return Err(Error::NoRealStructure);
    }
    let f = x.hodge_filtration(k);
    let fbar = x.conjugate_filtration(k)?;
    p1_splitting_type(&f, &fbar)
}
