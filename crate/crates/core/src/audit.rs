//! Programmatic acceptance criteria and per-model verification suites.

use std::collections::BTreeMap;

use rand::Rng;

use crate::complex::BigradedComplex;
use crate::connection::{is_graded_automorphism, EquivariantConnection};
use crate::degree::{self, Degree};
use crate::error::Result;
use crate::favb;
use crate::graded::{
    is_vector_bundle, rees_cokernel, rees_module, recover_multifiltration, split_iso, GradedModule,
};
use crate::matrix::Matrix;
use crate::models::{self, ModelDescriptor};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub id: String,
    pub title: String,
    pub checks: usize,
    pub failures: Vec<String>,
    pub notes: Vec<String>,
}

impl Outcome {
    fn new(id: impl Into<String>, title: impl Into<String>) -> Self {
        Outcome {
            id: id.into(),
            title: title.into(),
            checks: 0,
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.checks > 0
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn check_result<T>(&mut self, r: Result<T>, what: &str) -> Option<T> {
        self.checks += 1;
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.failures.push(format!("{what}: {e}"));
                None
            }
        }
    }

    pub fn line(&self) -> String {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        let mut s = format!("{status} {} {} ({} checks)", self.id, self.title, self.checks);
        if let Some(f) = self.failures.first() {
            s.push_str(&format!(": {f}"));
            if self.failures.len() > 1 {
                s.push_str(&format!(" (+{} more)", self.failures.len() - 1));
            }
        }
        s
    }
}

/// Seed of instance `i` of criterion `c`.
pub fn seed_for(c: u64, i: u64) -> u64 {
    models::base_seed().wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (c << 32) ^ i
}

fn generic_point(n: usize) -> Vec<Scalar> {
    [2, 3, 5, 7, 11].iter().take(n).map(|&x| Scalar::from(x)).collect()
}

/// Piece dims, multiplication ranks and corner images agree on the union window.
pub fn modules_agree(a: &GradedModule, b: &GradedModule) -> bool {
    if a.n() != b.n() {
        return false;
    }
    let w = a.window().union(b.window());
    let (a, b) = (a.extend_to(&w), b.extend_to(&w));
    a.same_invariants(&b) && a.corner_images() == b.corner_images()
}

pub fn criterion_1() -> Outcome {
    let mut o = Outcome::new("1", "splittability dichotomy");
    let v = models::three_lines();
    o.check(!v.is_splittable(), || "three lines reported splittable".into());
    o.check(v.d_total() == 3 && v.dim() == 2, || format!("three lines: sum D = {}, dim = {}", v.d_total(), v.dim()));
    let m = rees_module(&v);
    if let Some(f) = o.check_result(m.module().fiber(&[Scalar::zero(), Scalar::zero(), Scalar::zero()]), "fiber at 0") {
        o.check(f.dim == 3, || format!("three lines: fiber at 0 is {}", f.dim));
    }
    if let Some(f) = o.check_result(m.module().fiber(&generic_point(3)), "generic fiber") {
        o.check(f.dim == 2, || format!("three lines: generic fiber is {}", f.dim));
    }
    for i in 0..200 {
        let mut r = models::rng(seed_for(1, i));
        let n = r.gen_range(1..=2);
        let dim = r.gen_range(1..=4);
        let v = models::random_multifiltration_with(&mut r, n, dim, (-2, 2));
        o.check(v.is_splittable(), || format!("instance {i}: n = {n} space not splittable"));
        let iso = v.compute_splitting().and_then(|s| split_iso(&v, &s));
        o.check_result(iso, &format!("instance {i}: split iso"));
    }
    let mut split = 0;
    for i in 0..100 {
        let mut r = models::rng(seed_for(101, i));
        let dim = r.gen_range(2..=3);
        let v = models::random_multifiltration_with(&mut r, 3, dim, (-1, 1));
        let c1 = v.d_total() == v.dim();
        let c2 = v.compute_splitting().and_then(|s| s.verify(&v)).is_ok();
        let Some(c3) = o.check_result(is_vector_bundle(&v), &format!("n = 3 instance {i}")) else { continue };
        o.check(c1 == c2 && c2 == c3, || format!("n = 3 instance {i}: conditions disagree ({c1}, {c2}, {c3})"));
        split += usize::from(c1);
    }
    o.check(split > 0 && split < 100, || format!("n = 3 sample is one-sided ({split} of 100 splittable)"));
    o.notes.push(format!("n = 3: {split} of 100 splittable"));
    o
}

pub fn criterion_2() -> Outcome {
    let mut o = Outcome::new("2", "kernel/cokernel exactness");
    let (mut strict, mut total) = (0, 0);
    for i in 0..100 {
        let mut r = models::rng(seed_for(2, i));
        let n = r.gen_range(1..=2);
        let f = models::random_filtered_map_with(&mut r, n, 5, (-1, 1));
        let Some(c) = o.check_result(rees_cokernel(&f), &format!("map {i}")) else { continue };
        let exact = c
            .coker
            .window()
            .iter()
            .all(|m| c.coker.dim(&m) == c.torsion.torsion_pieces.get(&m).copied().unwrap_or(0) + c.phi_target.dim(&m));
        o.check(exact, || format!("map {i}: dim coker != dim T + dim coker of spaces"));
        if let Some(s) = o.check_result(f.is_r_strict(n), &format!("map {i} strictness")) {
            o.check(s == c.torsion.is_zero, || format!("map {i}: {n}-strict = {s} but torsion zero = {}", c.torsion.is_zero));
            strict += usize::from(s);
            total += 1;
        }
        let (ker, inc) = match f.kernel_object() {
            Ok(k) => k,
            Err(e) => {
                o.check(false, || format!("map {i} kernel: {e}"));
                continue;
            }
        };
        let kernel = crate::graded::rees_kernel(&f);
        let from_ker = rees_module(&ker).module().clone();
        let dims_agree = kernel.window().iter().all(|m| kernel.dim(&m) == from_ker.dim(&m));
        o.check(dims_agree && inc.cols() == ker.dim(), || format!("map {i}: kernel of Rees map differs from Rees module of the kernel"));
    }
    o.check(strict > 0 && strict < total, || format!("strictness sample is one-sided ({strict} of {total})"));
    let f = models::two_lines_to_point();
    let per = f.is_r_strict(1).unwrap_or(false);
    let both = f.is_r_strict(2).unwrap_or(true);
    let codim = rees_cokernel(&f).map(|c| c.torsion.support_codim).unwrap_or(0);
    o.check(per && !both && codim == 2, || format!("two lines to a point: 1-strict {per}, 2-strict {both}, codim {codim}"));
    o.notes.push(format!("{strict} of {total} random maps strict"));
    o
}

pub fn criterion_3() -> Outcome {
    let mut o = Outcome::new("3", "restriction properties");
    for i in 0..100 {
        let mut r = models::rng(seed_for(3, i));
        let n = r.gen_range(1..=3);
        let dim = r.gen_range(1..=3);
        let v = models::random_multifiltration_with(&mut r, n, dim, (-1, 2));
        let h = rees_module(&v);
        let m = h.module();
        if let Some(f) = o.check_result(m.fiber(&generic_point(n)), &format!("instance {i}")) {
            o.check(f.dim == v.dim(), || format!("instance {i}: generic fiber {} != dim V {}", f.dim, v.dim()));
        }
        if let Some(g) = o.check_result(m.fiber_at_zero_graded(), &format!("instance {i}")) {
            let d: BTreeMap<Degree, usize> = v
                .d_table()
                .into_iter()
                .filter(|(_, x)| *x > 0)
                .map(|(p, x)| (degree::neg(&p), x))
                .collect();
            o.check(g == d, || format!("instance {i}: fiber at 0 differs from the D table"));
        }
        for size in 1..n {
            for dropped in degree::subsets_of_size(n, size) {
                let inverted = m.invert_variables(&dropped);
                let lower = rees_module(&v.drop_filtrations(&dropped));
                o.check(modules_agree(&inverted, lower.module()), || {
                    format!("instance {i}: restriction dropping {dropped:?} differs")
                });
            }
        }
    }
    o
}

fn e1_degree(t: &crate::complex::SpectralSequenceTable, r: usize, k: i64) -> BTreeMap<(i64, i64), usize> {
    t.page(r).iter().filter(|((p, q), _)| p + q == k).map(|(a, b)| (*a, *b)).collect()
}

pub fn criterion_4() -> Outcome {
    let mut o = Outcome::new("4", "model goldens");
    if let Some(x) = o.check_result(models::torus(1), "torus") {
        let t = x.spectral_sequence(1);
        o.check(x.betti() == vec![1, 2, 1], || format!("torus betti {:?}", x.betti()));
        o.check(e1_degree(&t, 1, 1) == BTreeMap::from([((0, 1), 1), ((1, 0), 1)]), || "torus E_1 in degree 1".into());
        o.check(t.degeneration_page == 1, || format!("torus degenerates at {}", t.degeneration_page));
        if let Some(r) = o.check_result(favb::favb(&x, 1), "torus favb") {
            o.check(r.line_bundle_type == vec![0, 1], || format!("torus favb type {:?}", r.line_bundle_type));
        }
        if let Some(tt) = o.check_result(favb::twistor_type(&x, 1), "torus twistor type") {
            o.check(tt == vec![1, 1], || format!("torus twistor type {tt:?}"));
        }
    }
    if let Some(x) = o.check_result(models::iwasawa(), "iwasawa") {
        let t = x.spectral_sequence(2);
        let b = x.betti();
        o.check(b[1] == 4, || format!("iwasawa b_1 = {}", b[1]));
        o.check(t.total(1, 1) == 5, || format!("iwasawa E_1 degree 1 total {}", t.total(1, 1)));
        o.check(t.total(2, 1) == 4, || format!("iwasawa E_2 degree 1 total {}", t.total(2, 1)));
        if let Some(r) = o.check_result(favb::favb(&x, 1), "iwasawa favb") {
            o.check(r.fiber_zero.graded == BTreeMap::from([(0, 2), (1, 2)]), || {
                format!("iwasawa fiber(0) {:?}", r.fiber_zero.graded)
            });
        }
        let torsion_degrees: Vec<i64> = (0..=x.max_degree())
            .filter(|&k| favb::base_change(&x, k).map(|b| !b.torsion_dims.is_empty()).unwrap_or(false))
            .collect();
        o.check(!torsion_degrees.is_empty(), || "iwasawa base change has no torsion".into());
        o.notes.push(format!("iwasawa Rees-complex torsion in degrees {torsion_degrees:?}"));
    }
    if let Some(x) = o.check_result(models::synthetic_d2(), "synthetic-d2") {
        let t = x.spectral_sequence(1);
        o.check(x.betti().iter().all(|&b| b == 0), || format!("synthetic-d2 betti {:?}", x.betti()));
        o.check(t.d_rank(2) > 0, || "synthetic-d2 has d_2 = 0".into());
        o.check(t.degeneration_page == 3, || format!("synthetic-d2 degenerates at {}", t.degeneration_page));
        let mut some_torsion = false;
        for k in 0..=x.max_degree() {
            o.check(favb::favb_module(&x, k).is_zero(), || format!("synthetic-d2 favb nonzero in degree {k}"));
            if let Some(c) = o.check_result(favb::rees_complex_cohomology_mod_torsion(&x, k), "synthetic-d2 rees cohomology") {
                o.check(c.quotient.is_zero(), || format!("synthetic-d2 quotient nonzero in degree {k}"));
                some_torsion |= !c.module.is_zero();
            }
        }
        o.check(some_torsion, || "synthetic-d2 Rees-complex cohomology vanishes".into());
    }
    o
}

pub fn builtin_models() -> Vec<(String, BigradedComplex)> {
    ["torus:g=1", "torus:g=2", "iwasawa", "synthetic-d2"]
        .iter()
        .map(|s| (s.to_string(), models::model(s).expect("built-in model")))
        .collect()
}

pub fn random_complexes(count: u64) -> Vec<(String, BigradedComplex)> {
    (0..count)
        .map(|i| {
            let mut r = models::rng(seed_for(5, i));
            let bound = r.gen_range(1..=3);
            let pieces = r.gen_range(2..=6);
            (format!("random complex {i}"), models::random_complex_with(&mut r, bound, pieces))
        })
        .collect()
}

fn base_change_suite(o: &mut Outcome, name: &str, x: &BigradedComplex) {
    for k in 0..=x.max_degree() {
        let Some(r) = o.check_result(favb::favb(x, k), &format!("{name} favb degree {k}")) else { continue };
        o.check(r.base_change.iso_verified, || format!("{name}: base change fails in degree {k}"));
        for f in &r.fiber_generic {
            o.check(f.dim == r.betti && f.twisted_dim == r.betti, || {
                format!("{name}: fiber at {} in degree {k} is {} (b = {})", f.label, f.dim, r.betti)
            });
        }
        o.check(r.fiber_zero.matches, || format!("{name}: fiber at 0 in degree {k} differs from E_inf"));
    }
}

pub fn criterion_5() -> Outcome {
    let mut o = Outcome::new("5", "base change and fiber contract");
    for (name, x) in builtin_models().iter().chain(random_complexes(50).iter()) {
        base_change_suite(&mut o, name, x);
    }
    o
}

pub fn theta_points() -> Vec<Scalar> {
    vec![Scalar::one(), Scalar::from(2), Scalar::i(), Scalar::gaussian(1, 1)]
}

pub fn criterion_6() -> Outcome {
    let mut o = Outcome::new("6", "theta intertwining");
    for (name, x) in builtin_models() {
        for h in theta_points() {
            o.check(x.theta_intertwine_check(&h), || format!("{name}: theta fails at h = {h}"));
        }
    }
    o
}

/// `K_{p,ij}` summed directly from the coefficients.
pub fn curvature_from_coefficients(c: &EquivariantConnection) -> BTreeMap<(Degree, usize, usize), Matrix> {
    let dim = c.dim();
    let mut out: BTreeMap<(Degree, usize, usize), Matrix> = BTreeMap::new();
    let mut add = |key: (Degree, usize, usize), m: Matrix| {
        let e = out.entry(key).or_insert_with(|| Matrix::zeros(dim, dim));
        *e = e.add(&m);
    };
    for i in 0..c.n() {
        for j in (i + 1)..c.n() {
            for ((p, l), a) in c.coeffs() {
                if *l == j {
                    add((p.clone(), i, j), a.scale(&Scalar::from(p[i])));
                }
                if *l == i {
                    add((p.clone(), i, j), a.scale(&Scalar::from(-p[j])));
                }
            }
            for ((q, l1), a) in c.coeffs() {
                for ((r, l2), b) in c.coeffs() {
                    if *l1 == i && *l2 == j {
                        let p = degree::add(q, r);
                        add((p, i, j), a.mul(b).sub(&b.mul(a)));
                    }
                }
            }
        }
    }
    out.retain(|_, m| !m.is_zero());
    out
}

pub fn criterion_7() -> Outcome {
    let mut o = Outcome::new("7", "flat connections");
    for i in 0..50 {
        let mut r = models::rng(seed_for(7, i));
        let n = r.gen_range(1..=2);
        let dim = r.gen_range(2..=3);
        let (c, h) = models::random_flat_connection(&mut r, n, dim, 2);
        let flat = c.is_flat().unwrap_or(false);
        o.check(flat, || format!("connection {i} not flat"));
        let Some(g) = o.check_result(c.trivialize_flat(), &format!("connection {i} trivialize")) else { continue };
        let back = c.gauge_transform(&g).map(|t| t.coeffs().is_empty()).unwrap_or(false);
        o.check(back, || format!("connection {i}: gauge does not flatten"));
        let hg = h.mul(&g);
        o.check(hg.is_constant() && is_graded_automorphism(c.grading(), &hg.coeff(&vec![0; n])), || {
            format!("connection {i}: h g is not a constant graded automorphism")
        });
    }
    let mut nonflat = 0;
    for i in 0..50 {
        let mut r = models::rng(seed_for(70, i));
        let dim = r.gen_range(2..=3);
        let (c, _) = models::random_flat_connection(&mut r, 2, dim, 2);
        let p = models::random_perturbation(&mut r, &c);
        let expected = !curvature_from_coefficients(&p).is_empty();
        if let Some(k) = o.check_result(p.curvature(), &format!("perturbation {i}")) {
            o.check(k.is_empty() != expected, || format!("perturbation {i}: curvature disagrees with the coefficient formula"));
            o.check(k == curvature_from_coefficients(&p), || format!("perturbation {i}: curvature coefficients differ"));
            nonflat += usize::from(expected);
        }
    }
    o.check(nonflat > 0, || "no perturbation produced curvature".into());
    o.notes.push(format!("{nonflat} of 50 perturbations curved"));
    o
}

pub fn criterion_8() -> Outcome {
    let mut o = Outcome::new("8", "favb2 and purity");
    if let Some(r) = o.check_result(models::torus(1).and_then(|x| favb::favb2(&x, 1)), "torus favb2") {
        o.check(r.purity.dims == BTreeMap::from([((1, 0), 1), ((0, 1), 1)]), || format!("torus D {:?}", r.purity.dims));
        o.check(r.purity.total == 2 && r.purity.pure, || "torus H^1 not pure of total 2".into());
    }
    if let Some(r) = o.check_result(models::iwasawa().and_then(|x| favb::favb2(&x, 1)), "iwasawa favb2") {
        o.check(r.purity.total == 4 && r.purity.dims.keys().all(|(p, q)| p + q == 1), || {
            format!("iwasawa D {:?}", r.purity.dims)
        });
    }
    for (name, x) in builtin_models().into_iter().filter(|(_, x)| x.has_real_structure()) {
        for k in 0..=x.max_degree() {
            if let Some(r) = o.check_result(favb::favb2(&x, k), &format!("{name} favb2 degree {k}")) {
                o.check(r.slice_hodge && r.slice_conjugate, || format!("{name}: slices differ in degree {k}"));
                o.check(r.fiber_matches_purity, || format!("{name}: fiber at origin differs from D in degree {k}"));
            }
        }
    }
    o
}

pub fn criterion_9() -> Outcome {
    let mut o = Outcome::new("9", "round trip");
    for i in 0..100 {
        let mut r = models::rng(seed_for(9, i));
        let n = r.gen_range(1..=2);
        let dim = r.gen_range(1..=4);
        let v = models::random_multifiltration_with(&mut r, n, dim, (-2, 2));
        if let Some(back) = o.check_result(recover_multifiltration(rees_module(&v).module()), &format!("instance {i}")) {
            o.check(back == v, || format!("instance {i}: recovered filtrations differ"));
        }
    }
    o
}

pub fn criteria() -> Vec<Outcome> {
    vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(),
    ]
}

/// Every suite that applies to a single double complex.
pub fn verify_model(desc: &ModelDescriptor) -> Outcome {
    let mut o = Outcome::new(desc.label(), "model suite");
    let Some(x) = o.check_result(desc.instantiate(), "instantiate") else { return o };
    let t = x.spectral_sequence(1);
    let betti = x.betti();
    for k in 0..=x.max_degree() {
        o.check(x.check_convergence_with(&t, k), || format!("E_inf differs from gr H in degree {k}"));
        o.check(t.e_infinity.iter().filter(|((p, q), _)| p + q == k).map(|(_, d)| d).sum::<usize>() == betti[k as usize], || {
            format!("E_inf total differs from b_{k}")
        });
        for r in 1..t.pages.len() {
            o.check(t.total(r + 1, k) <= t.total(r, k), || format!("page {} grows in degree {k}", r + 1));
        }
    }
    base_change_suite(&mut o, &desc.label(), &x);
    for h in theta_points() {
        o.check(x.theta_intertwine_check(&h), || format!("theta fails at h = {h}"));
    }
    if x.has_real_structure() {
        for k in 0..=x.max_degree() {
            if let Some(r) = o.check_result(favb::favb2(&x, k), &format!("favb2 degree {k}")) {
                o.check(r.verified(), || format!("favb2 verification fails in degree {k}"));
            }
            if let Some(tt) = o.check_result(favb::twistor_type(&x, k), &format!("twistor type degree {k}")) {
                o.check(tt.len() == betti[k as usize], || format!("twistor type rank differs in degree {k}"));
            }
        }
    }
    o
}

pub fn verify_all(model: Option<&ModelDescriptor>) -> Vec<Outcome> {
    match model {
        Some(d) => vec![verify_model(d)],
        None => {
            let mut out = criteria();
            out.extend(
                ["torus:g=1", "torus:g=2", "iwasawa", "synthetic-d2"]
                    .iter()
                    .map(|s| verify_model(&ModelDescriptor::parse(s).expect("built-in"))),
            );
            out
        }
    }
}
