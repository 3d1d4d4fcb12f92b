//! Command reports: a JSON result body inside the [`Report`] envelope.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::complex::{Bidegree, BigradedComplex};
use crate::connection::EquivariantConnection;
use crate::degree::{Degree, DegreeBox};
use crate::error::{Error, Result};
use crate::favb::{self, FAVBReport};
use crate::graded::{
    is_vector_bundle, p1_sections, p1_splitting_type, projective_charts, rees_cokernel, rees_module, split_iso,
};
use crate::io::Report;
use crate::models;
use crate::multifilt::{FilteredMap, MultiFilteredSpace};
use crate::scalar::Scalar;

pub fn degree_dims(d: &BTreeMap<Degree, usize>) -> Value {
    Value::Array(
        d.iter()
            .filter(|(_, v)| **v > 0)
            .map(|(m, v)| json!({"degree": m, "dim": v}))
            .collect(),
    )
}

fn int_dims(d: &BTreeMap<i64, usize>, key: &str) -> Value {
    Value::Array(d.iter().map(|(m, v)| json!({key: m, "dim": v})).collect())
}

pub fn bidegree_dims(d: &BTreeMap<Bidegree, usize>) -> Value {
    Value::Array(d.iter().map(|((p, q), v)| json!({"p": p, "q": q, "dim": v})).collect())
}

fn finish(command: &str, input: &str, outcome: Result<Value>, partial: Value) -> Report {
    match outcome {
        Ok(v) => Report::ok(command, input, v),
        Err(e) => Report::failed(command, input, &e, partial),
    }
}

pub fn split(v: &MultiFilteredSpace, input: &str) -> Report {
    let d = v.d_table();
    let body = json!({
        "dim": v.dim(),
        "n": v.n(),
        "d_table": degree_dims(&d),
        "d_total": v.d_total(),
        "splittable": v.is_splittable(),
    });
    let outcome = (|| {
        let s = v.compute_splitting()?;
        let iso = split_iso(v, &s)?;
        let mut out = body.clone();
        out["splitting"] = Value::Array(
            s.components()
                .iter()
                .map(|(p, sub)| json!({"degree": p, "dim": sub.dim(), "basis": sub.basis_vectors()}))
                .collect(),
        );
        out["twists"] = Value::Array(iso.twists.iter().map(|(p, d)| json!({"degree": p, "dim": d})).collect());
        out["verified"] = json!(true);
        Ok(out)
    })();
    finish("split", input, outcome, body)
}

pub fn parse_point(s: &str) -> Result<Vec<Scalar>> {
    s.split(',').map(|t| t.trim().parse::<Scalar>()).collect()
}

/// `lo..hi` with comma-separated corners, e.g. `-2,-2..0,0`.
pub fn parse_window(s: &str) -> Result<DegreeBox> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| Error::Parse(format!("window {s:?} is not lo..hi")))?;
    let ints = |t: &str| -> Result<Degree> {
        t.split(',')
            .map(|x| x.trim().parse::<i64>().map_err(|_| Error::Parse(format!("window entry {x:?} is not an integer"))))
            .collect()
    };
    let (lo, hi) = (ints(lo)?, ints(hi)?);
    if lo.len() != hi.len() || lo.iter().zip(&hi).any(|(a, b)| a > b) {
        return Err(Error::Parse(format!("window {s:?} needs corners of equal length with lo <= hi")));
    }
    Ok(DegreeBox::new(lo, hi))
}

pub fn rees(v: &MultiFilteredSpace, input: &str, fiber: Option<&[Scalar]>, window: Option<&DegreeBox>) -> Report {
    let outcome = (|| {
        let h = rees_module(v);
        let h = match window {
            Some(w) => {
                if w.n() != v.n() {
                    return Err(Error::Shape(format!("window has {} coordinates, space has {} filtrations", w.n(), v.n())));
                }
                h.with_window(w)?
            }
            None => h,
        };
        let m = h.module();
        let zero = m.fiber(&vec![Scalar::zero(); v.n()])?;
        let generic = m.fiber(&vec![Scalar::one(); v.n()])?;
        let mut out = json!({
            "dim": v.dim(),
            "n": v.n(),
            "window": {"lo": m.window().lo, "hi": m.window().hi},
            "piece_dims": degree_dims(&m.piece_dims()),
            "torsion_free": m.is_torsion_free(),
            "fiber_zero": {"dim": zero.dim, "graded": degree_dims(&zero.graded.unwrap_or_default())},
            "fiber_generic": generic.dim,
            "vector_bundle": is_vector_bundle(v)?,
            "d_total": v.d_total(),
        });
        if let Some(a) = fiber {
            if a.len() != v.n() {
                return Err(Error::Shape(format!("point has {} coordinates, space has {} filtrations", a.len(), v.n())));
            }
            let f = m.fiber(a)?;
            out["fiber"] = json!({"point": a, "dim": f.dim, "via_orbit": m.fiber_via_orbit(a)?});
        }
        Ok(out)
    })();
    finish("rees", input, outcome, json!({}))
}

pub fn fiber(v: &MultiFilteredSpace, input: &str, point: &[Scalar]) -> Report {
    let outcome = (|| {
        if point.len() != v.n() {
            return Err(Error::Shape(format!("point has {} coordinates, space has {} filtrations", point.len(), v.n())));
        }
        let m = rees_module(v);
        let f = m.module().fiber(point)?;
        Ok(json!({
            "point": point,
            "dim": f.dim,
            "graded": f.graded.as_ref().map(degree_dims),
            "via_orbit": m.module().fiber_via_orbit(point)?,
            "dim_v": v.dim(),
        }))
    })();
    finish("fiber", input, outcome, json!({}))
}

pub fn strict(f: &FilteredMap, input: &str, r: usize) -> Report {
    let outcome = (|| {
        let s = f.is_r_strict(r)?;
        let c = rees_cokernel(f)?;
        Ok(json!({
            "r": r,
            "n": f.n(),
            "strict": s,
            "torsion_support_codim": c.torsion.support_codim,
            "codim_exceeds_r": c.torsion.support_codim > r,
        }))
    })();
    finish("strict", input, outcome, json!({}))
}

pub fn coker(f: &FilteredMap, input: &str) -> Report {
    let outcome = (|| {
        let c = rees_cokernel(f)?;
        Ok(json!({
            "n": f.n(),
            "coker_dims": degree_dims(&c.coker.piece_dims()),
            "torsion_dims": degree_dims(&c.torsion.torsion_pieces),
            "torsion_zero": c.torsion.is_zero,
            "torsion_support_codim": c.torsion.support_codim,
            "coker_of_spaces_dims": degree_dims(&c.phi_target.piece_dims()),
            "phi_kernel_dims": degree_dims(&c.phi_kernel_dims),
            "coker_rees_dims": degree_dims(&c.coker_rees.piece_dims()),
            "image_filtrations_compatible": c.image_filtrations_compatible,
            "n_strict": f.is_r_strict(f.n())?,
        }))
    })();
    finish("coker", input, outcome, json!({}))
}

pub fn charts(v: &MultiFilteredSpace, input: &str) -> Report {
    let outcome = (|| {
        let c = projective_charts(v)?;
        Ok(json!({
            "n": v.n(),
            "charts": c.charts.iter().enumerate().map(|(j, h)| json!({
                "omitted": j + 1,
                "piece_dims": degree_dims(&h.module().piece_dims()),
            })).collect::<Vec<_>>(),
            "overlaps": c.overlaps.iter().map(|(j, k, ok)| json!({"charts": [j + 1, k + 1], "agree": ok})).collect::<Vec<_>>(),
            "all_overlaps_agree": c.all_overlaps_agree(),
        }))
    })();
    finish("charts", input, outcome, json!({}))
}

pub fn p1type(v: &MultiFilteredSpace, input: &str) -> Report {
    let outcome = (|| {
        if v.n() != 2 {
            return Err(Error::FiltrationCountMismatch { left: v.n(), right: 2 });
        }
        let (f, g) = (v.filtration(0), v.filtration(1));
        let t = p1_splitting_type(f, g)?;
        let lo = t.last().map_or(0, |a| -a - 1);
        let hi = t.first().map_or(0, |a| -a + 1);
        Ok(json!({
            "splitting_type": t,
            "sections": (lo..=hi).map(|s| json!({"twist": s, "h0": p1_sections(f, g, s)})).collect::<Vec<_>>(),
            "degree": t.iter().sum::<i64>(),
        }))
    })();
    finish("p1type", input, outcome, json!({}))
}

pub fn connection(c: &EquivariantConnection, input: &str, flatten: bool) -> Report {
    let violations = c.violations();
    let body = json!({"n": c.n(), "dim": c.dim(), "violations": violations});
    let outcome = (|| {
        let k = c.curvature()?;
        let mut out = body.clone();
        out["flat"] = json!(k.is_empty());
        out["curvature"] = Value::Array(
            k.iter()
                .map(|((p, i, j), m)| json!({"degree": p, "i": i + 1, "j": j + 1, "matrix": crate::io::MatrixDoc::from_matrix(m)}))
                .collect(),
        );
        if flatten {
            let g = c.trivialize_flat()?;
            out["gauge"] = Value::Array(
                g.terms()
                    .iter()
                    .map(|(p, m)| json!({"degree": p, "matrix": crate::io::MatrixDoc::from_matrix(m)}))
                    .collect(),
            );
        }
        Ok(out)
    })();
    finish("connection", input, outcome, body)
}

pub fn specseq(x: &BigradedComplex, input: &str, rmax: usize) -> Report {
    let t = x.spectral_sequence(rmax);
    let pages: Vec<Value> = t
        .pages
        .iter()
        .enumerate()
        .map(|(r, dims)| {
            json!({
                "r": r + 1,
                "dims": bidegree_dims(dims),
                "d_rank": t.d_rank(r + 1),
                "totals": (0..=x.max_degree()).map(|k| t.total(r + 1, k)).collect::<Vec<_>>(),
            })
        })
        .collect();
    let body = json!({
        "bound": x.bound(),
        "betti": x.betti(),
        "pages": pages,
        "e_infinity": bidegree_dims(&t.e_infinity),
        "degeneration_page": t.degeneration_page,
        "degeneration_by_degree": t.degeneration_by_degree.iter().map(|(k, r)| json!({"k": k, "page": r})).collect::<Vec<_>>(),
        "converges": (0..=x.max_degree()).all(|k| x.check_convergence_with(&t, k)),
    });
    Report::ok("specseq", input, body)
}

pub fn favb_value(r: &FAVBReport) -> Value {
    json!({
        "k": r.k,
        "betti": r.betti,
        "piece_dims": int_dims(&r.piece_dims, "degree"),
        "line_bundle_type": r.line_bundle_type,
        "fiber_generic": r.fiber_generic.iter().map(|f| json!({
            "label": f.label,
            "point": f.point,
            "dim": f.dim,
            "twisted_dim": f.twisted_dim,
            "theta_intertwines": f.theta_intertwines,
            "matches": f.matches,
        })).collect::<Vec<_>>(),
        "fiber_zero": {
            "graded": int_dims(&r.fiber_zero.graded, "p"),
            "e_infinity": int_dims(&r.fiber_zero.e_infinity, "p"),
            "total": r.fiber_zero.total,
            "matches": r.fiber_zero.matches,
        },
        "base_change": {
            "rees_complex_cohomology_dims": int_dims(&r.base_change.rees_complex_cohomology_dims, "degree"),
            "torsion_dims": int_dims(&r.base_change.torsion_dims, "degree"),
            "quotient_dims": int_dims(&r.base_change.quotient_dims, "degree"),
            "torsion_support_codim": r.base_change.torsion_support_codim,
            "invariants_match": r.base_change.invariants_match,
            "subspaces_match": r.base_change.subspaces_match,
            "iso_verified": r.base_change.iso_verified,
        },
        "verified": r.verified(),
    })
}

fn check_degree(x: &BigradedComplex, k: i64) -> Result<()> {
    if k < 0 || k > x.max_degree() {
        return Err(Error::Shape(format!("degree {k} outside 0..={}", x.max_degree())));
    }
    Ok(())
}

pub fn favb(x: &BigradedComplex, input: &str, k: i64) -> Report {
    let outcome = check_degree(x, k).and_then(|_| favb::favb(x, k)).and_then(|r| {
        if r.verified() {
            Ok(favb_value(&r))
        } else {
            Err(Error::Defect(format!("fiber or base-change verification failed in degree {k}")))
        }
    });
    finish("favb", input, outcome, json!({}))
}

pub fn favb2(x: &BigradedComplex, input: &str, k: i64) -> Report {
    let outcome = check_degree(x, k).and_then(|_| favb::favb2(x, k)).map(|r| {
        json!({
            "k": r.k,
            "betti": r.purity.betti,
            "piece_dims": degree_dims(&r.module.piece_dims()),
            "purity": {
                "dims": bidegree_dims(&r.purity.dims),
                "total": r.purity.total,
                "pure": r.purity.pure,
            },
            "fiber_zero": bidegree_dims(&r.fiber_zero),
            "fiber_matches_purity": r.fiber_matches_purity,
            "slice_hodge": r.slice_hodge,
            "slice_conjugate": r.slice_conjugate,
            "twistor_type": favb::twistor_type(x, k).ok(),
            "verified": r.verified(),
        })
    });
    finish("favb2", input, outcome, json!({}))
}

pub fn models_list() -> Report {
    let list: Vec<Value> = models::builtin_descriptors()
        .iter()
        .map(|d| json!({"name": d.name, "parameters": d.parameters, "label": d.label(), "note": d.provenance_note}))
        .collect();
    Report::ok("models", "list", json!({"models": list}))
}

pub fn verify_all(outcomes: &[crate::audit::Outcome], input: &str) -> Report {
    let list: Vec<Value> = outcomes
        .iter()
        .map(|o| json!({"id": o.id, "title": o.title, "checks": o.checks, "passed": o.passed(), "failures": o.failures, "notes": o.notes}))
        .collect();
    let failed: Vec<&str> = outcomes.iter().filter(|o| !o.passed()).map(|o| o.id.as_str()).collect();
    let body = json!({"suites": list, "passed": failed.is_empty()});
    if failed.is_empty() {
        Report::ok("verify-all", input, body)
    } else {
        Report::failed("verify-all", input, &Error::Defect(format!("failing suites: {}", failed.join(", "))), body)
    }
}
