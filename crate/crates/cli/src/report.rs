//! Machine-readable command reports. Rationals are rendered as strings;
//! decimals only appear under the separately labeled `approx` key.

use plopen::degree::{DegreeCertificate, HomotopyVerdict};
use plopen::linalg::{approx_f64, format_rational, parse_rational, Sign};
use plopen::openness::{
    BranchReason, BranchReport, FailureKind, OpennessVerdict, OracleFailure, OracleReport,
};
use plopen::plmap::{ComponentGraph, Fiber, SignProfile};
use plopen::polyhedra::Simplex;
use plopen::whyburn::{Certification, Witness};
use plopen::{Rational, Vector};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub const APPROX_NOTE: &str = "inexact decimal rendering of the exact results";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub instance_digest: String,
    pub results: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub approx: Option<Value>,
    pub exit_code: i32,
}

impl Report {
    pub fn new(command: &str, digest: String, results: Value, exit_code: i32) -> Self {
        Report {
            command: command.to_string(),
            instance_digest: digest,
            results,
            approx: None,
            exit_code,
        }
    }

    pub fn with_approx(mut self) -> Self {
        self.approx = Some(json!({ "note": APPROX_NOTE, "results": approximate(&self.results) }));
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Replaces every rational string with its nearest `f64`.
pub fn approximate(v: &Value) -> Value {
    match v {
        Value::String(s) => match parse_rational(s) {
            Ok(r) => json!(approx_f64(&r)),
            Err(_) => v.clone(),
        },
        Value::Array(items) => Value::Array(items.iter().map(approximate).collect()),
        Value::Object(map) => {
            Value::Object(map.iter().map(|(k, x)| (k.clone(), approximate(x))).collect())
        }
        _ => v.clone(),
    }
}

pub fn q(r: &Rational) -> Value {
    Value::String(format_rational(r))
}

pub fn vector(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(q).collect())
}

pub fn simplex(s: &Simplex) -> Value {
    json!(s.vertices())
}

pub fn sign(s: Sign) -> Value {
    json!(s.as_i32())
}

pub fn sign_profile(p: &SignProfile) -> Value {
    json!({
        "num_pos": p.num_pos,
        "num_neg": p.num_neg,
        "num_zero": p.num_zero,
        "classification": p.classification.to_string(),
    })
}

fn branch_reason(r: &BranchReason) -> Value {
    let detail = match r {
        BranchReason::SignMismatchAcrossFace { cells, signs } => json!({
            "cells": [cells.0, cells.1],
            "signs": [sign(signs.0), sign(signs.1)],
        }),
        BranchReason::SingularIncidentCell { cell } => json!({ "cell": cell }),
        BranchReason::LocalInjectivityFailure { cells } => json!({ "cells": [cells.0, cells.1] }),
    };
    json!({ "kind": r.to_string(), "detail": detail })
}

pub fn branch(b: &BranchReport) -> Value {
    json!({
        "dim": b.dim,
        "empty": b.is_empty(),
        "faces": b.branch_faces.iter().map(|f| json!({
            "face": simplex(&f.simplex),
            "dim": f.dim,
            "reason": branch_reason(&f.reason),
        })).collect::<Vec<_>>(),
    })
}

pub fn oracle_failure(w: &OracleFailure) -> Value {
    let kind = match w.kind {
        FailureKind::Uncovered => json!({ "kind": "Uncovered" }),
        FailureKind::SingularPiece { cell } => json!({ "kind": "SingularPiece", "cell": cell }),
    };
    json!({
        "point": vector(&w.point),
        "direction": vector(&w.direction),
        "epsilon": q(&w.epsilon),
        "target": vector(&w.target),
        "kind": kind,
    })
}

pub fn oracle(r: &OracleReport, revalidated: &[bool]) -> Value {
    json!({
        "samples": r.samples,
        "directions": r.directions,
        "open_at_all_samples": r.open_at_all_samples(),
        "failures": r.failures.iter().zip(revalidated).map(|(w, ok)| {
            let mut v = oracle_failure(w);
            v["revalidated"] = json!(ok);
            v
        }).collect::<Vec<_>>(),
    })
}

pub fn verdict(v: &OpennessVerdict) -> Value {
    json!({
        "open": v.is_open(),
        "all_agree": v.all_agree,
        "coherent": v.coherent,
        "connected_support": v.connected_support,
        "conditions": {
            "sign_condition_ii": {
                "finite_fibers": v.cond_ii.finite_fibers,
                "sign_not_mixed": v.cond_ii.sign_not_mixed,
                "holds": v.cond_ii.holds(),
            },
            "sign_condition_iii": {
                "finite_fibers": v.cond_iii.finite_fibers,
                "sign_not_mixed": v.cond_iii.sign_not_mixed,
                "holds": v.cond_iii.holds(),
            },
            "branch_condition_iv": {
                "finite_fibers": v.cond_iv.finite_fibers,
                "dim_bf_le_n_minus_2": v.cond_iv.dim_bf_le_n_minus_2,
                "holds": v.cond_iv.holds(),
            },
        },
        "sign_profile": sign_profile(&v.sign_profile),
        "dim_Bf": v.branch.dim,
        "branch_set": branch(&v.branch),
        "oracle": {
            "checked": v.oracle_i.checked,
            "open_at_all_samples": v.oracle_i.open_at_all_samples,
            "samples": v.oracle_i.samples,
            "failures": v.oracle_i.failures.iter().map(oracle_failure).collect::<Vec<_>>(),
        },
    })
}

pub fn certificate(c: &DegreeCertificate) -> Value {
    json!({
        "degree": c.degree,
        "query_point": vector(&c.query_point),
        "regular_point": vector(&c.regular_point),
        "perturbed": c.perturbed(),
        "fiber": c.fiber.iter().map(|(x, s)| json!({ "point": vector(x), "sign": sign(*s) })).collect::<Vec<_>>(),
        "path_evidence": {
            "avoids_boundary_image": c.path_evidence.avoids_boundary_image,
            "obstacles": c.path_evidence.obstacles.iter().map(|o| json!({
                "face": simplex(&o.face),
                "hit": o.hit,
            })).collect::<Vec<_>>(),
        },
    })
}

pub fn fiber(f: &Fiber) -> Value {
    match f {
        Fiber::Finite(points) => json!({
            "finite": true,
            "count": points.len(),
            "points": points.iter().map(|p| json!({
                "point": vector(&p.point),
                "cells": p.cells.iter().map(|(c, s)| json!({ "cell": c, "sign": sign(*s) })).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        }),
        Fiber::Infinite { cell, segment } => json!({
            "finite": false,
            "cell": cell,
            "segment": [vector(&segment[0]), vector(&segment[1])],
        }),
    }
}

pub fn graph(g: &ComponentGraph) -> Value {
    json!({
        "num_nodes": g.num_nodes(),
        "connected": g.is_connected(),
        "components": g.components,
        "edges": g.edges.iter().map(|(a, b)| json!([a, b])).collect::<Vec<_>>(),
        "component_of": g.component_of,
    })
}

fn witness(w: &Witness) -> Value {
    match w {
        Witness::InteriorOnBoundary { face, boundary_face, point, image } => json!({
            "kind": "InteriorOnBoundary",
            "face": simplex(face),
            "boundary_face": simplex(boundary_face),
            "point": vector(point),
            "image": vector(image),
        }),
        Witness::BoundaryCollision { first, second, image } => json!({
            "kind": "BoundaryCollision",
            "first": simplex(first),
            "second": simplex(second),
            "image": vector(image),
        }),
        Witness::SignMismatch { first, second } => json!({
            "kind": "SignMismatch", "first": first, "second": second,
        }),
        Witness::SingularCell { cell } => json!({ "kind": "SingularCell", "cell": cell }),
        Witness::CellCollision { first, second, image } => json!({
            "kind": "CellCollision", "first": first, "second": second, "image": vector(image),
        }),
        Witness::Degree { degree, query } => json!({
            "kind": "Degree", "degree": degree, "query": vector(query),
        }),
    }
}

pub fn certification(c: &Certification) -> Value {
    match c {
        Certification::Certified { degree, certificate: cert } => json!({
            "certified": true,
            "degree": degree,
            "certificate": certificate(cert),
        }),
        Certification::Rejected(r) => json!({
            "certified": false,
            "stage": r.stage,
            "reason": r.reason,
            "witness": witness(&r.witness),
        }),
    }
}

pub fn homotopy(h: &HomotopyVerdict, gamma: (&Vector, &Vector)) -> Value {
    json!({
        "constant": h.constant,
        "gamma": [vector(gamma.0), vector(gamma.1)],
        "degrees": h.degrees.iter().map(|(t, d)| json!({ "t": q(t), "degree": d })).collect::<Vec<_>>(),
        "note": HomotopyVerdict::NOTE,
    })
}
