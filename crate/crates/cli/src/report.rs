//! JSON encodings of analysis results. Scalars are strings, vectors are
//! `{"position": "coefficient"}` maps.

use serde_json::{json, Value};
use triax::canonical::{CyclicBlock, ShiftBlock};
use triax::centralizer::{LaurentProbe, MembershipEvidence, OpenQuestionEvidence, PolyMembership};
use triax::exactfield::{Poly, SplitFailure};
use triax::linspace::SubspaceBasis;
use triax::simtri::{CommutationWitness, SimultaneousVerdict};
use triax::triangulate::{
    ClosureVerdict, InvertibilityReport, NilpotenceVerdict, NilpotenceWitness, NonTriangularWitness, OrderedBasis,
    SaturationTrace, TriangularCheck, TriangularityWitness, TriangularizabilityVerdict,
};

use crate::format::{matrix_json, scalar_json, sparse_json};

pub const SCHEMA: u64 = 1;

pub fn poly_json(p: &Poly) -> Value {
    json!(p.to_string())
}

pub fn subspace_json(s: &SubspaceBasis) -> Value {
    json!({"dim": s.dim(), "rows": s.rows().iter().map(sparse_json).collect::<Vec<_>>()})
}

pub fn trace_json(t: &SaturationTrace) -> Value {
    json!({"dims": t.dims(), "stabilized": t.stabilized, "fuel_used": t.fuel_used})
}

pub fn split_failure_json(f: &SplitFailure) -> Value {
    json!({
        "factor": poly_json(&f.factor),
        "irreducible": f.irreducible,
        "partial_roots": f.partial_roots.iter()
            .map(|(r, m)| json!({"root": scalar_json(r), "multiplicity": m}))
            .collect::<Vec<_>>(),
    })
}

/// `[{index: [block, level, position], vector}]`
pub fn basis_json(b: &OrderedBasis) -> Value {
    Value::Array(
        b.entries()
            .iter()
            .map(|(idx, v)| json!({"index": [idx.block, idx.level, idx.position], "vector": sparse_json(v)}))
            .collect(),
    )
}

pub fn check_json(c: &TriangularCheck) -> Value {
    let witness = c.witness.as_ref().map(|w| match w {
        TriangularityWitness::Escapes { entry, image } => json!({"escapes": {"entry": entry, "image": sparse_json(image)}}),
        TriangularityWitness::AboveDiagonal { entry, at, coefficient } => {
            json!({"above_diagonal": {"entry": entry, "at": at, "coefficient": scalar_json(coefficient)}})
        }
    });
    json!({"triangular": c.triangular, "strict": c.strict, "witness": witness})
}

pub fn triangularize_json(v: &TriangularizabilityVerdict) -> Value {
    match v {
        TriangularizabilityVerdict::Triangularizable(c) => json!({
            "verdict": v.label(),
            "certificate": {
                "hull": subspace_json(&c.hull.basis),
                "trace": trace_json(&c.trace),
                "components": c.components.iter().map(|p| json!({
                    "eigenvalue": scalar_json(&p.eigenvalue),
                    "multiplicity": p.multiplicity,
                    "dim": p.basis.dim(),
                })).collect::<Vec<_>>(),
                "strict": c.basis.strict(),
                "basis": basis_json(&c.basis),
            },
        }),
        TriangularizabilityVerdict::NotTriangularizable(w) => {
            let witness = match w.as_ref() {
                NonTriangularWitness::Split { hull, failure } => json!({
                    "split_failure": split_failure_json(failure),
                    "hull": subspace_json(&hull.basis),
                    "hull_matrix": matrix_json(&hull.matrix),
                }),
                NonTriangularWitness::Escaping(trace) => json!({
                    "escaping": trace_json(trace),
                    "finite_invariant_hull_dim": 0,
                }),
            };
            json!({"verdict": v.label(), "witness": witness})
        }
        TriangularizabilityVerdict::Inconclusive(trace) => json!({"verdict": v.label(), "trace": trace_json(trace)}),
    }
}

pub fn invertibility_json(r: &InvertibilityReport) -> Value {
    json!({
        "invertible_on_hull": r.invertible_on_hull,
        "injective": r.injective,
        "prefix_surjective": r.prefix_surjective,
        "diagonal_nonzero": r.diagonal_nonzero,
        "zero_diagonal_at": r.zero_diagonal_at,
        "matrix": matrix_json(&r.matrix),
        "inverse": r.inverse.as_ref().map(matrix_json),
        "inverse_triangular": r.inverse_triangular,
    })
}

pub fn nilpotence_json(v: &NilpotenceVerdict) -> Value {
    match v {
        NilpotenceVerdict::YesOnProbes { exponents } => json!({"verdict": v.label(), "exponents": exponents}),
        NilpotenceVerdict::No(w) => {
            let witness = match w {
                NilpotenceWitness::Eigenvalue { probe, eigenvalue } => {
                    json!({"eigenvalue": {"probe": sparse_json(probe), "value": scalar_json(eigenvalue)}})
                }
                NilpotenceWitness::Factor { probe, factor } => {
                    json!({"factor": {"probe": sparse_json(probe), "factor": poly_json(factor)}})
                }
                NilpotenceWitness::InfiniteOrbit { probe } => json!({"infinite_orbit": {"probe": sparse_json(probe)}}),
            };
            json!({"verdict": v.label(), "witness": witness})
        }
        NilpotenceVerdict::Inconclusive { probe, trace } => {
            json!({"verdict": v.label(), "probe": sparse_json(probe), "trace": trace_json(trace)})
        }
    }
}

pub fn closure_json(v: &ClosureVerdict) -> Value {
    match v {
        ClosureVerdict::InClosureOnProbes { hull_dims } => json!({"verdict": v.label(), "hull_dims": hull_dims}),
        ClosureVerdict::NotInClosure { seed, failure } => json!({
            "verdict": v.label(),
            "seed": sparse_json(seed),
            "split_failure": split_failure_json(failure),
        }),
        ClosureVerdict::Inconclusive { diverged } => json!({"verdict": v.label(), "diverged": diverged}),
    }
}

pub fn commutation_json(w: &CommutationWitness) -> Value {
    json!({
        "left": w.left,
        "right": w.right,
        "probe": sparse_json(&w.probe),
        "left_right": sparse_json(&w.left_right),
        "right_left": sparse_json(&w.right_left),
    })
}

pub fn simtri_json(v: &SimultaneousVerdict) -> Value {
    match v {
        SimultaneousVerdict::Triangularized(c) => json!({
            "verdict": v.label(),
            "certificate": {
                "hull": subspace_json(&c.hull),
                "trace": trace_json(&c.trace),
                "block_eigenvalues": c.block_eigenvalues.iter()
                    .map(|t| t.iter().map(scalar_json).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
                "basis": basis_json(&c.basis),
                "checks": c.checks.iter().map(check_json).collect::<Vec<_>>(),
            },
        }),
        SimultaneousVerdict::SplitFailure { member, hull, failure } => json!({
            "verdict": v.label(),
            "member": member,
            "hull": subspace_json(hull),
            "split_failure": split_failure_json(failure),
        }),
        SimultaneousVerdict::Escaping { member, trace } => {
            json!({"verdict": v.label(), "member": member, "trace": trace_json(trace)})
        }
        SimultaneousVerdict::Inconclusive(trace) => json!({"verdict": v.label(), "trace": trace_json(trace)}),
    }
}

/// `{eigenvalue, length, vectors}`
pub fn shift_block_json(b: &ShiftBlock) -> Value {
    json!({
        "eigenvalue": scalar_json(&b.eigenvalue),
        "length": b.len(),
        "vectors": b.vectors.iter().map(sparse_json).collect::<Vec<_>>(),
    })
}

pub fn cyclic_block_json(b: &CyclicBlock) -> Value {
    json!({"generator": sparse_json(&b.generator), "span_dim": b.span_dim})
}

pub fn membership_json(m: &PolyMembership) -> Value {
    match m {
        PolyMembership::InClosure { q, interpolants } => json!({
            "verdict": m.label(),
            "polynomial": poly_json(q),
            "interpolants": interpolants.iter().map(poly_json).collect::<Vec<_>>(),
        }),
        PolyMembership::NotInClosure(MembershipEvidence::NoInterpolant { probes, hull_dim }) => json!({
            "verdict": m.label(),
            "evidence": {"no_interpolant": {"probes": probes, "hull_dim": hull_dim}},
        }),
        PolyMembership::NotInClosure(MembershipEvidence::DegreeGrowth { degrees }) => json!({
            "verdict": m.label(),
            "evidence": {"degree_growth": degrees.iter()
                .map(|(size, deg)| json!({"size": size, "degree": deg}))
                .collect::<Vec<_>>()},
        }),
    }
}

fn coefficients_json(c: &std::collections::BTreeMap<i64, triax::exactfield::Scalar>) -> Value {
    Value::Object(c.iter().map(|(e, a)| (e.to_string(), scalar_json(a))).collect())
}

pub fn laurent_json(p: &LaurentProbe) -> Value {
    match p {
        LaurentProbe::Matches { coefficients, radius } => json!({
            "verdict": "laurent_polynomial",
            "coefficients": coefficients_json(coefficients),
            "radius": radius,
        }),
        LaurentProbe::Mismatch { coefficients, position } => json!({
            "verdict": "not_laurent_polynomial",
            "coefficients": coefficients_json(coefficients),
            "position": position,
        }),
        LaurentProbe::NotCommuting { positions } => json!({"verdict": "not_commuting", "positions": positions}),
    }
}

pub fn open_question_json(e: &OpenQuestionEvidence) -> Value {
    json!({
        "verdict": "evidence_only",
        "hulls": e.hulls.iter().map(|h| h.map(|(dim, dc, pa)| json!({
            "hull_dim": dim,
            "double_centralizer_dim": dc,
            "poly_algebra_dim": pa,
        }))).collect::<Vec<_>>(),
    })
}
