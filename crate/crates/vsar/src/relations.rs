//! Relation functions and their inverses. Numerical relations combine
//! fractional binding powers of the inputs; logical relations combine
//! boolean vectors through the gate set. A rule holds on a tuple when the
//! relation output matches the rule's expected output vector.

use crate::atomic::{BooleanCodec, LogicOp};
use crate::error::{Result, VsaError};
use crate::vsa::HdVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelationKind {
    Numerical,
    LogicalSimple,
    LogicalFull,
}

/// A candidate rule: how many inputs it consumes and the operator powers
/// applied to them.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationSpec {
    pub kind: RelationKind,
    pub arity: usize,
    pub op_powers: Vec<f64>,
    pub label: String,
}

impl RelationSpec {
    /// Numerical spec; one power per input, the last one nonzero.
    pub fn numerical(label: &str, op_powers: &[f64]) -> Self {
        assert!(
            matches!(op_powers.len(), 2 | 3),
            "numerical arity must be 2 or 3"
        );
        assert!(*op_powers.last().unwrap() != 0.0, "last power must be nonzero");
        Self {
            kind: RelationKind::Numerical,
            arity: op_powers.len(),
            op_powers: op_powers.to_vec(),
            label: label.to_string(),
        }
    }

    /// Simplified logical spec: three negation bits.
    pub fn logical_simple(label: &str, bits: [u8; 3]) -> Self {
        Self {
            kind: RelationKind::LogicalSimple,
            arity: 3,
            op_powers: bits.iter().map(|&b| f64::from(b)).collect(),
            label: label.to_string(),
        }
    }

    /// Full logical spec: five negation bits.
    pub fn logical_full(label: &str, bits: [u8; 5]) -> Self {
        Self {
            kind: RelationKind::LogicalFull,
            arity: 3,
            op_powers: bits.iter().map(|&b| f64::from(b)).collect(),
            label: label.to_string(),
        }
    }

    fn bit(&self, i: usize) -> bool {
        self.op_powers[i] != 0.0
    }
}

/// Numerical relation: bind of each input raised to its power.
pub fn rel_num(inputs: &[&HdVector], spec: &RelationSpec) -> Result<HdVector> {
    if spec.kind != RelationKind::Numerical {
        return Err(VsaError::ArityMismatch { expected: spec.arity, got: inputs.len() });
    }
    if inputs.len() != spec.arity {
        return Err(VsaError::ArityMismatch { expected: spec.arity, got: inputs.len() });
    }
    let mut out = inputs[0].pow(spec.op_powers[0])?;
    for (v, &p) in inputs.iter().zip(spec.op_powers.iter()).skip(1) {
        out = out.bind(&v.pow(p)?)?;
    }
    Ok(out)
}

/// Solves the numerical relation for its last input:
/// v_N = (∘_{i<N} v_i^(∘ −op_i/op_N)) ∘ r^(∘ 1/op_N), so that re-running
/// rel_num on the completed tuple reproduces r exactly.
pub fn rel_num_inverse(inputs: &[&HdVector], spec: &RelationSpec, r: &HdVector) -> Result<HdVector> {
    if spec.kind != RelationKind::Numerical {
        return Err(VsaError::ArityMismatch { expected: spec.arity, got: inputs.len() });
    }
    if inputs.len() + 1 != spec.arity {
        return Err(VsaError::ArityMismatch { expected: spec.arity - 1, got: inputs.len() });
    }
    let op_m = *spec.op_powers.last().unwrap();
    if op_m == 0.0 {
        return Err(VsaError::SingularRule);
    }
    let mut out = r.pow(1.0 / op_m)?;
    for (v, &p) in inputs.iter().zip(spec.op_powers.iter()) {
        out = out.bind(&v.pow(-p / op_m)?)?;
    }
    Ok(out)
}

fn apply_negation(bv: &BooleanCodec, negate: bool, v: &HdVector) -> Result<HdVector> {
    if negate {
        bv.logic(LogicOp::Not, v, None)
    } else {
        Ok(v.clone())
    }
}

/// Simplified logical relation: (op1 v1 AND op2 v2) bound with op3 v3.
pub fn rel_lgc_simple(
    bv: &BooleanCodec,
    inputs: &[&HdVector],
    spec: &RelationSpec,
) -> Result<HdVector> {
    if spec.kind != RelationKind::LogicalSimple || inputs.len() != 3 {
        return Err(VsaError::ArityMismatch { expected: 3, got: inputs.len() });
    }
    let a = apply_negation(bv, spec.bit(0), inputs[0])?;
    let b = apply_negation(bv, spec.bit(1), inputs[1])?;
    let c = apply_negation(bv, spec.bit(2), inputs[2])?;
    bv.logic(LogicOp::And, &a, Some(&b))?.bind(&c)
}

/// Full logical relation:
/// ((op1 v1 AND op2 v2) OR (op3 v1 AND op4 v2)) bound with op5 v3.
pub fn rel_lgc_full(
    bv: &BooleanCodec,
    inputs: &[&HdVector],
    spec: &RelationSpec,
) -> Result<HdVector> {
    if spec.kind != RelationKind::LogicalFull || inputs.len() != 3 {
        return Err(VsaError::ArityMismatch { expected: 3, got: inputs.len() });
    }
    let lhs = lgc_full_pair(bv, inputs[0], inputs[1], spec)?;
    let c = apply_negation(bv, spec.bit(4), inputs[2])?;
    lhs.bind(&c)
}

fn lgc_full_pair(
    bv: &BooleanCodec,
    v1: &HdVector,
    v2: &HdVector,
    spec: &RelationSpec,
) -> Result<HdVector> {
    let t1 = bv.logic(
        LogicOp::And,
        &apply_negation(bv, spec.bit(0), v1)?,
        Some(&apply_negation(bv, spec.bit(1), v2)?),
    )?;
    let t2 = bv.logic(
        LogicOp::And,
        &apply_negation(bv, spec.bit(2), v1)?,
        Some(&apply_negation(bv, spec.bit(3), v2)?),
    )?;
    bv.logic(LogicOp::Or, &t1, Some(&t2))
}

/// Predicts the third logical input from the first two. The closed form
/// assumes the rule's expected output is e(0); callers must reject rules
/// whose averaged output is closer to e(1).
pub fn rel_lgc_inverse(
    bv: &BooleanCodec,
    inputs: &[&HdVector],
    spec: &RelationSpec,
    _r: &HdVector,
) -> Result<HdVector> {
    if inputs.len() != 2 {
        return Err(VsaError::ArityMismatch { expected: 2, got: inputs.len() });
    }
    match spec.kind {
        RelationKind::LogicalSimple => {
            let inner = bv.logic(
                LogicOp::And,
                &apply_negation(bv, spec.bit(0), inputs[0])?,
                Some(&apply_negation(bv, spec.bit(1), inputs[1])?),
            )?;
            apply_negation(bv, spec.bit(2), &inner)
        }
        RelationKind::LogicalFull => {
            let inner = lgc_full_pair(bv, inputs[0], inputs[1], spec)?;
            apply_negation(bv, spec.bit(4), &inner)
        }
        RelationKind::Numerical => {
            Err(VsaError::ArityMismatch { expected: 3, got: inputs.len() })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atomic::NumericCodec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{PI, TAU};

    const D: usize = 3000;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn wrap(p: f64) -> f64 {
        let mut p = p.rem_euclid(TAU);
        if p > PI {
            p -= TAU;
        }
        p
    }

    fn max_phase_err(a: &HdVector, b: &HdVector) -> f64 {
        a.phases()
            .iter()
            .zip(b.phases().iter())
            .map(|(x, y)| wrap(x - y).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn constant_rule_yields_identity() {
        let nv = NumericCodec::new(D, &mut rng(1)).unwrap();
        let spec = RelationSpec::numerical("Constant", &[-1.0, 1.0]);
        let out = rel_num(&[&nv.encode(3.0).unwrap(), &nv.encode(3.0).unwrap()], &spec).unwrap();
        let id = HdVector::identity(D).unwrap();
        assert!(max_phase_err(&out, &id) < 1e-9);
    }

    #[test]
    fn progression_rule_yields_step_vector() {
        let nv = NumericCodec::new(D, &mut rng(2)).unwrap();
        let spec = RelationSpec::numerical("Progression", &[-1.0, 1.0]);
        let out = rel_num(&[&nv.encode(2.0).unwrap(), &nv.encode(3.0).unwrap()], &spec).unwrap();
        assert!(max_phase_err(&out, &nv.encode(1.0).unwrap()) < 1e-9);
    }

    #[test]
    fn arithmetic_plus_yields_identity_on_consistent_triple() {
        let nv = NumericCodec::new(D, &mut rng(3)).unwrap();
        let spec = RelationSpec::numerical("Arithmetic+", &[-1.0, -1.0, 1.0]);
        let v = |x: f64| nv.encode(x).unwrap();
        let out = rel_num(&[&v(1.0), &v(2.0), &v(3.0)], &spec).unwrap();
        assert!(max_phase_err(&out, &HdVector::identity(D).unwrap()) < 1e-9);
    }

    #[test]
    fn distribute_three_is_permutation_invariant() {
        let nv = NumericCodec::new(D, &mut rng(4)).unwrap();
        let spec = RelationSpec::numerical("Distribute Three", &[1.0, 1.0, 1.0]);
        let v = |x: f64| nv.encode(x).unwrap();
        let a = rel_num(&[&v(1.0), &v(2.0), &v(4.0)], &spec).unwrap();
        let b = rel_num(&[&v(4.0), &v(1.0), &v(2.0)], &spec).unwrap();
        assert!(max_phase_err(&a, &b) < 1e-9);
        assert!(max_phase_err(&a, &v(7.0)) < 1e-9);
    }

    #[test]
    fn violating_inputs_score_low() {
        let nv = NumericCodec::new(D, &mut rng(5)).unwrap();
        let spec = RelationSpec::numerical("Constant", &[-1.0, 1.0]);
        let v = |x: f64| nv.encode(x).unwrap();
        let consistent = rel_num(&[&v(3.0), &v(3.0)], &spec).unwrap();
        let violating = rel_num(&[&v(3.0), &v(5.0)], &spec).unwrap();
        assert!(consistent.similarity(&violating).unwrap().abs() < 0.2);
    }

    #[test]
    fn inverse_progression_example() {
        let nv = NumericCodec::new(D, &mut rng(6)).unwrap();
        let spec = RelationSpec::numerical("Progression", &[-1.0, 1.0]);
        let out =
            rel_num_inverse(&[&nv.encode(4.0).unwrap()], &spec, &nv.encode(1.0).unwrap()).unwrap();
        assert!(max_phase_err(&out, &nv.encode(5.0).unwrap()) < 1e-9);
    }

    #[test]
    fn inverse_arithmetic_minus_example() {
        let nv = NumericCodec::new(D, &mut rng(7)).unwrap();
        let spec = RelationSpec::numerical("Arithmetic-", &[-1.0, 1.0, 1.0]);
        let v = |x: f64| nv.encode(x).unwrap();
        let out = rel_num_inverse(&[&v(5.0), &v(2.0)], &spec, &v(0.0)).unwrap();
        assert!(max_phase_err(&out, &v(3.0)) < 1e-9);
    }

    #[test]
    fn inverse_round_trip_random_triples() {
        let nv = NumericCodec::new(D, &mut rng(8)).unwrap();
        let mut r = rng(88);
        let specs = [
            RelationSpec::numerical("Arithmetic+", &[-1.0, -1.0, 1.0]),
            RelationSpec::numerical("Arithmetic-", &[-1.0, 1.0, 1.0]),
            RelationSpec::numerical("Distribute Three", &[1.0, 1.0, 1.0]),
        ];
        for _ in 0..100 {
            let a: f64 = r.gen_range(-10.0..10.0);
            let b: f64 = r.gen_range(-10.0..10.0);
            let c: f64 = r.gen_range(-10.0..10.0);
            let spec = &specs[r.gen_range(0..specs.len())];
            let va = nv.encode(a).unwrap();
            let vb = nv.encode(b).unwrap();
            let rr = nv.encode(c).unwrap();
            let v3 = rel_num_inverse(&[&va, &vb], spec, &rr).unwrap();
            let back = rel_num(&[&va, &vb, &v3], spec).unwrap();
            assert!(max_phase_err(&back, &rr) < 1e-9);
        }
    }

    #[test]
    fn inverse_rejects_zero_last_power() {
        let nv = NumericCodec::new(D, &mut rng(9)).unwrap();
        let mut spec = RelationSpec::numerical("bad", &[-1.0, 1.0]);
        spec.op_powers[1] = 0.0;
        let v = nv.encode(1.0).unwrap();
        assert!(matches!(
            rel_num_inverse(&[&v], &spec, &v),
            Err(VsaError::SingularRule)
        ));
    }

    fn bools() -> [(bool, bool, bool); 8] {
        let mut out = [(false, false, false); 8];
        for i in 0..8 {
            out[i] = (i & 4 != 0, i & 2 != 0, i & 1 != 0);
        }
        out
    }

    fn simple_specs() -> Vec<(RelationSpec, fn(bool, bool) -> bool)> {
        vec![
            (RelationSpec::logical_simple("OR", [1, 1, 1]), |a, b| a | b),
            (RelationSpec::logical_simple("DIFF", [0, 1, 0]), |a, b| a & !b),
            (RelationSpec::logical_simple("AND", [0, 0, 0]), |a, b| a & b),
        ]
    }

    fn full_specs() -> Vec<(RelationSpec, fn(bool, bool) -> bool)> {
        vec![
            (RelationSpec::logical_full("OR", [1, 1, 1, 1, 1]), |a, b| a | b),
            (RelationSpec::logical_full("DIFF", [0, 1, 0, 1, 0]), |a, b| a & !b),
            (RelationSpec::logical_full("XOR", [0, 1, 1, 0, 0]), |a, b| a ^ b),
            (RelationSpec::logical_full("AND", [0, 0, 0, 0, 0]), |a, b| a & b),
        ]
    }

    #[test]
    fn simple_logical_examples() {
        let bv = BooleanCodec::new(D, &mut rng(10)).unwrap();
        let or = RelationSpec::logical_simple("OR", [1, 1, 1]);
        let diff = RelationSpec::logical_simple("DIFF", [0, 1, 0]);
        let e = |b: bool| bv.encode(b);
        let out = rel_lgc_simple(&bv, &[&e(true), &e(false), &e(true)], &or).unwrap();
        assert!(out.similarity(bv.e0()).unwrap() > 0.98);
        let out = rel_lgc_simple(&bv, &[&e(true), &e(false), &e(true)], &diff).unwrap();
        assert!(out.similarity(bv.e0()).unwrap() > 0.98);
        // violated OR: third input should have been true
        let out = rel_lgc_simple(&bv, &[&e(true), &e(false), &e(false)], &or).unwrap();
        assert!(out.similarity(bv.e1()).unwrap() > 0.98);
    }

    #[test]
    fn full_logical_soundness_all_rules_all_assignments() {
        let bv = BooleanCodec::new(D, &mut rng(11)).unwrap();
        for (spec, f) in full_specs() {
            for (a, b, c) in bools() {
                let out = rel_lgc_full(&bv, &[&bv.encode(a), &bv.encode(b), &bv.encode(c)], &spec)
                    .unwrap();
                let s = out.similarity(bv.e0()).unwrap();
                if f(a, b) == c {
                    assert!(s > 0.95, "{} {a} {b} {c}: s={s}", spec.label);
                } else {
                    assert!(s < 0.5, "{} {a} {b} {c}: s={s}", spec.label);
                }
            }
        }
    }

    #[test]
    fn simple_logical_soundness() {
        let bv = BooleanCodec::new(D, &mut rng(12)).unwrap();
        for (spec, f) in simple_specs() {
            for (a, b, c) in bools() {
                let out =
                    rel_lgc_simple(&bv, &[&bv.encode(a), &bv.encode(b), &bv.encode(c)], &spec)
                        .unwrap();
                let s = out.similarity(bv.e0()).unwrap();
                if f(a, b) == c {
                    assert!(s > 0.95, "{} {a} {b} {c}: s={s}", spec.label);
                } else {
                    assert!(s < 0.5, "{} {a} {b} {c}: s={s}", spec.label);
                }
            }
        }
    }

    #[test]
    fn full_and_simple_forms_agree() {
        let bv = BooleanCodec::new(D, &mut rng(13)).unwrap();
        let pairs = [
            (RelationSpec::logical_simple("OR", [1, 1, 1]), RelationSpec::logical_full("OR", [1, 1, 1, 1, 1])),
            (RelationSpec::logical_simple("DIFF", [0, 1, 0]), RelationSpec::logical_full("DIFF", [0, 1, 0, 1, 0])),
            (RelationSpec::logical_simple("AND", [0, 0, 0]), RelationSpec::logical_full("AND", [0, 0, 0, 0, 0])),
        ];
        for (simple, full) in pairs {
            for (a, b, c) in bools() {
                let inputs = [bv.encode(a), bv.encode(b), bv.encode(c)];
                let refs: Vec<&HdVector> = inputs.iter().collect();
                let s = rel_lgc_simple(&bv, &refs, &simple).unwrap();
                let f = rel_lgc_full(&bv, &refs, &full).unwrap();
                assert!(s.similarity(&f).unwrap() > 0.98, "{} {a} {b} {c}", simple.label);
            }
        }
    }

    #[test]
    fn logical_inverse_reproduces_truth_tables() {
        let bv = BooleanCodec::new(D, &mut rng(14)).unwrap();
        let id = HdVector::identity(D).unwrap();
        for (spec, f) in simple_specs().into_iter().chain(full_specs()) {
            for (a, b) in [(false, false), (false, true), (true, false), (true, true)] {
                let out =
                    rel_lgc_inverse(&bv, &[&bv.encode(a), &bv.encode(b)], &spec, &id).unwrap();
                let s0 = out.similarity(bv.e0()).unwrap();
                let s1 = out.similarity(bv.e1()).unwrap();
                let predicted = s1 > s0;
                assert_eq!(predicted, f(a, b), "{} {a} {b}", spec.label);
                assert!(s0.max(s1) > 0.9, "{} {a} {b}", spec.label);
            }
        }
    }

    #[test]
    fn arity_errors() {
        let nv = NumericCodec::new(D, &mut rng(15)).unwrap();
        let bv = BooleanCodec::new(D, &mut rng(16)).unwrap();
        let spec = RelationSpec::numerical("Constant", &[-1.0, 1.0]);
        let v = nv.encode(1.0).unwrap();
        assert!(rel_num(&[&v], &spec).is_err());
        let lspec = RelationSpec::logical_simple("AND", [0, 0, 0]);
        assert!(rel_lgc_simple(&bv, &[bv.e0(), bv.e1()], &lspec).is_err());
    }
}
