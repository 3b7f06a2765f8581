//! Rule abduction, execution, and answer selection.
//!
//! Abduction enumerates the small candidate operator space per attribute
//! and scores each candidate by the mutual consistency of its relation
//! outputs across context tuples (geometric mean of pairwise similarities,
//! clamped to [0,1]). Execution applies the winning rule's inverse to the
//! last row; selection sums predicted-vs-candidate similarities over all
//! attributes that hold a rule.

use rand::Rng;

use crate::atomic::BooleanCodec;
use crate::codebook::{encode_panel_from_labels, CodebookSet, PanelEncoding};
use crate::error::{Result, VsaError};
use crate::raven::{PuzzleSpec, RuleLabel, BINARY_PAIRS, COLOR_MAX, SIZE_MAX, TERNARY_ROWS, TYPE_MAX};
use crate::relations::{
    rel_lgc_full, rel_lgc_inverse, rel_num, rel_num_inverse, RelationSpec,
};
use crate::vsa::HdVector;

/// Scores below this floor are treated as "no rule" and the attribute is
/// excluded from answer selection.
pub const SCORE_FLOOR: f64 = 0.3;
/// Two candidate scores within this distance count as a tie; the earlier
/// (more constrained) candidate wins.
pub const TIE_EPSILON: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleFamily {
    Numerical,
    Logical,
}

/// How to turn a winning candidate into a rule label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CandidateTag {
    Binary,
    ArithPlus,
    ArithMinus,
    Dist3,
    Logical(RuleLabel),
}

#[derive(Debug, Clone)]
struct Candidate {
    spec: RelationSpec,
    tag: CandidateTag,
}

/// The four numerical candidates shared by every attribute.
fn numerical_candidates() -> Vec<Candidate> {
    vec![
        Candidate { spec: RelationSpec::numerical("binary", &[-1.0, 1.0]), tag: CandidateTag::Binary },
        Candidate {
            spec: RelationSpec::numerical("Arithmetic+", &[-1.0, -1.0, 1.0]),
            tag: CandidateTag::ArithPlus,
        },
        Candidate {
            spec: RelationSpec::numerical("Arithmetic-", &[-1.0, 1.0, 1.0]),
            tag: CandidateTag::ArithMinus,
        },
        Candidate {
            spec: RelationSpec::numerical("DistributeThree", &[1.0, 1.0, 1.0]),
            tag: CandidateTag::Dist3,
        },
    ]
}

/// The logical candidates used for Position, in tie-break order.
fn logical_candidates() -> Vec<Candidate> {
    vec![
        Candidate {
            spec: RelationSpec::logical_full("OR", [1, 1, 1, 1, 1]),
            tag: CandidateTag::Logical(RuleLabel::Or),
        },
        Candidate {
            spec: RelationSpec::logical_full("DIFF", [0, 1, 0, 1, 0]),
            tag: CandidateTag::Logical(RuleLabel::Diff),
        },
        Candidate {
            spec: RelationSpec::logical_full("XOR", [0, 1, 1, 0, 0]),
            tag: CandidateTag::Logical(RuleLabel::Xor),
        },
        Candidate {
            spec: RelationSpec::logical_full("AND", [0, 0, 0, 0, 0]),
            tag: CandidateTag::Logical(RuleLabel::And),
        },
    ]
}

/// Geometric mean of pairwise similarities clamped to [0,1]; zero if any
/// pair is non-positive or non-finite.
fn consistency_score(outputs: &[HdVector]) -> f64 {
    let mut log_sum = 0.0;
    let mut pairs = 0usize;
    for i in 0..outputs.len() {
        for j in (i + 1)..outputs.len() {
            let s = match outputs[i].similarity(&outputs[j]) {
                Ok(s) if s.is_finite() => s.clamp(0.0, 1.0),
                _ => 0.0,
            };
            if s <= 0.0 {
                return 0.0;
            }
            log_sum += s.ln();
            pairs += 1;
        }
    }
    if pairs == 0 {
        return 0.0;
    }
    (log_sum / pairs as f64).exp().clamp(0.0, 1.0)
}

fn ternary_outputs(vs: &[&HdVector; 8], spec: &RelationSpec) -> Option<Vec<HdVector>> {
    let mut outputs = Vec::new();
    for (a, b, c) in TERNARY_ROWS {
        outputs.push(rel_num(&[vs[a], vs[b], vs[c]], spec).ok()?);
    }
    Some(outputs)
}

/// Scores one binary step hypothesis by binding each left vector with the
/// step and comparing directly against the right vector. This sidesteps
/// the a^-1 o b form, whose reciprocal blows up on near-zero entries of
/// bundled grid vectors.
fn binary_step_score(vs: &[&HdVector; 8], step: &HdVector) -> f64 {
    let mut log_sum = 0.0;
    for (a, b) in BINARY_PAIRS {
        let shifted = match vs[a].bind(step) {
            Ok(v) => v,
            Err(_) => return 0.0,
        };
        let s = match shifted.similarity(vs[b]) {
            Ok(s) if s.is_finite() => s.clamp(0.0, 1.0),
            _ => 0.0,
        };
        if s <= 0.0 {
            return 0.0;
        }
        log_sum += s.ln();
    }
    (log_sum / BINARY_PAIRS.len() as f64).exp().clamp(0.0, 1.0)
}

#[derive(Debug, Clone)]
pub struct AbductionResult {
    pub spec: RelationSpec,
    pub label: RuleLabel,
    pub family: RuleFamily,
    pub score: f64,
    pub r_bar: HdVector,
    /// Per-candidate scores in evaluation order.
    pub table: Vec<(String, f64)>,
}

/// Validity gates tighten ternary candidates beyond raw consistency:
/// Arithmetic constrains r to the zero (identity-offset) vector, so an
/// offset pattern (v3 = v1 + v2 + c) is rejected; Distribute Three is a
/// row permutation of one value trio, so the bundled row sums must also
/// agree. The sum gate matters on grid vectors, where the bind product of
/// dense occupancy bundles collapses toward a layout-independent vector.
fn arith_gate(r_bar: &HdVector, steps: &[(i8, HdVector)]) -> f64 {
    steps
        .iter()
        .find(|(s, _)| *s == 0)
        .map_or(0.0, |(_, v)| r_bar.similarity(v).unwrap_or(0.0).max(0.0))
}

fn dist3_gate(vs: &[&HdVector; 8]) -> f64 {
    let sum = |row: [usize; 3]| HdVector::bundle(&[vs[row[0]], vs[row[1]], vs[row[2]]], false);
    match (sum([0, 1, 2]), sum([3, 4, 5])) {
        (Ok(a), Ok(b)) => a.similarity(&b).unwrap_or(0.0).clamp(0.0, 1.0),
        _ => 0.0,
    }
}

/// Plausibility gate for attributes with a finite value codebook: a
/// candidate whose executed prediction cleans up to nothing in range is
/// rejected, mirroring the range check a symbolic solver applies. Catches
/// e.g. Arithmetic+ fitting rows with a zero middle value but predicting
/// an out-of-range completion.
fn range_gate(pred: &HdVector, book: &[HdVector]) -> f64 {
    book.iter()
        .map(|v| pred.similarity(v).unwrap_or(0.0))
        .fold(0.0, f64::max)
        .clamp(0.0, 1.0)
}

fn predict_from(cand: &Candidate, r_bar: &HdVector, v6: &HdVector, v7: &HdVector) -> Option<HdVector> {
    match cand.tag {
        CandidateTag::Binary => r_bar.bind(v7).ok(),
        CandidateTag::Dist3 => r_bar.bind(&v6.conjugate()).ok()?.bind(&v7.conjugate()).ok(),
        _ => rel_num_inverse(&[v6, v7], &cand.spec, r_bar).ok(),
    }
}

fn abduce_numeric_family(
    vs: &[&HdVector; 8],
    steps: &[(i8, HdVector)],
    value_book: Option<&[HdVector]>,
    table: &mut Vec<(String, f64)>,
) -> Option<AbductionResult> {
    let mut best: Option<(Candidate, f64, HdVector, Option<RuleLabel>)> = None;
    for cand in numerical_candidates() {
        let mut score = 0.0;
        let mut r_bar = None;
        let mut binary = None;
        match cand.tag {
            CandidateTag::Binary => {
                for (step, sv) in steps {
                    let mut s = binary_step_score(vs, sv);
                    if let (Some(book), Some(pred)) =
                        (value_book, predict_from(&cand, sv, vs[6], vs[7]))
                    {
                        s *= range_gate(&pred, book);
                    }
                    if s > score + TIE_EPSILON || binary.is_none() {
                        score = s;
                        r_bar = Some(sv.clone());
                        binary = Some(if *step == 0 {
                            RuleLabel::Constant
                        } else {
                            RuleLabel::Progression(*step)
                        });
                    }
                }
            }
            _ => {
                if let Some(outputs) = ternary_outputs(vs, &cand.spec) {
                    score = consistency_score(&outputs);
                    let refs: Vec<&HdVector> = outputs.iter().collect();
                    if let Ok(rb) = HdVector::bundle(&refs, true) {
                        score *= match cand.tag {
                            CandidateTag::ArithPlus | CandidateTag::ArithMinus => {
                                arith_gate(&rb, steps)
                            }
                            CandidateTag::Dist3 => dist3_gate(vs),
                            _ => 1.0,
                        };
                        if let (Some(book), Some(pred)) =
                            (value_book, predict_from(&cand, &rb, vs[6], vs[7]))
                        {
                            score *= range_gate(&pred, book);
                        }
                        r_bar = Some(rb);
                    } else {
                        score = 0.0;
                    }
                }
            }
        }
        table.push((cand.spec.label.clone(), score));
        let better = match &best {
            Some((_, s, _, _)) => score > s + TIE_EPSILON,
            None => true,
        };
        if better {
            if let Some(rb) = r_bar {
                best = Some((cand, score, rb, binary));
            }
        }
    }
    let (cand, score, r_bar, binary) = best?;
    if score < SCORE_FLOOR {
        return None;
    }
    let label = match cand.tag {
        CandidateTag::Binary => binary.expect("binary winner carries its step label"),
        CandidateTag::ArithPlus => RuleLabel::ArithmeticPlus,
        CandidateTag::ArithMinus => RuleLabel::ArithmeticMinus,
        CandidateTag::Dist3 => RuleLabel::DistributeThree,
        CandidateTag::Logical(l) => l,
    };
    Some(AbductionResult {
        spec: cand.spec,
        label,
        family: RuleFamily::Numerical,
        score,
        r_bar,
        table: Vec::new(),
    })
}

/// Numeric-attribute abduction over the 8 context vectors. `value_book`
/// holds the in-range value codes used by the prediction plausibility
/// gate; pass None for attributes without a finite codebook.
pub fn abduce_numeric(
    vs: &[&HdVector; 8],
    steps: &[(i8, HdVector)],
    value_book: Option<&[HdVector]>,
) -> Option<AbductionResult> {
    let mut table = Vec::new();
    let mut res = abduce_numeric_family(vs, steps, value_book, &mut table)?;
    res.table = table;
    Some(res)
}

/// Snaps a logical relation output to the nearer of the two boolean
/// codewords. A satisfied rule then scores exactly 1.0, which is what lets
/// it win the family comparison against a near-collinear numeric product
/// on dense grids.
fn boolean_cleanup(bv: &BooleanCodec, out: &HdVector) -> Option<HdVector> {
    let s0 = out.similarity(bv.e0()).ok()?;
    let s1 = out.similarity(bv.e1()).ok()?;
    Some(if s1 > s0 { bv.e1().clone() } else { bv.e0().clone() })
}

/// Logical abduction over per-cell existence booleans: outputs are pooled
/// across (row, cell) samples.
fn abduce_logical(bv: &BooleanCodec, cells: &[Vec<HdVector>]) -> Option<(Candidate, f64, HdVector, Vec<(String, f64)>)> {
    let n_cells = cells.len();
    let mut table = Vec::new();
    let mut best: Option<(Candidate, f64, Vec<HdVector>)> = None;
    for cand in logical_candidates() {
        let mut outputs = Vec::with_capacity(2 * n_cells);
        let mut ok = true;
        for (a, b, c) in TERNARY_ROWS {
            for cell in cells {
                let cleaned = rel_lgc_full(bv, &[&cell[a], &cell[b], &cell[c]], &cand.spec)
                    .ok()
                    .and_then(|out| boolean_cleanup(bv, &out));
                match cleaned {
                    Some(out) => outputs.push(out),
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
        }
        let score = if ok { consistency_score(&outputs) } else { 0.0 };
        table.push((cand.spec.label.clone(), score));
        let better = match &best {
            Some((_, s, _)) => score > s + TIE_EPSILON,
            None => true,
        };
        if better {
            best = Some((cand, score, outputs));
        }
    }
    let (cand, score, outputs) = best?;
    if score < SCORE_FLOOR || outputs.is_empty() {
        return None;
    }
    let refs: Vec<&HdVector> = outputs.iter().collect();
    let r_bar = HdVector::bundle(&refs, true).ok()?;
    Some((cand, score, r_bar, table))
}

/// Position abduction: numerical candidates on the grid occupancy vectors
/// compete with logical candidates on per-cell booleans; the logical
/// family wins only with a strictly larger score.
pub fn abduce_position(
    books: &CodebookSet,
    grids: &[&HdVector; 8],
    cells: &[Vec<HdVector>],
    steps: &[(i8, HdVector)],
) -> Option<AbductionResult> {
    let mut table = Vec::new();
    let numeric = abduce_numeric_family(grids, steps, None, &mut table);
    let logical = abduce_logical(&books.backend_lgc_bv, cells);
    if let Some((cand, score, r_bar, ltable)) = &logical {
        table.extend(ltable.iter().cloned());
        let num_score = numeric.as_ref().map_or(0.0, |n| n.score);
        if *score > num_score {
            return Some(AbductionResult {
                spec: cand.spec.clone(),
                label: match cand.tag {
                    CandidateTag::Logical(l) => l,
                    _ => unreachable!(),
                },
                family: RuleFamily::Logical,
                score: *score,
                r_bar: r_bar.clone(),
                table,
            });
        }
    }
    let mut res = numeric?;
    res.table = table;
    Some(res)
}

/// Applies the winning rule's inverse to the last row. Distribute Three
/// unbinds via the conjugate rather than the reciprocal: identical for the
/// unit-modulus value codes, and well conditioned on grid occupancy
/// bundles whose entries can be arbitrarily close to zero.
pub fn execute_numeric(
    result: &AbductionResult,
    v6: &HdVector,
    v7: &HdVector,
) -> Result<HdVector> {
    if result.spec.arity == 2 {
        rel_num_inverse(&[v7], &result.spec, &result.r_bar)
    } else if result.label == RuleLabel::DistributeThree {
        result.r_bar.bind(&v6.conjugate())?.bind(&v7.conjugate())
    } else {
        rel_num_inverse(&[v6, v7], &result.spec, &result.r_bar)
    }
}

/// Executes a logical Position rule cell-by-cell, cleaning each predicted
/// boolean and rebuilding a grid occupancy vector from the present cells.
pub fn execute_logical_position(
    books: &CodebookSet,
    result: &AbductionResult,
    cells: &[Vec<HdVector>],
) -> Result<HdVector> {
    let bv = &books.backend_lgc_bv;
    let s0 = result.r_bar.similarity(bv.e0())?;
    let s1 = result.r_bar.similarity(bv.e1())?;
    if s1 > s0 {
        return Err(VsaError::UnsupportedLogicalInverse);
    }
    let n_cells = cells.len();
    let codec = books
        .grid_positions(n_cells)
        .ok_or(VsaError::GridLengthMismatch { expected: 4, got: n_cells })?;
    let mut terms: Vec<HdVector> = Vec::new();
    for (j, cell) in cells.iter().enumerate() {
        let out = rel_lgc_inverse(bv, &[&cell[6], &cell[7]], &result.spec, &result.r_bar)?;
        let present = out.similarity(bv.e1())? > out.similarity(bv.e0())?;
        if present {
            terms.push(codec.encode_int(j as i64).bind(&books.backend_lgc_rv[1])?);
        }
    }
    if terms.is_empty() {
        return Ok(HdVector::zero(books.d)?);
    }
    HdVector::bundle(&terms.iter().collect::<Vec<_>>(), false)
}

// -------- per-puzzle orchestration --------

/// Attribute identifiers within one component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReasonAttr {
    Shape,
    Size,
    Color,
    Number,
    Position,
}

#[derive(Debug, Clone)]
pub struct AttrFinding {
    pub attr: ReasonAttr,
    pub result: Option<AbductionResult>,
    /// Predicted attribute vector for the missing panel; None when no rule
    /// was found or execution was unsupported.
    pub predicted: Option<HdVector>,
}

#[derive(Debug, Clone)]
pub struct ComponentFindings {
    pub findings: Vec<AttrFinding>,
}

impl ComponentFindings {
    pub fn label_of(&self, attr: ReasonAttr) -> Option<RuleLabel> {
        self.findings
            .iter()
            .find(|f| f.attr == attr)
            .and_then(|f| f.result.as_ref())
            .map(|r| r.label)
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub answer: usize,
    pub candidate_scores: Vec<f64>,
    pub components: Vec<ComponentFindings>,
    /// True when some attribute had no rule above the floor or an
    /// unsupported inverse.
    pub flagged: bool,
}

fn attr_vector(enc: &PanelEncoding, attr: ReasonAttr) -> Option<&HdVector> {
    match attr {
        ReasonAttr::Shape => Some(&enc.overall[0]),
        ReasonAttr::Size => Some(&enc.overall[1]),
        ReasonAttr::Color => Some(&enc.overall[2]),
        ReasonAttr::Number => Some(&enc.number),
        ReasonAttr::Position => enc.position.as_ref(),
    }
}

fn numeric_steps(books: &CodebookSet) -> Result<Vec<(i8, HdVector)>> {
    [0i8, 1, 2, -1, -2]
        .iter()
        .map(|&s| books.backend_num.encode(f64::from(s)).map(|v| (s, v)))
        .collect()
}

fn value_book(books: &CodebookSet, lo: i64, hi: i64) -> Result<Vec<HdVector>> {
    (lo..=hi).map(|v| books.backend_num.encode(v as f64)).collect()
}

fn position_steps(books: &CodebookSet, n_slots: usize) -> Option<Vec<(i8, HdVector)>> {
    let codec = books.grid_positions(n_slots)?;
    Some(
        [0i8, 1, 2, -1, -2]
            .iter()
            .map(|&s| (s, codec.encode_int(i64::from(s))))
            .collect(),
    )
}

/// Full pipeline for one puzzle: encode all panels, abduce and execute a
/// rule per attribute and component, then pick the candidate with the
/// highest summed similarity to the predictions.
pub fn solve<R: Rng + ?Sized>(
    puzzle: &PuzzleSpec,
    books: &CodebookSet,
    eta: f64,
    rng: &mut R,
) -> Result<Solution> {
    let n_components = puzzle.components.len();
    let mut context: Vec<Vec<PanelEncoding>> = Vec::with_capacity(n_components);
    for comp in &puzzle.components {
        let encs = comp.panels[..8]
            .iter()
            .map(|p| encode_panel_from_labels(p, books, eta, rng))
            .collect::<Result<Vec<_>>>()?;
        context.push(encs);
    }
    let mut candidates: Vec<Vec<PanelEncoding>> = Vec::with_capacity(8);
    for cand in &puzzle.candidates {
        candidates.push(
            cand.iter()
                .map(|p| encode_panel_from_labels(p, books, eta, rng))
                .collect::<Result<Vec<_>>>()?,
        );
    }

    let num_steps = numeric_steps(books)?;
    let mut flagged = false;
    let mut components = Vec::with_capacity(n_components);
    for (ci, comp) in puzzle.components.iter().enumerate() {
        let encs = &context[ci];
        let mut findings = Vec::new();
        let mut attrs = vec![ReasonAttr::Shape, ReasonAttr::Size, ReasonAttr::Color];
        if comp.n_slots > 1 {
            attrs.push(ReasonAttr::Number);
            attrs.push(ReasonAttr::Position);
        }
        for attr in attrs {
            let finding = match attr {
                ReasonAttr::Position => {
                    let grids: [&HdVector; 8] =
                        std::array::from_fn(|i| encs[i].position.as_ref().unwrap());
                    // per-cell existence booleans across the 8 context panels
                    let cells: Vec<Vec<HdVector>> = (0..comp.n_slots)
                        .map(|j| (0..8).map(|i| encs[i].slots[j].exist_bv.clone()).collect())
                        .collect();
                    let steps = position_steps(books, comp.n_slots).unwrap();
                    let result = abduce_position(books, &grids, &cells, &steps);
                    let predicted = result.as_ref().and_then(|r| match r.family {
                        RuleFamily::Numerical => execute_numeric(r, grids[6], grids[7]).ok(),
                        RuleFamily::Logical => {
                            execute_logical_position(books, r, &cells).ok()
                        }
                    });
                    AttrFinding { attr, result, predicted }
                }
                _ => {
                    let vs: [&HdVector; 8] =
                        std::array::from_fn(|i| attr_vector(&encs[i], attr).unwrap());
                    let book = match attr {
                        ReasonAttr::Shape => value_book(books, 0, TYPE_MAX as i64)?,
                        ReasonAttr::Size => value_book(books, 0, SIZE_MAX as i64)?,
                        ReasonAttr::Color => value_book(books, 0, COLOR_MAX as i64)?,
                        _ => value_book(books, 1, comp.n_slots as i64)?,
                    };
                    let result = abduce_numeric(&vs, &num_steps, Some(&book));
                    let predicted = result
                        .as_ref()
                        .and_then(|r| execute_numeric(r, vs[6], vs[7]).ok());
                    AttrFinding { attr, result, predicted }
                }
            };
            if finding.predicted.is_none() {
                flagged = true;
            }
            findings.push(finding);
        }
        components.push(ComponentFindings { findings });
    }

    let mut candidate_scores = vec![0.0f64; candidates.len()];
    for (k, cand) in candidates.iter().enumerate() {
        let mut total = 0.0;
        for (ci, comp_findings) in components.iter().enumerate() {
            for f in &comp_findings.findings {
                if let (Some(pred), Some(cv)) = (&f.predicted, attr_vector(&cand[ci], f.attr)) {
                    if let Ok(s) = pred.similarity(cv) {
                        if s.is_finite() {
                            total += s;
                        }
                    }
                }
            }
        }
        candidate_scores[k] = total;
    }
    let mut answer = 0;
    for (k, &s) in candidate_scores.iter().enumerate() {
        if s > candidate_scores[answer] {
            answer = k;
        }
    }
    Ok(Solution { answer, candidate_scores, components, flagged })
}
