//! Symbolic puzzle generator and brute-force oracle. Everything here is
//! plain integer/set logic with no hypervector code, so it can serve as
//! independent ground truth for the reasoner.
//!
//! A puzzle is a 3x3 grid of panels per component; rules apply row-wise.
//! The oracle checks rules on context tuples only: binary rules on panel
//! pairs (0,1) (1,2) (3,4) (4,5) (6,7), ternary rules on rows (0,1,2) and
//! (3,4,5). The generator rejection-samples until the oracle's first-fit
//! rules reproduce the declared rules and the stored answer.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::codebook::{ObjectLabels, PanelLabels};

pub const TYPE_MAX: u8 = 4;
pub const SIZE_MAX: u8 = 5;
pub const COLOR_MAX: u8 = 9;

/// Panel pairs used by binary rules (the last pair spans row 3's two
/// known panels).
pub const BINARY_PAIRS: [(usize, usize); 5] = [(0, 1), (1, 2), (3, 4), (4, 5), (6, 7)];
/// Full rows available to ternary rules.
pub const TERNARY_ROWS: [(usize, usize, usize); 2] = [(0, 1, 2), (3, 4, 5)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Configuration {
    Center,
    #[serde(rename = "2x2")]
    Grid2,
    #[serde(rename = "3x3")]
    Grid3,
    LeftRight,
    UpDown,
    OutInCenter,
    OutInGrid,
}

impl Configuration {
    pub const ALL: [Configuration; 7] = [
        Configuration::Center,
        Configuration::Grid2,
        Configuration::Grid3,
        Configuration::LeftRight,
        Configuration::UpDown,
        Configuration::OutInCenter,
        Configuration::OutInGrid,
    ];

    /// Slot count of each component grid.
    pub fn component_slots(self) -> Vec<usize> {
        match self {
            Configuration::Center => vec![1],
            Configuration::Grid2 => vec![4],
            Configuration::Grid3 => vec![9],
            Configuration::LeftRight | Configuration::UpDown | Configuration::OutInCenter => {
                vec![1, 1]
            }
            Configuration::OutInGrid => vec![1, 4],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Configuration::Center => "center",
            Configuration::Grid2 => "2x2",
            Configuration::Grid3 => "3x3",
            Configuration::LeftRight => "left-right",
            Configuration::UpDown => "up-down",
            Configuration::OutInCenter => "out-in-center",
            Configuration::OutInGrid => "out-in-grid",
        }
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Configuration {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Configuration::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown configuration: {s}"))
    }
}

/// Row-wise rule labels. OR and DIFF act on position layouts (set union
/// and set difference); XOR and AND are recognized by the oracle but not
/// generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum RuleLabel {
    Constant,
    Progression(i8),
    ArithmeticPlus,
    ArithmeticMinus,
    DistributeThree,
    Or,
    Diff,
    Xor,
    And,
}

impl fmt::Display for RuleLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleLabel::Constant => write!(f, "Constant"),
            RuleLabel::Progression(s) => write!(f, "Progression{s:+}"),
            RuleLabel::ArithmeticPlus => write!(f, "Arithmetic+"),
            RuleLabel::ArithmeticMinus => write!(f, "Arithmetic-"),
            RuleLabel::DistributeThree => write!(f, "DistributeThree"),
            RuleLabel::Or => write!(f, "OR"),
            RuleLabel::Diff => write!(f, "DIFF"),
            RuleLabel::Xor => write!(f, "XOR"),
            RuleLabel::And => write!(f, "AND"),
        }
    }
}

impl From<RuleLabel> for String {
    fn from(r: RuleLabel) -> String {
        r.to_string()
    }
}

impl TryFrom<String> for RuleLabel {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        match s.as_str() {
            "Constant" => Ok(RuleLabel::Constant),
            "Arithmetic+" => Ok(RuleLabel::ArithmeticPlus),
            "Arithmetic-" => Ok(RuleLabel::ArithmeticMinus),
            "DistributeThree" => Ok(RuleLabel::DistributeThree),
            "OR" => Ok(RuleLabel::Or),
            "DIFF" => Ok(RuleLabel::Diff),
            "XOR" => Ok(RuleLabel::Xor),
            "AND" => Ok(RuleLabel::And),
            other => other
                .strip_prefix("Progression")
                .and_then(|t| t.parse::<i8>().ok())
                .map(RuleLabel::Progression)
                .ok_or_else(|| format!("unknown rule label: {other}")),
        }
    }
}

/// Declared rules of one component. Exactly one of number/position is set
/// for grid components; both are absent for single-slot components.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentRules {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub number: Option<RuleLabel>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub position: Option<RuleLabel>,
    pub shape: RuleLabel,
    pub size: RuleLabel,
    pub color: RuleLabel,
}

/// One component: a 3x3 grid of panels (row-major; index 8 is the
/// ground-truth completion) plus its declared rules.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentGrid {
    pub n_slots: usize,
    pub panels: Vec<PanelLabels>,
    pub rules: ComponentRules,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PuzzleSpec {
    pub configuration: Configuration,
    pub components: Vec<ComponentGrid>,
    /// 8 candidates, each with one panel per component.
    pub candidates: Vec<Vec<PanelLabels>>,
    pub answer: usize,
}

/// Oracle output: the first-fit rule per attribute, None when no rule in
/// the catalog is consistent with the context.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FoundRules {
    pub number: Option<RuleLabel>,
    pub position: Option<RuleLabel>,
    pub shape: Option<RuleLabel>,
    pub size: Option<RuleLabel>,
    pub color: Option<RuleLabel>,
}

// -------- panel summaries --------

#[derive(Debug, Clone, PartialEq, Eq)]
struct PanelFacts {
    layout: BTreeSet<usize>,
    /// Uniform attribute values over present objects; None if empty or
    /// non-uniform.
    shape: Option<u8>,
    size: Option<u8>,
    color: Option<u8>,
}

impl PanelFacts {
    fn of(panel: &PanelLabels) -> Self {
        let layout: BTreeSet<usize> = panel
            .slots
            .iter()
            .enumerate()
            .filter_map(|(j, s)| s.is_some().then_some(j))
            .collect();
        let uniform = |f: fn(&ObjectLabels) -> u8| -> Option<u8> {
            let vals: Vec<u8> = panel.slots.iter().flatten().map(f).collect();
            match vals.split_first() {
                Some((v, rest)) if rest.iter().all(|x| x == v) => Some(*v),
                _ => None,
            }
        };
        PanelFacts {
            layout,
            shape: uniform(|o| o.shape),
            size: uniform(|o| o.size),
            color: uniform(|o| o.color),
        }
    }

    fn count(&self) -> usize {
        self.layout.len()
    }
}

// -------- rule catalogs and symbolic checking --------

/// First-fit order for numeric attributes, shared with the reasoner's
/// tie-breaking (binary rules before ternary, Arithmetic before
/// Distribute Three).
pub fn numeric_rule_order() -> Vec<RuleLabel> {
    vec![
        RuleLabel::Constant,
        RuleLabel::Progression(1),
        RuleLabel::Progression(2),
        RuleLabel::Progression(-1),
        RuleLabel::Progression(-2),
        RuleLabel::ArithmeticPlus,
        RuleLabel::ArithmeticMinus,
        RuleLabel::DistributeThree,
    ]
}

/// First-fit order for position layouts: shift rules, then the set rules.
pub fn position_rule_order() -> Vec<RuleLabel> {
    vec![
        RuleLabel::Constant,
        RuleLabel::Progression(1),
        RuleLabel::Progression(2),
        RuleLabel::Progression(-1),
        RuleLabel::Progression(-2),
        RuleLabel::DistributeThree,
        RuleLabel::Or,
        RuleLabel::Diff,
        RuleLabel::Xor,
        RuleLabel::And,
    ]
}

fn values_satisfy(rule: RuleLabel, v: &[Option<i64>; 8], lo: i64, hi: i64) -> Option<i64> {
    let val = |i: usize| v[i];
    match rule {
        RuleLabel::Constant | RuleLabel::Progression(_) => {
            let step = match rule {
                RuleLabel::Progression(s) => i64::from(s),
                _ => 0,
            };
            for (a, b) in BINARY_PAIRS {
                if val(a)? + step != val(b)? {
                    return None;
                }
            }
            let out = val(7)? + step;
            (lo..=hi).contains(&out).then_some(out)
        }
        RuleLabel::ArithmeticPlus | RuleLabel::ArithmeticMinus => {
            let sign = if rule == RuleLabel::ArithmeticPlus { 1 } else { -1 };
            for (a, b, c) in TERNARY_ROWS {
                if val(a)? + sign * val(b)? != val(c)? {
                    return None;
                }
            }
            let out = val(6)? + sign * val(7)?;
            (lo..=hi).contains(&out).then_some(out)
        }
        RuleLabel::DistributeThree => {
            let set: BTreeSet<i64> = [val(0)?, val(1)?, val(2)?].into();
            if set.len() != 3 {
                return None;
            }
            let second: BTreeSet<i64> = [val(3)?, val(4)?, val(5)?].into();
            if set != second {
                return None;
            }
            let (a, b) = (val(6)?, val(7)?);
            if a == b || !set.contains(&a) || !set.contains(&b) {
                return None;
            }
            set.into_iter().find(|&x| x != a && x != b)
        }
        _ => None,
    }
}

fn shift_layout(s: &BTreeSet<usize>, by: i64, cells: usize) -> BTreeSet<usize> {
    s.iter()
        .map(|&j| (j as i64 + by).rem_euclid(cells as i64) as usize)
        .collect()
}

fn layouts_satisfy(
    rule: RuleLabel,
    l: &[&BTreeSet<usize>; 8],
    cells: usize,
) -> Option<BTreeSet<usize>> {
    let check_binary = |step: i64| -> Option<BTreeSet<usize>> {
        for (a, b) in BINARY_PAIRS {
            if &shift_layout(l[a], step, cells) != l[b] {
                return None;
            }
        }
        Some(shift_layout(l[7], step, cells))
    };
    let check_setop = |f: fn(&BTreeSet<usize>, &BTreeSet<usize>) -> BTreeSet<usize>| {
        for (a, b, c) in TERNARY_ROWS {
            if &f(l[a], l[b]) != l[c] {
                return None;
            }
        }
        let out = f(l[6], l[7]);
        (!out.is_empty()).then_some(out)
    };
    match rule {
        RuleLabel::Constant => check_binary(0),
        RuleLabel::Progression(s) => check_binary(i64::from(s)),
        RuleLabel::Or => check_setop(|a, b| a.union(b).cloned().collect()),
        RuleLabel::Diff => check_setop(|a, b| a.difference(b).cloned().collect()),
        RuleLabel::Xor => check_setop(|a, b| a.symmetric_difference(b).cloned().collect()),
        RuleLabel::And => check_setop(|a, b| a.intersection(b).cloned().collect()),
        RuleLabel::DistributeThree => {
            let rows: Vec<BTreeSet<&BTreeSet<usize>>> =
                vec![[l[0], l[1], l[2]].into(), [l[3], l[4], l[5]].into()];
            if rows[0].len() != 3 || rows[0] != rows[1] {
                return None;
            }
            if l[6] == l[7] || !rows[0].contains(l[6]) || !rows[0].contains(l[7]) {
                return None;
            }
            rows[0]
                .iter()
                .find(|&&s| s != l[6] && s != l[7])
                .map(|&s| s.clone())
        }
        _ => None,
    }
}

/// Per-component oracle: first-fit rules and the predicted completion.
#[derive(Debug, Clone)]
pub struct ComponentPrediction {
    pub rules: FoundRules,
    pub shape: Option<i64>,
    pub size: Option<i64>,
    pub color: Option<i64>,
    pub count: Option<i64>,
    pub layout: Option<BTreeSet<usize>>,
}

pub fn predict_component(grid: &ComponentGrid) -> ComponentPrediction {
    let facts: Vec<PanelFacts> = grid.panels[..8].iter().map(PanelFacts::of).collect();
    let mut rules = FoundRules::default();
    let mut pred = ComponentPrediction {
        rules: FoundRules::default(),
        shape: None,
        size: None,
        color: None,
        count: None,
        layout: None,
    };

    let entity = |field: fn(&PanelFacts) -> Option<u8>, hi: i64| -> (Option<RuleLabel>, Option<i64>) {
        let v: [Option<i64>; 8] = std::array::from_fn(|i| field(&facts[i]).map(i64::from));
        for rule in numeric_rule_order() {
            if let Some(out) = values_satisfy(rule, &v, 0, hi) {
                return (Some(rule), Some(out));
            }
        }
        (None, None)
    };
    (rules.shape, pred.shape) = entity(|f| f.shape, i64::from(TYPE_MAX));
    (rules.size, pred.size) = entity(|f| f.size, i64::from(SIZE_MAX));
    (rules.color, pred.color) = entity(|f| f.color, i64::from(COLOR_MAX));

    if grid.n_slots > 1 {
        let cells = grid.n_slots;
        let layouts: [&BTreeSet<usize>; 8] = std::array::from_fn(|i| &facts[i].layout);
        for rule in position_rule_order() {
            if let Some(out) = layouts_satisfy(rule, &layouts, cells) {
                rules.position = Some(rule);
                pred.layout = Some(out);
                break;
            }
        }
        let counts: [Option<i64>; 8] = std::array::from_fn(|i| Some(facts[i].count() as i64));
        for rule in numeric_rule_order() {
            if let Some(out) = values_satisfy(rule, &counts, 1, cells as i64) {
                rules.number = Some(rule);
                pred.count = Some(out);
                break;
            }
        }
    }
    pred.rules = rules;
    pred
}

fn candidate_matches(pred: &ComponentPrediction, panel: &PanelLabels) -> bool {
    let facts = PanelFacts::of(panel);
    if let Some(layout) = &pred.layout {
        if &facts.layout != layout {
            return false;
        }
    } else if let Some(count) = pred.count {
        if facts.count() as i64 != count {
            return false;
        }
    }
    let check = |want: Option<i64>, got: Option<u8>| match want {
        Some(w) => got.map(i64::from) == Some(w),
        None => true,
    };
    check(pred.shape, facts.shape)
        && check(pred.size, facts.size)
        && check(pred.color, facts.color)
}

/// Brute-force solve: abduce first-fit rules per component and attribute,
/// complete row 3, and return the index of the first matching candidate.
/// Returns None for the index when no candidate (or no rule) fits.
pub fn symbolic_solve(spec: &PuzzleSpec) -> (Option<usize>, Vec<FoundRules>) {
    let preds: Vec<ComponentPrediction> =
        spec.components.iter().map(predict_component).collect();
    let rules: Vec<FoundRules> = preds.iter().map(|p| p.rules.clone()).collect();
    let solvable = preds.iter().all(|p| {
        p.shape.is_some()
            && p.size.is_some()
            && p.color.is_some()
            && (p.count.is_some() || p.layout.is_some() || p.rules.position.is_none())
    });
    if !solvable {
        return (None, rules);
    }
    let index = spec.candidates.iter().position(|cand| {
        cand.iter()
            .zip(preds.iter())
            .all(|(panel, pred)| candidate_matches(pred, panel))
    });
    (index, rules)
}

// -------- generation --------

struct AttrPlan {
    rule: RuleLabel,
    /// Values of all 9 panels (including the answer).
    values: [i64; 9],
}

fn sample_numeric_rows<R: Rng + ?Sized>(
    rule: RuleLabel,
    lo: i64,
    hi: i64,
    rng: &mut R,
) -> Option<[i64; 9]> {
    let mut v = [0i64; 9];
    match rule {
        RuleLabel::Constant => {
            for row in 0..3 {
                let x = rng.gen_range(lo..=hi);
                v[row * 3..row * 3 + 3].fill(x);
            }
        }
        RuleLabel::Progression(s) => {
            let s = i64::from(s);
            let (a, b) = (lo.max(lo - 2 * s), hi.min(hi - 2 * s));
            if a > b {
                return None;
            }
            for row in 0..3 {
                let x = rng.gen_range(a..=b);
                for col in 0..3 {
                    v[row * 3 + col] = x + s * col as i64;
                }
            }
        }
        RuleLabel::ArithmeticPlus | RuleLabel::ArithmeticMinus => {
            let sign = if rule == RuleLabel::ArithmeticPlus { 1 } else { -1 };
            for row in 0..3 {
                let mut ok = false;
                for _ in 0..64 {
                    let x = rng.gen_range(lo..=hi);
                    let y = rng.gen_range(lo..=hi);
                    let z = x + sign * y;
                    if (lo..=hi).contains(&z) {
                        v[row * 3] = x;
                        v[row * 3 + 1] = y;
                        v[row * 3 + 2] = z;
                        ok = true;
                        break;
                    }
                }
                if !ok {
                    return None;
                }
            }
        }
        RuleLabel::DistributeThree => {
            if hi - lo < 2 {
                return None;
            }
            let mut pool: Vec<i64> = (lo..=hi).collect();
            pool.shuffle(rng);
            let mut trio = [pool[0], pool[1], pool[2]];
            trio.shuffle(rng);
            let dir = rng.gen_range(0..2) as usize;
            for row in 0..3 {
                for col in 0..3 {
                    let idx = if dir == 0 { (col + row) % 3 } else { (col + 2 * row) % 3 };
                    v[row * 3 + col] = trio[idx];
                }
            }
        }
        _ => return None,
    }
    Some(v)
}

fn random_layout<R: Rng + ?Sized>(cells: usize, count: usize, rng: &mut R) -> BTreeSet<usize> {
    let mut idx: Vec<usize> = (0..cells).collect();
    idx.shuffle(rng);
    idx.into_iter().take(count).collect()
}

/// Layout pair constraints for the set rules: overlapping, mutually
/// non-containing, and not covering the whole grid. These keep OR, DIFF,
/// XOR, and AND distinguishable from each other on every row.
fn sample_setop_row<R: Rng + ?Sized>(
    cells: usize,
    union: bool,
    rng: &mut R,
) -> Option<[BTreeSet<usize>; 3]> {
    for _ in 0..256 {
        let a = random_layout(cells, rng.gen_range(2..cells), rng);
        let b = random_layout(cells, rng.gen_range(2..cells), rng);
        let inter: BTreeSet<usize> = a.intersection(&b).cloned().collect();
        let a_only: BTreeSet<usize> = a.difference(&b).cloned().collect();
        let b_only: BTreeSet<usize> = b.difference(&a).cloned().collect();
        let uni: BTreeSet<usize> = a.union(&b).cloned().collect();
        if inter.is_empty() || a_only.is_empty() || b_only.is_empty() || uni.len() == cells {
            continue;
        }
        let c = if union { uni } else { a_only };
        return Some([a, b, c]);
    }
    None
}

fn sample_layouts<R: Rng + ?Sized>(
    rule: RuleLabel,
    cells: usize,
    rng: &mut R,
) -> Option<[BTreeSet<usize>; 9]> {
    let mut l: [BTreeSet<usize>; 9] = Default::default();
    match rule {
        RuleLabel::Constant => {
            for row in 0..3 {
                let s = random_layout(cells, rng.gen_range(1..=cells), rng);
                for col in 0..3 {
                    l[row * 3 + col] = s.clone();
                }
            }
        }
        RuleLabel::Progression(step) => {
            let step = i64::from(step);
            for row in 0..3 {
                let mut s;
                let mut tries = 0;
                loop {
                    s = random_layout(cells, rng.gen_range(1..cells), rng);
                    if shift_layout(&s, step, cells) != s {
                        break;
                    }
                    tries += 1;
                    if tries > 64 {
                        return None;
                    }
                }
                for col in 0..3 {
                    l[row * 3 + col] = shift_layout(&s, step * col as i64, cells);
                }
            }
        }
        RuleLabel::Or | RuleLabel::Diff => {
            for row in 0..3 {
                let triple = sample_setop_row(cells, rule == RuleLabel::Or, rng)?;
                for (col, s) in triple.into_iter().enumerate() {
                    l[row * 3 + col] = s;
                }
            }
        }
        RuleLabel::DistributeThree => {
            let mut trio: Vec<BTreeSet<usize>> = Vec::new();
            let mut tries = 0;
            while trio.len() < 3 {
                let s = random_layout(cells, rng.gen_range(1..=cells), rng);
                if !trio.contains(&s) {
                    trio.push(s);
                }
                tries += 1;
                if tries > 256 {
                    return None;
                }
            }
            let dir = rng.gen_range(0..2) as usize;
            for row in 0..3 {
                for col in 0..3 {
                    let idx = if dir == 0 { (col + row) % 3 } else { (col + 2 * row) % 3 };
                    l[row * 3 + col] = trio[idx].clone();
                }
            }
        }
        _ => return None,
    }
    Some(l)
}

fn entity_rule_pool(max: i64, allow_arithmetic: bool) -> Vec<RuleLabel> {
    let mut pool = vec![
        RuleLabel::Constant,
        RuleLabel::Progression(1),
        RuleLabel::Progression(-1),
        RuleLabel::DistributeThree,
    ];
    if max >= 4 {
        pool.push(RuleLabel::Progression(2));
        pool.push(RuleLabel::Progression(-2));
    }
    if allow_arithmetic {
        pool.push(RuleLabel::ArithmeticPlus);
        pool.push(RuleLabel::ArithmeticMinus);
    }
    pool
}

fn sample_entity_plan<R: Rng + ?Sized>(max: u8, allow_arith: bool, rng: &mut R) -> AttrPlan {
    loop {
        let pool = entity_rule_pool(i64::from(max), allow_arith);
        let rule = *pool.choose(rng).unwrap();
        if let Some(values) = sample_numeric_rows(rule, 0, i64::from(max), rng) {
            return AttrPlan { rule, values };
        }
    }
}

struct ComponentPlan {
    n_slots: usize,
    rules: ComponentRules,
    shape: [i64; 9],
    size: [i64; 9],
    color: [i64; 9],
    layouts: [BTreeSet<usize>; 9],
}

fn sample_component<R: Rng + ?Sized>(n_slots: usize, rng: &mut R) -> ComponentPlan {
    let shape = sample_entity_plan(TYPE_MAX, false, rng);
    let size = sample_entity_plan(SIZE_MAX, true, rng);
    let color = sample_entity_plan(COLOR_MAX, true, rng);

    let (number, position, layouts) = if n_slots == 1 {
        let l: [BTreeSet<usize>; 9] = std::array::from_fn(|_| BTreeSet::from([0]));
        (None, None, l)
    } else if rng.gen_bool(0.5) {
        // Number governs: counts follow the rule, cell choices are free
        loop {
            let mut pool = vec![RuleLabel::Constant, RuleLabel::DistributeThree];
            if n_slots >= 3 {
                pool.push(RuleLabel::Progression(1));
                pool.push(RuleLabel::Progression(-1));
                pool.push(RuleLabel::ArithmeticPlus);
                pool.push(RuleLabel::ArithmeticMinus);
            }
            if n_slots >= 9 {
                pool.push(RuleLabel::Progression(2));
                pool.push(RuleLabel::Progression(-2));
            }
            let rule = *pool.choose(rng).unwrap();
            if let Some(counts) = sample_numeric_rows(rule, 1, n_slots as i64, rng) {
                let layouts: [BTreeSet<usize>; 9] =
                    std::array::from_fn(|i| random_layout(n_slots, counts[i] as usize, rng));
                break (Some(rule), None, layouts);
            }
        }
    } else {
        // Position governs the layouts directly
        loop {
            let mut pool = vec![
                RuleLabel::Constant,
                RuleLabel::Progression(1),
                RuleLabel::Progression(-1),
                RuleLabel::Or,
                RuleLabel::Diff,
                RuleLabel::DistributeThree,
            ];
            if n_slots >= 9 {
                pool.push(RuleLabel::Progression(2));
                pool.push(RuleLabel::Progression(-2));
            }
            let rule = *pool.choose(rng).unwrap();
            if let Some(layouts) = sample_layouts(rule, n_slots, rng) {
                break (None, Some(rule), layouts);
            }
        }
    };

    ComponentPlan {
        n_slots,
        rules: ComponentRules {
            number,
            position,
            shape: shape.rule,
            size: size.rule,
            color: color.rule,
        },
        shape: shape.values,
        size: size.values,
        color: color.values,
        layouts,
    }
}

fn panel_from(plan: &ComponentPlan, layout: &BTreeSet<usize>, panel: usize) -> PanelLabels {
    PanelLabels {
        slots: (0..plan.n_slots)
            .map(|j| {
                layout.contains(&j).then_some(ObjectLabels {
                    shape: plan.shape[panel] as u8,
                    size: plan.size[panel] as u8,
                    color: plan.color[panel] as u8,
                })
            })
            .collect(),
    }
}

fn build_grid(plan: &ComponentPlan) -> ComponentGrid {
    ComponentGrid {
        n_slots: plan.n_slots,
        panels: (0..9).map(|i| panel_from(plan, &plan.layouts[i], i)).collect(),
        rules: plan.rules.clone(),
    }
}

/// One perturbable attribute of one component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum GovernedAttr {
    Shape,
    Size,
    Color,
    Number,
    Position,
}

fn governed_attrs(components: &[ComponentGrid]) -> Vec<(usize, GovernedAttr)> {
    let mut out = Vec::new();
    for (ci, c) in components.iter().enumerate() {
        out.push((ci, GovernedAttr::Shape));
        out.push((ci, GovernedAttr::Size));
        out.push((ci, GovernedAttr::Color));
        if c.rules.number.is_some() {
            out.push((ci, GovernedAttr::Number));
        }
        if c.rules.position.is_some() {
            out.push((ci, GovernedAttr::Position));
        }
    }
    out
}

fn perturb<R: Rng + ?Sized>(panel: &PanelLabels, attr: GovernedAttr, rng: &mut R) -> PanelLabels {
    let facts = PanelFacts::of(panel);
    let cells = panel.slots.len();
    let set_entity = |layout: &BTreeSet<usize>, f: &dyn Fn(&mut ObjectLabels)| PanelLabels {
        slots: (0..cells)
            .map(|j| {
                layout.contains(&j).then(|| {
                    let mut o = panel
                        .slots
                        .iter()
                        .flatten()
                        .next()
                        .copied()
                        .unwrap_or(ObjectLabels { shape: 0, size: 0, color: 0 });
                    f(&mut o);
                    o
                })
            })
            .collect(),
    };
    let fresh = |cur: u8, max: u8, rng: &mut R| -> u8 {
        loop {
            let v = rng.gen_range(0..=max);
            if v != cur {
                return v;
            }
        }
    };
    match attr {
        GovernedAttr::Shape => {
            let v = fresh(facts.shape.unwrap_or(0), TYPE_MAX, rng);
            set_entity(&facts.layout, &|o| o.shape = v)
        }
        GovernedAttr::Size => {
            let v = fresh(facts.size.unwrap_or(0), SIZE_MAX, rng);
            set_entity(&facts.layout, &|o| o.size = v)
        }
        GovernedAttr::Color => {
            let v = fresh(facts.color.unwrap_or(0), COLOR_MAX, rng);
            set_entity(&facts.layout, &|o| o.color = v)
        }
        GovernedAttr::Number => {
            let cur = facts.count();
            let count = loop {
                let c = rng.gen_range(1..=cells);
                if c != cur {
                    break c;
                }
            };
            let layout = random_layout(cells, count, rng);
            set_entity(&layout, &|_| {})
        }
        GovernedAttr::Position => {
            let layout = loop {
                let l = random_layout(cells, rng.gen_range(1..=cells), rng);
                if l != facts.layout {
                    break l;
                }
            };
            set_entity(&layout, &|_| {})
        }
    }
}

/// Attribute-bisection candidate set: three splits over distinct governed
/// attributes double the pool from the true answer to 8 symbolically
/// distinct candidates; every distractor differs from the answer in at
/// least one rule-governed attribute.
pub fn generate_candidates<R: Rng + ?Sized>(
    components: &[ComponentGrid],
    rng: &mut R,
) -> (Vec<Vec<PanelLabels>>, usize) {
    let answer: Vec<PanelLabels> = components.iter().map(|c| c.panels[8].clone()).collect();
    let mut attrs = governed_attrs(components);
    attrs.shuffle(rng);
    attrs.truncate(3);
    let mut pool: Vec<Vec<PanelLabels>> = vec![answer.clone()];
    for (ci, attr) in attrs {
        let mut next = pool.clone();
        for cand in &pool {
            let mut copy = cand.clone();
            copy[ci] = perturb(&cand[ci], attr, rng);
            next.push(copy);
        }
        pool = next;
    }
    let mut order: Vec<usize> = (0..pool.len()).collect();
    order.shuffle(rng);
    let candidates: Vec<Vec<PanelLabels>> = order.iter().map(|&i| pool[i].clone()).collect();
    let answer_index = order.iter().position(|&i| i == 0).unwrap();
    (candidates, answer_index)
}

fn declared_consistent(spec: &PuzzleSpec) -> bool {
    let (idx, found) = symbolic_solve(spec);
    if idx != Some(spec.answer) {
        return false;
    }
    // uniqueness: no other candidate may satisfy all found rules
    let preds: Vec<ComponentPrediction> =
        spec.components.iter().map(predict_component).collect();
    let matches = spec
        .candidates
        .iter()
        .filter(|cand| {
            cand.iter()
                .zip(preds.iter())
                .all(|(panel, pred)| candidate_matches(pred, panel))
        })
        .count();
    if matches != 1 {
        return false;
    }
    spec.components.iter().zip(found.iter()).all(|(c, f)| {
        f.shape == Some(c.rules.shape)
            && f.size == Some(c.rules.size)
            && f.color == Some(c.rules.color)
            && (c.rules.number.is_none() || f.number == c.rules.number)
            && (c.rules.position.is_none() || f.position == c.rules.position)
    })
}

/// Samples one puzzle. Rejection-samples until the oracle's first-fit
/// rules reproduce the declared rules, the answer is the unique matching
/// candidate, and the stored answer index is recovered.
pub fn generate_puzzle<R: Rng + ?Sized>(configuration: Configuration, rng: &mut R) -> PuzzleSpec {
    loop {
        let components: Vec<ComponentGrid> = configuration
            .component_slots()
            .into_iter()
            .map(|n| build_grid(&sample_component(n, rng)))
            .collect();
        let (candidates, answer) = generate_candidates(&components, rng);
        let spec = PuzzleSpec { configuration, components, candidates, answer };
        if declared_consistent(&spec) {
            return spec;
        }
    }
}
