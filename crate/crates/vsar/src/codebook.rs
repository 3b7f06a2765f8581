//! Codebooks and the query/attention pipeline. Frontend books hold random
//! vectors used for similarity queries; backend books hold the structured
//! encoders (numeric, boolean, circular) that the reasoner operates on.
//! Panel encodings are produced from symbolic labels through attention
//! weights, with an optional noise mix standing in for a perception stage.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::atomic::{BooleanCodec, CircularCodec, NumericCodec};
use crate::error::{Result, VsaError};
use crate::vsa::HdVector;

pub const VALUE_RANGE: usize = 10;
/// Index of the null entry in the numeric frontend book.
pub const NULL_INDEX: usize = VALUE_RANGE;

/// All codebooks, keys, and position vectors for one model instance.
#[derive(Debug, Clone)]
pub struct CodebookSet {
    pub d: usize,
    pub beta: f64,
    /// v(0..9) plus v_null, all random vectors.
    pub frontend_num: Vec<HdVector>,
    /// Role vectors for absent / present.
    pub frontend_lgc: [HdVector; 2],
    pub backend_num: NumericCodec,
    pub backend_null: HdVector,
    pub backend_lgc_bv: BooleanCodec,
    /// Random existence fillers for absent / present (grid occupancy).
    pub backend_lgc_rv: [HdVector; 2],
    /// Grid position codecs, period n² for n = 2 and n = 3.
    pub backend_pos2: CircularCodec,
    pub backend_pos3: CircularCodec,
    /// Entity role keys ordered as EntityAttr::ALL.
    pub entity_keys: [HdVector; 4],
    /// Scene-level slot positions (random vectors).
    pub scene_positions: Vec<HdVector>,
}

impl CodebookSet {
    pub fn build(d: usize, seed: u64, beta: f64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let frontend_num = (0..=VALUE_RANGE)
            .map(|_| HdVector::random(d, &mut rng))
            .collect::<Result<Vec<_>>>()?;
        let frontend_lgc = [HdVector::random(d, &mut rng)?, HdVector::random(d, &mut rng)?];
        let backend_num = NumericCodec::new(d, &mut rng)?;
        let backend_null = HdVector::random(d, &mut rng)?;
        let backend_lgc_bv = BooleanCodec::new(d, &mut rng)?;
        let backend_lgc_rv = [HdVector::random(d, &mut rng)?, HdVector::random(d, &mut rng)?];
        let backend_pos2 = CircularCodec::new(4, d, &mut rng)?;
        let backend_pos3 = CircularCodec::new(9, d, &mut rng)?;
        let entity_keys = [
            HdVector::random(d, &mut rng)?,
            HdVector::random(d, &mut rng)?,
            HdVector::random(d, &mut rng)?,
            HdVector::random(d, &mut rng)?,
        ];
        let scene_positions = (0..9)
            .map(|_| HdVector::random(d, &mut rng))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            d,
            beta,
            frontend_num,
            frontend_lgc,
            backend_num,
            backend_null,
            backend_lgc_bv,
            backend_lgc_rv,
            backend_pos2,
            backend_pos3,
            entity_keys,
            scene_positions,
        })
    }

    /// Backend numeric vector for a frontend weight index.
    pub fn backend_entry(&self, index: usize) -> Result<HdVector> {
        if index == NULL_INDEX {
            Ok(self.backend_null.clone())
        } else {
            self.backend_num.encode(index as f64)
        }
    }

    pub fn grid_positions(&self, n_slots: usize) -> Option<&CircularCodec> {
        match n_slots {
            4 => Some(&self.backend_pos2),
            9 => Some(&self.backend_pos3),
            _ => None,
        }
    }
}

/// Raw similarity weights against a book; softmax (with inverse temperature
/// beta) is applied only when requested, mirroring the existence-only
/// normalization of the attention stage.
pub fn query_weights(estimate: &HdVector, book: &[HdVector], beta: Option<f64>) -> Result<Vec<f64>> {
    if book.is_empty() {
        return Err(VsaError::EmptyBundle);
    }
    let mut w: Vec<f64> = book
        .iter()
        .map(|e| estimate.similarity(e))
        .collect::<Result<_>>()?;
    if let Some(beta) = beta {
        softmax_in_place(&mut w, beta);
    }
    Ok(w)
}

pub fn softmax_in_place(w: &mut [f64], beta: f64) {
    let m = w.iter().cloned().fold(f64::MIN, f64::max);
    let mut z = 0.0;
    for x in w.iter_mut() {
        *x = ((*x - m) * beta).exp();
        z += *x;
    }
    for x in w.iter_mut() {
        *x /= z;
    }
}

/// Symbolic labels for one object slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectLabels {
    pub shape: u8,
    pub size: u8,
    pub color: u8,
}

/// Symbolic labels for one panel: a fixed slot layout with optional objects.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PanelLabels {
    pub slots: Vec<Option<ObjectLabels>>,
}

impl PanelLabels {
    pub fn n_slots(&self) -> usize {
        self.slots.len()
    }

    pub fn count(&self) -> usize {
        self.slots.iter().filter(|s| s.is_some()).count()
    }
}

/// Per-slot attention-stage outputs.
#[derive(Debug, Clone)]
pub struct SlotEncoding {
    pub shape: HdVector,
    pub size: HdVector,
    pub color: HdVector,
    pub exist_bv: HdVector,
    pub exist_rv: HdVector,
    /// Presence weight W_j(present) after softmax.
    pub presence: f64,
}

/// Reasoning-ready panel representation.
#[derive(Debug, Clone)]
pub struct PanelEncoding {
    pub slots: Vec<SlotEncoding>,
    /// Numeric base raised to the summed presence weights.
    pub number: HdVector,
    /// Presence-weighted sums of the per-slot attribute vectors
    /// (shape, size, color).
    pub overall: [HdVector; 3],
    /// Grid occupancy vector; None for single-slot panels.
    pub position: Option<HdVector>,
}

fn noisy_onehot<R: Rng + ?Sized>(len: usize, hot: usize, eta: f64, rng: &mut R) -> Vec<f64> {
    // uniform random probability vector; at eta = 0 it is skipped entirely
    let mut w = vec![0.0; len];
    w[hot] = 1.0 - eta;
    if eta > 0.0 {
        let g: Vec<f64> = (0..len).map(|_| rng.gen_range(0.0..1.0)).collect();
        let z: f64 = g.iter().sum();
        for (wi, gi) in w.iter_mut().zip(g) {
            *wi += eta * gi / z;
        }
    }
    w
}

fn weighted_entry_sum(books: &CodebookSet, w: &[f64]) -> Result<HdVector> {
    let mut terms: Vec<(f64, HdVector)> = Vec::new();
    for (i, &wi) in w.iter().enumerate() {
        if wi.abs() < 1e-12 {
            continue;
        }
        terms.push((wi, books.backend_entry(i)?));
    }
    let refs: Vec<(f64, &HdVector)> = terms.iter().map(|(w, v)| (*w, v)).collect();
    HdVector::weighted_sum(&refs)
}

fn weighted_pair(w: &[f64; 2], pair: [&HdVector; 2]) -> Result<HdVector> {
    HdVector::weighted_sum(&[(w[0], pair[0]), (w[1], pair[1])])
}

/// Turns symbolic labels into a PanelEncoding. `eta` mixes the one-hot
/// label weights with a random probability vector before the attention
/// stage; existence weights are softmaxed, numeric weights are used raw.
pub fn encode_panel_from_labels<R: Rng + ?Sized>(
    labels: &PanelLabels,
    books: &CodebookSet,
    eta: f64,
    rng: &mut R,
) -> Result<PanelEncoding> {
    let n_slots = labels.n_slots();
    let mut slots = Vec::with_capacity(n_slots);
    for slot in &labels.slots {
        let idx = |v: u8, attr: &'static str| -> Result<usize> {
            if (v as usize) < VALUE_RANGE {
                Ok(v as usize)
            } else {
                Err(VsaError::LabelOutOfRange { attribute: attr, value: v as i64 })
            }
        };
        let (ti, si, ci, present) = match slot {
            Some(o) => (
                idx(o.shape, "type")?,
                idx(o.size, "size")?,
                idx(o.color, "color")?,
                true,
            ),
            None => (NULL_INDEX, NULL_INDEX, NULL_INDEX, false),
        };
        let shape = weighted_entry_sum(books, &noisy_onehot(VALUE_RANGE + 1, ti, eta, rng))?;
        let size = weighted_entry_sum(books, &noisy_onehot(VALUE_RANGE + 1, si, eta, rng))?;
        let color = weighted_entry_sum(books, &noisy_onehot(VALUE_RANGE + 1, ci, eta, rng))?;
        let mut ew = noisy_onehot(2, usize::from(present), eta, rng);
        softmax_in_place(&mut ew, books.beta);
        let ew = [ew[0], ew[1]];
        let exist_bv = weighted_pair(
            &ew,
            [books.backend_lgc_bv.e0(), books.backend_lgc_bv.e1()],
        )?;
        let exist_rv = weighted_pair(&ew, [&books.backend_lgc_rv[0], &books.backend_lgc_rv[1]])?;
        slots.push(SlotEncoding { shape, size, color, exist_bv, exist_rv, presence: ew[1] });
    }

    let total_presence: f64 = slots.iter().map(|s| s.presence).sum();
    let number = books.backend_num.encode(total_presence)?;

    let overalls: Vec<HdVector> = [0usize, 1, 2]
        .iter()
        .map(|&a| {
            let terms: Vec<(f64, &HdVector)> = slots
                .iter()
                .map(|s| {
                    (s.presence, match a {
                        0 => &s.shape,
                        1 => &s.size,
                        _ => &s.color,
                    })
                })
                .collect();
            HdVector::weighted_sum(&terms)
        })
        .collect::<Result<_>>()?;
    let overall = [overalls[0].clone(), overalls[1].clone(), overalls[2].clone()];

    let position = match books.grid_positions(n_slots) {
        Some(codec) => {
            let terms: Vec<(f64, HdVector)> = slots
                .iter()
                .enumerate()
                .map(|(j, s)| {
                    codec
                        .encode_int(j as i64)
                        .bind(&s.exist_rv)
                        .map(|v| (s.presence, v))
                })
                .collect::<Result<_>>()?;
            let refs: Vec<(f64, &HdVector)> = terms.iter().map(|(w, v)| (*w, v)).collect();
            Some(HdVector::weighted_sum(&refs)?)
        }
        None => None,
    };

    Ok(PanelEncoding { slots, number, overall, position })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::{compose_grid, compose_panel, decompose_panel, ObjectFillers};
    use crate::vsa::cleanup_index;

    const D: usize = 3000;
    const BETA: f64 = 20.0;

    fn books() -> CodebookSet {
        CodebookSet::build(D, 42, BETA).unwrap()
    }

    fn single(shape: u8, size: u8, color: u8) -> PanelLabels {
        PanelLabels { slots: vec![Some(ObjectLabels { shape, size, color })] }
    }

    fn grid9(cells: &[usize]) -> PanelLabels {
        PanelLabels {
            slots: (0..9)
                .map(|j| {
                    cells
                        .contains(&j)
                        .then_some(ObjectLabels { shape: 1, size: 2, color: 3 })
                })
                .collect(),
        }
    }

    #[test]
    fn build_is_deterministic() {
        let a = CodebookSet::build(D, 7, BETA).unwrap();
        let b = CodebookSet::build(D, 7, BETA).unwrap();
        assert_eq!(a.frontend_num[3].entries(), b.frontend_num[3].entries());
        assert_eq!(a.backend_null.entries(), b.backend_null.entries());
    }

    #[test]
    fn backend_numeric_homomorphism_and_periodicity() {
        let b = books();
        let lhs = b.backend_entry(2).unwrap().bind(&b.backend_entry(3).unwrap()).unwrap();
        assert!(lhs.similarity(&b.backend_entry(5).unwrap()).unwrap() > 1.0 - 1e-12);
        assert_eq!(
            b.backend_pos3.encode_int(4 + 9).entries(),
            b.backend_pos3.encode_int(4).entries()
        );
    }

    #[test]
    fn query_weights_basics() {
        let b = books();
        let w = query_weights(&b.frontend_num[3], &b.frontend_num, None).unwrap();
        assert!((w[3] - 1.0).abs() < 1e-12);
        for (i, wi) in w.iter().enumerate() {
            if i != 3 {
                assert!(wi.abs() < 0.1);
            }
        }
        let bundle = HdVector::bundle(&[&b.frontend_num[1], &b.frontend_num[2]], false).unwrap();
        let w = query_weights(&bundle, &b.frontend_num, None).unwrap();
        let mut order: Vec<usize> = (0..w.len()).collect();
        order.sort_by(|&i, &j| w[j].partial_cmp(&w[i]).unwrap());
        assert!(order[..2].contains(&1) && order[..2].contains(&2));
    }

    #[test]
    fn softmax_saturates_at_beta_twenty() {
        let mut w = vec![0.9, 0.1];
        softmax_in_place(&mut w, 20.0);
        assert!(w[0] > 0.9999);
        assert!(w[1] < 1e-6);
    }

    #[test]
    fn clean_single_object_selects_backend_entries() {
        let b = books();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let enc = encode_panel_from_labels(&single(2, 3, 7), &b, 0.0, &mut rng).unwrap();
        assert!(enc.slots[0].shape.similarity(&b.backend_entry(2).unwrap()).unwrap() > 0.95);
        assert!(enc.slots[0].size.similarity(&b.backend_entry(3).unwrap()).unwrap() > 0.95);
        assert!(enc.slots[0].color.similarity(&b.backend_entry(7).unwrap()).unwrap() > 0.95);
        assert!(enc.position.is_none());
    }

    #[test]
    fn number_encoding_tracks_object_count() {
        let b = books();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for cells in [vec![0], vec![0, 4], vec![0, 4, 8], (0..9).collect::<Vec<_>>()] {
            let enc = encode_panel_from_labels(&grid9(&cells), &b, 0.0, &mut rng).unwrap();
            let total: f64 = enc.slots.iter().map(|s| s.presence).sum();
            assert!((total - cells.len() as f64).abs() < 0.01);
            let expected = b.backend_num.encode(cells.len() as f64).unwrap();
            assert!(enc.number.similarity(&expected).unwrap() > 0.999);
        }
    }

    #[test]
    fn position_encoding_matches_grid_composition() {
        let b = books();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cells = [0usize, 4, 8];
        let enc = encode_panel_from_labels(&grid9(&cells), &b, 0.0, &mut rng).unwrap();
        let exist: Vec<HdVector> = (0..9)
            .map(|j| {
                if cells.contains(&j) {
                    b.backend_lgc_rv[1].clone()
                } else {
                    HdVector::zero(D).unwrap()
                }
            })
            .collect();
        let reference = compose_grid(&exist, &b.backend_pos3).unwrap();
        assert!(enc.position.as_ref().unwrap().similarity(&reference.vector).unwrap() > 0.99);
    }

    #[test]
    fn overall_attributes_sum_present_slots() {
        let b = books();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let enc = encode_panel_from_labels(&grid9(&[1, 5]), &b, 0.0, &mut rng).unwrap();
        let expected = HdVector::weighted_sum(&[
            (1.0, &b.backend_entry(3).unwrap()),
            (1.0, &b.backend_entry(3).unwrap()),
        ])
        .unwrap();
        assert!(enc.overall[2].similarity(&expected).unwrap() > 0.999);
    }

    #[test]
    fn noisy_labels_keep_argmax_below_threshold_eta() {
        let b = books();
        for eta in [0.1, 0.2, 0.3, 0.39] {
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            let enc = encode_panel_from_labels(&single(2, 3, 7), &b, eta, &mut rng).unwrap();
            let backend: Vec<HdVector> =
                (0..=NULL_INDEX).map(|i| b.backend_entry(i).unwrap()).collect();
            assert_eq!(cleanup_index(&enc.slots[0].shape, &backend).unwrap(), 2, "eta={eta}");
            assert_eq!(cleanup_index(&enc.slots[0].size, &backend).unwrap(), 3, "eta={eta}");
            assert_eq!(cleanup_index(&enc.slots[0].color, &backend).unwrap(), 7, "eta={eta}");
            assert!(enc.slots[0].presence > 0.5, "eta={eta}");
        }
    }

    #[test]
    fn encoding_is_deterministic() {
        let b = books();
        let mut r1 = ChaCha8Rng::seed_from_u64(6);
        let mut r2 = ChaCha8Rng::seed_from_u64(6);
        let e1 = encode_panel_from_labels(&grid9(&[0, 3]), &b, 0.25, &mut r1).unwrap();
        let e2 = encode_panel_from_labels(&grid9(&[0, 3]), &b, 0.25, &mut r2).unwrap();
        assert_eq!(e1.number.entries(), e2.number.entries());
        assert_eq!(e1.slots[0].shape.entries(), e2.slots[0].shape.entries());
    }

    #[test]
    fn out_of_range_label_is_rejected() {
        let b = books();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let bad = single(12, 0, 0);
        assert!(matches!(
            encode_panel_from_labels(&bad, &b, 0.0, &mut rng),
            Err(VsaError::LabelOutOfRange { attribute: "type", .. })
        ));
    }

    #[test]
    fn full_query_path_recovers_labels() {
        let b = books();
        // compose a scene from frontend vectors, decompose, query: the
        // argmax weight must sit on the true label for every slot
        let labels = [(0usize, [2usize, 3, 7]), (4, [1, 0, 9])];
        let objects: Vec<(usize, ObjectFillers)> = labels
            .iter()
            .map(|&(slot, [t, s, c])| {
                (slot, [
                    b.frontend_num[t].clone(),
                    b.frontend_num[s].clone(),
                    b.frontend_num[c].clone(),
                    b.frontend_lgc[1].clone(),
                ])
            })
            .collect();
        let shdr = compose_panel(&objects, &b.entity_keys, &b.scene_positions).unwrap();
        for &(slot, vals) in &labels {
            for (a, &val) in vals.iter().enumerate() {
                let est =
                    decompose_panel(&shdr, &b.scene_positions[slot], &b.entity_keys[a]).unwrap();
                let w = query_weights(&est, &b.frontend_num, None).unwrap();
                let argmax = w
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                    .unwrap()
                    .0;
                assert_eq!(argmax, val, "slot {slot} attr {a}");
            }
            let est =
                decompose_panel(&shdr, &b.scene_positions[slot], &b.entity_keys[3]).unwrap();
            let w = query_weights(&est, &b.frontend_lgc, Some(b.beta)).unwrap();
            assert!(w[1] > 0.99, "slot {slot} existence");
        }
    }
}
