//! Structured scene representations: a two-layer role-filler panel encoding
//! and a flat position-existence grid encoding. Both stay unnormalized so
//! that superposition algebra (linearity, shift covariance) is exact.

use crate::atomic::CircularCodec;
use crate::error::{Result, VsaError};
use crate::vsa::HdVector;

/// Entity-level attributes carried by every object slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EntityAttr {
    Type,
    Size,
    Color,
    Exist,
}

impl EntityAttr {
    pub const ALL: [EntityAttr; 4] =
        [EntityAttr::Type, EntityAttr::Size, EntityAttr::Color, EntityAttr::Exist];

    pub fn index(self) -> usize {
        match self {
            EntityAttr::Type => 0,
            EntityAttr::Size => 1,
            EntityAttr::Color => 2,
            EntityAttr::Exist => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EntityAttr::Type => "type",
            EntityAttr::Size => "size",
            EntityAttr::Color => "color",
            EntityAttr::Exist => "exist",
        }
    }
}

/// Panel scene vector: sum over objects of p_j bound to the object's own
/// key-filler sum.
#[derive(Debug, Clone)]
pub struct PanelShdr {
    pub vector: HdVector,
    pub n_positions: usize,
}

/// Grid occupancy vector: sum over cells of p_j bound to the cell's
/// existence filler, with p_j drawn from a period-n² circular codec.
#[derive(Debug, Clone)]
pub struct GridShdr {
    pub vector: HdVector,
    pub n: usize,
}

/// Fillers for one object slot, ordered as `EntityAttr::ALL`.
pub type ObjectFillers = [HdVector; 4];

/// Builds the panel encoding. Every listed object must sit at a distinct,
/// in-range position; absent slots are the caller's business (they carry
/// null fillers rather than being omitted).
pub fn compose_panel(
    objects: &[(usize, ObjectFillers)],
    keys: &[HdVector; 4],
    positions: &[HdVector],
) -> Result<PanelShdr> {
    if objects.is_empty() {
        return Err(VsaError::EmptyBundle);
    }
    let mut seen = vec![false; positions.len()];
    let mut terms: Vec<HdVector> = Vec::with_capacity(objects.len());
    for (pos, fillers) in objects {
        let slot = positions
            .get(*pos)
            .ok_or(VsaError::PositionOutOfRange { got: *pos, slots: positions.len() })?;
        if seen[*pos] {
            return Err(VsaError::DuplicatePosition(*pos));
        }
        seen[*pos] = true;
        let bound: Vec<HdVector> = keys
            .iter()
            .zip(fillers.iter())
            .map(|(k, v)| k.bind(v))
            .collect::<Result<_>>()?;
        let inner = HdVector::bundle(&bound.iter().collect::<Vec<_>>(), false)?;
        terms.push(slot.bind(&inner)?);
    }
    let vector = HdVector::bundle(&terms.iter().collect::<Vec<_>>(), false)?;
    Ok(PanelShdr { vector, n_positions: positions.len() })
}

/// Recovers a (noisy) attribute filler: unbind by the position, then by the
/// attribute key.
pub fn decompose_panel(shdr: &PanelShdr, position: &HdVector, key: &HdVector) -> Result<HdVector> {
    key.unbind(&position.unbind(&shdr.vector)?)
}

/// Builds the grid occupancy encoding from one existence filler per cell.
pub fn compose_grid(existence: &[HdVector], positions: &CircularCodec) -> Result<GridShdr> {
    let cells = positions.period() as usize;
    if existence.len() != cells {
        return Err(VsaError::GridLengthMismatch { expected: cells, got: existence.len() });
    }
    let n = (cells as f64).sqrt().round() as usize;
    let terms: Vec<HdVector> = existence
        .iter()
        .enumerate()
        .map(|(j, v)| positions.encode_int(j as i64).bind(v))
        .collect::<Result<_>>()?;
    let vector = HdVector::bundle(&terms.iter().collect::<Vec<_>>(), false)?;
    Ok(GridShdr { vector, n })
}
