//! Boxes, k-rational boxes, templates and their unions.
//!
//! A box at level `n` is a product of one measurable set per coordinate of
//! `V_n`. Simple boxes carry finite interval unions, k-rational boxes carry
//! a bitset of grid cells `[j/k, (j+1)/k)` per coordinate, and templates are
//! the colour-set view of the same bitsets.

mod interval;
mod krational;
mod simple;
mod template;
mod union;

pub use interval::{parse_rational, IntervalSet, Scalar};
pub use krational::{cell_of, KRationalBox, MAX_GRID};
pub use simple::{BoxJson, SimpleBox};
pub use template::{Template, TemplateJson};
pub use union::{BoxUnion, UnionVolume, UnionVolumeMode, EXACT_UNION_MAX_DIM, EXACT_UNION_MAX_MEMBERS};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ssee::{Embedding, Family, DEFAULT_EMBEDDING_BUDGET};

/// Relation of a grid cell (or box) to a body, up to null sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellClass {
    Inside,
    Outside,
    Boundary,
}

impl CellClass {
    /// Class of a union of pieces given the class of each piece.
    pub fn combine(classes: impl IntoIterator<Item = CellClass>) -> CellClass {
        let (mut any_in, mut any_out, mut any) = (false, false, false);
        for c in classes {
            any = true;
            match c {
                CellClass::Inside => any_in = true,
                CellClass::Outside => any_out = true,
                CellClass::Boundary => return CellClass::Boundary,
            }
            if any_in && any_out {
                return CellClass::Boundary;
            }
        }
        match (any, any_in) {
            (false, _) => CellClass::Outside,
            (true, true) => CellClass::Inside,
            (true, false) => CellClass::Outside,
        }
    }
}

/// A measurable subset of `[0,1]^{V_n}` at one fixed level.
pub trait Body: Send + Sync {
    fn family(&self) -> Family;
    fn level(&self) -> u32;
    fn contains(&self, point: &[f64]) -> bool;
    /// Relation of the grid cell `prod_i [cells[i]/k, (cells[i]+1)/k)` to
    /// the body.
    fn classify_cell(&self, k: u32, cells: &[u32]) -> CellClass;
}

/// Boxes that support strict projection and lift along embeddings.
pub trait Projectable: Body + Clone + PartialEq + Sized {
    fn project(&self, emb: &Embedding) -> Result<Self>;
    fn lift(&self, emb: &Embedding) -> Result<Self>;
}

pub(crate) fn check_projection(family: Family, level: u32, emb: &Embedding) -> Result<()> {
    if emb.family != family || emb.target != level {
        return Err(Error::Parameter(format!(
            "cannot project a {family} box at level {level} along an embedding into level {} of {}",
            emb.target, emb.family
        )));
    }
    Ok(())
}

pub(crate) fn check_lift(family: Family, level: u32, emb: &Embedding) -> Result<()> {
    if emb.family != family || emb.source != level {
        return Err(Error::Parameter(format!(
            "cannot lift a {family} box at level {level} along an embedding from level {} of {}",
            emb.source, emb.family
        )));
    }
    Ok(())
}

/// Union of the projections of `b` along every embedding `V_N -> V_n`.
pub fn lower_shadow<B: Projectable>(b: &B, source: u32) -> Result<BoxUnion<B>> {
    let mut out = BoxUnion::new();
    for emb in b.family().embeddings_with_budget(source, b.level(), DEFAULT_EMBEDDING_BUDGET)? {
        out.push_unique(b.project(&emb)?)?;
    }
    Ok(out)
}

/// Union of the lifts of `b` along every embedding `V_N -> V_n`.
pub fn upper_shadow<B: Projectable>(b: &B, target: u32) -> Result<BoxUnion<B>> {
    let mut out = BoxUnion::new();
    for emb in b.family().embeddings_with_budget(b.level(), target, DEFAULT_EMBEDDING_BUDGET)? {
        out.push_unique(b.lift(&emb)?)?;
    }
    Ok(out)
}

/// Natural-log entropy from a volume; `+inf` for null bodies.
pub fn entropy_of_volume(volume: f64) -> f64 {
    if volume <= 0.0 {
        f64::INFINITY
    } else {
        -volume.ln()
    }
}

/// Converts natural-log entropy to base-`k` units.
pub fn nats_to_base(nats: f64, k: u32) -> f64 {
    nats / (k as f64).ln()
}

/// Converts base-`k` entropy to nats.
pub fn base_to_nats(value: f64, k: u32) -> f64 {
    value * (k as f64).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combine_classes() {
        use CellClass::*;
        assert_eq!(CellClass::combine([Inside, Inside]), Inside);
        assert_eq!(CellClass::combine([Outside, Outside]), Outside);
        assert_eq!(CellClass::combine([Inside, Outside]), Boundary);
        assert_eq!(CellClass::combine([Inside, Boundary]), Boundary);
    }

    #[test]
    fn unit_conversions() {
        assert!((nats_to_base(2f64.ln(), 4) - 0.5).abs() < 1e-15);
        assert!((base_to_nats(0.5, 4) - 2f64.ln()).abs() < 1e-15);
        assert_eq!(entropy_of_volume(0.0), f64::INFINITY);
    }
}
