use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::krational::{check_grid, full_mask, KRationalBox};
use crate::error::{Error, Result};
use crate::ssee::{Embedding, Family};

/// Assignment of a nonempty colour set `t(v) ⊆ [k]` to every coordinate.
///
/// Colour `i` is stored as bit `i - 1`, so a template and the k-rational box
/// with the same bitsets describe the same set of grid cells.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Template {
    family: Family,
    level: u32,
    k: u32,
    colours: Vec<u64>,
}

impl Template {
    pub fn new(family: Family, level: u32, k: u32, colours: Vec<u64>) -> Result<Self> {
        check_grid(k)?;
        let dim = family.dimension(level)?;
        if colours.len() != dim {
            return Err(Error::Parameter(format!(
                "template at level {level} of {family} needs {dim} colour sets, got {}",
                colours.len()
            )));
        }
        for (v, &c) in colours.iter().enumerate() {
            if c == 0 {
                return Err(Error::Parameter(format!("template colour set at coordinate {v} is empty")));
            }
            if c & !full_mask(k) != 0 {
                return Err(Error::Parameter(format!("colour outside [1,{k}] at coordinate {v}")));
            }
        }
        Ok(Self { family, level, k, colours })
    }

    /// Every coordinate coloured by all of `[k]`.
    pub fn full(family: Family, level: u32, k: u32) -> Result<Self> {
        check_grid(k)?;
        let dim = family.dimension(level)?;
        Self::new(family, level, k, vec![full_mask(k); dim])
    }

    /// The template of a single colouring (1-based colours).
    pub fn from_colouring(family: Family, level: u32, k: u32, colouring: &[u32]) -> Result<Self> {
        if colouring.iter().any(|&c| c == 0 || c > k) {
            return Err(Error::Parameter(format!("colour outside [1,{k}]")));
        }
        Self::new(family, level, k, colouring.iter().map(|&c| 1u64 << (c - 1)).collect())
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn masks(&self) -> &[u64] {
        &self.colours
    }

    /// Colours of coordinate `v`, 1-based and ascending.
    pub fn colours_at(&self, v: usize) -> Vec<u32> {
        (0..self.k).filter(|i| self.colours[v] >> i & 1 == 1).map(|i| i + 1).collect()
    }

    pub fn to_box(&self) -> KRationalBox {
        KRationalBox::new(self.family, self.level, self.k, self.colours.clone()).expect("template is a valid box")
    }

    pub fn from_box(b: &KRationalBox) -> Result<Self> {
        if let Some(v) = b.masks().iter().position(|&m| m == 0) {
            return Err(Error::Conversion(format!("box coordinate {v} is empty; templates need nonempty colour sets")));
        }
        Self::new(b.family(), b.level(), b.k(), b.masks().to_vec())
    }

    /// `log_k prod_v |t(v)|`, in base-`k` units.
    pub fn entropy(&self) -> f64 {
        let ln_k = (self.k as f64).ln();
        if self.k == 1 {
            return 0.0;
        }
        self.colours.iter().map(|c| (c.count_ones() as f64).ln()).sum::<f64>() / ln_k
    }

    /// Number of colourings compatible with the template.
    pub fn realisation_count(&self) -> BigUint {
        self.colours
            .iter()
            .fold(BigUint::one(), |acc, c| acc * BigUint::from(c.count_ones()))
    }

    /// Whether the 1-based colouring is a realisation.
    pub fn contains_colouring(&self, colouring: &[u32]) -> bool {
        colouring.len() == self.colours.len()
            && colouring
                .iter()
                .zip(&self.colours)
                .all(|(&c, &m)| c >= 1 && c <= self.k && m >> (c - 1) & 1 == 1)
    }

    /// Restriction along an embedding into this template's level.
    pub fn project(&self, emb: &Embedding) -> Result<Self> {
        if emb.family != self.family || emb.target != self.level {
            return Err(Error::Parameter("embedding does not land in the template's level".into()));
        }
        Self::new(self.family, emb.source, self.k, emb.map.iter().map(|&c| self.colours[c as usize]).collect())
    }

    pub fn to_json(&self) -> TemplateJson {
        TemplateJson {
            k: self.k,
            colours: (0..self.colours.len()).map(|v| self.colours_at(v)).collect(),
            family: Some(self.family),
            n: Some(self.level),
        }
    }

    /// Reads a template; `family` and the level default to the given values
    /// or, for the level, to the unique level whose dimension matches.
    pub fn from_json(json: &TemplateJson, family: Option<Family>) -> Result<Self> {
        let family = json
            .family
            .or(family)
            .ok_or_else(|| Error::Malformed("template JSON does not name a family".into()))?;
        let level = match json.n {
            Some(n) => n,
            None => level_for_dimension(family, json.colours.len())?,
        };
        let mut masks = Vec::with_capacity(json.colours.len());
        for set in &json.colours {
            let mut m = 0u64;
            for &c in set {
                if c == 0 || c > json.k || c > super::MAX_GRID {
                    return Err(Error::Malformed(format!("colour {c} outside [1,{}]", json.k)));
                }
                m |= 1 << (c - 1);
            }
            masks.push(m);
        }
        Self::new(family, level, json.k, masks)
    }
}

fn level_for_dimension(family: Family, dim: usize) -> Result<u32> {
    for n in 1..=64 {
        match family.dimension(n) {
            Ok(d) if d == dim => return Ok(n),
            Ok(d) if d > dim => break,
            Err(_) => break,
            _ => {}
        }
    }
    Err(Error::Malformed(format!("no level of {family} has {dim} coordinates")))
}

/// `{"k":…, "colours":[[1,3],…]}` with optional `family` and `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TemplateJson {
    pub k: u32,
    pub colours: Vec<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<Family>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use num_bigint::BigUint;
    use num_rational::BigRational;
    use rand::Rng;

    fn random_template<R: Rng>(family: Family, level: u32, k: u32, rng: &mut R) -> Template {
        let dim = family.dimension(level).unwrap();
        Template::new(family, level, k, (0..dim).map(|_| rng.gen_range(1..=full_mask(k))).collect()).unwrap()
    }

    #[test]
    fn full_and_singleton_templates() {
        let fam = Family::CompleteGraphEdges;
        let full = Template::full(fam, 5, 3).unwrap();
        assert!((full.entropy() - 10.0).abs() < 1e-12);
        assert_eq!(full.to_box().volume(), BigRational::from_integer(1.into()));
        let single = Template::from_colouring(fam, 4, 3, &[1, 2, 3, 1, 2, 3]).unwrap();
        assert_eq!(single.entropy(), 0.0);
        assert_eq!(single.realisation_count(), BigUint::one());
        assert_eq!(single.to_box().volume(), BigRational::new(1.into(), 729.into()));
        assert!(single.contains_colouring(&[1, 2, 3, 1, 2, 3]));
        assert!(!single.contains_colouring(&[2, 2, 3, 1, 2, 3]));
    }

    #[test]
    fn box_round_trip_and_realisations() {
        let mut rng = stream(21, 0);
        for _ in 0..100 {
            let t = random_template(Family::CompleteGraphEdges, 4, 5, &mut rng);
            assert_eq!(Template::from_box(&t.to_box()).unwrap(), t);
            // |<t>| = k^Ent(t)
            let count = t.realisation_count();
            let via_entropy = 5f64.powf(t.entropy());
            let c: f64 = count.to_string().parse().unwrap();
            assert!((c - via_entropy).abs() <= 1e-9 * c);
            assert!(t.entropy() >= 0.0 && t.entropy() <= 6.0 + 1e-12);
        }
        let empty = KRationalBox::new(Family::OrderInjections, 2, 3, vec![0b1, 0]).unwrap();
        assert!(matches!(Template::from_box(&empty), Err(Error::Conversion(_))));
    }

    #[test]
    fn json_uses_one_based_colours() {
        let t = Template::new(Family::CompleteGraphEdges, 3, 3, vec![0b101, 0b010, 0b111]).unwrap();
        let json = t.to_json();
        assert_eq!(json.colours, vec![vec![1, 3], vec![2], vec![1, 2, 3]]);
        let bare: TemplateJson = serde_json::from_str(r#"{"k":3,"colours":[[1,3],[2],[1,2,3]]}"#).unwrap();
        assert_eq!(Template::from_json(&bare, Some(Family::CompleteGraphEdges)).unwrap(), t);
        let bad: TemplateJson = serde_json::from_str(r#"{"k":3,"colours":[[4],[2],[1]]}"#).unwrap();
        assert!(Template::from_json(&bad, Some(Family::CompleteGraphEdges)).is_err());
    }
}
