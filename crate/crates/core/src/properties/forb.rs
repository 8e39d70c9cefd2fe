use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use super::{Exactness, Property, PropertyDescriptor};
use crate::boxes::{Body, BoxUnion, CellClass, SimpleBox};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, stream};
use crate::ssee::{Embedding, Family};

/// Largest embedding collection a level may enumerate exactly.
pub const FORB_EMBEDDING_BUDGET: u128 = 200_000;
/// Embeddings drawn per level when the collection is too large.
pub const FORB_SAMPLED_EMBEDDINGS: usize = 4096;

struct LevelEmbeddings {
    sampled: bool,
    list: Vec<Embedding>,
}

/// Points none of whose pull-backs along embeddings `V_N -> V_n` lie in the
/// forbidden body `b` at level `N`.
pub struct Forb<B> {
    body: B,
    descriptor: PropertyDescriptor,
    budget: u128,
    cache: RwLock<HashMap<u32, Arc<LevelEmbeddings>>>,
}

impl Forb<BoxUnion<SimpleBox<f64>>> {
    pub fn from_union(union: BoxUnion<SimpleBox<f64>>) -> Result<Self> {
        if union.is_empty() {
            return Err(Error::Parameter("forbidden union needs at least one box".into()));
        }
        let descriptor = PropertyDescriptor::Forb {
            boxes: union.members().iter().map(|b| b.to_json()).collect(),
        };
        Ok(Self::new(union, descriptor))
    }
}

impl<B: Body> Forb<B> {
    pub fn new(body: B, descriptor: PropertyDescriptor) -> Self {
        Self {
            body,
            descriptor,
            budget: FORB_EMBEDDING_BUDGET,
            cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn with_embedding_budget(mut self, budget: u128) -> Self {
        self.budget = budget;
        self
    }

    pub fn body(&self) -> &B {
        &self.body
    }

    fn embeddings(&self, level: u32) -> Arc<LevelEmbeddings> {
        if let Some(e) = self.cache.read().expect("cache lock").get(&level) {
            return e.clone();
        }
        let family = self.body.family();
        let source = self.body.level();
        let entry = match family.embeddings_with_budget(source, level, self.budget) {
            Ok(iter) => LevelEmbeddings {
                sampled: false,
                list: iter.collect(),
            },
            Err(_) => {
                let mut rng = stream(derive_seed(level as u64, source as u64), 0);
                let list = (0..FORB_SAMPLED_EMBEDDINGS)
                    .filter_map(|_| family.sample_embedding(source, level, &mut rng).ok())
                    .collect();
                LevelEmbeddings { sampled: true, list }
            }
        };
        let entry = Arc::new(entry);
        self.cache.write().expect("cache lock").insert(level, entry.clone());
        entry
    }
}

impl<B: Body> Property for Forb<B> {
    fn family(&self) -> Family {
        self.body.family()
    }

    fn descriptor(&self) -> PropertyDescriptor {
        self.descriptor.clone()
    }

    fn exactness_at(&self, level: u32) -> Exactness {
        if level >= self.body.level() && self.embeddings(level).sampled {
            Exactness::SampledEmbeddings
        } else {
            Exactness::Exact
        }
    }

    fn contains(&self, level: u32, point: &[f64]) -> bool {
        if level < self.body.level() {
            return true;
        }
        let embs = self.embeddings(level);
        let mut pulled = Vec::with_capacity(embs.list.first().map_or(0, |e| e.map.len()));
        embs.list.iter().all(|e| {
            pulled.clear();
            pulled.extend(e.map.iter().map(|&c| point[c as usize]));
            !self.body.contains(&pulled)
        })
    }

    /// Outside if one pulled-back cell lies in `b`, Inside if every one
    /// misses it, Boundary otherwise.
    fn classify_cell(&self, level: u32, k: u32, cells: &[u32]) -> CellClass {
        if level < self.body.level() {
            return CellClass::Inside;
        }
        let embs = self.embeddings(level);
        let mut partial = false;
        let mut pulled = Vec::new();
        for e in &embs.list {
            pulled.clear();
            pulled.extend(e.map.iter().map(|&c| cells[c as usize]));
            match self.body.classify_cell(k, &pulled) {
                CellClass::Inside => return CellClass::Outside,
                CellClass::Boundary => partial = true,
                CellClass::Outside => {}
            }
        }
        if partial {
            CellClass::Boundary
        } else {
            CellClass::Inside
        }
    }
}
