//! Bounded front-end state spaces: enumerations of ghost states (for the
//! logic) and program states (for the operational semantics).

use std::collections::HashMap;

use smallvec::SmallVec;

use crate::frontend::ast::FrontendKind;
use crate::frontend::state::{
    CountHeap, CountPerm, FeProg, FeState, GhostHeap, GhostParams, ImmHeap, LazyCell, PMap,
    ProgHeap,
};
use crate::ivl::ast::{FieldId, Ty, TypeCtx, Value};
use crate::ivl::space::{SpaceBounds, SpaceError, ValueSets};
use crate::ivl::state::{Heap, Loc, Store};
use crate::scalar::Scalar;

pub struct FeSpace {
    pub kind: FrontendKind,
    pub ctx: TypeCtx,
    pub bounds: SpaceBounds,
    pub params: GhostParams,
    pub states: Vec<FeState>,
    index: HashMap<FeState, u32>,
    values: ValueSets,
}

impl FeSpace {
    pub fn new(kind: FrontendKind, ctx: TypeCtx, bounds: SpaceBounds) -> Result<Self, SpaceError> {
        // Ghost masks of the rational-permission front-ends are always
        // rational, independent of the IVL-side axis setting.
        let params = GhostParams::new(bounds.rational_masks(), 4);
        let values = bounds.value_sets();
        let mut space = FeSpace {
            kind,
            ctx,
            bounds,
            params,
            states: Vec::new(),
            index: HashMap::new(),
            values,
        };
        space.enumerate()?;
        Ok(space)
    }

    pub fn values(&self, ty: Ty) -> &[Value] {
        self.values.of(ty)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, i: u32) -> &FeState {
        &self.states[i as usize]
    }

    pub fn index_of(&self, s: &FeState) -> Option<u32> {
        self.index.get(s).copied()
    }

    pub fn mut_locations(&self) -> Vec<Loc> {
        let mut locs = Vec::new();
        for addr in 0..self.bounds.addrs {
            for f in 0..self.ctx.fields.len() {
                locs.push(Loc::new(addr, FieldId(f as u16)));
            }
        }
        locs
    }

    pub fn imm_locations(&self) -> Vec<Loc> {
        let mut locs = Vec::new();
        for addr in 0..self.bounds.addrs {
            for f in 0..self.ctx.imm_fields.len() {
                locs.push(Loc::new(addr, FieldId(f as u16)));
            }
        }
        locs
    }

    fn enumerate(&mut self) -> Result<(), SpaceError> {
        let stores = self.enumerate_stores();
        let heaps = self.ghost_heaps()?;
        let total = stores.len().saturating_mul(heaps.len());
        if total > self.bounds.max_states {
            return Err(SpaceError::TooLarge(total, self.bounds.max_states));
        }
        for store in &stores {
            for heap in &heaps {
                self.states.push(FeState { store: store.clone(), heap: heap.clone() });
            }
        }
        self.states.sort();
        self.index = self
            .states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i as u32))
            .collect();
        Ok(())
    }

    fn enumerate_stores(&self) -> Vec<Store> {
        let mut stores: Vec<Store> = vec![SmallVec::new()];
        for (_, ty) in &self.ctx.vars {
            let vals = self.values.of(*ty);
            let mut next = Vec::with_capacity(stores.len() * vals.len());
            for s in &stores {
                for v in vals {
                    let mut s2 = s.clone();
                    s2.push(Some(*v));
                    next.push(s2);
                }
            }
            stores = next;
        }
        stores
    }

    /// All ghost heaps of the active carrier over the bounded locations.
    pub fn ghost_heaps(&self) -> Result<Vec<GhostHeap>, SpaceError> {
        let cap = self.bounds.max_states;
        let masks = &self.params.rat_masks;
        let out: Vec<GhostHeap> = match self.kind {
            FrontendKind::RatPerm => {
                let mut heaps = vec![Heap::empty()];
                for loc in self.mut_locations() {
                    let vals = self.values.of(self.ctx.field_ty(loc.field));
                    heaps = extend_frac(heaps, loc, vals, masks, cap)?;
                }
                heaps.into_iter().map(GhostHeap::Rat).collect()
            }
            FrontendKind::Binary => {
                let bin = [Scalar::zero(), Scalar::one()];
                let mut heaps = vec![Heap::empty()];
                for loc in self.mut_locations() {
                    let vals = self.values.of(self.ctx.field_ty(loc.field));
                    heaps = extend_frac(heaps, loc, vals, &bin, cap)?;
                }
                heaps.into_iter().map(GhostHeap::Binary).collect()
            }
            FrontendKind::LazyFields => {
                let mut heaps = vec![Heap::empty()];
                for loc in self.mut_locations() {
                    let mut cells = vec![LazyCell::Unset];
                    cells.extend(
                        self.values
                            .of(self.ctx.field_ty(loc.field))
                            .iter()
                            .map(|v| LazyCell::Val(*v)),
                    );
                    heaps = extend_frac(heaps, loc, &cells, masks, cap)?;
                }
                heaps.into_iter().map(GhostHeap::Lazy).collect()
            }
            FrontendKind::ImmHeap => {
                let mut muts = vec![Heap::empty()];
                for loc in self.mut_locations() {
                    let vals = self.values.of(self.ctx.field_ty(loc.field));
                    muts = extend_frac(muts, loc, vals, masks, cap)?;
                }
                let mut imms = vec![ImmHeap::empty()];
                for loc in self.imm_locations() {
                    let vals = self.values.of(self.ctx.imm_field_ty(loc.field));
                    let mut next = Vec::with_capacity(imms.len() * (1 + vals.len()));
                    for h in &imms {
                        next.push(h.clone());
                        for v in vals {
                            next.push(h.clone().with(loc, *v));
                        }
                    }
                    if next.len() > cap {
                        return Err(SpaceError::TooLarge(next.len(), cap));
                    }
                    imms = next;
                }
                let mut out = Vec::with_capacity(muts.len() * imms.len());
                for m in &muts {
                    for im in &imms {
                        out.push(GhostHeap::Two { mut_part: m.clone(), imm: im.clone() });
                    }
                }
                out
            }
            FrontendKind::Counting => {
                let mut heaps = vec![CountHeap::empty()];
                let bound = self.params.count_bound;
                for loc in self.mut_locations() {
                    let vals = self.values.of(self.ctx.field_ty(loc.field));
                    let mut perms = Vec::new();
                    for k in 0..=bound {
                        perms.push(CountPerm::Units(k));
                        perms.push(CountPerm::Rem(k));
                    }
                    let mut next = Vec::new();
                    for h in &heaps {
                        next.push(h.clone());
                        for v in vals {
                            for p in &perms {
                                next.push(h.clone().with(loc, *v, *p));
                            }
                        }
                    }
                    if next.len() > cap {
                        return Err(SpaceError::TooLarge(next.len(), cap));
                    }
                    heaps = next;
                }
                heaps.into_iter().map(GhostHeap::Counting).collect()
            }
        };
        Ok(out)
    }

    /// All program states over the bounded locations.
    pub fn program_states(&self) -> Result<Vec<FeProg>, SpaceError> {
        let stores = self.enumerate_stores();
        let heaps = self.program_heaps()?;
        let total = stores.len().saturating_mul(heaps.len());
        if total > self.bounds.max_states {
            return Err(SpaceError::TooLarge(total, self.bounds.max_states));
        }
        let mut out = Vec::with_capacity(total);
        for store in &stores {
            for heap in &heaps {
                out.push(FeProg { store: store.clone(), heap: heap.clone() });
            }
        }
        out.sort();
        Ok(out)
    }

    fn program_heaps(&self) -> Result<Vec<ProgHeap>, SpaceError> {
        let cap = self.bounds.max_states;
        Ok(match self.kind {
            FrontendKind::RatPerm | FrontendKind::Binary | FrontendKind::Counting => {
                let mut maps = vec![PMap::empty()];
                for loc in self.mut_locations() {
                    let vals = self.values.of(self.ctx.field_ty(loc.field));
                    maps = extend_pmap(maps, loc, vals, cap)?;
                }
                maps.into_iter()
                    .map(|m| match self.kind {
                        FrontendKind::RatPerm => ProgHeap::Rat(m),
                        FrontendKind::Binary => ProgHeap::Binary(m),
                        _ => ProgHeap::Counting(m),
                    })
                    .collect()
            }
            FrontendKind::LazyFields => {
                let mut maps = vec![PMap::empty()];
                for loc in self.mut_locations() {
                    let mut cells = vec![LazyCell::Unset];
                    cells.extend(
                        self.values
                            .of(self.ctx.field_ty(loc.field))
                            .iter()
                            .map(|v| LazyCell::Val(*v)),
                    );
                    maps = extend_pmap(maps, loc, &cells, cap)?;
                }
                maps.into_iter().map(ProgHeap::Lazy).collect()
            }
            FrontendKind::ImmHeap => {
                let mut muts = vec![PMap::empty()];
                for loc in self.mut_locations() {
                    let vals = self.values.of(self.ctx.field_ty(loc.field));
                    muts = extend_pmap(muts, loc, vals, cap)?;
                }
                let mut imms = vec![PMap::empty()];
                for loc in self.imm_locations() {
                    let vals = self.values.of(self.ctx.imm_field_ty(loc.field));
                    imms = extend_pmap(imms, loc, vals, cap)?;
                }
                let mut out = Vec::with_capacity(muts.len() * imms.len());
                for m in &muts {
                    for im in &imms {
                        out.push(ProgHeap::Two { mut_part: m.clone(), imm: im.clone() });
                    }
                }
                out
            }
        })
    }
}

fn extend_frac<V: Clone + Eq + Ord + std::hash::Hash + std::fmt::Debug>(
    heaps: Vec<Heap<V>>,
    loc: Loc,
    values: &[V],
    masks: &[Scalar],
    cap: usize,
) -> Result<Vec<Heap<V>>, SpaceError> {
    let opts = 1 + values.len() * masks.len();
    if heaps.len().saturating_mul(opts) > cap {
        return Err(SpaceError::TooLarge(heaps.len() * opts, cap));
    }
    let mut next = Vec::with_capacity(heaps.len() * opts);
    for h in &heaps {
        next.push(h.clone());
        for v in values {
            for &p in masks {
                next.push(h.clone().with(loc, v.clone(), p));
            }
        }
    }
    Ok(next)
}

fn extend_pmap<V: Clone + Eq + Ord>(
    maps: Vec<PMap<V>>,
    loc: Loc,
    values: &[V],
    cap: usize,
) -> Result<Vec<PMap<V>>, SpaceError> {
    let opts = 1 + values.len();
    if maps.len().saturating_mul(opts) > cap {
        return Err(SpaceError::TooLarge(maps.len() * opts, cap));
    }
    let mut next = Vec::with_capacity(maps.len() * opts);
    for m in &maps {
        next.push(m.clone());
        for v in values {
            next.push(m.clone().with(loc, v.clone()));
        }
    }
    Ok(next)
}
