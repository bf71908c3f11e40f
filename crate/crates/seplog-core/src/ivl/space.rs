//! Bounded state spaces: finite enumerations of well-typed IVL states over
//! configurable bounds, plus dense bitsets for semantic assertions.

use std::collections::HashMap;

use smallvec::SmallVec;
use thiserror::Error;

use crate::ivl::ast::{Ty, TypeCtx, Value};
use crate::ivl::state::{Heap, IvlState, Loc, Store};
use crate::scalar::{Rational, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct SpaceBounds {
    /// Addresses `0 .. addrs`.
    pub addrs: u32,
    /// Permission lattice denominator.
    pub denom: u32,
    /// Include multiples of √2/denom in the permission lattice and in the
    /// Real value set.
    pub root2_axis: bool,
    /// Int value set.
    pub ints: Vec<i64>,
    /// Extra rational values admitted for Rat/Real beyond the lattice.
    pub rat_extras: Vec<Scalar>,
    /// Witness bound for rationality tests of Real values.
    pub int_witness_bound: i64,
    /// Cap on enumerated states.
    pub max_states: usize,
}

impl Default for SpaceBounds {
    fn default() -> Self {
        SpaceBounds {
            addrs: 2,
            denom: 4,
            root2_axis: false,
            ints: vec![0, 1],
            rat_extras: vec![],
            int_witness_bound: 64,
            max_states: 4_000_000,
        }
    }
}

impl SpaceBounds {
    /// The permission lattice `{a/D + b/D·√2} ∩ [0,1]` with window
    /// `|a| ≤ 2D`, `|b| ≤ D`; without the axis, just `{k/D} ∩ [0,1]`.
    pub fn mask_lattice(&self) -> Vec<Scalar> {
        let d = self.denom as i64;
        let mut out = Vec::new();
        if self.root2_axis {
            for a in -2 * d..=2 * d {
                for b in -d..=d {
                    let s = Scalar::new(Rational::new(a, d), Rational::new(b, d));
                    if s.in_unit_interval() {
                        out.push(s);
                    }
                }
            }
        } else {
            for k in 0..=d {
                out.push(Scalar::ratio(k, d));
            }
        }
        out.sort();
        out.dedup();
        out
    }

    pub fn rational_masks(&self) -> Vec<Scalar> {
        let d = self.denom as i64;
        (0..=d).map(|k| Scalar::ratio(k, d)).collect()
    }

    /// Per-type value sets induced by these bounds.
    pub fn value_sets(&self) -> ValueSets {
        let masks = self.mask_lattice();
        let int: Vec<Value> = self.ints.iter().map(|&i| Value::Int(i)).collect();
        let boolean = vec![Value::Bool(false), Value::Bool(true)];
        let mut reference = vec![Value::Null];
        reference.extend((0..self.addrs).map(Value::Addr));
        let mut rats: Vec<Scalar> = masks.iter().copied().filter(Scalar::is_rational).collect();
        rats.extend(self.rat_extras.iter().copied());
        rats.sort();
        rats.dedup();
        let rat: Vec<Value> = rats.iter().map(|&s| Value::Num(s)).collect();
        let mut reals = rats;
        if self.root2_axis {
            reals.extend(masks.iter().copied().filter(|s| !s.is_rational()));
        }
        reals.sort();
        reals.dedup();
        let real: Vec<Value> = reals.iter().map(|&s| Value::Num(s)).collect();
        ValueSets { int, boolean, reference, rat, real }
    }
}

/// The finite value universe per type.
#[derive(Debug, Clone)]
pub struct ValueSets {
    pub int: Vec<Value>,
    pub boolean: Vec<Value>,
    pub reference: Vec<Value>,
    pub rat: Vec<Value>,
    pub real: Vec<Value>,
}

impl ValueSets {
    pub fn of(&self, ty: Ty) -> &[Value] {
        match ty {
            Ty::Int => &self.int,
            Ty::Bool => &self.boolean,
            Ty::Ref => &self.reference,
            Ty::Rat => &self.rat,
            Ty::Real => &self.real,
        }
    }
}

#[derive(Debug, Error)]
pub enum SpaceError {
    #[error("state space too large: {0} states exceed the cap of {1}")]
    TooLarge(usize, usize),
}

/// A finite, canonically ordered enumeration of well-typed IVL states.
pub struct StateSpace {
    pub ctx: TypeCtx,
    pub bounds: SpaceBounds,
    pub masks: Vec<Scalar>,
    pub states: Vec<IvlState>,
    index: HashMap<IvlState, u32>,
    values: ValueSets,
}

impl StateSpace {
    pub fn new(ctx: TypeCtx, bounds: SpaceBounds) -> Result<StateSpace, SpaceError> {
        let masks = bounds.mask_lattice();
        let values = bounds.value_sets();
        let mut space = StateSpace {
            ctx,
            bounds,
            masks,
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

    pub fn locations(&self) -> Vec<Loc> {
        let mut locs = Vec::new();
        for addr in 0..self.bounds.addrs {
            for f in 0..self.ctx.fields.len() {
                locs.push(Loc::new(addr, crate::ivl::ast::FieldId(f as u16)));
            }
        }
        locs
    }

    fn enumerate(&mut self) -> Result<(), SpaceError> {
        let stores = self.enumerate_stores();
        let heaps = self.enumerate_heaps()?;
        let total = stores.len().checked_mul(heaps.len()).unwrap_or(usize::MAX);
        if total > self.bounds.max_states {
            return Err(SpaceError::TooLarge(total, self.bounds.max_states));
        }
        self.states.reserve(total);
        for store in &stores {
            for heap in &heaps {
                self.states.push(IvlState::new(store.clone(), heap.clone()));
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
            let vals = self.values(*ty);
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

    fn enumerate_heaps(&self) -> Result<Vec<Heap<Value>>, SpaceError> {
        let mut heaps = vec![Heap::empty()];
        for loc in self.locations() {
            let ty = self.ctx.field_ty(loc.field);
            let vals = self.values(ty);
            let opts = 1 + vals.len() * self.masks.len();
            if heaps.len().saturating_mul(opts) > self.bounds.max_states {
                return Err(SpaceError::TooLarge(heaps.len() * opts, self.bounds.max_states));
            }
            let mut next = Vec::with_capacity(heaps.len() * opts);
            for h in &heaps {
                next.push(h.clone());
                for v in vals {
                    for &p in &self.masks {
                        next.push(h.clone().with(loc, *v, p));
                    }
                }
            }
            heaps = next;
        }
        Ok(heaps)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, s: &IvlState) -> Option<u32> {
        self.index.get(s).copied()
    }

    pub fn state(&self, i: u32) -> &IvlState {
        &self.states[i as usize]
    }

    /// The full space as a semantic assertion (self-framing by closure).
    pub fn top(&self) -> SemSet {
        let mut set = SemSet::empty(self.len());
        for i in 0..self.len() {
            set.insert(i as u32);
        }
        set
    }
}

/// A semantic assertion: an extensional set of states from one space,
/// represented as a dense bitset over the space's canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemSet {
    words: Vec<u64>,
    universe: usize,
}

impl SemSet {
    pub fn empty(universe: usize) -> SemSet {
        SemSet { words: vec![0; universe.div_ceil(64)], universe }
    }

    pub fn universe_len(&self) -> usize {
        self.universe
    }

    pub fn insert(&mut self, i: u32) {
        self.words[(i / 64) as usize] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: u32) -> bool {
        self.words[(i / 64) as usize] & (1 << (i % 64)) != 0
    }

    pub fn union_with(&mut self, other: &SemSet) {
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w |= o;
        }
    }

    pub fn is_subset(&self, other: &SemSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty_set(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            (0..64u32).filter_map(move |b| {
                if w & (1 << b) != 0 {
                    Some(wi as u32 * 64 + b)
                } else {
                    None
                }
            })
        })
    }

    /// First element of `self \ other`, in canonical order.
    pub fn first_not_in(&self, other: &SemSet) -> Option<u32> {
        for (wi, (a, b)) in self.words.iter().zip(&other.words).enumerate() {
            let diff = a & !b;
            if diff != 0 {
                return Some(wi as u32 * 64 + diff.trailing_zeros());
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ivl::ast::FieldId;

    fn small_ctx() -> TypeCtx {
        TypeCtx {
            vars: vec![("x".into(), Ty::Ref)],
            fields: vec![("f".into(), Ty::Int)],
            imm_fields: vec![],
        }
    }

    #[test]
    fn enumeration_is_deterministic_and_well_formed() {
        let bounds = SpaceBounds { addrs: 1, ..Default::default() };
        let a = StateSpace::new(small_ctx(), bounds.clone()).unwrap();
        let b = StateSpace::new(small_ctx(), bounds).unwrap();
        assert_eq!(a.states, b.states);
        // stores: x ∈ {null, a0}; heaps: 1 + 2 vals × 5 masks = 11.
        assert_eq!(a.len(), 2 * 11);
        for s in &a.states {
            for (_, _, p) in s.heap.entries() {
                assert!(p.in_unit_interval());
            }
        }
    }

    #[test]
    fn axis_lattice_contains_radical_boundary_points() {
        let bounds = SpaceBounds { root2_axis: true, ..Default::default() };
        let lattice = bounds.mask_lattice();
        assert!(lattice.contains(&Scalar::inv_sqrt2()));
        assert!(lattice.contains(&(Scalar::one() - Scalar::inv_sqrt2())));
        for w in lattice.windows(2) {
            assert!(w[0] < w[1]);
        }
    }

    #[test]
    fn space_closed_under_lattice_splits() {
        let bounds = SpaceBounds { addrs: 1, ..Default::default() };
        let space = StateSpace::new(small_ctx(), bounds).unwrap();
        for s in &space.states {
            for (l, r) in s.splits(&space.masks) {
                assert!(space.index_of(&l).is_some(), "split part out of space: {l:?}");
                assert!(space.index_of(&r).is_some(), "split part out of space: {r:?}");
            }
        }
        let _ = FieldId(0);
    }
}
