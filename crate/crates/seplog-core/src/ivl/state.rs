//! IVL states: a store of local variables paired with a heap/permission-mask
//! pair forming an IDF algebra.
//!
//! Heaps are finitely supported: an absent location has no value and zero
//! permission. A stored entry always carries a value; its permission may be
//! zero (a "dangling" value, as produced by `core`). Well-formedness — a
//! location with positive permission has a value — holds by construction.

use std::fmt;

use smallvec::SmallVec;

use crate::algebra::IdfCarrier;
use crate::ivl::ast::{FieldId, TypeCtx, Value};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Loc {
    pub addr: u32,
    pub field: FieldId,
}

impl Loc {
    pub fn new(addr: u32, field: FieldId) -> Self {
        Loc { addr, field }
    }
}

/// Finitely supported heap with per-location fractional permissions.
/// Entries are sorted by location; fully empty cells are never stored.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Heap<V> {
    entries: SmallVec<[(Loc, V, Scalar); 4]>,
}

impl<V: Clone + Eq + Ord + std::hash::Hash + fmt::Debug> Default for Heap<V> {
    fn default() -> Self {
        Heap { entries: SmallVec::new() }
    }
}

impl<V: Clone + Eq + Ord + std::hash::Hash + fmt::Debug> Heap<V> {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &[(Loc, V, Scalar)] {
        &self.entries
    }

    pub fn value(&self, loc: Loc) -> Option<&V> {
        self.entries
            .binary_search_by(|(l, _, _)| l.cmp(&loc))
            .ok()
            .map(|i| &self.entries[i].1)
    }

    pub fn perm(&self, loc: Loc) -> Scalar {
        self.entries
            .binary_search_by(|(l, _, _)| l.cmp(&loc))
            .ok()
            .map(|i| self.entries[i].2)
            .unwrap_or_else(Scalar::zero)
    }

    /// Insert or replace a cell. A `None` value with nonzero permission is a
    /// well-formedness violation and panics.
    pub fn set(&mut self, loc: Loc, value: Option<V>, perm: Scalar) {
        assert!(
            value.is_some() || perm.is_zero(),
            "heap well-formedness: positive permission requires a value"
        );
        match self.entries.binary_search_by(|(l, _, _)| l.cmp(&loc)) {
            Ok(i) => match value {
                Some(v) => self.entries[i] = (loc, v, perm),
                None => {
                    self.entries.remove(i);
                }
            },
            Err(i) => {
                if let Some(v) = value {
                    self.entries.insert(i, (loc, v, perm));
                }
            }
        }
    }

    pub fn with(mut self, loc: Loc, value: V, perm: Scalar) -> Self {
        self.set(loc, Some(value), perm);
        self
    }

    pub fn oplus(&self, other: &Heap<V>) -> Option<Heap<V>> {
        let mut out: SmallVec<[(Loc, V, Scalar); 4]> = SmallVec::new();
        let (mut i, mut j) = (0, 0);
        let one = Scalar::one();
        while i < self.entries.len() || j < other.entries.len() {
            let take_left = match (self.entries.get(i), other.entries.get(j)) {
                (Some((la, _, _)), Some((lb, _, _))) => {
                    if la == lb {
                        let (l, va, pa) = &self.entries[i];
                        let (_, vb, pb) = &other.entries[j];
                        if va != vb {
                            return None;
                        }
                        let p = *pa + *pb;
                        if p > one {
                            return None;
                        }
                        out.push((*l, va.clone(), p));
                        i += 1;
                        j += 1;
                        continue;
                    }
                    la < lb
                }
                (Some(_), None) => true,
                (None, Some(_)) => false,
                (None, None) => unreachable!(),
            };
            if take_left {
                out.push(self.entries[i].clone());
                i += 1;
            } else {
                out.push(other.entries[j].clone());
                j += 1;
            }
        }
        Some(Heap { entries: out })
    }

    /// Largest duplicable part: same values, all permissions cleared.
    pub fn core_of(&self) -> Heap<V> {
        Heap {
            entries: self
                .entries
                .iter()
                .map(|(l, v, _)| (*l, v.clone(), Scalar::zero()))
                .collect(),
        }
    }

    /// Erase values held with zero permission.
    pub fn stabilize(&self) -> Heap<V> {
        Heap {
            entries: self
                .entries
                .iter()
                .filter(|(_, _, p)| !p.is_zero())
                .cloned()
                .collect(),
        }
    }

    pub fn is_stable(&self) -> bool {
        self.entries.iter().all(|(_, _, p)| !p.is_zero())
    }

    /// `self ⪰ other`: a residue exists, constructed pointwise.
    pub fn geq(&self, other: &Heap<V>) -> bool {
        other.entries.iter().all(|(loc, v, p)| {
            self.value(*loc) == Some(v) && self.perm(*loc) >= *p
        })
    }

    /// All decompositions `self = left ⊕ right` with both permission parts
    /// drawn from `lattice`. A zero-permission side may keep or drop the
    /// value, so dangling copies are enumerated too.
    pub fn splits(&self, lattice: &[Scalar]) -> Vec<(Heap<V>, Heap<V>)> {
        let mut acc = vec![(Heap::empty(), Heap::empty())];
        for (loc, v, p) in &self.entries {
            let mut options: Vec<(Option<Scalar>, Option<Scalar>)> = Vec::new();
            for &p1 in lattice {
                if p1 > *p {
                    break;
                }
                let p2 = *p - p1;
                if !lattice.binary_search(&p2).is_ok() {
                    continue;
                }
                let left: &[Option<Scalar>] =
                    if p1.is_zero() { &[None, Some(p1)] } else { &[Some(p1)] };
                let right: &[Option<Scalar>] =
                    if p2.is_zero() { &[None, Some(p2)] } else { &[Some(p2)] };
                for &l in left {
                    for &r in right {
                        options.push((l, r));
                    }
                }
            }
            let mut next = Vec::with_capacity(acc.len() * options.len());
            for (h1, h2) in &acc {
                for (o1, o2) in &options {
                    let mut n1 = h1.clone();
                    let mut n2 = h2.clone();
                    if let Some(p1) = o1 {
                        n1.set(*loc, Some(v.clone()), *p1);
                    }
                    if let Some(p2) = o2 {
                        n2.set(*loc, Some(v.clone()), *p2);
                    }
                    next.push((n1, n2));
                }
            }
            acc = next;
        }
        acc
    }
}

/// Variable store, indexed by the type context's variable order. `None`
/// means unassigned (never produced by space enumeration, which assigns
/// every declared variable).
pub type Store = SmallVec<[Option<Value>; 4]>;

pub fn store_get<'a>(ctx: &TypeCtx, store: &'a Store, name: &str) -> Option<&'a Value> {
    ctx.var_slot(name).and_then(|i| store[i].as_ref())
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IvlState {
    pub store: Store,
    pub heap: Heap<Value>,
}

impl IvlState {
    pub fn new(store: Store, heap: Heap<Value>) -> Self {
        IvlState { store, heap }
    }

    pub fn with_var(&self, slot: usize, value: Value) -> IvlState {
        let mut s = self.clone();
        s.store[slot] = Some(value);
        s
    }

    /// Stores compose by agreement, heaps pointwise.
    pub fn oplus(&self, other: &IvlState) -> Option<IvlState> {
        if self.store != other.store {
            return None;
        }
        self.heap
            .oplus(&other.heap)
            .map(|heap| IvlState { store: self.store.clone(), heap })
    }

    pub fn core_of(&self) -> IvlState {
        IvlState { store: self.store.clone(), heap: self.heap.core_of() }
    }

    pub fn stabilize(&self) -> IvlState {
        IvlState { store: self.store.clone(), heap: self.heap.stabilize() }
    }

    pub fn is_stable(&self) -> bool {
        self.heap.is_stable()
    }

    pub fn unit_of(&self) -> IvlState {
        IvlState { store: self.store.clone(), heap: Heap::empty() }
    }

    pub fn geq(&self, other: &IvlState) -> bool {
        self.store == other.store && self.heap.geq(&other.heap)
    }

    pub fn splits(&self, lattice: &[Scalar]) -> Vec<(IvlState, IvlState)> {
        self.heap
            .splits(lattice)
            .into_iter()
            .map(|(h1, h2)| {
                (
                    IvlState { store: self.store.clone(), heap: h1 },
                    IvlState { store: self.store.clone(), heap: h2 },
                )
            })
            .collect()
    }

    pub fn display(&self, ctx: &TypeCtx) -> String {
        let mut parts = Vec::new();
        for (i, (name, _)) in ctx.vars.iter().enumerate() {
            if let Some(v) = &self.store[i] {
                parts.push(format!("{name}={v:?}"));
            }
        }
        for (loc, v, p) in self.heap.entries() {
            let f = ctx.field_name(loc.field);
            parts.push(format!("a{}.{}={:?}@{}", loc.addr, f, v, p));
        }
        format!("{{{}}}", parts.join(", "))
    }
}

/// The IVL heap as an IDF-algebra carrier.
#[derive(Debug, Clone, Copy, Default)]
pub struct HeapCarrier;

impl IdfCarrier for HeapCarrier {
    type State = Heap<Value>;

    fn oplus(&self, a: &Heap<Value>, b: &Heap<Value>) -> Option<Heap<Value>> {
        a.oplus(b)
    }

    fn core_of(&self, a: &Heap<Value>) -> Heap<Value> {
        a.core_of()
    }

    fn stabilize(&self, a: &Heap<Value>) -> Heap<Value> {
        a.stabilize()
    }

    fn is_stable(&self, a: &Heap<Value>) -> bool {
        a.is_stable()
    }

    fn unit_of(&self, _a: &Heap<Value>) -> Heap<Value> {
        Heap::empty()
    }

    fn geq(&self, a: &Heap<Value>, b: &Heap<Value>) -> bool {
        a.geq(b)
    }
}

/// Full IVL states (agreement store × heap) as an IDF-algebra carrier.
#[derive(Debug, Clone, Copy, Default)]
pub struct IvlStateCarrier;

impl IdfCarrier for IvlStateCarrier {
    type State = IvlState;

    fn oplus(&self, a: &IvlState, b: &IvlState) -> Option<IvlState> {
        a.oplus(b)
    }

    fn core_of(&self, a: &IvlState) -> IvlState {
        a.core_of()
    }

    fn stabilize(&self, a: &IvlState) -> IvlState {
        a.stabilize()
    }

    fn is_stable(&self, a: &IvlState) -> bool {
        a.is_stable()
    }

    fn unit_of(&self, a: &IvlState) -> IvlState {
        a.unit_of()
    }

    fn geq(&self, a: &IvlState, b: &IvlState) -> bool {
        a.geq(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::geq_by_enumeration;

    fn loc(addr: u32, f: u16) -> Loc {
        Loc::new(addr, FieldId(f))
    }

    fn half() -> Scalar {
        Scalar::ratio(1, 2)
    }

    #[test]
    fn oplus_sums_permissions_pointwise() {
        let a = Heap::empty().with(loc(0, 0), Value::Int(1), half());
        let b = Heap::empty().with(loc(0, 0), Value::Int(1), half());
        let sum = a.oplus(&b).unwrap();
        assert_eq!(sum.perm(loc(0, 0)), Scalar::one());
        assert_eq!(sum.value(loc(0, 0)), Some(&Value::Int(1)));
        // Independent per-location oracle.
        for (l, _, p) in sum.entries() {
            assert_eq!(*p, a.perm(*l) + b.perm(*l));
        }
    }

    #[test]
    fn oplus_rejects_value_disagreement_and_overflow() {
        let a = Heap::empty().with(loc(0, 0), Value::Int(0), Scalar::zero());
        let b = Heap::empty().with(loc(0, 0), Value::Int(1), Scalar::zero());
        assert_eq!(a.oplus(&b), None);
        let c = Heap::empty().with(loc(0, 0), Value::Int(1), Scalar::one());
        let d = Heap::empty().with(loc(0, 0), Value::Int(1), half());
        assert_eq!(c.oplus(&d), None);
    }

    #[test]
    fn core_clears_permissions_and_is_idempotent() {
        let h = Heap::empty().with(loc(0, 0), Value::Int(1), half());
        let core = h.core_of();
        assert_eq!(core.perm(loc(0, 0)), Scalar::zero());
        assert_eq!(core.value(loc(0, 0)), Some(&Value::Int(1)));
        assert_eq!(core.core_of(), core);
        assert_eq!(h.oplus(&core).unwrap(), h);
    }

    #[test]
    fn stabilize_drops_unowned_values() {
        let h = Heap::empty()
            .with(loc(0, 0), Value::Int(1), Scalar::zero())
            .with(loc(0, 1), Value::Int(0), half());
        let s = h.stabilize();
        assert_eq!(s.value(loc(0, 0)), None);
        assert_eq!(s.value(loc(0, 1)), Some(&Value::Int(0)));
        assert!(s.is_stable());
        assert!(!h.is_stable());
    }

    #[test]
    fn geq_examples() {
        let full = Heap::empty().with(loc(0, 0), Value::Int(1), Scalar::one());
        let part = Heap::empty().with(loc(0, 0), Value::Int(1), half());
        let more = Heap::empty().with(loc(0, 0), Value::Int(1), Scalar::ratio(3, 4));
        assert!(full.geq(&part));
        assert!(full.geq(&full));
        assert!(!part.geq(&more));
    }

    #[test]
    fn geq_agrees_with_residue_search() {
        // Universe: all heaps over one location, values {0,1}, quarters.
        let lattice: Vec<Scalar> = (0..=4).map(|k| Scalar::ratio(k, 4)).collect();
        let mut universe = vec![Heap::empty()];
        for v in [Value::Int(0), Value::Int(1)] {
            for &p in &lattice {
                universe.push(Heap::empty().with(loc(0, 0), v, p));
            }
        }
        let carrier = HeapCarrier;
        for a in &universe {
            for b in &universe {
                assert_eq!(
                    a.geq(b),
                    geq_by_enumeration(&carrier, &universe, a, b),
                    "geq mismatch for {a:?} vs {b:?}"
                );
            }
        }
    }

    #[test]
    fn splits_cover_all_compositions() {
        let lattice: Vec<Scalar> = (0..=4).map(|k| Scalar::ratio(k, 4)).collect();
        let h = Heap::empty().with(loc(0, 0), Value::Int(1), Scalar::one());
        let splits = h.splits(&lattice);
        // Every split recomposes to the original.
        for (l, r) in &splits {
            assert_eq!(l.oplus(r).unwrap(), h);
        }
        // The half/half split exists.
        let target = Heap::empty().with(loc(0, 0), Value::Int(1), half());
        assert!(splits.iter().any(|(l, r)| *l == target && *r == target));
        // Exhaustive against brute-force pairing over the one-location universe.
        let mut universe = vec![Heap::empty()];
        for &p in &lattice {
            universe.push(Heap::empty().with(loc(0, 0), Value::Int(1), p));
            universe.push(Heap::empty().with(loc(0, 0), Value::Int(0), p));
        }
        let brute: std::collections::BTreeSet<_> = universe
            .iter()
            .flat_map(|l| universe.iter().map(move |r| (l.clone(), r.clone())))
            .filter(|(l, r)| l.oplus(r).as_ref() == Some(&h))
            .collect();
        let got: std::collections::BTreeSet<_> = splits.into_iter().collect();
        assert_eq!(got, brute);
    }
}
