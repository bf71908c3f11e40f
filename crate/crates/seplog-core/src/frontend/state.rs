//! Front-end ghost and program states for the five languages.
//!
//! Each language instantiates the ghost heap as a different IDF algebra:
//! rational fractional masks, lazy cells with fractional masks, a mutable
//! fractional heap paired with a duplicable immutable heap (where `core`
//! and `stabilize` are the identity), binary masks, and counting
//! permissions. Program heaps are the permission-free projections that the
//! operational semantics runs on; `embed` maps a program state to the
//! ghost state holding full permission to everything it stores.

use crate::frontend::ast::FrontendKind;
use crate::ivl::ast::{TypeCtx, Value};
use crate::ivl::state::{Heap, Loc, Store};
use crate::scalar::Scalar;

/// Heap cell of the lazy-field-creation language: a field either holds the
/// "not yet added" marker or a proper value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LazyCell {
    Unset,
    Val(Value),
}

/// Counting permission to one location: either `k` read units or the
/// complement `1 - k·ε` of `k` given-away units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CountPerm {
    Units(u32),
    Rem(u32),
}

impl CountPerm {
    pub fn is_zero(self) -> bool {
        self == CountPerm::Units(0)
    }

    pub fn add(self, other: CountPerm) -> Option<CountPerm> {
        match (self, other) {
            (CountPerm::Units(a), CountPerm::Units(b)) => {
                Some(CountPerm::Units(a.checked_add(b)?))
            }
            (CountPerm::Units(u), CountPerm::Rem(k)) | (CountPerm::Rem(k), CountPerm::Units(u)) => {
                (u <= k).then_some(CountPerm::Rem(k - u))
            }
            (CountPerm::Rem(_), CountPerm::Rem(_)) => None,
        }
    }

    /// A residue `r` with `self = other + r`, when one exists.
    pub fn sub(self, other: CountPerm) -> Option<CountPerm> {
        match (self, other) {
            (CountPerm::Units(a), CountPerm::Units(b)) => {
                (a >= b).then_some(CountPerm::Units(a - b))
            }
            (CountPerm::Rem(a), CountPerm::Units(u)) => Some(CountPerm::Rem(a + u)),
            (CountPerm::Rem(a), CountPerm::Rem(b)) => {
                (b >= a).then_some(CountPerm::Units(b - a))
            }
            (CountPerm::Units(_), CountPerm::Rem(_)) => None,
        }
    }
}

/// Finitely supported counting-permission heap; entries always carry a
/// value, and `Units(0)` marks a dangling (duplicable) value.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct CountHeap {
    entries: Vec<(Loc, Value, CountPerm)>,
}

impl CountHeap {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &[(Loc, Value, CountPerm)] {
        &self.entries
    }

    pub fn value(&self, loc: Loc) -> Option<&Value> {
        self.entries
            .binary_search_by(|(l, _, _)| l.cmp(&loc))
            .ok()
            .map(|i| &self.entries[i].1)
    }

    pub fn perm(&self, loc: Loc) -> CountPerm {
        self.entries
            .binary_search_by(|(l, _, _)| l.cmp(&loc))
            .ok()
            .map(|i| self.entries[i].2)
            .unwrap_or(CountPerm::Units(0))
    }

    pub fn with(mut self, loc: Loc, value: Value, perm: CountPerm) -> Self {
        match self.entries.binary_search_by(|(l, _, _)| l.cmp(&loc)) {
            Ok(i) => self.entries[i] = (loc, value, perm),
            Err(i) => self.entries.insert(i, (loc, value, perm)),
        }
        self
    }

    pub fn oplus(&self, other: &CountHeap) -> Option<CountHeap> {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.entries.len() || j < other.entries.len() {
            match (self.entries.get(i), other.entries.get(j)) {
                (Some((la, va, pa)), Some((lb, vb, pb))) if la == lb => {
                    if va != vb {
                        return None;
                    }
                    out.push((*la, *va, pa.add(*pb)?));
                    i += 1;
                    j += 1;
                }
                (Some(a), Some(b)) => {
                    if a.0 < b.0 {
                        out.push(*a);
                        i += 1;
                    } else {
                        out.push(*b);
                        j += 1;
                    }
                }
                (Some(a), None) => {
                    out.push(*a);
                    i += 1;
                }
                (None, Some(b)) => {
                    out.push(*b);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        Some(CountHeap { entries: out })
    }

    pub fn core_of(&self) -> CountHeap {
        CountHeap {
            entries: self
                .entries
                .iter()
                .map(|(l, v, _)| (*l, *v, CountPerm::Units(0)))
                .collect(),
        }
    }

    pub fn stabilize(&self) -> CountHeap {
        CountHeap {
            entries: self
                .entries
                .iter()
                .filter(|(_, _, p)| !p.is_zero())
                .copied()
                .collect(),
        }
    }

    pub fn is_stable(&self) -> bool {
        self.entries.iter().all(|(_, _, p)| !p.is_zero())
    }

    pub fn geq(&self, other: &CountHeap) -> bool {
        other.entries.iter().all(|(loc, v, p)| {
            self.value(*loc) == Some(v) && self.perm(*loc).sub(*p).is_some()
        })
    }

    /// All decompositions with unit indices bounded by `unit_bound`.
    pub fn splits(&self, unit_bound: u32) -> Vec<(CountHeap, CountHeap)> {
        let mut acc = vec![(CountHeap::empty(), CountHeap::empty())];
        for (loc, v, p) in &self.entries {
            let mut perm_options: Vec<(CountPerm, CountPerm)> = Vec::new();
            match *p {
                CountPerm::Units(k) => {
                    for i in 0..=k {
                        perm_options.push((CountPerm::Units(i), CountPerm::Units(k - i)));
                    }
                }
                CountPerm::Rem(k) => {
                    for j in 0..=unit_bound.saturating_sub(k) {
                        perm_options.push((CountPerm::Rem(k + j), CountPerm::Units(j)));
                        perm_options.push((CountPerm::Units(j), CountPerm::Rem(k + j)));
                    }
                }
            }
            let mut next = Vec::new();
            for (h1, h2) in &acc {
                for (p1, p2) in &perm_options {
                    let lefts: &[Option<CountPerm>] = if p1.is_zero() {
                        &[None, Some(CountPerm::Units(0))]
                    } else {
                        // perm_options may duplicate (0,Rem)/(Rem,0) pairs
                        &[Some(*p1)]
                    };
                    let rights: &[Option<CountPerm>] = if p2.is_zero() {
                        &[None, Some(CountPerm::Units(0))]
                    } else {
                        &[Some(*p2)]
                    };
                    for &lo in lefts {
                        for &ro in rights {
                            let mut n1 = h1.clone();
                            let mut n2 = h2.clone();
                            if let Some(lp) = lo {
                                n1 = n1.with(*loc, *v, lp);
                            }
                            if let Some(rp) = ro {
                                n2 = n2.with(*loc, *v, rp);
                            }
                            next.push((n1, n2));
                        }
                    }
                }
            }
            next.sort();
            next.dedup();
            acc = next;
        }
        acc
    }
}

/// Immutable heap: a partial map with agreement composition. Every location
/// is duplicable and stable, so `core` and `stabilize` are the identity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ImmHeap {
    entries: Vec<(Loc, Value)>,
}

impl ImmHeap {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &[(Loc, Value)] {
        &self.entries
    }

    pub fn value(&self, loc: Loc) -> Option<&Value> {
        self.entries
            .binary_search_by(|(l, _)| l.cmp(&loc))
            .ok()
            .map(|i| &self.entries[i].1)
    }

    pub fn with(mut self, loc: Loc, value: Value) -> Self {
        match self.entries.binary_search_by(|(l, _)| l.cmp(&loc)) {
            Ok(i) => self.entries[i] = (loc, value),
            Err(i) => self.entries.insert(i, (loc, value)),
        }
        self
    }

    pub fn remove(&mut self, loc: Loc) {
        if let Ok(i) = self.entries.binary_search_by(|(l, _)| l.cmp(&loc)) {
            self.entries.remove(i);
        }
    }

    /// Union when values agree on the shared domain.
    pub fn oplus(&self, other: &ImmHeap) -> Option<ImmHeap> {
        let mut out = self.clone();
        for (loc, v) in &other.entries {
            match out.value(*loc) {
                Some(existing) if existing != v => return None,
                Some(_) => {}
                None => out = out.with(*loc, *v),
            }
        }
        Some(out)
    }

    pub fn geq(&self, other: &ImmHeap) -> bool {
        other
            .entries
            .iter()
            .all(|(loc, v)| self.value(*loc) == Some(v))
    }

    /// Decompositions: each entry may go left, right, or both.
    pub fn splits(&self) -> Vec<(ImmHeap, ImmHeap)> {
        let mut acc = vec![(ImmHeap::empty(), ImmHeap::empty())];
        for (loc, v) in &self.entries {
            let mut next = Vec::with_capacity(acc.len() * 3);
            for (h1, h2) in &acc {
                next.push((h1.clone().with(*loc, *v), h2.clone()));
                next.push((h1.clone(), h2.clone().with(*loc, *v)));
                next.push((h1.clone().with(*loc, *v), h2.clone().with(*loc, *v)));
            }
            acc = next;
        }
        acc
    }
}

/// Ghost heap of the active front-end.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GhostHeap {
    Rat(Heap<Value>),
    Lazy(Heap<LazyCell>),
    Two { mut_part: Heap<Value>, imm: ImmHeap },
    Binary(Heap<Value>),
    Counting(CountHeap),
}

/// Split-enumeration parameters for ghost heaps.
#[derive(Debug, Clone)]
pub struct GhostParams {
    pub rat_masks: Vec<Scalar>,
    pub binary_masks: Vec<Scalar>,
    pub count_bound: u32,
}

impl GhostParams {
    pub fn new(rat_masks: Vec<Scalar>, count_bound: u32) -> Self {
        GhostParams {
            rat_masks,
            binary_masks: vec![Scalar::zero(), Scalar::one()],
            count_bound,
        }
    }
}

impl GhostHeap {
    pub fn empty_for(kind: FrontendKind) -> GhostHeap {
        match kind {
            FrontendKind::RatPerm => GhostHeap::Rat(Heap::empty()),
            FrontendKind::LazyFields => GhostHeap::Lazy(Heap::empty()),
            FrontendKind::ImmHeap => {
                GhostHeap::Two { mut_part: Heap::empty(), imm: ImmHeap::empty() }
            }
            FrontendKind::Binary => GhostHeap::Binary(Heap::empty()),
            FrontendKind::Counting => GhostHeap::Counting(CountHeap::empty()),
        }
    }

    pub fn oplus(&self, other: &GhostHeap) -> Option<GhostHeap> {
        match (self, other) {
            (GhostHeap::Rat(a), GhostHeap::Rat(b)) => a.oplus(b).map(GhostHeap::Rat),
            (GhostHeap::Lazy(a), GhostHeap::Lazy(b)) => a.oplus(b).map(GhostHeap::Lazy),
            (
                GhostHeap::Two { mut_part: m1, imm: i1 },
                GhostHeap::Two { mut_part: m2, imm: i2 },
            ) => Some(GhostHeap::Two { mut_part: m1.oplus(m2)?, imm: i1.oplus(i2)? }),
            (GhostHeap::Binary(a), GhostHeap::Binary(b)) => a.oplus(b).map(GhostHeap::Binary),
            (GhostHeap::Counting(a), GhostHeap::Counting(b)) => {
                a.oplus(b).map(GhostHeap::Counting)
            }
            _ => None,
        }
    }

    pub fn core_of(&self) -> GhostHeap {
        match self {
            GhostHeap::Rat(h) => GhostHeap::Rat(h.core_of()),
            GhostHeap::Lazy(h) => GhostHeap::Lazy(h.core_of()),
            GhostHeap::Two { mut_part, imm } => {
                GhostHeap::Two { mut_part: mut_part.core_of(), imm: imm.clone() }
            }
            GhostHeap::Binary(h) => GhostHeap::Binary(h.core_of()),
            GhostHeap::Counting(h) => GhostHeap::Counting(h.core_of()),
        }
    }

    pub fn stabilize(&self) -> GhostHeap {
        match self {
            GhostHeap::Rat(h) => GhostHeap::Rat(h.stabilize()),
            GhostHeap::Lazy(h) => GhostHeap::Lazy(h.stabilize()),
            GhostHeap::Two { mut_part, imm } => {
                GhostHeap::Two { mut_part: mut_part.stabilize(), imm: imm.clone() }
            }
            GhostHeap::Binary(h) => GhostHeap::Binary(h.stabilize()),
            GhostHeap::Counting(h) => GhostHeap::Counting(h.stabilize()),
        }
    }

    pub fn is_stable(&self) -> bool {
        match self {
            GhostHeap::Rat(h) => h.is_stable(),
            GhostHeap::Lazy(h) => h.is_stable(),
            GhostHeap::Two { mut_part, .. } => mut_part.is_stable(),
            GhostHeap::Binary(h) => h.is_stable(),
            GhostHeap::Counting(h) => h.is_stable(),
        }
    }

    pub fn unit_of(&self) -> GhostHeap {
        match self {
            GhostHeap::Rat(_) => GhostHeap::Rat(Heap::empty()),
            GhostHeap::Lazy(_) => GhostHeap::Lazy(Heap::empty()),
            GhostHeap::Two { .. } => {
                GhostHeap::Two { mut_part: Heap::empty(), imm: ImmHeap::empty() }
            }
            GhostHeap::Binary(_) => GhostHeap::Binary(Heap::empty()),
            GhostHeap::Counting(_) => GhostHeap::Counting(CountHeap::empty()),
        }
    }

    pub fn geq(&self, other: &GhostHeap) -> bool {
        match (self, other) {
            (GhostHeap::Rat(a), GhostHeap::Rat(b)) => a.geq(b),
            (GhostHeap::Lazy(a), GhostHeap::Lazy(b)) => a.geq(b),
            (
                GhostHeap::Two { mut_part: m1, imm: i1 },
                GhostHeap::Two { mut_part: m2, imm: i2 },
            ) => m1.geq(m2) && i1.geq(i2),
            (GhostHeap::Binary(a), GhostHeap::Binary(b)) => a.geq(b),
            (GhostHeap::Counting(a), GhostHeap::Counting(b)) => a.geq(b),
            _ => false,
        }
    }

    pub fn splits(&self, params: &GhostParams) -> Vec<(GhostHeap, GhostHeap)> {
        match self {
            GhostHeap::Rat(h) => h
                .splits(&params.rat_masks)
                .into_iter()
                .map(|(a, b)| (GhostHeap::Rat(a), GhostHeap::Rat(b)))
                .collect(),
            GhostHeap::Lazy(h) => h
                .splits(&params.rat_masks)
                .into_iter()
                .map(|(a, b)| (GhostHeap::Lazy(a), GhostHeap::Lazy(b)))
                .collect(),
            GhostHeap::Two { mut_part, imm } => {
                let ms = mut_part.splits(&params.rat_masks);
                let is = imm.splits();
                let mut out = Vec::with_capacity(ms.len() * is.len());
                for (m1, m2) in &ms {
                    for (i1, i2) in &is {
                        out.push((
                            GhostHeap::Two { mut_part: m1.clone(), imm: i1.clone() },
                            GhostHeap::Two { mut_part: m2.clone(), imm: i2.clone() },
                        ));
                    }
                }
                out
            }
            GhostHeap::Binary(h) => h
                .splits(&params.binary_masks)
                .into_iter()
                .map(|(a, b)| (GhostHeap::Binary(a), GhostHeap::Binary(b)))
                .collect(),
            GhostHeap::Counting(h) => h
                .splits(params.count_bound)
                .into_iter()
                .map(|(a, b)| (GhostHeap::Counting(a), GhostHeap::Counting(b)))
                .collect(),
        }
    }
}

/// A front-end ghost state: agreement store plus ghost heap.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FeState {
    pub store: Store,
    pub heap: GhostHeap,
}

impl FeState {
    pub fn oplus(&self, other: &FeState) -> Option<FeState> {
        if self.store != other.store {
            return None;
        }
        self.heap
            .oplus(&other.heap)
            .map(|heap| FeState { store: self.store.clone(), heap })
    }

    pub fn stabilize(&self) -> FeState {
        FeState { store: self.store.clone(), heap: self.heap.stabilize() }
    }

    pub fn is_stable(&self) -> bool {
        self.heap.is_stable()
    }

    pub fn geq(&self, other: &FeState) -> bool {
        self.store == other.store && self.heap.geq(&other.heap)
    }

    pub fn with_var(&self, slot: usize, value: Value) -> FeState {
        let mut s = self.clone();
        s.store[slot] = Some(value);
        s
    }

    pub fn splits(&self, params: &GhostParams) -> Vec<(FeState, FeState)> {
        self.heap
            .splits(params)
            .into_iter()
            .map(|(a, b)| {
                (
                    FeState { store: self.store.clone(), heap: a },
                    FeState { store: self.store.clone(), heap: b },
                )
            })
            .collect()
    }
}

/// Sorted-association-list partial map used by program heaps.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct PMap<V> {
    entries: Vec<(Loc, V)>,
}

impl<V: Clone + Eq + Ord> PMap<V> {
    pub fn empty() -> Self {
        PMap { entries: Vec::new() }
    }

    pub fn entries(&self) -> &[(Loc, V)] {
        &self.entries
    }

    pub fn get(&self, loc: Loc) -> Option<&V> {
        self.entries
            .binary_search_by(|(l, _)| l.cmp(&loc))
            .ok()
            .map(|i| &self.entries[i].1)
    }

    pub fn insert(&mut self, loc: Loc, v: V) {
        match self.entries.binary_search_by(|(l, _)| l.cmp(&loc)) {
            Ok(i) => self.entries[i] = (loc, v),
            Err(i) => self.entries.insert(i, (loc, v)),
        }
    }

    pub fn remove(&mut self, loc: Loc) -> Option<V> {
        match self.entries.binary_search_by(|(l, _)| l.cmp(&loc)) {
            Ok(i) => Some(self.entries.remove(i).1),
            Err(_) => None,
        }
    }

    pub fn with(mut self, loc: Loc, v: V) -> Self {
        self.insert(loc, v);
        self
    }
}

/// Program heap of the active front-end (no permissions).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProgHeap {
    Rat(PMap<Value>),
    Lazy(PMap<LazyCell>),
    Two { mut_part: PMap<Value>, imm: PMap<Value> },
    Binary(PMap<Value>),
    Counting(PMap<Value>),
}

impl ProgHeap {
    pub fn empty_for(kind: FrontendKind) -> ProgHeap {
        match kind {
            FrontendKind::RatPerm => ProgHeap::Rat(PMap::empty()),
            FrontendKind::LazyFields => ProgHeap::Lazy(PMap::empty()),
            FrontendKind::ImmHeap => {
                ProgHeap::Two { mut_part: PMap::empty(), imm: PMap::empty() }
            }
            FrontendKind::Binary => ProgHeap::Binary(PMap::empty()),
            FrontendKind::Counting => ProgHeap::Counting(PMap::empty()),
        }
    }
}

/// A front-end program state.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FeProg {
    pub store: Store,
    pub heap: ProgHeap,
}

/// Embed a program state into the ghost state holding full permission to
/// every stored location.
pub fn embed(prog: &FeProg) -> FeState {
    let heap = match &prog.heap {
        ProgHeap::Rat(m) => {
            let mut h = Heap::empty();
            for (loc, v) in m.entries() {
                h = h.with(*loc, *v, Scalar::one());
            }
            GhostHeap::Rat(h)
        }
        ProgHeap::Lazy(m) => {
            let mut h = Heap::empty();
            for (loc, c) in m.entries() {
                h = h.with(*loc, *c, Scalar::one());
            }
            GhostHeap::Lazy(h)
        }
        ProgHeap::Two { mut_part, imm } => {
            let mut h = Heap::empty();
            for (loc, v) in mut_part.entries() {
                h = h.with(*loc, *v, Scalar::one());
            }
            let mut ih = ImmHeap::empty();
            for (loc, v) in imm.entries() {
                ih = ih.with(*loc, *v);
            }
            GhostHeap::Two { mut_part: h, imm: ih }
        }
        ProgHeap::Binary(m) => {
            let mut h = Heap::empty();
            for (loc, v) in m.entries() {
                h = h.with(*loc, *v, Scalar::one());
            }
            GhostHeap::Binary(h)
        }
        ProgHeap::Counting(m) => {
            let mut h = CountHeap::empty();
            for (loc, v) in m.entries() {
                h = h.with(*loc, *v, CountPerm::Rem(0));
            }
            GhostHeap::Counting(h)
        }
    };
    FeState { store: prog.store.clone(), heap }
}

/// Ghost-state evaluation view: field reads see stored values; lazy cells
/// holding the unset marker are undefined; immutable reads consult the
/// immutable component.
impl crate::ivl::eval::EvalView for FeState {
    fn read_var(&self, ctx: &TypeCtx, name: &str) -> Option<Value> {
        crate::ivl::state::store_get(ctx, &self.store, name).copied()
    }

    fn read_field(&self, addr: u32, field: crate::ivl::ast::FieldId) -> Option<Value> {
        let loc = Loc::new(addr, field);
        match &self.heap {
            GhostHeap::Rat(h) | GhostHeap::Binary(h) => h.value(loc).copied(),
            GhostHeap::Lazy(h) => match h.value(loc) {
                Some(LazyCell::Val(v)) => Some(*v),
                _ => None,
            },
            GhostHeap::Two { mut_part, .. } => mut_part.value(loc).copied(),
            GhostHeap::Counting(h) => h.value(loc).copied(),
        }
    }

    fn read_imm_field(&self, addr: u32, field: crate::ivl::ast::FieldId) -> Option<Value> {
        match &self.heap {
            GhostHeap::Two { imm, .. } => imm.value(Loc::new(addr, field)).copied(),
            _ => None,
        }
    }
}

impl crate::ivl::eval::EvalView for FeProg {
    fn read_var(&self, ctx: &TypeCtx, name: &str) -> Option<Value> {
        crate::ivl::state::store_get(ctx, &self.store, name).copied()
    }

    fn read_field(&self, addr: u32, field: crate::ivl::ast::FieldId) -> Option<Value> {
        let loc = Loc::new(addr, field);
        match &self.heap {
            ProgHeap::Rat(m) | ProgHeap::Binary(m) | ProgHeap::Counting(m) => {
                m.get(loc).copied()
            }
            ProgHeap::Lazy(m) => match m.get(loc) {
                Some(LazyCell::Val(v)) => Some(*v),
                _ => None,
            },
            ProgHeap::Two { mut_part, .. } => mut_part.get(loc).copied(),
        }
    }

    fn read_imm_field(&self, addr: u32, field: crate::ivl::ast::FieldId) -> Option<Value> {
        match &self.heap {
            ProgHeap::Two { imm, .. } => imm.get(Loc::new(addr, field)).copied(),
            _ => None,
        }
    }
}
