//! The IDF-algebra interface and a brute-force axiom checker.
//!
//! An IDF algebra is a partial commutative monoid `(Σ, ⊕)` together with
//! three endomorphisms `core`, `stabilize`, `unit` and a `stable` predicate.
//! `core` projects a state onto its largest duplicable part, `stabilize`
//! onto its largest self-contained part, and `unit` yields the local unit
//! of composition. Every state carrier in this crate (IVL heaps, front-end
//! ghost heaps, agreement stores, and their products) implements
//! [`IdfCarrier`], and [`check_idf_axioms`] validates the sixteen axioms by
//! exhaustive enumeration over a finite universe.

use std::fmt::Debug;
use std::hash::Hash;

use rayon::prelude::*;

mod checker;

pub use checker::{check_idf_axioms, AxiomCheckConfig, AxiomOutcome, AxiomReport, AXIOM_NAMES};

/// Operations of one IDF-algebra carrier.
///
/// The carrier is a value (not just a type) because some instances carry
/// configuration, e.g. the field partition of the immutable-heap encoding.
pub trait IdfCarrier {
    type State: Clone + Eq + Ord + Hash + Debug + Send + Sync;

    /// Partial addition; `None` means the states are incompatible.
    fn oplus(&self, a: &Self::State, b: &Self::State) -> Option<Self::State>;

    /// Largest duplicable part.
    fn core_of(&self, a: &Self::State) -> Self::State;

    /// Largest stable (self-contained) part.
    fn stabilize(&self, a: &Self::State) -> Self::State;

    fn is_stable(&self, a: &Self::State) -> bool;

    /// Local unit: `a ⊕ unit(a) = a`.
    fn unit_of(&self, a: &Self::State) -> Self::State;

    /// `a ⪰ b`, i.e. some residue `r` exists with `a = b ⊕ r`.
    ///
    /// Implementations decide this by direct pointwise construction; the
    /// test suites cross-validate against brute-force residue search.
    fn geq(&self, a: &Self::State, b: &Self::State) -> bool;
}

/// `a ⪰ b` decided by scanning `universe` for a residue. Quadratic and only
/// meant as the oracle against which `IdfCarrier::geq` is checked.
pub fn geq_by_enumeration<C: IdfCarrier + Sync>(
    carrier: &C,
    universe: &[C::State],
    a: &C::State,
    b: &C::State,
) -> bool {
    universe.iter().any(|r| carrier.oplus(b, r).as_ref() == Some(a))
}

/// Monotone closure `{ω | ∃ω₀ ∈ set. ω ⪰ ω₀}` relative to a universe.
pub fn monotonize<C: IdfCarrier + Sync>(
    carrier: &C,
    universe: &[C::State],
    set: &[C::State],
) -> Vec<C::State> {
    universe
        .par_iter()
        .filter(|w| set.iter().any(|w0| carrier.geq(w, w0)))
        .cloned()
        .collect()
}

/// The agreement algebra over an arbitrary value set: composition is defined
/// only between identical elements, all elements are stable and duplicable.
/// IVL and front-end variable stores use this structure.
#[derive(Debug, Clone, Copy, Default)]
pub struct AgreementCarrier;

impl<T: Clone + Eq + Ord + Hash + Debug + Send + Sync> IdfCarrierFor<T> for AgreementCarrier {}

/// Helper trait so [`AgreementCarrier`] can be instantiated at any state type.
pub trait IdfCarrierFor<T: Clone + Eq + Ord + Hash + Debug + Send + Sync> {
    fn as_carrier(&self) -> AgreementOps<T> {
        AgreementOps(std::marker::PhantomData)
    }
}

pub struct AgreementOps<T>(std::marker::PhantomData<T>);

impl<T: Clone + Eq + Ord + Hash + Debug + Send + Sync> IdfCarrier for AgreementOps<T> {
    type State = T;

    fn oplus(&self, a: &T, b: &T) -> Option<T> {
        (a == b).then(|| a.clone())
    }

    fn core_of(&self, a: &T) -> T {
        a.clone()
    }

    fn stabilize(&self, a: &T) -> T {
        a.clone()
    }

    fn is_stable(&self, _a: &T) -> bool {
        true
    }

    fn unit_of(&self, a: &T) -> T {
        a.clone()
    }

    fn geq(&self, a: &T, b: &T) -> bool {
        a == b
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn agreement_axioms_hold() {
        let carrier = AgreementOps::<u8>(std::marker::PhantomData);
        let universe: Vec<u8> = (0..6).collect();
        let report = check_idf_axioms(&carrier, &universe, AxiomCheckConfig::default());
        assert!(report.all_pass(), "{report}");
    }
}
