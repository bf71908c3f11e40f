//! Exhaustive enumeration of the sixteen IDF-algebra axioms.
//!
//! Equations over the partial `⊕` are read as Kleene equalities (both sides
//! undefined, or both defined and equal), except for the homomorphism axioms
//! of `core` and `stabilize`, which are checked for defined sums: projections
//! drop resources, so the projected sum can be defined when the original
//! composition is not.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use super::IdfCarrier;

pub const AXIOM_NAMES: [&str; 16] = [
    "oplus-commutative",
    "oplus-associative",
    "duplicable-summand",
    "core-absorbed",
    "core-duplicable",
    "core-maximal",
    "core-homomorphism",
    "cancellativity-mod-core",
    "stable-fixpoint",
    "stabilize-stable",
    "stabilize-homomorphism",
    "stabilize-core-decomposition",
    "unit-erasable",
    "unit-absorbed",
    "unit-core-fixpoint",
    "unit-stable",
];

#[derive(Debug, Clone, Serialize)]
pub enum AxiomOutcome {
    Pass { instances: u64 },
    /// A concrete witness: the states instantiating the axiom's variables.
    Fail { witness: Vec<String> },
    /// Enumeration budget exceeded; distinct from an axiom failure.
    BudgetExceeded { needed: u64, budget: u64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct AxiomReport {
    pub universe_size: usize,
    pub outcomes: Vec<(String, AxiomOutcome)>,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.outcomes
            .iter()
            .all(|(_, o)| matches!(o, AxiomOutcome::Pass { .. }))
    }

    pub fn failed_axioms(&self) -> Vec<&str> {
        self.outcomes
            .iter()
            .filter(|(_, o)| matches!(o, AxiomOutcome::Fail { .. }))
            .map(|(n, _)| n.as_str())
            .collect()
    }

    pub fn merge(mut self, other: AxiomReport) -> AxiomReport {
        // Failures dominate passes; budget markers dominate nothing.
        for (name, outcome) in other.outcomes {
            match self.outcomes.iter_mut().find(|(n, _)| *n == name) {
                None => self.outcomes.push((name, outcome)),
                Some((_, existing)) => {
                    let replace = match (&existing, &outcome) {
                        (AxiomOutcome::Fail { .. }, _) => false,
                        (_, AxiomOutcome::Fail { .. }) => true,
                        (AxiomOutcome::Pass { .. }, AxiomOutcome::Pass { .. }) => false,
                        (AxiomOutcome::BudgetExceeded { .. }, AxiomOutcome::Pass { .. }) => true,
                        _ => false,
                    };
                    if replace {
                        *existing = outcome;
                    } else if let (
                        AxiomOutcome::Pass { instances },
                        AxiomOutcome::Pass { instances: more },
                    ) = (&mut *existing, &outcome)
                    {
                        *instances += more;
                    }
                }
            }
        }
        self.universe_size += other.universe_size;
        self
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IDF axiom check over {} states", self.universe_size)?;
        for (name, outcome) in &self.outcomes {
            match outcome {
                AxiomOutcome::Pass { instances } => {
                    writeln!(f, "  [pass] {name} ({instances} instances)")?
                }
                AxiomOutcome::Fail { witness } => {
                    writeln!(f, "  [FAIL] {name} witness: {witness:?}")?
                }
                AxiomOutcome::BudgetExceeded { needed, budget } => {
                    writeln!(f, "  [skip] {name} needs {needed} instances, budget {budget}")?
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AxiomCheckConfig {
    pub max_instances: u64,
}

impl Default for AxiomCheckConfig {
    fn default() -> Self {
        // Enough for a few hundred states cubed.
        AxiomCheckConfig { max_instances: 40_000_000_000 }
    }
}

struct Ctx<'a, C: IdfCarrier + Sync> {
    carrier: &'a C,
    universe: &'a [C::State],
}

impl<'a, C: IdfCarrier + Sync> Ctx<'a, C> {
    fn check_unary(&self, f: impl Fn(&C, &C::State) -> bool + Sync) -> AxiomOutcome {
        let fail = self
            .universe
            .par_iter()
            .enumerate()
            .filter(|(_, a)| !f(self.carrier, a))
            .min_by_key(|(i, _)| *i);
        match fail {
            Some((_, a)) => AxiomOutcome::Fail { witness: vec![format!("{a:?}")] },
            None => AxiomOutcome::Pass { instances: self.universe.len() as u64 },
        }
    }

    fn check_binary(&self, f: impl Fn(&C, &C::State, &C::State) -> bool + Sync) -> AxiomOutcome {
        let n = self.universe.len() as u64;
        let fail = self
            .universe
            .par_iter()
            .enumerate()
            .filter_map(|(i, a)| {
                self.universe
                    .iter()
                    .position(|b| !f(self.carrier, a, b))
                    .map(|j| (i, j))
            })
            .min();
        match fail {
            Some((i, j)) => AxiomOutcome::Fail {
                witness: vec![
                    format!("{:?}", self.universe[i]),
                    format!("{:?}", self.universe[j]),
                ],
            },
            None => AxiomOutcome::Pass { instances: n * n },
        }
    }

    fn check_ternary(
        &self,
        budget: u64,
        f: impl Fn(&C, &C::State, &C::State, &C::State) -> bool + Sync,
    ) -> AxiomOutcome {
        let n = self.universe.len() as u64;
        let needed = n.saturating_mul(n).saturating_mul(n);
        if needed > budget {
            return AxiomOutcome::BudgetExceeded { needed, budget };
        }
        let fail = self
            .universe
            .par_iter()
            .enumerate()
            .filter_map(|(i, a)| {
                for (j, b) in self.universe.iter().enumerate() {
                    for (k, c) in self.universe.iter().enumerate() {
                        if !f(self.carrier, a, b, c) {
                            return Some((i, j, k));
                        }
                    }
                }
                None
            })
            .min();
        match fail {
            Some((i, j, k)) => AxiomOutcome::Fail {
                witness: vec![
                    format!("{:?}", self.universe[i]),
                    format!("{:?}", self.universe[j]),
                    format!("{:?}", self.universe[k]),
                ],
            },
            None => AxiomOutcome::Pass { instances: needed },
        }
    }
}

/// Check all sixteen axioms over `universe`, exhaustively.
///
/// The universe must be closed enough under `⊕`, `core`, `stabilize`, and
/// `unit` for the axiom instances to be decidable by the carrier operations
/// themselves (all operations are computed exactly; closure of the universe
/// is only needed where an axiom's conclusion quantifies over it, which none
/// of the sixteen do — `⪰` is decided by `IdfCarrier::geq`).
pub fn check_idf_axioms<C: IdfCarrier + Sync>(
    carrier: &C,
    universe: &[C::State],
    cfg: AxiomCheckConfig,
) -> AxiomReport {
    let ctx = Ctx { carrier, universe };
    let mut outcomes = Vec::with_capacity(16);

    outcomes.push(ctx.check_binary(|c, a, b| c.oplus(a, b) == c.oplus(b, a)));

    outcomes.push(ctx.check_ternary(cfg.max_instances, |c, a, b, x| {
        let lhs = c.oplus(b, x).and_then(|bx| c.oplus(a, &bx));
        let rhs = c.oplus(a, b).and_then(|ab| c.oplus(&ab, x));
        lhs == rhs
    }));

    outcomes.push(ctx.check_binary(|c, a, b| {
        // c₀ = a ⊕ b ∧ c₀ = c₀ ⊕ c₀  ⇒  a = a ⊕ a
        match c.oplus(a, b) {
            Some(sum) if c.oplus(&sum, &sum).as_ref() == Some(&sum) => {
                c.oplus(a, a).as_ref() == Some(a)
            }
            _ => true,
        }
    }));

    outcomes.push(ctx.check_unary(|c, a| c.oplus(a, &c.core_of(a)).as_ref() == Some(a)));

    outcomes.push(ctx.check_unary(|c, a| {
        let k = c.core_of(a);
        c.oplus(&k, &k) == Some(k.clone())
    }));

    outcomes.push(ctx.check_binary(|c, a, x| {
        // a = a ⊕ x ⇒ core(a) ⪰ x
        if c.oplus(a, x).as_ref() == Some(a) {
            c.geq(&c.core_of(a), x)
        } else {
            true
        }
    }));

    outcomes.push(ctx.check_binary(|c, a, b| match c.oplus(a, b) {
        Some(sum) => c.oplus(&c.core_of(a), &c.core_of(b)) == Some(c.core_of(&sum)),
        None => true,
    }));

    outcomes.push(ctx.check_ternary(cfg.max_instances, |c, b, x, y| {
        // b ⊕ x = b ⊕ y (defined) ∧ core(x) = core(y) ⇒ x = y
        match (c.oplus(b, x), c.oplus(b, y)) {
            (Some(bx), Some(by)) if bx == by && c.core_of(x) == c.core_of(y) => x == y,
            _ => true,
        }
    }));

    outcomes.push(ctx.check_unary(|c, a| !c.is_stable(a) || c.stabilize(a) == *a));

    outcomes.push(ctx.check_unary(|c, a| c.is_stable(&c.stabilize(a))));

    outcomes.push(ctx.check_binary(|c, a, b| match c.oplus(a, b) {
        Some(sum) => c.oplus(&c.stabilize(a), &c.stabilize(b)) == Some(c.stabilize(&sum)),
        None => true,
    }));

    outcomes.push(ctx.check_unary(|c, a| {
        c.oplus(&c.stabilize(a), &c.core_of(a)).as_ref() == Some(a)
    }));

    outcomes.push(ctx.check_binary(|c, b, x| {
        // a = b ⊕ unit(x) ⇒ a = b
        match c.oplus(b, &c.unit_of(x)) {
            Some(a) => a == *b,
            None => true,
        }
    }));

    outcomes.push(ctx.check_unary(|c, a| c.oplus(a, &c.unit_of(a)).as_ref() == Some(a)));

    outcomes.push(ctx.check_unary(|c, a| {
        let u = c.unit_of(a);
        c.core_of(&u) == u
    }));

    outcomes.push(ctx.check_unary(|c, a| c.is_stable(&c.unit_of(a))));

    AxiomReport {
        universe_size: universe.len(),
        outcomes: AXIOM_NAMES
            .iter()
            .map(|s| s.to_string())
            .zip(outcomes)
            .collect(),
    }
}
