//! Gate/measurement programs with mid-circuit measurement and classical control.

use rand::Rng;

use crate::error::{config, Result};
use crate::gate::Gate;
use crate::state::{Basis, PureState};

#[derive(Debug, Clone, PartialEq)]
pub enum Step {
    Apply(Gate),
    Measure { qubit: usize, basis: Basis },
    /// Applies `gate` iff the recorded outcome of `condition` is 1.
    ApplyIf { condition: usize, gate: Gate },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    pub qubit_count: usize,
    pub steps: Vec<Step>,
}

/// Outcome record of one run, indexed by qubit.
pub type Outcomes = Vec<Option<u8>>;

impl Program {
    pub fn validate(&self) -> Result<()> {
        let mut measured = vec![false; self.qubit_count];
        for step in &self.steps {
            match step {
                Step::Apply(g) => g.validate(self.qubit_count)?,
                Step::Measure { qubit, .. } => {
                    if *qubit >= self.qubit_count {
                        return config(format!("measured qubit {qubit} out of range"));
                    }
                    measured[*qubit] = true;
                }
                Step::ApplyIf { condition, gate } => {
                    gate.validate(self.qubit_count)?;
                    if !measured.get(*condition).copied().unwrap_or(false) {
                        return config(format!("classical control on unmeasured qubit {condition}"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Position of the first measurement of `qubit`, if any.
    pub fn measurement_position(&self, qubit: usize) -> Option<usize> {
        self.steps
            .iter()
            .position(|s| matches!(s, Step::Measure { qubit: q, .. } if *q == qubit))
    }

    /// Evolves |0…0⟩ through the leading unitary steps, stopping at the first
    /// measurement or classically controlled step.
    pub fn unitary_prefix_state(&self) -> Result<PureState> {
        let gates: Vec<&Gate> = self
            .steps
            .iter()
            .map_while(|s| match s {
                Step::Apply(g) => Some(g),
                _ => None,
            })
            .collect();
        PureState::basis_state(self.qubit_count, 0)?.apply_all(gates)
    }

    /// One shot with sampled measurements and collapse.
    pub fn run<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Outcomes> {
        let mut state = PureState::basis_state(self.qubit_count, 0)?;
        let mut outcomes: Outcomes = vec![None; self.qubit_count];
        for step in &self.steps {
            match step {
                Step::Apply(g) => state = state.apply(g)?,
                Step::Measure { qubit, basis } => {
                    let (o, s) = state.measure(*qubit, *basis, rng)?;
                    outcomes[*qubit] = Some(o);
                    state = s;
                }
                Step::ApplyIf { condition, gate } => {
                    if outcomes[*condition] == Some(1) {
                        state = state.apply(gate)?;
                    }
                }
            }
        }
        Ok(outcomes)
    }

    /// Exact distribution over the final outcome record, obtained by branching
    /// on every measurement and carrying branch weights. Entries are indexed
    /// like basis states (qubit 0 high bit); every qubit must be measured.
    pub fn exact_distribution(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let mut branches = vec![(1.0, PureState::basis_state(self.qubit_count, 0)?, vec![None; self.qubit_count])];
        for step in &self.steps {
            let mut next = Vec::with_capacity(branches.len() * 2);
            for (weight, state, outcomes) in branches {
                match step {
                    Step::Apply(g) => next.push((weight, state.apply(g)?, outcomes)),
                    Step::Measure { qubit, basis } => {
                        for o in 0..2u8 {
                            let p = state.outcome_probability(*qubit, *basis, o)?;
                            if p <= 0.0 {
                                continue;
                            }
                            let (collapsed, _) = state.collapse(*qubit, *basis, o, 0.0)?;
                            let mut rec: Outcomes = outcomes.clone();
                            rec[*qubit] = Some(o);
                            next.push((weight * p, collapsed, rec));
                        }
                    }
                    Step::ApplyIf { condition, gate } => {
                        let state = if outcomes[*condition] == Some(1) { state.apply(gate)? } else { state };
                        next.push((weight, state, outcomes));
                    }
                }
            }
            branches = next;
        }
        let mut dist = vec![0.0; 1 << self.qubit_count];
        for (weight, _, outcomes) in branches {
            let mut index = 0;
            for o in &outcomes {
                let Some(bit) = o else {
                    return config("exact distribution needs every qubit measured");
                };
                index = (index << 1) | usize::from(*bit);
            }
            dist[index] += weight;
        }
        Ok(dist)
    }
}
