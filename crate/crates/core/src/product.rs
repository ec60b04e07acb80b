//! Product of a terminating labeled MDP with a preference automaton.
//!
//! Product states are pairs `(s, q)`. Taking action `a` in `(s, q)` moves to
//! `(s', δ(q, L(s')))` with probability `P(s, a, s')`; entering the sink does
//! not advance the automaton since the sink is labeled ε. Only states
//! reachable from `x_0 = (s_0, δ(ι, L(s_0)))` are materialized.
//!
//! The terminal product states `{s_⊥} × Q` are grouped into classes
//! `W_i = ({s_⊥} × F_i) ∩ X`, one per partition block, and the automaton's
//! preference graph is carried over unchanged onto the classes.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::mdp::{Action, Path, Tlmdp, TransitionSystem};
use crate::pdfa::{ClassReachability, Pdfa};

/// A terminal class `W_i`. May be empty when no `(s_⊥, q)` with `q ∈ F_i`
/// is reachable; the class is kept so indices line up with the partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TerminalClass {
    pub name: String,
    pub states: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProductMdp {
    names: Vec<(String, String)>,
    actions: Vec<Vec<Action>>,
    initial: usize,
    classes: Vec<TerminalClass>,
    class_of: Vec<Option<usize>>,
    edges: Vec<(usize, usize)>,
    reach: ClassReachability,
    /// `(mdp state, automaton state)` indices, when built from models.
    origin: Option<Vec<(usize, usize)>>,
}

impl TransitionSystem for ProductMdp {
    fn num_states(&self) -> usize {
        self.names.len()
    }

    fn actions(&self, state: usize) -> &[Action] {
        &self.actions[state]
    }

    fn initial(&self) -> usize {
        self.initial
    }

    fn state_name(&self, state: usize) -> String {
        let (s, q) = &self.names[state];
        format!("({s},{q})")
    }
}

/// Builds the reachable product of `mdp` and `pdfa`.
pub fn build_product(mdp: &Tlmdp, pdfa: &Pdfa) -> Result<ProductMdp> {
    let sink = mdp.sink();
    let mut symbol_of: Vec<Option<usize>> = vec![None; mdp.num_states()];
    let mut symbol = |s: usize| -> Result<usize> {
        if let Some(k) = symbol_of[s] {
            return Ok(k);
        }
        let label = mdp.label(s).ok_or_else(|| {
            Error::InvalidModel(format!("non-sink state `{}` is labeled ε", mdp.states()[s]))
        })?;
        let k = pdfa.symbol_index(label).ok_or_else(|| Error::UnknownSymbol {
            symbol: label.to_string(),
            position: 0,
        })?;
        symbol_of[s] = Some(k);
        Ok(k)
    };

    let s0 = mdp.initial();
    let q0 = if s0 == sink {
        pdfa.initial()
    } else {
        pdfa.step_index(pdfa.initial(), symbol(s0)?)
    };

    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut origin = vec![(s0, q0)];
    index.insert((s0, q0), 0);
    let mut actions: Vec<Vec<Action>> = Vec::new();
    let mut next = 0;
    while next < origin.len() {
        let (s, q) = origin[next];
        next += 1;
        let mut acts = Vec::with_capacity(mdp.actions(s).len());
        if s != sink {
            for a in mdp.actions(s) {
                let mut successors = Vec::with_capacity(a.successors.len());
                for &(t, p) in &a.successors {
                    if p <= 0.0 {
                        continue;
                    }
                    let qt = if t == sink { q } else { pdfa.step_index(q, symbol(t)?) };
                    let id = *index.entry((t, qt)).or_insert_with(|| {
                        origin.push((t, qt));
                        origin.len() - 1
                    });
                    successors.push((id, p));
                }
                acts.push(Action {
                    name: a.name.clone(),
                    successors,
                });
            }
        }
        actions.push(acts);
    }

    let mut classes: Vec<TerminalClass> = pdfa
        .blocks()
        .iter()
        .map(|b| TerminalClass {
            name: b.name.clone(),
            states: Vec::new(),
        })
        .collect();
    let mut terminal: Vec<(usize, usize)> = origin
        .iter()
        .enumerate()
        .filter(|(_, &(s, _))| s == sink)
        .map(|(x, &(_, q))| (q, x))
        .collect();
    terminal.sort_unstable();
    for (q, x) in terminal {
        classes[pdfa.class_of_index(q)].states.push(x);
    }

    let names = origin
        .iter()
        .map(|&(s, q)| (mdp.states()[s].clone(), pdfa.states()[q].clone()))
        .collect();
    let mut p = ProductMdp::from_parts(names, actions, 0, classes, pdfa.edges().to_vec())?;
    p.origin = Some(origin);
    Ok(p)
}

impl ProductMdp {
    /// Assembles a product from its parts, checking that the classes
    /// partition exactly the action-less states.
    pub fn from_parts(
        names: Vec<(String, String)>,
        actions: Vec<Vec<Action>>,
        initial: usize,
        classes: Vec<TerminalClass>,
        edges: Vec<(usize, usize)>,
    ) -> Result<Self> {
        let n = names.len();
        if actions.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: actions.len(),
            });
        }
        if initial >= n {
            return Err(Error::InvalidModel(format!("initial state {initial} out of range")));
        }
        for (x, acts) in actions.iter().enumerate() {
            for a in acts {
                if let Some(&(t, _)) = a.successors.iter().find(|&&(t, _)| t >= n) {
                    return Err(Error::InvalidModel(format!(
                        "transition from state {x} to out-of-range state {t}"
                    )));
                }
            }
        }
        let mut class_of = vec![None; n];
        for (i, c) in classes.iter().enumerate() {
            for &x in &c.states {
                if x >= n {
                    return Err(Error::InvalidModel(format!("class `{}` lists state {x}", c.name)));
                }
                if class_of[x].is_some() {
                    return Err(Error::InvalidModel(format!("state {x} is in two classes")));
                }
                if !actions[x].is_empty() {
                    return Err(Error::InvalidModel(format!(
                        "class `{}` contains non-terminal state {x}",
                        c.name
                    )));
                }
                class_of[x] = Some(i);
            }
        }
        if let Some(x) = (0..n).find(|&x| actions[x].is_empty() && class_of[x].is_none()) {
            return Err(Error::InvalidModel(format!(
                "terminal state {} belongs to no class",
                names[x].0
            )));
        }
        if let Some(&(i, j)) = edges
            .iter()
            .find(|&&(i, j)| i >= classes.len() || j >= classes.len())
        {
            return Err(Error::InvalidModel(format!("preference edge ({i}, {j}) out of range")));
        }
        let reach = ClassReachability::from_edges(classes.len(), &edges);
        Ok(ProductMdp {
            names,
            actions,
            initial,
            classes,
            class_of,
            edges,
            reach,
            origin: None,
        })
    }

    /// `(mdp state, automaton state)` names.
    pub fn state_names(&self) -> &[(String, String)] {
        &self.names
    }

    pub fn state_index(&self, mdp_state: &str, dfa_state: &str) -> Option<usize> {
        self.names
            .iter()
            .position(|(s, q)| s == mdp_state && q == dfa_state)
    }

    pub fn classes(&self) -> &[TerminalClass] {
        &self.classes
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    /// Class of a terminal state.
    pub fn class_of(&self, state: usize) -> Option<usize> {
        self.class_of[state]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn reachability(&self) -> &ClassReachability {
        &self.reach
    }

    pub fn origin(&self) -> Option<&[(usize, usize)]> {
        self.origin.as_deref()
    }

    pub fn num_terminal(&self) -> usize {
        self.classes.iter().map(|c| c.states.len()).sum()
    }

    /// Projects a product path to the MDP path it shadows.
    pub fn project(&self, path: &Path) -> Option<Path> {
        let origin = self.origin.as_ref()?;
        Some(Path {
            states: path.states.iter().map(|&x| origin[x].0).collect(),
            terminated: path.terminated,
        })
    }
}

/// `Z_i`, the union of the classes reachable from `W_i`, for every class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassUpperClosure {
    /// Class indices `{j | W_i ⇝ W_j}` per class.
    pub classes: Vec<Vec<usize>>,
    /// Product states of `Z_i`, sorted.
    pub states: Vec<Vec<usize>>,
    /// `F_i^+` as automaton state indices, when the product was built from
    /// models.
    pub automaton_states: Option<Vec<Vec<usize>>>,
}

impl ClassUpperClosure {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn contains(&self, i: usize, state: usize) -> bool {
        self.states[i].binary_search(&state).is_ok()
    }
}

pub fn class_upper_closures(p: &ProductMdp) -> ClassUpperClosure {
    let n = p.num_classes();
    let classes: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| p.reach.reaches(i, j)).collect())
        .collect();
    let states = classes
        .iter()
        .map(|js| {
            let mut z: Vec<usize> = js.iter().flat_map(|&j| p.classes[j].states.iter().copied()).collect();
            z.sort_unstable();
            z
        })
        .collect();
    let automaton_states = p.origin.as_ref().map(|origin| {
        classes
            .iter()
            .map(|js| {
                let mut qs: Vec<usize> = js
                    .iter()
                    .flat_map(|&j| p.classes[j].states.iter().map(|&x| origin[x].1))
                    .collect();
                qs.sort_unstable();
                qs.dedup();
                qs
            })
            .collect()
    });
    ClassUpperClosure {
        classes,
        states,
        automaton_states,
    }
}
