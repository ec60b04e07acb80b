//! Preference deterministic finite automata.
//!
//! A [`Pdfa`] is a total DFA over symbols drawn from `2^AP` whose accepting
//! condition is replaced by a preference graph: the states are partitioned
//! into named blocks and a directed edge `(F_i, F_j)` is an *improving flip*,
//! i.e. words ending in `F_j` are preferred to words ending in `F_i`.
//! Reachability in the graph (reflexive and transitive) gives the weak
//! preference between blocks.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::order::PartialOrder;

/// One letter of the alphabet: a set of atomic propositions kept sorted so
/// lookups are exact.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Symbol(BTreeSet<String>);

impl Symbol {
    pub fn new<I, S>(props: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Symbol(props.into_iter().map(Into::into).collect())
    }

    pub fn empty() -> Self {
        Symbol(BTreeSet::new())
    }

    pub fn props(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }

    pub fn contains(&self, prop: &str) -> bool {
        self.0.contains(prop)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

/// Verdict of comparing two words.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WordComparison {
    Indifferent,
    FirstPreferred,
    SecondPreferred,
    Incomparable,
}

/// A named block of the state partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub name: String,
    pub states: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pdfa {
    states: Vec<String>,
    state_index: HashMap<String, usize>,
    propositions: Vec<String>,
    alphabet: Vec<Symbol>,
    symbol_index: HashMap<Symbol, usize>,
    /// `delta[q * |Σ| + σ]`
    delta: Vec<usize>,
    initial: usize,
    blocks: Vec<Block>,
    class_of: Vec<usize>,
    edges: Vec<(usize, usize)>,
    reach: ClassReachability,
}

/// Reflexive-transitive closure of the preference graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassReachability {
    n: usize,
    reach: Vec<bool>,
}

impl ClassReachability {
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut reach = vec![false; n * n];
        for i in 0..n {
            reach[i * n + i] = true;
        }
        for &(i, j) in edges {
            reach[i * n + j] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if reach[i * n + k] {
                    for j in 0..n {
                        if reach[k * n + j] {
                            reach[i * n + j] = true;
                        }
                    }
                }
            }
        }
        ClassReachability { n, reach }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `F_i ⇝ F_j`.
    pub fn reaches(&self, i: usize, j: usize) -> bool {
        self.reach[i * self.n + j]
    }

    /// Row-major 0/1 matrix; entry `(i, j)` is 1 iff `F_i ⇝ F_j`.
    pub fn matrix(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| if self.reaches(i, j) { 1.0 } else { 0.0 }).collect())
            .collect()
    }
}

#[derive(Debug, Clone, Default)]
pub struct PdfaBuilder {
    states: Vec<String>,
    propositions: Vec<String>,
    alphabet: Vec<Symbol>,
    transitions: Vec<(String, Symbol, String)>,
    initial: Option<String>,
    default_state: Option<String>,
    blocks: Vec<(String, Vec<String>)>,
    edges: Vec<(String, String)>,
}

impl PdfaBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn states<I, S>(mut self, states: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.states.extend(states.into_iter().map(Into::into));
        self
    }

    pub fn propositions<I, S>(mut self, props: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.propositions.extend(props.into_iter().map(Into::into));
        self
    }

    pub fn symbol(mut self, symbol: Symbol) -> Self {
        self.alphabet.push(symbol);
        self
    }

    /// Adds every subset of the declared propositions to the alphabet.
    pub fn full_alphabet(mut self) -> Self {
        let n = self.propositions.len();
        for mask in 0u64..(1 << n) {
            self.alphabet.push(Symbol::new(
                (0..n).filter(|b| mask >> b & 1 == 1).map(|b| self.propositions[b].clone()),
            ));
        }
        self
    }

    pub fn transition(mut self, from: impl Into<String>, symbol: Symbol, to: impl Into<String>) -> Self {
        self.transitions.push((from.into(), symbol, to.into()));
        self
    }

    pub fn initial(mut self, state: impl Into<String>) -> Self {
        self.initial = Some(state.into());
        self
    }

    /// Successor used for every `(q, σ)` pair without an explicit transition.
    pub fn default_state(mut self, state: impl Into<String>) -> Self {
        self.default_state = Some(state.into());
        self
    }

    pub fn block<I, S>(mut self, name: impl Into<String>, states: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.blocks
            .push((name.into(), states.into_iter().map(Into::into).collect()));
        self
    }

    /// Improving flip: words ending in block `to` are preferred to words
    /// ending in block `from`.
    pub fn edge(mut self, from: impl Into<String>, to: impl Into<String>) -> Self {
        self.edges.push((from.into(), to.into()));
        self
    }

    pub fn build(self) -> Result<Pdfa> {
        let invalid = |m: String| Error::InvalidModel(m);
        if self.states.is_empty() {
            return Err(invalid("automaton has no states".into()));
        }
        let mut state_index = HashMap::new();
        for (i, s) in self.states.iter().enumerate() {
            if state_index.insert(s.clone(), i).is_some() {
                return Err(invalid(format!("duplicate automaton state `{s}`")));
            }
        }
        let lookup = |s: &str| {
            state_index
                .get(s)
                .copied()
                .ok_or_else(|| Error::UnknownState(s.to_string()))
        };

        let mut symbol_index = HashMap::new();
        for (i, sym) in self.alphabet.iter().enumerate() {
            if let Some(p) = sym.props().find(|p| !self.propositions.iter().any(|q| q == p)) {
                return Err(invalid(format!("symbol {sym} uses undeclared proposition `{p}`")));
            }
            if symbol_index.insert(sym.clone(), i).is_some() {
                return Err(invalid(format!("duplicate symbol {sym}")));
            }
        }
        if self.alphabet.is_empty() {
            return Err(invalid("alphabet is empty".into()));
        }

        let ns = self.alphabet.len();
        let mut delta: Vec<Option<usize>> = vec![None; self.states.len() * ns];
        for (from, sym, to) in &self.transitions {
            let q = lookup(from)?;
            let t = lookup(to)?;
            let s = *symbol_index.get(sym).ok_or_else(|| {
                invalid(format!("transition from `{from}` on {sym}: symbol not in alphabet"))
            })?;
            match delta[q * ns + s] {
                Some(prev) if prev != t => {
                    return Err(invalid(format!(
                        "nondeterministic transition from `{from}` on {sym}"
                    )))
                }
                _ => delta[q * ns + s] = Some(t),
            }
        }
        let default = self.default_state.as_deref().map(lookup).transpose()?;
        let mut total = Vec::with_capacity(delta.len());
        for (k, d) in delta.into_iter().enumerate() {
            match d.or(default) {
                Some(t) => total.push(t),
                None => {
                    return Err(invalid(format!(
                        "no transition from `{}` on {} and no default state",
                        self.states[k / ns],
                        self.alphabet[k % ns]
                    )))
                }
            }
        }

        let initial = lookup(
            self.initial
                .as_deref()
                .ok_or_else(|| invalid("initial state missing".into()))?,
        )?;

        let mut class_of = vec![usize::MAX; self.states.len()];
        let mut blocks = Vec::with_capacity(self.blocks.len());
        let mut block_index = HashMap::new();
        for (b, (name, members)) in self.blocks.iter().enumerate() {
            if members.is_empty() {
                return Err(invalid(format!("partition block `{name}` is empty")));
            }
            if block_index.insert(name.clone(), b).is_some() {
                return Err(invalid(format!("duplicate partition block `{name}`")));
            }
            let mut states = Vec::with_capacity(members.len());
            for m in members {
                let q = lookup(m)?;
                if class_of[q] != usize::MAX {
                    return Err(invalid(format!("state `{m}` belongs to two partition blocks")));
                }
                class_of[q] = b;
                states.push(q);
            }
            blocks.push(Block {
                name: name.clone(),
                states,
            });
        }
        if let Some(q) = class_of.iter().position(|&c| c == usize::MAX) {
            return Err(invalid(format!(
                "state `{}` is not covered by the partition",
                self.states[q]
            )));
        }

        let mut edges = Vec::with_capacity(self.edges.len());
        for (from, to) in &self.edges {
            let block = |n: &str| {
                block_index
                    .get(n)
                    .copied()
                    .ok_or_else(|| invalid(format!("edge endpoint `{n}` is not a partition block")))
            };
            let e = (block(from)?, block(to)?);
            if !edges.contains(&e) {
                edges.push(e);
            }
        }
        let reach = ClassReachability::from_edges(blocks.len(), &edges);

        Ok(Pdfa {
            states: self.states,
            state_index,
            propositions: self.propositions,
            alphabet: self.alphabet,
            symbol_index,
            delta: total,
            initial,
            blocks,
            class_of,
            edges,
            reach,
        })
    }
}

impl Pdfa {
    pub fn builder() -> PdfaBuilder {
        PdfaBuilder::new()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_index(&self, name: &str) -> Result<usize> {
        self.state_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownState(name.to_string()))
    }

    pub fn propositions(&self) -> &[String] {
        &self.propositions
    }

    pub fn alphabet(&self) -> &[Symbol] {
        &self.alphabet
    }

    pub fn symbol_index(&self, symbol: &Symbol) -> Option<usize> {
        self.symbol_index.get(symbol).copied()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn num_classes(&self) -> usize {
        self.blocks.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn reachability(&self) -> &ClassReachability {
        &self.reach
    }

    /// One step by symbol index.
    pub fn step_index(&self, q: usize, symbol: usize) -> usize {
        self.delta[q * self.alphabet.len() + symbol]
    }

    pub fn step(&self, q: usize, symbol: &Symbol) -> Result<usize> {
        let s = self.symbol_index(symbol).ok_or_else(|| Error::UnknownSymbol {
            symbol: symbol.to_string(),
            position: 0,
        })?;
        Ok(self.step_index(q, s))
    }

    /// `δ(ι, word)`.
    pub fn run(&self, word: &[Symbol]) -> Result<usize> {
        self.run_from(self.initial, word)
    }

    pub fn run_from(&self, start: usize, word: &[Symbol]) -> Result<usize> {
        word.iter().enumerate().try_fold(start, |q, (pos, sym)| {
            let s = self.symbol_index(sym).ok_or_else(|| Error::UnknownSymbol {
                symbol: sym.to_string(),
                position: pos,
            })?;
            Ok(self.step_index(q, s))
        })
    }

    pub fn class_of_index(&self, q: usize) -> usize {
        self.class_of[q]
    }

    pub fn class_of(&self, state: &str) -> Result<usize> {
        Ok(self.class_of[self.state_index(state)?])
    }

    pub fn class_index(&self, name: &str) -> Result<usize> {
        self.blocks
            .iter()
            .position(|b| b.name == name)
            .ok_or_else(|| Error::UnknownElement(name.to_string()))
    }

    /// Compares the classes two words land in. Distinct classes that reach
    /// each other (a cycle in the graph) are reported as indifferent.
    pub fn compare_classes(&self, c1: usize, c2: usize) -> WordComparison {
        if c1 == c2 {
            return WordComparison::Indifferent;
        }
        match (self.reach.reaches(c2, c1), self.reach.reaches(c1, c2)) {
            (true, true) => WordComparison::Indifferent,
            (true, false) => WordComparison::FirstPreferred,
            (false, true) => WordComparison::SecondPreferred,
            (false, false) => WordComparison::Incomparable,
        }
    }

    pub fn compare_words(&self, w1: &[Symbol], w2: &[Symbol]) -> Result<WordComparison> {
        let c1 = self.class_of[self.run(w1)?];
        let c2 = self.class_of[self.run(w2)?];
        Ok(self.compare_classes(c1, c2))
    }

    /// Classes reachable from `class` in the preference graph, i.e. the
    /// classes whose words are at least as good as words ending in `class`.
    pub fn word_upper_set_classes(&self, class: usize) -> Result<Vec<usize>> {
        if class >= self.num_classes() {
            return Err(Error::UnknownElement(format!("class index {class}")));
        }
        Ok((0..self.num_classes())
            .filter(|&j| self.reach.reaches(class, j))
            .collect())
    }

    /// Preference model over the partition blocks: `F_i ⪰ F_j` iff `F_j ⇝ F_i`.
    pub fn induced_order(&self) -> PartialOrder {
        let names = self.blocks.iter().map(|b| b.name.clone()).collect();
        PartialOrder::from_relation(names, |i, j| self.reach.reaches(j, i))
            .expect("block names are unique and nonempty")
    }

    /// Model warnings: distinct classes that reach each other and therefore
    /// collapse into indifference.
    pub fn warnings(&self) -> Vec<String> {
        let n = self.num_classes();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if self.reach.reaches(i, j) && self.reach.reaches(j, i) {
                    out.push(format!(
                        "preference graph cycle makes `{}` and `{}` indifferent",
                        self.blocks[i].name, self.blocks[j].name
                    ));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::Comparison;

    fn two_class() -> Pdfa {
        Pdfa::builder()
            .states(["u", "v"])
            .propositions(["g"])
            .full_alphabet()
            .transition("u", Symbol::new(["g"]), "v")
            .transition("u", Symbol::empty(), "u")
            .transition("v", Symbol::new(["g"]), "v")
            .transition("v", Symbol::empty(), "v")
            .initial("u")
            .block("bad", ["u"])
            .block("good", ["v"])
            .edge("bad", "good")
            .build()
            .unwrap()
    }

    #[test]
    fn run_and_classes() {
        let a = two_class();
        assert_eq!(a.run(&[]).unwrap(), a.initial());
        let g = Symbol::new(["g"]);
        assert_eq!(a.run(std::slice::from_ref(&g)).unwrap(), a.step(a.initial(), &g).unwrap());
        assert_eq!(a.class_of("v").unwrap(), 1);
        assert!(a.class_of("w").is_err());
    }

    #[test]
    fn unknown_symbol_reports_position() {
        let a = two_class();
        let err = a
            .run(&[Symbol::empty(), Symbol::new(["h"])])
            .unwrap_err();
        match err {
            Error::UnknownSymbol { symbol, position } => {
                assert_eq!(symbol, "{h}");
                assert_eq!(position, 1);
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn compare_words_cases() {
        let a = two_class();
        let g = Symbol::new(["g"]);
        let e = Symbol::empty();
        assert_eq!(
            a.compare_words(&[g.clone()], &[e.clone()]).unwrap(),
            WordComparison::FirstPreferred
        );
        assert_eq!(
            a.compare_words(&[e.clone()], &[e.clone(), g.clone()]).unwrap(),
            WordComparison::SecondPreferred
        );
        assert_eq!(a.compare_words(&[e.clone()], &[e]).unwrap(), WordComparison::Indifferent);
    }

    #[test]
    fn partial_delta_needs_default() {
        let b = Pdfa::builder()
            .states(["u"])
            .propositions(["g"])
            .full_alphabet()
            .transition("u", Symbol::empty(), "u")
            .initial("u")
            .block("only", ["u"]);
        assert!(matches!(b.clone().build(), Err(Error::InvalidModel(_))));
        let a = b.default_state("u").build().unwrap();
        assert_eq!(a.step(0, &Symbol::new(["g"])).unwrap(), 0);
    }

    #[test]
    fn partition_must_cover_and_be_disjoint() {
        let base = || {
            Pdfa::builder()
                .states(["u", "v"])
                .propositions(Vec::<String>::new())
                .symbol(Symbol::empty())
                .default_state("u")
                .initial("u")
        };
        assert!(base().block("a", ["u"]).build().is_err());
        assert!(base().block("a", ["u", "v"]).block("b", ["v"]).build().is_err());
        assert!(base().block("a", ["u"]).block("b", ["v"]).edge("a", "c").build().is_err());
        assert!(base().block("a", ["u", "v"]).build().is_ok());
    }

    #[test]
    fn single_class_and_antichain_orders() {
        let single = Pdfa::builder()
            .states(["u"])
            .symbol(Symbol::empty())
            .default_state("u")
            .initial("u")
            .block("all", ["u"])
            .build()
            .unwrap();
        assert_eq!(single.class_of("u").unwrap(), 0);
        assert_eq!(single.induced_order().len(), 1);

        let anti = Pdfa::builder()
            .states(["u", "v"])
            .symbol(Symbol::empty())
            .default_state("u")
            .initial("u")
            .block("a", ["u"])
            .block("b", ["v"])
            .build()
            .unwrap();
        let o = anti.induced_order();
        assert_eq!(o.compare("a", "b").unwrap(), Comparison::Incomparable);
        assert_eq!(anti.word_upper_set_classes(1).unwrap(), vec![1]);
    }

    #[test]
    fn cycles_surface_as_indifference() {
        let a = Pdfa::builder()
            .states(["u", "v"])
            .symbol(Symbol::empty())
            .default_state("u")
            .initial("u")
            .block("a", ["u"])
            .block("b", ["v"])
            .edge("a", "b")
            .edge("b", "a")
            .build()
            .unwrap();
        assert_eq!(a.warnings().len(), 1);
        assert_eq!(a.compare_classes(0, 1), WordComparison::Indifferent);
        assert_eq!(a.induced_order().compare("a", "b").unwrap(), Comparison::Indifferent);
    }
}
