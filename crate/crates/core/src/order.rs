//! Finite preference models and the weak-stochastic ordering.
//!
//! A [`PartialOrder`] stores the reflexive-transitive closure of a weak
//! preference relation `x ⪰ y` over named outcomes. Distributions over the
//! outcomes are ranked by comparing the mass they put on every member of the
//! [`WeakOrderFamily`]: the upper sets `{x}↑ = {y | y ⪰ x}` together with the
//! full outcome set and the empty set.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::{Error, Result};

/// Default tolerance for probability comparisons.
pub const DEFAULT_EPSILON: f64 = 1e-9;

/// Relationship between two outcomes under a preference model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Comparison {
    StrictlyPreferred,
    StrictlyDispreferred,
    Indifferent,
    Incomparable,
}

/// Outcome of comparing two things that may dominate one another.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dominance {
    Dominates,
    Dominated,
    /// Neither dominates: the two are incomparable or equal.
    Neither,
}

impl Dominance {
    pub fn flip(self) -> Self {
        match self {
            Dominance::Dominates => Dominance::Dominated,
            Dominance::Dominated => Dominance::Dominates,
            Dominance::Neither => Dominance::Neither,
        }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct PartialOrder {
    elements: Vec<String>,
    index: HashMap<String, usize>,
    /// Row-major `n × n`; `geq[x * n + y]` iff `x ⪰ y`.
    geq: Vec<bool>,
}

impl fmt::Debug for PartialOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pairs: Vec<(&str, &str)> = self
            .strict_pairs()
            .map(|(x, y)| (self.elements[x].as_str(), self.elements[y].as_str()))
            .collect();
        f.debug_struct("PartialOrder")
            .field("elements", &self.elements)
            .field("strict", &pairs)
            .finish()
    }
}

/// Collects weak and strict preference pairs before closing the relation.
#[derive(Debug, Clone, Default)]
pub struct OrderBuilder {
    elements: Vec<String>,
    weak: Vec<(String, String)>,
    strict: Vec<(String, String)>,
}

impl OrderBuilder {
    pub fn new<I, S>(elements: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        OrderBuilder {
            elements: elements.into_iter().map(Into::into).collect(),
            ..Default::default()
        }
    }

    /// Declares `better ⪰ worse`.
    pub fn weak(mut self, better: impl Into<String>, worse: impl Into<String>) -> Self {
        self.weak.push((better.into(), worse.into()));
        self
    }

    /// Declares `better ≻ worse`. Building fails if the closure makes the
    /// pair indifferent.
    pub fn strict(mut self, better: impl Into<String>, worse: impl Into<String>) -> Self {
        self.strict.push((better.into(), worse.into()));
        self
    }

    pub fn build(self) -> Result<PartialOrder> {
        if self.elements.is_empty() {
            return Err(Error::InvalidOrder("no elements".into()));
        }
        let mut index = HashMap::with_capacity(self.elements.len());
        for (i, e) in self.elements.iter().enumerate() {
            if index.insert(e.clone(), i).is_some() {
                return Err(Error::InvalidOrder(format!("duplicate element `{e}`")));
            }
        }
        let n = self.elements.len();
        let mut geq = vec![false; n * n];
        let lookup = |name: &str| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| Error::UnknownElement(name.to_string()))
        };
        for (a, b) in self.weak.iter().chain(self.strict.iter()) {
            let (a, b) = (lookup(a)?, lookup(b)?);
            geq[a * n + b] = true;
        }
        close_relation(&mut geq, n);
        for (a, b) in &self.strict {
            let (ia, ib) = (lookup(a)?, lookup(b)?);
            if geq[ib * n + ia] {
                return Err(Error::InvalidOrder(format!(
                    "`{a}` is declared strictly preferred to `{b}` but the closure makes them indifferent"
                )));
            }
        }
        Ok(PartialOrder {
            elements: self.elements,
            index,
            geq,
        })
    }
}

/// Reflexive-transitive closure of a row-major boolean relation, in place.
fn close_relation(rel: &mut [bool], n: usize) {
    for i in 0..n {
        rel[i * n + i] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if !rel[i * n + k] {
                continue;
            }
            for j in 0..n {
                if rel[k * n + j] {
                    rel[i * n + j] = true;
                }
            }
        }
    }
}

impl PartialOrder {
    pub fn builder<I, S>(elements: I) -> OrderBuilder
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        OrderBuilder::new(elements)
    }

    /// Builds an order from weak pairs `(better, worse)`.
    pub fn from_pairs<I, S>(elements: I, pairs: &[(&str, &str)]) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        pairs
            .iter()
            .fold(OrderBuilder::new(elements), |b, (x, y)| b.weak(*x, *y))
            .build()
    }

    /// Builds an order from an index predicate `geq(i, j)` meaning
    /// `elements[i] ⪰ elements[j]`. The predicate is closed afterwards.
    pub fn from_relation(
        elements: Vec<String>,
        geq: impl Fn(usize, usize) -> bool,
    ) -> Result<Self> {
        let n = elements.len();
        let mut builder = OrderBuilder::new(elements);
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j && geq(i, j) {
                    pairs.push((i, j));
                }
            }
        }
        let names = builder.elements.clone();
        for (i, j) in pairs {
            builder = builder.weak(names[i].clone(), names[j].clone());
        }
        builder.build()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownElement(name.to_string()))
    }

    /// `x ⪰ y` by index.
    pub fn weakly_prefers(&self, x: usize, y: usize) -> bool {
        self.geq[x * self.len() + y]
    }

    /// Pairs `(x, y)` with `x ≻ y`.
    pub fn strict_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.len();
        (0..n)
            .flat_map(move |x| (0..n).map(move |y| (x, y)))
            .filter(|&(x, y)| self.weakly_prefers(x, y) && !self.weakly_prefers(y, x))
    }

    /// Pairs of distinct elements that are indifferent to each other.
    pub fn indifferent_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.len();
        (0..n)
            .flat_map(move |x| (x + 1..n).map(move |y| (x, y)))
            .filter(|&(x, y)| self.weakly_prefers(x, y) && self.weakly_prefers(y, x))
    }

    pub fn is_total(&self) -> bool {
        let n = self.len();
        (0..n).all(|x| (0..n).all(|y| self.weakly_prefers(x, y) || self.weakly_prefers(y, x)))
    }

    pub fn compare_indices(&self, x: usize, y: usize) -> Comparison {
        match (self.weakly_prefers(x, y), self.weakly_prefers(y, x)) {
            (true, true) => Comparison::Indifferent,
            (true, false) => Comparison::StrictlyPreferred,
            (false, true) => Comparison::StrictlyDispreferred,
            (false, false) => Comparison::Incomparable,
        }
    }

    pub fn compare(&self, x: &str, y: &str) -> Result<Comparison> {
        Ok(self.compare_indices(self.index_of(x)?, self.index_of(y)?))
    }

    /// Indices of `{x}↑`, in element order.
    pub fn upper_set_indices(&self, x: usize) -> Vec<usize> {
        (0..self.len()).filter(|&y| self.weakly_prefers(y, x)).collect()
    }

    pub fn upper_set(&self, x: &str) -> Result<UpperSet> {
        let base = self.index_of(x)?;
        Ok(UpperSet {
            base: x.to_string(),
            members: self
                .upper_set_indices(base)
                .into_iter()
                .map(|i| self.elements[i].clone())
                .collect(),
        })
    }

    /// Upper sets of every element followed by the full set and the empty
    /// set, with duplicates removed (first occurrence kept).
    pub fn weak_order_family(&self) -> Result<WeakOrderFamily> {
        if self.is_empty() {
            return Err(Error::InvalidOrder("empty order".into()));
        }
        let mut sets: Vec<Vec<usize>> = Vec::with_capacity(self.len() + 2);
        let full: Vec<usize> = (0..self.len()).collect();
        let candidates = (0..self.len())
            .map(|x| self.upper_set_indices(x))
            .chain([full, Vec::new()]);
        for set in candidates {
            if !sets.contains(&set) {
                sets.push(set);
            }
        }
        Ok(WeakOrderFamily {
            elements: self.elements.clone(),
            sets,
        })
    }

    /// Weak-stochastic dominance between dense distributions indexed like
    /// the order's elements.
    pub fn dominance(&self, p1: &[f64], p2: &[f64], eps: f64) -> Result<Dominance> {
        for p in [p1, p2] {
            if p.len() != self.len() {
                return Err(Error::DimensionMismatch {
                    expected: self.len(),
                    got: p.len(),
                });
            }
        }
        let n = self.len();
        let mut geq_all = true;
        let mut leq_all = true;
        let mut gt_some = false;
        let mut lt_some = false;
        // U and ∅ carry the same mass for any two complete distributions,
        // but they are checked anyway so sub-stochastic inputs behave.
        let total = |p: &[f64]| p.iter().sum::<f64>();
        let mut check = |m1: f64, m2: f64| {
            geq_all &= m1 >= m2 - eps;
            leq_all &= m1 <= m2 + eps;
            gt_some |= m1 > m2 + eps;
            lt_some |= m1 < m2 - eps;
        };
        for x in 0..n {
            let (mut m1, mut m2) = (0.0, 0.0);
            for y in 0..n {
                if self.weakly_prefers(y, x) {
                    m1 += p1[y];
                    m2 += p2[y];
                }
            }
            check(m1, m2);
        }
        check(total(p1), total(p2));
        Ok(if geq_all && gt_some {
            Dominance::Dominates
        } else if leq_all && lt_some {
            Dominance::Dominated
        } else {
            Dominance::Neither
        })
    }
}

/// `{x}↑` with member names listed in element order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpperSet {
    pub base: String,
    pub members: Vec<String>,
}

impl UpperSet {
    pub fn contains(&self, name: &str) -> bool {
        self.members.iter().any(|m| m == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeakOrderFamily {
    elements: Vec<String>,
    sets: Vec<Vec<usize>>,
}

impl WeakOrderFamily {
    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn index_sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn named_sets(&self) -> Vec<Vec<&str>> {
        self.sets
            .iter()
            .map(|s| s.iter().map(|&i| self.elements[i].as_str()).collect())
            .collect()
    }

    /// `[P[X]]` for every family member `X`, in family order.
    pub fn project(&self, dist: &OutcomeDistribution) -> Result<Vec<f64>> {
        let dense = dist.to_dense(&self.elements)?;
        Ok(self
            .sets
            .iter()
            .map(|s| s.iter().fold(0.0, |acc, &i| acc + dense[i]))
            .collect())
    }
}

/// Finite-support probability distribution keyed by outcome name.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OutcomeDistribution {
    probs: BTreeMap<String, f64>,
}

impl OutcomeDistribution {
    pub fn new<I, S>(entries: I) -> Self
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        let mut probs = BTreeMap::new();
        for (k, p) in entries {
            *probs.entry(k.into()).or_insert(0.0) += p;
        }
        OutcomeDistribution { probs }
    }

    pub fn from_dense(elements: &[String], probs: &[f64]) -> Self {
        Self::new(elements.iter().cloned().zip(probs.iter().copied()))
    }

    pub fn get(&self, name: &str) -> f64 {
        self.probs.get(name).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.probs.iter().map(|(k, &v)| (k.as_str(), v))
    }

    pub fn total_mass(&self) -> f64 {
        self.probs.values().sum()
    }

    /// Checks nonnegativity and that the total mass is `1 ± eps`.
    pub fn check(&self, eps: f64) -> Result<()> {
        if let Some((k, p)) = self.probs.iter().find(|(_, &p)| p < 0.0 || p.is_nan()) {
            return Err(Error::InvalidModel(format!("negative probability {p} for `{k}`")));
        }
        let mass = self.total_mass();
        if (mass - 1.0).abs() > eps {
            return Err(Error::InvalidModel(format!("total mass {mass} is not 1")));
        }
        Ok(())
    }

    /// Dense vector in the given element order; unknown keys are errors.
    pub fn to_dense(&self, elements: &[String]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; elements.len()];
        for (k, &p) in &self.probs {
            let i = elements
                .iter()
                .position(|e| e == k)
                .ok_or_else(|| Error::UnknownElement(k.clone()))?;
            out[i] = p;
        }
        Ok(out)
    }
}

/// Weak-stochastic dominance of `p1` over `p2` with tolerance `eps`.
pub fn dominates_weak_stochastic(
    p1: &OutcomeDistribution,
    p2: &OutcomeDistribution,
    order: &PartialOrder,
    eps: f64,
) -> Result<Dominance> {
    let d1 = p1.to_dense(order.elements())?;
    let d2 = p2.to_dense(order.elements())?;
    order.dominance(&d1, &d2, eps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example_order() -> PartialOrder {
        PartialOrder::from_pairs(
            ["a", "b", "c", "d"],
            &[("a", "b"), ("b", "d"), ("c", "d"), ("a", "c"), ("a", "d")],
        )
        .unwrap()
    }

    #[test]
    fn upper_sets_of_example() {
        let o = example_order();
        assert_eq!(o.upper_set("b").unwrap().members, ["a", "b"]);
        assert_eq!(o.upper_set("a").unwrap().members, ["a"]);
        assert_eq!(o.upper_set("d").unwrap().members, ["a", "b", "c", "d"]);
        assert!(matches!(o.upper_set("z"), Err(Error::UnknownElement(e)) if e == "z"));
    }

    #[test]
    fn upper_set_of_antichain_is_singleton() {
        let o = PartialOrder::from_pairs(["x", "y"], &[]).unwrap();
        assert_eq!(o.upper_set("x").unwrap().members, ["x"]);
    }

    #[test]
    fn family_shapes() {
        let single = PartialOrder::from_pairs(["x"], &[]).unwrap();
        assert_eq!(
            single.weak_order_family().unwrap().named_sets(),
            vec![vec!["x"], vec![]]
        );
        let anti = PartialOrder::from_pairs(["x", "y"], &[]).unwrap();
        assert_eq!(
            anti.weak_order_family().unwrap().named_sets(),
            vec![vec!["x"], vec!["y"], vec!["x", "y"], vec![]]
        );
    }

    #[test]
    fn comparisons() {
        let o = example_order();
        assert_eq!(o.compare("a", "d").unwrap(), Comparison::StrictlyPreferred);
        assert_eq!(o.compare("d", "a").unwrap(), Comparison::StrictlyDispreferred);
        assert_eq!(o.compare("b", "b").unwrap(), Comparison::Indifferent);
        assert_eq!(o.compare("b", "c").unwrap(), Comparison::Incomparable);
        assert!(o.compare("b", "q").is_err());
    }

    #[test]
    fn indifference_is_representable() {
        let o = PartialOrder::from_pairs(["x", "y", "z"], &[("x", "y"), ("y", "x"), ("y", "z")])
            .unwrap();
        assert_eq!(o.compare("x", "y").unwrap(), Comparison::Indifferent);
        assert_eq!(o.compare("x", "z").unwrap(), Comparison::StrictlyPreferred);
        assert_eq!(o.indifferent_pairs().collect::<Vec<_>>(), vec![(0, 1)]);
    }

    #[test]
    fn strict_declaration_contradicted_by_closure_is_rejected() {
        let err = PartialOrder::builder(["x", "y", "z"])
            .strict("x", "y")
            .weak("y", "z")
            .weak("z", "x")
            .build()
            .unwrap_err();
        assert!(matches!(err, Error::InvalidOrder(_)));
    }

    #[test]
    fn duplicate_and_empty_orders_rejected() {
        assert!(PartialOrder::from_pairs(["x", "x"], &[]).is_err());
        assert!(PartialOrder::from_pairs(Vec::<String>::new(), &[]).is_err());
        assert!(PartialOrder::from_pairs(["x"], &[("x", "q")]).is_err());
    }

    #[test]
    fn example_dominance_verdicts() {
        let o = example_order();
        let p1 = OutcomeDistribution::new([("a", 0.5), ("b", 0.5)]);
        let p2 = OutcomeDistribution::new([("a", 0.5), ("c", 0.5)]);
        let p3 = OutcomeDistribution::new([("a", 0.5), ("d", 0.5)]);
        let eps = DEFAULT_EPSILON;
        assert_eq!(dominates_weak_stochastic(&p1, &p3, &o, eps).unwrap(), Dominance::Dominates);
        assert_eq!(dominates_weak_stochastic(&p3, &p1, &o, eps).unwrap(), Dominance::Dominated);
        assert_eq!(dominates_weak_stochastic(&p1, &p2, &o, eps).unwrap(), Dominance::Neither);
        assert_eq!(dominates_weak_stochastic(&p1, &p1, &o, eps).unwrap(), Dominance::Neither);
    }

    #[test]
    fn distribution_over_unknown_element_is_an_error() {
        let o = example_order();
        let p = OutcomeDistribution::new([("a", 0.5), ("e", 0.5)]);
        assert!(matches!(
            dominates_weak_stochastic(&p, &p, &o, DEFAULT_EPSILON),
            Err(Error::UnknownElement(_))
        ));
    }

    #[test]
    fn mass_check() {
        assert!(OutcomeDistribution::new([("a", 0.5), ("b", 0.5)]).check(1e-9).is_ok());
        assert!(OutcomeDistribution::new([("a", 0.5), ("b", 0.4)]).check(1e-9).is_err());
        assert!(OutcomeDistribution::new([("a", 1.5), ("b", -0.5)]).check(1e-9).is_err());
    }
}
