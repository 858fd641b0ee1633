//! Finite posets and their upper-set topology.
//!
//! In a finite poset every directed subset has a greatest element, so the
//! Scott-open sets are exactly the upward-closed sets. [`FinitePoset::is_scott_open_by_definition`]
//! checks the unreduced Scott condition so that equivalence can be tested
//! rather than assumed.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::set::{ElementSet, MAX_ELEMENTS};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderError {
    #[error("duplicate element name `{0}`")]
    DuplicateName(String),
    #[error("unknown element `{0}`")]
    UnknownName(String),
    #[error("order assertions form a cycle through `{0}` and `{1}`")]
    Cycle(String, String),
    #[error("poset has {size} elements, limit is {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error("element `{0}` is not a member of the open set")]
    NotMember(String),
    #[error("element index {0} out of range")]
    OutOfRange(usize),
}

/// A finite partial order, stored as the up-set and down-set mask of every
/// element.
#[derive(Clone, PartialEq, Eq)]
pub struct FinitePoset {
    names: Vec<String>,
    up: Vec<ElementSet>,
    down: Vec<ElementSet>,
}

/// An upward-closed subset of a [`FinitePoset`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct OpenSet(ElementSet);

impl OpenSet {
    pub fn members(self) -> ElementSet {
        self.0
    }

    pub fn contains(self, x: usize) -> bool {
        self.0.contains(x)
    }

    pub fn is_empty(self) -> bool {
        self.0.is_empty()
    }

    pub fn union(self, other: OpenSet) -> OpenSet {
        OpenSet(self.0 | other.0)
    }

    pub fn intersection(self, other: OpenSet) -> OpenSet {
        OpenSet(self.0 & other.0)
    }
}

/// Outcome of [`FinitePoset::is_sober`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sobriety {
    pub sober: bool,
    /// Each irreducible closed set with the point whose closure it is, if any.
    pub generic_points: Vec<(ElementSet, Option<usize>)>,
}

impl FinitePoset {
    /// Builds the reflexive-transitive closure of `pairs` (each `(a, b)`
    /// asserting `a ≤ b`) over the named elements.
    pub fn build<S: AsRef<str>>(names: &[S], pairs: &[(S, S)]) -> Result<Self, OrderError> {
        let mut index = HashMap::new();
        for (i, name) in names.iter().enumerate() {
            if index.insert(name.as_ref().to_string(), i).is_some() {
                return Err(OrderError::DuplicateName(name.as_ref().to_string()));
            }
        }
        let lookup = |s: &S| {
            index
                .get(s.as_ref())
                .copied()
                .ok_or_else(|| OrderError::UnknownName(s.as_ref().to_string()))
        };
        let mut edges = Vec::with_capacity(pairs.len());
        for (a, b) in pairs {
            edges.push((lookup(a)?, lookup(b)?));
        }
        Self::from_relation(names.iter().map(|s| s.as_ref().to_string()).collect(), &edges)
    }

    /// Same as [`build`](Self::build) with pairs given as indices.
    pub fn from_relation(names: Vec<String>, pairs: &[(usize, usize)]) -> Result<Self, OrderError> {
        let n = names.len();
        if n > MAX_ELEMENTS {
            return Err(OrderError::TooLarge {
                size: n,
                limit: MAX_ELEMENTS,
            });
        }
        let mut up: Vec<ElementSet> = (0..n).map(ElementSet::singleton).collect();
        for &(a, b) in pairs {
            if a >= n {
                return Err(OrderError::OutOfRange(a));
            }
            if b >= n {
                return Err(OrderError::OutOfRange(b));
            }
            up[a].insert(b);
        }
        // Warshall on bit rows.
        for k in 0..n {
            for i in 0..n {
                if up[i].contains(k) {
                    up[i] = up[i] | up[k];
                }
            }
        }
        for i in 0..n {
            for j in up[i].iter() {
                if j != i && up[j].contains(i) {
                    return Err(OrderError::Cycle(names[i].clone(), names[j].clone()));
                }
            }
        }
        let mut down = vec![ElementSet::EMPTY; n];
        for (i, u) in up.iter().enumerate() {
            for j in u.iter() {
                down[j].insert(i);
            }
        }
        Ok(FinitePoset { names, up, down })
    }

    pub fn antichain(n: usize) -> Self {
        Self::from_relation(default_names(n), &[]).expect("antichain is a poset")
    }

    pub fn chain(n: usize) -> Self {
        let pairs: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::from_relation(default_names(n), &pairs).expect("chain is a poset")
    }

    pub fn size(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, x: usize) -> &str {
        &self.names[x]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.up[x].contains(y)
    }

    pub fn lt(&self, x: usize, y: usize) -> bool {
        x != y && self.leq(x, y)
    }

    pub fn all(&self) -> ElementSet {
        ElementSet::full(self.size())
    }

    /// `↑x`
    pub fn up_of(&self, x: usize) -> ElementSet {
        self.up[x]
    }

    /// `↓x`
    pub fn down_of(&self, x: usize) -> ElementSet {
        self.down[x]
    }

    /// Cover pairs `(x, y)` with `x < y` and nothing strictly between.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for x in 0..self.size() {
            for y in self.up[x].iter() {
                if y == x {
                    continue;
                }
                let between = (self.up[x] & self.down[y]) - ElementSet::singleton(x) - ElementSet::singleton(y);
                if between.is_empty() {
                    out.push((x, y));
                }
            }
        }
        out
    }

    pub fn upward_closure(&self, s: ElementSet) -> ElementSet {
        s.iter().fold(ElementSet::EMPTY, |acc, x| acc | self.up[x])
    }

    pub fn downward_closure(&self, s: ElementSet) -> ElementSet {
        s.iter().fold(ElementSet::EMPTY, |acc, x| acc | self.down[x])
    }

    pub fn is_upward_closed(&self, s: ElementSet) -> bool {
        s.iter().all(|x| self.up[x].is_subset(s))
    }

    pub fn is_downward_closed(&self, s: ElementSet) -> bool {
        s.iter().all(|x| self.down[x].is_subset(s))
    }

    /// Checks that `s` is a subset of this poset and upward-closed.
    pub fn open(&self, s: ElementSet) -> Option<OpenSet> {
        (s.is_subset(self.all()) && self.is_upward_closed(s)).then_some(OpenSet(s))
    }

    /// `↑S` as an open set.
    pub fn up_open(&self, s: ElementSet) -> OpenSet {
        OpenSet(self.upward_closure(s))
    }

    pub fn whole(&self) -> OpenSet {
        OpenSet(self.all())
    }

    /// Every upward-closed subset, in increasing bit-mask order.
    ///
    /// Cost is `O(2^n · n)`.
    pub fn enumerate_opens(&self) -> Vec<OpenSet> {
        self.all()
            .subsets()
            .filter(|&s| self.is_upward_closed(s))
            .map(OpenSet)
            .collect()
    }

    /// Every downward-closed subset, in increasing bit-mask order.
    pub fn enumerate_closed(&self) -> Vec<ElementSet> {
        self.all().subsets().filter(|&s| self.is_downward_closed(s)).collect()
    }

    /// Largest open subset of `s`: `{x ∈ S | ↑x ⊆ S}`.
    pub fn interior(&self, s: ElementSet) -> OpenSet {
        OpenSet(s.iter().filter(|&x| self.up[x].is_subset(s)).collect())
    }

    pub fn minimal_elements(&self, s: ElementSet) -> ElementSet {
        s.iter()
            .filter(|&x| (self.down[x] & s) == ElementSet::singleton(x))
            .collect()
    }

    pub fn maximal_elements(&self, s: ElementSet) -> ElementSet {
        s.iter()
            .filter(|&x| (self.up[x] & s) == ElementSet::singleton(x))
            .collect()
    }

    pub fn greatest_element(&self, s: ElementSet) -> Option<usize> {
        s.iter().find(|&x| s.is_subset(self.down[x]))
    }

    /// Non-empty closed sets `C` such that `C ⊆ C₁ ∪ C₂` with `C₁, C₂`
    /// closed forces `C ⊆ C₁` or `C ⊆ C₂`.
    ///
    /// Decided exhaustively: for each closed `C₁ ⊊ C`, the smallest closed
    /// `C₂` covering the rest of `C` is `↓(C ∖ C₁)`, and `C` is reducible iff
    /// that is also a proper subset. Cost is `O(3^n)`.
    pub fn irreducible_closed_sets(&self) -> Vec<ElementSet> {
        self.enumerate_closed()
            .into_iter()
            .filter(|&c| !c.is_empty())
            .filter(|&c| {
                !c.subsets()
                    .any(|c1| c1 != c && self.is_downward_closed(c1) && self.downward_closure(c - c1) != c)
            })
            .collect()
    }

    /// A T0 space is sober when every irreducible closed set is `↓x` for a
    /// (necessarily unique) point `x`.
    pub fn is_sober(&self) -> Sobriety {
        let generic_points: Vec<_> = self
            .irreducible_closed_sets()
            .into_iter()
            .map(|c| (c, (0..self.size()).find(|&x| self.down[x] == c)))
            .collect();
        Sobriety {
            sober: generic_points.iter().all(|(_, x)| x.is_some()),
            generic_points,
        }
    }

    /// A finite set `E` with `x ∈ int(↑E) ⊆ ↑E ⊆ U`; the canonical choice is
    /// `min(U)`.
    pub fn finitary_basis_at(&self, x: usize, u: OpenSet) -> Result<ElementSet, OrderError> {
        if x >= self.size() {
            return Err(OrderError::OutOfRange(x));
        }
        if !u.contains(x) {
            return Err(OrderError::NotMember(self.names[x].clone()));
        }
        Ok(self.minimal_elements(u.members()))
    }

    /// A non-empty subset in which any two members have an upper bound inside
    /// the subset.
    pub fn is_directed(&self, d: ElementSet) -> bool {
        !d.is_empty()
            && d.iter()
                .all(|x| d.iter().all(|y| !(self.up[x] & self.up[y] & d).is_empty()))
    }

    /// The Scott condition taken literally: `s` is upward-closed and every
    /// directed `D` whose supremum lies in `s` meets `s`. Exponential; meant
    /// for small posets.
    pub fn is_scott_open_by_definition(&self, s: ElementSet) -> bool {
        if !self.is_upward_closed(s) {
            return false;
        }
        self.all().subsets().filter(|&d| self.is_directed(d)).all(|d| {
            let upper_bounds = d.iter().fold(self.all(), |acc, x| acc & self.up[x]);
            match self
                .minimal_elements(upper_bounds)
                .iter()
                .collect::<Vec<_>>()
                .as_slice()
            {
                [sup] if upper_bounds.is_subset(self.up[*sup]) => !s.contains(*sup) || !(d & s).is_empty(),
                _ => true,
            }
        })
    }

    /// The induced subposet on `keep`, plus the original index of each of its
    /// elements.
    pub fn restrict(&self, keep: ElementSet) -> (FinitePoset, Vec<usize>) {
        let embed: Vec<usize> = keep.iter().collect();
        let mut pos = vec![usize::MAX; self.size()];
        for (i, &x) in embed.iter().enumerate() {
            pos[x] = i;
        }
        let names = embed.iter().map(|&x| self.names[x].clone()).collect();
        let mut pairs = Vec::new();
        for (i, &x) in embed.iter().enumerate() {
            for y in (self.up[x] & keep).iter() {
                pairs.push((i, pos[y]));
            }
        }
        let sub = FinitePoset::from_relation(names, &pairs).expect("induced order is a partial order");
        (sub, embed)
    }

    /// Renders a set as `{a,b}` using element names.
    pub fn format_set(&self, s: ElementSet) -> String {
        let names: Vec<&str> = s.iter().map(|x| self.names[x].as_str()).collect();
        format!("{{{}}}", names.join(","))
    }

    /// Parses `{a,b}` (or a bare name) against element names.
    pub fn parse_set(&self, text: &str) -> Result<ElementSet, OrderError> {
        let inner = text.trim();
        let inner = inner
            .strip_prefix('{')
            .and_then(|t| t.strip_suffix('}'))
            .unwrap_or(inner);
        let mut s = ElementSet::EMPTY;
        for part in inner.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let x = self
                .index_of(part)
                .ok_or_else(|| OrderError::UnknownName(part.to_string()))?;
            s.insert(x);
        }
        Ok(s)
    }
}

impl fmt::Debug for FinitePoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let covers: Vec<String> = self
            .covers()
            .into_iter()
            .map(|(x, y)| format!("{}<{}", self.names[x], self.names[y]))
            .collect();
        f.debug_struct("FinitePoset")
            .field("elements", &self.names)
            .field("covers", &covers)
            .finish()
    }
}

pub fn default_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("e{i}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain_ab() -> FinitePoset {
        FinitePoset::build(&["a", "b"], &[("a", "b")]).unwrap()
    }

    fn antichain_ab() -> FinitePoset {
        FinitePoset::build::<&str>(&["a", "b"], &[]).unwrap()
    }

    fn set(xs: &[usize]) -> ElementSet {
        xs.iter().copied().collect()
    }

    #[test]
    fn build_closes_reflexively_and_transitively() {
        let p = FinitePoset::build(&["a"], &[]).unwrap();
        assert!(p.leq(0, 0));
        let c = chain_ab();
        assert!(c.leq(0, 1) && !c.leq(1, 0));
        let three = FinitePoset::build(&["a", "b", "c"], &[("a", "b"), ("b", "c")]).unwrap();
        assert!(three.leq(0, 2));
    }

    #[test]
    fn build_rejects_cycles_and_duplicates() {
        let err = FinitePoset::build(&["a", "b"], &[("a", "b"), ("b", "a")]).unwrap_err();
        assert!(matches!(err, OrderError::Cycle(..)));
        let err = FinitePoset::build::<&str>(&["a", "a"], &[]).unwrap_err();
        assert_eq!(err, OrderError::DuplicateName("a".into()));
        let err = FinitePoset::build(&["a"], &[("a", "z")]).unwrap_err();
        assert_eq!(err, OrderError::UnknownName("z".into()));
    }

    #[test]
    fn closures() {
        let c = chain_ab();
        assert_eq!(c.upward_closure(set(&[0])), set(&[0, 1]));
        assert_eq!(c.upward_closure(set(&[1])), set(&[1]));
        assert_eq!(antichain_ab().upward_closure(set(&[0])), set(&[0]));
        assert_eq!(c.downward_closure(set(&[1])), set(&[0, 1]));
        assert_eq!(c.downward_closure(set(&[0])), set(&[0]));
        assert_eq!(c.downward_closure(ElementSet::EMPTY), ElementSet::EMPTY);
    }

    #[test]
    fn opens_of_small_posets() {
        let one = FinitePoset::chain(1);
        let opens: Vec<_> = one.enumerate_opens().into_iter().map(OpenSet::members).collect();
        assert_eq!(opens, vec![set(&[]), set(&[0])]);
        let opens: Vec<_> = chain_ab().enumerate_opens().into_iter().map(OpenSet::members).collect();
        assert_eq!(opens, vec![set(&[]), set(&[1]), set(&[0, 1])]);
        assert_eq!(antichain_ab().enumerate_opens().len(), 4);
    }

    #[test]
    fn interiors() {
        let c = chain_ab();
        assert!(c.interior(set(&[0])).is_empty());
        assert_eq!(c.interior(set(&[0, 1])).members(), set(&[0, 1]));
        let c3 = FinitePoset::chain(3);
        assert!(c3.interior(set(&[0, 1])).is_empty());
        assert_eq!(c3.interior(set(&[1, 2])).members(), set(&[1, 2]));
    }

    #[test]
    fn minimal_elements_examples() {
        assert_eq!(chain_ab().minimal_elements(set(&[0, 1])), set(&[0]));
        assert_eq!(antichain_ab().minimal_elements(set(&[0, 1])), set(&[0, 1]));
        assert_eq!(chain_ab().minimal_elements(ElementSet::EMPTY), ElementSet::EMPTY);
    }

    #[test]
    fn irreducible_closed_sets_examples() {
        assert_eq!(chain_ab().irreducible_closed_sets(), vec![set(&[0]), set(&[0, 1])]);
        assert_eq!(antichain_ab().irreducible_closed_sets(), vec![set(&[0]), set(&[1])]);
        assert_eq!(FinitePoset::chain(1).irreducible_closed_sets(), vec![set(&[0])]);
    }

    #[test]
    fn sobriety_examples() {
        let s = chain_ab().is_sober();
        assert!(s.sober);
        assert_eq!(s.generic_points, vec![(set(&[0]), Some(0)), (set(&[0, 1]), Some(1))]);
        assert!(antichain_ab().is_sober().sober);
    }

    #[test]
    fn finitary_basis_examples() {
        let c = chain_ab();
        assert_eq!(c.finitary_basis_at(0, c.whole()).unwrap(), set(&[0]));
        let a = antichain_ab();
        assert_eq!(a.finitary_basis_at(0, a.whole()).unwrap(), set(&[0, 1]));
        let b_only = c.open(set(&[1])).unwrap();
        assert_eq!(c.finitary_basis_at(1, b_only).unwrap(), set(&[1]));
        assert!(matches!(c.finitary_basis_at(0, b_only), Err(OrderError::NotMember(_))));
    }

    #[test]
    fn scott_condition_matches_upward_closure_on_small_posets() {
        let diamond =
            FinitePoset::build(&["b", "l", "r", "t"], &[("b", "l"), ("b", "r"), ("l", "t"), ("r", "t")]).unwrap();
        for p in [chain_ab(), antichain_ab(), FinitePoset::chain(4), diamond] {
            for s in p.all().subsets() {
                assert_eq!(p.is_scott_open_by_definition(s), p.is_upward_closed(s));
            }
        }
    }

    #[test]
    fn restrict_keeps_induced_order() {
        let c3 = FinitePoset::chain(3);
        let (sub, embed) = c3.restrict(set(&[0, 2]));
        assert_eq!(embed, vec![0, 2]);
        assert!(sub.leq(0, 1));
        assert_eq!(sub.name(1), "e2");
    }

    #[test]
    fn set_text_round_trip() {
        let a = antichain_ab();
        assert_eq!(a.format_set(set(&[0, 1])), "{a,b}");
        assert_eq!(a.parse_set("{a, b}").unwrap(), set(&[0, 1]));
        assert_eq!(a.parse_set("{}").unwrap(), ElementSet::EMPTY);
        assert!(a.parse_set("{c}").is_err());
    }
}
