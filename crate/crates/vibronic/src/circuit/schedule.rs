//! Monomial ordering with product caching.
//!
//! Higher-degree monomials are arranged in a prefix tree: the parent of a
//! degree-L monomial strips one unit of exponent from its highest mode, so a
//! child is always its parent times one mode register. A depth-first walk of
//! that tree computes each degree-L product from the cached degree-(L−1)
//! prefix with a single multiplication, keeping at most one live cache
//! register per degree and releasing them in LIFO order.
//!
//! With caching disabled every monomial rebuilds its whole product chain from
//! scratch and uncomputes it immediately, which is what the cached schedule's
//! savings are measured against.

use std::collections::{BTreeMap, BTreeSet};

use crate::model::MultiIndex;

/// Where a monomial's integer value lives when its phase is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueSource {
    /// Constant term: no value register, the coefficient is added directly.
    Unit,
    /// Degree-1 term: the mode register itself.
    Mode(usize),
    /// Cached product of the given degree.
    Cache(u32),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScheduleOp {
    /// Apply the phase of one term; its value sits in `source`.
    Emit { term: MultiIndex, source: ValueSource },
    /// Multiply `parent` by mode `factor` into the degree-`degree` cache.
    Compute { degree: u32, parent: ValueSource, factor: usize },
    /// Uncompute the degree-`degree` cache (inverse of its `Compute`).
    Release { degree: u32 },
}

fn source_of(index: &MultiIndex) -> ValueSource {
    match index.degree() {
        0 => ValueSource::Unit,
        1 => ValueSource::Mode(index.exponents()[0].0),
        d => ValueSource::Cache(d),
    }
}

/// Order the terms for exponentiation.
///
/// Constants first, then degree-1 terms, then a depth-first descent through
/// the prefix tree of the higher-degree terms. Every term is emitted exactly
/// once; intermediate prefixes that are not themselves terms are computed but
/// not emitted.
pub fn schedule_monomials(terms: &BTreeSet<MultiIndex>, caching: bool) -> Vec<ScheduleOp> {
    let mut ops = Vec::new();

    for term in terms.iter().filter(|t| t.degree() == 0) {
        ops.push(ScheduleOp::Emit { term: term.clone(), source: ValueSource::Unit });
    }
    for term in terms.iter().filter(|t| t.degree() == 1) {
        ops.push(ScheduleOp::Emit { term: term.clone(), source: source_of(term) });
    }

    let high: Vec<&MultiIndex> = terms.iter().filter(|t| t.degree() >= 2).collect();
    if high.is_empty() {
        return ops;
    }

    if !caching {
        for term in high {
            // Build the product chain for this term alone.
            let mut chain = vec![term.clone()];
            let mut cur = term.clone();
            while let Some((parent, _)) = cur.parent_and_factor() {
                if parent.degree() >= 2 {
                    chain.push(parent.clone());
                }
                cur = parent;
            }
            chain.reverse();
            for node in &chain {
                let (parent, factor) = node.parent_and_factor().unwrap();
                ops.push(ScheduleOp::Compute {
                    degree: node.degree(),
                    parent: source_of(&parent),
                    factor,
                });
            }
            ops.push(ScheduleOp::Emit { term: term.clone(), source: ValueSource::Cache(term.degree()) });
            for node in chain.iter().rev() {
                ops.push(ScheduleOp::Release { degree: node.degree() });
            }
        }
        return ops;
    }

    // Prefix closure: every ancestor of a high-degree term is a node.
    let mut nodes: BTreeSet<MultiIndex> = BTreeSet::new();
    for term in &high {
        let mut cur = (*term).clone();
        loop {
            nodes.insert(cur.clone());
            match cur.parent_and_factor() {
                Some((parent, _)) => cur = parent,
                None => break,
            }
        }
    }
    // Children keyed by parent, in monomial order.
    let mut children: BTreeMap<MultiIndex, Vec<MultiIndex>> = BTreeMap::new();
    let mut roots: BTreeSet<MultiIndex> = BTreeSet::new();
    for node in &nodes {
        match node.parent_and_factor() {
            Some((parent, _)) => children.entry(parent).or_default().push(node.clone()),
            None => {
                roots.insert(node.clone());
            }
        }
    }

    fn dfs(
        node: &MultiIndex,
        terms: &BTreeSet<MultiIndex>,
        children: &BTreeMap<MultiIndex, Vec<MultiIndex>>,
        ops: &mut Vec<ScheduleOp>,
    ) {
        if let Some(kids) = children.get(node) {
            for kid in kids {
                let (parent, factor) = kid.parent_and_factor().unwrap();
                ops.push(ScheduleOp::Compute {
                    degree: kid.degree(),
                    parent: source_of(&parent),
                    factor,
                });
                if terms.contains(kid) {
                    ops.push(ScheduleOp::Emit { term: kid.clone(), source: ValueSource::Cache(kid.degree()) });
                }
                dfs(kid, terms, children, ops);
                ops.push(ScheduleOp::Release { degree: kid.degree() });
            }
        }
    }

    for root in &roots {
        dfs(root, terms, &children, &mut ops);
    }
    ops
}

/// Number of multiplications a schedule performs (uncomputations excluded).
pub fn compute_count(ops: &[ScheduleOp]) -> usize {
    ops.iter().filter(|op| matches!(op, ScheduleOp::Compute { .. })).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(pairs: &[(usize, u32)]) -> MultiIndex {
        MultiIndex::new(pairs.to_vec()).unwrap()
    }

    fn set(terms: &[MultiIndex]) -> BTreeSet<MultiIndex> {
        terms.iter().cloned().collect()
    }

    /// Replay a schedule and check the register discipline: a compute's
    /// parent is available, one live cache per degree, LIFO release.
    fn check_discipline(ops: &[ScheduleOp], terms: &BTreeSet<MultiIndex>) {
        let mut live: Vec<u32> = Vec::new();
        let mut emitted: Vec<MultiIndex> = Vec::new();
        for op in ops {
            match op {
                ScheduleOp::Compute { degree, parent, .. } => {
                    match parent {
                        ValueSource::Cache(l) => {
                            assert!(live.contains(l), "parent cache {l} not live");
                        }
                        ValueSource::Mode(_) => assert_eq!(*degree, 2),
                        ValueSource::Unit => panic!("cannot multiply from the unit source"),
                    }
                    assert!(!live.contains(degree), "cache {degree} already live");
                    live.push(*degree);
                }
                ScheduleOp::Release { degree } => {
                    assert_eq!(live.pop(), Some(*degree), "release out of LIFO order");
                }
                ScheduleOp::Emit { term, source } => {
                    match source {
                        ValueSource::Cache(l) => assert!(live.contains(l)),
                        ValueSource::Mode(r) => {
                            assert_eq!(term.degree(), 1);
                            assert_eq!(term.exponents()[0].0, *r);
                        }
                        ValueSource::Unit => assert_eq!(term.degree(), 0),
                    }
                    emitted.push(term.clone());
                }
            }
        }
        assert!(live.is_empty(), "caches left live: {live:?}");
        let emitted_set: BTreeSet<_> = emitted.iter().cloned().collect();
        assert_eq!(emitted.len(), terms.len(), "terms emitted more than once");
        assert_eq!(&emitted_set, terms);
    }

    #[test]
    fn chain_example_order() {
        let q0 = mi(&[(0, 1)]);
        let q1 = mi(&[(1, 1)]);
        let q01 = mi(&[(0, 1), (1, 1)]);
        let q012 = mi(&[(0, 1), (1, 1), (2, 1)]);
        let terms = set(&[q0.clone(), q1.clone(), q01.clone(), q012.clone()]);
        let ops = schedule_monomials(&terms, true);
        let expected = vec![
            ScheduleOp::Emit { term: q0, source: ValueSource::Mode(0) },
            ScheduleOp::Emit { term: q1, source: ValueSource::Mode(1) },
            ScheduleOp::Compute { degree: 2, parent: ValueSource::Mode(0), factor: 1 },
            ScheduleOp::Emit { term: q01, source: ValueSource::Cache(2) },
            ScheduleOp::Compute { degree: 3, parent: ValueSource::Cache(2), factor: 2 },
            ScheduleOp::Emit { term: q012, source: ValueSource::Cache(3) },
            ScheduleOp::Release { degree: 3 },
            ScheduleOp::Release { degree: 2 },
        ];
        assert_eq!(ops, expected);
        check_discipline(&ops, &terms);
    }

    #[test]
    fn all_linear_has_no_cache_directives() {
        let terms = set(&[mi(&[(0, 1)]), mi(&[(1, 1)]), mi(&[(2, 1)])]);
        let ops = schedule_monomials(&terms, true);
        assert_eq!(ops.len(), 3);
        assert!(ops.iter().all(|o| matches!(o, ScheduleOp::Emit { .. })));
    }

    #[test]
    fn square_prefix_is_reused() {
        // Q0² and Q0²Q1 share the Q0² product under caching.
        let terms = set(&[mi(&[(0, 2)]), mi(&[(0, 2), (1, 1)])]);
        let cached = schedule_monomials(&terms, true);
        let uncached = schedule_monomials(&terms, false);
        check_discipline(&cached, &terms);
        check_discipline(&uncached, &terms);
        assert_eq!(compute_count(&cached), 2);
        assert_eq!(compute_count(&uncached), 3);
    }

    #[test]
    fn intermediate_prefixes_are_computed_but_not_emitted() {
        // Q0Q1Q2 alone still routes through the un-emitted Q0Q1 prefix.
        let terms = set(&[mi(&[(0, 1), (1, 1), (2, 1)])]);
        let ops = schedule_monomials(&terms, true);
        check_discipline(&ops, &terms);
        assert_eq!(compute_count(&ops), 2);
        assert_eq!(
            ops.iter().filter(|o| matches!(o, ScheduleOp::Emit { .. })).count(),
            1
        );
    }

    #[test]
    fn constants_come_first() {
        let terms = set(&[MultiIndex::constant(), mi(&[(0, 1)]), mi(&[(0, 2)])]);
        let ops = schedule_monomials(&terms, true);
        assert!(matches!(&ops[0], ScheduleOp::Emit { term, .. } if term.is_constant()));
        check_discipline(&ops, &terms);
    }
}
