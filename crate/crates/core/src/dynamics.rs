//! Asynchronous Boolean dynamics and the asynchronous iteration graph.
//!
//! `F_f(i, x)` replaces component `i` of `x` by `f_i(x)` and leaves the
//! others alone. Iterating it along a strategy `s_0, s_1, ...` gives the
//! configuration component of `G_f^q(s, x)`.

use crate::bitcore::Configuration;
use crate::error::{Error, Result};
use crate::MAX_ANALYSIS_BITS;

/// A Boolean map `f: B^n -> B^n` evaluated one component at a time.
pub trait BooleanMap {
    /// The size `n` the map is instantiated at.
    fn dimension(&self) -> usize;

    /// `f_k(x)` for `1 <= k <= n`. Callers guarantee the bounds.
    fn component(&self, k: usize, x: &Configuration) -> bool;

    /// `deci(F_f(k, undeci(x)))`, for maps small enough to index by `u64`.
    fn step_index(&self, k: usize, x: u64) -> u64 {
        let config = Configuration::undeci(x, self.dimension())
            .expect("state index within the map's dimension");
        let bit = self.component(k, &config) as u64;
        (x & !(1u64 << (k - 1))) | (bit << (k - 1))
    }
}

impl<T: BooleanMap + ?Sized> BooleanMap for &T {
    fn dimension(&self) -> usize {
        (**self).dimension()
    }

    fn component(&self, k: usize, x: &Configuration) -> bool {
        (**self).component(k, x)
    }

    fn step_index(&self, k: usize, x: u64) -> u64 {
        (**self).step_index(k, x)
    }
}

fn check_shape<F: BooleanMap + ?Sized>(f: &F, x: &Configuration) -> Result<()> {
    if x.len() != f.dimension() {
        return Err(Error::LengthMismatch { expected: f.dimension(), actual: x.len() });
    }
    Ok(())
}

/// `F_f(i, x)`.
pub fn component_update<F: BooleanMap + ?Sized>(
    f: &F,
    i: usize,
    x: &Configuration,
) -> Result<Configuration> {
    check_shape(f, x)?;
    if i == 0 || i > f.dimension() {
        return Err(Error::IndexOutOfRange { index: i, len: f.dimension() });
    }
    let mut out = x.clone();
    out.set_unchecked(i, f.component(i, x));
    Ok(out)
}

/// Runs `q` asynchronous steps from `x0`, taking one strategy term per step.
///
/// The strategy is consumed lazily, so infinite iterators are the normal
/// input. A term outside `1..=n` is a contract violation.
pub fn iterate<F, S>(f: &F, strategy: S, x0: &Configuration, q: u64) -> Result<Configuration>
where
    F: BooleanMap + ?Sized,
    S: IntoIterator<Item = usize>,
{
    check_shape(f, x0)?;
    let n = f.dimension();
    let mut x = x0.clone();
    let mut terms = strategy.into_iter();
    for t in 0..q {
        let i = terms.next().ok_or(Error::StrategyExhausted(t))?;
        if i == 0 || i > n {
            return Err(Error::IndexOutOfRange { index: i, len: n });
        }
        let bit = f.component(i, &x);
        x.set_unchecked(i, bit);
    }
    Ok(x)
}

/// One arc `source -> F_f(direction, source)` of the iteration graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Arc {
    pub source: u32,
    pub direction: usize,
    pub target: u32,
}

/// `Gamma(f)`: vertices are the `2^n` configurations (as decimals), with one
/// arc per `(x, k)` pair. Parallel arcs produced by different directions are
/// kept, so the arc list is a multiset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IterationGraph {
    n: usize,
    // targets[x * n + (k - 1)] = deci(F_f(k, x))
    targets: Vec<u32>,
}

impl IterationGraph {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertex_count(&self) -> usize {
        1 << self.n
    }

    pub fn arc_count(&self) -> usize {
        self.targets.len()
    }

    /// Targets of the `n` arcs leaving `v`, ordered by direction.
    pub fn successors(&self, v: u32) -> &[u32] {
        let start = v as usize * self.n;
        &self.targets[start..start + self.n]
    }

    pub fn arcs(&self) -> impl Iterator<Item = Arc> + '_ {
        let n = self.n;
        self.targets.iter().enumerate().map(move |(pos, &target)| Arc {
            source: (pos / n) as u32,
            direction: pos % n + 1,
            target,
        })
    }

    /// Strongly connected components, Tarjan's algorithm with an explicit
    /// stack. Components come out in reverse topological order.
    pub fn strongly_connected_components(&self) -> Vec<Vec<u32>> {
        const UNVISITED: u32 = u32::MAX;
        let count = self.vertex_count();
        let mut index = vec![UNVISITED; count];
        let mut low = vec![0u32; count];
        let mut on_stack = vec![false; count];
        let mut stack: Vec<u32> = Vec::new();
        // (vertex, position of the next successor to explore)
        let mut frames: Vec<(u32, usize)> = Vec::new();
        let mut next_index = 0u32;
        let mut components = Vec::new();

        for root in 0..count as u32 {
            if index[root as usize] != UNVISITED {
                continue;
            }
            index[root as usize] = next_index;
            low[root as usize] = next_index;
            next_index += 1;
            stack.push(root);
            on_stack[root as usize] = true;
            frames.push((root, 0));

            while let Some(frame) = frames.last_mut() {
                let v = frame.0;
                let successors = self.successors(v);
                if frame.1 < successors.len() {
                    let w = successors[frame.1];
                    frame.1 += 1;
                    if index[w as usize] == UNVISITED {
                        index[w as usize] = next_index;
                        low[w as usize] = next_index;
                        next_index += 1;
                        stack.push(w);
                        on_stack[w as usize] = true;
                        frames.push((w, 0));
                    } else if on_stack[w as usize] {
                        low[v as usize] = low[v as usize].min(index[w as usize]);
                    }
                    continue;
                }

                frames.pop();
                if let Some(&(parent, _)) = frames.last() {
                    low[parent as usize] = low[parent as usize].min(low[v as usize]);
                }
                if low[v as usize] == index[v as usize] {
                    let mut component = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack holds the component root");
                        on_stack[w as usize] = false;
                        component.push(w);
                        if w == v {
                            break;
                        }
                    }
                    component.sort_unstable();
                    components.push(component);
                }
            }
        }
        components
    }

    pub fn is_strongly_connected(&self) -> bool {
        self.strongly_connected_components().len() == 1
    }
}

/// Builds `Gamma(f)` for `n <= 12`.
pub fn build_iteration_graph<F: BooleanMap + ?Sized>(f: &F) -> Result<IterationGraph> {
    let n = f.dimension();
    if n == 0 {
        return Err(Error::EmptyConfiguration);
    }
    if n > MAX_ANALYSIS_BITS {
        return Err(Error::Capacity { n, limit: MAX_ANALYSIS_BITS });
    }
    let mut targets = Vec::with_capacity(n << n);
    for x in 0..(1u64 << n) {
        for k in 1..=n {
            targets.push(f.step_index(k, x) as u32);
        }
    }
    Ok(IterationGraph { n, targets })
}

/// `true` iff every vertex of the graph reaches every other one.
pub fn is_strongly_connected(g: &IterationGraph) -> bool {
    g.is_strongly_connected()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modes::{identity_mode, negation_mode, ModeInstance};
    use proptest::prelude::*;

    fn cfg(bits: &[u8]) -> Configuration {
        Configuration::from_bits(bits).unwrap()
    }

    // Reachability by repeated boolean closure, independent of Tarjan.
    fn closure_strongly_connected(g: &IterationGraph) -> bool {
        let count = g.vertex_count();
        let mut reach = vec![vec![false; count]; count];
        for (v, row) in reach.iter_mut().enumerate() {
            row[v] = true;
            for &w in g.successors(v as u32) {
                row[w as usize] = true;
            }
        }
        for k in 0..count {
            for i in 0..count {
                if reach[i][k] {
                    let via = reach[k].clone();
                    for (r, v) in reach[i].iter_mut().zip(via) {
                        *r |= v;
                    }
                }
            }
        }
        reach.iter().all(|row| row.iter().all(|&r| r))
    }

    #[test]
    fn components_match_kosaraju() {
        let mut rng = crate::strategy::Xorshift64Star::new(31);
        for n in 1..=5 {
            for _ in 0..40 {
                let table = (0..1u32 << n).map(|_| rng.next_below(1 << n) as u32).collect();
                let g = build_iteration_graph(&ModeInstance::from_table(n, table).unwrap()).unwrap();
                let edges: Vec<(u32, u32)> = g.arcs().map(|a| (a.source, a.target)).collect();
                let mut pg = petgraph::graph::DiGraph::<(), ()>::from_edges(&edges);
                while pg.node_count() < g.vertex_count() {
                    pg.add_node(());
                }
                let normalize = |mut comps: Vec<Vec<u32>>| {
                    for c in &mut comps {
                        c.sort_unstable();
                    }
                    comps.sort();
                    comps
                };
                let expected: Vec<Vec<u32>> = petgraph::algo::kosaraju_scc(&pg)
                    .into_iter()
                    .map(|c| c.into_iter().map(|v| v.index() as u32).collect())
                    .collect();
                assert_eq!(normalize(g.strongly_connected_components()), normalize(expected));
            }
        }
    }

    #[test]
    fn component_update_examples() {
        let neg = negation_mode(2).unwrap();
        assert_eq!(component_update(&neg, 1, &cfg(&[0, 0])).unwrap(), cfg(&[1, 0]));
        assert_eq!(component_update(&neg, 2, &cfg(&[1, 0])).unwrap(), cfg(&[1, 1]));
        let id = identity_mode(3).unwrap();
        for i in 1..=3 {
            assert_eq!(component_update(&id, i, &cfg(&[1, 0, 1])).unwrap(), cfg(&[1, 0, 1]));
        }
    }

    #[test]
    fn component_update_errors() {
        let neg = negation_mode(2).unwrap();
        assert!(matches!(
            component_update(&neg, 3, &cfg(&[0, 0])),
            Err(Error::IndexOutOfRange { index: 3, len: 2 })
        ));
        assert!(matches!(
            component_update(&neg, 1, &cfg(&[0, 0, 0])),
            Err(Error::LengthMismatch { expected: 2, actual: 3 })
        ));
    }

    #[test]
    fn iterate_examples() {
        let neg = negation_mode(2).unwrap();
        let x0 = cfg(&[0, 1]);
        assert_eq!(iterate(&neg, [2usize, 2].into_iter().cycle(), &x0, 0).unwrap(), x0);
        let alternating = [1usize, 2].into_iter().cycle();
        assert_eq!(iterate(&neg, alternating, &cfg(&[0, 0]), 2).unwrap(), cfg(&[1, 1]));
        let ones = std::iter::repeat(1usize);
        assert_eq!(iterate(&neg, ones, &cfg(&[0, 0]), 2).unwrap(), cfg(&[0, 0]));
    }

    #[test]
    fn iterate_rejects_bad_strategy() {
        let neg = negation_mode(2).unwrap();
        let err = iterate(&neg, [1usize, 3], &cfg(&[0, 0]), 2).unwrap_err();
        assert!(matches!(err, Error::IndexOutOfRange { index: 3, len: 2 }));
        let err = iterate(&neg, [1usize], &cfg(&[0, 0]), 2).unwrap_err();
        assert!(matches!(err, Error::StrategyExhausted(1)));
    }

    #[test]
    fn graph_examples() {
        let g = build_iteration_graph(&negation_mode(1).unwrap()).unwrap();
        let arcs: Vec<_> = g.arcs().map(|a| (a.source, a.direction, a.target)).collect();
        assert_eq!(arcs, vec![(0, 1, 1), (1, 1, 0)]);

        let g = build_iteration_graph(&identity_mode(2).unwrap()).unwrap();
        assert_eq!(g.arc_count(), 8);
        assert!(g.arcs().all(|a| a.source == a.target));

        let g = build_iteration_graph(&negation_mode(2).unwrap()).unwrap();
        assert_eq!(g.arc_count(), 8);
        assert!(g.arcs().all(|a| (a.source ^ a.target).count_ones() == 1));
    }

    #[test]
    fn graph_capacity() {
        let big = ModeInstance::from_table(13, (0..1u32 << 13).collect()).unwrap();
        assert!(matches!(build_iteration_graph(&big), Err(Error::Capacity { n: 13, limit: 12 })));
    }

    #[test]
    fn connectivity_examples() {
        let g = build_iteration_graph(&negation_mode(2).unwrap()).unwrap();
        assert!(g.is_strongly_connected());
        assert!(closure_strongly_connected(&g));
        let g = build_iteration_graph(&identity_mode(1).unwrap()).unwrap();
        assert!(!g.is_strongly_connected());
        assert_eq!(g.strongly_connected_components().len(), 2);
        let g = build_iteration_graph(&negation_mode(1).unwrap()).unwrap();
        assert!(is_strongly_connected(&g));
    }

    #[test]
    fn tarjan_handles_twelve_bits_without_recursion() {
        let g = build_iteration_graph(&negation_mode(12).unwrap()).unwrap();
        assert_eq!(g.arc_count(), 12 * 4096);
        assert!(g.is_strongly_connected());
        let g = build_iteration_graph(&identity_mode(12).unwrap()).unwrap();
        assert_eq!(g.strongly_connected_components().len(), 4096);
    }

    #[test]
    fn component_update_local_exhaustive_small() {
        // every map on B^2 and a sample of tables on B^3, B^4
        for code in 0..256u32 {
            let table: Vec<u32> = (0..4).map(|j| (code >> (2 * j)) & 3).collect();
            let f = ModeInstance::from_table(2, table).unwrap();
            for x in 0..4 {
                let x = Configuration::undeci(x, 2).unwrap();
                for i in 1..=2 {
                    let y = component_update(&f, i, &x).unwrap();
                    for j in (1..=2).filter(|&j| j != i) {
                        assert_eq!(y.get(j).unwrap(), x.get(j).unwrap());
                    }
                }
            }
        }
    }

    fn table_strategy(n: usize) -> impl Strategy<Value = ModeInstance> {
        prop::collection::vec(0..(1u32 << n), 1 << n)
            .prop_map(move |t| ModeInstance::from_table(n, t).unwrap())
    }

    proptest! {
        #[test]
        fn component_update_touches_one_bit(f in (3usize..=8).prop_flat_map(table_strategy), x in any::<u64>(), i in any::<prop::sample::Index>()) {
            let n = f.dimension();
            let x = Configuration::undeci(x & ((1 << n) - 1), n).unwrap();
            let i = i.index(n) + 1;
            let y = component_update(&f, i, &x).unwrap();
            prop_assert!(x.hamming_distance(&y) <= 1);
            for j in (1..=n).filter(|&j| j != i) {
                prop_assert_eq!(y.get(j).unwrap(), x.get(j).unwrap());
            }
        }

        #[test]
        fn iterate_semigroup(f in (1usize..=6).prop_flat_map(table_strategy), x in any::<u64>(), seq in prop::collection::vec(any::<prop::sample::Index>(), 0..40), split in any::<prop::sample::Index>()) {
            let n = f.dimension();
            let x0 = Configuration::undeci(x & ((1 << n) - 1), n).unwrap();
            let s: Vec<usize> = seq.iter().map(|i| i.index(n) + 1).collect();
            let a = if s.is_empty() { 0 } else { split.index(s.len() + 1) };
            let b = s.len() - a;
            let whole = iterate(&f, s.iter().copied(), &x0, s.len() as u64).unwrap();
            let mid = iterate(&f, s.iter().copied(), &x0, a as u64).unwrap();
            let rest = iterate(&f, s[a..].iter().copied(), &mid, b as u64).unwrap();
            prop_assert_eq!(whole, rest);
        }

        #[test]
        fn graph_arc_count_and_targets(f in (1usize..=5).prop_flat_map(table_strategy)) {
            let n = f.dimension();
            let g = build_iteration_graph(&f).unwrap();
            prop_assert_eq!(g.arc_count(), n << n);
            for arc in g.arcs() {
                let x = Configuration::undeci(arc.source as u64, n).unwrap();
                let y = component_update(&f, arc.direction, &x).unwrap();
                prop_assert_eq!(y.deci(), arc.target as u64);
                prop_assert!((arc.source ^ arc.target) & !(1 << (arc.direction - 1)) == 0);
            }
        }

        #[test]
        fn tarjan_agrees_with_closure(f in (1usize..=4).prop_flat_map(table_strategy)) {
            let g = build_iteration_graph(&f).unwrap();
            prop_assert_eq!(g.is_strongly_connected(), closure_strongly_connected(&g));
        }
    }
}
