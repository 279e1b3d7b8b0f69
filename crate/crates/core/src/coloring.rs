//! Equitable colorings of the review graph of an assignment.
//!
//! The coloring routine follows the Kierstead–Kostochka–Mydlarz–Szemerédi
//! scheme: edges are inserted one at a time into an equitable coloring, a
//! conflict is repaired by moving one endpoint, and the resulting nearly
//! equitable coloring is rebalanced by moving witnesses along paths in the
//! auxiliary digraph of classes.

use std::collections::{BTreeSet, VecDeque};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::assignment::Assignment;
use crate::error::{Error, Result};
use crate::instance::Instance;

/// Directed graph on agents with an edge `(i, j)` for each assigned pair
/// `(agent i, paper j)` of a one-to-one instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssignmentDigraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl AssignmentDigraph {
    pub fn new(n: usize, mut edges: Vec<(usize, usize)>) -> Result<Self> {
        for &(u, v) in &edges {
            if u >= n || v >= n {
                return Err(Error::InvalidInstance(format!("edge ({u}, {v}) outside {n} vertices")));
            }
            if u == v {
                return Err(Error::InvalidInstance(format!("self-loop at vertex {u}")));
            }
        }
        edges.sort_unstable();
        Ok(AssignmentDigraph { n, edges })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for &(u, _) in &self.edges {
            d[u] += 1;
        }
        d
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for &(_, v) in &self.edges {
            d[v] += 1;
        }
        d
    }

    /// Largest in-degree plus out-degree.
    pub fn max_total_degree(&self) -> usize {
        let (o, i) = (self.out_degrees(), self.in_degrees());
        (0..self.n).map(|v| o[v] + i[v]).max().unwrap_or(0)
    }

    /// Neighbour lists of the underlying simple undirected graph, sorted.
    pub fn undirected_neighbors(&self) -> Vec<Vec<usize>> {
        let mut sets = vec![BTreeSet::new(); self.n];
        for &(u, v) in &self.edges {
            sets[u].insert(v);
            sets[v].insert(u);
        }
        sets.into_iter().map(|s| s.into_iter().collect()).collect()
    }

    /// Maximum degree of the underlying simple undirected graph.
    pub fn max_degree(&self) -> usize {
        self.undirected_neighbors().iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// Review graph of `assignment`. One-to-one instances only.
pub fn build_digraph(instance: &Instance, assignment: &Assignment) -> Result<AssignmentDigraph> {
    if !instance.is_one_to_one() {
        return Err(Error::Precondition("the review graph is defined for one-to-one instances".into()));
    }
    AssignmentDigraph::new(instance.n_agents(), assignment.pairs().to_vec())
}

/// Color of every vertex, in `0..r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    r: usize,
    colors: Vec<usize>,
}

impl Coloring {
    pub fn new(r: usize, colors: Vec<usize>) -> Self {
        Coloring { r, colors }
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn colors(&self) -> &[usize] {
        &self.colors
    }

    pub fn color(&self, v: usize) -> usize {
        self.colors[v]
    }

    /// Members of each class, ascending.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.r];
        for (v, &c) in self.colors.iter().enumerate() {
            if c < self.r {
                out[c].push(v);
            }
        }
        out
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        self.classes().iter().map(Vec::len).collect()
    }
}

/// A defect found by [`verify_coloring`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ColoringViolation {
    WrongLength { expected: usize, found: usize },
    ColorOutOfRange { vertex: usize, color: usize },
    Monochromatic { u: usize, v: usize, color: usize },
    Unbalanced { sizes: Vec<usize> },
}

/// Lists every properness and equitability defect of `coloring`.
pub fn verify_coloring(graph: &AssignmentDigraph, coloring: &Coloring) -> Vec<ColoringViolation> {
    let mut out = Vec::new();
    if coloring.colors.len() != graph.n {
        out.push(ColoringViolation::WrongLength {
            expected: graph.n,
            found: coloring.colors.len(),
        });
        return out;
    }
    for (v, &c) in coloring.colors.iter().enumerate() {
        if c >= coloring.r {
            out.push(ColoringViolation::ColorOutOfRange { vertex: v, color: c });
        }
    }
    for &(u, v) in &graph.edges {
        if coloring.colors[u] == coloring.colors[v] {
            out.push(ColoringViolation::Monochromatic {
                u,
                v,
                color: coloring.colors[u],
            });
        }
    }
    let sizes = coloring.class_sizes();
    let lo = sizes.iter().min().copied().unwrap_or(0);
    let hi = sizes.iter().max().copied().unwrap_or(0);
    if hi > lo + 1 {
        out.push(ColoringViolation::Unbalanced { sizes });
    }
    out
}

/// Proper coloring with exactly `r` classes whose sizes differ by at most one.
/// Requires `r` greater than the maximum degree of the underlying graph.
pub fn equitable_color(graph: &AssignmentDigraph, r: usize) -> Result<Coloring> {
    let adj = graph.undirected_neighbors();
    let delta = adj.iter().map(Vec::len).max().unwrap_or(0);
    if r == 0 || r <= delta {
        return Err(Error::Precondition(format!(
            "{r} colors cannot be guaranteed for maximum degree {delta}; need at least {}",
            delta + 1
        )));
    }
    let n = graph.n;
    let mut last_err = None;
    for attempt in 0..6u64 {
        let order: Vec<usize> = match attempt {
            0 => (0..n).collect(),
            1 => (0..n).rev().collect(),
            s => {
                let mut o: Vec<usize> = (0..n).collect();
                o.shuffle(&mut ChaCha8Rng::seed_from_u64(s));
                o
            }
        };
        // relabel: vertex order[i] becomes i
        let mut pos = vec![0; n];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        let relabeled: Vec<Vec<usize>> = order
            .iter()
            .map(|&v| {
                let mut l: Vec<usize> = adj[v].iter().map(|&u| pos[u]).collect();
                l.sort_unstable();
                l
            })
            .collect();
        match color_relabeled(&relabeled, r) {
            Ok(colors) => {
                let coloring = Coloring::new(r, order.iter().map(|&v| colors[pos[v]]).collect());
                if verify_coloring(graph, &coloring).is_empty() {
                    return Ok(coloring);
                }
                last_err = Some(Error::Internal("equitable coloring failed verification".into()));
            }
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap_or_else(|| Error::Internal("equitable coloring failed".into())))
}

fn color_relabeled(adj: &[Vec<usize>], r: usize) -> Result<Vec<usize>> {
    let n = adj.len();
    // Pad with a clique so every class ends with exactly s vertices; removing
    // the clique takes at most one vertex from each class.
    let p = (r - n % r) % r;
    let total = n + p;
    let mut full: Vec<Vec<usize>> = adj.to_vec();
    for u in n..total {
        full.push((n..total).filter(|&v| v != u).collect());
    }
    let mut st = State::new(total, r);
    for (u, nbrs) in full.iter().enumerate() {
        for &v in nbrs {
            if v > u {
                st.add_edge(u, v);
            }
        }
        let fu = st.f[u];
        if st.nb(u, fu) != 0 {
            let y = (0..r)
                .find(|&c| st.nb(u, c) == 0)
                .ok_or_else(|| Error::Internal("vertex has neighbours in every class".into()))?;
            st.change_color(u, fu, y)?;
            st.procedure_p(fu, y, &vec![false; r])?;
        }
    }
    st.f.truncate(n);
    Ok(st.f)
}

struct State {
    r: usize,
    adj: Vec<Vec<usize>>,
    f: Vec<usize>,
    /// `nbr[v * r + c]`: neighbours of `v` in class `c`.
    nbr: Vec<u32>,
    /// `h[x * r + y]`: vertices of class `x` with no neighbour in class `y`.
    h: Vec<i64>,
    classes: Vec<Vec<usize>>,
    budget: u64,
}

impl State {
    fn new(total: usize, r: usize) -> Self {
        let f: Vec<usize> = (0..total).map(|v| v % r).collect();
        let mut classes = vec![Vec::new(); r];
        for v in 0..total {
            classes[v % r].push(v);
        }
        let mut h = vec![0i64; r * r];
        for x in 0..r {
            for y in 0..r {
                h[x * r + y] = classes[x].len() as i64;
            }
        }
        let t = total as u64;
        State {
            r,
            adj: vec![Vec::new(); total],
            f,
            nbr: vec![0; total * r],
            h,
            classes,
            budget: 10_000 + 50 * t * t * r as u64,
        }
    }

    #[inline]
    fn nb(&self, v: usize, c: usize) -> u32 {
        self.nbr[v * self.r + c]
    }

    #[inline]
    fn hh(&self, x: usize, y: usize) -> i64 {
        self.h[x * self.r + y]
    }

    fn add_edge(&mut self, u: usize, v: usize) {
        let r = self.r;
        self.adj[u].push(v);
        self.adj[v].push(u);
        let (fu, fv) = (self.f[u], self.f[v]);
        self.nbr[u * r + fv] += 1;
        self.nbr[v * r + fu] += 1;
        if fu != fv {
            if self.nb(u, fv) == 1 {
                self.h[fu * r + fv] -= 1;
            }
            if self.nb(v, fu) == 1 {
                self.h[fv * r + fu] -= 1;
            }
        }
    }

    fn change_color(&mut self, u: usize, x: usize, y: usize) -> Result<()> {
        debug_assert!(self.f[u] == x && x != y);
        if self.budget == 0 {
            return Err(Error::Internal("equitable coloring exceeded its step budget".into()));
        }
        self.budget -= 1;
        let r = self.r;
        self.f[u] = y;
        for k in 0..r {
            if self.nb(u, k) == 0 {
                self.h[x * r + k] -= 1;
                self.h[y * r + k] += 1;
            }
        }
        for i in 0..self.adj[u].len() {
            let v = self.adj[u][i];
            self.nbr[v * r + x] -= 1;
            self.nbr[v * r + y] += 1;
            let fv = self.f[v];
            if self.nb(v, x) == 0 {
                self.h[fv * r + x] += 1;
            }
            if self.nb(v, y) == 1 {
                self.h[fv * r + y] -= 1;
            }
        }
        let at = self.classes[x]
            .iter()
            .position(|&w| w == u)
            .ok_or_else(|| Error::Internal("class bookkeeping out of sync".into()))?;
        self.classes[x].remove(at);
        self.classes[y].push(u);
        Ok(())
    }

    /// Moves one witness per step along `next` from class `src` to `dst`.
    fn move_witnesses(&mut self, src: usize, dst: usize, next: &[usize]) -> Result<()> {
        let mut x = src;
        while x != dst {
            let y = next[x];
            if y == usize::MAX {
                return Err(Error::Internal("broken class path".into()));
            }
            let w = self.classes[x]
                .iter()
                .copied()
                .find(|&w| self.nb(w, y) == 0)
                .ok_or_else(|| Error::Internal("no witness on class path".into()))?;
            self.change_color(w, x, y)?;
            x = y;
        }
        Ok(())
    }

    fn path_contains(next: &[usize], from: usize, to: usize, class: usize) -> bool {
        let mut x = from;
        loop {
            if x == class {
                return true;
            }
            if x == to || next[x] == usize::MAX {
                return false;
            }
            x = next[x];
        }
    }

    /// Rebalances a coloring in which `vminus` is one short and `vplus` one
    /// over, using only classes not marked in `excluded`.
    fn procedure_p(&mut self, vminus: usize, vplus: usize, excluded: &[bool]) -> Result<()> {
        let r = self.r;
        if vminus == vplus {
            return Ok(());
        }
        // Classes that can pass a vertex on towards vminus.
        let mut in_a = vec![false; r];
        let mut next = vec![usize::MAX; r];
        let mut marked = vec![false; r];
        let mut order = vec![vminus];
        marked[vminus] = true;
        let mut idx = 0;
        while idx < order.len() {
            let pop = order[idx];
            idx += 1;
            in_a[pop] = true;
            for k in 0..r {
                if !marked[k] && !excluded[k] && self.hh(k, pop) > 0 {
                    marked[k] = true;
                    next[k] = pop;
                    order.push(k);
                }
            }
        }
        if in_a[vplus] {
            return self.move_witnesses(vplus, vminus, &next);
        }
        let in_b = |c: usize| !excluded[c] && !in_a[c];
        let b_count = (0..r).filter(|&c| in_b(c)).count();

        let mut a0 = vec![false; r];
        let mut a0_count = 0;
        for (step, &w1) in order.iter().rev().enumerate() {
            if let Some((v, x, u, y)) = self.find_solo_move(w1, &in_a, &next, vminus, &in_b) {
                self.change_color(v, w1, x)?;
                self.move_witnesses(x, vminus, &next)?;
                self.change_color(y, u, w1)?;
                if u != vplus {
                    let excl: Vec<bool> = (0..r).map(|c| excluded[c] || in_a[c]).collect();
                    self.procedure_p(u, vplus, &excl)?;
                }
                return Ok(());
            }
            a0[w1] = true;
            a0_count += 1;
            if a0_count == b_count || step + 1 == order.len() {
                return self.case_two(vminus, vplus, excluded, &in_a, &next, &a0);
            }
        }
        Err(Error::Internal("rebalancing found no move".into()))
    }

    /// A vertex `v` of class `w1` movable to an accessible class `x` whose
    /// path to `vminus` avoids `w1`, together with a neighbour `y` in an
    /// inaccessible class `u` whose only neighbour in `w1` is `v`.
    fn find_solo_move(
        &self,
        w1: usize,
        in_a: &[bool],
        next: &[usize],
        vminus: usize,
        in_b: &dyn Fn(usize) -> bool,
    ) -> Option<(usize, usize, usize, usize)> {
        for &v in &self.classes[w1] {
            let x = (0..self.r)
                .rev()
                .find(|&c| c != w1 && in_a[c] && self.nb(v, c) == 0 && !Self::path_contains(next, c, vminus, w1));
            let Some(x) = x else { continue };
            for u in 0..self.r {
                if !in_b(u) || self.nb(v, u) == 0 {
                    continue;
                }
                if let Some(&y) = self.adj[v].iter().find(|&&y| self.f[y] == u && self.nb(y, w1) == 1) {
                    return Some((v, x, u, y));
                }
            }
        }
        None
    }

    fn case_two(
        &mut self,
        vminus: usize,
        vplus: usize,
        excluded: &[bool],
        in_a: &[bool],
        next: &[usize],
        a0: &[bool],
    ) -> Result<()> {
        let r = self.r;
        // Classes reachable from vplus among the inaccessible ones.
        let mut in_b2 = vec![false; r];
        let mut parent = vec![usize::MAX; r];
        let mut b_order = vec![vplus];
        in_b2[vplus] = true;
        let mut queue = VecDeque::from([vplus]);
        while let Some(pop) = queue.pop_front() {
            for k in 0..r {
                if !in_b2[k] && !excluded[k] && !in_a[k] && self.hh(pop, k) > 0 {
                    in_b2[k] = true;
                    parent[k] = pop;
                    b_order.push(k);
                    queue.push_back(k);
                }
            }
        }

        let mut candidates: Vec<usize> = self.classes[vplus].clone();
        for &c in &b_order[1..] {
            candidates.extend(self.classes[c].iter().copied());
        }
        let mut covered = vec![false; self.f.len()];
        let mut cover_of = vec![usize::MAX; self.f.len()];
        let mut pick = None;
        'outer: for &z in &candidates {
            if covered[z] || !in_b2[self.f[z]] {
                continue;
            }
            covered[z] = true;
            for &w in &self.adj[z] {
                covered[w] = true;
            }
            for &w in &self.adj[z] {
                let fw = self.f[w];
                if a0[fw] && self.nb(z, fw) == 1 {
                    if cover_of[w] == usize::MAX {
                        cover_of[w] = z;
                    } else {
                        pick = Some((cover_of[w], w));
                        break 'outer;
                    }
                }
            }
        }
        let (z1, w) = pick.ok_or_else(|| Error::Internal("no class vertex with two solo neighbours".into()))?;
        let z = self.f[z1];
        let wc = self.f[w];

        // Forward path vplus -> z inside the reachable classes.
        let mut fwd = vec![usize::MAX; r];
        let mut c = z;
        while c != vplus {
            let p = parent[c];
            fwd[p] = c;
            c = p;
        }

        if wc != vminus {
            let step = next[wc];
            let other = self.classes[wc]
                .iter()
                .copied()
                .find(|&x| x != w && self.nb(x, step) == 0);
            match other {
                Some(x) => {
                    self.change_color(x, wc, step)?;
                    self.move_witnesses(step, vminus, next)?;
                }
                None => {
                    // w is the only witness: moving it frees the slot for z1
                    // and finishes the rebalancing.
                    if self.nb(w, step) != 0 {
                        return Err(Error::Internal("class path lost its witness".into()));
                    }
                    self.change_color(w, wc, step)?;
                    self.move_witnesses(step, vminus, next)?;
                    self.move_witnesses(vplus, z, &fwd)?;
                    return self.change_color(z1, z, wc);
                }
            }
        }
        self.move_witnesses(vplus, z, &fwd)?;
        self.change_color(z1, z, wc)?;
        let target = (0..r)
            .filter(|&k| !excluded[k] && !in_a[k] && self.nb(w, k) == 0)
            .min_by_key(|&k| !in_b2[k])
            .ok_or_else(|| Error::Internal("no free class for the displaced vertex".into()))?;
        self.change_color(w, wc, target)?;
        let excl: Vec<bool> = (0..r)
            .map(|k| !(k == wc || k == target || in_b2[k]) || excluded[k])
            .collect();
        self.procedure_p(wc, target, &excl)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exhaustive search for an equitable proper `r`-coloring.
    fn equitable_exists(adj: &[Vec<usize>], r: usize) -> bool {
        fn rec(v: usize, adj: &[Vec<usize>], colors: &mut [usize], sizes: &mut [usize], hi: usize) -> bool {
            if v == adj.len() {
                return sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1;
            }
            for c in 0..sizes.len() {
                if sizes[c] < hi && adj[v].iter().all(|&u| colors[u] != c) {
                    colors[v] = c;
                    sizes[c] += 1;
                    if rec(v + 1, adj, colors, sizes, hi) {
                        return true;
                    }
                    sizes[c] -= 1;
                    colors[v] = usize::MAX;
                }
            }
            false
        }
        let n = adj.len();
        rec(0, adj, &mut vec![usize::MAX; n], &mut vec![0; r], n.div_ceil(r))
    }

    #[test]
    fn edgeless_graph_splits_evenly() {
        let g = AssignmentDigraph::new(6, vec![]).unwrap();
        let c = equitable_color(&g, 3).unwrap();
        assert_eq!(c.class_sizes(), vec![2, 2, 2]);
    }

    #[test]
    fn triangle_gets_three_colors() {
        let g = AssignmentDigraph::new(3, vec![(0, 1), (1, 2), (2, 0)]).unwrap();
        let c = equitable_color(&g, 3).unwrap();
        assert!(verify_coloring(&g, &c).is_empty());
        let mut cs = c.colors().to_vec();
        cs.sort_unstable();
        assert_eq!(cs, vec![0, 1, 2]);
    }

    #[test]
    fn too_few_colors_is_a_precondition_error() {
        let g = AssignmentDigraph::new(3, vec![(0, 1), (1, 2), (2, 0)]).unwrap();
        assert!(matches!(equitable_color(&g, 2), Err(Error::Precondition(_))));
    }

    #[test]
    fn verifier_reports_defects() {
        let g = AssignmentDigraph::new(6, vec![(0, 1)]).unwrap();
        let mono = Coloring::new(3, vec![0, 0, 1, 1, 2, 2]);
        assert_eq!(
            verify_coloring(&g, &mono),
            vec![ColoringViolation::Monochromatic { u: 0, v: 1, color: 0 }]
        );
        let lop = Coloring::new(3, vec![0, 1, 0, 0, 0, 2]);
        assert_eq!(
            verify_coloring(&g, &lop),
            vec![ColoringViolation::Unbalanced { sizes: vec![4, 1, 1] }]
        );
        let good = Coloring::new(3, vec![0, 1, 1, 2, 2, 0]);
        assert!(verify_coloring(&g, &good).is_empty());
    }

    #[test]
    fn rejects_self_loops() {
        assert!(AssignmentDigraph::new(2, vec![(1, 1)]).is_err());
    }

    #[test]
    fn more_colors_than_vertices() {
        let g = AssignmentDigraph::new(2, vec![(0, 1), (1, 0)]).unwrap();
        let c = equitable_color(&g, 5).unwrap();
        assert!(verify_coloring(&g, &c).is_empty());
        assert_eq!(c.class_sizes().iter().sum::<usize>(), 2);
    }

    #[test]
    fn small_graphs_agree_with_exhaustive_search() {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..400 {
            let n = rng.random_range(1..=9);
            let r = rng.random_range(1..=4);
            let mut edges = Vec::new();
            let mut deg = vec![0usize; n];
            for u in 0..n {
                for v in u + 1..n {
                    if deg[u] + 1 < r && deg[v] + 1 < r && rng.random_bool(0.5) {
                        edges.push((u, v));
                        deg[u] += 1;
                        deg[v] += 1;
                    }
                }
            }
            let g = AssignmentDigraph::new(n, edges).unwrap();
            let adj = g.undirected_neighbors();
            assert!(equitable_exists(&adj, r));
            let c = equitable_color(&g, r).unwrap();
            assert!(verify_coloring(&g, &c).is_empty(), "{g:?} r={r} -> {c:?}");
        }
    }
}

