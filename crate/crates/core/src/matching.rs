//! Maximum-cardinality matching on small general graphs.
//!
//! A greedy pass (minimum degree first, lowest index on ties) seeds the
//! matching; Edmonds' blossom search then augments it until no augmenting
//! path remains. All scans run in increasing vertex order, so the result
//! is a deterministic function of the adjacency lists.

use std::collections::VecDeque;

const NIL: usize = usize::MAX;

/// Returns `mate[v]` (or `None`) for a graph given by sorted adjacency lists.
/// Augmentation is skipped when `n > augment_cap`, leaving the greedy result.
pub(crate) fn maximum_matching(adj: &[Vec<usize>], augment_cap: usize) -> Vec<Option<usize>> {
    let n = adj.len();
    let mut mate = vec![NIL; n];
    greedy(adj, &mut mate);
    if n <= augment_cap {
        let mut search = Blossom::new(n);
        for root in 0..n {
            if mate[root] == NIL && !adj[root].is_empty() {
                search.augment_from(adj, &mut mate, root);
            }
        }
    }
    mate.into_iter().map(|m| (m != NIL).then_some(m)).collect()
}

fn greedy(adj: &[Vec<usize>], mate: &mut [usize]) {
    let mut order: Vec<usize> = (0..adj.len()).collect();
    order.sort_by_key(|&v| (adj[v].len(), v));
    for v in order {
        if mate[v] != NIL {
            continue;
        }
        let pick = adj[v]
            .iter()
            .copied()
            .filter(|&u| mate[u] == NIL && u != v)
            .min_by_key(|&u| (adj[u].len(), u));
        if let Some(u) = pick {
            mate[v] = u;
            mate[u] = v;
        }
    }
}

struct Blossom {
    parent: Vec<usize>,
    base: Vec<usize>,
    used: Vec<bool>,
    in_blossom: Vec<bool>,
    queue: VecDeque<usize>,
}

impl Blossom {
    fn new(n: usize) -> Self {
        Blossom {
            parent: vec![NIL; n],
            base: (0..n).collect(),
            used: vec![false; n],
            in_blossom: vec![false; n],
            queue: VecDeque::new(),
        }
    }

    fn lca(&self, mate: &[usize], mut a: usize, mut b: usize) -> usize {
        let mut seen = vec![false; mate.len()];
        loop {
            a = self.base[a];
            seen[a] = true;
            if mate[a] == NIL {
                break;
            }
            a = self.parent[mate[a]];
        }
        loop {
            b = self.base[b];
            if seen[b] {
                return b;
            }
            b = self.parent[mate[b]];
        }
    }

    fn mark_path(&mut self, mate: &[usize], mut v: usize, b: usize, mut child: usize) {
        while self.base[v] != b {
            self.in_blossom[self.base[v]] = true;
            self.in_blossom[self.base[mate[v]]] = true;
            self.parent[v] = child;
            child = mate[v];
            v = self.parent[mate[v]];
        }
    }

    fn augment_from(&mut self, adj: &[Vec<usize>], mate: &mut [usize], root: usize) -> bool {
        let n = adj.len();
        self.used.iter_mut().for_each(|x| *x = false);
        self.parent.iter_mut().for_each(|x| *x = NIL);
        for (i, b) in self.base.iter_mut().enumerate() {
            *b = i;
        }
        self.queue.clear();
        self.used[root] = true;
        self.queue.push_back(root);
        while let Some(v) = self.queue.pop_front() {
            for &to in &adj[v] {
                if self.base[v] == self.base[to] || mate[v] == to {
                    continue;
                }
                if to == root || (mate[to] != NIL && self.parent[mate[to]] != NIL) {
                    let cur = self.lca(mate, v, to);
                    self.in_blossom.iter_mut().for_each(|x| *x = false);
                    self.mark_path(mate, v, cur, to);
                    self.mark_path(mate, to, cur, v);
                    for i in 0..n {
                        if self.in_blossom[self.base[i]] {
                            self.base[i] = cur;
                            if !self.used[i] {
                                self.used[i] = true;
                                self.queue.push_back(i);
                            }
                        }
                    }
                } else if self.parent[to] == NIL {
                    self.parent[to] = v;
                    if mate[to] == NIL {
                        let mut u = to;
                        while u != NIL {
                            let pv = self.parent[u];
                            let next = mate[pv];
                            mate[u] = pv;
                            mate[pv] = u;
                            u = next;
                        }
                        return true;
                    }
                    self.used[mate[to]] = true;
                    self.queue.push_back(mate[to]);
                }
            }
        }
        false
    }
}
