use alloc::vec;
use alloc::vec::Vec;

use super::LocalGraph;
use crate::error::{Error, Result};

/// Fine-to-coarse vertex assignment produced by [`coarsen`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoarseningMap {
    pub fine_to_coarse: Vec<u32>,
    /// Fine members of each supernode, ascending. Supernodes are ordered by
    /// their smallest member.
    pub supernodes: Vec<Vec<u32>>,
}

impl CoarseningMap {
    pub fn identity(n: usize) -> Self {
        CoarseningMap { fine_to_coarse: (0..n as u32).collect(), supernodes: (0..n as u32).map(|i| vec![i]).collect() }
    }

    pub fn coarse_len(&self) -> usize {
        self.supernodes.len()
    }

    pub fn fine_len(&self) -> usize {
        self.fine_to_coarse.len()
    }
}

/// Reduces `g` to exactly `min(n_target, n)` supernodes by rounds of
/// heavy-edge matching.
///
/// Edge weights start at 1 and become the number of fine edges between two
/// supernodes after contraction. Each round visits candidate edges by
/// descending weight, then ascending `(a, b)` index pair, and contracts a
/// greedy matching of at most `count - n_target` edges. When no edges are
/// left (every component is a single supernode) the two smallest
/// supernodes are merged, ties to the lower index.
///
/// Coarse adjacency has an edge wherever any fine edge crosses two
/// supernodes; the coarse signal is the mean of member signals.
pub fn coarsen(g: &LocalGraph, n_target: usize) -> Result<(LocalGraph, CoarseningMap)> {
    if n_target == 0 {
        return Err(Error::invalid("coarsening target must be at least 1"));
    }
    let n = g.vertex_count();
    let mut groups: Vec<Vec<u32>> = (0..n as u32).map(|i| vec![i]).collect();
    let mut weights: Vec<Vec<(u32, u32)>> =
        g.adjacency.iter().map(|list| list.iter().map(|&b| (b, 1u32)).collect()).collect();

    while groups.len() > n_target {
        let needed = groups.len() - n_target;
        let mut edges: Vec<(u32, u32, u32)> = Vec::new();
        for (a, list) in weights.iter().enumerate() {
            edges.extend(list.iter().filter(|e| e.0 as usize > a).map(|&(b, w)| (w, a as u32, b)));
        }
        let mut partner: Vec<Option<u32>> = vec![None; groups.len()];
        if edges.is_empty() {
            let mut by_size: Vec<usize> = (0..groups.len()).collect();
            by_size.sort_by_key(|&i| (groups[i].len(), i));
            let (a, b) = (by_size[0], by_size[1]);
            partner[a] = Some(b as u32);
            partner[b] = Some(a as u32);
        } else {
            edges.sort_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
            let mut matched = 0;
            for &(_, a, b) in &edges {
                if matched == needed {
                    break;
                }
                if partner[a as usize].is_none() && partner[b as usize].is_none() {
                    partner[a as usize] = Some(b);
                    partner[b as usize] = Some(a);
                    matched += 1;
                }
            }
        }
        let (next_groups, old_to_new) = contract(&groups, &partner);
        let mut next_weights: Vec<Vec<(u32, u32)>> = vec![Vec::new(); next_groups.len()];
        for (a, list) in weights.iter().enumerate() {
            let na = old_to_new[a];
            for &(b, w) in list {
                let nb = old_to_new[b as usize];
                if na != nb {
                    next_weights[na as usize].push((nb, w));
                }
            }
        }
        for list in &mut next_weights {
            list.sort_unstable();
            let mut merged: Vec<(u32, u32)> = Vec::with_capacity(list.len());
            for &(b, w) in list.iter() {
                match merged.last_mut() {
                    Some(last) if last.0 == b => last.1 += w,
                    _ => merged.push((b, w)),
                }
            }
            *list = merged;
        }
        groups = next_groups;
        weights = next_weights;
    }

    let mut fine_to_coarse = vec![0u32; n];
    for (c, members) in groups.iter().enumerate() {
        for &f in members {
            fine_to_coarse[f as usize] = c as u32;
        }
    }
    let adjacency = weights.into_iter().map(|list| list.into_iter().map(|e| e.0).collect()).collect();
    let signal = groups
        .iter()
        .map(|m| m.iter().map(|&f| g.signal[f as usize]).sum::<f64>() / m.len() as f64)
        .collect();
    let vertices = groups.iter().map(|m| g.vertices[m[0] as usize]).collect();
    let coarse = LocalGraph { vertices, adjacency, signal };
    Ok((coarse, CoarseningMap { fine_to_coarse, supernodes: groups }))
}

/// Merges matched pairs; new ids are ordered by smallest fine member.
fn contract(groups: &[Vec<u32>], partner: &[Option<u32>]) -> (Vec<Vec<u32>>, Vec<u32>) {
    let mut merged: Vec<(Vec<u32>, Vec<usize>)> = Vec::with_capacity(groups.len());
    for (a, members) in groups.iter().enumerate() {
        match partner[a] {
            Some(b) if (b as usize) < a => continue,
            Some(b) => {
                let mut m = members.clone();
                m.extend_from_slice(&groups[b as usize]);
                m.sort_unstable();
                merged.push((m, vec![a, b as usize]));
            }
            None => merged.push((members.clone(), vec![a])),
        }
    }
    merged.sort_by_key(|(m, _)| m[0]);
    let mut old_to_new = vec![0u32; groups.len()];
    for (new, (_, olds)) in merged.iter().enumerate() {
        for &o in olds {
            old_to_new[o] = new as u32;
        }
    }
    (merged.into_iter().map(|(m, _)| m).collect(), old_to_new)
}

/// Piecewise-constant lift of a coarse signal back to the fine vertices.
pub fn uncoarsen_signal(coarse: &[f64], map: &CoarseningMap) -> Result<Vec<f64>> {
    if coarse.len() != map.coarse_len() {
        return Err(Error::DimensionMismatch { expected: map.coarse_len(), actual: coarse.len() });
    }
    Ok(map.fine_to_coarse.iter().map(|&c| coarse[c as usize]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize, signal: Vec<f64>) -> LocalGraph {
        let edges: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
        LocalGraph::from_edges(n, &edges, signal)
    }

    #[test]
    fn target_above_size_is_identity() {
        let g = path(4, vec![1.0, 2.0, 3.0, 4.0]);
        let (c, map) = coarsen(&g, 10).unwrap();
        assert_eq!(map, CoarseningMap::identity(4));
        assert_eq!(c.signal, g.signal);
        assert_eq!(c.adjacency, g.adjacency);
    }

    #[test]
    fn cycle_with_constant_signal() {
        let g = LocalGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)], vec![5.0; 4]);
        let (c, map) = coarsen(&g, 2).unwrap();
        assert_eq!(map.coarse_len(), 2);
        assert_eq!(c.signal, vec![5.0, 5.0]);
        assert_eq!(uncoarsen_signal(&c.signal, &map).unwrap(), g.signal);
    }

    /// Oracle: enumerate every maximal matching of the 6-path reachable by
    /// picking unit-weight edges in ascending index order, keeping the first.
    fn first_greedy_matching(edges: &[(usize, usize)], n: usize, needed: usize) -> Vec<(usize, usize)> {
        let mut used = vec![false; n];
        let mut out = Vec::new();
        let mut sorted = edges.to_vec();
        sorted.sort();
        for (a, b) in sorted {
            if out.len() < needed && !used[a] && !used[b] {
                used[a] = true;
                used[b] = true;
                out.push((a, b));
            }
        }
        out
    }

    #[test]
    fn six_path_pairs_neighbours() {
        let g = path(6, vec![0.0, 0.0, 2.0, 2.0, 4.0, 4.0]);
        let oracle = first_greedy_matching(&g.edges(), 6, 3);
        assert_eq!(oracle, vec![(0, 1), (2, 3), (4, 5)]);
        let (c, map) = coarsen(&g, 3).unwrap();
        let expected: Vec<Vec<u32>> = oracle.iter().map(|&(a, b)| vec![a as u32, b as u32]).collect();
        assert_eq!(map.supernodes, expected);
        assert_eq!(c.signal, vec![0.0, 2.0, 4.0]);
        assert_eq!(uncoarsen_signal(&c.signal, &map).unwrap(), g.signal);
        assert_eq!(c.edges(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn disconnected_graph_reaches_target() {
        // two triangles and two isolated vertices
        let g = LocalGraph::from_edges(8, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)], vec![1.0; 8]);
        let (c, map) = coarsen(&g, 2).unwrap();
        assert_eq!(c.vertex_count(), 2);
        let mut all: Vec<u32> = map.supernodes.concat();
        all.sort_unstable();
        assert_eq!(all, (0..8).collect::<Vec<u32>>());
    }

    #[test]
    fn supernodes_are_connected_on_grid() {
        let (w, h) = (9, 7);
        let mut edges = Vec::new();
        for y in 0..h {
            for x in 0..w {
                let p = y * w + x;
                if x + 1 < w {
                    edges.push((p, p + 1));
                }
                if y + 1 < h {
                    edges.push((p, p + w));
                }
            }
        }
        let g = LocalGraph::from_edges(w * h, &edges, (0..w * h).map(|i| i as f64).collect());
        let (c, map) = coarsen(&g, 10).unwrap();
        assert_eq!(c.vertex_count(), 10);
        for members in &map.supernodes {
            let sub: Vec<(usize, usize)> = edges
                .iter()
                .filter(|(a, b)| members.contains(&(*a as u32)) && members.contains(&(*b as u32)))
                .map(|&(a, b)| {
                    let ia = members.iter().position(|&m| m as usize == a).unwrap();
                    let ib = members.iter().position(|&m| m as usize == b).unwrap();
                    (ia, ib)
                })
                .collect();
            let (_, k) = LocalGraph::from_edges(members.len(), &sub, vec![0.0; members.len()]).components();
            assert_eq!(k, 1);
        }
        let mass: f64 = c.signal.iter().zip(&map.supernodes).map(|(v, m)| v * m.len() as f64).sum();
        let fine: f64 = g.signal.iter().sum();
        assert!((mass - fine).abs() < 1e-9);
    }
}
