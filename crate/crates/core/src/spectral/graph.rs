use alloc::vec;
use alloc::vec::Vec;

use super::ViewGeometry;
use crate::lightfield::LightField;
use crate::math::round_half_away;
use crate::segmentation::SuperRay;

/// A graph vertex: raster view index and linear pixel index in that view.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Vertex {
    pub view: u32,
    pub pixel: u32,
}

/// Unweighted undirected graph with a real signal on its vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalGraph {
    pub vertices: Vec<Vertex>,
    /// Sorted neighbour lists; symmetric, no self loops.
    pub adjacency: Vec<Vec<u32>>,
    pub signal: Vec<f64>,
}

impl LocalGraph {
    /// Graph on `n` vertices from an edge list (duplicates and self loops
    /// ignored). Vertex ids are synthetic `(0, i)`.
    pub fn from_edges(n: usize, edges: &[(usize, usize)], signal: Vec<f64>) -> Self {
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a != b {
                adjacency[a].push(b as u32);
                adjacency[b].push(a as u32);
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        let vertices = (0..n).map(|i| Vertex { view: 0, pixel: i as u32 }).collect();
        LocalGraph { vertices, adjacency, signal }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(a, b)` with `a < b`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (a, list) in self.adjacency.iter().enumerate() {
            out.extend(list.iter().map(|&b| b as usize).filter(|&b| b > a).map(|b| (a, b)));
        }
        out
    }

    /// Connected-component id of every vertex (ids in order of smallest
    /// member) and the component count.
    pub fn components(&self) -> (Vec<u32>, usize) {
        let n = self.vertex_count();
        let mut comp = vec![u32::MAX; n];
        let mut count = 0u32;
        let mut stack = Vec::new();
        for start in 0..n {
            if comp[start] != u32::MAX {
                continue;
            }
            comp[start] = count;
            stack.push(start);
            while let Some(v) = stack.pop() {
                for &u in &self.adjacency[v] {
                    if comp[u as usize] == u32::MAX {
                        comp[u as usize] = count;
                        stack.push(u as usize);
                    }
                }
            }
            count += 1;
        }
        (comp, count as usize)
    }
}

/// Vertices and edges of a super-ray's local graph, with a zero signal.
///
/// Vertex order: views in raster `(s, t)` order, pixels in raster order.
/// Spatial edges join 4-neighbours inside each view's super-pixel; angular
/// edges join every reference pixel to its disparity-projected pixel in each
/// other view when that pixel belongs to the same super-ray.
pub fn build_graph_structure(sr: &SuperRay, geom: &ViewGeometry) -> LocalGraph {
    let w = geom.width;
    let mut offsets = Vec::with_capacity(sr.view_count() + 1);
    let mut vertices = Vec::with_capacity(sr.vertex_count());
    offsets.push(0usize);
    for (v, pixels) in sr.per_view_pixels.iter().enumerate() {
        vertices.extend(pixels.iter().map(|&p| Vertex { view: v as u32, pixel: p }));
        offsets.push(vertices.len());
    }
    let mut adjacency: Vec<Vec<u32>> = vec![Vec::new(); vertices.len()];
    let mut link = |a: usize, b: usize| {
        adjacency[a].push(b as u32);
        adjacency[b].push(a as u32);
    };

    for (v, pixels) in sr.per_view_pixels.iter().enumerate() {
        let base = offsets[v];
        for (i, &p) in pixels.iter().enumerate() {
            let p = p as usize;
            if p % w + 1 < w {
                if let Ok(j) = pixels.binary_search(&((p + 1) as u32)) {
                    link(base + i, base + j);
                }
            }
            if let Ok(j) = pixels.binary_search(&((p + w) as u32)) {
                link(base + i, base + j);
            }
        }
    }

    let reference = sr.reference();
    for v in 1..sr.view_count() {
        let (s, t) = geom.offset(v);
        let pixels = &sr.per_view_pixels[v];
        for (i, &p) in reference.iter().enumerate() {
            let (x, y) = ((p as usize % w) as f64, (p as usize / w) as f64);
            let tx = round_half_away(x - sr.disparity * t as f64);
            let ty = round_half_away(y - sr.disparity * s as f64);
            if tx < 0.0 || ty < 0.0 || tx >= w as f64 || ty >= geom.height as f64 {
                continue;
            }
            let q = (ty as usize * w + tx as usize) as u32;
            if let Ok(j) = pixels.binary_search(&q) {
                link(i, offsets[v] + j);
            }
        }
    }
    for list in &mut adjacency {
        list.sort_unstable();
        list.dedup();
    }
    let signal = vec![0.0; vertices.len()];
    LocalGraph { vertices, adjacency, signal }
}

/// Local graph with plane 0 samples of `lf` as the signal.
pub fn build_local_graph(sr: &SuperRay, lf: &LightField) -> LocalGraph {
    let mut g = build_graph_structure(sr, &ViewGeometry::of(lf));
    g.signal = g
        .vertices
        .iter()
        .map(|v| f64::from(lf.views()[v.view as usize].planes[0][v.pixel as usize]))
        .collect();
    g
}

/// Sparse combinatorial Laplacian `L = D - A`, rows as sorted
/// `(column, value)` lists including the diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct Laplacian {
    rows: Vec<Vec<(u32, f64)>>,
}

impl Laplacian {
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, i: usize) -> &[(u32, f64)] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match self.rows[i].binary_search_by_key(&(j as u32), |e| e.0) {
            Ok(k) => self.rows[i][k].1,
            Err(_) => 0.0,
        }
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.dim();
        let mut a = vec![0.0; n * n];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                a[i * n + j as usize] = v;
            }
        }
        a
    }

    pub fn max_abs(&self) -> f64 {
        self.rows.iter().flatten().fold(0.0, |m, e| m.max(e.1.abs()))
    }
}

pub fn laplacian(g: &LocalGraph) -> Laplacian {
    let rows = g
        .adjacency
        .iter()
        .enumerate()
        .map(|(i, list)| {
            let mut row: Vec<(u32, f64)> = list.iter().map(|&j| (j, -1.0)).collect();
            let at = row.partition_point(|e| (e.0 as usize) < i);
            row.insert(at, (i as u32, list.len() as f64));
            row
        })
        .collect();
    Laplacian { rows }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom(w: usize, h: usize, rows: usize, cols: usize) -> ViewGeometry {
        ViewGeometry { width: w, height: h, rows, cols }
    }

    /// Independent edge count by enumerating all vertex pairs.
    fn brute_force_edges(sr: &SuperRay, g: &ViewGeometry) -> usize {
        let verts: Vec<(usize, u32)> =
            sr.per_view_pixels.iter().enumerate().flat_map(|(v, ps)| ps.iter().map(move |&p| (v, p))).collect();
        let mut count = 0;
        for a in 0..verts.len() {
            for b in a + 1..verts.len() {
                let ((va, pa), (vb, pb)) = (verts[a], verts[b]);
                let (xa, ya) = ((pa as usize % g.width) as i64, (pa as usize / g.width) as i64);
                let (xb, yb) = ((pb as usize % g.width) as i64, (pb as usize / g.width) as i64);
                let spatial = va == vb && (xa - xb).abs() + (ya - yb).abs() == 1;
                let angular = (va == 0) != (vb == 0) && {
                    let (r, o, other_view) = if va == 0 { ((xa, ya), (xb, yb), vb) } else { ((xb, yb), (xa, ya), va) };
                    let (s, t) = g.offset(other_view);
                    let tx = (r.0 as f64 - sr.disparity * t as f64).round() as i64;
                    let ty = (r.1 as f64 - sr.disparity * s as f64).round() as i64;
                    (tx, ty) == o
                };
                if spatial || angular {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn square_in_two_views() {
        let pixels = vec![0, 1, 4, 5];
        let sr = SuperRay { label: 0, disparity: 0.0, per_view_pixels: vec![pixels.clone(), pixels] };
        let g = build_graph_structure(&sr, &geom(4, 4, 1, 2));
        assert_eq!(g.vertex_count(), 8);
        assert_eq!(g.edge_count(), 12);
    }

    #[test]
    fn single_pixel_graph() {
        let sr = SuperRay { label: 0, disparity: 0.0, per_view_pixels: vec![vec![3]] };
        let g = build_graph_structure(&sr, &geom(4, 4, 1, 1));
        assert_eq!((g.vertex_count(), g.edge_count()), (1, 0));
    }

    #[test]
    fn strip_in_three_views_matches_enumeration() {
        let strip = vec![5, 6, 7];
        let sr = SuperRay { label: 0, disparity: 0.0, per_view_pixels: vec![strip.clone(); 3] };
        let g = geom(8, 3, 1, 3);
        let graph = build_graph_structure(&sr, &g);
        assert_eq!(graph.vertex_count(), 9);
        assert_eq!(graph.edge_count(), brute_force_edges(&sr, &g));
        assert_eq!(graph.edge_count(), 12);
    }

    #[test]
    fn shifted_views_match_enumeration() {
        // 3x3 square at disparity 1 in a 2x2 view grid; footprints shifted.
        let g = geom(8, 8, 2, 2);
        let square = |ox: usize, oy: usize| -> Vec<u32> {
            let mut v: Vec<u32> = (0..9).map(|i| ((oy + i / 3) * 8 + ox + i % 3) as u32).collect();
            v.sort_unstable();
            v
        };
        let sr = SuperRay { label: 0, disparity: 1.0, per_view_pixels: vec![square(3, 3), square(2, 3), square(3, 2), square(3, 3)] };
        let graph = build_graph_structure(&sr, &g);
        assert_eq!(graph.edge_count(), brute_force_edges(&sr, &g));
    }

    #[test]
    fn laplacian_examples() {
        let p2 = laplacian(&LocalGraph::from_edges(2, &[(0, 1)], vec![0.0; 2]));
        assert_eq!(p2.to_dense(), vec![1.0, -1.0, -1.0, 1.0]);

        let empty = laplacian(&LocalGraph::from_edges(3, &[], vec![0.0; 3]));
        assert!(empty.to_dense().iter().all(|&v| v == 0.0));

        let c4 = laplacian(&LocalGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)], vec![0.0; 4]));
        for i in 0..4 {
            assert_eq!(c4.get(i, i), 2.0);
            assert_eq!(c4.get(i, (i + 1) % 4), -1.0);
            assert_eq!(c4.row(i).iter().map(|e| e.1).sum::<f64>(), 0.0);
        }
    }
}
