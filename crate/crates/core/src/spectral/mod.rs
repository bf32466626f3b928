//! Local graphs of super-rays, their Laplacians and eigen-bases, and the two
//! size-control mechanisms: coarsening to a fixed dimension and partitioning
//! into bounded parts.

mod coarsen;
mod eigen;
mod graph;
mod partition;

pub use coarsen::{coarsen, uncoarsen_signal, CoarseningMap};
pub use eigen::{eigendecompose, eigendecompose_dense, EigenBasis, EIGENVALUE_TIE};
pub use graph::{build_graph_structure, build_local_graph, laplacian, Laplacian, LocalGraph, Vertex};
pub use partition::{apply_split_flags, partition_super_ray, split_super_ray, Partition};

/// Light-field geometry needed to locate pixels and angular offsets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ViewGeometry {
    pub width: usize,
    pub height: usize,
    pub rows: usize,
    pub cols: usize,
}

impl ViewGeometry {
    pub fn of(lf: &crate::LightField) -> Self {
        let (rows, cols) = lf.angular_dims();
        ViewGeometry { width: lf.width(), height: lf.height(), rows, cols }
    }

    /// Angular offset `(s, t)` of raster view index `v` from the reference view.
    #[inline]
    pub fn offset(&self, v: usize) -> (usize, usize) {
        (v / self.cols, v % self.cols)
    }

    pub fn views(&self) -> usize {
        self.rows * self.cols
    }
}
