//! Coding units: the graphs actually transformed. A super-ray becomes one
//! unit (coarsened or small enough as is) or several partition parts.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{round_half_away, to_sample};
use crate::runtime::Runtime;
use crate::segmentation::SuperRay;
use crate::spectral::{apply_split_flags, build_graph_structure, coarsen, CoarseningMap, LocalGraph, Vertex, ViewGeometry};

/// Per-super-ray size control decision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Structure {
    Coarsen,
    /// Pre-order split flags of the partition tree.
    Partition(Vec<bool>),
}

#[derive(Debug, Clone)]
pub struct CodingUnit {
    pub super_ray: usize,
    /// Fine vertices, in graph order.
    pub vertices: Vec<Vertex>,
    /// Graph whose eigen-basis transforms the unit's signal.
    pub graph: LocalGraph,
    /// Fine-to-coarse map when the graph was contracted.
    pub map: Option<CoarseningMap>,
    /// Number of zero graph frequencies (connected components).
    pub components: usize,
    /// Coarsened to exactly the common dimension, hence eligible for grouping.
    pub coarsened: bool,
}

impl CodingUnit {
    pub fn dim(&self) -> usize {
        self.graph.vertex_count()
    }

    /// Integer signal coded for this unit: the samples themselves, or the
    /// rounded supernode means of a coarsened unit. `planes[view]` is one
    /// channel of a view.
    pub fn signal(&self, planes: &[&[u16]]) -> Vec<i64> {
        let sample = |v: &Vertex| i64::from(planes[v.view as usize][v.pixel as usize]);
        match &self.map {
            None => self.vertices.iter().map(sample).collect(),
            Some(map) => map
                .supernodes
                .iter()
                .map(|members| {
                    let sum: i64 = members.iter().map(|&i| sample(&self.vertices[i as usize])).sum();
                    round_half_away(sum as f64 / members.len() as f64) as i64
                })
                .collect(),
        }
    }

    /// Writes decoded unit samples (one per graph vertex) to the fine pixels.
    pub fn write(&self, samples: &[i64], max: i64, planes: &mut [Vec<u16>]) {
        for (i, v) in self.vertices.iter().enumerate() {
            let k = match &self.map {
                None => i,
                Some(map) => map.fine_to_coarse[i] as usize,
            };
            planes[v.view as usize][v.pixel as usize] = to_sample(samples[k] as f64, max) as u16;
        }
    }
}

/// Builds the coding units of every super-ray, in super-ray order and, within
/// a partitioned super-ray, in partition pre-order.
pub fn build_units<R: Runtime + ?Sized>(
    rt: &R,
    rays: &[SuperRay],
    structure: &[Structure],
    geom: &ViewGeometry,
    n_target: usize,
) -> Result<Vec<CodingUnit>> {
    if rays.len() != structure.len() {
        return Err(Error::DimensionMismatch { expected: rays.len(), actual: structure.len() });
    }
    let per_ray = rt.map(rays.len(), |i| -> Result<Vec<CodingUnit>> {
        match &structure[i] {
            Structure::Coarsen => Ok(alloc::vec![coarsened_unit(i, &rays[i], geom, n_target)?]),
            Structure::Partition(flags) => Ok(apply_split_flags(&rays[i], flags, geom)?
                .iter()
                .map(|part| plain_unit(i, build_graph_structure(part, geom)))
                .collect()),
        }
    });
    let mut units = Vec::new();
    for r in per_ray {
        units.extend(r?);
    }
    Ok(units)
}

fn coarsened_unit(index: usize, ray: &SuperRay, geom: &ViewGeometry, n_target: usize) -> Result<CodingUnit> {
    let fine = build_graph_structure(ray, geom);
    let n = fine.vertex_count();
    if n <= n_target {
        let mut unit = plain_unit(index, fine);
        unit.coarsened = n == n_target;
        return Ok(unit);
    }
    let (coarse, map) = coarsen(&fine, n_target)?;
    let components = coarse.components().1;
    Ok(CodingUnit { super_ray: index, vertices: fine.vertices, graph: coarse, map: Some(map), components, coarsened: true })
}

fn plain_unit(index: usize, graph: LocalGraph) -> CodingUnit {
    let components = graph.components().1;
    CodingUnit { super_ray: index, vertices: graph.vertices.clone(), graph, map: None, components, coarsened: false }
}
