use alloc::vec;
use alloc::vec::Vec;

use super::sections::{
    coefficient_bank, dct_bank, encode_disparities, encode_labels, encode_structure, LEVEL_BANKS,
};
use super::units::{build_units, CodingUnit, Structure};
use super::{ChannelMode, CodecConfig, EncodeReport, ResidualMode, StageTimes};
use crate::bitstream::{Bitstream, StreamHeader, FLAG_EXPLICIT_GROUPS, FLAG_GROUPING, FLAG_RAW_RESIDUALS};
use crate::entropy::{encode_signed, encode_unsigned, BinaryEncoder, ContextSet};
use crate::error::{Error, Result};
use crate::grouping::{predict_and_residual, run_grouping_with, GroupSet};
use crate::lightfield::{DisparityMap, LightField};
use crate::metrics::{bpp_for_bytes, grouping_ratios};
use crate::runtime::{Runtime, Sequential, Stopwatch};
use crate::segmentation::{
    assemble_super_rays, median_disparity, project_view, quantize_disparity, dequantize_disparity, slic_segment,
    SegmentationMap, SlicParams,
};
use crate::spectral::{eigendecompose, laplacian, partition_super_ray, EigenBasis, ViewGeometry};
use crate::transform::{dct1d, gft, quantize, quantize_value};

/// What the encoder did with one coding unit of one channel.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitTrace {
    pub super_ray: usize,
    pub coarsened: bool,
    /// Group index, for grouped units.
    pub group: Option<usize>,
    /// The coded integer signal (supernode means for coarsened units).
    pub signal: Vec<i64>,
    /// Quantized GFT levels.
    pub levels: Vec<i64>,
    /// Prediction through the group's main basis, for grouped units.
    pub predicted: Option<Vec<i64>>,
    /// `signal - predicted`, for grouped units.
    pub residual: Option<Vec<i64>>,
}

#[derive(Debug, Clone)]
pub struct EncodeOutput {
    pub bitstream: Bitstream,
    pub report: EncodeReport,
    /// `units[channel][unit]`.
    pub units: Vec<Vec<UnitTrace>>,
}

/// Encodes a light field on the calling thread.
pub fn encode(lf: &LightField, dmap: &DisparityMap, cfg: &CodecConfig) -> Result<(Bitstream, EncodeReport)> {
    let out = encode_with(&Sequential, lf, dmap, cfg)?;
    Ok((out.bitstream, out.report))
}

/// Encodes a light field, running per-unit work through `rt`. The stream
/// does not depend on the runtime.
pub fn encode_with<R: Runtime + ?Sized>(
    rt: &R,
    lf: &LightField,
    dmap: &DisparityMap,
    cfg: &CodecConfig,
) -> Result<EncodeOutput> {
    cfg.validate()?;
    let geom = ViewGeometry::of(lf);
    if (dmap.width(), dmap.height()) != (geom.width, geom.height) {
        return Err(Error::DimensionMismatch {
            expected: geom.width * geom.height,
            actual: dmap.width() * dmap.height(),
        });
    }
    let dims = [geom.rows, geom.cols, geom.width, geom.height].map(u16::try_from);
    let [Ok(rows), Ok(cols), Ok(width), Ok(height)] = dims else {
        return Err(Error::invalid("light field dimensions must fit in 16 bits"));
    };
    if !cfg.coarsens() && cfg.max_vertices < geom.views() {
        return Err(Error::invalid("max_vertices must be at least the number of views"));
    }
    let channels: Vec<LightField> = match cfg.channels {
        ChannelMode::Luma => vec![lf.luma()],
        ChannelMode::All => (0..lf.channels()).map(|c| lf.channel(c)).collect(),
    };
    let max = i64::from(lf.max_sample());
    let mut times = StageTimes::default();
    let mut sw = Stopwatch::start(rt);

    let luma = match cfg.channels {
        ChannelMode::Luma => channels[0].clone(),
        ChannelMode::All => lf.luma(),
    };
    let params = SlicParams::new(cfg.slic_k, cfg.compactness);
    let reference = slic_segment(luma.view(0, 0), &params, lf.bit_depth())?;
    let quantized = label_disparities(&reference, dmap)?;
    let disparities: Vec<f64> = quantized.iter().map(|&q| dequantize_disparity(q)).collect();
    let seg = project_all(rt, reference.reference(), &disparities, &geom, reference.label_count);
    let rays = assemble_super_rays(&seg, &disparities)?;
    times.segmentation = sw.lap(rt);

    let structure: Vec<Structure> = if cfg.coarsens() {
        vec![Structure::Coarsen; rays.len()]
    } else {
        rt.map(rays.len(), |i| Structure::Partition(partition_super_ray(&rays[i], cfg.max_vertices, &geom).split_flags))
    };
    let units = build_units(rt, &rays, &structure, &geom, cfg.n_target)?;
    times.structure = sw.lap(rt);

    let bases = rt
        .map(units.len(), |u| eigendecompose(&laplacian(&units[u].graph)))
        .into_iter()
        .collect::<Result<Vec<EigenBasis>>>()?;
    times.eigen = sw.lap(rt);

    let eligible: Vec<usize> = (0..units.len()).filter(|&u| units[u].coarsened).collect();
    let mut coeff_enc = BinaryEncoder::new();
    let mut coeff_ctx = ContextSet::new(LEVEL_BANKS);
    let mut group_enc = BinaryEncoder::new();
    let mut group_ctx = ContextSet::new(4);
    let mut res_enc = BinaryEncoder::new();
    let mut res_ctx = ContextSet::new(LEVEL_BANKS);
    let mut traces = Vec::with_capacity(channels.len());
    let mut report = EncodeReport {
        channels: channels.len(),
        super_rays: rays.len(),
        total_sr: units.len(),
        coarsened: eligible.len(),
        pairs: 0,
        pairs_under_threshold: 0,
        threshold: 0.0,
        one_level_groups: 0,
        groups: 0,
        grouped: 0,
        coarsened_ratio: 0.0,
        overall_ratio: 0.0,
        eig_count: bases.len(),
        stream_bytes: 0,
        bpp: 0.0,
        workers: rt.workers(),
        times,
    };

    for (c, channel) in channels.iter().enumerate() {
        let planes: Vec<&[u16]> = channel.views().iter().map(|v| v.planes[0].as_slice()).collect();
        let signals = rt.map(units.len(), |u| units[u].signal(&planes));
        let coded = rt
            .map(units.len(), |u| transform_unit(&units[u], &bases[u], &signals[u], cfg.q_gft))
            .into_iter()
            .collect::<Result<Vec<(Vec<i64>, Vec<f64>)>>>()?;
        report.times.transform += sw.lap(rt);

        let groups = if cfg.grouping {
            let coeffs: Vec<Vec<f64>> = eligible.iter().map(|&u| coded[u].1.clone()).collect();
            let sigs: Vec<Vec<f64>> =
                eligible.iter().map(|&u| signals[u].iter().map(|&v| v as f64).collect()).collect();
            run_grouping_with(rt, &coeffs, &sigs, cfg.bin_width)?
        } else {
            GroupSet::empty(eligible.len())
        };
        report.times.grouping += sw.lap(rt);

        let mut channel_traces: Vec<UnitTrace> = units
            .iter()
            .zip(signals)
            .zip(&coded)
            .map(|((unit, signal), (levels, _))| UnitTrace {
                super_ray: unit.super_ray,
                coarsened: unit.coarsened,
                group: None,
                signal,
                levels: levels.clone(),
                predicted: None,
                residual: None,
            })
            .collect();
        for (g, group) in groups.groups.iter().enumerate() {
            let main = &bases[eligible[group.main]];
            for &m in &group.members {
                let u = eligible[m];
                let trace = &mut channel_traces[u];
                let (predicted, residual) = predict_and_residual(main, &coded[u].1, &trace.signal, max)?;
                trace.group = Some(g);
                trace.predicted = Some(predicted);
                trace.residual = Some(residual);
            }
        }
        report.times.residual += sw.lap(rt);

        for (unit, (levels, _)) in units.iter().zip(&coded) {
            for (k, &l) in levels.iter().enumerate() {
                encode_signed(&mut coeff_enc, &mut coeff_ctx, coefficient_bank(k, unit.components), l)?;
            }
        }
        write_groups(&mut group_enc, &mut group_ctx, &groups, cfg)?;
        for group in &groups.groups {
            for &m in &group.members {
                let residual = channel_traces[eligible[m]].residual.as_deref().expect("grouped unit has a residual");
                write_residual(&mut res_enc, &mut res_ctx, residual, cfg)?;
            }
        }
        report.times.entropy += sw.lap(rt);

        if c == 0 {
            report.threshold = groups.threshold;
        }
        report.pairs += groups.stats.pairs;
        report.pairs_under_threshold += groups.stats.pairs_under_threshold;
        report.one_level_groups += groups.stats.one_level_groups;
        report.groups += groups.groups.len();
        report.grouped += groups.grouped_count();
        traces.push(channel_traces);
    }

    let mut flags = 0;
    if cfg.grouping {
        flags |= FLAG_GROUPING;
    }
    if cfg.explicit_groups {
        flags |= FLAG_EXPLICIT_GROUPS;
    }
    if cfg.residual_mode == ResidualMode::Raw {
        flags |= FLAG_RAW_RESIDUALS;
    }
    let header = StreamHeader {
        flags,
        channels: channels.len() as u8,
        bit_depth: lf.bit_depth() as u8,
        rows,
        cols,
        width,
        height,
        q_gft: cfg.q_gft,
        q_dct: cfg.q_dct,
        bin_width: cfg.bin_width,
        n_target: cfg.n_target as u32,
        max_vertices: cfg.max_vertices as u32,
        q_switch: cfg.q_switch,
    };
    let bitstream = Bitstream {
        header,
        sections: [
            encode_labels(reference.reference(), geom.width, reference.label_count)?,
            encode_disparities(&quantized)?,
            encode_structure(&structure)?,
            coeff_enc.finish(),
            group_enc.finish(),
            res_enc.finish(),
        ],
    };
    report.times.entropy += sw.lap(rt);
    let t = &report.times;
    report.times.total = t.segmentation + t.structure + t.eigen + t.transform + t.grouping + t.residual + t.entropy;
    let n = channels.len();
    (report.coarsened_ratio, report.overall_ratio) = grouping_ratios(report.grouped, report.coarsened * n, report.total_sr * n);
    report.stream_bytes = bitstream.byte_len();
    report.bpp = bpp_for_bytes(report.stream_bytes, lf.samples_per_channel());
    Ok(EncodeOutput { bitstream, report, units: traces })
}

/// Step of GFT coefficient `k`: the zero frequencies use `min(q, 1)` so
/// that constant signals survive exactly.
pub(crate) fn coefficient_step(k: usize, zero_frequencies: usize, q_gft: f64) -> f64 {
    if k < zero_frequencies {
        q_gft.min(1.0)
    } else {
        q_gft
    }
}

/// Quantized levels and dequantized coefficients of one unit.
fn transform_unit(unit: &CodingUnit, basis: &EigenBasis, signal: &[i64], q_gft: f64) -> Result<(Vec<i64>, Vec<f64>)> {
    let f: Vec<f64> = signal.iter().map(|&v| v as f64).collect();
    let c = gft(basis, &f)?;
    let mut levels = Vec::with_capacity(c.len());
    let mut deq = Vec::with_capacity(c.len());
    for (k, &ck) in c.iter().enumerate() {
        let step = coefficient_step(k, unit.components, q_gft);
        let l = quantize_value(ck, step);
        levels.push(l);
        deq.push(l as f64 * step);
    }
    Ok((levels, deq))
}

fn write_groups(enc: &mut BinaryEncoder, ctx: &mut ContextSet, groups: &GroupSet, cfg: &CodecConfig) -> Result<()> {
    if !cfg.grouping {
        return Ok(());
    }
    encode_unsigned(enc, ctx, 0, groups.groups.len() as u64)?;
    for group in &groups.groups {
        if cfg.explicit_groups {
            encode_unsigned(enc, ctx, 1, group.members.len() as u64 - 2)?;
            let mut prev: Option<usize> = None;
            for &m in &group.members {
                let gap = match prev {
                    None => m,
                    Some(p) => m - p - 1,
                };
                encode_unsigned(enc, ctx, 2, gap as u64)?;
                prev = Some(m);
            }
        }
        let main = group.members.iter().position(|&m| m == group.main).expect("main is a member");
        encode_unsigned(enc, ctx, 3, main as u64)?;
    }
    Ok(())
}

fn write_residual(enc: &mut BinaryEncoder, ctx: &mut ContextSet, residual: &[i64], cfg: &CodecConfig) -> Result<()> {
    match cfg.residual_mode {
        ResidualMode::Raw => {
            for &r in residual {
                encode_signed(enc, ctx, 0, r)?;
            }
        }
        ResidualMode::Dct => {
            let x: Vec<f64> = residual.iter().map(|&v| v as f64).collect();
            let q = quantize(&dct1d(&x)?, cfg.q_dct)?;
            for (k, &l) in q.levels.iter().enumerate() {
                encode_signed(enc, ctx, dct_bank(k), l)?;
            }
        }
    }
    Ok(())
}

/// Quantized median disparity of every reference super-pixel.
fn label_disparities(reference: &SegmentationMap, dmap: &DisparityMap) -> Result<Vec<i32>> {
    let mut regions = vec![Vec::new(); reference.label_count];
    for (p, &l) in reference.reference().iter().enumerate() {
        regions[l as usize].push(p as u32);
    }
    regions.iter().map(|r| median_disparity(r, dmap).map(quantize_disparity)).collect()
}

pub(crate) fn project_all<R: Runtime + ?Sized>(
    rt: &R,
    reference: &[u32],
    disparities: &[f64],
    geom: &ViewGeometry,
    label_count: usize,
) -> SegmentationMap {
    let labels = rt.map(geom.views(), |v| {
        let (s, t) = geom.offset(v);
        project_view(reference, geom.width, geom.height, disparities, s, t)
    });
    SegmentationMap { width: geom.width, height: geom.height, label_count, labels }
}
