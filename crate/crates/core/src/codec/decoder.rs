use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::encoder::{coefficient_step, project_all};
use super::sections::{
    coefficient_bank, dct_bank, decode_disparities, decode_labels, decode_structure, SectionReader, LEVEL_BANKS,
};
use super::units::build_units;
use super::{DecodeReport, StageTimes};
use crate::bitstream::{Bitstream, Section, StreamHeader};
use crate::entropy::ContextSet;
use crate::error::{Error, Result};
use crate::grouping::{form_groups, predict, Grouping};
use crate::lightfield::{max_sample_for, LightField, View};
use crate::math::round_half_away;
use crate::runtime::{Runtime, Sequential, Stopwatch};
use crate::segmentation::{assemble_super_rays, dequantize_disparity};
use crate::spectral::{eigendecompose, laplacian, EigenBasis, ViewGeometry};
use crate::transform::{idct1d, igft};

/// How one coding unit of one channel was reconstructed.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitReconstruction {
    pub super_ray: usize,
    pub coarsened: bool,
    pub group: Option<usize>,
    /// Reconstruction before rounding: `U c` with the unit's own basis, or
    /// prediction plus decoded residual for grouped units.
    pub real: Vec<f64>,
    /// Final unit samples (coarse domain for coarsened units).
    pub samples: Vec<i64>,
}

#[derive(Debug, Clone)]
pub struct DecodeOutput {
    pub light_field: LightField,
    pub report: DecodeReport,
    /// `units[channel][unit]`.
    pub units: Vec<Vec<UnitReconstruction>>,
}

pub fn decode(bs: &Bitstream) -> Result<(LightField, DecodeReport)> {
    let out = decode_with(&Sequential, bs)?;
    Ok((out.light_field, out.report))
}

struct ChannelData {
    deq: Vec<Vec<f64>>,
    /// Group index of every eligible unit.
    membership: Vec<Option<usize>>,
    /// `(members, main)` in eligible-unit indices.
    groups: Vec<(Vec<usize>, usize)>,
}

pub fn decode_with<R: Runtime + ?Sized>(rt: &R, bs: &Bitstream) -> Result<DecodeOutput> {
    let h = &bs.header;
    check_header(h)?;
    let geom = ViewGeometry {
        width: usize::from(h.width),
        height: usize::from(h.height),
        rows: usize::from(h.rows),
        cols: usize::from(h.cols),
    };
    let max = i64::from(max_sample_for(u32::from(h.bit_depth)));
    let channels = usize::from(h.channels);
    let mut times = StageTimes::default();
    let mut sw = Stopwatch::start(rt);

    let (reference, label_count) = decode_labels(bs.section(Section::Segmentation), geom.width, geom.height)?;
    let quantized = decode_disparities(bs.section(Section::Disparity), label_count)?;
    let disparities: Vec<f64> = quantized.iter().map(|&q| dequantize_disparity(q)).collect();
    let seg = project_all(rt, &reference, &disparities, &geom, label_count);
    let rays = assemble_super_rays(&seg, &disparities).map_err(|e| match e {
        Error::OrphanLabel(l) => Error::corrupt("segmentation", format!("label {l} has no pixels")),
        other => other,
    })?;
    times.segmentation = sw.lap(rt);

    let structure = decode_structure(bs.section(Section::Structure), rays.len(), 2 * geom.width * geom.height)?;
    let units = build_units(rt, &rays, &structure, &geom, h.n_target as usize)?;
    let eligible: Vec<usize> = (0..units.len()).filter(|&u| units[u].coarsened).collect();
    times.structure = sw.lap(rt);

    let mut coeffs = SectionReader::new(bs.section(Section::Coefficients), "coefficient")?;
    let mut coeff_ctx = ContextSet::new(LEVEL_BANKS);
    let mut group_reader = if h.grouping() {
        Some(SectionReader::new(bs.section(Section::Groups), "group")?)
    } else {
        None
    };
    let mut group_ctx = ContextSet::new(4);
    let mut data = Vec::with_capacity(channels);
    for _ in 0..channels {
        let mut deq = Vec::with_capacity(units.len());
        for unit in &units {
            let mut c = Vec::with_capacity(unit.dim());
            for k in 0..unit.dim() {
                let level = coeffs.signed(&mut coeff_ctx, coefficient_bank(k, unit.components))?;
                c.push(level as f64 * coefficient_step(k, unit.components, h.q_gft));
            }
            deq.push(c);
        }
        times.entropy += sw.lap(rt);
        let groups = match group_reader.as_mut() {
            None => Vec::new(),
            Some(r) => {
                let eligible_coeffs: Vec<Vec<f64>> = eligible.iter().map(|&u| deq[u].clone()).collect();
                read_groups(rt, r, &mut group_ctx, h, &eligible_coeffs)?
            }
        };
        let mut membership = vec![None; eligible.len()];
        for (g, (members, _)) in groups.iter().enumerate() {
            for &m in members {
                membership[m] = Some(g);
            }
        }
        times.grouping += sw.lap(rt);
        data.push(ChannelData { deq, membership, groups });
    }

    let mut needed = vec![false; units.len()];
    let mut unit_group: Vec<Vec<Option<usize>>> = Vec::with_capacity(channels);
    for ch in &data {
        let mut per_unit = vec![None; units.len()];
        for (i, &u) in eligible.iter().enumerate() {
            per_unit[u] = ch.membership[i];
        }
        for (u, g) in per_unit.iter().enumerate() {
            match g {
                None => needed[u] = true,
                Some(g) => needed[eligible[ch.groups[*g].1]] = true,
            }
        }
        unit_group.push(per_unit);
    }
    let wanted: Vec<usize> = (0..units.len()).filter(|&u| needed[u]).collect();
    let computed = rt
        .map(wanted.len(), |i| eigendecompose(&laplacian(&units[wanted[i]].graph)))
        .into_iter()
        .collect::<Result<Vec<EigenBasis>>>()?;
    let mut bases: Vec<Option<EigenBasis>> = vec![None; units.len()];
    for (u, b) in wanted.iter().zip(computed) {
        bases[*u] = Some(b);
    }
    times.eigen = sw.lap(rt);

    let mut residuals = SectionReader::new(bs.section(Section::Residuals), "residual")?;
    let mut res_ctx = ContextSet::new(LEVEL_BANKS);
    let mut report = DecodeReport {
        channels,
        total_sr: units.len(),
        coarsened: eligible.len(),
        groups: 0,
        grouped: 0,
        ungrouped: 0,
        eig_count: wanted.len(),
        workers: rt.workers(),
        times,
    };
    let mut planes_out = Vec::with_capacity(channels);
    let mut recon = Vec::with_capacity(channels);
    for (ch, groups_of) in data.iter().zip(&unit_group) {
        // Residuals are stored group by group, members ascending.
        let mut residual_of: Vec<Option<Vec<f64>>> = vec![None; units.len()];
        for (members, _) in &ch.groups {
            for &m in members {
                let u = eligible[m];
                residual_of[u] = Some(read_residual(&mut residuals, &mut res_ctx, units[u].dim(), h)?);
            }
        }
        report.times.entropy += sw.lap(rt);

        let basis_of = |u: usize| -> &EigenBasis {
            let owner = match groups_of[u] {
                None => u,
                Some(g) => eligible[ch.groups[g].1],
            };
            bases[owner].as_ref().expect("basis decomposed")
        };
        let rec = rt
            .map(units.len(), |u| -> Result<UnitReconstruction> {
                let basis = basis_of(u);
                let (real, samples) = match &residual_of[u] {
                    None => {
                        let real = igft(basis, &ch.deq[u])?;
                        let samples = real.iter().map(|&v| crate::math::to_sample(v, max)).collect();
                        (real, samples)
                    }
                    Some(res) => {
                        let predicted = predict(basis, &ch.deq[u], max)?;
                        let real: Vec<f64> = predicted.iter().zip(res).map(|(&p, &r)| p as f64 + r).collect();
                        let samples = real.iter().map(|&v| crate::math::to_sample(v, max)).collect();
                        (real, samples)
                    }
                };
                Ok(UnitReconstruction {
                    super_ray: units[u].super_ray,
                    coarsened: units[u].coarsened,
                    group: groups_of[u],
                    real,
                    samples,
                })
            })
            .into_iter()
            .collect::<Result<Vec<UnitReconstruction>>>()?;
        let mut planes = vec![vec![0u16; geom.width * geom.height]; geom.views()];
        for (unit, r) in units.iter().zip(&rec) {
            unit.write(&r.samples, max, &mut planes);
        }
        report.times.transform += sw.lap(rt);

        report.groups += ch.groups.len();
        let grouped: usize = ch.groups.iter().map(|(m, _)| m.len()).sum();
        report.grouped += grouped;
        report.ungrouped += units.len() - grouped;
        planes_out.push(planes);
        recon.push(rec);
    }

    let views = (0..geom.views())
        .map(|v| View::new(geom.width, geom.height, planes_out.iter_mut().map(|p| core::mem::take(&mut p[v])).collect()))
        .collect::<Result<Vec<View>>>()?;
    let light_field = LightField::new(geom.rows, geom.cols, u32::from(h.bit_depth), views)?;
    let t = &report.times;
    report.times.total = t.segmentation + t.structure + t.eigen + t.transform + t.grouping + t.residual + t.entropy;
    Ok(DecodeOutput { light_field, report, units: recon })
}

fn check_header(h: &StreamHeader) -> Result<()> {
    let bad = |detail: &str| Err(Error::corrupt("header", detail));
    if !matches!(h.channels, 1 | 3) {
        return bad("channel count must be 1 or 3");
    }
    if !matches!(h.bit_depth, 8 | 10 | 16) {
        return bad("bit depth must be 8, 10 or 16");
    }
    if h.rows == 0 || h.cols == 0 || h.width == 0 || h.height == 0 {
        return bad("empty light field");
    }
    if ![h.q_gft, h.q_dct, h.bin_width].iter().all(|v| v.is_finite() && *v > 0.0) {
        return bad("quantizer steps and bin width must be positive");
    }
    if h.n_target == 0 || h.max_vertices == 0 {
        return bad("coarsening target and partition bound must be positive");
    }
    Ok(())
}

fn read_groups<R: Runtime + ?Sized>(
    rt: &R,
    r: &mut SectionReader<'_>,
    ctx: &mut ContextSet,
    h: &StreamHeader,
    coeffs: &[Vec<f64>],
) -> Result<Vec<(Vec<usize>, usize)>> {
    let m = coeffs.len();
    let count = r.index(ctx, 0, m / 2 + 1, "group count")?;
    let mut out = Vec::with_capacity(count);
    if h.explicit_groups() {
        for _ in 0..count {
            let size = r.index(ctx, 1, m - 1, "group size")? + 2;
            let mut members = Vec::with_capacity(size);
            let mut next = 0usize;
            for _ in 0..size {
                let idx = next + r.index(ctx, 2, m - next + 1, "member gap")?;
                if idx >= m {
                    return Err(r.fail("member index out of range"));
                }
                members.push(idx);
                next = idx + 1;
            }
            let main = members[r.index(ctx, 3, size, "main position")?];
            out.push((members, main));
        }
    } else {
        let Grouping { sets, .. } = form_groups(rt, coeffs, h.bin_width)?;
        if sets.len() != count {
            return Err(r.fail(format!("regrouping found {} groups, stream declares {count}", sets.len())));
        }
        for members in sets {
            let main = members[r.index(ctx, 3, members.len(), "main position")?];
            out.push((members, main));
        }
    }
    let mut seen = vec![false; m];
    for &i in out.iter().flat_map(|(members, _)| members) {
        if core::mem::replace(&mut seen[i], true) {
            return Err(r.fail("groups overlap"));
        }
    }
    Ok(out)
}

fn read_residual(r: &mut SectionReader<'_>, ctx: &mut ContextSet, n: usize, h: &StreamHeader) -> Result<Vec<f64>> {
    if h.raw_residuals() {
        return (0..n).map(|_| r.signed(ctx, 0).map(|v| v as f64)).collect();
    }
    let mut c = Vec::with_capacity(n);
    for k in 0..n {
        c.push(r.signed(ctx, dct_bank(k))? as f64 * h.q_dct);
    }
    Ok(idct1d(&c)?.into_iter().map(round_half_away).collect())
}
