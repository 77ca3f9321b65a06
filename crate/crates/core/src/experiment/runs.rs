//! One function per experiment: parameters in, checks and tables out.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{Check, CheckKind, Table};
use crate::bumps::{
    decompose_symbol, log_spaced, m_ell_check, partition_sum, rho_check, rho_lattice_sum, DecayFit, MEllSpec,
    PieceKind, RhoSpec, ShiftSpec,
};
use crate::dyadic::check_identities;
use crate::error::{Error, Result};
use crate::fit::{log_log_fit, relative_spread, relative_spread_complex};
use crate::forms::{
    counterexample_growth, counterexample_rhs, empirical_constant, lambda_direct, lambda_m_dense, lambda_m_tensor,
    CounterexampleData, DenseBudget, ExponentTuple, MuSymbol, PieceSum, ProbeSpec, PvLayout, PvQuadrature,
};
use crate::gen::random_bandlimited;
use crate::grid::GridFunction;
use crate::shifted::{growth_summary, shifted_maximal, shifted_norm_table, shifted_square, NormTableSpec, ShiftedKind, ShiftedOpSpec};
use crate::symbol::{
    bad_set_distance, count_threshold_functions, enumerate_sectors, mu_closed, mu_quadrature_batch, mu_slice,
    random_unit_point,
};

pub(super) type Outcome = (Vec<Check>, Vec<Table>, serde_json::Value);

use CheckKind::{Identity, Measured};

const STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

fn sub_seed(seed: u64, i: u64) -> u64 {
    seed.wrapping_add(STRIDE.wrapping_mul(i + 1))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SymbolCrossvalParams {
    pub dims: Vec<usize>,
    pub points: usize,
    pub min_distance: f64,
    pub mc_samples: usize,
    pub gl_nodes: usize,
    pub stderr_multiple: f64,
    pub coverage: f64,
    pub slice_tolerance: f64,
}

impl Default for SymbolCrossvalParams {
    fn default() -> Self {
        Self {
            dims: vec![2, 3, 4],
            points: 200,
            min_distance: 0.1,
            mc_samples: 1_000_000,
            gl_nodes: 256,
            stderr_multiple: 4.0,
            coverage: 0.95,
            slice_tolerance: 1e-6,
        }
    }
}

/// Unit points at least `min_distance` from every bad hyperplane.
fn generic_points(n: usize, count: usize, min_distance: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let p = random_unit_point(&mut rng, n);
        if bad_set_distance(&p) >= min_distance {
            out.push(p);
        }
    }
    out
}

pub(super) fn symbol_crossval(p: &SymbolCrossvalParams, seed: u64) -> Result<Outcome> {
    let mut checks = Vec::new();
    let mut table = Table::new("crossval", &["n", "point", "closed", "monte_carlo", "stderr", "slice", "distance"]);
    for &n in &p.dims {
        let pts = generic_points(n, p.points, p.min_distance, sub_seed(seed, n as u64));
        let mc = mu_quadrature_batch(&pts, p.mc_samples, sub_seed(seed, 100 + n as u64))?;
        let mut covered = 0usize;
        let mut slice_err: f64 = 0.0;
        for (i, (pt, est)) in pts.iter().zip(&mc).enumerate() {
            let closed = mu_closed(pt)?;
            let slice = mu_slice(pt, p.gl_nodes)?;
            let se = est.stderr.unwrap_or(0.0);
            if (closed - est.value).abs() <= p.stderr_multiple * se {
                covered += 1;
            }
            slice_err = slice_err.max((closed - slice).abs());
            table.push(vec![n as f64, i as f64, closed, est.value, se, slice, bad_set_distance(pt)]);
        }
        let fraction = covered as f64 / pts.len() as f64;
        checks.push(Check::at_least(format!("n={n} monte carlo within {} stderr", p.stderr_multiple), Measured, fraction, p.coverage));
        checks.push(Check::at_most(format!("n={n} slice quadrature error"), Measured, slice_err, p.slice_tolerance));
    }
    Ok((checks, vec![table], json!({})))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SymbolSymmetriesParams {
    pub dims: Vec<usize>,
    pub points: usize,
    pub tolerance: f64,
}

impl Default for SymbolSymmetriesParams {
    fn default() -> Self {
        Self { dims: vec![2, 3, 4], points: 1000, tolerance: 1e-13 }
    }
}

pub(super) fn symbol_symmetries(p: &SymbolSymmetriesParams, seed: u64) -> Result<Outcome> {
    let mut checks = Vec::new();
    let mut table = Table::new("symmetries", &["n", "homogeneity", "oddness", "permutation", "max_abs"]);
    for &n in &p.dims {
        let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, n as u64));
        let (mut hom, mut odd, mut perm, mut sup) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for _ in 0..p.points {
            let xi = random_unit_point(&mut rng, n);
            let m = mu_closed(&xi)?;
            let lambda = 10f64.powf(rng.gen_range(-2.0..2.0));
            let scaled: Vec<f64> = xi.iter().map(|x| x * lambda).collect();
            hom = hom.max((mu_closed(&scaled)? - m).abs());
            let neg: Vec<f64> = xi.iter().map(|x| -x).collect();
            odd = odd.max((mu_closed(&neg)? + m).abs());
            let mut shuffled = xi.clone();
            shuffled[..n - 1].shuffle(&mut rng);
            perm = perm.max((mu_closed(&shuffled)? - m).abs());
            sup = sup.max(m.abs());
        }
        table.push(vec![n as f64, hom, odd, perm, sup]);
        checks.push(Check::at_most(format!("n={n} homogeneity"), Identity, hom, p.tolerance));
        checks.push(Check::at_most(format!("n={n} oddness"), Identity, odd, p.tolerance));
        checks.push(Check::at_most(format!("n={n} permutation symmetry"), Identity, perm, p.tolerance));
        checks.push(Check::at_most(format!("n={n} bounded by one"), Identity, sup, 1.0 + p.tolerance));
    }
    Ok((checks, vec![table], json!({})))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SectorsParams {
    pub dims: Vec<usize>,
}

impl Default for SectorsParams {
    fn default() -> Self {
        Self { dims: vec![2, 3, 4] }
    }
}

fn known_sector_count(n: usize) -> Option<usize> {
    match n {
        2 => Some(4),
        3 => Some(14),
        4 => Some(104),
        _ => None,
    }
}

pub(super) fn sectors(p: &SectorsParams) -> Result<Outcome> {
    let mut checks = Vec::new();
    let mut table = Table::new("sectors", &["n", "sectors", "threshold_functions", "bound", "min_margin"]);
    for &n in &p.dims {
        let e = enumerate_sectors(n)?;
        let t = count_threshold_functions(n - 1)?;
        let bound = ((n - 1) * (n - 1)) as f64;
        let bound = bound.exp2();
        let margin = e.sectors.iter().map(|s| s.margin).fold(f64::INFINITY, f64::min);
        table.push(vec![n as f64, e.count as f64, t as f64, bound, margin]);
        if let Some(want) = known_sector_count(n) {
            checks.push(Check::equals(format!("n={n} sector count"), Identity, e.count as f64, want as f64));
        }
        checks.push(Check::equals(format!("n={n} sectors equal threshold functions"), Identity, e.count as f64, t as f64));
        checks.push(Check::at_most(format!("n={n} count within 2^((n-1)^2)"), Identity, e.count as f64, bound));
    }
    Ok((checks, vec![table], json!({})))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PartitionParams {
    pub dims: Vec<usize>,
    pub points: usize,
    pub r_min: f64,
    pub r_max: f64,
    pub l0: u32,
    pub tolerance: f64,
}

impl Default for PartitionParams {
    fn default() -> Self {
        Self { dims: vec![2, 3], points: 10_000, r_min: 1.0, r_max: 4.0, l0: 4, tolerance: 1e-10 }
    }
}

pub(super) fn partition(p: &PartitionParams, seed: u64) -> Result<Outcome> {
    let mut checks = Vec::new();
    let mut table = Table::new("pieces", &["n", "pieces", "case2_pieces", "min_case2_distance", "max_partition_error"]);
    for &n in &p.dims {
        let pieces = decompose_symbol(n, p.l0)?;
        let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, n as u64));
        let mut err: f64 = 0.0;
        for _ in 0..p.points {
            let r = rng.gen_range(p.r_min..=p.r_max);
            let xi: Vec<f64> = random_unit_point(&mut rng, n).into_iter().map(|x| x * r).collect();
            err = err.max((partition_sum(&pieces, &xi) - 1.0).abs());
        }
        let case2: Vec<f64> = pieces
            .iter()
            .filter(|q| matches!(q.kind, PieceKind::PsiPhi { case: 2 }))
            .map(|q| q.certificate.as_ref().map_or(0.0, |c| c.min_distance))
            .collect();
        let min_d = case2.iter().copied().fold(f64::INFINITY, f64::min);
        table.push(vec![n as f64, pieces.len() as f64, case2.len() as f64, min_d, err]);
        checks.push(Check::at_most(format!("n={n} partition of unity"), Identity, err, p.tolerance));
        checks.push(Check::at_least(format!("n={n} case-2 pieces present"), Identity, case2.len() as f64, 1.0));
        checks.push(Check::positive(format!("n={n} case-2 support off the bad set"), Identity, min_d));
    }
    Ok((checks, vec![table], json!({})))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecayParams {
    pub v_range: (f64, f64),
    pub u_range: (f64, f64),
    pub samples: usize,
    pub ell: u32,
    pub rho_slope_max: f64,
    pub mell_v_slope_max: f64,
    pub mell_u_slope_max: f64,
    /// Lattice spacings for the integrability proxy; empty skips it.
    pub lattice_deltas: Vec<f64>,
    pub lattice_radius: f64,
    pub lattice_change_max: f64,
}

impl Default for DecayParams {
    fn default() -> Self {
        Self {
            v_range: (8.0, 128.0),
            u_range: (8.0, 128.0),
            samples: 9,
            ell: 5,
            rho_slope_max: -1.75,
            mell_v_slope_max: -1.75,
            mell_u_slope_max: -4.0,
            lattice_deltas: vec![0.125, 0.0625, 0.03125],
            lattice_radius: 8.0,
            lattice_change_max: 0.05,
        }
    }
}

pub(super) fn decay(p: &DecayParams) -> Result<Outcome> {
    let rho = RhoSpec::default();
    let mell = MEllSpec::default();
    let vs = log_spaced(p.v_range.0, p.v_range.1, p.samples);
    let us = log_spaced(p.u_range.0, p.u_range.1, p.samples);
    let mut table = Table::new("decay", &["series", "x", "abs_value", "error_estimate"]);
    let mut rho_pts = Vec::new();
    for &v in &vs {
        let r = rho_check(0.0, v, &rho)?;
        rho_pts.push((v, r.value.norm()));
        table.push(vec![0.0, v, r.value.norm(), r.error_estimate]);
    }
    let mut mv = Vec::new();
    for &v in &vs {
        let m = m_ell_check(p.ell, 0.0, v, &mell)?.norm();
        mv.push((v, m));
        table.push(vec![1.0, v, m, 0.0]);
    }
    let mut mu = Vec::new();
    for &u in &us {
        let m = m_ell_check(p.ell, u, 0.0, &mell)?.norm();
        mu.push((u, m));
        table.push(vec![2.0, u, m, 0.0]);
    }
    let rho_fit = DecayFit::from_samples(rho_pts);
    let v_fit = DecayFit::from_samples(mv);
    let u_fit = DecayFit::from_samples(mu);
    let mut ratio_err: f64 = 0.0;
    for &(u, v) in &[(0.0, 8.0), (8.0, 0.0), (3.0, 5.0), (16.0, 16.0)] {
        let a = m_ell_check(p.ell, u, v, &mell)?.norm();
        let b = m_ell_check(p.ell + 1, u, v, &mell)?.norm();
        ratio_err = ratio_err.max((b / a - 0.5).abs());
    }
    let mut checks = vec![
        Check::at_most("rho v-slope", Measured, rho_fit.fit.slope, p.rho_slope_max),
        Check::at_most("m_ell ell-ratio minus one half", Identity, ratio_err, 1e-14),
        Check::at_most("m_ell v-slope", Measured, v_fit.fit.slope, p.mell_v_slope_max),
        Check::at_most("m_ell u-slope", Measured, u_fit.fit.slope, p.mell_u_slope_max),
    ];
    let mut lattice = Table::new("rho_lattice", &["delta", "sum"]);
    let mut sums = Vec::new();
    for &d in &p.lattice_deltas {
        let s = rho_lattice_sum(p.lattice_radius, d, &rho)?;
        lattice.push(vec![d, s]);
        sums.push(s);
    }
    if sums.len() >= 2 {
        let change = sums.windows(2).map(|w| (w[1] - w[0]).abs() / w[0].abs()).fold(0.0, f64::max);
        checks.push(Check::at_most("rho lattice sum relative change", Measured, change, p.lattice_change_max));
    }
    let data = json!({ "rho_fit": rho_fit.fit, "m_ell_v_fit": v_fit.fit, "m_ell_u_fit": u_fit.fit });
    Ok((checks, vec![table, lattice], data))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimeFrequencyParams {
    pub size: usize,
    pub period: f64,
    pub cutoff: usize,
    pub tuples: usize,
    pub pv: PvQuadrature,
    pub spread_max: f64,
    pub modulus_tolerance: f64,
    pub tensor_size: usize,
    pub tensor_dims: Vec<usize>,
    pub tensor_l0: u32,
    pub tensor_tolerance: f64,
}

impl Default for TimeFrequencyParams {
    fn default() -> Self {
        Self {
            size: 32,
            period: 1.0,
            cutoff: 4,
            tuples: 20,
            pv: PvQuadrature {
                eps: 2f64.powi(-20),
                t_max: 16.0,
                layout: PvLayout::Hybrid { log_count: 64, split: 0.5, linear_panels: 64, per_panel: 8 },
                alpha_nodes: 32,
            },
            spread_max: 0.05,
            modulus_tolerance: 0.10,
            tensor_size: 8,
            tensor_dims: vec![2, 3],
            tensor_l0: 2,
            tensor_tolerance: 1e-8,
        }
    }
}

fn random_tuple(sizes: &[usize], period: f64, cutoff: usize, count: usize, seed: u64) -> Result<Vec<GridFunction>> {
    (0..count).map(|j| random_bandlimited(sizes, period, cutoff, sub_seed(seed, j as u64), false)).collect()
}

pub(super) fn time_frequency(p: &TimeFrequencyParams, seed: u64) -> Result<Outcome> {
    p.pv.validate()?;
    let mut table = Table::new("kappa", &["tuple", "direct_re", "direct_im", "dense_re", "dense_im", "kappa_re", "kappa_im", "direct_error"]);
    let mut kappas = Vec::new();
    for t in 0..p.tuples {
        let f = random_tuple(&[p.size, p.size], p.period, p.cutoff, 3, sub_seed(seed, t as u64))?;
        let d = lambda_direct(&f, &p.pv)?;
        let s = lambda_m_dense(&MuSymbol, &f, &DenseBudget::default_for(2))?;
        let k = d.value / s.value;
        kappas.push(k);
        table.push(vec![t as f64, d.value.re, d.value.im, s.value.re, s.value.im, k.re, k.im, d.error_estimate]);
    }
    let mean: Complex64 = kappas.iter().sum::<Complex64>() / kappas.len() as f64;
    let spread = relative_spread_complex(&kappas);
    let modulus_err = (mean.norm() - PI).abs() / PI;
    let mut checks = vec![
        Check::at_most("kappa relative spread", Measured, spread, p.spread_max),
        Check::at_most("kappa modulus relative to pi", Measured, modulus_err, p.modulus_tolerance),
    ];
    let mut tensor = Table::new("tensor", &["n", "tensor_re", "tensor_im", "dense_re", "dense_im", "relative_error"]);
    for &n in &p.tensor_dims {
        let sizes = vec![p.tensor_size; n];
        let f = random_tuple(&sizes, p.period, p.tensor_size / 2 - 1, n + 1, sub_seed(seed, 1000 + n as u64))?;
        let shift = ShiftSpec { u: 0.3, v: -1.7, alpha_tail: vec![0.4; n - 2] };
        let pieces: Vec<_> = decompose_symbol(n, p.tensor_l0)?
            .into_iter()
            .map(|q| q.with_shifts(&shift))
            .collect::<Result<_>>()?;
        let tv = lambda_m_tensor(&pieces, &f, None, None)?.value;
        let dv = lambda_m_dense(&PieceSum(pieces), &f, &DenseBudget::default_for(n))?.value;
        let rel = (tv - dv).norm() / dv.norm();
        tensor.push(vec![n as f64, tv.re, tv.im, dv.re, dv.im, rel]);
        checks.push(Check::at_most(format!("n={n} tensor equals dense"), Identity, rel, p.tensor_tolerance));
    }
    let data = json!({ "kappa_mean": [mean.re, mean.im], "kappa_spread": spread });
    Ok((checks, vec![table, tensor], data))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CounterexampleParams {
    pub n: usize,
    pub j0: usize,
    pub sizes: Vec<u64>,
    pub spread_max: f64,
    pub slope_tolerance: f64,
    pub r_squared_min: f64,
}

impl Default for CounterexampleParams {
    fn default() -> Self {
        Self { n: 2, j0: 2, sizes: vec![16, 32, 64, 128, 256], spread_max: 0.10, slope_tolerance: 0.05, r_squared_min: 0.99 }
    }
}

pub(super) fn counterexample(p: &CounterexampleParams) -> Result<Outcome> {
    let rows = counterexample_growth(p.n, p.j0, &p.sizes)?;
    let mut table = Table::new("growth", &["N", "value", "N^(n-1)logN", "ratio"]);
    for r in &rows {
        table.push(vec![r.big_n as f64, r.value, r.reference, r.ratio]);
    }
    let ratios: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
    let fit = log_log_fit(
        &rows.iter().map(|r| r.reference).collect::<Vec<_>>(),
        &rows.iter().map(|r| r.value).collect::<Vec<_>>(),
    );
    let mut exps = vec![1.0];
    exps.extend(std::iter::repeat_n(f64::INFINITY, p.n));
    let exps = ExponentTuple::new(exps)?;
    let mut rhs_err: f64 = 0.0;
    for &big_n in &p.sizes {
        let data = CounterexampleData::new(p.n, p.j0, big_n, None)?;
        rhs_err = rhs_err.max((counterexample_rhs(&data, &exps)? - (big_n as f64).powi(p.n as i32 - 1)).abs());
    }
    let checks = vec![
        Check::at_most("ratio to N^(n-1) log N relative spread", Measured, relative_spread(&ratios), p.spread_max),
        Check::within("log-log slope", Measured, fit.slope, 1.0 - p.slope_tolerance, 1.0 + p.slope_tolerance),
        Check::at_least("log-log r squared", Measured, fit.r_squared, p.r_squared_min),
        Check::equals("right-hand side minus N^(n-1)", Identity, rhs_err, 0.0),
    ];
    Ok((checks, vec![table], json!({ "fit": fit })))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DyadicParams {
    pub levels: u32,
    pub trials: usize,
}

impl Default for DyadicParams {
    fn default() -> Self {
        Self { levels: 6, trials: 100 }
    }
}

pub(super) fn dyadic(p: &DyadicParams, seed: u64) -> Result<Outcome> {
    let results = check_identities(p.levels, p.trials, seed)?;
    let checks = results
        .iter()
        .map(|c| Check::at_most(c.name, Identity, c.max_error, c.tolerance))
        .collect();
    Ok((checks, vec![], json!({})))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ShiftedParams {
    pub u: Vec<f64>,
    pub p: f64,
    pub trials: usize,
    pub size: usize,
    pub period: f64,
    pub scales: Option<(i32, i32)>,
    pub exponent_max: f64,
    pub excess_max: f64,
}

impl Default for ShiftedParams {
    fn default() -> Self {
        Self {
            u: vec![0.0, 4.0, 16.0, 64.0, 256.0],
            p: 2.0,
            trials: 16,
            size: 65536,
            period: 65536.0,
            scales: Some((-6, -2)),
            exponent_max: 0.1,
            excess_max: 0.25,
        }
    }
}

pub(super) fn shifted(p: &ShiftedParams, seed: u64) -> Result<Outcome> {
    let mut checks = Vec::new();
    let mut tables = Vec::new();
    let (k_min, k_max) = p.scales.unwrap_or_else(|| crate::shifted::resolvable_scales(p.size, p.period));
    let one = GridFunction::constant(vec![p.size], p.period, Complex64::new(1.0, 0.0))?;
    let (mut fixed, mut killed) = (0.0f64, 0.0f64);
    for &u in &p.u {
        let m = shifted_maximal(&one, &ShiftedOpSpec::new(crate::bumps::build_chi(), u, k_min, k_max)?)?;
        fixed = fixed.max(m.values().iter().map(|v| (v - 1.0).norm()).fold(0.0, f64::max));
        let s = shifted_square(&one, &ShiftedOpSpec::new(crate::bumps::build_psi(), u, k_min, k_max)?)?;
        killed = killed.max(s.values().iter().map(|v| v.norm()).fold(0.0, f64::max));
    }
    checks.push(Check::at_most("maximal function fixes constants", Identity, fixed, 1e-12));
    checks.push(Check::at_most("square function kills constants", Identity, killed, 1e-12));

    let mut data = serde_json::Map::new();
    for kind in [ShiftedKind::Max, ShiftedKind::Square] {
        let spec = NormTableSpec {
            kind,
            u: p.u.clone(),
            p: p.p,
            trials: p.trials,
            seed,
            size: p.size,
            period: p.period,
            scales: Some((k_min, k_max)),
        };
        let name = match kind {
            ShiftedKind::Max => "max",
            ShiftedKind::Square => "square",
        };
        if kind == ShiftedKind::Square && p.p == 2.0 && p.u.contains(&0.0) {
            let worst = (0..p.trials)
                .map(|t| spec.trial_ratio(0.0, t))
                .collect::<Result<Vec<f64>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            checks.push(Check::at_most("square function plancherel bound at u=0", Identity, worst, 1.0 + 1e-12));
        }
        let rows = shifted_norm_table(&spec)?;
        let mut table = Table::new(&format!("shifted_{name}"), &["u", "norm", "norm/log(2+u)"]);
        for r in &rows {
            table.push(vec![r.u, r.norm, r.ratio]);
        }
        tables.push(table);
        let g = growth_summary(&rows)?;
        checks.push(Check::at_most(format!("{name} growth exponent"), Measured, g.exponent.slope, p.exponent_max));
        checks.push(Check::at_most(format!("{name} excess over c log(2+u)"), Measured, g.max_excess, p.excess_max));
        data.insert(name.into(), serde_json::to_value(&g)?);
    }
    Ok((checks, tables, serde_json::Value::Object(data)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProbeParams {
    pub spec: ProbeSpec,
    pub exponents: ExponentTuple,
    pub trials: usize,
}

impl Default for ProbeParams {
    fn default() -> Self {
        Self {
            spec: ProbeSpec {
                evaluator: crate::forms::ProbeEvaluator::Dense,
                n: 2,
                size: 16,
                period: 1.0,
                cutoff: 4,
                pv: None,
            },
            exponents: ExponentTuple::new(vec![3.0, 3.0, 3.0]).expect("Hölder tuple"),
            trials: 16,
        }
    }
}

pub(super) fn probe(p: &ProbeParams, seed: u64) -> Result<Outcome> {
    if p.exponents.exponents().len() != p.spec.n + 1 {
        return Err(Error::Config(format!("need {} exponents for n = {}", p.spec.n + 1, p.spec.n)));
    }
    let stats = empirical_constant(&p.spec, &p.exponents, p.trials, seed)?;
    let mut table = Table::new("ratios", &["trial", "ratio"]);
    for (i, r) in stats.ratios.iter().enumerate() {
        table.push(vec![i as f64, *r]);
    }
    let mut f = p.spec.trial_inputs(stats.argmax, seed)?;
    f[1] = f[1].scale(Complex64::new(10.0, 0.0));
    let rescaled = p.spec.ratio(&f, &p.exponents)?;
    let checks = vec![Check::at_most(
        "ratio invariant under rescaling",
        Identity,
        (rescaled - stats.max).abs() / stats.max,
        1e-10,
    )];
    Ok((checks, vec![table], json!({ "max": stats.max, "argmax": stats.argmax, "mean": stats.mean, "median": stats.median })))
}
