//! Finite-truncation checks of the frame-theoretic machinery: besselian sums,
//! the scaled paire, the `𝒜` / `𝒜̃` norms, unconditionality probes and the
//! Gram projection matrix `M_{i,j} = A_i(φ_j)`.
//!
//! Nothing here asserts unconditional convergence or finiteness of a frame
//! constant; probes produce evidence tables only.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::CorpusFunction;
use crate::dyadic::{DyadicGrid, DyadicRational, PiecewiseLinearFn, MAX_LEVEL};
use crate::error::{FrameError, Result};
use crate::frame::{
    checked_eval, elements_nonzero_at, index_level, synthesize, CoefficientSequence, Evaluable,
    FrameIndex, FrameSystem, PointMassFunctional, SupNormTracker,
};

/// An element of `C[0,1]*` given by point masses; its norm is the total mass.
pub type FunctionalSample = PointMassFunctional;

/// Largest scaled-paire truncation; beyond it `2^{−n/2}` underflows.
pub const MAX_SCALED_TERMS: usize = 2048;

/// Tolerance of the Gram idempotence check.
pub const PROJECTION_TOLERANCE: f64 = 1e-10;

/// Extra grid levels used when a black-box function's sup-norm is sampled.
pub const SUP_SAMPLING_EXTRA_LEVELS: u32 = 4;

/// Grid level on which black-box sup-norms are sampled for an `N`-term
/// truncation. Every atom of `A_1..A_N` lies on this grid.
pub fn sampling_level(terms: usize) -> u32 {
    (index_level(terms) + SUP_SAMPLING_EXTRA_LEVELS).min(MAX_LEVEL)
}

/// `max |x|` over `J_level` (a lower estimate of `‖x‖_∞`).
pub fn sampled_sup_norm<E: Evaluable + ?Sized>(x: &E, level: u32) -> Result<f64> {
    let grid = DyadicGrid::new(level)?;
    (0..grid.len()).try_fold(0.0f64, |acc, i| {
        Ok(acc.max(checked_eval(x, grid.abscissa(i))?.abs()))
    })
}

/// `f(φ_n)`, exact.
fn apply_to_element(system: &FrameSystem, f: &FunctionalSample, n: usize) -> f64 {
    f.atoms()
        .iter()
        .map(|(p, w)| w * system.element_value_at(n, p))
        .sum()
}

/// `Σ_{n ≤ N} |A_n(x)| · |f(φ_n)|`.
pub fn besselian_sum<E: Evaluable + ?Sized>(
    system: &FrameSystem,
    x: &E,
    f: &FunctionalSample,
    terms: usize,
) -> Result<f64> {
    let coeffs = system.analyze(x, terms)?;
    Ok(coeffs
        .entries()
        .iter()
        .map(|c| c.value.abs() * apply_to_element(system, f, c.index.n()).abs())
        .sum())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BesselRow {
    pub x: String,
    pub f: String,
    pub sum: f64,
    pub bound: f64,
    pub ratio: f64,
}

/// Empirical `L_F` estimate over finite corpora.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BesselReport {
    pub pairs: Vec<BesselRow>,
    pub max_ratio: f64,
}

impl BesselReport {
    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        for row in &self.pairs {
            out.serialize(row)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Max over pairs of `besselian_sum / (‖x‖ ‖f‖)`. Rows with a zero bound are
/// skipped with a warning; rows come out sorted by descending ratio.
pub fn estimate_bessel_constant(
    system: &FrameSystem,
    xs: &[CorpusFunction],
    fs: &[(String, FunctionalSample)],
    terms: usize,
) -> Result<BesselReport> {
    if xs.is_empty() || fs.is_empty() {
        return Err(FrameError::Precondition(
            "both corpora must be non-empty".into(),
        ));
    }
    system.check_capacity(terms)?;
    let level = sampling_level(terms);
    let mut pairs = Vec::new();
    for x in xs {
        let x_norm = sampled_sup_norm(x, level)?;
        let coeffs = system.analyze(x, terms)?;
        for (f_id, f) in fs {
            let bound = x_norm * f.norm();
            if bound == 0.0 {
                log::warn!("skipping pair ({}, {f_id}): zero norm", x.id());
                continue;
            }
            let sum: f64 = coeffs
                .entries()
                .iter()
                .map(|c| c.value.abs() * apply_to_element(system, f, c.index.n()).abs())
                .sum();
            pairs.push(BesselRow {
                x: x.id().to_string(),
                f: f_id.clone(),
                sum,
                bound,
                ratio: sum / bound,
            });
        }
    }
    pairs.sort_by(|a, b| b.ratio.total_cmp(&a.ratio));
    let max_ratio = pairs.first().map_or(0.0, |r| r.ratio);
    Ok(BesselReport { pairs, max_ratio })
}

/// A random functional with `1..=max_atoms` atoms on `J_level` and total mass 1.
pub fn random_functional(
    rng: &mut impl Rng,
    max_atoms: usize,
    level: u32,
) -> Result<FunctionalSample> {
    let grid = DyadicGrid::new(level)?;
    let count = rng.gen_range(1..=max_atoms.max(1));
    let terms: Vec<(DyadicRational, f64)> = (0..count)
        .map(|_| {
            (
                grid.point(rng.gen_range(0..grid.len())),
                rng.gen_range(-1.0..=1.0),
            )
        })
        .collect();
    let f = PointMassFunctional::from_terms(terms);
    let mass = f.norm();
    if mass == 0.0 {
        return Ok(PointMassFunctional::point_mass(grid.point(0)));
    }
    Ok(f.scaled(1.0 / mass))
}

/// `y_n = φ_n / (√2^n ‖φ_n‖)` and `g_n = A_n / (√2^n ‖A_n‖)`.
#[derive(Clone, Debug)]
pub struct ScaledPaire {
    elements: Vec<PiecewiseLinearFn>,
    functionals: Vec<PointMassFunctional>,
}

/// Rescales the first `N` pairs so that `Σ |g_n(x)| |f(y_n)| ≤ ‖x‖ ‖f‖`.
pub fn scaled_paire(system: &FrameSystem, terms: usize) -> Result<ScaledPaire> {
    system.check_capacity(terms)?;
    if terms > MAX_SCALED_TERMS {
        return Err(FrameError::Capacity(format!(
            "scaled paire supports at most {MAX_SCALED_TERMS} terms"
        )));
    }
    let mut elements = Vec::with_capacity(terms);
    let mut functionals = Vec::with_capacity(terms);
    for n in 1..=terms {
        let a = system.functional(n)?;
        if a.is_zero() {
            return Err(FrameError::ZeroFunctional(n));
        }
        let phi = system.element(n)?;
        let weight = (-(n as f64) / 2.0).exp2();
        let phi_scale = weight / phi.sup_norm();
        elements.push(PiecewiseLinearFn::new(
            phi.grid_level(),
            phi.values().iter().map(|v| v * phi_scale).collect(),
        )?);
        functionals.push(a.scaled(weight / a.norm()));
    }
    Ok(ScaledPaire {
        elements,
        functionals,
    })
}

impl ScaledPaire {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element(&self, n: usize) -> &PiecewiseLinearFn {
        &self.elements[n - 1]
    }

    pub fn functional(&self, n: usize) -> &PointMassFunctional {
        &self.functionals[n - 1]
    }

    /// `Σ_n |g_n(x)| · |f(y_n)|`.
    pub fn besselian_sum<E: Evaluable + ?Sized>(&self, x: &E, f: &FunctionalSample) -> Result<f64> {
        self.elements
            .iter()
            .zip(&self.functionals)
            .try_fold(0.0, |acc, (y, g)| {
                Ok(acc + g.apply(x)?.abs() * f.apply_pl(y).abs())
            })
    }
}

/// Sup over prefixes of `‖Σ_{k ≤ n} c_{σ(k)} s_{σ(k)} φ_{σ(k)}‖_∞`, with the
/// prefix length attaining it. `order` lists 1-based indices.
fn prefix_sup(
    coeffs: &CoefficientSequence,
    order: &[usize],
    signs: Option<&[bool]>,
) -> (f64, usize) {
    let mut tracker = SupNormTracker::new(coeffs.level()).expect("coefficient level is valid");
    let entries = coeffs.entries();
    let (mut best, mut at) = (0.0, 0);
    for (step, &n) in order.iter().enumerate() {
        let c = entries[n - 1];
        let sign = match signs {
            Some(s) if !s[n - 1] => -1.0,
            _ => 1.0,
        };
        tracker.add_term(c.index, sign * c.value);
        if tracker.norm() > best {
            best = tracker.norm();
            at = step + 1;
        }
    }
    (best, at)
}

/// Truncated `𝒜` norm: `max_{n ≤ N} ‖S_n‖_∞`.
pub fn a_norm(coeffs: &CoefficientSequence) -> f64 {
    let order: Vec<usize> = (1..=coeffs.len()).collect();
    prefix_sup(coeffs, &order, None).0
}

/// Prefix sup under an explicit ordering of the indices.
pub fn permuted_prefix_sup(coeffs: &CoefficientSequence, order: &[usize]) -> Result<f64> {
    let mut seen = vec![false; coeffs.len()];
    for &n in order {
        if n == 0 || n > coeffs.len() || std::mem::replace(&mut seen[n - 1], true) {
            return Err(FrameError::InvalidArgument(format!(
                "order is not a permutation (at {n})"
            )));
        }
    }
    Ok(prefix_sup(coeffs, order, None).0)
}

/// Prefix sup of `Σ s_n c_n φ_n` (`true` = `+1`).
pub fn signed_prefix_sup(coeffs: &CoefficientSequence, signs: &[bool]) -> Result<f64> {
    if signs.len() != coeffs.len() {
        return Err(FrameError::InvalidArgument(
            "one sign per coefficient required".into(),
        ));
    }
    let order: Vec<usize> = (1..=coeffs.len()).collect();
    Ok(prefix_sup(coeffs, &order, Some(signs)).0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProbeKind {
    Permutation,
    Sign,
    Tail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    /// Leading indices of the permutation, sign counts, or the subset size.
    pub summary: String,
    /// Prefix length (or subset size) at which the norm was attained.
    pub n: usize,
    pub norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnconditionalityReport {
    pub probe: ProbeKind,
    pub seed: u64,
    pub trials: usize,
    pub observed_sup: f64,
    pub tail_sups: BTreeMap<usize, f64>,
    pub records: Vec<TrialRecord>,
}

impl UnconditionalityReport {
    pub fn write_csv_rows<W: std::io::Write>(&self, out: &mut csv::Writer<W>) -> csv::Result<()> {
        let probe = serde_json::to_value(self.probe)
            .ok()
            .and_then(|v| v.as_str().map(str::to_string))
            .unwrap_or_default();
        for r in &self.records {
            out.write_record([
                probe.clone(),
                r.trial.to_string(),
                r.n.to_string(),
                r.norm.to_string(),
            ])?;
        }
        Ok(())
    }
}

/// Generator for trial `trial` of a probe seeded with `seed`; independent of
/// how many trials run or in which order.
fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn summarize_order(order: &[usize]) -> String {
    let head: Vec<String> = order.iter().take(8).map(|n| n.to_string()).collect();
    if order.len() > 8 {
        format!("{} ...", head.join(" "))
    } else {
        head.join(" ")
    }
}

fn finish(
    probe: ProbeKind,
    seed: u64,
    mut records: Vec<TrialRecord>,
    tail_sups: BTreeMap<usize, f64>,
) -> UnconditionalityReport {
    records.sort_by_key(|r| r.trial);
    let observed_sup = records.iter().fold(0.0f64, |acc, r| acc.max(r.norm));
    UnconditionalityReport {
        probe,
        seed,
        trials: records.len(),
        observed_sup,
        tail_sups,
        records,
    }
}

/// Randomized lower estimate of the `𝒜̃` norm. Trial 0 is the identity
/// order; the others are Fisher–Yates shuffles.
pub fn permutation_probe(
    coeffs: &CoefficientSequence,
    trials: usize,
    seed: u64,
) -> Result<UnconditionalityReport> {
    if trials == 0 {
        return Err(FrameError::Precondition(
            "at least one trial is required".into(),
        ));
    }
    let records = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut order: Vec<usize> = (1..=coeffs.len()).collect();
            if trial > 0 {
                order.shuffle(&mut trial_rng(seed, trial as u64));
            }
            let (norm, n) = prefix_sup(coeffs, &order, None);
            TrialRecord {
                trial,
                summary: if trial == 0 {
                    "identity".into()
                } else {
                    summarize_order(&order)
                },
                n,
                norm,
            }
        })
        .collect();
    Ok(finish(
        ProbeKind::Permutation,
        seed,
        records,
        BTreeMap::new(),
    ))
}

pub fn a_tilde_norm(coeffs: &CoefficientSequence, trials: usize, seed: u64) -> Result<f64> {
    Ok(permutation_probe(coeffs, trials, seed)?.observed_sup)
}

/// Prefix norms under random sign flips. Trial 0 is all-plus.
pub fn sign_probe(
    coeffs: &CoefficientSequence,
    trials: usize,
    seed: u64,
) -> Result<UnconditionalityReport> {
    if trials == 0 {
        return Err(FrameError::Precondition(
            "at least one trial is required".into(),
        ));
    }
    let order: Vec<usize> = (1..=coeffs.len()).collect();
    let records = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let signs: Vec<bool> = if trial == 0 {
                vec![true; coeffs.len()]
            } else {
                let mut rng = trial_rng(seed, trial as u64);
                (0..coeffs.len()).map(|_| rng.gen::<bool>()).collect()
            };
            let (norm, n) = prefix_sup(coeffs, &order, Some(&signs));
            let minus = signs.iter().filter(|s| !**s).count();
            TrialRecord {
                trial,
                summary: format!("{minus} of {} negated", signs.len()),
                n,
                norm,
            }
        })
        .collect();
    Ok(finish(ProbeKind::Sign, seed, records, BTreeMap::new()))
}

fn subset_norm(coeffs: &CoefficientSequence, subset: &[usize]) -> f64 {
    let mut values = vec![0.0; coeffs.len()];
    for &n in subset {
        values[n - 1] = coeffs.get(n).unwrap_or(0.0);
    }
    let sum = synthesize(&CoefficientSequence::from_values(values).expect("indices are valid"))
        .expect("coefficient level is valid");
    sum.sup_norm()
}

/// Sup of `‖Σ_{n ∈ A} c_n φ_n‖_∞` over finite `A ⊂ {k, …, N}`, per cutoff `k`.
///
/// Small tails are enumerated exhaustively; otherwise subset 0 is the whole
/// tail and the rest keep each index with probability 1/2.
pub fn tail_probe(
    coeffs: &CoefficientSequence,
    cutoffs: &[usize],
    subsets_per_cutoff: usize,
    seed: u64,
) -> Result<UnconditionalityReport> {
    if subsets_per_cutoff == 0 {
        return Err(FrameError::Precondition(
            "at least one subset per cutoff is required".into(),
        ));
    }
    let total = coeffs.len();
    for &k in cutoffs {
        if k == 0 || k > total {
            return Err(FrameError::Precondition(format!(
                "cutoff {k} outside 1..={total}"
            )));
        }
    }
    let per_cutoff: Vec<(usize, TrialRecord)> = cutoffs
        .par_iter()
        .enumerate()
        .map(|(slot, &k)| {
            let tail: Vec<usize> = (k..=total).collect();
            let exhaustive = tail.len() < usize::BITS as usize
                && (1usize << tail.len()) - 1 <= subsets_per_cutoff;
            let subsets: Vec<Vec<usize>> = if exhaustive {
                (1..(1usize << tail.len()))
                    .map(|mask| {
                        tail.iter()
                            .enumerate()
                            .filter(|(bit, _)| mask >> bit & 1 == 1)
                            .map(|(_, &n)| n)
                            .collect()
                    })
                    .collect()
            } else {
                let mut out = vec![tail.clone()];
                for sample in 1..subsets_per_cutoff {
                    let mut rng = trial_rng(seed, ((k as u64) << 32) | sample as u64);
                    let subset: Vec<usize> =
                        tail.iter().copied().filter(|_| rng.gen::<bool>()).collect();
                    if !subset.is_empty() {
                        out.push(subset);
                    }
                }
                out
            };
            let (mut best, mut size) = (0.0f64, 0);
            for subset in &subsets {
                let norm = subset_norm(coeffs, subset);
                if norm > best {
                    best = norm;
                    size = subset.len();
                }
            }
            (
                k,
                TrialRecord {
                    trial: slot,
                    summary: format!(
                        "cutoff {k}: {} subsets{}",
                        subsets.len(),
                        if exhaustive { " (exhaustive)" } else { "" }
                    ),
                    n: size,
                    norm: best,
                },
            )
        })
        .collect();
    let tail_sups = per_cutoff.iter().map(|(k, r)| (*k, r.norm)).collect();
    let mut report = finish(
        ProbeKind::Tail,
        seed,
        per_cutoff.into_iter().map(|(_, r)| r).collect(),
        tail_sups,
    );
    report.trials = subsets_per_cutoff;
    Ok(report)
}

/// Rows `1..=N` of `M_{i,j} = A_i(φ_j)`, sparse.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GramTruncation {
    size: usize,
    rows: Vec<Vec<(usize, f64)>>,
}

/// Builds the truncated Gram matrix. Row `i` only looks at the elements that
/// are non-zero at the atoms of `A_i`; all of them have level at most
/// `level(i)`, so columns of finer level are structurally zero.
pub fn gram_matrix(system: &FrameSystem, size: usize) -> Result<GramTruncation> {
    system.check_capacity(size)?;
    let rows = (1..=size)
        .into_par_iter()
        .map(|i| {
            let mut row: BTreeMap<usize, f64> = BTreeMap::new();
            let functional = system.functional(i).expect("capacity checked");
            for (point, weight) in functional.atoms() {
                for (j, phi) in elements_nonzero_at(point, size) {
                    *row.entry(j).or_insert(0.0) += weight * phi;
                }
            }
            row.into_iter().filter(|&(_, v)| v != 0.0).collect()
        })
        .collect();
    Ok(GramTruncation { size, rows })
}

/// Dense `M` computed column by column from the sampled elements. Only for
/// small `N`; used to cross-check the sparse construction.
pub fn dense_gram(system: &FrameSystem, size: usize) -> Result<Vec<Vec<f64>>> {
    if size > 64 {
        return Err(FrameError::Capacity(
            "dense Gram matrices are limited to N <= 64".into(),
        ));
    }
    system.check_capacity(size)?;
    let elements = (1..=size)
        .map(|j| system.element(j))
        .collect::<Result<Vec<_>>>()?;
    (1..=size)
        .map(|i| {
            let a = system.functional(i)?;
            Ok(elements.iter().map(|phi| a.apply_pl(phi)).collect())
        })
        .collect()
}

impl GramTruncation {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i - 1]
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        let row = self.row(i);
        row.binary_search_by_key(&j, |&(col, _)| col)
            .map_or(0.0, |pos| row[pos].1)
    }

    pub fn stored_entries(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut dense = vec![vec![0.0; self.size]; self.size];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                dense[i][j - 1] = v;
            }
        }
        dense
    }
}

/// `max_{i,j ≤ K} |(M²)_{i,j} − M_{i,j}|`.
///
/// Requires `N ≥ 2^{level(K)+1}`: then every row `i ≤ K` is complete inside
/// the truncation and the value equals the defect of the infinite matrix on
/// the window.
pub fn projection_defect(gram: &GramTruncation, window: usize) -> Result<f64> {
    if window == 0 {
        return Ok(0.0);
    }
    let needed = 1usize << (index_level(window) + 1);
    if gram.size < needed || gram.size < window {
        return Err(FrameError::Precondition(format!(
            "window {window} needs N >= {needed}, truncation has {}",
            gram.size
        )));
    }
    let mut defect = 0.0f64;
    let mut acc = vec![0.0; window];
    for i in 1..=window {
        acc.iter_mut().for_each(|v| *v = 0.0);
        for &(k, m_ik) in gram.row(i) {
            for &(j, m_kj) in gram.row(k) {
                if j <= window {
                    acc[j - 1] += m_ik * m_kj;
                }
            }
        }
        for (j, square) in acc.iter().enumerate() {
            defect = defect.max((square - gram.entry(i, j + 1)).abs());
        }
    }
    Ok(defect)
}

/// Smallest truncation for which `projection_defect` accepts window `K`.
pub fn minimal_truncation(window: usize) -> usize {
    if window == 0 {
        0
    } else {
        1usize << (index_level(window) + 1)
    }
}

/// Level of the frame element `n` (0 for the affine pair).
pub fn element_level(n: usize) -> Result<u32> {
    Ok(FrameIndex::decode(n)?.level())
}
