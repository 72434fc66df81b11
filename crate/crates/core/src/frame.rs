//! The λ-parameterized Faber–Schauder frame of `C[0,1]`.
//!
//! Elements `φ_n` are the affine pair `x`, `1 − x` followed by the dyadic
//! hats, each hat appearing twice. Level `m ≥ 1` occupies the indices
//! `2^m + 1 ..= 2^{m+1}`: first the `2^{m−1}` "First" copies, then the
//! `2^{m−1}` "Second" copies, in the same spatial order.
//!
//! The coefficient functionals are defined recursively through the partial
//! sums `S_{n−1}`. [`FrameSystem::build`] resolves each of them into a
//! [`PointMassFunctional`] once, so analysis is a handful of point
//! evaluations per coefficient and never re-runs the recursion.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::modulus_of_continuity;
use crate::dyadic::{check_grid_level, DyadicGrid, DyadicRational, PiecewiseLinearFn, MAX_LEVEL};
use crate::error::{FrameError, Result};

/// Anything that can be sampled on `[0, 1]`.
pub trait Evaluable {
    fn evaluate(&self, x: f64) -> f64;
}

impl<F: Fn(f64) -> f64> Evaluable for F {
    fn evaluate(&self, x: f64) -> f64 {
        self(x)
    }
}

impl Evaluable for PiecewiseLinearFn {
    fn evaluate(&self, x: f64) -> f64 {
        self.eval(x).unwrap_or(f64::NAN)
    }
}

pub(crate) fn checked_eval<E: Evaluable + ?Sized>(f: &E, x: f64) -> Result<f64> {
    let value = f.evaluate(x);
    if value.is_finite() {
        Ok(value)
    } else {
        Err(FrameError::NonFinite { x, value })
    }
}

/// Which copy of a doubled hat an index refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Half {
    First,
    Second,
}

/// Decoded frame index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FrameIndex {
    /// `n = 1`: `φ_1(x) = x`, `A_1(f) = f(1)`.
    Affine1,
    /// `n = 2`: `φ_2(x) = 1 − x`, `A_2(f) = f(0)`.
    Affine2,
    /// `n = 2^m + k` (First) or `n = 2^m + 2^{m−1} + k` (Second),
    /// with `1 ≤ k ≤ 2^{m−1}`.
    Hat {
        level: u32,
        position: u64,
        half: Half,
    },
}

impl FrameIndex {
    pub fn decode(n: usize) -> Result<Self> {
        match n {
            0 => Err(FrameError::Index("frame indices start at 1".into())),
            1 => Ok(Self::Affine1),
            2 => Ok(Self::Affine2),
            _ => {
                let level = usize::BITS - 1 - (n - 1).leading_zeros();
                let offset = (n - (1usize << level)) as u64;
                let half_width = 1u64 << (level - 1);
                if level > MAX_LEVEL {
                    return Err(FrameError::Capacity(format!(
                        "index {n} lies beyond level {MAX_LEVEL}"
                    )));
                }
                Ok(if offset <= half_width {
                    Self::Hat {
                        level,
                        position: offset,
                        half: Half::First,
                    }
                } else {
                    Self::Hat {
                        level,
                        position: offset - half_width,
                        half: Half::Second,
                    }
                })
            }
        }
    }

    pub fn hat(level: u32, position: u64, half: Half) -> Result<Self> {
        check_hat_bounds(level, position)?;
        Ok(Self::Hat {
            level,
            position,
            half,
        })
    }

    pub fn n(&self) -> usize {
        match *self {
            Self::Affine1 => 1,
            Self::Affine2 => 2,
            Self::Hat {
                level,
                position,
                half,
            } => {
                let base = (1usize << level) + position as usize;
                match half {
                    Half::First => base,
                    Half::Second => base + (1usize << (level - 1)),
                }
            }
        }
    }

    /// Grid level of the element: 0 for the affine pair, `m` for hats.
    pub fn level(&self) -> u32 {
        match *self {
            Self::Affine1 | Self::Affine2 => 0,
            Self::Hat { level, .. } => level,
        }
    }

    pub fn half(&self) -> Option<Half> {
        match *self {
            Self::Hat { half, .. } => Some(half),
            _ => None,
        }
    }

    /// Peak `(2k − 1)/2^m` and support ends `(k − 1)/2^{m−1}`, `k/2^{m−1}`.
    pub fn hat_points(&self) -> Option<(DyadicRational, DyadicRational, DyadicRational)> {
        match *self {
            Self::Hat {
                level, position, ..
            } => Some(hat_points(level, position)),
            _ => None,
        }
    }
}

impl fmt::Display for FrameIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.n())
    }
}

/// Level of index `n`; `n = 2^{m+1}` still belongs to level `m`.
pub fn index_level(n: usize) -> u32 {
    if n <= 2 {
        0
    } else {
        usize::BITS - 1 - (n - 1).leading_zeros()
    }
}

/// Number of frame elements through level `m`.
pub fn terms_through_level(level: u32) -> usize {
    1usize << (level + 1)
}

fn check_hat_bounds(level: u32, position: u64) -> Result<()> {
    if level == 0 || level > MAX_LEVEL {
        return Err(FrameError::Index(format!(
            "hat level {level} outside 1..={MAX_LEVEL}"
        )));
    }
    if position == 0 || position > 1u64 << (level - 1) {
        return Err(FrameError::Index(format!(
            "hat position {position} outside 1..={} at level {level}",
            1u64 << (level - 1)
        )));
    }
    Ok(())
}

fn hat_points(level: u32, position: u64) -> (DyadicRational, DyadicRational, DyadicRational) {
    let point = |num: u64| DyadicRational::new(num, level).expect("hat points lie in [0, 1]");
    (
        point(2 * position - 2),
        point(2 * position - 1),
        point(2 * position),
    )
}

/// Value at `x` of the hat peaked at `(2k − 1)/2^m`. Exact at dyadic `x`.
#[inline]
pub(crate) fn hat_value(level: u32, position: u64, x: f64) -> f64 {
    let distance = (x * (1u64 << level) as f64 - (2 * position - 1) as f64).abs();
    (1.0 - distance).max(0.0)
}

/// The hat of level `m` at position `k`, as a function on `J_m`.
pub fn hat_function(level: u32, position: u64) -> Result<PiecewiseLinearFn> {
    check_hat_bounds(level, position)?;
    let mut values = vec![0.0; DyadicGrid::new(level)?.len()];
    values[2 * position as usize - 1] = 1.0;
    PiecewiseLinearFn::new(level, values)
}

/// How the splitting weights `λ_n` of the First-half functionals are chosen.
///
/// Serialized as `{"mode": "constant" | "explicit" | "seeded", "value": ...}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "value", rename_all = "lowercase")]
pub enum LambdaSchedule {
    Constant(f64),
    /// Entries are consumed by First-half indices in increasing order.
    Explicit(Vec<f64>),
    #[serde(rename = "seeded")]
    SeededRandom(u64),
}

impl Default for LambdaSchedule {
    fn default() -> Self {
        Self::Constant(0.0)
    }
}

impl LambdaSchedule {
    /// `λ_n` for a First-half index `n`.
    pub fn lambda(&self, n: usize) -> Result<f64> {
        let (level, position) = match FrameIndex::decode(n)? {
            FrameIndex::Hat {
                level,
                position,
                half: Half::First,
            } => (level, position),
            other => {
                return Err(FrameError::Index(format!(
                    "λ is only defined for First-half indices, not {other:?}"
                )))
            }
        };
        let lambda = match self {
            Self::Constant(value) => *value,
            Self::Explicit(values) => {
                let ordinal = (1usize << (level - 1)) - 1 + (position as usize - 1);
                *values.get(ordinal).ok_or_else(|| {
                    FrameError::Schedule(format!(
                        "explicit schedule has {} entries; index {n} needs entry {ordinal}",
                        values.len()
                    ))
                })?
            }
            Self::SeededRandom(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                rng.set_word_pos(2 * n as u128);
                rng.gen::<f64>()
            }
        };
        if !(0.0..=1.0).contains(&lambda) {
            return Err(FrameError::Schedule(format!(
                "λ_{n} = {lambda} lies outside [0, 1]"
            )));
        }
        Ok(lambda)
    }
}

/// A finite signed combination of point evaluations, `f ↦ Σ w_i f(p_i)`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PointMassFunctional {
    atoms: Vec<(DyadicRational, f64)>,
}

impl PointMassFunctional {
    pub fn point_mass(point: DyadicRational) -> Self {
        Self {
            atoms: vec![(point, 1.0)],
        }
    }

    /// Merges repeated points. A merged weight that is only rounding residue
    /// of cancelling contributions is dropped, as are exact zeros.
    pub fn from_terms<I: IntoIterator<Item = (DyadicRational, f64)>>(terms: I) -> Self {
        let mut terms: Vec<_> = terms.into_iter().collect();
        terms.sort_by_key(|t| t.0);
        let mut atoms: Vec<(DyadicRational, f64)> = Vec::with_capacity(terms.len());
        let mut i = 0;
        while i < terms.len() {
            let point = terms[i].0;
            let (mut sum, mut mass) = (0.0, 0.0);
            while i < terms.len() && terms[i].0 == point {
                sum += terms[i].1;
                mass += terms[i].1.abs();
                i += 1;
            }
            if sum.abs() > 8.0 * f64::EPSILON * mass {
                atoms.push((point, sum));
            }
        }
        Self { atoms }
    }

    pub fn atoms(&self) -> &[(DyadicRational, f64)] {
        &self.atoms
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Norm in `C[0,1]*`: the total mass `Σ |w_i|`.
    pub fn norm(&self) -> f64 {
        self.atoms.iter().map(|(_, w)| w.abs()).sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            atoms: self.atoms.iter().map(|&(p, w)| (p, w * factor)).collect(),
        }
    }

    /// Finest level among the atoms.
    pub fn level(&self) -> u32 {
        self.atoms.iter().map(|(p, _)| p.level()).max().unwrap_or(0)
    }

    pub fn apply<E: Evaluable + ?Sized>(&self, f: &E) -> Result<f64> {
        self.atoms.iter().try_fold(
            0.0,
            |acc, (p, w)| Ok(acc + w * checked_eval(f, p.to_f64())?),
        )
    }

    pub fn apply_pl(&self, f: &PiecewiseLinearFn) -> f64 {
        self.atoms.iter().map(|(p, w)| w * f.eval_dyadic(p)).sum()
    }
}

/// One analysis coefficient with its index metadata.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub index: FrameIndex,
    /// `λ_n` for First-half indices.
    pub lambda: Option<f64>,
    pub value: f64,
}

/// Coefficients for indices `1..=N`, contiguous.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSequence {
    entries: Vec<Coefficient>,
}

impl CoefficientSequence {
    /// Wraps raw values as the coefficients of indices `1..=values.len()`.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        let entries = values
            .into_iter()
            .enumerate()
            .map(|(i, value)| {
                Ok(Coefficient {
                    index: FrameIndex::decode(i + 1)?,
                    lambda: None,
                    value,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[Coefficient] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Coefficient of index `n` (1-based).
    pub fn get(&self, n: usize) -> Option<f64> {
        n.checked_sub(1)
            .and_then(|i| self.entries.get(i))
            .map(|c| c.value)
    }

    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|c| c.value).collect()
    }

    pub fn prefix(&self, n: usize) -> Self {
        Self {
            entries: self.entries[..n.min(self.entries.len())].to_vec(),
        }
    }

    /// Finest element level touched.
    pub fn level(&self) -> u32 {
        index_level(self.entries.len())
    }

    /// Flat export rows, one per coefficient.
    pub fn rows(&self) -> Vec<CoefficientRow> {
        self.entries
            .iter()
            .map(|c| {
                let (position, half) = match c.index {
                    FrameIndex::Affine1 => (1, "affine"),
                    FrameIndex::Affine2 => (2, "affine"),
                    FrameIndex::Hat {
                        position,
                        half: Half::First,
                        ..
                    } => (position, "first"),
                    FrameIndex::Hat {
                        position,
                        half: Half::Second,
                        ..
                    } => (position, "second"),
                };
                CoefficientRow {
                    n: c.index.n(),
                    level: c.index.level(),
                    position,
                    half: half.to_string(),
                    lambda: c.lambda,
                    value: c.value,
                }
            })
            .collect()
    }

    /// CSV with columns `n,level,position,half,lambda,value`.
    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        for row in self.rows() {
            out.serialize(row)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// One line of the coefficient export. `lambda` is empty except for
/// First-half indices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientRow {
    pub n: usize,
    pub level: u32,
    pub position: u64,
    pub half: String,
    pub lambda: Option<f64>,
    pub value: f64,
}

/// The frame `{(φ_n, A_n)}` for `n = 1 ..= 2^{L+1}` with every `A_n` resolved.
#[derive(Clone, Debug)]
pub struct FrameSystem {
    max_level: u32,
    schedule: LambdaSchedule,
    lambdas: Vec<Option<f64>>,
    functionals: Vec<PointMassFunctional>,
}

impl FrameSystem {
    /// Runs the recursive construction level by level.
    ///
    /// For a hat index `n` with peak `p` and support ends `l`, `r`:
    ///
    /// * First:  `A_n(f) = λ_n f(l) + (1 − λ_n) f(r) − S_{n−1}(f)(p)`
    /// * Second: `A_n(f) = f(p) − S_{n−1}(f)(p)`
    ///
    /// where `S_{n−1}(f)(p) = Σ_{j<n} φ_j(p) A_j(f)` is itself resolved from
    /// the already-built functionals of the elements that are non-zero at `p`.
    pub fn build(max_level: u32, schedule: LambdaSchedule) -> Result<Self> {
        if max_level == 0 {
            return Err(FrameError::InvalidArgument(
                "max_level must be at least 1".into(),
            ));
        }
        check_grid_level(max_level)?;
        let total = terms_through_level(max_level);
        let mut functionals = Vec::with_capacity(total);
        let mut lambdas = Vec::with_capacity(total);
        functionals.push(PointMassFunctional::point_mass(DyadicRational::ONE));
        functionals.push(PointMassFunctional::point_mass(DyadicRational::ZERO));
        lambdas.extend([None, None]);

        for n in 3..=total {
            let index = FrameIndex::decode(n)?;
            let (left, peak, right) = index.hat_points().expect("n >= 3 is a hat");
            let mut terms: Vec<(DyadicRational, f64)> = Vec::new();
            for (j, phi) in elements_nonzero_at(&peak, n - 1) {
                terms.extend(
                    functionals[j - 1]
                        .atoms()
                        .iter()
                        .map(|&(q, w)| (q, -phi * w)),
                );
            }
            let lambda = match index.half() {
                Some(Half::First) => {
                    let lambda = schedule.lambda(n)?;
                    terms.push((left, lambda));
                    terms.push((right, 1.0 - lambda));
                    Some(lambda)
                }
                _ => {
                    terms.push((peak, 1.0));
                    None
                }
            };
            functionals.push(PointMassFunctional::from_terms(terms));
            lambdas.push(lambda);
        }

        Ok(Self {
            max_level,
            schedule,
            lambdas,
            functionals,
        })
    }

    pub fn max_level(&self) -> u32 {
        self.max_level
    }

    pub fn schedule(&self) -> &LambdaSchedule {
        &self.schedule
    }

    /// Number of built elements, `2^{L+1}`.
    pub fn len(&self) -> usize {
        self.functionals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functionals.is_empty()
    }

    pub fn check_capacity(&self, n: usize) -> Result<()> {
        if n > self.len() {
            return Err(FrameError::Capacity(format!(
                "{n} terms requested but the system has {} (max_level {})",
                self.len(),
                self.max_level
            )));
        }
        Ok(())
    }

    /// Resolved `A_n`.
    pub fn functional(&self, n: usize) -> Result<&PointMassFunctional> {
        if n == 0 {
            return Err(FrameError::Index("frame indices start at 1".into()));
        }
        self.check_capacity(n)?;
        Ok(&self.functionals[n - 1])
    }

    pub fn lambda(&self, n: usize) -> Option<f64> {
        n.checked_sub(1)
            .and_then(|i| self.lambdas.get(i))
            .copied()
            .flatten()
    }

    /// `φ_n` on its own grid (`J_0` for the affine pair, `J_m` for hats).
    pub fn element(&self, n: usize) -> Result<PiecewiseLinearFn> {
        self.check_capacity(n)?;
        element(n)
    }

    /// `φ_n(x)` at a dyadic point, exactly.
    pub fn element_value_at(&self, n: usize, x: &DyadicRational) -> f64 {
        element_value(FrameIndex::decode(n).expect("valid index"), x.to_f64())
    }

    /// Coefficients `A_n(f)` for `n = 1..=count`.
    pub fn analyze<E: Evaluable + ?Sized>(
        &self,
        f: &E,
        count: usize,
    ) -> Result<CoefficientSequence> {
        self.check_capacity(count)?;
        let entries = (1..=count)
            .map(|n| {
                Ok(Coefficient {
                    index: FrameIndex::decode(n)?,
                    lambda: self.lambdas[n - 1],
                    value: self.functionals[n - 1].apply(f)?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(CoefficientSequence { entries })
    }

    /// `S_n(f)`.
    pub fn partial_sum<E: Evaluable + ?Sized>(&self, f: &E, n: usize) -> Result<PiecewiseLinearFn> {
        synthesize(&self.analyze(f, n)?)
    }

    /// `max |f(x) − S_n(f)(x)|` over the grid `J_sample_level`.
    pub fn reconstruction_error<E: Evaluable + ?Sized>(
        &self,
        f: &E,
        n: usize,
        sample_level: u32,
    ) -> Result<f64> {
        if n < 2 {
            return Err(FrameError::Precondition(
                "reconstruction needs n >= 2".into(),
            ));
        }
        let grid = DyadicGrid::new(sample_level)?;
        let approx = self.partial_sum(f, n)?;
        (0..grid.len()).try_fold(0.0f64, |acc, i| {
            let x = grid.abscissa(i);
            Ok(acc.max((checked_eval(f, x)? - approx.eval(x)?).abs()))
        })
    }

    /// `‖f − S_n(f)‖` on `J_sample_level` for every `n = 1..=count`, computed
    /// incrementally (each term only touches its own support).
    pub fn reconstruction_errors<E: Evaluable + ?Sized>(
        &self,
        f: &E,
        count: usize,
        sample_level: u32,
    ) -> Result<Vec<f64>> {
        let coeffs = self.analyze(f, count)?;
        let grid = DyadicGrid::new(sample_level.max(coeffs.level()))?;
        let offset = (0..grid.len())
            .map(|i| checked_eval(f, grid.abscissa(i)).map(|v| -v))
            .collect::<Result<Vec<_>>>()?;
        let mut tracker = SupNormTracker::with_offset(grid.level(), offset)?;
        Ok(coeffs
            .entries()
            .iter()
            .map(|c| {
                tracker.add_term(c.index, c.value);
                tracker.norm()
            })
            .collect())
    }
}

/// `φ_n` as a standalone function.
pub fn element(n: usize) -> Result<PiecewiseLinearFn> {
    match FrameIndex::decode(n)? {
        FrameIndex::Affine1 => PiecewiseLinearFn::new(0, vec![0.0, 1.0]),
        FrameIndex::Affine2 => PiecewiseLinearFn::new(0, vec![1.0, 0.0]),
        FrameIndex::Hat {
            level, position, ..
        } => hat_function(level, position),
    }
}

pub(crate) fn element_value(index: FrameIndex, x: f64) -> f64 {
    match index {
        FrameIndex::Affine1 => x,
        FrameIndex::Affine2 => 1.0 - x,
        FrameIndex::Hat {
            level, position, ..
        } => hat_value(level, position, x),
    }
}

/// All `(j, φ_j(point))` with `j ≤ limit` and `φ_j(point) ≠ 0`, in increasing `j`.
///
/// A hat of level `m` vanishes on `J_{m−1}`, so only levels up to the
/// point's own level can contribute, and at each of those exactly one hat
/// (two indices) contains the point in the interior of its support.
pub fn elements_nonzero_at(point: &DyadicRational, limit: usize) -> Vec<(usize, f64)> {
    let x = point.to_f64();
    let mut out = Vec::new();
    if limit >= 1 && x != 0.0 {
        out.push((1, x));
    }
    if limit >= 2 && x != 1.0 {
        out.push((2, 1.0 - x));
    }
    let top = point.level().min(index_level(limit));
    for level in 1..=top {
        let position = (point.numerator() >> (point.level() - level + 1)) + 1;
        let value = hat_value(level, position, x);
        let first = (1usize << level) + position as usize;
        for n in [first, first + (1usize << (level - 1))] {
            if n <= limit {
                out.push((n, value));
            }
        }
    }
    out.sort_by_key(|&(n, _)| n);
    out
}

/// `Σ c_n φ_n` on the finest grid the coefficients touch.
///
/// Built coarse to fine: the affine pair fixes the ordinates on `J_0`, then
/// each level refines by midpoint interpolation and adds its hat
/// coefficients at the new midpoints.
pub fn synthesize(coeffs: &CoefficientSequence) -> Result<PiecewiseLinearFn> {
    let top = coeffs.level();
    check_grid_level(top)?;
    let c = |n: usize| coeffs.get(n).unwrap_or(0.0);
    let mut values = vec![c(2), c(1)];
    for level in 1..=top {
        let mut next = Vec::with_capacity(2 * values.len() - 1);
        for pair in values.windows(2) {
            next.push(pair[0]);
            next.push(0.5 * (pair[0] + pair[1]));
        }
        next.push(*values.last().expect("non-empty"));
        let half_width = 1usize << (level - 1);
        for position in 1..=half_width {
            let first = (1usize << level) + position;
            next[2 * position - 1] += c(first) + c(first + half_width);
        }
        values = next;
    }
    PiecewiseLinearFn::new(top, values)
}

/// Classical Faber–Schauder coefficient `f(p) − (f(l) + f(r))/2` of the hat
/// at level `m`, position `k`.
pub fn faber_coefficient<E: Evaluable + ?Sized>(f: &E, level: u32, position: u64) -> Result<f64> {
    check_hat_bounds(level, position)?;
    let (left, peak, right) = hat_points(level, position);
    let at = |p: DyadicRational| checked_eval(f, p.to_f64());
    Ok(at(peak)? - 0.5 * (at(left)? + at(right)?))
}

/// `2·ω_f(2^{−(m−1)})` for `2^m ≤ n < 2^{m+1}`: the uniform error bound of `S_n`.
pub fn convergence_bound<E: Evaluable + ?Sized>(f: &E, n: usize, probe_level: u32) -> Result<f64> {
    if n < 2 {
        return Err(FrameError::Precondition("the bound needs n >= 2".into()));
    }
    let m = usize::BITS - 1 - n.leading_zeros();
    let delta = (-(m as f64 - 1.0)).exp2();
    Ok(2.0 * modulus_of_continuity(f, delta.min(1.0), probe_level)?)
}

/// Running `‖Σ c_n φ_n + offset‖_∞` on a fixed grid under single-term updates.
///
/// Ordinates live on `J_level`; a max-tree over their absolute values keeps
/// the norm current in `O(support · log)` per term.
#[derive(Clone, Debug)]
pub struct SupNormTracker {
    level: u32,
    values: Vec<f64>,
    tree: Vec<f64>,
    leaves: usize,
}

impl SupNormTracker {
    pub fn new(level: u32) -> Result<Self> {
        Self::with_offset(level, vec![0.0; DyadicGrid::new(level)?.len()])
    }

    pub fn with_offset(level: u32, offset: Vec<f64>) -> Result<Self> {
        let grid = DyadicGrid::new(level)?;
        if offset.len() != grid.len() {
            return Err(FrameError::InvalidArgument(
                "offset length does not match grid".into(),
            ));
        }
        let leaves = grid.len().next_power_of_two();
        let mut tree = vec![0.0; 2 * leaves];
        for (i, v) in offset.iter().enumerate() {
            tree[leaves + i] = v.abs();
        }
        for i in (1..leaves).rev() {
            tree[i] = tree[2 * i].max(tree[2 * i + 1]);
        }
        Ok(Self {
            level,
            values: offset,
            tree,
            leaves,
        })
    }

    fn set(&mut self, i: usize, value: f64) {
        self.values[i] = value;
        let mut node = self.leaves + i;
        self.tree[node] = value.abs();
        while node > 1 {
            node /= 2;
            self.tree[node] = self.tree[2 * node].max(self.tree[2 * node + 1]);
        }
    }

    /// Adds `coefficient · φ_index`. The element must live on a grid no finer
    /// than the tracker's.
    pub fn add_term(&mut self, index: FrameIndex, coefficient: f64) {
        if coefficient == 0.0 {
            return;
        }
        assert!(
            index.level() <= self.level,
            "element finer than tracker grid"
        );
        let cells = 1usize << self.level;
        let (start, end) = match index {
            FrameIndex::Affine1 | FrameIndex::Affine2 => (0, cells),
            FrameIndex::Hat {
                level, position, ..
            } => {
                let stride = 1usize << (self.level - level);
                (
                    (2 * position as usize - 2) * stride,
                    2 * position as usize * stride,
                )
            }
        };
        for i in start..=end {
            let phi = element_value(index, i as f64 / cells as f64);
            if phi != 0.0 {
                let v = self.values[i] + coefficient * phi;
                self.set(i, v);
            }
        }
    }

    pub fn norm(&self) -> f64 {
        self.tree[1]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}
