//! Built-in test functions of known regularity, and brute-force regularity
//! estimators used as oracles.

use std::collections::BTreeMap;
use std::collections::VecDeque;
use std::f64::consts::PI;
use std::io::Read;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dyadic::{DyadicGrid, DyadicRational, PiecewiseLinearFn};
use crate::error::{FrameError, Result};
use crate::frame::{checked_eval, Evaluable};

/// Default grid level for modulus-of-continuity probes.
pub const DEFAULT_PROBE_LEVEL: u32 = 14;

/// Truncation depth of the built-in Takagi function.
pub const TAKAGI_DEPTH: u32 = 20;

/// Seed and grid level of the built-in random piecewise-linear function.
pub const RANDOM_PL_SEED: u64 = 0x5eed_fab3;
pub const RANDOM_PL_LEVEL: u32 = 6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Regularity {
    Affine,
    Lipschitz { constant: f64 },
    Holder { exponent: f64, constant: f64 },
    Continuous,
}

#[derive(Clone, Debug, PartialEq)]
enum Kind {
    Affine { intercept: f64, slope: f64 },
    Square,
    SinPi,
    AbsCentered,
    Sqrt,
    Takagi { depth: u32 },
    Sampled(PiecewiseLinearFn),
}

/// A named test function on `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct CorpusFunction {
    id: String,
    regularity: Regularity,
    kind: Kind,
}

impl CorpusFunction {
    fn new(id: &str, regularity: Regularity, kind: Kind) -> Self {
        Self {
            id: id.to_string(),
            regularity,
            kind,
        }
    }

    /// Wraps sampled ordinates; tagged Lipschitz with the steepest slope.
    pub fn sampled(id: &str, f: PiecewiseLinearFn) -> Self {
        let cells = (f.values().len() - 1) as f64;
        let constant = f
            .values()
            .windows(2)
            .fold(0.0f64, |acc, w| acc.max((w[1] - w[0]).abs() * cells));
        Self::new(id, Regularity::Lipschitz { constant }, Kind::Sampled(f))
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn regularity(&self) -> &Regularity {
        &self.regularity
    }

    pub fn eval(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::Affine { intercept, slope } => intercept + slope * x,
            Kind::Square => x * x,
            Kind::SinPi => (PI * x).sin(),
            Kind::AbsCentered => (x - 0.5).abs(),
            Kind::Sqrt => x.sqrt(),
            Kind::Takagi { depth } => takagi(x, *depth),
            Kind::Sampled(f) => f.eval(x).unwrap_or(f64::NAN),
        }
    }
}

impl Evaluable for CorpusFunction {
    fn evaluate(&self, x: f64) -> f64 {
        self.eval(x)
    }
}

/// `T(x) = Σ_{k=0}^{depth} 2^{−k} dist(2^k x, ℤ)`.
pub fn takagi(x: f64, depth: u32) -> f64 {
    (0..=depth)
        .map(|k| {
            let y = x * (1u64 << k) as f64;
            (y - y.round()).abs() / (1u64 << k) as f64
        })
        .sum()
}

/// Ordinates on `J_6` drawn uniformly from `[−1, 1]`.
pub fn random_piecewise_linear(seed: u64, level: u32) -> Result<PiecewiseLinearFn> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = DyadicGrid::new(level)?.len();
    PiecewiseLinearFn::new(level, (0..len).map(|_| rng.gen_range(-1.0..=1.0)).collect())
}

pub fn builtin_corpus() -> Vec<CorpusFunction> {
    use Regularity::*;
    vec![
        CorpusFunction::new(
            "identity",
            Affine,
            Kind::Affine {
                intercept: 0.0,
                slope: 1.0,
            },
        ),
        CorpusFunction::new(
            "reflect",
            Affine,
            Kind::Affine {
                intercept: 1.0,
                slope: -1.0,
            },
        ),
        CorpusFunction::new(
            "const1",
            Affine,
            Kind::Affine {
                intercept: 1.0,
                slope: 0.0,
            },
        ),
        CorpusFunction::new(
            "const_neg",
            Affine,
            Kind::Affine {
                intercept: -0.75,
                slope: 0.0,
            },
        ),
        CorpusFunction::new("square", Lipschitz { constant: 2.0 }, Kind::Square),
        CorpusFunction::new("sin_pi", Lipschitz { constant: PI }, Kind::SinPi),
        CorpusFunction::new(
            "abs_centered",
            Lipschitz { constant: 1.0 },
            Kind::AbsCentered,
        ),
        CorpusFunction::new(
            "sqrt",
            Holder {
                exponent: 0.5,
                constant: 1.0,
            },
            Kind::Sqrt,
        ),
        CorpusFunction::sampled(
            "random_pl",
            random_piecewise_linear(RANDOM_PL_SEED, RANDOM_PL_LEVEL).expect("level 6 is valid"),
        ),
        CorpusFunction::new(
            "takagi",
            Continuous,
            Kind::Takagi {
                depth: TAKAGI_DEPTH,
            },
        ),
    ]
}

pub fn lookup(id: &str) -> Option<CorpusFunction> {
    builtin_corpus().into_iter().find(|f| f.id == id)
}

/// Reads `point_numerator,point_level,value` rows covering a full grid `J_m`.
pub fn load_sampled_csv<R: Read>(id: &str, reader: R) -> Result<CorpusFunction> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut samples = BTreeMap::new();
    for (row, record) in rdr.deserialize::<(u64, u32, f64)>().enumerate() {
        let (numerator, level, value) =
            record.map_err(|e| FrameError::InvalidArgument(format!("row {}: {e}", row + 1)))?;
        let point = DyadicRational::new(numerator, level)?;
        if samples.insert(point, value).is_some() {
            return Err(FrameError::InvalidArgument(format!(
                "point {point} listed twice"
            )));
        }
    }
    let level = samples.keys().map(|p| p.level()).max().unwrap_or(0);
    let grid = DyadicGrid::new(level)?;
    let values = grid
        .points()
        .map(|p| {
            samples.get(&p).copied().ok_or_else(|| {
                FrameError::InvalidArgument(format!("grid J_{level} is missing point {p}"))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CorpusFunction::sampled(
        id,
        PiecewiseLinearFn::new(level, values)?,
    ))
}

/// Grid estimate of `ω_f(δ) = sup{|f(x) − f(y)| : |x − y| ≤ δ}`.
///
/// Exact maximum over all pairs of `J_probe_level` points at distance at
/// most `δ`, so it never exceeds the true modulus. Pairs are scanned with a
/// sliding window holding the running max and min.
pub fn modulus_of_continuity<E: Evaluable + ?Sized>(
    f: &E,
    delta: f64,
    probe_level: u32,
) -> Result<f64> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(FrameError::InvalidArgument(format!(
            "delta must lie in (0, 1], got {delta}"
        )));
    }
    let grid = DyadicGrid::new(probe_level)?;
    let width = (delta * grid.cells() as f64).floor() as usize;
    if width == 0 {
        return Ok(0.0);
    }
    let values = (0..grid.len())
        .map(|i| checked_eval(f, grid.abscissa(i)))
        .collect::<Result<Vec<_>>>()?;

    let mut maxq: VecDeque<usize> = VecDeque::new();
    let mut minq: VecDeque<usize> = VecDeque::new();
    let mut best = 0.0f64;
    for (i, &v) in values.iter().enumerate() {
        while maxq.back().is_some_and(|&j| values[j] <= v) {
            maxq.pop_back();
        }
        maxq.push_back(i);
        while minq.back().is_some_and(|&j| values[j] >= v) {
            minq.pop_back();
        }
        minq.push_back(i);
        let start = i.saturating_sub(width);
        while maxq.front().is_some_and(|&j| j < start) {
            maxq.pop_front();
        }
        while minq.front().is_some_and(|&j| j < start) {
            minq.pop_front();
        }
        best = best.max(values[maxq[0]] - values[minq[0]]);
    }
    Ok(best)
}

/// Largest observed difference quotient on `J_probe_level`.
pub fn lipschitz_estimate<E: Evaluable + ?Sized>(f: &E, probe_level: u32) -> Result<f64> {
    let grid = DyadicGrid::new(probe_level)?;
    Ok(modulus_of_continuity(f, 1.0 / grid.cells() as f64, probe_level)? * grid.cells() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_modulus(values: &[f64], width: usize) -> f64 {
        let mut best = 0.0f64;
        for i in 0..values.len() {
            for j in i..values.len().min(i + width + 1) {
                best = best.max((values[i] - values[j]).abs());
            }
        }
        best
    }

    #[test]
    fn corpus_contents() {
        let corpus = builtin_corpus();
        for id in [
            "identity",
            "reflect",
            "const1",
            "square",
            "sin_pi",
            "abs_centered",
            "random_pl",
            "takagi",
        ] {
            assert!(corpus.iter().any(|f| f.id() == id), "missing {id}");
        }
        let identity = lookup("identity").unwrap();
        for x in [0.0, 0.3, 1.0] {
            assert_eq!(identity.eval(x), x);
        }
        assert_eq!(
            lookup("abs_centered").unwrap().regularity(),
            &Regularity::Lipschitz { constant: 1.0 }
        );
        assert!(lookup("nope").is_none());
        for f in &corpus {
            for i in 0..=64 {
                assert!(f.eval(i as f64 / 64.0).is_finite());
            }
        }
    }

    #[test]
    fn takagi_tail_is_small() {
        // Σ_{k>20} 2^{-k}·(1/2) = 2^{-21}
        let bound = 2f64.powi(-20);
        for i in 0..=200 {
            let x = i as f64 / 200.0 + 1e-7 * (i % 3) as f64;
            let x = x.min(1.0);
            assert!((takagi(x, 40) - takagi(x, TAKAGI_DEPTH)).abs() < bound);
        }
        assert_eq!(takagi(0.5, TAKAGI_DEPTH), 0.5);
        assert_eq!(takagi(0.0, TAKAGI_DEPTH), 0.0);
    }

    #[test]
    fn random_member_is_reproducible() {
        let a = random_piecewise_linear(RANDOM_PL_SEED, RANDOM_PL_LEVEL).unwrap();
        let b = random_piecewise_linear(RANDOM_PL_SEED, RANDOM_PL_LEVEL).unwrap();
        assert_eq!(a.values(), b.values());
        assert_eq!(lookup("random_pl").unwrap(), lookup("random_pl").unwrap());
        assert_ne!(random_piecewise_linear(1, 6).unwrap(), a);
    }

    #[test]
    fn modulus_examples() {
        let id = |x: f64| x;
        assert_eq!(modulus_of_continuity(&id, 0.25, 14).unwrap(), 0.25);
        let valley = |x: f64| (x - 0.5).abs();
        assert_eq!(modulus_of_continuity(&valley, 0.125, 14).unwrap(), 0.125);
        assert_eq!(modulus_of_continuity(&|_| 3.0, 0.5, 14).unwrap(), 0.0);
        assert_eq!(modulus_of_continuity(&valley, 1.0, 14).unwrap(), 0.5);
        assert!(modulus_of_continuity(&id, 0.0, 14).is_err());
        assert!(modulus_of_continuity(&id, -1.0, 14).is_err());
        assert!(modulus_of_continuity(&id, f64::NAN, 14).is_err());
    }

    #[test]
    fn sliding_window_matches_pairwise_scan() {
        for f in builtin_corpus() {
            let level = 7;
            let grid = DyadicGrid::new(level).unwrap();
            let values: Vec<f64> = (0..grid.len()).map(|i| f.eval(grid.abscissa(i))).collect();
            for width in [1usize, 2, 3, 5, 17, 64, 128] {
                let delta = width as f64 / grid.cells() as f64;
                let fast = modulus_of_continuity(&f, delta, level).unwrap();
                assert_eq!(
                    fast,
                    brute_force_modulus(&values, width),
                    "{} width {width}",
                    f.id()
                );
            }
        }
    }

    #[test]
    fn modulus_monotone_and_lipschitz() {
        for f in builtin_corpus() {
            let mut previous = 0.0;
            for j in 1..=16 {
                let delta = j as f64 / 16.0;
                let w = modulus_of_continuity(&f, delta, 10).unwrap();
                assert!(w >= previous);
                previous = w;
                if let Regularity::Lipschitz { constant } = f.regularity() {
                    assert!(w <= constant * delta + 1e-12, "{} at {delta}", f.id());
                }
                if let Regularity::Affine = f.regularity() {
                    assert!(w <= lipschitz_estimate(&f, 10).unwrap() * delta + 1e-12);
                }
            }
        }
    }

    #[test]
    fn sampled_csv_loading() {
        let csv = "point_numerator,point_level,value\n0,0,1.0\n1,1,0.0\n1,0,2.0\n";
        let f = load_sampled_csv("custom", csv.as_bytes()).unwrap();
        assert_eq!(f.eval(0.5), 0.0);
        assert_eq!(f.eval(0.75), 1.0);
        assert_eq!(f.regularity(), &Regularity::Lipschitz { constant: 4.0 });

        let missing = "point_numerator,point_level,value\n0,0,1.0\n1,2,0.0\n1,0,2.0\n";
        assert!(load_sampled_csv("custom", missing.as_bytes()).is_err());
        let twice = "point_numerator,point_level,value\n0,0,1.0\n0,3,1.0\n1,0,2.0\n";
        assert!(load_sampled_csv("custom", twice.as_bytes()).is_err());
    }
}
