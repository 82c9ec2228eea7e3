//! Six-state and BB84 scheme states, noise thresholds, and the partition of
//! the projected `(α1, α2)` state space into regions S, A, B, C, D.
//!
//! Region boundaries are assigned to the earlier region in that order.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bellstate::{AlphaCoords, BellProbs, STATE_TOL};
use crate::distill::{d_c, d_c_alpha, ExtReal};
use crate::error::{Error, Result};
use crate::output::g17;
use crate::scalar::Real;
use crate::symext::{cross_section_boundary, has_symext, CrossSection, BOUNDARY_SLACK};

/// Bisection bracket for the threshold search.
pub const THRESHOLD_BRACKET: (f64, f64) = (0.0, 0.4);
pub const MAX_BISECTION: usize = 200;
/// Grid size on which the sign pattern of `D_C` over the bracket is checked.
pub const MONOTONE_SAMPLES: usize = 400;
/// Values of `t ∈ (0, q/2]` checked by [`bb84_worst_case`].
pub const WORST_CASE_SAMPLES: usize = 16;
/// Points sampled along each `α3` fiber; odd so that `α3 = 0` is included.
pub const FIBER_SAMPLES: usize = 65;
/// Environment variable capping the worker count of [`region_scan`].
pub const THREADS_ENV: &str = "SYMEXT_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    SixState,
    Bb84,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::SixState => "six-state",
            Scheme::Bb84 => "bb84",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "six-state" | "six_state" | "sixstate" => Ok(Scheme::SixState),
            "bb84" => Ok(Scheme::Bb84),
            other => Err(Error::InvalidArgument(format!("unknown scheme '{other}'"))),
        }
    }
}

/// A scheme at QBER `q`; `t ∈ [0, q/2]` parametrizes the BB84 family and is
/// zero for six-state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeState<T> {
    pub scheme: Scheme,
    pub q: T,
    pub t: T,
}

impl<T: Real> SchemeState<T> {
    pub fn new(scheme: Scheme, q: T, t: T) -> Result<Self> {
        if !(q >= T::zero() && q < T::lit(0.5)) {
            return Err(Error::InvalidArgument(format!("q = {q} outside [0, 1/2)")));
        }
        let t_max = match scheme {
            Scheme::SixState => T::zero(),
            Scheme::Bb84 => q * T::lit(0.5),
        };
        if !(t >= T::zero() && t <= t_max) {
            return Err(Error::InvalidArgument(format!(
                "t = {t} outside [0, {t_max}] for {scheme}"
            )));
        }
        Ok(Self { scheme, q, t })
    }

    pub fn six_state(q: T) -> Result<Self> {
        Self::new(Scheme::SixState, q, T::zero())
    }

    pub fn bb84(q: T, t: T) -> Result<Self> {
        Self::new(Scheme::Bb84, q, t)
    }

    pub fn probs(&self) -> Result<BellProbs<T>> {
        let (q, t) = (self.q, self.t);
        match self.scheme {
            Scheme::SixState => {
                let h = q * T::lit(0.5);
                BellProbs::new([T::one() - T::lit(3.0) * h, h, h, h])
            }
            Scheme::Bb84 => BellProbs::new([T::one() - T::lit(2.0) * q + t, q - t, t, q - t]),
        }
    }
}

pub fn scheme_state<T: Real>(s: &SchemeState<T>) -> Result<BellProbs<T>> {
    s.probs()
}

/// The member of the BB84 family with the smallest `D_C` at QBER `q`.
///
/// `D_C` depends on `t` only through `|1 − 3q + 2t|`, so the minimizer is
/// `t = 0` for `q ≤ 1/3` and `t = (3q − 1)/2` above. The choice is checked
/// against `WORST_CASE_SAMPLES` values of `t ∈ (0, q/2]`.
pub fn bb84_worst_case<T: Real>(q: T) -> Result<BellProbs<T>> {
    let t0 = ((T::lit(3.0) * q - T::one()) * T::lit(0.5)).max(T::zero());
    let p0 = SchemeState::bb84(q, t0.min(q * T::lit(0.5)))?.probs()?;
    let d0 = d_c(&p0)?;
    for k in 1..=WORST_CASE_SAMPLES {
        let t = q * T::lit(0.5 * k as f64 / WORST_CASE_SAMPLES as f64);
        let d = d_c(&SchemeState::bb84(q, t)?.probs()?)?;
        if d < d0 {
            return Err(Error::Postcondition(format!(
                "BB84 at q = {q}: d_c(t = {t}) = {d} < d_c(t = {t0}) = {d0}"
            )));
        }
    }
    Ok(p0)
}

/// The worst-case state at QBER `q`: the unique six-state point, or the
/// BB84 member from [`bb84_worst_case`].
pub fn worst_case<T: Real>(scheme: Scheme, q: T) -> Result<BellProbs<T>> {
    match scheme {
        Scheme::SixState => SchemeState::six_state(q)?.probs(),
        Scheme::Bb84 => bb84_worst_case(q),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSearch<T> {
    pub scheme: Scheme,
    pub q_max: T,
    /// Largest sampled `q` with `D_C > 0`.
    pub lo: T,
    /// Smallest sampled `q` with `D_C ≤ 0`.
    pub hi: T,
    pub iterations: usize,
}

fn distillable<T: Real>(scheme: Scheme, q: T) -> Result<bool> {
    Ok(d_c(&worst_case(scheme, q)?)? > ExtReal::Finite(T::zero()))
}

/// Bisection for the largest QBER at which the worst-case state still has
/// `D_C > 0`.
///
/// The sign of `D_C` must switch exactly once on a uniform grid over the
/// bracket; `D_C` itself need not be monotone (for BB84 it diverges to `−∞`
/// at `q = 1/3`).
pub fn threshold_search<T: Real>(scheme: Scheme, tol: f64) -> Result<ThresholdSearch<T>> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tol = {tol} must be positive"
        )));
    }
    let (a, b) = (T::lit(THRESHOLD_BRACKET.0), T::lit(THRESHOLD_BRACKET.1));
    let mut switches = 0;
    let mut prev = distillable(scheme, a)?;
    for k in 1..=MONOTONE_SAMPLES {
        let q = a + (b - a) * T::lit(k as f64 / MONOTONE_SAMPLES as f64);
        let cur = distillable(scheme, q)?;
        if cur != prev {
            switches += 1;
            if cur {
                return Err(Error::Postcondition(format!(
                    "{scheme}: D_C turns positive again at q = {q}"
                )));
            }
        }
        prev = cur;
    }
    if switches != 1 {
        return Err(Error::InvalidArgument(format!(
            "{scheme}: no sign change of D_C on [{a}, {b}]"
        )));
    }

    let tol = T::lit(tol);
    let (mut lo, mut hi) = (a, b);
    let mut iterations = 0;
    while hi - lo > tol && iterations < MAX_BISECTION {
        let mid = (lo + hi) * T::lit(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        if distillable(scheme, mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    Ok(ThresholdSearch {
        scheme,
        q_max: (lo + hi) * T::lit(0.5),
        lo,
        hi,
        iterations,
    })
}

pub fn threshold<T: Real>(scheme: Scheme, tol: f64) -> Result<T> {
    Ok(threshold_search(scheme, tol)?.q_max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Region {
    /// Some state on the fiber is separable.
    S,
    /// Entangled with `D_C ≤ 0`.
    A,
    /// Extendible for every `α3`.
    B,
    /// Extendible for some `α3`.
    C,
    /// Extendible for no `α3`.
    D,
}

impl Region {
    pub const ALL: [Region; 5] = [Region::S, Region::A, Region::B, Region::C, Region::D];

    pub fn name(self) -> &'static str {
        match self {
            Region::S => "S",
            Region::A => "A",
            Region::B => "B",
            Region::C => "C",
            Region::D => "D",
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Real + Serialize",
    deserialize = "T: Real + Deserialize<'de>"
))]
pub struct RegionVerdict<T> {
    pub region: Region,
    pub alpha1: T,
    pub alpha2: T,
    /// `log2(2α2²/(1 − α1²))`; `None` at the two points where it is `0/0`.
    pub d_c: Option<ExtReal<T>>,
}

/// Whether `(α1, α2)` is the projection of some Bell-diagonal state:
/// `α1 ≤ 1` and `α1 − √2|α2| ≥ −1`.
pub fn in_projected_space<T: Real>(alpha1: T, alpha2: T) -> bool {
    let tol = T::tol(STATE_TOL);
    alpha1 <= T::one() + tol && alpha1 - T::sqrt2() * alpha2.abs() >= -T::one() - tol
}

/// Largest `|α2|` inside regions S, A, B, C at this `α1` (`None` where the
/// region's cross-section is empty).
pub fn region_bounds<T: Real>(alpha1: T) -> [Option<T>; 4] {
    let nonneg = |v: T| if v >= T::zero() { Some(v) } else { None };
    let sep = nonneg(T::one() - alpha1).map(|v| v / T::sqrt2());
    let dc0 = nonneg(T::one() - alpha1 * alpha1).map(|v| (v * T::lit(0.5)).sqrt());
    let inner = cross_section_boundary(alpha1, CrossSection::Inner).map(T::sqrt);
    let outer = cross_section_boundary(alpha1, CrossSection::Outer).map(T::sqrt);
    [sep, dc0, inner, outer]
}

/// Region of `(α1, α2)`; the first region whose bound admits `|α2|` wins.
pub fn classify_region<T: Real>(alpha1: T, alpha2: T) -> Result<RegionVerdict<T>> {
    if !alpha1.is_finite() || !alpha2.is_finite() || !in_projected_space(alpha1, alpha2) {
        return Err(Error::NotAState(format!(
            "({alpha1}, {alpha2}) lies outside the projected state space"
        )));
    }
    let slack = T::tol(BOUNDARY_SLACK);
    let a = alpha2.abs();
    let region = region_bounds(alpha1)
        .iter()
        .zip(Region::ALL)
        .find(|(b, _)| b.is_some_and(|b| a <= b + slack))
        .map_or(Region::D, |(_, r)| r);
    let d_c = match d_c_alpha(&AlphaCoords::new(alpha1, alpha2, T::zero())) {
        Ok(d) => Some(d),
        Err(Error::UndefinedDc) => None,
        Err(e) => return Err(e),
    };
    Ok(RegionVerdict {
        region,
        alpha1,
        alpha2,
        d_c,
    })
}

/// `(α1, α2, α3)` at `samples` evenly spaced points of the fiber
/// `|α3| ≤ (1 − α1)/√2`.
fn fiber<T: Real>(alpha1: T, alpha2: T, samples: usize) -> impl Iterator<Item = AlphaCoords<T>> {
    let h = (T::one() - alpha1).max(T::zero()) / T::sqrt2();
    let n = samples.max(2) - 1;
    (0..=n).map(move |k| {
        let a3 = -h + (h + h) * T::lit(k as f64 / n as f64);
        AlphaCoords::new(alpha1, alpha2, a3)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FiberExtendibility {
    All,
    Some,
    None,
}

impl FiberExtendibility {
    pub fn name(self) -> &'static str {
        match self {
            FiberExtendibility::All => "all",
            FiberExtendibility::Some => "some",
            FiberExtendibility::None => "none",
        }
    }
}

/// How many sampled states on the `α3` fiber over `(α1, α2)` are extendible.
pub fn fiber_extendibility<T: Real>(
    alpha1: T,
    alpha2: T,
    samples: usize,
) -> Result<FiberExtendibility> {
    let (mut yes, mut no) = (false, false);
    for a in fiber(alpha1, alpha2, samples) {
        if has_symext(&a)? {
            yes = true;
        } else {
            no = true;
        }
    }
    Ok(match (yes, no) {
        (true, false) => FiberExtendibility::All,
        (true, true) => FiberExtendibility::Some,
        _ => FiberExtendibility::None,
    })
}

/// PPT test over sampled `α3`: whether some state on the fiber is separable.
pub fn fiber_has_separable<T: Real>(alpha1: T, alpha2: T, samples: usize) -> Result<bool> {
    for a in fiber(alpha1, alpha2, samples) {
        if a.to_probs()?.is_separable()? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Grid over `α1 ∈ [−1, 1]` and `α2 ∈ [0, √2]`, or `[−√2, √2]` with
/// `both_signs`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanGrid {
    pub n_alpha1: usize,
    pub n_alpha2: usize,
    pub both_signs: bool,
    pub fiber_samples: usize,
}

impl ScanGrid {
    pub fn square(n: usize) -> Self {
        Self {
            n_alpha1: n,
            n_alpha2: n,
            both_signs: false,
            fiber_samples: FIBER_SAMPLES,
        }
    }

    pub fn alpha1<T: Real>(&self, i: usize) -> T {
        -T::one() + T::lit(2.0 * i as f64 / (self.n_alpha1 - 1) as f64)
    }

    pub fn alpha2<T: Real>(&self, j: usize) -> T {
        let s = T::sqrt2();
        let lo = if self.both_signs { -s } else { T::zero() };
        lo + (s - lo) * T::lit(j as f64 / (self.n_alpha2 - 1) as f64)
    }

    /// Spacing of the `α2` axis.
    pub fn alpha2_step<T: Real>(&self) -> T {
        self.alpha2::<T>(1) - self.alpha2::<T>(0)
    }
}

pub const CSV_HEADER: &str = "alpha1,alpha2,region,d_c,symext";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Real + Serialize",
    deserialize = "T: Real + Deserialize<'de>"
))]
pub struct ScanRecord<T> {
    #[serde(flatten)]
    pub verdict: RegionVerdict<T>,
    /// Extendibility along the sampled `α3` fiber.
    pub symext: FiberExtendibility,
}

impl<T: Real> ScanRecord<T> {
    /// Fields in [`CSV_HEADER`] order; an undefined `d_c` prints as `nan`.
    pub fn csv_fields(&self) -> [String; 5] {
        let v = &self.verdict;
        let d = match v.d_c {
            None => "nan".to_string(),
            Some(ExtReal::Finite(x)) => g17(x.to_f64_lossy()),
            Some(other) => other.to_string(),
        };
        [
            g17(v.alpha1.to_f64_lossy()),
            g17(v.alpha2.to_f64_lossy()),
            v.region.to_string(),
            d,
            self.symext.name().to_string(),
        ]
    }
}

/// Worker count from [`THREADS_ENV`], if set.
pub fn scan_threads() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::InvalidArgument(format!(
                "{THREADS_ENV} = '{s}' is not a positive integer"
            ))),
        },
    }
}

/// Classifies every grid point inside the projected state space.
///
/// Records come in row-major order, one row per `α1` value with `α2`
/// increasing; the order does not depend on the worker count.
pub fn region_scan<T: Real>(grid: &ScanGrid) -> Result<Vec<ScanRecord<T>>> {
    if grid.n_alpha1 < 2 || grid.n_alpha2 < 2 {
        return Err(Error::InvalidArgument(
            "scan needs at least 2 points per axis".into(),
        ));
    }
    let row = |i: usize| -> Result<Vec<ScanRecord<T>>> {
        let a1 = grid.alpha1::<T>(i);
        let mut out = Vec::with_capacity(grid.n_alpha2);
        for j in 0..grid.n_alpha2 {
            let a2 = grid.alpha2::<T>(j);
            if !in_projected_space(a1, a2) {
                continue;
            }
            out.push(ScanRecord {
                verdict: classify_region(a1, a2)?,
                symext: fiber_extendibility(a1, a2, grid.fiber_samples)?,
            });
        }
        Ok(out)
    };
    let run = || -> Result<Vec<ScanRecord<T>>> {
        let rows: Vec<Vec<ScanRecord<T>>> = (0..grid.n_alpha1)
            .into_par_iter()
            .map(row)
            .collect::<Result<_>>()?;
        Ok(rows.into_iter().flatten().collect())
    };
    match scan_threads()? {
        None => run(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Internal(format!("thread pool: {e}")))?
            .install(run),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distill::{bstep, constant_dc_alpha2, rounds_to_break, run_bsteps, Termination};

    const S2: f64 = std::f64::consts::SQRT_2;

    fn close(p: &BellProbs<f64>, want: [f64; 4]) -> bool {
        p.as_array()
            .iter()
            .zip(want)
            .all(|(a, b)| (a - b).abs() < 1e-15)
    }

    #[test]
    fn scheme_state_examples() {
        let p = SchemeState::six_state(0.2).unwrap().probs().unwrap();
        assert!(close(&p, [0.7, 0.1, 0.1, 0.1]));
        let p = scheme_state(&SchemeState::bb84(0.2, 0.0).unwrap()).unwrap();
        assert!(close(&p, [0.6, 0.2, 0.0, 0.2]));
        let p = SchemeState::bb84(0.2, 0.1).unwrap().probs().unwrap();
        assert!(close(&p, [0.7, 0.1, 0.1, 0.1]));
    }

    #[test]
    fn scheme_state_rejects_out_of_range() {
        assert!(SchemeState::six_state(0.5).is_err());
        assert!(SchemeState::six_state(-0.1).is_err());
        assert!(SchemeState::bb84(0.2, 0.11).is_err());
        assert!(SchemeState::bb84(0.2, -1e-3).is_err());
        assert!(SchemeState::new(Scheme::SixState, 0.2, 0.05).is_err());
        assert!(SchemeState::six_state(f64::NAN).is_err());
    }

    #[test]
    fn scheme_parses() {
        assert_eq!("six-state".parse::<Scheme>().unwrap(), Scheme::SixState);
        assert_eq!("BB84".parse::<Scheme>().unwrap(), Scheme::Bb84);
        assert!("sarg04".parse::<Scheme>().is_err());
        assert_eq!(
            serde_json::to_string(&Scheme::SixState).unwrap(),
            "\"six-state\""
        );
    }

    #[test]
    fn bb84_worst_case_examples() {
        let p = bb84_worst_case(0.2).unwrap();
        assert!(close(&p, [0.6, 0.2, 0.0, 0.2]));
        assert!(d_c(&p).unwrap().finite().unwrap().abs() < 1e-12);

        let p = bb84_worst_case(0.1).unwrap();
        assert!(close(&p, [0.8, 0.1, 0.0, 0.1]));
        let want = (0.49f64 / 0.09).log2();
        assert!((d_c(&p).unwrap().finite().unwrap() - want).abs() < 1e-12);

        assert!(close(&bb84_worst_case(0.0).unwrap(), [1.0, 0.0, 0.0, 0.0]));

        // above q = 1/3 the minimizing t is interior and p_I = p_z
        let p = bb84_worst_case(0.35f64).unwrap();
        assert!((p.p_i() - p.p_z()).abs() < 1e-15);
        assert!(d_c(&p).unwrap() < ExtReal::Finite(-50.0));
    }

    #[test]
    fn thresholds() {
        let q = threshold::<f64>(Scheme::SixState, 1e-9).unwrap();
        assert!((q - (5.0 - 5f64.sqrt()) / 10.0).abs() < 1e-9);
        let q = threshold::<f64>(Scheme::Bb84, 1e-9).unwrap();
        assert!((q - 0.2).abs() < 1e-9);

        let s = threshold_search::<f64>(Scheme::SixState, 1e-12).unwrap();
        assert!(s.hi - s.lo <= 1e-12 && s.iterations <= MAX_BISECTION);
        assert!(threshold::<f64>(Scheme::Bb84, 0.0).is_err());
    }

    #[test]
    fn threshold_state_is_extendible() {
        let q = threshold::<f64>(Scheme::SixState, 1e-12).unwrap();
        let p = SchemeState::six_state(q).unwrap().probs().unwrap();
        assert!(has_symext(&p.to_alpha()).unwrap());
    }

    #[test]
    fn threshold_in_f32() {
        let q = threshold::<f32>(Scheme::SixState, 1e-6).unwrap();
        assert!((q - 0.276_393_2).abs() < 2e-6);
    }

    #[test]
    fn below_threshold_breaks_above_survives() {
        let q6 = threshold::<f64>(Scheme::SixState, 1e-12).unwrap();
        for k in 1..30 {
            let q = 0.01 * k as f64;
            for scheme in [Scheme::SixState, Scheme::Bb84] {
                let qmax = if scheme == Scheme::SixState { q6 } else { 0.2 };
                let p = worst_case(scheme, q).unwrap();
                if q < qmax - 1e-9 {
                    let r = rounds_to_break(&p).unwrap().expect("finite");
                    assert!(r >= 1 || !has_symext(&p.to_alpha()).unwrap());
                } else if q > qmax + 1e-9 {
                    assert_eq!(rounds_to_break(&p).unwrap(), None);
                    let t = run_bsteps(&p, 20).unwrap();
                    assert_eq!(t.terminated, Termination::NotDistillable);
                    assert!(t.steps.iter().all(|s| s.extendible), "{scheme} q = {q}");
                    assert!(has_symext(&bstep(&p).unwrap().p_out.to_alpha()).unwrap());
                }
            }
        }
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_region(0.0f64, 0.0).unwrap().region, Region::S);
        assert_eq!(classify_region(1.0f64, 0.0).unwrap().region, Region::S);
        assert_eq!(classify_region(1.0f64, 0.0).unwrap().d_c, None);
        assert_eq!(classify_region(0.0f64, 1.0 / S2).unwrap().region, Region::S);
        // just right of the point where the A/B and B/C borders touch
        assert_eq!(
            classify_region(1e-3f64, 1.0 / S2).unwrap().region,
            Region::B
        );
        assert_eq!(classify_region(0.5f64, 0.7).unwrap().region, Region::B);
        assert_eq!(classify_region(0.5f64, 0.9).unwrap().region, Region::C);
        assert_eq!(classify_region(0.5f64, 1.05).unwrap().region, Region::D);
        assert_eq!(classify_region(0.5f64, -0.9).unwrap().region, Region::C);
        assert!(classify_region(0.0f64, 1.0).is_err());
        assert!(classify_region(1.1f64, 0.0).is_err());
    }

    #[test]
    fn boundary_points_go_to_earlier_region() {
        for &a1 in &[0.35f64, 0.5, 0.8] {
            let [s, a, b, c] = region_bounds(a1).map(Option::unwrap);
            assert_eq!(classify_region(a1, s).unwrap().region, Region::S);
            assert_eq!(classify_region(a1, a).unwrap().region, Region::A);
            assert_eq!(classify_region(a1, b).unwrap().region, Region::B);
            assert_eq!(classify_region(a1, c).unwrap().region, Region::C);
        }
        // A/B and B/C borders meet at (0, 1/√2)
        let [_, a, b, _] = region_bounds(0.0f64);
        assert!((a.unwrap() - 1.0 / S2).abs() < 1e-15);
        assert!((b.unwrap() - 1.0 / S2).abs() < 1e-15);
    }

    #[test]
    fn region_order_is_monotone_in_alpha2() {
        for i in 1..100 {
            let a1 = i as f64 / 100.0;
            let mut last = Region::S;
            let top = (1.0 + a1) / S2;
            for j in 0..=400 {
                let a2 = top * j as f64 / 400.0;
                let r = classify_region(a1, a2).unwrap().region;
                assert!(r >= last, "a1 = {a1}, a2 = {a2}: {last} -> {r}");
                last = r;
            }
        }
    }

    #[test]
    fn regions_match_fiber_extendibility() {
        for i in 0..40 {
            let a1 = -0.975 + 0.05 * i as f64;
            let top = (1.0 + a1) / S2;
            for j in 0..40 {
                let a2 = top * (j as f64 + 0.5) / 40.0;
                let v = classify_region(a1, a2).unwrap();
                let bounds = region_bounds(a1);
                let near = bounds.iter().flatten().any(|b| (b - a2).abs() < 1e-3);
                if near {
                    continue;
                }
                let f = fiber_extendibility(a1, a2, 201).unwrap();
                match v.region {
                    Region::A | Region::B => assert_eq!(f, FiberExtendibility::All, "{v:?}"),
                    Region::C => assert_eq!(f, FiberExtendibility::Some, "{v:?}"),
                    // the ellipses bound the rank-one body only; below α1 = 1/3 its
                    // convex hull reaches past the outer ellipse
                    Region::D if a1 >= 1.0 / 3.0 => {
                        assert_eq!(f, FiberExtendibility::None, "{v:?}")
                    }
                    Region::D => assert_ne!(f, FiberExtendibility::All, "{v:?}"),
                    Region::S if a1 >= 0.0 => assert_eq!(f, FiberExtendibility::All, "{v:?}"),
                    Region::S => {}
                }
                assert_eq!(
                    fiber_has_separable(a1, a2, FIBER_SAMPLES).unwrap(),
                    v.region == Region::S,
                    "{v:?}"
                );
            }
        }
    }

    #[test]
    fn dc_two_curve_lies_outside_outer_ellipse() {
        for i in 0..=100 {
            let a1 = i as f64 / 100.0;
            let f = constant_dc_alpha2(a1, 2.0).powi(2);
            let g = cross_section_boundary(a1, CrossSection::Outer).unwrap();
            assert!((f - g - 2.0 * (a1 - 1.0).powi(2)).abs() < 1e-12);
        }
    }

    #[test]
    fn scan_small_grid() {
        let g = ScanGrid::square(3);
        let recs = region_scan::<f64>(&g).unwrap();
        assert!(recs.len() <= 9 && !recs.is_empty());
        for r in &recs {
            assert!(in_projected_space(r.verdict.alpha1, r.verdict.alpha2));
        }
        let again = region_scan::<f64>(&g).unwrap();
        assert_eq!(recs, again);
    }

    #[test]
    fn scan_order_is_row_major() {
        let mut g = ScanGrid::square(17);
        g.both_signs = true;
        let recs = region_scan::<f64>(&g).unwrap();
        for w in recs.windows(2) {
            let (a, b) = (&w[0].verdict, &w[1].verdict);
            assert!(a.alpha1 < b.alpha1 || (a.alpha1 == b.alpha1 && a.alpha2 < b.alpha2));
        }
        assert!(recs.iter().any(|r| r.verdict.alpha2 < 0.0));
    }

    #[test]
    fn csv_fields_format() {
        let r = ScanRecord {
            verdict: classify_region(0.5f64, 0.9).unwrap(),
            symext: FiberExtendibility::Some,
        };
        let f = r.csv_fields();
        assert_eq!(f[0], "0.5");
        assert_eq!(f[1], "0.90000000000000002");
        assert_eq!(f[2], "C");
        assert_eq!(f[4], "some");
        assert_eq!(CSV_HEADER.split(',').count(), f.len());
    }
}
