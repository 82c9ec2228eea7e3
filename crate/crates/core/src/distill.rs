//! Two-way advantage distillation: B-steps, classical advantage distillation
//! (CAD) on blocks of `n` pairs, and the distillability quantity
//!
//! ```text
//! D_C = log2[(p_I − p_z)² / ((p_I + p_z)(p_x + p_y))]
//! ```
//!
//! which is multiplied by `n` under CAD (doubled by a B-step).
//!
//! Both protocols act by plain powers on the pair sums and differences
//! `p_I ± p_z`, `p_x ± p_y` ([`ParityCoords`]). Outcomes carry those
//! coordinates alongside the rounded probabilities, and `D_C` is evaluated
//! from them in log space: after a few rounds `p_I − p_z` can be far below
//! the resolution of `p_I` itself.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize, Serializer};

use crate::bellstate::{AlphaCoords, BellProbs};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::symext::has_symext_parity;

/// Upper bound on the number of rounds [`rounds_to_break`] will report.
pub const MAX_BREAK_ROUNDS: u32 = 64;
/// Success probabilities below this are treated as underflow.
pub const MIN_SUCCESS_PROB: f64 = 1e-300;
/// Largest block size accepted by [`cad_brute_force`].
pub const MAX_BRUTE_FORCE_BLOCK: usize = 10;

/// A real number or one of `±∞`. Orders as `NegInf < Finite(_) < PosInf`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Deserialize)]
#[serde(from = "ExtRealRepr", bound = "T: Real")]
pub enum ExtReal<T> {
    NegInf,
    Finite(T),
    PosInf,
}

impl<T: Real> ExtReal<T> {
    pub fn from_float(x: T) -> Self {
        if x == T::infinity() {
            ExtReal::PosInf
        } else if x == T::neg_infinity() {
            ExtReal::NegInf
        } else {
            ExtReal::Finite(x)
        }
    }

    /// The value as a float, with IEEE infinities.
    pub fn to_float(self) -> T {
        match self {
            ExtReal::NegInf => T::neg_infinity(),
            ExtReal::Finite(x) => x,
            ExtReal::PosInf => T::infinity(),
        }
    }

    pub fn finite(self) -> Option<T> {
        match self {
            ExtReal::Finite(x) => Some(x),
            _ => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    /// Multiplication by a positive factor.
    pub fn scale(self, k: T) -> Self {
        debug_assert!(k > T::zero());
        match self {
            ExtReal::Finite(x) => ExtReal::Finite(x * k),
            other => other,
        }
    }

    pub fn cmp_float(self, x: T) -> Option<Ordering> {
        self.partial_cmp(&ExtReal::Finite(x))
    }

    pub fn to_f64(self) -> ExtReal<f64> {
        match self {
            ExtReal::NegInf => ExtReal::NegInf,
            ExtReal::Finite(x) => ExtReal::Finite(x.to_f64_lossy()),
            ExtReal::PosInf => ExtReal::PosInf,
        }
    }
}

impl<T: Real> fmt::Display for ExtReal<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::NegInf => f.write_str("-inf"),
            ExtReal::Finite(x) => write!(f, "{x}"),
            ExtReal::PosInf => f.write_str("inf"),
        }
    }
}

/// Finite values serialize as numbers, infinities as `"inf"` / `"-inf"`.
impl<T: Real + Serialize> Serialize for ExtReal<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtReal::NegInf => s.serialize_str("-inf"),
            ExtReal::Finite(x) => x.serialize(s),
            ExtReal::PosInf => s.serialize_str("inf"),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ExtRealRepr {
    Num(f64),
    Text(String),
}

impl<T: Real> From<ExtRealRepr> for ExtReal<T> {
    fn from(r: ExtRealRepr) -> Self {
        match r {
            ExtRealRepr::Num(x) => ExtReal::Finite(T::lit(x)),
            ExtRealRepr::Text(t) if t.starts_with('-') => ExtReal::NegInf,
            ExtRealRepr::Text(_) => ExtReal::PosInf,
        }
    }
}

/// `(p_I + p_z, p_I − p_z, p_x + p_y, p_x − p_y)` up to a common positive
/// scale, stored as natural logs of magnitudes plus the signs of the two
/// differences. Repeated B-steps square these ratios, so after `k` rounds
/// they are raised to the power `2ᵏ`; in log form that stays exact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParityCoords<T> {
    ln_sum_iz: T,
    ln_diff_iz: T,
    neg_iz: bool,
    ln_sum_xy: T,
    ln_diff_xy: T,
    neg_xy: bool,
}

fn ln_add<T: Real>(a: T, b: T) -> T {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == T::neg_infinity() {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

impl<T: Real> ParityCoords<T> {
    pub fn from_probs(p: &BellProbs<T>) -> Self {
        let d_iz = p.p_i() - p.p_z();
        let d_xy = p.p_x() - p.p_y();
        Self {
            ln_sum_iz: (p.p_i() + p.p_z()).ln(),
            ln_diff_iz: d_iz.abs().ln(),
            neg_iz: d_iz < T::zero(),
            ln_sum_xy: (p.p_x() + p.p_y()).ln(),
            ln_diff_xy: d_xy.abs().ln(),
            neg_xy: d_xy < T::zero(),
        }
    }

    /// Natural log of `(p_I + p_z) + (p_x + p_y)` at the stored scale.
    pub fn ln_total(&self) -> T {
        ln_add(self.ln_sum_iz, self.ln_sum_xy)
    }

    /// Rescales so that the sums add to one.
    pub fn normalized(&self) -> Result<Self> {
        let t = self.ln_total();
        if !t.is_finite() {
            return Err(Error::Degenerate(format!(
                "parity coordinates have log-total {t}"
            )));
        }
        Ok(self.shifted(-t))
    }

    fn shifted(&self, by: T) -> Self {
        Self {
            ln_sum_iz: self.ln_sum_iz + by,
            ln_diff_iz: self.ln_diff_iz + by,
            ln_sum_xy: self.ln_sum_xy + by,
            ln_diff_xy: self.ln_diff_xy + by,
            ..*self
        }
    }

    /// Every coordinate raised to the power `n`.
    pub fn powi(&self, n: u32) -> Self {
        let k = T::lit(n as f64);
        let odd = n % 2 == 1;
        Self {
            ln_sum_iz: self.ln_sum_iz * k,
            ln_diff_iz: self.ln_diff_iz * k,
            neg_iz: self.neg_iz && odd,
            ln_sum_xy: self.ln_sum_xy * k,
            ln_diff_xy: self.ln_diff_xy * k,
            neg_xy: self.neg_xy && odd,
        }
    }

    /// Normalized linear values `[p_I + p_z, p_I − p_z, p_x + p_y, p_x − p_y]`.
    pub fn linear(&self) -> Result<[T; 4]> {
        let n = self.normalized()?;
        let sgn = |neg: bool, v: T| if neg { -v } else { v };
        Ok([
            n.ln_sum_iz.exp(),
            sgn(n.neg_iz, n.ln_diff_iz.exp()),
            n.ln_sum_xy.exp(),
            sgn(n.neg_xy, n.ln_diff_xy.exp()),
        ])
    }

    pub fn to_probs(&self) -> Result<BellProbs<T>> {
        let [s_iz, d_iz, s_xy, d_xy] = self.linear()?;
        let h = T::lit(0.5);
        BellProbs::new([
            (h * (s_iz + d_iz)).max(T::zero()),
            (h * (s_xy + d_xy)).max(T::zero()),
            (h * (s_xy - d_xy)).max(T::zero()),
            (h * (s_iz - d_iz)).max(T::zero()),
        ])
    }

    /// `D_C`; independent of the common scale.
    pub fn d_c(&self) -> Result<ExtReal<T>> {
        let ninf = T::neg_infinity();
        let num_zero = self.ln_diff_iz == ninf;
        let den_zero = self.ln_sum_iz == ninf || self.ln_sum_xy == ninf;
        match (num_zero, den_zero) {
            (true, true) => Err(Error::UndefinedDc),
            (true, false) => Ok(ExtReal::NegInf),
            (false, true) => Ok(ExtReal::PosInf),
            (false, false) => {
                let ln = T::lit(2.0) * self.ln_diff_iz - self.ln_sum_iz - self.ln_sum_xy;
                Ok(ExtReal::Finite(ln / T::LN_2()))
            }
        }
    }
}

/// Anything `D_C` can be evaluated on.
pub trait DcSource<T> {
    fn parity(&self) -> ParityCoords<T>;
}

impl<T: Real> DcSource<T> for BellProbs<T> {
    fn parity(&self) -> ParityCoords<T> {
        ParityCoords::from_probs(self)
    }
}

impl<T: Real> DcSource<T> for ParityCoords<T> {
    fn parity(&self) -> ParityCoords<T> {
        *self
    }
}

impl<T: Real> DcSource<T> for DistillOutcome<T> {
    fn parity(&self) -> ParityCoords<T> {
        self.parity
    }
}

/// `D_C` of a state; `Err(UndefinedDc)` when numerator and denominator both
/// vanish.
pub fn d_c<T: Real, S: DcSource<T> + ?Sized>(s: &S) -> Result<ExtReal<T>> {
    s.parity().d_c()
}

/// `D_C` from α coordinates, `log2(2α2² / (1 − α1²))`.
pub fn d_c_alpha<T: Real>(alpha: &AlphaCoords<T>) -> Result<ExtReal<T>> {
    let [a1, a2, _] = alpha.xyz();
    let num = T::lit(2.0) * a2 * a2;
    let den = T::one() - a1 * a1;
    match (num == T::zero(), den <= T::zero()) {
        (true, true) => Err(Error::UndefinedDc),
        (true, false) => Ok(ExtReal::NegInf),
        (false, true) => Ok(ExtReal::PosInf),
        (false, false) => Ok(ExtReal::Finite((num / den).log2())),
    }
}

/// Result of a successful distillation step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistillOutcome<T> {
    pub p_out: BellProbs<T>,
    /// Normalized parity coordinates of `p_out`, carried at full precision.
    pub parity: ParityCoords<T>,
    pub success_prob: T,
}

impl<T: Real> DistillOutcome<T> {
    /// From unnormalized post-selected components; their total is the
    /// success probability.
    fn from_components(raw: ParityCoords<T>) -> Result<Self> {
        let ln_success = raw.ln_total();
        if !(ln_success >= T::lit(MIN_SUCCESS_PROB.ln())) {
            return Err(Error::Degenerate(format!(
                "success probability exp({ln_success}) underflows"
            )));
        }
        let parity = raw.shifted(-ln_success);
        Ok(Self {
            p_out: parity.to_probs()?,
            parity,
            success_prob: ln_success.exp(),
        })
    }
}

/// One B-step on parity coordinates.
pub fn bstep_parity<T: Real>(c: &ParityCoords<T>) -> Result<DistillOutcome<T>> {
    let c = c.normalized()?;
    DistillOutcome::from_components(c.powi(2))
        .map_err(|_| Error::Degenerate("B-step denominator vanishes".into()))
}

/// One B-step: keep the first of two pairs when their bit parities agree.
///
/// `p_out = ((p_I² + p_z²), (p_x² + p_y²), 2p_x p_y, 2p_I p_z) / N` with
/// success probability `N = (p_I + p_z)² + (p_x + p_y)²`.
pub fn bstep<T: Real>(p: &BellProbs<T>) -> Result<DistillOutcome<T>> {
    bstep_parity(&ParityCoords::from_probs(p))
}

/// Subnormalized CAD components on a block of `n` pairs, in `(I, x, y, z)`
/// order: `½[(p_I + p_z)ⁿ ± (p_I − p_z)ⁿ]` and `½[(p_x + p_y)ⁿ ± (p_x − p_y)ⁿ]`.
pub fn cad_components<T: Real>(p: &BellProbs<T>, n: u32) -> [T; 4] {
    let h = T::lit(0.5);
    let k = n as i32;
    let (a, b) = ((p.p_i() + p.p_z()).powi(k), (p.p_i() - p.p_z()).powi(k));
    let (x, y) = ((p.p_x() + p.p_y()).powi(k), (p.p_x() - p.p_y()).powi(k));
    [h * (a + b), h * (x + y), h * (x - y), h * (a - b)]
}

pub fn cad_parity<T: Real>(c: &ParityCoords<T>, n: u32) -> Result<DistillOutcome<T>> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "CAD block size must be at least 1".into(),
        ));
    }
    DistillOutcome::from_components(c.normalized()?.powi(n))
}

/// CAD on a block of `n` pairs: parities of all bits are announced against
/// the first, and the first pair is kept only if they all agree.
pub fn cad<T: Real>(p: &BellProbs<T>, n: u32) -> Result<DistillOutcome<T>> {
    cad_parity(&ParityCoords::from_probs(p), n)
}

/// CAD components by enumerating all `4ⁿ` Pauli error patterns of a block.
///
/// Each pair carries a bit error (`x`, `y`) and/or a phase error (`y`, `z`).
/// A block is kept when every pair has the same bit value relative to the
/// first; the kept pair's phase error is the parity of all phase errors.
pub fn cad_brute_force<T: Real>(p: &BellProbs<T>, n: usize) -> Result<[T; 4]> {
    if n == 0 || n > MAX_BRUTE_FORCE_BLOCK {
        return Err(Error::InvalidArgument(format!(
            "brute-force block size must be in 1..={MAX_BRUTE_FORCE_BLOCK}"
        )));
    }
    // (bit, phase) per Bell index I, x, y, z
    const FLAGS: [(u8, u8); 4] = [(0, 0), (1, 0), (1, 1), (0, 1)];
    let probs = p.as_array();
    let mut out = [T::zero(); 4];
    for pattern in 0..4usize.pow(n as u32) {
        let mut code = pattern;
        let mut weight = T::one();
        let mut bits = 0u8;
        let mut phase = 0u8;
        let mut first_bit = None;
        let mut kept = true;
        for _ in 0..n {
            let j = code % 4;
            code /= 4;
            weight *= probs[j];
            let (b, ph) = FLAGS[j];
            phase ^= ph;
            match first_bit {
                None => first_bit = Some(b),
                Some(f) if f != b => kept = false,
                _ => {}
            }
            bits = b;
        }
        if !kept {
            continue;
        }
        let idx = match (bits, phase) {
            (0, 0) => 0,
            (1, 0) => 1,
            (1, 1) => 2,
            _ => 3,
        };
        out[idx] += weight;
    }
    Ok(out)
}

/// `α2 ≥ 0` on the constant-`D_C` ellipse `α1² + 2·2^{−d}·α2² = 1`.
pub fn constant_dc_alpha2<T: Real>(alpha1: T, d: T) -> T {
    ((T::one() - alpha1 * alpha1).max(T::zero()) * (d - T::one()).exp2()).sqrt()
}

/// Number of B-steps after which the state is guaranteed to have lost its
/// symmetric extension (`2ʳ·D_C ≥ 2`), or `None` when `D_C ≤ 0`.
///
/// The state after `r` steps is checked with [`has_symext_parity`] on its
/// full-precision pair sums; an extendible result is reported as a
/// postcondition failure.
pub fn rounds_to_break<T: Real>(p: &BellProbs<T>) -> Result<Option<u32>> {
    let d = d_c(p)?;
    if d <= ExtReal::Finite(T::zero()) {
        return Ok(None);
    }
    let two = T::lit(2.0);
    let mut r = 0u32;
    while d.scale(two.powi(r as i32)) < ExtReal::Finite(two) {
        r += 1;
        if r > MAX_BREAK_ROUNDS {
            return Err(Error::InvalidArgument(format!(
                "D_C = {d} needs more than {MAX_BREAK_ROUNDS} B-steps"
            )));
        }
    }
    let mut c = ParityCoords::from_probs(p);
    for _ in 0..r {
        c = bstep_parity(&c)?.parity;
    }
    let after = c.to_probs()?;
    if has_symext_parity(c.linear()?) {
        return Err(Error::Postcondition(format!(
            "state {:?} after {r} B-steps still has a symmetric extension",
            after.as_array()
        )));
    }
    Ok(Some(r))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    Initial,
    BStep,
    /// Phase-error correction; needs no Bob→Alice message, so it cannot
    /// break an extension. Recorded without changing the state.
    PStep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    BrokeExtension,
    MaxRounds,
    NotDistillable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Real + Serialize + Deserialize<'de>"))]
pub struct TraceStep<T: Real + Serialize> {
    pub round: u32,
    pub kind: StepKind,
    pub p: BellProbs<T>,
    pub alpha: AlphaCoords<T>,
    pub d_c: ExtReal<T>,
    /// Probability of this step succeeding (1 for the initial record and P-steps).
    pub success_prob: T,
    pub extendible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Real + Serialize + Deserialize<'de>"))]
pub struct DistillTrace<T: Real + Serialize> {
    pub steps: Vec<TraceStep<T>>,
    pub terminated: Termination,
}

impl<T: Real + Serialize> DistillTrace<T> {
    /// One JSON object per step, then a final `{"terminated": ...}` line.
    pub fn to_json_lines(&self) -> serde_json::Result<String> {
        let mut out = String::new();
        for s in &self.steps {
            out.push_str(&crate::output::to_json(s)?);
            out.push('\n');
        }
        out.push_str(&crate::output::to_json(
            &serde_json::json!({ "terminated": self.terminated }),
        )?);
        out.push('\n');
        Ok(out)
    }

    pub fn last(&self) -> &TraceStep<T> {
        self.steps.last().expect("trace has an initial record")
    }

    pub fn b_steps(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| s.kind == StepKind::BStep)
            .count()
    }
}

fn record<T: Real + Serialize>(
    round: u32,
    kind: StepKind,
    c: &ParityCoords<T>,
    success_prob: T,
) -> Result<TraceStep<T>> {
    let p = c.to_probs()?;
    let alpha = p.to_alpha();
    Ok(TraceStep {
        round,
        kind,
        d_c: c.d_c()?,
        extendible: has_symext_parity(c.linear()?),
        p,
        alpha,
        success_prob,
    })
}

/// Applies `schedule` in order, stopping early once the state loses its
/// symmetric extension.
pub fn run_schedule<T: Real + Serialize>(
    p: &BellProbs<T>,
    schedule: impl IntoIterator<Item = StepKind>,
) -> Result<DistillTrace<T>> {
    let mut c = ParityCoords::from_probs(p);
    let mut steps = vec![record(0, StepKind::Initial, &c, T::one())?];
    let mut round = 0;
    for kind in schedule {
        if !steps.last().expect("non-empty").extendible {
            return Ok(DistillTrace {
                steps,
                terminated: Termination::BrokeExtension,
            });
        }
        let success = match kind {
            StepKind::Initial => continue,
            StepKind::PStep => T::one(),
            StepKind::BStep => {
                let o = bstep_parity(&c)?;
                c = o.parity;
                o.success_prob
            }
        };
        round += 1;
        steps.push(record(round, kind, &c, success)?);
    }
    let last = steps.last().expect("non-empty");
    let terminated = if !last.extendible {
        Termination::BrokeExtension
    } else if last.d_c <= ExtReal::Finite(T::zero()) {
        Termination::NotDistillable
    } else {
        Termination::MaxRounds
    };
    Ok(DistillTrace { steps, terminated })
}

/// Up to `max_rounds` B-steps.
pub fn run_bsteps<T: Real + Serialize>(
    p: &BellProbs<T>,
    max_rounds: u32,
) -> Result<DistillTrace<T>> {
    run_schedule(p, (0..max_rounds).map(|_| StepKind::BStep))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;
    use crate::symext::has_symext;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bp(p: [f64; 4]) -> BellProbs<f64> {
        BellProbs::new(p).unwrap()
    }

    fn close(a: [f64; 4], b: [f64; 4], tol: f64) -> bool {
        a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn bstep_examples() {
        let o = bstep(&bp([0.7, 0.1, 0.1, 0.1])).unwrap();
        assert!((o.success_prob - 0.68).abs() < 1e-15);
        let want = [0.5 / 0.68, 0.02 / 0.68, 0.02 / 0.68, 0.14 / 0.68];
        assert!(close(o.p_out.as_array(), want, 1e-15));

        let o = bstep(&bp([1.0, 0.0, 0.0, 0.0])).unwrap();
        assert_eq!(o.p_out.as_array(), [1.0, 0.0, 0.0, 0.0]);
        assert_eq!(o.success_prob, 1.0);

        let o = bstep(&BellProbs::maximally_mixed()).unwrap();
        assert!(close(o.p_out.as_array(), [0.25; 4], 1e-16));
        assert_eq!(o.success_prob, 0.5);
    }

    #[test]
    fn cad_examples() {
        let p = bp([0.55, 0.2, 0.05, 0.2]);
        let o = cad(&p, 1).unwrap();
        assert!(close(o.p_out.as_array(), p.as_array(), 1e-15));
        assert!((o.success_prob - 1.0).abs() < 1e-15);

        let b = bstep(&p).unwrap();
        let c = cad(&p, 2).unwrap();
        assert!(close(c.p_out.as_array(), b.p_out.as_array(), 1e-15));
        assert!((c.success_prob - b.success_prob).abs() < 1e-15);

        let b2 = bstep(&b.p_out).unwrap();
        let c4 = cad(&p, 4).unwrap();
        assert!(close(c4.p_out.as_array(), b2.p_out.as_array(), 1e-12));
        // the second round needs two successful first-round outputs
        assert!((c4.success_prob - b.success_prob.powi(2) * b2.success_prob).abs() < 1e-12);

        assert!(cad(&p, 0).is_err());
        assert!(matches!(
            cad(&bp([0.5, 0.25, 0.0, 0.25]), 5000),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn d_c_examples() {
        let d = d_c(&bp([0.7, 0.1, 0.1, 0.1])).unwrap().finite().unwrap();
        assert!((d - 2.25f64.log2()).abs() < 1e-14);

        let q = (5.0 - 5f64.sqrt()) / 10.0;
        let p = bp([1.0 - 1.5 * q, q / 2.0, q / 2.0, q / 2.0]);
        assert!(d_c(&p).unwrap().finite().unwrap().abs() < 1e-14);

        let d = d_c(&bp([0.6, 0.2, 0.0, 0.2])).unwrap().finite().unwrap();
        assert!(d.abs() < 1e-15);

        assert_eq!(d_c(&bp([0.3, 0.2, 0.2, 0.3])).unwrap(), ExtReal::NegInf);
        assert_eq!(d_c(&bp([0.7, 0.0, 0.0, 0.3])).unwrap(), ExtReal::PosInf);
        assert_eq!(d_c(&bp([1.0, 0.0, 0.0, 0.0])).unwrap(), ExtReal::PosInf);
        assert!(matches!(
            d_c(&bp([0.5, 0.0, 0.0, 0.5])),
            Err(Error::UndefinedDc)
        ));
        assert!(matches!(
            d_c(&bp([0.0, 0.5, 0.5, 0.0])),
            Err(Error::UndefinedDc)
        ));
    }

    #[test]
    fn d_c_is_independent_of_alpha3() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..2000 {
            let p = sampling::uniform_state(&mut rng);
            let a = d_c(&p).unwrap();
            let b = d_c_alpha(&p.to_alpha()).unwrap();
            if let (Some(a), Some(b)) = (a.finite(), b.finite()) {
                assert!((a - b).abs() < 1e-9 * (1.0 + a.abs()), "{p:?}");
            }
        }
    }

    #[test]
    fn ext_real_order_and_json() {
        let xs = [
            ExtReal::NegInf,
            ExtReal::Finite(-3.0),
            ExtReal::Finite(2.0),
            ExtReal::PosInf,
        ];
        for w in xs.windows(2) {
            assert!(w[0] < w[1]);
        }
        assert_eq!(ExtReal::Finite(1.5).scale(2.0), ExtReal::Finite(3.0));
        assert_eq!(ExtReal::<f64>::NegInf.scale(2.0), ExtReal::NegInf);
        assert_eq!(
            serde_json::to_string(&ExtReal::<f64>::PosInf).unwrap(),
            "\"inf\""
        );
        assert_eq!(
            serde_json::to_string(&ExtReal::Finite(0.5f64)).unwrap(),
            "0.5"
        );
        let back: ExtReal<f64> = serde_json::from_str("\"-inf\"").unwrap();
        assert_eq!(back, ExtReal::NegInf);
        assert_eq!(ExtReal::from_float(f64::INFINITY), ExtReal::PosInf);
    }

    #[test]
    fn constant_dc_examples() {
        assert!((constant_dc_alpha2(0.0, 0.0) - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((constant_dc_alpha2(0.0, 2.0) - 2f64.sqrt()).abs() < 1e-15);
        assert!(constant_dc_alpha2(1.0 - 1e-12, 3.0) < 1e-5);
        for k in 1..20 {
            let a1 = -0.95 + 0.1 * k as f64;
            let d = 0.7;
            let a2 = constant_dc_alpha2(a1, d);
            let got = d_c_alpha(&AlphaCoords::new(a1, a2, 0.0))
                .unwrap()
                .finite()
                .unwrap();
            assert!((got - d).abs() < 1e-12);
        }
    }

    #[test]
    fn rounds_to_break_examples() {
        let six = |q: f64| bp([1.0 - 1.5 * q, q / 2.0, q / 2.0, q / 2.0]);
        assert_eq!(rounds_to_break(&six(0.2)).unwrap(), Some(1));
        let after = bstep(&six(0.2)).unwrap();
        assert!((d_c(&after).unwrap().finite().unwrap() - 2.0 * 2.25f64.log2()).abs() < 1e-13);
        assert!(!has_symext(&after.p_out.to_alpha()).unwrap());

        assert_eq!(
            rounds_to_break(&bp([0.9, 0.03, 0.03, 0.04])).unwrap(),
            Some(0)
        );
        assert_eq!(rounds_to_break(&six(0.28)).unwrap(), None);
    }

    #[test]
    fn brute_force_matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let p = sampling::uniform_state(&mut rng);
            for n in 1..=5 {
                let bf = cad_brute_force(&p, n).unwrap();
                let cf = cad_components(&p, n as u32);
                assert!(close(bf, cf, 1e-14), "{p:?} n={n}");
            }
        }
        assert!(cad_brute_force(&BellProbs::<f64>::maximally_mixed(), 0).is_err());
    }

    #[test]
    fn trace_runs_and_serializes() {
        let six = |q: f64| bp([1.0 - 1.5 * q, q / 2.0, q / 2.0, q / 2.0]);
        let t = run_bsteps(&six(0.15), 20).unwrap();
        assert_eq!(t.terminated, Termination::BrokeExtension);
        assert!(!t.last().extendible);
        for w in t.steps.windows(2) {
            let (a, b) = (w[0].d_c.finite().unwrap(), w[1].d_c.finite().unwrap());
            assert!((b - 2.0 * a).abs() < 1e-12);
            assert!(w[1].success_prob > 0.0 && w[1].success_prob <= 1.0);
        }
        let js = t.to_json_lines().unwrap();
        assert_eq!(js.lines().count(), t.steps.len() + 1);
        assert!(js.lines().last().unwrap().contains("broke_extension"));

        let t = run_bsteps(&six(0.3), 20).unwrap();
        assert_eq!(t.terminated, Termination::NotDistillable);
        assert_eq!(t.b_steps(), 20);
        assert!(t.steps.iter().all(|s| s.extendible));

        let t = run_schedule(
            &six(0.2),
            [StepKind::PStep, StepKind::BStep, StepKind::PStep],
        )
        .unwrap();
        assert_eq!(t.steps[1].kind, StepKind::PStep);
        assert_eq!(t.steps[1].p, t.steps[0].p);
        assert_eq!(t.terminated, Termination::BrokeExtension);
    }

    #[test]
    fn large_dc_states_are_not_extendible() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..20_000 {
            let p = sampling::uniform_state(&mut rng);
            if let Ok(d) = d_c(&p) {
                if d >= ExtReal::Finite(2.0) {
                    assert!(!has_symext(&p.to_alpha()).unwrap(), "{p:?}");
                }
            }
        }
    }

    #[test]
    fn nonpositive_dc_extendible_when_alpha1_nonnegative() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..20_000 {
            let p = sampling::uniform_state(&mut rng);
            let a = p.to_alpha();
            if a.a1() < 0.0 {
                continue;
            }
            if let Ok(d) = d_c(&p) {
                if d <= ExtReal::Finite(0.0) {
                    assert!(has_symext(&a).unwrap(), "{p:?}");
                }
            }
        }
    }

    #[test]
    fn nonpositive_dc_can_fail_for_negative_alpha1() {
        let p = bp([0.05, 0.8, 0.1, 0.05]);
        assert_eq!(d_c(&p).unwrap(), ExtReal::NegInf);
        assert!(!has_symext(&p.to_alpha()).unwrap());
    }

    fn state() -> impl Strategy<Value = BellProbs<f64>> {
        (0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0)
            .prop_filter("nonzero", |w| w.0 + w.1 + w.2 + w.3 > 1e-3)
            .prop_map(|w| BellProbs::from_weights([w.0, w.1, w.2, w.3]).unwrap())
    }

    proptest! {
        #[test]
        fn doubling_law(p in state()) {
            if let Ok(ExtReal::Finite(d)) = d_c(&p) {
                let o = bstep(&p).unwrap();
                let d2 = d_c(&o).unwrap().finite().unwrap();
                prop_assert!((d2 - 2.0 * d).abs() <= 1e-12);
                prop_assert!(o.success_prob > 0.0 && o.success_prob <= 1.0 + 1e-15);
            }
        }

        #[test]
        fn cad_scaling(p in state(), n in 1u32..=16) {
            if let Ok(ExtReal::Finite(d)) = d_c(&p) {
                let o = cad(&p, n).unwrap();
                let dn = d_c(&o).unwrap().finite().unwrap();
                prop_assert!((dn - n as f64 * d).abs() <= 1e-11);
            }
        }

        #[test]
        fn cad_powers_of_two_compose(p in state(), k in 0u32..4) {
            let mut c = ParityCoords::from_probs(&p);
            let mut prob = 1.0;
            for _ in 0..k {
                let o = bstep_parity(&c).unwrap();
                c = o.parity;
                prob = prob * prob * o.success_prob;
            }
            let o = cad(&p, 1 << k).unwrap();
            prop_assert!(close(o.p_out.as_array(), c.to_probs().unwrap().as_array(), 1e-12));
            prop_assert!((o.success_prob - prob).abs() <= 1e-12);
        }

        #[test]
        fn sign_is_preserved(p in state(), n in 1u32..8) {
            if let Ok(d) = d_c(&p) {
                if d <= ExtReal::Finite(0.0) {
                    let o = cad(&p, n).unwrap();
                    prop_assert!(d_c(&o).unwrap() <= ExtReal::Finite(0.0));
                }
            }
        }
    }
}
