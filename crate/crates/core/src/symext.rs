//! Closed-form symmetric extendibility of Bell-diagonal states.
//!
//! With `D = α2² − α3²`, a Bell-diagonal state has a symmetric extension iff
//! at least one of
//!
//! ```text
//! (a)  4α1·D − D² − 4α1²(α2² + α3²) ≥ 0
//! (b)   D − 2√2·α1·|α2| ≥ 0
//! (c)  −D + 2√2·α1·|α3| ≥ 0
//! ```
//!
//! holds. Extendible states come with an explicit certificate: a PSD
//! `3×3` matrix `Z` with `Tr[F_i Z] = α_i` and `Tr Z ≤ 1`, which lifts to an
//! `8×8` extension `ρ_ABB′ = ½·1_F ⊗ (Z ⊕ (1 − Tr Z)|Ψ−⟩⟨Ψ−|)`.

use serde::{Deserialize, Serialize};

use crate::bellstate::{AlphaCoords, BellProbs, STATE_TOL};
use crate::error::{Error, Result};
use crate::matrix::{HermMat, MatrixRows};
use crate::scalar::Real;
use crate::symmetry::{f_matrices, swap_bb, TripletBlock};

/// Additive slack on the three extendibility inequalities.
pub const BOUNDARY_SLACK: f64 = 1e-12;
/// Smallest eigenvalue accepted for a certificate `Z`.
pub const CERT_PSD_TOL: f64 = 1e-10;
/// Allowed excess of `Tr Z` over one.
pub const CERT_TRACE_TOL: f64 = 1e-9;

/// Values of the three extendibility inequalities; the state is extendible
/// iff the largest is non-negative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymextConditions<T> {
    pub rank_one: T,
    pub cone_alpha2: T,
    pub cone_alpha3: T,
}

impl<T: Real> SymextConditions<T> {
    pub fn evaluate(alpha: &AlphaCoords<T>) -> Self {
        let [a1, a2, a3] = alpha.xyz();
        let d = a2 * a2 - a3 * a3;
        let four = T::lit(4.0);
        let two_s2 = T::lit(2.0) * T::sqrt2();
        Self {
            rank_one: four * a1 * d - d * d - four * a1 * a1 * (a2 * a2 + a3 * a3),
            cone_alpha2: d - two_s2 * a1 * a2.abs(),
            cone_alpha3: -d + two_s2 * a1 * a3.abs(),
        }
    }

    /// Largest of the three values (signed; `≥ 0` means extendible).
    pub fn margin(&self) -> T {
        self.rank_one.max(self.cone_alpha2).max(self.cone_alpha3)
    }

    pub fn holds(&self) -> bool {
        self.margin() >= -T::tol(BOUNDARY_SLACK)
    }
}

fn check_state<T: Real>(alpha: &AlphaCoords<T>) -> Result<()> {
    if alpha.is_valid_state() {
        Ok(())
    } else {
        Err(Error::NotAState(format!(
            "alpha {:?} is outside the Bell-diagonal state space",
            alpha.alpha
        )))
    }
}

/// Closed-form extendibility decision.
pub fn has_symext<T: Real>(alpha: &AlphaCoords<T>) -> Result<bool> {
    check_state(alpha)?;
    Ok(SymextConditions::evaluate(alpha).holds())
}

/// Scale-aware variant of [`has_symext`] for states near the corner
/// `α = (1, 0, 0)`, where all three inequalities fall far below the additive
/// slack; see [`has_symext_parity`].
pub fn has_symext_relative<T: Real>(alpha: &AlphaCoords<T>) -> Result<bool> {
    check_state(alpha)?;
    let [a1, a2, a3] = alpha.xyz();
    let h = T::lit(0.5);
    let s = T::sqrt2();
    Ok(has_symext_parity([
        (T::one() + a1) * h,
        a2 / s,
        (T::one() - a1) * h,
        a3 / s,
    ]))
}

/// The extendibility inequalities in terms of the pair sums
/// `[u, a, v, b] = [p_I + p_z, p_I − p_z, p_x + p_y, p_x − p_y]`, so that
/// `1 − α1 = 2v` keeps full relative precision when `v` is tiny.
///
/// With `α1 = u − v` the rank-one inequality reads
/// `16α1(a²v − b²u) − 4(a² − b²)²`, and each inequality is compared with
/// `1e-12` times the sum of the magnitudes of its terms.
pub fn has_symext_parity<T: Real>(sums: [T; 4]) -> bool {
    let [u, a, v, b] = sums;
    let a1 = u - v;
    let (aa, bb) = (a * a, b * b);
    let e = aa - bb;
    let (four, sixteen) = (T::lit(4.0), T::lit(16.0));
    let slack = T::tol(BOUNDARY_SLACK);
    let t1 = sixteen * a1 * aa * v;
    let t2 = sixteen * a1 * bb * u;
    let t3 = four * e * e;
    let two = T::lit(2.0);
    let checks = [
        (t1 - t2 - t3, t1.abs() + t2.abs() + t3),
        (
            two * e - four * a1 * a.abs(),
            two * (aa + bb) + four * (a1 * a).abs(),
        ),
        (
            -two * e + four * a1 * b.abs(),
            two * (aa + bb) + four * (a1 * b).abs(),
        ),
    ];
    checks.iter().any(|&(val, scale)| val >= -slack * scale)
}

/// Signed distance proxy to the extendibility boundary (see
/// [`SymextConditions::margin`]).
pub fn symext_margin<T: Real>(alpha: &AlphaCoords<T>) -> Result<T> {
    check_state(alpha)?;
    Ok(SymextConditions::evaluate(alpha).margin())
}

/// Trace of the unique rank-one `Z` meeting the moment constraints,
/// `(D² + 4α1²(α2² + α3²)) / (4α1·D)` with `D = α2² − α3²`.
///
/// A value `≤ 1` proves extendibility. Fails when `α1·D ≤ 0`, where no
/// positive semidefinite rank-one solution exists.
pub fn rank1_trace<T: Real>(alpha: &AlphaCoords<T>) -> Result<T> {
    let [a1, a2, a3] = alpha.xyz();
    let d = a2 * a2 - a3 * a3;
    let den = T::lit(4.0) * a1 * d;
    if !(den > T::zero()) {
        return Err(Error::Degenerate(format!(
            "no PSD rank-one Z: 4·α1·(α2² − α3²) = {den}"
        )));
    }
    Ok((d * d + T::lit(4.0) * a1 * a1 * (a2 * a2 + a3 * a3)) / den)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    RankOne,
    RankTwo,
    BoundaryVertex,
}

/// Primal certificate of extendibility.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtCertificate<T> {
    pub kind: CertificateKind,
    /// Real symmetric 3×3 `Z` in the triplet basis.
    pub z: HermMat<T>,
    /// Dual point `x` with `F(x)·Z = 0` (rank-two certificates).
    pub witness_x: Option<[T; 3]>,
}

impl<T: Real> ExtCertificate<T> {
    pub fn trace(&self) -> T {
        self.z.trace()
    }

    /// `max_i |Tr[F_i Z] − α_i|`.
    pub fn constraint_residual(&self, alpha: &AlphaCoords<T>) -> T {
        let f = f_matrices::<T>();
        (1..4)
            .map(|i| (f[i].inner_product(&self.z) - alpha.alpha[i]).abs())
            .fold(T::zero(), T::max)
    }

    pub fn min_eigenvalue(&self) -> Result<T> {
        self.z.min_eigenvalue()
    }

    fn acceptable(&self, alpha: &AlphaCoords<T>) -> Result<bool> {
        Ok(self.min_eigenvalue()? >= -T::tol(CERT_PSD_TOL)
            && self.trace() <= T::one() + T::tol(CERT_TRACE_TOL)
            && self.constraint_residual(alpha) <= T::tol(1e-10))
    }
}

/// JSON form `{"kind", "Z", "trace", "witness_x"}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CertificateRecord {
    pub kind: CertificateKind,
    #[serde(rename = "Z")]
    pub z: Vec<Vec<f64>>,
    pub trace: f64,
    pub witness_x: Option<[f64; 3]>,
}

impl<T: Real> From<&ExtCertificate<T>> for CertificateRecord {
    fn from(c: &ExtCertificate<T>) -> Self {
        let rows = MatrixRows::from(&c.z);
        CertificateRecord {
            kind: c.kind,
            z: rows
                .0
                .iter()
                .map(|r| r.iter().map(|e| e[0]).collect())
                .collect(),
            trace: c.trace().to_f64_lossy(),
            witness_x: c.witness_x.map(|x| x.map(|v| v.to_f64_lossy())),
        }
    }
}

fn sym3<T: Real>(m: [[T; 3]; 3]) -> HermMat<T> {
    let flat: Vec<T> = m.iter().flatten().copied().collect();
    HermMat::from_real(3, &flat).expect("3x3")
}

fn rank_one_candidate<T: Real>(alpha: &AlphaCoords<T>) -> Option<ExtCertificate<T>> {
    let [a1, a2, a3] = alpha.xyz();
    let d = a2 * a2 - a3 * a3;
    if !(a1 * d > T::zero()) {
        return None;
    }
    // Z = v vᵀ with v = (α2/(2a), a, α3/(2a)), a² = z22 = D/(4α1)
    let z22 = d / (T::lit(4.0) * a1);
    let a = z22.sqrt();
    let two = T::lit(2.0);
    let v = [a2 / (two * a), a, a3 / (two * a)];
    let z = sym3(std::array::from_fn(|i| {
        std::array::from_fn(|j| v[i] * v[j])
    }));
    Some(ExtCertificate {
        kind: CertificateKind::RankOne,
        z,
        witness_x: None,
    })
}

/// The four complementary-slackness candidates of rank two, paired with
/// their dual points `x ∈ {(1, ±√2, 0), (−1, 0, ±√2)}`.
pub fn rank_two_candidates<T: Real>(alpha: &AlphaCoords<T>) -> [ExtCertificate<T>; 4] {
    let [a1, a2, a3] = alpha.xyz();
    let s2 = T::sqrt2();
    let two = T::lit(2.0);
    let pref = T::one() / (two * s2);
    // Z for x = (1, s·√2, 0) with s = ±1.
    let family = |a1: T, a2: T, a3: T, s: T| -> [[T; 3]; 3] {
        let m = [
            [-s * a2, s2 * a2, -s * a3],
            [s2 * a2, -s * two * a2, s2 * a3],
            [-s * a3, s2 * a3, -two * s2 * a1 - s * a2],
        ];
        m.map(|r| r.map(|e| e * pref))
    };
    let swap13 = |m: [[T; 3]; 3]| -> [[T; 3]; 3] {
        let p = [2, 1, 0];
        std::array::from_fn(|i| std::array::from_fn(|j| m[p[i]][p[j]]))
    };
    let one = T::one();
    let cand = |z: [[T; 3]; 3], x: [T; 3]| ExtCertificate {
        kind: CertificateKind::RankTwo,
        z: sym3(z),
        witness_x: Some(x),
    };
    [
        cand(family(a1, a2, a3, one), [one, s2, T::zero()]),
        cand(family(a1, a2, a3, -one), [one, -s2, T::zero()]),
        cand(swap13(family(-a1, a3, a2, one)), [-one, T::zero(), s2]),
        cand(swap13(family(-a1, a3, a2, -one)), [-one, T::zero(), -s2]),
    ]
}

/// Builds a primal certificate for an extendible state: the rank-one `Z`
/// when it has trace ≤ 1, else the PSD rank-two candidate of least trace,
/// else the diagonal vertex solution for `α2 = α3 = 0`.
pub fn extension_certificate<T: Real>(alpha: &AlphaCoords<T>) -> Result<ExtCertificate<T>> {
    if !has_symext(alpha)? {
        return Err(Error::InvalidArgument(format!(
            "alpha {:?} has no symmetric extension",
            alpha.alpha
        )));
    }
    let [a1, a2, a3] = alpha.xyz();
    let zero_tol = T::tol(STATE_TOL);

    if a1.abs() <= zero_tol && a2.abs() <= zero_tol && a3.abs() <= zero_tol {
        return Ok(ExtCertificate {
            kind: CertificateKind::BoundaryVertex,
            z: HermMat::identity(3).scale(T::lit(0.25)),
            witness_x: None,
        });
    }

    if let Some(c) = rank_one_candidate(alpha) {
        if c.acceptable(alpha)? {
            return Ok(c);
        }
    }

    let mut best: Option<ExtCertificate<T>> = None;
    for c in rank_two_candidates(alpha) {
        if c.acceptable(alpha)? && best.as_ref().is_none_or(|b| c.trace() < b.trace()) {
            best = Some(c);
        }
    }
    if let Some(c) = best {
        return Ok(c);
    }

    if a2.abs() <= zero_tol && a3.abs() <= zero_tol {
        let z = HermMat::diag(&[a1.max(T::zero()), T::zero(), (-a1).max(T::zero())]);
        let c = ExtCertificate {
            kind: CertificateKind::BoundaryVertex,
            z,
            witness_x: None,
        };
        if c.acceptable(alpha)? {
            return Ok(c);
        }
    }

    Err(Error::Internal(format!(
        "no certificate candidate is valid for extendible alpha {:?}",
        alpha.alpha
    )))
}

/// Diagnostics of a candidate extension `ρ_ABB′` of `ρ_AB`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtensionCheck {
    pub min_eigenvalue: f64,
    pub trace_error: f64,
    pub swap_residual: f64,
    pub marginal_error: f64,
}

impl ExtensionCheck {
    /// Lift acceptance thresholds: PSD to `1e-9`, unit trace to `1e-12`,
    /// swap invariance to `1e-12`, marginal to `1e-9`.
    pub fn passes(&self) -> bool {
        self.min_eigenvalue >= -1e-9
            && self.trace_error <= 1e-12
            && self.swap_residual <= 1e-12
            && self.marginal_error <= 1e-9
    }
}

/// Measures how well `ext` (on `A ⊗ B ⊗ B′`) extends `rho_ab`.
pub fn check_extension<T: Real>(ext: &HermMat<T>, rho_ab: &HermMat<T>) -> Result<ExtensionCheck> {
    if ext.dim() != 8 || rho_ab.dim() != 4 {
        return Err(Error::DimensionMismatch(
            "expected an 8x8 extension of a 4x4 state".into(),
        ));
    }
    let swapped = ext.transform(&swap_bb());
    let marginal = ext.partial_trace(&[2, 2, 2], &[0, 1])?;
    Ok(ExtensionCheck {
        min_eigenvalue: ext.min_eigenvalue()?.to_f64_lossy(),
        trace_error: (ext.trace() - T::one()).abs().to_f64_lossy(),
        swap_residual: (ext - &swapped).frobenius_norm().to_f64_lossy(),
        marginal_error: marginal.max_abs_diff(rho_ab).to_f64_lossy(),
    })
}

/// Lifts a certificate to the explicit extension
/// `ρ_ABB′ = ½·1_F ⊗ (Z ⊕ (1 − Tr Z)|Ψ−⟩⟨Ψ−|)` and verifies it.
pub fn lift_extension<T: Real>(cert: &ExtCertificate<T>, p: &BellProbs<T>) -> Result<HermMat<T>> {
    let block = TripletBlock {
        r: cert.z.clone(),
        singlet_weight: T::one() - cert.trace(),
    };
    let rho = block.lift(T::lit(0.5));
    let check = check_extension(&rho, &p.to_density_matrix())?;
    let tol_scale = T::tol(1e-12).to_f64_lossy() / 1e-12;
    let ok = check.min_eigenvalue >= -1e-9 * tol_scale
        && check.trace_error <= 1e-12 * tol_scale
        && check.swap_residual <= 1e-12 * tol_scale
        && check.marginal_error <= 1e-9 * tol_scale;
    if !ok {
        return Err(Error::Postcondition(format!("{check:?}")));
    }
    Ok(rho)
}

/// Which cross-section boundary curve to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossSection {
    /// `α3 = 0` slice: `4(α1 − ½)² + α2² = 1`.
    Outer,
    /// Tetrahedron faces `α3 = ±(1 − α1)/√2`: `(9/4)(α1 − ⅓)² + (3/2)α2² = 1`.
    Inner,
}

/// `α2²` on the chosen boundary ellipse at `α1`, or `None` where the
/// ellipse does not reach.
pub fn cross_section_boundary<T: Real>(alpha1: T, which: CrossSection) -> Option<T> {
    let v = match which {
        CrossSection::Outer => {
            let d = alpha1 - T::lit(0.5);
            T::one() - T::lit(4.0) * d * d
        }
        CrossSection::Inner => {
            let d = alpha1 - T::lit(1.0 / 3.0);
            (T::one() - T::lit(2.25) * d * d) / T::lit(1.5)
        }
    };
    if v >= T::zero() {
        Some(v)
    } else {
        None
    }
}
