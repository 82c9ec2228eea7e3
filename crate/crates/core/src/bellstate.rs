//! Bell-diagonal two-qubit states.
//!
//! A Bell-diagonal state is `ρ = Σ_j p_j |β_j⟩⟨β_j|` with the Bell basis
//! ordered `(Φ+, Ψ+, Ψ−, Φ−)`, i.e. indexed by the Pauli error `(I, x, y, z)`
//! that maps `Φ+` to `β_j` when applied to Bob's qubit.
//!
//! Most of the analysis runs in the alpha coordinates
//!
//! ```text
//! α0 = p_I + p_x + p_y + p_z      α1 = p_I − p_x − p_y + p_z
//! α2 = √2 (p_I − p_z)             α3 = √2 (p_x − p_y)
//! ```
//!
//! in which the state space is the tetrahedron
//! `α1 ± √2 α2 ≥ −1`, `−α1 ± √2 α3 ≥ −1`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{pauli, HermMat, C};
use crate::scalar::Real;

/// Slack for probability and state-space inequalities.
pub const STATE_TOL: f64 = 1e-12;

/// Index into a Bell-diagonal probability vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BellIndex {
    I = 0,
    X = 1,
    Y = 2,
    Z = 3,
}

impl BellIndex {
    pub const ALL: [BellIndex; 4] = [BellIndex::I, BellIndex::X, BellIndex::Y, BellIndex::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            BellIndex::I => "Phi+",
            BellIndex::X => "Psi+",
            BellIndex::Y => "Psi-",
            BellIndex::Z => "Phi-",
        }
    }
}

/// Computational-basis amplitudes of the Bell vector `β_j`.
pub fn bell_vector<T: Real>(j: BellIndex) -> [C<T>; 4] {
    let s = T::FRAC_1_SQRT_2();
    let z = T::zero();
    let r = |x: T| Complex::new(x, z);
    match j {
        BellIndex::I => [r(s), r(z), r(z), r(s)],
        BellIndex::X => [r(z), r(s), r(s), r(z)],
        BellIndex::Y => [r(z), r(s), r(-s), r(z)],
        BellIndex::Z => [r(s), r(z), r(z), r(-s)],
    }
}

/// `|β_j⟩⟨β_j|`.
pub fn bell_projector<T: Real>(j: BellIndex) -> HermMat<T> {
    HermMat::projector(&bell_vector::<T>(j))
}

/// Eigenvalues `(p_I, p_x, p_y, p_z)` of a Bell-diagonal state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BellProbsRepr<T>", into = "BellProbsRepr<T>")]
#[serde(bound(
    serialize = "T: Real + Serialize",
    deserialize = "T: Real + Deserialize<'de>"
))]
pub struct BellProbs<T> {
    p: [T; 4],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct BellProbsRepr<T> {
    p: [T; 4],
}

impl<T: Real> TryFrom<BellProbsRepr<T>> for BellProbs<T> {
    type Error = Error;
    fn try_from(r: BellProbsRepr<T>) -> Result<Self> {
        BellProbs::new(r.p)
    }
}

impl<T: Real> From<BellProbs<T>> for BellProbsRepr<T> {
    fn from(b: BellProbs<T>) -> Self {
        BellProbsRepr { p: b.p }
    }
}

impl<T: Real> BellProbs<T> {
    /// Validates and normalizes a probability vector.
    ///
    /// Components in `[-1e-12, 0)` are clamped to zero and the vector is
    /// rescaled to sum to one; anything further from a distribution is an
    /// error.
    pub fn new(p: [T; 4]) -> Result<Self> {
        let tol = T::tol(STATE_TOL);
        if p.iter().any(|x| !x.is_finite()) {
            return Err(Error::NotAState(format!("non-finite probabilities {p:?}")));
        }
        if let Some(bad) = p.iter().find(|&&x| x < -tol) {
            return Err(Error::NotAState(format!("negative probability {bad}")));
        }
        let clamped = p.map(|x| x.max(T::zero()));
        let sum: T = clamped.iter().copied().sum();
        if (sum - T::one()).abs() > tol {
            return Err(Error::NotAState(format!(
                "probabilities sum to {sum}, not 1"
            )));
        }
        Ok(Self {
            p: clamped.map(|x| x / sum),
        })
    }

    /// Builds a state from unnormalized non-negative weights.
    pub fn from_weights(w: [T; 4]) -> Result<Self> {
        let sum: T = w.iter().copied().sum();
        if !(sum > T::zero()) || w.iter().any(|&x| x < T::zero()) {
            return Err(Error::NotAState(format!("invalid weights {w:?}")));
        }
        Self::new(w.map(|x| x / sum))
    }

    pub fn maximally_mixed() -> Self {
        let q = T::lit(0.25);
        Self { p: [q; 4] }
    }

    pub fn pure(j: BellIndex) -> Self {
        let mut p = [T::zero(); 4];
        p[j.index()] = T::one();
        Self { p }
    }

    pub fn as_array(&self) -> [T; 4] {
        self.p
    }

    pub fn get(&self, j: BellIndex) -> T {
        self.p[j.index()]
    }

    pub fn p_i(&self) -> T {
        self.p[0]
    }
    pub fn p_x(&self) -> T {
        self.p[1]
    }
    pub fn p_y(&self) -> T {
        self.p[2]
    }
    pub fn p_z(&self) -> T {
        self.p[3]
    }

    pub fn to_alpha(&self) -> AlphaCoords<T> {
        let [pi, px, py, pz] = self.p;
        let s2 = T::sqrt2();
        AlphaCoords {
            alpha: [
                pi + px + py + pz,
                pi - px - py + pz,
                s2 * (pi - pz),
                s2 * (px - py),
            ],
        }
    }

    /// `Σ_j p_j |β_j⟩⟨β_j|`.
    pub fn to_density_matrix(&self) -> HermMat<T> {
        BellIndex::ALL.iter().fold(HermMat::zeros(4), |acc, &j| {
            &acc + &bell_projector::<T>(j).scale(self.get(j))
        })
    }

    /// Quantum bit error rates `q_j = 1 − p_I − p_j` for `j = x, y, z`.
    pub fn qber(&self) -> [T; 3] {
        let [pi, px, py, pz] = self.p;
        let one = T::one();
        [one - pi - px, one - pi - py, one - pi - pz]
    }

    /// Separability by the PPT criterion, exact for two qubits.
    pub fn is_separable(&self) -> Result<bool> {
        let pt = self.to_density_matrix().partial_transpose(&[2, 2], 1)?;
        pt.is_psd(T::tol(STATE_TOL))
    }

    /// Closed-form separability test `max_j p_j ≤ 1/2`.
    pub fn max_prob_at_most_half(&self) -> bool {
        let m = self.p.iter().copied().fold(T::zero(), T::max);
        m <= T::lit(0.5) + T::tol(STATE_TOL)
    }

    /// Moves component `i` to position `perm[i]`.
    pub fn permute(&self, perm: [usize; 4]) -> Result<Self> {
        let mut seen = [false; 4];
        for &k in &perm {
            if k >= 4 || seen[k] {
                return Err(Error::InvalidArgument(format!(
                    "{perm:?} is not a permutation of 0..4"
                )));
            }
            seen[k] = true;
        }
        let mut out = [T::zero(); 4];
        for (i, &k) in perm.iter().enumerate() {
            out[k] = self.p[i];
        }
        Ok(Self { p: out })
    }

    pub fn cast<U: Real>(&self) -> BellProbs<U> {
        BellProbs {
            p: self.p.map(|x| U::lit(x.to_f64_lossy())),
        }
    }
}

/// Coordinates `(α0, α1, α2, α3)`; `α0 = 1` for normalized states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaCoords<T> {
    pub alpha: [T; 4],
}

impl<T: Real> AlphaCoords<T> {
    /// Normalized coordinates (α0 = 1). No validity check.
    pub fn new(a1: T, a2: T, a3: T) -> Self {
        Self {
            alpha: [T::one(), a1, a2, a3],
        }
    }

    pub fn a0(&self) -> T {
        self.alpha[0]
    }
    pub fn a1(&self) -> T {
        self.alpha[1]
    }
    pub fn a2(&self) -> T {
        self.alpha[2]
    }
    pub fn a3(&self) -> T {
        self.alpha[3]
    }

    /// `(α1, α2, α3)`.
    pub fn xyz(&self) -> [T; 3] {
        [self.alpha[1], self.alpha[2], self.alpha[3]]
    }

    /// The four state-space inequalities as values that must be `≥ −1`:
    /// `α1 + √2α2`, `α1 − √2α2`, `−α1 + √2α3`, `−α1 − √2α3`.
    pub fn face_values(&self) -> [T; 4] {
        let s2 = T::sqrt2();
        let (a1, a2, a3) = (self.a1(), self.a2(), self.a3());
        [a1 + s2 * a2, a1 - s2 * a2, -a1 + s2 * a3, -a1 - s2 * a3]
    }

    /// Membership in the tetrahedron of Bell-diagonal states.
    pub fn is_valid_state(&self) -> bool {
        let tol = T::tol(STATE_TOL);
        (self.a0() - T::one()).abs() <= tol
            && self.face_values().iter().all(|&v| v >= -T::one() - tol)
    }

    /// Inverse coordinate map. Fails when α0 ≠ 1 or the point lies outside
    /// the state space by more than `1e-12`.
    pub fn to_probs(&self) -> Result<BellProbs<T>> {
        let tol = T::tol(STATE_TOL);
        if (self.a0() - T::one()).abs() > tol {
            return Err(Error::NotAState(format!("alpha0 = {} != 1", self.a0())));
        }
        let p = self.raw_probs();
        if let Some(bad) = p.iter().find(|&&x| x < -tol) {
            return Err(Error::NotAState(format!(
                "alpha {:?} lies outside the state space (eigenvalue {bad})",
                self.alpha
            )));
        }
        BellProbs::new(p)
    }

    /// Inverse map without validation.
    pub fn raw_probs(&self) -> [T; 4] {
        let s2 = T::sqrt2();
        let q = T::lit(0.25);
        let [a0, a1, a2, a3] = self.alpha;
        [
            q * (a0 + a1 + s2 * a2),
            q * (a0 - a1 + s2 * a3),
            q * (a0 - a1 - s2 * a3),
            q * (a0 + a1 - s2 * a2),
        ]
    }
}

/// `p_to_alpha` as a free function.
pub fn p_to_alpha<T: Real>(p: &BellProbs<T>) -> AlphaCoords<T> {
    p.to_alpha()
}

/// `alpha_to_p` as a free function.
pub fn alpha_to_p<T: Real>(a: &AlphaCoords<T>) -> Result<BellProbs<T>> {
    a.to_probs()
}

/// Projects an arbitrary two-qubit density matrix onto its Bell-diagonal
/// part, returning the Bell-basis diagonal `p_j = ⟨β_j|ρ|β_j⟩`.
pub fn twirl<T: Real>(rho: &HermMat<T>) -> Result<BellProbs<T>> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch(format!(
            "twirl expects a 4x4 density matrix, got {}x{}",
            rho.dim(),
            rho.dim()
        )));
    }
    let tol = T::tol(1e-10);
    if (rho.trace() - T::one()).abs() > tol {
        return Err(Error::NotAState(format!("trace {} != 1", rho.trace())));
    }
    if !rho.is_psd(tol)? {
        return Err(Error::NotAState("density matrix is not PSD".into()));
    }
    let p = BellIndex::ALL.map(|j| bell_projector::<T>(j).inner_product(rho));
    BellProbs::new(p.map(|x| x.max(T::zero())))
        .or_else(|_| BellProbs::from_weights(p.map(|x| x.max(T::zero()))))
}

/// The twirling channel `(1/4) Σ_i (σ_i⊗σ_i) ρ (σ_i⊗σ_i)†` as a matrix map.
pub fn twirl_channel<T: Real>(rho: &HermMat<T>) -> HermMat<T> {
    (0..4).fold(HermMat::zeros(4), |acc, i| {
        let s = pauli::<T>(i).kron(&pauli(i));
        &acc + &rho.transform(s.as_mat()).scale(T::lit(0.25))
    })
}

/// Pure state `Σ_j c_j |β_j⟩` (normalized).
pub fn bell_superposition<T: Real>(coeffs: [C<T>; 4]) -> Result<HermMat<T>> {
    let norm: T = coeffs.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
    if !(norm > T::zero()) {
        return Err(Error::InvalidArgument("zero vector".into()));
    }
    let mut v = [Complex::new(T::zero(), T::zero()); 4];
    for (j, &cj) in BellIndex::ALL.iter().zip(&coeffs) {
        for (slot, b) in v.iter_mut().zip(bell_vector::<T>(*j)) {
            *slot = *slot + cj * b / norm;
        }
    }
    Ok(HermMat::projector(&v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const S2: f64 = std::f64::consts::SQRT_2;

    fn probs(p: [f64; 4]) -> BellProbs<f64> {
        BellProbs::new(p).unwrap()
    }

    fn close4(a: [f64; 4], b: [f64; 4], tol: f64) -> bool {
        a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn p_to_alpha_examples() {
        assert_eq!(
            probs([1.0, 0.0, 0.0, 0.0]).to_alpha().alpha,
            [1.0, 1.0, S2, 0.0]
        );
        assert_eq!(
            BellProbs::<f64>::maximally_mixed().to_alpha().alpha,
            [1.0, 0.0, 0.0, 0.0]
        );
        let a = probs([0.7, 0.1, 0.1, 0.1]).to_alpha();
        assert!(close4(a.alpha, [1.0, 0.6, 0.6 * S2, 0.0], 1e-14), "{:?}", a);
    }

    #[test]
    fn alpha_to_p_examples() {
        let psi = AlphaCoords::new(-1.0, 0.0, S2).to_probs().unwrap();
        assert!(close4(psi.as_array(), [0.0, 1.0, 0.0, 0.0], 1e-15));
        let mm = AlphaCoords::new(0.0, 0.0, 0.0).to_probs().unwrap();
        assert_eq!(mm.as_array(), [0.25; 4]);
        let p = AlphaCoords::new(0.6, 0.6 * S2, 0.0).to_probs().unwrap();
        assert!(close4(p.as_array(), [0.7, 0.1, 0.1, 0.1], 1e-14));
    }

    #[test]
    fn alpha_to_p_rejects_outside() {
        assert!(matches!(
            AlphaCoords::new(1.0, 1.0, 1.0).to_probs(),
            Err(Error::NotAState(_))
        ));
        let mut a = AlphaCoords::new(0.0, 0.0, 0.0);
        a.alpha[0] = 2.0;
        assert!(a.to_probs().is_err());
    }

    #[test]
    fn bell_probs_validation() {
        assert!(BellProbs::new([0.5, 0.5, 1e-13, -1e-13]).is_ok());
        assert!(BellProbs::new([0.6, 0.5, 0.0, -0.1]).is_err());
        assert!(BellProbs::new([0.5, 0.4, 0.0, 0.0]).is_err());
        assert!(BellProbs::new([f64::NAN, 0.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn density_matrix_examples() {
        let phi = probs([1.0, 0.0, 0.0, 0.0]).to_density_matrix();
        let h = 0.5;
        let want = HermMat::from_real(
            4,
            &[h, 0., 0., h, 0., 0., 0., 0., 0., 0., 0., 0., h, 0., 0., h],
        )
        .unwrap();
        assert!(phi.max_abs_diff(&want) < 1e-15);
        let mm = BellProbs::<f64>::maximally_mixed().to_density_matrix();
        assert!(mm.max_abs_diff(&HermMat::identity(4).scale(0.25)) < 1e-15);
    }

    #[test]
    fn bell_vectors_are_pauli_images_of_phi_plus() {
        // β_j ∝ (1 ⊗ σ_j)|Φ+⟩
        let phi = bell_vector::<f64>(BellIndex::I);
        for j in BellIndex::ALL {
            let op = pauli::<f64>(0).kron(&pauli(j.index()));
            let v = op.as_mat().mul_vec(&phi);
            let b = bell_vector::<f64>(j);
            let overlap: Complex<f64> = v.iter().zip(&b).map(|(x, y)| y.conj() * x).sum();
            assert!((overlap.norm() - 1.0).abs() < 1e-14, "{j:?}");
        }
    }

    #[test]
    fn twirl_examples() {
        let phi = probs([1.0, 0.0, 0.0, 0.0]);
        assert!(close4(
            twirl(&phi.to_density_matrix()).unwrap().as_array(),
            [1.0, 0.0, 0.0, 0.0],
            1e-15
        ));

        let coeffs =
            [0, 1, 2, 3].map(|j| Complex::from_polar(1.0, std::f64::consts::FRAC_PI_2 * j as f64));
        let rho = bell_superposition(coeffs).unwrap();
        // the pure state is maximally entangled
        let ra = rho.partial_trace(&[2, 2], &[0]).unwrap();
        assert!(ra.max_abs_diff(&HermMat::identity(2).scale(0.5)) < 1e-14);
        assert!(close4(twirl(&rho).unwrap().as_array(), [0.25; 4], 1e-14));
    }

    #[test]
    fn twirl_rejects_non_states() {
        assert!(twirl(&HermMat::<f64>::identity(4)).is_err());
        assert!(twirl(&HermMat::<f64>::diag(&[1.5, -0.5, 0.0, 0.0])).is_err());
        assert!(twirl(&HermMat::<f64>::identity(2).scale(0.5)).is_err());
    }

    #[test]
    fn qber_examples() {
        assert_eq!(probs([1.0, 0.0, 0.0, 0.0]).qber(), [0.0; 3]);
        let q = probs([0.7, 0.1, 0.1, 0.1]).qber();
        assert!(q.iter().all(|x| (x - 0.2).abs() < 1e-15));
        assert_eq!(BellProbs::<f64>::maximally_mixed().qber(), [0.5; 3]);
    }

    #[test]
    fn separability_examples() {
        assert!(!probs([1.0, 0.0, 0.0, 0.0]).is_separable().unwrap());
        assert!(BellProbs::<f64>::maximally_mixed().is_separable().unwrap());
        assert!(probs([0.5, 0.5, 0.0, 0.0]).is_separable().unwrap());
        let pt = probs([0.5, 0.5, 0.0, 0.0])
            .to_density_matrix()
            .partial_transpose(&[2, 2], 1)
            .unwrap();
        assert!(pt.min_eigenvalue().unwrap().abs() < 1e-14);
    }

    #[test]
    fn permute_examples() {
        let p = probs([0.4, 0.3, 0.2, 0.1]);
        assert_eq!(p.permute([0, 1, 2, 3]).unwrap(), p);
        let phi = probs([1.0, 0.0, 0.0, 0.0]);
        assert_eq!(
            phi.permute([2, 1, 0, 3]).unwrap().as_array(),
            [0.0, 0.0, 1.0, 0.0]
        );
        assert!(p.permute([0, 0, 1, 2]).is_err());
        assert!(p.permute([0, 1, 2, 4]).is_err());
    }

    #[test]
    fn serde_shape() {
        let p = probs([0.7, 0.1, 0.1, 0.1]);
        let js = serde_json::to_value(p).unwrap();
        assert!(js.get("p").unwrap().is_array());
        let back: BellProbs<f64> = serde_json::from_value(js).unwrap();
        assert_eq!(back, p);
        let bad = serde_json::json!({"p": [0.9, 0.9, 0.0, 0.0]});
        assert!(serde_json::from_value::<BellProbs<f64>>(bad).is_err());
        let a = serde_json::to_value(p.to_alpha()).unwrap();
        assert_eq!(a.get("alpha").unwrap().as_array().unwrap().len(), 4);
    }

    #[test]
    fn random_state_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let p = sampling::uniform_state(&mut rng);
            let back = p.to_alpha().to_probs().unwrap();
            assert!(close4(back.as_array(), p.as_array(), 1e-14));

            let raw = p.to_alpha().raw_probs();
            assert!(raw.iter().all(|&x| x >= -1e-15));
            assert!(p.to_alpha().is_valid_state());

            assert_eq!(
                p.is_separable().unwrap(),
                p.max_prob_at_most_half(),
                "{p:?}"
            );
        }
        for _ in 0..500 {
            let p = sampling::uniform_state(&mut rng);
            let rho = p.to_density_matrix();
            let mut ev = rho.eigenvalues().unwrap();
            let mut want = p.as_array();
            want.sort_by(|a, b| a.partial_cmp(b).unwrap());
            ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
            assert!(close4([ev[0], ev[1], ev[2], ev[3]], want, 1e-12));
            assert!(close4(twirl(&rho).unwrap().as_array(), p.as_array(), 1e-14));
        }
    }

    #[test]
    fn alpha_validity_matches_probabilities() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10_000 {
            let a = sampling::box_alpha::<f64, _>(&mut rng);
            let nonneg = a.raw_probs().iter().all(|&x| x >= -1e-12);
            assert_eq!(a.is_valid_state(), nonneg);
        }
    }

    #[test]
    fn twirl_idempotent_on_generic_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let rho = sampling::random_density_matrix(&mut rng, 4);
            let once = twirl(&rho).unwrap();
            let twice = twirl(&once.to_density_matrix()).unwrap();
            assert!(close4(once.as_array(), twice.as_array(), 1e-14));
            // the channel form agrees with the Bell-diagonal readout
            let ch = twirl_channel(&rho);
            assert!(ch.max_abs_diff(&once.to_density_matrix()) < 1e-13);
            // Bell-basis diagonal preserved
            for j in BellIndex::ALL {
                let b = bell_projector::<f64>(j);
                assert!((b.inner_product(&ch) - b.inner_product(&rho)).abs() < 1e-13);
            }
        }
    }
}
