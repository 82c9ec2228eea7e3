//! Random states for self-checks and property tests.

use num_complex::Complex;
use rand::Rng;

use crate::bellstate::{AlphaCoords, BellProbs};
use crate::matrix::{HermMat, Mat};
use crate::scalar::Real;

/// Uniform point of the bounding box `[-1,1] × [-√2,√2]²` of the state
/// tetrahedron (not necessarily a state).
pub fn box_alpha<T: Real, R: Rng + ?Sized>(rng: &mut R) -> AlphaCoords<T> {
    let s2 = std::f64::consts::SQRT_2;
    AlphaCoords::new(
        T::lit(rng.gen_range(-1.0..=1.0)),
        T::lit(rng.gen_range(-s2..=s2)),
        T::lit(rng.gen_range(-s2..=s2)),
    )
}

/// Uniformly distributed Bell-diagonal state, by rejection sampling in
/// alpha coordinates.
pub fn uniform_state<R: Rng + ?Sized>(rng: &mut R) -> BellProbs<f64> {
    loop {
        let a = box_alpha::<f64, R>(rng);
        if a.is_valid_state() {
            if let Ok(p) = a.to_probs() {
                return p;
            }
        }
    }
}

/// Random two-qubit (or `dim`-dimensional) density matrix `G G† / Tr`.
pub fn random_density_matrix<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> HermMat<T> {
    let g = Mat::from_fn(dim, |_, _| {
        Complex::new(
            T::lit(rng.gen_range(-1.0..1.0)),
            T::lit(rng.gen_range(-1.0..1.0)),
        )
    });
    let m = HermMat::from_mat(&g * &g.adjoint());
    let tr = m.trace();
    m.scale(T::one() / tr)
}
