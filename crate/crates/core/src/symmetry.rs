//! Symmetry reduction of the three-qubit extension problem.
//!
//! Operators on `A ⊗ B ⊗ B′` that commute with `XXX`, `ZZZ` and the
//! `B ↔ B′` swap become block diagonal after relabelling the computational
//! basis into three encoded qubits `F, G, H` and splitting `GH` into its
//! triplet `{|00⟩, |Ψ+⟩, |11⟩}` and singlet `|Ψ−⟩` parts:
//!
//! ```text
//! Sym_BB′(|β_j⟩⟨β_j| ⊗ 1) = c · 1_F ⊗ (R_j ⊕ |Ψ−⟩⟨Ψ−|),   c = 1/4
//! ```
//!
//! Positivity of `Σ_j k_j Sym_BB′(|β_j⟩⟨β_j| ⊗ 1)` therefore reduces to
//! positivity of the 3×3 matrix `Σ_j k_j R_j` and the scalar `Σ_j k_j`.

use num_complex::Complex;

use crate::bellstate::{bell_projector, BellIndex};
use crate::error::{Error, Result};
use crate::matrix::{pauli_string, HermMat, Mat};
use crate::scalar::Real;

/// Encoded-basis label `|fgh⟩_FGH` → computational label `|a b b′⟩`.
pub const FGH_TO_ABB: [(u8, u8); 8] = [
    (0b000, 0b000),
    (0b001, 0b110),
    (0b010, 0b101),
    (0b011, 0b011),
    (0b100, 0b111),
    (0b101, 0b001),
    (0b110, 0b010),
    (0b111, 0b100),
];

/// Swap of the `B` and `B′` factors of `A ⊗ B ⊗ B′`.
pub fn swap_bb<T: Real>() -> Mat<T> {
    let mut v = Mat::zeros(8);
    for a in 0..2 {
        for b in 0..2 {
            for bp in 0..2 {
                v[(a * 4 + bp * 2 + b, a * 4 + b * 2 + bp)] = Complex::new(T::one(), T::zero());
            }
        }
    }
    v
}

/// `(M + V M V†)/2` with `V` the `B ↔ B′` swap.
pub fn symmetrize_bb<T: Real>(m: &HermMat<T>) -> Result<HermMat<T>> {
    if m.dim() != 8 {
        return Err(Error::DimensionMismatch(format!(
            "symmetrize_bb expects an 8x8 operator, got {}",
            m.dim()
        )));
    }
    let swapped = m.transform(&swap_bb());
    Ok((m + &swapped).scale(T::lit(0.5)))
}

/// The permutation relabelling `ABB′` into the encoded `FGH` basis.
#[derive(Debug, Clone)]
pub struct FghBasis<T> {
    u: Mat<T>,
}

impl<T: Real> Default for FghBasis<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Real> FghBasis<T> {
    pub fn new() -> Self {
        let mut u = Mat::zeros(8);
        for &(fgh, abb) in &FGH_TO_ABB {
            u[(abb as usize, fgh as usize)] = Complex::new(T::one(), T::zero());
        }
        Self { u }
    }

    /// Column `|fgh⟩` holds the computational vector it is identified with.
    pub fn matrix(&self) -> &Mat<T> {
        &self.u
    }

    /// Expresses an `ABB′` operator in the `FGH` product basis.
    pub fn to_fgh(&self, m: &HermMat<T>) -> HermMat<T> {
        m.conjugate_by(&self.u)
    }

    pub fn from_fgh(&self, m: &HermMat<T>) -> HermMat<T> {
        m.transform(&self.u)
    }

    /// `ABB′` basis → `F ⊗ (triplet ⊕ singlet of GH)`.
    ///
    /// Block-basis index `4f + k` with `k = 0, 1, 2` the triplet states
    /// `|00⟩, |Ψ+⟩, |11⟩` of `GH` and `k = 3` the singlet `|Ψ−⟩`.
    pub fn block_basis(&self) -> Mat<T> {
        let h = T::FRAC_1_SQRT_2();
        let (o, z) = (T::one(), T::zero());
        #[rustfmt::skip]
        let t = Mat::from_real(4, &[
            o, z, z, z,
            z, h, z, h,
            z, h, z, -h,
            z, z, o, z,
        ])
        .expect("4x4");
        &self.u * &Mat::identity(2).kron(&t)
    }

    /// `ABB′` operator in block form.
    pub fn to_blocks(&self, m: &HermMat<T>) -> HermMat<T> {
        m.conjugate_by(&self.block_basis())
    }

    /// Inverse of [`to_blocks`](Self::to_blocks).
    pub fn from_blocks(&self, m: &HermMat<T>) -> HermMat<T> {
        m.transform(&self.block_basis())
    }
}

/// Encoded Pauli operators `[X_F, X_G, X_H, Z_F, Z_G, Z_H]` on `A ⊗ B ⊗ B′`.
pub fn encoded_operators<T: Real>() -> [HermMat<T>; 6] {
    [
        pauli_string(&[1, 1, 1]),
        pauli_string(&[1, 0, 1]),
        pauli_string(&[1, 1, 0]),
        pauli_string(&[3, 3, 3]),
        pauli_string(&[3, 3, 0]),
        pauli_string(&[3, 0, 3]),
    ]
}

/// A swap-invariant `GH` operator split into its triplet block (basis
/// `|00⟩, |Ψ+⟩, |11⟩`) and singlet weight.
#[derive(Debug, Clone, PartialEq)]
pub struct TripletBlock<T> {
    pub r: HermMat<T>,
    pub singlet_weight: T,
}

impl<T: Real> TripletBlock<T> {
    /// `r ⊕ singlet_weight` as a 4×4 matrix.
    pub fn to_matrix(&self) -> HermMat<T> {
        let mut m = Mat::zeros(4);
        for i in 0..3 {
            for j in 0..3 {
                m[(i, j)] = self.r.get(i, j);
            }
        }
        m[(3, 3)] = Complex::new(self.singlet_weight, T::zero());
        HermMat::from_mat(m)
    }

    /// Both blocks positive semidefinite within `tol`.
    pub fn is_psd(&self, tol: T) -> Result<bool> {
        Ok(self.singlet_weight >= -tol && self.r.is_psd(tol)?)
    }

    /// The full 8×8 `ABB′` operator `scale · 1_F ⊗ (r ⊕ singlet)`.
    pub fn lift(&self, scale: T) -> HermMat<T> {
        let block = HermMat::identity(2).kron(&self.to_matrix()).scale(scale);
        FghBasis::new().from_blocks(&block)
    }
}

fn real3<T: Real>(rows: [[f64; 3]; 3]) -> HermMat<T> {
    let flat: Vec<T> = rows.iter().flatten().map(|&x| T::lit(x)).collect();
    HermMat::from_real(3, &flat).expect("3x3")
}

/// The triplet block `R_j` of `Sym_BB′(|β_j⟩⟨β_j| ⊗ 1)`.
pub fn r_matrix<T: Real>(j: BellIndex) -> TripletBlock<T> {
    let s = std::f64::consts::SQRT_2;
    let r = match j {
        BellIndex::I => real3([[2.0, s, 0.0], [s, 1.0, 0.0], [0.0, 0.0, 0.0]]),
        BellIndex::Z => real3([[2.0, -s, 0.0], [-s, 1.0, 0.0], [0.0, 0.0, 0.0]]),
        BellIndex::X => real3([[0.0, 0.0, 0.0], [0.0, 1.0, s], [0.0, s, 2.0]]),
        BellIndex::Y => real3([[0.0, 0.0, 0.0], [0.0, 1.0, -s], [0.0, -s, 2.0]]),
    };
    TripletBlock {
        r,
        singlet_weight: T::one(),
    }
}

/// `Σ_j k_j (R_j ⊕ 1)`, the reduced form of `Σ_j k_j Sym_BB′(|β_j⟩⟨β_j| ⊗ 1)`.
pub fn reduce_bell_operator<T: Real>(k: [T; 4]) -> TripletBlock<T> {
    let r = BellIndex::ALL.iter().fold(HermMat::zeros(3), |acc, &j| {
        &acc + &r_matrix::<T>(j).r.scale(k[j.index()])
    });
    TripletBlock {
        r,
        singlet_weight: k.iter().copied().sum(),
    }
}

/// The LMI matrices `F0 … F3` of the reduced problem.
pub fn f_matrices<T: Real>() -> [HermMat<T>; 4] {
    [
        real3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]),
        real3([[1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, -1.0]]),
        real3([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]]),
        real3([[0.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 1.0, 0.0]]),
    ]
}

/// `Sym_BB′(Σ_j k_j |β_j⟩⟨β_j| ⊗ 1_B′)` computed directly on `ABB′`.
pub fn symmetrized_bell_operator<T: Real>(k: [T; 4]) -> HermMat<T> {
    let kab = BellIndex::ALL.iter().fold(HermMat::zeros(4), |acc, &j| {
        &acc + &bell_projector::<T>(j).scale(k[j.index()])
    });
    symmetrize_bb(&kab.kron(&HermMat::identity(2))).expect("8x8 by construction")
}

/// Measures the prefactor `c` in
/// `Sym_BB′(|β_j⟩⟨β_j| ⊗ 1) = c · 1_F ⊗ (R_j ⊕ Ψ−)` from the `Φ+` term and
/// checks that the same `c` reproduces all four Bell projectors to `1e-12`.
pub fn reduction_prefactor<T: Real>() -> Result<T> {
    let basis = FghBasis::<T>::new();
    let phi = basis.to_blocks(&symmetrized_bell_operator(unit(BellIndex::I)));
    let c = phi.get(0, 0).re / r_matrix::<T>(BellIndex::I).r.get(0, 0).re;
    let tol = T::tol(1e-12);
    for j in BellIndex::ALL {
        let direct = symmetrized_bell_operator::<T>(unit(j));
        let reduced = r_matrix::<T>(j).lift(c);
        let err = direct.max_abs_diff(&reduced);
        if err > tol {
            return Err(Error::Internal(format!(
                "prefactor {c} does not reproduce {} (deviation {err})",
                j.name()
            )));
        }
    }
    Ok(c)
}

fn unit<T: Real>(j: BellIndex) -> [T; 4] {
    let mut k = [T::zero(); 4];
    k[j.index()] = T::one();
    k
}
