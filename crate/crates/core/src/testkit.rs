//! Seeded random generators for tests and benchmarks: states, unitaries,
//! Hermitian matrices, and density operators. Everything is driven by a
//! caller-supplied RNG so runs are reproducible.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::density::DensityOperator;
use crate::error::Error;
use crate::space::SpaceLabel;
use crate::state::StateVector;
use crate::C64;

/// The standard RNG for reproducible draws.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A complex number with independent standard-normal parts.
pub fn random_complex<R: Rng>(rng: &mut R) -> C64 {
    // Box-Muller on uniform draws; avoids an extra distribution dependency.
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    let r = (-2.0 * u1.ln()).sqrt();
    let (sin, cos) = (2.0 * std::f64::consts::PI * u2).sin_cos();
    C64::new(r * cos, r * sin)
}

/// A Haar-ish random normalized state over the given factors.
pub fn random_state<R: Rng>(rng: &mut R, factors: Vec<SpaceLabel>) -> Result<StateVector, Error> {
    let dim: usize = factors.iter().map(|f| f.dim()).product();
    let amplitudes = DVector::from_fn(dim, |_, _| random_complex(rng));
    StateVector::new(factors, amplitudes)?.normalized()
}

/// A Haar-distributed random unitary via QR of a Ginibre matrix, with the
/// phase convention fixed so R's diagonal is positive.
pub fn random_unitary<R: Rng>(rng: &mut R, dim: usize) -> DMatrix<C64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| random_complex(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            d / d.norm()
        };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// A random Hermitian matrix `(G + G^dagger) / 2`.
pub fn random_hermitian<R: Rng>(rng: &mut R, dim: usize) -> DMatrix<C64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| random_complex(rng));
    (&g + g.adjoint()) * C64::new(0.5, 0.0)
}

/// A full-rank random density operator: a uniform-weight mixture of `rank`
/// random pure states.
pub fn random_density<R: Rng>(
    rng: &mut R,
    factors: Vec<SpaceLabel>,
    rank: usize,
) -> Result<DensityOperator, Error> {
    let dim: usize = factors.iter().map(|f| f.dim()).product();
    let mut weights: Vec<f64> = (0..rank.max(1)).map(|_| rng.gen_range(0.1..1.0)).collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    let mut matrix = DMatrix::from_element(dim, dim, C64::default());
    for w in weights {
        let psi = DVector::from_fn(dim, |_, _| random_complex(rng));
        let psi = &psi / C64::new(psi.norm(), 0.0);
        matrix += (&psi * psi.adjoint()) * C64::new(w, 0.0);
    }
    // Symmetrize away accumulation noise before the constructor's gate.
    let matrix = (&matrix + matrix.adjoint()) * C64::new(0.5, 0.0);
    let trace = matrix.trace().re;
    DensityOperator::new(factors, matrix / C64::new(trace, 0.0))
}
