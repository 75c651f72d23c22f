//! Pure states over labeled tensor factors.

use nalgebra::{DMatrix, DVector};

use crate::density::DensityOperator;
use crate::error::Error;
use crate::operator::{check_square, check_unitary};
use crate::space::{joint_dim, positions_of, Layout, SpaceLabel};
use crate::{tol, C64};

/// A complex amplitude vector over an ordered list of labeled factors.
///
/// The joint basis is row-major: the first factor is the most significant
/// index digit. `norm_tolerance` is the slack allowed wherever an operation
/// requires a normalized state.
#[derive(Clone, Debug)]
pub struct StateVector {
    factors: Vec<SpaceLabel>,
    amplitudes: DVector<C64>,
    norm_tolerance: f64,
}

impl StateVector {
    /// Wraps raw amplitudes; factor names must be unique and the vector
    /// length must match the joint dimension. The norm is not constrained
    /// here — see [`StateVector::normalized`].
    pub fn new(factors: Vec<SpaceLabel>, amplitudes: DVector<C64>) -> Result<Self, Error> {
        let dim = joint_dim(&factors)?;
        if amplitudes.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: amplitudes.len(),
            });
        }
        Ok(StateVector {
            factors,
            amplitudes,
            norm_tolerance: tol::STATE_NORM,
        })
    }

    /// The joint basis state with the given index per factor.
    pub fn basis_state(factors: Vec<SpaceLabel>, indices: &[usize]) -> Result<Self, Error> {
        if indices.len() != factors.len() {
            return Err(Error::DimensionMismatch {
                expected: factors.len(),
                got: indices.len(),
            });
        }
        for (f, &i) in factors.iter().zip(indices) {
            if i >= f.dim() {
                return Err(Error::DimensionMismatch {
                    expected: f.dim(),
                    got: i,
                });
            }
        }
        let layout = Layout::new(&factors);
        let mut amplitudes = DVector::from_element(layout.len(), C64::default());
        amplitudes[layout.flat(indices)] = C64::new(1.0, 0.0);
        Self::new(factors, amplitudes)
    }

    /// Single-factor state from a plain amplitude list.
    pub fn from_amplitudes(factor: SpaceLabel, amplitudes: Vec<C64>) -> Result<Self, Error> {
        Self::new(vec![factor], DVector::from_vec(amplitudes))
    }

    pub fn factors(&self) -> &[SpaceLabel] {
        &self.factors
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn norm_tolerance(&self) -> f64 {
        self.norm_tolerance
    }

    pub fn with_norm_tolerance(mut self, tolerance: f64) -> Self {
        self.norm_tolerance = tolerance;
        self
    }

    pub(crate) fn layout(&self) -> Layout {
        Layout::new(&self.factors)
    }

    pub(crate) fn factor_names(&self) -> Vec<&str> {
        self.factors.iter().map(|f| f.name()).collect()
    }

    /// Rescales to unit norm.
    pub fn normalized(&self) -> Result<Self, Error> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroNorm);
        }
        let mut out = self.clone();
        out.amplitudes /= C64::new(n, 0.0);
        Ok(out)
    }

    pub fn check_normalized(&self) -> Result<(), Error> {
        let n = self.norm();
        if (n - 1.0).abs() > self.norm_tolerance {
            return Err(Error::NotNormalized {
                norm: n,
                tol: self.norm_tolerance,
            });
        }
        Ok(())
    }

    /// Kronecker composition; factor label sets must be disjoint. `self`
    /// supplies the more significant indices of the joint basis.
    pub fn tensor(&self, other: &Self) -> Result<Self, Error> {
        let mut factors = self.factors.clone();
        for f in &other.factors {
            if factors.iter().any(|g| g.name() == f.name()) {
                return Err(Error::DuplicateLabel(f.name().to_string()));
            }
            factors.push(f.clone());
        }
        let amplitudes = self.amplitudes.kronecker(&other.amplitudes);
        let mut out = Self::new(factors, DVector::from_column_slice(amplitudes.as_slice()))?;
        out.norm_tolerance = self.norm_tolerance.max(other.norm_tolerance);
        Ok(out)
    }

    /// Applies a unitary to the listed target factors, identity on the rest.
    ///
    /// The order of `targets` defines the row-major basis the matrix acts on,
    /// so the same matrix can be aimed at factors in either order.
    pub fn apply_unitary(&self, u: &DMatrix<C64>, targets: &[&str]) -> Result<Self, Error> {
        let positions = positions_of(&self.factors, targets)?;
        let dim: usize = positions.iter().map(|&p| self.factors[p].dim()).product();
        check_square(u, dim)?;
        check_unitary(u)?;
        let layout = self.layout();
        let target_offsets = layout.offsets_of(&positions);
        let rest_offsets = layout.offsets_excluding(&positions);
        let mut out = self.amplitudes.clone();
        let mut block = DVector::from_element(dim, C64::default());
        for &rest in &rest_offsets {
            for (a, &off) in target_offsets.iter().enumerate() {
                block[a] = self.amplitudes[rest + off];
            }
            let rotated = u * &block;
            for (a, &off) in target_offsets.iter().enumerate() {
                out[rest + off] = rotated[a];
            }
        }
        let mut state = self.clone();
        state.amplitudes = out;
        Ok(state)
    }

    /// Outer product `|psi><psi|`; the state must be normalized.
    pub fn to_density(&self) -> Result<DensityOperator, Error> {
        self.check_normalized()?;
        let matrix = &self.amplitudes * self.amplitudes.adjoint();
        DensityOperator::new(self.factors.clone(), matrix)
    }

    /// Inner product `<self|other>`; factor lists must match exactly.
    pub fn inner(&self, other: &Self) -> Result<C64, Error> {
        if self.factors != other.factors {
            return Err(Error::FactorMismatch);
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn label(name: &str, dim: usize) -> SpaceLabel {
        SpaceLabel::new(name, dim).unwrap()
    }

    fn close(a: f64, b: f64, tolerance: f64) {
        assert!((a - b).abs() <= tolerance, "{a} vs {b} (tol {tolerance})");
    }

    #[test]
    fn tensor_matches_bruteforce_kronecker() {
        let a =
            StateVector::from_amplitudes(label("a", 2), vec![c(0.6, 0.1), c(0.0, 0.79)]).unwrap();
        let b = StateVector::from_amplitudes(
            label("b", 3),
            vec![c(0.3, 0.0), c(0.5, -0.2), c(0.1, 0.4)],
        )
        .unwrap();
        let joint = a.tensor(&b).unwrap();
        assert_eq!(joint.dim(), 6);
        // Independent double loop.
        for i in 0..2 {
            for j in 0..3 {
                let expected = a.amplitudes()[i] * b.amplitudes()[j];
                let got = joint.amplitudes()[i * 3 + j];
                assert!((expected - got).norm() == 0.0);
            }
        }
    }

    #[test]
    fn tensor_rejects_label_collision() {
        let a = StateVector::basis_state(vec![label("x", 2)], &[0]).unwrap();
        let b = StateVector::basis_state(vec![label("x", 2)], &[1]).unwrap();
        assert!(matches!(a.tensor(&b), Err(Error::DuplicateLabel(_))));
    }

    #[test]
    fn basis_state_places_single_amplitude() {
        let s = StateVector::basis_state(vec![label("a", 2), label("b", 2)], &[1, 0]).unwrap();
        let amps: Vec<C64> = s.amplitudes().iter().copied().collect();
        assert_eq!(amps[2], c(1.0, 0.0));
        assert_eq!(s.norm(), 1.0);
    }

    #[test]
    fn identity_leaves_state_unchanged() {
        let s = StateVector::new(
            vec![label("a", 2), label("b", 2)],
            DVector::from_vec(vec![c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0)]),
        )
        .unwrap();
        let id = DMatrix::identity(2, 2);
        let out = s.apply_unitary(&id, &["b"]).unwrap();
        for i in 0..4 {
            assert_eq!(out.amplitudes()[i], s.amplitudes()[i]);
        }
    }

    #[test]
    fn swap_permutes_amplitudes() {
        // Swap on (a, b): |ab> -> |ba>.
        let mut swap = DMatrix::from_element(4, 4, C64::default());
        swap[(0, 0)] = c(1.0, 0.0);
        swap[(1, 2)] = c(1.0, 0.0);
        swap[(2, 1)] = c(1.0, 0.0);
        swap[(3, 3)] = c(1.0, 0.0);
        let s = StateVector::new(
            vec![label("a", 2), label("b", 2)],
            DVector::from_vec(vec![c(0.1, 0.0), c(0.2, 0.0), c(0.3, 0.0), c(0.4, 0.0)]),
        )
        .unwrap();
        let out = s.apply_unitary(&swap, &["a", "b"]).unwrap();
        let amps: Vec<f64> = out.amplitudes().iter().map(|z| z.re).collect();
        assert_eq!(amps, vec![0.1, 0.3, 0.2, 0.4]);

        // Aiming the same matrix at (b, a) swaps in the opposite reading,
        // which for the symmetric swap gate lands on the same result.
        let out2 = s.apply_unitary(&swap, &["b", "a"]).unwrap();
        for i in 0..4 {
            assert_eq!(out2.amplitudes()[i], out.amplitudes()[i]);
        }
    }

    #[test]
    fn targeted_unitary_matches_full_kronecker_oracle() {
        let s = StateVector::new(
            vec![label("a", 2), label("b", 3), label("c", 2)],
            DVector::from_fn(12, |i, _| c(0.1 + 0.02 * i as f64, 0.05 - 0.01 * i as f64)),
        )
        .unwrap();
        let s = s.normalized().unwrap();
        // Random-ish 3x3 unitary from a phase-mixed rotation.
        let u3 = DMatrix::from_fn(3, 3, |i, j| {
            let base: [[f64; 3]; 3] = [[0.36, 0.48, -0.8], [-0.8, 0.6, 0.0], [0.48, 0.64, 0.6]];
            C64::new(base[i][j], 0.0)
        });
        assert!(crate::operator::unitarity_deviation(&u3) < 1e-12);
        let applied = s.apply_unitary(&u3, &["b"]).unwrap();
        // Oracle: explicit I (x) U (x) I built by hand.
        let dim = 12;
        let mut full = DMatrix::from_element(dim, dim, C64::default());
        for a in 0..2 {
            for b_out in 0..3 {
                for b_in in 0..3 {
                    for cc in 0..2 {
                        let row = a * 6 + b_out * 2 + cc;
                        let col = a * 6 + b_in * 2 + cc;
                        full[(row, col)] = u3[(b_out, b_in)];
                    }
                }
            }
        }
        let oracle = &full * s.amplitudes();
        for i in 0..dim {
            assert!((oracle[i] - applied.amplitudes()[i]).norm() < 1e-15);
        }
        close(applied.norm(), 1.0, 1e-12);
    }

    #[test]
    fn apply_unitary_rejects_nonunitary() {
        let s = StateVector::basis_state(vec![label("a", 2)], &[0]).unwrap();
        let m = DMatrix::from_diagonal_element(2, 2, c(1.5, 0.0));
        assert!(matches!(
            s.apply_unitary(&m, &["a"]),
            Err(Error::NotUnitary(_))
        ));
    }

    #[test]
    fn to_density_requires_normalization() {
        let s =
            StateVector::from_amplitudes(label("a", 2), vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!(matches!(s.to_density(), Err(Error::NotNormalized { .. })));
        let d = s.normalized().unwrap().to_density().unwrap();
        close(d.purity(), 1.0, 1e-12);
    }

    #[test]
    fn inner_product_needs_matching_factors() {
        let a = StateVector::basis_state(vec![label("a", 2)], &[0]).unwrap();
        let b = StateVector::basis_state(vec![label("b", 2)], &[0]).unwrap();
        assert!(matches!(a.inner(&b), Err(Error::FactorMismatch)));
        let a2 = StateVector::basis_state(vec![label("a", 2)], &[1]).unwrap();
        assert_eq!(a.inner(&a2).unwrap(), C64::default());
    }
}
