//! Density operators over labeled tensor factors.

use nalgebra::DMatrix;

use crate::error::Error;
use crate::operator::{check_hermitian, check_square, Observable};
use crate::space::{joint_dim, positions_of, Layout, SpaceLabel};
use crate::state::StateVector;
use crate::{tol, C64};

/// A validated density operator: Hermitian, unit trace, positive
/// semidefinite within the shared tolerances. Every constructor runs the
/// full gate, so anything holding this type has passed it.
#[derive(Clone, Debug)]
pub struct DensityOperator {
    factors: Vec<SpaceLabel>,
    matrix: DMatrix<C64>,
}

impl DensityOperator {
    pub fn new(factors: Vec<SpaceLabel>, matrix: DMatrix<C64>) -> Result<Self, Error> {
        let dim = joint_dim(&factors)?;
        check_square(&matrix, dim)?;
        check_hermitian(&matrix)?;
        let trace = matrix.trace();
        if (trace - C64::new(1.0, 0.0)).norm() > tol::TRACE {
            return Err(Error::BadTrace(trace.re));
        }
        let herm = (&matrix + matrix.adjoint()) * C64::new(0.5, 0.0);
        let eigenvalues = herm.symmetric_eigen().eigenvalues;
        let min = eigenvalues.min();
        if min < tol::EIGENVALUE_FLOOR {
            return Err(Error::NotPositive(min));
        }
        Ok(DensityOperator { factors, matrix })
    }

    pub fn factors(&self) -> &[SpaceLabel] {
        &self.factors
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let herm = (&self.matrix + self.matrix.adjoint()) * C64::new(0.5, 0.0);
        let mut vals: Vec<f64> = herm.symmetric_eigen().eigenvalues.iter().copied().collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        vals
    }

    /// Diagonal entries as real populations.
    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).collect()
    }

    /// `Tr(rho^2)` via the squared Frobenius norm (exact for Hermitian input).
    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Kronecker composition of two operators on disjoint factors.
    pub fn tensor(&self, other: &Self) -> Result<Self, Error> {
        let mut factors = self.factors.clone();
        for f in &other.factors {
            if factors.iter().any(|g| g.name() == f.name()) {
                return Err(Error::DuplicateLabel(f.name().to_string()));
            }
            factors.push(f.clone());
        }
        Self::new(factors, self.matrix.kronecker(&other.matrix))
    }

    /// Traces out every factor not listed in `keep`.
    ///
    /// `keep` must be a nonempty subset given in the original factor order;
    /// the result keeps those factors in that order.
    pub fn partial_trace(&self, keep: &[&str]) -> Result<Self, Error> {
        if keep.is_empty() {
            return Err(Error::BadKeepList);
        }
        let positions = positions_of(&self.factors, keep)?;
        if positions.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::BadKeepList);
        }
        let layout = Layout::new(&self.factors);
        let kept_offsets = layout.offsets_of(&positions);
        let traced_offsets = layout.offsets_excluding(&positions);
        let kept_dim = kept_offsets.len();
        let mut out = DMatrix::from_element(kept_dim, kept_dim, C64::default());
        for (i, &ri) in kept_offsets.iter().enumerate() {
            for (j, &rj) in kept_offsets.iter().enumerate() {
                let mut acc = C64::default();
                for &t in &traced_offsets {
                    acc += self.matrix[(ri + t, rj + t)];
                }
                out[(i, j)] = acc;
            }
        }
        let factors = positions.iter().map(|&p| self.factors[p].clone()).collect();
        Self::new(factors, out)
    }

    /// `Tr(rho O)` with `O` lifted by identity onto any factors it does not
    /// name. The observable's factors must each match one of `rho`'s by name
    /// and dimension.
    pub fn expectation(&self, observable: &Observable) -> Result<f64, Error> {
        let names: Vec<&str> = observable.factors().iter().map(|f| f.name()).collect();
        let positions = positions_of(&self.factors, &names)?;
        for (&p, f) in positions.iter().zip(observable.factors()) {
            if self.factors[p].dim() != f.dim() {
                return Err(Error::DimensionMismatch {
                    expected: self.factors[p].dim(),
                    got: f.dim(),
                });
            }
        }
        let layout = Layout::new(&self.factors);
        let target_offsets = layout.offsets_of(&positions);
        let rest_offsets = layout.offsets_excluding(&positions);
        let m = observable.matrix();
        let mut acc = C64::default();
        for &r in &rest_offsets {
            for (a, &oa) in target_offsets.iter().enumerate() {
                for (b, &ob) in target_offsets.iter().enumerate() {
                    // Tr(rho O) picks rho[row of O's column, row of O's row].
                    acc += self.matrix[(r + ob, r + oa)] * m[(a, b)];
                }
            }
        }
        if acc.im.abs() > tol::HERMITICITY {
            return Err(Error::NotReal(acc.im));
        }
        Ok(acc.re)
    }

    /// Matrix element `<bra| rho |ket>`; both states must share `rho`'s
    /// factor list.
    pub fn coherence(&self, bra: &StateVector, ket: &StateVector) -> Result<C64, Error> {
        if bra.factors() != self.factors() || ket.factors() != self.factors() {
            return Err(Error::FactorMismatch);
        }
        let rotated = &self.matrix * ket.amplitudes();
        Ok(bra.amplitudes().dotc(&rotated))
    }

    /// Largest off-diagonal magnitude.
    pub fn max_offdiagonal(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let v = self.matrix[(i, j)].norm();
                    if v > worst {
                        worst = v;
                    }
                }
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn label(name: &str, dim: usize) -> SpaceLabel {
        SpaceLabel::new(name, dim).unwrap()
    }

    fn close(a: f64, b: f64, tolerance: f64) {
        assert!((a - b).abs() <= tolerance, "{a} vs {b} (tol {tolerance})");
    }

    /// Fixed 2x2 density matrix with off-diagonal coherence.
    fn rho_a() -> DensityOperator {
        let m =
            DMatrix::from_row_slice(2, 2, &[c(0.7, 0.0), c(0.2, 0.1), c(0.2, -0.1), c(0.3, 0.0)]);
        DensityOperator::new(vec![label("A", 2)], m).unwrap()
    }

    fn rho_b() -> DensityOperator {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[c(0.5, 0.0), c(0.0, 0.25), c(0.0, -0.25), c(0.5, 0.0)],
        );
        DensityOperator::new(vec![label("B", 2)], m).unwrap()
    }

    #[test]
    fn constructor_rejects_nonhermitian() {
        let m =
            DMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.3, 0.0), c(0.1, 0.0), c(0.5, 0.0)]);
        assert!(matches!(
            DensityOperator::new(vec![label("A", 2)], m),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn constructor_rejects_bad_trace() {
        let m =
            DMatrix::from_row_slice(2, 2, &[c(0.7, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.7, 0.0)]);
        assert!(matches!(
            DensityOperator::new(vec![label("A", 2)], m),
            Err(Error::BadTrace(_))
        ));
    }

    #[test]
    fn constructor_rejects_negative_eigenvalue() {
        // Hermitian, unit trace, but indefinite.
        let m =
            DMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.8, 0.0), c(0.8, 0.0), c(0.5, 0.0)]);
        assert!(matches!(
            DensityOperator::new(vec![label("A", 2)], m),
            Err(Error::NotPositive(_))
        ));
    }

    #[test]
    fn tensor_matches_kronecker_double_loop() {
        let a = rho_a();
        let b = rho_b();
        let joint = a.tensor(&b).unwrap();
        for i1 in 0..2 {
            for j1 in 0..2 {
                for i2 in 0..2 {
                    for j2 in 0..2 {
                        let expected = a.matrix()[(i1, j1)] * b.matrix()[(i2, j2)];
                        let got = joint.matrix()[(i1 * 2 + i2, j1 * 2 + j2)];
                        assert!((expected - got).norm() == 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn product_state_traces_back_exactly() {
        // Dyadic diagonal entries make the reduction float-exact.
        let joint = rho_a().tensor(&rho_b()).unwrap();
        let back = joint.partial_trace(&["A"]).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(back.matrix()[(i, j)], rho_a().matrix()[(i, j)]);
            }
        }
    }

    #[test]
    fn partial_trace_matches_index_sum_oracle() {
        // Entangled three-factor state, traced down to the middle factor.
        let amps = DVector::from_fn(12, |i, _| {
            c((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos())
        });
        let psi = StateVector::new(vec![label("a", 2), label("b", 3), label("c", 2)], amps)
            .unwrap()
            .normalized()
            .unwrap();
        let rho = psi.to_density().unwrap();
        let reduced = rho.partial_trace(&["b"]).unwrap();
        // Oracle: explicit four-index sum over the traced factors.
        let v = psi.amplitudes();
        for b1 in 0..3 {
            for b2 in 0..3 {
                let mut acc = C64::default();
                for a in 0..2 {
                    for cc in 0..2 {
                        let row = a * 6 + b1 * 2 + cc;
                        let col = a * 6 + b2 * 2 + cc;
                        acc += v[row] * v[col].conj();
                    }
                }
                assert!((acc - reduced.matrix()[(b1, b2)]).norm() < 1e-14);
            }
        }
        close(reduced.matrix().trace().re, 1.0, 1e-12);
    }

    #[test]
    fn partial_trace_requires_original_order() {
        let joint = rho_a().tensor(&rho_b()).unwrap();
        assert!(matches!(joint.partial_trace(&[]), Err(Error::BadKeepList)));
        assert!(matches!(
            joint.partial_trace(&["B", "A"]),
            Err(Error::BadKeepList)
        ));
        assert!(matches!(
            joint.partial_trace(&["Z"]),
            Err(Error::UnknownLabel(_))
        ));
        // Keeping everything is the identity.
        let same = joint.partial_trace(&["A", "B"]).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(same.matrix()[(i, j)], joint.matrix()[(i, j)]);
            }
        }
    }

    #[test]
    fn expectation_lifts_across_missing_factors() {
        let a = rho_a();
        let b = rho_b();
        let joint = a.tensor(&b).unwrap();
        let sz = Observable::new(
            vec![label("A", 2)],
            DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]),
        )
        .unwrap();
        let local = a.expectation(&sz).unwrap();
        let lifted = joint.expectation(&sz).unwrap();
        close(local, 0.7 - 0.3, 1e-14);
        close(lifted, local, 1e-12);
    }

    #[test]
    fn expectation_matches_reduction_route() {
        // Entangled state: lifted expectation equals expectation on the
        // partial trace.
        let amps = DVector::from_vec(vec![c(0.5, 0.2), c(0.1, -0.3), c(0.4, 0.0), c(0.2, 0.6)]);
        let psi = StateVector::new(vec![label("A", 2), label("B", 2)], amps)
            .unwrap()
            .normalized()
            .unwrap();
        let rho = psi.to_density().unwrap();
        let obs = Observable::new(
            vec![label("A", 2)],
            DMatrix::from_row_slice(
                2,
                2,
                &[c(0.3, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(-0.4, 0.0)],
            ),
        )
        .unwrap();
        let via_lift = rho.expectation(&obs).unwrap();
        let via_reduction = rho
            .partial_trace(&["A"])
            .unwrap()
            .expectation(&obs)
            .unwrap();
        close(via_lift, via_reduction, 1e-12);
    }

    #[test]
    fn purity_matches_schmidt_oracle() {
        // Purity of a reduction equals the sum of fourth powers of the
        // Schmidt coefficients, read off an SVD of the reshaped amplitudes.
        let amps = DVector::from_vec(vec![
            c(0.31, 0.1),
            c(-0.2, 0.44),
            c(0.5, 0.0),
            c(0.05, -0.61),
        ]);
        let psi = StateVector::new(vec![label("A", 2), label("B", 2)], amps)
            .unwrap()
            .normalized()
            .unwrap();
        let reduced = psi.to_density().unwrap().partial_trace(&["A"]).unwrap();
        let reshaped = DMatrix::from_fn(2, 2, |i, j| psi.amplitudes()[i * 2 + j]);
        let singular = reshaped.svd(false, false).singular_values;
        let oracle: f64 = singular.iter().map(|s| s.powi(4)).sum();
        close(reduced.purity(), oracle, 1e-12);
    }

    #[test]
    fn purity_bounds_hold_for_mixtures() {
        let b = rho_b();
        let p = b.purity();
        assert!((0.5 - 1e-10..=1.0 + 1e-10).contains(&p));
        let maximally_mixed = DensityOperator::new(
            vec![label("A", 2)],
            DMatrix::from_diagonal_element(2, 2, c(0.5, 0.0)),
        )
        .unwrap();
        close(maximally_mixed.purity(), 0.5, 1e-15);
    }

    #[test]
    fn coherence_reads_matrix_elements() {
        let a = rho_a();
        let bra = StateVector::basis_state(vec![label("A", 2)], &[0]).unwrap();
        let ket = StateVector::basis_state(vec![label("A", 2)], &[1]).unwrap();
        let z = a.coherence(&bra, &ket).unwrap();
        assert!((z - c(0.2, 0.1)).norm() < 1e-15);
        let mismatched = StateVector::basis_state(vec![label("B", 2)], &[0]).unwrap();
        assert!(matches!(
            a.coherence(&mismatched, &ket),
            Err(Error::FactorMismatch)
        ));
    }

    #[test]
    fn eigenvalues_are_sorted_and_bounded() {
        let vals = rho_a().eigenvalues();
        assert_eq!(vals.len(), 2);
        assert!(vals[0] <= vals[1]);
        assert!(vals[0] >= -1e-12);
        close(vals.iter().sum::<f64>(), 1.0, 1e-12);
    }
}
