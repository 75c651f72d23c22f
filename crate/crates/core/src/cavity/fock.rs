//! Truncated photon-number spaces: coherent states, truncation policy, and
//! the even/odd cat-state fringe readout.

use nalgebra::DVector;

use crate::density::DensityOperator;
use crate::error::Error;
use crate::space::SpaceLabel;
use crate::state::StateVector;
use crate::{tol, C64};

/// A single field mode kept up to photon number `cutoff` (dimension
/// `cutoff + 1`).
#[derive(Clone, Debug)]
pub struct FockSpace {
    label: SpaceLabel,
    cutoff: usize,
}

/// Cutoff heuristic that keeps the truncated tail of a coherent state far
/// below `tol::COHERENT_TAIL`: mean photon number plus seven standard-ish
/// deviations plus slack.
pub fn default_cutoff(alpha: C64) -> usize {
    let modulus = alpha.norm();
    (modulus * modulus + 7.0 * modulus + 10.0).ceil() as usize
}

/// Smallest cutoff whose truncated coherent-state tail drops below
/// `tol::COHERENT_TAIL`.
pub fn required_cutoff(alpha: C64) -> usize {
    let mean = alpha.norm_sqr();
    let mut weight = (-mean).exp(); // Poisson weight at n = 0
    let mut captured = weight;
    let mut n = 0usize;
    while 1.0 - captured > tol::COHERENT_TAIL {
        n += 1;
        weight *= mean / n as f64;
        captured += weight;
    }
    n
}

impl FockSpace {
    pub fn new(name: &str, cutoff: usize) -> Result<Self, Error> {
        if cutoff < 1 {
            return Err(Error::Unsupported(
                "Fock cutoff must be at least 1".to_string(),
            ));
        }
        let label = SpaceLabel::new(name, cutoff + 1)?;
        Ok(FockSpace { label, cutoff })
    }

    /// Space sized for `alpha` by the `default_cutoff` heuristic.
    pub fn for_amplitude(name: &str, alpha: C64) -> Result<Self, Error> {
        Self::new(name, default_cutoff(alpha))
    }

    pub fn label(&self) -> &SpaceLabel {
        &self.label
    }

    pub fn name(&self) -> &str {
        self.label.name()
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.cutoff + 1
    }

    pub fn vacuum(&self) -> StateVector {
        self.fock_state(0).expect("vacuum always fits")
    }

    pub fn fock_state(&self, n: usize) -> Result<StateVector, Error> {
        StateVector::basis_state(vec![self.label.clone()], &[n])
    }

    /// Truncated, renormalized coherent state. Fails with `CutoffTooSmall`
    /// when the discarded tail exceeds `tol::COHERENT_TAIL`.
    pub fn coherent_state(&self, alpha: C64) -> Result<StateVector, Error> {
        let mut amplitudes = DVector::from_element(self.dim(), C64::default());
        let mut coefficient = C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
        let mut captured = 0.0;
        for n in 0..=self.cutoff {
            amplitudes[n] = coefficient;
            captured += coefficient.norm_sqr();
            coefficient *= alpha / C64::new(((n + 1) as f64).sqrt(), 0.0);
        }
        if 1.0 - captured > tol::COHERENT_TAIL {
            return Err(Error::CutoffTooSmall {
                cutoff: self.cutoff,
                required: required_cutoff(alpha),
                modulus: alpha.norm(),
            });
        }
        let norm = captured.sqrt();
        StateVector::new(vec![self.label.clone()], amplitudes / C64::new(norm, 0.0))
    }

    /// Normalized even/odd superpositions of `|alpha>` and `|-alpha>`.
    /// They occupy disjoint (even vs odd) photon numbers, so they are
    /// orthogonal at any cutoff. Fails with `DegenerateCat` when the two
    /// coherent branches coincide.
    pub fn cat_pair(&self, alpha: C64) -> Result<(StateVector, StateVector), Error> {
        if alpha.norm() < 1e-6 {
            return Err(Error::DegenerateCat(alpha.norm()));
        }
        let plus_branch = self.coherent_state(alpha)?;
        let minus_branch = self.coherent_state(-alpha)?;
        let sum = plus_branch.amplitudes() + minus_branch.amplitudes();
        let difference = plus_branch.amplitudes() - minus_branch.amplitudes();
        let even = StateVector::new(vec![self.label.clone()], sum)?.normalized()?;
        let odd = StateVector::new(vec![self.label.clone()], difference)?.normalized()?;
        Ok((even, odd))
    }

    /// Interference signal of a field state: population on the even cat
    /// minus population on the odd cat. +1 and -1 for the pure cats, and
    /// `exp(-2|alpha|^2)` for both a single coherent branch and the 50/50
    /// classical mixture of the two branches.
    pub fn cat_fringe_signal(&self, rho: &DensityOperator, alpha: C64) -> Result<f64, Error> {
        let (even, odd) = self.cat_pair(alpha)?;
        let on_even = rho.coherence(&even, &even)?;
        let on_odd = rho.coherence(&odd, &odd)?;
        Ok(on_even.re - on_odd.re)
    }
}

/// Closed-form overlap `<alpha|beta>` of untruncated coherent states.
pub fn coherent_overlap(alpha: C64, beta: C64) -> C64 {
    (C64::new(-(alpha.norm_sqr() + beta.norm_sqr()) / 2.0, 0.0) + alpha.conj() * beta).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tolerance: f64) {
        assert!((a - b).abs() <= tolerance, "{a} vs {b} (tol {tolerance})");
    }

    #[test]
    fn default_cutoff_table() {
        assert_eq!(default_cutoff(C64::new(0.0, 0.0)), 10);
        assert_eq!(default_cutoff(C64::new(1.0, 0.0)), 18);
        assert_eq!(default_cutoff(C64::new(2.0, 0.0)), 28);
        assert_eq!(default_cutoff(C64::new(3.0, 0.0)), 40);
        assert_eq!(default_cutoff(C64::new(1.5, 0.0)), 23);
        // Depends only on the modulus.
        assert_eq!(default_cutoff(C64::new(0.0, 2.0)), 28);
    }

    #[test]
    fn required_cutoff_matches_poisson_tail() {
        assert_eq!(required_cutoff(C64::new(2.0, 0.0)), 22);
        assert_eq!(required_cutoff(C64::new(3.0, 0.0)), 34);
        assert_eq!(required_cutoff(C64::new(0.0, 0.0)), 0);
    }

    #[test]
    fn coherent_coefficients_follow_the_closed_form() {
        let alpha = C64::new(1.2, -0.7);
        let space = FockSpace::for_amplitude("f", alpha).unwrap();
        let psi = space.coherent_state(alpha).unwrap();
        let mut factorial = 1.0;
        for n in 0..=12usize {
            if n > 0 {
                factorial *= n as f64;
            }
            let expected = alpha.powu(n as u32)
                * C64::new((-alpha.norm_sqr() / 2.0).exp() / factorial.sqrt(), 0.0);
            // Renormalization shifts coefficients by at most the tail mass.
            assert!((psi.amplitudes()[n] - expected).norm() < 1e-9);
        }
        close(psi.norm(), 1.0, 1e-14);
    }

    #[test]
    fn cutoff_zero_is_rejected() {
        assert!(FockSpace::new("f", 0).is_err());
    }

    #[test]
    fn mean_photon_number_matches_the_amplitude() {
        let alpha = C64::new(2.0, 0.0);
        let space = FockSpace::new("f", 30).unwrap();
        let psi = space.coherent_state(alpha).unwrap();
        let mean: f64 = psi
            .amplitudes()
            .iter()
            .enumerate()
            .map(|(n, c)| n as f64 * c.norm_sqr())
            .sum();
        close(mean, 4.0, 1e-8);
    }

    #[test]
    fn vacuum_amplitude_is_exactly_one() {
        let space = FockSpace::new("f", 5).unwrap();
        let psi = space.coherent_state(C64::default()).unwrap();
        assert_eq!(psi.amplitudes()[0], C64::new(1.0, 0.0));
        for n in 1..=5 {
            assert_eq!(psi.amplitudes()[n], C64::default());
        }
    }

    #[test]
    fn undersized_space_is_rejected_with_guidance() {
        let space = FockSpace::new("f", 10).unwrap();
        match space.coherent_state(C64::new(2.0, 0.0)) {
            Err(Error::CutoffTooSmall {
                cutoff,
                required,
                modulus,
            }) => {
                assert_eq!(cutoff, 10);
                assert_eq!(required, 22);
                close(modulus, 2.0, 1e-15);
            }
            other => panic!("expected CutoffTooSmall, got {other:?}"),
        }
    }

    #[test]
    fn truncated_overlap_matches_closed_form() {
        let alpha = C64::new(1.0, 0.5);
        let beta = C64::new(-0.7, 0.2);
        let space = FockSpace::new("f", 24).unwrap();
        let a = space.coherent_state(alpha).unwrap();
        let b = space.coherent_state(beta).unwrap();
        let truncated = a.inner(&b).unwrap();
        let exact = coherent_overlap(alpha, beta);
        assert!((truncated - exact).norm() < 1e-8);
    }

    #[test]
    fn opposite_branches_barely_overlap() {
        let x = coherent_overlap(C64::new(2.0, 0.0), C64::new(-2.0, 0.0));
        close(x.re, 3.3546262790251185e-4, 1e-18);
        close(x.im, 0.0, 0.0);
        assert!(x.re < 4e-4);
    }

    #[test]
    fn cat_states_are_orthonormal_at_any_cutoff() {
        for &(re, im, cutoff) in &[(2.0, 0.0, 28), (1.0, 1.0, 28), (0.5, -0.3, 18)] {
            let space = FockSpace::new("f", cutoff).unwrap();
            let (even, odd) = space.cat_pair(C64::new(re, im)).unwrap();
            close(even.norm(), 1.0, 1e-14);
            close(odd.norm(), 1.0, 1e-14);
            assert!(even.inner(&odd).unwrap().norm() <= 1e-16);
            // Disjoint photon-number support.
            for n in 0..=cutoff {
                if n % 2 == 0 {
                    assert_eq!(odd.amplitudes()[n], C64::default());
                } else {
                    assert_eq!(even.amplitudes()[n], C64::default());
                }
            }
        }
    }

    #[test]
    fn degenerate_cat_is_refused() {
        let space = FockSpace::new("f", 12).unwrap();
        assert!(matches!(
            space.cat_pair(C64::default()),
            Err(Error::DegenerateCat(_))
        ));
    }

    #[test]
    fn fringe_signal_separates_cats_from_mixtures() {
        let alpha = C64::new(2.0, 0.0);
        let space = FockSpace::new("f", 28).unwrap();
        let (even, odd) = space.cat_pair(alpha).unwrap();

        let rho_even = even.to_density().unwrap();
        close(
            space.cat_fringe_signal(&rho_even, alpha).unwrap(),
            1.0,
            1e-12,
        );

        let rho_odd = odd.to_density().unwrap();
        close(
            space.cat_fringe_signal(&rho_odd, alpha).unwrap(),
            -1.0,
            1e-12,
        );

        let plus = space.coherent_state(alpha).unwrap().to_density().unwrap();
        let minus = space.coherent_state(-alpha).unwrap().to_density().unwrap();
        let mixture = DensityOperator::new(
            plus.factors().to_vec(),
            plus.matrix() * C64::new(0.5, 0.0) + minus.matrix() * C64::new(0.5, 0.0),
        )
        .unwrap();
        let x = 3.3546262790251185e-4; // overlap of the opposite branches
        close(space.cat_fringe_signal(&mixture, alpha).unwrap(), x, 1e-10);
        close(space.cat_fringe_signal(&plus, alpha).unwrap(), x, 1e-10);
    }
}
