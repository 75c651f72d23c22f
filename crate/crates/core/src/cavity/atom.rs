//! Two- and three-level probe atoms and the operations a cavity experiment
//! applies to them: classical-field pulses, dispersive phase shifts,
//! resonant photon exchange, which-path erasure, and state-selective
//! detection.

use nalgebra::{DMatrix, DVector};

use crate::error::Error;
use crate::space::SpaceLabel;
use crate::state::StateVector;
use crate::{tol, C64};

/// An atom with named levels. The first two levels (conventionally `e`
/// and `g`) carry the pulse and exchange dynamics; an optional third
/// level (`a`) is the sink for which-path erasure.
#[derive(Clone, Debug)]
pub struct AtomSpace {
    label: SpaceLabel,
    levels: Vec<String>,
}

/// One detection outcome: the level seen, its probability, and the
/// collapsed state (absent when the probability is exactly zero).
#[derive(Clone, Debug)]
pub struct DetectionRecord {
    pub outcome: String,
    pub probability: f64,
    pub post_state: Option<StateVector>,
}

impl AtomSpace {
    pub fn two_level(name: &str) -> Result<Self, Error> {
        Self::with_levels(name, &["e", "g"])
    }

    pub fn three_level(name: &str) -> Result<Self, Error> {
        Self::with_levels(name, &["e", "g", "a"])
    }

    pub fn with_levels(name: &str, levels: &[&str]) -> Result<Self, Error> {
        if levels.len() < 2 || levels.len() > 3 {
            return Err(Error::BadLevelList {
                min: 2,
                max: 3,
                got: levels.len(),
            });
        }
        for (i, level) in levels.iter().enumerate() {
            if level.is_empty() || levels[..i].contains(level) {
                return Err(Error::DuplicateLabel(format!("{name}:{level}")));
            }
        }
        Ok(AtomSpace {
            label: SpaceLabel::new(name, levels.len())?,
            levels: levels.iter().map(|s| s.to_string()).collect(),
        })
    }

    pub fn label(&self) -> &SpaceLabel {
        &self.label
    }

    pub fn name(&self) -> &str {
        self.label.name()
    }

    pub fn dim(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[String] {
        &self.levels
    }

    pub fn level_index(&self, level: &str) -> Result<usize, Error> {
        self.levels
            .iter()
            .position(|l| l == level)
            .ok_or_else(|| Error::UnknownLevel {
                atom: self.name().to_string(),
                level: level.to_string(),
            })
    }

    pub fn basis_state(&self, level: &str) -> Result<StateVector, Error> {
        let index = self.level_index(level)?;
        StateVector::basis_state(vec![self.label.clone()], &[index])
    }

    /// Real rotation by `area` in the `(e, g)` plane, identity on the
    /// third level: `e -> cos(area/2) e + sin(area/2) g`,
    /// `g -> cos(area/2) g - sin(area/2) e`.
    pub fn pulse(&self, area: f64) -> DMatrix<C64> {
        let (sin, cos) = (area / 2.0).sin_cos();
        let mut u = DMatrix::identity(self.dim(), self.dim());
        u[(0, 0)] = C64::new(cos, 0.0);
        u[(0, 1)] = C64::new(-sin, 0.0);
        u[(1, 0)] = C64::new(sin, 0.0);
        u[(1, 1)] = C64::new(cos, 0.0);
        u
    }

    /// The balanced pulse: `e -> (e + g)/sqrt(2)`, `g -> (g - e)/sqrt(2)`.
    pub fn ramsey_pulse(&self) -> DMatrix<C64> {
        self.pulse(std::f64::consts::FRAC_PI_2)
    }

    /// Diagonal joint unitary over `(atom, field)` that advances the field
    /// phase by `phases[level]` per photon: `|level, n> ->
    /// exp(i * phases[level] * n) |level, n>`.
    pub fn dispersive_shift(
        &self,
        phases: &[f64],
        field_dim: usize,
    ) -> Result<DMatrix<C64>, Error> {
        if phases.len() != self.dim() {
            return Err(Error::BadCoefficientCount {
                min: self.dim(),
                max: self.dim(),
                got: phases.len(),
            });
        }
        let dim = self.dim() * field_dim;
        let mut u = DMatrix::from_element(dim, dim, C64::default());
        for (level, &phase) in phases.iter().enumerate() {
            for n in 0..field_dim {
                let k = level * field_dim + n;
                u[(k, k)] = C64::cis(phase * n as f64);
            }
        }
        Ok(u)
    }

    /// Resonant photon-exchange unitary over `(atom, field)` for a total
    /// interaction angle `angle` (coupling times duration). Each manifold
    /// `(|e,n>, |g,n+1>)` rotates by `angle * sqrt(n+1)`:
    ///
    /// `|e,n>   -> cos(theta) |e,n>   + i sin(theta) |g,n+1>`
    /// `|g,n+1> -> cos(theta) |g,n+1> + i sin(theta) |e,n>`
    ///
    /// `|g,0>` and the top state `|e,cutoff>` have no partner and stay
    /// fixed, which keeps the truncated map unitary. Third-level rows are
    /// identity.
    pub fn exchange_unitary(&self, field_dim: usize, angle: f64) -> DMatrix<C64> {
        let dim = self.dim() * field_dim;
        let mut u = DMatrix::identity(dim, dim);
        for n in 0..field_dim.saturating_sub(1) {
            let theta = angle * ((n + 1) as f64).sqrt();
            let (sin, cos) = theta.sin_cos();
            let e_n = n; // level 0
            let g_n1 = field_dim + n + 1; // level 1
            u[(e_n, e_n)] = C64::new(cos, 0.0);
            u[(g_n1, g_n1)] = C64::new(cos, 0.0);
            u[(e_n, g_n1)] = C64::new(0.0, sin);
            u[(g_n1, e_n)] = C64::new(0.0, sin);
        }
        u
    }

    /// Applies the photon-exchange unitary to `psi`. A populated third
    /// level is rejected: an atom parked in the sink level no longer
    /// couples to the field.
    pub fn jc_evolve(
        &self,
        psi: &StateVector,
        field: &str,
        angle: f64,
    ) -> Result<StateVector, Error> {
        if self.dim() == 3 {
            let parked = self.level_population(psi, &self.levels[2])?;
            if parked > tol::LEVEL_EMPTY {
                return Err(Error::EraseLevelPopulated {
                    atom: self.name().to_string(),
                    population: parked,
                });
            }
        }
        let field_dim = psi
            .factors()
            .iter()
            .find(|l| l.name() == field)
            .ok_or_else(|| Error::UnknownLabel(field.to_string()))?
            .dim();
        psi.apply_unitary(
            &self.exchange_unitary(field_dim, angle),
            &[self.name(), field],
        )
    }

    /// Probability of finding the atom in `level`, marginalized over all
    /// other factors of `psi`.
    pub fn level_population(&self, psi: &StateVector, level: &str) -> Result<f64, Error> {
        let index = self.level_index(level)?;
        let position = psi
            .factor_names()
            .iter()
            .position(|n| *n == self.name())
            .ok_or_else(|| Error::UnknownLabel(self.name().to_string()))?;
        let layout = psi.layout();
        let stride = layout.stride(position);
        let mut population = 0.0;
        for rest in layout.offsets_excluding(&[position]) {
            population += psi.amplitudes()[rest + index * stride].norm_sqr();
        }
        Ok(population)
    }

    /// Merges the `e` and `g` amplitudes into the sink level `a`,
    /// destroying the record of which of the two the atom was in:
    /// `|e> -> |a>`, `|g> -> |a>`. Returns the renormalized state and the
    /// squared norm before renormalization (`1 + 2 Re<phi_e|phi_g>` for a
    /// balanced superposition with conditional field states `phi`).
    pub fn erase_which_path(&self, psi: &StateVector) -> Result<(StateVector, f64), Error> {
        if self.dim() != 3 {
            return Err(Error::NoEraseLevel(self.name().to_string()));
        }
        let parked = self.level_population(psi, &self.levels[2])?;
        if parked > tol::LEVEL_EMPTY {
            return Err(Error::EraseLevelPopulated {
                atom: self.name().to_string(),
                population: parked,
            });
        }
        let position = psi
            .factor_names()
            .iter()
            .position(|n| *n == self.name())
            .ok_or_else(|| Error::UnknownLabel(self.name().to_string()))?;
        let layout = psi.layout();
        let stride = layout.stride(position);
        let mut amplitudes = DVector::from_element(psi.dim(), C64::default());
        let mut weight = 0.0;
        for rest in layout.offsets_excluding(&[position]) {
            let merged = psi.amplitudes()[rest] + psi.amplitudes()[rest + stride];
            weight += merged.norm_sqr();
            amplitudes[rest + 2 * stride] = merged;
        }
        if weight <= tol::BRANCH_PRUNE {
            return Err(Error::NothingToErase(self.name().to_string()));
        }
        let scale = C64::new(weight.sqrt(), 0.0);
        let state = StateVector::new(psi.factors().to_vec(), amplitudes / scale)?;
        Ok((state, weight))
    }

    /// State-selective detection: one record per level, probabilities
    /// summing to one, each with the collapsed (renormalized) state when
    /// the probability is nonzero.
    pub fn detect(&self, psi: &StateVector) -> Result<Vec<DetectionRecord>, Error> {
        psi.check_normalized()?;
        let position = psi
            .factor_names()
            .iter()
            .position(|n| *n == self.name())
            .ok_or_else(|| Error::UnknownLabel(self.name().to_string()))?;
        let layout = psi.layout();
        let stride = layout.stride(position);
        let rest_offsets = layout.offsets_excluding(&[position]);
        let mut records = Vec::with_capacity(self.dim());
        for (index, level) in self.levels.iter().enumerate() {
            let mut amplitudes = DVector::from_element(psi.dim(), C64::default());
            let mut probability = 0.0;
            for &rest in &rest_offsets {
                let flat = rest + index * stride;
                probability += psi.amplitudes()[flat].norm_sqr();
                amplitudes[flat] = psi.amplitudes()[flat];
            }
            let post_state = if probability > 0.0 {
                let scale = C64::new(probability.sqrt(), 0.0);
                Some(StateVector::new(
                    psi.factors().to_vec(),
                    amplitudes / scale,
                )?)
            } else {
                None
            };
            records.push(DetectionRecord {
                outcome: level.clone(),
                probability,
                post_state,
            });
        }
        let total: f64 = records.iter().map(|r| r.probability).sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::BadTrace(total));
        }
        Ok(records)
    }
}
