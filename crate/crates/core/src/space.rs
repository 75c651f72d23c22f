//! Labeled tensor factors and the index arithmetic over their joint basis.
//!
//! Joint bases are ordered row-major: the first factor in a list is the most
//! significant digit of the flat index. All higher-level operations (partial
//! traces, targeted unitaries, projections) reduce to the offset tables
//! computed here.

use crate::error::Error;

/// A named tensor factor with a fixed dimension.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpaceLabel {
    name: String,
    dim: usize,
}

impl SpaceLabel {
    pub fn new(name: impl Into<String>, dim: usize) -> Result<Self, Error> {
        let name = name.into();
        if dim == 0 {
            return Err(Error::ZeroDimension(name));
        }
        Ok(SpaceLabel { name, dim })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// Ordered collection of factor labels with unique names.
#[derive(Clone, Debug, Default)]
pub struct SpaceRegistry {
    labels: Vec<SpaceLabel>,
}

impl SpaceRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a label, rejecting name collisions.
    pub fn add(&mut self, label: SpaceLabel) -> Result<(), Error> {
        if self.get(label.name()).is_some() {
            return Err(Error::DuplicateLabel(label.name().to_string()));
        }
        self.labels.push(label);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&SpaceLabel> {
        self.labels.iter().find(|l| l.name() == name)
    }

    pub fn labels(&self) -> &[SpaceLabel] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Checks uniqueness of a factor list and returns the joint dimension.
pub(crate) fn joint_dim(factors: &[SpaceLabel]) -> Result<usize, Error> {
    for (i, f) in factors.iter().enumerate() {
        if factors[..i].iter().any(|g| g.name() == f.name()) {
            return Err(Error::DuplicateLabel(f.name().to_string()));
        }
    }
    Ok(factors.iter().map(|f| f.dim()).product())
}

/// Positions of `names` inside `factors`; names must exist and be distinct.
pub(crate) fn positions_of(factors: &[SpaceLabel], names: &[&str]) -> Result<Vec<usize>, Error> {
    let mut seen: Vec<usize> = Vec::with_capacity(names.len());
    for name in names {
        if seen.iter().any(|&p| factors[p].name() == *name) {
            return Err(Error::DuplicateLabel((*name).to_string()));
        }
        let pos = factors
            .iter()
            .position(|f| f.name() == *name)
            .ok_or_else(|| Error::UnknownLabel((*name).to_string()))?;
        seen.push(pos);
    }
    Ok(seen)
}

/// Row-major strides of a factor list.
#[derive(Clone, Debug)]
pub(crate) struct Layout {
    dims: Vec<usize>,
    strides: Vec<usize>,
    len: usize,
}

impl Layout {
    pub fn new(factors: &[SpaceLabel]) -> Self {
        let dims: Vec<usize> = factors.iter().map(|f| f.dim()).collect();
        let mut strides = vec![1usize; dims.len()];
        for i in (0..dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * dims[i + 1];
        }
        let len = dims.iter().product();
        Layout { dims, strides, len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn stride(&self, pos: usize) -> usize {
        self.strides[pos]
    }

    /// Flat index of a full multi-index.
    pub fn flat(&self, indices: &[usize]) -> usize {
        indices.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    /// Flat offsets of every joint assignment of exactly the factors at
    /// `positions` (all other factors held at index 0). Enumeration is
    /// row-major in the order `positions` is given, so the caller's factor
    /// ordering defines the basis of the resulting block.
    pub fn offsets_of(&self, positions: &[usize]) -> Vec<usize> {
        let total: usize = positions.iter().map(|&p| self.dims[p]).product();
        let mut out = Vec::with_capacity(total);
        let mut digits = vec![0usize; positions.len()];
        for _ in 0..total {
            out.push(
                digits
                    .iter()
                    .zip(positions)
                    .map(|(&d, &p)| d * self.strides[p])
                    .sum(),
            );
            for k in (0..positions.len()).rev() {
                digits[k] += 1;
                if digits[k] < self.dims[positions[k]] {
                    break;
                }
                digits[k] = 0;
            }
        }
        out
    }

    /// Offsets of every assignment of the factors *not* listed in
    /// `positions`, in ascending factor order.
    pub fn offsets_excluding(&self, positions: &[usize]) -> Vec<usize> {
        let rest: Vec<usize> = (0..self.dims.len())
            .filter(|p| !positions.contains(p))
            .collect();
        self.offsets_of(&rest)
    }
}
