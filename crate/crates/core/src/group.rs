//! Finitely generated subgroups given by generator lists.

use crate::hermitian::{Mat3, Su21Element};

/// A finitely generated subgroup of SU(2,1).
#[derive(Clone, Debug, PartialEq)]
pub struct GroupSpec {
    pub generators: Vec<Su21Element>,
    /// Caller's assertion that the group is discrete; never decided here.
    pub assumed_discrete: bool,
}

impl GroupSpec {
    pub fn new(generators: Vec<Su21Element>) -> Self {
        GroupSpec { generators, assumed_discrete: false }
    }

    pub fn discrete(mut self, flag: bool) -> Self {
        self.assumed_discrete = flag;
        self
    }

    /// Every generator replaced by `s g s^{-1}`.
    pub fn conjugated_by(&self, s: &Su21Element) -> Self {
        GroupSpec {
            generators: self.generators.iter().map(|g| g.conjugate_by(s)).collect(),
            assumed_discrete: self.assumed_discrete,
        }
    }

    pub fn matrices(&self) -> Vec<Mat3> {
        self.generators.iter().map(|g| *g.matrix()).collect()
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }
}
