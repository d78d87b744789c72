//! Reconstruction of a group from trace data: the three trace systems, the
//! pair normal form, a trace-form basis of `M_3(C)`, and the conjugation of a
//! whole group into matrices over its trace field (or into `SO(2,1)` when
//! that field is real).

mod burnside;
mod ledger;
mod normalize;
mod realize;

pub use burnside::{burnside_basis, combine, decompose_traces, trace_form_decompose, trace_gram, BurnsideBasis};
pub use ledger::{
    diagonal_det_closed_form, diagonal_system, mixed_det_closed_form, mixed_system, products_det_closed_form,
    products_system, recover_diagonal, recover_mixed, recover_products, DiagonalLoxodromic, EntryLedger,
};
pub use normalize::{normalize_pair, rebuild, PairNormalization};
pub(crate) use realize::conjugate_targets_into_so21;
pub use realize::{conjugate_into_so21, realize_over_trace_field, select_pair};

use crate::hermitian::{Mat3, Su21Element};
use crate::words::Word;

/// What a [`Certificate`] certifies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum CertificateKind {
    /// Generators conjugated into matrices over `Q(tr, lambda)`; the residual
    /// is the gap between the trace-only reconstruction and the conjugated input.
    FieldRealization,
    /// Generators conjugated into `SO(2,1)`; the residual is the largest
    /// imaginary part of a conjugated, lift-normalized generator.
    RealForm,
}

/// Checkable output of a realization.
#[derive(Clone, Debug)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub conjugator: Su21Element,
    /// `omega^{-k} f g f^{-1}` for each input generator `g`.
    pub transformed_generators: Vec<Mat3>,
    /// The same matrices rebuilt from traces, `lambda` and the basis words.
    pub reconstructed_generators: Vec<Mat3>,
    /// Cube-root-of-unity exponent `k` divided out of each generator.
    pub lifts: Vec<usize>,
    pub residual: f64,
    /// Gap between reconstruction and conjugated input (equals `residual`
    /// for field realizations).
    pub reconstruction_residual: f64,
    /// Words (in the input generators) of the loxodromic pair used.
    pub pair_words: [Word; 2],
    /// Words (in the input generators) of the nine basis elements.
    pub basis_words: Vec<Word>,
    pub lambda: f64,
}

impl Certificate {
    /// Largest mismatch between `omega^{-k} f g f^{-1}` recomputed from the
    /// given generators and the stored transformed generators.
    pub fn check(&self, generators: &[Su21Element]) -> f64 {
        generators
            .iter()
            .zip(&self.transformed_generators)
            .zip(&self.lifts)
            .map(|((g, t), &k)| (*g.conjugate_by(&self.conjugator).lift((3 - k % 3) % 3).matrix() - *t).max_norm())
            .fold(0.0, f64::max)
    }
}
