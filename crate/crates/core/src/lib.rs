//! Classification, trace-field reconstruction and Fuchsian detection for
//! finitely generated subgroups of SU(2,1).
//!
//! Elements are validated into [`hermitian::Su21Element`] and classified by
//! [`classify`]. [`trace_field`] samples word traces, [`reconstruct`] rebuilds
//! generators from trace data, and [`detect`] decides R-Fuchsian and
//! C-Fuchsian structure. [`io`] holds the file formats and the command runner
//! used by the `chtrace` binary.
//!
//! ```
//! use chtrace::classify::{classify_element, ClassTag};
//! use chtrace::hermitian::{validate_su21, Complex, Mat3, Tolerances};
//!
//! let tol = Tolerances::default();
//! let r = |x: f64| Complex::new(x, 0.0);
//! let a = validate_su21(&Mat3::diag(r(2.0), r(1.0), r(0.5)), &tol).unwrap();
//! assert_eq!(classify_element(&a, &tol).unwrap().tag, ClassTag::Loxodromic);
//! ```

pub mod classify;
pub mod corpus;
pub mod detect;
pub mod error;
pub mod group;
pub mod hermitian;
pub mod io;
pub mod linalg;
pub mod reconstruct;
pub mod trace_field;
pub mod words;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/elements.md")]
    mod elements {}
    #[doc = include_str!("../../../book/src/traces.md")]
    mod traces {}
    #[doc = include_str!("../../../book/src/reconstruction.md")]
    mod reconstruction {}
    #[doc = include_str!("../../../book/src/detection.md")]
    mod detection {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
