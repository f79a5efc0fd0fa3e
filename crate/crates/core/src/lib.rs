//! Portrait growth of finitely generated, contracting, regular branch groups.
//!
//! Elements of self-similar groups are words over generators given by wreath
//! recursions ([`group`]). Their nucleus portraits ([`portrait`]) are canonical finite
//! trees; the portrait growth sequence `a_n` counts elements whose portrait has depth
//! at most `n`. [`census`] counts them by brute force, [`branch`] and [`families`]
//! compute them exactly from coset decompositions, and [`asymptotics`] certifies the
//! doubly exponential envelope `alpha e^(gamma d^n) <= a_n <= beta e^(gamma d^n)`.

pub mod error;
pub mod perm;
pub mod word;
pub mod group;
pub mod catalog;
pub mod portrait;
pub mod algebra;
pub mod census;
pub mod series;
pub mod branch;
pub mod families;
pub mod quotient;
pub mod asymptotics;

pub use error::{Error, Result};
pub use group::{GroupSpec, Vertex};
pub use perm::Permutation;
pub use word::{inverse_word, Word};
