//! Effective Chevalley–Weil toolkit.
//!
//! Given an explicitly presented cover `π: W → V` of varieties over `Q`,
//! this crate finds Nullstellensatz certificates for fixed-point-freeness
//! of a deck group and for constancy of fiber cardinality, derives the
//! finite set `S` of bad primes from the certificate denominators, lifts
//! `S`-integral points along the cover and checks that the residue-field
//! extensions they generate are unramified outside `S`.

pub mod arith;
pub mod certify;
pub mod cover;
pub mod coverfile;
pub mod fermat;
pub mod lift;
pub mod numfield;
pub mod poly;
pub mod primes;
pub mod report;
pub mod sample;
pub mod verify;

pub use certify::{Bounds, Certificate, CertificateSearch, Ideal};
pub use cover::{CoverSpec, Family, VarietyPresentation};
pub use coverfile::CoverFile;
pub use numfield::{MinPoly, RamVerdict};
pub use poly::{MPoly, QPoly, Rat, Ring, UPoly};
pub use primes::PrimeSet;
pub use report::{Report, Status};
