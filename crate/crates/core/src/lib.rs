//! Source-to-source tooling for fixed-form Fortran-77 with Esope extensions.
//!
//! Esope is a legacy extension of Fortran-77 adding record-like *segments*,
//! pointer variables, six segment-management statements, and dot/slash
//! notations for member access and dimension queries. None of that is valid
//! Fortran, so ordinary Fortran tooling cannot read it.
//!
//! This crate implements a pipeline that round-trips such sources through a
//! plain Fortran representation:
//!
//! 1. [`island`] rewrites Esope constructs into annotated, syntactically
//!    valid Fortran-77 (`c@_` comment annotations, `D__`/`S__` call forms),
//! 2. [`parser`] parses the annotated source into an AST that keeps comments
//!    and source positions,
//! 3. [`recovery`] turns annotations and `D__`/`S__` forms back into
//!    dedicated Esope AST nodes,
//! 4. [`emitter`] regenerates Esope source text from the AST, and
//! 5. [`roundtrip`] verifies the regenerated text against the original under
//!    a normalizing ("loose") comparison.
//!
//! The crate is `no_std` (alloc required); all IO lives behind the
//! [`roundtrip::IncludeResolver`] trait and in the companion CLI crate.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

pub mod ast;
pub mod diag;
pub mod emitter;
pub mod fixedform;
pub mod island;
pub mod json;
pub mod lexer;
pub mod parser;
pub mod recovery;
pub mod roundtrip;
mod scan;
pub mod span;

pub use span::{FileId, SourceSpan};
