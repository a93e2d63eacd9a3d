//! Runs the code listings of the guide in `book/src` as doc-tests, one
//! module per chapter so a failure names its chapter.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/fields.md")]
pub mod fields {}

#[doc = include_str!("../../../book/src/geometry.md")]
pub mod geometry {}

#[doc = include_str!("../../../book/src/polar-spaces.md")]
pub mod polar_spaces {}

#[doc = include_str!("../../../book/src/ovoids.md")]
pub mod ovoids {}

#[doc = include_str!("../../../book/src/klein.md")]
pub mod klein {}

#[doc = include_str!("../../../book/src/isometries.md")]
pub mod isometries {}

#[doc = include_str!("../../../book/src/constructions.md")]
pub mod constructions {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}

#[doc = include_str!("../../../README.md")]
pub mod readme {}
