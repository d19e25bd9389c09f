//! Certifying simplicial faces of the elliptope spanned by random cut
//! matrices, with the moment oracles and probability bounds that go with it,
//! plus a small MaxCut relaxation pipeline.

pub mod bounds;
pub mod cli;
pub mod cutgeom;
pub mod error;
pub mod lpcert;
pub mod maxcut;
pub mod moments;
pub mod randmodel;
pub mod rank;
pub mod stats;

pub use error::{Error, Result};
