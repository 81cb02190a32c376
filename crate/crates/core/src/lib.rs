//! Berger-sphere geometry and the sister-surface correspondence with H²×R.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod berger;
pub mod checks;
pub mod connection;
pub mod daniel;
pub mod error;
pub mod geodesics;
pub mod h2r;
pub mod intersect;
pub mod io;
pub mod isometry;
pub mod linalg;
pub mod mesh;
pub mod plateau;
pub mod polygon;
pub mod reflect;
pub mod sampling;
pub mod surfaces;
pub mod unduloid;

pub use berger::{BergerParams, FrameAtPoint, S3Point, S3Tangent};
pub use error::{GeomError, Result};
pub use isometry::{check_isometry, AmbientIsometry, Commutation};
