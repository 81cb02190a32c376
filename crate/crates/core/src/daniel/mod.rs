//! The sister correspondence between minimal surfaces in `S³(4H²−1, H)` and
//! constant mean curvature `H` surfaces in H²×R: first-order data on a
//! parameter lattice, the sister data map, reconstruction by integrating the
//! structure equations, and periodicity diagnostics.

mod data;
mod diagnose;
mod reconstruct;

pub use data::*;
pub use diagnose::*;
pub use reconstruct::*;

#[cfg(feature = "parallel")]
pub(crate) fn map_indices<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indices<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    (0..n).map(f).collect()
}

/// Two triangles per lattice cell, vertex `j nx + i`.
pub(crate) fn grid_faces(nx: usize, ny: usize) -> Vec<[usize; 3]> {
    let mut f = Vec::with_capacity(2 * (nx - 1) * (ny - 1));
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let a = j * nx + i;
            f.push([a, a + 1, a + nx + 1]);
            f.push([a, a + nx + 1, a + nx]);
        }
    }
    f
}
