use crate::error::{Error, Result};
use crate::linalg::{CMat, CVec};
use crate::rng::RandomSource;

use super::{PureState, SystemLayout};

/// Normalized vector of independent standard complex Gaussians.
pub fn haar_random_pure(layout: SystemLayout, rng: &mut RandomSource) -> PureState {
    let d = layout.total_dim();
    loop {
        let v = CVec::from_fn(d, |_, _| rng.complex_normal());
        if v.norm() > 1e-150 {
            return PureState::normalized(layout, v).expect("nonzero Gaussian vector");
        }
    }
}

/// Haar unitary from the QR decomposition of a complex Ginibre matrix, with
/// the phases of `R`'s diagonal moved into `Q`.
pub fn haar_random_unitary(d: usize, rng: &mut RandomSource) -> CMat {
    let g = CMat::from_fn(d, d, |_, _| rng.complex_normal());
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut u = q;
    for j in 0..d {
        let diag = r[(j, j)];
        let n = diag.norm();
        let phase = if n > 0.0 { diag / n } else { crate::linalg::ONE };
        for i in 0..d {
            u[(i, j)] *= phase;
        }
    }
    u
}

/// First `d_in` columns of a Haar unitary on `d_out` dimensions.
pub fn random_isometry(d_in: usize, d_out: usize, rng: &mut RandomSource) -> Result<CMat> {
    if d_in == 0 || d_out < d_in {
        return Err(Error::Dimension(format!("no isometry from {d_in} into {d_out} dimensions")));
    }
    Ok(haar_random_unitary(d_out, rng).columns(0, d_in).into_owned())
}
