//! Seeded random states, unitaries and channels.
//!
//! Every draw takes an explicit generator. [`stream_rng`] gives independent
//! reproducible streams keyed by `(seed, stream)`, so work split across
//! threads sees the same numbers as a serial loop.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channels::KrausChannel;
use crate::densmat::{CMatrix, DensityMatrix};

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random unit vector.
pub fn random_pure_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DVector<Complex64> {
    let v = DVector::from_fn(dim, |_, _| gaussian(rng));
    let norm = v.norm();
    v / Complex64::new(norm, 0.0)
}

pub fn random_pure_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityMatrix {
    let v = random_pure_vector(dim, rng);
    DensityMatrix::pure(v.as_slice()).expect("normalised vector")
}

/// Mixed state `GG†/tr(GG†)` from a Ginibre matrix.
pub fn random_mixed_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
    let w = &g * g.adjoint();
    let tr: Complex64 = w.diagonal().iter().sum();
    let m = w.map(|z| z / tr.re);
    let m = (&m + m.adjoint()).map(|z| z * 0.5);
    DensityMatrix::new(m).expect("Ginibre construction is a state")
}

/// Haar-random unitary via QR with the phase correction on `R`'s diagonal.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

/// A channel with `kraus` operators: the blocks of a random isometry
/// `dim → dim·kraus`.
pub fn random_channel<R: Rng + ?Sized>(dim: usize, kraus: usize, rng: &mut R) -> KrausChannel {
    let u = random_unitary(dim * kraus, rng);
    let ops = (0..kraus)
        .map(|k| u.view((k * dim, 0), (dim, dim)).into_owned())
        .collect();
    KrausChannel::new(ops).expect("isometry blocks are complete")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densmat::unitarity_deviation;

    #[test]
    fn samples_are_valid() {
        let mut rng = stream_rng(7, 0);
        for dim in [2, 4, 8] {
            assert!(unitarity_deviation(&random_unitary(dim, &mut rng)) < 1e-12);
            random_pure_state(dim, &mut rng).revalidate().unwrap();
            random_mixed_state(dim, &mut rng).revalidate().unwrap();
            let chan = random_channel(dim, 3, &mut rng);
            assert_eq!(chan.kraus_len(), 3);
        }
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a = random_pure_vector(4, &mut stream_rng(1, 5));
        let b = random_pure_vector(4, &mut stream_rng(1, 5));
        let c = random_pure_vector(4, &mut stream_rng(1, 6));
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
