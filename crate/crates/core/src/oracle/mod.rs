//! Reference results that do not go through the momentum quadrature:
//! Bessel closed forms for the two solvable limits and exact propagation on
//! a finite ring.

pub mod bessel;
pub mod ring;

pub use bessel::{bessel_j, bessel_j_all, bessel_propagator, bessel_reference, ReferenceCase};
pub use ring::{
    bell_pair, build_ring, check_light_cone, ring_propagate, RingEvolution, RingHamiltonian,
    RingSpectrum, DEFAULT_RING_SITES,
};
