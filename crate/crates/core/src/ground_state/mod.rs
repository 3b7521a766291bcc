//! Exact ground states on small instances: energy, propagation on
//! frustration-free networks, exhaustive search, domain walls and the
//! stability checks of the three-dimensional construction.
//!
//! Energies are integers in units of J0: with u unsatisfied bonds out of
//! m, H = (2u - m) J0.

mod brute;
mod decomposition;
mod stability;
mod walls;

use std::collections::VecDeque;

pub use brute::{brute_force_ground_states, brute_force_region, GroundStateResult, DEFAULT_SITE_CAP, HARD_SITE_CAP};
pub use decomposition::{theorem31_decomposition, Decomposition, WallReport};
pub use stability::{
    connected_regions, cubewise_minimal_state, interior_sites, local_flip_stability, non_minimal_cube,
    stability_scan, StabilityScan,
};
pub use walls::{domain_walls, interface_check, wall_split, WallSplit};

use crate::complex::{CellComplex, Chain};
use crate::disorder::{site_coboundary, BondConfig, SpinConfig};
use crate::error::{Error, Result};
use crate::gf2::BitVector;

/// Bonds with J_ij sigma_i sigma_j = -1.
pub fn unsatisfied_bonds(complex: &CellComplex, spins: &SpinConfig, bonds: &BondConfig) -> BitVector {
    bonds.negative().xor(&site_coboundary(complex, spins.down()))
}

/// H / J0 over all bonds.
pub fn energy_units(complex: &CellComplex, spins: &SpinConfig, bonds: &BondConfig) -> Result<i64> {
    spins.check(complex)?;
    bonds.check(complex)?;
    let u = unsatisfied_bonds(complex, spins, bonds).count_ones() as i64;
    Ok(2 * u - complex.num_bonds() as i64)
}

/// H / J0 counting only the bonds in `region`.
pub fn region_energy_units(
    complex: &CellComplex,
    spins: &SpinConfig,
    bonds: &BondConfig,
    region: &BitVector,
) -> Result<i64> {
    spins.check(complex)?;
    bonds.check(complex)?;
    let u = unsatisfied_bonds(complex, spins, bonds).intersection_count(region) as i64;
    Ok(2 * u - region.count_ones() as i64)
}

/// H = -sum J_ij sigma_i sigma_j.
pub fn energy(complex: &CellComplex, spins: &SpinConfig, bonds: &BondConfig) -> Result<f64> {
    Ok(energy_units(complex, spins, bonds)? as f64 * bonds.j0())
}

/// Sites touched by the bonds of `region`.
pub fn region_sites(complex: &CellComplex, region: &BitVector) -> BitVector {
    let mut out = BitVector::zeros(complex.num_sites());
    for b in region.ones_iter() {
        let (u, v) = complex.bond_sites(b);
        out.set(u, true);
        out.set(v, true);
    }
    out
}

/// Fixes spins breadth-first from `root` so that every tree bond of
/// `region` is satisfied, then checks the remaining bonds. Sites outside
/// the region are left up.
///
/// A violated non-tree bond is reported with the cycle it closes.
pub fn propagate_ground_state(
    complex: &CellComplex,
    bonds: &BondConfig,
    region: &BitVector,
    root: usize,
    root_spin: i8,
) -> Result<SpinConfig> {
    bonds.check(complex)?;
    if region.len() != complex.num_bonds() {
        return Err(Error::SizeMismatch {
            what: "bond region",
            got: region.len(),
            expected: complex.num_bonds(),
        });
    }
    if root >= complex.num_sites() {
        return Err(Error::SizeMismatch {
            what: "root site",
            got: root,
            expected: complex.num_sites(),
        });
    }
    let n = complex.num_sites();
    let mut spins = SpinConfig::all_up(n);
    spins.set(root, root_spin);
    let mut parent_bond = vec![usize::MAX; n];
    let mut seen = BitVector::zeros(n);
    seen.set(root, true);
    let mut queue = VecDeque::from([root]);
    while let Some(s) = queue.pop_front() {
        for (b, nb) in complex.site_neighbors(s) {
            if !region.get(b) || seen.get(nb) {
                continue;
            }
            let sign = bonds.sign(b) * spins.value(s);
            spins.set(nb, sign);
            seen.set(nb, true);
            parent_bond[nb] = b;
            queue.push_back(nb);
        }
    }
    if !region_sites(complex, region).is_subset_of(&seen) {
        return Err(Error::Disconnected);
    }
    let unsat = unsatisfied_bonds(complex, &spins, bonds).and(region);
    if let Some(b) = unsat.first_one() {
        let (u, v) = complex.bond_sites(b);
        let mut witness = BitVector::unit(complex.num_bonds(), b);
        for mut s in [u, v] {
            while s != root {
                let pb = parent_bond[s];
                witness.toggle(pb);
                let (a, c) = complex.bond_sites(pb);
                s = if a == s { c } else { a };
            }
        }
        return Err(Error::FrustrationDetected {
            witness: Chain::new(1, witness),
        });
    }
    Ok(spins)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Lattice;
    use crate::disorder::gauge_transform;
    use crate::rng;
    use proptest::prelude::*;

    fn grid(n: &[usize]) -> CellComplex {
        CellComplex::new(Lattice::free(n).unwrap())
    }

    #[test]
    fn square_energies() {
        let cx = grid(&[1, 1]);
        let plus = BondConfig::all_positive(&cx);
        let up = SpinConfig::all_up(4);
        assert_eq!(energy_units(&cx, &up, &plus).unwrap(), -4);
        let mut one = up.clone();
        one.flip_site(0);
        assert_eq!(energy_units(&cx, &one, &plus).unwrap(), 0);
        assert!(energy_units(&cx, &SpinConfig::all_up(3), &plus).is_err());
        let scaled = BondConfig::new(BitVector::zeros(4), 2.5).unwrap();
        assert_eq!(energy(&cx, &up, &scaled).unwrap(), -10.0);
    }

    #[test]
    fn propagation_on_ferromagnet_and_frustrated_square() {
        let cx = grid(&[3, 2]);
        let all = BitVector::ones(cx.num_bonds());
        let plus = BondConfig::all_positive(&cx);
        let s = propagate_ground_state(&cx, &plus, &all, 0, 1).unwrap();
        assert!(s.down().is_zero());
        let s = propagate_ground_state(&cx, &plus, &all, 4, -1).unwrap();
        assert_eq!(s.down().count_ones(), cx.num_sites());

        let sq = grid(&[1, 1]);
        let frus = BondConfig::from_negative_bonds(&sq, [0]);
        match propagate_ground_state(&sq, &frus, &BitVector::ones(4), 0, 1) {
            Err(Error::FrustrationDetected { witness }) => {
                assert_eq!(witness.count(), 4);
                assert!(sq.boundary(&witness).unwrap().is_empty());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn propagation_needs_a_connected_region() {
        let cx = grid(&[3, 1]);
        let plus = BondConfig::all_positive(&cx);
        let far = cx.bond_at(&[3, 0], 1).unwrap();
        let region = BitVector::from_indices(cx.num_bonds(), [cx.bond_at(&[0, 0], 0).unwrap(), far]);
        assert!(matches!(
            propagate_ground_state(&cx, &plus, &region, 0, 1),
            Err(Error::Disconnected)
        ));
        let empty = BitVector::zeros(cx.num_bonds());
        assert!(propagate_ground_state(&cx, &plus, &empty, 2, 1).is_ok());
    }

    proptest! {
        #[test]
        fn gauge_round_trip(seed in any::<u64>()) {
            let cx = grid(&[3, 3, 2]);
            let mut r = rng::stream(seed, 0);
            let eps = SpinConfig::from_down(BitVector::from_bools((0..cx.num_sites()).map(|_| rng::coin(&mut r))));
            let bonds = gauge_transform(&cx, &BondConfig::all_positive(&cx), &eps).unwrap();
            let all = BitVector::ones(cx.num_bonds());
            let s = propagate_ground_state(&cx, &bonds, &all, 0, eps.value(0)).unwrap();
            prop_assert_eq!(&s, &eps);
            prop_assert_eq!(energy_units(&cx, &s, &bonds).unwrap(), -(cx.num_bonds() as i64));
        }

        #[test]
        fn energy_is_gauge_covariant(seed in any::<u64>()) {
            let cx = CellComplex::new(Lattice::periodic(&[3, 4]).unwrap());
            let bonds = crate::disorder::sample_couplings(&cx, 0.5, 1.0, seed).unwrap();
            let mut r = rng::stream(seed, 1);
            let mut draw = || SpinConfig::from_down(BitVector::from_bools((0..cx.num_sites()).map(|_| rng::coin(&mut r))));
            let sigma = draw();
            let eps = draw();
            let moved = SpinConfig::from_down(sigma.down().xor(eps.down()));
            let gauged = gauge_transform(&cx, &bonds, &eps).unwrap();
            prop_assert_eq!(energy_units(&cx, &moved, &gauged).unwrap(), energy_units(&cx, &sigma, &bonds).unwrap());
        }
    }
}
