//! Domain walls of a spin configuration and the interface identity.

use serde::Serialize;

use crate::complex::{CellComplex, Subcomplex};
use crate::disorder::{site_coboundary, BondConfig, SpinConfig};
use crate::error::Result;
use crate::gf2::BitVector;
use crate::topology::maps::{wall_components, DomainWallSet};
use crate::topology::report::{Check, Report};

use super::unsatisfied_bonds;

/// Walls of the bonds with J sigma sigma = -1, joined across any
/// plaquette. Their boundaries sit exactly on the frustrated plaquettes.
pub fn domain_walls(complex: &CellComplex, spins: &SpinConfig, bonds: &BondConfig) -> Result<DomainWallSet> {
    spins.check(complex)?;
    bonds.check(complex)?;
    let unsat = unsatisfied_bonds(complex, spins, bonds);
    Ok(wall_components(complex, &unsat, &BitVector::ones(complex.num_plaquettes())))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WallSplit {
    /// Walls of the unsatisfied bonds of N+, joined inside N+.
    pub on_nplus: DomainWallSet,
    /// Walls of the remaining unsatisfied bonds.
    pub outside: DomainWallSet,
}

/// Splits the bond energies J' = J sigma sigma into a factor on the bonds
/// of N+ and a factor on the other bonds, and returns the walls of each.
pub fn wall_split(
    complex: &CellComplex,
    spins: &SpinConfig,
    bonds: &BondConfig,
    nplus: &BitVector,
) -> Result<WallSplit> {
    spins.check(complex)?;
    bonds.check(complex)?;
    let a = Subcomplex::from_plaquettes(complex, nplus);
    let unsat = unsatisfied_bonds(complex, spins, bonds);
    let tau = unsat.and(a.mask(1));
    let tau_prime = unsat.and_not(a.mask(1));
    Ok(WallSplit {
        on_nplus: wall_components(complex, &tau, a.mask(2)),
        outside: wall_components(complex, &tau_prime, &BitVector::ones(complex.num_plaquettes())),
    })
}

/// On the bonds of N+: the ground-state wall cells S0 and the negative
/// bonds S- differ exactly on the bonds joining an up spin to a down spin.
pub fn interface_check(complex: &CellComplex, spins: &SpinConfig, bonds: &BondConfig, nplus: &BitVector) -> Result<Report> {
    spins.check(complex)?;
    bonds.check(complex)?;
    let a = Subcomplex::from_plaquettes(complex, nplus);
    let on = a.mask(1);
    let s0 = unsatisfied_bonds(complex, spins, bonds).and(on);
    let sminus = bonds.negative().and(on);
    let interface = site_coboundary(complex, spins.down()).and(on);
    let sym = s0.xor(&sminus);
    let mut check = Check::new("symmetric difference equals interface", true)
        .dim("S0", s0.count_ones())
        .dim("S-", sminus.count_ones())
        .dim("interface", interface.count_ones());
    if sym != interface {
        check = check.fail("sets differ", Some(&sym.xor(&interface)));
    }
    let mut report = Report::new("interface");
    report.push(check);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Lattice;
    use crate::disorder::{gauge_transform, plaquette_frustration, sample_couplings};
    use crate::ground_state::{brute_force_ground_states, DEFAULT_SITE_CAP};
    use crate::rng;
    use proptest::prelude::*;

    fn grid(n: &[usize]) -> CellComplex {
        CellComplex::new(Lattice::free(n).unwrap())
    }

    #[test]
    fn frustration_free_ground_state_has_no_walls() {
        let cx = grid(&[3, 3]);
        let eps = SpinConfig::from_down(BitVector::from_indices(cx.num_sites(), [0, 5, 6]));
        let bonds = gauge_transform(&cx, &BondConfig::all_positive(&cx), &eps).unwrap();
        assert!(domain_walls(&cx, &eps, &bonds).unwrap().is_empty());
        let all = BitVector::ones(cx.num_plaquettes());
        let split = wall_split(&cx, &eps, &bonds, &all).unwrap();
        assert!(split.on_nplus.is_empty() && split.outside.is_empty());
        let r = interface_check(&cx, &eps, &bonds, &all).unwrap();
        assert!(r.passed);
        assert_eq!(r.checks[0].dims["S0"], 0);
        assert_eq!(r.checks[0].dims["S-"], r.checks[0].dims["interface"]);
    }

    #[test]
    fn frustrated_square_wall_is_one_cell() {
        let cx = grid(&[1, 1]);
        let bonds = BondConfig::from_negative_bonds(&cx, [1]);
        let gs = brute_force_ground_states(&cx, &bonds, DEFAULT_SITE_CAP).unwrap();
        for s in &gs.states {
            let w = domain_walls(&cx, s, &bonds).unwrap();
            assert_eq!(w.len(), 1);
            assert_eq!(w.walls[0].count(), 1);
            assert_eq!(w.boundaries[0].cells(), vec![0]);
        }
    }

    #[test]
    fn split_partitions_the_walls() {
        let cx = grid(&[3, 3]);
        for seed in 0..5 {
            let bonds = sample_couplings(&cx, 0.6, 1.0, seed).unwrap();
            let nplus = plaquette_frustration(&cx, &bonds).not();
            let gs = brute_force_ground_states(&cx, &bonds, DEFAULT_SITE_CAP).unwrap();
            let s = &gs.states[0];
            let all = domain_walls(&cx, s, &bonds).unwrap();
            let split = wall_split(&cx, s, &bonds, &nplus).unwrap();
            let n = cx.num_bonds();
            assert!(split.on_nplus.union(n).and(&split.outside.union(n)).is_zero());
            assert_eq!(split.on_nplus.union(n).xor(&split.outside.union(n)), all.union(n));
            assert!(interface_check(&cx, s, &bonds, &nplus).unwrap().passed);
        }
    }

    proptest! {
        #[test]
        fn wall_boundary_sits_on_frustrated_plaquettes(seed in any::<u64>()) {
            let cx = grid(&[3, 2, 2]);
            let bonds = sample_couplings(&cx, 0.5, 1.0, seed).unwrap();
            let mut r = rng::stream(seed, 9);
            let s = SpinConfig::from_down(BitVector::from_bools((0..cx.num_sites()).map(|_| rng::coin(&mut r))));
            let w = domain_walls(&cx, &s, &bonds).unwrap();
            let mut bd = BitVector::zeros(cx.num_plaquettes());
            for b in &w.boundaries {
                bd.xor_assign(b.support());
            }
            prop_assert_eq!(bd, plaquette_frustration(&cx, &bonds));
        }
    }
}
