//! Ground states of the unfrustration network N+ as a minimal wall set
//! plus propagation on what is left once the wall bonds are removed.

use serde::Serialize;

use crate::complex::{CellComplex, Chain, Subcomplex};
use crate::disorder::{BondConfig, SpinConfig};
use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::topology::homology::{ChainView, DualView};
use crate::topology::maps::{cocycle_violation, vartheta, DomainWallSet};
use crate::union_find::UnionFind;

use super::{brute_force_region, propagate_ground_state, unsatisfied_bonds};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WallReport {
    pub cells: usize,
    /// Crossing parity with each H1(N+) basis loop.
    pub crossings: Vec<bool>,
    /// Some loop with phi = -1 crosses the wall an odd number of times.
    pub transverse: bool,
    /// The wall's class in the dual homology of N+ vanishes.
    pub null_homologous: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Decomposition {
    /// Walls of the lexicographically least minimal wall set.
    pub walls: DomainWallSet,
    pub reports: Vec<WallReport>,
    /// Number of distinct minimal wall sets.
    pub minimal_sets: usize,
    /// Energy of the N+ Hamiltonian in units of J0.
    pub energy: i64,
    /// The state with the lowest N+ site up, then its flip on N+.
    pub states: [SpinConfig; 2],
    /// phi on the H1(N+) basis loops.
    pub loop_values: Vec<i8>,
}

impl Decomposition {
    pub fn r(&self) -> usize {
        self.walls.len()
    }
}

fn bonds_connected(complex: &CellComplex, region: &BitVector) -> bool {
    let mut uf = UnionFind::new(complex.num_sites());
    for b in region.ones_iter() {
        let (u, v) = complex.bond_sites(b);
        uf.union(u, v);
    }
    uf.groups(super::region_sites(complex, region).ones_iter()).len() <= 1
}

/// Minimal wall sets of the N+ ground states, found by exhaustive search.
///
/// The walls of the canonical set are checked against the H1(N+) basis:
/// each should be crossed an odd number of times by a frustrated loop and
/// none should be null-homologous. Removing the wall bonds must leave a
/// network on which propagation reproduces the ground state.
pub fn theorem31_decomposition(
    complex: &CellComplex,
    bonds: &BondConfig,
    nplus: &BitVector,
    site_cap: usize,
) -> Result<Decomposition> {
    bonds.check(complex)?;
    let a = Subcomplex::from_plaquettes(complex, nplus);
    if let Some(p) = cocycle_violation(complex, bonds.negative(), a.mask(2)) {
        return Err(Error::FrustratedPlaquette(p));
    }
    let region = a.mask(1).clone();
    if !bonds_connected(complex, &region) {
        return Err(Error::Disconnected);
    }
    let gs = brute_force_region(complex, bonds, &region, site_cap)?;
    let mut sets: Vec<Vec<usize>> = gs
        .canonical()
        .iter()
        .map(|s| unsatisfied_bonds(complex, s, bonds).and(&region).indices())
        .collect();
    sets.sort();
    sets.dedup();
    let least = BitVector::from_indices(complex.num_bonds(), sets[0].iter().copied());
    let walls = vartheta(complex, &a, &Chain::new(1, least.clone()))?;

    let state = gs
        .canonical()
        .iter()
        .find(|s| unsatisfied_bonds(complex, s, bonds).and(&region) == least)
        .expect("the least set comes from a ground state")
        .clone();
    let root = gs.sites.first().copied().unwrap_or(0);
    let propagated = propagate_ground_state(complex, bonds, &region.and_not(&least), root, 1)?;
    // compare on the N+ sites only
    let on_sites = |s: &SpinConfig| {
        BitVector::from_indices(complex.num_sites(), gs.sites.iter().copied().filter(|&i| s.down().get(i)))
    };
    assert_eq!(on_sites(&propagated), on_sites(&state), "propagation disagrees with the search");
    let flip = SpinConfig::from_down(on_sites(&state).xor(&BitVector::from_indices(
        complex.num_sites(),
        gs.sites.iter().copied(),
    )));

    let view = ChainView::absolute(complex, &a);
    let h1 = view.homology(1);
    let n1 = complex.num_bonds();
    let loops: Vec<BitVector> = h1
        .representatives()
        .iter()
        .map(|r| view.selection().lift(1, r, n1))
        .collect();
    let loop_values: Vec<i8> = loops
        .iter()
        .map(|l| if l.dot(bonds.negative()) { -1 } else { 1 })
        .collect();
    let dual = DualView::new(complex, view.selection().clone());
    let hw = dual.homology(complex.d() - 1);
    let reports = walls
        .walls
        .iter()
        .map(|w| {
            let crossings: Vec<bool> = loops.iter().map(|l| l.dot(w.support())).collect();
            let frustrated_loop = loop_values.iter().any(|&v| v == -1);
            let crosses = crossings.iter().any(|&c| c);
            let class = hw
                .coords(&view.selection().restrict(1, w.support()))
                .expect("a wall of a cocycle is a dual cycle");
            WallReport {
                cells: w.count(),
                crossings,
                transverse: frustrated_loop && crosses,
                null_homologous: class.is_zero(),
            }
        })
        .collect();

    Ok(Decomposition {
        walls,
        reports,
        minimal_sets: sets.len(),
        energy: gs.energy,
        states: [state, flip],
        loop_values,
    })
}
