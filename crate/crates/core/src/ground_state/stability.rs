//! Energy cost of flipping finite regions, for the fully frustrated 3D
//! block and its cube-wise minimal ground state.

use std::collections::HashSet;

use serde::Serialize;

use crate::complex::{BoundaryCondition, CellComplex};
use crate::disorder::{BondConfig, SpinConfig};
use crate::error::Result;
use crate::gf2::BitVector;

use super::{propagate_ground_state, unsatisfied_bonds};

/// Energy change, in units of J0, from flipping every spin in `region`.
pub fn local_flip_stability(
    complex: &CellComplex,
    spins: &SpinConfig,
    bonds: &BondConfig,
    region: &[usize],
) -> Result<i64> {
    spins.check(complex)?;
    bonds.check(complex)?;
    let inside = BitVector::from_indices(complex.num_sites(), region.iter().copied());
    let unsat = unsatisfied_bonds(complex, spins, bonds);
    let mut delta = 0i64;
    for b in crate::disorder::site_coboundary(complex, &inside).ones_iter() {
        delta += if unsat.get(b) { -2 } else { 2 };
    }
    Ok(delta)
}

/// First cube whose twelve bonds do not carry exactly three unsatisfied
/// bonds.
pub fn non_minimal_cube(complex: &CellComplex, spins: &SpinConfig, bonds: &BondConfig) -> Option<usize> {
    let unsat = unsatisfied_bonds(complex, spins, bonds);
    (0..complex.num_cubes()).find(|&c| {
        let mut edges: Vec<usize> = complex
            .faces(3, c)
            .iter()
            .flat_map(|&p| complex.faces(2, p as usize).iter().map(|&b| b as usize))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        edges.iter().filter(|&&b| unsat.get(b)).count() != 3
    })
}

/// Propagates from site 0 over the bonds `bplus`, so every bond of B+ is
/// satisfied, and checks that each cube then has exactly three
/// unsatisfied bonds. Returns the failing cube otherwise.
pub fn cubewise_minimal_state(
    complex: &CellComplex,
    bonds: &BondConfig,
    bplus: &BitVector,
) -> Result<std::result::Result<SpinConfig, usize>> {
    let s = propagate_ground_state(complex, bonds, bplus, 0, 1)?;
    Ok(match non_minimal_cube(complex, &s, bonds) {
        None => Ok(s),
        Some(c) => Err(c),
    })
}

/// Sites away from every free face of the lattice.
pub fn interior_sites(complex: &CellComplex) -> Vec<usize> {
    let l = complex.lattice();
    (0..complex.num_sites())
        .filter(|&s| {
            let c = complex.site_coords(s);
            (0..l.d()).all(|a| l.bc()[a] == BoundaryCondition::Periodic || (c[a] > 0 && c[a] < l.extents()[a]))
        })
        .collect()
}

/// Every connected set of at most `max_size` sites drawn from `allowed`,
/// sorted by size and then lexicographically.
pub fn connected_regions(complex: &CellComplex, allowed: &[usize], max_size: usize) -> Vec<Vec<usize>> {
    let ok = BitVector::from_indices(complex.num_sites(), allowed.iter().copied());
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut level: Vec<Vec<usize>> = allowed.iter().map(|&s| vec![s]).collect();
    level.sort();
    level.dedup();
    for size in 1..=max_size {
        if level.is_empty() {
            break;
        }
        out.extend(level.iter().cloned());
        if size == max_size {
            break;
        }
        let mut next: HashSet<Vec<usize>> = HashSet::new();
        for set in &level {
            for &s in set {
                for (_, nb) in complex.site_neighbors(s) {
                    if ok.get(nb) && set.binary_search(&nb).is_err() {
                        let mut grown = set.clone();
                        let pos = grown.binary_search(&nb).unwrap_err();
                        grown.insert(pos, nb);
                        next.insert(grown);
                    }
                }
            }
        }
        level = next.into_iter().collect();
        level.sort();
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilityScan {
    pub regions: usize,
    pub max_size: usize,
    pub min_delta: i64,
    /// Regions whose flip does not raise the energy.
    pub unstable: Vec<Vec<usize>>,
}

/// Flip cost of every connected region of interior sites up to
/// `max_size`.
pub fn stability_scan(
    complex: &CellComplex,
    spins: &SpinConfig,
    bonds: &BondConfig,
    max_size: usize,
) -> Result<StabilityScan> {
    let regions = connected_regions(complex, &interior_sites(complex), max_size);
    let mut min_delta = i64::MAX;
    let mut unstable = Vec::new();
    for r in &regions {
        let d = local_flip_stability(complex, spins, bonds, r)?;
        min_delta = min_delta.min(d);
        if d <= 0 {
            unstable.push(r.clone());
        }
    }
    Ok(StabilityScan {
        regions: regions.len(),
        max_size,
        min_delta,
        unstable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Lattice;
    use crate::disorder::build_all_frustrated_3d;
    use crate::ground_state::energy_units;

    fn block(n: usize) -> (CellComplex, BondConfig, SpinConfig) {
        let cx = CellComplex::new(Lattice::free(&[n, n, n]).unwrap());
        let (bonds, bminus) = build_all_frustrated_3d(&cx).unwrap();
        let s = cubewise_minimal_state(&cx, &bonds, &bminus.not()).unwrap().unwrap();
        (cx, bonds, s)
    }

    #[test]
    fn empty_flip_is_free() {
        let (cx, bonds, s) = block(2);
        assert_eq!(local_flip_stability(&cx, &s, &bonds, &[]).unwrap(), 0);
    }

    #[test]
    fn flip_cost_matches_energy_difference() {
        let (cx, bonds, s) = block(3);
        let centre = cx.site_at(&[1, 1, 1]).unwrap();
        let region = [centre, cx.site_at(&[2, 1, 1]).unwrap()];
        let before = energy_units(&cx, &s, &bonds).unwrap();
        let after = energy_units(&cx, &s.flip_region(&region), &bonds).unwrap();
        assert_eq!(local_flip_stability(&cx, &s, &bonds, &region).unwrap(), after - before);
        let single = local_flip_stability(&cx, &s, &bonds, &[centre]).unwrap();
        assert!(single > 0);
        assert_eq!(
            single,
            energy_units(&cx, &s.flip_region(&[centre]), &bonds).unwrap() - before
        );
    }

    #[test]
    fn line_across_the_block_is_degenerate() {
        let (cx, bonds, s) = block(3);
        let line: Vec<usize> = (0..=3).map(|k| cx.site_at(&[k, 1, 1]).unwrap()).collect();
        assert_eq!(local_flip_stability(&cx, &s, &bonds, &line).unwrap(), 0);
    }

    #[test]
    fn region_enumeration_counts() {
        let cx = CellComplex::new(Lattice::free(&[3, 3]).unwrap());
        let interior = interior_sites(&cx);
        assert_eq!(interior.len(), 4);
        let regions = connected_regions(&cx, &interior, 4);
        // 2x2 block: 4 singles, 4 dominoes, 4 L-triominoes, 1 square
        assert_eq!(regions.len(), 13);
        let p = CellComplex::new(Lattice::periodic(&[3, 3]).unwrap());
        assert_eq!(interior_sites(&p).len(), 9);
    }

    #[test]
    fn small_regions_in_the_interior_cost_energy() {
        let (cx, bonds, s) = block(4);
        let scan = stability_scan(&cx, &s, &bonds, 3).unwrap();
        assert!(scan.unstable.is_empty());
        assert!(scan.min_delta > 0);
    }
}
