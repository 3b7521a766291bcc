//! The maps between frustration data and dual complexes: kappa, vartheta,
//! zeta, the two-cochain Phi, linking parity and the frustration class.
//!
//! Dual cells are named by their primal cells: a wall (a dual
//! (d-1)-complex) is a set of bonds and a dual (d-2)-complex is a set of
//! plaquettes.

use serde::Serialize;

use crate::complex::{CellComplex, Chain, Subcomplex};
use crate::disorder::{frustration_of_loop, BondConfig};
use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::topology::homology::{CellSelection, ChainView};
use crate::union_find::UnionFind;

/// alpha_ij = 1 exactly where tau_ij = -1.
pub fn kappa(tau: &BondConfig) -> Chain {
    Chain::new(1, tau.negative().clone())
}

pub fn kappa_signs(signs: &[i8]) -> Chain {
    Chain::new(1, BitVector::from_bools(signs.iter().map(|&s| s < 0)))
}

/// Inverse of [`kappa`]: tau_ij = exp(i pi alpha_ij).
pub fn exp_alpha(alpha: &Chain) -> Vec<i8> {
    (0..alpha.len())
        .map(|b| if alpha.contains(b) { -1 } else { 1 })
        .collect()
}

/// Connected dual (d-1)-complexes with their boundaries.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DomainWallSet {
    /// Each wall as the set of bonds dual to its (d-1)-cells.
    pub walls: Vec<Chain>,
    /// Per wall, the plaquettes dual to its boundary (d-2)-cells.
    pub boundaries: Vec<Chain>,
}

impl DomainWallSet {
    pub fn len(&self) -> usize {
        self.walls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.walls.is_empty()
    }

    /// All wall cells together, as bonds.
    pub fn union(&self, n_bonds: usize) -> BitVector {
        let mut out = BitVector::zeros(n_bonds);
        for w in &self.walls {
            out.or_assign(w.support());
        }
        out
    }

    pub fn total_cells(&self) -> usize {
        self.walls.iter().map(Chain::count).sum()
    }
}

/// Plaquettes dual to the boundary of the dual cells of `bonds`, found by
/// stepping from bond centres. Steps leaving the lattice are dropped.
pub fn dual_boundary_of_bonds(complex: &CellComplex, bonds: &BitVector) -> BitVector {
    let mut out = BitVector::zeros(complex.num_plaquettes());
    for b in bonds.ones_iter() {
        for p in complex.dual_faces(1, b) {
            out.toggle(p);
        }
    }
    out
}

/// Groups the dual cells of `bonds` into walls. Two dual cells are in the
/// same wall when their bonds lie on a common plaquette of `plaquettes`
/// (so the dual cells share a (d-2)-face).
pub fn wall_components(complex: &CellComplex, bonds: &BitVector, plaquettes: &BitVector) -> DomainWallSet {
    let mut uf = UnionFind::new(complex.num_bonds());
    for p in plaquettes.ones_iter() {
        let mut first = None;
        for &b in complex.faces(2, p) {
            let b = b as usize;
            if bonds.get(b) {
                match first {
                    None => first = Some(b),
                    Some(a) => {
                        uf.union(a, b);
                    }
                }
            }
        }
    }
    let n = complex.num_bonds();
    let mut walls = Vec::new();
    let mut boundaries = Vec::new();
    for group in uf.groups(bonds.ones_iter()) {
        let w = BitVector::from_indices(n, group);
        boundaries.push(Chain::new(2, dual_boundary_of_bonds(complex, &w)));
        walls.push(Chain::new(1, w));
    }
    DomainWallSet { walls, boundaries }
}

/// First plaquette of `plaquettes` on which the 1-cochain `alpha` is odd.
pub fn cocycle_violation(complex: &CellComplex, alpha: &BitVector, plaquettes: &BitVector) -> Option<usize> {
    plaquettes.ones_iter().find(|&p| {
        complex
            .faces(2, p)
            .iter()
            .filter(|&&b| alpha.get(b as usize))
            .count()
            % 2
            == 1
    })
}

/// Walls dual to the bonds of a 1-cocycle on N+, grouped by shared
/// (d-2)-faces inside N+.
pub fn vartheta(complex: &CellComplex, nplus: &Subcomplex, alpha: &Chain) -> Result<DomainWallSet> {
    complex.check_chain(alpha)?;
    if alpha.dim() != 1 {
        return Err(Error::Dimension {
            got: alpha.dim(),
            expected: "vartheta takes a 1-cochain",
        });
    }
    if !nplus.contains_chain(alpha) {
        return Err(Error::OutsideNetwork);
    }
    if let Some(p) = cocycle_violation(complex, alpha.support(), nplus.mask(2)) {
        return Err(Error::CocycleViolated { dim: 2, cell: p });
    }
    Ok(wall_components(complex, alpha.support(), nplus.mask(2)))
}

/// First cube with an odd number of plaquettes in `eta`.
pub fn cube_violation(complex: &CellComplex, eta: &BitVector) -> Option<usize> {
    (0..complex.num_cubes()).find(|&c| {
        complex
            .faces(3, c)
            .iter()
            .filter(|&&p| eta.get(p as usize))
            .count()
            % 2
            == 1
    })
}

/// The dual (d-2)-complex of a plaquette 2-cocycle: the dual cells of the
/// plaquettes with eta_p = -1 (`eta` holds those plaquettes).
pub fn zeta(complex: &CellComplex, eta: &BitVector) -> Result<Chain> {
    if eta.len() != complex.num_plaquettes() {
        return Err(Error::ChainLength {
            dim: 2,
            got: eta.len(),
            expected: complex.num_plaquettes(),
        });
    }
    if let Some(c) = cube_violation(complex, eta) {
        return Err(Error::CocycleViolated { dim: 3, cell: c });
    }
    Ok(Chain::new(2, eta.clone()))
}

/// Phi(s) = product of eta_p over the plaquettes of s. Panics if it ever
/// disagrees with phi evaluated on the boundary loop.
pub fn two_cochain_phi(complex: &CellComplex, bonds: &BondConfig, surface: &Chain) -> Result<i8> {
    complex.check_chain(surface)?;
    bonds.check(complex)?;
    if surface.dim() != 2 {
        return Err(Error::Dimension {
            got: surface.dim(),
            expected: "Phi takes a 2-chain",
        });
    }
    let frustrated = crate::disorder::plaquette_frustration(complex, bonds);
    let phi_s = if surface.support().dot(&frustrated) { -1 } else { 1 };
    let on_boundary = frustration_of_loop(complex, bonds, &complex.boundary(surface)?)?;
    assert_eq!(phi_s, on_boundary, "Phi(s) differs from phi(boundary s)");
    Ok(phi_s)
}

/// Parity of crossings between a loop and any wall whose boundary is
/// `gamma` (a dual (d-2)-complex given by plaquettes).
///
/// The wall is found over the whole lattice. The parity is independent of
/// the chosen wall only when the loop bounds a surface, so a loop that
/// bounds none is rejected; the result is cross-checked against the parity
/// of that surface's intersection with `gamma`.
pub fn link_mod2(complex: &CellComplex, lp: &Chain, gamma: &Chain) -> Result<bool> {
    complex.check_chain(lp)?;
    complex.check_chain(gamma)?;
    if lp.dim() != 1 || gamma.dim() != 2 {
        return Err(Error::Dimension {
            got: lp.dim(),
            expected: "a 1-cycle and a plaquette set",
        });
    }
    if !complex.boundary(lp)?.is_empty() {
        return Err(Error::NotACycle);
    }
    let full = Subcomplex::full(complex);
    let sel = CellSelection::absolute(&full);
    let dual = sel.dual_boundary_matrix(complex, 1);
    let wall = dual.solve(gamma.support()).ok_or(Error::NoSpanningWall)?;
    let view = ChainView::absolute(complex, &full);
    let surface = view
        .boundary(2)
        .solve(lp.support())
        .ok_or(Error::NoSpanningSurface)?;
    let parity = lp.support().dot(&wall);
    assert_eq!(
        parity,
        surface.dot(gamma.support()),
        "crossing parity depends on the spanning wall"
    );
    Ok(parity)
}

/// Values of phi on a basis of H_1(N+).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FrustrationClass {
    pub basis: Vec<Chain>,
    pub basis_values: Vec<i8>,
}

impl FrustrationClass {
    pub fn is_trivial(&self) -> bool {
        self.basis_values.iter().all(|&v| v == 1)
    }

    /// The basis loops on which phi = -1.
    pub fn frustrated_loops(&self) -> impl Iterator<Item = &Chain> {
        self.basis
            .iter()
            .zip(&self.basis_values)
            .filter(|(_, &v)| v == -1)
            .map(|(c, _)| c)
    }
}

/// phi on each H_1(N+) basis loop. Each value is re-evaluated on the loop
/// shifted by a plaquette boundary of N+ to confirm it depends only on the
/// class.
pub fn frustration_class(complex: &CellComplex, bonds: &BondConfig, nplus: &Subcomplex) -> Result<FrustrationClass> {
    bonds.check(complex)?;
    if let Some(p) = cocycle_violation(complex, bonds.negative(), nplus.mask(2)) {
        return Err(Error::FrustratedPlaquette(p));
    }
    let h = super::homology::homology(complex, nplus, 1)?;
    let shift = nplus
        .mask(2)
        .first_one()
        .map(|p| complex.boundary(&complex.chain(2, [p])).expect("plaquette boundary"));
    let mut values = Vec::with_capacity(h.basis.len());
    for lp in &h.basis {
        let v = frustration_of_loop(complex, bonds, lp)?;
        if let Some(s) = &shift {
            assert_eq!(v, frustration_of_loop(complex, bonds, &lp.sum(s))?);
        }
        values.push(v);
    }
    Ok(FrustrationClass {
        basis: h.basis,
        basis_values: values,
    })
}
