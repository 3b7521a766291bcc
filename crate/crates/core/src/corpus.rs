//! Named instances used by the verifiers, the command line and the tests.

use crate::complex::{BoundaryCondition, CellComplex, Lattice, Subcomplex};
use crate::disorder::{build_all_frustrated_3d, sample_couplings, BondConfig};
use crate::gf2::BitVector;

#[derive(Clone, Debug)]
pub struct Instance {
    pub name: String,
    pub complex: CellComplex,
    pub bonds: BondConfig,
}

impl Instance {
    fn new(name: impl Into<String>, complex: CellComplex, bonds: BondConfig) -> Self {
        Instance {
            name: name.into(),
            complex,
            bonds,
        }
    }
}

fn free(extents: &[usize]) -> CellComplex {
    CellComplex::new(Lattice::free(extents).expect("valid extents"))
}

/// Plaquettes of the staircase of unfrustrated pairs on a free 8 x 6
/// lattice: columns x in [0,2] for y in [0,5], [2,6] for y in [0,6] and
/// [6,8] for y in [1,6].
pub fn pair_network_region(complex: &CellComplex) -> BitVector {
    BitVector::from_bools((0..complex.num_plaquettes()).map(|p| {
        let c = complex.cell(2, p).base;
        let (x, y) = (c[0], c[1]);
        match x {
            0 | 1 => y < 5,
            2..=5 => y < 6,
            _ => y >= 1,
        }
    }))
}

/// The two-dimensional pair network: every region plaquette is frustrated
/// through the vertical bond at odd x, and each such bond is the common
/// bond of an unfrustrated pair.
pub fn pair_network_2d() -> Instance {
    let cx = free(&[8, 6]);
    let region = Subcomplex::from_plaquettes(&cx, &pair_network_region(&cx));
    let neg: Vec<usize> = region
        .mask(1)
        .ones_iter()
        .filter(|&b| {
            let c = cx.cell(1, b);
            c.spans(1) && c.base[0] % 2 == 1
        })
        .collect();
    let bonds = BondConfig::from_negative_bonds(&cx, neg);
    Instance::new("pair-network-2d", cx, bonds)
}

/// The five sites (1..=5, 1) whose joint flip keeps the energy on the
/// pair network.
pub fn pair_network_flip_sites(complex: &CellComplex) -> Vec<usize> {
    (1..=5).map(|x| complex.site_at(&[x, 1]).expect("inside")).collect()
}

/// Signs -1 on B- over a free block of the given extents.
pub fn cube_construction(extents: [usize; 3]) -> Instance {
    let cx = free(&extents);
    let (bonds, _) = build_all_frustrated_3d(&cx).expect("3D block");
    Instance::new(
        format!("bminus-{}x{}x{}", extents[0], extents[1], extents[2]),
        cx,
        bonds,
    )
}

/// Free 3 x 3 with two negative y-bonds at x = 2 and x = 3, y = 1: the
/// centre plaquette is frustrated and the ring around it carries phi = -1.
pub fn annulus() -> Instance {
    let cx = free(&[3, 3]);
    let neg = [cx.bond_at(&[2, 1], 1).unwrap(), cx.bond_at(&[3, 1], 1).unwrap()];
    let bonds = BondConfig::from_negative_bonds(&cx, neg);
    Instance::new("annulus", cx, bonds)
}

/// Periodic in x with circumference `l`, free in y with `m` plaquette
/// rows; the x-bonds at x = 0 are negative, so the winding loop is
/// frustrated while every plaquette is not.
pub fn cylinder(l: usize, m: usize) -> Instance {
    let cx = CellComplex::new(
        Lattice::new(vec![l, m], vec![BoundaryCondition::Periodic, BoundaryCondition::Free]).expect("valid"),
    );
    let neg: Vec<usize> = (0..=m).map(|y| cx.bond_at(&[0, y], 0).unwrap()).collect();
    let bonds = BondConfig::from_negative_bonds(&cx, neg);
    Instance::new(format!("cylinder-{l}x{m}"), cx, bonds)
}

/// 3 x 3 torus with the x-bonds at x = 0 negative.
pub fn torus() -> Instance {
    let cx = CellComplex::new(Lattice::periodic(&[3, 3]).expect("valid"));
    let neg: Vec<usize> = (0..3).map(|y| cx.bond_at(&[0, y], 0).unwrap()).collect();
    let bonds = BondConfig::from_negative_bonds(&cx, neg);
    Instance::new("torus-3x3", cx, bonds)
}

pub fn all_positive(name: &str, complex: CellComplex) -> Instance {
    let bonds = BondConfig::all_positive(&complex);
    Instance::new(name, complex, bonds)
}

pub fn random(extents: &[usize], x: f64, seed: u64) -> Instance {
    let cx = free(extents);
    let bonds = sample_couplings(&cx, x, 1.0, seed).expect("valid x");
    let dims: Vec<String> = extents.iter().map(usize::to_string).collect();
    Instance::new(format!("random-{}-x{x}-s{seed}", dims.join("x")), cx, bonds)
}

/// A row of `n` plaquettes and the set of all of them.
pub fn strip(n: usize) -> (CellComplex, BitVector) {
    let cx = free(&[n, 1]);
    let all = BitVector::ones(cx.num_plaquettes());
    (cx, all)
}

/// Every built-in instance, in a fixed order.
pub fn builtin() -> Vec<Instance> {
    let mut out = vec![
        pair_network_2d(),
        cube_construction([1, 1, 1]),
        cube_construction([2, 1, 1]),
        cube_construction([2, 2, 1]),
        cube_construction([2, 2, 2]),
        annulus(),
        cylinder(4, 3),
        cylinder(5, 3),
        cylinder(6, 3),
        torus(),
        all_positive("ferromagnet-3x3", free(&[3, 3])),
        all_positive(
            "ferromagnet-torus-3x3",
            CellComplex::new(Lattice::periodic(&[3, 3]).expect("valid")),
        ),
    ];
    for x in [0.3, 0.5, 0.7] {
        out.push(random(&[4, 4], x, 1));
        out.push(random(&[2, 2, 2], x, 2));
        out.push(random(&[3, 3, 3], x, 3));
    }
    out
}

pub fn by_name(name: &str) -> Option<Instance> {
    builtin().into_iter().find(|i| i.name == name)
}
