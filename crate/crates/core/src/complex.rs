//! Finite cubical cell complexes on sublattices of Z^2 and Z^3.
//!
//! A k-cell is a unit k-cube given by its base lattice point and the set
//! of k axes it spans. Cells of each dimension are indexed lexicographically
//! by (base position, orientation), with axis 0 most significant and
//! orientations ordered by their sorted axis lists.
//!
//! Over Z2 a chain and a cochain on the same cells are the same bit vector,
//! so [`Chain`] is used for both. The dual lattice is not stored separately:
//! the dual of a k-cell is the (d-k)-cell with the same centre spanning the
//! complementary axes, and [`CellComplex::dual_faces`] recomputes dual
//! incidence from cell centres.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::BitVector;

pub const MAX_DIM: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    Free,
    Periodic,
}

#[derive(Deserialize)]
struct LatticeSpec {
    d: usize,
    extents: Vec<usize>,
    bc: Option<Vec<BoundaryCondition>>,
}

/// Shape of a finite box in Z^d: cell counts per axis and per-axis boundary
/// conditions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "LatticeSpec")]
pub struct Lattice {
    d: usize,
    extents: Vec<usize>,
    bc: Vec<BoundaryCondition>,
}

impl TryFrom<LatticeSpec> for Lattice {
    type Error = Error;

    fn try_from(spec: LatticeSpec) -> Result<Self> {
        if spec.extents.len() != spec.d {
            return Err(Error::InvalidLattice(format!(
                "d = {} but {} extents given",
                spec.d,
                spec.extents.len()
            )));
        }
        let bc = spec
            .bc
            .unwrap_or_else(|| vec![BoundaryCondition::Free; spec.d]);
        Lattice::new(spec.extents, bc)
    }
}

impl Lattice {
    pub fn new(extents: Vec<usize>, bc: Vec<BoundaryCondition>) -> Result<Self> {
        let d = extents.len();
        if !(2..=MAX_DIM).contains(&d) {
            return Err(Error::InvalidLattice(format!(
                "dimension {d} unsupported; expected 2 or 3"
            )));
        }
        if bc.len() != d {
            return Err(Error::InvalidLattice(format!(
                "{} boundary conditions for {d} axes",
                bc.len()
            )));
        }
        for (a, (&n, &b)) in extents.iter().zip(&bc).enumerate() {
            if n == 0 {
                return Err(Error::InvalidLattice(format!("extent of axis {a} is 0")));
            }
            if b == BoundaryCondition::Periodic && n < 3 {
                return Err(Error::InvalidLattice(format!(
                    "periodic axis {a} needs extent >= 3, got {n}"
                )));
            }
        }
        Ok(Lattice { d, extents, bc })
    }

    /// Box with free boundaries on every axis.
    pub fn free(extents: &[usize]) -> Result<Self> {
        Self::new(extents.to_vec(), vec![BoundaryCondition::Free; extents.len()])
    }

    pub fn periodic(extents: &[usize]) -> Result<Self> {
        Self::new(
            extents.to_vec(),
            vec![BoundaryCondition::Periodic; extents.len()],
        )
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn extents(&self) -> &[usize] {
        &self.extents
    }

    pub fn bc(&self) -> &[BoundaryCondition] {
        &self.bc
    }

    /// Number of lattice points along `axis`.
    pub fn points(&self, axis: usize) -> usize {
        match self.bc[axis] {
            BoundaryCondition::Free => self.extents[axis] + 1,
            BoundaryCondition::Periodic => self.extents[axis],
        }
    }

    /// Compact label such as `4x4x4` or `3px2` (p marks periodic axes).
    pub fn label(&self) -> String {
        self.extents
            .iter()
            .zip(&self.bc)
            .map(|(n, b)| match b {
                BoundaryCondition::Free => n.to_string(),
                BoundaryCondition::Periodic => format!("{n}p"),
            })
            .collect::<Vec<_>>()
            .join("x")
    }
}

impl std::str::FromStr for Lattice {
    type Err = Error;

    /// Parses labels such as `8x8` or `4px3`, as produced by
    /// [`Lattice::label`].
    fn from_str(s: &str) -> Result<Self> {
        let mut extents = Vec::new();
        let mut bc = Vec::new();
        for part in s.trim().split(['x', 'X']) {
            let (num, b) = match part.strip_suffix('p') {
                Some(n) => (n, BoundaryCondition::Periodic),
                None => (part, BoundaryCondition::Free),
            };
            let n = num
                .parse()
                .map_err(|_| Error::InvalidLattice(format!("bad extent {part:?} in {s:?}")))?;
            extents.push(n);
            bc.push(b);
        }
        Lattice::new(extents, bc)
    }
}

/// A unit cube of the lattice: base point plus spanned axes (bit mask).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Cell {
    pub base: [usize; MAX_DIM],
    pub axes: u8,
}

impl Cell {
    pub fn dim(&self) -> usize {
        self.axes.count_ones() as usize
    }

    pub fn spans(&self, axis: usize) -> bool {
        self.axes >> axis & 1 == 1
    }
}

/// A mod-2 chain (equivalently cochain) of fixed dimension.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Chain {
    dim: usize,
    support: BitVector,
}

impl Chain {
    pub fn new(dim: usize, support: BitVector) -> Self {
        Chain { dim, support }
    }

    pub fn empty(dim: usize, len: usize) -> Self {
        Chain {
            dim,
            support: BitVector::zeros(len),
        }
    }

    pub fn from_cells<I: IntoIterator<Item = usize>>(dim: usize, len: usize, cells: I) -> Self {
        Chain {
            dim,
            support: BitVector::from_indices(len, cells),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn support(&self) -> &BitVector {
        &self.support
    }

    pub fn into_support(self) -> BitVector {
        self.support
    }

    pub fn contains(&self, cell: usize) -> bool {
        self.support.get(cell)
    }

    pub fn count(&self) -> usize {
        self.support.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_zero()
    }

    pub fn cells(&self) -> Vec<usize> {
        self.support.indices()
    }

    pub fn toggle(&mut self, cell: usize) {
        self.support.toggle(cell);
    }

    /// Symmetric difference of two chains of the same dimension.
    pub fn sum(&self, other: &Chain) -> Chain {
        assert_eq!(self.dim, other.dim, "chain dimensions differ");
        Chain {
            dim: self.dim,
            support: self.support.xor(&other.support),
        }
    }

    pub fn add_assign(&mut self, other: &Chain) {
        assert_eq!(self.dim, other.dim, "chain dimensions differ");
        self.support.xor_assign(&other.support);
    }

    /// Mod-2 pairing of a cochain with a chain.
    pub fn pair(&self, other: &Chain) -> bool {
        assert_eq!(self.dim, other.dim, "chain dimensions differ");
        self.support.dot(&other.support)
    }
}

#[derive(Serialize, Deserialize)]
struct ChainRepr {
    dim: usize,
    len: usize,
    cells: Vec<usize>,
}

impl Serialize for Chain {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ChainRepr {
            dim: self.dim,
            len: self.len(),
            cells: self.cells(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Chain {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = ChainRepr::deserialize(d)?;
        if let Some(&bad) = r.cells.iter().find(|&&c| c >= r.len) {
            return Err(serde::de::Error::custom(format!(
                "cell {bad} out of range {}",
                r.len
            )));
        }
        Ok(Chain::from_cells(r.dim, r.len, r.cells))
    }
}

/// Cells of dimensions 0..=d of a lattice with mod-2 incidence.
///
/// Immutable after construction.
#[derive(Clone, Debug)]
pub struct CellComplex {
    lattice: Lattice,
    points: [usize; MAX_DIM],
    strides: [usize; MAX_DIM],
    orients: Vec<Vec<u8>>,
    orient_slot: [usize; 1 << MAX_DIM],
    lookup: Vec<Vec<u32>>,
    cells: Vec<Vec<Cell>>,
    faces: Vec<Vec<u32>>,
    coface_offsets: Vec<Vec<u32>>,
    cofaces: Vec<Vec<u32>>,
}

const NONE: u32 = u32::MAX;

impl CellComplex {
    pub fn new(lattice: Lattice) -> Self {
        let d = lattice.d();
        let mut points = [1; MAX_DIM];
        for (a, p) in points.iter_mut().enumerate().take(d) {
            *p = lattice.points(a);
        }
        let mut strides = [0; MAX_DIM];
        let mut s = 1;
        for a in (0..d).rev() {
            strides[a] = s;
            s *= points[a];
        }
        let npos = s;

        let mut orients: Vec<Vec<u8>> = vec![Vec::new(); d + 1];
        let mut masks: Vec<u8> = (0..(1u8 << d)).collect();
        // lexicographic order of sorted axis lists
        masks.sort_by_key(|m| (0..d).filter(|a| m >> a & 1 == 1).collect::<Vec<_>>());
        let mut orient_slot = [usize::MAX; 1 << MAX_DIM];
        for m in masks {
            let k = m.count_ones() as usize;
            orient_slot[m as usize] = orients[k].len();
            orients[k].push(m);
        }

        let mut cells: Vec<Vec<Cell>> = vec![Vec::new(); d + 1];
        let mut lookup: Vec<Vec<u32>> = (0..=d)
            .map(|k| vec![NONE; npos * orients[k].len()])
            .collect();
        for pos in 0..npos {
            let mut base = [0; MAX_DIM];
            let mut rem = pos;
            for a in 0..d {
                base[a] = rem / strides[a];
                rem %= strides[a];
            }
            for k in 0..=d {
                for (slot, &m) in orients[k].iter().enumerate() {
                    let valid = (0..d)
                        .filter(|a| m >> a & 1 == 1)
                        .all(|a| base[a] < lattice.extents()[a]);
                    if valid {
                        lookup[k][pos * orients[k].len() + slot] = cells[k].len() as u32;
                        cells[k].push(Cell { base, axes: m });
                    }
                }
            }
        }

        let mut cx = CellComplex {
            lattice,
            points,
            strides,
            orients,
            orient_slot,
            lookup,
            cells,
            faces: Vec::new(),
            coface_offsets: Vec::new(),
            cofaces: Vec::new(),
        };
        cx.build_incidence();
        cx
    }

    fn build_incidence(&mut self) {
        let d = self.d();
        self.faces = vec![Vec::new(); d + 1];
        for k in 1..=d {
            let mut flat = Vec::with_capacity(self.cells[k].len() * 2 * k);
            for c in &self.cells[k] {
                for a in 0..d {
                    if !c.spans(a) {
                        continue;
                    }
                    let axes = c.axes & !(1 << a);
                    let lower = Cell { base: c.base, axes };
                    let mut upper = lower;
                    upper.base[a] = (upper.base[a] + 1) % self.points[a];
                    flat.push(self.index_of(&lower).expect("face exists") as u32);
                    flat.push(self.index_of(&upper).expect("face exists") as u32);
                }
            }
            self.faces[k] = flat;
        }
        self.coface_offsets = vec![Vec::new(); d + 1];
        self.cofaces = vec![Vec::new(); d + 1];
        for k in 0..d {
            let n = self.cells[k].len();
            let mut counts = vec![0u32; n + 1];
            let stride = 2 * (k + 1);
            for &f in &self.faces[k + 1] {
                counts[f as usize + 1] += 1;
            }
            for i in 0..n {
                counts[i + 1] += counts[i];
            }
            let mut fill = counts.clone();
            let mut list = vec![0u32; self.faces[k + 1].len()];
            for (upper, fs) in self.faces[k + 1].chunks(stride).enumerate() {
                for &f in fs {
                    list[fill[f as usize] as usize] = upper as u32;
                    fill[f as usize] += 1;
                }
            }
            self.coface_offsets[k] = counts;
            self.cofaces[k] = list;
        }
        self.coface_offsets[d] = vec![0; self.cells[d].len() + 1];
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn d(&self) -> usize {
        self.lattice.d()
    }

    pub fn count(&self, k: usize) -> usize {
        self.cells.get(k).map_or(0, Vec::len)
    }

    pub fn num_sites(&self) -> usize {
        self.count(0)
    }

    pub fn num_bonds(&self) -> usize {
        self.count(1)
    }

    pub fn num_plaquettes(&self) -> usize {
        self.count(2)
    }

    pub fn num_cubes(&self) -> usize {
        self.count(3)
    }

    pub fn euler_characteristic(&self) -> i64 {
        (0..=self.d())
            .map(|k| {
                let n = self.count(k) as i64;
                if k % 2 == 0 {
                    n
                } else {
                    -n
                }
            })
            .sum()
    }

    pub fn cell(&self, k: usize, index: usize) -> Cell {
        self.cells[k][index]
    }

    pub fn index_of(&self, cell: &Cell) -> Option<usize> {
        let d = self.d();
        if (cell.axes as usize) >= (1 << d) {
            return None;
        }
        let mut pos = 0;
        for a in 0..d {
            if cell.base[a] >= self.points[a] {
                return None;
            }
            pos += cell.base[a] * self.strides[a];
        }
        let k = cell.dim();
        let slot = self.orient_slot[cell.axes as usize];
        match self.lookup[k][pos * self.orients[k].len() + slot] {
            NONE => None,
            i => Some(i as usize),
        }
    }

    pub fn site_at(&self, coords: &[usize]) -> Option<usize> {
        let mut base = [0; MAX_DIM];
        base[..coords.len()].copy_from_slice(coords);
        self.index_of(&Cell { base, axes: 0 })
    }

    /// Bond from `coords` in the positive direction of `axis`.
    pub fn bond_at(&self, coords: &[usize], axis: usize) -> Option<usize> {
        let mut base = [0; MAX_DIM];
        base[..coords.len()].copy_from_slice(coords);
        self.index_of(&Cell {
            base,
            axes: 1 << axis,
        })
    }

    /// Plaquette with lower corner `coords` spanning axes `a < b`.
    pub fn plaquette_at(&self, coords: &[usize], a: usize, b: usize) -> Option<usize> {
        let mut base = [0; MAX_DIM];
        base[..coords.len()].copy_from_slice(coords);
        self.index_of(&Cell {
            base,
            axes: (1 << a) | (1 << b),
        })
    }

    /// Faces of a k-cell (indices of (k-1)-cells). Empty for k = 0.
    pub fn faces(&self, k: usize, index: usize) -> &[u32] {
        if k == 0 {
            return &[];
        }
        let stride = 2 * k;
        &self.faces[k][index * stride..(index + 1) * stride]
    }

    /// Cofaces of a k-cell (indices of (k+1)-cells).
    pub fn cofaces(&self, k: usize, index: usize) -> &[u32] {
        if k >= self.d() {
            return &[];
        }
        let off = &self.coface_offsets[k];
        &self.cofaces[k][off[index] as usize..off[index + 1] as usize]
    }

    /// The two endpoint sites of a bond.
    pub fn bond_sites(&self, bond: usize) -> (usize, usize) {
        let f = self.faces(1, bond);
        (f[0] as usize, f[1] as usize)
    }

    /// Sites at the corners of a k-cell.
    pub fn vertices(&self, k: usize, index: usize) -> Vec<usize> {
        let mut current = vec![index];
        for level in (1..=k).rev() {
            let mut next: Vec<usize> = current
                .iter()
                .flat_map(|&c| self.faces(level, c).iter().map(|&f| f as usize))
                .collect();
            next.sort_unstable();
            next.dedup();
            current = next;
        }
        current
    }

    pub fn boundary(&self, chain: &Chain) -> Result<Chain> {
        self.check_chain(chain)?;
        if chain.dim() == 0 {
            return Err(Error::Dimension {
                got: 0,
                expected: "boundary needs dimension >= 1",
            });
        }
        let k = chain.dim();
        let mut out = BitVector::zeros(self.count(k - 1));
        for c in chain.support().ones_iter() {
            for &f in self.faces(k, c) {
                out.toggle(f as usize);
            }
        }
        Ok(Chain::new(k - 1, out))
    }

    pub fn coboundary(&self, chain: &Chain) -> Result<Chain> {
        self.check_chain(chain)?;
        let k = chain.dim();
        if k >= self.d() {
            return Err(Error::Dimension {
                got: k,
                expected: "coboundary needs dimension <= d-1",
            });
        }
        let mut out = BitVector::zeros(self.count(k + 1));
        for c in chain.support().ones_iter() {
            for &f in self.cofaces(k, c) {
                out.toggle(f as usize);
            }
        }
        Ok(Chain::new(k + 1, out))
    }

    pub fn check_chain(&self, chain: &Chain) -> Result<()> {
        if chain.dim() > self.d() {
            return Err(Error::Dimension {
                got: chain.dim(),
                expected: "dimension <= d",
            });
        }
        let expected = self.count(chain.dim());
        if chain.len() != expected {
            return Err(Error::ChainLength {
                dim: chain.dim(),
                got: chain.len(),
                expected,
            });
        }
        Ok(())
    }

    pub fn empty_chain(&self, k: usize) -> Chain {
        Chain::empty(k, self.count(k))
    }

    pub fn chain<I: IntoIterator<Item = usize>>(&self, k: usize, cells: I) -> Chain {
        Chain::from_cells(k, self.count(k), cells)
    }

    /// Centre of a cell in doubled coordinates (odd exactly along spanned axes).
    pub fn center2(&self, k: usize, index: usize) -> [i64; MAX_DIM] {
        let c = self.cells[k][index];
        let mut out = [0; MAX_DIM];
        for (a, o) in out.iter_mut().enumerate().take(self.d()) {
            *o = 2 * c.base[a] as i64 + i64::from(c.spans(a));
        }
        out
    }

    /// The cell whose centre sits at the given doubled coordinates, if it
    /// lies inside the lattice. Periodic axes wrap.
    pub fn cell_at_center2(&self, center: &[i64]) -> Option<(usize, usize)> {
        let mut base = [0; MAX_DIM];
        let mut axes = 0u8;
        for a in 0..self.d() {
            let n = self.lattice.extents()[a] as i64;
            let mut c = center[a];
            match self.lattice.bc()[a] {
                BoundaryCondition::Periodic => c = c.rem_euclid(2 * n),
                BoundaryCondition::Free => {
                    if c < 0 || c > 2 * n {
                        return None;
                    }
                }
            }
            if c % 2 == 1 {
                axes |= 1 << a;
            }
            base[a] = (c / 2) as usize;
        }
        let cell = Cell { base, axes };
        self.index_of(&cell).map(|i| (cell.dim(), i))
    }

    /// Dual of a primal k-cell: the (d-k)-cell of the dual lattice, named by
    /// the same index. Applying it twice returns the original cell.
    pub fn dual_index(&self, k: usize, index: usize) -> (usize, usize) {
        (self.d() - k, index)
    }

    /// Faces of the dual cell of primal k-cell `index`, found geometrically by
    /// stepping half a lattice unit from its centre along each dual axis.
    /// The result names primal (k+1)-cells; steps leaving the lattice reach
    /// the dual boundary and are omitted.
    pub fn dual_faces(&self, k: usize, index: usize) -> Vec<usize> {
        let c = self.cells[k][index];
        let center = self.center2(k, index);
        let mut out = Vec::with_capacity(2 * (self.d() - k));
        for a in 0..self.d() {
            if c.spans(a) {
                continue;
            }
            for step in [-1i64, 1] {
                let mut q = center;
                q[a] += step;
                if let Some((dim, i)) = self.cell_at_center2(&q) {
                    debug_assert_eq!(dim, k + 1);
                    out.push(i);
                }
            }
        }
        out
    }

    /// Cells whose duals lie on the boundary of the dual lattice: those
    /// with fewer cofaces than an interior k-cell (which has 2(d-k)).
    pub fn dual_boundary_mask(&self, k: usize) -> BitVector {
        let full = 2 * (self.d() - k);
        BitVector::from_bools((0..self.count(k)).map(|i| self.cofaces(k, i).len() < full))
    }

    /// Nearest-neighbour site pairs along bonds.
    pub fn site_neighbors(&self, site: usize) -> Vec<(usize, usize)> {
        self.cofaces(0, site)
            .iter()
            .map(|&b| {
                let (u, v) = self.bond_sites(b as usize);
                (b as usize, if u == site { v } else { u })
            })
            .collect()
    }

    /// Coordinates of a site.
    pub fn site_coords(&self, site: usize) -> Vec<usize> {
        self.cells[0][site].base[..self.d()].to_vec()
    }
}

/// A face-closed set of cells, stored as one membership mask per dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subcomplex {
    masks: Vec<BitVector>,
}

impl Subcomplex {
    /// Validates face-closure.
    pub fn new(complex: &CellComplex, masks: Vec<BitVector>) -> Result<Self> {
        if masks.len() != complex.d() + 1 {
            return Err(Error::SizeMismatch {
                what: "subcomplex dimensions",
                got: masks.len(),
                expected: complex.d() + 1,
            });
        }
        for (k, m) in masks.iter().enumerate() {
            if m.len() != complex.count(k) {
                return Err(Error::ChainLength {
                    dim: k,
                    got: m.len(),
                    expected: complex.count(k),
                });
            }
        }
        for k in 1..masks.len() {
            for c in masks[k].ones_iter() {
                if complex
                    .faces(k, c)
                    .iter()
                    .any(|&f| !masks[k - 1].get(f as usize))
                {
                    return Err(Error::NotFaceClosed { dim: k, cell: c });
                }
            }
        }
        Ok(Subcomplex { masks })
    }

    pub fn full(complex: &CellComplex) -> Self {
        Subcomplex {
            masks: (0..=complex.d())
                .map(|k| BitVector::ones(complex.count(k)))
                .collect(),
        }
    }

    pub fn empty(complex: &CellComplex) -> Self {
        Subcomplex {
            masks: (0..=complex.d())
                .map(|k| BitVector::zeros(complex.count(k)))
                .collect(),
        }
    }

    /// The subcomplex induced by a set of plaquettes: the plaquettes, all
    /// their faces, and every cube whose six faces are all present.
    pub fn from_plaquettes(complex: &CellComplex, plaquettes: &BitVector) -> Self {
        let d = complex.d();
        let mut masks: Vec<BitVector> = (0..=d).map(|k| BitVector::zeros(complex.count(k))).collect();
        masks[2] = plaquettes.clone();
        for k in (1..=2).rev() {
            let (lower, upper) = masks.split_at_mut(k);
            for c in upper[0].ones_iter() {
                for &f in complex.faces(k, c) {
                    lower[k - 1].set(f as usize, true);
                }
            }
        }
        if d == 3 {
            masks[3] = BitVector::from_bools(
                (0..complex.num_cubes())
                    .map(|c| complex.faces(3, c).iter().all(|&p| plaquettes.get(p as usize))),
            );
        }
        Subcomplex { masks }
    }

    /// Subcomplex made of a set of bonds and their endpoints.
    pub fn from_bonds(complex: &CellComplex, bonds: &BitVector) -> Self {
        let mut s = Self::empty(complex);
        s.masks[1] = bonds.clone();
        for b in bonds.ones_iter() {
            let (u, v) = complex.bond_sites(b);
            s.masks[0].set(u, true);
            s.masks[0].set(v, true);
        }
        s
    }

    pub fn d(&self) -> usize {
        self.masks.len() - 1
    }

    pub fn mask(&self, k: usize) -> &BitVector {
        &self.masks[k]
    }

    pub fn contains(&self, k: usize, cell: usize) -> bool {
        self.masks[k].get(cell)
    }

    pub fn count(&self, k: usize) -> usize {
        self.masks[k].count_ones()
    }

    pub fn is_subset_of(&self, other: &Subcomplex) -> bool {
        self.masks.len() == other.masks.len()
            && self
                .masks
                .iter()
                .zip(&other.masks)
                .all(|(a, b)| a.is_subset_of(b))
    }

    pub fn union(&self, other: &Subcomplex) -> Subcomplex {
        Subcomplex {
            masks: self
                .masks
                .iter()
                .zip(&other.masks)
                .map(|(a, b)| a.or(b))
                .collect(),
        }
    }

    pub fn contains_chain(&self, chain: &Chain) -> bool {
        chain.support().is_subset_of(&self.masks[chain.dim()])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(cx: &CellComplex) -> Vec<usize> {
        (0..=cx.d()).map(|k| cx.count(k)).collect()
    }

    #[test]
    fn labels_parse_back() {
        for l in [
            Lattice::free(&[8, 8]).unwrap(),
            Lattice::new(vec![4, 3], vec![BoundaryCondition::Periodic, BoundaryCondition::Free]).unwrap(),
            Lattice::periodic(&[3, 3, 4]).unwrap(),
        ] {
            assert_eq!(l.label().parse::<Lattice>().unwrap(), l);
        }
        assert!("3xq".parse::<Lattice>().is_err());
        assert!("7".parse::<Lattice>().is_err());
    }

    #[test]
    fn unit_square_and_cube() {
        let sq = CellComplex::new(Lattice::free(&[1, 1]).unwrap());
        assert_eq!(counts(&sq), vec![4, 4, 1]);
        let cube = CellComplex::new(Lattice::free(&[1, 1, 1]).unwrap());
        assert_eq!(counts(&cube), vec![8, 12, 6, 1]);
    }

    #[test]
    fn periodic_torus_counts() {
        let t = CellComplex::new(Lattice::periodic(&[3, 3]).unwrap());
        assert_eq!(counts(&t), vec![9, 18, 9]);
        assert_eq!(t.euler_characteristic(), 0);
    }

    #[test]
    fn closed_form_counts_free_boxes() {
        let cx = CellComplex::new(Lattice::free(&[3, 2]).unwrap());
        assert_eq!(cx.num_sites(), 4 * 3);
        assert_eq!(cx.num_bonds(), 3 * 3 + 4 * 2);
        assert_eq!(cx.num_plaquettes(), 6);
        assert_eq!(cx.euler_characteristic(), 1);
        let cx = CellComplex::new(Lattice::free(&[2, 3, 4]).unwrap());
        assert_eq!(cx.num_sites(), 3 * 4 * 5);
        assert_eq!(cx.num_cubes(), 24);
        assert_eq!(cx.euler_characteristic(), 1);
    }

    #[test]
    fn rejects_bad_lattices() {
        assert!(Lattice::free(&[3]).is_err());
        assert!(Lattice::free(&[2, 2, 2, 2]).is_err());
        assert!(Lattice::free(&[2, 0]).is_err());
        assert!(Lattice::periodic(&[2, 3]).is_err());
        let bad: std::result::Result<Lattice, _> =
            serde_json::from_str(r#"{"d":3,"extents":[2,2],"bc":["free","free"]}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn lattice_json_round_trip() {
        let l: Lattice =
            serde_json::from_str(r#"{"d":2,"extents":[8,8],"bc":["free","periodic"]}"#).unwrap();
        assert_eq!(l.bc()[1], BoundaryCondition::Periodic);
        let s = serde_json::to_string(&l).unwrap();
        assert_eq!(s, r#"{"d":2,"extents":[8,8],"bc":["free","periodic"]}"#);
    }

    #[test]
    fn incidence_shapes() {
        let cx = CellComplex::new(Lattice::free(&[2, 2, 2]).unwrap());
        for p in 0..cx.num_plaquettes() {
            assert_eq!(cx.faces(2, p).len(), 4);
            assert_eq!(cx.vertices(2, p).len(), 4);
        }
        for b in 0..cx.num_bonds() {
            let (u, v) = cx.bond_sites(b);
            assert_ne!(u, v);
        }
        for c in 0..cx.num_cubes() {
            let mut f = cx.faces(3, c).to_vec();
            f.sort_unstable();
            f.dedup();
            assert_eq!(f.len(), 6);
        }
    }

    #[test]
    fn plaquette_boundary_examples() {
        let cx = CellComplex::new(Lattice::free(&[2, 1]).unwrap());
        let p0 = cx.plaquette_at(&[0, 0], 0, 1).unwrap();
        let p1 = cx.plaquette_at(&[1, 0], 0, 1).unwrap();
        assert_eq!(cx.boundary(&cx.chain(2, [p0])).unwrap().count(), 4);
        let both = cx.boundary(&cx.chain(2, [p0, p1])).unwrap();
        assert_eq!(both.count(), 6);
        let shared = cx.bond_at(&[1, 0], 1).unwrap();
        assert!(!both.contains(shared));
    }

    #[test]
    fn boundary_of_boundary_of_cube_vanishes() {
        let cx = CellComplex::new(Lattice::free(&[1, 1, 1]).unwrap());
        let cube = cx.chain(3, [0]);
        let b = cx.boundary(&cube).unwrap();
        assert_eq!(b.count(), 6);
        assert!(cx.boundary(&b).unwrap().is_empty());
        assert!(cx.boundary(&cx.empty_chain(0)).is_err());
        assert!(cx.coboundary(&cube).is_err());
    }

    #[test]
    fn coboundary_examples() {
        let cx = CellComplex::new(Lattice::free(&[3, 3]).unwrap());
        let interior = cx.bond_at(&[1, 1], 0).unwrap();
        assert_eq!(cx.coboundary(&cx.chain(1, [interior])).unwrap().count(), 2);
        let edge = cx.bond_at(&[0, 0], 0).unwrap();
        assert_eq!(cx.coboundary(&cx.chain(1, [edge])).unwrap().count(), 1);
    }

    #[test]
    fn dual_faces_match_cofaces() {
        for l in [
            Lattice::free(&[3, 2]).unwrap(),
            Lattice::periodic(&[3, 4]).unwrap(),
            Lattice::free(&[2, 2, 2]).unwrap(),
            Lattice::new(
                vec![3, 2, 3],
                vec![
                    BoundaryCondition::Periodic,
                    BoundaryCondition::Free,
                    BoundaryCondition::Periodic,
                ],
            )
            .unwrap(),
        ] {
            let cx = CellComplex::new(l);
            for k in 0..=cx.d() {
                for i in 0..cx.count(k) {
                    let mut geo = cx.dual_faces(k, i);
                    let mut inc: Vec<usize> = cx.cofaces(k, i).iter().map(|&c| c as usize).collect();
                    geo.sort_unstable();
                    inc.sort_unstable();
                    assert_eq!(geo, inc, "k={k} i={i}");
                    let (dk, di) = cx.dual_index(k, i);
                    assert_eq!(cx.dual_index(dk, di), (k, i));
                    let c = cx.center2(k, i);
                    assert_eq!(cx.cell_at_center2(&c), Some((k, i)));
                }
            }
        }
    }

    #[test]
    fn dual_boundary_marks_surface_cells() {
        let cx = CellComplex::new(Lattice::free(&[3, 3]).unwrap());
        // the 12 perimeter bonds have a single coface
        assert_eq!(cx.dual_boundary_mask(1).count_ones(), 12);
        assert!(cx.dual_boundary_mask(2).is_zero());
        let t = CellComplex::new(Lattice::periodic(&[3, 3]).unwrap());
        assert!(t.dual_boundary_mask(1).is_zero());
    }

    #[test]
    fn subcomplex_closure_and_validation() {
        let cx = CellComplex::new(Lattice::free(&[1, 1, 1]).unwrap());
        let all = BitVector::ones(6);
        let s = Subcomplex::from_plaquettes(&cx, &all);
        assert_eq!(s.count(3), 1);
        assert_eq!(s.count(1), 12);
        let mut masks = vec![
            BitVector::zeros(8),
            BitVector::unit(12, 0),
            BitVector::zeros(6),
            BitVector::zeros(1),
        ];
        assert!(Subcomplex::new(&cx, masks.clone()).is_err());
        let (u, v) = cx.bond_sites(0);
        masks[0].set(u, true);
        masks[0].set(v, true);
        assert!(Subcomplex::new(&cx, masks).is_ok());
    }

    #[test]
    fn chain_json_round_trip() {
        let c = Chain::from_cells(1, 10, [7, 2]);
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(s, r#"{"dim":1,"len":10,"cells":[2,7]}"#);
        let back: Chain = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
        assert!(serde_json::from_str::<Chain>(r#"{"dim":1,"len":3,"cells":[5]}"#).is_err());
    }
}
