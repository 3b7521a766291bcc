//! Mod-2 homology and cohomology of subcomplexes, relative pairs and their
//! duals.

use serde::Serialize;

use crate::complex::{CellComplex, Chain, Subcomplex};
use crate::error::{Error, Result};
use crate::gf2::{BitVector, Echelon, Gf2Matrix};

const NONE: u32 = u32::MAX;

/// A set of cells per dimension with a dense local numbering.
///
/// For a subcomplex X the selection is X itself; for a pair (X, A) it is
/// X \ A, which turns the chain group C(X)/C(A) into chains on the
/// selected cells.
#[derive(Clone, Debug)]
pub struct CellSelection {
    cells: Vec<Vec<usize>>,
    local: Vec<Vec<u32>>,
}

impl CellSelection {
    pub fn from_masks(masks: &[BitVector]) -> Self {
        let cells: Vec<Vec<usize>> = masks.iter().map(BitVector::indices).collect();
        let local = masks
            .iter()
            .zip(&cells)
            .map(|(m, cs)| {
                let mut l = vec![NONE; m.len()];
                for (i, &c) in cs.iter().enumerate() {
                    l[c] = i as u32;
                }
                l
            })
            .collect();
        CellSelection { cells, local }
    }

    pub fn absolute(sub: &Subcomplex) -> Self {
        Self::from_masks(&(0..=sub.d()).map(|k| sub.mask(k).clone()).collect::<Vec<_>>())
    }

    /// Cells of `big` not in `sub`. Fails unless `sub` is contained in `big`.
    pub fn relative(big: &Subcomplex, sub: &Subcomplex) -> Result<Self> {
        if !sub.is_subset_of(big) {
            return Err(Error::NotSubcomplex);
        }
        Ok(Self::from_masks(
            &(0..=big.d())
                .map(|k| big.mask(k).and(&sub.mask(k).not()))
                .collect::<Vec<_>>(),
        ))
    }

    pub fn d(&self) -> usize {
        self.cells.len() - 1
    }

    pub fn count(&self, k: usize) -> usize {
        self.cells.get(k).map_or(0, Vec::len)
    }

    pub fn cells(&self, k: usize) -> &[usize] {
        &self.cells[k]
    }

    pub fn local_index(&self, k: usize, global: usize) -> Option<usize> {
        match self.local[k][global] {
            NONE => None,
            i => Some(i as usize),
        }
    }

    pub fn contains(&self, k: usize, global: usize) -> bool {
        self.local[k][global] != NONE
    }

    /// Local coordinates of the part of `global` inside the selection.
    pub fn restrict(&self, k: usize, global: &BitVector) -> BitVector {
        let mut out = BitVector::zeros(self.count(k));
        for c in global.ones_iter() {
            if let Some(i) = self.local_index(k, c) {
                out.set(i, true);
            }
        }
        out
    }

    /// Whether `global` is supported on selected cells only.
    pub fn covers(&self, k: usize, global: &BitVector) -> bool {
        global.ones_iter().all(|c| self.contains(k, c))
    }

    /// Global vector (length `n_global`) of a local vector.
    pub fn lift(&self, k: usize, local: &BitVector, n_global: usize) -> BitVector {
        BitVector::from_indices(n_global, local.ones_iter().map(|i| self.cells[k][i]))
    }

    /// Matrix of the boundary C_k -> C_{k-1} on selected cells, dropping
    /// faces outside the selection. Defined for every k >= 0 (zero maps at
    /// the ends).
    pub fn boundary_matrix(&self, complex: &CellComplex, k: usize) -> Gf2Matrix {
        let cols = self.count(k);
        if k == 0 {
            return Gf2Matrix::zeros(0, cols);
        }
        let rows = self.count(k - 1);
        if k > self.d() {
            return Gf2Matrix::zeros(rows, 0);
        }
        let mut m = Gf2Matrix::zeros(rows, cols);
        for (j, &c) in self.cells[k].iter().enumerate() {
            for &f in complex.faces(k, c) {
                if let Some(i) = self.local_index(k - 1, f as usize) {
                    m.toggle(i, j);
                }
            }
        }
        m
    }

    /// Boundary of dual cells, computed from cell centres: maps selected
    /// primal k-cells (dual (d-k)-cells) to selected primal (k+1)-cells.
    /// Dual faces outside the selection or outside the lattice are dropped.
    pub fn dual_boundary_matrix(&self, complex: &CellComplex, k: usize) -> Gf2Matrix {
        let cols = self.count(k);
        let rows = self.count(k + 1);
        let mut m = Gf2Matrix::zeros(rows, cols);
        if k >= self.d() {
            return m;
        }
        for (j, &c) in self.cells[k].iter().enumerate() {
            for f in complex.dual_faces(k, c) {
                if let Some(i) = self.local_index(k + 1, f) {
                    m.toggle(i, j);
                }
            }
        }
        m
    }
}

/// Cycles modulo boundaries for one degree of a chain complex over Z2,
/// with a fixed basis of representatives and class coordinates.
#[derive(Clone, Debug)]
pub struct HomologyGroup {
    outgoing: Gf2Matrix,
    dim_z: usize,
    dim_b: usize,
    reps: Vec<BitVector>,
    rep_slot: Vec<Option<usize>>,
    reducer: Echelon,
}

impl HomologyGroup {
    /// Homology at the middle of `incoming` followed by `outgoing`
    /// (`outgoing * incoming` must vanish).
    pub fn new(outgoing: &Gf2Matrix, incoming: &Gf2Matrix) -> Self {
        let width = outgoing.cols();
        assert_eq!(incoming.rows(), width, "maps do not compose");
        let cycles = outgoing.kernel_basis();
        let boundaries = incoming.image_basis();
        let dim_z = cycles.len();
        let mut reducer = Echelon::new(width, dim_z);
        for b in &boundaries {
            reducer.insert(b.clone(), BitVector::zeros(dim_z));
        }
        let dim_b = reducer.rank();
        let mut reps = Vec::new();
        let mut rep_slot = vec![None; dim_z];
        for (i, z) in cycles.into_iter().enumerate() {
            if reducer.insert(z.clone(), BitVector::unit(dim_z, i)) {
                rep_slot[i] = Some(reps.len());
                reps.push(z);
            }
        }
        HomologyGroup {
            outgoing: outgoing.clone(),
            dim_z,
            dim_b,
            reps,
            rep_slot,
            reducer,
        }
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    pub fn dim_cycles(&self) -> usize {
        self.dim_z
    }

    pub fn dim_boundaries(&self) -> usize {
        self.dim_b
    }

    pub fn width(&self) -> usize {
        self.outgoing.cols()
    }

    pub fn representatives(&self) -> &[BitVector] {
        &self.reps
    }

    pub fn is_cycle(&self, v: &BitVector) -> bool {
        self.outgoing.mul_vec(v).is_zero()
    }

    /// Coordinates of the class of `v` in the representative basis, or
    /// `None` if `v` is not a cycle.
    pub fn coords(&self, v: &BitVector) -> Option<BitVector> {
        if !self.is_cycle(v) {
            return None;
        }
        let (res, tag) = self.reducer.reduce(v.clone());
        assert!(res.is_zero(), "cycle not spanned by boundaries and representatives");
        let mut out = BitVector::zeros(self.dim());
        for i in tag.ones_iter() {
            let slot = self.rep_slot[i].expect("tags only name representatives");
            out.toggle(slot);
        }
        Some(out)
    }

    pub fn is_boundary(&self, v: &BitVector) -> bool {
        self.coords(v).is_some_and(|c| c.is_zero())
    }
}

/// Chain complex of a subcomplex or of a pair, with boundary matrices for
/// every degree.
#[derive(Clone, Debug)]
pub struct ChainView {
    selection: CellSelection,
    bd: Vec<Gf2Matrix>,
}

impl ChainView {
    pub fn from_selection(complex: &CellComplex, selection: CellSelection) -> Self {
        let bd = (0..=selection.d() + 1)
            .map(|k| selection.boundary_matrix(complex, k))
            .collect();
        ChainView { selection, bd }
    }

    pub fn absolute(complex: &CellComplex, sub: &Subcomplex) -> Self {
        Self::from_selection(complex, CellSelection::absolute(sub))
    }

    pub fn relative(complex: &CellComplex, big: &Subcomplex, sub: &Subcomplex) -> Result<Self> {
        Ok(Self::from_selection(complex, CellSelection::relative(big, sub)?))
    }

    pub fn selection(&self) -> &CellSelection {
        &self.selection
    }

    pub fn d(&self) -> usize {
        self.selection.d()
    }

    /// Boundary C_k -> C_{k-1}.
    pub fn boundary(&self, k: usize) -> &Gf2Matrix {
        &self.bd[k]
    }

    pub fn homology(&self, k: usize) -> HomologyGroup {
        HomologyGroup::new(&self.bd[k], &self.bd[k + 1])
    }

    pub fn cohomology(&self, k: usize) -> HomologyGroup {
        HomologyGroup::new(&self.bd[k + 1].transpose(), &self.bd[k].transpose())
    }
}

/// Chain complex of the dual cells of a selection, with incidence taken
/// from cell centres. Dual degree j lives on primal (d-j)-cells.
#[derive(Clone, Debug)]
pub struct DualView {
    selection: CellSelection,
    /// `up[k]`: primal k-cells to primal (k+1)-cells, i.e. dual boundary
    /// from degree d-k to d-k-1.
    up: Vec<Gf2Matrix>,
}

impl DualView {
    pub fn new(complex: &CellComplex, selection: CellSelection) -> Self {
        let d = selection.d();
        let up = (0..d)
            .map(|k| selection.dual_boundary_matrix(complex, k))
            .collect();
        DualView { selection, up }
    }

    pub fn selection(&self) -> &CellSelection {
        &self.selection
    }

    /// Dual boundary out of dual degree `j`.
    pub fn boundary(&self, j: usize) -> Gf2Matrix {
        let d = self.selection.d();
        let k = d - j;
        if j == 0 {
            Gf2Matrix::zeros(0, self.selection.count(d))
        } else {
            self.up[k].clone()
        }
    }

    /// H_j of the dual complex relative to the dropped cells.
    pub fn homology(&self, j: usize) -> HomologyGroup {
        let d = self.selection.d();
        let incoming = if j == d {
            Gf2Matrix::zeros(self.selection.count(0), 0)
        } else {
            self.boundary(j + 1)
        };
        HomologyGroup::new(&self.boundary(j), &incoming)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomologySummary {
    pub k: usize,
    pub dim_z: usize,
    pub dim_b: usize,
    pub dim_h: usize,
    pub basis: Vec<Chain>,
}

fn summarize(complex: &CellComplex, view: &ChainView, k: usize) -> HomologySummary {
    let h = view.homology(k);
    let n = complex.count(k);
    HomologySummary {
        k,
        dim_z: h.dim_cycles(),
        dim_b: h.dim_boundaries(),
        dim_h: h.dim(),
        basis: h
            .representatives()
            .iter()
            .map(|r| Chain::new(k, view.selection().lift(k, r, n)))
            .collect(),
    }
}

fn check_degree(complex: &CellComplex, k: usize) -> Result<()> {
    if k > complex.d() {
        return Err(Error::Dimension {
            got: k,
            expected: "degree <= d",
        });
    }
    Ok(())
}

/// H_k of a subcomplex. Representatives are global chains.
pub fn homology(complex: &CellComplex, network: &Subcomplex, k: usize) -> Result<HomologySummary> {
    check_degree(complex, k)?;
    Ok(summarize(complex, &ChainView::absolute(complex, network), k))
}

/// H_k(big, sub). Representatives are chains on cells of big not in sub.
pub fn relative_homology(
    complex: &CellComplex,
    big: &Subcomplex,
    sub: &Subcomplex,
    k: usize,
) -> Result<HomologySummary> {
    check_degree(complex, k)?;
    Ok(summarize(complex, &ChainView::relative(complex, big, sub)?, k))
}

/// H^k of a subcomplex; representatives are cocycles as global cochains.
pub fn cohomology(complex: &CellComplex, network: &Subcomplex, k: usize) -> Result<HomologySummary> {
    check_degree(complex, k)?;
    let view = ChainView::absolute(complex, network);
    let h = view.cohomology(k);
    Ok(HomologySummary {
        k,
        dim_z: h.dim_cycles(),
        dim_b: h.dim_boundaries(),
        dim_h: h.dim(),
        basis: h
            .representatives()
            .iter()
            .map(|r| Chain::new(k, view.selection().lift(k, r, complex.count(k))))
            .collect(),
    })
}

/// Whether two 1-cycles of the network differ by a boundary of network
/// plaquettes.
pub fn loops_homologous(complex: &CellComplex, network: &Subcomplex, l1: &Chain, l2: &Chain) -> Result<bool> {
    for l in [l1, l2] {
        complex.check_chain(l)?;
        if l.dim() != 1 {
            return Err(Error::Dimension {
                got: l.dim(),
                expected: "loops are 1-chains",
            });
        }
        if !complex.boundary(l)?.is_empty() {
            return Err(Error::NotACycle);
        }
        if !network.contains_chain(l) {
            return Err(Error::OutsideNetwork);
        }
    }
    let view = ChainView::absolute(complex, network);
    let diff = view.selection().restrict(1, &l1.sum(l2).into_support());
    Ok(view.boundary(2).solve(&diff).is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Lattice;
    use proptest::prelude::*;

    fn grid(n: &[usize]) -> CellComplex {
        CellComplex::new(Lattice::free(n).unwrap())
    }

    #[test]
    fn free_grid_is_acyclic() {
        let cx = grid(&[3, 3]);
        let full = Subcomplex::full(&cx);
        assert_eq!(homology(&cx, &full, 0).unwrap().dim_h, 1);
        assert_eq!(homology(&cx, &full, 1).unwrap().dim_h, 0);
        assert_eq!(homology(&cx, &full, 2).unwrap().dim_h, 0);
        assert!(homology(&cx, &full, 3).is_err());
    }

    fn annulus(cx: &CellComplex) -> Subcomplex {
        let centre = cx.plaquette_at(&[1, 1], 0, 1).unwrap();
        let mut p = BitVector::ones(cx.num_plaquettes());
        p.set(centre, false);
        Subcomplex::from_plaquettes(cx, &p)
    }

    #[test]
    fn annulus_has_one_loop() {
        let cx = grid(&[3, 3]);
        let a = annulus(&cx);
        assert_eq!(a.count(1), 24);
        let h = homology(&cx, &a, 1).unwrap();
        assert_eq!(h.dim_h, 1);
        assert_eq!(h.dim_z, h.dim_b + 1);
        assert_eq!(cohomology(&cx, &a, 1).unwrap().dim_h, 1);
    }

    #[test]
    fn torus_betti_numbers() {
        let cx = CellComplex::new(Lattice::periodic(&[3, 3]).unwrap());
        let full = Subcomplex::full(&cx);
        let dims: Vec<usize> = (0..=2).map(|k| homology(&cx, &full, k).unwrap().dim_h).collect();
        assert_eq!(dims, vec![1, 2, 1]);
        let t3 = CellComplex::new(Lattice::periodic(&[3, 3, 3]).unwrap());
        let full = Subcomplex::full(&t3);
        let dims: Vec<usize> = (0..=3).map(|k| homology(&t3, &full, k).unwrap().dim_h).collect();
        assert_eq!(dims, vec![1, 3, 3, 1]);
    }

    #[test]
    fn relative_extremes() {
        let cx = grid(&[2, 2]);
        let full = Subcomplex::full(&cx);
        for k in 0..=2 {
            assert_eq!(relative_homology(&cx, &full, &full, k).unwrap().dim_h, 0);
            let empty = Subcomplex::empty(&cx);
            assert_eq!(
                relative_homology(&cx, &full, &empty, k).unwrap().dim_h,
                homology(&cx, &full, k).unwrap().dim_h
            );
        }
        let one = Subcomplex::from_plaquettes(&cx, &BitVector::unit(4, 0));
        assert!(matches!(
            relative_homology(&cx, &one, &full, 1),
            Err(Error::NotSubcomplex)
        ));
        // disc relative to its boundary circle is a 2-sphere
        let rim = Subcomplex::from_bonds(&cx, &cx.boundary(&cx.chain(2, 0..4)).unwrap().into_support());
        assert_eq!(relative_homology(&cx, &full, &rim, 2).unwrap().dim_h, 1);
        assert_eq!(relative_homology(&cx, &full, &rim, 1).unwrap().dim_h, 0);
    }

    #[test]
    fn annulus_loops() {
        let cx = grid(&[3, 3]);
        let a = annulus(&cx);
        let centre = cx.plaquette_at(&[1, 1], 0, 1).unwrap();
        let inner = cx.boundary(&cx.chain(2, [centre])).unwrap();
        let all: Vec<usize> = (0..9).collect();
        let outer = cx.boundary(&cx.chain(2, all)).unwrap();
        let corner = cx.boundary(&cx.chain(2, [0])).unwrap();
        assert!(loops_homologous(&cx, &a, &inner, &outer).unwrap());
        assert!(loops_homologous(&cx, &a, &inner, &inner).unwrap());
        assert!(!loops_homologous(&cx, &a, &inner, &corner).unwrap());
        let open = cx.chain(1, [0]);
        assert!(loops_homologous(&cx, &a, &open, &inner).is_err());
        let full = Subcomplex::full(&cx);
        assert!(loops_homologous(&cx, &full, &inner, &corner).unwrap());
    }

    #[test]
    fn dual_incidence_agrees_with_transposed_boundary() {
        let cx = grid(&[2, 3, 2]);
        let sel = CellSelection::absolute(&Subcomplex::full(&cx));
        for k in 0..3 {
            let geo = sel.dual_boundary_matrix(&cx, k);
            let prim = sel.boundary_matrix(&cx, k + 1).transpose();
            assert_eq!(geo, prim);
        }
    }

    proptest! {
        #[test]
        fn boundary_squares_to_zero_and_is_adjoint(seed in any::<u64>()) {
            use crate::rng;
            let cx = grid(&[3, 3, 2]);
            let mut r = rng::stream(seed, 0);
            for k in 1..=3 {
                let a = cx.chain(k, (0..cx.count(k)).filter(|_| rng::coin(&mut r)));
                let b = cx.boundary(&a).unwrap();
                if k >= 2 {
                    prop_assert!(cx.boundary(&b).unwrap().is_empty());
                }
                let c = cx.chain(k - 1, (0..cx.count(k - 1)).filter(|_| rng::coin(&mut r)));
                let dc = cx.coboundary(&c).unwrap();
                prop_assert_eq!(dc.pair(&a), c.pair(&b));
                if k <= 2 {
                    prop_assert!(cx.coboundary(&dc).unwrap().is_empty());
                }
            }
        }

        #[test]
        fn representatives_are_independent_cycles(seed in any::<u64>()) {
            use crate::rng;
            let cx = CellComplex::new(Lattice::periodic(&[3, 4]).unwrap());
            let mut r = rng::stream(seed, 1);
            let mask = BitVector::from_bools((0..cx.num_plaquettes()).map(|_| rng::unit_f64(&mut r) < 0.6));
            let sub = Subcomplex::from_plaquettes(&cx, &mask);
            let view = ChainView::absolute(&cx, &sub);
            let h = view.homology(1);
            prop_assert_eq!(h.dim(), h.dim_cycles() - h.dim_boundaries());
            let mut e = Echelon::new(h.width(), 0);
            for b in view.boundary(2).image_basis() {
                e.insert(b, BitVector::zeros(0));
            }
            for (i, rep) in h.representatives().iter().enumerate() {
                prop_assert!(h.is_cycle(rep));
                prop_assert!(e.insert(rep.clone(), BitVector::zeros(0)));
                prop_assert_eq!(h.coords(rep).unwrap(), BitVector::unit(h.dim(), i));
            }
        }
    }
}
