//! Linear algebra over GF(2) on bit-packed rows.
//!
//! Every elimination here is pivoted in natural column order, so kernel
//! bases, images and particular solutions are reproducible bit-for-bit.

mod bits;

pub use bits::{BitVector, Ones};

/// Dense GF(2) matrix stored as bit-packed rows.
///
/// The matrix acts on column vectors: `mul_vec(x)` has length `rows()`
/// and `x` has length `cols()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gf2Matrix {
    cols: usize,
    rows: Vec<BitVector>,
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Gf2Matrix {
            cols,
            rows: vec![BitVector::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        Gf2Matrix {
            cols: n,
            rows: (0..n).map(|i| BitVector::unit(n, i)).collect(),
        }
    }

    /// Builds a matrix from its rows. Panics if the row lengths differ from `cols`.
    pub fn from_rows(cols: usize, rows: Vec<BitVector>) -> Self {
        assert!(
            rows.iter().all(|r| r.len() == cols),
            "every row must have length {cols}"
        );
        Gf2Matrix { cols, rows }
    }

    /// Builds a matrix whose columns are the given vectors (each of length `rows`).
    pub fn from_columns(rows: usize, columns: &[BitVector]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "column {j} has the wrong length");
            for i in c.ones_iter() {
                m.rows[i].set(j, true);
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &BitVector {
        &self.rows[i]
    }

    pub fn row_vectors(&self) -> &[BitVector] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i].get(j)
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.rows[i].set(j, value);
    }

    pub fn toggle(&mut self, i: usize, j: usize) {
        self.rows[i].toggle(j);
    }

    pub fn column(&self, j: usize) -> BitVector {
        BitVector::from_bools(self.rows.iter().map(|r| r.get(j)))
    }

    pub fn transpose(&self) -> Gf2Matrix {
        let mut t = Gf2Matrix::zeros(self.cols, self.rows.len());
        for (i, r) in self.rows.iter().enumerate() {
            for j in r.ones_iter() {
                t.rows[j].set(i, true);
            }
        }
        t
    }

    pub fn mul_vec(&self, x: &BitVector) -> BitVector {
        assert_eq!(x.len(), self.cols, "vector length must equal column count");
        BitVector::from_bools(self.rows.iter().map(|r| r.dot(x)))
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &Gf2Matrix) -> Gf2Matrix {
        assert_eq!(self.cols, other.rows(), "inner dimensions differ");
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut acc = BitVector::zeros(other.cols);
                for k in r.ones_iter() {
                    acc.xor_assign(&other.rows[k]);
                }
                acc
            })
            .collect();
        Gf2Matrix {
            cols: other.cols,
            rows,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(BitVector::is_zero)
    }

    /// Rank over GF(2).
    pub fn rank(&self) -> usize {
        let mut e = Echelon::new(self.cols, 0);
        for r in &self.rows {
            e.insert(r.clone(), BitVector::zeros(0));
        }
        e.rank()
    }

    /// Basis of `{x : self * x = 0}`, one vector per free column in
    /// increasing column order.
    pub fn kernel_basis(&self) -> Vec<BitVector> {
        let mut e = Echelon::new(self.cols, 0);
        for r in &self.rows {
            e.insert(r.clone(), BitVector::zeros(0));
        }
        e.reduce_fully();
        let pivots = e.pivot_mask();
        let free: Vec<usize> = pivots.not().indices();
        let mut slot = vec![usize::MAX; self.cols];
        let mut basis: Vec<BitVector> = free
            .iter()
            .enumerate()
            .map(|(n, &f)| {
                slot[f] = n;
                BitVector::unit(self.cols, f)
            })
            .collect();
        for row in &e.rows {
            let p = row.first_one().expect("echelon rows are nonzero");
            for f in row.ones_iter().skip(1) {
                basis[slot[f]].set(p, true);
            }
        }
        basis
    }

    /// Echelon basis of the column space (vectors of length `rows()`).
    pub fn image_basis(&self) -> Vec<BitVector> {
        let mut e = Echelon::new(self.rows.len(), 0);
        for c in self.transpose().rows {
            e.insert(c, BitVector::zeros(0));
        }
        e.rows
    }

    /// Some `x` with `self * x = rhs`, or `None` when `rhs` is not in the image.
    /// Free variables are set to zero.
    pub fn solve(&self, rhs: &BitVector) -> Option<BitVector> {
        assert_eq!(rhs.len(), self.rows.len(), "rhs length must equal row count");
        let mut e = Echelon::new(self.cols, 1);
        for (i, r) in self.rows.iter().enumerate() {
            let tag = BitVector::from_bools([rhs.get(i)]);
            let (res, tag) = e.reduce_with_tag(r.clone(), tag);
            if res.is_zero() {
                if tag.get(0) {
                    return None;
                }
            } else {
                e.push_reduced(res, tag);
            }
        }
        e.reduce_fully();
        let mut x = BitVector::zeros(self.cols);
        for (row, tag) in e.rows.iter().zip(&e.tags) {
            if tag.get(0) {
                x.set(row.first_one().expect("nonzero row"), true);
            }
        }
        Some(x)
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &Gf2Matrix) -> Gf2Matrix {
        assert_eq!(self.rows(), other.rows(), "row counts differ");
        let cols = self.cols + other.cols;
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| {
                let mut r = BitVector::zeros(cols);
                for i in a.ones_iter() {
                    r.set(i, true);
                }
                for i in b.ones_iter() {
                    r.set(self.cols + i, true);
                }
                r
            })
            .collect();
        Gf2Matrix { cols, rows }
    }
}

/// Incrementally built row echelon form keyed by each row's lowest set bit.
///
/// Every stored row carries a tag vector that records, in some caller-chosen
/// coordinate system, what the row represents; reductions accumulate tags
/// alongside the row operations.
#[derive(Clone, Debug)]
pub struct Echelon {
    width: usize,
    tag_width: usize,
    rows: Vec<BitVector>,
    tags: Vec<BitVector>,
    pivot_row: Vec<Option<usize>>,
}

impl Echelon {
    pub fn new(width: usize, tag_width: usize) -> Self {
        Echelon {
            width,
            tag_width,
            rows: Vec::new(),
            tags: Vec::new(),
            pivot_row: vec![None; width],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }

    pub fn tags(&self) -> &[BitVector] {
        &self.tags
    }

    pub fn pivot_mask(&self) -> BitVector {
        BitVector::from_bools(self.pivot_row.iter().map(Option::is_some))
    }

    /// Reduces `v` against the stored rows and returns the residual
    /// together with the accumulated tag of the rows that were used.
    pub fn reduce(&self, v: BitVector) -> (BitVector, BitVector) {
        self.reduce_with_tag(v, BitVector::zeros(self.tag_width))
    }

    pub fn reduce_with_tag(&self, mut v: BitVector, mut tag: BitVector) -> (BitVector, BitVector) {
        assert_eq!(v.len(), self.width, "vector width mismatch");
        assert_eq!(tag.len(), self.tag_width, "tag width mismatch");
        let mut start = 0;
        while let Some(i) = v.first_one_from(start) {
            if let Some(r) = self.pivot_row[i] {
                v.xor_assign(&self.rows[r]);
                tag.xor_assign(&self.tags[r]);
            }
            start = i + 1;
        }
        (v, tag)
    }

    pub fn contains(&self, v: &BitVector) -> bool {
        self.reduce(v.clone()).0.is_zero()
    }

    /// Inserts `v` with the given tag. Returns `true` when it was
    /// independent of the rows already stored.
    pub fn insert(&mut self, v: BitVector, tag: BitVector) -> bool {
        let (res, tag) = self.reduce_with_tag(v, tag);
        if res.is_zero() {
            false
        } else {
            self.push_reduced(res, tag);
            true
        }
    }

    fn push_reduced(&mut self, v: BitVector, tag: BitVector) {
        let p = v.first_one().expect("reduced row must be nonzero");
        debug_assert!(self.pivot_row[p].is_none());
        self.pivot_row[p] = Some(self.rows.len());
        self.rows.push(v);
        self.tags.push(tag);
    }

    /// Brings the stored rows to reduced row echelon form: every pivot
    /// column has a single nonzero entry.
    pub fn reduce_fully(&mut self) {
        let mut order: Vec<usize> = (0..self.rows.len()).collect();
        order.sort_by_key(|&r| std::cmp::Reverse(self.rows[r].first_one()));
        // rows with larger pivots are finished first, so one pass suffices
        for &r in &order {
            let p = self.rows[r].first_one().expect("nonzero row");
            let mut start = p + 1;
            while let Some(i) = self.rows[r].first_one_from(start) {
                if let Some(q) = self.pivot_row[i] {
                    let (row_q, tag_q) = (self.rows[q].clone(), self.tags[q].clone());
                    self.rows[r].xor_assign(&row_q);
                    self.tags[r].xor_assign(&tag_q);
                }
                start = i + 1;
            }
        }
    }
}
