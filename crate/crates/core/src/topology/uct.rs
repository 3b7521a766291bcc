//! Universal coefficients in degree one, checked on an instance.
//!
//! With Z = Ker d1, B = Im d2 and B0 = Im d1 on the network:
//!
//! ```text
//! 0 -> B --i--> Z --p--> H1 -> 0        0 -> Z --j--> C1 --d--> B0 -> 0
//! ```
//!
//! and their duals under Hom(-, Z2). The second sequence is split by
//! choosing a preimage chain for each generator of B0.

use crate::complex::{CellComplex, Subcomplex};
use crate::gf2::{BitVector, Gf2Matrix};
use crate::topology::homology::ChainView;
use crate::topology::report::{exactness_check, injective_check, surjective_check, Check, Report};

/// Coordinates of each vector in `targets` with respect to the columns of
/// `basis` (which must span them).
fn coords_in(basis: &Gf2Matrix, targets: impl Iterator<Item = BitVector>) -> Vec<BitVector> {
    targets
        .map(|t| basis.solve(&t).expect("vector lies in the span"))
        .collect()
}

fn short_exact(report: &mut Report, label: &str, f: &Gf2Matrix, g: &Gf2Matrix) {
    report.push(injective_check(&format!("{label}: injective"), f));
    report.push(exactness_check(&format!("{label}: exact in the middle"), f, g));
    report.push(surjective_check(&format!("{label}: surjective"), g));
}

pub fn verify_universal_coefficients(complex: &CellComplex, network: &Subcomplex) -> Report {
    let mut report = Report::new("universal_coefficients");
    let view = ChainView::absolute(complex, network);
    let d1 = view.boundary(1);
    let d2 = view.boundary(2);
    let n1 = d1.cols();

    let z_basis = d1.kernel_basis();
    let b_basis = d2.image_basis();
    let b0_basis = d1.image_basis();
    let (dz, db, db0) = (z_basis.len(), b_basis.len(), b0_basis.len());
    let zmat = Gf2Matrix::from_columns(n1, &z_basis);
    let b0mat = Gf2Matrix::from_columns(d1.rows(), &b0_basis);
    let h1 = view.homology(1);
    let c1 = view.cohomology(1);

    let i = Gf2Matrix::from_columns(dz, &coords_in(&zmat, b_basis.iter().cloned()));
    let p = Gf2Matrix::from_columns(
        h1.dim(),
        &z_basis
            .iter()
            .map(|z| h1.coords(z).expect("basis of Z is made of cycles"))
            .collect::<Vec<_>>(),
    );
    let j = zmat.clone();
    let bd = Gf2Matrix::from_columns(db0, &coords_in(&b0mat, (0..n1).map(|k| d1.column(k))));

    report.push(
        Check::new("ranks", true)
            .dim("Z1", dz)
            .dim("B1", db)
            .dim("H1", h1.dim())
            .dim("C1", n1)
            .dim("B0", db0),
    );
    short_exact(&mut report, "B -> Z -> H", &i, &p);
    short_exact(&mut report, "Z -> C -> B0", &j, &bd);
    let (p_s, i_s, bd_s, j_s) = (p.transpose(), i.transpose(), bd.transpose(), j.transpose());
    short_exact(&mut report, "H# -> Z# -> B#", &p_s, &i_s);
    short_exact(&mut report, "B0# -> C# -> Z#", &bd_s, &j_s);

    // splitting: a preimage chain for each generator of B0
    let lift_cols: Vec<BitVector> = b0_basis
        .iter()
        .map(|b| d1.solve(b).expect("B0 is the image of d1"))
        .collect();
    let bd_bar = Gf2Matrix::from_columns(n1, &lift_cols);
    let mut jbar_cols = Vec::with_capacity(n1);
    for k in 0..n1 {
        let e = BitVector::unit(n1, k);
        let back = bd_bar.mul_vec(&bd.mul_vec(&e));
        let z = e.xor(&back);
        jbar_cols.push(zmat.solve(&z).expect("c - lift(dc) is a cycle"));
    }
    let j_bar = Gf2Matrix::from_columns(dz, &jbar_cols);
    let ident = j_bar.mul(&j);
    report.push(Check::new("jbar j = 1", ident == Gf2Matrix::identity(dz)).dim("Z1", dz));
    let ident_s = j_s.mul(&j_bar.transpose());
    report.push(Check::new("j# jbar# = 1", ident_s == Gf2Matrix::identity(dz)).dim("Z1", dz));

    // H^1 evaluated on the cycle basis
    let jstar = Gf2Matrix::from_columns(
        dz,
        &c1.representatives()
            .iter()
            .map(|t| BitVector::from_bools(z_basis.iter().map(|z| t.dot(z))))
            .collect::<Vec<_>>(),
    );
    report.push(injective_check("H1 -> Z# injective", &jstar));
    report.push(exactness_check("Im j* = Ker i#", &jstar, &i_s));
    let ker_i = dz - i_s.rank();
    report.push(
        Check::new("dim H^1 = dim Hom(H1, Z2)", c1.dim() == ker_i)
            .dim("H^1", c1.dim())
            .dim("Ker i#", ker_i),
    );
    report
}
