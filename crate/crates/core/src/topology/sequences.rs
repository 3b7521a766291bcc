//! Exactness of the long exact sequences of the pair (N- u N+, N+) in
//! degrees 2 and 1, in homology and in cohomology, with every map built
//! as an explicit matrix between class coordinates.

use crate::complex::{CellComplex, Subcomplex};
use crate::gf2::{BitVector, Gf2Matrix};
use crate::topology::homology::{ChainView, HomologyGroup};
use crate::topology::report::{exactness_check, Check, Report};

/// The pair X = N- u N+ and A = N+ as induced subcomplexes, with chain
/// views of X, A and (X, A).
pub struct NetworkPair {
    pub x: Subcomplex,
    pub a: Subcomplex,
    pub vx: ChainView,
    pub va: ChainView,
    pub vr: ChainView,
}

impl NetworkPair {
    pub fn new(complex: &CellComplex, nminus: &BitVector, nplus: &BitVector) -> Self {
        let x = Subcomplex::from_plaquettes(complex, &nminus.or(nplus));
        let a = Subcomplex::from_plaquettes(complex, nplus);
        let vx = ChainView::absolute(complex, &x);
        let va = ChainView::absolute(complex, &a);
        let vr = ChainView::relative(complex, &x, &a).expect("N+ lies in N- u N+");
        NetworkPair { x, a, vx, va, vr }
    }
}

/// Builds the matrix of a map between groups by sending each source
/// representative through `f` and taking coordinates in `target`. The
/// first representative whose image is not a cycle is returned as error.
fn class_map<F>(source: &HomologyGroup, target: &HomologyGroup, mut f: F) -> Result<Gf2Matrix, BitVector>
where
    F: FnMut(&BitVector) -> Option<BitVector>,
{
    let mut cols = Vec::with_capacity(source.dim());
    for rep in source.representatives() {
        let image = f(rep).ok_or_else(|| rep.clone())?;
        cols.push(target.coords(&image).ok_or_else(|| rep.clone())?);
    }
    Ok(Gf2Matrix::from_columns(target.dim(), &cols))
}

fn map_or_fail(report: &mut Report, name: &str, m: Result<Gf2Matrix, BitVector>) -> Option<Gf2Matrix> {
    match m {
        Ok(m) => Some(m),
        Err(w) => {
            report.push(Check::new(name, false).fail("image of a representative is not a cycle", Some(&w)));
            None
        }
    }
}

/// H2(X) -> H2(X,A) -> H1(A) -> H1(X): exact at H2(X,A) and at H1(A).
pub fn verify_homology_exactness(complex: &CellComplex, nminus: &BitVector, nplus: &BitVector) -> Report {
    let pair = NetworkPair::new(complex, nminus, nplus);
    let (sx, sa, sr) = (pair.vx.selection(), pair.va.selection(), pair.vr.selection());
    let h2x = pair.vx.homology(2);
    let h2r = pair.vr.homology(2);
    let h1a = pair.va.homology(1);
    let h1x = pair.vx.homology(1);
    let (n1, n2) = (complex.num_bonds(), complex.num_plaquettes());

    let mut report = Report::new("homology_exactness");
    report.push(
        Check::new("dimensions", true)
            .dim("H2(X)", h2x.dim())
            .dim("H2(X,A)", h2r.dim())
            .dim("H1(A)", h1a.dim())
            .dim("H1(X)", h1x.dim()),
    );
    let j = class_map(&h2x, &h2r, |z| Some(sr.restrict(2, &sx.lift(2, z, n2))));
    let bd = class_map(&h2r, &h1a, |s| {
        let global = crate::complex::Chain::new(2, sr.lift(2, s, n2));
        let b = complex.boundary(&global).expect("2-chain").into_support();
        sa.covers(1, &b).then(|| sa.restrict(1, &b))
    });
    let i = class_map(&h1a, &h1x, |l| Some(sx.restrict(1, &sa.lift(1, l, n1))));
    let (Some(j), Some(bd), Some(i)) = (
        map_or_fail(&mut report, "j_*", j),
        map_or_fail(&mut report, "boundary", bd),
        map_or_fail(&mut report, "i_*", i),
    ) else {
        return report;
    };
    report.push(exactness_check("exact at H2(X,A)", &j, &bd));
    report.push(exactness_check("exact at H1(A)", &bd, &i));
    report
}

/// H1(X) -> H1(A) -> H2(X,A) -> H2(X): exact at H1(A) and at H2(X,A).
/// The connecting map extends a cocycle of A by zero and takes its full
/// coboundary.
pub fn verify_cohomology_exactness(complex: &CellComplex, nminus: &BitVector, nplus: &BitVector) -> Report {
    let pair = NetworkPair::new(complex, nminus, nplus);
    let (sx, sa, sr) = (pair.vx.selection(), pair.va.selection(), pair.vr.selection());
    let c1x = pair.vx.cohomology(1);
    let c1a = pair.va.cohomology(1);
    let c2r = pair.vr.cohomology(2);
    let c2x = pair.vx.cohomology(2);
    let (n1, n2) = (complex.num_bonds(), complex.num_plaquettes());

    let mut report = Report::new("cohomology_exactness");
    report.push(
        Check::new("dimensions", true)
            .dim("H1(X)", c1x.dim())
            .dim("H1(A)", c1a.dim())
            .dim("H2(X,A)", c2r.dim())
            .dim("H2(X)", c2x.dim()),
    );
    let i = class_map(&c1x, &c1a, |t| Some(sa.restrict(1, &sx.lift(1, t, n1))));
    let delta = class_map(&c1a, &c2r, |t| {
        let tau = crate::complex::Chain::new(1, sa.lift(1, t, n1));
        let eta = complex.coboundary(&tau).expect("1-cochain").into_support();
        let on_a = sa.restrict(2, &eta);
        on_a.is_zero().then(|| sr.restrict(2, &eta))
    });
    let j = class_map(&c2r, &c2x, |e| Some(sx.restrict(2, &sr.lift(2, e, n2))));
    let (Some(i), Some(delta), Some(j)) = (
        map_or_fail(&mut report, "i^*", i),
        map_or_fail(&mut report, "coboundary", delta),
        map_or_fail(&mut report, "j^*", j),
    ) else {
        return report;
    };
    report.push(exactness_check("exact at H1(A)", &i, &delta));
    report.push(exactness_check("exact at H2(X,A)", &delta, &j));
    report
}
