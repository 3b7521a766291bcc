//! The commutative diagram linking frustration classes to wall
//! boundaries, and the duality between H^1(N+) and wall classes.

use crate::complex::{CellComplex, Chain, Subcomplex};
use crate::disorder::{site_coboundary, BondConfig};
use crate::gf2::{BitVector, Gf2Matrix};
use crate::rng;
use crate::topology::homology::{CellSelection, ChainView, DualView};
use crate::topology::maps::{cube_violation, vartheta};
use crate::topology::report::{Check, Report};

fn random_sites(complex: &CellComplex, seed: u64, index: u64) -> BitVector {
    let mut r = rng::stream(seed, index);
    BitVector::from_bools((0..complex.num_sites()).map(|_| rng::coin(&mut r)))
}

/// Checks, for every basis class of H^1(N+) and for phi restricted to
/// N+, that the two routes around the diagram agree:
///
/// * route A extends the cocycle by zero off N+, takes its coboundary
///   and reads off the dual (d-2)-complex on N-;
/// * route B gauge-shifts the cocycle on N+, builds its walls and takes
///   their geometric boundary.
///
/// Agreement is tested in the dual homology of N- relative to the lattice
/// boundary: the difference must be the dual boundary of bonds outside
/// N+.
pub fn verify_commutative_diagram(
    complex: &CellComplex,
    bonds: &BondConfig,
    nminus: &BitVector,
    nplus: &BitVector,
    gauge_seed: u64,
) -> Report {
    let mut report = Report::new("commutative_diagram");
    let x = Subcomplex::from_plaquettes(complex, &nminus.or(nplus));
    let a = Subcomplex::from_plaquettes(complex, nplus);
    let va = ChainView::absolute(complex, &a);
    let sel_r = CellSelection::relative(&x, &a).expect("N+ lies in N- u N+");
    let dual_r = sel_r.dual_boundary_matrix(complex, 1);
    let n1 = complex.num_bonds();

    let h1 = va.cohomology(1);
    let mut elements: Vec<(String, BitVector)> = h1
        .representatives()
        .iter()
        .enumerate()
        .map(|(i, r)| (format!("basis {i}"), va.selection().lift(1, r, n1)))
        .collect();
    elements.push(("phi on N+".into(), bonds.negative().and(a.mask(1))));
    elements.push(("zero".into(), BitVector::zeros(n1)));
    report.push(Check::new("H1(N+)", true).dim("dim", h1.dim()));

    for (i, (name, tau)) in elements.iter().enumerate() {
        let tau_chain = Chain::new(1, tau.clone());
        let eta = complex.coboundary(&tau_chain).expect("1-cochain").into_support();
        if !eta.and(a.mask(2)).is_zero() {
            report.push(Check::new(name.as_str(), false).fail("not a cocycle on N+", Some(tau)));
            continue;
        }
        let gamma_a = sel_r.restrict(2, &eta);

        let eps = random_sites(complex, gauge_seed, i as u64);
        let shifted = tau.xor(&site_coboundary(complex, &eps).and(a.mask(1)));
        let walls = match vartheta(complex, &a, &Chain::new(1, shifted)) {
            Ok(w) => w,
            Err(e) => {
                report.push(Check::new(name.as_str(), false).fail(format!("walls: {e}"), None));
                continue;
            }
        };
        let mut wall_bd = BitVector::zeros(complex.num_plaquettes());
        for b in &walls.boundaries {
            wall_bd.xor_assign(b.support());
        }
        let mut check = Check::new(name.as_str(), true)
            .dim("walls", walls.len())
            .dim("route_a", gamma_a.count_ones());
        if !wall_bd.and(a.mask(2)).is_zero() {
            report.push(check.fail("wall boundary meets N+", Some(&wall_bd)));
            continue;
        }
        let gamma_b = sel_r.restrict(2, &wall_bd);
        check = check.dim("route_b", gamma_b.count_ones());
        if let Some(c) = [&eta, &wall_bd].into_iter().find_map(|e| cube_violation(complex, e)) {
            report.push(check.fail(format!("odd cube {c}"), None));
            continue;
        }
        let diff = gamma_a.xor(&gamma_b);
        if dual_r.solve(&diff).is_none() {
            check = check.fail("routes differ by a nontrivial class", Some(&sel_r.lift(2, &diff, complex.num_plaquettes())));
        }
        report.push(check);
    }
    report
}

/// Dimension match between H^1(N+) and dual wall classes of N+ relative
/// to its boundary, independence of the walls of a cocycle basis, gauge
/// invariance of the wall class and injectivity on random coboundaries.
pub fn verify_duality(complex: &CellComplex, nplus: &BitVector, seed: u64) -> Report {
    let mut report = Report::new("duality");
    let a = Subcomplex::from_plaquettes(complex, nplus);
    let va = ChainView::absolute(complex, &a);
    let sel = va.selection().clone();
    let dual = DualView::new(complex, sel.clone());
    let d = complex.d();
    let n1 = complex.num_bonds();
    let h1 = va.cohomology(1);
    let hw = dual.homology(d - 1);
    let site_bond = sel.dual_boundary_matrix(complex, 0);

    report.push(
        Check::new("dimension match", h1.dim() == hw.dim())
            .dim("H1(N+)", h1.dim())
            .dim("H_{d-1}(N+*)", hw.dim()),
    );

    let wall_coords = |tau: &BitVector| -> Result<(BitVector, BitVector), String> {
        let walls = vartheta(complex, &a, &Chain::new(1, tau.clone())).map_err(|e| e.to_string())?;
        let local = sel.restrict(1, &walls.union(n1));
        let c = hw.coords(&local).ok_or("wall set is not a dual cycle")?;
        Ok((local, c))
    };

    let mut cols = Vec::with_capacity(h1.dim());
    for (i, rep) in h1.representatives().iter().enumerate() {
        let tau = sel.lift(1, rep, n1);
        let (local, coords) = match wall_coords(&tau) {
            Ok(x) => x,
            Err(e) => {
                report.push(Check::new(format!("basis {i}"), false).fail(e, Some(&tau)));
                return report;
            }
        };
        let eps = random_sites(complex, seed, i as u64);
        let shifted = tau.xor(&site_coboundary(complex, &eps).and(a.mask(1)));
        let mut check = Check::new(format!("gauge invariance {i}"), true);
        match wall_coords(&shifted) {
            Ok((local2, coords2)) => {
                if coords2 != coords {
                    check = check.fail("gauge shift changes the wall class", Some(&shifted));
                } else if site_bond.solve(&local.xor(&local2)).is_none() {
                    check = check.fail("no bounding region between the two wall sets", Some(&shifted));
                }
            }
            Err(e) => check = check.fail(e, Some(&shifted)),
        }
        report.push(check);
        cols.push(coords);
    }
    let m = Gf2Matrix::from_columns(hw.dim(), &cols);
    let rank = m.rank();
    report.push(
        Check::new("walls of a basis are independent", rank == h1.dim())
            .dim("rank", rank)
            .dim("basis", h1.dim()),
    );

    for t in 0..4u64 {
        let eps = random_sites(complex, seed, 1_000_000 + t);
        let sigma = site_coboundary(complex, &eps).and(a.mask(1));
        let local = sel.restrict(1, &sigma);
        let mut check = Check::new(format!("injectivity {t}"), true);
        match wall_coords(&sigma) {
            Ok((_, coords)) if !coords.is_zero() => {
                check = check.fail("coboundary has a nonzero wall class", Some(&sigma));
            }
            Ok(_) => match site_bond.solve(&local) {
                Some(v) => {
                    let back = site_coboundary(complex, &sel.lift(0, &v, complex.num_sites())).and(a.mask(1));
                    if back != sigma {
                        check = check.fail("recovered region does not reproduce the cocycle", Some(&sigma));
                    }
                }
                None => check = check.fail("no gauge found for a trivial wall class", Some(&sigma)),
            },
            Err(e) => check = check.fail(e, Some(&sigma)),
        }
        report.push(check);
    }
    report
}
