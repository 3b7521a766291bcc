//! Every topology verifier on one coupling configuration.

use crate::complex::{CellComplex, Chain, Subcomplex};
use crate::disorder::{plaquette_frustration, BondConfig};
use crate::error::Error;

use super::report::Check;
use super::{
    frustration_class, link_mod2, verify_cohomology_exactness, verify_commutative_diagram, verify_duality, verify_homology_exactness,
    verify_universal_coefficients, Report,
};

/// Each H1(N+) basis loop that bounds a surface in the lattice links the
/// frustrated plaquettes an odd number of times exactly when phi = -1.
/// Loops bounding no surface (winding loops) are counted, not checked.
pub fn verify_linking(complex: &CellComplex, bonds: &BondConfig) -> Report {
    let nminus = plaquette_frustration(complex, bonds);
    let gamma = Chain::new(2, nminus.clone());
    let nplus = Subcomplex::from_plaquettes(complex, &nminus.not());
    let mut report = Report::new("linking");
    let class = match frustration_class(complex, bonds, &nplus) {
        Ok(c) => c,
        Err(e) => {
            report.push(Check::new("frustration class", false).detail(e.to_string()));
            return report;
        }
    };
    let (mut bounded, mut unbounded) = (0, 0);
    let mut check = Check::new("link(loop, N-) = [phi(loop) = -1]", true);
    for (lp, &phi) in class.basis.iter().zip(&class.basis_values) {
        match link_mod2(complex, lp, &gamma) {
            Ok(odd) => {
                bounded += 1;
                if odd != (phi == -1) {
                    check = check.fail("linking parity disagrees with phi", Some(lp.support()));
                }
            }
            Err(Error::NoSpanningSurface) => unbounded += 1,
            Err(e) => check = check.fail(e.to_string(), Some(lp.support())),
        }
    }
    report.push(check.dim("bounding", bounded).dim("no spanning surface", unbounded));
    report
}

/// Exact sequences of (N- u N+, N+), the commutative diagram, the
/// duality checks on N+, universal coefficients on N+, N- and the whole
/// lattice, and the linking check. `seed` drives the random gauges and
/// coboundaries.
pub fn verify_instance(complex: &CellComplex, bonds: &BondConfig, seed: u64) -> Report {
    let nminus = plaquette_frustration(complex, bonds);
    let nplus = nminus.not();
    let mut report = Report::new("verify");
    report.extend(verify_homology_exactness(complex, &nminus, &nplus));
    report.extend(verify_cohomology_exactness(complex, &nminus, &nplus));
    report.extend(verify_commutative_diagram(complex, bonds, &nminus, &nplus, seed));
    report.extend(verify_duality(complex, &nplus, seed));
    for (label, mask) in [("N+", &nplus), ("N-", &nminus)] {
        let mut r = verify_universal_coefficients(complex, &Subcomplex::from_plaquettes(complex, mask));
        r.name = format!("{}[{label}]", r.name);
        report.extend(r);
    }
    let mut r = verify_universal_coefficients(complex, &Subcomplex::full(complex));
    r.name = format!("{}[lattice]", r.name);
    report.extend(r);
    report.extend(verify_linking(complex, bonds));
    report
}
