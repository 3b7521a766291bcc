//! Pass/fail reports for the verifiers.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::gf2::{BitVector, Gf2Matrix};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub dims: BTreeMap<String, usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    /// Sorted indices of a violating vector or chain.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<usize>>,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool) -> Self {
        Check {
            name: name.into(),
            passed,
            dims: BTreeMap::new(),
            detail: None,
            witness: None,
        }
    }

    pub fn dim(mut self, key: &str, value: usize) -> Self {
        self.dims.insert(key.to_string(), value);
        self
    }

    pub fn detail(mut self, text: impl Into<String>) -> Self {
        self.detail = Some(text.into());
        self
    }

    pub fn witness(mut self, w: &BitVector) -> Self {
        self.witness = Some(w.indices());
        self
    }

    pub fn fail(mut self, text: impl Into<String>, w: Option<&BitVector>) -> Self {
        self.passed = false;
        self.detail = Some(text.into());
        if let Some(w) = w {
            self.witness = Some(w.indices());
        }
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub name: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(name: impl Into<String>) -> Self {
        Report {
            name: name.into(),
            passed: true,
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, check: Check) {
        self.passed &= check.passed;
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: Report) {
        for c in other.checks {
            self.push(Check {
                name: format!("{}/{}", other.name, c.name),
                ..c
            });
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Exactness of U --f--> V --g--> W at V, with f and g given as matrices
/// in chosen bases: g f = 0, rank f + rank g = dim V, and every kernel
/// vector of g solved for a preimage under f.
pub fn exactness_check(name: &str, f: &Gf2Matrix, g: &Gf2Matrix) -> Check {
    let dim_v = f.rows();
    assert_eq!(g.cols(), dim_v, "maps do not compose");
    let rank_f = f.rank();
    let rank_g = g.rank();
    let mut check = Check::new(name, true)
        .dim("dim", dim_v)
        .dim("rank_in", rank_f)
        .dim("rank_out", rank_g);
    let gf = g.mul(f);
    if let Some(j) = (0..gf.cols()).find(|&j| !gf.column(j).is_zero()) {
        return check.fail("composite map is nonzero", Some(&f.column(j)));
    }
    for k in g.kernel_basis() {
        if f.solve(&k).is_none() {
            return check.fail("kernel element outside the image", Some(&k));
        }
    }
    if rank_f + rank_g != dim_v {
        check = check.fail("rank identity fails", None);
    }
    check
}

/// Injectivity (`rank = cols`) of a matrix.
pub fn injective_check(name: &str, m: &Gf2Matrix) -> Check {
    let r = m.rank();
    let c = Check::new(name, r == m.cols())
        .dim("rank", r)
        .dim("domain", m.cols());
    if c.passed {
        c
    } else {
        let k = m.kernel_basis().remove(0);
        c.fail("nonzero kernel", Some(&k))
    }
}

/// Surjectivity (`rank = rows`) of a matrix.
pub fn surjective_check(name: &str, m: &Gf2Matrix) -> Check {
    let r = m.rank();
    let c = Check::new(name, r == m.rows())
        .dim("rank", r)
        .dim("codomain", m.rows());
    if c.passed {
        c
    } else {
        c.fail("image is a proper subspace", None)
    }
}
