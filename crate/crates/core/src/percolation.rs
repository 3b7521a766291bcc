//! Probability that a plaquette set is entirely unfrustrated, exactly and
//! by sampling, and cluster statistics of the unfrustration network and
//! of the negative bonds.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::CellComplex;
use crate::disorder::{plaquette_components, plaquette_frustration, sample_couplings_stream, sample_negative};
use crate::error::{Error, Result};
use crate::gf2::{BitVector, Gf2Matrix};
use crate::rng;
use crate::union_find::UnionFind;

/// Largest number of bonds in the closure of a plaquette set for exact
/// enumeration.
pub const EXACT_BOND_CAP: usize = 30;

/// Bonds on the boundary of at least one plaquette of the set.
pub fn closure_bonds(complex: &CellComplex, plaquettes: &BitVector) -> Vec<usize> {
    let mut bonds: Vec<usize> = plaquettes
        .ones_iter()
        .flat_map(|p| complex.faces(2, p).iter().map(|&b| b as usize))
        .collect();
    bonds.sort_unstable();
    bonds.dedup();
    bonds
}

/// Plaquette-by-bond incidence of the set, on its closure bonds.
fn incidence(complex: &CellComplex, plaquettes: &BitVector, bonds: &[usize]) -> Gf2Matrix {
    let rows = plaquettes
        .ones_iter()
        .map(|p| {
            BitVector::from_indices(
                bonds.len(),
                complex
                    .faces(2, p)
                    .iter()
                    .map(|&b| bonds.binary_search(&(b as usize)).expect("closure bond")),
            )
        })
        .collect();
    Gf2Matrix::from_rows(bonds.len(), rows)
}

/// Number of unfrustrating sign patterns on the closure bonds, by count of
/// negative bonds.
///
/// The patterns leaving every plaquette unfrustrated form the kernel of
/// the incidence matrix, which is walked in Gray-code order.
pub fn unfrustrated_weight_counts(complex: &CellComplex, plaquettes: &BitVector) -> Result<Vec<u64>> {
    let bonds = closure_bonds(complex, plaquettes);
    if bonds.len() > EXACT_BOND_CAP {
        return Err(Error::BondCapExceeded {
            bonds: bonds.len(),
            cap: EXACT_BOND_CAP,
        });
    }
    let basis: Vec<u32> = incidence(complex, plaquettes, &bonds)
        .kernel_basis()
        .iter()
        .map(|v| v.ones_iter().fold(0u32, |m, i| m | 1 << i))
        .collect();
    let mut counts = vec![0u64; bonds.len() + 1];
    let mut v = 0u32;
    counts[0] += 1;
    for t in 1u64..(1u64 << basis.len()) {
        v ^= basis[t.trailing_zeros() as usize];
        counts[v.count_ones() as usize] += 1;
    }
    Ok(counts)
}

/// Exact probability that every plaquette of the set is unfrustrated when
/// each bond is positive with probability `x`.
pub fn exact_prob_unfrustrated_rational(
    complex: &CellComplex,
    plaquettes: &BitVector,
    x: &BigRational,
) -> Result<BigRational> {
    if x < &BigRational::zero() || x > &BigRational::one() {
        return Err(Error::InvalidProbability(x.to_f64().unwrap_or(f64::NAN)));
    }
    let counts = unfrustrated_weight_counts(complex, plaquettes)?;
    let b = counts.len() - 1;
    let q = BigRational::one() - x;
    let mut total = BigRational::zero();
    for (w, &c) in counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let term = num_traits::pow(x.clone(), b - w) * num_traits::pow(q.clone(), w);
        total += term * BigRational::from_integer(BigInt::from(c));
    }
    Ok(total)
}

/// As [`exact_prob_unfrustrated_rational`], with `x` read as the exact
/// binary value of the double.
pub fn exact_prob_unfrustrated(complex: &CellComplex, plaquettes: &BitVector, x: f64) -> Result<f64> {
    let xr = BigRational::from_float(x).ok_or(Error::InvalidProbability(x))?;
    Ok(exact_prob_unfrustrated_rational(complex, plaquettes, &xr)?
        .to_f64()
        .expect("probability is finite"))
}

/// [2x(1-x)]^n.
pub fn lower_bound(x: f64, n: usize) -> f64 {
    (2.0 * x * (1.0 - x)).powi(n as i32)
}

pub fn lower_bound_rational(x: &BigRational, n: usize) -> BigRational {
    let two = BigRational::from_integer(BigInt::from(2));
    num_traits::pow(two * x * (BigRational::one() - x), n)
}

/// How a plaquette set can be built one plaquette at a time.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecompositionCheck {
    pub order: Vec<usize>,
    /// Bonds each added plaquette shares with those before it.
    pub shared: Vec<usize>,
    /// Every step shares at most two bonds.
    pub at_most_two_shared: bool,
    /// Rank of the plaquette-by-bond incidence.
    pub rank: usize,
    /// Prob = (1/2)^n at x = 1/2 exactly when the plaquette boundaries are
    /// independent.
    pub half_power_exact: bool,
}

/// Orders the plaquettes greedily, each step taking a plaquette that
/// shares the fewest bonds with those already placed (ties: touching the
/// placed set first, then lowest index).
pub fn decomposition_check(complex: &CellComplex, plaquettes: &BitVector) -> DecompositionCheck {
    let mut left = plaquettes.indices();
    let mut used = BitVector::zeros(complex.num_bonds());
    let mut order = Vec::with_capacity(left.len());
    let mut shared = Vec::with_capacity(left.len());
    while !left.is_empty() {
        let (pos, s) = left
            .iter()
            .enumerate()
            .map(|(i, &p)| {
                let s = complex.faces(2, p).iter().filter(|&&b| used.get(b as usize)).count();
                let touches = order.is_empty() || s > 0;
                ((usize::from(!touches), s, p), i)
            })
            .min()
            .map(|((_, s, _), i)| (i, s))
            .expect("nonempty");
        let p = left.remove(pos);
        for &b in complex.faces(2, p) {
            used.set(b as usize, true);
        }
        order.push(p);
        shared.push(s);
    }
    let bonds = closure_bonds(complex, plaquettes);
    let rank = incidence(complex, plaquettes, &bonds).rank();
    DecompositionCheck {
        at_most_two_shared: shared.iter().all(|&s| s <= 2),
        half_power_exact: rank == order.len(),
        order,
        shared,
        rank,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClusterMode {
    UnfrustratedPlaquettes,
    NegativeBonds,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PercolationReport {
    pub x: f64,
    pub trials: u64,
    /// Plaquettes in the set, or (cluster mode) plaquettes or bonds of the
    /// lattice.
    pub n: usize,
    /// Fraction of trials with the event: all plaquettes unfrustrated, or
    /// (cluster mode) a cluster meeting every slice along the first axis.
    pub estimate: f64,
    pub stderr: f64,
    /// [2x(1-x)]^n, probability mode only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    /// Cluster size to number of clusters, summed over trials.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub cluster_histogram: BTreeMap<usize, u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub largest_fraction: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub largest_fraction_stderr: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

fn binomial_stderr(p: f64, trials: u64) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}

fn check_x(x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidProbability(x));
    }
    Ok(())
}

/// Monte-Carlo estimate of the probability that every plaquette in the
/// set is unfrustrated. Trial t draws the closure bonds, in increasing
/// index order, from stream t of `seed`.
pub fn mc_prob_unfrustrated(
    complex: &CellComplex,
    plaquettes: &BitVector,
    x: f64,
    trials: u64,
    seed: u64,
) -> Result<PercolationReport> {
    check_x(x)?;
    if trials == 0 {
        return Err(Error::Malformed("trials must be at least 1".into()));
    }
    let bonds = closure_bonds(complex, plaquettes);
    let faces: Vec<Vec<usize>> = plaquettes
        .ones_iter()
        .map(|p| {
            complex
                .faces(2, p)
                .iter()
                .map(|&b| bonds.binary_search(&(b as usize)).expect("closure bond"))
                .collect()
        })
        .collect();
    let hits: u64 = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut r = rng::stream(seed, t);
            let neg = sample_negative(&mut r, bonds.len(), x);
            let ok = faces
                .iter()
                .all(|f| f.iter().filter(|&&i| neg.get(i)).count() % 2 == 0);
            u64::from(ok)
        })
        .sum();
    let estimate = hits as f64 / trials as f64;
    let n = faces.len();
    Ok(PercolationReport {
        x,
        trials,
        n,
        estimate,
        stderr: binomial_stderr(estimate, trials),
        bound: Some(lower_bound(x, n)),
        cluster_histogram: BTreeMap::new(),
        largest_fraction: None,
        largest_fraction_stderr: None,
        notes: Vec::new(),
    })
}

struct TrialStats {
    spans: u64,
    largest: u64,
    largest_sq: u128,
    histogram: BTreeMap<usize, u64>,
}

impl TrialStats {
    fn merge(mut self, other: TrialStats) -> TrialStats {
        self.spans += other.spans;
        self.largest += other.largest;
        self.largest_sq += other.largest_sq;
        for (k, v) in other.histogram {
            *self.histogram.entry(k).or_insert(0) += v;
        }
        self
    }

    fn empty() -> TrialStats {
        TrialStats {
            spans: 0,
            largest: 0,
            largest_sq: 0,
            histogram: BTreeMap::new(),
        }
    }
}

/// Whether the sites of a cluster meet every position along axis 0.
fn spans_axis0(complex: &CellComplex, sites: impl Iterator<Item = usize>) -> bool {
    let len = complex.lattice().points(0);
    let mut seen = vec![false; len];
    for s in sites {
        seen[complex.site_coords(s)[0]] = true;
    }
    seen.iter().all(|&b| b)
}

/// Per trial t: couplings from stream t of `seed`, the chosen network
/// split into clusters (plaquettes joined at a shared lattice point, or
/// negative bonds joined at a shared site), and the cluster sizes.
pub fn cluster_scan(
    complex: &CellComplex,
    x: f64,
    trials: u64,
    seed: u64,
    mode: ClusterMode,
) -> Result<PercolationReport> {
    check_x(x)?;
    if trials == 0 {
        return Err(Error::Malformed("trials must be at least 1".into()));
    }
    let total = match mode {
        ClusterMode::UnfrustratedPlaquettes => complex.num_plaquettes(),
        ClusterMode::NegativeBonds => complex.num_bonds(),
    };
    let per_trial = |t: u64| -> TrialStats {
        let bonds = sample_couplings_stream(complex, x, 1.0, seed, t).expect("x checked");
        let (clusters, site_sets): (Vec<usize>, Vec<Vec<usize>>) = match mode {
            ClusterMode::UnfrustratedPlaquettes => {
                let plus = plaquette_frustration(complex, &bonds).not();
                plaquette_components(complex, &plus)
                    .into_iter()
                    .map(|c| {
                        let mut sites: Vec<usize> = c.iter().flat_map(|&p| complex.vertices(2, p)).collect();
                        sites.sort_unstable();
                        sites.dedup();
                        (c.len(), sites)
                    })
                    .unzip()
            }
            ClusterMode::NegativeBonds => {
                let mut uf = UnionFind::new(complex.num_sites());
                for b in bonds.negative().ones_iter() {
                    let (u, v) = complex.bond_sites(b);
                    uf.union(u, v);
                }
                let mut members: BTreeMap<usize, (usize, Vec<usize>)> = BTreeMap::new();
                for b in bonds.negative().ones_iter() {
                    let (u, v) = complex.bond_sites(b);
                    let e = members.entry(uf.find(u)).or_default();
                    e.0 += 1;
                    e.1.push(u);
                    e.1.push(v);
                }
                members.into_values().unzip()
            }
        };
        let largest = clusters.iter().copied().max().unwrap_or(0) as u64;
        let spans = site_sets
            .into_iter()
            .any(|s| spans_axis0(complex, s.into_iter()));
        let mut histogram = BTreeMap::new();
        for c in clusters {
            *histogram.entry(c).or_insert(0) += 1;
        }
        TrialStats {
            spans: u64::from(spans),
            largest,
            largest_sq: (largest as u128) * (largest as u128),
            histogram,
        }
    };
    let stats = (0..trials)
        .into_par_iter()
        .map(per_trial)
        .reduce(TrialStats::empty, TrialStats::merge);

    let nt = trials as f64;
    let estimate = stats.spans as f64 / nt;
    let tot = total.max(1) as f64;
    let mean = stats.largest as f64 / nt / tot;
    let second = stats.largest_sq as f64 / nt / (tot * tot);
    let var = (second - mean * mean).max(0.0);
    let mut notes = Vec::new();
    if mode == ClusterMode::UnfrustratedPlaquettes && x == 0.0 {
        notes.push("all couplings negative: every plaquette has four negative bonds and is unfrustrated".into());
    }
    Ok(PercolationReport {
        x,
        trials,
        n: total,
        estimate,
        stderr: binomial_stderr(estimate, trials),
        bound: None,
        cluster_histogram: stats.histogram,
        largest_fraction: Some(mean),
        largest_fraction_stderr: Some((var / nt).sqrt()),
        notes,
    })
}
