//! Exhaustive ground-state search with Gray-code updates, split across
//! threads by spin prefix.

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::complex::CellComplex;
use crate::disorder::{BondConfig, SpinConfig};
use crate::error::{Error, Result};
use crate::gf2::BitVector;

pub const DEFAULT_SITE_CAP: usize = 24;
/// Upper limit for any cap passed in.
pub const HARD_SITE_CAP: usize = 40;

/// Free spins enumerated inside one parallel task.
const CHUNK_BITS: usize = 14;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroundStateResult {
    /// Ground-state energy in units of J0.
    pub energy: i64,
    pub j0: f64,
    pub degeneracy: u64,
    /// Minimizers with the lowest enumerated site up, in lexicographic
    /// order of their bit strings, followed by their flips in the same
    /// order.
    #[serde(serialize_with = "as_bit_strings")]
    pub states: Vec<SpinConfig>,
    /// Sites that were enumerated; the flips act on these only.
    #[serde(skip)]
    pub sites: Vec<usize>,
}

fn as_bit_strings<S: Serializer>(states: &[SpinConfig], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(states.iter().map(SpinConfig::to_bit_string))
}

impl GroundStateResult {
    pub fn energy_value(&self) -> f64 {
        self.energy as f64 * self.j0
    }

    /// The states with the lowest enumerated site up.
    pub fn canonical(&self) -> &[SpinConfig] {
        &self.states[..self.states.len() / 2]
    }

    pub fn contains(&self, spins: &SpinConfig) -> bool {
        self.states.contains(spins)
    }
}

struct Problem {
    n: usize,
    /// Per local site: (neighbour, bond is negative).
    adj: Vec<Vec<(usize, bool)>>,
    edges: Vec<(usize, usize, bool)>,
}

impl Problem {
    fn unsatisfied(&self, mask: u64) -> u32 {
        self.edges
            .iter()
            .filter(|&&(u, v, neg)| ((mask >> u ^ mask >> v) & 1 == 1) != neg)
            .count() as u32
    }

    fn flip_delta(&self, mask: u64, s: usize) -> i32 {
        let mut d = 0;
        for &(nb, neg) in &self.adj[s] {
            let unsat = ((mask >> s ^ mask >> nb) & 1 == 1) != neg;
            d += if unsat { -1 } else { 1 };
        }
        d
    }

    /// Minimum over configurations `prefix << low_bits | g` (shifted past
    /// the fixed first site) and all minimizing masks.
    fn scan(&self, prefix: u64, low_bits: usize) -> (u32, Vec<u64>) {
        let mut mask = (prefix << low_bits) << 1;
        let mut cur = self.unsatisfied(mask) as i64;
        let mut best = cur;
        let mut found = vec![mask];
        for t in 1u64..(1u64 << low_bits) {
            let s = t.trailing_zeros() as usize + 1;
            cur += self.flip_delta(mask, s) as i64;
            mask ^= 1 << s;
            if cur < best {
                best = cur;
                found.clear();
                found.push(mask);
            } else if cur == best {
                found.push(mask);
            }
        }
        (best as u32, found)
    }
}

fn solve(
    complex: &CellComplex,
    bonds: &BondConfig,
    sites: Vec<usize>,
    bond_list: &[usize],
    cap: usize,
) -> Result<GroundStateResult> {
    bonds.check(complex)?;
    let limit = cap.min(HARD_SITE_CAP);
    if sites.len() > limit {
        return Err(Error::CapExceeded {
            sites: sites.len(),
            cap: limit,
        });
    }
    let n = sites.len();
    let m = bond_list.len() as i64;
    if n == 0 {
        return Ok(GroundStateResult {
            energy: -m,
            j0: bonds.j0(),
            degeneracy: 1,
            states: vec![SpinConfig::all_up(complex.num_sites())],
            sites,
        });
    }
    let mut local = vec![usize::MAX; complex.num_sites()];
    for (i, &s) in sites.iter().enumerate() {
        local[s] = i;
    }
    let mut adj = vec![Vec::new(); n];
    let mut edges = Vec::with_capacity(bond_list.len());
    for &b in bond_list {
        let (u, v) = complex.bond_sites(b);
        let (lu, lv) = (local[u], local[v]);
        let neg = bonds.is_negative(b);
        adj[lu].push((lv, neg));
        adj[lv].push((lu, neg));
        edges.push((lu, lv, neg));
    }
    let problem = Problem { n, adj, edges };
    let free = problem.n - 1;
    let low = free.min(CHUNK_BITS);
    let high = free - low;
    let parts: Vec<(u32, Vec<u64>)> = (0..1u64 << high)
        .into_par_iter()
        .map(|p| problem.scan(p, low))
        .collect();
    let best = parts.iter().map(|p| p.0).min().expect("at least one chunk");
    let mut masks: Vec<u64> = parts
        .into_iter()
        .filter(|p| p.0 == best)
        .flat_map(|p| p.1)
        .collect();
    // lexicographic order of bit strings: site 0 is the most significant
    masks.sort_unstable_by_key(|&mk| mk.reverse_bits());
    let to_config = |mk: u64| {
        let mut down = BitVector::zeros(complex.num_sites());
        for (i, &s) in sites.iter().enumerate() {
            if mk >> i & 1 == 1 {
                down.set(s, true);
            }
        }
        SpinConfig::from_down(down)
    };
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut states: Vec<SpinConfig> = masks.iter().map(|&mk| to_config(mk)).collect();
    states.extend(masks.iter().map(|&mk| to_config(mk ^ full)));
    Ok(GroundStateResult {
        energy: 2 * best as i64 - m,
        j0: bonds.j0(),
        degeneracy: states.len() as u64,
        states,
        sites,
    })
}

/// All ground states of the full lattice Hamiltonian.
pub fn brute_force_ground_states(complex: &CellComplex, bonds: &BondConfig, site_cap: usize) -> Result<GroundStateResult> {
    let bond_list: Vec<usize> = (0..complex.num_bonds()).collect();
    solve(complex, bonds, (0..complex.num_sites()).collect(), &bond_list, site_cap)
}

/// All ground states of the Hamiltonian restricted to the bonds of
/// `region`, enumerating only the sites those bonds touch. Other sites
/// stay up in every returned state.
pub fn brute_force_region(
    complex: &CellComplex,
    bonds: &BondConfig,
    region: &BitVector,
    site_cap: usize,
) -> Result<GroundStateResult> {
    if region.len() != complex.num_bonds() {
        return Err(Error::SizeMismatch {
            what: "bond region",
            got: region.len(),
            expected: complex.num_bonds(),
        });
    }
    let sites = super::region_sites(complex, region).indices();
    solve(complex, bonds, sites, &region.indices(), site_cap)
}
