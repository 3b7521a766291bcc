//! Coupling signs, spin configurations, frustration and the split of the
//! plaquettes into frustration (N-) and unfrustration (N+) networks.

use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine;
use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::complex::{CellComplex, Chain};
use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::matching::maximum_matching;
use crate::rng;
use crate::union_find::UnionFind;

/// Pair covers with more frustrated plaquettes than this keep the greedy
/// matching without blossom augmentation.
pub const PAIR_COVER_AUGMENT_CAP: usize = 4096;

/// Where a sampled configuration came from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub stream: u64,
    pub x: f64,
}

/// Signs of the couplings J_ij = sign * J0, one per bond.
///
/// Stored as the set of negative bonds.
#[derive(Clone, Debug, PartialEq)]
pub struct BondConfig {
    negative: BitVector,
    j0: f64,
    provenance: Option<Provenance>,
}

impl BondConfig {
    pub fn new(negative: BitVector, j0: f64) -> Result<Self> {
        if !(j0 > 0.0 && j0.is_finite()) {
            return Err(Error::InvalidMagnitude(j0));
        }
        Ok(BondConfig {
            negative,
            j0,
            provenance: None,
        })
    }

    pub fn all_positive(complex: &CellComplex) -> Self {
        BondConfig {
            negative: BitVector::zeros(complex.num_bonds()),
            j0: 1.0,
            provenance: None,
        }
    }

    pub fn from_negative_bonds<I: IntoIterator<Item = usize>>(complex: &CellComplex, bonds: I) -> Self {
        BondConfig {
            negative: BitVector::from_indices(complex.num_bonds(), bonds),
            j0: 1.0,
            provenance: None,
        }
    }

    /// Builds from explicit signs (each must be +1 or -1).
    pub fn from_signs(signs: &[i8], j0: f64) -> Result<Self> {
        if let Some(&bad) = signs.iter().find(|&&s| s != 1 && s != -1) {
            return Err(Error::Malformed(format!("coupling sign {bad}")));
        }
        Self::new(BitVector::from_bools(signs.iter().map(|&s| s < 0)), j0)
    }

    pub fn with_provenance(mut self, p: Provenance) -> Self {
        self.provenance = Some(p);
        self
    }

    pub fn len(&self) -> usize {
        self.negative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.negative.is_empty()
    }

    pub fn j0(&self) -> f64 {
        self.j0
    }

    pub fn provenance(&self) -> Option<Provenance> {
        self.provenance
    }

    pub fn negative(&self) -> &BitVector {
        &self.negative
    }

    pub fn is_negative(&self, bond: usize) -> bool {
        self.negative.get(bond)
    }

    pub fn sign(&self, bond: usize) -> i8 {
        if self.negative.get(bond) {
            -1
        } else {
            1
        }
    }

    pub fn signs(&self) -> Vec<i8> {
        (0..self.len()).map(|b| self.sign(b)).collect()
    }

    pub fn check(&self, complex: &CellComplex) -> Result<()> {
        if self.len() != complex.num_bonds() {
            return Err(Error::SizeMismatch {
                what: "bond signs",
                got: self.len(),
                expected: complex.num_bonds(),
            });
        }
        Ok(())
    }

    /// Same signs with a different negative set (provenance dropped).
    pub fn with_negative(&self, negative: BitVector) -> Self {
        assert_eq!(negative.len(), self.len());
        BondConfig {
            negative,
            j0: self.j0,
            provenance: None,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct BondConfigRepr {
    j0: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    stream: Option<u64>,
    n_bonds: usize,
    signs: String,
}

impl Serialize for BondConfig {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        BondConfigRepr {
            j0: self.j0,
            x: self.provenance.map(|p| p.x),
            seed: self.provenance.map(|p| p.seed),
            stream: self.provenance.map(|p| p.stream),
            n_bonds: self.len(),
            signs: B64.encode(self.negative.to_bytes()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BondConfig {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = BondConfigRepr::deserialize(d)?;
        let bytes = B64.decode(r.signs.as_bytes()).map_err(D::Error::custom)?;
        let negative = BitVector::from_bytes(r.n_bonds, &bytes)
            .ok_or_else(|| D::Error::custom("sign payload does not match n_bonds"))?;
        let mut cfg = BondConfig::new(negative, r.j0).map_err(D::Error::custom)?;
        if let (Some(seed), Some(x)) = (r.seed, r.x) {
            cfg.provenance = Some(Provenance {
                seed,
                stream: r.stream.unwrap_or(0),
                x,
            });
        }
        Ok(cfg)
    }
}

/// Spins sigma_i = +1 or -1, stored as the set of down (-1) sites.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinConfig {
    down: BitVector,
}

impl SpinConfig {
    pub fn all_up(n: usize) -> Self {
        SpinConfig {
            down: BitVector::zeros(n),
        }
    }

    pub fn from_down(down: BitVector) -> Self {
        SpinConfig { down }
    }

    pub fn from_signs(values: &[i8]) -> Result<Self> {
        if let Some(&bad) = values.iter().find(|&&s| s != 1 && s != -1) {
            return Err(Error::Malformed(format!("spin value {bad}")));
        }
        Ok(SpinConfig {
            down: BitVector::from_bools(values.iter().map(|&s| s < 0)),
        })
    }

    pub fn len(&self) -> usize {
        self.down.len()
    }

    pub fn is_empty(&self) -> bool {
        self.down.is_empty()
    }

    pub fn down(&self) -> &BitVector {
        &self.down
    }

    pub fn value(&self, site: usize) -> i8 {
        if self.down.get(site) {
            -1
        } else {
            1
        }
    }

    pub fn set(&mut self, site: usize, value: i8) {
        self.down.set(site, value < 0);
    }

    pub fn flip_site(&mut self, site: usize) {
        self.down.toggle(site);
    }

    /// Global spin flip.
    pub fn flipped(&self) -> SpinConfig {
        SpinConfig {
            down: self.down.not(),
        }
    }

    pub fn flip_region(&self, sites: &[usize]) -> SpinConfig {
        let mut out = self.clone();
        for &s in sites {
            out.down.toggle(s);
        }
        out
    }

    /// One character per site: `1` for down, `0` for up.
    pub fn to_bit_string(&self) -> String {
        (0..self.len())
            .map(|i| if self.down.get(i) { '1' } else { '0' })
            .collect()
    }

    pub fn check(&self, complex: &CellComplex) -> Result<()> {
        if self.len() != complex.num_sites() {
            return Err(Error::SizeMismatch {
                what: "spins",
                got: self.len(),
                expected: complex.num_sites(),
            });
        }
        Ok(())
    }
}

impl Serialize for SpinConfig {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_bit_string())
    }
}

/// Bonds with exactly one endpoint in `sites` (the coboundary of a 0-chain).
pub fn site_coboundary(complex: &CellComplex, sites: &BitVector) -> BitVector {
    BitVector::from_bools((0..complex.num_bonds()).map(|b| {
        let (u, v) = complex.bond_sites(b);
        sites.get(u) != sites.get(v)
    }))
}

/// Independent signs, positive with probability `x`, from stream 0 of `seed`.
pub fn sample_couplings(complex: &CellComplex, x: f64, j0: f64, seed: u64) -> Result<BondConfig> {
    sample_couplings_stream(complex, x, j0, seed, 0)
}

/// As [`sample_couplings`] with an explicit stream (trial) index. Bond `b`
/// consumes the `b`-th draw of the stream.
pub fn sample_couplings_stream(
    complex: &CellComplex,
    x: f64,
    j0: f64,
    seed: u64,
    stream: u64,
) -> Result<BondConfig> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidProbability(x));
    }
    let mut r = rng::stream(seed, stream);
    let negative = sample_negative(&mut r, complex.num_bonds(), x);
    Ok(BondConfig::new(negative, j0)?.with_provenance(Provenance { seed, stream, x }))
}

pub(crate) fn sample_negative<R: RngCore>(r: &mut R, n: usize, x: f64) -> BitVector {
    BitVector::from_bools((0..n).map(|_| rng::unit_f64(r) >= x))
}

/// phi(loop) = product of the signs on the loop, as +1 or -1.
pub fn frustration_of_loop(complex: &CellComplex, bonds: &BondConfig, lp: &Chain) -> Result<i8> {
    bonds.check(complex)?;
    if lp.dim() != 1 {
        return Err(Error::Dimension {
            got: lp.dim(),
            expected: "a loop is a 1-chain",
        });
    }
    if !complex.boundary(lp)?.is_empty() {
        return Err(Error::NotACycle);
    }
    Ok(if lp.support().dot(bonds.negative()) { -1 } else { 1 })
}

/// Bit p set iff plaquette p has an odd number of negative bonds.
pub fn plaquette_frustration(complex: &CellComplex, bonds: &BondConfig) -> BitVector {
    BitVector::from_bools((0..complex.num_plaquettes()).map(|p| {
        complex
            .faces(2, p)
            .iter()
            .filter(|&&b| bonds.is_negative(b as usize))
            .count()
            % 2
            == 1
    }))
}

/// Connected components of a plaquette set, two plaquettes being connected
/// when they share at least one lattice point.
pub fn plaquette_components(complex: &CellComplex, plaquettes: &BitVector) -> Vec<Vec<usize>> {
    let mut uf = UnionFind::new(complex.num_plaquettes());
    let mut first = vec![usize::MAX; complex.num_sites()];
    for p in plaquettes.ones_iter() {
        for v in complex.vertices(2, p) {
            if first[v] == usize::MAX {
                first[v] = p;
            } else {
                uf.union(first[v], p);
            }
        }
    }
    uf.groups(plaquettes.ones_iter())
}

/// Two frustrated plaquettes sharing one bond.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Pair {
    pub first: usize,
    pub second: usize,
    pub common_bond: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairCover {
    pub pairs: Vec<Pair>,
    pub unmatched: Vec<usize>,
}

impl PairCover {
    pub fn is_complete(&self) -> bool {
        self.unmatched.is_empty()
    }

    pub fn common_bonds(&self, n_bonds: usize) -> BitVector {
        BitVector::from_indices(n_bonds, self.pairs.iter().map(|p| p.common_bond))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetworkSplit {
    pub frustrated: BitVector,
    pub unfrustrated: BitVector,
    pub components_plus: Vec<Vec<usize>>,
    pub components_minus: Vec<Vec<usize>>,
    pub pair_cover: PairCover,
    /// Bonds of frustrated plaquettes other than the common bonds of pairs.
    pub bplus_bonds: BitVector,
}

/// Frustrated plaquettes sharing a bond, paired by maximum matching.
pub fn pair_cover(complex: &CellComplex, frustrated: &BitVector) -> PairCover {
    let nodes: Vec<usize> = frustrated.indices();
    let mut local = vec![usize::MAX; complex.num_plaquettes()];
    for (i, &p) in nodes.iter().enumerate() {
        local[p] = i;
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
    for (i, &p) in nodes.iter().enumerate() {
        for &b in complex.faces(2, p) {
            for &q in complex.cofaces(1, b as usize) {
                let q = q as usize;
                if q != p && frustrated.get(q) {
                    adj[i].push(local[q]);
                }
            }
        }
        adj[i].sort_unstable();
        adj[i].dedup();
    }
    let mate = maximum_matching(&adj, PAIR_COVER_AUGMENT_CAP);
    let mut pairs = Vec::new();
    let mut unmatched = Vec::new();
    for (i, m) in mate.iter().enumerate() {
        match *m {
            None => unmatched.push(nodes[i]),
            Some(j) if i < j => {
                let (p, q) = (nodes[i], nodes[j]);
                let common = complex
                    .faces(2, p)
                    .iter()
                    .copied()
                    .find(|b| complex.faces(2, q).contains(b))
                    .expect("matched plaquettes share a bond");
                pairs.push(Pair {
                    first: p,
                    second: q,
                    common_bond: common as usize,
                });
            }
            Some(_) => {}
        }
    }
    PairCover { pairs, unmatched }
}

pub fn split_networks(complex: &CellComplex, bonds: &BondConfig) -> NetworkSplit {
    let frustrated = plaquette_frustration(complex, bonds);
    let unfrustrated = frustrated.not();
    let components_plus = plaquette_components(complex, &unfrustrated);
    let components_minus = plaquette_components(complex, &frustrated);
    let cover = pair_cover(complex, &frustrated);
    let mut bplus = BitVector::zeros(complex.num_bonds());
    for p in frustrated.ones_iter() {
        for &b in complex.faces(2, p) {
            bplus.set(b as usize, true);
        }
    }
    bplus.and_not_assign(&cover.common_bonds(complex.num_bonds()));
    NetworkSplit {
        frustrated,
        unfrustrated,
        components_plus,
        components_minus,
        pair_cover: cover,
        bplus_bonds: bplus,
    }
}

/// J'_ij = J_ij eps_i eps_j, with `eps` given as a spin configuration.
pub fn gauge_transform(complex: &CellComplex, bonds: &BondConfig, eps: &SpinConfig) -> Result<BondConfig> {
    bonds.check(complex)?;
    eps.check(complex)?;
    let flip = site_coboundary(complex, eps.down());
    Ok(bonds.with_negative(bonds.negative().xor(&flip)))
}

/// Whether a bond from lattice point `i` along `axis` belongs to B-.
pub fn in_bminus(i: [usize; 3], axis: usize) -> bool {
    let even = |c: usize| c % 2 == 0;
    match axis {
        0 => even(i[1]) && even(i[2]),
        1 => !even(i[0]) && !even(i[2]),
        _ => even(i[0]) && !even(i[1]),
    }
}

/// Signs -1 exactly on B-, which makes every plaquette of a 3D block
/// frustrated. Returns the configuration and the B- mask. Periodic axes
/// must have even extent for the parity pattern to close up.
pub fn build_all_frustrated_3d(complex: &CellComplex) -> Result<(BondConfig, BitVector)> {
    if complex.d() != 3 {
        return Err(Error::WrongDimension(3));
    }
    let l = complex.lattice();
    for a in 0..3 {
        if l.bc()[a] == crate::complex::BoundaryCondition::Periodic && l.extents()[a] % 2 == 1 {
            return Err(Error::InvalidLattice(format!(
                "periodic axis {a} needs even extent for the B- pattern"
            )));
        }
    }
    let bminus = BitVector::from_bools((0..complex.num_bonds()).map(|b| {
        let c = complex.cell(1, b);
        let axis = c.axes.trailing_zeros() as usize;
        in_bminus(c.base, axis)
    }));
    Ok((BondConfig::new(bminus.clone(), 1.0)?, bminus))
}
