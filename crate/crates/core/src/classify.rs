//! Irreducible domain types, the map `η(D) = (dim D, dim S¹(D))`, its inverse,
//! and recovery of a product of domains from `(cone dim, block dim)` pairs.
//!
//! `dim S¹` is projective throughout this module; cone dimensions (as
//! measured on the tangent space) are affine, so a factor contributes the
//! pair `(dim S¹ + 1, dim D)`. The disc has no `S¹` and contributes `(0, 1)`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::jts::Family;
use crate::{Error, Result};

/// Rank ≥ 2 irreducible domains plus the disc.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DomainType {
    I(usize, usize),
    II(usize),
    III(usize),
    IV(usize),
    V,
    VI,
    Disc,
}

impl DomainType {
    /// Checks the parameter ranges and orders `I(p,q)` so that `p ≤ q`.
    pub fn new(d: DomainType) -> Result<Self> {
        let d = match d {
            DomainType::I(p, q) if p > q => DomainType::I(q, p),
            other => other,
        };
        let ok = match d {
            DomainType::I(p, _) => p >= 2,
            DomainType::II(n) => n >= 4,
            DomainType::III(n) => n >= 2,
            DomainType::IV(n) => n >= 3,
            DomainType::V | DomainType::VI | DomainType::Disc => true,
        };
        if ok {
            Ok(d)
        } else {
            Err(Error::SpecError(format!(
                "{d} is not a rank >= 2 irreducible domain nor the disc"
            )))
        }
    }

    /// Representative of the isomorphism class: `IV(3) → III(2)`,
    /// `IV(4) → I(2,2)`, `IV(6) → II(4)`.
    pub fn canonicalize(self) -> Self {
        match self {
            DomainType::IV(3) => DomainType::III(2),
            DomainType::IV(4) => DomainType::I(2, 2),
            DomainType::IV(6) => DomainType::II(4),
            DomainType::I(p, q) if p > q => DomainType::I(q, p),
            other => other,
        }
    }

    pub fn dim(self) -> usize {
        self.family().dim()
    }

    pub fn family(self) -> Family {
        match self {
            DomainType::I(p, q) => Family::I(p, q),
            DomainType::II(n) => Family::II(n),
            DomainType::III(n) => Family::III(n),
            DomainType::IV(n) => Family::IV(n),
            DomainType::V => Family::V,
            DomainType::VI => Family::VI,
            DomainType::Disc => Family::Disc,
        }
    }

    /// Every valid non-disc type with `dim ≤ max_dim`, without
    /// canonicalization (so `IV(3)` and `III(2)` both appear).
    pub fn all_up_to(max_dim: usize) -> Vec<DomainType> {
        let mut out = Vec::new();
        for p in 2.. {
            if p * p > max_dim {
                break;
            }
            for q in p..=max_dim / p {
                out.push(DomainType::I(p, q));
            }
        }
        out.extend((4..).take_while(|n| n * (n - 1) / 2 <= max_dim).map(DomainType::II));
        out.extend((2..).take_while(|n| n * (n + 1) / 2 <= max_dim).map(DomainType::III));
        out.extend((3..=max_dim).map(DomainType::IV));
        if max_dim >= 16 {
            out.push(DomainType::V);
        }
        if max_dim >= 27 {
            out.push(DomainType::VI);
        }
        out
    }
}

impl TryFrom<Family> for DomainType {
    type Error = Error;

    fn try_from(f: Family) -> Result<Self> {
        let d = match f {
            Family::I(p, q) => DomainType::I(p, q),
            Family::II(n) => DomainType::II(n),
            Family::III(n) => DomainType::III(n),
            Family::IV(n) => DomainType::IV(n),
            Family::V => DomainType::V,
            Family::VI => DomainType::VI,
            Family::Disc => DomainType::Disc,
        };
        DomainType::new(d)
    }
}

impl fmt::Display for DomainType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.family().fmt(f)
    }
}

impl FromStr for DomainType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DomainType::try_from(s.parse::<Family>()?)
    }
}

/// `(dim D, dim S¹(D))`, the second entry projective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EtaPair {
    pub dim_domain: usize,
    pub dim_s1: usize,
}

impl EtaPair {
    pub fn new(dim_domain: usize, dim_s1: usize) -> Self {
        Self { dim_domain, dim_s1 }
    }
}

pub fn eta(d: DomainType) -> Result<EtaPair> {
    let (dim, s1) = match d {
        DomainType::I(p, q) => (p * q, p + q - 2),
        DomainType::II(n) => (n * (n - 1) / 2, 2 * (n - 2)),
        DomainType::III(n) => (n * (n + 1) / 2, n - 1),
        DomainType::IV(n) => (n, n - 2),
        DomainType::V => (16, 10),
        DomainType::VI => (27, 16),
        DomainType::Disc => return Err(Error::DiscHasNoS1),
    };
    Ok(EtaPair::new(dim, s1))
}

fn exact_sqrt(v: u64) -> Option<u64> {
    let r = v.isqrt();
    (r * r == v).then_some(r)
}

/// Canonical types with this pair, found by solving the table equations for
/// each family. Sorted; usually zero or one entry, but `(45, 16)` is shared
/// by `I(3,15)` and `II(10)`.
pub fn eta_preimages(pair: EtaPair) -> Vec<DomainType> {
    let (d, s) = (pair.dim_domain, pair.dim_s1);
    let mut found = Vec::new();

    // I(p,q): p + q = s + 2, pq = d
    let sum = (s + 2) as u64;
    if let Some(disc) = (sum * sum).checked_sub(4 * d as u64) {
        if let Some(r) = exact_sqrt(disc) {
            if (sum - r).is_multiple_of(2) {
                let (p, q) = (((sum - r) / 2) as usize, ((sum + r) / 2) as usize);
                found.push(DomainType::I(p, q));
            }
        }
    }
    // II(n): 2(n − 2) = s
    if s % 2 == 0 {
        found.push(DomainType::II(s / 2 + 2));
    }
    // III(n): n − 1 = s
    found.push(DomainType::III(s + 1));
    // IV(n): n = d
    found.push(DomainType::IV(d));
    found.push(DomainType::V);
    found.push(DomainType::VI);

    let mut hits: Vec<DomainType> = found
        .into_iter()
        .filter_map(|t| DomainType::new(t).ok())
        .filter(|&t| eta(t).ok() == Some(pair))
        .map(DomainType::canonicalize)
        .collect();
    hits.sort();
    hits.dedup();
    hits
}

/// The unique canonical type with this pair; `None` if there is none or the
/// pair is ambiguous.
pub fn eta_inverse(pair: EtaPair) -> Option<DomainType> {
    match eta_preimages(pair).as_slice() {
        [t] => Some(*t),
        _ => None,
    }
}

/// Groups of distinct types with `dim ≤ max_dim` sharing an η pair. With
/// `canonicalize`, isomorphic types are first identified.
pub fn verify_injectivity(max_dim: usize, canonicalize: bool) -> Vec<Vec<DomainType>> {
    let mut groups: BTreeMap<EtaPair, Vec<DomainType>> = BTreeMap::new();
    for t in DomainType::all_up_to(max_dim) {
        let t = if canonicalize { t.canonicalize() } else { t };
        let g = groups.entry(eta(t).expect("non-disc types have η")).or_default();
        if !g.contains(&t) {
            g.push(t);
        }
    }
    groups
        .into_values()
        .filter(|g| g.len() > 1)
        .map(|mut g| {
            g.sort();
            g
        })
        .collect()
}

/// A product of irreducible factors, kept sorted and canonical.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProductDomain {
    factors: Vec<DomainType>,
}

impl ProductDomain {
    pub fn new(factors: impl IntoIterator<Item = DomainType>) -> Self {
        let mut factors: Vec<DomainType> = factors.into_iter().map(DomainType::canonicalize).collect();
        factors.sort();
        Self { factors }
    }

    pub fn factors(&self) -> &[DomainType] {
        &self.factors
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().map(|f| f.dim()).sum()
    }

    /// The `(cone dim, block dim)` pair of every factor.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.factors.iter().map(|&f| factor_pair(f)).collect()
    }
}

/// `(affine cone dim, dim)` of one factor; the disc gives `(0, 1)`.
pub fn factor_pair(d: DomainType) -> (usize, usize) {
    match eta(d) {
        Ok(p) => (p.dim_s1 + 1, p.dim_domain),
        Err(_) => (0, 1),
    }
}

impl fmt::Display for ProductDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|d| d.to_string()).collect();
        f.write_str(&parts.join(" x "))
    }
}

impl FromStr for ProductDomain {
    type Err = Error;

    /// Factors joined by `x`, e.g. `I(2,3)xIV(5)xD`.
    fn from_str(s: &str) -> Result<Self> {
        let factors = crate::curvature::parse_factors(s)?
            .into_iter()
            .map(DomainType::try_from)
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(factors))
    }
}

/// Recovers the product from `(cone_dim, block_dim)` pairs, cone dims affine.
pub fn recover_cover(pairs: &[(usize, usize)]) -> Result<ProductDomain> {
    let factors = pairs
        .iter()
        .map(|&(cone_dim, block_dim)| {
            let unrecognized = Error::UnrecognizedPair { cone_dim, block_dim };
            if (cone_dim, block_dim) == (0, 1) {
                return Ok(DomainType::Disc);
            }
            if cone_dim == 0 || cone_dim > block_dim {
                return Err(unrecognized);
            }
            match eta_preimages(EtaPair::new(block_dim, cone_dim - 1)).as_slice() {
                [] => Err(unrecognized),
                [t] => Ok(*t),
                many => Err(Error::AmbiguousPair {
                    cone_dim,
                    block_dim,
                    candidates: many.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(", "),
                }),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ProductDomain::new(factors))
}

/// Parses `[[c₁,d₁],…]`.
pub fn parse_pairs_json(s: &str) -> Result<Vec<(usize, usize)>> {
    let raw: Vec<[usize; 2]> = serde_json::from_str(s)?;
    Ok(raw.into_iter().map(|[c, d]| (c, d)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eta_table_rows() {
        assert_eq!(eta(DomainType::I(2, 2)).unwrap(), EtaPair::new(4, 2));
        assert_eq!(eta(DomainType::VI).unwrap(), EtaPair::new(27, 16));
        assert_eq!(eta(DomainType::V).unwrap(), EtaPair::new(16, 10));
        assert_eq!(eta(DomainType::IV(4)).unwrap(), eta(DomainType::I(2, 2)).unwrap());
        assert_eq!(eta(DomainType::II(5)).unwrap(), EtaPair::new(10, 6));
        assert_eq!(eta(DomainType::III(3)).unwrap(), EtaPair::new(6, 2));
        assert!(matches!(eta(DomainType::Disc), Err(Error::DiscHasNoS1)));
    }

    #[test]
    fn s1_is_smaller_than_dim() {
        for t in DomainType::all_up_to(60) {
            let p = eta(t).unwrap();
            assert!(p.dim_s1 < p.dim_domain, "{t}");
        }
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(eta_inverse(EtaPair::new(4, 2)), Some(DomainType::I(2, 2)));
        assert_eq!(eta_inverse(EtaPair::new(6, 4)), Some(DomainType::II(4)));
        assert_eq!(eta_inverse(EtaPair::new(3, 1)), Some(DomainType::III(2)));
        assert_eq!(eta_inverse(EtaPair::new(5, 1)), None);
    }

    #[test]
    fn pair_five_one_is_unhit_by_brute_force() {
        // exhaustive scan of the formulas over all parameters with dim ≤ 5
        let hits: Vec<_> = DomainType::all_up_to(5)
            .into_iter()
            .filter(|&t| eta(t).unwrap() == EtaPair::new(5, 1))
            .collect();
        assert!(hits.is_empty());
    }

    #[test]
    fn inverse_after_eta_is_canonicalization() {
        for t in DomainType::all_up_to(40) {
            assert_eq!(eta_inverse(eta(t).unwrap()), Some(t.canonicalize()), "{t}");
        }
    }

    #[test]
    fn injectivity_scan() {
        assert!(verify_injectivity(30, true).is_empty());
        let raw = verify_injectivity(30, false);
        let expected = vec![
            vec![DomainType::I(2, 2), DomainType::IV(4)],
            vec![DomainType::III(2), DomainType::IV(3)],
            vec![DomainType::II(4), DomainType::IV(6)],
        ];
        let mut got = raw.clone();
        got.sort();
        let mut want = expected.clone();
        want.sort();
        assert_eq!(got, want);
        let small = verify_injectivity(4, false);
        assert_eq!(small.len(), 2);
        assert!(small.contains(&vec![DomainType::III(2), DomainType::IV(3)]));
        assert!(small.contains(&vec![DomainType::I(2, 2), DomainType::IV(4)]));
    }

    #[test]
    fn collisions_beyond_thirty() {
        assert_eq!(verify_injectivity(44, true), Vec::<Vec<DomainType>>::new());
        assert_eq!(
            verify_injectivity(45, true),
            vec![vec![DomainType::I(3, 15), DomainType::II(10)]]
        );
        assert_eq!(
            eta_preimages(EtaPair::new(45, 16)),
            vec![DomainType::I(3, 15), DomainType::II(10)]
        );
        assert_eq!(eta_inverse(EtaPair::new(45, 16)), None);
        assert!(matches!(recover_cover(&[(17, 45)]), Err(Error::AmbiguousPair { .. })));
        assert_eq!(
            eta_preimages(EtaPair::new(1275, 98)),
            vec![DomainType::I(15, 85), DomainType::II(51)]
        );
    }

    #[test]
    fn validity_ranges() {
        assert!(DomainType::new(DomainType::I(1, 4)).is_err());
        assert!(DomainType::new(DomainType::II(3)).is_err());
        assert!(DomainType::new(DomainType::IV(2)).is_err());
        assert_eq!(DomainType::new(DomainType::I(3, 2)).unwrap(), DomainType::I(2, 3));
        assert_eq!("IV(5)".parse::<DomainType>().unwrap(), DomainType::IV(5));
        assert!("I(1,3)".parse::<DomainType>().is_err());
    }

    #[test]
    fn recovery_examples() {
        assert_eq!(recover_cover(&[(0, 1), (0, 1)]).unwrap().to_string(), "D x D");
        assert_eq!(recover_cover(&[(17, 27)]).unwrap().to_string(), "VI");
        assert_eq!(recover_cover(&[(4, 6), (4, 5)]).unwrap().to_string(), "I(2,3) x IV(5)");
        assert_eq!(recover_cover(&[(3, 4), (3, 4)]).unwrap().to_string(), "I(2,2) x I(2,2)");
        // a two-dimensional ball would give (1, 2)
        assert!(matches!(
            recover_cover(&[(1, 2)]),
            Err(Error::UnrecognizedPair {
                cone_dim: 1,
                block_dim: 2
            })
        ));
        assert!(matches!(recover_cover(&[(0, 3)]), Err(Error::UnrecognizedPair { .. })));
        assert!(matches!(recover_cover(&[(5, 4)]), Err(Error::UnrecognizedPair { .. })));
    }

    #[test]
    fn product_display_and_parse() {
        let p: ProductDomain = "IV(5)xI(3,2)xD".parse().unwrap();
        assert_eq!(p.to_string(), "I(2,3) x IV(5) x D");
        assert_eq!("I(2,3) x IV(5) x D".parse::<ProductDomain>().unwrap(), p);
        assert_eq!("IV(4)".parse::<ProductDomain>().unwrap().to_string(), "I(2,2)");
    }

    #[test]
    fn pairs_json() {
        assert_eq!(parse_pairs_json("[[4,6],[0,1]]").unwrap(), vec![(4, 6), (0, 1)]);
        assert!(parse_pairs_json("[[4]]").is_err());
    }
}
