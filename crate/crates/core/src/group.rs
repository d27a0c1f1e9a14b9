//! Representation-theoretic bookkeeping for the supported groups.
//!
//! Diagonalizable groups (finite abelian groups, tori and products of the two)
//! share one code path: an irreducible representation is a character, written
//! as an integer tuple with one entry per factor. Entries belonging to a
//! cyclic factor `Z/n` are kept reduced to `[0, n)`. For `SL2` the label is
//! the highest weight `n` of the irreducible representation `V_n`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Symmetric powers above this degree are refused rather than truncated.
pub const DEFAULT_DEGREE_BOUND: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Factor {
    /// `Z/n` with `n >= 2`.
    Cyclic(u32),
    /// A rank-one torus factor, character group `Z`.
    Integer,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GroupSpec {
    Diagonal(Vec<Factor>),
    Sl2,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum IrrepLabel {
    Character(Vec<i64>),
    Spin(u32),
}

impl fmt::Display for IrrepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IrrepLabel::Character(c) if c.len() == 1 => write!(f, "{}", c[0]),
            IrrepLabel::Character(c) => {
                let parts: Vec<String> = c.iter().map(|x| x.to_string()).collect();
                write!(f, "({})", parts.join(","))
            }
            IrrepLabel::Spin(n) => write!(f, "V{n}"),
        }
    }
}

impl IrrepLabel {
    pub fn character(values: &[i64]) -> Self {
        IrrepLabel::Character(values.to_vec())
    }

    pub fn as_character(&self) -> Option<&[i64]> {
        match self {
            IrrepLabel::Character(c) => Some(c),
            IrrepLabel::Spin(_) => None,
        }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Sl2 => write!(f, "SL2"),
            GroupSpec::Diagonal(factors) => {
                let cyclic: Vec<String> = factors
                    .iter()
                    .filter_map(|x| match x {
                        Factor::Cyclic(n) => Some(format!("Z/{n}")),
                        Factor::Integer => None,
                    })
                    .collect();
                let rank = factors.iter().filter(|x| matches!(x, Factor::Integer)).count();
                let mut parts = cyclic;
                if rank > 0 {
                    parts.push(format!("T^{rank}"));
                }
                write!(f, "{}", parts.join(" x "))
            }
        }
    }
}

/// Finitely supported multiplicities of irreducible representations.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepDecomp(BTreeMap<IrrepLabel, usize>);

impl RepDecomp {
    pub fn new() -> Self {
        RepDecomp(BTreeMap::new())
    }

    pub fn add(&mut self, label: IrrepLabel, mult: usize) {
        if mult > 0 {
            *self.0.entry(label).or_insert(0) += mult;
        }
    }

    pub fn single(label: IrrepLabel) -> Self {
        let mut d = Self::new();
        d.add(label, 1);
        d
    }

    pub fn multiplicity(&self, label: &IrrepLabel) -> usize {
        self.0.get(label).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&IrrepLabel, usize)> {
        self.0.iter().map(|(k, &v)| (k, v))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total_dim(&self, group: &GroupSpec) -> usize {
        self.iter().map(|(l, m)| m * group.irrep_dim(l).unwrap_or(0)).sum()
    }
}

impl FromIterator<(IrrepLabel, usize)> for RepDecomp {
    fn from_iter<T: IntoIterator<Item = (IrrepLabel, usize)>>(iter: T) -> Self {
        let mut d = RepDecomp::new();
        for (l, m) in iter {
            d.add(l, m);
        }
        d
    }
}

impl GroupSpec {
    pub fn finite_abelian(orders: &[u32]) -> Result<Self> {
        Self::product(orders, 0)
    }

    pub fn torus(rank: usize) -> Result<Self> {
        Self::product(&[], rank)
    }

    /// `Z/n_1 x ... x Z/n_k x T^rank`; character tuples list cyclic entries first.
    pub fn product(orders: &[u32], rank: usize) -> Result<Self> {
        if let Some(bad) = orders.iter().find(|&&n| n < 2) {
            return Err(Error::InvalidGroup(format!("cyclic factor order {bad} must be at least 2")));
        }
        if orders.is_empty() && rank == 0 {
            return Err(Error::InvalidGroup("a diagonal group needs at least one factor".into()));
        }
        let mut factors: Vec<Factor> = orders.iter().map(|&n| Factor::Cyclic(n)).collect();
        factors.extend(std::iter::repeat_n(Factor::Integer, rank));
        Ok(GroupSpec::Diagonal(factors))
    }

    pub fn sl2() -> Self {
        GroupSpec::Sl2
    }

    pub fn is_diagonal(&self) -> bool {
        matches!(self, GroupSpec::Diagonal(_))
    }

    pub fn factors(&self) -> &[Factor] {
        match self {
            GroupSpec::Diagonal(f) => f,
            GroupSpec::Sl2 => &[],
        }
    }

    /// Number of torus factors; these are the directions along which labels are unbounded.
    pub fn torus_rank(&self) -> usize {
        self.factors().iter().filter(|f| matches!(f, Factor::Integer)).count()
    }

    pub fn is_finite(&self) -> bool {
        self.is_diagonal() && self.torus_rank() == 0
    }

    pub fn trivial(&self) -> IrrepLabel {
        match self {
            GroupSpec::Diagonal(f) => IrrepLabel::Character(vec![0; f.len()]),
            GroupSpec::Sl2 => IrrepLabel::Spin(0),
        }
    }

    fn invalid(&self, label: &IrrepLabel) -> Error {
        Error::InvalidLabel { label: label.to_string(), group: self.to_string() }
    }

    pub fn validate(&self, label: &IrrepLabel) -> Result<()> {
        match (self, label) {
            (GroupSpec::Sl2, IrrepLabel::Spin(_)) => Ok(()),
            (GroupSpec::Diagonal(factors), IrrepLabel::Character(c)) if c.len() == factors.len() => {
                for (x, f) in c.iter().zip(factors) {
                    if let Factor::Cyclic(n) = f {
                        if *x < 0 || *x >= i64::from(*n) {
                            return Err(self.invalid(label));
                        }
                    }
                }
                Ok(())
            }
            _ => Err(self.invalid(label)),
        }
    }

    /// Reduces a raw integer tuple into a canonical character label.
    pub fn character(&self, raw: &[i64]) -> Result<IrrepLabel> {
        match self {
            GroupSpec::Diagonal(factors) if raw.len() == factors.len() => Ok(IrrepLabel::Character(
                raw.iter()
                    .zip(factors)
                    .map(|(&x, f)| match f {
                        Factor::Cyclic(n) => x.rem_euclid(i64::from(*n)),
                        Factor::Integer => x,
                    })
                    .collect(),
            )),
            _ => Err(Error::InvalidLabel { label: format!("{raw:?}"), group: self.to_string() }),
        }
    }

    pub fn irrep_dim(&self, label: &IrrepLabel) -> Result<usize> {
        self.validate(label)?;
        Ok(match label {
            IrrepLabel::Character(_) => 1,
            IrrepLabel::Spin(n) => *n as usize + 1,
        })
    }

    pub fn dual(&self, label: &IrrepLabel) -> Result<IrrepLabel> {
        self.validate(label)?;
        match label {
            IrrepLabel::Character(c) => self.character(&c.iter().map(|x| -x).collect::<Vec<_>>()),
            IrrepLabel::Spin(_) => Ok(label.clone()),
        }
    }

    /// Product of two characters of a diagonal group.
    pub fn add_characters(&self, a: &IrrepLabel, b: &IrrepLabel) -> Result<IrrepLabel> {
        self.validate(a)?;
        self.validate(b)?;
        match (a, b) {
            (IrrepLabel::Character(x), IrrepLabel::Character(y)) => {
                self.character(&x.iter().zip(y).map(|(p, q)| p + q).collect::<Vec<_>>())
            }
            _ => Err(Error::InvalidGroup("character arithmetic needs a diagonal group".into())),
        }
    }

    /// `k`-th power of a character.
    pub fn scale_character(&self, a: &IrrepLabel, k: i64) -> Result<IrrepLabel> {
        self.validate(a)?;
        match a {
            IrrepLabel::Character(x) => self.character(&x.iter().map(|p| p * k).collect::<Vec<_>>()),
            IrrepLabel::Spin(_) => Err(Error::InvalidGroup("character arithmetic needs a diagonal group".into())),
        }
    }

    pub fn tensor(&self, a: &IrrepLabel, b: &IrrepLabel) -> Result<RepDecomp> {
        self.validate(a)?;
        self.validate(b)?;
        match (a, b) {
            (IrrepLabel::Character(_), IrrepLabel::Character(_)) => Ok(RepDecomp::single(self.add_characters(a, b)?)),
            (IrrepLabel::Spin(m), IrrepLabel::Spin(n)) => {
                Ok((0..=(*m).min(*n)).map(|i| (IrrepLabel::Spin(m + n - 2 * i), 1)).collect())
            }
            _ => unreachable!("validated labels match the group kind"),
        }
    }

    /// Weights of a representation on its coordinate functions (the dual).
    /// For diagonal groups these are characters; for SL2 the torus weights.
    fn coordinate_weights(&self, v: &RepDecomp) -> Result<Vec<Vec<i64>>> {
        let mut out = Vec::new();
        for (label, mult) in v.iter() {
            self.validate(label)?;
            for _ in 0..mult {
                match label {
                    IrrepLabel::Character(c) => out.push(c.iter().map(|x| -x).collect()),
                    IrrepLabel::Spin(n) => {
                        let n = i64::from(*n);
                        out.extend((0..=n).map(|k| vec![n - 2 * k]));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Isotypic decomposition of `Sym^d(V^*)`, the degree-`d` part of the coordinate ring of `V`.
    pub fn decompose_sym_power(&self, v: &RepDecomp, d: usize, bound: usize) -> Result<RepDecomp> {
        if d > bound {
            return Err(Error::DegreeBound { requested: d, bound });
        }
        let weights = self.coordinate_weights(v)?;
        let zero = vec![0i64; weights.first().map_or(self.factors().len().max(1), |w| w.len())];
        // counts[k] maps a weight sum to the number of degree-k monomials with that weight
        let mut counts: Vec<BTreeMap<Vec<i64>, usize>> = vec![BTreeMap::new(); d + 1];
        counts[0].insert(zero, 1);
        for w in &weights {
            let mut next = counts.clone();
            for k in 1..=d {
                let prev: Vec<(Vec<i64>, usize)> = next[k - 1].iter().map(|(a, &b)| (a.clone(), b)).collect();
                for (sum, c) in prev {
                    let shifted: Vec<i64> = sum.iter().zip(w).map(|(a, b)| a + b).collect();
                    *next[k].entry(shifted).or_insert(0) += c;
                }
            }
            counts = next;
        }
        let top = &counts[d];
        match self {
            GroupSpec::Diagonal(_) => {
                let mut out = RepDecomp::new();
                for (w, c) in top {
                    out.add(self.character(w)?, *c);
                }
                Ok(out)
            }
            GroupSpec::Sl2 => {
                let count = |n: i64| top.get(&vec![n]).copied().unwrap_or(0);
                let max = top.keys().map(|k| k[0]).max().unwrap_or(0);
                let mut out = RepDecomp::new();
                for n in 0..=max {
                    let m = count(n) - count(n + 2);
                    out.add(IrrepLabel::Spin(n as u32), m);
                }
                Ok(out)
            }
        }
    }

    /// Labels in the canonical box of radius `radius`: torus entries in
    /// `[-radius, radius]`, all residues for cyclic entries, `V_0..V_radius` for SL2.
    pub fn box_labels(&self, radius: i64) -> Vec<IrrepLabel> {
        match self {
            GroupSpec::Sl2 => (0..=radius.max(0)).map(|n| IrrepLabel::Spin(n as u32)).collect(),
            GroupSpec::Diagonal(factors) => {
                let mut out: Vec<Vec<i64>> = vec![Vec::new()];
                for f in factors {
                    let range: Vec<i64> = match f {
                        Factor::Cyclic(n) => (0..i64::from(*n)).collect(),
                        Factor::Integer => (-radius..=radius).collect(),
                    };
                    out = out
                        .into_iter()
                        .flat_map(|prefix| {
                            range.iter().map(move |&x| {
                                let mut p = prefix.clone();
                                p.push(x);
                                p
                            })
                        })
                        .collect();
                }
                out.into_iter().map(IrrepLabel::Character).collect()
            }
        }
    }

    /// All characters of a finite diagonal group.
    pub fn all_characters(&self) -> Result<Vec<IrrepLabel>> {
        if !self.is_finite() {
            return Err(Error::InvalidGroup(format!("{self} has infinitely many irreducible representations")));
        }
        Ok(self.box_labels(0))
    }

    /// Least common multiple of the cyclic orders (1 when there are none).
    pub fn exponent_lcm(&self) -> u64 {
        self.factors()
            .iter()
            .filter_map(|f| match f {
                Factor::Cyclic(n) => Some(u64::from(*n)),
                Factor::Integer => None,
            })
            .fold(1, num::integer::lcm)
    }
}
