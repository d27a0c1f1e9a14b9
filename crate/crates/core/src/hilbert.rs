//! Hilbert functions, stability parameters and their pairing.
//!
//! Both kinds of data are a finite window of explicit values plus a tail made
//! of finitely many rays `start + k * step` (`k >= 0`) in the label lattice.
//! Multiplicities may be constant along a ray; stability parameters decay
//! geometrically along a ray. Products of the two along a ray are eventually
//! periodic times a geometric sequence, so every infinite sum used here has a
//! closed form and is evaluated exactly.

use std::collections::{BTreeMap, BTreeSet};

use num::bigint::BigInt;
use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::group::{Factor, GroupSpec, IrrepLabel};
use crate::rational::{pow, Q};

/// `start + k * step` for `k = 0, 1, 2, ...`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ray {
    pub start: IrrepLabel,
    pub step: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GeometricRay {
    pub ray: Ray,
    /// Value at `k = 0`.
    pub coefficient: Q,
    /// Ratio between consecutive values, `0 < base < 1`.
    pub base: Q,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConstantRay {
    pub ray: Ray,
    pub value: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TailModel {
    #[default]
    Zero,
    Geometric(Vec<GeometricRay>),
    Constant(Vec<ConstantRay>),
}

impl TailModel {
    fn rays(&self) -> Vec<&Ray> {
        match self {
            TailModel::Zero => Vec::new(),
            TailModel::Geometric(r) => r.iter().map(|g| &g.ray).collect(),
            TailModel::Constant(r) => r.iter().map(|c| &c.ray).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.rays().is_empty()
    }
}

fn coords(label: &IrrepLabel) -> Vec<i64> {
    match label {
        IrrepLabel::Character(c) => c.clone(),
        IrrepLabel::Spin(n) => vec![i64::from(*n)],
    }
}

/// Per-coordinate modulus: `Some(n)` for cyclic entries, `None` for unbounded ones.
fn moduli(group: &GroupSpec) -> Vec<Option<i64>> {
    match group {
        GroupSpec::Sl2 => vec![None],
        GroupSpec::Diagonal(f) => f
            .iter()
            .map(|x| match x {
                Factor::Cyclic(n) => Some(i64::from(*n)),
                Factor::Integer => None,
            })
            .collect(),
    }
}

fn from_coords(group: &GroupSpec, c: &[i64]) -> Result<IrrepLabel> {
    match group {
        GroupSpec::Sl2 => {
            if c.len() != 1 || c[0] < 0 {
                return Err(Error::InvalidLabel { label: format!("{c:?}"), group: group.to_string() });
            }
            Ok(IrrepLabel::Spin(c[0] as u32))
        }
        GroupSpec::Diagonal(_) => group.character(c),
    }
}

impl Ray {
    pub fn new(start: IrrepLabel, step: Vec<i64>) -> Self {
        Ray { start, step }
    }

    pub fn validate(&self, group: &GroupSpec) -> Result<()> {
        group.validate(&self.start)?;
        let mods = moduli(group);
        if self.step.len() != mods.len() {
            return Err(Error::InvalidTail(format!("ray step {:?} has the wrong length", self.step)));
        }
        let advances = self.step.iter().zip(&mods).any(|(s, m)| m.is_none() && *s != 0);
        if !advances {
            return Err(Error::InvalidTail(format!("ray from {} must move along an unbounded direction", self.start)));
        }
        if matches!(group, GroupSpec::Sl2) && self.step[0] <= 0 {
            return Err(Error::InvalidTail("SL2 rays must increase the highest weight".into()));
        }
        Ok(())
    }

    pub fn point(&self, group: &GroupSpec, k: u64) -> IrrepLabel {
        let k = k as i64;
        let c: Vec<i64> = coords(&self.start).iter().zip(&self.step).map(|(s, t)| s + k * t).collect();
        from_coords(group, &c).expect("validated ray stays inside the label set")
    }

    /// The `k` with `point(k) == label`, if any.
    pub fn index_of(&self, group: &GroupSpec, label: &IrrepLabel) -> Option<u64> {
        let mods = moduli(group);
        let diff: Vec<i64> = coords(label).iter().zip(coords(&self.start)).map(|(a, b)| a - b).collect();
        if diff.len() != self.step.len() {
            return None;
        }
        let i = (0..mods.len()).find(|&i| mods[i].is_none() && self.step[i] != 0)?;
        if diff[i] % self.step[i] != 0 {
            return None;
        }
        let k = diff[i] / self.step[i];
        if k < 0 {
            return None;
        }
        for j in 0..mods.len() {
            let rest = diff[j] - k * self.step[j];
            let ok = match mods[j] {
                None => rest == 0,
                Some(n) => rest.rem_euclid(n) == 0,
            };
            if !ok {
                return None;
            }
        }
        Some(k as u64)
    }

    fn magnitude(&self) -> i64 {
        coords(&self.start).iter().chain(&self.step).map(|x| x.abs()).max().unwrap_or(0)
    }
}

/// Horizon after which every sequence `k -> f(ray.point(k))` built from the
/// given rays is periodic, together with that period. Finite label sets are
/// handled per ray by [`Ray::index_of`].
fn horizon(group: &GroupSpec, rays: &[&Ray]) -> (u64, u64) {
    let m = rays.iter().map(|r| r.magnitude()).max().unwrap_or(0).max(1) as u64;
    let mut period = 1u64;
    for modulus in moduli(group).into_iter().flatten() {
        period = num::integer::lcm(period, modulus as u64);
    }
    for r in rays {
        for s in &r.step {
            if *s != 0 {
                period = num::integer::lcm(period, s.unsigned_abs());
            }
        }
    }
    // two non-parallel rays meet at k <= (2m)^2; parallel ones settle by then too
    (4 * m * m + 4 * m + 2, period)
}

/// `sum_k values[k] * base^k`, by Horner's rule over the integers.
fn weighted_polynomial(values: &[u64], base: &Q) -> Q {
    let (u, v) = (base.numer(), base.denom());
    let mut acc = BigInt::zero();
    let mut scale = BigInt::one();
    for a in values.iter().rev() {
        acc = acc * u + BigInt::from(*a) * &scale;
        scale *= v;
    }
    // the loop multiplies `scale` once more than the degree needs
    Q::new(acc * v, scale)
}

/// Exact `sum_{k>=0} coefficient * base^k * f(point(k))` for a sequence that
/// is periodic from `start` on with the given period.
fn geometric_ray_sum(
    group: &GroupSpec,
    g: &GeometricRay,
    (start, period): (u64, u64),
    f: &dyn Fn(&IrrepLabel) -> u64,
) -> Result<Q> {
    let head: Vec<u64> = (0..start).map(|k| f(&g.ray.point(group, k))).collect();
    let mut block = Vec::with_capacity(period as usize);
    for r in 0..period {
        let v = f(&g.ray.point(group, start + r));
        if v != f(&g.ray.point(group, start + r + period)) {
            return Err(Error::Internal(format!(
                "sequence along ray from {} is not periodic after {start}",
                g.ray.start
            )));
        }
        block.push(v);
    }
    let periodic =
        weighted_polynomial(&block, &g.base) * pow(&g.base, start as i64) / (Q::one() - pow(&g.base, period as i64));
    Ok(&g.coefficient * (weighted_polynomial(&head, &g.base) + periodic))
}

fn validate_disjoint(group: &GroupSpec, rays: &[&Ray], window: &[&IrrepLabel]) -> Result<()> {
    let (h, p) = horizon(group, rays);
    for (i, r) in rays.iter().enumerate() {
        r.validate(group)?;
        for l in window {
            if r.index_of(group, l).is_some() {
                return Err(Error::InvalidTail(format!("window label {l} lies on the ray from {}", r.start)));
            }
        }
        for other in &rays[i + 1..] {
            for k in 0..h + 2 * p {
                if other.index_of(group, &r.point(group, k)).is_some() {
                    return Err(Error::InvalidTail(format!("rays from {} and {} overlap", r.start, other.start)));
                }
            }
        }
    }
    Ok(())
}

/// Multiplicities `h: Irr G -> N`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HilbertFunction {
    group: GroupSpec,
    window: BTreeMap<IrrepLabel, u64>,
    tail: TailModel,
}

impl HilbertFunction {
    pub fn new(group: GroupSpec, window: BTreeMap<IrrepLabel, u64>, tail: TailModel) -> Result<Self> {
        let tail = match tail {
            TailModel::Geometric(_) => {
                return Err(Error::InvalidTail("geometric tails are only allowed for stability parameters".into()))
            }
            TailModel::Constant(mut rays) => {
                rays.retain(|r| r.value > 0);
                rays.sort();
                if rays.is_empty() {
                    TailModel::Zero
                } else {
                    TailModel::Constant(rays)
                }
            }
            TailModel::Zero => TailModel::Zero,
        };
        for l in window.keys() {
            group.validate(l)?;
        }
        let window: BTreeMap<_, _> = window.into_iter().filter(|(_, v)| *v > 0).collect();
        let labels: Vec<&IrrepLabel> = window.keys().collect();
        validate_disjoint(&group, &tail.rays(), &labels)?;
        Ok(HilbertFunction { group, window, tail })
    }

    /// Finitely supported Hilbert function.
    pub fn finite(group: &GroupSpec, values: impl IntoIterator<Item = (IrrepLabel, u64)>) -> Result<Self> {
        let mut window = BTreeMap::new();
        for (l, v) in values {
            *window.entry(l).or_insert(0) += v;
        }
        Self::new(group.clone(), window, TailModel::Zero)
    }

    pub fn zero(group: &GroupSpec) -> Self {
        HilbertFunction { group: group.clone(), window: BTreeMap::new(), tail: TailModel::Zero }
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn window(&self) -> &BTreeMap<IrrepLabel, u64> {
        &self.window
    }

    pub fn tail(&self) -> &TailModel {
        &self.tail
    }

    pub fn is_finite(&self) -> bool {
        self.tail.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.window.is_empty() && self.tail.is_zero()
    }

    pub fn value(&self, label: &IrrepLabel) -> u64 {
        if let Some(v) = self.window.get(label) {
            return *v;
        }
        if let TailModel::Constant(rays) = &self.tail {
            for r in rays {
                if r.ray.index_of(&self.group, label).is_some() {
                    return r.value;
                }
            }
        }
        0
    }

    /// Total dimension count, `None` when the support is infinite.
    pub fn total(&self) -> Option<u64> {
        self.is_finite().then(|| self.window.values().sum())
    }

    /// Labels with non-zero value, when finitely many.
    pub fn support(&self) -> Option<BTreeSet<IrrepLabel>> {
        self.is_finite().then(|| self.window.keys().cloned().collect())
    }

    pub fn le_on<'a>(&self, other: &HilbertFunction, labels: impl IntoIterator<Item = &'a IrrepLabel>) -> bool {
        labels.into_iter().all(|l| self.value(l) <= other.value(l))
    }

    /// `self - other` for finitely supported functions with `other <= self`.
    pub fn checked_sub(&self, other: &HilbertFunction) -> Option<HilbertFunction> {
        if !self.is_finite() || !other.is_finite() {
            return None;
        }
        let mut out = BTreeMap::new();
        for l in self.window.keys().chain(other.window.keys()) {
            let (a, b) = (self.value(l), other.value(l));
            if b > a {
                return None;
            }
            out.insert(l.clone(), a - b);
        }
        HilbertFunction::new(self.group.clone(), out, TailModel::Zero).ok()
    }
}

/// Stability parameters `theta: Irr G -> Q`, negative only inside the window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThetaVector {
    group: GroupSpec,
    window: BTreeMap<IrrepLabel, Q>,
    tail: TailModel,
}

/// The partition `Irr G = D_- u D_0 u D_+`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignPartition {
    pub negative: BTreeSet<IrrepLabel>,
    /// Zero entries listed explicitly in the window; every label off the
    /// window and off the tail rays is also in `D_0`.
    pub zero: BTreeSet<IrrepLabel>,
    pub positive_window: BTreeSet<IrrepLabel>,
    pub positive_rays: Vec<Ray>,
}

impl SignPartition {
    pub fn is_negative(&self, label: &IrrepLabel) -> bool {
        self.negative.contains(label)
    }
}

impl ThetaVector {
    pub fn new(group: GroupSpec, window: BTreeMap<IrrepLabel, Q>, tail: TailModel) -> Result<Self> {
        let tail = match tail {
            TailModel::Constant(_) => {
                return Err(Error::InvalidTail("constant tails are only allowed for Hilbert functions".into()))
            }
            TailModel::Geometric(mut rays) => {
                for g in &rays {
                    if !g.coefficient.is_positive() {
                        return Err(Error::InvalidTail("geometric tail coefficients must be positive".into()));
                    }
                    if !(g.base.is_positive() && g.base < Q::one()) {
                        return Err(Error::InvalidTail("geometric tail base must lie in (0, 1)".into()));
                    }
                }
                rays.sort();
                if rays.is_empty() {
                    TailModel::Zero
                } else {
                    TailModel::Geometric(rays)
                }
            }
            TailModel::Zero => TailModel::Zero,
        };
        for l in window.keys() {
            group.validate(l)?;
        }
        let labels: Vec<&IrrepLabel> = window.keys().collect();
        validate_disjoint(&group, &tail.rays(), &labels)?;
        Ok(ThetaVector { group, window, tail })
    }

    pub fn finite(group: &GroupSpec, values: impl IntoIterator<Item = (IrrepLabel, Q)>) -> Result<Self> {
        Self::new(group.clone(), values.into_iter().collect(), TailModel::Zero)
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn window(&self) -> &BTreeMap<IrrepLabel, Q> {
        &self.window
    }

    pub fn tail(&self) -> &TailModel {
        &self.tail
    }

    pub fn value(&self, label: &IrrepLabel) -> Q {
        if let Some(v) = self.window.get(label) {
            return v.clone();
        }
        if let TailModel::Geometric(rays) = &self.tail {
            for g in rays {
                if let Some(k) = g.ray.index_of(&self.group, label) {
                    return &g.coefficient * pow(&g.base, k as i64);
                }
            }
        }
        Q::zero()
    }

    /// Same tail, window values transformed.
    pub fn map_window(&self, f: impl Fn(&IrrepLabel, &Q) -> Q) -> Result<ThetaVector> {
        let window = self.window.iter().map(|(l, v)| (l.clone(), f(l, v))).collect();
        ThetaVector::new(self.group.clone(), window, self.tail.clone())
    }

    pub fn sign_partition(&self) -> SignPartition {
        let mut part = SignPartition {
            negative: BTreeSet::new(),
            zero: BTreeSet::new(),
            positive_window: BTreeSet::new(),
            positive_rays: Vec::new(),
        };
        for (l, v) in &self.window {
            if v.is_negative() {
                part.negative.insert(l.clone());
            } else if v.is_zero() {
                part.zero.insert(l.clone());
            } else {
                part.positive_window.insert(l.clone());
            }
        }
        if let TailModel::Geometric(rays) = &self.tail {
            part.positive_rays = rays.iter().map(|g| g.ray.clone()).collect();
        }
        part
    }

    pub fn negative_labels(&self) -> BTreeSet<IrrepLabel> {
        self.sign_partition().negative
    }

    fn check_group(&self, h: &HilbertFunction) -> Result<()> {
        if h.group != self.group {
            return Err(Error::Precondition(format!("theta is defined on {} but h on {}", self.group, h.group)));
        }
        Ok(())
    }

    /// `sum_{rho not in excluded} theta_rho * h(rho)`, exactly.
    fn sum_outside(&self, h: &HilbertFunction, excluded: &BTreeSet<IrrepLabel>) -> Result<Q> {
        self.check_group(h)?;
        let mut total = Q::zero();
        for (l, v) in &self.window {
            if !excluded.contains(l) {
                total += v * Q::from_integer(h.value(l).into());
            }
        }
        if let TailModel::Geometric(rays) = &self.tail {
            let mut all_rays: Vec<&Ray> = rays.iter().map(|g| &g.ray).collect();
            all_rays.extend(h.tail.rays());
            let (hz, period) = horizon(&self.group, &all_rays);
            let f = |l: &IrrepLabel| if excluded.contains(l) { 0 } else { h.value(l) };
            for g in rays {
                let last_event = excluded
                    .iter()
                    .chain(h.window.keys())
                    .filter_map(|l| g.ray.index_of(&self.group, l))
                    .max()
                    .map_or(0, |k| k + 1);
                total += geometric_ray_sum(&self.group, g, (hz.max(last_event), period), &f)?;
            }
        }
        Ok(total)
    }

    /// `<theta, h> = sum_rho theta_rho h(rho)`.
    pub fn pairing(&self, h: &HilbertFunction) -> Result<Q> {
        self.sum_outside(h, &BTreeSet::new())
    }

    /// Splits the pairing into the part on the finite set `window` and the
    /// tail `S_window` outside it. `window` must contain every negative label.
    pub fn restrict_pairing(&self, h: &HilbertFunction, window: &BTreeSet<IrrepLabel>) -> Result<(Q, Q)> {
        self.check_group(h)?;
        if let Some(missing) = self.negative_labels().iter().find(|l| !window.contains(*l)) {
            return Err(Error::WindowMissingNegative(missing.to_string()));
        }
        let inside =
            window.iter().map(|l| self.value(l) * Q::from_integer(h.value(l).into())).fold(Q::zero(), |a, b| a + b);
        let tail = self.sum_outside(h, window)?;
        Ok((inside, tail))
    }

    /// `sum_{tau not in window} |theta_tau| h(tau)`.
    pub fn tail_majorant(&self, h: &HilbertFunction, window: &BTreeSet<IrrepLabel>) -> Result<Q> {
        self.map_window(|_, v| v.abs())?.sum_outside(h, window)
    }
}
