//! Seeded instance generators shared by the self-test and the test suites.

use std::collections::{BTreeMap, BTreeSet};

use num::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::equivariant::{
    free_orbit_module, monomial_module, random_invertible, random_nonzero_rational, ActionSpec, ArrowMap,
    EquivariantModule, QuotientPresentation,
};
use crate::error::Result;
use crate::git::{default_kappa_minus, derive_parameters, Filtration, GitParameters};
use crate::group::{GroupSpec, IrrepLabel};
use crate::hilbert::{HilbertFunction, ThetaVector};
use crate::linalg::{Matrix, Subspace};
use crate::monomial::{finite_window, order_ideals_with_hilbert};
use crate::rational::{frac, q, Q};

const NAMES: [&str; 4] = ["x", "y", "z", "w"];

/// Action of `Z/n_1 x ... x Z/n_k` with the given character of each variable.
pub fn finite_action(orders: &[u32], weights: &[Vec<i64>]) -> Result<ActionSpec> {
    let g = GroupSpec::finite_abelian(orders)?;
    let vars =
        weights.iter().enumerate().map(|(i, w)| Ok((NAMES[i].to_string(), g.character(w)?))).collect::<Result<_>>()?;
    ActionSpec::new(g, vars)
}

pub fn cyclic_action(n: u32, weights: &[i64]) -> Result<ActionSpec> {
    finite_action(&[n], &weights.iter().map(|w| vec![*w]).collect::<Vec<_>>())
}

/// Every module with one-dimensional components on `support` whose arrows
/// are 0 or 1 and commute.
pub fn commuting_patterns(action: &ActionSpec, support: &BTreeSet<IrrepLabel>) -> Result<Vec<EquivariantModule>> {
    let g = action.group();
    let mut slots = Vec::new();
    for src in support {
        for v in 0..action.len() {
            if support.contains(&g.add_characters(src, action.weight(v))?) {
                slots.push((v, src.clone()));
            }
        }
    }
    assert!(slots.len() <= 16, "too many arrows for exhaustive patterns");
    let components: BTreeMap<IrrepLabel, usize> = support.iter().map(|l| (l.clone(), 1)).collect();
    let mut out = Vec::new();
    for mask in 0u32..(1 << slots.len()) {
        let arrows: ArrowMap = slots
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, s)| (s.clone(), Matrix::identity(1)))
            .collect();
        if let Ok(m) = EquivariantModule::new(action.clone(), components.clone(), arrows) {
            out.push(m);
        }
    }
    Ok(out)
}

/// Multiplicity-free modules of total dimension at most 12: every commuting
/// 0/1 arrow pattern over small groups (on the full character group and on
/// proper supports of size at least two), and every monomial constellation
/// with `h = 1` for cyclic groups of order 7 to 12.
pub fn multiplicity_free_corpus() -> Result<Vec<EquivariantModule>> {
    let mut out = Vec::new();
    let full: [(&[u32], Vec<Vec<i64>>); 9] = [
        (&[2], vec![vec![1], vec![1]]),
        (&[3], vec![vec![2], vec![1]]),
        (&[3], vec![vec![1], vec![1]]),
        (&[3], vec![vec![1], vec![2], vec![0]]),
        (&[4], vec![vec![1], vec![3]]),
        (&[4], vec![vec![1], vec![2]]),
        (&[5], vec![vec![1], vec![4]]),
        (&[6], vec![vec![1], vec![5]]),
        (&[2, 2], vec![vec![1, 0], vec![0, 1]]),
    ];
    for (orders, weights) in full {
        let a = finite_action(orders, &weights)?;
        let labels: Vec<IrrepLabel> = a.group().all_characters()?;
        let support: BTreeSet<IrrepLabel> = labels.iter().cloned().collect();
        out.extend(commuting_patterns(&a, &support)?);
        if labels.len() <= 4 {
            for mask in 1u32..(1 << labels.len()) - 1 {
                if mask.count_ones() < 2 {
                    continue;
                }
                let sub: BTreeSet<IrrepLabel> =
                    (0..labels.len()).filter(|i| mask >> i & 1 == 1).map(|i| labels[i].clone()).collect();
                out.extend(commuting_patterns(&a, &sub)?);
            }
        }
    }
    for n in 7..=12u32 {
        for w in [n as i64 - 1, 2] {
            let a = cyclic_action(n, &[1, w])?;
            let h = HilbertFunction::finite(a.group(), a.group().all_characters()?.into_iter().map(|l| (l, 1)))?;
            for ideal in order_ideals_with_hilbert(&a, &h, 1 << 14)? {
                out.push(monomial_module(&a, &ideal)?);
            }
        }
    }
    Ok(out)
}

/// A rational with small numerator and denominator, non-zero.
fn small_rational(rng: &mut impl Rng) -> Q {
    let n = rng.gen_range(1..=4);
    let d = rng.gen_range(1..=3);
    frac(n, d)
}

/// Random θ on `supp h` with `<θ, h> = 0`, at least one negative and one
/// positive entry, and possibly zero entries.
pub fn random_theta(rng: &mut impl Rng, h: &HilbertFunction) -> Option<ThetaVector> {
    let mut labels: Vec<IrrepLabel> = h.support()?.into_iter().collect();
    if labels.len() < 2 {
        return None;
    }
    labels.shuffle(rng);
    loop {
        let mut values = BTreeMap::new();
        let mut total = Q::zero();
        for l in &labels[1..] {
            let v = match rng.gen_range(0..5) {
                0 => Q::zero(),
                1 | 2 => -small_rational(rng),
                _ => small_rational(rng),
            };
            total += &v * q(h.value(l) as i64);
            values.insert(l.clone(), v);
        }
        let last = -total / q(h.value(&labels[0]) as i64);
        values.insert(labels[0].clone(), last);
        let neg = values.values().any(Q::is_negative);
        let pos = values.values().any(Q::is_positive);
        if neg && pos {
            return ThetaVector::finite(h.group(), values).ok();
        }
    }
}

/// θ negative exactly at the trivial character and positive on the rest of `supp h`.
pub fn hilbert_scheme_theta(rng: &mut impl Rng, h: &HilbertFunction) -> Option<ThetaVector> {
    let trivial = h.group().trivial();
    if h.value(&trivial) == 0 {
        return None;
    }
    let mut values = BTreeMap::new();
    let mut total = Q::zero();
    for l in h.support()? {
        if l != trivial {
            let v = small_rational(rng);
            total += &v * q(h.value(&l) as i64);
            values.insert(l, v);
        }
    }
    if values.is_empty() {
        return None;
    }
    values.insert(trivial.clone(), -total / q(h.value(&trivial) as i64));
    ThetaVector::finite(h.group(), values).ok()
}

/// Modules with repeated characters: monomial modules with `h = 2` on small
/// cyclic groups and doubled free orbits.
pub fn multiplicity_corpus() -> Result<Vec<EquivariantModule>> {
    let mut out = Vec::new();
    for (n, w) in [(2u32, [1i64, 1]), (2, [1, 0]), (3, [2, 1]), (3, [1, 1])] {
        let a = cyclic_action(n, &w)?;
        let h = HilbertFunction::finite(a.group(), a.group().all_characters()?.into_iter().map(|l| (l, 2)))?;
        for ideal in order_ideals_with_hilbert(&a, &h, 1 << 14)? {
            out.push(monomial_module(&a, &ideal)?);
        }
    }
    for (n, w, p1, p2) in [(2u32, [1i64, 1], [1, 2], [2, 1]), (3, [2, 1], [1, 1], [2, 0])] {
        let a = cyclic_action(n, &w)?;
        let m1 = free_orbit_module(&a, &[q(p1[0]), q(p1[1])])?;
        let m2 = free_orbit_module(&a, &[q(p2[0]), q(p2[1])])?;
        out.push(m1.direct_sum(&m2)?);
    }
    Ok(out)
}

/// The module after a random change of basis in every component.
pub fn random_conjugate(rng: &mut impl Rng, m: &EquivariantModule) -> Result<EquivariantModule> {
    let changes = m.components().iter().map(|(l, n)| (l.clone(), random_invertible(rng, *n))).collect();
    m.conjugate(&changes)
}

/// A presentation with random invertible frames together with parameters
/// derived on the window `D_- u (supp h n supp θ)`, or `None` when the
/// module is not generated in `D_-` for this θ.
pub fn random_presentation(
    rng: &mut impl Rng,
    m: &EquivariantModule,
    theta: &ThetaVector,
) -> Result<Option<(QuotientPresentation, GitParameters)>> {
    let h = m.hilbert_function();
    let dminus = theta.negative_labels();
    let frames =
        dminus.iter().filter(|l| m.dim(l) > 0).map(|l| (l.clone(), random_invertible(rng, m.dim(l)))).collect();
    let p = QuotientPresentation::new(m.clone(), dminus.clone(), frames)?;
    if !p.is_generated() {
        return Ok(None);
    }
    let window = finite_window(theta, &h)?;
    let mut kappa = default_kappa_minus(&dminus);
    for k in kappa.values_mut() {
        *k = small_rational(rng);
    }
    Ok(Some((p, derive_parameters(theta, &h, &window, &kappa)?)))
}

/// A random rational point with non-zero coordinates.
pub fn random_point(rng: &mut impl Rng, n: usize) -> Vec<Q> {
    (0..n).map(|_| random_nonzero_rational(rng, 5)).collect()
}

/// A random grading of `A`: a random basis of each block, each vector with a
/// random weight in `-2..=2`.
pub fn random_filtration(rng: &mut impl Rng, p: &QuotientPresentation) -> Result<Option<Filtration>> {
    if p.dim_a() < 2 {
        return Ok(None);
    }
    loop {
        let mut pieces = BTreeMap::new();
        let mut weights = BTreeSet::new();
        for (l, n) in p.a_dims() {
            let basis = random_invertible(rng, n);
            let list: Vec<(i64, Subspace)> = (0..n)
                .map(|i| {
                    let w = rng.gen_range(-2..=2);
                    weights.insert(w);
                    (w, Subspace::span(n, vec![basis.column(i)]))
                })
                .collect();
            pieces.insert(l, list);
        }
        if weights.len() >= 2 {
            return Filtration::new(p, pieces).map(Some);
        }
    }
}
