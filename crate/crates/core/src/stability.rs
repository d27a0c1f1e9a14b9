//! θ-(semi)stability verdicts.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num::{Signed, Zero};
use serde::Serialize;

use crate::equivariant::{enumerate_submodules, EquivariantModule, Exactness, SamplingConfig};
use crate::error::{Error, Result};
use crate::group::IrrepLabel;
use crate::hilbert::{HilbertFunction, ThetaVector};
use crate::rational::Q;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Stable,
    StrictlySemistable,
    Unstable,
    /// Sampled search without a destabilizing witness; nothing is certified.
    NoWitnessFound,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilityVerdict<W> {
    pub status: Status,
    pub witness: Option<W>,
    /// Value of the stability function on the witness.
    pub value: Option<Q>,
    pub exactness: Exactness,
    /// Number of candidates examined.
    pub sample_size: usize,
}

impl<W> StabilityVerdict<W> {
    pub fn is_stable(&self) -> bool {
        self.status == Status::Stable
    }

    pub fn is_semistable(&self) -> bool {
        matches!(self.status, Status::Stable | Status::StrictlySemistable)
    }

    /// Same status and exactness, ignoring the witness.
    pub fn same_outcome<V>(&self, other: &StabilityVerdict<V>) -> bool {
        self.status == other.status && self.exactness == other.exactness
    }
}

/// Picks the minimizing candidate by `(value, key)` and turns it into a verdict.
pub fn classify<W, K: Ord>(
    candidates: impl IntoIterator<Item = (W, Q, K)>,
    exactness: Exactness,
    sample_size: usize,
) -> StabilityVerdict<W> {
    let mut best: Option<(W, Q, K)> = None;
    for (w, v, k) in candidates {
        let better = match &best {
            None => true,
            Some((_, bv, bk)) => match v.cmp(bv) {
                Ordering::Less => true,
                Ordering::Equal => k < *bk,
                Ordering::Greater => false,
            },
        };
        if better {
            best = Some((w, v, k));
        }
    }
    let exact = exactness == Exactness::Exact;
    match best {
        Some((w, v, _)) if v.is_negative() => {
            StabilityVerdict { status: Status::Unstable, witness: Some(w), value: Some(v), exactness, sample_size }
        }
        Some((w, v, _)) if v.is_zero() => StabilityVerdict {
            status: if exact { Status::StrictlySemistable } else { Status::NoWitnessFound },
            witness: Some(w),
            value: Some(v),
            exactness,
            sample_size,
        },
        _ => StabilityVerdict {
            status: if exact { Status::Stable } else { Status::NoWitnessFound },
            witness: None,
            value: None,
            exactness,
            sample_size,
        },
    }
}

/// Values of `h'` on the sorted union of all window labels involved.
fn dense_key(h: &HilbertFunction, labels: &BTreeSet<IrrepLabel>) -> (Vec<u64>, HilbertFunction) {
    (labels.iter().map(|l| h.value(l)).collect(), h.clone())
}

/// Verdict of θ over the given set of sub-Hilbert functions of `h`.
pub fn theta_verdict(
    theta: &ThetaVector,
    h: &HilbertFunction,
    subs: &BTreeSet<HilbertFunction>,
    exactness: Exactness,
) -> Result<StabilityVerdict<HilbertFunction>> {
    let total = theta.pairing(h)?;
    if !total.is_zero() {
        return Err(Error::NonZeroPairing(total));
    }
    let labels: BTreeSet<IrrepLabel> = subs.iter().chain([h]).flat_map(|x| x.window().keys().cloned()).collect();
    let mut candidates = Vec::new();
    for s in subs {
        if s.is_zero() || s == h {
            continue;
        }
        let v = theta.pairing(s)?;
        candidates.push((s.clone(), v, dense_key(s, &labels)));
    }
    Ok(classify(candidates, exactness, subs.len()))
}

/// θ-verdict of a module, over all submodules or over those generated in `D_-`.
pub fn module_theta_verdict(
    theta: &ThetaVector,
    m: &EquivariantModule,
    restrict_to_dminus: bool,
    config: &SamplingConfig,
) -> Result<StabilityVerdict<HilbertFunction>> {
    if theta.group() != m.group() {
        return Err(Error::Precondition(format!(
            "theta is defined on {} but the module on {}",
            theta.group(),
            m.group()
        )));
    }
    let dminus = theta.negative_labels();
    let e = enumerate_submodules(m, restrict_to_dminus.then_some(&dminus), config)?;
    let subs = e.hilbert_functions(m.group());
    let mut v = theta_verdict(theta, &m.hilbert_function(), &subs, e.exactness)?;
    v.sample_size = e.sample_size;
    Ok(v)
}

/// Whether the components indexed by `dminus` generate the whole module.
pub fn generated_in_dminus(m: &EquivariantModule, dminus: &BTreeSet<IrrepLabel>) -> bool {
    m.generated_by(dminus) == m.full()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertSchemeReport {
    pub verdict: StabilityVerdict<HilbertFunction>,
    pub theta_stable: bool,
    /// Generated by the invariant line.
    pub cyclic: bool,
    pub agree: bool,
}

/// With `h(rho_0) = 1` and `D_- = {rho_0}`, θ-stability should coincide with
/// the module being generated by its invariant line. Both sides are computed
/// independently and compared.
pub fn hilbert_scheme_mode_check(
    theta: &ThetaVector,
    m: &EquivariantModule,
    config: &SamplingConfig,
) -> Result<HilbertSchemeReport> {
    let trivial = m.group().trivial();
    if m.dim(&trivial) != 1 {
        return Err(Error::Precondition(format!(
            "the invariant component must be one-dimensional, found dimension {}",
            m.dim(&trivial)
        )));
    }
    let dminus = theta.negative_labels();
    if dminus != [trivial.clone()].into_iter().collect() {
        return Err(Error::Precondition("theta must be negative exactly on the trivial representation".into()));
    }
    if let Some(l) = m.components().keys().find(|l| **l != trivial && !theta.value(l).is_positive()) {
        return Err(Error::Precondition(format!("theta must be positive on {l}")));
    }
    let verdict = module_theta_verdict(theta, m, false, config)?;
    let theta_stable = verdict.is_stable();
    let cyclic = generated_in_dminus(m, &dminus);
    Ok(HilbertSchemeReport { agree: theta_stable == cyclic, verdict, theta_stable, cyclic })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equivariant::{free_orbit_module, monomial_module, trivial_module, ActionSpec};
    use crate::group::GroupSpec;
    use crate::rational::{frac, q};

    fn ch(x: i64) -> IrrepLabel {
        IrrepLabel::Character(vec![x])
    }

    fn z3() -> GroupSpec {
        GroupSpec::finite_abelian(&[3]).unwrap()
    }

    fn z3_action() -> ActionSpec {
        ActionSpec::new(z3(), vec![("x".into(), ch(2)), ("y".into(), ch(1))]).unwrap()
    }

    fn theta(vals: &[Q]) -> ThetaVector {
        let g = GroupSpec::finite_abelian(&[vals.len() as u32]).unwrap();
        ThetaVector::finite(&g, vals.iter().enumerate().map(|(i, v)| (ch(i as i64), v.clone()))).unwrap()
    }

    fn nilpotent() -> EquivariantModule {
        let s: BTreeSet<Vec<u32>> = [vec![0, 0], vec![1, 0], vec![2, 0]].into_iter().collect();
        monomial_module(&z3_action(), &s).unwrap()
    }

    #[test]
    fn restricted_search_misses_zero_weight_submodules() {
        let th = theta(&[q(-1), q(0), q(1)]);
        let cfg = SamplingConfig::default();
        let full = module_theta_verdict(&th, &nilpotent(), false, &cfg).unwrap();
        let restricted = module_theta_verdict(&th, &nilpotent(), true, &cfg).unwrap();
        assert_eq!(full.status, Status::StrictlySemistable);
        assert_eq!(full.witness.as_ref().unwrap().value(&ch(1)), 1);
        assert_eq!(restricted.status, Status::Stable);
        assert!(full.is_semistable() && restricted.is_semistable());
    }

    #[test]
    fn theta_examples() {
        let th = theta(&[q(-2), q(-1), q(3)]);
        let cfg = SamplingConfig::default();
        let free = free_orbit_module(&z3_action(), &[q(1), q(0)]).unwrap();
        let v = module_theta_verdict(&th, &free, false, &cfg).unwrap();
        assert_eq!((v.status, v.exactness), (Status::Stable, Exactness::Exact));

        let v = module_theta_verdict(&th, &nilpotent(), false, &cfg).unwrap();
        assert_eq!(v.status, Status::Unstable);
        let w = v.witness.unwrap();
        assert_eq!((w.value(&ch(0)), w.value(&ch(1)), w.value(&ch(2))), (0, 1, 0));
        assert_eq!(v.value, Some(q(-1)));

        let off = theta(&[q(-2), q(-1), frac(7, 2)]);
        assert_eq!(module_theta_verdict(&off, &free, false, &cfg), Err(Error::NonZeroPairing(frac(1, 2))));
    }

    #[test]
    fn generated_examples() {
        let dminus: BTreeSet<_> = [ch(0), ch(1)].into_iter().collect();
        assert!(generated_in_dminus(&nilpotent(), &dminus));
        let split = trivial_module(&z3_action(), [(ch(0), 1), (ch(2), 1)].into_iter().collect()).unwrap();
        assert!(!generated_in_dminus(&split, &[ch(0)].into_iter().collect()));
    }

    #[test]
    fn hilbert_scheme_examples() {
        let z2 = GroupSpec::finite_abelian(&[2]).unwrap();
        let a = ActionSpec::new(z2, vec![("x".into(), ch(1)), ("y".into(), ch(1))]).unwrap();
        let th = theta(&[q(-1), q(1)]);
        let cfg = SamplingConfig::default();
        let s: BTreeSet<Vec<u32>> = [vec![0, 0], vec![1, 0]].into_iter().collect();
        let r = hilbert_scheme_mode_check(&th, &monomial_module(&a, &s).unwrap(), &cfg).unwrap();
        assert!(r.theta_stable && r.cyclic && r.agree);

        let split = trivial_module(&a, [(ch(0), 1), (ch(1), 1)].into_iter().collect()).unwrap();
        let r = hilbert_scheme_mode_check(&th, &split, &cfg).unwrap();
        assert!(!r.theta_stable && !r.cyclic && r.agree);
        let w = r.verdict.witness.unwrap();
        assert_eq!((w.value(&ch(0)), w.value(&ch(1))), (1, 0));

        let doubled = trivial_module(&a, [(ch(0), 2), (ch(1), 1)].into_iter().collect()).unwrap();
        assert!(matches!(hilbert_scheme_mode_check(&th, &doubled, &cfg), Err(Error::Precondition(_))));
    }

    #[test]
    fn sampled_never_stable() {
        let v: StabilityVerdict<u8> = classify([(1u8, q(1), 0)], Exactness::Sampled, 1);
        assert_eq!(v.status, Status::NoWitnessFound);
        let v: StabilityVerdict<u8> = classify([(1u8, q(-1), 0)], Exactness::Sampled, 1);
        assert_eq!(v.status, Status::Unstable);
    }

    #[test]
    fn tie_break_is_lexicographic() {
        let g = z3();
        let th = ThetaVector::finite(&g, [(ch(0), q(-1)), (ch(1), q(-1)), (ch(2), q(2))]).unwrap();
        let h = HilbertFunction::finite(&g, [(ch(0), 1), (ch(1), 1), (ch(2), 1)]).unwrap();
        let a = HilbertFunction::finite(&g, [(ch(0), 1)]).unwrap();
        let b = HilbertFunction::finite(&g, [(ch(1), 1)]).unwrap();
        let subs: BTreeSet<_> = [a, b.clone()].into_iter().collect();
        let v = theta_verdict(&th, &h, &subs, Exactness::Exact).unwrap();
        // (0,1,0) < (1,0,0)
        assert_eq!(v.witness, Some(b));
    }
}
