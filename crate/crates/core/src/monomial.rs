//! Monomial (staircase) constellations of a diagonal action with a given
//! finite Hilbert function.

use std::collections::{BTreeMap, BTreeSet};

use num::Zero;

use crate::equivariant::{
    monomial_module, ActionSpec, EquivariantModule, GradedSubspace, QuotientPresentation, SamplingConfig,
};
use crate::error::{Error, Result};
use crate::git::{default_kappa_minus, derive_parameters, git_verdict, GitParameters};
use crate::group::IrrepLabel;
use crate::hilbert::{HilbertFunction, ThetaVector};
use crate::quotient::monomial_name;
use crate::stability::{module_theta_verdict, StabilityVerdict};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialConstellation {
    /// Standard monomials, an order ideal.
    pub monomials: BTreeSet<Vec<u32>>,
    pub module: EquivariantModule,
    pub theta: StabilityVerdict<HilbertFunction>,
    /// `None` when the module is not generated in `D_-` or the window has no label outside `D_-`.
    pub git: Option<StabilityVerdict<GradedSubspace>>,
}

impl MonomialConstellation {
    pub fn names(&self) -> Vec<String> {
        self.monomials.iter().map(|m| monomial_name(self.module.action(), m)).collect()
    }
}

/// All order ideals whose character counts equal `h`. Grown one corner at a
/// time; `cap` bounds the number of partial ideals kept per size.
pub fn order_ideals_with_hilbert(
    action: &ActionSpec,
    h: &HilbertFunction,
    cap: usize,
) -> Result<Vec<BTreeSet<Vec<u32>>>> {
    if !action.group().is_diagonal() {
        return Err(Error::Precondition("monomial constellations need a diagonalizable group".into()));
    }
    let total = h.total().ok_or_else(|| Error::Precondition("the Hilbert function must have finite support".into()))?;
    if total == 0 {
        return Ok(Vec::new());
    }
    let n = action.len();
    let origin = vec![0u32; n];
    if h.value(&action.monomial_character(&origin)) == 0 {
        return Ok(Vec::new());
    }
    let mut level: BTreeSet<BTreeSet<Vec<u32>>> = [[origin].into_iter().collect()].into_iter().collect();
    for _ in 1..total {
        let mut next = BTreeSet::new();
        for ideal in &level {
            let mut counts: BTreeMap<IrrepLabel, u64> = BTreeMap::new();
            for m in ideal {
                *counts.entry(action.monomial_character(m)).or_default() += 1;
            }
            let corners: BTreeSet<Vec<u32>> = ideal
                .iter()
                .flat_map(|m| {
                    (0..n).map(move |v| {
                        let mut c = m.clone();
                        c[v] += 1;
                        c
                    })
                })
                .filter(|c| !ideal.contains(c))
                .filter(|c| {
                    (0..n).all(|v| {
                        c[v] == 0 || {
                            let mut d = c.clone();
                            d[v] -= 1;
                            ideal.contains(&d)
                        }
                    })
                })
                .collect();
            for c in corners {
                let l = action.monomial_character(&c);
                if counts.get(&l).copied().unwrap_or(0) >= h.value(&l) {
                    continue;
                }
                let mut grown = ideal.clone();
                grown.insert(c);
                next.insert(grown);
                if next.len() > cap {
                    return Err(Error::CapExceeded { cap });
                }
            }
        }
        level = next;
    }
    Ok(level.into_iter().collect())
}

/// Window used for the GIT side: `D_-` and the labels of `supp h` where θ is non-zero.
pub fn finite_window(theta: &ThetaVector, h: &HilbertFunction) -> Result<BTreeSet<IrrepLabel>> {
    let support =
        h.support().ok_or_else(|| Error::Precondition("the Hilbert function must have finite support".into()))?;
    let mut w: BTreeSet<IrrepLabel> = support.into_iter().filter(|l| !theta.value(l).is_zero()).collect();
    w.extend(theta.negative_labels());
    Ok(w)
}

fn git_side(
    theta: &ThetaVector,
    h: &HilbertFunction,
    m: &EquivariantModule,
    params: &Option<GitParameters>,
    config: &SamplingConfig,
) -> Result<Option<StabilityVerdict<GradedSubspace>>> {
    let Some(params) = params else { return Ok(None) };
    let p = QuotientPresentation::with_identity_frames(m.clone(), theta.negative_labels())?;
    if !p.is_generated() {
        return Ok(None);
    }
    debug_assert_eq!(&m.hilbert_function(), h);
    git_verdict(&p, params, config).map(Some)
}

/// Every monomial constellation with Hilbert function `h`, with its θ- and GIT-verdicts.
pub fn enumerate_monomial_constellations(
    action: &ActionSpec,
    h: &HilbertFunction,
    theta: &ThetaVector,
    config: &SamplingConfig,
) -> Result<Vec<MonomialConstellation>> {
    if theta.group() != action.group() || h.group() != action.group() {
        return Err(Error::Precondition("θ, h and the action must share one group".into()));
    }
    let ideals = order_ideals_with_hilbert(action, h, config.cap)?;
    if ideals.is_empty() {
        return Ok(Vec::new());
    }
    let window = finite_window(theta, h)?;
    let dminus = theta.negative_labels();
    let params = if window.iter().any(|l| !dminus.contains(l)) {
        Some(derive_parameters(theta, h, &window, &default_kappa_minus(&dminus))?)
    } else {
        None
    };
    let mut out = Vec::with_capacity(ideals.len());
    for monomials in ideals {
        let module = monomial_module(action, &monomials)?;
        let verdict = module_theta_verdict(theta, &module, false, config)?;
        let git = git_side(theta, h, &module, &params, config)?;
        out.push(MonomialConstellation { monomials, module, theta: verdict, git });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupSpec;
    use crate::rational::q;
    use crate::stability::Status;
    use proptest::prelude::*;

    fn ch(x: i64) -> IrrepLabel {
        IrrepLabel::Character(vec![x])
    }

    fn cyclic(n: u32, weights: &[i64]) -> ActionSpec {
        let g = GroupSpec::finite_abelian(&[n]).unwrap();
        let vars = weights.iter().enumerate().map(|(i, w)| (["x", "y", "z"][i].to_string(), ch(*w))).collect();
        ActionSpec::new(g, vars).unwrap()
    }

    fn uniform(a: &ActionSpec) -> (HilbertFunction, ThetaVector) {
        let g = a.group();
        let labels = g.all_characters().unwrap();
        let n = labels.len() as i64;
        let h = HilbertFunction::finite(g, labels.iter().map(|l| (l.clone(), 1))).unwrap();
        let th =
            ThetaVector::finite(g, labels.iter().map(|l| (l.clone(), if *l == g.trivial() { q(1 - n) } else { q(1) })))
                .unwrap();
        (h, th)
    }

    fn stable_names(a: &ActionSpec) -> BTreeSet<Vec<String>> {
        let (h, th) = uniform(a);
        enumerate_monomial_constellations(a, &h, &th, &SamplingConfig::default())
            .unwrap()
            .into_iter()
            .filter(|c| c.theta.status == Status::Stable)
            .map(|c| c.names())
            .collect()
    }

    fn names(items: &[&[&str]]) -> BTreeSet<Vec<String>> {
        items.iter().map(|v| v.iter().map(|s| s.to_string()).collect()).collect()
    }

    #[test]
    fn g_hilb_examples() {
        assert_eq!(stable_names(&cyclic(2, &[1, 1])), names(&[&["1", "x"], &["1", "y"]]));
        assert_eq!(
            stable_names(&cyclic(3, &[2, 1])),
            names(&[&["1", "x", "x^2"], &["1", "y", "x"], &["1", "y", "y^2"]])
        );
    }

    #[test]
    fn git_agrees_on_examples() {
        let a = cyclic(3, &[2, 1]);
        let (h, th) = uniform(&a);
        for c in enumerate_monomial_constellations(&a, &h, &th, &SamplingConfig::default()).unwrap() {
            let git = c.git.expect("cyclic");
            assert_eq!(git.status, c.theta.status);
        }
    }

    #[test]
    fn zero_h_is_empty() {
        let a = cyclic(3, &[2, 1]);
        let (_, th) = uniform(&a);
        let h = HilbertFunction::zero(a.group());
        assert!(order_ideals_with_hilbert(&a, &h, 10).unwrap().is_empty());
        assert!(enumerate_monomial_constellations(&a, &h, &th, &SamplingConfig::default()).unwrap().is_empty());
    }

    #[test]
    fn cap_is_enforced() {
        let a = cyclic(5, &[1, 4]);
        let (h, _) = uniform(&a);
        assert_eq!(order_ideals_with_hilbert(&a, &h, 2), Err(Error::CapExceeded { cap: 2 }));
    }

    /// Every subset of the monomials of degree below `n`, filtered.
    fn oracle(a: &ActionSpec, h: &HilbertFunction) -> BTreeSet<BTreeSet<Vec<u32>>> {
        let n = h.total().unwrap() as u32;
        let vars = a.len();
        let mut box_monomials = vec![Vec::new()];
        for _ in 0..vars {
            box_monomials = box_monomials
                .into_iter()
                .flat_map(|p: Vec<u32>| {
                    (0..n).map(move |e| {
                        let mut m = p.clone();
                        m.push(e);
                        m
                    })
                })
                .collect();
        }
        box_monomials.retain(|m| m.iter().sum::<u32>() < n);
        let mut out = BTreeSet::new();
        for mask in 0u64..(1 << box_monomials.len()) {
            if mask.count_ones() != n {
                continue;
            }
            let s: BTreeSet<Vec<u32>> =
                (0..box_monomials.len()).filter(|i| mask >> i & 1 == 1).map(|i| box_monomials[i].clone()).collect();
            let mut counts: BTreeMap<IrrepLabel, u64> = BTreeMap::new();
            for m in &s {
                *counts.entry(a.monomial_character(m)).or_default() += 1;
            }
            if crate::equivariant::is_order_ideal(&s) && counts.iter().all(|(l, c)| h.value(l) == *c) {
                out.insert(s);
            }
        }
        out
    }

    #[test]
    fn matches_oracle_on_small_groups() {
        for (n, w) in [(2, vec![1, 1]), (3, vec![2, 1]), (3, vec![1, 1]), (4, vec![1, 3]), (4, vec![1, 1])] {
            let a = cyclic(n, &w);
            let (h, _) = uniform(&a);
            let found: BTreeSet<_> = order_ideals_with_hilbert(&a, &h, 1 << 12).unwrap().into_iter().collect();
            assert_eq!(found, oracle(&a, &h), "Z/{n} weights {w:?}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn ideals_have_requested_counts(n in 2u32..5, w in proptest::collection::vec(0i64..4, 2..4)) {
            let w: Vec<i64> = w.iter().map(|x| x % n as i64).collect();
            let a = cyclic(n, &w);
            let (h, _) = uniform(&a);
            for ideal in order_ideals_with_hilbert(&a, &h, 1 << 12).unwrap() {
                prop_assert!(crate::equivariant::is_order_ideal(&ideal));
                let m = monomial_module(&a, &ideal).unwrap();
                prop_assert_eq!(m.hilbert_function(), h.clone());
            }
        }
    }
}
