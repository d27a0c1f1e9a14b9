//! Finite windows approximating θ: the error of θ̃ between windows and
//! against θ, convergence along a window sequence, and window search.

use std::collections::{BTreeMap, BTreeSet};

use num::{Signed, Zero};

use crate::error::{Error, Result};
use crate::git::{derive_parameters, theta_tilde, GitParameters};
use crate::group::IrrepLabel;
use crate::hilbert::{HilbertFunction, ThetaVector};
use crate::rational::{format_rational, q, Q};

/// Largest radius tried by [`choose_window`] unless told otherwise.
pub const DEFAULT_MAX_RADIUS: i64 = 32;

/// Strictly increasing windows, each containing `D_-`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowSequence {
    windows: Vec<BTreeSet<IrrepLabel>>,
}

impl WindowSequence {
    pub fn new(theta: &ThetaVector, windows: Vec<BTreeSet<IrrepLabel>>) -> Result<Self> {
        if windows.is_empty() {
            return Err(Error::InvalidWindow("a window sequence needs at least one window".into()));
        }
        let dminus = theta.negative_labels();
        for (i, w) in windows.iter().enumerate() {
            if let Some(l) = dminus.iter().find(|l| !w.contains(*l)) {
                return Err(Error::WindowMissingNegative(l.to_string()));
            }
            if i > 0 && !(windows[i - 1].is_subset(w) && windows[i - 1].len() < w.len()) {
                return Err(Error::InvalidWindow(format!("window #{i} does not strictly contain its predecessor")));
            }
        }
        Ok(WindowSequence { windows })
    }

    pub fn windows(&self) -> &[BTreeSet<IrrepLabel>] {
        &self.windows
    }
}

/// Box of radius `radius` intersected with `(D_- u D_+) n supp h`, plus `D_-`.
pub fn canonical_window(theta: &ThetaVector, h: &HilbertFunction, radius: i64) -> BTreeSet<IrrepLabel> {
    let mut w: BTreeSet<IrrepLabel> =
        theta.group().box_labels(radius).into_iter().filter(|l| !theta.value(l).is_zero() && h.value(l) > 0).collect();
    w.extend(theta.negative_labels());
    w
}

/// Canonical windows for radii `0..=max_radius` that have a label outside
/// `D_-`, without repeats, tagged with their radius.
pub fn canonical_growth(theta: &ThetaVector, h: &HilbertFunction, max_radius: i64) -> Vec<(i64, BTreeSet<IrrepLabel>)> {
    let dminus = theta.negative_labels();
    let mut out: Vec<(i64, BTreeSet<IrrepLabel>)> = Vec::new();
    for r in 0..=max_radius {
        let w = canonical_window(theta, h, r);
        if w.len() == dminus.len() || out.last().is_some_and(|(_, prev)| *prev == w) {
            continue;
        }
        out.push((r, w));
    }
    out
}

fn ratio(a: u64, b: u64) -> Q {
    Q::new(a.into(), b.into())
}

/// `sum_{sigma in D \ D_-} h'(sigma) / h(sigma)`.
fn relative_mass(params: &GitParameters, hp: &HilbertFunction) -> Q {
    params
        .window
        .iter()
        .filter(|l| !params.dminus.contains(*l))
        .map(|l| ratio(hp.value(l), params.h_window[l]))
        .fold(Q::zero(), |a, b| a + b)
}

/// `θ̃_{D~}(h') - θ̃_D(h')` by the closed formula, cross-checked against the
/// direct difference.
pub fn error_between_windows(
    theta: &ThetaVector,
    h: &HilbertFunction,
    hp: &HilbertFunction,
    small: &BTreeSet<IrrepLabel>,
    large: &BTreeSet<IrrepLabel>,
    kappa_minus: &BTreeMap<IrrepLabel, Q>,
) -> Result<Q> {
    if !small.is_subset(large) {
        return Err(Error::InvalidWindow("the first window must be contained in the second".into()));
    }
    let p = derive_parameters(theta, h, small, kappa_minus)?;
    let pt = derive_parameters(theta, h, large, kappa_minus)?;
    let avg = relative_mass(&p, hp) / q(p.d as i64);
    let shift = &pt.s_d / q(pt.d as i64);
    let mut formula = Q::zero();
    for t in large.difference(small) {
        let ht = h.value(t);
        if ht == 0 {
            return Err(Error::InvalidWindow(format!("h vanishes at {t}")));
        }
        formula += (theta.value(t) * q(ht as i64) + &shift) * (ratio(hp.value(t), ht) - &avg);
    }
    let direct = theta_tilde(&pt, h, hp)? - theta_tilde(&p, h, hp)?;
    if formula != direct {
        return Err(Error::Internal(format!(
            "window error formula gives {} but the direct difference is {}",
            format_rational(&formula),
            format_rational(&direct)
        )));
    }
    Ok(formula)
}

/// `θ(h') - θ̃_D(h')` by the closed formula, cross-checked against the direct difference.
pub fn error_to_theta(
    theta: &ThetaVector,
    h: &HilbertFunction,
    hp: &HilbertFunction,
    window: &BTreeSet<IrrepLabel>,
    kappa_minus: &BTreeMap<IrrepLabel, Q>,
) -> Result<Q> {
    let p = derive_parameters(theta, h, window, kappa_minus)?;
    let (_, outside) = theta.restrict_pairing(hp, window)?;
    let formula = outside - relative_mass(&p, hp) / q(p.d as i64) * &p.s_d;
    let direct = theta.pairing(hp)? - theta_tilde(&p, h, hp)?;
    if formula != direct {
        return Err(Error::Internal(format!(
            "error formula gives {} but the direct difference is {}",
            format_rational(&formula),
            format_rational(&direct)
        )));
    }
    Ok(formula)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LimitRow {
    pub window: BTreeSet<IrrepLabel>,
    /// `|θ(h') - θ̃_D(h')|`.
    pub error: Q,
    /// `sum_{tau not in D} |θ_tau| h(tau)`.
    pub majorant: Q,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LimitReport {
    pub rows: Vec<LimitRow>,
    pub bound: Q,
    pub final_below_bound: bool,
    pub majorant_non_increasing: bool,
    /// Every error is at most its majorant.
    pub within_majorant: bool,
    pub pass: bool,
}

pub fn verify_limit(
    theta: &ThetaVector,
    h: &HilbertFunction,
    hp: &HilbertFunction,
    ws: &WindowSequence,
    bound: &Q,
    kappa_minus: &BTreeMap<IrrepLabel, Q>,
) -> Result<LimitReport> {
    let mut rows = Vec::new();
    for w in ws.windows() {
        let error = error_to_theta(theta, h, hp, w, kappa_minus)?.abs();
        let majorant = theta.tail_majorant(h, w)?;
        rows.push(LimitRow { window: w.clone(), error, majorant });
    }
    let final_below_bound = rows.last().is_some_and(|r| r.error < *bound);
    let majorant_non_increasing = rows.windows(2).all(|p| p[1].majorant <= p[0].majorant);
    let within_majorant = rows.iter().all(|r| r.error <= r.majorant);
    Ok(LimitReport {
        rows,
        bound: bound.clone(),
        final_below_bound,
        majorant_non_increasing,
        within_majorant,
        pass: final_below_bound && majorant_non_increasing,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateCertificate {
    pub hprime: HilbertFunction,
    pub theta_value: Q,
    pub theta_tilde_value: Q,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowCertificate {
    pub radius: i64,
    pub window: BTreeSet<IrrepLabel>,
    pub majorant: Q,
    pub theta_min: Q,
    pub params: GitParameters,
    pub candidates: Vec<CandidateCertificate>,
}

/// First canonical window whose tail majorant is below the smallest
/// θ-value of the candidates. The majorant bounds `|θ - θ̃_D|` for this and
/// every larger window, so each candidate stays θ̃-positive from here on.
pub fn choose_window(
    theta: &ThetaVector,
    h: &HilbertFunction,
    candidates: &BTreeSet<HilbertFunction>,
    kappa_minus: &BTreeMap<IrrepLabel, Q>,
    max_radius: i64,
) -> Result<WindowCertificate> {
    if candidates.is_empty() {
        return Err(Error::Precondition("choose_window needs at least one candidate".into()));
    }
    let mut values = Vec::new();
    for c in candidates {
        let v = theta.pairing(c)?;
        if !v.is_positive() {
            return Err(Error::Precondition(format!(
                "candidate has theta value {}, which is not positive",
                format_rational(&v)
            )));
        }
        values.push(v);
    }
    let theta_min = values.iter().min().cloned().expect("non-empty");
    for (radius, window) in canonical_growth(theta, h, max_radius) {
        let majorant = theta.tail_majorant(h, &window)?;
        if majorant >= theta_min {
            continue;
        }
        let params = derive_parameters(theta, h, &window, kappa_minus)?;
        let mut certs = Vec::new();
        for (c, v) in candidates.iter().zip(values) {
            let t = theta_tilde(&params, h, c)?;
            if !t.is_positive() {
                return Err(Error::Internal(format!(
                    "theta tilde of a candidate is {} although the majorant is below the minimum",
                    format_rational(&t)
                )));
            }
            certs.push(CandidateCertificate { hprime: c.clone(), theta_value: v, theta_tilde_value: t });
        }
        return Ok(WindowCertificate { radius, window, majorant, theta_min, params, candidates: certs });
    }
    Err(Error::InvalidWindow(format!("no canonical window up to radius {max_radius} is large enough")))
}
