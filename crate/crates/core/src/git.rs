//! GIT parameters derived from θ, Mumford weights of gradings of `A`, the
//! finite-window function θ̃, saturation and GIT verdicts.

use std::collections::{BTreeMap, BTreeSet};

use num::bigint::BigInt;
use num::{One, Signed, Zero};

use crate::equivariant::{
    coordinate_atoms, random_graded_subspace, Exactness, GradedSubspace, QuotientPresentation, SamplingConfig,
};
use crate::error::{Error, Result};
use crate::group::{GroupSpec, IrrepLabel};
use crate::hilbert::{HilbertFunction, ThetaVector};
use crate::linalg::Subspace;
use crate::rational::{common_denominator, format_rational, q, Q};
use crate::stability::{classify, theta_verdict, StabilityVerdict};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GitParameters {
    pub window: BTreeSet<IrrepLabel>,
    pub dminus: BTreeSet<IrrepLabel>,
    /// Defined on the whole window.
    pub kappa: BTreeMap<IrrepLabel, Q>,
    /// Defined on `D_-`.
    pub chi: BTreeMap<IrrepLabel, Q>,
    /// `h` restricted to the window.
    pub h_window: BTreeMap<IrrepLabel, u64>,
    pub dim_a: u64,
    pub kappa_f: Q,
    pub s_d: Q,
    pub d: usize,
}

impl GitParameters {
    /// Smallest positive integer making every κ and χ integral.
    pub fn scaling_factor(&self) -> BigInt {
        common_denominator(self.kappa.values().chain(self.chi.values()))
    }

    /// `sum_rho chi_rho h(rho)`; zero for admissible parameters.
    pub fn admissibility(&self) -> Q {
        self.chi.iter().map(|(l, c)| c * q(self.h_window[l] as i64)).fold(Q::zero(), |a, b| a + b)
    }

    /// `kappa(F') = sum_{sigma in D} kappa_sigma h'(sigma)`.
    pub fn kappa_of(&self, dims: &BTreeMap<IrrepLabel, usize>) -> Q {
        self.kappa.iter().map(|(l, k)| k * q(dims.get(l).copied().unwrap_or(0) as i64)).fold(Q::zero(), |a, b| a + b)
    }

    /// `chi(A') = sum_{rho in D_-} chi_rho dim A'_rho`.
    pub fn chi_of(&self, dims: &BTreeMap<IrrepLabel, usize>) -> Q {
        self.chi.iter().map(|(l, c)| c * q(dims.get(l).copied().unwrap_or(0) as i64)).fold(Q::zero(), |a, b| a + b)
    }

    /// Coefficient of `h'(rho)` in θ̃.
    pub fn theta_tilde_coefficient(&self, label: &IrrepLabel) -> Q {
        let k = self.kappa.get(label).cloned().unwrap_or_else(Q::zero);
        match self.chi.get(label) {
            Some(c) => k + c - &self.kappa_f / q(self.dim_a as i64),
            None => k,
        }
    }

    /// θ̃ as a finitely supported stability parameter on the window.
    pub fn theta_tilde_vector(&self, group: &GroupSpec) -> Result<ThetaVector> {
        ThetaVector::finite(group, self.window.iter().map(|l| (l.clone(), self.theta_tilde_coefficient(l))))
    }

    /// Joint scaling of κ and χ by `t > 0`.
    pub fn scaled(&self, t: &Q) -> Result<GitParameters> {
        if !t.is_positive() {
            return Err(Error::Precondition("scaling factor must be positive".into()));
        }
        let mut out = self.clone();
        out.kappa.values_mut().for_each(|k| *k *= t);
        out.chi.values_mut().for_each(|c| *c *= t);
        out.kappa_f *= t;
        Ok(out)
    }

    /// Re-checks the defining inequalities and the admissibility identity.
    pub fn verify(&self) -> Result<()> {
        let adm = self.admissibility();
        if !adm.is_zero() {
            return Err(Error::Internal(format!("sum chi_rho h(rho) = {} is not zero", format_rational(&adm))));
        }
        if let Some((l, _)) = self.kappa.iter().find(|(_, k)| !k.is_positive()) {
            return Err(Error::Internal(format!("kappa at {l} is not positive")));
        }
        let bound = &self.kappa_f / q(self.dim_a as i64);
        if let Some((l, _)) = self.chi.iter().find(|(_, c)| **c >= bound) {
            return Err(Error::Internal(format!("chi at {l} is not below kappa(F)/dim A")));
        }
        Ok(())
    }
}

pub fn default_kappa_minus(dminus: &BTreeSet<IrrepLabel>) -> BTreeMap<IrrepLabel, Q> {
    dminus.iter().map(|l| (l.clone(), Q::one())).collect()
}

/// κ on `D \ D_-` and χ on `D_-` from θ, `h`, the window and κ on `D_-`.
/// Missing entries of `kappa_minus` default to 1.
pub fn derive_parameters(
    theta: &ThetaVector,
    h: &HilbertFunction,
    window: &BTreeSet<IrrepLabel>,
    kappa_minus: &BTreeMap<IrrepLabel, Q>,
) -> Result<GitParameters> {
    let total = theta.pairing(h)?;
    if !total.is_zero() {
        return Err(Error::NonZeroPairing(total));
    }
    let dminus = theta.negative_labels();
    if let Some(l) = dminus.iter().find(|l| !window.contains(*l)) {
        return Err(Error::WindowMissingNegative(l.to_string()));
    }
    for l in window {
        theta.group().validate(l)?;
        if dminus.contains(l) {
            continue;
        }
        if !theta.value(l).is_positive() {
            return Err(Error::InvalidWindow(format!("theta vanishes at {l}, which is outside D_- and D_+")));
        }
        if h.value(l) == 0 {
            return Err(Error::InvalidWindow(format!("h vanishes at {l}")));
        }
    }
    for (l, k) in kappa_minus {
        if !dminus.contains(l) {
            return Err(Error::Precondition(format!("kappa override for {l}, which is not in D_-")));
        }
        if !k.is_positive() {
            return Err(Error::Precondition(format!("kappa at {l} must be positive")));
        }
    }
    let d = window.len() - dminus.len();
    if d == 0 {
        return Err(Error::InvalidWindow("the window has no label outside D_-".into()));
    }
    let dim_a: u64 = dminus.iter().map(|l| h.value(l)).sum();
    if dim_a == 0 {
        return Err(Error::Precondition("h vanishes on D_-".into()));
    }
    let (_, s_d) = theta.restrict_pairing(h, window)?;
    let h_window: BTreeMap<IrrepLabel, u64> = window.iter().map(|l| (l.clone(), h.value(l))).collect();
    let mut kappa = BTreeMap::new();
    for l in window {
        let k = if dminus.contains(l) {
            kappa_minus.get(l).cloned().unwrap_or_else(Q::one)
        } else {
            theta.value(l) + &s_d / q((d as u64 * h_window[l]) as i64)
        };
        kappa.insert(l.clone(), k);
    }
    let kappa_f = kappa.iter().map(|(l, k)| k * q(h_window[l] as i64)).fold(Q::zero(), |a, b| a + b);
    let avg = &kappa_f / q(dim_a as i64);
    let chi = dminus.iter().map(|l| (l.clone(), theta.value(l) - &kappa[l] + &avg)).collect();
    let params = GitParameters { window: window.clone(), dminus, kappa, chi, h_window, dim_a, kappa_f, s_d, d };
    params.verify()?;
    Ok(params)
}

fn check_compatible(p: &QuotientPresentation, params: &GitParameters) -> Result<()> {
    if p.dminus() != &params.dminus {
        return Err(Error::Precondition("presentation and parameters disagree on D_-".into()));
    }
    for (l, n) in &params.h_window {
        if p.module().dim(l) as u64 != *n {
            return Err(Error::Precondition(format!("module has dimension {} at {l} but h = {n}", p.module().dim(l))));
        }
    }
    Ok(())
}

fn check_proper(p: &QuotientPresentation, a: &GradedSubspace) -> Result<()> {
    if a.is_zero() || *a == p.full_a() {
        return Err(Error::Precondition("A' must be a non-zero proper graded subspace of A".into()));
    }
    Ok(())
}

/// `mu(A') = dim A (kappa(F') + chi(A')) - dim A' kappa(F)` with `F'` generated by `phi(A')`.
pub fn mu_one_step(p: &QuotientPresentation, params: &GitParameters, a: &GradedSubspace) -> Result<Q> {
    check_compatible(p, params)?;
    check_proper(p, a)?;
    let f = p.generated_submodule(a)?;
    Ok(mu_value(params, &f.dims(), &a.dims()))
}

fn mu_value(params: &GitParameters, f_dims: &BTreeMap<IrrepLabel, usize>, a_dims: &BTreeMap<IrrepLabel, usize>) -> Q {
    let dim_a = q(params.dim_a as i64);
    let dim_sub = q(a_dims.values().sum::<usize>() as i64);
    &dim_a * (params.kappa_of(f_dims) + params.chi_of(a_dims)) - dim_sub * &params.kappa_f
}

/// A grading `A_rho = sum_n A_rho^n` of every block of `A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Filtration {
    pieces: BTreeMap<IrrepLabel, BTreeMap<i64, Subspace>>,
}

impl Filtration {
    /// Pieces of equal weight in the same block are added together.
    pub fn new(p: &QuotientPresentation, pieces: BTreeMap<IrrepLabel, Vec<(i64, Subspace)>>) -> Result<Self> {
        let dims = p.a_dims();
        let mut merged: BTreeMap<IrrepLabel, BTreeMap<i64, Subspace>> = BTreeMap::new();
        for (l, list) in pieces {
            let Some(&n) = dims.get(&l) else {
                return Err(Error::Precondition(format!("grading given on {l}, which is not a block of A")));
            };
            let mut total = Subspace::zero(n);
            let mut count = 0;
            let block = merged.entry(l.clone()).or_default();
            for (w, s) in list {
                if s.ambient() != n {
                    return Err(Error::Precondition(format!("graded piece at {l} has the wrong ambient dimension")));
                }
                count += s.dim();
                total = total.sum(&s);
                let grown = match block.get(&w) {
                    Some(existing) => existing.sum(&s),
                    None => s,
                };
                block.insert(w, grown);
            }
            if count != n || !total.is_full() {
                return Err(Error::Precondition(format!(
                    "graded pieces at {l} do not form a direct sum decomposition"
                )));
            }
            block.retain(|_, s| !s.is_zero());
        }
        if let Some(l) = dims.keys().find(|l| !merged.contains_key(*l)) {
            return Err(Error::Precondition(format!("no grading given on block {l}")));
        }
        let f = Filtration { pieces: merged };
        if f.weights().len() < 2 {
            return Err(Error::Precondition("a filtration needs at least two distinct weights".into()));
        }
        Ok(f)
    }

    /// The two-weight grading attached to `A'`: weight `dim A - dim A'` on
    /// `A'` and `-dim A'` on its coordinate complement.
    pub fn one_step(p: &QuotientPresentation, a: &GradedSubspace) -> Result<Self> {
        check_proper(p, a)?;
        let dim_a = p.dim_a() as i64;
        let dim_sub = a.total_dim() as i64;
        let mut pieces = BTreeMap::new();
        for (l, n) in p.a_dims() {
            let sub = a.get(&l).cloned().unwrap_or_else(|| Subspace::zero(n));
            let complement = coordinate_complement(&sub);
            pieces.insert(l, vec![(dim_a - dim_sub, sub), (-dim_sub, complement)]);
        }
        Filtration::new(p, pieces)
    }

    pub fn weights(&self) -> BTreeSet<i64> {
        self.pieces.values().flat_map(|b| b.keys().copied()).collect()
    }

    pub fn pieces(&self) -> &BTreeMap<IrrepLabel, BTreeMap<i64, Subspace>> {
        &self.pieces
    }

    /// `A^n`.
    pub fn graded_piece(&self, n: i64) -> GradedSubspace {
        GradedSubspace::new(self.pieces.iter().filter_map(|(l, b)| Some((l.clone(), b.get(&n)?.clone()))).collect())
    }

    /// `A^{>= n}`.
    pub fn at_least(&self, n: i64) -> GradedSubspace {
        let mut parts = BTreeMap::new();
        for (l, b) in &self.pieces {
            let ambient = b.values().next().map_or(0, Subspace::ambient);
            let s = b.range(n..).fold(Subspace::zero(ambient), |acc, (_, s)| acc.sum(s));
            parts.insert(l.clone(), s);
        }
        GradedSubspace::new(parts)
    }

    /// The grading seen after reframing by `gamma`: every piece replaced by `gamma^{-1}` of it.
    pub fn pulled_by(&self, gamma: &crate::equivariant::GaugeElement) -> Filtration {
        let pieces = self
            .pieces
            .iter()
            .map(|(l, b)| {
                let block = b
                    .iter()
                    .map(|(w, s)| (*w, gamma.pull(&GradedSubspace::single(l.clone(), s.clone())).get(l).cloned()))
                    .map(|(w, s)| (w, s.unwrap_or_else(|| Subspace::zero(0))))
                    .filter(|(_, s)| !s.is_zero())
                    .collect();
                (l.clone(), block)
            })
            .collect();
        Filtration { pieces }
    }
}

/// Span of the standard basis vectors that are not pivots of `s`.
pub fn coordinate_complement(s: &Subspace) -> Subspace {
    let pivots: BTreeSet<usize> =
        s.basis().iter().map(|row| row.iter().position(|x| !x.is_zero()).expect("basis rows are non-zero")).collect();
    let free: Vec<usize> = (0..s.ambient()).filter(|i| !pivots.contains(i)).collect();
    Subspace::coordinate(s.ambient(), &free)
}

/// Both closed forms of the Mumford weight of a grading.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MuForms {
    /// `sum_n n (kappa(F^[n]) + chi(A^n))`.
    pub graded: Q,
    /// `sum_{n=-N+1}^{M} (kappa(F^{>=n}) + chi(A^{>=n})) - N kappa(F)`.
    pub telescoped: Q,
}

/// Mumford weight of the grading, computed in both forms and cross-checked.
pub fn mu_filtration(p: &QuotientPresentation, params: &GitParameters, f: &Filtration) -> Result<MuForms> {
    check_compatible(p, params)?;
    if !p.is_generated() {
        return Err(Error::Precondition("the frames do not generate the module".into()));
    }
    if f.pieces.keys().cloned().collect::<BTreeSet<_>>() != p.a_dims().keys().cloned().collect() {
        return Err(Error::Precondition("filtration blocks do not match A".into()));
    }
    let weights: Vec<i64> = f.weights().into_iter().collect();
    let generated =
        |n: i64| -> Result<BTreeMap<IrrepLabel, usize>> { Ok(p.generated_submodule(&f.at_least(n))?.dims()) };
    let kappa_at_least: Vec<Q> = weights.iter().map(|&n| Ok(params.kappa_of(&generated(n)?))).collect::<Result<_>>()?;

    let mut graded = Q::zero();
    for (i, &n) in weights.iter().enumerate() {
        let above = kappa_at_least.get(i + 1).cloned().unwrap_or_else(Q::zero);
        let quotient = &kappa_at_least[i] - above;
        graded += q(n) * (quotient + params.chi_of(&f.graded_piece(n).dims()));
    }

    let low = weights[0];
    let high = *weights.last().expect("at least two weights");
    let mut telescoped = -q(-low) * &params.kappa_f;
    let mut idx = 0;
    for n in low + 1..=high {
        while weights[idx] < n {
            idx += 1;
        }
        telescoped += &kappa_at_least[idx] + params.chi_of(&f.at_least(n).dims());
    }

    if graded != telescoped {
        return Err(Error::Internal(format!(
            "graded weight {} differs from telescoped weight {}",
            format_rational(&graded),
            format_rational(&telescoped)
        )));
    }
    Ok(MuForms { graded, telescoped })
}

/// θ̃(h') for the window and parameters.
pub fn theta_tilde(params: &GitParameters, h: &HilbertFunction, hp: &HilbertFunction) -> Result<Q> {
    if !hp.le_on(h, params.window.iter()) {
        return Err(Error::Precondition("h' must not exceed h on the window".into()));
    }
    Ok(params
        .window
        .iter()
        .map(|l| params.theta_tilde_coefficient(l) * q(hp.value(l) as i64))
        .fold(Q::zero(), |a, b| a + b))
}

/// `(A~', F')` with `F'` generated by `phi(A')` and `A~'_rho = phi_rho^{-1}(F'_rho)`.
pub fn saturate(p: &QuotientPresentation, a: &GradedSubspace) -> Result<(GradedSubspace, GradedSubspace)> {
    let f = p.generated_submodule(a)?;
    Ok((p.pull_back(&f), f))
}

/// Proper non-zero graded subspaces of `A` used for the one-step criterion:
/// all coordinate subspaces (exhaustive when every block of `A` is at most a
/// line) plus seeded random ones otherwise.
pub fn candidate_subspaces(p: &QuotientPresentation, config: &SamplingConfig) -> (Vec<GradedSubspace>, Exactness) {
    let dims = p.a_dims();
    let exact = p.is_multiplicity_free_on_a();
    let atoms = coordinate_atoms(&dims);
    let full = p.full_a();
    let mut found = BTreeSet::new();
    if atoms.len() <= 16 {
        for mask in 1u32..(1 << atoms.len()) {
            let s = (0..atoms.len())
                .filter(|i| mask & (1 << i) != 0)
                .fold(GradedSubspace::zero(), |acc, i| acc.sum(&atoms[i]));
            if s != full {
                found.insert(s);
            }
        }
    } else {
        found.extend(atoms.into_iter().filter(|s| *s != full));
    }
    if !exact {
        let mut rng = config.rng();
        for _ in 0..config.samples {
            let s = random_graded_subspace(&mut rng, &dims);
            if !s.is_zero() && s != full {
                found.insert(s);
            }
        }
    }
    (found.into_iter().collect(), if exact { Exactness::Exact } else { Exactness::Sampled })
}

/// GIT verdict through the one-step criterion `mu(A') > 0` (resp. `>= 0`).
pub fn git_verdict(
    p: &QuotientPresentation,
    params: &GitParameters,
    config: &SamplingConfig,
) -> Result<StabilityVerdict<GradedSubspace>> {
    check_compatible(p, params)?;
    if !p.is_generated() {
        return Err(Error::Precondition("the frames do not generate the module".into()));
    }
    let (subs, exactness) = candidate_subspaces(p, config);
    let labels: Vec<IrrepLabel> = p.a_dims().into_keys().collect();
    let mut candidates = Vec::with_capacity(subs.len());
    for s in subs {
        let mu = mu_one_step(p, params, &s)?;
        let key: Vec<usize> = labels.iter().map(|l| s.dim(l)).collect();
        candidates.push((s.clone(), mu, (key, s)));
    }
    let n = candidates.len();
    Ok(classify(candidates, exactness, n))
}

/// θ̃-verdict over the Hilbert functions of the submodules generated in `D_-`.
pub fn theta_tilde_verdict(
    params: &GitParameters,
    h: &HilbertFunction,
    subs: &BTreeSet<HilbertFunction>,
    exactness: Exactness,
) -> Result<StabilityVerdict<HilbertFunction>> {
    let tilde = params.theta_tilde_vector(h.group())?;
    theta_verdict(&tilde, h, subs, exactness)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equivariant::{
        apply_gauge, free_orbit_module, monomial_module, ActionSpec, EquivariantModule, GaugeElement,
    };
    use crate::hilbert::{ConstantRay, GeometricRay, Ray, TailModel};
    use crate::rational::frac;
    use crate::stability::Status;
    use rand::SeedableRng;

    fn ch(x: i64) -> IrrepLabel {
        IrrepLabel::Character(vec![x])
    }

    fn z3() -> GroupSpec {
        GroupSpec::finite_abelian(&[3]).unwrap()
    }

    fn z3_action() -> ActionSpec {
        ActionSpec::new(z3(), vec![("x".into(), ch(2)), ("y".into(), ch(1))]).unwrap()
    }

    fn theta3() -> ThetaVector {
        ThetaVector::finite(&z3(), [(ch(0), q(-2)), (ch(1), q(-1)), (ch(2), q(3))]).unwrap()
    }

    fn h3() -> HilbertFunction {
        HilbertFunction::finite(&z3(), [(ch(0), 1), (ch(1), 1), (ch(2), 1)]).unwrap()
    }

    fn all3() -> BTreeSet<IrrepLabel> {
        [ch(0), ch(1), ch(2)].into_iter().collect()
    }

    fn params3() -> GitParameters {
        derive_parameters(&theta3(), &h3(), &all3(), &BTreeMap::new()).unwrap()
    }

    fn present(m: EquivariantModule) -> QuotientPresentation {
        QuotientPresentation::with_identity_frames(m, [ch(0), ch(1)].into_iter().collect()).unwrap()
    }

    fn free() -> QuotientPresentation {
        present(free_orbit_module(&z3_action(), &[q(1), q(0)]).unwrap())
    }

    fn nilpotent() -> QuotientPresentation {
        let s: BTreeSet<Vec<u32>> = [vec![0, 0], vec![1, 0], vec![2, 0]].into_iter().collect();
        present(monomial_module(&z3_action(), &s).unwrap())
    }

    fn a_line(l: IrrepLabel) -> GradedSubspace {
        GradedSubspace::single(l, Subspace::full(1))
    }

    #[test]
    fn derive_examples() {
        let p = params3();
        assert_eq!(p.s_d, q(0));
        assert_eq!(p.d, 1);
        assert_eq!(p.kappa.values().cloned().collect::<Vec<_>>(), vec![q(1), q(1), q(3)]);
        assert_eq!(p.kappa_f, q(5));
        assert_eq!(p.dim_a, 2);
        assert_eq!(p.chi.values().cloned().collect::<Vec<_>>(), vec![frac(-1, 2), frac(1, 2)]);
        assert_eq!(p.admissibility(), q(0));
        assert_eq!(p.scaling_factor(), BigInt::from(2));

        let z2 = GroupSpec::finite_abelian(&[2]).unwrap();
        let th = ThetaVector::finite(&z2, [(ch(0), q(-1)), (ch(1), q(1))]).unwrap();
        let h = HilbertFunction::finite(&z2, [(ch(0), 1), (ch(1), 1)]).unwrap();
        let all: BTreeSet<_> = [ch(0), ch(1)].into_iter().collect();
        let p = derive_parameters(&th, &h, &all, &BTreeMap::new()).unwrap();
        assert_eq!(p.kappa.values().cloned().collect::<Vec<_>>(), vec![q(1), q(1)]);
        assert_eq!((p.kappa_f.clone(), p.dim_a), (q(2), 1));
        assert_eq!(p.chi[&ch(0)], q(0));

        let torus = GroupSpec::torus(1).unwrap();
        let th = ThetaVector::new(
            torus.clone(),
            [(ch(0), frac(-3, 2))].into_iter().collect(),
            TailModel::Geometric(vec![
                GeometricRay { ray: Ray::new(ch(1), vec![1]), coefficient: frac(1, 2), base: frac(1, 2) },
                GeometricRay { ray: Ray::new(ch(-1), vec![-1]), coefficient: frac(1, 3), base: frac(1, 3) },
            ]),
        )
        .unwrap();
        let h = HilbertFunction::new(
            torus,
            [(ch(0), 1)].into_iter().collect(),
            TailModel::Constant(vec![
                ConstantRay { ray: Ray::new(ch(1), vec![1]), value: 1 },
                ConstantRay { ray: Ray::new(ch(-1), vec![-1]), value: 1 },
            ]),
        )
        .unwrap();
        let window: BTreeSet<_> = (-2..=2).map(ch).collect();
        let p = derive_parameters(&th, &h, &window, &BTreeMap::new()).unwrap();
        assert_eq!(p.s_d, frac(11, 36));
        assert_eq!(p.d, 4);
        for n in [-2, -1, 1, 2] {
            assert_eq!(p.kappa[&ch(n)], th.value(&ch(n)) + frac(11, 144));
        }
    }

    #[test]
    fn derive_errors() {
        let off = ThetaVector::finite(&z3(), [(ch(0), q(-2)), (ch(1), q(-1)), (ch(2), q(4))]).unwrap();
        assert_eq!(derive_parameters(&off, &h3(), &all3(), &BTreeMap::new()), Err(Error::NonZeroPairing(q(1))));
        let small: BTreeSet<_> = [ch(0), ch(1)].into_iter().collect();
        assert!(matches!(derive_parameters(&theta3(), &h3(), &small, &BTreeMap::new()), Err(Error::InvalidWindow(_))));
    }

    #[test]
    fn mu_examples() {
        let p = params3();
        assert_eq!(mu_one_step(&free(), &p, &a_line(ch(0))).unwrap(), q(4));
        assert_eq!(mu_one_step(&free(), &p, &a_line(ch(1))).unwrap(), q(6));
        assert_eq!(mu_one_step(&nilpotent(), &p, &a_line(ch(1))).unwrap(), q(-2));
        assert!(mu_one_step(&free(), &p, &GradedSubspace::zero()).is_err());
    }

    #[test]
    fn filtration_examples() {
        let p = params3();
        let pres = free();
        let pieces =
            [(ch(0), vec![(1, Subspace::full(1))]), (ch(1), vec![(-1, Subspace::full(1))])].into_iter().collect();
        let f = Filtration::new(&pres, pieces).unwrap();
        let mu = mu_filtration(&pres, &p, &f).unwrap();
        assert_eq!(mu.graded, q(4));
        assert_eq!(mu.telescoped, q(4));
        let one = Filtration::one_step(&pres, &a_line(ch(0))).unwrap();
        assert_eq!(one, f);

        let flat = [(ch(0), vec![(2, Subspace::full(1))]), (ch(1), vec![(2, Subspace::full(1))])].into_iter().collect();
        assert!(Filtration::new(&pres, flat).is_err());
    }

    #[test]
    fn theta_tilde_examples() {
        let p = params3();
        let g = z3();
        let hp = HilbertFunction::finite(&g, [(ch(1), 1)]).unwrap();
        assert_eq!(theta_tilde(&p, &h3(), &hp).unwrap(), q(-1));
        assert_eq!(theta_tilde(&p, &h3(), &h3()).unwrap(), q(0));
        assert_eq!(theta_tilde(&p, &h3(), &HilbertFunction::zero(&g)).unwrap(), q(0));
    }

    #[test]
    fn saturate_examples() {
        let pres = nilpotent();
        let (sat, f) = saturate(&pres, &a_line(ch(0))).unwrap();
        assert_eq!(sat, pres.full_a());
        assert_eq!(f, pres.module().full());
        let (sat, f) = saturate(&pres, &a_line(ch(1))).unwrap();
        assert_eq!(sat, a_line(ch(1)));
        assert_eq!(f.dims(), [(ch(1), 1)].into_iter().collect());
        let (sat, f) = saturate(&pres, &GradedSubspace::zero()).unwrap();
        assert!(sat.is_zero() && f.is_zero());
    }

    #[test]
    fn git_examples() {
        let p = params3();
        let cfg = SamplingConfig::default();
        let v = git_verdict(&free(), &p, &cfg).unwrap();
        assert_eq!((v.status, v.exactness), (Status::Stable, Exactness::Exact));
        let v = git_verdict(&nilpotent(), &p, &cfg).unwrap();
        assert_eq!(v.status, Status::Unstable);
        assert_eq!(v.witness, Some(a_line(ch(1))));
        assert_eq!(v.value, Some(q(-2)));
    }

    #[test]
    fn gauge_keeps_mu() {
        let p = params3();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for pres in [free(), nilpotent()] {
            for _ in 0..5 {
                let g = GaugeElement::random(&pres, &mut rng);
                let moved = apply_gauge(&pres, &g).unwrap();
                for a in [a_line(ch(0)), a_line(ch(1))] {
                    assert_eq!(mu_one_step(&moved, &p, &g.pull(&a)).unwrap(), mu_one_step(&pres, &p, &a).unwrap());
                }
            }
        }
    }

    #[test]
    fn scaling_keeps_sign() {
        let p = params3();
        let t = frac(7, 3);
        let s = p.scaled(&t).unwrap();
        for pres in [free(), nilpotent()] {
            for a in [a_line(ch(0)), a_line(ch(1))] {
                assert_eq!(mu_one_step(&pres, &s, &a).unwrap(), &t * mu_one_step(&pres, &p, &a).unwrap());
            }
        }
    }
}
