//! Invariant suites over a seeded corpus, one per module.

use std::collections::BTreeMap;

use num::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::approximation::error_to_theta;
use crate::corpus::{
    cyclic_action, finite_action, multiplicity_corpus, multiplicity_free_corpus, random_conjugate, random_filtration,
    random_point, random_presentation, random_theta,
};
use crate::equivariant::{
    apply_gauge, enumerate_submodules, free_orbit_module, EquivariantModule, Exactness, GaugeElement, SamplingConfig,
};
use crate::error::Result;
use crate::git::{candidate_subspaces, git_verdict, mu_filtration, mu_one_step, saturate, theta_tilde, Filtration};
use crate::group::{GroupSpec, IrrepLabel, RepDecomp};
use crate::hilbert::{ConstantRay, GeometricRay, HilbertFunction, Ray, TailModel, ThetaVector};
use crate::problem::{parse_problem_str, print_problem};
use crate::quotient::{default_degree_bound, evaluate_generators, hilbert_chow_point, invariant_monomial_generators};
use crate::rational::{frac, pow, q, Q};
use crate::stability::{generated_in_dminus, module_theta_verdict, Status};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub checks: usize,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelftestReport {
    pub seed: u64,
    pub suites: Vec<SuiteResult>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.failures.is_empty())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "seed": self.seed,
            "passed": self.passed(),
            "suites": self.suites.iter().map(|s| json!({
                "name": s.name,
                "checks": s.checks,
                "failures": s.failures,
                "passed": s.failures.is_empty(),
            })).collect::<Vec<_>>(),
        })
    }
}

struct Suite {
    name: &'static str,
    checks: usize,
    failures: Vec<String>,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Suite { name, checks: 0, failures: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok && self.failures.len() < 20 {
            self.failures.push(what());
        }
    }

    fn guard(&mut self, r: Result<()>) {
        if let Err(e) = r {
            self.checks += 1;
            self.failures.push(format!("error: {e}"));
        }
    }

    fn finish(self) -> SuiteResult {
        SuiteResult { name: self.name, checks: self.checks, failures: self.failures }
    }
}

fn ch(x: i64) -> IrrepLabel {
    IrrepLabel::Character(vec![x])
}

fn binomial(n: u64, k: u64) -> u64 {
    (1..=k).fold(1, |acc, i| acc * (n + 1 - i) / i)
}

fn group_backend(s: &mut Suite, rng: &mut ChaCha8Rng) -> Result<()> {
    for g in [
        GroupSpec::finite_abelian(&[3])?,
        GroupSpec::finite_abelian(&[2, 4])?,
        GroupSpec::torus(1)?,
        GroupSpec::product(&[2], 1)?,
    ] {
        for _ in 0..10 {
            let raw: Vec<i64> = (0..g.factors().len()).map(|_| rng.gen_range(-6..=6)).collect();
            let l = g.character(&raw)?;
            let d = g.dual(&l)?;
            s.check(g.dual(&d)? == l, || format!("dual of dual of {l} in {g}"));
            s.check(g.add_characters(&l, &d)? == g.trivial(), || format!("{l} + dual in {g}"));
            s.check(g.tensor(&l, &d)? == RepDecomp::single(g.trivial()), || format!("{l} tensor dual in {g}"));
        }
    }
    let sl2 = GroupSpec::sl2();
    for a in 0..4u32 {
        for b in 0..4u32 {
            let t = sl2.tensor(&IrrepLabel::Spin(a), &IrrepLabel::Spin(b))?;
            s.check(t.total_dim(&sl2) == ((a + 1) * (b + 1)) as usize, || format!("V{a} x V{b} dimension"));
        }
        for d in 0..4usize {
            let sym = sl2.decompose_sym_power(&RepDecomp::single(IrrepLabel::Spin(a)), d, 12)?;
            let expected = binomial(u64::from(a) + d as u64, d as u64) as usize;
            s.check(sym.total_dim(&sl2) == expected, || format!("Sym^{d} V{a} dimension"));
        }
    }
    Ok(())
}

/// θ on `T^1` with geometric tails on both sides and `h = 1` everywhere.
fn torus_fixture(neg_coeff: Q, neg_base: Q, center: Q) -> Result<(ThetaVector, HilbertFunction)> {
    let g = GroupSpec::torus(1)?;
    let theta = ThetaVector::new(
        g.clone(),
        [(ch(0), center)].into_iter().collect(),
        TailModel::Geometric(vec![
            GeometricRay { ray: Ray::new(ch(1), vec![1]), coefficient: frac(1, 2), base: frac(1, 2) },
            GeometricRay { ray: Ray::new(ch(-1), vec![-1]), coefficient: neg_coeff, base: neg_base },
        ]),
    )?;
    let h = HilbertFunction::new(
        g,
        [(ch(0), 1)].into_iter().collect(),
        TailModel::Constant(vec![
            ConstantRay { ray: Ray::new(ch(1), vec![1]), value: 1 },
            ConstantRay { ray: Ray::new(ch(-1), vec![-1]), value: 1 },
        ]),
    )?;
    Ok((theta, h))
}

fn hilbert_calculus(s: &mut Suite) -> Result<()> {
    let (theta, h) = torus_fixture(frac(1, 3), frac(1, 3), frac(-3, 2))?;
    s.check(theta.pairing(&h)?.is_zero(), || "asymmetric fixture pairs to zero".into());
    let half = HilbertFunction::new(
        h.group().clone(),
        BTreeMap::new(),
        TailModel::Constant(vec![ConstantRay { ray: Ray::new(ch(1), vec![1]), value: 1 }]),
    )?;
    s.check(theta.pairing(&half)? == q(1), || "positive half pairs to 1".into());
    for n in 0..6i64 {
        let w = (-n..=n).map(ch).collect();
        let (inside, tail) = theta.restrict_pairing(&h, &w)?;
        s.check(&inside + &tail == theta.pairing(&h)?, || format!("split pairing at radius {n}"));
        s.check(tail.abs() <= theta.tail_majorant(&h, &w)?, || format!("majorant at radius {n}"));
    }
    Ok(())
}

fn equivariant_modules(s: &mut Suite, rng: &mut ChaCha8Rng, corpus: &[EquivariantModule]) -> Result<()> {
    let cfg = SamplingConfig::default();
    for m in corpus.iter().step_by(40) {
        let e = enumerate_submodules(m, None, &cfg)?;
        for sub in &e.submodules {
            s.check(m.is_submodule(sub), || "enumerated subspace is not a submodule".into());
            s.check(m.closure(sub) == *sub, || "closure of a submodule moved".into());
        }
        let c = random_conjugate(rng, m)?;
        s.check(c.hilbert_function() == m.hilbert_function(), || "conjugation changed h".into());
        let ec = enumerate_submodules(&c, None, &cfg)?;
        s.check(ec.hilbert_functions(c.group()) == e.hilbert_functions(m.group()), || {
            "conjugation changed the submodule Hilbert functions".into()
        });
    }
    Ok(())
}

fn theta_stability(s: &mut Suite, rng: &mut ChaCha8Rng, corpus: &[EquivariantModule]) -> Result<()> {
    let cfg = SamplingConfig::default();
    for m in corpus.iter().step_by(25) {
        let Some(theta) = random_theta(rng, &m.hilbert_function()) else { continue };
        let full = module_theta_verdict(&theta, m, false, &cfg)?;
        let restricted = module_theta_verdict(&theta, m, true, &cfg)?;
        if full.is_stable() {
            s.check(generated_in_dminus(m, &theta.negative_labels()), || "stable module not generated in D_-".into());
        }
        s.check(full.same_outcome(&restricted), || "restricted verdict differs".into());
    }
    for m in multiplicity_corpus()?.iter().take(6) {
        let Some(theta) = random_theta(rng, &m.hilbert_function()) else { continue };
        let v = module_theta_verdict(&theta, m, false, &cfg)?;
        s.check(v.status != Status::Stable, || "sampled verdict claimed STABLE".into());
    }
    Ok(())
}

fn git_machinery(s: &mut Suite, rng: &mut ChaCha8Rng) -> Result<()> {
    let cfg = SamplingConfig::default();
    let mut done = 0;
    for m in multiplicity_corpus()?.iter().cycle().take(60) {
        if done >= 12 {
            break;
        }
        let m = random_conjugate(rng, m)?;
        let h = m.hilbert_function();
        let Some(theta) = random_theta(rng, &h) else { continue };
        let Some((p, params)) = random_presentation(rng, &m, &theta)? else { continue };
        done += 1;
        s.check(params.admissibility().is_zero(), || "admissibility".into());
        s.check(theta_tilde(&params, &h, &h)?.is_zero(), || "theta tilde of h".into());
        if let Some(f) = random_filtration(rng, &p)? {
            let forms = mu_filtration(&p, &params, &f)?;
            s.check(forms.graded == forms.telescoped, || "graded and telescoped weights".into());
        }
        let (cands, _) = candidate_subspaces(&p, &cfg);
        for a in cands.iter().take(8) {
            let mu = mu_one_step(&p, &params, a)?;
            let one = mu_filtration(&p, &params, &Filtration::one_step(&p, a)?)?;
            s.check(one.graded == mu, || "one-step filtration weight".into());
            let (sat, f) = saturate(&p, a)?;
            if !sat.is_zero() && sat != p.full_a() {
                let lhs = q(params.dim_a as i64) * theta_tilde(&params, &h, &f.hilbert_function(h.group()))?;
                s.check(lhs == mu_one_step(&p, &params, &sat)?, || "dim A times theta tilde".into());
            }
        }
        let gamma = GaugeElement::random(&p, rng);
        let moved = apply_gauge(&p, &gamma)?;
        for a in cands.iter().take(8) {
            s.check(mu_one_step(&moved, &params, &gamma.pull(a))? == mu_one_step(&p, &params, a)?, || {
                "gauge changed a weight".into()
            });
        }
        let v = git_verdict(&p, &params, &cfg)?;
        if v.exactness == Exactness::Exact {
            let w = git_verdict(&moved, &params, &cfg)?;
            s.check(v.status == w.status, || "gauge changed the exact GIT verdict".into());
        }
    }
    s.check(done > 0, || "no admissible presentation generated".into());
    Ok(())
}

fn approximation(s: &mut Suite) -> Result<()> {
    let (asym, h) = torus_fixture(frac(1, 3), frac(1, 3), frac(-3, 2))?;
    let (sym, _) = torus_fixture(frac(1, 2), frac(1, 2), q(-2))?;
    let half = HilbertFunction::new(
        h.group().clone(),
        BTreeMap::new(),
        TailModel::Constant(vec![ConstantRay { ray: Ray::new(ch(1), vec![1]), value: 1 }]),
    )?;
    let kappa = BTreeMap::new();
    for n in 1..=6i64 {
        let w = (-n..=n).map(ch).collect();
        let expected = pow(&frac(1, 2), n + 1) - pow(&frac(1, 3), n) / q(4);
        s.check(error_to_theta(&asym, &h, &half, &w, &kappa)? == expected, || format!("asymmetric error at {n}"));
        s.check(error_to_theta(&sym, &h, &half, &w, &kappa)?.is_zero(), || format!("symmetric error at {n}"));
    }
    Ok(())
}

fn quotient_geometry(s: &mut Suite, rng: &mut ChaCha8Rng) -> Result<()> {
    for a in [cyclic_action(3, &[2, 1])?, finite_action(&[2, 3], &[vec![1, 0], vec![0, 1], vec![1, 2]])?] {
        let gens = invariant_monomial_generators(&a, default_degree_bound(&a))?;
        for _ in 0..5 {
            let p = random_point(rng, a.len());
            let eta = hilbert_chow_point(&free_orbit_module(&a, &p)?, &gens)?;
            s.check(eta == evaluate_generators(&gens, &p), || "free orbit point".into());
        }
    }
    Ok(())
}

const ROUND_TRIP: [&str; 2] = [
    "[group]\nkind = finite_abelian\norders = 3\n[action]\nx = 2\ny = 1\n[theta]\n0 = -2\n1 = -1\n2 = 3\n[module]\ndim 0 = 1\ndim 1 = 1\ndim 2 = 1\narrow x 0 = [[1]]\narrow x 2 = [[1]]\narrow x 1 = [[1]]\n",
    "[group]\nkind = torus\nrank = 1\n[theta]\n0 = -3/2\nray 1 step 1 coeff 1/2 base 1/2\nray -1 step -1 coeff 1/3 base 1/3\n[hilbert]\n0 = 1\nray 1 step 1 value 1\nray -1 step -1 value 1\n[task]\nbound = 1/1000\n",
];

fn cli(s: &mut Suite) -> Result<()> {
    for text in ROUND_TRIP {
        let p = parse_problem_str(text)?;
        s.check(parse_problem_str(&print_problem(&p))? == p, || "problem round trip".into());
    }
    Ok(())
}

/// Runs every suite; failures are collected, never raised.
pub fn run(seed: u64) -> SelftestReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let corpus = multiplicity_free_corpus().unwrap_or_default();
    let mut suites = Vec::new();
    let mut go = |name: &'static str, f: &mut dyn FnMut(&mut Suite) -> Result<()>| {
        let mut s = Suite::new(name);
        let r = f(&mut s);
        s.guard(r);
        suites.push(s.finish());
    };
    go("group_backend", &mut |s| group_backend(s, &mut rng));
    go("hilbert_calculus", &mut |s| hilbert_calculus(s));
    go("equivariant_modules", &mut |s| equivariant_modules(s, &mut rng, &corpus));
    go("theta_stability", &mut |s| theta_stability(s, &mut rng, &corpus));
    go("git_machinery", &mut |s| git_machinery(s, &mut rng));
    go("approximation", &mut |s| approximation(s));
    go("quotient_geometry", &mut |s| quotient_geometry(s, &mut rng));
    go("cli", &mut |s| cli(s));
    SelftestReport { seed, suites }
}
