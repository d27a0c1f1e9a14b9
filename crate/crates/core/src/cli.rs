//! Subcommand dispatch and canonical JSON reports.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde_json::{json, Map, Value};

use crate::approximation::{
    canonical_growth, canonical_window, choose_window, error_between_windows, error_to_theta, verify_limit,
    WindowSequence, DEFAULT_MAX_RADIUS,
};
use crate::equivariant::{
    enumerate_submodule_hilbert_functions, enumerate_submodules, EquivariantModule, Exactness, GradedSubspace,
    QuotientPresentation, SamplingConfig,
};
use crate::error::{Error, Result};
use crate::git::{derive_parameters, git_verdict, theta_tilde, theta_tilde_verdict, GitParameters};
use crate::group::IrrepLabel;
use crate::hilbert::{HilbertFunction, TailModel, ThetaVector};
use crate::monomial::{enumerate_monomial_constellations, finite_window};
use crate::problem::Problem;
use crate::quotient::{
    binomial_relations, default_degree_bound, describe_point, hilbert_chow_point, invariant_monomial_generators,
    is_origin, monomial_name, violated_relations,
};
use crate::rational::{format_rational, Q};
use crate::selftest;
use crate::stability::{
    generated_in_dminus, hilbert_scheme_mode_check, module_theta_verdict, theta_verdict, StabilityVerdict,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, clap::ValueEnum)]
pub enum Subcommand {
    Check,
    GitCheck,
    DeriveParams,
    Approx,
    ChooseWindow,
    HilbertChow,
    Enumerate,
    Selftest,
}

impl Subcommand {
    pub const ALL: [Subcommand; 8] = [
        Subcommand::Check,
        Subcommand::GitCheck,
        Subcommand::DeriveParams,
        Subcommand::Approx,
        Subcommand::ChooseWindow,
        Subcommand::HilbertChow,
        Subcommand::Enumerate,
        Subcommand::Selftest,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Check => "check",
            Subcommand::GitCheck => "git-check",
            Subcommand::DeriveParams => "derive-params",
            Subcommand::Approx => "approx",
            Subcommand::ChooseWindow => "choose-window",
            Subcommand::HilbertChow => "hilbert-chow",
            Subcommand::Enumerate => "enumerate",
            Subcommand::Selftest => "selftest",
        }
    }

    pub fn needs_input(self) -> bool {
        self != Subcommand::Selftest
    }
}

impl fmt::Display for Subcommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Subcommand {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Subcommand::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown subcommand `{s}`")))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunFlags {
    pub seed: u64,
    /// Radius of the canonical window, or the largest radius tried.
    pub window: Option<i64>,
    pub bound: Option<Q>,
    pub cap: Option<usize>,
    pub timing: bool,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

pub fn exit_code(e: &Error) -> i32 {
    if e.is_input_error() {
        EXIT_INPUT
    } else {
        EXIT_INTERNAL
    }
}

/// A finished report; `failed` is set by the self-test when a check fails.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub json: Value,
    pub failed: bool,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.failed {
            EXIT_INTERNAL
        } else {
            EXIT_OK
        }
    }

    /// Pretty JSON with sorted keys and a trailing newline.
    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.json).expect("reports serialize");
        s.push('\n');
        s
    }
}

pub fn qs(v: &Q) -> Value {
    Value::String(format_rational(v))
}

fn labels_json<'a>(labels: impl IntoIterator<Item = &'a IrrepLabel>) -> Value {
    Value::Array(labels.into_iter().map(|l| Value::String(l.to_string())).collect())
}

fn label_map<'a, V: 'a>(items: impl IntoIterator<Item = (&'a IrrepLabel, V)>, f: impl Fn(V) -> Value) -> Value {
    Value::Object(items.into_iter().map(|(l, v)| (l.to_string(), f(v))).collect())
}

pub fn hilbert_json(h: &HilbertFunction) -> Value {
    let window = label_map(h.window(), |v| json!(v));
    match h.tail() {
        TailModel::Constant(rays) => json!({
            "window": window,
            "rays": rays.iter().map(|r| json!({
                "start": r.ray.start.to_string(),
                "step": r.ray.step,
                "value": r.value,
            })).collect::<Vec<_>>(),
        }),
        _ => window,
    }
}

pub fn theta_json(t: &ThetaVector) -> Value {
    let window = label_map(t.window(), qs);
    match t.tail() {
        TailModel::Geometric(rays) => json!({
            "window": window,
            "rays": rays.iter().map(|r| json!({
                "start": r.ray.start.to_string(),
                "step": r.ray.step,
                "coeff": qs(&r.coefficient),
                "base": qs(&r.base),
            })).collect::<Vec<_>>(),
        }),
        _ => window,
    }
}

pub fn subspace_json(s: &GradedSubspace) -> Value {
    label_map(s.parts(), |sub| {
        json!({
            "dim": sub.dim(),
            "basis": sub.basis().iter().map(|row| row.iter().map(qs).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    })
}

pub fn verdict_json<W>(v: &StabilityVerdict<W>, witness: impl Fn(&W) -> Value) -> Value {
    json!({
        "status": v.status,
        "exactness": v.exactness,
        "sample_size": v.sample_size,
        "witness": v.witness.as_ref().map_or(Value::Null, witness),
        "value": v.value.as_ref().map_or(Value::Null, qs),
    })
}

pub fn params_json(p: &GitParameters) -> Value {
    json!({
        "window": labels_json(&p.window),
        "dminus": labels_json(&p.dminus),
        "kappa": label_map(&p.kappa, qs),
        "chi": label_map(&p.chi, qs),
        "h_window": label_map(&p.h_window, |v| json!(v)),
        "kappa_f": qs(&p.kappa_f),
        "dim_a": p.dim_a,
        "s_d": qs(&p.s_d),
        "d": p.d,
        "admissibility": qs(&p.admissibility()),
        "scaling_factor": p.scaling_factor().to_string(),
        "theta_tilde": Value::Object(
            p.window.iter().map(|l| (l.to_string(), qs(&p.theta_tilde_coefficient(l)))).collect()
        ),
    })
}

struct Context<'a> {
    problem: &'a Problem,
    flags: &'a RunFlags,
    config: SamplingConfig,
}

fn need<'a, T>(value: Option<&'a T>, what: &str, command: Subcommand) -> Result<&'a T> {
    value.ok_or_else(|| Error::Precondition(format!("{command} needs a {what} section")))
}

impl Context<'_> {
    fn theta(&self, c: Subcommand) -> Result<&ThetaVector> {
        need(self.problem.theta.as_ref(), "[theta]", c)
    }

    fn module(&self, c: Subcommand) -> Result<&EquivariantModule> {
        need(self.problem.module.as_ref(), "[module]", c)
    }

    /// `[hilbert]` or else the Hilbert function of `[module]`; both must agree when given.
    fn hilbert(&self, c: Subcommand) -> Result<HilbertFunction> {
        match (&self.problem.hilbert, &self.problem.module) {
            (Some(h), Some(m)) if *h != m.hilbert_function() => {
                Err(Error::Precondition("the module's Hilbert function differs from [hilbert]".into()))
            }
            (Some(h), _) => Ok(h.clone()),
            (None, Some(m)) => Ok(m.hilbert_function()),
            (None, None) => Err(Error::Precondition(format!("{c} needs a [hilbert] or [module] section"))),
        }
    }

    fn window(&self, theta: &ThetaVector, h: &HilbertFunction) -> Result<BTreeSet<IrrepLabel>> {
        if let Some(n) = self.flags.window {
            return Ok(canonical_window(theta, h, n));
        }
        if let Some(w) = &self.problem.params.window {
            return Ok(w.clone());
        }
        if let Some(r) = self.problem.task.radius {
            return Ok(canonical_window(theta, h, r));
        }
        if h.is_finite() {
            return finite_window(theta, h);
        }
        Err(Error::Precondition(
            "an infinite Hilbert function needs a window: give [params] window, [task] radius or --window".into(),
        ))
    }

    fn max_radius(&self) -> i64 {
        self.flags.window.or(self.problem.task.radius).unwrap_or(DEFAULT_MAX_RADIUS)
    }

    fn bound(&self) -> Option<Q> {
        self.flags.bound.clone().or_else(|| self.problem.task.bound.clone())
    }

    fn supplied_exactness(&self) -> Exactness {
        if self.problem.task.complete == Some(true) {
            Exactness::Exact
        } else {
            Exactness::Sampled
        }
    }

    fn subs_from_hprimes(&self, h: &HilbertFunction) -> BTreeSet<HilbertFunction> {
        self.problem.hprimes.iter().filter(|s| !s.is_zero() && *s != h).cloned().collect()
    }
}

fn check(cx: &Context) -> Result<Value> {
    let c = Subcommand::Check;
    let theta = cx.theta(c)?;
    let h = cx.hilbert(c)?;
    let pairing = theta.pairing(&h)?;
    if let Some(m) = &cx.problem.module {
        let full = module_theta_verdict(theta, m, false, &cx.config)?;
        let restricted = module_theta_verdict(theta, m, true, &cx.config)?;
        let hs = match hilbert_scheme_mode_check(theta, m, &cx.config) {
            Ok(r) => json!({ "theta_stable": r.theta_stable, "cyclic": r.cyclic, "agree": r.agree }),
            Err(e) if e.is_input_error() => Value::Null,
            Err(e) => return Err(e),
        };
        return Ok(json!({
            "hilbert_function": hilbert_json(&h),
            "pairing": qs(&pairing),
            "verdict": verdict_json(&full, hilbert_json),
            "dminus_verdict": verdict_json(&restricted, hilbert_json),
            "generated_in_dminus": generated_in_dminus(m, &theta.negative_labels()),
            "hilbert_scheme": hs,
        }));
    }
    if cx.problem.hprimes.is_empty() {
        return Err(Error::Precondition("check needs a [module] or at least one [hprime] section".into()));
    }
    let subs = cx.subs_from_hprimes(&h);
    let v = theta_verdict(theta, &h, &subs, cx.supplied_exactness())?;
    Ok(json!({
        "hilbert_function": hilbert_json(&h),
        "pairing": qs(&pairing),
        "verdict": verdict_json(&v, hilbert_json),
    }))
}

fn presentation(cx: &Context, m: &EquivariantModule, dminus: BTreeSet<IrrepLabel>) -> Result<QuotientPresentation> {
    match &cx.problem.frames {
        Some(f) => QuotientPresentation::new(m.clone(), dminus, f.clone()),
        None => QuotientPresentation::with_identity_frames(m.clone(), dminus),
    }
}

fn git_check(cx: &Context) -> Result<Value> {
    let c = Subcommand::GitCheck;
    let theta = cx.theta(c)?;
    let m = cx.module(c)?;
    let h = cx.hilbert(c)?;
    let window = cx.window(theta, &h)?;
    let params = derive_parameters(theta, &h, &window, &cx.problem.params.kappa)?;
    let p = presentation(cx, m, params.dminus.clone())?;
    let (subs, exactness, _) = enumerate_submodule_hilbert_functions(m, true, &params.dminus, &cx.config)?;
    let tilde = theta_tilde_verdict(&params, &h, &subs, exactness)?;
    let theta_v = module_theta_verdict(theta, m, false, &cx.config)?;
    let git = if p.is_generated() { Some(git_verdict(&p, &params, &cx.config)?) } else { None };
    let git_json = git
        .as_ref()
        .map_or(Value::Null, |g| verdict_json(g, |a| json!({ "subspace": subspace_json(a), "dim": a.total_dim() })));
    Ok(json!({
        "parameters": params_json(&params),
        "generated_in_dminus": p.is_generated(),
        "git_verdict": git_json,
        "theta_tilde_verdict": verdict_json(&tilde, hilbert_json),
        "theta_verdict": verdict_json(&theta_v, hilbert_json),
        "git_agrees_with_theta_tilde": git.as_ref().map(|g| g.same_outcome(&tilde)),
    }))
}

fn derive_params(cx: &Context) -> Result<Value> {
    let c = Subcommand::DeriveParams;
    let theta = cx.theta(c)?;
    let h = cx.hilbert(c)?;
    let window = cx.window(theta, &h)?;
    let params = derive_parameters(theta, &h, &window, &cx.problem.params.kappa)?;
    Ok(json!({
        "parameters": params_json(&params),
        "theta_tilde_of_h": qs(&theta_tilde(&params, &h, &h)?),
        "pairing": qs(&theta.pairing(&h)?),
    }))
}

fn approx(cx: &Context) -> Result<Value> {
    let c = Subcommand::Approx;
    let theta = cx.theta(c)?;
    let h = cx.hilbert(c)?;
    if cx.problem.hprimes.is_empty() {
        return Err(Error::Precondition("approx needs at least one [hprime] section".into()));
    }
    let growth = canonical_growth(theta, &h, cx.max_radius());
    if growth.is_empty() {
        return Err(Error::InvalidWindow("no canonical window has a label outside D_-".into()));
    }
    let kappa = &cx.problem.params.kappa;
    let bound = cx.bound();
    let mut per_hprime = Vec::new();
    for hp in &cx.problem.hprimes {
        let mut rows = Vec::new();
        let mut previous: Option<&BTreeSet<IrrepLabel>> = None;
        for (radius, w) in &growth {
            let params = derive_parameters(theta, &h, w, kappa)?;
            let change = match previous {
                Some(p) => qs(&error_between_windows(theta, &h, hp, p, w, kappa)?),
                None => Value::Null,
            };
            rows.push(json!({
                "radius": radius,
                "window": labels_json(w),
                "theta_tilde": qs(&theta_tilde(&params, &h, hp)?),
                "error": qs(&error_to_theta(theta, &h, hp, w, kappa)?),
                "majorant": qs(&theta.tail_majorant(&h, w)?),
                "change_from_previous": change,
            }));
            previous = Some(w);
        }
        let limit = match &bound {
            Some(b) => {
                let ws = WindowSequence::new(theta, growth.iter().map(|(_, w)| w.clone()).collect())?;
                let r = verify_limit(theta, &h, hp, &ws, b, kappa)?;
                json!({
                    "bound": qs(&r.bound),
                    "final_below_bound": r.final_below_bound,
                    "majorant_non_increasing": r.majorant_non_increasing,
                    "within_majorant": r.within_majorant,
                    "pass": r.pass,
                })
            }
            None => Value::Null,
        };
        per_hprime.push(json!({
            "hprime": hilbert_json(hp),
            "theta": qs(&theta.pairing(hp)?),
            "rows": rows,
            "limit": limit,
        }));
    }
    Ok(json!({ "max_radius": cx.max_radius(), "hprimes": per_hprime }))
}

fn choose(cx: &Context) -> Result<Value> {
    let c = Subcommand::ChooseWindow;
    let theta = cx.theta(c)?;
    let h = cx.hilbert(c)?;
    let (candidates, exactness) = if !cx.problem.hprimes.is_empty() {
        (cx.subs_from_hprimes(&h), cx.supplied_exactness())
    } else if let Some(m) = &cx.problem.module {
        let e = enumerate_submodules(m, None, &cx.config)?;
        let subs = e.hilbert_functions(m.group()).into_iter().filter(|s| !s.is_zero() && *s != h).collect();
        (subs, e.exactness)
    } else {
        return Err(Error::Precondition("choose-window needs [hprime] sections or a [module]".into()));
    };
    let cert = choose_window(theta, &h, &candidates, &cx.problem.params.kappa, cx.max_radius())?;
    let note = match exactness {
        Exactness::Exact => Value::Null,
        Exactness::Sampled => Value::String("the certificate covers only the listed candidates".into()),
    };
    Ok(json!({
        "radius": cert.radius,
        "window": labels_json(&cert.window),
        "majorant": qs(&cert.majorant),
        "theta_min": qs(&cert.theta_min),
        "parameters": params_json(&cert.params),
        "candidates": cert.candidates.iter().map(|k| json!({
            "hprime": hilbert_json(&k.hprime),
            "theta": qs(&k.theta_value),
            "theta_tilde": qs(&k.theta_tilde_value),
        })).collect::<Vec<_>>(),
        "exactness": exactness,
        "note": note,
    }))
}

fn hilbert_chow(cx: &Context) -> Result<Value> {
    let m = cx.module(Subcommand::HilbertChow)?;
    let bound = cx.problem.task.degree_bound.unwrap_or_else(|| default_degree_bound(m.action()));
    let gens = invariant_monomial_generators(m.action(), bound)?;
    let point = hilbert_chow_point(m, &gens)?;
    let relations = binomial_relations(&gens, 3);
    if let Some((r, a, b)) = violated_relations(&point, &relations).into_iter().next() {
        return Err(Error::Internal(format!(
            "relation {r:?} fails on the point: {} != {}",
            format_rational(&a),
            format_rational(&b)
        )));
    }
    Ok(json!({
        "degree_bound": bound,
        "generators": gens.exponents.iter().map(|e| monomial_name(m.action(), e)).collect::<Vec<_>>(),
        "point": describe_point(m.action(), &point),
        "relations_checked": relations.len(),
        "origin": is_origin(&point),
    }))
}

fn enumerate(cx: &Context) -> Result<Value> {
    let c = Subcommand::Enumerate;
    let action = need(cx.problem.action.as_ref(), "[action]", c)?;
    let theta = cx.theta(c)?;
    let h = need(cx.problem.hilbert.as_ref(), "[hilbert]", c)?;
    let list = enumerate_monomial_constellations(action, h, theta, &cx.config)?;
    let stable = list.iter().filter(|k| k.theta.is_stable()).count();
    let semistable = list.iter().filter(|k| k.theta.is_semistable()).count();
    let items: Vec<Value> = list
        .iter()
        .map(|k| {
            json!({
                "monomials": k.names(),
                "theta_verdict": verdict_json(&k.theta, hilbert_json),
                "git_verdict": k.git.as_ref().map_or(Value::Null, |g| {
                    verdict_json(g, |a| json!({ "subspace": subspace_json(a), "dim": a.total_dim() }))
                }),
            })
        })
        .collect();
    Ok(json!({
        "count": list.len(),
        "stable": stable,
        "semistable": semistable,
        "constellations": items,
    }))
}

/// Runs one subcommand. Errors carry no partial report.
pub fn run(command: Subcommand, problem: Option<&Problem>, flags: &RunFlags) -> Result<Report> {
    let start = Instant::now();
    let mut failed = false;
    let body = if command == Subcommand::Selftest {
        let r = selftest::run(flags.seed);
        failed = !r.passed();
        r.to_json()
    } else {
        let problem = problem.ok_or_else(|| Error::Precondition(format!("{command} needs an input file")))?;
        let defaults = SamplingConfig::default();
        let config = SamplingConfig {
            seed: flags.seed,
            samples: problem.task.samples.unwrap_or(defaults.samples),
            cap: flags.cap.or(problem.task.cap).unwrap_or(defaults.cap),
        };
        let cx = Context { problem, flags, config };
        match command {
            Subcommand::Check => check(&cx)?,
            Subcommand::GitCheck => git_check(&cx)?,
            Subcommand::DeriveParams => derive_params(&cx)?,
            Subcommand::Approx => approx(&cx)?,
            Subcommand::ChooseWindow => choose(&cx)?,
            Subcommand::HilbertChow => hilbert_chow(&cx)?,
            Subcommand::Enumerate => enumerate(&cx)?,
            Subcommand::Selftest => unreachable!("handled above"),
        }
    };
    let mut task = Map::new();
    task.insert("command".into(), json!(command.name()));
    task.insert("seed".into(), json!(flags.seed));
    task.insert("window".into(), json!(flags.window));
    task.insert("bound".into(), flags.bound.as_ref().map_or(Value::Null, qs));
    task.insert("cap".into(), json!(flags.cap));
    if let Some(p) = problem {
        task.insert("group".into(), json!(p.group.to_string()));
    }
    let mut json = json!({ "task": task, "result": body });
    if flags.timing {
        json["timing_ms"] = json!(start.elapsed().as_millis() as u64);
    }
    Ok(Report { json, failed })
}
