//! Problem files: a sectioned, line-oriented text format with exact rationals.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::path::Path;

use num::Signed;
use pest::error::{ErrorVariant, LineColLocation};
use pest::iterators::Pair;
use pest::Parser;
use pest_derive::Parser;

use crate::equivariant::{ActionSpec, ArrowMap, EquivariantModule};
use crate::error::Error;
use crate::group::{Factor, GroupSpec, IrrepLabel};
use crate::hilbert::{ConstantRay, GeometricRay, HilbertFunction, Ray, TailModel, ThetaVector};
use crate::linalg::Matrix;
use crate::rational::{format_rational, parse_rational, Q};

#[derive(Parser)]
#[grammar = "problem.pest"]
struct ProblemParser;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostics(pub Vec<Diagnostic>);

impl fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lines: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "{}", lines.join("\n"))
    }
}

impl std::error::Error for Diagnostics {}

impl From<Diagnostics> for Error {
    fn from(d: Diagnostics) -> Self {
        Error::Parse(d.to_string())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Params {
    pub window: Option<BTreeSet<IrrepLabel>>,
    /// Overrides of κ on `D_-`.
    pub kappa: BTreeMap<IrrepLabel, Q>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TaskOptions {
    pub samples: Option<usize>,
    pub cap: Option<usize>,
    pub bound: Option<Q>,
    pub radius: Option<i64>,
    pub degree_bound: Option<u32>,
    /// The `[hprime]` sections list every sub-Hilbert function.
    pub complete: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Problem {
    pub group: GroupSpec,
    pub action: Option<ActionSpec>,
    pub theta: Option<ThetaVector>,
    pub hilbert: Option<HilbertFunction>,
    pub hprimes: Vec<HilbertFunction>,
    pub module: Option<EquivariantModule>,
    pub frames: Option<BTreeMap<IrrepLabel, Matrix>>,
    pub params: Params,
    pub task: TaskOptions,
}

impl Problem {
    pub fn new(group: GroupSpec) -> Self {
        Problem {
            group,
            action: None,
            theta: None,
            hilbert: None,
            hprimes: Vec::new(),
            module: None,
            frames: None,
            params: Params::default(),
            task: TaskOptions::default(),
        }
    }
}

type Diag<T> = std::result::Result<T, Diagnostic>;

fn at(pair: &Pair<Rule>, message: impl Into<String>) -> Diagnostic {
    let (line, column) = pair.line_col();
    Diagnostic { line, column, message: message.into() }
}

fn rule_name(r: &Rule) -> String {
    match r {
        Rule::EOI => "end of input".into(),
        Rule::rational => "rational number".into(),
        Rule::ident => "identifier".into(),
        Rule::label | Rule::key => "label".into(),
        Rule::tuple => "tuple".into(),
        Rule::vector => "step vector".into(),
        Rule::matrix => "matrix".into(),
        Rule::row => "matrix row".into(),
        Rule::value => "value".into(),
        Rule::section => "section header".into(),
        Rule::kw_ray => "`ray`".into(),
        Rule::kw_step => "`step`".into(),
        Rule::kw_coeff => "`coeff`".into(),
        Rule::kw_base => "`base`".into(),
        Rule::kw_value => "`value`".into(),
        Rule::kw_dim => "`dim`".into(),
        Rule::kw_arrow => "`arrow`".into(),
        Rule::kw_frame => "`frame`".into(),
        Rule::kw_kappa => "`kappa`".into(),
        other => format!("{other:?}"),
    }
}

fn syntax_diagnostic(e: pest::error::Error<Rule>) -> Diagnostic {
    let (line, column) = match e.line_col {
        LineColLocation::Pos(p) => p,
        LineColLocation::Span(p, _) => p,
    };
    let message = match &e.variant {
        ErrorVariant::ParsingError { positives, .. } => {
            let names: BTreeSet<String> = positives.iter().map(rule_name).collect();
            if names.is_empty() {
                "syntax error".to_string()
            } else {
                format!("syntax error, expected {}", names.into_iter().collect::<Vec<_>>().join(" or "))
            }
        }
        ErrorVariant::CustomError { message } => message.clone(),
    };
    Diagnostic { line, column, message }
}

fn rational(pair: &Pair<Rule>) -> Diag<Q> {
    parse_rational(pair.as_str()).ok_or_else(|| at(pair, format!("`{}` is not a valid rational", pair.as_str())))
}

fn integer(pair: &Pair<Rule>) -> Diag<i64> {
    let v = rational(pair)?;
    if !v.is_integer() {
        return Err(at(pair, format!("expected an integer, got {}", pair.as_str())));
    }
    i64::try_from(v.to_integer()).map_err(|_| at(pair, "integer out of range"))
}

fn natural(pair: &Pair<Rule>) -> Diag<u64> {
    let v = integer(pair)?;
    u64::try_from(v).map_err(|_| at(pair, format!("expected a non-negative integer, got {v}")))
}

fn first_inner<'a>(pair: &Pair<'a, Rule>) -> Pair<'a, Rule> {
    pair.clone().into_inner().next().expect("grammar guarantees an inner pair")
}

/// Integer tuple of a `vector`, `tuple` or `rational` pair.
fn int_tuple(pair: &Pair<Rule>) -> Diag<Vec<i64>> {
    match pair.as_rule() {
        Rule::vector => int_tuple(&first_inner(pair)),
        Rule::tuple => pair.clone().into_inner().map(|p| integer(&p)).collect(),
        Rule::rational => Ok(vec![integer(pair)?]),
        _ => Err(at(pair, "expected an integer vector")),
    }
}

fn label(pair: &Pair<Rule>, group: &GroupSpec) -> Diag<IrrepLabel> {
    let inner = if matches!(pair.as_rule(), Rule::label | Rule::key) { first_inner(pair) } else { pair.clone() };
    let to_err = |e: Error| at(&inner, e.to_string());
    match inner.as_rule() {
        Rule::label => label(&inner, group),
        Rule::tuple | Rule::rational => group.character(&int_tuple(&inner)?).map_err(to_err),
        Rule::chi => group.character(&[integer(&first_inner(&inner))?]).map_err(to_err),
        Rule::spin => {
            let n: u32 = inner.as_str()[1..].parse().map_err(|_| at(&inner, "spin label out of range"))?;
            let l = IrrepLabel::Spin(n);
            group.validate(&l).map_err(to_err)?;
            Ok(l)
        }
        _ => Err(at(&inner, format!("expected a label, got `{}`", inner.as_str()))),
    }
}

fn matrix(pair: &Pair<Rule>) -> Diag<Matrix> {
    let mut rows = Vec::new();
    for row in pair.clone().into_inner() {
        let entries: Vec<Q> = row.into_inner().map(|p| rational(&p)).collect::<Diag<_>>()?;
        rows.push(entries);
    }
    let cols = rows.first().map_or(0, Vec::len);
    Matrix::from_rows(rows.len(), cols, rows).ok_or_else(|| at(pair, "matrix rows have different lengths"))
}

/// `key = value` split into the key pair and the list of value items.
fn assignment<'a>(pair: &Pair<'a, Rule>) -> (Pair<'a, Rule>, Vec<Pair<'a, Rule>>) {
    let mut it = pair.clone().into_inner();
    let key = it.next().expect("key");
    let value = it.next().expect("value");
    (key, value.into_inner().collect())
}

fn key_ident(key: &Pair<Rule>) -> Option<String> {
    let inner = first_inner(key);
    (inner.as_rule() == Rule::ident).then(|| inner.as_str().to_string())
}

fn single<'a, 'b>(pair: &Pair<'a, Rule>, items: &'b [Pair<'a, Rule>]) -> Diag<&'b Pair<'a, Rule>> {
    match items {
        [one] => Ok(one),
        _ => Err(at(pair, "expected a single value")),
    }
}

/// Rational value of a value item that must be a plain number.
fn item_rational(item: &Pair<Rule>) -> Diag<Q> {
    match item.as_rule() {
        Rule::label => {
            let inner = first_inner(item);
            if inner.as_rule() == Rule::rational {
                rational(&inner)
            } else {
                Err(at(item, format!("expected a number, got `{}`", item.as_str())))
            }
        }
        _ => Err(at(item, format!("expected a number, got `{}`", item.as_str()))),
    }
}

fn item_integer(item: &Pair<Rule>) -> Diag<i64> {
    let v = item_rational(item)?;
    if !v.is_integer() {
        return Err(at(item, format!("expected an integer, got {}", item.as_str())));
    }
    i64::try_from(v.to_integer()).map_err(|_| at(item, "integer out of range"))
}

fn item_natural(item: &Pair<Rule>) -> Diag<u64> {
    let v = item_integer(item)?;
    u64::try_from(v).map_err(|_| at(item, format!("expected a non-negative integer, got {v}")))
}

struct Section<'a> {
    header: Pair<'a, Rule>,
    name: String,
    entries: Vec<Pair<'a, Rule>>,
}

const SECTIONS: [&str; 9] = ["group", "action", "theta", "hilbert", "hprime", "module", "frames", "params", "task"];

struct Builder {
    diagnostics: Vec<Diagnostic>,
}

impl Builder {
    fn record<T>(&mut self, r: Diag<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(d) => {
                self.diagnostics.push(d);
                None
            }
        }
    }

    fn unexpected(&mut self, entry: &Pair<Rule>, section: &str) {
        self.diagnostics.push(at(entry, format!("`{}` is not allowed in [{section}]", entry.as_str().trim())));
    }

    fn group(&mut self, s: &Section) -> Option<GroupSpec> {
        let mut kind: Option<(String, Pair<Rule>)> = None;
        let mut orders: Option<Vec<u32>> = None;
        let mut rank: Option<usize> = None;
        let mut seen = BTreeSet::new();
        for e in &s.entries {
            if e.as_rule() != Rule::assign {
                self.unexpected(e, "group");
                continue;
            }
            let (key, items) = assignment(e);
            let Some(name) = key_ident(&key) else {
                self.diagnostics.push(at(&key, format!("unknown key `{}` in [group]", key.as_str())));
                continue;
            };
            if !seen.insert(name.clone()) {
                self.diagnostics.push(at(&key, format!("duplicate key `{name}`")));
                continue;
            }
            match name.as_str() {
                "kind" => {
                    let r = single(e, &items).and_then(|i| {
                        if i.as_rule() == Rule::ident {
                            Ok((i.as_str().to_string(), i.clone()))
                        } else {
                            Err(at(i, "expected finite_abelian, torus, product or sl2"))
                        }
                    });
                    kind = self.record(r);
                }
                "orders" => {
                    let r: Diag<Vec<u32>> = items
                        .iter()
                        .map(|i| {
                            item_natural(i).and_then(|n| u32::try_from(n).map_err(|_| at(i, "order out of range")))
                        })
                        .collect();
                    orders = self.record(r);
                }
                "rank" => {
                    let r = single(e, &items).and_then(|i| item_natural(i)).map(|n| n as usize);
                    rank = self.record(r);
                }
                _ => self.diagnostics.push(at(&key, format!("unknown key `{name}` in [group]"))),
            }
        }
        let Some((kind, kind_pair)) = kind else {
            self.diagnostics.push(at(&s.header, "[group] needs `kind`"));
            return None;
        };
        let built = match kind.as_str() {
            "finite_abelian" => match (&orders, rank) {
                (Some(o), None) => GroupSpec::finite_abelian(o),
                _ => return self.record(Err(at(&s.header, "finite_abelian takes `orders` and no `rank`"))),
            },
            "torus" => match (&orders, rank) {
                (None, Some(r)) => GroupSpec::torus(r),
                _ => return self.record(Err(at(&s.header, "torus takes `rank` and no `orders`"))),
            },
            "product" => GroupSpec::product(orders.as_deref().unwrap_or(&[]), rank.unwrap_or(0)),
            "sl2" => match (&orders, rank) {
                (None, None) => Ok(GroupSpec::sl2()),
                _ => return self.record(Err(at(&s.header, "sl2 takes no `orders` or `rank`"))),
            },
            other => {
                return self.record(Err(at(
                    &kind_pair,
                    format!("unknown group kind `{other}`, expected finite_abelian, torus, product or sl2"),
                )))
            }
        };
        self.record(built.map_err(|e| at(&s.header, e.to_string())))
    }

    fn action(&mut self, s: &Section, group: &GroupSpec) -> Option<ActionSpec> {
        let mut vars = Vec::new();
        let mut ok = true;
        for e in &s.entries {
            if e.as_rule() != Rule::assign {
                self.unexpected(e, "action");
                ok = false;
                continue;
            }
            let (key, items) = assignment(e);
            let Some(name) = key_ident(&key) else {
                self.diagnostics.push(at(&key, format!("`{}` is not a variable name", key.as_str())));
                ok = false;
                continue;
            };
            if vars.iter().any(|(n, _)| *n == name) {
                self.diagnostics.push(at(&key, format!("duplicate variable `{name}`")));
                ok = false;
                continue;
            }
            match self.record(single(e, &items).and_then(|i| label(i, group))) {
                Some(l) => vars.push((name, l)),
                None => ok = false,
            }
        }
        if !ok {
            return None;
        }
        self.record(ActionSpec::new(group.clone(), vars).map_err(|e| at(&s.header, e.to_string())))
    }

    fn theta(&mut self, s: &Section, group: &GroupSpec) -> Option<ThetaVector> {
        let mut window = BTreeMap::new();
        let mut rays = Vec::new();
        let mut ok = true;
        for e in &s.entries {
            match e.as_rule() {
                Rule::assign => {
                    let (key, items) = assignment(e);
                    let r = label(&key, group).and_then(|l| {
                        let v = item_rational(single(e, &items)?)?;
                        if window.contains_key(&l) {
                            return Err(at(&key, format!("duplicate entry for {l}")));
                        }
                        Ok((l, v))
                    });
                    match self.record(r) {
                        Some((l, v)) => {
                            window.insert(l, v);
                        }
                        None => ok = false,
                    }
                }
                Rule::ray_theta => {
                    let mut it = e.clone().into_inner();
                    let _kw = it.next();
                    let start = it.next().expect("label");
                    let _ = it.next();
                    let step = it.next().expect("vector");
                    let _ = it.next();
                    let coeff = it.next().expect("coeff");
                    let _ = it.next();
                    let base = it.next().expect("base");
                    let r = (|| {
                        Ok(GeometricRay {
                            ray: Ray::new(label(&start, group)?, int_tuple(&step)?),
                            coefficient: rational(&coeff)?,
                            base: rational(&base)?,
                        })
                    })();
                    match self.record(r) {
                        Some(g) => rays.push(g),
                        None => ok = false,
                    }
                }
                _ => {
                    self.unexpected(e, "theta");
                    ok = false;
                }
            }
        }
        if !ok {
            return None;
        }
        let tail = if rays.is_empty() { TailModel::Zero } else { TailModel::Geometric(rays) };
        self.record(ThetaVector::new(group.clone(), window, tail).map_err(|e| at(&s.header, e.to_string())))
    }

    fn hilbert(&mut self, s: &Section, group: &GroupSpec) -> Option<HilbertFunction> {
        let mut window = BTreeMap::new();
        let mut rays = Vec::new();
        let mut ok = true;
        for e in &s.entries {
            match e.as_rule() {
                Rule::assign => {
                    let (key, items) = assignment(e);
                    let r = label(&key, group).and_then(|l| {
                        let v = item_natural(single(e, &items)?)?;
                        if window.contains_key(&l) {
                            return Err(at(&key, format!("duplicate entry for {l}")));
                        }
                        Ok((l, v))
                    });
                    match self.record(r) {
                        Some((l, v)) => {
                            window.insert(l, v);
                        }
                        None => ok = false,
                    }
                }
                Rule::ray_hilbert => {
                    let mut it = e.clone().into_inner();
                    let _kw = it.next();
                    let start = it.next().expect("label");
                    let _ = it.next();
                    let step = it.next().expect("vector");
                    let _ = it.next();
                    let value = it.next().expect("value");
                    let r = (|| {
                        Ok(ConstantRay {
                            ray: Ray::new(label(&start, group)?, int_tuple(&step)?),
                            value: natural(&value)?,
                        })
                    })();
                    match self.record(r) {
                        Some(c) => rays.push(c),
                        None => ok = false,
                    }
                }
                _ => {
                    self.unexpected(e, &s.name);
                    ok = false;
                }
            }
        }
        if !ok {
            return None;
        }
        let tail = if rays.is_empty() { TailModel::Zero } else { TailModel::Constant(rays) };
        self.record(HilbertFunction::new(group.clone(), window, tail).map_err(|e| at(&s.header, e.to_string())))
    }

    fn module(&mut self, s: &Section, action: Option<&ActionSpec>) -> Option<EquivariantModule> {
        let Some(action) = action else {
            self.diagnostics.push(at(&s.header, "[module] needs an [action] section"));
            return None;
        };
        let group = action.group();
        let mut dims: BTreeMap<IrrepLabel, usize> = BTreeMap::new();
        let mut arrows: Vec<(usize, IrrepLabel, Matrix, Pair<Rule>)> = Vec::new();
        let mut ok = true;
        for e in &s.entries {
            match e.as_rule() {
                Rule::dim_entry => {
                    let mut it = e.clone().into_inner();
                    let _kw = it.next();
                    let l = it.next().expect("label");
                    let n = it.next().expect("dim");
                    let r = label(&l, group).and_then(|lab| {
                        if dims.contains_key(&lab) {
                            return Err(at(&l, format!("duplicate dimension for {lab}")));
                        }
                        Ok((lab, natural(&n)? as usize))
                    });
                    match self.record(r) {
                        Some((lab, n)) => {
                            dims.insert(lab, n);
                        }
                        None => ok = false,
                    }
                }
                Rule::arrow_entry => {
                    let mut it = e.clone().into_inner();
                    let _kw = it.next();
                    let var = it.next().expect("variable");
                    let l = it.next().expect("label");
                    let m = it.next().expect("matrix");
                    let r = (|| {
                        let v = action
                            .index_of(var.as_str())
                            .ok_or_else(|| at(&var, format!("unknown variable `{}`", var.as_str())))?;
                        let src = label(&l, group)?;
                        if arrows.iter().any(|(w, s, _, _)| *w == v && *s == src) {
                            return Err(at(&var, format!("duplicate arrow {} at {src}", var.as_str())));
                        }
                        Ok((v, src, matrix(&m)?))
                    })();
                    match self.record(r) {
                        Some((v, src, mat)) => arrows.push((v, src, mat, e.clone())),
                        None => ok = false,
                    }
                }
                _ => {
                    self.unexpected(e, "module");
                    ok = false;
                }
            }
        }
        let mut map = ArrowMap::new();
        for (v, src, mat, pair) in arrows {
            let target = match group.add_characters(&src, action.weight(v)) {
                Ok(t) => t,
                Err(err) => {
                    self.diagnostics.push(at(&pair, err.to_string()));
                    ok = false;
                    continue;
                }
            };
            let (rows, cols) = (dims.get(&target).copied().unwrap_or(0), dims.get(&src).copied().unwrap_or(0));
            let empty_ok = mat.rows() == 0 && (rows == 0 || cols == 0);
            if (mat.rows(), mat.cols()) != (rows, cols) && !empty_ok {
                self.diagnostics.push(at(
                    &pair,
                    format!(
                        "arrow {} from {src} to {target} must be {rows}x{cols} (dim {target} x dim {src}), got {}x{}",
                        action.name(v),
                        mat.rows(),
                        mat.cols()
                    ),
                ));
                ok = false;
                continue;
            }
            if !empty_ok {
                map.insert((v, src), mat);
            }
        }
        if !ok {
            return None;
        }
        self.record(EquivariantModule::new(action.clone(), dims, map).map_err(|e| at(&s.header, e.to_string())))
    }

    fn frames(&mut self, s: &Section, group: &GroupSpec) -> Option<BTreeMap<IrrepLabel, Matrix>> {
        let mut frames = BTreeMap::new();
        let mut ok = true;
        for e in &s.entries {
            if e.as_rule() != Rule::frame_entry {
                self.unexpected(e, "frames");
                ok = false;
                continue;
            }
            let mut it = e.clone().into_inner();
            let _kw = it.next();
            let l = it.next().expect("label");
            let m = it.next().expect("matrix");
            let r = label(&l, group).and_then(|lab| {
                if frames.contains_key(&lab) {
                    return Err(at(&l, format!("duplicate frame for {lab}")));
                }
                let mat = matrix(&m)?;
                if !mat.is_square() {
                    return Err(at(&m, format!("frame for {lab} must be square")));
                }
                Ok((lab, mat))
            });
            match self.record(r) {
                Some((lab, mat)) => {
                    frames.insert(lab, mat);
                }
                None => ok = false,
            }
        }
        ok.then_some(frames)
    }

    fn task(&mut self, s: &Section) -> Option<TaskOptions> {
        let mut t = TaskOptions::default();
        let mut seen = BTreeSet::new();
        let mut ok = true;
        for e in &s.entries {
            if e.as_rule() != Rule::assign {
                self.unexpected(e, "task");
                ok = false;
                continue;
            }
            let (key, items) = assignment(e);
            let Some(name) = key_ident(&key) else {
                self.diagnostics.push(at(&key, format!("unknown key `{}` in [task]", key.as_str())));
                ok = false;
                continue;
            };
            if !seen.insert(name.clone()) {
                self.diagnostics.push(at(&key, format!("duplicate key `{name}`")));
                ok = false;
                continue;
            }
            let r: Diag<()> = (|| {
                let item = single(e, &items)?;
                match name.as_str() {
                    "samples" => t.samples = Some(item_natural(item)? as usize),
                    "cap" => t.cap = Some(item_natural(item)? as usize),
                    "bound" => {
                        let b = item_rational(item)?;
                        if !b.is_positive() {
                            return Err(at(item, "bound must be positive"));
                        }
                        t.bound = Some(b);
                    }
                    "radius" => t.radius = Some(item_natural(item)? as i64),
                    "degree_bound" => {
                        t.degree_bound = Some(
                            u32::try_from(item_natural(item)?).map_err(|_| at(item, "degree bound out of range"))?,
                        )
                    }
                    "complete" => {
                        t.complete = Some(match item.as_str() {
                            "true" => true,
                            "false" => false,
                            other => return Err(at(item, format!("expected true or false, got `{other}`"))),
                        })
                    }
                    _ => return Err(at(&key, format!("unknown key `{name}` in [task]"))),
                }
                Ok(())
            })();
            if self.record(r).is_none() {
                ok = false;
            }
        }
        ok.then_some(t)
    }
}

fn params_section(b: &mut Builder, s: &Section, group: &GroupSpec) -> Option<(Params, Option<(usize, usize)>)> {
    let mut p = Params::default();
    let mut window_at = None;
    let mut ok = true;
    for e in &s.entries {
        match e.as_rule() {
            Rule::assign => {
                let (key, items) = assignment(e);
                match key_ident(&key).as_deref() {
                    Some("window") if p.window.is_none() => {
                        let r: Diag<BTreeSet<IrrepLabel>> = items.iter().map(|i| label(i, group)).collect();
                        match b.record(r) {
                            Some(w) => {
                                p.window = Some(w);
                                window_at = Some(e.line_col());
                            }
                            None => ok = false,
                        }
                    }
                    Some("window") => {
                        b.diagnostics.push(at(&key, "duplicate key `window`"));
                        ok = false;
                    }
                    _ => {
                        b.diagnostics.push(at(&key, format!("unknown key `{}` in [params]", key.as_str())));
                        ok = false;
                    }
                }
            }
            Rule::kappa_entry => {
                let mut it = e.clone().into_inner();
                let _kw = it.next();
                let l = it.next().expect("label");
                let v = it.next().expect("value");
                let r = label(&l, group).and_then(|lab| {
                    if p.kappa.contains_key(&lab) {
                        return Err(at(&l, format!("duplicate kappa for {lab}")));
                    }
                    Ok((lab, rational(&v)?))
                });
                match b.record(r) {
                    Some((lab, v)) => {
                        p.kappa.insert(lab, v);
                    }
                    None => ok = false,
                }
            }
            _ => {
                b.unexpected(e, "params");
                ok = false;
            }
        }
    }
    ok.then_some((p, window_at))
}

/// Parses problem text; every problem found is reported with its line and column.
pub fn parse_problem_str(text: &str) -> std::result::Result<Problem, Diagnostics> {
    let file = ProblemParser::parse(Rule::file, text)
        .map_err(|e| Diagnostics(vec![syntax_diagnostic(e)]))?
        .next()
        .expect("file rule");
    let mut b = Builder { diagnostics: Vec::new() };
    let mut sections: Vec<Section> = Vec::new();
    for pair in file.into_inner() {
        match pair.as_rule() {
            Rule::EOI => {}
            Rule::section => {
                let name = first_inner(&pair).as_str().to_string();
                if !SECTIONS.contains(&name.as_str()) {
                    b.diagnostics
                        .push(at(&pair, format!("unknown section [{name}], expected one of {}", SECTIONS.join(", "))));
                } else if name != "hprime" && sections.iter().any(|s| s.name == name) {
                    b.diagnostics.push(at(&pair, format!("duplicate section [{name}]")));
                }
                sections.push(Section { header: pair, name, entries: Vec::new() });
            }
            _ => match sections.last_mut() {
                Some(s) => s.entries.push(pair),
                None => b.diagnostics.push(at(&pair, "entry before the first section header")),
            },
        }
    }
    if !b.diagnostics.is_empty() {
        return Err(Diagnostics(b.diagnostics));
    }
    let find = |name: &str| sections.iter().find(|s| s.name == name);
    let Some(group_section) = find("group") else {
        return Err(Diagnostics(vec![Diagnostic { line: 1, column: 1, message: "missing [group] section".into() }]));
    };
    let Some(group) = b.group(group_section) else {
        return Err(Diagnostics(b.diagnostics));
    };
    let mut problem = Problem::new(group.clone());
    problem.action = find("action").and_then(|s| b.action(s, &group));
    problem.theta = find("theta").and_then(|s| b.theta(s, &group));
    problem.hilbert = find("hilbert").and_then(|s| b.hilbert(s, &group));
    for s in sections.iter().filter(|s| s.name == "hprime") {
        if let Some(h) = b.hilbert(s, &group) {
            problem.hprimes.push(h);
        }
    }
    if let Some(s) = find("module") {
        if find("action").is_none() || problem.action.is_some() {
            problem.module = b.module(s, problem.action.as_ref());
        }
    }
    problem.frames = find("frames").and_then(|s| b.frames(s, &group));
    if let Some(s) = find("params") {
        if let Some((params, window_at)) = params_section(&mut b, s, &group) {
            if let (Some(w), Some(theta), Some((line, column))) = (&params.window, &problem.theta, window_at) {
                for l in theta.negative_labels() {
                    if !w.contains(&l) {
                        b.diagnostics.push(Diagnostic {
                            line,
                            column,
                            message: format!("window misses the negative label {l} of theta"),
                        });
                    }
                }
            }
            problem.params = params;
        }
    }
    if let Some(s) = find("task") {
        if let Some(t) = b.task(s) {
            problem.task = t;
        }
    }
    if b.diagnostics.is_empty() {
        Ok(problem)
    } else {
        Err(Diagnostics(b.diagnostics))
    }
}

pub fn parse_problem(path: &Path) -> crate::error::Result<Problem> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    parse_problem_str(&text)
        .map_err(|d| Error::Parse(format!("{}:{d}", path.display()).replace('\n', &format!("\n{}:", path.display()))))
}

fn step_text(step: &[i64]) -> String {
    match step {
        [one] => one.to_string(),
        _ => format!("({})", step.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")),
    }
}

fn matrix_text(m: &Matrix) -> String {
    let rows: Vec<String> = m
        .to_rows()
        .iter()
        .map(|r| format!("[{}]", r.iter().map(format_rational).collect::<Vec<_>>().join(", ")))
        .collect();
    format!("[{}]", rows.join(", "))
}

fn write_hilbert(out: &mut String, name: &str, h: &HilbertFunction) {
    let _ = writeln!(out, "\n[{name}]");
    for (l, v) in h.window() {
        let _ = writeln!(out, "{l} = {v}");
    }
    if let TailModel::Constant(rays) = h.tail() {
        for r in rays {
            let _ = writeln!(out, "ray {} step {} value {}", r.ray.start, step_text(&r.ray.step), r.value);
        }
    }
}

/// Canonical text of a problem; `parse_problem_str` reads it back unchanged.
pub fn print_problem(p: &Problem) -> String {
    let mut out = String::from("[group]\n");
    match &p.group {
        GroupSpec::Sl2 => out.push_str("kind = sl2\n"),
        GroupSpec::Diagonal(factors) => {
            let orders: Vec<String> = factors
                .iter()
                .filter_map(|f| match f {
                    Factor::Cyclic(n) => Some(n.to_string()),
                    Factor::Integer => None,
                })
                .collect();
            let rank = factors.iter().filter(|f| **f == Factor::Integer).count();
            match (orders.is_empty(), rank) {
                (false, 0) => {
                    let _ = writeln!(out, "kind = finite_abelian\norders = {}", orders.join(", "));
                }
                (true, r) => {
                    let _ = writeln!(out, "kind = torus\nrank = {r}");
                }
                (false, r) => {
                    let _ = writeln!(out, "kind = product\norders = {}\nrank = {r}", orders.join(", "));
                }
            }
        }
    }
    if let Some(a) = &p.action {
        out.push_str("\n[action]\n");
        for (name, w) in a.variables() {
            let _ = writeln!(out, "{name} = {w}");
        }
    }
    if let Some(t) = &p.theta {
        out.push_str("\n[theta]\n");
        for (l, v) in t.window() {
            let _ = writeln!(out, "{l} = {}", format_rational(v));
        }
        if let TailModel::Geometric(rays) = t.tail() {
            for r in rays {
                let _ = writeln!(
                    out,
                    "ray {} step {} coeff {} base {}",
                    r.ray.start,
                    step_text(&r.ray.step),
                    format_rational(&r.coefficient),
                    format_rational(&r.base)
                );
            }
        }
    }
    if let Some(h) = &p.hilbert {
        write_hilbert(&mut out, "hilbert", h);
    }
    for h in &p.hprimes {
        write_hilbert(&mut out, "hprime", h);
    }
    if let Some(m) = &p.module {
        out.push_str("\n[module]\n");
        for (l, n) in m.components() {
            let _ = writeln!(out, "dim {l} = {n}");
        }
        for ((v, src), mat) in m.arrows() {
            let _ = writeln!(out, "arrow {} {src} = {}", m.action().name(*v), matrix_text(mat));
        }
    }
    if let Some(frames) = &p.frames {
        out.push_str("\n[frames]\n");
        for (l, mat) in frames {
            let _ = writeln!(out, "frame {l} = {}", matrix_text(mat));
        }
    }
    if p.params.window.is_some() || !p.params.kappa.is_empty() {
        out.push_str("\n[params]\n");
        if let Some(w) = &p.params.window {
            let labels: Vec<String> = w.iter().map(ToString::to_string).collect();
            let _ = writeln!(out, "window = {}", labels.join(", "));
        }
        for (l, v) in &p.params.kappa {
            let _ = writeln!(out, "kappa {l} = {}", format_rational(v));
        }
    }
    let t = &p.task;
    if *t != TaskOptions::default() {
        out.push_str("\n[task]\n");
        if let Some(v) = t.samples {
            let _ = writeln!(out, "samples = {v}");
        }
        if let Some(v) = t.cap {
            let _ = writeln!(out, "cap = {v}");
        }
        if let Some(v) = &t.bound {
            let _ = writeln!(out, "bound = {}", format_rational(v));
        }
        if let Some(v) = t.radius {
            let _ = writeln!(out, "radius = {v}");
        }
        if let Some(v) = t.degree_bound {
            let _ = writeln!(out, "degree_bound = {v}");
        }
        if let Some(v) = t.complete {
            let _ = writeln!(out, "complete = {v}");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, q};

    const Z3: &str = "\
# free orbit through (1, 0)
[group]
kind = finite_abelian
orders = 3

[action]
x = chi_2
y = chi_1

[theta]
χ_0 = -2/1
chi_1 = -1
chi_2 = 3

[module]
dim 0 = 1
dim 1 = 1
dim 2 = 1
arrow x 0 = [[1]]
arrow x 2 = [[1]]
arrow x 1 = [[1]]

[params]
window = 0, 1, 2
kappa 0 = 1
kappa 1 = 1

[task]
samples = 8
bound = 1/1000
";

    fn ch(x: i64) -> IrrepLabel {
        IrrepLabel::Character(vec![x])
    }

    fn messages(text: &str) -> Vec<String> {
        parse_problem_str(text).unwrap_err().0.into_iter().map(|d| d.to_string()).collect()
    }

    #[test]
    fn parses_fixture() {
        let p = parse_problem_str(Z3).unwrap();
        assert_eq!(p.group, GroupSpec::finite_abelian(&[3]).unwrap());
        let theta = p.theta.as_ref().unwrap();
        assert_eq!(theta.value(&ch(0)), q(-2));
        assert_eq!(p.module.as_ref().unwrap().total_dim(), 3);
        assert_eq!(p.params.kappa.len(), 2);
        assert_eq!(p.task.bound, Some(frac(1, 1000)));
        assert_eq!(p.task.samples, Some(8));
    }

    #[test]
    fn round_trip() {
        let p = parse_problem_str(Z3).unwrap();
        let text = print_problem(&p);
        assert_eq!(parse_problem_str(&text).unwrap(), p);
        assert_eq!(print_problem(&parse_problem_str(&text).unwrap()), text);
    }

    #[test]
    fn tails_round_trip() {
        let text = "[group]\nkind = torus\nrank = 1\n[theta]\n0 = -1\nray 1 step 1 coeff 1/2 base 1/2\nray -1 step -1 coeff 1/4 base 1/3\n[hilbert]\n0 = 1\nray 1 step 1 value 1\nray -1 step -1 value 1\n[hprime]\n0 = 1\n";
        let p = parse_problem_str(text).unwrap();
        assert_eq!(p.hprimes.len(), 1);
        assert!(matches!(p.theta.as_ref().unwrap().tail(), TailModel::Geometric(r) if r.len() == 2));
        assert_eq!(parse_problem_str(&print_problem(&p)).unwrap(), p);
    }

    #[test]
    fn product_and_sl2_groups() {
        let p = parse_problem_str("[group]\nkind = product\norders = 2\nrank = 1\n[hilbert]\n(1,-1) = 2\n").unwrap();
        assert_eq!(p.hilbert.unwrap().value(&IrrepLabel::Character(vec![1, -1])), 2);
        let p = parse_problem_str("[group]\nkind = sl2\n[hilbert]\nV0 = 1\nV2 = 1\n").unwrap();
        assert_eq!(p.hilbert.as_ref().unwrap().value(&IrrepLabel::Spin(2)), 1);
        assert_eq!(parse_problem_str(&print_problem(&p)).unwrap(), p);
    }

    #[test]
    fn arrow_shape_is_diagnosed() {
        let text = Z3.replace("arrow x 1 = [[1]]", "arrow x 1 = [[1], [0]]");
        let m = messages(&text);
        assert_eq!(m.len(), 1);
        assert!(m[0].starts_with("21:1:"), "{m:?}");
        assert!(m[0].contains("from 1 to 0 must be 1x1"), "{m:?}");
    }

    #[test]
    fn unknown_keys_and_sections() {
        assert!(messages(&Z3.replace("samples", "sample"))[0].contains("unknown key `sample`"));
        assert!(messages(&Z3.replace("[params]", "[parameters]"))[0].contains("unknown section"));
        assert!(messages("x = 1\n")[0].contains("before the first section"));
        assert!(messages("[action]\nx = 1\n")[0].contains("missing [group]"));
    }

    #[test]
    fn syntax_errors_carry_position() {
        let m = messages("[group]\nkind = finite_abelian\norders = 3\n[theta]\n0 = -2/\n");
        assert_eq!(m.len(), 1);
        assert!(m[0].starts_with("5:"), "{m:?}");
        assert!(m[0].contains("expected"), "{m:?}");
    }

    #[test]
    fn semantic_errors() {
        let m = messages(&Z3.replace("window = 0, 1, 2", "window = 1, 2"));
        assert!(m[0].contains("misses the negative label 0"), "{m:?}");
        assert!(messages(&Z3.replace("chi_1 = -1", "chi_1 = 1/0"))[0].contains("not a valid rational"));
        assert!(messages(&Z3.replace("orders = 3", "orders = 1"))[0].contains("at least 2"));
        assert!(messages(&Z3.replace("chi_2 = 3", "chi_2 = 3\nchi_5 = 0"))[0].contains("duplicate entry for 2"));
        let m = messages(&Z3.replace("arrow x 1 = [[1]]", "arrow z 1 = [[1]]"));
        assert!(m[0].contains("unknown variable `z`"));
    }
}
