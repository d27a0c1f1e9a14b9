//! Finite-dimensional equivariant modules over a polynomial ring on which a
//! diagonal group acts through characters of the coordinates.
//!
//! A module is stored isotypically: one basis block per character, and one
//! exact matrix per (variable, source block). Submodules are graded subspaces
//! closed under every arrow.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{GroupSpec, IrrepLabel};
use crate::hilbert::HilbertFunction;
use crate::linalg::{Matrix, Subspace};
use crate::rational::{q, Q};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Exactness {
    Exact,
    Sampled,
}

impl Exactness {
    pub fn and(self, other: Exactness) -> Exactness {
        if self == Exactness::Exact && other == Exactness::Exact {
            Exactness::Exact
        } else {
            Exactness::Sampled
        }
    }
}

impl fmt::Display for Exactness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Exactness::Exact => "EXACT",
            Exactness::Sampled => "SAMPLED",
        })
    }
}

/// Coordinates of `X = C^n` together with the character each one carries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionSpec {
    group: GroupSpec,
    variables: Vec<(String, IrrepLabel)>,
}

impl ActionSpec {
    pub fn new(group: GroupSpec, variables: Vec<(String, IrrepLabel)>) -> Result<Self> {
        if !group.is_diagonal() {
            return Err(Error::InvalidGroup(format!("module actions need a diagonal group, got {group}")));
        }
        if variables.is_empty() {
            return Err(Error::InvalidModule("an action needs at least one variable".into()));
        }
        let mut names = BTreeSet::new();
        for (name, weight) in &variables {
            if name.is_empty() || !names.insert(name.as_str()) {
                return Err(Error::InvalidModule(format!("variable name {name:?} is empty or repeated")));
            }
            group.validate(weight)?;
        }
        Ok(ActionSpec { group, variables })
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn variables(&self) -> &[(String, IrrepLabel)] {
        &self.variables
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn name(&self, v: usize) -> &str {
        &self.variables[v].0
    }

    pub fn weight(&self, v: usize) -> &IrrepLabel {
        &self.variables[v].1
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|(n, _)| n == name)
    }

    /// Character of the monomial with the given exponents.
    pub fn monomial_character(&self, exponents: &[u32]) -> IrrepLabel {
        let rank = self.group.factors().len();
        let mut raw = vec![0i64; rank];
        for (e, (_, w)) in exponents.iter().zip(&self.variables) {
            let w = w.as_character().expect("diagonal weights are characters");
            for (r, x) in raw.iter_mut().zip(w) {
                *r += i64::from(*e) * x;
            }
        }
        self.group.character(&raw).expect("rank matches the group")
    }

    fn shift(&self, label: &IrrepLabel, v: usize) -> IrrepLabel {
        self.group.add_characters(label, self.weight(v)).expect("labels are validated")
    }
}

/// A failed commutation `x y = y x` on one source block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationViolation {
    pub first: String,
    pub second: String,
    pub source: IrrepLabel,
}

impl fmt::Display for RelationViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{a}{b} != {b}{a} on component {s}", a = self.first, b = self.second, s = self.source)
    }
}

/// Arrow blocks keyed by (variable index, source label).
pub type ArrowMap = BTreeMap<(usize, IrrepLabel), Matrix>;

fn block(
    action: &ActionSpec,
    components: &BTreeMap<IrrepLabel, usize>,
    arrows: &ArrowMap,
    v: usize,
    src: &IrrepLabel,
) -> Matrix {
    let target = action.shift(src, v);
    let rows = components.get(&target).copied().unwrap_or(0);
    let cols = components.get(src).copied().unwrap_or(0);
    arrows.get(&(v, src.clone())).cloned().unwrap_or_else(|| Matrix::zeros(rows, cols))
}

fn validate_shapes(action: &ActionSpec, components: &BTreeMap<IrrepLabel, usize>, arrows: &ArrowMap) -> Result<()> {
    for l in components.keys() {
        action.group.validate(l)?;
    }
    for ((v, src), m) in arrows {
        if *v >= action.len() {
            return Err(Error::Shape(format!("arrow for unknown variable #{v}")));
        }
        action.group.validate(src)?;
        let target = action.shift(src, *v);
        let rows = components.get(&target).copied().unwrap_or(0);
        let cols = components.get(src).copied().unwrap_or(0);
        if m.rows() != rows || m.cols() != cols {
            return Err(Error::Shape(format!(
                "arrow {} from component {src} to component {target} must be {rows}x{cols}, got {}x{}",
                action.name(*v),
                m.rows(),
                m.cols()
            )));
        }
    }
    Ok(())
}

/// Lists every violated commutation identity. Shape errors are reported as `Err`.
pub fn check_relations(
    action: &ActionSpec,
    components: &BTreeMap<IrrepLabel, usize>,
    arrows: &ArrowMap,
) -> Result<Vec<RelationViolation>> {
    validate_shapes(action, components, arrows)?;
    let mut out = Vec::new();
    for v in 0..action.len() {
        for w in v + 1..action.len() {
            for src in components.keys() {
                let via_v = block(action, components, arrows, w, &action.shift(src, v))
                    .mul(&block(action, components, arrows, v, src))
                    .expect("shapes validated");
                let via_w = block(action, components, arrows, v, &action.shift(src, w))
                    .mul(&block(action, components, arrows, w, src))
                    .expect("shapes validated");
                if via_v != via_w {
                    out.push(RelationViolation {
                        first: action.name(v).to_string(),
                        second: action.name(w).to_string(),
                        source: src.clone(),
                    });
                }
            }
        }
    }
    Ok(out)
}

/// A graded subspace of a module or of `A`: one subspace per label.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GradedSubspace {
    parts: BTreeMap<IrrepLabel, Subspace>,
}

impl GradedSubspace {
    pub fn new(parts: BTreeMap<IrrepLabel, Subspace>) -> Self {
        GradedSubspace { parts: parts.into_iter().filter(|(_, s)| !s.is_zero()).collect() }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn single(label: IrrepLabel, space: Subspace) -> Self {
        Self::new([(label, space)].into_iter().collect())
    }

    pub fn parts(&self) -> &BTreeMap<IrrepLabel, Subspace> {
        &self.parts
    }

    pub fn get(&self, label: &IrrepLabel) -> Option<&Subspace> {
        self.parts.get(label)
    }

    pub fn dim(&self, label: &IrrepLabel) -> usize {
        self.parts.get(label).map_or(0, Subspace::dim)
    }

    pub fn total_dim(&self) -> usize {
        self.parts.values().map(Subspace::dim).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn dims(&self) -> BTreeMap<IrrepLabel, usize> {
        self.parts.iter().map(|(l, s)| (l.clone(), s.dim())).collect()
    }

    pub fn sum(&self, other: &GradedSubspace) -> GradedSubspace {
        let mut parts = self.parts.clone();
        for (l, s) in &other.parts {
            let merged = match parts.get(l) {
                Some(existing) => existing.sum(s),
                None => s.clone(),
            };
            parts.insert(l.clone(), merged);
        }
        GradedSubspace { parts }
    }

    pub fn contains(&self, other: &GradedSubspace) -> bool {
        other.parts.iter().all(|(l, s)| self.parts.get(l).is_some_and(|mine| mine.contains(s)))
    }

    pub fn hilbert_function(&self, group: &GroupSpec) -> HilbertFunction {
        HilbertFunction::finite(group, self.parts.iter().map(|(l, s)| (l.clone(), s.dim() as u64)))
            .expect("graded subspaces live on valid labels")
    }
}

/// A finite-dimensional equivariant module.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivariantModule {
    action: ActionSpec,
    components: BTreeMap<IrrepLabel, usize>,
    arrows: ArrowMap,
}

impl EquivariantModule {
    pub fn new(action: ActionSpec, components: BTreeMap<IrrepLabel, usize>, arrows: ArrowMap) -> Result<Self> {
        let components: BTreeMap<_, _> = components.into_iter().filter(|(_, n)| *n > 0).collect();
        let violations = check_relations(&action, &components, &arrows)?;
        if !violations.is_empty() {
            let text: Vec<String> = violations.iter().map(ToString::to_string).collect();
            return Err(Error::InvalidModule(text.join("; ")));
        }
        let arrows = arrows.into_iter().filter(|(_, m)| !m.is_zero()).collect();
        Ok(EquivariantModule { action, components, arrows })
    }

    pub fn action(&self) -> &ActionSpec {
        &self.action
    }

    pub fn group(&self) -> &GroupSpec {
        &self.action.group
    }

    pub fn components(&self) -> &BTreeMap<IrrepLabel, usize> {
        &self.components
    }

    /// Non-zero arrow blocks.
    pub fn arrows(&self) -> &ArrowMap {
        &self.arrows
    }

    pub fn dim(&self, label: &IrrepLabel) -> usize {
        self.components.get(label).copied().unwrap_or(0)
    }

    pub fn total_dim(&self) -> usize {
        self.components.values().sum()
    }

    pub fn is_multiplicity_free(&self) -> bool {
        self.components.values().all(|&n| n <= 1)
    }

    pub fn hilbert_function(&self) -> HilbertFunction {
        HilbertFunction::finite(self.group(), self.components.iter().map(|(l, n)| (l.clone(), *n as u64)))
            .expect("components live on valid labels")
    }

    pub fn arrow(&self, v: usize, src: &IrrepLabel) -> Matrix {
        block(&self.action, &self.components, &self.arrows, v, src)
    }

    pub fn target(&self, v: usize, src: &IrrepLabel) -> IrrepLabel {
        self.action.shift(src, v)
    }

    pub fn full(&self) -> GradedSubspace {
        GradedSubspace::new(self.components.iter().map(|(l, n)| (l.clone(), Subspace::full(*n))).collect())
    }

    /// Smallest submodule containing `seed`.
    pub fn closure(&self, seed: &GradedSubspace) -> GradedSubspace {
        let mut parts = seed.parts.clone();
        let mut pending: Vec<IrrepLabel> = parts.keys().cloned().collect();
        while let Some(src) = pending.pop() {
            let space = parts[&src].clone();
            for v in 0..self.action.len() {
                let Some(m) = self.arrows.get(&(v, src.clone())) else { continue };
                let image = space.image(m);
                if image.is_zero() {
                    continue;
                }
                let target = self.target(v, &src);
                let grown = match parts.get(&target) {
                    Some(existing) if existing.contains(&image) => continue,
                    Some(existing) => existing.sum(&image),
                    None => image,
                };
                parts.insert(target.clone(), grown);
                pending.push(target);
            }
        }
        GradedSubspace::new(parts)
    }

    /// Submodule generated by the full components at the given labels.
    pub fn generated_by(&self, labels: &BTreeSet<IrrepLabel>) -> GradedSubspace {
        let seed = self
            .components
            .iter()
            .filter(|(l, _)| labels.contains(*l))
            .map(|(l, n)| (l.clone(), Subspace::full(*n)))
            .collect();
        self.closure(&GradedSubspace::new(seed))
    }

    pub fn is_submodule(&self, s: &GradedSubspace) -> bool {
        self.closure(s) == *s
    }

    /// Arrow blocks written in a new basis: `changes[l]` has the new basis
    /// vectors of component `l` as its columns (identity where absent).
    pub fn conjugate(&self, changes: &BTreeMap<IrrepLabel, Matrix>) -> Result<Self> {
        let basis = |l: &IrrepLabel| changes.get(l).cloned().unwrap_or_else(|| Matrix::identity(self.dim(l)));
        for (l, p) in changes {
            if p.rows() != self.dim(l) || !p.is_invertible() {
                return Err(Error::NotInvertible(format!("basis change on component {l}")));
            }
        }
        let mut arrows = ArrowMap::new();
        for ((v, src), m) in &self.arrows {
            let target = self.target(*v, src);
            let inv = basis(&target).inverse().expect("checked invertible");
            let new = inv.mul(m).and_then(|x| x.mul(&basis(src))).expect("shapes agree");
            arrows.insert((*v, src.clone()), new);
        }
        EquivariantModule::new(self.action.clone(), self.components.clone(), arrows)
    }

    pub fn direct_sum(&self, other: &EquivariantModule) -> Result<Self> {
        if self.action != other.action {
            return Err(Error::InvalidModule("direct sum of modules over different actions".into()));
        }
        let mut components = self.components.clone();
        for (l, n) in &other.components {
            *components.entry(l.clone()).or_insert(0) += n;
        }
        let mut arrows = ArrowMap::new();
        let sources: BTreeSet<(usize, IrrepLabel)> = self.arrows.keys().chain(other.arrows.keys()).cloned().collect();
        for (v, src) in sources {
            let target = self.target(v, &src);
            let (a, b) = (self.arrow(v, &src), other.arrow(v, &src));
            let (r0, c0) = (self.dim(&target), self.dim(&src));
            let m = Matrix::from_fn(components.get(&target).copied().unwrap_or(0), components[&src], |r, c| {
                if r < r0 && c < c0 {
                    a.get(r, c).clone()
                } else if r >= r0 && c >= c0 {
                    b.get(r - r0, c - c0).clone()
                } else {
                    Q::zero()
                }
            });
            arrows.insert((v, src), m);
        }
        EquivariantModule::new(self.action.clone(), components, arrows)
    }

    /// Action of the monomial `x^exponents` on component `src`, as a matrix
    /// from `F_src` to the component of `src` shifted by the monomial.
    pub fn monomial_action(&self, exponents: &[u32], src: &IrrepLabel) -> Matrix {
        let mut current = src.clone();
        let mut acc = Matrix::identity(self.dim(src));
        for (v, e) in exponents.iter().enumerate() {
            for _ in 0..*e {
                acc = self.arrow(v, &current).mul(&acc).expect("composable blocks");
                current = self.target(v, &current);
            }
        }
        acc
    }
}

/// Knobs for the sampled part of subspace enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplingConfig {
    pub seed: u64,
    /// Random graded subspaces tried on top of the coordinate ones.
    pub samples: usize,
    /// Upper limit on the number of distinct subspaces visited.
    pub cap: usize,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig { seed: 0, samples: 64, cap: 1 << 14 }
    }
}

impl SamplingConfig {
    pub fn rng(&self) -> ChaCha8Rng {
        rand::SeedableRng::seed_from_u64(self.seed)
    }
}

pub fn random_rational(rng: &mut impl Rng, spread: i64) -> Q {
    let n = rng.gen_range(-spread..=spread);
    let d = rng.gen_range(1..=spread.max(1));
    Q::new(n.into(), d.into())
}

pub fn random_nonzero_rational(rng: &mut impl Rng, spread: i64) -> Q {
    loop {
        let x = random_rational(rng, spread);
        if !x.is_zero() {
            return x;
        }
    }
}

pub fn random_invertible(rng: &mut impl Rng, n: usize) -> Matrix {
    loop {
        let mut m = Matrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                m.set(r, c, random_rational(rng, 3));
            }
        }
        if m.is_invertible() {
            return m;
        }
    }
}

fn random_vector(rng: &mut impl Rng, n: usize) -> Vec<Q> {
    loop {
        let v: Vec<Q> = (0..n).map(|_| q(rng.gen_range(-3..=3))).collect();
        if v.iter().any(|x| !x.is_zero()) {
            return v;
        }
    }
}

/// Coordinate lines of the listed blocks.
pub fn coordinate_atoms(dims: &BTreeMap<IrrepLabel, usize>) -> Vec<GradedSubspace> {
    let mut out = Vec::new();
    for (l, n) in dims {
        for i in 0..*n {
            out.push(GradedSubspace::single(l.clone(), Subspace::coordinate(*n, &[i])));
        }
    }
    out
}

/// A graded subspace spanned by one or two random vectors in random blocks.
pub fn random_graded_subspace(rng: &mut impl Rng, dims: &BTreeMap<IrrepLabel, usize>) -> GradedSubspace {
    let labels: Vec<(&IrrepLabel, &usize)> = dims.iter().filter(|(_, n)| **n > 0).collect();
    let mut out = GradedSubspace::zero();
    if labels.is_empty() {
        return out;
    }
    let count = rng.gen_range(1..=2);
    for _ in 0..count {
        let (l, n) = labels.choose(rng).expect("non-empty");
        let v = random_vector(rng, **n);
        out = out.sum(&GradedSubspace::single((*l).clone(), Subspace::span(**n, vec![v])));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubmoduleEnumeration {
    /// Distinct submodules found, in canonical order; always includes zero.
    pub submodules: Vec<GradedSubspace>,
    pub exactness: Exactness,
    /// Number of distinct submodules examined.
    pub sample_size: usize,
}

impl SubmoduleEnumeration {
    pub fn hilbert_functions(&self, group: &GroupSpec) -> BTreeSet<HilbertFunction> {
        self.submodules.iter().map(|s| s.hilbert_function(group)).collect()
    }
}

/// Submodules of `m`, or only those generated by components in `restrict`.
///
/// Exhaustive when every block that can seed a submodule is at most one
/// dimensional: then every such submodule is the closure of a set of
/// coordinate lines. Otherwise the coordinate lattice is supplemented by
/// seeded random subspaces and the result is flagged as sampled.
pub fn enumerate_submodules(
    m: &EquivariantModule,
    restrict: Option<&BTreeSet<IrrepLabel>>,
    config: &SamplingConfig,
) -> Result<SubmoduleEnumeration> {
    let seeds: BTreeMap<IrrepLabel, usize> = m
        .components
        .iter()
        .filter(|(l, _)| restrict.is_none_or(|r| r.contains(*l)))
        .map(|(l, n)| (l.clone(), *n))
        .collect();
    let exact = seeds.values().all(|&n| n <= 1);
    let atoms = coordinate_atoms(&seeds);
    let mut seen: BTreeSet<GradedSubspace> = BTreeSet::new();
    seen.insert(GradedSubspace::zero());
    let mut queue = vec![GradedSubspace::zero()];
    'outer: while let Some(s) = queue.pop() {
        for a in &atoms {
            if s.contains(a) {
                continue;
            }
            let t = m.closure(&s.sum(a));
            if seen.insert(t.clone()) {
                if seen.len() > config.cap {
                    if exact {
                        return Err(Error::CapExceeded { cap: config.cap });
                    }
                    break 'outer;
                }
                queue.push(t);
            }
        }
    }
    if !exact {
        let mut rng = config.rng();
        for _ in 0..config.samples {
            let seed = random_graded_subspace(&mut rng, &seeds);
            seen.insert(m.closure(&seed));
        }
    }
    let sample_size = seen.len();
    Ok(SubmoduleEnumeration {
        submodules: seen.into_iter().collect(),
        exactness: if exact { Exactness::Exact } else { Exactness::Sampled },
        sample_size,
    })
}

/// Hilbert functions of submodules, optionally only those generated in `dminus`.
pub fn enumerate_submodule_hilbert_functions(
    m: &EquivariantModule,
    restrict_to_dminus: bool,
    dminus: &BTreeSet<IrrepLabel>,
    config: &SamplingConfig,
) -> Result<(BTreeSet<HilbertFunction>, Exactness, usize)> {
    let e = enumerate_submodules(m, restrict_to_dminus.then_some(dminus), config)?;
    Ok((e.hilbert_functions(m.group()), e.exactness, e.sample_size))
}

/// A module together with frames `phi_rho: A_rho -> F_rho` for `rho` in `D_-`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientPresentation {
    module: EquivariantModule,
    dminus: BTreeSet<IrrepLabel>,
    frames: BTreeMap<IrrepLabel, Matrix>,
    generated: bool,
}

impl QuotientPresentation {
    /// Frames are required on every non-zero component indexed by `dminus`.
    pub fn new(
        module: EquivariantModule,
        dminus: BTreeSet<IrrepLabel>,
        frames: BTreeMap<IrrepLabel, Matrix>,
    ) -> Result<Self> {
        for l in &dminus {
            module.group().validate(l)?;
        }
        for l in frames.keys() {
            if !dminus.contains(l) {
                return Err(Error::Shape(format!("frame given for {l}, which is not in D_-")));
            }
        }
        let mut kept = BTreeMap::new();
        for l in &dminus {
            let n = module.dim(l);
            if n == 0 {
                if frames.get(l).is_some_and(|f| f.rows() + f.cols() > 0) {
                    return Err(Error::Shape(format!("component {l} is zero, so its frame must be empty")));
                }
                continue;
            }
            let f = frames.get(l).ok_or_else(|| Error::Shape(format!("missing frame for component {l}")))?;
            if f.rows() != n || f.cols() != n {
                return Err(Error::Shape(format!("frame for {l} must be {n}x{n}, got {}x{}", f.rows(), f.cols())));
            }
            if !f.is_invertible() {
                return Err(Error::NotInvertible(format!("frame {l}")));
            }
            kept.insert(l.clone(), f.clone());
        }
        let generated = module.generated_by(&dminus) == module.full();
        Ok(QuotientPresentation { module, dminus, frames: kept, generated })
    }

    pub fn with_identity_frames(module: EquivariantModule, dminus: BTreeSet<IrrepLabel>) -> Result<Self> {
        let frames =
            dminus.iter().filter(|l| module.dim(l) > 0).map(|l| (l.clone(), Matrix::identity(module.dim(l)))).collect();
        Self::new(module, dminus, frames)
    }

    pub fn module(&self) -> &EquivariantModule {
        &self.module
    }

    pub fn dminus(&self) -> &BTreeSet<IrrepLabel> {
        &self.dminus
    }

    pub fn frames(&self) -> &BTreeMap<IrrepLabel, Matrix> {
        &self.frames
    }

    /// Whether the frames' images generate the module.
    pub fn is_generated(&self) -> bool {
        self.generated
    }

    /// `dim A_rho` for the non-zero blocks of `A`.
    pub fn a_dims(&self) -> BTreeMap<IrrepLabel, usize> {
        self.frames.iter().map(|(l, f)| (l.clone(), f.cols())).collect()
    }

    pub fn dim_a(&self) -> usize {
        self.frames.values().map(Matrix::cols).sum()
    }

    pub fn full_a(&self) -> GradedSubspace {
        GradedSubspace::new(self.a_dims().into_iter().map(|(l, n)| (l, Subspace::full(n))).collect())
    }

    pub fn is_multiplicity_free_on_a(&self) -> bool {
        self.frames.values().all(|f| f.cols() <= 1)
    }

    fn check_in_a(&self, a: &GradedSubspace) -> Result<()> {
        for (l, s) in a.parts() {
            match self.frames.get(l) {
                Some(f) if f.cols() == s.ambient() => {}
                _ => return Err(Error::Shape(format!("subspace at {l} does not live in A"))),
            }
        }
        Ok(())
    }

    /// `phi(A')` as a graded subspace of the module.
    pub fn push_forward(&self, a: &GradedSubspace) -> Result<GradedSubspace> {
        self.check_in_a(a)?;
        Ok(GradedSubspace::new(a.parts().iter().map(|(l, s)| (l.clone(), s.image(&self.frames[l]))).collect()))
    }

    /// `phi^{-1}(F'_rho)` on every block of `A`.
    pub fn pull_back(&self, f: &GradedSubspace) -> GradedSubspace {
        GradedSubspace::new(
            self.frames
                .iter()
                .filter_map(|(l, phi)| {
                    let s = f.get(l)?;
                    Some((l.clone(), s.image(&phi.inverse().expect("frames are invertible"))))
                })
                .collect(),
        )
    }

    /// Submodule generated by `phi(A')`.
    pub fn generated_submodule(&self, a: &GradedSubspace) -> Result<GradedSubspace> {
        Ok(self.module.closure(&self.push_forward(a)?))
    }
}

/// An element of `prod_{rho in D_-} GL(A_rho)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaugeElement {
    blocks: BTreeMap<IrrepLabel, Matrix>,
}

impl GaugeElement {
    pub fn new(blocks: BTreeMap<IrrepLabel, Matrix>) -> Result<Self> {
        for (l, b) in &blocks {
            if !b.is_invertible() {
                return Err(Error::NotInvertible(format!("gauge block {l}")));
            }
        }
        Ok(GaugeElement { blocks })
    }

    pub fn identity(p: &QuotientPresentation) -> Self {
        Self::scalar(p, Q::one()).expect("one is invertible")
    }

    pub fn scalar(p: &QuotientPresentation, value: Q) -> Result<Self> {
        Self::new(p.a_dims().into_iter().map(|(l, n)| (l, Matrix::scalar(n, value.clone()))).collect())
    }

    pub fn random(p: &QuotientPresentation, rng: &mut impl Rng) -> Self {
        GaugeElement { blocks: p.a_dims().into_iter().map(|(l, n)| (l, random_invertible(rng, n))).collect() }
    }

    pub fn blocks(&self) -> &BTreeMap<IrrepLabel, Matrix> {
        &self.blocks
    }

    /// `gamma^{-1}(A')`, the subspace that plays the role of `A'` after reframing.
    pub fn pull(&self, a: &GradedSubspace) -> GradedSubspace {
        GradedSubspace::new(
            a.parts()
                .iter()
                .map(|(l, s)| match self.blocks.get(l) {
                    Some(g) => (l.clone(), s.image(&g.inverse().expect("gauge blocks are invertible"))),
                    None => (l.clone(), s.clone()),
                })
                .collect(),
        )
    }
}

/// Replaces every frame `phi_rho` by `phi_rho * gamma_rho`.
pub fn apply_gauge(p: &QuotientPresentation, gamma: &GaugeElement) -> Result<QuotientPresentation> {
    let dims = p.a_dims();
    for (l, g) in &gamma.blocks {
        let n = dims.get(l).copied().unwrap_or(0);
        if g.rows() != n || g.cols() != n {
            return Err(Error::Shape(format!("gauge block {l} must be {n}x{n}, got {}x{}", g.rows(), g.cols())));
        }
    }
    let frames = p
        .frames
        .iter()
        .map(|(l, f)| {
            let new = match gamma.blocks.get(l) {
                Some(g) => f.mul(g).expect("shapes checked"),
                None => f.clone(),
            };
            (l.clone(), new)
        })
        .collect();
    Ok(QuotientPresentation { module: p.module.clone(), dminus: p.dminus.clone(), frames, generated: p.generated })
}

/// Whether the exponent vectors form an order ideal (closed under division).
pub fn is_order_ideal(monomials: &BTreeSet<Vec<u32>>) -> bool {
    monomials.iter().all(|m| {
        (0..m.len()).all(|i| {
            m[i] == 0 || {
                let mut d = m.clone();
                d[i] -= 1;
                monomials.contains(&d)
            }
        })
    })
}

/// The module `C[x]/I` for the monomial ideal `I` whose standard monomials are
/// the given order ideal; basis ordered by exponent vector inside each block.
pub fn monomial_module(action: &ActionSpec, monomials: &BTreeSet<Vec<u32>>) -> Result<EquivariantModule> {
    if monomials.iter().any(|m| m.len() != action.len()) {
        return Err(Error::Shape("exponent vectors must have one entry per variable".into()));
    }
    if !is_order_ideal(monomials) {
        return Err(Error::InvalidModule("standard monomials must be closed under division".into()));
    }
    let mut blocks: BTreeMap<IrrepLabel, Vec<&Vec<u32>>> = BTreeMap::new();
    for m in monomials {
        blocks.entry(action.monomial_character(m)).or_default().push(m);
    }
    let position = |m: &Vec<u32>| -> (IrrepLabel, usize) {
        let l = action.monomial_character(m);
        let i = blocks[&l].iter().position(|x| *x == m).expect("monomial is in its block");
        (l, i)
    };
    let components: BTreeMap<IrrepLabel, usize> = blocks.iter().map(|(l, v)| (l.clone(), v.len())).collect();
    let mut arrows = ArrowMap::new();
    for m in monomials {
        let (src, col) = position(m);
        for v in 0..action.len() {
            let mut next = m.clone();
            next[v] += 1;
            if !monomials.contains(&next) {
                continue;
            }
            let (target, row) = position(&next);
            let entry =
                arrows.entry((v, src.clone())).or_insert_with(|| Matrix::zeros(components[&target], components[&src]));
            entry.set(row, col, Q::one());
        }
    }
    EquivariantModule::new(action.clone(), components, arrows)
}

/// Functions on the orbit of `point` under a finite diagonal group: one
/// basis vector per character, `x_i` acting by the scalar `point[i]`.
pub fn free_orbit_module(action: &ActionSpec, point: &[Q]) -> Result<EquivariantModule> {
    if point.len() != action.len() {
        return Err(Error::Shape("point must have one coordinate per variable".into()));
    }
    let labels = action.group().all_characters()?;
    let components = labels.iter().map(|l| (l.clone(), 1)).collect();
    let mut arrows = ArrowMap::new();
    for l in &labels {
        for (v, p) in point.iter().enumerate() {
            arrows.insert((v, l.clone()), Matrix::scalar(1, p.clone()));
        }
    }
    EquivariantModule::new(action.clone(), components, arrows)
}

/// A module whose only non-zero entries are the given components, all arrows zero.
pub fn trivial_module(action: &ActionSpec, components: BTreeMap<IrrepLabel, usize>) -> Result<EquivariantModule> {
    EquivariantModule::new(action.clone(), components, ArrowMap::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng as _};

    fn ch(x: i64) -> IrrepLabel {
        IrrepLabel::Character(vec![x])
    }

    fn z3_action() -> ActionSpec {
        ActionSpec::new(GroupSpec::finite_abelian(&[3]).unwrap(), vec![("x".into(), ch(2)), ("y".into(), ch(1))])
            .unwrap()
    }

    fn nilpotent() -> EquivariantModule {
        let s: BTreeSet<Vec<u32>> = [vec![0, 0], vec![1, 0], vec![2, 0]].into_iter().collect();
        monomial_module(&z3_action(), &s).unwrap()
    }

    fn free_orbit() -> EquivariantModule {
        free_orbit_module(&z3_action(), &[q(1), q(0)]).unwrap()
    }

    fn line(l: IrrepLabel) -> GradedSubspace {
        GradedSubspace::single(l, Subspace::full(1))
    }

    fn dims(h: &HilbertFunction) -> Vec<u64> {
        (0..3).map(|i| h.value(&ch(i))).collect()
    }

    #[test]
    fn relations_examples() {
        let a = z3_action();
        let m = nilpotent();
        assert!(check_relations(&a, m.components(), m.arrows()).unwrap().is_empty());

        // y * 1 = x would need y to land in chi_2, but y shifts chi_0 to chi_1
        let mut arrows = m.arrows().clone();
        arrows.insert((1, ch(0)), Matrix::from_rows(1, 2, vec![vec![q(1), q(0)]]).unwrap());
        assert!(matches!(check_relations(&a, m.components(), &arrows), Err(Error::Shape(_))));

        let torus =
            ActionSpec::new(GroupSpec::torus(1).unwrap(), vec![("x".into(), ch(1)), ("y".into(), ch(1))]).unwrap();
        let comps: BTreeMap<_, _> = [(ch(0), 1), (ch(1), 1), (ch(2), 1)].into_iter().collect();
        let mut arrows = ArrowMap::new();
        arrows.insert((0, ch(0)), Matrix::scalar(1, q(2)));
        arrows.insert((1, ch(0)), Matrix::scalar(1, q(3)));
        arrows.insert((0, ch(1)), Matrix::scalar(1, q(2)));
        arrows.insert((1, ch(1)), Matrix::scalar(1, q(3)));
        assert!(check_relations(&torus, &comps, &arrows).unwrap().is_empty());
        arrows.insert((1, ch(1)), Matrix::scalar(1, q(5)));
        assert_eq!(check_relations(&torus, &comps, &arrows).unwrap().len(), 1);
    }

    #[test]
    fn closure_examples() {
        let m = nilpotent();
        let g = m.group().clone();
        assert_eq!(dims(&m.closure(&line(ch(1))).hilbert_function(&g)), vec![0, 1, 0]);
        assert_eq!(dims(&m.closure(&line(ch(0))).hilbert_function(&g)), vec![1, 1, 1]);
        assert_eq!(dims(&m.closure(&line(ch(2))).hilbert_function(&g)), vec![0, 1, 1]);
    }

    #[test]
    fn enumeration_examples() {
        let cfg = SamplingConfig::default();
        let dminus: BTreeSet<_> = [ch(0), ch(1)].into_iter().collect();
        let (hs, ex, _) = enumerate_submodule_hilbert_functions(&nilpotent(), true, &dminus, &cfg).unwrap();
        let got: Vec<Vec<u64>> = hs.iter().map(dims).collect();
        let mut got = got;
        got.sort();
        assert_eq!(got, vec![vec![0, 0, 0], vec![0, 1, 0], vec![1, 1, 1]]);
        assert_eq!(ex, Exactness::Exact);

        let (hs, ex, _) = enumerate_submodule_hilbert_functions(&free_orbit(), false, &dminus, &cfg).unwrap();
        let mut got: Vec<Vec<u64>> = hs.iter().map(dims).collect();
        got.sort();
        assert_eq!(got, vec![vec![0, 0, 0], vec![1, 1, 1]]);
        assert_eq!(ex, Exactness::Exact);

        let doubled = nilpotent().direct_sum(&nilpotent()).unwrap();
        let e = enumerate_submodules(&doubled, None, &cfg).unwrap();
        assert_eq!(e.exactness, Exactness::Sampled);
    }

    /// All arrow-closed subsets of the basis of a multiplicity-free module.
    fn brute_force_closed_sets(m: &EquivariantModule) -> BTreeSet<BTreeSet<IrrepLabel>> {
        let labels: Vec<IrrepLabel> = m.components().keys().cloned().collect();
        let mut out = BTreeSet::new();
        for mask in 0u32..(1 << labels.len()) {
            let set: BTreeSet<IrrepLabel> =
                (0..labels.len()).filter(|i| mask & (1 << i) != 0).map(|i| labels[i].clone()).collect();
            let closed = set
                .iter()
                .all(|l| (0..m.action().len()).all(|v| m.arrow(v, l).is_zero() || set.contains(&m.target(v, l))));
            if closed {
                out.insert(set);
            }
        }
        out
    }

    #[test]
    fn gauge_examples() {
        let dminus: BTreeSet<_> = [ch(0), ch(1)].into_iter().collect();
        let p = QuotientPresentation::with_identity_frames(nilpotent(), dminus).unwrap();
        assert!(p.is_generated());
        assert_eq!(apply_gauge(&p, &GaugeElement::identity(&p)).unwrap(), p);
        let g = GaugeElement::new([(ch(0), Matrix::scalar(1, q(2)))].into_iter().collect()).unwrap();
        let p2 = apply_gauge(&p, &g).unwrap();
        assert_eq!(p2.frames()[&ch(0)], Matrix::scalar(1, q(2)));
        assert_eq!(p2.module(), p.module());
        let bad = GaugeElement::new([(ch(0), Matrix::identity(2))].into_iter().collect()).unwrap();
        assert!(matches!(apply_gauge(&p, &bad), Err(Error::Shape(_))));
    }

    #[test]
    fn presentation_rejects_singular_frames() {
        let dminus: BTreeSet<_> = [ch(0)].into_iter().collect();
        let frames = [(ch(0), Matrix::zeros(1, 1))].into_iter().collect();
        assert!(matches!(QuotientPresentation::new(nilpotent(), dminus, frames), Err(Error::NotInvertible(_))));
    }

    #[test]
    fn split_module_not_generated() {
        let comps = [(ch(0), 1), (ch(2), 1)].into_iter().collect();
        let m = trivial_module(&z3_action(), comps).unwrap();
        let p = QuotientPresentation::with_identity_frames(m, [ch(0)].into_iter().collect()).unwrap();
        assert!(!p.is_generated());
    }

    fn random_module(seed: u64) -> EquivariantModule {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = z3_action();
        let shapes: Vec<BTreeSet<Vec<u32>>> = vec![
            [vec![0, 0], vec![1, 0], vec![2, 0]].into_iter().collect(),
            [vec![0, 0], vec![1, 0], vec![0, 1]].into_iter().collect(),
            [vec![0, 0], vec![0, 1]].into_iter().collect(),
            [vec![0, 0]].into_iter().collect(),
        ];
        let first = monomial_module(&a, shapes.choose(&mut rng).unwrap()).unwrap();
        let m = if rng.gen_bool(0.5) {
            first.direct_sum(&monomial_module(&a, shapes.choose(&mut rng).unwrap()).unwrap()).unwrap()
        } else {
            first
        };
        let changes = m.components().iter().map(|(l, n)| (l.clone(), random_invertible(&mut rng, *n))).collect();
        m.conjugate(&changes).unwrap()
    }

    proptest! {
        #[test]
        fn closure_idempotent_and_monotone(seed in 0u64..200) {
            let m = random_module(seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed + 1000);
            let dims = m.components().clone();
            let s = random_graded_subspace(&mut rng, &dims);
            let t = s.sum(&random_graded_subspace(&mut rng, &dims));
            let cs = m.closure(&s);
            prop_assert_eq!(m.closure(&cs), cs.clone());
            let ct = m.closure(&t);
            prop_assert!(ct.contains(&cs));
            prop_assert!(cs.contains(&s));
        }

        #[test]
        fn submodules_respect_h(seed in 0u64..100) {
            let m = random_module(seed);
            let h = m.hilbert_function();
            let e = enumerate_submodules(&m, None, &SamplingConfig { seed, ..Default::default() }).unwrap();
            for s in &e.submodules {
                prop_assert!(m.is_submodule(s));
                let hp = s.hilbert_function(m.group());
                prop_assert!(hp.le_on(&h, h.window().keys()));
                let quotient = h.checked_sub(&hp).unwrap();
                for l in h.window().keys() {
                    prop_assert_eq!(hp.value(l) + quotient.value(l), h.value(l));
                }
            }
        }

        #[test]
        fn multiplicity_free_matches_brute_force(seed in 0u64..60) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = GroupSpec::finite_abelian(&[7]).unwrap();
            let a = ActionSpec::new(g, vec![("x".into(), ch(1)), ("y".into(), ch(3))]).unwrap();
            let mut s: BTreeSet<Vec<u32>> = [vec![0, 0]].into_iter().collect();
            // grow a random order ideal while characters stay distinct
            for _ in 0..12 {
                let base: Vec<Vec<u32>> = s.iter().cloned().collect();
                let m = base.choose(&mut rng).unwrap().clone();
                let mut next = m.clone();
                next[rng.gen_range(0..2)] += 1;
                let mut trial = s.clone();
                trial.insert(next);
                let chars: BTreeSet<_> = trial.iter().map(|m| a.monomial_character(m)).collect();
                if is_order_ideal(&trial) && chars.len() == trial.len() {
                    s = trial;
                }
            }
            let m = monomial_module(&a, &s).unwrap();
            prop_assume!(m.is_multiplicity_free());
            let e = enumerate_submodules(&m, None, &SamplingConfig::default()).unwrap();
            prop_assert_eq!(e.exactness, Exactness::Exact);
            let found: BTreeSet<BTreeSet<IrrepLabel>> =
                e.submodules.iter().map(|s| s.parts().keys().cloned().collect()).collect();
            prop_assert_eq!(found, brute_force_closed_sets(&m));
        }

        #[test]
        fn gauge_keeps_module(seed in 0u64..50) {
            let m = random_module(seed);
            let dminus: BTreeSet<_> = [ch(0)].into_iter().collect();
            let p = QuotientPresentation::with_identity_frames(m, dminus).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = GaugeElement::random(&p, &mut rng);
            let p2 = apply_gauge(&p, &g).unwrap();
            prop_assert_eq!(p2.module().hilbert_function(), p.module().hilbert_function());
            prop_assert_eq!(p2.is_generated(), p.is_generated());
            let cfg = SamplingConfig::default();
            prop_assert_eq!(
                enumerate_submodules(p2.module(), None, &cfg).unwrap(),
                enumerate_submodules(p.module(), None, &cfg).unwrap()
            );
        }
    }
}
