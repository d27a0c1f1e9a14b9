//! Invariant monomials of a diagonal action and the Hilbert–Chow point of a
//! module with a one-dimensional invariant component.

use std::collections::{BTreeMap, BTreeSet};

use num::{One, Zero};

use crate::equivariant::{ActionSpec, EquivariantModule};
use crate::error::{Error, Result};
use crate::rational::{format_rational, Q};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantGenerators {
    /// Exponent vectors, ordered by degree and then lexicographically from the largest.
    pub exponents: Vec<Vec<u32>>,
    pub degree_bound: u32,
}

/// Least common multiple of the cyclic orders times the number of variables.
pub fn default_degree_bound(action: &ActionSpec) -> u32 {
    (action.group().exponent_lcm() as u32).max(1) * action.len() as u32
}

/// Human-readable monomial such as `x^3*y`.
pub fn monomial_name(action: &ActionSpec, exponents: &[u32]) -> String {
    let parts: Vec<String> = exponents
        .iter()
        .enumerate()
        .filter(|(_, e)| **e > 0)
        .map(|(v, e)| if *e == 1 { action.name(v).to_string() } else { format!("{}^{e}", action.name(v)) })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

fn monomials_up_to(vars: usize, degree: u32) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..vars {
        let mut next = Vec::new();
        for prefix in &out {
            let used: u32 = prefix.iter().sum();
            for e in 0..=degree - used {
                let mut m = prefix.clone();
                m.push(e);
                next.push(m);
            }
        }
        out = next;
    }
    out
}

fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

/// Minimal invariant monomials up to `degree_bound`. A minimal invariant of
/// degree `degree_bound + 1` proves the bound too small and is reported.
pub fn invariant_monomial_generators(action: &ActionSpec, degree_bound: u32) -> Result<InvariantGenerators> {
    let trivial = action.group().trivial();
    let invariants: Vec<Vec<u32>> = monomials_up_to(action.len(), degree_bound + 1)
        .into_iter()
        .filter(|m| m.iter().any(|e| *e > 0) && action.monomial_character(m) == trivial)
        .collect();
    let minimal: Vec<&Vec<u32>> =
        invariants.iter().filter(|m| !invariants.iter().any(|d| d != *m && divides(d, m))).collect();
    if let Some(m) = minimal.iter().find(|m| m.iter().sum::<u32>() > degree_bound) {
        return Err(Error::BoundTooSmall(format!(
            "{} is invariant of degree {} and not a product of invariants of degree at most {degree_bound}",
            monomial_name(action, m),
            degree_bound + 1
        )));
    }
    let mut exponents: Vec<Vec<u32>> = minimal.into_iter().cloned().collect();
    exponents.sort_by(|a, b| a.iter().sum::<u32>().cmp(&b.iter().sum::<u32>()).then_with(|| b.cmp(a)));
    Ok(InvariantGenerators { exponents, degree_bound })
}

/// Values of the invariant generators on `supp F^G`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientPoint {
    pub values: Vec<(Vec<u32>, Q)>,
}

impl QuotientPoint {
    pub fn value(&self, exponents: &[u32]) -> Option<&Q> {
        self.values.iter().find(|(e, _)| e == exponents).map(|(_, v)| v)
    }
}

/// Each generator acts on the invariant line of `m` by a scalar; returns those scalars.
pub fn hilbert_chow_point(m: &EquivariantModule, gens: &InvariantGenerators) -> Result<QuotientPoint> {
    let trivial = m.group().trivial();
    let n = m.dim(&trivial);
    if n != 1 {
        return Err(Error::Precondition(format!("the invariant component must be one-dimensional, found {n}")));
    }
    let mut values = Vec::new();
    for e in &gens.exponents {
        if e.len() != m.action().len() {
            return Err(Error::Shape("generator exponents do not match the variables".into()));
        }
        let a = m.monomial_action(e, &trivial);
        if a.rows() != 1 || a.cols() != 1 {
            return Err(Error::Internal(format!(
                "{} does not map the invariant line to itself",
                monomial_name(m.action(), e)
            )));
        }
        values.push((e.clone(), a.get(0, 0).clone()));
    }
    Ok(QuotientPoint { values })
}

/// Each generator evaluated at a point of `X`.
pub fn evaluate_generators(gens: &InvariantGenerators, point: &[Q]) -> QuotientPoint {
    let values = gens
        .exponents
        .iter()
        .map(|e| {
            let v = e.iter().zip(point).fold(Q::one(), |acc, (k, x)| acc * num::pow::pow(x.clone(), *k as usize));
            (e.clone(), v)
        })
        .collect();
    QuotientPoint { values }
}

/// A binomial identity `prod lhs = prod rhs` between generators (indices into
/// the generator list, with repetition).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct BinomialRelation {
    pub lhs: Vec<usize>,
    pub rhs: Vec<usize>,
}

fn multisets(n: usize, size: usize, start: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if prefix.len() == size {
        out.push(prefix.clone());
        return;
    }
    for i in start..n {
        prefix.push(i);
        multisets(n, size, i, prefix, out);
        prefix.pop();
    }
}

/// Relations among products of at most `max_factors` generators whose total
/// degree stays within twice the degree bound.
pub fn binomial_relations(gens: &InvariantGenerators, max_factors: usize) -> Vec<BinomialRelation> {
    let n = gens.exponents.len();
    let mut by_exponent: BTreeMap<Vec<u32>, Vec<Vec<usize>>> = BTreeMap::new();
    for size in 1..=max_factors {
        let mut all = Vec::new();
        multisets(n, size, 0, &mut Vec::new(), &mut all);
        for ms in all {
            let width = gens.exponents.first().map_or(0, Vec::len);
            let mut total = vec![0u32; width];
            for &i in &ms {
                for (t, e) in total.iter_mut().zip(&gens.exponents[i]) {
                    *t += e;
                }
            }
            if total.iter().sum::<u32>() <= 2 * gens.degree_bound {
                by_exponent.entry(total).or_default().push(ms);
            }
        }
    }
    let mut out = BTreeSet::new();
    for products in by_exponent.values() {
        for pair in products.windows(2) {
            out.insert(BinomialRelation { lhs: pair[0].clone(), rhs: pair[1].clone() });
        }
    }
    out.into_iter().collect()
}

/// Relations from `relations` that the point violates, with both sides.
pub fn violated_relations(point: &QuotientPoint, relations: &[BinomialRelation]) -> Vec<(BinomialRelation, Q, Q)> {
    let product = |idx: &[usize]| idx.iter().fold(Q::one(), |acc, &i| acc * &point.values[i].1);
    relations
        .iter()
        .filter_map(|r| {
            let (a, b) = (product(&r.lhs), product(&r.rhs));
            (a != b).then(|| (r.clone(), a, b))
        })
        .collect()
}

pub fn describe_point(action: &ActionSpec, point: &QuotientPoint) -> BTreeMap<String, String> {
    point.values.iter().map(|(e, v)| (monomial_name(action, e), format_rational(v))).collect()
}

/// Whether every value is zero (the point is the image of the origin).
pub fn is_origin(point: &QuotientPoint) -> bool {
    point.values.iter().all(|(_, v)| v.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equivariant::{free_orbit_module, monomial_module, random_nonzero_rational, trivial_module};
    use crate::group::{GroupSpec, IrrepLabel};
    use crate::rational::q;
    use proptest::prelude::*;
    use rand::SeedableRng;

    fn ch(x: i64) -> IrrepLabel {
        IrrepLabel::Character(vec![x])
    }

    fn action(orders: &[u32], rank: usize, weights: Vec<Vec<i64>>) -> ActionSpec {
        let g = GroupSpec::product(orders, rank).unwrap();
        let vars = weights
            .into_iter()
            .enumerate()
            .map(|(i, w)| (["x", "y", "z", "w"][i].to_string(), IrrepLabel::Character(w)))
            .collect();
        ActionSpec::new(g, vars).unwrap()
    }

    fn z3() -> ActionSpec {
        action(&[3], 0, vec![vec![2], vec![1]])
    }

    fn names(a: &ActionSpec, g: &InvariantGenerators) -> BTreeSet<String> {
        g.exponents.iter().map(|e| monomial_name(a, e)).collect()
    }

    fn set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn generator_examples() {
        let a = z3();
        assert_eq!(names(&a, &invariant_monomial_generators(&a, 3).unwrap()), set(&["x^3", "y^3", "x*y"]));
        let a = action(&[2], 0, vec![vec![1], vec![1]]);
        assert_eq!(names(&a, &invariant_monomial_generators(&a, 2).unwrap()), set(&["x^2", "x*y", "y^2"]));
        let a = action(&[], 1, vec![vec![1], vec![-1]]);
        assert_eq!(names(&a, &invariant_monomial_generators(&a, 2).unwrap()), set(&["x*y"]));
        assert!(matches!(invariant_monomial_generators(&z3(), 2), Err(Error::BoundTooSmall(_))));
        assert_eq!(default_degree_bound(&z3()), 6);
    }

    #[test]
    fn hilbert_chow_examples() {
        let a = z3();
        let gens = invariant_monomial_generators(&a, 3).unwrap();
        let free = free_orbit_module(&a, &[q(1), q(0)]).unwrap();
        let p = hilbert_chow_point(&free, &gens).unwrap();
        assert_eq!(p.value(&[3, 0]), Some(&q(1)));
        assert_eq!(p.value(&[0, 3]), Some(&q(0)));
        assert_eq!(p.value(&[1, 1]), Some(&q(0)));
        let s: BTreeSet<Vec<u32>> = [vec![0, 0], vec![1, 0], vec![2, 0]].into_iter().collect();
        let nil = monomial_module(&a, &s).unwrap();
        assert!(is_origin(&hilbert_chow_point(&nil, &gens).unwrap()));
        let two = trivial_module(&a, [(ch(0), 2)].into_iter().collect()).unwrap();
        assert!(matches!(hilbert_chow_point(&two, &gens), Err(Error::Precondition(_))));
    }

    #[test]
    fn relations_include_cube() {
        let a = z3();
        let gens = invariant_monomial_generators(&a, 3).unwrap();
        let rels = binomial_relations(&gens, 3);
        let idx = |e: &[u32]| gens.exponents.iter().position(|x| x == e).unwrap();
        let cube = BinomialRelation { lhs: vec![idx(&[1, 1]); 3], rhs: vec![idx(&[3, 0]), idx(&[0, 3])] };
        let flipped = BinomialRelation { lhs: cube.rhs.clone(), rhs: cube.lhs.clone() };
        assert!(rels.contains(&cube) || rels.contains(&flipped));
    }

    /// Hilbert basis by brute force: invariants in a box that are not sums of two non-zero invariants.
    fn oracle(a: &ActionSpec, bound: u32) -> BTreeSet<Vec<u32>> {
        let trivial = a.group().trivial();
        let inv: BTreeSet<Vec<u32>> = monomials_up_to(a.len(), bound)
            .into_iter()
            .filter(|m| m.iter().any(|e| *e > 0) && a.monomial_character(m) == trivial)
            .collect();
        inv.iter()
            .filter(|m| {
                !inv.iter().any(|p| {
                    let rest: Option<Vec<u32>> = m.iter().zip(p.iter()).map(|(x, y)| x.checked_sub(*y)).collect();
                    rest.is_some_and(|r| r != **m && inv.contains(&r))
                })
            })
            .cloned()
            .collect()
    }

    proptest! {
        #[test]
        fn generators_match_oracle(n in 2u32..6, w in proptest::collection::vec(0i64..6, 2..4)) {
            let weights: Vec<Vec<i64>> = w.iter().map(|x| vec![x % n as i64]).collect();
            let a = action(&[n], 0, weights);
            let bound = default_degree_bound(&a);
            let gens = invariant_monomial_generators(&a, bound).unwrap();
            let found: BTreeSet<Vec<u32>> = gens.exponents.iter().cloned().collect();
            prop_assert_eq!(found, oracle(&a, bound));
        }

        #[test]
        fn free_orbit_point_is_evaluation(seed in 0u64..50) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let a = action(&[2, 3], 0, vec![vec![1, 0], vec![0, 1], vec![1, 2]]);
            let gens = invariant_monomial_generators(&a, default_degree_bound(&a)).unwrap();
            let p: Vec<Q> = (0..3).map(|_| random_nonzero_rational(&mut rng, 5)).collect();
            let m = free_orbit_module(&a, &p).unwrap();
            let eta = hilbert_chow_point(&m, &gens).unwrap();
            prop_assert_eq!(&eta, &evaluate_generators(&gens, &p));
            prop_assert!(violated_relations(&eta, &binomial_relations(&gens, 2)).is_empty());
        }
    }
}
