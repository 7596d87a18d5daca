//! Seeded random generators shared by the integration tests.
#![allow(dead_code)]

use allen_metric::catalog::{algebra, AlgebraId};
use allen_metric::dlr::{Dlr, HornDlr, LinearOp, LinearPolynomial, LinearRelation, Var};
use allen_metric::instance::{IntervalId, MIsatInstance};
use allen_metric::point_algebra::PointConstraint;
use allen_metric::relation::PointRelation;
use allen_metric::Rational;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

const CONVEX_OPS: [LinearOp; 5] = [LinearOp::Lt, LinearOp::Le, LinearOp::Eq, LinearOp::Ge, LinearOp::Gt];

/// Up to `max_intervals` intervals, up to `max_edges` edges labelled
/// uniformly from `id`, and up to `max_h` point constraints between
/// mode-side endpoints.
pub fn point_instance(
    rng: &mut impl Rng,
    id: AlgebraId,
    max_intervals: usize,
    max_edges: usize,
    max_h: usize,
) -> MIsatInstance {
    let n = rng.random_range(1..=max_intervals);
    let mut inst = MIsatInstance::with_intervals(id.family(), n);
    let members = &algebra(id).members;
    for _ in 0..rng.random_range(0..=max_edges) {
        let (u, v) = endpoints_pair(rng, n);
        inst.relate(u, *members.choose(rng).expect("nonempty"), v);
    }
    let side = id.family().side();
    for _ in 0..rng.random_range(0..=max_h) {
        let (u, v) = endpoints_pair(rng, n);
        let op = *LinearOp::ALL.choose(rng).expect("nonempty");
        inst.constrain(LinearRelation::vars(u.endpoint(side), op, v.endpoint(side)));
    }
    inst
}

/// Two intervals, distinct when there are at least two.
fn endpoints_pair(rng: &mut impl Rng, n: usize) -> (IntervalId, IntervalId) {
    let u = rng.random_range(0..n);
    let mut v = rng.random_range(0..n);
    if n > 1 {
        while v == u {
            v = rng.random_range(0..n);
        }
    }
    (IntervalId(u as u32), IntervalId(v as u32))
}

/// `Σ cᵢ·xᵢ + k` over `vars` with small integer coefficients.
pub fn polynomial(rng: &mut impl Rng, vars: &[Var], max_terms: usize) -> LinearPolynomial {
    let mut p = LinearPolynomial::constant(q(rng.random_range(-5..=5)));
    for _ in 0..rng.random_range(1..=max_terms) {
        let v = *vars.choose(rng).expect("nonempty");
        p.add_term(q(rng.random_range(-3..=3)), v);
    }
    p
}

/// Mostly difference constraints `x - y op k`, sometimes a general
/// linear relation.
pub fn convex_relation(rng: &mut impl Rng, vars: &[Var]) -> LinearRelation {
    let op = *CONVEX_OPS.choose(rng).expect("nonempty");
    if rng.random_bool(0.6) {
        let x = *vars.choose(rng).expect("nonempty");
        let y = *vars.choose(rng).expect("nonempty");
        let lhs = LinearPolynomial::var(x).minus(&LinearPolynomial::var(y));
        LinearRelation::new(lhs, op, LinearPolynomial::constant(q(rng.random_range(-4..=4))))
    } else {
        LinearRelation::new(polynomial(rng, vars, 3), op, polynomial(rng, vars, 2))
    }
}

pub fn disequality(rng: &mut impl Rng, vars: &[Var]) -> LinearRelation {
    LinearRelation::new(polynomial(rng, vars, 2), LinearOp::Ne, polynomial(rng, vars, 1))
}

/// A Horn DLR: at most one convex disjunct and up to two disequalities.
pub fn horn_dlr(rng: &mut impl Rng, vars: &[Var]) -> HornDlr {
    let mut disjuncts = Vec::new();
    let with_convex = rng.random_bool(0.8);
    if with_convex {
        disjuncts.push(convex_relation(rng, vars));
    }
    let min_ne = usize::from(!with_convex);
    for _ in 0..rng.random_range(min_ne..=2) {
        disjuncts.push(disequality(rng, vars));
    }
    HornDlr::try_from(Dlr::new(disjuncts).expect("nonempty")).expect("Horn by construction")
}

pub fn free_vars(n: usize) -> Vec<Var> {
    (0..n as u32).map(Var::Free).collect()
}

pub fn point_system(rng: &mut impl Rng, vars: usize, max_constraints: usize) -> Vec<PointConstraint> {
    let count = rng.random_range(0..=max_constraints);
    (0..count)
        .map(|_| {
            let a = Var::Free(rng.random_range(0..vars as u32));
            let b = Var::Free(rng.random_range(0..vars as u32));
            PointConstraint::new(a, PointRelation::from_bits(rng.random_range(0..8)), b)
        })
        .collect()
}

/// A uniformly random rational in `(0, 1)` with a large denominator.
pub fn theta(rng: &mut impl Rng) -> Rational {
    let d: i64 = rng.random_range(2..=1 << 40);
    let n: i64 = rng.random_range(1..d);
    Rational::new(n.into(), d.into())
}
