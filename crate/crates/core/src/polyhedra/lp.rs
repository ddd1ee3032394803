//! Exact linear feasibility by Gaussian substitution of equalities followed
//! by Fourier-Motzkin elimination of inequalities.
//!
//! Strict rows are carried natively: a combination of two bounds is strict
//! whenever either input is. Witnesses are rebuilt by back-substitution
//! through the stored elimination stages, so a feasible answer always comes
//! with a point that satisfies every row exactly.

use std::collections::HashMap;

use num_traits::{One, Signed, Zero};

use crate::linalg::{dot, Rational, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    /// `a·x = b`
    Eq,
    /// `a·x ≤ b`
    Le,
    /// `a·x < b`
    Lt,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vector,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn is_satisfied_by(&self, x: &[Rational]) -> bool {
        let lhs = dot(&self.coeffs, x);
        match self.relation {
            Relation::Eq => lhs == self.rhs,
            Relation::Le => lhs <= self.rhs,
            Relation::Lt => lhs < self.rhs,
        }
    }
}

/// A conjunction of linear rows over a fixed number of unknowns.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LinearSystem {
    num_vars: usize,
    constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(Vector),
    Infeasible,
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }

    pub fn witness(self) -> Option<Vector> {
        match self {
            Feasibility::Feasible(w) => Some(w),
            Feasibility::Infeasible => None,
        }
    }
}

impl LinearSystem {
    pub fn new(num_vars: usize) -> Self {
        LinearSystem {
            num_vars,
            constraints: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Appends a row. Panics if the coefficient count differs from the
    /// system's arity.
    pub fn push(&mut self, coeffs: Vector, relation: Relation, rhs: Rational) -> &mut Self {
        assert_eq!(coeffs.len(), self.num_vars, "row arity mismatch");
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
        self
    }

    pub fn add_eq(&mut self, coeffs: Vector, rhs: Rational) -> &mut Self {
        self.push(coeffs, Relation::Eq, rhs)
    }

    pub fn add_le(&mut self, coeffs: Vector, rhs: Rational) -> &mut Self {
        self.push(coeffs, Relation::Le, rhs)
    }

    pub fn add_lt(&mut self, coeffs: Vector, rhs: Rational) -> &mut Self {
        self.push(coeffs, Relation::Lt, rhs)
    }

    /// `a·x ≥ b`, stored as `-a·x ≤ -b`.
    pub fn add_ge(&mut self, coeffs: Vector, rhs: Rational) -> &mut Self {
        self.push(coeffs.into_iter().map(|c| -c).collect(), Relation::Le, -rhs)
    }

    /// `a·x > b`, stored as `-a·x < -b`.
    pub fn add_gt(&mut self, coeffs: Vector, rhs: Rational) -> &mut Self {
        self.push(coeffs.into_iter().map(|c| -c).collect(), Relation::Lt, -rhs)
    }

    /// `x_i ≥ 0`.
    pub fn nonneg(&mut self, var: usize) -> &mut Self {
        let mut row = vec![Rational::zero(); self.num_vars];
        row[var] = -Rational::one();
        self.push(row, Relation::Le, Rational::zero())
    }

    pub fn set_relation(&mut self, row: usize, relation: Relation) {
        self.constraints[row].relation = relation;
    }

    pub fn is_satisfied_by(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars && self.constraints.iter().all(|c| c.is_satisfied_by(x))
    }

    pub fn solve(&self) -> Feasibility {
        lp_feasible(self)
    }
}

/// `coeffs·x (≤ | <) rhs`
#[derive(Debug, Clone)]
struct Ineq {
    coeffs: Vector,
    strict: bool,
    rhs: Rational,
}

impl Ineq {
    /// Trivial rows have no variables left; returns whether such a row holds.
    fn trivially_holds(&self) -> Option<bool> {
        if self.coeffs.iter().all(Zero::is_zero) {
            let zero = Rational::zero();
            Some(if self.strict {
                zero < self.rhs
            } else {
                zero <= self.rhs
            })
        } else {
            None
        }
    }

    /// Scales so that the first nonzero coefficient has absolute value one.
    fn normalize(mut self) -> Self {
        if let Some(lead) = self.coeffs.iter().find(|c| !c.is_zero()).map(|c| c.abs()) {
            if !lead.is_one() {
                for c in &mut self.coeffs {
                    *c /= &lead;
                }
                self.rhs /= &lead;
            }
        }
        self
    }
}

/// Keeps only the tightest row per coefficient vector. Returns `None` when a
/// trivial row is violated.
fn reduce(rows: Vec<Ineq>) -> Option<Vec<Ineq>> {
    let mut best: HashMap<Vector, (Rational, bool)> = HashMap::new();
    let mut order: Vec<Vector> = Vec::new();
    for row in rows {
        match row.trivially_holds() {
            Some(true) => continue,
            Some(false) => return None,
            None => {}
        }
        let row = row.normalize();
        match best.get_mut(&row.coeffs) {
            Some((rhs, strict)) => {
                if row.rhs < *rhs || (row.rhs == *rhs && row.strict) {
                    *rhs = row.rhs;
                    *strict = row.strict;
                }
            }
            None => {
                order.push(row.coeffs.clone());
                best.insert(row.coeffs, (row.rhs, row.strict));
            }
        }
    }
    Some(
        order
            .into_iter()
            .map(|coeffs| {
                let (rhs, strict) = best.remove(&coeffs).expect("row recorded");
                Ineq {
                    coeffs,
                    strict,
                    rhs,
                }
            })
            .collect(),
    )
}

/// A recorded substitution `x_var = constant + Σ coeffs_k x_k`.
struct Substitution {
    var: usize,
    coeffs: Vector,
    constant: Rational,
}

/// Decides feasibility exactly and returns a witness when feasible.
pub fn lp_feasible(sys: &LinearSystem) -> Feasibility {
    let m = sys.num_vars;
    let mut eqs: Vec<(Vector, Rational)> = Vec::new();
    let mut ineqs: Vec<Ineq> = Vec::new();
    for c in &sys.constraints {
        match c.relation {
            Relation::Eq => eqs.push((c.coeffs.clone(), c.rhs.clone())),
            Relation::Le | Relation::Lt => ineqs.push(Ineq {
                coeffs: c.coeffs.clone(),
                strict: c.relation == Relation::Lt,
                rhs: c.rhs.clone(),
            }),
        }
    }

    // Gaussian substitution of the equalities.
    let mut subs: Vec<Substitution> = Vec::new();
    let mut eq_idx = 0;
    while eq_idx < eqs.len() {
        let (coeffs, rhs) = eqs[eq_idx].clone();
        eq_idx += 1;
        let Some(j) = coeffs.iter().position(|c| !c.is_zero()) else {
            if !rhs.is_zero() {
                return Feasibility::Infeasible;
            }
            continue;
        };
        let pivot = coeffs[j].clone();
        let expr: Vector = coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| if k == j { Rational::zero() } else { -c / &pivot })
            .collect();
        let constant = &rhs / &pivot;
        let apply = |row: &mut Vector, row_rhs: &mut Rational| {
            let cj = std::mem::take(&mut row[j]);
            if cj.is_zero() {
                return;
            }
            for (k, e) in expr.iter().enumerate() {
                if !e.is_zero() {
                    row[k] += &cj * e;
                }
            }
            *row_rhs -= &cj * &constant;
        };
        for (row, row_rhs) in eqs.iter_mut().skip(eq_idx) {
            apply(row, row_rhs);
        }
        for ineq in &mut ineqs {
            apply(&mut ineq.coeffs, &mut ineq.rhs);
        }
        subs.push(Substitution {
            var: j,
            coeffs: expr,
            constant,
        });
    }

    let Some(mut current) = reduce(ineqs) else {
        return Feasibility::Infeasible;
    };

    // Fourier-Motzkin elimination, keeping each stage for back-substitution.
    let mut stages: Vec<(usize, Vec<Ineq>)> = Vec::new();
    loop {
        let live: Vec<usize> = (0..m)
            .filter(|&j| current.iter().any(|r| !r.coeffs[j].is_zero()))
            .collect();
        let Some(&j) = live.iter().min_by_key(|&&j| {
            let pos = current.iter().filter(|r| r.coeffs[j].is_positive()).count();
            let neg = current.iter().filter(|r| r.coeffs[j].is_negative()).count();
            (pos * neg) as isize - (pos + neg) as isize
        }) else {
            break;
        };
        let (mut upper, mut lower, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for r in &current {
            if r.coeffs[j].is_positive() {
                upper.push(r);
            } else if r.coeffs[j].is_negative() {
                lower.push(r);
            } else {
                rest.push(r.clone());
            }
        }
        for u in &upper {
            for l in &lower {
                let cu = &u.coeffs[j];
                let cl = -&l.coeffs[j];
                let coeffs: Vector = u
                    .coeffs
                    .iter()
                    .zip(&l.coeffs)
                    .map(|(a, b)| a * &cl + b * cu)
                    .collect();
                rest.push(Ineq {
                    coeffs,
                    strict: u.strict || l.strict,
                    rhs: &u.rhs * &cl + &l.rhs * cu,
                });
            }
        }
        let next = reduce(rest);
        stages.push((j, std::mem::take(&mut current)));
        match next {
            Some(n) => current = n,
            None => return Feasibility::Infeasible,
        }
    }

    let mut x = vec![Rational::zero(); m];
    for (j, rows) in stages.iter().rev() {
        x[*j] = pick_value(*j, rows, &x);
    }
    for s in subs.iter().rev() {
        x[s.var] = &s.constant + dot(&s.coeffs, &x);
    }
    debug_assert!(sys.is_satisfied_by(&x), "witness check failed");
    Feasibility::Feasible(x)
}

/// Chooses a value for `x_j` satisfying every row of `rows` given the values
/// already fixed in `x` (the entry at `j` itself is ignored).
fn pick_value(j: usize, rows: &[Ineq], x: &[Rational]) -> Rational {
    let mut lower: Option<(Rational, bool)> = None;
    let mut upper: Option<(Rational, bool)> = None;
    for r in rows {
        let c = &r.coeffs[j];
        if c.is_zero() {
            continue;
        }
        let rest: Rational = r
            .coeffs
            .iter()
            .zip(x)
            .enumerate()
            .filter(|(k, _)| *k != j)
            .fold(Rational::zero(), |acc, (_, (a, v))| acc + a * v);
        let bound = (&r.rhs - rest) / c;
        if c.is_positive() {
            let tighter = match &upper {
                None => true,
                Some((u, s)) => bound < *u || (bound == *u && r.strict && !s),
            };
            if tighter {
                upper = Some((bound, r.strict));
            }
        } else {
            let tighter = match &lower {
                None => true,
                Some((l, s)) => bound > *l || (bound == *l && r.strict && !s),
            };
            if tighter {
                lower = Some((bound, r.strict));
            }
        }
    }
    let ok = |v: &Rational| {
        lower
            .as_ref()
            .is_none_or(|(l, s)| if *s { v > l } else { v >= l })
            && upper
                .as_ref()
                .is_none_or(|(u, s)| if *s { v < u } else { v <= u })
    };
    let zero = Rational::zero();
    if ok(&zero) {
        return zero;
    }
    let above_lower = lower.as_ref().map(|(l, s)| {
        if *s {
            l.floor() + Rational::one()
        } else {
            l.ceil()
        }
    });
    let below_upper = upper.as_ref().map(|(u, s)| {
        if *s {
            u.ceil() - Rational::one()
        } else {
            u.floor()
        }
    });
    for cand in above_lower.iter().chain(below_upper.iter()) {
        if ok(cand) {
            return cand.clone();
        }
    }
    match (lower, upper) {
        (Some((l, _)), Some((u, _))) => (l + u) / Rational::from_integer(2.into()),
        _ => unreachable!("one-sided bounds always admit an integer"),
    }
}
