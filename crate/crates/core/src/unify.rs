//! Consistent-equal unification over the type graph.
//!
//! `unify` solves one constraint `left ≃ right` eagerly. Before solving, each
//! side is passed through [`TypeStore::copy_dyn`] exactly once so that two
//! uses of the same annotation `?` never become equal to each other.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use crate::typegraph::{NodeId, Payload, TypeStore};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Constraint {
    pub left: NodeId,
    pub right: NodeId,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnifyError {
    #[error("inconsistent types: `{left}` and `{right}`")]
    ConstructorClash { left: String, right: String },
    #[error("inconsistent types: row `{row}` has no field `{label}`")]
    MissingRowField { label: String, row: String },
    #[error("inconsistent types: `{left}` is a row but `{right}` is not")]
    KindClash { left: String, right: String },
    #[error("inconsistent types: `{var}` occurs inside `{ty}`")]
    OccursViolation { var: String, ty: String },
}

/// Which rule handled a step of unification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    Case(u8),
    /// Both sides were already being unified further up; cut off.
    Visited,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceLine {
    pub step: Step,
    pub left: String,
    pub right: String,
}

impl fmt::Display for TraceLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.step {
            Step::Case(n) => write!(f, "CASE {n}: {} ≃ {}", self.left, self.right),
            Step::Visited => write!(f, "VISITED: {} ≃ {}", self.left, self.right),
        }
    }
}

/// Copies the canonical `?` out of each side of a fresh constraint.
pub fn maybe_copy_dyns(store: &mut TypeStore, c: Constraint) -> Constraint {
    Constraint {
        left: store.copy_dyn(c.left),
        right: store.copy_dyn(c.right),
    }
}

pub fn unify(store: &mut TypeStore, left: NodeId, right: NodeId) -> Result<(), UnifyError> {
    Unifier::new(store, false).run(left, right)
}

/// Like [`unify`], also returning one line per rule applied.
pub fn unify_traced(
    store: &mut TypeStore,
    left: NodeId,
    right: NodeId,
) -> (Result<(), UnifyError>, Vec<TraceLine>) {
    let mut u = Unifier::new(store, true);
    let result = u.run(left, right);
    (result, u.trace)
}

struct Unifier<'s> {
    store: &'s mut TypeStore,
    visited: HashSet<NodeId>,
    entered: HashSet<(NodeId, NodeId)>,
    tracing: bool,
    trace: Vec<TraceLine>,
}

impl<'s> Unifier<'s> {
    fn new(store: &'s mut TypeStore, tracing: bool) -> Self {
        Unifier {
            store,
            visited: HashSet::new(),
            entered: HashSet::new(),
            tracing,
            trace: Vec::new(),
        }
    }

    fn run(&mut self, left: NodeId, right: NodeId) -> Result<(), UnifyError> {
        let c = maybe_copy_dyns(self.store, Constraint { left, right });
        self.go(c.left, c.right)
    }

    fn note(&mut self, step: Step, l: NodeId, r: NodeId) {
        if self.tracing {
            self.trace.push(TraceLine {
                step,
                left: self.store.summary(l),
                right: self.store.summary(r),
            });
        }
    }

    fn go(&mut self, l: NodeId, r: NodeId) -> Result<(), UnifyError> {
        let l = self.store.find(l);
        let r = self.store.find(r);
        if l == r {
            return Ok(());
        }
        let both_visited = self.visited.contains(&l) && self.visited.contains(&r);
        // Pairs already under way are assumed to hold; this also bounds
        // cycles that `?` merges create outside any μ.
        if both_visited || !self.entered.insert((l, r)) {
            self.note(Step::Visited, l, r);
            return Ok(());
        }
        let pl = self.store.payload(l).clone();
        let pr = self.store.payload(r).clone();
        match (&pl, &pr) {
            (Payload::Var, _) => {
                self.note(Step::Case(1), l, r);
                self.bind(l, r)
            }
            (_, Payload::Var) => {
                self.note(Step::Case(2), l, r);
                self.bind(r, l)
            }
            (Payload::Dyn { .. }, _) if self.store.as_arrow(r).is_some() => {
                self.note(Step::Case(3), l, r);
                self.split_arrow(r)
            }
            (_, Payload::Dyn { .. }) if self.store.as_arrow(l).is_some() => {
                self.note(Step::Case(4), l, r);
                self.split_arrow(l)
            }
            (Payload::Dyn { .. }, _) => {
                self.note(Step::Case(5), l, r);
                self.store.merge(r, l);
                Ok(())
            }
            (_, Payload::Dyn { .. }) => {
                self.note(Step::Case(6), l, r);
                self.store.merge(l, r);
                Ok(())
            }
            _ if self.store.as_arrow(l).is_some() && self.store.as_arrow(r).is_some() => {
                self.note(Step::Case(7), l, r);
                let (d1, c1) = self.store.as_arrow(l).unwrap();
                let (d2, c2) = self.store.as_arrow(r).unwrap();
                self.go(d1, d2)?;
                self.go(c1, c2)
            }
            (
                Payload::RowField { label: l1, ty: t1, tail: tail1 },
                Payload::RowField { label: l2, ty: t2, tail: tail2 },
            ) => {
                if l1 == l2 {
                    self.note(Step::Case(8), l, r);
                    self.go(*t1, *t2)?;
                    self.go(*tail1, *tail2)
                } else {
                    self.note(Step::Case(9), l, r);
                    self.rewrite_rows(l, r, (l1, *t1, *tail1), (l2, *t2, *tail2))
                }
            }
            (Payload::Mu { body, .. }, _) => {
                self.note(Step::Case(10), l, r);
                self.visited.insert(l);
                self.go(*body, r)
            }
            (_, Payload::Mu { body, .. }) => {
                self.note(Step::Case(11), l, r);
                self.visited.insert(r);
                self.go(l, *body)
            }
            (Payload::EmptyRow, Payload::EmptyRow) => {
                self.note(Step::Case(12), l, r);
                Ok(())
            }
            (Payload::App(..), Payload::App(..)) => self.applications(l, r),
            (Payload::RowField { label, .. }, Payload::EmptyRow) => Err(self.missing(label, r)),
            (Payload::EmptyRow, Payload::RowField { label, .. }) => Err(self.missing(label, l)),
            _ if is_row(&pl) != is_row(&pr) => {
                let (row, other) = if is_row(&pl) { (l, r) } else { (r, l) };
                Err(UnifyError::KindClash {
                    left: self.store.summary(row),
                    right: self.store.summary(other),
                })
            }
            _ => Err(self.clash(l, r)),
        }
    }

    /// Cases 1 and 2: the variable joins `other`'s class.
    fn bind(&mut self, var: NodeId, other: NodeId) -> Result<(), UnifyError> {
        if self.store.occurs(var, other) {
            return Err(UnifyError::OccursViolation {
                var: self.store.summary(var),
                ty: self.store.summary(other),
            });
        }
        self.store.merge(other, var);
        Ok(())
    }

    /// Cases 3 and 4: `? ≃ a -> b` is solved as `? -> ? ≃ a -> b`.
    fn split_arrow(&mut self, arrow: NodeId) -> Result<(), UnifyError> {
        let (dom, cod) = self.store.as_arrow(arrow).unwrap();
        let d1 = self.store.new_dyn();
        self.go(dom, d1)?;
        let d2 = self.store.new_dyn();
        self.go(cod, d2)
    }

    /// Case 9: move each head label into the other row through a shared
    /// fresh tail.
    fn rewrite_rows(
        &mut self,
        l: NodeId,
        r: NodeId,
        (l1, t1, tail1): (&str, NodeId, NodeId),
        (l2, t2, tail2): (&str, NodeId, NodeId),
    ) -> Result<(), UnifyError> {
        let tail1_rep = self.store.find(tail1);
        if tail1_rep == self.store.find(tail2) && self.store.is_var(tail1_rep) {
            return Err(UnifyError::OccursViolation {
                var: self.store.summary(tail1_rep),
                ty: format!("{} and {}", self.store.summary(l), self.store.summary(r)),
            });
        }
        let alpha = self.store.fresh_var();
        let moved_left = self.store.field(l1, t1, alpha);
        self.go(moved_left, tail2)?;
        let moved_right = self.store.field(l2, t2, alpha);
        self.go(moved_right, tail1)
    }

    /// Constructor applications other than arrows decompose argument-wise.
    fn applications(&mut self, l: NodeId, r: NodeId) -> Result<(), UnifyError> {
        let (h1, args1) = self.spine(l);
        let (h2, args2) = self.spine(r);
        if self.store.find(h1) != self.store.find(h2) || args1.len() != args2.len() {
            return Err(self.clash(l, r));
        }
        for (a, b) in args1.into_iter().zip(args2) {
            self.go(a, b)?;
        }
        Ok(())
    }

    fn spine(&self, n: NodeId) -> (NodeId, Vec<NodeId>) {
        let mut args = Vec::new();
        let mut head = self.store.find_imm(n);
        while let Payload::App(f, a) = *self.store.payload(head) {
            args.push(a);
            head = self.store.find_imm(f);
        }
        args.reverse();
        (head, args)
    }

    fn clash(&self, l: NodeId, r: NodeId) -> UnifyError {
        UnifyError::ConstructorClash {
            left: self.store.summary(l),
            right: self.store.summary(r),
        }
    }

    fn missing(&self, label: &str, row: NodeId) -> UnifyError {
        UnifyError::MissingRowField {
            label: label.to_string(),
            row: self.store.summary(row),
        }
    }
}

fn is_row(p: &Payload) -> bool {
    matches!(p, Payload::RowField { .. } | Payload::EmptyRow)
}
