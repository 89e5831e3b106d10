use std::collections::HashMap;

use super::{NodeId, TypeStore};
use crate::syntax::SurfaceType;

/// Type variables named inside one annotation.
#[derive(Debug, Clone, Default)]
pub struct AnnotationScope {
    vars: HashMap<String, NodeId>,
    mu: Vec<(String, NodeId)>,
}

impl AnnotationScope {
    pub fn get(&self, name: &str) -> Option<NodeId> {
        self.vars.get(name).copied()
    }
}

pub(super) fn intern(store: &mut TypeStore, ty: &SurfaceType, scope: &mut AnnotationScope) -> NodeId {
    match ty {
        SurfaceType::Var(v) => {
            if let Some((_, mu)) = scope.mu.iter().rev().find(|(name, _)| name == v) {
                return *mu;
            }
            if let Some(&n) = scope.vars.get(v) {
                return n;
            }
            let n = store.fresh_var();
            scope.vars.insert(v.clone(), n);
            n
        }
        SurfaceType::Dyn => store.canonical_dyn(),
        SurfaceType::EmptyRow => store.empty_row(),
        SurfaceType::Con(name, args) => match (name.as_str(), args.as_slice()) {
            ("List", [elem]) => {
                let elem = intern(store, elem, scope);
                list_of(store, elem)
            }
            ("Bool", []) => bool_type(store),
            ("Unit", []) => unit_type(store),
            _ => {
                let head = store.ctor(name);
                args.iter().fold(head, |f, a| {
                    let a = intern(store, a, scope);
                    store.app(f, a)
                })
            }
        },
        SurfaceType::Arrow(a, b) => {
            let a = intern(store, a, scope);
            let b = intern(store, b, scope);
            store.arrow(a, b)
        }
        SurfaceType::Record(row) => {
            let row = intern(store, row, scope);
            store.record(row)
        }
        SurfaceType::Variant(row) => {
            let row = intern(store, row, scope);
            store.variant(row)
        }
        SurfaceType::RowField { label, ty, tail } => {
            let ty = intern(store, ty, scope);
            let tail = intern(store, tail, scope);
            store.field(label, ty, tail)
        }
        SurfaceType::Mu(v, body) => {
            let mu = store.open_mu();
            scope.mu.push((v.clone(), mu));
            let body = intern(store, body, scope);
            scope.mu.pop();
            store.close_mu(mu, body);
            mu
        }
    }
}

pub fn unit_type(store: &mut TypeStore) -> NodeId {
    let eps = store.empty_row();
    store.record(eps)
}

/// `[False; True]`.
pub fn bool_type(store: &mut TypeStore) -> NodeId {
    let f = unit_type(store);
    let t = unit_type(store);
    let eps = store.empty_row();
    let row = store.row(&[("False", f), ("True", t)], eps);
    store.variant(row)
}

/// `mu a. [Nil : {}; Cons : {head : elem; tail : a}]`.
pub fn list_of(store: &mut TypeStore, elem: NodeId) -> NodeId {
    let mu = store.open_mu();
    let nil = unit_type(store);
    let eps = store.empty_row();
    let cell_row = store.row(&[("head", elem), ("tail", mu)], eps);
    let cons = store.record(cell_row);
    let eps = store.empty_row();
    let row = store.row(&[("Nil", nil), ("Cons", cons)], eps);
    let body = store.variant(row);
    store.close_mu(mu, body);
    mu
}
