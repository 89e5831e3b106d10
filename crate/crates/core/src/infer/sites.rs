use std::collections::HashMap;

use crate::syntax::{Span, SurfaceType};
use crate::typegraph::{NodeId, Resolver, TypeStore};

/// Where a value meets a type it was not built with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SiteKind {
    /// The function position of an application.
    AppFn,
    /// The argument position of an application.
    AppArg,
    Annot,
    /// The record being projected from.
    Project,
    /// The scrutinee of a match.
    Match,
    /// The body of a match arm, flowing into the match's result.
    ArmResult,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Site {
    pub kind: SiteKind,
    /// Span of the term that owns the site.
    pub span: Span,
    /// Span blamed when the check fails.
    pub blame: Span,
    pub from: NodeId,
    /// For `AppArg`, the function's type; the check targets its domain.
    pub to: NodeId,
}

/// A runtime check the evaluator must perform.
#[derive(Debug, Clone, PartialEq)]
pub struct Obligation {
    pub kind: SiteKind,
    pub span: Span,
    pub blame: Span,
    pub from: SurfaceType,
    pub to: SurfaceType,
}

/// Obligations of one compilation unit, keyed by site.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Obligations {
    map: HashMap<(SiteKind, Span), Obligation>,
}

impl Obligations {
    pub fn get(&self, kind: SiteKind, span: Span) -> Option<&Obligation> {
        self.map.get(&(kind, span))
    }

    pub fn iter(&self) -> impl Iterator<Item = &Obligation> {
        self.map.values()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn extend(&mut self, other: Obligations) {
        self.map.extend(other.map);
    }
}

/// Keeps the sites whose final types differ and mention `?`.
pub(super) fn obligations(store: &TypeStore, sites: &[Site]) -> Obligations {
    let mut resolver = Resolver::new(store);
    let mut map = HashMap::new();
    for site in sites {
        let from = resolver.resolve(site.from);
        let to = match (site.kind, resolver.resolve(site.to)) {
            (SiteKind::AppArg, SurfaceType::Arrow(dom, _)) => *dom,
            (SiteKind::AppArg, SurfaceType::Dyn) => SurfaceType::Dyn,
            (SiteKind::AppArg, _) => continue,
            (_, to) => to,
        };
        if from == to || !(from.has_dyn() || to.has_dyn()) {
            continue;
        }
        // An annotation that only adds `?` can fail solely inside a wrapped
        // function, which is the annotated term itself.
        let blame = if site.kind == SiteKind::Annot && !from.has_dyn() {
            site.span
        } else {
            site.blame
        };
        map.insert(
            (site.kind, site.span),
            Obligation {
                kind: site.kind,
                span: site.span,
                blame,
                from,
                to,
            },
        );
    }
    Obligations { map }
}
