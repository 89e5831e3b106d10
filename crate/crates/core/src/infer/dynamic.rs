use crate::syntax::{MatchArm, SurfaceType, Term, TermKind};

/// Gives every unannotated lambda parameter and `let`-bound term the type
/// `?`. Running it twice changes nothing further.
pub fn annotate_dynamic_by_default(t: &Term) -> Term {
    let kind = match &t.kind {
        TermKind::Var(_) | TermKind::Lit(_) => t.kind.clone(),
        TermKind::Lambda { param, param_ty, body } => TermKind::Lambda {
            param: param.clone(),
            param_ty: Some(param_ty.clone().unwrap_or(SurfaceType::Dyn)),
            body: Box::new(annotate_dynamic_by_default(body)),
        },
        TermKind::App(f, a) => TermKind::App(
            Box::new(annotate_dynamic_by_default(f)),
            Box::new(annotate_dynamic_by_default(a)),
        ),
        TermKind::Let { recursive, name, bound, body } => TermKind::Let {
            recursive: *recursive,
            name: name.clone(),
            bound: Box::new(dynamic_binding(bound)),
            body: Box::new(annotate_dynamic_by_default(body)),
        },
        TermKind::Annot(inner, ty) => TermKind::Annot(Box::new(annotate_dynamic_by_default(inner)), ty.clone()),
        TermKind::Record(fields) => TermKind::Record(
            fields
                .iter()
                .map(|(l, ft)| (l.clone(), annotate_dynamic_by_default(ft)))
                .collect(),
        ),
        TermKind::Project(inner, label) => TermKind::Project(Box::new(annotate_dynamic_by_default(inner)), label.clone()),
        TermKind::Variant(label, payload) => TermKind::Variant(label.clone(), Box::new(annotate_dynamic_by_default(payload))),
        TermKind::Match(scrutinee, arms) => TermKind::Match(
            Box::new(annotate_dynamic_by_default(scrutinee)),
            arms.iter()
                .map(|arm| MatchArm {
                    body: annotate_dynamic_by_default(&arm.body),
                    ..arm.clone()
                })
                .collect(),
        ),
    };
    Term::new(kind, t.span)
}

/// The bound term of a `let`, annotated with `?` unless it already carries
/// an annotation.
pub fn dynamic_binding(bound: &Term) -> Term {
    let inner = annotate_dynamic_by_default(bound);
    if matches!(inner.kind, TermKind::Annot(..)) {
        inner
    } else {
        let span = inner.span;
        Term::new(TermKind::Annot(Box::new(inner), SurfaceType::Dyn), span)
    }
}
