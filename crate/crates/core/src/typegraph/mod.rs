//! The mutable type graph.
//!
//! Types live in an arena of nodes linked into equivalence classes by a
//! union-find forest. Node identity is the arena index, so two `?` nodes are
//! "the same dynamic type" only if they are the same index. Every `?`
//! written in an annotation maps to one canonical dynamic node; unification
//! copies it before use (see [`TypeStore::copy_dyn`]).

mod copy;
mod intern;
mod kind;
mod resolve;

use std::collections::HashMap;
use std::fmt;

pub use intern::{bool_type, list_of, unit_type, AnnotationScope};
pub use kind::{kind_check, Kind, KindEnv, KindError};
pub use resolve::Resolver;

use crate::syntax::SurfaceType;

/// Index of a node in a [`TypeStore`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Built-in constructor names.
pub mod ctor {
    pub const ARROW: &str = "->";
    pub const RECORD: &str = "Pi";
    pub const VARIANT: &str = "Sigma";
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Var,
    Dyn { canonical: bool },
    Ctor { name: String, kind: Kind },
    App(NodeId, NodeId),
    RowField { label: String, ty: NodeId, tail: NodeId },
    EmptyRow,
    /// `binder` is only a naming hint: occurrences of the bound variable
    /// point straight back at the μ node, so `body` is already the unrolling.
    Mu { binder: NodeId, body: NodeId },
}

#[derive(Debug, Clone)]
struct Node {
    payload: Payload,
    parent: Option<NodeId>,
}

/// Arena of type nodes plus the union-find links between them.
#[derive(Debug, Clone)]
pub struct TypeStore {
    nodes: Vec<Node>,
    ctors: HashMap<String, NodeId>,
    canonical_dyn: NodeId,
    kinds: KindEnv,
}

impl Default for TypeStore {
    fn default() -> Self {
        Self::new()
    }
}

impl TypeStore {
    pub fn new() -> Self {
        let mut store = TypeStore {
            nodes: Vec::new(),
            ctors: HashMap::new(),
            canonical_dyn: NodeId(0),
            kinds: KindEnv::builtin(),
        };
        store.canonical_dyn = store.push(Payload::Dyn { canonical: true });
        store
    }

    pub fn kinds(&self) -> &KindEnv {
        &self.kinds
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn push(&mut self, payload: Payload) -> NodeId {
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(Node {
            payload,
            parent: None,
        });
        id
    }

    pub(crate) fn set_payload(&mut self, n: NodeId, payload: Payload) {
        self.nodes[n.index()].payload = payload;
    }

    /// The node's own payload, ignoring its class.
    pub fn payload(&self, n: NodeId) -> &Payload {
        &self.nodes[n.index()].payload
    }

    /// Payload of the class representative.
    pub fn view(&self, n: NodeId) -> &Payload {
        self.payload(self.find_imm(n))
    }

    pub fn canonical_dyn(&self) -> NodeId {
        self.canonical_dyn
    }

    pub fn is_canonical_dyn(&self, n: NodeId) -> bool {
        n == self.canonical_dyn
    }

    pub fn fresh_var(&mut self) -> NodeId {
        self.push(Payload::Var)
    }

    /// A fresh, non-canonical dynamic node.
    pub fn new_dyn(&mut self) -> NodeId {
        self.push(Payload::Dyn { canonical: false })
    }

    /// The shared node for a named constructor.
    pub fn ctor(&mut self, name: &str) -> NodeId {
        if let Some(&n) = self.ctors.get(name) {
            return n;
        }
        let kind = self.kinds.get(name).cloned().unwrap_or(Kind::Star);
        let n = self.push(Payload::Ctor {
            name: name.to_string(),
            kind,
        });
        self.ctors.insert(name.to_string(), n);
        n
    }

    pub fn app(&mut self, f: NodeId, a: NodeId) -> NodeId {
        self.push(Payload::App(f, a))
    }

    pub fn arrow(&mut self, dom: NodeId, cod: NodeId) -> NodeId {
        let c = self.ctor(ctor::ARROW);
        let partial = self.app(c, dom);
        self.app(partial, cod)
    }

    pub fn record(&mut self, row: NodeId) -> NodeId {
        let c = self.ctor(ctor::RECORD);
        self.app(c, row)
    }

    pub fn variant(&mut self, row: NodeId) -> NodeId {
        let c = self.ctor(ctor::VARIANT);
        self.app(c, row)
    }

    pub fn field(&mut self, label: &str, ty: NodeId, tail: NodeId) -> NodeId {
        self.push(Payload::RowField {
            label: label.to_string(),
            ty,
            tail,
        })
    }

    pub fn empty_row(&mut self) -> NodeId {
        self.push(Payload::EmptyRow)
    }

    pub fn row(&mut self, fields: &[(&str, NodeId)], tail: NodeId) -> NodeId {
        fields
            .iter()
            .rev()
            .fold(tail, |tail, (label, ty)| self.field(label, *ty, tail))
    }

    /// Allocates a μ node whose body is filled in later by `close_mu`.
    pub(crate) fn open_mu(&mut self) -> NodeId {
        let binder = self.fresh_var();
        self.push(Payload::Mu {
            binder,
            body: binder,
        })
    }

    pub(crate) fn close_mu(&mut self, mu: NodeId, body: NodeId) {
        if let Payload::Mu { binder, .. } = *self.payload(mu) {
            self.set_payload(mu, Payload::Mu { binder, body });
        }
    }

    /// Class representative, compressing the path behind it.
    pub fn find(&mut self, n: NodeId) -> NodeId {
        let root = self.find_imm(n);
        let mut cur = n;
        while let Some(p) = self.nodes[cur.index()].parent {
            self.nodes[cur.index()].parent = Some(root);
            cur = p;
        }
        root
    }

    /// Class representative without mutating the forest.
    pub fn find_imm(&self, mut n: NodeId) -> NodeId {
        while let Some(p) = self.nodes[n.index()].parent {
            n = p;
        }
        n
    }

    /// Unions the classes of `keep` and `absorb`; `keep`'s representative
    /// stays the representative.
    pub fn merge(&mut self, keep: NodeId, absorb: NodeId) {
        let keep = self.find(keep);
        let absorb = self.find(absorb);
        if keep != absorb {
            self.nodes[absorb.index()].parent = Some(keep);
        }
    }

    /// Direct children of a node, in payload order.
    pub fn children(&self, n: NodeId) -> Vec<NodeId> {
        match self.payload(n) {
            Payload::App(f, a) => vec![*f, *a],
            Payload::RowField { ty, tail, .. } => vec![*ty, *tail],
            Payload::Mu { body, .. } => vec![*body],
            _ => Vec::new(),
        }
    }

    /// `(domain, codomain)` if `n` is a function type.
    pub fn as_arrow(&self, n: NodeId) -> Option<(NodeId, NodeId)> {
        let Payload::App(partial, cod) = *self.view(n) else {
            return None;
        };
        let Payload::App(head, dom) = *self.view(partial) else {
            return None;
        };
        match self.view(head) {
            Payload::Ctor { name, .. } if name == ctor::ARROW => Some((dom, cod)),
            _ => None,
        }
    }

    pub fn is_var(&self, n: NodeId) -> bool {
        matches!(self.view(n), Payload::Var)
    }

    pub fn is_dyn(&self, n: NodeId) -> bool {
        matches!(self.view(n), Payload::Dyn { .. })
    }

    /// Representatives reachable from `root`, each listed once.
    pub fn reachable(&self, root: NodeId) -> Vec<NodeId> {
        let mut seen = std::collections::HashSet::new();
        let mut order = Vec::new();
        let mut stack = vec![self.find_imm(root)];
        while let Some(n) = stack.pop() {
            if !seen.insert(n) {
                continue;
            }
            order.push(n);
            for c in self.children(n) {
                stack.push(self.find_imm(c));
            }
        }
        order
    }

    /// Does `needle`'s class occur anywhere under `root`?
    pub fn occurs(&self, needle: NodeId, root: NodeId) -> bool {
        let needle = self.find_imm(needle);
        self.reachable(root).contains(&needle)
    }

    /// Builds the graph for a surface type. Type variables are scoped by
    /// `scope`; every `?` maps to the canonical dynamic node.
    pub fn intern(&mut self, ty: &SurfaceType, scope: &mut AnnotationScope) -> NodeId {
        intern::intern(self, ty, scope)
    }

    /// Interns a closed type with a throwaway variable scope.
    pub fn intern_closed(&mut self, ty: &SurfaceType) -> NodeId {
        self.intern(ty, &mut AnnotationScope::default())
    }

    /// Reads a class back as a surface type, introducing μ binders for cycles.
    pub fn resolve(&self, n: NodeId) -> SurfaceType {
        Resolver::new(self).resolve(n)
    }

    /// Short printable summary for diagnostics.
    pub fn summary(&self, n: NodeId) -> String {
        let text = crate::syntax::pretty_type(&self.resolve(n));
        if text.chars().count() > 120 {
            let cut: String = text.chars().take(117).collect();
            format!("{cut}...")
        } else {
            text
        }
    }
}

/// A rank-1 type scheme: quantified variables over a graph body.
#[derive(Debug, Clone, PartialEq)]
pub struct Scheme {
    pub quantified: Vec<NodeId>,
    pub body: NodeId,
}

impl Scheme {
    pub fn mono(body: NodeId) -> Self {
        Scheme {
            quantified: Vec::new(),
            body,
        }
    }
}
