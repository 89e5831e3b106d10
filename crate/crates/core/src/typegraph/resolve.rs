use std::collections::{HashMap, HashSet};

use super::{ctor, NodeId, Payload, TypeStore};
use crate::syntax::SurfaceType;

/// Reads graph nodes back as surface types. Names handed out to type
/// variables are stable across calls on the same resolver.
pub struct Resolver<'s> {
    store: &'s TypeStore,
    names: HashMap<NodeId, String>,
    next: usize,
    stack: Vec<NodeId>,
    recursive: HashSet<NodeId>,
}

impl<'s> Resolver<'s> {
    pub fn new(store: &'s TypeStore) -> Self {
        Resolver {
            store,
            names: HashMap::new(),
            next: 0,
            stack: Vec::new(),
            recursive: HashSet::new(),
        }
    }

    pub fn resolve(&mut self, n: NodeId) -> SurfaceType {
        self.go(n)
    }

    fn name(&mut self, n: NodeId) -> String {
        if let Some(name) = self.names.get(&n) {
            return name.clone();
        }
        let i = self.next;
        self.next += 1;
        let letter = (b'a' + (i % 26) as u8) as char;
        let name = if i < 26 {
            letter.to_string()
        } else {
            format!("{letter}{}", i / 26)
        };
        self.names.insert(n, name.clone());
        name
    }

    fn go(&mut self, n: NodeId) -> SurfaceType {
        let r = self.store.find_imm(n);
        if self.stack.contains(&r) {
            self.recursive.insert(r);
            return SurfaceType::Var(self.name(r));
        }
        self.stack.push(r);
        let ty = match self.store.payload(r).clone() {
            Payload::Var => SurfaceType::Var(self.name(r)),
            Payload::Dyn { .. } => SurfaceType::Dyn,
            Payload::EmptyRow => SurfaceType::EmptyRow,
            Payload::Ctor { name, .. } => SurfaceType::Con(name, Vec::new()),
            Payload::RowField { label, ty, tail } => SurfaceType::RowField {
                label,
                ty: Box::new(self.go(ty)),
                tail: Box::new(self.go(tail)),
            },
            Payload::Mu { body, .. } => self.go(body),
            Payload::App(..) => self.app(r),
        };
        self.stack.pop();
        if self.recursive.remove(&r) {
            let name = self.name(r);
            SurfaceType::Mu(name, Box::new(ty))
        } else {
            ty
        }
    }

    fn app(&mut self, r: NodeId) -> SurfaceType {
        let mut args = Vec::new();
        let mut head = r;
        while let Payload::App(f, a) = *self.store.view(head) {
            args.push(a);
            head = self.store.find_imm(f);
        }
        args.reverse();
        let head_name = match self.store.payload(head) {
            Payload::Ctor { name, .. } => Some(name.clone()),
            _ => None,
        };
        let mut args: Vec<SurfaceType> = args.into_iter().map(|a| self.go(a)).collect();
        match (head_name.as_deref(), args.len()) {
            (Some(ctor::ARROW), 2) => {
                let cod = args.pop().unwrap();
                let dom = args.pop().unwrap();
                SurfaceType::arrow(dom, cod)
            }
            (Some(ctor::RECORD), 1) => SurfaceType::Record(Box::new(args.pop().unwrap())),
            (Some(ctor::VARIANT), 1) => SurfaceType::Variant(Box::new(args.pop().unwrap())),
            (Some(name), _) => SurfaceType::Con(name.to_string(), args),
            // Heads are always constructors in well-kinded graphs.
            (None, _) => match self.go(head) {
                SurfaceType::Con(name, mut front) => {
                    front.extend(args);
                    SurfaceType::Con(name, front)
                }
                other => other,
            },
        }
    }
}
