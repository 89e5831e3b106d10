use std::collections::{HashMap, HashSet};

use super::{NodeId, Payload, TypeStore};

impl TypeStore {
    /// Copies the graph under `root`, replacing every occurrence of the
    /// canonical `?` with its own fresh dynamic node. Subgraphs that cannot
    /// reach the canonical `?` are shared rather than copied, and cycles are
    /// preserved.
    pub fn copy_dyn(&mut self, root: NodeId) -> NodeId {
        let canonical = self.canonical_dyn();
        self.rebuild(root, &|r| r == canonical, &mut |store, _| store.new_dyn())
    }

    /// Rebuilds the part of the graph under `root` from which a target
    /// representative is reachable. Each target occurrence is replaced by
    /// `replace`; everything else that reaches a target is copied once.
    pub(crate) fn rebuild(
        &mut self,
        root: NodeId,
        is_target: &dyn Fn(NodeId) -> bool,
        replace: &mut dyn FnMut(&mut TypeStore, NodeId) -> NodeId,
    ) -> NodeId {
        let tainted = self.tainted(root, is_target);
        if tainted.is_empty() {
            return root;
        }
        let mut memo = HashMap::new();
        self.rebuild_node(root, &tainted, is_target, replace, &mut memo)
    }

    /// Representatives under `root` that can reach a target.
    fn tainted(&self, root: NodeId, is_target: &dyn Fn(NodeId) -> bool) -> HashSet<NodeId> {
        let nodes = self.reachable(root);
        let mut parents: HashMap<NodeId, Vec<NodeId>> = HashMap::new();
        for &n in &nodes {
            for c in self.children(n) {
                parents.entry(self.find_imm(c)).or_default().push(n);
            }
        }
        let mut tainted = HashSet::new();
        let mut work: Vec<NodeId> = nodes.iter().copied().filter(|&n| is_target(n)).collect();
        while let Some(n) = work.pop() {
            if tainted.insert(n) {
                work.extend(parents.get(&n).into_iter().flatten().copied());
            }
        }
        tainted
    }

    fn rebuild_node(
        &mut self,
        n: NodeId,
        tainted: &HashSet<NodeId>,
        is_target: &dyn Fn(NodeId) -> bool,
        replace: &mut dyn FnMut(&mut TypeStore, NodeId) -> NodeId,
        memo: &mut HashMap<NodeId, NodeId>,
    ) -> NodeId {
        let r = self.find(n);
        if is_target(r) {
            return replace(self, r);
        }
        if !tainted.contains(&r) {
            return r;
        }
        if let Some(&copy) = memo.get(&r) {
            return copy;
        }
        let payload = self.payload(r).clone();
        // Allocate first so cycles back to `r` land on the copy.
        let copy = self.push(payload.clone());
        memo.insert(r, copy);
        let mut go = |store: &mut TypeStore, c| store.rebuild_node(c, tainted, is_target, replace, memo);
        let rebuilt = match payload {
            Payload::App(f, a) => {
                let f = go(self, f);
                let a = go(self, a);
                Payload::App(f, a)
            }
            Payload::RowField { label, ty, tail } => {
                let ty = go(self, ty);
                let tail = go(self, tail);
                Payload::RowField { label, ty, tail }
            }
            Payload::Mu { binder, body } => {
                let body = go(self, body);
                Payload::Mu { binder, body }
            }
            leaf => leaf,
        };
        self.set_payload(copy, rebuilt);
        copy
    }
}
