//! Lexical scope chain. Name resolution walks innermost-first; assignment
//! writes the innermost scope unless the name was declared `global`, in
//! which case it goes to the chain root (the module scope).

use std::cell::RefCell;
use std::collections::{HashMap, HashSet};
use std::rc::Rc;

use crate::interp::value::Value;

#[derive(Clone)]
pub struct Scope {
    data: Rc<ScopeData>,
}

struct ScopeData {
    vars: RefCell<HashMap<Rc<str>, Value>>,
    parent: Option<Scope>,
}

impl Scope {
    pub fn root() -> Self {
        Self {
            data: Rc::new(ScopeData {
                vars: RefCell::new(HashMap::new()),
                parent: None,
            }),
        }
    }

    pub fn child(&self) -> Self {
        Self {
            data: Rc::new(ScopeData {
                vars: RefCell::new(HashMap::new()),
                parent: Some(self.clone()),
            }),
        }
    }

    pub fn lookup(&self, name: &str) -> Option<Value> {
        let mut scope = Some(self);
        while let Some(s) = scope {
            if let Some(v) = s.data.vars.borrow().get(name) {
                return Some(v.clone());
            }
            scope = s.data.parent.as_ref();
        }
        None
    }

    pub fn define(&self, name: Rc<str>, value: Value) {
        self.data.vars.borrow_mut().insert(name, value);
    }

    /// Walks to the chain root and defines the name there.
    pub fn define_global(&self, name: Rc<str>, value: Value) {
        self.globals().define(name, value);
    }

    pub fn globals(&self) -> Scope {
        let mut scope = self.clone();
        while let Some(parent) = scope.data.parent.clone() {
            scope = parent;
        }
        scope
    }

    /// Copies this scope's own bindings (module export table).
    pub fn export(&self) -> HashMap<Rc<str>, Value> {
        self.data.vars.borrow().clone()
    }
}

/// One function activation: its local scope plus the set of names the
/// function declared `global`.
pub struct Frame {
    pub scope: Scope,
    pub global_names: HashSet<Rc<str>>,
}

impl Frame {
    pub fn new(scope: Scope) -> Self {
        Self {
            scope,
            global_names: HashSet::new(),
        }
    }

    pub fn assign(&self, name: &Rc<str>, value: Value) {
        if self.global_names.contains(name) {
            self.scope.define_global(name.clone(), value);
        } else {
            self.scope.define(name.clone(), value);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn innermost_shadow_wins() {
        let root = Scope::root();
        root.define("x".into(), Value::Int(1));
        let inner = root.child();
        inner.define("x".into(), Value::Int(2));
        assert!(matches!(inner.lookup("x"), Some(Value::Int(2))));
        assert!(matches!(root.lookup("x"), Some(Value::Int(1))));
    }

    #[test]
    fn global_declaration_writes_the_root() {
        let root = Scope::root();
        root.define("count".into(), Value::Int(0));
        let frame_scope = root.child();
        let mut frame = Frame::new(frame_scope);
        frame.global_names.insert("count".into());
        frame.assign(&Rc::from("count"), Value::Int(7));
        assert!(matches!(root.lookup("count"), Some(Value::Int(7))));
    }
}
