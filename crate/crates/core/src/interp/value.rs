//! Guest-language values.
//!
//! Containers carry a [`HeapCharge`] so the budget ledger sees every
//! allocation and every release. All of them are `Rc`-backed: one
//! interpreter instance owns everything, nothing is shared across
//! instances.
//!
//! Cost model (cells): a list or map charges one cell per element/entry, a
//! string charges one cell per byte. Scalars are unboxed and free; a scalar
//! stored in a container is paid for by the container's element cell.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

use crate::interp::ast::Stmt;
use crate::interp::env::Scope;
use crate::interp::error::{type_error, GuestError};
use crate::sandbox::{HeapCharge, HeapLedger, MemoryBudgetExceeded};

/// Nesting budget for structural equality and repr of (possibly cyclic)
/// container graphs.
const STRUCTURE_DEPTH_LIMIT: usize = 200;

#[derive(Clone)]
pub enum Value {
    Int(i64),
    Float(f64),
    Bool(bool),
    Str(GuestStr),
    List(GuestList),
    Map(GuestMap),
    Func(Rc<FuncValue>),
    /// Host-provided callable (len, range, print, ...).
    Builtin(Builtin),
    /// An imported module's namespace.
    Module(Rc<ModuleValue>),
    None,
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = Vec::new();
        match self.write_repr(&mut out) {
            Ok(()) => write!(f, "{}", String::from_utf8_lossy(&out)),
            Err(_) => write!(f, "<cyclic {}>", self.type_name()),
        }
    }
}

/// Identifiers for the host-provided builtins. The codec pair is not
/// nameable from guest code directly: it lives only in the `zlib_lite`
/// module table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    Len,
    Range,
    Print,
    Str,
    Int,
    Float,
    Abs,
    Min,
    Max,
    ZlibCompress,
    ZlibDecompress,
}

impl Builtin {
    pub fn name(&self) -> &'static str {
        match self {
            Builtin::Len => "len",
            Builtin::Range => "range",
            Builtin::Print => "print",
            Builtin::Str => "str",
            Builtin::Int => "int",
            Builtin::Float => "float",
            Builtin::Abs => "abs",
            Builtin::Min => "min",
            Builtin::Max => "max",
            Builtin::ZlibCompress => "compress",
            Builtin::ZlibDecompress => "decompress",
        }
    }

    pub fn lookup(name: &str) -> Option<Builtin> {
        Some(match name {
            "len" => Builtin::Len,
            "range" => Builtin::Range,
            "print" => Builtin::Print,
            "str" => Builtin::Str,
            "int" => Builtin::Int,
            "float" => Builtin::Float,
            "abs" => Builtin::Abs,
            "min" => Builtin::Min,
            "max" => Builtin::Max,
            _ => return None,
        })
    }
}

/// A guest function: parameter names, body, and the scope it closes over.
pub struct FuncValue {
    pub name: Rc<str>,
    pub params: Vec<Rc<str>>,
    pub body: Rc<[Stmt]>,
    pub env: Scope,
    pub def_line: u32,
}

impl fmt::Debug for FuncValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<function {}>", self.name)
    }
}

/// An imported module: a named table of values.
#[derive(Debug)]
pub struct ModuleValue {
    pub name: Rc<str>,
    pub table: RefCell<HashMap<Rc<str>, Value>>,
}

impl ModuleValue {
    pub fn get(&self, attr: &str) -> Option<Value> {
        self.table.borrow().get(attr).cloned()
    }
}

// ---------------------------------------------------------------------------
// Strings

/// Immutable byte-text. Guest strings are byte strings: source literals
/// contribute their UTF-8 bytes, and the codec bridge traffics in raw
/// bytes.
#[derive(Clone)]
pub struct GuestStr {
    data: Rc<StrData>,
}

struct StrData {
    bytes: Box<[u8]>,
    _charge: HeapCharge,
}

impl GuestStr {
    pub fn new(ledger: &Rc<HeapLedger>, bytes: &[u8]) -> Result<Self, MemoryBudgetExceeded> {
        let charge = HeapCharge::charge(ledger, bytes.len() as u64)?;
        Ok(Self {
            data: Rc::new(StrData {
                bytes: bytes.into(),
                _charge: charge,
            }),
        })
    }

    pub fn from_vec(ledger: &Rc<HeapLedger>, bytes: Vec<u8>) -> Result<Self, MemoryBudgetExceeded> {
        let charge = HeapCharge::charge(ledger, bytes.len() as u64)?;
        Ok(Self {
            data: Rc::new(StrData {
                bytes: bytes.into_boxed_slice(),
                _charge: charge,
            }),
        })
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.data.bytes
    }

    pub fn len(&self) -> usize {
        self.data.bytes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.bytes.is_empty()
    }
}

impl fmt::Debug for GuestStr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", String::from_utf8_lossy(self.as_bytes()))
    }
}

// ---------------------------------------------------------------------------
// Lists

/// Mutable guest sequence. Cloning shares the underlying storage.
#[derive(Clone)]
pub struct GuestList {
    data: Rc<ListData>,
}

pub struct ListData {
    items: RefCell<Vec<Value>>,
    charge: HeapCharge,
}

impl GuestList {
    pub fn new(ledger: &Rc<HeapLedger>, items: Vec<Value>) -> Result<Self, MemoryBudgetExceeded> {
        let charge = HeapCharge::charge(ledger, items.len() as u64)?;
        Ok(Self {
            data: Rc::new(ListData {
                items: RefCell::new(items),
                charge,
            }),
        })
    }

    pub fn len(&self) -> usize {
        self.data.items.borrow().len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.items.borrow().is_empty()
    }

    pub fn get(&self, index: usize) -> Option<Value> {
        self.data.items.borrow().get(index).cloned()
    }

    /// Writes an element that is already known to be in range.
    pub fn set(&self, index: usize, value: Value) {
        self.data.items.borrow_mut()[index] = value;
    }

    pub fn push(&self, value: Value) -> Result<(), MemoryBudgetExceeded> {
        self.data.charge.grow(1)?;
        self.data.items.borrow_mut().push(value);
        Ok(())
    }

    pub fn snapshot(&self) -> Vec<Value> {
        self.data.items.borrow().clone()
    }

    /// Identity comparison: true when both handles share storage.
    pub fn same_object(&self, other: &GuestList) -> bool {
        Rc::ptr_eq(&self.data, &other.data)
    }
}

impl Drop for ListData {
    // Cascading drops of deeply nested lists are flattened into an explicit
    // worklist so a long guest-built chain cannot exhaust the host stack.
    fn drop(&mut self) {
        let mut work: Vec<Value> = std::mem::take(&mut *self.items.borrow_mut());
        while let Some(value) = work.pop() {
            match value {
                Value::List(mut list) => {
                    if let Some(inner) = Rc::get_mut(&mut list.data) {
                        work.append(inner.items.get_mut());
                    }
                }
                Value::Map(mut map) => {
                    if let Some(inner) = Rc::get_mut(&mut map.data) {
                        work.extend(inner.entries.get_mut().drain_values());
                    }
                }
                _ => {}
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Maps

/// Key domain for guest maps: the hashable value kinds. Float keys use the
/// bit pattern of the IEEE value with -0.0 normalized to +0.0; NaN keys are
/// rejected before a `MapKey` is ever built.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MapKey {
    Int(i64),
    Bool(bool),
    Str(Box<[u8]>),
    FloatBits(u64),
    None,
}

impl MapKey {
    /// Converts a guest value to a key, or reports why it cannot be one.
    pub fn from_value(value: &Value) -> Result<MapKey, GuestError> {
        match value {
            Value::Int(i) => Ok(MapKey::Int(*i)),
            Value::Bool(b) => Ok(MapKey::Bool(*b)),
            Value::Str(s) => Ok(MapKey::Str(s.as_bytes().into())),
            Value::Float(f) => {
                if f.is_nan() {
                    return Err(type_error("NaN is not a usable map key"));
                }
                let normalized = if *f == 0.0 { 0.0 } else { *f };
                Ok(MapKey::FloatBits(normalized.to_bits()))
            }
            Value::None => Ok(MapKey::None),
            other => Err(type_error(format!(
                "unhashable type: '{}'",
                other.type_name()
            ))),
        }
    }

    pub fn to_value(&self, ledger: &Rc<HeapLedger>) -> Result<Value, MemoryBudgetExceeded> {
        Ok(match self {
            MapKey::Int(i) => Value::Int(*i),
            MapKey::Bool(b) => Value::Bool(*b),
            MapKey::Str(bytes) => Value::Str(GuestStr::new(ledger, bytes)?),
            MapKey::FloatBits(bits) => Value::Float(f64::from_bits(*bits)),
            MapKey::None => Value::None,
        })
    }
}

/// Insertion-ordered association table. The guest subset has no deletion,
/// so slots are stable once created.
#[derive(Default)]
pub struct MapEntries {
    order: Vec<(MapKey, Value)>,
    index: HashMap<MapKey, usize>,
}

impl MapEntries {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn get(&self, key: &MapKey) -> Option<&Value> {
        self.index.get(key).map(|&slot| &self.order[slot].1)
    }

    /// Returns true when the write created a new entry.
    pub fn insert(&mut self, key: MapKey, value: Value) -> bool {
        match self.index.get(&key) {
            Some(&slot) => {
                self.order[slot].1 = value;
                false
            }
            None => {
                self.index.insert(key.clone(), self.order.len());
                self.order.push((key, value));
                true
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &(MapKey, Value)> {
        self.order.iter()
    }

    fn drain_values(&mut self) -> impl Iterator<Item = Value> + '_ {
        self.index.clear();
        self.order.drain(..).map(|(_, v)| v)
    }
}

/// Mutable guest map. Cloning shares the underlying storage.
#[derive(Clone)]
pub struct GuestMap {
    data: Rc<MapData>,
}

pub struct MapData {
    entries: RefCell<MapEntries>,
    charge: HeapCharge,
}

impl GuestMap {
    pub fn new(
        ledger: &Rc<HeapLedger>,
        pairs: Vec<(MapKey, Value)>,
    ) -> Result<Self, MemoryBudgetExceeded> {
        let charge = HeapCharge::charge(ledger, pairs.len() as u64)?;
        let mut entries = MapEntries::default();
        let mut duplicates = 0u64;
        for (key, value) in pairs {
            if !entries.insert(key, value) {
                duplicates += 1;
            }
        }
        charge.shrink(duplicates);
        Ok(Self {
            data: Rc::new(MapData {
                entries: RefCell::new(entries),
                charge,
            }),
        })
    }

    pub fn len(&self) -> usize {
        self.data.entries.borrow().len()
    }

    pub fn get(&self, key: &MapKey) -> Option<Value> {
        self.data.entries.borrow().get(key).cloned()
    }

    pub fn insert(&self, key: MapKey, value: Value) -> Result<(), MemoryBudgetExceeded> {
        // Charge ahead of the write; overwrites hand the cell back.
        self.data.charge.grow(1)?;
        if !self.data.entries.borrow_mut().insert(key, value) {
            self.data.charge.shrink(1);
        }
        Ok(())
    }

    pub fn snapshot(&self) -> Vec<(MapKey, Value)> {
        self.data
            .entries
            .borrow()
            .iter()
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect()
    }

    pub fn same_object(&self, other: &GuestMap) -> bool {
        Rc::ptr_eq(&self.data, &other.data)
    }
}

impl Drop for MapData {
    fn drop(&mut self) {
        let values: Vec<Value> = self.entries.get_mut().drain_values().collect();
        if !values.is_empty() {
            // Reuse the list worklist by routing through a ListData-style
            // drain: wrap in a plain Vec and let each value drop through the
            // same flattening logic.
            let mut work = values;
            while let Some(value) = work.pop() {
                match value {
                    Value::List(mut list) => {
                        if let Some(inner) = Rc::get_mut(&mut list.data) {
                            work.append(inner.items.get_mut());
                        }
                    }
                    Value::Map(mut map) => {
                        if let Some(inner) = Rc::get_mut(&mut map.data) {
                            work.extend(inner.entries.get_mut().drain_values());
                        }
                    }
                    _ => {}
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Value behavior

impl Value {
    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Int(_) => "int",
            Value::Float(_) => "float",
            Value::Bool(_) => "bool",
            Value::Str(_) => "str",
            Value::List(_) => "list",
            Value::Map(_) => "map",
            Value::Func(_) => "function",
            Value::Builtin(_) => "builtin",
            Value::Module(_) => "module",
            Value::None => "NoneType",
        }
    }

    pub fn truthy(&self) -> bool {
        match self {
            Value::Int(i) => *i != 0,
            Value::Float(f) => *f != 0.0,
            Value::Bool(b) => *b,
            Value::Str(s) => !s.is_empty(),
            Value::List(l) => !l.is_empty(),
            Value::Map(m) => m.len() != 0,
            Value::Func(_) | Value::Builtin(_) | Value::Module(_) => true,
            Value::None => false,
        }
    }

    /// Guest `==`. Cross-type comparisons are false rather than errors,
    /// except Int/Float which compare numerically (exactly).
    pub fn guest_eq(&self, other: &Value) -> Result<bool, GuestError> {
        self.eq_with_depth(other, 0)
    }

    fn eq_with_depth(&self, other: &Value, depth: usize) -> Result<bool, GuestError> {
        if depth > STRUCTURE_DEPTH_LIMIT {
            return Err(GuestError::new(
                crate::interp::error::GuestErrorKind::RecursionError,
                "comparison nesting too deep",
            ));
        }
        Ok(match (self, other) {
            (Value::Int(a), Value::Int(b)) => a == b,
            (Value::Float(a), Value::Float(b)) => a == b,
            (Value::Int(a), Value::Float(b)) | (Value::Float(b), Value::Int(a)) => {
                int_eq_float(*a, *b)
            }
            (Value::Bool(a), Value::Bool(b)) => a == b,
            (Value::Str(a), Value::Str(b)) => a.as_bytes() == b.as_bytes(),
            (Value::None, Value::None) => true,
            (Value::List(a), Value::List(b)) => {
                if a.same_object(b) {
                    return Ok(true);
                }
                let (xs, ys) = (a.snapshot(), b.snapshot());
                if xs.len() != ys.len() {
                    return Ok(false);
                }
                for (x, y) in xs.iter().zip(ys.iter()) {
                    if !x.eq_with_depth(y, depth + 1)? {
                        return Ok(false);
                    }
                }
                true
            }
            (Value::Map(a), Value::Map(b)) => {
                if a.same_object(b) {
                    return Ok(true);
                }
                let (xs, ys) = (a.snapshot(), b.snapshot());
                if xs.len() != ys.len() {
                    return Ok(false);
                }
                for (key, value) in &xs {
                    match ys.iter().find(|(k, _)| k == key) {
                        Some((_, other_value)) => {
                            if !value.eq_with_depth(other_value, depth + 1)? {
                                return Ok(false);
                            }
                        }
                        None => return Ok(false),
                    }
                }
                true
            }
            (Value::Func(a), Value::Func(b)) => Rc::ptr_eq(a, b),
            (Value::Builtin(a), Value::Builtin(b)) => a == b,
            (Value::Module(a), Value::Module(b)) => Rc::ptr_eq(a, b),
            _ => false,
        })
    }

    /// Guest ordering for `<`, `<=`, `>`, `>=`. Only numeric pairs and
    /// string pairs are ordered.
    pub fn guest_cmp(&self, other: &Value) -> Result<Option<std::cmp::Ordering>, GuestError> {
        match (self, other) {
            (Value::Int(a), Value::Int(b)) => Ok(Some(a.cmp(b))),
            (Value::Float(a), Value::Float(b)) => Ok(a.partial_cmp(b)),
            (Value::Int(a), Value::Float(b)) => Ok((*a as f64).partial_cmp(b)),
            (Value::Float(a), Value::Int(b)) => Ok(a.partial_cmp(&(*b as f64))),
            (Value::Str(a), Value::Str(b)) => Ok(Some(a.as_bytes().cmp(other_bytes(b)))),
            _ => Err(type_error(format!(
                "'{}' and '{}' are not orderable",
                self.type_name(),
                other.type_name()
            ))),
        }
    }

    /// Python-style repr, used by `str()` on containers and by `print` for
    /// non-string values. Depth-limited so cyclic structures raise instead
    /// of hanging.
    pub fn write_repr(&self, out: &mut Vec<u8>) -> Result<(), GuestError> {
        self.repr_with_depth(out, 0)
    }

    fn repr_with_depth(&self, out: &mut Vec<u8>, depth: usize) -> Result<(), GuestError> {
        if depth > STRUCTURE_DEPTH_LIMIT {
            return Err(GuestError::new(
                crate::interp::error::GuestErrorKind::RecursionError,
                "repr nesting too deep",
            ));
        }
        match self {
            Value::Int(i) => out.extend_from_slice(i.to_string().as_bytes()),
            Value::Float(f) => out.extend_from_slice(float_repr(*f).as_bytes()),
            Value::Bool(true) => out.extend_from_slice(b"True"),
            Value::Bool(false) => out.extend_from_slice(b"False"),
            Value::None => out.extend_from_slice(b"None"),
            Value::Str(s) => {
                out.push(b'\'');
                for &b in s.as_bytes() {
                    match b {
                        b'\\' => out.extend_from_slice(b"\\\\"),
                        b'\'' => out.extend_from_slice(b"\\'"),
                        b'\n' => out.extend_from_slice(b"\\n"),
                        b'\t' => out.extend_from_slice(b"\\t"),
                        b'\r' => out.extend_from_slice(b"\\r"),
                        0x20..=0x7e => out.push(b),
                        other => out.extend_from_slice(format!("\\x{other:02x}").as_bytes()),
                    }
                }
                out.push(b'\'');
            }
            Value::List(list) => {
                out.push(b'[');
                for (i, item) in list.snapshot().iter().enumerate() {
                    if i > 0 {
                        out.extend_from_slice(b", ");
                    }
                    item.repr_with_depth(out, depth + 1)?;
                }
                out.push(b']');
            }
            Value::Map(map) => {
                out.push(b'{');
                for (i, (key, value)) in map.snapshot().iter().enumerate() {
                    if i > 0 {
                        out.extend_from_slice(b", ");
                    }
                    key_repr(key, out);
                    out.extend_from_slice(b": ");
                    value.repr_with_depth(out, depth + 1)?;
                }
                out.push(b'}');
            }
            Value::Func(f) => {
                out.extend_from_slice(format!("<function {}>", f.name).as_bytes())
            }
            Value::Builtin(b) => {
                out.extend_from_slice(format!("<builtin {}>", b.name()).as_bytes())
            }
            Value::Module(m) => {
                out.extend_from_slice(format!("<module {}>", m.name).as_bytes())
            }
        }
        Ok(())
    }
}

fn other_bytes(s: &GuestStr) -> &[u8] {
    s.as_bytes()
}

fn key_repr(key: &MapKey, out: &mut Vec<u8>) {
    match key {
        MapKey::Int(i) => out.extend_from_slice(i.to_string().as_bytes()),
        MapKey::Bool(true) => out.extend_from_slice(b"True"),
        MapKey::Bool(false) => out.extend_from_slice(b"False"),
        MapKey::None => out.extend_from_slice(b"None"),
        MapKey::FloatBits(bits) => {
            out.extend_from_slice(float_repr(f64::from_bits(*bits)).as_bytes())
        }
        MapKey::Str(bytes) => {
            out.push(b'\'');
            for &b in bytes.iter() {
                match b {
                    b'\\' => out.extend_from_slice(b"\\\\"),
                    b'\'' => out.extend_from_slice(b"\\'"),
                    0x20..=0x7e => out.push(b),
                    other => out.extend_from_slice(format!("\\x{other:02x}").as_bytes()),
                }
            }
            out.push(b'\'');
        }
    }
}

/// Text form of a guest float: the exact decimal expansion of the stored
/// binary64 value, with a `.0` suffix for integer-valued floats so they
/// stay visually distinct from ints.
pub fn float_repr(f: f64) -> String {
    if f.is_nan() {
        return "nan".to_string();
    }
    if f.is_infinite() {
        return if f < 0.0 { "-inf" } else { "inf" }.to_string();
    }
    match crate::runtime::format_double_exact(f) {
        Ok(mut text) => {
            if !text.contains('.') {
                text.push_str(".0");
            }
            text
        }
        Err(_) => unreachable!("finite floats always format"),
    }
}

fn int_eq_float(i: i64, f: f64) -> bool {
    if !f.is_finite() || f.fract() != 0.0 {
        return false;
    }
    // In-range integral doubles cast exactly.
    if f < -(2f64.powi(63)) || f >= 2f64.powi(63) {
        return false;
    }
    (f as i64) == i
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ledger() -> Rc<HeapLedger> {
        HeapLedger::new(u64::MAX)
    }

    #[test]
    fn truthiness_matches_guest_rules() {
        let l = ledger();
        assert!(!Value::Int(0).truthy());
        assert!(Value::Int(-1).truthy());
        assert!(!Value::Str(GuestStr::new(&l, b"").unwrap()).truthy());
        assert!(Value::Str(GuestStr::new(&l, b"x").unwrap()).truthy());
        assert!(!Value::None.truthy());
        assert!(!Value::List(GuestList::new(&l, vec![]).unwrap()).truthy());
    }

    #[test]
    fn int_float_equality_is_exact() {
        assert!(Value::Int(1).guest_eq(&Value::Float(1.0)).unwrap());
        assert!(!Value::Int(1).guest_eq(&Value::Float(1.5)).unwrap());
        // 2^53 + 1 is not representable; the nearest double is 2^53.
        let big = (1i64 << 53) + 1;
        assert!(!Value::Int(big).guest_eq(&Value::Float(big as f64)).unwrap());
    }

    #[test]
    fn nan_map_key_is_rejected() {
        let err = MapKey::from_value(&Value::Float(f64::NAN)).unwrap_err();
        assert_eq!(err.kind, crate::interp::error::GuestErrorKind::TypeError);
    }

    #[test]
    fn negative_zero_key_folds_to_positive() {
        let a = MapKey::from_value(&Value::Float(-0.0)).unwrap();
        let b = MapKey::from_value(&Value::Float(0.0)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn map_insert_accounts_cells() {
        let l = HeapLedger::new(3);
        let map = GuestMap::new(&l, vec![]).unwrap();
        map.insert(MapKey::Int(1), Value::Int(10)).unwrap();
        map.insert(MapKey::Int(2), Value::Int(20)).unwrap();
        // Overwrite keeps the cell count flat.
        map.insert(MapKey::Int(1), Value::Int(11)).unwrap();
        assert_eq!(l.live_cells(), 2);
        map.insert(MapKey::Int(3), Value::Int(30)).unwrap();
        assert!(map.insert(MapKey::Int(4), Value::Int(40)).is_err());
    }

    #[test]
    fn deep_list_chain_drops_without_overflow() {
        let l = ledger();
        let mut chain = Value::List(GuestList::new(&l, vec![]).unwrap());
        for _ in 0..200_000 {
            chain = Value::List(GuestList::new(&l, vec![chain]).unwrap());
        }
        drop(chain);
        assert_eq!(l.live_cells(), 0);
    }

    #[test]
    fn cyclic_repr_raises_instead_of_hanging() {
        let l = ledger();
        let list = GuestList::new(&l, vec![Value::None]).unwrap();
        list.set(0, Value::List(list.clone()));
        let mut out = Vec::new();
        let err = Value::List(list.clone()).write_repr(&mut out).unwrap_err();
        assert_eq!(err.kind, crate::interp::error::GuestErrorKind::RecursionError);
        // Break the cycle so the ledger drains in the test.
        list.set(0, Value::None);
    }
}
