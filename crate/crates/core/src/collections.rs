//! The mediated access path for guest sequences and maps.
//!
//! Every guest-visible index, write, slice, and map operation funnels
//! through here. `Hardened` mode performs explicit range validation and
//! counts each index/write check in the run audit; `Baseline` mode leans
//! on the host's own checked accessors and skips the validation layer and
//! the counting. Both modes are memory-safe and raise the same guest
//! errors — they exist as the two arms of the overhead measurement.

use std::rc::Rc;

use crate::interp::error::{index_error, key_error, GuestError};
use crate::interp::value::{GuestList, GuestMap, GuestStr, MapKey, Value};
use crate::sandbox::{HeapLedger, MemoryBudgetExceeded};

/// Selects the access path: explicit validation + audit counting, or
/// direct host-checked access.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HardeningMode {
    Hardened,
    Baseline,
}

/// Counter block threaded through every mediated access.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct BoundsAudit {
    /// Index/write checks performed in `Hardened` mode. Slices clamp and
    /// are deliberately not counted.
    pub bounds_checks_performed: u64,
}

/// Witness record for one bounds validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundsReport {
    pub operation: &'static str,
    pub container_length: usize,
    pub requested_index: i64,
    pub normalized_index: i64,
    pub in_bounds: bool,
}

/// Normalizes a (possibly negative) guest index against `len` and decides
/// whether it lands in bounds.
pub fn check_bounds(operation: &'static str, len: usize, requested: i64) -> BoundsReport {
    let normalized = if requested < 0 {
        // Normalize by +len once, Python style. i64 cannot overflow here:
        // len is a host container length.
        requested + len as i64
    } else {
        requested
    };
    BoundsReport {
        operation,
        container_length: len,
        requested_index: requested,
        normalized_index: normalized,
        in_bounds: normalized >= 0 && (normalized as u64) < len as u64,
    }
}

fn out_of_range(operation: &'static str, report: &BoundsReport) -> GuestError {
    index_error(format!(
        "{} index {} out of range for length {}",
        operation, report.requested_index, report.container_length
    ))
}

pub fn list_get(
    list: &GuestList,
    index: i64,
    mode: HardeningMode,
    audit: &mut BoundsAudit,
) -> Result<Value, GuestError> {
    match mode {
        HardeningMode::Hardened => {
            audit.bounds_checks_performed += 1;
            let report = check_bounds("list", list.len(), index);
            if !report.in_bounds {
                return Err(out_of_range("list", &report));
            }
            Ok(list
                .get(report.normalized_index as usize)
                .expect("validated index"))
        }
        HardeningMode::Baseline => {
            let len = list.len();
            let normalized = if index < 0 { index + len as i64 } else { index };
            usize::try_from(normalized)
                .ok()
                .and_then(|i| list.get(i))
                .ok_or_else(|| {
                    index_error(format!("list index {index} out of range for length {len}"))
                })
        }
    }
}

pub fn list_set(
    list: &GuestList,
    index: i64,
    value: Value,
    mode: HardeningMode,
    audit: &mut BoundsAudit,
) -> Result<(), GuestError> {
    match mode {
        HardeningMode::Hardened => {
            audit.bounds_checks_performed += 1;
            let report = check_bounds("list", list.len(), index);
            if !report.in_bounds {
                return Err(out_of_range("list", &report));
            }
            list.set(report.normalized_index as usize, value);
            Ok(())
        }
        HardeningMode::Baseline => {
            let len = list.len();
            let normalized = if index < 0 { index + len as i64 } else { index };
            match usize::try_from(normalized) {
                Ok(i) if i < len => {
                    list.set(i, value);
                    Ok(())
                }
                _ => Err(index_error(format!(
                    "list index {index} out of range for length {len}"
                ))),
            }
        }
    }
}

/// Clamp-to-range slice endpoints: out-of-range endpoints never error.
fn slice_window(len: usize, start: Option<i64>, stop: Option<i64>) -> (usize, usize) {
    let clamp = |endpoint: i64| -> usize {
        let normalized = if endpoint < 0 {
            endpoint + len as i64
        } else {
            endpoint
        };
        normalized.clamp(0, len as i64) as usize
    };
    let lo = start.map_or(0, clamp);
    let hi = stop.map_or(len, clamp);
    (lo, hi.max(lo))
}

pub fn list_slice(
    list: &GuestList,
    start: Option<i64>,
    stop: Option<i64>,
    _mode: HardeningMode,
    ledger: &Rc<HeapLedger>,
) -> Result<GuestList, MemoryBudgetExceeded> {
    let items = list.snapshot();
    let (lo, hi) = slice_window(items.len(), start, stop);
    GuestList::new(ledger, items[lo..hi].to_vec())
}

pub fn str_slice(
    text: &GuestStr,
    start: Option<i64>,
    stop: Option<i64>,
    _mode: HardeningMode,
    ledger: &Rc<HeapLedger>,
) -> Result<GuestStr, MemoryBudgetExceeded> {
    let bytes = text.as_bytes();
    let (lo, hi) = slice_window(bytes.len(), start, stop);
    GuestStr::new(ledger, &bytes[lo..hi])
}

pub fn str_index(
    text: &GuestStr,
    index: i64,
    mode: HardeningMode,
    audit: &mut BoundsAudit,
    ledger: &Rc<HeapLedger>,
) -> Result<Result<GuestStr, MemoryBudgetExceeded>, GuestError> {
    let byte = match mode {
        HardeningMode::Hardened => {
            audit.bounds_checks_performed += 1;
            let report = check_bounds("string", text.len(), index);
            if !report.in_bounds {
                return Err(out_of_range("string", &report));
            }
            text.as_bytes()[report.normalized_index as usize]
        }
        HardeningMode::Baseline => {
            let len = text.len();
            let normalized = if index < 0 { index + len as i64 } else { index };
            *usize::try_from(normalized)
                .ok()
                .and_then(|i| text.as_bytes().get(i))
                .ok_or_else(|| {
                    index_error(format!(
                        "string index {index} out of range for length {len}"
                    ))
                })?
        }
    };
    Ok(GuestStr::new(ledger, &[byte]))
}

pub fn map_get(map: &GuestMap, key: &Value, _mode: HardeningMode) -> Result<Value, GuestError> {
    let map_key = MapKey::from_value(key)?;
    map.get(&map_key).ok_or_else(|| {
        let mut shown = Vec::new();
        let _ = key.write_repr(&mut shown);
        key_error(String::from_utf8_lossy(&shown).into_owned())
    })
}

pub fn map_set(
    map: &GuestMap,
    key: &Value,
    value: Value,
    _mode: HardeningMode,
) -> Result<Result<(), MemoryBudgetExceeded>, GuestError> {
    let map_key = MapKey::from_value(key)?;
    Ok(map.insert(map_key, value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interp::error::GuestErrorKind;

    fn ledger() -> Rc<HeapLedger> {
        HeapLedger::new(u64::MAX)
    }

    fn int_list(items: &[i64]) -> GuestList {
        GuestList::new(&ledger(), items.iter().map(|&i| Value::Int(i)).collect()).unwrap()
    }

    fn get(list: &GuestList, index: i64, mode: HardeningMode) -> Result<Value, GuestError> {
        let mut audit = BoundsAudit::default();
        list_get(list, index, mode, &mut audit)
    }

    #[test]
    fn get_past_end_raises_in_both_modes() {
        let list = int_list(&[10, 20, 30]);
        for mode in [HardeningMode::Hardened, HardeningMode::Baseline] {
            let err = get(&list, 3, mode).unwrap_err();
            assert_eq!(err.kind, GuestErrorKind::IndexError);
        }
    }

    #[test]
    fn negative_index_counts_from_the_end() {
        let list = int_list(&[10, 20, 30]);
        for mode in [HardeningMode::Hardened, HardeningMode::Baseline] {
            assert!(matches!(get(&list, -1, mode), Ok(Value::Int(30))));
            assert!(get(&list, -4, mode).is_err());
        }
    }

    #[test]
    fn empty_list_always_raises() {
        let list = int_list(&[]);
        assert!(get(&list, 0, HardeningMode::Hardened).is_err());
        assert!(get(&list, 0, HardeningMode::Baseline).is_err());
    }

    #[test]
    fn set_in_range_mutates_out_of_range_leaves_unchanged() {
        let list = int_list(&[1, 2, 3]);
        let mut audit = BoundsAudit::default();
        list_set(&list, 1, Value::Int(9), HardeningMode::Hardened, &mut audit).unwrap();
        assert!(matches!(list.get(1), Some(Value::Int(9))));

        let err = list_set(&list, 3, Value::Int(7), HardeningMode::Hardened, &mut audit)
            .unwrap_err();
        assert_eq!(err.kind, GuestErrorKind::IndexError);
        let items = list.snapshot();
        assert_eq!(items.len(), 3);
        assert!(matches!(items[2], Value::Int(3)));

        list_set(&list, -3, Value::Int(0), HardeningMode::Hardened, &mut audit).unwrap();
        assert!(matches!(list.get(0), Some(Value::Int(0))));
        assert_eq!(audit.bounds_checks_performed, 3);
    }

    #[test]
    fn baseline_performs_no_counting() {
        let list = int_list(&[1, 2, 3]);
        let mut audit = BoundsAudit::default();
        list_get(&list, 0, HardeningMode::Baseline, &mut audit).unwrap();
        assert_eq!(audit.bounds_checks_performed, 0);
    }

    #[test]
    fn slices_clamp_and_copy() {
        let l = ledger();
        let list = int_list(&[1, 2, 3]);
        let sliced = list_slice(&list, Some(1), Some(99), HardeningMode::Hardened, &l).unwrap();
        assert_eq!(sliced.len(), 2);

        let full = list_slice(&list, None, None, HardeningMode::Hardened, &l).unwrap();
        assert_eq!(full.len(), 3);
        assert!(!full.same_object(&list));

        let empty = int_list(&[]);
        let out = list_slice(&empty, Some(5), Some(10), HardeningMode::Hardened, &l).unwrap();
        assert_eq!(out.len(), 0);
    }

    #[test]
    fn map_access_errors() {
        let l = ledger();
        let key = Value::Str(GuestStr::new(&l, b"a").unwrap());
        let map = GuestMap::new(
            &l,
            vec![(MapKey::from_value(&key).unwrap(), Value::Int(1))],
        )
        .unwrap();
        assert!(matches!(
            map_get(&map, &key, HardeningMode::Hardened),
            Ok(Value::Int(1))
        ));

        let missing = Value::Str(GuestStr::new(&l, b"b").unwrap());
        let err = map_get(&map, &missing, HardeningMode::Hardened).unwrap_err();
        assert_eq!(err.kind, GuestErrorKind::KeyError);

        let unhashable = Value::List(int_list(&[1]));
        let err = map_get(&map, &unhashable, HardeningMode::Hardened).unwrap_err();
        assert_eq!(err.kind, GuestErrorKind::TypeError);
    }

    #[test]
    fn str_index_boundaries() {
        let l = ledger();
        let text = GuestStr::new(&l, b"abc").unwrap();
        let mut audit = BoundsAudit::default();
        let c = str_index(&text, 2, HardeningMode::Hardened, &mut audit, &l)
            .unwrap()
            .unwrap();
        assert_eq!(c.as_bytes(), b"c");
        let a = str_index(&text, -3, HardeningMode::Hardened, &mut audit, &l)
            .unwrap()
            .unwrap();
        assert_eq!(a.as_bytes(), b"a");
        let err = str_index(&text, 3, HardeningMode::Hardened, &mut audit, &l).unwrap_err();
        assert_eq!(err.kind, GuestErrorKind::IndexError);
        assert_eq!(audit.bounds_checks_performed, 3);
    }

    #[test]
    fn normalization_law_holds_for_in_range_indices() {
        let list = int_list(&[5, 6, 7, 8]);
        let len = list.len() as i64;
        for i in 0..len {
            let a = get(&list, i, HardeningMode::Hardened).unwrap();
            let b = get(&list, i - len, HardeningMode::Hardened).unwrap();
            assert!(a.guest_eq(&b).unwrap());
        }
    }
}
