//! Address-range index for generated-code metadata.
//!
//! Entries cover half-open intervals `[addr, addr+size)` and never
//! overlap. Deletion computes `search_key = addr + size - 1`, asks the
//! skiplist for the predecessor-or-equal node, and bails out—returning
//! nothing and touching nothing—when no node exists or the found key lies
//! below `addr`. Absence is a normal result here, not an error.

use super::skiplist::SkipList;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodemapEntry {
    pub addr: u64,
    pub size: u64,
    /// Opaque payload (e.g. a method token).
    pub payload: u64,
}

impl CodemapEntry {
    /// Exclusive end of the covered interval.
    pub fn end(&self) -> u64 {
        self.addr + self.size
    }

    pub fn covers(&self, addr: u64) -> bool {
        addr >= self.addr && addr < self.end()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CodemapError {
    #[error("interval [{addr}, {addr}+{size}) overlaps an existing entry at {existing}")]
    Overlap { addr: u64, size: u64, existing: u64 },
    #[error("interval [{addr}, {addr}+{size}) is empty or wraps the address space")]
    InvalidInterval { addr: u64, size: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct EntryData {
    size: u64,
    payload: u64,
}

/// Ordered map from start address to entry, plus a generation counter
/// bumped exactly once per successful mutation (the observable stand-in
/// for an invalidation flag).
pub struct Codemap {
    index: SkipList<EntryData>,
    generation: u64,
}

impl Default for Codemap {
    fn default() -> Self {
        Self::new()
    }
}

impl Codemap {
    pub fn new() -> Self {
        Self {
            index: SkipList::new(),
            generation: 0,
        }
    }

    pub fn with_seed(seed: u64) -> Self {
        Self {
            index: SkipList::with_seed(seed),
            generation: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    /// Registers a new interval. Rejects empty or wrapping intervals and
    /// any intersection with an existing entry.
    pub fn add(&mut self, entry: CodemapEntry) -> Result<(), CodemapError> {
        if entry.size == 0 || entry.addr.checked_add(entry.size).is_none() {
            return Err(CodemapError::InvalidInterval {
                addr: entry.addr,
                size: entry.size,
            });
        }
        // The only candidate for intersection is the entry with the
        // greatest start <= last covered address: later entries start past
        // the new interval, earlier ones are screened by their end.
        let last = entry.addr + entry.size - 1;
        if let Some((key, data)) = self.index.search(last) {
            let existing_end = key + data.size;
            if key >= entry.addr || existing_end > entry.addr {
                return Err(CodemapError::Overlap {
                    addr: entry.addr,
                    size: entry.size,
                    existing: key,
                });
            }
        }
        self.index
            .insert(
                entry.addr,
                EntryData {
                    size: entry.size,
                    payload: entry.payload,
                },
            )
            .expect("overlap screen admits no duplicate start");
        self.generation += 1;
        Ok(())
    }

    /// Removes the entry found via `search_key = addr + size - 1`,
    /// guarded: when the map is empty, or the predecessor's key lies
    /// below `addr`, nothing is removed and the map is untouched.
    ///
    /// `size == 0` describes an empty interval; with entry sizes strictly
    /// positive nothing can match, so the degenerate call is a total no-op
    /// rather than an underflowing `addr - 1` probe.
    pub fn del(&mut self, addr: u64, size: u64) -> Option<CodemapEntry> {
        if size == 0 {
            return None;
        }
        let search_key = addr.saturating_add(size - 1);
        let found = match self.index.search(search_key) {
            None => return None,
            Some((key, _)) if key < addr => return None,
            Some((key, _)) => key,
        };
        let data = self
            .index
            .remove(found)
            .expect("search returned a live key");
        self.generation += 1;
        Some(CodemapEntry {
            addr: found,
            size: data.size,
            payload: data.payload,
        })
    }

    /// The unique entry covering `addr`, if any.
    pub fn lookup(&self, addr: u64) -> Option<CodemapEntry> {
        let (key, data) = self.index.search(addr)?;
        let entry = CodemapEntry {
            addr: key,
            size: data.size,
            payload: data.payload,
        };
        entry.covers(addr).then_some(entry)
    }

    pub fn iter(&self) -> impl Iterator<Item = CodemapEntry> + '_ {
        self.index.iter().map(|(key, data)| CodemapEntry {
            addr: key,
            size: data.size,
            payload: data.payload,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(addr: u64, size: u64) -> CodemapEntry {
        CodemapEntry {
            addr,
            size,
            payload: addr ^ size,
        }
    }

    #[test]
    fn del_on_empty_map_is_nothing() {
        let mut map = Codemap::new();
        assert_eq!(map.del(100, 8), None);
        assert_eq!(map.generation(), 0);
    }

    #[test]
    fn del_removes_exact_interval() {
        let mut map = Codemap::new();
        map.add(entry(100, 8)).unwrap();
        // search_key = 107 finds key 100, and 100 >= addr.
        let removed = map.del(100, 8).unwrap();
        assert_eq!(removed.addr, 100);
        assert!(map.is_empty());
        assert_eq!(map.generation(), 2);
    }

    #[test]
    fn del_below_addr_is_guarded() {
        let mut map = Codemap::new();
        map.add(entry(200, 16)).unwrap();
        // Predecessor of search_key 315 is 200, which is < 300: refuse.
        assert_eq!(map.del(300, 16), None);
        assert_eq!(map.len(), 1);
        assert_eq!(map.generation(), 1);
    }

    #[test]
    fn del_size_zero_is_total_and_harmless() {
        let mut map = Codemap::new();
        map.add(entry(0, 4)).unwrap();
        assert_eq!(map.del(0, 0), None);
        assert_eq!(map.del(u64::MAX, 0), None);
        assert_eq!(map.len(), 1);
    }

    #[test]
    fn overlap_rules_are_half_open() {
        let mut map = Codemap::new();
        map.add(entry(100, 8)).unwrap();
        let err = map.add(entry(104, 4)).unwrap_err();
        assert!(matches!(err, CodemapError::Overlap { .. }));
        // Adjacent on the right is fine.
        map.add(entry(108, 4)).unwrap();
        // Adjacent on the left is fine.
        map.add(entry(96, 4)).unwrap();
        // Straddling from below is caught.
        let err = map.add(entry(95, 2)).unwrap_err();
        assert!(matches!(err, CodemapError::Overlap { .. }));
        assert_eq!(map.len(), 3);
    }

    #[test]
    fn invalid_intervals_are_rejected() {
        let mut map = Codemap::new();
        assert!(matches!(
            map.add(entry(5, 0)),
            Err(CodemapError::InvalidInterval { .. })
        ));
        assert!(matches!(
            map.add(entry(u64::MAX, 2)),
            Err(CodemapError::InvalidInterval { .. })
        ));
    }

    #[test]
    fn lookup_half_open_boundary() {
        let mut map = Codemap::new();
        map.add(entry(100, 8)).unwrap();
        assert!(map.lookup(100).is_some());
        assert!(map.lookup(107).is_some());
        assert!(map.lookup(108).is_none());
        assert!(map.lookup(99).is_none());
        assert!(Codemap::new().lookup(0).is_none());
    }
}
