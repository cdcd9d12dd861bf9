//! Fixed heap budget accounting.
//!
//! The evaluator charges one cell per list/map element and one per string
//! byte at allocation time; cells are credited back the moment the owning
//! container is dropped (scope exit releases the last reference, so
//! reclamation points are deterministic). The budget itself never changes
//! during a run.

use std::cell::Cell;
use std::rc::Rc;

/// The run exceeded its fixed heap budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("memory budget exceeded: {requested} cells requested, {live} live of {budget}")]
pub struct MemoryBudgetExceeded {
    pub budget: u64,
    pub live: u64,
    pub requested: u64,
}

/// Shared live-cell ledger for one interpreter run.
#[derive(Debug)]
pub struct HeapLedger {
    budget: u64,
    live: Cell<u64>,
    peak: Cell<u64>,
    allocations: Cell<u64>,
}

impl HeapLedger {
    pub fn new(budget_cells: u64) -> Rc<Self> {
        Rc::new(Self {
            budget: budget_cells,
            live: Cell::new(0),
            peak: Cell::new(0),
            allocations: Cell::new(0),
        })
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn live_cells(&self) -> u64 {
        self.live.get()
    }

    pub fn peak_cells(&self) -> u64 {
        self.peak.get()
    }

    /// Count of charge events (allocation events, not cells).
    pub fn allocation_count(&self) -> u64 {
        self.allocations.get()
    }

    /// Charges `cells` against the budget. A request that would push the
    /// live total past the budget fails and leaves the ledger unchanged.
    pub fn charge(&self, cells: u64) -> Result<(), MemoryBudgetExceeded> {
        let live = self.live.get();
        let next = live.saturating_add(cells);
        if next > self.budget {
            return Err(MemoryBudgetExceeded {
                budget: self.budget,
                live,
                requested: cells,
            });
        }
        self.allocations.set(self.allocations.get() + 1);
        self.live.set(next);
        if next > self.peak.get() {
            self.peak.set(next);
        }
        Ok(())
    }

    /// Returns `cells` to the budget. Saturates at zero; crediting more
    /// than was charged indicates a bookkeeping bug upstream, not a guest
    /// error, so it is clamped rather than propagated.
    pub fn credit(&self, cells: u64) {
        self.live.set(self.live.get().saturating_sub(cells));
    }

    /// Non-mutating probe used before materializing large host buffers
    /// (string/list repetition, `range`).
    pub fn ensure_capacity(&self, cells: u64) -> Result<(), MemoryBudgetExceeded> {
        let live = self.live.get();
        if live.saturating_add(cells) > self.budget {
            Err(MemoryBudgetExceeded {
                budget: self.budget,
                live,
                requested: cells,
            })
        } else {
            Ok(())
        }
    }
}

/// Drop guard tying a container's cell count to the run ledger. Containers
/// embed one of these; when the last reference to the container goes away,
/// the cells are credited back automatically.
#[derive(Debug)]
pub struct HeapCharge {
    ledger: Rc<HeapLedger>,
    cells: Cell<u64>,
}

impl HeapCharge {
    /// Charges `cells` up front and returns the guard on success.
    pub fn charge(ledger: &Rc<HeapLedger>, cells: u64) -> Result<Self, MemoryBudgetExceeded> {
        ledger.charge(cells)?;
        Ok(Self {
            ledger: Rc::clone(ledger),
            cells: Cell::new(cells),
        })
    }

    /// Charges for growth of the owning container.
    pub fn grow(&self, cells: u64) -> Result<(), MemoryBudgetExceeded> {
        self.ledger.charge(cells)?;
        self.cells.set(self.cells.get() + cells);
        Ok(())
    }

    /// Credits back `cells` after the owning container shrinks.
    pub fn shrink(&self, cells: u64) {
        let held = self.cells.get();
        let released = cells.min(held);
        self.cells.set(held - released);
        self.ledger.credit(released);
    }

    pub fn cells(&self) -> u64 {
        self.cells.get()
    }
}

impl Drop for HeapCharge {
    fn drop(&mut self) {
        self.ledger.credit(self.cells.get());
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_boundary_is_allowed() {
        let ledger = HeapLedger::new(100);
        ledger.charge(50).unwrap();
        ledger.charge(50).unwrap();
        assert_eq!(ledger.live_cells(), 100);
        assert_eq!(ledger.peak_cells(), 100);
        let err = ledger.charge(1).unwrap_err();
        assert_eq!(err.budget, 100);
        assert_eq!(err.live, 100);
        // Failed charge leaves the ledger untouched.
        assert_eq!(ledger.live_cells(), 100);
        assert_eq!(ledger.allocation_count(), 2);
    }

    #[test]
    fn drop_credits_back() {
        let ledger = HeapLedger::new(10);
        {
            let charge = HeapCharge::charge(&ledger, 8).unwrap();
            assert_eq!(ledger.live_cells(), 8);
            charge.grow(2).unwrap();
            assert_eq!(ledger.live_cells(), 10);
            assert!(charge.grow(1).is_err());
        }
        assert_eq!(ledger.live_cells(), 0);
        assert_eq!(ledger.peak_cells(), 10);
    }

    #[test]
    fn shrink_releases_partially() {
        let ledger = HeapLedger::new(10);
        let charge = HeapCharge::charge(&ledger, 6).unwrap();
        charge.shrink(4);
        assert_eq!(ledger.live_cells(), 2);
        assert_eq!(charge.cells(), 2);
        drop(charge);
        assert_eq!(ledger.live_cells(), 0);
    }
}
