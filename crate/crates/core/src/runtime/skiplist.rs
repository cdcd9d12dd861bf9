//! Ordered map over `u64` keys with skiplist search semantics.
//!
//! `search` returns the entry with the greatest key less than or equal to
//! the query (predecessor-or-equal), which is the contract the codemap
//! deletion path needs. Level promotion is geometric with probability 1/2
//! up to [`MAX_LEVEL`]; the generator is seedable so structural tests are
//! reproducible.

const MAX_LEVEL: usize = 16;

/// Nil link.
const NIL: usize = usize::MAX;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SkiplistError {
    #[error("key {0} already present")]
    DuplicateKey(u64),
    #[error("key {0} absent")]
    KeyAbsent(u64),
}

struct Node<V> {
    key: u64,
    /// None only for recycled slots and the head sentinel.
    value: Option<V>,
    /// forward[i] is the arena index of the next node at level i.
    forward: Vec<usize>,
}

/// Arena-backed skiplist; slot 0 is the head sentinel.
pub struct SkipList<V> {
    nodes: Vec<Node<V>>,
    free_slots: Vec<usize>,
    level: usize,
    len: usize,
    rng_state: u64,
}

impl<V> Default for SkipList<V> {
    fn default() -> Self {
        Self::new()
    }
}

impl<V> SkipList<V> {
    pub fn new() -> Self {
        Self::with_seed(0x5eed_1337_c0de_a11e)
    }

    pub fn with_seed(seed: u64) -> Self {
        Self {
            nodes: vec![Node {
                key: 0,
                value: None,
                forward: vec![NIL; MAX_LEVEL],
            }],
            free_slots: Vec::new(),
            level: 1,
            len: 0,
            rng_state: seed | 1,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    fn random_level(&mut self) -> usize {
        // splitmix64 step; only the low bits steer promotion.
        self.rng_state = self.rng_state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.rng_state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^= z >> 31;
        let mut level = 1;
        while level < MAX_LEVEL && (z & 1) == 1 {
            level += 1;
            z >>= 1;
        }
        level
    }

    /// Walks down from the top level to the position just before `key`.
    /// Returns the update path (predecessor index per level).
    fn find_path(&self, key: u64) -> [usize; MAX_LEVEL] {
        let mut update = [0usize; MAX_LEVEL];
        let mut current = 0usize;
        for lvl in (0..self.level).rev() {
            loop {
                let next = self.nodes[current].forward[lvl];
                if next != NIL && self.nodes[next].key < key {
                    current = next;
                } else {
                    break;
                }
            }
            update[lvl] = current;
        }
        update
    }

    /// Greatest key `<= key`, or `None` when every stored key is larger
    /// (or the list is empty).
    pub fn search(&self, key: u64) -> Option<(u64, &V)> {
        let mut current = 0usize;
        for lvl in (0..self.level).rev() {
            loop {
                let next = self.nodes[current].forward[lvl];
                if next != NIL && self.nodes[next].key <= key {
                    current = next;
                } else {
                    break;
                }
            }
        }
        if current == 0 {
            None
        } else {
            let node = &self.nodes[current];
            Some((node.key, node.value.as_ref().expect("live node")))
        }
    }

    /// Exact-match lookup.
    pub fn get(&self, key: u64) -> Option<&V> {
        match self.search(key) {
            Some((found, value)) if found == key => Some(value),
            _ => None,
        }
    }

    pub fn insert(&mut self, key: u64, value: V) -> Result<(), SkiplistError> {
        let update = self.find_path(key);
        let candidate = self.nodes[update[0]].forward[0];
        if candidate != NIL && self.nodes[candidate].key == key {
            return Err(SkiplistError::DuplicateKey(key));
        }

        let new_level = self.random_level();
        if new_level > self.level {
            self.level = new_level;
        }

        let slot = match self.free_slots.pop() {
            Some(slot) => {
                self.nodes[slot] = Node {
                    key,
                    value: Some(value),
                    forward: vec![NIL; MAX_LEVEL],
                };
                slot
            }
            None => {
                self.nodes.push(Node {
                    key,
                    value: Some(value),
                    forward: vec![NIL; MAX_LEVEL],
                });
                self.nodes.len() - 1
            }
        };

        for lvl in 0..new_level {
            let pred = update[lvl];
            self.nodes[slot].forward[lvl] = self.nodes[pred].forward[lvl];
            self.nodes[pred].forward[lvl] = slot;
        }
        self.len += 1;
        Ok(())
    }

    pub fn remove(&mut self, key: u64) -> Result<V, SkiplistError> {
        let update = self.find_path(key);
        let target = self.nodes[update[0]].forward[0];
        if target == NIL || self.nodes[target].key != key {
            return Err(SkiplistError::KeyAbsent(key));
        }
        for lvl in 0..self.level {
            let pred = update[lvl];
            if self.nodes[pred].forward[lvl] == target {
                self.nodes[pred].forward[lvl] = self.nodes[target].forward[lvl];
            }
        }
        while self.level > 1 && self.nodes[0].forward[self.level - 1] == NIL {
            self.level -= 1;
        }
        let value = self.nodes[target].value.take().expect("live node");
        self.free_slots.push(target);
        self.len -= 1;
        Ok(value)
    }

    /// Level-0 walk in strictly increasing key order.
    pub fn iter(&self) -> SkipListIter<'_, V> {
        SkipListIter {
            list: self,
            current: self.nodes[0].forward[0],
        }
    }
}

pub struct SkipListIter<'a, V> {
    list: &'a SkipList<V>,
    current: usize,
}

impl<'a, V> Iterator for SkipListIter<'a, V> {
    type Item = (u64, &'a V);

    fn next(&mut self) -> Option<Self::Item> {
        if self.current == NIL {
            return None;
        }
        let node = &self.list.nodes[self.current];
        self.current = node.forward[0];
        Some((node.key, node.value.as_ref().expect("live node")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_search_is_none() {
        let list: SkipList<i32> = SkipList::new();
        assert!(list.search(0).is_none());
        assert!(list.search(u64::MAX).is_none());
    }

    #[test]
    fn predecessor_semantics() {
        let mut list = SkipList::with_seed(42);
        list.insert(5, "five").unwrap();
        list.insert(10, "ten").unwrap();
        assert_eq!(list.search(7).map(|(k, _)| k), Some(5));
        assert_eq!(list.search(10).map(|(k, _)| k), Some(10));
        assert_eq!(list.search(4), None);
        assert_eq!(list.search(u64::MAX).map(|(k, _)| k), Some(10));
    }

    #[test]
    fn insert_remove_search_round() {
        let mut list = SkipList::with_seed(7);
        list.insert(3, ()).unwrap();
        list.remove(3).unwrap();
        assert!(list.search(3).is_none());
        assert_eq!(list.remove(3).unwrap_err(), SkiplistError::KeyAbsent(3));
        list.insert(3, ()).unwrap();
        assert_eq!(
            list.insert(3, ()).unwrap_err(),
            SkiplistError::DuplicateKey(3)
        );
    }

    #[test]
    fn level0_order_is_strictly_increasing() {
        let mut list = SkipList::with_seed(9);
        for key in [9u64, 1, 7, 3, 5, 2, 8, 0, 6, 4] {
            list.insert(key, key as i32).unwrap();
        }
        let keys: Vec<u64> = list.iter().map(|(k, _)| k).collect();
        assert_eq!(keys, (0..10).collect::<Vec<u64>>());
        assert_eq!(list.len(), 10);
    }
}
