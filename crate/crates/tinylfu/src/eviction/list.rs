//! An O(1) recency list: a doubly-linked list over a slab of nodes with a
//! key index, used as the building block of every list-based policy.

use std::collections::HashMap;

use crate::Key;

const NIL: usize = usize::MAX;

#[derive(Clone, Debug)]
struct Node {
    key: Key,
    prev: usize,
    next: usize,
}

/// Keys ordered from most to least recently touched.
#[derive(Clone, Debug, Default)]
pub(crate) struct RecencyList {
    nodes: Vec<Node>,
    free: Vec<usize>,
    head: usize, // MRU
    tail: usize, // LRU
    index: HashMap<Key, usize>,
}

impl RecencyList {
    pub fn new() -> Self {
        RecencyList {
            nodes: Vec::new(),
            free: Vec::new(),
            head: NIL,
            tail: NIL,
            index: HashMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn contains(&self, key: Key) -> bool {
        self.index.contains_key(&key)
    }

    /// Inserts at the MRU end. The key must not already be present.
    pub fn push_mru(&mut self, key: Key) {
        debug_assert!(!self.contains(key));
        let slot = match self.free.pop() {
            Some(slot) => {
                self.nodes[slot] = Node { key, prev: NIL, next: self.head };
                slot
            }
            None => {
                self.nodes.push(Node { key, prev: NIL, next: self.head });
                self.nodes.len() - 1
            }
        };
        if self.head != NIL {
            self.nodes[self.head].prev = slot;
        } else {
            self.tail = slot;
        }
        self.head = slot;
        self.index.insert(key, slot);
    }

    fn unlink(&mut self, slot: usize) {
        let (prev, next) = (self.nodes[slot].prev, self.nodes[slot].next);
        if prev != NIL {
            self.nodes[prev].next = next;
        } else {
            self.head = next;
        }
        if next != NIL {
            self.nodes[next].prev = prev;
        } else {
            self.tail = prev;
        }
        self.free.push(slot);
    }

    /// Removes the key if present; returns whether it was.
    pub fn remove(&mut self, key: Key) -> bool {
        match self.index.remove(&key) {
            Some(slot) => {
                self.unlink(slot);
                true
            }
            None => false,
        }
    }

    pub fn peek_lru(&self) -> Option<Key> {
        (self.tail != NIL).then(|| self.nodes[self.tail].key)
    }

    pub fn pop_lru(&mut self) -> Option<Key> {
        let key = self.peek_lru()?;
        self.remove(key);
        Some(key)
    }

    pub fn move_to_mru(&mut self, key: Key) {
        if self.remove(key) {
            self.push_mru(key);
        }
    }

    /// Keys from most to least recent.
    pub fn keys_mru_to_lru(&self) -> Vec<Key> {
        let mut out = Vec::with_capacity(self.len());
        let mut slot = self.head;
        while slot != NIL {
            out.push(self.nodes[slot].key);
            slot = self.nodes[slot].next;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maintains_recency_order() {
        let mut list = RecencyList::new();
        for raw in [1u64, 2, 3] {
            list.push_mru(Key(raw));
        }
        assert_eq!(list.peek_lru(), Some(Key(1)));
        list.move_to_mru(Key(1));
        assert_eq!(list.peek_lru(), Some(Key(2)));
        assert_eq!(list.keys_mru_to_lru(), vec![Key(1), Key(3), Key(2)]);
    }

    #[test]
    fn remove_and_reuse_slots() {
        let mut list = RecencyList::new();
        for raw in 0..10 {
            list.push_mru(Key(raw));
        }
        assert!(list.remove(Key(5)));
        assert!(!list.remove(Key(5)));
        list.push_mru(Key(100));
        assert_eq!(list.len(), 10);
        assert_eq!(list.pop_lru(), Some(Key(0)));
        assert_eq!(list.len(), 9);
    }

    #[test]
    fn empty_list_behaves() {
        let mut list = RecencyList::new();
        assert_eq!(list.peek_lru(), None);
        assert_eq!(list.pop_lru(), None);
        assert!(!list.contains(Key(1)));
        list.move_to_mru(Key(1)); // absent: no-op
        assert!(list.is_empty());
    }
}
