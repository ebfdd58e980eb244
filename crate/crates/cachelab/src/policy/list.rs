//! Arena-backed doubly-linked list of chunk ids.
//!
//! Node handles stay valid until the node is removed, so directories can
//! map a chunk straight to its node for O(1) middle removal. Front/back
//! conventions are up to the caller (LRU lists put the MRU entry at the
//! front; CLOCK lists treat the front as the hand position and rotate by
//! moving the front to the back).

use crate::kernel::ChunkId;

#[derive(Clone, Debug)]
struct Node {
    chunk: ChunkId,
    prev: Option<usize>,
    next: Option<usize>,
}

#[derive(Clone, Debug, Default)]
pub(crate) struct ChunkList {
    nodes: Vec<Node>,
    free: Vec<usize>,
    head: Option<usize>,
    tail: Option<usize>,
    len: usize,
}

impl ChunkList {
    pub fn new() -> Self {
        ChunkList::default()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn chunk(&self, handle: usize) -> ChunkId {
        self.nodes[handle].chunk
    }

    pub fn back(&self) -> Option<usize> {
        self.tail
    }

    pub fn prev(&self, handle: usize) -> Option<usize> {
        self.nodes[handle].prev
    }

    fn alloc(&mut self, chunk: ChunkId) -> usize {
        match self.free.pop() {
            Some(idx) => {
                self.nodes[idx] = Node { chunk, prev: None, next: None };
                idx
            }
            None => {
                self.nodes.push(Node { chunk, prev: None, next: None });
                self.nodes.len() - 1
            }
        }
    }

    pub fn push_front(&mut self, chunk: ChunkId) -> usize {
        let idx = self.alloc(chunk);
        self.nodes[idx].next = self.head;
        match self.head {
            Some(h) => self.nodes[h].prev = Some(idx),
            None => self.tail = Some(idx),
        }
        self.head = Some(idx);
        self.len += 1;
        idx
    }

    pub fn push_back(&mut self, chunk: ChunkId) -> usize {
        let idx = self.alloc(chunk);
        self.nodes[idx].prev = self.tail;
        match self.tail {
            Some(t) => self.nodes[t].next = Some(idx),
            None => self.head = Some(idx),
        }
        self.tail = Some(idx);
        self.len += 1;
        idx
    }

    /// Unlinks `handle` and returns its chunk. The handle becomes invalid.
    pub fn remove(&mut self, handle: usize) -> ChunkId {
        let Node { chunk, prev, next } = self.nodes[handle].clone();
        match prev {
            Some(p) => self.nodes[p].next = next,
            None => self.head = next,
        }
        match next {
            Some(n) => self.nodes[n].prev = prev,
            None => self.tail = prev,
        }
        self.free.push(handle);
        self.len -= 1;
        chunk
    }

    pub fn pop_front(&mut self) -> Option<(usize, ChunkId)> {
        let h = self.head?;
        let chunk = self.remove(h);
        Some((h, chunk))
    }

    pub fn pop_back(&mut self) -> Option<(usize, ChunkId)> {
        let t = self.tail?;
        let chunk = self.remove(t);
        Some((t, chunk))
    }

    /// Front-to-back iteration, cheap enough for debug validation.
    #[cfg(test)]
    pub fn iter(&self) -> Iter<'_> {
        Iter { list: self, cursor: self.head }
    }
}

#[cfg(test)]
pub(crate) struct Iter<'a> {
    list: &'a ChunkList,
    cursor: Option<usize>,
}

#[cfg(test)]
impl Iterator for Iter<'_> {
    type Item = (usize, ChunkId);

    fn next(&mut self) -> Option<Self::Item> {
        let idx = self.cursor?;
        self.cursor = self.list.nodes[idx].next;
        Some((idx, self.list.nodes[idx].chunk))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chunks(list: &ChunkList) -> Vec<u64> {
        list.iter().map(|(_, c)| c.0).collect()
    }

    #[test]
    fn push_and_pop_both_ends() {
        let mut l = ChunkList::new();
        l.push_back(ChunkId(1));
        l.push_back(ChunkId(2));
        l.push_front(ChunkId(0));
        assert_eq!(chunks(&l), vec![0, 1, 2]);
        assert_eq!(l.pop_front().unwrap().1, ChunkId(0));
        assert_eq!(l.pop_back().unwrap().1, ChunkId(2));
        assert_eq!(l.len(), 1);
    }

    #[test]
    fn middle_removal_relinks() {
        let mut l = ChunkList::new();
        let _a = l.push_back(ChunkId(1));
        let b = l.push_back(ChunkId(2));
        let _c = l.push_back(ChunkId(3));
        assert_eq!(l.remove(b), ChunkId(2));
        assert_eq!(chunks(&l), vec![1, 3]);
        // Freed slot is reused.
        let d = l.push_back(ChunkId(4));
        assert_eq!(d, b);
        assert_eq!(chunks(&l), vec![1, 3, 4]);
    }

    #[test]
    fn empty_list_pops_none() {
        let mut l = ChunkList::new();
        assert!(l.pop_front().is_none());
        assert!(l.pop_back().is_none());
        assert!(l.is_empty());
    }
}
