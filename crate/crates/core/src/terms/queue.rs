use alloc::collections::{BTreeSet, VecDeque};

use super::Value;

/// Channel content: a FIFO sequence of values. `ε` is the empty queue.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Queue(VecDeque<Value>);

impl Queue {
    pub const fn new() -> Self {
        Queue(VecDeque::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, v: Value) {
        self.0.push_back(v);
    }

    pub fn head(&self) -> Option<&Value> {
        self.0.front()
    }

    /// The queue without its head; `None` on `ε`.
    pub fn tail(&self) -> Option<Queue> {
        if self.0.is_empty() {
            return None;
        }
        let mut rest = self.0.clone();
        rest.pop_front();
        Some(Queue(rest))
    }

    pub fn pop(&mut self) -> Option<Value> {
        self.0.pop_front()
    }

    /// `D_k`, 1-based.
    pub fn get(&self, k: usize) -> Option<&Value> {
        k.checked_sub(1).and_then(|i| self.0.get(i))
    }

    pub fn iter(&self) -> impl Iterator<Item = &Value> {
        self.0.iter()
    }

    /// The set of `k`-th components of the tuples in this queue (1-based).
    /// `None` if some element is not a tuple with at least `k` components.
    pub fn component_set(&self, k: usize) -> Option<BTreeSet<Value>> {
        self.0
            .iter()
            .map(|v| v.as_tuple().and_then(|t| t.get(k.checked_sub(1)?)).cloned())
            .collect()
    }
}

impl FromIterator<Value> for Queue {
    fn from_iter<I: IntoIterator<Item = Value>>(iter: I) -> Self {
        Queue(iter.into_iter().collect())
    }
}
