//! Wall-clock and node-count limits for the exhaustive searches.

use std::time::{Duration, Instant};

#[derive(Debug, Clone, Copy)]
pub struct Budget {
    deadline: Option<Instant>,
    max_nodes: Option<u64>,
    nodes: u64,
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget {
            deadline: None,
            max_nodes: None,
            nodes: 0,
        }
    }

    pub fn seconds(secs: f64) -> Self {
        Budget::unlimited().with_time(Duration::from_secs_f64(secs))
    }

    pub fn with_time(mut self, limit: Duration) -> Self {
        self.deadline = Some(Instant::now() + limit);
        self
    }

    pub fn with_nodes(mut self, max_nodes: u64) -> Self {
        self.max_nodes = Some(max_nodes);
        self
    }

    /// Counts one search node. Returns `false` once either limit is hit.
    #[inline]
    pub fn tick(&mut self) -> bool {
        self.nodes += 1;
        if let Some(max) = self.max_nodes {
            if self.nodes > max {
                return false;
            }
        }
        // Checking the clock on every node is measurable; sample it.
        if self.nodes & 0x3ff == 0 {
            if let Some(deadline) = self.deadline {
                if Instant::now() >= deadline {
                    return false;
                }
            }
        }
        true
    }

    pub fn expired(&self) -> bool {
        self.max_nodes.is_some_and(|m| self.nodes > m)
            || self.deadline.is_some_and(|d| Instant::now() >= d)
    }

    pub fn nodes(&self) -> u64 {
        self.nodes
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::unlimited()
    }
}
