use std::collections::{HashMap, VecDeque};
use std::sync::Mutex;

use crate::state::Reply;

#[derive(Debug, Clone, PartialEq)]
pub enum JobState {
    Pending,
    Done(Reply),
}

/// Background computations keyed by a hash of the request, so resubmitting
/// the same request joins the existing job.
pub struct Jobs {
    capacity: usize,
    inner: Mutex<(HashMap<String, JobState>, VecDeque<String>)>,
}

impl Jobs {
    pub fn new(capacity: usize) -> Self {
        Self {
            capacity: capacity.max(1),
            inner: Mutex::new((HashMap::new(), VecDeque::new())),
        }
    }

    /// Registers a pending job; returns false if `id` already exists.
    pub fn start(&self, id: &str) -> bool {
        let mut guard = self.inner.lock().expect("job lock");
        let (map, order) = &mut *guard;
        if map.contains_key(id) {
            return false;
        }
        map.insert(id.to_owned(), JobState::Pending);
        order.push_back(id.to_owned());
        while order.len() > self.capacity {
            // never drop a job that is still running
            match order
                .iter()
                .position(|k| map.get(k) != Some(&JobState::Pending))
            {
                Some(i) => {
                    let old = order.remove(i).expect("index in range");
                    map.remove(&old);
                }
                None => break,
            }
        }
        true
    }

    pub fn finish(&self, id: &str, reply: Reply) {
        self.inner
            .lock()
            .expect("job lock")
            .0
            .insert(id.to_owned(), JobState::Done(reply));
    }

    pub fn get(&self, id: &str) -> Option<JobState> {
        self.inner.lock().expect("job lock").0.get(id).cloned()
    }
}
