use std::collections::{HashMap, VecDeque};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex, OnceLock};

/// Bounded map of computed values with per-key deduplication: concurrent
/// requests for one key run the computation once and all receive its result.
/// The oldest key is evicted once `capacity` is exceeded.
pub struct ComputeCache<V> {
    capacity: usize,
    inner: Mutex<Slots<V>>,
    computations: AtomicUsize,
}

struct Slots<V> {
    cells: HashMap<String, Arc<OnceLock<V>>>,
    order: VecDeque<String>,
}

impl<V: Clone> ComputeCache<V> {
    pub fn new(capacity: usize) -> Self {
        Self {
            capacity: capacity.max(1),
            inner: Mutex::new(Slots {
                cells: HashMap::new(),
                order: VecDeque::new(),
            }),
            computations: AtomicUsize::new(0),
        }
    }

    fn cell(&self, key: &str) -> Arc<OnceLock<V>> {
        let mut slots = self.inner.lock().expect("cache lock");
        if let Some(cell) = slots.cells.get(key) {
            return cell.clone();
        }
        let cell = Arc::new(OnceLock::new());
        slots.cells.insert(key.to_owned(), cell.clone());
        slots.order.push_back(key.to_owned());
        while slots.order.len() > self.capacity {
            if let Some(old) = slots.order.pop_front() {
                slots.cells.remove(&old);
            }
        }
        cell
    }

    /// Blocks while another caller computes the same key.
    pub fn get_or_compute(&self, key: &str, compute: impl FnOnce() -> V) -> V {
        self.cell(key)
            .get_or_init(|| {
                self.computations.fetch_add(1, Ordering::Relaxed);
                compute()
            })
            .clone()
    }

    pub fn get(&self, key: &str) -> Option<V> {
        let slots = self.inner.lock().expect("cache lock");
        slots.cells.get(key).and_then(|c| c.get().cloned())
    }

    pub fn len(&self) -> usize {
        self.inner.lock().expect("cache lock").cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of computations actually run (cache misses).
    pub fn computations(&self) -> usize {
        self.computations.load(Ordering::Relaxed)
    }
}
