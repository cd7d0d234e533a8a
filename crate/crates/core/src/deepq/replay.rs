use std::sync::Arc;

use rand::Rng;

/// Network input for one decision: stacked frames shared between
/// neighbouring transitions, plus normalized auxiliary scalars.
#[derive(Debug, Clone, PartialEq)]
pub struct StateInput {
    /// Oldest first; each frame is channel-planar bytes.
    pub frames: Vec<Arc<Vec<u8>>>,
    pub aux: Vec<f32>,
}

impl StateInput {
    /// Appends the network input, bytes scaled to [0, 1].
    pub fn write_pixels(&self, out: &mut Vec<f32>) {
        for frame in &self.frames {
            out.extend(frame.iter().map(|&b| b as f32 * (1.0 / 255.0)));
        }
    }
}

/// Replay element. A terminal transition has no next state.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub state: Arc<StateInput>,
    pub action: usize,
    pub reward: f32,
    pub next: Option<Arc<StateInput>>,
}

impl Transition {
    pub fn terminal(&self) -> bool {
        self.next.is_none()
    }
}

/// Fixed-capacity ring that overwrites its oldest element when full.
#[derive(Debug, Clone)]
pub struct ReplayBuffer<X> {
    items: Vec<X>,
    capacity: usize,
    cursor: usize,
}

impl<X> ReplayBuffer<X> {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "replay capacity must be positive");
        ReplayBuffer { items: Vec::with_capacity(capacity.min(1 << 16)), capacity, cursor: 0 }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Slot the next push writes to.
    pub fn cursor(&self) -> usize {
        self.cursor
    }

    pub fn push(&mut self, item: X) {
        if self.items.len() < self.capacity {
            self.items.push(item);
        } else {
            self.items[self.cursor] = item;
        }
        self.cursor = (self.cursor + 1) % self.capacity;
    }

    pub fn get(&self, slot: usize) -> Option<&X> {
        self.items.get(slot)
    }

    /// Contents from oldest to newest.
    pub fn iter_ordered(&self) -> impl Iterator<Item = &X> {
        let split = if self.items.len() < self.capacity { 0 } else { self.cursor };
        self.items[split..].iter().chain(&self.items[..split])
    }

    /// `batch` distinct slots drawn uniformly. Panics if `batch > len`.
    pub fn sample_slots<R: Rng>(&self, batch: usize, rng: &mut R) -> Vec<usize> {
        rand::seq::index::sample(rng, self.items.len(), batch).into_vec()
    }

    pub fn sample<R: Rng>(&self, batch: usize, rng: &mut R) -> Vec<&X> {
        self.sample_slots(batch, rng).into_iter().map(|i| &self.items[i]).collect()
    }
}
