use crate::Scalar;

/// Causal history of a sampled signal, read back at a fixed (generally
/// non-integer) lag with linear interpolation. Before the first sample the
/// history is held at the first pushed value.
#[derive(Debug, Clone)]
pub struct DelayBuffer<T: Scalar> {
    data: Vec<T>,
    head: usize,
    count: usize,
    whole_steps: usize,
    frac: T,
    initial: Option<T>,
}

impl<T: Scalar> DelayBuffer<T> {
    /// Buffer for lag `delay` at sample period `dt`; holds `ceil(delay/dt) + 1` samples.
    pub fn new(delay: T, dt: T) -> Self {
        let steps = delay / dt;
        let whole = steps.floor();
        let whole_steps = whole.to_usize().unwrap_or(0);
        let capacity = steps.ceil().to_usize().unwrap_or(0) + 1;
        Self {
            data: vec![T::zero(); capacity],
            head: 0,
            count: 0,
            whole_steps,
            frac: steps - whole,
            initial: None,
        }
    }

    pub fn capacity(&self) -> usize {
        self.data.len()
    }

    pub fn push(&mut self, v: T) {
        if self.initial.is_none() {
            self.initial = Some(v);
        }
        self.head = (self.head + 1) % self.data.len();
        self.data[self.head] = v;
        self.count = (self.count + 1).min(self.data.len());
    }

    /// Sample `lag` pushes ago (0 = newest).
    fn back(&self, lag: usize) -> T {
        if lag >= self.count {
            return self.initial.unwrap_or_else(T::zero);
        }
        let n = self.data.len();
        self.data[(self.head + n - lag) % n]
    }

    /// Value `delay` seconds before the newest sample.
    pub fn delayed(&self) -> T {
        let a = self.back(self.whole_steps);
        if self.frac.is_zero() {
            return a;
        }
        let b = self.back(self.whole_steps + 1);
        a + (b - a) * self.frac
    }
}
