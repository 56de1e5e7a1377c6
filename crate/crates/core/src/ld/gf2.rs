use super::channel::Gf2;

/// A linear combination of message-bit variables over GF(2), stored as a
/// bitset over variable indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct LinearForm {
    words: Vec<u64>,
}

impl LinearForm {
    pub fn var(index: usize) -> Self {
        let mut words = vec![0; index / 64 + 1];
        words[index / 64] = 1 << (index % 64);
        Self { words }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn contains(&self, index: usize) -> bool {
        self.words
            .get(index / 64)
            .is_some_and(|w| w >> (index % 64) & 1 == 1)
    }

    pub fn lowest(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            (0..64)
                .filter(move |b| w >> b & 1 == 1)
                .map(move |b| i * 64 + b)
        })
    }

    /// Evaluates the form on concrete variable values.
    pub fn eval(&self, values: &[bool]) -> bool {
        self.ones().fold(false, |acc, i| acc ^ values[i])
    }
}

impl Gf2 for LinearForm {
    fn add_assign(&mut self, other: &Self) {
        if self.words.len() < other.words.len() {
            self.words.resize(other.words.len(), 0);
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }
}

/// Incremental Gaussian elimination over GF(2) with attached values.
///
/// Each stored row is reduced against all earlier rows, so a query reduced
/// row by row in insertion order never reintroduces an eliminated pivot.
#[derive(Debug, Clone, Default)]
pub struct Gf2System {
    rows: Vec<(LinearForm, usize, bool)>,
    conflicts: usize,
}

impl Gf2System {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Observations that contradicted earlier ones.
    pub fn conflicts(&self) -> usize {
        self.conflicts
    }

    fn reduce(&self, form: &LinearForm) -> (LinearForm, bool) {
        let mut f = form.clone();
        let mut v = false;
        for (row, pivot, value) in &self.rows {
            if f.contains(*pivot) {
                f.add_assign(row);
                v ^= value;
            }
        }
        (f, v)
    }

    /// Records the observation `form = value`. Returns whether it added rank.
    pub fn insert(&mut self, form: &LinearForm, value: bool) -> bool {
        let (f, v) = self.reduce(form);
        match f.lowest() {
            Some(pivot) => {
                self.rows.push((f, pivot, v ^ value));
                true
            }
            None => {
                if v != value {
                    self.conflicts += 1;
                }
                false
            }
        }
    }

    pub fn spans(&self, form: &LinearForm) -> bool {
        self.reduce(form).0.is_zero()
    }

    /// Value of `form` if it lies in the span of the observations.
    pub fn solve(&self, form: &LinearForm) -> Option<bool> {
        let (f, v) = self.reduce(form);
        f.is_zero().then_some(v)
    }
}
