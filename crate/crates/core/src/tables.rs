//! Mixed-radix indexing for conditional tables.
//!
//! A joint configuration of parents is flattened with the first-listed
//! parent most significant: with parents `[A, B]` of sizes 2 and 3, the row
//! index of `(a, b)` is `a * 3 + b`, so rows run (0,0), (0,1), (0,2), (1,0),
//! (1,1), (1,2). Every table in this crate uses this rule.

/// Number of joint configurations. Panics on overflow; model sizes are
/// bounded by the solver's enumeration cap long before this matters.
pub fn config_count(sizes: &[usize]) -> usize {
    sizes
        .iter()
        .try_fold(1usize, |acc, &s| acc.checked_mul(s))
        .expect("configuration count overflows usize")
}

/// Flattens `states` (one per size, in the same order) into a row index.
pub fn rank(sizes: &[usize], states: &[usize]) -> usize {
    debug_assert_eq!(sizes.len(), states.len());
    let mut idx = 0;
    for (&size, &state) in sizes.iter().zip(states) {
        debug_assert!(state < size);
        idx = idx * size + state;
    }
    idx
}

/// Inverse of [`rank`].
pub fn unrank(sizes: &[usize], mut idx: usize) -> Vec<usize> {
    let mut states = vec![0; sizes.len()];
    for (pos, &size) in sizes.iter().enumerate().rev() {
        states[pos] = idx % size;
        idx /= size;
    }
    debug_assert_eq!(idx, 0);
    states
}

/// Iterates all configurations in row order (an odometer with the last
/// position fastest).
pub fn configs(sizes: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let total = config_count(sizes);
    (0..total).map(move |i| unrank(sizes, i))
}

/// Allocation-free odometer over the same configurations as [`configs`].
/// Yields nothing when some size is zero, one empty configuration when
/// `sizes` is empty.
pub struct Odometer {
    sizes: Vec<usize>,
    digits: Vec<usize>,
    exhausted: bool,
}

impl Odometer {
    pub fn new(sizes: Vec<usize>) -> Self {
        let exhausted = sizes.iter().any(|&s| s == 0);
        let digits = vec![0; sizes.len()];
        Odometer {
            sizes,
            digits,
            exhausted,
        }
    }

    pub fn exhausted(&self) -> bool {
        self.exhausted
    }

    pub fn digits(&self) -> &[usize] {
        &self.digits
    }

    /// Steps to the next configuration; returns false once all have been
    /// visited (the current digits are then unspecified).
    pub fn advance(&mut self) -> bool {
        if self.exhausted {
            return false;
        }
        for k in (0..self.digits.len()).rev() {
            self.digits[k] += 1;
            if self.digits[k] < self.sizes[k] {
                return true;
            }
            self.digits[k] = 0;
        }
        self.exhausted = true;
        false
    }
}
