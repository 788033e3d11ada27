//! Run-length storage for cell values in row-major order.

/// A maximal block of consecutive cells sharing one value.
#[derive(Debug, Clone, Copy)]
pub struct Run {
    pub value: f64,
    pub len: u64,
}

/// Cell values stored as runs. Adjacent runs never share the same bit
/// pattern, so the encoding of a given dense vector is unique.
#[derive(Debug, Clone, Default)]
pub struct Runs {
    runs: Vec<Run>,
    cells: u64,
}

impl Runs {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn zeros(cells: u64) -> Self {
        let mut r = Self::new();
        r.push(0.0, cells);
        r
    }

    pub fn from_dense(values: &[f64]) -> Self {
        let mut r = Self::new();
        for &v in values {
            r.push(v, 1);
        }
        r
    }

    pub fn push(&mut self, value: f64, len: u64) {
        if len == 0 {
            return;
        }
        self.cells += len;
        if let Some(last) = self.runs.last_mut() {
            if last.value.to_bits() == value.to_bits() {
                last.len += len;
                return;
            }
        }
        self.runs.push(Run { value, len });
    }

    pub fn cells(&self) -> u64 {
        self.cells
    }

    pub fn runs(&self) -> &[Run] {
        &self.runs
    }

    pub fn iter(&self) -> impl Iterator<Item = &Run> + '_ {
        self.runs.iter()
    }

    /// Expands to one value per cell.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.cells as usize);
        for r in &self.runs {
            out.extend(std::iter::repeat_n(r.value, r.len as usize));
        }
        out
    }

    /// Value of cell `index`, or `None` past the end.
    pub fn get(&self, index: u64) -> Option<f64> {
        let mut offset = 0;
        for r in &self.runs {
            if index < offset + r.len {
                return Some(r.value);
            }
            offset += r.len;
        }
        None
    }

    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> Runs {
        let mut out = Runs::new();
        for r in &self.runs {
            out.push(f(r.value), r.len);
        }
        out
    }

    /// Joint iteration over two encodings of equal cell count. Yields
    /// `(a, b, len)` blocks on which both sides are constant.
    pub fn zip<'a>(&'a self, other: &'a Runs) -> Zip<'a> {
        debug_assert_eq!(self.cells, other.cells);
        Zip {
            a: &self.runs,
            b: &other.runs,
            ia: 0,
            ib: 0,
            used_a: 0,
            used_b: 0,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.runs.iter().map(|r| r.value.abs()).fold(0.0, f64::max)
    }
}

impl PartialEq for Runs {
    fn eq(&self, other: &Self) -> bool {
        self.cells == other.cells && self.zip(other).all(|(a, b, _)| a == b)
    }
}

pub struct Zip<'a> {
    a: &'a [Run],
    b: &'a [Run],
    ia: usize,
    ib: usize,
    used_a: u64,
    used_b: u64,
}

impl Iterator for Zip<'_> {
    type Item = (f64, f64, u64);

    fn next(&mut self) -> Option<Self::Item> {
        let ra = self.a.get(self.ia)?;
        let rb = self.b.get(self.ib)?;
        let left_a = ra.len - self.used_a;
        let left_b = rb.len - self.used_b;
        let step = left_a.min(left_b);
        self.used_a += step;
        self.used_b += step;
        if self.used_a == ra.len {
            self.ia += 1;
            self.used_a = 0;
        }
        if self.used_b == rb.len {
            self.ib += 1;
            self.used_b = 0;
        }
        Some((ra.value, rb.value, step))
    }
}

/// Neumaier-compensated accumulator.
#[derive(Debug, Default, Clone, Copy)]
pub struct Sum {
    sum: f64,
    comp: f64,
}

impl Sum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}
