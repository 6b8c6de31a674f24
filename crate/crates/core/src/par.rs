//! Fixed-partition parallel maps.
//!
//! Work is cut into chunks whose boundaries depend only on the input range, so
//! results (and any reductions done over them in order) are identical for any
//! thread count.

use std::ops::Range;

/// Split `r` into consecutive pieces of at most `chunk` elements.
pub fn chunks(r: Range<u64>, chunk: u64) -> Vec<Range<u64>> {
    assert!(chunk > 0);
    let mut out = Vec::new();
    let mut lo = r.start;
    while lo < r.end {
        let hi = lo.saturating_add(chunk).min(r.end);
        out.push(lo..hi);
        lo = hi;
    }
    out
}

/// Map every piece, returning results in piece order.
pub fn map_ordered<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.into_iter().map(f).collect()
    }
}

/// Neumaier-compensated sum of `xs` in iteration order.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
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

impl FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(it: I) -> Self {
        let mut s = KahanSum::default();
        for x in it {
            s.add(x);
        }
        s
    }
}

/// Compensated complex accumulator (independent sums for each part).
#[derive(Clone, Copy, Debug, Default)]
pub struct ComplexSum {
    pub re: KahanSum,
    pub im: KahanSum,
}

impl ComplexSum {
    pub fn add(&mut self, z: num_complex::Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re.value(), self.im.value())
    }
}
