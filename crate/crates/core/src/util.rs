//! Small numeric helpers shared across modules: compensated summation,
//! binomial tables, and subset enumeration.

use num_complex::Complex64;

/// Kahan–Babuška compensated accumulator for `f64`.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Compensated accumulator for complex values (componentwise Kahan).
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanComplex {
    re: KahanSum,
    im: KahanSum,
}

impl KahanComplex {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// Exact binomial coefficient as `f64`; values used here stay far below 2^53.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

/// Smallest power of two >= `n` (n >= 1).
pub fn next_pow2(n: usize) -> usize {
    n.next_power_of_two()
}

/// All size-`s` index subsets of `0..n` in lexicographic order of the
/// sorted tuples, packed into fixed-width arrays (unused slots zero).
pub fn combinations(n: usize, s: usize) -> Vec<[u16; 4]> {
    assert!(s <= 4);
    let mut out = Vec::new();
    if s == 0 {
        out.push([0u16; 4]);
        return out;
    }
    if s > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..s).collect();
    loop {
        let mut packed = [0u16; 4];
        for (slot, &i) in packed.iter_mut().zip(idx.iter()) {
            *slot = i as u16;
        }
        out.push(packed);
        // advance to the next combination
        let mut pos = s;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if idx[pos] != pos + n - s {
                break;
            }
        }
        idx[pos] += 1;
        for j in pos + 1..s {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Relative closeness with an absolute floor for near-zero values.
pub fn rel_close(a: f64, b: f64, rel: f64, floor: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(floor)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_recovers_cancellation() {
        let mut k = KahanSum::new();
        k.add(1e16);
        for _ in 0..10 {
            k.add(1.0);
        }
        k.add(-1e16);
        assert_eq!(k.value(), 10.0);
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(50, 4), 230300.0);
        assert_eq!(binomial(4, 0), 1.0);
        assert_eq!(binomial(3, 5), 0.0);
        assert_eq!(binomial(70, 4), 916895.0);
    }

    #[test]
    fn combinations_lex_order_and_count() {
        let c = combinations(5, 3);
        assert_eq!(c.len(), 10);
        assert_eq!(c[0], [0, 1, 2, 0]);
        assert_eq!(c[1], [0, 1, 3, 0]);
        assert_eq!(c[9], [2, 3, 4, 0]);
        assert_eq!(combinations(4, 4).len(), 1);
        assert_eq!(combinations(3, 4).len(), 0);
        assert_eq!(combinations(6, 0).len(), 1);
    }
}
