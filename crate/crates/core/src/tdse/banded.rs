//! Complex band matrices with an unpivoted LU factorization.
//!
//! The Crank-Nicolson matrices `1 + i dt H / 2` have a positive definite
//! Hermitian part, so elimination without pivoting is stable and keeps the
//! factors inside the original band.

use num_complex::Complex64;

/// Square matrix with `lower` sub- and `upper` super-diagonals, stored row by
/// row as `lower + upper + 1` entries centred on the diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct BandMatrix {
    n: usize,
    lower: usize,
    upper: usize,
    data: Vec<Complex64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, lower: usize, upper: usize) -> Self {
        Self { n, lower, upper, data: vec![Complex64::new(0.0, 0.0); n * (lower + upper + 1)] }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    fn width(&self) -> usize {
        self.lower + self.upper + 1
    }

    fn in_band(&self, i: usize, j: usize) -> bool {
        j + self.lower >= i && j <= i + self.upper && i < self.n && j < self.n
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(self.in_band(i, j), "({i}, {j}) outside the band");
        i * self.width() + (j + self.lower - i)
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        if self.in_band(i, j) {
            self.data[self.slot(i, j)]
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        let k = self.slot(i, j);
        self.data[k] = value;
    }

    pub fn add(&mut self, i: usize, j: usize, value: Complex64) {
        let k = self.slot(i, j);
        self.data[k] += value;
    }

    /// `out = self * x`.
    pub fn mul_vec_into(&self, x: &[Complex64], out: &mut [Complex64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(out.len(), self.n);
        let (lo, up, w) = (self.lower, self.upper, self.width());
        let general = |i: usize| -> Complex64 {
            let row = &self.data[i * w..(i + 1) * w];
            let j0 = i.saturating_sub(lo);
            let j1 = (i + up).min(self.n - 1);
            (j0..=j1).map(|j| row[j + lo - i] * x[j]).sum()
        };
        if self.n <= lo + up {
            out.iter_mut().enumerate().for_each(|(i, o)| *o = general(i));
            return;
        }
        for i in (0..lo).chain(self.n - up..self.n) {
            out[i] = general(i);
        }
        // interior rows see the full band; windows of x line up with rows
        let rows = self.data[lo * w..(self.n - up) * w].chunks_exact(w);
        for ((row, window), o) in rows.zip(x.windows(w)).zip(&mut out[lo..self.n - up]) {
            *o = row.iter().zip(window).map(|(a, b)| a * b).sum();
        }
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.n];
        self.mul_vec_into(x, &mut out);
        out
    }

    /// Doolittle factorization in place; `None` on a vanishing pivot.
    pub fn factor(mut self) -> Option<BandLu> {
        let (n, lower, upper) = (self.n, self.lower, self.upper);
        for k in 0..n {
            let pivot = self.get(k, k);
            if pivot.norm() == 0.0 || !pivot.is_finite() {
                return None;
            }
            let inv = pivot.inv();
            for i in k + 1..(k + lower + 1).min(n) {
                let slot = self.slot(i, k);
                let l = self.data[slot] * inv;
                self.data[slot] = l;
                for j in k + 1..(k + upper + 1).min(n) {
                    let u = self.get(k, j);
                    self.add(i, j, -l * u);
                }
            }
        }
        let inv_diag = (0..n).map(|i| self.get(i, i).inv()).collect();
        Some(BandLu { m: self, inv_diag })
    }
}

/// Unit lower and upper triangular factors sharing the band storage.
#[derive(Debug, Clone)]
pub struct BandLu {
    m: BandMatrix,
    inv_diag: Vec<Complex64>,
}

impl BandLu {
    pub fn solve_in_place(&self, b: &mut [Complex64]) {
        let m = &self.m;
        assert_eq!(b.len(), m.n);
        if m.lower == 3 && m.upper == 3 && m.n > 6 {
            self.solve_width_seven(b);
            return;
        }
        let (n, lo, up, w) = (m.n, m.lower, m.upper, m.width());
        for (i, row) in m.data.chunks_exact(w).enumerate() {
            let j0 = i.saturating_sub(lo);
            b[i] = row[j0 + lo - i..lo].iter().zip(&b[j0..i]).fold(b[i], |acc, (l, y)| acc - l * y);
        }
        for (i, row) in m.data.chunks_exact(w).enumerate().rev() {
            let j1 = (i + up).min(n - 1);
            let acc = row[lo + 1..lo + 1 + (j1 - i)].iter().zip(&b[i + 1..=j1]).fold(b[i], |acc, (u, y)| acc - u * y);
            b[i] = acc * self.inv_diag[i];
        }
    }

    /// Unrolled substitution for the three-diagonal-wide band used by the
    /// propagator, which dominates its run time.
    fn solve_width_seven(&self, b: &mut [Complex64]) {
        let m = &self.m;
        let n = m.n;
        let rows: &[[Complex64; 7]] = {
            let (chunks, rest) = m.data.as_chunks::<7>();
            debug_assert!(rest.is_empty());
            chunks
        };
        for i in 1..3 {
            for j in 0..i {
                let l = rows[i][j + 3 - i];
                b[i] -= l * b[j];
            }
        }
        for i in 3..n {
            let r = &rows[i];
            b[i] = b[i] - r[0] * b[i - 3] - r[1] * b[i - 2] - r[2] * b[i - 1];
        }
        for i in (n - 3..n).rev() {
            let mut acc = b[i];
            for j in i + 1..n {
                acc -= rows[i][j + 3 - i] * b[j];
            }
            b[i] = acc * self.inv_diag[i];
        }
        for i in (0..n - 3).rev() {
            let r = &rows[i];
            b[i] = (b[i] - r[4] * b[i + 1] - r[5] * b[i + 2] - r[6] * b[i + 3]) * self.inv_diag[i];
        }
    }
}
