//! Dense bit-packed matrices over GF(2), row-major, used at analysis
//! scale (a few thousand rows) for transition-matrix oracles and rank
//! computations.

#[derive(Clone, PartialEq, Eq)]
pub struct Gf2Matrix {
    rows: usize,
    cols: usize,
    row_limbs: usize,
    bits: Vec<u64>,
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Gf2Matrix {
        let row_limbs = cols.div_ceil(64);
        Gf2Matrix {
            rows,
            cols,
            row_limbs,
            bits: vec![0; rows * row_limbs],
        }
    }

    pub fn identity(n: usize) -> Gf2Matrix {
        let mut m = Gf2Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        (self.bits[r * self.row_limbs + c / 64] >> (c % 64)) & 1 != 0
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        debug_assert!(r < self.rows && c < self.cols);
        let limb = &mut self.bits[r * self.row_limbs + c / 64];
        if v {
            *limb |= 1 << (c % 64);
        } else {
            *limb &= !(1 << (c % 64));
        }
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.bits[r * self.row_limbs..(r + 1) * self.row_limbs]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.bits[r * self.row_limbs..(r + 1) * self.row_limbs]
    }

    pub fn transpose(&self) -> Gf2Matrix {
        let mut t = Gf2Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for l in 0..self.row_limbs {
                let mut limb = self.bits[r * self.row_limbs + l];
                while limb != 0 {
                    let b = limb.trailing_zeros() as usize;
                    limb &= limb - 1;
                    t.set(l * 64 + b, r, true);
                }
            }
        }
        t
    }

    /// y = M x with x, y packed as limb slices (bit i of the vector at
    /// bit i%64 of limb i/64).
    pub fn mat_vec(&self, x: &[u64]) -> Vec<u64> {
        debug_assert_eq!(x.len(), self.row_limbs);
        let mut y = vec![0u64; self.rows.div_ceil(64)];
        for r in 0..self.rows {
            let mut acc = 0u64;
            for (l, &xl) in x.iter().enumerate() {
                acc ^= self.bits[r * self.row_limbs + l] & xl;
            }
            if acc.count_ones() & 1 == 1 {
                y[r / 64] |= 1 << (r % 64);
            }
        }
        y
    }

    /// Rank by Gaussian elimination on a scratch copy of the rows.
    pub fn rank(&self) -> usize {
        let mut basis = RowBasis::new(self.cols);
        for r in 0..self.rows {
            basis.insert(self.row(r));
        }
        basis.rank()
    }
}

impl std::fmt::Debug for Gf2Matrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Gf2Matrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows.min(40) {
            for c in 0..self.cols.min(80) {
                write!(f, "{}", if self.get(r, c) { '1' } else { '0' })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Incremental row-echelon basis: rows are inserted one at a time and
/// reduced against the pivots found so far, so a rank deficiency is
/// detected the moment the offending row arrives.
pub struct RowBasis {
    row_limbs: usize,
    // pivot bit index -> reduced row owning that pivot
    pivots: Vec<Option<Vec<u64>>>,
    rank: usize,
}

impl RowBasis {
    pub fn new(cols: usize) -> RowBasis {
        RowBasis {
            row_limbs: cols.div_ceil(64),
            pivots: vec![None; cols],
            rank: 0,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Insert a row; returns true if it was independent of the basis.
    pub fn insert(&mut self, row: &[u64]) -> bool {
        debug_assert_eq!(row.len(), self.row_limbs);
        let mut r = row.to_vec();
        while let Some(p) = leading_bit(&r) {
            match &self.pivots[p] {
                Some(existing) => {
                    for (a, b) in r.iter_mut().zip(existing) {
                        *a ^= b;
                    }
                }
                None => {
                    self.pivots[p] = Some(r);
                    self.rank += 1;
                    return true;
                }
            }
        }
        false
    }
}

fn leading_bit(row: &[u64]) -> Option<usize> {
    for (i, &l) in row.iter().enumerate().rev() {
        if l != 0 {
            return Some(i * 64 + 63 - l.leading_zeros() as usize);
        }
    }
    None
}
