//! Incremental row-echelon basis over GF(2) for bit vectors packed in `u64`s.

#[derive(Clone, Debug, Default)]
pub struct Gf2Basis {
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

fn bit(row: &[u64], i: usize) -> bool {
    (row[i / 64] >> (i % 64)) & 1 == 1
}

fn lowest_bit(row: &[u64]) -> Option<usize> {
    row.iter().enumerate().find(|(_, w)| **w != 0).map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
}

fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

impl Gf2Basis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `row` against the basis in place; the result is zero exactly
    /// when `row` lies in the span.
    pub fn reduce(&self, row: &mut [u64]) {
        for (r, &p) in self.rows.iter().zip(&self.pivots) {
            if bit(row, p) {
                xor_into(row, r);
            }
        }
    }

    pub fn contains(&self, row: &[u64]) -> bool {
        let mut v = row.to_vec();
        self.reduce(&mut v);
        v.iter().all(|&w| w == 0)
    }

    /// Adds `row` to the basis; returns `false` if it was already in the span.
    pub fn insert(&mut self, row: &[u64]) -> bool {
        let mut v = row.to_vec();
        self.reduce(&mut v);
        match lowest_bit(&v) {
            None => false,
            Some(p) => {
                self.rows.push(v);
                self.pivots.push(p);
                true
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn span_membership() {
        let mut b = Gf2Basis::new();
        assert!(b.insert(&[0b0110]));
        assert!(b.insert(&[0b0011]));
        assert!(!b.insert(&[0b0101]));
        assert_eq!(b.rank(), 2);
        assert!(b.contains(&[0b0101]));
        assert!(b.contains(&[0]));
        assert!(!b.contains(&[0b0001]));
    }

    #[test]
    fn multiword_rows() {
        let mut b = Gf2Basis::new();
        b.insert(&[1, 1 << 63]);
        b.insert(&[0, 1 << 63]);
        assert!(b.contains(&[1, 0]));
        assert!(!b.contains(&[2, 0]));
    }
}
