//! Sparse linear algebra over F_q: incremental row echelon forms, normal
//! forms modulo a row space, kernels.

use crate::fq::Gf;

/// Sparse vector: sorted (column, nonzero value) pairs.
pub type SparseVec = Vec<(usize, u32)>;

/// A row space in echelon form. Every stored row has leading entry 1 in its
/// pivot column; columns are ordered by index.
#[derive(Clone, Debug)]
pub struct Echelon {
    f: Gf,
    ncols: usize,
    rows: Vec<Option<SparseVec>>,
    rank: usize,
}

impl Echelon {
    pub fn new(f: &Gf, ncols: usize) -> Echelon {
        Echelon { f: f.clone(), ncols, rows: vec![None; ncols], rank: 0 }
    }
    pub fn ncols(&self) -> usize {
        self.ncols
    }
    pub fn rank(&self) -> usize {
        self.rank
    }
    pub fn is_pivot(&self, c: usize) -> bool {
        self.rows[c].is_some()
    }
    /// Columns without a pivot: a basis of the quotient.
    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.ncols).filter(|&c| self.rows[c].is_none()).collect()
    }

    fn reduce_dense(&self, x: &mut [u32], from: usize) {
        let f = &self.f;
        for c in from..self.ncols {
            if x[c] == 0 {
                continue;
            }
            if let Some(row) = &self.rows[c] {
                let a = x[c];
                for &(j, b) in row {
                    x[j] = f.sub(x[j], f.mul(a, b));
                }
            }
        }
    }

    /// The representative of x modulo the row space supported on free columns.
    pub fn normal_form(&self, x: &SparseVec) -> SparseVec {
        let mut d = vec![0u32; self.ncols];
        for &(j, a) in x {
            d[j] = self.f.add(d[j], a);
        }
        let from = x.iter().map(|e| e.0).min().unwrap_or(self.ncols);
        self.reduce_dense(&mut d, from);
        to_sparse(&d)
    }

    /// Add a row; returns false if it was already in the span.
    pub fn insert(&mut self, x: &SparseVec) -> bool {
        let nf = self.normal_form(x);
        let Some(&(c, a)) = nf.first() else { return false };
        let ai = self.f.inv(a).unwrap();
        let row: SparseVec = nf.iter().map(|&(j, b)| (j, self.f.mul(ai, b))).collect();
        self.rows[c] = Some(row);
        self.rank += 1;
        true
    }
}

pub fn to_sparse(d: &[u32]) -> SparseVec {
    d.iter().enumerate().filter(|e| *e.1 != 0).map(|(j, &a)| (j, a)).collect()
}

pub fn to_dense(x: &SparseVec, n: usize) -> Vec<u32> {
    let mut d = vec![0; n];
    for &(j, a) in x {
        d[j] = a;
    }
    d
}

/// Basis of {x : x M_i = 0 for all i}, with each M_i given by its rows
/// (M_i is n × m_i, x a row vector of length n).
pub fn left_kernel(f: &Gf, n: usize, ms: &[Vec<SparseVec>]) -> Vec<Vec<u32>> {
    // columns of the stacked matrix [M_1 | M_2 | ...] become rows of the transpose
    let mut cols: Vec<SparseVec> = vec![];
    for m in ms {
        let width = m.iter().flat_map(|r| r.iter().map(|e| e.0 + 1)).max().unwrap_or(0);
        let mut t: Vec<SparseVec> = vec![vec![]; width];
        for (i, row) in m.iter().enumerate() {
            for &(j, a) in row {
                t[j].push((i, a));
            }
        }
        cols.extend(t);
    }
    let mut ech = Echelon::new(f, n);
    for c in &cols {
        ech.insert(c);
    }
    // kernel of the map x ↦ (x·c)_c; fully reduce the echelon rows, then read
    // off one kernel vector per free column
    let piv: Vec<usize> = (0..n).filter(|&c| ech.is_pivot(c)).collect();
    let mut reduced: Vec<(usize, Vec<u32>)> = vec![];
    for &c in piv.iter().rev() {
        let mut d = to_dense(ech.rows[c].as_ref().unwrap(), n);
        for (pc, r) in &reduced {
            let a = d[*pc];
            if a != 0 {
                for j in 0..n {
                    d[j] = f.sub(d[j], f.mul(a, r[j]));
                }
            }
        }
        reduced.push((c, d));
    }
    let free = ech.free_columns();
    free.iter()
        .map(|&fc| {
            let mut v = vec![0u32; n];
            v[fc] = 1;
            for (pc, r) in &reduced {
                v[*pc] = f.neg(r[fc]);
            }
            v
        })
        .collect()
}

/// Rank of a set of vectors.
pub fn rank(f: &Gf, n: usize, rows: &[SparseVec]) -> usize {
    let mut e = Echelon::new(f, n);
    rows.iter().filter(|r| e.insert(r)).count()
}

/// Determinant of a dense square matrix over F_q.
pub fn det(f: &Gf, m: &[Vec<u32>]) -> u32 {
    let n = m.len();
    let mut a: Vec<Vec<u32>> = m.to_vec();
    let mut d = 1u32;
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| a[i][c] != 0) else { return 0 };
        if p != c {
            a.swap(p, c);
            d = f.neg(d);
        }
        d = f.mul(d, a[c][c]);
        let inv = f.inv(a[c][c]).unwrap();
        for i in c + 1..n {
            let fac = f.mul(a[i][c], inv);
            if fac != 0 {
                for j in c..n {
                    let s = f.mul(fac, a[c][j]);
                    a[i][j] = f.sub(a[i][j], s);
                }
            }
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fq::gf_q;

    #[test]
    fn kernel_and_normal_form() {
        let f = gf_q(3).unwrap();
        // x M = 0 with M = [[1],[1],[1]] over F_3: kernel has dim 2
        let m = vec![vec![(0, 1)], vec![(0, 1)], vec![(0, 1)]];
        let k = left_kernel(&f, 3, &[m]);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert_eq!(v.iter().fold(0, |s, &a| f.add(s, a)), 0);
        }
        let mut e = Echelon::new(&f, 3);
        assert!(e.insert(&vec![(0, 2), (1, 1)]));
        assert!(!e.insert(&vec![(0, 1), (1, 2)]));
        assert_eq!(e.normal_form(&vec![(0, 1)]), vec![(1, 1)]);
        assert_eq!(det(&f, &[vec![1, 2], vec![1, 1]]), 2);
    }
}
