use serde::{Deserialize, Serialize};

use super::gf::{Elem, Gf};

/// Dense row-major matrix of field-element codes. Arithmetic goes through a
/// [`Gf`], which owns the tables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Elem>) -> Matrix {
        assert_eq!(rows * cols, data.len(), "matrix data length");
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<Elem>]) -> Matrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Matrix { rows: r, cols: c, data }
    }

    /// Matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_cols(rows: usize, cols: &[Vec<Elem>]) -> Matrix {
        let mut m = Matrix::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length");
            for (i, &x) in c.iter().enumerate() {
                m[(i, j)] = x;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }
    pub fn data(&self) -> &[Elem] {
        &self.data
    }
    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> Vec<Elem> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }
    pub fn col(&self, j: usize) -> Vec<Elem> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }
    pub fn to_rows(&self) -> Vec<Vec<Elem>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }
    pub fn to_cols(&self) -> Vec<Vec<Elem>> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn hcat(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows, "hcat row mismatch");
        let mut m = Matrix::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)];
            }
            for j in 0..other.cols {
                m[(i, self.cols + j)] = other[(i, j)];
            }
        }
        m
    }

    pub fn vcat(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols, "vcat column mismatch");
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Matrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn block_diag(blocks: &[&Matrix]) -> Matrix {
        let r = blocks.iter().map(|b| b.rows).sum();
        let c = blocks.iter().map(|b| b.cols).sum();
        let mut m = Matrix::zeros(r, c);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            m.set_block(r0, c0, b);
            r0 += b.rows;
            c0 += b.cols;
        }
        m
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Matrix) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)];
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Matrix {
        let mut m = Matrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = self[(r0 + i, c0 + j)];
            }
        }
        m
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(idx.len(), self.cols);
        for (k, &i) in idx.iter().enumerate() {
            for j in 0..self.cols {
                m[(k, j)] = self[(i, j)];
            }
        }
        m
    }

    pub fn select_cols(&self, idx: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(self.rows, idx.len());
        for i in 0..self.rows {
            for (k, &j) in idx.iter().enumerate() {
                m[(i, k)] = self[(i, j)];
            }
        }
        m
    }

    pub fn map(&self, f: impl Fn(Elem) -> Elem) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| f(x)).collect() }
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Elem;
    fn index(&self, (i, j): (usize, usize)) -> &Elem {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Elem {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Debug, Clone)]
pub struct Echelon {
    pub reduced: Matrix,
    pub pivots: Vec<usize>,
}

impl Gf {
    pub fn mat_mul(&self, a: &Matrix, b: &Matrix) -> Matrix {
        assert_eq!(a.cols(), b.rows(), "mat_mul shape");
        let mut c = Matrix::zeros(a.rows(), b.cols());
        for i in 0..a.rows() {
            for k in 0..a.cols() {
                let x = a[(i, k)];
                if x == 0 {
                    continue;
                }
                for j in 0..b.cols() {
                    let y = b[(k, j)];
                    if y != 0 {
                        c[(i, j)] = self.add(c[(i, j)], self.mul(x, y));
                    }
                }
            }
        }
        c
    }

    pub fn mat_mul3(&self, a: &Matrix, b: &Matrix, c: &Matrix) -> Matrix {
        self.mat_mul(&self.mat_mul(a, b), c)
    }

    pub fn mat_vec(&self, a: &Matrix, v: &[Elem]) -> Vec<Elem> {
        assert_eq!(a.cols(), v.len());
        (0..a.rows())
            .map(|i| self.sum((0..a.cols()).map(|j| self.mul(a[(i, j)], v[j]))))
            .collect()
    }

    pub fn mat_add(&self, a: &Matrix, b: &Matrix) -> Matrix {
        assert_eq!(a.shape(), b.shape(), "mat_add shape");
        let data = a.data().iter().zip(b.data()).map(|(&x, &y)| self.add(x, y)).collect();
        Matrix::from_vec(a.rows(), a.cols(), data)
    }

    pub fn mat_sub(&self, a: &Matrix, b: &Matrix) -> Matrix {
        assert_eq!(a.shape(), b.shape(), "mat_sub shape");
        let data = a.data().iter().zip(b.data()).map(|(&x, &y)| self.sub(x, y)).collect();
        Matrix::from_vec(a.rows(), a.cols(), data)
    }

    pub fn mat_neg(&self, a: &Matrix) -> Matrix {
        a.map(|x| self.neg(x))
    }

    pub fn mat_scale(&self, s: Elem, a: &Matrix) -> Matrix {
        a.map(|x| self.mul(s, x))
    }

    pub fn mat_frobenius(&self, a: &Matrix) -> Matrix {
        a.map(|x| self.frobenius(x))
    }

    pub fn mat_frobenius_inv(&self, a: &Matrix) -> Matrix {
        a.map(|x| self.frobenius_inv(x))
    }

    pub fn dot(&self, u: &[Elem], v: &[Elem]) -> Elem {
        self.sum(u.iter().zip(v).map(|(&x, &y)| self.mul(x, y)))
    }

    /// Bilinear form value `uᵀ G v`.
    pub fn bilinear(&self, g: &Matrix, u: &[Elem], v: &[Elem]) -> Elem {
        self.dot(u, &self.mat_vec(g, v))
    }

    pub fn rref(&self, a: &Matrix) -> Echelon {
        let mut m = a.clone();
        let (rows, cols) = m.shape();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(piv) = (r..rows).find(|&i| m[(i, c)] != 0) else {
                continue;
            };
            if piv != r {
                for j in 0..cols {
                    let t = m[(r, j)];
                    m[(r, j)] = m[(piv, j)];
                    m[(piv, j)] = t;
                }
            }
            let inv = self.inv(m[(r, c)]).expect("nonzero pivot");
            for j in c..cols {
                m[(r, j)] = self.mul(inv, m[(r, j)]);
            }
            for i in 0..rows {
                let factor = m[(i, c)];
                if i == r || factor == 0 {
                    continue;
                }
                for j in c..cols {
                    let v = self.mul(factor, m[(r, j)]);
                    m[(i, j)] = self.sub(m[(i, j)], v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        Echelon { reduced: m, pivots }
    }

    pub fn rank(&self, a: &Matrix) -> usize {
        self.rref(a).pivots.len()
    }

    /// Basis of the right kernel `{x : A x = 0}` as columns.
    pub fn kernel(&self, a: &Matrix) -> Matrix {
        let ech = self.rref(a);
        let cols = a.cols();
        let free: Vec<usize> = (0..cols).filter(|c| !ech.pivots.contains(c)).collect();
        let mut k = Matrix::zeros(cols, free.len());
        for (idx, &fc) in free.iter().enumerate() {
            k[(fc, idx)] = 1;
            for (r, &pc) in ech.pivots.iter().enumerate() {
                k[(pc, idx)] = self.neg(ech.reduced[(r, fc)]);
            }
        }
        k
    }

    pub fn inverse(&self, a: &Matrix) -> Option<Matrix> {
        if !a.is_square() {
            return None;
        }
        let n = a.rows();
        if n == 0 {
            return Some(Matrix::zeros(0, 0));
        }
        let ech = self.rref(&a.hcat(&Matrix::identity(n)));
        if ech.pivots.len() < n || ech.pivots[n - 1] != n - 1 {
            return None;
        }
        Some(ech.reduced.block(0, n, n, n))
    }

    /// Some solution `X` of `A X = B`, if one exists.
    pub fn solve(&self, a: &Matrix, b: &Matrix) -> Option<Matrix> {
        assert_eq!(a.rows(), b.rows(), "solve shape");
        let n = a.cols();
        let ech = self.rref(&a.hcat(b));
        if ech.pivots.iter().any(|&p| p >= n) {
            return None;
        }
        let mut x = Matrix::zeros(n, b.cols());
        for (r, &pc) in ech.pivots.iter().enumerate() {
            for j in 0..b.cols() {
                x[(pc, j)] = ech.reduced[(r, n + j)];
            }
        }
        Some(x)
    }

    pub fn det(&self, a: &Matrix) -> Elem {
        assert!(a.is_square());
        let n = a.rows();
        let mut m = a.clone();
        let mut det = 1;
        for c in 0..n {
            let Some(piv) = (c..n).find(|&i| m[(i, c)] != 0) else {
                return 0;
            };
            if piv != c {
                for j in 0..n {
                    let t = m[(c, j)];
                    m[(c, j)] = m[(piv, j)];
                    m[(piv, j)] = t;
                }
                det = self.neg(det);
            }
            let d = m[(c, c)];
            det = self.mul(det, d);
            let inv = self.inv(d).unwrap();
            for i in c + 1..n {
                let factor = self.mul(m[(i, c)], inv);
                if factor == 0 {
                    continue;
                }
                for j in c..n {
                    let v = self.mul(factor, m[(c, j)]);
                    m[(i, j)] = self.sub(m[(i, j)], v);
                }
            }
        }
        det
    }

    pub fn is_symmetric(&self, a: &Matrix) -> bool {
        a.is_square() && *a == a.transpose()
    }

    /// `Aᵀ = −A` with zero diagonal.
    pub fn is_alternating(&self, a: &Matrix) -> bool {
        a.is_square()
            && (0..a.rows()).all(|i| {
                a[(i, i)] == 0 && (0..a.cols()).all(|j| a[(i, j)] == self.neg(a[(j, i)]))
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(gf: &Gf, r: usize, c: usize, rng: &mut ChaCha8Rng) -> Matrix {
        let data = (0..r * c).map(|_| rng.gen_range(0..gf.order())).collect();
        Matrix::from_vec(r, c, data)
    }

    #[test]
    fn kernel_and_rank_nullity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for (p, f) in [(2, 1), (3, 1), (2, 2), (5, 1), (3, 2)] {
            let gf = Gf::new(p, f).unwrap();
            for _ in 0..50 {
                let r = rng.gen_range(1..6);
                let c = rng.gen_range(1..6);
                let a = random(&gf, r, c, &mut rng);
                let k = gf.kernel(&a);
                assert!(gf.mat_mul(&a, &k).is_zero());
                assert_eq!(k.cols() + gf.rank(&a), c);
                assert_eq!(gf.rank(&k), k.cols());
            }
        }
    }

    #[test]
    fn inverse_roundtrip_and_det() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let gf = Gf::new(3, 2).unwrap();
        for _ in 0..100 {
            let a = random(&gf, 4, 4, &mut rng);
            match gf.inverse(&a) {
                Some(inv) => {
                    assert_eq!(gf.mat_mul(&a, &inv), Matrix::identity(4));
                    assert_ne!(gf.det(&a), 0);
                }
                None => assert_eq!(gf.det(&a), 0),
            }
        }
    }

    #[test]
    fn solve_consistency() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let gf = Gf::new(5, 1).unwrap();
        for _ in 0..100 {
            let a = random(&gf, 3, 4, &mut rng);
            let x = random(&gf, 4, 2, &mut rng);
            let b = gf.mat_mul(&a, &x);
            let y = gf.solve(&a, &b).unwrap();
            assert_eq!(gf.mat_mul(&a, &y), b);
        }
    }
}
