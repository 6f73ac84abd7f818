use serde::{Deserialize, Serialize};

use super::gf::{Elem, Gf};
use super::matrix::Matrix;

/// t-adic valuation; `None` is ∞ (the zero element of R_N).
pub type Valuation = Option<usize>;

/// Element of R_N = F_q[t]/(t^N); `coeffs[i]` is the coefficient of t^i.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TruncSeries {
    coeffs: Vec<Elem>,
}

impl TruncSeries {
    pub fn zero(n: usize) -> TruncSeries {
        assert!(n >= 1, "truncation order must be positive");
        TruncSeries { coeffs: vec![0; n] }
    }

    pub fn constant(c: Elem, n: usize) -> TruncSeries {
        let mut s = TruncSeries::zero(n);
        s.coeffs[0] = c;
        s
    }

    /// `c·t^k`, truncated.
    pub fn monomial(c: Elem, k: usize, n: usize) -> TruncSeries {
        let mut s = TruncSeries::zero(n);
        if k < n {
            s.coeffs[k] = c;
        }
        s
    }

    pub fn from_coeffs(mut coeffs: Vec<Elem>, n: usize) -> TruncSeries {
        coeffs.resize(n, 0);
        TruncSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }
    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }
    pub fn coeff(&self, i: usize) -> Elem {
        self.coeffs.get(i).copied().unwrap_or(0)
    }
    pub fn valuation(&self) -> Valuation {
        self.coeffs.iter().position(|&c| c != 0)
    }
    pub fn is_zero(&self) -> bool {
        self.valuation().is_none()
    }
    pub fn is_unit(&self) -> bool {
        self.coeffs[0] != 0
    }

    /// Divide by t^k, assuming the valuation is at least k; top coefficients become 0.
    pub fn shift_down(&self, k: usize) -> TruncSeries {
        let n = self.order();
        let mut c = vec![0; n];
        for i in k..n {
            c[i - k] = self.coeffs[i];
        }
        TruncSeries { coeffs: c }
    }
}

impl Gf {
    pub fn s_add(&self, x: &TruncSeries, y: &TruncSeries) -> TruncSeries {
        assert_eq!(x.order(), y.order(), "series order mismatch");
        TruncSeries {
            coeffs: x.coeffs.iter().zip(&y.coeffs).map(|(&a, &b)| self.add(a, b)).collect(),
        }
    }

    pub fn s_sub(&self, x: &TruncSeries, y: &TruncSeries) -> TruncSeries {
        assert_eq!(x.order(), y.order(), "series order mismatch");
        TruncSeries {
            coeffs: x.coeffs.iter().zip(&y.coeffs).map(|(&a, &b)| self.sub(a, b)).collect(),
        }
    }

    pub fn s_neg(&self, x: &TruncSeries) -> TruncSeries {
        TruncSeries { coeffs: x.coeffs.iter().map(|&a| self.neg(a)).collect() }
    }

    pub fn s_mul(&self, x: &TruncSeries, y: &TruncSeries) -> TruncSeries {
        let n = x.order();
        assert_eq!(n, y.order(), "series order mismatch");
        let mut c = vec![0; n];
        for (i, &a) in x.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for j in 0..n - i {
                c[i + j] = self.add(c[i + j], self.mul(a, y.coeffs[j]));
            }
        }
        TruncSeries { coeffs: c }
    }

    pub fn s_scale(&self, s: Elem, x: &TruncSeries) -> TruncSeries {
        TruncSeries { coeffs: x.coeffs.iter().map(|&a| self.mul(s, a)).collect() }
    }

    /// Inverse of a unit of R_N.
    pub fn s_inv(&self, x: &TruncSeries) -> Option<TruncSeries> {
        let n = x.order();
        let i0 = self.inv(x.coeffs[0])?;
        let mut y = vec![0; n];
        y[0] = i0;
        for k in 1..n {
            let acc = self.sum((1..=k).map(|i| self.mul(x.coeffs[i], y[k - i])));
            y[k] = self.neg(self.mul(i0, acc));
        }
        Some(TruncSeries { coeffs: y })
    }
}

/// Matrix over R_N stored as its t-expansion `Σ t^k M_k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesMatrix {
    rows: usize,
    cols: usize,
    coeffs: Vec<Matrix>,
}

impl SeriesMatrix {
    pub fn zeros(rows: usize, cols: usize, n: usize) -> SeriesMatrix {
        assert!(n >= 1, "truncation order must be positive");
        SeriesMatrix { rows, cols, coeffs: vec![Matrix::zeros(rows, cols); n] }
    }

    pub fn constant(m: &Matrix, n: usize) -> SeriesMatrix {
        let mut s = SeriesMatrix::zeros(m.rows(), m.cols(), n);
        s.coeffs[0] = m.clone();
        s
    }

    /// Build from coefficient matrices; missing orders are zero, extra ones dropped.
    pub fn from_coeffs(rows: usize, cols: usize, mut coeffs: Vec<Matrix>, n: usize) -> SeriesMatrix {
        for c in &coeffs {
            assert_eq!(c.shape(), (rows, cols), "coefficient shape");
        }
        coeffs.resize(n, Matrix::zeros(rows, cols));
        SeriesMatrix { rows, cols, coeffs }
    }

    pub fn from_entries(rows: usize, cols: usize, entries: &[TruncSeries]) -> SeriesMatrix {
        assert_eq!(entries.len(), rows * cols);
        let n = entries.first().map_or(1, |e| e.order());
        let mut s = SeriesMatrix::zeros(rows, cols, n);
        for i in 0..rows {
            for j in 0..cols {
                s.set_entry(i, j, &entries[i * cols + j]);
            }
        }
        s
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
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }
    pub fn coeff(&self, k: usize) -> Matrix {
        self.coeffs.get(k).cloned().unwrap_or_else(|| Matrix::zeros(self.rows, self.cols))
    }
    pub fn coeffs(&self) -> &[Matrix] {
        &self.coeffs
    }
    pub fn set_coeff(&mut self, k: usize, m: Matrix) {
        assert_eq!(m.shape(), self.shape());
        self.coeffs[k] = m;
    }
    pub fn reduction(&self) -> &Matrix {
        &self.coeffs[0]
    }
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn entry(&self, i: usize, j: usize) -> TruncSeries {
        TruncSeries { coeffs: self.coeffs.iter().map(|c| c[(i, j)]).collect() }
    }

    pub fn set_entry(&mut self, i: usize, j: usize, s: &TruncSeries) {
        for (k, c) in self.coeffs.iter_mut().enumerate() {
            c[(i, j)] = s.coeff(k);
        }
    }

    /// Change the truncation order, padding with zeros or truncating.
    pub fn with_order(&self, n: usize) -> SeriesMatrix {
        SeriesMatrix::from_coeffs(self.rows, self.cols, self.coeffs.clone(), n)
    }

    pub fn transpose(&self) -> SeriesMatrix {
        SeriesMatrix {
            rows: self.cols,
            cols: self.rows,
            coeffs: self.coeffs.iter().map(|c| c.transpose()).collect(),
        }
    }

    pub fn hcat(&self, other: &SeriesMatrix) -> SeriesMatrix {
        assert_eq!(self.order(), other.order());
        SeriesMatrix {
            rows: self.rows,
            cols: self.cols + other.cols,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.hcat(b)).collect(),
        }
    }

    pub fn select_rows(&self, idx: &[usize]) -> SeriesMatrix {
        SeriesMatrix {
            rows: idx.len(),
            cols: self.cols,
            coeffs: self.coeffs.iter().map(|c| c.select_rows(idx)).collect(),
        }
    }

    pub fn select_cols(&self, idx: &[usize]) -> SeriesMatrix {
        SeriesMatrix {
            rows: self.rows,
            cols: idx.len(),
            coeffs: self.coeffs.iter().map(|c| c.select_cols(idx)).collect(),
        }
    }

    /// Smallest k with a nonzero coefficient matrix.
    pub fn valuation(&self) -> Valuation {
        self.coeffs.iter().position(|c| !c.is_zero())
    }
}

impl Gf {
    pub fn sm_mul(&self, a: &SeriesMatrix, b: &SeriesMatrix) -> SeriesMatrix {
        let n = a.order();
        assert_eq!(n, b.order(), "series matrix order mismatch");
        assert_eq!(a.cols, b.rows, "series matrix shape");
        let mut out = SeriesMatrix::zeros(a.rows, b.cols, n);
        for i in 0..n {
            if a.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..n - i {
                if b.coeffs[j].is_zero() {
                    continue;
                }
                let p = self.mat_mul(&a.coeffs[i], &b.coeffs[j]);
                out.coeffs[i + j] = self.mat_add(&out.coeffs[i + j], &p);
            }
        }
        out
    }

    pub fn sm_mul3(&self, a: &SeriesMatrix, b: &SeriesMatrix, c: &SeriesMatrix) -> SeriesMatrix {
        self.sm_mul(&self.sm_mul(a, b), c)
    }

    /// Constant matrix times series matrix.
    pub fn sm_lmul(&self, m: &Matrix, a: &SeriesMatrix) -> SeriesMatrix {
        SeriesMatrix {
            rows: m.rows(),
            cols: a.cols,
            coeffs: a.coeffs.iter().map(|c| self.mat_mul(m, c)).collect(),
        }
    }

    pub fn sm_add(&self, a: &SeriesMatrix, b: &SeriesMatrix) -> SeriesMatrix {
        assert_eq!(a.order(), b.order());
        SeriesMatrix {
            rows: a.rows,
            cols: a.cols,
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| self.mat_add(x, y)).collect(),
        }
    }

    pub fn sm_sub(&self, a: &SeriesMatrix, b: &SeriesMatrix) -> SeriesMatrix {
        assert_eq!(a.order(), b.order());
        SeriesMatrix {
            rows: a.rows,
            cols: a.cols,
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| self.mat_sub(x, y)).collect(),
        }
    }

    pub fn sm_neg(&self, a: &SeriesMatrix) -> SeriesMatrix {
        SeriesMatrix {
            rows: a.rows,
            cols: a.cols,
            coeffs: a.coeffs.iter().map(|x| self.mat_neg(x)).collect(),
        }
    }

    /// Inverse over R_N of a square matrix whose reduction is invertible.
    pub fn sm_inverse(&self, a: &SeriesMatrix) -> Option<SeriesMatrix> {
        let n = a.order();
        let x0 = self.inverse(a.reduction())?;
        let mut x = vec![x0.clone()];
        for k in 1..n {
            let mut acc = Matrix::zeros(a.rows, a.cols);
            for i in 1..=k {
                acc = self.mat_add(&acc, &self.mat_mul(&a.coeffs[i], &x[k - i]));
            }
            x.push(self.mat_neg(&self.mat_mul(&x0, &acc)));
        }
        Some(SeriesMatrix { rows: a.rows, cols: a.cols, coeffs: x })
    }

    /// Valuations of the diagonal in a Smith form over R_N, weakly increasing,
    /// padded with ∞ to length min(rows, cols).
    pub fn smith_valuations(&self, m: &SeriesMatrix) -> Vec<Valuation> {
        let (rows, cols) = m.shape();
        let mut e: Vec<Vec<TruncSeries>> =
            (0..rows).map(|i| (0..cols).map(|j| m.entry(i, j)).collect()).collect();
        let size = rows.min(cols);
        let mut out = Vec::with_capacity(size);
        for k in 0..size {
            let mut best: Option<(usize, usize, usize)> = None;
            for (i, row) in e.iter().enumerate().skip(k) {
                for (j, x) in row.iter().enumerate().skip(k) {
                    if let Some(v) = x.valuation() {
                        if best.map_or(true, |b| v < b.2) {
                            best = Some((i, j, v));
                        }
                    }
                }
            }
            let Some((pi, pj, d)) = best else {
                out.resize(size, None);
                return out;
            };
            e.swap(k, pi);
            for row in e.iter_mut() {
                row.swap(k, pj);
            }
            let unit = e[k][k].shift_down(d);
            let uinv = self.s_inv(&unit).expect("pivot unit");
            for i in k + 1..rows {
                if e[i][k].is_zero() {
                    continue;
                }
                let factor = self.s_mul(&e[i][k].shift_down(d), &uinv);
                for j in k..cols {
                    let sub = self.s_mul(&factor, &e[k][j]);
                    e[i][j] = self.s_sub(&e[i][j], &sub);
                }
            }
            for j in k + 1..cols {
                if e[k][j].is_zero() {
                    continue;
                }
                let factor = self.s_mul(&e[k][j].shift_down(d), &uinv);
                for row in e.iter_mut().skip(k) {
                    let sub = self.s_mul(&factor, &row[k]);
                    row[j] = self.s_sub(&row[j], &sub);
                }
            }
            out.push(Some(d));
        }
        out
    }
}

/// Number of finite valuations (rank after inverting t, up to truncation).
pub fn generic_rank(vals: &[Valuation]) -> usize {
    vals.iter().filter(|v| v.is_some()).count()
}

/// Number of zero valuations (rank of the reduction at t = 0).
pub fn special_rank(vals: &[Valuation]) -> usize {
    vals.iter().filter(|v| **v == Some(0)).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn series(gf: &Gf, c: &[i64], n: usize) -> TruncSeries {
        TruncSeries::from_coeffs(c.iter().map(|&x| gf.from_int(x)).collect(), n)
    }

    fn random_sm(gf: &Gf, r: usize, c: usize, n: usize, rng: &mut ChaCha8Rng) -> SeriesMatrix {
        let coeffs = (0..n)
            .map(|_| Matrix::from_vec(r, c, (0..r * c).map(|_| rng.gen_range(0..gf.order())).collect()))
            .collect();
        SeriesMatrix::from_coeffs(r, c, coeffs, n)
    }

    #[test]
    fn smith_examples() {
        let gf = Gf::new(3, 1).unwrap();
        let id = SeriesMatrix::constant(&Matrix::identity(2), 4);
        assert_eq!(gf.smith_valuations(&id), vec![Some(0), Some(0)]);
        let d = SeriesMatrix::from_entries(
            2,
            2,
            &[series(&gf, &[0, 1], 4), series(&gf, &[], 4), series(&gf, &[], 4), series(&gf, &[0, 0, 1], 4)],
        );
        assert_eq!(gf.smith_valuations(&d), vec![Some(1), Some(2)]);
        let m = SeriesMatrix::from_entries(
            2,
            2,
            &[series(&gf, &[0, 1], 4), series(&gf, &[1], 4), series(&gf, &[], 4), series(&gf, &[0, 1], 4)],
        );
        assert_eq!(gf.smith_valuations(&m), vec![Some(0), Some(2)]);
        assert_eq!(gf.smith_valuations(&SeriesMatrix::zeros(2, 3, 3)), vec![None, None]);
    }

    #[test]
    fn special_rank_is_rank_at_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let gf = Gf::new(2, 1).unwrap();
        for _ in 0..200 {
            let m = random_sm(&gf, 3, 4, 4, &mut rng);
            let v = gf.smith_valuations(&m);
            assert_eq!(special_rank(&v), gf.rank(m.reduction()));
        }
    }

    #[test]
    fn smith_invariant_under_unimodular_change() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let gf = Gf::new(3, 1).unwrap();
        for _ in 0..100 {
            let mut m = random_sm(&gf, 3, 3, 5, &mut rng);
            // push some entries into t·R to create nontrivial valuations
            let mut c0 = m.coeff(0);
            for j in 0..3 {
                c0[(rng.gen_range(0..3), j)] = 0;
                c0[(2, j)] = 0;
            }
            m.set_coeff(0, c0);
            let u = loop {
                let u = random_sm(&gf, 3, 3, 5, &mut rng);
                if gf.inverse(u.reduction()).is_some() {
                    break u;
                }
            };
            let w = loop {
                let w = random_sm(&gf, 3, 3, 5, &mut rng);
                if gf.inverse(w.reduction()).is_some() {
                    break w;
                }
            };
            assert_eq!(gf.smith_valuations(&m), gf.smith_valuations(&gf.sm_mul3(&u, &m, &w)));
        }
    }

    #[test]
    fn series_inverse() {
        let gf = Gf::new(5, 1).unwrap();
        let x = series(&gf, &[2, 3, 1, 4], 4);
        let y = gf.s_inv(&x).unwrap();
        assert_eq!(gf.s_mul(&x, &y), TruncSeries::constant(1, 4));
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = loop {
            let a = random_sm(&gf, 3, 3, 4, &mut rng);
            if gf.inverse(a.reduction()).is_some() {
                break a;
            }
        };
        let ai = gf.sm_inverse(&a).unwrap();
        assert_eq!(gf.sm_mul(&a, &ai), SeriesMatrix::constant(&Matrix::identity(3), 4));
    }
}
