//! Dense exact matrices.
//!
//! Storage and [`Mat::get`] are 0-based like any Rust container. The
//! constructors that mirror textbook notation ([`Mat::elementary`],
//! [`Mat::jordan_block`]) take 1-based indices so formulas written with
//! `E_{i,j}` transcribe directly.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};
use crate::field::{Field, FieldValue};

#[derive(Clone)]
pub struct Mat {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<FieldValue>,
}

impl PartialEq for Mat {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.data == other.data
            && self.field == other.field
    }
}

impl Eq for Mat {}

impl Hash for Mat {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rows.hash(state);
        self.cols.hash(state);
        self.data.hash(state);
    }
}

impl PartialOrd for Mat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Mat {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.rows, self.cols, &self.data).cmp(&(other.rows, other.cols, &other.data))
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mat[{}]({})", self.field, self.encode())
    }
}

impl Mat {
    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Mat {
        Mat {
            field: field.clone(),
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: &Field, n: usize) -> Mat {
        let mut m = Mat::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = field.one();
        }
        m
    }

    pub fn from_vec(field: &Field, rows: usize, cols: usize, data: Vec<FieldValue>) -> Result<Mat> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|x| !field.contains(x)) {
            return Err(Error::NotInField(format!("{bad:?}"), field.to_string()));
        }
        Ok(Mat {
            field: field.clone(),
            rows,
            cols,
            data,
        })
    }

    /// Matrix of integer images; rows must all have the same length.
    pub fn from_ints(field: &Field, rows: &[&[i64]]) -> Mat {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        let data = rows
            .iter()
            .flat_map(|r| r.iter().map(|&x| field.from_int(x)))
            .collect();
        Mat {
            field: field.clone(),
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn row_vector(field: &Field, v: &[FieldValue]) -> Mat {
        Mat {
            field: field.clone(),
            rows: 1,
            cols: v.len(),
            data: v.to_vec(),
        }
    }

    pub fn col_vector(field: &Field, v: &[FieldValue]) -> Mat {
        Mat {
            field: field.clone(),
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    /// `E_{i,j}` of size n: a single 1 at (i, j), 1-based.
    pub fn elementary(field: &Field, n: usize, i: usize, j: usize) -> Result<Mat> {
        if i == 0 || j == 0 || i > n || j > n {
            return Err(Error::IndexOutOfRange(i, j, n));
        }
        let mut m = Mat::zeros(field, n, n);
        m.data[(i - 1) * n + (j - 1)] = field.one();
        Ok(m)
    }

    /// The unipotent Jordan block `I_m + Σ E_{i,i+1}`.
    pub fn jordan_block(field: &Field, m: usize) -> Mat {
        assert!(m >= 1, "Jordan block needs size at least 1");
        let mut j = Mat::identity(field, m);
        for i in 0..m - 1 {
            j.data[i * m + i + 1] = field.one();
        }
        j
    }

    /// Column times row: entry (i, j) is `col[i]·row[j]`.
    pub fn outer(col: &Mat, row: &Mat) -> Result<Mat> {
        if col.cols != 1 || row.rows != 1 {
            return Err(Error::Dimension(format!(
                "outer product of {}x{} and {}x{}",
                col.rows, col.cols, row.rows, row.cols
            )));
        }
        col.checked_mul(row)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[FieldValue] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &FieldValue {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: FieldValue) {
        debug_assert!(self.field.contains(&x));
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[FieldValue] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Mat {
        assert!(r0 + rows <= self.rows && c0 + cols <= self.cols);
        let mut data = Vec::with_capacity(rows * cols);
        for i in r0..r0 + rows {
            data.extend_from_slice(&self.data[i * self.cols + c0..i * self.cols + c0 + cols]);
        }
        Mat {
            field: self.field.clone(),
            rows,
            cols,
            data,
        }
    }

    /// Overwrites the block starting at (r0, c0) with `block`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Mat) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.data[(r0 + i) * self.cols + c0 + j] = block.get(i, j).clone();
            }
        }
    }

    fn same_field(&self, other: &Mat) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn checked_add(&self, other: &Mat) -> Result<Mat> {
        self.same_field(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::Dimension(format!(
                "{}x{} + {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| self.field.add(a, b))
            .collect();
        Ok(Mat {
            data,
            ..self.clone_shape()
        })
    }

    pub fn checked_sub(&self, other: &Mat) -> Result<Mat> {
        self.same_field(other)?;
        self.checked_add(&other.scale(&self.field.from_int(-1)))
    }

    pub fn checked_mul(&self, other: &Mat) -> Result<Mat> {
        self.same_field(other)?;
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let (n, k, m) = (self.rows, self.cols, other.cols);
        let data = match self.field.galois_field() {
            Some(gf) => {
                let a: Vec<u32> = self.data.iter().map(|x| x.code().unwrap()).collect();
                let b: Vec<u32> = other.data.iter().map(|x| x.code().unwrap()).collect();
                let mut out = vec![0u32; n * m];
                for i in 0..n {
                    for l in 0..k {
                        let x = a[i * k + l];
                        if x == 0 {
                            continue;
                        }
                        for j in 0..m {
                            let t = gf.mul_raw(x, b[l * m + j]);
                            out[i * m + j] = gf.add_raw(out[i * m + j], t);
                        }
                    }
                }
                out.into_iter().map(FieldValue::Finite).collect()
            }
            None => {
                let f = &self.field;
                let mut out = vec![f.zero(); n * m];
                for i in 0..n {
                    for l in 0..k {
                        let x = &self.data[i * k + l];
                        if f.is_zero(x) {
                            continue;
                        }
                        for j in 0..m {
                            let t = f.mul(x, &other.data[l * m + j]);
                            out[i * m + j] = f.add(&out[i * m + j], &t);
                        }
                    }
                }
                out
            }
        };
        Ok(Mat {
            field: self.field.clone(),
            rows: n,
            cols: m,
            data,
        })
    }

    fn clone_shape(&self) -> Mat {
        Mat {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            data: Vec::new(),
        }
    }

    pub fn scale(&self, c: &FieldValue) -> Mat {
        let data = self.data.iter().map(|x| self.field.mul(c, x)).collect();
        Mat {
            data,
            ..self.clone_shape()
        }
    }

    pub fn transpose(&self) -> Mat {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        Mat {
            field: self.field.clone(),
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// Row vector `v` times this matrix.
    pub fn left_mul_vec(&self, v: &[FieldValue]) -> Result<Vec<FieldValue>> {
        if v.len() != self.rows {
            return Err(Error::Dimension(format!(
                "vector of length {} times {}x{}",
                v.len(),
                self.rows,
                self.cols
            )));
        }
        let f = &self.field;
        let mut out = vec![f.zero(); self.cols];
        for (i, x) in v.iter().enumerate() {
            if f.is_zero(x) {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o = f.add(o, &f.mul(x, self.get(i, j)));
            }
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| self.field.is_zero(x))
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let x = self.get(i, j);
                    if i == j {
                        *x == self.field.one()
                    } else {
                        self.field.is_zero(x)
                    }
                })
            })
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.rows).all(|i| (0..i.min(self.cols)).all(|j| self.field.is_zero(self.get(i, j))))
    }

    /// Gauss–Jordan reduction, pivoting on the first nonzero entry of each
    /// column. Row operations are mirrored onto `aug`. Returns the reduced
    /// matrix, the transformed `aug`, the pivot columns and the determinant.
    fn reduce(&self, aug: Option<&Mat>) -> (Mat, Option<Mat>, Vec<usize>, FieldValue) {
        let f = &self.field;
        let mut a = self.clone();
        let mut b = aug.cloned();
        let mut pivots = Vec::new();
        let mut det = f.one();
        let mut r = 0;
        for c in 0..a.cols {
            if r == a.rows {
                break;
            }
            let Some(pr) = (r..a.rows).find(|&i| !f.is_zero(a.get(i, c))) else {
                det = f.zero();
                continue;
            };
            if pr != r {
                a.swap_rows(pr, r);
                if let Some(b) = b.as_mut() {
                    b.swap_rows(pr, r);
                }
                det = f.neg(&det);
            }
            let piv = a.get(r, c).clone();
            det = f.mul(&det, &piv);
            let pinv = f.inv(&piv).expect("pivot is nonzero");
            a.scale_row(r, &pinv);
            if let Some(b) = b.as_mut() {
                b.scale_row(r, &pinv);
            }
            for i in 0..a.rows {
                if i != r && !f.is_zero(a.get(i, c)) {
                    let factor = f.neg(a.get(i, c));
                    a.add_row_multiple(i, r, &factor);
                    if let Some(b) = b.as_mut() {
                        b.add_row_multiple(i, r, &factor);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        if pivots.len() < a.rows.min(a.cols) || a.rows != a.cols {
            det = f.zero();
        }
        (a, b, pivots, det)
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    fn scale_row(&mut self, i: usize, c: &FieldValue) {
        for k in 0..self.cols {
            let idx = i * self.cols + k;
            self.data[idx] = self.field.mul(c, &self.data[idx]);
        }
    }

    /// row_i += c · row_j
    fn add_row_multiple(&mut self, i: usize, j: usize, c: &FieldValue) {
        for k in 0..self.cols {
            let t = self.field.mul(c, &self.data[j * self.cols + k]);
            let idx = i * self.cols + k;
            self.data[idx] = self.field.add(&self.data[idx], &t);
        }
    }

    pub fn rank(&self) -> usize {
        self.reduce(None).2.len()
    }

    pub fn det(&self) -> Result<FieldValue> {
        if !self.is_square() {
            return Err(Error::Dimension(format!("det of {}x{}", self.rows, self.cols)));
        }
        Ok(self.reduce(None).3)
    }

    pub fn inverse(&self) -> Result<Mat> {
        if !self.is_square() {
            return Err(Error::Dimension(format!(
                "inverse of {}x{}",
                self.rows, self.cols
            )));
        }
        let id = Mat::identity(&self.field, self.rows);
        let (_, inv, pivots, _) = self.reduce(Some(&id));
        if pivots.len() < self.rows {
            return Err(Error::Singular);
        }
        let inv = inv.unwrap();
        debug_assert!((self * &inv).is_identity());
        Ok(inv)
    }

    /// Integer power; negative exponents go through the inverse.
    pub fn pow(&self, e: i64) -> Result<Mat> {
        if !self.is_square() {
            return Err(Error::Dimension(format!("power of {}x{}", self.rows, self.cols)));
        }
        let mut base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Mat::identity(&self.field, self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Rows separated by `;`, entries by `,`.
    pub fn encode(&self) -> String {
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .map(|x| self.field.format(x))
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect::<Vec<_>>()
            .join(";")
    }

    pub fn decode(field: &Field, s: &str) -> Result<Mat> {
        let rows: Vec<Vec<FieldValue>> = s
            .trim()
            .split(';')
            .map(|r| r.split(',').map(|t| field.parse(t)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged matrix rows".into()));
        }
        let n = rows.len();
        Mat::from_vec(field, n, cols, rows.into_iter().flatten().collect())
    }
}

impl Mul for &Mat {
    type Output = Mat;

    fn mul(self, rhs: &Mat) -> Mat {
        self.checked_mul(rhs).unwrap_or_else(|e| panic!("matrix product: {e}"))
    }
}

impl Add for &Mat {
    type Output = Mat;

    fn add(self, rhs: &Mat) -> Mat {
        self.checked_add(rhs).unwrap_or_else(|e| panic!("matrix sum: {e}"))
    }
}

impl Sub for &Mat {
    type Output = Mat;

    fn sub(self, rhs: &Mat) -> Mat {
        self.checked_sub(rhs).unwrap_or_else(|e| panic!("matrix difference: {e}"))
    }
}
