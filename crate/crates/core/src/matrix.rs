//! Dense matrices over a prime field.
//!
//! Gaussian elimination with first-nonzero pivoting gives rank, determinant
//! and inverse; exact field arithmetic needs no pivot-magnitude strategy.
//! Matrices here stay at desk scale (at most a few hundred rows), so O(n^3)
//! is ample.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

use crate::gf::{FieldElement, PrimeField};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatrixError {
    #[error("shape mismatch: {0}x{1} vs {2}x{3}")]
    ShapeMismatch(usize, usize, usize, usize),
    #[error("matrices belong to different fields (F_{0} vs F_{1})")]
    FieldMismatch(u32, u32),
    #[error("operation requires a square matrix, got {0}x{1}")]
    NotSquare(usize, usize),
    #[error("matrix is singular")]
    Singular,
    #[error("entry index ({0},{1}) out of bounds for {2}x{3} matrix")]
    OutOfBounds(usize, usize, usize, usize),
}

/// A rows x cols matrix over F_p, stored row-major as raw residues.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GfMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u32>,
    field: PrimeField,
}

impl GfMatrix {
    pub fn zeros(rows: usize, cols: usize, field: PrimeField) -> Self {
        GfMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
            field,
        }
    }

    pub fn identity(n: usize, field: PrimeField) -> Self {
        let mut m = Self::zeros(n, n, field);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Build from integer rows; entries are reduced mod p.
    pub fn from_rows(rows: &[Vec<u64>], field: PrimeField) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            for &v in row {
                data.push((v % field.modulus() as u64) as u32);
            }
        }
        GfMatrix {
            rows: r,
            cols: c,
            data,
            field,
        }
    }

    /// Entries drawn uniformly from F_p by a seeded deterministic generator.
    /// Modular reduction of a 64-bit draw has bias below 2^-55 for p <= 257;
    /// accepted and irrelevant at these field sizes.
    pub fn random(rows: usize, cols: usize, field: PrimeField, rng: &mut impl Rng) -> Self {
        let p = field.modulus() as u64;
        let data = (0..rows * cols)
            .map(|_| (rng.gen::<u64>() % p) as u32)
            .collect();
        GfMatrix {
            rows,
            cols,
            data,
            field,
        }
    }

    pub fn random_with_seed(rows: usize, cols: usize, field: PrimeField, seed: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        Self::random(rows, cols, field, &mut rng)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn raw(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    pub fn get(&self, r: usize, c: usize) -> Result<FieldElement, MatrixError> {
        if r >= self.rows || c >= self.cols {
            return Err(MatrixError::OutOfBounds(r, c, self.rows, self.cols));
        }
        Ok(self.field.element(self.raw(r, c) as u64))
    }

    pub fn set_raw(&mut self, r: usize, c: usize, v: u32) {
        debug_assert!(v < self.field.modulus());
        self.data[r * self.cols + c] = v;
    }

    pub fn transpose(&self) -> GfMatrix {
        let mut out = GfMatrix::zeros(self.cols, self.rows, self.field);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[c * self.rows + r] = self.raw(r, c);
            }
        }
        out
    }

    /// Horizontal concatenation [self | other].
    pub fn hstack(&self, other: &GfMatrix) -> Result<GfMatrix, MatrixError> {
        self.check_field(other)?;
        if self.rows != other.rows {
            return Err(MatrixError::ShapeMismatch(
                self.rows, self.cols, other.rows, other.cols,
            ));
        }
        let mut out = GfMatrix::zeros(self.rows, self.cols + other.cols, self.field);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[r * out.cols + c] = self.raw(r, c);
            }
            for c in 0..other.cols {
                out.data[r * out.cols + self.cols + c] = other.raw(r, c);
            }
        }
        Ok(out)
    }

    /// Vertical concatenation [self; other].
    pub fn vstack(&self, other: &GfMatrix) -> Result<GfMatrix, MatrixError> {
        self.check_field(other)?;
        if self.cols != other.cols {
            return Err(MatrixError::ShapeMismatch(
                self.rows, self.cols, other.rows, other.cols,
            ));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(GfMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
            field: self.field,
        })
    }

    /// New matrix from the listed columns, in order.
    pub fn select_columns(&self, cols: &[usize]) -> GfMatrix {
        let mut out = GfMatrix::zeros(self.rows, cols.len(), self.field);
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                out.data[r * cols.len() + j] = self.raw(r, c);
            }
        }
        out
    }

    fn check_field(&self, other: &GfMatrix) -> Result<(), MatrixError> {
        if self.field != other.field {
            return Err(MatrixError::FieldMismatch(
                self.field.modulus(),
                other.field.modulus(),
            ));
        }
        Ok(())
    }

    pub fn matmul(&self, other: &GfMatrix) -> Result<GfMatrix, MatrixError> {
        self.check_field(other)?;
        if self.cols != other.rows {
            return Err(MatrixError::ShapeMismatch(
                self.rows, self.cols, other.rows, other.cols,
            ));
        }
        let p = self.field.modulus() as u64;
        let mut out = GfMatrix::zeros(self.rows, other.cols, self.field);
        for r in 0..self.rows {
            for m in 0..self.cols {
                let a = self.raw(r, m) as u64;
                if a == 0 {
                    continue;
                }
                for c in 0..other.cols {
                    let cur = out.data[r * other.cols + c] as u64;
                    out.data[r * other.cols + c] =
                        ((cur + a * other.raw(m, c) as u64) % p) as u32;
                }
            }
        }
        Ok(out)
    }

    /// Row-echelon rank over F_p.
    pub fn rank(&self) -> usize {
        let mut work = self.clone();
        work.echelon_rank()
    }

    fn echelon_rank(&mut self) -> usize {
        self.echelon_rank_limited(self.cols)
    }

    // Reduced row echelon form with pivots restricted to the first
    // `limit` columns; returns the pivot count.
    fn echelon_rank_limited(&mut self, limit: usize) -> usize {
        let f = self.field;
        let mut rank = 0;
        for col in 0..limit {
            if rank == self.rows {
                break;
            }
            // first nonzero pivot at or below `rank`
            let pivot = (rank..self.rows).find(|&r| self.raw(r, col) != 0);
            let Some(pr) = pivot else { continue };
            self.swap_rows(rank, pr);
            let inv = f.inv_raw(self.raw(rank, col)).expect("pivot is nonzero");
            for c in col..self.cols {
                let v = f.mul_raw(self.raw(rank, c), inv);
                self.set_raw(rank, c, v);
            }
            for r in 0..self.rows {
                if r != rank && self.raw(r, col) != 0 {
                    let factor = self.raw(r, col);
                    for c in col..self.cols {
                        let v = f.sub_raw(
                            self.raw(r, c),
                            f.mul_raw(factor, self.raw(rank, c)),
                        );
                        self.set_raw(r, c, v);
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            let (va, vb) = (self.raw(a, c), self.raw(b, c));
            self.set_raw(a, c, vb);
            self.set_raw(b, c, va);
        }
    }

    /// Determinant over F_p; nonzero iff the matrix is nonsingular.
    pub fn det(&self) -> Result<FieldElement, MatrixError> {
        if self.rows != self.cols {
            return Err(MatrixError::NotSquare(self.rows, self.cols));
        }
        let f = self.field;
        let n = self.rows;
        let mut work = self.clone();
        let mut det: u32 = 1;
        for col in 0..n {
            let pivot = (col..n).find(|&r| work.raw(r, col) != 0);
            let Some(pr) = pivot else {
                return Ok(f.zero());
            };
            if pr != col {
                work.swap_rows(col, pr);
                det = f.sub_raw(0, det); // row swap flips the sign
            }
            let pv = work.raw(col, col);
            det = f.mul_raw(det, pv);
            let inv = f.inv_raw(pv).expect("pivot is nonzero");
            for r in col + 1..n {
                if work.raw(r, col) != 0 {
                    let factor = f.mul_raw(work.raw(r, col), inv);
                    for c in col..n {
                        let v = f.sub_raw(
                            work.raw(r, c),
                            f.mul_raw(factor, work.raw(col, c)),
                        );
                        work.set_raw(r, c, v);
                    }
                }
            }
        }
        Ok(f.element(det as u64))
    }

    /// Inverse via Gauss-Jordan on [A | I].
    pub fn inverse(&self) -> Result<GfMatrix, MatrixError> {
        if self.rows != self.cols {
            return Err(MatrixError::NotSquare(self.rows, self.cols));
        }
        let n = self.rows;
        let mut aug = self.hstack(&GfMatrix::identity(n, self.field))?;
        let rank = aug.echelon_rank_limited(n);
        if rank < n {
            return Err(MatrixError::Singular);
        }
        let mut out = GfMatrix::zeros(n, n, self.field);
        for r in 0..n {
            for c in 0..n {
                out.set_raw(r, c, aug.raw(r, n + c));
            }
        }
        Ok(out)
    }
}

impl std::fmt::Display for GfMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for r in 0..self.rows {
            let row: Vec<String> =
                (0..self.cols).map(|c| self.raw(r, c).to_string()).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// The 6x6 coefficient matrix over F_7 from the worked interference-alignment
/// repair example; used as a golden nonsingularity witness.
pub fn example_repair_matrix(field: PrimeField) -> GfMatrix {
    GfMatrix::from_rows(
        &[
            vec![3, 4, 6, 2, 0, 0],
            vec![0, 5, 0, 3, 4, 6],
            vec![1, 3, 4, 5, 0, 0],
            vec![0, 4, 0, 1, 3, 4],
            vec![2, 1, 3, 4, 0, 0],
            vec![0, 1, 0, 2, 1, 3],
        ],
        field,
    )
}
