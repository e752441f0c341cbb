use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_len, Error, Result};
use crate::gf2::BitVec;

/// Boolean matrix over GF(2), stored as packed rows.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawBitMatrix", into = "RawBitMatrix")]
pub struct BitMatrix {
    rows: Vec<BitVec>,
    cols: usize,
}

/// Wire form: explicit dimensions plus a row-major string of '0'/'1'.
#[derive(Serialize, Deserialize)]
struct RawBitMatrix {
    rows: usize,
    cols: usize,
    bits: String,
}

impl TryFrom<RawBitMatrix> for BitMatrix {
    type Error = Error;
    fn try_from(raw: RawBitMatrix) -> Result<Self> {
        ensure_len("matrix entries", raw.rows * raw.cols, raw.bits.len())?;
        let flat: BitVec = raw.bits.parse()?;
        let rows = (0..raw.rows)
            .map(|r| {
                BitVec::from_bools(
                    &(0..raw.cols)
                        .map(|c| flat.get(r * raw.cols + c))
                        .collect::<Vec<_>>(),
                )
            })
            .collect();
        Ok(BitMatrix {
            rows,
            cols: raw.cols,
        })
    }
}

impl From<BitMatrix> for RawBitMatrix {
    fn from(m: BitMatrix) -> Self {
        RawBitMatrix {
            rows: m.rows.len(),
            cols: m.cols,
            bits: m.rows.iter().map(|r| r.to_string()).collect(),
        }
    }
}

/// Reduced row echelon form of a row set: nonzero rows with their pivot columns.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub rows: Vec<BitVec>,
    pub pivots: Vec<usize>,
    pub cols: usize,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the pivots; zero iff `v` lies in the row span.
    pub fn reduce(&self, v: &BitVec) -> BitVec {
        let mut v = v.clone();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v.get(p) {
                v.xor_assign_unchecked(row);
            }
        }
        v
    }
}

/// Result of solving `M beta = x` over GF(2).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineSolution {
    pub particular: Option<BitVec>,
    pub kernel_basis: Vec<BitVec>,
}

impl AffineSolution {
    /// Every solution `particular + span(kernel_basis)`, in Gray-code order.
    /// Empty when the system is inconsistent.
    pub fn solutions(&self) -> Vec<BitVec> {
        let Some(base) = &self.particular else {
            return Vec::new();
        };
        span_elements(base, &self.kernel_basis)
    }
}

/// All vectors `base + sum_{i in S} basis[i]` over subsets `S`, Gray-code ordered.
pub fn span_elements(base: &BitVec, basis: &[BitVec]) -> Vec<BitVec> {
    let count = 1usize << basis.len();
    let mut out = Vec::with_capacity(count);
    let mut cur = base.clone();
    out.push(cur.clone());
    for step in 1..count {
        let flip = step.trailing_zeros() as usize;
        cur.xor_assign_unchecked(&basis[flip]);
        out.push(cur.clone());
    }
    out
}

impl BitMatrix {
    pub fn from_rows(cols: usize, rows: Vec<BitVec>) -> Result<Self> {
        for r in &rows {
            ensure_len("matrix row", cols, r.len())?;
        }
        Ok(BitMatrix { rows, cols })
    }

    /// Parses rows written as '0'/'1' strings.
    pub fn parse_rows(cols: usize, rows: &[&str]) -> Result<Self> {
        let rows = rows.iter().map(|s| s.parse()).collect::<Result<Vec<BitVec>>>()?;
        BitMatrix::from_rows(cols, rows)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        BitMatrix {
            rows: vec![BitVec::zeros(cols); rows],
            cols,
        }
    }

    pub fn identity(n: usize) -> Self {
        BitMatrix {
            rows: (0..n).map(|i| BitVec::unit(n, i)).collect(),
            cols: n,
        }
    }

    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        BitMatrix {
            rows: (0..rows).map(|_| BitVec::random(cols, rng)).collect(),
            cols,
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &BitVec {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    /// Rows `[start, end)` as a new matrix.
    pub fn row_block(&self, start: usize, end: usize) -> BitMatrix {
        BitMatrix {
            rows: self.rows[start..end].to_vec(),
            cols: self.cols,
        }
    }

    /// `self` stacked over `lower`.
    pub fn stack(&self, lower: &BitMatrix) -> Result<BitMatrix> {
        ensure_len("stack", self.cols, lower.cols)?;
        let mut rows = self.rows.clone();
        rows.extend(lower.rows.iter().cloned());
        Ok(BitMatrix {
            rows,
            cols: self.cols,
        })
    }

    /// Matrix-vector product with arithmetic mod 2.
    pub fn matvec(&self, v: &BitVec) -> Result<BitVec> {
        ensure_len("matvec", self.cols, v.len())?;
        Ok(BitVec::from_bools(
            &self.rows.iter().map(|r| r.dot_unchecked(v)).collect::<Vec<_>>(),
        ))
    }

    pub fn echelon(&self) -> Echelon {
        echelon_of(self.rows.clone(), self.cols)
    }

    pub fn rank(&self) -> usize {
        self.echelon().rank()
    }

    pub fn in_row_span(&self, v: &BitVec) -> Result<bool> {
        ensure_len("in_row_span", self.cols, v.len())?;
        Ok(self.echelon().reduce(v).is_zero())
    }

    /// Basis of `{beta | M beta = 0}`, one vector per free column.
    pub fn kernel_basis(&self) -> Vec<BitVec> {
        let ech = self.echelon();
        kernel_from_echelon(&ech)
    }

    /// Solves `M beta = x`: one particular solution (free variables set to
    /// zero) if the system is consistent, together with a kernel basis.
    pub fn solve_affine(&self, x: &BitVec) -> Result<AffineSolution> {
        ensure_len("solve_affine", self.nrows(), x.len())?;
        // Augment each row with its right-hand side bit as an extra column.
        let aug_cols = self.cols + 1;
        let aug: Vec<BitVec> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut bits: Vec<bool> = r.iter().collect();
                bits.push(x.get(i));
                BitVec::from_bools(&bits)
            })
            .collect();
        let ech = echelon_of(aug, aug_cols);
        let inconsistent = ech.pivots.contains(&self.cols);
        // Drop the augmented column to recover the echelon form of M.
        let m_rows: Vec<(BitVec, usize, bool)> = ech
            .rows
            .iter()
            .zip(&ech.pivots)
            .filter(|(_, &p)| p < self.cols)
            .map(|(r, &p)| {
                let bits: Vec<bool> = r.iter().take(self.cols).collect();
                (BitVec::from_bools(&bits), p, r.get(self.cols))
            })
            .collect();
        let m_ech = Echelon {
            rows: m_rows.iter().map(|(r, _, _)| r.clone()).collect(),
            pivots: m_rows.iter().map(|(_, p, _)| *p).collect(),
            cols: self.cols,
        };
        let kernel_basis = kernel_from_echelon(&m_ech);
        let particular = if inconsistent {
            None
        } else {
            let mut beta = BitVec::zeros(self.cols);
            for (_, p, rhs) in &m_rows {
                beta.set(*p, *rhs);
            }
            Some(beta)
        };
        Ok(AffineSolution {
            particular,
            kernel_basis,
        })
    }
}

fn echelon_of(mut rows: Vec<BitVec>, cols: usize) -> Echelon {
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..cols {
        let Some(found) = (rank..rows.len()).find(|&r| rows[r].get(col)) else {
            continue;
        };
        rows.swap(rank, found);
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row.get(col) {
                row.xor_assign_unchecked(&pivot_row);
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rows.truncate(rank);
    Echelon { rows, pivots, cols }
}

fn kernel_from_echelon(ech: &Echelon) -> Vec<BitVec> {
    let free: Vec<usize> = (0..ech.cols).filter(|c| !ech.pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = BitVec::unit(ech.cols, fc);
            for (row, &p) in ech.rows.iter().zip(&ech.pivots) {
                if row.get(fc) {
                    v.set(p, true);
                }
            }
            v
        })
        .collect()
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self.rows.iter().map(|r| r.to_string()).collect();
        write!(f, "BitMatrix[{}x{}]({})", self.nrows(), self.cols, rows.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bv(s: &str) -> BitVec {
        s.parse().unwrap()
    }

    fn m(cols: usize, rows: &[&str]) -> BitMatrix {
        BitMatrix::parse_rows(cols, rows).unwrap()
    }

    #[test]
    fn matvec_examples() {
        assert_eq!(BitMatrix::identity(3).matvec(&bv("101")).unwrap(), bv("101"));
        assert_eq!(m(4, &["1111"]).matvec(&bv("1101")).unwrap(), bv("1"));
        assert_eq!(m(2, &["10", "11"]).matvec(&bv("11")).unwrap(), bv("10"));
        assert!(matches!(
            m(2, &["10"]).matvec(&bv("101")),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn solve_affine_examples() {
        let sol = m(2, &["11"]).solve_affine(&bv("0")).unwrap();
        assert_eq!(sol.particular, Some(bv("00")));
        assert_eq!(sol.kernel_basis, vec![bv("11")]);
        let mut coset = sol.solutions();
        coset.sort();
        assert_eq!(coset, vec![bv("00"), bv("11")]);

        let id = BitMatrix::identity(4);
        let sol = id.solve_affine(&bv("1001")).unwrap();
        assert_eq!(sol.particular, Some(bv("1001")));
        assert!(sol.kernel_basis.is_empty());

        let sol = m(2, &["00"]).solve_affine(&bv("1")).unwrap();
        assert_eq!(sol.particular, None);
        assert_eq!(sol.kernel_basis.len(), 2);
        assert!(sol.solutions().is_empty());
    }

    #[test]
    fn row_span_examples() {
        let a = m(3, &["110", "011"]);
        assert!(a.in_row_span(&bv("101")).unwrap());
        assert!(a.in_row_span(&bv("000")).unwrap());
        assert!(!m(2, &["11"]).in_row_span(&bv("10")).unwrap());
    }

    #[test]
    fn dependent_rows_have_lower_rank() {
        let a = m(4, &["1100", "0110", "1010"]);
        assert_eq!(a.rank(), 2);
        assert_eq!(a.kernel_basis().len(), 2);
        assert_eq!(BitMatrix::zeros(0, 5).rank(), 0);
        assert_eq!(BitMatrix::zeros(0, 5).kernel_basis().len(), 5);
    }

    #[test]
    fn every_coset_element_solves_the_system() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let rows = rng.random_range(1..6);
            let cols = rng.random_range(rows..13);
            let mat = BitMatrix::random(rows, cols, &mut rng);
            // x in the image, so the system is solvable.
            let x = mat.matvec(&BitVec::random(cols, &mut rng)).unwrap();
            let sol = mat.solve_affine(&x).unwrap();
            let elems = sol.solutions();
            assert_eq!(elems.len(), 1 << (cols - mat.rank()));
            for e in &elems {
                assert_eq!(mat.matvec(e).unwrap(), x);
            }
            let mut dedup = elems.clone();
            dedup.sort();
            dedup.dedup();
            assert_eq!(dedup.len(), elems.len());
        }
    }

    #[test]
    fn row_span_matches_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let cols = rng.random_range(2..9);
            let mat = BitMatrix::random(rng.random_range(0..4), cols, &mut rng);
            let span: Vec<BitVec> = span_elements(&BitVec::zeros(cols), mat.rows());
            for idx in 0..1usize << cols {
                let v = BitVec::from_index(cols, idx);
                assert_eq!(mat.in_row_span(&v).unwrap(), span.contains(&v));
            }
        }
    }

    #[test]
    fn json_form_is_row_major_string() {
        let a = m(3, &["110", "011"]);
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(json, r#"{"rows":2,"cols":3,"bits":"110011"}"#);
        assert_eq!(serde_json::from_str::<BitMatrix>(&json).unwrap(), a);
        assert!(serde_json::from_str::<BitMatrix>(r#"{"rows":2,"cols":3,"bits":"1100"}"#).is_err());
    }
}
