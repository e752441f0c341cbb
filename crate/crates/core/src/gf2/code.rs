use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVec};

/// Largest number of generator rows whose span is enumerated.
pub const MIN_DISTANCE_ROW_CAP: usize = 24;

/// Linear map `f` of shape `(r+m) x N`: the first `r` rows are the
/// syndrome matrix `g`, the next `m` rows the compression matrix `h`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawCode", into = "RawCode")]
pub struct LinearCodeSpec {
    f: BitMatrix,
    r: usize,
    m: usize,
}

#[derive(Serialize, Deserialize)]
struct RawCode {
    f: BitMatrix,
    r: usize,
    m: usize,
}

impl TryFrom<RawCode> for LinearCodeSpec {
    type Error = Error;
    fn try_from(raw: RawCode) -> Result<Self> {
        LinearCodeSpec::new(raw.f, raw.r, raw.m)
    }
}

impl From<LinearCodeSpec> for RawCode {
    fn from(c: LinearCodeSpec) -> Self {
        RawCode {
            f: c.f,
            r: c.r,
            m: c.m,
        }
    }
}

impl LinearCodeSpec {
    pub fn new(f: BitMatrix, r: usize, m: usize) -> Result<Self> {
        if f.nrows() != r + m {
            return Err(Error::dim("code rows (r+m)", r + m, f.nrows()));
        }
        if r + m > f.ncols() {
            return Err(Error::domain(format!(
                "r + m = {} exceeds N = {}",
                r + m,
                f.ncols()
            )));
        }
        Ok(LinearCodeSpec { f, r, m })
    }

    pub fn from_parts(g: &BitMatrix, h: &BitMatrix) -> Result<Self> {
        LinearCodeSpec::new(g.stack(h)?, g.nrows(), h.nrows())
    }

    /// Uniformly random `(r+m) x N` matrix.
    pub fn random<R: Rng + ?Sized>(big_n: usize, r: usize, m: usize, rng: &mut R) -> Result<Self> {
        LinearCodeSpec::new(BitMatrix::random(r + m, big_n, rng), r, m)
    }

    /// Single all-ones row: no syndrome, the output is the parity.
    pub fn yao(big_n: usize) -> Self {
        LinearCodeSpec {
            f: BitMatrix::from_rows(big_n, vec![BitVec::ones(big_n)]).expect("row has N columns"),
            r: 0,
            m: 1,
        }
    }

    pub fn f(&self) -> &BitMatrix {
        &self.f
    }

    pub fn g(&self) -> BitMatrix {
        self.f.row_block(0, self.r)
    }

    pub fn h(&self) -> BitMatrix {
        self.f.row_block(self.r, self.r + self.m)
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn big_n(&self) -> usize {
        self.f.ncols()
    }

    /// `N - r - m`; equals the coset dimension when `f` has full row rank.
    pub fn k(&self) -> usize {
        self.big_n() - self.r - self.m
    }

    pub fn rank(&self) -> usize {
        self.f.rank()
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.r + self.m
    }

    /// Dimension of `{beta | f beta = 0}`.
    pub fn kernel_dim(&self) -> usize {
        self.big_n() - self.rank()
    }

    /// Minimum weight over nonzero elements of the row span of `f`;
    /// `None` stands for the +infinity of an empty span.
    pub fn min_distance(&self) -> Result<Option<usize>> {
        min_distance_of_rows(&self.f)
    }
}

/// Minimum nonzero weight in the row span of `m`, by enumerating the span.
pub fn min_distance_of_rows(m: &BitMatrix) -> Result<Option<usize>> {
    if m.nrows() > MIN_DISTANCE_ROW_CAP {
        return Err(Error::Resource {
            what: "min_distance span rows",
            requested: m.nrows(),
            limit: MIN_DISTANCE_ROW_CAP,
        });
    }
    // Echelon rows are independent, so every nonempty combination is nonzero.
    let basis = m.echelon().rows;
    if basis.is_empty() {
        return Ok(None);
    }
    let mut cur = BitVec::zeros(m.ncols());
    let mut best = usize::MAX;
    for step in 1..1usize << basis.len() {
        cur.xor_assign_unchecked(&basis[step.trailing_zeros() as usize]);
        best = best.min(cur.weight());
    }
    Ok(Some(best))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn code(cols: usize, rows: &[&str], r: usize) -> LinearCodeSpec {
        let f = BitMatrix::parse_rows(cols, rows).unwrap();
        let m = rows.len() - r;
        LinearCodeSpec::new(f, r, m).unwrap()
    }

    #[test]
    fn min_distance_examples() {
        assert_eq!(code(4, &["1111"], 0).min_distance().unwrap(), Some(4));
        let id = LinearCodeSpec::new(BitMatrix::identity(5), 2, 3).unwrap();
        assert_eq!(id.min_distance().unwrap(), Some(1));
        assert_eq!(code(3, &["110", "011"], 1).min_distance().unwrap(), Some(2));
        let empty = LinearCodeSpec::new(BitMatrix::zeros(0, 4), 0, 0).unwrap();
        assert_eq!(empty.min_distance().unwrap(), None);
        let zero_row = code(3, &["000"], 0);
        assert_eq!(zero_row.min_distance().unwrap(), None);
    }

    #[test]
    fn over_cap_is_resource_error() {
        let f = BitMatrix::zeros(25, 30);
        assert!(min_distance_of_rows(&f).unwrap_err().is_resource());
    }

    #[test]
    fn shape_checks() {
        assert!(LinearCodeSpec::new(BitMatrix::zeros(3, 2), 1, 2).is_err());
        assert!(LinearCodeSpec::new(BitMatrix::zeros(2, 4), 1, 2).is_err());
        let c = code(4, &["1100", "0011", "1111"], 1);
        assert_eq!(c.g().nrows(), 1);
        assert_eq!(c.h().row(1).to_string(), "1111");
        assert_eq!(c.k(), 1);
        assert_eq!(c.kernel_dim(), 2);
        assert!(!c.is_full_rank());
    }

    #[test]
    fn yao_code() {
        let y = LinearCodeSpec::yao(6);
        assert_eq!((y.r(), y.m(), y.k()), (0, 1, 5));
        assert_eq!(y.min_distance().unwrap(), Some(6));
        let w: BitVec = "101100".parse().unwrap();
        assert_eq!(y.h().matvec(&w).unwrap().to_string(), "1");
    }

    #[test]
    fn json_round_trip() {
        let c = code(4, &["1100", "0111"], 1);
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<LinearCodeSpec>(&s).unwrap(), c);
    }

    fn exhaustive_min_weight(f: &BitMatrix) -> Option<usize> {
        let n = f.ncols();
        (1..1usize << n)
            .map(|i| BitVec::from_index(n, i))
            .filter(|v| f.in_row_span(v).unwrap())
            .map(|v| v.weight())
            .min()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn min_distance_matches_full_enumeration(seed in any::<u64>(), cols in 1usize..=14, rows in 0usize..=5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rows = rows.min(cols);
            let f = BitMatrix::random(rows, cols, &mut rng);
            prop_assert_eq!(min_distance_of_rows(&f).unwrap(), exhaustive_min_weight(&f));
        }
    }
}
