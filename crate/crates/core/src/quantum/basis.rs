use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{ensure_len, Error, Result};
use crate::gf2::PositionSet;
use crate::scalar::Real;

/// Single-photon BB84 basis: rectilinear `+` or diagonal `x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Basis {
    Plus,
    Cross,
}

impl Basis {
    pub fn opposite(self) -> Basis {
        match self {
            Basis::Plus => Basis::Cross,
            Basis::Cross => Basis::Plus,
        }
    }

    pub fn from_bit(bit: bool) -> Basis {
        if bit {
            Basis::Cross
        } else {
            Basis::Plus
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Basis::Plus => '+',
            Basis::Cross => 'x',
        }
    }

    /// Columns are the encodings of 0 and 1 in computational coordinates.
    pub fn frame<T: Real>(self) -> [[T; 2]; 2] {
        match self {
            Basis::Plus => [[T::one(), T::zero()], [T::zero(), T::one()]],
            Basis::Cross => {
                let h = T::FRAC_1_SQRT_2();
                [[h, h], [h, -h]]
            }
        }
    }
}

/// Measurement frame for one photon: a BB84 basis or a real rotation of `+`
/// by an angle in radians, with `|0> = (cos a, sin a)`, `|1> = (-sin a, cos a)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhotonFrame {
    Basis(Basis),
    Angle(f64),
}

impl PhotonFrame {
    /// 2x2 real matrix whose columns are the frame's `|0>` and `|1>`.
    pub fn matrix<T: Real>(self) -> [[T; 2]; 2] {
        match self {
            PhotonFrame::Basis(b) => b.frame(),
            PhotonFrame::Angle(a) => {
                let (s, c) = (T::from_f64_lossy(a.sin()), T::from_f64_lossy(a.cos()));
                [[c, -s], [s, c]]
            }
        }
    }

    /// Closest BB84 basis, used as the committed basis for angled measurements.
    pub fn nearest_basis(self) -> Basis {
        match self {
            PhotonFrame::Basis(b) => b,
            PhotonFrame::Angle(a) => {
                let q = std::f64::consts::FRAC_PI_2;
                let r = a.rem_euclid(q);
                if r.min(q - r) <= (r - q / 2.0).abs() {
                    Basis::Plus
                } else {
                    Basis::Cross
                }
            }
        }
    }
}

impl From<Basis> for PhotonFrame {
    fn from(b: Basis) -> Self {
        PhotonFrame::Basis(b)
    }
}

/// Sequence of bases, one per photon.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BasisString(Vec<Basis>);

impl BasisString {
    pub fn new(bases: Vec<Basis>) -> Self {
        BasisString(bases)
    }

    pub fn uniform(n: usize, b: Basis) -> Self {
        BasisString(vec![b; n])
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        BasisString((0..n).map(|_| Basis::from_bit(rng.random())).collect())
    }

    /// Basis `i` is `x` iff bit `i` of the big-endian index is set.
    pub fn from_index(n: usize, idx: usize) -> Self {
        BasisString((0..n).map(|i| Basis::from_bit((idx >> (n - 1 - i)) & 1 == 1)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> Basis {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, b: Basis) {
        self.0[i] = b;
    }

    pub fn as_slice(&self) -> &[Basis] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = Basis> + '_ {
        self.0.iter().copied()
    }

    /// Componentwise opposite basis.
    pub fn opposite(&self) -> BasisString {
        BasisString(self.0.iter().map(|b| b.opposite()).collect())
    }

    pub fn restrict(&self, positions: &PositionSet) -> Result<BasisString> {
        ensure_len("basis restrict", self.len(), positions.universe())?;
        Ok(BasisString(positions.iter().map(|i| self.0[i]).collect()))
    }

    /// Positions where the two strings agree.
    pub fn matching(&self, other: &BasisString) -> Result<PositionSet> {
        ensure_len("basis matching", self.len(), other.len())?;
        Ok(PositionSet::from_predicate(self.len(), |i| self.0[i] == other.0[i]))
    }

    pub fn frames(&self) -> Vec<PhotonFrame> {
        self.0.iter().map(|&b| PhotonFrame::Basis(b)).collect()
    }
}

impl fmt::Display for BasisString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|b| write!(f, "{}", b.symbol()))
    }
}

impl fmt::Debug for BasisString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BasisString({self})")
    }
}

impl FromStr for BasisString {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '+' => Ok(Basis::Plus),
                'x' | 'X' | '×' => Ok(Basis::Cross),
                other => Err(Error::domain(format!("invalid basis symbol {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(BasisString)
    }
}

impl Serialize for BasisString {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BasisString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

impl Serialize for Basis {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.symbol().to_string())
    }
}

impl<'de> Deserialize<'de> for Basis {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s: BasisString = String::deserialize(d)?.parse().map_err(serde::de::Error::custom)?;
        match s.as_slice() {
            [b] => Ok(*b),
            _ => Err(serde::de::Error::custom("expected a single basis symbol")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_opposite() {
        let b: BasisString = "+x+".parse().unwrap();
        assert_eq!(b.opposite().to_string(), "x+x");
        assert!("+y".parse::<BasisString>().is_err());
        assert_eq!(BasisString::from_index(3, 0b010), b);
    }

    #[test]
    fn angle_frames() {
        let m: [[f64; 2]; 2] = PhotonFrame::Angle(0.0).matrix();
        assert_eq!(m, Basis::Plus.frame::<f64>());
        assert_eq!(PhotonFrame::Angle(0.1).nearest_basis(), Basis::Plus);
        assert_eq!(PhotonFrame::Angle(0.7).nearest_basis(), Basis::Cross);
        assert_eq!(PhotonFrame::Angle(1.5).nearest_basis(), Basis::Plus);
    }

    #[test]
    fn serde_forms() {
        let b: BasisString = "x+".parse().unwrap();
        assert_eq!(serde_json::to_string(&b).unwrap(), "\"x+\"");
        let f = PhotonFrame::Basis(Basis::Cross);
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(serde_json::from_str::<PhotonFrame>(&s).unwrap(), f);
    }
}
