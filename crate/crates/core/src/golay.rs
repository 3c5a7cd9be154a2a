//! Golay complementary pairs, their mates, and exact integer correlations.
//!
//! Pairs come from the recursive doubling `A' = A‖B`, `B' = A‖(−B)` seeded
//! with `([+1], [+1])`, so every power-of-two length is available. All
//! correlations here are carried out in `i64` and compared exactly.

use crate::error::{arg, Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Longest pair `generate_golay_pair` will build unless told otherwise.
pub const DEFAULT_MAX_LENGTH: usize = 4096;

/// A non-empty sequence of ±1 code elements.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i8>", into = "Vec<i8>")]
pub struct BinaryCode(Vec<i8>);

impl BinaryCode {
    pub fn new(elements: Vec<i8>) -> Result<Self> {
        if elements.is_empty() {
            return arg("binary code must have at least one element");
        }
        if let Some(pos) = elements.iter().position(|&e| e != 1 && e != -1) {
            return arg(format!(
                "binary code element {} at index {pos} is not +1 or -1",
                elements[pos]
            ));
        }
        Ok(Self(elements))
    }

    pub fn elements(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn reversed(&self) -> Self {
        Self(self.0.iter().rev().copied().collect())
    }

    pub fn negated(&self) -> Self {
        Self(self.0.iter().map(|&e| -e).collect())
    }

    /// Comma-separated `+1/-1` line, the on-disk form of a code.
    pub fn to_csv_line(&self) -> String {
        self.0
            .iter()
            .map(|e| e.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn parse_csv_line(line: &str) -> Result<Self> {
        let elements = line
            .split(',')
            .map(|tok| {
                let tok = tok.trim();
                tok.trim_start_matches('+')
                    .parse::<i8>()
                    .map_err(|_| Error::Argument(format!("bad code element {tok:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(elements)
    }
}

impl TryFrom<Vec<i8>> for BinaryCode {
    type Error = Error;
    fn try_from(v: Vec<i8>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<BinaryCode> for Vec<i8> {
    fn from(c: BinaryCode) -> Self {
        c.0
    }
}

impl fmt::Display for BinaryCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_csv_line())
    }
}

/// Integer-valued correlation with the position of lag zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntSequence {
    pub values: Vec<i64>,
    pub center_index: usize,
}

impl IntSequence {
    /// Value at signed lag `k`, zero outside the stored support.
    pub fn at_lag(&self, k: isize) -> i64 {
        let idx = self.center_index as isize + k;
        if idx < 0 || idx as usize >= self.values.len() {
            0
        } else {
            self.values[idx as usize]
        }
    }

    pub fn lags(&self) -> impl Iterator<Item = isize> + '_ {
        let c = self.center_index as isize;
        (0..self.values.len() as isize).map(move |i| i - c)
    }
}

/// Pair of length `2^m` by recursive doubling, capped at [`DEFAULT_MAX_LENGTH`].
pub fn generate_golay_pair(m: u32) -> Result<(BinaryCode, BinaryCode)> {
    generate_golay_pair_with_max(m, DEFAULT_MAX_LENGTH)
}

pub fn generate_golay_pair_with_max(m: u32, max_len: usize) -> Result<(BinaryCode, BinaryCode)> {
    let len = 1usize
        .checked_shl(m)
        .filter(|&l| m < usize::BITS && l <= max_len)
        .ok_or_else(|| {
            Error::Size(format!(
                "Golay length 2^{m} exceeds the maximum of {max_len}"
            ))
        })?;
    let mut a: Vec<i8> = vec![1];
    let mut b: Vec<i8> = vec![1];
    while a.len() < len {
        let mut na = a.clone();
        na.extend_from_slice(&b);
        let mut nb = a;
        nb.extend(b.iter().map(|&e| -e));
        a = na;
        b = nb;
    }
    Ok((BinaryCode(a), BinaryCode(b)))
}

/// Pair of length `n_g`, which must be a power of two.
pub fn golay_pair_of_length(n_g: usize) -> Result<(BinaryCode, BinaryCode)> {
    if !n_g.is_power_of_two() {
        return arg(format!("Golay length must be a power of two, got {n_g}"));
    }
    generate_golay_pair(n_g.trailing_zeros())
}

/// Full aperiodic autocorrelation, `2·N_g − 1` lags.
pub fn code_acf(x: &BinaryCode) -> IntSequence {
    code_xcorr(x, x)
}

/// Full aperiodic cross-correlation `r[n] = Σ_j x[j+n]·y[j]`.
///
/// This is the coefficient of `z^{-n}` in `X(z)·Y(z^{-1})`, stored for
/// `n = −(|y|−1) ..= |x|−1` with `center_index = |y| − 1`. It satisfies
/// `code_xcorr(x, y)[n] = code_xcorr(y, x)[−n]`.
pub fn code_xcorr(x: &BinaryCode, y: &BinaryCode) -> IntSequence {
    let (p, q) = (x.len(), y.len());
    let mut values = vec![0i64; p + q - 1];
    for (i, &xi) in x.0.iter().enumerate() {
        for (j, &yj) in y.0.iter().enumerate() {
            // lag n = i - j, stored at n + q - 1
            values[i + q - 1 - j] += (xi as i64) * (yj as i64);
        }
    }
    IntSequence {
        values,
        center_index: q - 1,
    }
}

/// True iff the two ACFs sum to `2·N_g` at lag zero and to 0 elsewhere.
pub fn verify_complementary(a: &BinaryCode, b: &BinaryCode) -> Result<bool> {
    if a.len() != b.len() {
        return arg(format!(
            "complementary check needs equal lengths, got {} and {}",
            a.len(),
            b.len()
        ));
    }
    let ra = code_acf(a);
    let rb = code_acf(b);
    let n = a.len() as i64;
    Ok(ra
        .values
        .iter()
        .zip(&rb.values)
        .enumerate()
        .all(|(i, (x, y))| {
            let expect = if i == ra.center_index { 2 * n } else { 0 };
            x + y == expect
        }))
}

/// Mate `(reverse(b), −reverse(a))` of a complementary pair.
pub fn mate_pair(a: &BinaryCode, b: &BinaryCode) -> Result<(BinaryCode, BinaryCode)> {
    if !verify_complementary(a, b)? {
        return arg("mate_pair input is not a complementary pair");
    }
    Ok((b.reversed(), a.reversed().negated()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(v: &[i8]) -> BinaryCode {
        BinaryCode::new(v.to_vec()).unwrap()
    }

    #[test]
    fn doubling_examples() {
        assert_eq!(generate_golay_pair(0).unwrap(), (code(&[1]), code(&[1])));
        assert_eq!(
            generate_golay_pair(1).unwrap(),
            (code(&[1, 1]), code(&[1, -1]))
        );
        assert_eq!(
            generate_golay_pair(2).unwrap(),
            (code(&[1, 1, 1, -1]), code(&[1, 1, -1, 1]))
        );
    }

    #[test]
    fn size_cap() {
        assert!(generate_golay_pair(12).is_ok());
        assert!(matches!(generate_golay_pair(13), Err(Error::Size(_))));
        assert!(matches!(generate_golay_pair(200), Err(Error::Size(_))));
        assert!(generate_golay_pair_with_max(13, 8192).is_ok());
    }

    #[test]
    fn acf_examples() {
        assert_eq!(code_acf(&code(&[1, 1])).values, vec![1, 2, 1]);
        assert_eq!(
            code_acf(&code(&[1, 1, 1, -1])).values,
            vec![-1, 0, 1, 4, 1, 0, -1]
        );
        assert_eq!(
            code_acf(&code(&[1, 1, -1, 1])).values,
            vec![1, 0, -1, 4, -1, 0, 1]
        );
    }

    #[test]
    fn xcorr_examples() {
        assert_eq!(
            code_xcorr(&code(&[1, 1]), &code(&[1, 1])).values,
            vec![1, 2, 1]
        );
        let r = code_xcorr(&code(&[1, 1]), &code(&[1, -1]));
        assert_eq!(r.values, vec![-1, 0, 1]);
        assert_eq!(r.center_index, 1);
        assert_eq!(code_xcorr(&code(&[1]), &code(&[1])).values, vec![1]);
    }

    #[test]
    fn complementary_examples() {
        assert!(verify_complementary(&code(&[1, 1]), &code(&[1, -1])).unwrap());
        assert!(verify_complementary(&code(&[1, 1, 1, -1]), &code(&[1, 1, -1, 1])).unwrap());
        assert!(!verify_complementary(&code(&[1, 1]), &code(&[1, 1])).unwrap());
        assert!(verify_complementary(&code(&[1]), &code(&[1, 1])).is_err());
    }

    #[test]
    fn mate_examples() {
        let (a, b) = (code(&[1, 1]), code(&[1, -1]));
        let (c, d) = mate_pair(&a, &b).unwrap();
        assert_eq!((c.clone(), d.clone()), (code(&[-1, 1]), code(&[-1, -1])));
        assert_eq!(mate_pair(&c, &d).unwrap(), (a.negated(), b.negated()));

        let (c, d) = mate_pair(&code(&[1, 1, 1, -1]), &code(&[1, 1, -1, 1])).unwrap();
        assert_eq!(c, code(&[1, -1, 1, 1]));
        assert_eq!(d, code(&[1, -1, -1, -1]));
        assert!(verify_complementary(&c, &d).unwrap());

        assert!(mate_pair(&code(&[1, 1]), &code(&[1, 1])).is_err());
    }

    #[test]
    fn rejects_bad_elements() {
        assert!(BinaryCode::new(vec![]).is_err());
        assert!(BinaryCode::new(vec![1, 0]).is_err());
        assert!(BinaryCode::new(vec![2]).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let (a, _) = generate_golay_pair(3).unwrap();
        assert_eq!(BinaryCode::parse_csv_line(&a.to_csv_line()).unwrap(), a);
        assert_eq!(
            BinaryCode::parse_csv_line("+1, -1").unwrap(),
            code(&[1, -1])
        );
        assert!(BinaryCode::parse_csv_line("1,x").is_err());
    }
}
