//! Polygonal linkages with exact rational edge lengths.
//!
//! All combinatorial decisions (admissibility of a part, genericity of the
//! whole linkage) are tie-sensitive, so everything here is exact: lengths are
//! arbitrary-precision rationals and comparisons reduce to integer arithmetic
//! after clearing denominators once at construction time.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::partition::CyclicPartition;

/// Largest `n` for which the exhaustive genericity check is attempted.
pub const MAX_GENERICITY_N: usize = 24;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum LinkageError {
    #[error("fewer than 3 lengths (got {0})")]
    TooFewLengths(usize),

    #[error("length {index} is not positive ({value})")]
    NonPositiveLength { index: usize, value: String },

    #[error("malformed length token {0:?}")]
    MalformedToken(String),

    #[error("triangle inequality fails: length {index} ({value}) is not shorter than the rest")]
    TriangleInequality { index: usize, value: String },

    #[error("empty part")]
    EmptyPart,

    #[error("edge index {0} out of range 1..={1}")]
    IndexOutOfRange(usize, usize),

    #[error("partition is over ground set 1..={partition_n}, linkage has n={linkage_n}")]
    GroundSetMismatch {
        partition_n: usize,
        linkage_n: usize,
    },

    #[error("n={0} too large for exhaustive genericity check (max {MAX_GENERICITY_N})")]
    TooLargeForGenericity(usize),
}

/// A polygonal linkage: the cyclic sequence of bar lengths `l_1, ..., l_n`.
///
/// Construction enforces `n >= 3`, positivity, and the strict triangle
/// inequality `max l_i < sum of the others` (otherwise the moduli space is
/// empty or a single point and nothing downstream applies).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Linkage {
    lengths: Vec<BigRational>,
    /// Lengths rescaled to integers by the common denominator; all
    /// comparisons run on these.
    scaled: Vec<BigInt>,
    total: BigInt,
}

impl Linkage {
    pub fn new(lengths: Vec<BigRational>) -> Result<Self, LinkageError> {
        if lengths.len() < 3 {
            return Err(LinkageError::TooFewLengths(lengths.len()));
        }
        for (i, l) in lengths.iter().enumerate() {
            if !l.is_positive() {
                return Err(LinkageError::NonPositiveLength {
                    index: i + 1,
                    value: l.to_string(),
                });
            }
        }
        let mut denom_lcm = BigInt::one();
        for l in &lengths {
            denom_lcm = denom_lcm.lcm(l.denom());
        }
        let scaled: Vec<BigInt> = lengths
            .iter()
            .map(|l| l.numer() * (&denom_lcm / l.denom()))
            .collect();
        let total: BigInt = scaled.iter().sum();
        // Strict triangle inequality: max < sum of the rest, i.e. 2*max < total.
        let (max_idx, max_val) = scaled
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1))
            .expect("n >= 3");
        if max_val * 2 >= total {
            return Err(LinkageError::TriangleInequality {
                index: max_idx + 1,
                value: lengths[max_idx].to_string(),
            });
        }
        Ok(Self {
            lengths,
            scaled,
            total,
        })
    }

    /// Number of edges.
    pub fn n(&self) -> usize {
        self.lengths.len()
    }

    pub fn lengths(&self) -> &[BigRational] {
        &self.lengths
    }

    /// Length of edge `i` (1-based).
    pub fn length(&self, i: usize) -> &BigRational {
        &self.lengths[i - 1]
    }

    pub fn perimeter(&self) -> BigRational {
        self.lengths.iter().sum()
    }

    /// Lengths as `f64`, for the numeric witness side.
    pub fn lengths_f64(&self) -> Vec<f64> {
        self.lengths.iter().map(rational_to_f64).collect()
    }

    /// Sum of the scaled integer lengths over a part (1-based indices).
    fn part_sum(&self, part: &[usize]) -> Result<BigInt, LinkageError> {
        if part.is_empty() {
            return Err(LinkageError::EmptyPart);
        }
        let mut sum = BigInt::zero();
        for &i in part {
            if i == 0 || i > self.n() {
                return Err(LinkageError::IndexOutOfRange(i, self.n()));
            }
            sum += &self.scaled[i - 1];
        }
        Ok(sum)
    }

    /// A part is admissible ("short") when its total length does not exceed
    /// the total length of the remaining edges.
    pub fn is_admissible_part(&self, part: &[usize]) -> Result<bool, LinkageError> {
        let sum = self.part_sum(part)?;
        Ok(&sum * 2 <= self.total)
    }

    /// A cyclically ordered partition is admissible when every part is.
    pub fn is_admissible(&self, p: &CyclicPartition) -> Result<bool, LinkageError> {
        if p.ground_size() != self.n() {
            return Err(LinkageError::GroundSetMismatch {
                partition_n: p.ground_size(),
                linkage_n: self.n(),
            });
        }
        for part in p.parts() {
            if !self.is_admissible_part(part)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// True when no subset of edges sums to exactly half the perimeter,
    /// i.e. no configuration of the linkage fits a straight line. Plain
    /// subset enumeration over `2^(n-1)` splits.
    pub fn is_generic(&self) -> Result<bool, LinkageError> {
        let n = self.n();
        if n > MAX_GENERICITY_N {
            return Err(LinkageError::TooLargeForGenericity(n));
        }
        // Fix edge n outside the subset; every split is counted once.
        for mask in 0u64..(1u64 << (n - 1)) {
            let mut sum = BigInt::zero();
            for (i, s) in self.scaled.iter().enumerate().take(n - 1) {
                if mask >> i & 1 == 1 {
                    sum += s;
                }
            }
            if &sum * 2 == self.total {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The same linkage with every length multiplied by a positive rational.
    pub fn scaled_by(&self, factor: &BigRational) -> Result<Self, LinkageError> {
        Self::new(self.lengths.iter().map(|l| l * factor).collect())
    }

    /// The linkage with one extra edge of length `extra` appended.
    pub fn extended(&self, extra: BigRational) -> Result<Self, LinkageError> {
        let mut lengths = self.lengths.clone();
        lengths.push(extra);
        Self::new(lengths)
    }

    /// Lengths joined by commas in the input grammar, e.g. `6/5,1,1,4/5,11/5`.
    pub fn to_lengths_string(&self) -> String {
        self.lengths
            .iter()
            .map(rational_to_string)
            .collect::<Vec<_>>()
            .join(",")
    }
}

pub fn rational_to_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    // Witnesses are float-only; exactness ends here.
    let num: f64 = r.numer().to_string().parse().unwrap_or(f64::NAN);
    let den: f64 = r.denom().to_string().parse().unwrap_or(f64::NAN);
    num / den
}

/// Parse one token: `p/q`, an integer, or a finite decimal. Decimals convert
/// exactly via powers of ten, never through binary floats.
pub fn parse_rational(token: &str) -> Result<BigRational, LinkageError> {
    let malformed = || LinkageError::MalformedToken(token.to_string());
    let t = token.trim();
    if t.is_empty() {
        return Err(malformed());
    }
    if let Some((num, den)) = t.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| malformed())?;
        let den: BigInt = den.trim().parse().map_err(|_| malformed())?;
        if den.is_zero() || den.is_negative() {
            return Err(malformed());
        }
        return Ok(BigRational::new(num, den));
    }
    if let Some((int_part, frac_part)) = t.split_once('.') {
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(malformed());
        }
        let negative = int_part.starts_with('-');
        let int_digits = int_part.strip_prefix(['-', '+']).unwrap_or(int_part);
        if !int_digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(malformed());
        }
        let whole: BigInt = if int_digits.is_empty() {
            BigInt::zero()
        } else {
            int_digits.parse().map_err(|_| malformed())?
        };
        let frac: BigInt = frac_part.parse().map_err(|_| malformed())?;
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let mut value = BigRational::new(whole * &scale + frac, scale);
        if negative {
            value = -value;
        }
        return Ok(value);
    }
    let int: BigInt = t.parse().map_err(|_| malformed())?;
    Ok(BigRational::from_integer(int))
}

/// Parse a comma-separated length list into a validated linkage.
pub fn parse_lengths(text: &str) -> Result<Linkage, LinkageError> {
    let lengths = text
        .split(',')
        .map(parse_rational)
        .collect::<Result<Vec<_>, _>>()?;
    Linkage::new(lengths)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linkage(text: &str) -> Linkage {
        parse_lengths(text).unwrap()
    }

    #[test]
    fn parse_simple() {
        let l = linkage("1,1,1,1/2");
        assert_eq!(l.n(), 4);
        assert_eq!(l.to_lengths_string(), "1,1,1,1/2");
    }

    #[test]
    fn parse_decimals_exactly() {
        let l = linkage("1.2,1,1,0.8,2.2");
        assert_eq!(l.to_lengths_string(), "6/5,1,1,4/5,11/5");
        assert_eq!(linkage("3,1,1,4,4").to_lengths_string(), "3,1,1,4,4");
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            parse_lengths("1,2"),
            Err(LinkageError::TooFewLengths(2))
        ));
        assert!(matches!(
            parse_lengths("1,1,0,1"),
            Err(LinkageError::NonPositiveLength { index: 3, .. })
        ));
        assert!(matches!(
            parse_lengths("1,1,-2,1"),
            Err(LinkageError::NonPositiveLength { index: 3, .. })
        ));
        assert!(matches!(
            parse_lengths("1,1,x"),
            Err(LinkageError::MalformedToken(_))
        ));
        assert!(matches!(
            parse_lengths("1,1,1/0"),
            Err(LinkageError::MalformedToken(_))
        ));
        assert!(matches!(
            parse_lengths("1,1,1."),
            Err(LinkageError::MalformedToken(_))
        ));
        // 5 >= 1+1+2: not a polygon.
        assert!(matches!(
            parse_lengths("1,1,2,5"),
            Err(LinkageError::TriangleInequality { index: 4, .. })
        ));
        // Degenerate equality case is rejected too.
        assert!(matches!(
            parse_lengths("1,1,2"),
            Err(LinkageError::TriangleInequality { .. })
        ));
    }

    #[test]
    fn admissible_part_torus_example() {
        let l = linkage("1.2,1,1,0.8,2.2");
        // {1,2,3} sums to 16/5 which exceeds the rest (3).
        assert!(!l.is_admissible_part(&[1, 2, 3]).unwrap());
        assert!(l.is_admissible_part(&[4, 5]).unwrap());
        // Singletons are always short under the triangle inequality.
        for i in 1..=5 {
            assert!(l.is_admissible_part(&[i]).unwrap());
        }
    }

    #[test]
    fn admissible_part_errors() {
        let l = linkage("1,1,1,1");
        assert_eq!(l.is_admissible_part(&[]), Err(LinkageError::EmptyPart));
        assert_eq!(
            l.is_admissible_part(&[5]),
            Err(LinkageError::IndexOutOfRange(5, 4))
        );
        assert_eq!(
            l.is_admissible_part(&[0]),
            Err(LinkageError::IndexOutOfRange(0, 4))
        );
    }

    #[test]
    fn admissible_partition() {
        let l = linkage("3,1,1,4,4");
        let p = CyclicPartition::parse("1|4|2,3,5", 5).unwrap();
        assert!(l.is_admissible(&p).unwrap());

        let torus = linkage("1.2,1,1,0.8,2.2");
        let bad = CyclicPartition::parse("1,2,3|4|5", 5).unwrap();
        assert!(!torus.is_admissible(&bad).unwrap());

        let all_singletons = CyclicPartition::parse("1|2|3|4|5", 5).unwrap();
        assert!(l.is_admissible(&all_singletons).unwrap());
        assert!(torus.is_admissible(&all_singletons).unwrap());

        let wrong_ground = CyclicPartition::parse("1|2|3", 3).unwrap();
        assert!(matches!(
            l.is_admissible(&wrong_ground),
            Err(LinkageError::GroundSetMismatch { .. })
        ));
    }

    #[test]
    fn genericity() {
        // {1,2} splits the perimeter in half.
        assert!(!linkage("1,1,1,1").is_generic().unwrap());
        // Oracle for (1,1,1,1/2): all 2^4 subset sums, none equals 7/4.
        assert!(linkage("1,1,1,1/2").is_generic().unwrap());
        // Odd integer perimeter can never split evenly.
        assert!(linkage("1,1,1,1,1").is_generic().unwrap());
        assert!(linkage("1.2,1,1,0.8,2.2").is_generic().unwrap());
        assert!(linkage("1,1,1,1,3.5").is_generic().unwrap());
    }

    #[test]
    fn genericity_brute_force_oracle() {
        // Independent oracle: enumerate all sign vectors and check whether a
        // signed sum of lengths vanishes (floating point is fine at these
        // sizes, every sum is a multiple of 1/10).
        for (text, expected) in [
            ("1,1,1,1", false),
            ("1,1,1,1/2", true),
            ("1,1,1,1,1", true),
            ("2,2,2,1,1", false),
            ("1.2,1,1,0.8,2.2", true),
        ] {
            let l = linkage(text);
            let vals = l.lengths_f64();
            let n = vals.len();
            let mut any_zero = false;
            for mask in 0..(1u32 << n) {
                let s: f64 = (0..n)
                    .map(|i| {
                        if mask >> i & 1 == 1 {
                            vals[i]
                        } else {
                            -vals[i]
                        }
                    })
                    .sum();
                if s.abs() < 1e-9 {
                    any_zero = true;
                }
            }
            assert_eq!(!any_zero, expected, "oracle mismatch for {text}");
            assert_eq!(
                l.is_generic().unwrap(),
                expected,
                "impl mismatch for {text}"
            );
        }
    }

    #[test]
    fn genericity_too_large() {
        let l = Linkage::new(vec![BigRational::from_integer(1.into()); 25]).unwrap();
        assert!(matches!(
            l.is_generic(),
            Err(LinkageError::TooLargeForGenericity(25))
        ));
    }

    #[test]
    fn scaling_changes_no_verdict() {
        let l = linkage("1.2,1,1,0.8,2.2");
        for factor in ["3", "1/7", "22/3"] {
            let f = parse_rational(factor).unwrap();
            let s = l.scaled_by(&f).unwrap();
            assert_eq!(s.is_generic().unwrap(), l.is_generic().unwrap());
            for part in [vec![1, 2, 3], vec![4, 5], vec![2], vec![1, 5]] {
                assert_eq!(
                    s.is_admissible_part(&part).unwrap(),
                    l.is_admissible_part(&part).unwrap()
                );
            }
        }
    }
}
