use std::fmt;
use std::str::FromStr;

use crate::Error;

/// Exact non-negative rational with 64-bit numerator and denominator,
/// stored reduced. Used for corruption fractions and recovery margins so
/// that floor computations and file headers are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ratio64 {
    num: u64,
    den: u64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Ratio64 {
    pub fn new(num: u64, den: u64) -> Result<Self, Error> {
        if den == 0 {
            return Err(Error::BadDelta(format!("{num}/0")));
        }
        let g = gcd(num, den).max(1);
        Ok(Ratio64 {
            num: num / g,
            den: den / g,
        })
    }

    pub fn zero() -> Self {
        Ratio64 { num: 0, den: 1 }
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Exact `floor(self * n)`.
    pub fn floor_times(&self, n: u64) -> u64 {
        (self.num as u128 * n as u128 / self.den as u128) as u64
    }

    /// Exact comparison against `p/q`.
    pub fn cmp_fraction(&self, p: u64, q: u64) -> std::cmp::Ordering {
        (self.num as u128 * q as u128).cmp(&(p as u128 * self.den as u128))
    }
}

impl fmt::Display for Ratio64 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Ratio64 {
    type Err = Error;

    /// Accepts `a/b`, decimals like `0.25`, and plain integers.
    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        if let Some((a, b)) = s.split_once('/') {
            let num = a
                .trim()
                .parse::<u64>()
                .map_err(|_| Error::BadDelta(s.to_string()))?;
            let den = b
                .trim()
                .parse::<u64>()
                .map_err(|_| Error::BadDelta(s.to_string()))?;
            return Ratio64::new(num, den);
        }
        if let Some((whole, frac)) = s.split_once('.') {
            let whole_val = if whole.is_empty() {
                0
            } else {
                whole
                    .parse::<u64>()
                    .map_err(|_| Error::BadDelta(s.to_string()))?
            };
            if frac.is_empty() || frac.len() > 18 || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(Error::BadDelta(s.to_string()));
            }
            let scale = 10u64.pow(frac.len() as u32);
            let frac_val = frac
                .parse::<u64>()
                .map_err(|_| Error::BadDelta(s.to_string()))?;
            let num = whole_val
                .checked_mul(scale)
                .and_then(|w| w.checked_add(frac_val))
                .ok_or_else(|| Error::BadDelta(s.to_string()))?;
            return Ratio64::new(num, scale);
        }
        let num = s
            .parse::<u64>()
            .map_err(|_| Error::BadDelta(s.to_string()))?;
        Ratio64::new(num, 1)
    }
}

impl serde::Serialize for Ratio64 {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Ratio64 {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!("1/5".parse::<Ratio64>().unwrap(), Ratio64::new(1, 5).unwrap());
        assert_eq!("0.2".parse::<Ratio64>().unwrap(), Ratio64::new(1, 5).unwrap());
        assert_eq!("0.25".parse::<Ratio64>().unwrap(), Ratio64::new(1, 4).unwrap());
        assert_eq!("1".parse::<Ratio64>().unwrap(), Ratio64::new(1, 1).unwrap());
        assert!("1/0".parse::<Ratio64>().is_err());
        assert!("x".parse::<Ratio64>().is_err());
    }

    #[test]
    fn floor_times_is_exact() {
        let quarter = Ratio64::new(1, 4).unwrap();
        assert_eq!(quarter.floor_times(1024), 256);
        let fifth = Ratio64::new(1, 5).unwrap();
        assert_eq!(fifth.floor_times(32768), 6553);
        assert_eq!(Ratio64::zero().floor_times(999), 0);
    }

    #[test]
    fn comparisons() {
        let d = Ratio64::new(2, 10).unwrap();
        assert_eq!(d.cmp_fraction(1, 2), std::cmp::Ordering::Less);
        assert_eq!(d.cmp_fraction(1, 5), std::cmp::Ordering::Equal);
    }
}
