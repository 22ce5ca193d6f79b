//! Inclusive integer ranges written `lo..hi[:step]`, or a single value.

use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntRange {
    pub lo: usize,
    pub hi: usize,
    pub step: usize,
}

impl IntRange {
    pub fn single(v: usize) -> Self {
        Self { lo: v, hi: v, step: 1 }
    }

    pub fn values(&self) -> Vec<usize> {
        (self.lo..=self.hi).step_by(self.step).collect()
    }

    pub fn min(&self) -> usize {
        self.lo
    }
}

impl FromStr for IntRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |p: &str| p.trim().parse::<usize>().map_err(|_| format!("invalid integer '{p}' in range '{s}'"));
        let (span, step) = match s.split_once(':') {
            Some((span, step)) => (span, num(step)?),
            None => (s, 1),
        };
        let r = match span.split_once("..") {
            Some((lo, hi)) => Self { lo: num(lo)?, hi: num(hi.trim_start_matches('='))?, step },
            None if step == 1 => Self::single(num(span)?),
            None => return Err(format!("step given without a range in '{s}'")),
        };
        if r.step == 0 {
            return Err(format!("range step must be positive in '{s}'"));
        }
        if r.lo > r.hi {
            return Err(format!("range '{s}' is not ascending"));
        }
        Ok(r)
    }
}

impl fmt::Display for IntRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lo == self.hi {
            write!(f, "{}", self.lo)
        } else if self.step == 1 {
            write!(f, "{}..{}", self.lo, self.hi)
        } else {
            write!(f, "{}..{}:{}", self.lo, self.hi, self.step)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_forms() {
        assert_eq!("4".parse::<IntRange>().unwrap().values(), vec![4]);
        assert_eq!("1..4".parse::<IntRange>().unwrap().values(), vec![1, 2, 3, 4]);
        assert_eq!("60..6000:2970".parse::<IntRange>().unwrap().values(), vec![60, 3030, 6000]);
        assert_eq!("2..=3".parse::<IntRange>().unwrap().values(), vec![2, 3]);
    }

    #[test]
    fn rejects_bad_ranges() {
        for s in ["", "a..3", "4..2", "1..3:0", "5:2", "-1..3"] {
            assert!(s.parse::<IntRange>().is_err(), "{s}");
        }
    }

    #[test]
    fn display_round_trips() {
        for s in ["7", "1..4", "10..100:10"] {
            assert_eq!(s.parse::<IntRange>().unwrap().to_string(), s);
        }
    }
}
