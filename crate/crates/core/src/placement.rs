use std::fmt;

use crate::error::{Error, Result};

/// Antenna position index per AP, each in `1..=N`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Placement(Vec<usize>);

impl Placement {
    pub fn new(positions: Vec<usize>, num_positions: usize) -> Result<Self> {
        for (ap, &value) in positions.iter().enumerate() {
            if value == 0 || value > num_positions {
                return Err(Error::PlacementOutOfRange {
                    ap,
                    value,
                    max: num_positions,
                });
            }
        }
        Ok(Self(positions))
    }

    /// The fixed-antenna placement `[1, ..., 1]`.
    pub fn ones(num_aps: usize) -> Self {
        Self(vec![1; num_aps])
    }

    pub fn positions(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Phase-center displacement of each antenna, `n_l * d_s` meters.
    pub fn offsets(&self, position_step: f64) -> Vec<f64> {
        self.0.iter().map(|&n| n as f64 * position_step).collect()
    }

    pub(crate) fn set(&mut self, ap: usize, value: usize) {
        self.0[ap] = value;
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.0
    }
}

impl fmt::Display for Placement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{n}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Placement {
    type Err = Error;

    /// Parses space- or comma-separated indices without range checking.
    fn from_str(s: &str) -> Result<Self> {
        let positions = s
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<usize>().map_err(|e| Error::Parse {
                    line: 0,
                    message: format!("bad placement entry `{t}`: {e}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if positions.iter().any(|&n| n == 0) {
            return Err(Error::Parse {
                line: 0,
                message: "placement indices start at 1".into(),
            });
        }
        Ok(Self(positions))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_checked() {
        assert!(Placement::new(vec![1, 4], 4).is_ok());
        assert!(matches!(
            Placement::new(vec![1, 5], 4),
            Err(Error::PlacementOutOfRange { ap: 1, value: 5, max: 4 })
        ));
        assert!(Placement::new(vec![0], 4).is_err());
    }

    #[test]
    fn display_parse_roundtrip() {
        let p = Placement::new(vec![3, 1, 2], 3).unwrap();
        assert_eq!(p.to_string(), "3 1 2");
        assert_eq!("3,1 2".parse::<Placement>().unwrap(), p);
    }
}
