use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::Error;

/// Stable address of a generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GenId {
    XHat(usize),
    PHat(usize),
    H,
    /// `M_{μν}` with `μ < ν`.
    M(usize, usize),
    XTilde(usize),
    PTilde(usize),
    HTilde,
}

impl GenId {
    /// `M_{μν}` as a signed reference to the stored `μ < ν` component;
    /// `None` on the diagonal.
    pub fn lorentz(mu: usize, nu: usize) -> Option<(f64, GenId)> {
        use core::cmp::Ordering::*;
        match mu.cmp(&nu) {
            Less => Some((1.0, GenId::M(mu, nu))),
            Greater => Some((-1.0, GenId::M(nu, mu))),
            Equal => None,
        }
    }
}

impl fmt::Display for GenId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenId::XHat(m) => write!(f, "yang.xhat.{m}"),
            GenId::PHat(m) => write!(f, "yang.phat.{m}"),
            GenId::H => f.write_str("yang.h"),
            GenId::M(m, n) => write!(f, "lorentz.M.{m}.{n}"),
            GenId::XTilde(m) => write!(f, "gen.Xtilde.{m}"),
            GenId::PTilde(m) => write!(f, "gen.Ptilde.{m}"),
            GenId::HTilde => f.write_str("gen.htilde"),
        }
    }
}

impl FromStr for GenId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::InvalidParams(alloc::format!("unknown generator id '{s}'"));
        let parts: Vec<&str> = s.split('.').collect();
        let idx = |k: usize| parts.get(k).and_then(|v| v.parse::<usize>().ok()).ok_or_else(bad);
        let id = match (parts.first().copied(), parts.get(1).copied(), parts.len()) {
            (Some("yang"), Some("xhat"), 3) => GenId::XHat(idx(2)?),
            (Some("yang"), Some("phat"), 3) => GenId::PHat(idx(2)?),
            (Some("yang"), Some("h"), 2) => GenId::H,
            (Some("lorentz"), Some("M"), 4) => {
                let (m, n) = (idx(2)?, idx(3)?);
                if m >= n {
                    return Err(bad());
                }
                GenId::M(m, n)
            }
            (Some("gen"), Some("Xtilde"), 3) => GenId::XTilde(idx(2)?),
            (Some("gen"), Some("Ptilde"), 3) => GenId::PTilde(idx(2)?),
            (Some("gen"), Some("htilde"), 2) => GenId::HTilde,
            _ => return Err(bad()),
        };
        debug_assert_eq!(id.to_string(), s);
        Ok(id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        for id in [GenId::XHat(0), GenId::PHat(3), GenId::H, GenId::M(0, 1), GenId::XTilde(2), GenId::PTilde(1), GenId::HTilde] {
            assert_eq!(id.to_string().parse::<GenId>().unwrap(), id);
        }
        assert_eq!("gen.Xtilde.2".parse::<GenId>().unwrap(), GenId::XTilde(2));
        assert!("lorentz.M.1.0".parse::<GenId>().is_err());
        assert!("yang.q.0".parse::<GenId>().is_err());
    }

    #[test]
    fn signed_lorentz() {
        assert_eq!(GenId::lorentz(2, 1), Some((-1.0, GenId::M(1, 2))));
        assert_eq!(GenId::lorentz(1, 1), None);
    }
}
