use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One interval `[birth, death)` in homological dimension `dim`; `death` may
/// be `+∞`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bar {
    pub dim: usize,
    pub birth: f64,
    #[serde(with = "crate::serde_inf")]
    pub death: f64,
}

impl Bar {
    pub fn is_essential(&self) -> bool {
        self.death == f64::INFINITY
    }

    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }
}

/// A multiset of bars sorted by `(dim, birth, death)`. Zero-length bars are
/// never stored.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PersistenceDiagram {
    bars: Vec<Bar>,
}

impl PersistenceDiagram {
    pub fn new(bars: impl IntoIterator<Item = Bar>) -> Self {
        let mut bars: Vec<Bar> = bars.into_iter().filter(|b| b.birth < b.death).collect();
        bars.sort_by(|a, b| a.dim.cmp(&b.dim).then(a.birth.total_cmp(&b.birth)).then(a.death.total_cmp(&b.death)));
        Self { bars }
    }

    pub fn bars(&self) -> &[Bar] {
        &self.bars
    }

    pub fn len(&self) -> usize {
        self.bars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bars.is_empty()
    }

    /// The bars of one dimension.
    pub fn dim(&self, k: usize) -> PersistenceDiagram {
        Self { bars: self.bars.iter().filter(|b| b.dim == k).copied().collect() }
    }

    /// `(birth, death)` pairs of dimension `k`.
    pub fn pairs(&self, k: usize) -> Vec<(f64, f64)> {
        self.bars.iter().filter(|b| b.dim == k).map(|b| (b.birth, b.death)).collect()
    }

    /// Number of bars of dimension `k` alive at `eps`.
    pub fn alive_at(&self, k: usize, eps: f64) -> usize {
        self.bars.iter().filter(|b| b.dim == k && b.birth <= eps && eps < b.death).count()
    }

    pub fn merge(&self, other: &PersistenceDiagram) -> PersistenceDiagram {
        Self::new(self.bars.iter().chain(&other.bars).copied())
    }

    /// Applies the natural logarithm to all endpoints.
    pub fn reindex_log(&self) -> Result<PersistenceDiagram> {
        if let Some(b) = self.bars.iter().find(|b| b.birth <= 0.0) {
            return Err(Error::NonPositiveScale(b.birth));
        }
        Ok(Self::new(self.bars.iter().map(|b| Bar { dim: b.dim, birth: b.birth.ln(), death: b.death.ln() })))
    }

    /// Text form: one `k birth death` line per bar, `inf` for `+∞`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for b in &self.bars {
            let death = if b.is_essential() { "inf".to_string() } else { b.death.to_string() };
            writeln!(out, "{} {} {}", b.dim, b.birth, death).unwrap();
        }
        out
    }

    /// Parses the text form; blank lines and `#` comments are skipped.
    pub fn from_text(text: &str) -> Result<PersistenceDiagram> {
        let mut bars = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse { line: i + 1, message };
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(err(format!("expected `k birth death`, got {line:?}")));
            }
            let dim = fields[0].parse().map_err(|_| err(format!("bad dimension {:?}", fields[0])))?;
            let birth: f64 = fields[1].parse().map_err(|_| err(format!("bad birth {:?}", fields[1])))?;
            let death: f64 = match fields[2] {
                "inf" | "+inf" => f64::INFINITY,
                d => d.parse().map_err(|_| err(format!("bad death {d:?}")))?,
            };
            if !birth.is_finite() || death.is_nan() || death < birth {
                return Err(err(format!("invalid bar [{birth}, {death})")));
            }
            bars.push(Bar { dim, birth, death });
        }
        Ok(Self::new(bars))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let d = PersistenceDiagram::new([
            Bar { dim: 1, birth: 1.0, death: f64::INFINITY },
            Bar { dim: 0, birth: 0.5, death: 2.0 },
            Bar { dim: 0, birth: 0.5, death: 0.5 },
        ]);
        assert_eq!(d.len(), 2);
        assert_eq!(d.to_text(), "0 0.5 2\n1 1 inf\n");
        assert_eq!(PersistenceDiagram::from_text(&d.to_text()).unwrap(), d);
    }

    #[test]
    fn parse_errors_name_the_line() {
        let e = PersistenceDiagram::from_text("0 1 2\n0 x 3\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn json_uses_inf_string() {
        let d = PersistenceDiagram::new([Bar { dim: 0, birth: 1.0, death: f64::INFINITY }]);
        let j = serde_json::to_string(&d).unwrap();
        assert!(j.contains("\"inf\""));
        assert_eq!(serde_json::from_str::<PersistenceDiagram>(&j).unwrap(), d);
    }
}
