use crate::error::{GeoError, Result};

/// A named coordinate patch: an open box with a safety margin kept away from
/// its faces (coordinate singularities sit on or beyond the faces).
#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    pub name: String,
    pub coord_names: Vec<String>,
    pub bounds: Vec<(f64, f64)>,
    pub margin: f64,
}

impl Chart {
    pub fn new(name: &str, coord_names: &[&str], bounds: &[(f64, f64)], margin: f64) -> Result<Self> {
        if coord_names.is_empty() || coord_names.len() != bounds.len() {
            return Err(GeoError::Dimension(format!(
                "chart `{name}`: {} coordinate names for {} intervals",
                coord_names.len(),
                bounds.len()
            )));
        }
        if !(margin > 0.0) {
            return Err(GeoError::InvalidParameter(format!(
                "chart `{name}`: margin must be positive"
            )));
        }
        for (c, &(lo, hi)) in coord_names.iter().zip(bounds) {
            if !(hi - lo > 2.0 * margin) {
                return Err(GeoError::InvalidParameter(format!(
                    "chart `{name}`: interval for `{c}` is narrower than twice the margin"
                )));
            }
        }
        Ok(Self {
            name: name.to_string(),
            coord_names: coord_names.iter().map(|s| s.to_string()).collect(),
            bounds: bounds.to_vec(),
            margin,
        })
    }

    pub fn dim(&self) -> usize {
        self.coord_names.len()
    }

    /// The box shrunk by the margin; every sampled point must lie inside it.
    pub fn sample_box(&self) -> Vec<(f64, f64)> {
        self.bounds
            .iter()
            .map(|&(lo, hi)| (lo + self.margin, hi - self.margin))
            .collect()
    }

    pub fn in_sample_box(&self, p: &[f64]) -> bool {
        p.len() == self.dim()
            && self
                .sample_box()
                .iter()
                .zip(p)
                .all(|(&(lo, hi), &x)| x >= lo && x <= hi)
    }

    /// Checks that every point within `reach` (per coordinate) of `p` stays in
    /// the open box.
    pub fn check(&self, p: &[f64], reach: f64) -> Result<()> {
        if p.len() != self.dim() {
            return Err(GeoError::Dimension(format!(
                "point of length {} on {}-dimensional chart `{}`",
                p.len(),
                self.dim(),
                self.name
            )));
        }
        let inside = self
            .bounds
            .iter()
            .zip(p)
            .all(|(&(lo, hi), &x)| x - reach > lo && x + reach < hi);
        if inside {
            Ok(())
        } else {
            Err(GeoError::OutOfChart {
                chart: self.name.clone(),
                point: p.to_vec(),
                reach,
            })
        }
    }

    /// Chart on `prefix × self`, e.g. adding the fiber coordinates in front.
    pub fn extend_front(&self, name: &str, coords: &[(&str, (f64, f64))]) -> Self {
        let mut coord_names: Vec<String> = coords.iter().map(|(c, _)| c.to_string()).collect();
        coord_names.extend(self.coord_names.iter().cloned());
        let mut bounds: Vec<(f64, f64)> = coords.iter().map(|&(_, b)| b).collect();
        bounds.extend(self.bounds.iter().copied());
        Self {
            name: name.to_string(),
            coord_names,
            bounds,
            margin: self.margin,
        }
    }

    /// Product chart `self × other`.
    pub fn product(&self, name: &str, other: &Chart) -> Self {
        let mut coord_names = self.coord_names.clone();
        let mut bounds = self.bounds.clone();
        for (i, c) in other.coord_names.iter().enumerate() {
            // repeated names get a suffix so lookups stay unambiguous
            if coord_names.contains(c) {
                coord_names.push(format!("{c}2"));
            } else {
                coord_names.push(c.clone());
            }
            bounds.push(other.bounds[i]);
        }
        Self {
            name: name.to_string(),
            coord_names,
            bounds,
            margin: self.margin.max(other.margin),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_mismatched_lengths() {
        assert!(Chart::new("bad", &["x", "y"], &[(0.0, 1.0)], 0.1).is_err());
    }

    #[test]
    fn stencil_reach_is_checked() {
        let c = Chart::new("line", &["x"], &[(0.0, 1.0)], 0.1).unwrap();
        assert!(c.check(&[0.5], 0.1).is_ok());
        assert!(matches!(c.check(&[0.05], 0.1), Err(GeoError::OutOfChart { .. })));
        assert!(c.in_sample_box(&[0.1]));
        assert!(!c.in_sample_box(&[0.05]));
    }

    #[test]
    fn product_renames_duplicates() {
        let s = Chart::new("s2", &["psi", "phi"], &[(0.0, 3.0), (-3.0, 3.0)], 0.1).unwrap();
        let p = s.product("s2xs2", &s);
        assert_eq!(p.coord_names, vec!["psi", "phi", "psi2", "phi2"]);
    }
}
