//! JSON spec files describing an IFS, its costs and a default tile.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{IfsSpec, Similitude};

/// Exponents this close to an integer are rounded when a cost is omitted.
pub const COST_ROUNDING_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapEntry {
    /// Row-major rows of the linear part.
    pub matrix: Vec<Vec<f64>>,
    pub translation: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data", rename_all = "lowercase")]
pub enum TileSpec {
    Attractor,
    Central,
    Interval([f64; 2]),
    Box { min: Vec<f64>, max: Vec<f64> },
    Polygon(Vec<[f64; 2]>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub name: String,
    pub dimension: usize,
    pub maps: Vec<MapEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tile: Option<TileSpec>,
    /// Integer costs for systems that are only approximately scaling.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forced_costs: Option<Vec<f64>>,
}

pub const BUILTIN_SPECS: &[(&str, &str)] = &[
    ("dyadic-1d", include_str!("../specs/dyadic-1d.json")),
    ("square-4map", include_str!("../specs/square-4map.json")),
    ("sierpinski", include_str!("../specs/sierpinski.json")),
    ("golden", include_str!("../specs/golden.json")),
    ("quartic", include_str!("../specs/quartic.json")),
    ("fern", include_str!("../specs/fern.json")),
    ("crack", include_str!("../specs/crack.json")),
    ("newgrowth", include_str!("../specs/newgrowth.json")),
];

impl SpecFile {
    pub fn parse(text: &str) -> Result<Self> {
        let spec: SpecFile = serde_json::from_str(text)?;
        spec.check_shape()?;
        Ok(spec)
    }

    pub fn builtin(name: &str) -> Option<Self> {
        BUILTIN_SPECS
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, text)| Self::parse(text).expect("bundled specs are valid"))
    }

    /// Reads `builtin:NAME` or a file path.
    pub fn load(source: &str) -> Result<Self> {
        if let Some(name) = source.strip_prefix("builtin:") {
            return Self::builtin(name).ok_or_else(|| {
                let known: Vec<&str> = BUILTIN_SPECS.iter().map(|(n, _)| *n).collect();
                Error::SpecFile(format!("unknown builtin spec {name:?} (known: {})", known.join(", ")))
            });
        }
        let text = std::fs::read_to_string(Path::new(source)).map_err(|e| Error::SpecFile(format!("{source}: {e}")))?;
        Self::parse(&text).map_err(|e| Error::SpecFile(format!("{source}: {e}")))
    }

    fn check_shape(&self) -> Result<()> {
        let n = self.dimension;
        if !(1..=2).contains(&n) {
            return Err(Error::SpecFile(format!("dimension must be 1 or 2, got {n}")));
        }
        for (k, m) in self.maps.iter().enumerate() {
            if m.matrix.len() != n || m.matrix.iter().any(|row| row.len() != n) {
                return Err(Error::SpecFile(format!("map {}: matrix must be {n}x{n}", k + 1)));
            }
            if m.translation.len() != n {
                return Err(Error::SpecFile(format!("map {}: translation must have {n} entries", k + 1)));
            }
        }
        if let Some(c) = &self.forced_costs {
            if c.len() != self.maps.len() {
                return Err(Error::CostCount {
                    expected: self.maps.len(),
                    found: c.len(),
                });
            }
        }
        Ok(())
    }

    pub fn similitudes(&self) -> Result<Vec<Similitude>> {
        self.maps
            .iter()
            .map(|m| Similitude::new(m.matrix.iter().flatten().copied().collect(), m.translation.clone()))
            .collect()
    }

    /// The IFS with the listed costs; an omitted cost defaults to the scale
    /// exponent `a_i`, rounded when within 1e−6 of an integer.
    pub fn to_ifs(&self) -> Result<IfsSpec> {
        let maps = self.similitudes()?;
        let exps = IfsSpec::new(self.name.clone(), maps.clone())?.exponents();
        let costs = self
            .maps
            .iter()
            .zip(&exps)
            .map(|(m, a)| {
                m.cost.unwrap_or(if (a - a.round()).abs() <= COST_ROUNDING_TOLERANCE {
                    a.round()
                } else {
                    *a
                })
            })
            .collect();
        IfsSpec::with_costs(self.name.clone(), maps, costs)
    }

    /// The IFS with `forced_costs` in place of the listed ones.
    pub fn to_ifs_forced(&self) -> Result<IfsSpec> {
        let costs = self
            .forced_costs
            .clone()
            .ok_or_else(|| Error::SpecFile(format!("spec {:?} has no forced_costs", self.name)))?;
        IfsSpec::with_costs(self.name.clone(), self.similitudes()?, costs)
    }

    pub fn tile(&self) -> TileSpec {
        self.tile.clone().unwrap_or(TileSpec::Attractor)
    }
}
