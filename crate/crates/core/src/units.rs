//! Unit system shared by every quantity in a frame model.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LengthUnit {
    Meter,
    Millimeter,
    Foot,
    Inch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForceUnit {
    Kilonewton,
    Newton,
    Kip,
    Pound,
}

impl LengthUnit {
    pub const ALL: [LengthUnit; 4] = [Self::Meter, Self::Millimeter, Self::Foot, Self::Inch];

    /// Size of one unit in meters.
    pub fn in_meters(self) -> f64 {
        match self {
            Self::Meter => 1.0,
            Self::Millimeter => 1.0e-3,
            Self::Foot => 0.3048,
            Self::Inch => 0.0254,
        }
    }

    /// Symbol used by the problem template.
    pub fn symbol(self) -> &'static str {
        match self {
            Self::Meter => "m",
            Self::Millimeter => "mm",
            Self::Foot => "ft",
            Self::Inch => "in",
        }
    }
}

impl ForceUnit {
    pub const ALL: [ForceUnit; 4] = [Self::Kilonewton, Self::Newton, Self::Kip, Self::Pound];

    /// Size of one unit in kilonewtons.
    pub fn in_kilonewtons(self) -> f64 {
        match self {
            Self::Kilonewton => 1.0,
            Self::Newton => 1.0e-3,
            Self::Kip => 4.448_221_615_260_5,
            Self::Pound => 4.448_221_615_260_5e-3,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Self::Kilonewton => "kN",
            Self::Newton => "N",
            Self::Kip => "kip",
            Self::Pound => "lb",
        }
    }
}

impl FromStr for LengthUnit {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|u| u.symbol() == s)
            .ok_or_else(|| format!("unknown length unit `{s}`"))
    }
}

impl FromStr for ForceUnit {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|u| u.symbol() == s)
            .ok_or_else(|| format!("unknown force unit `{s}`"))
    }
}

impl fmt::Display for LengthUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl fmt::Display for ForceUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// One consistent (length, force) pair for a whole model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitSystem {
    pub length_unit: LengthUnit,
    pub force_unit: ForceUnit,
}

impl UnitSystem {
    pub const KN_M: UnitSystem = UnitSystem {
        length_unit: LengthUnit::Meter,
        force_unit: ForceUnit::Kilonewton,
    };

    pub fn new(length_unit: LengthUnit, force_unit: ForceUnit) -> Self {
        Self {
            length_unit,
            force_unit,
        }
    }
}

impl Default for UnitSystem {
    fn default() -> Self {
        Self::KN_M
    }
}

impl fmt::Display for UnitSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}, {}", self.force_unit, self.length_unit)
    }
}

/// Physical dimension expressed as powers of force and length.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dimension {
    pub force: i32,
    pub length: i32,
}

impl Dimension {
    pub const LENGTH: Dimension = Dimension {
        force: 0,
        length: 1,
    };
    pub const AREA: Dimension = Dimension {
        force: 0,
        length: 2,
    };
    pub const INERTIA: Dimension = Dimension {
        force: 0,
        length: 4,
    };
    pub const FORCE: Dimension = Dimension {
        force: 1,
        length: 0,
    };
    pub const LINE_LOAD: Dimension = Dimension {
        force: 1,
        length: -1,
    };
    pub const STRESS: Dimension = Dimension {
        force: 1,
        length: -2,
    };
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match (self.force, self.length) {
            (0, 1) => "length",
            (0, 2) => "length^2",
            (0, 4) => "length^4",
            (1, 0) => "force",
            (1, -1) => "force/length",
            (1, -2) => "force/length^2",
            _ => return write!(f, "force^{} length^{}", self.force, self.length),
        };
        f.write_str(name)
    }
}

/// A parsed compound unit such as `kN/m^2` or `mm^4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompoundUnit {
    pub dimension: Dimension,
    /// Size of one unit in kN^force * m^length.
    pub scale: f64,
}

impl CompoundUnit {
    /// Parses `<force>`, `<length>[^]n`, `<force>/<length>[^n]` and the
    /// named stresses Pa, kPa, MPa, GPa, psi, ksi.
    pub fn parse(text: &str) -> Option<CompoundUnit> {
        let named = match text {
            "Pa" => Some((ForceUnit::Newton, LengthUnit::Meter, 1.0)),
            "kPa" => Some((ForceUnit::Kilonewton, LengthUnit::Meter, 1.0)),
            "MPa" => Some((ForceUnit::Newton, LengthUnit::Millimeter, 1.0)),
            "GPa" => Some((ForceUnit::Kilonewton, LengthUnit::Millimeter, 1.0)),
            "psi" => Some((ForceUnit::Pound, LengthUnit::Inch, 1.0)),
            "ksi" => Some((ForceUnit::Kip, LengthUnit::Inch, 1.0)),
            _ => None,
        };
        if let Some((force, length, mult)) = named {
            return Some(CompoundUnit {
                dimension: Dimension::STRESS,
                scale: mult * force.in_kilonewtons() / length.in_meters().powi(2),
            });
        }

        match text.split_once('/') {
            Some((num, den)) => {
                let force: ForceUnit = num.parse().ok()?;
                let (length, power) = parse_length_power(den)?;
                Some(CompoundUnit {
                    dimension: Dimension {
                        force: 1,
                        length: -power,
                    },
                    scale: force.in_kilonewtons() / length.in_meters().powi(power),
                })
            }
            None => {
                if let Ok(force) = text.parse::<ForceUnit>() {
                    return Some(CompoundUnit {
                        dimension: Dimension::FORCE,
                        scale: force.in_kilonewtons(),
                    });
                }
                let (length, power) = parse_length_power(text)?;
                Some(CompoundUnit {
                    dimension: Dimension {
                        force: 0,
                        length: power,
                    },
                    scale: length.in_meters().powi(power),
                })
            }
        }
    }

    /// The unit of `dimension` in the given system.
    pub fn of_system(system: UnitSystem, dimension: Dimension) -> CompoundUnit {
        CompoundUnit {
            dimension,
            scale: system.force_unit.in_kilonewtons().powi(dimension.force)
                * system.length_unit.in_meters().powi(dimension.length),
        }
    }

    /// Canonical spelling of `dimension` in `system`, e.g. `kN/m^2`.
    pub fn spell(system: UnitSystem, dimension: Dimension) -> String {
        let f = system.force_unit.symbol();
        let l = system.length_unit.symbol();
        match (dimension.force, dimension.length) {
            (0, 1) => l.to_string(),
            (0, p) => format!("{l}^{p}"),
            (1, 0) => f.to_string(),
            (1, -1) => format!("{f}/{l}"),
            (1, p) => format!("{f}/{l}^{}", -p),
            _ => unreachable!("no template quantity has dimension {dimension}"),
        }
    }
}

fn parse_length_power(text: &str) -> Option<(LengthUnit, i32)> {
    let split = text
        .find(|c: char| c == '^' || c.is_ascii_digit())
        .unwrap_or(text.len());
    let (sym, rest) = text.split_at(split);
    let length: LengthUnit = sym.parse().ok()?;
    let rest = rest.strip_prefix('^').unwrap_or(rest);
    let power = if rest.is_empty() {
        1
    } else {
        rest.parse::<i32>().ok().filter(|p| (1..=4).contains(p))?
    };
    Some((length, power))
}

/// Factor that converts a value in `from` into the unit of the same
/// dimension in `to`. Exactly 1.0 when the units coincide.
pub fn conversion_factor(from: CompoundUnit, to: CompoundUnit) -> f64 {
    if from.scale == to.scale {
        1.0
    } else {
        from.scale / to.scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_compound_units() {
        let u = CompoundUnit::parse("kN/m^2").unwrap();
        assert_eq!(u.dimension, Dimension::STRESS);
        assert_eq!(u.scale, 1.0);

        let u = CompoundUnit::parse("mm4").unwrap();
        assert_eq!(u.dimension, Dimension::INERTIA);
        assert!((u.scale - 1e-12).abs() < 1e-24);

        let mpa = CompoundUnit::parse("MPa").unwrap();
        let n_mm2 = CompoundUnit::parse("N/mm^2").unwrap();
        assert_eq!(mpa, n_mm2);

        assert_eq!(
            CompoundUnit::parse("kip").unwrap().dimension,
            Dimension::FORCE
        );
        assert_eq!(
            CompoundUnit::parse("lb/ft").unwrap().dimension,
            Dimension::LINE_LOAD
        );
    }

    #[test]
    fn rejects_unknown_units() {
        assert!(CompoundUnit::parse("furlong").is_none());
        assert!(CompoundUnit::parse("kN/parsec").is_none());
        assert!(CompoundUnit::parse("m^7").is_none());
        assert!(CompoundUnit::parse("").is_none());
    }

    #[test]
    fn identity_conversion_is_exact() {
        let sys = UnitSystem::new(LengthUnit::Foot, ForceUnit::Kip);
        for dim in [Dimension::LENGTH, Dimension::STRESS, Dimension::INERTIA] {
            let own = CompoundUnit::parse(&CompoundUnit::spell(sys, dim)).unwrap();
            assert_eq!(
                conversion_factor(own, CompoundUnit::of_system(sys, dim)),
                1.0
            );
        }
    }

    #[test]
    fn converts_millimeters_to_meters() {
        let from = CompoundUnit::parse("mm").unwrap();
        let to = CompoundUnit::of_system(UnitSystem::KN_M, Dimension::LENGTH);
        assert!((conversion_factor(from, to) - 1e-3).abs() < 1e-18);
    }
}
