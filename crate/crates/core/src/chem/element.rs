use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// The ten elements that have a one-hot slot in the atom features.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    C,
    N,
    O,
    S,
    F,
    P,
    Cl,
    Br,
    B,
    H,
}

impl Element {
    pub const ALL: [Element; 10] = [
        Element::C,
        Element::N,
        Element::O,
        Element::S,
        Element::F,
        Element::P,
        Element::Cl,
        Element::Br,
        Element::B,
        Element::H,
    ];

    /// Position of this element in the one-hot block.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Element::C => "C",
            Element::N => "N",
            Element::O => "O",
            Element::S => "S",
            Element::F => "F",
            Element::P => "P",
            Element::Cl => "Cl",
            Element::Br => "Br",
            Element::B => "B",
            Element::H => "H",
        }
    }

    /// Case-insensitive symbol lookup; `None` for anything outside the
    /// supported set (metals, iodine, selenium, ...).
    pub fn from_symbol(s: &str) -> Option<Element> {
        let s = s.trim();
        Element::ALL
            .into_iter()
            .find(|e| e.symbol().eq_ignore_ascii_case(s))
            .or(match s {
                // deuterium
                "D" | "d" => Some(Element::H),
                _ => None,
            })
    }

    /// Single-bond covalent radius in Å (Cordero et al. 2008).
    pub fn covalent_radius(self) -> f64 {
        match self {
            Element::H => 0.31,
            Element::B => 0.84,
            Element::C => 0.76,
            Element::N => 0.71,
            Element::O => 0.66,
            Element::F => 0.57,
            Element::P => 1.07,
            Element::S => 1.05,
            Element::Cl => 1.02,
            Element::Br => 1.20,
        }
    }

    /// Default valence used to derive implicit valence from explicit bonds.
    pub fn standard_valence(self) -> u32 {
        match self {
            Element::C => 4,
            Element::N | Element::P | Element::B => 3,
            Element::O | Element::S => 2,
            Element::F | Element::Cl | Element::Br | Element::H => 1,
        }
    }

    pub fn is_hydrogen(self) -> bool {
        self == Element::H
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for Element {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Element::from_symbol(s).ok_or_else(|| format!("unsupported element `{s}`"))
    }
}

impl Serialize for Element {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.symbol())
    }
}

impl<'de> Deserialize<'de> for Element {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
